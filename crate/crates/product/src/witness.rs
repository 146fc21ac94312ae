//! Certificates that a graph is a subgraph of `H ⊠ P`, where `H` has an
//! elimination order whose later neighbourhoods are cliques of size at most
//! `k` (so `tw(H) ≤ k`) and `P` is a path on rows `1..=h`.

use serde::{Deserialize, Serialize};
use wmls_core::graph_model::{index_map, Graph, GraphError};
use wmls_core::mls::Witness;

/// A placement of the vertices of `G⁺` into `H ⊠ P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductWitness {
    pub k: usize,
    pub h: usize,
    pub host: Graph,
    /// A permutation of the host vertices.
    pub elim_order: Vec<usize>,
    /// `placement[v] = (host vertex, row)` with rows in `1..=h`.
    pub placement: Vec<(usize, usize)>,
}

/// Serialised form: `{ "k", "h", "H_edges", "elim_order", "placement" }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductWitnessJson {
    pub k: usize,
    pub h: usize,
    #[serde(rename = "H_edges")]
    pub h_edges: Vec<[usize; 2]>,
    pub elim_order: Vec<usize>,
    pub placement: Vec<[usize; 2]>,
}

impl ProductWitness {
    pub fn to_json(&self) -> ProductWitnessJson {
        ProductWitnessJson {
            k: self.k,
            h: self.h,
            h_edges: self.host.edges().iter().map(|&(u, v)| [u, v]).collect(),
            elim_order: self.elim_order.clone(),
            placement: self.placement.iter().map(|&(v, i)| [v, i]).collect(),
        }
    }

    pub fn from_json(json: ProductWitnessJson) -> Result<Self, GraphError> {
        let host = Graph::new(
            json.elim_order.len(),
            json.h_edges.iter().map(|e| (e[0], e[1])).collect(),
        )?;
        Ok(ProductWitness {
            k: json.k,
            h: json.h,
            host,
            elim_order: json.elim_order,
            placement: json.placement.iter().map(|p| (p[0], p[1])).collect(),
        })
    }

    /// Position of each host vertex in the elimination order.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![usize::MAX; self.host.n()];
        for (i, &v) in self.elim_order.iter().enumerate() {
            pos[v] = i;
        }
        pos
    }

    /// `N⁺(v)`: neighbours later in the elimination order, sorted by id.
    pub fn later_neighbours(&self, positions: &[usize]) -> Vec<Vec<usize>> {
        (0..self.host.n())
            .map(|v| {
                self.host
                    .neighbors(v)
                    .iter()
                    .copied()
                    .filter(|&w| positions[w] > positions[v])
                    .collect()
            })
            .collect()
    }

    /// Checks the elimination order and, if `supergraph` is given, that the
    /// placement embeds it into `H ⊠ P`.
    pub fn validate(&self, supergraph: Option<&Graph>) -> Result<(), String> {
        let m = self.host.n();
        if self.elim_order.len() != m {
            return Err("elimination order does not list every host vertex".into());
        }
        let positions = self.positions();
        if positions.iter().any(|&p| p == usize::MAX) {
            return Err("elimination order is not a permutation".into());
        }
        for (v, later) in self.later_neighbours(&positions).iter().enumerate() {
            if later.len() > self.k {
                return Err(format!("host vertex {v} has {} later neighbours", later.len()));
            }
            if !self.host.is_clique(later) {
                return Err(format!("later neighbourhood of host vertex {v} is not a clique"));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for (v, &(hv, row)) in self.placement.iter().enumerate() {
            if hv >= m {
                return Err(format!("vertex {v} is placed on unknown host vertex {hv}"));
            }
            if row == 0 || row > self.h {
                return Err(format!("vertex {v} is placed on row {row} outside 1..={}", self.h));
            }
            if !seen.insert((hv, row)) {
                return Err(format!("placement is not injective at vertex {v}"));
            }
        }
        if let Some(g) = supergraph {
            if g.n() != self.placement.len() {
                return Err("placement does not cover the graph".into());
            }
            for (u, v) in g.sorted_edges() {
                let (a, i) = self.placement[u];
                let (b, j) = self.placement[v];
                if i.abs_diff(j) > 1 || (a != b && !self.host.has_edge(a, b)) {
                    return Err(format!("edge {u}-{v} is not an edge of H ⊠ P"));
                }
            }
        }
        Ok(())
    }
}

impl Witness for ProductWitness {
    /// Keeps the placed vertices in `keep` and shrinks the host to the host
    /// vertices still used; the restricted order is still a valid
    /// elimination order of the induced host subgraph.
    fn restrict(&self, keep: &[usize]) -> Self {
        let mut used: Vec<usize> = keep.iter().map(|&v| self.placement[v].0).collect();
        used.sort_unstable();
        used.dedup();
        let index = index_map(self.host.n(), &used);
        ProductWitness {
            k: self.k,
            h: self.h,
            host: self.host.induced(&used),
            elim_order: self.elim_order.iter().filter_map(|&v| index[v]).collect(),
            placement: keep
                .iter()
                .map(|&v| {
                    let (hv, row) = self.placement[v];
                    (index[hv].expect("used host vertex"), row)
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle_host() -> ProductWitness {
        ProductWitness {
            k: 2,
            h: 2,
            host: Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap(),
            elim_order: vec![0, 1, 2],
            placement: vec![(0, 1), (1, 1), (2, 2), (0, 2)],
        }
    }

    #[test]
    fn valid_witness_passes() {
        let w = triangle_host();
        let g = Graph::new(4, vec![(0, 1), (1, 2), (0, 3), (2, 3)]).unwrap();
        assert_eq!(w.validate(Some(&g)), Ok(()));
    }

    #[test]
    fn non_clique_later_neighbourhood_fails() {
        let w = ProductWitness {
            k: 2,
            h: 1,
            host: Graph::new(3, vec![(0, 1), (0, 2)]).unwrap(),
            elim_order: vec![0, 1, 2],
            placement: vec![],
        };
        assert!(w.validate(None).unwrap_err().contains("not a clique"));
    }

    #[test]
    fn edge_spanning_two_rows_fails() {
        let w = ProductWitness {
            k: 1,
            h: 3,
            host: Graph::new(1, vec![]).unwrap(),
            elim_order: vec![0],
            placement: vec![(0, 1), (0, 3)],
        };
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        assert!(w.validate(Some(&g)).is_err());
    }

    #[test]
    fn restriction_compacts_the_host() {
        let w = triangle_host().restrict(&[2, 3]);
        assert_eq!(w.host.n(), 2);
        assert_eq!(w.placement, vec![(1, 2), (0, 2)]);
        assert_eq!(w.validate(None), Ok(()));
    }

    #[test]
    fn json_round_trip() {
        let w = triangle_host();
        let text = serde_json::to_string(&w.to_json()).unwrap();
        assert!(text.contains("\"H_edges\""));
        let back = ProductWitness::from_json(serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, w);
    }
}
