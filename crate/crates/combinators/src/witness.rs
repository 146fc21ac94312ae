//! Witnesses of the combined classes: disjoint unions, apex sets and tree
//! decompositions whose torsos carry witnesses of the base class.

use wmls_core::graph_model::{index_map, validate_decomposition, Decomposition, Graph};
use wmls_core::mls::{LabelError, UnionClosed, Witness};

/// Positions of the members of `subset` (sorted) inside `all` (sorted).
pub(crate) fn positions(all: &[usize], subset: &[usize]) -> Vec<usize> {
    subset
        .iter()
        .map(|v| all.binary_search(v).expect("subset of a sorted list"))
        .collect()
}

/// A partition of the vertices into parts, each with its own witness.
#[derive(Debug, Clone, PartialEq)]
pub struct UnionWitness<W> {
    pub n: usize,
    /// `(vertices, witness)`; the vertices of a part are sorted and the
    /// witness numbers them `0..len` in that order.
    pub parts: Vec<(Vec<usize>, W)>,
}

impl<W> UnionWitness<W> {
    /// A single part covering all `n` vertices.
    pub fn single(n: usize, witness: W) -> Self {
        UnionWitness {
            n,
            parts: vec![((0..n).collect(), witness)],
        }
    }

    /// Checks that the parts partition the vertices of `supergraph` and that
    /// no edge of `supergraph` joins two parts.  Returns the part of every
    /// vertex.
    pub fn validate(&self, supergraph: &Graph) -> Result<Vec<usize>, LabelError> {
        let n = supergraph.n();
        if self.n != n {
            return Err(LabelError::Witness(format!(
                "partition is over {} vertices, graph has {n}",
                self.n
            )));
        }
        let mut part_of = vec![usize::MAX; n];
        for (i, (vertices, _)) in self.parts.iter().enumerate() {
            if vertices.windows(2).any(|w| w[0] >= w[1]) {
                return Err(LabelError::Witness(format!("part {i} is not sorted")));
            }
            for &v in vertices {
                if v >= n || part_of[v] != usize::MAX {
                    return Err(LabelError::Witness(format!(
                        "vertex {v} is out of range or in two parts"
                    )));
                }
                part_of[v] = i;
            }
        }
        if let Some(v) = part_of.iter().position(|&p| p == usize::MAX) {
            return Err(LabelError::Witness(format!("vertex {v} is in no part")));
        }
        if let Some((u, v)) = supergraph
            .sorted_edges()
            .find(|&(u, v)| part_of[u] != part_of[v])
        {
            return Err(LabelError::Witness(format!(
                "edge {u}-{v} joins two parts"
            )));
        }
        Ok(part_of)
    }
}

impl<W: Witness> Witness for UnionWitness<W> {
    fn restrict(&self, keep: &[usize]) -> Self {
        let index = index_map(self.n, keep);
        let parts = self
            .parts
            .iter()
            .filter_map(|(vertices, w)| {
                let local: Vec<usize> = (0..vertices.len())
                    .filter(|&i| index[vertices[i]].is_some())
                    .collect();
                if local.is_empty() {
                    return None;
                }
                let kept = local.iter().map(|&i| index[vertices[i]].unwrap()).collect();
                Some((kept, w.restrict(&local)))
            })
            .collect();
        UnionWitness {
            n: keep.len(),
            parts,
        }
    }
}

impl<W: Witness> UnionClosed for UnionWitness<W> {
    /// Flattens: the parts of every input become parts of the result.
    fn disjoint_union(n: usize, parts: Vec<(Vec<usize>, Self)>) -> Self {
        let parts = parts
            .into_iter()
            .flat_map(|(outer, u)| {
                u.parts.into_iter().map(move |(inner, w)| {
                    (inner.iter().map(|&i| outer[i]).collect::<Vec<_>>(), w)
                })
            })
            .map(|(mut vertices, w)| {
                vertices.sort_unstable();
                (vertices, w)
            })
            .collect();
        UnionWitness { n, parts }
    }
}

/// An ordered apex set `u₁,…,u_b` and a witness for the graph without it.
#[derive(Debug, Clone, PartialEq)]
pub struct ApexWitness<W> {
    pub apex: Vec<usize>,
    /// Witness for `G⁺ − B`, whose vertices are the non-apex vertices in
    /// increasing order.
    pub rest: W,
}

impl<W: Witness> Witness for ApexWitness<W> {
    fn restrict(&self, keep: &[usize]) -> Self {
        let mut sorted_apex = self.apex.clone();
        sorted_apex.sort_unstable();
        let is_apex = |v: &usize| sorted_apex.binary_search(v).is_ok();
        let rest_keep: Vec<usize> = keep
            .iter()
            .filter(|v| !is_apex(v))
            .map(|&v| v - sorted_apex.partition_point(|&a| a < v))
            .collect();
        let apex = self
            .apex
            .iter()
            .filter_map(|u| keep.binary_search(u).ok())
            .collect();
        ApexWitness {
            apex,
            rest: self.rest.restrict(&rest_keep),
        }
    }
}

/// A rooted forest-decomposition with a base witness for every torso.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompWitness<W> {
    pub n: usize,
    pub decomposition: Decomposition,
    /// `torsos[x]` certifies the torso of node `x`, whose vertices are the
    /// bag of `x` in increasing order.
    pub torsos: Vec<W>,
}

impl<W> DecompWitness<W> {
    /// Checks that the decomposition is valid for `supergraph` and carries
    /// one witness per node.
    pub fn validate(&self, supergraph: &Graph) -> Result<(), LabelError> {
        if self.n != supergraph.n() {
            return Err(LabelError::Witness(format!(
                "decomposition is over {} vertices, graph has {}",
                self.n,
                supergraph.n()
            )));
        }
        if self.torsos.len() != self.decomposition.node_count() {
            return Err(LabelError::Witness(format!(
                "{} torso witnesses for {} nodes",
                self.torsos.len(),
                self.decomposition.node_count()
            )));
        }
        let report = validate_decomposition(supergraph, &self.decomposition);
        if !report.is_valid() {
            return Err(LabelError::Witness(format!(
                "invalid decomposition: {:?}",
                report.violations.first()
            )));
        }
        Ok(())
    }
}

impl<W: Witness> Witness for DecompWitness<W> {
    /// Torsos of the restricted decomposition are subgraphs of the
    /// restricted torsos, so restricted torso witnesses remain valid.
    fn restrict(&self, keep: &[usize]) -> Self {
        let index = index_map(self.n, keep);
        let torsos = (0..self.decomposition.node_count())
            .map(|x| {
                let bag = self.decomposition.bag(x);
                let local: Vec<usize> = (0..bag.len())
                    .filter(|&i| index[bag[i]].is_some())
                    .collect();
                self.torsos[x].restrict(&local)
            })
            .collect();
        DecompWitness {
            n: keep.len(),
            decomposition: self.decomposition.restrict_vertices(self.n, keep),
            torsos,
        }
    }
}

impl<W: Witness> UnionClosed for DecompWitness<W> {
    /// Places the forests side by side.
    fn disjoint_union(n: usize, parts: Vec<(Vec<usize>, Self)>) -> Self {
        let mut parent = Vec::new();
        let mut bags = Vec::new();
        let mut torsos = Vec::new();
        for (vertices, w) in parts {
            let offset = parent.len();
            let d = &w.decomposition;
            for x in 0..d.node_count() {
                parent.push(d.parent(x).map(|p| p + offset));
                bags.push(d.bag(x).iter().map(|&v| vertices[v]).collect::<Vec<_>>());
            }
            torsos.extend(w.torsos);
        }
        DecompWitness {
            n,
            decomposition: Decomposition::new(parent, bags).expect("disjoint forests"),
            torsos,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Records the vertex set it was restricted to, in original numbering.
    #[derive(Debug, Clone, PartialEq)]
    struct Trace(Vec<usize>);

    impl Witness for Trace {
        fn restrict(&self, keep: &[usize]) -> Self {
            Trace(keep.iter().map(|&i| self.0[i]).collect())
        }
    }

    #[test]
    fn union_restriction_drops_empty_parts() {
        let w = UnionWitness {
            n: 5,
            parts: vec![(vec![0, 2], Trace(vec![0, 2])), (vec![1, 3, 4], Trace(vec![1, 3, 4]))],
        };
        let r = w.restrict(&[3, 4]);
        assert_eq!(r.n, 2);
        assert_eq!(r.parts, vec![(vec![0, 1], Trace(vec![3, 4]))]);
    }

    #[test]
    fn union_of_unions_is_flat() {
        let a = UnionWitness {
            n: 2,
            parts: vec![(vec![0], Trace(vec![10])), (vec![1], Trace(vec![11]))],
        };
        let b = UnionWitness::single(1, Trace(vec![20]));
        let u = UnionWitness::disjoint_union(3, vec![(vec![0, 2], a), (vec![1], b)]);
        assert_eq!(
            u.parts,
            vec![
                (vec![0], Trace(vec![10])),
                (vec![2], Trace(vec![11])),
                (vec![1], Trace(vec![20]))
            ]
        );
    }

    #[test]
    fn partition_validation() {
        let g = Graph::new(3, vec![(0, 1)]).unwrap();
        let ok = UnionWitness {
            n: 3,
            parts: vec![(vec![0, 1], ()), (vec![2], ())],
        };
        assert_eq!(ok.validate(&g).unwrap(), vec![0, 0, 1]);
        let split = UnionWitness {
            n: 3,
            parts: vec![(vec![0, 2], ()), (vec![1], ())],
        };
        assert!(split.validate(&g).is_err());
        let partial = UnionWitness {
            n: 3,
            parts: vec![(vec![0, 1], ())],
        };
        assert!(partial.validate(&g).is_err());
    }

    #[test]
    fn apex_restriction_renumbers_both_sides() {
        // Apex vertices 1 and 3 of 0..5; the rest is 0,2,4.
        let w = ApexWitness {
            apex: vec![3, 1],
            rest: Trace(vec![0, 2, 4]),
        };
        let r = w.restrict(&[1, 2, 4]);
        assert_eq!(r.apex, vec![0]);
        assert_eq!(r.rest, Trace(vec![2, 4]));
    }

    #[test]
    fn decomposition_restriction_and_union() {
        let d = Decomposition::new(vec![None, Some(0)], vec![vec![0, 1], vec![1, 2]]).unwrap();
        let w = DecompWitness {
            n: 3,
            decomposition: d,
            torsos: vec![Trace(vec![0, 1]), Trace(vec![1, 2])],
        };
        let r = w.restrict(&[1, 2]);
        assert_eq!(r.decomposition.bag(0), &[0]);
        assert_eq!(r.decomposition.bag(1), &[0, 1]);
        assert_eq!(r.torsos, vec![Trace(vec![1]), Trace(vec![1, 2])]);

        let u = DecompWitness::disjoint_union(5, vec![(vec![0, 1, 2], w.clone()), (vec![3, 4], r)]);
        assert_eq!(u.decomposition.node_count(), 4);
        assert_eq!(u.decomposition.parent(3), Some(2));
        assert_eq!(u.decomposition.bag(3), &[3, 4]);
        let g = Graph::new(5, vec![(0, 1), (1, 2), (3, 4)]).unwrap();
        assert!(u.validate(&g).is_ok());
    }
}
