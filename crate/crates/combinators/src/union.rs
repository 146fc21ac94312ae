//! Disjoint unions.
//!
//! Each part `G_i` is labelled by the base scheme and its labels are
//! prefixed with the codeword `ρ(i)` of a weight-balanced alphabetic code
//! over the part weights `ω(G_i)`:
//!
//! * `μ(v) = ⟨ρ(i), μ_i(v)⟩` and `μ(K) = ⟨ρ(i), μ_i(K)⟩`;
//! * `κ(K,u) = κ_i(K,u)`.
//!
//! Vertices with different codewords lie in different parts and are never
//! adjacent.

use wmls_core::codes::{frame, nice_weights, unframe_exact, AlphabeticCode, BitLabel};
use wmls_core::mls::{Budget, Instance, LabelError, MixedLabelling, Scheme, TesterError};

use crate::config::{loglog, CombinatorConfig};
use crate::witness::UnionWitness;

/// The disjoint-union combinator.
#[derive(Debug, Clone)]
pub struct Union<S> {
    pub base: S,
    pub config: CombinatorConfig,
}

impl<S> Union<S> {
    pub fn new(base: S, config: CombinatorConfig) -> Self {
        Union { base, config }
    }

    /// Budget of the union given the base budget at `n`.
    pub fn budget_over(&self, n: usize, base: Budget) -> Budget {
        let extra = 3.0 + self.config.union_c * loglog(n);
        Budget {
            g1: base.g1 + extra,
            g2: base.g2,
            g3: base.g3 + extra,
        }
    }
}

/// Sums weights per part, checked to fit the alphabetic code's input.
pub(crate) fn part_weights(
    weights: &[u64],
    parts: impl Iterator<Item = impl Iterator<Item = usize>>,
) -> Result<Vec<u64>, LabelError> {
    parts
        .map(|vs| {
            let sum: u128 = vs.map(|v| weights[v] as u128).sum();
            u64::try_from(sum).map_err(|_| LabelError::Bound("part weight overflows".into()))
        })
        .collect()
}

impl<S: Scheme> Scheme for Union<S> {
    type Witness = UnionWitness<S::Witness>;

    fn name(&self) -> String {
        format!("union({})", self.base.name())
    }

    fn label(&self, inst: &Instance<Self::Witness>) -> Result<MixedLabelling, LabelError> {
        let n = inst.n();
        if n == 0 {
            return Ok(MixedLabelling::default());
        }
        let part_of = inst.witness.validate(&inst.supergraph)?;
        let weights = nice_weights(&inst.weights)?;
        let parts = &inst.witness.parts;
        let psi = part_weights(&weights, parts.iter().map(|(vs, _)| vs.iter().copied()))?;
        let code = AlphabeticCode::new(&psi)?;

        let mut local_of = vec![0; n];
        for (vertices, _) in parts {
            for (i, &v) in vertices.iter().enumerate() {
                local_of[v] = i;
            }
        }
        // Requested cliques, routed to their part.
        let mut sub_cliques: Vec<Vec<Vec<usize>>> = vec![Vec::new(); parts.len()];
        let mut route = Vec::with_capacity(inst.cliques.len());
        for (c, k) in inst.cliques.iter().enumerate() {
            let p = part_of[k[0]];
            if k.iter().any(|&v| part_of[v] != p) {
                return Err(LabelError::InvalidInstance(format!(
                    "clique {c} spans two components"
                )));
            }
            route.push((p, sub_cliques[p].len()));
            sub_cliques[p].push(k.iter().map(|&v| local_of[v]).collect());
        }

        let mut sub_labels = Vec::with_capacity(parts.len());
        for (p, ((vertices, witness), cliques)) in parts.iter().zip(sub_cliques).enumerate() {
            let sub = Instance {
                supergraph: inst.supergraph.induced(vertices),
                graph: inst.graph.induced(vertices),
                weights: vertices.iter().map(|&v| weights[v]).collect(),
                cliques,
                witness: witness.clone(),
            };
            let l = self
                .base
                .label(&sub)
                .map_err(|e| e.context(format!("component {p}")))?;
            sub_labels.push(l);
        }

        let mut vertex = vec![BitLabel::new(); n];
        for (p, (vertices, _)) in parts.iter().enumerate() {
            for (i, &v) in vertices.iter().enumerate() {
                vertex[v] = frame(&[code.word(p).bits(), sub_labels[p].vertex[i].bits()]);
            }
        }
        let mut clique = Vec::with_capacity(route.len());
        let mut local = Vec::with_capacity(route.len());
        for &(p, c) in &route {
            clique.push(frame(&[code.word(p).bits(), sub_labels[p].clique[c].bits()]));
            local.push(sub_labels[p].local[c].clone());
        }
        Ok(MixedLabelling {
            vertex,
            clique,
            local,
        })
    }

    fn adjacent(&self, x: &[bool], y: &[bool]) -> Result<bool, TesterError> {
        let [rx, mx] = unframe_exact::<2>(x)?;
        let [ry, my] = unframe_exact::<2>(y)?;
        if rx != ry {
            return Ok(false);
        }
        self.base.adjacent(mx, my)
    }

    fn identity(&self, clique: &[bool], kappa: &[bool], v: &[bool]) -> Result<bool, TesterError> {
        let [rk, mk] = unframe_exact::<2>(clique)?;
        let [rv, mv] = unframe_exact::<2>(v)?;
        if rk != rv {
            return Ok(false);
        }
        self.base.identity(mk, kappa, mv)
    }

    fn budget(&self, n: usize) -> Budget {
        self.budget_over(n, self.base.budget(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use wmls_core::graph_model::Graph;
    use wmls_core::mls::{check_scheme_on_instance, ExplicitScheme};

    fn scheme() -> Union<ExplicitScheme> {
        Union::new(ExplicitScheme, CombinatorConfig::default())
    }

    fn two_edges() -> Instance<UnionWitness<()>> {
        let g = Graph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        Instance {
            supergraph: g.clone(),
            graph: g,
            weights: vec![1; 4],
            cliques: vec![vec![0, 1], vec![2, 3], vec![2]],
            witness: UnionWitness {
                n: 4,
                parts: vec![(vec![0, 1], ()), (vec![2, 3], ())],
            },
        }
    }

    #[test]
    fn two_edges_cross_pairs_are_non_adjacent() {
        let s = scheme();
        let inst = two_edges();
        let (l, report) = check_scheme_on_instance(&s, &inst).unwrap();
        assert!(report.pass, "{:?}", report.first_failure);
        for u in 0..2 {
            for v in 2..4 {
                assert!(!s.adjacent(&l.vertex[u], &l.vertex[v]).unwrap());
            }
        }
    }

    #[test]
    fn single_component_uses_the_empty_codeword() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let inst = Instance {
            supergraph: g.clone(),
            graph: g,
            weights: vec![1, 1],
            cliques: vec![vec![0, 1]],
            witness: UnionWitness::single(2, ()),
        };
        let (l, report) = check_scheme_on_instance(&scheme(), &inst).unwrap();
        assert!(report.pass);
        let [rho, _] = unframe_exact::<2>(&l.vertex[0]).unwrap();
        assert!(rho.is_empty());
    }

    #[test]
    fn component_codewords_meet_the_weight_bound() {
        // Components of weights 12 and 4.
        let g = Graph::new(2, vec![]).unwrap();
        let inst = Instance {
            supergraph: g.clone(),
            graph: g,
            weights: vec![12, 4],
            cliques: vec![],
            witness: UnionWitness {
                n: 2,
                parts: vec![(vec![0], ()), (vec![1], ())],
            },
        };
        let (l, report) = check_scheme_on_instance(&scheme(), &inst).unwrap();
        assert!(report.pass);
        let len = |v: usize| unframe_exact::<2>(&l.vertex[v]).unwrap()[0].len() as f64;
        assert!(len(0) <= 16f64.log2() - 12f64.log2() + 3.0);
        assert!(len(1) <= 16f64.log2() - 4f64.log2() + 3.0);
    }

    #[test]
    fn clique_spanning_components_is_rejected() {
        let g = Graph::new(2, vec![]).unwrap();
        let sup = Graph::new(2, vec![(0, 1)]).unwrap();
        let inst = Instance {
            supergraph: sup,
            graph: g,
            weights: vec![1, 1],
            cliques: vec![vec![0, 1]],
            witness: UnionWitness {
                n: 2,
                parts: vec![(vec![0], ()), (vec![1], ())],
            },
        };
        // The partition itself is inconsistent with the supergraph edge.
        assert!(matches!(
            scheme().label(&inst),
            Err(LabelError::Witness(_))
        ));
    }
}
