//! The full composition: graphs with a tree-decomposition of bounded
//! adhesion-width whose torsos belong to the base class.
//!
//! For `n` vertices the decomposition is refined with skinniness
//! `b(n) = 2^⌈√(g₃ · log n)⌉` into a decomposition of height at most
//! `h(n) = ⌈log_{b(n)} n⌉` whose torsos carry `b(n)`-skinny
//! decompositions.  The result is labelled by
//! `short(union(skinny(base)))`.

use num_rational::Ratio;
use wmls_core::decomp::{check_skinny, skinny_refine};
use wmls_core::mls::{Budget, Instance, LabelError, MixedLabelling, Scheme, TesterError, UnionClosed};

use crate::config::{loglog, CombinatorConfig};
use crate::short::{ForestData, Short};
use crate::skinny::Skinny;
use crate::union::Union;
use crate::witness::{DecompWitness, UnionWitness};

/// The composed scheme over a base scheme.
#[derive(Debug, Clone)]
pub struct Composed<S> {
    pub short: Short<Union<Skinny<S>>>,
    pub k: usize,
    pub config: CombinatorConfig,
}

/// Parameters and forest data of one labelling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComposeData {
    pub b: usize,
    pub h: usize,
    pub forest: ForestData,
}

impl<S> Composed<S> {
    /// `k` bounds the adhesion-width of input decompositions.
    pub fn new(base: S, k: usize, config: CombinatorConfig) -> Self {
        let skinny = Skinny::new(base, k, None, config);
        Composed {
            short: Short::new(Union::new(skinny, config), k, None, config),
            k,
            config,
        }
    }

    pub fn base(&self) -> &S {
        &self.short.base.base.base
    }

    /// `(b(n), h(n))`: `b = 2^⌈√(g₃ · log₂ n)⌉ ≥ 2` and `h` the least
    /// integer with `b^h ≥ n`, at least 1.
    pub fn parameters(&self, n: usize) -> (usize, usize) {
        let lg = (n.max(2) as f64).log2();
        let exponent = (self.config.compose_g3 * lg).sqrt().ceil().clamp(1.0, 62.0) as u32;
        let b = 1usize << exponent;
        let mut h = 1;
        let mut reach = b as u128;
        while reach < n as u128 {
            reach *= b as u128;
            h += 1;
        }
        (b, h)
    }
}

impl<S: Scheme> Composed<S>
where
    S::Witness: UnionClosed,
{
    fn union_budget(&self, n: usize, b: usize) -> Budget {
        let skinny = &self.short.base.base;
        let base = skinny.base.budget(n);
        self.short.base.budget_over(n, skinny.budget_with(n, b, base))
    }

    /// Per-vertex bounds `g₁ + |A_z|·(g₂ + c) + h·(g₃ + c) + c` on the label
    /// length beyond the ideal, with the budgets of the short scheme's base.
    pub fn vertex_bounds(&self, n: usize, data: &ComposeData) -> Vec<f64> {
        let base = self.union_budget(n, data.b);
        data.forest
            .adhesion
            .iter()
            .map(|&a| self.short.vertex_bound(n, data.h, base, a))
            .collect()
    }

    /// Labels the instance and returns the parameters used.
    pub fn label_detailed(
        &self,
        inst: &Instance<DecompWitness<S::Witness>>,
    ) -> Result<(MixedLabelling, ComposeData), LabelError> {
        let n = inst.n();
        let wit = &inst.witness;
        wit.validate(&inst.supergraph)?;
        if wit.decomposition.adhesion_width() > self.k {
            return Err(LabelError::Witness(format!(
                "adhesion-width {} exceeds {}",
                wit.decomposition.adhesion_width(),
                self.k
            )));
        }
        let (b, h) = self.parameters(n);
        let ratio = Ratio::from_integer(b as u64);
        let refinement = skinny_refine(&inst.supergraph, &wit.decomposition, ratio)
            .map_err(|e| LabelError::Witness(e.to_string()))?;
        let outer = refinement.outer;
        let mut torsos = Vec::with_capacity(outer.node_count());
        for (q, inner) in refinement.inner.iter().enumerate() {
            let bag = outer.bag(q);
            if !check_skinny(&inner.decomposition, ratio) {
                return Err(LabelError::Bound(format!("inner decomposition {q} is not skinny")));
            }
            let skinny = DecompWitness {
                n: bag.len(),
                decomposition: inner.decomposition.restrict_vertices(n, bag),
                torsos: inner.nodes.iter().map(|&x| wit.torsos[x].clone()).collect(),
            };
            torsos.push(UnionWitness::single(bag.len(), skinny));
        }
        let short_inst = Instance {
            supergraph: inst.supergraph.clone(),
            graph: inst.graph.clone(),
            weights: inst.weights.clone(),
            cliques: inst.cliques.clone(),
            witness: DecompWitness {
                n,
                decomposition: outer,
                torsos,
            },
        };
        let (labels, forest) = self.short.label_bounded(&short_inst, Some(h))?;
        Ok((labels, ComposeData { b, h, forest }))
    }
}

impl<S: Scheme> Scheme for Composed<S>
where
    S::Witness: UnionClosed,
{
    type Witness = DecompWitness<S::Witness>;

    fn name(&self) -> String {
        format!("compose({})", self.base().name())
    }

    fn label(&self, inst: &Instance<Self::Witness>) -> Result<MixedLabelling, LabelError> {
        Ok(self.label_detailed(inst)?.0)
    }

    fn adjacent(&self, x: &[bool], y: &[bool]) -> Result<bool, TesterError> {
        self.short.adjacent(x, y)
    }

    fn identity(&self, clique: &[bool], kappa: &[bool], v: &[bool]) -> Result<bool, TesterError> {
        self.short.identity(clique, kappa, v)
    }

    fn budget(&self, n: usize) -> Budget {
        let (b, h) = self.parameters(n);
        let mut out = self.short.budget_with(n, h, self.union_budget(n, b));
        let extra = self.config.compose_c * loglog(n);
        out.g1 += extra;
        out.g3 += extra;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use wmls_core::graph_model::{Decomposition, Graph};
    use wmls_core::mls::{check_scheme_on_instance, ExplicitScheme};

    fn scheme(k: usize) -> Composed<ExplicitScheme> {
        Composed::new(ExplicitScheme, k, CombinatorConfig::default())
    }

    #[test]
    fn parameters_follow_the_formulas() {
        let s = scheme(1);
        // √(4·8) = 5.66 → b = 2⁶, and 64² ≥ 256.
        assert_eq!(s.parameters(256), (64, 2));
        assert_eq!(s.parameters(1), (4, 1));
        assert_eq!(s.parameters(2), (4, 1));
        // √(4·10) = 6.32 → b = 2⁷ = 128, 128² ≥ 1024.
        assert_eq!(s.parameters(1024), (128, 2));
    }

    #[test]
    fn single_bag_degenerates_to_the_torso() {
        let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let inst = Instance {
            supergraph: g.clone(),
            graph: g,
            weights: vec![1; 3],
            cliques: vec![vec![0, 1], vec![2]],
            witness: DecompWitness {
                n: 3,
                decomposition: Decomposition::single(vec![0, 1, 2]),
                torsos: vec![()],
            },
        };
        let (_, report) = check_scheme_on_instance(&scheme(1), &inst).unwrap();
        assert!(report.pass, "{:?}", report.first_failure);
    }

    #[test]
    fn long_path_of_bags() {
        let n = 300;
        let g = Graph::new(n, (0..n - 1).map(|i| (i, i + 1)).collect()).unwrap();
        let parent = (0..n - 1).map(|i| i.checked_sub(1)).collect();
        let bags = (0..n - 1).map(|i| vec![i, i + 1]).collect();
        let inst = Instance {
            supergraph: g.clone(),
            graph: g,
            weights: vec![1; n],
            cliques: (0..n - 1).step_by(7).map(|i| vec![i, i + 1]).collect(),
            witness: DecompWitness {
                n,
                decomposition: Decomposition::new(parent, bags).unwrap(),
                torsos: vec![(); n - 1],
            },
        };
        let s = scheme(1);
        let (l, data) = s.label_detailed(&inst).unwrap();
        assert!(data.forest.height <= data.h);
        let report = wmls_core::mls::verify_labelling(&s, &inst, &l);
        assert!(report.pass, "{:?}", report.first_failure);
    }
}
