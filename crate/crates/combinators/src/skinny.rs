//! Graphs with a skinny rooted decomposition of small adhesion-width.
//!
//! The bags at depth `i` form the layer `B_i`; consecutive layers share the
//! adhesion `A_i = B_i ∩ B_{i−1}`, and `G_i = G[B_i] − A_i` holds the
//! vertices whose topmost bag lies at depth `i`.  Each layer is labelled
//! by the base scheme on the union of its torsos minus `A_i`.  Layers
//! without own vertices are skipped.
//!
//! Layers are named by a weight-balanced alphabetic code `ρ` over
//! `ψ(i) = ω(G_i)`.  A vertex `v` living in layers `a(v) < b(v)` belongs
//! to the class of the lowest common ancestor of `ρ(a(v))` and `ρ(b(v))`
//! in the code tree; `β(v) = (d, φ)` records the depth `d` of that ancestor
//! and an index `φ` that is injective within the class.
//!
//! * `μ(v) = ⟨ρ(a(v)), μ_{a(v)}(v), α(v), β(v)⟩`, where `α(v)` lists `β`
//!   of the neighbours of `v` in `A_{a(v)}`;
//! * `μ(K) = ⟨ρ(j), μ_j(K ∖ A_j)⟩` with `j` the deepest layer meeting `K`;
//! * `κ(K,u) = 0·κ_j(K ∖ A_j, u)` if `u` lives in layer `j`, else `1·β(u)`.
//!
//! Two vertices with different codewords are adjacent exactly when the one
//! with the smaller codeword appears in the other's `α`; the prefix of
//! length `d` of both codewords identifies the class of the entry.

use std::collections::HashMap;

use wmls_core::codes::{frame, nice_weights, push_gamma, read_gamma, unframe_exact, AlphabeticCode, BitLabel};
use wmls_core::graph_model::torso_supergraph;
use wmls_core::mls::{
    Budget, Instance, LabelError, MixedLabelling, Scheme, TesterError, UnionClosed, Witness,
};

use crate::config::{loglog, CombinatorConfig};
use crate::union::part_weights;
use crate::witness::{positions, DecompWitness};

/// The skinny-decomposition combinator.
///
/// `k` bounds the adhesion-width; `b`, if set, bounds the number of nodes
/// per depth level (inputs that violate it are rejected).
#[derive(Debug, Clone)]
pub struct Skinny<S> {
    pub base: S,
    pub k: usize,
    pub b: Option<usize>,
    pub config: CombinatorConfig,
}

/// Per-vertex layer data computed by the labeller.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerData {
    /// Depths of the layers that own vertices, increasing.
    pub layers: Vec<usize>,
    /// Index (into `layers`) of the layer owning each vertex.
    pub home: Vec<usize>,
    /// Index of the deepest owning layer whose bags contain the vertex.
    pub last: Vec<usize>,
    /// `(d, φ)` for vertices with `home < last`.
    pub beta: Vec<Option<(usize, usize)>>,
}

impl<S> Skinny<S> {
    pub fn new(base: S, k: usize, b: Option<usize>, config: CombinatorConfig) -> Self {
        Skinny { base, k, b, config }
    }

    /// Budget for skinniness `b` given the base budget at `n`.
    pub fn budget_with(&self, n: usize, b: usize, base: Budget) -> Budget {
        let c = self.config.skinny_c * loglog(n);
        let k = self.k.max(1) as f64;
        // One identifier: the class depth and the index inside the class.
        let beta = 2.0 * ((b.max(2) as f64) * k).log2() + c;
        Budget {
            g1: base.g1 + 3.0 + (k + 1.0) * beta + c,
            g2: (base.g2 + 1.0).max(1.0 + beta),
            g3: base.g3 + 3.0 + c,
        }
    }
}

fn push_beta(out: &mut Vec<bool>, (d, phi): (usize, usize)) {
    push_gamma(out, d as u64);
    push_gamma(out, phi as u64);
}

/// Reads `(d, φ)` pairs until the end of `bits`.
fn read_betas(bits: &[bool]) -> Result<Vec<(u64, u64)>, TesterError> {
    let mut pos = 0;
    let mut out = Vec::new();
    while pos < bits.len() {
        let d = read_gamma(bits, &mut pos)?;
        let phi = read_gamma(bits, &mut pos)?;
        out.push((d, phi));
    }
    Ok(out)
}

fn read_beta(bits: &[bool]) -> Result<(u64, u64), TesterError> {
    match read_betas(bits)?.as_slice() {
        [one] => Ok(*one),
        _ => Err(TesterError::Malformed("expected a single class identifier")),
    }
}

fn common_prefix(x: &[bool], y: &[bool]) -> usize {
    x.iter().zip(y).take_while(|(a, b)| a == b).count()
}

fn same_prefix(x: &[bool], y: &[bool], d: u64) -> bool {
    let d = d as usize;
    d <= x.len() && d <= y.len() && x[..d] == y[..d]
}

impl<S: Scheme> Skinny<S>
where
    S::Witness: UnionClosed,
{
    /// Labels the instance; also returns the layer data.
    pub fn label_detailed(
        &self,
        inst: &Instance<DecompWitness<S::Witness>>,
    ) -> Result<(MixedLabelling, LayerData), LabelError> {
        let n = inst.n();
        let wit = &inst.witness;
        wit.validate(&inst.supergraph)?;
        let d = &wit.decomposition;
        if d.adhesion_width() > self.k {
            return Err(LabelError::Witness(format!(
                "adhesion-width {} exceeds {}",
                d.adhesion_width(),
                self.k
            )));
        }
        let mut per_level = vec![0usize; d.height() + 1];
        for x in 0..d.node_count() {
            per_level[d.depth(x)] += 1;
        }
        if let Some(b) = self.b {
            if let Some(level) = per_level.iter().position(|&c| c > b) {
                return Err(LabelError::Witness(format!(
                    "level {level} has {} nodes, more than {b}",
                    per_level[level]
                )));
            }
        }
        if n == 0 {
            let data = LayerData {
                layers: vec![],
                home: vec![],
                last: vec![],
                beta: vec![],
            };
            return Ok((MixedLabelling::default(), data));
        }
        let weights = nice_weights(&inst.weights)?;

        // Topmost and deepest depth of every vertex.
        let mut top = vec![usize::MAX; n];
        let mut bottom = vec![0usize; n];
        for x in 0..d.node_count() {
            for &v in d.bag(x) {
                top[v] = top[v].min(d.depth(x));
                bottom[v] = bottom[v].max(d.depth(x));
            }
        }
        let mut owns = vec![false; d.height() + 1];
        for &t in &top {
            owns[t] = true;
        }
        let layers: Vec<usize> = (0..owns.len()).filter(|&i| owns[i]).collect();
        let mut layer_of_depth = vec![usize::MAX; owns.len()];
        for (l, &i) in layers.iter().enumerate() {
            layer_of_depth[i] = l;
        }
        let home: Vec<usize> = top.iter().map(|&t| layer_of_depth[t]).collect();
        let last: Vec<usize> = bottom
            .iter()
            .map(|&b| layers.partition_point(|&i| i <= b) - 1)
            .collect();
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); layers.len()];
        for v in 0..n {
            members[home[v]].push(v);
        }
        let psi = part_weights(&weights, members.iter().map(|m| m.iter().copied()))?;
        let code = AlphabeticCode::new(&psi)?;

        // Class identifiers, assigned in increasing vertex order.
        let mut classes: HashMap<(usize, &[bool]), usize> = HashMap::new();
        let mut beta = vec![None; n];
        for v in 0..n {
            if home[v] < last[v] {
                let (x, y) = (code.word(home[v]).bits(), code.word(last[v]).bits());
                let depth = common_prefix(x, y);
                let count = classes.entry((depth, &x[..depth])).or_insert(0);
                beta[v] = Some((depth, *count));
                *count += 1;
            }
        }
        if let Some(b) = self.b {
            if let Some(size) = classes.values().copied().find(|&c| c > b * self.k) {
                return Err(LabelError::Bound(format!(
                    "a class holds {size} vertices, more than b·k = {}",
                    b * self.k
                )));
            }
        }
        let beta_bits = |v: usize| {
            let mut bits = Vec::new();
            if let Some(id) = beta[v] {
                push_beta(&mut bits, id);
            }
            bits
        };

        // α: identifiers of the neighbours in the parent adhesion.
        let mut alpha = Vec::with_capacity(n);
        for w in 0..n {
            let lower: Vec<usize> = inst
                .graph
                .neighbors(w)
                .iter()
                .copied()
                .filter(|&v| top[v] < top[w])
                .collect();
            if lower.len() > self.k {
                return Err(LabelError::Bound(format!(
                    "vertex {w} has {} neighbours in its parent adhesion, more than {}",
                    lower.len(),
                    self.k
                )));
            }
            let mut bits = Vec::new();
            let mut sorted = lower;
            sorted.sort_unstable();
            for v in sorted {
                let id = beta[v].ok_or_else(|| {
                    LabelError::Bound(format!("neighbour {v} of {w} spans no layers"))
                })?;
                push_beta(&mut bits, id);
            }
            alpha.push(bits);
        }

        // Requested cliques go to their deepest layer.
        let mut sub_cliques: Vec<Vec<Vec<usize>>> = vec![Vec::new(); layers.len()];
        let mut route = Vec::with_capacity(inst.cliques.len());
        let mut local_of = vec![0usize; n];
        for m in &members {
            for (i, &v) in m.iter().enumerate() {
                local_of[v] = i;
            }
        }
        for k in &inst.cliques {
            let j = k.iter().map(|&v| home[v]).max().expect("non-empty clique");
            let own: Vec<usize> = k.iter().filter(|&&v| home[v] == j).map(|&v| local_of[v]).collect();
            route.push((j, sub_cliques[j].len()));
            sub_cliques[j].push(own);
        }

        let gstar = torso_supergraph(&inst.supergraph, d);
        let mut sub_labels = Vec::with_capacity(layers.len());
        for (l, (&depth, cliques)) in layers.iter().zip(sub_cliques).enumerate() {
            let verts = &members[l];
            let parts = (0..d.node_count())
                .filter(|&x| d.depth(x) == depth)
                .filter_map(|x| {
                    let bag = d.bag(x);
                    let own: Vec<usize> = bag.iter().copied().filter(|&v| top[v] == depth).collect();
                    if own.is_empty() {
                        return None;
                    }
                    let local = own.iter().map(|&v| local_of[v]).collect();
                    Some((local, wit.torsos[x].restrict(&positions(bag, &own))))
                })
                .collect();
            let sub = Instance {
                supergraph: gstar.induced(verts),
                graph: inst.graph.induced(verts),
                weights: verts.iter().map(|&v| weights[v]).collect(),
                cliques,
                witness: S::Witness::disjoint_union(verts.len(), parts),
            };
            let labels = self
                .base
                .label(&sub)
                .map_err(|e| e.context(format!("layer at depth {depth}")))?;
            sub_labels.push(labels);
        }

        let vertex = (0..n)
            .map(|v| {
                let l = home[v];
                frame(&[
                    code.word(l).bits(),
                    sub_labels[l].vertex[local_of[v]].bits(),
                    &alpha[v],
                    &beta_bits(v),
                ])
            })
            .collect();
        let mut clique = Vec::with_capacity(route.len());
        let mut local = Vec::with_capacity(route.len());
        for (k, &(j, c)) in inst.cliques.iter().zip(&route) {
            clique.push(frame(&[code.word(j).bits(), sub_labels[j].clique[c].bits()]));
            let mut next_own = 0;
            let ids = k
                .iter()
                .map(|&u| {
                    let mut bits = Vec::new();
                    if home[u] == j {
                        bits.push(false);
                        bits.extend_from_slice(&sub_labels[j].local[c][next_own]);
                        next_own += 1;
                    } else {
                        bits.push(true);
                        bits.extend(beta_bits(u));
                    }
                    BitLabel::from_bits(bits)
                })
                .collect();
            local.push(ids);
        }
        let data = LayerData {
            layers,
            home,
            last,
            beta,
        };
        Ok((
            MixedLabelling {
                vertex,
                clique,
                local,
            },
            data,
        ))
    }
}

impl<S: Scheme> Scheme for Skinny<S>
where
    S::Witness: UnionClosed,
{
    type Witness = DecompWitness<S::Witness>;

    fn name(&self) -> String {
        format!("skinny({})", self.base.name())
    }

    fn label(&self, inst: &Instance<Self::Witness>) -> Result<MixedLabelling, LabelError> {
        Ok(self.label_detailed(inst)?.0)
    }

    fn adjacent(&self, x: &[bool], y: &[bool]) -> Result<bool, TesterError> {
        let px = unframe_exact::<4>(x)?;
        let py = unframe_exact::<4>(y)?;
        if px[0] == py[0] {
            return self.base.adjacent(px[1], py[1]);
        }
        // `lo` lives in the earlier layer.
        let (lo, hi) = if px[0] < py[0] { (px, py) } else { (py, px) };
        if lo[3].is_empty() {
            return Ok(false);
        }
        let (d, phi) = read_beta(lo[3])?;
        if !same_prefix(lo[0], hi[0], d) {
            return Ok(false);
        }
        Ok(read_betas(hi[2])?.contains(&(d, phi)))
    }

    fn identity(&self, clique: &[bool], kappa: &[bool], v: &[bool]) -> Result<bool, TesterError> {
        let [rj, mk] = unframe_exact::<2>(clique)?;
        let [rv, mv, _, bv] = unframe_exact::<4>(v)?;
        let (&flag, rest) = kappa
            .split_first()
            .ok_or(TesterError::Malformed("empty local identifier"))?;
        if !flag {
            return if rj == rv {
                self.base.identity(mk, rest, mv)
            } else {
                Ok(false)
            };
        }
        let (d, _) = read_beta(rest)?;
        Ok(rv < rj && bv == rest && same_prefix(rv, rj, d))
    }

    fn budget(&self, n: usize) -> Budget {
        self.budget_with(n, self.b.unwrap_or(n.max(2)), self.base.budget(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use wmls_core::graph_model::{Decomposition, Graph};
    use wmls_core::mls::{check_scheme_on_instance, ExplicitScheme};

    fn scheme(k: usize, b: Option<usize>) -> Skinny<ExplicitScheme> {
        Skinny::new(ExplicitScheme, k, b, CombinatorConfig::default())
    }

    fn instance(g: Graph, d: Decomposition, cliques: Vec<Vec<usize>>) -> Instance<DecompWitness<()>> {
        let nodes = d.node_count();
        Instance {
            supergraph: g.clone(),
            weights: vec![1; g.n()],
            graph: g.clone(),
            cliques,
            witness: DecompWitness {
                n: g.n(),
                decomposition: d,
                torsos: vec![(); nodes],
            },
        }
    }

    #[test]
    fn single_layer_has_no_class_identifiers() {
        let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let d = Decomposition::single(vec![0, 1, 2]);
        let inst = instance(g, d, vec![vec![0, 1]]);
        let s = scheme(1, Some(1));
        let (l, data) = s.label_detailed(&inst).unwrap();
        assert!(data.beta.iter().all(Option::is_none));
        assert_eq!(data.layers, vec![0]);
        let report = wmls_core::mls::verify_labelling(&s, &inst, &l);
        assert!(report.pass);
    }

    #[test]
    fn two_layers_with_one_shared_vertex() {
        // Bags {0,1} above {1,2}: vertex 1 spans both layers; edge 1-2 is
        // found through α(2).
        let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let d = Decomposition::new(vec![None, Some(0)], vec![vec![0, 1], vec![1, 2]]).unwrap();
        let inst = instance(g, d, vec![vec![1, 2]]);
        let s = scheme(1, Some(1));
        let (l, data) = s.label_detailed(&inst).unwrap();
        // Two layers: the lowest common ancestor of their codewords is the
        // root of the code tree.
        assert_eq!(data.beta, vec![None, Some((0, 0)), None]);
        let [r1, _, _, _] = unframe_exact::<4>(&l.vertex[1]).unwrap();
        let [r2, _, a2, _] = unframe_exact::<4>(&l.vertex[2]).unwrap();
        assert!(r1 < r2);
        assert_eq!(read_betas(a2).unwrap(), vec![(0, 0)]);
        assert!(s.adjacent(&l.vertex[1], &l.vertex[2]).unwrap());
        assert!(s.adjacent(&l.vertex[2], &l.vertex[1]).unwrap());
        assert!(!s.adjacent(&l.vertex[0], &l.vertex[2]).unwrap());
        // Clique {1,2} lives in the second layer; 1 is identified by β.
        assert!(l.local[0][0][0]);
        assert!(!l.local[0][1][0]);
        let report = wmls_core::mls::verify_labelling(&s, &inst, &l);
        assert!(report.pass, "{:?}", report.first_failure);
    }

    #[test]
    fn too_wide_levels_are_rejected() {
        let g = Graph::new(3, vec![]).unwrap();
        let d = Decomposition::new(
            vec![None, Some(0), Some(0)],
            vec![vec![0], vec![1], vec![2]],
        )
        .unwrap();
        assert!(scheme(1, Some(1)).label(&instance(g.clone(), d.clone(), vec![])).is_err());
        assert!(scheme(1, Some(2)).label(&instance(g, d, vec![])).is_ok());
    }

    #[test]
    fn adhesion_width_is_enforced() {
        let g = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let d = Decomposition::new(vec![None, Some(0)], vec![vec![0, 1, 2], vec![1, 2]]).unwrap();
        assert!(scheme(1, None).label(&instance(g.clone(), d.clone(), vec![])).is_err());
        let (_, report) = check_scheme_on_instance(&scheme(2, None), &instance(g, d, vec![vec![1, 2]])).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn path_decomposition_of_a_path() {
        // A path 0-1-…-9 decomposed as a path of bags {i, i+1}, so every
        // inner vertex spans two layers.
        let n = 10;
        let g = Graph::new(n, (0..n - 1).map(|i| (i, i + 1)).collect()).unwrap();
        let parent = (0..n - 1).map(|i| i.checked_sub(1)).collect();
        let bags = (0..n - 1).map(|i| vec![i, i + 1]).collect();
        let d = Decomposition::new(parent, bags).unwrap();
        let cliques = (0..n - 1).map(|i| vec![i, i + 1]).chain((0..n).map(|i| vec![i])).collect();
        let (_, report) = check_scheme_on_instance(&scheme(1, Some(1)), &instance(g, d, cliques)).unwrap();
        assert!(report.pass, "{:?}", report.first_failure);
    }
}
