//! Graphs with a shallow rooted forest-decomposition of small
//! adhesion-width whose torsos belong to the base class.
//!
//! The decomposition is tidied first.  With `R` the roots and `B_R` the
//! union of their bags, every child `y` of a root defines the root clique
//! `K = B_y ∩ B_R`; the vertices below all children with the same `K` form
//! the hanging graph `G_K`, which is labelled recursively with the forest
//! below those children (minus `B_R`).  The root bags are labelled by the
//! base scheme under the weights `δ(v) = k·ω(v) + Σ{ω(G_K) : v ∈ K}`.
//!
//! * `μ(v) = ⟨μ_R(v)⟩` for `v ∈ B_R`, and
//!   `μ(w) = ⟨μ_R(K), μ_K(w), α(w)⟩` for `w ∈ G_K`, where `α(w)` lists
//!   `κ_R(K, v)` for the neighbours `v ∈ K` of `w`;
//! * `μ(K′) = ⟨μ_R(K′)⟩` for `K′ ⊆ B_R`, else `⟨μ_R(L), μ_L(K′ ∖ B_R)⟩`
//!   for the root clique `L` whose hanging graph contains `K′ ∖ B_R`;
//! * `κ(K′,u) = ⟨depth(u), ζ⟩`, where `depth(u)` is the depth of the top
//!   node of `u` and `ζ` is the identifier of `u` in the root labelling
//!   (for `u ∈ B_R`) or, with its depth decreased by one, in the hanging
//!   labelling.

use std::collections::{BTreeMap, HashMap};

use wmls_core::codes::{bin, frame, nice_weights, read_bin, unframe, unframe_exact, BitLabel};
use wmls_core::graph_model::{tidy, torso_supergraph, Decomposition, Graph};
use wmls_core::mls::{
    Budget, Instance, LabelError, MixedLabelling, Scheme, TesterError, UnionClosed, Witness,
};

use crate::config::{loglog, CombinatorConfig};
use crate::witness::{positions, DecompWitness};

/// The short-decomposition combinator.
///
/// `k` bounds the adhesion-width; `h`, if set, bounds the height of the
/// tidied forest (inputs that violate it are rejected).
#[derive(Debug, Clone)]
pub struct Short<S> {
    pub base: S,
    pub k: usize,
    pub h: Option<usize>,
    pub config: CombinatorConfig,
}

/// Per-vertex data of the tidied forest used by the labeller.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestData {
    /// Height of the tidied forest.
    pub height: usize,
    /// Depth of the top node of each vertex.
    pub depth: Vec<usize>,
    /// `|A_z|` for the top node `z` of each vertex (its parent adhesion).
    pub adhesion: Vec<usize>,
}

impl<S> Short<S> {
    pub fn new(base: S, k: usize, h: Option<usize>, config: CombinatorConfig) -> Self {
        Short { base, k, h, config }
    }

    /// Budget for height `h` given the base budget at `n`.
    pub fn budget_with(&self, n: usize, h: usize, base: Budget) -> Budget {
        let c = self.config.short_c * loglog(n);
        let (k, h) = (self.k as f64, h as f64);
        Budget {
            g1: base.g1 + k * (base.g2 + c) + h * (base.g3 + c) + c + 2.0,
            g2: base.g2 + c,
            g3: (h + 1.0) * (base.g3 + c) + 2.0,
        }
    }

    /// The per-vertex bound on the label length beyond the ideal:
    /// `g₁ + |A_z|·(g₂ + c) + h·(g₃ + c) + c` plus the normalisation
    /// allowance, for the base budget at `n`.
    pub fn vertex_bound(&self, n: usize, h: usize, base: Budget, adhesion: usize) -> f64 {
        let c = self.config.short_c * loglog(n);
        base.g1 + adhesion as f64 * (base.g2 + c) + h as f64 * (base.g3 + c) + c + 2.0
    }
}

/// One level of the recursion.
struct Level<'a, W> {
    gstar: &'a Graph,
    graph: &'a Graph,
    weights: &'a [u64],
    forest: &'a Decomposition,
    torsos: &'a [W],
    cliques: &'a [Vec<usize>],
}

impl<S: Scheme> Short<S>
where
    S::Witness: UnionClosed,
{
    /// Labels the instance, enforcing the height bound `h` if given.
    pub fn label_bounded(
        &self,
        inst: &Instance<DecompWitness<S::Witness>>,
        h: Option<usize>,
    ) -> Result<(MixedLabelling, ForestData), LabelError> {
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
        let tidied = tidy(&wit.decomposition);
        let forest = tidied.decomposition;
        let torsos: Vec<S::Witness> = tidied.origin.iter().map(|&x| wit.torsos[x].clone()).collect();
        if let Some(h) = h {
            if forest.height() > h {
                return Err(LabelError::Witness(format!(
                    "tidied height {} exceeds {h}",
                    forest.height()
                )));
            }
        }
        let home = forest.home_nodes(n);
        let data = ForestData {
            height: forest.height(),
            depth: home.iter().map(|z| forest.depth(z.expect("covered"))).collect(),
            adhesion: home.iter().map(|z| forest.adhesion(z.expect("covered")).len()).collect(),
        };
        if n == 0 {
            return Ok((MixedLabelling::default(), data));
        }
        let weights = nice_weights(&inst.weights)?;
        let gstar = torso_supergraph(&inst.supergraph, &forest);
        let level = Level {
            gstar: &gstar,
            graph: &inst.graph,
            weights: &weights,
            forest: &forest,
            torsos: &torsos,
            cliques: &inst.cliques,
        };
        Ok((self.label_level(&level)?, data))
    }

    fn label_level(&self, lv: &Level<'_, S::Witness>) -> Result<MixedLabelling, LabelError> {
        let n = lv.graph.n();
        let f = lv.forest;
        if n == 0 {
            return Ok(MixedLabelling::default());
        }
        let roots = f.roots();
        let mut in_root = vec![false; n];
        for &r in &roots {
            for &v in f.bag(r) {
                in_root[v] = true;
            }
        }
        let br: Vec<usize> = (0..n).filter(|&v| in_root[v]).collect();
        let mut root_index = vec![usize::MAX; n];
        for (i, &v) in br.iter().enumerate() {
            root_index[v] = i;
        }

        // Root cliques and the hanging forests below them.
        let mut group_of_clique: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let mut groups: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        for &r in &roots {
            for &y in f.children(r) {
                let k: Vec<usize> = f.bag(y).iter().copied().filter(|&v| in_root[v]).collect();
                let g = *group_of_clique.entry(k.clone()).or_insert_with(|| {
                    groups.push((k, Vec::new()));
                    groups.len() - 1
                });
                let mut stack = vec![y];
                while let Some(z) = stack.pop() {
                    groups[g].1.push(z);
                    stack.extend_from_slice(f.children(z));
                }
            }
        }
        let mut group_of = vec![usize::MAX; n];
        let mut group_vertices: Vec<Vec<usize>> = vec![Vec::new(); groups.len()];
        for (g, (_, nodes)) in groups.iter_mut().enumerate() {
            nodes.sort_unstable();
            for &z in nodes.iter() {
                for &v in f.bag(z) {
                    if in_root[v] {
                        continue;
                    }
                    if group_of[v] != usize::MAX && group_of[v] != g {
                        return Err(LabelError::Bound(format!(
                            "vertex {v} hangs below two root cliques"
                        )));
                    }
                    if group_of[v] == usize::MAX {
                        group_of[v] = g;
                        group_vertices[g].push(v);
                    }
                }
            }
            group_vertices[g].sort_unstable();
        }
        // Root weights δ.
        let group_weight: Vec<u128> = group_vertices
            .iter()
            .map(|vs| vs.iter().map(|&v| lv.weights[v] as u128).sum())
            .collect();
        let k = self.k.max(1) as u128;
        let mut delta: Vec<u128> = br.iter().map(|&v| k * lv.weights[v] as u128).collect();
        for (g, (clique, _)) in groups.iter().enumerate() {
            for &v in clique {
                delta[root_index[v]] += group_weight[g];
            }
        }
        let total: u128 = lv.weights.iter().map(|&w| w as u128).sum();
        if delta.iter().sum::<u128>() > k * total {
            return Err(LabelError::Bound("root weights exceed k·ω(G)".into()));
        }
        let delta = delta
            .into_iter()
            .map(|x| u64::try_from(x).map_err(|_| LabelError::Bound("root weight overflows".into())))
            .collect::<Result<Vec<u64>, _>>()?;

        // Root instance cliques: the root cliques first, then requested
        // cliques inside B_R.  Requested cliques reaching below go to the
        // hanging instance of their group.
        let mut root_cliques: Vec<Vec<usize>> = groups
            .iter()
            .map(|(c, _)| c.iter().map(|&v| root_index[v]).collect())
            .collect();
        enum Route {
            Root(usize),
            Below(usize),
        }
        let mut routes = Vec::with_capacity(lv.cliques.len());
        for (c, clique) in lv.cliques.iter().enumerate() {
            let below: Vec<usize> = clique.iter().copied().filter(|&v| !in_root[v]).collect();
            if below.is_empty() {
                routes.push(Route::Root(root_cliques.len()));
                root_cliques.push(clique.iter().map(|&v| root_index[v]).collect());
                continue;
            }
            let g = group_of[below[0]];
            let fits = below.iter().all(|&v| group_of[v] == g)
                && clique
                    .iter()
                    .filter(|&&v| in_root[v])
                    .all(|v| groups[g].0.binary_search(v).is_ok());
            if !fits {
                return Err(LabelError::InvalidInstance(format!(
                    "clique {c} lies in no bag of the decomposition"
                )));
            }
            routes.push(Route::Below(g));
        }

        let root_parts = roots
            .iter()
            .map(|&r| (positions(&br, f.bag(r)), lv.torsos[r].clone()))
            .collect();
        let root_inst = Instance {
            supergraph: lv.gstar.induced(&br),
            graph: lv.graph.induced(&br),
            weights: delta,
            cliques: root_cliques,
            witness: S::Witness::disjoint_union(br.len(), root_parts),
        };
        let root = self
            .base
            .label(&root_inst)
            .map_err(|e| e.context("root bags"))?;

        // Clique labels need not be injective, so root cliques with equal
        // labels share one hanging labelling (of the disjoint union of their
        // hanging graphs): equal labels then always mean the same labelling.
        let mut merged_of: HashMap<&BitLabel, usize> = HashMap::new();
        let mut merged = Vec::with_capacity(groups.len());
        let mut merged_nodes: Vec<Vec<usize>> = Vec::new();
        let mut merged_vertices: Vec<Vec<usize>> = Vec::new();
        for (g, (_, nodes)) in groups.iter().enumerate() {
            let next = merged_nodes.len();
            let m = *merged_of.entry(&root.clique[g]).or_insert(next);
            if m == next {
                merged_nodes.push(Vec::new());
                merged_vertices.push(Vec::new());
            }
            merged_nodes[m].extend_from_slice(nodes);
            merged_vertices[m].extend_from_slice(&group_vertices[g]);
            merged.push(m);
        }
        let mut sub_index = vec![usize::MAX; n];
        for (nodes, vs) in merged_nodes.iter_mut().zip(&mut merged_vertices) {
            nodes.sort_unstable();
            vs.sort_unstable();
            for (i, &v) in vs.iter().enumerate() {
                sub_index[v] = i;
            }
        }
        let mut sub_cliques: Vec<Vec<Vec<usize>>> = vec![Vec::new(); merged_nodes.len()];
        let mut below_at = vec![usize::MAX; routes.len()];
        for (c, (members, route)) in lv.cliques.iter().zip(&routes).enumerate() {
            if let Route::Below(g) = *route {
                let m = merged[g];
                below_at[c] = sub_cliques[m].len();
                sub_cliques[m].push(
                    members
                        .iter()
                        .filter(|&&v| !in_root[v])
                        .map(|&v| sub_index[v])
                        .collect(),
                );
            }
        }

        let mut hanging = Vec::with_capacity(merged_nodes.len());
        for ((nodes, vs), cliques) in merged_nodes.iter().zip(&merged_vertices).zip(&sub_cliques) {
            let sub_forest = f.subforest(nodes).restrict_vertices(n, vs);
            let tidied = tidy(&sub_forest);
            let torsos: Vec<S::Witness> = tidied
                .origin
                .iter()
                .map(|&i| {
                    let z = nodes[i];
                    let bag = f.bag(z);
                    let own: Vec<usize> = bag.iter().copied().filter(|&v| !in_root[v]).collect();
                    lv.torsos[z].restrict(&positions(bag, &own))
                })
                .collect();
            let gstar = lv.gstar.induced(vs);
            let graph = lv.graph.induced(vs);
            let weights: Vec<u64> = vs.iter().map(|&v| lv.weights[v]).collect();
            let sub = Level {
                gstar: &gstar,
                graph: &graph,
                weights: &weights,
                forest: &tidied.decomposition,
                torsos: &torsos,
                cliques,
            };
            hanging.push(self.label_level(&sub)?);
        }

        // Identifier of root vertex v in root clique g.
        let root_id = |g: usize, v: usize| -> &BitLabel {
            let j = groups[g].0.binary_search(&v).expect("member of the root clique");
            &root.local[g][j]
        };
        let mut vertex = Vec::with_capacity(n);
        for v in 0..n {
            if in_root[v] {
                vertex.push(frame(&[root.vertex[root_index[v]].bits()]));
                continue;
            }
            let g = group_of[v];
            let mut alpha: Vec<&BitLabel> = Vec::new();
            for &u in lv.graph.neighbors(v) {
                if in_root[u] {
                    if groups[g].0.binary_search(&u).is_err() {
                        return Err(LabelError::Bound(format!(
                            "neighbour {u} of {v} is outside its root clique"
                        )));
                    }
                    alpha.push(root_id(g, u));
                }
            }
            vertex.push(frame(&[
                root.clique[g].bits(),
                hanging[merged[g]].vertex[sub_index[v]].bits(),
                frame(&alpha).bits(),
            ]));
        }

        let zero = bin(0);
        let mut clique = Vec::with_capacity(routes.len());
        let mut local = Vec::with_capacity(routes.len());
        for (c, (members, route)) in lv.cliques.iter().zip(&routes).enumerate() {
            match *route {
                Route::Root(c) => {
                    clique.push(frame(&[root.clique[c].bits()]));
                    local.push(root.local[c].iter().map(|z| frame(&[zero.bits(), z.bits()])).collect());
                }
                Route::Below(g) => {
                    let (m, c) = (merged[g], below_at[c]);
                    clique.push(frame(&[root.clique[g].bits(), hanging[m].clique[c].bits()]));
                    let mut next_below = 0;
                    let mut ids = Vec::with_capacity(members.len());
                    for &u in members {
                        if in_root[u] {
                            ids.push(frame(&[zero.bits(), root_id(g, u).bits()]));
                        } else {
                            let kappa = &hanging[m].local[c][next_below];
                            next_below += 1;
                            let [depth, zeta] = unframe_exact::<2>(kappa)?;
                            ids.push(frame(&[bin(read_bin(depth)? + 1).bits(), zeta]));
                        }
                    }
                    local.push(ids);
                }
            }
        }
        Ok(MixedLabelling {
            vertex,
            clique,
            local,
        })
    }
}

impl<S: Scheme> Scheme for Short<S>
where
    S::Witness: UnionClosed,
{
    type Witness = DecompWitness<S::Witness>;

    fn name(&self) -> String {
        format!("short({})", self.base.name())
    }

    fn label(&self, inst: &Instance<Self::Witness>) -> Result<MixedLabelling, LabelError> {
        Ok(self.label_bounded(inst, self.h)?.0)
    }

    fn adjacent(&self, x: &[bool], y: &[bool]) -> Result<bool, TesterError> {
        let px = unframe(x)?;
        let py = unframe(y)?;
        match (px.as_slice(), py.as_slice()) {
            ([vx], [vy]) => self.base.adjacent(vx, vy),
            ([v], [k, _, alpha]) | ([k, _, alpha], [v]) => {
                for kappa in unframe(alpha)? {
                    if self.base.identity(k, kappa, v)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            ([kx, mx, _], [ky, my, _]) => {
                if kx != ky {
                    Ok(false)
                } else {
                    self.adjacent(mx, my)
                }
            }
            _ => Err(TesterError::Malformed("vertex label with an unexpected part count")),
        }
    }

    fn identity(&self, clique: &[bool], kappa: &[bool], v: &[bool]) -> Result<bool, TesterError> {
        let [depth, zeta] = unframe_exact::<2>(kappa)?;
        let depth = read_bin(depth)?;
        let pk = unframe(clique)?;
        let pv = unframe(v)?;
        match (pv.as_slice(), pk.as_slice()) {
            ([_], _) if depth > 0 => Ok(false),
            ([mv], [mk] | [mk, _]) => self.base.identity(mk, zeta, mv),
            ([_, _, _], _) if depth == 0 => Ok(false),
            ([lv, mv, _], [lk, mk]) => {
                if lv != lk {
                    return Ok(false);
                }
                let inner = frame(&[bin(depth - 1).bits(), zeta]);
                self.identity(mk, &inner, mv)
            }
            _ => Err(TesterError::Malformed("labels with unexpected part counts")),
        }
    }

    fn budget(&self, n: usize) -> Budget {
        let h = self.h.unwrap_or(n.saturating_sub(1));
        self.budget_with(n, h, self.base.budget(n))
    }
}
