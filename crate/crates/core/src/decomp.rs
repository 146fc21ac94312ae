//! Heavy-subtree separators and the refinement of a tree-decomposition into
//! a short decomposition whose torsos carry skinny decompositions.
//!
//! A rooted forest is *b-skinny* when every depth level has at most `b`
//! nodes.  [`skinny_refine`] groups the nodes of a decomposition into
//! super-bags: each super-bag is the union of the bags of a heavy, hence
//! skinny, connected set of nodes, and every subtree hanging off it weighs at
//! most a `1/b` fraction of the vertices, so the tree of super-bags has
//! height at most `log_b n`.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph_model::{
    index_map, intersect_sorted, is_subset_sorted, torso, validate_decomposition, Decomposition,
    DecompositionJson, Graph,
};

/// Errors raised by the refinement operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompError {
    #[error("b = {0} must exceed 1")]
    RatioTooSmall(Ratio<u64>),
    #[error("expected {expected} node weights, found {found}")]
    WeightCount { expected: usize, found: usize },
    #[error("expected a tree with one root, found {0} roots")]
    NotATree(usize),
    #[error("the tree has zero total weight")]
    ZeroWeight,
    #[error("input decomposition is invalid: {0}")]
    InvalidDecomposition(String),
}

fn check_ratio(b: Ratio<u64>) -> Result<(), DecompError> {
    if *b.numer() <= *b.denom() {
        return Err(DecompError::RatioTooSmall(b));
    }
    Ok(())
}

/// `x > y / b` for a rational `b = p/q`, i.e. `x·p > y·q`.
fn exceeds_fraction(x: u128, y: u128, b: Ratio<u64>) -> bool {
    x * *b.numer() as u128 > y * *b.denom() as u128
}

/// `x ≤ b`, i.e. `x·q ≤ p`.
fn at_most(x: u128, b: Ratio<u64>) -> bool {
    x * *b.denom() as u128 <= *b.numer() as u128
}

/// The nodes whose subtree weight exceeds `ω(T)/b`, in increasing id order.
///
/// `parent` must describe a single rooted tree.  The result induces a
/// connected subtree containing the root, holds fewer than `b` nodes per
/// depth level, and every component of the remaining forest weighs at most
/// `ω(T)/b`.
pub fn heavy_set(
    parent: &[Option<usize>],
    weights: &[u64],
    b: Ratio<u64>,
) -> Result<Vec<usize>, DecompError> {
    check_ratio(b)?;
    if weights.len() != parent.len() {
        return Err(DecompError::WeightCount {
            expected: parent.len(),
            found: weights.len(),
        });
    }
    let roots = parent.iter().filter(|p| p.is_none()).count();
    if roots != 1 {
        return Err(DecompError::NotATree(roots));
    }
    let tree = Decomposition::new(parent.to_vec(), vec![Vec::new(); parent.len()])
        .map_err(|e| DecompError::InvalidDecomposition(e.to_string()))?;
    let sub = subtree_weights(&tree, weights);
    let total = sub[tree.roots()[0]];
    if total == 0 {
        return Err(DecompError::ZeroWeight);
    }
    Ok((0..parent.len())
        .filter(|&x| exceeds_fraction(sub[x], total, b))
        .collect())
}

fn subtree_weights(tree: &Decomposition, weights: &[u64]) -> Vec<u128> {
    let mut sub: Vec<u128> = weights.iter().map(|&w| w as u128).collect();
    for &x in tree.bfs_order().iter().rev() {
        if let Some(p) = tree.parent(x) {
            sub[p] += sub[x];
        }
    }
    sub
}

/// Whether every depth level of the forest has at most `⌊b⌋` nodes.
pub fn check_skinny(d: &Decomposition, b: Ratio<u64>) -> bool {
    let mut per_level = vec![0u128; d.height() + 1];
    for x in 0..d.node_count() {
        per_level[d.depth(x)] += 1;
    }
    d.node_count() == 0 || per_level.iter().all(|&c| at_most(c, b))
}

/// One super-bag's skinny decomposition: `nodes[i]` is the input node that
/// local node `i` of `decomposition` stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InnerDecomposition {
    pub nodes: Vec<usize>,
    pub decomposition: Decomposition,
}

/// Output of [`skinny_refine`]: an outer decomposition `Q` over super-bags
/// `D_q` and, per outer node, a skinny decomposition of its torso.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkinnyRefinement {
    pub outer: Decomposition,
    pub inner: Vec<InnerDecomposition>,
}

/// Serialised [`SkinnyRefinement`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkinnyRefinementJson {
    pub outer: DecompositionJson,
    pub inner: Vec<InnerJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InnerJson {
    pub nodes: Vec<usize>,
    pub decomposition: DecompositionJson,
}

impl SkinnyRefinement {
    pub fn to_json(&self) -> SkinnyRefinementJson {
        SkinnyRefinementJson {
            outer: self.outer.to_json(),
            inner: self
                .inner
                .iter()
                .map(|i| InnerJson {
                    nodes: i.nodes.clone(),
                    decomposition: i.decomposition.to_json(),
                })
                .collect(),
        }
    }
}

/// Contracts every node whose bag lies inside its parent's bag into that
/// parent.  Returns the parent map over the input node ids (`None` for
/// roots) and the liveness of each node.
///
/// Contraction keeps the decomposition valid and leaves every adhesion
/// unchanged; afterwards every non-root node owns at least one vertex that
/// its parent lacks.
fn contract_contained(d: &Decomposition) -> (Vec<Option<usize>>, Vec<bool>) {
    let nodes = d.node_count();
    let mut parent: Vec<Option<usize>> = d.parents().to_vec();
    let mut alive = vec![true; nodes];
    for x in d.bfs_order() {
        // The parent of x is final by now: it was processed earlier.
        if let Some(p) = parent[x] {
            if is_subset_sorted(d.bag(x), d.bag(p)) {
                alive[x] = false;
                for &c in d.children(x) {
                    parent[c] = Some(p);
                }
            }
        }
    }
    (parent, alive)
}

/// Refines a tree-decomposition (or forest-decomposition, one component at
/// a time) into a decomposition `Q` whose adhesions are adhesions of the
/// input, whose height is at most `log_b n`, and whose torsos come with
/// `b`-skinny decompositions indexed by subtrees of the input tree (after
/// contracting nodes whose bags lie inside their parents' bags).
///
/// The recursion weighs a sub-instance rooted at `y` with outside parent
/// `x` by `ω(y) = |B_y ∖ B_x|` and `ω(z) = |B_z ∖ B_parent(z)|` below it, so
/// the weight of a subtree is exactly the number of vertices it adds.
pub fn skinny_refine(
    g: &Graph,
    d: &Decomposition,
    b: Ratio<u64>,
) -> Result<SkinnyRefinement, DecompError> {
    check_ratio(b)?;
    let report = validate_decomposition(g, d);
    if !report.is_valid() {
        return Err(DecompError::InvalidDecomposition(format!(
            "{:?}",
            report.violations
        )));
    }
    let (parent, alive) = contract_contained(d);
    let nodes = d.node_count();
    let mut children = vec![Vec::new(); nodes];
    for x in 0..nodes {
        if let (true, Some(p)) = (alive[x], parent[x]) {
            children[p].push(x);
        }
    }
    let own = |x: usize, above: Option<usize>| -> u64 {
        match above {
            Some(p) => (d.bag(x).len() - intersect_sorted(d.bag(x), d.bag(p)).len()) as u64,
            None => d.bag(x).len() as u64,
        }
    };
    let mut builder = Builder {
        d,
        b,
        children: &children,
        parent: &parent,
        own: &own,
        outer_parent: Vec::new(),
        outer_bags: Vec::new(),
        inner: Vec::new(),
    };
    for r in (0..nodes).filter(|&x| alive[x] && parent[x].is_none()) {
        builder.refine(r, None, None);
    }
    let outer = Decomposition::new(builder.outer_parent, builder.outer_bags)
        .expect("super-bags form a forest");
    Ok(SkinnyRefinement {
        outer,
        inner: builder.inner,
    })
}

struct Builder<'a, F: Fn(usize, Option<usize>) -> u64> {
    d: &'a Decomposition,
    b: Ratio<u64>,
    children: &'a [Vec<usize>],
    parent: &'a [Option<usize>],
    own: &'a F,
    outer_parent: Vec<Option<usize>>,
    outer_bags: Vec<Vec<usize>>,
    inner: Vec<InnerDecomposition>,
}

impl<F: Fn(usize, Option<usize>) -> u64> Builder<'_, F> {
    /// Refines the subtree rooted at `y`, whose parent outside the
    /// sub-instance is `above`, and attaches the result below `q_parent`.
    fn refine(&mut self, y: usize, above: Option<usize>, q_parent: Option<usize>) {
        // Subtree nodes in breadth-first order.
        let mut sub = vec![y];
        let mut i = 0;
        while i < sub.len() {
            let x = sub[i];
            sub.extend_from_slice(&self.children[x]);
            i += 1;
        }
        let index = index_map(self.d.node_count(), &sub);
        let local_parent: Vec<Option<usize>> = sub
            .iter()
            .map(|&x| {
                if x == y {
                    None
                } else {
                    index[self.parent[x].expect("non-root")]
                }
            })
            .collect();
        let weights: Vec<u64> = sub
            .iter()
            .map(|&x| (self.own)(x, if x == y { above } else { self.parent[x] }))
            .collect();
        let total: u128 = weights.iter().map(|&w| w as u128).sum();
        let in_x: Vec<bool> = if at_most(total, self.b) {
            vec![true; sub.len()]
        } else {
            let heavy = heavy_set(&local_parent, &weights, self.b).expect("valid subtree");
            let mut mark = vec![false; sub.len()];
            for h in heavy {
                mark[h] = true;
            }
            mark
        };
        let chosen: Vec<usize> = (0..sub.len()).filter(|&i| in_x[i]).collect();
        let mut bag: Vec<usize> = chosen.iter().flat_map(|&i| self.d.bag(sub[i])).copied().collect();
        bag.sort_unstable();
        bag.dedup();
        let q = self.outer_parent.len();
        self.outer_parent.push(q_parent);
        self.outer_bags.push(bag);
        let chosen_index = index_map(sub.len(), &chosen);
        let inner_parent = chosen
            .iter()
            .map(|&i| local_parent[i].map(|p| chosen_index[p].expect("heavy set is connected")))
            .collect();
        let inner_bags = chosen.iter().map(|&i| self.d.bag(sub[i]).to_vec()).collect();
        self.inner.push(InnerDecomposition {
            nodes: chosen.iter().map(|&i| sub[i]).collect(),
            decomposition: Decomposition::new(inner_parent, inner_bags).expect("subtree"),
        });
        let children = self.children;
        for &i in &chosen {
            let x = sub[i];
            for &c in &children[x] {
                if !in_x[index[c].expect("child in subtree")] {
                    self.refine(c, Some(x), Some(q));
                }
            }
        }
    }
}

/// Checks every property of a refinement; returns the first violation.
pub fn validate_refinement(
    g: &Graph,
    d: &Decomposition,
    b: Ratio<u64>,
    r: &SkinnyRefinement,
) -> Result<(), String> {
    let report = validate_decomposition(g, &r.outer);
    if !report.is_valid() {
        return Err(format!("outer decomposition invalid: {:?}", report.violations));
    }
    let mut input_adhesions: Vec<Vec<usize>> = (0..d.node_count()).map(|x| d.adhesion(x)).collect();
    input_adhesions.push(Vec::new());
    input_adhesions.sort();
    for q in 0..r.outer.node_count() {
        if r.outer.parent(q).is_some() && input_adhesions.binary_search(&r.outer.adhesion(q)).is_err() {
            return Err(format!("outer adhesion at {q} is not an input adhesion"));
        }
        let inner = &r.inner[q];
        if !check_skinny(&inner.decomposition, b) {
            return Err(format!("inner decomposition at {q} is not skinny"));
        }
        if inner.decomposition.roots().len() != 1 {
            return Err(format!("inner decomposition at {q} is not a tree"));
        }
        for (i, &x) in inner.nodes.iter().enumerate() {
            if inner.decomposition.bag(i) != d.bag(x) {
                return Err(format!("inner node {i} at {q} does not carry bag {x}"));
            }
        }
        let t = torso(g, &r.outer, q).map_err(|e| e.to_string())?;
        let local = inner.decomposition.restrict_vertices(g.n(), &t.vertices);
        let rep = validate_decomposition(&t.graph, &local);
        if !rep.is_valid() {
            return Err(format!("inner decomposition at {q} does not fit the torso: {:?}", rep.violations));
        }
    }
    // b^height ≤ n, compared exactly as p^h ≤ n·q^h.
    let h = r.outer.height() as u32;
    let (p, qd) = (*b.numer() as u128, *b.denom() as u128);
    let lhs = p.checked_pow(h);
    let rhs = qd.checked_pow(h).and_then(|x| x.checked_mul(g.n() as u128));
    match (lhs, rhs) {
        (Some(l), Some(rr)) if l <= rr => {}
        (Some(_), None) => {}
        _ if g.n() == 0 => {}
        _ => return Err(format!("height {h} exceeds log_b n")),
    }
    for (root, q_root) in d.roots().into_iter().zip(r.outer.roots()) {
        if !is_subset_sorted(d.bag(root), r.outer.bag(q_root)) {
            return Err(format!("root bag {root} is not inside super-bag {q_root}"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(p: u64, q: u64) -> Ratio<u64> {
        Ratio::new_raw(p, q)
    }

    /// Independent oracle: subtree weight by walking every node's ancestors.
    fn oracle_subtree(parent: &[Option<usize>], weights: &[u64]) -> Vec<u128> {
        let mut sub = vec![0u128; parent.len()];
        for x in 0..parent.len() {
            let mut y = Some(x);
            while let Some(z) = y {
                sub[z] += weights[x] as u128;
                y = parent[z];
            }
        }
        sub
    }

    fn depths(parent: &[Option<usize>]) -> Vec<usize> {
        (0..parent.len())
            .map(|x| {
                let mut d = 0;
                let mut y = parent[x];
                while let Some(z) = y {
                    d += 1;
                    y = parent[z];
                }
                d
            })
            .collect()
    }

    #[test]
    fn heavy_set_single_node() {
        assert_eq!(heavy_set(&[None], &[3], r(5, 1)).unwrap(), vec![0]);
    }

    #[test]
    fn heavy_set_unit_path() {
        // Subtree weights 8,7,…,1; those above 8/2 = 4 are the top four.
        let parent: Vec<Option<usize>> = (0..8usize).map(|x| x.checked_sub(1)).collect();
        assert_eq!(heavy_set(&parent, &[1; 8], r(2, 1)).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn heavy_set_heavy_star_centre() {
        let mut parent = vec![None];
        parent.extend((0..10).map(|_| Some(0)));
        let mut w = vec![100];
        w.extend([1; 10]);
        assert_eq!(heavy_set(&parent, &w, r(4, 1)).unwrap(), vec![0]);
    }

    #[test]
    fn heavy_set_rejects_bad_input() {
        assert!(matches!(heavy_set(&[None], &[1], r(1, 1)), Err(DecompError::RatioTooSmall(_))));
        assert_eq!(heavy_set(&[None, None], &[1, 1], r(2, 1)), Err(DecompError::NotATree(2)));
        assert_eq!(heavy_set(&[None], &[0], r(2, 1)), Err(DecompError::ZeroWeight));
    }

    #[test]
    fn heavy_set_random_trees_satisfy_lemma() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let n = rng.gen_range(1..=200);
            let parent: Vec<Option<usize>> = (0..n).map(|x| (x > 0).then(|| rng.gen_range(0..x))).collect();
            let weights: Vec<u64> = (0..n).map(|_| rng.gen_range(0..20)).collect();
            if weights.iter().all(|&w| w == 0) {
                continue;
            }
            let b = r(rng.gen_range(3..40), rng.gen_range(1..3));
            let x = heavy_set(&parent, &weights, b).unwrap();
            let sub = oracle_subtree(&parent, &weights);
            let total = sub[0];
            let mut in_x = vec![false; n];
            for &v in &x {
                in_x[v] = true;
            }
            // (a) contains the root and is closed under taking parents.
            assert!(in_x[0]);
            for &v in &x {
                if let Some(p) = parent[v] {
                    assert!(in_x[p]);
                }
            }
            // (b) fewer than b nodes per level: count·q < p.
            let d = depths(&parent);
            let mut per_level = vec![0u128; n];
            for &v in &x {
                per_level[d[v]] += 1;
            }
            assert!(per_level.iter().all(|&c| c * *b.denom() as u128 <= *b.numer() as u128));
            assert!(per_level.iter().all(|&c| c == 0 || c * (*b.denom() as u128) < *b.numer() as u128));
            // (c) components hanging off X are light: weight·p ≤ total·q.
            for v in 0..n {
                if !in_x[v] && parent[v].is_some_and(|p| in_x[p]) {
                    assert!(sub[v] * (*b.numer() as u128) <= total * (*b.denom() as u128));
                }
            }
        }
    }

    /// Random tree-decomposition of a random graph: a random tree whose
    /// bags overlap along random adhesions.
    fn random_decomposition(seed: u64, nodes: usize, max_bag: usize) -> (Graph, Decomposition) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut parent = Vec::new();
        let mut bags: Vec<Vec<usize>> = Vec::new();
        let mut next = 0usize;
        for x in 0..nodes {
            let p = (x > 0).then(|| rng.gen_range(0..x));
            let mut bag: Vec<usize> = match p {
                Some(p) => {
                    let pb: &Vec<usize> = &bags[p];
                    pb.iter().copied().filter(|_| rng.gen_bool(0.4)).collect()
                }
                None => Vec::new(),
            };
            let fresh = rng.gen_range(0..=max_bag);
            for _ in 0..fresh {
                bag.push(next);
                next += 1;
            }
            parent.push(p);
            bags.push(bag);
        }
        let d = Decomposition::new(parent, bags).unwrap();
        let mut edges = Vec::new();
        for x in 0..nodes {
            let b = d.bag(x);
            for (i, &u) in b.iter().enumerate() {
                for &v in &b[i + 1..] {
                    if rng.gen_bool(0.5) {
                        edges.push((u, v));
                    }
                }
            }
        }
        (Graph::from_edge_iter(next, edges).unwrap(), d)
    }

    #[test]
    fn small_graph_gives_one_super_bag() {
        let (g, d) = random_decomposition(3, 4, 1);
        let b = r(g.n() as u64 + 1, 1);
        let out = skinny_refine(&g, &d, b).unwrap();
        assert_eq!(out.outer.node_count(), 1);
        // Every node owns a vertex here only if its bag is not inside its
        // parent's, so compare against the contracted tree.
        let (_, alive) = contract_contained(&d);
        let live: Vec<usize> = (0..d.node_count()).filter(|&x| alive[x]).collect();
        assert_eq!(out.inner[0].nodes, live);
        validate_refinement(&g, &d, b, &out).unwrap();
    }

    #[test]
    fn caterpillar_height_bound() {
        // Spine of 16 nodes with 3 leaves each; every node adds one vertex.
        let mut parent = Vec::new();
        let mut bags = Vec::new();
        for s in 0..16usize {
            parent.push(s.checked_sub(1).map(|p| p * 4));
            let prev = if s > 0 { vec![(s - 1) * 4] } else { vec![] };
            bags.push([prev, vec![s * 4]].concat());
            for l in 1..4 {
                parent.push(Some(s * 4));
                bags.push(vec![s * 4, s * 4 + l]);
            }
        }
        let d = Decomposition::new(parent, bags).unwrap();
        let g = Graph::from_edge_iter(64, (0..64).filter(|v| v % 4 != 0).map(|v| (v - v % 4, v))).unwrap();
        let b = r(4, 1);
        let out = skinny_refine(&g, &d, b).unwrap();
        assert!(out.outer.height() <= 3);
        validate_refinement(&g, &d, b, &out).unwrap();
    }

    #[test]
    fn refinement_json_mirrors_structure() {
        let (g, d) = random_decomposition(5, 20, 3);
        let out = skinny_refine(&g, &d, r(3, 1)).unwrap();
        let json = out.to_json();
        assert_eq!(json.outer.nodes, out.outer.node_count());
        assert_eq!(json.inner.len(), out.inner.len());
    }

    proptest! {
        #[test]
        fn refinement_properties(seed in any::<u64>(), nodes in 1usize..60, max_bag in 1usize..4, p in 2u64..9, q in 1u64..3) {
            prop_assume!(p > q);
            let (g, d) = random_decomposition(seed, nodes, max_bag);
            let b = r(p, q);
            let out = skinny_refine(&g, &d, b).unwrap();
            prop_assert_eq!(validate_refinement(&g, &d, b, &out), Ok(()));
        }
    }
}
