//! Seeded generators of witnessed instances.
//!
//! Every generator is a pure function of its parameters and seed: the same
//! inputs give the same instance, edge for edge.

use std::collections::HashMap;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use wmls_combinators::{ApexWitness, DecompWitness, UnionWitness};
use wmls_core::graph_model::{Decomposition, Graph};
use wmls_core::mls::Instance;
use wmls_product::ProductWitness;

/// Torso witness: a product with apex vertices.
pub type ApexW = ApexWitness<ProductWitness>;
/// Witness of a disjoint union of apex-augmented products.
pub type UnionW = UnionWitness<ApexW>;
/// Witness of a tree-decomposition whose torsos are unions of apex-augmented
/// products.
pub type DecompW = DecompWitness<UnionW>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("a {k}-tree needs at least {} vertices, got {n}", k + 1)]
    TooFewVertices { n: usize, k: usize },
    #[error("edge probability {0} is outside [0, 1]")]
    Probability(f64),
    #[error("the path needs at least one row")]
    NoRows,
    #[error("{a} apex vertices exceed {n} vertices")]
    TooManyApices { a: usize, n: usize },
}

/// What the torsos of a decomposed instance look like.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TorsoKind {
    Product,
    /// A product plus this many apex vertices.
    ProductApex(usize),
}

impl TorsoKind {
    pub fn apices(self) -> usize {
        match self {
            TorsoKind::Product => 0,
            TorsoKind::ProductApex(a) => a,
        }
    }
}

/// A generator stream: one seed drives several independent streams.
fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// A seed for the `i`-th sub-instance of an instance with seed `seed`
/// (splitmix64 finaliser).
pub fn derive_seed(seed: u64, i: u64) -> u64 {
    let mut z = seed ^ i.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn check_probability(p: f64) -> Result<(), GenError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(GenError::Probability(p))
    }
}

fn random_weights(rng: &mut ChaCha8Rng, count: usize, n: usize) -> Vec<u64> {
    let top = (n as u64).saturating_mul(n as u64).max(1);
    (0..count).map(|_| rng.gen_range(1..=top)).collect()
}

/// A random `k`-tree: `K_{k+1}`, then every new vertex joins a uniformly
/// random existing `k`-clique.  The returned elimination order (reverse
/// insertion order) has later neighbourhoods of size at most `k`.
pub fn gen_ktree(n: usize, k: usize, seed: u64) -> Result<(Graph, Vec<usize>), GenError> {
    if n < k + 1 {
        return Err(GenError::TooFewVertices { n, k });
    }
    let mut rng = stream(seed, 0);
    let mut edges = Vec::with_capacity(k * n);
    for v in 0..=k {
        for u in 0..v {
            edges.push((u, v));
        }
    }
    let mut cliques: Vec<Vec<usize>> = (0..=k)
        .map(|drop| (0..=k).filter(|&u| u != drop).collect())
        .collect();
    if k == 0 {
        cliques.truncate(1);
    }
    for v in k + 1..n {
        let base = cliques[rng.gen_range(0..cliques.len())].clone();
        edges.extend(base.iter().map(|&u| (u, v)));
        for i in 0..base.len() {
            let mut next = base.clone();
            next[i] = v;
            next.sort_unstable();
            cliques.push(next);
        }
    }
    let graph = Graph::new(n, edges).expect("a k-tree is simple");
    Ok((graph, (0..n).rev().collect()))
}

/// Lookup of the points of a product witness.
struct ProductIndex {
    at: HashMap<(usize, usize), usize>,
    later: Vec<Vec<usize>>,
}

impl ProductIndex {
    fn new(w: &ProductWitness) -> Self {
        ProductIndex {
            at: w.placement.iter().enumerate().map(|(v, &p)| (p, v)).collect(),
            later: w.later_neighbours(&w.positions()),
        }
    }

    /// The vertices placed on `{x} ∪ N⁺(x)` in rows `i−1` and `i`, where
    /// `(x, i)` is the point of `v`: a clique of the strong product.
    fn clique_at(&self, w: &ProductWitness, v: usize) -> Vec<usize> {
        let (x, i) = w.placement[v];
        let mut out: Vec<usize> = std::iter::once(x)
            .chain(self.later[x].iter().copied())
            .flat_map(|y| [(y, i), (y, i.wrapping_sub(1))])
            .filter_map(|p| self.at.get(&p).copied())
            .collect();
        out.sort_unstable();
        out
    }
}

/// Random sub-cliques of product cliques, each containing its anchor vertex.
fn product_cliques(w: &ProductWitness, index: &ProductIndex, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let n = w.placement.len();
    if n == 0 {
        return Vec::new();
    }
    let mut cliques: Vec<Vec<usize>> = (0..count)
        .map(|_| {
            let v = rng.gen_range(0..n);
            index
                .clique_at(w, v)
                .into_iter()
                .filter(|&u| u == v || rng.gen_bool(0.5))
                .collect()
        })
        .collect();
    cliques.sort();
    cliques.dedup();
    cliques
}

/// A random instance `G ⊆ G⁺ ⊆ H ⊠ P_h`: `H` is a random `k`-tree on
/// `max(k+1, ⌈n/h⌉)` vertices, the `n` vertices are placed injectively on
/// random points, `G⁺` is the subgraph of the product induced by the
/// placement and `G` drops each edge of `G⁺` with probability `edge_prob`.
/// Weights are drawn from `1..=n²`; requested cliques are random subsets of
/// the product cliques `X_{v,i}`.
pub fn gen_product_instance(
    n: usize,
    k: usize,
    h: usize,
    edge_prob: f64,
    seed: u64,
) -> Result<Instance<ProductWitness>, GenError> {
    check_probability(edge_prob)?;
    if h == 0 {
        return Err(GenError::NoRows);
    }
    let m = (k + 1).max(n.div_ceil(h));
    let (host, elim_order) = gen_ktree(m, k, seed)?;
    let mut rng = stream(seed, 1);
    let placement: Vec<(usize, usize)> = sample(&mut rng, m * h, n)
        .into_iter()
        .map(|p| (p / h, p % h + 1))
        .collect();
    let witness = ProductWitness {
        k,
        h,
        host,
        elim_order,
        placement,
    };
    let index = ProductIndex::new(&witness);
    let mut plus = Vec::new();
    for v in 0..n {
        let (x, i) = witness.placement[v];
        for y in std::iter::once(x).chain(witness.host.neighbors(x).iter().copied()) {
            for j in [i - 1, i, i + 1] {
                if let Some(&u) = index.at.get(&(y, j)) {
                    if u > v {
                        plus.push((v, u));
                    }
                }
            }
        }
    }
    plus.sort_unstable();
    let edges = plus.iter().copied().filter(|_| !rng.gen_bool(edge_prob)).collect();
    let weights = random_weights(&mut rng, n, n);
    let cliques = product_cliques(&witness, &index, n / 4 + 1, &mut rng);
    Ok(Instance {
        supergraph: Graph::new(n, plus).expect("product edges are simple"),
        graph: Graph::new(n, edges).expect("subgraph of a simple graph"),
        weights,
        cliques,
        witness,
    })
}

/// A product instance on `n − a` vertices plus `a` apex vertices (the last
/// `a` ids).  In `G⁺` the apices are adjacent to everything; `G` keeps each
/// apex edge with probability one half.
pub fn gen_apex_instance(
    n: usize,
    k: usize,
    h: usize,
    a: usize,
    edge_prob: f64,
    seed: u64,
) -> Result<Instance<ApexW>, GenError> {
    if a > n {
        return Err(GenError::TooManyApices { a, n });
    }
    let base = gen_product_instance(n - a, k, h, edge_prob, seed)?;
    let mut rng = stream(seed, 2);
    let apex: Vec<usize> = (n - a..n).collect();
    let mut plus = base.supergraph.edges().to_vec();
    let mut edges = base.graph.edges().to_vec();
    for &u in &apex {
        for v in 0..u {
            plus.push((v, u));
            if rng.gen_bool(0.5) {
                edges.push((v, u));
            }
        }
    }
    let mut weights = base.weights;
    weights.extend(random_weights(&mut rng, a, n));
    let mut cliques = base.cliques;
    for c in 0..cliques.len() {
        if a > 0 && rng.gen_bool(0.25) {
            let extra = apex.iter().copied().filter(|_| rng.gen_bool(0.5));
            cliques[c].extend(extra);
        }
    }
    cliques.extend(apex.iter().map(|&u| vec![u]));
    if a > 1 {
        cliques.push(apex.clone());
    }
    cliques.sort();
    cliques.dedup();
    Ok(Instance {
        supergraph: Graph::new(n, plus).expect("simple"),
        graph: Graph::new(n, edges).expect("simple"),
        weights,
        cliques,
        witness: ApexWitness {
            apex,
            rest: base.witness,
        },
    })
}

/// The disjoint union of `m` apex instances of `part_n` vertices each.
/// Vertex ids are shuffled across parts; inside a part, local order is the
/// order of the global ids.
pub fn gen_union_instance(
    m: usize,
    part_n: usize,
    k: usize,
    h: usize,
    a: usize,
    edge_prob: f64,
    seed: u64,
) -> Result<Instance<UnionW>, GenError> {
    let parts: Vec<Instance<ApexW>> = (0..m)
        .map(|i| gen_apex_instance(part_n, k, h, a, edge_prob, derive_seed(seed, i as u64)))
        .collect::<Result<_, _>>()?;
    let n = m * part_n;
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(&mut stream(seed, 3));
    let (mut plus, mut edges, mut weights, mut cliques) = (Vec::new(), Vec::new(), vec![0; n], Vec::new());
    let mut witness_parts = Vec::with_capacity(m);
    for (part, chunk) in parts.into_iter().zip(ids.chunks_mut(part_n.max(1))) {
        chunk.sort_unstable();
        let map = |v: usize| chunk[v];
        plus.extend(part.supergraph.edges().iter().map(|&(u, v)| (map(u), map(v))));
        edges.extend(part.graph.edges().iter().map(|&(u, v)| (map(u), map(v))));
        for (v, &w) in part.weights.iter().enumerate() {
            weights[map(v)] = w;
        }
        cliques.extend(part.cliques.iter().map(|c| c.iter().map(|&v| map(v)).collect::<Vec<_>>()));
        witness_parts.push((chunk.to_vec(), part.witness));
    }
    cliques.sort();
    Ok(Instance {
        supergraph: Graph::new(n, plus).expect("simple"),
        graph: Graph::new(n, edges).expect("simple"),
        weights,
        cliques,
        witness: UnionWitness {
            n,
            parts: witness_parts,
        },
    })
}

/// Parameters of [`gen_decomposed`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecomposedParams {
    /// Approximate number of vertices.
    pub n: usize,
    pub bags: usize,
    /// Treewidth of the product hosts inside the torsos.
    pub k: usize,
    pub torso: TorsoKind,
    /// Bound on the adhesion sizes.
    pub k_adh: usize,
    pub edge_prob: f64,
}

/// Renumbers an apex witness: local vertex `l` becomes `pos[l]`.
fn reorder(w: &ApexW, pos: &[usize]) -> ApexW {
    let mut is_apex = vec![false; pos.len()];
    for &u in &w.apex {
        is_apex[u] = true;
    }
    let mut rest: Vec<(usize, usize)> = (0..pos.len())
        .filter(|&l| !is_apex[l])
        .enumerate()
        .map(|(r, l)| (pos[l], r))
        .collect();
    rest.sort_unstable();
    ApexWitness {
        apex: w.apex.iter().map(|&u| pos[u]).collect(),
        rest: ProductWitness {
            placement: rest.iter().map(|&(_, r)| w.rest.placement[r]).collect(),
            ..w.rest.clone()
        },
    }
}

/// A random rooted tree of `bags` torsos, each a random apex-augmented
/// product on about `n / bags` fresh vertices.  A child is glued to its
/// parent along a product clique of at most `k_adh` vertices, identified
/// with a product clique of the child, so that every adhesion is a clique
/// in both torsos and every torso is certified by its own witness.
pub fn gen_decomposed(p: &DecomposedParams, seed: u64) -> Result<Instance<DecompW>, GenError> {
    check_probability(p.edge_prob)?;
    let bags = p.bags.max(1);
    let a = p.torso.apices();
    // Fresh vertices per bag: `n` split evenly, each bag needing a product vertex.
    let fresh = |x: usize| (p.n / bags + usize::from(x < p.n % bags)).max(a + 1);
    let mut rng = stream(seed, 4);
    let mut parent = Vec::with_capacity(bags);
    let mut locals: Vec<Instance<ApexW>> = Vec::with_capacity(bags);
    let mut indices: Vec<ProductIndex> = Vec::with_capacity(bags);
    let mut global: Vec<Vec<usize>> = Vec::with_capacity(bags);
    let mut next = 0;
    for x in 0..bags {
        let mut adhesion = Vec::new();
        let up = (x > 0).then(|| rng.gen_range(0..x));
        if let Some(y) = up {
            let py = &locals[y];
            let products = py.n() - py.witness.apex.len();
            if products > 0 {
                let v = rng.gen_range(0..products);
                let mut c = indices[y].clique_at(&py.witness.rest, v);
                c.shuffle(&mut rng);
                c.truncate(rng.gen_range(0..=p.k_adh));
                adhesion = c.into_iter().map(|u| global[y][u]).collect();
            }
        }
        // The largest of a few product cliques of the child hosts the
        // adhesion; if it is too small the adhesion shrinks and the bag is
        // redrawn, so that every bag adds exactly its share of fresh vertices.
        let (size, local, index, mut host) = loop {
            let size = fresh(x) + adhesion.len();
            let rows = ((size - a) as f64).sqrt().round().max(1.0) as usize;
            let local = gen_apex_instance(size, p.k, rows, a, p.edge_prob, derive_seed(seed, x as u64))?;
            let index = ProductIndex::new(&local.witness.rest);
            let mut host = Vec::new();
            for _ in 0..16 {
                let c = index.clique_at(&local.witness.rest, rng.gen_range(0..size - a));
                if c.len() > host.len() {
                    host = c;
                }
            }
            if host.len() >= adhesion.len() {
                break (size, local, index, host);
            }
            adhesion.truncate(host.len());
        };
        host.shuffle(&mut rng);
        let mut map = vec![usize::MAX; size];
        for (&l, &g) in host.iter().zip(&adhesion) {
            map[l] = g;
        }
        for g in map.iter_mut().filter(|g| **g == usize::MAX) {
            *g = next;
            next += 1;
        }
        parent.push(up);
        locals.push(local);
        indices.push(index);
        global.push(map);
    }

    let n = next;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut plus = Vec::new();
    let mut cliques = Vec::new();
    let mut bag_list = Vec::with_capacity(bags);
    let mut torsos = Vec::with_capacity(bags);
    for (local, map) in locals.iter().zip(&global) {
        let id = |l: usize| perm[map[l]];
        plus.extend(local.supergraph.edges().iter().map(|&(u, v)| (id(u).min(id(v)), id(u).max(id(v)))));
        cliques.extend(local.cliques.iter().map(|c| {
            let mut c: Vec<usize> = c.iter().map(|&l| id(l)).collect();
            c.sort_unstable();
            c
        }));
        let mut bag: Vec<usize> = (0..local.n()).map(id).collect();
        bag.sort_unstable();
        let pos: Vec<usize> = (0..local.n())
            .map(|l| bag.binary_search(&id(l)).expect("member of the bag"))
            .collect();
        torsos.push(UnionWitness::single(bag.len(), reorder(&local.witness, &pos)));
        bag_list.push(bag);
    }
    plus.sort_unstable();
    plus.dedup();
    cliques.sort();
    cliques.dedup();
    let edges = plus.iter().copied().filter(|_| !rng.gen_bool(p.edge_prob)).collect();
    let weights = random_weights(&mut rng, n, n);
    Ok(Instance {
        supergraph: Graph::new(n, plus).expect("simple"),
        graph: Graph::new(n, edges).expect("simple"),
        weights,
        cliques,
        witness: DecompWitness {
            n,
            decomposition: Decomposition::new(parent, bag_list).expect("a rooted tree"),
            torsos,
        },
    })
}

/// A decomposed instance of about `n` vertices over `max(1, n/25)` bags,
/// torsos over 2-trees, glued along adhesions of at most `k_adh` vertices.
pub fn gen_decomposed_instance(
    n: usize,
    k_adh: usize,
    torso: TorsoKind,
    seed: u64,
) -> Result<Instance<DecompW>, GenError> {
    gen_decomposed(
        &DecomposedParams {
            n,
            bags: (n / 25).max(1),
            k: 2,
            torso,
            k_adh,
            edge_prob: 0.3,
        },
        seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use wmls_core::graph_model::{torso, validate_decomposition};
    use wmls_core::mls::Witness;

    #[test]
    fn smallest_ktree_is_a_clique() {
        let (g, _) = gen_ktree(4, 3, 9).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert!(g.is_clique(&[0, 1, 2, 3]));
    }

    #[test]
    fn one_trees_are_trees() {
        let (g, order) = gen_ktree(10, 1, 5).unwrap();
        assert_eq!(g.edge_count(), 9);
        let mut pos = vec![0; 10];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        for v in 0..10 {
            assert!(g.neighbors(v).iter().filter(|&&u| pos[u] > pos[v]).count() <= 1);
        }
    }

    #[test]
    fn ktree_edge_count() {
        // k·n − k(k+1)/2 = 150 − 6.
        let (g, _) = gen_ktree(50, 3, 42).unwrap();
        assert_eq!(g.edge_count(), 144);
    }

    #[test]
    fn ktree_rejects_small_n() {
        assert_eq!(gen_ktree(2, 2, 0), Err(GenError::TooFewVertices { n: 2, k: 2 }));
    }

    #[test]
    fn zero_edge_probability_keeps_every_edge() {
        let inst = gen_product_instance(60, 2, 4, 0.0, 1).unwrap();
        assert_eq!(inst.graph, inst.supergraph);
        inst.witness.validate(Some(&inst.supergraph)).unwrap();
    }

    #[test]
    fn single_row_products() {
        let inst = gen_product_instance(30, 2, 1, 0.2, 3).unwrap();
        assert!(inst.witness.placement.iter().all(|&(_, i)| i == 1));
        inst.witness.validate(Some(&inst.supergraph)).unwrap();
    }

    #[test]
    fn generators_are_deterministic() {
        let a = gen_decomposed_instance(200, 3, TorsoKind::ProductApex(1), 11).unwrap();
        let b = gen_decomposed_instance(200, 3, TorsoKind::ProductApex(1), 11).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.weights, b.weights);
        assert_eq!(a.cliques, b.cliques);
        assert_eq!(a.witness, b.witness);
    }

    #[test]
    fn product_cliques_are_cliques() {
        let inst = gen_apex_instance(80, 2, 5, 2, 0.3, 4).unwrap();
        inst.validate().unwrap();
        let rest: Vec<usize> = (0..78).collect();
        inst.witness
            .rest
            .validate(Some(&inst.supergraph.induced(&rest)))
            .unwrap();
    }

    #[test]
    fn union_parts_partition_the_vertices() {
        let inst = gen_union_instance(4, 20, 1, 3, 1, 0.3, 8).unwrap();
        inst.validate().unwrap();
        let part_of = inst.witness.validate(&inst.supergraph).unwrap();
        assert_eq!(part_of.len(), 80);
    }

    #[test]
    fn torsos_are_certified_by_their_witnesses() {
        let inst = gen_decomposed_instance(400, 3, TorsoKind::ProductApex(2), 5).unwrap();
        inst.validate().unwrap();
        let d = &inst.witness.decomposition;
        assert!(validate_decomposition(&inst.supergraph, d).is_valid());
        assert!(d.adhesion_width() <= 3);
        for x in 0..d.node_count() {
            let t = torso(&inst.supergraph, d, x).unwrap();
            let w = &inst.witness.torsos[x].parts[0].1;
            let rest: Vec<usize> = (0..t.vertices.len())
                .filter(|i| !w.apex.contains(i))
                .collect();
            w.rest.validate(Some(&t.graph.induced(&rest))).unwrap();
            // Restriction keeps the certificate valid.
            let keep: Vec<usize> = (0..t.vertices.len()).step_by(2).collect();
            let r = w.restrict(&keep);
            assert!(r.apex.iter().all(|&u| u < keep.len()));
        }
    }

    #[test]
    fn thousand_vertices_over_forty_bags() {
        let inst = gen_decomposed_instance(1000, 3, TorsoKind::Product, 3).unwrap();
        assert_eq!(inst.witness.decomposition.node_count(), 40);
        assert_eq!(inst.n(), 1000);
        assert!(validate_decomposition(&inst.supergraph, &inst.witness.decomposition).is_valid());
    }
}
