//! Random instances: `k`-trees and subgraphs of their products with paths.

use crate::witness::ProductWitness;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wmls_core::graph_model::Graph;

/// A random `k`-tree on `n` vertices as a witness host (one row per
/// vertex); the elimination order removes vertices in reverse insertion
/// order.
pub fn random_ktree(n: usize, k: usize, seed: u64) -> ProductWitness {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let mut cliques: Vec<Vec<usize>> = vec![(0..n.min(k + 1)).collect()];
    for i in 0..n.min(k + 1) {
        for j in 0..i {
            edges.push((j, i));
        }
    }
    for v in k + 1..n {
        let base = cliques[rng.gen_range(0..cliques.len())].clone();
        let drop = rng.gen_range(0..base.len());
        let mut attach: Vec<usize> = base.clone();
        attach.remove(drop);
        for &u in &attach {
            edges.push((u, v));
        }
        attach.push(v);
        cliques.push(attach);
    }
    ProductWitness {
        k,
        h: 1,
        host: Graph::from_edge_iter(n, edges).unwrap(),
        elim_order: (0..n).rev().collect(),
        placement: (0..n).map(|v| (v, 1)).collect(),
    }
}


/// A random subgraph of `H ⊠ P_h` with `H` a random `k`-tree on `m`
/// vertices: each point is kept with probability `keep`, `G⁺` is induced
/// by the product and `G` keeps each edge of `G⁺` with probability `dense`.
/// Requested cliques are every vertex plus, for some points `(v,i)`, all
/// kept points over `{v} ∪ N⁺(v)` in rows `i−1` and `i`.
pub fn random_product(
    m: usize,
    k: usize,
    h: usize,
    keep: f64,
    dense: f64,
    seed: u64,
) -> wmls_core::mls::Instance<ProductWitness> {
    let mut host = random_ktree(m, k, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut points: Vec<(usize, usize)> = Vec::new();
    for v in 0..m {
        for i in 1..=h {
            if rng.gen_bool(keep) {
                points.push((v, i));
            }
        }
    }
    // Shuffle so that vertex ids carry no structure.
    for i in (1..points.len()).rev() {
        points.swap(i, rng.gen_range(0..=i));
    }
    let n = points.len();
    let mut plus = Vec::new();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let ((u, i), (v, j)) = (points[a], points[b]);
            if i.abs_diff(j) <= 1 && (u == v || host.host.has_edge(u, v)) {
                plus.push((a, b));
                if rng.gen_bool(dense) {
                    edges.push((a, b));
                }
            }
        }
    }
    host.h = h;
    host.placement = points.clone();
    let positions = host.positions();
    let later = host.later_neighbours(&positions);
    let index: std::collections::HashMap<(usize, usize), usize> =
        points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut cliques: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    for &(v, i) in points.iter().take(n / 2 + 1) {
        let mut k: Vec<usize> = std::iter::once(v)
            .chain(later[v].iter().copied())
            .flat_map(|w| [(w, i), (w, i.saturating_sub(1))])
            .filter_map(|p| index.get(&p).copied())
            .collect();
        k.sort_unstable();
        k.dedup();
        cliques.push(k);
    }
    let weights = (0..n)
        .map(|_| {
            let w = 1u64 << rng.gen_range(0..12);
            w + rng.gen_range(0..w)
        })
        .collect();
    wmls_core::mls::Instance {
        supergraph: Graph::new(n, plus).unwrap(),
        graph: Graph::new(n, edges).unwrap(),
        weights,
        cliques,
        witness: host,
    }
}
