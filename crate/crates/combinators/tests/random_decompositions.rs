//! Random tree-decomposed graphs through the decomposition combinators,
//! verified exhaustively against the graph itself.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wmls_combinators::{CombinatorConfig, Composed, DecompWitness, Short, Skinny, Union, UnionWitness};
use wmls_core::codes::{read_bin, unframe_exact};
use wmls_core::graph_model::{validate_decomposition, Decomposition, Graph};
use wmls_core::mls::{check_scheme_on_instance, verify_labelling, ExplicitScheme, Instance, Scheme};
use wmls_product::generate::random_product;
use wmls_product::ProductScheme;

/// A random rooted tree of `nodes` bags; every child shares at most `k`
/// vertices of its parent's bag and adds up to `fresh` new vertices.
/// `G⁺` keeps each pair inside a bag with probability `p`, `G` keeps each
/// edge of `G⁺` with probability `q`.
fn decomposed(seed: u64, nodes: usize, fresh: usize, k: usize, p: f64, q: f64) -> Instance<DecompWitness<()>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n = 0;
    let mut parent = Vec::with_capacity(nodes);
    let mut bags: Vec<Vec<usize>> = Vec::with_capacity(nodes);
    for x in 0..nodes {
        let mut bag = Vec::new();
        if x > 0 {
            let y = rng.gen_range(0..x);
            parent.push(Some(y));
            let shared = rng.gen_range(0..=k.min(bags[y].len()));
            let mut pool = bags[y].clone();
            for _ in 0..shared {
                bag.push(pool.swap_remove(rng.gen_range(0..pool.len())));
            }
        } else {
            parent.push(None);
        }
        let lo = usize::from(bag.is_empty());
        for _ in 0..rng.gen_range(lo..=fresh.max(lo)) {
            bag.push(n);
            n += 1;
        }
        bag.sort_unstable();
        bags.push(bag);
    }
    let mut plus = Vec::new();
    for bag in &bags {
        for (i, &u) in bag.iter().enumerate() {
            for &v in &bag[i + 1..] {
                if rng.gen_bool(p) {
                    plus.push((u, v));
                }
            }
        }
    }
    plus.sort_unstable();
    plus.dedup();
    let supergraph = Graph::new(n, plus.clone()).unwrap();
    let graph = Graph::new(n, plus.into_iter().filter(|_| rng.gen_bool(q)).collect()).unwrap();
    let mut cliques = Vec::new();
    for bag in &bags {
        if rng.gen_bool(0.5) {
            let mut k: Vec<usize> = Vec::new();
            for &v in bag {
                if rng.gen_bool(0.7) && k.iter().all(|&u| supergraph.has_edge(u, v)) {
                    k.push(v);
                }
            }
            if !k.is_empty() {
                cliques.push(k);
            }
        }
    }
    let weights = (0..n).map(|_| rng.gen_range(1..=1000)).collect();
    Instance {
        supergraph,
        graph,
        weights,
        cliques,
        witness: DecompWitness {
            n,
            decomposition: Decomposition::new(parent, bags).unwrap(),
            torsos: vec![(); nodes],
        },
    }
}

fn config() -> CombinatorConfig {
    CombinatorConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generator_produces_valid_decompositions(seed in any::<u64>(), k in 1usize..4) {
        let inst = decomposed(seed, 12, 4, k, 0.6, 0.7);
        prop_assert!(validate_decomposition(&inst.supergraph, &inst.witness.decomposition).is_valid());
        prop_assert!(inst.witness.decomposition.adhesion_width() <= k);
        prop_assert!(inst.validate().is_ok());
    }

    #[test]
    fn skinny_labels_are_exact(seed in any::<u64>(), k in 1usize..4, nodes in 1usize..16) {
        let inst = decomposed(seed, nodes, 4, k, 0.6, 0.7);
        let s = Skinny::new(ExplicitScheme, k, None, config());
        let (l, layers) = s.label_detailed(&inst).unwrap();
        let report = verify_labelling(&s, &inst, &l);
        prop_assert!(report.pass, "{:?}", report.first_failure);
        for v in 0..inst.n() {
            prop_assert!(layers.home[v] <= layers.last[v]);
        }
    }

    #[test]
    fn short_labels_are_exact(seed in any::<u64>(), k in 1usize..4, nodes in 1usize..16) {
        let inst = decomposed(seed, nodes, 4, k, 0.6, 0.7);
        let s = Short::new(ExplicitScheme, k, None, config());
        let (l, forest) = s.label_bounded(&inst, None).unwrap();
        let report = verify_labelling(&s, &inst, &l);
        prop_assert!(report.pass, "{:?}", report.first_failure);
        for v in 0..inst.n() {
            prop_assert!(forest.depth[v] <= forest.height);
            prop_assert!(forest.adhesion[v] <= k);
        }
        // Every local identifier opens with the depth of its vertex's home node.
        for (k, ids) in inst.cliques.iter().zip(&l.local) {
            for (&u, kappa) in k.iter().zip(ids) {
                let [depth, _] = unframe_exact::<2>(kappa).unwrap();
                prop_assert_eq!(read_bin(depth).unwrap() as usize, forest.depth[u]);
            }
        }
    }

    #[test]
    fn composed_labels_are_exact(
        seed in any::<u64>(),
        k in 1usize..4,
        nodes in 1usize..48,
        g3 in prop::sample::select(vec![0.1, 1.0, 4.0]),
    ) {
        let inst = decomposed(seed, nodes, 4, k, 0.5, 0.8);
        let s = Composed::new(ExplicitScheme, k, CombinatorConfig { compose_g3: g3, ..config() });
        let (l, data) = s.label_detailed(&inst).unwrap();
        prop_assert!(data.forest.height <= data.h);
        let report = verify_labelling(&s, &inst, &l);
        prop_assert!(report.pass, "{:?}", report.first_failure);
    }

    #[test]
    fn labels_ignore_weight_scale(seed in any::<u64>(), factor in 2u64..50) {
        let inst = decomposed(seed, 10, 4, 2, 0.6, 0.7);
        let mut scaled = inst.clone();
        for w in &mut scaled.weights {
            *w *= factor;
        }
        let s = Composed::new(ExplicitScheme, 2, config());
        prop_assert_eq!(s.label(&inst).unwrap(), s.label(&scaled).unwrap());
    }
}

/// Disjoint union of product instances, with vertices renumbered in order.
fn product_union(seeds: &[u64]) -> Instance<UnionWitness<wmls_product::ProductWitness>> {
    let mut n = 0;
    let (mut plus, mut edges, mut weights, mut cliques, mut parts) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for &seed in seeds {
        let p = random_product(6, 2, 3, 0.6, 0.7, seed);
        let shift = |(u, v): &(usize, usize)| (u + n, v + n);
        plus.extend(p.supergraph.edges().iter().map(shift));
        edges.extend(p.graph.edges().iter().map(shift));
        weights.extend(&p.weights);
        cliques.extend(p.cliques.iter().map(|k| k.iter().map(|v| v + n).collect::<Vec<_>>()));
        let m = p.n();
        parts.push(((n..n + m).collect(), p.witness));
        n += m;
    }
    Instance {
        supergraph: Graph::new(n, plus).unwrap(),
        graph: Graph::new(n, edges).unwrap(),
        weights,
        cliques,
        witness: UnionWitness { n, parts },
    }
}

#[test]
fn union_of_products_is_exact() {
    let inst = product_union(&[1, 2, 3, 4, 5]);
    let s = Union::new(ProductScheme::new(2), config());
    let (l, report) = check_scheme_on_instance(&s, &inst).unwrap();
    assert!(report.pass, "{:?}", report.first_failure);
    // Vertices of different parts carry different codewords.
    let first: Vec<usize> = inst.witness.parts.iter().map(|(vs, _)| vs[0]).collect();
    for (i, &u) in first.iter().enumerate() {
        for &v in &first[i + 1..] {
            let [ru, _] = unframe_exact::<2>(&l.vertex[u]).unwrap();
            let [rv, _] = unframe_exact::<2>(&l.vertex[v]).unwrap();
            assert_ne!(ru, rv);
            assert!(!s.adjacent(&l.vertex[u], &l.vertex[v]).unwrap());
        }
    }
}

#[test]
fn composed_budget_covers_its_layers() {
    // The composition's budget dominates the budget of the short scheme it wraps.
    let s = Composed::new(ExplicitScheme, 2, config());
    for n in [16usize, 256, 4096] {
        let b = s.budget(n);
        assert!(b.g1 > 0.0 && b.g2 > 0.0 && b.g3 > 0.0);
        let (_, h) = s.parameters(n);
        assert!(h >= 1);
    }
}
