//! End-to-end properties of the public API: decompositions, torsos, tidying,
//! skinny refinement, framing and the explicit reference scheme.

use std::collections::BTreeSet;

use num_rational::Ratio;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wmls_core::codes::{frame, unframe, BitLabel};
use wmls_core::decomp::{skinny_refine, validate_refinement};
use wmls_core::graph_model::{is_tidy, tidy, torso, validate_decomposition, Decomposition, Graph};
use wmls_core::mls::{check_scheme_on_instance, ExplicitScheme, Instance, Scheme};

/// A random tree of bags over `n` vertices: each child shares up to `k`
/// vertices of its parent's bag and adds fresh ones; the graph takes each
/// pair inside a bag with probability `p`.
fn random_decomposition(seed: u64, n: usize, k: usize, p: f64) -> (Graph, Decomposition) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = rng.gen_range(1..=4.min(n));
    let mut parent = vec![None];
    let mut bags = vec![(0..first).collect::<Vec<usize>>()];
    let mut next = first;
    while next < n {
        let up = rng.gen_range(0..bags.len());
        let shared = rng.gen_range(0..=k);
        let mut bag: Vec<usize> = bags[up].choose_multiple(&mut rng, shared).copied().collect();
        let fresh = rng.gen_range(1..=4).min(n - next);
        bag.extend(next..next + fresh);
        next += fresh;
        bag.sort_unstable();
        parent.push(Some(up));
        bags.push(bag);
    }
    let mut edges = BTreeSet::new();
    for bag in &bags {
        for (i, &u) in bag.iter().enumerate() {
            for &v in &bag[i + 1..] {
                if rng.gen_bool(p) {
                    edges.insert((u, v));
                }
            }
        }
    }
    let g = Graph::new(n, edges.into_iter().collect()).unwrap();
    (g, Decomposition::new(parent, bags).unwrap())
}

/// Home nodes recomputed from scratch: the shallowest bag holding `v`.
fn brute_home(d: &Decomposition, v: usize) -> Option<usize> {
    (0..d.node_count())
        .filter(|&x| d.bag(x).contains(&v))
        .min_by_key(|&x| (d.depth(x), x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edges_have_nested_home_nodes(seed in any::<u64>(), n in 1usize..120, k in 1usize..4) {
        let (g, d) = random_decomposition(seed, n, k, 0.5);
        prop_assert!(validate_decomposition(&g, &d).is_valid());
        let home = d.home_nodes(n);
        for v in 0..n {
            prop_assert_eq!(home[v].map(|x| d.depth(x)), brute_home(&d, v).map(|x| d.depth(x)));
        }
        for &(u, v) in g.edges() {
            let (a, b) = (home[u].unwrap(), home[v].unwrap());
            prop_assert!(d.is_ancestor(a, b) || d.is_ancestor(b, a), "edge {u}-{v}");
        }
    }

    #[test]
    fn adhesions_are_cliques_of_torsos(seed in any::<u64>(), n in 1usize..80, k in 1usize..4) {
        let (g, d) = random_decomposition(seed, n, k, 0.3);
        for x in 0..d.node_count() {
            let t = torso(&g, &d, x).unwrap();
            prop_assert_eq!(&t.vertices[..], d.bag(x));
            let local = |v: usize| t.vertices.binary_search(&v).unwrap();
            let mut adhesions: Vec<Vec<usize>> = d.children(x).iter().map(|&c| d.adhesion(c)).collect();
            if d.parent(x).is_some() {
                adhesions.push(d.adhesion(x));
            }
            for a in adhesions {
                let a: Vec<usize> = a.into_iter().map(local).collect();
                prop_assert!(t.graph.is_clique(&a));
            }
        }
    }

    #[test]
    fn tidy_is_a_valid_idempotent_tidy_decomposition(seed in any::<u64>(), n in 1usize..80, k in 0usize..4) {
        let (g, d) = random_decomposition(seed, n, k, 0.5);
        let once = tidy(&d);
        prop_assert!(is_tidy(&once.decomposition));
        prop_assert!(validate_decomposition(&g, &once.decomposition).is_valid());
        let twice = tidy(&once.decomposition);
        prop_assert_eq!(&twice.decomposition, &once.decomposition);
        for (i, &x) in once.origin.iter().enumerate() {
            prop_assert_eq!(once.decomposition.bag(i), d.bag(x));
        }
    }

    #[test]
    fn skinny_refinements_validate(seed in any::<u64>(), n in 1usize..200, k in 1usize..4, b in 2u64..9) {
        let (g, d) = random_decomposition(seed, n, k, 0.5);
        let ratio = Ratio::from_integer(b);
        let r = skinny_refine(&g, &d, ratio).unwrap();
        prop_assert_eq!(validate_refinement(&g, &d, ratio, &r), Ok(()));
        // Every input node lands in exactly one inner tree.
        let mut seen: Vec<usize> = r.inner.iter().flat_map(|i| i.nodes.iter().copied()).collect();
        seen.sort_unstable();
        seen.dedup();
        prop_assert!(seen.iter().all(|&x| x < d.node_count()));
    }

    #[test]
    fn frames_round_trip(parts in prop::collection::vec(prop::collection::vec(any::<bool>(), 0..40), 0..20)) {
        let framed = frame(&parts);
        let back: Vec<Vec<bool>> = unframe(framed.bits()).unwrap().into_iter().map(<[bool]>::to_vec).collect();
        prop_assert_eq!(back, parts);
        let hex = BitLabel::from_hex(framed.len(), &framed.to_hex()).unwrap();
        prop_assert_eq!(hex, framed);
    }

    #[test]
    fn explicit_scheme_matches_the_adjacency_matrix(seed in any::<u64>(), n in 0usize..40, p in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut matrix = vec![vec![false; n]; n];
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    matrix[u][v] = true;
                    matrix[v][u] = true;
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::new(n, edges).unwrap();
        let cliques: Vec<Vec<usize>> = (0..n)
            .map(|v| {
                let mut c = vec![v];
                c.extend(g.neighbors(v).iter().copied().filter(|&u| u > v).take(1));
                c
            })
            .collect();
        let inst = Instance {
            supergraph: g.clone(),
            graph: g,
            weights: (0..n).map(|_| rng.gen_range(1..=1000)).collect(),
            cliques,
            witness: (),
        };
        let (labels, report) = check_scheme_on_instance(&ExplicitScheme, &inst).unwrap();
        prop_assert!(report.pass, "{:?}", report.first_failure);
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    let a = ExplicitScheme.adjacent(labels.vertex[u].bits(), labels.vertex[v].bits()).unwrap();
                    prop_assert_eq!(a, matrix[u][v]);
                }
            }
        }
    }
}
