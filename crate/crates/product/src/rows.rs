//! Rows of the product: the augmented point set, the per-row vertex sets
//! `V_i`, the loads `δ(w,i)` and the padded multisets `S⁺_i` laid out in
//! interval order.

use std::collections::HashMap;

use crate::intervals::IntervalMap;
use crate::witness::ProductWitness;
use wmls_core::graph_model::Graph;
use wmls_core::mls::LabelError;

/// A point `(v,i)` of `H ⊠ P`: either a vertex of `G⁺` or a dummy copy
/// `(v,i+1)` of a real point `(v,i)` that has nothing above it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Point {
    pub hv: usize,
    /// Row after trimming, in `1..=h`.
    pub row: usize,
    pub weight: u64,
    /// The vertex of `G⁺` at this point, or `None` for dummies.
    pub vertex: Option<usize>,
}

/// The row structure of an instance.
#[derive(Debug, Clone)]
pub struct Rows {
    /// Number of rows after dropping empty leading and trailing rows.
    pub h: usize,
    /// Real points first (point `v` is vertex `v`), then dummies.
    pub points: Vec<Point>,
    pub point_at: HashMap<(usize, usize), usize>,
    /// `V_i` for `i` in `0..=h+1` (rows `0` and `h+1` are empty), sorted by
    /// host vertex.
    pub vertices: Vec<Vec<usize>>,
    /// `δ(w,i)`, parallel to `vertices[i]`.
    pub delta: Vec<Vec<u64>>,
    /// `X_{v,i} = {v} ∪ (V_i ∩ N⁺(v))` for each point, sorted.
    pub x_sets: Vec<Vec<usize>>,
}

impl Rows {
    /// Index of host vertex `v` in `V_i`.
    pub fn slot(&self, row: usize, v: usize) -> Option<usize> {
        self.vertices.get(row)?.binary_search(&v).ok()
    }

    /// Total load `ω(S⁺)` before padding.
    pub fn total_load(&self) -> u64 {
        self.delta.iter().flatten().sum()
    }

    pub fn total_weight(&self) -> u64 {
        self.points.iter().map(|p| p.weight).sum()
    }

    pub fn point(&self, v: usize, row: usize) -> Option<usize> {
        self.point_at.get(&(v, row)).copied()
    }
}

/// Compresses normalised weights so that they sum to at most `2n` while
/// `log(ω(S)/ω(x))` grows by at most one bit.
pub fn compress_weights(weights: &[u64]) -> Vec<u64> {
    let n = weights.len() as u128;
    let total: u128 = weights.iter().map(|&w| w as u128).sum();
    weights
        .iter()
        .map(|&w| ((w as u128 * n).div_ceil(total)) as u64)
        .collect()
}

/// Builds rows, dummies, `X` sets and loads from a validated witness.
///
/// `weights` are the compressed weights of the vertices of `G⁺`.
pub fn build_rows(
    supergraph: &Graph,
    witness: &ProductWitness,
    weights: &[u64],
) -> Result<Rows, LabelError> {
    let n = supergraph.n();
    for (u, v) in supergraph.sorted_edges() {
        let (a, i) = witness.placement[u];
        let (b, j) = witness.placement[v];
        if i.abs_diff(j) > 1 || (a != b && !witness.host.has_edge(a, b)) {
            return Err(LabelError::Witness(format!(
                "edge {u}-{v} joins rows {i} and {j} of non-adjacent host vertices"
            )));
        }
    }
    let first = witness.placement.iter().map(|p| p.1).min().unwrap_or(1);
    let last = witness.placement.iter().map(|p| p.1).max().unwrap_or(0);
    let mut points: Vec<Point> = (0..n)
        .map(|v| Point {
            hv: witness.placement[v].0,
            row: witness.placement[v].1 + 1 - first,
            weight: weights[v],
            vertex: Some(v),
        })
        .collect();
    let h = if n == 0 { 0 } else { last + 1 - first };
    let mut point_at: HashMap<(usize, usize), usize> =
        points.iter().enumerate().map(|(i, p)| ((p.hv, p.row), i)).collect();
    for v in 0..n {
        let p = points[v];
        if p.row < h && !point_at.contains_key(&(p.hv, p.row + 1)) {
            point_at.insert((p.hv, p.row + 1), points.len());
            points.push(Point {
                row: p.row + 1,
                vertex: None,
                ..p
            });
        }
    }
    let mut vertices: Vec<Vec<usize>> = vec![Vec::new(); h + 2];
    for p in &points {
        vertices[p.row].push(p.hv);
        if p.row < h {
            vertices[p.row + 1].push(p.hv);
        }
    }
    for row in &mut vertices {
        row.sort_unstable();
        row.dedup();
    }
    let positions = witness.positions();
    let later = witness.later_neighbours(&positions);
    let mut delta: Vec<Vec<u64>> = vertices.iter().map(|r| vec![0; r.len()]).collect();
    let mut x_sets = Vec::with_capacity(points.len());
    for p in &points {
        let row = &vertices[p.row];
        let mut x: Vec<usize> = later[p.hv]
            .iter()
            .copied()
            .filter(|w| row.binary_search(w).is_ok())
            .collect();
        x.push(p.hv);
        x.sort_unstable();
        for &w in &x {
            let s = row.binary_search(&w).expect("X ⊆ V_i");
            delta[p.row][s] += p.weight;
            if let Ok(s) = vertices[p.row - 1].binary_search(&w) {
                delta[p.row - 1][s] += p.weight;
            }
        }
        if p.row < h {
            let s = vertices[p.row + 1].binary_search(&p.hv).expect("point below");
            delta[p.row + 1][s] += p.weight;
        }
        x_sets.push(x);
    }
    let rows = Rows {
        h,
        points,
        point_at,
        vertices,
        delta,
        x_sets,
    };
    let bound = (2 * witness.k as u128 + 3) * rows.total_weight() as u128;
    if rows.total_load() as u128 > bound {
        return Err(LabelError::Bound(format!(
            "total load {} exceeds (2k+3)·ω = {bound}",
            rows.total_load()
        )));
    }
    Ok(rows)
}

/// Least `t ≥ m` with `t_i ≥ ⌈t_{i±1}/2⌉`, so consecutive row sizes differ
/// by at most a factor of two.
pub fn smooth_rows(m: &[u64]) -> Vec<u64> {
    let mut t = m.to_vec();
    for i in 1..t.len() {
        t[i] = t[i].max(t[i - 1].div_ceil(2));
    }
    for i in (0..t.len().saturating_sub(1)).rev() {
        t[i] = t[i].max(t[i + 1].div_ceil(2));
    }
    t
}

/// The padded multiset `S⁺_i` of one row: the copies of each `w ∈ V_i` form
/// a contiguous block, blocks ordered by `(x_f(w), w)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowLayout {
    /// Indices into `V_i` in leaf order.
    pub order: Vec<usize>,
    /// Scaled positions `x_f(w)` in leaf order.
    pub keys: Vec<(u128, usize)>,
    /// First leaf of each block, in leaf order, plus the total at the end.
    pub starts: Vec<usize>,
    pub total: usize,
}

impl RowLayout {
    /// Lays out row `i` with `t` leaves; the `t − Σδ` pad copies are spread
    /// over the blocks in proportion to their loads.
    pub fn new(rows: &Rows, map: &IntervalMap, row: usize, t: u64) -> RowLayout {
        let vs = &rows.vertices[row];
        let ds = &rows.delta[row];
        let mut order: Vec<usize> = (0..vs.len()).collect();
        order.sort_by_key(|&s| (map.position(vs[s]), vs[s]));
        let m: u64 = ds.iter().sum();
        let mut starts = Vec::with_capacity(order.len() + 1);
        if m > 0 {
            let pad = t - m;
            let mut extra: Vec<u64> = order
                .iter()
                .map(|&s| ((pad as u128 * ds[s] as u128) / m as u128) as u64)
                .collect();
            let rest = pad - extra.iter().sum::<u64>();
            for e in extra.iter_mut().take(rest as usize) {
                *e += 1;
            }
            let mut acc = 0usize;
            for (i, &s) in order.iter().enumerate() {
                starts.push(acc);
                acc += (ds[s] + extra[i]) as usize;
            }
        }
        starts.push(t as usize);
        RowLayout {
            keys: order.iter().map(|&s| (map.position(vs[s]), vs[s])).collect(),
            order,
            starts,
            total: t as usize,
        }
    }

    /// Leaves `f(v) ∩ S⁺_i` as a half-open range.
    pub fn range(&self, map: &IntervalMap, v: usize) -> (usize, usize) {
        let (lo, hi) = map.bounds(v);
        let a = self.keys.partition_point(|&(x, _)| x <= lo);
        let b = self.keys.partition_point(|&(x, _)| x < hi);
        (self.starts[a], self.starts[b])
    }

    /// Leaf index in this row of the element with the given key, or of the
    /// first element after it.
    pub fn locate(&self, key: (u128, usize, usize)) -> usize {
        let b = self.keys.partition_point(|&k| k < (key.0, key.1));
        if b < self.keys.len() && self.keys[b] == (key.0, key.1) {
            let len = self.starts[b + 1] - self.starts[b];
            self.starts[b] + key.2.min(len)
        } else {
            self.starts[b]
        }
    }

    /// Key `(x_f(w), w, copy)` of a leaf.
    pub fn key(&self, leaf: usize) -> (u128, usize, usize) {
        let b = self.starts.partition_point(|&s| s <= leaf) - 1;
        let (x, w) = self.keys[b];
        (x, w, leaf - self.starts[b])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn smoothing_examples() {
        assert_eq!(smooth_rows(&[16, 1, 1, 1]), vec![16, 8, 4, 2]);
        assert_eq!(smooth_rows(&[5, 5, 5]), vec![5, 5, 5]);
        assert_eq!(smooth_rows(&[1, 1, 9]), vec![3, 5, 9]);
    }

    /// The least fixpoint by naive iteration.
    fn smooth_oracle(m: &[u64]) -> Vec<u64> {
        let mut t = m.to_vec();
        loop {
            let mut changed = false;
            for i in 0..t.len() {
                let mut need = m[i];
                if i > 0 {
                    need = need.max(t[i - 1].div_ceil(2));
                }
                if i + 1 < t.len() {
                    need = need.max(t[i + 1].div_ceil(2));
                }
                if need > t[i] {
                    t[i] = need;
                    changed = true;
                }
            }
            if !changed {
                return t;
            }
        }
    }

    proptest! {
        #[test]
        fn smoothing_matches_fixpoint(m in prop::collection::vec(1u64..10_000, 0..30)) {
            let t = smooth_rows(&m);
            prop_assert_eq!(&t, &smooth_oracle(&m));
            let sum_m: u64 = m.iter().sum();
            prop_assert!(t.iter().sum::<u64>() <= 3 * sum_m);
        }

        #[test]
        fn compressed_weights_sum_to_at_most_2n(w in prop::collection::vec(1u64..1_000_000, 1..50)) {
            let c = compress_weights(&w);
            let n = w.len() as u64;
            prop_assert!(c.iter().all(|&x| x >= 1));
            prop_assert!(c.iter().sum::<u64>() <= 2 * n);
            let total: f64 = w.iter().map(|&x| x as f64).sum();
            let ctotal: f64 = c.iter().map(|&x| x as f64).sum();
            for (a, b) in w.iter().zip(&c) {
                let before = (total / *a as f64).log2();
                let after = (ctotal / *b as f64).log2();
                prop_assert!(after <= before + 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn dummies_and_loads_on_a_small_product() {
        // Host: an edge 0-1 (0 eliminated first); two rows, vertices at
        // (0,1), (1,1), (0,2).
        let w = ProductWitness {
            k: 1,
            h: 3,
            host: Graph::new(2, vec![(0, 1)]).unwrap(),
            elim_order: vec![0, 1],
            placement: vec![(0, 2), (1, 2), (0, 3)],
        };
        let g = Graph::new(3, vec![(0, 1), (0, 2), (1, 2)]).unwrap();
        let rows = build_rows(&g, &w, &[1, 1, 1]).unwrap();
        assert_eq!(rows.h, 2);
        // (1,1) gets a dummy (1,2); (0,2) is real.
        assert_eq!(rows.points.len(), 4);
        assert_eq!(rows.points[3], Point { hv: 1, row: 2, weight: 1, vertex: None });
        assert_eq!(rows.vertices[1], vec![0, 1]);
        assert_eq!(rows.vertices[2], vec![0, 1]);
        // X_{0,1} = {0,1}, X_{1,1} = {1}, X_{0,2} = {0,1}, X_{1,2} = {1}.
        assert_eq!(rows.x_sets, vec![vec![0, 1], vec![1], vec![0, 1], vec![1]]);
        // δ(0,1) = ω(0,1) + ω(0,2) = 2; δ(1,1) = 1 + 1 + 1 + 1 = 4;
        // δ(0,2) = ω(0,2) + ω(0,1) = 2; δ(1,2) = 1 + 1 + ω(1,1) = 3.
        assert_eq!(rows.delta[1], vec![2, 4]);
        assert_eq!(rows.delta[2], vec![2, 3]);
        assert!(rows.total_load() <= 5 * rows.total_weight());
    }

    #[test]
    fn rows_far_apart_are_rejected() {
        let w = ProductWitness {
            k: 0,
            h: 3,
            host: Graph::new(1, vec![]).unwrap(),
            elim_order: vec![0],
            placement: vec![(0, 1), (0, 3)],
        };
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        assert!(matches!(build_rows(&g, &w, &[1, 1]), Err(LabelError::Witness(_))));
    }
}
