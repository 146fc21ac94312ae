//! Nested dyadic intervals for the host graph.
//!
//! Every host vertex `v` gets an open dyadic interval `f(v)` of `(0,1)` and a
//! point `x_f(v)` (its midpoint) such that
//!
//! * (I1) any two intervals are nested or disjoint,
//! * (I2) adjacent vertices have intersecting intervals,
//! * (I3) every point lies in at most `(k+1)·(⌈log_{3/2} n⌉ + 2)` intervals,
//! * (I4) every clique `K` of `H` has a member whose point lies in `f(w)`
//!   for all `w ∈ K` (by (I1) and (I2) the intervals of `K` form a chain),
//!
//! and a colouring `φ` under which intersecting intervals get distinct
//! colours.  The intervals come from recursively splitting the host along
//! bags of its elimination forest.

use crate::witness::ProductWitness;

/// The dyadic interval `(index/2^depth, (index+1)/2^depth)` for each host
/// vertex, with colours `φ ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalMap {
    pub depth: Vec<u32>,
    pub index: Vec<u128>,
    pub colour: Vec<usize>,
    /// All endpoints and midpoints are integers at scale `2^scale`.
    pub scale: u32,
}

impl IntervalMap {
    pub fn len(&self) -> usize {
        self.depth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.depth.is_empty()
    }

    /// Endpoints of `f(v)` at scale `2^scale`.
    pub fn bounds(&self, v: usize) -> (u128, u128) {
        let shift = self.scale - self.depth[v];
        (self.index[v] << shift, (self.index[v] + 1) << shift)
    }

    /// The midpoint `x_f(v)` at scale `2^scale`.
    pub fn position(&self, v: usize) -> u128 {
        let (lo, hi) = self.bounds(v);
        (lo + hi) / 2
    }

    /// Whether the scaled point `x` lies in the open interval `f(v)`.
    pub fn contains(&self, v: usize, x: u128) -> bool {
        let (lo, hi) = self.bounds(v);
        lo < x && x < hi
    }

    /// Whether the open intervals of `u` and `v` intersect.
    pub fn intersects(&self, u: usize, v: usize) -> bool {
        let (a, b) = self.bounds(u);
        let (c, d) = self.bounds(v);
        a < d && c < b
    }

    /// Largest number of intervals containing a common point.
    pub fn max_point_load(&self) -> usize {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&v| (self.bounds(v).0, self.depth[v]));
        let mut stack: Vec<usize> = Vec::new();
        let mut best = 0;
        for v in order {
            while let Some(&top) = stack.last() {
                if self.intersects(top, v) {
                    break;
                }
                stack.pop();
            }
            stack.push(v);
            best = best.max(stack.len());
        }
        best
    }

    /// Largest colour used.
    pub fn colours(&self) -> usize {
        self.colour.iter().copied().max().unwrap_or(0)
    }
}

/// Builds the interval map of the witness's host graph.
pub fn interval_map(witness: &ProductWitness) -> IntervalMap {
    let m = witness.host.n();
    let positions = witness.positions();
    let later = witness.later_neighbours(&positions);
    let mut depth = vec![0u32; m];
    let mut index = vec![0u128; m];
    let mut splitter = Splitter {
        k: witness.k,
        positions: &positions,
        later: &later,
        stamp: vec![0; m],
        generation: 0,
    };
    let mut work = vec![((0..m).collect::<Vec<_>>(), 0u32, 0u128)];
    while let Some((set, d, j)) = work.pop() {
        if set.is_empty() {
            continue;
        }
        let (sep, left, right) = splitter.split(&set);
        for v in sep {
            depth[v] = d;
            index[v] = j;
        }
        work.push((left, d + 1, 2 * j));
        work.push((right, d + 1, 2 * j + 1));
    }
    let max_depth = depth.iter().copied().max().unwrap_or(0);
    assert!(max_depth < 120, "interval recursion too deep");
    let mut map = IntervalMap {
        depth,
        index,
        colour: vec![0; m],
        scale: max_depth + 1,
    };
    map.colour = greedy_colouring(&map);
    map
}

struct Splitter<'a> {
    k: usize,
    positions: &'a [usize],
    later: &'a [Vec<usize>],
    stamp: Vec<u64>,
    generation: u64,
}

impl Splitter<'_> {
    /// Splits `set` into a separator `S` (a bag of the elimination forest of
    /// the induced subgraph, so `|S| ≤ k+1`) and two sides with no edges
    /// between them, each at most half of `set` when possible.
    fn split(&mut self, set: &[usize]) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
        if set.len() <= self.k + 1 {
            return (set.to_vec(), Vec::new(), Vec::new());
        }
        self.generation += 1;
        let g = self.generation;
        for &v in set {
            self.stamp[v] = g;
        }
        let local: std::collections::HashMap<usize, usize> =
            set.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        // Elimination forest of the induced subgraph: the parent of `v` is
        // its earliest later neighbour inside the set.
        let parent: Vec<Option<usize>> = set
            .iter()
            .map(|&v| {
                self.later[v]
                    .iter()
                    .filter(|&&w| self.stamp[w] == g)
                    .min_by_key(|&&w| self.positions[w])
                    .map(|w| local[w])
            })
            .collect();
        let s = set.len();
        let mut children = vec![Vec::new(); s];
        let mut roots = Vec::new();
        for (i, p) in parent.iter().enumerate() {
            match p {
                Some(p) => children[*p].push(i),
                None => roots.push(i),
            }
        }
        // Subtree sizes in post-order (parents come later in the order).
        let mut order: Vec<usize> = (0..s).collect();
        order.sort_by_key(|&i| self.positions[set[i]]);
        let mut size = vec![1usize; s];
        for &i in &order {
            if let Some(p) = parent[i] {
                size[p] += size[i];
            }
        }
        let &root = roots.iter().max_by_key(|&&r| size[r]).expect("non-empty");
        let tree = size[root];
        let mut c = root;
        while let Some(&heavy) = children[c].iter().max_by_key(|&&x| size[x]) {
            if size[heavy] * 2 <= tree {
                break;
            }
            c = heavy;
        }
        let centre = set[c];
        let mut sep = vec![centre];
        sep.extend(self.later[centre].iter().copied().filter(|&w| self.stamp[w] == g));
        for &v in &sep {
            self.stamp[v] = 0;
        }
        // Pieces: the subtrees below the centre, the rest of its tree, and
        // the other trees.  Later neighbours of the centre's descendants
        // outside its subtree lie in the separator, so pieces are mutually
        // non-adjacent.
        let mut piece = vec![usize::MAX; s];
        let mut pieces: Vec<Vec<usize>> = Vec::new();
        for &ch in &children[c] {
            let id = pieces.len();
            pieces.push(Vec::new());
            let mut stack = vec![ch];
            while let Some(x) = stack.pop() {
                piece[x] = id;
                stack.extend(children[x].iter().copied());
            }
        }
        let rest_of_tree = pieces.len();
        pieces.push(Vec::new());
        for &r in &roots {
            let id = if r == root {
                rest_of_tree
            } else {
                pieces.push(Vec::new());
                pieces.len() - 1
            };
            let mut stack = vec![r];
            while let Some(x) = stack.pop() {
                if x == c {
                    continue;
                }
                if piece[x] == usize::MAX {
                    piece[x] = id;
                }
                stack.extend(children[x].iter().copied());
            }
        }
        for (i, &v) in set.iter().enumerate() {
            if self.stamp[v] == g {
                pieces[piece[i]].push(v);
            }
        }
        pieces.retain(|p| !p.is_empty());
        pieces.sort_by_key(|p| std::cmp::Reverse(p.len()));
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for p in pieces {
            if left.len() <= right.len() {
                left.extend(p);
            } else {
                right.extend(p);
            }
        }
        left.sort_unstable();
        right.sort_unstable();
        (sep, left, right)
    }
}

/// Greedy colouring of the intervals in order of left endpoint (longer
/// intervals first); uses at most the maximum point load many colours.
fn greedy_colouring(map: &IntervalMap) -> Vec<usize> {
    let m = map.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&v| (map.bounds(v).0, map.depth[v], v));
    let mut colour = vec![0usize; m];
    let mut stack: Vec<usize> = Vec::new();
    let mut in_use: Vec<bool> = vec![false];
    for v in order {
        while let Some(&top) = stack.last() {
            if map.intersects(top, v) {
                break;
            }
            in_use[colour[top]] = false;
            stack.pop();
        }
        let c = (1..in_use.len()).find(|&c| !in_use[c]).unwrap_or(in_use.len());
        if c == in_use.len() {
            in_use.push(false);
        }
        in_use[c] = true;
        colour[v] = c;
        stack.push(v);
    }
    colour
}
