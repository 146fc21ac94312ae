//! Semi-balanced B-trees over the leaves of one row.
//!
//! A tree of height `H` over `N` leaves is stored as the group boundaries of
//! each level: the nodes at level `η` partition the leaves into contiguous
//! groups whose sizes lie in `[⌈a^η/2⌉, 6a^η]` (the root is exempt from the
//! lower bound), and every level refines the one above it.  Hence every node
//! has fewer than `12a` children and a child index fits in
//! `⌈log₂(12a)⌉` bits.
//!
//! Trees of consecutive rows are built so that the second keeps as many
//! boundaries of the first as possible, which keeps the signature of a
//! vertex stable from one row to the next.

/// Branching parameter `a = 2^s` for `N` leaves in total:
/// `s = max(3, ⌈√log₂ N⌉)`.
pub fn branching_exponent(total_leaves: u64) -> u32 {
    let lg = (total_leaves.max(2) as f64).log2();
    (lg.sqrt().ceil() as u32).max(3)
}

/// Bits per signature entry for branching `a = 2^s`: `⌈log₂(12a)⌉ = s + 4`.
pub fn entry_width(s: u32) -> usize {
    s as usize + 4
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowTree {
    pub leaves: usize,
    pub a: usize,
    pub height: usize,
    /// `levels[η]` lists the first leaf of each node at level `η` for
    /// `1 ≤ η ≤ height`; `levels[0]` is unused (leaves are their own nodes).
    levels: Vec<Vec<usize>>,
}

impl RowTree {
    /// Builds a tree over `leaves ≥ 1` leaves.  `preferred` gives candidate
    /// boundaries per level (typically mapped from the previous row's tree)
    /// and `previous_height` the height to keep if it is still admissible.
    pub fn build(
        leaves: usize,
        a: usize,
        preferred: &[Vec<usize>],
        previous_height: Option<usize>,
    ) -> RowTree {
        assert!(leaves >= 1 && a >= 6);
        let height = choose_height(leaves, a, previous_height);
        let mut levels: Vec<Vec<usize>> = vec![Vec::new(); height + 1];
        if height >= 1 {
            levels[height] = vec![0];
        }
        let mut lower: Vec<usize> = (0..leaves).collect();
        let mut unit = 1usize;
        for eta in 1..height {
            unit *= a;
            let empty = Vec::new();
            let pref = preferred.get(eta).unwrap_or(&empty);
            let level = build_level(&lower, leaves, pref, unit, unit.div_ceil(2), 6 * unit);
            levels[eta] = level.clone();
            lower = level;
        }
        RowTree {
            leaves,
            a,
            height,
            levels,
        }
    }

    /// Boundaries of every level (for building the next row's tree).
    pub fn levels(&self) -> &[Vec<usize>] {
        &self.levels
    }

    /// Index of the node at level `eta` containing `leaf`.
    fn node(&self, eta: usize, leaf: usize) -> usize {
        if eta == 0 {
            leaf
        } else {
            self.levels[eta].partition_point(|&s| s <= leaf) - 1
        }
    }

    fn node_start(&self, eta: usize, node: usize) -> usize {
        if eta == 0 {
            node
        } else {
            self.levels[eta][node]
        }
    }

    /// Child indices on the path from the root to the lowest common ancestor
    /// of the leaves `lo..hi` (non-empty).
    pub fn signature(&self, lo: usize, hi: usize) -> Vec<u32> {
        assert!(lo < hi && hi <= self.leaves);
        let mut sig = Vec::new();
        for eta in (1..=self.height).rev() {
            let child = self.node(eta - 1, lo);
            if child != self.node(eta - 1, hi - 1) {
                break;
            }
            let parent = self.node(eta, lo);
            let first = self.node(eta - 1, self.node_start(eta, parent));
            sig.push((child - first) as u32);
        }
        sig
    }

    /// Largest number of children of a node.
    pub fn max_fanout(&self) -> usize {
        let mut best = if self.height == 0 { 0 } else { 1 };
        for eta in 1..=self.height {
            let lower_count = if eta == 1 {
                self.leaves
            } else {
                self.levels[eta - 1].len()
            };
            let ends: Vec<usize> = self.levels[eta]
                .iter()
                .skip(1)
                .copied()
                .chain(std::iter::once(self.leaves))
                .collect();
            for (i, &start) in self.levels[eta].iter().enumerate() {
                let first = self.node(eta - 1, start);
                let last = if ends[i] == self.leaves {
                    lower_count
                } else {
                    self.node(eta - 1, ends[i])
                };
                best = best.max(last - first);
            }
        }
        best
    }

    /// Checks the height rule, nesting and group sizes.
    pub fn check(&self) -> Result<(), String> {
        if (self.height == 0) != (self.leaves == 1) {
            return Err(format!("height {} for {} leaves", self.height, self.leaves));
        }
        if self.height >= 1 {
            let top = (self.a as u128).pow(self.height as u32);
            if self.leaves as u128 > 6 * top {
                return Err("root is oversized".into());
            }
            if self.levels[self.height] != vec![0] {
                return Err("root level must be a single node".into());
            }
        }
        let mut unit = 1u128;
        for eta in 1..self.height {
            unit *= self.a as u128;
            let level = &self.levels[eta];
            if level.first() != Some(&0) || level.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("level {eta} boundaries are not increasing from 0"));
            }
            if eta > 1 {
                for s in level {
                    if self.levels[eta - 1].binary_search(s).is_err() {
                        return Err(format!("level {eta} does not refine level {}", eta - 1));
                    }
                }
            }
            let ends = level.iter().skip(1).chain(std::iter::once(&self.leaves));
            for (s, e) in level.iter().zip(ends) {
                let size = (e - s) as u128;
                if size < unit.div_ceil(2) || size > 6 * unit {
                    return Err(format!("level {eta} group of size {size}"));
                }
            }
        }
        if self.max_fanout() >= 12 * self.a {
            return Err("fan-out too large".into());
        }
        Ok(())
    }
}

fn choose_height(leaves: usize, a: usize, previous: Option<usize>) -> usize {
    if leaves == 1 {
        return 0;
    }
    let n = leaves as u128;
    let a = a as u128;
    if let Some(h) = previous.filter(|&h| h >= 1) {
        let lower = a.pow(h as u32 - 1);
        if lower <= 2 * n && n <= 6 * a.pow(h as u32) {
            return h;
        }
    }
    let mut h = 1;
    while n > 6 * a.pow(h as u32) {
        h += 1;
    }
    h
}

/// Groups the nodes of the level below (given by their first leaves) into
/// nodes with `lo ≤ size ≤ hi` leaves, cutting at `preferred` boundaries
/// where possible.
fn build_level(
    lower: &[usize],
    leaves: usize,
    preferred: &[usize],
    target: usize,
    lo: usize,
    hi: usize,
) -> Vec<usize> {
    let start = |j: usize| if j == lower.len() { leaves } else { lower[j] };
    let size = |r: (usize, usize)| start(r.1) - start(r.0);
    let split = |r: (usize, usize), out: &mut Vec<(usize, usize)>| {
        let mut from = r.0;
        for j in r.0..r.1 {
            if start(j + 1) - start(from) >= target && j + 1 < r.1 {
                out.push((from, j + 1));
                from = j + 1;
            }
        }
        let last = (from, r.1);
        if size(last) < lo && out.last().is_some_and(|p| p.1 == from && p.0 >= r.0) {
            out.last_mut().unwrap().1 = r.1;
        } else {
            out.push(last);
        }
    };
    let mut cuts: Vec<usize> = preferred
        .iter()
        .filter_map(|s| lower.binary_search(s).ok())
        .collect();
    cuts.push(0);
    cuts.push(lower.len());
    cuts.sort_unstable();
    cuts.dedup();
    let mut pieces = Vec::new();
    for w in cuts.windows(2) {
        let run = (w[0], w[1]);
        if size(run) > hi {
            split(run, &mut pieces);
        } else {
            pieces.push(run);
        }
    }
    let mut out: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < pieces.len() {
        let mut cur = pieces[i];
        i += 1;
        while size(cur) < lo && i < pieces.len() {
            cur.1 = pieces[i].1;
            i += 1;
        }
        if size(cur) < lo {
            if let Some(prev) = out.pop() {
                cur.0 = prev.0;
            }
        }
        if size(cur) > hi {
            split(cur, &mut out);
        } else {
            out.push(cur);
        }
    }
    out.iter().map(|r| start(r.0)).collect()
}

/// Maps a tree's boundaries to another row through a leaf translation,
/// producing the `preferred` argument of [`RowTree::build`].
pub fn carry_boundaries(tree: &RowTree, mut translate: impl FnMut(usize) -> usize) -> Vec<Vec<usize>> {
    tree.levels
        .iter()
        .map(|level| {
            let mut out: Vec<usize> = level.iter().map(|&s| translate(s)).collect();
            out.sort_unstable();
            out.dedup();
            out
        })
        .collect()
}
