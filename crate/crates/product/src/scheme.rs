//! The product labelling scheme.
//!
//! A vertex `(v,i)` is labelled `μ = ⟨λ₁, λ₂⟩` with
//!
//! * `λ₁ = ⟨ρ(i), π(i), bin(s)⟩`: the row code, the hint recovering
//!   `ρ(i−1)`, and the branching exponent `s` (entries are `s+4` bits);
//! * `λ₂ = ⟨σ⁺(v,i), bin|σ(v,i)|, bin(φ(v)−1), α(v,i), τ(v,i),
//!   bin|σ(v,i+1)|, bin r(v,i), bin r(v,i+1)⟩`.
//!
//! `σ(w,i)` is the B-tree path to the lowest common ancestor of the leaves
//! `f(w) ∩ S⁺_i`, and `σ⁺(v,i)` the longest such path over `X_{v,i}`; all
//! others are prefixes of it, so a vertex of `X_{v,i}` is named inside the
//! label by its path length, its colour `φ` and its rank `r` among vertices
//! of the row sharing both.  `α(v,i)` lists, in that form, the `G`-neighbours
//! of `(v,i)` in rows `i−1` (named in row `i`), `i` (later host vertices
//! only) and `i+1` (named in row `i+1`).  `τ(v,i)` edits `σ⁺(v,i)` into
//! `σ⁺(v,i+1)`.
//!
//! A clique `K` within rows `{i−1, i}` is labelled `⟨λ₁(i), σ⁺(v*,i),
//! α(K)⟩`, where `v*` is the earliest eliminated host vertex of `K` and
//! `α(K)` names its members in row `i`; `κ(K,u)` is the position of `u` in
//! `α(K)`.

use std::collections::HashMap;

use crate::btree::{branching_exponent, carry_boundaries, entry_width, RowTree};
use crate::intervals::{interval_map, IntervalMap};
use crate::rows::{build_rows, compress_weights, smooth_rows, RowLayout, Rows};
use crate::witness::ProductWitness;
use serde::{Deserialize, Serialize};
use wmls_core::codes::{
    bin, frame, lgg, nice_weights, predecessor_word, push_fixed, push_gamma, read_bin,
    read_bin_usize, read_fixed, read_gamma, unframe_exact, AlphabeticCode, BitLabel,
};
use wmls_core::mls::{Budget, Instance, LabelError, MixedLabelling, Scheme, TesterError};

/// Constants of the product scheme's budgets:
/// `g₁ = g₃ = c1·(√lg n + k·lg(k·lg n)) + c2` and `g₂ = c3·lg(k·lg n)`.
/// The defaults cover the measured slack of instances with `k ≤ 5` and up
/// to 2¹⁶ vertices; the frame headers alone cost about 90 bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductBudget {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl Default for ProductBudget {
    fn default() -> Self {
        ProductBudget {
            c1: 24.0,
            c2: 96.0,
            c3: 1.0,
        }
    }
}

impl ProductBudget {
    pub fn budget(&self, k: usize, n: usize) -> Budget {
        let lg = lgg(n as f64);
        let kl = lgg(k.max(1) as f64 * lg);
        let g = self.c1 * (lg.sqrt() + k.max(1) as f64 * kl) + self.c2;
        Budget {
            g1: g,
            g2: self.c3 * kl + 1.0,
            g3: g,
        }
    }
}

/// The labelling scheme for subgraphs of `H ⊠ P` with `tw(H) ≤ k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductScheme {
    pub k: usize,
    pub constants: ProductBudget,
}

impl ProductScheme {
    pub fn new(k: usize) -> Self {
        ProductScheme {
            k,
            constants: ProductBudget::default(),
        }
    }
}

/// Everything the labeller derives before encoding.
#[derive(Debug, Clone)]
pub struct ProductStructure {
    pub map: IntervalMap,
    pub rows: Rows,
    /// Smoothed row sizes `t_i = |S⁺_i|`, index `i−1`.
    pub sizes: Vec<u64>,
    /// Branching exponent: `a = 2^s`.
    pub s: u32,
    pub layouts: Vec<RowLayout>,
    pub trees: Vec<RowTree>,
    /// `σ(w,i)` parallel to `rows.vertices[i]` (rows `0` and `h+1` empty).
    pub sigma: Vec<Vec<Vec<u32>>>,
    /// `r(w,i)` parallel to `rows.vertices[i]`.
    pub rank: Vec<Vec<u64>>,
    /// `σ⁺` of every point.
    pub sigma_plus: Vec<Vec<u32>>,
    pub code: AlphabeticCode,
}

impl ProductStructure {
    pub fn width(&self) -> usize {
        entry_width(self.s)
    }

    /// `σ(w,i)` for `w ∈ V_i`.
    pub fn sig(&self, w: usize, row: usize) -> &[u32] {
        &self.sigma[row][self.rows.slot(row, w).expect("w ∈ V_i")]
    }

    fn name(&self, w: usize, row: usize) -> Entry {
        let slot = self.rows.slot(row, w).expect("w ∈ V_i");
        Entry {
            depth: self.sigma[row][slot].len() as u64,
            colour: self.map.colour[w] as u64 - 1,
            rank: self.rank[row][slot],
        }
    }
}

/// Builds intervals, rows, trees and signatures for a validated instance.
pub fn build_structure(inst: &Instance<ProductWitness>) -> Result<ProductStructure, LabelError> {
    let witness = &inst.witness;
    witness
        .validate(Some(&inst.supergraph))
        .map_err(LabelError::Witness)?;
    let weights = compress_weights(&nice_weights(&inst.weights)?);
    let map = interval_map(witness);
    let rows = build_rows(&inst.supergraph, witness, &weights)?;
    let h = rows.h;
    let loads: Vec<u64> = (1..=h).map(|i| rows.delta[i].iter().sum::<u64>().max(1)).collect();
    let sizes = smooth_rows(&loads);
    let total: u64 = sizes.iter().sum();
    let s = branching_exponent(total);
    let a = 1usize << s;
    let layouts: Vec<RowLayout> = (0..=h + 1)
        .map(|i| {
            let t = if i == 0 || i > h { 0 } else { sizes[i - 1] };
            RowLayout::new(&rows, &map, i, t)
        })
        .collect();
    let mut trees: Vec<RowTree> = vec![RowTree::build(1, a, &[], None)];
    for i in 1..=h {
        let prev = &trees[i - 1];
        let (pref, prev_height) = if i > 1 && !rows.vertices[i - 1].is_empty() && !rows.vertices[i].is_empty() {
            let (old, new) = (&layouts[i - 1], &layouts[i]);
            (
                carry_boundaries(prev, |x| new.locate(old.key(x))),
                Some(prev.height),
            )
        } else {
            (Vec::new(), None)
        };
        trees.push(RowTree::build(layouts[i].total, a, &pref, prev_height));
    }
    let mut sigma: Vec<Vec<Vec<u32>>> = vec![Vec::new(); h + 2];
    let mut rank: Vec<Vec<u64>> = vec![Vec::new(); h + 2];
    for i in 1..=h {
        let vs = &rows.vertices[i];
        let mut ranges = Vec::with_capacity(vs.len());
        for &w in vs {
            let (lo, hi) = layouts[i].range(&map, w);
            ranges.push(lo);
            sigma[i].push(trees[i].signature(lo, hi));
        }
        let mut groups: HashMap<(&[u32], usize), Vec<(usize, usize)>> = HashMap::new();
        for (slot, &w) in vs.iter().enumerate() {
            groups
                .entry((&sigma[i][slot], map.colour[w]))
                .or_default()
                .push((ranges[slot], w));
        }
        let mut r = vec![0u64; vs.len()];
        for mut members in groups.into_values() {
            members.sort_unstable();
            for (j, &(_, w)) in members.iter().enumerate() {
                r[vs.binary_search(&w).unwrap()] = j as u64;
            }
        }
        rank[i] = r;
    }
    let mut sigma_plus = Vec::with_capacity(rows.points.len());
    for (p, point) in rows.points.iter().enumerate() {
        let row = point.row;
        let longest = rows.x_sets[p]
            .iter()
            .map(|&w| &sigma[row][rows.slot(row, w).unwrap()])
            .max_by_key(|s| s.len())
            .expect("X contains v")
            .clone();
        for &w in &rows.x_sets[p] {
            let sw = &sigma[row][rows.slot(row, w).unwrap()];
            if !longest.starts_with(sw) {
                return Err(LabelError::Bound(format!(
                    "signature of host vertex {w} in row {row} is not a prefix of σ⁺"
                )));
            }
        }
        sigma_plus.push(longest);
    }
    let code = AlphabeticCode::new(&sizes)?;
    Ok(ProductStructure {
        map,
        rows,
        sizes,
        s,
        layouts,
        trees,
        sigma,
        rank,
        sigma_plus,
        code,
    })
}

/// How a vertex is named inside another label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Entry {
    depth: u64,
    colour: u64,
    rank: u64,
}

fn push_entries(out: &mut Vec<bool>, entries: &[Entry]) {
    push_gamma(out, entries.len() as u64);
    for e in entries {
        push_gamma(out, e.depth);
        push_gamma(out, e.colour);
        push_gamma(out, e.rank);
    }
}

fn read_entries(bits: &[bool], pos: &mut usize) -> Result<Vec<Entry>, TesterError> {
    let count = read_gamma(bits, pos)?;
    if count as usize > bits.len() {
        return Err(TesterError::Malformed("entry count exceeds label"));
    }
    (0..count)
        .map(|_| {
            Ok(Entry {
                depth: read_gamma(bits, pos)?,
                colour: read_gamma(bits, pos)?,
                rank: read_gamma(bits, pos)?,
            })
        })
        .collect()
}

fn encode_path(path: &[u32], width: usize) -> BitLabel {
    let mut out = Vec::with_capacity(path.len() * width);
    for &x in path {
        push_fixed(&mut out, x as u64, width);
    }
    BitLabel::from_bits(out)
}

fn decode_path(bits: &[bool], width: usize) -> Result<Vec<u32>, TesterError> {
    if bits.len() % width != 0 {
        return Err(TesterError::Malformed("path length is not a multiple of the entry width"));
    }
    bits.chunks(width)
        .map(|c| Ok(read_fixed(c)? as u32))
        .collect()
}

/// `τ`: keep a prefix of `p` entries, delete the next `del`, insert `ins`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splice {
    pub keep: usize,
    pub delete: usize,
    pub insert: Vec<u32>,
}

impl Splice {
    /// The shortest splice turning `from` into `to`: the longest common
    /// prefix and then the longest common suffix are kept.
    pub fn between(from: &[u32], to: &[u32]) -> Splice {
        let keep = from.iter().zip(to).take_while(|(a, b)| a == b).count();
        let room = from.len().min(to.len()) - keep;
        let tail = from
            .iter()
            .rev()
            .zip(to.iter().rev())
            .take(room)
            .take_while(|(a, b)| a == b)
            .count();
        Splice {
            keep,
            delete: from.len() - keep - tail,
            insert: to[keep..to.len() - tail].to_vec(),
        }
    }

    /// `J(σ, τ)`; `None` if the splice does not fit.
    pub fn apply(&self, from: &[u32]) -> Option<Vec<u32>> {
        let cut = self.keep.checked_add(self.delete)?;
        if cut > from.len() {
            return None;
        }
        let mut out = from[..self.keep].to_vec();
        out.extend_from_slice(&self.insert);
        out.extend_from_slice(&from[cut..]);
        Some(out)
    }

    fn encode(&self, width: usize) -> BitLabel {
        frame(&[
            bin(self.keep as u64),
            bin(self.delete as u64),
            encode_path(&self.insert, width),
        ])
    }

    fn decode(bits: &[bool], width: usize) -> Result<Splice, TesterError> {
        let [keep, delete, insert] = unframe_exact::<3>(bits)?;
        Ok(Splice {
            keep: read_bin_usize(keep)?,
            delete: read_bin_usize(delete)?,
            insert: decode_path(insert, width)?,
        })
    }
}

fn row_code(structure: &ProductStructure, row: usize) -> BitLabel {
    frame(&[
        structure.code.word(row - 1).clone(),
        structure.code.predecessor_hint(row - 1),
        bin(structure.s as u64),
    ])
}

impl Scheme for ProductScheme {
    type Witness = ProductWitness;

    fn name(&self) -> String {
        format!("product(k={})", self.k)
    }

    fn label(&self, inst: &Instance<ProductWitness>) -> Result<MixedLabelling, LabelError> {
        inst.validate()?;
        if inst.witness.k > self.k {
            return Err(LabelError::Witness(format!(
                "witness has width {} but the scheme is for k = {}",
                inst.witness.k, self.k
            )));
        }
        if inst.witness.placement.len() != inst.n() {
            return Err(LabelError::Witness("placement does not cover the graph".into()));
        }
        if inst.n() == 0 {
            return Ok(MixedLabelling::default());
        }
        let st = build_structure(inst)?;
        let width = st.width();
        let rows = &st.rows;
        let positions = inst.witness.positions();
        let later = inst.witness.later_neighbours(&positions);
        let row_codes: Vec<BitLabel> = (0..=rows.h)
            .map(|i| if i == 0 { BitLabel::new() } else { row_code(&st, i) })
            .collect();

        let mut vertex = Vec::with_capacity(inst.n());
        for v in 0..inst.n() {
            let p = rows.points[v];
            let (hv, i) = (p.hv, p.row);
            let near = |w: usize| w == hv || later[hv].binary_search(&w).is_ok();
            let mut lists: [Vec<(usize, Entry)>; 3] = Default::default();
            for &u in inst.graph.neighbors(v) {
                let q = rows.points[u];
                if q.row + 1 == i && near(q.hv) {
                    lists[0].push((q.hv, st.name(q.hv, i)));
                } else if q.row == i && q.hv != hv && near(q.hv) {
                    lists[1].push((q.hv, st.name(q.hv, i)));
                } else if q.row == i + 1 && near(q.hv) {
                    lists[2].push((q.hv, st.name(q.hv, i + 1)));
                }
            }
            let mut alpha = Vec::new();
            for list in &mut lists {
                list.sort_unstable();
                push_entries(&mut alpha, &list.iter().map(|e| e.1).collect::<Vec<_>>());
            }
            let own = st.name(hv, i);
            let sig_plus = &st.sigma_plus[v];
            let (tau, next) = if i < rows.h {
                let up = rows.point(hv, i + 1).expect("point above every non-top point");
                let splice = Splice::between(sig_plus, &st.sigma_plus[up]);
                debug_assert_eq!(splice.apply(sig_plus).as_ref(), Some(&st.sigma_plus[up]));
                let name = st.name(hv, i + 1);
                (splice.encode(width), Some(name))
            } else {
                (BitLabel::new(), None)
            };
            let lambda2 = frame(&[
                encode_path(sig_plus, width),
                bin(own.depth),
                bin(own.colour),
                BitLabel::from_bits(alpha),
                tau,
                next.map_or_else(BitLabel::new, |e| bin(e.depth)),
                bin(own.rank),
                next.map_or_else(BitLabel::new, |e| bin(e.rank)),
            ]);
            vertex.push(frame(&[row_codes[i].clone(), lambda2]));
        }

        let mut clique = Vec::with_capacity(inst.cliques.len());
        let mut local = Vec::with_capacity(inst.cliques.len());
        for (c, members) in inst.cliques.iter().enumerate() {
            let lo = members.iter().map(|&u| rows.points[u].row).min().unwrap();
            let i = members.iter().map(|&u| rows.points[u].row).max().unwrap();
            if i > lo + 1 {
                return Err(LabelError::InvalidInstance(format!(
                    "clique {c} is not within two consecutive rows"
                )));
            }
            let star = members
                .iter()
                .map(|&u| rows.points[u].hv)
                .min_by_key(|&w| positions[w])
                .unwrap();
            let anchor = rows.point(star, i).ok_or_else(|| {
                LabelError::Bound(format!("clique {c}: no point above its first host vertex"))
            })?;
            let mut lists: [Vec<(usize, usize)>; 2] = Default::default();
            for (j, &u) in members.iter().enumerate() {
                let q = rows.points[u];
                if q.hv != star && later[star].binary_search(&q.hv).is_err() {
                    return Err(LabelError::InvalidInstance(format!(
                        "clique {c} is not a clique of H ⊠ P"
                    )));
                }
                lists[q.row + 1 - i].push((q.hv, j));
            }
            let mut alpha = Vec::new();
            let mut kappa = vec![BitLabel::new(); members.len()];
            let mut position = 0u64;
            for list in &mut lists {
                list.sort_unstable();
                let entries: Vec<Entry> = list.iter().map(|&(w, _)| st.name(w, i)).collect();
                for &(w, j) in list.iter() {
                    debug_assert!(st.sigma_plus[anchor].starts_with(st.sig(w, i)));
                    kappa[j] = bin(position);
                    position += 1;
                }
                push_entries(&mut alpha, &entries);
            }
            clique.push(frame(&[
                row_codes[i].clone(),
                encode_path(&st.sigma_plus[anchor], width),
                BitLabel::from_bits(alpha),
            ]));
            local.push(kappa);
        }
        Ok(MixedLabelling {
            vertex,
            clique,
            local,
        })
    }

    fn adjacent(&self, x: &[bool], y: &[bool]) -> Result<bool, TesterError> {
        let x = VertexView::decode(x)?;
        let y = VertexView::decode(y)?;
        if x.row.width != y.row.width {
            return Err(TesterError::Malformed("labels use different entry widths"));
        }
        Ok(one_sided(&x, &y)? || one_sided(&y, &x)?)
    }

    fn identity(&self, clique: &[bool], kappa: &[bool], v: &[bool]) -> Result<bool, TesterError> {
        let [row, path, alpha] = unframe_exact::<3>(clique)?;
        let row = RowView::decode(row)?;
        let anchor = decode_path(path, row.width)?;
        let mut pos = 0;
        let below = read_entries(alpha, &mut pos)?;
        let same = read_entries(alpha, &mut pos)?;
        if pos != alpha.len() {
            return Err(TesterError::Malformed("trailing bits in clique entries"));
        }
        let k = read_bin_usize(kappa)?;
        let v = VertexView::decode(v)?;
        if v.row.width != row.width {
            return Err(TesterError::Malformed("labels use different entry widths"));
        }
        if let Some(e) = same.get(k.wrapping_sub(below.len())).filter(|_| k >= below.len()) {
            return Ok(v.row.code == row.code && names(&anchor, e, &v.own_path(), &v.own));
        }
        let Some(e) = below.get(k) else {
            return Err(TesterError::Malformed("local identifier out of range"));
        };
        if row.predecessor()?.as_deref() != Some(v.row.code) {
            return Ok(false);
        }
        Ok(match v.next() {
            Some((path, name)) => names(&anchor, e, &path, &name),
            None => false,
        })
    }

    fn budget(&self, n: usize) -> Budget {
        self.constants.budget(self.k, n)
    }
}

/// Whether entry `e`, read against `holder`, names the vertex whose path in
/// that row is `path[..own.depth]` with colour and rank of `own`.
fn names(holder: &[u32], e: &Entry, path: &[u32], own: &Entry) -> bool {
    let d = e.depth as usize;
    e.depth == own.depth
        && d <= holder.len()
        && d <= path.len()
        && holder[..d] == path[..d]
        && e.colour == own.colour
        && e.rank == own.rank
}

struct RowView<'a> {
    code: &'a [bool],
    hint: &'a [bool],
    width: usize,
}

impl<'a> RowView<'a> {
    fn decode(bits: &'a [bool]) -> Result<Self, TesterError> {
        let [code, hint, s] = unframe_exact::<3>(bits)?;
        let s = read_bin(s)?;
        if s > 40 {
            return Err(TesterError::Malformed("branching exponent too large"));
        }
        Ok(RowView {
            code,
            hint,
            width: entry_width(s as u32),
        })
    }

    /// The row code of the row below.
    fn predecessor(&self) -> Result<Option<BitLabel>, TesterError> {
        Ok(predecessor_word(self.code, self.hint)?)
    }
}

struct VertexView<'a> {
    row: RowView<'a>,
    path: Vec<u32>,
    own: Entry,
    lists: [Vec<Entry>; 3],
    tau: Option<Splice>,
    next: Option<Entry>,
}

impl<'a> VertexView<'a> {
    fn decode(bits: &'a [bool]) -> Result<Self, TesterError> {
        let [row, rest] = unframe_exact::<2>(bits)?;
        let row = RowView::decode(row)?;
        let [path, depth, colour, alpha, tau, next_depth, rank, next_rank] =
            unframe_exact::<8>(rest)?;
        let path = decode_path(path, row.width)?;
        let mut pos = 0;
        let lists = [
            read_entries(alpha, &mut pos)?,
            read_entries(alpha, &mut pos)?,
            read_entries(alpha, &mut pos)?,
        ];
        if pos != alpha.len() {
            return Err(TesterError::Malformed("trailing bits in adjacency entries"));
        }
        let colour = read_bin(colour)?;
        let (tau, next) = if tau.is_empty() {
            (None, None)
        } else {
            (
                Some(Splice::decode(tau, row.width)?),
                Some(Entry {
                    depth: read_bin(next_depth)?,
                    colour,
                    rank: read_bin(next_rank)?,
                }),
            )
        };
        Ok(VertexView {
            row,
            path,
            own: Entry {
                depth: read_bin(depth)?,
                colour,
                rank: read_bin(rank)?,
            },
            lists,
            tau,
            next,
        })
    }

    fn own_path(&self) -> Vec<u32> {
        self.path.clone()
    }

    /// `σ⁺(v,i+1)` and the name of `v` in row `i+1`.
    fn next(&self) -> Option<(Vec<u32>, Entry)> {
        Some((self.tau.as_ref()?.apply(&self.path)?, self.next?))
    }
}

/// Whether `x` lists `y` among its neighbours.
fn one_sided(x: &VertexView, y: &VertexView) -> Result<bool, TesterError> {
    if x.row.code == y.row.code {
        return Ok(x.lists[1].iter().any(|e| names(&x.path, e, &y.path, &y.own)));
    }
    if x.row.predecessor()?.as_deref() == Some(y.row.code) {
        return Ok(match y.next() {
            Some((path, name)) => x.lists[0].iter().any(|e| names(&x.path, e, &path, &name)),
            None => false,
        });
    }
    if y.row.predecessor()?.as_deref() == Some(x.row.code) {
        return Ok(match x.tau.as_ref().and_then(|t| t.apply(&x.path)) {
            Some(holder) => x.lists[2].iter().any(|e| names(&holder, e, &y.path, &y.own)),
            None => false,
        });
    }
    Ok(false)
}
