//! Weighted mixed labelling schemes.
//!
//! A scheme labels the vertices of a graph `G` and a requested family of
//! cliques of a supergraph `G⁺ ⊇ G` with bit strings.  Vertex labels `μ(v)`
//! must let the *adjacency tester* decide whether two vertices are adjacent
//! in `G`, and for every labelled clique `K` and member `u ∈ K` a short
//! *local identifier* `κ(K,u)` must let the *identity tester* recognise `u`
//! from `μ(K)` and any vertex label.  Label lengths are measured against
//! the ideal `log ω(G) − log ω(v)` for a vertex weight function `ω`.
//!
//! Testers see bit strings only.  Composed schemes dispatch on the shape of
//! their labels (part counts and flag bits), never on side information.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{
    bin, frame, push_fixed, read_bin_usize, read_fixed, unframe_exact, BitLabel, CodeError,
};
use crate::graph_model::{total_weight, Graph, GraphError};

/// Errors raised by labellers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("witness does not certify the instance: {0}")]
    Witness(String),
    #[error("internal bound violated: {0}")]
    Bound(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<LabelError>,
    },
}

impl LabelError {
    pub fn context(self, context: impl Into<String>) -> LabelError {
        LabelError::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

/// Errors raised by testers on labels they cannot parse.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TesterError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("malformed label: {0}")]
    Malformed(&'static str),
}

/// A certificate that an instance belongs to a scheme's graph class.
///
/// Classes handled here are hereditary, so every witness can be restricted
/// to an induced subgraph.
pub trait Witness: Clone + Send + Sync {
    /// Witness for the subgraph induced on `keep` (sorted, distinct), where
    /// vertex `keep[i]` becomes vertex `i`.
    fn restrict(&self, keep: &[usize]) -> Self;
}

/// Witnesses of classes closed under disjoint union.
pub trait UnionClosed: Witness {
    /// Witness for a disjoint union on `n` vertices; each part lists its
    /// vertices (sorted) in the combined numbering.
    fn disjoint_union(n: usize, parts: Vec<(Vec<usize>, Self)>) -> Self;
}

impl Witness for () {
    fn restrict(&self, _keep: &[usize]) -> Self {}
}

impl UnionClosed for () {
    fn disjoint_union(_n: usize, _parts: Vec<(Vec<usize>, Self)>) -> Self {}
}

/// A labelling problem: `G ⊆ G⁺`, weights, requested cliques, and a witness.
#[derive(Debug, Clone)]
pub struct Instance<W> {
    pub supergraph: Graph,
    pub graph: Graph,
    pub weights: Vec<u64>,
    /// Requested cliques of `G⁺`, each a sorted list of distinct vertices.
    pub cliques: Vec<Vec<usize>>,
    pub witness: W,
}

impl<W: Witness> Instance<W> {
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Checks the structural preconditions shared by all schemes.
    pub fn validate(&self) -> Result<(), LabelError> {
        let n = self.n();
        if self.supergraph.n() != n {
            return Err(LabelError::InvalidInstance(format!(
                "G has {n} vertices but G+ has {}",
                self.supergraph.n()
            )));
        }
        if !self.graph.is_subgraph_of(&self.supergraph) {
            return Err(LabelError::InvalidInstance(
                "G is not a subgraph of G+".into(),
            ));
        }
        crate::graph_model::validate_weights(n, &self.weights)?;
        for (i, k) in self.cliques.iter().enumerate() {
            if k.is_empty() {
                return Err(LabelError::InvalidInstance(format!("clique {i} is empty")));
            }
            if k.windows(2).any(|w| w[0] >= w[1]) || k.iter().any(|&v| v >= n) {
                return Err(LabelError::InvalidInstance(format!(
                    "clique {i} is not a sorted list of distinct vertices"
                )));
            }
            if !self.supergraph.is_clique(k) {
                return Err(LabelError::InvalidInstance(format!(
                    "requested set {i} is not a clique of G+"
                )));
            }
        }
        Ok(())
    }

    /// The instance induced on `keep` (sorted) with the given cliques, which
    /// must already be expressed in the new numbering.
    pub fn restrict(&self, keep: &[usize], cliques: Vec<Vec<usize>>) -> Instance<W> {
        Instance {
            supergraph: self.supergraph.induced(keep),
            graph: self.graph.induced(keep),
            weights: keep.iter().map(|&v| self.weights[v]).collect(),
            cliques,
            witness: self.witness.restrict(keep),
        }
    }

    /// Same instance with weights replaced by their normalised form.
    pub fn normalized(&self) -> Result<Instance<W>, LabelError> {
        let mut out = self.clone();
        if self.n() > 0 {
            out.weights = crate::codes::nice_weights(&self.weights)?;
        }
        Ok(out)
    }
}

/// Vertex labels, clique labels and local identifiers.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MixedLabelling {
    pub vertex: Vec<BitLabel>,
    /// Parallel to the instance's requested cliques.
    pub clique: Vec<BitLabel>,
    /// `local[c][j]` identifies the `j`-th (sorted) member of clique `c`.
    pub local: Vec<Vec<BitLabel>>,
}

impl MixedLabelling {
    /// Labelling with no cliques.
    pub fn vertices_only(vertex: Vec<BitLabel>) -> Self {
        MixedLabelling {
            vertex,
            clique: Vec::new(),
            local: Vec::new(),
        }
    }
}

/// Additive label-length budgets as functions of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    /// Vertex labels: `|μ(v)| ≤ log ω(G) − log ω(v) + g1`.
    pub g1: f64,
    /// Local identifiers: `|κ(K,u)| ≤ g2`.
    pub g2: f64,
    /// Clique labels: `|μ(K)| ≤ log ω(G) − log min ω(K) + g3`.
    pub g3: f64,
}

/// A weighted mixed labelling scheme.
pub trait Scheme: Send + Sync {
    type Witness: Witness;

    fn name(&self) -> String;

    /// Labels an instance.  Weights are positive integers.
    fn label(&self, inst: &Instance<Self::Witness>) -> Result<MixedLabelling, LabelError>;

    /// Adjacency tester: decides `uv ∈ E(G)` from `μ(u)` and `μ(v)`.
    fn adjacent(&self, x: &[bool], y: &[bool]) -> Result<bool, TesterError>;

    /// Identity tester: decides `u = v` from `μ(K)`, `κ(K,u)` and `μ(v)`.
    fn identity(&self, clique: &[bool], kappa: &[bool], v: &[bool]) -> Result<bool, TesterError>;

    /// Configured budgets for instances with `n` vertices.
    fn budget(&self, n: usize) -> Budget;
}

/// Measured label lengths relative to the ideal.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BudgetReport {
    /// Maximum of `|μ(v)| − (log ω(G) − log ω(v))`.
    pub vertex_slack: f64,
    /// Maximum of `|μ(K)| − (log ω(G) − log min ω(K))`.
    pub clique_slack: f64,
    /// Maximum `|κ(K,u)|`.
    pub max_kappa: usize,
    pub max_vertex_label: usize,
    pub mean_vertex_label: f64,
    pub max_clique_label: usize,
}

impl BudgetReport {
    /// Whether the measured slacks fit the budget (plus `extra` on the
    /// vertex and clique budgets).
    pub fn within(&self, budget: &Budget, extra: f64) -> bool {
        self.vertex_slack <= budget.g1 + extra + 1e-9
            && self.clique_slack <= budget.g3 + extra + 1e-9
            && self.max_kappa as f64 <= budget.g2 + 1e-9
    }
}

/// Per-vertex slack `|μ(v)| − (log ω(G) − log ω(v))`.
pub fn vertex_slacks(weights: &[u64], labels: &[BitLabel]) -> Vec<f64> {
    let total = (total_weight(weights) as f64).log2();
    labels
        .iter()
        .zip(weights)
        .map(|(l, &w)| l.len() as f64 - (total - (w as f64).log2()))
        .collect()
}

pub fn budget_report<W: Witness>(inst: &Instance<W>, l: &MixedLabelling) -> BudgetReport {
    let n = inst.n();
    if n == 0 {
        return BudgetReport::default();
    }
    let total = (total_weight(&inst.weights) as f64).log2();
    let vertex_slack = vertex_slacks(&inst.weights, &l.vertex)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let clique_slack = inst
        .cliques
        .iter()
        .zip(&l.clique)
        .map(|(k, label)| {
            let min = k.iter().map(|&v| inst.weights[v]).min().unwrap_or(1);
            label.len() as f64 - (total - (min as f64).log2())
        })
        .fold(f64::NEG_INFINITY, f64::max);
    BudgetReport {
        vertex_slack,
        clique_slack: if inst.cliques.is_empty() {
            0.0
        } else {
            clique_slack
        },
        max_kappa: l.local.iter().flatten().map(|k| k.len()).max().unwrap_or(0),
        max_vertex_label: l.vertex.iter().map(|x| x.len()).max().unwrap_or(0),
        mean_vertex_label: l.vertex.iter().map(|x| x.len()).sum::<usize>() as f64 / n as f64,
        max_clique_label: l.clique.iter().map(|x| x.len()).max().unwrap_or(0),
    }
}

/// Outcome of verifying a labelling against an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub pass: bool,
    pub adjacency_checks: u64,
    pub identity_checks: u64,
    pub adjacency_failures: u64,
    pub identity_failures: u64,
    pub decode_errors: u64,
    /// Vertex labels equal to another vertex label or to a clique label.
    pub injectivity_failures: u64,
    /// Distinct cliques sharing a label; reported, not a failure.
    pub clique_label_collisions: u64,
    pub first_failure: Option<String>,
    pub budget: BudgetReport,
}

impl CheckReport {
    fn new(budget: BudgetReport) -> Self {
        CheckReport {
            pass: true,
            adjacency_checks: 0,
            identity_checks: 0,
            adjacency_failures: 0,
            identity_failures: 0,
            decode_errors: 0,
            injectivity_failures: 0,
            clique_label_collisions: 0,
            first_failure: None,
            budget,
        }
    }

    fn fail(&mut self, what: impl FnOnce() -> String) {
        self.pass = false;
        if self.first_failure.is_none() {
            self.first_failure = Some(what());
        }
    }

    fn record(&mut self, expected: bool, got: Result<bool, TesterError>, what: impl FnOnce() -> String) -> bool {
        match got {
            Ok(b) if b == expected => true,
            Ok(b) => {
                self.fail(|| format!("{}: expected {expected}, got {b}", what()));
                false
            }
            Err(e) => {
                self.decode_errors += 1;
                self.fail(|| format!("{}: {e}", what()));
                false
            }
        }
    }
}

/// Labels the instance and verifies the result exhaustively.
pub fn check_scheme_on_instance<S: Scheme + ?Sized>(
    scheme: &S,
    inst: &Instance<S::Witness>,
) -> Result<(MixedLabelling, CheckReport), LabelError> {
    inst.validate()?;
    let labelling = scheme
        .label(inst)
        .map_err(|e| e.context(format!("{} on {} vertices", scheme.name(), inst.n())))?;
    let report = verify_labelling(scheme, inst, &labelling);
    Ok((labelling, report))
}

/// Checks adjacency for every pair (including each vertex with itself),
/// identity for every clique member against every vertex, and injectivity.
pub fn verify_labelling<S: Scheme + ?Sized>(
    scheme: &S,
    inst: &Instance<S::Witness>,
    l: &MixedLabelling,
) -> CheckReport {
    let mut report = CheckReport::new(budget_report(inst, l));
    if !shape_ok(inst, l, &mut report) {
        return report;
    }
    let n = inst.n();
    let g = &inst.graph;
    for u in 0..n {
        for v in u..n {
            report.adjacency_checks += 1;
            let got = scheme.adjacent(&l.vertex[u], &l.vertex[v]);
            if !report.record(g.has_edge(u, v), got, || format!("A({u},{v})")) {
                report.adjacency_failures += 1;
            }
        }
    }
    for (c, k) in inst.cliques.iter().enumerate() {
        for (j, &u) in k.iter().enumerate() {
            for v in 0..n {
                report.identity_checks += 1;
                let got = scheme.identity(&l.clique[c], &l.local[c][j], &l.vertex[v]);
                if !report.record(u == v, got, || format!("I(K{c},{u},{v})")) {
                    report.identity_failures += 1;
                }
            }
        }
    }
    check_injectivity(inst, l, &mut report);
    report
}

/// Checks every condition that involves the label of vertex `v`, with the
/// adjacency tester applied in both argument orders.  Used to detect
/// corrupted labels.
pub fn verify_vertex<S: Scheme + ?Sized>(
    scheme: &S,
    inst: &Instance<S::Witness>,
    l: &MixedLabelling,
    v: usize,
) -> CheckReport {
    let mut report = CheckReport::new(BudgetReport::default());
    if !shape_ok(inst, l, &mut report) {
        return report;
    }
    let g = &inst.graph;
    for w in 0..inst.n() {
        report.adjacency_checks += 2;
        let expected = g.has_edge(v, w);
        if !report.record(expected, scheme.adjacent(&l.vertex[v], &l.vertex[w]), || {
            format!("A({v},{w})")
        }) {
            report.adjacency_failures += 1;
        }
        if !report.record(expected, scheme.adjacent(&l.vertex[w], &l.vertex[v]), || {
            format!("A({w},{v})")
        }) {
            report.adjacency_failures += 1;
        }
    }
    for (c, k) in inst.cliques.iter().enumerate() {
        for (j, &u) in k.iter().enumerate() {
            report.identity_checks += 1;
            let got = scheme.identity(&l.clique[c], &l.local[c][j], &l.vertex[v]);
            if !report.record(u == v, got, || format!("I(K{c},{u},{v})")) {
                report.identity_failures += 1;
            }
        }
    }
    let mine = &l.vertex[v];
    let clash = l
        .vertex
        .iter()
        .enumerate()
        .any(|(w, other)| w != v && other == mine)
        || l.clique.iter().any(|c| c == mine);
    if clash {
        report.injectivity_failures += 1;
        report.fail(|| format!("label of vertex {v} is not unique"));
    }
    report
}

fn shape_ok<W: Witness>(inst: &Instance<W>, l: &MixedLabelling, report: &mut CheckReport) -> bool {
    let ok = l.vertex.len() == inst.n()
        && l.clique.len() == inst.cliques.len()
        && l.local.len() == inst.cliques.len()
        && l.local.iter().zip(&inst.cliques).all(|(ids, k)| ids.len() == k.len());
    if !ok {
        report.fail(|| "labelling does not match the instance shape".into());
    }
    ok
}

fn check_injectivity<W: Witness>(inst: &Instance<W>, l: &MixedLabelling, report: &mut CheckReport) {
    let mut seen: HashSet<&BitLabel> = HashSet::with_capacity(inst.n());
    for (v, label) in l.vertex.iter().enumerate() {
        if !seen.insert(label) {
            report.injectivity_failures += 1;
            report.fail(|| format!("vertex {v} repeats another vertex label"));
        }
    }
    let mut cliques: std::collections::HashMap<&BitLabel, &Vec<usize>> = Default::default();
    for (c, label) in l.clique.iter().enumerate() {
        if seen.contains(label) {
            report.injectivity_failures += 1;
            report.fail(|| format!("clique {c} has the label of a vertex"));
        }
        if let Some(prev) = cliques.insert(label, &inst.cliques[c]) {
            if prev != &inst.cliques[c] {
                report.clique_label_collisions += 1;
            }
        }
    }
}

/// `table[u][v] = [uv ∈ E(g)]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyTable {
    n: usize,
    bits: Vec<bool>,
}

impl AdjacencyTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.n + v]
    }
}

pub fn adjacency_oracle(g: &Graph) -> AdjacencyTable {
    let n = g.n();
    let mut bits = vec![false; n * n];
    for (u, v) in g.sorted_edges() {
        bits[u * n + v] = true;
        bits[v * n + u] = true;
    }
    AdjacencyTable { n, bits }
}

/// Reference scheme for arbitrary graphs: a vertex label lists the vertex id
/// and all neighbour ids in fixed width, a clique label lists the members.
///
/// It is far from length-optimal and serves as an independent base when
/// testing combinators and the verifier.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExplicitScheme;

fn id_width(n: usize) -> usize {
    (usize::BITS - n.saturating_sub(1).leading_zeros()) as usize
}

fn fixed_list(values: impl IntoIterator<Item = usize>, width: usize) -> BitLabel {
    let mut bits = Vec::new();
    for v in values {
        push_fixed(&mut bits, v as u64, width);
    }
    BitLabel::from_bits(bits)
}

fn read_fixed_list(bits: &[bool], width: usize) -> Result<Vec<u64>, TesterError> {
    if width == 0 {
        return if bits.is_empty() {
            Ok(Vec::new())
        } else {
            Err(TesterError::Malformed("list with zero width"))
        };
    }
    if bits.len() % width != 0 {
        return Err(TesterError::Malformed("list length not a multiple of width"));
    }
    bits.chunks(width).map(|c| Ok(read_fixed(c)?)).collect()
}

impl Scheme for ExplicitScheme {
    type Witness = ();

    fn name(&self) -> String {
        "explicit".into()
    }

    fn label(&self, inst: &Instance<()>) -> Result<MixedLabelling, LabelError> {
        let n = inst.n();
        let w = id_width(n).max(1);
        let width = bin(w as u64);
        let vertex = (0..n)
            .map(|v| {
                frame(&[
                    width.clone(),
                    fixed_list([v], w),
                    fixed_list(inst.graph.neighbors(v).iter().copied(), w),
                ])
            })
            .collect();
        let clique = inst
            .cliques
            .iter()
            .map(|k| frame(&[width.clone(), fixed_list(k.iter().copied(), w)]))
            .collect();
        let local = inst
            .cliques
            .iter()
            .map(|k| (0..k.len()).map(|j| bin(j as u64)).collect())
            .collect();
        Ok(MixedLabelling {
            vertex,
            clique,
            local,
        })
    }

    fn adjacent(&self, x: &[bool], y: &[bool]) -> Result<bool, TesterError> {
        let [wx, idx, nbx] = unframe_exact::<3>(x)?;
        let [wy, idy, _] = unframe_exact::<3>(y)?;
        let (wx, wy) = (read_bin_usize(wx)?, read_bin_usize(wy)?);
        let id_y = read_fixed_list(idy, wy)?;
        let _ = read_fixed_list(idx, wx)?;
        match id_y.as_slice() {
            [id] => Ok(read_fixed_list(nbx, wx)?.contains(id)),
            _ => Err(TesterError::Malformed("vertex label without a single id")),
        }
    }

    fn identity(&self, clique: &[bool], kappa: &[bool], v: &[bool]) -> Result<bool, TesterError> {
        let [wk, members] = unframe_exact::<2>(clique)?;
        let [wv, idv, _] = unframe_exact::<3>(v)?;
        let members = read_fixed_list(members, read_bin_usize(wk)?)?;
        let id = read_fixed_list(idv, read_bin_usize(wv)?)?;
        let j = read_bin_usize(kappa)?;
        match (members.get(j), id.as_slice()) {
            (Some(m), [id]) => Ok(m == id),
            _ => Err(TesterError::Malformed("local identifier out of range")),
        }
    }

    fn budget(&self, n: usize) -> Budget {
        let w = id_width(n).max(1) as f64;
        let b = (n as f64 + 4.0) * (w + 8.0);
        Budget {
            g1: b,
            g2: w + 1.0,
            g3: b,
        }
    }
}
