//! Graphs, weights and rooted forest-decompositions.
//!
//! Vertices are dense integers `0..n`.  A [`Decomposition`] is a rooted forest
//! whose nodes carry bags of vertices; nodes are dense integers as well.  The
//! serialised forms keep edges and bags in the order they were given so that
//! JSON round-trips byte for byte, while sorted copies back the algorithms.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised when building graphs or decompositions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("edge endpoint {0} is not below n = {1}")]
    EndpointOutOfRange(usize, usize),
    #[error("expected {expected} weights, found {found}")]
    WeightCount { expected: usize, found: usize },
    #[error("weight of vertex {0} is not positive")]
    NonPositiveWeight(usize),
    #[error("decomposition has {parents} parent entries but {bags} bags (nodes = {nodes})")]
    NodeCount {
        nodes: usize,
        parents: usize,
        bags: usize,
    },
    #[error("parent {parent} of node {node} is not a node")]
    ParentOutOfRange { node: usize, parent: usize },
    #[error("parent map contains a cycle through node {0}")]
    ParentCycle(usize),
    #[error("bag of node {node} lists vertex {vertex} twice")]
    DuplicateBagVertex { node: usize, vertex: usize },
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error("malformed JSON: {0}")]
    Json(String),
}

/// A finite simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    names: Option<Vec<String>>,
}

impl PartialEq for Graph {
    /// Graphs are equal when they have the same vertex count and edge set.
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.adj == other.adj
    }
}

impl Eq for Graph {}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicates and bad endpoints.
    /// Edges keep their given order and orientation for serialisation.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            if u >= n {
                return Err(GraphError::EndpointOutOfRange(u, n));
            }
            if v >= n {
                return Err(GraphError::EndpointOutOfRange(v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(u.min(w[0]), u.max(w[0])));
            }
        }
        Ok(Graph {
            n,
            edges,
            adj,
            names: None,
        })
    }

    /// Builds a graph from edges that may repeat; duplicates are merged and
    /// the stored edge list is sorted.
    pub fn from_edge_iter<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut list: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        list.sort_unstable();
        list.dedup();
        Graph::new(n, list)
    }

    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
            names: None,
        }
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.n, "one name per vertex");
        self.names = Some(names);
        self
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in their stored order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Edges as sorted pairs `u < v`, in lexicographic order.
    pub fn sorted_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Sorted neighbourhood of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Whether the sorted or unsorted vertex list is a clique.
    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(i, &u)| {
            vertices[i + 1..]
                .iter()
                .all(|&v| u != v && self.has_edge(u, v))
        })
    }

    /// Whether every edge of `self` is an edge of `other` (same vertex set).
    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n == other.n && self.sorted_edges().all(|(u, v)| other.has_edge(u, v))
    }

    /// Induced subgraph on `keep` (sorted, distinct); vertex `keep[i]`
    /// becomes `i`.
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let index = index_map(self.n, keep);
        let mut edges = Vec::new();
        for (i, &u) in keep.iter().enumerate() {
            for &v in &self.adj[u] {
                if let Some(j) = index[v] {
                    if i < j {
                        edges.push((i, j));
                    }
                }
            }
        }
        edges.sort_unstable();
        Graph::new(keep.len(), edges).expect("induced subgraph of a simple graph is simple")
    }

    /// Union of two graphs on the same vertex set.
    pub fn union(&self, other: &Graph) -> Graph {
        assert_eq!(self.n, other.n, "union of graphs on different vertex sets");
        Graph::from_edge_iter(self.n, self.sorted_edges().chain(other.sorted_edges()))
            .expect("union of simple graphs")
    }

    pub fn to_json(&self, weights: Option<&[u64]>) -> GraphJson {
        GraphJson {
            n: self.n,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
            weights: weights.map(<[u64]>::to_vec),
        }
    }
}

/// `index[v] = Some(i)` iff `keep[i] == v`.
pub fn index_map(n: usize, keep: &[usize]) -> Vec<Option<usize>> {
    let mut index = vec![None; n];
    for (i, &v) in keep.iter().enumerate() {
        index[v] = Some(i);
    }
    index
}

/// Serialised graph: `{ "n": int, "edges": [[u,v],...], "weights": [...]? }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<u64>>,
}

impl GraphJson {
    /// Validates and converts; weights, when present, must be positive.
    pub fn into_graph(self) -> Result<(Graph, Option<Vec<u64>>), GraphError> {
        let g = Graph::new(self.n, self.edges.iter().map(|e| (e[0], e[1])).collect())?;
        if let Some(w) = &self.weights {
            validate_weights(self.n, w)?;
        }
        Ok((g, self.weights))
    }
}

/// Checks that there is one positive weight per vertex.
pub fn validate_weights(n: usize, weights: &[u64]) -> Result<(), GraphError> {
    if weights.len() != n {
        return Err(GraphError::WeightCount {
            expected: n,
            found: weights.len(),
        });
    }
    match weights.iter().position(|&w| w == 0) {
        Some(v) => Err(GraphError::NonPositiveWeight(v)),
        None => Ok(()),
    }
}

/// Exact total weight of a vertex subset.
pub fn weight_of(weights: &[u64], vertices: impl IntoIterator<Item = usize>) -> u128 {
    vertices.into_iter().map(|v| weights[v] as u128).sum()
}

/// Exact total weight of all vertices.
pub fn total_weight(weights: &[u64]) -> u128 {
    weights.iter().map(|&w| w as u128).sum()
}

/// Sorted intersection of two sorted lists.
pub fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Whether sorted `a` is a subset of sorted `b`.
pub fn is_subset_sorted(a: &[usize], b: &[usize]) -> bool {
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

/// A rooted forest whose nodes carry bags of vertices.
#[derive(Debug, Clone)]
pub struct Decomposition {
    parent: Vec<Option<usize>>,
    bags: Vec<Vec<usize>>,
    sorted: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
}

impl PartialEq for Decomposition {
    /// Structural equality: same parents and same bag sets.
    fn eq(&self, other: &Self) -> bool {
        self.parent == other.parent && self.sorted == other.sorted
    }
}

impl Eq for Decomposition {}

impl Decomposition {
    /// Builds a decomposition, checking that `parent` describes a forest and
    /// that no bag lists a vertex twice.
    pub fn new(parent: Vec<Option<usize>>, bags: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        let nodes = parent.len();
        if bags.len() != nodes {
            return Err(GraphError::NodeCount {
                nodes,
                parents: nodes,
                bags: bags.len(),
            });
        }
        let mut children = vec![Vec::new(); nodes];
        for (x, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= nodes {
                    return Err(GraphError::ParentOutOfRange { node: x, parent: p });
                }
                children[p].push(x);
            }
        }
        // Depths by walking down from the roots; unreached nodes lie on cycles.
        let mut depth = vec![usize::MAX; nodes];
        let mut queue: VecDeque<usize> = (0..nodes).filter(|&x| parent[x].is_none()).collect();
        for &r in &queue {
            depth[r] = 0;
        }
        while let Some(x) = queue.pop_front() {
            for &c in &children[x] {
                depth[c] = depth[x] + 1;
                queue.push_back(c);
            }
        }
        if let Some(x) = depth.iter().position(|&d| d == usize::MAX) {
            return Err(GraphError::ParentCycle(x));
        }
        let mut sorted = Vec::with_capacity(nodes);
        for (x, bag) in bags.iter().enumerate() {
            let mut s = bag.clone();
            s.sort_unstable();
            if let Some(w) = s.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateBagVertex {
                    node: x,
                    vertex: w[0],
                });
            }
            sorted.push(s);
        }
        Ok(Decomposition {
            parent,
            bags,
            sorted,
            children,
            depth,
        })
    }

    /// The one-node decomposition with a single bag.
    pub fn single(bag: Vec<usize>) -> Self {
        Decomposition::new(vec![None], vec![bag]).expect("one node is a forest")
    }

    pub fn empty() -> Self {
        Decomposition::new(Vec::new(), Vec::new()).expect("empty forest")
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, x: usize) -> Option<usize> {
        self.parent[x]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn children(&self, x: usize) -> &[usize] {
        &self.children[x]
    }

    /// Bag of `x`, sorted.
    pub fn bag(&self, x: usize) -> &[usize] {
        &self.sorted[x]
    }

    /// Bags as given at construction.
    pub fn raw_bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn depth(&self, x: usize) -> usize {
        self.depth[x]
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&x| self.parent[x].is_none())
            .collect()
    }

    /// Maximum node depth; zero for the empty forest.
    pub fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    /// Nodes in breadth-first order from the roots, children in id order.
    pub fn bfs_order(&self) -> Vec<usize> {
        let mut order = self.roots();
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            order.extend_from_slice(&self.children[x]);
            i += 1;
        }
        order
    }

    /// Whether `a` is an ancestor of `b` (every node is its own ancestor).
    pub fn is_ancestor(&self, a: usize, mut b: usize) -> bool {
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].expect("positive depth has a parent");
        }
        a == b
    }

    /// `B_x ∩ B_parent(x)`, empty for roots.
    pub fn adhesion(&self, x: usize) -> Vec<usize> {
        match self.parent[x] {
            Some(p) => intersect_sorted(&self.sorted[x], &self.sorted[p]),
            None => Vec::new(),
        }
    }

    /// Maximum parent-adhesion size over non-root nodes.
    pub fn adhesion_width(&self) -> usize {
        (0..self.node_count())
            .map(|x| self.adhesion(x).len())
            .max()
            .unwrap_or(0)
    }

    /// For each vertex `v < n`, the minimum-depth node whose bag contains it
    /// (ties broken by node id; unique when traces are connected).
    pub fn home_nodes(&self, n: usize) -> Vec<Option<usize>> {
        let mut home: Vec<Option<usize>> = vec![None; n];
        for x in 0..self.node_count() {
            for &v in &self.sorted[x] {
                if v < n {
                    let better = match home[v] {
                        None => true,
                        Some(h) => self.depth[x] < self.depth[h],
                    };
                    if better {
                        home[v] = Some(x);
                    }
                }
            }
        }
        home
    }

    /// The decomposition induced on a node subset (sorted); nodes whose
    /// parent is dropped become roots.  Node `nodes[i]` becomes `i`.
    pub fn subforest(&self, nodes: &[usize]) -> Decomposition {
        let index = index_map(self.node_count(), nodes);
        let parent = nodes
            .iter()
            .map(|&x| self.parent[x].and_then(|p| index[p]))
            .collect();
        let bags = nodes.iter().map(|&x| self.sorted[x].clone()).collect();
        Decomposition::new(parent, bags).expect("subforest of a forest")
    }

    /// Renumbers vertices onto `keep` (sorted): vertex `keep[i]` becomes `i`
    /// and vertices outside `keep` are dropped from every bag.
    pub fn restrict_vertices(&self, n: usize, keep: &[usize]) -> Decomposition {
        let index = index_map(n, keep);
        let bags = self
            .sorted
            .iter()
            .map(|bag| bag.iter().filter_map(|&v| index[v]).collect())
            .collect();
        Decomposition::new(self.parent.clone(), bags).expect("same forest")
    }

    pub fn to_json(&self) -> DecompositionJson {
        DecompositionJson {
            nodes: self.node_count(),
            parent: self.parent.clone(),
            bags: self.bags.clone(),
        }
    }
}

/// Serialised decomposition: `{ "nodes": int, "parent": [...], "bags": [...] }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub nodes: usize,
    pub parent: Vec<Option<usize>>,
    pub bags: Vec<Vec<usize>>,
}

impl DecompositionJson {
    pub fn into_decomposition(self) -> Result<Decomposition, GraphError> {
        if self.parent.len() != self.nodes || self.bags.len() != self.nodes {
            return Err(GraphError::NodeCount {
                nodes: self.nodes,
                parents: self.parent.len(),
                bags: self.bags.len(),
            });
        }
        Decomposition::new(self.parent, self.bags)
    }
}

/// One violated clause of the decomposition definition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    VertexOutOfRange { node: usize, vertex: usize },
    VertexUncovered(usize),
    EdgeUncovered(usize, usize),
    TraceDisconnected(usize),
}

/// Result of [`validate_decomposition`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
    /// Present only for valid decompositions.
    pub adhesion_width: Option<usize>,
    pub height: Option<usize>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks vertex coverage, edge coverage and connectivity of every vertex's
/// trace (the set of nodes whose bags contain it).
pub fn validate_decomposition(g: &Graph, d: &Decomposition) -> ValidityReport {
    let n = g.n();
    let mut violations = Vec::new();
    let mut trace: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut trace_roots = vec![0usize; n];
    for x in 0..d.node_count() {
        for &v in d.bag(x) {
            if v >= n {
                violations.push(Violation::VertexOutOfRange { node: x, vertex: v });
                continue;
            }
            trace[v].push(x);
            let continues_up = d
                .parent(x)
                .is_some_and(|p| d.bag(p).binary_search(&v).is_ok());
            if !continues_up {
                trace_roots[v] += 1;
            }
        }
    }
    for v in 0..n {
        if trace[v].is_empty() {
            violations.push(Violation::VertexUncovered(v));
        } else if trace_roots[v] > 1 {
            violations.push(Violation::TraceDisconnected(v));
        }
    }
    for (u, v) in g.sorted_edges() {
        let (a, b) = if trace[u].len() <= trace[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        if !trace[a].iter().any(|&x| d.bag(x).binary_search(&b).is_ok()) {
            violations.push(Violation::EdgeUncovered(u, v));
        }
    }
    let valid = violations.is_empty();
    ValidityReport {
        violations,
        adhesion_width: valid.then(|| d.adhesion_width()),
        height: valid.then(|| d.height()),
    }
}

/// The torso of a node: the graph induced on its bag plus a clique on every
/// adhesion with a forest neighbour.  Vertex `vertices[i]` is local vertex `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Torso {
    pub vertices: Vec<usize>,
    pub graph: Graph,
}

pub fn torso(g: &Graph, d: &Decomposition, x: usize) -> Result<Torso, GraphError> {
    if x >= d.node_count() {
        return Err(GraphError::UnknownNode(x));
    }
    let vertices = d.bag(x).to_vec();
    let local = |v: usize| vertices.binary_search(&v).expect("adhesion lies in the bag");
    let mut edges: Vec<(usize, usize)> = g.induced(&vertices).sorted_edges().collect();
    let neighbours = d.parent(x).into_iter().chain(d.children(x).iter().copied());
    for y in neighbours {
        let adhesion = intersect_sorted(&vertices, d.bag(y));
        for (i, &u) in adhesion.iter().enumerate() {
            for &v in &adhesion[i + 1..] {
                edges.push((local(u), local(v)));
            }
        }
    }
    let graph = Graph::from_edge_iter(vertices.len(), edges).expect("torso is simple");
    Ok(Torso { vertices, graph })
}

/// Union of all torsos, on the vertex set of `g`.
pub fn torso_supergraph(g: &Graph, d: &Decomposition) -> Graph {
    let mut edges: Vec<(usize, usize)> = g.sorted_edges().collect();
    for x in 0..d.node_count() {
        if let Some(p) = d.parent(x) {
            let adhesion = intersect_sorted(d.bag(x), d.bag(p));
            for (i, &u) in adhesion.iter().enumerate() {
                for &v in &adhesion[i + 1..] {
                    edges.push((u, v));
                }
            }
        }
    }
    Graph::from_edge_iter(g.n(), edges).expect("supergraph is simple")
}

/// Whether the decomposition is tidy: no empty bag, no child bag contained
/// in its parent's bag, and no node whose adhesion with its parent is
/// contained in its parent's adhesion with the grandparent.
pub fn is_tidy(d: &Decomposition) -> bool {
    (0..d.node_count()).all(|z| {
        if d.bag(z).is_empty() {
            return false;
        }
        let Some(y) = d.parent(z) else {
            return true;
        };
        if is_subset_sorted(d.bag(z), d.bag(y)) {
            return false;
        }
        match d.parent(y) {
            Some(x) => {
                let zy = intersect_sorted(d.bag(z), d.bag(y));
                let yx = intersect_sorted(d.bag(y), d.bag(x));
                !is_subset_sorted(&zy, &yx)
            }
            None => true,
        }
    })
}

/// A tidied decomposition; `origin[i]` is the input node that node `i` was.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tidied {
    pub decomposition: Decomposition,
    pub origin: Vec<usize>,
}

/// Makes a decomposition tidy by repeating, until nothing changes:
///
/// 1. remove nodes with empty bags (their children become roots);
/// 2. cut the edge to the parent when a node shares no vertex with it;
/// 3. re-hang a node `z` from its parent `y` to its grandparent `x` when
///    `B_z ∩ B_y ⊆ B_y ∩ B_x`;
/// 4. remove a leaf whose bag is contained in its parent's bag.
///
/// Nodes are processed in breadth-first order from the roots, ties by id.
/// Rule 4 is needed for the "no child bag inside its parent's bag"
/// condition; it can drop the clique on the removed bag from the parent's
/// torso, so result torsos are subgraphs of input torsos, and equal to them
/// whenever rule 4 never fires.
pub fn tidy(d: &Decomposition) -> Tidied {
    let nodes = d.node_count();
    let mut parent: Vec<Option<usize>> = d.parents().to_vec();
    let mut alive = vec![true; nodes];
    let bag = |x: usize| d.bag(x);
    loop {
        let mut changed = false;
        let order = bfs_alive(&parent, &alive);
        // Rule 1.
        for &x in &order {
            if bag(x).is_empty() {
                alive[x] = false;
                for c in 0..nodes {
                    if alive[c] && parent[c] == Some(x) {
                        parent[c] = None;
                    }
                }
                changed = true;
            }
        }
        // Rule 2.
        for &x in &order {
            if let Some(p) = parent[x] {
                if alive[x] && intersect_sorted(bag(x), bag(p)).is_empty() {
                    parent[x] = None;
                    changed = true;
                }
            }
        }
        // Rule 3, applied repeatedly to a node until it no longer moves.
        for &z in &bfs_alive(&parent, &alive) {
            while let Some(y) = parent[z] {
                let Some(x) = parent[y] else { break };
                let zy = intersect_sorted(bag(z), bag(y));
                let yx = intersect_sorted(bag(y), bag(x));
                if !is_subset_sorted(&zy, &yx) {
                    break;
                }
                parent[z] = Some(x);
                changed = true;
            }
        }
        // Rule 4.
        for &y in &bfs_alive(&parent, &alive) {
            let Some(x) = parent[y] else { continue };
            let is_leaf = !(0..nodes).any(|c| alive[c] && parent[c] == Some(y));
            if is_leaf && is_subset_sorted(bag(y), bag(x)) {
                alive[y] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let origin: Vec<usize> = (0..nodes).filter(|&x| alive[x]).collect();
    let index = index_map(nodes, &origin);
    let new_parent = origin
        .iter()
        .map(|&x| parent[x].map(|p| index[p].expect("parents of live nodes live")))
        .collect();
    let bags = origin.iter().map(|&x| d.raw_bags()[x].clone()).collect();
    Tidied {
        decomposition: Decomposition::new(new_parent, bags).expect("tidying keeps a forest"),
        origin,
    }
}

fn bfs_alive(parent: &[Option<usize>], alive: &[bool]) -> Vec<usize> {
    let nodes = parent.len();
    let mut children = vec![Vec::new(); nodes];
    for x in 0..nodes {
        if let (true, Some(p)) = (alive[x], parent[x]) {
            children[p].push(x);
        }
    }
    let mut order: Vec<usize> = (0..nodes)
        .filter(|&x| alive[x] && parent[x].is_none())
        .collect();
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        order.extend_from_slice(&children[x]);
        i += 1;
    }
    order
}
