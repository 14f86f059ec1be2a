//! Undirected topology: construction, generation, mutation, connectivity,
//! edge betweenness centrality, summary statistics, and file formats.
//!
//! Node ids are dense integers `0..n-1` so traffic configurations can be
//! matrix-shaped. Topologies are immutable after construction; mutating
//! operations return new values.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Dense node identifier.
pub type NodeId = usize;

/// Undirected edge with normalized endpoint order (`a < b`).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(into = "(NodeId, NodeId)", try_from = "(NodeId, NodeId)")]
pub struct Edge {
    a: NodeId,
    b: NodeId,
}

impl Edge {
    /// Normalizes endpoint order; self-loops are rejected.
    pub fn new(u: NodeId, v: NodeId) -> Result<Self> {
        if u == v {
            return Err(Error::InvalidParameter(format!("self-loop at node {u}")));
        }
        Ok(Self {
            a: u.min(v),
            b: u.max(v),
        })
    }

    pub fn endpoints(&self) -> (NodeId, NodeId) {
        (self.a, self.b)
    }

    /// The endpoint that is not `v`; `None` if `v` is not an endpoint.
    pub fn other(&self, v: NodeId) -> Option<NodeId> {
        if v == self.a {
            Some(self.b)
        } else if v == self.b {
            Some(self.a)
        } else {
            None
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a, self.b)
    }
}

impl From<Edge> for (NodeId, NodeId) {
    fn from(e: Edge) -> Self {
        (e.a, e.b)
    }
}

impl TryFrom<(NodeId, NodeId)> for Edge {
    type Error = Error;
    fn try_from(pair: (NodeId, NodeId)) -> Result<Self> {
        Edge::new(pair.0, pair.1)
    }
}

/// Undirected simple graph over nodes `0..n-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<NodeId>>,
}

impl Topology {
    /// Builds a topology from an edge set. Duplicate edges and endpoints
    /// outside `0..n` are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("node count must be positive".into()));
        }
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        edges.sort_unstable();
        for pair in edges.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::InvalidInput(format!("duplicate edge {}", pair[0])));
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        for e in &edges {
            let (a, b) = e.endpoints();
            if b >= n {
                return Err(Error::InvalidInput(format!(
                    "edge {e} references node {b} outside 0..{n}"
                )));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self { n, edges, adjacency })
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges in sorted order; the canonical edge indexing used by loads and traces.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_edge(&self, e: Edge) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    /// Index of `e` within [`Self::edges`].
    pub fn edge_index(&self, e: Edge) -> Option<usize> {
        self.edges.binary_search(&e).ok()
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v].len()
    }

    /// True iff a single component spans all nodes.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n
    }

    /// New topology with `e` removed; the node set is unchanged.
    pub fn without_edge(&self, e: Edge) -> Result<Topology> {
        if !self.has_edge(e) {
            return Err(Error::InvalidInput(format!("edge {e} not in topology")));
        }
        Topology::new(self.n, self.edges.iter().copied().filter(|&x| x != e))
    }

    /// Stable fingerprint of the node count and edge set (FNV-1a), used to
    /// label topologies in traces and sweep records.
    pub fn fingerprint(&self) -> String {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h = OFFSET;
        let mut eat = |x: u64| {
            for byte in x.to_le_bytes() {
                h ^= u64::from(byte);
                h = h.wrapping_mul(PRIME);
            }
        };
        eat(self.n as u64);
        for e in &self.edges {
            let (a, b) = e.endpoints();
            eat(a as u64);
            eat(b as u64);
        }
        format!("v{}-e{}-{:08x}", self.n, self.edges.len(), h >> 32)
    }

    // ---- file formats -----------------------------------------------------

    /// Serializes to the edge-list text format:
    ///
    /// ```text
    /// file  := line*
    /// line  := edge | comment | blank
    /// edge  := INT WS INT          ; endpoints of one undirected edge
    /// comment := '#' any*
    /// ```
    ///
    /// The node count is implied as `max endpoint + 1`; use the JSON format
    /// to preserve isolated trailing nodes.
    pub fn to_edge_list_string(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let (a, b) = e.endpoints();
            out.push_str(&format!("{a} {b}\n"));
        }
        out
    }

    /// Parses the edge-list text format documented on [`Self::to_edge_list_string`].
    pub fn parse_edge_list(text: &str) -> Result<Topology> {
        let mut edges = Vec::new();
        let mut max_node = 0;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let (a, b) = match (it.next(), it.next(), it.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => {
                    return Err(Error::Parse(format!(
                        "line {}: expected two node ids, got {line:?}",
                        lineno + 1
                    )))
                }
            };
            let parse = |s: &str| {
                s.parse::<NodeId>()
                    .map_err(|_| Error::Parse(format!("line {}: bad node id {s:?}", lineno + 1)))
            };
            let (a, b) = (parse(a)?, parse(b)?);
            max_node = max_node.max(a).max(b);
            edges.push(Edge::new(a, b)?);
        }
        if edges.is_empty() {
            return Err(Error::Parse("edge list contains no edges".into()));
        }
        Topology::new(max_node + 1, edges)
    }

    /// Serializes to the JSON variant, which carries the node count and
    /// optional metadata alongside the edge list.
    pub fn to_json_string(&self, metadata: BTreeMap<String, String>) -> Result<String> {
        let file = TopologyFile {
            version: TOPOLOGY_FORMAT_VERSION,
            n: self.n,
            edges: self.edges.clone(),
            metadata,
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json_str(text: &str) -> Result<Topology> {
        let file: TopologyFile = serde_json::from_str(text)?;
        if file.version != TOPOLOGY_FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported topology format version {}",
                file.version
            )));
        }
        Topology::new(file.n, file.edges)
    }
}

pub const TOPOLOGY_FORMAT_VERSION: u32 = 1;

/// JSON graph document: `{"version": 1, "n": 3, "edges": [[0,1],[1,2]], "metadata": {}}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TopologyFile {
    version: u32,
    n: usize,
    edges: Vec<Edge>,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
}

// ---- generators and mutation -----------------------------------------------

/// Barabási–Albert preferential-attachment graph.
///
/// Convention: the first `m` nodes form a clique; each subsequent node
/// attaches `m` edges to distinct existing nodes chosen with probability
/// proportional to current degree (uniformly while all degrees are zero,
/// which only happens for `m = 1` at the first attachment). The edge count
/// is therefore exactly `C(m,2) + (n-m)*m`.
pub fn generate_barabasi_albert(n: usize, m: usize, seed: u64) -> Result<Topology> {
    if m < 1 || n <= m {
        return Err(Error::InvalidParameter(format!(
            "barabasi-albert requires n > m >= 1, got n={n}, m={m}"
        )));
    }
    let mut rng = crate::seeds::rng(seed);
    let mut edges = Vec::with_capacity(m * (m - 1) / 2 + (n - m) * m);
    // Repeated-endpoints list: sampling uniformly from it is degree-proportional.
    let mut endpoint_pool: Vec<NodeId> = Vec::new();
    for u in 0..m {
        for v in (u + 1)..m {
            edges.push(Edge::new(u, v)?);
            endpoint_pool.push(u);
            endpoint_pool.push(v);
        }
    }
    for new_node in m..n {
        let mut targets: Vec<NodeId> = Vec::with_capacity(m);
        while targets.len() < m {
            let candidate = if endpoint_pool.is_empty() {
                // All existing degrees are zero (m = 1 seed): uniform choice.
                rng.gen_range(0..new_node)
            } else {
                endpoint_pool[rng.gen_range(0..endpoint_pool.len())]
            };
            if !targets.contains(&candidate) {
                targets.push(candidate);
            }
        }
        for &t in &targets {
            edges.push(Edge::new(new_node, t)?);
            endpoint_pool.push(new_node);
            endpoint_pool.push(t);
        }
    }
    Topology::new(n, edges)
}

/// Complete graph on `n >= 2` nodes.
pub fn complete_graph(n: usize) -> Result<Topology> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "complete graph requires n >= 2, got {n}"
        )));
    }
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in (u + 1)..n {
            edges.push(Edge::new(u, v)?);
        }
    }
    Topology::new(n, edges)
}

/// Removes one uniformly chosen edge. Connectivity of the result is the
/// caller's concern.
pub fn remove_random_edge(g: &Topology, rng: &mut impl Rng) -> Result<Topology> {
    let e = *g
        .edges()
        .choose(rng)
        .ok_or_else(|| Error::InvalidInput("cannot remove an edge from an edgeless graph".into()))?;
    g.without_edge(e)
}

// ---- centrality and statistics ----------------------------------------------

/// Edge betweenness centrality under the ordered-pair convention: for each
/// edge, the sum over ordered pairs `(s, t)`, `s != t`, of the fraction of
/// shortest s-t paths that traverse the edge. On an undirected graph this is
/// exactly twice the unordered value; the convention matches directional
/// per-pair traffic.
pub fn edge_betweenness(g: &Topology) -> Result<BTreeMap<Edge, f64>> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.n_nodes();
    let mut centrality: BTreeMap<Edge, f64> = g.edges().iter().map(|&e| (e, 0.0)).collect();

    // Brandes accumulation run from every source counts every ordered pair once.
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut sigma = vec![0.0f64; n];
        let mut preds: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([s]);
        dist[s] = 0;
        sigma[s] = 1.0;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in g.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        let mut delta = vec![0.0f64; n];
        for &w in order.iter().rev() {
            for &v in &preds[w] {
                let share = sigma[v] / sigma[w] * (1.0 + delta[w]);
                let e = Edge::new(v, w).expect("BFS tree edges are not self-loops");
                *centrality.get_mut(&e).expect("edge from adjacency") += share;
                delta[v] += share;
            }
        }
    }
    Ok(centrality)
}

/// Per-topology degree and centrality summary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub mean_degree: f64,
    pub degree_std: f64,
    pub mean_edge_centrality: f64,
    pub edge_centrality_std: f64,
    pub edge_count: usize,
}

/// Mean/std of node degree and edge betweenness. Requires a connected graph
/// because centrality is undefined otherwise.
pub fn graph_stats(g: &Topology) -> Result<GraphStats> {
    let centrality = edge_betweenness(g)?;
    let degrees: Vec<f64> = (0..g.n_nodes()).map(|v| g.degree(v) as f64).collect();
    let (mean_degree, degree_std) = mean_std(&degrees);
    let values: Vec<f64> = centrality.values().copied().collect();
    let (mean_edge_centrality, edge_centrality_std) = mean_std(&values);
    Ok(GraphStats {
        mean_degree,
        degree_std,
        mean_edge_centrality,
        edge_centrality_std,
        edge_count: g.n_edges(),
    })
}

/// Population mean and standard deviation.
fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.max(0.0).sqrt())
}

/// Edges sorted by descending centrality (ties by edge order), paired with
/// their 1-based rank.
pub fn centrality_ranking(centrality: &BTreeMap<Edge, f64>) -> Vec<(Edge, f64)> {
    let mut ranked: Vec<(Edge, f64)> = centrality.iter().map(|(&e, &c)| (e, c)).collect();
    ranked.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap().then(x.0.cmp(&y.0)));
    ranked
}
