//! Shortest-path routing tables: per-ordered-pair path counts and per-edge
//! traversal fractions `f` = (shortest paths through the edge) / (all
//! shortest paths), plus uniform sampling over a pair's shortest paths.
//!
//! Path counts come from BFS predecessor DAGs rather than explicit path
//! enumeration, since the number of shortest paths can grow exponentially.
//! Counts are exact 128-bit integers; fractions are stored as `f64` derived
//! from the exact counts.

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;
use serde::Serialize;

use crate::graph::{Edge, NodeId, Topology};
use crate::{Error, Result};

/// One ordered pair's share of an edge's traffic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairContribution {
    pub source: NodeId,
    pub target: NodeId,
    /// Probability that the pair's batch traverses this edge; in (0, 1].
    pub fraction: f64,
}

/// BFS shortest-path DAG rooted at one source.
struct SourceDag {
    dist: Vec<usize>,
    /// Number of shortest paths from the root to each node.
    sigma: Vec<u128>,
    preds: Vec<Vec<NodeId>>,
}

fn bfs_dag(g: &Topology, root: NodeId) -> Result<SourceDag> {
    let n = g.n_nodes();
    let mut dist = vec![usize::MAX; n];
    let mut sigma = vec![0u128; n];
    let mut preds: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    dist[root] = 0;
    sigma[root] = 1;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] = sigma[w]
                    .checked_add(sigma[v])
                    .ok_or(Error::PathCountOverflow { from: root, to: w })?;
                preds[w].push(v);
            }
        }
    }
    Ok(SourceDag { dist, sigma, preds })
}

/// Immutable routing table over a connected topology.
pub struct RoutingTable {
    n: usize,
    dags: Vec<SourceDag>,
    contributions: BTreeMap<Edge, Vec<PairContribution>>,
}

/// Builds the table by counting all shortest paths between every ordered
/// pair (unit edge weights). Errors on a disconnected graph.
pub fn build_routing_table(g: &Topology) -> Result<RoutingTable> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.n_nodes();
    let dags: Vec<SourceDag> = (0..n).map(|s| bfs_dag(g, s)).collect::<Result<_>>()?;

    let mut contributions: BTreeMap<Edge, Vec<PairContribution>> =
        g.edges().iter().map(|&e| (e, Vec::new())).collect();
    for m in 0..n {
        for t in 0..n {
            if m == t {
                continue;
            }
            let fwd = &dags[m];
            let rev = &dags[t];
            let total = fwd.sigma[t];
            let pair_dist = fwd.dist[t];
            for (&edge, entries) in contributions.iter_mut() {
                let (a, b) = edge.endpoints();
                // An edge lies on a shortest m-t path in exactly one direction.
                let through = if fwd.dist[a] + 1 + rev.dist[b] == pair_dist
                    && fwd.dist[a] + 1 == fwd.dist[b]
                {
                    fwd.sigma[a]
                        .checked_mul(rev.sigma[b])
                        .ok_or(Error::PathCountOverflow { from: m, to: t })?
                } else if fwd.dist[b] + 1 + rev.dist[a] == pair_dist
                    && fwd.dist[b] + 1 == fwd.dist[a]
                {
                    fwd.sigma[b]
                        .checked_mul(rev.sigma[a])
                        .ok_or(Error::PathCountOverflow { from: m, to: t })?
                } else {
                    0
                };
                if through > 0 {
                    entries.push(PairContribution {
                        source: m,
                        target: t,
                        fraction: through as f64 / total as f64,
                    });
                }
            }
        }
    }
    Ok(RoutingTable { n, dags, contributions })
}

impl RoutingTable {
    pub fn n_nodes(&self) -> usize {
        self.n
    }

    /// Whether the table was built over a topology containing this edge.
    pub fn has_edge(&self, edge: Edge) -> bool {
        self.contributions.contains_key(&edge)
    }

    /// The set `A_ij`: ordered pairs with nonzero traversal fraction on this
    /// edge. Empty slice for edges that carry no traffic or unknown edges.
    pub fn contributions(&self, edge: Edge) -> &[PairContribution] {
        self.contributions.get(&edge).map_or(&[], Vec::as_slice)
    }

    /// Traversal fraction of the `(m, t)` batch over `edge`; 0 when absent.
    pub fn fraction(&self, edge: Edge, m: NodeId, t: NodeId) -> f64 {
        self.contributions(edge)
            .iter()
            .find(|c| c.source == m && c.target == t)
            .map_or(0.0, |c| c.fraction)
    }

    /// Number of shortest paths from `m` to `t`.
    pub fn path_count(&self, m: NodeId, t: NodeId) -> u128 {
        self.dags[m].sigma[t]
    }

    /// Hop count of the shortest `m`-`t` paths.
    pub fn distance(&self, m: NodeId, t: NodeId) -> usize {
        self.dags[m].dist[t]
    }

    /// Samples one of the `L` shortest `m`-`t` paths uniformly by walking the
    /// predecessor DAG backward with weights proportional to path counts.
    /// Returns the node sequence from `m` to `t` inclusive.
    pub fn sample_shortest_path(
        &self,
        m: NodeId,
        t: NodeId,
        rng: &mut impl Rng,
    ) -> Result<Vec<NodeId>> {
        if m == t {
            return Err(Error::InvalidParameter(format!(
                "path endpoints must differ, got {m} twice"
            )));
        }
        if m >= self.n || t >= self.n {
            return Err(Error::InvalidParameter(format!(
                "node out of range: ({m}, {t}) with n={}",
                self.n
            )));
        }
        let dag = &self.dags[m];
        let mut path = Vec::with_capacity(dag.dist[t] + 1);
        let mut v = t;
        path.push(v);
        while v != m {
            let preds = &dag.preds[v];
            let next = if preds.len() == 1 {
                preds[0]
            } else {
                // A predecessor with k paths from m heads k of sigma[v] paths.
                let total: u128 = dag.sigma[v];
                let mut ticket = rng.gen_range(0..total);
                let mut chosen = preds[0];
                for &p in preds {
                    let weight = dag.sigma[p];
                    if ticket < weight {
                        chosen = p;
                        break;
                    }
                    ticket -= weight;
                }
                chosen
            };
            path.push(next);
            v = next;
        }
        path.reverse();
        Ok(path)
    }

    /// JSON dump of per-edge contributor lists, for inspection and golden tests.
    pub fn to_json_string(&self) -> Result<String> {
        #[derive(Serialize)]
        struct EdgeEntry<'a> {
            edge: Edge,
            contributions: &'a [PairContribution],
        }
        let rows: Vec<EdgeEntry> = self
            .contributions
            .iter()
            .map(|(&edge, entries)| EdgeEntry { edge, contributions: entries })
            .collect();
        Ok(serde_json::to_string_pretty(&rows)?)
    }
}
