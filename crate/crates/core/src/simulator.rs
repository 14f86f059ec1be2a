//! Frame-based stochastic traffic simulator.
//!
//! A frame is an atomic step: every ordered pair independently activates
//! with probability `q`, draws a Poisson batch size, samples ONE shortest
//! path uniformly, and the whole batch traverses every edge of that path
//! (per-batch path choice; a per-packet mode would not match the analytic
//! engine's mixture form). Frames are mutually independent: frame `t` draws
//! from its own ChaCha stream, so frames can be computed in any order or in
//! parallel with identical results.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::allocation::CapacityPlan;
use crate::graph::{Edge, NodeId, Topology};
use crate::pmf::{Pmf, TrafficConfig};
use crate::routing::RoutingTable;
use crate::seeds;
use crate::{Error, Result};

/// Simulation run parameters. Path choice is fixed to per-batch.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_frames: usize,
    pub seed: u64,
}

struct PairTraffic {
    source: NodeId,
    target: NodeId,
    q: f64,
    batch: Option<Poisson<f64>>,
}

fn pair_traffic(n: usize, traffic: &TrafficConfig) -> Vec<PairTraffic> {
    let mut pairs = Vec::with_capacity(n * (n - 1));
    for m in 0..n {
        for t in 0..n {
            if m == t {
                continue;
            }
            let lambda = traffic.lambda(m, t);
            pairs.push(PairTraffic {
                source: m,
                target: t,
                q: traffic.q(m, t),
                batch: (lambda > 0.0).then(|| {
                    Poisson::new(lambda).expect("validated lambda is positive and finite")
                }),
            });
        }
    }
    pairs
}

fn frame_loads(
    g: &Topology,
    table: &RoutingTable,
    pairs: &[PairTraffic],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<u64>> {
    let mut loads = vec![0u64; g.n_edges()];
    for pair in pairs {
        if pair.q == 0.0 || !rng.gen_bool(pair.q) {
            continue;
        }
        let k = match &pair.batch {
            Some(batch) => batch.sample(rng) as u64,
            None => 0,
        };
        if k == 0 {
            continue;
        }
        let path = table.sample_shortest_path(pair.source, pair.target, rng)?;
        for hop in path.windows(2) {
            let edge = Edge::new(hop[0], hop[1]).expect("path hops are distinct nodes");
            let idx = g
                .edge_index(edge)
                .ok_or_else(|| Error::InvalidInput(format!("path edge {edge} not in topology")))?;
            loads[idx] += k;
        }
    }
    Ok(loads)
}

/// One frame of traffic: per-edge packet loads indexed by `g.edges()` order.
pub fn run_frame(
    g: &Topology,
    table: &RoutingTable,
    traffic: &TrafficConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<u64>> {
    if table.n_nodes() != g.n_nodes() {
        return Err(Error::InvalidInput(
            "routing table was built for a different topology".into(),
        ));
    }
    traffic.compatible_with(g.n_nodes())?;
    let pairs = pair_traffic(g.n_nodes(), traffic);
    frame_loads(g, table, &pairs, rng)
}

/// Provenance recorded with every trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub topology: String,
    pub traffic: String,
    pub criterion: f64,
    pub n_frames: usize,
    pub seed: u64,
    pub rng_algorithm: String,
}

/// Per-frame per-edge loads plus the capacities they were checked against.
/// An edge is congested in a frame iff its load strictly exceeds capacity.
pub struct FrameTrace {
    edges: Vec<Edge>,
    capacities: Vec<u64>,
    loads: Vec<Vec<u64>>,
    pub meta: TraceMeta,
}

impl FrameTrace {
    #[cfg(test)]
    pub(crate) fn from_parts(
        edges: Vec<Edge>,
        capacities: Vec<u64>,
        loads: Vec<Vec<u64>>,
        meta: TraceMeta,
    ) -> Self {
        Self { edges, capacities, loads, meta }
    }

    pub fn n_frames(&self) -> usize {
        self.loads.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn capacity(&self, edge_idx: usize) -> u64 {
        self.capacities[edge_idx]
    }

    pub fn load(&self, frame: usize, edge_idx: usize) -> u64 {
        self.loads[frame][edge_idx]
    }

    pub fn congested(&self, frame: usize, edge_idx: usize) -> bool {
        self.loads[frame][edge_idx] > self.capacities[edge_idx]
    }

    /// Fraction of frames in which the edge stayed within capacity.
    pub fn congestion_free_fraction(&self, edge_idx: usize) -> f64 {
        let free = self
            .loads
            .iter()
            .filter(|frame| frame[edge_idx] <= self.capacities[edge_idx])
            .count();
        free as f64 / self.loads.len() as f64
    }

    /// Congestion-free fractions for all edges, in edge order.
    pub fn fractions(&self) -> Vec<f64> {
        (0..self.edges.len())
            .map(|idx| self.congestion_free_fraction(idx))
            .collect()
    }

    /// Empirical load distribution of one edge over the observed frames.
    pub fn empirical_pmf(&self, edge_idx: usize) -> Pmf {
        let max_load = self.loads.iter().map(|f| f[edge_idx]).max().unwrap_or(0) as usize;
        let mut mass = vec![0.0; max_load + 1];
        for frame in &self.loads {
            mass[frame[edge_idx] as usize] += 1.0;
        }
        let n = self.loads.len() as f64;
        for m in &mut mass {
            *m /= n;
        }
        Pmf::from_mass(mass).expect("counts are non-negative")
    }

    /// CSV rows `edge,frames_observed,congestion_free_fraction`.
    pub fn summary_csv_string(&self) -> String {
        let mut out = String::from("edge,frames_observed,congestion_free_fraction\n");
        for (idx, edge) in self.edges.iter().enumerate() {
            out.push_str(&format!(
                "{edge},{},{}\n",
                self.n_frames(),
                self.congestion_free_fraction(idx)
            ));
        }
        out
    }

    /// Full per-frame load dump, CSV rows `frame,edge,load`. Large.
    pub fn loads_csv_string(&self) -> String {
        let mut out = String::from("frame,edge,load\n");
        for (t, frame) in self.loads.iter().enumerate() {
            for (idx, edge) in self.edges.iter().enumerate() {
                out.push_str(&format!("{t},{edge},{}\n", frame[idx]));
            }
        }
        out
    }
}

/// Runs `cfg.n_frames` independent frames against a capacity plan. The plan
/// must cover exactly the topology's edge set. Deterministic for a fixed
/// seed; frames are evaluated in parallel from per-frame RNG streams.
pub fn run_simulation(
    g: &Topology,
    table: &RoutingTable,
    traffic: &TrafficConfig,
    plan: &CapacityPlan,
    cfg: &SimConfig,
) -> Result<FrameTrace> {
    if cfg.n_frames == 0 {
        return Err(Error::InvalidParameter("n_frames must be at least 1".into()));
    }
    if table.n_nodes() != g.n_nodes() {
        return Err(Error::InvalidInput(
            "routing table was built for a different topology".into(),
        ));
    }
    traffic.compatible_with(g.n_nodes())?;
    if plan.capacities.len() != g.n_edges()
        || !g.edges().iter().all(|e| plan.capacities.contains_key(e))
    {
        return Err(Error::InvalidInput(
            "capacity plan does not cover the topology's edge set".into(),
        ));
    }

    let pairs = pair_traffic(g.n_nodes(), traffic);
    let loads: Vec<Vec<u64>> = (0..cfg.n_frames)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeds::frame_rng(cfg.seed, t as u64);
            frame_loads(g, table, &pairs, &mut rng)
        })
        .collect::<Result<_>>()?;

    let capacities = g.edges().iter().map(|e| plan.capacities[e]).collect();
    Ok(FrameTrace {
        edges: g.edges().to_vec(),
        capacities,
        loads,
        meta: TraceMeta {
            topology: g.fingerprint(),
            traffic: traffic.describe(),
            criterion: plan.criterion,
            n_frames: cfg.n_frames,
            seed: cfg.seed,
            rng_algorithm: seeds::RNG_ALGORITHM.into(),
        },
    })
}
