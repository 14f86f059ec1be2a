//! Global performance of a capacity plan: the measure `g` (fraction of edges
//! congestion-free in at least `C` of the observed frames), its expectation
//! over distributions of the traffic parameters, and the edge-removal
//! topology sweep over complete graphs.

use rayon::prelude::*;
use serde::Serialize;

use crate::allocation::allocate;
use crate::graph::{
    complete_graph, graph_stats, remove_random_edge, GraphStats, Topology,
};
use crate::pmf::{edge_load_pmf, poisson_pmf, Pmf, TrafficConfig, TruncationPolicy};
use crate::routing::{build_routing_table, RoutingTable};
use crate::simulator::{run_simulation, FrameTrace, SimConfig, TraceMeta};
use crate::{seeds, Error, Result};

// ---- histograms and the global measure --------------------------------------

/// Normalized histogram over `[0, 1]`; the last bin is closed at 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub bin_width: f64,
    pub masses: Vec<f64>,
}

impl Histogram {
    /// CSV rows `bin_lo,bin_hi,mass`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("bin_lo,bin_hi,mass\n");
        for (i, m) in self.masses.iter().enumerate() {
            let lo = i as f64 * self.bin_width;
            let hi = ((i + 1) as f64 * self.bin_width).min(1.0);
            out.push_str(&format!("{lo},{hi},{m}\n"));
        }
        out
    }
}

/// Histogram of per-edge congestion-free fractions; bin masses sum to 1.
pub fn congestion_free_histogram(trace: &FrameTrace, bin_width: f64) -> Result<Histogram> {
    if !(bin_width > 0.0 && bin_width <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "bin width must lie in (0, 1], got {bin_width}"
        )));
    }
    if trace.edges().is_empty() {
        return Err(Error::InvalidInput("trace covers no edges".into()));
    }
    let n_bins = (1.0 / bin_width).ceil() as usize;
    let mut masses = vec![0.0; n_bins];
    let fractions = trace.fractions();
    for &f in &fractions {
        let bin = ((f / bin_width) as usize).min(n_bins - 1);
        masses[bin] += 1.0;
    }
    for m in &mut masses {
        *m /= fractions.len() as f64;
    }
    Ok(Histogram { bin_width, masses })
}

/// The global measure `g` for one trace at threshold `C`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GlobalMeasure {
    pub g: f64,
    /// The fraction-of-time threshold `C`.
    pub threshold: f64,
    pub inputs: TraceMeta,
}

/// Fraction of edges whose congestion-free fraction is at least `C`,
/// computed from the raw per-edge fractions rather than binned masses.
pub fn global_measure(trace: &FrameTrace, threshold: f64) -> Result<GlobalMeasure> {
    if !threshold.is_finite() || threshold < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "threshold C must be finite and non-negative, got {threshold}"
        )));
    }
    if trace.edges().is_empty() {
        return Err(Error::InvalidInput("trace covers no edges".into()));
    }
    let fractions = trace.fractions();
    let hits = fractions.iter().filter(|&&f| f >= threshold).count();
    Ok(GlobalMeasure {
        g: hits as f64 / fractions.len() as f64,
        threshold,
        inputs: trace.meta.clone(),
    })
}

// ---- the per-(lambda, q) pipeline --------------------------------------------

/// Fixed parameters of one pipeline evaluation.
#[derive(Clone, Copy, Debug)]
pub struct PipelineParams {
    /// Local performance criterion for allocation.
    pub c: f64,
    /// Fraction-of-time threshold for the global measure.
    pub big_c: f64,
    pub epsilon: f64,
    pub n_frames: usize,
}

/// Per-edge analytic load pmfs for a whole topology, in parallel.
pub fn all_edge_pmfs(
    g: &Topology,
    table: &RoutingTable,
    traffic: &TrafficConfig,
    policy: &TruncationPolicy,
) -> Result<std::collections::BTreeMap<crate::graph::Edge, Pmf>> {
    g.edges()
        .par_iter()
        .map(|&e| Ok((e, edge_load_pmf(e, table, traffic, policy)?)))
        .collect()
}

/// Full pipeline for one `(lambda, q)` point: analytic pmfs, allocation at
/// `c`, simulation, then `g` at threshold `C`.
pub fn pipeline_global_measure(
    g: &Topology,
    table: &RoutingTable,
    lambda: f64,
    q: f64,
    params: &PipelineParams,
    seed: u64,
) -> Result<f64> {
    let traffic = TrafficConfig::homogeneous(lambda, q)?;
    let policy = TruncationPolicy::new(params.epsilon)?;
    let pmfs = all_edge_pmfs(g, table, &traffic, &policy)?;
    let plan = allocate(&pmfs, params.c)?;
    let cfg = SimConfig { n_frames: params.n_frames, seed };
    let trace = run_simulation(g, table, &traffic, &plan, &cfg)?;
    Ok(global_measure(&trace, params.big_c)?.g)
}

// ---- expectation over traffic distributions ------------------------------------

/// Numerics of the expectation: where to cut the lambda sum and how many
/// trapezoid points to use on the q integral.
#[derive(Clone, Copy, Debug)]
pub struct ExpectationConfig {
    /// Stop extending the lambda support once the remaining tail mass of
    /// `p_lambda` drops below this.
    pub lambda_tail_tol: f64,
    /// Number of equally spaced q grid points on `[0, 1]`, at least 2.
    pub q_grid_points: usize,
}

impl Default for ExpectationConfig {
    fn default() -> Self {
        Self { lambda_tail_tol: 1e-3, q_grid_points: 11 }
    }
}

/// Poisson weights for the lambda expectation.
pub fn poisson_weights(mean: f64) -> Result<impl Fn(u64) -> f64> {
    poisson_pmf(mean, 0)?;
    Ok(move |k: u64| poisson_pmf(mean, k as usize).expect("mean validated"))
}

/// The uniform density on `[0, 1]`.
pub fn uniform_density() -> impl Fn(f64) -> f64 {
    |_| 1.0
}

const MAX_LAMBDA_SUPPORT: usize = 100_000;

/// `E[g] = sum_lambda integral_0^1 g(lambda, q) p_lambda(lambda) p_q(q) dq`,
/// with the lambda sum truncated at tail mass below `cfg.lambda_tail_tol`
/// and the q integral evaluated by composite trapezoid on a fixed grid.
/// `g_fn` evaluations run in parallel.
pub fn expected_global_measure<G, PL, PQ>(
    g_fn: G,
    p_lambda: PL,
    p_q: PQ,
    cfg: &ExpectationConfig,
) -> Result<f64>
where
    G: Fn(u64, f64) -> Result<f64> + Sync,
    PL: Fn(u64) -> f64,
    PQ: Fn(f64) -> f64,
{
    if !(cfg.lambda_tail_tol > 0.0 && cfg.lambda_tail_tol < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda tail tolerance must lie in (0, 1), got {}",
            cfg.lambda_tail_tol
        )));
    }
    if cfg.q_grid_points < 2 {
        return Err(Error::InvalidParameter(
            "q grid needs at least 2 points".into(),
        ));
    }

    // Truncated lambda support.
    let mut support: Vec<(u64, f64)> = Vec::new();
    let mut cumulative = 0.0;
    for k in 0..MAX_LAMBDA_SUPPORT as u64 {
        if 1.0 - cumulative < cfg.lambda_tail_tol {
            break;
        }
        let w = p_lambda(k);
        if !(0.0..=1.0 + 1e-9).contains(&w) {
            return Err(Error::InvalidParameter(format!(
                "p_lambda({k}) = {w} is not a probability"
            )));
        }
        cumulative += w;
        if cumulative > 1.0 + 1e-6 {
            return Err(Error::InvalidParameter(
                "p_lambda masses sum beyond 1".into(),
            ));
        }
        support.push((k, w));
    }
    if 1.0 - cumulative >= cfg.lambda_tail_tol {
        return Err(Error::InvalidParameter(format!(
            "p_lambda tail mass never dropped below {} within {MAX_LAMBDA_SUPPORT} terms",
            cfg.lambda_tail_tol
        )));
    }

    // q grid and density weights; the density must integrate to ~1.
    let points = cfg.q_grid_points;
    let h = 1.0 / (points - 1) as f64;
    let grid: Vec<f64> = (0..points).map(|j| j as f64 * h).collect();
    let density: Vec<f64> = grid.iter().map(|&q| p_q(q)).collect();
    if density.iter().any(|&d| !d.is_finite() || d < 0.0) {
        return Err(Error::InvalidParameter(
            "p_q must be finite and non-negative on the grid".into(),
        ));
    }
    let integral: f64 = trapezoid(&density, h);
    if (integral - 1.0).abs() > 0.02 {
        return Err(Error::InvalidParameter(format!(
            "p_q integrates to {integral} on the grid; expected ~1"
        )));
    }

    // Evaluate g over the support x grid in parallel, then combine in order.
    let tasks: Vec<(usize, usize)> = (0..support.len())
        .flat_map(|i| (0..points).map(move |j| (i, j)))
        .collect();
    let values: Vec<f64> = tasks
        .par_iter()
        .map(|&(i, j)| g_fn(support[i].0, grid[j]))
        .collect::<Result<_>>()?;

    let mut total = 0.0;
    for (i, &(_, w)) in support.iter().enumerate() {
        let integrand: Vec<f64> = (0..points)
            .map(|j| values[i * points + j] * density[j])
            .collect();
        total += w * trapezoid(&integrand, h);
    }
    Ok(total)
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    let inner: f64 = values[1..values.len() - 1].iter().sum();
    h * (values[0] / 2.0 + inner + values[values.len() - 1] / 2.0)
}

// ---- topology sweep -------------------------------------------------------------

/// Edge-removal sweep parameters. `p_lambda` is Poisson with mean
/// `lambda_mean`; `p_q` is uniform on `[0, 1]`.
#[derive(Clone, Copy, Debug)]
pub struct SweepConfig {
    pub n: usize,
    pub c: f64,
    pub big_c: f64,
    pub lambda_mean: f64,
    pub epsilon: f64,
    pub n_frames: usize,
    pub seed: u64,
    pub expectation: ExpectationConfig,
}

impl SweepConfig {
    /// The scale used for the reported results: complete graph of 20 nodes,
    /// full expectation grids.
    pub fn paper_scale(seed: u64) -> Self {
        Self {
            n: 20,
            c: 0.85,
            big_c: 0.8,
            lambda_mean: 4.0,
            epsilon: TruncationPolicy::DEFAULT_EPSILON,
            n_frames: 100,
            seed,
            expectation: ExpectationConfig { lambda_tail_tol: 1e-3, q_grid_points: 11 },
        }
    }

    /// Reduced scale for CI: 10 nodes, coarser grids, fewer frames.
    pub fn desk_scale(seed: u64) -> Self {
        Self {
            n: 10,
            c: 0.85,
            big_c: 0.8,
            lambda_mean: 4.0,
            epsilon: TruncationPolicy::DEFAULT_EPSILON,
            n_frames: 30,
            seed,
            expectation: ExpectationConfig { lambda_tail_tol: 5e-2, q_grid_points: 5 },
        }
    }
}

/// One surviving topology in the removal sequence.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRecord {
    pub step: usize,
    pub topology_id: String,
    pub stats: GraphStats,
    pub expected_g: f64,
}

/// CSV rows for sweep records.
pub fn sweep_to_csv_string(records: &[SweepRecord]) -> String {
    let mut out = String::from(
        "step,topology_id,edge_count,mean_degree,degree_std,mean_edge_centrality,edge_centrality_std,expected_g\n",
    );
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.step,
            r.topology_id,
            r.stats.edge_count,
            r.stats.mean_degree,
            r.stats.degree_std,
            r.stats.mean_edge_centrality,
            r.stats.edge_centrality_std,
            r.expected_g
        ));
    }
    out
}

const SWEEP_REMOVAL_STREAM: u64 = 0x5357_4545_50;

/// Starting from the complete graph on `cfg.n` nodes, removes one random
/// edge per step, evaluating `E[g]` and graph statistics for every topology
/// that is still connected. Stops at the first disconnection; records are in
/// removal order (step 0 is the complete graph).
pub fn topology_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    let p_lambda = poisson_weights(cfg.lambda_mean)?;
    let params = PipelineParams {
        c: cfg.c,
        big_c: cfg.big_c,
        epsilon: cfg.epsilon,
        n_frames: cfg.n_frames,
    };
    let mut removal_rng = seeds::rng(seeds::derive(cfg.seed, &[SWEEP_REMOVAL_STREAM]));
    let mut g = complete_graph(cfg.n)?;
    let mut records = Vec::new();
    for step in 0.. {
        let table = build_routing_table(&g)?;
        let expected_g = expected_global_measure(
            |lambda, q| {
                let seed = seeds::derive(cfg.seed, &[step as u64, lambda, q.to_bits()]);
                pipeline_global_measure(&g, &table, lambda as f64, q, &params, seed)
            },
            &p_lambda,
            uniform_density(),
            &cfg.expectation,
        )?;
        records.push(SweepRecord {
            step,
            topology_id: g.fingerprint(),
            stats: graph_stats(&g)?,
            expected_g,
        });
        if g.n_edges() == 0 {
            break;
        }
        let next = remove_random_edge(&g, &mut removal_rng)?;
        if !next.is_connected() {
            break;
        }
        g = next;
    }
    Ok(records)
}
