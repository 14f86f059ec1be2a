//! Analytic load distributions: Poisson pmf, the per-pair emission pmf `phi`,
//! the per-edge contribution pmf `omega`, truncation sizing, and convolution
//! assembly of the per-edge load pmf.
//!
//! For an ordered pair with activation probability `q` and conditional mean
//! `lambda`, the number of packets it emits in a frame is
//!
//! ```text
//! phi(k) = (1 - P(lambda,0))(1 - q) + P(lambda,0)   if k = 0
//!          q * P(lambda,k)                          otherwise
//! ```
//!
//! and the number it contributes to a specific edge with traversal fraction
//! `f` is the path-choice mixture
//!
//! ```text
//! omega(k) = f * phi(0) + 1 - f   if k = 0
//!            f * phi(k)           otherwise.
//! ```
//!
//! The edge load pmf is the linear convolution of `omega` vectors over all
//! contributing pairs, each truncated to a per-pair length `Q` chosen so the
//! discarded tail is negligible relative to the pmf body.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::graph::Edge;
use crate::routing::RoutingTable;
use crate::{Error, Result};

// ---- scalar kernels ---------------------------------------------------------

fn poisson_raw(lambda: f64, k: usize) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let kf = k as f64;
    // Log-space keeps lambda^k / k! finite for large k.
    (kf * lambda.ln() - lambda - ln_gamma(kf + 1.0)).exp()
}

fn phi_raw(lambda: f64, q: f64, k: usize) -> f64 {
    let p0 = poisson_raw(lambda, 0);
    if k == 0 {
        (1.0 - p0) * (1.0 - q) + p0
    } else {
        q * poisson_raw(lambda, k)
    }
}

fn omega_raw(lambda: f64, q: f64, f: f64, k: usize) -> f64 {
    if k == 0 {
        f * phi_raw(lambda, q, 0) + 1.0 - f
    } else {
        f * phi_raw(lambda, q, k)
    }
}

fn check_unit(name: &str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidParameter(format!(
            "{name} must lie in [0, 1], got {value}"
        )));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "lambda must be finite and non-negative, got {lambda}"
        )));
    }
    Ok(())
}

/// Poisson probability `P(lambda, k) = lambda^k e^-lambda / k!`.
pub fn poisson_pmf(lambda: f64, k: usize) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(poisson_raw(lambda, k))
}

/// Probability that a pair emits `k` packets in a frame.
pub fn phi(lambda: f64, q: f64, k: usize) -> Result<f64> {
    check_lambda(lambda)?;
    check_unit("q", q)?;
    Ok(phi_raw(lambda, q, k))
}

/// Probability that a pair contributes `k` packets to an edge it traverses
/// with probability `f`.
pub fn omega(lambda: f64, q: f64, f: f64, k: usize) -> Result<f64> {
    check_lambda(lambda)?;
    check_unit("q", q)?;
    check_unit("f", f)?;
    Ok(omega_raw(lambda, q, f, k))
}

// ---- truncation -------------------------------------------------------------

/// Tail-truncation rule for per-pair `omega` vectors: keep `Q` entries where
/// `omega(Q-1) <= epsilon * omega(round(lambda))`, with a floor of
/// `Q >= round(lambda) + 1` so the pmf body is always retained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub epsilon: f64,
}

impl TruncationPolicy {
    pub const DEFAULT_EPSILON: f64 = 0.001;

    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        Ok(Self { epsilon })
    }

    /// Smallest admissible vector length for the given pair parameters.
    fn floor(lambda: f64) -> usize {
        lambda.round() as usize + 1
    }

    /// Whether a vector of length `q_len` satisfies the truncation condition.
    pub fn accepts(&self, lambda: f64, q: f64, f: f64, q_len: usize) -> bool {
        if lambda <= 0.0 {
            return q_len >= 1;
        }
        if q_len < Self::floor(lambda) {
            return false;
        }
        let reference = omega_raw(lambda, q, f, lambda.round() as usize);
        omega_raw(lambda, q, f, q_len - 1) <= self.epsilon * reference
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self { epsilon: Self::DEFAULT_EPSILON }
    }
}

/// Smallest `Q` accepted by the policy for this pair; `1` when `lambda = 0`.
/// Parameters are assumed domain-valid (see [`omega`] for the checks).
pub fn choose_q(lambda: f64, q: f64, f: f64, policy: &TruncationPolicy) -> usize {
    if lambda <= 0.0 {
        return 1;
    }
    let mut len = TruncationPolicy::floor(lambda);
    while !policy.accepts(lambda, q, f, len) {
        len += 1;
    }
    len
}

// ---- traffic configuration ----------------------------------------------------

/// Per-ordered-pair traffic parameters: activation probability `q` and mean
/// conditional packet count `lambda`. Either one scalar pair applied
/// everywhere or full matrices indexed `[source][target]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrafficConfig {
    Homogeneous { lambda: f64, q: f64 },
    PerPair { lambda: Vec<Vec<f64>>, q: Vec<Vec<f64>> },
}

impl TrafficConfig {
    pub fn homogeneous(lambda: f64, q: f64) -> Result<Self> {
        check_lambda(lambda)?;
        check_unit("q", q)?;
        Ok(Self::Homogeneous { lambda, q })
    }

    /// Matrices must be square, of equal size; diagonal entries are ignored
    /// by consumers but still validated. `q[m][n]` and `q[n][m]` are
    /// independent.
    pub fn per_pair(lambda: Vec<Vec<f64>>, q: Vec<Vec<f64>>) -> Result<Self> {
        let n = lambda.len();
        if q.len() != n {
            return Err(Error::InvalidParameter(
                "lambda and q matrices must have the same size".into(),
            ));
        }
        for (row_l, row_q) in lambda.iter().zip(&q) {
            if row_l.len() != n || row_q.len() != n {
                return Err(Error::InvalidParameter("traffic matrices must be square".into()));
            }
            for &l in row_l {
                check_lambda(l)?;
            }
            for &p in row_q {
                check_unit("q", p)?;
            }
        }
        Ok(Self::PerPair { lambda, q })
    }

    /// Mean packet count for the ordered pair `(m, n)`, given activation.
    pub fn lambda(&self, m: usize, n: usize) -> f64 {
        match self {
            Self::Homogeneous { lambda, .. } => *lambda,
            Self::PerPair { lambda, .. } => lambda[m][n],
        }
    }

    /// Activation probability for the ordered pair `(m, n)`.
    pub fn q(&self, m: usize, n: usize) -> f64 {
        match self {
            Self::Homogeneous { q, .. } => *q,
            Self::PerPair { q, .. } => q[m][n],
        }
    }

    /// Checks matrix dimensions against a node count.
    pub fn compatible_with(&self, n: usize) -> Result<()> {
        match self {
            Self::Homogeneous { .. } => Ok(()),
            Self::PerPair { lambda, .. } if lambda.len() == n => Ok(()),
            Self::PerPair { lambda, .. } => Err(Error::InvalidInput(format!(
                "traffic matrices are {}x{} but the topology has {n} nodes",
                lambda.len(),
                lambda.len()
            ))),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Homogeneous { lambda, q } => format!("homogeneous(lambda={lambda},q={q})"),
            Self::PerPair { lambda, .. } => format!("per-pair({}x{})", lambda.len(), lambda.len()),
        }
    }
}

// ---- load pmf ----------------------------------------------------------------

/// Finite non-negative mass vector over packet counts `0..len`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pmf {
    mass: Vec<f64>,
}

impl Pmf {
    pub fn from_mass(mass: Vec<f64>) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::InvalidInput("pmf must have at least one entry".into()));
        }
        if mass.iter().any(|&m| !m.is_finite() || m < 0.0) {
            return Err(Error::InvalidInput("pmf entries must be finite and non-negative".into()));
        }
        Ok(Self { mass })
    }

    /// The empty-convolution identity: all mass on zero packets.
    pub fn point_mass_at_zero() -> Self {
        Self { mass: vec![1.0] }
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Mass at packet count `k`; zero beyond the stored support.
    pub fn get(&self, k: usize) -> f64 {
        self.mass.get(k).copied().unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Mass lost to truncation: `1 - total`, clamped at zero for rounding.
    pub fn truncation_deficit(&self) -> f64 {
        (1.0 - self.total_mass()).max(0.0)
    }

    /// Mean and standard deviation of the renormalized distribution.
    pub fn stats(&self) -> Result<(f64, f64)> {
        let total = self.total_mass();
        if total <= 0.0 {
            return Err(Error::InvalidInput("pmf has zero total mass".into()));
        }
        let mean = self
            .mass
            .iter()
            .enumerate()
            .map(|(k, &m)| k as f64 * m)
            .sum::<f64>()
            / total;
        let second = self
            .mass
            .iter()
            .enumerate()
            .map(|(k, &m)| (k as f64).powi(2) * m)
            .sum::<f64>()
            / total;
        Ok((mean, (second - mean * mean).max(0.0).sqrt()))
    }

    /// CSV rows `k,mass`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("k,mass\n");
        for (k, m) in self.mass.iter().enumerate() {
            out.push_str(&format!("{k},{m}\n"));
        }
        out
    }

    pub fn to_json_string(&self) -> Result<String> {
        let value = serde_json::json!({
            "mass": self.mass,
            "truncation_deficit": self.truncation_deficit(),
        });
        Ok(serde_json::to_string_pretty(&value)?)
    }
}

/// Mean and standard deviation of a (possibly sub-normalized) pmf.
pub fn pmf_stats(p: &Pmf) -> Result<(f64, f64)> {
    p.stats()
}

/// Linear convolution of two mass vectors.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Assembles a load pmf from raw `(lambda, q, f)` contributions: builds each
/// pair's truncated `omega` vector and convolves them in order. The result
/// length is `sum(Q_i - 1) + 1`; with a common `Q` over `|A|` pairs that is
/// `|A|(Q-1) + 1`. An empty contribution set yields the point mass at zero.
pub fn assemble_load_pmf(
    contributions: &[(f64, f64, f64)],
    policy: &TruncationPolicy,
) -> Result<Pmf> {
    let mut acc = vec![1.0];
    for &(lambda, q, f) in contributions {
        check_lambda(lambda)?;
        check_unit("q", q)?;
        check_unit("f", f)?;
        let q_len = choose_q(lambda, q, f, policy);
        let vector: Vec<f64> = (0..q_len).map(|k| omega_raw(lambda, q, f, k)).collect();
        acc = convolve(&acc, &vector);
    }
    Pmf::from_mass(acc)
}

/// Per-edge load pmf: convolution of `omega` over the edge's contributing
/// pairs from the routing table under the given traffic configuration.
pub fn edge_load_pmf(
    edge: Edge,
    table: &RoutingTable,
    traffic: &TrafficConfig,
    policy: &TruncationPolicy,
) -> Result<Pmf> {
    if !table.has_edge(edge) {
        return Err(Error::InvalidInput(format!("edge {edge} not in routing table")));
    }
    traffic.compatible_with(table.n_nodes())?;
    let contributions: Vec<(f64, f64, f64)> = table
        .contributions(edge)
        .iter()
        .map(|c| {
            (
                traffic.lambda(c.source, c.target),
                traffic.q(c.source, c.target),
                c.fraction,
            )
        })
        .collect();
    assemble_load_pmf(&contributions, policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_barabasi_albert, Topology};
    use crate::routing::build_routing_table;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn poisson_base_values() {
        assert_eq!(poisson_pmf(0.0, 0).unwrap(), 1.0);
        assert_eq!(poisson_pmf(0.0, 3).unwrap(), 0.0);
        assert_relative_eq!(poisson_pmf(4.0, 0).unwrap(), (-4.0f64).exp(), epsilon = 1e-15);
        assert!(poisson_pmf(-1.0, 0).is_err());
        assert!(poisson_pmf(f64::NAN, 0).is_err());
    }

    #[test]
    fn poisson_sums_to_one() {
        let total: f64 = (0..=200).map(|k| poisson_pmf(4.0, k).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12, "total {total}");
    }

    #[test]
    fn poisson_large_lambda_stays_finite() {
        let p = poisson_pmf(750.0, 750).unwrap();
        assert!(p.is_finite() && p > 0.0);
        // Stirling: the mode of Poisson(lambda) is about 1/sqrt(2 pi lambda).
        let stirling = 1.0 / (2.0 * std::f64::consts::PI * 750.0).sqrt();
        assert_relative_eq!(p, stirling, max_relative = 0.01);
    }

    #[test]
    fn phi_collapses_at_q_extremes() {
        for k in 0..30 {
            assert_relative_eq!(
                phi(4.0, 1.0, k).unwrap(),
                poisson_pmf(4.0, k).unwrap(),
                epsilon = 1e-15
            );
        }
        assert_eq!(phi(4.0, 0.0, 0).unwrap(), 1.0);
        for k in 1..10 {
            assert_eq!(phi(4.0, 0.0, k).unwrap(), 0.0);
        }
    }

    #[test]
    fn phi_zero_branch_matches_simplified_form() {
        // (1 - P0)(1 - q) + P0 == 1 - q + q P0
        for &lambda in &[0.0, 0.3, 1.0, 4.0, 17.5] {
            for &q in &[0.0, 0.25, 0.5, 0.9, 1.0] {
                let verbatim = phi(lambda, q, 0).unwrap();
                let p0 = poisson_pmf(lambda, 0).unwrap();
                assert_relative_eq!(verbatim, 1.0 - q + q * p0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn phi_known_value() {
        assert_relative_eq!(
            phi(4.0, 0.5, 0).unwrap(),
            0.5 + 0.5 * (-4.0f64).exp(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn phi_matches_generative_monte_carlo() {
        // Bernoulli(q) then Poisson(lambda), 1e6 samples.
        use rand::Rng;
        use rand_distr::{Distribution, Poisson};
        let mut rng = crate::seeds::rng(31);
        let poisson = Poisson::new(4.0).unwrap();
        let samples = 1_000_000;
        let mut zeros = 0u64;
        for _ in 0..samples {
            let k = if rng.gen_bool(0.5) { poisson.sample(&mut rng) as u64 } else { 0 };
            if k == 0 {
                zeros += 1;
            }
        }
        let empirical = zeros as f64 / samples as f64;
        assert!(
            (empirical - phi(4.0, 0.5, 0).unwrap()).abs() < 0.002,
            "empirical {empirical}"
        );
    }

    #[test]
    fn omega_collapses_at_f_extremes() {
        for k in 0..40 {
            assert_relative_eq!(
                omega(4.0, 0.75, 1.0, k).unwrap(),
                phi(4.0, 0.75, k).unwrap(),
                epsilon = 1e-15
            );
        }
        assert_eq!(omega(4.0, 0.75, 0.0, 0).unwrap(), 1.0);
        for k in 1..10 {
            assert_eq!(omega(4.0, 0.75, 0.0, k).unwrap(), 0.0);
        }
    }

    #[test]
    fn omega_sums_to_one() {
        let total: f64 = (0..=200).map(|k| omega(4.0, 0.75, 0.5, k).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12, "total {total}");
    }

    #[test]
    fn domain_violations_are_rejected() {
        assert!(phi(4.0, 1.5, 0).is_err());
        assert!(phi(4.0, -0.1, 0).is_err());
        assert!(omega(4.0, 0.5, 1.2, 0).is_err());
        assert!(omega(-4.0, 0.5, 0.5, 0).is_err());
    }

    proptest! {
        #[test]
        fn phi_and_omega_are_valid_pmfs(
            lambda in 0.0f64..20.0,
            q in 0.0f64..=1.0,
            f in 0.0f64..=1.0,
        ) {
            let mut phi_sum = 0.0;
            let mut omega_sum = 0.0;
            for k in 0..400 {
                let p = phi(lambda, q, k).unwrap();
                let o = omega(lambda, q, f, k).unwrap();
                prop_assert!(p >= 0.0 && o >= 0.0);
                phi_sum += p;
                omega_sum += o;
            }
            prop_assert!((phi_sum - 1.0).abs() < 1e-9);
            prop_assert!((omega_sum - 1.0).abs() < 1e-9);
            // Mass 1 - f bypasses the edge entirely.
            prop_assert!(omega(lambda, q, f, 0).unwrap() >= 1.0 - f);
        }
    }

    #[test]
    fn choose_q_degenerate_cases() {
        let policy = TruncationPolicy::default();
        assert_eq!(choose_q(0.0, 1.0, 1.0, &policy), 1);
        // q = 0 or f = 0 put zero mass above k = 0, so the floor is enough.
        assert_eq!(choose_q(4.0, 0.0, 1.0, &policy), 5);
        assert_eq!(choose_q(4.0, 1.0, 0.0, &policy), 5);
    }

    #[test]
    fn choose_q_accepts_paper_scale_length() {
        let policy = TruncationPolicy::default();
        for &q in &[1.0, 0.75, 0.5, 0.25] {
            for &f in &[1.0, 0.5, 0.25] {
                assert!(policy.accepts(4.0, q, f, 60));
            }
        }
    }

    #[test]
    fn choose_q_matches_linear_scan_oracle() {
        for (lambda, q, f, epsilon) in [
            (4.0, 1.0, 1.0, 0.001),
            (4.0, 0.25, 0.5, 0.001),
            (9.3, 0.8, 0.33, 0.01),
            (0.4, 1.0, 1.0, 0.001),
        ] {
            let policy = TruncationPolicy::new(epsilon).unwrap();
            let chosen = choose_q(lambda, q, f, &policy);
            let floor = lambda.round() as usize + 1;
            let reference = omega(lambda, q, f, lambda.round() as usize).unwrap();
            let oracle = (floor..)
                .find(|&len| omega(lambda, q, f, len - 1).unwrap() <= epsilon * reference)
                .unwrap();
            assert_eq!(chosen, oracle);
            assert!(chosen >= floor);
            assert!(policy.accepts(lambda, q, f, chosen));
            if chosen > floor {
                assert!(!policy.accepts(lambda, q, f, chosen - 1));
            }
        }
    }

    #[test]
    fn truncation_policy_validation() {
        assert!(TruncationPolicy::new(0.0).is_err());
        assert!(TruncationPolicy::new(1.0).is_err());
        assert!(TruncationPolicy::new(0.5).is_ok());
    }

    #[test]
    fn traffic_config_validation_and_lookup() {
        assert!(TrafficConfig::homogeneous(4.0, 1.5).is_err());
        assert!(TrafficConfig::homogeneous(-1.0, 0.5).is_err());
        let homog = TrafficConfig::homogeneous(4.0, 0.5).unwrap();
        assert_eq!(homog.lambda(3, 7), 4.0);
        assert_eq!(homog.q(7, 3), 0.5);

        // Asymmetric per-pair parameters are allowed.
        let lambda = vec![vec![0.0, 2.0], vec![3.0, 0.0]];
        let q = vec![vec![0.0, 1.0], vec![0.25, 0.0]];
        let pp = TrafficConfig::per_pair(lambda, q).unwrap();
        assert_eq!(pp.lambda(0, 1), 2.0);
        assert_eq!(pp.q(1, 0), 0.25);
        assert_ne!(pp.q(0, 1), pp.q(1, 0));
        assert!(pp.compatible_with(2).is_ok());
        assert!(pp.compatible_with(3).is_err());

        let ragged = TrafficConfig::per_pair(vec![vec![0.0]], vec![vec![0.0, 1.0]]);
        assert!(ragged.is_err());
    }

    #[test]
    fn convolve_hand_example() {
        let out = convolve(&[0.5, 0.5], &[0.5, 0.5]);
        assert_eq!(out, vec![0.25, 0.5, 0.25]);
    }

    #[test]
    fn empty_contribution_set_is_point_mass() {
        let pmf = assemble_load_pmf(&[], &TruncationPolicy::default()).unwrap();
        assert_eq!(pmf.mass(), &[1.0]);
        assert_eq!(pmf.truncation_deficit(), 0.0);
    }

    #[test]
    fn assembly_length_is_tight() {
        // Homogeneous pairs: |A|(Q - 1) + 1, not the looser Q * |A|.
        let policy = TruncationPolicy::default();
        let q_len = choose_q(4.0, 1.0, 1.0, &policy);
        let entries = vec![(4.0, 1.0, 1.0); 3];
        let pmf = assemble_load_pmf(&entries, &policy).unwrap();
        assert_eq!(pmf.len(), 3 * (q_len - 1) + 1);
    }

    #[test]
    fn assembly_order_does_not_matter() {
        let policy = TruncationPolicy::default();
        let entries = [(4.0, 1.0, 1.0), (2.5, 0.5, 0.25), (7.0, 0.8, 0.5), (1.0, 0.9, 1.0)];
        let forward = assemble_load_pmf(&entries, &policy).unwrap();
        let mut reversed = entries;
        reversed.reverse();
        let backward = assemble_load_pmf(&reversed, &policy).unwrap();
        assert_eq!(forward.len(), backward.len());
        for k in 0..forward.len() {
            assert!((forward.get(k) - backward.get(k)).abs() < 1e-12);
        }
    }

    #[test]
    fn edge_load_pmf_requires_known_edge() {
        let g = Topology::new(3, [Edge::new(0, 1).unwrap(), Edge::new(1, 2).unwrap()]).unwrap();
        let table = build_routing_table(&g).unwrap();
        let traffic = TrafficConfig::homogeneous(4.0, 1.0).unwrap();
        let missing = Edge::new(0, 2).unwrap();
        assert!(edge_load_pmf(missing, &table, &traffic, &TruncationPolicy::default()).is_err());
    }

    #[test]
    fn edge_load_pmf_retains_nearly_all_mass() {
        let g = generate_barabasi_albert(30, 4, 42).unwrap();
        let table = build_routing_table(&g).unwrap();
        let traffic = TrafficConfig::homogeneous(4.0, 1.0).unwrap();
        let policy = TruncationPolicy::default();
        let centrality = crate::graph::edge_betweenness(&g).unwrap();
        let top = crate::graph::centrality_ranking(&centrality)[0].0;
        let pmf = edge_load_pmf(top, &table, &traffic, &policy).unwrap();
        assert!(pmf.total_mass() > 0.99, "mass {}", pmf.total_mass());
        assert!(pmf.total_mass() <= 1.0 + 1e-9);
    }

    #[test]
    fn stats_small_cases() {
        let point = Pmf::from_mass(vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(point.stats().unwrap(), (5.0, 0.0));

        let fair = Pmf::from_mass(vec![0.5, 0.5]).unwrap();
        let (mean, std) = fair.stats().unwrap();
        assert_relative_eq!(mean, 0.5, epsilon = 1e-15);
        assert_relative_eq!(std, 0.5, epsilon = 1e-15);

        assert!(Pmf::from_mass(vec![0.0]).unwrap().stats().is_err());
    }

    #[test]
    fn stats_match_poisson_moments() {
        let mass: Vec<f64> = (0..60).map(|k| poisson_raw(4.0, k)).collect();
        let (mean, std) = Pmf::from_mass(mass).unwrap().stats().unwrap();
        assert!((mean - 4.0).abs() < 1e-3, "mean {mean}");
        assert!((std - 2.0).abs() < 1e-3, "std {std}");
    }

    #[test]
    fn pmf_validation() {
        assert!(Pmf::from_mass(vec![]).is_err());
        assert!(Pmf::from_mass(vec![0.5, -0.1]).is_err());
        assert!(Pmf::from_mass(vec![f64::NAN]).is_err());
    }

    #[test]
    fn csv_and_json_exports() {
        let pmf = Pmf::from_mass(vec![0.25, 0.75]).unwrap();
        assert_eq!(pmf.to_csv_string(), "k,mass\n0,0.25\n1,0.75\n");
        let parsed: serde_json::Value = serde_json::from_str(&pmf.to_json_string().unwrap()).unwrap();
        assert_eq!(parsed["mass"][1], 0.75);
        assert_eq!(parsed["truncation_deficit"], 0.0);
    }
}
