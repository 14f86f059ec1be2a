//! Quantile-based capacity allocation: the minimal integer capacity per edge
//! whose cumulative load probability reaches the local performance criterion.
//!
//! Cumulative mass is computed on the renormalized pmf so the quantile stays
//! well-defined under truncation; edges whose retained mass falls below the
//! criterion raise [`Error::TruncationInsufficient`] instead of silently
//! producing an optimistic capacity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::Edge;
use crate::pmf::Pmf;
use crate::{Error, Result};

/// Per-edge integer capacities together with the criterion they satisfy.
#[derive(Clone, Debug, PartialEq)]
pub struct CapacityPlan {
    pub capacities: BTreeMap<Edge, u64>,
    /// Target probability that an edge is congestion-free in a frame.
    pub criterion: f64,
    pub provenance: PlanProvenance,
}

pub const PLAN_FORMAT_VERSION: u32 = 1;

/// On-disk plan document; capacities are `[[a, b], capacity]` entries in
/// edge order.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanFile {
    version: u32,
    criterion: f64,
    provenance: PlanProvenance,
    capacities: Vec<(Edge, u64)>,
}

/// How the plan's pmfs were produced; carried along for reports and exports.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanProvenance {
    pub traffic: String,
    pub epsilon: f64,
    pub topology: String,
}

impl CapacityPlan {
    pub fn capacity(&self, edge: Edge) -> Option<u64> {
        self.capacities.get(&edge).copied()
    }

    /// CSV rows `edge,capacity`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("edge,capacity\n");
        for (edge, capacity) in &self.capacities {
            out.push_str(&format!("{edge},{capacity}\n"));
        }
        out
    }

    pub fn to_json_string(&self) -> Result<String> {
        let file = PlanFile {
            version: PLAN_FORMAT_VERSION,
            criterion: self.criterion,
            provenance: self.provenance.clone(),
            capacities: self.capacities.iter().map(|(&e, &c)| (e, c)).collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: PlanFile = serde_json::from_str(text)?;
        if file.version != PLAN_FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported plan format version {}",
                file.version
            )));
        }
        Ok(Self {
            capacities: file.capacities.into_iter().collect(),
            criterion: file.criterion,
            provenance: file.provenance,
        })
    }
}

fn check_criterion(c: f64) -> Result<()> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "criterion c must lie in (0, 1), got {c}"
        )));
    }
    Ok(())
}

/// Minimal `k` with renormalized cumulative mass `>= c`. The edge label is
/// only used for error reporting.
fn capacity_for(edge: Edge, pmf: &Pmf, c: f64) -> Result<u64> {
    let total = pmf.total_mass();
    if total < c {
        return Err(Error::TruncationInsufficient {
            edge: edge.to_string(),
            retained: total,
            criterion: c,
        });
    }
    let mut cumulative = 0.0;
    for (k, &m) in pmf.mass().iter().enumerate() {
        cumulative += m;
        if cumulative / total >= c {
            return Ok(k as u64);
        }
    }
    // Rounding can leave cumulative/total marginally below 1 at the end.
    Ok((pmf.len() - 1) as u64)
}

/// Allocates the minimal capacity satisfying criterion `c` for every edge.
pub fn allocate(pmfs: &BTreeMap<Edge, Pmf>, c: f64) -> Result<CapacityPlan> {
    check_criterion(c)?;
    let mut capacities = BTreeMap::new();
    for (&edge, pmf) in pmfs {
        capacities.insert(edge, capacity_for(edge, pmf, c)?);
    }
    Ok(CapacityPlan {
        capacities,
        criterion: c,
        provenance: PlanProvenance::default(),
    })
}

/// One row of the per-edge plan report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub edge: Edge,
    pub capacity: u64,
    pub mean: f64,
    pub std: f64,
    /// Probability that a frame's load strictly exceeds the capacity,
    /// under the renormalized pmf. At most `1 - c` by construction.
    pub exceedance: f64,
    /// 1-based rank by descending edge betweenness.
    pub centrality_rank: usize,
}

/// Per-edge report over a plan, its pmfs, and a centrality map; all three
/// must cover exactly the same edge set.
pub fn plan_report(
    plan: &CapacityPlan,
    pmfs: &BTreeMap<Edge, Pmf>,
    centrality: &BTreeMap<Edge, f64>,
) -> Result<Vec<ReportRow>> {
    let edges: Vec<Edge> = plan.capacities.keys().copied().collect();
    if pmfs.keys().copied().ne(edges.iter().copied())
        || centrality.keys().copied().ne(edges.iter().copied())
    {
        return Err(Error::InvalidInput(
            "plan, pmfs, and centrality must cover the same edge set".into(),
        ));
    }
    let ranking = crate::graph::centrality_ranking(centrality);
    let rank_of: BTreeMap<Edge, usize> = ranking
        .iter()
        .enumerate()
        .map(|(i, &(e, _))| (e, i + 1))
        .collect();

    let mut rows = Vec::with_capacity(edges.len());
    for edge in edges {
        let pmf = &pmfs[&edge];
        let capacity = plan.capacities[&edge];
        let total = pmf.total_mass();
        let covered: f64 = pmf.mass().iter().take(capacity as usize + 1).sum();
        let (mean, std) = pmf.stats()?;
        rows.push(ReportRow {
            edge,
            capacity,
            mean,
            std,
            exceedance: (1.0 - covered / total).max(0.0),
            centrality_rank: rank_of[&edge],
        });
    }
    Ok(rows)
}

/// CSV export of report rows: `edge,capacity,exceedance,mean,std,centrality_rank`.
pub fn report_to_csv_string(rows: &[ReportRow]) -> String {
    let mut out = String::from("edge,capacity,exceedance,mean,std,centrality_rank\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.edge, r.capacity, r.exceedance, r.mean, r.std, r.centrality_rank
        ));
    }
    out
}
