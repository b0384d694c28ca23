use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::navgraph::{InstanceError, SopInstance};

/// Relative tolerance used for budget and arithmetic checks.
pub const TOLERANCE: f64 = 1e-9;

pub(crate) fn tol(scale: f64) -> f64 {
    TOLERANCE * scale.abs().max(1.0)
}

/// A path through an instance and its accounting. `visited_clusters`
/// includes the start node's cluster.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SopSolution {
    pub path: Vec<usize>,
    pub visited_clusters: BTreeSet<usize>,
    pub total_reward: f64,
    pub total_cost: f64,
}

impl SopSolution {
    /// Accounting recomputed from the instance. Nodes out of range are
    /// skipped in the totals; [`validate`] reports them.
    pub fn from_path(inst: &SopInstance, path: Vec<usize>) -> Self {
        let n = inst.n();
        let visited_clusters: BTreeSet<usize> = path.iter().filter(|&&v| v < n).map(|&v| inst.clusters[v]).collect();
        let total_reward = reward_of(inst, &visited_clusters);
        let total_cost = path
            .windows(2)
            .filter(|p| p[0] < n && p[1] < n)
            .fold(0.0, |acc, p| acc + inst.cost.get(p[0], p[1]));
        SopSolution {
            path,
            visited_clusters,
            total_reward,
            total_cost,
        }
    }

    /// The path that stays at the start.
    pub fn stay(inst: &SopInstance) -> Self {
        Self::from_path(inst, vec![inst.start])
    }

    /// `reward cost id id ...`
    pub fn to_line(&self) -> String {
        let mut s = format!("{} {}", self.total_reward, self.total_cost);
        for v in &self.path {
            let _ = write!(s, " {v}");
        }
        s
    }

    /// Parses [`Self::to_line`] output, keeping the claimed totals as
    /// written so [`validate`] can check them.
    pub fn from_line(inst: &SopInstance, line: &str) -> Result<Self, InstanceError> {
        let err = |msg: String| InstanceError::Parse { line: 1, msg };
        let mut tok = line.split_whitespace();
        let mut num = |what: &str| -> Result<f64, InstanceError> {
            tok.next()
                .ok_or_else(|| err(format!("missing {what}")))?
                .parse::<f64>()
                .map_err(|e| err(format!("{what}: {e}")))
        };
        let total_reward = num("reward")?;
        let total_cost = num("cost")?;
        let path = tok
            .map(|t| t.parse::<usize>().map_err(|e| err(format!("node id {t:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let mut sol = Self::from_path(inst, path);
        sol.total_reward = total_reward;
        sol.total_cost = total_cost;
        Ok(sol)
    }
}

pub(crate) fn reward_of(inst: &SopInstance, clusters: &BTreeSet<usize>) -> f64 {
    let members = inst.cluster_members();
    clusters
        .iter()
        .filter_map(|&c| members.get(c).and_then(|m| m.first()))
        .fold(0.0, |acc, &v| acc + inst.rewards[v])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    EmptyPath,
    WrongStart { found: usize },
    WrongEnd { found: usize, expected: usize },
    NodeOutOfRange { position: usize, node: usize },
    /// A node entered or left more than once, i.e. a subtour.
    RepeatedNode { node: usize },
    Degree { node: usize, in_degree: usize, out_degree: usize },
    RepeatedCluster { cluster: usize },
    Unreachable { from: usize, to: usize },
    OverBudget { cost: f64, budget: f64 },
    CostMismatch { claimed: f64, actual: f64 },
    RewardMismatch { claimed: f64, actual: f64 },
    ClusterSetMismatch,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every path constraint and the claimed accounting. Never fails;
/// problems are listed in the report.
pub fn validate(inst: &SopInstance, sol: &SopSolution) -> ValidationReport {
    let mut out = Vec::new();
    let n = inst.n();
    let path = &sol.path;
    if path.is_empty() {
        out.push(Violation::EmptyPath);
        return ValidationReport { violations: out };
    }
    if path[0] != inst.start {
        out.push(Violation::WrongStart { found: path[0] });
    }
    if let Some(end) = inst.end {
        let last = *path.last().unwrap();
        if last != end {
            out.push(Violation::WrongEnd { found: last, expected: end });
        }
    }
    let mut in_range = true;
    for (position, &node) in path.iter().enumerate() {
        if node >= n {
            out.push(Violation::NodeOutOfRange { position, node });
            in_range = false;
        }
    }
    if !in_range {
        return ValidationReport { violations: out };
    }

    let mut seen = BTreeSet::new();
    for &v in path {
        if !seen.insert(v) {
            out.push(Violation::RepeatedNode { node: v });
        }
    }
    let mut indeg = vec![0usize; n];
    let mut outdeg = vec![0usize; n];
    for p in path.windows(2) {
        outdeg[p[0]] += 1;
        indeg[p[1]] += 1;
    }
    let last = path.len() - 1;
    for (i, &v) in path.iter().enumerate() {
        let want_in = usize::from(i > 0);
        let want_out = usize::from(i < last);
        // Report each node once, at its first occurrence.
        if path[..i].contains(&v) {
            continue;
        }
        if indeg[v] != want_in || outdeg[v] != want_out {
            out.push(Violation::Degree {
                node: v,
                in_degree: indeg[v],
                out_degree: outdeg[v],
            });
        }
    }

    // Distinct nodes only; a repeated node was reported above.
    let mut clusters = BTreeSet::new();
    let mut distinct = BTreeSet::new();
    for &v in path {
        if distinct.insert(v) && !clusters.insert(inst.clusters[v]) {
            out.push(Violation::RepeatedCluster {
                cluster: inst.clusters[v],
            });
        }
    }
    for p in path.windows(2) {
        if !inst.cost.get(p[0], p[1]).is_finite() {
            out.push(Violation::Unreachable { from: p[0], to: p[1] });
        }
    }

    let actual_cost = inst.cost.path_cost(path);
    if actual_cost > inst.budget + tol(inst.budget) {
        out.push(Violation::OverBudget {
            cost: actual_cost,
            budget: inst.budget,
        });
    }
    if !((sol.total_cost - actual_cost).abs() <= tol(actual_cost)) {
        out.push(Violation::CostMismatch {
            claimed: sol.total_cost,
            actual: actual_cost,
        });
    }
    let actual_reward = reward_of(inst, &clusters);
    if !((sol.total_reward - actual_reward).abs() <= tol(actual_reward)) {
        out.push(Violation::RewardMismatch {
            claimed: sol.total_reward,
            actual: actual_reward,
        });
    }
    if sol.visited_clusters != clusters {
        out.push(Violation::ClusterSetMismatch);
    }
    ValidationReport { violations: out }
}
