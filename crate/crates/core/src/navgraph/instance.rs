//! Set orienteering instances and their line-oriented text format.
//!
//! ```text
//! # comments and blank lines are ignored
//! n budget start [end]
//! reward_0 ... reward_{n-1}
//! cluster_0 ... cluster_{n-1}
//! c_00 ... c_0{n-1}          (n cost rows; `inf` marks a missing edge)
//! ...
//! detection_0 ... detection_{n-1}   (optional; defaults to the rewards)
//! ```

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Dense `n x n` edge-cost matrix in meters. Missing edges are infinite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(n: usize) -> Self {
        let mut data = vec![f64::INFINITY; n * n];
        for i in 0..n {
            data[i * n + i] = 0.0;
        }
        CostMatrix { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, InstanceError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(InstanceError::Invalid(format!("cost row {i} has {} entries, expected {n}", row.len())));
            }
            data.extend(row);
        }
        Ok(CostMatrix { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        CostMatrix { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Sum of consecutive edge costs along `path`.
    pub fn path_cost(&self, path: &[usize]) -> f64 {
        path.windows(2).fold(0.0, |acc, p| acc + self.get(p[0], p[1]))
    }
}

/// A set orienteering problem: pick a path from `start` that collects each
/// cluster's reward at most once, with total edge cost at most `budget`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SopInstance {
    /// Per-node reward; equal within a cluster.
    pub rewards: Vec<f64>,
    /// Per-node detection proxy; equal within a cluster.
    pub detection: Vec<f64>,
    /// Cluster index of every node, dense in `0..cluster_count()`.
    pub clusters: Vec<usize>,
    pub cost: CostMatrix,
    pub start: usize,
    /// Required final node; `None` for open-ended paths.
    pub end: Option<usize>,
    pub budget: f64,
}

impl SopInstance {
    pub fn new(rewards: Vec<f64>, clusters: Vec<usize>, cost: CostMatrix, start: usize, budget: f64) -> Self {
        SopInstance {
            detection: rewards.clone(),
            rewards,
            clusters,
            cost,
            start,
            end: None,
            budget,
        }
    }

    pub fn n(&self) -> usize {
        self.rewards.len()
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.iter().map(|c| c + 1).max().unwrap_or(0)
    }

    /// Nodes of each cluster, ascending.
    pub fn cluster_members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cluster_count()];
        for (node, &c) in self.clusters.iter().enumerate() {
            out[c].push(node);
        }
        out
    }

    pub fn cluster_reward(&self, cluster: usize) -> f64 {
        self.clusters
            .iter()
            .position(|&c| c == cluster)
            .map_or(0.0, |node| self.rewards[node])
    }

    pub fn cluster_detection(&self, cluster: usize) -> f64 {
        self.clusters
            .iter()
            .position(|&c| c == cluster)
            .map_or(0.0, |node| self.detection[node])
    }

    /// Clusters other than the start node's own.
    pub fn selectable_clusters(&self) -> usize {
        self.cluster_count().saturating_sub(1)
    }

    pub fn check(&self) -> Result<(), InstanceError> {
        let n = self.n();
        let bad = |m: String| Err(InstanceError::Invalid(m));
        if n == 0 {
            return bad("no nodes".into());
        }
        if self.clusters.len() != n || self.detection.len() != n || self.cost.len() != n {
            return bad("per-node vectors disagree on n".into());
        }
        if self.start >= n {
            return bad(format!("start {} out of range", self.start));
        }
        if let Some(t) = self.end {
            if t >= n || t == self.start {
                return bad(format!("end {t} must be a node other than the start"));
            }
            if self.clusters[t] == self.clusters[self.start] {
                return bad("end shares the start's cluster".into());
            }
        }
        if !(self.budget >= 0.0) {
            return bad(format!("budget {} must be >= 0", self.budget));
        }
        if self.rewards.iter().chain(&self.detection).any(|r| !(r.is_finite() && *r >= 0.0)) {
            return bad("rewards and detection values must be finite and >= 0".into());
        }
        let members = self.cluster_members();
        for (c, nodes) in members.iter().enumerate() {
            if nodes.is_empty() {
                return bad(format!("cluster {c} is empty; cluster ids must be dense"));
            }
            let r = self.rewards[nodes[0]];
            let d = self.detection[nodes[0]];
            if nodes.iter().any(|&v| self.rewards[v] != r || self.detection[v] != d) {
                return bad(format!("cluster {c} has non-uniform rewards"));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let c = self.cost.get(i, j);
                if c.is_nan() || c < 0.0 {
                    return bad(format!("cost ({i},{j}) = {c} must be >= 0"));
                }
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{} {} {}", self.n(), self.budget, self.start);
        if let Some(t) = self.end {
            let _ = write!(s, " {t}");
        }
        s.push('\n');
        let join = |v: &mut dyn Iterator<Item = String>| v.collect::<Vec<_>>().join(" ");
        s += &join(&mut self.rewards.iter().map(|r| r.to_string()));
        s.push('\n');
        s += &join(&mut self.clusters.iter().map(|c| c.to_string()));
        s.push('\n');
        for i in 0..self.n() {
            s += &join(&mut self.cost.row(i).iter().map(|c| c.to_string()));
            s.push('\n');
        }
        if self.detection != self.rewards {
            s += &join(&mut self.detection.iter().map(|d| d.to_string()));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, InstanceError> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        let parse_f64s = |(line, l): (usize, &str)| -> Result<Vec<f64>, InstanceError> {
            l.split_whitespace()
                .map(|t| {
                    t.parse::<f64>().map_err(|e| InstanceError::Parse {
                        line,
                        msg: format!("{t:?}: {e}"),
                    })
                })
                .collect()
        };
        let parse_usizes = |(line, l): (usize, &str)| -> Result<Vec<usize>, InstanceError> {
            l.split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|e| InstanceError::Parse {
                        line,
                        msg: format!("{t:?}: {e}"),
                    })
                })
                .collect()
        };
        let header = *lines.first().ok_or(InstanceError::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let fields: Vec<&str> = header.1.split_whitespace().collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(InstanceError::Parse {
                line: header.0,
                msg: "header must be `n budget start [end]`".into(),
            });
        }
        let perr = |msg: String| InstanceError::Parse { line: header.0, msg };
        let n: usize = fields[0].parse().map_err(|e| perr(format!("n: {e}")))?;
        let budget: f64 = fields[1].parse().map_err(|e| perr(format!("budget: {e}")))?;
        let start: usize = fields[2].parse().map_err(|e| perr(format!("start: {e}")))?;
        let end = match fields.get(3) {
            Some(t) => Some(t.parse::<usize>().map_err(|e| perr(format!("end: {e}")))?),
            None => None,
        };
        if lines.len() < 3 + n || lines.len() > 4 + n {
            return Err(InstanceError::Parse {
                line: header.0,
                msg: format!("expected {} or {} data lines, found {}", 3 + n, 4 + n, lines.len()),
            });
        }
        let expect_len = |v: &Vec<f64>, line: usize, what: &str| {
            if v.len() != n {
                Err(InstanceError::Parse {
                    line,
                    msg: format!("{what}: expected {n} values, found {}", v.len()),
                })
            } else {
                Ok(())
            }
        };
        let rewards = parse_f64s(lines[1])?;
        expect_len(&rewards, lines[1].0, "rewards")?;
        let clusters = parse_usizes(lines[2])?;
        if clusters.len() != n {
            return Err(InstanceError::Parse {
                line: lines[2].0,
                msg: format!("clusters: expected {n} values"),
            });
        }
        let mut rows = Vec::with_capacity(n);
        for &l in &lines[3..3 + n] {
            let row = parse_f64s(l)?;
            expect_len(&row, l.0, "cost row")?;
            rows.push(row);
        }
        let detection = match lines.get(3 + n) {
            Some(&l) => {
                let d = parse_f64s(l)?;
                expect_len(&d, l.0, "detection")?;
                d
            }
            None => rewards.clone(),
        };
        let inst = SopInstance {
            rewards,
            detection,
            clusters,
            cost: CostMatrix::from_rows(rows)?,
            start,
            end,
            budget,
        };
        inst.check()?;
        Ok(inst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> SopInstance {
        let cost = CostMatrix::from_rows(vec![
            vec![0.0, 1.5, f64::INFINITY],
            vec![1.5, 0.0, 2.0],
            vec![f64::INFINITY, 2.0, 0.0],
        ])
        .unwrap();
        SopInstance::new(vec![0.0, 1.0, 2.5], vec![0, 1, 2], cost, 0, 10.0)
    }

    #[test]
    fn text_format_literal() {
        let text = sample().to_text();
        assert_eq!(text, "3 10 0\n0 1 2.5\n0 1 2\n0 1.5 inf\n1.5 0 2\ninf 2 0\n");
        assert_eq!(SopInstance::from_text(&text).unwrap(), sample());
    }

    #[test]
    fn rejects_malformed() {
        assert!(SopInstance::from_text("").is_err());
        assert!(SopInstance::from_text("2 1 0\n0 1\n0 1\n0 1\n").is_err());
        // Non-uniform cluster reward.
        let bad = "3 1 0\n0 1 2\n0 1 1\n0 1 1\n1 0 1\n1 1 0\n";
        assert!(matches!(SopInstance::from_text(bad), Err(InstanceError::Invalid(_))));
    }

    proptest! {
        #[test]
        fn text_round_trip(
            n in 1usize..7,
            seed in any::<u64>(),
            with_end in any::<bool>(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let clusters: Vec<usize> = (0..n).collect();
            let rewards: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..5.0)).collect();
            let cost = CostMatrix::from_fn(n, |i, j| if i == j { 0.0 } else { rng.gen_range(0.0..100.0) });
            let mut inst = SopInstance::new(rewards, clusters, cost, 0, rng.gen_range(0.0..300.0));
            if with_end && n > 1 {
                inst.end = Some(n - 1);
            }
            inst.detection = (0..n).map(|i| i as f64 * 0.5).collect();
            let back = SopInstance::from_text(&inst.to_text()).unwrap();
            prop_assert_eq!(back, inst);
        }
    }
}
