use super::solution::{tol, SopSolution};
use super::SopError;
use crate::navgraph::SopInstance;

pub const DEFAULT_EXACT_LIMIT: usize = 12;

/// Minimum path cost for every subset of selectable clusters.
///
/// Bit `b` of a mask stands for cluster `bit_cluster[b]`; the start node's
/// cluster is implicit in every mask. `min_cost[mask]` is the cheapest path
/// from the start that visits exactly those clusters (ending at the end node
/// when one is required), or infinity when no such path fits the budget.
#[derive(Clone, Debug)]
pub struct SubsetTable<'a> {
    inst: &'a SopInstance,
    pub bit_cluster: Vec<usize>,
    node_bit: Vec<Option<u32>>,
    pub min_cost: Vec<f64>,
    base_reward: f64,
    base_detection: f64,
    bit_reward: Vec<f64>,
    bit_detection: Vec<f64>,
}

impl<'a> SubsetTable<'a> {
    pub fn build(inst: &'a SopInstance, limit: usize) -> Result<Self, SopError> {
        inst.check()?;
        let n = inst.n();
        let start_cluster = inst.clusters[inst.start];
        let k = inst.selectable_clusters();
        if k > limit || k > 30 {
            return Err(SopError::TooLarge { clusters: k, limit });
        }
        let bit_cluster: Vec<usize> = (0..inst.cluster_count()).filter(|&c| c != start_cluster).collect();
        let mut cluster_bit = vec![None; inst.cluster_count()];
        for (b, &c) in bit_cluster.iter().enumerate() {
            cluster_bit[c] = Some(b as u32);
        }
        let node_bit: Vec<Option<u32>> = inst.clusters.iter().map(|&c| cluster_bit[c]).collect();
        let first = |c: usize| inst.clusters.iter().position(|&x| x == c).unwrap();
        let bit_reward = bit_cluster.iter().map(|&c| inst.rewards[first(c)]).collect();
        let bit_detection = bit_cluster.iter().map(|&c| inst.detection[first(c)]).collect();

        let full = 1usize << k;
        let budget = inst.budget + tol(inst.budget);
        let mut f = vec![f64::INFINITY; full * n];
        f[inst.start] = 0.0;
        for mask in 0..full {
            for v in 0..n {
                let d = f[mask * n + v];
                if !d.is_finite() {
                    continue;
                }
                for u in 0..n {
                    let Some(b) = node_bit[u] else { continue };
                    if mask >> b & 1 == 1 {
                        continue;
                    }
                    let c = d + inst.cost.get(v, u);
                    let slot = &mut f[(mask | 1 << b) * n + u];
                    if c <= budget && c < *slot {
                        *slot = c;
                    }
                }
            }
        }
        let min_cost = (0..full)
            .map(|mask| match inst.end {
                Some(e) => f[mask * n + e],
                None => f[mask * n..(mask + 1) * n].iter().copied().fold(f64::INFINITY, f64::min),
            })
            .collect();
        Ok(SubsetTable {
            inst,
            bit_cluster,
            node_bit,
            min_cost,
            base_reward: inst.rewards[inst.start],
            base_detection: inst.detection[inst.start],
            bit_reward,
            bit_detection,
        })
    }

    pub fn instance(&self) -> &SopInstance {
        self.inst
    }

    pub fn mask_count(&self) -> usize {
        self.min_cost.len()
    }

    pub fn feasible(&self, mask: usize) -> bool {
        self.min_cost[mask].is_finite()
    }

    pub fn reward(&self, mask: usize) -> f64 {
        self.base_reward + bits(mask).map(|b| self.bit_reward[b]).sum::<f64>()
    }

    pub fn detection(&self, mask: usize) -> f64 {
        self.base_detection + bits(mask).map(|b| self.bit_detection[b]).sum::<f64>()
    }

    /// Lexicographically maximizes `keys` over feasible masks accepted by
    /// `admissible`, then minimizes cost, then returns the lexicographically
    /// smallest path among the survivors.
    pub fn optimize(&self, admissible: &dyn Fn(usize) -> bool, keys: &[&dyn Fn(usize) -> f64]) -> Option<SopSolution> {
        let mut cand: Vec<usize> = (0..self.mask_count())
            .filter(|&m| self.feasible(m) && admissible(m))
            .collect();
        if cand.is_empty() {
            return None;
        }
        let neg_cost = |m: usize| -self.min_cost[m];
        for key in keys.iter().copied().chain([&neg_cost as &dyn Fn(usize) -> f64]) {
            let best = cand.iter().map(|&m| key(m)).fold(f64::NEG_INFINITY, f64::max);
            cand.retain(|&m| key(m) >= best - tol(best));
        }
        let c_star = cand.iter().map(|&m| self.min_cost[m]).fold(f64::INFINITY, f64::min);
        let path = self.lex_path(&cand, c_star);
        Some(SopSolution::from_path(self.inst, path))
    }

    /// Smallest path (lexicographic over node ids) whose cluster set is in
    /// `tied` and whose cost is within tolerance of `c_star`.
    fn lex_path(&self, tied: &[usize], c_star: f64) -> Vec<usize> {
        let inst = self.inst;
        let n = inst.n();
        let full = self.mask_count();
        let mut in_t = vec![false; full];
        for &m in tied {
            in_t[m] = true;
        }
        let end_ok = |v: usize| inst.end.is_none_or(|e| e == v);
        let holds = |s: usize, v: usize| {
            if s == 0 {
                v == inst.start
            } else {
                self.node_bit[v].is_some_and(|b| s >> b & 1 == 1)
            }
        };
        // h[s][v]: cheapest completion from v, having visited s, to a tied set.
        let mut h = vec![f64::INFINITY; full * n];
        for s in (0..full).rev() {
            for v in 0..n {
                if !holds(s, v) {
                    continue;
                }
                let mut best = if in_t[s] && end_ok(v) { 0.0 } else { f64::INFINITY };
                for u in 0..n {
                    let Some(b) = self.node_bit[u] else { continue };
                    if s >> b & 1 == 1 {
                        continue;
                    }
                    let c = inst.cost.get(v, u) + h[(s | 1 << b) * n + u];
                    if c < best {
                        best = c;
                    }
                }
                h[s * n + v] = best;
            }
        }

        let t = tol(c_star);
        let (mut s, mut cur, mut rem) = (0usize, inst.start, c_star);
        let mut path = vec![inst.start];
        while !(in_t[s] && end_ok(cur)) {
            let next = (0..n).find_map(|u| {
                let b = self.node_bit[u]?;
                if s >> b & 1 == 1 {
                    return None;
                }
                let step = inst.cost.get(cur, u);
                (step + h[(s | 1 << b) * n + u] <= rem + t).then_some((u, b, step))
            });
            let Some((u, b, step)) = next else {
                // Unreachable given a consistent table; keep what we have.
                debug_assert!(false, "lexicographic reconstruction stalled");
                break;
            };
            rem -= step;
            s |= 1 << b;
            cur = u;
            path.push(u);
        }
        path
    }
}

fn bits(mask: usize) -> impl Iterator<Item = usize> {
    (0..usize::BITS as usize).filter(move |b| mask >> b & 1 == 1)
}

/// Reward-optimal path, cheapest among those, lexicographically smallest
/// among those.
pub fn solve_exact(inst: &SopInstance) -> Result<SopSolution, SopError> {
    solve_exact_with(inst, DEFAULT_EXACT_LIMIT)
}

pub fn solve_exact_with(inst: &SopInstance, limit: usize) -> Result<SopSolution, SopError> {
    let table = SubsetTable::build(inst, limit)?;
    let reward = |m: usize| table.reward(m);
    table.optimize(&|_| true, &[&reward]).ok_or(SopError::Infeasible)
}
