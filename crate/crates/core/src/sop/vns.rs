use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::solution::{tol, SopSolution};
use crate::navgraph::SopInstance;

pub const DEFAULT_VNS_ITERS: usize = 200;

/// Variable neighbourhood search. Starts from [`greedy`], then alternates a
/// shake that drops `k` random clusters (k cycling through 1..=3) with a
/// local search over 2-opt, relocation, member reselection, insertion and
/// cluster swaps. Only strict improvements are kept, so the answer is never
/// worse than the greedy construction.
pub fn solve_vns(inst: &SopInstance, seed: u64, iters: usize) -> SopSolution {
    let ctx = Ctx::new(inst);
    let mut best = ctx.initial();
    ctx.fill(&mut best);
    ctx.local_search(&mut best);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut k = 1;
    for _ in 0..iters.max(1) {
        let mut cand = best.clone();
        ctx.shake(&mut cand, k, &mut rng);
        ctx.local_search(&mut cand);
        if ctx.better(&cand, &best) {
            best = cand;
            k = 1;
        } else {
            k = k % 3 + 1;
        }
    }
    SopSolution::from_path(inst, best.path)
}

/// Insertion by best reward per added cost until nothing else fits.
pub fn greedy(inst: &SopInstance) -> SopSolution {
    let ctx = Ctx::new(inst);
    let mut r = ctx.initial();
    ctx.fill(&mut r);
    SopSolution::from_path(inst, r.path)
}

#[derive(Clone, Debug)]
struct Route {
    path: Vec<usize>,
    cost: f64,
    reward: f64,
    used: Vec<bool>,
}

struct Ctx<'a> {
    inst: &'a SopInstance,
    members: Vec<Vec<usize>>,
    reward: Vec<f64>,
    budget: f64,
}

impl<'a> Ctx<'a> {
    fn new(inst: &'a SopInstance) -> Self {
        let members = inst.cluster_members();
        let reward = members.iter().map(|m| m.first().map_or(0.0, |&v| inst.rewards[v])).collect();
        Ctx {
            inst,
            members,
            reward,
            budget: inst.budget + tol(inst.budget),
        }
    }

    fn c(&self, a: usize, b: usize) -> f64 {
        self.inst.cost.get(a, b)
    }

    fn initial(&self) -> Route {
        let mut path = vec![self.inst.start];
        path.extend(self.inst.end);
        let mut used = vec![false; self.members.len()];
        for &v in &path {
            used[self.inst.clusters[v]] = true;
        }
        let reward = path.iter().map(|&v| self.reward[self.inst.clusters[v]]).sum();
        Route {
            cost: self.inst.cost.path_cost(&path),
            path,
            reward,
            used,
        }
    }

    /// Positions that may change: everything but the start and a fixed end.
    fn movable(&self, r: &Route) -> std::ops::Range<usize> {
        1..r.path.len() - usize::from(self.inst.end.is_some())
    }

    fn better(&self, a: &Route, b: &Route) -> bool {
        a.reward > b.reward + tol(b.reward) || (a.reward >= b.reward - tol(b.reward) && a.cost < b.cost - tol(b.cost))
    }

    /// Cheapest insertion of cluster `c`: (added cost, node, position).
    fn best_insertion(&self, r: &Route, c: usize) -> Option<(f64, usize, usize)> {
        let mut best: Option<(f64, usize, usize)> = None;
        let last = r.path.len();
        let positions = 1..=last - usize::from(self.inst.end.is_some());
        for &u in &self.members[c] {
            for pos in positions.clone() {
                let a = r.path[pos - 1];
                let delta = if pos < last {
                    let b = r.path[pos];
                    self.c(a, u) + self.c(u, b) - self.c(a, b)
                } else {
                    self.c(a, u)
                };
                if !delta.is_finite() {
                    continue;
                }
                if best.is_none_or(|(d, _, _)| delta < d) {
                    best = Some((delta, u, pos));
                }
            }
        }
        best
    }

    fn insert(&self, r: &mut Route, u: usize, pos: usize) {
        r.path.insert(pos, u);
        let c = self.inst.clusters[u];
        r.used[c] = true;
        r.reward += self.reward[c];
        r.cost = self.inst.cost.path_cost(&r.path);
    }

    fn remove_at(&self, r: &mut Route, pos: usize) {
        let u = r.path.remove(pos);
        let c = self.inst.clusters[u];
        r.used[c] = false;
        r.reward -= self.reward[c];
        r.cost = self.inst.cost.path_cost(&r.path);
    }

    /// Greedy insertion by reward per added cost. Returns whether anything
    /// was inserted.
    fn fill(&self, r: &mut Route) -> bool {
        let mut any = false;
        loop {
            let mut pick: Option<(f64, usize, usize)> = None;
            for c in 0..self.members.len() {
                if r.used[c] || self.reward[c] <= 0.0 {
                    continue;
                }
                let Some((delta, u, pos)) = self.best_insertion(r, c) else { continue };
                if r.cost + delta > self.budget {
                    continue;
                }
                let ratio = self.reward[c] / (delta.max(0.0) + 1e-9);
                if pick.is_none_or(|(best, _, _)| ratio > best) {
                    pick = Some((ratio, u, pos));
                }
            }
            match pick {
                Some((_, u, pos)) => {
                    self.insert(r, u, pos);
                    any = true;
                }
                None => return any,
            }
        }
    }

    fn two_opt(&self, r: &mut Route) -> bool {
        let range = self.movable(r);
        let mut improved = false;
        for i in range.clone() {
            for j in i + 1..range.end {
                let mut path = r.path.clone();
                path[i..=j].reverse();
                let cost = self.inst.cost.path_cost(&path);
                if cost < r.cost - tol(r.cost) {
                    r.path = path;
                    r.cost = cost;
                    improved = true;
                }
            }
        }
        improved
    }

    fn relocate(&self, r: &mut Route) -> bool {
        let range = self.movable(r);
        let mut improved = false;
        for i in range.clone() {
            for j in range.clone() {
                if i == j {
                    continue;
                }
                let mut path = r.path.clone();
                let u = path.remove(i);
                path.insert(j, u);
                let cost = self.inst.cost.path_cost(&path);
                if cost < r.cost - tol(r.cost) {
                    r.path = path;
                    r.cost = cost;
                    improved = true;
                }
            }
        }
        improved
    }

    fn reselect(&self, r: &mut Route) -> bool {
        let mut improved = false;
        for i in self.movable(r) {
            let c = self.inst.clusters[r.path[i]];
            for &u in &self.members[c] {
                if u == r.path[i] {
                    continue;
                }
                let old = r.path[i];
                r.path[i] = u;
                let cost = self.inst.cost.path_cost(&r.path);
                if cost < r.cost - tol(r.cost) {
                    r.cost = cost;
                    improved = true;
                } else {
                    r.path[i] = old;
                }
            }
        }
        improved
    }

    /// Replace one visited cluster by an unvisited one when that raises the
    /// reward, or keeps it and lowers the cost.
    fn swap(&self, r: &mut Route) -> bool {
        for i in self.movable(r) {
            let out = self.inst.clusters[r.path[i]];
            for c in 0..self.members.len() {
                if r.used[c] || self.reward[c] < self.reward[out] {
                    continue;
                }
                let mut trial = r.clone();
                self.remove_at(&mut trial, i);
                let Some((delta, u, pos)) = self.best_insertion(&trial, c) else { continue };
                if trial.cost + delta > self.budget {
                    continue;
                }
                self.insert(&mut trial, u, pos);
                if self.better(&trial, r) {
                    *r = trial;
                    return true;
                }
            }
        }
        false
    }

    fn local_search(&self, r: &mut Route) {
        loop {
            let mut changed = self.two_opt(r);
            changed |= self.relocate(r);
            changed |= self.reselect(r);
            changed |= self.fill(r);
            changed |= self.swap(r);
            if !changed {
                return;
            }
        }
    }

    fn shake(&self, r: &mut Route, k: usize, rng: &mut ChaCha8Rng) {
        for _ in 0..k {
            let range = self.movable(r);
            if range.is_empty() {
                break;
            }
            let pos = rng.gen_range(range);
            self.remove_at(r, pos);
        }
        let mut open: Vec<usize> = (0..self.members.len())
            .filter(|&c| !r.used[c] && self.reward[c] > 0.0)
            .collect();
        open.shuffle(rng);
        for c in open {
            if let Some((delta, u, pos)) = self.best_insertion(r, c) {
                if r.cost + delta <= self.budget {
                    self.insert(r, u, pos);
                    break;
                }
            }
        }
    }
}
