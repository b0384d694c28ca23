//! Multi-objective layer over the set orienteering problem.
//!
//! Three objectives are tracked per path: collected reward (maximize),
//! travel cost (minimize) and the detection proxy, the summed relevance of
//! visited clusters (maximize). All three are additive over visited
//! clusters, so the exact solver's subset table answers every
//! epsilon-constraint query without re-solving from scratch.

use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::navgraph::SopInstance;
use crate::par::{self, Execution};
use crate::sop::{tol, SopError, SopSolution, SubsetTable, DEFAULT_EXACT_LIMIT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    Reward,
    Cost,
    Detection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    Max,
    Min,
}

impl Objective {
    pub fn sense(self) -> Sense {
        match self {
            Objective::Cost => Sense::Min,
            _ => Sense::Max,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Objective::Reward => "reward",
            Objective::Cost => "cost",
            Objective::Detection => "detection",
        }
    }

    pub fn of(self, inst: &SopInstance, sol: &SopSolution) -> f64 {
        match self {
            Objective::Reward => sol.total_reward,
            Objective::Cost => sol.total_cost,
            Objective::Detection => {
                let members = inst.cluster_members();
                sol.visited_clusters.iter().map(|&c| inst.detection[members[c][0]]).sum()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub values: Vec<f64>,
}

impl ObjectiveVector {
    pub fn of(inst: &SopInstance, sol: &SopSolution, objectives: &[Objective]) -> Self {
        ObjectiveVector {
            values: objectives.iter().map(|o| o.of(inst, sol)).collect(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum MooError {
    #[error("objective vectors of arity {a} and {b} compared under {senses} senses")]
    ArityMismatch { a: usize, b: usize, senses: usize },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("at least one objective is required")]
    NoObjectives,
    #[error("adaptive grids support at most two objectives, got {0}")]
    Unsupported(usize),
    #[error(transparent)]
    Sop(#[from] SopError),
}

/// True iff `a` is at least as good as `b` everywhere and strictly better
/// somewhere.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector, senses: &[Sense]) -> Result<bool, MooError> {
    if a.values.len() != b.values.len() || a.values.len() != senses.len() {
        return Err(MooError::ArityMismatch {
            a: a.values.len(),
            b: b.values.len(),
            senses: senses.len(),
        });
    }
    let mut strict = false;
    for ((&x, &y), s) in a.values.iter().zip(&b.values).zip(senses) {
        let (better, worse) = match s {
            Sense::Max => (x > y, x < y),
            Sense::Min => (x < y, x > y),
        };
        if worse {
            return Ok(false);
        }
        strict |= better;
    }
    Ok(strict)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub reward: f64,
    pub cost: f64,
    pub detection: f64,
}

impl Weights {
    pub fn new(reward: f64, cost: f64, detection: f64) -> Self {
        Weights { reward, cost, detection }
    }
}

/// Linear scalarization into a single reward. Cost stays a budget
/// constraint, so its weight only takes part in validation.
pub fn scalarize(inst: &SopInstance, w: &Weights) -> Result<SopInstance, MooError> {
    let all = [w.reward, w.cost, w.detection];
    if all.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(MooError::InvalidWeights("weights must be finite and >= 0".into()));
    }
    if all.iter().all(|&x| x == 0.0) {
        return Err(MooError::InvalidWeights("weights are all zero".into()));
    }
    let mut out = inst.clone();
    for (r, d) in out.rewards.iter_mut().zip(&inst.detection) {
        *r = w.reward * *r + w.detection * d;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cmp {
    AtMost,
    AtLeast,
    Below,
    Above,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub objective: Objective,
    pub cmp: Cmp,
    pub value: f64,
}

impl Bound {
    pub fn new(objective: Objective, cmp: Cmp, value: f64) -> Self {
        Bound { objective, cmp, value }
    }

    fn holds(&self, x: f64) -> bool {
        let t = tol(self.value);
        match self.cmp {
            Cmp::AtMost => x <= self.value + t,
            Cmp::AtLeast => x >= self.value - t,
            Cmp::Below => x < self.value - t,
            Cmp::Above => x > self.value + t,
        }
    }
}

fn table_value(t: &SubsetTable, o: Objective, mask: usize) -> f64 {
    match o {
        Objective::Reward => t.reward(mask),
        Objective::Cost => t.min_cost[mask],
        Objective::Detection => t.detection(mask),
    }
}

/// Optimizes `primary`, then each of `rest` in order, subject to `bounds`.
fn constrained(t: &SubsetTable, primary: Objective, rest: &[Objective], bounds: &[Bound]) -> Option<SopSolution> {
    let admissible = |m: usize| bounds.iter().all(|b| b.holds(table_value(t, b.objective, m)));
    let keyed: Vec<Box<dyn Fn(usize) -> f64 + '_>> = std::iter::once(primary)
        .chain(rest.iter().copied())
        .chain([Objective::Reward, Objective::Detection])
        .map(|o| -> Box<dyn Fn(usize) -> f64 + '_> {
            match o.sense() {
                Sense::Max => Box::new(move |m| table_value(t, o, m)),
                Sense::Min => Box::new(move |m| -table_value(t, o, m)),
            }
        })
        .collect();
    let keys: Vec<&dyn Fn(usize) -> f64> = keyed.iter().map(|k| k.as_ref()).collect();
    t.optimize(&admissible, &keys)
}

/// Best path for `primary` among those meeting every bound; the path that
/// stays at the start when no path does.
pub fn epsilon_constraint(inst: &SopInstance, primary: Objective, bounds: &[Bound]) -> Result<SopSolution, MooError> {
    let t = SubsetTable::build(inst, DEFAULT_EXACT_LIMIT)?;
    Ok(constrained(&t, primary, &[], bounds).unwrap_or_else(|| SopSolution::stay(inst)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum EpsilonGrid {
    /// Evenly spaced bounds per secondary objective, cartesian product when
    /// there are two: cost from 0 to the budget, detection from 0 to the
    /// total available.
    Uniform { points: usize },
    /// Each solve tightens the secondary bound strictly past the previous
    /// optimum until nothing is feasible. Exact for two objectives.
    Adaptive,
}

impl Default for EpsilonGrid {
    fn default() -> Self {
        EpsilonGrid::Uniform { points: 10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParetoFront {
    pub objectives: Vec<Objective>,
    pub points: Vec<(ObjectiveVector, SopSolution)>,
}

impl ParetoFront {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn senses(&self) -> Vec<Sense> {
        self.objectives.iter().map(|o| o.sense()).collect()
    }

    /// One row per point: the objective values, then the path as
    /// space-separated node ids.
    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<&str> = self.objectives.iter().map(|o| o.name()).collect();
        header.push("path");
        w.write_record(&header)?;
        for (v, sol) in &self.points {
            let mut row: Vec<String> = v.values.iter().map(|x| x.to_string()).collect();
            row.push(sol.path.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" "));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Non-dominated points among `sols`, deduplicated by objective vector and
/// ordered by cost (when tracked), then by the remaining objectives.
pub fn non_dominated(inst: &SopInstance, objectives: &[Objective], sols: Vec<SopSolution>) -> ParetoFront {
    let senses: Vec<Sense> = objectives.iter().map(|o| o.sense()).collect();
    let pts: Vec<(ObjectiveVector, SopSolution)> = sols
        .into_iter()
        .map(|s| (ObjectiveVector::of(inst, &s, objectives), s))
        .collect();
    let mut keep: Vec<(ObjectiveVector, SopSolution)> = Vec::new();
    for (i, (v, s)) in pts.iter().enumerate() {
        if pts.iter().any(|(u, _)| dominates(u, v, &senses).unwrap_or(false)) {
            continue;
        }
        let dup = keep.iter().any(|(u, _)| u == v)
            || pts[..i].iter().any(|(u, _)| u == v);
        if !dup {
            keep.push((v.clone(), s.clone()));
        }
    }
    let order: Vec<usize> = {
        let mut o: Vec<usize> = (0..objectives.len()).collect();
        o.sort_by_key(|&i| objectives[i] != Objective::Cost);
        o
    };
    keep.sort_by(|(a, sa), (b, sb)| {
        for &i in &order {
            let (x, y) = match senses[i] {
                Sense::Min => (a.values[i], b.values[i]),
                Sense::Max => (b.values[i], a.values[i]),
            };
            let c = x.total_cmp(&y);
            if c.is_ne() {
                return c;
            }
        }
        sa.path.cmp(&sb.path)
    });
    ParetoFront {
        objectives: objectives.to_vec(),
        points: keep,
    }
}

/// Runs the epsilon-constraint method over `grid`: the first objective is
/// optimized, the others are bounded.
pub fn pareto_enumerate(inst: &SopInstance, objectives: &[Objective], grid: &EpsilonGrid) -> Result<ParetoFront, MooError> {
    pareto_enumerate_with(inst, objectives, grid, Execution::default())
}

pub fn pareto_enumerate_with(
    inst: &SopInstance,
    objectives: &[Objective],
    grid: &EpsilonGrid,
    exec: Execution,
) -> Result<ParetoFront, MooError> {
    let (&primary, rest) = objectives.split_first().ok_or(MooError::NoObjectives)?;
    let t = SubsetTable::build(inst, DEFAULT_EXACT_LIMIT)?;
    let stay = || SopSolution::stay(inst);
    let mut sols = Vec::new();
    if rest.is_empty() {
        sols.push(constrained(&t, primary, rest, &[]).unwrap_or_else(stay));
        return Ok(non_dominated(inst, objectives, sols));
    }
    match grid {
        EpsilonGrid::Uniform { points } => {
            let axes: Vec<Vec<Bound>> = rest.iter().map(|&o| uniform_axis(&t, o, *points)).collect();
            let mut combos: Vec<Vec<Bound>> = vec![Vec::new()];
            for axis in &axes {
                combos = combos
                    .iter()
                    .flat_map(|c| {
                        axis.iter().map(move |b| {
                            let mut c = c.clone();
                            c.push(*b);
                            c
                        })
                    })
                    .collect();
            }
            let found = par::map(exec, &combos, |bounds| constrained(&t, primary, rest, bounds));
            sols.extend(found.into_iter().map(|s| s.unwrap_or_else(stay)));
        }
        EpsilonGrid::Adaptive => {
            if rest.len() > 1 {
                return Err(MooError::Unsupported(objectives.len()));
            }
            let second = rest[0];
            let strict = match second.sense() {
                Sense::Min => Cmp::Below,
                Sense::Max => Cmp::Above,
            };
            let mut bounds: Vec<Bound> = Vec::new();
            while let Some(s) = constrained(&t, primary, rest, &bounds) {
                let v = second.of(inst, &s);
                sols.push(s);
                bounds = vec![Bound::new(second, strict, v)];
            }
        }
    }
    Ok(non_dominated(inst, objectives, sols))
}

fn uniform_axis(t: &SubsetTable, o: Objective, points: usize) -> Vec<Bound> {
    let points = points.max(1);
    let (cmp, hi) = match o {
        Objective::Cost => (Cmp::AtMost, t.instance().budget),
        Objective::Reward => (Cmp::AtLeast, t.reward(t.mask_count() - 1)),
        Objective::Detection => (Cmp::AtLeast, t.detection(t.mask_count() - 1)),
    };
    (0..points)
        .map(|i| {
            let f = if points == 1 { 1.0 } else { i as f64 / (points - 1) as f64 };
            let f = if cmp == Cmp::AtLeast { 1.0 - f } else { f };
            Bound::new(o, cmp, hi * f)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::navgraph::CostMatrix;
    use crate::sop::random::{random_instance, RandomInstanceParams};
    use crate::sop::{solve_exact, validate};
    use proptest::prelude::*;

    const RC: [Objective; 2] = [Objective::Reward, Objective::Cost];

    fn v(x: &[f64]) -> ObjectiveVector {
        ObjectiveVector { values: x.to_vec() }
    }

    /// Every feasible cluster subset with its cheapest path cost, by
    /// exhaustive permutation over member choices.
    fn brute_points(inst: &SopInstance) -> Vec<(f64, f64, f64)> {
        fn rec(inst: &SopInstance, last: usize, used: &mut Vec<bool>, cost: f64, best: &mut std::collections::BTreeMap<Vec<bool>, f64>) {
            let e = best.entry(used.clone()).or_insert(f64::INFINITY);
            if cost < *e {
                *e = cost;
            }
            for u in 0..inst.n() {
                let c = inst.clusters[u];
                let nc = cost + inst.cost.get(last, u);
                if used[c] || nc > inst.budget + 1e-9 {
                    continue;
                }
                used[c] = true;
                rec(inst, u, used, nc, best);
                used[c] = false;
            }
        }
        let mut used = vec![false; inst.cluster_count()];
        used[inst.clusters[inst.start]] = true;
        let mut best = std::collections::BTreeMap::new();
        rec(inst, inst.start, &mut used, 0.0, &mut best);
        let members = inst.cluster_members();
        best.into_iter()
            .map(|(set, cost)| {
                let (mut r, mut d) = (0.0, 0.0);
                for (c, &on) in set.iter().enumerate() {
                    if on {
                        r += inst.rewards[members[c][0]];
                        d += inst.detection[members[c][0]];
                    }
                }
                (r, cost, d)
            })
            .collect()
    }

    fn brute_front(pts: &[(f64, f64, f64)], objectives: &[Objective]) -> Vec<Vec<f64>> {
        let pick = |p: &(f64, f64, f64)| -> Vec<f64> {
            objectives
                .iter()
                .map(|o| match o {
                    Objective::Reward => p.0,
                    Objective::Cost => p.1,
                    Objective::Detection => p.2,
                })
                .collect()
        };
        let senses: Vec<Sense> = objectives.iter().map(|o| o.sense()).collect();
        let vs: Vec<Vec<f64>> = pts.iter().map(pick).collect();
        let mut out: Vec<Vec<f64>> = Vec::new();
        for a in &vs {
            let dominated = vs.iter().any(|b| {
                let ge = b.iter().zip(a).zip(&senses).all(|((x, y), s)| match s {
                    Sense::Max => x >= y,
                    Sense::Min => x <= y,
                });
                ge && b != a
            });
            if !dominated && !out.contains(a) {
                out.push(a.clone());
            }
        }
        out
    }

    fn same_set(a: &[Vec<f64>], b: &[Vec<f64>]) -> bool {
        let close = |x: &Vec<f64>, y: &Vec<f64>| x.iter().zip(y).all(|(p, q)| (p - q).abs() <= 1e-9 * p.abs().max(1.0));
        a.len() == b.len() && a.iter().all(|x| b.iter().any(|y| close(x, y)))
    }

    #[test]
    fn dominance_examples() {
        let s = [Sense::Max, Sense::Min];
        assert!(!dominates(&v(&[1.0, 1.0]), &v(&[1.0, 1.0]), &s).unwrap());
        assert!(dominates(&v(&[5.0, 3.0]), &v(&[4.0, 4.0]), &s).unwrap());
        assert!(!dominates(&v(&[5.0, 5.0]), &v(&[4.0, 4.0]), &s).unwrap());
        assert!(matches!(dominates(&v(&[1.0]), &v(&[1.0, 2.0]), &s), Err(MooError::ArityMismatch { .. })));
    }

    #[test]
    fn identity_and_invalid_scalarization() {
        let inst = random_instance(1, &RandomInstanceParams::default());
        assert_eq!(scalarize(&inst, &Weights::new(1.0, 0.0, 0.0)).unwrap(), inst);
        assert!(scalarize(&inst, &Weights::new(0.0, 0.0, 0.0)).is_err());
        assert!(scalarize(&inst, &Weights::new(-1.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn doubling_weights_keeps_argmax() {
        for seed in 0..10 {
            let inst = random_instance(seed, &RandomInstanceParams::default());
            let a = solve_exact(&scalarize(&inst, &Weights::new(0.3, 0.0, 0.7)).unwrap()).unwrap();
            let b = solve_exact(&scalarize(&inst, &Weights::new(0.6, 0.0, 1.4)).unwrap()).unwrap();
            assert_eq!(a.path, b.path);
        }
    }

    #[test]
    fn weight_sweep_stays_on_front() {
        let objectives = [Objective::Reward, Objective::Detection, Objective::Cost];
        for seed in 0..8 {
            let inst = random_instance(
                seed,
                &RandomInstanceParams {
                    clusters: 6,
                    integer_rewards: false,
                    ..Default::default()
                },
            );
            let front = brute_front(&brute_points(&inst), &objectives);
            for w in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let s = scalarize(&inst, &Weights::new(w, 0.0, 1.0 - w)).unwrap();
                let sol = SopSolution::from_path(&inst, solve_exact(&s).unwrap().path);
                assert!(validate(&inst, &sol).is_valid());
                let got = ObjectiveVector::of(&inst, &sol, &objectives).values;
                assert!(front.iter().any(|f| same_set(std::slice::from_ref(f), std::slice::from_ref(&got))), "seed {seed} w {w}: {got:?}");
            }
        }
    }

    #[test]
    fn epsilon_extremes() {
        let inst = random_instance(4, &RandomInstanceParams::default());
        let free = epsilon_constraint(&inst, Objective::Reward, &[Bound::new(Objective::Cost, Cmp::AtMost, inst.budget)]).unwrap();
        assert_eq!(free, solve_exact(&inst).unwrap());
        let none = epsilon_constraint(&inst, Objective::Reward, &[Bound::new(Objective::Cost, Cmp::AtMost, 0.0)]).unwrap();
        assert_eq!(none.path, vec![0]);
        let impossible = epsilon_constraint(&inst, Objective::Reward, &[Bound::new(Objective::Reward, Cmp::AtLeast, 1e9)]).unwrap();
        assert_eq!(impossible.path, vec![0]);
    }

    #[test]
    fn adaptive_front_matches_brute_force() {
        for seed in 0..20 {
            let inst = random_instance(
                seed,
                &RandomInstanceParams {
                    clusters: 2 + seed as usize % 5,
                    ..Default::default()
                },
            );
            let f = pareto_enumerate(&inst, &RC, &EpsilonGrid::Adaptive).unwrap();
            let got: Vec<Vec<f64>> = f.points.iter().map(|(v, _)| v.values.clone()).collect();
            assert!(same_set(&got, &brute_front(&brute_points(&inst), &RC)), "seed {seed}");
            for w in f.points.windows(2) {
                assert!(w[1].0.values[1] > w[0].0.values[1]);
                assert!(w[1].0.values[0] > w[0].0.values[0]);
            }
        }
    }

    #[test]
    fn uniform_grid_points_lie_on_front() {
        let inst = random_instance(2, &RandomInstanceParams::default());
        let exact = pareto_enumerate(&inst, &RC, &EpsilonGrid::Adaptive).unwrap();
        let exact: Vec<Vec<f64>> = exact.points.iter().map(|(v, _)| v.values.clone()).collect();
        let f = pareto_enumerate(&inst, &RC, &EpsilonGrid::default()).unwrap();
        assert!(!f.is_empty() && f.len() <= 10);
        for (v, _) in &f.points {
            assert!(exact.iter().any(|e| same_set(&[e.clone()], &[v.values.clone()])));
        }
        let seq = pareto_enumerate_with(&inst, &RC, &EpsilonGrid::default(), Execution::Sequential).unwrap();
        assert_eq!(seq, f);
    }

    #[test]
    fn single_objective_front_has_one_point() {
        let inst = random_instance(8, &RandomInstanceParams::default());
        let f = pareto_enumerate(&inst, &[Objective::Reward], &EpsilonGrid::default()).unwrap();
        assert_eq!(f.len(), 1);
        assert!(pareto_enumerate(&inst, &[], &EpsilonGrid::default()).is_err());
    }

    #[test]
    fn three_objectives_on_uniform_grid() {
        let inst = random_instance(
            3,
            &RandomInstanceParams {
                clusters: 6,
                integer_rewards: false,
                ..Default::default()
            },
        );
        let objs = [Objective::Reward, Objective::Cost, Objective::Detection];
        let f = pareto_enumerate(&inst, &objs, &EpsilonGrid::Uniform { points: 6 }).unwrap();
        let front = brute_front(&brute_points(&inst), &objs);
        for (v, s) in &f.points {
            assert!(validate(&inst, s).is_valid());
            assert!(front.iter().any(|e| same_set(&[e.clone()], &[v.values.clone()])));
        }
        assert_eq!(pareto_enumerate(&inst, &objs, &EpsilonGrid::Adaptive), Err(MooError::Unsupported(3)));
    }

    #[test]
    fn csv_export() {
        let cost = CostMatrix::from_fn(2, |i, j| if i == j { 0.0 } else { 2.0 });
        let inst = SopInstance::new(vec![0.0, 1.0], vec![0, 1], cost, 0, 5.0);
        let f = pareto_enumerate(&inst, &RC, &EpsilonGrid::Adaptive).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "reward,cost,path\n0,0,0\n1,2,0 1\n");
    }

    proptest! {
        #[test]
        fn dominance_is_irreflexive_and_transitive(
            a in proptest::collection::vec(0i32..4, 3),
            b in proptest::collection::vec(0i32..4, 3),
            c in proptest::collection::vec(0i32..4, 3),
        ) {
            let s = [Sense::Max, Sense::Min, Sense::Max];
            let f = |x: &Vec<i32>| v(&x.iter().map(|&i| i as f64).collect::<Vec<_>>());
            let (a, b, c) = (f(&a), f(&b), f(&c));
            prop_assert!(!dominates(&a, &a, &s).unwrap());
            if dominates(&a, &b, &s).unwrap() && dominates(&b, &c, &s).unwrap() {
                prop_assert!(dominates(&a, &c, &s).unwrap());
            }
        }

        #[test]
        fn filter_matches_pairwise_definition(raw in proptest::collection::vec((0i32..5, 0i32..5), 1..12)) {
            let s = [Sense::Max, Sense::Min];
            let vs: Vec<ObjectiveVector> = raw.iter().map(|&(r, c)| v(&[r as f64, c as f64])).collect();
            for x in &vs {
                let by_fn = vs.iter().any(|y| dominates(y, x, &s).unwrap());
                let by_def = vs.iter().any(|y| y.values[0] >= x.values[0] && y.values[1] <= x.values[1] && y != x);
                prop_assert_eq!(by_fn, by_def);
            }
        }

        #[test]
        fn fronts_are_mutually_non_dominated(seed in 0u64..500) {
            let inst = random_instance(seed, &RandomInstanceParams { clusters: 5, ..Default::default() });
            let f = pareto_enumerate(&inst, &RC, &EpsilonGrid::Adaptive).unwrap();
            let s = f.senses();
            for (a, _) in &f.points {
                for (b, _) in &f.points {
                    prop_assert!(!dominates(a, b, &s).unwrap());
                }
            }
        }
    }
}
