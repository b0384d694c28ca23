//! Seeded Euclidean instances for tests, benches and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::navgraph::{CostMatrix, SopInstance};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomInstanceParams {
    /// Clusters besides the start's own.
    pub clusters: usize,
    /// Inclusive range of member nodes per cluster.
    pub nodes_per_cluster: (usize, usize),
    pub side: f64,
    /// Budget as a fraction of a nearest-neighbour tour over all clusters,
    /// drawn uniformly from this inclusive range.
    pub budget_fraction: (f64, f64),
    /// Integer rewards in 1..=10 (many ties) instead of uniform (0, 1].
    pub integer_rewards: bool,
}

impl Default for RandomInstanceParams {
    fn default() -> Self {
        RandomInstanceParams {
            clusters: 8,
            nodes_per_cluster: (1, 3),
            side: 100.0,
            budget_fraction: (0.3, 0.8),
            integer_rewards: true,
        }
    }
}

/// Node 0 is the start, alone in cluster 0 with zero reward. Costs are
/// Euclidean distances, so they are symmetric and metric.
pub fn random_instance(seed: u64, p: &RandomInstanceParams) -> SopInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = vec![(rng.gen_range(0.0..p.side), rng.gen_range(0.0..p.side))];
    let mut clusters = vec![0];
    let mut rewards = vec![0.0];
    let mut detection = vec![0.0];
    let spread = p.side * 0.05;
    let (lo, hi) = (p.nodes_per_cluster.0.max(1), p.nodes_per_cluster.1.max(p.nodes_per_cluster.0.max(1)));
    for c in 1..=p.clusters {
        let center = (rng.gen_range(0.0..p.side), rng.gen_range(0.0..p.side));
        let r = if p.integer_rewards {
            rng.gen_range(1..=10) as f64
        } else {
            1.0 - rng.gen::<f64>()
        };
        let d = (rng.gen_range(0..=100) as f64) / 100.0;
        for _ in 0..rng.gen_range(lo..=hi) {
            pts.push((
                center.0 + rng.gen_range(-spread..=spread),
                center.1 + rng.gen_range(-spread..=spread),
            ));
            clusters.push(c);
            rewards.push(r);
            detection.push(d);
        }
    }
    let n = pts.len();
    let cost = CostMatrix::from_fn(n, |i, j| ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt());

    // Nearest-neighbour tour over the first member of each cluster.
    let mut firsts: Vec<usize> = (1..=p.clusters)
        .map(|c| clusters.iter().position(|&x| x == c).unwrap())
        .collect();
    let (mut cur, mut tour) = (0usize, 0.0);
    while !firsts.is_empty() {
        let (k, &v) = firsts
            .iter()
            .enumerate()
            .min_by(|a, b| cost.get(cur, *a.1).total_cmp(&cost.get(cur, *b.1)))
            .unwrap();
        tour += cost.get(cur, v);
        cur = v;
        firsts.remove(k);
    }
    let (flo, fhi) = p.budget_fraction;
    let frac = if fhi > flo { rng.gen_range(flo..=fhi) } else { flo };

    SopInstance {
        rewards,
        detection,
        clusters,
        cost,
        start: 0,
        end: None,
        budget: tour * frac,
    }
}
