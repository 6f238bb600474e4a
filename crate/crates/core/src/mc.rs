//! Seeded Monte Carlo estimates of the same quantities the exact engine
//! computes.
//!
//! Sample `i` of a run with seed `s` draws from ChaCha8 keyed by `s` on
//! stream `i`. Each configuration takes one uniform per edge in index
//! order (open iff the uniform is below `p_e`); pair samples draw the first
//! configuration, then the second. Counts are integers summed per fixed
//! chunk, so results are identical under any thread count.

use crate::bits::{Configuration, EdgeSet};
use crate::error::{Error, Result};
use crate::event::{split_search, BoundEvent, EventExpr};
use crate::exact::PairQuery;
use crate::graph::Graph;
use crate::tree::{splice, BoundStrategy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

const CHUNK: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    /// Wilson score interval at 95%.
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: u64,
    pub seed: u64,
}

impl Estimate {
    pub fn from_count(hits: u64, samples: u64, seed: u64) -> Self {
        let n = samples as f64;
        let mean = hits as f64 / n;
        let std_err = (mean * (1.0 - mean) / n).sqrt();
        let (ci_low, ci_high) = wilson(mean, n, Z95);
        Estimate {
            mean,
            std_err,
            ci_low,
            ci_high,
            samples,
            seed,
        }
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson(mean: f64, n: f64, z: f64) -> (f64, f64) {
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (mean + z2 / (2.0 * n)) / denom;
    let half = z * (mean * (1.0 - mean) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // the bounds are exactly 0 or 1 at the extremes
    let lo = if mean <= 0.0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if mean >= 1.0 { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Draws a configuration: one uniform per edge, open iff below its probability.
pub fn sample_configuration(g: &Graph, rng: &mut ChaCha8Rng) -> Configuration {
    let mut open = EdgeSet::empty(g.edge_count());
    for (e, &p) in g.probs().iter().enumerate() {
        let u: f64 = rng.random();
        if u < p {
            open.insert(e);
        }
    }
    Configuration::from_open(open)
}

/// Generator for sample `index` of a run.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Hit counts of `k` indicators and of every pair of them, over one set of
/// samples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointCounts {
    pub samples: u64,
    pub seed: u64,
    pub hits: Vec<u64>,
    /// `both[i][j]`: samples where indicators `i` and `j` were both true.
    pub both: Vec<Vec<u64>>,
}

impl JointCounts {
    fn zero(k: usize, samples: u64, seed: u64) -> Self {
        JointCounts {
            samples,
            seed,
            hits: vec![0; k],
            both: vec![vec![0; k]; k],
        }
    }

    fn merge(mut self, other: JointCounts) -> Self {
        self.samples += other.samples;
        for (a, b) in self.hits.iter_mut().zip(other.hits) {
            *a += b;
        }
        for (ra, rb) in self.both.iter_mut().zip(other.both) {
            for (a, b) in ra.iter_mut().zip(rb) {
                *a += b;
            }
        }
        self
    }

    pub fn means(&self) -> Vec<f64> {
        let n = self.samples as f64;
        self.hits.iter().map(|&h| h as f64 / n).collect()
    }

    pub fn estimate(&self, i: usize) -> Estimate {
        Estimate::from_count(self.hits[i], self.samples, self.seed)
    }

    /// Per-sample covariance matrix of the indicators.
    pub fn covariance(&self) -> Vec<Vec<f64>> {
        let n = self.samples as f64;
        let m = self.means();
        (0..m.len())
            .map(|i| {
                (0..m.len())
                    .map(|j| self.both[i][j] as f64 / n - m[i] * m[j])
                    .collect()
            })
            .collect()
    }

    /// Delta-method standard error of `h` evaluated at the sample means,
    /// using a central-difference gradient.
    pub fn delta_std_err(&self, h: &dyn Fn(&[f64]) -> f64) -> f64 {
        let m = self.means();
        let cov = self.covariance();
        let step = 1e-6;
        let grad: Vec<f64> = (0..m.len())
            .map(|i| {
                let (mut lo, mut hi) = (m.clone(), m.clone());
                lo[i] -= step;
                hi[i] += step;
                (h(&hi) - h(&lo)) / (2.0 * step)
            })
            .collect();
        let mut var = 0.0;
        for i in 0..m.len() {
            for j in 0..m.len() {
                var += grad[i] * cov[i][j] * grad[j];
            }
        }
        (var.max(0.0) / self.samples as f64).sqrt()
    }
}

/// Runs `samples` draws of `draws` configurations each and records `k`
/// indicators per sample.
pub fn mc_counts<F>(g: &Graph, samples: u64, seed: u64, draws: usize, k: usize, f: F) -> Result<JointCounts>
where
    F: Fn(&[Configuration], &mut [bool]) -> Result<()> + Sync,
{
    if samples == 0 {
        return Err(Error::InvalidParam("need at least one sample".into()));
    }
    let chunks = samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut counts = JointCounts::zero(k, 0, seed);
            let mut bits = vec![false; k];
            let mut configs = Vec::with_capacity(draws);
            for i in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                let mut rng = sample_rng(seed, i);
                configs.clear();
                for _ in 0..draws {
                    configs.push(sample_configuration(g, &mut rng));
                }
                bits.iter_mut().for_each(|b| *b = false);
                f(&configs, &mut bits)?;
                counts.samples += 1;
                for a in 0..k {
                    if bits[a] {
                        counts.hits[a] += 1;
                        for (b, &hit) in bits.iter().enumerate() {
                            if hit {
                                counts.both[a][b] += 1;
                            }
                        }
                    }
                }
            }
            Ok(counts)
        })
        .try_reduce(|| JointCounts::zero(k, 0, seed), |a, b| Ok(a.merge(b)))
}

/// Indicator of a pair query on one sampled pair, for events already known
/// to be increasing where required.
pub(crate) fn pair_hit(
    g: &Graph,
    q: &PairQuery<'_>,
    c1: &Configuration,
    c2: &Configuration,
    s: &EdgeSet,
) -> Result<bool> {
    Ok(match q {
        PairQuery::Joint(a, b) => a.eval_open(g, c1.open_edges()) && b.eval_open(g, splice(c1, c2, s)?.open_edges()),
        PairQuery::SqS(a, b) => split_search(a, b, g, c1, c2, s)?,
    })
}

pub fn mc_prob(g: &Graph, e: &BoundEvent, samples: u64, seed: u64) -> Result<Estimate> {
    let counts = mc_counts(g, samples, seed, 1, 1, |cs, out| {
        out[0] = e.eval_open(g, cs[0].open_edges());
        Ok(())
    })?;
    Ok(counts.estimate(0))
}

pub fn mc_pair(g: &Graph, t: &BoundStrategy, q: PairQuery<'_>, samples: u64, seed: u64) -> Result<Estimate> {
    if let PairQuery::SqS(a, b) = q {
        a.require_increasing(g)?;
        b.require_increasing(g)?;
    }
    let counts = mc_counts(g, samples, seed, 2, 1, |cs, out| {
        let tr = t.run(g, &cs[0], &cs[1])?;
        out[0] = pair_hit(g, &q, &cs[0], &cs[1], &tr.s)?;
        Ok(())
    })?;
    Ok(counts.estimate(0))
}

pub fn mc_npaths(g: &Graph, u: &str, v: &str, n_paths: usize, samples: u64, seed: u64) -> Result<Estimate> {
    if n_paths == 0 {
        return Err(Error::InvalidParam("npaths count must be at least 1".into()));
    }
    let e = EventExpr::NPaths(u.into(), v.into(), n_paths).bind(g)?;
    mc_prob(g, &e, samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::parse_event;
    use crate::graph::{generate, parse_graph, EdgeProb, Family};

    fn ev(s: &str, g: &Graph) -> BoundEvent {
        parse_event(s).unwrap().bind(g).unwrap()
    }

    #[test]
    fn wilson_stays_in_unit_interval() {
        let (lo, hi) = wilson(0.0, 100.0, Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.05);
        let (lo, hi) = wilson(1.0, 100.0, Z95);
        assert!(lo > 0.95 && hi == 1.0);
    }

    #[test]
    fn single_edge_bernoulli() {
        let g = parse_graph("vertex a\nvertex b\nedge e a b 0.3\nmark a b\n").unwrap();
        let est = mc_prob(&g, &ev("a,b", &g), 200_000, 7).unwrap();
        assert!((est.mean - 0.3).abs() <= 4.0 * est.std_err, "{est:?}");
        assert!(est.ci_low < 0.3 && 0.3 < est.ci_high);
    }

    #[test]
    fn certain_edges_give_exact_one() {
        let g = generate(Family::Grid(3, 3), EdgeProb::Uniform(1.0)).unwrap();
        let est = mc_prob(&g, &ev("a,b", &g), 5000, 1).unwrap();
        assert_eq!(est.mean, 1.0);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let g = generate(Family::Grid(3, 3), EdgeProb::Uniform(0.5)).unwrap();
        let e = ev("a,b,c", &g);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| mc_prob(&g, &e, 30_000, 99).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn npaths_one_matches_connection() {
        let g = generate(Family::Theta(3), EdgeProb::Uniform(0.6)).unwrap();
        let a = mc_npaths(&g, "a", "b", 1, 20_000, 5).unwrap();
        let b = mc_prob(&g, &ev("a,b", &g), 20_000, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn delta_method_for_a_product() {
        // h = x0 * x1 with independent indicators has variance
        // x1^2 v0 + x0^2 v1 (to first order)
        let counts = JointCounts {
            samples: 1000,
            seed: 0,
            hits: vec![500, 250],
            both: vec![vec![500, 125], vec![125, 250]],
        };
        let se = counts.delta_std_err(&|x| x[0] * x[1]);
        let want = ((0.25f64.powi(2) * 0.25 + 0.25 * 0.1875) / 1000.0).sqrt();
        assert!((se - want).abs() < 1e-9, "{se} vs {want}");
    }
}
