//! Seeded stochastic cross-checks of the analytic measurement statistics.
//!
//! Samples are split into `shards` contiguous index ranges, each drawn from its
//! own ChaCha8 stream (`seed`, stream = shard index), so a given
//! `(seed, shards)` pair always produces the same sample set regardless of
//! thread scheduling. Moments are accumulated per batch (100 batches by
//! default) and merged in a fixed order.

use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detection::{overlap_coefficients, pixel_integrals, variance_direct, PixelLayout};
use crate::error::{Error, Result};
use crate::modes::{ModeBasis, SampledMode};
use crate::state::GaussianState;

pub const DEFAULT_BATCHES: u64 = 100;

/// Eigenvalues of the covariance down to this value are clamped to zero.
pub const EIGEN_CLAMP: f64 = -1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub n_samples: u64,
    pub seed: u64,
    #[serde(default = "default_shards")]
    pub shards: usize,
}

fn default_shards() -> usize {
    1
}

impl SimConfig {
    pub fn new(n_samples: u64, seed: u64, shards: usize) -> Self {
        Self {
            n_samples,
            seed,
            shards,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 1 {
            return Err(Error::InvalidParameter {
                name: "n_samples",
                reason: "must be at least 1".into(),
            });
        }
        if self.shards < 1 {
            return Err(Error::InvalidParameter {
                name: "shards",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub sample_mean: f64,
    pub sample_variance: f64,
    /// Batch-means standard error of `sample_variance`; `None` for a single sample.
    pub stderr_variance: Option<f64>,
    pub n_samples: u64,
    pub seed: u64,
    pub shards: usize,
}

impl SimResult {
    /// `|sample_variance - expected| <= k * stderr`.
    pub fn variance_within(&self, expected: f64, k: f64) -> bool {
        match self.stderr_variance {
            Some(se) => (self.sample_variance - expected).abs() <= k * se,
            None => false,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        let (na, nb, nf) = (self.count as f64, other.count as f64, n as f64);
        Moments {
            count: n,
            mean: self.mean + delta * nb / nf,
            m2: self.m2 + other.m2 + delta * delta * na * nb / nf,
        }
    }

    fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }
}

fn batch_count(n: u64) -> u64 {
    DEFAULT_BATCHES.min(n / 2).max(1)
}

/// Draws `cfg.n_samples` values of `sample` across shards and reduces them.
fn run_sharded<F>(cfg: &SimConfig, sample: F) -> Result<SimResult>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    cfg.validate()?;
    let n = cfg.n_samples;
    let batches = batch_count(n);
    let shards = cfg.shards as u64;
    let per_shard: Vec<Vec<(u64, Moments)>> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let start = (s as u128 * n as u128 / shards as u128) as u64;
            let end = ((s + 1) as u128 * n as u128 / shards as u128) as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(s);
            let mut out: Vec<(u64, Moments)> = Vec::new();
            for i in start..end {
                let b = (i as u128 * batches as u128 / n as u128) as u64;
                if out.last().map(|(cur, _)| *cur) != Some(b) {
                    out.push((b, Moments::default()));
                }
                out.last_mut().expect("pushed above").1.push(sample(&mut rng));
            }
            out
        })
        .collect();

    let mut per_batch = vec![Moments::default(); batches as usize];
    for shard in per_shard {
        for (b, m) in shard {
            per_batch[b as usize] = per_batch[b as usize].merge(m);
        }
    }
    let total = per_batch
        .iter()
        .fold(Moments::default(), |acc, m| acc.merge(*m));
    let sample_variance = total.variance();

    let stderr_variance = if batches >= 2 {
        let vars: Vec<f64> = per_batch.iter().map(Moments::variance).collect();
        let b = vars.len() as f64;
        let mean = vars.iter().sum::<f64>() / b;
        let spread = vars.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b - 1.0);
        Some((spread / b).sqrt())
    } else if n >= 2 {
        Some(sample_variance * (2.0 / (n - 1) as f64).sqrt())
    } else {
        None
    };

    Ok(SimResult {
        sample_mean: total.mean,
        sample_variance,
        stderr_variance,
        n_samples: n,
        seed: cfg.seed,
        shards: cfg.shards,
    })
}

/// Samples the linearized photocount fluctuation
/// `dN = sum_i (C_i da_i^dag + conj(C_i) da_i) = sum_i (Re C_i dX_i + Im C_i dY_i)`
/// from the state's quadrature covariance, plus the vacuum contribution of the
/// part of the weighted mean field lying outside the basis.
pub fn simulate_linearized(
    state: &GaussianState,
    basis: &ModeBasis,
    layout: &PixelLayout,
    cfg: &SimConfig,
) -> Result<SimResult> {
    cfg.validate()?;
    let coeffs = overlap_coefficients(state, basis, layout)?;
    // Mean signal and the full-space sum |C|^2 = f^2 N0.
    let analytic = variance_direct(state, basis, layout)?;
    let in_basis: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    let outside = (analytic.shot_noise - in_basis).max(0.0);

    let eig = SymmetricEigen::new(state.cov().clone());
    let min_eigenvalue = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eigenvalue < EIGEN_CLAMP {
        return Err(Error::NotPositiveSemidefinite { min_eigenvalue });
    }
    let dim = 2 * state.dim();
    let g: Vec<f64> = coeffs.iter().flat_map(|c| [c.re, c.im]).collect();
    // dN = g^T L z with V = L L^T, L = Q sqrt(Lambda): precompute h = L^T g.
    let h: Vec<f64> = (0..dim)
        .map(|k| {
            let scale = eig.eigenvalues[k].max(0.0).sqrt();
            scale * (0..dim).map(|i| eig.eigenvectors[(i, k)] * g[i]).sum::<f64>()
        })
        .collect();
    let outside_scale = outside.sqrt();
    let mean = analytic.mean;

    run_sharded(cfg, |rng| {
        let mut dn = 0.0;
        for hk in &h {
            let z: f64 = rng.sample(StandardNormal);
            dn += hk * z;
        }
        let z: f64 = rng.sample(StandardNormal);
        mean + dn + outside_scale * z
    })
}

/// Independent Poisson counts per pixel with rate `N0 int_{D_j} |v0|^2`,
/// combined as `sum_j sigma_j n_j` (coherent illumination only).
pub fn simulate_poisson(
    v0: &SampledMode,
    n0: f64,
    layout: &PixelLayout,
    cfg: &SimConfig,
) -> Result<SimResult> {
    cfg.validate()?;
    if !(n0.is_finite() && n0 > 0.0) {
        return Err(Error::InvalidParameter {
            name: "n0",
            reason: format!("must be finite and positive, got {n0}"),
        });
    }
    let v0 = v0.clone().normalize()?;
    let integrals = pixel_integrals(&v0, layout)?;
    let pixels: Vec<(f64, Poisson<f64>)> = layout
        .gains()
        .iter()
        .zip(&integrals)
        .filter(|(&s, &i)| s != 0.0 && i > 0.0)
        .map(|(&s, &i)| {
            Poisson::new(n0 * i)
                .map(|p| (s, p))
                .map_err(|e| Error::InvalidParameter {
                    name: "rate",
                    reason: e.to_string(),
                })
        })
        .collect::<Result<_>>()?;

    run_sharded(cfg, |rng| {
        pixels
            .iter()
            .map(|(s, p)| s * p.sample(rng))
            .sum::<f64>()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::{hermite_gauss_basis, Grid};

    #[test]
    fn moments_merge_matches_sequential() {
        let xs: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin() * 3.0 + 1.0).collect();
        let mut seq = Moments::default();
        xs.iter().for_each(|&x| seq.push(x));
        let mut a = Moments::default();
        let mut b = Moments::default();
        xs[..17].iter().for_each(|&x| a.push(x));
        xs[17..].iter().for_each(|&x| b.push(x));
        let m = a.merge(b);
        assert!((m.mean - seq.mean).abs() < 1e-12);
        assert!((m.variance() - seq.variance()).abs() < 1e-12);
    }

    #[test]
    fn single_sample_has_no_stderr() {
        let r = run_sharded(&SimConfig::new(1, 3, 1), |rng| rng.sample(StandardNormal)).unwrap();
        assert_eq!(r.n_samples, 1);
        assert!(r.stderr_variance.is_none());
        assert!(!r.variance_within(1.0, 3.0));
    }

    #[test]
    fn tiny_runs_still_report_stderr() {
        for n in 2..6 {
            let r = run_sharded(&SimConfig::new(n, 3, 2), |rng| rng.sample(StandardNormal)).unwrap();
            assert!(r.stderr_variance.unwrap() > 0.0);
        }
    }

    #[test]
    fn invalid_config_rejected() {
        assert!(SimConfig::new(0, 1, 1).validate().is_err());
        assert!(SimConfig::new(10, 1, 0).validate().is_err());
    }

    #[test]
    fn zero_gains_give_zero_counts() {
        let g = Grid::square(32, 8.0).unwrap();
        let v0 = hermite_gauss_basis(0, 1.0, g).unwrap().mode(0).clone();
        let l = PixelLayout::half_x(g, [0.0, 0.0]).unwrap();
        let r = simulate_poisson(&v0, 1e4, &l, &SimConfig::new(1000, 5, 4)).unwrap();
        assert_eq!(r.sample_mean, 0.0);
        assert_eq!(r.sample_variance, 0.0);
    }
}
