//! Telescoping-ratio estimator for `PerfMatch(Γ)` with `|V| = 2N`.
//!
//! With `α_1 = 1/Σw` and `Π = Σw = Z_1`, level `k = 1..N−1` samples
//! matchings of `Γ(α_k)`, measures the fractions `p_k`, `p_{k+1}` of samples
//! with `k` and `k+1` edges, and updates
//!
//! ```text
//! α_{k+1} = α_k p_k / p_{k+1},    Π ← Π / α_{k+1}.
//! ```
//!
//! Since `p_{k+1}/p_k ≈ α_k Z_{k+1}/Z_k`, each factor `1/α_{k+1}` tracks
//! `Z_{k+1}/Z_k` and the product tracks `Z_N`. A run gives up when `α_k`
//! leaves `[(2Σw)⁻¹, 2q(N)]` or a level receives no samples. Giving up is
//! reported as such and never as the value 0.

use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::AbortReason;
use crate::matchgraph::WeightedMultigraph;
use crate::rng::{derive_seed, stream, stream_rng};
use crate::sampler::{
    default_steps_with, sample_sizes, stationary_exact_scaled, SamplerConfig, SamplerStats, StepConstants,
    WeightView,
};
use crate::{Error, Mode, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Samples per level (`T`).
    pub samples: usize,
    /// Chain steps per sample.
    pub steps: u64,
    /// Sampler precision used to size the chain.
    pub delta: f64,
    /// `c_q` in `q(N) = c_q N²`.
    pub q_coeff: f64,
    pub mode: Mode,
    pub seed: u64,
    /// Independent runs combined by the median; odd.
    pub trials: usize,
    /// Relative error the caller is aiming for. Recorded in reports only.
    pub eps: f64,
}

impl EstimatorConfig {
    /// User-sized run. `steps = None` picks the practical default for `g`.
    pub fn practical(
        g: &WeightedMultigraph,
        eps: f64,
        samples: usize,
        steps: Option<u64>,
        seed: u64,
        trials: usize,
    ) -> Result<Self> {
        let delta = default_delta(eps, g.num_vertices() / 2);
        let steps = match steps {
            Some(s) => s,
            None => default_steps_with(&g.stats(), delta, Mode::Practical, &StepConstants::default())?,
        };
        let cfg = EstimatorConfig {
            samples,
            steps,
            delta,
            q_coeff: 1.0,
            mode: Mode::Practical,
            seed,
            trials,
            eps,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sample count, precision, and chain length from the worst-case bounds.
    pub fn theory(g: &WeightedMultigraph, eps: f64, q_coeff: f64, seed: u64, trials: usize) -> Result<Self> {
        let params = theory_params(g, eps, q_coeff)?;
        let steps = default_steps_with(&g.stats(), params.delta, Mode::Theory, &StepConstants::default())?;
        let cfg = EstimatorConfig {
            samples: params.samples,
            steps,
            delta: params.delta,
            q_coeff,
            mode: Mode::Theory,
            seed,
            trials,
            eps,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidParameter("samples per level must be at least 1".into()));
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter("chain steps must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::OutOfRange {
                what: "delta".into(),
                value: self.delta,
                range: "(0, 1)",
            });
        }
        if !(self.q_coeff > 0.0 && self.q_coeff.is_finite()) {
            return Err(Error::OutOfRange {
                what: "q_coeff".into(),
                value: self.q_coeff,
                range: "(0, inf)",
            });
        }
        if self.trials == 0 || self.trials % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "trials must be odd and positive, got {}",
                self.trials
            )));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::OutOfRange {
                what: "eps".into(),
                value: self.eps,
                range: "(0, 1)",
            });
        }
        Ok(())
    }

    /// Total chain steps a full amplified run would take on a graph with
    /// `n_half = |V|/2`.
    pub fn projected_steps(&self, n_half: usize) -> f64 {
        self.trials as f64 * n_half.saturating_sub(1) as f64 * self.samples as f64 * self.steps as f64
    }
}

/// `δ = ε/(8N)`, clamped into `(0, 1)`.
pub fn default_delta(eps: f64, n_half: usize) -> f64 {
    (eps / (8.0 * n_half.max(1) as f64)).min(0.5)
}

/// Constants of the worst-case parameter rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants {
    pub c_samples: f64,
    pub c_delta: f64,
}

impl Default for TheoryConstants {
    fn default() -> Self {
        TheoryConstants {
            c_samples: 1.0,
            c_delta: 8.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryParams {
    pub samples: usize,
    pub delta: f64,
}

pub fn theory_params(g: &WeightedMultigraph, eps: f64, q_coeff: f64) -> Result<TheoryParams> {
    let s = g.stats();
    theory_params_raw(s.num_vertices / 2, s.num_edges, s.w_max, eps, q_coeff, &TheoryConstants::default())
}

/// `T = ⌈c ε⁻² N⁴ |E|² w_max² (c_q N²)² ln N⌉` (at least 1) and `δ = ε/(c₂ N)`.
pub fn theory_params_raw(
    n_half: usize,
    num_edges: usize,
    w_max: f64,
    eps: f64,
    q_coeff: f64,
    c: &TheoryConstants,
) -> Result<TheoryParams> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange {
            what: "eps".into(),
            value: eps,
            range: "(0, 1)",
        });
    }
    let n = n_half.max(1) as f64;
    let q = q_coeff * n * n;
    let e = num_edges as f64;
    let t = c.c_samples * n.powi(4) * e * e * w_max * w_max * q * q * n.ln() / (eps * eps);
    Ok(TheoryParams {
        samples: (t.ceil() as usize).max(1),
        delta: eps / (c.c_delta * n),
    })
}

/// Source of matching sizes drawn from `Γ(α)`.
pub trait LevelSampler: Sync {
    /// `count` sizes, reproducible from `path`.
    fn sizes(&self, view: &WeightView<'_>, path: &[u64], count: usize) -> Result<(Vec<usize>, SamplerStats)>;
}

/// The Markov chain with a fixed step count.
#[derive(Clone, Copy, Debug)]
pub struct McmcSampler {
    pub steps: u64,
    pub seed: u64,
}

impl LevelSampler for McmcSampler {
    fn sizes(&self, view: &WeightView<'_>, path: &[u64], count: usize) -> Result<(Vec<usize>, SamplerStats)> {
        let cfg = SamplerConfig::new(self.steps, Mode::Practical, self.seed)?;
        Ok(sample_sizes(view, &cfg, path, count))
    }
}

/// Exact draws from the stationary law, for graphs with few matchings.
#[derive(Clone, Copy, Debug)]
pub struct ExactLevelSampler {
    pub seed: u64,
}

impl LevelSampler for ExactLevelSampler {
    fn sizes(&self, view: &WeightView<'_>, path: &[u64], count: usize) -> Result<(Vec<usize>, SamplerStats)> {
        let table = stationary_exact_scaled(view)?;
        let mut cumulative = Vec::with_capacity(table.len());
        let mut acc = 0.0;
        for p in &table.probs {
            acc += p;
            cumulative.push(acc);
        }
        let sizes = (0..count)
            .into_par_iter()
            .map(|i| {
                let mut p = vec![stream::SAMPLER];
                p.extend_from_slice(path);
                p.push(i as u64);
                let u: f64 = stream_rng(self.seed, &p).gen::<f64>() * acc;
                let idx = cumulative.partition_point(|&c| c <= u).min(table.len() - 1);
                table.matchings[idx].len()
            })
            .collect();
        Ok((sizes, SamplerStats::default()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub k: usize,
    /// `α_k` used to sample this level.
    pub alpha: f64,
    pub p_k: f64,
    pub p_k1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbortInfo {
    pub level: usize,
    pub reason: AbortReason,
}

/// Outcome of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    /// `None` exactly when the run aborted.
    pub estimate: Option<f64>,
    pub relative_error_target: f64,
    pub mode: Mode,
    pub levels: Vec<LevelRecord>,
    pub aborted: Option<AbortInfo>,
    pub seed: u64,
    pub samples_per_level: usize,
    pub steps: u64,
    pub sampler: SamplerStats,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl EstimateReport {
    /// `α_1, α_2, …` including the last update.
    pub fn alpha_trace(&self) -> Vec<f64> {
        let mut trace: Vec<f64> = self.levels.iter().map(|l| l.alpha).collect();
        if let (Some(last), None) = (self.levels.last(), &self.aborted) {
            trace.push(last.alpha * last.p_k / last.p_k1);
        }
        trace
    }

    /// The estimate, or the abort as an error.
    pub fn value(&self) -> Result<f64> {
        match (&self.estimate, &self.aborted) {
            (Some(v), None) => Ok(*v),
            (_, Some(a)) => Err(Error::AbortedAtLevel {
                level: a.level,
                reason: a.reason.clone(),
            }),
            (None, None) => unreachable!("report without estimate or abort"),
        }
    }
}

/// One run of the estimator, drawing level samples from `sampler` under the
/// stream `(ESTIMATOR, trial, k)`.
pub fn algorithm_b(
    g: &WeightedMultigraph,
    cfg: &EstimatorConfig,
    sampler: &dyn LevelSampler,
    trial: u64,
) -> Result<EstimateReport> {
    if g.num_vertices() % 2 == 1 {
        return Err(Error::OddVertexCount(g.num_vertices()));
    }
    let started = Instant::now();
    let n_half = g.num_vertices() / 2;
    let mut report = EstimateReport {
        estimate: None,
        relative_error_target: cfg.eps,
        mode: cfg.mode,
        levels: Vec::new(),
        aborted: None,
        seed: cfg.seed,
        samples_per_level: cfg.samples,
        steps: cfg.steps,
        sampler: SamplerStats::default(),
        wall_time: Duration::ZERO,
    };
    let finish = |mut r: EstimateReport| {
        r.wall_time = started.elapsed();
        Ok(r)
    };
    if n_half == 0 {
        report.estimate = Some(1.0);
        return finish(report);
    }
    let total = g.total_weight();
    if total <= 0.0 {
        report.aborted = Some(AbortInfo {
            level: 1,
            reason: AbortReason::EmptyLevel { level: 1 },
        });
        return finish(report);
    }

    let upper = 2.0 * cfg.q_coeff * (n_half * n_half) as f64;
    let lower = 1.0 / (2.0 * total);
    let mut alpha = 1.0 / total;
    let mut pi = total;
    for k in 1..n_half {
        if !(lower..=upper).contains(&alpha) {
            report.aborted = Some(AbortInfo {
                level: k,
                reason: AbortReason::AlphaOutOfRange { alpha, lower, upper },
            });
            return finish(report);
        }
        let view = WeightView::new(g, alpha);
        let (sizes, stats) = sampler.sizes(&view, &[stream::ESTIMATOR, trial, k as u64], cfg.samples)?;
        report.sampler = report.sampler.merge(stats);
        let t = cfg.samples as f64;
        let p_k = sizes.iter().filter(|&&s| s == k).count() as f64 / t;
        let p_k1 = sizes.iter().filter(|&&s| s == k + 1).count() as f64 / t;
        report.levels.push(LevelRecord { k, alpha, p_k, p_k1 });
        let empty = if p_k == 0.0 {
            Some(k)
        } else if p_k1 == 0.0 {
            Some(k + 1)
        } else {
            None
        };
        if let Some(level) = empty {
            report.aborted = Some(AbortInfo {
                level: k,
                reason: AbortReason::EmptyLevel { level },
            });
            return finish(report);
        }
        alpha *= p_k / p_k1;
        pi /= alpha;
    }
    report.estimate = Some(pi);
    finish(report)
}

/// Median of the successful runs among `trials` (odd). Fails when more than
/// half abort. With an even number of successes the two middle values are
/// averaged.
pub fn amplify_median<F>(trials: usize, mut run: F) -> Result<AmplifiedReport>
where
    F: FnMut(u64) -> Result<EstimateReport>,
{
    if trials == 0 || trials % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "trials must be odd and positive, got {trials}"
        )));
    }
    let mut runs = Vec::with_capacity(trials);
    for t in 0..trials {
        runs.push(run(t as u64)?);
    }
    let mut values: Vec<f64> = runs.iter().filter_map(|r| r.estimate).collect();
    let aborted = trials - values.len();
    if 2 * aborted > trials {
        return Err(Error::MajorityAborted { aborted, trials });
    }
    Ok(AmplifiedReport {
        estimate: median(&mut values),
        aborted_runs: aborted,
        runs,
    })
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplifiedReport {
    pub estimate: f64,
    pub aborted_runs: usize,
    pub runs: Vec<EstimateReport>,
}

/// Full estimate of `PerfMatch(g)`: `cfg.trials` chain-driven runs combined
/// by the median. Each run gets its own derived seed.
pub fn estimate_perfmatch(g: &WeightedMultigraph, cfg: &EstimatorConfig) -> Result<AmplifiedReport> {
    cfg.validate()?;
    let sampler = McmcSampler {
        steps: cfg.steps,
        seed: derive_seed(cfg.seed, &[stream::TRIAL]),
    };
    amplify_median(cfg.trials, |t| algorithm_b(g, cfg, &sampler, t))
}
