//! Monte Carlo estimators for the limit theorems.
//!
//! Trials fan out across threads with per-trial RNG streams; aggregation
//! uses integer counters only, so reports are byte-identical for a given
//! root seed and configuration regardless of scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::report::EstimateReport;
use super::theory::{
    kappa, qtazrp_marginal_theory, second_class_speed_cdf_theory, survival_theory, TheoryError,
};
use crate::rngstream::trial_rng;
use crate::systems::{make_qtazrp, FastHalfline, SystemsError};

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Systems(#[from] SystemsError),
    #[error("{discards} of {trials} trials hit the window edge (> 1%); enlarge the window")]
    ExcessiveDiscards { discards: u64, trials: u64 },
    #[error("plateau not reached: estimate moved {delta:.6} (> 4 sigma = {bound:.6}) between t and 2t")]
    PlateauNotReached { delta: f64, bound: f64 },
}

fn check_discards(discards: u64, trials: u64) -> Result<(), EstimatorError> {
    if discards * 100 > trials {
        Err(EstimatorError::ExcessiveDiscards { discards, trials })
    } else {
        Ok(())
    }
}

/// Survival experiment configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurvivalConfig {
    pub k: usize,
    pub l: usize,
    pub alpha: f64,
    pub q: f64,
    pub t: f64,
    pub window: usize,
    pub trials: u64,
    pub seed: u64,
}

/// Frequency of the exited tracked type (negative sign of the image of
/// type `k`) at time `t`, compared against the survival limit.
pub fn estimate_survival(cfg: &SurvivalConfig) -> Result<EstimateReport, EstimatorError> {
    let theory = survival_theory(cfg.k, cfg.l, cfg.alpha, cfg.q)?;
    let fast = FastHalfline::new(cfg.window, cfg.alpha, cfg.q, cfg.k, cfg.l)?;
    let (successes, discards) = run_sign_trials(&fast, cfg.t, cfg.trials, cfg.seed, 0);
    check_discards(discards, cfg.trials)?;
    Ok(EstimateReport::from_binary(
        successes,
        cfg.trials - discards,
        discards,
        theory,
        cfg.seed,
    ))
}

/// Exit experiment configuration (`q = 0`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExitConfig {
    pub k: usize,
    pub l: usize,
    pub alpha: f64,
    pub t: f64,
    pub window: usize,
    pub trials: u64,
    pub seed: u64,
}

/// Limit frequency of the tracked sign flip at `q = 0`.
///
/// For `alpha < 1/2` the finite-`t` bias decays exponentially, so a
/// single batch at `t` is reported, guarded by a plateau check against
/// a smaller batch at `2t` (four combined standard errors). For
/// `alpha >= 1/2` the boundary density relaxes diffusively and the bias
/// decays only like `t^{-1/2}`; the estimator then runs equal batches
/// at `t` and `4t` (where the leading bias term is exactly halved) and
/// reports the Richardson extrapolation `2 f(4t) - f(t)`, whose
/// remaining bias is `O(1/t)`.
pub fn estimate_exit(cfg: &ExitConfig) -> Result<EstimateReport, EstimatorError> {
    let theory = super::theory::exit_probability_theory(cfg.k, cfg.l, cfg.alpha)?;
    let fast = FastHalfline::new(cfg.window, cfg.alpha, 0.0, cfg.k, cfg.l)?;
    let (successes, discards) = run_sign_trials(&fast, cfg.t, cfg.trials, cfg.seed, 0);
    check_discards(discards, cfg.trials)?;
    let kept = cfg.trials - discards;
    let report = EstimateReport::from_binary(successes, kept, discards, theory, cfg.seed);
    if cfg.alpha >= 0.5 {
        // the window scales with the horizon so the 4t batch keeps the
        // same headroom in front of the ballistic edge
        let wide = FastHalfline::new(cfg.window * 4, cfg.alpha, 0.0, cfg.k, cfg.l)?;
        let (s4, d4) = run_sign_trials(&wide, 4.0 * cfg.t, cfg.trials, cfg.seed, cfg.trials);
        check_discards(d4, cfg.trials)?;
        let kept4 = cfg.trials - d4;
        let late = EstimateReport::from_binary(s4, kept4, d4, theory, cfg.seed);
        let estimate = 2.0 * late.estimate - report.estimate;
        let stderr = (4.0 * late.stderr.powi(2) + report.stderr.powi(2)).sqrt();
        let zscore = if stderr > 0.0 {
            (estimate - theory) / stderr
        } else if estimate == theory {
            0.0
        } else {
            f64::INFINITY
        };
        return Ok(EstimateReport {
            estimate,
            stderr,
            trials: kept + kept4,
            discards: discards + d4,
            theory,
            zscore,
            seed: cfg.seed,
        });
    }
    // plateau detection: a quarter-size batch at 2t must agree within
    // four combined standard errors
    let check_trials = (cfg.trials / 4).max(1);
    let (s2, d2) = run_sign_trials(&fast, 2.0 * cfg.t, check_trials, cfg.seed, cfg.trials);
    let kept2 = check_trials - d2;
    let late = EstimateReport::from_binary(s2, kept2, d2, theory, cfg.seed);
    let delta = (report.estimate - late.estimate).abs();
    let bound = 4.0 * (report.stderr.powi(2) + late.stderr.powi(2)).sqrt();
    if delta > bound {
        return Err(EstimatorError::PlateauNotReached { delta, bound });
    }
    Ok(report)
}

/// `(successes, discards)` where success means the tracked type carries
/// a negative sign at the end. `stream_offset` separates trial streams
/// of auxiliary batches from the main one.
fn run_sign_trials(
    fast: &FastHalfline,
    t: f64,
    trials: u64,
    seed: u64,
    stream_offset: u64,
) -> (u64, u64) {
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, stream_offset + trial);
            let run = fast.run(t, &mut rng);
            if run.boundary_contact {
                (0u64, 1u64)
            } else {
                (run.tracked_negative as u64, 0)
            }
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

/// q-TAZRP marginal experiment configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QtazrpMarginalConfig {
    /// Observed site index `N`.
    pub n: usize,
    /// Observation time is `kappa(alpha) * N * kappa_multiplier`.
    pub kappa_multiplier: f64,
    pub q: f64,
    pub alpha: f64,
    pub trials: u64,
    pub seed: u64,
    /// Histogram cutoff: occupancies at and above are pooled.
    pub l_max: usize,
}

/// Marginal result: per-occupancy reports plus distribution diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct QtazrpMarginalReport {
    pub per_l: Vec<EstimateReport>,
    /// Total variation distance between the empirical pmf and the theory
    /// pmf (theory mass above `l_max` pooled).
    pub tv_distance: f64,
    /// Correlation between the occupancies of sites `N` and `N-1`
    /// ("asymptotically independent" diagnostic).
    pub neighbor_correlation: f64,
}

pub fn estimate_qtazrp_marginal(
    cfg: &QtazrpMarginalConfig,
) -> Result<QtazrpMarginalReport, EstimatorError> {
    let t = kappa(cfg.alpha, cfg.q)? * cfg.n as f64 * cfg.kappa_multiplier;
    let system = make_qtazrp(cfg.n + 1, cfg.q, None)?;
    let bins = cfg.l_max + 1;
    // per-trial: histogram bin of X_N, plus moments of (X_N, X_{N-1})
    struct Acc {
        hist: Vec<u64>,
        sum_x: u128,
        sum_y: u128,
        sum_xx: u128,
        sum_yy: u128,
        sum_xy: u128,
    }
    let zero = |bins: usize| Acc {
        hist: vec![0; bins],
        sum_x: 0,
        sum_y: 0,
        sum_xx: 0,
        sum_yy: 0,
        sum_xy: 0,
    };
    let acc = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(cfg.seed, trial);
            let run = system.run(t, &mut rng);
            let x = run.config.counts[cfg.n];
            let y = run.config.counts[cfg.n - 1];
            let mut a = zero(bins);
            a.hist[(x as usize).min(cfg.l_max)] = 1;
            a.sum_x = x as u128;
            a.sum_y = y as u128;
            a.sum_xx = (x * x) as u128;
            a.sum_yy = (y * y) as u128;
            a.sum_xy = (x * y) as u128;
            a
        })
        .reduce(
            || zero(bins),
            |mut a, b| {
                for (h, v) in a.hist.iter_mut().zip(&b.hist) {
                    *h += v;
                }
                a.sum_x += b.sum_x;
                a.sum_y += b.sum_y;
                a.sum_xx += b.sum_xx;
                a.sum_yy += b.sum_yy;
                a.sum_xy += b.sum_xy;
                a
            },
        );
    let trials = cfg.trials;
    let mut per_l = Vec::with_capacity(bins);
    let mut tv = 0.0;
    for l in 0..bins {
        let theory = if l < cfg.l_max {
            qtazrp_marginal_theory(l, cfg.alpha, cfg.q)?
        } else {
            // pooled tail mass
            1.0 - (0..cfg.l_max)
                .map(|j| qtazrp_marginal_theory(j, cfg.alpha, cfg.q))
                .sum::<Result<f64, _>>()?
        };
        let report = EstimateReport::from_binary(acc.hist[l], trials, 0, theory, cfg.seed);
        tv += 0.5 * (report.estimate - theory).abs();
        per_l.push(report);
    }
    let nf = trials as f64;
    let mean_x = acc.sum_x as f64 / nf;
    let mean_y = acc.sum_y as f64 / nf;
    let var_x = acc.sum_xx as f64 / nf - mean_x * mean_x;
    let var_y = acc.sum_yy as f64 / nf - mean_y * mean_y;
    let cov = acc.sum_xy as f64 / nf - mean_x * mean_y;
    let neighbor_correlation = if var_x > 0.0 && var_y > 0.0 {
        cov / (var_x * var_y).sqrt()
    } else {
        0.0
    };
    Ok(QtazrpMarginalReport {
        per_l,
        tv_distance: tv,
        neighbor_correlation,
    })
}

/// Second-class speed experiment configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpeedConfig {
    /// Starting site of the lone second-class particle.
    pub s: usize,
    pub q: f64,
    /// One tail estimate per grid point.
    pub alpha_grid: Vec<f64>,
    /// Observation time per grid point is `kappa(alpha) * N`.
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpeedReport {
    pub per_alpha: Vec<EstimateReport>,
    /// Largest observed `h(t)/t` over all grid points and trials.
    pub max_speed: f64,
}

/// Tail frequency of `h(t)/t >= 1/kappa(alpha)` at `t = kappa(alpha) N`,
/// which is the event that the particle has reached site `>= N + s`.
pub fn estimate_second_class_speed(cfg: &SpeedConfig) -> Result<SpeedReport, EstimatorError> {
    let mut per_alpha = Vec::with_capacity(cfg.alpha_grid.len());
    let mut max_speed = 0.0f64;
    for (grid_idx, &alpha) in cfg.alpha_grid.iter().enumerate() {
        let t = kappa(alpha, cfg.q)? * cfg.n as f64;
        let theory = second_class_speed_cdf_theory(cfg.s, alpha)?;
        // ballistic bound plus slack; contact beyond it discards the trial
        let window = cfg.s + ((1.0 - cfg.q) * t + 10.0 * t.sqrt()).ceil() as usize + 2;
        let system = make_qtazrp(window, cfg.q, Some(cfg.s))?;
        let threshold = cfg.s + cfg.n;
        let (successes, discards, speed_bits) = (0..cfg.trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = trial_rng(cfg.seed, grid_idx as u64 * cfg.trials + trial);
                let run = system.run(t, &mut rng);
                if run.boundary_contact {
                    return (0u64, 1u64, 0u64);
                }
                let pos = run.config.second_class.expect("second class tracked");
                let speed = (pos - cfg.s) as f64 / t;
                ((pos >= threshold) as u64, 0, speed.to_bits())
            })
            .reduce(
                || (0, 0, 0),
                |a, b| {
                    // f64 max via the bit pattern: nonnegative floats
                    // order the same as their bits
                    (a.0 + b.0, a.1 + b.1, a.2.max(b.2))
                },
            );
        check_discards(discards, cfg.trials)?;
        max_speed = max_speed.max(f64::from_bits(speed_bits));
        per_alpha.push(EstimateReport::from_binary(
            successes,
            cfg.trials - discards,
            discards,
            theory,
            cfg.seed,
        ));
    }
    Ok(SpeedReport {
        per_alpha,
        max_speed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn survival_trivial_depth() {
        // l = k: the limit is alpha itself; small t suffices at l = k
        // only in the limit, so use a moderate horizon and 4-sigma band
        let cfg = SurvivalConfig {
            k: 1,
            l: 1,
            alpha: 0.3,
            q: 0.0,
            t: 40.0,
            window: 160,
            trials: 20_000,
            seed: 101,
        };
        let report = estimate_survival(&cfg).unwrap();
        assert!(report.zscore.abs() <= 4.0, "z={}", report.zscore);
        assert_eq!(report.trials + report.discards, 20_000);
    }

    #[test]
    fn survival_reports_are_deterministic() {
        let cfg = SurvivalConfig {
            k: 1,
            l: 2,
            alpha: 0.3,
            q: 0.5,
            t: 5.0,
            window: 30,
            trials: 5_000,
            seed: 7,
        };
        let a = estimate_survival(&cfg).unwrap();
        let b = estimate_survival(&cfg).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn exit_alpha_squared() {
        // alpha = 0.3, l - k = 1: limit 0.09
        let cfg = ExitConfig {
            k: 1,
            l: 2,
            alpha: 0.3,
            t: 60.0,
            window: 240,
            trials: 20_000,
            seed: 11,
        };
        let report = estimate_exit(&cfg).unwrap();
        assert!(report.zscore.abs() <= 4.0, "z={}", report.zscore);
    }

    #[test]
    fn qtazrp_marginal_small_smoke() {
        let cfg = QtazrpMarginalConfig {
            n: 30,
            kappa_multiplier: 1.0,
            q: 0.5,
            alpha: 0.5,
            trials: 4_000,
            seed: 13,
            l_max: 12,
        };
        let report = estimate_qtazrp_marginal(&cfg).unwrap();
        let total: f64 = report.per_l.iter().map(|r| r.estimate).sum();
        assert!((total - 1.0).abs() < 1e-12);
        // finite-N bias at N=30 is visible but bounded
        assert!(report.tv_distance < 0.1, "tv={}", report.tv_distance);
        assert!(report.neighbor_correlation.abs() < 0.2);
    }

    #[test]
    fn speed_zero_start_smoke() {
        let cfg = SpeedConfig {
            s: 0,
            q: 0.5,
            alpha_grid: vec![0.5],
            n: 40,
            trials: 3_000,
            seed: 17,
        };
        let report = estimate_second_class_speed(&cfg).unwrap();
        let r = &report.per_alpha[0];
        assert!((r.estimate - 0.5).abs() < 0.06, "estimate={}", r.estimate);
        let t = kappa(0.5, 0.5).unwrap() * 40.0;
        assert!(report.max_speed <= 0.5 + 5.0 / t.sqrt(), "max={}", report.max_speed);
    }
}
