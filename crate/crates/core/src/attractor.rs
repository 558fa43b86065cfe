//! Absorbing sets, pullback/uniform attractor approximation, and
//! semicontinuity rate fits.
//!
//! The attractor approximations are ensemble constructions: low-discrepancy
//! starts inside the absorbing ball are evolved from ever-earlier times until
//! the snapshot stabilizes in Hausdorff distance. All randomness is seeded,
//! all reductions ordered, so repeated runs agree bit for bit.

use crate::error::{Error, Result};
use crate::exec;
use crate::space::{hausdorff_semidist, low_discrepancy_ball, PointCloud};
use crate::symbol::{HullApproximation, SymbolPath};
use crate::dynamics::Process;
use crate::fit;
use serde::Serialize;

/// Evidence that a ball absorbs itself: the trial that succeeded plus the
/// ensemble norm envelope at every checkpoint.
#[derive(Debug, Clone, Serialize)]
pub struct AbsorbingReport {
    pub r_absorb: f64,
    pub tau_absorb: f64,
    /// `(t, max over starts and symbols of |u(t)|_X)` at each checkpoint.
    pub evidence: Vec<(f64, f64)>,
    pub ensemble: usize,
    pub symbols: usize,
}

/// Sampling parameters of [`find_absorbing`].
#[derive(Debug, Clone)]
pub struct AbsorbingOptions {
    pub ensemble: usize,
    pub seed: u64,
    /// Candidate absorption times, ascending; trajectories are checked on
    /// `[tau, 2 tau]` for each.
    pub taus: Vec<f64>,
}

impl Default for AbsorbingOptions {
    fn default() -> Self {
        Self {
            ensemble: 16,
            seed: 23,
            taus: vec![0.25, 0.5, 1.0, 2.0],
        }
    }
}

/// Find the smallest trial radius `R` whose ball absorbs itself: every
/// sampled trajectory started in `B_X(0, R)` under every hull symbol stays
/// inside the ball on `[tau, 2 tau]` for some candidate `tau`.
pub fn find_absorbing(
    process: &Process,
    hull: &HullApproximation,
    trial_radii: &[f64],
    opts: &AbsorbingOptions,
) -> Result<AbsorbingReport> {
    if trial_radii.is_empty() {
        return Err(Error::EmptyInput("find_absorbing: trial_radii"));
    }
    if hull.is_empty() {
        return Err(Error::EmptyInput("find_absorbing: hull"));
    }
    if trial_radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::NonPositiveRadius(
            trial_radii.iter().copied().fold(f64::INFINITY, f64::min),
        ));
    }
    if opts.taus.is_empty() || opts.taus.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidParameter("need positive tau candidates".into()));
    }
    let cfg = process.config();
    if cfg.disc.lambda_1() + cfg.nonlinearity.c0 <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "non-dissipative configuration: lambda_1 + C0 = {} <= 0",
            cfg.disc.lambda_1() + cfg.nonlinearity.c0
        )));
    }
    let mut radii: Vec<f64> = trial_radii.to_vec();
    radii.sort_by(|a, b| a.partial_cmp(b).expect("radii are finite"));

    // checkpoint grid: 9 samples of [tau, 2 tau] per candidate, merged
    let mut checkpoints: Vec<f64> = Vec::new();
    for &tau in &opts.taus {
        for j in 0..=8 {
            checkpoints.push(tau + tau * j as f64 / 8.0);
        }
    }
    checkpoints.sort_by(|a, b| a.partial_cmp(b).expect("checkpoints are finite"));
    checkpoints.dedup();

    let modes = cfg.disc.modes();
    for &r in &radii {
        let starts = low_discrepancy_ball(opts.ensemble, modes, r, opts.seed);
        let mut max_norm = vec![0.0f64; checkpoints.len()];
        for sigma in &hull.paths {
            let norms_per_start = exec::map_ordered(&starts.elements, |u| -> Result<Vec<f64>> {
                let mut state = u.clone();
                let mut t_prev = 0.0;
                let mut norms = Vec::with_capacity(checkpoints.len());
                for &t in &checkpoints {
                    state = process.evolve(&state, sigma, t_prev, t)?;
                    t_prev = t;
                    norms.push(state.norm_x());
                }
                Ok(norms)
            });
            for norms in norms_per_start {
                for (acc, n) in max_norm.iter_mut().zip(norms?) {
                    *acc = acc.max(n);
                }
            }
        }
        for &tau in &opts.taus {
            let inside = checkpoints
                .iter()
                .zip(&max_norm)
                .filter(|(&t, _)| t >= tau * (1.0 - 1e-12) && t <= 2.0 * tau * (1.0 + 1e-12))
                .all(|(_, &n)| n <= r * (1.0 + 1e-12));
            if inside {
                return Ok(AbsorbingReport {
                    r_absorb: r,
                    tau_absorb: tau,
                    evidence: checkpoints.iter().copied().zip(max_norm).collect(),
                    ensemble: opts.ensemble,
                    symbols: hull.len(),
                });
            }
        }
    }
    Err(Error::NoAbsorbingRadius {
        largest: *radii.last().expect("radii nonempty"),
    })
}

/// Sampling parameters of the pullback constructions.
#[derive(Debug, Clone)]
pub struct PullbackOptions {
    pub ensemble: usize,
    pub seed: u64,
    /// Hausdorff stabilization tolerance between successive lookbacks.
    pub tol: f64,
    pub max_lookback: f64,
}

impl Default for PullbackOptions {
    fn default() -> Self {
        Self {
            ensemble: 64,
            seed: 29,
            tol: 1e-6,
            max_lookback: 64.0,
        }
    }
}

/// One stabilized pullback snapshot `A(t)`.
#[derive(Debug, Clone)]
pub struct PullbackSnapshot {
    pub time: f64,
    pub cloud: PointCloud,
    /// Lookback at which the snapshot stabilized.
    pub lookback: f64,
    /// Hausdorff semidistance to the previous lookback's snapshot.
    pub residual: f64,
}

/// Approximate `A(t)` by evolving an absorbing-ball ensemble from `t - T` to
/// `t`, doubling `T` until successive snapshots agree within `opts.tol`.
pub fn compute_pullback_attractor(
    process: &Process,
    g: &SymbolPath,
    t: f64,
    absorbing: &AbsorbingReport,
    opts: &PullbackOptions,
) -> Result<PullbackSnapshot> {
    if opts.ensemble == 0 {
        return Err(Error::EmptyInput("compute_pullback_attractor: ensemble"));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::NonPositiveRadius(opts.tol));
    }
    let modes = process.config().disc.modes();
    let starts = low_discrepancy_ball(opts.ensemble, modes, absorbing.r_absorb, opts.seed);
    let snapshot = |lookback: f64| -> Result<PointCloud> {
        let elements = process.evolve_many(&starts.elements, g, t - lookback, t)?;
        Ok(PointCloud::new(format!("pullback-t{t}"), elements))
    };
    let mut lookback = absorbing.tau_absorb.max(1e-3);
    let mut prev = snapshot(lookback)?;
    let mut residual = f64::INFINITY;
    while lookback <= opts.max_lookback {
        let next_lookback = 2.0 * lookback;
        let next = snapshot(next_lookback)?;
        residual = hausdorff_semidist(&next, &prev)?;
        if residual < opts.tol {
            return Ok(PullbackSnapshot {
                time: t,
                cloud: next,
                lookback: next_lookback,
                residual,
            });
        }
        prev = next;
        lookback = next_lookback;
    }
    Err(Error::LookbackNotConverged {
        t,
        max_lookback: opts.max_lookback,
        last_delta: residual,
    })
}

/// Family of pullback snapshots on an increasing time grid, with the
/// provenance needed to reproduce it.
#[derive(Debug, Clone)]
pub struct AttractorFamily {
    pub times: Vec<f64>,
    pub snapshots: Vec<PointCloud>,
    pub lookbacks: Vec<f64>,
    pub residuals: Vec<f64>,
    pub ensemble: usize,
    pub tol: f64,
}

impl AttractorFamily {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Non-empty snapshots on an increasing grid, bounded union.
    pub fn validate(&self) -> Result<()> {
        if self.times.is_empty() {
            return Err(Error::EmptyInput("AttractorFamily: times"));
        }
        if self.times.len() != self.snapshots.len() {
            return Err(Error::InvalidParameter(format!(
                "family has {} times but {} snapshots",
                self.times.len(),
                self.snapshots.len()
            )));
        }
        for w in self.times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidParameter(
                    "family times must be strictly increasing".into(),
                ));
            }
        }
        for cloud in &self.snapshots {
            if cloud.is_empty() {
                return Err(Error::EmptyInput("AttractorFamily: snapshot"));
            }
            if !cloud.max_norm_x().is_finite() {
                return Err(Error::InvalidParameter("unbounded snapshot".into()));
            }
        }
        Ok(())
    }
}

/// Stabilized snapshots `A(t)` for every `t` in `times`.
pub fn compute_attractor_family(
    process: &Process,
    g: &SymbolPath,
    times: &[f64],
    absorbing: &AbsorbingReport,
    opts: &PullbackOptions,
) -> Result<AttractorFamily> {
    if times.is_empty() {
        return Err(Error::EmptyInput("compute_attractor_family: times"));
    }
    for w in times.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidParameter(
                "family times must be strictly increasing".into(),
            ));
        }
    }
    let mut snapshots = Vec::with_capacity(times.len());
    let mut lookbacks = Vec::with_capacity(times.len());
    let mut residuals = Vec::with_capacity(times.len());
    for &t in times {
        let snap = compute_pullback_attractor(process, g, t, absorbing, opts)?;
        snapshots.push(snap.cloud);
        lookbacks.push(snap.lookback);
        residuals.push(snap.residual);
    }
    let family = AttractorFamily {
        times: times.to_vec(),
        snapshots,
        lookbacks,
        residuals,
        ensemble: opts.ensemble,
        tol: opts.tol,
    };
    family.validate()?;
    Ok(family)
}

/// Union over the hull of the per-symbol pullback snapshots at `t = 0`; the
/// chained-order merge keeps every per-symbol cloud as a contiguous block.
pub fn compute_uniform_attractor(
    process: &Process,
    hull: &HullApproximation,
    absorbing: &AbsorbingReport,
    opts: &PullbackOptions,
) -> Result<PointCloud> {
    if hull.is_empty() {
        return Err(Error::EmptyInput("compute_uniform_attractor: hull"));
    }
    let mut elements = Vec::with_capacity(hull.len() * opts.ensemble);
    for sigma in &hull.paths {
        let snap = compute_pullback_attractor(process, sigma, 0.0, absorbing, opts)?;
        elements.extend(snap.cloud.elements);
    }
    Ok(PointCloud::new("uniform-attractor", elements))
}

/// Which decay law fit a semicontinuity tail better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RateModel {
    Exponential,
    Polynomial,
}

/// Fitted attraction rate of one time direction.
#[derive(Debug, Clone, Serialize)]
pub struct SideFit {
    /// Exponential envelope `dist <= c_bar e^(-xi |t|)` on the fitted tail.
    pub c_bar: f64,
    pub xi: f64,
    /// Polynomial alternative `dist <= k_poly / |t|^r_poly`.
    pub k_poly: f64,
    pub r_poly: f64,
    /// Tail threshold: samples with `|t| >= t_tilde` entered the fits.
    pub t_tilde: f64,
    /// Model with the smaller log-scale residual.
    pub model: RateModel,
    pub residual_exp: f64,
    pub residual_poly: f64,
}

/// Rates for both time directions.
#[derive(Debug, Clone, Serialize)]
pub struct SemicontinuityFit {
    pub plus: SideFit,
    pub minus: SideFit,
}

/// Fit exponential and polynomial envelopes to `dist_H(A(t), M_pm)` on each
/// half-line tail and report which model fits better. The tail must be
/// non-increasing toward the limit; a rising tail is a hypothesis violation,
/// not a fit.
pub fn fit_semicontinuity_rate(
    family: &AttractorFamily,
    m_plus: &PointCloud,
    m_minus: &PointCloud,
) -> Result<SemicontinuityFit> {
    family.validate()?;
    let dist_to = |limit: &PointCloud| -> Result<Vec<f64>> {
        family
            .snapshots
            .iter()
            .map(|cloud| hausdorff_semidist(cloud, limit))
            .collect()
    };
    let d_plus = dist_to(m_plus)?;
    let d_minus = dist_to(m_minus)?;
    let plus: Vec<(f64, f64)> = family
        .times
        .iter()
        .zip(&d_plus)
        .filter(|(&t, _)| t > 0.0)
        .map(|(&t, &d)| (t, d))
        .collect();
    let minus: Vec<(f64, f64)> = family
        .times
        .iter()
        .zip(&d_minus)
        .filter(|(&t, _)| t < 0.0)
        .map(|(&t, &d)| (t.abs(), d))
        .collect();
    Ok(SemicontinuityFit {
        plus: fit_one_side(&plus)?,
        minus: fit_one_side(&minus)?,
    })
}

/// Fit one half-line given `(|t|, dist)` samples.
fn fit_one_side(samples: &[(f64, f64)]) -> Result<SideFit> {
    if samples.len() < 3 {
        return Err(Error::TooFewSamples {
            got: samples.len(),
            need: 3,
        });
    }
    let mut by_t = samples.to_vec();
    by_t.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("times are finite"));
    let t_max = by_t.last().expect("nonempty").0;
    let t_tilde = t_max / 2.0;
    let tail: Vec<(f64, f64)> = by_t.iter().copied().filter(|&(t, _)| t >= t_tilde).collect();
    // the tail must approach the limit set monotonically (within slack)
    for w in tail.windows(2) {
        if w[1].1 > w[0].1 * (1.0 + 1e-6) + 1e-12 {
            return Err(Error::SemicontinuityViolated { at: w[1].0 });
        }
    }
    let positive: Vec<(f64, f64)> = tail.iter().copied().filter(|&(_, d)| d > 1e-300).collect();
    if positive.len() < 3 {
        // the family already sits on the limit set: zero envelope, any rate
        return Ok(SideFit {
            c_bar: 0.0,
            xi: 1.0,
            k_poly: 0.0,
            r_poly: 1.0,
            t_tilde,
            model: RateModel::Exponential,
            residual_exp: 0.0,
            residual_poly: 0.0,
        });
    }
    let ts: Vec<f64> = positive.iter().map(|&(t, _)| t).collect();
    let logs: Vec<f64> = positive.iter().map(|&(_, d)| d.ln()).collect();
    let log_ts: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let exp_fit = fit::linear_fit(&ts, &logs);
    let poly_fit = fit::linear_fit(&log_ts, &logs);
    let xi = (-exp_fit.slope).max(0.0);
    let r_poly = (-poly_fit.slope).max(0.0);
    let c_bar = positive
        .iter()
        .map(|&(t, d)| d * (xi * t).exp())
        .fold(0.0f64, f64::max);
    let k_poly = positive
        .iter()
        .map(|&(t, d)| d * t.powf(r_poly))
        .fold(0.0f64, f64::max);
    let ss = |pred: &dyn Fn(f64) -> f64| -> f64 {
        positive
            .iter()
            .map(|&(t, d)| {
                let r = d.ln() - pred(t);
                r * r
            })
            .sum()
    };
    let residual_exp = ss(&|t| exp_fit.intercept + exp_fit.slope * t);
    let residual_poly = ss(&|t| poly_fit.intercept + poly_fit.slope * t.ln());
    Ok(SideFit {
        c_bar,
        xi,
        k_poly,
        r_poly,
        t_tilde,
        model: if residual_exp <= residual_poly {
            RateModel::Exponential
        } else {
            RateModel::Polynomial
        },
        residual_exp,
        residual_poly,
    })
}
