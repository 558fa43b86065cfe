//! Forcing paths, the weighted Frechet metric, and hull approximations.
//!
//! A [`SymbolPath`] is a piecewise-linear path `R -> X` stored as samples on a
//! strictly increasing time grid, constant beyond the grid. Time translation
//! is represented by an offset into shared sample data, so `shift` is O(1),
//! the group law `shift(shift(p, s), t) = shift(p, s + t)` is exact whenever
//! the offset additions are exact (integer and dyadic shifts in particular),
//! and translates of one path share storage.
//!
//! The metric on paths is the truncated weighted sup metric
//!
//! ```text
//!     d(p, q) = sum_{n=0}^{N} 2^-n * d_n / (1 + d_n),
//!     d_n     = max_{|s| <= n} |p(s) - q(s)|_X,
//! ```
//!
//! with `d_n` evaluated on a refined sample grid of `[-n, n]` and the series
//! truncated at `N` = [`FrechetConfig::levels`] (tail below `2^-N`). Every
//! distance is strictly below 2.

use crate::error::{Error, Result};
use crate::exec;
use crate::fit;
use crate::space::{greedy_cover_by, StateVector};
use std::sync::Arc;

/// Truncation and sampling resolution of the Frechet metric.
#[derive(Debug, Clone, Copy)]
pub struct FrechetConfig {
    /// Number of windows `n = 0..=levels`; the dropped tail is below
    /// `2^-levels`.
    pub levels: usize,
    /// Samples per unit of time when maximizing over a window.
    pub samples_per_unit: u32,
}

impl Default for FrechetConfig {
    fn default() -> Self {
        Self {
            levels: 40,
            samples_per_unit: 8,
        }
    }
}

#[derive(Debug)]
struct PathData {
    times: Vec<f64>,
    values: Vec<StateVector>,
    modes: usize,
}

/// Piecewise-linear sampled path with constant extrapolation and an O(1)
/// time-translation offset.
#[derive(Debug, Clone)]
pub struct SymbolPath {
    data: Arc<PathData>,
    offset: f64,
}

impl SymbolPath {
    /// Path through `(times[i], values[i])`, linear in between, constant
    /// outside. Times must be finite and strictly increasing.
    pub fn from_samples(times: Vec<f64>, values: Vec<StateVector>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::EmptyInput("SymbolPath::from_samples: times"));
        }
        if times.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "times/values length mismatch: {} vs {}",
                times.len(),
                values.len()
            )));
        }
        for w in times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidParameter(format!(
                    "sample times must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter("non-finite sample time".into()));
        }
        let modes = values[0].modes();
        for v in &values {
            if v.modes() != modes {
                return Err(Error::ModeMismatch {
                    left: modes,
                    right: v.modes(),
                });
            }
            if !v.is_finite() {
                return Err(Error::InvalidParameter("non-finite sample value".into()));
            }
        }
        Ok(Self {
            data: Arc::new(PathData {
                times,
                values,
                modes,
            }),
            offset: 0.0,
        })
    }

    /// Constant path `t -> v`.
    pub fn constant(v: StateVector) -> Self {
        Self::from_samples(vec![0.0], vec![v]).expect("single-sample path is always valid")
    }

    /// Constant zero path with `modes` modes.
    pub fn zero(modes: usize) -> Self {
        Self::constant(StateVector::zero(modes))
    }

    /// Sample `f` on the inclusive grid `t0, t0 + step, ..., >= t1`.
    pub fn from_fn(
        f: impl Fn(f64) -> StateVector,
        t0: f64,
        t1: f64,
        step: f64,
    ) -> Result<Self> {
        if !(step > 0.0) || !(t1 > t0) {
            return Err(Error::InvalidParameter(format!(
                "from_fn needs t1 > t0 and step > 0, got [{t0}, {t1}] step {step}"
            )));
        }
        let n = ((t1 - t0) / step).ceil() as usize;
        let times: Vec<f64> = (0..=n).map(|i| t0 + i as f64 * step).collect();
        let values = times.iter().map(|&t| f(t)).collect();
        Self::from_samples(times, values)
    }

    pub fn modes(&self) -> usize {
        self.data.modes
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Time translation: `shift(p, t)(s) = p(s + t)`.
    pub fn shift(&self, t: f64) -> Self {
        Self {
            data: Arc::clone(&self.data),
            offset: self.offset + t,
        }
    }

    /// Interval of evaluation times outside which the path is constant.
    pub fn span(&self) -> (f64, f64) {
        let ts = &self.data.times;
        (ts[0] - self.offset, ts[ts.len() - 1] - self.offset)
    }

    /// Underlying sample grid in evaluation coordinates, plus values.
    pub fn samples(&self) -> (Vec<f64>, &[StateVector]) {
        let ts = self
            .data
            .times
            .iter()
            .map(|t| t - self.offset)
            .collect();
        (ts, &self.data.values)
    }

    pub fn eval(&self, t: f64) -> StateVector {
        let mut out = vec![0.0; self.data.modes];
        self.eval_into(t, &mut out);
        StateVector::new(out)
    }

    /// Evaluate into a caller-provided buffer (hot path of the stepper).
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.data.modes);
        let s = t + self.offset;
        let ts = &self.data.times;
        let vs = &self.data.values;
        let last = ts.len() - 1;
        if s <= ts[0] {
            out.copy_from_slice(&vs[0].coeffs);
        } else if s >= ts[last] {
            out.copy_from_slice(&vs[last].coeffs);
        } else {
            let hi = ts.partition_point(|&x| x <= s);
            let lo = hi - 1;
            let w = (s - ts[lo]) / (ts[hi] - ts[lo]);
            for (k, o) in out.iter_mut().enumerate() {
                let a = vs[lo].coeffs[k];
                *o = a + w * (vs[hi].coeffs[k] - a);
            }
        }
    }
}

/// Cached samples of a path on the canonical Frechet grid `j / spu`,
/// `|j| <= window * spu`. Beyond the window the path is constant, so the
/// boundary sample doubles as the tail value.
#[derive(Debug, Clone)]
pub struct SampledSymbol {
    window: usize,
    spu: u32,
    modes: usize,
    values: Vec<f64>, // (2 * window * spu + 1) rows of `modes` coefficients
}

impl SampledSymbol {
    pub fn new(path: &SymbolPath, cfg: &FrechetConfig) -> Self {
        let (lo, hi) = path.span();
        let reach = lo.abs().max(hi.abs()).max(1.0);
        let window = (reach.ceil() as usize).min(cfg.levels).max(1);
        let spu = cfg.samples_per_unit;
        let half = window as i64 * spu as i64;
        let modes = path.modes();
        let mut values = vec![0.0; (2 * half as usize + 1) * modes];
        for j in -half..=half {
            let s = j as f64 / spu as f64;
            let row = (j + half) as usize * modes;
            path.eval_into(s, &mut values[row..row + modes]);
        }
        Self {
            window,
            spu,
            modes,
            values,
        }
    }

    #[inline]
    fn row(&self, j: i64) -> &[f64] {
        let half = self.window as i64 * self.spu as i64;
        let jc = j.clamp(-half, half);
        let row = (jc + half) as usize * self.modes;
        &self.values[row..row + self.modes]
    }
}

/// Frechet distance between two cached paths. Bit-identical to
/// [`frechet_dist`] on the same configuration.
pub fn frechet_dist_sampled(a: &SampledSymbol, b: &SampledSymbol, cfg: &FrechetConfig) -> Result<f64> {
    if a.modes != b.modes {
        return Err(Error::ModeMismatch {
            left: a.modes,
            right: b.modes,
        });
    }
    debug_assert_eq!(a.spu, b.spu);
    let spu = a.spu as i64;
    let w = a.window.max(b.window).min(cfg.levels);
    let half = w * spu as usize;
    // Per-sample norm differences over the widest needed window.
    let diffs: Vec<f64> = (-(half as i64)..=half as i64)
        .map(|j| {
            let (ra, rb) = (a.row(j), b.row(j));
            let mut acc = 0.0;
            for (x, y) in ra.iter().zip(rb) {
                let d = x - y;
                acc += d * d;
            }
            acc.sqrt()
        })
        .collect();
    let at = |j: i64| diffs[(j + half as i64) as usize];

    let mut total = 0.0;
    let mut weight = 1.0; // 2^-n, exact halving
    let mut dn = at(0);
    for n in 0..=cfg.levels {
        if n > 0 && n <= w {
            // extend the running max over the newly exposed samples
            let lo = (n as i64 - 1) * spu + 1;
            let hi = n as i64 * spu;
            for j in lo..=hi {
                dn = dn.max(at(j)).max(at(-j));
            }
        }
        // beyond `w` both paths are constant, dn no longer grows
        total += weight * dn / (1.0 + dn);
        weight *= 0.5;
    }
    Ok(total)
}

/// Truncated weighted sup distance between two paths (see module docs).
///
/// Symmetric, zero on identical paths, satisfies the triangle inequality up
/// to the `2^-levels` truncation tail, and is always `< 2`.
pub fn frechet_dist(p: &SymbolPath, q: &SymbolPath, cfg: &FrechetConfig) -> Result<f64> {
    let a = SampledSymbol::new(p, cfg);
    let b = SampledSymbol::new(q, cfg);
    frechet_dist_sampled(&a, &b, cfg)
}

/// Finite approximation of the hull of a forcing path: the translates
/// `shift(g, r)` for `r` on a symmetric lattice.
#[derive(Debug, Clone)]
pub struct HullApproximation {
    pub source: SymbolPath,
    pub shifts: Vec<f64>,
    pub paths: Vec<SymbolPath>,
    pub frechet: FrechetConfig,
}

impl HullApproximation {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Frechet sample caches for all members, in shift order.
    pub fn sampled(&self) -> Vec<SampledSymbol> {
        exec::map_ordered(&self.paths, |p| SampledSymbol::new(p, &self.frechet))
    }
}

/// Materialize the hull lattice `shift(g, r)`, `r = -t_extent, ..., t_extent`
/// in steps of `step` (inclusive on both ends).
pub fn build_hull(
    g: &SymbolPath,
    t_extent: f64,
    step: f64,
    cfg: FrechetConfig,
) -> Result<HullApproximation> {
    if !(t_extent > 0.0) || !(step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "hull needs positive extent and step, got extent {t_extent}, step {step}"
        )));
    }
    if step > 2.0 * t_extent {
        return Err(Error::InvalidParameter(format!(
            "hull step {step} exceeds the shift range {}",
            2.0 * t_extent
        )));
    }
    let n = (2.0 * t_extent / step).round() as usize;
    let shifts: Vec<f64> = (0..=n).map(|i| -t_extent + i as f64 * step).collect();
    let paths = shifts.iter().map(|&r| g.shift(r)).collect();
    Ok(HullApproximation {
        source: g.clone(),
        shifts,
        paths,
        frechet: cfg,
    })
}

/// Which end of the shift lattice to inspect for a limit set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitDirection {
    /// Shifts near `-t_extent` (backward limit).
    Alpha,
    /// Shifts near `+t_extent` (forward limit).
    Omega,
}

/// Cluster the outermost translates of the hull into a finite limit-set
/// approximation.
///
/// The outer quarter of the lattice is split into a core (inner 3/4) and a
/// probe (outermost 1/4). Core members are clustered greedily at radius
/// `tol`; if any probe member is farther than `tol` from every cluster
/// representative the tail has not stabilized and an error is returned.
pub fn estimate_limit_sets(
    hull: &HullApproximation,
    direction: LimitDirection,
    tol: f64,
) -> Result<HullApproximation> {
    if !(tol > 0.0) {
        return Err(Error::NonPositiveRadius(tol));
    }
    let n = hull.len();
    if n < 8 {
        return Err(Error::TooFewSamples { got: n, need: 8 });
    }
    let tail_len = (n / 4).max(4);
    // Tail indices ordered inward -> outward.
    let tail: Vec<usize> = match direction {
        LimitDirection::Omega => (n - tail_len..n).collect(),
        LimitDirection::Alpha => (0..tail_len).rev().collect(),
    };
    let probe_len = (tail_len / 4).max(2);
    let core_len = tail_len - probe_len;
    let cached: Vec<SampledSymbol> = exec::map_ordered(&tail, |&i| {
        SampledSymbol::new(&hull.paths[i], &hull.frechet)
    });
    let core = &cached[..core_len];
    let reps = greedy_cover_by(core, tol, |a, b| {
        frechet_dist_sampled(a, b, &hull.frechet).expect("modes match within one hull")
    })?;
    for (pi, probe) in cached[core_len..].iter().enumerate() {
        let ok = reps.iter().any(|&ri| {
            frechet_dist_sampled(probe, &core[ri], &hull.frechet)
                .expect("modes match within one hull")
                <= tol
        });
        if !ok {
            return Err(Error::NonConvergentTail {
                shift: hull.shifts[tail[core_len + pi]],
                tol,
            });
        }
    }
    let rep_global: Vec<usize> = reps.iter().map(|&ri| tail[ri]).collect();
    Ok(HullApproximation {
        source: hull.source.clone(),
        shifts: rep_global.iter().map(|&i| hull.shifts[i]).collect(),
        paths: rep_global.iter().map(|&i| hull.paths[i].clone()).collect(),
        frechet: hull.frechet,
    })
}

/// Verified Lipschitz envelope of the shift action on sampled paths.
#[derive(Debug, Clone)]
pub struct DrivingLipschitz {
    /// Envelope prefactor; defaults to the analytic value 2.
    pub p: f64,
    /// Envelope rate; defaults to the analytic value `ln 2`.
    pub zeta: f64,
    /// Largest observed `d(shift_t p, shift_t q) / (e^(zeta t) d(p, q))`.
    pub observed_p: f64,
    /// Number of path pairs entering the verification.
    pub pairs: usize,
}

/// Verify `d(shift_t p, shift_t q) <= P e^(zeta t) d(p, q)` on all sampled
/// pairs for `t` on an integer grid of `[0, 10]`.
///
/// Window counting gives `d_n(shift_t p, shift_t q) <= d_(n + ceil(t))(p, q)`,
/// hence the analytic envelope `P = 2`, `zeta = ln 2`, which is returned
/// (enlarged only in the impossible case that a sampled ratio exceeds it).
pub fn estimate_driving_lipschitz(
    cfg: &FrechetConfig,
    paths: &[SymbolPath],
) -> Result<DrivingLipschitz> {
    if paths.len() < 2 {
        return Err(Error::TooFewSamples {
            got: paths.len(),
            need: 2,
        });
    }
    let zeta = std::f64::consts::LN_2;
    let mut observed: f64 = 0.0;
    let mut pairs = 0usize;
    for i in 0..paths.len() {
        for j in i + 1..paths.len() {
            let base = frechet_dist(&paths[i], &paths[j], cfg)?;
            if base == 0.0 {
                continue;
            }
            pairs += 1;
            for t in 0..=10u32 {
                let t = f64::from(t);
                let shifted = frechet_dist(&paths[i].shift(t), &paths[j].shift(t), cfg)?;
                observed = observed.max(shifted / ((zeta * t).exp() * base));
            }
        }
    }
    if pairs == 0 {
        return Err(Error::DegenerateSample(
            "estimate_driving_lipschitz: all paths coincide",
        ));
    }
    Ok(DrivingLipschitz {
        p: observed.max(2.0),
        zeta,
        observed_p: observed,
        pairs,
    })
}

/// Quasi-periodic forcing `g(t) = sum_i amps[i] sin(freqs[i] t)` sampled on
/// `[t_min, t_max]` with the given step.
pub fn make_quasiperiodic(
    freqs: &[f64],
    amps: &[StateVector],
    t_min: f64,
    t_max: f64,
    step: f64,
) -> Result<SymbolPath> {
    if freqs.is_empty() || freqs.len() != amps.len() {
        return Err(Error::InvalidParameter(format!(
            "need matching nonempty freqs/amps, got {} and {}",
            freqs.len(),
            amps.len()
        )));
    }
    let modes = amps[0].modes();
    for a in amps {
        if a.modes() != modes {
            return Err(Error::ModeMismatch {
                left: modes,
                right: a.modes(),
            });
        }
    }
    SymbolPath::from_fn(
        |t| {
            let mut v = StateVector::zero(modes);
            for (f, a) in freqs.iter().zip(amps) {
                let s = (f * t).sin();
                for (c, ac) in v.coeffs.iter_mut().zip(&a.coeffs) {
                    *c += s * ac;
                }
            }
            v
        },
        t_min,
        t_max,
        step,
    )
}

/// Depth-`depth` Cantor-set forcing path.
///
/// Knots sit at the `2^depth` left endpoints `x(b) = sum_i 2 b_i 3^-i` of the
/// depth-`depth` Cantor intervals, carrying `sampler(b)`; the path is linear
/// across the removed middle thirds, constant on the last sliver up to t = 1,
/// ramps linearly from 0 on [-1, 0] and back to 0 on [1, 2], and vanishes
/// outside [-1, 2]. Evaluation at a knot reproduces the sampler value
/// exactly.
pub fn make_cantor_forcing(
    sampler: &dyn Fn(&[bool]) -> StateVector,
    depth: usize,
    modes: usize,
) -> Result<SymbolPath> {
    if depth == 0 || depth > 20 {
        return Err(Error::InvalidParameter(format!(
            "cantor depth must lie in 1..=20, got {depth}"
        )));
    }
    let pow3: f64 = 3f64.powi(depth as i32); // exact for depth <= 20
    let count = 1usize << depth;
    let mut times = Vec::with_capacity(count + 3);
    let mut values = Vec::with_capacity(count + 3);
    times.push(-1.0);
    values.push(StateVector::zero(modes));
    let mut bits = vec![false; depth];
    for j in 0..count {
        for (i, b) in bits.iter_mut().enumerate() {
            *b = (j >> (depth - 1 - i)) & 1 == 1;
        }
        // numerator of x(b) in base 3: sum of 2 * b_i * 3^(depth - i)
        let mut num: u64 = 0;
        let mut p: u64 = 1;
        for i in (0..depth).rev() {
            if bits[i] {
                num += 2 * p;
            }
            p *= 3;
        }
        let x = num as f64 / pow3;
        let v = sampler(&bits);
        if v.modes() != modes {
            return Err(Error::ModeMismatch {
                left: modes,
                right: v.modes(),
            });
        }
        times.push(x);
        values.push(v);
    }
    let last = values[values.len() - 1].clone();
    times.push(1.0);
    values.push(last);
    times.push(2.0);
    values.push(StateVector::zero(modes));
    SymbolPath::from_samples(times, values)
}

/// Sampler mapping depth-`depth` Cantor addresses to corners of a box inside
/// the Y-unit ball: bit `k` switches mode `k` with amplitude
/// `1 / sqrt(depth * lambda_k)`, so any bit pattern has `norm_y <= 1`.
pub fn y_ball_corner_sampler(
    eigenvalues: &[f64],
    depth: usize,
    modes: usize,
) -> impl Fn(&[bool]) -> StateVector + '_ {
    assert!(depth >= 1 && depth <= modes && modes <= eigenvalues.len());
    move |bits: &[bool]| {
        let mut v = StateVector::zero(modes);
        for (k, &b) in bits.iter().enumerate() {
            if b {
                v.coeffs[k] = 1.0 / (depth as f64 * eigenvalues[k]).sqrt();
            }
        }
        v
    }
}

/// Exponential-closeness envelopes of a path to its forward/backward limits:
/// `|g(t) - g_minus(t)| <= q_minus e^(eta_minus t)` and
/// `|g(t) - g_plus(t)| <= q_plus e^(-eta_plus t)` at every sampled t.
#[derive(Debug, Clone)]
pub struct ExponentialCloseness {
    pub q_minus: f64,
    pub eta_minus: f64,
    pub q_plus: f64,
    pub eta_plus: f64,
}

/// Fit the exponential-closeness rates of `g` to candidate limits.
///
/// Rates come from least-squares fits of `ln |g - g_pm|` on the matching
/// half-line (differences identically zero past some time are treated as
/// compactly supported and assigned rate 1); prefactors are then enlarged to
/// envelope every sample on the full grid. A tail that does not decay is an
/// error, not a fit.
pub fn fit_exponential_closeness(
    g: &SymbolPath,
    g_minus: &SymbolPath,
    g_plus: &SymbolPath,
    step: f64,
) -> Result<ExponentialCloseness> {
    if !(step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "closeness grid step must be positive, got {step}"
        )));
    }
    // Confine the grid to the sampled spans: beyond them paths are constant
    // extrapolations and would pollute the tail fits with flat segments.
    let reach = [g, g_minus, g_plus]
        .iter()
        .map(|p| {
            let (lo, hi) = p.span();
            lo.abs().max(hi.abs())
        })
        .fold(1.0f64, f64::max);
    let count = (reach / step).ceil() as i64;
    let ts: Vec<f64> = (-count..=count).map(|i| i as f64 * step).collect();
    let diff = |limit: &SymbolPath| -> Vec<f64> {
        ts.iter()
            .map(|&t| g.eval(t).sub(&limit.eval(t)).norm_x())
            .collect()
    };
    let e_minus = diff(g_minus);
    let e_plus = diff(g_plus);
    let mid = count as usize; // index of t = 0

    let (eta_plus, q_plus) = fit_side(&ts[mid..], &e_plus[mid..], &ts, &e_plus, false)?;
    let (eta_minus, q_minus) = fit_side(&ts[..=mid], &e_minus[..=mid], &ts, &e_minus, true)?;
    Ok(ExponentialCloseness {
        q_minus,
        eta_minus,
        q_plus,
        eta_plus,
    })
}

/// Fit one half-line. `minus_side` selects the sign convention; the envelope
/// prefactor is maximized over the full grid so the bound holds everywhere.
fn fit_side(
    half_ts: &[f64],
    half_es: &[f64],
    all_ts: &[f64],
    all_es: &[f64],
    minus_side: bool,
) -> Result<(f64, f64)> {
    const FLOOR: f64 = 1e-300;
    let side = if minus_side { "minus" } else { "plus" };
    let positive: Vec<(f64, f64)> = half_ts
        .iter()
        .zip(half_es)
        .filter(|(_, &e)| e > FLOOR)
        .map(|(&t, &e)| (t, e))
        .collect();
    let eta = if positive.is_empty() {
        // g coincides with the limit on this half-line; any rate works.
        1.0
    } else {
        // "outermost" sample actually carrying a difference
        let extreme_pos = positive
            .iter()
            .map(|(t, _)| t.abs())
            .fold(0.0f64, f64::max);
        let extreme_grid = half_ts.iter().map(|t| t.abs()).fold(0.0f64, f64::max);
        if extreme_pos + 1e-12 < extreme_grid {
            // compactly supported difference: decays faster than any
            // exponential, report rate 1 and let the envelope absorb it
            1.0
        } else {
            if positive.len() < 3 {
                return Err(Error::TooFewSamples {
                    got: positive.len(),
                    need: 3,
                });
            }
            let xs: Vec<f64> = positive.iter().map(|(t, _)| *t).collect();
            let ys: Vec<f64> = positive.iter().map(|(_, e)| e.ln()).collect();
            let line = fit::linear_fit(&xs, &ys);
            // plus side decays with slope -eta, minus side rises with +eta
            let rate = if minus_side { line.slope } else { -line.slope };
            if rate <= 1e-9 {
                return Err(Error::NonDecayingTail { side, rate });
            }
            rate
        }
    };
    let mut q: f64 = 1.0;
    for (&t, &e) in all_ts.iter().zip(all_es) {
        let growth = if minus_side { (-eta * t).exp() } else { (eta * t).exp() };
        q = q.max(e * growth);
    }
    Ok((eta, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::StateVector;

    fn cfg() -> FrechetConfig {
        FrechetConfig::default()
    }

    /// Independent truncated-series oracle for paths whose window sup is
    /// known exactly: sum 2^-n phi(d_n) for given d_n.
    fn series(dn: impl Fn(usize) -> f64, levels: usize) -> f64 {
        let mut total = 0.0;
        let mut w = 1.0;
        for n in 0..=levels {
            let d = dn(n);
            total += w * d / (1.0 + d);
            w *= 0.5;
        }
        total
    }

    #[test]
    fn constant_paths_at_unit_distance() {
        let p = SymbolPath::constant(StateVector::new(vec![0.25, 0.0]));
        let q = SymbolPath::constant(StateVector::new(vec![0.25, 1.0]));
        let d = frechet_dist(&p, &q, &cfg()).unwrap();
        let expected = series(|_| 1.0, 40); // = 1 - 2^-41
        assert_eq!(d, expected, "constant unit-gap pair must hit the oracle");
        assert!((d - 1.0).abs() <= 1e-9, "geometric series sums to 1, got {d}");
        assert!(d < 2.0);
    }

    /// Bump of height 1 supported on (2.25, 3.25), plateau on [2.5, 3].
    fn far_bump() -> SymbolPath {
        let knots = vec![2.25, 2.5, 3.0, 3.25];
        let vals = vec![0.0, 1.0, 1.0, 0.0];
        SymbolPath::from_samples(
            knots,
            vals.into_iter()
                .map(|v| StateVector::new(vec![v]))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn far_bump_distance_is_eighth() {
        let p = SymbolPath::zero(1);
        let q = far_bump();
        let d = frechet_dist(&p, &q, &cfg()).unwrap();
        // windows n <= 2 miss the support entirely, n >= 3 see sup = 1
        let expected = series(|n| if n >= 3 { 1.0 } else { 0.0 }, 40);
        assert_eq!(d, expected, "bump pair must match the series oracle");
        assert!((d - 0.125).abs() <= 1e-9, "got {d}");
    }

    #[test]
    fn metric_axioms_on_sampled_paths() {
        let a = SymbolPath::from_fn(
            |t| StateVector::new(vec![(0.7 * t).sin(), 0.3 * t.cos()]),
            -6.0,
            6.0,
            0.25,
        )
        .unwrap();
        let b = SymbolPath::from_fn(
            |t| StateVector::new(vec![0.2 * t.sin(), (1.3 * t).cos() * 0.5]),
            -6.0,
            6.0,
            0.25,
        )
        .unwrap();
        let c = SymbolPath::zero(2);
        let f = cfg();
        let dab = frechet_dist(&a, &b, &f).unwrap();
        let dba = frechet_dist(&b, &a, &f).unwrap();
        assert_eq!(dab, dba, "symmetry must be exact");
        assert_eq!(frechet_dist(&a, &a, &f).unwrap(), 0.0);
        let (dac, dcb) = (
            frechet_dist(&a, &c, &f).unwrap(),
            frechet_dist(&c, &b, &f).unwrap(),
        );
        assert!(
            dab <= dac + dcb + 2f64.powi(-39),
            "triangle violated: {dab} > {dac} + {dcb}"
        );
        assert!(dab < 2.0 && dac < 2.0 && dcb < 2.0);
    }

    #[test]
    fn shift_group_law_exact_on_aligned_grids() {
        let p = far_bump();
        let a = p.shift(0.5).shift(1.25);
        let b = p.shift(1.75);
        assert_eq!(a.offset(), b.offset(), "dyadic offsets add exactly");
        let d = frechet_dist(&a, &b, &cfg()).unwrap();
        assert_eq!(d, 0.0);
        // identity shift
        assert_eq!(frechet_dist(&p.shift(0.0), &p, &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn driving_lipschitz_on_constant_pair() {
        let p = SymbolPath::constant(StateVector::new(vec![0.0]));
        let q = SymbolPath::constant(StateVector::new(vec![1.0]));
        let est = estimate_driving_lipschitz(&cfg(), &[p.clone(), q.clone()]).unwrap();
        assert_eq!(est.p, 2.0);
        assert_eq!(est.zeta, std::f64::consts::LN_2);
        // constants are shift-invariant, so the sup ratio sits at t = 0
        assert_eq!(est.observed_p, 1.0);
        let d0 = frechet_dist(&p, &q, &cfg()).unwrap();
        let d7 = frechet_dist(&p.shift(7.0), &q.shift(7.0), &cfg()).unwrap();
        assert_eq!(d0, d7, "shifting constants is the identity");
    }

    #[test]
    fn driving_lipschitz_envelope_on_far_bump() {
        let p = SymbolPath::zero(1);
        let q = far_bump();
        let f = cfg();
        let d0 = frechet_dist(&p, &q, &f).unwrap();
        let d3 = frechet_dist(&p.shift(3.0), &q.shift(3.0), &f).unwrap();
        // window counting: d(theta_3 p, theta_3 q) <= 2^ceil(3) * d = 8 * 0.125
        assert!(d3 <= 1.0 + 1e-12, "sharp ceil bound violated: {d3}");
        assert!(
            d3 <= 2.0 * (3.0 * std::f64::consts::LN_2).exp() * d0 + 1e-12,
            "returned envelope violated: {d3}"
        );
        // on an integer t grid the ceil bound is 2^t = e^(zeta t) exactly, so
        // the observed prefactor exceeds 1 only by the truncation tail
        let est = estimate_driving_lipschitz(&f, &[p, q]).unwrap();
        assert!(est.observed_p <= 1.0 + 1e-9, "got {}", est.observed_p);
    }

    #[test]
    fn degenerate_driving_sample_errors() {
        let p = SymbolPath::zero(3);
        let err = estimate_driving_lipschitz(&cfg(), &[p.clone(), p]).unwrap_err();
        assert!(matches!(err, Error::DegenerateSample(_)), "got {err:?}");
    }

    #[test]
    fn hull_lattice_shape() {
        let g = far_bump();
        let h = build_hull(&g, 2.0, 0.5, cfg()).unwrap();
        assert_eq!(h.len(), 9);
        assert_eq!(h.shifts[0], -2.0);
        assert_eq!(*h.shifts.last().unwrap(), 2.0);
        // each member is the exact translate of the source
        let d = frechet_dist(&h.paths[1], &g.shift(-1.5), &cfg()).unwrap();
        assert_eq!(d, 0.0);
        assert!(build_hull(&g, 0.0, 0.5, cfg()).is_err());
        assert!(build_hull(&g, 1.0, 3.0, cfg()).is_err());
    }

    #[test]
    fn compact_support_hull_has_near_zero_extremes() {
        let g = far_bump();
        let h = build_hull(&g, 30.0, 0.5, cfg()).unwrap();
        let zero = SymbolPath::zero(1);
        let d_lo = frechet_dist(&h.paths[0], &zero, &cfg()).unwrap();
        let d_hi = frechet_dist(h.paths.last().unwrap(), &zero, &cfg()).unwrap();
        // support slides past window 27, leaving only the far tail weight
        assert!(d_lo < 1e-6, "alpha extreme not near zero: {d_lo}");
        assert!(d_hi < 1e-6, "omega extreme not near zero: {d_hi}");
    }

    #[test]
    fn limit_set_of_compactly_supported_forcing_is_a_point() {
        let g = far_bump();
        // the tail spans shifts 20..40 where translates are ~2^-17 apart,
        // well inside the clustering tolerance
        let h = build_hull(&g, 40.0, 0.5, cfg()).unwrap();
        let omega = estimate_limit_sets(&h, LimitDirection::Omega, 1e-4).unwrap();
        assert_eq!(omega.len(), 1, "omega-limit of compact support is {{0}}");
        let alpha = estimate_limit_sets(&h, LimitDirection::Alpha, 1e-4).unwrap();
        assert_eq!(alpha.len(), 1);
        let zero = SymbolPath::zero(1);
        assert!(frechet_dist(&omega.paths[0], &zero, &cfg()).unwrap() < 1e-4);
    }

    #[test]
    fn limit_set_of_unconverged_tail_reports() {
        let g = far_bump();
        // extent 10 leaves the support inside windows ~8..12 where the metric
        // still changes by ~2^-8 per step, far above the tolerance
        let h = build_hull(&g, 10.0, 0.5, cfg()).unwrap();
        let err = estimate_limit_sets(&h, LimitDirection::Omega, 1e-6).unwrap_err();
        assert!(matches!(err, Error::NonConvergentTail { .. }), "got {err:?}");
    }

    /// Exactly 2-periodic path: values tile an 8-sample pattern on a dyadic
    /// grid wide enough that no metric window of any hull member reaches the
    /// extrapolation region, so translates by multiples of 2 are bit-identical.
    fn periodic_path() -> SymbolPath {
        let pattern = [0.0, 0.5, 1.0, 0.5, 0.0, -0.5, -1.0, -0.5];
        let step = 0.25;
        let half = 208i64;
        let times: Vec<f64> = (-half..=half).map(|j| j as f64 * step).collect();
        let values = (-half..=half)
            .map(|j| StateVector::new(vec![pattern[(j.rem_euclid(8)) as usize]]))
            .collect();
        SymbolPath::from_samples(times, values).unwrap()
    }

    #[test]
    fn limit_set_of_periodic_forcing_is_the_period_orbit() {
        let g = periodic_path();
        let h = build_hull(&g, 10.0, 0.25, cfg()).unwrap();
        let omega = estimate_limit_sets(&h, LimitDirection::Omega, 1e-6).unwrap();
        // period 2 sampled at shift step 0.25 -> 8 distinct translates
        assert_eq!(omega.len(), 8, "expected the discrete period orbit");
    }

    #[test]
    fn quasiperiodic_generator_matches_formula() {
        let amps = vec![
            StateVector::new(vec![0.3, 0.0]),
            StateVector::new(vec![0.0, 0.2]),
        ];
        let freqs = vec![1.0, std::f64::consts::SQRT_2];
        let g = make_quasiperiodic(&freqs, &amps, -5.0, 5.0, 0.125).unwrap();
        let t = 1.375; // on the sample grid
        let v = g.eval(t);
        assert!((v.coeffs[0] - 0.3 * t.sin()).abs() < 1e-15);
        assert!((v.coeffs[1] - 0.2 * (std::f64::consts::SQRT_2 * t).sin()).abs() < 1e-15);
        assert!(make_quasiperiodic(&[1.0], &[], -1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn cantor_forcing_reproduces_sampler_exactly() {
        let depth = 4;
        let eigen: Vec<f64> = (1..=4)
            .map(|k| (k as f64 * std::f64::consts::PI).powi(2))
            .collect();
        let sampler = y_ball_corner_sampler(&eigen, depth, 4);
        let g = make_cantor_forcing(&sampler, depth, 4).unwrap();
        let pow3 = 81.0;
        for j in 0..(1usize << depth) {
            let bits: Vec<bool> = (0..depth).map(|i| (j >> (depth - 1 - i)) & 1 == 1).collect();
            let mut num = 0u64;
            let mut p = 1u64;
            for i in (0..depth).rev() {
                if bits[i] {
                    num += 2 * p;
                }
                p *= 3;
            }
            let x = num as f64 / pow3;
            let expect = sampler(&bits);
            assert_eq!(g.eval(x), expect, "knot {j} must reproduce the sampler");
        }
        // ramp: g(-1/2) = alpha(0) / 2 where alpha(0) = 0 for this sampler;
        // use the all-ones end instead: g(1.5) = alpha(1) / 2
        let all_ones = sampler(&vec![true; depth]);
        let v = g.eval(1.5);
        for k in 0..4 {
            assert!((v.coeffs[k] - 0.5 * all_ones.coeffs[k]).abs() < 1e-15);
        }
        assert_eq!(g.eval(-3.0).norm_x(), 0.0);
        assert_eq!(g.eval(5.0).norm_x(), 0.0);
    }

    #[test]
    fn cantor_forcing_refines_with_depth() {
        let eigen: Vec<f64> = (1..=8)
            .map(|k| (k as f64 * std::f64::consts::PI).powi(2))
            .collect();
        let max_jump = |depth: usize| -> f64 {
            let sampler = y_ball_corner_sampler(&eigen, depth, 8);
            let g = make_cantor_forcing(&sampler, depth, 8).unwrap();
            let (times, values) = g.samples();
            let interior = 1..times.len() - 2; // skip the boundary ramps
            interior
                .clone()
                .zip(interior.skip(1))
                .map(|(i, j)| values[i].sub(&values[j]).norm_x())
                .fold(0.0f64, f64::max)
        };
        let (j4, j6, j8) = (max_jump(4), max_jump(6), max_jump(8));
        assert!(j4 > j6 && j6 > j8, "adjacent jumps must shrink: {j4} {j6} {j8}");
    }

    #[test]
    fn closeness_fit_recovers_unit_rate() {
        let g = SymbolPath::from_fn(
            |t| StateVector::new(vec![(-t.abs()).exp()]),
            -12.0,
            12.0,
            0.125,
        )
        .unwrap();
        let zero = SymbolPath::zero(1);
        let fit = fit_exponential_closeness(&g, &zero, &zero, 0.125).unwrap();
        assert!((fit.eta_plus - 1.0).abs() < 1e-9, "eta_plus = {}", fit.eta_plus);
        assert!((fit.eta_minus - 1.0).abs() < 1e-9);
        assert!((fit.q_plus - 1.0).abs() < 1e-9, "q_plus = {}", fit.q_plus);
        // envelope property on the sample grid
        for i in 0..=96 {
            let t = i as f64 * 0.125;
            let e = g.eval(t).norm_x();
            assert!(e <= fit.q_plus * (-fit.eta_plus * t).exp() + 1e-12);
        }
    }

    #[test]
    fn closeness_fit_handles_identical_and_compact_cases() {
        let zero = SymbolPath::zero(1);
        let fit = fit_exponential_closeness(&zero, &zero, &zero, 0.25).unwrap();
        assert_eq!(fit.q_plus, 1.0);
        assert_eq!(fit.eta_plus, 1.0);

        let g = far_bump(); // difference to 0 is compactly supported
        let fit = fit_exponential_closeness(&g, &zero, &zero, 0.25).unwrap();
        assert_eq!(fit.eta_plus, 1.0, "compact support => default rate 1");
        // envelope q_plus covers max |g| e^(eta t) on the support, t <= 3.25
        let bound = 1.0 * (1.0f64 * 3.25).exp();
        assert!(fit.q_plus <= bound + 1e-9, "q_plus = {}", fit.q_plus);
        for i in -16..=16 {
            let t = i as f64 * 0.25;
            let e = g.eval(t).norm_x();
            assert!(e <= fit.q_plus * (-fit.eta_plus * t).exp() + 1e-12);
        }
    }

    #[test]
    fn closeness_fit_rejects_rising_tail() {
        let g = SymbolPath::from_fn(|t| StateVector::new(vec![0.1 * t]), 0.0, 20.0, 0.5).unwrap();
        let zero = SymbolPath::zero(1);
        let err = fit_exponential_closeness(&g, &zero, &zero, 0.5).unwrap_err();
        assert!(matches!(err, Error::NonDecayingTail { side: "plus", .. }), "got {err:?}");
    }

    #[test]
    fn eval_interpolates_and_extrapolates() {
        let p = SymbolPath::from_samples(
            vec![0.0, 1.0, 3.0],
            vec![
                StateVector::new(vec![0.0]),
                StateVector::new(vec![2.0]),
                StateVector::new(vec![2.0]),
            ],
        )
        .unwrap();
        assert_eq!(p.eval(-5.0).coeffs[0], 0.0, "constant extrapolation left");
        assert_eq!(p.eval(10.0).coeffs[0], 2.0, "constant extrapolation right");
        assert_eq!(p.eval(0.5).coeffs[0], 1.0, "midpoint interpolation");
        assert_eq!(p.eval(1.0).coeffs[0], 2.0, "knots reproduce exactly");
        let shifted = p.shift(1.0);
        assert_eq!(shifted.eval(0.0).coeffs[0], 2.0, "shift(p,1)(0) = p(1)");
        assert!(SymbolPath::from_samples(vec![0.0, 0.0], vec![StateVector::zero(1); 2]).is_err());
    }
}
