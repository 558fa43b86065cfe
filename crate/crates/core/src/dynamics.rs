//! Evolution processes for the Galerkin-truncated reaction-diffusion system
//!
//! ```text
//!     du/dt + A u = f(u) + sigma(t),      A = -Laplace on (0, L), Dirichlet,
//! ```
//!
//! realized by an exponential semi-implicit Euler scheme: per step the linear
//! part is integrated exactly mode-by-mode while nonlinearity and forcing
//! enter explicitly,
//!
//! ```text
//!     u_k  <-  e^(-lambda_k h) * (u_k + h * (f(u)_k + sigma_k(t))).
//! ```
//!
//! `f(u)_k` is computed by sine collocation: evaluate `u` at the nodes
//! `x_j = j L / (P + 1)`, apply `f` pointwise, project back with the discrete
//! sine transform (exact on the resolved modes for `P >= m`). The linear
//! family bypasses collocation, since `f(u) = -c u` projects to `-c u_k`
//! exactly.
//!
//! Also here: empirical estimators for the hypothesis constants (smoothing
//! kappa, time-Hoelder exponent, symbol-Lipschitz growth) measured on sampled
//! basins and symbols.

use crate::error::{Error, Result};
use crate::exec;
use crate::fit;
use crate::space::{PointCloud, SpatialDiscretization, StateVector};
use crate::symbol::{frechet_dist, FrechetConfig, SymbolPath};
use serde::Serialize;

/// Named family of pointwise reaction terms.
#[derive(Debug, Clone)]
pub enum NonlinearityKind {
    /// `f(u) = -rate * u`; applied in coefficient space (exact projection).
    Linear { rate: f64 },
    /// `f(u) = -scale * u^3 / (1 + u^2)`, globally Lipschitz with constant
    /// `1.125 * scale` (the sup of `|f'|` sits at `u^2 = 3`).
    SaturatedCubic { scale: f64 },
    /// Tabulated globally-Lipschitz function: linear interpolation between
    /// knots, constant beyond them.
    Spline { knots: Vec<f64>, values: Vec<f64> },
}

/// Reaction term together with its certified constants.
#[derive(Debug, Clone)]
pub struct NonlinearitySpec {
    pub kind: NonlinearityKind,
    /// Global Lipschitz constant of `f`.
    pub lip: f64,
    /// Sign condition `a f(a) <= -c0 a^2 + c1 |a|`.
    pub c0: f64,
    pub c1: f64,
    /// Growth exponent (recorded only; the families here are all Lipschitz).
    pub growth_exponent: f64,
}

impl NonlinearitySpec {
    pub fn linear(rate: f64) -> Self {
        Self {
            kind: NonlinearityKind::Linear { rate },
            lip: rate.abs(),
            c0: rate,
            c1: 0.0,
            growth_exponent: 1.0,
        }
    }

    pub fn zero() -> Self {
        Self::linear(0.0)
    }

    pub fn saturated_cubic(scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "saturated cubic needs scale > 0, got {scale}"
            )));
        }
        Ok(Self {
            kind: NonlinearityKind::SaturatedCubic { scale },
            lip: 1.125 * scale,
            c0: 0.0,
            c1: 0.0,
            growth_exponent: 3.0,
        })
    }

    /// Tabulated term; Lipschitz and sign constants are derived from the
    /// table itself.
    pub fn spline(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 || knots.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "spline needs >= 2 matching knots/values, got {} and {}",
                knots.len(),
                values.len()
            )));
        }
        for w in knots.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidParameter(
                    "spline knots must be strictly increasing".into(),
                ));
            }
        }
        if knots.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite spline data".into()));
        }
        let lip = knots
            .windows(2)
            .zip(values.windows(2))
            .map(|(k, v)| ((v[1] - v[0]) / (k[1] - k[0])).abs())
            .fold(0.0f64, f64::max);
        let c1 = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        Ok(Self {
            kind: NonlinearityKind::Spline { knots, values },
            lip,
            c0: 0.0,
            c1,
            growth_exponent: 1.0,
        })
    }

    /// Pointwise evaluation.
    pub fn eval(&self, u: f64) -> f64 {
        match &self.kind {
            NonlinearityKind::Linear { rate } => -rate * u,
            NonlinearityKind::SaturatedCubic { scale } => -scale * u * u * u / (1.0 + u * u),
            NonlinearityKind::Spline { knots, values } => {
                let last = knots.len() - 1;
                if u <= knots[0] {
                    values[0]
                } else if u >= knots[last] {
                    values[last]
                } else {
                    let hi = knots.partition_point(|&x| x <= u);
                    let lo = hi - 1;
                    let w = (u - knots[lo]) / (knots[hi] - knots[lo]);
                    values[lo] + w * (values[hi] - values[lo])
                }
            }
        }
    }

    /// Check the Lipschitz and sign invariants on a dense grid of [-8, 8].
    pub fn validate(&self) -> Result<()> {
        if !(self.lip >= 0.0) || !self.lip.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Lipschitz constant must be finite and >= 0, got {}",
                self.lip
            )));
        }
        if self.c1 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sign constant c1 must be >= 0, got {}",
                self.c1
            )));
        }
        let n = 1600;
        let mut prev_u = -8.0;
        let mut prev_f = self.eval(prev_u);
        for i in 0..=n {
            let u = -8.0 + 16.0 * i as f64 / n as f64;
            let f = self.eval(u);
            if i > 0 {
                let du = u - prev_u;
                if (f - prev_f).abs() > self.lip * du * (1.0 + 1e-9) + 1e-14 {
                    return Err(Error::InvalidParameter(format!(
                        "Lipschitz constant {} violated near u = {u}",
                        self.lip
                    )));
                }
            }
            let sign_bound = -self.c0 * u * u + self.c1 * u.abs();
            if u * f > sign_bound + 1e-12 * (1.0 + u * u) {
                return Err(Error::InvalidParameter(format!(
                    "sign condition violated at u = {u}: {} > {sign_bound}",
                    u * f
                )));
            }
            prev_u = u;
            prev_f = f;
        }
        Ok(())
    }
}

/// Discretization, reaction term, and stepping parameters of one process.
#[derive(Debug, Clone)]
pub struct ProcessConfig {
    pub disc: SpatialDiscretization,
    pub nonlinearity: NonlinearitySpec,
    /// Time step of the scheme.
    pub h: f64,
    /// Number of collocation nodes for applying `f` in physical space.
    pub collocation_points: usize,
}

impl ProcessConfig {
    /// Defaults: `h = 1e-3`, `4 m` collocation nodes.
    pub fn new(disc: SpatialDiscretization, nonlinearity: NonlinearitySpec) -> Result<Self> {
        let collocation_points = 4 * disc.modes();
        let cfg = Self {
            disc,
            nonlinearity,
            h: 1e-3,
            collocation_points,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_step(mut self, h: f64) -> Result<Self> {
        self.h = h;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.nonlinearity.validate()?;
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "step size must be positive, got {}",
                self.h
            )));
        }
        let cfl = self.h * self.nonlinearity.lip;
        if cfl >= 1.0 {
            return Err(Error::UnstableScheme(cfl));
        }
        if self.collocation_points < self.disc.modes() {
            return Err(Error::InvalidParameter(format!(
                "need at least {} collocation nodes, got {}",
                self.disc.modes(),
                self.collocation_points
            )));
        }
        Ok(())
    }
}

/// Precomputed stepper for one [`ProcessConfig`]: per-mode decay factors and
/// the collocation basis table.
#[derive(Debug, Clone)]
pub struct Process {
    cfg: ProcessConfig,
    /// `e^(-lambda_k h)`.
    decay: Vec<f64>,
    /// `basis[j * m + k] = sqrt(2/L) sin((k+1) pi x_j / L)` at node `x_j`.
    basis: Vec<f64>,
    /// Quadrature weight `L / (P + 1)`.
    quad_w: f64,
}

/// Scratch buffers reused across steps of one trajectory.
struct Workspace {
    phys: Vec<f64>,
    fu: Vec<f64>,
    sig: Vec<f64>,
}

impl Process {
    pub fn new(cfg: &ProcessConfig) -> Result<Self> {
        cfg.validate()?;
        let m = cfg.disc.modes();
        let p = cfg.collocation_points;
        let length = cfg.disc.length();
        let decay = cfg
            .disc
            .eigenvalues()
            .iter()
            .map(|l| (-l * cfg.h).exp())
            .collect();
        let scale = (2.0 / length).sqrt();
        let mut basis = vec![0.0; p * m];
        for j in 0..p {
            let x = (j + 1) as f64 * length / (p + 1) as f64;
            for k in 0..m {
                basis[j * m + k] = scale * ((k + 1) as f64 * std::f64::consts::PI * x / length).sin();
            }
        }
        Ok(Self {
            cfg: cfg.clone(),
            decay,
            basis,
            quad_w: length / (p + 1) as f64,
        })
    }

    pub fn config(&self) -> &ProcessConfig {
        &self.cfg
    }

    fn workspace(&self) -> Workspace {
        Workspace {
            phys: vec![0.0; self.cfg.collocation_points],
            fu: vec![0.0; self.cfg.disc.modes()],
            sig: vec![0.0; self.cfg.disc.modes()],
        }
    }

    /// One scheme step of width `h_step` at time `t`, in place. `decay` must
    /// hold the matching per-mode factors `e^(-lambda_k h_step)`.
    fn step_mut(
        &self,
        u: &mut [f64],
        sigma: &SymbolPath,
        t: f64,
        h_step: f64,
        decay: &[f64],
        ws: &mut Workspace,
    ) -> Result<()> {
        let m = u.len();
        match &self.cfg.nonlinearity.kind {
            NonlinearityKind::Linear { rate } => {
                for (fk, uk) in ws.fu.iter_mut().zip(u.iter()) {
                    *fk = -rate * uk;
                }
            }
            _ => {
                let p = self.cfg.collocation_points;
                for j in 0..p {
                    let row = &self.basis[j * m..(j + 1) * m];
                    let mut acc = 0.0;
                    for (uk, bk) in u.iter().zip(row) {
                        acc += uk * bk;
                    }
                    ws.phys[j] = self.cfg.nonlinearity.eval(acc);
                }
                for (k, fk) in ws.fu.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for j in 0..p {
                        acc += ws.phys[j] * self.basis[j * m + k];
                    }
                    *fk = self.quad_w * acc;
                }
            }
        }
        sigma.eval_into(t, &mut ws.sig);
        for k in 0..m {
            u[k] = decay[k] * (u[k] + h_step * (ws.fu[k] + ws.sig[k]));
        }
        if u.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteState(t));
        }
        Ok(())
    }

    /// Single scheme step at time `t` with the configured width.
    pub fn step(&self, u: &StateVector, sigma: &SymbolPath, t: f64) -> Result<StateVector> {
        self.cfg.disc.check_modes(u)?;
        let mut ws = self.workspace();
        let mut out = u.coeffs.clone();
        self.step_mut(&mut out, sigma, t, self.cfg.h, &self.decay.clone(), &mut ws)?;
        Ok(StateVector::new(out))
    }

    /// Evolve from time `s` to `t >= s`: full steps on the grid `s + i h`,
    /// then one partial step for any remainder. `U(s, s)` is the identity,
    /// bit-exactly.
    pub fn evolve(&self, u: &StateVector, sigma: &SymbolPath, s: f64, t: f64) -> Result<StateVector> {
        self.cfg.disc.check_modes(u)?;
        if t < s {
            return Err(Error::TimeOrder { s, t });
        }
        let mut out = u.coeffs.clone();
        if t == s {
            return Ok(StateVector::new(out));
        }
        let h = self.cfg.h;
        let span = t - s;
        let n = (span / h + 1e-12).floor() as u64;
        let mut ws = self.workspace();
        for i in 0..n {
            let ti = s + i as f64 * h;
            self.step_mut(&mut out, sigma, ti, h, &self.decay, &mut ws)?;
        }
        let rem = span - n as f64 * h;
        if rem > 1e-9 * h {
            let partial: Vec<f64> = self
                .cfg
                .disc
                .eigenvalues()
                .iter()
                .map(|l| (-l * rem).exp())
                .collect();
            let tn = s + n as f64 * h;
            self.step_mut(&mut out, sigma, tn, rem, &partial, &mut ws)?;
        }
        Ok(StateVector::new(out))
    }

    /// Evolve a whole ensemble under one symbol; parallel across members,
    /// result order fixed by the input order.
    pub fn evolve_many(
        &self,
        states: &[StateVector],
        sigma: &SymbolPath,
        s: f64,
        t: f64,
    ) -> Result<Vec<StateVector>> {
        let results = exec::map_ordered(states, |u| self.evolve(u, sigma, s, t));
        results.into_iter().collect()
    }

    /// Skew-product step `S(t)(x, sigma) = (U_sigma(t, 0) x, shift(sigma, t))`.
    pub fn skew_evolve(
        &self,
        state: &(StateVector, SymbolPath),
        t: f64,
    ) -> Result<(StateVector, SymbolPath)> {
        if t < 0.0 {
            return Err(Error::TimeOrder { s: 0.0, t });
        }
        let x = self.evolve(&state.0, &state.1, 0.0, t)?;
        Ok((x, state.1.shift(t)))
    }

    /// Residual `|U_(shift(g, r))(t, s) u - U_g(t + r, s + r) u|_X` of the
    /// translation property. Zero to round-off when all grids align.
    pub fn verify_translation_property(
        &self,
        u: &StateVector,
        g: &SymbolPath,
        r: f64,
        s: f64,
        t: f64,
    ) -> Result<f64> {
        let h = self.cfg.h;
        let span = (t - s) / h;
        if (span - span.round()).abs() > 1e-9 * span.abs().max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "translation check needs t - s to be a step multiple, got {} steps",
                span
            )));
        }
        let left = self.evolve(u, &g.shift(r), s, t)?;
        let right = self.evolve(u, g, s + r, t + r)?;
        Ok(left.dist_x(&right))
    }
}

/// Measured smoothing constant `kappa(tau)`.
#[derive(Debug, Clone, Serialize)]
pub struct SmoothingEstimate {
    pub kappa: f64,
    pub tau: f64,
    pub pairs: usize,
}

/// Largest observed `|U(tau, 0)x - U(tau, 0)y|_Y / |x - y|_X` over basin
/// pairs and symbols; an empirical lower envelope of the true constant.
/// Coincident pairs are skipped.
pub fn estimate_smoothing_kappa(
    process: &Process,
    basin: &PointCloud,
    symbols: &[SymbolPath],
    tau: f64,
) -> Result<SmoothingEstimate> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "smoothing lag must be positive, got {tau}"
        )));
    }
    if basin.is_empty() {
        return Err(Error::EmptyInput("estimate_smoothing_kappa: basin"));
    }
    if symbols.is_empty() {
        return Err(Error::EmptyInput("estimate_smoothing_kappa: symbols"));
    }
    let disc = &process.config().disc;
    let mut kappa: f64 = 0.0;
    let mut pairs = 0usize;
    for sigma in symbols {
        let images = process.evolve_many(&basin.elements, sigma, 0.0, tau)?;
        for i in 0..basin.elements.len() {
            for j in i + 1..basin.elements.len() {
                let dx = basin.elements[i].dist_x(&basin.elements[j]);
                if dx == 0.0 {
                    continue;
                }
                let dy = disc.norm_y(&images[i].sub(&images[j]))?;
                kappa = kappa.max(dy / dx);
                pairs += 1;
            }
        }
    }
    if pairs == 0 {
        return Err(Error::DegenerateSample(
            "estimate_smoothing_kappa: all basin points coincide",
        ));
    }
    Ok(SmoothingEstimate { kappa, tau, pairs })
}

/// Measured Hoelder data of `(t, x) -> U(t + s, s) x`.
#[derive(Debug, Clone, Serialize)]
pub struct HoelderEstimate {
    /// Time exponent, the log-log slope of the displacement response,
    /// clamped to (0, 1].
    pub theta: f64,
    /// State exponent; 1 for the globally Lipschitz dynamics here.
    pub gamma: f64,
    /// Envelope constant making the bound hold on every sampled tuple.
    pub c_r: f64,
    pub tuples: usize,
}

/// Fit `|U(t, 0)x - U(t~, 0)y| <= C(r) (|x - y|^gamma + |t - t~|^theta)` on
/// sampled tuples: `gamma = 1`, `theta` from the pure time-displacement
/// response at `x = y`, then `C(r)` enlarged to envelope every tuple.
pub fn estimate_time_hoelder(
    process: &Process,
    basin: &PointCloud,
    symbols: &[SymbolPath],
    r: f64,
) -> Result<HoelderEstimate> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius(r));
    }
    if basin.is_empty() || symbols.is_empty() {
        return Err(Error::EmptyInput("estimate_time_hoelder: basin or symbols"));
    }
    let h = process.config().h;
    let t_base = 256.0 * h;
    let deltas: Vec<f64> = (0..8).map(|k| h * 2f64.powi(k)).collect();

    // states at the base time and at each displaced time, per (x, sigma)
    let mut base_states: Vec<StateVector> = Vec::new();
    let mut moved_states: Vec<Vec<StateVector>> = Vec::new(); // [sample][delta]
    for sigma in symbols {
        let bases = process.evolve_many(&basin.elements, sigma, 0.0, t_base)?;
        for b in bases {
            let moved = deltas
                .iter()
                .map(|&d| process.evolve(&b, sigma, t_base, t_base + d))
                .collect::<Result<Vec<_>>>()?;
            base_states.push(b);
            moved_states.push(moved);
        }
    }

    // theta: log-log slope of the displacement response, maximized over
    // samples at each delta
    let response: Vec<f64> = (0..deltas.len())
        .map(|di| {
            base_states
                .iter()
                .zip(&moved_states)
                .map(|(b, moved)| moved[di].sub(b).norm_x())
                .fold(0.0f64, f64::max)
        })
        .collect();
    if response.iter().any(|&d| d <= 0.0) {
        return Err(Error::DegenerateSample(
            "estimate_time_hoelder: flat time response (all-zero trajectory?)",
        ));
    }
    let xs: Vec<f64> = deltas.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = response.iter().map(|d| d.ln()).collect();
    let theta = fit::linear_fit(&xs, &ys).slope.min(1.0);
    if theta <= 0.0 {
        return Err(Error::DegenerateSample(
            "estimate_time_hoelder: non-increasing displacement response",
        ));
    }

    // envelope C(r) over mixed tuples (x, y, t, t~) at the cached times
    let mut c_r: f64 = 0.0;
    let mut tuples = 0usize;
    let probe_deltas = [0usize, deltas.len() - 1];
    let state_at = |i: usize, which: Option<usize>| -> &StateVector {
        match which {
            None => &base_states[i],
            Some(d) => &moved_states[i][d],
        }
    };
    let time_of = |which: Option<usize>| -> f64 {
        match which {
            None => 0.0,
            Some(d) => deltas[d],
        }
    };
    let sources: Vec<&StateVector> = {
        let per_symbol = basin.elements.len();
        (0..base_states.len())
            .map(|i| &basin.elements[i % per_symbol])
            .collect()
    };
    for i in 0..base_states.len() {
        for j in i..base_states.len() {
            for wi in [None, Some(probe_deltas[0]), Some(probe_deltas[1])] {
                for wj in [None, Some(probe_deltas[0]), Some(probe_deltas[1])] {
                    let dx = sources[i].dist_x(sources[j]);
                    let dt = (time_of(wi) - time_of(wj)).abs();
                    let denom = dx + dt.powf(theta);
                    if denom == 0.0 {
                        continue;
                    }
                    let lhs = state_at(i, wi).dist_x(state_at(j, wj));
                    c_r = c_r.max(lhs / denom);
                    tuples += 1;
                }
            }
        }
    }
    if tuples < 10 {
        return Err(Error::TooFewSamples {
            got: tuples,
            need: 10,
        });
    }
    Ok(HoelderEstimate {
        theta,
        gamma: 1.0,
        c_r,
        tuples,
    })
}

/// Measured symbol-Lipschitz envelope `L(t) <= c1 e^(beta t)`.
#[derive(Debug, Clone, Serialize)]
pub struct SymbolLipschitzEstimate {
    pub c1: f64,
    pub beta: f64,
    pub pairs: usize,
}

/// Envelope fit of `|U_sigma1(t, 0)x - U_sigma2(t, 0)x| <= c1 e^(beta t)
/// d(sigma1, sigma2)` over basin points and symbol pairs, for grid times
/// `t >= 1`. `L(1) >= 1` is enforced on the result.
pub fn estimate_symbol_lipschitz(
    process: &Process,
    basin: &PointCloud,
    symbol_pairs: &[(SymbolPath, SymbolPath)],
    t_grid: &[f64],
    frechet: &FrechetConfig,
) -> Result<SymbolLipschitzEstimate> {
    if basin.is_empty() {
        return Err(Error::EmptyInput("estimate_symbol_lipschitz: basin"));
    }
    let times: Vec<f64> = t_grid.iter().copied().filter(|&t| t >= 1.0).collect();
    if times.len() < 2 {
        return Err(Error::TooFewSamples {
            got: times.len(),
            need: 2,
        });
    }
    let mut ratio_at: Vec<f64> = vec![0.0; times.len()];
    let mut pairs = 0usize;
    for (sa, sb) in symbol_pairs {
        let d = frechet_dist(sa, sb, frechet)?;
        if d == 0.0 {
            continue;
        }
        pairs += 1;
        for x in &basin.elements {
            // walk the grid incrementally along both trajectories
            let mut ua = x.clone();
            let mut ub = x.clone();
            let mut t_prev = 0.0;
            for (ti, &t) in times.iter().enumerate() {
                ua = process.evolve(&ua, sa, t_prev, t)?;
                ub = process.evolve(&ub, sb, t_prev, t)?;
                t_prev = t;
                ratio_at[ti] = ratio_at[ti].max(ua.dist_x(&ub) / d);
            }
        }
    }
    if pairs == 0 {
        return Err(Error::DegenerateSample(
            "estimate_symbol_lipschitz: all symbol pairs coincide",
        ));
    }
    if ratio_at.iter().any(|&v| v <= 0.0) {
        // distinct symbols that the state never distinguishes; bound with
        // the trivial envelope
        return Ok(SymbolLipschitzEstimate {
            c1: 1.0,
            beta: 0.0,
            pairs,
        });
    }
    let ys: Vec<f64> = ratio_at.iter().map(|v| v.ln()).collect();
    let beta = fit::linear_fit(&times, &ys).slope.max(0.0);
    let mut c1 = times
        .iter()
        .zip(&ratio_at)
        .map(|(&t, &v)| v * (-beta * t).exp())
        .fold(0.0f64, f64::max);
    // enforce L(1) = c1 e^beta >= 1
    c1 = c1.max((-beta).exp());
    Ok(SymbolLipschitzEstimate { c1, beta, pairs })
}

/// Every empirical constant of the hypothesis set, as consumed by the
/// dimension bounds.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisEstimates {
    pub kappa_tau: f64,
    pub tau: f64,
    pub theta_hoelder: f64,
    pub gamma_hoelder: f64,
    pub c_r: f64,
    pub c1: f64,
    pub beta: f64,
    pub p_driving: f64,
    pub zeta: f64,
    pub tau_absorb: f64,
    pub r_absorb: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub q1: f64,
    pub q2: f64,
}

impl HypothesisEstimates {
    pub fn validate(&self) -> Result<()> {
        let positives = [
            ("kappa_tau", self.kappa_tau),
            ("tau", self.tau),
            ("theta_hoelder", self.theta_hoelder),
            ("gamma_hoelder", self.gamma_hoelder),
            ("c_r", self.c_r),
            ("c1", self.c1),
            ("p_driving", self.p_driving),
            ("zeta", self.zeta),
            ("tau_absorb", self.tau_absorb),
            ("r_absorb", self.r_absorb),
            ("eta1", self.eta1),
            ("eta2", self.eta2),
            ("q1", self.q1),
            ("q2", self.q2),
        ];
        for (name, v) in positives {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "hypothesis constant {name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.beta < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "beta must be >= 0, got {}",
                self.beta
            )));
        }
        if self.gamma_hoelder > 1.0 || self.theta_hoelder > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "exponents must lie in (0, 1], got gamma {} theta {}",
                self.gamma_hoelder, self.theta_hoelder
            )));
        }
        Ok(())
    }
}
