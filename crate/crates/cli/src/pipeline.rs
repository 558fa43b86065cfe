//! The experiment runner: executes configured stages in dependency order and
//! writes every artifact with reproducible bytes.
//!
//! Wall-clock numbers go to `timings.log` only; everything under the output
//! directory except that file is a pure function of config + seed.

use crate::config::{ExperimentConfig, ForcingSpec, Stage};
use crate::{CliError, Result};
use pullback::attractor::{
    compute_attractor_family, compute_pullback_attractor, compute_uniform_attractor,
    find_absorbing, fit_semicontinuity_rate, AbsorbingOptions, AbsorbingReport, AttractorFamily,
    PullbackOptions, RateModel, SemicontinuityFit,
};
use pullback::dimension::{
    bound_exp_attractor_dim, bound_uniform_attractor_dim, bound_union_pullback,
    build_discrete_exp_attractor, check_exponential_attraction, estimate_box_dim,
    estimate_box_dim_metric, extend_continuous_attractor, sweep_union_dimension, AttractionReport,
    DecayModel, DimensionReport, ExpAttractorBuild, ExpAttractorParams, LevelRecord, UnionSweep,
    UnionSweepInputs,
};
use pullback::dynamics::{
    estimate_smoothing_kappa, estimate_time_hoelder, estimate_symbol_lipschitz, HoelderEstimate,
    HypothesisEstimates, Process, ProcessConfig,
};
use pullback::io;
use pullback::space::{hausdorff_semidist, low_discrepancy_ball, unit_ball_y_cover_count};
use pullback::symbol::{
    build_hull, estimate_driving_lipschitz, estimate_limit_sets, frechet_dist,
    frechet_dist_sampled, fit_exponential_closeness, make_cantor_forcing, y_ball_corner_sampler,
    DrivingLipschitz, LimitDirection,
};
use pullback::{
    Error, FrechetConfig, HullApproximation, PointCloud, SpatialDiscretization, StateVector,
    SymbolPath,
};
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, Clone, Serialize)]
pub struct StageStatus {
    pub name: String,
    pub status: String,
}

/// One verified inequality: `value` against `threshold`.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HullDepthDim {
    pub depth: usize,
    pub members: usize,
    pub report: DimensionReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct HullStats {
    pub members: usize,
    pub driving_p: f64,
    pub zeta: f64,
    pub observed_p: f64,
    pub pairs: usize,
    pub dims: Vec<HullDepthDim>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NamedDimension {
    pub target: String,
    pub report: DimensionReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub theta: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub tau: f64,
    pub n_cover: u64,
    pub n_nu: u64,
    pub d_sigma_minus: f64,
    pub d_sigma_plus: f64,
    pub d_minus: f64,
    pub d_plus: f64,
    pub beta: f64,
    pub zeta: f64,
    pub nu: f64,
    pub union_polynomial: f64,
    pub union_exponential: f64,
    pub uniform: f64,
    pub exp_attractor: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayRow {
    pub t: f64,
    pub dist: f64,
    pub envelope: f64,
}

/// Everything a run measured, checked, and concluded.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub scenario: String,
    pub seed: u64,
    pub stages: Vec<StageStatus>,
    pub absorbing: Option<AbsorbingReport>,
    pub hull: Option<HullStats>,
    pub constants: Option<HypothesisEstimates>,
    pub semicontinuity: Option<SemicontinuityFit>,
    pub decay_rows: Vec<DecayRow>,
    pub levels: Option<Vec<LevelRecord>>,
    pub attraction: Option<AttractionReport>,
    pub dimensions: Vec<NamedDimension>,
    pub union_sweep: Option<UnionSweep>,
    pub bounds: Option<BoundsReport>,
    pub checks: Vec<CheckResult>,
    pub all_pass: bool,
}

impl RunReport {
    fn new(cfg: &ExperimentConfig) -> Self {
        Self {
            schema: 1,
            scenario: cfg.scenario.clone(),
            seed: cfg.seed,
            stages: Vec::new(),
            absorbing: None,
            hull: None,
            constants: None,
            semicontinuity: None,
            decay_rows: Vec::new(),
            levels: None,
            attraction: None,
            dimensions: Vec::new(),
            union_sweep: None,
            bounds: None,
            checks: Vec::new(),
            all_pass: true,
        }
    }

    pub fn dimension_of(&self, target: &str) -> Option<&DimensionReport> {
        self.dimensions
            .iter()
            .find(|d| d.target == target)
            .map(|d| &d.report)
    }
}

/// Hypothesis constants of the limit system, shared by the dimension and
/// bounds stages.
struct LimitConstants {
    hoelder: HoelderEstimate,
    kappa: f64,
    tau: f64,
    n_cover: u64,
    n_nu: u64,
}

struct Pipeline<'a> {
    cfg: &'a ExperimentConfig,
    process: Process,
    forcing: SymbolPath,
    frechet: FrechetConfig,
    out: PathBuf,
    coarse: Option<HullApproximation>,
    absorbing: Option<AbsorbingReport>,
    basin: Option<PointCloud>,
    driving: Option<DrivingLipschitz>,
    family: Option<AttractorFamily>,
    limits: Option<(PointCloud, PointCloud)>,
    uniform: Option<PointCloud>,
    build: Option<ExpAttractorBuild>,
    limit_constants: Option<LimitConstants>,
}

fn check(checks: &mut Vec<CheckResult>, name: &str, value: f64, threshold: f64) {
    checks.push(CheckResult {
        name: name.to_string(),
        pass: value <= threshold,
        value,
        threshold,
    });
}

impl<'a> Pipeline<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Self> {
        let disc = SpatialDiscretization::with(cfg.length, cfg.modes, cfg.delta)?;
        let pcfg = ProcessConfig::new(disc, cfg.nonlinearity.clone())?.with_step(cfg.h)?;
        let process = Process::new(&pcfg)?;
        let forcing = cfg.forcing.build(&process.config().disc)?;
        Ok(Self {
            cfg,
            process,
            forcing,
            frechet: FrechetConfig::default(),
            out: cfg.out.clone(),
            coarse: None,
            absorbing: None,
            basin: None,
            driving: None,
            family: None,
            limits: None,
            uniform: None,
            build: None,
            limit_constants: None,
        })
    }

    fn disc(&self) -> &SpatialDiscretization {
        &self.process.config().disc
    }

    fn coarse_hull(&mut self) -> Result<&HullApproximation> {
        if self.coarse.is_none() {
            self.coarse = Some(build_hull(
                &self.forcing,
                self.cfg.hull_extent,
                self.cfg.hull_step,
                self.frechet,
            )?);
        }
        Ok(self.coarse.as_ref().expect("just set"))
    }

    fn absorbing(&self) -> Result<&AbsorbingReport> {
        self.absorbing
            .as_ref()
            .ok_or_else(|| CliError::config("stage needs the absorb stage first".into()))
    }

    /// Constant extrapolation limits of the forcing, as symbol paths.
    fn limit_symbols(&self) -> (SymbolPath, SymbolPath) {
        let (lo, hi) = self.forcing.span();
        (
            SymbolPath::constant(self.forcing.eval(lo - 1.0)),
            SymbolPath::constant(self.forcing.eval(hi + 1.0)),
        )
    }

    /// Pullback limits `M_-` and `M_+` under the limit symbols.
    fn limit_clouds(&mut self) -> Result<&(PointCloud, PointCloud)> {
        if self.limits.is_none() {
            let absorbing = self.absorbing()?.clone();
            let (g_minus, g_plus) = self.limit_symbols();
            let opts = PullbackOptions {
                ensemble: self.cfg.pullback_ensemble,
                seed: self.cfg.seed.wrapping_add(3),
                tol: self.cfg.tol,
                max_lookback: self.cfg.max_lookback,
            };
            let m_minus =
                compute_pullback_attractor(&self.process, &g_minus, 0.0, &absorbing, &opts)?;
            let m_plus =
                compute_pullback_attractor(&self.process, &g_plus, 0.0, &absorbing, &opts)?;
            self.limits = Some((
                PointCloud::new("limit-minus", m_minus.cloud.elements),
                PointCloud::new("limit-plus", m_plus.cloud.elements),
            ));
        }
        Ok(self.limits.as_ref().expect("just set"))
    }

    /// Hypothesis constants measured on the limit system: unit-ball ensemble
    /// under the constant limit symbols, so the numbers do not depend on the
    /// transient part of the forcing.
    fn limit_constants(&mut self) -> Result<&LimitConstants> {
        if self.limit_constants.is_none() {
            let (g_minus, g_plus) = self.limit_symbols();
            let symbols = vec![g_minus, g_plus];
            let mut elements = vec![StateVector::zero(self.disc().modes())];
            elements.extend(
                low_discrepancy_ball(16, self.disc().modes(), 1.0, self.cfg.seed ^ 0xc0ffee)
                    .elements,
            );
            let basin = PointCloud::new("limit-basin", elements);
            let tau = if self.cfg.bounds_tau > 0.0 {
                self.cfg.bounds_tau
            } else {
                self.absorbing()?.tau_absorb
            };
            let kappa = estimate_smoothing_kappa(&self.process, &basin, &symbols, tau)?.kappa;
            let hoelder = estimate_time_hoelder(&self.process, &basin, &symbols, 1.0)?;
            let n_cover = unit_ball_y_cover_count(self.disc(), 1.0 / (4.0 * kappa))?;
            let n_nu = unit_ball_y_cover_count(self.disc(), self.cfg.nu / (2.0 * kappa))?;
            self.limit_constants = Some(LimitConstants {
                hoelder,
                kappa,
                tau,
                n_cover,
                n_nu,
            });
        }
        Ok(self.limit_constants.as_ref().expect("just set"))
    }

    fn driving(&mut self) -> Result<DrivingLipschitz> {
        if self.driving.is_none() {
            self.coarse_hull()?;
            let hull = self.coarse.as_ref().expect("coarse hull built");
            self.driving = Some(match estimate_driving_lipschitz(&self.frechet, &hull.paths) {
                Ok(d) => d,
                // a hull of identical translates has nothing to measure;
                // the analytic envelope stands
                Err(Error::DegenerateSample(_)) | Err(Error::TooFewSamples { .. }) => {
                    DrivingLipschitz {
                        p: 2.0,
                        zeta: std::f64::consts::LN_2,
                        observed_p: 0.0,
                        pairs: 0,
                    }
                }
                Err(e) => return Err(e.into()),
            });
        }
        Ok(self.driving.clone().expect("just set"))
    }

    /// Box dimensions of the alpha and omega limit hulls.
    ///
    /// The Frechet weights decay like `2^-|shift|`, so the limit-set
    /// estimator needs a lattice wide enough that the outer quarter has
    /// genuinely stabilized; a dedicated sparse hull provides that.
    fn limit_hull_dims(&self) -> Result<(f64, f64)> {
        let (lo, hi) = self.forcing.span();
        let extent = lo.abs().max(hi.abs()).ceil() + 26.0;
        let wide = build_hull(&self.forcing, extent, 1.0, self.frechet)?;
        let mut dims = [0.0f64; 2];
        for (slot, dir) in [LimitDirection::Alpha, LimitDirection::Omega]
            .into_iter()
            .enumerate()
        {
            let reps = estimate_limit_sets(&wide, dir, self.cfg.tol)?;
            dims[slot] = if reps.len() <= 1 {
                0.0
            } else {
                let sampled = reps.sampled();
                let cfg = self.frechet;
                estimate_box_dim_metric(&sampled, &self.cfg.hull_radii, |a, b| {
                    frechet_dist_sampled(a, b, &cfg).expect("hull members share modes")
                })?
                .slope
            };
        }
        Ok((dims[0], dims[1]))
    }

    fn stage_absorb(&mut self, report: &mut RunReport) -> Result<()> {
        self.coarse_hull()?;
        let hull = self.coarse.as_ref().expect("coarse hull built");
        let opts = AbsorbingOptions {
            ensemble: self.cfg.absorb_ensemble,
            seed: self.cfg.seed,
            ..Default::default()
        };
        let absorbing = find_absorbing(&self.process, hull, &self.cfg.absorb_radii, &opts)?;
        io::write_json(self.out.join("absorbing.json"), &absorbing)?;
        let mut elements = vec![StateVector::zero(self.disc().modes())];
        elements.extend(
            low_discrepancy_ball(
                self.cfg.absorb_ensemble.max(8),
                self.disc().modes(),
                absorbing.r_absorb,
                self.cfg.seed.wrapping_add(1),
            )
            .elements,
        );
        self.basin = Some(PointCloud::new("basin", elements));
        self.absorbing = Some(absorbing.clone());
        report.absorbing = Some(absorbing);
        Ok(())
    }

    fn stage_hull(&mut self, report: &mut RunReport) -> Result<()> {
        let driving = self.driving()?;
        let members = self.coarse.as_ref().map(|h| h.len()).unwrap_or(0);
        let mut dims = Vec::new();
        match (&self.cfg.forcing, self.cfg.hull_depths.is_empty()) {
            (ForcingSpec::Cantor { .. }, false) => {
                for &depth in &self.cfg.hull_depths {
                    let sampler =
                        y_ball_corner_sampler(self.disc().eigenvalues(), depth, self.disc().modes());
                    let g = make_cantor_forcing(&sampler, depth, self.disc().modes())?;
                    dims.push(self.hull_dim_at(depth, &g)?);
                }
            }
            _ => {
                let g = self.forcing.clone();
                dims.push(self.hull_dim_at(0, &g)?);
            }
        }
        let stats = HullStats {
            members,
            driving_p: driving.p,
            zeta: driving.zeta,
            observed_p: driving.observed_p,
            pairs: driving.pairs,
            dims,
        };
        io::write_json(self.out.join("hull.json"), &stats)?;
        report.hull = Some(stats);
        Ok(())
    }

    /// Fine-lattice hull of `g` and its box dimension in the Frechet metric.
    fn hull_dim_at(&self, depth: usize, g: &SymbolPath) -> Result<HullDepthDim> {
        let step = if self.cfg.hull_dim_step > 0.0 {
            self.cfg.hull_dim_step
        } else {
            3f64.powi(-(depth.max(1) as i32))
        };
        let fine = build_hull(g, self.cfg.hull_dim_extent, step, self.frechet)?;
        let sampled = fine.sampled();
        let cfg = self.frechet;
        let report = estimate_box_dim_metric(&sampled, &self.cfg.hull_radii, |a, b| {
            frechet_dist_sampled(a, b, &cfg).expect("hull members share modes")
        })?;
        Ok(HullDepthDim {
            depth,
            members: fine.len(),
            report,
        })
    }

    fn stage_pullback(&mut self, report: &mut RunReport) -> Result<()> {
        let absorbing = self.absorbing()?.clone();
        let opts = PullbackOptions {
            ensemble: self.cfg.pullback_ensemble,
            seed: self.cfg.seed.wrapping_add(2),
            tol: self.cfg.tol,
            max_lookback: self.cfg.max_lookback,
        };
        let family = compute_attractor_family(
            &self.process,
            &self.forcing,
            &self.cfg.family_times,
            &absorbing,
            &opts,
        )?;
        io::write_family(self.out.join("family"), &family)?;
        let (m_minus, m_plus) = self.limit_clouds()?.clone();
        match fit_semicontinuity_rate(&family, &m_plus, &m_minus) {
            Ok(fit) => {
                for (&t, cloud) in family.times.iter().zip(&family.snapshots) {
                    let side = if t >= 0.0 { &fit.plus } else { &fit.minus };
                    let limit = if t >= 0.0 { &m_plus } else { &m_minus };
                    let dist = hausdorff_semidist(cloud, limit)?;
                    let envelope = match side.model {
                        RateModel::Exponential => side.c_bar * (-side.xi * t.abs()).exp(),
                        RateModel::Polynomial => side.k_poly * t.abs().powf(-side.r_poly),
                    };
                    report.decay_rows.push(DecayRow { t, dist, envelope });
                }
                io::write_json(self.out.join("semicontinuity.json"), &fit)?;
                check(&mut report.checks, "semicontinuity-monotone", 0.0, 0.0);
                report.semicontinuity = Some(fit);
            }
            Err(Error::SemicontinuityViolated { at }) => {
                check(&mut report.checks, "semicontinuity-monotone", at, 0.0);
            }
            Err(e) => return Err(e.into()),
        }
        self.family = Some(family);
        Ok(())
    }

    fn stage_uniform(&mut self, report: &mut RunReport) -> Result<()> {
        let absorbing = self.absorbing()?.clone();
        self.coarse_hull()?;
        let hull = self.coarse.as_ref().expect("coarse hull built");
        let opts = PullbackOptions {
            ensemble: self.cfg.pullback_ensemble,
            seed: self.cfg.seed.wrapping_add(4),
            tol: self.cfg.tol,
            max_lookback: self.cfg.max_lookback,
        };
        let cloud = compute_uniform_attractor(&self.process, hull, &absorbing, &opts)?;
        io::write_cloud_csv(self.out.join("uniform.csv"), &cloud)?;
        let _ = report;
        self.uniform = Some(cloud);
        Ok(())
    }

    fn stage_expattractor(&mut self, report: &mut RunReport) -> Result<()> {
        let absorbing = self.absorbing()?.clone();
        let driving = self.driving()?;
        self.coarse_hull()?;
        let hull = self.coarse.as_ref().expect("coarse hull built").clone();
        let basin = self
            .basin
            .clone()
            .ok_or_else(|| CliError::config("expattractor needs the absorb stage first".into()))?;
        let kappa = estimate_smoothing_kappa(
            &self.process,
            &basin,
            &hull.paths,
            absorbing.tau_absorb,
        )?
        .kappa;
        // symbol-Lipschitz envelope over a few spread hull pairs
        let (c1, beta) = {
            let n = hull.paths.len();
            let mut pairs = Vec::new();
            if n >= 2 {
                pairs.push((hull.paths[0].clone(), hull.paths[n / 2].clone()));
                pairs.push((hull.paths[0].clone(), hull.paths[n - 1].clone()));
                if n >= 4 {
                    pairs.push((hull.paths[n / 4].clone(), hull.paths[3 * n / 4].clone()));
                }
            }
            match estimate_symbol_lipschitz(
                &self.process,
                &basin,
                &pairs,
                &[1.0, 2.0, 3.0, 4.0],
                &self.frechet,
            ) {
                Ok(est) => (est.c1, est.beta),
                // identical translates carry no symbol sensitivity to measure
                Err(Error::TooFewSamples { .. })
                | Err(Error::EmptyInput(_))
                | Err(Error::DegenerateSample(_)) => (1.0, 0.0),
                Err(e) => return Err(e.into()),
            }
        };
        let params = ExpAttractorParams {
            nu: self.cfg.nu,
            r: absorbing.r_absorb,
            tau: absorbing.tau_absorb,
            n_max: self.cfg.n_max,
            kappa,
            p_driving: driving.p,
            zeta: driving.zeta,
            c1,
            beta,
        };
        let build = build_discrete_exp_attractor(&self.process, &basin, &hull, &params)?;
        io::write_exp_build(self.out.join("expattractor"), &build)?;
        let probe_symbols: Vec<SymbolPath> = hull.paths.iter().take(3).cloned().collect();
        let attraction =
            check_exponential_attraction(&self.process, &build, &basin, &probe_symbols)?;
        io::write_json(self.out.join("attraction.json"), &attraction)?;
        let worst = attraction
            .levels
            .iter()
            .map(|l| l.measured / l.envelope)
            .fold(0.0f64, f64::max);
        check(&mut report.checks, "exponential-attraction", worst, 1.0 + 1e-9);
        let continuous = extend_continuous_attractor(&self.process, &build, params.tau / 4.0)?;
        io::write_cloud_csv(self.out.join("continuous.csv"), &continuous)?;
        report.levels = Some(build.levels.clone());
        report.attraction = Some(attraction);
        self.build = Some(build);
        Ok(())
    }

    fn stage_dimension(&mut self, report: &mut RunReport) -> Result<()> {
        let uniform = self
            .uniform
            .clone()
            .ok_or_else(|| CliError::config("dimension needs the uniform stage first".into()))?;
        let mut named = Vec::new();
        named.push(NamedDimension {
            target: "uniform-attractor".into(),
            report: estimate_box_dim(&uniform, &self.cfg.dim_radii)?,
        });
        if let Some(build) = &self.build {
            named.push(NamedDimension {
                target: "discrete-exp-attractor".into(),
                report: estimate_box_dim(&build.state_cloud(), &self.cfg.dim_radii)?,
            });
            let continuous = extend_continuous_attractor(&self.process, build, build.params.tau / 4.0)?;
            named.push(NamedDimension {
                target: "continuous-exp-attractor".into(),
                report: estimate_box_dim(&continuous, &self.cfg.dim_radii)?,
            });
        }
        for nd in &named {
            io::write_json(
                self.out.join(format!("dim_{}.json", nd.target)),
                &nd.report,
            )?;
        }
        report.dimensions.extend(named);
        if self.family.is_some() {
            let constants = {
                let c = self.limit_constants()?;
                (c.hoelder.theta, c.hoelder.gamma, c.n_cover as f64)
            };
            let absorbing = self.absorbing()?.clone();
            let (m_minus, m_plus) = self.limit_clouds()?.clone();
            let family = self.family.as_ref().expect("family computed");
            let inputs = UnionSweepInputs {
                radii: self.cfg.dim_radii.clone(),
                theta: constants.0,
                gamma: constants.1,
                n_cover: constants.2,
                r: absorbing.r_absorb,
                nu: self.cfg.nu,
                margin: self.cfg.box_margin,
            };
            match sweep_union_dimension(family, &m_plus, &m_minus, &inputs) {
                Ok(sweep) => {
                    io::write_json(self.out.join("union_sweep.json"), &sweep)?;
                    check(
                        &mut report.checks,
                        "union-dim-within-bound",
                        sweep.report.slope,
                        sweep.bound + inputs.margin,
                    );
                    let counts_ok = if sweep.per_snapshot_pass { 0.0 } else { 1.0 };
                    check(&mut report.checks, "per-snapshot-counts", counts_ok, 0.0);
                    report.union_sweep = Some(sweep);
                }
                Err(Error::SemicontinuityViolated { at }) => {
                    check(&mut report.checks, "union-sweep-a1", at, 0.0);
                }
                Err(e) => return Err(e.into()),
            }
        }
        Ok(())
    }

    fn stage_bounds(&mut self, report: &mut RunReport) -> Result<()> {
        let absorbing = self.absorbing()?.clone();
        let driving = self.driving()?;
        let (g_minus, g_plus) = self.limit_symbols();
        let (m_minus, m_plus) = self.limit_clouds()?.clone();
        let c = self.limit_constants()?;
        let (theta, gamma, c_r) = (c.hoelder.theta, c.hoelder.gamma, c.hoelder.c_r);
        let (kappa, tau, n_cover, n_nu) = (c.kappa, c.tau, c.n_cover, c.n_nu);
        let (d_sigma_minus, d_sigma_plus) = self.limit_hull_dims()?;
        // constant limit symbols leave nothing for the shift to move
        let beta = 0.0;
        let d_minus = estimate_box_dim(&m_minus, &self.cfg.dim_radii)?.slope;
        let d_plus = estimate_box_dim(&m_plus, &self.cfg.dim_radii)?.slope;
        let (r_decay, xi_decay) = match &report.semicontinuity {
            Some(fit) => (
                fit.plus.r_poly.max(fit.minus.r_poly).max(1e-2),
                fit.plus.xi.min(fit.minus.xi).max(1e-2),
            ),
            None => (1.0, 1.0),
        };
        let union_polynomial = bound_union_pullback(
            d_plus,
            d_minus,
            &DecayModel::Polynomial { r: r_decay },
            theta,
            gamma,
            n_cover as f64,
        )?;
        let union_exponential = bound_union_pullback(
            d_plus,
            d_minus,
            &DecayModel::Exponential { xi: xi_decay },
            theta,
            gamma,
            n_cover as f64,
        )?;
        let uniform = bound_uniform_attractor_dim(
            theta,
            gamma,
            n_cover as f64,
            beta,
            driving.zeta,
            tau,
            d_sigma_minus,
            d_sigma_plus,
        )?;
        let exp_attractor = bound_exp_attractor_dim(
            self.cfg.nu,
            theta,
            gamma,
            n_nu as f64,
            d_sigma_minus.max(d_sigma_plus),
            beta,
            driving.zeta,
            tau,
        )?;
        let bounds = BoundsReport {
            theta,
            gamma,
            kappa,
            tau,
            n_cover,
            n_nu,
            d_sigma_minus,
            d_sigma_plus,
            d_minus,
            d_plus,
            beta,
            zeta: driving.zeta,
            nu: self.cfg.nu,
            union_polynomial,
            union_exponential,
            uniform,
            exp_attractor,
        };
        io::write_json(self.out.join("bounds.json"), &bounds)?;
        let closeness = fit_exponential_closeness(&self.forcing, &g_minus, &g_plus, 0.25)?;
        let constants = HypothesisEstimates {
            kappa_tau: kappa,
            tau,
            theta_hoelder: theta,
            gamma_hoelder: gamma,
            c_r,
            c1: 1.0,
            beta,
            p_driving: driving.p,
            zeta: driving.zeta,
            tau_absorb: absorbing.tau_absorb,
            r_absorb: absorbing.r_absorb,
            eta1: closeness.eta_minus,
            eta2: closeness.eta_plus,
            q1: closeness.q_minus,
            q2: closeness.q_plus,
        };
        constants.validate()?;
        report.constants = Some(constants);
        report.bounds = Some(bounds);
        Ok(())
    }

    fn stage_verify(&mut self, report: &mut RunReport) -> Result<()> {
        let modes = self.disc().modes();
        // metric spot checks
        let zero = SymbolPath::zero(modes);
        let d_self = frechet_dist(&zero, &zero, &self.frechet)?;
        check(&mut report.checks, "metric-identity", d_self, 0.0);
        let unit = SymbolPath::constant(StateVector::unit(modes, 1));
        let d_unit = frechet_dist(&zero, &unit, &self.frechet)?;
        check(
            &mut report.checks,
            "metric-unit-gap",
            (d_unit - 1.0).abs(),
            1e-9,
        );
        // process axioms on step-aligned grids
        let h = self.process.config().h;
        let u = StateVector::unit(modes, 1).scale(0.3);
        let same = self.process.evolve(&u, &self.forcing, 0.25, 0.25)?;
        check(
            &mut report.checks,
            "process-identity",
            same.dist_x(&u),
            0.0,
        );
        let (r, t) = (256.0 * h, 512.0 * h);
        let direct = self.process.evolve(&u, &self.forcing, 0.0, t)?;
        let mid = self.process.evolve(&u, &self.forcing, 0.0, r)?;
        let chained = self.process.evolve(&mid, &self.forcing, r, t)?;
        check(
            &mut report.checks,
            "process-cocycle",
            direct.dist_x(&chained),
            1e-12,
        );
        let resid = self
            .process
            .verify_translation_property(&u, &self.forcing, 0.25, 0.0, 256.0 * h)?;
        check(&mut report.checks, "process-translation", resid, 1e-12);
        // exact eigen-decay whenever the reaction and forcing vanish
        let forcing_is_zero = {
            let (lo, hi) = self.forcing.span();
            [lo - 1.0, 0.5 * (lo + hi), hi + 1.0]
                .iter()
                .all(|&t| self.forcing.eval(t).norm_x() == 0.0)
        };
        if self.cfg.nonlinearity.lip == 0.0 && forcing_is_zero {
            let u0 = StateVector::unit(modes, 1);
            let u1 = self.process.evolve(&u0, &self.forcing, 0.0, 1.0)?;
            let lambda_1 = self.disc().lambda_1();
            let rel = (u1.norm_x() - (-lambda_1).exp()).abs() / (-lambda_1).exp();
            check(&mut report.checks, "linear-decay", rel, 0.01);
        }
        // showcase: deeper Cantor forcing must show strictly larger hull dims
        if let Some(hull) = &report.hull {
            if hull.dims.len() >= 2 {
                let mut min_gap = f64::INFINITY;
                for w in hull.dims.windows(2) {
                    min_gap = min_gap.min(w[1].report.slope - w[0].report.slope);
                }
                check(&mut report.checks, "hull-dims-increasing", -min_gap, 0.0);
            }
        }
        // measured attractor dimension against the closed-form bound
        let bound = report.bounds.as_ref().map(|b| b.uniform);
        let slope = report.dimension_of("uniform-attractor").map(|d| d.slope);
        if let (Some(bound), Some(slope)) = (bound, slope) {
            check(
                &mut report.checks,
                "uniform-dim-within-bound",
                slope,
                bound + self.cfg.box_margin,
            );
        }
        Ok(())
    }
}

/// Execute the configured stages and write every artifact under `cfg.out`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    fs::create_dir_all(&cfg.out).map_err(pullback::Error::from)?;
    let mut pipe = Pipeline::new(cfg)?;
    let mut report = RunReport::new(cfg);
    let mut timings = String::new();
    for &stage in &cfg.stages {
        let t0 = Instant::now();
        match stage {
            Stage::Absorb => pipe.stage_absorb(&mut report)?,
            Stage::Hull => pipe.stage_hull(&mut report)?,
            Stage::Pullback => pipe.stage_pullback(&mut report)?,
            Stage::Uniform => pipe.stage_uniform(&mut report)?,
            Stage::ExpAttractor => pipe.stage_expattractor(&mut report)?,
            Stage::Dimension => pipe.stage_dimension(&mut report)?,
            Stage::Bounds => pipe.stage_bounds(&mut report)?,
            Stage::Verify => pipe.stage_verify(&mut report)?,
        }
        report.stages.push(StageStatus {
            name: stage.name().to_string(),
            status: "ok".to_string(),
        });
        let _ = writeln!(timings, "{} {:.3}s", stage.name(), t0.elapsed().as_secs_f64());
    }
    report.all_pass = report.checks.iter().all(|c| c.pass);
    io::write_json(cfg.out.join("report.json"), &report)?;
    fs::write(cfg.out.join("timings.log"), timings).map_err(pullback::Error::from)?;
    emit_plot_data(&report, &cfg.out.join("plots"))?;
    Ok(report)
}

/// Transcribe a report's fit data as plain CSV for external plotting.
pub fn emit_plot_data(report: &RunReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(pullback::Error::from)?;
    for nd in &report.dimensions {
        fs::write(
            dir.join(format!("dim_{}.csv", nd.target)),
            io::dimension_loglog_csv(&nd.report),
        )
        .map_err(pullback::Error::from)?;
    }
    if let Some(hull) = &report.hull {
        for d in &hull.dims {
            fs::write(
                dir.join(format!("hull_depth_{}.csv", d.depth)),
                io::dimension_loglog_csv(&d.report),
            )
            .map_err(pullback::Error::from)?;
        }
    }
    if !report.decay_rows.is_empty() {
        let rows: Vec<(f64, f64, f64)> = report
            .decay_rows
            .iter()
            .map(|r| (r.t, r.dist, r.envelope))
            .collect();
        fs::write(
            dir.join("semicontinuity.csv"),
            io::xyz_csv(("t", "dist", "envelope"), &rows),
        )
        .map_err(pullback::Error::from)?;
    }
    if let Some(att) = &report.attraction {
        let rows: Vec<(f64, f64, f64)> = att
            .levels
            .iter()
            .map(|l| (l.level as f64, l.measured, l.envelope))
            .collect();
        fs::write(
            dir.join("attraction.csv"),
            io::xyz_csv(("n", "measured", "envelope"), &rows),
        )
        .map_err(pullback::Error::from)?;
    }
    Ok(())
}

/// Evolve one trajectory and dump `t,k1..km` rows every `stride` steps.
pub fn simulate(cfg: &ExperimentConfig) -> Result<PathBuf> {
    fs::create_dir_all(&cfg.out).map_err(pullback::Error::from)?;
    let disc = SpatialDiscretization::with(cfg.length, cfg.modes, cfg.delta)?;
    let pcfg = ProcessConfig::new(disc, cfg.nonlinearity.clone())?.with_step(cfg.h)?;
    let process = Process::new(&pcfg)?;
    let forcing = cfg.forcing.build(&pcfg.disc)?;
    let mut u = match cfg.sim_u0.as_str() {
        "e1" => StateVector::unit(cfg.modes, 1),
        "zero" => StateVector::zero(cfg.modes),
        other => {
            return Err(CliError::config(format!(
                "unknown initial state {other:?} (want e1 or zero)"
            )))
        }
    };
    if cfg.sim_stride == 0 || !(cfg.sim_t_end > 0.0) {
        return Err(CliError::config(
            "simulate needs stride >= 1 and t_end > 0".into(),
        ));
    }
    let chunk = cfg.sim_stride as f64 * cfg.h;
    let mut times = vec![0.0];
    let mut states = vec![u.clone()];
    let mut t = 0.0;
    while t + chunk <= cfg.sim_t_end * (1.0 + 1e-12) {
        u = process.evolve(&u, &forcing, t, t + chunk)?;
        t += chunk;
        times.push(t);
        states.push(u.clone());
    }
    if t < cfg.sim_t_end - 1e-12 * cfg.sim_t_end {
        u = process.evolve(&u, &forcing, t, cfg.sim_t_end)?;
        times.push(cfg.sim_t_end);
        states.push(u.clone());
    }
    let path = cfg.out.join("trajectory.csv");
    fs::write(&path, io::timeseries_to_csv(&times, &states)?).map_err(pullback::Error::from)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Overrides;

    fn outdir(tag: &str) -> PathBuf {
        std::env::temp_dir().join(format!("pullback-pipe-{tag}-{}", std::process::id()))
    }

    fn heat_config(tag: &str, extra: &str) -> ExperimentConfig {
        let out = outdir(tag);
        let _ = fs::remove_dir_all(&out);
        let text = format!("scenario = linear-heat\nout = {}\n{extra}", out.display());
        ExperimentConfig::from_text(&text, &Overrides::default()).unwrap()
    }

    #[test]
    fn empty_pipeline_yields_empty_passing_report() {
        let cfg = heat_config("empty", "[pipeline]\nstages =\n");
        let report = run_experiment(&cfg).unwrap();
        assert!(report.all_pass);
        assert!(report.stages.is_empty());
        assert!(report.checks.is_empty());
        assert!(cfg.out.join("report.json").is_file());
        assert!(cfg.out.join("plots").is_dir());
        fs::remove_dir_all(&cfg.out).unwrap();
    }

    #[test]
    fn linear_heat_full_pipeline_passes() {
        let cfg = heat_config("full", "");
        let report = run_experiment(&cfg).unwrap();
        assert!(
            report.all_pass,
            "failed checks: {:?}",
            report
                .checks
                .iter()
                .filter(|c| !c.pass)
                .collect::<Vec<_>>()
        );
        assert_eq!(report.stages.len(), 8);
        let decay = report
            .checks
            .iter()
            .find(|c| c.name == "linear-decay")
            .expect("decay check present");
        assert!(decay.value < 1e-10, "decay residual {}", decay.value);
        assert!(report.absorbing.is_some());
        assert!(report.bounds.is_some());
        assert!(report.dimension_of("uniform-attractor").is_some());
        assert_eq!(
            report.dimension_of("uniform-attractor").unwrap().slope,
            0.0,
            "the heat attractor is a point"
        );
        for file in [
            "absorbing.json",
            "hull.json",
            "uniform.csv",
            "bounds.json",
            "report.json",
            "timings.log",
        ] {
            assert!(cfg.out.join(file).is_file(), "{file} missing");
        }
        assert!(cfg.out.join("family/manifest.json").is_file());
        assert!(cfg.out.join("expattractor/manifest.json").is_file());
        fs::remove_dir_all(&cfg.out).unwrap();
    }

    #[test]
    fn simulate_writes_decaying_trajectory() {
        let cfg = heat_config("sim", "[simulate]\nt_end = 0.5\nstride = 50\n");
        let path = simulate(&cfg).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("t,k1,k2,k3,k4\n"));
        // 0.5 / (50 * 1e-3) = 10 chunks plus the initial row
        assert_eq!(text.lines().count(), 12);
        let last = text.lines().last().unwrap();
        let k1: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
        let expect = (-std::f64::consts::PI.powi(2) * 0.5).exp();
        assert!(
            (k1 - expect).abs() < 1e-6,
            "k1 {k1} vs e^(-pi^2/2) {expect}"
        );
        fs::remove_dir_all(&cfg.out).unwrap();
    }

    #[test]
    fn stage_dependency_gap_is_a_config_error() {
        // dimension without uniform cannot be configured
        let out = outdir("dep");
        let text = format!(
            "scenario = linear-heat\nout = {}\n[pipeline]\nstages = absorb,dimension\n",
            out.display()
        );
        let err = ExperimentConfig::from_text(&text, &Overrides::default()).unwrap_err();
        assert_eq!(crate::exit_code_for(&err), 2);
    }
}
