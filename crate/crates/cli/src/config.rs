//! Plain-text experiment configuration: `key = value` lines with one level
//! of `[section]` nesting. Scenario presets are themselves config texts that
//! user files overlay key by key.

use crate::CliError;
use pullback::dynamics::NonlinearitySpec;
use pullback::space::SpatialDiscretization;
use pullback::symbol::{make_cantor_forcing, make_quasiperiodic, y_ball_corner_sampler};
use pullback::{StateVector, SymbolPath};
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

/// Default output root when a config gives a relative `out`.
pub const OUT_ROOT_ENV: &str = "PULLBACK_OUT_ROOT";

const LINEAR_HEAT: &str = r#"
scenario = linear-heat
seed = 17
out = runs/linear-heat

[discretization]
modes = 4
length = 1.0
delta = 0.25

[dynamics]
h = 0.001

[nonlinearity]
type = zero

[forcing]
type = zero

[hull]
extent = 1.0
step = 0.25

[pipeline]
stages = absorb,hull,pullback,uniform,expattractor,dimension,bounds,verify

[tolerances]
tol = 1e-6
box_margin = 0.5

[absorb]
radii = 0.25,0.5,1.0,2.0
ensemble = 8

[pullback]
times = -4,-3,-2,-1,0,1,2,3,4
ensemble = 16
max_lookback = 64.0

[expattractor]
nu = 0.5
n_max = 4

[bounds]
tau = 0.0

[dimension]
radii = 0.2,0.1,0.05,0.025
hull_radii = 0.25,0.125,0.0625,0.03125
depths =
hull_extent = 1.0
hull_step = 0.125

[simulate]
t_end = 1.0
stride = 100
u0 = e1
"#;

const CANTOR_SHOWCASE: &str = r#"
scenario = cantor-showcase
seed = 23
out = runs/cantor-showcase

[discretization]
modes = 8
length = 1.0
delta = 0.25

[dynamics]
h = 0.001

[nonlinearity]
type = linear
rate = 1.0

[forcing]
type = cantor
depth = 8

[hull]
extent = 2.0
step = 0.125

[pipeline]
stages = absorb,hull,pullback,uniform,expattractor,dimension,bounds,verify

[tolerances]
tol = 1e-6
box_margin = 0.5

[absorb]
radii = 0.25,0.5,1.0,2.0
ensemble = 8

[pullback]
times = -4,-3,-2,-1,0,1,2,3,4
ensemble = 16
max_lookback = 64.0

[expattractor]
nu = 0.5
n_max = 3

[bounds]
tau = 0.25

[dimension]
radii = 0.1,0.05,0.025,0.0125
hull_radii = 0.256,0.128,0.064,0.032,0.016
depths = 4,6,8
hull_extent = 0.25
hull_step = 0.0

[simulate]
t_end = 1.0
stride = 100
u0 = e1
"#;

// bare defaults for scenario = custom: zero forcing, all stages
const CUSTOM: &str = r#"
scenario = custom
seed = 1
out = runs/custom

[discretization]
modes = 4
length = 1.0
delta = 0.25

[dynamics]
h = 0.001

[nonlinearity]
type = zero

[forcing]
type = zero

[hull]
extent = 1.0
step = 0.25

[pipeline]
stages = absorb,hull,pullback,uniform,expattractor,dimension,bounds,verify

[tolerances]
tol = 1e-6
box_margin = 0.5

[absorb]
radii = 0.25,0.5,1.0,2.0
ensemble = 8

[pullback]
times = -4,-3,-2,-1,0,1,2,3,4
ensemble = 16
max_lookback = 64.0

[expattractor]
nu = 0.5
n_max = 3

[bounds]
tau = 0.0

[dimension]
radii = 0.2,0.1,0.05,0.025
hull_radii = 0.25,0.125,0.0625,0.03125
depths =
hull_extent = 1.0
hull_step = 0.125

[simulate]
t_end = 1.0
stride = 100
u0 = e1
"#;

fn preset(name: &str) -> Option<&'static str> {
    match name {
        "linear-heat" => Some(LINEAR_HEAT),
        "cantor-showcase" => Some(CANTOR_SHOWCASE),
        "custom" => Some(CUSTOM),
        _ => None,
    }
}

/// Parsed `(section, key) -> value` entries, section `""` for top level.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<(String, String), String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| CliError::config(format!("line {}: unclosed section", i + 1)))?
                    .trim();
                if name.is_empty() {
                    return Err(CliError::config(format!("line {}: empty section", i + 1)));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("line {}: expected key = value", i + 1)))?;
            entries.insert(
                (section.clone(), key.trim().to_string()),
                value.trim().to_string(),
            );
        }
        Ok(Self { entries })
    }

    /// Overlay `other` on top of `self`, key by key.
    pub fn apply(&mut self, other: RawConfig) {
        self.entries.extend(other.entries);
    }

    fn take(&mut self, section: &str, key: &str) -> Option<String> {
        self.entries.remove(&(section.to_string(), key.to_string()))
    }

    fn set(&mut self, section: &str, key: &str, value: String) {
        self.entries
            .insert((section.to_string(), key.to_string()), value);
    }
}

/// Pipeline stages in dependency order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
pub enum Stage {
    Absorb,
    Hull,
    Pullback,
    Uniform,
    ExpAttractor,
    Dimension,
    Bounds,
    Verify,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::Absorb,
        Stage::Hull,
        Stage::Pullback,
        Stage::Uniform,
        Stage::ExpAttractor,
        Stage::Dimension,
        Stage::Bounds,
        Stage::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Absorb => "absorb",
            Stage::Hull => "hull",
            Stage::Pullback => "pullback",
            Stage::Uniform => "uniform",
            Stage::ExpAttractor => "expattractor",
            Stage::Dimension => "dimension",
            Stage::Bounds => "bounds",
            Stage::Verify => "verify",
        }
    }

    fn from_name(s: &str) -> Result<Self, CliError> {
        Stage::ALL
            .iter()
            .copied()
            .find(|st| st.name() == s)
            .ok_or_else(|| CliError::config(format!("unknown stage {s:?}")))
    }

    /// Stages that must run earlier in the same pipeline.
    pub fn deps(self) -> &'static [Stage] {
        match self {
            Stage::Pullback | Stage::Uniform | Stage::ExpAttractor | Stage::Bounds => {
                &[Stage::Absorb]
            }
            Stage::Dimension => &[Stage::Absorb, Stage::Uniform],
            _ => &[],
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Forcing generator selection.
#[derive(Debug, Clone)]
pub enum ForcingSpec {
    Zero,
    Cantor {
        depth: usize,
    },
    Quasiperiodic {
        freqs: Vec<f64>,
        amp: f64,
        t_extent: f64,
        grid_step: f64,
    },
    File {
        path: PathBuf,
    },
}

impl ForcingSpec {
    /// Instantiate the forcing path for a discretization.
    pub fn build(&self, disc: &SpatialDiscretization) -> Result<SymbolPath, CliError> {
        let modes = disc.modes();
        match self {
            ForcingSpec::Zero => Ok(SymbolPath::zero(modes)),
            ForcingSpec::Cantor { depth } => {
                if *depth > modes {
                    return Err(CliError::config(format!(
                        "cantor depth {depth} exceeds mode count {modes}"
                    )));
                }
                let sampler = y_ball_corner_sampler(disc.eigenvalues(), *depth, modes);
                Ok(make_cantor_forcing(&sampler, *depth, modes)?)
            }
            ForcingSpec::Quasiperiodic {
                freqs,
                amp,
                t_extent,
                grid_step,
            } => {
                let amps: Vec<StateVector> = freqs
                    .iter()
                    .enumerate()
                    .map(|(i, _)| {
                        let mut v = StateVector::zero(modes);
                        v.coeffs[i % modes] = amp / (i + 1) as f64;
                        v
                    })
                    .collect();
                Ok(make_quasiperiodic(
                    freqs, &amps, -t_extent, *t_extent, *grid_step,
                )?)
            }
            ForcingSpec::File { path } => Ok(pullback::io::read_symbol_csv(path)?),
        }
    }
}

/// Fully resolved experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub scenario: String,
    pub seed: u64,
    pub out: PathBuf,
    pub modes: usize,
    pub length: f64,
    pub delta: f64,
    pub h: f64,
    pub nonlinearity: NonlinearitySpec,
    pub forcing: ForcingSpec,
    pub stages: Vec<Stage>,
    pub tol: f64,
    pub box_margin: f64,
    pub hull_extent: f64,
    pub hull_step: f64,
    pub absorb_radii: Vec<f64>,
    pub absorb_ensemble: usize,
    pub family_times: Vec<f64>,
    pub pullback_ensemble: usize,
    pub max_lookback: f64,
    pub nu: f64,
    pub n_max: usize,
    pub bounds_tau: f64,
    pub dim_radii: Vec<f64>,
    pub hull_radii: Vec<f64>,
    pub hull_depths: Vec<usize>,
    pub hull_dim_extent: f64,
    /// 0 means per-depth automatic `3^-D`.
    pub hull_dim_step: f64,
    pub sim_t_end: f64,
    pub sim_stride: usize,
    pub sim_u0: String,
}

/// CLI-level overrides applied after the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub stages: Option<Vec<Stage>>,
}

fn parse_f64(section: &str, key: &str, v: &str) -> Result<f64, CliError> {
    v.parse::<f64>()
        .map_err(|e| CliError::config(format!("[{section}] {key} = {v:?}: {e}")))
}

fn parse_usize(section: &str, key: &str, v: &str) -> Result<usize, CliError> {
    v.parse::<usize>()
        .map_err(|e| CliError::config(format!("[{section}] {key} = {v:?}: {e}")))
}

fn parse_list_f64(section: &str, key: &str, v: &str) -> Result<Vec<f64>, CliError> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_f64(section, key, s))
        .collect()
}

fn parse_list_usize(section: &str, key: &str, v: &str) -> Result<Vec<usize>, CliError> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_usize(section, key, s))
        .collect()
}

impl ExperimentConfig {
    /// Load a config file, overlay it on its scenario preset, apply CLI
    /// overrides, and resolve every key.
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_text(&text, overrides)
    }

    pub fn from_text(text: &str, overrides: &Overrides) -> Result<Self, CliError> {
        let user = RawConfig::parse(text)?;
        let scenario = user
            .entries
            .get(&(String::new(), "scenario".to_string()))
            .cloned()
            .unwrap_or_else(|| "custom".to_string());
        let preset_text = preset(&scenario)
            .ok_or_else(|| CliError::config(format!("unknown scenario {scenario:?}")))?;
        let mut raw = RawConfig::parse(preset_text).expect("presets parse");
        raw.apply(user);
        if let Some(seed) = overrides.seed {
            raw.set("", "seed", seed.to_string());
        }
        if let Some(out) = &overrides.out {
            raw.set("", "out", out.display().to_string());
        }
        if let Some(tol) = overrides.tol {
            raw.set("tolerances", "tol", format!("{tol:e}"));
        }
        if let Some(stages) = &overrides.stages {
            let names: Vec<&str> = stages.iter().map(|s| s.name()).collect();
            raw.set("pipeline", "stages", names.join(","));
        }
        Self::resolve(raw)
    }

    /// A preset by name, with no user overlay.
    pub fn scenario(name: &str, overrides: &Overrides) -> Result<Self, CliError> {
        let text = preset(name)
            .ok_or_else(|| CliError::config(format!("unknown scenario {name:?}")))?;
        Self::from_text(text, overrides)
    }

    fn resolve(mut raw: RawConfig) -> Result<Self, CliError> {
        let mut f = |section: &str, key: &str| -> Result<f64, CliError> {
            let v = raw
                .take(section, key)
                .ok_or_else(|| CliError::config(format!("missing [{section}] {key}")))?;
            parse_f64(section, key, &v)
        };
        let length = f("discretization", "length")?;
        let delta = f("discretization", "delta")?;
        let h = f("dynamics", "h")?;
        let tol = f("tolerances", "tol")?;
        let box_margin = f("tolerances", "box_margin")?;
        let hull_extent = f("hull", "extent")?;
        let hull_step = f("hull", "step")?;
        let max_lookback = f("pullback", "max_lookback")?;
        let nu = f("expattractor", "nu")?;
        let bounds_tau = f("bounds", "tau")?;
        let hull_dim_extent = f("dimension", "hull_extent")?;
        let hull_dim_step = f("dimension", "hull_step")?;
        let sim_t_end = f("simulate", "t_end")?;

        let mut take = |section: &str, key: &str| -> Result<String, CliError> {
            raw.take(section, key)
                .ok_or_else(|| CliError::config(format!("missing [{section}] {key}")))
        };
        let scenario = take("", "scenario")?;
        let seed = {
            let v = take("", "seed")?;
            v.parse::<u64>()
                .map_err(|e| CliError::config(format!("seed = {v:?}: {e}")))?
        };
        let out = {
            let v = PathBuf::from(take("", "out")?);
            match std::env::var_os(OUT_ROOT_ENV) {
                Some(root) if v.is_relative() => PathBuf::from(root).join(v),
                _ => v,
            }
        };
        let modes = parse_usize("discretization", "modes", &take("discretization", "modes")?)?;

        let nonlinearity = {
            let kind = take("nonlinearity", "type")?;
            match kind.as_str() {
                "zero" => NonlinearitySpec::zero(),
                "linear" => {
                    let rate = parse_f64("nonlinearity", "rate", &take("nonlinearity", "rate")?)?;
                    NonlinearitySpec::linear(rate)
                }
                "saturated_cubic" => {
                    let scale =
                        parse_f64("nonlinearity", "scale", &take("nonlinearity", "scale")?)?;
                    NonlinearitySpec::saturated_cubic(scale)?
                }
                other => {
                    return Err(CliError::config(format!(
                        "unknown nonlinearity type {other:?}"
                    )))
                }
            }
        };

        let forcing = {
            let kind = take("forcing", "type")?;
            match kind.as_str() {
                "zero" => ForcingSpec::Zero,
                "cantor" => ForcingSpec::Cantor {
                    depth: parse_usize("forcing", "depth", &take("forcing", "depth")?)?,
                },
                "quasiperiodic" => ForcingSpec::Quasiperiodic {
                    freqs: parse_list_f64("forcing", "freqs", &take("forcing", "freqs")?)?,
                    amp: parse_f64("forcing", "amp", &take("forcing", "amp")?)?,
                    t_extent: parse_f64("forcing", "t_extent", &take("forcing", "t_extent")?)?,
                    grid_step: parse_f64("forcing", "grid_step", &take("forcing", "grid_step")?)?,
                },
                "file" => ForcingSpec::File {
                    path: PathBuf::from(take("forcing", "file")?),
                },
                other => return Err(CliError::config(format!("unknown forcing type {other:?}"))),
            }
        };
        // presets carry cantor depth; drop it when the forcing was overridden
        let _ = take("forcing", "depth");

        let stages = {
            let list = take("pipeline", "stages")?;
            let mut stages: Vec<Stage> = list
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(Stage::from_name)
                .collect::<Result<_, _>>()?;
            stages.sort();
            stages.dedup();
            for &s in &stages {
                for dep in s.deps() {
                    if !stages.contains(dep) {
                        return Err(CliError::config(format!(
                            "stage {s} requires stage {dep}"
                        )));
                    }
                }
            }
            stages
        };

        let absorb_radii = parse_list_f64("absorb", "radii", &take("absorb", "radii")?)?;
        let absorb_ensemble =
            parse_usize("absorb", "ensemble", &take("absorb", "ensemble")?)?;
        let family_times = parse_list_f64("pullback", "times", &take("pullback", "times")?)?;
        let pullback_ensemble =
            parse_usize("pullback", "ensemble", &take("pullback", "ensemble")?)?;
        let n_max = parse_usize("expattractor", "n_max", &take("expattractor", "n_max")?)?;
        let dim_radii = parse_list_f64("dimension", "radii", &take("dimension", "radii")?)?;
        let hull_radii =
            parse_list_f64("dimension", "hull_radii", &take("dimension", "hull_radii")?)?;
        let hull_depths =
            parse_list_usize("dimension", "depths", &take("dimension", "depths")?)?;
        let sim_stride = parse_usize("simulate", "stride", &take("simulate", "stride")?)?;
        let sim_u0 = take("simulate", "u0")?;

        if let Some(((section, key), _)) = raw.entries.iter().next() {
            return Err(CliError::config(format!(
                "unknown config key [{section}] {key}"
            )));
        }

        Ok(Self {
            scenario,
            seed,
            out,
            modes,
            length,
            delta,
            h,
            nonlinearity,
            forcing,
            stages,
            tol,
            box_margin,
            hull_extent,
            hull_step,
            absorb_radii,
            absorb_ensemble,
            family_times,
            pullback_ensemble,
            max_lookback,
            nu,
            n_max,
            bounds_tau,
            dim_radii,
            hull_radii,
            hull_depths,
            hull_dim_extent,
            hull_dim_step,
            sim_t_end,
            sim_stride,
            sim_u0,
        })
    }
}
