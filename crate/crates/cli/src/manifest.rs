//! TOML run manifests.
//!
//! ```toml
//! scenario = "critical_energy"      # default: file stem, else "scenario"
//! variant = "standard"              # or "jaeger_luckhaus"
//! t_end = 1.0
//! outputs = "out/critical_energy"   # default: out/<scenario>
//! snapshot_times = [0.0, 1.0]       # default: none
//!
//! [diffusion]
//! kind = "power_one_plus_u"         # inverse_u | inverse_one_plus_u | power_one_plus_u | power_u
//! p = -1.0                          # only for the power kinds
//!
//! [initial_condition]
//! kind = "cosine_bump"              # constant | cosine_bump | gaussian_bump
//! mass = 4.0
//! amplitude = 0.5
//! frequency = 1.0
//!
//! [grid]
//! n_cells = 128
//!
//! [solver]
//! cfl_diff = 0.4
//! cfl_adv = 0.9
//! dt_min = 1e-12
//! blowup_threshold = 1e6
//! record_every = 10
//! v_norm_exponent = 2.0
//! ```
//!
//! Every table except `[diffusion]` and `[initial_condition]` is optional;
//! unknown keys anywhere are rejected.

use std::path::{Path, PathBuf};

use ks_core::{Diffusion, Grid, InitialCondition, ProblemConfig, SolverConfig, Variant};
use serde::Deserialize;

pub const DEFAULT_N_CELLS: usize = 128;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("{origin}: invalid `{field}`: {message}")]
    Invalid {
        origin: String,
        field: String,
        message: String,
    },
}

/// A fully validated description of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub scenario: String,
    pub problem: ProblemConfig,
    pub solver: SolverConfig,
    pub n_cells: usize,
    pub outputs: PathBuf,
    /// Sorted ascending, inside `[0, t_end]`.
    pub snapshot_times: Vec<f64>,
}

impl RunManifest {
    pub fn grid(&self) -> Grid {
        Grid::new(self.n_cells).expect("validated grid")
    }

    /// Replaces `t_end`, dropping snapshot times beyond it.
    pub fn with_t_end(mut self, t_end: f64) -> Result<Self, ConfigError> {
        self.problem.t_end = t_end;
        self.snapshot_times.retain(|&t| t <= t_end);
        self.validate("override")?;
        Ok(self)
    }

    pub fn with_n_cells(mut self, n_cells: usize) -> Result<Self, ConfigError> {
        self.n_cells = n_cells;
        self.validate("override")?;
        Ok(self)
    }

    fn validate(&self, origin: &str) -> Result<(), ConfigError> {
        let invalid = |field: &str, message: String| ConfigError::Invalid {
            origin: origin.to_string(),
            field: field.to_string(),
            message,
        };
        if self.scenario.is_empty() || self.scenario.contains(['/', '\\']) {
            return Err(invalid("scenario", format!("{:?} is not a usable name", self.scenario)));
        }
        Grid::<f64>::new(self.n_cells).map_err(|e| invalid("grid.n_cells", e.to_string()))?;
        self.problem
            .validate()
            .map_err(|e| invalid(problem_field(&e), e.to_string()))?;
        self.solver.validate().map_err(|e| invalid("solver", e.to_string()))?;
        let u0 = self.problem.initial_condition.realize(&self.grid());
        self.solver
            .validate_initial(&u0)
            .map_err(|e| invalid("solver.blowup_threshold", e.to_string()))?;
        let t_end = self.problem.t_end;
        if let Some(t) = self.snapshot_times.iter().find(|t| !(0.0..=t_end).contains(*t)) {
            return Err(invalid(
                "snapshot_times",
                format!("{t} lies outside [0, t_end = {t_end}]"),
            ));
        }
        if self.snapshot_times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("snapshot_times", "must be strictly ascending".to_string()));
        }
        Ok(())
    }
}

fn problem_field(e: &ks_core::KsError) -> &'static str {
    match e {
        ks_core::KsError::InvalidConfig(msg) if msg.contains("t_end") => "t_end",
        ks_core::KsError::InvalidConfig(msg) if msg.starts_with("diffusion") => "diffusion",
        _ => "initial_condition",
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    scenario: Option<String>,
    #[serde(default)]
    variant: VariantDoc,
    t_end: f64,
    outputs: Option<PathBuf>,
    #[serde(default)]
    snapshot_times: Vec<f64>,
    diffusion: DiffusionDoc,
    initial_condition: InitialDoc,
    #[serde(default)]
    grid: GridDoc,
    #[serde(default)]
    solver: SolverDoc,
}

#[derive(Deserialize, Default, Clone, Copy)]
#[serde(rename_all = "snake_case")]
enum VariantDoc {
    #[default]
    Standard,
    JaegerLuckhaus,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiffusionDoc {
    kind: String,
    p: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialDoc {
    kind: String,
    mass: f64,
    amplitude: Option<f64>,
    frequency: Option<f64>,
    center: Option<f64>,
    width: Option<f64>,
    floor: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridDoc {
    n_cells: usize,
}

impl Default for GridDoc {
    fn default() -> Self {
        Self {
            n_cells: DEFAULT_N_CELLS,
        }
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct SolverDoc {
    cfl_diff: Option<f64>,
    cfl_adv: Option<f64>,
    dt_min: Option<f64>,
    blowup_threshold: Option<f64>,
    record_every: Option<usize>,
    v_norm_exponent: Option<f64>,
}

/// Parses and validates a manifest. A missing `scenario` becomes
/// `"scenario"`.
pub fn parse_config(text: &str) -> Result<RunManifest, ConfigError> {
    parse_named(text, "scenario", "<config>")
}

/// Reads a manifest from disk; a missing `scenario` becomes the file stem.
pub fn load_manifest(path: &Path) -> Result<RunManifest, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    parse_named(&text, stem, &path.display().to_string())
}

fn parse_named(text: &str, default_name: &str, origin: &str) -> Result<RunManifest, ConfigError> {
    let doc: Document = toml::from_str(text).map_err(|e| ConfigError::Parse {
        origin: origin.to_string(),
        message: e.to_string().trim_end().to_string(),
    })?;
    let invalid = |field: &str, message: String| ConfigError::Invalid {
        origin: origin.to_string(),
        field: field.to_string(),
        message,
    };

    let diffusion = diffusion_from(&doc.diffusion).map_err(|m| invalid("diffusion", m))?;
    let initial_condition = initial_from(&doc.initial_condition).map_err(|m| invalid("initial_condition", m))?;
    let defaults = SolverConfig::default();
    let s = &doc.solver;
    let solver = SolverConfig {
        cfl_diff: s.cfl_diff.unwrap_or(defaults.cfl_diff),
        cfl_adv: s.cfl_adv.unwrap_or(defaults.cfl_adv),
        dt_min: s.dt_min.unwrap_or(defaults.dt_min),
        blowup_threshold: s.blowup_threshold.unwrap_or(defaults.blowup_threshold),
        record_every: s.record_every.unwrap_or(defaults.record_every),
        v_norm_exponent: s.v_norm_exponent.unwrap_or(defaults.v_norm_exponent),
    };
    let scenario = doc.scenario.unwrap_or_else(|| default_name.to_string());
    let manifest = RunManifest {
        outputs: doc.outputs.unwrap_or_else(|| Path::new("out").join(&scenario)),
        scenario,
        problem: ProblemConfig {
            variant: match doc.variant {
                VariantDoc::Standard => Variant::Standard,
                VariantDoc::JaegerLuckhaus => Variant::JaegerLuckhaus,
            },
            diffusion,
            initial_condition,
            t_end: doc.t_end,
        },
        solver,
        n_cells: doc.grid.n_cells,
        snapshot_times: doc.snapshot_times,
    };
    manifest.validate(origin)?;
    Ok(manifest)
}

fn diffusion_from(doc: &DiffusionDoc) -> Result<Diffusion, String> {
    let exponent = || doc.p.ok_or_else(|| format!("kind `{}` needs `p`", doc.kind));
    let d = match doc.kind.as_str() {
        "inverse_u" => Diffusion::InverseU,
        "inverse_one_plus_u" => Diffusion::InverseOnePlusU,
        "power_one_plus_u" => Diffusion::PowerOnePlusU(exponent()?),
        "power_u" => Diffusion::PowerU(exponent()?),
        other => {
            return Err(format!(
                "unknown kind `{other}` (expected inverse_u, inverse_one_plus_u, power_one_plus_u or power_u)"
            ))
        }
    };
    if doc.p.is_some() && matches!(d, Diffusion::InverseU | Diffusion::InverseOnePlusU) {
        return Err(format!("kind `{}` takes no `p`", doc.kind));
    }
    Ok(d)
}

fn initial_from(doc: &InitialDoc) -> Result<InitialCondition, String> {
    let need = |name: &str, value: Option<f64>| value.ok_or_else(|| format!("kind `{}` needs `{name}`", doc.kind));
    let allowed: &[&str] = match doc.kind.as_str() {
        "constant" => &[],
        "cosine_bump" => &["amplitude", "frequency"],
        "gaussian_bump" => &["center", "width", "floor"],
        other => {
            return Err(format!(
                "unknown kind `{other}` (expected constant, cosine_bump or gaussian_bump)"
            ))
        }
    };
    let present = [
        ("amplitude", doc.amplitude),
        ("frequency", doc.frequency),
        ("center", doc.center),
        ("width", doc.width),
        ("floor", doc.floor),
    ];
    if let Some((name, _)) = present.iter().find(|(n, v)| v.is_some() && !allowed.contains(n)) {
        return Err(format!("kind `{}` takes no `{name}`", doc.kind));
    }
    Ok(match doc.kind.as_str() {
        "constant" => InitialCondition::Constant { mass: doc.mass },
        "cosine_bump" => InitialCondition::CosineBump {
            mass: doc.mass,
            amplitude: need("amplitude", doc.amplitude)?,
            frequency: need("frequency", doc.frequency)?,
        },
        _ => InitialCondition::GaussianBump {
            mass: doc.mass,
            center: need("center", doc.center)?,
            width: need("width", doc.width)?,
            floor: need("floor", doc.floor)?,
        },
    })
}
