use std::collections::HashSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::manifest::{load_manifest, ConfigError, RunManifest};
use crate::runner::{run_scenario, RunError, Summary};

pub const TABLE_HEADER: &str = "scenario,p,M,variant,status,max_u_linf,t_final";

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("a suite needs at least 2 manifests, got {0}")]
    TooFew(usize),
    #[error("duplicate scenario name `{0}`")]
    Duplicate(String),
    #[error("cannot list {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Run(#[from] RunError),
}

/// One row of the comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRow {
    pub summary: Summary,
}

impl SuiteRow {
    pub fn to_csv_row(&self) -> String {
        let s = &self.summary;
        format!(
            "{},{},{},{},{},{},{}",
            s.scenario, s.exponent, s.mass, s.variant, s.status, s.max_u_linf, s.t_final
        )
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    /// In manifest order.
    pub rows: Vec<SuiteRow>,
}

impl SuiteReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(TABLE_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.to_csv_row());
            out.push('\n');
        }
        out
    }
}

/// Runs every manifest, in parallel, and tabulates the outcomes.
pub fn compare_suite(manifests: &[RunManifest]) -> Result<SuiteReport, SuiteError> {
    if manifests.len() < 2 {
        return Err(SuiteError::TooFew(manifests.len()));
    }
    let mut seen = HashSet::new();
    for m in manifests {
        if !seen.insert(m.scenario.as_str()) {
            return Err(SuiteError::Duplicate(m.scenario.clone()));
        }
    }
    let rows = manifests
        .par_iter()
        .map(|m| run_scenario(m).map(|summary| SuiteRow { summary }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SuiteReport { rows })
}

/// Loads every `*.toml` in `dir`, sorted by file name, and points each
/// manifest's outputs at `out/<scenario>`.
pub fn load_suite(dir: &Path, out: &Path) -> Result<Vec<RunManifest>, SuiteError> {
    let io = |source| SuiteError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(io)?;
    paths.retain(|p| p.extension().is_some_and(|e| e == "toml"));
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let mut m = load_manifest(p)?;
            m.outputs = out.join(&m.scenario);
            Ok(m)
        })
        .collect()
}
