use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use ks_core::{run, MonitorRecord, MonitorSink, SimState, Status};
use serde::{Deserialize, Serialize};

use crate::manifest::RunManifest;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("scenario {scenario}: {source}")]
    Solver { scenario: String, source: ks_core::KsError },
}

/// Process exit code for a final status: 0 for `Finished`, 3 for
/// `BlowupSuspected`, 4 for `DtCollapse`. Codes 1 and 2 are left for
/// runtime and usage errors.
pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Finished => 0,
        Status::BlowupSuspected => 3,
        Status::DtCollapse => 4,
        // `run` never returns a running state.
        Status::Running => 1,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalNorms {
    pub mass: f64,
    pub u_linf: f64,
    pub u_l3: f64,
    pub v_lp: f64,
    pub entropy: f64,
    pub grad_seminorm: f64,
    pub functional: f64,
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scenario: String,
    pub status: String,
    pub exit_code: i32,
    pub variant: String,
    pub diffusion: String,
    pub exponent: f64,
    pub criticality: String,
    pub mass: f64,
    pub n_cells: usize,
    pub t_end: f64,
    pub t_final: f64,
    pub steps: usize,
    pub records: usize,
    pub final_norms: FinalNorms,
    pub max_u_linf: f64,
    pub max_mass_drift: f64,
    pub max_abs_energy_residual: f64,
    pub residual_integral: f64,
    pub max_source: f64,
    pub min_regest1_slack: Option<f64>,
    pub min_regest2_slack: Option<f64>,
    pub wall_time_seconds: f64,
}

impl Summary {
    pub fn final_status(&self) -> Status {
        match self.status.as_str() {
            "finished" => Status::Finished,
            "blowup_suspected" => Status::BlowupSuspected,
            "dt_collapse" => Status::DtCollapse,
            _ => Status::Running,
        }
    }
}

/// File name of the profile written at time `t`.
pub fn profile_file_name(t: f64) -> String {
    format!("profile_t{t}.csv")
}

struct CsvSink<'a> {
    timeseries: BufWriter<File>,
    out: PathBuf,
    snapshot_times: Vec<f64>,
    grid: ks_core::Grid,
    observer: Option<&'a mut dyn MonitorSink<f64>>,
    last: Option<MonitorRecord<f64>>,
    min_slack: [Option<f64>; 2],
    error: Option<RunError>,
}

impl CsvSink<'_> {
    fn fail(&mut self, path: PathBuf, source: std::io::Error) {
        self.error.get_or_insert(RunError::Io { path, source });
    }

    fn write_profile(&self, state: &SimState<f64>) -> std::io::Result<()> {
        let mut w = BufWriter::new(File::create(self.out.join(profile_file_name(state.t)))?);
        writeln!(w, "x,u,v")?;
        for (i, (u, v)) in state.u.iter().zip(state.v.iter()).enumerate() {
            writeln!(w, "{},{u},{v}", self.grid.center(i))?;
        }
        w.flush()
    }
}

impl MonitorSink<f64> for CsvSink<'_> {
    fn record(&mut self, record: &MonitorRecord<f64>) {
        if let Some(o) = self.observer.as_deref_mut() {
            o.record(record);
        }
        for (slot, value) in self
            .min_slack
            .iter_mut()
            .zip([record.regest1_slack, record.regest2_slack])
        {
            if let Some(v) = value {
                *slot = Some(slot.map_or(v, |s: f64| s.min(v)));
            }
        }
        self.last = Some(record.clone());
        if self.error.is_none() {
            if let Err(e) = writeln!(self.timeseries, "{}", record.to_csv_row()) {
                self.fail(self.out.join("timeseries.csv"), e);
            }
        }
    }

    fn snapshot_times(&self) -> Vec<f64> {
        self.snapshot_times.clone()
    }

    fn snapshot(&mut self, state: &SimState<f64>) {
        if let Some(o) = self.observer.as_deref_mut() {
            o.snapshot(state);
        }
        if self.error.is_none() {
            if let Err(e) = self.write_profile(state) {
                self.fail(self.out.join(profile_file_name(state.t)), e);
            }
        }
    }
}

/// Runs `manifest`, writing `timeseries.csv`, one `profile_t<t>.csv` per
/// reached snapshot time and `summary.json` under `manifest.outputs`.
pub fn run_scenario(manifest: &RunManifest) -> Result<Summary, RunError> {
    run_scenario_observed(manifest, None)
}

/// As [`run_scenario`], also forwarding every record and snapshot to
/// `observer`.
pub fn run_scenario_observed(
    manifest: &RunManifest,
    observer: Option<&mut dyn MonitorSink<f64>>,
) -> Result<Summary, RunError> {
    let out = manifest.outputs.as_path();
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| RunError::Io { path, source }
    };
    std::fs::create_dir_all(out).map_err(io(out))?;
    let ts_path = out.join("timeseries.csv");
    let mut timeseries = BufWriter::new(File::create(&ts_path).map_err(io(&ts_path))?);
    writeln!(timeseries, "{}", MonitorRecord::<f64>::CSV_HEADER).map_err(io(&ts_path))?;

    let mut sink = CsvSink {
        timeseries,
        out: out.to_path_buf(),
        snapshot_times: manifest.snapshot_times.clone(),
        grid: manifest.grid(),
        observer,
        last: None,
        min_slack: [None, None],
        error: None,
    };
    let started = Instant::now();
    let outcome =
        run(manifest.problem, manifest.solver, manifest.grid(), &mut sink).map_err(|source| RunError::Solver {
            scenario: manifest.scenario.clone(),
            source,
        })?;
    let wall = started.elapsed().as_secs_f64();
    if let Some(e) = sink.error.take() {
        return Err(e);
    }
    sink.timeseries.flush().map_err(io(&ts_path))?;

    let last = sink.last.expect("run emits at least one record");
    let d = manifest.problem.diffusion;
    let status = outcome.state.status;
    let summary = Summary {
        scenario: manifest.scenario.clone(),
        status: status.as_str().to_string(),
        exit_code: exit_code(status),
        variant: manifest.problem.variant.as_str().to_string(),
        diffusion: d.kind_name().to_string(),
        exponent: d.exponent(),
        criticality: d.criticality().as_str().to_string(),
        mass: manifest.problem.mass(),
        n_cells: manifest.n_cells,
        t_end: manifest.problem.t_end,
        t_final: outcome.state.t,
        steps: outcome.state.step,
        records: outcome.records,
        final_norms: FinalNorms {
            mass: last.mass,
            u_linf: last.u_linf,
            u_l3: last.u_l3,
            v_lp: last.v_lp,
            entropy: last.entropy,
            grad_seminorm: last.grad_seminorm,
            functional: last.f,
        },
        max_u_linf: outcome.max_u_linf,
        max_mass_drift: outcome.max_mass_drift,
        max_abs_energy_residual: outcome.max_abs_residual,
        residual_integral: outcome.residual_integral,
        max_source: outcome.max_source,
        min_regest1_slack: sink.min_slack[0],
        min_regest2_slack: sink.min_slack[1],
        wall_time_seconds: wall,
    };
    let summary_path = out.join("summary.json");
    let json = serde_json::to_string_pretty(&summary).expect("summary serialises");
    std::fs::write(&summary_path, json + "\n").map_err(io(&summary_path))?;
    Ok(summary)
}
