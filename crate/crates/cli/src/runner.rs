use std::fmt;
use std::path::{Path, PathBuf};

use anderson_mp::edge_probe::{edge_scan, weyl_probe};
use anderson_mp::eigensolve::{spectrum, EigenOptions};
use anderson_mp::ids::select_probe_energy;
use anderson_mp::{estimate_ids, fit_lifshitz, paired_ids, sample_field, BoxOperators, IdsCurve};
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig, Probe};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Spectrum,
    Ids,
    Fit,
    Compare,
    Weyl,
    Edge,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Spectrum => "spectrum",
            Command::Ids => "ids",
            Command::Fit => "fit",
            Command::Compare => "compare",
            Command::Weyl => "weyl",
            Command::Edge => "edge",
        })
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{command}: {source}")]
    Model {
        command: Command,
        source: anderson_mp::Error,
    },
    #[error("{command}: {reason}")]
    Task { command: Command, reason: String },
    #[error("cannot write {path}: {reason}")]
    Io { path: PathBuf, reason: String },
}

pub const SPECTRUM_HEADER: [&str; 2] = ["index", "eigenvalue"];
pub const IDS_HEADER: [&str; 5] = ["L", "E", "N_mean", "N_stderr", "R"];
pub const FIT_HEADER: [&str; 5] = ["slope", "gamma_hat", "window_lo", "window_hi", "residual_rms"];
pub const COMPARE_HEADER: [&str; 6] = ["L", "E_probe", "N_int", "N_free", "delta", "stderr"];
pub const WEYL_HEADER: [&str; 5] = ["k", "m", "quotient", "residual", "interaction_energy"];
pub const EDGE_HEADER: [&str; 4] = ["L", "median_E0", "iqr_E0", "R"];

/// 12 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.11e}")
}

/// A CSV table waiting to be written.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: impl Into<String>, header: &[&'static str]) -> Self {
        Self {
            name: name.into(),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn write(&self, dir: &Path, prefix: &str) -> Result<PathBuf, RunError> {
        let path = dir.join(format!("{prefix}{}.csv", self.name));
        let io = |e: &dyn fmt::Display| RunError::Io {
            path: path.clone(),
            reason: e.to_string(),
        };
        let mut w = csv::Writer::from_path(&path).map_err(|e| io(&e))?;
        w.write_record(&self.header).map_err(|e| io(&e))?;
        for row in &self.rows {
            w.write_record(row).map_err(|e| io(&e))?;
        }
        w.flush().map_err(|e| io(&e))?;
        Ok(path)
    }
}

/// Computes the tables for `command` without touching the file system.
pub fn tables(command: Command, cfg: &ExperimentConfig) -> Result<Vec<Table>, RunError> {
    let model_err = |source| RunError::Model { command, source };
    match command {
        Command::Spectrum => {
            let mut out = Vec::new();
            for &side in &cfg.sides {
                let cube = cfg.model.cube_for_side(side).map_err(model_err)?;
                let field = sample_field(&cfg.disorder, cube.single_particle_sites(), cfg.task.realization)
                    .map_err(model_err)?;
                let h = BoxOperators::new(&cfg.model, cube)
                    .and_then(|ops| ops.hamiltonian(&field, true))
                    .map_err(model_err)?;
                let s = spectrum(&h, &EigenOptions::default()).map_err(model_err)?;
                let mut t = Table::new(format!("spectrum_L{side}"), &SPECTRUM_HEADER);
                t.rows = s
                    .eigenvalues
                    .iter()
                    .enumerate()
                    .map(|(i, &e)| vec![i.to_string(), fmt_float(e)])
                    .collect();
                out.push(t);
            }
            Ok(out)
        }
        Command::Ids => Ok(vec![ids_table(&ids_curve(cfg).map_err(model_err)?)]),
        Command::Fit => {
            let curve = ids_curve(cfg).map_err(model_err)?;
            let fit = fit_lifshitz(&curve, cfg.task.e0, cfg.task.fit_window).map_err(model_err)?;
            let mut t = Table::new("fit", &FIT_HEADER);
            t.rows.push(
                [fit.slope, fit.gamma_hat, fit.window_lo, fit.window_hi, fit.residual_rms]
                    .iter()
                    .map(|&v| fmt_float(v))
                    .collect(),
            );
            Ok(vec![t, ids_table(&curve)])
        }
        Command::Compare => {
            let (energies, fixed) = match cfg.task.probe {
                Probe::Fixed(e) => (vec![e], Some(0)),
                Probe::Auto { .. } => (cfg.task.energies.values(), None),
            };
            let paired = paired_ids(&cfg.model, &cfg.sides, &energies, &cfg.disorder).map_err(model_err)?;
            let index = match (fixed, cfg.task.probe) {
                (Some(i), _) => i,
                (None, Probe::Auto { lo, hi }) => {
                    let free = paired.free_curve();
                    let (largest, _) = free.largest().expect("side list is non-empty");
                    select_probe_energy(&energies, &free.normalized(largest), lo, hi)
                        .ok_or_else(|| RunError::Task {
                            command,
                            reason: format!(
                                "no grid energy puts the free normalized IDS of the largest box in [{lo}, {hi}]; refine task.e_min/e_max/e_points"
                            ),
                        })?
                        .0
                }
                (None, Probe::Fixed(_)) => unreachable!(),
            };
            let mut t = Table::new("compare", &COMPARE_HEADER);
            t.rows = paired
                .compare_at(index)
                .iter()
                .map(|r| {
                    [r.side, r.energy, r.interacting, r.free, r.delta, r.stderr]
                        .iter()
                        .map(|&v| fmt_float(v))
                        .collect()
                })
                .collect();
            Ok(vec![t])
        }
        Command::Weyl => {
            let mut t = Table::new("weyl", &WEYL_HEADER);
            for &m in &cfg.task.weyl_m_list {
                let row = weyl_probe(&cfg.model, cfg.task.weyl_k, m, &cfg.disorder, cfg.task.realization)
                    .map_err(model_err)?;
                t.rows.push(vec![
                    row.k.to_string(),
                    row.m.to_string(),
                    fmt_float(row.quotient),
                    fmt_float(row.residual),
                    fmt_float(row.interaction_energy),
                ]);
            }
            Ok(vec![t])
        }
        Command::Edge => {
            let rows = edge_scan(&cfg.model, &cfg.sides, &cfg.disorder, cfg.task.tol).map_err(model_err)?;
            let mut t = Table::new("edge", &EDGE_HEADER);
            t.rows = rows
                .iter()
                .map(|r| {
                    vec![
                        fmt_float(r.side),
                        fmt_float(r.median),
                        fmt_float(r.iqr),
                        r.realizations.to_string(),
                    ]
                })
                .collect();
            Ok(vec![t])
        }
    }
}

fn ids_curve(cfg: &ExperimentConfig) -> anderson_mp::Result<IdsCurve> {
    estimate_ids(&cfg.model, &cfg.sides, &cfg.task.energies.values(), &cfg.disorder)
}

fn ids_table(curve: &IdsCurve) -> Table {
    let mut t = Table::new("ids", &IDS_HEADER);
    for r in &curve.records {
        for (i, &e) in curve.energies.iter().enumerate() {
            t.rows.push(vec![
                fmt_float(r.side),
                fmt_float(e),
                fmt_float(r.mean[i]),
                fmt_float(r.stderr[i]),
                r.realizations.to_string(),
            ]);
        }
    }
    t
}

/// Runs `command` and writes its CSV files into `dir`, returning their paths.
pub fn run(command: Command, cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    std::fs::create_dir_all(dir).map_err(|e| RunError::Io {
        path: dir.to_path_buf(),
        reason: e.to_string(),
    })?;
    tables(command, cfg)?
        .iter()
        .map(|t| t.write(dir, &cfg.output.prefix))
        .collect()
}
