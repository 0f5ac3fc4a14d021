//! One module per figure-level experiment. Each takes the validated
//! config, runs the physics through the library, and emits plot-ready
//! files through [`OutputWriter`].

pub mod bench;
pub mod init_map;
pub mod quasiphase;
pub mod readout_circuit;
pub mod readout_two_body;
pub mod xgate;

use anyhow::Result;
use std::path::Path;

use crate::config::{ConfigFile, ExperimentKind};
use crate::output::OutputWriter;

pub fn run(cfg: &ConfigFile, out_dir: &Path) -> Result<()> {
    let writer = OutputWriter::new(out_dir, cfg.experiment.as_str(), cfg.resolved_json())?;
    match cfg.experiment {
        ExperimentKind::Xgate => xgate::run(cfg, writer),
        ExperimentKind::QuasiphaseScan => quasiphase::run(cfg, writer),
        ExperimentKind::ReadoutTwoBody => readout_two_body::run(cfg, writer),
        ExperimentKind::ReadoutCircuit => readout_circuit::run(cfg, writer),
        ExperimentKind::InitMap => init_map::run(cfg, writer),
        ExperimentKind::SolverBench => bench::run(cfg, writer),
    }
}

/// Format a tilt for use in file names (0.005 → "0p005").
pub(crate) fn tilt_tag(tilt: f64) -> String {
    format!("{tilt}").replace('.', "p").replace('-', "m")
}
