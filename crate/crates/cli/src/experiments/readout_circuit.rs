//! Three-mode circuit readout: normal-mode data, pointer trajectory, the
//! longitudinal-shape fit, and optional truncation-doubling checks.

use anyhow::{Context, Result};
use serde_json::json;

use floq::ghz;
use floq::readout::circuit::{fit_longitudinal, KerrCircuit};
use floq::readout::{simulate_circuit_readout, trajectory_to_csv};

use crate::config::{ConfigFile, ReadoutCircuitSection};
use crate::output::OutputWriter;

pub fn circuit_from_section(c: &ReadoutCircuitSection) -> KerrCircuit {
    KerrCircuit {
        omega: [ghz(c.omega_a_ghz), ghz(c.omega_b_ghz), ghz(c.omega_c_ghz)],
        alpha_b: 2.0 * ghz(c.alpha_b_half_ghz),
        alpha_c: 2.0 * ghz(c.alpha_c_half_ghz),
        g_ab: ghz(c.g_ab_ghz),
        g_bc: ghz(c.g_bc_ghz),
        g_ca: ghz(c.g_ca_ghz),
        mod_amp: ghz(c.mod_amp_ghz),
        sidebands: c.sidebands,
        eps_d1: ghz(c.eps_d1_ghz),
        trunc: c.trunc,
    }
}

pub fn run(cfg: &ConfigFile, mut writer: OutputWriter) -> Result<()> {
    let c = cfg.readout_circuit.as_ref().expect("validated");
    let integrator = cfg.integrator.to_config();
    let circ = circuit_from_section(c);
    let kappa = ghz(c.kappa_ghz);
    let t_end = c.t_end_over_inv_kappa / kappa;
    let n = c.samples.max(2);
    let times: Vec<f64> = (0..n).map(|k| t_end * k as f64 / (n - 1) as f64).collect();

    let (pt, normal) = simulate_circuit_readout(&circ, kappa, c.tilt, &times, &integrator)
        .context("circuit readout simulation")?;
    writer.write_csv("trajectory.csv", &trajectory_to_csv(&pt))?;

    writer.write_json(
        "normal_modes.json",
        json!({
            "normal_freqs_ghz": normal.freqs.map(|f| f / ghz(1.0)),
            "hybridization_u": normal.u,
            "alpha_eff_ghz": normal.alpha_eff.map(|a| a / ghz(1.0)),
            "cross_kerr_ghz": normal.chi.map(|row| row.map(|x| x / ghz(1.0))),
            "coupling_weight": normal.coupling_weight(),
            "g_tilde_ghz": normal.coupling_weight().abs() * c.mod_amp_ghz,
        }),
    )?;

    let d_inf = pt.d.iter().cloned().fold(0.0, f64::max).max(1e-300);
    let fit = fit_longitudinal(&pt.times, &pt.d, kappa)?;

    let mut trunc_checks = Vec::new();
    if c.check_truncation {
        for axis in 0..3 {
            let mut doubled = circ;
            doubled.trunc[axis] *= 2;
            let (pt2, _) = simulate_circuit_readout(&doubled, kappa, c.tilt, &times, &integrator)
                .with_context(|| format!("truncation check on factor {axis}"))?;
            let shift = pt
                .d
                .iter()
                .zip(pt2.d.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
                / d_inf;
            trunc_checks.push(json!({
                "factor": axis,
                "doubled_trunc": doubled.trunc,
                "max_shift_over_d_max": shift,
            }));
        }
    }

    writer.write_json(
        "fit.json",
        json!({
            "g_tilde_fit_ghz": fit.g_tilde / ghz(1.0),
            "kappa_eff_fit_ghz": fit.kappa_eff / ghz(1.0),
            "rms_over_d_max": fit.rms / d_inf,
            "d_end": pt.d.last().unwrap(),
            "truncation_checks": trunc_checks,
        }),
    )?;
    writer.finish()?;
    Ok(())
}
