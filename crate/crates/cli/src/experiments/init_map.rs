//! Initialization fidelity maps, threshold boundaries, and the C₁/C₂
//! scaling-law fits.

use anyhow::{Context, Result};
use serde_json::json;

use floq::ghz;
use floq::init::{
    fidelity_map, fit_scaling_law, map_to_csv, min_ramp_time, InitSystem, ProtocolKind,
};

use crate::config::ConfigFile;
use crate::output::OutputWriter;

fn log_grid(range: [f64; 2], count: usize) -> Vec<f64> {
    let n = count.max(2);
    (0..n)
        .map(|k| {
            let f = k as f64 / (n - 1) as f64;
            range[0] * (range[1] / range[0]).powf(f)
        })
        .collect()
}

fn kind_tag(kind: ProtocolKind) -> &'static str {
    match kind {
        ProtocolKind::Adiabatic => "adiabatic",
        ProtocolKind::Instantaneous => "instantaneous",
    }
}

pub fn run(cfg: &ConfigFile, mut writer: OutputWriter) -> Result<()> {
    let m = cfg.init_map.as_ref().expect("validated");
    let integrator = cfg.integrator.to_config();
    let sys = InitSystem {
        omega0: ghz(m.omega0_ghz),
        eps_d1: ghz(m.eps_d1_ghz),
    };
    let tilts = log_grid(m.tilt_range, m.tilt_count);
    let ramps = log_grid(m.ramp_range_ns, m.ramp_count);

    let mut scaling = Vec::new();
    for &kind in &m.kinds {
        let map = fidelity_map(kind, m.ramp_shape, &tilts, &ramps, &sys, &integrator)
            .with_context(|| format!("{} fidelity map", kind_tag(kind)))?;
        writer.write_csv(&format!("fidelity_map_{}.csv", kind_tag(kind)), &map_to_csv(&map))?;

        if m.boundaries {
            let mut boundary_csv = String::from("target,tilt,t_boundary_ns,fidelity\n");
            let mut fits = Vec::new();
            for &target in &m.targets {
                let mut pts = Vec::new();
                for &tilt in &tilts {
                    match min_ramp_time(
                        kind,
                        m.ramp_shape,
                        tilt,
                        target,
                        (m.ramp_range_ns[0], m.ramp_range_ns[1]),
                        m.boundary_resolution_ns,
                        &sys,
                        &integrator,
                    ) {
                        Ok(r) => {
                            boundary_csv.push_str(&format!(
                                "{:.6},{:.8e},{:.8e},{:.10}\n",
                                target, tilt, r.t_boundary, r.fidelity_at_boundary
                            ));
                            pts.push((tilt, r.t_boundary));
                        }
                        // tilts whose boundary leaves the search window are
                        // recorded as gaps, not failures
                        Err(floq::FloqError::BoundaryNotFound { .. }) => {}
                        Err(e) => return Err(e).context("boundary search"),
                    }
                }
                let fit = fit_scaling_law(&pts);
                fits.push(json!({
                    "target": target,
                    "points": pts,
                    "fit": match &fit {
                        Ok(f) => json!({
                            "c_ns": f.c,
                            "residual": f.residual,
                            "free_slope": f.free_slope,
                        }),
                        Err(e) => json!({ "error": e.to_string() }),
                    },
                }));
            }
            writer.write_csv(&format!("boundaries_{}.csv", kind_tag(kind)), &boundary_csv)?;
            scaling.push(json!({
                "kind": kind_tag(kind),
                "targets": fits,
            }));
        }
    }

    writer.write_json(
        "scaling.json",
        json!({
            "ramp_shape": m.ramp_shape,
            "scaling": scaling,
        }),
    )?;
    writer.finish()?;
    Ok(())
}
