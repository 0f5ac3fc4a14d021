//! Self-relative solver benchmark: wall time per quasiphase point as a
//! function of the numerator p. The common period grows linearly with the
//! denominator, so per-point cost should grow roughly linearly in p at a
//! fixed ratio window.

use anyhow::{Context, Result};
use serde_json::json;
use std::time::Instant;

use floq::ghz;
use floq::hamiltonian::build_tls_two_tone;
use floq::twotone::{quasiphase_spectrum, RatioGrid};

use crate::config::ConfigFile;
use crate::output::OutputWriter;

pub fn run(cfg: &ConfigFile, mut writer: OutputWriter) -> Result<()> {
    let q = cfg.quasiphase_scan.as_ref().expect("validated");
    let integrator = cfg.integrator.to_config();
    let omega_d1 = ghz(q.omega_d1_ghz);
    let grid = RatioGrid::new(omega_d1, q.numerators.clone())?
        .with_window(q.window[0], q.window[1])?
        .with_max_points(q.max_points);
    let omega0 = ghz(q.omega0_ghz);
    let eps_d1 = ghz(q.eps_d1_ghz);
    let eps_d2 = ghz(q.eps_d2_ghz);

    let mut rows = Vec::new();
    let mut csv = String::from("p,points,total_s,per_point_s\n");
    for &p in &q.numerators {
        let start = Instant::now();
        let spec = quasiphase_spectrum(
            |omega_d2| build_tls_two_tone(omega0, eps_d1, omega_d1, eps_d2, omega_d2),
            &grid,
            p,
            &integrator,
        )
        .with_context(|| format!("bench scan at p = {p}"))?;
        let total = start.elapsed().as_secs_f64();
        let points = spec.points.len();
        let per_point = if points > 0 { total / points as f64 } else { 0.0 };
        csv.push_str(&format!("{p},{points},{total:.6},{per_point:.9}\n"));
        rows.push((p, points, per_point));
    }
    writer.write_csv("bench.csv", &csv)?;

    // growth factors between doubled numerators present in the list; the
    // scan cost is linear in the common period, so the per-point ratio
    // should stay at ~2x (2.5x allowing overhead)
    let mut growth = Vec::new();
    let mut near_linear = true;
    for &(p, _, t) in &rows {
        if let Some(&(p2, _, t2)) = rows.iter().find(|&&(pp, _, _)| pp == 2 * p) {
            if t > 0.0 {
                let ratio = t2 / t;
                near_linear &= ratio <= 2.5;
                growth.push(json!({
                    "p": p,
                    "p2": p2,
                    "per_point_ratio": ratio,
                    "within_linear_bound": ratio <= 2.5,
                }));
            }
        }
    }
    writer.write_json(
        "bench.json",
        json!({
            "rows": rows.iter().map(|&(p, n, t)| json!({"p": p, "points": n, "per_point_s": t})).collect::<Vec<_>>(),
            "doubling_growth": growth,
            "near_linear_growth": near_linear,
            "note": "timing data; excluded from reproducibility guarantees",
        }),
    )?;
    writer.finish()?;
    Ok(())
}
