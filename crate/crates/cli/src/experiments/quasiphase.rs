//! Quasiphase spectra over commensurate ratios and the anticrossing
//! extraction, with the RWA-convention verdict.

use anyhow::{Context, Result};
use serde_json::json;

use floq::floquet::{rwa_tls, RwaConvention};
use floq::ghz;
use floq::hamiltonian::build_tls_two_tone;
use floq::twotone::{
    extract_anticrossing, quasiphase_spectrum, spectrum_to_csv, QuasiphaseSpectrum, RatioGrid,
};

use crate::config::{ConfigFile, QuasiphaseSection};
use crate::output::OutputWriter;

pub struct ScanOutput {
    pub spectra: Vec<QuasiphaseSpectrum>,
}

pub fn run_scan(q: &QuasiphaseSection, integrator: &floq::propagator::IntegratorConfig) -> Result<ScanOutput> {
    let omega_d1 = ghz(q.omega_d1_ghz);
    let grid = RatioGrid::new(omega_d1, q.numerators.clone())?
        .with_window(q.window[0], q.window[1])?
        .with_max_points(q.max_points);
    let omega0 = ghz(q.omega0_ghz);
    let eps_d1 = ghz(q.eps_d1_ghz);
    let eps_d2 = ghz(q.eps_d2_ghz);
    let mut spectra = Vec::new();
    for &p in &q.numerators {
        let spec = quasiphase_spectrum(
            |omega_d2| build_tls_two_tone(omega0, eps_d1, omega_d1, eps_d2, omega_d2),
            &grid,
            p,
            integrator,
        )?;
        spectra.push(spec);
    }
    Ok(ScanOutput { spectra })
}

pub fn run(cfg: &ConfigFile, mut writer: OutputWriter) -> Result<()> {
    let q = cfg.quasiphase_scan.as_ref().expect("validated");
    let integrator = cfg.integrator.to_config();
    let scan = run_scan(q, &integrator).context("quasiphase scan")?;

    for spec in &scan.spectra {
        writer.write_csv(&format!("spectrum_p{}.csv", spec.p), &spectrum_to_csv(spec))?;
    }

    let omega_d1 = ghz(q.omega_d1_ghz);
    let extraction = extract_anticrossing(&scan.spectra, omega_d1);

    let omega0 = ghz(q.omega0_ghz);
    let eps_d1 = ghz(q.eps_d1_ghz);
    let standard = rwa_tls(omega0, omega_d1, eps_d1, RwaConvention::Standard);
    let unhalved = rwa_tls(omega0, omega_d1, eps_d1, RwaConvention::Unhalved);
    let standard_ratio = standard.gap() / omega_d1;
    let unhalved_ratio = unhalved.gap() / omega_d1;

    let results = match &extraction {
        Ok(res) => {
            let center = res.ratio_center();
            let supported = if (center - standard_ratio).abs() < (center - unhalved_ratio).abs() {
                "standard-halved-amplitude"
            } else {
                "unhalved-amplitude"
            };
            json!({
                "interval_ratio": [res.ratio_low, res.ratio_high],
                "interval_rad_ns": [res.omega_low, res.omega_high],
                "ratio_center": center,
                "omega_d2_center_ghz": res.omega_center() / ghz(1.0),
                "width_ratio": res.ratio_high - res.ratio_low,
                "precision_bound_exact": res.precision_bound_exact,
                "precision_bound_approx": res.precision_bound_approx,
                "final_segments": res.final_segments,
                "rwa_comparison": {
                    "standard_gap_ratio": standard_ratio,
                    "unhalved_gap_ratio": unhalved_ratio,
                    "supported_convention": supported,
                },
                "audit": res.audit,
            })
        }
        Err(e) => json!({
            "error": e.to_string(),
            "rwa_comparison": {
                "standard_gap_ratio": standard_ratio,
                "unhalved_gap_ratio": unhalved_ratio,
            },
        }),
    };
    writer.write_json("anticrossing.json", results)?;
    writer.finish()?;
    extraction.map(|_| ()).context("anticrossing extraction")
}
