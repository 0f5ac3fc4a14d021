//! Shared helpers for integration tests: synthetic quasiphase spectra
//! with analytically known minima.

use floq::twotone::{QuasiphaseSpectrum, SpectrumPoint};

/// Build a spectrum for numerator `p` whose folded quasiphase difference
/// follows `diff(ratio)`; the pair is encoded symmetrically as ±diff/2.
pub fn synthetic_spectrum(
    p: u32,
    window: (f64, f64),
    diff: impl Fn(f64) -> f64,
) -> QuasiphaseSpectrum {
    let q_min = ((p as f64) / window.1).ceil() as u32;
    let q_max = ((p as f64) / window.0).floor() as u32;
    let points = (q_min..=q_max)
        .map(|q| {
            let ratio = p as f64 / q as f64;
            let d = diff(ratio).clamp(0.0, std::f64::consts::PI - 1e-9);
            SpectrumPoint {
                p,
                q,
                ratio,
                phi0: d / 2.0,
                phi1: -d / 2.0,
            }
        })
        .collect();
    QuasiphaseSpectrum {
        p,
        points,
        failures: vec![],
    }
}

/// V-shaped difference with a single minimum at `center`.
pub fn v_shape(center: f64, slope: f64) -> impl Fn(f64) -> f64 {
    move |r: f64| (slope * (r - center)).abs().min(1.4)
}
