//! Time-dependent Hamiltonians as a static part plus cosine drive tones
//! with amplitude envelopes.
//!
//! `H(t) = H_static + Σ_k env_k(t)·cos(ω_k t + φ_k)·O_k`
//!
//! Times in ns, angular frequencies in rad/ns. Phases default to zero
//! (drives are written as pure cosines).

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{FloqError, Result};
use crate::hilbert::{annihilation, identity, pauli_x, pauli_z, tensor, HilbertSpace, Operator};

/// Default steepness of the normalized tanh ramp; yields ≥ 0.999 of the
/// plateau at the nominal ramp time while starting at exactly zero.
pub const TANH_STEEPNESS: f64 = 8.0;

/// Ramp shape for shaped envelopes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RampShape {
    Linear,
    Tanh,
}

/// Drive-amplitude envelope. Values are clamped to [0, plateau].
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Envelope {
    Constant {
        amplitude: f64,
    },
    /// Linear rise from 0 to `plateau` over `ramp_ns`, then flat.
    LinearRamp {
        plateau: f64,
        ramp_ns: f64,
    },
    /// Normalized tanh rise: exactly 0 at t = 0, exactly `plateau` at
    /// t = ramp_ns, ≥ 0.999·plateau from slightly before that.
    TanhRamp {
        plateau: f64,
        ramp_ns: f64,
    },
    /// Continuous ramp-up / hold / ramp-down pulse.
    FlatTop {
        plateau: f64,
        ramp_up_ns: f64,
        hold_ns: f64,
        ramp_down_ns: f64,
        shape: RampShape,
    },
    /// Off for `delay_ns`, then a rise over `rise_ns` to the plateau: the
    /// abrupt switch-on used by the instantaneous initialization protocol.
    DelayedRise {
        plateau: f64,
        delay_ns: f64,
        rise_ns: f64,
        shape: RampShape,
    },
}

fn tanh_rise(x: f64) -> f64 {
    // normalized so tanh_rise(0) = 0 and tanh_rise(1) = 1
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let s = TANH_STEEPNESS;
    let lo = (-s / 2.0).tanh();
    let hi = (s / 2.0).tanh();
    ((s * (x - 0.5)).tanh() - lo) / (hi - lo)
}

fn linear_rise(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

impl Envelope {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Envelope::Constant { amplitude } => *amplitude,
            Envelope::LinearRamp { plateau, ramp_ns } => plateau * linear_rise(t / ramp_ns),
            Envelope::TanhRamp { plateau, ramp_ns } => plateau * tanh_rise(t / ramp_ns),
            Envelope::FlatTop {
                plateau,
                ramp_up_ns,
                hold_ns,
                ramp_down_ns,
                shape,
            } => {
                let rise = match shape {
                    RampShape::Linear => linear_rise,
                    RampShape::Tanh => tanh_rise,
                };
                if t < *ramp_up_ns {
                    plateau * rise(t / ramp_up_ns)
                } else if t < ramp_up_ns + hold_ns {
                    *plateau
                } else {
                    plateau * rise((ramp_up_ns + hold_ns + ramp_down_ns - t) / ramp_down_ns)
                }
            }
            Envelope::DelayedRise {
                plateau,
                delay_ns,
                rise_ns,
                shape,
            } => {
                let rise = match shape {
                    RampShape::Linear => linear_rise,
                    RampShape::Tanh => tanh_rise,
                };
                plateau * rise((t - delay_ns) / rise_ns)
            }
        }
    }

    pub fn plateau(&self) -> f64 {
        match self {
            Envelope::Constant { amplitude } => *amplitude,
            Envelope::LinearRamp { plateau, .. } => *plateau,
            Envelope::TanhRamp { plateau, .. } => *plateau,
            Envelope::FlatTop { plateau, .. } => *plateau,
            Envelope::DelayedRise { plateau, .. } => *plateau,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Envelope::Constant { .. })
    }
}

/// One cosine drive tone acting through a Hermitian operator.
#[derive(Debug, Clone)]
pub struct DriveTone {
    pub op: Operator,
    pub envelope: Envelope,
    /// Angular frequency, rad/ns.
    pub frequency: f64,
    pub phase: f64,
}

impl DriveTone {
    pub fn new(op: Operator, envelope: Envelope, frequency: f64, phase: f64) -> Result<Self> {
        if frequency < 0.0 {
            return Err(FloqError::InvalidParameter(format!(
                "tone frequency {frequency} < 0"
            )));
        }
        if !op.is_hermitian() {
            return Err(FloqError::InvalidParameter(
                "drive tone operator must be Hermitian".into(),
            ));
        }
        Ok(Self {
            op,
            envelope,
            frequency,
            phase,
        })
    }
}

/// Static operator plus drive tones; all on one Hilbert space.
#[derive(Debug, Clone)]
pub struct DrivenHamiltonian {
    static_part: Operator,
    tones: Vec<DriveTone>,
}

impl DrivenHamiltonian {
    pub fn new(static_part: Operator, tones: Vec<DriveTone>) -> Result<Self> {
        if !static_part.is_hermitian() {
            return Err(FloqError::InvalidParameter(
                "static part must be Hermitian".into(),
            ));
        }
        for tone in &tones {
            if tone.op.space() != static_part.space() {
                return Err(FloqError::SpaceMismatch(
                    "drive tone operator space differs from the static part".into(),
                ));
            }
        }
        Ok(Self { static_part, tones })
    }

    pub fn space(&self) -> &HilbertSpace {
        self.static_part.space()
    }

    pub fn dim(&self) -> usize {
        self.static_part.dim()
    }

    pub fn static_part(&self) -> &Operator {
        &self.static_part
    }

    pub fn tones(&self) -> &[DriveTone] {
        &self.tones
    }

    /// H(t) as an [`Operator`] (tags recomputed).
    pub fn evaluate(&self, t: f64) -> Operator {
        Operator::new(self.space().clone(), self.evaluate_matrix(t)).unwrap()
    }

    /// H(t) as a raw matrix; the hot path used by the integrators.
    pub fn evaluate_matrix(&self, t: f64) -> Array2<C64> {
        let mut m = self.static_part.matrix().clone();
        for tone in &self.tones {
            let amp = tone.envelope.value(t) * (tone.frequency * t + tone.phase).cos();
            if amp != 0.0 {
                m.zip_mut_with(tone.op.matrix(), |acc, &o| *acc += o * C64::new(amp, 0.0));
            }
        }
        m
    }

    /// Largest tone frequency (rad/ns), or None if undriven.
    pub fn max_tone_frequency(&self) -> Option<f64> {
        self.tones
            .iter()
            .map(|t| t.frequency)
            .filter(|f| *f > 0.0)
            .fold(None, |acc, f| Some(acc.map_or(f, |a: f64| a.max(f))))
    }

    /// Replace every envelope by its plateau value.
    pub fn with_constant_envelopes(&self) -> DrivenHamiltonian {
        let tones = self
            .tones
            .iter()
            .map(|t| DriveTone {
                op: t.op.clone(),
                envelope: Envelope::Constant {
                    amplitude: t.envelope.plateau(),
                },
                frequency: t.frequency,
                phase: t.phase,
            })
            .collect();
        DrivenHamiltonian {
            static_part: self.static_part.clone(),
            tones,
        }
    }

    pub fn all_envelopes_constant(&self) -> bool {
        self.tones.iter().all(|t| t.envelope.is_constant())
    }
}

/// Two-tone TLS: (ω₀/2)σz + ε_d1·cos(ω_d1 t)·σx + ε_d2·cos(ω_d2 t)·σz.
///
/// All arguments in rad/ns. A zero amplitude drops the corresponding tone.
pub fn build_tls_two_tone(
    omega0: f64,
    eps_d1: f64,
    omega_d1: f64,
    eps_d2: f64,
    omega_d2: f64,
) -> Result<DrivenHamiltonian> {
    if omega0 <= 0.0 || omega_d1 <= 0.0 || omega_d2 <= 0.0 {
        return Err(FloqError::InvalidParameter(
            "all frequencies must be positive".into(),
        ));
    }
    let sz = pauli_z();
    let static_part = sz.scale(C64::new(omega0 / 2.0, 0.0));
    let mut tones = Vec::new();
    if eps_d1 != 0.0 {
        tones.push(DriveTone::new(
            pauli_x(),
            Envelope::Constant { amplitude: eps_d1 },
            omega_d1,
            0.0,
        )?);
    }
    if eps_d2 != 0.0 {
        tones.push(DriveTone::new(
            sz,
            Envelope::Constant { amplitude: eps_d2 },
            omega_d2,
            0.0,
        )?);
    }
    DrivenHamiltonian::new(static_part, tones)
}

/// Single-tone Rabi TLS: (ω₀/2)σz + env(t)·cos(ω_d1 t)·σx.
pub fn build_tls_rabi(omega0: f64, envelope: Envelope, omega_d1: f64) -> Result<DrivenHamiltonian> {
    let static_part = pauli_z().scale(C64::new(omega0 / 2.0, 0.0));
    let tones = vec![DriveTone::new(pauli_x(), envelope, omega_d1, 0.0)?];
    DrivenHamiltonian::new(static_part, tones)
}

/// Driven qubit transversally coupled to a cavity through a two-sideband
/// modulated coupling:
///
/// `H(t) = (ω₀/2)σz + ε_d1 cos(ω_d1 t)σx + ω_r a†a
///        + g̃[cos((ω_r−ω₀)t) + cos((ω_r+ω₀)t)](a+a†)σx`
///
/// The qubit is the first tensor factor, the cavity the second.
pub fn build_qubit_cavity(
    omega0: f64,
    eps_d1: f64,
    omega_d1: f64,
    omega_r: f64,
    g_mod: f64,
    cavity_dim: usize,
) -> Result<DrivenHamiltonian> {
    let iq = identity(&HilbertSpace::qubit());
    let ic = identity(&HilbertSpace::fock(cavity_dim)?);
    let a = annihilation(cavity_dim)?;
    let x_cav = a.add(&a.dagger())?;

    let sz_full = tensor(&[&pauli_z(), &ic])?;
    let n_full = tensor(&[&iq, &a.dagger().mul(&a)?])?;
    let sx_full = tensor(&[&pauli_x(), &ic])?;
    let coupling_op = tensor(&[&pauli_x(), &x_cav])?;

    let static_part = sz_full
        .scale(C64::new(omega0 / 2.0, 0.0))
        .add(&n_full.scale(C64::new(omega_r, 0.0)))?;

    let mut tones = vec![DriveTone::new(
        sx_full,
        Envelope::Constant { amplitude: eps_d1 },
        omega_d1,
        0.0,
    )?];
    if g_mod != 0.0 {
        let lower = omega_r - omega0;
        if lower <= 0.0 {
            return Err(FloqError::InvalidParameter(
                "ω_r must exceed ω₀ for the lower modulation sideband".into(),
            ));
        }
        for freq in [lower, omega_r + omega0] {
            tones.push(DriveTone::new(
                coupling_op.clone(),
                Envelope::Constant { amplitude: g_mod },
                freq,
                0.0,
            )?);
        }
    }
    DrivenHamiltonian::new(static_part, tones)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ghz;
    use crate::linalg::{dagger, max_abs_diff};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn zero_envelopes_give_static_part() {
        let h = build_tls_two_tone(ghz(5.02), 0.0, ghz(5.0), 0.0, ghz(0.2)).unwrap();
        let m = h.evaluate_matrix(3.7);
        assert!(max_abs_diff(&m, h.static_part().matrix()) < 1e-15);
    }

    #[test]
    fn rabi_tls_at_t0() {
        // cos(0) = 1: off-diagonal equals ε_d1
        let eps = ghz(0.21);
        let h = build_tls_two_tone(ghz(5.02), eps, ghz(5.0), 0.0, ghz(0.2)).unwrap();
        let m = h.evaluate_matrix(0.0);
        assert_abs_diff_eq!(m[(0, 1)].re, eps, epsilon = 1e-12);
        assert_abs_diff_eq!(m[(0, 0)].re, ghz(5.02) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn two_tone_at_half_period_of_second_drive() {
        // t = π/ω_d2: second tone contributes −ε_d2·σz
        let (w0, e1, w1, e2, w2) = (ghz(5.02), ghz(0.21), ghz(5.0), ghz(0.01), ghz(0.2));
        let h = build_tls_two_tone(w0, e1, w1, e2, w2).unwrap();
        let t = PI / w2;
        let m = h.evaluate_matrix(t);
        let expected_diag = w0 / 2.0 - e2;
        assert_abs_diff_eq!(m[(0, 0)].re, expected_diag, epsilon = 1e-9);
        assert_abs_diff_eq!(m[(1, 1)].re, -expected_diag, epsilon = 1e-9);
        assert_abs_diff_eq!(m[(0, 1)].re, e1 * (w1 * t).cos(), epsilon = 1e-9);
    }

    #[test]
    fn second_tone_removal_reduces_to_rabi() {
        let h2 = build_tls_two_tone(ghz(5.02), ghz(0.21), ghz(5.0), 0.0, ghz(0.2)).unwrap();
        let h1 = build_tls_rabi(
            ghz(5.02),
            Envelope::Constant { amplitude: ghz(0.21) },
            ghz(5.0),
        )
        .unwrap();
        for &t in &[0.0, 0.123, 1.7, 19.0] {
            assert!(max_abs_diff(&h2.evaluate_matrix(t), &h1.evaluate_matrix(t)) < 1e-14);
        }
    }

    #[test]
    fn evaluate_is_hermitian_on_sampled_times() {
        let h = build_qubit_cavity(ghz(5.02), ghz(0.21), ghz(5.0), ghz(7.0), ghz(0.005), 6).unwrap();
        for k in 0..40 {
            let t = 0.31 * k as f64;
            let m = h.evaluate_matrix(t);
            assert!(max_abs_diff(&m, &dagger(&m)) < 1e-12);
        }
    }

    #[test]
    fn commensurate_tones_are_periodic_in_common_period() {
        // ω_d2/ω_d1 = 1/10 → ω_GCD = ω_d1/10
        let w1 = ghz(5.0);
        let w2 = w1 / 10.0;
        let h = build_tls_two_tone(ghz(5.02), ghz(0.21), w1, ghz(0.01), w2).unwrap();
        let t_common = 2.0 * PI / (w1 / 10.0);
        for &t in &[0.0, 0.4, 1.11] {
            let m1 = h.evaluate_matrix(t);
            let m2 = h.evaluate_matrix(t + t_common);
            assert!(max_abs_diff(&m1, &m2) < 1e-10);
        }
    }

    #[test]
    fn qubit_cavity_coupling_at_t0() {
        // both sidebands at cos(0): coupling term is 2g̃(a+a†)σx
        let g = ghz(0.005);
        let dim = 4;
        let h = build_qubit_cavity(ghz(5.02), 0.0, ghz(5.0), ghz(7.0), g, dim).unwrap();
        let m = h.evaluate_matrix(0.0);
        let static_m = h.static_part().matrix();
        let coupling = &m - static_m;
        let a = annihilation(dim).unwrap();
        let expect = tensor(&[&pauli_x(), &a.add(&a.dagger()).unwrap()])
            .unwrap()
            .scale(C64::new(2.0 * g, 0.0));
        assert!(max_abs_diff(&coupling, expect.matrix()) < 1e-12);
    }

    #[test]
    fn uncoupled_product_hamiltonian_when_g_zero() {
        let h = build_qubit_cavity(ghz(5.02), ghz(0.21), ghz(5.0), ghz(7.0), 0.0, 4).unwrap();
        assert_eq!(h.tones().len(), 1); // only the qubit drive
    }

    #[test]
    fn tanh_ramp_bounds_and_saturation() {
        let env = Envelope::TanhRamp { plateau: 1.3, ramp_ns: 20.0 };
        assert_eq!(env.value(0.0), 0.0);
        assert_abs_diff_eq!(env.value(20.0), 1.3, epsilon = 1e-12);
        assert!(env.value(19.0) >= 0.999 * 1.3 * 0.999); // ≥ 0.999·plateau near the end
        for k in 0..=100 {
            let v = env.value(0.25 * k as f64);
            assert!((0.0..=1.3 + 1e-12).contains(&v));
        }
    }

    #[test]
    fn flat_top_is_continuous() {
        let env = Envelope::FlatTop {
            plateau: 0.8,
            ramp_up_ns: 10.0,
            hold_ns: 30.0,
            ramp_down_ns: 10.0,
            shape: RampShape::Tanh,
        };
        // scan for jumps
        let mut prev = env.value(0.0);
        for k in 1..=5000 {
            let t = 0.01 * k as f64;
            let v = env.value(t);
            assert!((v - prev).abs() < 0.01, "jump at t = {t}");
            prev = v;
        }
        assert_eq!(env.value(0.0), 0.0);
        assert_abs_diff_eq!(env.value(25.0), 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(env.value(50.0), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn delayed_rise_idles_then_switches() {
        let env = Envelope::DelayedRise {
            plateau: 1.1,
            delay_ns: 8.0,
            rise_ns: 2.0,
            shape: RampShape::Tanh,
        };
        assert_eq!(env.value(0.0), 0.0);
        assert_eq!(env.value(7.9), 0.0);
        assert_abs_diff_eq!(env.value(10.0), 1.1, epsilon = 1e-12);
        assert_abs_diff_eq!(env.value(25.0), 1.1, epsilon = 1e-12);
        for k in 0..=200 {
            let v = env.value(0.06 * k as f64);
            assert!((0.0..=1.1 + 1e-12).contains(&v));
        }
    }

    #[test]
    fn negative_frequency_rejected() {
        let res = DriveTone::new(
            pauli_x(),
            Envelope::Constant { amplitude: 1.0 },
            -1.0,
            0.0,
        );
        assert!(res.is_err());
    }

    #[test]
    fn non_hermitian_tone_rejected() {
        let a = annihilation(3).unwrap();
        let res = DriveTone::new(a, Envelope::Constant { amplitude: 1.0 }, 1.0, 0.0);
        assert!(res.is_err());
    }
}
