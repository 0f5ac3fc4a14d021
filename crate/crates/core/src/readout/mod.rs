//! Longitudinal Floquet-qubit readout: open-system pointer dynamics, the
//! closed-form longitudinal and dispersive responses, and the SNR figure
//! of merit.
//!
//! The two-body model couples the driven qubit to a cavity through a
//! transversal coupling modulated at both sidebands ω_r ± ω₀. In the
//! Floquet frame this engineers a longitudinal interaction
//! ≈ (g̃/2)(a + a†)σz^F, so the two pointer states displace in opposite
//! directions and the separation D(t) = |⟨a⟩₀ − ⟨a⟩₁| saturates at
//! D(∞) = 2g̃/κ following the (1 − e^{−κt/2}) law. Detuning the qubit
//! drive (tilt Δ/ε_d1) detunes the effective modulation sidebands by Δ
//! and degrades the trajectory toward suboptimal readout.

pub mod circuit;
pub mod lindblad;

pub use circuit::{normal_mode_reduce, simulate_circuit_readout, KerrCircuit, NormalModeData};
pub use lindblad::{lindblad_evolve, lindblad_observe, min_eigenvalue, LindbladMethod, LindbladModel};

use num_complex::Complex64 as C64;

use crate::error::{FloqError, Result};
use crate::floquet::{floquet_decompose, LabelPolicy};
use crate::hamiltonian::build_qubit_cavity;
use crate::hilbert::{annihilation, expectation, identity, tensor_with_cap, HilbertSpace, Operator, StateVector};
use crate::propagator::IntegratorConfig;

/// Physical parameters recorded with a pointer trajectory.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct PointerParams {
    /// Effective longitudinal amplitude entering D(∞) = g_eff/κ.
    pub g_eff: f64,
    pub kappa: f64,
    pub tilt: f64,
}

/// Cavity field expectations conditioned on the two Floquet-qubit initial
/// states, and the derived pointer separation.
#[derive(Debug, Clone)]
pub struct PointerTrajectory {
    pub times: Vec<f64>,
    pub a0: Vec<C64>,
    pub a1: Vec<C64>,
    pub d: Vec<f64>,
    pub params: PointerParams,
}

impl PointerTrajectory {
    /// Predicted steady-state separation g_eff/κ.
    pub fn d_inf_predicted(&self) -> f64 {
        self.params.g_eff / self.params.kappa
    }
}

/// Run the two Lindblad evolutions and assemble D(t).
///
/// `init0`/`init1` are full initial states whose cavity factor must be in
/// vacuum; `cavity_factor` names the tensor factor carrying ⟨a⟩.
pub fn pointer_separation(
    model: &LindbladModel,
    init0: &StateVector,
    init1: &StateVector,
    cavity_factor: usize,
    times: &[f64],
    cfg: &IntegratorConfig,
    params: PointerParams,
) -> Result<PointerTrajectory> {
    let dims = model.hamiltonian().space().factor_dims().to_vec();
    if cavity_factor >= dims.len() {
        return Err(FloqError::InvalidParameter(format!(
            "cavity factor {cavity_factor} out of range"
        )));
    }
    let a_full = embed_on_factor(&dims, cavity_factor, &annihilation(dims[cavity_factor])?)?;
    let n_full = embed_on_factor(
        &dims,
        cavity_factor,
        &{
            let a = annihilation(dims[cavity_factor])?;
            a.dagger().mul(&a)?
        },
    )?;
    for (name, st) in [("init0", init0), ("init1", init1)] {
        let n = expectation(st, &n_full)?;
        if n.re.abs() > 1e-9 {
            return Err(FloqError::InvalidState(format!(
                "{name}: cavity factor not in vacuum (⟨n⟩ = {:.3e})",
                n.re
            )));
        }
    }
    let recs = lindblad_observe(
        model,
        &[init0.outer(), init1.outer()],
        times,
        &[&a_full],
        cfg,
        LindbladMethod::SplitChannel,
    )?;
    let a0 = recs[0][0].clone();
    let a1 = recs[1][0].clone();
    let d: Vec<f64> = a0.iter().zip(a1.iter()).map(|(x, y)| (x - y).norm()).collect();
    Ok(PointerTrajectory {
        times: times.to_vec(),
        a0,
        a1,
        d,
        params,
    })
}

fn embed_on_factor(dims: &[usize], factor: usize, op: &Operator) -> Result<Operator> {
    let mut ops: Vec<Operator> = Vec::with_capacity(dims.len());
    for (k, &d) in dims.iter().enumerate() {
        if k == factor {
            ops.push(op.clone());
        } else {
            ops.push(identity(&HilbertSpace::new(vec![d])?));
        }
    }
    let refs: Vec<&Operator> = ops.iter().collect();
    tensor_with_cap(&refs, usize::MAX)
}

/// The two-body readout experiment: driven TLS + cavity with modulated
/// transversal coupling, cavity decay κ.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct TwoBodyReadout {
    /// Qubit frequency (rad/ns).
    pub omega0: f64,
    /// Rabi drive amplitude (rad/ns).
    pub eps_d1: f64,
    /// Tilt ratio Δ/ε_d1; sets ω_d1 = ω₀ − Δ.
    pub tilt: f64,
    /// Cavity frequency (rad/ns).
    pub omega_r: f64,
    /// Modulation amplitude g̃ of g(t) = g̃[cos((ω_r−ω₀)t) + cos((ω_r+ω₀)t)].
    pub g_mod: f64,
    /// Cavity decay rate (rad/ns).
    pub kappa: f64,
    pub cavity_dim: usize,
}

impl TwoBodyReadout {
    pub fn omega_d1(&self) -> f64 {
        self.omega0 - self.tilt * self.eps_d1
    }

    /// Both sidebands driven: the engineered longitudinal Hamiltonian is
    /// (g̃/2)(a+a†)σz^F, giving D(∞) = 2g̃/κ.
    pub fn g_eff(&self) -> f64 {
        2.0 * self.g_mod
    }

    /// Simulate D(t) from the laboratory-frame model, starting each run in
    /// |φ_j(0)⟩ ⊗ |vac⟩ with the exact Floquet modes of the driven qubit.
    pub fn run(&self, times: &[f64], cfg: &IntegratorConfig) -> Result<PointerTrajectory> {
        let omega_d1 = self.omega_d1();
        let h = build_qubit_cavity(
            self.omega0,
            self.eps_d1,
            omega_d1,
            self.omega_r,
            self.g_mod,
            self.cavity_dim,
        )?;
        // Floquet modes of the bare driven qubit
        let hq = crate::hamiltonian::build_tls_rabi(
            self.omega0,
            crate::hamiltonian::Envelope::Constant { amplitude: self.eps_d1 },
            omega_d1,
        )?;
        let sol = floquet_decompose(&hq, omega_d1, cfg, &[], LabelPolicy::default())?;
        let vac = StateVector::basis(HilbertSpace::fock(self.cavity_dim)?, 0)?;
        let init0 = sol.modes[0][0].kron(&vac)?;
        let init1 = sol.modes[0][1].kron(&vac)?;
        let model = LindbladModel::with_cavity_decay(h, 1, self.kappa)?;
        pointer_separation(
            &model,
            &init0,
            &init1,
            1,
            times,
            cfg,
            PointerParams {
                g_eff: self.g_eff(),
                kappa: self.kappa,
                tilt: self.tilt,
            },
        )
    }
}

/// Ideal longitudinal separation D(t) = (g̃/κ)(1 − e^{−κt/2}).
pub fn longitudinal_d_analytic(g_tilde: f64, kappa: f64, t: f64) -> Result<f64> {
    if kappa <= 0.0 {
        return Err(FloqError::InvalidParameter("κ must be positive".into()));
    }
    Ok(g_tilde / kappa * (1.0 - (-kappa * t / 2.0).exp()))
}

/// Dispersive two-pointer separation from the linear cavity response:
/// α_±(t) = −iε/(κ/2 ± iχ)·(1 − e^{−(κ/2 ± iχ)t}), D = |α₊ − α₋|.
pub fn dispersive_d_analytic(chi: f64, kappa: f64, eps_probe: f64, t: f64) -> Result<f64> {
    if kappa <= 0.0 || eps_probe < 0.0 {
        return Err(FloqError::InvalidParameter(
            "dispersive model needs κ > 0 and ε ≥ 0".into(),
        ));
    }
    let alpha = |sign: f64| -> C64 {
        let denom = C64::new(kappa / 2.0, sign * chi);
        let decay = (-denom * t).exp();
        C64::new(0.0, -eps_probe) / denom * (C64::new(1.0, 0.0) - decay)
    };
    Ok((alpha(1.0) - alpha(-1.0)).norm())
}

/// Dispersive readout preceded by an adiabatic mapping stage of length
/// `t_map`: the pointer separation is zero during the mapping dead time.
pub fn dispersive_d_delayed(
    chi: f64,
    kappa: f64,
    eps_probe: f64,
    t_map: f64,
    t: f64,
) -> Result<f64> {
    if t < t_map {
        Ok(0.0)
    } else {
        dispersive_d_analytic(chi, kappa, eps_probe, t - t_map)
    }
}

/// SNR(T) = √(2κ ∫₀ᵀ D(t)² dt) by trapezoidal quadrature on the sampled
/// trajectory (linear interpolation at T).
pub fn snr(times: &[f64], d: &[f64], kappa: f64, t_meas: f64) -> Result<f64> {
    if times.len() != d.len() || times.len() < 2 {
        return Err(FloqError::InvalidParameter(
            "snr needs matching time/D arrays with ≥ 2 samples".into(),
        ));
    }
    if t_meas < times[0] || t_meas > *times.last().unwrap() + 1e-12 {
        return Err(FloqError::InvalidParameter(format!(
            "measurement time {t_meas} outside sampled range [{}, {}]",
            times[0],
            times.last().unwrap()
        )));
    }
    let mut integral = 0.0;
    for w in 0..times.len() - 1 {
        let (ta, tb) = (times[w], times[w + 1]);
        if ta >= t_meas {
            break;
        }
        let (fa, fb) = (d[w] * d[w], d[w + 1] * d[w + 1]);
        if tb <= t_meas {
            integral += 0.5 * (fa + fb) * (tb - ta);
        } else {
            // partial cell ending exactly at t_meas
            let frac = (t_meas - ta) / (tb - ta);
            let fm = fa + (fb - fa) * frac;
            integral += 0.5 * (fa + fm) * (t_meas - ta);
            break;
        }
    }
    Ok((2.0 * kappa * integral).sqrt())
}

/// CSV rows (t_ns, ReA0, ImA0, ReA1, ImA1, D, D_over_Dinf).
pub fn trajectory_to_csv(pt: &PointerTrajectory) -> String {
    let d_inf = pt.d_inf_predicted();
    let mut out = String::from("t_ns,ReA0,ImA0,ReA1,ImA1,D,D_over_Dinf\n");
    for (k, t) in pt.times.iter().enumerate() {
        out.push_str(&format!(
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
            t,
            pt.a0[k].re,
            pt.a0[k].im,
            pt.a1[k].re,
            pt.a1[k].im,
            pt.d[k],
            pt.d[k] / d_inf
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ghz;
    use approx::assert_abs_diff_eq;

    #[test]
    fn longitudinal_formula_limits() {
        let (g, k) = (ghz(0.01), ghz(0.05));
        assert_abs_diff_eq!(longitudinal_d_analytic(g, k, 0.0).unwrap(), 0.0, epsilon = 1e-15);
        let d_inf = longitudinal_d_analytic(g, k, 1e9).unwrap();
        assert_abs_diff_eq!(d_inf, g / k, epsilon = 1e-12);
        // half saturation at t = 2 ln 2 / κ
        let d_half = longitudinal_d_analytic(g, k, 2.0 * 2f64.ln() / k).unwrap();
        assert_abs_diff_eq!(d_half, g / k / 2.0, epsilon = 1e-12);
        assert!(longitudinal_d_analytic(g, 0.0, 1.0).is_err());
    }

    #[test]
    fn dispersive_formula_limits() {
        let k = ghz(0.05);
        let eps = ghz(0.01);
        // χ = 0: pointers identical
        for &t in &[0.0, 3.0, 50.0] {
            assert_abs_diff_eq!(dispersive_d_analytic(0.0, k, eps, t).unwrap(), 0.0, epsilon = 1e-14);
        }
        // steady state: D(∞) = 2εχ·... from |1/(κ/2+iχ) − 1/(κ/2−iχ)| = 2χ/((κ/2)²+χ²)
        let chi = k / 2.0;
        let d_inf = dispersive_d_analytic(chi, k, eps, 1e9).unwrap();
        let expect = eps * 2.0 * chi / ((k / 2.0).powi(2) + chi * chi);
        assert_abs_diff_eq!(d_inf, expect, epsilon = 1e-10);
        // delayed variant
        assert_abs_diff_eq!(
            dispersive_d_delayed(chi, k, eps, 30.0, 10.0).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        let shifted = dispersive_d_delayed(chi, k, eps, 30.0, 42.0).unwrap();
        assert_abs_diff_eq!(
            shifted,
            dispersive_d_analytic(chi, k, eps, 12.0).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn snr_constant_and_zero_cases() {
        let kappa = ghz(0.05);
        let times: Vec<f64> = (0..=100).map(|k| 0.2 * k as f64).collect();
        let d_const = 0.7;
        let d: Vec<f64> = times.iter().map(|_| d_const).collect();
        let t_meas = 20.0;
        let got = snr(&times, &d, kappa, t_meas).unwrap();
        let expect = (2.0 * kappa * t_meas).sqrt() * d_const;
        assert_abs_diff_eq!(got, expect, epsilon = 1e-10);
        assert_abs_diff_eq!(snr(&times, &d, kappa, 0.0).unwrap(), 0.0, epsilon = 1e-15);
        assert!(snr(&times, &d, kappa, 100.0).is_err());
    }

    #[test]
    fn snr_of_longitudinal_matches_closed_form() {
        // ∫ D² dt with D = (g/κ)(1 − e^{−κt/2}) has the antiderivative
        // (g/κ)²[t − (4/κ)(1−e^{−κt/2}) + (1/κ)(1−e^{−κt})]
        let (g, kappa) = (ghz(0.01), ghz(0.05));
        for &kt in &[0.5, 1.0, 5.0] {
            let t_meas = kt / kappa;
            let times: Vec<f64> = (0..=4000).map(|k| t_meas * k as f64 / 4000.0).collect();
            let d: Vec<f64> = times
                .iter()
                .map(|&t| longitudinal_d_analytic(g, kappa, t).unwrap())
                .collect();
            let got = snr(&times, &d, kappa, t_meas).unwrap();
            let integral = (g / kappa).powi(2)
                * (t_meas - 4.0 / kappa * (1.0 - (-kappa * t_meas / 2.0).exp())
                    + 1.0 / kappa * (1.0 - (-kappa * t_meas).exp()));
            let expect = (2.0 * kappa * integral).sqrt();
            assert!(
                (got - expect).abs() / expect < 1e-6,
                "κT = {kt}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn snr_monotone_in_measurement_time() {
        let kappa = ghz(0.05);
        let times: Vec<f64> = (0..=200).map(|k| 0.25 * k as f64).collect();
        let d: Vec<f64> = times
            .iter()
            .map(|&t| longitudinal_d_analytic(ghz(0.01), kappa, t).unwrap())
            .collect();
        let mut prev = 0.0;
        for &t in &[1.0, 5.0, 10.0, 25.0, 50.0] {
            let s = snr(&times, &d, kappa, t).unwrap();
            assert!(s >= prev);
            prev = s;
        }
    }

    #[test]
    fn uncoupled_pointer_separation_is_zero() {
        let exp = TwoBodyReadout {
            omega0: ghz(5.02),
            eps_d1: ghz(0.21),
            tilt: 0.005,
            omega_r: ghz(7.0),
            g_mod: 0.0,
            kappa: ghz(0.05),
            cavity_dim: 4,
        };
        let times: Vec<f64> = (0..=10).map(|k| 0.5 * k as f64).collect();
        let pt = exp.run(&times, &IntegratorConfig::default()).unwrap();
        assert!(pt.d.iter().all(|&d| d < 1e-9), "max D = {:?}", pt.d.iter().cloned().fold(0.0, f64::max));
        assert_abs_diff_eq!(pt.d[0], 0.0, epsilon = 1e-12);
    }
}
