//! X-gate on the Floquet qubit: a flat-top second drive along σz at the
//! anticrossing frequency drives Rabi oscillations between the Floquet
//! modes of the always-on Rabi drive.
//!
//! The pulse is calibrated numerically: the hold time starts from the
//! rotating-frame area estimate θ = ε_d2·(hold + ramp) = π (the σz matrix
//! element between equatorial Floquet modes is 1) and is then refined by
//! maximizing the simulated transfer. The drive frequency can be refined
//! the same way around the extraction interval.

use serde::Serialize;

use crate::error::Result;
use crate::floquet::{floquet_decompose, floquet_population, FloquetSolution, LabelPolicy};
use crate::hamiltonian::{
    build_tls_rabi, DriveTone, DrivenHamiltonian, Envelope, RampShape,
};
use crate::hilbert::pauli_z;
use crate::propagator::{evolve_state, IntegratorConfig};

/// X-gate pulse parameters; frequencies in rad/ns, times in ns.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct XGateProtocol {
    pub omega0: f64,
    pub eps_d1: f64,
    pub omega_d1: f64,
    pub eps_d2: f64,
    pub omega_d2: f64,
    pub ramp_ns: f64,
    pub hold_ns: f64,
    pub shape: RampShape,
}

impl XGateProtocol {
    pub fn total_duration(&self) -> f64 {
        2.0 * self.ramp_ns + self.hold_ns
    }

    fn second_tone_envelope(&self) -> Envelope {
        Envelope::FlatTop {
            plateau: self.eps_d2,
            ramp_up_ns: self.ramp_ns,
            hold_ns: self.hold_ns,
            ramp_down_ns: self.ramp_ns,
            shape: self.shape,
        }
    }

    fn hamiltonian(&self) -> Result<DrivenHamiltonian> {
        let base = build_tls_rabi(
            self.omega0,
            Envelope::Constant { amplitude: self.eps_d1 },
            self.omega_d1,
        )?;
        let mut tones = base.tones().to_vec();
        tones.push(DriveTone::new(
            pauli_z(),
            self.second_tone_envelope(),
            self.omega_d2,
            0.0,
        )?);
        DrivenHamiltonian::new(base.static_part().clone(), tones)
    }

    /// Area-rule starting estimate for the π hold time.
    pub fn hold_estimate(eps_d2: f64, ramp_ns: f64) -> f64 {
        (std::f64::consts::PI / eps_d2 - ramp_ns).max(1.0)
    }
}

/// Time series of the Floquet populations during the gate.
#[derive(Debug, Clone, Serialize)]
pub struct XGateRun {
    pub times: Vec<f64>,
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
    /// Drive envelopes at the sample times (ε_d1 tone, ε_d2 tone).
    pub env1: Vec<f64>,
    pub env2: Vec<f64>,
    pub final_transfer: f64,
}

/// Simulate the gate starting from |φ₀(0)⟩ and record Floquet populations.
pub fn run_xgate(p: &XGateProtocol, samples: usize, cfg: &IntegratorConfig) -> Result<XGateRun> {
    let h = p.hamiltonian()?;
    let hq = build_tls_rabi(
        p.omega0,
        Envelope::Constant { amplitude: p.eps_d1 },
        p.omega_d1,
    )?;
    let t_end = p.total_duration();
    let n = samples.max(2);
    let times: Vec<f64> = (0..n).map(|k| t_end * k as f64 / (n - 1) as f64).collect();

    // logical basis: Floquet modes of the single-tone Hamiltonian, sampled
    // at every needed time within one period
    let period = std::f64::consts::TAU / p.omega_d1;
    let reduced: Vec<f64> = times.iter().map(|t| t.rem_euclid(period)).collect();
    let sol = floquet_decompose(&hq, p.omega_d1, cfg, &reduced, LabelPolicy::default())?;

    let psi0 = sol.modes[0][0].clone();
    let states = evolve_state(&h, &psi0, &times, cfg)?;

    let mut p0 = Vec::with_capacity(n);
    let mut p1 = Vec::with_capacity(n);
    for (t, s) in times.iter().zip(states.iter()) {
        let pops = measure(&sol, s, *t)?;
        p0.push(pops.0);
        p1.push(pops.1);
    }
    let env2 = p.second_tone_envelope();
    Ok(XGateRun {
        env1: times.iter().map(|_| p.eps_d1).collect(),
        env2: times.iter().map(|&t| env2.value(t)).collect(),
        final_transfer: p1[n - 1],
        times,
        p0,
        p1,
    })
}

fn measure(sol: &FloquetSolution, s: &crate::hilbert::StateVector, t: f64) -> Result<(f64, f64)> {
    let pops = floquet_population(s, sol, t)?;
    Ok((pops.populations[0], pops.populations[1]))
}

/// Transfer after the full pulse only (no intermediate samples).
pub fn final_transfer(p: &XGateProtocol, cfg: &IntegratorConfig) -> Result<f64> {
    let run = run_xgate(p, 2, cfg)?;
    Ok(run.final_transfer)
}

/// Refine the hold time by maximizing the transfer (golden section around
/// the area-rule estimate).
pub fn calibrate_hold(p: &XGateProtocol, cfg: &IntegratorConfig) -> Result<XGateProtocol> {
    let guess = XGateProtocol::hold_estimate(p.eps_d2, p.ramp_ns);
    let (mut lo, mut hi) = (0.55 * guess, 1.45 * guess);
    let phi = 0.618_033_988_749_894_8;
    let eval = |hold: f64| -> Result<f64> {
        let mut q = *p;
        q.hold_ns = hold;
        final_transfer(&q, cfg)
    };
    let mut m1 = hi - phi * (hi - lo);
    let mut m2 = lo + phi * (hi - lo);
    let mut f1 = eval(m1)?;
    let mut f2 = eval(m2)?;
    for _ in 0..18 {
        if f1 > f2 {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - phi * (hi - lo);
            f1 = eval(m1)?;
        } else {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + phi * (hi - lo);
            f2 = eval(m2)?;
        }
    }
    let mut out = *p;
    out.hold_ns = 0.5 * (lo + hi);
    Ok(out)
}

/// Refine ω_d2 by maximizing the transfer over ± `half_width` around the
/// starting frequency, re-using the calibrated hold time.
pub fn tune_frequency(
    p: &XGateProtocol,
    half_width: f64,
    cfg: &IntegratorConfig,
) -> Result<XGateProtocol> {
    let (mut lo, mut hi) = (p.omega_d2 - half_width, p.omega_d2 + half_width);
    let phi = 0.618_033_988_749_894_8;
    let eval = |w: f64| -> Result<f64> {
        let mut q = *p;
        q.omega_d2 = w;
        final_transfer(&q, cfg)
    };
    let mut m1 = hi - phi * (hi - lo);
    let mut m2 = lo + phi * (hi - lo);
    let mut f1 = eval(m1)?;
    let mut f2 = eval(m2)?;
    for _ in 0..14 {
        if f1 > f2 {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - phi * (hi - lo);
            f1 = eval(m1)?;
        } else {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + phi * (hi - lo);
            f2 = eval(m2)?;
        }
    }
    let mut out = *p;
    out.omega_d2 = 0.5 * (lo + hi);
    Ok(out)
}
