//! Time-ordered unitary propagation of [`DrivenHamiltonian`]s.
//!
//! The default method is a commutator-free fourth-order Magnus scheme on
//! uniform substeps: each substep applies two exponentials of Hermitian
//! combinations of the Hamiltonian at the two Gauss-Legendre nodes, so the
//! result is unitary by construction. The substep count is tied to the
//! fastest drive tone and refined by step doubling until the Richardson
//! error estimate drops below the configured tolerance.
//!
//! An adaptive Dormand-Prince 5(4) integrator on the Schrödinger equation
//! is available as an alternative method; it is not structurally unitary
//! and serves as an independent cross-check.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;

use crate::error::{FloqError, Result};
use crate::hamiltonian::DrivenHamiltonian;
use crate::hilbert::{Operator, StateVector};
use crate::hamiltonian::Envelope;
use crate::linalg::{dagger, expm_i_hermitian, mat2_mul, expm_i_mat2, max_abs_diff, Mat2};

const SQRT3_6: f64 = 0.288_675_134_594_812_9; // √3/6

/// Gauss-Legendre nodes and the CF4 combination weights.
const CF4_C1: f64 = 0.5 - SQRT3_6;
const CF4_C2: f64 = 0.5 + SQRT3_6;
const CF4_A1: f64 = 0.25 - SQRT3_6;
const CF4_A2: f64 = 0.25 + SQRT3_6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Commutator-free 4th-order Magnus on uniform substeps (default).
    Cf4Magnus,
    /// Adaptive Dormand-Prince 5(4) on the Schrödinger equation.
    AdaptiveRk,
}

#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Substeps per fastest period; clamped to ≥ 16.
    pub substeps_per_fastest_period: u32,
    /// Max-norm tolerance for the step-doubling error estimate.
    pub tolerance: f64,
    /// Maximum number of step-doubling refinements before reporting
    /// non-convergence.
    pub max_refinements: u32,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Cf4Magnus,
            substeps_per_fastest_period: 64,
            tolerance: 1e-10,
            max_refinements: 8,
        }
    }
}

impl IntegratorConfig {
    pub fn with_substeps(mut self, n: u32) -> Self {
        self.substeps_per_fastest_period = n;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    fn substeps(&self) -> u32 {
        self.substeps_per_fastest_period.max(16)
    }
}

/// Result of a propagation with its accuracy bookkeeping.
#[derive(Debug, Clone)]
pub struct PropagatorResult {
    pub u: Operator,
    pub t0: f64,
    pub t1: f64,
    pub step_count: usize,
    /// Operator-norm (max-norm) step-doubling estimate.
    pub est_error: f64,
}

/// Shortest timescale governing the substep size.
///
/// For the Magnus method the exponentials handle the static spectrum
/// exactly, so only the drive tones matter. The RK method additionally
/// resolves the static spectral range for stability.
pub(crate) fn fastest_period(h: &DrivenHamiltonian, method: Method) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut omega_max = h.max_tone_frequency().unwrap_or(0.0);
    if method == Method::AdaptiveRk {
        if let Ok((vals, _)) = h.static_part().matrix().eigh(UPLO::Lower) {
            let range = vals
                .iter()
                .fold(f64::NEG_INFINITY, |a, &b| a.max(b))
                - vals.iter().fold(f64::INFINITY, |a, &b| a.min(b));
            omega_max = omega_max.max(range);
        }
    }
    if omega_max <= 0.0 {
        f64::INFINITY
    } else {
        tau / omega_max
    }
}

/// One CF4 substep: U_step = exp(−i dt(a₁H₁+a₂H₂)) · exp(−i dt(a₂H₁+a₁H₂)),
/// with H₁, H₂ the Hamiltonian at the early and late Gauss nodes.
fn cf4_step_factors(
    h: &DrivenHamiltonian,
    t: f64,
    dt: f64,
) -> Result<(Array2<C64>, Array2<C64>)> {
    let h1 = h.evaluate_matrix(t + CF4_C1 * dt);
    let h2 = h.evaluate_matrix(t + CF4_C2 * dt);
    let mut right = h1.mapv(|z| z * C64::new(CF4_A2, 0.0));
    right.zip_mut_with(&h2, |acc, &z| *acc += z * C64::new(CF4_A1, 0.0));
    let mut left = h1.mapv(|z| z * C64::new(CF4_A1, 0.0));
    left.zip_mut_with(&h2, |acc, &z| *acc += z * C64::new(CF4_A2, 0.0));
    Ok((expm_i_hermitian(&left, dt)?, expm_i_hermitian(&right, dt)?))
}

fn cf4_full(h: &DrivenHamiltonian, t0: f64, t1: f64, steps: usize) -> Result<Array2<C64>> {
    let n = h.dim();
    if n == 2 {
        let u = Tls2x2::new(h).propagate(t0, t1, steps);
        return Ok(ndarray::array![[u[0], u[1]], [u[2], u[3]]]);
    }
    let dt = (t1 - t0) / steps as f64;
    let mut u = Array2::<C64>::eye(n);
    for k in 0..steps {
        let t = t0 + k as f64 * dt;
        let (left, right) = cf4_step_factors(h, t, dt)?;
        u = left.dot(&right.dot(&u));
    }
    Ok(u)
}

/// Stack-based CF4 stepping for two-level systems; avoids per-step heap
/// allocation, which dominates at this dimension.
pub(crate) struct Tls2x2 {
    stat: Mat2,
    tones: Vec<(Mat2, Envelope, f64, f64)>, // (op, envelope, frequency, phase)
}

impl Tls2x2 {
    pub(crate) fn new(h: &DrivenHamiltonian) -> Self {
        let to_mat2 = |m: &Array2<C64>| -> Mat2 { [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]] };
        Tls2x2 {
            stat: to_mat2(h.static_part().matrix()),
            tones: h
                .tones()
                .iter()
                .map(|t| (to_mat2(t.op.matrix()), t.envelope.clone(), t.frequency, t.phase))
                .collect(),
        }
    }

    #[inline]
    fn eval(&self, t: f64) -> Mat2 {
        let mut m = self.stat;
        for (op, env, freq, phase) in &self.tones {
            let amp = env.value(t) * (freq * t + phase).cos();
            if amp != 0.0 {
                for (acc, o) in m.iter_mut().zip(op.iter()) {
                    *acc += o * C64::new(amp, 0.0);
                }
            }
        }
        m
    }

    #[inline]
    pub(crate) fn step(&self, t: f64, dt: f64) -> Mat2 {
        let h1 = self.eval(t + CF4_C1 * dt);
        let h2 = self.eval(t + CF4_C2 * dt);
        let mut right = [C64::new(0.0, 0.0); 4];
        let mut left = [C64::new(0.0, 0.0); 4];
        for i in 0..4 {
            right[i] = h1[i] * CF4_A2 + h2[i] * CF4_A1;
            left[i] = h1[i] * CF4_A1 + h2[i] * CF4_A2;
        }
        mat2_mul(&expm_i_mat2(&left, dt), &expm_i_mat2(&right, dt))
    }

    pub(crate) fn propagate(&self, t0: f64, t1: f64, steps: usize) -> Mat2 {
        let dt = (t1 - t0) / steps as f64;
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let mut u: Mat2 = [one, zero, zero, one];
        for k in 0..steps {
            let t = t0 + k as f64 * dt;
            u = mat2_mul(&self.step(t, dt), &u);
        }
        u
    }
}

fn base_steps(h: &DrivenHamiltonian, t0: f64, t1: f64, cfg: &IntegratorConfig) -> usize {
    let period = fastest_period(h, cfg.method);
    let span = t1 - t0;
    if period.is_infinite() {
        // static Hamiltonian: the exponential is exact, one step suffices
        // for Magnus; RK still needs resolution
        match cfg.method {
            Method::Cf4Magnus => 1,
            Method::AdaptiveRk => 64,
        }
    } else {
        ((span / period) * cfg.substeps() as f64).ceil().max(1.0) as usize
    }
}

/// Propagate over [t0, t1], refining by step doubling until the Richardson
/// estimate meets the tolerance.
pub fn propagate(
    h: &DrivenHamiltonian,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<PropagatorResult> {
    if t1 <= t0 {
        return Err(FloqError::InvalidParameter(format!(
            "propagate needs t1 > t0, got [{t0}, {t1}]"
        )));
    }
    match cfg.method {
        Method::Cf4Magnus => propagate_cf4(h, t0, t1, cfg),
        Method::AdaptiveRk => propagate_rk(h, t0, t1, cfg),
    }
}

fn propagate_cf4(
    h: &DrivenHamiltonian,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<PropagatorResult> {
    let mut steps = base_steps(h, t0, t1, cfg);
    let mut u_coarse = cf4_full(h, t0, t1, steps)?;
    let mut refinements = 0;
    loop {
        let fine_steps = steps * 2;
        let u_fine = cf4_full(h, t0, t1, fine_steps)?;
        let est_error = max_abs_diff(&u_fine, &u_coarse);
        if est_error <= cfg.tolerance {
            return finish(h, u_fine, t0, t1, fine_steps, est_error);
        }
        if refinements >= cfg.max_refinements {
            return Err(FloqError::NonConvergence {
                est_error,
                tolerance: cfg.tolerance,
                refinements: refinements as usize,
                steps: fine_steps,
                t0,
                t1,
            });
        }
        refinements += 1;
        steps = fine_steps;
        u_coarse = u_fine;
    }
}

fn finish(
    h: &DrivenHamiltonian,
    u: Array2<C64>,
    t0: f64,
    t1: f64,
    step_count: usize,
    est_error: f64,
) -> Result<PropagatorResult> {
    let n = u.nrows();
    let drift = max_abs_diff(&dagger(&u).dot(&u), &Array2::eye(n));
    if drift > 1e-8 {
        return Err(FloqError::NonConvergence {
            est_error: drift,
            tolerance: 1e-8,
            refinements: 0,
            steps: step_count,
            t0,
            t1,
        });
    }
    Ok(PropagatorResult {
        u: Operator::new(h.space().clone(), u)?,
        t0,
        t1,
        step_count,
        est_error,
    })
}

// --- adaptive Dormand-Prince 5(4) -----------------------------------------

const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn rhs(h: &DrivenHamiltonian, t: f64, u: &Array2<C64>) -> Array2<C64> {
    // dU/dt = −i H(t) U
    h.evaluate_matrix(t).dot(u).mapv(|z| z * C64::new(0.0, -1.0))
}

fn propagate_rk(
    h: &DrivenHamiltonian,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<PropagatorResult> {
    let n = h.dim();
    let period = fastest_period(h, Method::AdaptiveRk);
    let mut dt = if period.is_finite() {
        period / cfg.substeps() as f64
    } else {
        (t1 - t0) / cfg.substeps() as f64
    };
    let mut u = Array2::<C64>::eye(n);
    let mut t = t0;
    let mut steps = 0usize;
    let mut worst_err: f64 = 0.0;
    let atol = cfg.tolerance.max(1e-14);
    let max_steps = 200_000_000usize;
    while t < t1 {
        let step = dt.min(t1 - t);
        let mut k: Vec<Array2<C64>> = Vec::with_capacity(7);
        k.push(rhs(h, t, &u));
        for stage in 1..7 {
            let mut arg = u.clone();
            for (j, kj) in k.iter().enumerate() {
                let a = DP_A[stage - 1][j];
                if a != 0.0 {
                    arg.zip_mut_with(kj, |acc, &z| *acc += z * C64::new(a * step, 0.0));
                }
            }
            k.push(rhs(h, t + DP_C[stage] * step, &arg));
        }
        let mut u5 = u.clone();
        let mut u4 = u.clone();
        for (j, kj) in k.iter().enumerate() {
            if DP_B5[j] != 0.0 {
                u5.zip_mut_with(kj, |acc, &z| *acc += z * C64::new(DP_B5[j] * step, 0.0));
            }
            if DP_B4[j] != 0.0 {
                u4.zip_mut_with(kj, |acc, &z| *acc += z * C64::new(DP_B4[j] * step, 0.0));
            }
        }
        let err = max_abs_diff(&u5, &u4);
        if err <= atol || step <= 1e-12 {
            t += step;
            u = u5;
            steps += 1;
            worst_err = worst_err.max(err);
            if err < atol / 32.0 {
                dt *= 1.8;
            }
        } else {
            dt *= 0.5;
        }
        if steps > max_steps {
            return Err(FloqError::NonConvergence {
                est_error: err,
                tolerance: atol,
                refinements: 0,
                steps,
                t0,
                t1,
            });
        }
    }
    finish(h, u, t0, t1, steps, worst_err)
}

// --- state evolution --------------------------------------------------------

/// Evolve a pure state over a sample grid; `times[0]` is the initial time.
///
/// Uses the CF4 stepper with the same refinement policy as [`propagate`];
/// the error estimate is taken on the final state of the full trajectory.
pub fn evolve_state(
    h: &DrivenHamiltonian,
    psi0: &StateVector,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<StateVector>> {
    if times.len() < 2 {
        return Err(FloqError::InvalidParameter(
            "evolve_state needs at least two sample times".into(),
        ));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(FloqError::InvalidParameter(
            "sample times must be strictly increasing".into(),
        ));
    }
    if psi0.space() != h.space() {
        return Err(FloqError::SpaceMismatch("evolve_state initial state".into()));
    }

    let span = times[times.len() - 1] - times[0];
    let mut steps_total = base_steps(h, times[0], times[times.len() - 1], cfg);
    let mut coarse = evolve_fixed(h, psi0, times, steps_total, span)?;
    let mut refinements = 0;
    loop {
        let fine_steps = steps_total * 2;
        let fine = evolve_fixed(h, psi0, times, fine_steps, span)?;
        let est_error = state_diff(&coarse[coarse.len() - 1], &fine[fine.len() - 1]);
        if est_error <= cfg.tolerance.max(1e-12) {
            return Ok(fine);
        }
        if refinements >= cfg.max_refinements {
            return Err(FloqError::NonConvergence {
                est_error,
                tolerance: cfg.tolerance,
                refinements: refinements as usize,
                steps: fine_steps,
                t0: times[0],
                t1: times[times.len() - 1],
            });
        }
        refinements += 1;
        steps_total = fine_steps;
        coarse = fine;
    }
}

fn state_diff(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes().iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn evolve_fixed(
    h: &DrivenHamiltonian,
    psi0: &StateVector,
    times: &[f64],
    steps_total: usize,
    span: f64,
) -> Result<Vec<StateVector>> {
    let dt_target = span / steps_total as f64;
    let mut out = Vec::with_capacity(times.len());
    out.push(psi0.clone());
    let fast = if h.dim() == 2 { Some(Tls2x2::new(h)) } else { None };
    let mut psi: Array1<C64> = psi0.amplitudes().clone();
    for w in times.windows(2) {
        let (ta, tb) = (w[0], w[1]);
        let steps = ((tb - ta) / dt_target).ceil().max(1.0) as usize;
        let dt = (tb - ta) / steps as f64;
        if let Some(tls) = &fast {
            let mut v = [psi[0], psi[1]];
            for k in 0..steps {
                let t = ta + k as f64 * dt;
                v = crate::linalg::mat2_vec(&tls.step(t, dt), &v);
            }
            psi[0] = v[0];
            psi[1] = v[1];
        } else {
            for k in 0..steps {
                let t = ta + k as f64 * dt;
                let (left, right) = cf4_step_factors(h, t, dt)?;
                psi = left.dot(&right.dot(&psi));
            }
        }
        out.push(StateVector::new(h.space().clone(), psi.clone()).map_err(|_| {
            FloqError::InvalidState(format!(
                "norm drift beyond 1e-9 during evolution at t = {tb}"
            ))
        })?);
    }
    Ok(out)
}

/// Exact exponential of the static part, exp(−iH(t₀)·T): reference for the
/// time-independent limit.
pub fn static_exponential(h: &Operator, duration: f64) -> Result<Operator> {
    if !h.is_hermitian() {
        return Err(FloqError::InvalidParameter(
            "static exponential needs a Hermitian operator".into(),
        ));
    }
    let u = expm_i_hermitian(h.matrix(), duration)?;
    Operator::new(h.space().clone(), u)
}

#[cfg(test)]
pub(crate) fn unitarity_defect(u: &Array2<C64>) -> f64 {
    let n = u.nrows();
    let prod = dagger(u).dot(u);
    let eye = Array2::<C64>::eye(n);
    max_abs_diff(&prod, &eye)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ghz;
    use crate::hamiltonian::{build_tls_rabi, build_tls_two_tone, Envelope};
    use crate::hilbert::{pauli_z, HilbertSpace, StateVector};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn static_limit_matches_matrix_exponential() {
        let h = build_tls_two_tone(ghz(5.02), 0.0, ghz(5.0), 0.0, ghz(1.0)).unwrap();
        let cfg = IntegratorConfig::default();
        let res = propagate(&h, 0.0, 2.5, &cfg).unwrap();
        let direct = static_exponential(h.static_part(), 2.5).unwrap();
        assert!(max_abs_diff(res.u.matrix(), direct.matrix()) < 1e-10);
    }

    #[test]
    fn cf4_is_fourth_order() {
        // halving the step should shrink the error ~16x
        let h = build_tls_two_tone(ghz(5.02), ghz(0.3), ghz(5.0), ghz(0.1), ghz(1.0)).unwrap();
        let t1 = 0.8;
        let reference = cf4_full(&h, 0.0, t1, 4096).unwrap();
        let e1 = max_abs_diff(&cf4_full(&h, 0.0, t1, 32).unwrap(), &reference);
        let e2 = max_abs_diff(&cf4_full(&h, 0.0, t1, 64).unwrap(), &reference);
        let order = (e1 / e2).log2();
        assert!(
            order > 3.6 && order < 4.6,
            "measured order {order:.2} (e1 = {e1:.3e}, e2 = {e2:.3e})"
        );
    }

    #[test]
    fn resonant_rabi_half_period_transfers_population() {
        // RWA-validity parameters: ε/ω = 4e-4; transfer completes at t = π/ε
        let omega0 = ghz(5.0);
        let eps = ghz(0.002);
        let h = build_tls_rabi(omega0, Envelope::Constant { amplitude: eps }, omega0).unwrap();
        let t_pi = PI / eps;
        let cfg = IntegratorConfig::default();
        let res = propagate(&h, 0.0, t_pi, &cfg).unwrap();
        let psi0 = StateVector::basis(HilbertSpace::qubit(), 0).unwrap();
        let psi1 = res.u.apply(&psi0).unwrap();
        let p1 = psi1.amplitudes()[1].norm_sqr();
        assert!(p1 > 1.0 - 1e-6, "population transfer {p1}");
    }

    #[test]
    fn unitarity_and_composition() {
        let h = build_tls_two_tone(ghz(5.02), ghz(0.21), ghz(5.0), ghz(0.01), ghz(0.5)).unwrap();
        let cfg = IntegratorConfig::default();
        let full = propagate(&h, 0.0, 2.0, &cfg).unwrap();
        assert!(unitarity_defect(full.u.matrix()) < 1e-8);
        let a = propagate(&h, 0.0, 0.9, &cfg).unwrap();
        let b = propagate(&h, 0.9, 2.0, &cfg).unwrap();
        let composed = b.u.mul(&a.u).unwrap();
        assert!(max_abs_diff(full.u.matrix(), composed.matrix()) < 1e-8);
    }

    #[test]
    fn eigenphases_stable_under_step_doubling() {
        // common period of the two-tone TLS at ω_d2/ω_d1 = 1/10; emitted
        // propagators (refined to default tolerance) must agree to 1e-9
        // when the base step is halved
        let w1 = ghz(5.0);
        let h = build_tls_two_tone(ghz(5.02), ghz(0.21), w1, ghz(0.01), w1 / 10.0).unwrap();
        let t_common = 2.0 * PI / (w1 / 10.0);
        let cfg = IntegratorConfig::default();
        let res = propagate(&h, 0.0, t_common, &cfg).unwrap();
        let res2 = propagate(&h, 0.0, t_common, &cfg.with_substeps(128)).unwrap();
        let (th, _, _) = crate::linalg::unitary_eig(res.u.matrix(), 1e-10).unwrap();
        let (th2, _, _) = crate::linalg::unitary_eig(res2.u.matrix(), 1e-10).unwrap();
        for (a, b) in th.iter().zip(th2.iter()) {
            assert!((a - b).abs() < 1e-9, "eigenphase drift {} vs {}", a, b);
        }
        assert!(unitarity_defect(res.u.matrix()) < 1e-12);
        assert!(res.est_error <= cfg.tolerance);
    }

    #[test]
    fn refinement_reports_nonconvergence() {
        let h = build_tls_two_tone(ghz(5.02), ghz(0.21), ghz(5.0), ghz(0.01), ghz(0.5)).unwrap();
        let cfg = IntegratorConfig {
            tolerance: 1e-16, // unreachable
            max_refinements: 1,
            ..Default::default()
        };
        match propagate(&h, 0.0, 1.0, &cfg) {
            Err(FloqError::NonConvergence { est_error, .. }) => assert!(est_error > 1e-16),
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn adaptive_rk_agrees_with_cf4() {
        let h = build_tls_two_tone(ghz(5.02), ghz(0.21), ghz(5.0), ghz(0.02), ghz(0.5)).unwrap();
        let cf4 = propagate(&h, 0.0, 1.2, &IntegratorConfig::default()).unwrap();
        let rk = propagate(
            &h,
            0.0,
            1.2,
            &IntegratorConfig::default()
                .with_method(Method::AdaptiveRk)
                .with_tolerance(1e-12),
        )
        .unwrap();
        assert!(max_abs_diff(cf4.u.matrix(), rk.u.matrix()) < 1e-7);
    }

    #[test]
    fn evolve_zero_hamiltonian_keeps_state() {
        let space = HilbertSpace::qubit();
        let zero = crate::hilbert::pauli_z().scale(C64::new(0.0, 0.0));
        let h = DrivenHamiltonian::new(zero, vec![]).unwrap();
        let psi0 = StateVector::normalized(
            space,
            ndarray::array![C64::new(0.6, 0.0), C64::new(0.0, 0.8)],
        )
        .unwrap();
        let times = [0.0, 1.0, 2.0];
        let states = evolve_state(&h, &psi0, &times, &IntegratorConfig::default()).unwrap();
        for s in &states {
            assert!(state_diff(s, &psi0) < 1e-12);
        }
    }

    #[test]
    fn evolve_static_sigma_z_phases() {
        let omega0 = ghz(5.0);
        let h = DrivenHamiltonian::new(pauli_z().scale(C64::new(omega0 / 2.0, 0.0)), vec![])
            .unwrap();
        let psi0 = StateVector::normalized(
            HilbertSpace::qubit(),
            ndarray::array![
                C64::new(1.0 / 2f64.sqrt(), 0.0),
                C64::new(1.0 / 2f64.sqrt(), 0.0)
            ],
        )
        .unwrap();
        let times: Vec<f64> = (0..=8).map(|k| 0.25 * k as f64).collect();
        let states = evolve_state(&h, &psi0, &times, &IntegratorConfig::default()).unwrap();
        for (t, s) in times.iter().zip(states.iter()) {
            // amplitudes pick up e^{∓iω₀t/2}
            let expect0 = C64::from_polar(1.0 / 2f64.sqrt(), -omega0 * t / 2.0);
            let expect1 = C64::from_polar(1.0 / 2f64.sqrt(), omega0 * t / 2.0);
            assert_abs_diff_eq!((s.amplitudes()[0] - expect0).norm(), 0.0, epsilon = 1e-9);
            assert_abs_diff_eq!((s.amplitudes()[1] - expect1).norm(), 0.0, epsilon = 1e-9);
            assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn rejects_reversed_interval() {
        let h = build_tls_two_tone(ghz(5.0), ghz(0.2), ghz(5.0), 0.0, ghz(1.0)).unwrap();
        assert!(propagate(&h, 1.0, 0.5, &IntegratorConfig::default()).is_err());
    }
}
