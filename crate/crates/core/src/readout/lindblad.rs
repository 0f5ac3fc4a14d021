//! Lindblad master-equation integration for cavity-decay models.
//!
//! The default stepper is a Strang split: the dissipator is applied as the
//! exact amplitude-damping Kraus channel on its tensor factor (trace
//! preserving and completely positive by construction), and the unitary
//! factor is the same CF4 two-exponential step used by the propagator,
//! with exponentials evaluated by scaling-and-squaring. A classic
//! Runge-Kutta integrator on the full master-equation right-hand side is
//! available as an independent cross-check.

use ndarray::linalg::general_mat_mul;
use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{FloqError, Result};
use crate::hamiltonian::DrivenHamiltonian;
use crate::hilbert::{annihilation, identity, tensor_with_cap, DensityMatrix, Operator};
use crate::linalg::{dagger, max_abs_diff};
use crate::propagator::{fastest_period, IntegratorConfig, Method};

/// Cavity-decay Lindblad model: a driven Hamiltonian plus collapse
/// operators with rates (rad/ns).
#[derive(Debug, Clone)]
pub struct LindbladModel {
    h: DrivenHamiltonian,
    collapse: Vec<(Operator, f64)>,
    /// Factor index of each collapse op that is a pure factor-local
    /// lowering operator (detected at construction).
    factor_lowering: Vec<Option<usize>>,
}

impl LindbladModel {
    pub fn new(h: DrivenHamiltonian, collapse: Vec<(Operator, f64)>) -> Result<Self> {
        for (op, rate) in &collapse {
            if *rate < 0.0 {
                return Err(FloqError::InvalidParameter(format!(
                    "collapse rate {rate} < 0"
                )));
            }
            if op.space() != h.space() {
                return Err(FloqError::SpaceMismatch(
                    "collapse operator space differs from the Hamiltonian".into(),
                ));
            }
        }
        let factor_lowering = collapse
            .iter()
            .map(|(op, _)| detect_factor_lowering(op))
            .collect();
        Ok(Self {
            h,
            collapse,
            factor_lowering,
        })
    }

    /// Single cavity decay √κ·â on one tensor factor.
    pub fn with_cavity_decay(h: DrivenHamiltonian, factor: usize, kappa: f64) -> Result<Self> {
        let dims = h.space().factor_dims().to_vec();
        if factor >= dims.len() {
            return Err(FloqError::InvalidParameter(format!(
                "factor {factor} out of range"
            )));
        }
        let op = embed_lowering(&dims, factor)?;
        Self::new(h, vec![(op, kappa)])
    }

    pub fn hamiltonian(&self) -> &DrivenHamiltonian {
        &self.h
    }

    pub fn collapse_ops(&self) -> &[(Operator, f64)] {
        &self.collapse
    }
}

fn embed_lowering(dims: &[usize], factor: usize) -> Result<Operator> {
    let ops: Vec<Operator> = dims
        .iter()
        .enumerate()
        .map(|(k, &d)| {
            if k == factor {
                annihilation(d)
            } else {
                Ok(identity(&crate::hilbert::HilbertSpace::new(vec![d])?))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&Operator> = ops.iter().collect();
    tensor_with_cap(&refs, usize::MAX)
}

fn detect_factor_lowering(op: &Operator) -> Option<usize> {
    let dims = op.space().factor_dims().to_vec();
    for k in 0..dims.len() {
        if let Ok(candidate) = embed_lowering(&dims, k) {
            if max_abs_diff(op.matrix(), candidate.matrix()) < 1e-12 {
                return Some(k);
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LindbladMethod {
    /// Strang split with the exact per-factor damping channel (default).
    SplitChannel,
    /// Classic fixed-substep RK4 on the vectorized generator.
    RungeKutta,
}

/// Evolve one density matrix over a sample grid.
pub fn lindblad_evolve(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    times: &[f64],
    cfg: &IntegratorConfig,
    method: LindbladMethod,
) -> Result<Vec<DensityMatrix>> {
    let mut out = Vec::with_capacity(times.len());
    let mut states = vec![rho0.matrix().clone()];
    run_lindblad(model, &mut states, times, cfg, method, |_, s| {
        out.push(DensityMatrix::from_raw(model.h.space().clone(), s[0].clone()));
        Ok(())
    })?;
    Ok(out)
}

/// Evolve several density matrices in lockstep (they share each step's
/// unitary), reporting expectation values of `observables` at each sample
/// instead of storing full states.
///
/// Returns `records[state][observable][sample]`.
pub fn lindblad_observe(
    model: &LindbladModel,
    initial: &[DensityMatrix],
    times: &[f64],
    observables: &[&Operator],
    cfg: &IntegratorConfig,
    method: LindbladMethod,
) -> Result<Vec<Vec<Vec<C64>>>> {
    let n_states = initial.len();
    let mut records = vec![vec![Vec::with_capacity(times.len()); observables.len()]; n_states];
    let mut states: Vec<Array2<C64>> = initial.iter().map(|r| r.matrix().clone()).collect();
    run_lindblad(model, &mut states, times, cfg, method, |_, s| {
        for (si, rho) in s.iter().enumerate() {
            for (oi, op) in observables.iter().enumerate() {
                records[si][oi].push(trace_prod(rho, op.matrix()));
            }
        }
        Ok(())
    })?;
    Ok(records)
}

fn trace_prod(rho: &Array2<C64>, op: &Array2<C64>) -> C64 {
    let n = rho.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += rho[(i, j)] * op[(j, i)];
        }
    }
    acc
}

fn run_lindblad(
    model: &LindbladModel,
    states: &mut [Array2<C64>],
    times: &[f64],
    cfg: &IntegratorConfig,
    method: LindbladMethod,
    mut on_sample: impl FnMut(usize, &[Array2<C64>]) -> Result<()>,
) -> Result<()> {
    if times.len() < 2 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(FloqError::InvalidParameter(
            "lindblad evolution needs strictly increasing sample times".into(),
        ));
    }
    match method {
        LindbladMethod::SplitChannel => {
            for (k, lower) in model.factor_lowering.iter().enumerate() {
                if lower.is_none() && model.collapse[k].1 > 0.0 {
                    return Err(FloqError::InvalidParameter(
                        "split-channel method needs factor-local lowering collapse operators; \
                         use the Runge-Kutta method for general collapse operators"
                            .into(),
                    ));
                }
            }
            run_split(model, states, times, cfg, &mut on_sample)
        }
        LindbladMethod::RungeKutta => run_rk4(model, states, times, cfg, &mut on_sample),
    }
}

/// Scratch buffers for the Taylor exponential and sandwich products.
struct Workspace {
    acc: Array2<C64>,
    prod: Array2<C64>,
    tmp: Array2<C64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            acc: Array2::zeros((n, n)),
            prod: Array2::zeros((n, n)),
            tmp: Array2::zeros((n, n)),
        }
    }
}

const C_ONE: C64 = C64::new(1.0, 0.0);
const C_ZERO: C64 = C64::new(0.0, 0.0);

fn inf_norm(a: &Array2<C64>) -> f64 {
    let mut best = 0.0_f64;
    for row in a.rows() {
        let s: f64 = row.iter().map(|z| z.norm()).sum();
        best = best.max(s);
    }
    best
}

/// exp(−i·H·dt) into `out`, Horner-Taylor with scaling and squaring.
fn expm_into(h: &Array2<C64>, dt: f64, out: &mut Array2<C64>, ws: &mut Workspace) {
    let n = h.nrows();
    let norm = inf_norm(h) * dt;
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = dt / 2f64.powi(s as i32);
    // a = −i·H·scale
    let a = h.mapv(|z| z * C64::new(0.0, -scale));
    const ORDER: usize = 13;
    // Horner: acc = I + A/k (I + ...) inward from k = ORDER
    ws.acc.fill(C_ZERO);
    for i in 0..n {
        ws.acc[(i, i)] = C_ONE;
    }
    ws.acc.zip_mut_with(&a, |acc, &z| *acc += z / ORDER as f64);
    for k in (1..ORDER).rev() {
        general_mat_mul(C_ONE, &a, &ws.acc, C_ZERO, &mut ws.prod);
        ws.acc.assign(&ws.prod);
        ws.acc.mapv_inplace(|z| z / k as f64);
        for i in 0..n {
            ws.acc[(i, i)] += C_ONE;
        }
    }
    for _ in 0..s {
        general_mat_mul(C_ONE, &ws.acc, &ws.acc, C_ZERO, &mut ws.prod);
        ws.acc.assign(&ws.prod);
    }
    out.assign(&ws.acc);
}

/// ρ ← U ρ U†
fn sandwich(u: &Array2<C64>, rho: &mut Array2<C64>, ws: &mut Workspace) {
    general_mat_mul(C_ONE, u, rho, C_ZERO, &mut ws.tmp);
    let udag = dagger(u);
    general_mat_mul(C_ONE, &ws.tmp, &udag, C_ZERO, rho);
}

/// Exact amplitude-damping channel exp(τ·κ·D[a_factor]) applied in place.
///
/// Kraus form: ρ ← Σ_j (η^j/j!)·(E a^j) ρ (a†^j E) with η = 1 − e^{−κτ}
/// and E = e^{−κτ n̂/2}, all local to one tensor factor.
fn damp_factor(
    rho: &Array2<C64>,
    out: &mut Array2<C64>,
    dims: &[usize],
    factor: usize,
    kappa_tau: f64,
) {
    let d_total: usize = dims.iter().product();
    let dk = dims[factor];
    let stride: usize = dims[factor + 1..].iter().product();
    let eta = 1.0 - (-kappa_tau).exp();

    // per-index Fock level of the damped factor
    let level = |idx: usize| (idx / stride) % dk;

    out.fill(C_ZERO);
    // j = 0 term with E scaling
    for r in 0..d_total {
        let er = (-0.5 * kappa_tau * level(r) as f64).exp();
        for c in 0..d_total {
            let ec = (-0.5 * kappa_tau * level(c) as f64).exp();
            out[(r, c)] = rho[(r, c)] * (er * ec);
        }
    }
    if eta <= 0.0 {
        return;
    }
    // higher Kraus terms; weights fall as (η·n̄)^j / j!
    let mut weight = 1.0;
    for j in 1..dk {
        weight *= eta / j as f64;
        let max_fall = falling_sqrt(dk - 1, j);
        if weight * max_fall * max_fall < 1e-18 {
            break;
        }
        for r in 0..d_total {
            let m = level(r);
            if m + j >= dk {
                continue;
            }
            let fr = falling_sqrt(m + j, j);
            let er = (-0.5 * kappa_tau * m as f64).exp();
            let r_src = r + j * stride;
            for c in 0..d_total {
                let n_level = level(c);
                if n_level + j >= dk {
                    continue;
                }
                let fc = falling_sqrt(n_level + j, j);
                let ec = (-0.5 * kappa_tau * n_level as f64).exp();
                let c_src = c + j * stride;
                out[(r, c)] += rho[(r_src, c_src)] * (weight * fr * fc * er * ec);
            }
        }
    }
}

/// √(n·(n−1)·…·(n−j+1)) — the matrix element of a^j.
fn falling_sqrt(n: usize, j: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..j {
        acc *= (n - i) as f64;
    }
    acc.sqrt()
}

const CF4_C1: f64 = 0.5 - 0.288_675_134_594_812_9;
const CF4_C2: f64 = 0.5 + 0.288_675_134_594_812_9;
const CF4_A1: f64 = 0.25 - 0.288_675_134_594_812_9;
const CF4_A2: f64 = 0.25 + 0.288_675_134_594_812_9;

fn run_split(
    model: &LindbladModel,
    states: &mut [Array2<C64>],
    times: &[f64],
    cfg: &IntegratorConfig,
    on_sample: &mut impl FnMut(usize, &[Array2<C64>]) -> Result<()>,
) -> Result<()> {
    let n = model.h.dim();
    let dims = model.h.space().factor_dims().to_vec();
    let mut ws = Workspace::new(n);
    let mut u_left = Array2::<C64>::zeros((n, n));
    let mut u_right = Array2::<C64>::zeros((n, n));
    let mut damp_buf = Array2::<C64>::zeros((n, n));

    let dt_target = lindblad_dt(model, times, cfg, Method::Cf4Magnus);

    on_sample(0, states)?;
    for (sample_idx, w) in times.windows(2).enumerate() {
        let (ta, tb) = (w[0], w[1]);
        let steps = ((tb - ta) / dt_target).ceil().max(1.0) as usize;
        let dt = (tb - ta) / steps as f64;
        for k in 0..steps {
            let t = ta + k as f64 * dt;
            // damping half-step
            half_damp(model, states, &dims, dt / 2.0, &mut damp_buf);
            // CF4 unitary step, shared by all states
            let h1 = model.h.evaluate_matrix(t + CF4_C1 * dt);
            let h2 = model.h.evaluate_matrix(t + CF4_C2 * dt);
            let mut right = h1.mapv(|z| z * C64::new(CF4_A2, 0.0));
            right.zip_mut_with(&h2, |acc, &z| *acc += z * C64::new(CF4_A1, 0.0));
            let mut left = h1.mapv(|z| z * C64::new(CF4_A1, 0.0));
            left.zip_mut_with(&h2, |acc, &z| *acc += z * C64::new(CF4_A2, 0.0));
            expm_into(&right, dt, &mut u_right, &mut ws);
            expm_into(&left, dt, &mut u_left, &mut ws);
            general_mat_mul(C_ONE, &u_left, &u_right, C_ZERO, &mut ws.prod);
            let u_step = ws.prod.clone();
            for rho in states.iter_mut() {
                sandwich(&u_step, rho, &mut ws);
            }
            half_damp(model, states, &dims, dt / 2.0, &mut damp_buf);
        }
        check_state_health(states, tb, dt)?;
        on_sample(sample_idx + 1, states)?;
    }
    Ok(())
}

fn half_damp(
    model: &LindbladModel,
    states: &mut [Array2<C64>],
    dims: &[usize],
    tau: f64,
    buf: &mut Array2<C64>,
) {
    for (k, (_, rate)) in model.collapse.iter().enumerate() {
        if *rate <= 0.0 {
            continue;
        }
        let factor = model.factor_lowering[k].expect("validated factor-local");
        for rho in states.iter_mut() {
            damp_factor(rho, buf, dims, factor, rate * tau);
            rho.assign(buf);
        }
    }
}

/// Trace and Hermiticity diagnostics at sample times; positivity is
/// structural for the split channel and is spot-checked by callers that
/// need it (see [`min_eigenvalue`]).
fn check_state_health(states: &[Array2<C64>], t: f64, dt: f64) -> Result<()> {
    for rho in states {
        let n = rho.nrows();
        let trace: C64 = rho.diag().iter().sum();
        if (trace.re - 1.0).abs() > 1e-8 || trace.im.abs() > 1e-8 {
            return Err(FloqError::InvalidState(format!(
                "trace drift {:.3e} at t = {t} ns (never silently renormalized)",
                (trace.re - 1.0).abs().max(trace.im.abs())
            )));
        }
        let mut herm_dev = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                herm_dev = herm_dev.max((rho[(i, j)] - rho[(j, i)].conj()).norm());
            }
        }
        if herm_dev > 1e-9 {
            return Err(FloqError::PositivityViolation {
                t,
                min_eig: -herm_dev,
                dt,
            });
        }
    }
    Ok(())
}

/// Smallest eigenvalue of a density matrix (positivity diagnostic).
pub fn min_eigenvalue(rho: &DensityMatrix) -> Result<f64> {
    let (vals, _) = crate::linalg::herm_eig(rho.matrix())?;
    Ok(vals.iter().fold(f64::INFINITY, |a, &b| a.min(b)))
}

/// Substep target: the fastest of the drive tones, the decay rates (the
/// Strang splitting must resolve 1/κ), and for RK the static spectral
/// range (stability).
fn lindblad_dt(
    model: &LindbladModel,
    times: &[f64],
    cfg: &IntegratorConfig,
    method: Method,
) -> f64 {
    let substeps = cfg.substeps_per_fastest_period.max(16) as f64;
    let mut period = fastest_period(&model.h, method);
    let kappa_total: f64 = model.collapse.iter().map(|(_, r)| r).sum();
    if kappa_total > 0.0 {
        period = period.min(std::f64::consts::TAU / kappa_total);
    }
    if period.is_finite() {
        period / substeps
    } else {
        (times[times.len() - 1] - times[0]) / substeps
    }
}

fn run_rk4(
    model: &LindbladModel,
    states: &mut [Array2<C64>],
    times: &[f64],
    cfg: &IntegratorConfig,
    on_sample: &mut impl FnMut(usize, &[Array2<C64>]) -> Result<()>,
) -> Result<()> {
    let dt_target = lindblad_dt(model, times, cfg, Method::AdaptiveRk);
    on_sample(0, states)?;
    for (sample_idx, w) in times.windows(2).enumerate() {
        let (ta, tb) = (w[0], w[1]);
        let steps = ((tb - ta) / dt_target).ceil().max(1.0) as usize;
        let dt = (tb - ta) / steps as f64;
        for k in 0..steps {
            let t = ta + k as f64 * dt;
            for rho in states.iter_mut() {
                let k1 = master_rhs(model, t, rho);
                let k2 = master_rhs(model, t + dt / 2.0, &(&*rho + &k1.mapv(|z| z * C64::new(dt / 2.0, 0.0))));
                let k3 = master_rhs(model, t + dt / 2.0, &(&*rho + &k2.mapv(|z| z * C64::new(dt / 2.0, 0.0))));
                let k4 = master_rhs(model, t + dt, &(&*rho + &k3.mapv(|z| z * C64::new(dt, 0.0))));
                rho.zip_mut_with(&k1, |a, &b| *a += b * C64::new(dt / 6.0, 0.0));
                rho.zip_mut_with(&k2, |a, &b| *a += b * C64::new(dt / 3.0, 0.0));
                rho.zip_mut_with(&k3, |a, &b| *a += b * C64::new(dt / 3.0, 0.0));
                rho.zip_mut_with(&k4, |a, &b| *a += b * C64::new(dt / 6.0, 0.0));
            }
        }
        check_state_health(states, tb, dt)?;
        on_sample(sample_idx + 1, states)?;
    }
    Ok(())
}

/// dρ/dt = −i[H, ρ] + Σ κ(LρL† − ½{L†L, ρ})
fn master_rhs(model: &LindbladModel, t: f64, rho: &Array2<C64>) -> Array2<C64> {
    let h = model.h.evaluate_matrix(t);
    let mut out = h.dot(rho);
    out.zip_mut_with(&rho.dot(&h), |a, &b| *a -= b);
    out.mapv_inplace(|z| z * C64::new(0.0, -1.0));
    for (op, rate) in &model.collapse {
        if *rate <= 0.0 {
            continue;
        }
        let l = op.matrix();
        let ldag = dagger(l);
        let lrho = l.dot(rho);
        let jump = lrho.dot(&ldag);
        let ll = ldag.dot(l);
        let anti = ll.dot(rho) + rho.dot(&ll);
        out.zip_mut_with(&jump, |a, &b| *a += b * C64::new(*rate, 0.0));
        out.zip_mut_with(&anti, |a, &b| *a -= b * C64::new(rate / 2.0, 0.0));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ghz;
    use crate::hamiltonian::{build_tls_rabi, DrivenHamiltonian, Envelope};
    use crate::hilbert::{coherent_state, expectation, HilbertSpace, StateVector};
    use crate::propagator::evolve_state;
    use approx::assert_abs_diff_eq;

    fn zero_hamiltonian(dim: usize) -> DrivenHamiltonian {
        let space = HilbertSpace::fock(dim).unwrap();
        let z = identity(&space).scale(C64::new(0.0, 0.0));
        DrivenHamiltonian::new(z, vec![]).unwrap()
    }

    #[test]
    fn detects_factor_lowering() {
        let dims = vec![2usize, 5];
        let op = embed_lowering(&dims, 1).unwrap();
        assert_eq!(detect_factor_lowering(&op), Some(1));
        let op0 = embed_lowering(&dims, 0).unwrap();
        assert_eq!(detect_factor_lowering(&op0), Some(0));
        let not_lowering = crate::hilbert::tensor(&[
            &crate::hilbert::pauli_x(),
            &identity(&HilbertSpace::fock(5).unwrap()),
        ])
        .unwrap();
        assert_eq!(detect_factor_lowering(&not_lowering), None);
    }

    #[test]
    fn damped_cavity_coherent_decay() {
        // empty Hamiltonian, coherent α₀, decay κ: ⟨a⟩(t) = α₀ e^{−κt/2}
        let dim = 15;
        let kappa = ghz(0.05);
        let alpha0 = C64::new(0.7, -0.3);
        let h = zero_hamiltonian(dim);
        let model = LindbladModel::with_cavity_decay(h, 0, kappa).unwrap();
        let rho0 = coherent_state(alpha0, dim).unwrap().outer();
        let times: Vec<f64> = (0..=20).map(|k| k as f64 * 1.0).collect();
        let a_op = annihilation(dim).unwrap();
        let recs = lindblad_observe(
            &model,
            &[rho0],
            &times,
            &[&a_op],
            &IntegratorConfig::default(),
            LindbladMethod::SplitChannel,
        )
        .unwrap();
        for (k, t) in times.iter().enumerate() {
            let expect = alpha0 * C64::new((-kappa * t / 2.0).exp(), 0.0);
            let got = recs[0][0][k];
            assert!(
                (got - expect).norm() < 1e-6,
                "t = {t}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn closed_system_matches_state_evolution() {
        // κ = 0, pure state: density-matrix evolution equals the pure-state
        // path within 1e-7
        let omega0 = ghz(5.0);
        let eps = ghz(0.2);
        let h = build_tls_rabi(omega0, Envelope::Constant { amplitude: eps }, omega0).unwrap();
        let model = LindbladModel::new(h.clone(), vec![]).unwrap();
        let psi0 = StateVector::basis(HilbertSpace::qubit(), 0).unwrap();
        let times: Vec<f64> = (0..=10).map(|k| 0.3 * k as f64).collect();
        let cfg = IntegratorConfig::default();
        let pure = evolve_state(&h, &psi0, &times, &cfg).unwrap();
        let mixed = lindblad_evolve(&model, &psi0.outer(), &times, &cfg, LindbladMethod::SplitChannel)
            .unwrap();
        for (s, rho) in pure.iter().zip(mixed.iter()) {
            let proj = s.outer();
            assert!(max_abs_diff(proj.matrix(), rho.matrix()) < 1e-7);
        }
    }

    #[test]
    fn driven_damped_cavity_steady_state() {
        // resonant frame: H = η(a + a†), steady ⟨a⟩ = −2iη/κ
        let dim = 20;
        let kappa = ghz(0.05);
        let eta = ghz(0.002);
        let space = HilbertSpace::fock(dim).unwrap();
        let a = annihilation(dim).unwrap();
        let x = a.add(&a.dagger()).unwrap().scale(C64::new(eta, 0.0));
        let h = DrivenHamiltonian::new(x, vec![]).unwrap();
        let model = LindbladModel::with_cavity_decay(h, 0, kappa).unwrap();
        let vac = StateVector::basis(space, 0).unwrap().outer();
        let t_end = 40.0 / kappa; // deep steady state
        let times: Vec<f64> = (0..=40).map(|k| k as f64 * t_end / 40.0).collect();
        let recs = lindblad_observe(
            &model,
            &[vac],
            &times,
            &[&a],
            &IntegratorConfig::default(),
            LindbladMethod::SplitChannel,
        )
        .unwrap();
        let steady = *recs[0][0].last().unwrap();
        let expect = C64::new(0.0, -2.0 * eta / kappa);
        assert!(
            (steady - expect).norm() / expect.norm() < 1e-4,
            "steady {steady} vs {expect}"
        );
    }

    #[test]
    fn split_channel_agrees_with_rk4() {
        let dim = 8;
        let kappa = ghz(0.08);
        let omega_r = ghz(1.0);
        let space = HilbertSpace::fock(dim).unwrap();
        let a = annihilation(dim).unwrap();
        let n_op = a.dagger().mul(&a).unwrap().scale(C64::new(omega_r, 0.0));
        let drive = a.add(&a.dagger()).unwrap();
        let h = DrivenHamiltonian::new(
            n_op,
            vec![crate::hamiltonian::DriveTone::new(
                drive,
                Envelope::Constant { amplitude: ghz(0.01) },
                omega_r,
                0.0,
            )
            .unwrap()],
        )
        .unwrap();
        let model = LindbladModel::with_cavity_decay(h, 0, kappa).unwrap();
        let rho0 = StateVector::basis(space, 0).unwrap().outer();
        let times: Vec<f64> = (0..=10).map(|k| k as f64 * 2.0).collect();
        let cfg = IntegratorConfig::default().with_substeps(128);
        let split = lindblad_evolve(&model, &rho0, &times, &cfg, LindbladMethod::SplitChannel)
            .unwrap();
        let rk = lindblad_evolve(&model, &rho0, &times, &cfg, LindbladMethod::RungeKutta).unwrap();
        for (s, r) in split.iter().zip(rk.iter()) {
            assert!(
                max_abs_diff(s.matrix(), r.matrix()) < 1e-6,
                "method disagreement {}",
                max_abs_diff(s.matrix(), r.matrix())
            );
        }
    }

    #[test]
    fn trace_hermiticity_positivity_preserved() {
        let dim = 10;
        let kappa = ghz(0.05);
        let space = HilbertSpace::fock(dim).unwrap();
        let a = annihilation(dim).unwrap();
        let h = DrivenHamiltonian::new(
            a.dagger().mul(&a).unwrap().scale(C64::new(ghz(3.0), 0.0)),
            vec![crate::hamiltonian::DriveTone::new(
                a.add(&a.dagger()).unwrap(),
                Envelope::Constant { amplitude: ghz(0.02) },
                ghz(3.0),
                0.0,
            )
            .unwrap()],
        )
        .unwrap();
        let model = LindbladModel::with_cavity_decay(h, 0, kappa).unwrap();
        let rho0 = coherent_state(C64::new(0.4, 0.2), dim).unwrap().outer();
        let times: Vec<f64> = (0..=12).map(|k| k as f64 * 1.5).collect();
        let states = lindblad_evolve(
            &model,
            &rho0,
            &times,
            &IntegratorConfig::default(),
            LindbladMethod::SplitChannel,
        )
        .unwrap();
        for rho in &states {
            let trace = rho.trace();
            assert_abs_diff_eq!(trace.re, 1.0, epsilon = 1e-8);
            assert!(trace.im.abs() < 1e-8);
            let min_eig = min_eigenvalue(rho).unwrap();
            assert!(min_eig >= -1e-6, "positivity violated: {min_eig}");
        }
        // expectation of the number operator stays real
        let n_op = annihilation(dim).unwrap();
        let n_op = n_op.dagger().mul(&n_op).unwrap();
        let e = expectation(&states[6], &n_op).unwrap();
        assert!(e.im.abs() < 1e-9);
    }
}
