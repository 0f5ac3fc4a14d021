//! Three coupled Kerr oscillators (readout cavity, transmon qubit,
//! flux-modulated coupler) and the normal-mode reduction that exposes the
//! engineered qubit-cavity coupling.
//!
//! The quadratic part of the circuit Hamiltonian is the symmetric matrix
//!
//! ```text
//!   ( ω_a   g_ab  g_ca )
//!   ( g_ab  ω_b   g_bc )
//!   ( g_ca  g_bc  ω_c  )
//! ```
//!
//! acting on the bare annihilation operators. An orthogonal transformation
//! u diagonalizes it; in the normal basis the parametric coupler
//! modulation δω_c(t)·ĉ†ĉ spreads over all mode pairs, and its ã†b̃ + h.c.
//! component — amplitude u(a←c)·u(b←c)·δω_c(t) — is the modulated
//! transversal coupling used for longitudinal readout. The quartic (Kerr)
//! terms rotate exactly; their RWA-diagonal part gives the effective
//! anharmonicities and cross-Kerr couplings.
//!
//! Simulations run in the laboratory frame in the normal-mode Fock basis
//! (a static basis change), where the cavity-like decay operator is local
//! to one tensor factor.

use ndarray::{Array2};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{FloqError, Result};
use crate::floquet::{floquet_decompose, LabelPolicy};
use crate::hamiltonian::{DriveTone, DrivenHamiltonian, Envelope};
use crate::hilbert::{
    annihilation, identity, tensor_with_cap, HilbertSpace, Operator, StateVector,
};
use crate::linalg::symmetric_eig;
use crate::propagator::IntegratorConfig;

use super::lindblad::{lindblad_observe, LindbladMethod, LindbladModel};
use super::{PointerParams, PointerTrajectory};

/// Labeling threshold: normal frequencies closer than this are reported
/// ambiguous (2π · 1 MHz in rad/ns).
const LABEL_GAP_MIN: f64 = 2.0 * std::f64::consts::PI * 1e-3;

/// Which coupler-modulation sidebands are driven.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SidebandChoice {
    Both,
    Lower,
    Upper,
}

/// Bare circuit parameters. Frequencies and rates in rad/ns;
/// anharmonicities are the full α in (α/2)·b†²b².
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KerrCircuit {
    /// Bare mode frequencies (ω_a, ω_b, ω_c): cavity, qubit, coupler.
    pub omega: [f64; 3],
    pub alpha_b: f64,
    pub alpha_c: f64,
    pub g_ab: f64,
    pub g_bc: f64,
    pub g_ca: f64,
    /// Coupler modulation amplitude |δω_c| (rad/ns); δω_c(t) is a pure
    /// cosine sum with no dc component.
    pub mod_amp: f64,
    pub sidebands: SidebandChoice,
    /// Qubit drive amplitude ε̃_d1 in −i·ε̃_d1·cos(ω_d1 t)(b̂ − b̂†).
    pub eps_d1: f64,
    /// Fock truncations (cavity-like, qubit-like, coupler-like).
    pub trunc: [usize; 3],
}

impl KerrCircuit {
    /// The symmetric quadratic coupling matrix.
    pub fn coupling_matrix(&self) -> Array2<f64> {
        ndarray::array![
            [self.omega[0], self.g_ab, self.g_ca],
            [self.g_ab, self.omega[1], self.g_bc],
            [self.g_ca, self.g_bc, self.omega[2]]
        ]
    }
}

/// Result of the normal-mode reduction.
#[derive(Debug, Clone, Serialize)]
pub struct NormalModeData {
    /// Normal frequencies labeled (a, b, c) by dominant bare weight.
    pub freqs: [f64; 3],
    /// Hybridization matrix: `u[j][i]` is the weight of bare mode i in
    /// normal mode j (β̂_j = Σ_i u[j][i]·α̂_i); orthogonal, dominant entry
    /// of each row positive.
    pub u: [[f64; 3]; 3],
    /// Effective self-Kerr α_j^(1) = Σ_{i∈{b,c}} u[j][i]⁴·ᾱ_i.
    pub alpha_eff: [f64; 3],
    /// Cross-Kerr χ_jk^(1) = Σ_{i∈{b,c}} 2·u[j][i]²·u[k][i]²·ᾱ_i.
    pub chi: [[f64; 3]; 3],
}

impl NormalModeData {
    /// Amplitude of the engineered ã†b̃ + h.c. coupling per unit of
    /// modulation: u(a←c)·u(b←c).
    pub fn coupling_weight(&self) -> f64 {
        self.u[0][2] * self.u[1][2]
    }
}

/// Diagonalize the quadratic form and evaluate the effective Kerr data.
pub fn normal_mode_reduce(circ: &KerrCircuit) -> Result<NormalModeData> {
    let m = circ.coupling_matrix();
    let (vals, vecs) = symmetric_eig(&m)?;

    // label each normal mode by its dominant bare component
    let mut assignment = [usize::MAX; 3]; // assignment[bare] = eigen column
    let mut used = [false; 3];
    // greedy over strongest overlaps
    let mut entries: Vec<(f64, usize, usize)> = Vec::new();
    for bare in 0..3 {
        for col in 0..3 {
            entries.push((vecs[(bare, col)].abs(), bare, col));
        }
    }
    entries.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut bare_done = [false; 3];
    for (_, bare, col) in entries {
        if !bare_done[bare] && !used[col] {
            bare_done[bare] = true;
            used[col] = true;
            assignment[bare] = col;
        }
    }
    // ambiguity check: if two normal freqs are nearly degenerate the
    // labeling by overlap is not meaningful
    for i in 0..3 {
        for j in i + 1..3 {
            let gap = (vals[i] - vals[j]).abs();
            if gap < LABEL_GAP_MIN {
                return Err(FloqError::LabelingAmbiguity { gap_rad_ns: gap });
            }
        }
    }

    let mut freqs = [0.0; 3];
    let mut u = [[0.0; 3]; 3];
    for normal in 0..3 {
        let col = assignment[normal];
        freqs[normal] = vals[col];
        // row sign: dominant entry positive
        let sign = if vecs[(normal, col)] >= 0.0 { 1.0 } else { -1.0 };
        for bare in 0..3 {
            u[normal][bare] = sign * vecs[(bare, col)];
        }
    }

    // effective Kerr couplings from the rotated quartics (RWA-diagonal part)
    let bare_alpha = [0.0, circ.alpha_b, circ.alpha_c];
    let mut alpha_eff = [0.0; 3];
    let mut chi = [[0.0; 3]; 3];
    for j in 0..3 {
        for i in 1..3 {
            alpha_eff[j] += u[j][i].powi(4) * bare_alpha[i];
        }
        for k in 0..3 {
            if j == k {
                continue;
            }
            for i in 1..3 {
                chi[j][k] += 2.0 * u[j][i].powi(2) * u[k][i].powi(2) * bare_alpha[i];
            }
        }
    }
    Ok(NormalModeData {
        freqs,
        u,
        alpha_eff,
        chi,
    })
}

/// Full circuit Hamiltonian in the normal-mode Fock basis, with the
/// modulation and drive as explicit tones.
pub struct CircuitModel {
    pub h: DrivenHamiltonian,
    pub normal: NormalModeData,
    /// Drive carrier ω_d1 (rad/ns).
    pub omega_d1: f64,
    /// TLS-equivalent drive amplitude ε̃_d1·u(b←b).
    pub eps_eff: f64,
    /// Effective transversal modulation amplitude g̃ = u(a←c)u(b←c)·|δω_c|.
    pub g_tilde: f64,
}

/// Assemble the normal-basis model at a given tilt Δ/ε_eff.
pub fn build_circuit_model(circ: &KerrCircuit, tilt: f64) -> Result<CircuitModel> {
    let normal = normal_mode_reduce(circ)?;
    let dims = circ.trunc;
    for &d in &dims {
        if d < 2 {
            return Err(FloqError::InvalidDimension(
                "circuit truncations must be ≥ 2".into(),
            ));
        }
    }
    let space = HilbertSpace::new(dims.to_vec())?;
    let total = space.total_dim();

    // factor-local normal-mode annihilation ops
    let mut lowering: Vec<Operator> = Vec::with_capacity(3);
    for k in 0..3 {
        let mut ops: Vec<Operator> = Vec::new();
        for (j, &d) in dims.iter().enumerate() {
            if j == k {
                ops.push(annihilation(d)?);
            } else {
                ops.push(identity(&HilbertSpace::new(vec![d])?));
            }
        }
        let refs: Vec<&Operator> = ops.iter().collect();
        lowering.push(tensor_with_cap(&refs, usize::MAX)?);
    }

    // bare-mode operators expressed in the normal basis:
    // α̂_i = Σ_j u[j][i] β̂_j
    let bare_op = |i: usize| -> Operator {
        let mut m = Array2::<C64>::zeros((total, total));
        for j in 0..3 {
            let w = normal.u[j][i];
            if w != 0.0 {
                m.zip_mut_with(lowering[j].matrix(), |acc, &z| {
                    *acc += z * C64::new(w, 0.0)
                });
            }
        }
        Operator::new(space.clone(), m).unwrap()
    };

    // static part: Σ ω̃_j n̂_j + exact rotated Kerr quartics
    let mut static_m = Array2::<C64>::zeros((total, total));
    for j in 0..3 {
        let n_j = lowering[j].dagger().mul(&lowering[j])?;
        static_m.zip_mut_with(n_j.matrix(), |acc, &z| {
            *acc += z * C64::new(normal.freqs[j], 0.0)
        });
    }
    for (i, alpha) in [(1usize, circ.alpha_b), (2usize, circ.alpha_c)] {
        if alpha == 0.0 {
            continue;
        }
        let b = bare_op(i);
        let bd = b.dagger();
        let quartic = bd.mul(&bd)?.mul(&b)?.mul(&b)?;
        static_m.zip_mut_with(quartic.matrix(), |acc, &z| {
            *acc += z * C64::new(alpha / 2.0, 0.0)
        });
    }
    let static_part = Operator::new(space.clone(), static_m)?;

    // modulation tone(s): δω_c(t)·ĉ†ĉ with ĉ the bare coupler op
    let c_bare = bare_op(2);
    let mod_op = c_bare.dagger().mul(&c_bare)?;
    let sb_low = (normal.freqs[0] - normal.freqs[1]).abs();
    let sb_high = normal.freqs[0] + normal.freqs[1];
    let sideband_freqs: Vec<f64> = match circ.sidebands {
        SidebandChoice::Both => vec![sb_low, sb_high],
        SidebandChoice::Lower => vec![sb_low],
        SidebandChoice::Upper => vec![sb_high],
    };

    // qubit drive: −i·ε̃(b̂ − b̂†) on the bare qubit op
    let b_bare = bare_op(1);
    let drive_m = {
        let diff = b_bare.matrix() - &b_bare.dagger().matrix().view();
        Operator::new(space.clone(), diff.mapv(|z| z * C64::new(0.0, -1.0)))?
    };

    let eps_eff = circ.eps_d1 * normal.u[1][1];
    let omega_d1 = normal.freqs[1] - tilt * eps_eff;

    let mut tones = Vec::new();
    if circ.eps_d1 != 0.0 {
        tones.push(DriveTone::new(
            drive_m,
            Envelope::Constant { amplitude: circ.eps_d1 },
            omega_d1,
            0.0,
        )?);
    }
    if circ.mod_amp != 0.0 {
        for f in sideband_freqs {
            tones.push(DriveTone::new(
                mod_op.clone(),
                Envelope::Constant { amplitude: circ.mod_amp },
                f,
                0.0,
            )?);
        }
    }
    let h = DrivenHamiltonian::new(static_part, tones)?;
    let g_tilde = normal.coupling_weight().abs() * circ.mod_amp;
    Ok(CircuitModel {
        h,
        normal,
        omega_d1,
        eps_eff,
        g_tilde,
    })
}

/// Floquet modes |φ₀⟩, |φ₁⟩ of the isolated driven qubit-like normal mode
/// (single-mode model with the effective self-Kerr).
pub fn circuit_qubit_floquet_modes(
    circ: &KerrCircuit,
    model: &CircuitModel,
    cfg: &IntegratorConfig,
) -> Result<(StateVector, StateVector)> {
    let dim = circ.trunc[1];
    let space = HilbertSpace::fock(dim)?;
    let b = annihilation(dim)?;
    let bd = b.dagger();
    let n_op = bd.mul(&b)?;
    let mut static_m = n_op.matrix().mapv(|z| z * C64::new(model.normal.freqs[1], 0.0));
    let quartic = bd.mul(&bd)?.mul(&b)?.mul(&b)?;
    static_m.zip_mut_with(quartic.matrix(), |acc, &z| {
        *acc += z * C64::new(model.normal.alpha_eff[1] / 2.0, 0.0)
    });
    let drive = {
        let diff = b.matrix() - &bd.matrix().view();
        Operator::new(space.clone(), diff.mapv(|z| z * C64::new(0.0, -1.0)))?
    };
    let h = DrivenHamiltonian::new(
        Operator::new(space, static_m)?,
        vec![DriveTone::new(
            drive,
            Envelope::Constant { amplitude: model.eps_eff },
            model.omega_d1,
            0.0,
        )?],
    )?;
    let sol = floquet_decompose(&h, model.omega_d1, cfg, &[], LabelPolicy::default())?;
    Ok((sol.modes[0][0].clone(), sol.modes[0][1].clone()))
}

/// Full three-mode open-system run from vacuum ⊗ |φ_j⟩ ⊗ vacuum; returns
/// the cavity-like normal-mode pointer trajectory.
///
/// `kappa` attaches to the cavity-like normal mode.
pub fn simulate_circuit_readout(
    circ: &KerrCircuit,
    kappa: f64,
    tilt: f64,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<(PointerTrajectory, NormalModeData)> {
    let model = build_circuit_model(circ, tilt)?;
    let (phi0, phi1) = circuit_qubit_floquet_modes(circ, &model, cfg)?;
    let vac_a = StateVector::basis(HilbertSpace::fock(circ.trunc[0])?, 0)?;
    let vac_c = StateVector::basis(HilbertSpace::fock(circ.trunc[2])?, 0)?;
    let init0 = vac_a.kron(&phi0)?.kron(&vac_c)?;
    let init1 = vac_a.kron(&phi1)?.kron(&vac_c)?;

    let lind = LindbladModel::with_cavity_decay(model.h.clone(), 0, kappa)?;
    let a_like = {
        let dims = [circ.trunc[0], circ.trunc[1], circ.trunc[2]];
        let mut ops: Vec<Operator> = Vec::new();
        for (j, &d) in dims.iter().enumerate() {
            if j == 0 {
                ops.push(annihilation(d)?);
            } else {
                ops.push(identity(&HilbertSpace::new(vec![d])?));
            }
        }
        let refs: Vec<&Operator> = ops.iter().collect();
        tensor_with_cap(&refs, usize::MAX)?
    };
    let recs = lindblad_observe(
        &lind,
        &[init0.outer(), init1.outer()],
        times,
        &[&a_like],
        cfg,
        LindbladMethod::SplitChannel,
    )?;
    let a0 = recs[0][0].clone();
    let a1 = recs[1][0].clone();
    let d: Vec<f64> = a0.iter().zip(a1.iter()).map(|(x, y)| (x - y).norm()).collect();
    let g_eff = match circ.sidebands {
        SidebandChoice::Both => 2.0 * model.g_tilde,
        _ => model.g_tilde,
    };
    Ok((
        PointerTrajectory {
            times: times.to_vec(),
            a0,
            a1,
            d,
            params: PointerParams {
                g_eff,
                kappa,
                tilt,
            },
        },
        model.normal,
    ))
}

/// Least-squares fit of D(t) = (g̃/κ_e)(1 − e^{−κ_e t/2}) to a sampled
/// trajectory: golden-section on κ_e with the amplitude solved linearly.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LongitudinalFit {
    pub g_tilde: f64,
    pub kappa_eff: f64,
    /// RMS residual over the fitted window.
    pub rms: f64,
}

pub fn fit_longitudinal(times: &[f64], d: &[f64], kappa_guess: f64) -> Result<LongitudinalFit> {
    if times.len() != d.len() || times.len() < 4 {
        return Err(FloqError::InvalidParameter(
            "fit needs ≥ 4 samples".into(),
        ));
    }
    let shape = |k: f64, t: f64| 1.0 - (-k * t / 2.0).exp();
    let amp_and_sse = |k: f64| -> (f64, f64) {
        let mut num = 0.0;
        let mut den = 0.0;
        for (t, y) in times.iter().zip(d.iter()) {
            let s = shape(k, *t);
            num += s * y;
            den += s * s;
        }
        let a = if den > 0.0 { num / den } else { 0.0 };
        let sse: f64 = times
            .iter()
            .zip(d.iter())
            .map(|(t, y)| (y - a * shape(k, *t)).powi(2))
            .sum();
        (a, sse)
    };
    // golden-section search over two decades around the guess
    let (mut lo, mut hi) = (kappa_guess / 10.0, kappa_guess * 10.0);
    let phi = 0.618_033_988_749_894_8;
    for _ in 0..80 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if amp_and_sse(m1).1 < amp_and_sse(m2).1 {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let kappa_eff = 0.5 * (lo + hi);
    let (a, sse) = amp_and_sse(kappa_eff);
    Ok(LongitudinalFit {
        g_tilde: a * kappa_eff,
        kappa_eff,
        rms: (sse / times.len() as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ghz;
    use approx::assert_abs_diff_eq;

    fn paper_circuit() -> KerrCircuit {
        KerrCircuit {
            omega: [ghz(8.2), ghz(5.2), ghz(7.78)],
            alpha_b: 2.0 * ghz(-0.17),
            alpha_c: 2.0 * ghz(0.4),
            g_ab: 0.0,
            g_bc: ghz(0.2),
            g_ca: ghz(0.2),
            mod_amp: ghz(0.06),
            sidebands: SidebandChoice::Both,
            eps_d1: ghz(0.7),
            trunc: [5, 4, 3],
        }
    }

    #[test]
    fn decoupled_limit_is_identity() {
        let mut c = paper_circuit();
        c.g_ab = 0.0;
        c.g_bc = 0.0;
        c.g_ca = 0.0;
        let nm = normal_mode_reduce(&c).unwrap();
        for j in 0..3 {
            assert_abs_diff_eq!(nm.freqs[j], c.omega[j], epsilon = 1e-12);
            for i in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(nm.u[j][i], expect, epsilon = 1e-12);
            }
        }
        assert_abs_diff_eq!(nm.alpha_eff[1], c.alpha_b, epsilon = 1e-12);
        assert_abs_diff_eq!(nm.alpha_eff[2], c.alpha_c, epsilon = 1e-12);
        assert_abs_diff_eq!(nm.alpha_eff[0], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn u_is_orthogonal_and_chi_symmetric() {
        let nm = normal_mode_reduce(&paper_circuit()).unwrap();
        // uᵀu = I
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| nm.u[k][i] * nm.u[k][j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(dot, expect, epsilon = 1e-10);
            }
        }
        for j in 0..3 {
            for k in 0..3 {
                assert_abs_diff_eq!(nm.chi[j][k], nm.chi[k][j], epsilon = 1e-14);
            }
        }
        // normal frequencies are eigenvalues of the coupling matrix
        let m = paper_circuit().coupling_matrix();
        let (vals, _) = symmetric_eig(&m).unwrap();
        let mut sorted_freqs = nm.freqs;
        sorted_freqs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in sorted_freqs.iter().zip(vals.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn two_by_two_block_matches_closed_form_rotation() {
        // g_ca = g_bc = 0: the (a, b) block diagonalizes with
        // tan 2θ = 2g_ab/(ω_a − ω_b)
        let mut c = paper_circuit();
        c.g_bc = 0.0;
        c.g_ca = 0.0;
        c.g_ab = ghz(0.15);
        let nm = normal_mode_reduce(&c).unwrap();
        let theta = 0.5 * (2.0 * c.g_ab / (c.omega[0] - c.omega[1])).atan();
        assert_abs_diff_eq!(nm.u[0][0], theta.cos(), epsilon = 1e-10);
        assert_abs_diff_eq!(nm.u[0][1].abs(), theta.sin().abs(), epsilon = 1e-10);
        assert_abs_diff_eq!(nm.u[2][2], 1.0, epsilon = 1e-12);
        // closed-form normal frequencies of the 2×2 block
        let avg = 0.5 * (c.omega[0] + c.omega[1]);
        let half = 0.5 * (c.omega[0] - c.omega[1]);
        let split = (half * half + c.g_ab * c.g_ab).sqrt();
        assert_abs_diff_eq!(nm.freqs[0], avg + split, epsilon = 1e-9);
        assert_abs_diff_eq!(nm.freqs[1], avg - split, epsilon = 1e-9);
    }

    #[test]
    fn kerr_coefficients_match_operator_expansion() {
        // independent route: build the rotated quartic as an operator in a
        // truncated normal Fock space and read off the diagonal matrix
        // elements: E(2_j) − 2E(1_j) = α_j, E(1_j 1_k) − E(1_j) − E(1_k) = χ_jk
        let circ = paper_circuit();
        let nm = normal_mode_reduce(&circ).unwrap();
        let dims = [3usize, 3, 3];
        let space = HilbertSpace::new(dims.to_vec()).unwrap();
        let total = space.total_dim();
        let mut lowering = Vec::new();
        for k in 0..3 {
            let mut ops: Vec<Operator> = Vec::new();
            for (j, &d) in dims.iter().enumerate() {
                if j == k {
                    ops.push(annihilation(d).unwrap());
                } else {
                    ops.push(identity(&HilbertSpace::new(vec![d]).unwrap()));
                }
            }
            let refs: Vec<&Operator> = ops.iter().collect();
            lowering.push(tensor_with_cap(&refs, usize::MAX).unwrap());
        }
        let mut quartic_m = Array2::<C64>::zeros((total, total));
        for (i, alpha) in [(1usize, circ.alpha_b), (2usize, circ.alpha_c)] {
            let mut bare = Array2::<C64>::zeros((total, total));
            for j in 0..3 {
                bare.zip_mut_with(lowering[j].matrix(), |acc, &z| {
                    *acc += z * C64::new(nm.u[j][i], 0.0)
                });
            }
            let bare = Operator::new(space.clone(), bare).unwrap();
            let bd = bare.dagger();
            let q = bd.mul(&bd).unwrap().mul(&bare).unwrap().mul(&bare).unwrap();
            quartic_m.zip_mut_with(q.matrix(), |acc, &z| {
                *acc += z * C64::new(alpha / 2.0, 0.0)
            });
        }
        // index of Fock state (na, nb, nc)
        let idx = |n: [usize; 3]| (n[0] * dims[1] + n[1]) * dims[2] + n[2];
        let diag = |n: [usize; 3]| quartic_m[(idx(n), idx(n))].re;
        for j in 0..3 {
            let mut two = [0usize; 3];
            two[j] = 2;
            let mut one = [0usize; 3];
            one[j] = 1;
            let alpha_direct = diag(two) - 2.0 * diag(one);
            assert!(
                (alpha_direct - nm.alpha_eff[j]).abs() < 1e-10,
                "α_{j}: {alpha_direct} vs {}",
                nm.alpha_eff[j]
            );
            for k in 0..3 {
                if k == j {
                    continue;
                }
                let mut jk = [0usize; 3];
                jk[j] = 1;
                jk[k] = 1;
                let mut onek = [0usize; 3];
                onek[k] = 1;
                let chi_direct = diag(jk) - diag(one) - diag(onek);
                assert!(
                    (chi_direct - nm.chi[j][k]).abs() < 1e-10,
                    "χ_{j}{k}: {chi_direct} vs {}",
                    nm.chi[j][k]
                );
            }
        }
    }

    #[test]
    fn labeling_ambiguity_detected() {
        let mut c = paper_circuit();
        c.omega = [ghz(5.0), ghz(5.0) + LABEL_GAP_MIN / 4.0, ghz(9.0)];
        c.g_ab = 0.0;
        c.g_bc = 0.0;
        c.g_ca = 0.0;
        match normal_mode_reduce(&c) {
            Err(FloqError::LabelingAmbiguity { .. }) => {}
            other => panic!("expected labeling ambiguity, got {other:?}"),
        }
    }

    #[test]
    fn fit_recovers_exact_longitudinal_curve() {
        let (g, k) = (ghz(0.008), ghz(0.05));
        let times: Vec<f64> = (0..=60).map(|i| i as f64 * 0.4).collect();
        let d: Vec<f64> = times
            .iter()
            .map(|&t| g / k * (1.0 - (-k * t / 2.0).exp()))
            .collect();
        let fit = fit_longitudinal(&times, &d, ghz(0.03)).unwrap();
        assert!((fit.g_tilde - g).abs() / g < 1e-3, "g {} vs {g}", fit.g_tilde);
        assert!((fit.kappa_eff - k).abs() / k < 1e-3);
        assert!(fit.rms < 1e-10);
    }
}
