//! Dense linear-algebra kernels shared by the solvers.
//!
//! Matrix exponentials of (skew-)Hermitian generators come in three flavors:
//! a closed-form 2×2 Pauli path, an eigendecomposition path (exactly unitary,
//! used at small dimensions), and scaling-and-squaring Taylor (matmul-bound,
//! used at large dimensions where LAPACK eigensolves dominate the budget).

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Eigh, UPLO};
use num_complex::Complex64 as C64;

use crate::error::Result;

/// max_ij |a_ij − b_ij|
pub(crate) fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub(crate) fn dagger(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

/// ∞-norm (max row sum), the cheap norm used for exponential scaling.
fn inf_norm(a: &Array2<C64>) -> f64 {
    let mut best = 0.0_f64;
    for row in a.rows() {
        let s: f64 = row.iter().map(|z| z.norm()).sum();
        best = best.max(s);
    }
    best
}

/// exp(−i·H·dt) for Hermitian `h`.
///
/// Dispatches on dimension: 2×2 closed form, eigendecomposition up to
/// `EIGH_EXP_MAX_DIM`, scaling-and-squaring Taylor beyond.
pub(crate) fn expm_i_hermitian(h: &Array2<C64>, dt: f64) -> Result<Array2<C64>> {
    let n = h.nrows();
    if n == 2 {
        return Ok(expm_i_2x2(h, dt));
    }
    if n <= EIGH_EXP_MAX_DIM {
        expm_i_eigh(h, dt)
    } else {
        Ok(expm_taylor(&h.mapv(|z| z * C64::new(0.0, -dt))))
    }
}

const EIGH_EXP_MAX_DIM: usize = 24;

/// Stack-allocated 2×2 complex matrix in row-major order, the hot-path
/// representation for TLS propagation.
pub(crate) type Mat2 = [C64; 4];

/// exp(−i·H·dt) on a qubit via the Pauli decomposition:
/// H = a·I + b·σ, exp(−iHdt) = e^{−iadt}(cos(|b|dt)·I − i sin(|b|dt) b̂·σ).
pub(crate) fn expm_i_mat2(h: &Mat2, dt: f64) -> Mat2 {
    let a = 0.5 * (h[0].re + h[3].re);
    let bz = 0.5 * (h[0].re - h[3].re);
    let bx = h[1].re;
    let by = -h[1].im; // h01 = bx − i·by
    let bn = (bx * bx + by * by + bz * bz).sqrt();
    let phase = C64::from_polar(1.0, -a * dt);
    let (s, c) = if bn > 0.0 {
        let (s, c) = (bn * dt).sin_cos();
        (s / bn, c)
    } else {
        (dt, 1.0) // sinc limit; multiplied by b = 0 below
    };
    let i = C64::new(0.0, 1.0);
    [
        phase * (C64::new(c, 0.0) - i * s * bz),
        phase * (-i * s * C64::new(bx, -by)),
        phase * (-i * s * C64::new(bx, by)),
        phase * (C64::new(c, 0.0) + i * s * bz),
    ]
}

pub(crate) fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

pub(crate) fn mat2_vec(a: &Mat2, v: &[C64; 2]) -> [C64; 2] {
    [a[0] * v[0] + a[1] * v[1], a[2] * v[0] + a[3] * v[1]]
}

fn expm_i_2x2(h: &Array2<C64>, dt: f64) -> Array2<C64> {
    let hm: Mat2 = [h[(0, 0)], h[(0, 1)], h[(1, 0)], h[(1, 1)]];
    let e = expm_i_mat2(&hm, dt);
    ndarray::array![[e[0], e[1]], [e[2], e[3]]]
}

/// Hermitian eigendecomposition with eigenvectors as proper right
/// eigenvectors in columns.
///
/// The backend returns conjugated columns for complex Hermitian input
/// (it effectively diagonalizes the transpose), so the output is
/// conjugated here once; verified by the `herm_eig_columns` test.
pub(crate) fn herm_eig(h: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let (vals, vecs) = h.eigh(UPLO::Lower)?;
    Ok((vals, vecs.mapv(|z| z.conj())))
}

/// exp(−iHdt) = V·diag(e^{−iλdt})·V†, exactly unitary up to roundoff.
fn expm_i_eigh(h: &Array2<C64>, dt: f64) -> Result<Array2<C64>> {
    let (vals, vecs) = herm_eig(h)?;
    let n = h.nrows();
    let mut scaled = vecs.clone();
    for (j, lam) in vals.iter().enumerate() {
        let p = C64::from_polar(1.0, -lam * dt);
        for i in 0..n {
            scaled[(i, j)] *= p;
        }
    }
    Ok(scaled.dot(&dagger(&vecs)))
}

/// exp(A) by scaling-and-squaring with a Horner-evaluated Taylor polynomial.
/// Accurate to ~1e-15 relative for any A; intended for skew-Hermitian A
/// where conditioning is benign.
pub(crate) fn expm_taylor(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    let norm = inf_norm(a);
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = 1.0 / 2f64.powi(s as i32);
    let a_s = a.mapv(|z| z * scale);

    // Horner: exp(A) ≈ I + A(I + A/2(I + A/3(...)))
    const ORDER: usize = 13;
    let eye = Array2::<C64>::eye(n);
    let mut acc = &eye + &a_s.mapv(|z| z / ORDER as f64);
    for k in (1..ORDER).rev() {
        let prod = a_s.dot(&acc);
        acc = &eye + &prod.mapv(|z| z / k as f64);
    }
    for _ in 0..s {
        acc = acc.dot(&acc);
    }
    acc
}

/// Eigendecomposition of a unitary matrix.
///
/// LAPACK's general eigensolver loses eigenvector orthogonality for
/// (near-)degenerate eigenvalues, so clusters of eigenphases closer than
/// `cluster_tol` are re-orthonormalized by Gram-Schmidt within the cluster.
/// Returns (eigenphases θ_k ∈ [−π, π] with λ_k = e^{iθ_k}, eigenvectors as
/// columns, min eigenphase separation).
pub(crate) fn unitary_eig(u: &Array2<C64>, cluster_tol: f64) -> Result<(Vec<f64>, Array2<C64>, f64)> {
    let (vals, vecs) = u.eig()?;
    let n = u.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    let phases: Vec<f64> = vals.iter().map(|z| z.arg()).collect();
    order.sort_by(|&i, &j| phases[i].partial_cmp(&phases[j]).unwrap());

    let mut theta = Vec::with_capacity(n);
    let mut v = Array2::zeros((n, n));
    for (col, &k) in order.iter().enumerate() {
        theta.push(phases[k]);
        for i in 0..n {
            v[(i, col)] = vecs[(i, k)];
        }
    }

    // minimum circular separation between eigenphases
    let mut min_sep = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let mut d = (theta[i] - theta[j]).abs();
            d = d.min(std::f64::consts::TAU - d);
            min_sep = min_sep.min(d);
        }
    }

    // re-orthonormalize within clusters of near-equal phase
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (theta[end] - theta[end - 1]).abs() < cluster_tol {
            end += 1;
        }
        if end - start > 1 {
            gram_schmidt_cols(&mut v, start, end);
        } else {
            normalize_col(&mut v, start);
        }
        start = end;
    }
    Ok((theta, v, min_sep))
}

fn normalize_col(v: &mut Array2<C64>, col: usize) {
    let n = v.nrows();
    let norm: f64 = (0..n).map(|i| v[(i, col)].norm_sqr()).sum::<f64>().sqrt();
    for i in 0..n {
        v[(i, col)] /= norm;
    }
}

fn gram_schmidt_cols(v: &mut Array2<C64>, start: usize, end: usize) {
    let n = v.nrows();
    for c in start..end {
        for prev in start..c {
            let proj: C64 = (0..n).map(|i| v[(i, prev)].conj() * v[(i, c)]).sum();
            for i in 0..n {
                let sub = proj * v[(i, prev)];
                v[(i, c)] -= sub;
            }
        }
        normalize_col(v, c);
    }
}

/// Real-symmetric eigendecomposition (ascending eigenvalues), used for the
/// normal-mode reduction of the coupled-oscillator matrix.
pub(crate) fn symmetric_eig(m: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    let mc = m.mapv(|x| C64::new(x, 0.0));
    let (vals, vecs) = herm_eig(&mc)?;
    Ok((vals, vecs.mapv(|z| z.re)))
}
