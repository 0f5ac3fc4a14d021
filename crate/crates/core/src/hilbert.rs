//! Finite-dimensional Hilbert spaces, dense complex operators and states.
//!
//! Qubit convention used throughout: `σz = diag(+1, −1)` with `|0⟩` the +1
//! eigenstate, so a static term `(ω₀/2)σz` puts `|0⟩` at energy `+ω₀/2`.
//! Bosonic modes are truncated Fock spaces; `annihilation(d)` carries the
//! usual `√n` superdiagonal.
//!
//! All types are immutable after construction and safe to share across
//! worker threads.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{FloqError, Result};

/// Hard cap on tensor-product dimensions (see [`tensor`]).
pub const DEFAULT_DIM_CAP: usize = 4096;

/// Tolerance for tagging an operator Hermitian or unitary at construction.
pub const FLAG_TOL: f64 = 1e-10;

/// An ordered list of subsystem dimensions with the derived total dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSpace {
    factor_dims: Vec<usize>,
    total_dim: usize,
}

impl HilbertSpace {
    pub fn new(factor_dims: Vec<usize>) -> Result<Self> {
        if factor_dims.is_empty() {
            return Err(FloqError::InvalidDimension(
                "factor_dims must be nonempty".into(),
            ));
        }
        if let Some(&d) = factor_dims.iter().find(|&&d| d < 2) {
            return Err(FloqError::InvalidDimension(format!(
                "factor dimension {d} < 2"
            )));
        }
        let total_dim = factor_dims.iter().product();
        Ok(Self {
            factor_dims,
            total_dim,
        })
    }

    /// Single qubit space.
    pub fn qubit() -> Self {
        Self::new(vec![2]).unwrap()
    }

    /// Single truncated bosonic mode with `dim` Fock levels.
    pub fn fock(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    /// Concatenation of two spaces (matching [`tensor`] ordering).
    pub fn join(&self, other: &HilbertSpace) -> Result<Self> {
        let mut dims = self.factor_dims.clone();
        dims.extend_from_slice(&other.factor_dims);
        Self::new(dims)
    }
}

/// Dense complex operator on a [`HilbertSpace`].
///
/// Hermitian/unitary flags are set only after an explicit numerical check
/// at tolerance [`FLAG_TOL`].
#[derive(Debug, Clone)]
pub struct Operator {
    space: HilbertSpace,
    matrix: Array2<C64>,
    hermitian: bool,
    unitary: bool,
}

fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

impl Operator {
    pub fn new(space: HilbertSpace, matrix: Array2<C64>) -> Result<Self> {
        let d = space.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(FloqError::SpaceMismatch(format!(
                "matrix is {}x{}, space dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                d
            )));
        }
        let dagger = matrix.t().mapv(|z| z.conj());
        let hermitian = max_abs_diff(&matrix, &dagger) < FLAG_TOL;
        let product = dagger.dot(&matrix);
        let eye = Array2::<C64>::eye(d);
        let unitary = max_abs_diff(&product, &eye) < FLAG_TOL;
        Ok(Self {
            space,
            matrix,
            hermitian,
            unitary,
        })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn dagger(&self) -> Operator {
        Operator::new(self.space.clone(), self.matrix.t().mapv(|z| z.conj())).unwrap()
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        self.check_space(&other.space)?;
        Operator::new(self.space.clone(), self.matrix.dot(&other.matrix))
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.check_space(&other.space)?;
        Operator::new(self.space.clone(), &self.matrix + &other.matrix)
    }

    pub fn scale(&self, c: C64) -> Operator {
        Operator::new(self.space.clone(), self.matrix.mapv(|z| z * c)).unwrap()
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        self.check_space(&psi.space)?;
        Ok(StateVector {
            space: psi.space.clone(),
            amplitudes: self.matrix.dot(&psi.amplitudes),
        })
    }

    fn check_space(&self, other: &HilbertSpace) -> Result<()> {
        if &self.space != other {
            return Err(FloqError::SpaceMismatch(format!(
                "{:?} vs {:?}",
                self.space.factor_dims, other.factor_dims
            )));
        }
        Ok(())
    }
}

/// Normalized pure state.
#[derive(Debug, Clone)]
pub struct StateVector {
    space: HilbertSpace,
    amplitudes: Array1<C64>,
}

impl StateVector {
    pub fn new(space: HilbertSpace, amplitudes: Array1<C64>) -> Result<Self> {
        if amplitudes.len() != space.total_dim() {
            return Err(FloqError::SpaceMismatch(format!(
                "vector length {} vs space dimension {}",
                amplitudes.len(),
                space.total_dim()
            )));
        }
        let n = norm(&amplitudes);
        if (n - 1.0).abs() > 1e-9 {
            return Err(FloqError::InvalidState(format!(
                "state norm {n} deviates from 1 beyond 1e-9"
            )));
        }
        Ok(Self { space, amplitudes })
    }

    /// Construct and normalize (for analytic expressions that are only
    /// normalized up to truncation).
    pub fn normalized(space: HilbertSpace, amplitudes: Array1<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if n == 0.0 {
            return Err(FloqError::InvalidState("zero vector".into()));
        }
        Self::new(space, amplitudes.mapv(|z| z / n))
    }

    /// Basis state |n⟩.
    pub fn basis(space: HilbertSpace, index: usize) -> Result<Self> {
        if index >= space.total_dim() {
            return Err(FloqError::InvalidState(format!(
                "basis index {index} out of range for dim {}",
                space.total_dim()
            )));
        }
        let mut amplitudes = Array1::zeros(space.total_dim());
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { space, amplitudes })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.space != other.space {
            return Err(FloqError::SpaceMismatch("inner product".into()));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |ψ⟩⟨ψ| as a density matrix.
    pub fn outer(&self) -> DensityMatrix {
        let d = self.space.total_dim();
        let mut m = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        DensityMatrix {
            space: self.space.clone(),
            matrix: m,
        }
    }

    /// Product state with another factor (self ⊗ other).
    pub fn kron(&self, other: &StateVector) -> Result<StateVector> {
        let space = self.space.join(&other.space)?;
        let mut amplitudes = Array1::zeros(space.total_dim());
        let db = other.space.total_dim();
        for (i, a) in self.amplitudes.iter().enumerate() {
            for (j, b) in other.amplitudes.iter().enumerate() {
                amplitudes[i * db + j] = a * b;
            }
        }
        StateVector::new(space, amplitudes)
    }
}

fn norm(v: &Array1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Dense density matrix; Hermitian, unit trace, positive within tolerances.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    space: HilbertSpace,
    matrix: Array2<C64>,
}

impl DensityMatrix {
    /// Validating constructor: Hermitian within 1e-9, trace 1 within 1e-9,
    /// minimum eigenvalue ≥ −1e-7.
    pub fn new(space: HilbertSpace, matrix: Array2<C64>) -> Result<Self> {
        let d = space.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(FloqError::SpaceMismatch("density matrix shape".into()));
        }
        let herm_dev = (0..d)
            .flat_map(|i| (i..d).map(move |j| (i, j)))
            .map(|(i, j)| (matrix[(i, j)] - matrix[(j, i)].conj()).norm())
            .fold(0.0, f64::max);
        if herm_dev > 1e-9 {
            return Err(FloqError::InvalidState(format!(
                "density matrix not Hermitian: deviation {herm_dev:.3e}"
            )));
        }
        let trace: C64 = matrix.diag().iter().sum();
        if (trace.re - 1.0).abs() > 1e-9 || trace.im.abs() > 1e-9 {
            return Err(FloqError::InvalidState(format!(
                "density matrix trace {trace} deviates from 1"
            )));
        }
        let (vals, _) = crate::linalg::herm_eig(&matrix)?;
        let min_eig = vals.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        if min_eig < -1e-7 {
            return Err(FloqError::InvalidState(format!(
                "density matrix not positive: min eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { space, matrix })
    }

    /// Unchecked constructor for solver internals that maintain the
    /// invariants by construction.
    pub(crate) fn from_raw(space: HilbertSpace, matrix: Array2<C64>) -> Self {
        Self { space, matrix }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.diag().iter().sum()
    }
}

/// Kronecker product of operators in listed order, with the default
/// dimension cap.
pub fn tensor(ops: &[&Operator]) -> Result<Operator> {
    tensor_with_cap(ops, DEFAULT_DIM_CAP)
}

pub fn tensor_with_cap(ops: &[&Operator], cap: usize) -> Result<Operator> {
    if ops.is_empty() {
        return Err(FloqError::InvalidDimension("tensor of no operators".into()));
    }
    let total: usize = ops.iter().map(|o| o.dim()).product();
    if total > cap {
        return Err(FloqError::DimensionOverflow { dim: total, cap });
    }
    let mut space = ops[0].space.clone();
    let mut matrix = ops[0].matrix.clone();
    for op in &ops[1..] {
        space = space.join(&op.space)?;
        matrix = kron(&matrix, &op.matrix);
    }
    Operator::new(space, matrix)
}

fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Truncated bosonic annihilation operator: entries √n on the (n−1, n)
/// superdiagonal.
pub fn annihilation(dim: usize) -> Result<Operator> {
    if dim < 2 {
        return Err(FloqError::InvalidDimension(format!(
            "annihilation needs dim ≥ 2, got {dim}"
        )));
    }
    let mut m = Array2::zeros((dim, dim));
    for n in 1..dim {
        m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Operator::new(HilbertSpace::fock(dim)?, m)
}

/// Number operator a†a on a truncated Fock space.
pub fn number(dim: usize) -> Result<Operator> {
    if dim < 2 {
        return Err(FloqError::InvalidDimension(format!(
            "number operator needs dim ≥ 2, got {dim}"
        )));
    }
    let mut m = Array2::zeros((dim, dim));
    for n in 0..dim {
        m[(n, n)] = C64::new(n as f64, 0.0);
    }
    Operator::new(HilbertSpace::fock(dim)?, m)
}

pub fn identity(space: &HilbertSpace) -> Operator {
    Operator::new(space.clone(), Array2::eye(space.total_dim())).unwrap()
}

pub fn pauli_x() -> Operator {
    let m = ndarray::array![
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
    ];
    Operator::new(HilbertSpace::qubit(), m).unwrap()
}

pub fn pauli_y() -> Operator {
    let m = ndarray::array![
        [C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
        [C64::new(0.0, 1.0), C64::new(0.0, 0.0)]
    ];
    Operator::new(HilbertSpace::qubit(), m).unwrap()
}

pub fn pauli_z() -> Operator {
    let m = ndarray::array![
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(-1.0, 0.0)]
    ];
    Operator::new(HilbertSpace::qubit(), m).unwrap()
}

/// Truncated coherent state |α⟩ from its Fock series, renormalized on the
/// truncated space.
pub fn coherent_state(alpha: C64, dim: usize) -> Result<StateVector> {
    if dim < 2 {
        return Err(FloqError::InvalidDimension(format!(
            "coherent state needs dim ≥ 2, got {dim}"
        )));
    }
    let mut v = Array1::zeros(dim);
    let mut term = C64::new(1.0, 0.0); // α^n / √(n!)
    for n in 0..dim {
        if n > 0 {
            term *= alpha / C64::new((n as f64).sqrt(), 0.0);
        }
        v[n] = term;
    }
    StateVector::normalized(HilbertSpace::fock(dim)?, v)
}

/// State argument for [`expectation`].
pub enum StateRef<'a> {
    Pure(&'a StateVector),
    Mixed(&'a DensityMatrix),
}

impl<'a> From<&'a StateVector> for StateRef<'a> {
    fn from(s: &'a StateVector) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a> From<&'a DensityMatrix> for StateRef<'a> {
    fn from(s: &'a DensityMatrix) -> Self {
        StateRef::Mixed(s)
    }
}

/// ⟨ψ|op|ψ⟩ or Tr(ρ·op).
pub fn expectation<'a>(state: impl Into<StateRef<'a>>, op: &Operator) -> Result<C64> {
    match state.into() {
        StateRef::Pure(psi) => {
            if psi.space() != op.space() {
                return Err(FloqError::SpaceMismatch("expectation".into()));
            }
            let opv = op.matrix.dot(&psi.amplitudes);
            Ok(psi
                .amplitudes
                .iter()
                .zip(opv.iter())
                .map(|(a, b)| a.conj() * b)
                .sum())
        }
        StateRef::Mixed(rho) => {
            if rho.space() != op.space() {
                return Err(FloqError::SpaceMismatch("expectation".into()));
            }
            // Tr(ρ·op) = Σ_ij ρ_ij op_ji
            let d = rho.space().total_dim();
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..d {
                for j in 0..d {
                    acc += rho.matrix[(i, j)] * op.matrix[(j, i)];
                }
            }
            Ok(acc)
        }
    }
}
