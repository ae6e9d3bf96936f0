//! Dense complex linear algebra for small Hilbert spaces (dim <= 16).
//!
//! Everything here is deterministic: fixed pivot order in the Jacobi
//! eigensolver, a fixed eigenvector phase convention, and no randomized
//! algorithms. That is what makes byte-identical reports possible.

use std::ops::{Add, Deref, Mul, Sub};

use num_complex::Complex64;

use crate::tolerances as tol;
use crate::{Error, Result};

pub type Complex = Complex64;

/// Hilbert-space dimensions above this are rejected; Kronecker products
/// are the only way to grow and they check it.
pub const MAX_DIM: usize = 16;

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::validation(format!(
            "dimension {dim} outside supported range 1..={MAX_DIM}"
        )));
    }
    Ok(())
}

fn check_finite(values: &[Complex], what: &str) -> Result<()> {
    if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::validation(format!("{what} holds a non-finite value")));
    }
    Ok(())
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amps: Vec<Complex>,
}

impl Ket {
    /// Accepts amplitudes already normalized to within `STATE_NORM`.
    pub fn new(amps: Vec<Complex>) -> Result<Self> {
        check_dim(amps.len())?;
        check_finite(&amps, "ket")?;
        let norm = Self::norm_of(&amps);
        if (norm - 1.0).abs() > tol::STATE_NORM {
            return Err(Error::validation(format!(
                "ket norm {norm} deviates from 1 beyond {}",
                tol::STATE_NORM
            )));
        }
        Ok(Self { amps })
    }

    /// Normalizes an arbitrary amplitude vector.
    pub fn from_unnormalized(mut amps: Vec<Complex>) -> Result<Self> {
        check_dim(amps.len())?;
        check_finite(&amps, "ket")?;
        let norm = Self::norm_of(&amps);
        if norm < tol::BRANCH_PROB_MIN.sqrt() {
            return Err(Error::validation("cannot normalize a near-zero vector"));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Ok(Self { amps })
    }

    fn norm_of(amps: &[Complex]) -> f64 {
        amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        Self::norm_of(&self.amps)
    }

    /// <self|other>
    pub fn inner(&self, other: &Ket) -> Result<Complex> {
        if self.dim() != other.dim() {
            return Err(Error::validation("inner product dimension mismatch"));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// Dense square matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Complex>,
}

impl Operator {
    pub fn new(dim: usize, entries: Vec<Complex>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::validation(format!(
                "expected {} entries for dim {dim}, got {}",
                dim * dim,
                entries.len()
            )));
        }
        check_finite(&entries, "operator")?;
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            entries: vec![Complex::ZERO; dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut op = Self::zeros(dim)?;
        for i in 0..dim {
            op.entries[i * dim + i] = Complex::ONE;
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex {
        self.entries[i * self.dim + j]
    }

    pub fn adjoint(&self) -> Operator {
        let n = self.dim;
        let mut entries = vec![Complex::ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        Operator { dim: n, entries }
    }

    pub fn apply(&self, amps: &[Complex]) -> Result<Vec<Complex>> {
        if amps.len() != self.dim {
            return Err(Error::validation("operator application dimension mismatch"));
        }
        let n = self.dim;
        let out = self
            .entries
            .chunks_exact(n)
            .map(|row| row.iter().zip(amps).map(|(m, a)| m * a).sum())
            .collect();
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Add<&Operator> for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        Operator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub<&Operator> for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        Operator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul<&Operator> for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        let n = self.dim;
        let mut entries = vec![Complex::ZERO; n * n];
        for i in 0..n {
            for l in 0..n {
                let a = self.entries[i * n + l];
                if a == Complex::ZERO {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * rhs.entries[l * n + j];
                }
            }
        }
        Operator { dim: n, entries }
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;

    fn mul(self, rhs: f64) -> Operator {
        Operator {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * rhs).collect(),
        }
    }
}

impl Mul<Complex> for &Operator {
    type Output = Operator;

    fn mul(self, rhs: Complex) -> Operator {
        Operator {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * rhs).collect(),
        }
    }
}

/// Matrix checked to satisfy A = A-dagger within `HERMITICITY`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator(Operator);

impl HermitianOperator {
    pub fn new(op: Operator) -> Result<Self> {
        let dev = op.max_abs_diff(&op.adjoint());
        if dev > tol::HERMITICITY {
            return Err(Error::validation(format!(
                "matrix deviates from Hermitian by {dev}"
            )));
        }
        Ok(Self(op))
    }

    pub fn op(&self) -> &Operator {
        &self.0
    }

    pub fn into_op(self) -> Operator {
        self.0
    }
}

impl Deref for HermitianOperator {
    type Target = Operator;

    fn deref(&self) -> &Operator {
        &self.0
    }
}

/// Matrix checked to satisfy U U-dagger = I within `UNITARITY`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator(Operator);

impl UnitaryOperator {
    pub fn new(op: Operator) -> Result<Self> {
        let id = Operator::identity(op.dim())?;
        let dev = (&op * &op.adjoint()).max_abs_diff(&id);
        if dev > tol::UNITARITY {
            return Err(Error::validation(format!(
                "matrix deviates from unitary by {dev}"
            )));
        }
        Ok(Self(op))
    }

    pub fn op(&self) -> &Operator {
        &self.0
    }

    /// Applies the unitary and re-checks the norm; drift beyond
    /// `STATE_NORM` is reported rather than silently renormalized.
    pub fn transform(&self, ket: &Ket) -> Result<Ket> {
        let mut amps = self.0.apply(ket.amplitudes())?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > tol::STATE_NORM {
            return Err(Error::numeric(format!(
                "unitary application drifted the state norm to {norm}"
            )));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Ket::new(amps)
    }
}

impl Deref for UnitaryOperator {
    type Target = Operator;

    fn deref(&self) -> &Operator {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Pauli matrix in the fixed |+>, |-> basis.
pub fn pauli(axis: Axis) -> HermitianOperator {
    let i = Complex::I;
    let entries = match axis {
        Axis::X => vec![Complex::ZERO, Complex::ONE, Complex::ONE, Complex::ZERO],
        Axis::Y => vec![Complex::ZERO, -i, i, Complex::ZERO],
        Axis::Z => vec![Complex::ONE, Complex::ZERO, Complex::ZERO, -Complex::ONE],
    };
    HermitianOperator::new(Operator::new(2, entries).expect("pauli entries"))
        .expect("pauli matrices are Hermitian")
}

/// Kronecker product; the left factor owns the slow index.
pub fn kron(a: &Operator, b: &Operator) -> Result<Operator> {
    let (da, db) = (a.dim(), b.dim());
    let dim = da * db;
    if dim > MAX_DIM {
        return Err(Error::validation(format!(
            "kron dimension {dim} exceeds the {MAX_DIM} limit"
        )));
    }
    let mut entries = vec![Complex::ZERO; dim * dim];
    for ia in 0..da {
        for ja in 0..da {
            let f = a.get(ia, ja);
            if f == Complex::ZERO {
                continue;
            }
            for ib in 0..db {
                for jb in 0..db {
                    entries[(ia * db + ib) * dim + (ja * db + jb)] = f * b.get(ib, jb);
                }
            }
        }
    }
    Operator::new(dim, entries)
}

/// Eigendecomposition of a Hermitian operator, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Ket>,
}

fn off_diagonal_norm(a: &[Complex], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi diagonalization. Each pivot is phase-rotated onto the
/// real axis and annihilated with the classic symmetric rotation; the
/// iteration stops when the off-diagonal Frobenius norm falls below
/// `JACOBI_OFF_DIAGONAL`.
pub fn hermitian_eig(op: &HermitianOperator) -> Result<EigenSystem> {
    let n = op.dim();
    let mut a = op.op().entries().to_vec();
    let mut vecs = Operator::identity(n)?.entries().to_vec();

    let mut sweeps = 0;
    while off_diagonal_norm(&a, n) >= tol::JACOBI_OFF_DIAGONAL {
        if sweeps == tol::JACOBI_MAX_SWEEPS {
            return Err(Error::numeric(format!(
                "eigensolver did not converge in {} sweeps",
                tol::JACOBI_MAX_SWEEPS
            )));
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let w = apq / mag;
                let tau = (a[q * n + q].re - a[p * n + p].re) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let ws = w * s;
                let wc = w * c;
                for j in 0..n {
                    let apj = a[p * n + j];
                    let aqj = a[q * n + j];
                    a[p * n + j] = c * apj - ws * aqj;
                    a[q * n + j] = s * apj + wc * aqj;
                }
                let wsc = ws.conj();
                let wcc = wc.conj();
                for i in 0..n {
                    let aip = a[i * n + p];
                    let aiq = a[i * n + q];
                    a[i * n + p] = c * aip - wsc * aiq;
                    a[i * n + q] = s * aip + wcc * aiq;
                    let vip = vecs[i * n + p];
                    let viq = vecs[i * n + q];
                    vecs[i * n + p] = c * vip - wsc * viq;
                    vecs[i * n + q] = s * vip + wcc * viq;
                }
                a[p * n + q] = Complex::ZERO;
                a[q * n + p] = Complex::ZERO;
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[i * n + i]
            .re
            .total_cmp(&a[j * n + j].re)
            .then(i.cmp(&j))
    });

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    for &col in &order {
        eigenvalues.push(a[col * n + col].re);
        let mut comps: Vec<Complex> = (0..n).map(|i| vecs[i * n + col]).collect();
        // phase convention: largest-magnitude component real positive,
        // ties to the lowest index
        let mut best = 0;
        let mut best_mag = comps[0].norm();
        for (i, z) in comps.iter().enumerate().skip(1) {
            let m = z.norm();
            if m > best_mag + tol::PHASE_TIE {
                best = i;
                best_mag = m;
            }
        }
        let pivot = comps[best];
        if pivot.norm() > 0.0 {
            let phase = pivot.conj() / pivot.norm();
            for z in &mut comps {
                *z *= phase;
            }
        }
        let norm = comps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut comps {
            *z /= norm;
        }
        eigenvectors.push(Ket::new(comps)?);
    }

    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// exp(-i H t) built by spectral decomposition.
pub fn evolve(hamiltonian: &HermitianOperator, t: f64) -> Result<UnitaryOperator> {
    let eig = hermitian_eig(hamiltonian)?;
    evolve_from(&eig, t)
}

/// Same as [`evolve`] but reuses an already computed spectrum; loops
/// that sample many times should pay for the decomposition once.
pub fn evolve_from(eig: &EigenSystem, t: f64) -> Result<UnitaryOperator> {
    if !t.is_finite() {
        return Err(Error::validation("evolution time must be finite"));
    }
    let n = eig.eigenvectors.len();
    if n == 0 {
        return Err(Error::validation("empty eigensystem"));
    }
    let mut entries = vec![Complex::ZERO; n * n];
    for (lambda, vec) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
        let phase = Complex::from_polar(1.0, -lambda * t);
        let amps = vec.amplitudes();
        for i in 0..n {
            let vi = amps[i] * phase;
            for j in 0..n {
                entries[i * n + j] += vi * amps[j].conj();
            }
        }
    }
    UnitaryOperator::new(Operator::new(n, entries)?)
        .map_err(|_| Error::numeric("time evolution lost unitarity"))
}

/// <psi|O|psi> for Hermitian O; the imaginary residue must stay below
/// `EXPECTATION_IMAG` and is then discarded.
pub fn expectation(state: &Ket, observable: &HermitianOperator) -> Result<f64> {
    if state.dim() != observable.dim() {
        return Err(Error::validation("expectation dimension mismatch"));
    }
    let applied = observable.op().apply(state.amplitudes())?;
    let value: Complex = state
        .amplitudes()
        .iter()
        .zip(&applied)
        .map(|(a, b)| a.conj() * b)
        .sum();
    if value.im.abs() > tol::EXPECTATION_IMAG {
        return Err(Error::numeric(format!(
            "expectation of a Hermitian operator came out complex (im = {})",
            value.im
        )));
    }
    Ok(value.re)
}
