//! Dense complex matrices and state vectors on finite Hilbert spaces.
//!
//! Everything is stored densely in row-major [`ndarray`] arrays. The master
//! equation integrator compiles the operators it needs into [`SparseOperator`]
//! triplet lists, which is the only sparse structure in the crate.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use ndarray as nd;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// `e^{iφ}`.
pub fn phase(phi: f64) -> C64 {
    C64::from_polar(1.0, phi)
}

/// Square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator(nd::Array2<C64>);

/// Complex column vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector(nd::Array1<C64>);

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Self(nd::Array2::zeros((dim, dim)))
    }

    pub fn identity(dim: usize) -> Self {
        Self(nd::Array2::eye(dim))
    }

    /// Wraps a square array.
    pub fn from_array(a: nd::Array2<C64>) -> Result<Self> {
        let (r, c) = a.dim();
        if r != c {
            return Err(Error::DimensionMismatch { expected: r, got: c });
        }
        Ok(Self(a.as_standard_layout().into_owned()))
    }

    pub fn from_fn(dim: usize, f: impl FnMut((usize, usize)) -> C64) -> Self {
        Self(nd::Array2::from_shape_fn((dim, dim), f))
    }

    /// Builds from nested rows; panics on ragged input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        Self::from_fn(n, |(i, j)| {
            assert_eq!(rows[i].len(), n, "row {i} has wrong length");
            rows[i][j]
        })
    }

    /// Real diagonal matrix.
    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (k, &x) in d.iter().enumerate() {
            m.0[[k, k]] = C64::from(x);
        }
        m
    }

    /// `|i⟩⟨j|` in dimension `dim`.
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim);
        m.0[[i, j]] = ONE;
        m
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &StateVector, b: &StateVector) -> Self {
        let n = a.dim();
        Self::from_fn(n, |(i, j)| a.0[i] * b.0[j].conj())
    }

    /// `|v⟩⟨v|`.
    pub fn projector(v: &StateVector) -> Self {
        Self::outer(v, v)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_array(&self) -> &nd::Array2<C64> {
        &self.0
    }

    pub fn as_array_mut(&mut self) -> &mut nd::Array2<C64> {
        &mut self.0
    }

    pub fn into_array(self) -> nd::Array2<C64> {
        self.0
    }

    /// Row-major view of the entries.
    pub fn as_slice(&self) -> &[C64] {
        self.0.as_slice().expect("operators are kept in standard layout")
    }

    pub fn as_slice_mut(&mut self) -> &mut [C64] {
        self.0.as_slice_mut().expect("operators are kept in standard layout")
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[[i, j]]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.0[[i, j]] = v;
    }

    pub fn dagger(&self) -> Self {
        Self(self.0.t().mapv(|z| z.conj()).as_standard_layout().into_owned())
    }

    pub fn trace(&self) -> C64 {
        self.0.diag().sum()
    }

    pub fn dot(&self, other: &Self) -> Self {
        Self(self.0.dot(&other.0))
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        &self.dot(other) - &other.dot(self)
    }

    /// Kronecker product `A ⊗ B`, with the right factor varying fastest.
    pub fn kron(&self, other: &Self) -> Self {
        let (m, n) = (self.dim(), other.dim());
        Self::from_fn(m * n, |(i, j)| self.0[[i / n, j / n]] * other.0[[i % n, j % n]])
    }

    pub fn scale(&self, c: C64) -> Self {
        Self(self.0.mapv(|z| z * c))
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        StateVector(self.0.dot(&v.0))
    }

    /// `⟨v|A|v⟩`.
    pub fn expectation(&self, v: &StateVector) -> C64 {
        v.inner(&self.apply(v))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (i..n).all(|j| (self.0[[i, j]] - self.0[[j, i]].conj()).norm() <= tol))
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigvalsh(&self) -> Vec<f64> {
        let n = self.dim();
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            0.5 * (self.0[[i, j]] + self.0[[j, i]].conj())
        });
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// `½‖A − B‖₁` for Hermitian `A`, `B`.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        0.5 * (self - other).eigvalsh().iter().map(|x| x.abs()).sum::<f64>()
    }

    /// Matrix elements `⟨e_a|A|e_b⟩` on the given vectors.
    pub fn restrict(&self, basis: &[StateVector]) -> Self {
        let images: Vec<StateVector> = basis.iter().map(|b| self.apply(b)).collect();
        Self::from_fn(basis.len(), |(a, b)| basis[a].inner(&images[b]))
    }

    /// `Σ_ab X_ab |e_a⟩⟨e_b|`, the inverse of [`Self::restrict`] on the span.
    pub fn embed(&self, basis: &[StateVector]) -> Self {
        assert_eq!(self.dim(), basis.len());
        let n = basis[0].dim();
        let mut out = nd::Array2::<C64>::zeros((n, n));
        for (a, ea) in basis.iter().enumerate() {
            for (b, eb) in basis.iter().enumerate() {
                let x = self.0[[a, b]];
                if x == ZERO {
                    continue;
                }
                for i in 0..n {
                    if ea.0[i] == ZERO {
                        continue;
                    }
                    let xi = x * ea.0[i];
                    for j in 0..n {
                        out[[i, j]] += xi * eb.0[j].conj();
                    }
                }
            }
        }
        Self(out)
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator(&self.0 + &rhs.0)
    }
}

impl Add for Operator {
    type Output = Operator;
    fn add(self, rhs: Operator) -> Operator {
        Operator(self.0 + rhs.0)
    }
}

impl AddAssign<&Operator> for Operator {
    fn add_assign(&mut self, rhs: &Operator) {
        self.0 += &rhs.0;
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator(&self.0 - &rhs.0)
    }
}

impl Sub for Operator {
    type Output = Operator;
    fn sub(self, rhs: Operator) -> Operator {
        Operator(self.0 - rhs.0)
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator(-&self.0)
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.dot(rhs)
    }
}

impl Mul<C64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: C64) -> Operator {
        self.scale(rhs)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        Operator(&self.0 * rhs)
    }
}

impl Mul<f64> for Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        Operator(self.0 * rhs)
    }
}

/// Free-function form of [`Operator::kron`].
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    a.kron(b)
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all(factors: &[&Operator]) -> Operator {
    let mut it = factors.iter();
    let first = (*it.next().expect("at least one factor")).clone();
    it.fold(first, |acc, f| acc.kron(f))
}

impl StateVector {
    pub fn zeros(dim: usize) -> Self {
        Self(nd::Array1::zeros(dim))
    }

    /// `|i⟩` in dimension `dim`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = ONE;
        v
    }

    pub fn from_vec(v: Vec<C64>) -> Self {
        Self(nd::Array1::from(v))
    }

    pub fn from_real(v: &[f64]) -> Self {
        Self(v.iter().map(|&x| C64::from(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_array(&self) -> &nd::Array1<C64> {
        &self.0
    }

    pub fn get(&self, i: usize) -> C64 {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, z: C64) {
        self.0[i] = z;
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self(self.0.mapv(|z| z / n))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn kron(&self, other: &Self) -> Self {
        let n = other.dim();
        Self(nd::Array1::from_shape_fn(self.dim() * n, |k| self.0[k / n] * other.0[k % n]))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self(self.0.mapv(|z| z * c))
    }

    /// `|v⟩⟨v|`.
    pub fn density(&self) -> Operator {
        Operator::projector(self)
    }
}

impl Add for &StateVector {
    type Output = StateVector;
    fn add(self, rhs: &StateVector) -> StateVector {
        StateVector(&self.0 + &rhs.0)
    }
}

impl Sub for &StateVector {
    type Output = StateVector;
    fn sub(self, rhs: &StateVector) -> StateVector {
        StateVector(&self.0 - &rhs.0)
    }
}

/// Coordinate-list form of an operator, used by the integrator.
#[derive(Clone, Debug, Default)]
pub struct SparseOperator {
    pub dim: usize,
    pub entries: Vec<(usize, usize, C64)>,
}

impl SparseOperator {
    /// Keeps entries with modulus above `tol`, ordered by row.
    pub fn from_dense(op: &Operator, tol: f64) -> Self {
        let n = op.dim();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let z = op.0[[i, j]];
                if z.norm() > tol {
                    entries.push((i, j, z));
                }
            }
        }
        Self { dim: n, entries }
    }

    pub fn to_dense(&self) -> Operator {
        let mut m = Operator::zeros(self.dim);
        for &(i, j, z) in &self.entries {
            m.0[[i, j]] += z;
        }
        m
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn dagger(&self) -> Self {
        let mut entries: Vec<_> = self.entries.iter().map(|&(i, j, z)| (j, i, z.conj())).collect();
        entries.sort_by_key(|&(i, j, _)| (i, j));
        Self { dim: self.dim, entries }
    }
}

/// Pauli matrices `I, X, Y, Z`.
pub fn pauli(k: usize) -> Operator {
    let o = ZERO;
    match k {
        0 => Operator::identity(2),
        1 => Operator::from_rows(&[vec![o, ONE], vec![ONE, o]]),
        2 => Operator::from_rows(&[vec![o, -I], vec![I, o]]),
        3 => Operator::from_rows(&[vec![ONE, o], vec![o, -ONE]]),
        _ => panic!("Pauli index {k} out of range"),
    }
}

/// All `4^q` Pauli strings on `q` qubits, most significant qubit first.
pub fn pauli_strings(qubits: usize) -> Vec<Operator> {
    let mut out = vec![Operator::identity(1)];
    for _ in 0..qubits {
        out = out
            .iter()
            .flat_map(|p| (0..4).map(move |k| p.kron(&pauli(k))))
            .collect();
    }
    out
}
