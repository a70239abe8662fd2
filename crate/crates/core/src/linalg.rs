//! Dense complex matrices and vectors, the Kronecker product, and the
//! matrix-exponential oracle every other module is checked against.
//!
//! Storage is row-major. Nothing here is sparse: verification dominates and
//! desk-scale dimensions keep dense algebra cheap.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{reject, QnetError, Result};
use crate::limits::{check_cap, dim_cap, EXPM_DIM_CAP};

/// A complex matrix element or state component. Serialized as `[re, im]`.
pub type Amplitude = Complex64;

pub const ZERO: Amplitude = Complex64::new(0.0, 0.0);
pub const ONE: Amplitude = Complex64::new(1.0, 0.0);
pub const I: Amplitude = Complex64::new(0.0, 1.0);

pub(crate) fn all_finite(xs: &[Amplitude]) -> bool {
    xs.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Dense complex matrix in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOperator")]
pub struct Operator {
    rows: usize,
    cols: usize,
    entries: Vec<Amplitude>,
}

#[derive(Deserialize)]
struct RawOperator {
    rows: usize,
    cols: usize,
    entries: Vec<Amplitude>,
}

impl TryFrom<RawOperator> for Operator {
    type Error = QnetError;

    fn try_from(raw: RawOperator) -> Result<Self> {
        Operator::from_vec(raw.rows, raw.cols, raw.entries)
    }
}

impl Operator {
    pub fn from_vec(rows: usize, cols: usize, entries: Vec<Amplitude>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return reject("operator dimensions must be positive");
        }
        if entries.len() != rows * cols {
            return reject(format!(
                "operator {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                entries.len()
            ));
        }
        if !all_finite(&entries) {
            return reject("operator entries must be finite");
        }
        Ok(Operator {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Operator {
            rows,
            cols,
            entries: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Amplitude) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Operator {
            rows,
            cols,
            entries,
        }
    }

    pub fn diagonal(diag: &[Amplitude]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// `|m><n|` on a space of dimension `dim`.
    pub fn elementary(m: usize, n: usize, dim: usize) -> Self {
        let mut e = Self::zeros(dim, dim);
        e[(m, n)] = ONE;
        e
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Amplitude] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Amplitude] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector::from_vec((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    /// Non-zero entries as `(row, col, value)` in row-major order.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, Amplitude)> + '_ {
        let cols = self.cols;
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != ZERO)
            .map(move |(k, &z)| (k / cols, k % cols, z))
    }

    pub fn adjoint(&self) -> Self {
        Operator::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Amplitude) -> Self {
        Operator {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Operator {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Operator) -> Result<Self> {
        self.add(&other.scale(-ONE))
    }

    /// Matrix product `self * rhs`. Zero entries of `self` are skipped, which
    /// makes products with identity-plus-sparse factors cheap.
    pub fn matmul(&self, rhs: &Operator) -> Result<Self> {
        if self.cols != rhs.rows {
            return reject(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            ));
        }
        let mut out = Operator::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.entries[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.entries[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &Vector) -> Result<Vector> {
        mat_apply(self, v)
    }

    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Induced 1-norm (largest absolute column sum).
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn check_same_shape(&self, other: &Operator) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return reject(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for Operator {
    type Output = Amplitude;

    fn index(&self, (i, j): (usize, usize)) -> &Amplitude {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Operator {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Amplitude {
        &mut self.entries[i * self.cols + j]
    }
}

/// Dense complex column vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector {
    entries: Vec<Amplitude>,
}

impl Vector {
    pub fn from_vec(entries: Vec<Amplitude>) -> Self {
        Vector { entries }
    }

    pub fn try_from_vec(entries: Vec<Amplitude>) -> Result<Self> {
        if entries.is_empty() {
            return reject("vector must be non-empty");
        }
        if !all_finite(&entries) {
            return reject("vector entries must be finite");
        }
        Ok(Vector { entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Vector {
            entries: vec![ZERO; dim],
        }
    }

    pub fn basis(index: usize, dim: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[index] = ONE;
        v
    }

    /// Equal-weight superposition of all basis states, unit norm.
    pub fn uniform(dim: usize) -> Self {
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Vector {
            entries: vec![a; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Amplitude] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [Amplitude] {
        &mut self.entries
    }

    pub fn into_vec(self) -> Vec<Amplitude> {
        self.entries
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: Amplitude) -> Self {
        Vector {
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    /// `<self|other>` (conjugate-linear in `self`).
    pub fn inner(&self, other: &Vector) -> Amplitude {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn max_abs_diff(&self, other: &Vector) -> Result<f64> {
        if self.dim() != other.dim() {
            return reject(format!("vector dims differ: {} vs {}", self.dim(), other.dim()));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn kron(&self, other: &Vector) -> Vector {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.entries {
            out.extend(other.entries.iter().map(|b| a * b));
        }
        Vector { entries: out }
    }
}

impl Index<usize> for Vector {
    type Output = Amplitude;

    fn index(&self, i: usize) -> &Amplitude {
        &self.entries[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut Amplitude {
        &mut self.entries[i]
    }
}

/// `result_m = sum_n A_mn v_n`.
pub fn mat_apply(a: &Operator, v: &Vector) -> Result<Vector> {
    if a.cols != v.dim() {
        return reject(format!(
            "operator has {} columns but vector has dim {}",
            a.cols,
            v.dim()
        ));
    }
    let entries = (0..a.rows)
        .map(|i| a.row(i).iter().zip(&v.entries).map(|(x, y)| x * y).sum())
        .collect();
    Ok(Vector { entries })
}

/// Kronecker product: `(A (x) B)[(i*Br + k), (j*Bc + l)] = A_ij * B_kl`.
pub fn kron(a: &Operator, b: &Operator) -> Result<Operator> {
    let cap = dim_cap();
    let rows = a.rows.checked_mul(b.rows).unwrap_or(usize::MAX);
    let cols = a.cols.checked_mul(b.cols).unwrap_or(usize::MAX);
    check_cap("kron rows", rows, cap)?;
    check_cap("kron cols", cols, cap)?;
    let mut out = Operator::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of a list of factors, first factor most significant.
pub fn kron_all(factors: &[Operator]) -> Result<Operator> {
    let mut iter = factors.iter();
    let first = match iter.next() {
        Some(f) => f.clone(),
        None => return reject("kron_all needs at least one factor"),
    };
    iter.try_fold(first, |acc, f| kron(&acc, f))
}

/// Matrix exponential `e^A` by scaling and squaring with a truncated Taylor
/// series. Used as a reference propagator, never on a hot path.
pub fn expm_oracle(a: &Operator) -> Result<Operator> {
    if !a.is_square() {
        return reject(format!("expm needs a square matrix, got {}x{}", a.rows, a.cols));
    }
    check_cap("expm dim", a.rows, EXPM_DIM_CAP)?;
    let n = a.rows;
    let norm = a.norm_one();
    // scale so that the series converges in a handful of terms
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale(Complex64::new(0.5f64.powi(squarings as i32), 0.0));

    let mut sum = Operator::identity(n);
    let mut term = Operator::identity(n);
    for k in 1..=40 {
        term = term.matmul(&scaled)?.scale(Complex64::new(1.0 / k as f64, 0.0));
        sum = sum.add(&term)?;
        if term.max_abs() <= 1e-18 * sum.max_abs().max(1.0) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum)?;
    }
    Ok(sum)
}

pub fn is_unitary(u: &Operator, tol: f64) -> bool {
    u.is_square()
        && u.adjoint()
            .matmul(u)
            .and_then(|p| p.max_abs_diff(&Operator::identity(u.rows)))
            .map(|d| d <= tol)
            .unwrap_or(false)
}

pub fn is_hermitian(h: &Operator, tol: f64) -> bool {
    h.is_square() && h.max_abs_diff(&h.adjoint()).map(|d| d <= tol).unwrap_or(false)
}

/// Random matrix with real and imaginary parts uniform in [-1, 1).
pub fn random_operator<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Operator {
    Operator::from_fn(rows, cols, |_, _| random_amplitude(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Operator {
    let a = random_operator(rng, dim, dim);
    let sum = a.add(&a.adjoint()).expect("square");
    sum.scale(Complex64::new(0.5, 0.0))
}

/// Random unit vector.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector {
    let v = Vector::from_vec((0..dim).map(|_| random_amplitude(rng)).collect());
    v.normalized().unwrap_or_else(|| Vector::basis(0, dim))
}

pub fn random_amplitude<R: Rng + ?Sized>(rng: &mut R) -> Amplitude {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}
