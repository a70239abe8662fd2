//! Register layouts, basis-index encoding, and augmented states.
//!
//! Conventions used throughout the crate:
//! * qubits are big-endian: the first listed qubit is the most significant bit;
//! * registers are likewise ordered, first register most significant;
//! * the auxiliary qubit is the outermost factor, so the augmented index is
//!   `aux * register_dim + m` and the two branches are contiguous halves.

use serde::{Deserialize, Serialize};

use crate::error::{reject, QnetError, Result};
use crate::limits::{check_cap, dim_cap};
use crate::linalg::{all_finite, Amplitude, Vector, ZERO};

/// Big-endian bit string to basis index: `m = sum_i bit_i * 2^(k-1-i)`.
pub fn encode_index(bits: &[u8]) -> Result<usize> {
    if bits.len() >= usize::BITS as usize {
        return reject("too many qubits to encode");
    }
    bits.iter().try_fold(0usize, |acc, &b| match b {
        0 | 1 => Ok((acc << 1) | b as usize),
        other => reject(format!("non-binary digit {other}")),
    })
}

/// Inverse of [`encode_index`] for a `k`-qubit register.
pub fn decode_index(m: usize, k: usize) -> Vec<u8> {
    (0..k).map(|i| ((m >> (k - 1 - i)) & 1) as u8).collect()
}

/// Ordered register dimensions plus an optional auxiliary qubit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    pub register_dims: Vec<usize>,
    pub has_aux: bool,
}

impl RegisterLayout {
    pub fn new(register_dims: Vec<usize>, has_aux: bool) -> Result<Self> {
        if register_dims.is_empty() || register_dims.contains(&0) {
            return reject("register dimensions must be a non-empty list of positive integers");
        }
        let total = register_dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .unwrap_or(usize::MAX);
        check_cap("register dim", total, dim_cap())?;
        Ok(RegisterLayout {
            register_dims,
            has_aux,
        })
    }

    /// Single register of dimension `dim` with the auxiliary qubit.
    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim], true)
    }

    pub fn register_dim(&self) -> usize {
        self.register_dims.iter().product()
    }

    pub fn total_dim(&self) -> usize {
        self.register_dim() * if self.has_aux { 2 } else { 1 }
    }

    /// Split a register-space index into per-register digits.
    pub fn split_index(&self, mut m: usize) -> Vec<usize> {
        let mut digits = vec![0; self.register_dims.len()];
        for (slot, &d) in self.register_dims.iter().enumerate().rev() {
            digits[slot] = m % d;
            m /= d;
        }
        digits
    }

    pub fn join_index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.register_dims)
            .fold(0, |acc, (&x, &d)| acc * d + x)
    }
}

/// A vector over register space, tensored with the auxiliary qubit when the
/// layout has one. Not necessarily normalized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawState")]
pub struct AugmentedState {
    #[serde(flatten)]
    layout: RegisterLayout,
    amplitudes: Vector,
}

#[derive(Deserialize)]
struct RawState {
    register_dims: Vec<usize>,
    has_aux: bool,
    amplitudes: Vec<Amplitude>,
}

impl TryFrom<RawState> for AugmentedState {
    type Error = QnetError;

    fn try_from(raw: RawState) -> Result<Self> {
        let layout = RegisterLayout::new(raw.register_dims, raw.has_aux)?;
        AugmentedState::new(layout, Vector::from_vec(raw.amplitudes))
    }
}

impl AugmentedState {
    pub fn new(layout: RegisterLayout, amplitudes: Vector) -> Result<Self> {
        if amplitudes.dim() != layout.total_dim() {
            return reject(format!(
                "layout needs {} amplitudes, got {}",
                layout.total_dim(),
                amplitudes.dim()
            ));
        }
        if !all_finite(amplitudes.entries()) {
            return reject("state amplitudes must be finite");
        }
        Ok(AugmentedState { layout, amplitudes })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &Vector {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Amplitude] {
        self.amplitudes.entries_mut()
    }

    pub fn into_amplitudes(self) -> Vector {
        self.amplitudes
    }

    pub fn register_dim(&self) -> usize {
        self.layout.register_dim()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_sqr()
    }

    /// Amplitudes of one auxiliary branch. Panics if the layout has no aux.
    pub fn branch(&self, b: usize) -> &[Amplitude] {
        assert!(self.layout.has_aux && b < 2);
        let d = self.register_dim();
        &self.amplitudes.entries()[b * d..(b + 1) * d]
    }

    pub fn branch_norm_sqr(&self, b: usize) -> f64 {
        self.branch(b).iter().map(|z| z.norm_sqr()).sum()
    }

    pub(crate) fn scale_in_place(&mut self, s: f64) {
        for z in self.amplitudes.entries_mut() {
            *z *= s;
        }
    }
}

/// `psi (x) |0>_A`: branch 0 carries `psi`, branch 1 is zero.
pub fn make_augmented(psi: &Vector, layout: &RegisterLayout) -> Result<AugmentedState> {
    if !layout.has_aux {
        return reject("layout has no auxiliary qubit");
    }
    let d = layout.register_dim();
    if psi.dim() != d {
        return reject(format!("state dim {} does not match register dim {d}", psi.dim()));
    }
    let mut amps = psi.entries().to_vec();
    amps.resize(2 * d, ZERO);
    AugmentedState::new(layout.clone(), Vector::from_vec(amps))
}

/// Read out one auxiliary branch as a register-space vector.
pub fn project_aux(s: &AugmentedState, branch: usize, renormalize: bool) -> Result<Vector> {
    if !s.layout.has_aux {
        return reject("layout has no auxiliary qubit");
    }
    if branch > 1 {
        return reject(format!("aux branch must be 0 or 1, got {branch}"));
    }
    let v = Vector::from_vec(s.branch(branch).to_vec());
    if renormalize {
        v.normalized().ok_or(QnetError::DegenerateBranch)
    } else {
        Ok(v)
    }
}

/// Tensor product of per-register vectors, first register most significant.
pub fn product_vector(parts: &[Vector]) -> Result<Vector> {
    let mut iter = parts.iter();
    let first = match iter.next() {
        Some(v) => v.clone(),
        None => return reject("need at least one register vector"),
    };
    Ok(iter.fold(first, |acc, v| acc.kron(v)))
}
