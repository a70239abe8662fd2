//! Projective measurement of one register of a (possibly augmented) state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{reject, QnetError, Result};
use crate::linalg::{Amplitude, Vector, ZERO};
use crate::registers::{AugmentedState, RegisterLayout};

/// Outcomes with probability at or below this are treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureMode {
    Sample(u64),
    Fixed(usize),
    Distribution,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureOutcome {
    Outcome { value: usize, probability: f64 },
    Distribution(Vec<(usize, f64)>),
}

/// Probability of each value of register `index`, from the normalized
/// amplitudes of a register-space vector laid out by `dims`.
pub fn register_probabilities(v: &[Amplitude], dims: &[usize], index: usize) -> Result<Vec<f64>> {
    if index >= dims.len() {
        return reject(format!("register {index} out of range for {} registers", dims.len()));
    }
    let total: usize = dims.iter().product();
    if v.len() != total {
        return reject(format!("vector has {} amplitudes, layout needs {total}", v.len()));
    }
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if norm == 0.0 || !norm.is_finite() {
        return Err(QnetError::DegenerateState);
    }
    let inner: usize = dims[index + 1..].iter().product();
    let d = dims[index];
    let mut probs = vec![0.0; d];
    for (k, z) in v.iter().enumerate() {
        probs[(k / inner) % d] += z.norm_sqr() / norm;
    }
    Ok(probs)
}

/// Zero every amplitude whose register `index` is not `value`, then
/// renormalize.
pub fn project_register(v: &[Amplitude], dims: &[usize], index: usize, value: usize) -> Result<Vector> {
    let inner: usize = dims[index + 1..].iter().product();
    let d = dims[index];
    let kept: Vec<_> = v
        .iter()
        .enumerate()
        .map(|(k, &z)| if (k / inner) % d == value { z } else { ZERO })
        .collect();
    Vector::from_vec(kept).normalized().ok_or(QnetError::ImpossibleOutcome(value))
}

/// Draw an index from `probs` with a generator seeded by `seed`.
pub fn sample_index(probs: &[f64], seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p <= ZERO_PROBABILITY {
            continue;
        }
        last = i;
        acc += p;
        if x < acc {
            return i;
        }
    }
    last
}

/// Measure one register of a register-space vector.
pub fn measure_vector(
    v: &[Amplitude],
    dims: &[usize],
    index: usize,
    mode: MeasureMode,
) -> Result<(MeasureOutcome, Vector)> {
    let probs = register_probabilities(v, dims, index)?;
    let pick = |value: usize| -> Result<(MeasureOutcome, Vector)> {
        let probability = probs[value];
        if probability <= ZERO_PROBABILITY {
            return Err(QnetError::ImpossibleOutcome(value));
        }
        let post = project_register(v, dims, index, value)?;
        Ok((MeasureOutcome::Outcome { value, probability }, post))
    };
    match mode {
        MeasureMode::Sample(seed) => pick(sample_index(&probs, seed)),
        MeasureMode::Fixed(value) => {
            if value >= probs.len() {
                return reject(format!("outcome {value} out of range for register {index}"));
            }
            pick(value)
        }
        MeasureMode::Distribution => {
            let dist = probs
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > ZERO_PROBABILITY)
                .map(|(i, &p)| (i, p))
                .collect();
            let post = Vector::from_vec(v.to_vec()).normalized().ok_or(QnetError::DegenerateState)?;
            Ok((MeasureOutcome::Distribution(dist), post))
        }
    }
}

/// Measure register `index` of a state. With an auxiliary qubit the result
/// branch (aux = 1) is measured and the post-state carries the projected,
/// renormalized result in that branch with the other branch cleared.
pub fn measure_register(
    s: &AugmentedState,
    register_index: usize,
    mode: MeasureMode,
) -> Result<(MeasureOutcome, AugmentedState)> {
    let layout: &RegisterLayout = s.layout();
    let v = if layout.has_aux {
        s.branch(1)
    } else {
        s.amplitudes().entries()
    };
    let (outcome, post) = measure_vector(v, &layout.register_dims, register_index, mode)?;
    let amps = if layout.has_aux {
        let mut a = vec![ZERO; post.dim()];
        a.extend(post.into_vec());
        Vector::from_vec(a)
    } else {
        post
    };
    Ok((outcome, AugmentedState::new(layout.clone(), amps)?))
}
