//! Shor's factoring pipeline: Hadamard preparation, modular exponentiation,
//! mid-circuit measurement of the second register, QFT on the first, and
//! classical period recovery.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::measure::{register_probabilities, sample_index, ZERO_PROBABILITY};
use super::number::{
    continued_fraction, denominator_below, factors_from_period, gcd, lcm, modpow, period_from_measurement,
};
use super::qft::qft_matrix;
use super::{apply_substitutions, hadamard_prep, Substitution};
use crate::elements::Element;
use crate::error::{reject, QnetError, Result};
use crate::limits::{check_cap, dim_cap, ELEMENT_CAP};
use crate::linalg::{Amplitude, Vector, ONE};
use crate::network::{evaluate_observed, raising, tensor_lift, two_register_lift, Network};
use crate::registers::{make_augmented, RegisterLayout};

/// Largest number the pipeline accepts.
pub const MAX_N: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShorMeasurement {
    /// Sample both mid-circuit and final outcomes from a seeded generator.
    Sample(u64),
    /// Force the first-register outcome; the second register reads `a^0 = 1`.
    Fixed(u64),
    /// Exact first-register distribution, marginalized over the second.
    FullDistribution,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShorReport {
    pub n_to_factor: u64,
    pub base_a: u64,
    pub qubits_k: usize,
    pub second_register_qubits: usize,
    /// True when `gcd(a, N) > 1` already gave a factor and no network ran.
    pub classical_shortcut: bool,
    pub second_register_value: Option<u64>,
    pub measured_y: Option<u64>,
    /// Convergents of `y / 2^k`; in distribution mode, one `m/r` reading per
    /// peak.
    pub cf_convergents: Vec<(u64, u64)>,
    pub period_r: Option<u64>,
    pub factors: Option<(u64, u64)>,
    pub peak_distribution: Vec<(u64, f64)>,
}

fn ceil_log2(x: u64) -> usize {
    (64 - (x - 1).leading_zeros()) as usize
}

/// Qubits for the second register: enough to hold `0..N`.
pub fn second_register_qubits(n: u64) -> usize {
    ceil_log2(n).max(1)
}

fn fits(k: usize, d2: usize) -> bool {
    let dim = (1usize << k) * d2;
    dim <= dim_cap() && (1usize << (2 * k)) * d2 <= ELEMENT_CAP
}

/// `ceil(log2 N^2)`, lowered until the networks fit the capacity limits.
pub fn default_qubits(n: u64) -> usize {
    let d2 = 1usize << second_register_qubits(n);
    let mut k = ceil_log2(n * n);
    while k > ceil_log2(n) && !fits(k, d2) {
        k -= 1;
    }
    k
}

fn validate(n: u64, a: u64) -> Result<()> {
    if !(3..=MAX_N).contains(&n) {
        return reject(format!("N must lie in 3..={MAX_N}, got {n}"));
    }
    if a <= 1 || a >= n {
        return reject(format!("base a must satisfy 1 < a < N, got {a}"));
    }
    Ok(())
}

fn check_qubits(n: u64, k: usize, d2: usize) -> Result<()> {
    if k == 0 || k > 24 || (1u64 << k) < n {
        return reject(format!("first register needs 2^k >= N, got k = {k} for N = {n}"));
    }
    let dim = (1usize << k) * d2;
    check_cap("shor register dim", dim, dim_cap())?;
    check_cap("shor qft elements", (1usize << (2 * k)).saturating_mul(d2), ELEMENT_CAP)
}

/// `Q(G)`, `G = sum_n |n>|a^n mod N><n|<0|`.
pub fn modexp_network(n: u64, a: u64, k: usize, d2: usize) -> Result<Network> {
    let dim = (1usize << k) * d2;
    let stages = (0..1u64 << k)
        .map(|x| {
            let base = x as usize * d2;
            raising(base + modpow(a, x, n) as usize, base, ONE)
        })
        .collect();
    Network::new(dim, "modexp", stages)
}

/// `Q(I_1 (x) |u><u|)`.
pub fn measurement_network(u: u64, k: usize, d2: usize) -> Result<Network> {
    let dim = (1usize << k) * d2;
    let stages = (0..1usize << k)
        .map(|x| Element::Rotator {
            m: x * d2 + u as usize,
            amp: ONE,
        })
        .collect();
    Network::new(dim, "measure", stages)
}

/// Two-register network with slots `hadamard`, `modexp`, `measure`, `qft`
/// (application order), for second-register outcome `u`.
pub fn shor_network(n: u64, a: u64, k: usize, u: u64) -> Result<Network> {
    validate(n, a)?;
    let d2 = 1usize << second_register_qubits(n);
    check_qubits(n, k, d2)?;
    if u >= n {
        return reject(format!("second-register outcome {u} out of range"));
    }
    let dims = [1usize << k, d2];
    let f = tensor_lift(&qft_matrix(k)?, 0, &dims)?.with_label("qft");
    // connector chains take matrix order: the last factor acts first
    let parts = [
        f,
        measurement_network(u, k, d2)?,
        modexp_network(n, a, k, d2)?,
        hadamard_prep(k, &[d2])?,
    ];
    Ok(two_register_lift(&parts)?.with_label("shor"))
}

pub fn shor_run(n: u64, a: u64, k: Option<usize>, mode: ShorMeasurement) -> Result<ShorReport> {
    shor_run_with(n, a, k, mode, &[])
}

struct Pipeline<'a> {
    n: u64,
    a: u64,
    k: usize,
    d2: usize,
    subs: &'a [Substitution],
}

impl Pipeline<'_> {
    fn dims(&self) -> [usize; 2] {
        [1 << self.k, self.d2]
    }

    /// Result branch after the slot `stop` (or the whole chain).
    fn run(&self, u: u64, stop: Option<&str>) -> Result<Vec<Amplitude>> {
        let net = shor_network(self.n, self.a, self.k, u)?.without_spectator();
        let net = apply_substitutions(&net, self.subs)?;
        let dim = net.dim();
        let layout = RegisterLayout::new(self.dims().to_vec(), true)?;
        let s = make_augmented(&Vector::basis(0, dim), &layout)?;
        let mut captured = None;
        let out = evaluate_observed(&net, &s, |label, st| {
            if Some(label) == stop {
                captured = Some(st.branch(1).to_vec());
            }
        })?;
        Ok(match stop {
            Some(_) => captured.ok_or_else(|| QnetError::Composition("missing pipeline slot".into()))?,
            None => out.branch(1).to_vec(),
        })
    }

    fn second_register_probs(&self) -> Result<Vec<f64>> {
        register_probabilities(&self.run(1, Some("modexp"))?, &self.dims(), 1)
    }

    fn first_register_probs(&self, u: u64) -> Result<Vec<f64>> {
        register_probabilities(&self.run(u, None)?, &self.dims(), 0)
    }
}

fn support(probs: &[f64]) -> Vec<(u64, f64)> {
    probs
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > ZERO_PROBABILITY)
        .map(|(y, &p)| (y as u64, p))
        .collect()
}

/// Run the pipeline. `subs` replace labeled slots before evaluation.
pub fn shor_run_with(
    n: u64,
    a: u64,
    k: Option<usize>,
    mode: ShorMeasurement,
    subs: &[Substitution],
) -> Result<ShorReport> {
    validate(n, a)?;
    let k2 = second_register_qubits(n);
    let k = k.unwrap_or_else(|| default_qubits(n));
    let d2 = 1usize << k2;
    check_qubits(n, k, d2)?;
    let mut report = ShorReport {
        n_to_factor: n,
        base_a: a,
        qubits_k: k,
        second_register_qubits: k2,
        classical_shortcut: false,
        second_register_value: None,
        measured_y: None,
        cf_convergents: Vec::new(),
        period_r: None,
        factors: None,
        peak_distribution: Vec::new(),
    };
    let g = gcd(a, n);
    if g != 1 {
        report.classical_shortcut = true;
        report.factors = Some((g.min(n / g), g.max(n / g)));
        return Ok(report);
    }
    let q_total = 1u64 << k;
    let pipe = Pipeline { n, a, k, d2, subs };

    let y = match mode {
        ShorMeasurement::Sample(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (seed_u, seed_y): (u64, u64) = (rng.random(), rng.random());
            let u = sample_index(&pipe.second_register_probs()?, seed_u) as u64;
            let probs = pipe.first_register_probs(u)?;
            report.second_register_value = Some(u);
            report.peak_distribution = support(&probs);
            sample_index(&probs, seed_y) as u64
        }
        ShorMeasurement::Fixed(y) => {
            if y >= q_total {
                return reject(format!("outcome {y} out of range for {k} qubits"));
            }
            let probs = pipe.first_register_probs(1)?;
            if probs[y as usize] <= ZERO_PROBABILITY {
                return Err(QnetError::ImpossibleOutcome(y as usize));
            }
            report.second_register_value = Some(1);
            report.peak_distribution = support(&probs);
            y
        }
        ShorMeasurement::FullDistribution => {
            let mut marginal = vec![0.0; 1 << k];
            for (u, pu) in support(&pipe.second_register_probs()?) {
                for (acc, p) in marginal.iter_mut().zip(pipe.first_register_probs(u)?) {
                    *acc += pu * p;
                }
            }
            report.peak_distribution = support(&marginal);
            let mut r = 1;
            for &(y, _) in &report.peak_distribution {
                let q = denominator_below(y, q_total, n)?;
                let frac = continued_fraction(y, q_total)?
                    .into_iter()
                    .rfind(|&(_, d)| d == q)
                    .unwrap_or((0, 1));
                report.cf_convergents.push(frac);
                r = lcm(r, q);
            }
            report.period_r = (r > 1 && modpow(a, r, n) == 1).then_some(r);
            report.factors = report.period_r.and_then(|r| factors_from_period(a, r, n));
            return Ok(report);
        }
    };
    report.measured_y = Some(y);
    report.cf_convergents = continued_fraction(y, q_total)?;
    report.period_r = period_from_measurement(y, q_total, a, n)?;
    report.factors = report.period_r.and_then(|r| factors_from_period(a, r, n));
    Ok(report)
}
