//! Grover search as one connector-chained network.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::qft::{inverse_qft_network, qft_network};
use super::{apply_substitutions, chain_in_order, hadamard_prep, Substitution};
use crate::elements::Element;
use crate::error::{reject, Result};
use crate::limits::{check_cap, ELEMENT_CAP};
use crate::linalg::{Amplitude, Vector, ONE};
use crate::network::{compose_sum, evaluate_observed, Network};
use crate::registers::{make_augmented, project_aux, RegisterLayout};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroverReport {
    pub qubits_k: usize,
    pub target_j: usize,
    pub iterations: usize,
    pub success_probability: f64,
    /// Target probability after preparation and after each iteration.
    pub per_iteration_probs: Vec<f64>,
}

/// `floor(pi sqrt(2^k) / 4)`.
pub fn auto_iterations(k: usize) -> usize {
    (PI * ((1u64 << k) as f64).sqrt() / 4.0).floor() as usize
}

fn rotators(dim: usize, label: &str, amps: impl Fn(usize) -> Option<Amplitude>) -> Result<Network> {
    let stages = (0..dim)
        .filter_map(|m| amps(m).map(|amp| Element::Rotator { m, amp }))
        .collect();
    Network::new(dim, label, stages)
}

/// `Q(I - 2|j><j|)`.
pub fn oracle_network(target: usize, dim: usize) -> Result<Network> {
    let id = rotators(dim, "identity", |_| Some(ONE))?;
    let mark = rotators(dim, "mark", |m| (m == target).then_some(-2.0 * ONE))?;
    compose_sum(&[id, mark])
}

/// `Q(2|0><0| - I)`.
pub fn reflect_zero_network(dim: usize) -> Result<Network> {
    let zero = rotators(dim, "zero", |m| (m == 0).then_some(2.0 * ONE))?;
    let neg = rotators(dim, "negate", |_| Some(-ONE))?;
    compose_sum(&[zero, neg])
}

fn check_args(k: usize, target: usize) -> Result<usize> {
    if k == 0 || k > 20 {
        return reject(format!("qubit count {k} out of range"));
    }
    let dim = 1usize << k;
    if target >= dim {
        return reject(format!("target {target} out of range for {k} qubits"));
    }
    Ok(dim)
}

/// Chain in application order: `hadamard`, then per iteration `t`
/// (1-based) the slots `t{t}:oracle`, `t{t}:qft`, `t{t}:reflect`,
/// `t{t}:inverse-qft`.
pub fn grover_network(k: usize, target: usize, iterations: usize) -> Result<Network> {
    let dim = check_args(k, target)?;
    let per_iter = 2 * dim * dim + 3 * dim + 1;
    check_cap("grover elements", iterations.saturating_mul(per_iter), ELEMENT_CAP)?;
    let mut parts = vec![hadamard_prep(k, &[])?];
    if iterations > 0 {
        let oracle = oracle_network(target, dim)?;
        let f = qft_network(k)?;
        let r0 = reflect_zero_network(dim)?;
        let f_inv = inverse_qft_network(k)?;
        for t in 1..=iterations {
            parts.push(oracle.clone().with_label(format!("t{t}:oracle")));
            parts.push(f.clone().with_label(format!("t{t}:qft")));
            parts.push(r0.clone().with_label(format!("t{t}:reflect")));
            parts.push(f_inv.clone().with_label(format!("t{t}:inverse-qft")));
        }
    }
    Ok(chain_in_order(&parts)?.with_label("grover"))
}

fn target_probability(branch: &[Amplitude], target: usize) -> f64 {
    let norm: f64 = branch.iter().map(|z| z.norm_sqr()).sum();
    branch[target].norm_sqr() / norm
}

/// Evaluate a (possibly substituted) Grover network from `|0...0>`.
pub fn grover_evaluate(net: &Network, k: usize, target: usize, iterations: usize) -> Result<GroverReport> {
    let dim = check_args(k, target)?;
    let s = make_augmented(&Vector::basis(0, dim), &RegisterLayout::single(dim)?)?;
    let mut probs = Vec::with_capacity(iterations + 1);
    let out = evaluate_observed(net, &s, |label, st| {
        if label == "hadamard" || (label.starts_with('t') && label.ends_with(":inverse-qft")) {
            probs.push(target_probability(st.branch(1), target));
        }
    })?;
    let last = project_aux(&out, 1, true)?;
    Ok(GroverReport {
        qubits_k: k,
        target_j: target,
        iterations,
        success_probability: last[target].norm_sqr(),
        per_iteration_probs: probs,
    })
}

pub fn grover_run(k: usize, target: usize, iterations: Option<usize>) -> Result<GroverReport> {
    grover_run_with(k, target, iterations, &[])
}

pub fn grover_run_with(
    k: usize,
    target: usize,
    iterations: Option<usize>,
    subs: &[Substitution],
) -> Result<GroverReport> {
    check_args(k, target)?;
    let iterations = iterations.unwrap_or_else(|| auto_iterations(k));
    let net = apply_substitutions(&grover_network(k, target, iterations)?, subs)?;
    grover_evaluate(&net, k, target, iterations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::hadamard_dense;
    use crate::algorithms::qft::qft_matrix;
    use crate::linalg::Operator;
    use crate::network::embed_external;

    /// Dense iteration oracle: target probability after each step.
    fn dense_trajectory(k: usize, target: usize, iterations: usize) -> Vec<f64> {
        let dim = 1 << k;
        let f = qft_matrix(k).unwrap();
        let mut r2 = Operator::identity(dim);
        r2[(target, target)] = -ONE;
        let mut r0 = Operator::identity(dim).scale(-ONE);
        r0[(0, 0)] = ONE;
        let step = f.adjoint().matmul(&r0).unwrap().matmul(&f).unwrap().matmul(&r2).unwrap();
        let mut psi = Vector::uniform(dim);
        let mut out = vec![psi[target].norm_sqr()];
        for _ in 0..iterations {
            psi = step.apply(&psi).unwrap();
            out.push(psi[target].norm_sqr());
        }
        out
    }

    #[test]
    fn two_qubits_one_iteration_is_certain() {
        for j in 0..4 {
            let r = grover_run(2, j, None).unwrap();
            assert_eq!(r.iterations, 1);
            assert!((r.success_probability - 1.0).abs() < 1e-14, "{}", r.success_probability);
        }
    }

    #[test]
    fn trajectory_matches_analytic_and_dense() {
        for k in 3..=5 {
            let theta = (2f64.powf(-(k as f64) / 2.0)).asin();
            let iters = auto_iterations(k);
            let r = grover_run(k, (1 << k) - 2, Some(iters)).unwrap();
            let dense = dense_trajectory(k, (1 << k) - 2, iters);
            assert_eq!(r.per_iteration_probs.len(), iters + 1);
            for (t, (&p, &d)) in r.per_iteration_probs.iter().zip(&dense).enumerate() {
                let analytic = ((2 * t + 1) as f64 * theta).sin().powi(2);
                assert!((p - analytic).abs() < 1e-8, "k={k} t={t}");
                assert!((p - d).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn fixed_iteration_values() {
        let r = grover_run(4, 5, Some(3)).unwrap();
        let expect = (7.0 * 0.25f64.asin()).sin().powi(2);
        assert!((r.success_probability - expect).abs() < 1e-6);
        assert!((r.success_probability - 0.961).abs() < 1e-3);
        let r0 = grover_run(3, 2, Some(0)).unwrap();
        assert!((r0.success_probability - 0.125).abs() < 1e-15);
        assert!(grover_run(2, 4, None).is_err());
    }

    #[test]
    fn dense_substitutes_change_nothing() {
        let (k, j, iters) = (3, 6, 2);
        let native = grover_run(k, j, Some(iters)).unwrap();
        let f = embed_external(&qft_matrix(k).unwrap(), false).unwrap();
        let f_inv = embed_external(&qft_matrix(k).unwrap().adjoint(), false).unwrap();
        let mut subs: Vec<Substitution> = vec![("hadamard".into(), embed_external(&hadamard_dense(k, 1).unwrap(), false).unwrap())];
        for t in 1..=iters {
            subs.push((format!("t{t}:qft"), f.clone()));
            subs.push((format!("t{t}:inverse-qft"), f_inv.clone()));
        }
        let swapped = grover_run_with(k, j, Some(iters), &subs).unwrap();
        assert!((native.success_probability - swapped.success_probability).abs() < 1e-10);
        for (a, b) in native.per_iteration_probs.iter().zip(&swapped.per_iteration_probs) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
