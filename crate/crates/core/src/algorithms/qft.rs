//! Quantum Fourier transform: dense matrix and its entire network.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{reject, Result};
use crate::limits::{check_cap, dim_cap, ELEMENT_CAP};
use crate::linalg::{Operator, Vector};
use crate::network::{compose_sum, q_of, raising, Network};

fn qft_dim(k: usize) -> Result<usize> {
    if k == 0 || k >= 32 {
        return reject(format!("qubit count {k} out of range"));
    }
    let n = 1usize << k;
    check_cap("qft dim", n, dim_cap())?;
    check_cap("qft entries", n * n, ELEMENT_CAP)?;
    Ok(n)
}

/// `e^{2 pi i x / n}` with `x` reduced mod `n` first.
fn root_of_unity(x: usize, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (x % n) as f64 / n as f64)
}

/// `F_mn = e^{2 pi i mn / 2^k} / sqrt(2^k)`.
pub fn qft_matrix(k: usize) -> Result<Operator> {
    let n = qft_dim(k)?;
    let s = 1.0 / (n as f64).sqrt();
    Ok(Operator::from_fn(n, n, |r, c| root_of_unity(r * c % n, n) * s))
}

/// Column `F|n>` as a product state: qubit `j` carries
/// `(|0> + e^{2 pi i n 2^(k-1-j) / 2^k} |1>) / sqrt 2`.
pub fn qft_column(k: usize, n: usize) -> Result<Vector> {
    let dim = qft_dim(k)?;
    if n >= dim {
        return reject(format!("column {n} out of range for {k} qubits"));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = Vector::from_vec(vec![Complex64::new(1.0, 0.0)]);
    for j in 0..k {
        let shift = (n << (k - 1 - j)) % dim;
        let q = Vector::from_vec(vec![Complex64::new(h, 0.0), root_of_unity(shift, dim) * h]);
        v = v.kron(&q);
    }
    Ok(v)
}

/// `Q(F)` as the sum of the rank-one column networks `Q(F|n><n|)`.
pub fn qft_network(k: usize) -> Result<Network> {
    let dim = qft_dim(k)?;
    let cols = (0..dim)
        .map(|n| {
            let col = qft_column(k, n)?;
            let stages = (0..dim).map(|m| raising(m, n, col[m])).collect();
            Network::new(dim, format!("col{n}"), stages)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(compose_sum(&cols)?.with_label("qft"))
}

/// `Q(F^-1)`, the same construction with conjugated phases.
pub fn inverse_qft_network(k: usize) -> Result<Network> {
    Ok(q_of(&qft_matrix(k)?.adjoint())?.with_label("inverse-qft"))
}
