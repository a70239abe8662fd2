//! From matrices to elements and back to gates: Pauli expansion of `|m><n|`,
//! the exchange-gate form of `Q(U)`, and networks for the elementary gates.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elements::{exchange_gate, exchange_image, Element};
use crate::error::{reject, Result};
use crate::linalg::{kron, kron_all, Amplitude, Operator, ONE, ZERO};
use crate::network::{compose_sum, q_of, raising, tensor_lift, Network};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    /// The standard `sigma_y = [[0, -i], [i, 0]]`.
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> Operator {
        let (o, z, i) = (ONE, ZERO, Complex64::new(0.0, 1.0));
        let e = match self {
            Pauli::I => [o, z, z, o],
            Pauli::X => [z, o, o, z],
            Pauli::Y => [z, -i, i, z],
            Pauli::Z => [o, z, z, -o],
        };
        Operator::from_vec(2, 2, e.to_vec()).expect("2x2")
    }
}

/// `coefficient * letters[0] (x) letters[1] (x) ...`, first letter on the
/// most significant qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coefficient: Amplitude,
    pub letters: Vec<Pauli>,
}

impl PauliTerm {
    pub fn to_operator(&self) -> Result<Operator> {
        let mats: Vec<_> = self.letters.iter().map(|p| p.matrix()).collect();
        Ok(kron_all(&mats)?.scale(self.coefficient))
    }
}

/// Single-qubit factor of `|alpha><beta|` as two weighted Pauli letters:
/// `|0><0| = (I+Z)/2`, `|1><1| = (I-Z)/2`, `|0><1| = (X + i sigma_y)/2`,
/// `|1><0| = (X - i sigma_y)/2`.
fn qubit_factor(alpha: u8, beta: u8) -> [(Amplitude, Pauli); 2] {
    let h = Complex64::new(0.5, 0.0);
    let ih = Complex64::new(0.0, 0.5);
    match (alpha, beta) {
        (0, 0) => [(h, Pauli::I), (h, Pauli::Z)],
        (1, 1) => [(h, Pauli::I), (-h, Pauli::Z)],
        (0, 1) => [(h, Pauli::X), (ih, Pauli::Y)],
        _ => [(h, Pauli::X), (-ih, Pauli::Y)],
    }
}

/// Expand `|m><n|` on `k` qubits into `2^k` Pauli strings.
pub fn pauli_decompose(m: usize, n: usize, k: usize) -> Result<Vec<PauliTerm>> {
    if k == 0 || k >= usize::BITS as usize {
        return reject(format!("qubit count {k} out of range"));
    }
    let dim = 1usize << k;
    if m >= dim || n >= dim {
        return reject(format!("indices ({m},{n}) out of range for {k} qubits"));
    }
    let mut terms = vec![PauliTerm {
        coefficient: ONE,
        letters: Vec::with_capacity(k),
    }];
    for q in 0..k {
        let shift = k - 1 - q;
        let alpha = ((m >> shift) & 1) as u8;
        let beta = ((n >> shift) & 1) as u8;
        let factor = qubit_factor(alpha, beta);
        terms = terms
            .into_iter()
            .flat_map(|t| {
                factor.iter().map(move |&(c, p)| {
                    let mut letters = t.letters.clone();
                    letters.push(p);
                    PauliTerm {
                        coefficient: t.coefficient * c,
                        letters,
                    }
                })
            })
            .collect();
    }
    Ok(terms)
}

/// Sum of expanded Pauli terms as a dense matrix.
pub fn pauli_sum(terms: &[PauliTerm]) -> Result<Operator> {
    let first = terms
        .first()
        .ok_or_else(|| crate::QnetError::RejectedInput("empty Pauli sum".into()))?;
    let dim = 1usize << first.letters.len();
    terms
        .iter()
        .try_fold(Operator::zeros(dim, dim), |acc, t| acc.add(&t.to_operator()?))
}

/// One factor `U_mn E(m, n) |n><n|` of the exchange form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExchangeTerm {
    pub m: usize,
    pub n: usize,
    pub amp: Amplitude,
}

impl ExchangeTerm {
    /// Dense `amp * E(m, n) * |n><n|`.
    pub fn operator(&self, dim: usize) -> Result<Operator> {
        let proj = Operator::elementary(self.n, self.n, dim);
        Ok(exchange_gate(self.m, self.n, dim)?.matmul(&proj)?.scale(self.amp))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExchangeForm {
    pub network: Network,
    pub terms: Vec<ExchangeTerm>,
}

impl ExchangeForm {
    /// `sum U_mn E(m, n)|n><n|`, which should give back `U`.
    pub fn reconstruct(&self) -> Result<Operator> {
        let dim = self.network.dim();
        self.terms
            .iter()
            .try_fold(Operator::zeros(dim, dim), |acc, t| acc.add(&t.operator(dim)?))
    }
}

/// `Q(U) = prod exp{(U_mn E(m,n)|n><n| (x) I_A) C+}`. Each factor is emitted as
/// the element that moves `|n>` to `E(m,n)|n>`, found by walking the swaps.
pub fn exchange_form(u: &Operator) -> Result<ExchangeForm> {
    if !u.is_square() {
        return reject(format!("exchange form needs a square matrix, got {}x{}", u.rows(), u.cols()));
    }
    let dim = u.rows();
    if !dim.is_power_of_two() {
        return reject(format!("exchange form needs a qubit register, dim {dim} is not 2^k"));
    }
    let terms: Vec<_> = u
        .nonzeros()
        .map(|(m, n, amp)| ExchangeTerm { m, n, amp })
        .collect();
    let stages = terms
        .iter()
        .map(|t| raising(exchange_image(t.m, t.n, t.n), t.n, t.amp))
        .collect();
    Ok(ExchangeForm {
        network: Network::new(dim, "exchange-form", stages)?,
        terms,
    })
}

fn elements_net(dim: usize, label: &str, stages: Vec<Element>) -> Result<Network> {
    Network::new(dim, label, stages)
}

fn identity_part(dim: usize) -> Result<Network> {
    Ok(q_of(&Operator::identity(dim))?.with_label("identity"))
}

/// `Q(S(e^{i alpha}))`: identity subnetwork plus one rotator `e^{i alpha} - 1`
/// on `|n>`.
pub fn gate_phase(n: usize, alpha: f64, dim: usize) -> Result<Network> {
    if n >= dim {
        return reject(format!("phase index {n} out of range for dim {dim}"));
    }
    let amp = Complex64::from_polar(1.0, alpha) - ONE;
    let phase = elements_net(dim, "phase", vec![Element::Rotator { m: n, amp }])?;
    Ok(compose_sum(&[identity_part(dim)?, phase])?.with_label("phase"))
}

/// `Q(I (x) ... (x) U1 (x) ... (x) I)` with `U1` on qubit `i` of `k`.
pub fn gate_single_qubit(u1: &Operator, i: usize, k: usize) -> Result<Network> {
    if u1.rows() != 2 || u1.cols() != 2 {
        return reject("single-qubit gate must be 2x2");
    }
    if i >= k {
        return reject(format!("qubit {i} out of range for {k} qubits"));
    }
    Ok(tensor_lift(u1, i, &vec![2; k])?.with_label(format!("U({i})")))
}

/// `Q(|0><0| (x) I + |1><1| (x) U)` as two factors.
pub fn gate_controlled(u: &Operator) -> Result<Network> {
    if !u.is_square() {
        return reject("controlled gate needs a square target operator");
    }
    let d = u.rows();
    let idle = elements_net(
        2 * d,
        "control-0",
        (0..d).map(|m| Element::Rotator { m, amp: ONE }).collect(),
    )?;
    let active = elements_net(
        2 * d,
        "control-1",
        u.nonzeros().map(|(m, n, amp)| raising(d + m, d + n, amp)).collect(),
    )?;
    Ok(compose_sum(&[idle, active])?.with_label("controlled"))
}

/// Toffoli from `I - |11><11| (x) I + |11><11| (x) N`, three factors.
pub fn gate_toffoli() -> Result<Network> {
    let unflip = elements_net(
        8,
        "remove",
        vec![
            Element::Rotator { m: 6, amp: -ONE },
            Element::Rotator { m: 7, amp: -ONE },
        ],
    )?;
    let not = elements_net(
        8,
        "not",
        vec![
            Element::Transitor { m: 6, n: 7, amp: ONE },
            Element::Transitor { m: 7, n: 6, amp: ONE },
        ],
    )?;
    Ok(compose_sum(&[identity_part(8)?, unflip, not])?.with_label("toffoli"))
}

/// Rotator-only network for `diag(entries)`.
pub fn gate_diagonal(entries: &[Amplitude]) -> Result<Network> {
    if entries.is_empty() {
        return reject("diagonal gate needs at least one entry");
    }
    let stages = entries
        .iter()
        .enumerate()
        .filter(|(_, z)| **z != ZERO)
        .map(|(m, &amp)| Element::Rotator { m, amp })
        .collect();
    elements_net(entries.len(), "diagonal", stages)
}

/// Hadamard `(1/sqrt 2)[[1, 1], [1, -1]]`.
pub fn hadamard() -> Operator {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    Operator::from_vec(2, 2, vec![h, h, h, -h]).expect("2x2")
}

pub fn pauli_x() -> Operator {
    Pauli::X.matrix()
}

/// Dense `|0><0| (x) I + |1><1| (x) U`.
pub fn controlled_matrix(u: &Operator) -> Result<Operator> {
    let p0 = Operator::elementary(0, 0, 2);
    let p1 = Operator::elementary(1, 1, 2);
    kron(&p0, &Operator::identity(u.rows()))?.add(&kron(&p1, u)?)
}
