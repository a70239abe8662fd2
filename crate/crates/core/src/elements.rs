//! Circuit elements acting on `register (x) aux`.
//!
//! With `c+ = |1><0|` on the auxiliary qubit, every rotator and transitor has
//! the form `I + (X (x) I_A) C+` with `C+ = I_R (x) c+`. Because `c+^2 = 0` the
//! exponential truncates after the linear term, and any two such factors
//! commute. Elements are applied by direct amplitude updates; the dense
//! matrices from [`materialize_element`] exist for verification only.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{reject, Result};
use crate::limits::{check_cap, MATERIALIZE_DIM_CAP};
use crate::linalg::{kron, Amplitude, Operator, ONE, ZERO};
use crate::registers::AugmentedState;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Element {
    /// `exp{(amp |m><m| (x) I_A) C+}`
    Rotator { m: usize, amp: Amplitude },
    /// `exp{(amp |m><n| (x) I_A) C+}`, `m != n`
    Transitor { m: usize, n: usize, amp: Amplitude },
    /// `C+ = I_R (x) |1><0|`
    Jointer,
    /// `C = I_R (x) |0><1|`
    Connector,
    /// `D = C+ C`, keeps the aux-1 branch.
    #[serde(rename = "proj_d")]
    ProjectorD,
    /// `P = C C+`, keeps the aux-0 branch.
    #[serde(rename = "proj_p")]
    ProjectorP,
    /// A dense operator plugged in from elsewhere. With `register_only` it
    /// acts as `op (x) I_A`; otherwise in Q-form, `I + (op (x) I_A) C+`.
    External {
        matrix: Box<Operator>,
        register_only: bool,
    },
}

pub fn build_rotator(m: usize, amp: Amplitude, dim: usize) -> Result<Element> {
    if m >= dim {
        return reject(format!("rotator index {m} out of range for dim {dim}"));
    }
    Ok(Element::Rotator { m, amp })
}

pub fn build_transitor(m: usize, n: usize, amp: Amplitude, dim: usize) -> Result<Element> {
    if m == n {
        return reject("transitor needs m != n; use a rotator for diagonal entries");
    }
    if m >= dim || n >= dim {
        return reject(format!("transitor indices ({m},{n}) out of range for dim {dim}"));
    }
    Ok(Element::Transitor { m, n, amp })
}

impl Element {
    pub fn kind(&self) -> &'static str {
        match self {
            Element::Rotator { .. } => "rotator",
            Element::Transitor { .. } => "transitor",
            Element::Jointer => "jointer",
            Element::Connector => "connector",
            Element::ProjectorD => "proj_d",
            Element::ProjectorP => "proj_p",
            Element::External { .. } => "external",
        }
    }

    /// True for elements of the form `I + X (x) c+`; these commute pairwise and
    /// obey the sum law.
    pub fn is_raising(&self) -> bool {
        matches!(
            self,
            Element::Rotator { .. }
                | Element::Transitor { .. }
                | Element::External {
                    register_only: false,
                    ..
                }
        )
    }

    /// Inverse of a raising element (`I - X (x) c+`).
    pub fn negated(&self) -> Option<Element> {
        match self {
            Element::Rotator { m, amp } => Some(Element::Rotator { m: *m, amp: -amp }),
            Element::Transitor { m, n, amp } => Some(Element::Transitor {
                m: *m,
                n: *n,
                amp: -amp,
            }),
            Element::External {
                matrix,
                register_only: false,
            } => Some(Element::External {
                matrix: Box::new(matrix.scale(-ONE)),
                register_only: false,
            }),
            _ => None,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Element::Rotator { m, amp } => build_rotator(*m, *amp, dim).map(drop),
            Element::Transitor { m, n, amp } => build_transitor(*m, *n, *amp, dim).map(drop),
            Element::External { matrix, .. } => {
                if !matrix.is_square() || matrix.rows() != dim {
                    return reject(format!(
                        "external operator is {}x{}, register dim is {dim}",
                        matrix.rows(),
                        matrix.cols()
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Number of amplitude read-modify-writes one application costs on a
    /// register of `dim` states repeated over `spectator` idle copies.
    pub fn amplitude_ops(&self, dim: usize, spectator: usize) -> u64 {
        let (d, s) = (dim as u64, spectator as u64);
        match self {
            Element::Rotator { .. } | Element::Transitor { .. } => s,
            Element::Jointer | Element::Connector => 2 * s * d,
            Element::ProjectorD | Element::ProjectorP => s * d,
            Element::External {
                register_only: true,
                ..
            } => 2 * s * d * d,
            Element::External { .. } => s * d * d,
        }
    }
}

/// Apply one element in place. `amps` spans `2 * spectator * dim` amplitudes
/// laid out as `aux * (spectator * dim) + i * dim + m`, where `i` indexes the
/// idle leading register the element does not touch.
pub(crate) fn apply_in_place(e: &Element, amps: &mut [Amplitude], dim: usize, spectator: usize) {
    let half = dim * spectator;
    debug_assert_eq!(amps.len(), 2 * half);
    let (b0, b1) = amps.split_at_mut(half);
    match e {
        Element::Rotator { m, amp } => {
            for i in 0..spectator {
                let k = i * dim + m;
                b1[k] += amp * b0[k];
            }
        }
        Element::Transitor { m, n, amp } => {
            for i in 0..spectator {
                let base = i * dim;
                b1[base + m] += amp * b0[base + n];
            }
        }
        Element::Jointer => {
            b1.copy_from_slice(b0);
            b0.fill(ZERO);
        }
        Element::Connector => {
            b0.copy_from_slice(b1);
            b1.fill(ZERO);
        }
        Element::ProjectorD => b0.fill(ZERO),
        Element::ProjectorP => b1.fill(ZERO),
        Element::External {
            matrix,
            register_only: true,
        } => {
            for branch in [b0, b1] {
                for block in branch.chunks_mut(dim) {
                    let out = matvec(matrix, block);
                    block.copy_from_slice(&out);
                }
            }
        }
        Element::External {
            matrix,
            register_only: false,
        } => {
            for (src, dst) in b0.chunks(dim).zip(b1.chunks_mut(dim)) {
                for (d, x) in dst.iter_mut().zip(matvec(matrix, src)) {
                    *d += x;
                }
            }
        }
    }
}

fn matvec(a: &Operator, x: &[Amplitude]) -> Vec<Amplitude> {
    (0..a.rows())
        .map(|i| a.row(i).iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

/// Apply an element to an augmented state, returning the new state.
pub fn apply_element(e: &Element, s: &AugmentedState) -> Result<AugmentedState> {
    if !s.layout().has_aux {
        return reject("elements act on layouts with an auxiliary qubit");
    }
    let dim = s.register_dim();
    e.validate(dim)?;
    let mut out = s.clone();
    apply_in_place(e, out.amplitudes_mut(), dim, 1);
    Ok(out)
}

fn aux_op(entries: [[f64; 2]; 2]) -> Operator {
    Operator::from_fn(2, 2, |i, j| Complex64::new(entries[i][j], 0.0))
}

/// `c+ = |1><0|`
pub fn aux_raise() -> Operator {
    aux_op([[0.0, 0.0], [1.0, 0.0]])
}

/// `c = |0><1|`
pub fn aux_lower() -> Operator {
    aux_op([[0.0, 1.0], [0.0, 0.0]])
}

/// Dense `(2 dim) x (2 dim)` matrix of an element in the aux-outermost layout.
pub fn materialize_element(e: &Element, dim: usize) -> Result<Operator> {
    check_cap("materialize dim", dim, MATERIALIZE_DIM_CAP)?;
    e.validate(dim)?;
    let id2 = Operator::identity(2);
    let id_r = Operator::identity(dim);
    let raised = |x: &Operator| -> Result<Operator> {
        Operator::identity(2 * dim).add(&kron(&aux_raise(), x)?)
    };
    match e {
        Element::Rotator { m, amp } => raised(&Operator::elementary(*m, *m, dim).scale(*amp)),
        Element::Transitor { m, n, amp } => {
            raised(&Operator::elementary(*m, *n, dim).scale(*amp))
        }
        Element::Jointer => kron(&aux_raise(), &id_r),
        Element::Connector => kron(&aux_lower(), &id_r),
        Element::ProjectorD => kron(&aux_op([[0.0, 0.0], [0.0, 1.0]]), &id_r),
        Element::ProjectorP => kron(&aux_op([[1.0, 0.0], [0.0, 0.0]]), &id_r),
        Element::External {
            matrix,
            register_only: true,
        } => kron(&id2, matrix),
        Element::External { matrix, .. } => raised(matrix),
    }
}

/// Adjacent exchange `E(m, m+1) = sum_{j != m, m+1} |j><j| + |m><m+1| + |m+1><m|`.
pub fn adjacent_exchange(m: usize, dim: usize) -> Result<Operator> {
    if m + 1 >= dim {
        return reject(format!("adjacent exchange ({m},{}) out of range for dim {dim}", m + 1));
    }
    let mut e = Operator::identity(dim);
    e[(m, m)] = ZERO;
    e[(m + 1, m + 1)] = ZERO;
    e[(m, m + 1)] = ONE;
    e[(m + 1, m)] = ONE;
    Ok(e)
}

/// Adjacent swaps composing `E(m, n)`, listed by increasing product index `j`
/// (each entry is the lower index of the swapped pair). Applying them in this
/// order carries `|n>` one step at a time to `|m>`.
pub fn exchange_factors(m: usize, n: usize) -> Vec<usize> {
    use std::cmp::Ordering::*;
    match n.cmp(&m) {
        // E(j+1, j), j = n .. m-1
        Less => (n..m).collect(),
        // E(n-j-1, n-j), j = 0 .. n-m-1
        Greater => (0..n - m).map(|j| n - j - 1).collect(),
        Equal => Vec::new(),
    }
}

fn check_exchange_range(m: usize, n: usize, dim: usize) -> Result<()> {
    if m >= dim || n >= dim {
        return reject(format!("exchange indices ({m},{n}) out of range for dim {dim}"));
    }
    Ok(())
}

/// Generalized exchange gate `E(m, n)`, with `E(m, n)|n> = |m>`.
pub fn exchange_gate(m: usize, n: usize, dim: usize) -> Result<Operator> {
    check_exchange_range(m, n, dim)?;
    exchange_factors(m, n)
        .into_iter()
        .try_fold(Operator::identity(dim), |acc, j| adjacent_exchange(j, dim)?.matmul(&acc))
}

/// The same factors multiplied left to right in listed order. This reading
/// does not satisfy `E(m, n)|n> = |m>` once `|m - n| >= 2`; it is kept so the
/// discrepancy can be demonstrated.
pub fn exchange_gate_left_to_right(m: usize, n: usize, dim: usize) -> Result<Operator> {
    check_exchange_range(m, n, dim)?;
    exchange_factors(m, n)
        .into_iter()
        .try_fold(Operator::identity(dim), |acc, j| acc.matmul(&adjacent_exchange(j, dim)?))
}

/// Image of basis index `j` under `E(m, n)`, computed by walking the swaps.
pub fn exchange_image(m: usize, n: usize, j: usize) -> usize {
    exchange_factors(m, n).into_iter().fold(j, |x, lo| {
        if x == lo {
            lo + 1
        } else if x == lo + 1 {
            lo
        } else {
            x
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{is_hermitian, is_unitary, random_amplitude, random_state, Vector};
    use crate::registers::{make_augmented, RegisterLayout};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Amplitude {
        Complex64::new(re, im)
    }

    fn basis_aug(m: usize, dim: usize) -> AugmentedState {
        make_augmented(&Vector::basis(m, dim), &RegisterLayout::single(dim).unwrap()).unwrap()
    }

    #[test]
    fn rotator_action() {
        let alpha = c(0.3, -0.7);
        let r = build_rotator(2, alpha, 4).unwrap();
        let out = apply_element(&r, &basis_aug(2, 4)).unwrap();
        assert_eq!(out.branch(0), Vector::basis(2, 4).entries());
        assert_eq!(out.branch(1)[2], alpha);
        // other basis states untouched
        let s = basis_aug(1, 4);
        assert_eq!(apply_element(&r, &s).unwrap(), s);
        // zero amplitude is the identity
        let r0 = build_rotator(2, ZERO, 4).unwrap();
        let s = basis_aug(2, 4);
        assert_eq!(apply_element(&r0, &s).unwrap(), s);
        assert!(build_rotator(4, ONE, 4).is_err());
    }

    #[test]
    fn transitor_action() {
        let beta = c(-1.1, 0.4);
        let t = build_transitor(0, 3, beta, 4).unwrap();
        let out = apply_element(&t, &basis_aug(3, 4)).unwrap();
        assert_eq!(out.branch(0), Vector::basis(3, 4).entries());
        assert_eq!(out.branch(1)[0], beta);
        assert_eq!(out.branch(1)[3], ZERO);
        let s = basis_aug(0, 4);
        assert_eq!(apply_element(&t, &s).unwrap(), s);
        assert!(build_transitor(1, 1, ONE, 4).is_err());
        assert!(build_transitor(1, 4, ONE, 4).is_err());
    }

    #[test]
    fn transitor_and_its_negation_cancel() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let beta = random_amplitude(&mut rng);
        let t = build_transitor(1, 2, beta, 4).unwrap();
        let tn = t.negated().unwrap();
        let a = materialize_element(&t, 4).unwrap();
        let b = materialize_element(&tn, 4).unwrap();
        let id = Operator::identity(8);
        assert!(a.matmul(&b).unwrap().max_abs_diff(&id).unwrap() < 1e-15);
        assert!(b.matmul(&a).unwrap().max_abs_diff(&id).unwrap() < 1e-15);
    }

    #[test]
    fn jointer_connector_projectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let psi = random_state(&mut rng, 4);
        let s = make_augmented(&psi, &RegisterLayout::single(4).unwrap()).unwrap();
        let j = apply_element(&Element::Jointer, &s).unwrap();
        assert_eq!(j.branch(1), psi.entries());
        assert!(j.branch(0).iter().all(|z| *z == ZERO));
        let jj = apply_element(&Element::Jointer, &j).unwrap();
        assert_eq!(jj.norm_sqr(), 0.0);
        let back = apply_element(&Element::Connector, &j).unwrap();
        assert_eq!(back, s);

        let p = apply_element(&Element::ProjectorP, &j).unwrap();
        assert_eq!(p.norm_sqr(), 0.0);
        let d = apply_element(&Element::ProjectorD, &j).unwrap();
        assert_eq!(d, j);
    }

    #[test]
    fn apply_requires_aux() {
        let layout = RegisterLayout::new(vec![2], false).unwrap();
        let s = AugmentedState::new(layout, Vector::basis(0, 2)).unwrap();
        assert!(apply_element(&Element::Jointer, &s).is_err());
    }

    #[test]
    fn materialized_forms() {
        let alpha = c(0.5, 0.25);
        let r = materialize_element(&Element::Rotator { m: 1, amp: alpha }, 2).unwrap();
        let mut expect = Operator::identity(4);
        expect[(2 + 1, 1)] = alpha;
        assert_eq!(r, expect);

        let j = materialize_element(&Element::Jointer, 2).unwrap();
        let mut expect = Operator::zeros(4, 4);
        expect[(2, 0)] = ONE;
        expect[(3, 1)] = ONE;
        assert_eq!(j, expect);

        let p = materialize_element(&Element::ProjectorP, 2).unwrap();
        assert_eq!(p, Operator::diagonal(&[ONE, ONE, ZERO, ZERO]));
    }

    #[test]
    fn apply_agrees_with_materialized() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let dim = 4;
        let ext = crate::linalg::random_operator(&mut rng, dim, dim);
        let elements = vec![
            Element::Rotator {
                m: 3,
                amp: random_amplitude(&mut rng),
            },
            Element::Transitor {
                m: 0,
                n: 2,
                amp: random_amplitude(&mut rng),
            },
            Element::Jointer,
            Element::Connector,
            Element::ProjectorD,
            Element::ProjectorP,
            Element::External {
                matrix: Box::new(ext.clone()),
                register_only: true,
            },
            Element::External {
                matrix: Box::new(ext),
                register_only: false,
            },
        ];
        let layout = RegisterLayout::single(dim).unwrap();
        for e in &elements {
            let v = random_state(&mut rng, 2 * dim);
            let s = AugmentedState::new(layout.clone(), v.clone()).unwrap();
            let got = apply_element(e, &s).unwrap();
            let want = materialize_element(e, dim).unwrap().apply(&v).unwrap();
            assert!(got.amplitudes().max_abs_diff(&want).unwrap() < 1e-12, "{}", e.kind());
        }
    }

    #[test]
    fn nilpotency_and_anticommutation() {
        for dim in [2, 4, 8] {
            let cd = materialize_element(&Element::Jointer, dim).unwrap();
            let cc = materialize_element(&Element::Connector, dim).unwrap();
            assert_eq!(cd.matmul(&cd).unwrap().max_abs(), 0.0);
            assert_eq!(cc.matmul(&cc).unwrap().max_abs(), 0.0);
            let anti = cc.matmul(&cd).unwrap().add(&cd.matmul(&cc).unwrap()).unwrap();
            assert_eq!(anti, Operator::identity(2 * dim));
        }
    }

    #[test]
    fn exchange_examples() {
        let cnot = Operator::from_fn(4, 4, |i, j| {
            let target = [0, 1, 3, 2][j];
            if i == target {
                ONE
            } else {
                ZERO
            }
        });
        assert_eq!(exchange_gate(2, 3, 4).unwrap(), cnot);
        let swap = Operator::from_fn(4, 4, |i, j| if i == [0, 2, 1, 3][j] { ONE } else { ZERO });
        assert_eq!(exchange_gate(1, 2, 4).unwrap(), swap);
        assert_eq!(exchange_gate(2, 2, 4).unwrap(), Operator::identity(4));
        assert!(exchange_gate(0, 4, 4).is_err());
    }

    #[test]
    fn exchange_transit_property_exhaustive() {
        for dim in [2, 5, 16] {
            for m in 0..dim {
                for n in 0..dim {
                    let e = exchange_gate(m, n, dim).unwrap();
                    assert_eq!(e.column(n), Vector::basis(m, dim), "E({m},{n})|n>");
                    // <m|E = <n|
                    assert_eq!(e.row(m), Vector::basis(n, dim).entries());
                    assert_eq!(exchange_image(m, n, n), m);
                    assert!(is_unitary(&e, 0.0));
                }
            }
        }
    }

    #[test]
    fn adjacent_exchange_is_involution() {
        for m in 0..7 {
            let e = adjacent_exchange(m, 8).unwrap();
            assert!(is_hermitian(&e, 0.0));
            assert_eq!(e.matmul(&e).unwrap(), Operator::identity(8));
        }
    }

    #[test]
    fn left_to_right_reading_breaks_transit_property() {
        // adjacent pairs agree, longer products do not
        assert_eq!(
            exchange_gate_left_to_right(1, 0, 4).unwrap(),
            exchange_gate(1, 0, 4).unwrap()
        );
        let lit = exchange_gate_left_to_right(2, 0, 4).unwrap();
        assert_ne!(lit.column(0), Vector::basis(2, 4));
        let lit = exchange_gate_left_to_right(0, 2, 4).unwrap();
        assert_ne!(lit.column(2), Vector::basis(0, 4));
    }

    #[test]
    fn element_json_encoding() {
        let e = Element::Transitor {
            m: 1,
            n: 0,
            amp: c(0.5, -1.0),
        };
        let text = serde_json::to_string(&e).unwrap();
        assert_eq!(text, r#"{"type":"transitor","m":1,"n":0,"amp":[0.5,-1.0]}"#);
        assert_eq!(serde_json::to_string(&Element::ProjectorD).unwrap(), r#"{"type":"proj_d"}"#);
        let ext: Element = serde_json::from_str(
            r#"{"type":"external","matrix":{"rows":1,"cols":1,"entries":[[2,0]]},"register_only":true}"#,
        )
        .unwrap();
        assert_eq!(ext.kind(), "external");
    }
}
