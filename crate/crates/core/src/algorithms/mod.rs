//! Entire networks for the QFT, Grover's search and Shor's factoring.
//!
//! Pipelines are connector chains of labeled subnetworks. Any slot can be
//! swapped for another network of the same dimension (for example a dense
//! `embed_external` operator) through a [`Substitution`] list.

pub mod grover;
pub mod measure;
pub mod number;
pub mod qft;
pub mod shor;

pub use grover::{grover_network, grover_run, grover_run_with, GroverReport};
pub use measure::{measure_register, MeasureMode, MeasureOutcome};
pub use number::continued_fraction;
pub use qft::{inverse_qft_network, qft_matrix, qft_network};
pub use shor::{shor_network, shor_run, shor_run_with, ShorMeasurement, ShorReport};

use crate::compiler::hadamard;
use crate::error::Result;
use crate::linalg::{kron_all, Operator};
use crate::network::{connector_chain, tensor_lift, Network};

/// Slot label and the network that replaces it.
pub type Substitution = (String, Network);

pub fn apply_substitutions(net: &Network, subs: &[Substitution]) -> Result<Network> {
    subs.iter()
        .try_fold(net.clone(), |acc, (label, replacement)| acc.replace_slot(label, replacement))
}

/// Connector chain with `nets[0]` applied first.
pub fn chain_in_order(nets: &[Network]) -> Result<Network> {
    let reversed: Vec<_> = nets.iter().rev().cloned().collect();
    connector_chain(&reversed)
}

/// `Q~(H)`: one Hadamard per qubit of a leading `k`-qubit register, chained,
/// with the `tail` registers left alone.
pub fn hadamard_prep(k: usize, tail: &[usize]) -> Result<Network> {
    let mut dims = vec![2; k];
    dims.extend_from_slice(tail);
    let h = hadamard();
    let stages = (0..k)
        .map(|i| Ok(tensor_lift(&h, i, &dims)?.with_label(format!("H({i})"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(chain_in_order(&stages)?.with_label("hadamard"))
}

/// Dense `H^(x)k (x) I_tail`, the external stand-in for [`hadamard_prep`].
pub fn hadamard_dense(k: usize, tail_dim: usize) -> Result<Operator> {
    let mut factors = vec![hadamard(); k];
    factors.push(Operator::identity(tail_dim));
    kron_all(&factors)
}
