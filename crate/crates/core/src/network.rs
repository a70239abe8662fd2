//! Networks: ordered element sequences and the composition laws that build
//! them.
//!
//! `stages[0]` is applied to the state first, so the network's matrix is
//! `E_last * ... * E_1 * E_0`. A network may additionally be flagged as
//! `bypass`, meaning its operator is `I + (product of stages)`; this is how the
//! connector-chained product `I + C+ (prod_j C Q(U_j)) C C+` is represented,
//! since the additive identity cannot be written as a product of elements.
//!
//! Connector-delimited sub-sequences are recorded as labeled [`Slot`]s so a
//! plugged-in subnetwork can later be located or swapped by label.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elements::{apply_in_place, materialize_element, Element};
use crate::error::{reject, QnetError, Result};
use crate::limits::{check_cap, dim_cap, MATERIALIZE_DIM_CAP};
use crate::linalg::{Amplitude, Operator};
use crate::registers::AugmentedState;

/// A labeled range of stages holding one plugged-in subnetwork.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub label: String,
    pub start: usize,
    pub len: usize,
}

impl Slot {
    pub fn end(&self) -> usize {
        self.start + self.len
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNetwork")]
pub struct Network {
    dim: usize,
    label: String,
    stages: Vec<Element>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    slots: Vec<Slot>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    bypass: bool,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    spectator_dim: usize,
}

fn one() -> usize {
    1
}

fn is_one(x: &usize) -> bool {
    *x == 1
}

#[derive(Deserialize)]
struct RawNetwork {
    dim: usize,
    #[serde(default)]
    label: String,
    stages: Vec<Element>,
    #[serde(default)]
    slots: Vec<Slot>,
    #[serde(default)]
    bypass: bool,
    #[serde(default = "one")]
    spectator_dim: usize,
}

impl TryFrom<RawNetwork> for Network {
    type Error = QnetError;

    fn try_from(raw: RawNetwork) -> Result<Self> {
        let mut net = Network::new(raw.dim, raw.label, raw.stages)?;
        for slot in &raw.slots {
            if slot.end() > net.stages.len() {
                return reject(format!("slot '{}' runs past the last stage", slot.label));
            }
        }
        if raw.spectator_dim == 0 {
            return reject("spectator_dim must be positive");
        }
        net.slots = raw.slots;
        net.bypass = raw.bypass;
        net.spectator_dim = raw.spectator_dim;
        Ok(net)
    }
}

impl Network {
    pub fn new(dim: usize, label: impl Into<String>, stages: Vec<Element>) -> Result<Self> {
        if dim == 0 {
            return reject("network dim must be positive");
        }
        for e in &stages {
            e.validate(dim)?;
        }
        Ok(Network {
            dim,
            label: label.into(),
            stages,
            slots: Vec::new(),
            bypass: false,
            spectator_dim: 1,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Network {
            dim,
            label: "identity".into(),
            stages: Vec::new(),
            slots: Vec::new(),
            bypass: false,
            spectator_dim: 1,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn stages(&self) -> &[Element] {
        &self.stages
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn slot(&self, label: &str) -> Option<&Slot> {
        self.slots.iter().find(|s| s.label == label)
    }

    pub fn is_bypass(&self) -> bool {
        self.bypass
    }

    /// Dimension of the idle leading register (`I_in (x) ...`), 1 if none.
    pub fn spectator_dim(&self) -> usize {
        self.spectator_dim
    }

    /// Register dimension the network acts on, spectator included.
    pub fn register_dim(&self) -> usize {
        self.dim * self.spectator_dim
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// True when every stage is a rotator, transitor or Q-form external and
    /// there is no bypass term.
    pub fn is_raising_only(&self) -> bool {
        !self.bypass && self.stages.iter().all(Element::is_raising)
    }

    /// The nilpotent interior `Q~` of a product network (drops the bypass).
    pub fn tilde(&self) -> Network {
        Network {
            bypass: false,
            ..self.clone()
        }
    }

    /// Same stages acting on the out-register alone. Exact for two-register
    /// networks because the in-register factor is the identity.
    pub fn without_spectator(&self) -> Network {
        Network {
            spectator_dim: 1,
            ..self.clone()
        }
    }

    /// Replace the contents of slot `label` with `replacement`'s stages.
    /// Slots nested inside the replaced one are dropped; later slots shift.
    pub fn replace_slot(&self, label: &str, replacement: &Network) -> Result<Network> {
        let target = self
            .slot(label)
            .cloned()
            .ok_or_else(|| QnetError::RejectedInput(format!("no slot labeled '{label}'")))?;
        if replacement.dim != self.dim || replacement.spectator_dim != 1 {
            return reject(format!(
                "replacement dim {} does not fit slot of dim {}",
                replacement.dim, self.dim
            ));
        }
        let mut stages = self.stages[..target.start].to_vec();
        stages.extend(replacement.stages.iter().cloned());
        stages.extend(self.stages[target.end()..].iter().cloned());

        let new_len = replacement.stages.len();
        let shift = |pos: usize| pos + new_len - target.len;
        let mut slots = Vec::new();
        for s in &self.slots {
            if s.label == target.label {
                slots.push(Slot {
                    label: s.label.clone(),
                    start: s.start,
                    len: new_len,
                });
                slots.extend(replacement.slots.iter().map(|r| Slot {
                    label: format!("{}/{}", s.label, r.label),
                    start: r.start + s.start,
                    len: r.len,
                }));
            } else if s.end() <= target.start {
                slots.push(s.clone());
            } else if s.start >= target.end() {
                slots.push(Slot {
                    label: s.label.clone(),
                    start: shift(s.start),
                    len: s.len,
                });
            } else if s.start <= target.start && s.end() >= target.end() {
                // enclosing slot
                slots.push(Slot {
                    label: s.label.clone(),
                    start: s.start,
                    len: shift(s.len),
                });
            }
        }
        Ok(Network {
            stages,
            slots,
            ..self.clone()
        })
    }
}

/// `Q(U) = prod_{m,n} exp{(U_mn |m><n| (x) I_A) C+}`: one rotator per non-zero
/// diagonal entry and one transitor per non-zero off-diagonal entry.
pub fn q_of(u: &Operator) -> Result<Network> {
    q_of_with_threshold(u, 0.0)
}

/// As [`q_of`], additionally skipping entries with modulus `<= threshold`.
pub fn q_of_with_threshold(u: &Operator, threshold: f64) -> Result<Network> {
    if !u.is_square() {
        return reject(format!("Q(U) needs a square matrix, got {}x{}", u.rows(), u.cols()));
    }
    check_cap("register dim", u.rows(), dim_cap())?;
    let stages = u
        .nonzeros()
        .filter(|(_, _, z)| threshold <= 0.0 || z.norm() > threshold)
        .map(|(m, n, amp)| raising(m, n, amp))
        .collect();
    Ok(Network {
        dim: u.rows(),
        label: "Q(U)".into(),
        stages,
        slots: Vec::new(),
        bypass: false,
        spectator_dim: 1,
    })
}

pub(crate) fn raising(m: usize, n: usize, amp: Amplitude) -> Element {
    if m == n {
        Element::Rotator { m, amp }
    } else {
        Element::Transitor { m, n, amp }
    }
}

/// `Q^{-1}(U)`: every amplitude negated.
pub fn inverse_network(net: &Network) -> Result<Network> {
    if net.bypass {
        return Err(QnetError::NonInvertible("a connector-chained product"));
    }
    let stages = net
        .stages
        .iter()
        .rev()
        .map(|e| e.negated().ok_or(QnetError::NonInvertible(e.kind())))
        .collect::<Result<Vec<_>>>()?;
    Ok(Network {
        stages,
        slots: Vec::new(),
        label: format!("inverse({})", net.label),
        ..net.clone()
    })
}

/// Evaluate a network on an augmented state.
pub fn evaluate(net: &Network, s: &AugmentedState) -> Result<AugmentedState> {
    evaluate_observed(net, s, |_, _| {})
}

/// Evaluate and report the number of amplitude updates performed.
pub fn evaluate_counted(net: &Network, s: &AugmentedState) -> Result<(AugmentedState, u64)> {
    check_layout(net, s)?;
    let mut ops = s.amplitudes().dim() as u64;
    let mut out = s.clone();
    run_stages(net, &mut out, &mut ops, &mut |_, _| {});
    if net.bypass {
        add_input(&mut out, s);
        ops += s.amplitudes().dim() as u64;
    }
    Ok((out, ops))
}

/// Evaluate, calling `hook(slot_label, state)` right after each slot's last
/// stage. The hook may modify the running state (e.g. to renormalize).
pub fn evaluate_observed(
    net: &Network,
    s: &AugmentedState,
    mut hook: impl FnMut(&str, &mut AugmentedState),
) -> Result<AugmentedState> {
    check_layout(net, s)?;
    let mut ops = 0u64;
    let mut out = s.clone();
    run_stages(net, &mut out, &mut ops, &mut hook);
    if net.bypass {
        add_input(&mut out, s);
    }
    Ok(out)
}

fn check_layout(net: &Network, s: &AugmentedState) -> Result<()> {
    if !s.layout().has_aux {
        return reject("networks act on layouts with an auxiliary qubit");
    }
    if s.register_dim() != net.register_dim() {
        return reject(format!(
            "network acts on register dim {}, state has {}",
            net.register_dim(),
            s.register_dim()
        ));
    }
    Ok(())
}

fn run_stages(
    net: &Network,
    state: &mut AugmentedState,
    ops: &mut u64,
    hook: &mut dyn FnMut(&str, &mut AugmentedState),
) {
    let mut ends: Vec<(usize, &str)> = net.slots.iter().map(|s| (s.end(), s.label.as_str())).collect();
    ends.sort_by_key(|&(end, _)| end);
    let mut next = ends.iter().peekable();
    for (k, e) in net.stages.iter().enumerate() {
        apply_in_place(e, state.amplitudes_mut(), net.dim, net.spectator_dim);
        *ops += e.amplitude_ops(net.dim, net.spectator_dim);
        while let Some(&&(end, label)) = next.peek() {
            if end != k + 1 {
                break;
            }
            hook(label, state);
            next.next();
        }
    }
}

fn add_input(out: &mut AugmentedState, input: &AugmentedState) {
    for (o, i) in out.amplitudes_mut().iter_mut().zip(input.amplitudes().entries()) {
        *o += i;
    }
}

fn check_pure_factors(nets: &[Network], what: &str) -> Result<usize> {
    let first = nets
        .first()
        .ok_or_else(|| QnetError::RejectedInput(format!("{what} needs at least one network")))?;
    for n in nets {
        if n.dim != first.dim || n.spectator_dim != 1 {
            return reject(format!(
                "{what}: mixed dims {} and {} (or a two-register factor)",
                first.dim, n.dim
            ));
        }
    }
    Ok(first.dim)
}

/// Sum law: `Q(U_1 + ... + U_r) = Q(U_1) ... Q(U_r)`, a plain concatenation
/// of commuting raising elements.
pub fn compose_sum(nets: &[Network]) -> Result<Network> {
    let dim = check_pure_factors(nets, "compose_sum")?;
    if let Some(bad) = nets.iter().find(|n| !n.is_raising_only()) {
        return Err(QnetError::Composition(format!(
            "'{}' is not made of rotators/transitors only",
            bad.label
        )));
    }
    if nets.len() == 1 {
        return Ok(nets[0].clone());
    }
    let mut out = Network::identity(dim).with_label("sum");
    for (j, n) in nets.iter().enumerate() {
        push_slot(&mut out, n, &format!("part{j}"));
    }
    Ok(out)
}

/// Plain matrix product in application order: `nets[0]` acts first.
pub fn sequence(nets: &[Network]) -> Result<Network> {
    let dim = check_pure_factors(nets, "sequence")?;
    if let Some(bad) = nets.iter().find(|n| n.bypass) {
        return Err(QnetError::Composition(format!(
            "'{}' carries an identity bypass; wrap it in a connector chain instead",
            bad.label
        )));
    }
    let mut out = Network::identity(dim).with_label("sequence");
    for (j, n) in nets.iter().enumerate() {
        push_slot(&mut out, n, &format!("seq{j}"));
    }
    Ok(out)
}

fn push_slot(out: &mut Network, sub: &Network, fallback: &str) {
    let label = if sub.label.is_empty() {
        fallback.to_string()
    } else {
        sub.label.clone()
    };
    let start = out.stages.len();
    out.stages.extend(sub.stages.iter().cloned());
    out.slots.push(Slot {
        label: label.clone(),
        start,
        len: sub.stages.len(),
    });
    out.slots.extend(sub.slots.iter().map(|s| Slot {
        label: format!("{label}/{}", s.label),
        start: s.start + start,
        len: s.len,
    }));
}

/// `C+ (prod_{j=1..r} C Q(U_j)) C C+` with `nets = [U_1, ..., U_r]` in matrix
/// order, so `U_r` acts on the state first. On `psi (x) |0>` the result is
/// `(U_1 ... U_r psi) (x) |1>`.
pub fn connector_chain(nets: &[Network]) -> Result<Network> {
    let dim = check_pure_factors(nets, "connector chain")?;
    let mut out = Network::identity(dim).with_label("chain");
    out.stages.push(Element::Jointer);
    out.stages.push(Element::Connector);
    for (j, n) in nets.iter().enumerate().rev() {
        push_slot(&mut out, n, &format!("step{}", j + 1));
        out.stages.push(Element::Connector);
    }
    out.stages.push(Element::Jointer);
    Ok(out)
}

/// Product law: `Q(U_1 ... U_r) = I + C+ (prod_j C Q(U_j)) C C+`.
pub fn compose_product(nets: &[Network]) -> Result<Network> {
    let mut out = connector_chain(nets)?;
    out.bypass = true;
    out.label = "product".into();
    Ok(out)
}

/// Two-register form `(I_R)_in (x) [C+ (prod_j C Q(U_j)) C C+]_out`.
pub fn two_register_lift(nets: &[Network]) -> Result<Network> {
    let mut out = connector_chain(nets)?;
    out.spectator_dim = out.dim;
    out.label = "two-register".into();
    Ok(out)
}

/// `Q(I (x) ... (x) U (x) ... (x) I)` with `U` in position `slot`, built from
/// the non-zeros of `U` without forming the Kronecker product.
pub fn tensor_lift(u: &Operator, slot: usize, dims: &[usize]) -> Result<Network> {
    if slot >= dims.len() {
        return reject(format!("slot {slot} out of range for {} registers", dims.len()));
    }
    if !u.is_square() || u.rows() != dims[slot] {
        return reject(format!(
            "operator is {}x{}, slot {slot} has dim {}",
            u.rows(),
            u.cols(),
            dims[slot]
        ));
    }
    let total = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .unwrap_or(usize::MAX);
    check_cap("register dim", total, dim_cap())?;
    let outer: usize = dims[..slot].iter().product();
    let inner: usize = dims[slot + 1..].iter().product();
    let d = dims[slot];
    let nz: Vec<_> = u.nonzeros().collect();
    let mut stages = Vec::with_capacity(outer * inner * nz.len());
    for a in 0..outer {
        for &(m, n, amp) in &nz {
            for c in 0..inner {
                stages.push(raising((a * d + m) * inner + c, (a * d + n) * inner + c, amp));
            }
        }
    }
    Ok(Network {
        dim: total,
        label: format!("lift[{slot}]"),
        stages,
        slots: Vec::new(),
        bypass: false,
        spectator_dim: 1,
    })
}

/// A single external element. `register_only` lifts as `op (x) I_A`;
/// otherwise the op is wrapped in Q-form and behaves like `Q(op)`.
pub fn embed_external(op: &Operator, register_only: bool) -> Result<Network> {
    if !op.is_square() {
        return reject("external operator must be square");
    }
    Ok(Network {
        dim: op.rows(),
        label: "external".into(),
        stages: vec![Element::External {
            matrix: Box::new(op.clone()),
            register_only,
        }],
        slots: Vec::new(),
        bypass: false,
        spectator_dim: 1,
    })
}

/// Dense augmented-space matrix: ordered product of the element matrices,
/// plus the identity for bypass networks.
pub fn materialize_network(net: &Network) -> Result<Operator> {
    check_cap("materialize dim", net.register_dim(), MATERIALIZE_DIM_CAP)?;
    let total = 2 * net.register_dim();
    let mut acc = Operator::identity(total);
    for e in &net.stages {
        let m = lift_spectator(&materialize_element(e, net.dim)?, net.dim, net.spectator_dim);
        acc = m.matmul(&acc)?;
    }
    if net.bypass {
        acc = acc.add(&Operator::identity(total))?;
    }
    Ok(acc)
}

/// `Q~` materialized: the product of stages without the identity bypass.
pub fn materialize_tilde(net: &Network) -> Result<Operator> {
    materialize_network(&net.tilde())
}

/// Embed a `(2 dim)` aux-outermost matrix as `I_spectator` on the leading
/// register: result index `(b, i, o)` for aux `b`, spectator `i`, register `o`.
fn lift_spectator(m: &Operator, dim: usize, spectator: usize) -> Operator {
    if spectator == 1 {
        return m.clone();
    }
    let half = dim * spectator;
    let mut out = Operator::zeros(2 * half, 2 * half);
    for (r, c, z) in m.nonzeros() {
        let (b, o) = (r / dim, r % dim);
        let (b2, o2) = (c / dim, c % dim);
        for i in 0..spectator {
            out[(b * half + i * dim + o, b2 * half + i * dim + o2)] = z;
        }
    }
    out
}

/// Dense `[[I, 0], [U, I]]`, the closed form of `Q(U)`.
pub fn closed_form(u: &Operator) -> Result<Operator> {
    let d = u.rows();
    let mut out = Operator::identity(2 * d);
    for (m, n, z) in u.nonzeros() {
        out[(d + m, n)] += z;
    }
    Ok(out)
}

/// Scale every raising amplitude by `s` (used to build `Q(sU)` from `Q(U)`).
pub fn scale_amplitudes(net: &Network, s: Complex64) -> Result<Network> {
    let stages = net
        .stages
        .iter()
        .map(|e| match e {
            Element::Rotator { m, amp } => Ok(Element::Rotator { m: *m, amp: amp * s }),
            Element::Transitor { m, n, amp } => Ok(Element::Transitor {
                m: *m,
                n: *n,
                amp: amp * s,
            }),
            other => Err(QnetError::Composition(format!("cannot scale a {}", other.kind()))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Network {
        stages,
        ..net.clone()
    })
}
