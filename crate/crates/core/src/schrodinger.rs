//! One-dimensional Schrodinger evolution on a periodic grid: finite-difference
//! operators, Euler-step networks, the chained evolution network, and a
//! comparison against the exact propagator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elements::Element;
use crate::error::{reject, Result};
use crate::limits::{check_cap, dim_cap, ELEMENT_CAP, MAX_EVOLUTION_STEPS};
use crate::linalg::{expm_oracle, Amplitude, Operator, Vector, ONE};
use crate::network::{compose_sum, evaluate, evaluate_observed, q_of, two_register_lift, Network};
use crate::registers::{make_augmented, project_aux, AugmentedState, RegisterLayout};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub points_n: usize,
    pub length_l: f64,
}

impl Grid {
    pub fn new(points_n: usize, length_l: f64) -> Result<Self> {
        if points_n < 2 || !points_n.is_power_of_two() {
            return reject(format!("grid size must be a power of two >= 2, got {points_n}"));
        }
        check_cap("grid points", points_n, dim_cap())?;
        if !(length_l.is_finite() && length_l > 0.0) {
            return reject(format!("box length must be positive, got {length_l}"));
        }
        Ok(Grid { points_n, length_l })
    }

    pub fn spacing(&self) -> f64 {
        self.length_l / self.points_n as f64
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.points_n).map(|m| m as f64 * self.spacing()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Potential {
    Zero,
    Constant { value: f64 },
    /// `mu omega^2 (x - L/2)^2 / 2`.
    Harmonic { omega: f64 },
    /// `-depth` on the centered interval of the given width, zero outside.
    Well { depth: f64, width: f64 },
    /// One value per grid point.
    Tabulated { values: Vec<f64> },
}

impl Potential {
    pub fn values(&self, g: &Grid, mu: f64) -> Result<Vec<f64>> {
        let center = g.length_l / 2.0;
        let xs = g.positions();
        let vals: Vec<f64> = match self {
            Potential::Zero => vec![0.0; g.points_n],
            Potential::Constant { value } => vec![*value; g.points_n],
            Potential::Harmonic { omega } => xs
                .iter()
                .map(|x| 0.5 * mu * omega * omega * (x - center).powi(2))
                .collect(),
            Potential::Well { depth, width } => xs
                .iter()
                .map(|x| if (x - center).abs() < width / 2.0 { -depth } else { 0.0 })
                .collect(),
            Potential::Tabulated { values } => {
                if values.len() != g.points_n {
                    return reject(format!(
                        "tabulated potential has {} values for {} grid points",
                        values.len(),
                        g.points_n
                    ));
                }
                values.clone()
            }
        };
        if vals.iter().any(|v| !v.is_finite()) {
            return reject("potential must be finite on every grid point");
        }
        Ok(vals)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionSpec {
    pub mass_mu: f64,
    pub dt: f64,
    pub total_t: f64,
    pub potential: Potential,
}

impl EvolutionSpec {
    pub fn steps(&self) -> Result<usize> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.mass_mu) || !ok(self.dt) || !ok(self.total_t) {
            return reject("mass, dt and total time must be positive");
        }
        if self.dt > self.total_t {
            return reject(format!("dt {} exceeds total time {}", self.dt, self.total_t));
        }
        let steps = (self.total_t / self.dt).round();
        check_cap("evolution steps", steps as usize, MAX_EVOLUTION_STEPS)?;
        Ok((steps as usize).max(1))
    }

    pub fn with_dt(&self, dt: f64) -> Self {
        EvolutionSpec { dt, ..self.clone() }
    }
}

/// Symmetric difference `-i (N/L)/2 (S - S^-1)` with periodic wrap.
pub fn momentum_op(g: &Grid) -> Operator {
    let n = g.points_n;
    let c = 0.5 / g.spacing();
    let mut p = Operator::zeros(n, n);
    for m in 0..n {
        p[(m, (m + 1) % n)] += Complex64::new(0.0, -c);
        p[(m, (m + n - 1) % n)] += Complex64::new(0.0, c);
    }
    p
}

/// `-(1/8 mu)(N/L)^2 (S^2 + S^-2 - 2I)`, equal to `p^2 / 2 mu`.
pub fn kinetic_op(g: &Grid, mu: f64) -> Result<Operator> {
    if !(mu.is_finite() && mu > 0.0) {
        return reject(format!("mass must be positive, got {mu}"));
    }
    let n = g.points_n;
    let c = -1.0 / (8.0 * mu * g.spacing().powi(2));
    let mut t = Operator::zeros(n, n);
    for m in 0..n {
        t[(m, (m + 2) % n)] += c * ONE;
        t[(m, (m + n - 2) % n)] += c * ONE;
        t[(m, m)] += -2.0 * c * ONE;
    }
    Ok(t)
}

/// `diag(V(x_m))`.
pub fn potential_op(g: &Grid, v: impl Fn(f64) -> f64) -> Result<Operator> {
    let vals: Vec<f64> = g.positions().into_iter().map(v).collect();
    if vals.iter().any(|x| !x.is_finite()) {
        return reject("potential must be finite on every grid point");
    }
    Ok(Operator::diagonal(&vals.iter().map(|&x| x * ONE).collect::<Vec<_>>()))
}

pub fn hamiltonian(g: &Grid, spec: &EvolutionSpec) -> Result<Operator> {
    let vals = spec.potential.values(g, spec.mass_mu)?;
    let v = Operator::diagonal(&vals.iter().map(|&x| x * ONE).collect::<Vec<_>>());
    kinetic_op(g, spec.mass_mu)?.add(&v)
}

/// `Q(I - i dt H) = Q(I) Q(-i dt T) Q(-i dt V)`.
pub fn euler_step_network(g: &Grid, spec: &EvolutionSpec) -> Result<Network> {
    if !(spec.dt.is_finite() && spec.dt >= 0.0) {
        return reject(format!("dt must be non-negative, got {}", spec.dt));
    }
    let s = Complex64::new(0.0, -spec.dt);
    let vals = spec.potential.values(g, spec.mass_mu)?;
    let v = Operator::diagonal(&vals.iter().map(|&x| x * ONE).collect::<Vec<_>>());
    let parts = [
        q_of(&Operator::identity(g.points_n))?.with_label("identity"),
        q_of(&kinetic_op(g, spec.mass_mu)?.scale(s))?.with_label("kinetic"),
        q_of(&v.scale(s))?.with_label("potential"),
    ];
    Ok(compose_sum(&parts)?.with_label("euler-step"))
}

/// Two-register chain of `round(T/dt)` Euler steps, slots `step1..stepN`.
pub fn evolve_network(g: &Grid, spec: &EvolutionSpec) -> Result<Network> {
    let steps = spec.steps()?;
    let step = euler_step_network(g, spec)?;
    check_cap("evolution elements", steps.saturating_mul(step.len()), ELEMENT_CAP)?;
    let parts: Vec<_> = (1..=steps).map(|j| step.clone().with_label(format!("step{j}"))).collect();
    two_register_lift(&parts)
}

/// Final state and the norm after every step (entry 0 is the input norm).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub steps: usize,
    pub final_state: Vector,
    pub norm_history: Vec<f64>,
}

/// Evaluate the Euler chain on `psi0`. With `renormalize` the running result
/// is rescaled to unit norm after each step. Falls back to stepping one
/// subnetwork at a time when the whole chain would exceed the element cap.
pub fn evolve(g: &Grid, spec: &EvolutionSpec, psi0: &Vector, renormalize: bool) -> Result<Trajectory> {
    evolve_within(g, spec, psi0, renormalize, ELEMENT_CAP)
}

fn evolve_within(
    g: &Grid,
    spec: &EvolutionSpec,
    psi0: &Vector,
    renormalize: bool,
    chain_limit: usize,
) -> Result<Trajectory> {
    let steps = spec.steps()?;
    let dim = g.points_n;
    let layout = RegisterLayout::single(dim)?;
    let s = make_augmented(psi0, &layout)?;
    let mut norms = vec![psi0.norm()];
    let mut record = |st: &mut AugmentedState| {
        let n = st.branch_norm_sqr(1).sqrt();
        norms.push(n);
        if renormalize && n > 0.0 {
            st.scale_in_place(1.0 / n);
        }
    };
    let step = euler_step_network(g, spec)?;
    let out = if steps.saturating_mul(step.len()) <= chain_limit {
        let net = evolve_network(g, spec)?.without_spectator();
        evaluate_observed(&net, &s, |label, st| {
            if label.starts_with("step") && !label.contains('/') {
                record(st);
            }
        })?
    } else {
        let lead = Network::new(dim, "lead", vec![Element::Jointer, Element::Connector])?;
        let mut st = evaluate(&lead, &s)?;
        let advance = Network::new(dim, "advance", vec![Element::Connector])?;
        for _ in 0..steps {
            st = evaluate(&step, &st)?;
            record(&mut st);
            st = evaluate(&advance, &st)?;
        }
        evaluate(&Network::new(dim, "close", vec![Element::Jointer])?, &st)?
    };
    Ok(Trajectory {
        steps,
        final_state: project_aux(&out, 1, false)?,
        norm_history: norms,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub dt: f64,
    pub steps: usize,
    pub global_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactComparison {
    pub global_error: f64,
    pub norm_history: Vec<f64>,
    /// Rows for `dt`, `dt/2`, `dt/4`, `dt/8`.
    pub convergence: Vec<ConvergenceRow>,
    /// `err(dt_i) / err(dt_i / 2)` for consecutive rows.
    pub error_ratios: Vec<f64>,
    /// `log2` of each ratio.
    pub observed_orders: Vec<f64>,
}

fn distance(a: &Vector, b: &Vector) -> f64 {
    a.entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Compare the raw Euler chain with `expm(-i H T) psi0`.
pub fn compare_exact(g: &Grid, spec: &EvolutionSpec, psi0: &Vector) -> Result<ExactComparison> {
    if (psi0.norm() - 1.0).abs() > 1e-10 {
        return reject("initial state must have unit norm");
    }
    let h = hamiltonian(g, spec)?;
    let exact = |spec: &EvolutionSpec| -> Result<Vector> {
        let t = spec.steps()? as f64 * spec.dt;
        expm_oracle(&h.scale(Complex64::new(0.0, -t)))?.apply(psi0)
    };
    let mut rows = Vec::new();
    let mut history = Vec::new();
    for j in 0..4 {
        let sp = spec.with_dt(spec.dt / f64::from(1u32 << j));
        let traj = evolve(g, &sp, psi0, false)?;
        let diff = distance(&traj.final_state, &exact(&sp)?);
        if j == 0 {
            history = traj.norm_history;
        }
        rows.push(ConvergenceRow {
            dt: sp.dt,
            steps: traj.steps,
            global_error: diff,
        });
    }
    let ratios: Vec<f64> = rows.windows(2).map(|w| w[0].global_error / w[1].global_error).collect();
    Ok(ExactComparison {
        global_error: rows[0].global_error,
        norm_history: history,
        observed_orders: ratios.iter().map(|r| r.log2()).collect(),
        error_ratios: ratios,
        convergence: rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum InitialState {
    /// `exp(-(x - x0)^2 / 4 sigma^2 + i k0 x)`, normalized.
    Gaussian { x0: f64, sigma: f64, k0: f64 },
    Basis { m: usize },
    Amplitudes { values: Vec<Amplitude> },
}

impl InitialState {
    pub fn vector(&self, g: &Grid) -> Result<Vector> {
        let v = match self {
            InitialState::Gaussian { x0, sigma, k0 } => {
                if !(sigma.is_finite() && *sigma > 0.0) {
                    return reject("gaussian width must be positive");
                }
                Vector::from_vec(
                    g.positions()
                        .iter()
                        .map(|x| Complex64::from_polar((-(x - x0).powi(2) / (4.0 * sigma * sigma)).exp(), k0 * x))
                        .collect(),
                )
            }
            InitialState::Basis { m } => {
                if *m >= g.points_n {
                    return reject(format!("basis index {m} out of range"));
                }
                Vector::basis(*m, g.points_n)
            }
            InitialState::Amplitudes { values } => {
                if values.len() != g.points_n {
                    return reject(format!("{} amplitudes for {} grid points", values.len(), g.points_n));
                }
                Vector::try_from_vec(values.clone())?
            }
        };
        v.normalized()
            .ok_or_else(|| crate::QnetError::RejectedInput("initial state has zero norm".into()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionReport {
    pub grid: Grid,
    pub spec: EvolutionSpec,
    pub steps: usize,
    pub renormalized: bool,
    pub final_state: Vector,
    pub norm_history: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ExactComparison>,
}

pub fn run_evolution(
    g: &Grid,
    spec: &EvolutionSpec,
    initial: &InitialState,
    renormalize: bool,
    compare: bool,
) -> Result<EvolutionReport> {
    let psi0 = initial.vector(g)?;
    let traj = evolve(g, spec, &psi0, renormalize)?;
    let comparison = if compare {
        Some(compare_exact(g, spec, &psi0)?)
    } else {
        None
    };
    Ok(EvolutionReport {
        grid: g.clone(),
        spec: spec.clone(),
        steps: traj.steps,
        renormalized: renormalize,
        final_state: traj.final_state,
        norm_history: traj.norm_history,
        comparison,
    })
}
