//! `qnet`: build, run and verify nilpotent-ancilla quantum networks.

mod inputs;

use std::fs;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use qnet_core::algorithms::grover::grover_run;
use qnet_core::algorithms::qft::{qft_matrix, qft_network};
use qnet_core::algorithms::shor::{shor_run, ShorMeasurement};
use qnet_core::compiler::exchange_form;
use qnet_core::linalg::{random_state, Vector};
use qnet_core::network::q_of;
use qnet_core::schrodinger::{run_evolution, EvolutionSpec, Grid, InitialState};
use qnet_core::verify::{branch_output, run_verify_suite, Scope};
use qnet_core::{emit_report, Check, Network, Operator, Style};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "qnet", version, about = "Quantum networks from nilpotent circuit elements")]
struct Cli {
    /// Seed for every random choice (sampling, random test states).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Pass threshold for `compile` and `qft --verify` oracle checks.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tolerance: f64,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Json,
    Pretty,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Form {
    Natural,
    Exchange,
}

#[derive(Subcommand)]
enum Command {
    /// Run the invariant suite of one module or all of them.
    Verify {
        #[arg(long, default_value = "all")]
        scope: String,
        /// Report wall_time_ms as 0 so repeated runs are byte-identical.
        #[arg(long)]
        no_timing: bool,
    },
    /// Compile a matrix JSON file into a network JSON file.
    Compile {
        input: String,
        #[arg(long, value_enum, default_value_t = Form::Natural)]
        form: Form,
        /// Where to write the network; stdout when omitted.
        #[arg(long)]
        out: Option<String>,
    },
    /// Build the entire QFT network.
    Qft {
        #[arg(long)]
        qubits: usize,
        #[arg(long)]
        verify: bool,
    },
    /// Grover search for one marked basis state.
    Grover {
        #[arg(long)]
        qubits: usize,
        #[arg(long)]
        target: usize,
        #[arg(long)]
        iterations: Option<usize>,
        /// Include the per-iteration target probabilities.
        #[arg(long)]
        trace: bool,
    },
    /// Factor N with the period-finding network.
    #[command(group(ArgGroup::new("mode").args(["fixed_m", "distribution"])))]
    Shor {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        a: u64,
        #[arg(long)]
        qubits: Option<usize>,
        /// Force the first-register outcome instead of sampling it.
        #[arg(long)]
        fixed_m: Option<u64>,
        /// Report the exact outcome distribution.
        #[arg(long)]
        distribution: bool,
    },
    /// Euler-step evolution of a particle on a periodic grid.
    Schrodinger {
        #[arg(long)]
        grid: usize,
        #[arg(long)]
        length: f64,
        #[arg(long)]
        mass: f64,
        #[arg(long, default_value = "zero")]
        potential: String,
        #[arg(long)]
        dt: f64,
        #[arg(long = "t")]
        total_t: f64,
        /// Defaults to a centered gaussian of width L/16 at rest.
        #[arg(long)]
        initial: Option<String>,
        #[arg(long)]
        compare_exact: bool,
        #[arg(long)]
        renormalize: bool,
    },
}

#[derive(Serialize)]
struct CompileReport {
    form: Form,
    dim: usize,
    elements: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    exchange_terms: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    network_file: Option<String>,
    check: Check,
}

#[derive(Serialize)]
struct QftReport {
    qubits_k: usize,
    dim: usize,
    elements: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    check: Option<Check>,
}

/// Emitted text and whether every requested check passed.
struct Outcome {
    text: String,
    ok: bool,
}

fn style(o: Output) -> Style {
    match o {
        Output::Json => Style::Compact,
        Output::Pretty => Style::Pretty,
    }
}

/// Largest branch-1 deviation from `u` over every basis input.
fn action_error(net: &Network, u: &Operator) -> Result<f64> {
    let mut worst = 0.0f64;
    for n in 0..u.cols() {
        let out = branch_output(net, &Vector::basis(n, u.cols()))?;
        worst = worst.max(out.max_abs_diff(&u.column(n))?);
    }
    Ok(worst)
}

fn run(cli: &Cli) -> Result<Outcome> {
    let style = style(cli.output);
    match &cli.command {
        Command::Verify { scope, no_timing } => {
            let scope: Scope = scope.parse()?;
            let mut r = run_verify_suite(scope, cli.seed);
            if *no_timing {
                r.wall_time_ms = 0;
            }
            for c in r.failures() {
                eprintln!("FAIL {}: error {:e} > tolerance {:e}", c.name, c.max_abs_error, c.tolerance);
            }
            Ok(Outcome {
                ok: r.all_passed(),
                text: emit_report("verification", &r, style)?,
            })
        }
        Command::Compile { input, form, out } => {
            let u = inputs::read_matrix(input)?;
            if !u.is_square() {
                bail!("matrix must be square, got {}x{}", u.rows(), u.cols());
            }
            let (net, terms) = match form {
                Form::Natural => (q_of(&u)?, None),
                Form::Exchange => {
                    let f = exchange_form(&u)?;
                    let n = f.terms.len();
                    (f.network, Some(n))
                }
            };
            let check = Check::new("branch-1 action equals the input matrix", action_error(&net, &u)?, cli.tolerance);
            let ir = serde_json::to_string_pretty(&net)?;
            let ok = check.passed;
            let text = match out {
                Some(path) => {
                    fs::write(path, ir + "\n").with_context(|| format!("writing {path}"))?;
                    let r = CompileReport {
                        form: *form,
                        dim: net.dim(),
                        elements: net.len(),
                        exchange_terms: terms,
                        network_file: Some(path.clone()),
                        check,
                    };
                    emit_report("compile", &r, style)?
                }
                None => {
                    if !ok {
                        eprintln!("FAIL {}: error {:e}", check.name, check.max_abs_error);
                    }
                    ir + "\n"
                }
            };
            Ok(Outcome { text, ok })
        }
        Command::Qft { qubits, verify } => {
            let net = qft_network(*qubits)?;
            let check = if *verify {
                let f = qft_matrix(*qubits)?;
                let dim = f.rows();
                let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                let mut worst = if dim <= 64 { action_error(&net, &f)? } else { 0.0 };
                for _ in 0..8 {
                    let psi = random_state(&mut rng, dim);
                    worst = worst.max(branch_output(&net, &psi)?.max_abs_diff(&f.apply(&psi)?)?);
                }
                Some(Check::new("Q(F) branch-1 equals the DFT matrix", worst, cli.tolerance))
            } else {
                None
            };
            let ok = check.as_ref().is_none_or(|c| c.passed);
            let r = QftReport {
                qubits_k: *qubits,
                dim: net.dim(),
                elements: net.len(),
                check,
            };
            Ok(Outcome {
                text: emit_report("qft", &r, style)?,
                ok,
            })
        }
        Command::Grover {
            qubits,
            target,
            iterations,
            trace,
        } => {
            let mut r = grover_run(*qubits, *target, *iterations)?;
            if !trace {
                r.per_iteration_probs.clear();
            }
            Ok(Outcome {
                text: emit_report("grover", &r, style)?,
                ok: true,
            })
        }
        Command::Shor {
            n,
            a,
            qubits,
            fixed_m,
            distribution,
        } => {
            let mode = match (fixed_m, distribution) {
                (Some(y), _) => ShorMeasurement::Fixed(*y),
                (None, true) => ShorMeasurement::FullDistribution,
                (None, false) => ShorMeasurement::Sample(cli.seed),
            };
            let r = shor_run(*n, *a, *qubits, mode)?;
            Ok(Outcome {
                text: emit_report("shor", &r, style)?,
                ok: true,
            })
        }
        Command::Schrodinger {
            grid,
            length,
            mass,
            potential,
            dt,
            total_t,
            initial,
            compare_exact,
            renormalize,
        } => {
            let g = Grid::new(*grid, *length)?;
            let spec = EvolutionSpec {
                mass_mu: *mass,
                dt: *dt,
                total_t: *total_t,
                potential: inputs::parse_potential(potential)?,
            };
            let init = match initial {
                Some(s) => inputs::parse_initial(s)?,
                None => InitialState::Gaussian {
                    x0: length / 2.0,
                    sigma: length / 16.0,
                    k0: 0.0,
                },
            };
            let r = run_evolution(&g, &spec, &init, *renormalize, *compare_exact)?;
            Ok(Outcome {
                text: emit_report("schrodinger", &r, style)?,
                ok: true,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            if !out.text.ends_with('\n') {
                println!();
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
