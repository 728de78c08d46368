//! Command-line front end: ingest states/channels from JSON, evaluate
//! coherence measures, run freezing checks and sweeps, and reproduce the
//! worked qubit/qutrit/Bell examples.
//!
//! Exit codes: 0 success, 2 validation error (bad input files or
//! parameters), 3 structural/operational disagreement (a correctness
//! alarm).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use coherence::error::Error;
use coherence::freeze;
use coherence::json;
use coherence::measures::{c_l1, c_re, Measure};
use coherence::oracle;
use coherence::sio;
use coherence::states;
use coherence::xfreeze;

mod reproduce;

#[derive(Parser)]
#[command(
    name = "coherence",
    about = "Coherence measures and freezing checks for strictly incoherent operations",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    L1,
    Re,
}

impl From<MeasureArg> for Measure {
    fn from(m: MeasureArg) -> Measure {
        match m {
            MeasureArg::L1 => Measure::L1,
            MeasureArg::Re => Measure::RelEnt,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
pub(crate) enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Args)]
pub(crate) struct OutputArgs {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub(crate) format: Format,
    /// Write the report to a file instead of stdout.
    #[arg(long)]
    pub(crate) out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate coherence measures on a state.
    Measure {
        #[arg(long)]
        state: PathBuf,
        /// Restrict to one measure (default: both).
        #[arg(long, value_enum)]
        measure: Option<MeasureArg>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Apply a channel to a state and emit the resulting state JSON.
    Apply {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Operational + structural freezing verdict for a (state, channel) pair.
    CheckFreeze {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        channel: PathBuf,
        #[arg(long, value_enum)]
        measure: MeasureArg,
        /// Freezing tolerance for the l1 norm of coherence.
        #[arg(long, default_value_t = coherence::tol::FREEZE_L1)]
        tol_l1: f64,
        /// Freezing tolerance for the relative entropy of coherence.
        #[arg(long, default_value_t = coherence::tol::FREEZE_RE)]
        tol_re: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Validate a channel file and describe its structure.
    ClassifySio {
        #[arg(long)]
        channel: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Decompose an X state into its pairing blocks.
    XDecompose {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Reproduce a worked example family.
    #[command(subcommand)]
    Reproduce(ReproduceCmd),
    /// Randomized monotonicity/agreement suite.
    RandomSuite {
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Dimensions, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 3, 4])]
        dims: Vec<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Subcommand)]
pub(crate) enum ReproduceCmd {
    /// Qubit two-unitary family: freezing of the l1 norm on the phase
    /// manifold θ₁+θ₂+2θ ≡ 0 (mod 2π).
    Qubit {
        #[arg(long, default_value_t = 32)]
        grid: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// The four admissible qutrit Kraus forms and a freezing instance.
    Qutrit {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Bell-diagonal states under local bit flips: freezing of the relative
    /// entropy of coherence exactly on c₂ = -c₁c₃.
    Bell {
        #[arg(long, default_value_t = 21)]
        grid: usize,
        /// Bit-flip strengths, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.5, 0.9])]
        q: Vec<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

pub(crate) fn emit(output: &OutputArgs, text: String) -> Result<(), Error> {
    match &output.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn read_state(path: &PathBuf) -> Result<states::DensityMatrix, Error> {
    json::state_from_str(&fs::read_to_string(path)?)
}

fn read_channel(path: &PathBuf) -> Result<sio::SioChannel, Error> {
    json::channel_from_str(&fs::read_to_string(path)?)
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Measure {
            state,
            measure,
            output,
        } => {
            let rho = read_state(&state)?;
            let l1 = c_l1(&rho);
            let re = c_re(&rho)?;
            let class = states::classify(&rho);
            let text = match output.format {
                Format::Json => {
                    let mut obj = serde_json::Map::new();
                    obj.insert("dim".into(), rho.dim().into());
                    obj.insert("class".into(), format!("{}", class.tag()).into());
                    match measure {
                        Some(MeasureArg::L1) => {
                            obj.insert("c_l1".into(), l1.value.into());
                        }
                        Some(MeasureArg::Re) => {
                            obj.insert("c_re".into(), re.value.into());
                        }
                        None => {
                            obj.insert("c_l1".into(), l1.value.into());
                            obj.insert("c_re".into(), re.value.into());
                        }
                    }
                    format!("{}\n", serde_json::to_string_pretty(&obj)?)
                }
                Format::Csv => match measure {
                    Some(MeasureArg::L1) => format!("measure,value\nl1,{:.12e}\n", l1.value),
                    Some(MeasureArg::Re) => format!("measure,value\nre,{:.12e}\n", re.value),
                    None => format!(
                        "measure,value\nl1,{:.12e}\nre,{:.12e}\n",
                        l1.value, re.value
                    ),
                },
                Format::Table => {
                    let mut t = format!("dim: {}\nclass: {}\n", rho.dim(), class.tag());
                    if !matches!(measure, Some(MeasureArg::Re)) {
                        t.push_str(&format!("C_l1 = {:.12}\n", l1.value));
                    }
                    if !matches!(measure, Some(MeasureArg::L1)) {
                        t.push_str(&format!("C_re = {:.12} bits\n", re.value));
                    }
                    t
                }
            };
            emit(&output, text)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Apply {
            state,
            channel,
            out,
        } => {
            let rho = read_state(&state)?;
            let phi = read_channel(&channel)?;
            let sigma = phi.apply(&rho)?;
            let text = format!("{}\n", json::state_to_string(&sigma));
            match out {
                Some(path) => fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::CheckFreeze {
            state,
            channel,
            measure,
            tol_l1,
            tol_re,
            output,
        } => {
            let rho = read_state(&state)?;
            let phi = read_channel(&channel)?;
            let measure: Measure = measure.into();
            let tol = match measure {
                Measure::L1 => tol_l1,
                Measure::RelEnt => tol_re,
            };
            let report = freeze::check_frozen_with_tol(&phi, &rho, measure, tol)?;
            let text = match output.format {
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&report)?),
                Format::Csv => format!(
                    "measure,c_before,c_after,operational_frozen,structural_frozen,hypothesis_ok,agreement\n{},{:.12e},{:.12e},{},{},{},{}\n",
                    report.measure,
                    report.c_before.value,
                    report.c_after.value,
                    report.operational_frozen,
                    report
                        .structural_frozen
                        .map_or("na".to_string(), |b| b.to_string()),
                    report.hypothesis_ok,
                    report
                        .agreement
                        .map_or("na".to_string(), |b| b.to_string()),
                ),
                Format::Table => {
                    let mut t = format!(
                        "measure: {}\nC before: {:.12}\nC after:  {:.12}\noperational frozen: {}\n",
                        report.measure,
                        report.c_before.value,
                        report.c_after.value,
                        report.operational_frozen
                    );
                    match report.structural_frozen {
                        Some(s) => t.push_str(&format!("structural frozen:  {s}\n")),
                        None => t.push_str("structural frozen:  n/a (hypothesis not met)\n"),
                    }
                    if let Some(a) = report.agreement {
                        t.push_str(&format!("agreement: {a}\n"));
                    }
                    t
                }
            };
            emit(&output, text)?;
            if report.agreement == Some(false) {
                return Ok(ExitCode::from(3));
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::ClassifySio { channel, output } => {
            let phi = read_channel(&channel)?;
            let mixed = freeze::decompose_mixed_unitary(&phi);
            let pi = xfreeze::pairing_permutation(phi.dim());
            let block_forms: Vec<bool> = phi
                .kraus()
                .iter()
                .map(|k| xfreeze::parse_block_form(k, &pi).is_some())
                .collect();
            let text = match output.format {
                Format::Json => {
                    let obj = serde_json::json!({
                        "dim": phi.dim(),
                        "kraus_count": phi.kraus().len(),
                        "mixed_unitary": mixed.as_ref().map(|f| f
                            .terms
                            .iter()
                            .map(|t| serde_json::json!({
                                "delta": t.delta,
                                "perm": t.f.one_based(),
                                "thetas": t.thetas,
                            }))
                            .collect::<Vec<_>>()),
                        "pair_block_form": block_forms,
                    });
                    format!("{}\n", serde_json::to_string_pretty(&obj)?)
                }
                _ => {
                    let mut t = format!(
                        "valid SIO, dim {}, {} Kraus operator(s)\n",
                        phi.dim(),
                        phi.kraus().len()
                    );
                    match &mixed {
                        Some(form) => {
                            t.push_str("mixed-unitary decomposition: present\n");
                            for (i, term) in form.terms.iter().enumerate() {
                                t.push_str(&format!(
                                    "  term {}: delta {:.6}, perm {:?}\n",
                                    i + 1,
                                    term.delta,
                                    term.f.one_based()
                                ));
                            }
                        }
                        None => t.push_str(
                            "mixed-unitary decomposition: absent (non-uniform moduli)\n",
                        ),
                    }
                    t.push_str(&format!(
                        "pair-block form per Kraus operator: {block_forms:?}\n"
                    ));
                    t
                }
            };
            emit(&output, text)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::XDecompose { state, output } => {
            let rho = read_state(&state)?;
            let dec = xfreeze::decompose_x(&rho)?;
            let text = match output.format {
                Format::Json => {
                    let blocks: Vec<serde_json::Value> = dec
                        .blocks
                        .iter()
                        .map(|b| {
                            serde_json::to_value(json::StateJson::from_state(b))
                                .expect("block serializes")
                        })
                        .collect();
                    let obj = serde_json::json!({
                        "pairing": dec.pi.one_based(),
                        "lambdas": dec.lambdas,
                        "blocks": blocks,
                        "tail": dec.tail,
                    });
                    format!("{}\n", serde_json::to_string_pretty(&obj)?)
                }
                _ => {
                    let mut t = format!("pairing permutation: {:?}\n", dec.pi.one_based());
                    for (i, (l, b)) in dec.lambdas.iter().zip(&dec.blocks).enumerate() {
                        t.push_str(&format!(
                            "block {}: weight {:.6}, entries [[{:.6}{:+.6}i, {:.6}{:+.6}i], [{:.6}{:+.6}i, {:.6}{:+.6}i]]\n",
                            i + 1,
                            l,
                            b.entry(0, 0).re, b.entry(0, 0).im,
                            b.entry(0, 1).re, b.entry(0, 1).im,
                            b.entry(1, 0).re, b.entry(1, 0).im,
                            b.entry(1, 1).re, b.entry(1, 1).im,
                        ));
                    }
                    if let Some(tail) = dec.tail {
                        t.push_str(&format!("tail weight: {tail:.6}\n"));
                    }
                    t
                }
            };
            emit(&output, text)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Reproduce(cmd) => reproduce::run(cmd),

        Command::RandomSuite {
            trials,
            seed,
            dims,
            output,
        } => {
            let report = oracle::random_suite(&dims, trials, seed)?;
            let text = match output.format {
                Format::Json => format!("{}\n", report.to_json()),
                Format::Csv => report.to_csv(),
                Format::Table => format!(
                    "trials: {} per dim over dims {:?} (seed {})\nmonotonicity violations: {}\nstructural/operational disagreements: {}\n",
                    trials, dims, seed, report.monotonicity_violations, report.agreement_violations
                ),
            };
            emit(&output, text)?;
            if report.agreement_violations > 0 {
                return Ok(ExitCode::from(3));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
