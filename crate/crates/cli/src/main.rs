//! Command-line front end: scenario validation, automaton plumbing,
//! synthesis, diagnosis, tolerance checks and the full verification
//! pipeline.
//!
//! Exit codes: 0 when the verdict is nominal-ok/coordinated (or a check
//! holds), 2 for tolerable-only, 3 for intolerant (or a failed check),
//! 1 for usage and validation errors.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use descc_core::automaton::{Automaton, Trace};
use descc_core::dot;
use descc_core::json::{automaton_to_json, parse_automaton, AutomatonDoc};
use descc_core::scenario::{self, Scenario};
use descc_core::sensor;
use descc_core::staging::{self, StagingVerdict};
use descc_core::synthesis;

#[derive(Parser)]
#[command(name = "descc", version, about = "Fault-tolerant supervisory control toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutArgs {
    /// Directory for emitted artifacts (created if missing)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also emit DOT renderings of produced automata
    #[arg(long)]
    dot: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a scenario file
    Validate { scenario: PathBuf },
    /// Synchronous product of automaton files
    Compose {
        files: Vec<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Natural projection of an automaton onto a subset of its events
    Project {
        file: PathBuf,
        /// Comma-separated list of events to keep
        #[arg(long, value_delimiter = ',')]
        keep: Vec<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Supremal supervisor synthesis for a plant and specification
    Synth {
        /// Plant automaton (controllability/observability from its alphabet)
        #[arg(long)]
        plant: PathBuf,
        /// Specification automaton over the same events
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Build the safe diagnoser of a subsystem under its declared sensors
    Diagnose {
        scenario: PathBuf,
        #[arg(long)]
        subsystem: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// SF-safe controllability of a subsystem under its declared sensors
    CheckSfSafe {
        scenario: PathBuf,
        #[arg(long)]
        subsystem: usize,
    },
    /// Stage the scenario's fault script and report per-stage tolerance
    Tolerance { scenario: PathBuf },
    /// Post-fault coordination: premise check, existence, refinement
    Coordinate {
        scenario: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Full pipeline: nominal verification, fault staging, coordination
    Run {
        scenario: PathBuf,
        /// Ignore the bundled fault script and verify the nominal mode
        #[arg(long)]
        no_faults: bool,
        #[command(flatten)]
        out: OutArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn load_scenario_file(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    scenario::parse_scenario(&text).with_context(|| format!("loading {}", path.display()))
}

fn load_automaton_file(path: &Path) -> Result<Automaton> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    parse_automaton(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: &OutArgs, name: &str, a: &Automaton) -> Result<()> {
    match &out.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let json_path = dir.join(format!("{name}.json"));
            std::fs::write(&json_path, automaton_to_json(a))?;
            println!("wrote {}", json_path.display());
            if out.dot {
                let dot_path = dir.join(format!("{name}.dot"));
                std::fs::write(&dot_path, dot::to_dot(a, name))?;
                println!("wrote {}", dot_path.display());
            }
        }
        None => {
            println!("{}", automaton_to_json(a));
            if out.dot {
                println!("{}", dot::to_dot(a, name));
            }
        }
    }
    Ok(())
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Validate { scenario } => {
            let s = load_scenario_file(&scenario)?;
            println!(
                "scenario ok: {} subsystem(s), {} fault event(s)",
                s.subsystems.len(),
                s.script.len()
            );
            for w in &s.warnings {
                println!("warning: {w}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Compose { files, out } => {
            anyhow::ensure!(files.len() >= 2, "compose needs at least two automata");
            let mut acc = load_automaton_file(&files[0])?;
            for f in &files[1..] {
                acc = acc.compose(&load_automaton_file(f)?)?;
            }
            emit(&out, "composed", &acc)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Project { file, keep, out } => {
            let a = load_automaton_file(&file)?;
            let keep: BTreeSet<String> = keep.into_iter().collect();
            let p = a.project(&keep)?;
            emit(&out, "projected", &p)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Synth { plant, spec, out } => {
            let g = load_automaton_file(&plant)?;
            let k = load_automaton_file(&spec)?;
            let uc = g.alphabet().uncontrollable_names();
            let obs = g.alphabet().observable_names();
            match synthesis::supremal_supervisor(&g, &k, &uc, &obs)? {
                None => {
                    println!("synthesis: empty (no supervisor exists)");
                    Ok(ExitCode::from(3))
                }
                Some(result) => {
                    if result.trivial {
                        println!("synthesis: trivial supervisor (closed loop is the empty trace)");
                    } else {
                        println!(
                            "synthesis: supervisor with {} state(s), closed loop {} state(s)",
                            result.supervisor.realization().state_count(),
                            result.closed_loop.state_count()
                        );
                    }
                    emit(&out, "supervisor", result.supervisor.realization())?;
                    emit(&out, "closed_loop", &result.closed_loop)?;
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        Command::Diagnose {
            scenario,
            subsystem,
            out,
        } => {
            let s = load_scenario_file(&scenario)?;
            let sub = find_subsystem(&s, subsystem)?;
            let which: Vec<String> = sub.config.sensors().to_vec();
            anyhow::ensure!(!which.is_empty(), "subsystem {subsystem} declares no sensors");
            let g_f = sensor::build_faulty_plant(&sub.plant, &sub.config, &which)?;
            let s_f = sensor::build_faulty_supervisor(&sub.nominal, &sub.config, &which)?;
            let gks = sensor::closed_loop_fault_model(&s_f, &g_f)?;
            let diag = sensor::build_safe_diagnoser(&gks, &sub.safety, &sub.config)?;
            println!(
                "diagnoser: {} state(s) over {} observable event(s); {} first-entered certain",
                diag.automaton.state_count(),
                diag.automaton.alphabet().len(),
                sensor::first_entered_certain(&diag).len()
            );
            emit(&out, "diagnoser", &diag.automaton)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckSfSafe {
            scenario,
            subsystem,
        } => {
            let s = load_scenario_file(&scenario)?;
            let sub = find_subsystem(&s, subsystem)?;
            let which: Vec<String> = sub.config.sensors().to_vec();
            anyhow::ensure!(!which.is_empty(), "subsystem {subsystem} declares no sensors");
            let g_f = sensor::build_faulty_plant(&sub.plant, &sub.config, &which)?;
            let s_f = sensor::build_faulty_supervisor(&sub.nominal, &sub.config, &which)?;
            let gks = sensor::closed_loop_fault_model(&s_f, &g_f)?;
            match sensor::check_sf_safe(&gks, &sub.safety, &sub.config)? {
                sensor::SfVerdict::SfSafe => {
                    println!("SF-safe controllable: yes");
                    Ok(ExitCode::SUCCESS)
                }
                sensor::SfVerdict::NotSfSafe {
                    condition,
                    state,
                    witness,
                } => {
                    println!("SF-safe controllable: no — condition ({condition}) at {state}");
                    if let Some(w) = witness {
                        println!("witness: {w}");
                    }
                    Ok(ExitCode::from(3))
                }
            }
        }
        Command::Tolerance { scenario } => {
            let s = load_scenario_file(&scenario)?;
            anyhow::ensure!(!s.script.is_empty(), "scenario has no fault script");
            let mut worst = ExitCode::SUCCESS;
            for sub in &s.subsystems {
                let faults: Vec<staging::LocalFault> = s
                    .script
                    .iter()
                    .filter(|(id, _)| *id == sub.id)
                    .map(|(_, f)| f.clone())
                    .collect();
                if faults.is_empty() {
                    continue;
                }
                match staging::interpret_faults(
                    &sub.plant,
                    &sub.safety,
                    &sub.nominal,
                    &sub.config,
                    &faults,
                )? {
                    StagingVerdict::Staged(st) => {
                        println!("subsystem {}: tolerant ({} stage note(s))", sub.id, st.notes.len());
                    }
                    StagingVerdict::Intolerant(f) => {
                        println!("subsystem {}: intolerant at {}", sub.id, f.stage);
                        if let Some(w) = &f.witness {
                            println!("witness: {w}");
                        }
                        worst = ExitCode::from(3);
                    }
                }
            }
            Ok(worst)
        }
        Command::Coordinate { scenario, out } => {
            let s = load_scenario_file(&scenario)?;
            let report = scenario::run_pipeline(&s)?;
            for c in &report.counterexamples {
                println!("counterexample: {}", Trace(c.clone()));
            }
            println!(
                "coordination verdict: {} after {} refinement iteration(s)",
                report.verdict, report.iterations
            );
            write_report(&out, &report)?;
            Ok(ExitCode::from(report.verdict().exit_code() as u8))
        }
        Command::Run {
            scenario,
            no_faults,
            out,
        } => {
            let text = std::fs::read_to_string(&scenario)
                .with_context(|| format!("reading {}", scenario.display()))?;
            let mut doc: descc_core::scenario::ScenarioDoc = serde_json::from_str(&text)
                .map_err(|e| anyhow::anyhow!("schema error: {e}"))?;
            if no_faults {
                doc.fault_script.clear();
            }
            let s = scenario::load_scenario(&doc)?;
            let report = scenario::run_pipeline(&s)?;
            println!("verdict: {}", report.verdict);
            write_report(&out, &report)?;
            Ok(ExitCode::from(report.verdict().exit_code() as u8))
        }
    }
}

fn find_subsystem(s: &Scenario, id: usize) -> Result<&scenario::Subsystem> {
    s.subsystems
        .iter()
        .find(|sub| sub.id == id)
        .ok_or_else(|| anyhow::anyhow!("no subsystem with id {id}"))
}

fn write_report(out: &OutArgs, report: &scenario::Report) -> Result<()> {
    match &out.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join("report.json");
            std::fs::write(&path, report.to_json())?;
            println!("wrote {}", path.display());
            if out.dot {
                for (id, sub) in &report.per_subsystem {
                    let module: Automaton = AutomatonDoc::to_automaton(&sub.module)?;
                    let path = dir.join(format!("module_{id}.dot"));
                    std::fs::write(&path, dot::to_dot(&module, &format!("module_{id}")))?;
                    println!("wrote {}", path.display());
                }
            }
        }
        None => println!("{}", report.to_json()),
    }
    Ok(())
}
