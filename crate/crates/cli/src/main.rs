use std::fs;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use domcalc_core::analysis::{check_wellformed_with, classify, describe_sort, model_registry_with};
use domcalc_core::compile::{compile_model, graph_json, print_process, CompileError, CompileOptions};
use domcalc_core::diag::{has_errors, Diagnostic};
use domcalc_core::dsl::{parse_model, print_model, ParseOutput};
use domcalc_core::sim::{check_axioms, instantiate, run, EnvironmentScript};
use domcalc_core::units::{dimension_label, parse_unit, typecheck_str, KindRegistry, TypeEnv};
use domcalc_core::{Decimal, DomainModel};

/// Domain descriptions with units, compiled into behaviours and simulated.
#[derive(Parser)]
#[command(name = "domcalc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a model and print it in canonical form.
    Parse { file: PathBuf },
    /// Check a model for well-formedness, units and axiom typing.
    Check { file: PathBuf },
    /// Print the description prompts for every sort, or one.
    Describe {
        file: PathBuf,
        #[arg(long)]
        sort: Option<String>,
    },
    /// Compile parts to behaviours.
    Compile {
        file: PathBuf,
        /// Also write the process graph as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Keep core behaviours of composites that have nothing of their own.
        #[arg(long)]
        always_core: bool,
    },
    /// Run the compiled model against an environment script and check axioms.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the trace here as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Unit and quantity-kind queries.
    Units {
        #[command(subcommand)]
        command: UnitsCommand,
    },
}

#[derive(Subcommand)]
enum UnitsCommand {
    /// Dimension of a unit expression, or the kind of an expression over kinds.
    Check {
        expr: String,
        /// Take quantity kinds and conversions from this model too.
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

/// Exit status and the reason, for failures.
enum Failure {
    /// Bad usage, unreadable input, parse errors.
    Error(String),
    /// The input was understood but a check failed.
    Check,
}

type Outcome = Result<(), Failure>;

fn color() -> bool {
    std::env::var("DOMCALC_COLOR").map_or(true, |v| v != "0") && std::io::stderr().is_terminal()
}

fn report(diags: &[Diagnostic]) {
    let c = color();
    for d in diags {
        eprintln!("{}", d.render(c));
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Error(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Error(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<ParseOutput, Failure> {
    let out = parse_model(&path.display().to_string(), &read(path)?);
    if out.has_errors() {
        report(&out.diagnostics);
        return Err(Failure::Error(format!("{}: could not be parsed", path.display())));
    }
    Ok(out)
}

/// Parses and checks; warnings are reported, errors stop here.
fn load_valid(path: &Path) -> Result<DomainModel, Failure> {
    let out = load(path)?;
    let diags = check_wellformed_with(&out.model, &out.source_map);
    report(&diags);
    if has_errors(&diags) {
        return Err(Failure::Check);
    }
    Ok(out.model)
}

fn compile_err(e: CompileError) -> Failure {
    match e {
        CompileError::Invalid(diags) => {
            report(&diags);
            Failure::Check
        }
        other => Failure::Error(other.to_string()),
    }
}

fn parse_cmd(file: &Path) -> Outcome {
    let out = load(file)?;
    report(&out.diagnostics);
    print!("{}", print_model(&out.model));
    Ok(())
}

fn check_cmd(file: &Path) -> Outcome {
    let out = load(file)?;
    let diags = check_wellformed_with(&out.model, &out.source_map);
    report(&out.diagnostics);
    report(&diags);
    if has_errors(&diags) {
        return Err(Failure::Check);
    }
    let warnings = diags.len() + out.diagnostics.len();
    println!("{}: ok ({} sorts, {} axioms, {warnings} warnings)", file.display(), out.model.endurants.len(), out.model.axioms.len());
    Ok(())
}

fn describe_cmd(file: &Path, sort: Option<&str>) -> Outcome {
    let model = load_valid(file)?;
    let sorts: Vec<String> = match sort {
        Some(s) => vec![s.to_string()],
        None => model.endurants.iter().map(|e| e.name.clone()).collect(),
    };
    let mut first = true;
    for s in sorts {
        let c = classify(&model, &s).map_err(|e| Failure::Error(e.to_string()))?;
        let texts = describe_sort(&model, &s).map_err(|e| Failure::Error(e.to_string()))?;
        if !first {
            println!();
        }
        first = false;
        let kind = if c.is_part { "part" } else if c.is_component { "component" } else { "material" };
        let shape = if c.is_composite {
            ", composite"
        } else if c.is_atomic {
            ", atomic"
        } else {
            ""
        };
        let disc = if c.is_discrete { "discrete" } else { "continuous" };
        println!("-- {s}: {disc} {kind}{shape}");
        for t in texts {
            println!("-- {}", t.narrative);
            print!("{}", t.formal_text());
        }
    }
    Ok(())
}

fn compile_cmd(file: &Path, json: Option<&Path>, always_core: bool) -> Outcome {
    let model = load_valid(file)?;
    let g = compile_model(&model, CompileOptions { always_core }).map_err(compile_err)?;
    print!("{}", print_process(&g));
    if let Some(path) = json {
        write(path, &graph_json(&g))?;
    }
    Ok(())
}

fn simulate_cmd(file: &Path, script: &Path, steps: u64, seed: u64, trace: Option<&Path>) -> Outcome {
    let model = load_valid(file)?;
    let g = compile_model(&model, CompileOptions::default()).map_err(compile_err)?;
    let script = EnvironmentScript::from_json(&read(script)?, &model, &g).map_err(|e| Failure::Error(e.to_string()))?;
    let config = instantiate(&model, &g, &script, seed).map_err(|e| Failure::Error(e.to_string()))?;
    let t = run(&config, steps);
    if let Some(path) = trace {
        write(path, &t.to_jsonl())?;
    }
    let verdicts = check_axioms(&model, &t);
    let summary = serde_json::json!({
        "steps": t.events.last().map_or(0, |e| e.step + 1),
        "events": t.len(),
        "deadlock": t.deadlocked(),
        "verdicts": verdicts,
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    if verdicts.iter().all(|v| v.passed()) {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn units_cmd(expr: &str, model: Option<&Path>) -> Outcome {
    if let Ok((dim, scale)) = parse_unit(expr) {
        let scale = Decimal::from_rational(&scale);
        if scale == Decimal::one() {
            println!("{}: {dim}", dimension_label(dim));
        } else {
            println!("{}: {dim} (x {scale})", dimension_label(dim));
        }
        return Ok(());
    }
    let (reg, env) = match model {
        Some(path) => {
            let out = load(path)?;
            let (reg, diags) = model_registry_with(&out.model, &out.source_map);
            report(&diags);
            if has_errors(&diags) {
                return Err(Failure::Check);
            }
            let mut env = kind_env(&reg);
            for c in &out.model.conversions {
                if let (Some(from), Some(to)) = (reg.get(&c.from), reg.get(&c.to)) {
                    env.functions.insert(c.name.clone(), (from.clone(), to.clone()));
                }
            }
            (reg, env)
        }
        None => {
            let reg = KindRegistry::builtin();
            let env = kind_env(&reg);
            (reg, env)
        }
    };
    match typecheck_str(&reg, expr, &env) {
        Ok(k) => {
            println!("{}: {} ({})", k.name, k.dimension, k.role.keyword());
            Ok(())
        }
        Err(d) => {
            report(&[d.clone()]);
            // Unknown names and syntax are usage errors; the rest are
            // rejections by the operator rules.
            if d.code == "E203" || d.code.starts_with("E0") {
                Err(Failure::Error(format!("cannot check `{expr}`")))
            } else {
                Err(Failure::Check)
            }
        }
    }
}

/// Every registered kind name stands for a value of that kind.
fn kind_env(reg: &KindRegistry) -> TypeEnv {
    let mut env = TypeEnv::default();
    for k in reg.kinds() {
        env.vars.insert(k.name.clone(), k.clone());
    }
    env
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Parse { file } => parse_cmd(file),
        Command::Check { file } => check_cmd(file),
        Command::Describe { file, sort } => describe_cmd(file, sort.as_deref()),
        Command::Compile { file, json, always_core } => compile_cmd(file, json.as_deref(), *always_core),
        Command::Simulate { file, script, steps, seed, trace } => simulate_cmd(file, script, *steps, *seed, trace.as_deref()),
        Command::Units { command: UnitsCommand::Check { expr, model } } => units_cmd(expr, model.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Error(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Check) => ExitCode::from(2),
    }
}
