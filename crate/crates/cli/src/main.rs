//! `priosel`: sort, select and robustness runs from the command line.
//!
//! Exit codes: 0 success, 1 invalid input, 2 infeasible selection, 64 usage.

use std::collections::BTreeMap;
use std::net::{Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use priosel_core::domain::{validate_scenario, Scenario, ValidationReport};
use priosel_core::fixtures;
use priosel_core::io::{
    apply_overlay, apply_performance_table, load_deck, parse_anchors, parse_assignment_run, parse_scenario_unchecked,
    read_performance_csv, save_assignment_run, scenario_hash, AssignmentRun, PortfolioLine, ReportFormat, RunReport,
};
use priosel_core::ladder::PriorityLadder;
use priosel_core::outranking::assign;
use priosel_core::robustness::{robustness_matrix, select, BudgetCase};
use priosel_core::solver::PortfolioSolution;
use priosel_core::srf::{compute_srf_weights, round_weights, validate_deck};
use priosel_core::threshold::{calibrate_affine, ThresholdSpec};

const DEFAULT_DATA_DIR: &str = "priosel-data";
const USAGE: u8 = 64;
const INVALID: u8 = 1;
const INFEASIBLE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "priosel",
    version,
    about = "Sort projects into priority categories and select a portfolio"
)]
struct Cli {
    /// Data directory consulted for scenario ids and used by `serve`.
    #[arg(long, global = true, env = "PRIOSEL_DATA_DIR")]
    data_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario and list every violation.
    Validate {
        scenario: String,
        /// Threshold/category overlay applied before validation.
        #[arg(long)]
        overlay: Option<PathBuf>,
        /// Performance table (CSV) replacing the scenario's performances.
        #[arg(long)]
        performance: Option<PathBuf>,
    },
    /// Derive criterion weights.
    Weights {
        #[command(subcommand)]
        method: WeightsMethod,
    },
    /// Fit affine thresholds through pairs of elicited anchors.
    Calibrate {
        #[arg(long)]
        anchors: PathBuf,
    },
    /// Assign every action to a category interval.
    Sort {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        weights: String,
        /// Cut level; defaults to the scenario's.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: ReportFormat,
    },
    /// Choose a portfolio from a sorting run.
    Select {
        #[arg(long)]
        scenario: String,
        /// Assignment file written by `sort`.
        #[arg(long)]
        assignments: PathBuf,
        /// Amount or budget name.
        #[arg(long)]
        budget: String,
        /// Constraint profile.
        #[arg(long, default_value = "full")]
        constraints: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: ReportFormat,
    },
    /// Re-run sort and select over weight sets and budgets.
    Robustness {
        #[arg(long)]
        scenario: String,
        /// Comma-separated weight vector names; all when omitted.
        #[arg(long, value_delimiter = ',')]
        weight_sets: Vec<String>,
        /// Comma-separated budgets, each `name|amount[:profile]`.
        #[arg(long, value_delimiter = ',', required = true)]
        budgets: Vec<String>,
        #[arg(long, default_value = "full")]
        constraints: String,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: ReportFormat,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Overrides the global data directory.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, default_value_t = Ipv4Addr::LOCALHOST)]
        host: Ipv4Addr,
    },
}

#[derive(Subcommand)]
enum WeightsMethod {
    /// Revised Simos card deck.
    Srf {
        #[arg(long)]
        deck: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(INVALID)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let data_dir = cli.data_dir.clone();
    match cli.command {
        Command::Validate {
            scenario,
            overlay,
            performance,
        } => validate(
            &scenario,
            data_dir.as_deref(),
            overlay.as_deref(),
            performance.as_deref(),
        ),
        Command::Weights {
            method: WeightsMethod::Srf { deck, out },
        } => weights_srf(&deck, out.as_deref()),
        Command::Calibrate { anchors } => calibrate(&anchors),
        Command::Sort {
            scenario,
            weights,
            lambda,
            out,
            format,
        } => {
            let s = resolve_scenario(&scenario, data_dir.as_deref())?;
            let lambda = lambda.unwrap_or(s.lambda);
            let run = AssignmentRun {
                scenario: s.name.clone(),
                scenario_hash: scenario_hash(&s),
                weights: weights.clone(),
                lambda,
                assignments: assign(&s, &weights, lambda)?,
            };
            let text = match format {
                ReportFormat::Json => save_assignment_run(&run),
                f => RunReport::Assignments(run.assignments).render(f),
            };
            emit(&text, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Select {
            scenario,
            assignments,
            budget,
            constraints,
            out,
            format,
        } => {
            let s = resolve_scenario(&scenario, data_dir.as_deref())?;
            selection(&s, &assignments, &budget, &constraints, out.as_deref(), format)
        }
        Command::Robustness {
            scenario,
            weight_sets,
            budgets,
            constraints,
            lambda,
            out,
            format,
        } => {
            let s = resolve_scenario(&scenario, data_dir.as_deref())?;
            let weight_sets = if weight_sets.is_empty() {
                s.weight_vectors.iter().map(|w| w.name.clone()).collect()
            } else {
                weight_sets
            };
            let budgets = budgets
                .iter()
                .map(|b| BudgetCase::parse(&s, b, &constraints))
                .collect::<Result<Vec<_>, _>>()?;
            let m = robustness_matrix(&s, &weight_sets, &budgets, lambda.unwrap_or(s.lambda))?;
            let text = match format {
                ReportFormat::Json => json(&m),
                f => RunReport::Portfolios(m.cells.iter().map(PortfolioLine::from).collect()).render(f),
            };
            emit(&text, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Serve { port, data, host } => {
            let dir = data.or(data_dir).unwrap_or_else(|| PathBuf::from(DEFAULT_DATA_DIR));
            serve(SocketAddr::from((host, port)), dir)
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// A path, then an id in the data directory, then a built-in name.
fn resolve_scenario(name: &str, data_dir: Option<&Path>) -> Result<Scenario> {
    let s = resolve_unchecked(name, data_dir)?;
    let report = validate_scenario(&s);
    if !report.is_ok() {
        bail!("scenario {name} is invalid:\n{}", describe(&report));
    }
    Ok(s)
}

fn resolve_unchecked(name: &str, data_dir: Option<&Path>) -> Result<Scenario> {
    let path = Path::new(name);
    if path.is_file() {
        return parse_scenario_unchecked(&read(path)?).with_context(|| format!("parsing {name}"));
    }
    if let Some(dir) = data_dir {
        let stored = dir.join("scenarios").join(format!("{name}.json"));
        if stored.is_file() {
            let env: serde_json::Value =
                serde_json::from_str(&read(&stored)?).with_context(|| format!("parsing {}", stored.display()))?;
            let doc = env
                .get("scenario")
                .ok_or_else(|| anyhow!("{} holds no scenario", stored.display()))?;
            return parse_scenario_unchecked(&doc.to_string()).with_context(|| format!("parsing {}", stored.display()));
        }
    }
    fixtures::builtin(name).ok_or_else(|| {
        anyhow!(
            "no scenario file, stored scenario or built-in named {name:?} (built-ins: {})",
            fixtures::BUILTIN_NAMES.join(", ")
        )
    })
}

fn describe(r: &ValidationReport) -> String {
    let mut out = String::new();
    for v in &r.violations {
        out.push_str(&format!("  error   {}: {}\n", v.path, v.message));
    }
    for v in &r.warnings {
        out.push_str(&format!("  warning {}: {}\n", v.path, v.message));
    }
    out
}

fn validate(
    name: &str,
    data_dir: Option<&Path>,
    overlay: Option<&Path>,
    performance: Option<&Path>,
) -> Result<ExitCode> {
    let mut s = resolve_unchecked(name, data_dir)?;
    if let Some(p) = overlay {
        s = apply_overlay(&s, &read(p)?).with_context(|| format!("applying {}", p.display()))?;
    }
    if let Some(p) = performance {
        let table = read_performance_csv(&read(p)?, &s.criteria).with_context(|| format!("reading {}", p.display()))?;
        apply_performance_table(&mut s, table)?;
    }
    let report = validate_scenario(&s);
    print!("{}", describe(&report));
    if report.is_ok() {
        println!(
            "{}: ok ({} actions, {} criteria, {} categories)",
            s.name,
            s.actions.len(),
            s.criteria.len(),
            s.categories.len()
        );
        Ok(ExitCode::SUCCESS)
    } else {
        println!("{}: {} error(s)", s.name, report.violations.len());
        Ok(ExitCode::from(INVALID))
    }
}

#[derive(Serialize)]
struct SrfOutput {
    name: String,
    weights: BTreeMap<String, f64>,
    rounded: BTreeMap<String, f64>,
}

fn weights_srf(path: &Path, out: Option<&Path>) -> Result<ExitCode> {
    let spec = load_deck(path)?;
    let deck = spec.canonical()?;
    let issues = validate_deck(&deck, None);
    if !issues.is_empty() {
        bail!("{}: {}", path.display(), issues.join("; "));
    }
    let weights = compute_srf_weights(&deck)?;
    let report = SrfOutput {
        name: spec.name,
        rounded: round_weights(&weights, 1),
        weights,
    };
    emit(&json(&report), out)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct Calibrated {
    name: String,
    alpha: f64,
    beta: f64,
}

fn calibrate(path: &Path) -> Result<ExitCode> {
    let file = parse_anchors(&read(path)?)?;
    let mut rows = Vec::new();
    for pair in &file.pairs {
        let spec = calibrate_affine(&pair.anchors).with_context(|| pair.name.clone())?;
        let ThresholdSpec::Affine { alpha, beta } = spec else {
            unreachable!("calibration always yields an affine threshold")
        };
        rows.push(Calibrated {
            name: pair.name.clone(),
            alpha,
            beta,
        });
    }
    print!("{}", json(&rows));
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SelectionReport<'a> {
    scenario: &'a str,
    weights: &'a str,
    lambda: f64,
    budget: &'a BudgetCase,
    ladder: &'a PriorityLadder,
    solution: &'a PortfolioSolution,
}

fn selection(
    s: &Scenario,
    assignments: &Path,
    budget: &str,
    profile: &str,
    out: Option<&Path>,
    format: ReportFormat,
) -> Result<ExitCode> {
    let run =
        parse_assignment_run(&read(assignments)?).with_context(|| format!("parsing {}", assignments.display()))?;
    if run.scenario_hash != scenario_hash(s) {
        eprintln!(
            "warning: {} was sorted from a different version of {}",
            assignments.display(),
            s.name
        );
    }
    let case = BudgetCase::parse(s, budget, profile)?;
    let (ladder, solution) = select(s, &run.assignments, case.amount, &case.profile)?;
    let text = match format {
        ReportFormat::Json => json(&SelectionReport {
            scenario: &s.name,
            weights: &run.weights,
            lambda: run.lambda,
            budget: &case,
            ladder: &ladder,
            solution: &solution,
        }),
        f => RunReport::Portfolios(vec![PortfolioLine {
            weights: run.weights.clone(),
            budget: case.label.clone(),
            amount: case.amount,
            profile: case.profile.clone(),
            feasible: !solution.infeasible,
            objective: solution.objective,
            total_cost: solution.total_cost,
            selected: solution.selected.clone(),
        }])
        .render(f),
    };
    emit(&text, out)?;
    match &solution.infeasibility {
        None => Ok(ExitCode::SUCCESS),
        Some(r) => {
            eprintln!(
                "infeasible: no selection within {} satisfies the {} profile",
                case.amount, case.profile
            );
            if !r.structural.is_empty() {
                eprintln!("  unsatisfiable at any budget: {}", r.structural.join(", "));
            }
            if !r.budget_conflicts.is_empty() {
                eprintln!("  unsatisfiable within the budget: {}", r.budget_conflicts.join(", "));
            }
            eprintln!("  relax: {}", r.minimal_relaxation.join(", "));
            Ok(ExitCode::from(INFEASIBLE))
        }
    }
}

fn serve(addr: SocketAddr, dir: PathBuf) -> Result<ExitCode> {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(priosel_service::serve(addr, dir))?;
    Ok(ExitCode::SUCCESS)
}
