mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pifair::fairness::ftu_at;
use pifair::satcheck::{encode_ftu_counterexample, export_dimacs};
use pifair::{
    check_disentangled, classifier_verdict, decision_verdict, decision_verdicts, extend_protected_ftci, parse_model,
    CausalGraph, Decision, DecisionLattice, DecisionStatus, Engine, Limits, Model,
};
use sha2::{Digest, Sha256};

use report::{AuditReport, CheckKind, CheckReport, DecisionEntry, ExplainReport, ExplanationEntry, Notion};

#[derive(Parser)]
#[command(name = "pifair", version, about = "Explanation-based fairness auditing of classifiers over constrained feature spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classifier-level fairness verdicts.
    Audit {
        model: PathBuf,
        #[command(flatten)]
        audit: AuditArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// AXps, PI-explanations and verdict of one decision.
    Explain {
        model: PathBuf,
        /// Comma-separated feature values, e.g. 1,0,1.
        #[arg(long)]
        instance: String,
        #[arg(long, value_enum, default_value_t = Notion::Existential)]
        notion: Notion,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// A single structural check.
    Check {
        model: PathBuf,
        #[arg(long, value_enum)]
        what: CheckKind,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Write the counterexample query for constrained FTU as DIMACS CNF.
    ExportCnf {
        model: PathBuf,
        out: PathBuf,
        #[arg(long)]
        ignore_constraints: bool,
    },
    /// Audit after protecting every feature reachable from a protected one
    /// in a causal graph.
    Ftci {
        model: PathBuf,
        graph: PathBuf,
        #[command(flatten)]
        audit: AuditArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long, value_enum, default_value_t = Notion::Existential)]
    notion: Notion,
    /// Include the verdict of every decision.
    #[arg(long)]
    per_decision: bool,
    #[arg(long, value_enum, default_value_t = EngineArg::Exhaustive)]
    engine: EngineArg,
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Treat the model as if its constraint list were empty.
    #[arg(long)]
    ignore_constraints: bool,
    /// Record wall-clock time in the report.
    #[arg(long)]
    timing: bool,
    /// Upper bound on the number of enumerated instances.
    #[arg(long)]
    max_instances: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Exhaustive,
    Search,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Engine {
        match e {
            EngineArg::Exhaustive => Engine::Exhaustive,
            EngineArg::Search => Engine::Search,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether the requested property holds.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Audit { model, audit, common } => {
            let (m, digest) = load(&model, common.ignore_constraints)?;
            let report = audit_report(&m, digest, &audit, &common)?;
            emit(&report, common.format, AuditReport::to_text)?;
            Ok(report.fair)
        }
        Command::Ftci {
            model,
            graph,
            audit,
            common,
        } => {
            let (m, digest) = load(&model, common.ignore_constraints)?;
            let text = fs::read_to_string(&graph).with_context(|| format!("reading {}", graph.display()))?;
            let g = CausalGraph::from_json(&text).with_context(|| format!("in {}", graph.display()))?;
            let extended = extend_protected_ftci(&m.space, &g)?;
            let newly = extended.protected().difference(m.space.protected());
            let m = m.with_protected(extended.protected());
            let mut report = audit_report(&m, digest, &audit, &common)?;
            report.newly_protected = newly.names(&m.space);
            emit(&report, common.format, AuditReport::to_text)?;
            Ok(report.fair)
        }
        Command::Explain {
            model,
            instance,
            notion,
            common,
        } => {
            let start = Instant::now();
            let (m, digest) = load(&model, common.ignore_constraints)?;
            let cs = m.constrained_space(limits(&common))?;
            let x = m.space.parse_instance(&instance)?;
            let d = Decision::new(&cs, &m.classifier, &x)?;
            let axps = DecisionLattice::build(&cs, &d)?.axp_explanations();
            let verdict = decision_verdict(&cs, &d)?;
            let ftu_here = ftu_at(&cs, &m.classifier, &x);
            let fair = match notion {
                Notion::Ftu => ftu_here,
                Notion::Existential => verdict.status != DecisionStatus::Unfair,
                Notion::Universal => verdict.status == DecisionStatus::UniversallyFair,
            };
            let report = ExplainReport {
                model_digest: digest,
                constraints_ignored: common.ignore_constraints,
                decision: DecisionEntry::of(&m.space, &verdict),
                axps: axps.iter().map(|e| ExplanationEntry::of(&m.space, e)).collect(),
                ftu_at_instance: ftu_here,
                fair,
                timing_ms: timing(&common, start),
            };
            emit(&report, common.format, ExplainReport::to_text)?;
            Ok(fair)
        }
        Command::Check { model, what, common } => {
            let (m, digest) = load(&model, common.ignore_constraints)?;
            let cs = m.constrained_space(limits(&common))?;
            let report = match what {
                CheckKind::Loose => CheckReport::loose(digest, &cs),
                CheckKind::Disentangled => {
                    let outcome = check_disentangled(&cs, &m.classifier)?;
                    CheckReport::disentangled(digest, &cs, &outcome)
                }
                CheckKind::Decomposable => CheckReport::decomposable(digest, &cs),
                CheckKind::Scope => CheckReport::scope(digest, &cs),
            };
            emit(&report, common.format, CheckReport::to_text)?;
            Ok(report.holds)
        }
        Command::ExportCnf {
            model,
            out,
            ignore_constraints,
        } => {
            let (m, _) = load(&model, ignore_constraints)?;
            let f = encode_ftu_counterexample(&m.space, &m.constraints, &m.classifier, &Limits::default())?;
            write_atomically(&out, &export_dimacs(&f))?;
            let mut legend = String::new();
            for (v, name) in &f.comment_map {
                legend.push_str(&format!("{v} {name}\n"));
            }
            print!("{legend}");
            eprintln!(
                "wrote {} variables and {} clauses to {}",
                f.variable_count,
                f.clauses.len(),
                out.display()
            );
            Ok(true)
        }
    }
}

fn load(path: &Path, ignore_constraints: bool) -> Result<(Model, String)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut m = parse_model(&text).with_context(|| format!("in {}", path.display()))?;
    if ignore_constraints {
        m = m.without_constraints();
    }
    let digest = format!("sha256:{}", hex::encode(Sha256::digest(m.canonical_json().as_bytes())));
    Ok((m, digest))
}

fn limits(common: &CommonArgs) -> Limits {
    let mut limits = Limits::default();
    if let Some(n) = common.max_instances {
        limits.max_instances = n as u128;
    }
    limits
}

fn timing(common: &CommonArgs, start: Instant) -> Option<f64> {
    common.timing.then(|| start.elapsed().as_secs_f64() * 1000.0)
}

fn audit_report(m: &Model, digest: String, audit: &AuditArgs, common: &CommonArgs) -> Result<AuditReport> {
    let start = Instant::now();
    let cs = m.constrained_space(limits(common))?;
    let verdict = classifier_verdict(&cs, &m.classifier, audit.engine.into())?;
    let mut report = AuditReport::new(digest, audit.notion, &cs, &verdict);
    if audit.per_decision {
        let entries = decision_verdicts(&cs, &m.classifier)?
            .iter()
            .map(|v| DecisionEntry::of(&m.space, v))
            .collect();
        report.per_decision = Some(entries);
    }
    report.timing_ms = timing(common, start);
    Ok(report)
}

fn emit<T: serde::Serialize>(report: &T, format: Format, text: impl Fn(&T) -> String) -> Result<()> {
    let out = match format {
        Format::Json => serde_json::to_string_pretty(report)? + "\n",
        Format::Text => text(report),
    };
    print!("{out}");
    Ok(())
}

fn write_atomically(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
