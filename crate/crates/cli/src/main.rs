//! `symsched`: drives lifts, rounding, gap searches and the lower-bound
//! checks from the command line and prints a JSON run report.
//!
//! Exit status is 0 when the command succeeded or the program was feasible,
//! 2 when it was infeasible or a search budget ran out, and 1 on errors.
//! Reports carry no timings, so repeated runs with the same inputs and seed
//! are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use symsched_core::formulations::FormulationKind;
use symsched_core::lab::{
    check_conditioning, check_hook_span, gen_hard_instance, pseudoindependence_sweep, verify_hard_sa,
    verify_hard_sos, LabError, SweepBounds,
};
use symsched_core::lift::{build_sa_lift, solve_lift, LiftInfeasibility, LiftSolution, Moments, DEFAULT_LIFT_CAP};
use symsched_core::model::{Epsilon, Instance};
use symsched_core::rational::zero;
use symsched_core::VarSet;
use symsched_core::rounding::{
    build_formulation, gap_search, round_with, OptOracle, RoundError, RoundMode, DEFAULT_BRUTE_FORCE_BUDGET,
};

#[derive(Parser)]
#[command(name = "symsched", version, about = "Exact lifts, rounding and lower-bound checks for makespan scheduling")]
struct Cli {
    /// Worker threads for the parallel sweeps (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a formulation, lift it and decide feasibility.
    Lift(LiftArgs),
    /// Round the lift to an integral schedule.
    Round(RoundArgs),
    /// Smallest lift-feasible makespan and the resulting gap.
    Gap(GapArgs),
    /// Write the Petersen hard instance for a given k.
    Hard(HardArgs),
    /// Run exact checks on the hard pseudoexpectation.
    VerifyLb(VerifyArgs),
}

#[derive(Args)]
struct InstanceArg {
    /// Instance JSON with `machines` and `jobs: [{id, size}]`.
    #[arg(long)]
    instance: PathBuf,
    /// Rational in `1/n` form.
    #[arg(long, default_value = "1/2")]
    epsilon: String,
    /// Lift degree.
    #[arg(long, default_value_t = 1)]
    degree: usize,
}

#[derive(Args)]
struct LiftArgs {
    #[command(flatten)]
    common: InstanceArg,
    /// Makespan bound.
    #[arg(long = "T")]
    t: u64,
    /// One of assign, clp, assign-sym, order.
    #[arg(long, default_value = "assign")]
    formulation: String,
    /// Also write the pseudoexpectation dump or the certificate here.
    #[arg(long)]
    certificate: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Sym,
    Order,
}

#[derive(Args)]
struct RoundArgs {
    #[command(flatten)]
    common: InstanceArg,
    /// Makespan bound.
    #[arg(long = "T")]
    t: u64,
    #[arg(long, value_enum, default_value = "sym")]
    mode: ModeArg,
    /// Seed of the persistence spot-checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GapArgs {
    #[command(flatten)]
    common: InstanceArg,
    #[arg(long, default_value = "assign")]
    formulation: String,
    /// Node budget of the brute-force optimum.
    #[arg(long, default_value_t = DEFAULT_BRUTE_FORCE_BUDGET)]
    budget: u64,
    /// Use this optimum instead of brute force.
    #[arg(long, conflicts_with = "opt_at_least")]
    opt: Option<u64>,
    /// Only a lower bound on the optimum is known.
    #[arg(long)]
    opt_at_least: Option<u64>,
}

#[derive(Args)]
struct HardArgs {
    /// Odd number of copies; the instance has 3k machines.
    #[arg(long)]
    k: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    level: usize,
    /// Comma-separated subset of sa, psd, indep, cond, ring.
    #[arg(long, default_value = "sa")]
    checks: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random identity checks per block for `psd`, random polynomials for
    /// `ring`.
    #[arg(long, default_value_t = 20)]
    samples: usize,
    /// Check only this many random `(T, R)` pairs in `cond`.
    #[arg(long)]
    cond_sample: Option<usize>,
    /// Largest `|T| + |gamma| + |mu|` in the `indep` and `cond` sweeps.
    #[arg(long, default_value_t = 3)]
    max_total: usize,
}

/// Final state of a command, mapped onto the exit status.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok,
    Infeasible,
    Exhausted,
    Violations,
}

impl Status {
    fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Infeasible => "infeasible",
            Status::Exhausted => "exhausted",
            Status::Violations => "violations",
        }
    }

    fn exit(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Infeasible | Status::Exhausted => 2,
            Status::Violations => 1,
        }
    }
}

struct Report {
    command: &'static str,
    parameters: Value,
    status: Status,
    artifacts: Map<String, Value>,
}

impl Report {
    fn new(command: &'static str, parameters: Value) -> Self {
        Report { command, parameters, status: Status::Ok, artifacts: Map::new() }
    }

    fn set(&mut self, key: &str, value: Value) {
        self.artifacts.insert(key.to_string(), value);
    }

    fn to_json(&self) -> String {
        let doc = json!({
            "command": self.command,
            "parameters": self.parameters,
            "status": self.status.name(),
            "artifacts": Value::Object(self.artifacts.clone()),
        });
        serde_json::to_string_pretty(&doc).expect("report serialises") + "\n"
    }
}

fn load_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Instance::from_json(&text)?)
}

fn parse_kind(text: &str) -> Result<FormulationKind> {
    FormulationKind::parse(text).with_context(|| format!("unknown formulation {text:?}"))
}

fn cmd_lift(args: &LiftArgs) -> Result<Report> {
    let instance = load_instance(&args.common.instance)?;
    let eps = Epsilon::parse(&args.common.epsilon)?;
    let kind = parse_kind(&args.formulation)?;
    let mut report = Report::new(
        "lift",
        json!({
            "instance": args.common.instance.display().to_string(),
            "formulation": kind.name(),
            "T": args.t,
            "degree": args.common.degree,
            "epsilon": eps.value().to_string(),
        }),
    );
    let form = build_formulation(&instance, kind, args.t, eps)?;
    report.set("base_vars", json!(form.lp.num_vars()));
    report.set("base_rows", json!(form.lp.rows.len()));
    let degree = args.common.degree;
    let dump = match solve_lift(&form.lp, degree, DEFAULT_LIFT_CAP)? {
        LiftSolution::Feasible(pe) => {
            report.set("feasible", json!(true));
            let singletons: Vec<String> =
                (0..form.lp.num_vars()).map(|v| pe.moment(&VarSet::singleton(v as u32)).to_string()).collect();
            report.set("singletons", json!(singletons));
            pe.dump()
        }
        LiftSolution::Infeasible(why) => {
            report.status = Status::Infeasible;
            report.set("feasible", json!(false));
            match why {
                LiftInfeasibility::Farkas(cert) => {
                    let lift = build_sa_lift(&form.lp, degree, DEFAULT_LIFT_CAP)?;
                    let mut text = String::from("# farkas multipliers, one per lifted row\n");
                    for (row, mu) in lift.lp.rows.iter().zip(&cert.multipliers) {
                        if *mu != zero() {
                            text.push_str(&format!("{} {}\n", row.name, mu));
                        }
                    }
                    report.set("certificate", json!("farkas"));
                    text
                }
                LiftInfeasibility::NoIntegralPoint(rows) => {
                    report.set("certificate", json!("no-integral-point"));
                    let mut text = String::from("# every 0/1 point with the base row it violates\n");
                    for (ones, row) in rows {
                        text.push_str(&format!("{ones} {}\n", form.lp.rows[row].name));
                    }
                    text
                }
            }
        }
    };
    if let Some(path) = &args.certificate {
        fs::write(path, dump).with_context(|| format!("writing {}", path.display()))?;
        report.set("certificate_file", json!(path.display().to_string()));
    }
    Ok(report)
}

fn cmd_round(args: &RoundArgs) -> Result<Report> {
    let instance = load_instance(&args.common.instance)?;
    let eps = Epsilon::parse(&args.common.epsilon)?;
    let mode = match args.mode {
        ModeArg::Sym => RoundMode::Symmetric,
        ModeArg::Order => RoundMode::Ordered,
    };
    let mut report = Report::new(
        "round",
        json!({
            "instance": args.common.instance.display().to_string(),
            "T": args.t,
            "degree": args.common.degree,
            "epsilon": eps.value().to_string(),
            "mode": match args.mode { ModeArg::Sym => "sym", ModeArg::Order => "order" },
            "seed": args.seed,
        }),
    );
    match round_with(&instance, args.t, eps, args.common.degree, mode, args.seed) {
        Ok(rep) => {
            if !rep.all_checks_hold() {
                report.status = Status::Violations;
            }
            report.set("schedule", serde_json::to_value(&rep.schedule)?);
            report.set("makespan", json!(rep.schedule.makespan));
            report.set("degree_left", json!(rep.degree_left));
            report.set("class_counts", json!(rep.counts));
            report.set("conditioning_steps", json!(rep.trace.len()));
            report.set("persistence", json!({ "checked": rep.persistence.0, "changed": rep.persistence.1 }));
            report.set("checks", serde_json::to_value(&rep.checks)?);
        }
        Err(RoundError::LiftInfeasible { .. }) => {
            report.status = Status::Infeasible;
            report.set("error", json!("LIFT_INFEASIBLE"));
        }
        Err(e @ RoundError::DegreeExhausted { .. }) => {
            report.status = Status::Exhausted;
            report.set("error", json!("DEGREE_EXHAUSTED"));
            report.set("detail", json!(e.to_string()));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(report)
}

fn cmd_gap(args: &GapArgs) -> Result<Report> {
    let instance = load_instance(&args.common.instance)?;
    let eps = Epsilon::parse(&args.common.epsilon)?;
    let kind = parse_kind(&args.formulation)?;
    let oracle = match (args.opt, args.opt_at_least) {
        (Some(v), _) => OptOracle::Known(v),
        (None, Some(v)) => OptOracle::AtLeast(v),
        (None, None) => OptOracle::BruteForce { budget: args.budget },
    };
    let mut report = Report::new(
        "gap",
        json!({
            "instance": args.common.instance.display().to_string(),
            "formulation": kind.name(),
            "degree": args.common.degree,
            "epsilon": eps.value().to_string(),
            "budget": args.budget,
            "opt": args.opt,
            "opt_at_least": args.opt_at_least,
        }),
    );
    match gap_search(&instance, eps, args.common.degree, kind, oracle) {
        Ok(gap) => {
            let (rel, opt) = match gap.opt {
                symsched_core::rounding::OptValue::Exact(v) => ("=", v),
                symsched_core::rounding::OptValue::AtLeast(v) => (">=", v),
            };
            report.set("t_star", json!(gap.t_star));
            report.set("opt", json!({ "relation": rel, "value": opt }));
            report.set("ratio", json!({ "relation": rel, "value": gap.ratio.to_string() }));
            let probes: Vec<Value> = gap.probes.iter().map(|(t, ok)| json!({ "T": t, "feasible": ok })).collect();
            report.set("probes", json!(probes));
        }
        Err(RoundError::BudgetExceeded { budget }) => {
            report.status = Status::Exhausted;
            report.set("error", json!(format!("brute force budget {budget} exhausted")));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(report)
}

fn cmd_hard(args: &HardArgs, out: Option<&Path>) -> Result<(Report, Option<String>)> {
    let hard = gen_hard_instance(args.k)?;
    let mut report = Report::new("hard", json!({ "k": args.k }));
    report.set("machines", json!(hard.machines()));
    report.set("T", json!(hard.t));
    report.set("sizes", json!(hard.sizes));
    report.set("potentials", json!(hard.potentials));
    report.set("matchings", json!(hard.matchings));
    // With --out the instance goes to the file and the report to stdout.
    let instance = hard.instance.to_json() + "\n";
    if out.is_some() {
        Ok((report, Some(instance)))
    } else {
        report.set("instance", serde_json::from_str(&instance)?);
        Ok((report, None))
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<Report> {
    let checks: Vec<&str> = args.checks.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let mut report = Report::new(
        "verify-lb",
        json!({
            "k": args.k,
            "level": args.level,
            "checks": checks,
            "seed": args.seed,
            "samples": args.samples,
            "cond_sample": args.cond_sample,
            "max_total": args.max_total,
        }),
    );
    let mut clean = true;
    for check in &checks {
        let value = match *check {
            "sa" => {
                let rep = verify_hard_sa(args.k, args.level)?;
                clean &= rep.is_empty();
                let first: Vec<String> = rep
                    .violations
                    .iter()
                    .take(10)
                    .map(|v| format!("{} S={} R={} value={}", v.row_name, v.s, v.r, v.value))
                    .collect();
                json!({ "rows": rep.rows_checked, "violations": rep.violations.len(), "first": first })
            }
            "psd" => {
                let rep = verify_hard_sos(args.k, args.level, args.samples, args.seed)?;
                clean &= rep.passed();
                let blocks: Vec<Value> = rep
                    .blocks
                    .iter()
                    .map(|(row, size, c)| {
                        json!({
                            "first_row": row,
                            "descriptors": size,
                            "psd": c.psd.is_psd(),
                            "identity_checks": c.identity_checks,
                            "identity_failures": c.identity_failures,
                        })
                    })
                    .collect();
                json!({ "blocks": blocks, "formula_mismatches": rep.mismatches })
            }
            "indep" => {
                let rep = pseudoindependence_sweep(args.k, args.max_total);
                clean &= rep.violations.is_empty();
                json!({
                    "checked": rep.checked,
                    "trivial": rep.trivial,
                    "disjoint_support": rep.disjoint_support,
                    "single_configuration": rep.single_configuration,
                    "general": rep.general,
                    "violations": rep.violations,
                })
            }
            "cond" => {
                let sample = args.cond_sample.map(|n| (n, args.seed));
                let bounds = SweepBounds { max_each: args.max_total, max_total: args.max_total, sample };
                let rep = check_conditioning(args.k, bounds);
                clean &= rep.is_empty();
                json!({
                    "product_checks": rep.product_checks,
                    "chain_checks": rep.chain_checks,
                    "extension_checks": rep.extension_checks,
                    "sampled_pairs": sample.map(|s| s.0),
                    "violations": rep.violations,
                })
            }
            "ring" => {
                let kill = symsched_core::lab::check_kill_consistency(args.k, args.samples, args.seed);
                let mut span = Vec::new();
                for (machines, configs, level) in [(3, 2, 1), (4, 2, 1), (4, 3, 1), (4, 2, 2)] {
                    let cases = check_hook_span(machines, configs, level)?;
                    let ok = cases.iter().all(|c| c.confirmed);
                    clean &= ok;
                    span.push(json!({ "machines": machines, "configs": configs, "level": level, "cases": cases.len(), "all_confirmed": ok }));
                }
                clean &= kill == 0;
                json!({ "kill_disagreements": kill, "span": span })
            }
            other => bail!("unknown check {other:?}; expected sa, psd, indep, cond or ring"),
        };
        report.set(check, value);
    }
    if !clean {
        report.status = Status::Violations;
    }
    Ok(report)
}

fn run(cli: &Cli) -> Result<Status> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    let (report, side_file) = match &cli.command {
        Command::Lift(a) => (cmd_lift(a)?, None),
        Command::Round(a) => (cmd_round(a)?, None),
        Command::Gap(a) => (cmd_gap(a)?, None),
        Command::Hard(a) => cmd_hard(a, cli.out.as_deref())?,
        Command::VerifyLb(a) => match cmd_verify(a) {
            Ok(r) => (r, None),
            Err(e) => match e.downcast_ref::<LabError>() {
                Some(LabError::SearchFailed { .. }) => {
                    let mut r = Report::new("verify-lb", json!({ "k": a.k, "level": a.level }));
                    r.status = Status::Exhausted;
                    r.set("error", json!(e.to_string()));
                    (r, None)
                }
                _ => return Err(e),
            },
        },
    };
    let text = report.to_json();
    match (&cli.out, side_file) {
        (Some(path), Some(instance)) => {
            fs::write(path, instance).with_context(|| format!("writing {}", path.display()))?;
            print!("{text}");
        }
        (Some(path), None) => fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
        (None, _) => print!("{text}"),
    }
    Ok(report.status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(status) => ExitCode::from(status.exit()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
