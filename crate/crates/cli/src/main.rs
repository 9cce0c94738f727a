//! `symmcfg`: calculators, generators and searches for (l,k)-symmetric
//! configurations.
//!
//! Exit status: 0 on success, 1 when a search ends unknown or out of budget,
//! 2 on usage and validation errors.

mod family;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use symmcfg::dyadic::{self, DyadicFamilyKind};
use symmcfg::families::bigint_to_json;
use symmcfg::families::poly::StarPolynomial;
use symmcfg::hales_jewett::{hj_number, HjOutcome};
use symmcfg::identities::run_identity_suite;
use symmcfg::search::{
    self, BoxOverrides, Coloring, MinimalOutcome, Outcome, SearchBudget, SearchError, SearchOptions,
};
use symmcfg::{generate, ExactScalar, FamilyError, SymmetricContext, SymmetricError};

use family::FamilyArgs;

#[derive(Debug)]
pub struct CliError {
    message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { message: message.into() }
    }
}

impl From<SymmetricError> for CliError {
    fn from(e: SymmetricError) -> Self {
        CliError::usage(format!("{}: {e}", e.kind()))
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::Symmetric(s) => s.into(),
            other => CliError::usage(other.to_string()),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Family(f) => f.into(),
            other => CliError::usage(other.to_string()),
        }
    }
}

impl From<dyadic::DyadicError> for CliError {
    fn from(e: dyadic::DyadicError) -> Self {
        CliError::usage(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "symmcfg", version, about = "Exact (l,k)-symmetric arithmetic and partition-regularity searches")]
struct Cli {
    /// Emit exactly one JSON document on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for searches.
    #[arg(long, global = true, env = "SYMMCFG_WORKERS", default_value_t = 1)]
    workers: usize,
    /// Seed for randomized components.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Include wall-clock time in reports (makes output nondeterministic).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DomainArg {
    Nat,
    Int,
}

impl From<DomainArg> for search::Domain {
    fn from(d: DomainArg) -> Self {
        match d {
            DomainArg::Nat => search::Domain::Nat,
            DomainArg::Int => search::Domain::Int,
        }
    }
}

#[derive(Debug, Clone, clap::Args)]
struct SearchArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Parameter box: "lo:hi" for all parameters, or "a=1:5,d=1:2".
    #[arg(long, allow_hyphen_values = true)]
    r#box: Option<String>,
    #[arg(long, value_enum, default_value = "nat")]
    domain: DomainArg,
    /// Keep instances whose generated values coincide.
    #[arg(long)]
    allow_degenerate: bool,
    /// Backtracking node budget per window.
    #[arg(long, default_value_t = 200_000_000)]
    max_nodes: u64,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Decision depth at which the search tree is split across workers.
    #[arg(long, default_value_t = 10)]
    split_depth: usize,
}

impl SearchArgs {
    fn budget(&self, workers: usize) -> Result<SearchBudget, CliError> {
        let time_limit = match self.time_limit {
            None => None,
            Some(t) if t > 0.0 && t.is_finite() => Some(Duration::from_secs_f64(t)),
            Some(t) => return Err(CliError::usage(format!("--time-limit must be positive, got {t}"))),
        };
        if self.max_nodes == 0 {
            return Err(CliError::usage("--max-nodes must be at least 1"));
        }
        if workers == 0 {
            return Err(CliError::usage("--workers must be at least 1"));
        }
        Ok(SearchBudget { max_nodes: self.max_nodes, time_limit, workers, split_depth: self.split_depth })
    }

    fn options(&self) -> SearchOptions {
        SearchOptions { allow_degenerate: self.allow_degenerate, symmetry: true }
    }

    fn overrides(&self) -> Result<BoxOverrides, CliError> {
        match &self.r#box {
            Some(text) => Ok(BoxOverrides::parse(text)?),
            None => Ok(BoxOverrides::default()),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact calculators: star, gfold, gfold-esp, power, inverse, identity,
    /// image, star-poly, oplus, otimes, decompose, phi, rho, oplus-hj, otimes-hj.
    Calc {
        op: String,
        #[arg(allow_negative_numbers = true)]
        args: Vec<String>,
        #[arg(long, allow_negative_numbers = true)]
        l: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        k: Option<i64>,
        /// Accept non-integer results.
        #[arg(long)]
        rational: bool,
        /// star-poly coefficients a0,a1,… (constant first); oplus-hj/otimes-hj fixed part.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: Option<String>,
        /// Letter multiplicity for oplus-hj/otimes-hj.
        #[arg(long, default_value_t = 1)]
        c: u32,
    },
    /// Generate one instance of a family.
    Gen {
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Find a monochromatic instance in a coloring file.
    Witness {
        #[command(flatten)]
        search: SearchArgs,
        /// Coloring file: "lo hi r" then one base-36 digit per point.
        #[arg(long)]
        coloring: PathBuf,
    },
    /// Search for an r-coloring of the window with no monochromatic instance.
    Avoid {
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, default_value_t = 2)]
        colors: usize,
        /// Window size N: [1,N] or [-N,N].
        #[arg(long)]
        n: i64,
    },
    /// Least N at which every r-coloring has a monochromatic instance.
    MinimalN {
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, default_value_t = 2)]
        colors: usize,
        #[arg(long)]
        nmax: i64,
    },
    /// Hales-Jewett number search over [t]^N.
    Hj {
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 2)]
        colors: usize,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
        #[arg(long, default_value_t = 200_000_000)]
        max_nodes: u64,
    },
    /// Run the randomized algebraic identity suite.
    VerifyIdentities {
        /// Cases per identity and context.
        #[arg(long, default_value_t = 2000)]
        cases: u64,
    },
}

struct Output {
    json: Value,
    text: String,
    code: u8,
}

impl Output {
    fn ok(json: Value, text: impl Into<String>) -> Self {
        Output { json, text: text.into(), code: 0 }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            // A closed stdout (e.g. piped into `head`) is not an error here.
            let mut stdout = std::io::stdout().lock();
            let _ = if cli.json {
                writeln!(stdout, "{}", out.json)
            } else {
                writeln!(stdout, "{}", out.text.trim_end())
            };
            ExitCode::from(out.code)
        }
        Err(e) => {
            if cli.json {
                let _ = writeln!(std::io::stdout(), "{}", json!({"error": e.message}));
            }
            eprintln!("error: {}", e.message);
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Calc { op, args, l, k, rational, coeffs, c } => calc(op, args, *l, *k, *rational, coeffs.as_deref(), *c),
        Command::Gen { family } => {
            let desc = family.descriptor()?;
            let instance = generate(&desc)?;
            let mut doc = instance.to_json();
            doc["family"] = desc.to_json();
            let elements: Vec<String> = instance.elements.iter().map(BigInt::to_string).collect();
            let text = format!(
                "{{{}}}{}",
                elements.join(", "),
                if instance.degenerate { format!("  (degenerate: {} raw values)", instance.raw_count) } else { String::new() }
            );
            Ok(Output::ok(doc, text))
        }
        Command::Witness { search: args, coloring } => {
            let text = std::fs::read_to_string(coloring)
                .map_err(|e| CliError::usage(format!("--coloring {}: {e}", coloring.display())))?;
            let coloring = Coloring::parse(&text).map_err(SearchError::from)?;
            let desc = args.family.descriptor()?;
            let n = coloring.lo().unsigned_abs().max(coloring.hi().unsigned_abs()) as i64;
            let param_box = args.overrides()?.resolve(&desc, args.domain.into(), n)?;
            let report = search::find_witness(&coloring, &desc, &param_box, &args.budget(cli.workers)?, &args.options())?;
            Ok(search_output(&report, cli.timing))
        }
        Command::Avoid { search: args, colors, n } => {
            if *n < 1 {
                return Err(CliError::usage(format!("--n must be at least 1, got {n}")));
            }
            let desc = args.family.descriptor()?;
            let domain: search::Domain = args.domain.into();
            let param_box = args.overrides()?.resolve(&desc, domain, *n)?;
            let report = search::find_avoiding_coloring(
                &desc,
                *colors,
                domain.window(*n),
                &param_box,
                &args.budget(cli.workers)?,
                &args.options(),
            )?;
            Ok(search_output(&report, cli.timing))
        }
        Command::MinimalN { search: args, colors, nmax } => {
            if *nmax < 1 {
                return Err(CliError::usage(format!("--nmax must be at least 1, got {nmax}")));
            }
            let desc = args.family.descriptor()?;
            let report = search::minimal_window(
                &desc,
                *colors,
                *nmax,
                args.domain.into(),
                &args.overrides()?,
                &args.budget(cli.workers)?,
                &args.options(),
            )?;
            let mut text = match report.minimal_n {
                Some(n) => format!("minimal N = {n}\n"),
                None => format!("{} (N_max = {})\n", report.outcome.name(), report.n_max),
            };
            for step in &report.steps {
                text.push_str(&format!("  N={:<4} {:<24} nodes={}\n", step.n, step.outcome.name(), step.nodes));
            }
            if let Some(c) = &report.avoiding {
                text.push_str(&format!("avoiding coloring of [{}, {}]:\n{}", c.lo(), c.hi(), c.to_text()));
            }
            let code = if report.outcome == MinimalOutcome::Found { 0 } else { 1 };
            Ok(Output { json: report.to_json(cli.timing), text, code })
        }
        Command::Hj { t, colors, nmax, max_nodes } => {
            if !(1..=64).contains(colors) {
                return Err(CliError::usage(format!("--colors must be between 1 and 64, got {colors}")));
            }
            let budget = SearchBudget { max_nodes: *max_nodes, workers: cli.workers.max(1), ..SearchBudget::default() };
            let report = hj_number(*t, *colors, *nmax, &budget).map_err(|e| CliError::usage(e.to_string()))?;
            let steps: Vec<Value> = report
                .steps
                .iter()
                .map(|s| {
                    let verdict = match s.regular {
                        Some(true) => "regular",
                        Some(false) => "avoiding_coloring_found",
                        None => "budget_exhausted",
                    };
                    let avoider = s.avoider.as_ref().map(|c| {
                        c.iter().map(|&x| char::from_digit(u32::from(x), 36).unwrap_or('?')).collect::<String>()
                    });
                    json!({"n": s.n, "outcome": verdict, "nodes": s.nodes, "avoider": avoider})
                })
                .collect();
            let (outcome, value, code) = match report.outcome {
                HjOutcome::Found(n) => ("found", Some(n), 0),
                HjOutcome::Unknown(_) => ("unknown", None, 1),
                HjOutcome::BudgetExhausted(_) => ("budget_exhausted", None, 1),
            };
            let doc = json!({"outcome": outcome, "hj_number": value, "t": t, "colors": colors, "n_max": nmax, "steps": steps});
            let text = match value {
                Some(n) => format!("HJ({colors},{t}) = {n}"),
                None => format!("{outcome} up to N = {nmax}"),
            };
            Ok(Output { json: doc, text, code })
        }
        Command::VerifyIdentities { cases } => {
            let report = run_identity_suite(cli.seed, *cases);
            let mut text = String::new();
            for c in &report.checks {
                let status = if c.passed() { "ok  " } else { "FAIL" };
                text.push_str(&format!("{status} {:<48} {:>8} cases\n", c.name, c.cases));
                if let Some(f) = &c.first_failure {
                    text.push_str(&format!("     first failure: {f}\n"));
                }
            }
            let code = if report.all_passed() { 0 } else { 1 };
            Ok(Output { json: report.to_json(), text, code })
        }
    }
}

fn search_output(report: &search::SearchReport, timing: bool) -> Output {
    let mut text = format!("outcome: {}\n", report.outcome.name());
    if let Some(w) = &report.witness {
        let params: Vec<String> = w.params.iter().map(|(n, v)| format!("{n}={v}")).collect();
        let elements: Vec<String> = w.elements.iter().map(BigInt::to_string).collect();
        text.push_str(&format!("witness: {} -> {{{}}} color {}\n", params.join(" "), elements.join(", "), w.color));
    }
    if let Some(c) = &report.avoiding {
        text.push_str(&c.to_text());
    }
    text.push_str(&format!(
        "nodes: {}  instances: {}  edges: {}\n",
        report.stats.nodes, report.stats.enumeration.instances, report.stats.edges
    ));
    let code = if report.outcome == Outcome::BudgetExhausted { 1 } else { 0 };
    Output { json: report.to_json(timing), text, code }
}

fn parse_ints(values: &[String]) -> Result<Vec<BigInt>, CliError> {
    values
        .iter()
        .map(|v| v.trim().parse::<BigInt>().map_err(|_| CliError::usage(format!("{v:?} is not an integer"))))
        .collect()
}

fn context(l: Option<i64>, k: Option<i64>) -> Result<SymmetricContext, CliError> {
    match (l, k) {
        (Some(l), Some(k)) => Ok(SymmetricContext::new(l, k)?),
        _ => Err(CliError::usage("this operation needs --l and --k")),
    }
}

fn exact_output(value: &ExactScalar, rational: bool) -> Result<Output, CliError> {
    match value.to_integer() {
        Some(v) => Ok(Output::ok(json!({"result": bigint_to_json(&v)}), v.to_string())),
        None if rational => Ok(Output::ok(json!({"result": value.to_string(), "integer": false}), value.to_string())),
        None => Err(CliError::usage(format!("result {value} is not an integer; pass --rational to accept it"))),
    }
}

fn int_output(value: BigInt) -> Output {
    Output::ok(json!({"result": bigint_to_json(&value)}), value.to_string())
}

fn arity(op: &str, values: &[BigInt], n: usize) -> Result<(), CliError> {
    if values.len() == n {
        Ok(())
    } else {
        Err(CliError::usage(format!("calc {op} takes {n} argument(s), got {}", values.len())))
    }
}

fn calc(
    op: &str,
    args: &[String],
    l: Option<i64>,
    k: Option<i64>,
    rational: bool,
    coeffs: Option<&str>,
    c: u32,
) -> Result<Output, CliError> {
    let values = parse_ints(args)?;
    let list = |text: Option<&str>| -> Result<Vec<BigInt>, CliError> {
        let text = text.unwrap_or("");
        parse_ints(&text.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect::<Vec<_>>())
    };
    match op {
        "star" => {
            let ctx = context(l, k)?;
            arity(op, &values, 2)?;
            Ok(int_output(ctx.star(&values[0], &values[1])))
        }
        "gfold" => Ok(int_output(context(l, k)?.gfold(&values)?)),
        "gfold-esp" => Ok(int_output(context(l, k)?.gfold_esp(&values)?)),
        "power" => {
            let ctx = context(l, k)?;
            arity(op, &values, 2)?;
            let exponent = i64::try_from(&values[1]).map_err(|_| CliError::usage("exponent does not fit in i64"))?;
            exact_output(&ctx.power(&values[0], exponent)?, rational)
        }
        "inverse" => {
            let ctx = context(l, k)?;
            arity(op, &values, 1)?;
            Ok(int_output(ctx.inverse(&values[0])?))
        }
        "identity" => {
            let ctx = context(l, k)?;
            let e = ctx.identity().ok_or(SymmetricError::NonUnitalIdentity { l: ctx.l(), k: ctx.k() })?;
            Ok(int_output(e))
        }
        "image" => {
            let ctx = context(l, k)?;
            arity(op, &values, 1)?;
            Ok(int_output(ctx.image(&values[0])))
        }
        "star-poly" => {
            let ctx = context(l, k)?;
            arity(op, &values, 1)?;
            let poly = StarPolynomial::new(ctx, list(coeffs)?)?;
            exact_output(&poly.eval(&values[0])?, rational)
        }
        "oplus" => Ok(int_output(dyadic::oplus_fold(&values)?)),
        "otimes" => Ok(int_output(dyadic::otimes_fold(&values)?)),
        "decompose" => {
            arity(op, &values, 1)?;
            let d = dyadic::decompose(&values[0])?;
            Ok(Output::ok(
                json!({"valuation": d.valuation, "odd_part": bigint_to_json(&d.odd_part)}),
                format!("2^{} * {}", d.valuation, d.odd_part),
            ))
        }
        "phi" | "rho" => {
            arity(op, &values, 1)?;
            let (x, y) = if op == "phi" { dyadic::phi(&values[0])? } else { dyadic::rho(&values[0])? };
            Ok(Output::ok(json!({"result": [x, bigint_to_json(&y)]}), format!("({x}, {y})")))
        }
        "oplus-hj" | "otimes-hj" => {
            let kind = if op == "oplus-hj" { DyadicFamilyKind::OplusHJ } else { DyadicFamilyKind::OtimesHJ };
            let fixed = list(coeffs)?;
            let letters = dyadic::gen_dyadic_family(kind, &fixed, &values, c)?;
            let mut text = String::new();
            let rows: Vec<Value> = letters
                .iter()
                .map(|row| {
                    text.push_str(&format!(
                        "a={}: fold={} closed_form={} ({})",
                        row.letter,
                        row.fold,
                        row.closed_form,
                        if row.closed_form_matches() { "matches" } else { "differs" }
                    ));
                    if let Some(cf) = &row.corrected_form {
                        let ok = row.corrected_form_matches() == Some(true);
                        text.push_str(&format!(" corrected_form={cf} ({})", if ok { "matches" } else { "differs" }));
                    }
                    text.push('\n');
                    json!({
                        "letter": bigint_to_json(&row.letter),
                        "fold": bigint_to_json(&row.fold),
                        "closed_form": bigint_to_json(&row.closed_form),
                        "closed_form_matches": row.closed_form_matches(),
                        "corrected_form": row.corrected_form.as_ref().map(bigint_to_json),
                        "corrected_form_matches": row.corrected_form_matches(),
                    })
                })
                .collect();
            Ok(Output::ok(json!({"letters": rows}), text))
        }
        other => Err(CliError::usage(format!(
            "unknown calc operation {other:?}; expected one of star, gfold, gfold-esp, power, inverse, identity, \
             image, star-poly, oplus, otimes, decompose, phi, rho, oplus-hj, otimes-hj"
        ))),
    }
}
