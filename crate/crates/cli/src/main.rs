mod config;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use flagtc::flag_ring::RuleFault;
use flagtc::search::{exhaustive_search, SearchOptions};
use flagtc::store::{ResultStore, StoreRecord};
use flagtc::suite::{verify_paper, SuiteOptions};
use flagtc::tensor::DEFAULT_TERM_CEILING;
use flagtc::zcl::{bounds_up_to, gap_sequence, sharpness_check, tc_report, ReportOptions};
use flagtc::{Error, FlagRing, GradedAlgebra, RawPoly, Space, TensorRing, ZdSpec};

use config::Config;

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(name = "flagtc", version, about = "Cohomology rings of real flag manifolds and bounds for their topological complexity")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Render the JSON result as indented text.
    #[arg(long, global = true)]
    pretty: bool,

    /// TOML file with `ceiling`, `max-candidates`, `workers` and `store`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Maximum number of tensor terms held while expanding a product.
    #[arg(long, global = true)]
    ceiling: Option<u64>,

    /// Maximum number of exponent tuples a search may examine.
    #[arg(long, global = true)]
    max_candidates: Option<u64>,

    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Append-only JSONL file of evaluated products.
    #[arg(long, global = true)]
    store: Option<PathBuf>,

    /// Accepted for scripting symmetry; results never depend on it.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Additive basis and Poincaré polynomial.
    Basis {
        #[arg(long)]
        space: String,
    },
    /// Normal form of a polynomial in the generators.
    Reduce {
        #[arg(long)]
        space: String,
        #[arg(long)]
        expr: String,
    },
    /// Checks the defining and derived relations of the ring.
    VerifyRing {
        #[arg(long)]
        space: String,
        /// Largest exponent used for the truncated-product relations.
        #[arg(long)]
        max_exponent: Option<u32>,
        #[arg(long, hide = true)]
        inject_fault: Option<usize>,
    },
    /// Evaluates a zero-divisor product in a tensor power.
    Zdp {
        #[arg(long)]
        space: String,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        expr: String,
        /// Include every basis tuple of the expanded product.
        #[arg(long)]
        dump_terms: bool,
    },
    /// Nonzero products of a fixed prefix times free zero-divisors.
    Search {
        #[arg(long)]
        space: String,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value = "1")]
        prefix: String,
        /// Comma-separated zero-divisors, e.g. `z[3,1],z[3,2]`.
        #[arg(long)]
        free: String,
        /// Total degree of the products.
        #[arg(long)]
        degree: u64,
        /// Comma-separated upper bounds for the free exponents.
        #[arg(long)]
        caps: Option<String>,
        /// Examine every tuple, including those that vanish for degree reasons.
        #[arg(long)]
        no_prune: bool,
    },
    /// Whether `(z1...zk)^(2^(e+1)-1)` vanishes over `F(1^k,2^e-1)`.
    Sharpness {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        e: u32,
    },
    /// Certified interval for TC_s.
    TcReport {
        #[arg(long)]
        space: String,
        #[arg(long, default_value_t = 2)]
        s: usize,
        /// Additional products to evaluate (repeatable).
        #[arg(long)]
        extra: Vec<String>,
    },
    /// `s·dim` minus the best lower bound, for s = 2 up to `--s-max`.
    Gap {
        #[arg(long)]
        space: String,
        #[arg(long)]
        s_max: usize,
    },
    /// Runs the batch of known identities and certificates.
    VerifyPaper {
        /// Also run the extended-scale searches.
        #[arg(long)]
        include_long: bool,
        #[arg(long, hide = true)]
        inject_fault: Option<usize>,
    },
}

struct Outcome {
    doc: Value,
    verified: bool,
}

impl Outcome {
    fn ok(doc: Value) -> Outcome {
        Outcome { doc, verified: true }
    }
}

struct Settings {
    term_ceiling: u64,
    max_candidates: Option<u64>,
    workers: Option<usize>,
    store: Option<ResultStore>,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::ResourceExceeded(_) => EXIT_RESOURCE,
        _ => EXIT_USAGE,
    }
}

fn error_doc(err: &Error) -> Value {
    let kind = match err {
        Error::Parse { .. } => "parse",
        Error::ResourceExceeded(_) => "resource",
        Error::Hypothesis(_) => "hypothesis",
        Error::Io(_) | Error::Json(_) => "io",
        _ => "invalid",
    };
    let mut doc = json!({ "kind": kind, "message": err.to_string() });
    if let Error::Parse { line, column, .. } = err {
        doc["line"] = json!(line);
        doc["column"] = json!(column);
    }
    json!({ "error": doc })
}

fn algebra(space: &str) -> Result<(Space, Arc<dyn GradedAlgebra>), Error> {
    let space = Space::parse(space)?;
    Ok((space, space.algebra()?))
}

fn poincare(algebra: &dyn GradedAlgebra) -> Vec<u64> {
    let mut counts = vec![0u64; algebra.dim() as usize + 1];
    for i in 0..algebra.basis_len() {
        counts[algebra.basis_degree(i) as usize] += 1;
    }
    counts
}

fn basis(space: &str) -> Result<Outcome, Error> {
    let (space, a) = algebra(space)?;
    let basis: Vec<Value> =
        (0..a.basis_len()).map(|i| json!({ "monomial": a.basis_label(i), "degree": a.basis_degree(i) })).collect();
    Ok(Outcome::ok(json!({
        "space": space.to_string(),
        "dim": a.dim(),
        "size": a.basis_len(),
        "basis": basis,
        "poincare": poincare(&*a),
    })))
}

fn reduce(space: &str, expr: &str) -> Result<Outcome, Error> {
    let (space, a) = algebra(space)?;
    // surface generators are written a1..an; the polynomial grammar uses x
    let text = if matches!(space, Space::Surface { .. }) { expr.replace('a', "x") } else { expr.to_string() };
    let p = RawPoly::parse(&text, a.generator_count())?;
    let mut acc = a.zero();
    for term in p.terms() {
        a.xor_generator_monomial_into(term.exponents(), &mut acc);
    }
    let terms: Vec<String> = acc.ones().map(|i| a.basis_label(i)).collect();
    let normal_form = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
    Ok(Outcome::ok(json!({
        "space": space.to_string(),
        "input": expr,
        "normal_form": normal_form,
        "terms": terms,
        "zero": acc.is_zero(),
    })))
}

fn relation_doc(name: &str, instances: Vec<(String, bool)>) -> Value {
    let failures: Vec<&String> = instances.iter().filter(|(_, ok)| !ok).map(|(l, _)| l).collect();
    json!({ "name": name, "passed": failures.is_empty(), "instances": instances.len(), "failures": failures })
}

fn verify_ring(space: &str, max_exponent: Option<u32>, fault: Option<usize>) -> Result<Outcome, Error> {
    let space = Space::parse(space)?;
    let reports: Vec<Value> = match space {
        Space::Flag { k, m } => {
            let ring = match fault {
                Some(generator) => FlagRing::with_fault(k, m, RuleFault { generator })?,
                None => FlagRing::new(k, m)?,
            };
            let max = max_exponent.unwrap_or((m + k) as u32 + 1);
            [
                ring.verify_dimension_ledger(),
                ring.verify_extended_relations(),
                ring.verify_annihilator(),
                ring.verify_tau_relations(max),
                ring.verify_heights(),
            ]
            .into_iter()
            .map(|r| relation_doc(&r.name, r.instances.into_iter().map(|i| (i.label, i.holds)).collect()))
            .collect()
        }
        Space::Surface { .. } => {
            let a = space.algebra()?;
            let n = a.generator_count();
            let top = a.top_index();
            let mut instances = Vec::new();
            for i in 1..=n {
                for j in 1..=n {
                    let product = a.mul(&a.generator_monomial(&unit(n, i)), &a.generator_monomial(&unit(n, j)));
                    let holds = if i == j { product.count_ones() == 1 && product.get(top) } else { product.is_zero() };
                    let label = if i == j { format!("a{i}^2 = T") } else { format!("a{i}*a{j} = 0") };
                    instances.push((label, holds));
                }
                let cube = a.mul(&a.basis_monomial(top), &a.generator_monomial(&unit(n, i)));
                instances.push((format!("a{i}*T = 0"), cube.is_zero()));
            }
            vec![relation_doc("surface_relations", instances)]
        }
    };
    let passed = reports.iter().all(|r| r["passed"] == json!(true));
    Ok(Outcome { doc: json!({ "space": space.to_string(), "passed": passed, "reports": reports }), verified: passed })
}

trait BasisMonomial {
    fn basis_monomial(&self, index: usize) -> flagtc::BitVector;
}

impl<T: GradedAlgebra + ?Sized> BasisMonomial for T {
    fn basis_monomial(&self, index: usize) -> flagtc::BitVector {
        flagtc::BitVector::unit(self.basis_len(), index)
    }
}

fn unit(n: usize, i: usize) -> Vec<u32> {
    let mut e = vec![0; n];
    e[i - 1] = 1;
    e
}

fn record(settings: &Settings, space: Space, s: usize, spec: &ZdSpec, nonzero: bool) -> Result<(), Error> {
    if let Some(store) = &settings.store {
        let text = spec.to_text(space.zd_symbol());
        store.append(&StoreRecord::now(space.to_string(), s, text, nonzero, spec.degree()))?;
    }
    Ok(())
}

fn zdp(settings: &Settings, space: &str, s: usize, expr: &str, dump_terms: bool) -> Result<Outcome, Error> {
    let (space, a) = algebra(space)?;
    let ring = TensorRing::new(a, s)?;
    let spec = ZdSpec::parse(expr)?;
    ring.validate(&spec)?;
    let degree = spec.degree();
    let mut doc = json!({
        "space": space.to_string(),
        "s": s,
        "spec": spec.to_text(space.zd_symbol()),
        "degree": degree,
        "top_degree": ring.top_degree(),
    });
    let nonzero = if dump_terms {
        let product = ring.evaluate(&spec, settings.term_ceiling)?;
        doc["term_count"] = json!(product.term_count());
        doc["terms"] = json!(product.term_strings());
        !product.is_zero()
    } else {
        ring.is_nonzero(&spec)?
    };
    doc["nonzero"] = json!(nonzero);
    if degree == ring.top_degree() as u64 {
        doc["top_coefficient"] = json!(ring.top_coefficient(&spec)?);
    }
    record(settings, space, s, &spec, nonzero)?;
    Ok(Outcome::ok(doc))
}

/// Splits on commas that are not inside brackets.
fn split_factors(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in text.char_indices() {
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(text[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(text[start..].trim());
    parts.into_iter().filter(|p| !p.is_empty()).collect()
}

fn free_factors(text: &str) -> Result<Vec<(usize, usize)>, Error> {
    split_factors(text)
        .into_iter()
        .map(|part| {
            let spec = ZdSpec::parse(part)?;
            match spec.factors().collect::<Vec<_>>().as_slice() {
                [(i, j, 1)] => Ok((*i, *j)),
                _ => Err(Error::InvalidParameters(format!("free factor '{part}' must be a single zero-divisor"))),
            }
        })
        .collect()
}

fn caps(text: &str) -> Result<Vec<u32>, Error> {
    text.split(',')
        .map(|c| c.trim().parse::<u32>().map_err(|_| Error::InvalidParameters(format!("bad cap '{c}'"))))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn search(
    settings: &Settings,
    space: &str,
    s: usize,
    prefix: &str,
    free: &str,
    degree: u64,
    cap_text: Option<&str>,
    no_prune: bool,
) -> Result<Outcome, Error> {
    let (space, a) = algebra(space)?;
    let ring = TensorRing::new(a, s)?;
    let prefix = ZdSpec::parse(prefix)?;
    let free = free_factors(free)?;
    let mut options = SearchOptions { prune: !no_prune, workers: settings.workers, ..SearchOptions::default() };
    if let Some(c) = settings.max_candidates {
        options.max_candidates = c;
    }
    if let Some(t) = cap_text {
        options.caps = Some(caps(t)?);
    }
    let out = exhaustive_search(&ring, &prefix, &free, degree, &options)?;
    for spec in &out.specs {
        record(settings, space, s, spec, true)?;
    }
    let symbol = space.zd_symbol();
    let specs: Vec<String> = out.specs.iter().map(|p| p.to_text(symbol)).collect();
    Ok(Outcome::ok(json!({
        "space": space.to_string(),
        "s": s,
        "prefix": prefix.to_text(symbol),
        "free": free.iter().map(|(i, j)| format!("{symbol}[{i},{j}]")).collect::<Vec<_>>(),
        "target_degree": out.target_degree,
        "candidates": out.candidates,
        "count": out.solutions.len(),
        "solutions": out.solutions,
        "specs": specs,
    })))
}

fn report_options(settings: &Settings, extra: &[String]) -> Result<ReportOptions, Error> {
    let extra = extra.iter().map(|e| ZdSpec::parse(e)).collect::<Result<Vec<_>, _>>()?;
    Ok(ReportOptions { extra, term_ceiling: settings.term_ceiling })
}

fn gap(settings: &Settings, space: &str, s_max: usize) -> Result<Outcome, Error> {
    let space = Space::parse(space)?;
    let opts = report_options(settings, &[])?;
    let values: Vec<Value> = match space {
        Space::Flag { k, m } => gap_sequence(k, m, s_max, &opts)?
            .into_iter()
            .map(|g| json!({ "s": g.s, "lower": g.lower, "upper": g.upper, "gap": g.value }))
            .collect(),
        Space::Surface { .. } => bounds_up_to(space, s_max, &opts, None)?
            .into_iter()
            .map(|b| json!({ "s": b.s, "lower": b.lower, "upper": b.upper, "gap": b.gap() }))
            .collect(),
    };
    Ok(Outcome::ok(json!({ "space": space.to_string(), "gaps": values })))
}

fn run(cli: &Cli, settings: &Settings) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Basis { space } => basis(space),
        Command::Reduce { space, expr } => reduce(space, expr),
        Command::VerifyRing { space, max_exponent, inject_fault } => verify_ring(space, *max_exponent, *inject_fault),
        Command::Zdp { space, s, expr, dump_terms } => zdp(settings, space, *s, expr, *dump_terms),
        Command::Search { space, s, prefix, free, degree, caps, no_prune } => {
            search(settings, space, *s, prefix, free, *degree, caps.as_deref(), *no_prune)
        }
        Command::Sharpness { k, e } => Ok(Outcome::ok(serde_json::to_value(sharpness_check(*k, *e, settings.term_ceiling)?)?)),
        Command::TcReport { space, s, extra } => {
            let opts = report_options(settings, extra)?;
            let bound = tc_report(Space::parse(space)?, *s, &opts, settings.store.as_ref())?;
            Ok(Outcome::ok(serde_json::to_value(bound)?))
        }
        Command::Gap { space, s_max } => gap(settings, space, *s_max),
        Command::VerifyPaper { include_long, inject_fault } => {
            let options = SuiteOptions {
                include_long: *include_long,
                fault: inject_fault.map(|generator| RuleFault { generator }),
                workers: settings.workers,
                term_ceiling: Some(settings.term_ceiling),
            };
            let report = verify_paper(&options);
            let verified = report.passed;
            Ok(Outcome { doc: serde_json::to_value(report)?, verified })
        }
    }
}

fn emit(doc: &Value, pretty: bool) {
    if pretty {
        print!("{}", render::render(doc));
    } else {
        println!("{doc}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match &cli.config {
        Some(path) => match Config::load(path) {
            Ok(c) => c,
            Err(msg) => {
                eprintln!("flagtc: {msg}");
                emit(&json!({ "error": { "kind": "config", "message": msg } }), cli.pretty);
                return ExitCode::from(EXIT_USAGE);
            }
        },
        None => Config::default(),
    };
    let flags = Config {
        ceiling: cli.ceiling,
        max_candidates: cli.max_candidates,
        workers: cli.workers,
        store: cli.store.clone(),
    };
    let config = file.overridden_by(flags);
    if let Some(n) = config.workers {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let store = match config.store.as_ref().map(ResultStore::open).transpose() {
        Ok(s) => s,
        Err(err) => {
            eprintln!("flagtc: {err}");
            emit(&error_doc(&err), cli.pretty);
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let settings = Settings {
        term_ceiling: config.ceiling.unwrap_or(DEFAULT_TERM_CEILING),
        max_candidates: config.max_candidates,
        workers: config.workers,
        store,
    };
    match run(&cli, &settings) {
        Ok(outcome) => {
            emit(&outcome.doc, cli.pretty);
            if outcome.verified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAILED)
            }
        }
        Err(err) => {
            eprintln!("flagtc: {err}");
            emit(&error_doc(&err), cli.pretty);
            ExitCode::from(exit_code(&err))
        }
    }
}
