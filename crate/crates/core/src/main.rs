use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use wittlab::io::{complex_from_value, module_from_value, morphism_from_value, param_from_value, parse_json, vector_from_value};
use wittlab::report;
use wittlab::simplicial::SimplicialComplex;
use wittlab::suite::{self, SuiteConfig, DEFAULT_SEED};
use wittlab::{Error, FormParameter, HVector, QModMorphism, QuadraticModule};

const USAGE: u8 = 1;
const INVALID: u8 = 2;
const SUITE_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "wittlab", version, about = "Quadratic modules over Z, hyperbolic reduction and orthogonality complexes")]
struct Cli {
    #[arg(long, global = true, default_value_t = 1)]
    bound: u32,
    #[arg(long, global = true, default_value_t = 3)]
    max_degree: usize,
    #[arg(long, global = true, default_value_t = 10_000)]
    pi1_budget: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Desk,
}

#[derive(Subcommand)]
enum Command {
    /// Check the form axioms of a module file.
    Validate { module: PathBuf },
    /// Move a vector of H^g into the first hyperbolic block, or onto --target.
    Reduce {
        /// JSON array, or {"epsilon", "lambda", "vector"}.
        vector: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        epsilon: Option<i64>,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long, default_value_t = 12)]
        depth: usize,
    },
    /// Bounded lower bound for the Witt index, plain and stabilized.
    Witt {
        module: PathBuf,
        #[arg(long, default_value_t = 1)]
        stable_k: usize,
    },
    /// Arf invariant of a skew-even module with odd determinant.
    Arf { module: PathBuf },
    /// Orthogonal complement of a morphism, given as {"source", "target", "matrix"}.
    Complement { morphism: PathBuf },
    /// Statistics, homology and evidence clauses for the truncated complex.
    Ka {
        module: PathBuf,
        /// Claimed Witt index; defaults to the bounded lower bound.
        #[arg(long)]
        g: Option<i64>,
    },
    /// Integral homology of a complex file.
    Homology { complex: PathBuf },
    /// Weak Cohen-Macaulay check.
    Wcm {
        complex: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
    /// Local Cohen-Macaulay check.
    Lcm {
        complex: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
    /// Relative connectivity harness for a vertex subset.
    Prop25 {
        complex: PathBuf,
        #[arg(long, value_delimiter = ',')]
        subset: Vec<usize>,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
    /// Automorphism carrying h0 to h1, from {"module", "h0", "h1"}.
    Transitivity { input: PathBuf },
    /// Isomorphism M -> N from phi: M+H -> N+H, given as {"m", "n", "phi"}.
    Cancel { input: PathBuf },
    /// Run the acceptance criteria.
    Suite {
        #[arg(long, value_enum, default_value_t = Profile::Desk)]
        profile: Profile,
        /// Replacement homology goldens.
        #[arg(long)]
        goldens: Option<PathBuf>,
        /// Subset of criterion ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Parse(_)) { USAGE } else { INVALID };
        Failure { code, msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: USAGE, msg: msg.into() }
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok(parse_json(&text)?)
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, Failure> {
    v.get(key).ok_or_else(|| usage(format!("missing field {key:?}")))
}

fn module(v: &Value) -> Result<QuadraticModule, Failure> {
    Ok(module_from_value(v)?)
}

/// Accepts a bare matrix or `{"matrix"}`.
fn morphism(v: &Value, source: &QuadraticModule, target: &QuadraticModule) -> Result<QModMorphism, Failure> {
    let wrapped;
    let v = if v.is_array() {
        wrapped = json!({ "matrix": v });
        &wrapped
    } else {
        v
    };
    Ok(morphism_from_value(v, source, target)?)
}

fn complex(path: &Path) -> Result<SimplicialComplex, Failure> {
    Ok(complex_from_value(&read_json(path)?)?)
}

fn vector(path: &Path, epsilon: Option<i64>, lambda: Option<&str>) -> Result<HVector, Failure> {
    let v = read_json(path)?;
    let (coords, file_param) = match &v {
        Value::Array(_) => (vector_from_value(&v)?, None),
        _ => (vector_from_value(field(&v, "vector")?)?, if v.get("epsilon").is_some() { Some(param_from_value(&v)?) } else { None }),
    };
    let param = match (epsilon, lambda, file_param) {
        (None, None, Some(p)) => p,
        (e, l, p) => {
            let e = e.or(p.map(FormParameter::eps)).unwrap_or(-1);
            let l = l.map(str::to_string).or(p.map(|p| p.lambda().name().to_string())).unwrap_or_else(|| "even".into());
            param_from_value(&json!({"epsilon": e, "lambda": l}))?
        }
    };
    Ok(HVector::new(param, coords)?)
}

fn emit(value: &Value, format: Format, out: Option<&Path>) -> Result<(), Failure> {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(value).expect("report serializes") + "\n",
        Format::Csv => report::to_csv(value),
    };
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("WITTLAB_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| usage(format!("WITTLAB_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| usage(e.to_string()))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    configure_threads()?;
    let out = cli.out.as_deref();
    let (value, code) = match &cli.command {
        Command::Validate { module: p } => {
            let (v, ok) = report::validate_report(&module(&read_json(p)?)?);
            (v, if ok { 0 } else { INVALID })
        }
        Command::Reduce { vector: p, epsilon, lambda, target, depth } => {
            let v = vector(p, *epsilon, lambda.as_deref())?;
            let t = match target {
                Some(t) => Some(vector(t, Some(v.param().eps()), Some(v.param().lambda().name()))?),
                None => None,
            };
            (report::reduce_report(&v, t.as_ref(), *depth)?, 0)
        }
        Command::Witt { module: p, stable_k } => (report::witt_report(&module(&read_json(p)?)?, cli.bound, *stable_k)?, 0),
        Command::Arf { module: p } => (report::arf_report(&module(&read_json(p)?)?)?, 0),
        Command::Complement { morphism: p } => {
            let v = read_json(p)?;
            let (s, t) = (module(field(&v, "source")?)?, module(field(&v, "target")?)?);
            (report::complement_report(&morphism(field(&v, "matrix")?, &s, &t)?)?, 0)
        }
        Command::Ka { module: p, g } => (report::ka_report(&module(&read_json(p)?)?, cli.bound, cli.max_degree, *g, cli.pi1_budget)?, 0),
        Command::Homology { complex: p } => (report::homology_report(&complex(p)?, cli.max_degree), 0),
        Command::Wcm { complex: p, n } => (report::wcm_report(&complex(p)?, *n, cli.pi1_budget), 0),
        Command::Lcm { complex: p, n } => (report::lcm_report(&complex(p)?, *n, cli.pi1_budget), 0),
        Command::Prop25 { complex: p, subset, n } => (report::prop25_report(&complex(p)?, subset, *n, cli.pi1_budget)?, 0),
        Command::Transitivity { input } => {
            let v = read_json(input)?;
            let m = module(field(&v, "module")?)?;
            let h = QuadraticModule::hyperbolic(m.param(), 1);
            let (h0, h1) = (morphism(field(&v, "h0")?, &h, &m)?, morphism(field(&v, "h1")?, &h, &m)?);
            (report::transitivity_report(&m, &h0, &h1, cli.bound)?, 0)
        }
        Command::Cancel { input } => {
            let v = read_json(input)?;
            let (m, n) = (module(field(&v, "m")?)?, module(field(&v, "n")?)?);
            let h = QuadraticModule::hyperbolic(m.param(), 1);
            let phi = morphism(field(&v, "phi")?, &m.direct_sum(&h)?, &n.direct_sum(&h)?)?;
            (report::cancel_report(&m, &n, &phi, cli.bound)?, 0)
        }
        Command::Suite { profile: Profile::Desk, goldens, only } => {
            let mut cfg = SuiteConfig { seed: cli.seed, pi1_budget: cli.pi1_budget, ..SuiteConfig::default() };
            if let Some(g) = goldens {
                cfg.goldens = std::fs::read_to_string(g).map_err(|e| usage(format!("{}: {e}", g.display())))?;
            }
            let ids: Vec<u32> = if only.is_empty() { suite::CRITERIA.map(|c| c.0).to_vec() } else { only.clone() };
            if let Some(bad) = ids.iter().find(|&&id| !suite::CRITERIA.iter().any(|c| c.0 == id)) {
                return Err(usage(format!("no criterion {bad}")));
            }
            let r = suite::run_suite_with(&cfg, &ids, |c, t| {
                let verdict = if c.passed { "PASS" } else { "FAIL" };
                eprintln!("{:>2}  {:<32} {verdict}  {:>8.2}s  {}", c.id, c.name, t.as_secs_f64(), c.detail);
            });
            let v = match cli.format {
                Format::Json => serde_json::to_value(&r),
                Format::Csv => serde_json::to_value(&r.criteria),
            }
            .expect("report serializes");
            (v, if r.passed { 0 } else { SUITE_FAILED })
        }
    };
    emit(&value, cli.format, out)?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("wittlab: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
