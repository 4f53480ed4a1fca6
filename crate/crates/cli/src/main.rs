use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use cr_mobius::expr::FieldExpr;
use cr_mobius::geometry::{curvature_at, frame_data_at, operators_at, GeometryError, Model};
use cr_mobius::schwarzian::schwarzian_at;
use cr_mobius::solutions::{integrability_witness, witness_residual, SolutionError};
use cr_mobius::verify::{run_suite, ModelSpec, Report, SuiteConfig, SuiteError, SuiteSelection};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_DOMAIN: u8 = 3;

#[derive(Parser)]
#[command(name = "cr-mobius")]
#[command(about = "Pseudo-hermitian geometry checks: CR Schwarzian, Webster curvature, Möbius equation")]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Evaluate frame data, the Schwarzian, curvature or operators at a point
    Evaluate {
        what: Quantity,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Same as `evaluate schwarzian`
    Schwarzian {
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Run a verification suite on seeded random samples
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        /// Suite name or check name
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Tolerance override, `name=value`; repeatable
        #[arg(long = "tol", value_name = "NAME=VALUE")]
        tol: Vec<String>,
        /// Full suite configuration as JSON; other flags are ignored
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the JSON report here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the JSON report instead of a table
        #[arg(long)]
        json: bool,
    },
    /// Explicit Möbius solution on the Heisenberg group with prescribed gradient at a point
    Witness {
        #[arg(long)]
        n: usize,
        /// Comma-separated coordinates `x1,y1,...,t`; defaults to the origin
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// JSON array of `[re, im]` pairs
        #[arg(long)]
        omega: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Quantity {
    Frame,
    Schwarzian,
    Curvature,
    Operators,
}

#[derive(Args)]
struct ModelArgs {
    /// Model specification JSON
    #[arg(long)]
    model_file: Option<PathBuf>,
    /// heisenberg, rigid, rigid-normalized or conformal
    #[arg(long, default_value = "heisenberg")]
    model: String,
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Conformal factor for `--model conformal`; otherwise the field when `--field` is absent
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    /// Rigid potential in z1, zbar1
    #[arg(long = "Phi", allow_hyphen_values = true)]
    potential: Option<String>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, allow_hyphen_values = true)]
    field: Option<String>,
    /// Comma-separated coordinates `x1,y1,...,t`; defaults to the origin
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Domain(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Domain(_) => EXIT_DOMAIN,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Domain(m) => m,
        }
    }
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::InvalidModel(_) | GeometryError::Arity { .. } => Failure::Config(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<SolutionError> for Failure {
    fn from(e: SolutionError) -> Self {
        match e {
            SolutionError::Geometry(g) => g.into(),
            SolutionError::Arity { .. } | SolutionError::AllZero | SolutionError::DimensionTooSmall(_) => {
                Failure::Config(e.to_string())
            }
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<SuiteError> for Failure {
    fn from(e: SuiteError) -> Self {
        match e {
            SuiteError::Geometry(g) => g.into(),
            SuiteError::Solution(s) => s.into(),
            _ => Failure::Config(e.to_string()),
        }
    }
}

fn c(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn mat(m: &[Vec<Complex64>]) -> Value {
    Value::Array(m.iter().map(|r| Value::Array(r.iter().copied().map(c).collect())).collect())
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.12} {:+.12}i", z.re, z.im)
}

fn parse_point(text: Option<&str>, n: usize) -> Result<Vec<f64>, Failure> {
    let p: Vec<f64> = match text {
        None => vec![0.0; 2 * n + 1],
        Some(s) => s
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| Failure::Config(format!("bad point `{s}`: {e}")))?,
    };
    if p.len() != 2 * n + 1 {
        return Err(Failure::Config(format!(
            "point has {} coordinates; model expects {}",
            p.len(),
            2 * n + 1
        )));
    }
    Ok(p)
}

fn parse_field(text: &str) -> Result<FieldExpr, Failure> {
    text.parse().map_err(|e| Failure::Config(format!("cannot parse `{text}`: {e}")))
}

impl ModelArgs {
    fn spec(&self) -> Result<ModelSpec, Failure> {
        if let Some(path) = &self.model_file {
            let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            return serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())));
        }
        let leaf = |kind: &str| ModelSpec {
            kind: kind.to_string(),
            n: Some(self.n),
            phi: None,
            potential: self.potential.clone(),
            base: None,
            jl: None,
        };
        Ok(match self.model.as_str() {
            "conformal" => {
                let base = if self.potential.is_some() { leaf("rigid") } else { leaf("heisenberg") };
                ModelSpec {
                    kind: "conformal".into(),
                    n: Some(self.n),
                    phi: Some(
                        self.phi
                            .clone()
                            .ok_or_else(|| Failure::Config("--model conformal needs --phi".into()))?,
                    ),
                    potential: None,
                    base: Some(Box::new(base)),
                    jl: None,
                }
            }
            kind => leaf(kind),
        })
    }

    /// Field for evaluations: `--field`, else `--phi` unless it is the conformal factor.
    fn field<'a>(&'a self, spec: &ModelSpec, field: &'a Option<String>) -> Option<&'a str> {
        field
            .as_deref()
            .or_else(|| (self.model_file.is_none() && spec.kind != "conformal").then_some(self.phi.as_deref()).flatten())
    }
}

fn build(spec: &ModelSpec) -> Result<Model, Failure> {
    Ok(spec.build()?)
}

fn emit(text: String, value: Value, json_out: bool, out: Option<&PathBuf>) -> Result<(), Failure> {
    let pretty = serde_json::to_string_pretty(&value).expect("JSON values serialize");
    if let Some(path) = out {
        fs::write(path, &pretty).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    }
    if json_out {
        println!("{pretty}");
    } else {
        print!("{text}");
    }
    Ok(())
}

fn evaluate(what: Quantity, args: &EvalArgs) -> Result<u8, Failure> {
    let spec = args.model.spec()?;
    let model = build(&spec)?;
    let n = model.n();
    let p = parse_point(args.point.as_deref(), n)?;
    let field = || -> Result<FieldExpr, Failure> {
        args.model
            .field(&spec, &args.field)
            .ok_or_else(|| Failure::Config("this evaluation needs --field".into()))
            .and_then(parse_field)
    };
    let mut text = format!("model  {}\npoint  {:?}\n", model.describe(), p);
    let value = match what {
        Quantity::Frame => {
            let d = frame_data_at(&model, &p)?;
            for a in 0..n {
                for b in 0..n {
                    text += &format!("h[{}][{}]  {}\n", a + 1, b + 1, fmt_c(d.levi[a][b]));
                }
            }
            for (a, z) in d.frame.iter().enumerate() {
                let comps: Vec<String> = z.iter().map(|v| fmt_c(*v)).collect();
                text += &format!("Z{}  [{}]\n", a + 1, comps.join(", "));
            }
            let reeb: Vec<String> = d.reeb.iter().map(|v| fmt_c(*v)).collect();
            text += &format!("T   [{}]\n", reeb.join(", "));
            json!({
                "model": spec,
                "point": p,
                "levi": mat(&d.levi),
                "frame": mat(&d.frame),
                "reeb": d.reeb.iter().copied().map(c).collect::<Vec<_>>(),
                "theta": d.theta.iter().copied().map(c).collect::<Vec<_>>(),
                "theta_hol": mat(&d.theta_hol),
                "christoffel_holo": d.christoffel_holo.iter().map(|m| mat(m)).collect::<Vec<_>>(),
                "christoffel_mixed": d.christoffel_mixed.iter().map(|m| mat(m)).collect::<Vec<_>>(),
                "christoffel_reeb": mat(&d.christoffel_reeb),
                "torsion": mat(&d.torsion),
            })
        }
        Quantity::Schwarzian => {
            let s = schwarzian_at(&model, &field()?, &p)?;
            for a in 0..n {
                for b in 0..n {
                    text += &format!("B[{}{}]     {}\n", a + 1, b + 1, fmt_c(s.b_holo[a][b]));
                }
            }
            for a in 0..n {
                for b in 0..n {
                    text += &format!("B[{}{}bar]  {}\n", a + 1, b + 1, fmt_c(s.b_mixed[a][b]));
                }
            }
            json!({
                "model": spec,
                "point": p,
                "frame": s.frame,
                "b_holo": mat(&s.b_holo),
                "b_mixed": mat(&s.b_mixed),
                "trace": c(s.trace),
            })
        }
        Quantity::Curvature => {
            let cv = curvature_at(&model, &p)?;
            text += &format!("scalar       {:.12}\n", cv.scalar);
            for a in 0..n {
                for b in 0..n {
                    text += &format!("ricci[{}{}bar]  {}\n", a + 1, b + 1, fmt_c(cv.ricci[a][b]));
                }
            }
            text += &format!("chern-moser  {:.6e}\n", cv.chern_moser_norm());
            match cv.eta {
                Some(eta) => text += &format!("eta          {eta:.12}\n"),
                None => text += &format!("eta          none (fit residual {:.3e})\n", cv.fit.residual),
            }
            json!({
                "model": spec,
                "point": p,
                "scalar": cv.scalar,
                "ricci": mat(&cv.ricci),
                "schouten": mat(&cv.schouten),
                "chern_moser_max": cv.chern_moser_norm(),
                "eta": cv.eta,
                "fit_coefficient": cv.fit.coefficient,
                "fit_residual": cv.fit.residual,
            })
        }
        Quantity::Operators => {
            let o = operators_at(&model, &field()?, &p)?;
            text += &format!("sublaplacian  {}\n", fmt_c(o.sublaplacian));
            text += &format!("kohn          {}\n", fmt_c(o.kohn));
            text += &format!("reeb          {}\n", fmt_c(o.reeb));
            text += &format!("dbar-norm2    {}\n", fmt_c(o.dbar_norm2));
            for (a, v) in o.graham_lee.iter().enumerate() {
                text += &format!("P[{}]          {}\n", a + 1, fmt_c(*v));
            }
            json!({
                "model": spec,
                "point": p,
                "sublaplacian": c(o.sublaplacian),
                "kohn": c(o.kohn),
                "reeb": c(o.reeb),
                "dbar_norm2": c(o.dbar_norm2),
                "graham_lee": o.graham_lee.iter().copied().map(c).collect::<Vec<_>>(),
            })
        }
    };
    emit(text, value, args.json, args.out.as_ref())?;
    Ok(0)
}

fn print_report(r: &Report) {
    println!("suite {}  model {}  seed {}  samples {}", r.suite, r.model.kind, r.seed, r.samples);
    for ch in &r.checks {
        let status = match (ch.pass, ch.asserted) {
            (true, _) => "pass",
            (false, true) => "FAIL",
            (false, false) => "fail (not asserted)",
        };
        println!("  {:30} {:>12.3e}  tol {:>8.1e}  {}", ch.name, ch.max_residual, ch.tolerance, status);
    }
    println!("{} ms", r.wall_ms);
}

#[allow(clippy::too_many_arguments)]
fn verify(
    model: &ModelArgs,
    suite: &str,
    seed: u64,
    samples: usize,
    tol: &[String],
    config: Option<&PathBuf>,
    out: Option<&PathBuf>,
    json_out: bool,
) -> Result<u8, Failure> {
    let mut cfg = match config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<SuiteConfig>(&text)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        }
        None => {
            let mut tolerances = BTreeMap::new();
            for t in tol {
                let (name, value) = t
                    .split_once('=')
                    .ok_or_else(|| Failure::Config(format!("tolerance `{t}` is not name=value")))?;
                let value: f64 = value
                    .parse()
                    .map_err(|e| Failure::Config(format!("tolerance `{t}`: {e}")))?;
                tolerances.insert(name.to_string(), value);
            }
            SuiteConfig {
                model: model.spec()?,
                suite: SuiteSelection::Name(suite.to_string()),
                samples,
                seed,
                tolerances,
                out: None,
            }
        }
    };
    if let Some(path) = out {
        cfg.out = Some(path.display().to_string());
    }
    let report = run_suite(&cfg)?;
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Some(path) = &cfg.out {
        fs::write(path, &text).map_err(|e| Failure::Config(format!("{path}: {e}")))?;
    }
    if json_out {
        println!("{text}");
    } else {
        print_report(&report);
    }
    Ok(if report.passed() { 0 } else { EXIT_CHECK_FAILED })
}

fn witness(n: usize, point: Option<&str>, omega: &str) -> Result<u8, Failure> {
    let pairs: Vec<[f64; 2]> =
        serde_json::from_str(omega).map_err(|e| Failure::Config(format!("bad omega `{omega}`: {e}")))?;
    let omega: Vec<Complex64> = pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect();
    let p = parse_point(point, n)?;
    let params = integrability_witness(n, &p, &omega)?;
    let residual = witness_residual(n, &p, &omega)?;
    println!("{}", serde_json::to_string(&params).expect("params serialize"));
    println!("gradient match residual {residual:.3e}");
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match &cli.command {
        Commands::Evaluate { what, eval } => evaluate(*what, eval),
        Commands::Schwarzian { eval } => evaluate(Quantity::Schwarzian, eval),
        Commands::Verify {
            model,
            suite,
            seed,
            samples,
            tol,
            config,
            out,
            json,
        } => verify(model, suite, *seed, *samples, tol, config.as_ref(), out.as_ref(), *json),
        Commands::Witness { n, point, omega } => witness(*n, point.as_deref(), omega),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
