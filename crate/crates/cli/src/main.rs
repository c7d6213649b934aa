//! `casimir-moduli` command-line front end.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use casimir_moduli::invariants::{delta_sample, verify_chevalley, verify_lemma2, ChamberGrid};
use casimir_moduli::linalg::numerical_rank;
use casimir_moduli::moduli::{classify_pair, delta_prime_grid, su3_report, CasimirModel};
use casimir_moduli::poisson::{
    flow_csv, hamiltonian_flow, su2_period_check, verify_casimir, verify_jacobi, verify_lemma_b, Deformation,
    FunctionModel, DEFAULT_REFINEMENTS,
};
use casimir_moduli::report::{Check, SCHEMA_VERSION};
use casimir_moduli::sampling::{normal_vec, trial_rng};
use casimir_moduli::{Covector, Error, Family, LieAlgebraSpec, LieSystem, VerificationReport};

const THREADS_VAR: &str = "CASIMIR_MODULI_THREADS";

#[derive(Parser, Debug)]
#[command(name = "casimir-moduli", version, about = "Lie-Poisson spheres, their invariants and Casimir deformations")]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Config {
    /// Classical family.
    #[arg(long, global = true, value_enum, ignore_case = true, default_value = "A")]
    family: FamilyArg,
    #[arg(long, global = true, default_value_t = 2)]
    rank: usize,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Extra cap on the worst residual of every verification report.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Grid resolution for chamber samples, Δ' grids and chart checks.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[value(rename_all = "UPPER")]
enum FamilyArg {
    A,
    B,
    C,
    D,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::A => Family::A,
            FamilyArg::B => Family::B,
            FamilyArg::C => Family::C,
            FamilyArg::D => Family::D,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Algebra data.
    Algebra {
        #[command(subcommand)]
        what: AlgebraCmd,
    },
    /// Roots, simple roots and the Cartan matrix.
    Roots,
    /// Weyl group elements and outer automorphisms.
    Weyl,
    /// Invariant polynomials.
    Invariants {
        #[command(subcommand)]
        what: InvariantsCmd,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        deform: DeformArgs,
        /// Sample count (points, trials or triples depending on the suite).
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Integrate a Hamiltonian flow.
    Flow {
        /// `xK` for the K-th coordinate or `pK` for the K-th invariant (1-based).
        #[arg(long, default_value = "x1")]
        hamiltonian: String,
        /// Initial point as comma-separated coordinates; random if omitted.
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<String>,
        #[arg(long, default_value_t = 10.0)]
        time: f64,
        #[arg(long)]
        dt: Option<f64>,
        #[command(flatten)]
        deform: DeformArgs,
    },
    /// Decide whether two Casimir models differ by an outer automorphism.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        /// Treat both expressions as exponents.
        #[arg(long)]
        exp: bool,
    },
}

#[derive(Subcommand, Debug)]
enum AlgebraCmd {
    Info,
}

#[derive(Subcommand, Debug)]
enum InvariantsCmd {
    /// Evaluate `p` and `p'` at a point.
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<String>,
    },
    /// Sample `Δ` (cone over the chamber) or `Δ'` (unit sphere).
    SampleDelta {
        #[arg(long)]
        prime: bool,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct DeformArgs {
    /// Conformal factor as an expression in the `Δ'` coordinates x1, x2, ...
    #[arg(long, allow_hyphen_values = true)]
    deform: Option<String>,
    /// Use `exp` of the expression as the factor.
    #[arg(long)]
    exp: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Suite {
    Jacobi,
    Casimir,
    Chevalley,
    Lemma2,
    LemmaB,
    Su3,
    Su2Area,
    All,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_)
            | Error::Parse { .. }
            | Error::RankOutOfRange { .. }
            | Error::UnsupportedFamily(_)
            | Error::DimensionMismatch { .. } => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

struct Output {
    body: String,
    passed: bool,
}

fn envelope(cfg: &Config, sys: &LieSystem, command: &str, result: Value) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "command": command,
        "algebra": sys.name(),
        "seed": cfg.seed,
        "config": cfg,
        "result": result,
    })
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes")
}

fn csv_with_header(cfg: &Config, sys: &LieSystem, body: &str) -> String {
    format!("# schema={SCHEMA_VERSION} algebra={} seed={}\n{body}", sys.name(), cfg.seed)
}

fn require_json(cfg: &Config) -> Result<(), Failure> {
    if cfg.format == Format::Csv {
        return Err(Failure::Usage("csv output is only available for `invariants sample-delta` and `flow`".into()));
    }
    Ok(())
}

fn parse_point(sys: &LieSystem, src: Option<&str>, seed: u64) -> Result<Covector, Failure> {
    match src {
        None => Ok(Covector(normal_vec(&mut trial_rng(seed, 0), sys.dim()))),
        Some(s) => {
            let v: Vec<f64> = s
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|e| Failure::Usage(format!("bad coordinate `{t}`: {e}"))))
                .collect::<Result<_, _>>()?;
            if v.len() != sys.dim() {
                return Err(Failure::Usage(format!("point has {} coordinates, {} needs {}", v.len(), sys.name(), sys.dim())));
            }
            Ok(Covector(v))
        }
    }
}

fn model_of(src: &str, exp: bool) -> Result<CasimirModel, Failure> {
    let mut m = CasimirModel::expression(src)?;
    m.exp_flag = exp;
    Ok(m)
}

fn deformation(args: &DeformArgs) -> Result<Option<Deformation>, Failure> {
    args.deform.as_deref().map(|s| Ok(Deformation::casimir(model_of(s, args.exp)?))).transpose()
}

/// Factor used when a suite needs a deformation and none was given.
fn default_model(sys: &LieSystem) -> CasimirModel {
    if sys.rank() == 1 {
        CasimirModel::expression("1").expect("constant parses")
    } else {
        let mut m = CasimirModel::expression("x1/4").expect("linear term parses");
        m.exp_flag = true;
        m
    }
}

fn apply_tol(cfg: &Config, mut report: VerificationReport) -> VerificationReport {
    if let Some(tol) = cfg.tol {
        report.push(Check::below("cli_tolerance", report.max_residual, tol));
    }
    report
}

fn run_suite(cfg: &Config, sys: &LieSystem, suite: Suite, deform: &DeformArgs, samples: Option<usize>) -> Result<Vec<VerificationReport>, Failure> {
    let seed = cfg.seed;
    let mut reports = Vec::new();
    match suite {
        Suite::Jacobi => {
            let def = deformation(deform)?;
            reports.push(verify_jacobi(sys, def.as_ref(), samples.unwrap_or(20), seed)?);
        }
        Suite::Casimir => {
            let n = samples.unwrap_or(200);
            for i in 0..sys.rank() {
                let mut r = verify_casimir(sys, &FunctionModel::invariant(i), n, seed)?;
                r.suite = format!("casimir[p{}]", i + 1);
                reports.push(r);
            }
            if let Some(src) = &deform.deform {
                let m = FunctionModel::casimir(model_of(src, deform.exp)?);
                let mut r = verify_casimir(sys, &m, n, seed)?;
                r.suite = format!("casimir[{src}]");
                reports.push(r);
            }
        }
        Suite::Chevalley => reports.push(verify_chevalley(sys, samples.unwrap_or(1000), seed)?),
        Suite::Lemma2 => {
            let mut r = verify_lemma2(sys, cfg.grid.unwrap_or(50))?;
            r.seed = Some(seed);
            reports.push(r);
        }
        Suite::LemmaB => {
            let m = match &deform.deform {
                Some(src) => model_of(src, deform.exp)?,
                None => default_model(sys),
            };
            reports.push(verify_lemma_b(sys, &m, samples.unwrap_or(500), seed)?);
        }
        Suite::Su3 => reports.push(su3_report(sys, seed)?),
        Suite::Su2Area => {
            let k = cfg.grid.unwrap_or(DEFAULT_REFINEMENTS);
            for r in [0.5, 1.0, 2.0] {
                let mut rep = su2_period_check(sys, r, k)?.to_report();
                rep.seed = Some(seed);
                reports.push(rep);
            }
        }
        Suite::All => {
            let def = match deformation(deform)? {
                Some(d) => d,
                None => Deformation::casimir(default_model(sys)),
            };
            reports.push(verify_jacobi(sys, None, samples.unwrap_or(20), seed)?);
            let mut deformed = verify_jacobi(sys, Some(&def), samples.unwrap_or(20), seed)?;
            deformed.suite = "jacobi[deformed]".into();
            reports.push(deformed);
            reports.extend(run_suite(cfg, sys, Suite::Casimir, deform, samples)?);
            reports.extend(run_suite(cfg, sys, Suite::Chevalley, deform, samples)?);
            reports.extend(run_suite(cfg, sys, Suite::Lemma2, deform, samples)?);
            reports.extend(run_suite(cfg, sys, Suite::LemmaB, deform, samples)?);
            if sys.alg.family() == Family::A && sys.rank() == 2 {
                reports.extend(run_suite(cfg, sys, Suite::Su3, deform, samples)?);
            }
            if sys.alg.family() == Family::A && sys.rank() == 1 {
                reports.extend(run_suite(cfg, sys, Suite::Su2Area, deform, samples)?);
            }
            return Ok(reports);
        }
    }
    Ok(reports.into_iter().map(|r| apply_tol(cfg, r)).collect())
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Jacobi => "jacobi",
        Suite::Casimir => "casimir",
        Suite::Chevalley => "chevalley",
        Suite::Lemma2 => "lemma2",
        Suite::LemmaB => "lemma-b",
        Suite::Su3 => "su3",
        Suite::Su2Area => "su2-area",
        Suite::All => "all",
    }
}

fn parse_hamiltonian(sys: &LieSystem, s: &str) -> Result<FunctionModel, Failure> {
    let bad = || Failure::Usage(format!("hamiltonian `{s}` must be xK (1..={}) or pK (1..={})", sys.dim(), sys.rank()));
    let (kind, rest) = s.split_at(s.char_indices().nth(1).map_or(s.len(), |(i, _)| i));
    let k: usize = rest.parse().map_err(|_| bad())?;
    match kind {
        "x" if (1..=sys.dim()).contains(&k) => Ok(FunctionModel::coordinate(k - 1)),
        "p" if (1..=sys.rank()).contains(&k) => Ok(FunctionModel::invariant(k - 1)),
        _ => Err(bad()),
    }
}

fn weyl_json(sys: &LieSystem) -> Value {
    let elements: Vec<Value> = sys
        .weyl
        .elements
        .iter()
        .map(|w| {
            let m: Vec<Vec<f64>> = (0..w.matrix.nrows()).map(|i| w.matrix.row(i).iter().cloned().collect()).collect();
            json!({ "word": w.word, "matrix": m })
        })
        .collect();
    json!({
        "order": sys.weyl.order(),
        "elements": elements,
        "outer": {
            "order": sys.outer.order(),
            "elements": sys.outer.elements,
        },
    })
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let cfg = &cli.config;
    if let Some(t) = cfg.tol {
        if !(t > 0.0) {
            return Err(Failure::Usage(format!("--tol must be positive, got {t}")));
        }
    }
    if cfg.grid == Some(0) {
        return Err(Failure::Usage("--grid must be positive".into()));
    }
    let spec = LieAlgebraSpec::new(cfg.family.into(), cfg.rank)?;
    let sys = LieSystem::build(&spec)?;
    let ok = |body: String| Ok(Output { body, passed: true });

    match &cli.command {
        Command::Algebra { what: AlgebraCmd::Info } => {
            require_json(cfg)?;
            let alg = &sys.alg;
            let info = json!({
                "name": sys.name(),
                "simple": spec.is_simple(),
                "dim": sys.dim(),
                "rank": sys.rank(),
                "matrix_size": alg.matrix_size,
                "residuals": {
                    "antisymmetry": alg.antisymmetry_residual(),
                    "jacobi": alg.jacobi_residual(),
                    "invariance": alg.invariance_residual(),
                    "orthonormality": alg.orthonormality_residual(),
                },
                "descriptor": alg.descriptor(),
            });
            ok(pretty(&envelope(cfg, &sys, "algebra info", info)))
        }
        Command::Roots => {
            require_json(cfg)?;
            ok(pretty(&envelope(cfg, &sys, "roots", json!(sys.roots))))
        }
        Command::Weyl => {
            require_json(cfg)?;
            ok(pretty(&envelope(cfg, &sys, "weyl", weyl_json(&sys))))
        }
        Command::Invariants { what: InvariantsCmd::Eval { xi } } => {
            require_json(cfg)?;
            let xi = parse_point(&sys, xi.as_deref(), cfg.seed)?;
            let p = sys.invariants.eval_p(&xi)?;
            let pi = casimir_moduli::cartan::poisson_matrix(&sys.alg, &xi);
            let result = json!({
                "point": xi,
                "degrees": sys.invariants.degrees(),
                "scales": sys.invariants.scales(),
                "p": p,
                "p_prime": p[1..].to_vec(),
                "leaf_dimension": numerical_rank(&pi, spec.tolerances.rank),
            });
            ok(pretty(&envelope(cfg, &sys, "invariants eval", result)))
        }
        Command::Invariants { what: InvariantsCmd::SampleDelta { prime } } => {
            let res = cfg.grid.unwrap_or(101);
            let grid = if *prime { ChamberGrid::sphere(res) } else { ChamberGrid::cone(res, res, 2.0) };
            let cloud = delta_sample(&sys, &grid)?;
            match cfg.format {
                Format::Csv => ok(csv_with_header(cfg, &sys, &cloud.to_csv())),
                Format::Json => ok(pretty(&envelope(cfg, &sys, "invariants sample-delta", json!(cloud)))),
            }
        }
        Command::Verify { suite, deform, samples } => {
            require_json(cfg)?;
            let reports = run_suite(cfg, &sys, *suite, deform, *samples)?;
            let passed = reports.iter().all(|r| r.passed);
            let body = json!({
                "schema": SCHEMA_VERSION,
                "suite": suite_name(*suite),
                "algebra": sys.name(),
                "seed": cfg.seed,
                "passed": passed,
                "reports": reports,
            });
            Ok(Output { body: pretty(&body), passed })
        }
        Command::Flow { hamiltonian, xi, time, dt, deform } => {
            let f = parse_hamiltonian(&sys, hamiltonian)?;
            let xi0 = parse_point(&sys, xi.as_deref(), cfg.seed)?;
            let def = deformation(deform)?;
            let states = hamiltonian_flow(&sys, &f, &xi0, *time, *dt, def.as_ref())?;
            match cfg.format {
                Format::Csv => ok(csv_with_header(cfg, &sys, &flow_csv(&states))),
                Format::Json => ok(pretty(&envelope(cfg, &sys, "flow", json!({ "hamiltonian": hamiltonian, "states": states })))),
            }
        }
        Command::Classify { f, g, exp } => {
            require_json(cfg)?;
            let (fm, gm) = (model_of(f, *exp)?, model_of(g, *exp)?);
            let grid = delta_prime_grid(&sys, cfg.grid.unwrap_or(401))?;
            let report = classify_pair(&fm, &gm, &sys.outer, &grid)?;
            let verdict = if report.equivalent {
                format!("equivalent via {}", report.witness_label)
            } else {
                "not equivalent".to_string()
            };
            let result = json!({ "f": f, "g": g, "exp": exp, "verdict": verdict, "report": report });
            ok(pretty(&envelope(cfg, &sys, "classify", result)))
        }
    }
}

fn init_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::Usage(format!("{THREADS_VAR} must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Runtime(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|_| run(&cli));
    match result {
        Ok(out) => {
            let mut body = out.body;
            if !body.ends_with('\n') {
                body.push('\n');
            }
            match &cli.config.out {
                Some(path) => {
                    if let Err(e) = fs::write(path, body) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => print!("{body}"),
            }
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nRun `casimir-moduli --help` for usage.");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
