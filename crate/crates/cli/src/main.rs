mod args;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bvsum_core::error::to_integer;
use bvsum_core::euler_maclaurin::{
    classify_convergence, em_finite_sum, em_midvalue_check, euler_constant, parts_check, series_sum,
    variation_report, Convergence, IdentityCheck,
};
use bvsum_core::spec_file::{self, FileError, SpecFileError};
use bvsum_core::{BvFunction, Error, Interval};
use clap::Parser;
use rayon::prelude::*;

use args::{Check, Cli, Command, ConvergenceArgs, SeriesArgs, SumArgs, VariationArgs, VerifyArgs};
use report::{Num, Report};

/// Exit codes.
mod exit {
    pub const USAGE: u8 = 1;
    pub const VALIDATION: u8 = 2;
    pub const DOMAIN: u8 = 3;
    pub const TOLERANCE: u8 = 4;
    pub const DIVERGENT: u8 = 5;
    pub const MISSING_ANTIDERIVATIVE: u8 = 6;
    pub const IDENTITY: u8 = 7;
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

fn code_of(e: &Error) -> u8 {
    match e {
        Error::Invalid(_) | Error::BadAntiderivative { .. } => exit::VALIDATION,
        Error::Domain { .. }
        | Error::ExteriorLimitRequired { .. }
        | Error::NotMonotone { .. }
        | Error::NotHalfLine
        | Error::Eval(_) => exit::DOMAIN,
        Error::ToleranceUnreachable { .. } => exit::TOLERANCE,
        Error::SeriesDivergent => exit::DIVERGENT,
        Error::MissingAntiderivative => exit::MISSING_ANTIDERIVATIVE,
        Error::NonIntegerBounds { .. } | Error::InvalidRange { .. } => exit::USAGE,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::new(code_of(&e), e.to_string())
    }
}

type Outcome = Result<Vec<Report>, Failure>;

fn load(path: &Path) -> Result<BvFunction, Failure> {
    spec_file::load(path).map_err(|e| {
        let code = match &e {
            SpecFileError::Invalid(inner) => code_of(inner),
            _ => exit::VALIDATION,
        };
        Failure::new(code, FileError { path, error: &e }.to_string())
    })
}

fn path_field(p: &Path) -> String {
    p.display().to_string()
}

fn variation(args: &VariationArgs) -> Outcome {
    let f = load(&args.spec)?;
    let (lo, hi) = (args.lo, args.hi);
    if !(lo < hi) {
        return Err(Error::InvalidRange { lo, hi }.into());
    }
    let iv = Interval::new(lo, hi, !args.open_lo, !args.open_hi);
    let pv = f.pointwise_variation(iv)?;
    let vr = variation_report(&f, lo, hi)?;
    let (lo_term, hi_term) = f.endpoint_terms(iv)?;
    let open_check = vr.open_identity();
    let endpoint_residual = (pv - vr.pointwise_variation - lo_term - hi_term).abs();

    let mut r = Report::new("variation");
    r.inputs
        .push("spec", path_field(&args.spec))
        .push("lo", lo)
        .push("hi", hi)
        .push("interval", iv.to_string());
    r.enclosure(pv, 0.0);
    r.residual = Some(Num(open_check.residual.max(endpoint_residual)));
    r.details
        .push("pointwise_variation", pv)
        .push("open_variation", vr.pointwise_variation)
        .push("total_variation_measure", vr.total_variation_measure)
        .push("rho_sum", vr.rho_sum)
        .push("endpoint_lo", lo_term)
        .push("endpoint_hi", hi_term)
        .push("identity_budget", open_check.budget)
        .push("identity_holds", open_check.passed() && endpoint_residual <= open_check.budget);
    if !(open_check.passed() && endpoint_residual <= open_check.budget) {
        return Err(Failure::new(
            exit::IDENTITY,
            format!(
                "variation identity violated: pV = {}, |mu_f| + sum rho = {}",
                vr.pointwise_variation,
                vr.total_variation_measure + vr.rho_sum
            ),
        ));
    }
    Ok(vec![r])
}

fn sum(args: &SumArgs) -> Outcome {
    let (a, b) = (to_integer(args.a)?, to_integer(args.b)?);
    if a >= b {
        return Err(Error::InvalidRange { lo: args.a, hi: args.b }.into());
    }
    let f = load(&args.spec)?;
    let em = em_finite_sum(&f, a, b, args.tol)?;
    let mut r = Report::new("sum");
    r.inputs
        .push("spec", path_field(&args.spec))
        .push("a", a)
        .push("b", b)
        .push("tol", args.tol);
    r.enclosure(em.approx.value, em.approx.radius)
        .bounds(em.remainder_bound, em.integral_term.radius);
    r.exact = em.exact_sum.map(Num);
    let monotone = f.monotone_direction_on(a as f64, b as f64)?.is_some();
    r.details
        .push("integral", em.integral_term.value)
        .push("boundary_term", em.boundary_term)
        .push(
            "remainder_source",
            if monotone {
                "|f(b) - f(a)| / 2 (monotone on [a, b])"
            } else {
                "pV(f, [a, b]) / 2"
            },
        );
    Ok(vec![r])
}

fn series_like(args: &SeriesArgs, gamma: bool) -> Outcome {
    let f = load(&args.spec)?;
    let mut out = Vec::new();
    for &n in &args.n {
        let n = to_integer(n)?;
        let tail_pv = f.pointwise_variation(Interval::closed(n as f64, f64::INFINITY))?;
        let mut r = Report::new(if gamma { "gamma" } else { "series" });
        r.inputs
            .push("spec", path_field(&args.spec))
            .push("n", n)
            .push("tol", args.tol);
        if gamma {
            let g = euler_constant(&f, n, args.tol)?;
            r.enclosure(g.gamma_estimate.value, g.gamma_estimate.radius)
                .bounds(g.remainder_bound, g.gamma_n.radius);
            r.details
                .push("gamma_n", g.gamma_n.value)
                .push("remainder_source", "pV(f, [n, inf)) / 2");
        } else {
            let c = series_sum(&f, n, args.tol)?;
            let remainder = 0.5 * tail_pv;
            r.enclosure(c.value, c.radius)
                .bounds(remainder, (c.radius - remainder).max(0.0));
            r.details.push("remainder_source", "pV(f, [n, inf)) / 2");
        }
        if let Some(o) = args.oracle {
            r.details.push("oracle", o).push("error", (r.value.unwrap().0 - o).abs());
        }
        out.push(r);
    }
    Ok(out)
}

fn convergence(args: &ConvergenceArgs) -> Outcome {
    let f = load(&args.spec)?;
    let c = classify_convergence(&f)?;
    let mut r = Report::new("convergence");
    r.inputs.push("spec", path_field(&args.spec));
    r.details.push(
        "classification",
        match c {
            Convergence::BothConverge => "both converge",
            Convergence::BothDiverge => "both diverge",
        },
    );
    if let Some(l) = f.tail().and_then(|t| t.antiderivative_limit()) {
        r.details.push("antiderivative_limit", l);
    }
    Ok(vec![r])
}

fn verify_one(args: &VerifyArgs, spec: &Path, spec2: Option<&Path>) -> Outcome {
    let f = load(spec)?;
    let check = args.check;
    let tol = args.tol.unwrap_or(match check {
        Check::Parts => args::DEFAULT_PARTS_TOL,
        _ => args::DEFAULT_TOL,
    });
    let mut r = Report::new("verify");
    r.inputs
        .push("spec", path_field(spec))
        .push("check", check.name())
        .push("a", args.a)
        .push("b", args.b)
        .push("tol", tol);
    let result: IdentityCheck = match check {
        Check::Midvalue => {
            let (a, b) = (to_integer(args.a)?, to_integer(args.b)?);
            em_midvalue_check(&f, a, b, tol)?
        }
        Check::Parts => {
            let g = match spec2 {
                Some(p) => {
                    r.inputs.push("spec2", path_field(p));
                    load(p)?
                }
                None => f.clone(),
            };
            parts_check(&f, &g, args.a, args.b, tol)?
        }
        Check::Pvv => variation_report(&f, args.a, args.b)?.open_identity(),
    };
    r.enclosure(result.lhs.value, result.lhs.radius);
    r.residual = Some(Num(result.residual));
    r.details
        .push("rhs", result.rhs.value)
        .push("rhs_radius", result.rhs.radius)
        .push("budget", result.budget)
        .push("passed", result.passed());
    Ok(vec![r])
}

fn identity_failure(r: &Report) -> Option<Failure> {
    let passed = r
        .details
        .0
        .iter()
        .any(|(k, v)| *k == "passed" && *v == report::Field::Bool(true));
    (!passed).then(|| {
        let spec = r.inputs.0.iter().find(|(k, _)| *k == "spec").map(|(_, v)| v.clone());
        let residual = r.residual.map(|n| n.0).unwrap_or(f64::NAN);
        Failure::new(
            exit::IDENTITY,
            format!("identity violated for {spec:?}: residual {residual} exceeds budget"),
        )
    })
}

fn verify(args: &VerifyArgs) -> (Vec<Report>, Vec<Failure>) {
    let specs: Vec<PathBuf> = match (&args.batch, &args.spec) {
        (Some(dir), _) => match batch_files(dir) {
            Ok(v) => v,
            Err(e) => return (Vec::new(), vec![e]),
        },
        (None, Some(s)) => vec![s.clone()],
        (None, None) => unreachable!("clap requires a spec or --batch"),
    };
    let results: Vec<Outcome> = specs
        .par_iter()
        .map(|s| verify_one(args, s, args.spec2.as_deref()))
        .collect();
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for res in results {
        match res {
            Ok(rs) => {
                for r in rs {
                    if let Some(fail) = identity_failure(&r) {
                        failures.push(fail);
                    }
                    reports.push(r);
                }
            }
            Err(e) => failures.push(e),
        }
    }
    (reports, failures)
}

fn batch_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| Failure::new(exit::VALIDATION, format!("cannot read {}: {e}", dir.display())))?;
    let mut out: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    out.sort();
    Ok(out)
}

fn print_reports(reports: &[Report], json: bool) {
    for (i, r) in reports.iter().enumerate() {
        if json {
            println!("{}", r.to_json());
        } else {
            if i > 0 {
                println!();
            }
            print!("{}", r.to_human());
        }
    }
}

fn print_csv(reports: &[Report]) {
    println!("n,estimate,radius,oracle,error");
    for r in reports {
        let get = |key: &str| -> String {
            r.details
                .0
                .iter()
                .chain(r.inputs.0.iter())
                .find(|(k, _)| *k == key)
                .map(|(_, v)| match v {
                    report::Field::Num(x) => format!("{x:.16e}"),
                    report::Field::Int(i) => i.to_string(),
                    other => format!("{other:?}"),
                })
                .unwrap_or_default()
        };
        println!(
            "{},{:.16e},{:.16e},{},{}",
            get("n"),
            r.value.map_or(f64::NAN, |v| v.0),
            r.radius.map_or(f64::NAN, |v| v.0),
            get("oracle"),
            get("error")
        );
    }
}

fn run(cli: &Cli) -> u8 {
    let (json, result) = match &cli.command {
        Command::Variation(a) => (a.output.json, variation(a)),
        Command::Sum(a) => (a.output.json, sum(a)),
        Command::Series(a) | Command::Gamma(a) => {
            let gamma = matches!(cli.command, Command::Gamma(_));
            match series_like(a, gamma) {
                Ok(reports) if a.csv => {
                    print_csv(&reports);
                    return 0;
                }
                other => (a.output.json, other),
            }
        }
        Command::Convergence(a) => (a.output.json, convergence(a)),
        Command::Verify(a) => {
            let (reports, failures) = verify(a);
            print_reports(&reports, a.output.json);
            for f in &failures {
                eprintln!("error: {}", f.message);
            }
            return failures
                .iter()
                .map(|f| f.code)
                .find(|&c| c == exit::IDENTITY)
                .or_else(|| failures.first().map(|f| f.code))
                .unwrap_or(0);
        }
    };
    match result {
        Ok(reports) => {
            print_reports(&reports, json);
            0
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(run(&cli))
}
