//! Command-line front end for the tropical critical point solver.
//!
//! Subcommands: `crit`, `trop`, `toric`, `delzant`, `mutate`, `selfcheck`.
//! Instances are JSON files (see the README for the schema); reports are
//! emitted as plain text or machine-readable JSON. Exit codes: 0 on success,
//! 1 on parse errors, 2 when an instance is rejected (not complete, empty or
//! unbounded polytope, non-Laurent pullback), 3 on solver or tolerance
//! failures.

mod instance;
mod report;
mod selfcheck;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tropcrit::apps::{check_mutation_invariance, delzant_analyze, mutate_pullback, toric_analyze};
use tropcrit::lift::{check_nondegenerate, solve_critical_with};
use tropcrit::ratgeom::rat_int;
use tropcrit::tropical::{
    check_coeff_conditions, check_tropical_critical, polytope_membership, trop_eval, trop_max,
};
use tropcrit::{Error, ExtRat, Rat, SolveOptions};

use instance::{InstanceFile, Options};
use report::{CertificatesSection, MembershipAnswer, NondegOut, Report};

#[derive(Parser)]
#[command(name = "tropcrit", version, about = "Tropical and positive critical points of complete Laurent polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Truncation order for series solves, as a rational like "3" or "7/2".
    #[arg(long)]
    order: Option<String>,
    /// Floating tolerance for projections and memberships.
    #[arg(long)]
    tol: Option<f64>,
    /// Process instance files in up to this many threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Re-run all self-check assertions and embed pass/fail in the report.
    #[arg(long)]
    certify: bool,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for sampled certificates.
    #[arg(long)]
    seed: Option<u64>,
    /// Instance files.
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the positive critical point and its series expansion.
    Crit(CommonArgs),
    /// Tropical data only: tau, d_crit, and membership answers.
    Trop(CommonArgs),
    /// Analyze a torus-invariant divisor on a complete fan.
    Toric(CommonArgs),
    /// Canonical fiber point of a facet-presented moment polytope.
    Delzant(CommonArgs),
    /// Pull back through an exchange and verify invariance.
    Mutate(CommonArgs),
    /// Run the built-in worked examples and invariant suite.
    Selfcheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("TROPCRIT_LOG")).init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Crit(args) => run_files("crit", &args),
        Command::Trop(args) => run_files("trop", &args),
        Command::Toric(args) => run_files("toric", &args),
        Command::Delzant(args) => run_files("delzant", &args),
        Command::Mutate(args) => run_files("mutate", &args),
        Command::Selfcheck { seed } => selfcheck::run(seed),
    };
    ExitCode::from(code)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotComplete(_)
        | Error::NonPrimitiveRay { .. }
        | Error::EmptyPolytope
        | Error::Unbounded
        | Error::NotLaurent(_)
        | Error::NotPositive => 2,
        Error::MaxIterExceeded { .. }
        | Error::StalledProgress { .. }
        | Error::InvariantViolation(_) => 3,
        _ => 1,
    }
}

fn run_files(command: &str, args: &CommonArgs) -> u8 {
    let jobs = args.jobs.max(1);
    let outcomes: Vec<(String, Result<String, (u8, String)>)> = if jobs == 1 || args.files.len() <= 1
    {
        args.files
            .iter()
            .map(|f| (f.display().to_string(), run_one(command, f, args)))
            .collect()
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = args
                .files
                .iter()
                .map(|f| {
                    let name = f.display().to_string();
                    let handle = scope.spawn(move || run_one(command, f, args));
                    (name, handle)
                })
                .collect();
            handles
                .into_iter()
                .map(|(name, h)| (name, h.join().expect("worker panicked")))
                .collect()
        })
    };

    let mut code = 0u8;
    for (name, outcome) in outcomes {
        match outcome {
            Ok(text) => {
                print!("{}", text);
                if !text.ends_with('\n') {
                    println!();
                }
            }
            Err((c, msg)) => {
                eprintln!("{name}: {msg}");
                if code == 0 {
                    code = c;
                }
            }
        }
    }
    code
}

fn parse_order(args: &CommonArgs, options: &Options) -> Result<Rat, (u8, String)> {
    if let Some(text) = &args.order {
        return text
            .parse::<Rat>()
            .map_err(|e| (1, format!("bad --order {text:?}: {e}")));
    }
    if let Some(o) = &options.order {
        return Ok(o.0.clone());
    }
    Ok(rat_int(3))
}

fn solver_options(args: &CommonArgs, options: &Options) -> Result<SolveOptions, (u8, String)> {
    let mut opts = SolveOptions::with_order(parse_order(args, options)?);
    if let Some(tol) = args.tol.or(options.tol) {
        opts.tol = tol;
    }
    opts.seed = args.seed.or(options.seed).unwrap_or(0);
    Ok(opts)
}

fn run_one(command: &str, path: &PathBuf, args: &CommonArgs) -> Result<String, (u8, String)> {
    let text = std::fs::read_to_string(path).map_err(|e| (1u8, format!("cannot read: {e}")))?;
    let inst: InstanceFile =
        serde_json::from_str(&text).map_err(|e| (1u8, format!("parse error: {e}")))?;
    let opts = solver_options(args, inst.options())?;
    let solver_err = |e: Error| (exit_code(&e), e.to_string());

    let mut report = Report::new(command, opts.seed, inst.clone());
    match (command, &inst) {
        ("crit", InstanceFile::Laurent { payload, .. }) => {
            let w = payload.to_poly().map_err(solver_err)?;
            let res = solve_critical_with(&w, &opts).map_err(solver_err)?;
            report.fill_crit(&w, &res);
            if args.certify {
                certify(&mut report, &w, &res, &opts).map_err(solver_err)?;
            }
        }
        ("trop", InstanceFile::Laurent { payload, options }) => {
            let w = payload.to_poly().map_err(solver_err)?;
            let tau = trop_max(&w).map_err(solver_err)?;
            let cp = tropcrit::canonical_point(&w).map_err(solver_err)?;
            let membership = options
                .membership_queries
                .iter()
                .map(|q| {
                    let point: Vec<Rat> = q.iter().map(|x| x.0.clone()).collect();
                    if point.len() != w.dim() {
                        return Err((1u8, "membership query has wrong dimension".to_string()));
                    }
                    let value = trop_eval(&w, &point);
                    Ok(MembershipAnswer {
                        point: q.iter().map(|x| x.0.to_string()).collect(),
                        value: value.to_string(),
                        member: polytope_membership(&w, &point),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let ld = tropcrit::tropical::level_data(&w, &cp.d_crit);
            report.tropical = Some(report::TropicalSection {
                tau: tau.to_string(),
                d_crit: cp.d_crit.iter().map(|x| x.to_string()).collect(),
                levels: ld.levels.iter().map(|x| x.to_string()).collect(),
                stages: cp.stages.iter().map(report::StageOut::new).collect(),
                membership: (!membership.is_empty()).then_some(membership),
            });
        }
        ("toric", InstanceFile::Toric { .. }) => {
            let toric = inst.to_toric().expect("kind checked");
            let rep = toric_analyze(&toric).map_err(solver_err)?;
            report.fill_toric(&rep);
        }
        ("delzant", InstanceFile::Delzant { .. }) => {
            let delzant = inst.to_delzant().expect("kind checked");
            let rep = delzant_analyze(&delzant, &opts).map_err(solver_err)?;
            let w = tropcrit::apps::polytope_potential(&delzant).map_err(solver_err)?;
            report.fill_delzant(&w, &rep);
        }
        ("mutate", InstanceFile::Mutation { w, mutation, .. }) => {
            let poly = w.to_poly().map_err(solver_err)?;
            let mu = mutation.to_mutation().map_err(|m| (1u8, m))?;
            let pullback = mutate_pullback(&poly, &mu).map_err(solver_err)?;
            let rep = check_mutation_invariance(&poly, &mu, &opts).map_err(solver_err)?;
            report.fill_mutation(&rep, &pullback);
        }
        (cmd, other) => {
            return Err((
                1,
                format!("subcommand {cmd:?} does not accept kind {:?}", other.kind()),
            ));
        }
    }

    Ok(match args.format {
        Format::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
        Format::Text => report.to_text(),
    })
}

/// Re-run the assertion battery on a solved instance and embed the results.
fn certify(
    report: &mut Report,
    w: &tropcrit::LaurentPoly,
    res: &tropcrit::CritResult,
    opts: &SolveOptions,
) -> tropcrit::Result<()> {
    let tau = trop_max(w)?;
    let trop_max_equal = trop_eval(w, &res.d_crit) == tau;
    let tropical_critical = check_tropical_critical(w, &res.d_crit).passed;
    let coeff_conditions = check_coeff_conditions(w, &res.d_crit, &res.d_coeff, opts.tol);
    let residual_meets_order = match &res.residual_valuation {
        ExtRat::Infinite => true,
        ExtRat::Finite(v) => *v >= &tau + &res.achieved_order,
    };
    let nondeg = check_nondegenerate(w, res, opts.nondeg_samples, opts.seed)?;
    let cert = report.certificates.get_or_insert_with(|| CertificatesSection {
        residual_valuation: res.residual_valuation.to_string(),
        unverified: vec!["stronger nondegeneracy beyond positive leading Hessian coefficients"],
        trop_max_equal: None,
        tropical_critical: None,
        coeff_conditions: None,
        residual_meets_order: None,
        nondegenerate: None,
    });
    cert.trop_max_equal = Some(trop_max_equal);
    cert.tropical_critical = Some(tropical_critical);
    cert.coeff_conditions = Some(coeff_conditions);
    cert.residual_meets_order = Some(residual_meets_order);
    cert.nondegenerate = Some(NondegOut::new(&nondeg));
    Ok(())
}

