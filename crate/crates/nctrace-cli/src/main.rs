//! Command-line driver: expression calculator, operator playground, matrix
//! evaluation checks, ensemble sampler, semigroup / pseudo-inverse
//! evaluation, transport experiments, and the acceptance suite.

mod dto;

use clap::{Parser, Subcommand};
use nctrace::algebra::{parse, Declaration, OperatorField};
use nctrace::calculus::{
    cyclic_gradient, gibbs_laplacian, laplacian, lie_bracket, log_det_series, partial_derivative,
    weighted_divergence, Potential,
};
use nctrace::gibbs::{sample_gibbs, spectral_support_check};
use nctrace::matrix::{
    classical_laplacian, evaluate_scalar, magic_formula_check, HermTuple,
    LaplacianMode,
};
use nctrace::semigroup::{
    psi_base, psi_mc, psi_perturbative, scha_curvature, semigroup_exact, semigroup_mc,
    DegreeBasis,
};
use nctrace::NcError;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "nctrace", about = "trace-polynomial calculus and matrix ensemble experiments")]
struct Cli {
    /// Base seed for all randomized subcommands.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Output directory for report files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (0 = logical cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Multiplies every statistical tolerance in `verify`.
    #[arg(long, global = true, default_value_t = 1.0)]
    tol_scale: f64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse, canonicalize and print an expression.
    Calc {
        expr: String,
        /// Number of primary variables.
        #[arg(long, default_value_t = 1)]
        d: usize,
    },
    /// Apply a differential operator to an expression.
    Diff {
        /// One of: partial, grad, laplacian, laplacian-v, div-v, bracket, logdet.
        #[arg(long)]
        op: String,
        /// Operand expression(s); fields take one expression per component.
        exprs: Vec<String>,
        #[arg(long, default_value_t = 1)]
        d: usize,
        /// Variable index for `partial`.
        #[arg(long, default_value_t = 1)]
        var: usize,
        /// Potential expression for the weighted operators (defaults to the
        /// quadratic base).
        #[arg(long)]
        potential: Option<String>,
        /// Series truncation for `logdet`.
        #[arg(long, default_value_t = 40)]
        trunc: usize,
    },
    /// Evaluate an expression on a random Hermitian tuple, or run the
    /// finite-N checks.
    Eval {
        expr: Option<String>,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 32)]
        n: usize,
        /// Optional check: fd | magic | lap-sweep.
        #[arg(long)]
        check: Option<String>,
        /// Matrix sizes for `lap-sweep`.
        #[arg(long, default_value = "8,16,32")]
        sizes: String,
    },
    /// Run the MALA sampler from a JSON config and write the moment table.
    Sample {
        /// JSON config path (see the documentation for the schema).
        #[arg(long)]
        config: PathBuf,
    },
    /// Apply the heat semigroup to an expression.
    Semigroup {
        expr: String,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long)]
        t: f64,
        /// exact | mc
        #[arg(long, default_value = "exact")]
        backend: String,
        #[arg(long, default_value_t = 8)]
        basis_depth: usize,
        /// Potential for the mc backend (defaults to the quadratic base).
        #[arg(long)]
        potential: Option<String>,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        paths: usize,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
    },
    /// Apply the pseudo-inverse of the Gibbs generator.
    Psi {
        expr: String,
        #[arg(long, default_value_t = 1)]
        d: usize,
        /// exact | perturbative | mc
        #[arg(long, default_value = "exact")]
        backend: String,
        #[arg(long)]
        potential: Option<String>,
        /// Neumann iterations for the perturbative backend.
        #[arg(long, default_value_t = 2)]
        iterations: usize,
        #[arg(long, default_value_t = 12)]
        cutoff: usize,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 150)]
        paths: usize,
        #[arg(long, default_value_t = 6.0)]
        t_max: f64,
    },
    /// Run a transport experiment from a JSON plan.
    Transport {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the acceptance suite and print one line per criterion.
    Verify {
        /// all | exact | 1,4,7-style list
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

fn main() {
    let cli = Cli::parse();
    if cli.threads > 0 {
        nctrace::parallel::configure_threads(cli.threads);
    }
    match dispatch(&cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            let kind = match &e {
                NcError::Parse { .. }
                | NcError::Config(_)
                | NcError::DeclMismatch(_)
                | NcError::UndeclaredVariable(_)
                | NcError::Dimension(_)
                | NcError::Grading(_)
                | NcError::DegreeOverflow { .. }
                | NcError::SlotCollision(_)
                | NcError::NotScalar(_) => ("config", 2),
                NcError::Numerical(_)
                | NcError::Divergence(_)
                | NcError::InverseCheck(_)
                | NcError::Io(_) => ("numerical", 3),
            };
            eprintln!(
                "{}",
                serde_json::json!({"error": e.to_string(), "kind": kind.0})
            );
            std::process::exit(kind.1);
        }
    }
}

fn potential_from(text: &Option<String>, d: usize) -> Result<Potential, NcError> {
    match text {
        None => Potential::quadratic_base(d),
        Some(s) => Potential::new(parse(s, &Declaration::scalar(d))?),
    }
}

fn dispatch(cli: &Cli) -> Result<i32, NcError> {
    match &cli.cmd {
        Cmd::Calc { expr, d } => {
            let p = parse(expr, &Declaration::scalar(*d))?;
            println!("{p}");
            Ok(0)
        }
        Cmd::Diff { op, exprs, d, var, potential, trunc } => {
            let decl = Declaration::scalar(*d);
            let need = |k: usize| -> Result<(), NcError> {
                if exprs.len() < k {
                    Err(NcError::Config(format!("operator {op} needs {k} expression(s)")))
                } else {
                    Ok(())
                }
            };
            match op.as_str() {
                "partial" => {
                    need(1)?;
                    let f = parse(&exprs[0], &decl)?;
                    let (df, _) = partial_derivative(&f, *var)?;
                    println!("{df}");
                }
                "grad" => {
                    need(1)?;
                    let g = cyclic_gradient(&parse(&exprs[0], &decl)?)?;
                    for (j, c) in g.components().iter().enumerate() {
                        println!("component {}: {c}", j + 1);
                    }
                }
                "laplacian" => {
                    need(1)?;
                    println!("{}", laplacian(&parse(&exprs[0], &decl)?)?);
                }
                "laplacian-v" => {
                    need(1)?;
                    let v = potential_from(potential, *d)?;
                    println!("{}", gibbs_laplacian(&parse(&exprs[0], &decl)?, &v)?);
                }
                "div-v" => {
                    need(*d)?;
                    let comps = exprs
                        .iter()
                        .take(*d)
                        .map(|e| parse(e, &decl))
                        .collect::<Result<Vec<_>, _>>()?;
                    let h = OperatorField::vector(comps)?;
                    let v = potential_from(potential, *d)?;
                    println!("{}", weighted_divergence(&h, &v)?);
                }
                "bracket" => {
                    need(2 * *d)?;
                    let h1 = OperatorField::vector(
                        exprs[..*d].iter().map(|e| parse(e, &decl)).collect::<Result<_, _>>()?,
                    )?;
                    let h2 = OperatorField::vector(
                        exprs[*d..2 * *d]
                            .iter()
                            .map(|e| parse(e, &decl))
                            .collect::<Result<_, _>>()?,
                    )?;
                    let br = lie_bracket(&h1, &h2)?;
                    for (j, c) in br.components().iter().enumerate() {
                        println!("component {}: {c}", j + 1);
                    }
                }
                "logdet" => {
                    need(*d)?;
                    let (sdecl, slot) = Declaration::scalar(*d).push_y_slot(*d);
                    let comps = exprs
                        .iter()
                        .take(*d)
                        .map(|e| parse(e, &sdecl))
                        .collect::<Result<Vec<_>, _>>()?;
                    let f = OperatorField::new(comps, Some(slot))?;
                    println!("{}", log_det_series(&f, *trunc)?);
                }
                other => return Err(NcError::Config(format!("unknown operator {other}"))),
            }
            Ok(0)
        }
        Cmd::Eval { expr, d, n, check, sizes } => {
            let decl = Declaration::scalar(*d);
            let mut rng = nctrace::randgen::rng(cli.seed);
            match check.as_deref() {
                None => {
                    let e = expr.as_ref().ok_or_else(|| {
                        NcError::Config("eval needs an expression or a --check".into())
                    })?;
                    let f = parse(e, &decl)?;
                    let x = HermTuple::gue(*n, *d, &mut rng);
                    let v = evaluate_scalar(&f, &x)?;
                    println!("{} (N = {n}, random tuple, seed {})", v, cli.seed);
                }
                Some("magic") => {
                    let a = HermTuple::gue(*n, 1, &mut rng).mat(0).clone();
                    let b = HermTuple::gue(*n, 1, &mut rng).mat(0).clone();
                    let c = HermTuple::gue(*n, 1, &mut rng).mat(0).clone();
                    for i in 0..2 {
                        for j in 0..2 {
                            let r = magic_formula_check(&a, &b, &c, i, j);
                            println!(
                                "i={i} j={j}: sandwich {:.3e}, double-trace {:.3e}, mixed {:.3e}",
                                r.sandwich, r.double_trace, r.mixed
                            );
                        }
                    }
                }
                Some("fd") => {
                    let e = expr.as_ref().ok_or_else(|| {
                        NcError::Config("the fd check needs an expression".into())
                    })?;
                    let f = parse(e, &decl)?;
                    let x = HermTuple::gue(*n, *d, &mut rng);
                    let y = HermTuple::gue(*n, *d, &mut rng);
                    let (df, slot) = nctrace::calculus::differential(&f)?;
                    let sym = nctrace::matrix::evaluate_scalar_ctx(
                        &df,
                        &nctrace::matrix::EvalCtx::new(&x).with_slot(slot, y.mats().to_vec()),
                    )?;
                    for h in [1e-3, 5e-4] {
                        let mut fd = num_complex::Complex64::default();
                        for j in 0..*d {
                            let mut xp = x.clone();
                            xp.mats_mut()[j] += y.mat(j).scale(h);
                            let mut xm = x.clone();
                            xm.mats_mut()[j] -= y.mat(j).scale(h);
                            fd += (evaluate_scalar(&f, &xp)? - evaluate_scalar(&f, &xm)?)
                                / (2.0 * h);
                        }
                        println!("h = {h}: |fd - symbolic| = {:.3e}", (fd - sym).norm());
                    }
                }
                Some("lap-sweep") => {
                    let e = expr.clone().unwrap_or_else(|| "tr(x1^2)^2".into());
                    let f = parse(&e, &decl)?;
                    let lf = laplacian(&f)?;
                    std::fs::create_dir_all(&cli.out)?;
                    let path = cli.out.join("lap_sweep.csv");
                    let mut w = std::fs::File::create(&path)?;
                    use std::io::Write;
                    writeln!(w, "n,error,yerr")?;
                    for ns in sizes.split(',') {
                        let nn: usize = ns
                            .trim()
                            .parse()
                            .map_err(|_| NcError::Config(format!("bad size {ns}")))?;
                        let mut worst = 0.0_f64;
                        for _ in 0..5 {
                            let x = HermTuple::gue(nn, *d, &mut rng).spectral_clamp(2.0);
                            let num =
                                classical_laplacian(&f, &x, LaplacianMode::ExactBasis, &mut rng)?;
                            let sym = evaluate_scalar(&lf, &x)?;
                            worst = worst.max((num - sym).norm());
                        }
                        writeln!(w, "{nn},{worst},0")?;
                        println!("N = {nn}: sup |(1/N^2) Delta f - L f| = {worst:.3e}");
                    }
                    println!("wrote {}", path.display());
                }
                Some(other) => {
                    return Err(NcError::Config(format!("unknown check {other}")));
                }
            }
            Ok(0)
        }
        Cmd::Sample { config } => {
            let text = std::fs::read_to_string(config)?;
            let dto: dto::SampleConfig = serde_json::from_str(&text)
                .map_err(|e| NcError::Config(format!("bad sample config: {e}")))?;
            let (cfg, observables) = dto.build(cli.seed)?;
            let batch = sample_gibbs(&cfg)?;
            std::fs::create_dir_all(&cli.out)?;
            let path = cli.out.join("moments.csv");
            let mut w = std::fs::File::create(&path)?;
            batch.write_moments_csv(&observables, &mut w)?;
            let edges = spectral_support_check(&batch);
            println!(
                "acceptance rate {:.3}, final step {:.2e}",
                batch.acceptance_rate, batch.final_step
            );
            for (j, (lo, hi)) in edges.iter().enumerate() {
                println!("x{}: spectrum in [{lo:.4}, {hi:.4}]", j + 1);
            }
            for stat in batch.moment_table(&observables)? {
                println!(
                    "{}: {:.6} +- {:.6} (n_eff {:.0})",
                    stat.name, stat.mean.re, stat.stderr, stat.n_eff
                );
            }
            println!("wrote {}", path.display());
            Ok(0)
        }
        Cmd::Semigroup { expr, d, t, backend, basis_depth, potential, n, paths, dt } => {
            let decl = Declaration::scalar(*d);
            let f = parse(expr, &decl)?;
            match backend.as_str() {
                "exact" => {
                    let basis = DegreeBasis::new(*d, *basis_depth, 1.0)?;
                    println!("{}", semigroup_exact(&f, *t, &basis)?);
                }
                "mc" => {
                    let v = potential_from(potential, *d)?;
                    let mut rng = nctrace::randgen::rng(cli.seed);
                    let x0 = HermTuple::gue(*n, *d, &mut rng);
                    let est = semigroup_mc(&f, &v, *t, &x0, *paths, *dt, cli.seed ^ 0x5e)?;
                    println!("{} +- {} (random start, N = {n})", est.mean, est.stderr);
                }
                other => return Err(NcError::Config(format!("unknown backend {other}"))),
            }
            Ok(0)
        }
        Cmd::Psi { expr, d, backend, potential, iterations, cutoff, n, paths, t_max } => {
            let decl = Declaration::scalar(*d);
            let f = parse(expr, &decl)?;
            match backend.as_str() {
                "exact" => {
                    let (g, e) = psi_base(&f, 1.0)?;
                    println!("expectation: {e}");
                    println!("{g}");
                }
                "perturbative" => {
                    let v = potential_from(potential, *d)?;
                    let w = v.perturbation()?;
                    let c = scha_curvature(&w, &|_, k| nctrace::gibbs::catalan(k / 2));
                    let sol = psi_perturbative(&f, &v, c, *iterations, *cutoff)?;
                    println!(
                        "base curvature {c:.4}, residuals {:?}",
                        sol.residual_history
                    );
                    println!("expectation: {}", sol.expectation);
                    println!("{}", sol.g);
                }
                "mc" => {
                    let v = potential_from(potential, *d)?;
                    let mut rng = nctrace::randgen::rng(cli.seed);
                    let x0 = HermTuple::gue(*n, *d, &mut rng);
                    let (est, tail) = psi_mc(
                        &f,
                        &v,
                        &x0,
                        None,
                        1.0,
                        *t_max,
                        0.05,
                        *paths,
                        0.01,
                        cli.seed ^ 0x51,
                    )?;
                    println!("{} +- {} (tail bound {tail:.2e})", est.mean, est.stderr);
                }
                other => return Err(NcError::Config(format!("unknown backend {other}"))),
            }
            Ok(0)
        }
        Cmd::Transport { config } => {
            let text = std::fs::read_to_string(config)?;
            let dto: dto::TransportConfig = serde_json::from_str(&text)
                .map_err(|e| NcError::Config(format!("bad transport config: {e}")))?;
            std::fs::create_dir_all(&cli.out)?;
            let path = cli.out.join("transport.csv");
            let rows = dto.run(cli.seed)?;
            let mut w = std::fs::File::create(&path)?;
            use std::io::Write;
            writeln!(w, "observable,pushed_mean,direct_mean,stderr_pushed,stderr_direct,z")?;
            for r in &rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    r.name, r.pushed_mean, r.direct_mean, r.pushed_stderr, r.direct_stderr, r.z
                )?;
                println!(
                    "{}: pushed {:.5} vs direct {:.5} (z = {:+.2})",
                    r.name, r.pushed_mean, r.direct_mean, r.z
                );
            }
            println!("wrote {}", path.display());
            Ok(0)
        }
        Cmd::Verify { suite } => {
            let ids: Vec<usize> = match suite.as_str() {
                "all" => vec![],
                "exact" => vec![1, 2, 3, 4, 5],
                list => list
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<usize>()
                            .map_err(|_| NcError::Config(format!("bad criterion id {s}")))
                    })
                    .collect::<Result<_, _>>()?,
            };
            let outcomes = nctrace::acceptance::run(&ids, cli.seed, cli.tol_scale);
            let mut all_ok = true;
            for o in &outcomes {
                println!("{}", o.line());
                all_ok &= o.passed;
            }
            std::fs::create_dir_all(&cli.out)?;
            let summary: Vec<_> = outcomes
                .iter()
                .map(|o| {
                    serde_json::json!({
                        "id": o.id, "name": o.name, "passed": o.passed,
                        "seconds": o.seconds, "detail": o.detail,
                    })
                })
                .collect();
            std::fs::write(
                cli.out.join("verify.json"),
                serde_json::to_string_pretty(&summary).unwrap(),
            )?;
            Ok(if all_ok { 0 } else { 4 })
        }
    }
}
