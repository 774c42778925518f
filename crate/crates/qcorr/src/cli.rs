//! Command-line driver: state loading, entropy evaluation, loss/discord
//! minimization, CSV sweeps over the worked state families, and a self-check
//! suite. Exit codes: 0 success, 1 failed check, 2 input error.

use crate::entangle::formation_from_concurrence;
use crate::entropy::EntropyFn;
use crate::minimize::{
    min_info_loss_joint, min_info_loss_local, quantum_discord_b, OptimizerConfig,
};
use crate::oracle::{
    concurrence_mixture_2q, ifb_2q_min, ifb_bell_decoherence, ifb_mixture, MixtureParams,
};
use crate::qstate::{
    bell_decohered, bell_pair, classical_state, maximally_mixed, schmidt_ket, DensityMatrix,
    Subsystem,
};
use crate::{Error, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "qcorr",
    version,
    about = "Entropic measures of quantum correlations: entropies, minimal \
             measurement losses, discord, and CSV sweeps of the worked state families"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print S_f of a state to 12 significant digits
    Entropy(EntropyArgs),
    /// Minimize the measurement information loss (or discord) of a state
    Minimize(MinimizeArgs),
    /// Sweep the noisy Schmidt-mixture family over x and write a CSV
    Figure1(Figure1Args),
    /// Sweep the decohered Bell family over z and write a CSV
    Figure2(Figure2Args),
    /// Run the invariant suite; optionally validate a state file first
    Check(CheckArgs),
}

#[derive(Args)]
struct StateArgs {
    /// Builtin state (bell | maxmixed:<n> | pure:<p> | mixture:<p>:<x> |
    /// belldeco:<z> | classical[:<probs.json>]) or a path to a state JSON file
    #[arg(long)]
    state: String,
    /// Bipartite split "dA,dB"; defaults to the state's natural split
    #[arg(long)]
    dims: Option<String>,
}

#[derive(Args)]
struct OptimizerArgs {
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Convergence tolerance on the objective value
    #[arg(long)]
    tol: Option<f64>,
    /// Qubit-side scan resolution "n1xn2" (θ by φ)
    #[arg(long)]
    grid: Option<String>,
}

impl OptimizerArgs {
    fn config(&self) -> Result<OptimizerConfig> {
        let mut cfg = OptimizerConfig::default();
        if let Some(r) = self.restarts {
            cfg.restarts = r;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.tol {
            cfg.tol_value = t;
        }
        if let Some(g) = &self.grid {
            let (a, b) = g
                .split_once('x')
                .ok_or_else(|| Error::InvalidParam(format!("grid '{g}' is not n1xn2")))?;
            cfg.grid = (parse_num::<usize>(a, "grid")?, parse_num::<usize>(b, "grid")?);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct EntropyArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Entropy tag: vn | linear | tsallis:<q> | renyi:<q>
    #[arg(long, default_value = "vn")]
    entropy: String,
}

#[derive(Args)]
struct MinimizeArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Entropy tag (ignored for --side discord, which is von Neumann)
    #[arg(long, default_value = "vn")]
    entropy: String,
    /// Measured side: A | B | AB (product basis) | discord
    #[arg(long, default_value = "B")]
    side: String,
    #[command(flatten)]
    optimizer: OptimizerArgs,
    /// Also write the JSON report to this path
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Figure1Args {
    /// Larger Schmidt weight of the underlying pure state
    #[arg(long)]
    p: f64,
    /// Extra Tsallis indices, comma-separated, one Iq_<q> column each
    #[arg(long)]
    q: Option<String>,
    /// Sweep "start:stop:step" over the mixing weight x
    #[arg(long, default_value = "0:1:0.05")]
    xgrid: String,
    #[arg(long)]
    out: PathBuf,
    /// Append optimizer cross-check columns and enforce agreement
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    optimizer: OptimizerArgs,
}

#[derive(Args)]
struct Figure2Args {
    /// Extra Tsallis indices, comma-separated, one Iq_<q> column each
    #[arg(long)]
    q: Option<String>,
    /// Sweep "start:stop:step" over the coherence z
    #[arg(long, default_value = "0:1:0.05")]
    zgrid: String,
    #[arg(long)]
    out: PathBuf,
    /// Append optimizer cross-check columns and enforce agreement
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    optimizer: OptimizerArgs,
}

#[derive(Args)]
struct CheckArgs {
    /// Validate this state file before running the suite
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

pub fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Entropy(args) => cmd_entropy(&args),
        Command::Minimize(args) => cmd_minimize(&args),
        Command::Figure1(args) => cmd_figure1(&args),
        Command::Figure2(args) => cmd_figure2(&args),
        Command::Check(args) => cmd_check(&args),
    }
}

fn parse_num<T: std::str::FromStr>(text: &str, what: &str) -> Result<T> {
    text.trim()
        .parse::<T>()
        .map_err(|_| Error::InvalidParam(format!("cannot parse {what} from '{text}'")))
}

fn parse_dims(text: &str) -> Result<(usize, usize)> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| Error::InvalidParam(format!("dims '{text}' is not dA,dB")))?;
    Ok((parse_num(a, "dims")?, parse_num(b, "dims")?))
}

fn natural_split(n: usize) -> (usize, usize) {
    let r = (n as f64).sqrt().round() as usize;
    if r * r == n {
        (r, r)
    } else {
        (n, 1)
    }
}

fn load_state(args: &StateArgs) -> Result<DensityMatrix> {
    let dims = args.dims.as_deref().map(parse_dims).transpose()?;
    let spec = args.state.strip_prefix("builtin:").unwrap_or(&args.state);
    let rho = if spec == "bell" {
        bell_pair()
    } else if let Some(rest) = spec.strip_prefix("maxmixed:") {
        let n: usize = parse_num(rest, "maxmixed dimension")?;
        if n == 0 {
            return Err(Error::InvalidParam("maxmixed dimension must be positive".into()));
        }
        let d = match dims {
            Some(d) if d.0 * d.1 != n => {
                return Err(Error::DimensionMismatch(format!(
                    "dims {},{} do not multiply to {n}",
                    d.0, d.1
                )))
            }
            Some(d) => d,
            None => natural_split(n),
        };
        maximally_mixed(d)
    } else if let Some(rest) = spec.strip_prefix("pure:") {
        let p: f64 = parse_num(rest, "Schmidt weight")?;
        DensityMatrix::from_ket(&schmidt_ket(p)?, (2, 2))?
    } else if let Some(rest) = spec.strip_prefix("mixture:") {
        let (p_text, x_text) = rest
            .split_once(':')
            .ok_or_else(|| Error::InvalidParam(format!("mixture '{rest}' is not <p>:<x>")))?;
        let p: f64 = parse_num(p_text, "Schmidt weight")?;
        MixtureParams::new(&[p, 1.0 - p], parse_num(x_text, "mixing weight")?, 4)?.state((2, 2))?
    } else if let Some(rest) = spec.strip_prefix("belldeco:") {
        bell_decohered(parse_num(rest, "coherence")?)?
    } else if spec == "classical" {
        classical_state(&[0.4, 0.1, 0.2, 0.3], (2, 2))?
    } else if let Some(rest) = spec.strip_prefix("classical:") {
        let probs: Vec<f64> = serde_json::from_str(&std::fs::read_to_string(rest)?)?;
        let d = dims.unwrap_or_else(|| natural_split(probs.len()));
        classical_state(&probs, d)?
    } else {
        DensityMatrix::from_json(&std::fs::read_to_string(spec)?)?
    };
    match dims {
        Some(d) if d != rho.dims() => rho.with_dims(d),
        _ => Ok(rho),
    }
}

/// 12 significant digits, scientific, with −0 folded into 0.
fn fmt_sig(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.11e}")
}

fn cmd_entropy(args: &EntropyArgs) -> Result<()> {
    let f: EntropyFn = args.entropy.parse()?;
    let rho = load_state(&args.state)?;
    println!("{}", fmt_sig(f.entropy(&rho)?));
    Ok(())
}

#[derive(Serialize)]
struct BasisJson {
    side: String,
    params: Vec<f64>,
    vectors_re: Vec<Vec<f64>>,
    vectors_im: Vec<Vec<f64>>,
}

fn basis_json(side: &str, params: &[f64], basis: &crate::measure::LocalBasis) -> BasisJson {
    let v = basis.vectors();
    BasisJson {
        side: side.to_string(),
        params: params.to_vec(),
        vectors_re: (0..v.nrows())
            .map(|r| (0..v.ncols()).map(|c| v[(r, c)].re).collect())
            .collect(),
        vectors_im: (0..v.nrows())
            .map(|r| (0..v.ncols()).map(|c| v[(r, c)].im).collect())
            .collect(),
    }
}

#[derive(Serialize)]
struct MinimizeJson {
    value: f64,
    basis: serde_json::Value,
    converged: bool,
    starts_used: usize,
    seed: u64,
}

fn cmd_minimize(args: &MinimizeArgs) -> Result<()> {
    let rho = load_state(&args.state)?;
    let cfg = args.optimizer.config()?;
    let side_dim = |s: Subsystem| match s {
        Subsystem::A => rho.dims().0,
        Subsystem::B => rho.dims().1,
    };
    let starts_for = |d: usize| {
        cfg.restarts + 1 + usize::from(d == 2 && cfg.grid_fallback)
    };
    let (value, basis, converged, starts_used) = match args.side.to_ascii_uppercase().as_str() {
        "A" | "B" => {
            let side = if args.side.eq_ignore_ascii_case("a") { Subsystem::A } else { Subsystem::B };
            let f: EntropyFn = args.entropy.parse()?;
            let out = min_info_loss_local(&f, &rho, side, &cfg)?;
            let basis = match &out.report.measurement {
                crate::measure::Measurement::Local(b) => {
                    serde_json::to_value(basis_json(&args.side.to_ascii_uppercase(), &out.params, b))?
                }
                _ => unreachable!("local minimization yields a local measurement"),
            };
            (out.loss, basis, out.converged, starts_for(side_dim(side)))
        }
        "AB" => {
            let f: EntropyFn = args.entropy.parse()?;
            let out = min_info_loss_joint(&f, &rho, &cfg)?;
            let basis = match &out.report.measurement {
                crate::measure::Measurement::Joint(p) => {
                    let na = crate::minimize::BasisParametrization::new(rho.dims().0)?.n_params();
                    serde_json::json!({
                        "a": basis_json("A", &out.params[..na], &p.a),
                        "b": basis_json("B", &out.params[na..], &p.b),
                    })
                }
                _ => unreachable!("joint minimization yields a product measurement"),
            };
            (out.loss, basis, out.converged, cfg.restarts + 1)
        }
        "DISCORD" => {
            let out = quantum_discord_b(&rho, &cfg)?;
            let basis = serde_json::to_value(basis_json("B", &out.params, &out.basis))?;
            (out.value, basis, out.converged, starts_for(side_dim(Subsystem::B)))
        }
        other => {
            return Err(Error::InvalidParam(format!(
                "side '{other}' is not one of A, B, AB, discord"
            )))
        }
    };
    if !converged {
        eprintln!("warning: optimizer hit the iteration cap; value is best-so-far");
    }
    let report = MinimizeJson { value, basis, converged, starts_used, seed: cfg.seed };
    let text = serde_json::to_string_pretty(&report)?;
    println!("{text}");
    if let Some(path) = &args.out {
        std::fs::write(path, text + "\n")?;
    }
    Ok(())
}

fn parse_sweep(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidParam(format!("sweep '{text}' is not start:stop:step")));
    }
    let (a, b): (f64, f64) = (parse_num(parts[0], "sweep start")?, parse_num(parts[1], "sweep stop")?);
    let step: f64 = parse_num(parts[2], "sweep step")?;
    if !(step > 0.0) || b < a {
        return Err(Error::InvalidParam(format!("sweep '{text}' is empty or runs backwards")));
    }
    let n = ((b - a) / step).round() as usize;
    let mut out: Vec<f64> = (0..=n).map(|i| a + step * i as f64).collect();
    for v in &mut out {
        *v = v.clamp(a, b);
    }
    Ok(out)
}

fn parse_q_list(text: Option<&str>) -> Result<Vec<f64>> {
    match text {
        None => Ok(Vec::new()),
        Some(t) => t.split(',').map(|s| parse_num::<f64>(s, "Tsallis index")).collect(),
    }
}

fn write_csv(path: &PathBuf, header: &[String], rows: &[Vec<f64>]) -> Result<()> {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        let mut line = String::new();
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            let _ = write!(line, "{}", fmt_sig(*v));
        }
        text.push_str(&line);
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn cmd_figure1(args: &Figure1Args) -> Result<()> {
    if !(0.0..=1.0).contains(&args.p) {
        return Err(Error::InvalidParam(format!("p = {} outside [0,1]", args.p)));
    }
    let qs = parse_q_list(args.q.as_deref())?;
    let xs = parse_sweep(&args.xgrid)?;
    let cfg = args.optimizer.config()?;
    let (vn, lin) = (EntropyFn::vn(), EntropyFn::linear());
    let mut header: Vec<String> =
        ["x", "I2B", "C2", "IvnB", "EOF"].iter().map(|s| s.to_string()).collect();
    for q in &qs {
        header.push(format!("Iq_{q}"));
    }
    if args.verify {
        header.push("I2B_opt".into());
        header.push("IvnB_opt".into());
    }
    let mut rows = Vec::with_capacity(xs.len());
    for &x in &xs {
        let i2 = ifb_2q_min(&lin, args.p, x)?;
        let c = concurrence_mixture_2q(args.p, x)?;
        let ivn = ifb_2q_min(&vn, args.p, x)?;
        let eof = formation_from_concurrence(&vn, c)?;
        let mut row = vec![x, i2, c * c, ivn, eof];
        for &q in &qs {
            row.push(ifb_2q_min(&EntropyFn::tsallis(q)?, args.p, x)?);
        }
        if i2 < c * c - 1e-12 {
            return Err(Error::CheckFailed(format!(
                "quadratic loss {i2} fell below squared concurrence {} at x = {x}",
                c * c
            )));
        }
        if args.verify {
            let rho = MixtureParams::new(&[args.p, 1.0 - args.p], x, 4)?.state((2, 2))?;
            let o2 = min_info_loss_local(&lin, &rho, Subsystem::B, &cfg)?.loss;
            let ovn = min_info_loss_local(&vn, &rho, Subsystem::B, &cfg)?.loss;
            for (name, opt, closed) in [("I2B", o2, i2), ("IvnB", ovn, ivn)] {
                if (opt - closed).abs() > 1e-7 {
                    return Err(Error::CheckFailed(format!(
                        "optimizer {name} = {opt} disagrees with closed form {closed} at x = {x}"
                    )));
                }
            }
            row.push(o2);
            row.push(ovn);
        }
        rows.push(row);
    }
    // every closed-form loss column grows with the pure-state weight
    for col in 1..5 + qs.len() {
        for w in rows.windows(2) {
            if w[1][col] < w[0][col] - 1e-9 {
                return Err(Error::CheckFailed(format!(
                    "column {} decreased from {} to {} along x",
                    header[col], w[0][col], w[1][col]
                )));
            }
        }
    }
    write_csv(&args.out, &header, &rows)?;
    println!("wrote {} ({} rows)", args.out.display(), rows.len());
    Ok(())
}

fn cmd_figure2(args: &Figure2Args) -> Result<()> {
    let qs = parse_q_list(args.q.as_deref())?;
    let zs = parse_sweep(&args.zgrid)?;
    let cfg = args.optimizer.config()?;
    let (vn, lin) = (EntropyFn::vn(), EntropyFn::linear());
    let mut header: Vec<String> =
        ["z", "I2B", "C2", "IvnB", "EOF"].iter().map(|s| s.to_string()).collect();
    for q in &qs {
        header.push(format!("Iq_{q}"));
    }
    if args.verify {
        header.push("I2B_opt".into());
        header.push("IvnB_opt".into());
    }
    let mut rows = Vec::with_capacity(zs.len());
    for &z in &zs {
        let i2 = ifb_bell_decoherence(&lin, z)?;
        let c2 = z * z;
        let ivn = ifb_bell_decoherence(&vn, z)?;
        let eof = formation_from_concurrence(&vn, z.abs())?;
        if (i2 - c2).abs() > 1e-12 {
            return Err(Error::CheckFailed(format!(
                "quadratic loss {i2} must equal squared concurrence {c2} at z = {z}"
            )));
        }
        if z > 0.0 && z < 1.0 && eof < ivn - 1e-12 {
            return Err(Error::CheckFailed(format!(
                "formation {eof} fell below von Neumann loss {ivn} at z = {z}"
            )));
        }
        let mut row = vec![z, i2, c2, ivn, eof];
        for &q in &qs {
            row.push(ifb_bell_decoherence(&EntropyFn::tsallis(q)?, z)?);
        }
        if args.verify {
            let rho = bell_decohered(z)?;
            let o2 = min_info_loss_local(&lin, &rho, Subsystem::B, &cfg)?.loss;
            let ovn = min_info_loss_local(&vn, &rho, Subsystem::B, &cfg)?.loss;
            for (name, opt, closed) in [("I2B", o2, i2), ("IvnB", ovn, ivn)] {
                if (opt - closed).abs() > 1e-7 {
                    return Err(Error::CheckFailed(format!(
                        "optimizer {name} = {opt} disagrees with closed form {closed} at z = {z}"
                    )));
                }
            }
            row.push(o2);
            row.push(ovn);
        }
        rows.push(row);
    }
    write_csv(&args.out, &header, &rows)?;
    println!("wrote {} ({} rows)", args.out.display(), rows.len());
    Ok(())
}

fn cmd_check(args: &CheckArgs) -> Result<()> {
    if let Some(path) = &args.state {
        // surfaces the violated invariant (hermiticity, trace, positivity…)
        let rho = DensityMatrix::from_json(&std::fs::read_to_string(path)?)?;
        println!("ok state-file ({}x{} density matrix)", rho.dim(), rho.dim());
    }
    let seed = args.seed.unwrap_or(0x5EED);
    let checks = check_suite(seed);
    let total = checks.len();
    let mut failures = Vec::new();
    for (name, check) in checks {
        match check() {
            Ok(()) => println!("ok {name}"),
            Err(msg) => {
                println!("FAIL {name}: {msg}");
                failures.push(name);
            }
        }
    }
    if failures.is_empty() {
        println!("all {total} checks passed");
        Ok(())
    } else {
        Err(Error::CheckFailed(failures.join(", ")))
    }
}

type Check = (&'static str, Box<dyn Fn() -> std::result::Result<(), String>>);

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn near(a: f64, b: f64, tol: f64, what: &str) -> std::result::Result<(), String> {
    ensure((a - b).abs() <= tol, format!("{what}: {a} vs {b} (tol {tol})"))
}

/// Reduced-sampling invariant suite shared by `check` and the tests.
pub(crate) fn check_suite(seed: u64) -> Vec<Check> {
    use crate::entangle::{concurrence_2q, negativity};
    use crate::entropy::default_witness_family;
    use crate::measure::{info_loss, perturbative_loss, LocalBasis, Measurement};
    use crate::minimize::discord_at_basis;
    use crate::oracle::{slope_condition_q_interval, SlopeExample};
    use crate::qstate::schmidt_mixture;

    let mut checks: Vec<Check> = Vec::new();
    let quick = OptimizerConfig { restarts: 6, seed, ..Default::default() };

    checks.push((
        "entropy-normalization",
        Box::new(|| {
            for f in default_witness_family() {
                near(f.entropy_of_values(&[0.5, 0.5]), 1.0, 1e-12, "S(1/2,1/2)")?;
            }
            near(
                EntropyFn::vn().entropy_of_values(&[0.8, 0.2]),
                0.7219280948873623,
                1e-14,
                "S_vn(0.8,0.2)",
            )
        }),
    ));
    checks.push((
        "pinching-never-lowers-entropy",
        Box::new(move || {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..4 {
                let rho = crate::qstate::random_density_matrix(&mut rng, (2, 2));
                let basis = LocalBasis::bloch(Subsystem::B, 1.1, 0.4);
                for f in default_witness_family() {
                    let loss = info_loss(&f, &rho, &Measurement::Local(basis.clone()))
                        .map_err(|e| e.to_string())?
                        .loss;
                    ensure(loss >= -1e-9, format!("{f}: negative loss {loss}"))?;
                }
            }
            Ok(())
        }),
    ));
    checks.push((
        "degenerate-curvature-estimate",
        Box::new(|| {
            let rho = bell_pair();
            let m = Measurement::Local(LocalBasis::computational(Subsystem::B, 2));
            let est = perturbative_loss(&EntropyFn::vn(), &rho, &m).map_err(|e| e.to_string())?;
            near(est, 0.5 / std::f64::consts::LN_2, 1e-12, "curvature estimate")
        }),
    ));
    checks.push((
        "concurrence-closed-form",
        Box::new(|| {
            for (p, x) in [(0.5, 0.5), (0.9, 0.7), (0.7, 0.2)] {
                let rho = schmidt_mixture(&[p, 1.0 - p], (2, 2), x).map_err(|e| e.to_string())?;
                let direct = concurrence_2q(&rho).map_err(|e| e.to_string())?;
                let closed = concurrence_mixture_2q(p, x).map_err(|e| e.to_string())?;
                near(direct, closed, 5e-8, "concurrence")?;
            }
            Ok(())
        }),
    ));
    checks.push((
        "formation-convexity-gate",
        Box::new(|| {
            ensure(
                formation_from_concurrence(&EntropyFn::tsallis(0.5).unwrap(), 0.5).is_err(),
                "q = 0.5 must be rejected",
            )?;
            ensure(
                formation_from_concurrence(&EntropyFn::tsallis(4.29).unwrap(), 0.5).is_ok(),
                "q = 4.29 must be accepted",
            )
        }),
    ));
    checks.push((
        "negativity-threshold",
        Box::new(|| {
            for (probs, xc) in [(vec![0.5, 0.5], 1.0 / 3.0), (vec![0.9, 0.1], 1.0 / 2.2)] {
                let below = schmidt_mixture(&probs, (2, 2), xc - 1e-3).map_err(|e| e.to_string())?;
                let above = schmidt_mixture(&probs, (2, 2), xc + 1e-3).map_err(|e| e.to_string())?;
                ensure(
                    negativity(&below).map_err(|e| e.to_string())? < 1e-9,
                    "negativity below threshold",
                )?;
                ensure(
                    negativity(&above).map_err(|e| e.to_string())? > 1e-9,
                    "negativity above threshold",
                )?;
            }
            Ok(())
        }),
    ));
    checks.push((
        "mixture-loss-frozen-values",
        Box::new(|| {
            let vn = EntropyFn::vn();
            let a = MixtureParams::new(&[0.5, 0.5], 0.5, 4).map_err(|e| e.to_string())?;
            near(
                ifb_mixture(&vn, &a).map_err(|e| e.to_string())?,
                0.26248318376373436,
                1e-12,
                "balanced mixture",
            )?;
            let b = MixtureParams::new(&[0.9, 0.1], 0.5, 4).map_err(|e| e.to_string())?;
            near(
                ifb_mixture(&vn, &b).map_err(|e| e.to_string())?,
                0.10031589437726,
                1e-11,
                "skewed mixture",
            )
        }),
    ));
    checks.push((
        "slope-condition-intervals",
        Box::new(|| {
            let (lo, hi) =
                slope_condition_q_interval(SlopeExample::Bell).map_err(|e| e.to_string())?;
            near(lo, 2.0, 0.02, "Bell lower endpoint")?;
            near(hi, 3.0, 0.02, "Bell upper endpoint")?;
            let (lo, hi) = slope_condition_q_interval(SlopeExample::Mixture { p: 0.5 })
                .map_err(|e| e.to_string())?;
            near(lo, 1.27, 0.05, "mixture lower endpoint")?;
            near(hi, 3.5, 0.05, "mixture upper endpoint")
        }),
    ));
    {
        let quick = quick.clone();
        checks.push((
            "optimizer-matches-closed-form",
            Box::new(move || {
                let rho = schmidt_mixture(&[0.9, 0.1], (2, 2), 0.5).map_err(|e| e.to_string())?;
                for f in [EntropyFn::vn(), EntropyFn::linear()] {
                    let opt = min_info_loss_local(&f, &rho, Subsystem::B, &quick)
                        .map_err(|e| e.to_string())?
                        .loss;
                    let closed = ifb_2q_min(&f, 0.9, 0.5).map_err(|e| e.to_string())?;
                    near(opt, closed, 1e-7, "minimized loss")?;
                }
                Ok(())
            }),
        ));
    }
    {
        let quick = quick.clone();
        checks.push((
            "discord-decohered-bell",
            Box::new(move || {
                let rho = bell_decohered(0.5).map_err(|e| e.to_string())?;
                let d = quantum_discord_b(&rho, &quick).map_err(|e| e.to_string())?.value;
                near(d, 0.18872187554086717, 1e-8, "discord")?;
                let basis = LocalBasis::bloch(Subsystem::B, 0.9, 0.0);
                let loss = info_loss(&EntropyFn::vn(), &rho, &Measurement::Local(basis.clone()))
                    .map_err(|e| e.to_string())?
                    .loss;
                let disc = discord_at_basis(&rho, &basis).map_err(|e| e.to_string())?;
                near(disc, loss, 1e-9, "discord/loss coincidence")
            }),
        ));
    }
    checks.push((
        "figure-family-orderings",
        Box::new(|| {
            let (vn, lin) = (EntropyFn::vn(), EntropyFn::linear());
            for i in 0..=10 {
                let x = 0.1 * i as f64;
                let i2 = ifb_2q_min(&lin, 0.9, x).map_err(|e| e.to_string())?;
                let c = concurrence_mixture_2q(0.9, x).map_err(|e| e.to_string())?;
                ensure(i2 >= c * c - 1e-12, format!("I2B {i2} < C² {} at x = {x}", c * c))?;
                let z = x;
                let izb = ifb_bell_decoherence(&lin, z).map_err(|e| e.to_string())?;
                near(izb, z * z, 1e-12, "quadratic decoherence loss")?;
                if z > 0.0 && z < 1.0 {
                    let e = formation_from_concurrence(&vn, z).map_err(|e| e.to_string())?;
                    let ivn = ifb_bell_decoherence(&vn, z).map_err(|e| e.to_string())?;
                    ensure(e >= ivn - 1e-12, format!("EOF {e} < IvnB {ivn} at z = {z}"))?;
                }
            }
            Ok(())
        }),
    ));
    {
        let quick = quick.clone();
        checks.push((
            "seeded-runs-reproduce",
            Box::new(move || {
                let rho = bell_decohered(0.6).map_err(|e| e.to_string())?;
                let a = min_info_loss_local(&EntropyFn::vn(), &rho, Subsystem::B, &quick)
                    .map_err(|e| e.to_string())?;
                let b = min_info_loss_local(&EntropyFn::vn(), &rho, Subsystem::B, &quick)
                    .map_err(|e| e.to_string())?;
                ensure(
                    a.loss.to_bits() == b.loss.to_bits() && a.params == b.params,
                    "same seed produced different reports",
                )
            }),
        ));
    }
    checks.push((
        "builtin-json-round-trip",
        Box::new(|| {
            let states = [
                ("bell", bell_pair()),
                ("maxmixed", maximally_mixed((2, 2))),
                (
                    "mixture",
                    schmidt_mixture(&[0.9, 0.1], (2, 2), 0.5).map_err(|e| e.to_string())?,
                ),
                ("belldeco", bell_decohered(0.6).map_err(|e| e.to_string())?),
                (
                    "classical",
                    classical_state(&[0.4, 0.1, 0.2, 0.3], (2, 2)).map_err(|e| e.to_string())?,
                ),
            ];
            for (name, rho) in states {
                let back =
                    DensityMatrix::from_json(&rho.to_json()).map_err(|e| e.to_string())?;
                ensure(
                    back.mat() == rho.mat() && back.dims() == rho.dims(),
                    format!("{name} changed across the JSON round trip"),
                )?;
            }
            Ok(())
        }),
    ));
    checks
}
