//! Minimization of measurement-induced information loss over local bases:
//! single-sided minima, product-basis (joint) minima, and the von Neumann
//! discord. The search is derivative-free simplex refinement from multiple
//! starts — the eigenbasis of the measured marginal is always seeded because
//! it is optimal for the worked state families but not in general — plus an
//! exhaustive Bloch-angle grid for qubit sides. Results are best-found values;
//! no global-optimality claim is made for sides of dimension above two.

use crate::entropy::EntropyFn;
use crate::measure::{
    info_loss, joint_probs, outcome_blocks, InfoLossReport, LocalBasis, Measurement, ProductBasis,
};
use crate::qstate::{eigh, hermitian_eigenvalues, random_unitary, DensityMatrix, Subsystem};
use crate::{C64, Error, Result};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

#[derive(Clone, Debug)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub tol_value: f64,
    pub tol_step: f64,
    pub seed: u64,
    /// For qubit sides, also scan a dense (θ, φ) grid and polish its best.
    pub grid_fallback: bool,
    pub grid: (usize, usize),
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 24,
            max_iters: 500,
            tol_value: 1e-10,
            tol_step: 1e-9,
            seed: 0x51ED,
            grid_fallback: true,
            grid: (181, 91),
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::InvalidParam("restarts and max_iters must be positive".into()));
        }
        if !(self.tol_value > 0.0) || !(self.tol_step > 0.0) {
            return Err(Error::InvalidParam("tolerances must be positive".into()));
        }
        if self.grid.0 < 2 || self.grid.1 < 2 {
            return Err(Error::InvalidParam(format!(
                "grid resolution {}x{} below 2 per axis",
                self.grid.0, self.grid.1
            )));
        }
        Ok(())
    }
}

/// Chart over the orthonormal bases of one side. Qubits use Bloch angles
/// (θ, φ); larger sides use d²−d angles of a Givens-rotation factorization
/// applied to the computational basis.
#[derive(Clone, Copy, Debug)]
pub struct BasisParametrization {
    dim: usize,
}

impl BasisParametrization {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch("cannot parametrize a 0-dimensional side".into()));
        }
        Ok(BasisParametrization { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_params(&self) -> usize {
        match self.dim {
            1 => 0,
            2 => 2,
            d => d * d - d,
        }
    }

    /// Plane-rotation pairs in elimination order: column-by-column below the
    /// diagonal. Each pair consumes two parameters (θ, φ).
    fn pairs(&self) -> Vec<(usize, usize)> {
        let d = self.dim;
        let mut out = Vec::with_capacity(d * (d - 1) / 2);
        for k in 0..d {
            for i in k + 1..d {
                out.push((k, i));
            }
        }
        out
    }

    fn unitary(&self, params: &[f64]) -> DMatrix<C64> {
        debug_assert_eq!(params.len(), self.n_params());
        let d = self.dim;
        let mut u = DMatrix::<C64>::identity(d, d);
        for (idx, (k, i)) in self.pairs().into_iter().enumerate() {
            let (theta, phi) = (params[2 * idx], params[2 * idx + 1]);
            let (c, s) = (theta.cos(), theta.sin());
            let e = C64::new(phi.cos(), phi.sin());
            // right-multiply by the plane rotation touching columns k and i
            for r in 0..d {
                let a = u[(r, k)];
                let b = u[(r, i)];
                u[(r, k)] = a * c + b * s * e;
                u[(r, i)] = -a * s * e.conj() + b * c;
            }
        }
        u
    }

    pub fn basis(&self, side: Subsystem, params: &[f64]) -> LocalBasis {
        match self.dim {
            1 => LocalBasis::computational(side, 1),
            2 => LocalBasis::bloch(side, params[0], params[1]),
            _ => LocalBasis::new(side, self.unitary(params))
                .expect("rotation products stay orthonormal"),
        }
    }

    /// Angles reproducing the basis defined by the columns of `u`, up to
    /// per-column phases (irrelevant for the induced measurement).
    pub fn params_from_unitary(&self, u: &DMatrix<C64>) -> Vec<f64> {
        match self.dim {
            1 => Vec::new(),
            2 => {
                let (a, b) = (u[(0, 0)], u[(1, 0)]);
                canonical_bloch(2.0 * b.norm().atan2(a.norm()), b.arg() - a.arg()).to_vec()
            }
            d => {
                let mut w = u.clone();
                let mut params = Vec::with_capacity(self.n_params());
                for (k, i) in self.pairs() {
                    let a = w[(k, k)];
                    let b = w[(i, k)];
                    if b.norm() < 1e-300 {
                        params.extend_from_slice(&[0.0, 0.0]);
                        continue;
                    }
                    let theta = b.norm().atan2(a.norm());
                    let phi = b.arg() - a.arg();
                    let (c, s) = (theta.cos(), theta.sin());
                    let e = C64::new(phi.cos(), phi.sin());
                    for col in 0..d {
                        let rk = w[(k, col)];
                        let ri = w[(i, col)];
                        w[(k, col)] = rk * c + ri * s * e.conj();
                        w[(i, col)] = -rk * s * e + ri * c;
                    }
                    params.extend_from_slice(&[theta, phi]);
                }
                params
            }
        }
    }

    /// Deterministic representative of the parameters, used both for
    /// reporting and as the tie-break key among equal minima.
    fn canonical(&self, params: &[f64]) -> Vec<f64> {
        match self.dim {
            1 => Vec::new(),
            2 => canonical_bloch(params[0], params[1]).to_vec(),
            _ => self.params_from_unitary(&self.unitary(params)),
        }
    }

    fn random_params<R: rand::Rng>(&self, rng: &mut R) -> Vec<f64> {
        match self.dim {
            1 => Vec::new(),
            2 => {
                // area-uniform polar angle on the sphere
                let theta = (1.0 - 2.0 * rng.random::<f64>()).acos();
                vec![theta, TAU * rng.random::<f64>()]
            }
            d => self.params_from_unitary(&random_unitary(rng, d)),
        }
    }
}

/// Folds Bloch angles into θ ∈ [0, π/2], φ ∈ [0, 2π), using the freedom to
/// negate θ, shift φ, and swap the two basis vectors.
fn canonical_bloch(theta: f64, phi: f64) -> [f64; 2] {
    let mut t = theta.rem_euclid(TAU);
    let mut p = phi;
    if t > PI {
        t = TAU - t;
        p += PI;
    }
    if t > FRAC_PI_2 {
        // swapping the outcomes maps (θ, φ) to (π−θ, φ+π)
        t = PI - t;
        p += PI;
    }
    let mut p = p.rem_euclid(TAU);
    if t < 1e-12 {
        t = 0.0;
        p = 0.0;
    } else if (t - FRAC_PI_2).abs() < 1e-12 {
        t = FRAC_PI_2;
        p = p.rem_euclid(PI);
    }
    [t, p]
}

#[derive(Clone, Debug)]
struct Candidate {
    value: f64,
    params: Vec<f64>,
    converged: bool,
    evals: usize,
}

fn lex_params(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            ord => return ord,
        }
    }
    Ordering::Equal
}

fn candidate_order(a: &Candidate, b: &Candidate) -> Ordering {
    a.value.total_cmp(&b.value).then_with(|| lex_params(&a.params, &b.params))
}

/// Deterministic reduction over the finished starts: values within `tol` of
/// the minimum count as equal minima, resolved by lexicographically smallest
/// canonical parameters. Independent of completion order by construction.
fn merge_candidates(candidates: Vec<Candidate>, tol: f64) -> Candidate {
    let total_evals: usize = candidates.iter().map(|c| c.evals).sum();
    let floor = candidates.iter().map(|c| c.value).fold(f64::INFINITY, f64::min);
    let mut best: Option<Candidate> = None;
    let mut certified = false;
    for c in candidates {
        if c.value > floor + tol {
            continue;
        }
        certified |= c.converged;
        best = Some(match best {
            None => c,
            Some(b) => match lex_params(&c.params, &b.params) {
                Ordering::Less => c,
                Ordering::Greater => b,
                Ordering::Equal => {
                    if c.value < b.value {
                        c
                    } else {
                        b
                    }
                }
            },
        });
    }
    let mut best = best.expect("at least one candidate");
    best.evals = total_evals;
    // the window is one minimum up to tol; a single converged member certifies it
    best.converged = certified;
    best
}

/// Nelder–Mead simplex search. Converged when both the value spread and the
/// longest simplex edge fall under the tolerances.
fn nelder_mead<F: Fn(&[f64]) -> f64>(
    obj: &F,
    x0: &[f64],
    step: f64,
    cfg: &OptimizerConfig,
) -> Candidate {
    let n = x0.len();
    if n == 0 {
        return Candidate { value: obj(x0), params: Vec::new(), converged: true, evals: 1 };
    }
    let mut evals = 0;
    let mut eval = |x: &[f64]| {
        evals += 1;
        obj(x)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step;
        let fv = eval(&v);
        simplex.push((v, fv));
    }
    let mut converged = false;
    for _ in 0..cfg.max_iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let edge = simplex[1..]
            .iter()
            .map(|(v, _)| {
                v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread.abs() <= cfg.tol_value && edge <= cfg.tol_step {
            converged = true;
            break;
        }
        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let blend = |a: f64| -> Vec<f64> {
            centroid.iter().zip(&worst.0).map(|(c, w)| c + a * (c - w)).collect()
        };
        let reflected = blend(1.0);
        let fr = eval(&reflected);
        if fr < simplex[0].1 {
            let expanded = blend(2.0);
            let fe = eval(&expanded);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let (contracted, target) =
                if fr < worst.1 { (blend(0.5), fr) } else { (blend(-0.5), worst.1) };
            let fc = eval(&contracted);
            if fc < target {
                simplex[n] = (contracted, fc);
            } else {
                // shrink toward the best vertex
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    for (x, b) in entry.0.iter_mut().zip(&best) {
                        *x = b + 0.5 * (*x - b);
                    }
                    entry.1 = eval(&entry.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    Candidate { value: simplex[0].1, params: simplex[0].0.clone(), converged, evals }
}

const SIMPLEX_STEP: f64 = 0.25;

/// Multi-start minimization over one side's bases: seeded starts, seeded
/// random restarts, and (for qubits) a dense grid with simplex polish.
/// Candidates merge by value then lexicographic canonical parameters, so the
/// result does not depend on thread scheduling.
fn optimize_basis<F>(
    par: &BasisParametrization,
    obj: &F,
    seeds: Vec<Vec<f64>>,
    cfg: &OptimizerConfig,
) -> Candidate
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if par.n_params() == 0 {
        return Candidate { value: obj(&[]), params: Vec::new(), converged: true, evals: 1 };
    }
    let mut starts = seeds;
    for r in 0..cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(
            cfg.seed ^ (r as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        );
        starts.push(par.random_params(&mut rng));
    }
    let mut candidates: Vec<Candidate> = starts
        .par_iter()
        .map(|x0| {
            let mut c = nelder_mead(obj, x0, SIMPLEX_STEP, cfg);
            c.params = par.canonical(&c.params);
            c
        })
        .collect();
    if par.dim() == 2 && cfg.grid_fallback {
        let (nt, np) = cfg.grid;
        let coarse = (0..nt * np)
            .into_par_iter()
            .map(|idx| {
                let theta = PI * (idx / np) as f64 / (nt - 1) as f64;
                let phi = TAU * (idx % np) as f64 / np as f64;
                let x = [theta, phi];
                Candidate {
                    value: obj(&x),
                    params: canonical_bloch(theta, phi).to_vec(),
                    converged: false,
                    evals: 1,
                }
            })
            .min_by(candidate_order)
            .expect("grid is nonempty");
        let mut polished = nelder_mead(obj, &coarse.params, SIMPLEX_STEP / 8.0, cfg);
        polished.params = par.canonical(&polished.params);
        polished.evals += nt * np;
        candidates.push(coarse);
        candidates.push(polished);
    }
    merge_candidates(candidates, cfg.tol_value)
}

/// Minimization outcome: the measurement found, its loss bookkeeping, and the
/// canonical parameters that generate its basis.
#[derive(Clone, Debug)]
pub struct MinimizeReport {
    pub loss: f64,
    pub params: Vec<f64>,
    pub converged: bool,
    pub evaluations: usize,
    pub report: InfoLossReport,
}

fn side_dim(rho: &DensityMatrix, side: Subsystem) -> usize {
    match side {
        Subsystem::A => rho.dims().0,
        Subsystem::B => rho.dims().1,
    }
}

/// Spectrum of the measured state without materializing it: the union of the
/// outcome-block spectra. +∞ on eigensolver failure, which steers the search
/// away instead of aborting it.
fn post_entropy(f: &EntropyFn, rho: &DensityMatrix, basis: &LocalBasis) -> f64 {
    let blocks = match outcome_blocks(rho, basis) {
        Ok(b) => b,
        Err(_) => return f64::INFINITY,
    };
    let mut values = Vec::with_capacity(rho.dim());
    for block in &blocks {
        match hermitian_eigenvalues(block) {
            Ok(mut v) => values.append(&mut v),
            Err(_) => return f64::INFINITY,
        }
    }
    f.entropy_of_values(&values)
}

fn eigenbasis_seed(par: &BasisParametrization, marginal: &DensityMatrix) -> Result<Vec<f64>> {
    let (_, vectors) = eigh(marginal.mat())?;
    Ok(par.params_from_unitary(&vectors))
}

/// Least information loss over complete projective measurements of one side.
pub fn min_info_loss_local(
    f: &EntropyFn,
    rho: &DensityMatrix,
    side: Subsystem,
    cfg: &OptimizerConfig,
) -> Result<MinimizeReport> {
    cfg.validate()?;
    let par = BasisParametrization::new(side_dim(rho, side))?;
    let seeds = vec![eigenbasis_seed(&par, &rho.partial_trace(side))?];
    let obj = |params: &[f64]| post_entropy(f, rho, &par.basis(side, params));
    let best = optimize_basis(&par, &obj, seeds, cfg);
    let measurement = Measurement::Local(par.basis(side, &best.params));
    let report = info_loss(f, rho, &measurement)?;
    Ok(MinimizeReport {
        loss: report.loss,
        params: best.params,
        converged: best.converged,
        evaluations: best.evals,
        report,
    })
}

/// Least information loss over product bases, measured on both sides. Each
/// start alternates one-sided sweeps (the conditional structure makes the
/// B-sweep the dominant direction) before a full joint polish.
pub fn min_info_loss_joint(
    f: &EntropyFn,
    rho: &DensityMatrix,
    cfg: &OptimizerConfig,
) -> Result<MinimizeReport> {
    cfg.validate()?;
    let (da, db) = rho.dims();
    let pa = BasisParametrization::new(da)?;
    let pb = BasisParametrization::new(db)?;
    let (na, nb) = (pa.n_params(), pb.n_params());
    let obj = |params: &[f64]| -> f64 {
        let (xa, xb) = params.split_at(na);
        let product = match ProductBasis::new(
            pa.basis(Subsystem::A, xa),
            pb.basis(Subsystem::B, xb),
        ) {
            Ok(p) => p,
            Err(_) => return f64::INFINITY,
        };
        match joint_probs(rho, &product) {
            Ok(p) => f.entropy_of_values(p.as_slice()),
            Err(_) => return f64::INFINITY,
        }
    };

    let mut seed = eigenbasis_seed(&pa, &rho.partial_trace(Subsystem::A))?;
    seed.extend(eigenbasis_seed(&pb, &rho.partial_trace(Subsystem::B))?);
    let mut starts = vec![seed];
    for r in 0..cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(
            cfg.seed ^ (r as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        );
        let mut x = pa.random_params(&mut rng);
        x.extend(pb.random_params(&mut rng));
        starts.push(x);
    }

    let canonical = |params: &[f64]| -> Vec<f64> {
        let (xa, xb) = params.split_at(na);
        let mut out = pa.canonical(xa);
        out.extend(pb.canonical(xb));
        out
    };
    let candidates: Vec<Candidate> = starts
        .par_iter()
        .map(|x0| {
            let mut x = x0.clone();
            let mut evals = 0;
            // alternating one-sided sweeps
            for _ in 0..3 {
                if nb > 0 {
                    let xa = x[..na].to_vec();
                    let sub = |yb: &[f64]| {
                        let mut z = xa.clone();
                        z.extend_from_slice(yb);
                        obj(&z)
                    };
                    let c = nelder_mead(&sub, &x[na..], SIMPLEX_STEP, cfg);
                    x[na..].copy_from_slice(&c.params);
                    evals += c.evals;
                }
                if na > 0 {
                    let xb = x[na..].to_vec();
                    let sub = |ya: &[f64]| {
                        let mut z = ya.to_vec();
                        z.extend_from_slice(&xb);
                        obj(&z)
                    };
                    let c = nelder_mead(&sub, &x[..na], SIMPLEX_STEP, cfg);
                    x[..na].copy_from_slice(&c.params);
                    evals += c.evals;
                }
            }
            let mut c = nelder_mead(&obj, &x, SIMPLEX_STEP / 4.0, cfg);
            c.evals += evals;
            c.params = canonical(&c.params);
            c
        })
        .collect();
    let best = merge_candidates(candidates, cfg.tol_value);

    let (xa, xb) = best.params.split_at(na);
    let product =
        ProductBasis::new(pa.basis(Subsystem::A, xa), pb.basis(Subsystem::B, xb))?;
    let measurement = Measurement::Joint(product);
    let report = info_loss(f, rho, &measurement)?;
    Ok(MinimizeReport {
        loss: report.loss,
        params: best.params,
        converged: best.converged,
        evaluations: best.evals,
        report,
    })
}

/// Von Neumann conditional-entropy gain of measuring `basis`'s side:
/// S(ρ′) − S(ρ′_side) − S(ρ) + S(ρ_side). Minimized over bases this is the
/// measured-side discord.
pub fn discord_at_basis(rho: &DensityMatrix, basis: &LocalBasis) -> Result<f64> {
    let f = EntropyFn::vn();
    let side = basis.subsystem();
    let blocks = outcome_blocks(rho, basis)?;
    let mut values = Vec::with_capacity(rho.dim());
    let mut probs = Vec::with_capacity(blocks.len());
    for block in &blocks {
        probs.push(block.trace().re);
        values.append(&mut hermitian_eigenvalues(block)?);
    }
    let s_marginal = f.entropy(&rho.partial_trace(side))?;
    Ok(f.entropy_of_values(&values) - f.entropy_of_values(&probs) - f.entropy(rho)? + s_marginal)
}

#[derive(Clone, Debug)]
pub struct DiscordReport {
    pub value: f64,
    pub basis: LocalBasis,
    pub params: Vec<f64>,
    pub converged: bool,
    pub evaluations: usize,
}

/// Quantum discord with the measurement on B, minimized over local bases.
pub fn quantum_discord_b(rho: &DensityMatrix, cfg: &OptimizerConfig) -> Result<DiscordReport> {
    cfg.validate()?;
    let f = EntropyFn::vn();
    let par = BasisParametrization::new(side_dim(rho, Subsystem::B))?;
    let marginal = rho.partial_trace(Subsystem::B);
    let seeds = vec![eigenbasis_seed(&par, &marginal)?];
    // constant offsets dropped from the objective, restored afterwards
    let obj = |params: &[f64]| -> f64 {
        let basis = par.basis(Subsystem::B, params);
        let blocks = match outcome_blocks(rho, &basis) {
            Ok(b) => b,
            Err(_) => return f64::INFINITY,
        };
        let mut values = Vec::with_capacity(rho.dim());
        let mut probs = Vec::with_capacity(blocks.len());
        for block in &blocks {
            probs.push(block.trace().re);
            match hermitian_eigenvalues(block) {
                Ok(mut v) => values.append(&mut v),
                Err(_) => return f64::INFINITY,
            }
        }
        f.entropy_of_values(&values) - f.entropy_of_values(&probs)
    };
    let best = optimize_basis(&par, &obj, seeds, cfg);
    let basis = par.basis(Subsystem::B, &best.params);
    let value = discord_at_basis(rho, &basis)?;
    Ok(DiscordReport {
        value,
        basis,
        params: best.params,
        converged: best.converged,
        evaluations: best.evals,
    })
}

/// Post-measurement state of the best product measurement found: the closest
/// fully classical state under the entropy F.
pub fn closest_classical_state(
    f: &EntropyFn,
    rho: &DensityMatrix,
    cfg: &OptimizerConfig,
) -> Result<DensityMatrix> {
    Ok(min_info_loss_joint(f, rho, cfg)?.report.post_state)
}
