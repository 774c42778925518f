//! Closed-form information-loss values for three state families, used as
//! ground truth for the basis optimizer and as figure backends:
//!
//! * a pure state with Schmidt weights p mixed with white noise (weight 1−x),
//! * the two-qubit member of that family measured at a Bloch angle θ,
//! * a Bell pair with partially decohered off-diagonals (parameter z).
//!
//! For these families the measurement minimizing the loss on B is the local
//! Schmidt basis (θ = 0), so the formulas here are exact optimizer targets.
//! The slope-condition operations locate the Tsallis index windows where the
//! minimal loss stays below the formation entanglement near the pure limit.

use crate::entangle::{
    check_formation_convexity, formation_from_concurrence, TSALLIS_FORMATION_Q_HI,
    TSALLIS_FORMATION_Q_LO,
};
use crate::entropy::EntropyFn;
use crate::qstate::{bell_decohered, schmidt_mixture, DensityMatrix, Spectrum};
use crate::{Error, Result};

/// Pure state with squared Schmidt coefficients `schmidt_probs`, mixed with
/// white noise: ρ(x) = x|ψ⟩⟨ψ| + (1−x)·I/n in total dimension n.
#[derive(Clone, Debug)]
pub struct MixtureParams {
    schmidt_probs: Spectrum,
    x: f64,
    n: usize,
}

impl MixtureParams {
    pub fn new(probs: &[f64], x: f64, n: usize) -> Result<Self> {
        let schmidt_probs = Spectrum::from_values(probs.to_vec())?;
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::InvalidParam(format!("mixing weight x = {x} outside [0,1]")));
        }
        if n < schmidt_probs.len().max(2) {
            return Err(Error::DimensionMismatch(format!(
                "total dimension {n} cannot host {} Schmidt terms",
                schmidt_probs.len()
            )));
        }
        Ok(MixtureParams { schmidt_probs, x, n })
    }

    pub fn schmidt_probs(&self) -> &Spectrum {
        &self.schmidt_probs
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Materializes the state for a bipartite split with dA·dB = n.
    pub fn state(&self, dims: (usize, usize)) -> Result<DensityMatrix> {
        if dims.0 * dims.1 != self.n {
            return Err(Error::DimensionMismatch(format!(
                "dims ({},{}) do not multiply to n = {}",
                dims.0, dims.1, self.n
            )));
        }
        schmidt_mixture(self.schmidt_probs.values(), dims, self.x)
    }
}

/// Bell pair with off-diagonal block scaled by z ∈ [−1, 1].
#[derive(Clone, Copy, Debug)]
pub struct BellDecoherenceParams {
    z: f64,
}

impl BellDecoherenceParams {
    pub fn new(z: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&z) {
            return Err(Error::InvalidParam(format!("decoherence parameter z = {z} outside [-1,1]")));
        }
        Ok(BellDecoherenceParams { z })
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn state(&self) -> DensityMatrix {
        bell_decohered(self.z).expect("z validated at construction")
    }
}

/// Minimal local-measurement loss for the noisy Schmidt mixture, reached in
/// the Schmidt basis: the measured spectrum is {x·p_k + (1−x)/n} against the
/// unmeasured {x + (1−x)/n, (1−x)/n, …}.
pub fn ifb_mixture(f: &EntropyFn, params: &MixtureParams) -> Result<f64> {
    f.require_trace_form()?;
    let x = params.x;
    let c = (1.0 - x) / params.n as f64;
    let probs = params.schmidt_probs.values();
    let mut loss = -f.f(x + c) - (probs.len() as f64 - 1.0) * f.f(c);
    for &p in probs {
        loss += f.f(x * p + c);
    }
    Ok(loss)
}

/// Loss of a local measurement on B at Bloch angle θ from the Schmidt basis,
/// for the two-qubit state x·|ψ_p⟩⟨ψ_p| + (1−x)·I/4. The subtracted terms are
/// the entropy of the unmeasured state, whose spectrum {(1+3x)/4, (1−x)/4}
/// does not depend on θ or p.
pub fn ifb_2q_angle(f: &EntropyFn, p: f64, x: f64, theta: f64) -> Result<f64> {
    f.require_trace_form()?;
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParam(format!("p = {p}, x = {x} must lie in [0,1]")));
    }
    if !theta.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut s_post = 0.0;
    for nu in [1.0, -1.0] {
        s_post += f.f(0.25 * (1.0 + x * (1.0 + 2.0 * nu * theta.cos() * (2.0 * p - 1.0))));
    }
    Ok(s_post - f.f(0.25 * (1.0 + 3.0 * x)) - f.f(0.25 * (1.0 - x)))
}

/// Minimal two-qubit loss (θ = 0 in `ifb_2q_angle`):
/// f((1+x(4p−1))/4) + f((1+x(3−4p))/4) − f((1+3x)/4) − f((1−x)/4).
pub fn ifb_2q_min(f: &EntropyFn, p: f64, x: f64) -> Result<f64> {
    f.require_trace_form()?;
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParam(format!("p = {p}, x = {x} must lie in [0,1]")));
    }
    Ok(f.f(0.25 * (1.0 + x * (4.0 * p - 1.0))) + f.f(0.25 * (1.0 + x * (3.0 - 4.0 * p)))
        - f.f(0.25 * (1.0 + 3.0 * x))
        - f.f(0.25 * (1.0 - x)))
}

/// Concurrence of the noisy two-qubit Schmidt mixture:
/// max(2x√(p(1−p)) − (1−x)/2, 0).
pub fn concurrence_mixture_2q(p: f64, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParam(format!("p = {p}, x = {x} must lie in [0,1]")));
    }
    Ok((2.0 * x * (p * (1.0 - p)).sqrt() - 0.5 * (1.0 - x)).max(0.0))
}

/// Mixing weight below which the two-qubit mixture's concurrence vanishes:
/// x_c = 1/(1 + 4√(p(1−p))).
pub fn concurrence_mixture_threshold(p: f64) -> f64 {
    1.0 / (1.0 + 4.0 * (p * (1.0 - p)).sqrt())
}

/// Mixing weight at which the noisy mixture's partial transpose first goes
/// negative: x_c = 1/(1 + n√(p₁p₂)) for the two largest Schmidt weights.
pub fn negativity_mixture_threshold(p1: f64, p2: f64, n: usize) -> f64 {
    1.0 / (1.0 + n as f64 * (p1 * p2).sqrt())
}

/// Minimal local loss for the partially decohered Bell pair:
/// 1 − f((1+z)/2) − f((1−z)/2), increasing and convex on z ∈ [0,1].
pub fn ifb_bell_decoherence(f: &EntropyFn, z: f64) -> Result<f64> {
    f.require_trace_form()?;
    let params = BellDecoherenceParams::new(z)?;
    let z = params.z.abs();
    Ok(1.0 - f.f(0.5 * (1.0 + z)) - f.f(0.5 * (1.0 - z)))
}

/// State family whose pure limit anchors a slope comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SlopeExample {
    /// Noisy two-qubit Schmidt mixture with weights (p, 1−p), pure limit x→1.
    Mixture { p: f64 },
    /// Decohered Bell pair, pure limit z→1.
    Bell,
}

/// Whether the minimal loss approaches its pure limit more slowly than the
/// formation entanglement, so that E > I_f just below the limit. Compares
/// one-sided derivatives at the limit: loss slope < formation slope.
/// Divergent f′(0) (von Neumann, Tsallis q < 1) makes the loss slope +∞ and
/// the condition fail automatically.
pub fn slope_condition_holds(f: &EntropyFn, example: SlopeExample) -> Result<bool> {
    f.require_trace_form()?;
    let h = match example {
        SlopeExample::Bell => f.df(0.0) - f.df(1.0) + f.ddf(0.5),
        SlopeExample::Mixture { p } => {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidParam(format!(
                    "slope comparison needs p strictly inside (0,1), got {p}"
                )));
            }
            let p = p.max(1.0 - p);
            if (p - 0.5).abs() <= 1e-9 {
                // balanced weights: the formation slope limit is −(3/4)f″(1/2)
                0.25 * (f.df(0.0) + 2.0 * f.df(0.5) - 3.0 * f.df(1.0)) + 0.75 * f.ddf(0.5)
            } else {
                let s = (p * (1.0 - p)).sqrt();
                let loss_slope = 0.25
                    * ((4.0 * p - 1.0) * f.df(p) + (3.0 - 4.0 * p) * f.df(1.0 - p)
                        - 3.0 * f.df(1.0)
                        + f.df(0.0));
                let formation_slope =
                    (2.0 * s + 0.5) * (s / (2.0 * p - 1.0)) * (f.df(1.0 - p) - f.df(p));
                loss_slope - formation_slope
            }
        }
    };
    Ok(h < 0.0)
}

/// Tsallis index window (within the formation-convexity interval) on which
/// the slope condition holds, located by bisection to ~1e-5 in q.
pub fn slope_condition_q_interval(example: SlopeExample) -> Result<(f64, f64)> {
    if let SlopeExample::Mixture { p } = example {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParam(format!(
                "slope comparison needs p strictly inside (0,1), got {p}"
            )));
        }
    }
    let holds = |q: f64| match EntropyFn::tsallis(q) {
        Ok(f) => slope_condition_holds(&f, example).unwrap_or(false),
        Err(_) => false,
    };
    let inside = 2.5;
    if !holds(inside) {
        return Err(Error::InvalidParam(
            "slope condition does not hold anywhere near q = 2.5; no interval to bracket".into(),
        ));
    }
    let bisect = |mut good: f64, mut bad: f64| {
        for _ in 0..40 {
            let mid = 0.5 * (good + bad);
            if holds(mid) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        0.5 * (good + bad)
    };
    let lo = bisect(inside, TSALLIS_FORMATION_Q_LO + 1e-9);
    let hi = bisect(inside, TSALLIS_FORMATION_Q_HI - 1e-9);
    Ok((lo, hi))
}

/// Formation entanglement of the noisy two-qubit mixture, for comparing
/// against `ifb_2q_min` on the same family.
pub fn formation_mixture_2q(f: &EntropyFn, p: f64, x: f64) -> Result<f64> {
    check_formation_convexity(f)?;
    formation_from_concurrence(f, concurrence_mixture_2q(p, x)?)
}
