//! Generalized entropies S_f(ρ) = Tr f(ρ) and the majorization order.
//!
//! Every functional here is concave with f(0) = f(1) = 0, normalized so a
//! uniformly mixed qubit has entropy 1. Logs are base 2 throughout. Rényi is
//! carried alongside as a non-trace-form functional: it shares the entropy
//! interface but has no f, so operations that need a trace form reject it.

use std::fmt;
use std::str::FromStr;

use crate::qstate::{DensityMatrix, Spectrum};
use crate::{Error, Result};

/// Width of the window around q = 1 inside which Tsallis/Rényi collapse to
/// von Neumann (their q→1 limit) instead of dividing by ~0.
pub const Q_ONE_WINDOW: f64 = 1e-6;

const LN2: f64 = std::f64::consts::LN_2;

/// An entropy functional over spectra.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EntropyFn {
    /// f(p) = −p·log₂ p
    VonNeumann,
    /// f(p) = 2(p − p²)
    Linear,
    /// f(p) = (p − p^q)/(1 − 2^{1−q}), q > 0, q ≠ 1
    Tsallis { q: f64 },
    /// S(ρ) = log₂(Σ p^q)/(1 − q); not of trace form
    Renyi { q: f64 },
}

impl EntropyFn {
    pub fn vn() -> Self {
        EntropyFn::VonNeumann
    }

    pub fn linear() -> Self {
        EntropyFn::Linear
    }

    /// Tsallis functional of index q; q within `Q_ONE_WINDOW` of 1 dispatches
    /// to von Neumann, and q must be positive.
    pub fn tsallis(q: f64) -> Result<Self> {
        if !q.is_finite() || q <= 0.0 {
            return Err(Error::InvalidQ { q });
        }
        if (q - 1.0).abs() <= Q_ONE_WINDOW {
            return Ok(EntropyFn::VonNeumann);
        }
        Ok(EntropyFn::Tsallis { q })
    }

    /// Rényi functional of index q, with the same q→1 collapse as Tsallis.
    pub fn renyi(q: f64) -> Result<Self> {
        if !q.is_finite() || q <= 0.0 {
            return Err(Error::InvalidQ { q });
        }
        if (q - 1.0).abs() <= Q_ONE_WINDOW {
            return Ok(EntropyFn::VonNeumann);
        }
        Ok(EntropyFn::Renyi { q })
    }

    /// Whether S = Tr f(ρ) for a concave f (everything except Rényi).
    pub fn is_trace_form(&self) -> bool {
        !matches!(self, EntropyFn::Renyi { .. })
    }

    /// Rejects non-trace-form functionals for operations that need f itself.
    pub fn require_trace_form(&self) -> Result<()> {
        if self.is_trace_form() {
            Ok(())
        } else {
            Err(Error::NotTraceForm { tag: self.to_string() })
        }
    }

    /// f(p) on [0,1]. Panics on Rényi (guard with `require_trace_form`).
    pub fn f(&self, p: f64) -> f64 {
        debug_assert!((-1e-12..=1.0 + 1e-12).contains(&p), "f outside [0,1]: {p}");
        let p = p.clamp(0.0, 1.0);
        match self {
            EntropyFn::VonNeumann => {
                if p == 0.0 {
                    0.0
                } else {
                    -p * p.log2()
                }
            }
            EntropyFn::Linear => 2.0 * (p - p * p),
            EntropyFn::Tsallis { q } => (p - p.powf(*q)) / (1.0 - (1.0 - q).exp2()),
            EntropyFn::Renyi { .. } => unreachable!("Rényi has no trace form"),
        }
    }

    /// f′(p). At p = 0 the von Neumann and q<1 Tsallis slopes diverge; the
    /// IEEE +∞ that falls out is the value callers rely on.
    pub fn df(&self, p: f64) -> f64 {
        match self {
            EntropyFn::VonNeumann => {
                if p == 0.0 {
                    f64::INFINITY
                } else {
                    -(p.ln() + 1.0) / LN2
                }
            }
            EntropyFn::Linear => 2.0 - 4.0 * p,
            EntropyFn::Tsallis { q } => {
                (1.0 - q * p.powf(q - 1.0)) / (1.0 - (1.0 - q).exp2())
            }
            EntropyFn::Renyi { .. } => unreachable!("Rényi has no trace form"),
        }
    }

    /// f″(p); −∞ at p = 0 for the strictly concave-at-origin members.
    pub fn ddf(&self, p: f64) -> f64 {
        match self {
            EntropyFn::VonNeumann => {
                if p == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    -1.0 / (p * LN2)
                }
            }
            EntropyFn::Linear => -4.0,
            EntropyFn::Tsallis { q } => {
                -q * (q - 1.0) * p.powf(q - 2.0) / (1.0 - (1.0 - q).exp2())
            }
            EntropyFn::Renyi { .. } => unreachable!("Rényi has no trace form"),
        }
    }

    /// Entropy of a bare probability list (clamped into [0,1] entrywise).
    pub fn entropy_of_values(&self, values: &[f64]) -> f64 {
        match self {
            EntropyFn::Renyi { q } => {
                let s: f64 = values.iter().map(|&p| p.clamp(0.0, 1.0).powf(*q)).sum();
                // Σp^q = 0 only when every p = 0 with q > 0; not reachable for spectra
                s.log2() / (1.0 - q)
            }
            _ => values.iter().map(|&p| self.f(p.clamp(0.0, 1.0))).sum(),
        }
    }

    pub fn entropy_of_spectrum(&self, s: &Spectrum) -> f64 {
        self.entropy_of_values(s.values())
    }

    /// S_f(ρ) through the eigenvalue spectrum.
    pub fn entropy(&self, rho: &DensityMatrix) -> Result<f64> {
        Ok(self.entropy_of_spectrum(&rho.spectrum()?))
    }
}

impl fmt::Display for EntropyFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntropyFn::VonNeumann => write!(f, "vn"),
            EntropyFn::Linear => write!(f, "linear"),
            EntropyFn::Tsallis { q } => write!(f, "tsallis:{q}"),
            EntropyFn::Renyi { q } => write!(f, "renyi:{q}"),
        }
    }
}

impl FromStr for EntropyFn {
    type Err = Error;

    /// Grammar: `vn | linear | tsallis:<q> | renyi:<q>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "vn" => return Ok(EntropyFn::VonNeumann),
            "linear" => return Ok(EntropyFn::Linear),
            _ => {}
        }
        let parse_q = |text: &str| -> Result<f64> {
            text.parse::<f64>()
                .map_err(|_| Error::InvalidTag { tag: s.to_string() })
        };
        if let Some(qs) = s.strip_prefix("tsallis:") {
            return EntropyFn::tsallis(parse_q(qs)?);
        }
        if let Some(qs) = s.strip_prefix("renyi:") {
            return EntropyFn::renyi(parse_q(qs)?);
        }
        Err(Error::InvalidTag { tag: s.to_string() })
    }
}

/// Tolerance on partial sums in the majorization check.
pub const TOL_MAJ: f64 = 1e-10;

/// Whether `coarse` is majorized by `fine` (coarse ≺ fine): every descending
/// partial sum of `coarse` is ≤ the matching sum of `fine`, up to TOL_MAJ.
/// Shorter vectors are zero-padded, so lengths may differ.
pub fn majorizes(fine: &Spectrum, coarse: &Spectrum) -> bool {
    let len = fine.len().max(coarse.len());
    let mut sum_f = 0.0;
    let mut sum_c = 0.0;
    for i in 0..len {
        sum_f += fine.padded(i);
        sum_c += coarse.padded(i);
        if sum_c > sum_f + TOL_MAJ {
            return false;
        }
    }
    true
}

/// Outcome of comparing two spectra across a family of entropies.
#[derive(Clone, Debug)]
pub struct OrderingWitness {
    /// Entropy differences S_f(coarse) − S_f(fine), aligned with the family.
    pub deltas: Vec<f64>,
    /// Tags of family members whose entropy decreased beyond tolerance.
    pub violations: Vec<String>,
    /// Majorization verdict coarse ≺ fine.
    pub majorized: bool,
}

/// Checks S_f(coarse) ≥ S_f(fine) for every functional in the family and
/// records which members (if any) witness a majorization failure. When
/// coarse ≺ fine genuinely holds, `violations` must stay empty for every
/// concave f — that is the content of the ordering theorem this guards.
pub fn entropy_ordering_witness(
    family: &[EntropyFn],
    fine: &Spectrum,
    coarse: &Spectrum,
    tol: f64,
) -> OrderingWitness {
    let mut deltas = Vec::with_capacity(family.len());
    let mut violations = Vec::new();
    for f in family {
        let d = f.entropy_of_spectrum(coarse) - f.entropy_of_spectrum(fine);
        if d < -tol {
            violations.push(f.to_string());
        }
        deltas.push(d);
    }
    OrderingWitness { deltas, violations, majorized: majorizes(fine, coarse) }
}

/// Family used by default wherever a spread of concavities is wanted:
/// von Neumann, linear, and Tsallis at q = 0.5 and q = 3.
pub fn default_witness_family() -> Vec<EntropyFn> {
    vec![
        EntropyFn::VonNeumann,
        EntropyFn::Linear,
        EntropyFn::tsallis(0.5).expect("q valid"),
        EntropyFn::tsallis(3.0).expect("q valid"),
    ]
}
