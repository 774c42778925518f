//! Measurement application and information loss for a fixed measurement.
//!
//! Unread projective measurements pinch a state to its block diagonal,
//! ρ′ = Σ P_k ρ P_k, which never decreases any concave trace-form entropy.
//! Local measurements act on one tensor factor only; joint and conditional
//! product measurements act on both. The loss S_f(ρ′) − S_f(ρ) is the
//! quantity everything downstream minimizes.

use nalgebra::DMatrix;

use crate::entropy::EntropyFn;
use crate::qstate::{eigh, DensityMatrix, Subsystem};
use crate::{Error, Result, C64};

/// Allowed deviation from orthonormality / completeness for bases, projector
/// sets, and Kraus normalization.
pub const TOL_ORTHO: f64 = 1e-10;
/// Measured loss may dip this far below zero before it counts as a violation.
pub const TOL_LOSS: f64 = 1e-9;
/// Eigenvalue gap below which the divided difference f′ slope collapses to −f″.
pub const DEGENERACY_GAP: f64 = 1e-8;
/// Couplings at or below this are treated as exact zeros so that an infinite
/// slope weight never multiplies them (inf·0 would poison the sum with NaN).
const COUPLING_FLOOR: f64 = 1e-24;

fn cx(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn max_entry_norm(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Orthonormal basis of one subsystem; columns of `vectors` are the basis kets.
#[derive(Clone, Debug)]
pub struct LocalBasis {
    subsystem: Subsystem,
    vectors: DMatrix<C64>,
}

impl LocalBasis {
    pub fn new(subsystem: Subsystem, vectors: DMatrix<C64>) -> Result<Self> {
        let d = vectors.nrows();
        if d == 0 || vectors.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "basis must be square, got {}x{}",
                vectors.nrows(),
                vectors.ncols()
            )));
        }
        if vectors.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let gram = vectors.adjoint() * &vectors;
        let deviation = max_entry_norm(&(gram - DMatrix::<C64>::identity(d, d)));
        if deviation > TOL_ORTHO {
            return Err(Error::NonOrthonormalBasis { deviation });
        }
        Ok(LocalBasis { subsystem, vectors })
    }

    /// Standard computational basis (identity columns).
    pub fn computational(subsystem: Subsystem, d: usize) -> Self {
        LocalBasis { subsystem, vectors: DMatrix::identity(d, d) }
    }

    /// Qubit basis from Bloch angles: first vector (cos θ/2, e^{iφ} sin θ/2),
    /// second its orthogonal complement.
    pub fn bloch(subsystem: Subsystem, theta: f64, phi: f64) -> Self {
        let (s, c) = (0.5 * theta).sin_cos();
        let e = C64::new(0.0, phi).exp();
        let mut v = DMatrix::from_element(2, 2, cx(0.0, 0.0));
        v[(0, 0)] = cx(c, 0.0);
        v[(1, 0)] = e * cx(s, 0.0);
        v[(0, 1)] = -e.conj() * cx(s, 0.0);
        v[(1, 1)] = cx(c, 0.0);
        LocalBasis { subsystem, vectors: v }
    }

    pub fn subsystem(&self) -> Subsystem {
        self.subsystem
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn vectors(&self) -> &DMatrix<C64> {
        &self.vectors
    }

    /// Rank-1 projector onto the j-th basis vector.
    pub fn projector(&self, j: usize) -> DMatrix<C64> {
        let v = self.vectors.column(j);
        &v * v.adjoint()
    }
}

/// Pair of local bases defining a complete product measurement.
#[derive(Clone, Debug)]
pub struct ProductBasis {
    pub a: LocalBasis,
    pub b: LocalBasis,
}

impl ProductBasis {
    pub fn new(a: LocalBasis, b: LocalBasis) -> Result<Self> {
        if a.subsystem() != Subsystem::A || b.subsystem() != Subsystem::B {
            return Err(Error::InvalidParam(
                "product basis needs an A basis and a B basis, in that order".into(),
            ));
        }
        Ok(ProductBasis { a, b })
    }
}

/// Measurement on B followed by a measurement on A whose basis may depend on
/// the B outcome; `a_given[j]` is the A basis used after outcome j.
#[derive(Clone, Debug)]
pub struct ConditionalProductBasis {
    pub b: LocalBasis,
    pub a_given: Vec<LocalBasis>,
}

impl ConditionalProductBasis {
    pub fn new(b: LocalBasis, a_given: Vec<LocalBasis>) -> Result<Self> {
        if b.subsystem() != Subsystem::B {
            return Err(Error::InvalidParam("conditional basis measures B first".into()));
        }
        if a_given.len() != b.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} conditional A bases for {} B outcomes",
                a_given.len(),
                b.dim()
            )));
        }
        if a_given.iter().any(|ba| ba.subsystem() != Subsystem::A) {
            return Err(Error::InvalidParam("conditional bases must act on A".into()));
        }
        Ok(ConditionalProductBasis { b, a_given })
    }
}

/// Trace-preserving set of Kraus operators M_k with Σ M_k†M_k = I. The
/// bistochastic flag records whether Σ M_k M_k† = I also holds; only then is
/// the post-measurement state guaranteed more mixed than the input.
#[derive(Clone, Debug)]
pub struct KrausSet {
    ops: Vec<DMatrix<C64>>,
    bistochastic: bool,
}

impl KrausSet {
    pub fn new(ops: Vec<DMatrix<C64>>) -> Result<Self> {
        let n = match ops.first() {
            Some(m) => m.nrows(),
            None => return Err(Error::InvalidParam("empty Kraus set".into())),
        };
        if ops.iter().any(|m| m.nrows() != n || m.ncols() != n) {
            return Err(Error::DimensionMismatch("Kraus operators must be square and equal-sized".into()));
        }
        if ops.iter().any(|m| m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        let id = DMatrix::<C64>::identity(n, n);
        let mut tp = DMatrix::from_element(n, n, cx(0.0, 0.0));
        let mut unital = DMatrix::from_element(n, n, cx(0.0, 0.0));
        for m in &ops {
            tp += m.adjoint() * m;
            unital += m * m.adjoint();
        }
        let tp_dev = max_entry_norm(&(tp - &id));
        if tp_dev > TOL_ORTHO {
            return Err(Error::NotTracePreserving { deviation: tp_dev });
        }
        let bistochastic = max_entry_norm(&(unital - &id)) <= TOL_ORTHO;
        Ok(KrausSet { ops, bistochastic })
    }

    pub fn ops(&self) -> &[DMatrix<C64>] {
        &self.ops
    }

    pub fn dim(&self) -> usize {
        self.ops[0].nrows()
    }

    pub fn is_bistochastic(&self) -> bool {
        self.bistochastic
    }
}

/// Any of the supported measurement kinds, applicable to a state.
#[derive(Clone, Debug)]
pub enum Measurement {
    Projective(Vec<DMatrix<C64>>),
    Local(LocalBasis),
    Joint(ProductBasis),
    Conditional(ConditionalProductBasis),
    Kraus(KrausSet),
}

impl Measurement {
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        match self {
            Measurement::Projective(ps) => project(rho, ps),
            Measurement::Local(b) => local_measure(rho, b),
            Measurement::Joint(pb) => joint_measure(rho, pb),
            Measurement::Conditional(cb) => conditional_measure(rho, cb),
            Measurement::Kraus(k) => kraus_apply(rho, k),
        }
    }

    /// Projective in the wide sense: pinches to a block diagonal.
    pub fn is_projective(&self) -> bool {
        !matches!(self, Measurement::Kraus(_))
    }
}

/// ρ′ = Σ P_k ρ P_k for a complete set of mutually orthogonal projectors.
pub fn project(rho: &DensityMatrix, projectors: &[DMatrix<C64>]) -> Result<DensityMatrix> {
    let n = rho.dim();
    if projectors.is_empty() || projectors.iter().any(|p| p.nrows() != n || p.ncols() != n) {
        return Err(Error::DimensionMismatch(format!("projectors must be {n}x{n}")));
    }
    let mut sum = DMatrix::from_element(n, n, cx(0.0, 0.0));
    let mut ortho_dev: f64 = 0.0;
    for (k, p) in projectors.iter().enumerate() {
        sum += p;
        ortho_dev = ortho_dev.max(max_entry_norm(&(p.adjoint() - p)));
        for (kp, q) in projectors.iter().enumerate() {
            let prod = p * q;
            let expect = if k == kp { p.clone() } else { DMatrix::from_element(n, n, cx(0.0, 0.0)) };
            ortho_dev = ortho_dev.max(max_entry_norm(&(prod - expect)));
        }
    }
    if ortho_dev > TOL_ORTHO {
        return Err(Error::NonOrthogonalProjectors { deviation: ortho_dev });
    }
    let complete_dev = max_entry_norm(&(sum - DMatrix::<C64>::identity(n, n)));
    if complete_dev > TOL_ORTHO {
        return Err(Error::IncompleteProjectors { deviation: complete_dev });
    }
    let mut out = DMatrix::from_element(n, n, cx(0.0, 0.0));
    for p in projectors {
        out += p * rho.mat() * p;
    }
    Ok(DensityMatrix::from_trusted(out, rho.dims()))
}

/// Unnormalized conditional blocks of a local measurement, one per outcome.
///
/// For a basis on B, block j is N_j = (I⊗⟨b_j|) ρ (I⊗|b_j⟩), a dA×dA matrix
/// with trace q_j; for a basis on A the roles swap. The union of the block
/// spectra is exactly the spectrum of the post-measurement state, which lets
/// optimizers skip assembling (and re-diagonalizing) the full ρ′.
pub fn outcome_blocks(rho: &DensityMatrix, basis: &LocalBasis) -> Result<Vec<DMatrix<C64>>> {
    let (da, db) = rho.dims();
    let m = rho.mat();
    match basis.subsystem() {
        Subsystem::B => {
            if basis.dim() != db {
                return Err(Error::DimensionMismatch(format!(
                    "B basis dim {} vs dB = {db}",
                    basis.dim()
                )));
            }
            let mut blocks = Vec::with_capacity(db);
            for j in 0..db {
                let b = basis.vectors.column(j);
                let mut block = DMatrix::from_element(da, da, cx(0.0, 0.0));
                for i in 0..da {
                    for ip in 0..da {
                        let mut s = cx(0.0, 0.0);
                        for mm in 0..db {
                            let bm = b[mm].conj();
                            if bm.norm_sqr() == 0.0 {
                                continue;
                            }
                            let mut inner = cx(0.0, 0.0);
                            for mp in 0..db {
                                inner += m[(i * db + mm, ip * db + mp)] * b[mp];
                            }
                            s += bm * inner;
                        }
                        block[(i, ip)] = s;
                    }
                }
                blocks.push(block);
            }
            Ok(blocks)
        }
        Subsystem::A => {
            if basis.dim() != da {
                return Err(Error::DimensionMismatch(format!(
                    "A basis dim {} vs dA = {da}",
                    basis.dim()
                )));
            }
            let mut blocks = Vec::with_capacity(da);
            for i in 0..da {
                let a = basis.vectors.column(i);
                let mut block = DMatrix::from_element(db, db, cx(0.0, 0.0));
                for j in 0..db {
                    for jp in 0..db {
                        let mut s = cx(0.0, 0.0);
                        for mm in 0..da {
                            let am = a[mm].conj();
                            if am.norm_sqr() == 0.0 {
                                continue;
                            }
                            let mut inner = cx(0.0, 0.0);
                            for mp in 0..da {
                                inner += m[(mm * db + j, mp * db + jp)] * a[mp];
                            }
                            s += am * inner;
                        }
                        block[(j, jp)] = s;
                    }
                }
                blocks.push(block);
            }
            Ok(blocks)
        }
    }
}

/// ρ′ after an unread rank-1 measurement of one subsystem:
/// Σ_j N_j ⊗ |b_j⟩⟨b_j| (basis on B) or Σ_i |a_i⟩⟨a_i| ⊗ M_i (basis on A).
/// The unmeasured marginal is untouched: Tr_B ρ′ = Tr_B ρ for a B measurement.
pub fn local_measure(rho: &DensityMatrix, basis: &LocalBasis) -> Result<DensityMatrix> {
    let (da, db) = rho.dims();
    let blocks = outcome_blocks(rho, basis)?;
    let n = rho.dim();
    let mut out = DMatrix::from_element(n, n, cx(0.0, 0.0));
    match basis.subsystem() {
        Subsystem::B => {
            for (j, block) in blocks.iter().enumerate() {
                let bj = basis.vectors.column(j);
                for i in 0..da {
                    for ip in 0..da {
                        let nij = block[(i, ip)];
                        if nij.norm_sqr() == 0.0 {
                            continue;
                        }
                        for mm in 0..db {
                            for mp in 0..db {
                                out[(i * db + mm, ip * db + mp)] += nij * bj[mm] * bj[mp].conj();
                            }
                        }
                    }
                }
            }
        }
        Subsystem::A => {
            for (i, block) in blocks.iter().enumerate() {
                let ai = basis.vectors.column(i);
                for mm in 0..da {
                    for mp in 0..da {
                        let w = ai[mm] * ai[mp].conj();
                        if w.norm_sqr() == 0.0 {
                            continue;
                        }
                        for j in 0..db {
                            for jp in 0..db {
                                out[(mm * db + j, mp * db + jp)] += w * block[(j, jp)];
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(DensityMatrix::from_trusted(out, rho.dims()))
}

/// Outcome distribution p_ij = ⟨a_i b_j|ρ|a_i b_j⟩ of a product measurement,
/// returned as a dA×dB real matrix.
pub fn joint_probs(rho: &DensityMatrix, basis: &ProductBasis) -> Result<DMatrix<f64>> {
    let (da, db) = rho.dims();
    if basis.a.dim() != da || basis.b.dim() != db {
        return Err(Error::DimensionMismatch(format!(
            "product basis dims ({},{}) vs state dims ({da},{db})",
            basis.a.dim(),
            basis.b.dim()
        )));
    }
    let blocks = outcome_blocks(rho, &basis.b)?;
    let mut p = DMatrix::zeros(da, db);
    for (j, block) in blocks.iter().enumerate() {
        for i in 0..da {
            let ai = basis.a.vectors.column(i);
            let q = (ai.adjoint() * block * ai)[(0, 0)].re;
            p[(i, j)] = q.max(0.0);
        }
    }
    Ok(p)
}

/// ρ′ = Σ_ij p_ij |a_i⟩⟨a_i| ⊗ |b_j⟩⟨b_j|: diagonal in the product basis.
pub fn joint_measure(rho: &DensityMatrix, basis: &ProductBasis) -> Result<DensityMatrix> {
    let (da, db) = rho.dims();
    let p = joint_probs(rho, basis)?;
    let n = rho.dim();
    let mut out = DMatrix::from_element(n, n, cx(0.0, 0.0));
    for i in 0..da {
        let pa = basis.a.projector(i);
        for j in 0..db {
            let w = p[(i, j)];
            if w == 0.0 {
                continue;
            }
            let pb = basis.b.projector(j);
            for r in 0..da {
                for c in 0..da {
                    let arc = pa[(r, c)] * cx(w, 0.0);
                    if arc.norm_sqr() == 0.0 {
                        continue;
                    }
                    for rb in 0..db {
                        for cb in 0..db {
                            out[(r * db + rb, c * db + cb)] += arc * pb[(rb, cb)];
                        }
                    }
                }
            }
        }
    }
    Ok(DensityMatrix::from_trusted(out, rho.dims()))
}

/// Measures B in `basis.b`, then measures A in the outcome-dependent basis
/// `basis.a_given[j]`: ρ′ = Σ_ij p_ij |a_{i|j}⟩⟨a_{i|j}| ⊗ |b_j⟩⟨b_j|.
pub fn conditional_measure(
    rho: &DensityMatrix,
    basis: &ConditionalProductBasis,
) -> Result<DensityMatrix> {
    let (da, db) = rho.dims();
    if basis.b.dim() != db {
        return Err(Error::DimensionMismatch(format!(
            "B basis dim {} vs dB = {db}",
            basis.b.dim()
        )));
    }
    if basis.a_given.iter().any(|ba| ba.dim() != da) {
        return Err(Error::DimensionMismatch("conditional A bases must have dim dA".into()));
    }
    let blocks = outcome_blocks(rho, &basis.b)?;
    let n = rho.dim();
    let mut out = DMatrix::from_element(n, n, cx(0.0, 0.0));
    for (j, block) in blocks.iter().enumerate() {
        let ba = &basis.a_given[j];
        let bj = basis.b.vectors.column(j);
        for i in 0..da {
            let ai = ba.vectors.column(i);
            let pij = (ai.adjoint() * block * ai)[(0, 0)].re.max(0.0);
            if pij == 0.0 {
                continue;
            }
            for r in 0..da {
                for c in 0..da {
                    let arc = ai[r] * ai[c].conj() * cx(pij, 0.0);
                    if arc.norm_sqr() == 0.0 {
                        continue;
                    }
                    for rb in 0..db {
                        for cb in 0..db {
                            out[(r * db + rb, c * db + cb)] += arc * bj[rb] * bj[cb].conj();
                        }
                    }
                }
            }
        }
    }
    Ok(DensityMatrix::from_trusted(out, rho.dims()))
}

/// ρ′ = Σ M_k ρ M_k†. Trace preservation is guaranteed by the KrausSet
/// invariant; entropy may decrease when the set is not bistochastic.
pub fn kraus_apply(rho: &DensityMatrix, kraus: &KrausSet) -> Result<DensityMatrix> {
    let n = rho.dim();
    if kraus.dim() != n {
        return Err(Error::DimensionMismatch(format!("Kraus dim {} vs state dim {n}", kraus.dim())));
    }
    let mut out = DMatrix::from_element(n, n, cx(0.0, 0.0));
    for m in kraus.ops() {
        out += m * rho.mat() * m.adjoint();
    }
    Ok(DensityMatrix::from_trusted(out, rho.dims()))
}

/// Post-measurement state together with the entropy bookkeeping around it.
#[derive(Clone, Debug)]
pub struct InfoLossReport {
    pub post_state: DensityMatrix,
    pub s_pre: f64,
    pub s_post: f64,
    /// S_f(ρ′) − S_f(ρ); nonnegative (within TOL_LOSS) for projective and
    /// bistochastic-Kraus measurements, any sign otherwise.
    pub loss: f64,
    pub measurement: Measurement,
}

/// Information loss of a fixed measurement under the entropy F.
pub fn info_loss(
    f: &EntropyFn,
    rho: &DensityMatrix,
    measurement: &Measurement,
) -> Result<InfoLossReport> {
    let s_pre = f.entropy(rho)?;
    let post_state = measurement.apply(rho)?;
    let s_post = f.entropy(&post_state)?;
    Ok(InfoLossReport {
        s_pre,
        s_post,
        loss: s_post - s_pre,
        post_state,
        measurement: measurement.clone(),
    })
}

/// Second-order estimate of the projective information loss:
/// Σ_{j<k} w_jk |⟨j′|ρ|k′⟩|² over eigenpairs |j′⟩, p′_j of ρ′, with
/// w_jk the divided difference of −f′ (collapsing to −f″ on near-degenerate
/// pairs). Exact for the linear entropy; +∞ when a divergent slope at p′ = 0
/// meets a nonzero coupling.
pub fn perturbative_loss(
    f: &EntropyFn,
    rho: &DensityMatrix,
    measurement: &Measurement,
) -> Result<f64> {
    f.require_trace_form()?;
    if !measurement.is_projective() {
        return Err(Error::InvalidParam(
            "perturbative loss is defined for projective measurements".into(),
        ));
    }
    let post = measurement.apply(rho)?;
    let (pvals, pvecs) = eigh(post.mat())?;
    let r = pvecs.adjoint() * rho.mat() * &pvecs;
    let n = rho.dim();
    let mut total = 0.0;
    for j in 0..n {
        let pj = pvals[j].clamp(0.0, 1.0);
        for k in (j + 1)..n {
            let coupling = r[(j, k)].norm_sqr();
            if coupling <= COUPLING_FLOOR {
                continue;
            }
            let pk = pvals[k].clamp(0.0, 1.0);
            let w = if (pj - pk).abs() < DEGENERACY_GAP {
                -f.ddf(pj)
            } else {
                (f.df(pk) - f.df(pj)) / (pj - pk)
            };
            total += w * coupling;
            if total == f64::INFINITY {
                return Ok(f64::INFINITY);
            }
        }
    }
    Ok(total)
}

/// Relative entropy S(ρ‖σ) = Tr ρ(log₂ρ − log₂σ), evaluated in the eigenbasis
/// of σ with 0·log 0 = 0. Returns +∞ when ρ has weight outside the support
/// of σ. Equals the von Neumann information loss when σ is the pinching of ρ.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "relative entropy between dims {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let (svals, svecs) = eigh(sigma.mat())?;
    let mut cross = 0.0;
    for k in 0..sigma.dim() {
        let col = svecs.column(k);
        let weight = (col.adjoint() * rho.mat() * col)[(0, 0)].re.max(0.0);
        let s = svals[k].clamp(0.0, 1.0);
        if s <= 1e-14 {
            if weight > 1e-12 {
                return Ok(f64::INFINITY);
            }
        } else {
            cross -= weight * s.log2();
        }
    }
    Ok(cross - EntropyFn::vn().entropy(rho)?)
}

/// Squared Hilbert–Schmidt (Frobenius) distance ‖ρ−σ‖². The linear-entropy
/// information loss equals twice this when σ is the pinching of ρ.
pub fn hs_distance_sq(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "distance between dims {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok((rho.mat() - sigma.mat()).iter().map(|z| z.norm_sqr()).sum())
}
