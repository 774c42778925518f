//! Density matrices, kets, and spectra for bipartite systems.
//!
//! The composite index convention is |i_A⟩⊗|j_B⟩ ↦ i·dB + j everywhere;
//! monopartite objects use dims (n, 1). All values are immutable after
//! construction and every operation is a pure function.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Max entrywise deviation from Hermitian symmetry tolerated at construction.
pub const TOL_HERM: f64 = 1e-10;
/// Allowed drift of the trace / a spectrum sum from 1.
pub const TOL_TRACE: f64 = 1e-10;
/// Allowed drift of a ket norm from 1.
pub const TOL_NORM: f64 = 1e-10;
/// Eigenvalues in [−TOL_PSD, 0) are clamped to 0; anything lower rejects the state.
pub const TOL_PSD: f64 = 1e-9;

/// Which tensor factor of a bipartite system an operation targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn other(self) -> Subsystem {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }
}

fn cx(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn all_finite(m: &DMatrix<C64>) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// A pure state vector with unit norm.
#[derive(Clone, Debug)]
pub struct Ket {
    amplitudes: DVector<C64>,
}

impl Ket {
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.is_empty() || amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > TOL_NORM {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Ket { amplitudes })
    }

    /// Normalizes an arbitrary nonzero vector into a ket.
    pub fn normalized(mut amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        amplitudes /= cx(norm, 0.0);
        Ket::new(amplitudes)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    /// Amplitude of the composite basis vector |i_A⟩⊗|j_B⟩ under dims.
    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }
}

/// Computational basis ket |k⟩ of the given dimension.
pub fn computational_ket(dim: usize, k: usize) -> Ket {
    assert!(k < dim, "basis index out of range");
    let mut v = DVector::from_element(dim, cx(0.0, 0.0));
    v[k] = cx(1.0, 0.0);
    Ket { amplitudes: v }
}

/// (|00⟩ + |11⟩)/√2 on a two-qubit system.
pub fn bell_ket() -> Ket {
    let mut v = DVector::from_element(4, cx(0.0, 0.0));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    v[0] = cx(s, 0.0);
    v[3] = cx(s, 0.0);
    Ket { amplitudes: v }
}

/// √p|00⟩ + √(1−p)|11⟩ on a two-qubit system.
pub fn schmidt_ket(p: f64) -> Result<Ket> {
    schmidt_ket_from_probs(&[p, 1.0 - p], (2, 2))
}

/// Σ_k √p_k |kk⟩ for a probability list p over min(dA,dB) levels.
pub fn schmidt_ket_from_probs(probs: &[f64], dims: (usize, usize)) -> Result<Ket> {
    let (da, db) = dims;
    if probs.len() > da.min(db) {
        return Err(Error::DimensionMismatch(format!(
            "{} Schmidt terms do not fit in dims ({da},{db})",
            probs.len()
        )));
    }
    if probs.iter().any(|p| !p.is_finite() || *p < -TOL_PSD) {
        return Err(Error::InvalidParam("negative probability".into()));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::TraceDeviation { trace: sum });
    }
    let mut v = DVector::from_element(da * db, cx(0.0, 0.0));
    for (k, &p) in probs.iter().enumerate() {
        v[k * db + k] = cx(p.max(0.0).sqrt(), 0.0);
    }
    Ket::normalized(v)
}

/// JSON wire format for density matrices: row-major real/imag parts.
#[derive(Serialize, Deserialize)]
struct StateJson {
    dims: [usize; 2],
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

/// Hermitian, unit-trace, positive-semidefinite matrix with a bipartite split.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    mat: DMatrix<C64>,
    dims: (usize, usize),
}

impl DensityMatrix {
    /// Validates all state invariants (Hermiticity, trace, positivity, finiteness).
    pub fn new(mat: DMatrix<C64>, dims: (usize, usize)) -> Result<Self> {
        let n = dims.0 * dims.1;
        if dims.0 == 0 || dims.1 == 0 || mat.nrows() != n || mat.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, dims ({},{}) require {n}x{n}",
                mat.nrows(),
                mat.ncols(),
                dims.0,
                dims.1
            )));
        }
        if !all_finite(&mat) {
            return Err(Error::NonFinite);
        }
        let mut herm_dev: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                herm_dev = herm_dev.max((mat[(r, c)] - mat[(c, r)].conj()).norm());
            }
        }
        if herm_dev > TOL_HERM {
            return Err(Error::NonHermitian { deviation: herm_dev });
        }
        let trace = mat.trace().re;
        if (trace - 1.0).abs() > TOL_TRACE {
            return Err(Error::TraceDeviation { trace });
        }
        let state = DensityMatrix { mat, dims };
        let min_eig = hermitian_eigenvalues(&state.mat)?
            .last()
            .copied()
            .unwrap_or(0.0);
        if min_eig < -TOL_PSD {
            return Err(Error::NotPositive { min_eigenvalue: min_eig });
        }
        Ok(state)
    }

    /// Constructor for outputs that preserve the invariants structurally
    /// (projections, partial traces, tensor products of valid states).
    pub(crate) fn from_trusted(mat: DMatrix<C64>, dims: (usize, usize)) -> Self {
        debug_assert_eq!(mat.nrows(), dims.0 * dims.1);
        debug_assert!((mat.trace().re - 1.0).abs() < 1e-8, "trusted state trace drifted");
        DensityMatrix { mat, dims }
    }

    pub fn from_ket(psi: &Ket, dims: (usize, usize)) -> Result<Self> {
        let n = psi.dim();
        if dims.0 * dims.1 != n {
            return Err(Error::DimensionMismatch(format!(
                "ket dim {n} vs dims ({},{})",
                dims.0, dims.1
            )));
        }
        let v = psi.amplitudes();
        let mat = v * v.adjoint();
        Ok(DensityMatrix::from_trusted(mat, dims))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn mat(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn entry(&self, r: usize, c: usize) -> C64 {
        self.mat[(r, c)]
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Tr ρ², i.e. the squared Frobenius norm of a Hermitian ρ.
    pub fn purity(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Same matrix with a different bipartite split (n must factor accordingly).
    pub fn with_dims(&self, dims: (usize, usize)) -> Result<Self> {
        if dims.0 * dims.1 != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot split dim {} as ({},{})",
                self.dim(),
                dims.0,
                dims.1
            )));
        }
        Ok(DensityMatrix { mat: self.mat.clone(), dims })
    }

    /// Reduced state of the kept subsystem.
    pub fn partial_trace(&self, keep: Subsystem) -> DensityMatrix {
        let (da, db) = self.dims;
        match keep {
            Subsystem::A => {
                let mut out = DMatrix::from_element(da, da, cx(0.0, 0.0));
                for i in 0..da {
                    for ip in 0..da {
                        let mut s = cx(0.0, 0.0);
                        for j in 0..db {
                            s += self.mat[(i * db + j, ip * db + j)];
                        }
                        out[(i, ip)] = s;
                    }
                }
                DensityMatrix::from_trusted(out, (da, 1))
            }
            Subsystem::B => {
                let mut out = DMatrix::from_element(db, db, cx(0.0, 0.0));
                for j in 0..db {
                    for jp in 0..db {
                        let mut s = cx(0.0, 0.0);
                        for i in 0..da {
                            s += self.mat[(i * db + j, i * db + jp)];
                        }
                        out[(j, jp)] = s;
                    }
                }
                DensityMatrix::from_trusted(out, (db, 1))
            }
        }
    }

    /// Descending eigenvalues clamped to [0,1] and renormalized to sum 1.
    pub fn spectrum(&self) -> Result<Spectrum> {
        let vals = hermitian_eigenvalues(&self.mat)?;
        Spectrum::from_values(vals)
    }

    /// Eigen-decomposition with eigenvalues descending; columns of the returned
    /// matrix are the matching eigenvectors.
    pub fn eigen(&self) -> Result<(Vec<f64>, DMatrix<C64>)> {
        eigh(&self.mat)
    }

    /// Kronecker product; dims of the result are (self.dim, other.dim).
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mat = self.mat.kronecker(&other.mat);
        DensityMatrix::from_trusted(mat, (self.dim(), other.dim()))
    }

    pub fn to_json(&self) -> String {
        let n = self.dim();
        let mut re = vec![vec![0.0; n]; n];
        let mut im = vec![vec![0.0; n]; n];
        for r in 0..n {
            for c in 0..n {
                re[r][c] = self.mat[(r, c)].re;
                im[r][c] = self.mat[(r, c)].im;
            }
        }
        serde_json::to_string(&StateJson { dims: [self.dims.0, self.dims.1], re, im })
            .expect("state serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: StateJson = serde_json::from_str(text)?;
        let n = raw.dims[0] * raw.dims[1];
        if raw.re.len() != n
            || raw.im.len() != n
            || raw.re.iter().any(|row| row.len() != n)
            || raw.im.iter().any(|row| row.len() != n)
        {
            return Err(Error::DimensionMismatch(format!(
                "dims [{},{}] require {n}x{n} re/im arrays",
                raw.dims[0], raw.dims[1]
            )));
        }
        let mat = DMatrix::from_fn(n, n, |r, c| cx(raw.re[r][c], raw.im[r][c]));
        DensityMatrix::new(mat, (raw.dims[0], raw.dims[1]))
    }
}

/// I/n with the given split.
pub fn maximally_mixed(dims: (usize, usize)) -> DensityMatrix {
    let n = dims.0 * dims.1;
    let mat = DMatrix::from_diagonal_element(n, n, cx(1.0 / n as f64, 0.0));
    DensityMatrix::from_trusted(mat, dims)
}

/// |Φ⟩⟨Φ| for the two-qubit Bell ket (|00⟩+|11⟩)/√2.
pub fn bell_pair() -> DensityMatrix {
    DensityMatrix::from_ket(&bell_ket(), (2, 2)).expect("bell ket is well-formed")
}

/// Schmidt-correlated pure state mixed with white noise:
/// x·|ψ⟩⟨ψ| + (1−x)·I/n with |ψ⟩ = Σ √p_k |kk⟩.
pub fn schmidt_mixture(probs: &[f64], dims: (usize, usize), x: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParam(format!("mixing weight x = {x} outside [0,1]")));
    }
    let psi = schmidt_ket_from_probs(probs, dims)?;
    let pure = DensityMatrix::from_ket(&psi, dims)?;
    let n = dims.0 * dims.1;
    let mat = pure.mat() * cx(x, 0.0)
        + DMatrix::from_diagonal_element(n, n, cx((1.0 - x) / n as f64, 0.0));
    Ok(DensityMatrix::from_trusted(mat, dims))
}

/// Bell pair with partially decohered off-diagonal block:
/// z·|Φ⟩⟨Φ| + (1−z)·(|00⟩⟨00|+|11⟩⟨11|)/2. Off-diagonals scale by z while the
/// diagonal stays fixed, so z=1 is the Bell state and z=0 its classical shadow.
pub fn bell_decohered(z: f64) -> Result<DensityMatrix> {
    if !(-1.0..=1.0).contains(&z) {
        return Err(Error::InvalidParam(format!("decoherence parameter z = {z} outside [-1,1]")));
    }
    let mut mat = DMatrix::from_element(4, 4, cx(0.0, 0.0));
    mat[(0, 0)] = cx(0.5, 0.0);
    mat[(3, 3)] = cx(0.5, 0.0);
    mat[(0, 3)] = cx(z / 2.0, 0.0);
    mat[(3, 0)] = cx(z / 2.0, 0.0);
    Ok(DensityMatrix::from_trusted(mat, (2, 2)))
}

/// State diagonal in the computational product basis with joint weights p
/// (row-major over (i,j)).
pub fn classical_state(probs: &[f64], dims: (usize, usize)) -> Result<DensityMatrix> {
    let n = dims.0 * dims.1;
    if probs.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for a {n}-dimensional diagonal",
            probs.len()
        )));
    }
    let mat = DMatrix::from_diagonal(&DVector::from_iterator(n, probs.iter().map(|&p| cx(p, 0.0))));
    DensityMatrix::new(mat, dims)
}

/// Descending probability vector attached to a state or measurement outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts descending, clamps stray values into [0,1], renormalizes to sum 1.
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut min_v: f64 = f64::INFINITY;
        for v in &values {
            min_v = min_v.min(*v);
        }
        if min_v < -TOL_PSD {
            return Err(Error::NotPositive { min_eigenvalue: min_v });
        }
        for v in values.iter_mut() {
            *v = v.clamp(0.0, 1.0);
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > TOL_PSD.max(TOL_TRACE) {
            return Err(Error::TraceDeviation { trace: sum });
        }
        for v in values.iter_mut() {
            *v /= sum;
        }
        values.sort_by(|a, b| b.partial_cmp(a).expect("finite values"));
        Ok(Spectrum { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at index i, treating the list as zero-padded to any length.
    pub fn padded(&self, i: usize) -> f64 {
        self.values.get(i).copied().unwrap_or(0.0)
    }
}

/// Eigenvalues of a Hermitian matrix, descending. 1x1 and 2x2 are closed-form;
/// larger sizes go through the symmetric eigensolver.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Result<Vec<f64>> {
    let n = m.nrows();
    match n {
        1 => Ok(vec![m[(0, 0)].re]),
        2 => {
            let a = m[(0, 0)].re;
            let d = m[(1, 1)].re;
            let half = 0.5 * (a + d);
            let r = (0.25 * (a - d) * (a - d) + m[(0, 1)].norm_sqr()).sqrt();
            Ok(vec![half + r, half - r])
        }
        _ => {
            let se = m
                .clone()
                .try_symmetric_eigen(f64::EPSILON, 4096)
                .ok_or(Error::EigenFailed { n })?;
            let mut vals: Vec<f64> = se.eigenvalues.iter().copied().collect();
            vals.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
            Ok(vals)
        }
    }
}

/// Hermitian eigen-decomposition, eigenvalues descending, eigenvectors as columns.
pub fn eigh(m: &DMatrix<C64>) -> Result<(Vec<f64>, DMatrix<C64>)> {
    let n = m.nrows();
    let se = m
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 4096)
        .ok_or(Error::EigenFailed { n })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[j].partial_cmp(&se.eigenvalues[i]).expect("finite"));
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| se.eigenvectors[(r, order[c])]);
    Ok((vals, vecs))
}

/// Ket with independent complex-Gaussian amplitudes, normalized.
pub fn random_ket<R: Rng>(rng: &mut R, dim: usize) -> Ket {
    let v = DVector::from_fn(dim, |_, _| cx(gaussian(rng), gaussian(rng)));
    Ket::normalized(v).expect("gaussian vector is nonzero with probability 1")
}

/// Full-rank random state GG†/Tr(GG†) from a complex-Gaussian G.
pub fn random_density_matrix<R: Rng>(rng: &mut R, dims: (usize, usize)) -> DensityMatrix {
    let n = dims.0 * dims.1;
    let g = DMatrix::from_fn(n, n, |_, _| cx(gaussian(rng), gaussian(rng)));
    let mut m = &g * g.adjoint();
    let tr = m.trace().re;
    m /= cx(tr, 0.0);
    // symmetrize away the last bits of rounding noise
    let m = (&m + m.adjoint()) * cx(0.5, 0.0);
    DensityMatrix::from_trusted(m, dims)
}

/// Haar-distributed unitary via QR of a complex-Gaussian matrix with the
/// phases of the R diagonal absorbed into Q.
pub fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> DMatrix<C64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| cx(gaussian(rng), gaussian(rng)));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for c in 0..dim {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { cx(1.0, 0.0) };
        for row in 0..dim {
            q[(row, c)] *= phase;
        }
    }
    q
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; u1 bounded away from 0
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
