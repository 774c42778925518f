//! Entanglement baselines: Schmidt decomposition, entanglement entropy,
//! two-qubit concurrence and formation entanglement, negativity, the
//! separability purity ball, and pure-state LOCC convertibility.

use nalgebra::DMatrix;

use crate::entropy::{majorizes, EntropyFn};
use crate::qstate::{eigh, hermitian_eigenvalues, DensityMatrix, Ket, Spectrum};
use crate::{Error, Result, C64};

/// Squared Schmidt coefficients below this count as zero for the Schmidt number.
pub const TOL_SCHMIDT: f64 = 1e-12;

/// Tsallis indices inside this open interval keep the two-qubit formation
/// formula convex in the concurrence; they are the roots of q² − 5q + 3.
pub const TSALLIS_FORMATION_Q_LO: f64 = 0.6972243622680054; // (5 − √13)/2
pub const TSALLIS_FORMATION_Q_HI: f64 = 4.302775637731995; // (5 + √13)/2

fn cx(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Schmidt form of a bipartite pure state: |ψ⟩ = Σ_k √p_k |a_k⟩⊗|b_k⟩ with
/// orthonormal vector sets on each side and p descending.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    /// Squared Schmidt coefficients, descending, summing to 1.
    pub coefficients: Spectrum,
    /// Schmidt vectors of A as columns, aligned with `coefficients`.
    pub vectors_a: DMatrix<C64>,
    /// Schmidt vectors of B as columns, aligned with `coefficients`.
    pub vectors_b: DMatrix<C64>,
    /// Count of coefficients above TOL_SCHMIDT; 1 means a product state.
    pub schmidt_number: usize,
}

impl SchmidtDecomposition {
    /// Σ_k √p_k |a_k⟩⊗|b_k⟩ as a raw amplitude vector (for verification).
    pub fn reconstruct(&self) -> nalgebra::DVector<C64> {
        let da = self.vectors_a.nrows();
        let db = self.vectors_b.nrows();
        let mut v = nalgebra::DVector::from_element(da * db, cx(0.0, 0.0));
        for (k, &p) in self.coefficients.values().iter().enumerate() {
            let w = cx(p.sqrt(), 0.0);
            for i in 0..da {
                for j in 0..db {
                    v[i * db + j] += w * self.vectors_a[(i, k)] * self.vectors_b[(j, k)];
                }
            }
        }
        v
    }
}

/// Schmidt decomposition via SVD of the dA×dB amplitude matrix.
pub fn schmidt(psi: &Ket, dims: (usize, usize)) -> Result<SchmidtDecomposition> {
    let (da, db) = dims;
    if da * db != psi.dim() {
        return Err(Error::DimensionMismatch(format!(
            "ket dim {} vs dims ({da},{db})",
            psi.dim()
        )));
    }
    let coeff = DMatrix::from_fn(da, db, |i, j| psi.amplitude(i * db + j));
    let r = da.min(db);
    let svd = coeff
        .try_svd(true, true, f64::EPSILON, 4096)
        .ok_or(Error::EigenFailed { n: da.max(db) })?;
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    // order columns by singular value, descending
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| {
        svd.singular_values[j]
            .partial_cmp(&svd.singular_values[i])
            .expect("finite singular values")
    });
    let mut probs = Vec::with_capacity(r);
    let mut vectors_a = DMatrix::from_element(da, r, cx(0.0, 0.0));
    let mut vectors_b = DMatrix::from_element(db, r, cx(0.0, 0.0));
    for (col, &k) in order.iter().enumerate() {
        let s = svd.singular_values[k];
        probs.push((s * s).clamp(0.0, 1.0));
        for i in 0..da {
            vectors_a[(i, col)] = u[(i, k)];
        }
        // C = UΣV† means the B-side Schmidt vectors are the conjugated rows of V†
        for j in 0..db {
            vectors_b[(j, col)] = vt[(k, j)];
        }
    }
    let schmidt_number = probs.iter().filter(|&&p| p > TOL_SCHMIDT).count();
    Ok(SchmidtDecomposition {
        coefficients: Spectrum::from_values(probs)?,
        vectors_a,
        vectors_b,
        schmidt_number,
    })
}

/// Entropy of either reduced state of a pure state: Σ_k f(p_k) over the
/// squared Schmidt coefficients (the marginal spectra coincide).
pub fn entanglement_entropy(f: &EntropyFn, psi: &Ket, dims: (usize, usize)) -> Result<f64> {
    let sd = schmidt(psi, dims)?;
    Ok(f.entropy_of_spectrum(&sd.coefficients))
}

fn spin_flip_conjugation() -> DMatrix<C64> {
    // (σ_y⊗σ_y) is the real antidiagonal (−1, 1, 1, −1)
    let mut y = DMatrix::from_element(4, 4, cx(0.0, 0.0));
    y[(0, 3)] = cx(-1.0, 0.0);
    y[(1, 2)] = cx(1.0, 0.0);
    y[(2, 1)] = cx(1.0, 0.0);
    y[(3, 0)] = cx(-1.0, 0.0);
    y
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dims() != (2, 2) {
        return Err(Error::DimensionMismatch(format!(
            "two-qubit operation on dims ({},{})",
            rho.dims().0,
            rho.dims().1
        )));
    }
    Ok(())
}

/// Descending square roots of the eigenvalues of ρρ̃ via the general
/// (non-Hermitian) eigensolver.
fn flip_spectrum_direct(rho: &DensityMatrix) -> Option<Vec<f64>> {
    let y = spin_flip_conjugation();
    let conj = rho.mat().map(|z| z.conj());
    let tilde = &y * conj * &y;
    let m = rho.mat() * tilde;
    let eigs = m.eigenvalues()?;
    let mut vals: Vec<f64> = eigs.iter().map(|z| z.re.max(0.0).sqrt()).collect();
    vals.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    Some(vals)
}

/// Same spectrum through a Hermitian route: eigenvalues of √ρ·ρ̃·√ρ.
fn flip_spectrum_hermitian(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let (vals, vecs) = eigh(rho.mat())?;
    let root = DMatrix::from_fn(4, 4, |r, c| {
        let mut s = cx(0.0, 0.0);
        for k in 0..4 {
            s += vecs[(r, k)] * cx(vals[k].max(0.0).sqrt(), 0.0) * vecs[(c, k)].conj();
        }
        s
    });
    let y = spin_flip_conjugation();
    let conj = rho.mat().map(|z| z.conj());
    let tilde = &y * conj * &y;
    let m = &root * tilde * &root;
    let mut out: Vec<f64> = hermitian_eigenvalues(&m)?
        .into_iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    out.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    Ok(out)
}

/// Two-qubit concurrence: max(0, λ₁−λ₂−λ₃−λ₄) over the descending square
/// roots of the eigenvalues of ρ·(σ_y⊗σ_y)ρ*(σ_y⊗σ_y).
pub fn concurrence_2q(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    let lam = match flip_spectrum_direct(rho) {
        Some(v) => v,
        None => flip_spectrum_hermitian(rho)?,
    };
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).max(0.0))
}

/// Rejects functionals for which the two-qubit formation formula is not a
/// convex function of the concurrence.
pub fn check_formation_convexity(f: &EntropyFn) -> Result<()> {
    f.require_trace_form()?;
    match f {
        EntropyFn::Tsallis { q } => {
            if *q > TSALLIS_FORMATION_Q_LO && *q < TSALLIS_FORMATION_Q_HI {
                Ok(())
            } else {
                Err(Error::NonConvexFunctional {
                    tag: f.to_string(),
                    lo: TSALLIS_FORMATION_Q_LO,
                    hi: TSALLIS_FORMATION_Q_HI,
                })
            }
        }
        // von Neumann is the q→1 member, linear the q=2 member: both interior
        _ => Ok(()),
    }
}

/// E(C) = Σ_{ν=±} f((1 + ν√(1−C²))/2): the entanglement a pure two-qubit
/// state of concurrence C carries, extended to mixed states by convexity.
pub fn formation_from_concurrence(f: &EntropyFn, c: f64) -> Result<f64> {
    check_formation_convexity(f)?;
    if !(0.0..=1.0 + 1e-12).contains(&c) {
        return Err(Error::InvalidParam(format!("concurrence {c} outside [0,1]")));
    }
    let root = (1.0 - (c * c).min(1.0)).max(0.0).sqrt();
    Ok(f.f(0.5 * (1.0 + root)) + f.f(0.5 * (1.0 - root)))
}

/// Two-qubit entanglement of formation under the entropy F.
pub fn eof_2q(f: &EntropyFn, rho: &DensityMatrix) -> Result<f64> {
    let c = concurrence_2q(rho)?;
    formation_from_concurrence(f, c)
}

fn formation_is_convex(q: f64, grid: usize) -> bool {
    let f = match EntropyFn::tsallis(q) {
        Ok(f) => f,
        Err(_) => return false,
    };
    let h = 1.0 / grid as f64;
    let e = |c: f64| {
        let root = (1.0 - c * c).max(0.0).sqrt();
        f.f(0.5 * (1.0 + root)) + f.f(0.5 * (1.0 - root))
    };
    for i in 1..grid {
        let c = i as f64 * h;
        let second = e(c + h) - 2.0 * e(c) + e(c - h);
        if second < -1e-12 {
            return false;
        }
    }
    true
}

/// Numerically locates the Tsallis index interval on which the formation
/// formula stays convex in C, by scanning the sign of its second difference
/// and bisecting the two boundaries. Cross-validates the closed-form
/// constants used by the convexity gate.
pub fn convexity_interval() -> (f64, f64) {
    let grid = 2000;
    let bisect = |mut inside: f64, mut outside: f64| {
        for _ in 0..40 {
            let mid = 0.5 * (inside + outside);
            if formation_is_convex(mid, grid) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        0.5 * (inside + outside)
    };
    let lo = bisect(2.0, 0.05);
    let hi = bisect(2.0, 8.0);
    (lo, hi)
}

/// Partial transpose over subsystem B; generally not a state.
fn partial_transpose_b(rho: &DensityMatrix) -> DMatrix<C64> {
    let (da, db) = rho.dims();
    let m = rho.mat();
    DMatrix::from_fn(da * db, da * db, |r, c| {
        let (i, j) = (r / db, r % db);
        let (ip, jp) = (c / db, c % db);
        m[(i * db + jp, ip * db + j)]
    })
}

/// Negativity: total weight of the negative eigenvalues of ρ^{T_B}.
/// Zero for every separable state; positive negativity certifies entanglement.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    let pt = partial_transpose_b(rho);
    let vals = hermitian_eigenvalues(&pt)?;
    Ok(vals.iter().filter(|&&v| v < 0.0).map(|v| -v).sum())
}

/// Purity-ball separability test: Tr(ρ − I/n)² ≤ 1/(n(n−1)) guarantees the
/// state is separable. One-sided — false only means the test is inconclusive.
pub fn separable_ball(rho: &DensityMatrix) -> bool {
    let n = rho.dim() as f64;
    rho.purity() - 1.0 / n <= 1.0 / (n * (n - 1.0)) + 1e-12
}

/// Whether |ψ₁⟩ can be turned into |ψ₂⟩ by local operations and classical
/// communication: true iff the Schmidt spectrum of ψ₁ is majorized by that
/// of ψ₂.
pub fn locc_convertible(psi1: &Ket, psi2: &Ket, dims: (usize, usize)) -> Result<bool> {
    let p1 = schmidt(psi1, dims)?.coefficients;
    let p2 = schmidt(psi2, dims)?.coefficients;
    Ok(majorizes(&p2, &p1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{
        bell_decohered, bell_ket, bell_pair, classical_state, computational_ket, maximally_mixed,
        random_density_matrix, random_ket, schmidt_ket, schmidt_ket_from_probs, schmidt_mixture,
        DensityMatrix, Subsystem,
    };
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn product_ket(dims: (usize, usize), i: usize, j: usize) -> Ket {
        let a = computational_ket(dims.0, i);
        let b = computational_ket(dims.1, j);
        let v = nalgebra::DVector::from_fn(dims.0 * dims.1, |k, _| {
            a.amplitude(k / dims.1) * b.amplitude(k % dims.1)
        });
        Ket::new(v).unwrap()
    }

    #[test]
    fn schmidt_of_product_state_has_number_one() {
        let sd = schmidt(&product_ket((2, 3), 1, 2), (2, 3)).unwrap();
        assert_eq!(sd.schmidt_number, 1);
        assert_abs_diff_eq!(sd.coefficients.values()[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn schmidt_of_bell_is_uniform() {
        let sd = schmidt(&bell_ket(), (2, 2)).unwrap();
        assert_eq!(sd.schmidt_number, 2);
        assert_abs_diff_eq!(sd.coefficients.values()[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(sd.coefficients.values()[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn schmidt_of_two_term_state_recovers_weights_and_basis() {
        let sd = schmidt(&schmidt_ket(0.9).unwrap(), (2, 2)).unwrap();
        assert_abs_diff_eq!(sd.coefficients.values()[0], 0.9, epsilon = 1e-12);
        assert_abs_diff_eq!(sd.coefficients.values()[1], 0.1, epsilon = 1e-12);
        // Schmidt vectors are the computational basis up to phase
        for k in 0..2 {
            assert_abs_diff_eq!(sd.vectors_a.column(k)[k].norm(), 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(sd.vectors_b.column(k)[k].norm(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn schmidt_reconstruction_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for dims in [(2, 2), (2, 3), (3, 2), (4, 4)] {
            let psi = random_ket(&mut rng, dims.0 * dims.1);
            let sd = schmidt(&psi, dims).unwrap();
            let rec = sd.reconstruct();
            assert!((rec - psi.amplitudes()).norm() < 1e-9);
            // Schmidt vectors orthonormal on both sides
            let r = dims.0.min(dims.1);
            let ga = sd.vectors_a.adjoint() * &sd.vectors_a;
            let gb = sd.vectors_b.adjoint() * &sd.vectors_b;
            assert!((ga - DMatrix::<C64>::identity(r, r)).norm() < 1e-10);
            assert!((gb - DMatrix::<C64>::identity(r, r)).norm() < 1e-10);
        }
    }

    #[test]
    fn entanglement_entropy_examples() {
        assert_abs_diff_eq!(
            entanglement_entropy(&EntropyFn::linear(), &product_ket((2, 2), 0, 1), (2, 2)).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            entanglement_entropy(&EntropyFn::linear(), &bell_ket(), (2, 2)).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            entanglement_entropy(&EntropyFn::linear(), &schmidt_ket(0.9).unwrap(), (2, 2)).unwrap(),
            0.36,
            epsilon = 1e-12
        );
    }

    #[test]
    fn entanglement_entropy_equals_marginal_entropy() {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        let psi = random_ket(&mut rng, 6);
        let rho = DensityMatrix::from_ket(&psi, (2, 3)).unwrap();
        let ra = rho.partial_trace(Subsystem::A);
        for f in crate::entropy::default_witness_family() {
            assert_abs_diff_eq!(
                entanglement_entropy(&f, &psi, (2, 3)).unwrap(),
                f.entropy(&ra).unwrap(),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn concurrence_examples() {
        // separable product state
        let sep = maximally_mixed((2, 1)).tensor(&maximally_mixed((2, 1)));
        assert_abs_diff_eq!(concurrence_2q(&sep).unwrap(), 0.0, epsilon = 1e-10);
        // uniform two-term state at half noise: 2x·√(p(1−p)) − (1−x)/2
        let rho = schmidt_mixture(&[0.5, 0.5], (2, 2), 0.5).unwrap();
        assert_abs_diff_eq!(concurrence_2q(&rho).unwrap(), 0.25, epsilon = 1e-10);
        // partially decohered Bell pair: C = |z|
        let rho = bell_decohered(0.6).unwrap();
        assert_abs_diff_eq!(concurrence_2q(&rho).unwrap(), 0.6, epsilon = 1e-10);
        assert_abs_diff_eq!(concurrence_2q(&bell_pair()).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn concurrence_closed_form_for_noisy_two_term_states() {
        // the general eigensolver resolves near-degenerate roots of ρρ̃ to
        // about √ε, so concurrence carries ~1e-8 of noise
        for p in [0.5, 0.7, 0.9] {
            for x in [0.0, 0.2, 0.5, 0.8, 1.0] {
                let rho = schmidt_mixture(&[p, 1.0 - p], (2, 2), x).unwrap();
                let expect = (2.0 * x * (p * (1.0 - p)).sqrt() - (1.0 - x) / 2.0).max(0.0);
                assert_abs_diff_eq!(concurrence_2q(&rho).unwrap(), expect, epsilon = 5e-8);
            }
        }
    }

    #[test]
    fn concurrence_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(107);
        for _ in 0..8 {
            let rho = random_density_matrix(&mut rng, (2, 2));
            let direct = flip_spectrum_direct(&rho).expect("general eigensolver available");
            let herm = flip_spectrum_hermitian(&rho).unwrap();
            for (a, b) in direct.iter().zip(&herm) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn formation_examples() {
        assert_abs_diff_eq!(
            formation_from_concurrence(&EntropyFn::vn(), 0.0).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            formation_from_concurrence(&EntropyFn::vn(), 1.0).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        // quadratic and cubic members collapse to C² exactly
        for c in [0.0, 0.3, 0.5, 0.77, 1.0] {
            for q in [2.0, 3.0] {
                let f = EntropyFn::tsallis(q).unwrap();
                assert_abs_diff_eq!(
                    formation_from_concurrence(&f, c).unwrap(),
                    c * c,
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn eof_tsallis_two_is_squared_concurrence() {
        let mut rng = ChaCha8Rng::seed_from_u64(109);
        let f = EntropyFn::tsallis(2.0).unwrap();
        for _ in 0..6 {
            let rho = random_density_matrix(&mut rng, (2, 2));
            let c = concurrence_2q(&rho).unwrap();
            assert_abs_diff_eq!(eof_2q(&f, &rho).unwrap(), c * c, epsilon = 1e-12);
        }
    }

    #[test]
    fn eof_of_decohered_bell_matches_binary_formula() {
        let f = EntropyFn::vn();
        for z in [0.0, 0.3, 0.6, 1.0] {
            let rho = bell_decohered(z).unwrap();
            let root = (1.0 - z * z).sqrt();
            let expect = f.f(0.5 * (1.0 + root)) + f.f(0.5 * (1.0 - root));
            assert_abs_diff_eq!(eof_2q(&f, &rho).unwrap(), expect, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(eof_2q(&f, &bell_pair()).unwrap(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn formation_rejects_indices_outside_convex_window() {
        for q in [0.5, 5.0, 0.69, 4.31] {
            let f = EntropyFn::tsallis(q).unwrap();
            match check_formation_convexity(&f) {
                Err(Error::NonConvexFunctional { lo, hi, .. }) => {
                    assert_abs_diff_eq!(lo, TSALLIS_FORMATION_Q_LO, epsilon = 1e-12);
                    assert_abs_diff_eq!(hi, TSALLIS_FORMATION_Q_HI, epsilon = 1e-12);
                }
                other => panic!("q={q} should be rejected, got {other:?}"),
            }
        }
        for q in [0.71, 1.0, 2.0, 3.0, 4.29] {
            assert!(check_formation_convexity(&EntropyFn::tsallis(q).unwrap()).is_ok());
        }
        assert!(matches!(
            check_formation_convexity(&EntropyFn::renyi(2.0).unwrap()),
            Err(Error::NotTraceForm { .. })
        ));
    }

    #[test]
    fn numeric_convexity_scan_brackets_the_closed_form_roots() {
        let (lo, hi) = convexity_interval();
        assert_abs_diff_eq!(lo, TSALLIS_FORMATION_Q_LO, epsilon = 0.01);
        assert_abs_diff_eq!(hi, TSALLIS_FORMATION_Q_HI, epsilon = 0.01);
        assert!(formation_is_convex(2.0, 2000));
        assert!(!formation_is_convex(5.0, 2000));
    }

    #[test]
    fn negativity_examples() {
        let sep = classical_state(&[0.4, 0.1, 0.2, 0.3], (2, 2)).unwrap();
        assert_abs_diff_eq!(negativity(&sep).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(negativity(&bell_pair()).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn negativity_threshold_for_noisy_uniform_mixture() {
        // entangled iff x > 1/3 for the uniform two-term state in dimension 4
        let xc = 1.0 / 3.0;
        let below = schmidt_mixture(&[0.5, 0.5], (2, 2), xc - 0.01).unwrap();
        assert!(negativity(&below).unwrap() < 1e-12);
        let above = schmidt_mixture(&[0.5, 0.5], (2, 2), xc + 0.01).unwrap();
        assert!(negativity(&above).unwrap() > 1e-4);
    }

    #[test]
    fn negativity_threshold_for_skewed_mixture() {
        // x_c = 1/(1 + n√(p₁p₂)) with n = 4, p = (0.9, 0.1)
        let xc = 1.0 / (1.0 + 4.0 * (0.9f64 * 0.1).sqrt());
        assert_abs_diff_eq!(xc, 1.0 / 2.2, epsilon = 1e-15);
        let below = schmidt_mixture(&[0.9, 0.1], (2, 2), xc - 0.01).unwrap();
        assert!(negativity(&below).unwrap() < 1e-12);
        let above = schmidt_mixture(&[0.9, 0.1], (2, 2), xc + 0.01).unwrap();
        assert!(negativity(&above).unwrap() > 1e-5);
    }

    #[test]
    fn purity_ball_examples() {
        assert!(separable_ball(&maximally_mixed((2, 2))));
        assert!(!separable_ball(&bell_pair()));
        // boundary of the ball for the noisy mixture family: x = 1/(n−1)
        let boundary = schmidt_mixture(&[0.5, 0.5], (2, 2), 1.0 / 3.0).unwrap();
        assert!(separable_ball(&boundary));
        let outside = schmidt_mixture(&[0.5, 0.5], (2, 2), 1.0 / 3.0 + 1e-3).unwrap();
        assert!(!separable_ball(&outside));
    }

    #[test]
    fn locc_conversion_follows_majorization() {
        let bell = bell_ket();
        let skew = schmidt_ket(0.7).unwrap();
        let product = product_ket((2, 2), 0, 0);
        assert!(locc_convertible(&bell, &skew, (2, 2)).unwrap());
        assert!(locc_convertible(&bell, &product, (2, 2)).unwrap());
        assert!(!locc_convertible(&skew, &bell, (2, 2)).unwrap());
        assert!(!locc_convertible(&product, &bell, (2, 2)).unwrap());
        // self-conversion always allowed
        assert!(locc_convertible(&skew, &skew, (2, 2)).unwrap());
    }

    #[test]
    fn mixing_schmidt_weights_never_lowers_entanglement() {
        let mut rng = ChaCha8Rng::seed_from_u64(113);
        for _ in 0..6 {
            let raw: f64 = rand::Rng::random(&mut rng);
            let p = 0.5 + 0.5 * raw; // p ≥ 1/2
            let t: f64 = rand::Rng::random(&mut rng);
            // mixing toward uniform: (p', 1-p') with p' between 1/2 and p
            let pm = 0.5 + t * (p - 0.5);
            let psi_sharp = schmidt_ket(p).unwrap();
            let psi_mixed = schmidt_ket(pm).unwrap();
            for f in crate::entropy::default_witness_family() {
                let e_sharp = entanglement_entropy(&f, &psi_sharp, (2, 2)).unwrap();
                let e_mixed = entanglement_entropy(&f, &psi_mixed, (2, 2)).unwrap();
                assert!(
                    e_mixed >= e_sharp - 1e-12,
                    "{f}: mixing lowered entanglement ({e_mixed} < {e_sharp})"
                );
            }
        }
    }

    #[test]
    fn entanglement_rankings_agree_across_entropies_for_qubit_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(127);
        for _ in 0..10 {
            let psi1 = random_ket(&mut rng, 4);
            let psi2 = random_ket(&mut rng, 4);
            let vn1 = entanglement_entropy(&EntropyFn::vn(), &psi1, (2, 2)).unwrap();
            let vn2 = entanglement_entropy(&EntropyFn::vn(), &psi2, (2, 2)).unwrap();
            let l1 = entanglement_entropy(&EntropyFn::linear(), &psi1, (2, 2)).unwrap();
            let l2 = entanglement_entropy(&EntropyFn::linear(), &psi2, (2, 2)).unwrap();
            if (vn1 - vn2).abs() > 1e-9 {
                assert_eq!(vn1 > vn2, l1 > l2, "orderings diverged: vn {vn1} vs {vn2}, linear {l1} vs {l2}");
            }
        }
    }

    #[test]
    fn wrong_dimensions_rejected() {
        let rho = maximally_mixed((3, 2));
        assert!(matches!(concurrence_2q(&rho), Err(Error::DimensionMismatch(_))));
        assert!(matches!(
            eof_2q(&EntropyFn::vn(), &rho),
            Err(Error::DimensionMismatch(_))
        ));
        let psi = schmidt_ket_from_probs(&[0.6, 0.4], (2, 3)).unwrap();
        assert!(matches!(
            schmidt(&psi, (2, 2)),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
