//! Truncated Fock-space states.
//!
//! Single-mode states live on the basis `|0>, ..., |n_trunc - 1>`. Two-mode
//! states use row-major ordering: basis index `i1 * n2 + i2` labels
//! `|i1>|i2>`, so the first mode is the major index.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used for coherent amplitudes and matrix entries.
pub type ComplexAmplitude = Complex64;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-8;
pub const PSD_TOL: f64 = 1e-8;
const NORM_TOL: f64 = 1e-12;
const CLAMP_TOL: f64 = 1e-10;

pub(crate) fn check_finite(z: Complex64, what: &'static str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// `ln k!` for `k = 0..n`, accumulated as a running sum of logarithms.
pub fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut acc = 0.0_f64;
    for k in 0..n {
        if k > 1 {
            acc += (k as f64).ln();
        }
        out.push(acc);
    }
    out
}

/// `ln n!` for a single `n`.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Truncation that keeps the Poisson tail of `|alpha>` below ~1e-10.
pub fn suggested_truncation(alpha_abs: f64) -> usize {
    let a = alpha_abs.abs();
    (a * a + 8.0 * a + 10.0).ceil() as usize
}

/// Pure state coefficients on a truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coefficients: Vec<Complex64>,
}

impl FockVector {
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidTruncation { got: 0, min: 1 });
        }
        for c in &coefficients {
            check_finite(*c, "Fock vector")?;
        }
        let v = FockVector { coefficients };
        let norm = v.norm_sqr();
        if norm > 1.0 + NORM_TOL {
            return Err(Error::InvalidTrace(norm));
        }
        Ok(v)
    }

    /// Number state `|n>`.
    pub fn basis(n: usize, n_trunc: usize) -> Result<Self> {
        if n >= n_trunc {
            return Err(Error::InvalidTruncation {
                got: n_trunc,
                min: n + 1,
            });
        }
        let mut c = vec![Complex64::new(0.0, 0.0); n_trunc];
        c[n] = Complex64::new(1.0, 0.0);
        Ok(FockVector { coefficients: c })
    }

    pub fn n_trunc(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let s = 1.0 / n.sqrt();
        Ok(FockVector {
            coefficients: self.coefficients.iter().map(|c| c * s).collect(),
        })
    }
}

/// Coherent state `|alpha>` truncated to `n_trunc` levels.
///
/// Coefficients are `exp(-|a|^2/2) a^k / sqrt(k!)`, evaluated in log space so
/// that large `k` neither overflows nor underflows prematurely.
pub fn coherent_fock_vector(alpha: ComplexAmplitude, n_trunc: usize) -> Result<FockVector> {
    if n_trunc == 0 {
        return Err(Error::InvalidTruncation { got: 0, min: 1 });
    }
    check_finite(alpha, "coherent amplitude")?;
    let r = alpha.norm();
    if r == 0.0 {
        return FockVector::basis(0, n_trunc);
    }
    let ln_r = r.ln();
    let theta = alpha.arg();
    let half_mean = 0.5 * r * r;
    let coefficients = ln_factorials(n_trunc)
        .into_iter()
        .enumerate()
        .map(|(k, lf)| {
            let k = k as f64;
            let modulus = (-half_mean + k * ln_r - 0.5 * lf).exp();
            Complex64::from_polar(modulus, k * theta)
        })
        .collect();
    Ok(FockVector { coefficients })
}

/// Exact inner product `<gamma'|gamma>` of two coherent states.
pub fn coherent_overlap(
    gamma: ComplexAmplitude,
    gamma_prime: ComplexAmplitude,
) -> Result<ComplexAmplitude> {
    check_finite(gamma, "gamma")?;
    check_finite(gamma_prime, "gamma'")?;
    Ok(overlap(gamma, gamma_prime))
}

/// `exp(-(|g|^2 + |g'|^2)/2 + conj(g') g)` as one exponential.
///
/// Swapping the arguments yields the exact complex conjugate.
pub(crate) fn overlap(gamma: Complex64, gamma_prime: Complex64) -> Complex64 {
    let cross = gamma_prime.conj() * gamma;
    let log_mod = -0.5 * (gamma.norm_sqr() + gamma_prime.norm_sqr()) + cross.re;
    let m = log_mod.exp();
    let phase = cross.im;
    // odd symmetry by construction, so swapped arguments conjugate exactly
    let s = if phase < 0.0 {
        -(-phase).sin()
    } else {
        phase.sin()
    };
    Complex64::new(m * phase.cos(), m * s)
}

/// Density matrix on a truncated single- or two-mode Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
    mode_dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates Hermiticity, positivity and a trace in `(0, 1 + 1e-8]`.
    ///
    /// Truncated states may carry slightly less than unit trace; use
    /// [`DensityMatrix::normalized`] to restore it.
    pub fn new(entries: DMatrix<Complex64>, mode_dims: Vec<usize>) -> Result<Self> {
        let rho = Self::unchecked(entries, mode_dims)?;
        rho.validate()?;
        Ok(rho)
    }

    fn unchecked(entries: DMatrix<Complex64>, mode_dims: Vec<usize>) -> Result<Self> {
        if mode_dims.is_empty() || mode_dims.len() > 2 || mode_dims.contains(&0) {
            return Err(Error::InvalidTruncation { got: 0, min: 1 });
        }
        let dim: usize = mode_dims.iter().product();
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: entries.nrows().max(entries.ncols()),
            });
        }
        for z in entries.iter() {
            check_finite(*z, "density matrix")?;
        }
        Ok(DensityMatrix { entries, mode_dims })
    }

    fn validate(&self) -> Result<()> {
        let h = self.hermiticity_defect();
        if h > HERMITIAN_TOL {
            return Err(Error::NotHermitian(h));
        }
        let tr = self.trace();
        if !(tr > 0.0 && tr <= 1.0 + TRACE_TOL) {
            return Err(Error::InvalidTrace(tr));
        }
        let lmin = self.min_eigenvalue();
        if lmin < -PSD_TOL {
            return Err(Error::NotPositive(lmin));
        }
        Ok(())
    }

    /// `|psi><psi|` for a single-mode pure state.
    pub fn from_pure(psi: &FockVector) -> Self {
        let v = nalgebra::DVector::from_column_slice(psi.coefficients());
        DensityMatrix {
            entries: &v * v.adjoint(),
            mode_dims: vec![psi.n_trunc()],
        }
    }

    /// `|psi><psi|` for a two-mode pure state in row-major ordering.
    pub fn from_pure_two_mode(psi: &FockVector, dims: [usize; 2]) -> Result<Self> {
        if psi.n_trunc() != dims[0] * dims[1] {
            return Err(Error::DimensionMismatch {
                expected: dims[0] * dims[1],
                got: psi.n_trunc(),
            });
        }
        let mut rho = Self::from_pure(psi);
        rho.mode_dims = dims.to_vec();
        Ok(rho)
    }

    pub fn fock(n: usize, n_trunc: usize) -> Result<Self> {
        Ok(Self::from_pure(&FockVector::basis(n, n_trunc)?))
    }

    pub fn coherent(alpha: ComplexAmplitude, n_trunc: usize) -> Result<Self> {
        Ok(Self::from_pure(&coherent_fock_vector(alpha, n_trunc)?))
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidTruncation { got: 0, min: 1 });
        }
        let entries = DMatrix::from_diagonal_element(d, d, Complex64::new(1.0 / d as f64, 0.0));
        Ok(DensityMatrix {
            entries,
            mode_dims: vec![d],
        })
    }

    /// Scales an unnormalized positive operator to unit trace and validates it.
    pub fn from_unnormalized(entries: DMatrix<Complex64>, mode_dims: Vec<usize>) -> Result<Self> {
        let mut rho = Self::unchecked(entries, mode_dims)?;
        let tr = rho.trace();
        if tr.is_nan() || tr <= 0.0 {
            return Err(Error::InvalidTrace(tr));
        }
        rho.entries /= Complex64::new(tr, 0.0);
        rho.validate()?;
        Ok(rho)
    }

    pub fn normalized(&self) -> Self {
        let tr = self.trace();
        DensityMatrix {
            entries: &self.entries / Complex64::new(tr, 0.0),
            mode_dims: self.mode_dims.clone(),
        }
    }

    /// `self ⊗ other`, with `self` as the major mode.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        if self.mode_dims.len() != 1 {
            return Err(Error::NotSingleMode(self.mode_dims.len()));
        }
        if other.mode_dims.len() != 1 {
            return Err(Error::NotSingleMode(other.mode_dims.len()));
        }
        Ok(DensityMatrix {
            entries: self.entries.kronecker(&other.entries),
            mode_dims: vec![self.dim(), other.dim()],
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn mode_dims(&self) -> &[usize] {
        &self.mode_dims
    }

    pub fn n_modes(&self) -> usize {
        self.mode_dims.len()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.entries[(i, j)] - self.entries[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        // symmetrize so the eigensolver sees an exactly Hermitian input
        let h = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Diagonal of a single-mode `rho`, with round-off negativity clamped to zero.
pub fn photon_number_distribution(rho: &DensityMatrix) -> Result<Vec<f64>> {
    if rho.n_modes() != 1 {
        return Err(Error::NotSingleMode(rho.n_modes()));
    }
    diagonal_populations(rho)
}

pub(crate) fn diagonal_populations(rho: &DensityMatrix) -> Result<Vec<f64>> {
    rho.entries
        .diagonal()
        .iter()
        .enumerate()
        .map(|(index, z)| {
            if z.re < -CLAMP_TOL {
                Err(Error::NegativePopulation { index, value: z.re })
            } else {
                Ok(z.re.max(0.0))
            }
        })
        .collect()
}

/// `<psi|rho|psi> / (<psi|psi> tr rho)`.
pub fn fidelity_with_pure(rho: &DensityMatrix, psi: &FockVector) -> Result<f64> {
    if psi.n_trunc() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: psi.n_trunc(),
        });
    }
    let norm = psi.norm_sqr();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let v = nalgebra::DVector::from_column_slice(psi.coefficients());
    let expectation = (v.adjoint() * &rho.entries * &v)[(0, 0)].re;
    Ok(expectation / (norm * rho.trace()))
}

/// `tr(rho^2)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    // tr(rho rho^H) for Hermitian rho
    rho.entries.iter().map(|z| z.norm_sqr()).sum()
}

/// Reduced state of mode `keep_mode` of a two-mode `rho`.
pub fn partial_trace(rho: &DensityMatrix, keep_mode: usize) -> Result<DensityMatrix> {
    if rho.n_modes() != 2 {
        return Err(Error::NotTwoMode(rho.n_modes()));
    }
    let (n1, n2) = (rho.mode_dims[0], rho.mode_dims[1]);
    let entries = match keep_mode {
        0 => DMatrix::from_fn(n1, n1, |i, ip| {
            (0..n2)
                .map(|j| rho.entries[(i * n2 + j, ip * n2 + j)])
                .sum()
        }),
        1 => DMatrix::from_fn(n2, n2, |j, jp| {
            (0..n1)
                .map(|i| rho.entries[(i * n2 + j, i * n2 + jp)])
                .sum()
        }),
        k => return Err(Error::InvalidModeIndex(k)),
    };
    let dims = vec![entries.nrows()];
    DensityMatrix::new(entries, dims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_from_zero_amplitude() {
        let v = coherent_fock_vector(c(0.0, 0.0), 4).unwrap();
        assert_eq!(
            v.coefficients(),
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        );
    }

    #[test]
    fn rejects_bad_coherent_inputs() {
        assert!(matches!(
            coherent_fock_vector(c(1.0, 0.0), 0),
            Err(Error::InvalidTruncation { .. })
        ));
        assert!(matches!(
            coherent_fock_vector(c(f64::NAN, 0.0), 4),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn coherent_norm_matches_poisson_sum() {
        // direct Poisson summation with a term recurrence
        let mut term = (-9.0_f64).exp();
        let mut total = 0.0;
        for k in 0..64 {
            total += term;
            term *= 9.0 / (k + 1) as f64;
        }
        let v = coherent_fock_vector(c(3.0, 0.0), 64).unwrap();
        assert!((v.norm_sqr() - total).abs() < 1e-14);
        assert!(v.norm_sqr() >= 1.0 - 1e-12);
    }

    #[test]
    fn equal_peaks_for_superposition_amplitude() {
        let beta = 6720.0_f64.powf(0.2).sqrt();
        let v = coherent_fock_vector(c(beta, 0.0), 40).unwrap();
        let cs = v.coefficients();
        assert!((cs[3].norm() - cs[8].norm()).abs() < 1e-10);
    }

    #[test]
    fn large_photon_numbers_stay_finite() {
        let v = coherent_fock_vector(c(15.0, 2.0), 400).unwrap();
        assert!(v
            .coefficients()
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite()));
        assert!((v.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overlap_trivial_cases() {
        let g = c(0.7, -1.3);
        assert!((coherent_overlap(g, g).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let o = coherent_overlap(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((o - c((-0.5_f64).exp(), 0.0)).norm() < 1e-15);
        assert!(coherent_overlap(c(f64::INFINITY, 0.0), g).is_err());
    }

    #[test]
    fn overlap_matches_truncated_sum() {
        // second pair has Im(conj(g') g) = 6 > pi
        for (g, gp) in [(c(1.0, 1.0), c(2.0, 0.0)), (c(2.0, 2.0), c(2.0, -1.0))] {
            check_overlap_against_sum(g, gp);
        }
    }

    fn check_overlap_against_sum(g: Complex64, gp: Complex64) {
        // independent recurrence expansion, no log-factorials
        let expand = |z: Complex64| {
            let mut v = vec![c((-0.5 * z.norm_sqr()).exp(), 0.0)];
            for k in 1..80 {
                let prev = v[k - 1];
                v.push(prev * z / (k as f64).sqrt());
            }
            v
        };
        let (a, b) = (expand(g), expand(gp));
        let sum: Complex64 = a.iter().zip(&b).map(|(x, y)| y.conj() * x).sum();
        assert!((coherent_overlap(g, gp).unwrap() - sum).norm() < 1e-10);
    }

    #[test]
    fn distribution_reads_diagonal() {
        let rho = DensityMatrix::fock(0, 5).unwrap();
        assert_eq!(
            photon_number_distribution(&rho).unwrap(),
            vec![1.0, 0.0, 0.0, 0.0, 0.0]
        );

        let mut m = DMatrix::zeros(10, 10);
        m[(3, 3)] = c(0.5, 0.0);
        m[(8, 8)] = c(0.5, 0.0);
        let rho = DensityMatrix::new(m, vec![10]).unwrap();
        let p = photon_number_distribution(&rho).unwrap();
        assert_eq!(p[3], 0.5);
        assert_eq!(p[8], 0.5);
        assert_eq!(p.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn distribution_rejects_two_mode() {
        let a = DensityMatrix::fock(0, 2).unwrap();
        let ab = a.tensor(&a).unwrap();
        assert_eq!(
            photon_number_distribution(&ab),
            Err(Error::NotSingleMode(2))
        );
    }

    #[test]
    fn fidelity_cases() {
        let rho = DensityMatrix::fock(2, 5).unwrap();
        assert_eq!(
            fidelity_with_pure(&rho, &FockVector::basis(2, 5).unwrap()).unwrap(),
            1.0
        );
        assert_eq!(
            fidelity_with_pure(&rho, &FockVector::basis(4, 5).unwrap()).unwrap(),
            0.0
        );
        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        let f = fidelity_with_pure(&mixed, &FockVector::basis(1, 4).unwrap()).unwrap();
        assert!((f - 0.25).abs() < 1e-15);
        let zero = FockVector::new(vec![c(0.0, 0.0); 4]).unwrap();
        assert_eq!(fidelity_with_pure(&mixed, &zero), Err(Error::ZeroNorm));
    }

    #[test]
    fn purity_cases() {
        let pure = DensityMatrix::coherent(c(1.2, 0.4), 30)
            .unwrap()
            .normalized();
        assert!((purity(&pure) - 1.0).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(7).unwrap();
        assert!((purity(&mixed) - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 0)] = c(1.0, 0.0);
        m[(0, 1)] = c(0.3, 0.0);
        assert!(matches!(
            DensityMatrix::new(m.clone(), vec![2]),
            Err(Error::NotHermitian(_))
        ));
        m[(1, 0)] = c(0.3, 0.0);
        assert!(matches!(
            DensityMatrix::new(m.clone(), vec![2]),
            Err(Error::NotPositive(_))
        ));
        let m = DMatrix::from_diagonal_element(2, 2, c(0.8, 0.0));
        assert!(matches!(
            DensityMatrix::new(m, vec![2]),
            Err(Error::InvalidTrace(_))
        ));
    }

    #[test]
    fn product_state_marginal() {
        let sigma = DensityMatrix::coherent(c(0.5, 0.2), 6)
            .unwrap()
            .normalized();
        let mix = DensityMatrix::maximally_mixed(3).unwrap();
        let joint = sigma.tensor(&mix).unwrap();
        let back = partial_trace(&joint, 0).unwrap();
        assert!((back.entries() - sigma.entries())
            .iter()
            .all(|z| z.norm() < 1e-12));
        let other = partial_trace(&joint, 1).unwrap();
        assert!((other.entries() - mix.entries())
            .iter()
            .all(|z| z.norm() < 1e-12));
        assert_eq!(partial_trace(&joint, 2), Err(Error::InvalidModeIndex(2)));
        assert_eq!(partial_trace(&sigma, 0), Err(Error::NotTwoMode(1)));
    }

    #[test]
    fn bell_like_marginal() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // |0,1> + |1,0> with dims [2, 2]
        let psi = FockVector::new(vec![c(0.0, 0.0), c(s, 0.0), c(s, 0.0), c(0.0, 0.0)]).unwrap();
        let rho = DensityMatrix::from_pure_two_mode(&psi, [2, 2]).unwrap();
        let m = partial_trace(&rho, 0).unwrap();
        assert!((m.get(0, 0).re - 0.5).abs() < 1e-15);
        assert!((m.get(1, 1).re - 0.5).abs() < 1e-15);
        assert!(m.get(0, 1).norm() < 1e-15);
    }

    fn random_two_mode(seed: u64, n1: usize, n2: usize) -> DensityMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let d = n1 * n2;
        let g = DMatrix::from_fn(d, d, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let m = &g * g.adjoint();
        DensityMatrix::from_unnormalized(m, vec![n1, n2]).unwrap()
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn partial_trace_matches_index_contraction() {
        let rho = random_two_mode(7, 3, 4);
        // brute-force contraction over an explicit 4-index tensor view
        let mut reduced = [[c(0.0, 0.0); 3]; 3];
        for i in 0..3 {
            for ip in 0..3 {
                for j in 0..4 {
                    for jp in 0..4 {
                        if j == jp {
                            reduced[i][ip] += rho.get(i * 4 + j, ip * 4 + jp);
                        }
                    }
                }
            }
        }
        let pt = partial_trace(&rho, 0).unwrap();
        for i in 0..3 {
            for ip in 0..3 {
                assert!((pt.get(i, ip) - reduced[i][ip]).norm() < 1e-14);
            }
        }
        assert!((pt.trace() - rho.trace()).abs() < 1e-10);
    }

    proptest! {
        #[test]
        fn overlap_is_conjugate_symmetric(a in -4.0..4.0f64, b in -4.0..4.0f64,
                                          x in -4.0..4.0f64, y in -4.0..4.0f64) {
            let g = c(a, b);
            let gp = c(x, y);
            prop_assert_eq!(overlap(g, gp), overlap(gp, g).conj());
        }

        #[test]
        fn coherent_norm_is_monotone(a in 0.0..5.0f64, phase in 0.0..6.3f64, n in 1usize..60) {
            let alpha = Complex64::from_polar(a, phase);
            let short = coherent_fock_vector(alpha, n).unwrap().norm_sqr();
            let long = coherent_fock_vector(alpha, n + 1).unwrap().norm_sqr();
            prop_assert!(long >= short);
            prop_assert!(long <= 1.0 + 1e-12);
        }

        #[test]
        fn marginals_are_valid_states(seed in 0u64..1000, n1 in 1usize..5, n2 in 1usize..5) {
            let rho = random_two_mode(seed, n1, n2);
            for keep in 0..2 {
                let m = partial_trace(&rho, keep).unwrap();
                prop_assert!((m.trace() - 1.0).abs() < 1e-10);
                prop_assert!(m.hermiticity_defect() <= HERMITIAN_TOL);
                prop_assert!(m.min_eigenvalue() >= -PSD_TOL);
            }
        }
    }
}
