//! Conditional state preparation by ON-click post-selection.
//!
//! The pump `|alpha>` enters cavity port a1, port a2 is vacuum, and the signal
//! `nu` couples to the cavity through the Kerr phase. For each signal photon
//! number `s` the cavity outputs coherent states `|alpha kappa(phi_s)>` in b1
//! and `|alpha e^{i phi_s} sigma(phi_s)>` in b2. Tracing b1 and projecting b2
//! on the ON outcome of an efficiency-`eta` detector leaves
//!
//! ```text
//! rho_out[s, s'] ∝ nu[s, s'] * <a_s'|a_s> * Tr[Pi_ON |g_s><g_s'|]
//! ```
//!
//! with `Tr[Pi_ON |g><g'|] = <g'|g> (1 - exp(-eta conj(g') g))`. No mode is
//! truncated except the signal.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cavity::{comb, kappa, phase_shift, sigma, CavityParams, KerrMedia};
use crate::error::{Error, Result};
use crate::fock::{
    check_finite, ln_factorial, overlap, ComplexAmplitude, DensityMatrix, FockVector,
};

/// Success probabilities below this leave the conditional state undefined.
pub const MIN_P_ON: f64 = 1e-300;

/// Which ON-outcome factor the engine evaluates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterMode {
    /// Exact trace of `Pi_ON` against the coherent b2 components.
    #[default]
    Exact,
    /// Drops the relative phase `e^{i(phi_s - phi_s')}` inside the detector
    /// factor, i.e. uses `1 - exp(-eta |alpha|^2 sigma_s conj(sigma_s'))`.
    /// Only off-diagonal elements differ from [`FilterMode::Exact`].
    PaperLiteral,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterInput {
    pub nu: DensityMatrix,
    pub alpha: ComplexAmplitude,
    pub params: CavityParams,
    pub n_trunc: usize,
}

impl FilterInput {
    pub fn new(nu: DensityMatrix, alpha: ComplexAmplitude, params: CavityParams) -> Result<Self> {
        if nu.n_modes() != 1 {
            return Err(Error::NotSingleMode(nu.n_modes()));
        }
        check_finite(alpha, "alpha")?;
        params.validate()?;
        let n_trunc = nu.dim();
        Ok(FilterInput {
            nu,
            alpha,
            params,
            n_trunc,
        })
    }

    fn check(&self) -> Result<()> {
        if self.nu.n_modes() != 1 {
            return Err(Error::NotSingleMode(self.nu.n_modes()));
        }
        if self.n_trunc != self.nu.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.nu.dim(),
                got: self.n_trunc,
            });
        }
        check_finite(self.alpha, "alpha")?;
        self.params.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FilterWarning {
    /// `n*` is not an integer, so no photon number sits on a comb tooth.
    OffComb { n_star: f64 },
}

impl fmt::Display for FilterWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterWarning::OffComb { n_star } => {
                write!(f, "n* = {n_star} is not an integer; output is off-comb")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalResult {
    pub rho_out: DensityMatrix,
    pub p_on: f64,
    /// Trace of the unnormalized conditional operator; equals `p_on`.
    pub normalizer: f64,
    pub warnings: Vec<FilterWarning>,
}

/// `e^z - 1` without cancellation for small `|z|`.
fn exp_m1(z: Complex64) -> Complex64 {
    let half = (0.5 * z.im).sin();
    let re = z.re.exp_m1() * z.im.cos() - 2.0 * half * half;
    let im = z.re.exp() * z.im.sin();
    Complex64::new(re, im)
}

/// Unnormalized conditional operator for basis states with round-trip phases `phases`.
fn filter_kernel(
    nu: &DMatrix<Complex64>,
    phases: &[f64],
    alpha: Complex64,
    tau: f64,
    eta: f64,
    mode: FilterMode,
) -> DMatrix<Complex64> {
    let n = phases.len();
    let sig: Vec<Complex64> = phases.iter().map(|&p| sigma(p, tau)).collect();
    let reflected: Vec<Complex64> = phases.iter().map(|&p| alpha * kappa(p, tau)).collect();
    let transmitted: Vec<Complex64> = phases
        .iter()
        .zip(&sig)
        .map(|(&p, &s)| alpha * Complex64::from_polar(1.0, p) * s)
        .collect();
    let pump = alpha.norm_sqr();

    let mut out = DMatrix::zeros(n, n);
    for s in 0..n {
        for sp in s..n {
            let weight = nu[(s, sp)];
            if weight == Complex64::new(0.0, 0.0) {
                continue;
            }
            let trace_b1 = overlap(reflected[s], reflected[sp]);
            let (g, gp) = (transmitted[s], transmitted[sp]);
            let click_exponent = match mode {
                FilterMode::Exact => -eta * gp.conj() * g,
                FilterMode::PaperLiteral => -eta * pump * sig[s] * sig[sp].conj(),
            };
            let on = -overlap(g, gp) * exp_m1(click_exponent);
            let v = weight * trace_b1 * on;
            if sp == s {
                out[(s, s)] = Complex64::new(v.re, 0.0);
            } else {
                out[(s, sp)] = v;
                out[(sp, s)] = v.conj();
            }
        }
    }
    out
}

fn finish(
    unnormalized: DMatrix<Complex64>,
    mode_dims: Vec<usize>,
    warnings: Vec<FilterWarning>,
) -> Result<ConditionalResult> {
    let p_on: f64 = unnormalized.diagonal().iter().map(|z| z.re).sum();
    if p_on.is_nan() || p_on < MIN_P_ON {
        return Err(Error::NeverClicks { p_on });
    }
    let rho_out = DensityMatrix::from_unnormalized(unnormalized, mode_dims)?;
    Ok(ConditionalResult {
        rho_out,
        p_on: p_on.min(1.0),
        normalizer: p_on,
        warnings,
    })
}

fn comb_warnings(params: &CavityParams) -> Vec<FilterWarning> {
    let c = comb(params);
    match c.integer_n_star() {
        Some(_) => Vec::new(),
        None => vec![FilterWarning::OffComb { n_star: c.n_star }],
    }
}

/// Conditional signal state after an ON click, exact detector factor.
pub fn conditional_output(input: &FilterInput) -> Result<ConditionalResult> {
    conditional_output_with(input, FilterMode::Exact)
}

pub fn conditional_output_with(input: &FilterInput, mode: FilterMode) -> Result<ConditionalResult> {
    input.check()?;
    if input.params.n_kerr != KerrMedia::One {
        return Err(Error::KerrCount(1));
    }
    let p = &input.params;
    let phases: Vec<f64> = (0..input.n_trunc).map(|s| phase_shift(s, p)).collect();
    let m = filter_kernel(input.nu.entries(), &phases, input.alpha, p.tau, p.eta, mode);
    finish(m, vec![input.n_trunc], comb_warnings(p))
}

/// Probability of an ON click, `sum_k nu_kk (1 - exp(-eta |alpha|^2 |sigma(phi_k)|^2))`.
pub fn success_probability(input: &FilterInput) -> f64 {
    let p = &input.params;
    let pump = input.alpha.norm_sqr();
    input
        .nu
        .entries()
        .diagonal()
        .iter()
        .enumerate()
        .map(|(k, nu_kk)| {
            let t = sigma(phase_shift(k, p), p.tau).norm_sqr();
            nu_kk.re * -(-p.eta * pump * t).exp_m1()
        })
        .sum()
}

/// Target superposition `(|n*> + e^{i Phi}|n* + l*>)/sqrt(2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionSpec {
    pub n_star: usize,
    pub l_star: usize,
    #[serde(default)]
    pub phase: f64,
}

impl SuperpositionSpec {
    pub fn target_state(&self, n_trunc: usize) -> Result<FockVector> {
        let top = self.n_star + self.l_star;
        if top >= n_trunc {
            return Err(Error::InvalidTruncation {
                got: n_trunc,
                min: top + 1,
            });
        }
        let mut c = vec![Complex64::new(0.0, 0.0); n_trunc];
        let h = std::f64::consts::FRAC_1_SQRT_2;
        c[self.n_star] = Complex64::new(h, 0.0);
        c[top] = Complex64::from_polar(h, self.phase);
        FockVector::new(c)
    }

    /// Cavity whose comb is `n* + k l*`.
    pub fn cavity_params(&self, tau: f64, eta: f64) -> Result<CavityParams> {
        CavityParams::from_comb(
            self.l_star as f64,
            self.n_star as f64,
            tau,
            eta,
            KerrMedia::One,
        )
    }
}

/// Coherent signal amplitude `beta` that gives equal weight to `|n*>` and `|n*+l*>`.
///
/// `|beta|^2 = ((n*+l*)! / n*!)^(1/l*)` and `arg beta = Phi / l*`.
pub fn design_superposition(spec: &SuperpositionSpec) -> Result<ComplexAmplitude> {
    if spec.l_star == 0 {
        return Err(Error::InvalidParameter {
            name: "l_star",
            value: 0.0,
        });
    }
    if !spec.phase.is_finite() {
        return Err(Error::InvalidParameter {
            name: "phase",
            value: spec.phase,
        });
    }
    let l = spec.l_star as f64;
    let ln_ratio = ln_factorial(spec.n_star + spec.l_star) - ln_factorial(spec.n_star);
    let modulus = (0.5 * ln_ratio / l).exp();
    Ok(Complex64::from_polar(modulus, spec.phase / l))
}

/// Conditional two-mode state with both signals passing through their own Kerr medium.
pub fn two_mode_conditional_output(
    nu1: &DensityMatrix,
    nu2: &DensityMatrix,
    alpha: ComplexAmplitude,
    params: &CavityParams,
    mode: FilterMode,
) -> Result<ConditionalResult> {
    if params.n_kerr != KerrMedia::Two {
        return Err(Error::KerrCount(2));
    }
    params.validate()?;
    check_finite(alpha, "alpha")?;
    let nu = nu1.tensor(nu2)?;
    let (n1, n2) = (nu1.dim(), nu2.dim());
    let phases: Vec<f64> = (0..n1 * n2)
        .map(|idx| phase_shift(idx / n2 + idx % n2, params))
        .collect();
    let m = filter_kernel(nu.entries(), &phases, alpha, params.tau, params.eta, mode);
    finish(m, vec![n1, n2], comb_warnings(params))
}

/// Unnormalized `sum_k psi1_k psi2_{n*-k} |k>|n*-k>` on the `psi1 ⊗ psi2` grid.
pub fn entangled_target(psi1: &FockVector, psi2: &FockVector, n_star: usize) -> Result<FockVector> {
    let (n1, n2) = (psi1.n_trunc(), psi2.n_trunc());
    let mut c = vec![Complex64::new(0.0, 0.0); n1 * n2];
    for k in 0..=n_star {
        let j = n_star - k;
        if k < n1 && j < n2 {
            c[k * n2 + j] = psi1.coefficients()[k] * psi2.coefficients()[j];
        }
    }
    FockVector::new(c)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::fock::{
        coherent_fock_vector, fidelity_with_pure, photon_number_distribution, purity,
    };
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn superposition_input(tau: f64, eta: f64, alpha: f64) -> FilterInput {
        let spec = SuperpositionSpec {
            n_star: 3,
            l_star: 5,
            phase: 0.0,
        };
        let beta = design_superposition(&spec).unwrap();
        let nu = DensityMatrix::coherent(beta, 40).unwrap();
        FilterInput::new(nu, c(alpha, 0.0), spec.cavity_params(tau, eta).unwrap()).unwrap()
    }

    /// Success probability straight from Poisson weights.
    fn poisson_p_on(mean: f64, n: usize, params: &CavityParams, pump: f64) -> f64 {
        let mut w = (-mean).exp();
        let mut total = 0.0;
        for k in 0..n {
            let phi = -params.chi_t * k as f64 + params.psi;
            let e = c(phi.cos(), phi.sin());
            let s = params.tau / (1.0 - (1.0 - params.tau) * e);
            total += w * (1.0 - (-params.eta * pump * s.norm_sqr()).exp());
            w *= mean / (k + 1) as f64;
        }
        total
    }

    #[test]
    fn fock_state_passes_unchanged() {
        let nu = DensityMatrix::fock(4, 10).unwrap();
        let p = CavityParams::single(0.3, 0.7, 1.1, 0.4).unwrap();
        let r = conditional_output(&FilterInput::new(nu.clone(), c(2.0, 1.0), p).unwrap()).unwrap();
        assert_eq!(r.rho_out.entries(), nu.entries());
    }

    #[test]
    fn qeff_success_probabilities() {
        let hi = conditional_output(&superposition_input(0.2, 1.0, 8.0)).unwrap();
        let lo = conditional_output(&superposition_input(0.2, 0.01, 8.0)).unwrap();
        assert!((hi.p_on - 0.789).abs() <= 0.02, "{}", hi.p_on);
        assert!((lo.p_on - 0.106).abs() <= 0.02, "{}", lo.p_on);

        let input = superposition_input(0.2, 1.0, 8.0);
        let mean = design_superposition(&SuperpositionSpec {
            n_star: 3,
            l_star: 5,
            phase: 0.0,
        })
        .unwrap()
        .norm_sqr();
        let oracle = poisson_p_on(mean, 40, &input.params, 64.0);
        assert!((hi.p_on - oracle).abs() < 1e-12);
    }

    #[test]
    fn fockprod_peaks_at_eight() {
        let nu = DensityMatrix::coherent(c(3.0, 0.0), 40).unwrap();
        let p = CavityParams::single(0.01, 0.05, 0.4, 0.1).unwrap();
        let r = conditional_output(&FilterInput::new(nu, c(3.0, 0.0), p).unwrap()).unwrap();
        let dist = photon_number_distribution(&r.rho_out).unwrap();
        let argmax = (0..dist.len())
            .max_by(|&a, &b| dist[a].total_cmp(&dist[b]))
            .unwrap();
        assert_eq!(argmax, 8);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn never_clicks_is_an_error() {
        let nu = DensityMatrix::coherent(c(1.0, 0.0), 10).unwrap();
        let p = CavityParams::single(0.1, 0.3, 0.0, 0.0).unwrap();
        let input = FilterInput::new(nu, c(3.0, 0.0), p).unwrap();
        assert_eq!(success_probability(&input), 0.0);
        assert!(matches!(
            conditional_output(&input),
            Err(Error::NeverClicks { .. })
        ));
    }

    #[test]
    fn success_probability_tends_to_comb_weight() {
        let nu = DensityMatrix::coherent(c(2.0, 0.0), 40).unwrap();
        let p = CavityParams::from_comb(5.0, 3.0, 1e-4, 1.0, KerrMedia::One).unwrap();
        let input = FilterInput::new(nu, c(10.0, 0.0), p).unwrap();
        let mut w = (-4.0_f64).exp();
        let mut comb_weight = 0.0;
        for k in 0..40 {
            if k % 5 == 3 {
                comb_weight += w;
            }
            w *= 4.0 / (k + 1) as f64;
        }
        assert!((success_probability(&input) - comb_weight).abs() < 1e-3);
    }

    #[test]
    fn on_peak_fock_clicks_almost_surely() {
        let nu = DensityMatrix::fock(3, 6).unwrap();
        let p = CavityParams::from_comb(5.0, 3.0, 0.1, 0.5, KerrMedia::One).unwrap();
        let input = FilterInput::new(nu, c(10.0, 0.0), p).unwrap();
        let expected = 1.0 - (-0.5_f64 * 100.0).exp();
        assert!((success_probability(&input) - expected).abs() < 1e-12);
    }

    #[test]
    fn superposition_amplitude() {
        let spec = SuperpositionSpec {
            n_star: 3,
            l_star: 5,
            phase: 0.0,
        };
        let beta = design_superposition(&spec).unwrap();
        assert!((beta.norm_sqr() - 6720.0_f64.powf(0.2)).abs() < 1e-12);
        assert!((beta.norm_sqr() - 5.827).abs() < 1e-3);
        assert_eq!(beta.im, 0.0);
        assert!(beta.re > 0.0);
        let v = coherent_fock_vector(beta, 20).unwrap();
        assert!((v.coefficients()[3].norm() - v.coefficients()[8].norm()).abs() < 1e-10);

        let spec = SuperpositionSpec {
            n_star: 2,
            l_star: 4,
            phase: 1.3,
        };
        let v = coherent_fock_vector(design_superposition(&spec).unwrap(), 20).unwrap();
        let ratio = v.coefficients()[6] / v.coefficients()[2];
        assert!((ratio.norm() - 1.0).abs() < 1e-10);
        assert!((ratio.arg() - 1.3).abs() < 1e-10);

        let big = SuperpositionSpec {
            n_star: 200,
            l_star: 150,
            phase: 0.0,
        };
        assert!(design_superposition(&big).unwrap().norm().is_finite());
        assert!(design_superposition(&SuperpositionSpec {
            n_star: 1,
            l_star: 0,
            phase: 0.0
        })
        .is_err());
    }

    #[test]
    fn superposition_two_peak_shape() {
        let r = conditional_output(&superposition_input(0.06, 0.1, 8.0)).unwrap();
        let d = photon_number_distribution(&r.rho_out).unwrap();
        let mut order: Vec<usize> = (0..d.len()).collect();
        order.sort_by(|&a, &b| d[b].total_cmp(&d[a]));
        let mut top = [order[0], order[1]];
        top.sort();
        assert_eq!(top, [3, 8]);
        assert!(d[13] < d[3].min(d[8]));
    }

    #[test]
    fn low_efficiency_purifies() {
        let hi = conditional_output(&superposition_input(0.2, 1.0, 8.0)).unwrap();
        let lo = conditional_output(&superposition_input(0.2, 0.01, 8.0)).unwrap();
        assert!(purity(&lo.rho_out) > purity(&hi.rho_out));
    }

    #[test]
    fn paper_literal_shares_diagonal() {
        let input = superposition_input(0.2, 0.3, 8.0);
        let exact = conditional_output(&input).unwrap();
        let lit = conditional_output_with(&input, FilterMode::PaperLiteral).unwrap();
        assert_eq!(exact.p_on, lit.p_on);
        for k in 0..input.n_trunc {
            assert!((exact.rho_out.get(k, k) - lit.rho_out.get(k, k)).norm() < 1e-15);
        }
    }

    #[test]
    fn off_comb_warns() {
        let nu = DensityMatrix::coherent(c(1.0, 0.0), 12).unwrap();
        let p = CavityParams::single(0.1, 0.3, 0.5, 1.0).unwrap();
        let r = conditional_output(&FilterInput::new(nu, c(3.0, 0.0), p).unwrap()).unwrap();
        assert!(matches!(r.warnings[..], [FilterWarning::OffComb { .. }]));
    }

    #[test]
    fn rejects_wrong_kerr_count() {
        let nu = DensityMatrix::fock(0, 3).unwrap();
        let two = CavityParams::new(0.1, 0.3, 0.0, 1.0, KerrMedia::Two).unwrap();
        let one = CavityParams::single(0.1, 0.3, 0.0, 1.0).unwrap();
        let input = FilterInput::new(nu.clone(), c(3.0, 0.0), two).unwrap();
        assert_eq!(conditional_output(&input), Err(Error::KerrCount(1)));
        assert_eq!(
            two_mode_conditional_output(&nu, &nu, c(3.0, 0.0), &one, FilterMode::Exact),
            Err(Error::KerrCount(2))
        );
    }

    #[test]
    fn two_mode_vacuum_and_matching_term() {
        let vac = DensityMatrix::fock(0, 3).unwrap();
        let p = CavityParams::from_comb(20.0, 0.0, 1e-3, 1.0, KerrMedia::Two).unwrap();
        let r =
            two_mode_conditional_output(&vac, &vac, c(10.0, 0.0), &p, FilterMode::Exact).unwrap();
        assert_eq!(r.rho_out.get(0, 0), c(1.0, 0.0));
        assert_eq!(r.rho_out.mode_dims(), &[3, 3]);

        let one = DensityMatrix::fock(1, 3).unwrap();
        let p = CavityParams::from_comb(20.0, 1.0, 1e-3, 1.0, KerrMedia::Two).unwrap();
        let r =
            two_mode_conditional_output(&one, &vac, c(10.0, 0.0), &p, FilterMode::Exact).unwrap();
        // |1,0> is basis index 1 * 3 + 0
        assert_eq!(r.rho_out.get(3, 3), c(1.0, 0.0));
        assert!((r.rho_out.trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_mode_matches_product_target() {
        let v1 = coherent_fock_vector(c(1.0, 0.0), 12).unwrap();
        let v2 = coherent_fock_vector(c(0.8, 0.3), 12).unwrap();
        let (nu1, nu2) = (DensityMatrix::from_pure(&v1), DensityMatrix::from_pure(&v2));
        let p = CavityParams::from_comb(PI / 0.2, 2.0, 1e-3, 1.0, KerrMedia::Two).unwrap();
        let r =
            two_mode_conditional_output(&nu1, &nu2, c(10.0, 0.0), &p, FilterMode::Exact).unwrap();
        let target = entangled_target(&v1, &v2, 2).unwrap();
        assert!(fidelity_with_pure(&r.rho_out, &target).unwrap() >= 0.99);
    }

    #[test]
    fn complex_exp_m1_small_arguments() {
        let z = c(1e-12, -2e-12);
        let w = exp_m1(z);
        assert!((w - z).norm() < 1e-23);
        let z = c(-0.7, 2.1);
        assert!((exp_m1(z) - (z.exp() - 1.0)).norm() < 1e-15);
    }

    proptest! {
        #[test]
        fn p_on_equals_unnormalized_trace(tau in 0.01..1.0f64, chi_t in 0.05..3.0f64, psi in 0.0..6.3f64,
                                          eta in 0.05..1.0f64, a in 0.2..6.0f64, b in 0.1..2.5f64) {
            let nu = DensityMatrix::coherent(c(b, 0.3), 30).unwrap();
            let p = CavityParams::single(tau, chi_t, psi, eta).unwrap();
            let input = FilterInput::new(nu, c(a, 0.0), p).unwrap();
            let r = conditional_output(&input).unwrap();
            prop_assert!((r.p_on - success_probability(&input)).abs() < 1e-12);
            prop_assert!((r.normalizer - r.p_on).abs() < 1e-15);
        }

        #[test]
        fn invariant_under_pump_phase(theta in 0.0..6.3f64, tau in 0.01..0.5f64, eta in 0.05..1.0f64,
                                      chi_t in 0.1..2.0f64, psi in 0.0..6.3f64) {
            let nu = DensityMatrix::coherent(c(1.2, -0.4), 20).unwrap();
            let p = CavityParams::single(tau, chi_t, psi, eta).unwrap();
            let a = FilterInput::new(nu.clone(), c(4.0, 0.0), p).unwrap();
            let b = FilterInput::new(nu, Complex64::from_polar(4.0, theta), p).unwrap();
            let ra = conditional_output(&a).unwrap();
            let rb = conditional_output(&b).unwrap();
            let dev = (ra.rho_out.entries() - rb.rho_out.entries()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(dev < 1e-12);
        }

        #[test]
        fn fock_inputs_are_fixed_points(n in 0usize..10, tau in 1e-3..1.0f64, chi_t in 0.01..3.0f64,
                                        psi in -3.0..3.0f64, eta in 0.01..1.0f64, a in 0.5..10.0f64) {
            let nu = DensityMatrix::fock(n, 10).unwrap();
            let p = CavityParams::single(tau, chi_t, psi, eta).unwrap();
            let input = FilterInput::new(nu.clone(), c(a, 0.0), p).unwrap();
            if success_probability(&input) > 0.0 {
                let r = conditional_output(&input).unwrap();
                prop_assert_eq!(r.rho_out.entries(), nu.entries());
            }
        }
    }
}
