//! Photon-number distribution by scanning the comb position.
//!
//! With the comb spacing wider than the populated photon numbers, tuning
//! `psi = chi_t * n` makes the click probability approximately
//! `nu_nn (1 - exp(-eta |alpha|^2))`. Dividing out the detector factor gives an
//! estimate of `nu_nn` that stays unbiased at low efficiency.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::cavity::{comb, CavityParams, KerrMedia};
use crate::error::{Error, Result};
use crate::filter::{success_probability, FilterInput};
use crate::fock::{ComplexAmplitude, DensityMatrix};

pub const DEFAULT_SHOTS: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRecord {
    pub n_star_target: usize,
    pub psi_used: f64,
    pub p_on_exact: f64,
    pub clicks: u64,
    pub shots: u64,
    pub nu_estimate: f64,
}

/// `1 - exp(-eta |alpha|^2)`: click probability of an on-peak number state.
fn detector_factor(alpha: ComplexAmplitude, eta: f64) -> f64 {
    -(-eta * alpha.norm_sqr()).exp_m1()
}

/// Exact click probability with the comb tuned to each `n` in `0..=n_max`.
pub fn scan_distribution(
    nu: &DensityMatrix,
    alpha: ComplexAmplitude,
    params_base: &CavityParams,
    n_max: usize,
) -> Result<Vec<ScanRecord>> {
    if params_base.n_kerr != KerrMedia::One {
        return Err(Error::KerrCount(1));
    }
    params_base.validate()?;
    let l_star = comb(params_base).l_star;
    if l_star <= n_max as f64 {
        return Err(Error::CombAliasing { l_star, n_max });
    }
    let factor = detector_factor(alpha, params_base.eta);
    if factor.is_nan() || factor <= 0.0 {
        return Err(Error::NeverClicks { p_on: 0.0 });
    }
    (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let params = CavityParams {
                psi: params_base.chi_t * n as f64,
                ..*params_base
            };
            let input = FilterInput::new(nu.clone(), alpha, params)?;
            let p_on = success_probability(&input).clamp(0.0, 1.0);
            Ok(ScanRecord {
                n_star_target: n,
                psi_used: params.psi,
                p_on_exact: p_on,
                clicks: 0,
                shots: 0,
                nu_estimate: (p_on / factor).min(1.0),
            })
        })
        .collect()
}

/// Binomial click count for `shots` trials, deterministic in `seed`.
pub fn sample_clicks(p_on: f64, shots: u64, seed: u64) -> Result<u64> {
    if !(0.0..=1.0).contains(&p_on) {
        return Err(Error::InvalidProbability(p_on));
    }
    let dist = Binomial::new(shots, p_on).map_err(|_| Error::InvalidProbability(p_on))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(dist.sample(&mut rng))
}

fn point_seed(seed: u64, n: usize) -> u64 {
    seed ^ (n as u64 + 1).wrapping_mul(0xD1B5_4A32_D192_ED03)
}

/// Replaces exact estimates by finite-shot click frequencies.
///
/// Each scan point draws from its own seed derived from `(seed, n)`.
pub fn sample_scan(
    records: &[ScanRecord],
    alpha: ComplexAmplitude,
    eta: f64,
    shots: u64,
    seed: u64,
) -> Result<Vec<ScanRecord>> {
    let factor = detector_factor(alpha, eta);
    if factor.is_nan() || factor <= 0.0 {
        return Err(Error::NeverClicks { p_on: 0.0 });
    }
    records
        .par_iter()
        .map(|r| {
            let clicks = sample_clicks(r.p_on_exact, shots, point_seed(seed, r.n_star_target))?;
            let freq = if shots == 0 {
                0.0
            } else {
                clicks as f64 / shots as f64
            };
            Ok(ScanRecord {
                clicks,
                shots,
                nu_estimate: (freq / factor).min(1.0),
                ..r.clone()
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::TAU;

    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scan_params(eta: f64) -> CavityParams {
        CavityParams::single(1e-3, TAU / 25.0, 0.0, eta).unwrap()
    }

    /// Teeth 13 apart: neighbour leakage ~ |alpha|^2 tau^2 / (4 sin^2(pi / 13)) ≈ 4.4e-4.
    fn narrow_scan_params() -> CavityParams {
        CavityParams::single(1e-3, TAU / 13.0, 0.0, 1.0).unwrap()
    }

    fn poisson(mean: f64, n: usize) -> Vec<f64> {
        let mut w = (-mean).exp();
        let mut out = Vec::new();
        for k in 0..n {
            out.push(w);
            w *= mean / (k + 1) as f64;
        }
        out
    }

    #[test]
    fn fock_state_scan() {
        let nu = DensityMatrix::fock(5, 20).unwrap();
        let recs = scan_distribution(&nu, c(10.0, 0.0), &narrow_scan_params(), 12).unwrap();
        for r in &recs {
            if r.n_star_target == 5 {
                assert!((r.nu_estimate - 1.0).abs() < 1e-3);
            } else {
                assert!(r.nu_estimate <= 1e-3, "{r:?}");
            }
        }
        let best = recs
            .iter()
            .max_by(|a, b| a.nu_estimate.total_cmp(&b.nu_estimate))
            .unwrap();
        assert_eq!(best.n_star_target, 5);
        assert_eq!(
            recs.iter()
                .filter(|r| r.nu_estimate == best.nu_estimate)
                .count(),
            1
        );
    }

    #[test]
    fn vacuum_scan() {
        let nu = DensityMatrix::fock(0, 10).unwrap();
        let recs = scan_distribution(&nu, c(10.0, 0.0), &narrow_scan_params(), 8).unwrap();
        assert!(recs[0].nu_estimate > 0.999);
        assert!(recs[1..].iter().all(|r| r.nu_estimate < 1e-3));
    }

    #[test]
    fn coherent_scan_recovers_poisson() {
        let nu = DensityMatrix::coherent(c(2.0, 0.0), 40).unwrap();
        let recs = scan_distribution(&nu, c(10.0, 0.0), &scan_params(1.0), 12).unwrap();
        let reference = poisson(4.0, 13);
        for r in &recs {
            assert!((r.nu_estimate - reference[r.n_star_target]).abs() <= 0.01);
            assert!((0.0..=1.0).contains(&r.nu_estimate));
        }
    }

    #[test]
    fn estimates_are_efficiency_independent() {
        let nu = DensityMatrix::coherent(c(2.0, 0.0), 40).unwrap();
        let alpha = c(10.0, 0.0);
        let hi = scan_distribution(&nu, alpha, &scan_params(1.0), 12).unwrap();
        let lo = scan_distribution(&nu, alpha, &scan_params(0.5), 12).unwrap();
        let ratio = detector_factor(alpha, 0.5) / detector_factor(alpha, 1.0);
        for (h, l) in hi.iter().zip(&lo) {
            assert!((l.p_on_exact - ratio * h.p_on_exact).abs() < 1e-3);
            assert!((l.nu_estimate - h.nu_estimate).abs() < 1e-3);
        }
    }

    #[test]
    fn aliasing_is_rejected() {
        let nu = DensityMatrix::fock(0, 10).unwrap();
        let p = CavityParams::single(1e-3, TAU / 8.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            scan_distribution(&nu, c(10.0, 0.0), &p, 8),
            Err(Error::CombAliasing { .. })
        ));
    }

    #[test]
    fn click_sampling_edges() {
        assert_eq!(sample_clicks(0.0, 1000, 1).unwrap(), 0);
        assert_eq!(sample_clicks(1.0, 100, 1).unwrap(), 100);
        assert_eq!(sample_clicks(0.3, 0, 1).unwrap(), 0);
        assert_eq!(
            sample_clicks(0.3, 1000, 9).unwrap(),
            sample_clicks(0.3, 1000, 9).unwrap()
        );
        assert!(sample_clicks(1.2, 10, 1).is_err());
        assert!(sample_clicks(f64::NAN, 10, 1).is_err());
    }

    #[test]
    fn click_frequency_concentrates() {
        // sd = sqrt(0.21 / 1e5) ≈ 1.45e-3, so 0.01 is ~7 sd
        let within = (0..200u64)
            .filter(|&seed| {
                let k = sample_clicks(0.3, 100_000, seed).unwrap();
                (k as f64 / 1e5 - 0.3).abs() <= 0.01
            })
            .count();
        assert!(within >= 198);
    }

    #[test]
    fn sampled_scan_is_reproducible() {
        let nu = DensityMatrix::coherent(c(2.0, 0.0), 40).unwrap();
        let alpha = c(10.0, 0.0);
        let exact = scan_distribution(&nu, alpha, &scan_params(1.0), 12).unwrap();
        let a = sample_scan(&exact, alpha, 1.0, DEFAULT_SHOTS, 5).unwrap();
        let b = sample_scan(&exact, alpha, 1.0, DEFAULT_SHOTS, 5).unwrap();
        assert_eq!(a, b);
        let reference = poisson(4.0, 13);
        for r in &a {
            assert!(r.clicks <= r.shots);
            assert!((r.nu_estimate - reference[r.n_star_target]).abs() <= 0.02);
        }
    }
}
