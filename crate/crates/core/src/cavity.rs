//! Single-mode ring-cavity model.
//!
//! Two beam splitters of transmissivity `tau` close a loop containing a
//! cross-Kerr medium and a phase shifter. For a round-trip phase `phi` the
//! cavity acts on the input modes as a beam splitter with reflection
//! `kappa(phi)` and transmission `sigma(phi)`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::ComplexAmplitude;

/// How close `n*` must be to an integer to count as on-comb.
pub const COMB_INTEGER_TOL: f64 = 1e-9;

/// Number of identical Kerr media inside the cavity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum KerrMedia {
    One,
    Two,
}

impl TryFrom<u8> for KerrMedia {
    type Error = Error;

    fn try_from(n: u8) -> Result<Self> {
        match n {
            1 => Ok(KerrMedia::One),
            2 => Ok(KerrMedia::Two),
            other => Err(Error::InvalidParameter {
                name: "n_kerr",
                value: other as f64,
            }),
        }
    }
}

impl From<KerrMedia> for u8 {
    fn from(k: KerrMedia) -> u8 {
        match k {
            KerrMedia::One => 1,
            KerrMedia::Two => 2,
        }
    }
}

/// Physical knobs of the device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// Beam-splitter transmissivity, `0 < tau <= 1`.
    pub tau: f64,
    /// Kerr phase per signal photon (susceptibility times interaction time).
    pub chi_t: f64,
    /// Phase-shifter setting in radians.
    pub psi: f64,
    /// Detector quantum efficiency, `0 <= eta <= 1`.
    pub eta: f64,
    pub n_kerr: KerrMedia,
}

impl CavityParams {
    pub fn new(tau: f64, chi_t: f64, psi: f64, eta: f64, n_kerr: KerrMedia) -> Result<Self> {
        let p = CavityParams {
            tau,
            chi_t,
            psi,
            eta,
            n_kerr,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn single(tau: f64, chi_t: f64, psi: f64, eta: f64) -> Result<Self> {
        Self::new(tau, chi_t, psi, eta, KerrMedia::One)
    }

    /// Parameters whose comb has spacing `l_star` and first peak `n_star`.
    pub fn from_comb(
        l_star: f64,
        n_star: f64,
        tau: f64,
        eta: f64,
        n_kerr: KerrMedia,
    ) -> Result<Self> {
        if !(l_star > 0.0 && l_star.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "l_star",
                value: l_star,
            });
        }
        let (chi_t, psi) = match n_kerr {
            KerrMedia::One => {
                let chi_t = TAU / l_star;
                (chi_t, n_star * chi_t)
            }
            KerrMedia::Two => {
                let chi_t = PI / l_star;
                (chi_t, 2.0 * n_star * chi_t)
            }
        };
        Self::new(tau, chi_t, psi, eta, n_kerr)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "tau",
                value: self.tau,
            });
        }
        if !(self.chi_t > 0.0 && self.chi_t.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "chi_t",
                value: self.chi_t,
            });
        }
        if !self.psi.is_finite() {
            return Err(Error::InvalidParameter {
                name: "psi",
                value: self.psi,
            });
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::InvalidParameter {
                name: "eta",
                value: self.eta,
            });
        }
        Ok(())
    }

    /// Kerr phase per photon contributed by each medium.
    ///
    /// With two media each crystal imparts `2 chi_t` per photon, which makes
    /// `l* = pi / chi_t` and `n* = psi / (2 chi_t)`.
    fn per_photon_shift(&self) -> f64 {
        match self.n_kerr {
            KerrMedia::One => self.chi_t,
            KerrMedia::Two => 2.0 * self.chi_t,
        }
    }
}

/// Comb of photon numbers transmitted in the high-finesse limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombParams {
    pub l_star: f64,
    pub n_star: f64,
}

impl CombParams {
    /// `n*` rounded, if it lies within [`COMB_INTEGER_TOL`] of a nonnegative integer.
    pub fn integer_n_star(&self) -> Option<usize> {
        let r = self.n_star.round();
        ((self.n_star - r).abs() <= COMB_INTEGER_TOL && r >= 0.0).then_some(r as usize)
    }

    pub fn integer_l_star(&self) -> Option<usize> {
        let r = self.l_star.round();
        ((self.l_star - r).abs() <= COMB_INTEGER_TOL && r >= 1.0).then_some(r as usize)
    }

    /// Whether photon number `n` sits on a comb tooth `n* + k l*`, `k` any integer.
    pub fn is_on_comb(&self, n: usize) -> bool {
        let k = (n as f64 - self.n_star) / self.l_star;
        (k - k.round()).abs() * self.l_star <= COMB_INTEGER_TOL
    }
}

/// Round-trip phase `phi_n` for total signal photon number `n`.
///
/// For two Kerr media, `n = n1 + n2`.
pub fn phase_shift(n: usize, params: &CavityParams) -> f64 {
    -params.per_photon_shift() * n as f64 + params.psi
}

/// `1 - e^{i phi}` and the denominator `1 - (1 - tau) e^{i phi} = tau + (1 - tau)(1 - e^{i phi})`.
///
/// Written this way the denominator is exactly `tau` on a comb tooth, where the
/// direct form suffers cancellation in `1 - (1 - tau)`.
fn resonance(phi: f64, tau: f64) -> (Complex64, Complex64) {
    let h = (0.5 * phi).sin();
    let w = Complex64::new(2.0 * h * h, -phi.sin());
    (w, tau + (1.0 - tau) * w)
}

/// Cavity reflection `sqrt(1 - tau)(e^{i phi} - 1) / (1 - (1 - tau) e^{i phi})`.
pub fn kappa(phi: f64, tau: f64) -> ComplexAmplitude {
    let (w, d) = resonance(phi, tau);
    -(1.0 - tau).sqrt() * w / d
}

/// Cavity transmission `tau / (1 - (1 - tau) e^{i phi})`.
pub fn sigma(phi: f64, tau: f64) -> ComplexAmplitude {
    let (_, d) = resonance(phi, tau);
    tau / d
}

pub fn comb(params: &CavityParams) -> CombParams {
    match params.n_kerr {
        KerrMedia::One => CombParams {
            l_star: TAU / params.chi_t,
            n_star: params.psi / params.chi_t,
        },
        KerrMedia::Two => CombParams {
            l_star: PI / params.chi_t,
            n_star: params.psi / (2.0 * params.chi_t),
        },
    }
}
