//! Independent checks of the filter engine.
//!
//! [`tensor_oracle`] expands every coherent output component into an explicit
//! truncated Fock vector and contracts the joint b1 ⊗ b2 ⊗ d2 operator against
//! `1` (on b1) and `Pi_ON = sum_k (1 - (1 - eta)^k)|k><k|` (on b2). It never
//! uses a coherent-state overlap identity. [`overlap_oracle`] evaluates the
//! same traces in closed form but organised around `Tr[Pi_OFF ...]`, coded
//! separately from the engine.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cavity::{kappa, phase_shift, sigma, CavityParams};
use crate::error::{Error, Result};
use crate::filter::{
    conditional_output, conditional_output_with, ConditionalResult, FilterInput, FilterMode,
    MIN_P_ON,
};
use crate::fock::{suggested_truncation, DensityMatrix};

/// Largest tolerated norm loss of a truncated coherent expansion.
pub const TAIL_TOL: f64 = 1e-10;
/// Entrywise agreement required between engine and either oracle.
pub const RHO_TOL: f64 = 1e-8;
pub const P_ON_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub max_abs_deviation: f64,
    pub p_on_deviation: f64,
    pub dims_used: Vec<usize>,
}

/// Truncated Fock expansion of `|gamma>` by the recurrence `c_k = c_{k-1} gamma / sqrt(k)`.
fn expand(gamma: Complex64, b_trunc: usize) -> Result<Vec<Complex64>> {
    let mut v = Vec::with_capacity(b_trunc);
    v.push(Complex64::new((-0.5 * gamma.norm_sqr()).exp(), 0.0));
    for k in 1..b_trunc {
        let next = v[k - 1] * gamma / (k as f64).sqrt();
        v.push(next);
    }
    let norm_loss = 1.0 - v.iter().map(|c| c.norm_sqr()).sum::<f64>();
    if norm_loss > TAIL_TOL {
        return Err(Error::InsufficientTruncation {
            amplitude: gamma.norm(),
            b_trunc,
            norm_loss,
        });
    }
    Ok(v)
}

fn into_result(unnormalized: DMatrix<Complex64>, n_trunc: usize) -> Result<ConditionalResult> {
    let p_on: f64 = (0..n_trunc).map(|s| unnormalized[(s, s)].re).sum();
    if p_on.is_nan() || p_on < MIN_P_ON {
        return Err(Error::NeverClicks { p_on });
    }
    Ok(ConditionalResult {
        rho_out: DensityMatrix::from_unnormalized(unnormalized, vec![n_trunc])?,
        p_on,
        normalizer: p_on,
        warnings: Vec::new(),
    })
}

/// Brute-force conditional state with b-modes truncated at `b_trunc` levels.
pub fn tensor_oracle(input: &FilterInput, b_trunc: usize) -> Result<ConditionalResult> {
    if b_trunc == 0 {
        return Err(Error::InvalidTruncation { got: 0, min: 1 });
    }
    let n = input.n_trunc;
    let p = &input.params;
    let alpha = input.alpha;

    let mut reflected = Vec::with_capacity(n);
    let mut transmitted = Vec::with_capacity(n);
    for s in 0..n {
        let phi = phase_shift(s, p);
        reflected.push(expand(alpha * kappa(phi, p.tau), b_trunc)?);
        transmitted.push(expand(
            alpha * Complex64::from_polar(1.0, phi) * sigma(phi, p.tau),
            b_trunc,
        )?);
    }

    // diagonal of Pi_ON, by explicit products
    let mut on_weight = Vec::with_capacity(b_trunc);
    let mut off = 1.0_f64;
    for _ in 0..b_trunc {
        on_weight.push(1.0 - off);
        off *= 1.0 - p.eta;
    }

    let nu = input.nu.entries();
    let m = DMatrix::from_fn(n, n, |s, sp| {
        let b1: Complex64 = (0..b_trunc)
            .map(|j| reflected[s][j] * reflected[sp][j].conj())
            .sum();
        let b2: Complex64 = (0..b_trunc)
            .map(|k| on_weight[k] * transmitted[s][k] * transmitted[sp][k].conj())
            .sum();
        nu[(s, sp)] * b1 * b2
    });
    into_result(m, n)
}

/// Closed-form traces, with the ON factor written as `<g'|g> - Tr[Pi_OFF |g><g'|]`.
pub fn overlap_oracle(input: &FilterInput) -> Result<ConditionalResult> {
    let n = input.n_trunc;
    let p = &input.params;
    let alpha = input.alpha;
    let labels: Vec<(Complex64, Complex64)> = (0..n)
        .map(|s| {
            let phi = phase_shift(s, p);
            let a = alpha * kappa(phi, p.tau);
            let g = alpha * Complex64::new(phi.cos(), phi.sin()) * sigma(phi, p.tau);
            (a, g)
        })
        .collect();
    let inner =
        |x: Complex64, y: Complex64| (-(x.norm_sqr() + y.norm_sqr()) / 2.0 + y.conj() * x).exp();
    let off_trace = |x: Complex64, y: Complex64| {
        (-(x.norm_sqr() + y.norm_sqr()) / 2.0 + (1.0 - p.eta) * y.conj() * x).exp()
    };
    let nu = input.nu.entries();
    let m = DMatrix::from_fn(n, n, |s, sp| {
        let (a, g) = labels[s];
        let (ap, gp) = labels[sp];
        nu[(s, sp)] * inner(a, ap) * (inner(g, gp) - off_trace(g, gp))
    });
    into_result(m, n)
}

/// Entrywise and success-probability deviations between two results.
pub fn compare(engine: &ConditionalResult, reference: &ConditionalResult) -> Result<OracleReport> {
    let (a, b) = (&engine.rho_out, &reference.rho_out);
    if a.mode_dims() != b.mode_dims() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let max_abs_deviation = (a.entries() - b.entries())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    Ok(OracleReport {
        max_abs_deviation,
        p_on_deviation: (engine.p_on - reference.p_on).abs(),
        dims_used: a.mode_dims().to_vec(),
    })
}

/// Largest entrywise gap between the exact and paper-literal conditional states.
pub fn paper_literal_deviation(input: &FilterInput) -> Result<f64> {
    let exact = conditional_output(input)?;
    let literal = conditional_output_with(input, FilterMode::PaperLiteral)?;
    Ok(compare(&exact, &literal)?.max_abs_deviation)
}

/// b-mode truncation that covers every coherent label of `input` with margin.
pub fn oracle_truncation(input: &FilterInput) -> usize {
    // |kappa| and |sigma| are bounded by one
    suggested_truncation(input.alpha.norm()) + 10
}

/// Ranges for randomized equivalence cases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CampaignConfig {
    pub cases: usize,
    pub seed: u64,
    pub max_alpha: f64,
    pub max_dim: usize,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            cases: 100,
            seed: 0,
            max_alpha: 3.0,
            max_dim: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseOutcome {
    pub case: usize,
    pub dim: usize,
    pub b_trunc: usize,
    pub p_on: f64,
    pub engine_vs_tensor: OracleReport,
    pub engine_vs_overlap: OracleReport,
    pub overlap_vs_tensor: OracleReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignReport {
    pub config: CampaignConfig,
    pub max_rho_deviation: f64,
    pub max_p_on_deviation: f64,
    pub max_engine_overlap_deviation: f64,
    pub passed: bool,
    pub outcomes: Vec<CaseOutcome>,
}

fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(
        seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(case as u64),
    )
}

/// Random signal state: a coherent state or a random mixed state.
fn random_signal(rng: &mut ChaCha8Rng, dim: usize) -> Result<DensityMatrix> {
    if rng.random_bool(0.5) {
        let beta = Complex64::from_polar(
            rng.random_range(0.0..1.5),
            rng.random_range(0.0..std::f64::consts::TAU),
        );
        Ok(DensityMatrix::coherent(beta, dim)?.normalized())
    } else {
        let rank = rng.random_range(1..=dim);
        let g = DMatrix::from_fn(dim, rank, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        DensityMatrix::from_unnormalized(&g * g.adjoint(), vec![dim])
    }
}

/// Deterministic random filter input for `case` of a campaign.
pub fn random_case(config: &CampaignConfig, case: usize) -> Result<FilterInput> {
    use std::f64::consts::TAU;
    let mut rng = case_rng(config.seed, case);
    let dim = rng.random_range(2..=config.max_dim.max(2));
    let nu = random_signal(&mut rng, dim)?;
    let alpha = Complex64::from_polar(
        rng.random_range(0.5..=config.max_alpha.max(0.5)),
        rng.random_range(0.0..TAU),
    );
    let params = CavityParams::single(
        rng.random_range(0.1..=1.0),
        rng.random_range(0.05..TAU),
        rng.random_range(0.0..TAU),
        rng.random_range(0.1..=1.0),
    )?;
    FilterInput::new(nu, alpha, params)
}

fn run_case(config: &CampaignConfig, case: usize) -> Result<CaseOutcome> {
    let input = random_case(config, case)?;
    let b_trunc = oracle_truncation(&input);
    let engine = conditional_output(&input)?;
    let tensor = tensor_oracle(&input, b_trunc)?;
    let overlap = overlap_oracle(&input)?;
    Ok(CaseOutcome {
        case,
        dim: input.n_trunc,
        b_trunc,
        p_on: engine.p_on,
        engine_vs_tensor: compare(&engine, &tensor)?,
        engine_vs_overlap: compare(&engine, &overlap)?,
        overlap_vs_tensor: compare(&overlap, &tensor)?,
    })
}

/// Three-way agreement of engine, overlap oracle and tensor oracle on random cases.
///
/// Cases run in parallel; each derives its own generator from `(seed, case)`,
/// so the report does not depend on scheduling.
pub fn equivalence_campaign(config: &CampaignConfig) -> Result<CampaignReport> {
    let outcomes = (0..config.cases)
        .into_par_iter()
        .map(|case| run_case(config, case))
        .collect::<Result<Vec<_>>>()?;
    let reports = || {
        outcomes.iter().flat_map(|o| {
            [
                &o.engine_vs_tensor,
                &o.engine_vs_overlap,
                &o.overlap_vs_tensor,
            ]
        })
    };
    let max_rho_deviation = reports().map(|r| r.max_abs_deviation).fold(0.0, f64::max);
    let max_p_on_deviation = reports().map(|r| r.p_on_deviation).fold(0.0, f64::max);
    let max_engine_overlap_deviation = outcomes
        .iter()
        .map(|o| o.engine_vs_overlap.max_abs_deviation)
        .fold(0.0, f64::max);
    Ok(CampaignReport {
        config: *config,
        max_rho_deviation,
        max_p_on_deviation,
        max_engine_overlap_deviation,
        passed: max_rho_deviation <= RHO_TOL && max_p_on_deviation <= P_ON_TOL,
        outcomes,
    })
}
