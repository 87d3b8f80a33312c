//! Gaussian-cooling volume estimation: anchor with a small Gaussian whose
//! mass sits well inside K, then telescope through a fixed cooling schedule
//! of restricted Gaussians up to scale ≥ 2R, and finally flatten to the
//! uniform measure. Each phase mean is estimated by a warm-started chain of
//! the configured sampler.

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::ConvexBody;
use crate::potential::Potential;
use crate::rng::{chain_rng, normal_vec};
use crate::sampler::hit_and_run_step;
use crate::vecops::*;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerKind {
    Lmc,
    HitAndRun,
}

impl SamplerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SamplerKind::Lmc => "lmc",
            SamplerKind::HitAndRun => "hr",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "lmc" => Ok(SamplerKind::Lmc),
            "hr" | "hit_and_run" | "hit-and-run" => Ok(SamplerKind::HitAndRun),
            other => Err(Error::Invalid(format!("unknown sampler kind '{other}' (expected lmc or hr)"))),
        }
    }
}

/// Increasing variance ladder σ₀² < σ₁² < … < σ_m², with
/// σ₀² = r²/(4n), σ_{ℓ+1}² = σ_ℓ²·(1 + 1/√n), stopping at the first
/// value ≥ 4R².
#[derive(Debug, Clone)]
pub struct CoolingSchedule {
    pub sigma_sq: Vec<f64>,
    pub samples_per_phase: usize,
    pub sampler_kind: SamplerKind,
}

impl CoolingSchedule {
    /// Number of telescoping ratio steps (one fewer than ladder entries).
    pub fn phases(&self) -> usize {
        self.sigma_sq.len() - 1
    }
}

pub const DEFAULT_SAMPLES_PER_PHASE: usize = 2000;
const BURN_IN_STEPS: usize = 500;
const THINNING: usize = 10;
/// The base anchor is cheap per draw, so it gets 10× the phase budget.
const BASE_DRAW_FACTOR: usize = 10;

pub fn build_schedule(body: &ConvexBody) -> CoolingSchedule {
    build_schedule_with(body, DEFAULT_SAMPLES_PER_PHASE, SamplerKind::Lmc)
}

pub fn build_schedule_with(
    body: &ConvexBody,
    samples_per_phase: usize,
    sampler_kind: SamplerKind,
) -> CoolingSchedule {
    let n = body.dim() as f64;
    let r = body.inradius();
    let r_big = body.circumradius();
    let target = 4.0 * r_big * r_big;
    let factor = 1.0 + 1.0 / n.sqrt();
    let mut sigma_sq = vec![r * r / (4.0 * n)];
    while *sigma_sq.last().unwrap() < target {
        sigma_sq.push(sigma_sq.last().unwrap() * factor);
    }
    CoolingSchedule { sigma_sq, samples_per_phase, sampler_kind }
}

/// Run the configured sampler for the restricted Gaussian of scale `sigma`
/// and average `weight_fn` over `samples` retained states (every
/// `THINNING` steps after `BURN_IN_STEPS`), advancing `state` in place so
/// the next phase starts warm.
fn phase_mean(
    body: &ConvexBody,
    sigma: f64,
    samples: usize,
    sampler_kind: SamplerKind,
    state: &mut Vec<f64>,
    rng: &mut ChaCha8Rng,
    weight_fn: impl Fn(&[f64]) -> f64,
) -> Result<f64> {
    let n = body.dim();
    let pot = Potential::gaussian(sigma, body.circumradius())?;
    let eta = sigma * sigma / (n * n) as f64;
    let sqrt_eta = eta.sqrt();
    let advance = |state: &mut Vec<f64>, rng: &mut ChaCha8Rng| -> Result<()> {
        match sampler_kind {
            SamplerKind::Lmc => {
                let grad = pot.grad(state);
                let xi = normal_vec(rng, n);
                let pre: Vec<f64> = (0..n)
                    .map(|j| (state[j] - eta / 2.0 * grad[j]) + sqrt_eta * xi[j])
                    .collect();
                *state = body.project(&pre)?;
            }
            SamplerKind::HitAndRun => {
                *state = hit_and_run_step(body, &pot, state, rng)?;
            }
        }
        Ok(())
    };
    for _ in 0..BURN_IN_STEPS {
        advance(state, rng)?;
    }
    let mut acc = 0.0;
    for _ in 0..samples {
        for _ in 0..THINNING {
            advance(state, rng)?;
        }
        acc += weight_fn(state);
    }
    Ok(acc / samples as f64)
}

/// One telescoping ratio E_{μ_ℓ}[exp(|x|²/2·(1/σ_ℓ² − 1/σ_next²))] where
/// μ_ℓ ∝ e^{−|x|²/(2σ_ℓ²)}𝟙_K.
pub fn phase_ratio(
    body: &ConvexBody,
    sigma_l: f64,
    sigma_next: f64,
    samples: usize,
    sampler_kind: SamplerKind,
    state: &mut Vec<f64>,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    if !(sigma_next >= sigma_l) || !(sigma_l > 0.0) {
        return Err(Error::Invalid("phase_ratio needs 0 < sigma_l ≤ sigma_next".into()));
    }
    let coeff = 0.5 * (1.0 / (sigma_l * sigma_l) - 1.0 / (sigma_next * sigma_next));
    phase_mean(body, sigma_l, samples, sampler_kind, state, rng, |x| (coeff * norm_sq(x)).exp())
}

/// Anchor Z₀ = ∫_K e^{−|x|²/(2σ₀²)} ≈ (2πσ₀²)^{n/2} × (fraction of
/// unrestricted N(0, σ₀²I) draws landing in K). Returns (value, fraction);
/// with σ₀² = r²/(4n) the fraction is close to 1 by Gaussian norm
/// concentration, and a fraction below 0.5 signals a misdeclared inradius.
pub fn base_integral(
    body: &ConvexBody,
    sigma0: f64,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, f64)> {
    if !(sigma0 > 0.0) || samples == 0 {
        return Err(Error::Invalid("base_integral needs sigma0 > 0 and samples > 0".into()));
    }
    let n = body.dim();
    let mut inside = 0usize;
    for _ in 0..samples {
        let z: Vec<f64> = normal_vec(rng, n).iter().map(|v| v * sigma0).collect();
        if body.membership(&z) {
            inside += 1;
        }
    }
    let fraction = inside as f64 / samples as f64;
    let value =
        (2.0 * std::f64::consts::PI * sigma0 * sigma0).powf(n as f64 / 2.0) * fraction;
    Ok((value, fraction))
}

#[derive(Debug, Clone)]
pub struct VolumeEstimate {
    pub value: f64,
    /// The telescoping cooling ratios, in phase order.
    pub per_phase_ratios: Vec<f64>,
    pub base_value: f64,
    /// Fraction of anchor draws inside K; below 0.5 the inradius is suspect.
    pub base_fraction: f64,
    /// E_{μ_m}[e^{|x|²/(2σ_m²)}]: converts the last restricted Gaussian to
    /// the uniform measure on K.
    pub final_ratio: f64,
    pub total_samples: usize,
    pub wall_time: f64,
}

/// Full pipeline: base anchor, telescoping ratios with warm starts, final
/// flattening. Deterministic given the seed; the chain is strictly
/// sequential so thread count cannot influence the value.
pub fn estimate_volume(
    body: &ConvexBody,
    schedule: &CoolingSchedule,
    seed: u64,
) -> Result<VolumeEstimate> {
    if schedule.sigma_sq.len() < 2 || schedule.samples_per_phase == 0 {
        return Err(Error::Invalid("schedule needs at least two ladder entries and positive samples".into()));
    }
    for w in schedule.sigma_sq.windows(2) {
        if !(w[0] > 0.0 && w[1] > w[0]) {
            return Err(Error::Invalid("schedule variances must be positive and increasing".into()));
        }
    }
    let started = Instant::now();
    let spp = schedule.samples_per_phase;
    let mut rng = chain_rng(seed);
    let sigma0 = schedule.sigma_sq[0].sqrt();
    let base_draws = spp * BASE_DRAW_FACTOR;
    let (base_value, base_fraction) = base_integral(body, sigma0, base_draws, &mut rng)?;
    let mut state = vec![0.0; body.dim()];
    let mut ratios = Vec::with_capacity(schedule.phases());
    for w in schedule.sigma_sq.windows(2) {
        let ratio = phase_ratio(
            body,
            w[0].sqrt(),
            w[1].sqrt(),
            spp,
            schedule.sampler_kind,
            &mut state,
            &mut rng,
        )?;
        ratios.push(ratio);
    }
    let sigma_m = schedule.sigma_sq.last().unwrap().sqrt();
    let inv_two_var = 0.5 / (sigma_m * sigma_m);
    let final_ratio = phase_mean(
        body,
        sigma_m,
        spp,
        schedule.sampler_kind,
        &mut state,
        &mut rng,
        |x| (inv_two_var * norm_sq(x)).exp(),
    )?;
    let value = base_value * ratios.iter().product::<f64>() * final_ratio;
    if !value.is_finite() || !(value > 0.0) {
        return Err(Error::Numeric(format!("volume estimate degenerated to {value}")));
    }
    Ok(VolumeEstimate {
        value,
        per_phase_ratios: ratios,
        base_value,
        base_fraction,
        final_ratio,
        total_samples: base_draws + spp * (schedule.phases() + 1),
        wall_time: started.elapsed().as_secs_f64(),
    })
}

/// Volume of the unit ball in n dimensions (V₀=1, V₁=2, V_n = V_{n−2}·2π/n).
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * std::f64::consts::PI / n as f64,
    }
}

/// Uniform draw helper for tests comparing against exact box fractions.
pub fn uniform01(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen::<f64>()
}
