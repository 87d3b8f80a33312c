//! The projected Langevin chain, its boundary local-time reconstruction,
//! the hit-and-run baseline, coupled-chain experiments, and step-size
//! schedules.
//!
//! One chain step is X' = P_K(X − (η/2)∇f(X) + √η·ξ) with standard normal
//! ξ. Whenever the projection moves the point, the displacement |pre − P(pre)|
//! is an atom of the chain's boundary local time and the normalized
//! displacement is the outer normal at the projected point.

use rand::Rng;

use crate::geometry::ConvexBody;
use crate::potential::{Potential, PotentialKind};
use crate::rng::{chain_rng, normal_vec, sphere_dir};
use crate::tol::{HR_GRID_NODES, MERGE_TOL_FACTOR, TOL_CHORD};
use crate::vecops::*;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct SamplerConfig {
    pub eta: f64,
    pub steps_n: usize,
    pub seed: u64,
    /// Defaults to the origin, which every body contains.
    pub start: Option<Vec<f64>>,
}

impl SamplerConfig {
    pub fn new(eta: f64, steps_n: usize, seed: u64) -> Self {
        SamplerConfig { eta, steps_n, seed, start: None }
    }
}

/// One atom of the reconstructed boundary local-time measure: at time
/// `step_index·eta` the driver pushed the chain out of K and the projection
/// pulled it back by `mass` along the outer unit normal `normal`.
#[derive(Debug, Clone)]
pub struct LocalTimeEvent {
    pub step_index: usize,
    pub time: f64,
    pub mass: f64,
    pub normal: Vec<f64>,
}

/// Projection displacement of a single step, before it is tied to a step
/// index (see `LocalTimeEvent`).
#[derive(Debug, Clone)]
pub struct BoundaryHit {
    pub mass: f64,
    pub normal: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// states[0] = start; length steps_n + 1; every state lies in K.
    pub states: Vec<Vec<f64>>,
    pub local_time: Vec<LocalTimeEvent>,
    /// 0 when the trajectory was reconstructed from externally supplied
    /// increments rather than an internal Gaussian stream.
    pub seed: u64,
    pub eta: f64,
}

fn start_state(body: &ConvexBody, cfg: &SamplerConfig) -> Result<Vec<f64>> {
    match &cfg.start {
        None => Ok(vec![0.0; body.dim()]),
        Some(s) => {
            if s.len() != body.dim() {
                return Err(Error::Invalid("start point has wrong dimension".into()));
            }
            if !body.membership(s) {
                return Err(Error::Invalid("start point must lie in K".into()));
            }
            Ok(s.clone())
        }
    }
}

/// Shared by the LMC step and the Skorokhod reconstruction so both perform
/// bit-identical arithmetic on the same increments: the pre-point is
/// (x − (η/2)∇f(x)) + g computed coordinatewise in this exact order.
fn step_with_increment(
    body: &ConvexBody,
    drift: &[f64],
    x: &[f64],
    g: &[f64],
) -> Result<(Vec<f64>, Option<BoundaryHit>)> {
    let pre: Vec<f64> = x
        .iter()
        .zip(drift)
        .zip(g)
        .map(|((xi, di), gi)| (xi - di) + gi)
        .collect();
    let out = body.project(&pre)?;
    let mass = dist(&pre, &out);
    if mass > 0.0 {
        let normal = sub(&pre, &out).iter().map(|v| v / mass).collect();
        Ok((out, Some(BoundaryHit { mass, normal })))
    } else {
        Ok((out, None))
    }
}

fn drift_term(potential: &Potential, x: &[f64], eta: f64) -> Vec<f64> {
    scale(&potential.grad(x), eta / 2.0)
}

/// One chain step driven by an externally supplied standard normal ξ.
pub fn lmc_step(
    body: &ConvexBody,
    potential: &Potential,
    x: &[f64],
    eta: f64,
    xi: &[f64],
) -> Result<(Vec<f64>, Option<BoundaryHit>)> {
    let g = scale(xi, eta.sqrt());
    step_with_increment(body, &drift_term(potential, x, eta), x, &g)
}

/// Run the chain for `steps_n` steps from the configured start, recording
/// every state and every boundary local-time atom. Bit-for-bit reproducible
/// given (seed, eta, steps_n).
pub fn run_lmc(body: &ConvexBody, potential: &Potential, cfg: &SamplerConfig) -> Result<Trajectory> {
    if !(cfg.eta > 0.0) || !cfg.eta.is_finite() {
        return Err(Error::Invalid(format!("eta must be positive, got {}", cfg.eta)));
    }
    let n = body.dim();
    let mut x = start_state(body, cfg)?;
    let mut rng = chain_rng(cfg.seed);
    let sqrt_eta = cfg.eta.sqrt();
    let mut states = Vec::with_capacity(cfg.steps_n + 1);
    let mut local_time = Vec::new();
    states.push(x.clone());
    for k in 0..cfg.steps_n {
        let xi = normal_vec(&mut rng, n);
        let g = scale(&xi, sqrt_eta);
        let (next, hit) = step_with_increment(body, &drift_term(potential, &x, cfg.eta), &x, &g)
            .map_err(|e| Error::Numeric(format!("step {}: {e}", k + 1)))?;
        if let Some(h) = hit {
            local_time.push(LocalTimeEvent {
                step_index: k + 1,
                time: (k + 1) as f64 * cfg.eta,
                mass: h.mass,
                normal: h.normal,
            });
        }
        x = next;
        states.push(x.clone());
    }
    Ok(Trajectory { states, local_time, seed: cfg.seed, eta: cfg.eta })
}

/// Constructive Skorokhod solution for a piecewise-constant driver: apply
/// x_{k+1} = P_K(x_k + g_k) and collect the atoms |x_k + g_k − P_K(x_k + g_k)|
/// with their outer normals. With g_k = √η·ξ_k (zero drift) this reproduces
/// `run_lmc` exactly, state for state and atom for atom.
pub fn skorokhod_reconstruct(
    body: &ConvexBody,
    increments: &[Vec<f64>],
    eta: f64,
) -> Result<Trajectory> {
    let n = body.dim();
    let zero_drift = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut states = Vec::with_capacity(increments.len() + 1);
    let mut local_time = Vec::new();
    states.push(x.clone());
    for (j, g) in increments.iter().enumerate() {
        if g.len() != n || g.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!("increment {j} invalid")));
        }
        let (next, hit) = step_with_increment(body, &zero_drift, &x, g)
            .map_err(|e| Error::Numeric(format!("step {}: {e}", j + 1)))?;
        if let Some(h) = hit {
            local_time.push(LocalTimeEvent {
                step_index: j + 1,
                time: (j + 1) as f64 * eta,
                mass: h.mass,
                normal: h.normal,
            });
        }
        x = next;
        states.push(x.clone());
    }
    Ok(Trajectory { states, local_time, seed: 0, eta })
}

/// One hit-and-run move: uniform direction, chord through the body, then a
/// draw from the 1-D restriction of e^{−f} to the chord. Uniform potentials
/// get an exact uniform draw; otherwise a grid inverse-CDF with
/// `HR_GRID_NODES` cells (piecewise-constant density, exactly inverted).
pub fn hit_and_run_step<R: Rng>(
    body: &ConvexBody,
    potential: &Potential,
    x: &[f64],
    rng: &mut R,
) -> Result<Vec<f64>> {
    let n = body.dim();
    let d = sphere_dir(rng, n);
    let chord = body.chord(x, &d)?;
    let (t_min, t_max) = (chord.t_min, chord.t_max);
    let t = match potential.kind() {
        PotentialKind::Uniform => t_min + (t_max - t_min) * rng.gen::<f64>(),
        _ => {
            let width = (t_max - t_min) / HR_GRID_NODES as f64;
            let mut weights = Vec::with_capacity(HR_GRID_NODES);
            let mut min_phi = f64::INFINITY;
            let mut node = vec![0.0; n];
            for i in 0..HR_GRID_NODES {
                let ti = t_min + (i as f64 + 0.5) * width;
                for j in 0..n {
                    node[j] = x[j] + ti * d[j];
                }
                let phi = potential.value(&node);
                min_phi = min_phi.min(phi);
                weights.push(phi);
            }
            let mut cum = 0.0;
            for w in weights.iter_mut() {
                cum += (-(*w - min_phi)).exp();
                *w = cum;
            }
            let total = cum;
            if !(total > 0.0) || !total.is_finite() {
                return Err(Error::Numeric("hit-and-run: degenerate chord weights".into()));
            }
            let u = rng.gen::<f64>() * total;
            let idx = weights.partition_point(|&c| c < u).min(HR_GRID_NODES - 1);
            let lo_cum = if idx == 0 { 0.0 } else { weights[idx - 1] };
            let cell_mass = weights[idx] - lo_cum;
            let frac = if cell_mass > 0.0 { (u - lo_cum) / cell_mass } else { 0.5 };
            t_min + (idx as f64 + frac) * width
        }
    };
    // Guard rounding at the chord ends so the result stays in K.
    let t = t.clamp(t_min + TOL_CHORD, t_max - TOL_CHORD);
    Ok(add_scaled(x, t, &d))
}

/// Terminal state of a coarse/fine pair driven by one Brownian path.
#[derive(Debug, Clone)]
pub struct CoupledRun {
    pub x_fine: Vec<f64>,
    pub x_coarse: Vec<f64>,
    /// |x_fine − x_coarse| at time T.
    pub gap: f64,
    /// (time, gap) every 10 coarse steps, for time-integral estimates.
    pub checkpoints: Vec<(f64, f64)>,
}

/// Run two chains, step sizes η and η/m, off the same underlying Gaussian
/// increments (the coarse chain consumes sums of m fine increments). The
/// fine chain stands in for the continuous process; the gap measures the
/// discretization error at the coarse resolution. With m = 1 both chains
/// perform identical arithmetic and the gap is exactly zero.
pub fn coupled_resolution_run(
    body: &ConvexBody,
    potential: &Potential,
    eta_coarse: f64,
    refine_factor: usize,
    t_horizon: f64,
    seed: u64,
) -> Result<CoupledRun> {
    if !(eta_coarse > 0.0) || refine_factor == 0 {
        return Err(Error::Invalid("eta_coarse and refine factor must be positive".into()));
    }
    let steps = t_horizon / eta_coarse;
    let n_coarse = steps.round() as usize;
    if n_coarse == 0 || (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
        return Err(Error::Invalid(format!(
            "horizon {t_horizon} is not a positive integer multiple of eta {eta_coarse}"
        )));
    }
    let n = body.dim();
    let eta_fine = eta_coarse / refine_factor as f64;
    let sqrt_fine = eta_fine.sqrt();
    let mut rng = chain_rng(seed);
    let mut x_fine = vec![0.0; n];
    let mut x_coarse = vec![0.0; n];
    let mut checkpoints = vec![(0.0, 0.0)];
    for k in 0..n_coarse {
        let mut acc = vec![0.0; n];
        for _ in 0..refine_factor {
            let xi = normal_vec(&mut rng, n);
            let g: Vec<f64> = xi.iter().map(|v| v * sqrt_fine).collect();
            let (next, _) =
                step_with_increment(body, &drift_term(potential, &x_fine, eta_fine), &x_fine, &g)?;
            x_fine = next;
            for j in 0..n {
                acc[j] += g[j];
            }
        }
        let (next, _) =
            step_with_increment(body, &drift_term(potential, &x_coarse, eta_coarse), &x_coarse, &acc)?;
        x_coarse = next;
        if (k + 1) % 10 == 0 || k + 1 == n_coarse {
            checkpoints.push(((k + 1) as f64 * eta_coarse, dist(&x_fine, &x_coarse)));
        }
    }
    let gap = dist(&x_fine, &x_coarse);
    Ok(CoupledRun { x_fine, x_coarse, gap, checkpoints })
}

#[derive(Debug, Clone)]
pub struct CoupledPair {
    /// First time the chains came within the merge radius; None if they
    /// never did before the horizon.
    pub tau: Option<f64>,
    pub first: Vec<Vec<f64>>,
    pub second: Vec<Vec<f64>>,
}

/// Default merge radius: `MERGE_TOL_FACTOR`·√η.
pub fn merge_tol(eta: f64) -> f64 {
    MERGE_TOL_FACTOR * eta.sqrt()
}

/// Reflection coupling: the second chain receives the first chain's noise
/// mirrored across the hyperplane orthogonal to their difference,
/// ξ' = ξ − 2⟨V,ξ⟩V. Once within `merge_tol` the chains snap together and
/// share noise. |ξ'| = |ξ| exactly (Householder reflection).
pub fn reflection_coupled_pair(
    body: &ConvexBody,
    potential: &Potential,
    x: &[f64],
    x_other: &[f64],
    t_horizon: f64,
    eta: f64,
    seed: u64,
) -> Result<CoupledPair> {
    reflection_coupled_pair_with_tol(body, potential, x, x_other, t_horizon, eta, seed, merge_tol(eta))
}

/// Same as `reflection_coupled_pair` with an explicit merge radius; the
/// coupling-resolution experiments vary the radius to probe how the
/// discrete chains' merging resolves against the continuous theory.
#[allow(clippy::too_many_arguments)]
pub fn reflection_coupled_pair_with_tol(
    body: &ConvexBody,
    potential: &Potential,
    x: &[f64],
    x_other: &[f64],
    t_horizon: f64,
    eta: f64,
    seed: u64,
    merge_radius: f64,
) -> Result<CoupledPair> {
    if !body.membership(x) || !body.membership(x_other) {
        return Err(Error::Invalid("coupling: both starts must lie in K".into()));
    }
    let n = body.dim();
    let n_steps = (t_horizon / eta).round() as usize;
    let mut a = x.to_vec();
    let mut b = x_other.to_vec();
    let mut first = Vec::with_capacity(n_steps + 1);
    let mut second = Vec::with_capacity(n_steps + 1);
    let mut rng = chain_rng(seed);
    let mut tau = None;
    for k in 0..=n_steps {
        first.push(a.clone());
        second.push(b.clone());
        if tau.is_none() && dist(&a, &b) <= merge_radius {
            tau = Some(k as f64 * eta);
        }
        if k == n_steps {
            break;
        }
        let xi = normal_vec(&mut rng, n);
        if tau.is_some() {
            let (next, _) = lmc_step(body, potential, &a, eta, &xi)?;
            a = next;
            b = a.clone();
        } else {
            let diff = sub(&a, &b);
            let nd = norm(&diff);
            let v = scale(&diff, 1.0 / nd);
            let xi_mirror = add_scaled(&xi, -2.0 * dot(&v, &xi), &v);
            let (na, _) = lmc_step(body, potential, &a, eta, &xi)?;
            let (nb, _) = lmc_step(body, potential, &b, eta, &xi_mirror)?;
            a = na;
            b = nb;
        }
    }
    Ok(CoupledPair { tau, first, second })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleCase {
    Uniform,
    General,
}

/// The theoretical (η, N) schedules with every hidden constant set to 1 and
/// the body normalized to inradius 1. Uniform case:
/// η = ε⁸/(R⁴ n⁷ ln(n)³), N = R⁶ n⁷ ln(n)⁴ / ε⁸. General case uses
/// n⋆ = max(n, RL, Rβ) and the max of ln n, ln R, ln 1/ε:
/// N = n⋆¹² R⁶ log⁸ / ε¹², η = ε¹² / (n⋆¹² R⁴ log⁷).
/// These are astronomically conservative; `schedule_practical` is what the
/// experiments actually run.
pub fn schedule_theorem1(
    n: usize,
    r_big: f64,
    epsilon: f64,
    case: ScheduleCase,
    l: f64,
    beta: f64,
) -> Result<(f64, f64)> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Invalid(format!("epsilon must be in (0,1), got {epsilon}")));
    }
    if n < 2 {
        return Err(Error::Invalid("schedule: n must be at least 2".into()));
    }
    if !(r_big > 0.0) || l < 0.0 || beta < 0.0 {
        return Err(Error::Invalid("schedule: R must be positive and L, β nonnegative".into()));
    }
    let nf = n as f64;
    match case {
        ScheduleCase::Uniform => {
            let ln_n = nf.ln();
            let eta = epsilon.powi(8) / (r_big.powi(4) * nf.powi(7) * ln_n.powi(3));
            let steps = r_big.powi(6) * nf.powi(7) * ln_n.powi(4) / epsilon.powi(8);
            Ok((eta, steps))
        }
        ScheduleCase::General => {
            let n_star = nf.max(r_big * l).max(r_big * beta);
            let log_term = nf.ln().max(r_big.ln()).max((1.0 / epsilon).ln());
            let steps = n_star.powi(12) * r_big.powi(6) * log_term.powi(8) / epsilon.powi(12);
            let eta = epsilon.powi(12) / (n_star.powi(12) * r_big.powi(4) * log_term.powi(7));
            Ok((eta, steps))
        }
    }
}

/// The rule the experiments use: η = 1/(β n²). A uniform potential has
/// β = 0; the fallback treats it as a Gaussian of scale `sigma_fallback`
/// (β = 1/σ²), so σ = 1 recovers η = 1/n².
pub fn schedule_practical(beta: f64, n: usize, sigma_fallback: f64) -> f64 {
    let nf = n as f64;
    let b = if beta > 0.0 { beta } else { 1.0 / (sigma_fallback * sigma_fallback) };
    1.0 / (b * nf * nf)
}

/// Practical η for a body/potential pair (`--eta auto`).
pub fn practical_eta(potential: &Potential, n: usize) -> f64 {
    schedule_practical(potential.smooth_beta(), n, 1.0)
}
