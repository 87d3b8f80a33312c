//! Empirical verification of the lemma-level bounds behind the sampler,
//! plus the brute-force machinery those checks need: grid histograms for
//! total-variation estimates, an exact rejection oracle, 1-D Wasserstein
//! distance, and replica-parallel experiment drivers.
//!
//! Every check is one-sided — the theory gives upper bounds, not
//! equalities — so a `BoundReport` passes when
//! empirical ≤ theoretical + 3·stderr.

use rayon::prelude::*;

use crate::geometry::ConvexBody;
use crate::potential::Potential;
use crate::rng::{chain_rng, normal_vec, replica_seed};
use crate::sampler::{reflection_coupled_pair_with_tol, Trajectory};
use crate::tol::REJECTION_MIN_RATE;
use crate::vecops::*;
use crate::{Error, Result};

/// Axis-aligned histogram over a box, used for grid-TV estimation.
/// Restricted to dimension ≤ 3: grid-TV is hopeless beyond that and the
/// cap keeps accidental misuse loud. Points outside the bounds are clamped
/// into the edge bins so counts always sum to the number of points added.
#[derive(Debug, Clone, PartialEq)]
pub struct GridHistogram {
    lower: Vec<f64>,
    upper: Vec<f64>,
    bins_per_axis: usize,
    counts: Vec<u64>,
    total: u64,
}

impl GridHistogram {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, bins_per_axis: usize) -> Result<Self> {
        let dim = lower.len();
        if dim == 0 || dim > 3 {
            return Err(Error::Invalid(format!("grid histogram dimension must be 1..=3, got {dim}")));
        }
        if upper.len() != dim {
            return Err(Error::Invalid("grid histogram bounds dimension mismatch".into()));
        }
        if bins_per_axis == 0 {
            return Err(Error::Invalid("grid histogram needs at least one bin per axis".into()));
        }
        for (l, u) in lower.iter().zip(&upper) {
            if !(l < u) {
                return Err(Error::Invalid(format!("grid bounds must satisfy lower < upper, got [{l}, {u}]")));
            }
        }
        let n_cells = bins_per_axis.pow(dim as u32);
        Ok(GridHistogram { lower, upper, bins_per_axis, counts: vec![0; n_cells], total: 0 })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    fn cell_index(&self, point: &[f64]) -> usize {
        let mut idx = 0;
        for d in 0..self.dim() {
            let w = (self.upper[d] - self.lower[d]) / self.bins_per_axis as f64;
            let mut i = ((point[d] - self.lower[d]) / w).floor() as i64;
            i = i.clamp(0, self.bins_per_axis as i64 - 1);
            idx = idx * self.bins_per_axis + i as usize;
        }
        idx
    }

    pub fn add(&mut self, point: &[f64]) {
        debug_assert_eq!(point.len(), self.dim());
        let idx = self.cell_index(point);
        self.counts[idx] += 1;
        self.total += 1;
    }

    pub fn from_points(
        lower: Vec<f64>,
        upper: Vec<f64>,
        bins_per_axis: usize,
        points: &[Vec<f64>],
    ) -> Result<Self> {
        let mut h = GridHistogram::new(lower, upper, bins_per_axis)?;
        for p in points {
            h.add(p);
        }
        Ok(h)
    }

    /// Normalized bin masses; all zero when the histogram is empty.
    pub fn probabilities(&self) -> Vec<f64> {
        if self.total == 0 {
            return vec![0.0; self.counts.len()];
        }
        let t = self.total as f64;
        self.counts.iter().map(|&c| c as f64 / t).collect()
    }

    fn same_grid(&self, other: &Self) -> bool {
        self.lower == other.lower
            && self.upper == other.upper
            && self.bins_per_axis == other.bins_per_axis
    }
}

/// ½·Σ|p̂₁ − p̂₂| over the shared grid. Requires identical grids.
pub fn empirical_tv(h1: &GridHistogram, h2: &GridHistogram) -> Result<f64> {
    if !h1.same_grid(h2) {
        return Err(Error::Invalid("empirical_tv: histograms use different grids".into()));
    }
    let p = h1.probabilities();
    let q = h2.probabilities();
    Ok(0.5 * p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Convenience: grid-TV between two point clouds on a common box grid.
pub fn tv_between(
    a: &[Vec<f64>],
    b: &[Vec<f64>],
    lower: Vec<f64>,
    upper: Vec<f64>,
    bins_per_axis: usize,
) -> Result<f64> {
    let ha = GridHistogram::from_points(lower.clone(), upper.clone(), bins_per_axis, a)?;
    let hb = GridHistogram::from_points(lower, upper, bins_per_axis, b)?;
    empirical_tv(&ha, &hb)
}

/// Outcome of one empirical-vs-theoretical comparison.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub bound_name: String,
    pub theoretical: f64,
    pub empirical: f64,
    pub stderr: f64,
    pub pass: bool,
}

impl BoundReport {
    pub fn new(bound_name: impl Into<String>, theoretical: f64, empirical: f64, stderr: f64) -> Self {
        assert!(stderr >= 0.0, "stderr must be nonnegative");
        BoundReport {
            bound_name: bound_name.into(),
            theoretical,
            empirical,
            stderr,
            pass: empirical <= theoretical + 3.0 * stderr,
        }
    }

    /// One CSV data row: `bound_name,theoretical,empirical,stderr,pass`.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.bound_name, self.theoretical, self.empirical, self.stderr, self.pass
        )
    }

    pub const CSV_HEADER: &'static str = "bound_name,theoretical,empirical,stderr,pass";
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let m = values.len();
    if m == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    if m == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1) as f64;
    (mean, (var / m as f64).sqrt())
}

fn binomial_se(p: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        (p * (1.0 - p) / n as f64).sqrt()
    }
}

/// Compare the replica-averaged boundary local-time functional
/// Σ h_K(ν_k)·mass_k over [0, T] against its theoretical budget (n+RL)·T/2.
pub fn local_time_budget(
    trajectories: &[Trajectory],
    body: &ConvexBody,
    potential: &Potential,
    t_horizon: f64,
) -> BoundReport {
    let totals: Vec<f64> = trajectories
        .iter()
        .map(|t| {
            t.local_time
                .iter()
                .filter(|e| e.time <= t_horizon * (1.0 + 1e-12))
                .map(|e| {
                    // h_K(ν) ≤ R·|ν|; if the iterative support evaluation
                    // fails, the cap only makes the check stricter.
                    let h = body
                        .support(&e.normal)
                        .unwrap_or_else(|_| body.circumradius() * norm(&e.normal));
                    h * e.mass
                })
                .sum()
        })
        .collect();
    let (mean, se) = mean_and_se(&totals);
    let n = body.dim() as f64;
    let bound = (n + body.circumradius() * potential.lipschitz_l()) * t_horizon / 2.0;
    BoundReport::new("local_time_budget", bound, mean, se)
}

/// Fraction of μ-samples within γ of the boundary against the theoretical
/// bound (n+RL)·γ/r.
pub fn boundary_mass_check(
    samples: &[Vec<f64>],
    body: &ConvexBody,
    potential: &Potential,
    gamma: f64,
) -> BoundReport {
    let hits = samples.iter().filter(|s| body.distance_to_boundary(s) <= gamma).count();
    let p = if samples.is_empty() { 0.0 } else { hits as f64 / samples.len() as f64 };
    let n = body.dim() as f64;
    let bound =
        (n + body.circumradius() * potential.lipschitz_l()) * gamma / body.inradius();
    BoundReport::new("boundary_mass", bound, p, binomial_se(p, samples.len()))
}

/// Empirical probability that the unconstrained driver
/// Z_{k+1} = Z_k − (η/2)∇f(Z_k) + √η·ξ leaves the γ-ball around its start
/// by time t, against the drift-speed bound (√(nt) + Lt)/γ. The walk is
/// never projected: the bound concerns the driving process, which coincides
/// with the chain until the first boundary contact.
#[allow(clippy::too_many_arguments)]
pub fn escape_probability_check(
    body: &ConvexBody,
    potential: &Potential,
    x_interior: &[f64],
    gamma: f64,
    t: f64,
    replicas: usize,
    eta: f64,
    seed: u64,
) -> Result<BoundReport> {
    if !body.membership(x_interior) {
        return Err(Error::Invalid("escape check: start must lie in K".into()));
    }
    if !(gamma > 0.0) || !(eta > 0.0) || t < 0.0 {
        return Err(Error::Invalid("escape check: gamma, eta must be positive and t nonnegative".into()));
    }
    let steps = (t / eta).round() as usize;
    let n = body.dim();
    let escaped: Vec<bool> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = chain_rng(replica_seed(seed, i));
            let mut z = x_interior.to_vec();
            let sqrt_eta = eta.sqrt();
            for _ in 0..steps {
                let grad = potential.grad(&z);
                let xi = normal_vec(&mut rng, n);
                for j in 0..n {
                    z[j] = (z[j] - eta / 2.0 * grad[j]) + sqrt_eta * xi[j];
                }
                if dist(&z, x_interior) > gamma {
                    return true;
                }
            }
            false
        })
        .collect();
    let p = if replicas == 0 { 0.0 } else { escaped.iter().filter(|&&e| e).count() as f64 / replicas as f64 };
    let bound = ((n as f64 * t).sqrt() + potential.lipschitz_l() * t) / gamma;
    Ok(BoundReport::new("escape", bound, p, binomial_se(p, replicas)))
}

/// The closed-form bounds the experiments compare against, with every
/// hidden constant set to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    /// min(m·t^{−1/2}, e^{−t/(2R²)}): mixing of the reflected dynamics.
    Mixing { m: f64, t: f64, r_big: f64 },
    /// (√(Lβ)/2)·(∫E|X−X̄|)^{1/2}: TV error from a W₁ path integral.
    TvW1 { l: f64, beta: f64, integral: f64 },
    /// (√(nt)+Lt)/γ: speed of Brownian motion with drift.
    Escape { n: usize, t: f64, l: f64, gamma: f64 },
    /// |x−x'|/√(2πt): reflection-coupling tail.
    Coupling { dist: f64, t: f64 },
}

pub fn evaluate_bound(bound: &Bound) -> Result<f64> {
    match *bound {
        Bound::Mixing { m, t, r_big } => {
            if !(t > 0.0) || !(r_big > 0.0) {
                return Err(Error::Invalid("mixing bound needs t > 0 and R > 0".into()));
            }
            Ok((m / t.sqrt()).min((-t / (2.0 * r_big * r_big)).exp()))
        }
        Bound::TvW1 { l, beta, integral } => {
            if l < 0.0 || beta < 0.0 || integral < 0.0 {
                return Err(Error::Invalid("tv_w1 bound needs nonnegative parameters".into()));
            }
            Ok((l * beta).sqrt() / 2.0 * integral.sqrt())
        }
        Bound::Escape { n, t, l, gamma } => {
            if !(gamma > 0.0) || t < 0.0 || l < 0.0 {
                return Err(Error::Invalid("escape bound needs gamma > 0, t, L ≥ 0".into()));
            }
            Ok(((n as f64 * t).sqrt() + l * t) / gamma)
        }
        Bound::Coupling { dist, t } => {
            if !(t > 0.0) || dist < 0.0 {
                return Err(Error::Invalid("coupling bound needs t > 0 and dist ≥ 0".into()));
            }
            Ok(dist / (2.0 * std::f64::consts::PI * t).sqrt())
        }
    }
}

/// Trapezoidal ∫gap·dt over the (time, gap) checkpoints of a coupled run;
/// feeds the `TvW1` bound.
pub fn checkpoint_time_integral(checkpoints: &[(f64, f64)]) -> f64 {
    checkpoints
        .windows(2)
        .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
        .sum()
}

/// Projected gradient descent for min_K f; exact enough for the envelope of
/// the rejection oracle (for the built-in potentials the minimizer is
/// interior or the problem is smooth and strongly convex near it).
pub fn minimize_over_body(
    body: &ConvexBody,
    potential: &Potential,
    iters: usize,
) -> Result<(Vec<f64>, f64)> {
    let mut x = body.project(&vec![0.0; body.dim()])?;
    let mut fx = potential.value(&x);
    let beta = potential.smooth_beta();
    let mut step = if beta > 0.0 { 1.0 / beta } else { body.inradius() };
    for _ in 0..iters {
        let g = potential.grad(&x);
        if norm(&g) == 0.0 {
            break;
        }
        let cand = body.project(&add_scaled(&x, -step, &g))?;
        let fc = potential.value(&cand);
        if fc < fx {
            x = cand;
            fx = fc;
        } else {
            step *= 0.5;
            if step < 1e-16 {
                break;
            }
        }
    }
    Ok((x, fx))
}

/// Exact i.i.d. samples from μ ∝ e^{−f}𝟙_K by rejection from the bounding
/// box with envelope e^{−min_K f}. Fails once the running acceptance rate
/// drops below `REJECTION_MIN_RATE` (after at least 10⁶ attempts) — the
/// advisable fix is a smaller dimension or tighter body.
pub fn rejection_oracle(
    body: &ConvexBody,
    potential: &Potential,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    Ok(rejection_oracle_with_stats(body, potential, count, seed)?.0)
}

/// Same as `rejection_oracle` but also reports the number of proposal
/// draws, so tests can verify acceptance rates.
pub fn rejection_oracle_with_stats(
    body: &ConvexBody,
    potential: &Potential,
    count: usize,
    seed: u64,
) -> Result<(Vec<Vec<f64>>, u64)> {
    let (lower, upper) = body.bounding_box();
    let n = body.dim();
    let (_, f_min) = minimize_over_body(body, potential, 500)?;
    let mut rng = chain_rng(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts: u64 = 0;
    use rand::Rng;
    while out.len() < count {
        attempts += 1;
        let x: Vec<f64> =
            (0..n).map(|d| lower[d] + (upper[d] - lower[d]) * rng.gen::<f64>()).collect();
        if body.membership(&x) {
            let accept_p = (-(potential.value(&x) - f_min)).exp();
            if rng.gen::<f64>() < accept_p {
                out.push(x);
            }
        }
        if attempts.is_multiple_of(65_536)
            && attempts >= 1_000_000
            && (out.len() as f64 / attempts as f64) < REJECTION_MIN_RATE
        {
            return Err(Error::Numeric(format!(
                "rejection oracle acceptance rate {:.2e} below {REJECTION_MIN_RATE:.0e} after {attempts} attempts; use a smaller dimension or a tighter body",
                out.len() as f64 / attempts as f64
            )));
        }
    }
    Ok((out, attempts))
}

/// Exact 1-D Wasserstein-1 distance between two empirical measures:
/// ∫|F̂_a − F̂_b| via a merged sweep over the pooled order statistics.
pub fn w1_1d(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Invalid("w1_1d: both samples must be nonempty".into()));
    }
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut w1 = 0.0;
    let mut prev = xa[0].min(xb[0]);
    while i < xa.len() || j < xb.len() {
        let next = match (xa.get(i), xb.get(j)) {
            (Some(&u), Some(&v)) => u.min(v),
            (Some(&u), None) => u,
            (None, Some(&v)) => v,
            (None, None) => break,
        };
        w1 += (i as f64 / na - j as f64 / nb).abs() * (next - prev);
        while i < xa.len() && xa[i] <= next {
            i += 1;
        }
        while j < xb.len() && xb[j] <= next {
            j += 1;
        }
        prev = next;
    }
    Ok(w1)
}

/// Reflection-coupling tail experiment: runs `replicas` coupled pairs from
/// (x, x_other) and reports, for each horizon in `ts`, the empirical
/// P(τ > t) against the coupling bound |x−x'|/√(2πt). Replicas run in
/// parallel; aggregation is by replica index, so results do not depend on
/// thread count.
#[allow(clippy::too_many_arguments)]
pub fn coupling_tail(
    body: &ConvexBody,
    potential: &Potential,
    x: &[f64],
    x_other: &[f64],
    eta: f64,
    ts: &[f64],
    replicas: usize,
    seed: u64,
    merge_radius: f64,
) -> Result<Vec<BoundReport>> {
    if ts.is_empty() || ts.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Invalid("coupling_tail: horizons must be positive".into()));
    }
    let t_max = ts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let d0 = dist(x, x_other);
    let taus: Vec<Option<f64>> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            reflection_coupled_pair_with_tol(
                body,
                potential,
                x,
                x_other,
                t_max,
                eta,
                replica_seed(seed, i),
                merge_radius,
            )
            .map(|p| p.tau)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut reports = Vec::with_capacity(ts.len());
    for &t in ts {
        let not_merged = taus.iter().filter(|tau| tau.is_none_or(|v| v > t)).count();
        let p = if replicas == 0 { 0.0 } else { not_merged as f64 / replicas as f64 };
        let bound = evaluate_bound(&Bound::Coupling { dist: d0, t })?;
        reports.push(BoundReport::new(format!("coupling_t={t}"), bound, p, binomial_se(p, replicas)));
    }
    Ok(reports)
}
