//! Companion experiments to the acceptance battery. The red acceptance
//! criteria pin step-size/merge parameters at which the targets are out of
//! reach; these tests run the identical machinery at resolutions where the
//! targets are met, isolating each failure to its pinned parameter.

use logcave::config::body_from_alias;
use logcave::diagnostics::{coupling_tail, rejection_oracle, tv_between, w1_1d};
use logcave::geometry::ConvexBody;
use logcave::potential::Potential;
use logcave::sampler::{run_lmc, SamplerConfig};
use logcave::volume::{build_schedule_with, estimate_volume, SamplerKind};
use rayon::prelude::*;

fn box2() -> ConvexBody {
    ConvexBody::axis_box(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap()
}

fn chain_tail(body: &ConvexBody, potential: &Potential, eta: f64, steps: usize, seed: u64) -> Vec<Vec<f64>> {
    let traj = run_lmc(body, potential, &SamplerConfig::new(eta, steps, seed)).unwrap();
    traj.states[steps / 2..].to_vec()
}

fn grid_tv(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    tv_between(a, b, vec![-1.0, -1.0], vec![1.0, 1.0], 20).unwrap()
}

#[test]
fn stationarity_holds_at_fine_eta() {
    // identical setup to the stationarity criterion, but eta = 0.005
    let body = box2();
    let uniform = Potential::uniform();
    let chain = chain_tail(&body, &uniform, 0.005, 200_000, 1001);
    let oracle = rejection_oracle(&body, &uniform, chain.len(), 2002).unwrap();
    let tv = grid_tv(&chain, &oracle);
    assert!(tv <= 0.12, "fine-step TV should clear the target, got {tv}");
}

#[test]
fn grid_tv_decreases_with_eta() {
    let body = box2();
    let uniform = Potential::uniform();
    let oracle = rejection_oracle(&body, &uniform, 100_001, 2002).unwrap();
    let tvs: Vec<f64> = [0.25, 0.05, 0.01]
        .iter()
        .map(|&eta| grid_tv(&chain_tail(&body, &uniform, eta, 200_000, 1001), &oracle))
        .collect();
    assert!(
        tvs[0] > tvs[1] && tvs[1] > tvs[2],
        "TV should fall as eta shrinks, got {tvs:?}"
    );
}

#[test]
fn w1_holds_at_fine_eta() {
    // identical setup to the interval-Gaussian criterion, but eta = 0.01
    let body = ConvexBody::axis_box(vec![-1.0], vec![1.0]).unwrap();
    let gauss = Potential::gaussian(1.0, body.circumradius()).unwrap();
    let steps = 100_000;
    let traj = run_lmc(&body, &gauss, &SamplerConfig::new(0.01, steps, 11)).unwrap();
    let chain: Vec<f64> = traj.states[steps / 2..].iter().map(|s| s[0]).collect();
    let oracle: Vec<f64> =
        rejection_oracle(&body, &gauss, steps, 12).unwrap().iter().map(|s| s[0]).collect();
    let w1 = w1_1d(&chain, &oracle).unwrap();
    assert!(w1 <= 0.05, "fine-step W1 should clear the target, got {w1}");
}

#[test]
fn w1_decreases_with_eta() {
    let body = ConvexBody::axis_box(vec![-1.0], vec![1.0]).unwrap();
    let gauss = Potential::gaussian(1.0, body.circumradius()).unwrap();
    let steps = 100_000;
    let oracle: Vec<f64> =
        rejection_oracle(&body, &gauss, steps, 12).unwrap().iter().map(|s| s[0]).collect();
    let w1s: Vec<f64> = [1.0, 0.1, 0.01]
        .iter()
        .map(|&eta| {
            let traj = run_lmc(&body, &gauss, &SamplerConfig::new(eta, steps, 11)).unwrap();
            let chain: Vec<f64> = traj.states[steps / 2..].iter().map(|s| s[0]).collect();
            w1_1d(&chain, &oracle).unwrap()
        })
        .collect();
    assert!(
        w1s[0] > w1s[1] && w1s[1] > w1s[2],
        "W1 should fall as eta shrinks, got {w1s:?}"
    );
}

#[test]
fn coupling_tail_passes_at_walk_scale_merge() {
    // identical setup to the coupling criterion, but the merge radius is
    // sqrt(eta) — the difference walk's own per-step resolution — instead
    // of 1e-3·sqrt(eta); the discrete tail then tracks the continuous bound
    let body = ConvexBody::ball(3, 1.0).unwrap();
    let uniform = Potential::uniform();
    let eta = 1e-3;
    let reports = coupling_tail(
        &body,
        &uniform,
        &[0.5, 0.0, 0.0],
        &[-0.5, 0.0, 0.0],
        eta,
        &[0.25, 0.5, 1.0],
        2000,
        21,
        eta.sqrt(),
    )
    .unwrap();
    for r in &reports {
        assert!(
            r.pass,
            "{} should pass at walk-scale merge: {} vs {}",
            r.bound_name, r.empirical, r.theoretical
        );
    }
    // and the tail is genuinely nontrivial (not merging instantly)
    assert!(reports[0].empirical > 0.2, "tail collapsed: {}", reports[0].empirical);
}

#[test]
fn volume_spread_shrinks_with_samples_per_phase() {
    // inter-seed standard deviation over 10 seeds, base vs doubled
    // samples-per-phase; the ratio should sit near sqrt(2)
    let body = body_from_alias("box2").unwrap().unwrap();
    let spread = |spp: usize, base: u64| -> f64 {
        let schedule = build_schedule_with(&body, spp, SamplerKind::HitAndRun);
        let vals: Vec<f64> = (base..base + 10)
            .into_par_iter()
            .map(|seed| estimate_volume(&body, &schedule, seed).unwrap().value)
            .collect();
        let m = vals.iter().sum::<f64>() / vals.len() as f64;
        (vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (vals.len() - 1) as f64).sqrt()
    };
    // A 10-seed SD estimate carries ~30% relative noise, so the ratio of
    // two of them scatters widely around sqrt(2); the seed block is pinned
    // to keep this a deterministic regression check rather than a coin flip.
    let ratio = spread(500, 500) / spread(1000, 500);
    assert!(
        (1.2..=1.7).contains(&ratio),
        "spread ratio should be near sqrt(2), got {ratio}"
    );
}
