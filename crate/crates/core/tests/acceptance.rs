//! Acceptance battery: ten numbered criteria, each printing one
//! `criterion NN <name>: PASS/FAIL` line (run with `--nocapture` to see the
//! full checklist) before asserting. Tolerances and budgets are pinned in
//! the constants below, not tuned per run.
//!
//! Criteria 02, 03, 05 and 08 are currently red. Each carries a comment
//! with the measured cause; the companion `supplementary` suite
//! demonstrates that the same machinery meets the targets once the pinned
//! step-size/merge parameters are relaxed, isolating the failures to those
//! parameters rather than the implementation.

use std::time::Instant;

use logcave::config::{body_from_alias, reference_volume};
use logcave::diagnostics::{
    boundary_mass_check, coupling_tail, escape_probability_check, local_time_budget,
    rejection_oracle, tv_between, w1_1d,
};
use logcave::geometry::ConvexBody;
use logcave::potential::Potential;
use logcave::rng::{chain_rng, normal_vec, replica_seed, uniform_in_ball};
use logcave::sampler::{
    coupled_resolution_run, merge_tol, practical_eta, run_lmc, schedule_theorem1, SamplerConfig,
    ScheduleCase,
};
use logcave::volume::{build_schedule_with, estimate_volume, SamplerKind};
use rayon::prelude::*;

const GEOMETRY_INSTANCES: usize = 1000;
const GEOMETRY_ORACLE_TOL: f64 = 1e-6;
const DUALITY_SLACK: f64 = 1e-5;
const STATIONARITY_TV_MAX: f64 = 0.1;
const STATIONARITY_BASELINE_FACTOR: f64 = 2.0;
const W1_MAX: f64 = 0.05;
const GAP_TREND_MIN_SLOPE: f64 = 0.2;
const VOLUME_REL_TOL: f64 = 0.15;
const VOLUME_SEEDS: u64 = 5;

fn report(num: u32, name: &str, pass: bool, detail: &str) -> bool {
    let verdict = if pass { "PASS" } else { "FAIL" };
    if detail.is_empty() {
        println!("criterion {num:02} {name}: {verdict}");
    } else {
        println!("criterion {num:02} {name}: {verdict} ({detail})");
    }
    pass
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64;
    (m, var.sqrt())
}

#[test]
fn criterion_01_geometry_properties() {
    let started = Instant::now();
    let bodies: Vec<(&str, ConvexBody)> = vec![
        ("ball", ConvexBody::ball(3, 1.3).unwrap()),
        ("box", ConvexBody::axis_box(vec![-1.0, -0.5, -2.0], vec![0.75, 1.5, 1.0]).unwrap()),
        (
            "polytope",
            ConvexBody::polytope(
                vec![vec![1.0, 1.0], vec![-1.0, 0.5], vec![0.0, -1.0], vec![1.0, -2.0]],
                vec![1.0, 0.8, 1.0, 1.5],
                5.0,
            )
            .unwrap(),
        ),
        ("boxball", body_from_alias("boxball2").unwrap().unwrap()),
    ];
    let mut failures: Vec<String> = Vec::new();
    for (label, body) in &bodies {
        let n = body.dim();
        // closed-form projections land exactly in K; iterative ones only to
        // the projection tolerance, which the idempotence check measures
        let exact_kind = matches!(*label, "ball" | "box");
        let mut rng = chain_rng(0xAC5E);
        for k in 0..GEOMETRY_INSTANCES {
            let scale = body.circumradius() * 3.0;
            let x: Vec<f64> = normal_vec(&mut rng, n).iter().map(|v| v * scale).collect();
            let y: Vec<f64> = normal_vec(&mut rng, n).iter().map(|v| v * scale).collect();
            let px = body.project(&x).unwrap();
            let py = body.project(&y).unwrap();
            // nonexpansiveness
            if dist(&px, &py) > dist(&x, &y) + 1e-7 {
                failures.push(format!("{label}[{k}]: projection expanded"));
                break;
            }
            // idempotence
            let ppx = body.project(&px).unwrap();
            if dist(&ppx, &px) > 1e-7 {
                failures.push(format!("{label}[{k}]: projection not idempotent"));
                break;
            }
            if exact_kind && !body.membership(&px) {
                failures.push(format!("{label}[{k}]: projection left the body"));
                break;
            }
            // gauge/support duality: ⟨x,y⟩ ≤ gauge(x)·h_K(y) for every x, y
            let g = body.gauge(&x);
            let h = body.support(&y).unwrap();
            if dot(&x, &y) > g * h * (1.0 + DUALITY_SLACK) + 1e-9 {
                failures.push(format!(
                    "{label}[{k}]: duality violated: ⟨x,y⟩={} > gauge·support={}",
                    dot(&x, &y),
                    g * h
                ));
                break;
            }
        }
    }
    // Dykstra vs the analytic oracle: the boxball2 ball (radius √2/2) lies
    // inside the cube, so the intersection projection is the radial one.
    let boxball = body_from_alias("boxball2").unwrap().unwrap();
    let r = 0.5f64.sqrt();
    let mut rng = chain_rng(0xD1CE);
    for k in 0..GEOMETRY_INSTANCES {
        let x: Vec<f64> = normal_vec(&mut rng, 2).iter().map(|v| v * 3.0).collect();
        let p = boxball.project(&x).unwrap();
        let nx = norm(&x);
        let oracle = if nx <= r { x.clone() } else { x.iter().map(|v| v * r / nx).collect() };
        if dist(&p, &oracle) > GEOMETRY_ORACLE_TOL {
            failures.push(format!("dykstra[{k}]: {p:?} vs radial {oracle:?}"));
            break;
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    let ok = failures.is_empty() && elapsed < 10.0;
    let detail = if failures.is_empty() {
        format!("{GEOMETRY_INSTANCES} instances/kind, {elapsed:.1}s")
    } else {
        format!("{}; {elapsed:.1}s", failures.join("; "))
    };
    assert!(report(1, "geometry properties", ok, &detail), "{detail}");
}

#[test]
fn criterion_02_stationarity_oracle() {
    // Pinned parameters: uniform on [−1,1]², practical η = 1/n² = 0.25,
    // N = 2·10⁵, burn-in half, 20×20 grid. Red: at η = 0.25 the chain's
    // per-step noise has scale 0.5, so roughly half of all pre-points fall
    // outside the square and project onto the boundary; the stationary law
    // of the discrete chain carries that boundary atom and its grid-TV to
    // the uniform oracle measures ≈ 0.37, far above both thresholds. The
    // same chain at η = 0.005 (supplementary suite) reaches TV ≈ 0.07.
    let started = Instant::now();
    let body = ConvexBody::axis_box(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
    let uniform = Potential::uniform();
    let eta = practical_eta(&uniform, 2);
    let steps = 200_000;
    let traj = run_lmc(&body, &uniform, &SamplerConfig::new(eta, steps, 1001)).unwrap();
    let chain: Vec<Vec<f64>> = traj.states[steps / 2..].to_vec();
    let m = chain.len();
    let oracle = rejection_oracle(&body, &uniform, m, 2002).unwrap();
    let base_a = rejection_oracle(&body, &uniform, m, 3003).unwrap();
    let base_b = rejection_oracle(&body, &uniform, m, 4004).unwrap();
    let grid = |a: &[Vec<f64>], b: &[Vec<f64>]| {
        tv_between(a, b, vec![-1.0, -1.0], vec![1.0, 1.0], 20).unwrap()
    };
    let tv = grid(&chain, &oracle);
    let baseline = grid(&base_a, &base_b);
    let elapsed = started.elapsed().as_secs_f64();
    let ok = tv <= STATIONARITY_TV_MAX && tv <= STATIONARITY_BASELINE_FACTOR * baseline && elapsed < 30.0;
    let detail = format!("eta={eta} TV={tv:.4} baseline={baseline:.4} {elapsed:.1}s");
    assert!(report(2, "stationarity oracle", ok, &detail), "{detail}");
}

#[test]
fn criterion_03_gaussian_interval_w1() {
    // Pinned parameters: σ = 1 on [−1,1] gives β = 1, so the practical rule
    // η = 1/(βn²) = 1. Red: a unit step size on a width-2 interval drives
    // almost every pre-point outside and the chain oscillates between
    // boundary atoms near ±1; W₁ to the truncated Gaussian ≈ 0.19. The same
    // chain at η = 0.01 (supplementary suite) reaches W₁ ≈ 0.01.
    let started = Instant::now();
    let body = ConvexBody::axis_box(vec![-1.0], vec![1.0]).unwrap();
    let gauss = Potential::gaussian(1.0, body.circumradius()).unwrap();
    let eta = practical_eta(&gauss, 1);
    let steps = 100_000;
    let traj = run_lmc(&body, &gauss, &SamplerConfig::new(eta, steps, 11)).unwrap();
    let chain: Vec<f64> = traj.states[steps / 2..].iter().map(|s| s[0]).collect();
    let oracle: Vec<f64> =
        rejection_oracle(&body, &gauss, steps, 12).unwrap().iter().map(|s| s[0]).collect();
    let w1 = w1_1d(&chain, &oracle).unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    let ok = w1 <= W1_MAX && elapsed < 10.0;
    let detail = format!("eta={eta} W1={w1:.4} {elapsed:.1}s");
    assert!(report(3, "gaussian interval W1", ok, &detail), "{detail}");
}

#[test]
fn criterion_04_local_time_budget() {
    let started = Instant::now();
    let body = ConvexBody::ball(3, 1.0).unwrap();
    let uniform = Potential::uniform();
    let eta = 1e-3;
    let trajectories: Vec<_> = (0..200)
        .into_par_iter()
        .map(|i| {
            run_lmc(&body, &uniform, &SamplerConfig::new(eta, 1000, replica_seed(40, i))).unwrap()
        })
        .collect();
    let r = local_time_budget(&trajectories, &body, &uniform, 1.0);
    let elapsed = started.elapsed().as_secs_f64();
    let ok = r.pass && elapsed < 30.0;
    let detail = format!(
        "empirical={:.4} bound={:.4} se={:.4} {elapsed:.1}s",
        r.empirical, r.theoretical, r.stderr
    );
    assert!(report(4, "local-time budget", ok, &detail), "{detail}");
}

#[test]
fn criterion_05_reflection_coupling_tail() {
    // Pinned parameters: Ball(1) in n = 3, |x−x'| = 1, η = 10⁻³, default
    // merge radius 10⁻³·√η ≈ 3.2·10⁻⁵. Red: the coupled difference walk
    // moves ≈ 2√η ≈ 0.06 per step along the mirror axis, three orders wider
    // than the merge window, so crossings almost never land inside it and
    // P(τ > t) stays ≈ 1 against bounds of 0.80/0.56/0.40. A merge radius
    // at the walk's own resolution √η (supplementary suite) reproduces the
    // continuous-coupling tail and passes all three horizons.
    let started = Instant::now();
    let body = ConvexBody::ball(3, 1.0).unwrap();
    let uniform = Potential::uniform();
    let eta = 1e-3;
    let x = vec![0.5, 0.0, 0.0];
    let y = vec![-0.5, 0.0, 0.0];
    let reports = coupling_tail(
        &body,
        &uniform,
        &x,
        &y,
        eta,
        &[0.25, 0.5, 1.0],
        2000,
        21,
        merge_tol(eta),
    )
    .unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    let all_pass = reports.iter().all(|r| r.pass);
    let ok = all_pass && elapsed < 60.0;
    let detail = reports
        .iter()
        .map(|r| format!("{}: {:.3} vs {:.3}", r.bound_name, r.empirical, r.theoretical))
        .collect::<Vec<_>>()
        .join(", ")
        + &format!(", {elapsed:.1}s");
    assert!(report(5, "reflection-coupling tail", ok, &detail), "{detail}");
}

#[test]
fn criterion_06_discretization_gap_trend() {
    let started = Instant::now();
    let body = ConvexBody::ball(3, 1.0).unwrap();
    let uniform = Potential::uniform();
    let etas = [1e-2, 1e-3, 1e-4];
    let mut means = Vec::new();
    for &eta in &etas {
        let gaps: Vec<f64> = (0..200)
            .into_par_iter()
            .map(|i| {
                coupled_resolution_run(&body, &uniform, eta, 16, 1.0, replica_seed(600, i))
                    .unwrap()
                    .gap
            })
            .collect();
        means.push(gaps.iter().sum::<f64>() / gaps.len() as f64);
    }
    let decreasing = means[0] > means[1] && means[1] > means[2];
    // least-squares slope of ln(gap) against ln(eta)
    let xs: Vec<f64> = etas.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = means.iter().map(|g| g.ln()).collect();
    let xm = xs.iter().sum::<f64>() / 3.0;
    let ym = ys.iter().sum::<f64>() / 3.0;
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xm) * (y - ym))
        .sum::<f64>()
        / xs.iter().map(|x| (x - xm) * (x - xm)).sum::<f64>();
    let elapsed = started.elapsed().as_secs_f64();
    let ok = decreasing && slope >= GAP_TREND_MIN_SLOPE && elapsed < 60.0;
    let detail = format!(
        "gaps=[{:.4}, {:.4}, {:.4}] slope={slope:.3} {elapsed:.1}s",
        means[0], means[1], means[2]
    );
    assert!(report(6, "discretization gap trend", ok, &detail), "{detail}");
}

#[test]
fn criterion_07_boundary_mass() {
    let started = Instant::now();
    let body = ConvexBody::ball(2, 1.0).unwrap();
    let uniform = Potential::uniform();
    let samples = rejection_oracle(&body, &uniform, 100_000, 70).unwrap();
    let r = boundary_mass_check(&samples, &body, &uniform, 0.1);
    let elapsed = started.elapsed().as_secs_f64();
    // true shell mass 1 − 0.9² = 0.19, bound (n+RL)γ/r = 0.2
    let sane = (r.empirical - 0.19).abs() < 0.01 && (r.theoretical - 0.2).abs() < 1e-12;
    let ok = r.pass && sane && elapsed < 5.0;
    let detail = format!("empirical={:.4} bound={:.4} {elapsed:.1}s", r.empirical, r.theoretical);
    assert!(report(7, "boundary-mass lemma", ok, &detail), "{detail}");
}

#[test]
fn criterion_08_volume() {
    // Red on the LMC side: with the per-phase rule η = σ_ℓ²/n², the Euler
    // chain's stationary law has per-coordinate variance inflated by
    // ≈ (1 + η β/2)^... compounding across phases, plus boundary atoms at
    // the late wide-Gaussian phases; the measured bias is +39% to +72%
    // depending on the body, far outside 15%, which also breaks the
    // LMC-vs-hit-and-run 2σ agreement. Hit-and-run, which has no step-size
    // parameter, lands within ≈ 5% on every body.
    let bodies = ["box2", "box5", "ball3", "boxball2"];
    let mut failures: Vec<String> = Vec::new();
    let mut details: Vec<String> = Vec::new();
    for label in bodies {
        let body_started = Instant::now();
        let body = body_from_alias(label).unwrap().unwrap();
        let reference = reference_volume(label);
        let mut means = Vec::new();
        let mut sds = Vec::new();
        for kind in [SamplerKind::Lmc, SamplerKind::HitAndRun] {
            let schedule = build_schedule_with(&body, 2000, kind);
            let values: Vec<f64> = (0..VOLUME_SEEDS)
                .into_par_iter()
                .map(|seed| estimate_volume(&body, &schedule, seed).unwrap().value)
                .collect();
            let (m, sd) = mean_sd(&values);
            if (m / reference - 1.0).abs() > VOLUME_REL_TOL {
                failures.push(format!(
                    "{label}/{}: mean {m:.3} vs reference {reference:.3}",
                    kind.as_str()
                ));
            }
            means.push(m);
            sds.push(sd);
        }
        let gap = (means[0] - means[1]).abs();
        let two_sigma = 2.0 * (sds[0] * sds[0] + sds[1] * sds[1]).sqrt();
        if gap > two_sigma {
            failures.push(format!("{label}: samplers disagree, |Δ|={gap:.3} > 2σ={two_sigma:.3}"));
        }
        let body_elapsed = body_started.elapsed().as_secs_f64();
        if body_elapsed >= 120.0 {
            failures.push(format!("{label}: {body_elapsed:.0}s over budget"));
        }
        details.push(format!(
            "{label}: lmc={:.3} hr={:.3} ref={reference:.3} {body_elapsed:.0}s",
            means[0], means[1]
        ));
    }
    let ok = failures.is_empty();
    let detail = if ok { details.join("; ") } else { failures.join("; ") };
    assert!(report(8, "volume", ok, &detail), "{detail}");
}

#[test]
fn criterion_09_schedule_calculator() {
    let started = Instant::now();
    let (eta, steps) = schedule_theorem1(10, 2.0, 0.1, ScheduleCase::Uniform, 0.0, 0.0).unwrap();
    let eta_ok = (eta / 5.1195637021595016e-18 - 1.0).abs() < 1e-12;
    let steps_ok = (steps / 1.799047908729241e18 - 1.0).abs() < 1e-12;
    // closed form written out independently
    let nf: f64 = 10.0;
    let expect_eta = 0.1f64.powi(8) / (2.0f64.powi(4) * nf.powi(7) * nf.ln().powi(3));
    let expect_steps = 2.0f64.powi(6) * nf.powi(7) * nf.ln().powi(4) / 0.1f64.powi(8);
    let formula_ok =
        (eta / expect_eta - 1.0).abs() < 1e-14 && (steps / expect_steps - 1.0).abs() < 1e-14;
    // general case: n⋆ responds to RL and Rβ
    let base = schedule_theorem1(10, 2.0, 0.1, ScheduleCase::General, 0.0, 0.0).unwrap();
    let lifted = schedule_theorem1(10, 2.0, 0.1, ScheduleCase::General, 10.0, 0.0).unwrap();
    // n⋆ jumps from 10 to RL = 20: N scales by 2¹², η by 2⁻¹²
    let nstar_ok = (lifted.1 / base.1 / 4096.0 - 1.0).abs() < 1e-9
        && (base.0 / lifted.0 / 4096.0 - 1.0).abs() < 1e-9;
    let elapsed = started.elapsed().as_secs_f64();
    let ok = eta_ok && steps_ok && formula_ok && nstar_ok && elapsed < 5.0;
    let detail = format!("eta={eta:.3e} N={steps:.3e} {elapsed:.2}s");
    assert!(report(9, "schedule calculator", ok, &detail), "{detail}");
}

#[test]
fn criterion_10_determinism() {
    let started = Instant::now();
    let mut failures: Vec<String> = Vec::new();
    let body = ConvexBody::ball(3, 1.0).unwrap();
    let box2 = ConvexBody::axis_box(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
    let uniform = Potential::uniform();

    // bitwise rerun of the chain
    let cfg = SamplerConfig::new(0.01, 20_000, 5);
    let t1 = run_lmc(&box2, &uniform, &cfg).unwrap();
    let t2 = run_lmc(&box2, &uniform, &cfg).unwrap();
    if t1.states != t2.states {
        failures.push("run_lmc rerun differs".into());
    }

    // bitwise rerun of the volume pipeline
    let schedule = build_schedule_with(&box2, 500, SamplerKind::Lmc);
    let v1 = estimate_volume(&box2, &schedule, 5).unwrap();
    let v2 = estimate_volume(&box2, &schedule, 5).unwrap();
    if v1.value.to_bits() != v2.value.to_bits() {
        failures.push("estimate_volume rerun differs".into());
    }

    // replica-parallel experiments must not depend on the pool size
    let pool = |threads: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
    };
    let escape = |p: &rayon::ThreadPool| {
        p.install(|| {
            escape_probability_check(&body, &uniform, &[0.0; 3], 0.5, 0.5, 500, 1e-3, 77)
                .unwrap()
                .empirical
        })
    };
    let e1 = escape(&pool(1));
    let e4 = escape(&pool(4));
    if e1.to_bits() != e4.to_bits() {
        failures.push(format!("escape check thread-dependent: {e1} vs {e4}"));
    }
    let tail = |p: &rayon::ThreadPool| {
        p.install(|| {
            coupling_tail(
                &body,
                &uniform,
                &[0.3, 0.0, 0.0],
                &[-0.3, 0.0, 0.0],
                1e-2,
                &[0.25],
                200,
                13,
                0.1,
            )
            .unwrap()[0]
                .empirical
        })
    };
    let c1 = tail(&pool(1));
    let c4 = tail(&pool(4));
    if c1.to_bits() != c4.to_bits() {
        failures.push(format!("coupling tail thread-dependent: {c1} vs {c4}"));
    }

    // oracle and schedule reruns
    let o1 = rejection_oracle(&box2, &uniform, 1000, 99).unwrap();
    let o2 = rejection_oracle(&box2, &uniform, 1000, 99).unwrap();
    if o1 != o2 {
        failures.push("rejection oracle rerun differs".into());
    }
    let s1 = schedule_theorem1(10, 2.0, 0.1, ScheduleCase::Uniform, 0.0, 0.0).unwrap();
    let s2 = schedule_theorem1(10, 2.0, 0.1, ScheduleCase::Uniform, 0.0, 0.0).unwrap();
    if s1 != s2 {
        failures.push("schedule rerun differs".into());
    }

    // independent replica streams really are distinct
    let mut seeds: Vec<u64> = (0..100).map(|i| replica_seed(5, i)).collect();
    seeds.sort_unstable();
    seeds.dedup();
    if seeds.len() != 100 {
        failures.push("replica seeds collide".into());
    }
    // sanity: library RNG helpers are reproducible
    let mut r1 = chain_rng(1);
    let mut r2 = chain_rng(1);
    if uniform_in_ball(&mut r1, 3, 1.0) != uniform_in_ball(&mut r2, 3, 1.0) {
        failures.push("chain_rng streams differ".into());
    }

    let elapsed = started.elapsed().as_secs_f64();
    let ok = failures.is_empty() && elapsed < 60.0;
    let detail =
        if ok { format!("{elapsed:.1}s") } else { format!("{}; {elapsed:.1}s", failures.join("; ")) };
    assert!(report(10, "determinism", ok, &detail), "{detail}");
}
