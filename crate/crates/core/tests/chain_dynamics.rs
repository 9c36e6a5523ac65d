// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::SQRT_2;

use mtkink_core::chain::{
    front_positions, init_kink_with_velocity, measure_speed, run, run_with_sink, total_energy,
    ChainState, InitialCondition, RunSpec, Sample, TrajectorySink,
};
use mtkink_core::kink::{kink_velocity, transfer_time, KinkProfile, VelocityMode};
use mtkink_core::{load_preset, roots_from_params, PhysicalParams};

fn paper() -> PhysicalParams {
    load_preset("paper").unwrap()
}

fn consistent_velocity(p: &PhysicalParams) -> f64 {
    let roots = roots_from_params(p).unwrap();
    kink_velocity(p, roots.d, VelocityMode::Consistent).unwrap()
}

fn kink_run(p: &PhysicalParams, n_grid: usize, sites: f64, initial: InitialCondition) -> RunSpec {
    let v = consistent_velocity(p);
    RunSpec {
        n_grid,
        dx: p.r0,
        dt: None,
        initial,
        t_end: sites * p.r0 / v,
        sample_every: 1000,
        level: None,
    }
}

#[test]
fn traveling_wave_fidelity() {
    let p = paper();
    let center = 600.0 * p.r0;
    let spec = kink_run(
        &p,
        2048,
        40.0,
        InitialCondition::Kink {
            center,
            velocity: None,
        },
    );
    let traj = run(&p, &spec).unwrap();
    let last = traj.final_state.unwrap();

    let roots = roots_from_params(&p).unwrap();
    let v = consistent_velocity(&p);
    let alpha = p.derive().unwrap().alpha(v).unwrap();
    let profile = KinkProfile::new(roots);
    let scale = p.well_scale();
    let moved = center + v * last.t;
    let worst = (0..last.len())
        .map(|n| {
            let xi = alpha * (last.position(n) - moved);
            (last.u[n] / scale - profile.value(xi)).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst < 0.02 * (roots.b - roots.a), "max deviation {worst}");
}

#[test]
fn friction_slows_the_front() {
    let p = paper();
    let start = InitialCondition::Kink {
        center: 600.0 * p.r0,
        velocity: None,
    };
    let base = measure_speed(&run(&p, &kink_run(&p, 2048, 30.0, start)).unwrap()).unwrap();
    let heavy = p.with_gamma(4.0 * p.gamma);
    let slow = measure_speed(&run(&heavy, &kink_run(&heavy, 2048, 10.0, start)).unwrap()).unwrap();
    assert!(slow.speed < base.speed);
    let predicted = consistent_velocity(&heavy);
    assert!((slow.speed / predicted - 1.0).abs() < 0.02);
}

#[test]
fn stationary_symmetric_kink_stays_put() {
    let p = paper().with_e_field(0.0);
    let center = 1024.0 * p.r0;
    let spec = RunSpec {
        n_grid: 2048,
        dx: p.r0,
        dt: None,
        initial: InitialCondition::Kink {
            center,
            velocity: None,
        },
        t_end: 2e-11,
        sample_every: 2000,
        level: None,
    };
    let traj = run(&p, &spec).unwrap();
    for x in &traj.front_x {
        assert!((x - center).abs() < p.r0, "front drifted to {x}");
    }
}

#[test]
fn damped_energy_never_increases() {
    let p = paper().with_e_field(0.0);
    let spec = RunSpec {
        n_grid: 2048,
        dx: p.r0,
        dt: None,
        initial: InitialCondition::Kink {
            center: 800.0 * p.r0,
            velocity: Some(20.0),
        },
        t_end: 4e-11,
        sample_every: 100,
        level: None,
    };
    let traj = run(&p, &spec).unwrap();
    let scale = traj.energies[0].abs();
    for w in traj.energies.windows(2) {
        assert!(w[1] <= w[0] + 1e-14 * scale, "{} -> {}", w[0], w[1]);
    }
    assert!(traj.energies.last().unwrap() < &traj.energies[0]);
}

#[test]
fn frictionless_energy_is_conserved() {
    let p = paper().with_e_field(0.0).with_gamma(0.0);
    let v0 = p.sound_velocity();
    let state = init_kink_with_velocity(&p, 2048, p.r0, 700.0 * p.r0, Some(0.01 * v0)).unwrap();
    let vacuum = ChainState::uniform(2048, p.r0, p, 1.0).unwrap();
    let excitation = total_energy(&state) - total_energy(&vacuum);
    let dt = mtkink_core::chain::auto_dt(&p, p.r0);
    let spec = RunSpec {
        n_grid: 2048,
        dx: p.r0,
        dt: Some(dt),
        initial: InitialCondition::Kink {
            center: 700.0 * p.r0,
            velocity: Some(0.01 * v0),
        },
        t_end: 100_000.0 * dt,
        sample_every: 1000,
        level: None,
    };
    let traj = run(&p, &spec).unwrap();
    assert!(traj.energy_drift() < 1e-3);
    // stricter: relative to the kink's own energy, not the vacuum background
    let e0 = traj.energies[0];
    let worst = traj
        .energies
        .iter()
        .map(|e| (e - e0).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-3 * excitation, "{worst} vs {excitation}");
    // the boosted kink moved
    let last = traj.front_x.last().unwrap();
    assert!(last - traj.front_x[0] > 50.0 * p.r0);
}

#[test]
fn kink_energy_matches_lattice_closed_form() {
    // Static σ = 0 kink; its energy above the vacuum in the continuum limit is
    // (1/R0)·∫ [½Mv0²u_x² + ¼B(u² − A/B)²] dx = (2√2/3)·√(M v0²)·A^{3/2}/(B·R0).
    let p = paper().with_e_field(0.0);
    let state = init_kink_with_velocity(&p, 2048, p.r0, 1024.0 * p.r0, Some(0.0)).unwrap();
    let vacuum = ChainState::uniform(2048, p.r0, p, 1.0).unwrap();
    let excess = total_energy(&state) - total_energy(&vacuum);
    let v0 = p.sound_velocity();
    let closed = 2.0 * SQRT_2 / 3.0 * (p.mass * v0 * v0).sqrt() * p.a.powf(1.5) / (p.b * p.r0);
    assert!((excess / closed - 1.0).abs() < 1e-2, "{excess} vs {closed}");
}

struct FrontCounter {
    level: f64,
    samples: Vec<(usize, f64)>,
}

impl TrajectorySink for FrontCounter {
    fn record(&mut self, s: &Sample<'_>) -> mtkink_core::Result<()> {
        let fronts = front_positions(s.state, self.level);
        let gap = if fronts.len() == 2 {
            fronts[1] - fronts[0]
        } else {
            0.0
        };
        self.samples.push((fronts.len(), gap));
        Ok(())
    }
}

fn pair_run(
    p: &PhysicalParams,
    n: usize,
    kink: f64,
    antikink: f64,
    sites: f64,
) -> Vec<(usize, f64)> {
    let spec = RunSpec {
        n_grid: n,
        dx: p.r0,
        dt: None,
        initial: InitialCondition::KinkAntikink {
            kink_center: kink * p.r0,
            antikink_center: antikink * p.r0,
        },
        t_end: sites * p.r0 / consistent_velocity(p),
        sample_every: 1000,
        level: None,
    };
    let roots = roots_from_params(p).unwrap();
    let mut counter = FrontCounter {
        level: 0.5 * (roots.a + roots.b),
        samples: Vec::new(),
    };
    run_with_sink(p, &spec, &mut counter).unwrap();
    counter.samples
}

#[test]
fn separated_pair_keeps_two_fronts() {
    let p = paper();
    let samples = pair_run(&p, 2048, 512.0, 1536.0, 40.0);
    assert!(samples.iter().all(|&(count, _)| count == 2), "{samples:?}");
    // the a-domain between them shrinks at about 2v
    let first = samples.first().unwrap().1;
    let last = samples.last().unwrap().1;
    let shrink = (first - last) / p.r0;
    assert!(
        (shrink / 80.0 - 1.0).abs() < 0.05,
        "shrank by {shrink} sites"
    );
}

#[test]
fn close_pair_annihilates() {
    let p = paper();
    let samples = pair_run(&p, 512, 150.0, 362.0, 40.0);
    assert_eq!(samples[0].0, 2);
    let gone = samples
        .iter()
        .position(|&(c, _)| c == 0)
        .expect("pair never annihilated");
    assert!(samples[..gone].iter().all(|&(c, _)| c == 2));
    assert!(samples[gone..].iter().all(|&(c, _)| c == 0));
}

#[test]
fn transfer_time_from_simulated_speed() {
    let p = paper();
    let start = InitialCondition::Kink {
        center: 600.0 * p.r0,
        velocity: None,
    };
    let fit = measure_speed(&run(&p, &kink_run(&p, 2048, 30.0, start)).unwrap()).unwrap();
    let t = transfer_time(1e-6, fit.speed).unwrap();
    assert!((2.5e-7..1e-6).contains(&t), "t_T = {t}");
}
