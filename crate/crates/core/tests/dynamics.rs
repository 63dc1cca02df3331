mod common;

use common::*;
use tersoff_core::kernels::{BackendSpec, KernelVariant, VariantTag};
use tersoff_core::system::{
    gen_nanotube, maxwell_boltzmann, run, run_stretch, velocity_verlet_step, ForceField, RunConfig, StretchSpec,
    NANOTUBE_BOND,
};
use tersoff_core::{Evaluator, ParamTable, Precision, SimulationState};

fn tube(temperature: f64) -> SimulationState {
    let mut s = gen_nanotube(5, 10, NANOTUBE_BOND).unwrap();
    if temperature > 0.0 {
        maxwell_boltzmann(&mut s, temperature, 7).unwrap();
    }
    s
}

fn evaluator(variant: KernelVariant) -> Evaluator {
    Evaluator::new(ParamTable::carbon(), variant).unwrap()
}

fn vec_i(w: usize, strict: bool) -> KernelVariant {
    let backend = if strict {
        BackendSpec::emulated_strict(w, Precision::Double)
    } else {
        BackendSpec::emulated(w, Precision::Double)
    };
    KernelVariant::new(VariantTag::VecI, backend).unwrap()
}

#[test]
fn nanotube_nve_conserves_energy_force_and_momentum() {
    let variants = [
        KernelVariant::reference(Precision::Double),
        KernelVariant::scalar_opt(Precision::Double),
        KernelVariant::new(VariantTag::VecJ, BackendSpec::emulated(8, Precision::Double)).unwrap(),
        vec_i(8, false),
    ];
    for v in variants {
        let mut s = tube(300.0);
        let n = s.n_atoms() as f64;
        let mut ff = evaluator(v);
        let summary = run(&mut s, &mut ff, &RunConfig::nve(0.5, 1000), &mut |_, _| Ok(())).unwrap();
        assert_eq!(summary.records.len(), 1001);
        assert!(summary.max_relative_drift() <= 1e-4, "{v}: drift {:e}", summary.max_relative_drift());
        assert!(summary.max_net_force() <= 1e-9 * n, "{v}: net force {:e}", summary.max_net_force());
        assert!(summary.max_momentum_change() <= 1e-9 * n, "{v}: momentum {:e}", summary.max_momentum_change());
        assert!(ff.times().rebuilds >= 1, "thermal motion should trigger a rebuild");
    }
}

#[test]
fn reference_and_vectorized_trajectories_coincide() {
    let start = tube(600.0);
    let mut a = start.clone();
    let mut b = start;
    let cfg = RunConfig::nve(0.5, 100);
    run(&mut a, &mut evaluator(KernelVariant::reference(Precision::Double)), &cfg, &mut |_, _| Ok(())).unwrap();
    run(&mut b, &mut evaluator(vec_i(4, true)), &cfg, &mut |_, _| Ok(())).unwrap();
    let worst = a
        .positions
        .iter()
        .zip(&b.positions)
        .flat_map(|(p, q)| (0..3).map(move |k| (p[k] - q[k]).abs()))
        .fold(0.0, f64::max);
    assert!(worst <= 1e-6, "{worst:e}");
}

fn stretch_cfg(steps: usize) -> RunConfig {
    RunConfig { dt: 0.5, steps, stretch: Some(StretchSpec { axis: 2, grip_width: 1.5, speed: 0.02 }) }
}

/// Quenched dynamics: velocities are zeroed whenever they point against the
/// forces, which walks the structure down to a nearby minimum.
fn relaxed_tube() -> SimulationState {
    let mut s = tube(0.0);
    let mut ff = evaluator(vec_i(8, false));
    ff.compute_forces(&mut s).unwrap();
    for _ in 0..3000 {
        velocity_verlet_step(&mut s, 0.5, &mut ff).unwrap();
        let power: f64 = s.forces.iter().zip(&s.velocities).map(|(f, v)| f[0] * v[0] + f[1] * v[1] + f[2] * v[2]).sum();
        if power < 0.0 {
            s.velocities.iter_mut().for_each(|v| *v = [0.0; 3]);
        }
    }
    s.velocities.iter_mut().for_each(|v| *v = [0.0; 3]);
    s.time = 0.0;
    s
}

#[test]
fn stretching_raises_the_potential_energy() {
    let mut s = relaxed_tube();
    let max_force = s.forces.iter().flatten().fold(0.0f64, |m, f| m.max(f.abs()));
    assert!(max_force < 1e-2, "relaxed, {max_force}");
    let (lo, hi) = s.bounds();
    let (speed, dt) = (0.005, 0.5);
    // steps for the grips to separate by 1% of the tube length
    let steps = ((hi[2] - lo[2]) * 0.01 / (speed * dt)).ceil() as usize;
    let cfg = RunConfig { dt, steps, stretch: Some(StretchSpec { axis: 2, grip_width: 1.5, speed }) };
    let summary = run_stretch(&mut s, &mut evaluator(vec_i(8, false)), &cfg).unwrap();
    let e: Vec<f64> = summary.records.iter().map(|r| r.potential).collect();
    assert!(e.windows(2).all(|w| w[1] > w[0]), "{e:?}");
}

#[test]
fn stretch_traces_agree_across_variants() {
    let reference = {
        let mut s = tube(0.0);
        run_stretch(&mut s, &mut evaluator(KernelVariant::reference(Precision::Double)), &stretch_cfg(100)).unwrap()
    };
    let others = [
        KernelVariant::scalar_opt(Precision::Double),
        KernelVariant::new(VariantTag::VecJ, BackendSpec::emulated(4, Precision::Double)).unwrap(),
        vec_i(16, false),
    ];
    for v in others {
        let mut s = tube(0.0);
        let got = run_stretch(&mut s, &mut evaluator(v), &stretch_cfg(100)).unwrap();
        for (a, b) in got.records.iter().zip(&reference.records) {
            assert!(rel(a.potential, b.potential) <= 1e-10, "{v} step {}", a.step);
        }
    }
}
