use super::*;
use crate::vec3;

/// Counts neighbors closer than `cut`, brute force with minimum image.
fn coordination(state: &SimulationState, cut: f64) -> Vec<usize> {
    let n = state.n_atoms();
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && vec3::norm(state.sim_box.delta(state.positions[i], state.positions[j])) < cut)
                .count()
        })
        .collect()
}

fn nearest(state: &SimulationState, i: usize) -> f64 {
    (0..state.n_atoms())
        .filter(|&j| j != i)
        .map(|j| vec3::norm(state.sim_box.delta(state.positions[i], state.positions[j])))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn nanotube_geometry() {
    let tube = gen_nanotube(5, 10, NANOTUBE_BOND).unwrap();
    assert_eq!(tube.n_atoms(), 200);
    let z: Vec<f64> = tube.positions.iter().map(|p| p[2]).collect();
    let (lo, hi) = tube.bounds();
    for (i, c) in coordination(&tube, 2.0).into_iter().enumerate() {
        let end = z[i] < lo[2] + 0.1 || z[i] > hi[2] - 0.1;
        assert_eq!(c, if end { 2 } else { 3 }, "atom {i}");
        assert!((nearest(&tube, i) - NANOTUBE_BOND).abs() < 1e-6, "atom {i}");
    }
    for (n, cells) in [(3, 1), (8, 3), (10, 2)] {
        assert_eq!(gen_nanotube(n, cells, NANOTUBE_BOND).unwrap().n_atoms(), 4 * n * cells);
    }
    assert!(gen_nanotube(2, 1, NANOTUBE_BOND).is_err());
    assert!(gen_nanotube(5, 0, NANOTUBE_BOND).is_err());
}

#[test]
fn nanotube_scales_with_the_bond() {
    let a = gen_nanotube(6, 2, 1.0).unwrap();
    let b = gen_nanotube(6, 2, 1.5).unwrap();
    let (la, _) = a.bounds();
    let (lb, _) = b.bounds();
    for (p, q) in a.positions.iter().zip(&b.positions) {
        for k in 0..3 {
            assert!(((q[k] - lb[k]) - 1.5 * (p[k] - la[k])).abs() < 1e-12);
        }
    }
}

#[test]
fn diamond_lattice() {
    assert_eq!(gen_diamond(1, 3.5668, "C").unwrap().n_atoms(), 8);
    let a = 5.432;
    let d = gen_diamond(3, a, "Si").unwrap();
    assert_eq!(d.n_atoms(), 216);
    let nn = a * 3f64.sqrt() / 4.0;
    assert!(coordination(&d, nn + 0.1).iter().all(|&c| c == 4));
    for i in 0..d.n_atoms() {
        assert!((nearest(&d, i) - nn).abs() < 1e-12);
    }
}

#[test]
fn random_clusters_respect_their_spec() {
    let table = crate::potential::ParamTable::carbon();
    let spec = ClusterSpec::new(40, &["C"], 9).avoiding_kinks(&table, 0.02);
    let c = random_cluster(&spec).unwrap();
    assert_eq!(c.n_atoms(), 40);
    for i in 0..40 {
        for j in 0..i {
            let r = vec3::norm(vec3::sub(c.positions[i], c.positions[j]));
            assert!(r >= spec.min_bond);
            assert!(spec.kinks.iter().all(|k| (r - k).abs() >= 0.02));
        }
    }
    assert_eq!(random_cluster(&spec).unwrap(), c, "same seed, same cluster");
    let mixed = random_cluster(&ClusterSpec::new(30, &["C", "Si"], 4)).unwrap();
    assert!(mixed.species.contains(&0) && mixed.species.contains(&1));
}

#[test]
fn maxwell_boltzmann_hits_the_temperature() {
    let mut tube = gen_nanotube(5, 4, NANOTUBE_BOND).unwrap();
    maxwell_boltzmann(&mut tube, 300.0, 1).unwrap();
    let t = tube.kinetic_energy() / (1.5 * tube.n_atoms() as f64 * BOLTZMANN);
    assert!((t - 300.0).abs() < 1e-9, "{t}");
    assert!(vec3::norm(tube.momentum()) < 1e-12);
}

#[test]
fn box_helpers() {
    let b = SimBox { lengths: [10.0, 10.0, 10.0], periodic: [true, true, false] };
    assert_eq!(b.min_image([6.0, -6.0, 6.0]), [-4.0, 4.0, 6.0]);
    assert_eq!(b.wrap([-1.0, 10.0, -1.0]), [9.0, 0.0, -1.0]);
    assert!(b.validate(4.0).is_ok());
    assert!(b.validate(5.1).is_err());
    assert!(SimBox::open([0.0, 1.0, 1.0]).validate(1.0).is_err());
}

#[test]
fn state_validation() {
    assert!(SimulationState::single_element(vec![[f64::NAN, 0.0, 0.0]], "C", SimBox::open([5.0; 3])).is_err());
    assert!(SimulationState::single_element(vec![[0.0; 3]], "Xx", SimBox::open([5.0; 3])).is_err());
    assert!(SimulationState::new(vec![[0.0; 3]], vec![1], vec!["C".into()], SimBox::open([5.0; 3])).is_err());
}

/// Harmonic springs between consecutive atoms; exact forces for testing the
/// integrator without the potential.
struct Springs {
    k: f64,
    r0: f64,
}

impl ForceField for Springs {
    fn compute_forces(&mut self, state: &mut SimulationState) -> crate::Result<()> {
        let n = state.n_atoms();
        state.forces = vec![[0.0; 3]; n];
        state.potential_energy = 0.0;
        for i in 1..n {
            let d = state.sim_box.delta(state.positions[i - 1], state.positions[i]);
            let r = vec3::norm(d);
            let f = -self.k * (r - self.r0);
            state.potential_energy += 0.5 * self.k * (r - self.r0).powi(2);
            let fv = vec3::scale(f / r, d);
            state.forces[i] = vec3::add(state.forces[i], fv);
            state.forces[i - 1] = vec3::sub(state.forces[i - 1], fv);
        }
        Ok(())
    }
}

#[test]
fn verlet_fixed_point_and_ballistic_motion() {
    let mut ff = Springs { k: 10.0, r0: 1.5 };
    let mut still =
        SimulationState::single_element(vec![[5.0; 3], [6.5, 5.0, 5.0]], "C", SimBox::open([20.0; 3])).unwrap();
    ff.compute_forces(&mut still).unwrap();
    let before = still.clone();
    velocity_verlet_step(&mut still, 0.5, &mut ff).unwrap();
    assert_eq!(still.positions, before.positions);
    assert_eq!(still.velocities, before.velocities);

    let mut free = SimulationState::single_element(vec![[1.0, 2.0, 3.0]], "C", SimBox::open([20.0; 3])).unwrap();
    free.velocities[0] = [0.25, -0.5, 0.125];
    ff.compute_forces(&mut free).unwrap();
    velocity_verlet_step(&mut free, 0.5, &mut ff).unwrap();
    assert_eq!(free.positions[0], [1.125, 1.75, 3.0625]);
}

#[test]
fn springs_conserve_energy_and_momentum() {
    let mut ff = Springs { k: 20.0, r0: 1.4 };
    let mut s = SimulationState::single_element(
        vec![[5.0, 5.0, 5.0], [6.6, 5.1, 5.0], [7.9, 5.5, 5.2], [9.5, 5.0, 5.0]],
        "C",
        SimBox::open([20.0; 3]),
    )
    .unwrap();
    // omega dt ~ 0.013 keeps the Verlet energy oscillation well under the bound
    let summary = run(&mut s, &mut ff, &RunConfig::nve(0.1, 5000), &mut |_, _| Ok(())).unwrap();
    assert_eq!(summary.records.len(), 5001);
    assert!(summary.max_relative_drift() < 1e-3, "{}", summary.max_relative_drift());
    assert!(summary.max_momentum_change() < 1e-12);
}

#[test]
fn stretch_moves_the_grips_at_the_pull_speed() {
    let mut ff = Springs { k: 20.0, r0: 1.4 };
    let positions = (0..6).map(|i| [5.0, 5.0, 5.0 + 1.4 * i as f64]).collect();
    let mut s = SimulationState::single_element(positions, "C", SimBox::open([20.0, 20.0, 30.0])).unwrap();
    let cfg = RunConfig { dt: 0.5, steps: 10, stretch: Some(StretchSpec { axis: 2, grip_width: 0.5, speed: 0.02 }) };
    let z0 = s.positions[0][2];
    let z5 = s.positions[5][2];
    run_stretch(&mut s, &mut ff, &cfg).unwrap();
    assert!((s.positions[0][2] - (z0 - 0.05)).abs() < 1e-12);
    assert!((s.positions[5][2] - (z5 + 0.05)).abs() < 1e-12);

    // the low grip swallows every atom when the grip is wider than the structure
    let wide = RunConfig { stretch: Some(StretchSpec { axis: 2, grip_width: 2.0, speed: 0.02 }), ..cfg };
    let mut pair =
        SimulationState::single_element(vec![[5.0; 3], [5.0, 5.0, 6.4]], "C", SimBox::open([20.0; 3])).unwrap();
    assert!(matches!(run_stretch(&mut pair, &mut ff, &wide), Err(crate::Error::Config(_))));
    let mut single = SimulationState::single_element(vec![[5.0; 3]], "C", SimBox::open([20.0; 3])).unwrap();
    assert!(run_stretch(&mut single, &mut ff, &cfg).is_err());
    assert!(run_stretch(&mut single, &mut ff, &RunConfig::nve(0.5, 1)).is_err(), "stretch spec required");
}

#[test]
fn zero_pull_speed_is_plain_nve() {
    let mut ff = Springs { k: 20.0, r0: 1.4 };
    let positions: Vec<_> = (0..5).map(|i| [5.0, 5.0 + 0.1 * i as f64, 5.0 + 1.5 * i as f64]).collect();
    let start = SimulationState::single_element(positions, "C", SimBox::open([20.0, 20.0, 30.0])).unwrap();
    let mut a = start.clone();
    let mut b = start;
    let stretch = Some(StretchSpec { axis: 2, grip_width: 0.5, speed: 0.0 });
    let ra = run(&mut a, &mut ff, &RunConfig { dt: 0.5, steps: 50, stretch }, &mut |_, _| Ok(())).unwrap();
    let rb = run(&mut b, &mut ff, &RunConfig::nve(0.5, 50), &mut |_, _| Ok(())).unwrap();
    assert_eq!(a.positions, b.positions);
    assert_eq!(ra.records, rb.records);
}

#[test]
fn xyz_round_trip() {
    let mut tube = gen_nanotube(4, 2, NANOTUBE_BOND).unwrap();
    tube.time = 12.5;
    let text = xyz::to_string(&tube, "a comment");
    let back = xyz::parse(&text).unwrap();
    assert_eq!(back.positions, tube.positions);
    assert_eq!(back.sim_box, tube.sim_box);
    assert_eq!(back.elements, tube.elements);
    assert_eq!(back.time, 12.5);

    let bare = xyz::parse("2\n\nC 0 0 0\nSi 1.5 0 0\n").unwrap();
    assert_eq!(bare.elements, ["C", "Si"]);
    assert_eq!(bare.species, [0, 1]);
    assert!(!bare.sim_box.periodic[0]);

    for (bad, line) in
        [("x\n\n", 1), ("2\n\nC 0 0 0\n", 4), ("1\n\nC 0 zero 0\n", 3), ("1\nbox=1,2 pbc=TTT\nC 0 0 0\n", 2)]
    {
        match xyz::parse(bad) {
            Err(crate::Error::Parse { line: l, .. }) => assert_eq!(l, line, "{bad:?}"),
            other => panic!("{bad:?}: {other:?}"),
        }
    }
}
