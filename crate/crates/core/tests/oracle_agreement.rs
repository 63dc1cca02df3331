mod common;

use common::*;
use tersoff_core::system::{random_cluster, ClusterSpec};
use tersoff_core::{ParamTable, Precision, SimBox, SimulationState};

#[test]
fn carbon_dimer_golden_value() {
    // double-double oracle at r = 1.4 A (f_C = 1, no third atom so b = 1)
    const GOLDEN: f64 = -5.117768228846192;
    let table = ParamTable::carbon();
    let dimer = SimulationState::single_element(vec![[5.0; 3], [6.4, 5.0, 5.0]], "C", SimBox::open([20.0; 3])).unwrap();
    let placed =
        SimulationState::single_element(vec![[0.0; 3], [1.4, 0.0, 0.0]], "C", SimBox::open([20.0; 3])).unwrap();
    assert!(rel(oracle_energy(&placed, &table), GOLDEN) < 1e-15);
    for v in all_variants(Precision::Double) {
        let r = evaluate(&v, &dimer, &table);
        // 6.4 - 5.0 is not exactly 1.4; the offset moves E by ~1e-15
        assert!(rel(r.potential_energy, GOLDEN) < 1e-13, "{v}: {}", r.potential_energy);
        assert_eq!(r.forces[0][0], -r.forces[1][0]);
    }
}

#[test]
fn small_clusters_match_the_oracle() {
    for (elements, table) in [(vec!["C"], ParamTable::carbon()), (vec!["C", "Si"], ParamTable::silicon_carbide())] {
        for seed in 0..50 {
            let n = 2 + (seed as usize % 7);
            let s = random_cluster(&ClusterSpec::new(n, &elements, seed)).unwrap();
            let expected = oracle_energy(&s, &table);
            for v in all_variants(Precision::Double) {
                let e = evaluate(&v, &s, &table).potential_energy;
                let ok = if expected == 0.0 { e == 0.0 } else { rel(e, expected) <= 1e-12 };
                assert!(ok, "{v} {elements:?} seed {seed}: {e} vs {expected}");
            }
        }
    }
}

#[test]
fn forces_are_the_energy_gradient() {
    let table = ParamTable::silicon_carbide();
    let otable = oracle_table(&table);
    let mut checked = 0;
    for seed in 0..20 {
        let spec = ClusterSpec::new(4 + seed as usize % 6, &["C", "Si"], 100 + seed).avoiding_kinks(&table, 0.02);
        let s = random_cluster(&spec).unwrap();
        let fd = tersoff_oracle::forces_fd(&s.positions, &table_species(&s, &table), &otable, 1e-5);
        for v in [
            tersoff_core::KernelVariant::reference(Precision::Double),
            tersoff_core::KernelVariant::scalar_opt(Precision::Double),
        ]
        .into_iter()
        .chain(all_variants(Precision::Double).into_iter().filter(|v| v.tag.is_vectorized()).step_by(5))
        {
            let f = evaluate(&v, &s, &table).forces;
            for (i, (a, b)) in f.iter().zip(&fd).enumerate() {
                for k in 0..3 {
                    if b[k].abs() > 1e-4 {
                        assert!(rel(a[k], b[k]) <= 1e-6, "{v} seed {seed} atom {i}.{k}: {} vs {}", a[k], b[k]);
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 500, "{checked}");
}
