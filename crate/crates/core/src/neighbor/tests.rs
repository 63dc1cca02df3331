use std::collections::BTreeSet;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::potential::ParamTable;
use crate::system::{gen_nanotube, SimBox};

fn random_positions(n: usize, edge: f64, seed: u64) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| std::array::from_fn(|_| rng.random_range(0.0..edge))).collect()
}

fn brute_pairs(positions: &[Vec3], sim_box: &SimBox, cutoff: f64) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for i in 0..positions.len() {
        for j in 0..positions.len() {
            let d = sim_box.delta(positions[i], positions[j]);
            if i != j && vec3::dot(d, d) < cutoff * cutoff {
                out.insert((i, j));
            }
        }
    }
    out
}

fn list_pairs(nl: &NeighborList) -> BTreeSet<(usize, usize)> {
    (0..nl.n_atoms()).flat_map(|i| nl.row(i).iter().map(move |&j| (i, j as usize))).collect()
}

#[test]
fn single_atom_has_one_cell() {
    let cells = CellList::build(&[[1.0, 2.0, 3.0]], &SimBox::open([10.0; 3]), 2.4).unwrap();
    assert_eq!(cells.occupied_cells(), 1);
}

#[test]
fn pair_just_inside_the_build_cutoff_is_found() {
    let cut = 2.4;
    let x = cut - 1e-9;
    // 0.1 and 0.1 + x straddle a cell boundary at `cut`
    let positions = vec![[0.1, 0.0, 0.0], [0.1 + x, 0.0, 0.0], [20.0, 20.0, 20.0]];
    let nl = NeighborList::build(&positions, &SimBox::open([30.0; 3]), 2.1, 0.3).unwrap();
    assert_eq!(nl.row(0), [1]);
    assert_eq!(nl.row(1), [0]);
}

#[test]
fn periodic_box_shorter_than_the_cells_is_rejected() {
    let err = CellList::build(&[[0.0; 3]], &SimBox::periodic([2.0, 10.0, 10.0]), 2.4).unwrap_err();
    assert!(matches!(err, crate::Error::Config(_)), "{err}");
    let err = NeighborList::build(&[[0.0; 3]], &SimBox::periodic([4.0, 10.0, 10.0]), 2.1, 0.3).unwrap_err();
    assert!(matches!(err, crate::Error::Config(_)), "{err}");
}

#[test]
fn non_finite_positions_are_input_errors() {
    let err = NeighborList::build(&[[f64::NAN, 0.0, 0.0]], &SimBox::open([10.0; 3]), 2.1, 0.3).unwrap_err();
    assert!(matches!(err, crate::Error::Input(_)), "{err}");
}

#[test]
fn random_boxes_match_brute_force() {
    for (seed, periodic) in [(1, true), (2, false), (3, true)] {
        let edge = 12.0;
        let positions = random_positions(200, edge, seed);
        let sim_box = if periodic { SimBox::periodic([edge; 3]) } else { SimBox::open([edge; 3]) };
        let nl = NeighborList::build(&positions, &sim_box, 2.1, 0.3).unwrap();
        assert_eq!(list_pairs(&nl), brute_pairs(&positions, &sim_box, 2.4), "seed {seed}");
        assert!(nl.offsets.windows(2).all(|w| w[0] <= w[1]));
        for i in 0..nl.n_atoms() {
            assert!(nl.row(i).windows(2).all(|w| w[0] < w[1]), "row {i} is sorted and unique");
        }
    }
}

#[test]
fn zero_skin_lists_exactly_the_cutoff_pairs() {
    let sim_box = SimBox::periodic([11.0; 3]);
    let positions = random_positions(150, 11.0, 7);
    let nl = NeighborList::build(&positions, &sim_box, 2.1, 0.0).unwrap();
    assert_eq!(list_pairs(&nl), brute_pairs(&positions, &sim_box, 2.1));
}

#[test]
fn rebuild_threshold_is_half_the_skin() {
    let sim_box = SimBox::open([20.0; 3]);
    let mut positions = random_positions(50, 10.0, 3);
    let nl = NeighborList::build(&positions, &sim_box, 2.1, 0.3).unwrap();
    assert!(!nl.needs_rebuild(&positions, &sim_box));
    positions[7][1] += 0.15 - 1e-9;
    assert!(!nl.needs_rebuild(&positions, &sim_box));
    positions[7][1] += 2e-9;
    assert!(nl.needs_rebuild(&positions, &sim_box));
}

fn packed_pairs(positions: &[Vec3], sim_box: &SimBox, nl: &NeighborList, table: &ParamTable) -> Vec<(usize, usize)> {
    let species = vec![0; positions.len()];
    let mut out: Vec<(usize, usize)> =
        pack_neighbors(positions, sim_box, nl, &species, table, 0..positions.len(), PackMode::I, 4)
            .iter()
            .flat_map(|b| {
                (0..b.mask.len()).filter(|&l| b.mask[l]).map(|l| (b.i[l] as usize, b.j[l] as usize)).collect::<Vec<_>>()
            })
            .collect();
    out.sort_unstable();
    out
}

#[test]
fn packed_pairs_stay_exact_between_rebuilds() {
    let table = ParamTable::carbon();
    let sim_box = SimBox::periodic([10.0; 3]);
    let mut positions = random_positions(120, 10.0, 11);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut nl = NeighborList::build(&positions, &sim_box, table.cutoff(), 0.3).unwrap();
    let mut rebuilds = 0;
    for _ in 0..200 {
        for p in &mut positions {
            for x in p.iter_mut() {
                *x += rng.random_range(-0.01..0.01);
            }
        }
        if nl.needs_rebuild(&positions, &sim_box) {
            nl = NeighborList::build(&positions, &sim_box, table.cutoff(), 0.3).unwrap();
            rebuilds += 1;
        }
        let oracle: Vec<_> = brute_pairs(&positions, &sim_box, table.cutoff()).into_iter().collect();
        assert_eq!(packed_pairs(&positions, &sim_box, &nl, &table), oracle);
    }
    assert!(rebuilds > 0, "the walk should trigger rebuilds");
}

#[test]
fn batch_examples() {
    // atom 0: 0 neighbors, atom 1: 3, atom 2: 9
    let row_start = [0, 0, 3, 12];
    let j = Batches::new(&row_start, 0..3, PackMode::J, 8, 4096);
    assert_eq!(j.len(), 3);
    assert_eq!(j.batch(0), [0, 1, 2, -1, -1, -1, -1, -1]);
    assert_eq!(j.batch(1), [3, 4, 5, 6, 7, 8, 9, 10]);
    assert_eq!(j.batch(2), [11, -1, -1, -1, -1, -1, -1, -1]);
    assert_eq!((j.active_lanes(), j.total_lanes()), (12, 24));

    let i = Batches::new(&row_start, 0..3, PackMode::I, 8, 4096);
    assert_eq!(i.len(), 2);
    assert_eq!(i.batch(1), [8, 9, 10, 11, -1, -1, -1, -1]);

    // chunks restart batching
    let c = Batches::new(&row_start, 0..3, PackMode::I, 8, 2);
    assert_eq!(c.n_chunks(), 2);
    assert_eq!(c.chunk(0), 0..1);
    assert_eq!(c.batch(0), [0, 1, 2, -1, -1, -1, -1, -1]);
    assert_eq!(c.chunk(1), 1..3);
}

#[test]
fn both_modes_enumerate_every_pair_once() {
    let table = ParamTable::carbon();
    let sim_box = SimBox::open([14.0; 3]);
    let positions = random_positions(160, 9.0, 5);
    let nl = NeighborList::build(&positions, &sim_box, table.cutoff(), 0.3).unwrap();
    let species = vec![0; positions.len()];
    let oracle: Vec<_> = brute_pairs(&positions, &sim_box, table.cutoff()).into_iter().collect();
    for mode in [PackMode::J, PackMode::I] {
        for w in [1, 3, 8, 16] {
            let batches = pack_neighbors(&positions, &sim_box, &nl, &species, &table, 0..positions.len(), mode, w);
            let mut got = Vec::new();
            for b in &batches {
                assert_eq!(b.mask.len(), w);
                for l in 0..w {
                    if b.mask[l] {
                        assert!(b.r[l] < table.cutoff(), "no skin pair in an active lane");
                        got.push((b.i[l] as usize, b.j[l] as usize));
                    } else {
                        assert_eq!((b.i[l], b.j[l]), (-1, -1));
                    }
                }
                if mode == PackMode::J {
                    let first = b.i[0];
                    assert!(b.i.iter().zip(&b.mask).all(|(&i, &m)| !m || i == first));
                }
            }
            got.sort_unstable();
            assert_eq!(got, oracle, "{mode:?} W={w}");
        }
    }
}

#[test]
fn nanotube_interior_atoms_have_three_packed_neighbors() {
    let table = ParamTable::carbon();
    let tube = gen_nanotube(5, 10, 1.421).unwrap();
    let nl = NeighborList::build(&tube.positions, &tube.sim_box, table.cutoff(), 0.3).unwrap();
    let pairs = PairList::<f64>::build(&tube.positions, &tube.sim_box, &nl, &tube.species, &PairCutoffs::new(&table));
    let (lo, hi) = tube.bounds();
    for i in 0..tube.n_atoms() {
        let z = tube.positions[i][2];
        let end = z < lo[2] + 0.1 || z > hi[2] - 0.1;
        assert_eq!(pairs.row(i).len(), if end { 2 } else { 3 }, "atom {i} at z = {z}");
    }
    let j = Batches::new(&pairs.row_start, 0..tube.n_atoms(), PackMode::J, 8, 4096);
    assert!((0.33..=0.45).contains(&j.lane_utilization()), "{}", j.lane_utilization());
}
