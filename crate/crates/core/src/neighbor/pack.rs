use std::ops::Range;

use crate::potential::ParamTable;
use crate::simd::Scalar;
use crate::system::SimBox;
use crate::vec3::{self, Vec3};

use super::NeighborList;

/// Per-pair geometry record: unit vector `e_ij` (3), `r_ij`, `1 / r_ij`.
pub const GEOM_FIELDS: usize = 5;

/// Geometry record for displacement `d = x_j - x_i`, computed in `f64`.
#[inline]
pub fn pair_geometry<T: Scalar>(d: Vec3) -> [T; GEOM_FIELDS] {
    let r = vec3::dot(d, d).sqrt();
    let inv = 1.0 / r;
    [d[0] * inv, d[1] * inv, d[2] * inv, r, inv].map(T::from_f64)
}

/// Squared pair cutoffs by species pair.
#[derive(Clone, Debug)]
pub struct PairCutoffs {
    n_species: usize,
    cut2: Vec<f64>,
}

impl PairCutoffs {
    pub fn new(table: &ParamTable) -> Self {
        let n = table.n_species();
        let cut2 = (0..n * n).map(|t| table.pair_cutoff(t / n, t % n).powi(2)).collect();
        PairCutoffs { n_species: n, cut2 }
    }

    #[inline]
    pub fn get2(&self, ti: usize, tj: usize) -> f64 {
        self.cut2[ti * self.n_species + tj]
    }

    pub fn n_species(&self) -> usize {
        self.n_species
    }
}

/// Neighbor pairs inside the true cutoff, grouped by owning atom.
///
/// Pairs of atom `i` occupy `row_start[i]..row_start[i + 1]` in the order of
/// the neighbor list. Geometry is computed in `f64` and stored in `T`.
#[derive(Clone, Debug)]
pub struct PairList<T> {
    pub row_start: Vec<usize>,
    pub owner: Vec<i32>,
    pub neighbor: Vec<i32>,
    /// `species[i] * n_species + species[j]`
    pub pair_type: Vec<i32>,
    pub geom: Vec<[T; GEOM_FIELDS]>,
    /// `row_start` and row lengths as lane indices.
    pub row_first: Vec<i32>,
    pub row_len: Vec<i32>,
    /// Longest row.
    pub max_row: usize,
}

impl<T: Scalar> PairList<T> {
    pub fn build(
        positions: &[Vec3],
        sim_box: &SimBox,
        nl: &NeighborList,
        species: &[usize],
        cutoffs: &PairCutoffs,
    ) -> Self {
        let n = positions.len();
        let ns = cutoffs.n_species();
        let mut list = PairList {
            row_start: Vec::with_capacity(n + 1),
            owner: Vec::new(),
            neighbor: Vec::new(),
            pair_type: Vec::new(),
            geom: Vec::new(),
            row_first: Vec::with_capacity(n),
            row_len: Vec::with_capacity(n),
            max_row: 0,
        };
        list.row_start.push(0);
        for i in 0..n {
            let ti = species[i];
            for &j in nl.row(i) {
                let j = j as usize;
                let tj = species[j];
                let d = sim_box.delta(positions[i], positions[j]);
                let r2 = vec3::dot(d, d);
                if r2 < cutoffs.get2(ti, tj) {
                    list.owner.push(i as i32);
                    list.neighbor.push(j as i32);
                    list.pair_type.push((ti * ns + tj) as i32);
                    list.geom.push(pair_geometry(d));
                }
            }
            let len = list.owner.len() - list.row_start[i];
            list.max_row = list.max_row.max(len);
            list.row_first.push(list.row_start[i] as i32);
            list.row_len.push(len as i32);
            list.row_start.push(list.owner.len());
        }
        list
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    #[inline]
    pub fn row(&self, i: usize) -> Range<usize> {
        self.row_start[i]..self.row_start[i + 1]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PackMode {
    /// One atom `i` per batch; lanes are its neighbors `j`.
    J,
    /// Lanes are consecutive `(i, j)` pairs, spanning several atoms `i`.
    I,
}

/// Pair ids arranged into lanes of `width`; padding lanes hold `-1`.
///
/// Batches never cross a chunk boundary, so a chunk of atoms can be
/// processed on its own with the same lane assignment whatever the number of
/// workers.
#[derive(Clone, Debug)]
pub struct Batches {
    pub width: usize,
    pub mode: PackMode,
    pub ids: Vec<i32>,
    chunk_start: Vec<usize>,
    active: usize,
}

impl Batches {
    /// Batches for rows `rows`, restarting at every multiple of `chunk_atoms`.
    pub fn new(row_start: &[usize], rows: Range<usize>, mode: PackMode, width: usize, chunk_atoms: usize) -> Self {
        assert!(width > 0 && chunk_atoms > 0);
        let mut b = Batches { width, mode, ids: Vec::new(), chunk_start: vec![0], active: 0 };
        let mut lo = rows.start;
        while lo < rows.end {
            let hi = (lo + chunk_atoms).min(rows.end);
            match mode {
                PackMode::J => {
                    for i in lo..hi {
                        b.push_run(row_start[i]..row_start[i + 1]);
                    }
                }
                PackMode::I => b.push_run(row_start[lo]..row_start[hi]),
            }
            b.chunk_start.push(b.len());
            lo = hi;
        }
        b
    }

    fn push_run(&mut self, pairs: Range<usize>) {
        for start in pairs.clone().step_by(self.width) {
            for l in 0..self.width {
                let p = start + l;
                self.ids.push(if p < pairs.end { p as i32 } else { -1 });
            }
        }
        self.active += pairs.len();
    }

    pub fn len(&self) -> usize {
        self.ids.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    #[inline]
    pub fn batch(&self, b: usize) -> &[i32] {
        &self.ids[b * self.width..(b + 1) * self.width]
    }

    pub fn n_chunks(&self) -> usize {
        self.chunk_start.len() - 1
    }

    /// Batch indices belonging to chunk `c`.
    pub fn chunk(&self, c: usize) -> Range<usize> {
        self.chunk_start[c]..self.chunk_start[c + 1]
    }

    pub fn active_lanes(&self) -> usize {
        self.active
    }

    pub fn total_lanes(&self) -> usize {
        self.ids.len()
    }

    /// Fraction of lanes carrying a real pair.
    pub fn lane_utilization(&self) -> f64 {
        if self.ids.is_empty() {
            0.0
        } else {
            self.active as f64 / self.ids.len() as f64
        }
    }
}

/// One batch of packed pairs with explicit geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct PackedBatch {
    pub i: Vec<i32>,
    pub j: Vec<i32>,
    /// `x_j - x_i`, minimum image.
    pub disp: Vec<Vec3>,
    pub r: Vec<f64>,
    pub mask: Vec<bool>,
}

/// Packs the within-cutoff pairs of atoms `atoms` into batches of `width`.
#[allow(clippy::too_many_arguments)]
pub fn pack_neighbors(
    positions: &[Vec3],
    sim_box: &SimBox,
    nl: &NeighborList,
    species: &[usize],
    table: &ParamTable,
    atoms: Range<usize>,
    mode: PackMode,
    width: usize,
) -> Vec<PackedBatch> {
    let pairs = PairList::<f64>::build(positions, sim_box, nl, species, &PairCutoffs::new(table));
    let chunk = atoms.len().max(1);
    let batches = Batches::new(&pairs.row_start, atoms, mode, width, chunk);
    (0..batches.len())
        .map(|b| {
            let ids = batches.batch(b);
            let lane = |f: &dyn Fn(usize) -> i32| ids.iter().map(|&p| if p < 0 { -1 } else { f(p as usize) }).collect();
            PackedBatch {
                i: lane(&|p| pairs.owner[p]),
                j: lane(&|p| pairs.neighbor[p]),
                disp: ids
                    .iter()
                    .map(|&p| {
                        if p < 0 {
                            [0.0; 3]
                        } else {
                            let p = p as usize;
                            sim_box.delta(positions[pairs.owner[p] as usize], positions[pairs.neighbor[p] as usize])
                        }
                    })
                    .collect(),
                r: ids.iter().map(|&p| if p < 0 { 0.0 } else { pairs.geom[p as usize][3] }).collect(),
                mask: ids.iter().map(|&p| p >= 0).collect(),
            }
        })
        .collect()
}
