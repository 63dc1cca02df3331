//! Cell lists, full neighbor lists with a skin, and cutoff packing.
//!
//! The neighbor list is built at `r_C + skin` so it survives several steps.
//! Kernels never see skin atoms: [`PairList`] keeps only pairs inside the
//! true cutoff, and [`Batches`] arranges those pairs into lanes.

mod cell;
mod pack;

pub use cell::CellList;
pub use pack::{pack_neighbors, pair_geometry, Batches, PackMode, PackedBatch, PairCutoffs, PairList, GEOM_FIELDS};

use crate::error::{Error, Result};
use crate::system::SimBox;
use crate::vec3::{self, Vec3};

/// Default skin thickness (Å).
pub const DEFAULT_SKIN: f64 = 0.3;

/// Full neighbor list: `j` in row `i` iff `i` in row `j`.
#[derive(Clone, Debug)]
pub struct NeighborList {
    pub offsets: Vec<usize>,
    pub neighbors: Vec<u32>,
    pub cutoff: f64,
    pub skin: f64,
    pub reference_positions: Vec<Vec3>,
}

impl NeighborList {
    /// All pairs closer than `cutoff + skin`, rows sorted by neighbor index.
    pub fn build(positions: &[Vec3], sim_box: &SimBox, cutoff: f64, skin: f64) -> Result<Self> {
        if !(skin >= 0.0) || !(cutoff > 0.0) {
            return Err(Error::Config(format!("need cutoff > 0 and skin >= 0, got {cutoff} and {skin}")));
        }
        if let Some(i) = positions.iter().position(|p| p.iter().any(|x| !x.is_finite())) {
            return Err(Error::Input(format!("atom {i} has a non-finite position")));
        }
        let build_cutoff = cutoff + skin;
        sim_box.validate(build_cutoff)?;
        let cells = CellList::build(positions, sim_box, build_cutoff)?;
        let rc2 = build_cutoff * build_cutoff;
        let n = positions.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::new();
        let mut nearby = Vec::new();
        offsets.push(0);
        for i in 0..n {
            let start = neighbors.len();
            cells.candidates(i, &mut nearby);
            for &j in &nearby {
                if j as usize == i {
                    continue;
                }
                let d = sim_box.delta(positions[i], positions[j as usize]);
                if vec3::dot(d, d) < rc2 {
                    neighbors.push(j);
                }
            }
            neighbors[start..].sort_unstable();
            offsets.push(neighbors.len());
        }
        Ok(NeighborList { offsets, neighbors, cutoff, skin, reference_positions: positions.to_vec() })
    }

    pub fn build_cutoff(&self) -> f64 {
        self.cutoff + self.skin
    }

    pub fn n_atoms(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u32] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Largest minimum-image displacement of any atom since the build.
    pub fn max_displacement(&self, positions: &[Vec3], sim_box: &SimBox) -> f64 {
        positions
            .iter()
            .zip(&self.reference_positions)
            .map(|(p, q)| vec3::norm(sim_box.delta(*q, *p)))
            .fold(0.0, f64::max)
    }

    /// True once some atom has moved more than half the skin.
    ///
    /// Two atoms approaching each other then close at most one skin, so
    /// every pair inside `cutoff` is still listed while this is false.
    pub fn needs_rebuild(&self, positions: &[Vec3], sim_box: &SimBox) -> bool {
        positions.len() != self.reference_positions.len() || self.max_displacement(positions, sim_box) > 0.5 * self.skin
    }
}

#[cfg(test)]
mod tests;
