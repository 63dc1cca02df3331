use crate::error::{Error, Result};
use crate::system::SimBox;
use crate::vec3::Vec3;

/// Upper bound on cells per atom; sparse systems get coarser cells instead.
const MAX_CELLS_PER_ATOM: usize = 8;

/// Atoms binned into a grid of cells at least `cell_size` wide.
///
/// Open axes span the bounding box of the atoms; periodic axes span the box.
#[derive(Clone, Debug)]
pub struct CellList {
    dims: [usize; 3],
    periodic: [bool; 3],
    cell_of: Vec<usize>,
    start: Vec<usize>,
    atoms: Vec<u32>,
}

impl CellList {
    pub fn build(positions: &[Vec3], sim_box: &SimBox, cell_size: f64) -> Result<Self> {
        if !(cell_size > 0.0) {
            return Err(Error::Config(format!("cell size must be positive, got {cell_size}")));
        }
        for a in 0..3 {
            if sim_box.periodic[a] && sim_box.lengths[a] < cell_size {
                return Err(Error::Config(format!(
                    "periodic edge {a} ({} Å) is shorter than the cell size {cell_size} Å",
                    sim_box.lengths[a]
                )));
            }
        }
        let mut lo = [0.0; 3];
        let mut extent = [0.0; 3];
        for a in 0..3 {
            if sim_box.periodic[a] {
                extent[a] = sim_box.lengths[a];
            } else {
                let (mn, mx) = positions
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(mn, mx), p| (mn.min(p[a]), mx.max(p[a])));
                lo[a] = if mn.is_finite() { mn } else { 0.0 };
                extent[a] = if mx.is_finite() { mx - mn } else { 0.0 };
            }
        }

        let limit = positions.len().max(1) * MAX_CELLS_PER_ATOM;
        let mut size = cell_size;
        let dims = loop {
            let dims: [usize; 3] = std::array::from_fn(|a| ((extent[a] / size).floor() as usize).max(1));
            if dims.iter().product::<usize>() <= limit.max(27) {
                break dims;
            }
            size *= 1.5;
        };
        let width: [f64; 3] = std::array::from_fn(|a| if extent[a] > 0.0 { extent[a] / dims[a] as f64 } else { 1.0 });

        let n_cells = dims[0] * dims[1] * dims[2];
        let mut cell_of = Vec::with_capacity(positions.len());
        let mut counts = vec![0usize; n_cells + 1];
        for p in positions {
            let w = sim_box.wrap(*p);
            let idx: [usize; 3] = std::array::from_fn(|a| {
                let t = ((w[a] - lo[a]) / width[a]).floor();
                (t.max(0.0) as usize).min(dims[a] - 1)
            });
            let c = (idx[0] * dims[1] + idx[1]) * dims[2] + idx[2];
            cell_of.push(c);
            counts[c + 1] += 1;
        }
        for c in 0..n_cells {
            counts[c + 1] += counts[c];
        }
        let start = counts.clone();
        let mut fill = counts;
        let mut atoms = vec![0u32; positions.len()];
        for (i, &c) in cell_of.iter().enumerate() {
            atoms[fill[c]] = i as u32;
            fill[c] += 1;
        }
        Ok(CellList { dims, periodic: sim_box.periodic, cell_of, start, atoms })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn cell_of(&self, i: usize) -> usize {
        self.cell_of[i]
    }

    pub fn occupied_cells(&self) -> usize {
        self.start.windows(2).filter(|w| w[1] > w[0]).count()
    }

    /// Atoms in the cell of `i` and its neighbors (including `i` itself).
    pub fn candidates(&self, i: usize, out: &mut Vec<u32>) {
        out.clear();
        let c = self.cell_of[i];
        let [_, ny, nz] = self.dims;
        let home = [c / (ny * nz), c / nz % ny, c % nz];
        let mut cells = [usize::MAX; 27];
        let mut n = 0;
        for dx in -1i64..=1 {
            for dy in -1i64..=1 {
                for dz in -1i64..=1 {
                    let mut idx = [0usize; 3];
                    let mut inside = true;
                    for (a, d) in [dx, dy, dz].into_iter().enumerate() {
                        let dim = self.dims[a] as i64;
                        let mut t = home[a] as i64 + d;
                        if self.periodic[a] {
                            t = t.rem_euclid(dim);
                        } else if t < 0 || t >= dim {
                            inside = false;
                        }
                        idx[a] = t as usize;
                    }
                    if inside {
                        let cell = (idx[0] * ny + idx[1]) * nz + idx[2];
                        // short periodic axes wrap onto the same cell twice
                        if !cells[..n].contains(&cell) {
                            cells[n] = cell;
                            n += 1;
                        }
                    }
                }
            }
        }
        for &cell in &cells[..n] {
            out.extend_from_slice(&self.atoms[self.start[cell]..self.start[cell + 1]]);
        }
    }
}
