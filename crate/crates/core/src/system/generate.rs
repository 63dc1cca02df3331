use std::f64::consts::PI;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::vec3::{self, Vec3};

use super::{SimBox, SimulationState, BOLTZMANN, KINETIC_TO_EV};

/// C-C bond length of graphene (Å).
pub const NANOTUBE_BOND: f64 = 1.421;

/// Vacuum added around open structures when sizing their box (Å).
const VACUUM: f64 = 10.0;

/// Armchair `(n, n)` carbon nanotube along `z`, `4 n` atoms per cell.
///
/// Each cell holds two rings of `2 n` atoms. Within a ring atoms come in
/// bonded pairs `2 pi / (3 n)` apart, with gaps of half that between pairs,
/// as in flat graphene. The radius is chosen so that the in-ring chord equals
/// `bond`, and the ring spacing so that the bonds between rings do too; every
/// nearest-neighbor distance is then `bond` up to rounding. The tube is open
/// and the two end rings have two neighbors per atom.
pub fn gen_nanotube(n: usize, cells: usize, bond: f64) -> Result<SimulationState> {
    if n < 3 || cells < 1 {
        return Err(Error::Config(format!("nanotube needs n >= 3 and cells >= 1, got ({n}, {cells})")));
    }
    if !(bond > 0.0 && bond.is_finite()) {
        return Err(Error::Config(format!("bond length must be positive, got {bond}")));
    }
    let alpha = 2.0 * PI / (3.0 * n as f64);
    let gap = 0.5 * alpha;
    let radius = bond / (2.0 * (0.5 * alpha).sin());
    let cross = 2.0 * radius * (0.5 * gap).sin();
    let ring = (bond * bond - cross * cross).sqrt();

    let mut positions = Vec::with_capacity(4 * n * cells);
    for r in 0..2 * cells {
        // odd rings are shifted by one pair plus one gap
        let offset = if r % 2 == 0 { 0.0 } else { alpha + gap };
        let z = r as f64 * ring;
        for p in 0..n {
            let base = offset + p as f64 * (2.0 * alpha + 2.0 * gap);
            for phi in [base, base + alpha] {
                positions.push([radius * phi.cos(), radius * phi.sin(), z]);
            }
        }
    }
    let length = (2 * cells - 1) as f64 * ring;
    let side = 2.0 * radius + 2.0 * VACUUM;
    for p in &mut positions {
        p[0] += 0.5 * side;
        p[1] += 0.5 * side;
        p[2] += VACUUM;
    }
    let sim_box = SimBox::open([side, side, length + 2.0 * VACUUM]);
    SimulationState::single_element(positions, "C", sim_box)
}

/// Periodic diamond lattice of `cells^3` conventional cells, 8 atoms each.
pub fn gen_diamond(cells: usize, lattice: f64, element: &str) -> Result<SimulationState> {
    if cells < 1 || !(lattice > 0.0 && lattice.is_finite()) {
        return Err(Error::Config(format!("diamond needs cells >= 1 and lattice > 0, got {cells}, {lattice}")));
    }
    const BASIS: [Vec3; 8] = [
        [0.0, 0.0, 0.0],
        [0.0, 0.5, 0.5],
        [0.5, 0.0, 0.5],
        [0.5, 0.5, 0.0],
        [0.25, 0.25, 0.25],
        [0.25, 0.75, 0.75],
        [0.75, 0.25, 0.75],
        [0.75, 0.75, 0.25],
    ];
    let mut positions = Vec::with_capacity(8 * cells.pow(3));
    for x in 0..cells {
        for y in 0..cells {
            for z in 0..cells {
                for b in BASIS {
                    positions.push([
                        (x as f64 + b[0]) * lattice,
                        (y as f64 + b[1]) * lattice,
                        (z as f64 + b[2]) * lattice,
                    ]);
                }
            }
        }
    }
    let edge = cells as f64 * lattice;
    SimulationState::single_element(positions, element, SimBox::periodic([edge; 3]))
}

/// Random open cluster grown bond by bond.
#[derive(Clone, Debug)]
pub struct ClusterSpec {
    pub n_atoms: usize,
    /// Element of each species; atoms pick species uniformly.
    pub elements: Vec<String>,
    /// Each new atom sits at a distance in `[min_bond, max_bond]` from a
    /// random earlier atom and no closer than `min_bond` to any other.
    pub min_bond: f64,
    pub max_bond: f64,
    /// Distances where the potential has a kink (`R - D` and `R + D` of every
    /// cutoff); no pair may fall within `kink_gap` of one.
    pub kinks: Vec<f64>,
    pub kink_gap: f64,
    pub seed: u64,
}

impl ClusterSpec {
    /// Carbon-like defaults: bonds between 1.3 and 2.2 Å, so most atoms see
    /// several neighbors including some inside the cutoff band.
    pub fn new(n_atoms: usize, elements: &[&str], seed: u64) -> Self {
        ClusterSpec {
            n_atoms,
            elements: elements.iter().map(|e| e.to_string()).collect(),
            min_bond: 1.3,
            max_bond: 2.2,
            kinks: Vec::new(),
            kink_gap: 0.0,
            seed,
        }
    }

    /// Keeps pairs at least `gap` away from the cutoff kinks of `table`.
    pub fn avoiding_kinks(mut self, table: &crate::potential::ParamTable, gap: f64) -> Self {
        self.kinks = table.entries().iter().flat_map(|p| [p.big_r - p.big_d, p.big_r + p.big_d]).collect();
        self.kink_gap = gap;
        self
    }
}

/// Builds the cluster described by `spec`.
pub fn random_cluster(spec: &ClusterSpec) -> Result<SimulationState> {
    if spec.elements.is_empty() {
        return Err(Error::Config("cluster needs at least one element".into()));
    }
    if !(spec.min_bond > 0.0 && spec.max_bond >= spec.min_bond) {
        return Err(Error::Config("cluster needs 0 < min_bond <= max_bond".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut positions: Vec<Vec3> = Vec::with_capacity(spec.n_atoms);
    let acceptable = |p: Vec3, positions: &[Vec3]| {
        positions.iter().all(|q| {
            let r = vec3::norm(vec3::sub(p, *q));
            r >= spec.min_bond && spec.kinks.iter().all(|k| (r - k).abs() >= spec.kink_gap)
        })
    };
    const ATTEMPTS: usize = 100_000;
    for _ in 0..spec.n_atoms {
        let mut placed = false;
        for _ in 0..ATTEMPTS {
            let p = if positions.is_empty() {
                [0.0; 3]
            } else {
                let anchor = positions[rng.random_range(0..positions.len())];
                let dir = random_unit(&mut rng);
                let r = rng.random_range(spec.min_bond..=spec.max_bond);
                vec3::add(anchor, vec3::scale(r, dir))
            };
            if acceptable(p, &positions) {
                positions.push(p);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::Config(format!(
                "could not place atom {} of the cluster after {ATTEMPTS} attempts",
                positions.len()
            )));
        }
    }
    let species = (0..spec.n_atoms).map(|_| rng.random_range(0..spec.elements.len())).collect();
    let (lo, hi) = positions.iter().fold(([f64::INFINITY; 3], [f64::NEG_INFINITY; 3]), |(lo, hi), p| {
        (std::array::from_fn(|a| lo[a].min(p[a])), std::array::from_fn(|a| hi[a].max(p[a])))
    });
    let lo = if positions.is_empty() { [0.0; 3] } else { lo };
    let hi = if positions.is_empty() { [0.0; 3] } else { hi };
    for p in &mut positions {
        *p = std::array::from_fn(|a| p[a] - lo[a] + VACUUM);
    }
    let sim_box = SimBox::open(std::array::from_fn(|a| hi[a] - lo[a] + 2.0 * VACUUM));
    SimulationState::new(positions, species, spec.elements.clone(), sim_box)
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v: Vec3 = std::array::from_fn(|_| StandardNormal.sample(rng));
        let n = vec3::norm(v);
        if n > 1e-6 {
            return vec3::scale(1.0 / n, v);
        }
    }
}

/// Maxwell-Boltzmann velocities at `temperature` (K) with zero total
/// momentum, rescaled so the kinetic energy is exactly `3/2 N k T`.
pub fn maxwell_boltzmann(state: &mut SimulationState, temperature: f64, seed: u64) -> Result<()> {
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(Error::Config(format!("temperature must be >= 0, got {temperature}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..state.n_atoms() {
        // sigma^2 = k T / m in (Å/fs)^2
        let sigma = (BOLTZMANN * temperature / (state.mass(i) * KINETIC_TO_EV)).sqrt();
        state.velocities[i] = std::array::from_fn(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            sigma * z
        });
    }
    state.zero_momentum();
    let target = 1.5 * state.n_atoms() as f64 * BOLTZMANN * temperature;
    let ke = state.kinetic_energy();
    if ke > 0.0 {
        let s = (target / ke).sqrt();
        for v in &mut state.velocities {
            *v = vec3::scale(s, *v);
        }
    }
    Ok(())
}
