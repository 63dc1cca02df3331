//! Simulation box, state, structure generators, integration and I/O.
//!
//! Units: Å, fs, eV, amu. Velocities are Å/fs.

mod generate;
mod integrate;
pub mod xyz;

use crate::error::{Error, Result};
use crate::vec3::{self, Vec3};

pub use generate::{gen_diamond, gen_nanotube, maxwell_boltzmann, random_cluster, ClusterSpec, NANOTUBE_BOND};
pub use integrate::{
    run, run_stretch, velocity_verlet_step, ForceField, PhaseTimes, RunConfig, RunSummary, StepRecord, StretchSpec,
    DEFAULT_DT,
};

/// `1 eV/Å/amu` in Å/fs².
pub const ACCEL_PER_FORCE: f64 = 9.648_533_212e-3;
/// `1 amu Å²/fs²` in eV.
pub const KINETIC_TO_EV: f64 = 103.642_696_2;
/// Boltzmann constant in eV/K.
pub const BOLTZMANN: f64 = 8.617_333_262e-5;

/// Standard atomic weight (amu) for the elements with published sets here.
pub fn atomic_mass(element: &str) -> Option<f64> {
    match element {
        "C" => Some(12.011),
        "Si" => Some(28.0855),
        "Ge" => Some(72.630),
        _ => None,
    }
}

/// Orthorhombic box. Non-periodic axes keep their length only as metadata.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimBox {
    pub lengths: Vec3,
    pub periodic: [bool; 3],
}

impl SimBox {
    pub fn open(lengths: Vec3) -> Self {
        SimBox { lengths, periodic: [false; 3] }
    }

    pub fn periodic(lengths: Vec3) -> Self {
        SimBox { lengths, periodic: [true; 3] }
    }

    /// Rejects boxes whose periodic edges are shorter than `2 * build_cutoff`;
    /// below that the minimum image is no longer unique.
    pub fn validate(&self, build_cutoff: f64) -> Result<()> {
        for a in 0..3 {
            let l = self.lengths[a];
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::Config(format!("box edge {a} must be positive, got {l}")));
            }
            if self.periodic[a] && l < 2.0 * build_cutoff {
                return Err(Error::Config(format!(
                    "periodic edge {a} is {l} Å, needs at least {} Å (twice the list cutoff)",
                    2.0 * build_cutoff
                )));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn min_image(&self, mut d: Vec3) -> Vec3 {
        for a in 0..3 {
            if self.periodic[a] {
                let l = self.lengths[a];
                d[a] -= l * (d[a] / l).round();
            }
        }
        d
    }

    /// Maps `x` into `[0, L)` along periodic axes.
    #[inline]
    pub fn wrap(&self, mut x: Vec3) -> Vec3 {
        for a in 0..3 {
            if self.periodic[a] {
                let l = self.lengths[a];
                x[a] -= l * (x[a] / l).floor();
                if x[a] >= l {
                    x[a] -= l;
                }
            }
        }
        x
    }

    /// Minimum-image displacement `b - a`.
    #[inline]
    pub fn delta(&self, a: Vec3, b: Vec3) -> Vec3 {
        self.min_image(vec3::sub(b, a))
    }
}

/// Positions, velocities and forces of a system of atoms.
///
/// `species[i]` indexes `elements`; `masses` holds one entry per element.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationState {
    pub positions: Vec<Vec3>,
    pub velocities: Vec<Vec3>,
    pub forces: Vec<Vec3>,
    pub species: Vec<usize>,
    pub elements: Vec<String>,
    pub masses: Vec<f64>,
    pub sim_box: SimBox,
    /// fs
    pub time: f64,
    /// eV, as of the last force evaluation.
    pub potential_energy: f64,
}

impl SimulationState {
    /// Atoms at rest with standard atomic masses.
    pub fn new(positions: Vec<Vec3>, species: Vec<usize>, elements: Vec<String>, sim_box: SimBox) -> Result<Self> {
        let masses = elements
            .iter()
            .map(|e| atomic_mass(e).ok_or_else(|| Error::Input(format!("no atomic mass known for element '{e}'"))))
            .collect::<Result<Vec<_>>>()?;
        let n = positions.len();
        let state = SimulationState {
            positions,
            velocities: vec![[0.0; 3]; n],
            forces: vec![[0.0; 3]; n],
            species,
            elements,
            masses,
            sim_box,
            time: 0.0,
            potential_energy: 0.0,
        };
        state.validate()?;
        Ok(state)
    }

    /// A single-element system.
    pub fn single_element(positions: Vec<Vec3>, element: &str, sim_box: SimBox) -> Result<Self> {
        let n = positions.len();
        Self::new(positions, vec![0; n], vec![element.to_string()], sim_box)
    }

    pub fn n_atoms(&self) -> usize {
        self.positions.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.positions.len();
        if self.velocities.len() != n || self.forces.len() != n || self.species.len() != n {
            return Err(Error::Input("per-atom arrays differ in length".into()));
        }
        if self.masses.len() != self.elements.len() {
            return Err(Error::Input("one mass per element required".into()));
        }
        if let Some(i) = self.species.iter().position(|&s| s >= self.elements.len()) {
            return Err(Error::Input(format!("atom {i} has species {} of {}", self.species[i], self.elements.len())));
        }
        if let Some(i) = self.positions.iter().position(|p| p.iter().any(|x| !x.is_finite())) {
            return Err(Error::Input(format!("atom {i} has a non-finite position")));
        }
        Ok(())
    }

    #[inline]
    pub fn mass(&self, i: usize) -> f64 {
        self.masses[self.species[i]]
    }

    /// eV
    pub fn kinetic_energy(&self) -> f64 {
        let mut sum = 0.0;
        for (i, v) in self.velocities.iter().enumerate() {
            sum += 0.5 * self.mass(i) * vec3::dot(*v, *v);
        }
        sum * KINETIC_TO_EV
    }

    pub fn total_energy(&self) -> f64 {
        self.kinetic_energy() + self.potential_energy
    }

    /// amu Å/fs
    pub fn momentum(&self) -> Vec3 {
        let mut p = [0.0; 3];
        for (i, v) in self.velocities.iter().enumerate() {
            p = vec3::add(p, vec3::scale(self.mass(i), *v));
        }
        p
    }

    pub fn total_force(&self) -> Vec3 {
        self.forces.iter().fold([0.0; 3], |acc, f| vec3::add(acc, *f))
    }

    /// Shifts all velocities so the total momentum vanishes.
    pub fn zero_momentum(&mut self) {
        let p = self.momentum();
        let m: f64 = (0..self.n_atoms()).map(|i| self.mass(i)).sum();
        if m > 0.0 {
            let v = vec3::scale(1.0 / m, p);
            for u in &mut self.velocities {
                *u = vec3::sub(*u, v);
            }
        }
    }

    /// Axis-aligned bounding box of the positions, `(min, max)`.
    pub fn bounds(&self) -> (Vec3, Vec3) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in &self.positions {
            for a in 0..3 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        (lo, hi)
    }
}

#[cfg(test)]
mod tests;
