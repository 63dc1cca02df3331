//! Tersoff parameters and the component functions with analytic derivatives.
//!
//! The pair energy between `i` and `j` is
//!
//! ```text
//! V(i, j) = f_C(r_ij) [f_R(r_ij) + b_ij f_A(r_ij)]
//! b_ij    = (1 + (beta zeta_ij)^eta)^(-1 / (2 eta))
//! zeta_ij = sum_{k != i, j} f_C(r_ik) g(theta_ijk) exp((lambda3 (r_ij - r_ik))^m)
//! ```
//!
//! with `f_C = 1` below `R - D`, `1/2 - 1/2 sin(pi (r - R) / (2 D))` in the
//! band and `0` above `R + D`, `f_R = A exp(-lambda1 r)`,
//! `f_A = -B exp(-lambda2 r)` and
//! `g = gamma (1 + c^2/d^2 - c^2 / (d^2 + (h - cos theta)^2))`.
//!
//! The total energy is `E = 1/2 sum_i sum_{j != i} V(i, j)`. `V(i, j)` and
//! `V(j, i)` differ (different `zeta`), and the factor one half makes a
//! symmetric bond count once; with it the published parameter sets
//! reproduce their fitted cohesive energies.
//!
//! The functions here are the scalar `f64` interface. Kernels use the
//! generic versions in [`lanes`].

pub mod lanes;

use crate::error::{Error, Result};
use crate::vec3::{self, Vec3};

use lanes::{PairCoeffs, TripletCoeffs};

/// Parameters of one ordered species triple `(i, j, k)`.
///
/// Pair quantities (`A`, `B`, `lambda1`, `lambda2`, `beta`, `eta`) are read
/// from `(i, j, j)` entries; the others from the full triple. `eta` is
/// called `n` in parameter files.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TersoffParams {
    pub m: u8,
    pub gamma: f64,
    pub lambda3: f64,
    pub c: f64,
    pub d: f64,
    pub h: f64,
    pub eta: f64,
    pub beta: f64,
    pub lambda2: f64,
    pub big_b: f64,
    /// Cutoff midpoint (Å).
    pub big_r: f64,
    /// Cutoff half-width (Å).
    pub big_d: f64,
    pub lambda1: f64,
    pub big_a: f64,
}

impl TersoffParams {
    /// Published carbon set (Tersoff 1989).
    pub fn carbon() -> Self {
        TersoffParams {
            m: 3,
            gamma: 1.0,
            lambda3: 0.0,
            c: 3.8049e4,
            d: 4.3484,
            h: -0.57058,
            eta: 0.72751,
            beta: 1.5724e-7,
            lambda2: 2.2119,
            big_b: 346.74,
            big_r: 1.95,
            big_d: 0.15,
            lambda1: 3.4879,
            big_a: 1393.6,
        }
    }

    /// Published silicon set (Tersoff 1989).
    pub fn silicon() -> Self {
        TersoffParams {
            m: 3,
            gamma: 1.0,
            lambda3: 0.0,
            c: 1.0039e5,
            d: 16.217,
            h: -0.59825,
            eta: 0.78734,
            beta: 1.1e-6,
            lambda2: 1.7322,
            big_b: 471.18,
            big_r: 2.85,
            big_d: 0.15,
            lambda1: 2.4799,
            big_a: 1830.8,
        }
    }

    /// Effective cutoff `R + D`.
    pub fn cutoff(&self) -> f64 {
        self.big_r + self.big_d
    }

    /// Checks the three-body invariants and, when `pair_entry`, the pair ones.
    ///
    /// Only `(i, j, j)` entries carry pair parameters; other entries may leave
    /// them at zero, as published multi-species files do.
    pub fn validate(&self, pair_entry: bool) -> std::result::Result<(), String> {
        let finite = [
            self.gamma,
            self.lambda3,
            self.c,
            self.d,
            self.h,
            self.eta,
            self.beta,
            self.lambda2,
            self.big_b,
            self.big_r,
            self.big_d,
            self.lambda1,
            self.big_a,
        ];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err("non-finite parameter".into());
        }
        if self.m != 1 && self.m != 3 {
            return Err(format!("m must be 1 or 3, got {}", self.m));
        }
        if self.gamma <= 0.0 {
            return Err("gamma must be positive".into());
        }
        if self.d == 0.0 {
            return Err("d must be nonzero".into());
        }
        if self.big_d <= 0.0 {
            return Err("D must be positive".into());
        }
        if self.big_r <= self.big_d {
            return Err("R must exceed D".into());
        }
        if pair_entry {
            if self.big_a <= 0.0 || self.big_b <= 0.0 {
                return Err("A and B must be positive".into());
            }
            if self.eta <= 0.0 {
                return Err("n (eta) must be positive".into());
            }
            if self.beta < 0.0 || self.lambda1 < 0.0 || self.lambda2 < 0.0 {
                return Err("beta, lambda1 and lambda2 must be non-negative".into());
            }
        }
        Ok(())
    }
}

/// Parameters for every ordered species triple.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamTable {
    species: Vec<String>,
    entries: Vec<TersoffParams>,
}

impl ParamTable {
    /// `entries[(i * n + j) * n + k]` holds triple `(i, j, k)`.
    pub fn new(species: Vec<String>, entries: Vec<TersoffParams>) -> Result<Self> {
        let n = species.len();
        if n == 0 {
            return Err(Error::Config("parameter table has no species".into()));
        }
        if entries.len() != n * n * n {
            return Err(Error::Config(format!("{} species need {} entries, got {}", n, n * n * n, entries.len())));
        }
        let table = ParamTable { species, entries };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    table.get(i, j, k).validate(j == k).map_err(|e| {
                        Error::Config(format!("{} {} {}: {e}", table.species[i], table.species[j], table.species[k]))
                    })?;
                }
            }
        }
        Ok(table)
    }

    pub fn single(element: &str, p: TersoffParams) -> Result<Self> {
        Self::new(vec![element.to_string()], vec![p])
    }

    pub fn carbon() -> Self {
        Self::single("C", TersoffParams::carbon()).expect("published set is valid")
    }

    pub fn silicon() -> Self {
        Self::single("Si", TersoffParams::silicon()).expect("published set is valid")
    }

    /// Multi-species table from single-element sets with the mixing rules
    /// of Tersoff 1989: three-body terms from `i`; `lambda1`, `lambda2`
    /// arithmetic means, `A`, `B` geometric means with `B` scaled by `chi`
    /// for unlike pairs; the inner and outer cutoff radii geometric means.
    /// `(i, j, k)` takes its cutoff from the `i`-`k` pair, so `(i, j, j)`
    /// carries the `i`-`j` pair cutoff.
    pub fn mixture(elements: &[(&str, TersoffParams)], chi: f64) -> Result<Self> {
        let n = elements.len();
        let inner_outer = |p: &TersoffParams| (p.big_r - p.big_d, p.big_r + p.big_d);
        let mut entries = Vec::with_capacity(n * n * n);
        for (ei, (_, pi)) in elements.iter().enumerate() {
            for (ej, (_, pj)) in elements.iter().enumerate() {
                for (_, pk) in elements.iter() {
                    let (ri, si) = inner_outer(pi);
                    let (rk, sk) = inner_outer(pk);
                    let (r, s) = ((ri * rk).sqrt(), (si * sk).sqrt());
                    let x = if ei == ej { 1.0 } else { chi };
                    entries.push(TersoffParams {
                        lambda2: 0.5 * (pi.lambda2 + pj.lambda2),
                        big_b: x * (pi.big_b * pj.big_b).sqrt(),
                        big_r: 0.5 * (r + s),
                        big_d: 0.5 * (s - r),
                        lambda1: 0.5 * (pi.lambda1 + pj.lambda1),
                        big_a: (pi.big_a * pj.big_a).sqrt(),
                        ..*pi
                    });
                }
            }
        }
        Self::new(elements.iter().map(|(e, _)| e.to_string()).collect(), entries)
    }

    /// Carbon and silicon mixed with `chi = 0.9776` (Tersoff 1989).
    pub fn silicon_carbide() -> Self {
        Self::mixture(&[("C", TersoffParams::carbon()), ("Si", TersoffParams::silicon())], 0.9776)
            .expect("published sets are valid")
    }

    pub fn n_species(&self) -> usize {
        self.species.len()
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.species.iter().position(|s| s == name)
    }

    pub fn entries(&self) -> &[TersoffParams] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> &TersoffParams {
        let n = self.species.len();
        &self.entries[(i * n + j) * n + k]
    }

    /// Largest `R + D` over all entries.
    pub fn cutoff(&self) -> f64 {
        self.entries.iter().map(TersoffParams::cutoff).fold(0.0, f64::max)
    }

    /// Distance beyond which the pair `(i, j)` contributes nothing, either as
    /// a bond or as the `i`-`k` leg of some triple.
    pub fn pair_cutoff(&self, ti: usize, tj: usize) -> f64 {
        (0..self.n_species())
            .map(|tk| self.get(ti, tj, tk).cutoff().max(self.get(ti, tk, tj).cutoff()))
            .fold(0.0, f64::max)
    }
}

/// Bond geometry of a triple centred on `i`.
#[derive(Clone, Copy, Debug)]
pub struct TripletGeometry {
    pub r_ij: f64,
    pub r_ik: f64,
    pub cos_theta: f64,
    pub e_ij: Vec3,
    pub e_ik: Vec3,
}

impl TripletGeometry {
    /// From displacements `x_j - x_i` and `x_k - x_i`.
    pub fn new(d_ij: Vec3, d_ik: Vec3) -> Self {
        let r_ij = vec3::norm(d_ij);
        let r_ik = vec3::norm(d_ik);
        let e_ij = vec3::scale(1.0 / r_ij, d_ij);
        let e_ik = vec3::scale(1.0 / r_ik, d_ik);
        let cos_theta = vec3::dot(e_ij, e_ik).clamp(-1.0, 1.0);
        TripletGeometry { r_ij, r_ik, cos_theta, e_ij, e_ik }
    }
}

pub fn f_cutoff(r: f64, p: &TersoffParams) -> (f64, f64) {
    lanes::cutoff(r, &TripletCoeffs::<f64>::splat(&lanes::triplet_record(p)).cut)
}

pub fn f_repulsive(r: f64, p: &TersoffParams) -> (f64, f64) {
    lanes::repulsive(r, p.big_a, p.lambda1)
}

pub fn f_attractive(r: f64, p: &TersoffParams) -> (f64, f64) {
    lanes::attractive(r, p.big_b, p.lambda2)
}

pub fn g_angle(cos_theta: f64, p: &TersoffParams) -> (f64, f64) {
    lanes::angle(cos_theta, &TripletCoeffs::splat(&lanes::triplet_record(p)))
}

pub fn bond_order(zeta: f64, p: &TersoffParams) -> (f64, f64) {
    lanes::bond_order(zeta, &PairCoeffs::splat(&lanes::pair_record(p)))
}

/// One `zeta` term and its gradients with respect to `x_i`, `x_j`, `x_k`.
#[derive(Clone, Copy, Debug)]
pub struct ZetaTerm {
    pub value: f64,
    pub grad_i: Vec3,
    pub grad_j: Vec3,
    pub grad_k: Vec3,
}

pub fn zeta_term(geom: &TripletGeometry, p: &TersoffParams) -> ZetaTerm {
    let t = TripletCoeffs::splat(&lanes::triplet_record(p));
    let z = lanes::zeta_term(geom.r_ij, geom.e_ij, 1.0 / geom.r_ij, geom.r_ik, geom.e_ik, 1.0 / geom.r_ik, &t);
    ZetaTerm { value: z.value, grad_i: vec3::scale(-1.0, vec3::add(z.dj, z.dk)), grad_j: z.dj, grad_k: z.dk }
}

/// `V(i, j)` at fixed `zeta`, its position gradients, and `dV/dzeta`.
#[derive(Clone, Copy, Debug)]
pub struct PairEnergyForce {
    pub energy: f64,
    pub dv_dxi: Vec3,
    pub dv_dxj: Vec3,
    pub delta_zeta: f64,
}

/// `e_ij` is the unit vector from `i` to `j`; `p` the `(i, j, j)` entry.
pub fn pair_energy_force(r_ij: f64, e_ij: Vec3, zeta: f64, p: &TersoffParams) -> PairEnergyForce {
    let t = lanes::pair_terms(r_ij, zeta, &PairCoeffs::splat(&lanes::pair_record(p)));
    let dv_dxj = vec3::scale(t.dv_dr, e_ij);
    PairEnergyForce { energy: t.energy, dv_dxi: vec3::scale(-1.0, dv_dxj), dv_dxj, delta_zeta: t.delta_zeta }
}
