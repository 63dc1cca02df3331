//! Brute-force Tersoff energy in double-double precision.
//!
//! This crate deliberately shares no code with `tersoff-core`: it takes raw
//! parameter values, loops over every ordered atom triple without neighbor
//! lists or cutoff bookkeeping beyond the cutoff function itself, and does all
//! arithmetic in [`Dd`]. It exists to check the production kernels.
//!
//! Energy convention: `E = 1/2 sum_i sum_{j != i} fc(r_ij) [fR(r_ij) + b_ij fA(r_ij)]`,
//! with `zeta_ij = sum_{k != i,j} fc(r_ik) g(theta_ijk) exp((lambda3 (r_ij - r_ik))^m)`.

pub mod dd;

pub use dd::Dd;

/// One parameter entry, fields named after the usual Tersoff symbols.
#[derive(Clone, Copy, Debug)]
pub struct Entry {
    pub m: f64,
    pub gamma: f64,
    pub lambda3: f64,
    pub c: f64,
    pub d: f64,
    pub h: f64,
    pub n: f64,
    pub beta: f64,
    pub lambda2: f64,
    pub big_b: f64,
    pub big_r: f64,
    pub big_d: f64,
    pub lambda1: f64,
    pub big_a: f64,
}

/// Parameters for every ordered species triple, indexed `(i * n + j) * n + k`.
#[derive(Clone, Debug)]
pub struct Table {
    pub n_species: usize,
    pub entries: Vec<Entry>,
}

impl Table {
    fn get(&self, i: usize, j: usize, k: usize) -> &Entry {
        &self.entries[(i * self.n_species + j) * self.n_species + k]
    }
}

fn d(x: f64) -> Dd {
    Dd::new(x)
}

fn cutoff(r: Dd, p: &Entry) -> Dd {
    let (big_r, big_d) = (d(p.big_r), d(p.big_d));
    if r < big_r - big_d {
        Dd::ONE
    } else if r > big_r + big_d {
        Dd::ZERO
    } else {
        let arg = dd::PI * (r - big_r) / (d(2.0) * big_d);
        d(0.5) - d(0.5) * arg.sin()
    }
}

fn angular(cos_theta: Dd, p: &Entry) -> Dd {
    let c2 = d(p.c) * d(p.c);
    let d2 = d(p.d) * d(p.d);
    let u = d(p.h) - cos_theta;
    d(p.gamma) * (Dd::ONE + c2 / d2 - c2 / (d2 + u * u))
}

fn bond_order(zeta: Dd, p: &Entry) -> Dd {
    if zeta.hi == 0.0 || p.beta == 0.0 {
        return Dd::ONE;
    }
    let n = d(p.n);
    let t = (d(p.beta) * zeta).powf(n);
    (Dd::ONE + t).powf(-(Dd::ONE / (d(2.0) * n)))
}

fn sub3(a: &[Dd; 3], b: &[Dd; 3]) -> [Dd; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot3(a: &[Dd; 3], b: &[Dd; 3]) -> Dd {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Total energy (eV) of an open cluster.
pub fn energy(positions: &[[Dd; 3]], species: &[usize], table: &Table) -> Dd {
    let n = positions.len();
    assert_eq!(species.len(), n);
    let mut total = Dd::ZERO;
    for i in 0..n {
        for j in 0..n {
            if j == i {
                continue;
            }
            let pij = table.get(species[i], species[j], species[j]);
            let rij_v = sub3(&positions[j], &positions[i]);
            let rij = dot3(&rij_v, &rij_v).sqrt();
            if rij >= d(pij.big_r + pij.big_d) {
                continue;
            }
            let mut zeta = Dd::ZERO;
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let pijk = table.get(species[i], species[j], species[k]);
                let rik_v = sub3(&positions[k], &positions[i]);
                let rik = dot3(&rik_v, &rik_v).sqrt();
                if rik >= d(pijk.big_r + pijk.big_d) {
                    continue;
                }
                let mut cos_theta = dot3(&rij_v, &rik_v) / (rij * rik);
                if cos_theta > Dd::ONE {
                    cos_theta = Dd::ONE;
                } else if cos_theta < -Dd::ONE {
                    cos_theta = -Dd::ONE;
                }
                let lin = d(pijk.lambda3) * (rij - rik);
                let arg = if pijk.m == 3.0 { lin * lin * lin } else { lin };
                zeta = zeta + cutoff(rik, pijk) * angular(cos_theta, pijk) * arg.exp();
            }
            let f_rep = d(pij.big_a) * (-(d(pij.lambda1) * rij)).exp();
            let f_att = -(d(pij.big_b) * (-(d(pij.lambda2) * rij)).exp());
            let b = bond_order(zeta, pij);
            total = total + d(0.5) * cutoff(rij, pij) * (f_rep + b * f_att);
        }
    }
    total
}

/// Convenience wrapper for `f64` coordinates.
pub fn energy_f64(positions: &[[f64; 3]], species: &[usize], table: &Table) -> Dd {
    let pos: Vec<[Dd; 3]> = positions.iter().map(|p| p.map(Dd::new)).collect();
    energy(&pos, species, table)
}

/// Forces by fourth-order central differences of [`energy`], with displacements
/// applied exactly in double-double arithmetic.
pub fn forces_fd(positions: &[[f64; 3]], species: &[usize], table: &Table, step: f64) -> Vec<[f64; 3]> {
    let base: Vec<[Dd; 3]> = positions.iter().map(|p| p.map(Dd::new)).collect();
    let h = Dd::new(step);
    let mut out = vec![[0.0; 3]; positions.len()];
    for a in 0..positions.len() {
        for c in 0..3 {
            let eval = |offset: f64| {
                let mut pos = base.clone();
                pos[a][c] = pos[a][c] + Dd::new(offset) * h;
                energy(&pos, species, table)
            };
            let (p2, p1, m1, m2) = (eval(2.0), eval(1.0), eval(-1.0), eval(-2.0));
            let deriv = (d(8.0) * (p1 - m1) - (p2 - m2)) / (d(12.0) * h);
            out[a][c] = -deriv.to_f64();
        }
    }
    out
}
