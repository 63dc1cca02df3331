//! The textbook algorithm, straight from the skin neighbor list.

use std::ops::Range;

use crate::neighbor::{pair_geometry, GEOM_FIELDS};
use crate::potential::lanes::{pair_terms, zeta_term, zeta_value, PairCoeffs, Prepared, TripletCoeffs};
use crate::simd::{Scalar, SimdVector};

use super::{Accum, Inputs, Probe};

struct Neighbor<T> {
    k: usize,
    tk: usize,
    geom: [T; GEOM_FIELDS],
}

/// Neighbor `k` of `i` if it lies inside the pair cutoff.
#[inline]
fn within<T: Scalar>(inp: &Inputs, i: usize, k: u32) -> Option<Neighbor<T>> {
    let k = k as usize;
    let tk = inp.species[k];
    let d = inp.sim_box.delta(inp.positions[i], inp.positions[k]);
    let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    (r2 < inp.cutoffs.get2(inp.species[i], tk)).then(|| Neighbor { k, tk, geom: pair_geometry(d) })
}

#[inline(always)]
fn unit<T: Copy>(g: &[T; GEOM_FIELDS]) -> [T; 3] {
    [g[0], g[1], g[2]]
}

pub(crate) fn chunk<T, P>(inp: &Inputs, prep: &Prepared<T>, rows: Range<usize>, acc: &mut Accum<T>, probe: &mut P)
where
    T: Scalar + SimdVector<Scalar = T>,
    P: Probe,
{
    let half = T::from_f64(0.5);
    let ns = prep.n_species;
    for i in rows {
        let ti = inp.species[i];
        let row = inp.nl.row(i);
        for &jn in row {
            let Some(j) = within::<T>(inp, i, jn) else { continue };
            probe.lanes(1, 1);
            let pt = ti * ns + j.tk;
            let (rij, eij, inv_ij) = (j.geom[3], unit(&j.geom), j.geom[4]);

            let mut zeta = T::from_f64(0.0);
            for &kn in row {
                let Some(k) = within::<T>(inp, i, kn) else { continue };
                probe.visit(1);
                if k.k == j.k {
                    continue;
                }
                probe.eval(1);
                let t = TripletCoeffs::<T>::splat(&prep.triplet[pt * ns + k.tk]);
                zeta += zeta_value(rij, eij, k.geom[3], unit(&k.geom), &t);
            }

            let terms = pair_terms(rij, zeta, &PairCoeffs::<T>::splat(&prep.pair[pt]));
            let e = half * terms.energy;
            acc.energy += e.to_f64();
            acc.atom_energy[i] += e;
            let fpair = half * terms.dv_dr;
            for a in 0..3 {
                acc.forces[j.k][a] -= fpair * eij[a];
                acc.forces[i][a] += fpair * eij[a];
            }

            let dz = half * terms.delta_zeta;
            for &kn in row {
                let Some(k) = within::<T>(inp, i, kn) else { continue };
                probe.visit(1);
                if k.k == j.k {
                    continue;
                }
                probe.eval(1);
                let t = TripletCoeffs::<T>::splat(&prep.triplet[pt * ns + k.tk]);
                let z = zeta_term(rij, eij, inv_ij, k.geom[3], unit(&k.geom), k.geom[4], &t);
                for a in 0..3 {
                    acc.forces[j.k][a] -= dz * z.dj[a];
                    acc.forces[k.k][a] -= dz * z.dk[a];
                    acc.forces[i][a] += dz * (z.dj[a] + z.dk[a]);
                }
            }
        }
    }
}
