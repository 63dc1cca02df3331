//! One `zeta` walk per pair with cached gradients.
//!
//! The operation sequence mirrors the lane kernels at one lane, which is
//! what makes them bit-identical under strict math.

use std::ops::Range;

use crate::potential::lanes::{pair_terms, zeta_term, PairCoeffs, TripletCoeffs};
use crate::simd::{Scalar, SimdVector};

use super::{Accum, Frame, Probe};

pub(crate) fn chunk<T, P>(fr: &Frame<T>, rows: Range<usize>, acc: &mut Accum<T>, probe: &mut P)
where
    T: Scalar + SimdVector<Scalar = T>,
    P: Probe,
{
    let zero = T::from_f64(0.0);
    let half = T::from_f64(0.5);
    let ns = fr.prep.n_species;
    let pairs = fr.pairs;
    // d zeta / d x_k for every k of the current row
    let mut dk = vec![[zero; 3]; pairs.max_row];
    for i in rows {
        let row = pairs.row(i);
        for jj in row.clone() {
            probe.lanes(1, 1);
            let j = pairs.neighbor[jj] as usize;
            let pt = pairs.pair_type[jj] as usize;
            let g = &pairs.geom[jj];
            let (eij, rij, inv_ij) = ([g[0], g[1], g[2]], g[3], g[4]);

            let mut zeta = zero;
            let mut dj = [zero; 3];
            for (slot, kk) in row.clone().enumerate() {
                probe.visit(1);
                if kk == jj {
                    dk[slot] = [zero; 3];
                    continue;
                }
                probe.eval(1);
                let tk = fr.species[pairs.neighbor[kk] as usize] as usize;
                let t = TripletCoeffs::<T>::splat(&fr.prep.triplet[pt * ns + tk]);
                let h = &pairs.geom[kk];
                let z = zeta_term(rij, eij, inv_ij, h[3], [h[0], h[1], h[2]], h[4], &t);
                zeta += z.value;
                for a in 0..3 {
                    dj[a] += z.dj[a];
                }
                dk[slot] = z.dk;
            }

            let terms = pair_terms(rij, zeta, &PairCoeffs::<T>::splat(&fr.prep.pair[pt]));
            let e = (half * terms.energy).reduce_sum();
            acc.energy += e.to_f64();
            acc.atom_energy[i] += e;
            let fpair = half * terms.dv_dr;
            let dz = half * terms.delta_zeta;
            let mut gi: [T; 3] = std::array::from_fn(|a| fpair * eij[a] + dz * dj[a]);
            for a in 0..3 {
                acc.forces[j][a] += -gi[a];
            }
            for (slot, kk) in row.clone().enumerate() {
                let k = pairs.neighbor[kk] as usize;
                for a in 0..3 {
                    let gk = dz * dk[slot][a];
                    acc.forces[k][a] -= gk.reduce_sum();
                    gi[a] += gk;
                }
            }
            for a in 0..3 {
                acc.forces[i][a] += gi[a].reduce_sum();
            }
        }
    }
}
