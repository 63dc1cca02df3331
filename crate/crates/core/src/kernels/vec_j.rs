//! Lanes are the neighbors `j` of one atom `i`; `k` is broadcast.

use crate::neighbor::Batches;
use crate::potential::lanes::{pair_terms, zeta_term, PairCoeffs, TripletCoeffs};
use crate::simd::{Scalar, SimdIndex, SimdMask, SimdVector};

use super::{Accum, Frame, Probe};

pub(crate) fn chunk<V, P>(fr: &Frame<V::Scalar>, batches: &Batches, c: usize, acc: &mut Accum<V::Scalar>, probe: &mut P)
where
    V: SimdVector,
    P: Probe,
{
    let zero = V::zero();
    let half = V::constant(0.5);
    let ns = fr.prep.n_species as i32;
    let pairs = fr.pairs;
    let mut dk = vec![[zero; 3]; pairs.max_row];
    for b in batches.chunk(c) {
        let ids = batches.batch(b);
        let pid = V::Index::from_slice(ids);
        let mask = !pid.lanes_lt(V::Index::splat(0));
        let active = mask.count();
        probe.lanes(active, V::LANES);
        // lane 0 is never padding
        let i = pairs.owner[ids[0] as usize] as usize;
        let row = pairs.row(i);

        let g = V::gather_transpose(&pairs.geom, pid, mask);
        let (eij, rij, inv_ij) = ([g[0], g[1], g[2]], g[3], g[4]);
        let jl = V::Index::masked_gather(&pairs.neighbor, pid, mask, 0);
        let pt = V::Index::masked_gather(&pairs.pair_type, pid, mask, 0);
        let pc = PairCoeffs::from_fields(V::gather_transpose(&fr.prep.pair, pt, mask));
        probe.gather(4);
        let tbase = pt.mul_scalar(ns);

        let mut zeta = zero;
        let mut dj = [zero; 3];
        for (slot, kk) in row.clone().enumerate() {
            probe.visit(active);
            let kmask = mask & !pid.lanes_eq(V::Index::splat(kk as i32));
            if kmask.none() {
                dk[slot] = [zero; 3];
                continue;
            }
            probe.eval(kmask.count());
            let tk = fr.species[pairs.neighbor[kk] as usize];
            let t =
                TripletCoeffs::from_fields(V::gather_transpose(&fr.prep.triplet, tbase + V::Index::splat(tk), kmask));
            probe.gather(1);
            let h = &pairs.geom[kk];
            let eik = [V::splat(h[0]), V::splat(h[1]), V::splat(h[2])];
            let z = zeta_term(rij, eij, inv_ij, V::splat(h[3]), eik, V::splat(h[4]), &t);
            zeta += V::select(kmask, z.value, zero);
            for a in 0..3 {
                dj[a] += V::select(kmask, z.dj[a], zero);
                dk[slot][a] = V::select(kmask, z.dk[a], zero);
            }
        }

        let terms = pair_terms(rij, zeta, &pc);
        let e = V::select(mask, half * terms.energy, zero).reduce_sum();
        acc.energy += e.to_f64();
        acc.atom_energy[i] += e;
        let fpair = half * terms.dv_dr;
        let dz = V::select(mask, half * terms.delta_zeta, zero);
        let mut gi: [V; 3] = std::array::from_fn(|a| V::select(mask, fpair * eij[a] + dz * dj[a], zero));
        V::accumulate_scatter3(&mut acc.forces, jl, gi.map(|x| -x), mask);
        for (slot, kk) in row.enumerate() {
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
