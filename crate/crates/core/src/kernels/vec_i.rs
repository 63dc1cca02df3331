//! Lanes are consecutive `(i, j)` pairs, possibly of different atoms `i`.
//!
//! Every lane walks the neighbor row of its own `i` with a cursor; lanes whose
//! row is exhausted are masked off until the longest row in the batch ends.
//! Lanes may share `i`, `j` or `k`, so every force update is a serialized
//! scatter.

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
    let mut kl = vec![V::Index::splat(0); pairs.max_row];
    let mut km = vec![V::Mask::splat(false); pairs.max_row];
    for b in batches.chunk(c) {
        let ids = batches.batch(b);
        let pid = V::Index::from_slice(ids);
        let mask = !pid.lanes_lt(V::Index::splat(0));
        probe.lanes(mask.count(), V::LANES);

        let g = V::gather_transpose(&pairs.geom, pid, mask);
        let (eij, rij, inv_ij) = ([g[0], g[1], g[2]], g[3], g[4]);
        let il = V::Index::masked_gather(&pairs.owner, pid, mask, 0);
        let jl = V::Index::masked_gather(&pairs.neighbor, pid, mask, 0);
        let pt = V::Index::masked_gather(&pairs.pair_type, pid, mask, 0);
        let pc = PairCoeffs::from_fields(V::gather_transpose(&fr.prep.pair, pt, mask));
        let first = V::Index::masked_gather(&pairs.row_first, il, mask, 0);
        let len = V::Index::masked_gather(&pairs.row_len, il, mask, 0);
        probe.gather(7);
        let tbase = pt.mul_scalar(ns);
        let steps = len.max_active(mask).max(0) as usize;

        let mut zeta = zero;
        let mut dj = [zero; 3];
        for s in 0..steps {
            let cursor = V::Index::splat(s as i32);
            let kk = first + cursor;
            let live = mask & cursor.lanes_lt(len);
            probe.visit(live.count());
            let kmask = live & !kk.lanes_eq(pid);
            km[s] = kmask;
            if kmask.none() {
                continue;
            }
            probe.eval(kmask.count());
            let k = V::Index::masked_gather(&pairs.neighbor, kk, kmask, 0);
            let tk = V::Index::masked_gather(fr.species, k, kmask, 0);
            let t = TripletCoeffs::from_fields(V::gather_transpose(&fr.prep.triplet, tbase + tk, kmask));
            let h = V::gather_transpose(&pairs.geom, kk, kmask);
            probe.gather(4);
            let z = zeta_term(rij, eij, inv_ij, h[3], [h[0], h[1], h[2]], h[4], &t);
            zeta += V::select(kmask, z.value, zero);
            for a in 0..3 {
                dj[a] += V::select(kmask, z.dj[a], zero);
                dk[s][a] = V::select(kmask, z.dk[a], zero);
            }
            kl[s] = k;
        }

        let terms = pair_terms(rij, zeta, &pc);
        let ev = V::select(mask, half * terms.energy, zero);
        acc.energy += ev.reduce_sum().to_f64();
        V::accumulate_scatter(&mut acc.atom_energy, il, ev, mask);
        let fpair = half * terms.dv_dr;
        let dz = V::select(mask, half * terms.delta_zeta, zero);
        let mut gi: [V; 3] = std::array::from_fn(|a| V::select(mask, fpair * eij[a] + dz * dj[a], zero));
        V::accumulate_scatter3(&mut acc.forces, jl, gi.map(|x| -x), mask);
        for s in 0..steps {
            if km[s].none() {
                continue;
            }
            let gk: [V; 3] = std::array::from_fn(|a| dz * dk[s][a]);
            V::accumulate_scatter3(&mut acc.forces, kl[s], gk.map(|x| -x), km[s]);
            for a in 0..3 {
                gi[a] += gk[a];
            }
        }
        V::accumulate_scatter3(&mut acc.forces, il, gi, mask);
    }
}
