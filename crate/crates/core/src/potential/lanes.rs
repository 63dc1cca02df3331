//! The potential's component functions, written once over [`SimdVector`].
//!
//! The scalar API in the parent module and every kernel instantiate these
//! same functions, so a lane of a vector kernel performs exactly the
//! operations the scalar code performs for that pair or triplet.

use crate::simd::{Scalar, SimdMask, SimdVector};

use super::{ParamTable, TersoffParams};

pub const PAIR_FIELDS: usize = 10;
pub const TRIPLET_FIELDS: usize = 9;

/// Switching function coefficients: plateau below `lo`, zero above `hi`.
#[derive(Clone, Copy, Debug)]
pub struct Cutoff<V> {
    pub lo: V,
    pub hi: V,
    /// pi / (4 D)
    pub q: V,
}

/// Per (i, j) species pair, taken from the (i, j, j) entry.
#[derive(Clone, Copy, Debug)]
pub struct PairCoeffs<V> {
    pub big_a: V,
    pub big_b: V,
    pub lambda1: V,
    pub lambda2: V,
    pub beta: V,
    pub eta: V,
    pub neg_inv_2eta: V,
    pub cut: Cutoff<V>,
}

/// Per (i, j, k) species triple.
#[derive(Clone, Copy, Debug)]
pub struct TripletCoeffs<V> {
    pub lambda3: V,
    /// 1.0 or 3.0
    pub m: V,
    pub c2: V,
    pub d2: V,
    pub h: V,
    pub gamma: V,
    pub cut: Cutoff<V>,
}

fn cutoff_fields(p: &TersoffParams) -> [f64; 3] {
    [p.big_r - p.big_d, p.big_r + p.big_d, std::f64::consts::PI / (4.0 * p.big_d)]
}

pub fn pair_record<T: Scalar>(p: &TersoffParams) -> [T; PAIR_FIELDS] {
    let [lo, hi, q] = cutoff_fields(p);
    [p.big_a, p.big_b, p.lambda1, p.lambda2, p.beta, p.eta, -1.0 / (2.0 * p.eta), lo, hi, q].map(T::from_f64)
}

pub fn triplet_record<T: Scalar>(p: &TersoffParams) -> [T; TRIPLET_FIELDS] {
    let [lo, hi, q] = cutoff_fields(p);
    let m = if p.m == 3 { 3.0 } else { 1.0 };
    [p.lambda3, m, p.c * p.c, p.d * p.d, p.h, p.gamma, lo, hi, q].map(T::from_f64)
}

impl<V: SimdVector> PairCoeffs<V> {
    #[inline(always)]
    pub fn from_fields(f: [V; PAIR_FIELDS]) -> Self {
        PairCoeffs {
            big_a: f[0],
            big_b: f[1],
            lambda1: f[2],
            lambda2: f[3],
            beta: f[4],
            eta: f[5],
            neg_inv_2eta: f[6],
            cut: Cutoff { lo: f[7], hi: f[8], q: f[9] },
        }
    }

    #[inline(always)]
    pub fn splat(rec: &[V::Scalar; PAIR_FIELDS]) -> Self {
        Self::from_fields(rec.map(V::splat))
    }
}

impl<V: SimdVector> TripletCoeffs<V> {
    #[inline(always)]
    pub fn from_fields(f: [V; TRIPLET_FIELDS]) -> Self {
        TripletCoeffs {
            lambda3: f[0],
            m: f[1],
            c2: f[2],
            d2: f[3],
            h: f[4],
            gamma: f[5],
            cut: Cutoff { lo: f[6], hi: f[7], q: f[8] },
        }
    }

    #[inline(always)]
    pub fn splat(rec: &[V::Scalar; TRIPLET_FIELDS]) -> Self {
        Self::from_fields(rec.map(V::splat))
    }
}

/// Parameter records in kernel precision, indexed by species.
///
/// Pair records are indexed `ti * n + tj`, triplet records
/// `(ti * n + tj) * n + tk`, so a triplet index is `pair_index * n + tk`.
#[derive(Clone, Debug)]
pub struct Prepared<T> {
    pub n_species: usize,
    pub pair: Vec<[T; PAIR_FIELDS]>,
    pub triplet: Vec<[T; TRIPLET_FIELDS]>,
}

impl<T: Scalar> Prepared<T> {
    pub fn new(table: &ParamTable) -> Self {
        let n = table.n_species();
        let mut pair = Vec::with_capacity(n * n);
        for ti in 0..n {
            for tj in 0..n {
                pair.push(pair_record(table.get(ti, tj, tj)));
            }
        }
        let triplet = table.entries().iter().map(triplet_record).collect();
        Prepared { n_species: n, pair, triplet }
    }
}

/// `f_C` and its derivative.
#[inline(always)]
pub fn cutoff<V: SimdVector>(r: V, c: &Cutoff<V>) -> (V, V) {
    let inner = r.lanes_le(c.lo);
    let outer = r.lanes_ge(c.hi);
    let flat = inner | outer;
    let one = V::constant(1.0);
    let zero = V::zero();
    if flat.all() {
        return (V::select(inner, one, zero), zero);
    }
    // 1/2 - 1/2 sin(pi (r - R) / (2 D)) = sin^2(u), u = pi (R + D - r) / (4 D);
    // no cancellation as r approaches R + D
    let u = c.q * (c.hi - r);
    let (s, co) = u.sin_cos();
    let band = s * s;
    let dband = -(c.q + c.q) * s * co;
    (V::select(inner, one, V::select(outer, zero, band)), V::select(flat, zero, dband))
}

#[inline(always)]
fn split<V: SimdVector>(a: V) -> (V, V) {
    let t = V::constant(<V::Scalar as Scalar>::SPLIT) * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

/// `exp(-l r)` with the rounding error of `l r` fed back in.
///
/// Rounding the product shifts the result by `|l r|` half-ulps, which
/// reaches several ulp at the distances and decay constants in use.
#[inline(always)]
fn exp_neg_product<V: SimdVector>(l: V, r: V) -> V {
    let p = l * r;
    let (lh, ll) = split(l);
    let (rh, rl) = split(r);
    let err = ((lh * rh - p) + lh * rl + ll * rh) + ll * rl;
    let e = (-p).exp();
    e - e * err
}

/// `f_R = A exp(-lambda1 r)` and its derivative.
#[inline(always)]
pub fn repulsive<V: SimdVector>(r: V, big_a: V, lambda1: V) -> (V, V) {
    let v = big_a * exp_neg_product(lambda1, r);
    (v, -lambda1 * v)
}

/// `f_A = -B exp(-lambda2 r)` and its derivative.
#[inline(always)]
pub fn attractive<V: SimdVector>(r: V, big_b: V, lambda2: V) -> (V, V) {
    let v = -(big_b * exp_neg_product(lambda2, r));
    (v, -lambda2 * v)
}

/// `g(theta)` and `dg/dcos(theta)`.
#[inline(always)]
pub fn angle<V: SimdVector>(cos: V, t: &TripletCoeffs<V>) -> (V, V) {
    let hc = t.h - cos;
    let hc2 = hc * hc;
    let den = t.d2 + hc2;
    // gamma (1 + c^2/d^2 - c^2/den) rearranged so that cos = h gives gamma exactly
    let g = t.gamma * (V::constant(1.0) + t.c2 * hc2 / (t.d2 * den));
    let dg = -(V::constant(2.0) * t.gamma * t.c2 * hc) / (den * den);
    (g, dg)
}

/// `exp((lambda3 (r_ij - r_ik))^m)` and its derivative with respect to `r_ij`.
#[inline(always)]
fn radial<V: SimdVector>(rij: V, rik: V, t: &TripletCoeffs<V>) -> (V, V) {
    let zero = V::zero();
    // lambda3 = 0 in the published carbon and silicon sets
    if t.lambda3.lanes_eq(zero).all() {
        return (V::constant(1.0), zero);
    }
    let arg = t.lambda3 * (rij - rik);
    let cubic = t.m.lanes_eq(V::constant(3.0));
    let arg2 = arg * arg;
    let ex = V::select(cubic, arg2 * arg, arg).exp();
    let slope = V::select(cubic, V::constant(3.0) * t.lambda3 * arg2, t.lambda3);
    (ex, slope * ex)
}

#[inline(always)]
fn clamp_cos<V: SimdVector>(c: V) -> V {
    c.max(V::constant(-1.0)).min(V::constant(1.0))
}

/// Value of one `zeta` term, no derivatives.
#[inline(always)]
pub fn zeta_value<V: SimdVector>(rij: V, eij: [V; 3], rik: V, eik: [V; 3], t: &TripletCoeffs<V>) -> V {
    let cos = clamp_cos(eij[0] * eik[0] + eij[1] * eik[1] + eij[2] * eik[2]);
    let (fc, _) = cutoff(rik, &t.cut);
    let (g, _) = angle(cos, t);
    let (ex, _) = radial(rij, rik, t);
    fc * g * ex
}

/// A `zeta` term with its gradients with respect to `x_j` and `x_k`;
/// the gradient with respect to `x_i` is minus their sum.
#[derive(Clone, Copy, Debug)]
pub struct ZetaTerm<V> {
    pub value: V,
    pub dj: [V; 3],
    pub dk: [V; 3],
}

#[inline(always)]
pub fn zeta_term<V: SimdVector>(
    rij: V,
    eij: [V; 3],
    inv_rij: V,
    rik: V,
    eik: [V; 3],
    inv_rik: V,
    t: &TripletCoeffs<V>,
) -> ZetaTerm<V> {
    let cos = clamp_cos(eij[0] * eik[0] + eij[1] * eik[1] + eij[2] * eik[2]);
    let (fc, dfc) = cutoff(rik, &t.cut);
    let (g, dg) = angle(cos, t);
    let (ex, dex) = radial(rij, rik, t);
    let fcg = fc * g;
    let d_rij = fcg * dex;
    let d_rik = dfc * g * ex - d_rij;
    let d_cos = fc * dg * ex;
    let sj = d_cos * inv_rij;
    let sk = d_cos * inv_rik;
    let dj = std::array::from_fn(|a| d_rij * eij[a] + sj * (eik[a] - cos * eij[a]));
    let dk = std::array::from_fn(|a| d_rik * eik[a] + sk * (eij[a] - cos * eik[a]));
    ZetaTerm { value: fcg * ex, dj, dk }
}

/// `b(zeta)` and `db/dzeta`; the derivative is zero below `zeta = 1e-30`.
#[inline(always)]
pub fn bond_order<V: SimdVector>(zeta: V, p: &PairCoeffs<V>) -> (V, V) {
    let one = V::constant(1.0);
    let tmp = (p.beta * zeta).powf(p.eta);
    let onep = one + tmp;
    let b = onep.powf(p.neg_inv_2eta);
    let db = -(V::constant(0.5) * b * tmp) / (zeta * onep);
    (b, V::select(zeta.lanes_lt(V::constant(1e-30)), V::zero(), db))
}

/// `V(i, j) = f_C (f_R + b f_A)`, `dV/dr_ij` at fixed `zeta`, and `dV/dzeta`.
#[derive(Clone, Copy, Debug)]
pub struct PairTerms<V> {
    pub energy: V,
    pub dv_dr: V,
    pub delta_zeta: V,
}

#[inline(always)]
pub fn pair_terms<V: SimdVector>(r: V, zeta: V, p: &PairCoeffs<V>) -> PairTerms<V> {
    let (fc, dfc) = cutoff(r, &p.cut);
    let (fr, dfr) = repulsive(r, p.big_a, p.lambda1);
    let (fa, dfa) = attractive(r, p.big_b, p.lambda2);
    let (b, db) = bond_order(zeta, p);
    let inner = fr + b * fa;
    PairTerms { energy: fc * inner, dv_dr: dfc * inner + fc * (dfr + b * dfa), delta_zeta: fc * fa * db }
}
