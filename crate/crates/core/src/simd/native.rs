//! AVX2 registers: four `f64` or eight `f32` lanes.
//!
//! Arithmetic, comparisons, blends and gathers are single instructions.
//! Transcendentals run the [`fastmath`](super::fastmath) operation sequence
//! on whole registers (`f32` lanes are widened to two `f64` registers), so
//! every lane matches `Emulated<_, W, Fast>` bit for bit. Scatter stays
//! serialized in ascending lane order (AVX2 has no scatter).
//!
//! Only compiled when the target enables `avx2` and `fma`, which makes every
//! intrinsic below sound to call.

// Intrinsics are safe functions under an enabled target feature on recent
// compilers and unsafe on older ones.
#![allow(unused_unsafe)]

use std::arch::x86_64::*;
use std::fmt::{self, Debug};
use std::ops::{Add, AddAssign, BitAnd, BitOr, Div, Mul, MulAssign, Neg, Not, Sub, SubAssign};

use super::{fastmath, BackendDescriptor, Scalar, SimdIndex, SimdMask, SimdVector};

/// Panics unless every active lane of `idx` indexes into `len` records of
/// `fields` values each. Hardware gathers do not check bounds.
#[inline(always)]
fn check_gather<I: BoundsCheck>(idx: I, mask: I::Mask, len: usize, fields: usize) {
    assert!(len.saturating_mul(fields) <= i32::MAX as usize, "gather source too large for i32 offsets");
    let bad = idx.outside(len as i32) & mask.lane_bits();
    if bad != 0 {
        let l = bad.trailing_zeros() as usize;
        panic!("gather index {} out of bounds for length {len}", idx.lane(l));
    }
}

/// Register-wide bounds test behind [`check_gather`].
trait BoundsCheck: SimdIndex<Mask: LaneBits> {
    /// Bit `l` set when lane `l` is negative or at least `len`.
    fn outside(self, len: i32) -> u32;
}

trait LaneBits {
    fn lane_bits(self) -> u32;
}

macro_rules! mask_type {
    ($name:ident, $reg:ty, $lanes:expr, $and:ident, $or:ident, $xor:ident, $movemask:ident, $from_bits:expr, $ones:expr) => {
        /// Lane mask with every bit of an active lane set.
        #[derive(Clone, Copy)]
        pub struct $name($reg);

        impl $name {
            #[inline(always)]
            fn bits(self) -> u32 {
                unsafe { $movemask(self.0) as u32 }
            }
        }

        impl PartialEq for $name {
            fn eq(&self, o: &Self) -> bool {
                self.bits() == o.bits()
            }
        }

        impl Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(concat!(stringify!($name), "("))?;
                for l in 0..$lanes {
                    f.write_str(if self.test(l) { "T" } else { "F" })?;
                }
                f.write_str(")")
            }
        }

        impl BitAnd for $name {
            type Output = Self;
            #[inline(always)]
            fn bitand(self, o: Self) -> Self {
                $name(unsafe { $and(self.0, o.0) })
            }
        }

        impl BitOr for $name {
            type Output = Self;
            #[inline(always)]
            fn bitor(self, o: Self) -> Self {
                $name(unsafe { $or(self.0, o.0) })
            }
        }

        impl Not for $name {
            type Output = Self;
            #[inline(always)]
            fn not(self) -> Self {
                $name(unsafe { $xor(self.0, $ones) })
            }
        }

        impl SimdMask for $name {
            const LANES: usize = $lanes;

            #[inline(always)]
            fn splat(b: bool) -> Self {
                Self::from_fn(|_| b)
            }
            #[inline(always)]
            fn from_fn(mut f: impl FnMut(usize) -> bool) -> Self {
                let bits: [bool; $lanes] = std::array::from_fn(|l| f(l));
                $name($from_bits(bits))
            }
            #[inline(always)]
            fn test(self, lane: usize) -> bool {
                self.bits() >> lane & 1 == 1
            }
            #[inline(always)]
            fn any(self) -> bool {
                self.bits() != 0
            }
            #[inline(always)]
            fn all(self) -> bool {
                self.bits() == (1 << $lanes) - 1
            }
            #[inline(always)]
            fn count(self) -> usize {
                self.bits().count_ones() as usize
            }
        }
    };
}

#[inline(always)]
fn m64_from_bits(bits: [bool; 4]) -> __m256d {
    let words = bits.map(|b| -(b as i64));
    unsafe { _mm256_castsi256_pd(_mm256_loadu_si256(words.as_ptr().cast())) }
}

#[inline(always)]
fn m32_from_bits(bits: [bool; 8]) -> __m256 {
    let words = bits.map(|b| -(b as i32));
    unsafe { _mm256_castsi256_ps(_mm256_loadu_si256(words.as_ptr().cast())) }
}

mask_type!(M64x4, __m256d, 4, _mm256_and_pd, _mm256_or_pd, _mm256_xor_pd, _mm256_movemask_pd, m64_from_bits, unsafe {
    _mm256_castsi256_pd(_mm256_set1_epi64x(-1))
});
mask_type!(M32x8, __m256, 8, _mm256_and_ps, _mm256_or_ps, _mm256_xor_ps, _mm256_movemask_ps, m32_from_bits, unsafe {
    _mm256_castsi256_ps(_mm256_set1_epi32(-1))
});

impl LaneBits for M64x4 {
    #[inline(always)]
    fn lane_bits(self) -> u32 {
        self.bits()
    }
}

impl LaneBits for M32x8 {
    #[inline(always)]
    fn lane_bits(self) -> u32 {
        self.bits()
    }
}

/// Four `i32` indices paired with [`F64x4`].
#[derive(Clone, Copy)]
pub struct I32x4(__m128i);

impl I32x4 {
    #[inline(always)]
    fn to_array(self) -> [i32; 4] {
        let mut a = [0; 4];
        unsafe { _mm_storeu_si128(a.as_mut_ptr().cast(), self.0) };
        a
    }

    /// Widens a 32-bit lane predicate to the 64-bit mask layout.
    #[inline(always)]
    fn widen(cmp: __m128i) -> M64x4 {
        M64x4(unsafe { _mm256_castsi256_pd(_mm256_cvtepi32_epi64(cmp)) })
    }
}

/// Eight `i32` indices paired with [`F32x8`].
#[derive(Clone, Copy)]
pub struct I32x8(__m256i);

impl I32x8 {
    #[inline(always)]
    fn to_array(self) -> [i32; 8] {
        let mut a = [0; 8];
        unsafe { _mm256_storeu_si256(a.as_mut_ptr().cast(), self.0) };
        a
    }
}

macro_rules! index_common {
    ($name:ident, $lanes:expr) => {
        impl PartialEq for $name {
            fn eq(&self, o: &Self) -> bool {
                self.to_array() == o.to_array()
            }
        }

        impl Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}{:?}", stringify!($name), self.to_array())
            }
        }
    };
}

index_common!(I32x4, 4);
index_common!(I32x8, 8);

impl Add for I32x4 {
    type Output = Self;
    #[inline(always)]
    fn add(self, o: Self) -> Self {
        I32x4(unsafe { _mm_add_epi32(self.0, o.0) })
    }
}

impl Add for I32x8 {
    type Output = Self;
    #[inline(always)]
    fn add(self, o: Self) -> Self {
        I32x8(unsafe { _mm256_add_epi32(self.0, o.0) })
    }
}

impl BoundsCheck for I32x4 {
    #[inline(always)]
    fn outside(self, len: i32) -> u32 {
        unsafe {
            let low = _mm_cmplt_epi32(self.0, _mm_setzero_si128());
            let high = _mm_cmpgt_epi32(self.0, _mm_set1_epi32(len - 1));
            _mm_movemask_ps(_mm_castsi128_ps(_mm_or_si128(low, high))) as u32
        }
    }
}

impl BoundsCheck for I32x8 {
    #[inline(always)]
    fn outside(self, len: i32) -> u32 {
        unsafe {
            let low = _mm256_cmpgt_epi32(_mm256_setzero_si256(), self.0);
            let high = _mm256_cmpgt_epi32(self.0, _mm256_set1_epi32(len - 1));
            _mm256_movemask_ps(_mm256_castsi256_ps(_mm256_or_si256(low, high))) as u32
        }
    }
}

impl SimdIndex for I32x4 {
    type Mask = M64x4;
    const LANES: usize = 4;

    #[inline(always)]
    fn splat(i: i32) -> Self {
        I32x4(unsafe { _mm_set1_epi32(i) })
    }
    #[inline(always)]
    fn from_fn(f: impl FnMut(usize) -> i32) -> Self {
        let a: [i32; 4] = std::array::from_fn(f);
        I32x4(unsafe { _mm_loadu_si128(a.as_ptr().cast()) })
    }
    #[inline(always)]
    fn lane(self, l: usize) -> i32 {
        self.to_array()[l]
    }
    #[inline(always)]
    fn from_slice(s: &[i32]) -> Self {
        assert!(s.len() >= 4);
        I32x4(unsafe { _mm_loadu_si128(s.as_ptr().cast()) })
    }
    #[inline(always)]
    fn mul_scalar(self, k: i32) -> Self {
        I32x4(unsafe { _mm_mullo_epi32(self.0, _mm_set1_epi32(k)) })
    }
    #[inline(always)]
    fn lanes_eq(self, o: Self) -> M64x4 {
        Self::widen(unsafe { _mm_cmpeq_epi32(self.0, o.0) })
    }
    #[inline(always)]
    fn lanes_lt(self, o: Self) -> M64x4 {
        Self::widen(unsafe { _mm_cmplt_epi32(self.0, o.0) })
    }
}

impl SimdIndex for I32x8 {
    type Mask = M32x8;
    const LANES: usize = 8;

    #[inline(always)]
    fn splat(i: i32) -> Self {
        I32x8(unsafe { _mm256_set1_epi32(i) })
    }
    #[inline(always)]
    fn from_fn(f: impl FnMut(usize) -> i32) -> Self {
        let a: [i32; 8] = std::array::from_fn(f);
        I32x8(unsafe { _mm256_loadu_si256(a.as_ptr().cast()) })
    }
    #[inline(always)]
    fn lane(self, l: usize) -> i32 {
        self.to_array()[l]
    }
    #[inline(always)]
    fn from_slice(s: &[i32]) -> Self {
        assert!(s.len() >= 8);
        I32x8(unsafe { _mm256_loadu_si256(s.as_ptr().cast()) })
    }
    #[inline(always)]
    fn mul_scalar(self, k: i32) -> Self {
        I32x8(unsafe { _mm256_mullo_epi32(self.0, _mm256_set1_epi32(k)) })
    }
    #[inline(always)]
    fn lanes_eq(self, o: Self) -> M32x8 {
        M32x8(unsafe { _mm256_castsi256_ps(_mm256_cmpeq_epi32(self.0, o.0)) })
    }
    #[inline(always)]
    fn lanes_lt(self, o: Self) -> M32x8 {
        M32x8(unsafe { _mm256_castsi256_ps(_mm256_cmpgt_epi32(o.0, self.0)) })
    }
}

macro_rules! float_type {
    (
        $name:ident, $t:ty, $reg:ty, $lanes:expr, $mask:ident, $index:ident,
        set1 = $set1:ident, load = $load:ident, store = $store:ident,
        add = $add:ident, sub = $sub:ident, mul = $mul:ident, div = $div:ident,
        fmadd = $fmadd:ident, min = $min:ident, max = $max:ident, sqrt = $sqrt:ident,
        and = $and:ident, andnot = $andnot:ident, xor = $xor:ident,
        cmp = $cmp:ident, blend = $blend:ident
    ) => {
        #[derive(Clone, Copy)]
        pub struct $name($reg);

        impl $name {
            #[inline(always)]
            pub fn to_array(self) -> [$t; $lanes] {
                let mut a = [0.0; $lanes];
                unsafe { $store(a.as_mut_ptr(), self.0) };
                a
            }

            #[inline(always)]
            fn from_array(a: [$t; $lanes]) -> Self {
                $name(unsafe { $load(a.as_ptr()) })
            }
        }

        impl Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.debug_list().entries(self.to_array().iter()).finish()
            }
        }

        impl Add for $name {
            type Output = Self;
            #[inline(always)]
            fn add(self, o: Self) -> Self {
                $name(unsafe { $add(self.0, o.0) })
            }
        }

        impl Sub for $name {
            type Output = Self;
            #[inline(always)]
            fn sub(self, o: Self) -> Self {
                $name(unsafe { $sub(self.0, o.0) })
            }
        }

        impl Mul for $name {
            type Output = Self;
            #[inline(always)]
            fn mul(self, o: Self) -> Self {
                $name(unsafe { $mul(self.0, o.0) })
            }
        }

        impl Div for $name {
            type Output = Self;
            #[inline(always)]
            fn div(self, o: Self) -> Self {
                $name(unsafe { $div(self.0, o.0) })
            }
        }

        impl Neg for $name {
            type Output = Self;
            #[inline(always)]
            fn neg(self) -> Self {
                $name(unsafe { $xor(self.0, $set1(-0.0)) })
            }
        }

        impl AddAssign for $name {
            #[inline(always)]
            fn add_assign(&mut self, o: Self) {
                *self = *self + o;
            }
        }

        impl SubAssign for $name {
            #[inline(always)]
            fn sub_assign(&mut self, o: Self) {
                *self = *self - o;
            }
        }

        impl MulAssign for $name {
            #[inline(always)]
            fn mul_assign(&mut self, o: Self) {
                *self = *self * o;
            }
        }

        impl SimdVector for $name {
            type Scalar = $t;
            type Mask = $mask;
            type Index = $index;
            const LANES: usize = $lanes;

            fn descriptor() -> BackendDescriptor {
                BackendDescriptor { name: "native", width: $lanes, precision: <$t as Scalar>::PRECISION }
            }

            #[inline(always)]
            fn splat(x: $t) -> Self {
                $name(unsafe { $set1(x) })
            }
            #[inline(always)]
            fn from_fn(f: impl FnMut(usize) -> $t) -> Self {
                Self::from_array(std::array::from_fn(f))
            }
            #[inline(always)]
            fn lane(self, l: usize) -> $t {
                self.to_array()[l]
            }
            #[inline(always)]
            fn from_slice(s: &[$t]) -> Self {
                assert!(s.len() >= $lanes);
                $name(unsafe { $load(s.as_ptr()) })
            }
            #[inline(always)]
            fn write_to(self, out: &mut [$t]) {
                assert!(out.len() >= $lanes);
                unsafe { $store(out.as_mut_ptr(), self.0) }
            }
            #[inline(always)]
            fn mul_add(self, a: Self, b: Self) -> Self {
                $name(unsafe { $fmadd(self.0, a.0, b.0) })
            }
            #[inline(always)]
            fn min(self, o: Self) -> Self {
                $name(unsafe { $min(self.0, o.0) })
            }
            #[inline(always)]
            fn max(self, o: Self) -> Self {
                $name(unsafe { $max(self.0, o.0) })
            }
            #[inline(always)]
            fn abs(self) -> Self {
                $name(unsafe { $andnot($set1(-0.0), self.0) })
            }
            #[inline(always)]
            fn sqrt(self) -> Self {
                $name(unsafe { $sqrt(self.0) })
            }
            #[inline(always)]
            fn exp(self) -> Self {
                $name(Self::wide(|x| vmath::exp(x), self.0))
            }
            #[inline(always)]
            fn sin(self) -> Self {
                self.sin_cos().0
            }
            #[inline(always)]
            fn cos(self) -> Self {
                self.sin_cos().1
            }
            #[inline(always)]
            fn sin_cos(self) -> (Self, Self) {
                let (s, c) = Self::wide2(|x| vmath::sin_cos(x), self.0);
                ($name(s), $name(c))
            }
            #[inline(always)]
            fn powf(self, e: Self) -> Self {
                $name(Self::wide_pow(self.0, e.0))
            }
            #[inline(always)]
            fn lanes_lt(self, o: Self) -> $mask {
                $mask(unsafe { $cmp::<_CMP_LT_OQ>(self.0, o.0) })
            }
            #[inline(always)]
            fn lanes_le(self, o: Self) -> $mask {
                $mask(unsafe { $cmp::<_CMP_LE_OQ>(self.0, o.0) })
            }
            #[inline(always)]
            fn lanes_eq(self, o: Self) -> $mask {
                $mask(unsafe { $cmp::<_CMP_EQ_OQ>(self.0, o.0) })
            }
            #[inline(always)]
            fn select(mask: $mask, a: Self, b: Self) -> Self {
                $name(unsafe { $blend(b.0, a.0, mask.0) })
            }
            #[inline(always)]
            fn masked_gather(base: &[$t], idx: $index, mask: $mask, fill: $t) -> Self {
                <Self as NativeGather>::gather(base, idx, mask, fill)
            }
            #[inline(always)]
            fn gather_transpose<const K: usize>(records: &[[$t; K]], idx: $index, mask: $mask) -> [Self; K] {
                <Self as NativeGather>::gather_records(records, idx, mask)
            }
            #[inline(always)]
            fn reduce_sum(self) -> $t {
                let mut s = 0.0;
                for x in self.to_array() {
                    s += x;
                }
                s
            }
            #[inline(always)]
            fn accumulate_scatter(dest: &mut [$t], idx: $index, vals: Self, mask: $mask) {
                let (idx, vals) = (idx.to_array(), vals.to_array());
                let mut bits = mask.bits();
                while bits != 0 {
                    let l = bits.trailing_zeros() as usize;
                    dest[idx[l] as usize] += vals[l];
                    bits &= bits - 1;
                }
            }
            #[inline(always)]
            fn accumulate_scatter3(dest: &mut [[$t; 3]], idx: $index, vals: [Self; 3], mask: $mask) {
                let idx = idx.to_array();
                let [x, y, z] = vals.map(|v| v.to_array());
                let mut bits = mask.bits();
                while bits != 0 {
                    let l = bits.trailing_zeros() as usize;
                    let d = &mut dest[idx[l] as usize];
                    d[0] += x[l];
                    d[1] += y[l];
                    d[2] += z[l];
                    bits &= bits - 1;
                }
            }
        }
    };
}

float_type!(
    F64x4,
    f64,
    __m256d,
    4,
    M64x4,
    I32x4,
    set1 = _mm256_set1_pd,
    load = _mm256_loadu_pd,
    store = _mm256_storeu_pd,
    add = _mm256_add_pd,
    sub = _mm256_sub_pd,
    mul = _mm256_mul_pd,
    div = _mm256_div_pd,
    fmadd = _mm256_fmadd_pd,
    min = _mm256_min_pd,
    max = _mm256_max_pd,
    sqrt = _mm256_sqrt_pd,
    and = _mm256_and_pd,
    andnot = _mm256_andnot_pd,
    xor = _mm256_xor_pd,
    cmp = _mm256_cmp_pd,
    blend = _mm256_blendv_pd
);

float_type!(
    F32x8,
    f32,
    __m256,
    8,
    M32x8,
    I32x8,
    set1 = _mm256_set1_ps,
    load = _mm256_loadu_ps,
    store = _mm256_storeu_ps,
    add = _mm256_add_ps,
    sub = _mm256_sub_ps,
    mul = _mm256_mul_ps,
    div = _mm256_div_ps,
    fmadd = _mm256_fmadd_ps,
    min = _mm256_min_ps,
    max = _mm256_max_ps,
    sqrt = _mm256_sqrt_ps,
    and = _mm256_and_ps,
    andnot = _mm256_andnot_ps,
    xor = _mm256_xor_ps,
    cmp = _mm256_cmp_ps,
    blend = _mm256_blendv_ps
);

// f64 routines applied to each lane type.

impl F64x4 {
    #[inline(always)]
    fn wide(f: impl Fn(__m256d) -> __m256d, x: __m256d) -> __m256d {
        f(x)
    }
    #[inline(always)]
    fn wide2(f: impl Fn(__m256d) -> (__m256d, __m256d), x: __m256d) -> (__m256d, __m256d) {
        f(x)
    }
    #[inline(always)]
    fn wide_pow(x: __m256d, y: __m256d) -> __m256d {
        vmath::pow(x, y)
    }
}

impl F32x8 {
    #[inline(always)]
    fn split(x: __m256) -> (__m256d, __m256d) {
        unsafe { (_mm256_cvtps_pd(_mm256_castps256_ps128(x)), _mm256_cvtps_pd(_mm256_extractf128_ps::<1>(x))) }
    }
    #[inline(always)]
    fn join(lo: __m256d, hi: __m256d) -> __m256 {
        unsafe { _mm256_set_m128(_mm256_cvtpd_ps(hi), _mm256_cvtpd_ps(lo)) }
    }
    #[inline(always)]
    fn wide(f: impl Fn(__m256d) -> __m256d, x: __m256) -> __m256 {
        let (lo, hi) = Self::split(x);
        Self::join(f(lo), f(hi))
    }
    #[inline(always)]
    fn wide2(f: impl Fn(__m256d) -> (__m256d, __m256d), x: __m256) -> (__m256, __m256) {
        let (lo, hi) = Self::split(x);
        let ((a, b), (c, d)) = (f(lo), f(hi));
        (Self::join(a, c), Self::join(b, d))
    }
    #[inline(always)]
    fn wide_pow(x: __m256, y: __m256) -> __m256 {
        let ((xl, xh), (yl, yh)) = (Self::split(x), Self::split(y));
        Self::join(vmath::pow(xl, yl), vmath::pow(xh, yh))
    }
}

/// [`fastmath`] on four `f64` lanes, operation for operation.
mod vmath {
    use super::*;

    const LOG2_E: f64 = std::f64::consts::LOG2_E;
    const LN2_HI: f64 = 6.931_471_803_691_238_164_90e-01;
    const LN2_LO: f64 = 1.908_214_929_270_587_700_02e-10;
    const EXP_OVERFLOW: f64 = 709.782_712_893_384;
    const EXP_UNDERFLOW: f64 = -745.133_219_101_941_1;
    const EXP_COEFFS: [f64; 12] = [
        1.0 / 6_227_020_800.0,
        1.0 / 479_001_600.0,
        1.0 / 39_916_800.0,
        1.0 / 3_628_800.0,
        1.0 / 362_880.0,
        1.0 / 40_320.0,
        1.0 / 5_040.0,
        1.0 / 720.0,
        1.0 / 120.0,
        1.0 / 24.0,
        1.0 / 6.0,
        0.5,
    ];
    const FRAC_2_PI: f64 = std::f64::consts::FRAC_2_PI;
    const PIO2_1: f64 = 1.570_796_326_734_125_614_17e+00;
    const PIO2_2: f64 = 6.077_100_506_303_965_976_60e-11;
    const PIO2_3: f64 = 2.022_266_248_711_166_455_80e-21;
    const REDUCTION_LIMIT: f64 = 1.0e5;
    const SIN_COEFFS: [f64; 9] = [
        -1.0 / 121_645_100_408_832_000.0,
        1.0 / 355_687_428_096_000.0,
        -1.0 / 1_307_674_368_000.0,
        1.0 / 6_227_020_800.0,
        -1.0 / 39_916_800.0,
        1.0 / 362_880.0,
        -1.0 / 5_040.0,
        1.0 / 120.0,
        1.0 / 6.0,
    ];
    const COS_COEFFS: [f64; 9] = [
        1.0 / 2_432_902_008_176_640_000.0,
        -1.0 / 6_402_373_705_728_000.0,
        1.0 / 20_922_789_888_000.0,
        -1.0 / 87_178_291_200.0,
        1.0 / 479_001_600.0,
        -1.0 / 3_628_800.0,
        1.0 / 40_320.0,
        -1.0 / 720.0,
        1.0 / 24.0,
    ];
    const LOG_COEFFS: [f64; 7] = [
        6.666_666_666_666_735_130e-01,
        3.999_999_999_940_941_908e-01,
        2.857_142_874_366_239_149e-01,
        2.222_219_843_214_978_396e-01,
        1.818_357_216_161_805_012e-01,
        1.531_383_769_920_937_332e-01,
        1.479_819_860_511_658_591e-01,
    ];
    /// Adding 1.5 * 2^52 puts a small integer in the low mantissa bits.
    const MAGIC: f64 = 6_755_399_441_055_744.0;

    #[inline(always)]
    fn c(x: f64) -> __m256d {
        unsafe { _mm256_set1_pd(x) }
    }
    #[inline(always)]
    fn add(a: __m256d, b: __m256d) -> __m256d {
        unsafe { _mm256_add_pd(a, b) }
    }
    #[inline(always)]
    fn sub(a: __m256d, b: __m256d) -> __m256d {
        unsafe { _mm256_sub_pd(a, b) }
    }
    #[inline(always)]
    fn mul(a: __m256d, b: __m256d) -> __m256d {
        unsafe { _mm256_mul_pd(a, b) }
    }
    #[inline(always)]
    fn blend(mask: __m256d, yes: __m256d, no: __m256d) -> __m256d {
        unsafe { _mm256_blendv_pd(no, yes, mask) }
    }
    #[inline(always)]
    fn gt(a: __m256d, b: __m256d) -> __m256d {
        unsafe { _mm256_cmp_pd::<_CMP_GT_OQ>(a, b) }
    }
    /// Low bits of the integer-valued lanes of `d`, `|d| < 2^51`.
    #[inline(always)]
    fn int_bits(d: __m256d) -> __m256i {
        unsafe { _mm256_sub_epi64(_mm256_castpd_si256(add(d, c(MAGIC))), _mm256_castpd_si256(c(MAGIC))) }
    }
    #[inline(always)]
    fn pow2(d: __m256d) -> __m256d {
        unsafe { _mm256_castsi256_pd(_mm256_slli_epi64::<52>(int_bits(add(d, c(1023.0))))) }
    }
    #[inline(always)]
    fn mask_of(bits: __m256i, bit: i64) -> __m256d {
        unsafe {
            let b = _mm256_set1_epi64x(bit);
            _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(bits, b), b))
        }
    }
    #[inline(always)]
    fn negate_where(mask: __m256d, x: __m256d) -> __m256d {
        unsafe { _mm256_xor_pd(x, _mm256_and_pd(mask, c(-0.0))) }
    }
    #[inline(always)]
    fn horner(x: __m256d, coeffs: &[f64]) -> __m256d {
        let mut p = c(coeffs[0]);
        for &k in &coeffs[1..] {
            p = add(mul(p, x), c(k));
        }
        p
    }
    #[inline(always)]
    fn lanes(x: __m256d) -> [f64; 4] {
        let mut a = [0.0; 4];
        unsafe { _mm256_storeu_pd(a.as_mut_ptr(), x) };
        a
    }

    #[inline(always)]
    pub fn exp(x: __m256d) -> __m256d {
        unsafe {
            let k = _mm256_round_pd::<{ _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC }>(mul(x, c(LOG2_E)));
            let k = _mm256_min_pd(_mm256_max_pd(k, c(-1100.0)), c(1100.0));
            let r = sub(sub(x, mul(k, c(LN2_HI))), mul(k, c(LN2_LO)));
            let p = horner(r, &EXP_COEFFS);
            let er = add(c(1.0), add(r, mul(mul(r, r), p)));
            let half = _mm256_round_pd::<{ _MM_FROUND_TO_ZERO | _MM_FROUND_NO_EXC }>(mul(k, c(0.5)));
            let y = mul(mul(er, pow2(half)), pow2(sub(k, half)));
            let y = blend(_mm256_cmp_pd::<_CMP_LT_OQ>(x, c(EXP_UNDERFLOW)), c(0.0), y);
            blend(gt(x, c(EXP_OVERFLOW)), c(f64::INFINITY), y)
        }
    }

    #[inline(always)]
    pub fn sin_cos(x: __m256d) -> (__m256d, __m256d) {
        unsafe {
            let q = _mm256_round_pd::<{ _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC }>(mul(x, c(FRAC_2_PI)));
            let r = sub(sub(sub(x, mul(q, c(PIO2_1))), mul(q, c(PIO2_2))), mul(q, c(PIO2_3)));
            let r2 = mul(r, r);
            let p = horner(r2, &SIN_COEFFS[..8]);
            let s = sub(r, mul(mul(r, r2), sub(c(SIN_COEFFS[8]), mul(r2, p))));
            let p = horner(r2, &COS_COEFFS);
            let hr2 = mul(c(0.5), r2);
            let w = sub(c(1.0), hr2);
            let co = add(w, add(sub(sub(c(1.0), w), hr2), mul(mul(r2, r2), p)));
            let qi = int_bits(q);
            let odd = mask_of(qi, 1);
            let high = mask_of(qi, 2);
            let sin = negate_where(high, blend(odd, co, s));
            let cos = negate_where(_mm256_xor_pd(odd, high), blend(odd, s, co));
            let far = gt(_mm256_andnot_pd(c(-0.0), x), c(REDUCTION_LIMIT));
            if _mm256_movemask_pd(far) == 0 {
                return (sin, cos);
            }
            let (xs, mut ss, mut cs) = (lanes(x), lanes(sin), lanes(cos));
            for l in 0..4 {
                if xs[l].abs() > REDUCTION_LIMIT {
                    ss[l] = fastmath::sin(xs[l]);
                    cs[l] = fastmath::cos(xs[l]);
                }
            }
            (_mm256_loadu_pd(ss.as_ptr()), _mm256_loadu_pd(cs.as_ptr()))
        }
    }

    #[inline(always)]
    fn ln_normal(x: __m256d) -> __m256d {
        unsafe {
            let bits = _mm256_castpd_si256(x);
            let e = _mm256_or_si256(_mm256_srli_epi64::<52>(bits), _mm256_castpd_si256(c(MAGIC)));
            let k = sub(sub(_mm256_castsi256_pd(e), c(MAGIC)), c(1023.0));
            let m = _mm256_or_si256(
                _mm256_and_si256(bits, _mm256_set1_epi64x((1 << 52) - 1)),
                _mm256_set1_epi64x(0x3ff0_0000_0000_0000),
            );
            let m = _mm256_castsi256_pd(m);
            let big = gt(m, c(std::f64::consts::SQRT_2));
            let m = blend(big, mul(m, c(0.5)), m);
            let k = blend(big, add(k, c(1.0)), k);
            let f = sub(m, c(1.0));
            let s = _mm256_div_pd(f, add(c(2.0), f));
            let z = mul(s, s);
            let w = mul(z, z);
            let l = &LOG_COEFFS;
            let t1 = mul(w, add(c(l[1]), mul(w, add(c(l[3]), mul(w, c(l[5]))))));
            let t2 = mul(z, add(c(l[0]), mul(w, add(c(l[2]), mul(w, add(c(l[4]), mul(w, c(l[6]))))))));
            let r = add(t2, t1);
            let hfsq = mul(mul(c(0.5), f), f);
            sub(mul(k, c(LN2_HI)), sub(sub(hfsq, add(mul(s, add(hfsq, r)), mul(k, c(LN2_LO)))), f))
        }
    }

    #[inline(always)]
    pub fn pow(x: __m256d, y: __m256d) -> __m256d {
        unsafe {
            let out = exp(mul(y, ln_normal(x)));
            let regular = _mm256_and_pd(
                _mm256_and_pd(
                    _mm256_cmp_pd::<_CMP_GE_OQ>(x, c(f64::MIN_POSITIVE)),
                    _mm256_cmp_pd::<_CMP_LE_OQ>(x, c(f64::MAX)),
                ),
                _mm256_cmp_pd::<_CMP_LE_OQ>(_mm256_andnot_pd(c(-0.0), y), c(f64::MAX)),
            );
            if _mm256_movemask_pd(regular) == 0b1111 {
                return out;
            }
            let (xs, ys, mut os) = (lanes(x), lanes(y), lanes(out));
            for l in 0..4 {
                if !fastmath::pow_is_regular(xs[l], ys[l]) {
                    os[l] = xs[l].powf(ys[l]);
                }
            }
            _mm256_loadu_pd(os.as_ptr())
        }
    }
}

// Gathers need the concrete intrinsics, so they live outside the macro.

impl F64x4 {
    #[inline(always)]
    fn gather_field(base: *const f64, offsets: __m128i, mask: M64x4, fill: __m256d) -> __m256d {
        // SAFETY: callers check every active offset against the source length.
        unsafe { _mm256_mask_i32gather_pd::<8>(fill, base, offsets, mask.0) }
    }
}

impl F32x8 {
    #[inline(always)]
    fn gather_field(base: *const f32, offsets: __m256i, mask: M32x8, fill: __m256) -> __m256 {
        // SAFETY: callers check every active offset against the source length.
        unsafe { _mm256_mask_i32gather_ps::<4>(fill, base, offsets, mask.0) }
    }
}

/// Hardware gathers behind the `SimdVector` gather methods.
trait NativeGather: SimdVector {
    fn gather(base: &[Self::Scalar], idx: Self::Index, mask: Self::Mask, fill: Self::Scalar) -> Self;
    fn gather_records<const K: usize>(records: &[[Self::Scalar; K]], idx: Self::Index, mask: Self::Mask) -> [Self; K];
}

macro_rules! native_gather {
    ($name:ident, $index:ident, $mullo:ident, $set1i:ident, $zero:ident) => {
        impl NativeGather for $name {
            #[inline(always)]
            fn gather(base: &[Self::Scalar], idx: $index, mask: Self::Mask, fill: Self::Scalar) -> Self {
                check_gather(idx, mask, base.len(), 1);
                $name(Self::gather_field(base.as_ptr(), idx.0, mask, Self::splat(fill).0))
            }

            #[inline(always)]
            fn gather_records<const K: usize>(
                records: &[[Self::Scalar; K]],
                idx: $index,
                mask: Self::Mask,
            ) -> [Self; K] {
                check_gather(idx, mask, records.len(), K);
                let offsets = unsafe { $mullo(idx.0, $set1i(K as i32)) };
                let base = records.as_ptr().cast::<Self::Scalar>();
                let zero = unsafe { $zero() };
                // `wrapping_add` keeps the pointer arithmetic defined for
                // empty record slices, where no lane is active.
                std::array::from_fn(|f| $name(Self::gather_field(base.wrapping_add(f), offsets, mask, zero)))
            }
        }
    };
}

native_gather!(F64x4, I32x4, _mm_mullo_epi32, _mm_set1_epi32, _mm256_setzero_pd);
native_gather!(F32x8, I32x8, _mm256_mullo_epi32, _mm256_set1_epi32, _mm256_setzero_ps);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simd::{Emulated, Fast, IndexLanes, MaskLanes};

    fn same_lanes<V: SimdVector, E: SimdVector<Scalar = V::Scalar>>(v: V, e: E, what: &str) {
        for l in 0..V::LANES {
            let (a, b) = (v.lane(l).to_f64(), e.lane(l).to_f64());
            assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()), "{what} lane {l}: {a} vs {b}");
        }
    }

    #[test]
    fn f64_lanes_match_fast_emulation() {
        let xs = [-3.7, 0.25, 1.9, 7.5];
        let ys = [2.0, -0.5, 1.9, 0.3];
        let (v, w) = (F64x4::from_slice(&xs), F64x4::from_slice(&ys));
        let (e, f) = (Emulated::<f64, 4, Fast>::from_slice(&xs), Emulated::<f64, 4, Fast>::from_slice(&ys));
        same_lanes(v * w + v / w - -w, e * f + e / f - -f, "arith");
        same_lanes(v.mul_add(w, v), e.mul_add(f, e), "fma");
        same_lanes(v.abs().sqrt(), e.abs().sqrt(), "sqrt");
        same_lanes(v.exp(), e.exp(), "exp");
        same_lanes(v.sin(), e.sin(), "sin");
        same_lanes(v.cos(), e.cos(), "cos");
        same_lanes(v.abs().powf(w), e.abs().powf(f), "powf");
        let (sv, cv) = v.sin_cos();
        same_lanes(sv, e.sin(), "sin_cos");
        same_lanes(cv, e.cos(), "sin_cos");
        let m = v.lanes_lt(w);
        assert_eq!((0..4).map(|l| m.test(l)).collect::<Vec<_>>(), [true, false, false, false]);
        assert_eq!(v.lanes_le(w).count(), 2);
        assert!((!v.lanes_eq(v)).none() && v.lanes_eq(v).all());
        same_lanes(F64x4::select(m, v, w), Emulated::<f64, 4, Fast>::select(e.lanes_lt(f), e, f), "select");
        assert_eq!(v.reduce_sum().to_bits(), e.reduce_sum().to_bits());
    }

    /// Random and special arguments through both lane types, bit for bit.
    #[test]
    fn transcendentals_match_fast_emulation_bitwise() {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let special = [
            0.0,
            -0.0,
            1.0,
            0.5,
            1e-310,
            -1e-310,
            700.0,
            709.9,
            -745.2,
            -740.0,
            1e5,
            -1.2e5,
            1e300,
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::NAN,
            f64::MIN_POSITIVE,
            2.5,
            -3.0,
            7.0 * std::f64::consts::FRAC_PI_4,
        ];
        let mut xs: Vec<f64> = special.to_vec();
        for _ in 0..4000 {
            let scale = [1e-3, 1.0, 10.0, 300.0][rng.random_range(0..4usize)];
            xs.push(rng.random_range(-scale..scale));
        }
        let ys: Vec<f64> = xs.iter().rev().copied().collect();
        for (x, y) in xs.chunks_exact(8).zip(ys.chunks_exact(8)) {
            for (h, (x, y)) in x.chunks_exact(4).zip(y.chunks_exact(4)).enumerate() {
                let (v, w) = (F64x4::from_slice(x), F64x4::from_slice(y));
                let (e, f) = (Emulated::<f64, 4, Fast>::from_slice(x), Emulated::<f64, 4, Fast>::from_slice(y));
                same_lanes(v.exp(), e.exp(), &format!("exp {x:?} {h}"));
                same_lanes(v.sin(), e.sin(), &format!("sin {x:?}"));
                same_lanes(v.cos(), e.cos(), &format!("cos {x:?}"));
                same_lanes(v.abs().powf(w), e.abs().powf(f), &format!("pow {x:?} {y:?}"));
                same_lanes(v.powf(w), e.powf(f), &format!("signed pow {x:?} {y:?}"));
            }
            let x32: Vec<f32> = x.iter().map(|&a| a as f32).collect();
            let y32: Vec<f32> = y.iter().map(|&a| a as f32).collect();
            let (v, w) = (F32x8::from_slice(&x32), F32x8::from_slice(&y32));
            let (e, f) = (Emulated::<f32, 8, Fast>::from_slice(&x32), Emulated::<f32, 8, Fast>::from_slice(&y32));
            same_lanes(v.exp(), e.exp(), "exp f32");
            let (sv, cv) = v.sin_cos();
            same_lanes(sv, e.sin(), "sin f32");
            same_lanes(cv, e.cos(), "cos f32");
            same_lanes(v.abs().powf(w), e.abs().powf(f), "pow f32");
        }
    }

    #[test]
    fn gathers_read_active_lanes_only() {
        let base = [10.0, 11.0, 12.0, 13.0, 14.0];
        let idx = I32x4::from_fn(|l| [4, -1, 0, 2][l]);
        let mask = idx.lanes_lt(I32x4::splat(0));
        let g = F64x4::masked_gather(&base, idx, !mask, -7.0);
        assert_eq!(g.to_array(), [14.0, -7.0, 10.0, 12.0]);

        let records: Vec<[f32; 3]> = (0..9).map(|r| [r as f32, 100.0 + r as f32, -(r as f32)]).collect();
        let idx = I32x8::from_fn(|l| [8, 0, -1, 3, 3, 7, -1, 1][l]);
        let active = !idx.lanes_lt(I32x8::splat(0));
        let got = F32x8::gather_transpose(&records, idx, active);
        let want = Emulated::<f32, 8, Fast>::gather_transpose(
            &records,
            IndexLanes(std::array::from_fn(|l| idx.lane(l))),
            MaskLanes(std::array::from_fn(|l| active.test(l))),
        );
        for f in 0..3 {
            same_lanes(got[f], want[f], "transpose");
        }
    }

    #[test]
    #[should_panic(expected = "index -2 out of bounds")]
    fn gathers_reject_negative_active_lanes() {
        let base = [1.0f32; 9];
        F32x8::masked_gather(&base, I32x8::from_fn(|l| if l == 5 { -2 } else { l as i32 }), M32x8::splat(true), 0.0);
    }

    #[test]
    #[should_panic(expected = "out of bounds")]
    fn gathers_check_bounds() {
        let base = [1.0; 3];
        F64x4::masked_gather(&base, I32x4::from_fn(|l| l as i32), M64x4::splat(true), 0.0);
    }

    #[test]
    fn index_lanes() {
        let a = I32x8::from_fn(|l| l as i32 - 2);
        assert_eq!(a.mul_scalar(3).lane(7), 15);
        assert_eq!((a + I32x8::splat(1)).lane(0), -1);
        assert_eq!(a.lanes_eq(I32x8::splat(0)).count(), 1);
        assert_eq!(a.max_active(a.lanes_lt(I32x8::splat(3))), 2);
        let b = I32x4::from_slice(&[5, 6, 7, 8]);
        assert_eq!(b.lanes_lt(I32x4::splat(7)).count(), 2);
    }
}
