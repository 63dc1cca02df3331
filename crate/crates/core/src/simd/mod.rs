//! Width-oblivious lane abstraction.
//!
//! Kernels are written against [`SimdVector`] and never name a width. A
//! backend is a concrete type implementing the trait:
//!
//! * `f64` / `f32`: the scalar backend, one lane.
//! * [`Emulated<T, W, M>`]: any width `W` built on plain arrays, with either
//!   [`Fast`] polynomial transcendentals or [`Strict`] ones that call the
//!   standard library per lane. Strict emulation at `W = 1` performs exactly
//!   the same floating point operations as the scalar backend.
//! * `native` (feature-gated): AVX2 registers.
//!
//! Index lanes are `i32`; a negative index marks a padding lane which must
//! always be masked off. Memory is never read or written through an inactive
//! lane.

mod emulated;
pub mod fastmath;
#[cfg(all(feature = "native", target_arch = "x86_64", target_feature = "avx2", target_feature = "fma"))]
pub mod native;
mod scalar;

use std::fmt::{self, Debug, Display};
use std::ops::{Add, AddAssign, BitAnd, BitOr, Div, Mul, MulAssign, Neg, Not, Sub, SubAssign};

pub use emulated::{Emulated, Fast, IndexLanes, MaskLanes, MathMode, Strict};

/// Whether the native backend was compiled into this build.
pub const NATIVE_AVAILABLE: bool =
    cfg!(all(feature = "native", target_arch = "x86_64", target_feature = "avx2", target_feature = "fma"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Precision {
    Single,
    Double,
}

impl Precision {
    pub fn name(self) -> &'static str {
        match self {
            Precision::Single => "single",
            Precision::Double => "double",
        }
    }
}

impl std::str::FromStr for Precision {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "single" => Ok(Precision::Single),
            "double" => Ok(Precision::Double),
            _ => Err(crate::Error::Config(format!("unknown precision '{s}' (single, double)"))),
        }
    }
}

impl Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Identifies a concrete lane type at runtime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BackendDescriptor {
    pub name: &'static str,
    pub width: usize,
    pub precision: Precision,
}

/// Element type of a lane vector.
pub trait Scalar:
    num_traits::Float + Default + Debug + Display + Send + Sync + AddAssign + SubAssign + MulAssign + 'static
{
    const PRECISION: Precision;
    /// Dekker splitting constant, `2^ceil(p/2) + 1` for a `p`-bit mantissa.
    const SPLIT: f64;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;

    fn fast_exp(self) -> Self;
    fn fast_sin(self) -> Self;
    fn fast_cos(self) -> Self;
    fn fast_pow(self, e: Self) -> Self;

    // Standard library transcendentals behind a call boundary. LLVM merges
    // an inlined sin/cos pair into `sincos`, which may round differently;
    // the scalar and strict backends both go through these to stay identical.
    fn std_exp(self) -> Self;
    fn std_sin(self) -> Self;
    fn std_cos(self) -> Self;
}

impl Scalar for f64 {
    const PRECISION: Precision = Precision::Double;
    const SPLIT: f64 = 134_217_729.0;

    #[inline(always)]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline(always)]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline(always)]
    fn fast_exp(self) -> Self {
        fastmath::exp(self)
    }
    #[inline(always)]
    fn fast_sin(self) -> Self {
        fastmath::sin(self)
    }
    #[inline(always)]
    fn fast_cos(self) -> Self {
        fastmath::cos(self)
    }
    #[inline(always)]
    fn fast_pow(self, e: Self) -> Self {
        fastmath::pow(self, e)
    }
    #[inline(never)]
    fn std_exp(self) -> Self {
        self.exp()
    }
    #[inline(never)]
    fn std_sin(self) -> Self {
        self.sin()
    }
    #[inline(never)]
    fn std_cos(self) -> Self {
        self.cos()
    }
}

impl Scalar for f32 {
    const PRECISION: Precision = Precision::Single;
    const SPLIT: f64 = 4_097.0;

    #[inline(always)]
    fn from_f64(x: f64) -> Self {
        x as f32
    }
    #[inline(always)]
    fn to_f64(self) -> f64 {
        self as f64
    }
    #[inline(always)]
    fn fast_exp(self) -> Self {
        fastmath::exp(self as f64) as f32
    }
    #[inline(always)]
    fn fast_sin(self) -> Self {
        fastmath::sin(self as f64) as f32
    }
    #[inline(always)]
    fn fast_cos(self) -> Self {
        fastmath::cos(self as f64) as f32
    }
    #[inline(always)]
    fn fast_pow(self, e: Self) -> Self {
        fastmath::pow(self as f64, e as f64) as f32
    }
    #[inline(never)]
    fn std_exp(self) -> Self {
        self.exp()
    }
    #[inline(never)]
    fn std_sin(self) -> Self {
        self.sin()
    }
    #[inline(never)]
    fn std_cos(self) -> Self {
        self.cos()
    }
}

/// Per-lane predicate.
pub trait SimdMask:
    Copy + Debug + PartialEq + Send + Sync + BitAnd<Output = Self> + BitOr<Output = Self> + Not<Output = Self>
{
    const LANES: usize;

    fn splat(b: bool) -> Self;
    fn from_fn(f: impl FnMut(usize) -> bool) -> Self;
    fn test(self, lane: usize) -> bool;

    fn any(self) -> bool {
        (0..Self::LANES).any(|l| self.test(l))
    }
    fn all(self) -> bool {
        (0..Self::LANES).all(|l| self.test(l))
    }
    fn none(self) -> bool {
        !self.any()
    }
    fn count(self) -> usize {
        (0..Self::LANES).filter(|&l| self.test(l)).count()
    }
}

/// Integer lanes used for atom, pair and parameter indices.
pub trait SimdIndex: Copy + Debug + PartialEq + Send + Sync + Add<Output = Self> {
    type Mask: SimdMask;
    const LANES: usize;

    fn splat(i: i32) -> Self;
    fn from_fn(f: impl FnMut(usize) -> i32) -> Self;
    fn lane(self, l: usize) -> i32;

    /// Loads `LANES` consecutive values; `s` must be at least that long.
    fn from_slice(s: &[i32]) -> Self {
        Self::from_fn(|l| s[l])
    }

    fn mul_scalar(self, k: i32) -> Self {
        Self::from_fn(|l| self.lane(l) * k)
    }

    fn lanes_eq(self, o: Self) -> Self::Mask {
        Self::Mask::from_fn(|l| self.lane(l) == o.lane(l))
    }

    fn lanes_lt(self, o: Self) -> Self::Mask {
        Self::Mask::from_fn(|l| self.lane(l) < o.lane(l))
    }

    /// Largest value over active lanes, or `i32::MIN` when none is active.
    fn max_active(self, mask: Self::Mask) -> i32 {
        (0..Self::LANES).filter(|&l| mask.test(l)).map(|l| self.lane(l)).max().unwrap_or(i32::MIN)
    }

    fn masked_gather(base: &[i32], idx: Self, mask: Self::Mask, fill: i32) -> Self {
        Self::from_fn(|l| if mask.test(l) { base[idx.lane(l) as usize] } else { fill })
    }
}

/// Real-valued lanes.
///
/// Arithmetic is IEEE per lane. `exp`, `sin` and `cos` are within 4 ulp of
/// the standard library and bit-identical to it for the scalar and strict
/// backends, as is `powf`; the fast backends compute `powf` as
/// `exp(y ln x)`. `sqrt` is always correctly rounded.
pub trait SimdVector:
    Copy
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    type Scalar: Scalar;
    type Mask: SimdMask;
    type Index: SimdIndex<Mask = Self::Mask>;
    const LANES: usize;

    fn descriptor() -> BackendDescriptor;

    fn splat(x: Self::Scalar) -> Self;
    fn from_fn(f: impl FnMut(usize) -> Self::Scalar) -> Self;
    fn lane(self, l: usize) -> Self::Scalar;

    #[inline(always)]
    fn constant(x: f64) -> Self {
        Self::splat(Self::Scalar::from_f64(x))
    }

    #[inline(always)]
    fn zero() -> Self {
        Self::constant(0.0)
    }

    fn from_slice(s: &[Self::Scalar]) -> Self {
        Self::from_fn(|l| s[l])
    }

    fn write_to(self, out: &mut [Self::Scalar]) {
        for (l, o) in out.iter_mut().enumerate().take(Self::LANES) {
            *o = self.lane(l);
        }
    }

    fn mul_add(self, a: Self, b: Self) -> Self;
    fn min(self, o: Self) -> Self;
    fn max(self, o: Self) -> Self;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn powf(self, e: Self) -> Self;

    #[inline(always)]
    fn sin_cos(self) -> (Self, Self) {
        (self.sin(), self.cos())
    }

    fn lanes_lt(self, o: Self) -> Self::Mask;
    fn lanes_le(self, o: Self) -> Self::Mask;
    fn lanes_eq(self, o: Self) -> Self::Mask;

    #[inline(always)]
    fn lanes_gt(self, o: Self) -> Self::Mask {
        o.lanes_lt(self)
    }
    #[inline(always)]
    fn lanes_ge(self, o: Self) -> Self::Mask {
        o.lanes_le(self)
    }

    /// `mask ? a : b` per lane.
    fn select(mask: Self::Mask, a: Self, b: Self) -> Self;

    /// Sum of all lanes, added in ascending lane order starting from zero.
    fn reduce_sum(self) -> Self::Scalar {
        let mut s = <Self::Scalar as num_traits::Zero>::zero();
        for l in 0..Self::LANES {
            s += self.lane(l);
        }
        s
    }

    /// Active lanes load `base[idx]`, inactive lanes hold `fill`.
    ///
    /// An out-of-bounds active index panics.
    fn masked_gather(base: &[Self::Scalar], idx: Self::Index, mask: Self::Mask, fill: Self::Scalar) -> Self {
        Self::from_fn(|l| if mask.test(l) { base[idx.lane(l) as usize] } else { fill })
    }

    /// Gathers `K`-field records and transposes them: output `f` holds field
    /// `f` of record `idx[l]` in lane `l`. Inactive lanes are zero.
    fn gather_transpose<const K: usize>(
        records: &[[Self::Scalar; K]],
        idx: Self::Index,
        mask: Self::Mask,
    ) -> [Self; K] {
        let zero = <Self::Scalar as num_traits::Zero>::zero();
        std::array::from_fn(|f| Self::from_fn(|l| if mask.test(l) { records[idx.lane(l) as usize][f] } else { zero }))
    }

    /// `dest[idx[l]] += vals[l]` for active lanes, one lane at a time in
    /// ascending order, so repeated indices accumulate every contribution.
    fn accumulate_scatter(dest: &mut [Self::Scalar], idx: Self::Index, vals: Self, mask: Self::Mask) {
        for l in 0..Self::LANES {
            if mask.test(l) {
                dest[idx.lane(l) as usize] += vals.lane(l);
            }
        }
    }

    /// Three-component form of [`accumulate_scatter`](Self::accumulate_scatter)
    /// for per-atom vectors. Lanes are serialized in ascending order.
    fn accumulate_scatter3(dest: &mut [[Self::Scalar; 3]], idx: Self::Index, vals: [Self; 3], mask: Self::Mask) {
        for l in 0..Self::LANES {
            if mask.test(l) {
                let d = &mut dest[idx.lane(l) as usize];
                d[0] += vals[0].lane(l);
                d[1] += vals[1].lane(l);
                d[2] += vals[2].lane(l);
            }
        }
    }
}

#[cfg(test)]
mod tests;
