//! Arbitrary-width lanes on plain arrays.
//!
//! Every operation is a per-lane loop over `[T; W]`, which the optimizer is
//! free to turn into vector instructions. Results never depend on `W`: lane
//! `l` of any operation equals the scalar operation on lane `l`'s inputs.

use std::fmt::{self, Debug};
use std::marker::PhantomData;
use std::ops::{Add, AddAssign, BitAnd, BitOr, Div, Mul, MulAssign, Neg, Not, Sub, SubAssign};

use super::{BackendDescriptor, Scalar, SimdIndex, SimdMask, SimdVector};

/// Selects how transcendental functions are evaluated.
pub trait MathMode: Copy + Default + Debug + Send + Sync + 'static {
    const NAME: &'static str;
    fn exp<T: Scalar>(x: T) -> T;
    fn sin<T: Scalar>(x: T) -> T;
    fn cos<T: Scalar>(x: T) -> T;
    fn pow<T: Scalar>(x: T, e: T) -> T;
}

/// Branch-free polynomial approximations from [`fastmath`](super::fastmath).
#[derive(Clone, Copy, Debug, Default)]
pub struct Fast;

/// Standard library calls per lane; bit-identical to the scalar backend.
#[derive(Clone, Copy, Debug, Default)]
pub struct Strict;

impl MathMode for Fast {
    const NAME: &'static str = "emulated";
    #[inline(always)]
    fn exp<T: Scalar>(x: T) -> T {
        x.fast_exp()
    }
    #[inline(always)]
    fn sin<T: Scalar>(x: T) -> T {
        x.fast_sin()
    }
    #[inline(always)]
    fn cos<T: Scalar>(x: T) -> T {
        x.fast_cos()
    }
    #[inline(always)]
    fn pow<T: Scalar>(x: T, e: T) -> T {
        x.fast_pow(e)
    }
}

impl MathMode for Strict {
    const NAME: &'static str = "emulated-strict";
    #[inline(always)]
    fn exp<T: Scalar>(x: T) -> T {
        x.std_exp()
    }
    #[inline(always)]
    fn sin<T: Scalar>(x: T) -> T {
        x.std_sin()
    }
    #[inline(always)]
    fn cos<T: Scalar>(x: T) -> T {
        x.std_cos()
    }
    #[inline(always)]
    fn pow<T: Scalar>(x: T, e: T) -> T {
        x.powf(e)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub struct MaskLanes<const W: usize>(pub [bool; W]);

impl<const W: usize> Debug for MaskLanes<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("MaskLanes(")?;
        for b in self.0 {
            f.write_str(if b { "T" } else { "F" })?;
        }
        f.write_str(")")
    }
}

impl<const W: usize> BitAnd for MaskLanes<W> {
    type Output = Self;
    #[inline(always)]
    fn bitand(self, o: Self) -> Self {
        MaskLanes(std::array::from_fn(|l| self.0[l] & o.0[l]))
    }
}

impl<const W: usize> BitOr for MaskLanes<W> {
    type Output = Self;
    #[inline(always)]
    fn bitor(self, o: Self) -> Self {
        MaskLanes(std::array::from_fn(|l| self.0[l] | o.0[l]))
    }
}

impl<const W: usize> Not for MaskLanes<W> {
    type Output = Self;
    #[inline(always)]
    fn not(self) -> Self {
        MaskLanes(self.0.map(|b| !b))
    }
}

impl<const W: usize> SimdMask for MaskLanes<W> {
    const LANES: usize = W;

    #[inline(always)]
    fn splat(b: bool) -> Self {
        MaskLanes([b; W])
    }
    #[inline(always)]
    fn from_fn(f: impl FnMut(usize) -> bool) -> Self {
        MaskLanes(std::array::from_fn(f))
    }
    #[inline(always)]
    fn test(self, lane: usize) -> bool {
        self.0[lane]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexLanes<const W: usize>(pub [i32; W]);

impl<const W: usize> Add for IndexLanes<W> {
    type Output = Self;
    #[inline(always)]
    fn add(self, o: Self) -> Self {
        IndexLanes(std::array::from_fn(|l| self.0[l] + o.0[l]))
    }
}

impl<const W: usize> SimdIndex for IndexLanes<W> {
    type Mask = MaskLanes<W>;
    const LANES: usize = W;

    #[inline(always)]
    fn splat(i: i32) -> Self {
        IndexLanes([i; W])
    }
    #[inline(always)]
    fn from_fn(f: impl FnMut(usize) -> i32) -> Self {
        IndexLanes(std::array::from_fn(f))
    }
    #[inline(always)]
    fn lane(self, l: usize) -> i32 {
        self.0[l]
    }
}

/// `W` lanes of `T`, transcendentals evaluated according to `M`.
pub struct Emulated<T, const W: usize, M = Fast> {
    lanes: [T; W],
    mode: PhantomData<M>,
}

// Manual impls: derive would demand `M: Copy`.
impl<T: Copy, const W: usize, M> Clone for Emulated<T, W, M> {
    #[inline(always)]
    fn clone(&self) -> Self {
        *self
    }
}

impl<T: Copy, const W: usize, M> Copy for Emulated<T, W, M> {}

impl<T: Scalar, const W: usize, M> Emulated<T, W, M> {
    #[inline(always)]
    pub fn new(lanes: [T; W]) -> Self {
        Emulated { lanes, mode: PhantomData }
    }

    #[inline(always)]
    pub fn to_array(self) -> [T; W] {
        self.lanes
    }

    #[inline(always)]
    fn map(self, f: impl Fn(T) -> T) -> Self {
        Self::new(self.lanes.map(f))
    }

    #[inline(always)]
    fn zip(self, o: Self, f: impl Fn(T, T) -> T) -> Self {
        Self::new(std::array::from_fn(|l| f(self.lanes[l], o.lanes[l])))
    }
}

impl<T: Debug, const W: usize, M> Debug for Emulated<T, W, M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.lanes.iter()).finish()
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $atr:ident, $af:ident, $op:tt) => {
        impl<T: Scalar, const W: usize, M> $tr for Emulated<T, W, M> {
            type Output = Self;
            #[inline(always)]
            fn $f(self, o: Self) -> Self {
                self.zip(o, |a, b| a $op b)
            }
        }
        impl<T: Scalar, const W: usize, M> $atr for Emulated<T, W, M> {
            #[inline(always)]
            fn $af(&mut self, o: Self) {
                *self = self.zip(o, |a, b| a $op b);
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign, +);
binop!(Sub, sub, SubAssign, sub_assign, -);
binop!(Mul, mul, MulAssign, mul_assign, *);

impl<T: Scalar, const W: usize, M> Div for Emulated<T, W, M> {
    type Output = Self;
    #[inline(always)]
    fn div(self, o: Self) -> Self {
        self.zip(o, |a, b| a / b)
    }
}

impl<T: Scalar, const W: usize, M> Neg for Emulated<T, W, M> {
    type Output = Self;
    #[inline(always)]
    fn neg(self) -> Self {
        self.map(|a| -a)
    }
}

impl<T: Scalar, const W: usize, M: MathMode> SimdVector for Emulated<T, W, M> {
    type Scalar = T;
    type Mask = MaskLanes<W>;
    type Index = IndexLanes<W>;
    const LANES: usize = W;

    fn descriptor() -> BackendDescriptor {
        BackendDescriptor { name: M::NAME, width: W, precision: T::PRECISION }
    }

    #[inline(always)]
    fn splat(x: T) -> Self {
        Self::new([x; W])
    }
    #[inline(always)]
    fn from_fn(f: impl FnMut(usize) -> T) -> Self {
        Self::new(std::array::from_fn(f))
    }
    #[inline(always)]
    fn lane(self, l: usize) -> T {
        self.lanes[l]
    }
    #[inline(always)]
    fn mul_add(self, a: Self, b: Self) -> Self {
        Self::from_fn(|l| self.lanes[l].mul_add(a.lanes[l], b.lanes[l]))
    }
    #[inline(always)]
    fn min(self, o: Self) -> Self {
        self.zip(o, T::min)
    }
    #[inline(always)]
    fn max(self, o: Self) -> Self {
        self.zip(o, T::max)
    }
    #[inline(always)]
    fn abs(self) -> Self {
        self.map(T::abs)
    }
    #[inline(always)]
    fn sqrt(self) -> Self {
        self.map(T::sqrt)
    }
    #[inline(always)]
    fn exp(self) -> Self {
        self.map(M::exp)
    }
    #[inline(always)]
    fn sin(self) -> Self {
        self.map(M::sin)
    }
    #[inline(always)]
    fn cos(self) -> Self {
        self.map(M::cos)
    }
    #[inline(always)]
    fn powf(self, e: Self) -> Self {
        self.zip(e, M::pow)
    }
    #[inline(always)]
    fn lanes_lt(self, o: Self) -> MaskLanes<W> {
        MaskLanes(std::array::from_fn(|l| self.lanes[l] < o.lanes[l]))
    }
    #[inline(always)]
    fn lanes_le(self, o: Self) -> MaskLanes<W> {
        MaskLanes(std::array::from_fn(|l| self.lanes[l] <= o.lanes[l]))
    }
    #[inline(always)]
    fn lanes_eq(self, o: Self) -> MaskLanes<W> {
        MaskLanes(std::array::from_fn(|l| self.lanes[l] == o.lanes[l]))
    }
    #[inline(always)]
    fn select(mask: MaskLanes<W>, a: Self, b: Self) -> Self {
        Self::from_fn(|l| if mask.0[l] { a.lanes[l] } else { b.lanes[l] })
    }
}
