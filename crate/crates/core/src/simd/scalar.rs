//! The one-lane backend: plain `f64`/`f32` with `bool` masks and `i32` indices.

use super::{BackendDescriptor, Scalar, SimdIndex, SimdMask, SimdVector};

impl SimdMask for bool {
    const LANES: usize = 1;

    #[inline(always)]
    fn splat(b: bool) -> Self {
        b
    }
    #[inline(always)]
    fn from_fn(mut f: impl FnMut(usize) -> bool) -> Self {
        f(0)
    }
    #[inline(always)]
    fn test(self, _lane: usize) -> bool {
        self
    }
    #[inline(always)]
    fn any(self) -> bool {
        self
    }
    #[inline(always)]
    fn all(self) -> bool {
        self
    }
}

impl SimdIndex for i32 {
    type Mask = bool;
    const LANES: usize = 1;

    #[inline(always)]
    fn splat(i: i32) -> Self {
        i
    }
    #[inline(always)]
    fn from_fn(mut f: impl FnMut(usize) -> i32) -> Self {
        f(0)
    }
    #[inline(always)]
    fn lane(self, _l: usize) -> i32 {
        self
    }
}

macro_rules! scalar_backend {
    ($t:ty) => {
        impl SimdVector for $t {
            type Scalar = $t;
            type Mask = bool;
            type Index = i32;
            const LANES: usize = 1;

            fn descriptor() -> BackendDescriptor {
                BackendDescriptor { name: "scalar", width: 1, precision: <$t as Scalar>::PRECISION }
            }

            #[inline(always)]
            fn splat(x: $t) -> Self {
                x
            }
            #[inline(always)]
            fn from_fn(mut f: impl FnMut(usize) -> $t) -> Self {
                f(0)
            }
            #[inline(always)]
            fn lane(self, _l: usize) -> $t {
                self
            }
            #[inline(always)]
            fn mul_add(self, a: Self, b: Self) -> Self {
                <$t>::mul_add(self, a, b)
            }
            #[inline(always)]
            fn min(self, o: Self) -> Self {
                <$t>::min(self, o)
            }
            #[inline(always)]
            fn max(self, o: Self) -> Self {
                <$t>::max(self, o)
            }
            #[inline(always)]
            fn abs(self) -> Self {
                <$t>::abs(self)
            }
            #[inline(always)]
            fn sqrt(self) -> Self {
                <$t>::sqrt(self)
            }
            #[inline(always)]
            fn exp(self) -> Self {
                Scalar::std_exp(self)
            }
            #[inline(always)]
            fn sin(self) -> Self {
                Scalar::std_sin(self)
            }
            #[inline(always)]
            fn cos(self) -> Self {
                Scalar::std_cos(self)
            }
            #[inline(always)]
            fn powf(self, e: Self) -> Self {
                <$t>::powf(self, e)
            }
            #[inline(always)]
            fn lanes_lt(self, o: Self) -> bool {
                self < o
            }
            #[inline(always)]
            fn lanes_le(self, o: Self) -> bool {
                self <= o
            }
            #[inline(always)]
            fn lanes_eq(self, o: Self) -> bool {
                self == o
            }
            #[inline(always)]
            fn select(mask: bool, a: Self, b: Self) -> Self {
                if mask {
                    a
                } else {
                    b
                }
            }
            #[inline(always)]
            fn reduce_sum(self) -> $t {
                0.0 + self
            }
        }
    };
}

scalar_backend!(f64);
scalar_backend!(f32);
