//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`
//! carrying roughly 106 bits of significand.
//!
//! Only what the oracle needs is implemented. All transcendental functions are
//! accurate to a few units in 1e-30 relative over the ranges the potential uses.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const LN2: Dd = Dd { hi: std::f64::consts::LN_2, lo: 2.319046813846299558e-17 };
const FRAC_PI_2: Dd = Dd { hi: std::f64::consts::FRAC_PI_2, lo: 6.123233995736766036e-17 };
pub const PI: Dd = Dd { hi: std::f64::consts::PI, lo: 1.224646799147353207e-16 };

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub const fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn from_parts(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    /// Multiplication by an exact power of two.
    fn ldexp(self, k: i32) -> Self {
        let s = 2f64.powi(k);
        Dd { hi: self.hi * s, lo: self.lo * s }
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let x = Dd::new(self.hi.sqrt());
        x + (self - x * x) / (x + x)
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Dd::new(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        let r = self - LN2 * Dd::new(k);
        // Taylor series on |r| <= ln2/2; 28 terms reach below 1e-34.
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for n in 1..=28 {
            term = term * r / Dd::new(n as f64);
            sum = sum + term;
        }
        // Split the scaling so subnormal-adjacent results stay representable.
        let k = k as i32;
        let half = k / 2;
        sum.ldexp(half).ldexp(k - half)
    }

    pub fn ln(self) -> Self {
        assert!(self.hi > 0.0, "ln of non-positive value");
        let mut y = Dd::new(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Dd::ONE;
        }
        y
    }

    pub fn powf(self, e: Dd) -> Self {
        if self.hi == 0.0 {
            return if e.hi > 0.0 { Dd::ZERO } else { Dd::new(f64::INFINITY) };
        }
        (e * self.ln()).exp()
    }

    fn sin_cos_reduced(r: Dd) -> (Dd, Dd) {
        let r2 = r * r;
        let mut s = Dd::ZERO;
        let mut c = Dd::ZERO;
        // sin: r - r^3/3! + ...; cos: 1 - r^2/2! + ...
        let mut ts = r;
        let mut tc = Dd::ONE;
        for n in 0..30 {
            s = s + ts;
            c = c + tc;
            let a = (2 * n + 2) as f64;
            let b = (2 * n + 3) as f64;
            ts = -(ts * r2 / Dd::new(a * b));
            tc = -(tc * r2 / Dd::new((a - 1.0) * a));
        }
        (s, c)
    }

    pub fn sin_cos(self) -> (Dd, Dd) {
        let k = (self.hi / FRAC_PI_2.hi).round();
        let r = self - FRAC_PI_2 * Dd::new(k);
        let (s, c) = Self::sin_cos_reduced(r);
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    pub fn sin(self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(self) -> Self {
        self.sin_cos().1
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::new(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * Dd::new(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Dd::new(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

#[cfg(test)]
#[allow(clippy::approx_constant)] // frozen reference values
mod tests {
    use super::*;

    // Reference values from a 50-digit evaluation, stored as (hi, lo) pairs.
    fn rel_err(got: Dd, want: (f64, f64)) -> f64 {
        let want = Dd::from_parts(want.0, want.1);
        ((got - want) / want).abs().to_f64()
    }

    const TOL: f64 = 1e-29;

    #[test]
    fn exp_matches_reference() {
        let cases = [
            (-30.25, (7.287724095819692e-14, 2.3339070041631973e-30)),
            (-5.123456789, (0.005955400708607499, 2.519312190775905e-19)),
            (-0.3, (0.7408182206817179, -1.805530505953e-18)),
            (1e-09, (1.000000001, -8.224037093664211e-17)),
            (0.7, (2.0137527074704766, -2.0058243549764793e-16)),
            (2.5, (12.182493960703473, 2.0334002173348147e-16)),
            (11.0, (59874.14171519782, 1.7895764888916994e-12)),
            (80.125, (6.278347683902937e+34, -1.1285620318388203e+17)),
        ];
        for (x, want) in cases {
            let e = rel_err(Dd::new(x).exp(), want);
            assert!(e < TOL, "exp({x}) rel err {e:e}");
        }
    }

    #[test]
    fn ln_matches_reference() {
        let cases = [
            (1e-06, (-13.815510557964274, -5.191549935450145e-16)),
            (0.25, (-1.3862943611198906, -4.638093627692599e-17)),
            (0.9999, (-0.00010000500033334732, 4.110491732511812e-21)),
            (1.7, (0.5306282510621704, -5.076541175216476e-18)),
            (3.3, (1.1939224684724346, -5.282476628744736e-17)),
            (1234.5, (7.118421308785234, -1.865350488379875e-16)),
        ];
        // Near x = 1 the result is small and the bound is absolute.
        for (x, want) in cases {
            let e = rel_err(Dd::new(x).ln(), want) * want.0.abs().min(1.0);
            assert!(e < TOL, "ln({x}) err {e:e}");
        }
    }

    #[test]
    fn sin_cos_match_reference() {
        let cases = [
            (-7.5, (-0.9379999767747389, 3.928541021503273e-17), (0.3466353178350258, -1.3646025848672254e-17)),
            (-1.5, (-0.9974949866040544, 1.4558643538840918e-17), (0.0707372016677029, 3.683512075225569e-18)),
            (0.1, (0.09983341664682815, 3.08001512929492e-18), (0.9950041652780258, -5.50210156918377e-17)),
            (0.7853981, (0.7071067363577804, 5.5291687018012506e-17), (0.7071068260153117, 3.6081947293983725e-18)),
            (1.3, (0.963558185417193, 1.8247650480909386e-17), (0.26749882862458735, 1.6094564897898917e-17)),
            (2.9, (0.23924932921398243, -1.1267666643498124e-17), (-0.9709581651495905, 4.579633153232696e-17)),
            (20.0, (0.9129452507276277, -1.1889007125365703e-17), (0.40808206181339196, 2.5226139669269e-17)),
        ];
        for (x, s, c) in cases {
            let (gs, gc) = Dd::new(x).sin_cos();
            assert!(rel_err(gs, s) < TOL, "sin({x})");
            assert!(rel_err(gc, c) < TOL, "cos({x})");
        }
    }

    #[test]
    fn pow_and_sqrt_match_reference() {
        let cases = [
            (1.7, -0.6875, (0.6943306974990497, 7.872535943491126e-18)),
            (3.3, 0.72751, (2.3835489561045944, -2.154175480983065e-16)),
            (0.001, 0.5, (0.03162277660168379, 2.3070395267954534e-18)),
            (2e-07, 0.78734, (5.316587388942158e-06, 2.367423404334599e-22)),
        ];
        for (x, y, want) in cases {
            let e = rel_err(Dd::new(x).powf(Dd::new(y)), want);
            assert!(e < TOL, "pow({x},{y}) rel err {e:e}");
        }
        let cases = [
            (2.0, (1.4142135623730951, -9.667293313452913e-17)),
            (0.3, (0.5477225575051661, 2.890126723719787e-17)),
            (10000000000.0, (100000.0, 0.0)),
        ];
        for (x, want) in cases {
            assert!(rel_err(Dd::new(x).sqrt(), want) < TOL, "sqrt({x})");
        }
    }

    #[test]
    fn arithmetic_recovers_lost_bits() {
        let a = Dd::new(1.0) + Dd::new(1e-20);
        assert_eq!(a.hi, 1.0);
        assert_eq!(a.lo, 1e-20);
        let third = Dd::ONE / Dd::new(3.0);
        let back = third * Dd::new(3.0);
        assert!((back - Dd::ONE).abs().to_f64() < 1e-31);
    }
}
