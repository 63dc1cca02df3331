//! Branch-light polynomial `exp`, `sin`, `cos`, `ln` and `pow` for `f64`.
//!
//! Argument reduction uses rounding and multiplications only and special
//! values are patched at the end, so the native backend can run the same
//! operation sequence on whole registers and get the same bits. `exp`, `sin`,
//! `cos` and `ln` are within 4 ulp of the standard library (in practice 1-2).
//! `pow` is `exp(y ln x)`, so its error grows with `|y ln x|`.

const LOG2_E: f64 = std::f64::consts::LOG2_E;
// ln 2 split so that k * LN2_HI is exact for |k| < 2^11.
const LN2_HI: f64 = 6.931_471_803_691_238_164_90e-01;
const LN2_LO: f64 = 1.908_214_929_270_587_700_02e-10;

const EXP_OVERFLOW: f64 = 709.782_712_893_384;
const EXP_UNDERFLOW: f64 = -745.133_219_101_941_1;

// 1/n!, n = 13 down to 2.
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

/// `2^d` for an integer-valued `d` in the normal exponent range.
#[inline(always)]
fn pow2(d: f64) -> f64 {
    f64::from_bits(((d as i64 + 1023) as u64) << 52)
}

#[inline(always)]
pub fn exp(x: f64) -> f64 {
    let k = (x * LOG2_E).round_ties_even().clamp(-1100.0, 1100.0);
    let r = (x - k * LN2_HI) - k * LN2_LO;
    let mut p = EXP_COEFFS[0];
    for &c in &EXP_COEFFS[1..] {
        p = p * r + c;
    }
    // e^r = 1 + r + r^2 * p
    let er = 1.0 + (r + r * r * p);
    // two factors so that subnormal results and 2^1024 stay reachable
    let half = (k * 0.5).trunc();
    let y = er * pow2(half) * pow2(k - half);
    if x > EXP_OVERFLOW {
        f64::INFINITY
    } else if x < EXP_UNDERFLOW {
        0.0
    } else {
        y
    }
}

const FRAC_2_PI: f64 = std::f64::consts::FRAC_2_PI;
// pi/2 in three pieces; the first two have trailing zero bits so that
// q * piece is exact for the quadrant counts below REDUCTION_LIMIT.
const PIO2_1: f64 = 1.570_796_326_734_125_614_17e+00;
const PIO2_2: f64 = 6.077_100_506_303_965_976_60e-11;
const PIO2_3: f64 = 2.022_266_248_711_166_455_80e-21;
const REDUCTION_LIMIT: f64 = 1.0e5;

// Taylor coefficients for sin(r)/r - 1 and cos(r) - 1 + r^2/2 on |r| <= pi/4.
const SIN_COEFFS: [f64; 9] = [
    -1.0 / 121_645_100_408_832_000.0, // 1/19!
    1.0 / 355_687_428_096_000.0,      // 1/17!
    -1.0 / 1_307_674_368_000.0,       // 1/15!
    1.0 / 6_227_020_800.0,            // 1/13!
    -1.0 / 39_916_800.0,              // 1/11!
    1.0 / 362_880.0,                  // 1/9!
    -1.0 / 5_040.0,                   // 1/7!
    1.0 / 120.0,                      // 1/5!
    1.0 / 6.0,                        // 1/3!
];
const COS_COEFFS: [f64; 9] = [
    1.0 / 2_432_902_008_176_640_000.0, // 1/20!
    -1.0 / 6_402_373_705_728_000.0,    // 1/18!
    1.0 / 20_922_789_888_000.0,        // 1/16!
    -1.0 / 87_178_291_200.0,           // 1/14!
    1.0 / 479_001_600.0,               // 1/12!
    -1.0 / 3_628_800.0,                // 1/10!
    1.0 / 40_320.0,                    // 1/8!
    -1.0 / 720.0,                      // 1/6!
    1.0 / 24.0,                        // 1/4!
];

#[inline(always)]
fn sin_kernel(r: f64) -> f64 {
    let r2 = r * r;
    let mut p = SIN_COEFFS[0];
    for &c in &SIN_COEFFS[1..8] {
        p = p * r2 + c;
    }
    // r - r^3/6 + r^5 * p
    r - (r * r2) * (SIN_COEFFS[8] - r2 * p)
}

#[inline(always)]
fn cos_kernel(r: f64) -> f64 {
    let r2 = r * r;
    let mut p = COS_COEFFS[0];
    for &c in &COS_COEFFS[1..] {
        p = p * r2 + c;
    }
    let hr2 = 0.5 * r2;
    let w = 1.0 - hr2;
    // Recover the rounding error of 1 - r^2/2 before adding the tail.
    w + (((1.0 - w) - hr2) + r2 * r2 * p)
}

#[inline(always)]
fn reduce(x: f64) -> (f64, i64) {
    let q = (x * FRAC_2_PI).round_ties_even();
    let r = ((x - q * PIO2_1) - q * PIO2_2) - q * PIO2_3;
    (r, if q.is_nan() { 0 } else { q as i64 })
}

#[inline(always)]
pub fn sin(x: f64) -> f64 {
    if x.abs() > REDUCTION_LIMIT {
        return x.sin();
    }
    let (r, q) = reduce(x);
    let s = sin_kernel(r);
    let c = cos_kernel(r);
    match q & 3 {
        0 => s,
        1 => c,
        2 => -s,
        _ => -c,
    }
}

#[inline(always)]
pub fn cos(x: f64) -> f64 {
    if x.abs() > REDUCTION_LIMIT {
        return x.cos();
    }
    let (r, q) = reduce(x);
    let s = sin_kernel(r);
    let c = cos_kernel(r);
    match q & 3 {
        0 => c,
        1 => -s,
        2 => -c,
        _ => s,
    }
}

const MANTISSA_BITS: u64 = (1 << 52) - 1;
const ONE_BITS: u64 = 0x3ff0_0000_0000_0000;
// log(1 + f) = f - f^2/2 + s (f^2/2 + R(s^2)), s = f / (2 + f)
const LOG_COEFFS: [f64; 7] = [
    6.666_666_666_666_735_130e-01,
    3.999_999_999_940_941_908e-01,
    2.857_142_874_366_239_149e-01,
    2.222_219_843_214_978_396e-01,
    1.818_357_216_161_805_012e-01,
    1.531_383_769_920_937_332e-01,
    1.479_819_860_511_658_591e-01,
];

/// `ln x` for positive, normal, finite `x`.
#[inline(always)]
pub(crate) fn ln_normal(x: f64) -> f64 {
    let bits = x.to_bits();
    let mut k = (bits >> 52) as f64 - 1023.0;
    let mut m = f64::from_bits((bits & MANTISSA_BITS) | ONE_BITS);
    if m > std::f64::consts::SQRT_2 {
        m *= 0.5;
        k += 1.0;
    }
    let f = m - 1.0;
    let s = f / (2.0 + f);
    let z = s * s;
    let w = z * z;
    let c = &LOG_COEFFS;
    let t1 = w * (c[1] + w * (c[3] + w * c[5]));
    let t2 = z * (c[0] + w * (c[2] + w * (c[4] + w * c[6])));
    let r = t2 + t1;
    let hfsq = 0.5 * f * f;
    k * LN2_HI - ((hfsq - (s * (hfsq + r) + k * LN2_LO)) - f)
}

/// Whether [`pow`] takes the polynomial path for these arguments.
#[inline(always)]
pub(crate) fn pow_is_regular(x: f64, y: f64) -> bool {
    (f64::MIN_POSITIVE..=f64::MAX).contains(&x) && y.abs() <= f64::MAX
}

#[inline(always)]
pub fn ln(x: f64) -> f64 {
    if (f64::MIN_POSITIVE..=f64::MAX).contains(&x) {
        ln_normal(x)
    } else {
        x.ln()
    }
}

/// `x^y`; zero, negative, subnormal and non-finite arguments go to the
/// standard library.
#[inline(always)]
pub fn pow(x: f64, y: f64) -> f64 {
    if pow_is_regular(x, y) {
        exp(y * ln_normal(x))
    } else {
        x.powf(y)
    }
}

/// Distance in units in the last place between two finite `f64`.
pub fn ulp_distance(a: f64, b: f64) -> u64 {
    fn ordered(x: f64) -> i64 {
        let i = x.to_bits() as i64;
        if i < 0 {
            i64::MIN - i
        } else {
            i
        }
    }
    if a == b {
        return 0;
    }
    ordered(a).abs_diff(ordered(b))
}

/// Single-precision counterpart of [`ulp_distance`].
pub fn ulp_distance_f32(a: f32, b: f32) -> u64 {
    fn ordered(x: f32) -> i64 {
        let i = x.to_bits() as i32;
        (if i < 0 { i32::MIN - i } else { i }) as i64
    }
    if a == b {
        return 0;
    }
    ordered(a).abs_diff(ordered(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn worst<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(f: F, g: G, lo: f64, hi: f64, n: usize) -> (u64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut out = (0, 0.0);
        for _ in 0..n {
            let x = rng.random_range(lo..hi);
            let d = ulp_distance(f(x), g(x));
            if d > out.0 {
                out = (d, x);
            }
        }
        out
    }

    #[test]
    fn exp_within_4_ulp() {
        for (lo, hi) in [(-700.0, 700.0), (-1.0, 1.0), (-1e-6, 1e-6), (-30.0, 5.0)] {
            let (d, x) = worst(exp, f64::exp, lo, hi, 200_000);
            assert!(d <= 4, "exp({x}) off by {d} ulp");
        }
    }

    #[test]
    fn exp_special_values() {
        assert_eq!(exp(0.0), 1.0);
        assert_eq!(exp(1000.0), f64::INFINITY);
        assert_eq!(exp(-1000.0), 0.0);
        assert!(exp(f64::NAN).is_nan());
        assert_eq!(exp(f64::NEG_INFINITY), 0.0);
        // subnormal results
        let x = -740.0;
        assert!(ulp_distance(exp(x), x.exp()) <= 4);
    }

    #[test]
    fn sin_cos_within_4_ulp() {
        for (lo, hi) in [(-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2), (-100.0, 100.0), (-1e-5, 1e-5)] {
            let (d, x) = worst(sin, f64::sin, lo, hi, 200_000);
            assert!(d <= 4, "sin({x}) off by {d} ulp");
            let (d, x) = worst(cos, f64::cos, lo, hi, 200_000);
            assert!(d <= 4, "cos({x}) off by {d} ulp");
        }
        assert_eq!(sin(0.0), 0.0);
        assert_eq!(cos(0.0), 1.0);
        assert!(sin(f64::NAN).is_nan());
        assert_eq!(sin(1e7), 1e7f64.sin());
    }

    #[test]
    fn ln_within_2_ulp() {
        for (lo, hi) in [(1e-300, 1e-290), (0.5, 2.0), (0.999, 1.001), (1.0, 1e300)] {
            let (d, x) = worst(ln, f64::ln, lo, hi, 200_000);
            assert!(d <= 2, "ln({x}) off by {d} ulp");
        }
        assert_eq!(ln(1.0), 0.0);
        assert_eq!(ln(0.0), f64::NEG_INFINITY);
        assert!(ln(-1.0).is_nan());
        assert_eq!(ln(f64::from_bits(3)), f64::from_bits(3).ln());
    }

    #[test]
    fn pow_tracks_the_exponent_magnitude() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200_000 {
            let x: f64 = rng.random_range(1e-12..1e3);
            let y: f64 = rng.random_range(-3.0..3.0);
            let want = x.powf(y);
            let rel = ((pow(x, y) - want) / want).abs();
            let scale = (y * x.ln()).abs().max(1.0);
            assert!(rel <= 4.0 * f64::EPSILON * scale, "pow({x}, {y}): rel {rel:e}");
        }
        assert_eq!(pow(1.0, 0.72), 1.0);
        assert_eq!(pow(2.5, 0.0), 1.0);
        assert_eq!(pow(0.0, 0.72), 0.0);
        assert_eq!(pow(0.0, -1.0), f64::INFINITY);
        assert!(pow(-2.0, 0.5).is_nan());
        assert_eq!(pow(2.0, 10.0), 1024.0);
    }

    #[test]
    fn ulp_distance_counts_representable_steps() {
        assert_eq!(ulp_distance(1.0, 1.0), 0);
        assert_eq!(ulp_distance(1.0, f64::from_bits(1.0f64.to_bits() + 3)), 3);
        assert_eq!(ulp_distance(-0.0, 0.0), 0);
        assert_eq!(ulp_distance(f64::from_bits(1), -f64::from_bits(1)), 2);
        assert_eq!(ulp_distance_f32(1.0, f32::from_bits(1.0f32.to_bits() + 2)), 2);
    }
}
