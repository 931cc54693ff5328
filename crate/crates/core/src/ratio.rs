//! Exact rational helpers on top of `num-rational`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use num_rational::BigRational as Rational;

pub fn frac(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn big(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

/// `2^e` for any signed exponent.
pub fn pow2(e: i64) -> BigRational {
    let p = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

pub fn powi(x: &BigRational, e: u64) -> BigRational {
    let mut acc = BigRational::one();
    let mut base = x.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    acc
}

pub fn min(a: &BigRational, b: &BigRational) -> BigRational {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn to_f64(x: &BigRational) -> f64 {
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(n), Some(d)) if d.is_finite() && n.is_finite() => n / d,
        _ => {
            // shift both sides down until they fit
            let shift = x.denom().bits().max(x.numer().abs().bits()).saturating_sub(1000);
            let n = (x.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (x.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// Renders as `num/den`, always with an explicit denominator.
pub fn render(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn is_nonnegative(x: &BigRational) -> bool {
    !x.is_negative()
}

pub fn zero() -> BigRational {
    BigRational::zero()
}
