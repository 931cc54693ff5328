//! Gowers uniformity norms over F2 and the correlation relations built on
//! them. Every comparison is made on `raw = ||f||^(2^k)`, so all checks are
//! exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::boolfn::{translate_into, BooleanFunction};
use crate::error::{param, Error, Result};
use crate::f2::Budget;
use crate::flattest::{delta_of, derivative_sum, rej_gn_exact, ThmConstants};
use crate::ratio::{int, min as rmin, pow2, powi, to_f64};

#[derive(Clone, Debug, PartialEq)]
pub struct GowersValue {
    pub k: usize,
    /// `E[(-1)^(derivative sum)]`, exact or the sample mean.
    pub raw: BigRational,
    /// `raw^(1/2^k)` in double precision.
    pub norm: f64,
    /// `None` for exact values.
    pub trials: Option<u64>,
    pub std_error: f64,
}

impl GowersValue {
    fn new(k: usize, raw: BigRational, trials: Option<u64>, std_error: f64) -> Self {
        let r = to_f64(&raw).max(0.0);
        let norm = r.powf(1.0 / (1u64 << k) as f64);
        GowersValue { k, raw, norm, trials, std_error }
    }

    pub fn is_exact(&self) -> bool {
        self.trials.is_none()
    }
}

/// Exact `U^k` raw value. Uses
/// `raw = E_{a_1..a_{k-1}} (E_x (-1)^{D_{a_1..a_{k-1}} f(x)})^2`,
/// which sums over `2^(n(k-1))` direction tuples.
pub fn gowers_exact(f: &BooleanFunction, k: usize) -> Result<GowersValue> {
    gowers_exact_within(f, k, &Budget::default())
}

pub fn gowers_exact_within(f: &BooleanFunction, k: usize, budget: &Budget) -> Result<GowersValue> {
    if k == 0 {
        return param("Gowers norms start at k = 1");
    }
    let n = f.n();
    let bits = n * (k - 1);
    if bits >= 64 || 1u64 << bits > budget.tuples {
        return Err(Error::Resource {
            what: "direction tuples",
            count: format!("2^{bits}"),
            limit: budget.tuples.to_string(),
            hint: "use gowers_sampled",
        });
    }
    let w = f.words().len();
    let mut levels = vec![0u64; w * k];
    levels[..w].copy_from_slice(f.words());
    let sum = bias_squares(&mut levels, 0, k - 1, n, w);
    let raw = BigRational::new(BigInt::from(sum), BigInt::one() << (n * (k + 1)));
    Ok(GowersValue::new(k, raw, None, 0.0))
}

fn bias_squares(levels: &mut [u64], depth: usize, k: usize, n: usize, w: usize) -> u128 {
    if depth == k {
        let ones: i128 = levels[depth * w..(depth + 1) * w].iter().map(|x| x.count_ones() as i128).sum();
        let bias = (1i128 << n) - 2 * ones;
        return (bias * bias) as u128;
    }
    let mut total = 0;
    for a in 0u64..(1 << n) {
        let (head, tail) = levels.split_at_mut((depth + 1) * w);
        let prev = &head[depth * w..];
        let cur = &mut tail[..w];
        translate_into(prev, a, n, cur);
        for (c, p) in cur.iter_mut().zip(prev) {
            *c ^= p;
        }
        total += bias_squares(levels, depth + 1, k, n, w);
    }
    total
}

/// Sample mean of `(-1)^(derivative sum)` over seeded `(x0, a_1..a_k)`.
pub fn gowers_sampled<R: Rng + ?Sized>(f: &BooleanFunction, k: usize, trials: u64, rng: &mut R) -> Result<GowersValue> {
    if k == 0 {
        return param("Gowers norms start at k = 1");
    }
    if trials == 0 {
        return param("trials must be positive");
    }
    let mask = f.num_points() - 1;
    let mut dirs = vec![0u64; k];
    let mut rejects = 0u64;
    for _ in 0..trials {
        let x0 = rng.gen::<u64>() & mask;
        for a in dirs.iter_mut() {
            *a = rng.gen::<u64>() & mask;
        }
        if derivative_sum(f, x0, &dirs) {
            rejects += 1;
        }
    }
    let raw = BigRational::new(BigInt::from(trials as i128 - 2 * rejects as i128), BigInt::from(trials));
    // each sample is +-1, so the variance is 1 - mean^2
    let m = to_f64(&raw);
    let se = ((1.0 - m * m).max(0.0) / trials as f64).sqrt();
    Ok(GowersValue::new(k, raw, Some(trials), se))
}

fn corr(delta: &BigRational) -> BigRational {
    BigRational::one() - int(2) * delta
}

/// `(1 - 2 delta)^m <= raw`, trivially true when `1 - 2 delta < 0`.
fn corr_power_below(delta: &BigRational, m: u64, raw: &BigRational) -> bool {
    let c = corr(delta);
    c < BigRational::zero() || powi(&c, m) <= *raw
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationReport {
    pub delta: BigRational,
    /// Raw `U^(d+1)`, i.e. `1 - 2 Rej0_d`.
    pub raw: BigRational,
    /// `(1 - 2 delta)^(2^d) <= raw`.
    pub stated: bool,
    /// `(1 - 2 delta)^(2^(d+1)) <= raw`, the form `1 - 2 delta <= ||f||_{U^(d+1)}`.
    pub norm_form: bool,
}

/// Correlation with degree-`d` polynomials against the `U^(d+1)` norm, in
/// two forms. With exponent `1/2^d` the inequality fails already for a
/// single point on three variables (`9/16 > 11/32`); with the norm itself,
/// exponent `1/2^(d+1)`, it holds.
pub fn check_correlation_bound(f: &BooleanFunction, d: usize) -> Result<CorrelationReport> {
    let delta = delta_of(f, d)?;
    let raw = gowers_exact(f, d + 1)?.raw;
    Ok(CorrelationReport {
        stated: corr_power_below(&delta, 1 << d, &raw),
        norm_form: corr_power_below(&delta, 1 << (d + 1), &raw),
        delta,
        raw,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TightGowersReport {
    pub applicable: bool,
    pub delta: BigRational,
    pub raw: BigRational,
    /// `Rej(T_GN(d+1))`.
    pub rho: BigRational,
    /// `delta >= (1 - ||f||) / 2`.
    pub lower: Option<bool>,
    /// `delta <= 4 rho / 2^d`.
    pub upper: Option<bool>,
}

/// Both directions of the near-codeword relation between `delta_d` and
/// `1 - ||f||_{U^(d+1)}`, checked when `||f|| >= 1 - eps/2^d`.
pub fn check_tightgowers(f: &BooleanFunction, d: usize, eps: &BigRational) -> Result<TightGowersReport> {
    let delta = delta_of(f, d)?;
    let rho = rej_gn_exact(f, d + 1)?.value();
    let raw = BigRational::one() - int(2) * &rho;
    let level = BigRational::one() - eps * pow2(-(d as i64));
    let m = 1u64 << (d + 1);
    let applicable = level <= BigRational::zero() || raw >= powi(&level, m);
    if !applicable {
        return Ok(TightGowersReport { applicable, delta, raw, rho, lower: None, upper: None });
    }
    let lower = corr_power_below(&delta, m, &raw);
    let upper = delta <= int(4) * &rho * pow2(-(d as i64));
    Ok(TightGowersReport { applicable, delta, raw, rho, lower: Some(lower), upper: Some(upper) })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowerReport {
    pub power_raw: BigRational,
    pub base_raw: BigRational,
    pub holds: bool,
}

/// `raw_{U^(d+1)}(f^{xor t}) = raw_{U^(d+1)}(f)^t`.
pub fn check_power_identity(f: &BooleanFunction, d: usize, t: usize) -> Result<PowerReport> {
    let p = f.xor_power(t)?;
    let power_raw = gowers_exact(&p, d + 1)?.raw;
    let base_raw = powi(&gowers_exact(f, d + 1)?.raw, t as u64);
    Ok(PowerReport { holds: power_raw == base_raw, power_raw, base_raw })
}

#[derive(Clone, Debug, PartialEq)]
pub struct XorReport {
    pub delta: BigRational,
    pub power_delta: BigRational,
    /// `q = 1 - 2 min{eps1/4, 2^(d-2) delta}`.
    pub q: BigRational,
    /// `(1 - q^(t/2^d)) / 2` as a float, for display.
    pub bound: f64,
    /// `(1 - 2 delta(f^t))^(2^d) <= q^t`, the claimed bound.
    pub holds: bool,
    /// The same with exponent `t/2^(d+1)`, which follows from the norm form.
    pub holds_norm_form: bool,
}

/// `delta_d(f^{xor t}) >= (1 - q^(t/2^d)) / 2`.
pub fn check_xor_theorem(f: &BooleanFunction, d: usize, t: usize, consts: &ThmConstants) -> Result<XorReport> {
    let delta = delta_of(f, d)?;
    let p = f.xor_power(t)?;
    let power_delta = delta_of(&p, d)?;
    let m = rmin(&(&consts.eps1 / int(4)), &(pow2(d as i64 - 2) * &delta));
    let q = BigRational::one() - int(2) * m;
    let qt = powi(&q, t as u64);
    let c = corr(&power_delta);
    let holds = c < BigRational::zero() || powi(&c, 1 << d) <= qt;
    let holds_norm_form = c < BigRational::zero() || powi(&c, 1 << (d + 1)) <= qt;
    let bound = (1.0 - to_f64(&q).powf(t as f64 / (1u64 << d) as f64)) / 2.0;
    Ok(XorReport { delta, power_delta, q, bound, holds, holds_norm_form })
}
