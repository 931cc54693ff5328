//! The symmetric polynomial `S_{d+1,n}` as a counterexample: its
//! `(d+1)`-flat rejections reduce to `det(M M^T)` over F2, so the rejection
//! rate tracks the full-rank probability of a random symmetric matrix.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;

use crate::boolfn::symmetric_value;
use crate::error::{param, Error, Result};
use crate::f2::{sample_full_rank, F2Mat, F2Vec, MAX_DIM};
use crate::ratio::{frac, pow2, to_f64};

/// A base point and `d+1` directions (the rows of `dirs`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GnInstance {
    pub x0: F2Vec,
    pub dirs: F2Mat,
}

impl GnInstance {
    pub fn new(x0: F2Vec, dirs: F2Mat) -> Result<Self> {
        if dirs.ncols() != x0.len() {
            return param("directions and base point live in different dimensions");
        }
        Ok(GnInstance { x0, dirs })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    MonteCarlo { trials: u64, seed: u64 },
}

/// Derivative sum of `S_{d+1,n}` over the instance, evaluated pointwise.
pub fn gn_rejects_symmetric(inst: &GnInstance, d: usize, n: usize) -> Result<bool> {
    if inst.dirs.nrows() != d + 1 || inst.dirs.ncols() != n {
        return param(format!("expected a {}x{n} direction matrix", d + 1));
    }
    let rows = inst.dirs.row_bits();
    let mut x = inst.x0.bits();
    let mut acc = symmetric_value(d + 1, x);
    for c in 1u64..(1 << (d + 1)) {
        x ^= rows[c.trailing_zeros() as usize];
        acc ^= symmetric_value(d + 1, x);
    }
    Ok(acc)
}

/// `M M^T` has full rank over F2.
pub fn rank_criterion(dirs: &F2Mat) -> bool {
    dirs.mul_transpose(dirs).rank() == dirs.nrows()
}

/// Permanent of a square matrix mod 2 by Ryser's formula. Over F2 the signs
/// vanish and each product over columns is one exactly when the selected
/// rows sum to the all-ones vector.
pub fn ryser_permanent_mod2(m: &F2Mat) -> bool {
    let k = m.nrows();
    assert_eq!(k, m.ncols(), "permanent of a non-square matrix");
    let full = crate::f2::low_mask(k);
    let rows = m.row_bits();
    let mut s = 0u64;
    let mut odd = false;
    for c in 1u64..(1 << k) {
        s ^= rows[c.trailing_zeros() as usize];
        if s == full {
            odd = !odd;
        }
    }
    odd
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CauchyBinet {
    /// `sum_{|I| = d+1} perm(M_I)` mod 2.
    pub permanent_sum: bool,
    /// `det(M M^T)` over F2.
    pub det: bool,
    /// Derivative sum of `S_{d+1,n}` along the rows of `M`.
    pub derivative_sum: bool,
}

impl CauchyBinet {
    pub fn agree(&self) -> bool {
        self.permanent_sum == self.det && self.det == self.derivative_sum
    }
}

/// Subsets of `[n]` with `k` elements, as masks in increasing order.
fn k_subsets(n: usize, k: usize) -> impl Iterator<Item = u64> {
    let end = if n >= 64 { u64::MAX } else { 1u64 << n };
    let mut cur = if k == 0 { 0 } else { (1u64 << k) - 1 };
    let mut done = k > n;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = cur;
        if cur == 0 {
            done = true;
        } else {
            // Gosper's hack
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let next = (((r ^ cur) >> 2) / c) | r;
            if next >= end || next < cur {
                done = true;
            }
            cur = next;
        }
        Some(out)
    })
}

fn columns(m: &F2Mat, cols: u64) -> F2Mat {
    let rows = m
        .row_bits()
        .iter()
        .map(|&r| {
            let mut out = 0u64;
            let mut bits = cols;
            let mut j = 0;
            while bits != 0 {
                let c = bits.trailing_zeros();
                out |= ((r >> c) & 1) << j;
                j += 1;
                bits &= bits - 1;
            }
            out
        })
        .collect();
    F2Mat::from_rows(rows, cols.count_ones() as usize)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

pub const SUBSET_BUDGET: u128 = 1 << 24;

/// The three quantities of the Cauchy-Binet argument for `M`, computed
/// independently.
pub fn cauchy_binet_parts(m: &F2Mat) -> Result<CauchyBinet> {
    let k = m.nrows();
    let n = m.ncols();
    if k == 0 || k > n {
        return param("need 1 <= rows <= columns");
    }
    let subsets = binomial(n, k);
    if subsets > SUBSET_BUDGET {
        return Err(Error::Resource {
            what: "column subsets",
            count: subsets.to_string(),
            limit: SUBSET_BUDGET.to_string(),
            hint: "use fewer columns",
        });
    }
    let permanent_sum = k_subsets(n, k).fold(false, |acc, cols| acc ^ ryser_permanent_mod2(&columns(m, cols)));
    let det = rank_criterion(m);
    let inst = GnInstance::new(F2Vec::zero(n), m.clone())?;
    let derivative_sum = gn_rejects_symmetric(&inst, k - 1, n)?;
    Ok(CauchyBinet { permanent_sum, det, derivative_sum })
}

pub fn cauchy_binet_check(m: &F2Mat) -> Result<bool> {
    Ok(cauchy_binet_parts(m)?.agree())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymRankStats {
    pub k: usize,
    pub full_rank_count: u64,
    pub total: u64,
    pub exact: bool,
}

impl SymRankStats {
    pub fn fraction(&self) -> BigRational {
        frac(self.full_rank_count, self.total)
    }
}

fn upper_positions(k: usize) -> Vec<(usize, usize)> {
    (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect()
}

/// The symmetric matrix whose upper triangle, read row by row, is the bits
/// of `code`.
pub fn symmetric_from_bits(k: usize, code: u64) -> F2Mat {
    let mut rows = vec![0u64; k];
    for (b, (i, j)) in upper_positions(k).into_iter().enumerate() {
        if (code >> b) & 1 == 1 {
            rows[i] |= 1 << j;
            rows[j] |= 1 << i;
        }
    }
    F2Mat::from_rows(rows, k)
}

fn symmetric_code(m: &F2Mat) -> u64 {
    upper_positions(m.nrows())
        .into_iter()
        .enumerate()
        .fold(0u64, |acc, (b, (i, j))| acc | ((m.get(i, j) as u64) << b))
}

pub const SYMMETRIC_BITS_BUDGET: usize = 32;

/// How often a uniform symmetric `k x k` matrix over F2 is invertible.
pub fn symmetric_rank_stats(k: usize, mode: Mode) -> Result<SymRankStats> {
    if k == 0 || k > MAX_DIM {
        return param("matrix size must be in 1..=64");
    }
    let bits = k * (k + 1) / 2;
    match mode {
        Mode::Exact => {
            if bits > SYMMETRIC_BITS_BUDGET {
                return Err(Error::Resource {
                    what: "symmetric matrices",
                    count: format!("2^{bits}"),
                    limit: format!("2^{SYMMETRIC_BITS_BUDGET}"),
                    hint: "use montecarlo mode",
                });
            }
            let total = 1u64 << bits;
            let full_rank_count = (0..total).filter(|&c| symmetric_from_bits(k, c).rank() == k).count() as u64;
            Ok(SymRankStats { k, full_rank_count, total, exact: true })
        }
        Mode::MonteCarlo { trials, seed } => {
            if trials == 0 {
                return param("trials must be positive");
            }
            let mut rng = crate::seeded_rng(seed);
            let mut full = 0;
            for _ in 0..trials {
                let mut rows = vec![0u64; k];
                for (i, j) in upper_positions(k) {
                    if rng.gen::<bool>() {
                        rows[i] |= 1 << j;
                        rows[j] |= 1 << i;
                    }
                }
                if F2Mat::from_rows(rows, k).rank() == k {
                    full += 1;
                }
            }
            Ok(SymRankStats { k, full_rank_count: full, total: trials, exact: false })
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TvDistance {
    pub d: usize,
    pub n: usize,
    /// Exact distance, or the plug-in estimate as a rational.
    pub value: BigRational,
    pub exact: bool,
    /// Full-rank matrices enumerated, or samples drawn.
    pub samples: u64,
}

impl TvDistance {
    /// `value / 2^(d-n)`.
    pub fn scaled(&self) -> f64 {
        to_f64(&(&self.value / pow2(self.d as i64 - self.n as i64)))
    }
}

pub const MMT_BITS_BUDGET: usize = 24;

/// Total variation distance between `M M^T` for uniform full-rank
/// `(d+1) x n` matrices `M` and a uniform symmetric matrix.
pub fn mmt_distribution_distance(d: usize, n: usize, mode: Mode) -> Result<TvDistance> {
    let k = d + 1;
    if k > n || n > MAX_DIM {
        return param("need d + 1 <= n <= 64");
    }
    let sym_bits = k * (k + 1) / 2;
    let mut counts: HashMap<u64, u64> = HashMap::new();
    let (samples, exact) = match mode {
        Mode::Exact => {
            if k * n > MMT_BITS_BUDGET {
                return Err(Error::Resource {
                    what: "direction matrices",
                    count: format!("2^{}", k * n),
                    limit: format!("2^{MMT_BITS_BUDGET}"),
                    hint: "use montecarlo mode",
                });
            }
            let mut total = 0u64;
            let mut rows = vec![0u64; k];
            enumerate_full_rank(&mut rows, 0, n, &mut |m: &[u64]| {
                let b = F2Mat::from_rows(m.to_vec(), n);
                *counts.entry(symmetric_code(&b.mul_transpose(&b))).or_default() += 1;
                total += 1;
            });
            (total, true)
        }
        Mode::MonteCarlo { trials, seed } => {
            if trials == 0 {
                return param("trials must be positive");
            }
            let mut rng = crate::seeded_rng(seed);
            for _ in 0..trials {
                let m = sample_full_rank(k, n, &mut rng);
                *counts.entry(symmetric_code(&m.mul_transpose(&m))).or_default() += 1;
            }
            (trials, false)
        }
    };
    // 1/2 sum |p(B) - 2^-s|, over observed codes plus the unobserved mass
    let uniform = pow2(-(sym_bits as i64));
    let mut total = BigRational::zero();
    for &c in counts.values() {
        total += (frac(c, samples) - &uniform).abs();
    }
    let unseen = (1u64 << sym_bits) - counts.len() as u64;
    total += BigRational::from_integer(BigInt::from(unseen)) * &uniform;
    Ok(TvDistance { d, n, value: total / BigRational::from_integer(BigInt::from(2)), exact, samples })
}

/// Visits every sequence of linearly independent rows.
fn enumerate_full_rank(rows: &mut Vec<u64>, depth: usize, n: usize, visit: &mut dyn FnMut(&[u64])) {
    if depth == rows.len() {
        visit(rows);
        return;
    }
    for v in 1u64..(1 << n) {
        rows[depth] = v;
        if F2Mat::from_rows(rows[..=depth].to_vec(), n).rank() == depth + 1 {
            enumerate_full_rank(rows, depth + 1, n, visit);
        }
    }
}

/// Exact distances for each `n` in `ns` and the smallest `C` with
/// `TV(n) <= C 2^(d-n)` over them; a measurement of the hidden constant.
pub fn fit_tv_constant(d: usize, ns: impl IntoIterator<Item = usize>) -> Result<(Vec<TvDistance>, f64)> {
    let rows: Vec<TvDistance> = ns
        .into_iter()
        .map(|n| mmt_distribution_distance(d, n, Mode::Exact))
        .collect::<Result<_>>()?;
    let c = rows.iter().map(|r| r.scaled()).fold(0.0, f64::max);
    Ok((rows, c))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CounterexReport {
    pub d: usize,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub rejections: u64,
    pub estimate: f64,
    pub std_error: f64,
    /// `1/2 - 2^-7`.
    pub bound: BigRational,
    /// Samples also evaluated by the direct derivative sum.
    pub cross_checked: u64,
    pub mismatches: u64,
    /// `d < 3`, outside the range the bound is claimed for.
    pub small_d: bool,
}

impl CounterexReport {
    /// `estimate + 3 sigma <= bound + slack`.
    pub fn within(&self, slack: f64) -> bool {
        self.estimate + 3.0 * self.std_error <= to_f64(&self.bound) + slack
    }
}

pub const CROSS_CHECK_SAMPLES: u64 = 1000;

/// Monte-Carlo `Rej_{d,d+1}(S_{d+1,n})` with directions conditioned on
/// independence by resampling, using the rank criterion and validating it
/// against the direct sum on the first samples.
pub fn counterexample_experiment(d: usize, n: usize, trials: u64, seed: u64) -> Result<CounterexReport> {
    let k = d + 1;
    if k > n || n > MAX_DIM {
        return param("need d + 1 <= n <= 64");
    }
    if trials == 0 {
        return param("trials must be positive");
    }
    let mut rng = crate::seeded_rng(seed);
    let mask = crate::f2::low_mask(n);
    let mut rejections = 0;
    let mut cross_checked = 0;
    let mut mismatches = 0;
    for t in 0..trials {
        let dirs = loop {
            let rows: Vec<u64> = (0..k).map(|_| rng.gen::<u64>() & mask).collect();
            let m = F2Mat::from_rows(rows, n);
            if m.rank() == k {
                break m;
            }
        };
        let x0 = F2Vec::from_bits(rng.gen::<u64>() & mask, n);
        let fast = rank_criterion(&dirs);
        if t < CROSS_CHECK_SAMPLES {
            cross_checked += 1;
            if gn_rejects_symmetric(&GnInstance { x0, dirs }, d, n)? != fast {
                mismatches += 1;
            }
        }
        if fast {
            rejections += 1;
        }
    }
    let estimate = rejections as f64 / trials as f64;
    let std_error = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    Ok(CounterexReport {
        d,
        n,
        trials,
        seed,
        rejections,
        estimate,
        std_error,
        bound: frac(1, 2) - pow2(-7),
        cross_checked,
        mismatches,
        small_d: d < 3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::BooleanFunction;
    use crate::flattest::derivative_sum;
    use crate::seeded_rng;

    fn random_mat(k: usize, n: usize, rng: &mut impl Rng) -> F2Mat {
        let mask = crate::f2::low_mask(n);
        F2Mat::from_rows((0..k).map(|_| rng.gen::<u64>() & mask).collect(), n)
    }

    /// Permanent by the defining sum over permutations.
    fn perm_naive(m: &F2Mat) -> bool {
        fn go(m: &F2Mat, row: usize, used: u64) -> bool {
            if row == m.nrows() {
                return true;
            }
            let mut acc = false;
            for c in 0..m.ncols() {
                if used & (1 << c) == 0 && m.get(row, c) {
                    acc ^= go(m, row + 1, used | (1 << c));
                }
            }
            acc
        }
        go(m, 0, 0)
    }

    #[test]
    fn examples() {
        let n = 6;
        for d in 0..4 {
            let id = F2Mat::from_rows((0..=d).map(|i| 1u64 << i).collect(), n);
            assert!(rank_criterion(&id));
            let inst = GnInstance::new(F2Vec::zero(n), id.clone()).unwrap();
            assert!(gn_rejects_symmetric(&inst, d, n).unwrap());
            let parts = cauchy_binet_parts(&id).unwrap();
            assert!(parts.permanent_sum && parts.det && parts.derivative_sum);
            let zero = F2Mat::zero(d + 1, n);
            assert!(!rank_criterion(&zero));
            let parts = cauchy_binet_parts(&zero).unwrap();
            assert!(!parts.permanent_sum && !parts.det && !parts.derivative_sum);
        }
        let mut rows = vec![0b1u64, 0b10];
        rows.push(0);
        assert!(!rank_criterion(&F2Mat::from_rows(rows, 4)));
    }

    #[test]
    fn ryser_matches_definition() {
        let mut rng = seeded_rng(50);
        for k in 1..=5 {
            for _ in 0..50 {
                let m = random_mat(k, k, &mut rng);
                assert_eq!(ryser_permanent_mod2(&m), perm_naive(&m));
            }
        }
    }

    #[test]
    fn gn_matches_table_derivative_and_ignores_x0() {
        let mut rng = seeded_rng(51);
        let n = 7;
        for d in 1..4 {
            let s = BooleanFunction::symmetric_poly(d + 1, n).unwrap();
            for _ in 0..50 {
                let m = random_mat(d + 1, n, &mut rng);
                let x0 = rng.gen::<u64>() & 127;
                let x1 = rng.gen::<u64>() & 127;
                let a = gn_rejects_symmetric(&GnInstance::new(F2Vec::from_bits(x0, n), m.clone()).unwrap(), d, n).unwrap();
                let b = gn_rejects_symmetric(&GnInstance::new(F2Vec::from_bits(x1, n), m.clone()).unwrap(), d, n).unwrap();
                assert_eq!(a, b);
                assert_eq!(a, derivative_sum(&s, x0, m.row_bits()));
                assert_eq!(a, rank_criterion(&m));
            }
        }
    }

    #[test]
    fn k_subsets_counts() {
        assert_eq!(k_subsets(5, 2).count(), 10);
        assert_eq!(k_subsets(4, 4).collect::<Vec<_>>(), vec![0b1111]);
        assert_eq!(k_subsets(3, 0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(k_subsets(12, 4).count(), 495);
        assert!(k_subsets(12, 4).all(|s| s.count_ones() == 4 && s < 1 << 12));
    }

    #[test]
    fn symmetric_rank_small() {
        let s1 = symmetric_rank_stats(1, Mode::Exact).unwrap();
        assert_eq!(s1.fraction(), frac(1, 2));
        let s2 = symmetric_rank_stats(2, Mode::Exact).unwrap();
        assert_eq!((s2.full_rank_count, s2.total), (4, 8));
        let s3 = symmetric_rank_stats(3, Mode::Exact).unwrap();
        assert_eq!(s3.fraction(), frac(7, 16));
        let mc = symmetric_rank_stats(3, Mode::MonteCarlo { trials: 20_000, seed: 2 }).unwrap();
        assert!((to_f64(&mc.fraction()) - 7.0 / 16.0).abs() < 0.015);
    }

    #[test]
    fn tv_rank_one_closed_form() {
        for n in 2..=8 {
            let tv = mmt_distribution_distance(0, n, Mode::Exact).unwrap();
            let odd = frac(1 << (n - 1), (1 << n) - 1);
            assert_eq!(tv.value, (odd - frac(1, 2)).abs());
        }
    }

    #[test]
    fn tv_decreases_in_n() {
        let (rows, c) = fit_tv_constant(1, 4..=7).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].value < w[0].value);
        }
        assert!(c > 0.0 && c.is_finite());
        let mc = mmt_distribution_distance(1, 6, Mode::MonteCarlo { trials: 50_000, seed: 3 }).unwrap();
        assert!((to_f64(&mc.value) - to_f64(&rows[2].value)).abs() < 0.02);
    }

    #[test]
    fn experiment_small() {
        let r = counterexample_experiment(3, 12, 20_000, 4).unwrap();
        assert_eq!(r.mismatches, 0);
        assert_eq!(r.cross_checked, 1000);
        assert!(!r.small_d);
        assert!(r.within(0.01));
        assert!(counterexample_experiment(1, 8, 100, 1).unwrap().small_d);
    }
}
