//! The k-flat tester `T_{d,k}`, the derivative test `T_GN(k)`, their exact
//! and sampled rejection probabilities, and checks of the inequalities that
//! relate them to `delta_d`.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::boolfn::{translate_into, BooleanFunction, LO};
use crate::error::{param, Error, Result};
use crate::f2::{self, linear_subspaces_within, sample_flat, Budget, Flat};
use crate::ratio::{frac, int, min as rmin, pow2};
use crate::rmcode::{nearest, RmCode};

/// The constants of the soundness analysis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThmConstants {
    pub beta: BigRational,
    pub eps0: BigRational,
    pub gamma: BigRational,
    pub c: u32,
    pub eps1: BigRational,
}

impl Default for ThmConstants {
    fn default() -> Self {
        Self::proven()
    }
}

impl ThmConstants {
    /// `beta = 1/25, eps0 = 1/16, gamma = 72, c = 10, eps1 = 2^-13`.
    pub fn proven() -> Self {
        let mut out = ThmConstants {
            beta: frac(1, 25),
            eps0: frac(1, 16),
            gamma: int(72),
            c: 10,
            eps1: BigRational::zero(),
        };
        out.eps1 = out.chained_eps1();
        out
    }

    /// `eps0 * 2^-(c-1)`.
    pub fn chained_eps1(&self) -> BigRational {
        &self.eps0 * pow2(1 - self.c as i64)
    }

    pub fn with_eps1(mut self, eps1: BigRational) -> Self {
        self.eps1 = eps1;
        self
    }

    /// `eps1 = 2^(d+1-n)`. Any function of degree above `d` has
    /// `Rej_{d,d+1} >= 2^(d+1-n)`, so the main inequality holds with this
    /// value for every `f` on `n` variables.
    pub fn small_n(d: usize, n: usize) -> Self {
        Self::proven().with_eps1(pow2(d as i64 + 1 - n as i64))
    }
}

/// One run of `T_{d,k}`.
#[derive(Clone, Debug)]
pub struct TestOutcome {
    pub rejected: bool,
    pub flat: Flat,
}

/// One run of `T_GN(k)`: base point and (possibly dependent) directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GnOutcome {
    pub rejected: bool,
    pub x0: u64,
    pub dirs: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RejEstimate {
    Exact { rejecting: u64, total: u64 },
    MonteCarlo { rejections: u64, trials: u64, seed: Option<u64> },
}

impl RejEstimate {
    /// The exact probability, or the empirical rate as a rational.
    pub fn value(&self) -> BigRational {
        match *self {
            RejEstimate::Exact { rejecting, total } => frac(rejecting, total),
            RejEstimate::MonteCarlo { rejections, trials, .. } => frac(rejections, trials),
        }
    }

    pub fn estimate(&self) -> f64 {
        match *self {
            RejEstimate::Exact { rejecting, total } => rejecting as f64 / total as f64,
            RejEstimate::MonteCarlo { rejections, trials, .. } => rejections as f64 / trials as f64,
        }
    }

    /// Standard error of the mean; zero for exact values.
    pub fn std_error(&self) -> f64 {
        match *self {
            RejEstimate::Exact { .. } => 0.0,
            RejEstimate::MonteCarlo { trials, .. } => {
                let p = self.estimate();
                (p * (1.0 - p) / trials as f64).sqrt()
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, RejEstimate::Exact { .. })
    }
}

fn check_dk(n: usize, d: usize, k: usize) -> Result<()> {
    if k < d + 1 {
        return param(format!("k = {k} < d + 1 = {} loses perfect completeness", d + 1));
    }
    if k > n {
        return param(format!("k = {k} exceeds n = {n}"));
    }
    Ok(())
}

pub fn run_flat_test<R: Rng + ?Sized>(f: &BooleanFunction, d: usize, k: usize, rng: &mut R) -> Result<TestOutcome> {
    check_dk(f.n(), d, k)?;
    let flat = sample_flat(f.n(), k, rng)?;
    let rejected = f.restrict(&flat)?.degree() > d as i32;
    Ok(TestOutcome { rejected, flat })
}

#[inline]
fn translate_word(w: u64, a: u64) -> u64 {
    let mut w = w;
    for (i, &lo) in LO.iter().enumerate() {
        if (a >> i) & 1 == 1 {
            let s = 1 << i;
            w = ((w & lo) << s) | ((w >> s) & lo);
        }
    }
    w
}

/// Exact `Rej_{d,k}` for every `d` at once, reusing the list of linear
/// `k`-subspaces across functions.
///
/// For a subspace with basis `v_1..v_k`, the ANF coefficient of monomial `S`
/// of `f` restricted to `x + V` is the derivative `D_S f(x)` along
/// `{v_j : j in S}`. The restriction has degree above `d` iff some `D_S f(x)`
/// with `|S| > d` is one, and that event is constant on each coset.
pub struct RejCalculator {
    n: usize,
    k: usize,
    bases: Vec<Vec<u64>>,
    flats: u64,
}

impl RejCalculator {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        Self::within(n, k, &Budget::default())
    }

    pub fn within(n: usize, k: usize, budget: &Budget) -> Result<Self> {
        if k > n {
            return param(format!("k = {k} exceeds n = {n}"));
        }
        f2::check_flat_budget(n, k, budget)?;
        let bases = linear_subspaces_within(n, k, budget)?
            .into_iter()
            .map(|m| m.row_bits().to_vec())
            .collect::<Vec<_>>();
        let flats = bases.len() as u64 * (1u64 << (n - k));
        Ok(RejCalculator { n, k, bases, flats })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn total_flats(&self) -> u64 {
        self.flats
    }

    /// Entry `d` counts the `k`-flats on which `f` has degree above `d`,
    /// for `d = 0..k`; degrees `d >= k` never reject.
    pub fn reject_counts(&self, f: &BooleanFunction) -> Vec<u64> {
        assert_eq!(f.n(), self.n, "function arity differs from the calculator");
        let k = self.k;
        let mut counts = vec![0u64; k];
        if k == 0 {
            return counts;
        }
        if f.words().len() == 1 {
            let mut tables = vec![0u64; 1 << k];
            let mut layers = vec![0u64; k + 1];
            tables[0] = f.words()[0];
            for basis in &self.bases {
                layers.iter_mut().for_each(|l| *l = 0);
                for s in 1usize..(1 << k) {
                    let j = 63 - (s as u64).leading_zeros() as usize;
                    let prev = tables[s ^ (1 << j)];
                    let t = prev ^ translate_word(prev, basis[j]);
                    tables[s] = t;
                    layers[s.count_ones() as usize] |= t;
                }
                let mut acc = 0u64;
                for d in (0..k).rev() {
                    acc |= layers[d + 1];
                    counts[d] += (acc.count_ones() as u64) >> k;
                }
            }
        } else {
            let w = f.words().len();
            let mut tables = vec![0u64; w << k];
            let mut layers = vec![0u64; w * (k + 1)];
            let mut acc = vec![0u64; w];
            tables[..w].copy_from_slice(f.words());
            for basis in &self.bases {
                layers.iter_mut().for_each(|l| *l = 0);
                for s in 1usize..(1 << k) {
                    let j = 63 - (s as u64).leading_zeros() as usize;
                    let p = s ^ (1 << j);
                    let (head, tail) = tables.split_at_mut(s * w);
                    let prev = &head[p * w..(p + 1) * w];
                    let cur = &mut tail[..w];
                    translate_into(prev, basis[j], self.n, cur);
                    let layer = s.count_ones() as usize;
                    for ((c, q), l) in cur.iter_mut().zip(prev).zip(&mut layers[layer * w..(layer + 1) * w]) {
                        *c ^= q;
                        *l |= *c;
                    }
                }
                acc.iter_mut().for_each(|a| *a = 0);
                for d in (0..k).rev() {
                    let mut ones = 0u64;
                    for (a, l) in acc.iter_mut().zip(&layers[(d + 1) * w..(d + 2) * w]) {
                        *a |= l;
                        ones += a.count_ones() as u64;
                    }
                    counts[d] += ones >> k;
                }
            }
        }
        counts
    }

    pub fn rejecting(&self, f: &BooleanFunction, d: usize) -> u64 {
        if d >= self.k {
            0
        } else {
            self.reject_counts(f)[d]
        }
    }

    pub fn rej(&self, f: &BooleanFunction, d: usize) -> RejEstimate {
        RejEstimate::Exact { rejecting: self.rejecting(f, d), total: self.flats }
    }
}

/// Exact `Rej_{d,k}(f)` over all `k`-flats.
pub fn rej_exact(f: &BooleanFunction, d: usize, k: usize) -> Result<RejEstimate> {
    rej_exact_within(f, d, k, &Budget::default())
}

pub fn rej_exact_within(f: &BooleanFunction, d: usize, k: usize, budget: &Budget) -> Result<RejEstimate> {
    check_dk(f.n(), d, k)?;
    let calc = RejCalculator::within(f.n(), k, budget).map_err(|e| match e {
        Error::Resource { what, count, limit, .. } => Error::Resource {
            what,
            count,
            limit,
            hint: "use rej_montecarlo",
        },
        other => other,
    })?;
    Ok(calc.rej(f, d))
}

/// Exact `Rej_{d,k}` by restricting to every flat and computing the degree.
/// Slower than [`rej_exact`]; kept as a second route.
pub fn rej_by_restriction(f: &BooleanFunction, d: usize, k: usize) -> Result<RejEstimate> {
    check_dk(f.n(), d, k)?;
    let mut rejecting = 0u64;
    let mut total = 0u64;
    for flat in f2::enumerate_flats(f.n(), k)? {
        total += 1;
        if f.restrict(&flat)?.degree() > d as i32 {
            rejecting += 1;
        }
    }
    Ok(RejEstimate::Exact { rejecting, total })
}

/// Mean of `trials` independent runs of `T_{d,k}`, seeded.
pub fn rej_montecarlo(f: &BooleanFunction, d: usize, k: usize, trials: u64, seed: u64) -> Result<RejEstimate> {
    let mut rng = crate::seeded_rng(seed);
    let est = rej_montecarlo_with(f, d, k, trials, &mut rng)?;
    Ok(match est {
        RejEstimate::MonteCarlo { rejections, trials, .. } => RejEstimate::MonteCarlo { rejections, trials, seed: Some(seed) },
        other => other,
    })
}

pub fn rej_montecarlo_with<R: Rng + ?Sized>(
    f: &BooleanFunction,
    d: usize,
    k: usize,
    trials: u64,
    rng: &mut R,
) -> Result<RejEstimate> {
    check_dk(f.n(), d, k)?;
    if trials == 0 {
        return param("trials must be positive");
    }
    let mut rejections = 0;
    for _ in 0..trials {
        if run_flat_test(f, d, k, rng)?.rejected {
            rejections += 1;
        }
    }
    Ok(RejEstimate::MonteCarlo { rejections, trials, seed: None })
}

/// `sum over J of f(x0 + sum_{j in J} a_j)`.
pub fn derivative_sum(f: &BooleanFunction, x0: u64, dirs: &[u64]) -> bool {
    let mut acc = false;
    let mut x = x0;
    acc ^= f.get(x);
    for c in 1u64..(1u64 << dirs.len()) {
        x ^= dirs[c.trailing_zeros() as usize];
        acc ^= f.get(x);
    }
    acc
}

/// `T_GN(k)`: uniform base point and `k` uniform directions, rejecting iff
/// the derivative sum is one.
pub fn run_gn_test<R: Rng + ?Sized>(f: &BooleanFunction, k: usize, rng: &mut R) -> Result<GnOutcome> {
    if k == 0 {
        return param("T_GN needs k >= 1");
    }
    let mask = f.num_points() - 1;
    let x0 = rng.gen::<u64>() & mask;
    let dirs: Vec<u64> = (0..k).map(|_| rng.gen::<u64>() & mask).collect();
    Ok(GnOutcome { rejected: derivative_sum(f, x0, &dirs), x0, dirs })
}

fn check_tuple_budget(n: usize, k: usize, budget: &Budget) -> Result<()> {
    let bits = n * k;
    if bits >= 64 || 1u64 << bits > budget.tuples {
        return Err(Error::Resource {
            what: "direction tuples",
            count: format!("2^{bits}"),
            limit: budget.tuples.to_string(),
            hint: "use a sampled estimate",
        });
    }
    Ok(())
}

/// Exact `T_GN(k)` rejection probability over all `(x0, a_1..a_k)`.
pub fn rej_gn_exact(f: &BooleanFunction, k: usize) -> Result<RejEstimate> {
    rej_gn_exact_within(f, k, &Budget::default())
}

pub fn rej_gn_exact_within(f: &BooleanFunction, k: usize, budget: &Budget) -> Result<RejEstimate> {
    if k == 0 {
        return param("T_GN needs k >= 1");
    }
    let n = f.n();
    check_tuple_budget(n, k, budget)?;
    let w = f.words().len();
    let mut levels = vec![0u64; w * (k + 1)];
    levels[..w].copy_from_slice(f.words());
    let rejecting = gn_dfs(&mut levels, 0, k, n, w);
    let total = 1u64 << (n * (k + 1));
    Ok(RejEstimate::Exact { rejecting, total })
}

fn gn_dfs(levels: &mut [u64], depth: usize, k: usize, n: usize, w: usize) -> u64 {
    if depth == k {
        return levels[depth * w..(depth + 1) * w].iter().map(|x| x.count_ones() as u64).sum();
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
        total += gn_dfs(levels, depth + 1, k, n, w);
    }
    total
}

/// `ceil(2 / min{2^d * delta, eps1})`.
pub fn amplification_count(d: usize, delta: &BigRational, consts: &ThmConstants) -> Result<u64> {
    if *delta <= BigRational::zero() || *delta > BigRational::one() {
        return param("delta must lie in (0, 1]");
    }
    let p = rmin(&(pow2(d as i64) * delta), &consts.eps1);
    let r = (int(2) / p).ceil();
    r.to_integer()
        .try_into()
        .map_err(|_| Error::Parameter("repetition count overflows".into()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmplifiedVerdict {
    pub accepted: bool,
    /// The planned repetition count `r`.
    pub repetitions: u64,
    /// Runs actually made; stops at the first rejection.
    pub runs: u64,
    /// Planned queries `r * 2^(d+1)`.
    pub queries: u64,
}

/// Repeats `T_{d,d+1}` `r` times and accepts iff every run accepts. Every
/// codeword is accepted; anything with `delta_d >= delta` is rejected with
/// probability at least `1 - e^-2`.
pub fn amplified_test<R: Rng + ?Sized>(
    f: &BooleanFunction,
    d: usize,
    delta: &BigRational,
    consts: &ThmConstants,
    rng: &mut R,
) -> Result<AmplifiedVerdict> {
    check_dk(f.n(), d, d + 1)?;
    let r = amplification_count(d, delta, consts)?;
    let queries = r.saturating_mul(1 << (d + 1));
    for run in 1..=r {
        if run_flat_test(f, d, d + 1, rng)?.rejected {
            return Ok(AmplifiedVerdict { accepted: false, repetitions: r, runs: run, queries });
        }
    }
    Ok(AmplifiedVerdict { accepted: true, repetitions: r, runs: r, queries })
}

/// Decision rule of the tolerant tester for error bounds `c1 < c2` in units
/// of `delta_min = 2^-d`.
///
/// Close words (`delta <= c1 * 2^-d`) reject a `(d+1)`-flat with probability
/// at most `2^(d+1) * delta <= 2 c1`, since each of its points is uniform.
/// Far words (`delta >= c2 * 2^-d`) reject with probability at least
/// `min{c2, eps1}`. The threshold is the midpoint and the trial count makes
/// the Hoeffding deviation probability at most 1/3 on either side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TolerantPlan {
    pub close_rate: BigRational,
    pub far_rate: BigRational,
    pub threshold: BigRational,
    pub trials: u64,
}

impl TolerantPlan {
    pub fn new(c1: &BigRational, c2: &BigRational, consts: &ThmConstants) -> Result<Self> {
        if *c1 < BigRational::zero() || c1 >= c2 {
            return param("tolerant test needs 0 <= c1 < c2");
        }
        let close_rate = int(2) * c1;
        let far_rate = rmin(c2, &consts.eps1);
        if close_rate >= far_rate {
            return param(format!(
                "2*c1 = {} must be below min(c2, eps1) = {}",
                crate::ratio::render(&close_rate),
                crate::ratio::render(&far_rate)
            ));
        }
        let threshold = (&close_rate + &far_rate) / int(2);
        let gap = crate::ratio::to_f64(&((&far_rate - &close_rate) / int(2)));
        let trials = (3f64.ln() / (2.0 * gap * gap)).ceil() as u64;
        Ok(TolerantPlan { close_rate, far_rate, threshold, trials })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TolerantVerdict {
    pub accepted: bool,
    pub rejections: u64,
    pub plan: TolerantPlan,
}

pub fn tolerant_test<R: Rng + ?Sized>(
    f: &BooleanFunction,
    d: usize,
    rng: &mut R,
    c1: &BigRational,
    c2: &BigRational,
    consts: &ThmConstants,
) -> Result<TolerantVerdict> {
    check_dk(f.n(), d, d + 1)?;
    let plan = TolerantPlan::new(c1, c2, consts)?;
    let mut rejections = 0u64;
    for _ in 0..plan.trials {
        if run_flat_test(f, d, d + 1, rng)?.rejected {
            rejections += 1;
        }
    }
    let accepted = frac(rejections, plan.trials) <= plan.threshold;
    Ok(TolerantVerdict { accepted, rejections, plan })
}

/// Exact `delta_d(f)`.
pub fn delta_of(f: &BooleanFunction, d: usize) -> Result<BigRational> {
    Ok(nearest(&RmCode::new(d, f.n())?, f)?.distance)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundRow {
    pub ell: usize,
    pub bound: BigRational,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PwReport {
    pub delta: BigRational,
    pub rej: BigRational,
    pub rows: Vec<BoundRow>,
    /// `min{1/8, 2^(k-1) delta}`, evaluated when `delta <= 2^-(d+2)`.
    pub small_delta: Option<(BigRational, bool)>,
}

impl PwReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.holds) && self.small_delta.as_ref().map_or(true, |s| s.1)
    }
}

/// `Rej_{d,k} >= 2^l delta (1 - (2^l - 1) delta)` for every `l` in
/// `[d+1, k]`.
pub fn check_pw_bound(f: &BooleanFunction, d: usize, k: usize) -> Result<PwReport> {
    let delta = delta_of(f, d)?;
    let rej = rej_exact(f, d, k)?.value();
    Ok(pw_report(delta, rej, d, k))
}

pub fn pw_report(delta: BigRational, rej: BigRational, d: usize, k: usize) -> PwReport {
    let rows = (d + 1..=k)
        .map(|ell| {
            let p = pow2(ell as i64);
            let bound = &p * &delta * (BigRational::one() - (&p - BigRational::one()) * &delta);
            BoundRow { ell, holds: rej >= bound, bound }
        })
        .collect();
    let small_delta = (delta <= pow2(-(d as i64) - 2)).then(|| {
        let b = rmin(&frac(1, 8), &(pow2(k as i64 - 1) * &delta));
        let holds = rej >= b;
        (b, holds)
    });
    PwReport { delta, rej, rows, small_delta }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KtodReport {
    pub rej_k: BigRational,
    pub rej_k2: BigRational,
    /// `Rej_{d,k2} >= Rej_{d,k} 2^-(k-k2)`.
    pub ktod: bool,
    /// `Rej >= 1/2` for each of `k, k2` with `n = k+1`, when `deg f > d`.
    pub basecase: Vec<(usize, bool)>,
    /// `Rej >= 2^(k-n)` for each of `k, k2`, when `deg f > d`.
    pub exp: Vec<(usize, bool)>,
}

impl KtodReport {
    pub fn passed(&self) -> bool {
        self.ktod && self.basecase.iter().all(|b| b.1) && self.exp.iter().all(|b| b.1)
    }
}

pub fn check_ktod(f: &BooleanFunction, d: usize, k: usize, k2: usize) -> Result<KtodReport> {
    let n = f.n();
    if !(d < k2 && k2 <= k && k <= n) {
        return param("check_ktod needs d+1 <= k2 <= k <= n");
    }
    let rej_k = rej_exact(f, d, k)?.value();
    let rej_k2 = if k2 == k { rej_k.clone() } else { rej_exact(f, d, k2)?.value() };
    Ok(ktod_report(n, f.degree() > d as i32, k, k2, rej_k, rej_k2))
}

pub fn ktod_report(n: usize, above: bool, k: usize, k2: usize, rej_k: BigRational, rej_k2: BigRational) -> KtodReport {
    let ktod = rej_k2 >= &rej_k * pow2(k2 as i64 - k as i64);
    let mut basecase = Vec::new();
    let mut exp = Vec::new();
    if above {
        let mut pairs = vec![(k, &rej_k)];
        if k2 != k {
            pairs.push((k2, &rej_k2));
        }
        for (kk, r) in pairs {
            if n == kk + 1 {
                basecase.push((kk, *r >= frac(1, 2)));
            }
            exp.push((kk, *r >= pow2(kk as i64 - n as i64)));
        }
    }
    KtodReport { rej_k, rej_k2, ktod, basecase, exp }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem1Report {
    pub delta: BigRational,
    pub rej: BigRational,
    /// `min{2^d delta, eps1}`.
    pub bound: BigRational,
    pub holds: bool,
}

impl Theorem1Report {
    /// `rej / bound`, or `None` for codewords.
    pub fn ratio(&self) -> Option<BigRational> {
        (!self.bound.is_zero()).then(|| &self.rej / &self.bound)
    }
}

/// `Rej_{d,d+1}(f) >= min{2^d delta_d(f), eps1}`.
pub fn check_theorem1(f: &BooleanFunction, d: usize, consts: &ThmConstants) -> Result<Theorem1Report> {
    let delta = delta_of(f, d)?;
    let rej = rej_exact(f, d, d + 1)?.value();
    Ok(theorem1_report(delta, rej, d, consts))
}

pub fn theorem1_report(delta: BigRational, rej: BigRational, d: usize, consts: &ThmConstants) -> Theorem1Report {
    let bound = rmin(&(pow2(d as i64) * &delta), &consts.eps1);
    Theorem1Report { holds: rej >= bound, delta, rej, bound }
}

/// `Rej_{d,k}` is non-decreasing in `k` over `d+1..=n`.
pub fn check_monotone(f: &BooleanFunction, d: usize) -> Result<bool> {
    let mut prev = BigRational::zero();
    for k in d + 1..=f.n() {
        let r = rej_exact(f, d, k)?.value();
        if r < prev {
            return Ok(false);
        }
        prev = r;
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InductionReport {
    /// `n >= k >= d + c` and `delta_d >= beta 2^-d`.
    pub applicable: bool,
    pub rej: Option<BigRational>,
    /// `eps0 + gamma 2^d / 2^n`.
    pub bound: BigRational,
    pub holds: Option<bool>,
}

pub fn check_induction(f: &BooleanFunction, d: usize, k: usize, consts: &ThmConstants) -> Result<InductionReport> {
    let n = f.n();
    check_dk(n, d, k)?;
    let bound = &consts.eps0 + &consts.gamma * pow2(d as i64 - n as i64);
    if k < d + consts.c as usize {
        return Ok(InductionReport { applicable: false, rej: None, bound, holds: None });
    }
    let delta = delta_of(f, d)?;
    if delta < &consts.beta * pow2(-(d as i64)) {
        return Ok(InductionReport { applicable: false, rej: None, bound, holds: None });
    }
    let rej = rej_exact(f, d, k)?.value();
    let holds = rej >= bound;
    Ok(InductionReport { applicable: true, rej: Some(rej), bound, holds: Some(holds) })
}

/// `rho = Rej(T_GN(d+1)) >= Rej_{d,d+1} / 4`, both exact.
pub fn check_relate_tests(f: &BooleanFunction, d: usize) -> Result<(BigRational, BigRational, bool)> {
    let rho = rej_gn_exact(f, d + 1)?.value();
    let rej = rej_exact(f, d, d + 1)?.value();
    let holds = &rho * int(4) >= rej;
    Ok((rho, rej, holds))
}

/// Smallest `Rej_{d,d+1} / min{2^d delta, eps1}` seen over a collection,
/// a measurement rather than a theorem.
#[derive(Clone, Debug, Default)]
pub struct RatioTracker {
    pub checked: u64,
    pub violations: u64,
    pub min_ratio: Option<BigRational>,
}

impl RatioTracker {
    pub fn add(&mut self, report: &Theorem1Report) {
        self.checked += 1;
        if !report.holds {
            self.violations += 1;
        }
        if let Some(r) = report.ratio() {
            if self.min_ratio.as_ref().map_or(true, |m| r < *m) {
                self.min_ratio = Some(r);
            }
        }
    }
}
