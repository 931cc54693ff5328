//! Sewing: from degree-`d` polynomials that fit `f` on many hyperplanes,
//! build one global degree-`d` polynomial close to `f`.

use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::boolfn::{Anf, BooleanFunction};
use crate::error::{param, Error, Result};
use crate::f2::{independent_hyperplanes, normalize_to_coordinates, Budget, Flat, Hyperplane};
use crate::ratio::{frac, int, pow2};
use crate::rmcode::{decode_unique, delta_exact_within, RmCode};

/// A hyperplane together with a degree-`d` polynomial on it, in the
/// coordinates of [`Hyperplane::to_flat`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperplaneWitness {
    pub plane: Hyperplane,
    pub local_poly: BooleanFunction,
    pub local_dist: BigRational,
}

impl HyperplaneWitness {
    /// Witness for `f` on `plane` with an arbitrary local polynomial.
    pub fn new(f: &BooleanFunction, plane: Hyperplane, local_poly: BooleanFunction) -> Result<Self> {
        if plane.ambient() != f.n() || local_poly.n() + 1 != f.n() {
            return param("witness dimensions do not match the function");
        }
        let local_dist = f.restrict(&plane.to_flat())?.distance(&local_poly)?;
        Ok(HyperplaneWitness { plane, local_poly, local_dist })
    }

    /// `(membership, values)` tables on the ambient space; values are zero
    /// off the plane.
    fn lift(&self) -> (BooleanFunction, BooleanFunction) {
        let n = self.plane.ambient();
        let flat = self.plane.to_flat();
        let mut member = BooleanFunction::zero(n);
        let mut value = BooleanFunction::zero(n);
        for (x, p) in flat.points().into_iter().enumerate() {
            member.set(p, true);
            if self.local_poly.get(x as u64) {
                value.set(p, true);
            }
        }
        (member, value)
    }
}

/// Which hyperplanes [`collect_witnesses`] examines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scan {
    /// Every hyperplane; fails when there are more than `max_planes`.
    All { max_planes: usize },
    /// `count` distinct hyperplanes drawn with the given seed.
    Sample { count: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witnesses {
    pub list: Vec<HyperplaneWitness>,
    pub scanned: usize,
    pub sampled: bool,
}

/// Nearest degree-`d` polynomial to `g` if it is within `alpha`, or `None`.
/// Unique decoding settles every case with `alpha <= 2^-(d+1)`; larger
/// thresholds fall back to exhaustive search.
fn local_fit(g: &BooleanFunction, d: usize, alpha: &BigRational) -> Result<Option<(BooleanFunction, BigRational)>> {
    let code = RmCode::new(d, g.n())?;
    if let Some(near) = decode_unique(&code, g) {
        return Ok((near.distance < *alpha).then_some((near.codeword, near.distance)));
    }
    if *alpha <= pow2(-(d as i64) - 1) {
        return Ok(None);
    }
    let near = delta_exact_within(&code, g, &Budget::default())?;
    Ok((near.distance < *alpha).then_some((near.codeword, near.distance)))
}

/// Hyperplanes on which `f` is `alpha`-close (strictly) to a degree-`d`
/// polynomial, with that polynomial.
pub fn collect_witnesses(f: &BooleanFunction, d: usize, alpha: &BigRational, scan: Scan) -> Result<Witnesses> {
    let n = f.n();
    if n < 2 {
        return param("sewing needs at least two variables");
    }
    let all = Hyperplane::all(n);
    let (planes, sampled) = match scan {
        Scan::All { max_planes } => {
            if all.len() > max_planes {
                return Err(Error::Resource {
                    what: "hyperplanes",
                    count: all.len().to_string(),
                    limit: max_planes.to_string(),
                    hint: "scan a seeded sample instead",
                });
            }
            (all, false)
        }
        Scan::Sample { count, seed } => {
            let mut rng = crate::seeded_rng(seed);
            let mut picked: Vec<Hyperplane> = all.choose_multiple(&mut rng, count.min(all.len())).copied().collect();
            picked.sort();
            let sampled = picked.len() < all.len();
            (picked, sampled)
        }
    };
    let mut list = Vec::new();
    for plane in &planes {
        let g = f.restrict(&plane.to_flat())?;
        if let Some((local_poly, local_dist)) = local_fit(&g, d, alpha)? {
            list.push(HyperplaneWitness { plane: *plane, local_poly, local_dist });
        }
    }
    Ok(Witnesses { list, scanned: planes.len(), sampled })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Agreement {
    pub agree: bool,
    /// `4 max(alpha_1, alpha_2) < 2^-d`.
    pub hypothesis: bool,
}

/// Whether two witnesses agree on the intersection of their planes.
pub fn check_intersection_agreement(w1: &HyperplaneWitness, w2: &HyperplaneWitness, d: usize) -> Agreement {
    let alpha = std::cmp::max(&w1.local_dist, &w2.local_dist);
    let hypothesis = int(4) * alpha < pow2(-(d as i64));
    if w1.plane.is_complementary(&w2.plane) {
        return Agreement { agree: true, hypothesis };
    }
    let (m1, v1) = w1.lift();
    let (m2, v2) = w2.lift();
    let agree = m1
        .words()
        .iter()
        .zip(m2.words())
        .zip(v1.words().iter().zip(v2.words()))
        .all(|((a, b), (x, y))| a & b & (x ^ y) == 0);
    Agreement { agree, hypothesis }
}

/// Fraction of points lying in fewer than `K/3` of the planes.
pub fn bad_fraction(planes: &[Hyperplane]) -> Result<BigRational> {
    let Some(first) = planes.first() else {
        return Ok(frac(1, 1));
    };
    let n = first.ambient();
    if planes.iter().any(|h| h.ambient() != n) {
        return param("hyperplanes live in different dimensions");
    }
    if n > Budget::default().table_vars as usize {
        return param("ambient space too large to count incidences");
    }
    let mut counts = vec![0u32; 1 << n];
    for h in planes {
        let l = h.linear().bits();
        for (p, c) in counts.iter_mut().enumerate() {
            *c += ((((l & p as u64).count_ones() & 1) == 1) == h.offset()) as u32;
        }
    }
    let k = planes.len() as u64;
    let bad = counts.iter().filter(|&&c| 3 * (c as u64) < k).count();
    Ok(frac(bad as u64, 1 << n))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SewReport {
    pub sewn: BooleanFunction,
    pub global_dist: BigRational,
    pub tau: BigRational,
    /// `max alpha_i`.
    pub alpha: BigRational,
    pub k: usize,
    /// `3 alpha / 2 + 9 / K`.
    pub bound: BigRational,
    /// Indices of the witnesses picked for the construction.
    pub basis: Vec<usize>,
    /// Witnesses whose plane restriction of `sewn` differs from their
    /// local polynomial.
    pub mismatched: Vec<usize>,
    pub sampled: bool,
}

impl SewReport {
    pub fn degree_ok(&self, d: usize) -> bool {
        self.sewn.degree() <= d as i32
    }

    /// `global_dist <= 3 alpha / 2 + tau`.
    pub fn tau_bound_ok(&self) -> bool {
        self.global_dist <= frac(3, 2) * &self.alpha + &self.tau
    }

    pub fn dist_ok(&self) -> bool {
        self.global_dist <= self.bound
    }

    pub fn tau_ok(&self) -> bool {
        self.tau <= frac(9, self.k as u64)
    }

    pub fn passed(&self, d: usize) -> bool {
        self.degree_ok(d) && self.mismatched.is_empty() && self.tau_bound_ok() && self.dist_ok() && self.tau_ok()
    }
}

/// The sewing construction. Requires `K > 2^(d+1)` witnesses with
/// `max alpha_i < 2^-(d+2)`.
pub fn sew(f: &BooleanFunction, d: usize, witnesses: &[HyperplaneWitness]) -> Result<SewReport> {
    let k = witnesses.len();
    if k <= 1 << (d + 1) {
        return param(format!("sewing needs more than 2^(d+1) = {} witnesses, got {k}", 1 << (d + 1)));
    }
    let alpha = max_alpha(witnesses);
    if alpha >= pow2(-(d as i64) - 2) {
        return param(format!("alpha = {} is not below 2^-(d+2)", crate::ratio::render(&alpha)));
    }
    sew_unchecked(f, d, witnesses)
}

pub fn sew_collected(f: &BooleanFunction, d: usize, witnesses: &Witnesses) -> Result<SewReport> {
    let mut report = sew(f, d, &witnesses.list)?;
    report.sampled = witnesses.sampled;
    Ok(report)
}

fn max_alpha(witnesses: &[HyperplaneWitness]) -> BigRational {
    witnesses
        .iter()
        .map(|w| w.local_dist.clone())
        .max()
        .unwrap_or_else(BigRational::zero)
}

/// [`sew`] without the size and distance preconditions. Local polynomials
/// that disagree surface as [`Error::Inconsistency`].
pub fn sew_unchecked(f: &BooleanFunction, d: usize, witnesses: &[HyperplaneWitness]) -> Result<SewReport> {
    let n = f.n();
    let k = witnesses.len();
    if k == 0 {
        return param("no witnesses");
    }
    if witnesses.iter().any(|w| w.plane.ambient() != n || w.local_poly.n() + 1 != n) {
        return param("witness dimensions do not match the function");
    }
    let ell = ((k + 1) as f64).log2().floor() as usize;
    let ell = ell.min(n);
    let planes: Vec<Hyperplane> = witnesses.iter().map(|w| w.plane).collect();
    let basis = independent_hyperplanes(&planes, ell)?;
    let chosen: Vec<Hyperplane> = basis.iter().map(|&i| planes[i]).collect();
    let t = normalize_to_coordinates(&chosen)?;
    let t_inv = t.inverse()?;

    // P_i extended to all of F2^n in the new coordinates, independent of x_i
    let lifted: Vec<BooleanFunction> = basis.iter().map(|&i| witnesses[i].lift().1).collect();
    let coeffs: Vec<Anf> = (0..ell)
        .map(|i| {
            let v = &lifted[i];
            let clear = !(1u64 << i);
            Anf::of(&BooleanFunction::from_fn(n, |z| v.get(t_inv.apply(z & clear))))
        })
        .collect();

    let low = (1u64 << ell) - 1;
    let mut sewn_monomials = Vec::new();
    for m in 0u64..(1 << n) {
        let s = m & low;
        if s == low {
            continue;
        }
        let outside: Vec<usize> = (0..ell).filter(|&i| (s >> i) & 1 == 0).collect();
        let c0 = coeffs[outside[0]].coeff(m);
        for &j in &outside[1..] {
            if coeffs[j].coeff(m) != c0 {
                return Err(Error::Inconsistency { i: basis[outside[0]], j: basis[j], set: s });
            }
        }
        if c0 {
            sewn_monomials.push(m);
        }
    }
    let in_new = Anf::from_monomials(n, &sewn_monomials).to_function();
    let sewn = in_new.compose_affine(&t)?;
    if sewn.degree() > d as i32 && max_alpha(witnesses) < pow2(-(d as i64) - 2) {
        return Err(Error::Invariant(format!("sewn polynomial has degree {} > {d}", sewn.degree())));
    }

    let mut mismatched = Vec::new();
    for (idx, w) in witnesses.iter().enumerate() {
        let flat: Flat = w.plane.to_flat();
        if sewn.restrict(&flat)? != w.local_poly {
            mismatched.push(idx);
        }
    }
    let global_dist = f.distance(&sewn)?;
    let tau = bad_fraction(&planes)?;
    let alpha = max_alpha(witnesses);
    let bound = frac(3, 2) * &alpha + frac(9, k as u64);
    Ok(SewReport { sewn, global_dist, tau, alpha, k, bound, basis, mismatched, sampled: false })
}

/// Re-sews from `trials` shuffled witness orders, which changes the
/// selected planes, and reports whether every result equals `reference`.
pub fn check_alternative_subsets<R: Rng + ?Sized>(
    f: &BooleanFunction,
    d: usize,
    witnesses: &[HyperplaneWitness],
    reference: &BooleanFunction,
    trials: usize,
    rng: &mut R,
) -> Result<bool> {
    let mut order: Vec<HyperplaneWitness> = witnesses.to_vec();
    for _ in 0..trials {
        order.shuffle(rng);
        if sew(f, d, &order)?.sewn != *reference {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;

    fn all_scan() -> Scan {
        Scan::All { max_planes: 1 << 12 }
    }

    #[test]
    fn collect_examples() {
        let mut rng = seeded_rng(40);
        let n = 6;
        let d = 1;
        let g = RmCode::new(d, n).unwrap().random_codeword(&mut rng);
        let ws = collect_witnesses(&g, d, &frac(1, 8), all_scan()).unwrap();
        assert_eq!(ws.list.len(), (1 << (n + 1)) - 2);
        assert!(ws.list.iter().all(|w| w.local_dist.is_zero()));
        let e = g.flipped(13);
        let ws = collect_witnesses(&e, d, &pow2(-(d as i64) - 2), all_scan()).unwrap();
        assert_eq!(ws.list.len(), (1 << (n + 1)) - 2);
        // coordinate planes keep degree d+1; some others (x1+x2 = b at n = 4,
        // the all-ones plane at n = 5, 6 for d = 2) drop it, so the general
        // rule is the degree of the restriction
        for n in 4..=6 {
            for d in 1..=2 {
                let s = BooleanFunction::symmetric_poly(d + 1, n).unwrap();
                let ws = collect_witnesses(&s, d, &frac(1, 1 << n), all_scan()).unwrap();
                assert!(ws.list.iter().all(|w| w.plane.linear().weight() > 1), "n={n} d={d}");
                for h in Hyperplane::all(n) {
                    let low = s.restrict(&h.to_flat()).unwrap().degree() <= d as i32;
                    assert_eq!(ws.list.iter().any(|w| w.plane == h), low);
                }
            }
        }
        assert!(matches!(
            collect_witnesses(&g, d, &frac(1, 8), Scan::All { max_planes: 10 }),
            Err(Error::Resource { .. })
        ));
        let ws = collect_witnesses(&g, d, &frac(1, 8), Scan::Sample { count: 20, seed: 1 }).unwrap();
        assert!(ws.sampled);
        assert_eq!(ws.scanned, 20);
    }

    #[test]
    fn agreement_examples() {
        let mut rng = seeded_rng(41);
        let n = 4;
        let d = 1;
        let g = RmCode::new(d, n).unwrap().random_codeword(&mut rng);
        let ws = collect_witnesses(&g, d, &frac(1, 8), all_scan()).unwrap().list;
        for a in &ws {
            for b in &ws {
                assert!(check_intersection_agreement(a, b, d).agree);
            }
        }
        // x1 = 0 fitted by 0 and x2 = 0 fitted by x3, the plane's second
        // coordinate
        let f = BooleanFunction::zero(n);
        let h1 = Hyperplane::coordinate(n, 0, false);
        let h2 = Hyperplane::coordinate(n, 1, false);
        let w1 = HyperplaneWitness::new(&f, h1, BooleanFunction::zero(n - 1)).unwrap();
        let w2 = HyperplaneWitness::new(&f, h2, BooleanFunction::var(n - 1, 1)).unwrap();
        let a = check_intersection_agreement(&w1, &w2, d);
        assert!(!a.agree);
        assert!(!a.hypothesis);
        assert_eq!(a, check_intersection_agreement(&w2, &w1, d));
        let c = HyperplaneWitness::new(&f, h1.complement(), BooleanFunction::one(n - 1)).unwrap();
        assert!(check_intersection_agreement(&w1, &c, d).agree);
    }

    #[test]
    fn bad_fraction_examples() {
        for n in 2..=6 {
            assert_eq!(bad_fraction(&Hyperplane::all(n)).unwrap(), frac(0, 1));
        }
        let h = Hyperplane::coordinate(5, 2, false);
        let pairs: Vec<_> = (0..4).flat_map(|_| [h, h.complement()]).collect();
        assert_eq!(bad_fraction(&pairs).unwrap(), frac(0, 1));
        let mut rng = seeded_rng(42);
        let all = Hyperplane::all(10);
        for _ in 0..5 {
            let pick: Vec<_> = all.choose_multiple(&mut rng, 64).copied().collect();
            assert!(bad_fraction(&pick).unwrap() <= frac(9, 64));
        }
    }

    #[test]
    fn sew_recovers_codeword() {
        let mut rng = seeded_rng(43);
        for (n, d) in [(5usize, 1usize), (6, 1), (6, 2), (7, 2)] {
            let g = RmCode::new(d, n).unwrap().random_codeword(&mut rng);
            let ws = collect_witnesses(&g, d, &pow2(-(d as i64) - 2), all_scan()).unwrap();
            let r = sew_collected(&g, d, &ws).unwrap();
            assert_eq!(r.sewn, g);
            assert!(r.passed(d));
            let p = rng.gen_range(0..1u64 << n);
            let f = g.flipped(p);
            let ws = collect_witnesses(&f, d, &pow2(-(d as i64) - 2), all_scan()).unwrap();
            let r = sew_collected(&f, d, &ws).unwrap();
            assert_eq!(r.sewn, g);
            assert_eq!(r.global_dist, frac(1, 1 << n));
            assert!(r.passed(d));
            assert!(check_alternative_subsets(&f, d, &ws.list, &g, 5, &mut rng).unwrap());
        }
    }

    #[test]
    fn sew_preconditions_and_inconsistency() {
        let n = 4;
        let f = BooleanFunction::zero(n);
        let zero = BooleanFunction::zero(n - 1);
        let few: Vec<_> = Hyperplane::all(n)
            .into_iter()
            .take(4)
            .map(|h| HyperplaneWitness::new(&f, h, zero.clone()).unwrap())
            .collect();
        assert!(matches!(sew(&f, 1, &few), Err(Error::Parameter(_))));
        // coordinate planes fitted by inconsistent polynomials
        let mut ws: Vec<_> = (0..n)
            .map(|i| HyperplaneWitness::new(&f, Hyperplane::coordinate(n, i, false), zero.clone()).unwrap())
            .collect();
        ws[1] = HyperplaneWitness::new(&f, Hyperplane::coordinate(n, 1, false), BooleanFunction::var(n - 1, 2)).unwrap();
        for h in Hyperplane::all(n).into_iter().filter(|h| h.linear().weight() > 1).take(6) {
            ws.push(HyperplaneWitness::new(&f, h, zero.clone()).unwrap());
        }
        assert!(matches!(sew(&f, 1, &ws), Err(Error::Parameter(_))));
        assert!(matches!(sew_unchecked(&f, 1, &ws), Err(Error::Inconsistency { .. })));
    }
}
