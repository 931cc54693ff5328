//! The Reed-Muller code `RM(d, n)` and exact distance to it.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use crate::boolfn::{mobius_in_place, translate_into, word_count, BooleanFunction, LO, MAX_VARS};
use crate::error::{param, Error, Result};
use crate::f2::{Budget, Flat};
use crate::ratio::pow2;

/// `RM(d, n)`: all functions on `n` variables of degree at most `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RmCode {
    d: usize,
    n: usize,
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

impl RmCode {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if n > MAX_VARS {
            return param(format!("{n} variables exceeds {MAX_VARS}"));
        }
        Ok(RmCode { d, n })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `sum_{i <= d} C(n, i)`.
    pub fn dim(&self) -> u64 {
        (0..=self.d.min(self.n)).map(|i| binomial(self.n, i)).sum()
    }

    /// Relative minimum distance `2^-d` (capped at `2^-n` once `d >= n`).
    pub fn min_distance(&self) -> BigRational {
        pow2(-(self.d.min(self.n) as i64))
    }

    pub fn contains(&self, f: &BooleanFunction) -> bool {
        f.n() == self.n && f.degree() <= self.d as i32
    }

    /// Monomial masks of degree at most `d`, ascending.
    pub fn monomials(&self) -> Vec<u64> {
        (0u64..(1 << self.n))
            .filter(|m| m.count_ones() as usize <= self.d)
            .collect()
    }

    /// The codeword with coefficient index `index`: monomial `j` of
    /// [`monomials`](Self::monomials) carries bit `dim - 1 - j`, so ascending
    /// indices are lexicographic order on coefficient vectors.
    pub fn codeword(&self, index: u64) -> BooleanFunction {
        let monos = self.monomials();
        let dim = monos.len();
        let chosen: Vec<u64> = monos
            .iter()
            .enumerate()
            .filter(|(j, _)| (index >> (dim - 1 - j)) & 1 == 1)
            .map(|(_, &m)| m)
            .collect();
        crate::boolfn::Anf::from_monomials(self.n, &chosen).to_function()
    }

    pub fn random_codeword<R: Rng + ?Sized>(&self, rng: &mut R) -> BooleanFunction {
        let monos = self.monomials();
        let chosen: Vec<u64> = monos.into_iter().filter(|_| rng.gen::<bool>()).collect();
        crate::boolfn::Anf::from_monomials(self.n, &chosen).to_function()
    }

    fn check_dim(&self, budget: &Budget) -> Result<()> {
        let dim = self.dim();
        if dim > budget.codeword_dim as u64 {
            return Err(Error::Resource {
                what: "code dimension",
                count: dim.to_string(),
                limit: budget.codeword_dim.to_string(),
                hint: "use unique decoding or a sampled distance estimate",
            });
        }
        Ok(())
    }

    /// Every codeword once, in lexicographic coefficient order.
    pub fn codewords(&self) -> Result<Codewords> {
        self.codewords_within(&Budget::default())
    }

    pub fn codewords_within(&self, budget: &Budget) -> Result<Codewords> {
        self.check_dim(budget)?;
        Ok(Codewords {
            code: *self,
            next: 0,
            end: 1u64 << self.dim(),
        })
    }
}

pub struct Codewords {
    code: RmCode,
    next: u64,
    end: u64,
}

impl Iterator for Codewords {
    type Item = BooleanFunction;

    fn next(&mut self) -> Option<BooleanFunction> {
        if self.next == self.end {
            return None;
        }
        let cw = self.code.codeword(self.next);
        self.next += 1;
        Some(cw)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Minimum over every codeword.
    Exhaustive,
    /// Within half the minimum distance, so the nearest codeword is unique.
    UniqueRadius,
}

/// A nearest codeword and its exact distance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nearest {
    pub codeword: BooleanFunction,
    /// Number of disagreeing points.
    pub errors: u64,
    pub distance: BigRational,
    pub certificate: Certificate,
}

fn nearest_from(f: &BooleanFunction, codeword: BooleanFunction, certificate: Certificate) -> Nearest {
    let errors = f.hamming(&codeword).expect("same arity");
    Nearest {
        distance: BigRational::new(BigInt::from(errors), BigInt::from(1u8) << f.n()),
        codeword,
        errors,
        certificate,
    }
}

/// `delta_d(f)` by exhaustive search. Ties resolve to the lexicographically
/// smallest coefficient vector.
pub fn delta_exact(code: &RmCode, f: &BooleanFunction) -> Result<Nearest> {
    delta_exact_within(code, f, &Budget::default())
}

pub fn delta_exact_within(code: &RmCode, f: &BooleanFunction, budget: &Budget) -> Result<Nearest> {
    if f.n() != code.n {
        return param("function and code have different variable counts");
    }
    code.check_dim(budget)?;
    let monos = code.monomials();
    let dim = monos.len();
    let tables: Vec<BooleanFunction> = monos
        .iter()
        .map(|&m| BooleanFunction::monomial(code.n, m))
        .collect();
    let best_index = if f.words().len() == 1 {
        let words: Vec<u64> = tables.iter().map(|t| t.words()[0]).collect();
        gray_search_word(f.words()[0], &words)
    } else {
        gray_search(f.words(), &tables)
    };
    let _ = dim;
    Ok(nearest_from(f, code.codeword(best_index), Certificate::Exhaustive))
}

/// Walks all coefficient vectors in Gray order; returns the lexicographically
/// smallest index achieving the minimum distance.
fn gray_search_word(target: u64, tables: &[u64]) -> u64 {
    let dim = tables.len();
    let mut cur = 0u64;
    let mut best = (target.count_ones(), 0u64);
    for c in 1u64..(1u64 << dim) {
        let b = c.trailing_zeros() as usize;
        cur ^= tables[dim - 1 - b];
        let dist = (cur ^ target).count_ones();
        if dist <= best.0 {
            let g = c ^ (c >> 1);
            if dist < best.0 || g < best.1 {
                best = (dist, g);
            }
        }
    }
    best.1
}

fn gray_search(target: &[u64], tables: &[BooleanFunction]) -> u64 {
    let dim = tables.len();
    let mut cur = vec![0u64; target.len()];
    let popdiff = |cur: &[u64]| -> u64 {
        cur.iter().zip(target).map(|(a, b)| (a ^ b).count_ones() as u64).sum()
    };
    let mut best = (popdiff(&cur), 0u64);
    for c in 1u64..(1u64 << dim) {
        let b = c.trailing_zeros() as usize;
        for (w, t) in cur.iter_mut().zip(tables[dim - 1 - b].words()) {
            *w ^= t;
        }
        let dist = popdiff(&cur);
        if dist <= best.0 {
            let g = c ^ (c >> 1);
            if dist < best.0 || g < best.1 {
                best = (dist, g);
            }
        }
    }
    best.1
}

/// Points with `x_i = 0` for every `i` in `mask`.
fn zero_face(n: usize, mask: u64) -> Vec<u64> {
    let mut words = vec![crate::boolfn::table_mask(n); word_count(n)];
    for (i, &lo) in LO.iter().enumerate().take(n.min(6)) {
        if (mask >> i) & 1 == 1 {
            for w in words.iter_mut() {
                *w &= lo;
            }
        }
    }
    let hi = (mask >> 6) as usize;
    for (j, w) in words.iter_mut().enumerate() {
        if j & hi != 0 {
            *w = 0;
        }
    }
    words
}

/// Majority-logic (Reed) decoding. Returns the decoded codeword only when it
/// lies strictly within half the minimum distance of `f`, in which case it is
/// the unique nearest codeword.
pub fn decode_unique(code: &RmCode, f: &BooleanFunction) -> Option<Nearest> {
    if f.n() != code.n {
        return None;
    }
    let n = code.n;
    if code.d >= n {
        return Some(nearest_from(f, f.clone(), Certificate::UniqueRadius));
    }
    let mut residual = f.words().to_vec();
    let mut chosen: Vec<u64> = Vec::new();
    let mut scratch = vec![0u64; residual.len()];
    for s in (0..=code.d).rev() {
        let mut layer = Vec::new();
        let votes_total = 1u64 << (n - s);
        for mask in (0u64..(1 << n)).filter(|m| m.count_ones() as usize == s) {
            let mut deriv = residual.clone();
            let mut bits = mask;
            while bits != 0 {
                let i = bits.trailing_zeros();
                translate_into(&deriv, 1 << i, n, &mut scratch);
                for (d, t) in deriv.iter_mut().zip(&scratch) {
                    *d ^= t;
                }
                bits &= bits - 1;
            }
            let face = zero_face(n, mask);
            let ones: u64 = deriv
                .iter()
                .zip(&face)
                .map(|(d, z)| (d & z).count_ones() as u64)
                .sum();
            if 2 * ones == votes_total {
                return None;
            }
            if 2 * ones > votes_total {
                layer.push(mask);
            }
        }
        if !layer.is_empty() {
            let mut part = vec![0u64; residual.len()];
            for &m in &layer {
                part[(m >> 6) as usize] ^= 1 << (m & 63);
            }
            mobius_in_place(&mut part, n);
            for (r, p) in residual.iter_mut().zip(&part) {
                *r ^= p;
            }
            chosen.extend(layer);
        }
    }
    let codeword = crate::boolfn::Anf::from_monomials(n, &chosen).to_function();
    let nearest = nearest_from(f, codeword, Certificate::UniqueRadius);
    // errors < 2^(n-d-1) is strictly inside the unique decoding radius
    (nearest.errors < 1u64 << (n - code.d - 1)).then_some(nearest)
}

/// Exact nearest codeword: exhaustive when the dimension fits the budget,
/// otherwise certified unique decoding.
pub fn nearest(code: &RmCode, f: &BooleanFunction) -> Result<Nearest> {
    nearest_within(code, f, &Budget::default())
}

pub fn nearest_within(code: &RmCode, f: &BooleanFunction, budget: &Budget) -> Result<Nearest> {
    if f.n() != code.n {
        return param("function and code have different variable counts");
    }
    if code.dim() <= budget.codeword_dim as u64 {
        return delta_exact_within(code, f, budget);
    }
    decode_unique(code, f).ok_or(Error::Resource {
        what: "code dimension",
        count: code.dim().to_string(),
        limit: budget.codeword_dim.to_string(),
        hint: "the word is outside the unique decoding radius; use a sampled distance estimate",
    })
}

/// Nearest degree-`d` polynomial to `f|_A`, in the flat's coordinates.
pub fn nearest_on_flat(f: &BooleanFunction, flat: &Flat, d: usize) -> Result<(BooleanFunction, BigRational)> {
    let local = f.restrict(flat)?;
    let code = RmCode::new(d, flat.dim())?;
    let near = nearest(&code, &local)?;
    Ok((near.codeword, near.distance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2::Hyperplane;
    use crate::ratio::frac;
    use crate::seeded_rng;
    use std::collections::HashSet;

    /// Plain minimum over every affine function, independent of the Gray walk.
    fn brute_affine_delta(f: &BooleanFunction) -> BigRational {
        let n = f.n();
        let mut best = u64::MAX;
        for a in 0u64..(1 << n) {
            for c in [false, true] {
                let g = BooleanFunction::from_fn(n, |x| ((x & a).count_ones() & 1 == 1) ^ c);
                best = best.min(f.hamming(&g).unwrap());
            }
        }
        frac(best, 1 << n)
    }

    #[test]
    fn contains_examples() {
        let rm13 = RmCode::new(1, 3).unwrap();
        let f = BooleanFunction::var(3, 0).xor(&BooleanFunction::var(3, 2)).unwrap();
        assert!(rm13.contains(&f));
        assert!(!RmCode::new(1, 2).unwrap().contains(&BooleanFunction::from_u64(2, 0b1000)));
        for n in 2..8 {
            for d in 0..n {
                let s = BooleanFunction::symmetric_poly(d + 1, n).unwrap();
                assert!(!RmCode::new(d, n).unwrap().contains(&s));
            }
        }
    }

    #[test]
    fn codeword_enumeration() {
        let rm0: HashSet<_> = RmCode::new(0, 3).unwrap().codewords().unwrap().collect();
        assert_eq!(rm0, HashSet::from([BooleanFunction::zero(3), BooleanFunction::one(3)]));
        assert_eq!(RmCode::new(1, 2).unwrap().codewords().unwrap().count(), 8);
        let rm24 = RmCode::new(2, 4).unwrap();
        assert_eq!(rm24.dim(), 11);
        let all: HashSet<_> = rm24.codewords().unwrap().collect();
        assert_eq!(all.len(), 1 << 11);
        assert!(all.iter().all(|g| g.degree() <= 2));
        let big = RmCode::new(3, 8).unwrap();
        assert!(matches!(big.codewords(), Err(Error::Resource { .. })));
    }

    #[test]
    fn delta_examples() {
        let mut rng = seeded_rng(1);
        let code = RmCode::new(2, 5).unwrap();
        let g = code.random_codeword(&mut rng);
        assert_eq!(delta_exact(&code, &g).unwrap().distance, frac(0, 1));

        let and = BooleanFunction::from_u64(2, 0b1000);
        let rm12 = RmCode::new(1, 2).unwrap();
        assert_eq!(delta_exact(&rm12, &and).unwrap().distance, frac(1, 4));
        assert_eq!(brute_affine_delta(&and), frac(1, 4));

        let maj = BooleanFunction::from_fn(3, |x| x.count_ones() >= 2);
        let rm13 = RmCode::new(1, 3).unwrap();
        assert_eq!(delta_exact(&rm13, &maj).unwrap().distance, frac(1, 4));
        assert_eq!(brute_affine_delta(&maj), frac(1, 4));
    }

    #[test]
    fn nearest_is_lexicographically_smallest() {
        // x1 x2 is at distance 1/4 from 0, x1, x2 and x1 + x2 + 1; index 0 wins
        let and = BooleanFunction::from_u64(2, 0b1000);
        let near = delta_exact(&RmCode::new(1, 2).unwrap(), &and).unwrap();
        assert!(near.codeword.is_zero());

        let mut rng = seeded_rng(2);
        let code = RmCode::new(1, 4).unwrap();
        for _ in 0..50 {
            let f = BooleanFunction::from_fn(4, |_| rng.gen());
            let near = delta_exact(&code, &f).unwrap();
            let first = (0u64..(1 << code.dim()))
                .find(|&i| f.hamming(&code.codeword(i)).unwrap() == near.errors)
                .unwrap();
            assert_eq!(code.codeword(first), near.codeword);
        }
    }

    #[test]
    fn delta_zero_iff_member_exhaustive() {
        for d in [1usize, 2] {
            let code = RmCode::new(d, 4).unwrap();
            for t in 0u64..(1 << 16) {
                let f = BooleanFunction::from_u64(4, t);
                let near = delta_exact(&code, &f).unwrap();
                assert_eq!(near.errors == 0, code.contains(&f));
                assert!(near.distance <= frac(1, 2));
            }
        }
    }

    #[test]
    fn random_affine_delta_matches_brute_force() {
        let mut rng = seeded_rng(3);
        for n in 1..=6 {
            let code = RmCode::new(1, n).unwrap();
            for _ in 0..20 {
                let f = BooleanFunction::from_fn(n, |_| rng.gen());
                assert_eq!(delta_exact(&code, &f).unwrap().distance, brute_affine_delta(&f));
            }
        }
    }

    #[test]
    fn minimum_distance_of_codewords() {
        let code = RmCode::new(1, 3).unwrap();
        let words: Vec<_> = code.codewords().unwrap().collect();
        for (i, g) in words.iter().enumerate() {
            for h in &words[i + 1..] {
                assert!(g.distance(h).unwrap() >= code.min_distance());
            }
        }
        let mut rng = seeded_rng(4);
        let code = RmCode::new(2, 7).unwrap();
        for _ in 0..200 {
            let g = code.random_codeword(&mut rng);
            let h = code.random_codeword(&mut rng);
            if g != h {
                assert!(g.distance(&h).unwrap() >= code.min_distance());
            }
        }
    }

    #[test]
    fn coset_invariance() {
        let mut rng = seeded_rng(5);
        let code = RmCode::new(2, 5).unwrap();
        for _ in 0..20 {
            let f = BooleanFunction::from_fn(5, |_| rng.gen());
            let g = code.random_codeword(&mut rng);
            let a = delta_exact(&code, &f).unwrap().distance;
            let b = delta_exact(&code, &f.xor(&g).unwrap()).unwrap().distance;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn unique_decoding_agrees_with_exhaustive() {
        let mut rng = seeded_rng(6);
        for (d, n) in [(1usize, 5usize), (2, 5), (1, 6), (2, 6), (0, 4), (2, 4)] {
            let code = RmCode::new(d, n).unwrap();
            let radius = 1u64 << (n - d - 1);
            for _ in 0..40 {
                let g = code.random_codeword(&mut rng);
                let e = rng.gen_range(0..radius);
                let mut f = g.clone();
                while f.hamming(&g).unwrap() < e {
                    let p = rng.gen_range(0..(1u64 << n));
                    if f.get(p) == g.get(p) {
                        f = f.flipped(p);
                    }
                }
                let dec = decode_unique(&code, &f).expect("inside radius");
                assert_eq!(dec.codeword, g);
                assert_eq!(dec.codeword, delta_exact(&code, &f).unwrap().codeword);
            }
            // far words are never certified
            for _ in 0..20 {
                let f = BooleanFunction::from_fn(n, |_| rng.gen());
                if let Some(dec) = decode_unique(&code, &f) {
                    assert_eq!(dec.errors, delta_exact(&code, &f).unwrap().errors);
                }
            }
        }
    }

    #[test]
    fn nearest_on_flat_examples() {
        let mut rng = seeded_rng(7);
        let n = 6;
        let d = 1;
        let code = RmCode::new(d, n).unwrap();
        let g = code.random_codeword(&mut rng);
        let plane = Hyperplane::coordinate(n, 0, false).to_flat();
        let (p, dist) = nearest_on_flat(&g, &plane, d).unwrap();
        assert_eq!(p, g.restrict(&plane).unwrap());
        assert_eq!(dist, frac(0, 1));

        let bad = 0b10_1010u64;
        let f = g.flipped(bad);
        for h in Hyperplane::all(n) {
            let flat = h.to_flat();
            let (_, dist) = nearest_on_flat(&f, &flat, d).unwrap();
            let expect = if h.contains(bad) { frac(1, 1 << (n - 1)) } else { frac(0, 1) };
            assert_eq!(dist, expect);
        }
    }

    #[test]
    fn nearest_falls_back_to_decoding() {
        let mut rng = seeded_rng(8);
        let code = RmCode::new(2, 8).unwrap();
        assert!(code.dim() > 28);
        let g = code.random_codeword(&mut rng);
        let f = g.flipped(3).flipped(77).flipped(200);
        let near = nearest(&code, &f).unwrap();
        assert_eq!(near.codeword, g);
        assert_eq!(near.errors, 3);
        assert_eq!(near.certificate, Certificate::UniqueRadius);
        let far = BooleanFunction::symmetric_poly(3, 8).unwrap();
        assert!(matches!(nearest(&code, &far), Err(Error::Resource { .. })));
    }
}
