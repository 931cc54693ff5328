//! Truth-table Boolean functions `F2^n -> F2` and their algebraic normal
//! form.
//!
//! Tables are packed 64 points per word. Point `x` is bit `x % 64` of word
//! `x / 64`, and coordinate `x_i` is bit `i` of `x`. Functions on fewer than
//! six variables use the low `2^n` bits of a single word.

use num_bigint::BigInt;
use num_rational::BigRational;
use std::fmt::Write as _;
use std::sync::OnceLock;

use crate::error::{param, Error, Result};
use crate::f2::{AffineMap, Budget, Flat};

/// Hard ceiling on materialized tables; `Budget::table_vars` is the soft one.
pub const MAX_VARS: usize = 30;

/// Word masks selecting the points whose coordinate `i` is zero, `i < 6`.
pub(crate) const LO: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// Word masks selecting bit positions with a given popcount.
const LAYER: [u64; 7] = layer_masks();

const fn layer_masks() -> [u64; 7] {
    let mut out = [0u64; 7];
    let mut i = 0;
    while i < 64 {
        out[(i as u64).count_ones() as usize] |= 1 << i;
        i += 1;
    }
    out
}

#[inline]
pub(crate) fn word_count(n: usize) -> usize {
    if n <= 6 {
        1
    } else {
        1 << (n - 6)
    }
}

#[inline]
pub(crate) fn table_mask(n: usize) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << n)) - 1
    }
}

/// In-place Möbius transform over the subset lattice. It is an involution,
/// mapping a truth table to its ANF coefficients and back.
pub(crate) fn mobius_in_place(words: &mut [u64], n: usize) {
    for (i, &lo) in LO.iter().enumerate().take(n.min(6)) {
        let s = 1 << i;
        for w in words.iter_mut() {
            *w ^= (*w & lo) << s;
        }
    }
    for i in 6..n {
        let stride = 1usize << (i - 6);
        for j in 0..words.len() {
            if j & stride == 0 {
                words[j | stride] ^= words[j];
            }
        }
    }
}

/// Table of `x -> f(x ^ a)` written into `dst`.
#[inline]
pub(crate) fn translate_into(src: &[u64], a: u64, n: usize, dst: &mut [u64]) {
    let hi = (a >> 6) as usize;
    for (j, d) in dst.iter_mut().enumerate() {
        *d = src[j ^ hi];
    }
    let low = if n >= 6 { a & 63 } else { a & ((1 << n) - 1) };
    for (i, &lo) in LO.iter().enumerate() {
        if (low >> i) & 1 == 1 {
            let s = 1 << i;
            for d in dst.iter_mut() {
                *d = ((*d & lo) << s) | ((*d >> s) & lo);
            }
        }
    }
}

/// Largest popcount among set positions of a packed coefficient vector.
pub(crate) fn max_weight(words: &[u64]) -> i32 {
    let mut best = -1i32;
    for (j, &w) in words.iter().enumerate() {
        if w == 0 {
            continue;
        }
        let hi = j.count_ones() as i32;
        if hi + 6 <= best {
            continue;
        }
        let top = (0..7).rev().find(|&c| w & LAYER[c] != 0).unwrap() as i32;
        best = best.max(hi + top);
    }
    best
}

#[inline]
pub(crate) fn get_bit(words: &[u64], x: u64) -> bool {
    (words[(x >> 6) as usize] >> (x & 63)) & 1 == 1
}

/// A Boolean function given by its full truth table, with a lazily cached
/// ANF.
#[derive(Clone)]
pub struct BooleanFunction {
    n: usize,
    words: Vec<u64>,
    anf: OnceLock<Anf>,
}

impl std::fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BooleanFunction(n={}, {})", self.n, self.to_hex())
    }
}

impl PartialEq for BooleanFunction {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.words == other.words
    }
}

impl Eq for BooleanFunction {}

impl std::hash::Hash for BooleanFunction {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.words.hash(state);
    }
}

impl BooleanFunction {
    fn raw(n: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), word_count(n));
        BooleanFunction {
            n,
            words,
            anf: OnceLock::new(),
        }
    }

    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_VARS, "{n} variables exceeds {MAX_VARS}");
        Self::raw(n, vec![0; word_count(n)])
    }

    pub fn one(n: usize) -> Self {
        let mut words = vec![u64::MAX; word_count(n)];
        words[0] &= table_mask(n);
        Self::raw(n, words)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(u64) -> bool) -> Self {
        let mut out = Self::zero(n);
        for x in 0..(1u64 << n) {
            if f(x) {
                out.words[(x >> 6) as usize] |= 1 << (x & 63);
            }
        }
        out
    }

    /// Table packed in one word, `n <= 6`. Bits past `2^n` are dropped.
    pub fn from_u64(n: usize, table: u64) -> Self {
        assert!(n <= 6);
        Self::raw(n, vec![table & table_mask(n)])
    }

    pub fn from_words(n: usize, words: Vec<u64>) -> Result<Self> {
        if n > MAX_VARS {
            return param(format!("{n} variables exceeds {MAX_VARS}"));
        }
        if words.len() != word_count(n) {
            return param(format!("{} words for a table on {n} variables", words.len()));
        }
        if n < 6 && words[0] & !table_mask(n) != 0 {
            return param("table bits past 2^n are set");
        }
        Ok(Self::raw(n, words))
    }

    /// The coordinate function `x_i`.
    pub fn var(n: usize, i: usize) -> Self {
        assert!(i < n);
        Self::from_fn(n, |x| (x >> i) & 1 == 1)
    }

    /// The monomial `prod_{i in mask} x_i`.
    pub fn monomial(n: usize, mask: u64) -> Self {
        Self::from_fn(n, |x| x & mask == mask)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_points(&self) -> u64 {
        1 << self.n
    }

    #[inline]
    pub fn get(&self, x: u64) -> bool {
        get_bit(&self.words, x)
    }

    pub fn set(&mut self, x: u64, v: bool) {
        assert!(x < self.num_points());
        let w = &mut self.words[(x >> 6) as usize];
        if v {
            *w |= 1 << (x & 63);
        } else {
            *w &= !(1 << (x & 63));
        }
        self.anf = OnceLock::new();
    }

    /// Copy with the value at `x` flipped.
    pub fn flipped(&self, x: u64) -> Self {
        let mut out = Self::raw(self.n, self.words.clone());
        out.set(x, !self.get(x));
        out
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn as_u64(&self) -> u64 {
        assert!(self.n <= 6);
        self.words[0]
    }

    pub fn weight(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor(&self, other: &BooleanFunction) -> Result<BooleanFunction> {
        if self.n != other.n {
            return param(format!("variable counts differ: {} vs {}", self.n, other.n));
        }
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect();
        Ok(Self::raw(self.n, words))
    }

    pub fn complement(&self) -> BooleanFunction {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        words[0] &= table_mask(self.n);
        Self::raw(self.n, words)
    }

    pub fn anf(&self) -> &Anf {
        self.anf.get_or_init(|| Anf::of(self))
    }

    /// ANF degree, `-1` for the zero function.
    pub fn degree(&self) -> i32 {
        self.anf().degree()
    }

    /// `x -> f(x + a)`.
    pub fn translate(&self, a: u64) -> BooleanFunction {
        let mut dst = vec![0; self.words.len()];
        translate_into(&self.words, a, self.n, &mut dst);
        Self::raw(self.n, dst)
    }

    /// Directional derivative `x -> f(x) + f(x + a)`.
    pub fn derivative(&self, a: u64) -> BooleanFunction {
        let mut t = self.translate(a);
        for (d, s) in t.words.iter_mut().zip(&self.words) {
            *d ^= s;
        }
        t
    }

    /// `f|_A` as a function of the flat coordinates, following the flat's
    /// stored basis order.
    pub fn restrict(&self, flat: &Flat) -> Result<BooleanFunction> {
        if flat.ambient() != self.n {
            return param(format!("flat in F2^{} restricts a function on {} variables", flat.ambient(), self.n));
        }
        let pts = flat.points();
        let mut out = Self::zero(flat.dim());
        for (x, &p) in pts.iter().enumerate() {
            if self.get(p) {
                out.words[x >> 6] |= 1 << (x & 63);
            }
        }
        Ok(out)
    }

    /// `x -> f(t(x))`.
    pub fn compose_affine(&self, t: &AffineMap) -> Result<BooleanFunction> {
        if t.dim() != self.n {
            return param("affine map and function dimensions differ");
        }
        Ok(Self::from_fn(self.n, |x| self.get(t.apply(x))))
    }

    /// `f(x_1) + ... + f(x_t)` on `t` disjoint blocks of `n` variables; block
    /// `j` occupies coordinates `j*n .. (j+1)*n`.
    pub fn xor_power(&self, t: usize) -> Result<BooleanFunction> {
        self.xor_power_within(t, &Budget::default())
    }

    pub fn xor_power_within(&self, t: usize, budget: &Budget) -> Result<BooleanFunction> {
        if t == 0 {
            return param("xor power needs t >= 1");
        }
        let vars = t * self.n;
        if vars > budget.table_vars as usize || vars > MAX_VARS {
            return Err(Error::Resource {
                what: "xor power table variables",
                count: vars.to_string(),
                limit: budget.table_vars.to_string(),
                hint: "reduce t or n",
            });
        }
        let n = self.n;
        let block = (1u64 << n) - 1;
        Ok(Self::from_fn(vars, |x| {
            (0..t).fold(false, |acc, j| acc ^ self.get((x >> (j * n)) & block))
        }))
    }

    /// Elementary symmetric polynomial `S_{d,n}`: `x -> C(|x|, d) mod 2`.
    pub fn symmetric_poly(d: usize, n: usize) -> Result<BooleanFunction> {
        if d > n {
            return param(format!("symmetric degree {d} exceeds {n} variables"));
        }
        if n > Budget::default().table_vars as usize {
            return Err(Error::Resource {
                what: "symmetric polynomial table variables",
                count: n.to_string(),
                limit: Budget::default().table_vars.to_string(),
                hint: "evaluate pointwise with symmetric_value",
            });
        }
        Ok(Self::from_fn(n, |x| symmetric_value(d, x)))
    }

    /// Number of points where `self` and `other` differ.
    pub fn hamming(&self, other: &BooleanFunction) -> Result<u64> {
        if self.n != other.n {
            return param(format!("variable counts differ: {} vs {}", self.n, other.n));
        }
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as u64)
            .sum())
    }

    /// `Pr_x[f(x) != g(x)]` as an exact rational.
    pub fn distance(&self, other: &BooleanFunction) -> Result<BigRational> {
        let h = self.hamming(other)?;
        Ok(BigRational::new(BigInt::from(h), BigInt::from(1u8) << self.n))
    }

    /// Hex digits of the table; digit `j` holds points `4j..4j+4` with point
    /// `4j` in its least significant bit.
    pub fn to_hex(&self) -> String {
        let digits = ((1usize << self.n) / 4).max(1);
        let mut s = String::with_capacity(digits);
        for j in 0..digits {
            let w = self.words[j / 16];
            let nib = (w >> ((j % 16) * 4)) & 0xF;
            write!(s, "{nib:x}").unwrap();
        }
        s
    }

    /// Truth-table file contents: `n=<int>` then the hex table, LF endings.
    pub fn to_table_file(&self) -> String {
        format!("n={}\n{}\n", self.n, self.to_hex())
    }

    pub fn parse_table_file(text: &str) -> Result<BooleanFunction> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty file".into()))?;
        let n: usize = header
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header line {header:?}")))?;
        if n > MAX_VARS {
            return Err(Error::Parse(format!("{n} variables exceeds {MAX_VARS}")));
        }
        let hex = lines.next().ok_or_else(|| Error::Parse("missing table line".into()))?;
        if lines.next().is_some() {
            return Err(Error::Parse("trailing content after table".into()));
        }
        Self::from_hex(n, hex)
    }

    pub fn from_hex(n: usize, hex: &str) -> Result<BooleanFunction> {
        let digits = ((1usize << n) / 4).max(1);
        if hex.len() != digits {
            return Err(Error::Parse(format!("expected {digits} hex digits for n={n}, found {}", hex.len())));
        }
        let mut out = Self::zero(n);
        for (j, c) in hex.chars().enumerate() {
            let nib = c
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit {c:?}")))? as u64;
            out.words[j / 16] |= nib << ((j % 16) * 4);
        }
        if out.words[0] & !table_mask(n) != 0 {
            return Err(Error::Parse(format!("table sets points beyond 2^{n}")));
        }
        Ok(out)
    }
}

/// `S_{d,n}(x)` without materializing a table (Lucas: `C(w, d)` is odd iff
/// the bits of `d` are a subset of the bits of `w`).
#[inline]
pub fn symmetric_value(d: usize, x: u64) -> bool {
    let w = x.count_ones() as usize;
    w & d == d
}

/// Multilinear coefficients of a Boolean function: bit `S` is the
/// coefficient of `prod_{i in S} x_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Anf {
    n: usize,
    coeffs: Vec<u64>,
    degree: i32,
}

impl Anf {
    pub fn of(f: &BooleanFunction) -> Anf {
        let mut coeffs = f.words.clone();
        mobius_in_place(&mut coeffs, f.n);
        let degree = max_weight(&coeffs);
        Anf { n: f.n, coeffs, degree }
    }

    pub fn from_monomials(n: usize, masks: &[u64]) -> Anf {
        let mut coeffs = vec![0u64; word_count(n)];
        for &m in masks {
            assert!(m < (1 << n));
            coeffs[(m >> 6) as usize] ^= 1 << (m & 63);
        }
        let degree = max_weight(&coeffs);
        Anf { n, coeffs, degree }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn coeff(&self, mask: u64) -> bool {
        get_bit(&self.coeffs, mask)
    }

    pub fn coeff_words(&self) -> &[u64] {
        &self.coeffs
    }

    /// Set monomial masks in ascending order.
    pub fn monomials(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for (j, &w) in self.coeffs.iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                out.push(((j as u64) << 6) | bits.trailing_zeros() as u64);
                bits &= bits - 1;
            }
        }
        out
    }

    pub fn to_function(&self) -> BooleanFunction {
        let mut words = self.coeffs.clone();
        mobius_in_place(&mut words, self.n);
        BooleanFunction::raw(self.n, words)
    }
}

/// Free-function spelling of [`BooleanFunction::anf`].
pub fn anf_of(f: &BooleanFunction) -> Anf {
    Anf::of(f)
}

pub fn distance(f: &BooleanFunction, g: &BooleanFunction) -> Result<BigRational> {
    f.distance(g)
}
