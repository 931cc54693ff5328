//! Linear algebra over F2: bit vectors, matrices, flats, hyperplanes and
//! affine maps.
//!
//! Vectors are packed into a single `u64`, so the ambient dimension is at
//! most [`MAX_DIM`]. Coordinate `i` lives in bit `i`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::Rng;
use std::ops::BitXor;

use crate::error::{param, Error, Result};

pub const MAX_DIM: usize = 64;

#[inline]
pub(crate) fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

#[inline]
pub(crate) fn parity(x: u64) -> bool {
    x.count_ones() & 1 == 1
}

/// Limits that keep the exact computations at desk scale.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Maximum number of flats an exact enumeration may visit.
    pub flats: u64,
    /// Maximum code dimension for exhaustive codeword search.
    pub codeword_dim: u32,
    /// Maximum number of variables of a materialized truth table.
    pub table_vars: u32,
    /// Maximum number of direction tuples for exact Gowers sums.
    pub tuples: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            flats: 1 << 28,
            codeword_dim: 28,
            table_vars: 26,
            tuples: 1 << 28,
        }
    }
}

/// A vector of F2^len packed into one machine word.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct F2Vec {
    bits: u64,
    len: usize,
}

impl F2Vec {
    pub fn zero(len: usize) -> Self {
        assert!(len <= MAX_DIM, "dimension {len} exceeds {MAX_DIM}");
        F2Vec { bits: 0, len }
    }

    /// Bits at positions `len..` are discarded.
    pub fn from_bits(bits: u64, len: usize) -> Self {
        assert!(len <= MAX_DIM, "dimension {len} exceeds {MAX_DIM}");
        F2Vec {
            bits: bits & low_mask(len),
            len,
        }
    }

    pub fn unit(i: usize, len: usize) -> Self {
        assert!(i < len);
        F2Vec::from_bits(1 << i, len)
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn len(self) -> usize {
        self.len
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(self, i: usize) -> bool {
        (self.bits >> i) & 1 == 1
    }

    pub fn with(self, i: usize, v: bool) -> Self {
        assert!(i < self.len);
        let bits = if v {
            self.bits | (1 << i)
        } else {
            self.bits & !(1 << i)
        };
        F2Vec { bits, len: self.len }
    }

    pub fn weight(self) -> u32 {
        self.bits.count_ones()
    }

    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    /// Inner product over F2.
    #[inline]
    pub fn dot(self, other: F2Vec) -> bool {
        parity(self.bits & other.bits)
    }
}

impl BitXor for F2Vec {
    type Output = F2Vec;

    fn bitxor(self, rhs: F2Vec) -> F2Vec {
        debug_assert_eq!(self.len, rhs.len);
        F2Vec {
            bits: self.bits ^ rhs.bits,
            len: self.len,
        }
    }
}

/// Dense matrix over F2 with rows packed as words.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct F2Mat {
    rows: Vec<u64>,
    ncols: usize,
}

impl F2Mat {
    pub fn new(rows: &[F2Vec], ncols: usize) -> Result<Self> {
        if ncols > MAX_DIM {
            return param(format!("{ncols} columns exceeds {MAX_DIM}"));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != ncols) {
            return param(format!("row of length {} in a matrix with {ncols} columns", r.len()));
        }
        Ok(F2Mat {
            rows: rows.iter().map(|r| r.bits()).collect(),
            ncols,
        })
    }

    /// Bits beyond `ncols` are discarded.
    pub fn from_rows(rows: Vec<u64>, ncols: usize) -> Self {
        assert!(ncols <= MAX_DIM);
        let m = low_mask(ncols);
        F2Mat {
            rows: rows.into_iter().map(|r| r & m).collect(),
            ncols,
        }
    }

    pub fn zero(nrows: usize, ncols: usize) -> Self {
        F2Mat::from_rows(vec![0; nrows], ncols)
    }

    pub fn identity(n: usize) -> Self {
        F2Mat::from_rows((0..n).map(|i| 1u64 << i).collect(), n)
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> F2Vec {
        F2Vec::from_bits(self.rows[i], self.ncols)
    }

    #[inline]
    pub fn row_bits(&self) -> &[u64] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }

    pub fn rank(&self) -> usize {
        self.rref().0.len()
    }

    /// Reduced row echelon form. The pivot of a row is its lowest set bit;
    /// rows are sorted by pivot and every pivot column is zero in all other
    /// rows. Zero rows are dropped. Returns the rows and their pivots.
    pub fn rref(&self) -> (Vec<u64>, Vec<usize>) {
        let mut work = self.rows.clone();
        let mut out = 0usize;
        let mut pivots = Vec::new();
        for col in 0..self.ncols {
            let bit = 1u64 << col;
            let Some(r) = (out..work.len()).find(|&r| work[r] & bit != 0) else {
                continue;
            };
            work.swap(out, r);
            let pivot_row = work[out];
            for (idx, row) in work.iter_mut().enumerate() {
                if idx != out && *row & bit != 0 {
                    *row ^= pivot_row;
                }
            }
            pivots.push(col);
            out += 1;
            if out == work.len() {
                break;
            }
        }
        work.truncate(out);
        (work, pivots)
    }

    pub fn transpose(&self) -> F2Mat {
        let mut rows = vec![0u64; self.ncols];
        for (i, &r) in self.rows.iter().enumerate() {
            let mut bits = r;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                rows[j] |= 1 << i;
                bits &= bits - 1;
            }
        }
        F2Mat::from_rows(rows, self.rows.len())
    }

    /// `self · other^T`, entry `(i, j)` is the inner product of row `i` of
    /// `self` with row `j` of `other`.
    pub fn mul_transpose(&self, other: &F2Mat) -> F2Mat {
        assert_eq!(self.ncols, other.ncols);
        let rows = self
            .rows
            .iter()
            .map(|&a| {
                other
                    .rows
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (j, &b)| acc | ((parity(a & b) as u64) << j))
            })
            .collect();
        F2Mat::from_rows(rows, other.rows.len())
    }

    /// Ordinary product `self · other`.
    pub fn mul(&self, other: &F2Mat) -> F2Mat {
        assert_eq!(self.ncols, other.nrows());
        let rows = self.rows.iter().map(|&a| other.combination(a)).collect();
        F2Mat::from_rows(rows, other.ncols)
    }

    /// Sum of the rows selected by the bits of `x`.
    #[inline]
    pub fn combination(&self, x: u64) -> u64 {
        let mut acc = 0;
        let mut bits = x;
        while bits != 0 {
            acc ^= self.rows[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        acc
    }

    /// Finds `x` with `combination(x) == target`, if one exists.
    pub fn solve_left(&self, target: u64) -> Option<u64> {
        assert!(self.rows.len() <= 64);
        let mut work: Vec<(u64, u64)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, &r)| (r, 1u64 << i))
            .collect();
        let mut out = 0usize;
        let mut t = (target, 0u64);
        for col in 0..self.ncols {
            let bit = 1u64 << col;
            let Some(r) = (out..work.len()).find(|&r| work[r].0 & bit != 0) else {
                continue;
            };
            work.swap(out, r);
            let p = work[out];
            for row in work.iter_mut().skip(out + 1) {
                if row.0 & bit != 0 {
                    row.0 ^= p.0;
                    row.1 ^= p.1;
                }
            }
            if t.0 & bit != 0 {
                t.0 ^= p.0;
                t.1 ^= p.1;
            }
            out += 1;
        }
        (t.0 == 0).then_some(t.1)
    }

    pub fn is_symmetric(&self) -> bool {
        self.nrows() == self.ncols && *self == self.transpose()
    }
}

pub fn rank(m: &F2Mat) -> usize {
    m.rank()
}

/// Gaussian binomial coefficient `[n choose k]_2`: the number of
/// k-dimensional linear subspaces of F2^n.
pub fn count_subspaces(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let one = BigUint::one();
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= (&one << (n - i)) - &one;
        den *= (&one << (k - i)) - &one;
    }
    num / den
}

/// Number of k-flats of F2^n, `2^(n-k) [n choose k]_2`.
pub fn count_flats(n: usize, k: usize) -> Result<BigUint> {
    if k > n {
        return param(format!("flat dimension {k} exceeds ambient dimension {n}"));
    }
    Ok(count_subspaces(n, k) << (n - k))
}

pub(crate) fn check_flat_budget(n: usize, k: usize, budget: &Budget) -> Result<BigUint> {
    if n > MAX_DIM {
        return param(format!("ambient dimension {n} exceeds {MAX_DIM}"));
    }
    let count = count_flats(n, k)?;
    if count.to_u64().is_none_or(|c| c > budget.flats) {
        return Err(Error::Resource {
            what: "number of flats",
            count: count.to_string(),
            limit: budget.flats.to_string(),
            hint: "use a Monte-Carlo estimate instead",
        });
    }
    Ok(count)
}

/// All k-dimensional linear subspaces of F2^n as RREF bases, sorted
/// lexicographically by their row sequence.
pub fn linear_subspaces(n: usize, k: usize) -> Result<Vec<F2Mat>> {
    linear_subspaces_within(n, k, &Budget::default())
}

pub fn linear_subspaces_within(n: usize, k: usize, budget: &Budget) -> Result<Vec<F2Mat>> {
    check_flat_budget(n, k, budget)?;
    let mut out: Vec<Vec<u64>> = Vec::new();
    let mut pivots = Vec::with_capacity(k);
    gen_pivot_sets(n, k, 0, &mut pivots, &mut out);
    out.sort();
    Ok(out.into_iter().map(|rows| F2Mat::from_rows(rows, n)).collect())
}

fn gen_pivot_sets(n: usize, k: usize, start: usize, pivots: &mut Vec<usize>, out: &mut Vec<Vec<u64>>) {
    if pivots.len() == k {
        let pivot_mask: u64 = pivots.iter().map(|&p| 1u64 << p).sum();
        // free positions of each row: non-pivot columns above its pivot
        let free: Vec<Vec<usize>> = pivots
            .iter()
            .map(|&p| ((p + 1)..n).filter(|&j| pivot_mask & (1 << j) == 0).collect())
            .collect();
        let total: usize = free.iter().map(Vec::len).sum();
        for assignment in 0u64..(1u64 << total) {
            let mut shift = 0;
            let rows = pivots
                .iter()
                .zip(&free)
                .map(|(&p, cols)| {
                    let mut row = 1u64 << p;
                    for (t, &c) in cols.iter().enumerate() {
                        if (assignment >> (shift + t)) & 1 == 1 {
                            row |= 1 << c;
                        }
                    }
                    shift += cols.len();
                    row
                })
                .collect();
            out.push(rows);
        }
        return;
    }
    let remaining = k - pivots.len();
    for p in start..=(n - remaining) {
        pivots.push(p);
        gen_pivot_sets(n, k, p + 1, pivots, out);
        pivots.pop();
    }
}

/// A k-dimensional affine subspace `{base + x^T basis : x in F2^k}`.
///
/// Point `x` of the flat (an index in `0..2^k`) is `base` plus the basis rows
/// selected by the bits of `x`, in stored basis order.
#[derive(Clone, Debug)]
pub struct Flat {
    basis: F2Mat,
    base: F2Vec,
}

impl Flat {
    pub fn new(basis: F2Mat, base: F2Vec) -> Result<Self> {
        if basis.ncols() != base.len() {
            return param("basis and base point live in different dimensions");
        }
        if basis.rank() != basis.nrows() {
            return param("flat basis is not of full row rank");
        }
        Ok(Flat { basis, base })
    }

    pub(crate) fn from_parts(basis: F2Mat, base: F2Vec) -> Self {
        debug_assert_eq!(basis.rank(), basis.nrows());
        Flat { basis, base }
    }

    pub fn whole_space(n: usize) -> Self {
        Flat::from_parts(F2Mat::identity(n), F2Vec::zero(n))
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn ambient(&self) -> usize {
        self.base.len()
    }

    pub fn basis(&self) -> &F2Mat {
        &self.basis
    }

    pub fn base(&self) -> F2Vec {
        self.base
    }

    #[inline]
    pub fn point(&self, x: u64) -> u64 {
        self.base.bits() ^ self.basis.combination(x)
    }

    /// All `2^k` points, indexed by flat coordinates.
    pub fn points(&self) -> Vec<u64> {
        let k = self.dim();
        let mut pts = vec![0u64; 1 << k];
        pts[0] = self.base.bits();
        for (i, &row) in self.basis.row_bits().iter().enumerate() {
            let half = 1usize << i;
            for x in 0..half {
                pts[x | half] = pts[x] ^ row;
            }
        }
        pts
    }

    /// Reduced row echelon basis with the base point reduced modulo the
    /// row space. Two flats are equal as point sets iff their canonical
    /// forms are identical.
    pub fn canonical(&self) -> Flat {
        let (rows, pivots) = self.basis.rref();
        let mut base = self.base.bits();
        for (&row, &p) in rows.iter().zip(&pivots) {
            if base & (1 << p) != 0 {
                base ^= row;
            }
        }
        Flat {
            basis: F2Mat::from_rows(rows, self.ambient()),
            base: F2Vec::from_bits(base, self.ambient()),
        }
    }

    /// `(basis rows, base)` of the canonical form; the enumeration order key.
    pub fn canonical_key(&self) -> (Vec<u64>, u64) {
        let c = self.canonical();
        (c.basis.rows, c.base.bits())
    }

    pub fn contains(&self, p: u64) -> bool {
        self.locate(p).is_some()
    }

    /// Flat coordinates of `p`, if `p` lies on the flat.
    pub fn locate(&self, p: u64) -> Option<u64> {
        self.basis.solve_left(p ^ self.base.bits())
    }
}

impl PartialEq for Flat {
    fn eq(&self, other: &Flat) -> bool {
        self.ambient() == other.ambient() && self.canonical_key() == other.canonical_key()
    }
}

impl Eq for Flat {}

/// Streams every k-flat once, ordered by canonical form: direction spaces
/// in lexicographic RREF order, then reduced base points ascending.
pub struct FlatIter {
    n: usize,
    subspaces: std::vec::IntoIter<F2Mat>,
    current: Option<(F2Mat, u64)>,
    next_base: Option<u64>,
}

impl Iterator for FlatIter {
    type Item = Flat;

    fn next(&mut self) -> Option<Flat> {
        loop {
            if let (Some((basis, free)), Some(b)) = (&self.current, self.next_base) {
                let following = ((b | !free).wrapping_add(1)) & free;
                self.next_base = (following != 0).then_some(following);
                return Some(Flat::from_parts(basis.clone(), F2Vec::from_bits(b, self.n)));
            }
            let basis = self.subspaces.next()?;
            let pivots: u64 = basis.row_bits().iter().map(|r| 1u64 << r.trailing_zeros()).sum();
            let free = low_mask(self.n) & !pivots;
            self.current = Some((basis, free));
            self.next_base = Some(0);
        }
    }
}

pub fn enumerate_flats(n: usize, k: usize) -> Result<FlatIter> {
    enumerate_flats_within(n, k, &Budget::default())
}

pub fn enumerate_flats_within(n: usize, k: usize, budget: &Budget) -> Result<FlatIter> {
    let subspaces = linear_subspaces_within(n, k, budget)?;
    Ok(FlatIter {
        n,
        subspaces: subspaces.into_iter(),
        current: None,
        next_base: None,
    })
}

/// Uniform random k-flat: a uniform full-rank `k x n` basis (by rejection)
/// and a uniform base point. Every flat has the same number of such
/// representations, so the induced distribution on flats is uniform.
pub fn sample_flat<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Flat> {
    if k > n {
        return param(format!("flat dimension {k} exceeds ambient dimension {n}"));
    }
    if n > MAX_DIM {
        return param(format!("ambient dimension {n} exceeds {MAX_DIM}"));
    }
    let mask = low_mask(n);
    loop {
        let rows: Vec<u64> = (0..k).map(|_| rng.gen::<u64>() & mask).collect();
        let basis = F2Mat::from_rows(rows, n);
        if basis.rank() == k {
            let base = F2Vec::from_bits(rng.gen::<u64>(), n);
            return Ok(Flat { basis, base });
        }
    }
}

/// Uniform full-rank `k x n` matrix.
pub fn sample_full_rank<R: Rng + ?Sized>(k: usize, n: usize, rng: &mut R) -> F2Mat {
    assert!(k <= n && n <= MAX_DIM);
    let mask = low_mask(n);
    loop {
        let m = F2Mat::from_rows((0..k).map(|_| rng.gen::<u64>() & mask).collect(), n);
        if m.rank() == k {
            return m;
        }
    }
}

/// The hyperplane `{x : <linear, x> = offset}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Hyperplane {
    linear: F2Vec,
    offset: bool,
}

impl Hyperplane {
    pub fn new(linear: F2Vec, offset: bool) -> Result<Self> {
        if linear.is_zero() {
            return param("hyperplane with zero linear part");
        }
        Ok(Hyperplane { linear, offset })
    }

    /// `x_i = b`.
    pub fn coordinate(n: usize, i: usize, b: bool) -> Self {
        Hyperplane {
            linear: F2Vec::unit(i, n),
            offset: b,
        }
    }

    pub fn linear(&self) -> F2Vec {
        self.linear
    }

    pub fn offset(&self) -> bool {
        self.offset
    }

    pub fn ambient(&self) -> usize {
        self.linear.len()
    }

    #[inline]
    pub fn contains(&self, p: u64) -> bool {
        parity(self.linear.bits() & p) == self.offset
    }

    pub fn complement(&self) -> Hyperplane {
        Hyperplane {
            linear: self.linear,
            offset: !self.offset,
        }
    }

    pub fn is_complementary(&self, other: &Hyperplane) -> bool {
        self.linear == other.linear && self.offset != other.offset
    }

    /// The hyperplane as an (n-1)-flat in canonical form. Witness
    /// polynomials on the hyperplane are indexed by this flat's coordinates.
    pub fn to_flat(&self) -> Flat {
        let n = self.ambient();
        let l = self.linear.bits();
        let p = l.trailing_zeros() as usize;
        let rows = (0..n)
            .filter(|&j| j != p)
            .map(|j| (1u64 << j) | if (l >> j) & 1 == 1 { 1 << p } else { 0 })
            .collect();
        let base = if self.offset { 1u64 << p } else { 0 };
        Flat::from_parts(F2Mat::from_rows(rows, n), F2Vec::from_bits(base, n)).canonical()
    }

    /// All `2^(n+1) - 2` hyperplanes, by linear part then offset.
    pub fn all(n: usize) -> Vec<Hyperplane> {
        assert!(n >= 1 && n < MAX_DIM);
        (1u64..(1 << n))
            .flat_map(|l| {
                [false, true].map(|b| Hyperplane {
                    linear: F2Vec::from_bits(l, n),
                    offset: b,
                })
            })
            .collect()
    }
}

/// Greedy selection: walk `hs` in order, keeping each hyperplane whose linear
/// part is independent of those kept so far, until `want` are found.
pub fn independent_hyperplanes(hs: &[Hyperplane], want: usize) -> Result<Vec<usize>> {
    let mut reduced: Vec<u64> = Vec::new();
    let mut picked = Vec::new();
    for (idx, h) in hs.iter().enumerate() {
        if picked.len() == want {
            break;
        }
        let mut v = h.linear.bits();
        for &r in &reduced {
            if v & (1 << r.trailing_zeros()) != 0 {
                v ^= r;
            }
        }
        if v != 0 {
            // keep `reduced` with distinct lowest-bit pivots
            let piv = 1u64 << v.trailing_zeros();
            for r in reduced.iter_mut() {
                if *r & piv != 0 {
                    *r ^= v;
                }
            }
            reduced.push(v);
            picked.push(idx);
        }
    }
    if picked.len() < want {
        return Err(Error::Invariant(format!(
            "only {} independent hyperplanes among {} distinct ones",
            picked.len(),
            hs.len()
        )));
    }
    Ok(picked)
}

/// Invertible-or-not affine map `p -> A p + c` on F2^n. Row `i` of `A` is the
/// linear functional producing output coordinate `i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AffineMap {
    linear: F2Mat,
    offset: F2Vec,
}

impl AffineMap {
    pub fn new(linear: F2Mat, offset: F2Vec) -> Result<Self> {
        if linear.nrows() != linear.ncols() || linear.ncols() != offset.len() {
            return param("affine map must be square and match its offset");
        }
        Ok(AffineMap { linear, offset })
    }

    pub fn identity(n: usize) -> Self {
        AffineMap {
            linear: F2Mat::identity(n),
            offset: F2Vec::zero(n),
        }
    }

    /// Coordinate permutation sending output `i` to input `perm[i]`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        AffineMap {
            linear: F2Mat::from_rows(perm.iter().map(|&j| 1u64 << j).collect(), n),
            offset: F2Vec::zero(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn linear(&self) -> &F2Mat {
        &self.linear
    }

    pub fn offset(&self) -> F2Vec {
        self.offset
    }

    #[inline]
    pub fn apply(&self, p: u64) -> u64 {
        let mut out = self.offset.bits();
        for (i, &row) in self.linear.row_bits().iter().enumerate() {
            out ^= (parity(row & p) as u64) << i;
        }
        out
    }

    pub fn is_invertible(&self) -> bool {
        self.linear.rank() == self.dim()
    }

    pub fn inverse(&self) -> Result<AffineMap> {
        let n = self.dim();
        let mut a = self.linear.row_bits().to_vec();
        let mut aug: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
        for col in 0..n {
            let bit = 1u64 << col;
            let Some(r) = (col..n).find(|&r| a[r] & bit != 0) else {
                return param("affine map is not invertible");
            };
            a.swap(col, r);
            aug.swap(col, r);
            for i in 0..n {
                if i != col && a[i] & bit != 0 {
                    a[i] ^= a[col];
                    aug[i] ^= aug[col];
                }
            }
        }
        let inv = F2Mat::from_rows(aug, n);
        let shift = inv_apply(&inv, self.offset.bits());
        Ok(AffineMap {
            linear: inv,
            offset: F2Vec::from_bits(shift, n),
        })
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        assert_eq!(self.dim(), inner.dim());
        let n = self.dim();
        let linear = self.linear.mul(&inner.linear);
        let offset = self.apply(inner.offset.bits());
        AffineMap {
            linear,
            offset: F2Vec::from_bits(offset, n),
        }
    }
}

fn inv_apply(m: &F2Mat, p: u64) -> u64 {
    m.row_bits()
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &row)| acc | ((parity(row & p) as u64) << i))
}

/// Invertible affine `T` with `T(A_i) = {x : x_i = 0}` for each input
/// hyperplane `A_i`. Coordinates past the hyperplanes are completed with
/// unit vectors in ascending order.
pub fn normalize_to_coordinates(hs: &[Hyperplane]) -> Result<AffineMap> {
    let Some(first) = hs.first() else {
        return param("no hyperplanes to normalize");
    };
    let n = first.ambient();
    if hs.iter().any(|h| h.ambient() != n) {
        return param("hyperplanes live in different dimensions");
    }
    let mut rows: Vec<u64> = hs.iter().map(|h| h.linear.bits()).collect();
    if F2Mat::from_rows(rows.clone(), n).rank() != rows.len() {
        return param("hyperplane linear parts are dependent");
    }
    let mut offset: u64 = hs
        .iter()
        .enumerate()
        .map(|(i, h)| (h.offset as u64) << i)
        .sum();
    for j in 0..n {
        if rows.len() == n {
            break;
        }
        rows.push(1 << j);
        if F2Mat::from_rows(rows.clone(), n).rank() != rows.len() {
            rows.pop();
        }
    }
    offset &= low_mask(n);
    Ok(AffineMap {
        linear: F2Mat::from_rows(rows, n),
        offset: F2Vec::from_bits(offset, n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;
    use std::collections::{HashMap, HashSet};

    fn mat(rows: &[u64], ncols: usize) -> F2Mat {
        F2Mat::from_rows(rows.to_vec(), ncols)
    }

    /// Distinct point sets of all (M, b) pairs, independent of the RREF code.
    fn brute_flat_sets(n: usize, k: usize) -> HashSet<Vec<u64>> {
        let mut out = HashSet::new();
        let total_rows = 1u64 << (n * k);
        for code in 0..total_rows {
            let rows: Vec<u64> = (0..k).map(|i| (code >> (i * n)) & low_mask(n)).collect();
            let m = mat(&rows, n);
            if m.rank() != k {
                continue;
            }
            for b in 0..(1u64 << n) {
                let mut pts = Flat::from_parts(m.clone(), F2Vec::from_bits(b, n)).points();
                pts.sort();
                out.insert(pts);
            }
        }
        out
    }

    #[test]
    fn rank_examples() {
        assert_eq!(F2Mat::identity(3).rank(), 3);
        assert_eq!(F2Mat::zero(2, 4).rank(), 0);
        // rows 110, 011, 101 written with x1 as the leftmost character
        assert_eq!(mat(&[0b011, 0b110, 0b101], 3).rank(), 2);
    }

    #[test]
    fn count_flats_examples() {
        assert_eq!(count_flats(3, 2).unwrap(), BigUint::from(14u32));
        assert_eq!(count_flats(5, 5).unwrap(), BigUint::from(1u32));
        assert_eq!(count_flats(4, 2).unwrap(), BigUint::from(140u32));
        assert_eq!(brute_flat_sets(4, 2).len(), 140);
        assert!(matches!(count_flats(2, 3), Err(Error::Parameter(_))));
        for n in 1..8 {
            assert_eq!(count_flats(n, n - 1).unwrap(), BigUint::from((1u64 << (n + 1)) - 2));
        }
    }

    #[test]
    fn enumeration_examples() {
        let all: Vec<Flat> = enumerate_flats(2, 2).unwrap().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0], Flat::whole_space(2));
        assert_eq!(enumerate_flats(3, 2).unwrap().count(), 14);

        let lines: Vec<Flat> = enumerate_flats(4, 1).unwrap().collect();
        assert_eq!(lines.len(), 8 * 15);
        let sets: HashSet<Vec<u64>> = lines
            .iter()
            .map(|f| {
                let mut p = f.points();
                p.sort();
                p
            })
            .collect();
        assert_eq!(sets, brute_flat_sets(4, 1));
    }

    #[test]
    fn enumeration_is_canonical_sorted_and_complete() {
        for n in 0..=6 {
            for k in 0..=n {
                let flats: Vec<Flat> = enumerate_flats(n, k).unwrap().collect();
                assert_eq!(BigUint::from(flats.len()), count_flats(n, k).unwrap(), "n={n} k={k}");
                let keys: Vec<_> = flats.iter().map(Flat::canonical_key).collect();
                for (f, key) in flats.iter().zip(&keys) {
                    assert_eq!((f.basis.rows.clone(), f.base.bits()), *key);
                }
                assert!(keys.windows(2).all(|w| w[0] < w[1]), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn enumeration_budget() {
        let tiny = Budget { flats: 100, ..Budget::default() };
        let err = enumerate_flats_within(4, 2, &tiny).err().unwrap();
        match err {
            Error::Resource { count, .. } => assert_eq!(count, "140"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sample_flat_is_uniform_and_deterministic() {
        let all: Vec<Flat> = enumerate_flats(3, 2).unwrap().collect();
        let index: HashMap<_, _> = all.iter().enumerate().map(|(i, f)| (f.canonical_key(), i)).collect();
        let mut counts = vec![0u32; all.len()];
        let mut rng = seeded_rng(7);
        for _ in 0..14_000 {
            let f = sample_flat(3, 2, &mut rng).unwrap();
            assert_eq!(f.basis().rank(), 2);
            counts[index[&f.canonical_key()]] += 1;
        }
        let tol = 5.0 * 1000f64.sqrt();
        for c in counts {
            assert!((c as f64 - 1000.0).abs() <= tol, "count {c}");
        }

        let a = sample_flat(9, 4, &mut seeded_rng(99)).unwrap();
        let b = sample_flat(9, 4, &mut seeded_rng(99)).unwrap();
        assert_eq!(a.canonical_key(), b.canonical_key());
        assert_eq!(a.basis(), b.basis());

        let whole = sample_flat(4, 4, &mut rng).unwrap();
        assert_eq!(whole, Flat::whole_space(4));
    }

    #[test]
    fn flat_points_are_distinct_and_locatable() {
        let mut rng = seeded_rng(3);
        for _ in 0..50 {
            let f = sample_flat(8, 3, &mut rng).unwrap();
            let pts = f.points();
            let set: HashSet<_> = pts.iter().copied().collect();
            assert_eq!(set.len(), 8);
            for (x, &p) in pts.iter().enumerate() {
                assert_eq!(f.locate(p), Some(x as u64));
            }
            let c = f.canonical();
            assert!(pts.iter().all(|&p| c.contains(p)));
        }
    }

    #[test]
    fn independent_hyperplane_examples() {
        let n = 3;
        let coords: Vec<_> = (0..3).map(|i| Hyperplane::coordinate(n, i, false)).collect();
        assert_eq!(independent_hyperplanes(&coords, 3).unwrap(), vec![0, 1, 2]);

        let hs = [
            Hyperplane::coordinate(n, 0, false),
            Hyperplane::coordinate(n, 0, true),
            Hyperplane::new(F2Vec::from_bits(0b011, n), false).unwrap(),
        ];
        assert_eq!(independent_hyperplanes(&hs, 2).unwrap(), vec![0, 2]);

        // seven distinct planes that share as few directions as possible
        let hs: Vec<_> = Hyperplane::all(5).into_iter().take(7).collect();
        assert_eq!(independent_hyperplanes(&hs, 3).unwrap().len(), 3);
        let parallel = [Hyperplane::coordinate(n, 0, false), Hyperplane::coordinate(n, 0, true)];
        assert!(matches!(independent_hyperplanes(&parallel, 2), Err(Error::Invariant(_))));
    }

    #[test]
    fn normalize_examples() {
        let n = 4;
        let coords: Vec<_> = (0..2).map(|i| Hyperplane::coordinate(n, i, false)).collect();
        assert_eq!(normalize_to_coordinates(&coords).unwrap(), AffineMap::identity(n));

        let h = Hyperplane::new(F2Vec::from_bits(0b11, 2), false).unwrap();
        let t = normalize_to_coordinates(&[h]).unwrap();
        assert!(t.is_invertible());
        for p in 0..4u64 {
            assert_eq!(h.contains(p), t.apply(p) & 1 == 0);
        }

        let dep = [
            Hyperplane::coordinate(n, 0, false),
            Hyperplane::coordinate(n, 0, true),
        ];
        assert!(matches!(normalize_to_coordinates(&dep), Err(Error::Parameter(_))));
    }

    #[test]
    fn affine_inverse_and_compose() {
        let mut rng = seeded_rng(11);
        for _ in 0..20 {
            let m = sample_full_rank(6, 6, &mut rng);
            let t = AffineMap::new(m, F2Vec::from_bits(rng.gen(), 6)).unwrap();
            let inv = t.inverse().unwrap();
            for p in 0..64u64 {
                assert_eq!(inv.apply(t.apply(p)), p);
            }
            assert_eq!(t.compose(&inv), AffineMap::identity(6));
        }
    }

    #[test]
    fn matrix_products() {
        let a = mat(&[0b101, 0b011], 3);
        let g = a.mul_transpose(&a);
        assert_eq!(g.row_bits(), &[0b10, 0b01]);
        assert!(g.is_symmetric());
        assert_eq!(a.mul(&a.transpose()), g);
        assert_eq!(a.solve_left(0b110), Some(0b11));
        assert_eq!(a.solve_left(0b100), None);
    }

    #[test]
    fn subspaces_count_matches_gaussian_binomial() {
        for n in 0..8 {
            for k in 0..=n {
                let subs = linear_subspaces(n, k).unwrap();
                assert_eq!(BigUint::from(subs.len()), count_subspaces(n, k));
            }
        }
    }
}
