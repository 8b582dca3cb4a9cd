//! Exact graded polynomial arithmetic over the rationals and per-degree
//! linear algebra.
//!
//! Everything downstream (section solves, minimal free covers, duality)
//! reduces to row operations on matrices whose entries come from homogeneous
//! slices of a polynomial ring `S = Q[x_1, ..., x_n]` with the grading
//! doubled: every variable has degree 2. Scalars are arbitrary-precision
//! rationals; there is no floating point anywhere in this crate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Exact rational scalar used throughout the crate.
pub type Q = BigRational;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_ratio(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("odd degree has empty basis by convention violation: degree {0}")]
    OddDegree(i64),
    #[error("zero linear form")]
    ZeroLinearForm,
    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),
    #[error("ring must have at least one variable")]
    EmptyRing,
    #[error("not a subspace")]
    NotASubspace,
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
}

/// The graded polynomial ring `S = Sym(V)` with `deg V = 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyRing {
    names: Vec<String>,
}

impl PolyRing {
    pub fn new(names: Vec<String>) -> Result<Self, PolyError> {
        if names.is_empty() {
            return Err(PolyError::EmptyRing);
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(PolyError::DuplicateName(a.clone()));
            }
        }
        Ok(PolyRing { names })
    }

    /// Ring with variables named after the simple coroots `a1, ..., an`.
    pub fn coroot_ring(rank: usize) -> Self {
        PolyRing::new((1..=rank).map(|i| format!("a{i}")).collect()).unwrap()
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// All monomials of ring degree `d` (so total exponent `d/2`), in
    /// lexicographic order on exponent vectors, largest first. The order is
    /// deterministic across runs; for `n = 2, d = 4` it is `x^2, xy, y^2`.
    pub fn graded_component_basis(&self, d: i64) -> Result<Vec<Vec<u32>>, PolyError> {
        if d % 2 != 0 || d < 0 {
            return Err(PolyError::OddDegree(d));
        }
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.rank()];
        enumerate_exponents(&mut out, &mut cur, 0, (d / 2) as u32, self.rank(), None);
        Ok(out)
    }

    /// Monomial basis of the degree-`d` slice of `S/(l)` for a linear form
    /// with pivot variable `pivot`: monomials of degree `d` avoiding `pivot`.
    pub fn quotient_component_basis(&self, d: i64, pivot: usize) -> Result<Vec<Vec<u32>>, PolyError> {
        if d % 2 != 0 || d < 0 {
            return Err(PolyError::OddDegree(d));
        }
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.rank()];
        enumerate_exponents(&mut out, &mut cur, 0, (d / 2) as u32, self.rank(), Some(pivot));
        Ok(out)
    }

    pub fn slice_dim(&self, d: i64) -> usize {
        if d < 0 || d % 2 != 0 {
            0
        } else {
            self.graded_component_basis(d).map(|b| b.len()).unwrap_or(0)
        }
    }

    pub fn quotient_slice_dim(&self, d: i64, pivot: usize) -> usize {
        if d < 0 || d % 2 != 0 {
            0
        } else {
            self.quotient_component_basis(d, pivot).map(|b| b.len()).unwrap_or(0)
        }
    }

    pub fn var(&self, i: usize) -> Polynomial {
        let mut e = vec![0u32; self.rank()];
        e[i] = 1;
        Polynomial::from_terms(vec![(e, Q::one())])
    }
}

fn enumerate_exponents(
    out: &mut Vec<Vec<u32>>,
    cur: &mut Vec<u32>,
    pos: usize,
    remaining: u32,
    n: usize,
    skip: Option<usize>,
) {
    if pos == n {
        if remaining == 0 {
            out.push(cur.clone());
        }
        return;
    }
    let max = if Some(pos) == skip { 0 } else { remaining };
    // descending first exponent gives lex-largest monomial first
    for e in (0..=max).rev() {
        cur[pos] = e;
        enumerate_exponents(out, cur, pos + 1, remaining - e, n, skip);
    }
    cur[pos] = 0;
}

/// A polynomial with exact rational coefficients. Zero coefficients are
/// never stored. The monomial degree of an exponent vector `e` is
/// `2 * sum(e)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Vec<u32>, Q>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Q) -> Self {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial::from_terms(vec![(vec![0u32; n], c)])
    }

    pub fn one(n: usize) -> Self {
        Polynomial::constant(n, Q::one())
    }

    pub fn from_terms(terms: Vec<(Vec<u32>, Q)>) -> Self {
        let mut p = Polynomial::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Q)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut r = self.clone();
        for (e, c) in other.terms.iter() {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let mut r = self.clone();
        for (e, c) in other.terms.iter() {
            r.add_term(e.clone(), -c.clone());
        }
        r
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, c: &Q) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut r = Polynomial::zero();
        for (e1, c1) in self.terms.iter() {
            for (e2, c2) in other.terms.iter() {
                let e: Vec<u32> = e1.iter().zip(e2.iter()).map(|(a, b)| a + b).collect();
                r.add_term(e, c1 * c2);
            }
        }
        r
    }

    pub fn mul_monomial(&self, m: &[u32]) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(m.iter()).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    /// Ring degree of the polynomial (doubled grading), `None` for zero.
    pub fn degree(&self) -> Option<i64> {
        self.terms
            .keys()
            .map(|e| 2 * e.iter().map(|&x| x as i64).sum::<i64>())
            .max()
    }

    /// `Some(d)` if every monomial has ring degree `d`.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|e| 2 * e.iter().map(|&x| x as i64).sum::<i64>());
        let first = it.next()?;
        if it.all(|d| d == first) {
            Some(first)
        } else {
            None
        }
    }

    pub fn coefficient(&self, e: &[u32]) -> Q {
        self.terms.get(e).cloned().unwrap_or_else(Q::zero)
    }

    /// Coordinates of a homogeneous polynomial over a monomial basis.
    pub fn coords(&self, basis: &[Vec<u32>]) -> Vec<Q> {
        basis.iter().map(|m| self.coefficient(m)).collect()
    }

    pub fn from_coords(basis: &[Vec<u32>], coords: &[Q]) -> Polynomial {
        let mut p = Polynomial::zero();
        for (m, c) in basis.iter().zip(coords.iter()) {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    pub fn render(&self, ring: &PolyRing) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        // largest monomial first
        for (e, c) in self.terms.iter().rev() {
            let mut vars = String::new();
            for (i, &x) in e.iter().enumerate() {
                if x == 1 {
                    vars.push_str(&format!("{}", ring.names[i]));
                } else if x > 1 {
                    vars.push_str(&format!("{}^{}", ring.names[i], x));
                }
            }
            let s = if vars.is_empty() {
                format!("{c}")
            } else if c.is_one() {
                vars
            } else if (-c.clone()).is_one() {
                format!("-{vars}")
            } else {
                format!("{c}*{vars}")
            };
            parts.push(s);
        }
        parts.join(" + ")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| format!("{c}*{e:?}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A nonzero homogeneous degree-2 element of `S`, e.g. an edge label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm {
    coeffs: Vec<BigInt>,
}

impl LinearForm {
    /// Build from rational coefficients; the stored form is normalized to a
    /// primitive integer vector whose first nonzero entry is positive
    /// (labels are lines, so this makes equality canonical).
    pub fn new(coeffs: Vec<Q>) -> Result<Self, PolyError> {
        if coeffs.iter().all(|c| c.is_zero()) {
            return Err(PolyError::ZeroLinearForm);
        }
        // clear denominators
        let mut lcm = BigInt::one();
        for c in &coeffs {
            lcm = num_integer::lcm(lcm, c.denom().clone());
        }
        let mut ints: Vec<BigInt> = coeffs.iter().map(|c| c.numer() * &lcm / c.denom()).collect();
        let mut g = BigInt::zero();
        for v in &ints {
            g = num_integer::gcd(g, v.abs());
        }
        for v in ints.iter_mut() {
            *v = &*v / &g;
        }
        if let Some(first) = ints.iter().find(|v| !v.is_zero()) {
            if first.is_negative() {
                for v in ints.iter_mut() {
                    *v = -&*v;
                }
            }
        }
        Ok(LinearForm { coeffs: ints })
    }

    pub fn from_ints(coeffs: Vec<i64>) -> Result<Self, PolyError> {
        LinearForm::new(coeffs.into_iter().map(q_int).collect())
    }

    pub fn coeffs(&self) -> Vec<Q> {
        self.coeffs.iter().map(|c| Q::from_integer(c.clone())).collect()
    }

    pub fn int_coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    /// Smallest-index variable with nonzero coefficient.
    pub fn pivot(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap()
    }

    pub fn to_polynomial(&self) -> Polynomial {
        let n = self.coeffs.len();
        let mut p = Polynomial::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            let mut e = vec![0u32; n];
            e[i] = 1;
            p.add_term(e, Q::from_integer(c.clone()));
        }
        p
    }

    /// True if the two forms span the same line (after normalization this is
    /// plain equality).
    pub fn same_line(&self, other: &LinearForm) -> bool {
        self == other
    }
}

/// Canonical representative of `p` modulo the principal ideal `(l)`: the
/// pivot variable of `l` is eliminated by substitution. The result is an
/// S-algebra map modulo `(l)` and contains no occurrence of the pivot.
pub fn reduce_mod_linear(p: &Polynomial, l: &LinearForm) -> Polynomial {
    let piv = l.pivot();
    let coeffs = l.coeffs();
    let n = l.rank();
    // x_piv = -(1/c_piv) * sum_{j != piv} c_j x_j
    let mut subst = Polynomial::zero();
    for j in 0..n {
        if j == piv || coeffs[j].is_zero() {
            continue;
        }
        let mut e = vec![0u32; n];
        e[j] = 1;
        subst.add_term(e, -&coeffs[j] / &coeffs[piv]);
    }
    let mut powers: Vec<Polynomial> = vec![Polynomial::one(n)];
    let mut result = Polynomial::zero();
    for (e, c) in p.terms() {
        let k = e[piv] as usize;
        while powers.len() <= k {
            let last = powers.last().unwrap();
            powers.push(last.mul(&subst));
        }
        let mut rest = e.clone();
        rest[piv] = 0;
        let contrib = powers[k].mul_monomial(&rest).scale(c);
        result = result.add(&contrib);
    }
    result
}

/// Dense matrix over the rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<Q>>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![vec![Q::zero(); cols]; rows],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Q>>, cols: usize) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        RationalMatrix { rows: rows.len(), cols, data: rows }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i][j] = v;
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i]
    }

    pub fn rank(&self) -> usize {
        let mut space = RowSpace::new(self.cols);
        for r in &self.data {
            space.insert(r.clone());
        }
        space.rank()
    }

    /// Basis of the null space with deterministic (lexicographic column)
    /// pivot order; each basis vector has a 1 in its free column.
    pub fn kernel_basis(&self) -> Vec<Vec<Q>> {
        let mut space = RowSpace::new(self.cols);
        for r in &self.data {
            space.insert(r.clone());
        }
        space.kernel_basis()
    }
}

/// Incremental reduced row echelon accumulator. Rows are kept fully
/// reduced; pivot columns are strictly increasing row to row.
#[derive(Debug, Clone)]
pub struct RowSpace {
    cols: usize,
    rows: Vec<Vec<Q>>,
    pivots: Vec<usize>,
}

impl RowSpace {
    pub fn new(cols: usize) -> Self {
        RowSpace { cols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rows(&self) -> &[Vec<Q>] {
        &self.rows
    }

    /// Reduce `v` against the current rows.
    pub fn reduce(&self, mut v: Vec<Q>) -> Vec<Q> {
        for (row, &p) in self.rows.iter().zip(self.pivots.iter()) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                for j in p..self.cols {
                    if !row[j].is_zero() {
                        let t = &row[j] * &f;
                        v[j] -= t;
                    }
                }
            }
        }
        v
    }

    /// Insert a vector; returns true when it enlarged the span.
    pub fn insert(&mut self, v: Vec<Q>) -> bool {
        let mut v = self.reduce(v);
        let Some(p) = v.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        let inv = v[p].recip();
        for c in v.iter_mut() {
            if !c.is_zero() {
                *c *= &inv;
            }
        }
        // back-eliminate column p from existing rows
        for (row, _) in self.rows.iter_mut().zip(self.pivots.iter()) {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for j in 0..self.cols {
                    if !v[j].is_zero() {
                        let t = &v[j] * &f;
                        row[j] -= t;
                    }
                }
            }
        }
        let idx = self.pivots.iter().position(|&q| q > p).unwrap_or(self.rows.len());
        self.rows.insert(idx, v);
        self.pivots.insert(idx, p);
        true
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.reduce(v.to_vec()).iter().all(|c| c.is_zero())
    }

    /// Kernel of the matrix whose rows were inserted, as reduced column
    /// relations: one basis vector per free column, in column order.
    pub fn kernel_basis(&self) -> Vec<Vec<Q>> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for f in 0..self.cols {
            if is_pivot[f] {
                continue;
            }
            let mut v = vec![Q::zero(); self.cols];
            v[f] = Q::one();
            for (row, &p) in self.rows.iter().zip(self.pivots.iter()) {
                if !row[f].is_zero() {
                    v[p] = -row[f].clone();
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Express `v` as a combination of the vectors previously passed to
    /// `insert_tracked`. Only valid on a `TrackedRowSpace`.
    pub fn is_full(&self) -> bool {
        self.rank() == self.cols
    }
}

/// Row space that remembers how each echelon row was obtained from the
/// inserted generators, so membership certificates (coordinates in the
/// generators) can be read off.
#[derive(Debug, Clone)]
pub struct TrackedRowSpace {
    cols: usize,
    n_inserted: usize,
    rows: Vec<Vec<Q>>,
    combos: Vec<Vec<Q>>,
    pivots: Vec<usize>,
}

impl TrackedRowSpace {
    pub fn new(cols: usize) -> Self {
        TrackedRowSpace {
            cols,
            n_inserted: 0,
            rows: Vec::new(),
            combos: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce_with_combo(&self, mut v: Vec<Q>, mut combo: Vec<Q>) -> (Vec<Q>, Vec<Q>) {
        for ((row, rc), &p) in self.rows.iter().zip(self.combos.iter()).zip(self.pivots.iter()) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                for j in p..self.cols {
                    if !row[j].is_zero() {
                        let t = &row[j] * &f;
                        v[j] -= t;
                    }
                }
                for j in 0..rc.len() {
                    if !rc[j].is_zero() {
                        let t = &rc[j] * &f;
                        combo[j] -= t;
                    }
                }
            }
        }
        (v, combo)
    }

    /// Insert generator number `self.n_inserted`; returns true if new.
    pub fn insert(&mut self, v: Vec<Q>) -> bool {
        let mut combo = vec![Q::zero(); self.n_inserted + 1];
        combo[self.n_inserted] = Q::one();
        self.n_inserted += 1;
        for c in self.combos.iter_mut() {
            c.resize(self.n_inserted, Q::zero());
        }
        let (mut v, mut combo) = self.reduce_with_combo(v, combo);
        let Some(p) = v.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        let inv = v[p].recip();
        for c in v.iter_mut() {
            if !c.is_zero() {
                *c *= &inv;
            }
        }
        for c in combo.iter_mut() {
            if !c.is_zero() {
                *c *= &inv;
            }
        }
        for (row, rc) in self.rows.iter_mut().zip(self.combos.iter_mut()) {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for j in 0..self.cols {
                    if !v[j].is_zero() {
                        let t = &v[j] * &f;
                        row[j] -= t;
                    }
                }
                for j in 0..combo.len() {
                    if !combo[j].is_zero() {
                        let t = &combo[j] * &f;
                        rc[j] -= t;
                    }
                }
            }
        }
        let idx = self.pivots.iter().position(|&q| q > p).unwrap_or(self.rows.len());
        self.rows.insert(idx, v);
        self.combos.insert(idx, combo);
        self.pivots.insert(idx, p);
        true
    }

    /// Coordinates of `v` over the inserted generators, if `v` lies in the
    /// span.
    pub fn express(&self, v: &[Q]) -> Option<Vec<Q>> {
        let combo = vec![Q::zero(); self.n_inserted];
        let (rem, combo) = self.reduce_with_combo(v.to_vec(), combo);
        if rem.iter().all(|c| c.is_zero()) {
            Some(combo.iter().map(|c| -c.clone()).collect())
        } else {
            None
        }
    }
}

/// Deterministic complement of `sub` inside `span`: returns vectors from
/// `span` (in their given order) that together with `sub` span `span`.
/// Errors if `sub` is not contained in the span of `span`.
pub fn image_complement(span: &[Vec<Q>], sub: &[Vec<Q>], cols: usize) -> Result<Vec<Vec<Q>>, PolyError> {
    let mut span_space = RowSpace::new(cols);
    for v in span {
        if v.len() != cols {
            return Err(PolyError::DimMismatch(format!("expected {cols} columns, got {}", v.len())));
        }
        span_space.insert(v.clone());
    }
    let mut space = RowSpace::new(cols);
    for v in sub {
        if v.len() != cols {
            return Err(PolyError::DimMismatch(format!("expected {cols} columns, got {}", v.len())));
        }
        if !span_space.contains(v) {
            return Err(PolyError::NotASubspace);
        }
        space.insert(v.clone());
    }
    let mut complement = Vec::new();
    for v in span {
        if space.insert(v.clone()) {
            complement.push(v.clone());
        }
    }
    Ok(complement)
}

/// Rank computations modulo a word-size prime; used as a fast verified
/// path for surjectivity checks (a mod-p rank is a lower bound for the
/// rational rank). `None` signals a coefficient not liftable mod p, in
/// which case callers fall back to exact arithmetic.
pub const MODP: u64 = 2_147_483_647; // 2^31 - 1

pub fn q_mod_p(c: &Q) -> Option<u64> {
    let p = BigInt::from(MODP);
    let num = ((c.numer() % &p) + &p) % &p;
    let den = ((c.denom() % &p) + &p) % &p;
    let den_u = den.to_string().parse::<u64>().ok()?;
    if den_u == 0 {
        return None;
    }
    let num_u = num.to_string().parse::<u64>().ok()?;
    Some(mulmod(num_u, pow_mod(den_u, MODP - 2)))
}

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODP as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b);
        }
        b = mulmod(b, b);
        e >>= 1;
    }
    acc
}

/// Row echelon rank over GF(p) with rows given as dense `u64` vectors.
pub struct ModRowSpace {
    cols: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl ModRowSpace {
    pub fn new(cols: usize) -> Self {
        ModRowSpace { cols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn insert(&mut self, mut v: Vec<u64>) -> bool {
        for (row, &p) in self.rows.iter().zip(self.pivots.iter()) {
            if v[p] != 0 {
                let f = v[p];
                for j in p..self.cols {
                    if row[j] != 0 {
                        let t = mulmod(row[j], f);
                        v[j] = (v[j] + MODP - t) % MODP;
                    }
                }
            }
        }
        let Some(p) = v.iter().position(|&c| c != 0) else {
            return false;
        };
        let inv = pow_mod(v[p], MODP - 2);
        for c in v.iter_mut().skip(p) {
            if *c != 0 {
                *c = mulmod(*c, inv);
            }
        }
        let idx = self.pivots.iter().position(|&q| q > p).unwrap_or(self.rows.len());
        self.rows.insert(idx, v);
        self.pivots.insert(idx, p);
        true
    }
}
