//! Exact scalars, formal linear combinations, free modules and linear maps.
//!
//! Everything downstream works with [`Comb`], a sparse formal combination
//! keyed by basis indices (or tuples of indices for tensors). Linear solving
//! is done by incremental reduced row echelon form over fields and by column
//! Hermite reduction over the integers.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::Error;

/// Coefficient ring descriptor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    Q,
    Z,
    Fp(u64),
}

impl Ring {
    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, v: i64) -> Scalar {
        match self {
            Ring::Q => Scalar::Q(BigRational::from_integer(BigInt::from(v))),
            Ring::Z => Scalar::Z(BigInt::from(v)),
            Ring::Fp(p) => Scalar::Fp { v: v.rem_euclid(p as i64) as u64, p },
        }
    }

    pub fn is_field(self) -> bool {
        !matches!(self, Ring::Z)
    }

    /// Parses `Q`, `Z`, `F7` or `Fp(7)`.
    pub fn parse(s: &str) -> Result<Ring, Error> {
        let t = s.trim();
        match t {
            "Q" | "q" => return Ok(Ring::Q),
            "Z" | "z" => return Ok(Ring::Z),
            _ => {}
        }
        let digits = t
            .strip_prefix("Fp(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| t.strip_prefix('F'));
        match digits.and_then(|d| d.parse::<u64>().ok()) {
            Some(p) if is_prime(p) => Ok(Ring::Fp(p)),
            _ => Err(Error::Parse(format!("unknown ring {s:?}"))),
        }
    }

    /// A small random element, used by randomized fixtures.
    pub fn random_small<R: Rng>(self, rng: &mut R, bound: i64) -> Scalar {
        self.from_i64(rng.gen_range(-bound..=bound))
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Q => write!(f, "Q"),
            Ring::Z => write!(f, "Z"),
            Ring::Fp(p) => write!(f, "F{p}"),
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact scalar. Rationals are kept in lowest terms by `BigRational`,
/// residues in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    Z(BigInt),
    Fp { v: u64, p: u64 },
}

impl Scalar {
    pub fn ring(&self) -> Ring {
        match self {
            Scalar::Q(_) => Ring::Q,
            Scalar::Z(_) => Ring::Z,
            Scalar::Fp { p, .. } => Ring::Fp(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(x) => x.is_zero(),
            Scalar::Z(x) => x.is_zero(),
            Scalar::Fp { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(x) => x.is_one(),
            Scalar::Z(x) => x.is_one(),
            Scalar::Fp { v, .. } => *v == 1,
        }
    }

    /// Multiplicative inverse if it exists in the ring.
    pub fn inv(&self) -> Option<Scalar> {
        match self {
            Scalar::Q(x) if !x.is_zero() => Some(Scalar::Q(x.recip())),
            Scalar::Z(x) if x.abs().is_one() => Some(Scalar::Z(x.clone())),
            Scalar::Fp { v, p } if *v != 0 => Some(Scalar::Fp { v: pow_mod(*v, p - 2, *p), p: *p }),
            _ => None,
        }
    }

    /// Exact quotient `self / other`, if defined in the ring.
    pub fn div_exact(&self, other: &Scalar) -> Option<Scalar> {
        match (self, other) {
            (Scalar::Z(a), Scalar::Z(b)) => {
                if b.is_zero() {
                    return None;
                }
                let (q, r) = a.div_rem(b);
                r.is_zero().then_some(Scalar::Z(q))
            }
            _ => other.inv().map(|i| self * &i),
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Scalar::Q(x) if x.is_integer() => x.to_integer().to_i64(),
            Scalar::Q(_) => None,
            Scalar::Z(x) => x.to_i64(),
            Scalar::Fp { v, .. } => Some(*v as i64),
        }
    }

    /// Parses the textual forms produced by `Display`: `3/4`, `-2`, `5 mod 7`.
    pub fn parse(s: &str, ring: Ring) -> Result<Scalar, Error> {
        let bad = || Error::Parse(format!("bad scalar {s:?} for ring {ring}"));
        let t = s.trim();
        match ring {
            Ring::Q => {
                let (n, d) = match t.split_once('/') {
                    Some((n, d)) => (n.trim(), d.trim()),
                    None => (t, "1"),
                };
                let n: BigInt = n.parse().map_err(|_| bad())?;
                let d: BigInt = d.parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(Scalar::Q(BigRational::new(n, d)))
            }
            Ring::Z => Ok(Scalar::Z(t.parse().map_err(|_| bad())?)),
            Ring::Fp(p) => {
                let (v, q) = match t.split_once("mod") {
                    Some((v, q)) => (v.trim(), Some(q.trim())),
                    None => (t, None),
                };
                if let Some(q) = q {
                    if q.parse::<u64>().ok() != Some(p) {
                        return Err(bad());
                    }
                }
                let v: i64 = v.parse().map_err(|_| bad())?;
                Ok(ring.from_i64(v))
            }
        }
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u128;
    let mut bb = b as u128 % p as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * bb % p as u128;
        }
        bb = bb * bb % p as u128;
        e >>= 1;
    }
    b = r as u64;
    b
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(x) => {
                if x.is_integer() {
                    write!(f, "{}", x.numer())
                } else {
                    write!(f, "{}/{}", x.numer(), x.denom())
                }
            }
            Scalar::Z(x) => write!(f, "{x}"),
            Scalar::Fp { v, p } => write!(f, "{v} mod {p}"),
        }
    }
}

fn mismatch(a: &Scalar, b: &Scalar) -> ! {
    panic!("scalar ring mismatch: {} vs {}", a.ring(), b.ring())
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Z(a), Scalar::Z(b)) => Scalar::Z(a + b),
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, p: q }) if p == q => {
                Scalar::Fp { v: ((*a as u128 + *b as u128) % *p as u128) as u64, p: *p }
            }
            _ => mismatch(self, o),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self + &(-o)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Z(a), Scalar::Z(b)) => Scalar::Z(a * b),
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, p: q }) if p == q => {
                Scalar::Fp { v: ((*a as u128 * *b as u128) % *p as u128) as u64, p: *p }
            }
            _ => mismatch(self, o),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::Z(a) => Scalar::Z(-a),
            Scalar::Fp { v, p } => Scalar::Fp { v: (p - v) % p, p: *p },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        &self + &o
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        &self - &o
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        &self * &o
    }
}

/// `(-1)^e` in the given ring.
pub fn sign(ring: Ring, e: usize) -> Scalar {
    if e % 2 == 0 {
        ring.one()
    } else {
        ring.from_i64(-1)
    }
}

/// A finite formal linear combination of keys. Zero coefficients are never stored,
/// so structural equality is equality of vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Comb<K: Ord> {
    terms: BTreeMap<K, Scalar>,
}

impl<K: Ord> Default for Comb<K> {
    fn default() -> Self {
        Comb { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> Comb<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(k: K, c: Scalar) -> Self {
        let mut r = Self::zero();
        r.add_term(k, c);
        r
    }

    pub fn basis(k: K, ring: Ring) -> Self {
        Self::term(k, ring.one())
    }

    pub fn add_term(&mut self, k: K, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(v) => {
                let s = &*v + &c;
                if s.is_zero() {
                    self.terms.remove(&k);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Comb<K>, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v * c);
        }
    }

    pub fn add_assign(&mut self, other: &Comb<K>) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v.clone());
        }
    }

    pub fn sub_assign(&mut self, other: &Comb<K>) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), -v);
        }
    }

    pub fn plus(&self, other: &Comb<K>) -> Comb<K> {
        let mut r = self.clone();
        r.add_assign(other);
        r
    }

    pub fn minus(&self, other: &Comb<K>) -> Comb<K> {
        let mut r = self.clone();
        r.sub_assign(other);
        r
    }

    pub fn scaled(&self, c: &Scalar) -> Comb<K> {
        let mut r = Comb::zero();
        r.add_scaled(self, c);
        r
    }

    pub fn negated(&self) -> Comb<K> {
        Comb { terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, k: &K) -> Option<&Scalar> {
        self.terms.get(k)
    }

    pub fn coeff(&self, k: &K, ring: Ring) -> Scalar {
        self.terms.get(k).cloned().unwrap_or_else(|| ring.zero())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Scalar)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn first(&self) -> Option<(&K, &Scalar)> {
        self.terms.iter().next()
    }

    /// Extends `f` linearly.
    pub fn bind<L: Ord + Clone>(&self, mut f: impl FnMut(&K) -> Comb<L>) -> Comb<L> {
        let mut r = Comb::zero();
        for (k, v) in &self.terms {
            r.add_scaled(&f(k), v);
        }
        r
    }

    pub fn map_keys<L: Ord + Clone>(&self, mut f: impl FnMut(&K) -> L) -> Comb<L> {
        let mut r = Comb::zero();
        for (k, v) in &self.terms {
            r.add_term(f(k), v.clone());
        }
        r
    }

    pub fn retain(&mut self, mut f: impl FnMut(&K) -> bool) {
        self.terms.retain(|k, _| f(k));
    }
}

impl<K: Ord + Clone> FromIterator<(K, Scalar)> for Comb<K> {
    fn from_iter<T: IntoIterator<Item = (K, Scalar)>>(it: T) -> Self {
        let mut r = Comb::zero();
        for (k, v) in it {
            r.add_term(k, v);
        }
        r
    }
}

impl<K: Ord + Clone + fmt::Debug> fmt::Display for Comb<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(k, v)| format!("{v}*{k:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Tensor of two combinations, keys concatenated.
pub fn tensor_combs(a: &Comb<Vec<usize>>, b: &Comb<Vec<usize>>) -> Comb<Vec<usize>> {
    let mut r = Comb::zero();
    for (x, u) in a.iter() {
        for (y, v) in b.iter() {
            let mut k = x.clone();
            k.extend_from_slice(y);
            r.add_term(k, u * v);
        }
    }
    r
}

/// A finitely generated free module with named basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeModule {
    pub ring: Ring,
    pub basis: Arc<Vec<String>>,
}

impl FreeModule {
    pub fn new(ring: Ring, basis: Vec<String>) -> Result<Self, Error> {
        let mut seen = std::collections::BTreeSet::new();
        for b in &basis {
            if !seen.insert(b) {
                return Err(Error::Contract(format!("duplicate basis label {b}")));
            }
        }
        Ok(FreeModule { ring, basis: Arc::new(basis) })
    }

    pub fn zero(ring: Ring) -> Self {
        FreeModule { ring, basis: Arc::new(Vec::new()) }
    }

    /// Rank n module with labels `e0..e{n-1}`.
    pub fn standard(ring: Ring, n: usize) -> Self {
        FreeModule { ring, basis: Arc::new((0..n).map(|i| format!("e{i}")).collect()) }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.basis.iter().position(|b| b == label)
    }

    /// Tensor module, basis `(x,y)` in left-factor-major order.
    pub fn tensor(&self, other: &FreeModule) -> FreeModule {
        let mut basis = Vec::with_capacity(self.rank() * other.rank());
        for x in self.basis.iter() {
            for y in other.basis.iter() {
                basis.push(format!("({x},{y})"));
            }
        }
        FreeModule { ring: self.ring, basis: Arc::new(basis) }
    }

    pub fn direct_sum(parts: &[(String, FreeModule)], ring: Ring) -> FreeModule {
        let mut basis = Vec::new();
        for (tag, m) in parts {
            for b in m.basis.iter() {
                basis.push(format!("{tag}:{b}"));
            }
        }
        FreeModule { ring, basis: Arc::new(basis) }
    }
}

/// A linear map stored by sparse columns; `cols[j]` is the image of basis vector `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap {
    pub domain: FreeModule,
    pub codomain: FreeModule,
    pub cols: Vec<Comb<usize>>,
}

impl LinearMap {
    pub fn from_cols(domain: FreeModule, codomain: FreeModule, cols: Vec<Comb<usize>>) -> Result<Self, Error> {
        if cols.len() != domain.rank() {
            return Err(Error::Contract(format!(
                "{} columns for domain of rank {}",
                cols.len(),
                domain.rank()
            )));
        }
        for c in &cols {
            if c.keys().any(|&i| i >= codomain.rank()) {
                return Err(Error::Contract("column entry outside codomain".into()));
            }
        }
        Ok(LinearMap { domain, codomain, cols })
    }

    /// Builds a map from a dense row-major matrix (codomain rank x domain rank).
    pub fn from_matrix(domain: FreeModule, codomain: FreeModule, rows: &[Vec<Scalar>]) -> Result<Self, Error> {
        if rows.len() != codomain.rank() || rows.iter().any(|r| r.len() != domain.rank()) {
            return Err(Error::Contract("matrix shape does not match ranks".into()));
        }
        let mut cols = vec![Comb::zero(); domain.rank()];
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                cols[j].add_term(i, v.clone());
            }
        }
        Ok(LinearMap { domain, codomain, cols })
    }

    pub fn from_ints(rows: &[&[i64]], ring: Ring) -> Self {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        let dense: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|&v| ring.from_i64(v)).collect()).collect();
        Self::from_matrix(FreeModule::standard(ring, n), FreeModule::standard(ring, m), &dense).expect("shape")
    }

    pub fn identity(m: &FreeModule) -> Self {
        let cols = (0..m.rank()).map(|i| Comb::basis(i, m.ring)).collect();
        LinearMap { domain: m.clone(), codomain: m.clone(), cols }
    }

    pub fn zero(domain: FreeModule, codomain: FreeModule) -> Self {
        let cols = vec![Comb::zero(); domain.rank()];
        LinearMap { domain, codomain, cols }
    }

    pub fn ring(&self) -> Ring {
        self.domain.ring
    }

    pub fn matrix(&self) -> Vec<Vec<Scalar>> {
        let ring = self.ring();
        let mut rows = vec![vec![ring.zero(); self.domain.rank()]; self.codomain.rank()];
        for (j, c) in self.cols.iter().enumerate() {
            for (&i, v) in c.iter() {
                rows[i][j] = v.clone();
            }
        }
        rows
    }

    pub fn apply(&self, v: &Comb<usize>) -> Comb<usize> {
        v.bind(|&j| self.cols[j].clone())
    }

    pub fn apply_dense(&self, v: &[Scalar]) -> Vec<Scalar> {
        let comb: Comb<usize> = v.iter().cloned().enumerate().collect();
        to_dense(&self.apply(&comb), self.codomain.rank(), self.ring())
    }

    /// `self ∘ other`; the intermediate module must agree basis for basis.
    pub fn compose(&self, other: &LinearMap) -> Result<LinearMap, Error> {
        if other.codomain != self.domain {
            return Err(Error::Contract("composition through mismatched modules".into()));
        }
        let cols = other.cols.iter().map(|c| self.apply(c)).collect();
        Ok(LinearMap { domain: other.domain.clone(), codomain: self.codomain.clone(), cols })
    }

    pub fn add(&self, other: &LinearMap) -> Result<LinearMap, Error> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(Error::Contract("sum of maps with different types".into()));
        }
        let cols = self.cols.iter().zip(&other.cols).map(|(a, b)| a.plus(b)).collect();
        Ok(LinearMap { domain: self.domain.clone(), codomain: self.codomain.clone(), cols })
    }

    pub fn rows(&self) -> Vec<Comb<usize>> {
        transpose(&self.cols, self.codomain.rank())
    }

    pub fn rank(&self) -> usize {
        if self.ring().is_field() {
            Echelon::from_rows(self.domain.rank(), self.rows()).rank()
        } else {
            hermite_columns(&self.matrix(), self.domain.rank(), Ring::Z).rank
        }
    }
}

pub fn to_dense(v: &Comb<usize>, n: usize, ring: Ring) -> Vec<Scalar> {
    let mut r = vec![ring.zero(); n];
    for (&i, c) in v.iter() {
        r[i] = c.clone();
    }
    r
}

/// Transposes sparse columns into sparse rows.
pub fn transpose(cols: &[Comb<usize>], nrows: usize) -> Vec<Comb<usize>> {
    let mut rows = vec![Comb::zero(); nrows];
    for (j, c) in cols.iter().enumerate() {
        for (&i, v) in c.iter() {
            rows[i].add_term(j, v.clone());
        }
    }
    rows
}

/// Kronecker product; basis of the tensor modules is left-factor-major.
pub fn tensor_map(f: &LinearMap, g: &LinearMap) -> LinearMap {
    let gr = g.codomain.rank();
    let gd = g.domain.rank();
    let mut cols = Vec::with_capacity(f.domain.rank() * gd);
    for fc in &f.cols {
        for gc in &g.cols {
            let mut c = Comb::zero();
            for (&i, u) in fc.iter() {
                for (&k, v) in gc.iter() {
                    c.add_term(i * gr + k, u * v);
                }
            }
            cols.push(c);
        }
    }
    LinearMap { domain: f.domain.tensor(&g.domain), codomain: f.codomain.tensor(&g.codomain), cols }
}

/// Reduced row echelon form over a field, built incrementally. Pivots are the
/// leftmost nonzero entries, so the form is the canonical RREF of the row space.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub ncols: usize,
    rows: BTreeMap<usize, Comb<usize>>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, rows: BTreeMap::new() }
    }

    pub fn from_rows(ncols: usize, rows: impl IntoIterator<Item = Comb<usize>>) -> Self {
        let mut e = Echelon::new(ncols);
        for r in rows {
            e.insert(r);
        }
        e
    }

    /// Eliminates every pivot column from `v`.
    pub fn reduce(&self, v: &Comb<usize>) -> Comb<usize> {
        let mut r = v.clone();
        let hits: Vec<usize> = r.keys().filter(|k| self.rows.contains_key(k)).cloned().collect();
        for p in hits {
            if let Some(c) = r.get(&p).cloned() {
                r.add_scaled(&self.rows[&p], &(-&c));
            }
        }
        r
    }

    /// Adds a row; returns whether it enlarged the row space.
    pub fn insert(&mut self, row: Comb<usize>) -> bool {
        let r = self.reduce(&row);
        let Some((&p, c)) = r.first() else {
            return false;
        };
        let inv = c.inv().expect("echelon over a field");
        let r = r.scaled(&inv);
        for other in self.rows.values_mut() {
            if let Some(c) = other.get(&p).cloned() {
                other.add_scaled(&r, &(-&c));
            }
        }
        self.rows.insert(p, r);
        true
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.keys().cloned().collect()
    }

    pub fn row(&self, pivot: usize) -> Option<&Comb<usize>> {
        self.rows.get(&pivot)
    }

    pub fn is_pivot(&self, c: usize) -> bool {
        self.rows.contains_key(&c)
    }

    pub fn contains(&self, v: &Comb<usize>) -> bool {
        self.reduce(v).is_zero()
    }

    /// Non-pivot columns in increasing order.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|c| !self.rows.contains_key(c)).collect()
    }

    /// Basis of the null space of the row system: one vector per free column,
    /// with 1 at that column and 0 at the other free columns.
    pub fn kernel(&self) -> Vec<Comb<usize>> {
        let ring = self.rows.values().next().and_then(|r| r.first()).map(|(_, c)| c.ring());
        self.free_columns()
            .into_iter()
            .map(|f| {
                let ring = ring.unwrap_or(Ring::Q);
                let mut v = Comb::basis(f, ring);
                for (&p, row) in &self.rows {
                    if let Some(c) = row.get(&f) {
                        v.add_term(p, -c);
                    }
                }
                v
            })
            .collect()
    }
}

/// Kernel basis over a field with explicit ring (needed when the matrix is zero).
pub fn kernel_rows(ncols: usize, rows: Vec<Comb<usize>>, ring: Ring) -> Vec<Comb<usize>> {
    let e = Echelon::from_rows(ncols, rows);
    e.free_columns()
        .into_iter()
        .map(|f| {
            let mut v = Comb::basis(f, ring);
            for p in e.pivots() {
                if let Some(c) = e.row(p).and_then(|r| r.get(&f)) {
                    v.add_term(p, -c);
                }
            }
            v
        })
        .collect()
}

/// Ordered basis of `ker A`.
pub fn kernel_basis(a: &LinearMap) -> Vec<Vec<Scalar>> {
    let ring = a.ring();
    let n = a.domain.rank();
    if ring.is_field() {
        kernel_rows(n, a.rows(), ring).iter().map(|v| to_dense(v, n, ring)).collect()
    } else {
        let h = hermite_columns(&a.matrix(), n, ring);
        (h.rank..n).map(|j| (0..n).map(|i| h.u[i][j].clone()).collect()).collect()
    }
}

/// Solves `A x = b`. Over a field free variables are set to 0; over Z the
/// answer is an integral solution or none.
pub fn solve_affine(a: &LinearMap, b: &[Scalar]) -> Result<Option<Vec<Scalar>>, Error> {
    let m = a.codomain.rank();
    let n = a.domain.rank();
    if b.len() != m {
        return Err(Error::Contract(format!("right-hand side of length {} for {} equations", b.len(), m)));
    }
    let ring = a.ring();
    if ring.is_field() {
        let rows = a.rows();
        let mut e = Echelon::new(n + 1);
        for (i, mut r) in rows.into_iter().enumerate() {
            r.add_term(n, b[i].clone());
            e.insert(r);
        }
        if e.is_pivot(n) {
            return Ok(None);
        }
        let mut x = vec![ring.zero(); n];
        for p in e.pivots() {
            x[p] = e.row(p).unwrap().coeff(&n, ring);
        }
        Ok(Some(x))
    } else {
        let h = hermite_columns(&a.matrix(), n, ring);
        // Forward substitution through the column echelon form H = A U.
        let mut y = vec![ring.zero(); n];
        let mut resid: Vec<Scalar> = b.to_vec();
        for (j, &pr) in h.pivot_rows.iter().enumerate() {
            let hv = &h.h[pr][j];
            let Some(q) = resid[pr].div_exact(hv) else {
                return Ok(None);
            };
            for (i, r) in resid.iter_mut().enumerate() {
                *r = &*r - &(&h.h[i][j] * &q);
            }
            y[j] = q;
        }
        if resid.iter().any(|r| !r.is_zero()) {
            return Ok(None);
        }
        let x = (0..n)
            .map(|i| {
                let mut s = ring.zero();
                for (j, yj) in y.iter().enumerate() {
                    s = &s + &(&h.u[i][j] * yj);
                }
                s
            })
            .collect();
        Ok(Some(x))
    }
}

struct Hermite {
    h: Vec<Vec<Scalar>>,
    u: Vec<Vec<Scalar>>,
    rank: usize,
    pivot_rows: Vec<usize>,
}

/// Unimodular column reduction `A U = H` with H in column echelon form.
/// Columns `rank..n` of U span the integer kernel.
fn hermite_columns(a: &[Vec<Scalar>], n: usize, ring: Ring) -> Hermite {
    let m = a.len();
    let mut h: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(as_int).collect()).collect();
    let mut u: Vec<Vec<BigInt>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    let mut col = 0;
    let mut pivot_rows = Vec::new();
    for row in 0..m {
        if col >= n {
            break;
        }
        // gcd-combine columns col..n on this row into column `col`.
        for j in col + 1..n {
            if h[row][j].is_zero() {
                continue;
            }
            let a0 = h[row][col].clone();
            let b0 = h[row][j].clone();
            let eg = a0.extended_gcd(&b0);
            let (g, x, y) = (eg.gcd, eg.x, eg.y);
            let (p, q) = (&a0 / &g, &b0 / &g);
            // [c_col, c_j] <- [x c_col + y c_j, -q c_col + p c_j]; determinant 1.
            for mat in [&mut h, &mut u] {
                for r in mat.iter_mut() {
                    let c0 = r[col].clone();
                    let c1 = r[j].clone();
                    r[col] = &x * &c0 + &y * &c1;
                    r[j] = -(&q * &c0) + &p * &c1;
                }
            }
        }
        if !h[row][col].is_zero() {
            if h[row][col].is_negative() {
                for mat in [&mut h, &mut u] {
                    for r in mat.iter_mut() {
                        r[col] = -r[col].clone();
                    }
                }
            }
            pivot_rows.push(row);
            col += 1;
        }
    }
    let conv = |v: Vec<Vec<BigInt>>| -> Vec<Vec<Scalar>> {
        v.into_iter().map(|r| r.into_iter().map(|x| from_int(x, ring)).collect()).collect()
    };
    Hermite { h: conv(h), u: conv(u), rank: col, pivot_rows }
}

fn as_int(s: &Scalar) -> BigInt {
    match s {
        Scalar::Z(x) => x.clone(),
        Scalar::Q(x) if x.is_integer() => x.to_integer(),
        Scalar::Fp { v, .. } => BigInt::from(*v),
        _ => panic!("integer matrix expected"),
    }
}

fn from_int(x: BigInt, ring: Ring) -> Scalar {
    match ring {
        Ring::Z => Scalar::Z(x),
        Ring::Q => Scalar::Q(BigRational::from_integer(x)),
        Ring::Fp(p) => {
            let r = x.mod_floor(&BigInt::from(p));
            Scalar::Fp { v: r.to_u64().unwrap(), p }
        }
    }
}

/// Coordinates of `v` with respect to the kernel-style basis produced by
/// [`kernel_rows`]: read off the free columns.
pub fn coords_at(v: &Comb<usize>, free: &[usize], ring: Ring) -> Vec<Scalar> {
    free.iter().map(|f| v.coeff(f, ring)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Scalar {
        Ring::Q.from_i64(v)
    }

    #[test]
    fn scalar_forms() {
        let a = Scalar::parse("6/8", Ring::Q).unwrap();
        assert_eq!(a.to_string(), "3/4");
        assert_eq!(Scalar::parse("-4/2", Ring::Q).unwrap().to_string(), "-2");
        let b = Scalar::parse("12 mod 7", Ring::Fp(7)).unwrap();
        assert_eq!(b, Scalar::Fp { v: 5, p: 7 });
        assert_eq!(b.to_string(), "5 mod 7");
        assert_eq!(Ring::Fp(7).from_i64(-1), Scalar::Fp { v: 6, p: 7 });
        assert_eq!((&b * &b.inv().unwrap()), Ring::Fp(7).one());
        assert!(Scalar::parse("1/0", Ring::Q).is_err());
        assert_eq!(Ring::parse("Fp(5)").unwrap(), Ring::Fp(5));
        assert!(Ring::parse("F6").is_err());
    }

    #[test]
    fn solve_examples() {
        let id = LinearMap::from_ints(&[&[1, 0], &[0, 1]], Ring::Q);
        assert_eq!(solve_affine(&id, &[q(3), q(5)]).unwrap(), Some(vec![q(3), q(5)]));
        let z = LinearMap::from_ints(&[&[0]], Ring::Q);
        assert_eq!(solve_affine(&z, &[q(1)]).unwrap(), None);
        let a = LinearMap::from_ints(&[&[1, 1]], Ring::Q);
        assert_eq!(solve_affine(&a, &[q(2)]).unwrap(), Some(vec![q(2), q(0)]));
        assert!(solve_affine(&a, &[q(1), q(1)]).is_err());
    }

    #[test]
    fn kernel_examples() {
        let id = LinearMap::from_ints(&[&[1, 0], &[0, 1]], Ring::Q);
        assert!(kernel_basis(&id).is_empty());
        let z = LinearMap::from_ints(&[&[0, 0]], Ring::Q);
        assert_eq!(kernel_basis(&z), vec![vec![q(1), q(0)], vec![q(0), q(1)]]);
        let a = LinearMap::from_ints(&[&[1, 1]], Ring::Q);
        let k = kernel_basis(&a);
        assert_eq!(k.len(), 1);
        assert_eq!(&k[0][0] + &k[0][1], q(0));
        assert!(!k[0][0].is_zero());
    }

    #[test]
    fn integer_solving() {
        let a = LinearMap::from_ints(&[&[2, 4]], Ring::Z);
        let z = |v| Ring::Z.from_i64(v);
        assert_eq!(solve_affine(&a, &[z(3)]).unwrap(), None);
        let x = solve_affine(&a, &[z(6)]).unwrap().unwrap();
        assert_eq!(&(&z(2) * &x[0]) + &(&z(4) * &x[1]), z(6));
        let k = kernel_basis(&a);
        assert_eq!(k.len(), 1);
        assert_eq!(&(&z(2) * &k[0][0]) + &(&z(4) * &k[0][1]), z(0));
        // primitive generator (2,-1) up to sign
        assert_eq!(k[0][0].to_i64().unwrap().abs(), 2);
    }

    #[test]
    fn tensor_examples() {
        let one = LinearMap::from_ints(&[&[1]], Ring::Q);
        assert_eq!(tensor_map(&one, &one).matrix(), vec![vec![q(1)]]);
        let f = LinearMap::from_ints(&[&[2]], Ring::Q);
        let g = LinearMap::from_ints(&[&[3]], Ring::Q);
        assert_eq!(tensor_map(&f, &g).matrix(), vec![vec![q(6)]]);
        let id2 = LinearMap::from_ints(&[&[1, 0], &[0, 1]], Ring::Q);
        let sw = LinearMap::from_ints(&[&[0, 1], &[1, 0]], Ring::Q);
        let t = tensor_map(&id2, &sw);
        // brute force on basis e_i (x) e_k -> e_i (x) sw(e_k)
        for i in 0..2 {
            for k in 0..2 {
                let img = t.apply(&Comb::basis(i * 2 + k, Ring::Q));
                assert_eq!(img, Comb::basis(i * 2 + (1 - k), Ring::Q));
            }
        }
        assert_eq!(t.domain.basis[1], "(e0,e1)");
    }
}
