//! Exact arithmetic in small prime-power fields GF(p^m).
//!
//! Elements are dense indices in `[0, q)`: the base-`p` digits of an index are
//! the coefficients of the residue polynomial, lowest degree first. The
//! modulus is always the lexicographically smallest monic irreducible of
//! degree `m`, so a field is fully determined by its order and every
//! construction downstream is reproducible.
//!
//! Fields with `q <= 256` carry full addition, multiplication and inverse
//! tables; larger fields (up to the cap) compute on the fly.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

/// Default upper limit on `q = p^m`.
pub const DEFAULT_FIELD_CAP: u32 = 1024;

const TABLE_LIMIT: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field size {p}^{m} exceeds the cap {cap}")]
    CapExceeded { p: u32, m: u32, cap: u32 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("operands belong to different fields GF({left}) and GF({right})")]
    FieldMismatch { left: u32, right: u32 },
    #[error("value {value} is not an element of GF({q})")]
    OutOfRange { value: u32, q: u32 },
    #[error("malformed field descriptor `{0}` (expected `p^m` or a prime power)")]
    BadDescriptor(String),
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` into `(p, m)` with `q = p^m`, if `q` is a prime power.
pub fn prime_power_decompose(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        // q itself is prime
        p = q;
    }
    let mut rest = q;
    let mut m = 0u32;
    while rest.is_multiple_of(p) {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p as u32, m))
}

/// All prime powers in `[2, cap]`, ascending.
pub fn prime_powers_up_to(cap: u64) -> Vec<u64> {
    (2..=cap)
        .filter(|&q| prime_power_decompose(q).is_some())
        .collect()
}

/// An element of some [`FieldSpec`], tagged with the field order.
///
/// The order identifies the field uniquely because every field of a given
/// order is built with the same pinned modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    value: u32,
    order: u32,
}

impl FieldElement {
    pub fn value(self) -> u32 {
        self.value
    }

    pub fn order(self) -> u32 {
        self.order
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

struct Tables {
    add: Vec<u32>,
    sub: Vec<u32>,
    mul: Vec<u32>,
    inv: Vec<u32>,
}

struct Inner {
    p: u32,
    m: u32,
    q: u32,
    /// Monic modulus, coefficients lowest degree first (length `m + 1`).
    modulus: Vec<u32>,
    tables: Option<Tables>,
}

/// A finite field GF(p^m) with a pinned irreducible modulus.
///
/// Cheap to clone; all state lives behind an `Arc`.
#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<Inner>,
}

impl FieldSpec {
    /// Builds GF(p^m) under the default cap.
    pub fn new(p: u32, m: u32) -> Result<Self, FieldError> {
        Self::with_cap(p, m, DEFAULT_FIELD_CAP)
    }

    pub fn with_cap(p: u32, m: u32, cap: u32) -> Result<Self, FieldError> {
        if !is_prime(p as u64) {
            return Err(FieldError::NotPrime(p));
        }
        if m == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = (p as u64).checked_pow(m).filter(|&q| q <= cap as u64);
        let Some(q) = q else {
            return Err(FieldError::CapExceeded { p, m, cap });
        };
        let q = q as u32;
        let modulus = if m == 1 {
            vec![0, 1]
        } else {
            let prime = Self::with_cap(p, 1, cap)?;
            smallest_monic_irreducible(&prime, m as usize)
        };
        let mut inner = Inner {
            p,
            m,
            q,
            modulus,
            tables: None,
        };
        if q <= TABLE_LIMIT {
            inner.tables = Some(inner.build_tables());
        }
        Ok(Self {
            inner: Arc::new(inner),
        })
    }

    /// Builds the field of order `q` (which must be a prime power).
    pub fn from_order(q: u64) -> Result<Self, FieldError> {
        let (p, m) = prime_power_decompose(q).ok_or(FieldError::NotPrimePower(q))?;
        Self::new(p, m)
    }

    pub fn p(&self) -> u32 {
        self.inner.p
    }

    pub fn m(&self) -> u32 {
        self.inner.m
    }

    pub fn q(&self) -> u32 {
        self.inner.q
    }

    /// Monic modulus coefficients, lowest degree first.
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    /// The modulus as a human-readable polynomial, e.g. `x^2 + x + 1`.
    pub fn modulus_string(&self) -> String {
        poly_to_string(&self.inner.modulus)
    }

    pub fn zero(&self) -> FieldElement {
        self.wrap(0)
    }

    pub fn one(&self) -> FieldElement {
        self.wrap(1)
    }

    /// Checked conversion of an index into an element.
    pub fn element(&self, value: u32) -> Result<FieldElement, FieldError> {
        if value >= self.q() {
            return Err(FieldError::OutOfRange { value, q: self.q() });
        }
        Ok(self.wrap(value))
    }

    /// Iterates all elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q()).map(move |v| self.wrap(v))
    }

    /// Element encoding the polynomial with the given coefficients.
    pub fn from_coefficients(&self, coeffs: &[u32]) -> Result<FieldElement, FieldError> {
        if coeffs.len() > self.m() as usize || coeffs.iter().any(|&c| c >= self.p()) {
            return Err(FieldError::BadDescriptor(format!("{coeffs:?}")));
        }
        Ok(self.wrap(self.inner.encode(coeffs)))
    }

    /// Coefficients of the residue polynomial, lowest degree first, length `m`.
    pub fn coefficients(&self, a: FieldElement) -> Vec<u32> {
        self.inner.decode(a.value)
    }

    fn wrap(&self, value: u32) -> FieldElement {
        FieldElement {
            value,
            order: self.q(),
        }
    }

    fn check(&self, a: FieldElement) -> Result<u32, FieldError> {
        if a.order != self.q() {
            return Err(FieldError::FieldMismatch {
                left: self.q(),
                right: a.order,
            });
        }
        Ok(a.value)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.wrap(self.add_raw(self.check(a)?, self.check(b)?)))
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.wrap(self.sub_raw(self.check(a)?, self.check(b)?)))
    }

    pub fn neg(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.wrap(self.neg_raw(self.check(a)?)))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.wrap(self.mul_raw(self.check(a)?, self.check(b)?)))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        let a = self.check(a)?;
        self.inv_raw(a).map(|v| self.wrap(v)).ok_or(FieldError::ZeroInverse)
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> Result<FieldElement, FieldError> {
        Ok(self.wrap(self.pow_raw(self.check(a)?, e)))
    }

    // Unchecked index arithmetic used by the linear-algebra hot loops.
    // Callers guarantee operands are `< q`.

    #[inline]
    pub fn add_raw(&self, a: u32, b: u32) -> u32 {
        match &self.inner.tables {
            Some(t) => t.add[(a * self.q() + b) as usize],
            None => self.inner.add_slow(a, b),
        }
    }

    #[inline]
    pub fn sub_raw(&self, a: u32, b: u32) -> u32 {
        match &self.inner.tables {
            Some(t) => t.sub[(a * self.q() + b) as usize],
            None => self.inner.sub_slow(a, b),
        }
    }

    #[inline]
    pub fn neg_raw(&self, a: u32) -> u32 {
        self.sub_raw(0, a)
    }

    #[inline]
    pub fn mul_raw(&self, a: u32, b: u32) -> u32 {
        match &self.inner.tables {
            Some(t) => t.mul[(a * self.q() + b) as usize],
            None => self.inner.mul_slow(a, b),
        }
    }

    #[inline]
    pub fn inv_raw(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        match &self.inner.tables {
            Some(t) => Some(t.inv[a as usize]),
            None => Some(self.inner.pow_slow(a, self.q() as u64 - 2)),
        }
    }

    pub fn pow_raw(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            e >>= 1;
        }
        acc
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.q() == other.q()
    }
}

impl Eq for FieldSpec {}

impl Hash for FieldSpec {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.q().hash(state);
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})[{}]", self.p(), self.m(), self.modulus_string())
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p(), self.m())
    }
}

impl FromStr for FieldSpec {
    type Err = FieldError;

    /// Accepts `p^m` (e.g. `2^2`) or a bare prime power (e.g. `4`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FieldError::BadDescriptor(s.to_string());
        let s = s.trim();
        match s.split_once('^') {
            Some((p, m)) => {
                let p = p.trim().parse().map_err(|_| bad())?;
                let m = m.trim().parse().map_err(|_| bad())?;
                Self::new(p, m)
            }
            None => Self::from_order(s.parse().map_err(|_| bad())?),
        }
    }
}

impl Inner {
    fn decode(&self, mut v: u32) -> Vec<u32> {
        let mut out = vec![0; self.m as usize];
        for c in out.iter_mut() {
            *c = v % self.p;
            v /= self.p;
        }
        out
    }

    fn encode(&self, coeffs: &[u32]) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn add_slow(&self, a: u32, b: u32) -> u32 {
        if self.m == 1 {
            return (a + b) % self.p;
        }
        let (x, y) = (self.decode(a), self.decode(b));
        let s: Vec<u32> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect();
        self.encode(&s)
    }

    fn sub_slow(&self, a: u32, b: u32) -> u32 {
        if self.m == 1 {
            return (a + self.p - b) % self.p;
        }
        let (x, y) = (self.decode(a), self.decode(b));
        let s: Vec<u32> = x
            .iter()
            .zip(&y)
            .map(|(u, v)| (u + self.p - v) % self.p)
            .collect();
        self.encode(&s)
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        if self.m == 1 {
            return ((a as u64 * b as u64) % p) as u32;
        }
        let (x, y) = (self.decode(a), self.decode(b));
        let m = self.m as usize;
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &u) in x.iter().enumerate() {
            for (j, &v) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u as u64 * v as u64) % p;
            }
        }
        // reduce using x^m = -(modulus lower terms)
        for d in (m..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for (i, &mc) in self.modulus[..m].iter().enumerate() {
                let idx = d - m + i;
                prod[idx] = (prod[idx] + (p - c) * mc as u64) % p;
            }
        }
        let low: Vec<u32> = prod[..m].iter().map(|&c| c as u32).collect();
        self.encode(&low)
    }

    fn pow_slow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    fn build_tables(&self) -> Tables {
        let q = self.q as usize;
        let mut add = vec![0; q * q];
        let mut sub = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for a in 0..self.q {
            for b in 0..self.q {
                let idx = a as usize * q + b as usize;
                add[idx] = self.add_slow(a, b);
                sub[idx] = self.sub_slow(a, b);
                mul[idx] = self.mul_slow(a, b);
            }
        }
        let mut inv = vec![0; q];
        for a in 1..self.q {
            let b = (1..self.q)
                .find(|&b| mul[a as usize * q + b as usize] == 1)
                .expect("nonzero field element without inverse: modulus is reducible");
            inv[a as usize] = b;
        }
        Tables { add, sub, mul, inv }
    }
}

// ---------------------------------------------------------------------------
// Polynomials over a FieldSpec (coefficients lowest degree first).
// Shared with the extension-field code in `rankmetric`.
// ---------------------------------------------------------------------------

pub(crate) fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

/// Remainder of `a` modulo the monic polynomial `b`.
pub(crate) fn poly_rem_monic(field: &FieldSpec, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        for (i, &bc) in b.iter().enumerate() {
            let t = field.mul_raw(lead, bc);
            r[shift + i] = field.sub_raw(r[shift + i], t);
        }
        poly_trim(&mut r);
    }
    r
}

/// Monic polynomial of the given degree whose lower coefficients are the
/// base-`q` digits of `index` (constant term least significant).
pub(crate) fn monic_from_index(field: &FieldSpec, degree: usize, mut index: u64) -> Vec<u32> {
    let q = field.q() as u64;
    let mut coeffs = Vec::with_capacity(degree + 1);
    for _ in 0..degree {
        coeffs.push((index % q) as u32);
        index /= q;
    }
    coeffs.push(1);
    coeffs
}

/// Irreducibility by trial division against every monic polynomial of
/// degree `1..=deg/2`.
pub(crate) fn is_irreducible(field: &FieldSpec, f: &[u32]) -> bool {
    let deg = f.len() - 1;
    let q = field.q() as u64;
    for d in 1..=deg / 2 {
        for idx in 0..q.pow(d as u32) {
            let divisor = monic_from_index(field, d, idx);
            if poly_rem_monic(field, f, &divisor).is_empty() {
                return false;
            }
        }
    }
    true
}

/// The lexicographically smallest monic irreducible polynomial of `degree`
/// over `field`, comparing coefficients from the highest non-leading term
/// down.
pub(crate) fn smallest_monic_irreducible(field: &FieldSpec, degree: usize) -> Vec<u32> {
    if degree == 1 {
        return vec![0, 1];
    }
    let q = field.q() as u64;
    (0..q.pow(degree as u32))
        .map(|idx| monic_from_index(field, degree, idx))
        .find(|f| is_irreducible(field, f))
        .expect("irreducible polynomials exist in every degree")
}

pub(crate) fn poly_to_string(coeffs: &[u32]) -> String {
    let mut terms = Vec::new();
    for (d, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match d {
            0 => String::new(),
            1 => "x".to_string(),
            _ => format!("x^{d}"),
        };
        terms.push(match (c, d) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}{mono}"),
        });
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}
