//! Finite fields GF(p^m).
//!
//! A [`Field`] is fully determined by `(p, m)`: the modulus is the
//! lexicographically smallest monic irreducible polynomial of degree `m`
//! (coefficients compared from the constant term upwards) and the primitive
//! element is the smallest one under the integer serialization
//! `c_0 + c_1 p + ... + c_{m-1} p^{m-1}`. Serialized values are therefore
//! relative to that modulus.
//!
//! Multiplication goes through discrete log/antilog tables, addition through
//! base-`p` digits (with shortcuts for prime fields and characteristic 2).

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on the field order `p^m`.
pub const DEFAULT_MAX_ORDER: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{m} exceeds the configured maximum {max}")]
    TooLarge { p: u64, m: u32, max: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("element {value} does not belong to a field of order {order}")]
    ForeignElement { value: u32, order: u32 },
    #[error("{n} does not divide the multiplicative group order {group}")]
    OrderNotDivisor { n: u64, group: u64 },
    #[error("divisibility chain violated: {0}")]
    Divisibility(String),
    #[error("no field of order at most {max} satisfies the constraints")]
    SearchExhausted { max: u64 },
    #[error("field descriptor mismatch: {0}")]
    Descriptor(String),
}

/// Limits applied when constructing or searching for fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldConfig {
    pub max_order: u64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self {
            max_order: DEFAULT_MAX_ORDER,
        }
    }
}

/// An element of GF(p^m), stored as its integer serialization.
///
/// Elements do not carry a reference to their field; operations go through
/// [`Field`], and [`Field::checked`] rejects values outside the field.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Wraps a serialized value without range checking.
    pub const fn new(value: u32) -> Self {
        FieldElement(value)
    }

    pub const fn value(self) -> u32 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::fmt::Display for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A checked field operation, see [`Field::checked`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Add(FieldElement, FieldElement),
    Sub(FieldElement, FieldElement),
    Mul(FieldElement, FieldElement),
    Div(FieldElement, FieldElement),
    Pow(FieldElement, u64),
    Inv(FieldElement),
}

/// JSON form of a field: `{"p":…, "m":…, "modulus":[c_0,…,c_m], "alpha":int}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub m: u32,
    pub modulus: Vec<u32>,
    pub alpha: u32,
}

#[derive(Clone)]
pub struct Field {
    p: u32,
    m: u32,
    order: u32,
    /// Monic modulus, ascending coefficients, length m + 1.
    modulus: Vec<u32>,
    alpha: FieldElement,
    /// exp[i] = alpha^i for i in 0..2(q-1).
    exp: Vec<u32>,
    /// log[a] for a != 0; log[0] unused.
    log: Vec<u32>,
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("m", &self.m)
            .field("modulus", &self.modulus)
            .field("alpha", &self.alpha)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for Field {}

/// Builds GF(p^m) with the deterministic modulus and primitive element.
pub fn make_field(p: u64, m: u32, config: &FieldConfig) -> Result<Field, GfError> {
    if !is_prime(p) {
        return Err(GfError::NotPrime(p));
    }
    if m == 0 {
        return Err(GfError::ZeroDegree);
    }
    let order = (p as u128).checked_pow(m);
    match order {
        Some(q) if q <= config.max_order as u128 && q <= u32::MAX as u128 => {}
        _ => {
            return Err(GfError::TooLarge {
                p,
                m,
                max: config.max_order,
            })
        }
    }
    let p = p as u32;
    let order = p.pow(m);
    let modulus = smallest_irreducible(p, m);

    let group = (order - 1) as u64;
    let factors = prime_factors(group);
    let alpha = (1..order)
        .find(|&v| {
            let digits = to_digits(v, p, m);
            factors.iter().all(|&l| {
                let y = slow_pow(&digits, group / l, &modulus, p);
                !is_one(&y)
            })
        })
        .expect("multiplicative group of a finite field is cyclic");

    let alpha_digits = to_digits(alpha, p, m);
    let n = group as usize;
    let mut exp = vec![0u32; 2 * n.max(1)];
    let mut log = vec![0u32; order as usize];
    let mut cur = to_digits(1, p, m);
    for i in 0..n {
        let v = from_digits(&cur, p);
        exp[i] = v;
        log[v as usize] = i as u32;
        cur = slow_mulmod(&cur, &alpha_digits, &modulus, p);
    }
    for i in n..2 * n {
        exp[i] = exp[i - n];
    }
    Ok(Field {
        p,
        m,
        order,
        modulus,
        alpha: FieldElement(alpha),
        exp,
        log,
    })
}

impl Field {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Number of elements, p^m.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Order of the multiplicative group, p^m - 1.
    pub fn group_order(&self) -> u32 {
        self.order - 1
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn alpha(&self) -> FieldElement {
        self.alpha
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        a.0 < self.order
    }

    /// Validates a serialized value.
    pub fn element(&self, value: u64) -> Result<FieldElement, GfError> {
        if value < self.order as u64 {
            Ok(FieldElement(value as u32))
        } else {
            Err(GfError::ForeignElement {
                value: value.min(u32::MAX as u64) as u32,
                order: self.order,
            })
        }
    }

    /// Coefficient vector (c_0, …, c_{m-1}) of an element.
    pub fn coefficients(&self, a: FieldElement) -> Vec<u32> {
        to_digits(a.0, self.p, self.m)
    }

    pub fn from_coefficients(&self, coeffs: &[u32]) -> Result<FieldElement, GfError> {
        if coeffs.len() != self.m as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(GfError::Descriptor(format!(
                "coefficient vector {coeffs:?} is not an element of GF({}^{})",
                self.p, self.m
            )));
        }
        Ok(FieldElement(from_digits(coeffs, self.p)))
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order).map(FieldElement)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (1..self.order).map(FieldElement)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.m == 1 {
            let s = a.0 + b.0;
            FieldElement(if s >= self.p { s - self.p } else { s })
        } else if self.p == 2 {
            FieldElement(a.0 ^ b.0)
        } else {
            let (mut x, mut y) = (a.0, b.0);
            let (mut out, mut place) = (0u32, 1u32);
            while x > 0 || y > 0 {
                let d = (x % self.p + y % self.p) % self.p;
                out += d * place;
                place = place.wrapping_mul(self.p);
                x /= self.p;
                y /= self.p;
            }
            FieldElement(out)
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.m == 1 {
            FieldElement(if a.0 == 0 { 0 } else { self.p - a.0 })
        } else if self.p == 2 {
            a
        } else {
            let mut x = a.0;
            let (mut out, mut place) = (0u32, 1u32);
            while x > 0 {
                let d = x % self.p;
                out += ((self.p - d) % self.p) * place;
                place = place.wrapping_mul(self.p);
                x /= self.p;
            }
            FieldElement(out)
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let i = self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize;
        FieldElement(self.exp[i])
    }

    /// Multiplicative inverse. Panics on zero; see [`Field::try_inv`].
    #[inline]
    pub fn inv(&self, a: FieldElement) -> FieldElement {
        self.try_inv(a).expect("inverse of zero")
    }

    pub fn try_inv(&self, a: FieldElement) -> Result<FieldElement, GfError> {
        if a.0 == 0 {
            return Err(GfError::DivisionByZero);
        }
        let n = self.group_order() as usize;
        let l = self.log[a.0 as usize] as usize;
        Ok(FieldElement(self.exp[(n - l) % n]))
    }

    /// Division. Panics on a zero divisor; see [`Field::try_div`].
    #[inline]
    pub fn div(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.mul(a, self.inv(b))
    }

    pub fn try_div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, GfError> {
        Ok(self.mul(a, self.try_inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.0 == 0 {
            return FieldElement::ZERO;
        }
        let n = self.group_order() as u64;
        let l = self.log[a.0 as usize] as u64;
        FieldElement(self.exp[((l * (e % n)) % n) as usize])
    }

    /// alpha^e for any integer exponent (reduced modulo p^m - 1).
    pub fn alpha_pow(&self, e: i64) -> FieldElement {
        let n = self.group_order() as i64;
        FieldElement(self.exp[e.rem_euclid(n) as usize])
    }

    /// Discrete logarithm to base alpha; `None` for zero.
    pub fn log(&self, a: FieldElement) -> Option<u32> {
        (a.0 != 0).then(|| self.log[a.0 as usize])
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self, a: FieldElement) -> Option<u64> {
        let l = self.log(a)? as u64;
        let n = self.group_order() as u64;
        Some(n / gcd(n, l))
    }

    /// Range-checked arithmetic; rejects operands not in this field and
    /// zero divisors.
    pub fn checked(&self, op: Op) -> Result<FieldElement, GfError> {
        let check = |a: FieldElement| {
            if self.contains(a) {
                Ok(a)
            } else {
                Err(GfError::ForeignElement {
                    value: a.0,
                    order: self.order,
                })
            }
        };
        match op {
            Op::Add(a, b) => Ok(self.add(check(a)?, check(b)?)),
            Op::Sub(a, b) => Ok(self.sub(check(a)?, check(b)?)),
            Op::Mul(a, b) => Ok(self.mul(check(a)?, check(b)?)),
            Op::Div(a, b) => self.try_div(check(a)?, check(b)?),
            Op::Pow(a, e) => Ok(self.pow(check(a)?, e)),
            Op::Inv(a) => self.try_inv(check(a)?),
        }
    }

    /// beta = alpha^((p^m - 1) / n), an element of order exactly `n`.
    pub fn element_of_order(&self, n: u64) -> Result<FieldElement, GfError> {
        let group = self.group_order() as u64;
        if n == 0 || !group.is_multiple_of(n) {
            return Err(GfError::OrderNotDivisor { n, group });
        }
        Ok(self.alpha_pow((group / n) as i64))
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.p,
            m: self.m,
            modulus: self.modulus.clone(),
            alpha: self.alpha.0,
        }
    }

    /// Rebuilds the field named by a descriptor and checks that the stored
    /// modulus and primitive element agree with the deterministic choice.
    pub fn from_descriptor(desc: &FieldDescriptor, config: &FieldConfig) -> Result<Field, GfError> {
        let field = make_field(desc.p as u64, desc.m, config)?;
        if field.modulus != desc.modulus {
            return Err(GfError::Descriptor(format!(
                "modulus {:?} differs from the canonical {:?}",
                desc.modulus, field.modulus
            )));
        }
        if field.alpha.0 != desc.alpha {
            return Err(GfError::Descriptor(format!(
                "primitive element {} differs from the canonical {}",
                desc.alpha, field.alpha.0
            )));
        }
        Ok(field)
    }
}

/// Smallest prime power q = p^m with n < q, (q - 1) divisible by `levels[0]`,
/// after checking `levels[h-1] | … | levels[0] | n`.
pub fn find_field(levels: &[u64], n: u64, config: &FieldConfig) -> Result<(u64, u32), GfError> {
    let Some(&n1) = levels.first() else {
        return Err(GfError::Divisibility("no levels given".into()));
    };
    if levels.contains(&0) || n == 0 {
        return Err(GfError::Divisibility("lengths must be positive".into()));
    }
    if !n.is_multiple_of(n1) {
        return Err(GfError::Divisibility(format!("{n1} does not divide {n}")));
    }
    for w in levels.windows(2) {
        if w[0] % w[1] != 0 {
            return Err(GfError::Divisibility(format!(
                "{} does not divide {}",
                w[1], w[0]
            )));
        }
    }
    (n + 1..=config.max_order)
        .filter(|q| (q - 1) % n1 == 0)
        .find_map(prime_power)
        .ok_or(GfError::SearchExhausted {
            max: config.max_order,
        })
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Decomposes q = p^m, returning `None` unless q is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..).find(|d| q.is_multiple_of(*d) || d * d > q).map(|d| if q.is_multiple_of(d) { d } else { q })?;
    let (mut r, mut m) = (q, 0u32);
    while r % p == 0 {
        r /= p;
        m += 1;
    }
    (r == 1).then_some((p, m))
}

/// Distinct prime factors in ascending order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn to_digits(mut v: u32, p: u32, m: u32) -> Vec<u32> {
    let mut d = Vec::with_capacity(m as usize);
    for _ in 0..m {
        d.push(v % p);
        v /= p;
    }
    d
}

fn from_digits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn is_one(d: &[u32]) -> bool {
    d[0] == 1 && d[1..].iter().all(|&c| c == 0)
}

/// Product of two residues modulo the monic `modulus` over GF(p).
fn slow_mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let m = modulus.len() - 1;
    let mut prod = vec![0u64; 2 * m];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    for top in (m..2 * m).rev() {
        let c = prod[top];
        if c == 0 {
            continue;
        }
        // X^top = X^{top-m} * (-(modulus without leading term))
        for j in 0..m {
            let sub = c * modulus[j] as u64 % p as u64;
            let idx = top - m + j;
            prod[idx] = (prod[idx] + p as u64 - sub) % p as u64;
        }
        prod[top] = 0;
    }
    prod.truncate(m);
    prod.into_iter().map(|c| c as u32).collect()
}

fn slow_pow(base: &[u32], mut e: u64, modulus: &[u32], p: u32) -> Vec<u32> {
    let m = modulus.len() - 1;
    let mut acc = to_digits(1, p, m as u32);
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = slow_mulmod(&acc, &b, modulus, p);
        }
        b = slow_mulmod(&b, &b, modulus, p);
        e >>= 1;
    }
    acc
}

/// Remainder of `a` modulo monic `d` over GF(p); both ascending.
fn poly_rem_gfp(a: &[u32], d: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let dd = d.len() - 1;
    while r.len() > dd {
        let c = r[r.len() - 1];
        let shift = r.len() - 1 - dd;
        if c != 0 {
            for (j, &dj) in d.iter().enumerate() {
                let idx = shift + j;
                r[idx] = (r[idx] + p as u64 - c * dj as u64 % p as u64) % p as u64;
            }
        }
        r.pop();
    }
    r.into_iter().map(|c| c as u32).collect()
}

/// Trial division by every monic polynomial of degree 1..=m/2.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let m = f.len() - 1;
    if m == 1 {
        return true;
    }
    if f[0] == 0 {
        return false;
    }
    for deg in 1..=m / 2 {
        let count = (p as u64).pow(deg as u32);
        for low in 0..count {
            let mut g = to_digits(low as u32, p, deg as u32);
            g.push(1);
            if poly_rem_gfp(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest monic irreducible of degree m, comparing
/// c_0 first.
fn smallest_irreducible(p: u32, m: u32) -> Vec<u32> {
    let count = (p as u64).pow(m);
    for idx in 0..count {
        // idx enumerates (c_0, …, c_{m-1}) with c_0 most significant.
        let mut low = vec![0u32; m as usize];
        let mut v = idx;
        for j in (0..m as usize).rev() {
            low[j] = (v % p as u64) as u32;
            v /= p as u64;
        }
        let mut f = low;
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
