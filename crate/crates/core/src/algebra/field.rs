//! Finite fields `F_{p^r}` with a canonical modulus per `(p, r)`.
//!
//! Elements are stored as the base-`p` index of their coefficient vector in
//! the power basis `1, x, ..., x^{r-1}`; multiplication goes through
//! discrete-log tables built once per field and shared for the life of the
//! process.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Mutex, OnceLock};

use thiserror::Error;

/// Largest field order the descriptor tables are built for.
pub const MAX_FIELD_ORDER: u32 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{r} exceeds the bound {MAX_FIELD_ORDER}")]
    TooLarge { p: u32, r: u32 },
    #[error("index {idx} out of range for a field of order {q}")]
    IndexOutOfRange { idx: u64, q: u32 },
}

#[derive(Debug)]
struct FieldData {
    p: u32,
    r: u32,
    q: u32,
    /// Monic modulus, `modulus[i]` is the coefficient of `x^i`, length `r + 1`.
    modulus: Vec<u32>,
    /// `exp[i] = g^i` for the least primitive element `g`, length `q - 1`.
    exp: Vec<u32>,
    /// `log[idx]` for nonzero `idx`; `log[0]` is unused.
    log: Vec<u32>,
    /// `p^i` for `i < r`.
    powers: Vec<u32>,
}

/// Handle to an interned finite field. Cheap to copy; equal handles share tables.
#[derive(Clone, Copy)]
pub struct Field(&'static FieldData);

/// An element of a finite field.
#[derive(Clone, Copy)]
pub struct Fq {
    field: Field,
    idx: u32,
}

fn registry() -> &'static Mutex<HashMap<(u32, u32), &'static FieldData>> {
    static REG: OnceLock<Mutex<HashMap<(u32, u32), &'static FieldData>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

pub(crate) fn is_prime(n: u64) -> bool {
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

/// Splits `q` as `p^r`, if it is a prime power.
pub(crate) fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let (mut m, mut r) = (q, 0u32);
    while m % p == 0 {
        m /= p;
        r += 1;
    }
    (m == 1).then_some((p as u32, r))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
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

// Dense polynomials over F_p, lowest coefficient first.

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut a = poly_trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while a.len() > dm {
        let da = a.len() - 1;
        let c = a[da] as u64 * lead_inv as u64 % p as u64;
        for (i, &mi) in m.iter().enumerate() {
            let j = da - dm + i;
            a[j] = ((a[j] as u64 + p as u64 - c * mi as u64 % p as u64) % p as u64) as u32;
        }
        a = poly_trim(a);
    }
    a
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + ai as u64 * bj as u64) % p as u64) as u32;
        }
    }
    poly_rem(&prod, m, p)
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let (mut b, mut e) = (a as u64 % p as u64, p as u64 - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

fn digits(mut idx: u32, p: u32, r: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(r as usize);
    for _ in 0..r {
        out.push(idx % p);
        idx /= p;
    }
    out
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut g = digits(low as u32, p, d as u32);
            g.push(1);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Least monic irreducible of degree `r`, ordering candidates by the base-`p`
/// index of their lower coefficients with `x^{r-1}` most significant.
fn canonical_modulus(p: u32, r: u32) -> Vec<u32> {
    let count = p.pow(r);
    for low in 0..count {
        let mut f = digits(low, p, r);
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn poly_pow(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
    let mut acc = vec![1u32];
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &b, m, p);
        }
        b = poly_mulmod(&b, &b, m, p);
        e >>= 1;
    }
    acc
}

fn build(p: u32, r: u32) -> FieldData {
    let q = p.pow(r);
    let modulus = canonical_modulus(p, r);
    let order = (q - 1) as u64;
    let factors = prime_factors(order);
    let gen = (1..q)
        .map(|i| poly_trim(digits(i, p, r)))
        .find(|g| factors.iter().all(|&l| poly_pow(g, order / l, &modulus, p) != vec![1]))
        .expect("multiplicative group of a finite field is cyclic");
    let mut exp = Vec::with_capacity(order as usize);
    let mut log = vec![0u32; q as usize];
    let mut cur = vec![1u32];
    for i in 0..order as u32 {
        let mut d = cur.clone();
        d.resize(r as usize, 0);
        let idx = undigits(&d, p);
        exp.push(idx);
        log[idx as usize] = i;
        cur = poly_mulmod(&cur, &gen, &modulus, p);
    }
    let powers = (0..r).map(|i| p.pow(i)).collect();
    FieldData { p, r, q, modulus, exp, log, powers }
}

impl Field {
    /// The field `F_{p^r}`; repeated calls return the same shared descriptor.
    pub fn new(p: u32, r: u32) -> Result<Field, FieldError> {
        if !is_prime(p as u64) {
            return Err(FieldError::NotPrime(p));
        }
        if r == 0 {
            return Err(FieldError::ZeroDegree);
        }
        match (p as u64).checked_pow(r) {
            Some(q) if q <= MAX_FIELD_ORDER as u64 => {}
            _ => return Err(FieldError::TooLarge { p, r }),
        }
        let mut reg = registry().lock().unwrap_or_else(|e| e.into_inner());
        let data = *reg.entry((p, r)).or_insert_with(|| Box::leak(Box::new(build(p, r))));
        Ok(Field(data))
    }

    /// The field with `q` elements.
    pub fn of_order(q: u64) -> Result<Field, FieldError> {
        let (p, r) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        Field::new(p, r)
    }

    pub fn characteristic(self) -> u32 {
        self.0.p
    }

    pub fn degree(self) -> u32 {
        self.0.r
    }

    pub fn order(self) -> u32 {
        self.0.q
    }

    /// Coefficients of the monic modulus, constant term first.
    pub fn modulus(self) -> &'static [u32] {
        &self.0.modulus
    }

    pub fn zero(self) -> Fq {
        Fq { field: self, idx: 0 }
    }

    pub fn one(self) -> Fq {
        Fq { field: self, idx: 1 }
    }

    /// The least primitive element (by index).
    pub fn generator(self) -> Fq {
        Fq { field: self, idx: self.0.exp[1 % self.0.exp.len()] }
    }

    /// `g^i` for the canonical generator `g`.
    pub fn exp(self, i: i64) -> Fq {
        let n = self.0.exp.len() as i64;
        Fq { field: self, idx: self.0.exp[i.rem_euclid(n) as usize] }
    }

    pub fn element(self, idx: u64) -> Result<Fq, FieldError> {
        if idx >= self.0.q as u64 {
            return Err(FieldError::IndexOutOfRange { idx, q: self.0.q });
        }
        Ok(Fq { field: self, idx: idx as u32 })
    }

    /// Image of an integer in the prime field.
    pub fn from_int(self, n: i64) -> Fq {
        Fq { field: self, idx: n.rem_euclid(self.0.p as i64) as u32 }
    }

    /// Element with the given power-basis coefficients (constant first).
    pub fn from_coeffs(self, c: &[u32]) -> Fq {
        let mut d: Vec<u32> = c.iter().map(|&x| x % self.0.p).collect();
        d.resize(self.0.r as usize, 0);
        Fq { field: self, idx: undigits(&d, self.0.p) }
    }

    /// All elements in index order.
    pub fn elements(self) -> impl Iterator<Item = Fq> + Clone {
        (0..self.0.q).map(move |idx| Fq { field: self, idx })
    }

    pub fn nonzero(self) -> impl Iterator<Item = Fq> + Clone {
        (1..self.0.q).map(move |idx| Fq { field: self, idx })
    }

    /// Nonzero squares.
    pub fn squares(self) -> Vec<Fq> {
        let n = self.0.exp.len() as i64;
        let step = if self.0.p == 2 { 1 } else { 2 };
        (0..n).step_by(step).map(|i| self.exp(i)).collect()
    }

    /// The unique field embedding sending the canonical root `x` to the least
    /// root of this field's modulus in `target`.
    pub fn embedding_into(self, target: Field) -> Option<Embedding> {
        if self.0.p != target.0.p || !target.0.r.is_multiple_of(self.0.r) {
            return None;
        }
        let root = target.elements().find(|&b| self.0.modulus.iter().rev().fold(target.zero(), |acc, &c| acc * b + target.from_int(c as i64)).is_zero())?;
        let table = self.elements().map(|x| x.coeffs().iter().rev().fold(target.zero(), |acc, &c| acc * root + target.from_int(c as i64)).idx).collect();
        Some(Embedding { from: self, to: target, table })
    }

    fn add_idx(self, a: u32, b: u32) -> u32 {
        let d = self.0;
        if d.p == 2 {
            return a ^ b;
        }
        if d.r == 1 {
            return (a + b) % d.p;
        }
        let (mut a, mut b, mut out) = (a, b, 0);
        for &pw in &d.powers {
            out += ((a % d.p + b % d.p) % d.p) * pw;
            a /= d.p;
            b /= d.p;
        }
        out
    }

    fn neg_idx(self, a: u32) -> u32 {
        let d = self.0;
        if d.p == 2 {
            return a;
        }
        let (mut a, mut out) = (a, 0);
        for &pw in &d.powers {
            out += ((d.p - a % d.p) % d.p) * pw;
            a /= d.p;
        }
        out
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.0, other.0)
    }
}
impl Eq for Field {}

impl Hash for Field {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.0.p, self.0.r).hash(state);
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.q)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.q)
    }
}

/// A field monomorphism given by its value table.
#[derive(Clone, Debug)]
pub struct Embedding {
    from: Field,
    to: Field,
    table: Vec<u32>,
}

impl Embedding {
    pub fn source(&self) -> Field {
        self.from
    }

    pub fn target(&self) -> Field {
        self.to
    }

    pub fn apply(&self, x: Fq) -> Fq {
        assert_eq!(x.field, self.from, "embedding applied to a foreign element");
        Fq { field: self.to, idx: self.table[x.idx as usize] }
    }

    /// The element mapping to `y`, if `y` lies in the image.
    pub fn preimage(&self, y: Fq) -> Option<Fq> {
        assert_eq!(y.field, self.to, "preimage of a foreign element");
        let idx = self.table.iter().position(|&i| i == y.idx)?;
        Some(Fq { field: self.from, idx: idx as u32 })
    }
}

impl Fq {
    pub fn field(self) -> Field {
        self.field
    }

    /// Base-`p` index of the coefficient vector.
    pub fn index(self) -> u32 {
        self.idx
    }

    pub fn coeffs(self) -> Vec<u32> {
        digits(self.idx, self.field.0.p, self.field.0.r)
    }

    pub fn is_zero(self) -> bool {
        self.idx == 0
    }

    pub fn is_one(self) -> bool {
        self.idx == 1
    }

    /// Discrete log with respect to the canonical generator.
    pub fn log(self) -> Option<u32> {
        (!self.is_zero()).then(|| self.field.0.log[self.idx as usize])
    }

    pub fn inv(self) -> Option<Fq> {
        let n = self.field.0.exp.len() as u32;
        self.log().map(|l| Fq { field: self.field, idx: self.field.0.exp[((n - l) % n) as usize] })
    }

    pub fn pow(self, e: i64) -> Fq {
        match self.log() {
            None if e == 0 => self.field.one(),
            None if e > 0 => self,
            None => panic!("negative power of zero"),
            Some(l) => self.field.exp(l as i64 * e.rem_euclid(self.field.0.exp.len() as i64)),
        }
    }

    /// `x^{p^k}` with `k` reduced mod the degree.
    pub fn frobenius(self, k: i64) -> Fq {
        let d = self.field.0;
        let k = k.rem_euclid(d.r as i64) as u32;
        if k == 0 || self.is_zero() {
            return self;
        }
        let n = d.exp.len() as u64;
        let e = (d.log[self.idx as usize] as u64 * (d.p as u64).pow(k)) % n;
        Fq { field: self.field, idx: d.exp[e as usize] }
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(self) -> Option<u32> {
        let n = self.field.0.exp.len() as u32;
        self.log().map(|l| n / gcd(n, l))
    }

    fn check(self, other: Fq) {
        debug_assert!(self.field == other.field, "mixed fields {:?} and {:?}", self.field, other.field);
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        self.idx == other.idx && self.field == other.field
    }
}
impl Eq for Fq {}

impl Hash for Fq {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.idx.hash(state);
    }
}

impl PartialOrd for Fq {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fq {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.idx.cmp(&other.idx)
    }
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.idx)
    }
}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.idx)
    }
}

impl Add for Fq {
    type Output = Fq;
    fn add(self, rhs: Fq) -> Fq {
        self.check(rhs);
        Fq { field: self.field, idx: self.field.add_idx(self.idx, rhs.idx) }
    }
}

impl Sub for Fq {
    type Output = Fq;
    fn sub(self, rhs: Fq) -> Fq {
        self + (-rhs)
    }
}

impl Neg for Fq {
    type Output = Fq;
    fn neg(self) -> Fq {
        Fq { field: self.field, idx: self.field.neg_idx(self.idx) }
    }
}

impl Mul for Fq {
    type Output = Fq;
    fn mul(self, rhs: Fq) -> Fq {
        self.check(rhs);
        if self.idx == 0 || rhs.idx == 0 {
            return self.field.zero();
        }
        let d = self.field.0;
        let n = d.exp.len();
        let e = (d.log[self.idx as usize] as usize + d.log[rhs.idx as usize] as usize) % n;
        Fq { field: self.field, idx: d.exp[e] }
    }
}

impl Div for Fq {
    type Output = Fq;
    /// Panics on division by zero.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Fq) -> Fq {
        self * rhs.inv().expect("division by zero in a finite field")
    }
}

impl AddAssign for Fq {
    fn add_assign(&mut self, rhs: Fq) {
        *self = *self + rhs;
    }
}

impl SubAssign for Fq {
    fn sub_assign(&mut self, rhs: Fq) {
        *self = *self - rhs;
    }
}

impl MulAssign for Fq {
    fn mul_assign(&mut self, rhs: Fq) {
        *self = *self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Schoolbook arithmetic on coefficient vectors, independent of the log tables.
    fn slow_mul(f: Field, a: Fq, b: Fq) -> Fq {
        let p = f.characteristic();
        let prod = poly_mulmod(&poly_trim(a.coeffs()), &poly_trim(b.coeffs()), f.modulus(), p);
        f.from_coeffs(&prod)
    }

    #[test]
    fn canonical_moduli_are_frozen() {
        // Least monic irreducibles, constant term first, computed with an
        // independent computer-algebra irreducibility test and frozen here.
        let table: &[(u32, u32, &[u32])] = &[
            (2, 1, &[0, 1]),
            (2, 2, &[1, 1, 1]),
            (2, 3, &[1, 1, 0, 1]),
            (2, 4, &[1, 1, 0, 0, 1]),
            (2, 5, &[1, 0, 1, 0, 0, 1]),
            (2, 6, &[1, 1, 0, 0, 0, 0, 1]),
            (3, 1, &[0, 1]),
            (3, 2, &[1, 0, 1]),
            (3, 3, &[1, 2, 0, 1]),
            (3, 4, &[2, 1, 0, 0, 1]),
            (5, 1, &[0, 1]),
            (5, 2, &[2, 0, 1]),
            (7, 1, &[0, 1]),
            (7, 2, &[1, 0, 1]),
            (11, 1, &[0, 1]),
            (13, 1, &[0, 1]),
        ];
        for &(p, r, m) in table {
            assert_eq!(Field::new(p, r).unwrap().modulus(), m, "modulus of F_{p}^{r}");
        }
    }

    #[test]
    fn descriptors_are_shared() {
        let a = Field::new(3, 2).unwrap();
        let b = Field::of_order(9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.order(), 9);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(Field::new(4, 1).unwrap_err(), FieldError::NotPrime(4));
        assert_eq!(Field::of_order(6).unwrap_err().to_string(), "6 is not a prime power");
        assert!(matches!(Field::new(2, 17), Err(FieldError::TooLarge { .. })));
        assert_eq!(Field::new(2, 0).unwrap_err(), FieldError::ZeroDegree);
    }

    #[test]
    fn f4_unit_group_has_order_three() {
        let f = Field::new(2, 2).unwrap();
        let units: Vec<_> = f.nonzero().collect();
        assert_eq!(units.len(), 3);
        assert!(units.iter().all(|x| x.pow(3).is_one()));
    }

    #[test]
    fn frobenius_examples() {
        let f4 = Field::new(2, 2).unwrap();
        let w = f4.element(2).unwrap();
        assert_eq!(w.frobenius(1), w * w);
        assert_eq!(w.frobenius(0), w);
        let f9 = Field::new(3, 2).unwrap();
        assert!(f9.elements().all(|x| x.frobenius(2) == x));
        assert!(f9.elements().all(|x| x.frobenius(-1) == x.frobenius(1)));
    }

    #[test]
    fn tables_agree_with_schoolbook_and_fermat() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 32, 49, 64, 81] {
            let f = Field::of_order(q).unwrap();
            for a in f.elements() {
                assert_eq!(a.pow(q as i64), a);
                if !a.is_zero() {
                    assert!(a.pow(q as i64 - 1).is_one());
                    assert!((a * a.inv().unwrap()).is_one());
                }
                assert!((a + (-a)).is_zero());
                for b in f.elements() {
                    assert_eq!(a * b, slow_mul(f, a, b), "F_{q}: {a}*{b}");
                }
            }
        }
    }

    #[test]
    fn embeddings_are_ring_maps() {
        for (small, big) in [(2u64, 4u64), (2, 8), (4, 16), (3, 9), (9, 81), (3, 27)] {
            let (k, m) = (Field::of_order(small).unwrap(), Field::of_order(big).unwrap());
            let e = k.embedding_into(m).unwrap();
            for a in k.elements() {
                for b in k.elements() {
                    assert_eq!(e.apply(a + b), e.apply(a) + e.apply(b));
                    assert_eq!(e.apply(a * b), e.apply(a) * e.apply(b));
                }
            }
            assert!(e.apply(k.one()).is_one());
        }
        assert!(Field::of_order(4).unwrap().embedding_into(Field::of_order(8).unwrap()).is_none());
    }

    #[test]
    fn prime_power_splitting() {
        assert_eq!(prime_power(81), Some((3, 4)));
        assert_eq!(prime_power(13), Some((13, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }
}
