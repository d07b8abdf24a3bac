//! Finite fields of prime order and of order `2^m` (`m <= 16`).
//!
//! A [`Field`] is an immutable handle; elements are plain [`Elem`] values whose
//! meaning depends on the handle they are used with. Prime fields use modular
//! arithmetic on residues, binary extension fields use log/antilog tables built
//! around the smallest primitive element.

use std::fmt;

use thiserror::Error;

/// Reduction polynomials used when the caller does not supply one, indexed by `m`.
/// Each is primitive over GF(2).
pub const DEFAULT_POLYNOMIALS: [u32; 17] =
    [0, 0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443, 0x8003, 0x1100B];

pub const MAX_BINARY_DEGREE: u32 = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("polynomial {poly:#x} is reducible over GF(2)")]
    Reducible { poly: u32 },
    #[error("polynomial {poly:#x} does not have degree {m}")]
    DegreeMismatch { m: u32, poly: u32 },
    #[error("binary extension degree {0} outside 1..=16")]
    UnsupportedDegree(u32),
    #[error("{u} does not divide q-1 = {}", .q - 1)]
    NoUnityRoot { u: u64, q: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("{value} is not an element of a field of order {q}")]
    OutOfRange { value: u64, q: u32 },
}

/// Description of a field before its tables are built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Prime(u32),
    Binary { m: u32, poly: u32 },
}

impl FieldSpec {
    /// GF(2^m) with the default reduction polynomial.
    pub fn binary(m: u32) -> Result<Self, GfError> {
        if m == 0 || m > MAX_BINARY_DEGREE {
            return Err(GfError::UnsupportedDegree(m));
        }
        Ok(FieldSpec::Binary { m, poly: DEFAULT_POLYNOMIALS[m as usize] })
    }

    pub fn order(&self) -> u32 {
        match *self {
            FieldSpec::Prime(p) => p,
            FieldSpec::Binary { m, .. } => 1 << m,
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FieldSpec::Prime(p) => write!(f, "GF({p})"),
            FieldSpec::Binary { m, poly } => write!(f, "GF(2^{m}, {poly:#x})"),
        }
    }
}

/// A field element. Prime fields store the residue, binary fields the
/// coefficient bit-vector of the polynomial basis.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(transparent)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone)]
struct LogTables {
    // exp has length 2(q-1) so that exp[log a + log b] needs no reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct Field {
    spec: FieldSpec,
    order: u32,
    primitive: Elem,
    tables: Option<LogTables>,
}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Self, GfError> {
        match spec {
            FieldSpec::Prime(p) => {
                if !is_prime(p as u64) {
                    return Err(GfError::NotPrime(p));
                }
                let primitive = smallest_generator(p as u64, |g, e| Elem(pow_mod(g.0 as u64, e, p as u64) as u32));
                Ok(Field { spec, order: p, primitive, tables: None })
            }
            FieldSpec::Binary { m, poly } => {
                if m == 0 || m > MAX_BINARY_DEGREE {
                    return Err(GfError::UnsupportedDegree(m));
                }
                if poly_degree(poly) != Some(m) {
                    return Err(GfError::DegreeMismatch { m, poly });
                }
                if !is_irreducible(poly) {
                    return Err(GfError::Reducible { poly });
                }
                let q = 1u32 << m;
                let primitive = smallest_generator(q as u64, |g, e| Elem(clmul_pow(g.0, e, poly)));
                let n = (q - 1) as usize;
                let mut exp = vec![0u32; 2 * n.max(1)];
                let mut log = vec![0u32; q as usize];
                let mut x = 1u32;
                for (i, slot) in exp.iter_mut().take(n).enumerate() {
                    *slot = x;
                    log[x as usize] = i as u32;
                    x = clmul_mod(x, primitive.0, poly);
                }
                for i in n..exp.len() {
                    exp[i] = exp[i - n];
                }
                Ok(Field { spec, order: q, primitive, tables: Some(LogTables { exp, log }) })
            }
        }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn characteristic(&self) -> u32 {
        match self.spec {
            FieldSpec::Prime(p) => p,
            FieldSpec::Binary { .. } => 2,
        }
    }

    /// Validates a raw representation.
    pub fn elem(&self, value: u64) -> Result<Elem, GfError> {
        if value < self.order as u64 {
            Ok(Elem(value as u32))
        } else {
            Err(GfError::OutOfRange { value, q: self.order })
        }
    }

    /// Image of an integer under the ring map Z -> F.
    pub fn from_int(&self, value: i64) -> Elem {
        let c = self.characteristic() as i64;
        Elem(value.rem_euclid(c) as u32)
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match self.spec {
            FieldSpec::Prime(p) => {
                let s = a.0 as u64 + b.0 as u64;
                Elem((s % p as u64) as u32)
            }
            FieldSpec::Binary { .. } => Elem(a.0 ^ b.0),
        }
    }

    pub fn neg(&self, a: Elem) -> Elem {
        match self.spec {
            FieldSpec::Prime(p) if a.0 != 0 => Elem(p - a.0),
            _ => a,
        }
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        match &self.tables {
            Some(t) => Elem(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]),
            None => Elem(((a.0 as u64 * b.0 as u64) % self.order as u64) as u32),
        }
    }

    pub fn inv(&self, a: Elem) -> Result<Elem, GfError> {
        if a.0 == 0 {
            return Err(GfError::ZeroInverse);
        }
        Ok(match &self.tables {
            Some(t) => {
                let n = self.order - 1;
                Elem(t.exp[((n - t.log[a.0 as usize]) % n) as usize])
            }
            None => Elem(inv_mod(a.0 as i64, self.order as i64) as u32),
        })
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.0 == 0 {
            return Elem::ZERO;
        }
        let n = (self.order - 1) as u64;
        match &self.tables {
            Some(t) => Elem(t.exp[((t.log[a.0 as usize] as u64 * (e % n)) % n) as usize]),
            None => Elem(pow_mod(a.0 as u64, e, self.order as u64) as u32),
        }
    }

    /// `a^e` for a possibly negative exponent; `a` must be nonzero when `e < 0`.
    pub fn pow_signed(&self, a: Elem, e: i64) -> Result<Elem, GfError> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(self.inv(a)?, e.unsigned_abs()))
        }
    }

    /// Multiplicative order of a nonzero element, by repeated multiplication.
    pub fn order_of(&self, a: Elem) -> Option<u64> {
        if a.0 == 0 {
            return None;
        }
        let mut x = a;
        let mut k = 1u64;
        while x != Elem::ONE {
            x = self.mul(x, a);
            k += 1;
        }
        Some(k)
    }

    /// Smallest representation with multiplicative order `q - 1`.
    pub fn find_primitive(&self) -> Elem {
        self.primitive
    }

    /// `eta = xi^((q-1)/u)`, an element of order exactly `u`.
    pub fn unity_root(&self, u: u64) -> Result<Elem, GfError> {
        let n = (self.order - 1) as u64;
        if u == 0 || !n.is_multiple_of(u) {
            return Err(GfError::NoUnityRoot { u, q: self.order });
        }
        Ok(self.pow(self.primitive, n / u))
    }

    /// `sum_{g=0}^{u-1} eta^(g x)` evaluated term by term.
    pub fn char_sum(&self, u: u64, x: u64) -> Result<Elem, GfError> {
        let eta = self.unity_root(u)?;
        let base = self.pow(eta, x);
        let mut acc = Elem::ZERO;
        let mut term = Elem::ONE;
        for _ in 0..u {
            acc = self.add(acc, term);
            term = self.mul(term, base);
        }
        Ok(acc)
    }

    pub fn sum<I: IntoIterator<Item = Elem>>(&self, items: I) -> Elem {
        items.into_iter().fold(Elem::ZERO, |acc, x| self.add(acc, x))
    }

    pub fn dot(&self, a: &[Elem], b: &[Elem]) -> Elem {
        debug_assert_eq!(a.len(), b.len());
        a.iter().zip(b).fold(Elem::ZERO, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }

    /// Bytes needed to store one element big-endian.
    pub fn symbol_width(&self) -> usize {
        let bits = 32 - (self.order - 1).leading_zeros();
        (bits as usize).div_ceil(8).max(1)
    }

    /// Number of raw data bits that always fit in one element.
    pub fn payload_bits(&self) -> u32 {
        31 - self.order.leading_zeros()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Field {}

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

fn smallest_generator(q: u64, pow: impl Fn(Elem, u64) -> Elem) -> Elem {
    let factors = prime_factors(q - 1);
    (1..q)
        .map(|g| Elem(g as u32))
        .find(|&g| factors.iter().all(|&p| pow(g, (q - 1) / p) != Elem::ONE))
        .expect("multiplicative group of a finite field is cyclic")
}

fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc
}

fn inv_mod(a: i64, m: i64) -> i64 {
    let (mut r0, mut r1) = (m, a.rem_euclid(m));
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(m)
}

fn poly_degree(p: u32) -> Option<u32> {
    (p != 0).then(|| 31 - p.leading_zeros())
}

/// Remainder of carry-less division.
fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b).expect("nonzero divisor");
    while let Some(da) = poly_degree(a) {
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

/// Irreducible iff no polynomial of degree 1..=m/2 divides it.
pub(crate) fn is_irreducible(poly: u32) -> bool {
    let Some(m) = poly_degree(poly) else { return false };
    if m == 0 {
        return false;
    }
    for d in 1..=m / 2 {
        for low in 0..(1u32 << d) {
            if poly_rem(poly, (1 << d) | low) == 0 {
                return false;
            }
        }
    }
    true
}

fn clmul_mod(a: u32, b: u32, poly: u32) -> u32 {
    let m = poly_degree(poly).unwrap();
    let mut acc = 0u32;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & (1 << m) != 0 {
            a ^= poly;
        }
    }
    acc
}

fn clmul_pow(a: u32, mut e: u64, poly: u32) -> u32 {
    let mut acc = 1u32;
    let mut base = a;
    while e > 0 {
        if e & 1 == 1 {
            acc = clmul_mod(acc, base, poly);
        }
        base = clmul_mod(base, base, poly);
        e >>= 1;
    }
    acc
}
