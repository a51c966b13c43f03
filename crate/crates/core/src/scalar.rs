//! Exact coefficient rings.
//!
//! Every tensor coefficient is a [`Scalar`] tagged with its [`Ring`]. Four
//! rings are supported: the rationals, prime fields, the cyclotomic integers
//! `Z[ζ]` for a primitive `p`-th root of unity `ζ`, and polynomials in a
//! formal variable `ε` over any of the others. All arithmetic is exact and
//! every value is kept in a canonical form, so derived equality is ring
//! equality.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Coefficient ring descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "RingDoc", try_from = "RingDoc")]
pub enum Ring {
    Rational,
    /// Integers modulo a prime.
    PrimeField(u64),
    /// `Z[ζ]` with `ζ` a primitive root of unity of the given order.
    Cyclotomic(u32),
    /// Polynomials in `ε` over the inner ring.
    EpsPoly(Box<Ring>),
}

impl Ring {
    pub fn prime_field(modulus: u64) -> Result<Self> {
        if is_prime(modulus) {
            Ok(Ring::PrimeField(modulus))
        } else {
            Err(Error::NotPrime(modulus))
        }
    }

    pub fn cyclotomic(order: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument("cyclotomic order must be positive".into()));
        }
        Ok(Ring::Cyclotomic(order))
    }

    pub fn eps(inner: Ring) -> Self {
        Ring::EpsPoly(Box::new(inner))
    }

    /// Checks the invariants a hand-built descriptor must satisfy.
    pub fn validate(&self) -> Result<()> {
        match self {
            Ring::Rational => Ok(()),
            Ring::PrimeField(m) => Ring::prime_field(*m).map(|_| ()),
            Ring::Cyclotomic(p) => Ring::cyclotomic(*p).map(|_| ()),
            Ring::EpsPoly(inner) => inner.validate(),
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Ring::Rational => Scalar::Rational(BigRational::zero()),
            Ring::PrimeField(m) => Scalar::Residue { modulus: *m, value: 0 },
            Ring::Cyclotomic(p) => Scalar::Cyclotomic { order: *p, coeffs: Vec::new() },
            Ring::EpsPoly(inner) => Scalar::Eps { inner: (**inner).clone(), coeffs: Vec::new() },
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_int(1)
    }

    pub fn from_int(&self, v: i64) -> Scalar {
        self.from_bigint(&BigInt::from(v))
    }

    pub fn from_bigint(&self, v: &BigInt) -> Scalar {
        match self {
            Ring::Rational => Scalar::Rational(BigRational::from_integer(v.clone())),
            Ring::PrimeField(m) => Scalar::Residue { modulus: *m, value: reduce_mod(v, *m) },
            Ring::Cyclotomic(p) => Scalar::cyclotomic(*p, vec![v.clone()]),
            Ring::EpsPoly(inner) => Scalar::eps_poly((**inner).clone(), vec![inner.from_bigint(v)]),
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Rational => write!(f, "Q"),
            Ring::PrimeField(m) => write!(f, "GF({m})"),
            Ring::Cyclotomic(p) => write!(f, "Z[zeta_{p}]"),
            Ring::EpsPoly(inner) => write!(f, "{inner}[eps]"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RingDoc {
    Rational,
    Prime { modulus: u64 },
    Cyclotomic { order: u32 },
    Eps { inner: Box<RingDoc> },
}

impl From<Ring> for RingDoc {
    fn from(r: Ring) -> Self {
        match r {
            Ring::Rational => RingDoc::Rational,
            Ring::PrimeField(modulus) => RingDoc::Prime { modulus },
            Ring::Cyclotomic(order) => RingDoc::Cyclotomic { order },
            Ring::EpsPoly(inner) => RingDoc::Eps { inner: Box::new((*inner).into()) },
        }
    }
}

impl TryFrom<RingDoc> for Ring {
    type Error = Error;

    fn try_from(d: RingDoc) -> Result<Self> {
        match d {
            RingDoc::Rational => Ok(Ring::Rational),
            RingDoc::Prime { modulus } => Ring::prime_field(modulus),
            RingDoc::Cyclotomic { order } => Ring::cyclotomic(order),
            RingDoc::Eps { inner } => Ok(Ring::eps(Ring::try_from(*inner)?)),
        }
    }
}

/// An exact ring element in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    /// Canonical residue in `[0, modulus)`.
    Residue { modulus: u64, value: u64 },
    /// Remainder modulo the `order`-th cyclotomic polynomial, low degree
    /// first, without trailing zeros.
    Cyclotomic { order: u32, coeffs: Vec<BigInt> },
    /// Coefficients of `ε^0, ε^1, ...`, without trailing zeros.
    Eps { inner: Ring, coeffs: Vec<Scalar> },
}

impl Scalar {
    pub fn rational(num: i64, den: i64) -> Scalar {
        Scalar::Rational(BigRational::new(num.into(), den.into()))
    }

    /// `Σ coeffs[i] ζ^i`, reduced to normal form.
    pub fn cyclotomic(order: u32, coeffs: Vec<BigInt>) -> Scalar {
        let modulus = cyclotomic_polynomial(order);
        Scalar::Cyclotomic { order, coeffs: poly_rem_monic(coeffs, &modulus) }
    }

    /// `ζ^e` for a primitive root of unity `ζ` of the given order.
    pub fn root_of_unity(order: u32, e: u64) -> Scalar {
        let e = (e % order as u64) as usize;
        let mut coeffs = vec![BigInt::zero(); e + 1];
        coeffs[e] = BigInt::one();
        Scalar::cyclotomic(order, coeffs)
    }

    pub fn eps_poly(inner: Ring, mut coeffs: Vec<Scalar>) -> Scalar {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Scalar::Eps { inner, coeffs }
    }

    /// `ε^degree`, embedded in the eps ring over `inner`.
    pub fn eps_monomial(inner: &Ring, degree: usize) -> Scalar {
        let mut coeffs = vec![inner.zero(); degree + 1];
        coeffs[degree] = inner.one();
        Scalar::Eps { inner: inner.clone(), coeffs }
    }

    pub fn ring(&self) -> Ring {
        match self {
            Scalar::Rational(_) => Ring::Rational,
            Scalar::Residue { modulus, .. } => Ring::PrimeField(*modulus),
            Scalar::Cyclotomic { order, .. } => Ring::Cyclotomic(*order),
            Scalar::Eps { inner, .. } => Ring::eps(inner.clone()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Residue { value, .. } => *value == 0,
            Scalar::Cyclotomic { coeffs, .. } => coeffs.is_empty(),
            Scalar::Eps { coeffs, .. } => coeffs.is_empty(),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.ring().one()
    }

    fn mismatch(&self, other: &Scalar) -> Error {
        Error::RingMismatch { left: self.ring(), right: other.ring() }
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a + b)),
            (Scalar::Residue { modulus: m, value: a }, Scalar::Residue { modulus: n, value: b }) if m == n => {
                let v = (*a as u128 + *b as u128) % *m as u128;
                Ok(Scalar::Residue { modulus: *m, value: v as u64 })
            }
            (Scalar::Cyclotomic { order: p, coeffs: a }, Scalar::Cyclotomic { order: q, coeffs: b }) if p == q => {
                let len = a.len().max(b.len());
                let mut out = Vec::with_capacity(len);
                for i in 0..len {
                    let x = a.get(i).cloned().unwrap_or_default();
                    let y = b.get(i).cloned().unwrap_or_default();
                    out.push(x + y);
                }
                trim_ints(&mut out);
                Ok(Scalar::Cyclotomic { order: *p, coeffs: out })
            }
            (Scalar::Eps { inner: r, coeffs: a }, Scalar::Eps { inner: s, coeffs: b }) if r == s => {
                let len = a.len().max(b.len());
                let zero = r.zero();
                let mut out = Vec::with_capacity(len);
                for i in 0..len {
                    out.push(a.get(i).unwrap_or(&zero).add(b.get(i).unwrap_or(&zero))?);
                }
                Ok(Scalar::eps_poly(r.clone(), out))
            }
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Residue { modulus, value } => {
                Scalar::Residue { modulus: *modulus, value: (*modulus - *value) % *modulus }
            }
            Scalar::Cyclotomic { order, coeffs } => {
                Scalar::Cyclotomic { order: *order, coeffs: coeffs.iter().map(|c| -c).collect() }
            }
            Scalar::Eps { inner, coeffs } => {
                Scalar::Eps { inner: inner.clone(), coeffs: coeffs.iter().map(Scalar::neg).collect() }
            }
        }
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a * b)),
            (Scalar::Residue { modulus: m, value: a }, Scalar::Residue { modulus: n, value: b }) if m == n => {
                let v = (*a as u128 * *b as u128) % *m as u128;
                Ok(Scalar::Residue { modulus: *m, value: v as u64 })
            }
            (Scalar::Cyclotomic { order: p, coeffs: a }, Scalar::Cyclotomic { order: q, coeffs: b }) if p == q => {
                if a.is_empty() || b.is_empty() {
                    return Ok(Scalar::Cyclotomic { order: *p, coeffs: Vec::new() });
                }
                let mut prod = vec![BigInt::zero(); a.len() + b.len() - 1];
                for (i, x) in a.iter().enumerate() {
                    for (j, y) in b.iter().enumerate() {
                        prod[i + j] += x * y;
                    }
                }
                Ok(Scalar::cyclotomic(*p, prod))
            }
            (Scalar::Eps { inner: r, coeffs: a }, Scalar::Eps { inner: s, coeffs: b }) if r == s => {
                if a.is_empty() || b.is_empty() {
                    return Ok(r.clone().eps_zero());
                }
                let mut prod = vec![r.zero(); a.len() + b.len() - 1];
                for (i, x) in a.iter().enumerate() {
                    for (j, y) in b.iter().enumerate() {
                        prod[i + j] = prod[i + j].add(&x.mul(y)?)?;
                    }
                }
                Ok(Scalar::eps_poly(r.clone(), prod))
            }
            _ => Err(self.mismatch(other)),
        }
    }

    /// Multiplies by an exact rational, failing when the result does not
    /// live in this ring (a non-invertible denominator in a prime field, or
    /// a non-integral cyclotomic coefficient).
    pub fn scale(&self, r: &BigRational) -> Result<Scalar> {
        let not_rep = || Error::ScaleNotRepresentable { scale: r.to_string(), ring: self.ring() };
        match self {
            Scalar::Rational(a) => Ok(Scalar::Rational(a * r)),
            Scalar::Residue { modulus, value } => {
                let m = *modulus;
                let den = reduce_mod(r.denom(), m);
                if den == 0 {
                    return Err(not_rep());
                }
                let inv = mod_pow(den, m - 2, m);
                let num = reduce_mod(r.numer(), m);
                let v = (*value as u128 * num as u128 % m as u128) * inv as u128 % m as u128;
                Ok(Scalar::Residue { modulus: m, value: v as u64 })
            }
            Scalar::Cyclotomic { order, coeffs } => {
                let mut out = Vec::with_capacity(coeffs.len());
                for c in coeffs {
                    let (q, rem) = (c * r.numer()).div_rem(r.denom());
                    if !rem.is_zero() {
                        return Err(not_rep());
                    }
                    out.push(q);
                }
                trim_ints(&mut out);
                Ok(Scalar::Cyclotomic { order: *order, coeffs: out })
            }
            Scalar::Eps { inner, coeffs } => {
                let scaled = coeffs.iter().map(|c| c.scale(r)).collect::<Result<Vec<_>>>()?;
                Ok(Scalar::eps_poly(inner.clone(), scaled))
            }
        }
    }

    /// Smallest `ε`-degree with a nonzero coefficient, and that coefficient.
    pub fn eps_lowest_order(&self) -> Result<(usize, Scalar)> {
        match self {
            Scalar::Eps { coeffs, .. } => coeffs
                .iter()
                .enumerate()
                .find(|(_, c)| !c.is_zero())
                .map(|(d, c)| (d, c.clone()))
                .ok_or(Error::ZeroPolynomial),
            other => Err(Error::NotEpsPoly(other.ring())),
        }
    }

    /// Coefficient of `ε^degree` (zero past the end).
    pub fn eps_coeff(&self, degree: usize) -> Result<Scalar> {
        match self {
            Scalar::Eps { inner, coeffs } => Ok(coeffs.get(degree).cloned().unwrap_or_else(|| inner.zero())),
            other => Err(Error::NotEpsPoly(other.ring())),
        }
    }

    /// JSON representation; the ring itself is carried separately.
    pub fn to_json(&self) -> Value {
        match self {
            Scalar::Rational(r) => Value::String(format!("{}/{}", r.numer(), r.denom())),
            Scalar::Residue { value, .. } => Value::from(*value),
            Scalar::Cyclotomic { coeffs, .. } => Value::Array(coeffs.iter().map(bigint_json).collect()),
            Scalar::Eps { coeffs, .. } => Value::Array(coeffs.iter().map(Scalar::to_json).collect()),
        }
    }

    pub fn from_json(ring: &Ring, v: &Value) -> Result<Scalar> {
        let bad = |detail: &str| Error::MalformedScalar { ring: ring.clone(), detail: detail.to_string() };
        match ring {
            Ring::Rational => match v {
                Value::String(s) => {
                    let (n, d) = match s.split_once('/') {
                        Some((n, d)) => (n.trim(), d.trim()),
                        None => (s.trim(), "1"),
                    };
                    let n: BigInt = n.parse().map_err(|_| bad(s))?;
                    let d: BigInt = d.parse().map_err(|_| bad(s))?;
                    if d.is_zero() {
                        return Err(bad("zero denominator"));
                    }
                    Ok(Scalar::Rational(BigRational::new(n, d)))
                }
                Value::Number(_) => Ok(ring.from_bigint(&json_bigint(v).ok_or_else(|| bad("not an integer"))?)),
                _ => Err(bad("expected \"num/den\" string")),
            },
            Ring::PrimeField(_) | Ring::Cyclotomic(1) if v.is_number() || v.is_string() => {
                Ok(ring.from_bigint(&json_bigint(v).ok_or_else(|| bad("not an integer"))?))
            }
            Ring::PrimeField(_) => Err(bad("expected integer residue")),
            Ring::Cyclotomic(p) => {
                let arr = v.as_array().ok_or_else(|| bad("expected integer array"))?;
                let coeffs = arr
                    .iter()
                    .map(|c| json_bigint(c).ok_or_else(|| bad("non-integer coefficient")))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Scalar::cyclotomic(*p, coeffs))
            }
            Ring::EpsPoly(inner) => {
                let arr = v.as_array().ok_or_else(|| bad("expected coefficient array"))?;
                let coeffs = arr.iter().map(|c| Scalar::from_json(inner, c)).collect::<Result<Vec<_>>>()?;
                Ok(Scalar::eps_poly((**inner).clone(), coeffs))
            }
        }
    }
}

impl Ring {
    fn eps_zero(self) -> Scalar {
        Scalar::Eps { inner: self, coeffs: Vec::new() }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Residue { value, .. } => write!(f, "{value}"),
            Scalar::Cyclotomic { .. } | Scalar::Eps { .. } => write!(f, "{}", self.to_json()),
        }
    }
}

fn bigint_json(b: &BigInt) -> Value {
    match b.to_i64() {
        Some(v) => Value::from(v),
        None => Value::String(b.to_string()),
    }
}

fn json_bigint(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).or_else(|| n.as_u64().map(BigInt::from)),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

fn trim_ints(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

fn reduce_mod(v: &BigInt, m: u64) -> u64 {
    let m = BigInt::from(m);
    let r = v.mod_floor(&m);
    r.to_u64().expect("residue fits in u64")
}

fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u128 = 1 % m as u128;
    let mut b = base as u128 % m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m as u128;
        }
        b = b * b % m as u128;
        exp >>= 1;
    }
    acc as u64
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Remainder of `a` modulo a monic integer polynomial, trimmed.
fn poly_rem_monic(mut a: Vec<BigInt>, modulus: &[BigInt]) -> Vec<BigInt> {
    let deg = modulus.len() - 1;
    while a.len() > deg {
        let lead = a.pop().expect("nonempty");
        if lead.is_zero() {
            continue;
        }
        let shift = a.len() - deg;
        for (i, m) in modulus[..deg].iter().enumerate() {
            a[shift + i] -= &lead * m;
        }
    }
    trim_ints(&mut a);
    a
}

/// Exact quotient of `a` by a monic divisor; panics if the division leaves a remainder.
fn poly_div_monic(a: &[BigInt], divisor: &[BigInt]) -> Vec<BigInt> {
    let dd = divisor.len() - 1;
    let mut rem = a.to_vec();
    let mut quot = vec![BigInt::zero(); a.len() - dd];
    for k in (0..quot.len()).rev() {
        let lead = rem[k + dd].clone();
        if lead.is_zero() {
            continue;
        }
        for (i, d) in divisor.iter().enumerate() {
            rem[k + i] -= &lead * d;
        }
        quot[k] = lead;
    }
    assert!(rem.iter().all(Zero::is_zero), "cyclotomic division must be exact");
    quot
}

/// The `n`-th cyclotomic polynomial, low degree first.
///
/// Built as `(x^n - 1) / Π_{d | n, d < n} Φ_d`; results are memoised.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("cache lock").get(&n) {
        return hit.clone();
    }
    let mut poly = vec![BigInt::zero(); n as usize + 1];
    poly[0] = -BigInt::one();
    poly[n as usize] = BigInt::one();
    for d in (1..n).filter(|d| n % d == 0) {
        poly = poly_div_monic(&poly, &cyclotomic_polynomial(d));
    }
    let poly = Arc::new(poly);
    cache.lock().expect("cache lock").insert(n, poly.clone());
    poly
}

/// Degree of the `n`-th cyclotomic polynomial.
pub fn euler_phi(n: u32) -> u32 {
    (cyclotomic_polynomial(n).len() - 1) as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(m: u64, v: i64) -> Scalar {
        Ring::prime_field(m).unwrap().from_int(v)
    }

    #[test]
    fn prime_field_arithmetic() {
        assert_eq!(gf(3, 2).mul(&gf(3, 2)).unwrap(), gf(3, 1));
        assert_eq!(gf(3, -1), gf(3, 2));
        assert_eq!(gf(7, 3).add(&gf(7, 4)).unwrap(), gf(7, 0));
        assert!(Ring::prime_field(4).is_err());
        assert!(Ring::prime_field(1).is_err());
    }

    #[test]
    fn roots_of_unity_cube() {
        let z = Scalar::root_of_unity(3, 1);
        let z2 = Scalar::root_of_unity(3, 2);
        assert!(z.mul(&z2).unwrap().is_one());
        let one = Ring::Cyclotomic(3).one();
        let sum = one.add(&z).unwrap().add(&z2).unwrap();
        assert!(sum.is_zero());
    }

    #[test]
    fn composite_order_root_sums_vanish() {
        for p in [4u32, 6, 8, 9, 12] {
            for d in 1..p {
                let mut acc = Ring::Cyclotomic(p).zero();
                for l in 0..p {
                    acc = acc.add(&Scalar::root_of_unity(p, (l * d) as u64)).unwrap();
                }
                assert!(acc.is_zero(), "p={p} d={d}");
            }
            assert!(Scalar::root_of_unity(p, p as u64).is_one());
        }
    }

    #[test]
    fn cyclotomic_polynomials_have_expected_degree() {
        for (n, phi) in [(1, 1), (2, 1), (3, 2), (4, 2), (6, 2), (7, 6), (10, 4), (12, 4)] {
            assert_eq!(euler_phi(n), phi, "n={n}");
        }
        let phi6: Vec<i64> = cyclotomic_polynomial(6).iter().map(|c| c.to_i64().unwrap()).collect();
        assert_eq!(phi6, vec![1, -1, 1]);
    }

    #[test]
    fn ring_mismatch_is_an_error() {
        let a = gf(3, 1);
        let b = gf(5, 1);
        assert!(matches!(a.add(&b), Err(Error::RingMismatch { .. })));
        assert!(matches!(a.mul(&Scalar::rational(1, 2)), Err(Error::RingMismatch { .. })));
    }

    #[test]
    fn eps_lowest_order_examples() {
        let q = Ring::Rational;
        let p = Scalar::eps_poly(q.clone(), vec![q.zero(), q.zero(), q.from_int(5)]);
        assert_eq!(p.eps_lowest_order().unwrap(), (2, q.from_int(5)));
        let c = Scalar::eps_poly(q.clone(), vec![q.from_int(3)]);
        assert_eq!(c.eps_lowest_order().unwrap(), (0, q.from_int(3)));
        let e = Scalar::eps_poly(q.clone(), vec![q.zero(), q.one(), q.zero(), q.one()]);
        assert_eq!(e.eps_lowest_order().unwrap(), (1, q.one()));
        let zero = Ring::eps(q.clone()).zero();
        assert!(matches!(zero.eps_lowest_order(), Err(Error::ZeroPolynomial)));
        assert!(matches!(q.one().eps_lowest_order(), Err(Error::NotEpsPoly(_))));
    }

    #[test]
    fn eps_trailing_zeros_are_trimmed() {
        let q = Ring::Rational;
        let p = Scalar::eps_poly(q.clone(), vec![q.one(), q.zero(), q.zero()]);
        assert_eq!(p, Ring::eps(q.clone()).one());
        let m = Scalar::eps_monomial(&q, 2);
        let diff = m.sub(&m).unwrap();
        assert_eq!(diff, Ring::eps(q).zero());
    }

    #[test]
    fn scaling_respects_the_ring() {
        let third = BigRational::new(1.into(), 3.into());
        assert_eq!(gf(7, 1).scale(&third).unwrap(), gf(7, 5));
        assert!(gf(3, 1).scale(&third).is_err());
        let three = Ring::Cyclotomic(5).from_int(3);
        assert!(three.scale(&third).unwrap().is_one());
        assert!(Scalar::root_of_unity(5, 1).scale(&third).is_err());
    }

    #[test]
    fn json_round_trip() {
        let rings = [
            Ring::Rational,
            Ring::PrimeField(11),
            Ring::Cyclotomic(5),
            Ring::eps(Ring::Cyclotomic(3)),
        ];
        for r in rings {
            let s = r.from_int(-4);
            let back = Scalar::from_json(&r, &s.to_json()).unwrap();
            assert_eq!(s, back);
            let doc = serde_json::to_string(&r).unwrap();
            let r2: Ring = serde_json::from_str(&doc).unwrap();
            assert_eq!(r, r2);
        }
        assert_eq!(Scalar::rational(2, 4).to_json(), Value::String("1/2".into()));
        assert!(serde_json::from_str::<Ring>(r#"{"kind":"prime","modulus":9}"#).is_err());
    }
}
