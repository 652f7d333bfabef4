//! Roots of unity and exact arithmetic in the cyclotomic field `Q(ζ_M)`.
//!
//! [`RootOfUnity`] is plain exponent arithmetic modulo `M` and is the scalar
//! used by every classification routine. [`CycNum`] is a general field
//! element, stored as a rational-coefficient polynomial in `ζ_M` reduced
//! modulo the `M`-th cyclotomic polynomial; it only shows up where sums of
//! roots of unity arise (matrix realizations).

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// `ζ_M^exp` with `ζ_M` a fixed primitive `M`-th root of unity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawRoot", into = "RawRoot")]
pub struct RootOfUnity {
    order: u64,
    exp: u64,
}

#[derive(Serialize, Deserialize)]
struct RawRoot {
    #[serde(rename = "M")]
    order: u64,
    #[serde(rename = "e")]
    exp: u64,
}

impl TryFrom<RawRoot> for RootOfUnity {
    type Error = Error;

    fn try_from(raw: RawRoot) -> Result<Self> {
        if raw.order == 0 {
            return Err(Error::Parse("root of unity with M = 0".into()));
        }
        if raw.exp >= raw.order {
            return Err(Error::Parse(format!(
                "exponent {} not reduced modulo {}",
                raw.exp, raw.order
            )));
        }
        Ok(RootOfUnity {
            order: raw.order,
            exp: raw.exp,
        })
    }
}

impl From<RootOfUnity> for RawRoot {
    fn from(r: RootOfUnity) -> Self {
        RawRoot {
            order: r.order,
            exp: r.exp,
        }
    }
}

impl RootOfUnity {
    /// Panics if `order == 0`.
    pub fn new(order: u64, exp: i64) -> Self {
        assert!(order > 0, "root of unity of order 0");
        RootOfUnity {
            order,
            exp: exp.rem_euclid(order as i64) as u64,
        }
    }

    pub fn one(order: u64) -> Self {
        Self::new(order, 0)
    }

    /// The distinguished primitive root `ζ_M`.
    pub fn primitive(order: u64) -> Self {
        Self::new(order, 1)
    }

    /// `-1` as an element of `μ_M`; requires `M` even.
    pub fn minus_one(order: u64) -> Self {
        assert!(order.is_multiple_of(2), "-1 is not in mu_{order}");
        Self::new(order, (order / 2) as i64)
    }

    pub fn order(self) -> u64 {
        self.order
    }

    pub fn exp(self) -> u64 {
        self.exp
    }

    pub fn is_one(self) -> bool {
        self.exp == 0
    }

    pub fn inv(self) -> Self {
        RootOfUnity {
            order: self.order,
            exp: (self.order - self.exp) % self.order,
        }
    }

    pub fn pow(self, k: i64) -> Self {
        let m = self.order as i128;
        let e = (self.exp as i128 * k as i128).rem_euclid(m);
        RootOfUnity {
            order: self.order,
            exp: e as u64,
        }
    }

    pub fn checked_mul(self, other: Self) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::OrderMismatch {
                left: self.order,
                right: other.order,
            });
        }
        Ok(RootOfUnity {
            order: self.order,
            exp: (self.exp + other.exp) % self.order,
        })
    }

    /// Re-express in `μ_ambient`; `self.order` must divide `ambient`.
    pub fn lift(self, ambient: u64) -> Result<Self> {
        if ambient == 0 || !ambient.is_multiple_of(self.order) {
            return Err(Error::IncompatibleOrders {
                order: self.order,
                ambient,
            });
        }
        Ok(RootOfUnity {
            order: ambient,
            exp: self.exp * (ambient / self.order),
        })
    }

    /// Re-express in `μ_order`; fails unless `self` lies in that subgroup.
    pub fn restrict(self, order: u64) -> Result<Self> {
        if order == 0 || !(self.exp * order).is_multiple_of(self.order) {
            return Err(Error::IncompatibleOrders {
                order: self.multiplicative_order(),
                ambient: order,
            });
        }
        Ok(RootOfUnity {
            order,
            exp: self.exp * order / self.order,
        })
    }

    /// Least `k ≥ 1` with `self^k = 1`.
    pub fn multiplicative_order(self) -> u64 {
        self.order / self.exp.gcd(&self.order)
    }

    /// All `x ∈ μ_M` with `x^k = target`, in increasing exponent order.
    pub fn nth_roots(target: RootOfUnity, k: u64) -> Vec<RootOfUnity> {
        let m = target.order;
        let k = k % m;
        let g = k.gcd(&m);
        if !target.exp.is_multiple_of(g) {
            return Vec::new();
        }
        let step = m / g;
        let base = if step == 1 {
            0
        } else {
            let kk = (k / g) % step;
            let inv = mod_inverse(kk, step).expect("k/g is a unit modulo M/g");
            ((target.exp / g) % step) as u128 * inv as u128 % step as u128
        } as u64;
        (0..g)
            .map(|j| RootOfUnity {
                order: m,
                exp: base + j * step,
            })
            .collect()
    }
}

impl Mul for RootOfUnity {
    type Output = RootOfUnity;

    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.order, rhs.order, "root of unity order mismatch");
        RootOfUnity {
            order: self.order,
            exp: (self.exp + rhs.exp) % self.order,
        }
    }
}

impl Div for RootOfUnity {
    type Output = RootOfUnity;

    fn div(self, rhs: Self) -> Self {
        self * rhs.inv()
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exp {
            0 => write!(f, "1"),
            e if 2 * e == self.order => write!(f, "-1"),
            e => write!(f, "z{}^{}", self.order, e),
        }
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

// ---------------------------------------------------------------------------
// Cyclotomic polynomials

fn poly_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<BigInt>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients (constant term first) of the monic `M`-th cyclotomic
/// polynomial, obtained by dividing `x^M - 1` by `Φ_d` for every proper
/// divisor `d` of `M`.
pub fn cyclotomic_poly(order: u64) -> Vec<BigInt> {
    cyclotomic_poly_shared(order).as_ref().clone()
}

fn cyclotomic_poly_shared(order: u64) -> Arc<Vec<BigInt>> {
    assert!(order >= 1, "cyclotomic polynomial of order 0");
    if let Some(p) = poly_cache().lock().unwrap().get(&order) {
        return Arc::clone(p);
    }
    let mut num = vec![BigInt::zero(); order as usize + 1];
    num[0] = BigInt::from(-1);
    num[order as usize] = BigInt::one();
    for d in 1..order {
        if order.is_multiple_of(d) {
            let phi_d = cyclotomic_poly_shared(d);
            num = int_poly_div_exact(&num, &phi_d);
        }
    }
    let shared = Arc::new(num);
    poly_cache()
        .lock()
        .unwrap()
        .insert(order, Arc::clone(&shared));
    shared
}

/// Quotient of `a` by the monic polynomial `b`; panics on a nonzero remainder.
fn int_poly_div_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    debug_assert!(b[db].is_one());
    let mut rem = a.to_vec();
    if rem.len() <= db {
        return vec![BigInt::zero()];
    }
    let mut quot = vec![BigInt::zero(); rem.len() - db];
    for k in (0..quot.len()).rev() {
        let c = rem[k + db].clone();
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            rem[k + j] -= &c * bj;
        }
        quot[k] = c;
    }
    assert!(rem.iter().all(Zero::is_zero), "inexact cyclotomic division");
    quot
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

// ---------------------------------------------------------------------------
// Field data

struct FieldData {
    phi: usize,
    /// Low coefficients of the monic modulus (degree `phi` term omitted).
    modulus: Vec<i64>,
    /// `ζ^k` reduced, for `0 <= k < M`.
    powers: Vec<Vec<BigRational>>,
}

fn field(order: u64) -> Arc<FieldData> {
    thread_local! {
        static LAST: RefCell<Option<(u64, Arc<FieldData>)>> = const { RefCell::new(None) };
    }
    LAST.with(|last| {
        if let Some((o, f)) = &*last.borrow() {
            if *o == order {
                return Arc::clone(f);
            }
        }
        let f = field_shared(order);
        *last.borrow_mut() = Some((order, Arc::clone(&f)));
        f
    })
}

fn field_shared(order: u64) -> Arc<FieldData> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<FieldData>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(f) = cache.lock().unwrap().get(&order) {
        return Arc::clone(f);
    }
    let poly = cyclotomic_poly_shared(order);
    let phi = poly.len() - 1;
    let modulus: Vec<i64> = poly[..phi]
        .iter()
        .map(|c| c.to_i64().expect("cyclotomic coefficient fits in i64"))
        .collect();
    let mut powers = Vec::with_capacity(order as usize);
    let mut cur = vec![BigRational::zero(); phi];
    cur[0] = BigRational::one();
    for _ in 0..order {
        powers.push(cur.clone());
        // multiply by x and reduce the overflowing top coefficient
        let carry = cur[phi - 1].clone();
        for i in (1..phi).rev() {
            cur[i] = cur[i - 1].clone();
        }
        cur[0] = BigRational::zero();
        if !carry.is_zero() {
            for (i, &m) in modulus.iter().enumerate() {
                sub_scaled(&mut cur[i], &carry, m);
            }
        }
    }
    let data = Arc::new(FieldData {
        phi,
        modulus,
        powers,
    });
    cache.lock().unwrap().insert(order, Arc::clone(&data));
    data
}

/// `acc -= c * m` for a small integer `m`.
fn sub_scaled(acc: &mut BigRational, c: &BigRational, m: i64) {
    match m {
        0 => {}
        1 => *acc -= c,
        -1 => *acc += c,
        _ => *acc -= c * BigRational::from_integer(BigInt::from(m)),
    }
}

fn reduce(field: &FieldData, mut p: Vec<BigRational>) -> Vec<BigRational> {
    let phi = field.phi;
    if p.len() > phi {
        for k in (phi..p.len()).rev() {
            if p[k].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut p[k], BigRational::zero());
            for (j, &m) in field.modulus.iter().enumerate() {
                sub_scaled(&mut p[k - phi + j], &c, m);
            }
        }
        p.truncate(phi);
    }
    p.resize(phi, BigRational::zero());
    p
}

// ---------------------------------------------------------------------------
// Rational polynomial helpers (used for inversion)

fn trim(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = a.to_vec();
    trim(&mut rem);
    let db = b.len() - 1;
    let lead = &b[db];
    if rem.len() <= db {
        return (Vec::new(), rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    for k in (0..quot.len()).rev() {
        let c = &rem[k + db] / lead;
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                rem[k + j] -= &c * bj;
            }
        }
        quot[k] = c;
    }
    trim(&mut rem);
    trim(&mut quot);
    (quot, rem)
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    trim(&mut out);
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(&mut out);
    out
}

// ---------------------------------------------------------------------------
// CycNum

/// An element of `Q(ζ_M)`, always reduced modulo `Φ_M`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycNum {
    order: u64,
    coeffs: Vec<BigRational>,
}

/// Operation selector for [`cyc_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithKind {
    Add,
    Mul,
    Inv,
    Neg,
}

/// Checked field arithmetic with the error reporting of the public API.
pub fn cyc_arith(kind: ArithKind, a: &CycNum, b: Option<&CycNum>) -> Result<CycNum> {
    let second = || b.ok_or_else(|| Error::InvalidArgument("missing second operand".into()));
    match kind {
        ArithKind::Add => a.try_add(second()?),
        ArithKind::Mul => a.try_mul(second()?),
        ArithKind::Inv => a.inv(),
        ArithKind::Neg => Ok(-a),
    }
}

/// `ζ_M^{exp·(M/r.order)}`: the image of `r` in `Q(ζ_M)`.
pub fn embed_root(ambient: u64, r: RootOfUnity) -> Result<CycNum> {
    let lifted = r.lift(ambient)?;
    Ok(CycNum::zeta_pow(ambient, lifted.exp() as i64))
}

impl CycNum {
    pub fn zero(order: u64) -> Self {
        let phi = field(order).phi;
        CycNum {
            order,
            coeffs: vec![BigRational::zero(); phi],
        }
    }

    pub fn one(order: u64) -> Self {
        Self::from_rational(order, BigRational::one())
    }

    pub fn from_int(order: u64, value: i64) -> Self {
        Self::from_rational(order, BigRational::from_integer(BigInt::from(value)))
    }

    pub fn from_rational(order: u64, value: BigRational) -> Self {
        let mut out = Self::zero(order);
        out.coeffs[0] = value;
        out
    }

    /// `ζ_M^k` for any integer `k`.
    pub fn zeta_pow(order: u64, k: i64) -> Self {
        let f = field(order);
        let idx = k.rem_euclid(order as i64) as usize;
        CycNum {
            order,
            coeffs: f.powers[idx].clone(),
        }
    }

    /// Builds from a coefficient vector of any length, reducing as needed.
    pub fn from_coeffs(order: u64, coeffs: Vec<BigRational>) -> Self {
        let f = field(order);
        CycNum {
            order,
            coeffs: reduce(&f, coeffs),
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    fn check_order(&self, other: &CycNum) -> Result<()> {
        if self.order != other.order {
            return Err(Error::OrderMismatch {
                left: self.order,
                right: other.order,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &CycNum) -> Result<CycNum> {
        self.check_order(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn try_sub(&self, other: &CycNum) -> Result<CycNum> {
        self.check_order(other)?;
        let mut out = self.clone();
        for (c, d) in out.coeffs.iter_mut().zip(&other.coeffs) {
            if !d.is_zero() {
                *c -= d;
            }
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &CycNum) -> Result<CycNum> {
        self.check_order(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn add_unchecked(&self, other: &CycNum) -> CycNum {
        let mut out = self.clone();
        out.add_assign_ref(other);
        out
    }

    /// In-place `self += other`; panics on mismatched orders.
    pub fn add_assign_ref(&mut self, other: &CycNum) {
        assert_eq!(self.order, other.order, "cyclotomic order mismatch");
        for (c, d) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !d.is_zero() {
                *c += d;
            }
        }
    }

    /// The rational value, when `self` lies in `Q`.
    fn as_rational(&self) -> Option<&BigRational> {
        self.coeffs[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| &self.coeffs[0])
    }

    fn mul_unchecked(&self, other: &CycNum) -> CycNum {
        if let Some(q) = other.as_rational() {
            return self.scale(q);
        }
        if let Some(q) = self.as_rational() {
            return other.scale(q);
        }
        let f = field(self.order);
        let phi = f.phi;
        let mut prod = vec![BigRational::zero(); 2 * phi - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        CycNum {
            order: self.order,
            coeffs: reduce(&f, prod),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against `Φ_M`.
    pub fn inv(&self) -> Result<CycNum> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f = field(self.order);
        let mut r0: Vec<BigRational> = f
            .modulus
            .iter()
            .map(|&m| BigRational::from_integer(BigInt::from(m)))
            .collect();
        r0.push(BigRational::one());
        let mut r1 = self.coeffs.clone();
        trim(&mut r1);
        let mut s0: Vec<BigRational> = Vec::new();
        let mut s1: Vec<BigRational> = vec![BigRational::one()];
        while !r1.is_empty() {
            let (q, r) = poly_divrem(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r0 is a nonzero constant since Φ_M is irreducible
        debug_assert_eq!(r0.len(), 1);
        let c = r0[0].clone();
        let scaled: Vec<BigRational> = s0.iter().map(|x| x / &c).collect();
        Ok(CycNum::from_coeffs(self.order, scaled))
    }

    pub fn scale(&self, q: &BigRational) -> CycNum {
        if q.is_one() {
            return self.clone();
        }
        CycNum {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    pub fn pow(&self, mut k: u64) -> CycNum {
        let mut base = self.clone();
        let mut acc = CycNum::one(self.order);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            k >>= 1;
        }
        acc
    }

    /// Returns the root of unity this number equals, if any.
    pub fn as_root_of_unity(&self) -> Option<RootOfUnity> {
        let f = field(self.order);
        f.powers
            .iter()
            .position(|p| *p == self.coeffs)
            .map(|e| RootOfUnity::new(self.order, e as i64))
    }
}

impl Add for &CycNum {
    type Output = CycNum;

    fn add(self, rhs: &CycNum) -> CycNum {
        self.try_add(rhs).expect("cyclotomic order mismatch")
    }
}

impl Sub for &CycNum {
    type Output = CycNum;

    fn sub(self, rhs: &CycNum) -> CycNum {
        self.try_sub(rhs).expect("cyclotomic order mismatch")
    }
}

impl Mul for &CycNum {
    type Output = CycNum;

    fn mul(self, rhs: &CycNum) -> CycNum {
        self.try_mul(rhs).expect("cyclotomic order mismatch")
    }
}

impl Neg for &CycNum {
    type Output = CycNum;

    fn neg(self) -> CycNum {
        CycNum {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycNum {
    type Output = CycNum;

    fn neg(self) -> CycNum {
        -&self
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNum[M={}]({})", self.order, self)
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => write!(f, "z^{k}")?,
                (_, false) => write!(f, "{mag}*z^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

pub(crate) fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

#[derive(Serialize, Deserialize)]
struct RawCyc {
    #[serde(rename = "M")]
    order: u64,
    coeffs: Vec<String>,
}

impl Serialize for CycNum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawCyc {
            order: self.order,
            coeffs: self.coeffs.iter().map(format_rational).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawCyc::deserialize(d)?;
        if raw.order == 0 {
            return Err(serde::de::Error::custom("M must be positive"));
        }
        let coeffs = raw
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Ok(CycNum::from_coeffs(raw.order, coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_poly(2), ints(&[1, 1]));
        assert_eq!(cyclotomic_poly(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_poly(6), ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_poly(18), ints(&[1, 0, 0, -1, 0, 0, 1]));
    }

    #[test]
    fn zeta4_squared_is_minus_one() {
        let z = CycNum::zeta_pow(4, 1);
        assert_eq!(&z * &z, CycNum::from_int(4, -1));
    }

    #[test]
    fn inverse_of_one_plus_zeta3() {
        let a = &CycNum::one(3) + &CycNum::zeta_pow(3, 1);
        let inv = a.inv().unwrap();
        assert_eq!(inv, -CycNum::zeta_pow(3, 1));
        assert!((&a * &inv).is_one());
    }

    #[test]
    fn inverse_of_root_is_conjugate_power() {
        for m in [1u64, 2, 5, 8, 12, 18] {
            let z = CycNum::zeta_pow(m, 1);
            assert_eq!(z.inv().unwrap(), CycNum::zeta_pow(m, m as i64 - 1));
        }
    }

    #[test]
    fn zero_has_no_inverse() {
        assert_eq!(CycNum::zero(5).inv(), Err(Error::DivisionByZero));
        assert_eq!(
            cyc_arith(ArithKind::Inv, &CycNum::zero(5), None),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn mismatched_orders_are_rejected() {
        let err = cyc_arith(ArithKind::Mul, &CycNum::one(4), Some(&CycNum::one(6)));
        assert_eq!(err, Err(Error::OrderMismatch { left: 4, right: 6 }));
    }

    #[test]
    fn embedding_examples() {
        assert!(embed_root(12, RootOfUnity::one(3)).unwrap().is_one());
        assert_eq!(
            embed_root(2, RootOfUnity::new(2, 1)).unwrap(),
            CycNum::from_int(2, -1)
        );
        assert_eq!(
            embed_root(4, RootOfUnity::new(4, 2)).unwrap(),
            CycNum::from_int(4, -1)
        );
        assert_eq!(
            embed_root(6, RootOfUnity::new(4, 1)),
            Err(Error::IncompatibleOrders {
                order: 4,
                ambient: 6
            })
        );
    }

    #[test]
    fn nth_roots_solve_power_equation() {
        let target = RootOfUnity::new(32, 16);
        let roots = RootOfUnity::nth_roots(target, 4);
        assert_eq!(roots.len(), 4);
        assert!(roots.iter().all(|r| r.pow(4) == target));
        assert!(RootOfUnity::nth_roots(RootOfUnity::new(8, 1), 2).is_empty());
    }

    #[test]
    fn root_serialization_shape() {
        let r = RootOfUnity::new(8, 3);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"M":8,"e":3}"#);
        assert_eq!(serde_json::from_str::<RootOfUnity>(&s).unwrap(), r);
        assert!(serde_json::from_str::<RootOfUnity>(r#"{"M":8,"e":9}"#).is_err());
    }

    #[test]
    fn cycnum_serialization_uses_lowest_terms() {
        let half = BigRational::new(BigInt::from(2), BigInt::from(-4));
        let x = CycNum::from_rational(4, half);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"M":4,"coeffs":["-1/2","0/1"]}"#);
        assert_eq!(serde_json::from_str::<CycNum>(&s).unwrap(), x);
    }
}
