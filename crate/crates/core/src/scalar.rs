//! Exact scalars: rationals and elements of cyclotomic fields ℚ(ζ_N).
//!
//! An element of ℚ(ζ_N) is a polynomial in ζ of degree < φ(N), reduced modulo
//! the N-th cyclotomic polynomial. Values that happen to be rational are always
//! stored with conductor 1, so every value has exactly one representation per
//! conductor and rationals have exactly one representation overall.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::rc::Rc;

type Poly = Vec<BigRational>;

fn trim(p: &mut Poly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Poly {
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

/// Quotient and remainder of `a` by a nonzero `b`.
fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Poly, Poly) {
    let mut r: Poly = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let t = &r[r.len() - 1] / &lead;
        for (j, bj) in b.iter().enumerate() {
            r[k + j] -= &t * bj;
        }
        q[k] = t;
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

thread_local! {
    static CYCLOTOMIC: RefCell<HashMap<u32, Rc<Poly>>> = RefCell::new(HashMap::new());
}

/// Φ_N, computed as (x^N − 1) divided by Φ_d for every proper divisor d of N.
pub fn cyclotomic_polynomial(n: u32) -> Rc<Poly> {
    assert!(n >= 1, "conductor must be positive");
    if let Some(p) = CYCLOTOMIC.with(|c| c.borrow().get(&n).cloned()) {
        return p;
    }
    let mut p: Poly = vec![BigRational::zero(); n as usize + 1];
    p[0] = -BigRational::one();
    p[n as usize] = BigRational::one();
    for d in 1..n {
        if n % d == 0 {
            let (q, r) = poly_divmod(&p, &cyclotomic_polynomial(d));
            debug_assert!(r.is_empty());
            p = q;
        }
    }
    let p = Rc::new(p);
    CYCLOTOMIC.with(|c| c.borrow_mut().insert(n, p.clone()));
    p
}

/// Euler's totient, the degree of Φ_N.
pub fn totient(n: u32) -> usize {
    cyclotomic_polynomial(n).len() - 1
}

fn lcm(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

/// An exact element of ℚ(ζ_N).
#[derive(Clone)]
pub struct Scalar {
    conductor: u32,
    coeffs: Poly,
}

impl Scalar {
    fn build(conductor: u32, mut coeffs: Poly) -> Scalar {
        let phi = cyclotomic_polynomial(conductor);
        trim(&mut coeffs);
        if coeffs.len() >= phi.len() {
            coeffs = poly_divmod(&coeffs, &phi).1;
        }
        if coeffs.len() <= 1 {
            return Scalar { conductor: 1, coeffs };
        }
        Scalar { conductor, coeffs }
    }

    pub fn zero() -> Scalar {
        Scalar { conductor: 1, coeffs: Vec::new() }
    }

    pub fn one() -> Scalar {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(p: i64, q: i64) -> Scalar {
        assert!(q != 0, "zero denominator");
        Scalar::from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_rational(r: BigRational) -> Scalar {
        Scalar::build(1, vec![r])
    }

    /// ζ_N^k.
    pub fn zeta(n: u32, k: i64) -> Scalar {
        let e = k.rem_euclid(n as i64) as usize;
        let mut c = vec![BigRational::zero(); e + 1];
        c[e] = BigRational::one();
        Scalar::build(n, c)
    }

    /// The imaginary unit, ζ_4.
    pub fn i() -> Scalar {
        Scalar::zeta(4, 1)
    }

    /// Builds Σ c_j ζ_N^j and reduces it.
    pub fn from_coeffs(n: u32, coeffs: Vec<BigRational>) -> Scalar {
        Scalar::build(n, coeffs)
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    /// Power-basis coefficients; empty for zero.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.conductor == 1 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.conductor == 1
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.conductor != 1 {
            return None;
        }
        Some(self.coeffs.first().cloned().unwrap_or_else(BigRational::zero))
    }

    /// Re-expresses `self` in ℚ(ζ_m); requires the conductor to divide `m`.
    pub fn promote(&self, m: u32) -> Result<Scalar> {
        if m % self.conductor != 0 {
            return Err(Error::IncompatibleConductors(self.conductor, m));
        }
        Ok(self.embed(m))
    }

    fn embed(&self, m: u32) -> Scalar {
        if self.conductor == m || self.conductor == 1 {
            return self.clone();
        }
        let step = (m / self.conductor) as usize;
        let mut c = vec![BigRational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (j, a) in self.coeffs.iter().enumerate() {
            c[j * step] = a.clone();
        }
        Scalar::build(m, c)
    }

    fn coeffs_in(&self, m: u32) -> Poly {
        if self.conductor == m || self.conductor == 1 {
            self.coeffs.clone()
        } else {
            self.embed(m).coeffs
        }
    }

    fn common(&self, other: &Scalar) -> u32 {
        lcm(self.conductor, other.conductor)
    }

    fn add_impl(&self, other: &Scalar, sign: bool) -> Scalar {
        let m = self.common(other);
        let mut a = self.coeffs_in(m);
        let b = other.coeffs_in(m);
        if a.len() < b.len() {
            a.resize(b.len(), BigRational::zero());
        }
        for (i, x) in b.into_iter().enumerate() {
            if sign {
                a[i] += x;
            } else {
                a[i] -= x;
            }
        }
        Scalar::build(m, a)
    }

    fn mul_impl(&self, other: &Scalar) -> Scalar {
        if self.is_zero() || other.is_zero() {
            return Scalar::zero();
        }
        if self.conductor == 1 && other.conductor == 1 {
            return Scalar::from_rational(&self.coeffs[0] * &other.coeffs[0]);
        }
        let m = self.common(other);
        Scalar::build(m, poly_mul(&self.coeffs_in(m), &other.coeffs_in(m)))
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in ℚ[x].
    pub fn inverse(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.conductor == 1 {
            return Ok(Scalar::from_rational(self.coeffs[0].recip()));
        }
        let phi = cyclotomic_polynomial(self.conductor);
        // invariant: s·a ≡ r (mod Φ)
        let (mut r0, mut r1) = ((*phi).clone(), self.coeffs.clone());
        let (mut s0, mut s1): (Poly, Poly) = (Vec::new(), vec![BigRational::one()]);
        while r1.len() > 1 {
            let (q, r) = poly_divmod(&r0, &r1);
            let qs = poly_mul(&q, &s1);
            let mut s2 = s0.clone();
            if s2.len() < qs.len() {
                s2.resize(qs.len(), BigRational::zero());
            }
            for (i, x) in qs.into_iter().enumerate() {
                s2[i] -= x;
            }
            trim(&mut s2);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        let c = r1[0].recip();
        let inv: Poly = s1.into_iter().map(|x| x * &c).collect();
        Ok(Scalar::build(self.conductor, inv))
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        Ok(self * &other.inverse()?)
    }

    /// Complex conjugation ζ ↦ ζ^{-1}.
    pub fn conjugate(&self) -> Scalar {
        if self.conductor == 1 {
            return self.clone();
        }
        let n = self.conductor as usize;
        let mut c = vec![BigRational::zero(); n];
        for (j, a) in self.coeffs.iter().enumerate() {
            c[(n - j) % n] += a;
        }
        Scalar::build(self.conductor, c)
    }

    pub fn pow(&self, mut e: u32) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Multiplies by ±1.
    pub fn signed(&self, negate: bool) -> Scalar {
        if negate {
            -self
        } else {
            self.clone()
        }
    }

    /// Parses "p", "p/q" or "[c0,c1,...]@N".
    pub fn parse(text: &str) -> Result<Scalar> {
        let t = text.trim();
        let err = |m: &str| Error::ScalarParse(format!("{m}: {text:?}"));
        if let Some(rest) = t.strip_prefix('[') {
            let (body, cond) = rest.split_once("]@").ok_or_else(|| err("expected [..]@N"))?;
            let n: u32 = cond.trim().parse().map_err(|_| err("bad conductor"))?;
            if n == 0 {
                return Err(err("conductor must be positive"));
            }
            let mut coeffs = Vec::new();
            if !body.trim().is_empty() {
                for part in body.split(',') {
                    coeffs.push(parse_rational(part).map_err(|m| err(&m))?);
                }
            }
            return Ok(Scalar::build(n, coeffs));
        }
        Ok(Scalar::from_rational(parse_rational(t).map_err(|m| err(&m))?))
    }
}

fn parse_rational(s: &str) -> std::result::Result<BigRational, String> {
    let s = s.trim().replace('\u{2212}', "-");
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.as_str(), "1"),
    };
    let p: BigInt = p.parse().map_err(|_| "bad numerator".to_string())?;
    let q: BigInt = q.parse().map_err(|_| "bad denominator".to_string())?;
    if q.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(BigRational::new(p, q))
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.conductor == 1 {
            return match self.coeffs.first() {
                None => write!(f, "0"),
                Some(r) => write!(f, "{}", fmt_rational(r)),
            };
        }
        let parts: Vec<String> = self.coeffs.iter().map(fmt_rational).collect();
        write!(f, "[{}]@{}", parts.join(","), self.conductor)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Scalar) -> bool {
        if self.conductor == other.conductor {
            return self.coeffs == other.coeffs;
        }
        if self.conductor == 1 || other.conductor == 1 {
            return false;
        }
        let m = self.common(other);
        self.coeffs_in(m) == other.coeffs_in(m)
    }
}

impl Eq for Scalar {}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Scalar {
        Scalar::from_int(n)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        self.add_impl(o, true)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self.add_impl(o, false)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        self.mul_impl(o)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
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

/// The four field operations as a single entry point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn field_arith(a: &Scalar, b: &Scalar, op: FieldOp) -> Result<Scalar> {
    Ok(match op {
        FieldOp::Add => a + b,
        FieldOp::Sub => a - b,
        FieldOp::Mul => a * b,
        FieldOp::Div => a.checked_div(b)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::from_ratio(p, d)
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        let ints = |n| -> Vec<i64> {
            cyclotomic_polynomial(n)
                .iter()
                .map(|c| c.to_integer().try_into().unwrap())
                .collect()
        };
        assert_eq!(ints(1), vec![-1, 1]);
        assert_eq!(ints(2), vec![1, 1]);
        assert_eq!(ints(3), vec![1, 1, 1]);
        assert_eq!(ints(4), vec![1, 0, 1]);
        assert_eq!(ints(6), vec![1, -1, 1]);
        assert_eq!(ints(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(totient(12), 4);
    }

    #[test]
    fn rational_sum() {
        assert_eq!(&q(1, 2) + &q(1, 3), q(5, 6));
    }

    #[test]
    fn root_of_unity_order() {
        let z = Scalar::zeta(3, 1);
        let z2 = Scalar::zeta(3, 2);
        assert!((&z * &z2).is_one());
        assert_eq!(z.pow(3), Scalar::one());
    }

    #[test]
    fn zeta12_to_the_fourth() {
        // x^4 mod (x^4 - x^2 + 1) = x^2 - 1
        let z = Scalar::zeta(12, 1).pow(4);
        assert_eq!(z.conductor(), 12);
        assert_eq!(z.to_string(), "[-1,0,1]@12");
        assert_eq!(z, Scalar::zeta(3, 1));
    }

    #[test]
    fn conjugation() {
        assert_eq!(q(3, 7).conjugate(), q(3, 7));
        assert_eq!(Scalar::zeta(3, 1).conjugate().to_string(), "[-1,-1]@3");
        // ζ^4 = ζ^2 - 1 gives ζ^{-1} = ζ - ζ^3, so 1 + ζ^11 = 1 + ζ - ζ^3
        let a = &Scalar::one() + &Scalar::zeta(12, 1);
        assert_eq!(a.conjugate().to_string(), "[1,1,0,-1]@12");
    }

    #[test]
    fn inverse_and_division() {
        let a = &Scalar::from_int(2) + &Scalar::zeta(5, 2);
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).is_one());
        assert_eq!(Scalar::zero().inverse(), Err(Error::DivisionByZero));
        assert_eq!(
            field_arith(&q(1, 2), &Scalar::zero(), FieldOp::Div),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn promotion_between_conductors() {
        let s = &Scalar::zeta(3, 1) + &Scalar::i();
        assert_eq!(s.conductor(), 12);
        assert_eq!(&s - &Scalar::i(), Scalar::zeta(3, 1));
        assert!(Scalar::zeta(3, 1).promote(4).is_err());
    }

    #[test]
    fn text_round_trip() {
        for t in ["0", "5", "-3/4", "[-1,-1]@3", "[0,1]@4"] {
            assert_eq!(Scalar::parse(t).unwrap().to_string(), t);
        }
        assert_eq!(Scalar::parse("[\u{2212}1,\u{2212}1]@3").unwrap(), Scalar::zeta(3, 2));
        assert!(matches!(Scalar::parse("1/0"), Err(Error::ScalarParse(_))));
        assert!(matches!(Scalar::parse("x"), Err(Error::ScalarParse(_))));
    }
}
