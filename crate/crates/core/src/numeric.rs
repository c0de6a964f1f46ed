//! Arbitrary-precision complex arithmetic and a-priori tail bounds for
//! truncated q-products.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};

use crate::error::{Error, Result};

/// Bits needed to carry `digits` decimal digits, plus a few spare bits.
pub fn digits_to_bits(digits: u32) -> u32 {
    ((digits as f64) * std::f64::consts::LOG2_10).ceil() as u32 + 8
}

pub fn bits_to_digits(bits: u32) -> u32 {
    ((bits.saturating_sub(8)) as f64 / std::f64::consts::LOG2_10).floor() as u32
}

/// `10^(-digits)` at the given precision.
pub fn ten_pow_neg(digits: i64, prec_bits: u32) -> Float {
    let ten = Float::with_val(prec_bits, 10);
    ten.pow(-digits)
}

pub fn pi(prec_bits: u32) -> Float {
    Float::with_val(prec_bits, Constant::Pi)
}

/// Complex number with an explicit decimal working precision.
#[derive(Clone, PartialEq)]
pub struct BigComplex {
    pub re: Float,
    pub im: Float,
    prec_digits: u32,
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_digits(25))
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_digits(self.prec_digits.min(40) as usize))
    }
}

impl BigComplex {
    pub const MIN_DIGITS: u32 = 30;

    pub fn new(re: Float, im: Float, prec_digits: u32) -> Self {
        assert!(prec_digits >= Self::MIN_DIGITS, "BigComplex needs at least {} digits, got {prec_digits}", Self::MIN_DIGITS);
        let bits = digits_to_bits(prec_digits);
        let mut re = re;
        let mut im = im;
        re.set_prec(bits);
        im.set_prec(bits);
        BigComplex { re, im, prec_digits }
    }

    pub fn from_real(re: Float, prec_digits: u32) -> Self {
        let bits = digits_to_bits(prec_digits);
        Self::new(re, Float::new(bits), prec_digits)
    }

    pub fn from_f64(re: f64, im: f64, prec_digits: u32) -> Self {
        let bits = digits_to_bits(prec_digits);
        Self::new(Float::with_val(bits, re), Float::with_val(bits, im), prec_digits)
    }

    pub fn from_rational(re: &Rational, prec_digits: u32) -> Self {
        let bits = digits_to_bits(prec_digits);
        Self::new(Float::with_val(bits, re), Float::new(bits), prec_digits)
    }

    pub fn zero(prec_digits: u32) -> Self {
        Self::from_f64(0.0, 0.0, prec_digits)
    }

    pub fn one(prec_digits: u32) -> Self {
        Self::from_f64(1.0, 0.0, prec_digits)
    }

    pub fn i(prec_digits: u32) -> Self {
        Self::from_f64(0.0, 1.0, prec_digits)
    }

    pub fn prec_digits(&self) -> u32 {
        self.prec_digits
    }

    pub fn prec_bits(&self) -> u32 {
        digits_to_bits(self.prec_digits)
    }

    /// Same value carried at a different precision.
    pub fn with_digits(&self, prec_digits: u32) -> Self {
        Self::new(self.re.clone(), self.im.clone(), prec_digits)
    }

    pub fn conj(&self) -> Self {
        BigComplex { re: self.re.clone(), im: -self.im.clone(), prec_digits: self.prec_digits }
    }

    pub fn norm_sq(&self) -> Float {
        let bits = self.prec_bits();
        let mut n = Float::with_val(bits, &self.re * &self.re);
        n += &self.im * &self.im;
        n
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec_bits(), self.re.hypot_ref(&self.im))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn scale(&self, s: &Float) -> Self {
        let bits = self.prec_bits();
        BigComplex { re: Float::with_val(bits, &self.re * s), im: Float::with_val(bits, &self.im * s), prec_digits: self.prec_digits }
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sq();
        let bits = self.prec_bits();
        BigComplex { re: Float::with_val(bits, &self.re / &n), im: -Float::with_val(bits, &self.im / &n), prec_digits: self.prec_digits }
    }

    pub fn exp(&self) -> Self {
        let bits = self.prec_bits();
        let m = Float::with_val(bits, self.re.exp_ref());
        let (s, c) = Float::with_val(bits, &self.im).sin_cos(Float::new(bits));
        BigComplex { re: m.clone() * c, im: m * s, prec_digits: self.prec_digits }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        let bits = self.prec_bits();
        let r = Float::with_val(bits, self.re.hypot_ref(&self.im)).ln();
        let a = Float::with_val(bits, self.im.atan2_ref(&self.re));
        BigComplex { re: r, im: a, prec_digits: self.prec_digits }
    }

    pub fn powi(&self, n: i64) -> Self {
        if n < 0 {
            return self.recip().powi(-n);
        }
        let mut base = self.clone();
        let mut acc = BigComplex::one(self.prec_digits);
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn sqr(&self) -> Self {
        self * self
    }

    /// `|self - other|`
    pub fn dist(&self, other: &BigComplex) -> Float {
        (self - other).abs()
    }

    /// In-place `self *= other` using caller-provided scratch floats.
    pub fn mul_assign_ref(&mut self, o: &BigComplex, t1: &mut Float, t2: &mut Float) {
        use rug::Assign;
        t1.assign(&self.re * &o.im);
        t2.assign(&self.im * &o.im);
        self.re *= &o.re;
        self.re -= &*t2;
        self.im *= &o.re;
        self.im += &*t1;
    }

    /// Scientific decimal string `re ± im i` with `digits` significant digits.
    pub fn to_string_digits(&self, digits: usize) -> String {
        let d = digits.max(1);
        let re = format!("{:.*e}", d, self.re);
        let im = format!("{:.*e}", d, self.im);
        match im.strip_prefix('-') {
            Some(abs) => format!("{re} - {abs}i"),
            None => format!("{re} + {im}i"),
        }
    }
}

fn max_digits(a: &BigComplex, b: &BigComplex) -> u32 {
    a.prec_digits.max(b.prec_digits)
}

impl<'a> Add<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn add(self, o: &BigComplex) -> BigComplex {
        let d = max_digits(self, o);
        let bits = digits_to_bits(d);
        BigComplex { re: Float::with_val(bits, &self.re + &o.re), im: Float::with_val(bits, &self.im + &o.im), prec_digits: d }
    }
}

impl<'a> Sub<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn sub(self, o: &BigComplex) -> BigComplex {
        let d = max_digits(self, o);
        let bits = digits_to_bits(d);
        BigComplex { re: Float::with_val(bits, &self.re - &o.re), im: Float::with_val(bits, &self.im - &o.im), prec_digits: d }
    }
}

impl<'a> Mul<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn mul(self, o: &BigComplex) -> BigComplex {
        let d = max_digits(self, o);
        let bits = digits_to_bits(d);
        let mut re = Float::with_val(bits, &self.re * &o.re);
        re -= Float::with_val(bits, &self.im * &o.im);
        let mut im = Float::with_val(bits, &self.re * &o.im);
        im += Float::with_val(bits, &self.im * &o.re);
        BigComplex { re, im, prec_digits: d }
    }
}

impl<'a> Div<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: &BigComplex) -> BigComplex {
        let d = max_digits(self, o);
        let inv = o.with_digits(d).recip();
        self * &inv
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex { re: -self.re.clone(), im: -self.im.clone(), prec_digits: self.prec_digits }
    }
}

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex { re: -self.re, im: -self.im, prec_digits: self.prec_digits }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, o: BigComplex) -> BigComplex {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, o: &BigComplex) -> BigComplex {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

/// `e^{2 pi i z}` at the precision of `z`.
pub fn exp2pii(z: &BigComplex) -> BigComplex {
    let bits = z.prec_bits();
    let two_pi = Float::with_val(bits, pi(bits) * 2u32);
    let m = (-Float::with_val(bits, &two_pi * &z.im)).exp();
    let theta = Float::with_val(bits, &two_pi * &z.re);
    let (s, c) = theta.sin_cos(Float::new(bits));
    BigComplex::new(Float::with_val(bits, &m * &c), Float::with_val(bits, &m * &s), z.prec_digits())
}

/// `log |z|^2`.
pub fn log_abs_sq(z: &BigComplex) -> Result<Float> {
    if z.is_zero() {
        return Err(Error::Domain("log of zero modulus".into()));
    }
    Ok(z.norm_sq().ln())
}

/// Precision budget for truncated products.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailBudget {
    pub target_digits: u32,
    pub guard_digits: u32,
    pub max_terms: u64,
}

impl TailBudget {
    pub fn new(target_digits: u32, guard_digits: u32, max_terms: u64) -> Result<Self> {
        if target_digits == 0 {
            return Err(Error::Config("target_digits must be positive".into()));
        }
        if guard_digits < 20 {
            return Err(Error::Config(format!("guard_digits must be at least 20, got {guard_digits}")));
        }
        if max_terms == 0 {
            return Err(Error::Config("max_terms must be at least 1".into()));
        }
        Ok(TailBudget { target_digits, guard_digits, max_terms })
    }

    /// Budget with the default guard `20 + ceil(log10(factors))`.
    pub fn for_factors(target_digits: u32, factors: u64, max_terms: u64) -> Result<Self> {
        Self::new(target_digits, default_guard(factors), max_terms)
    }

    pub fn total_digits(&self) -> u32 {
        self.target_digits + self.guard_digits
    }

    /// Working precision in decimal digits used by products under this budget.
    pub fn working_digits(&self) -> u32 {
        self.total_digits().max(BigComplex::MIN_DIGITS)
    }

    pub fn eps(&self) -> Float {
        ten_pow_neg(self.total_digits() as i64, digits_to_bits(self.working_digits()))
    }
}

pub fn default_guard(factors: u64) -> u32 {
    20 + (factors.max(1) as f64).log10().ceil() as u32
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cutoff {
    pub terms: u64,
    pub saturated: bool,
}

/// Least `M` with `q^M / (1 - q) < 10^-(target + guard)`, capped at
/// `max_terms` (flagged as saturated).
pub fn geometric_tail_cutoff(q_abs: &Float, budget: &TailBudget) -> Result<Cutoff> {
    if !(q_abs.is_finite()) || *q_abs >= 1 {
        return Err(Error::Domain("non-convergent modulus".into()));
    }
    if *q_abs <= 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    let bits = q_abs.prec().max(64) + 64;
    let q = Float::with_val(bits, q_abs);
    let one_minus = Float::with_val(bits, 1 - &q);
    let eps = ten_pow_neg(budget.total_digits() as i64, bits);
    let holds = |m: u64| -> bool {
        let qm = Float::with_val(bits, q.clone().pow(m));
        Float::with_val(bits, &qm / &one_minus) < eps
    };
    // log estimate, then settle exactly
    let est = Float::with_val(bits, Float::with_val(bits, &eps * &one_minus).ln() / q.clone().ln());
    let mut m = est.to_f64().ceil().max(0.0) as u64;
    if m > budget.max_terms {
        return Ok(Cutoff { terms: budget.max_terms, saturated: true });
    }
    while m > 0 && holds(m - 1) {
        m -= 1;
    }
    while !holds(m) {
        m += 1;
        if m > budget.max_terms {
            return Ok(Cutoff { terms: budget.max_terms, saturated: true });
        }
    }
    Ok(Cutoff { terms: m, saturated: false })
}

/// Decimal string of a real with `digits` significant digits.
pub fn float_string(x: &Float, digits: usize) -> String {
    format!("{:.*e}", digits.max(1), x)
}

/// Round-trip parse of a decimal string at a given precision.
pub fn parse_float(s: &str, prec_digits: u32) -> Result<Float> {
    let bits = digits_to_bits(prec_digits);
    Float::parse(s).map(|v| Float::with_val(bits, v)).map_err(|e| Error::Parse(format!("bad decimal '{s}': {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget(t: u32, g: u32) -> TailBudget {
        TailBudget::new(t, g, 1_000_000).unwrap()
    }

    #[test]
    fn cutoff_matches_brute_force() {
        // brute force over exact rationals: q^M/(1-q) < 10^-(t+g)
        for (num, den, t, g) in [(1u32, 2u32, 30u32, 20u32), (1, 10, 10, 20), (9, 10, 5, 20), (99, 100, 3, 20)] {
            let q = Rational::from((num, den));
            let lim = Rational::from((1, rug::Integer::from(10).pow(t + g)));
            let mut m = 0u32;
            loop {
                let lhs = q.clone().pow(m) / (Rational::from(1) - q.clone());
                if lhs < lim {
                    break;
                }
                m += 1;
            }
            let qf = Float::with_val(200, &q);
            let c = geometric_tail_cutoff(&qf, &budget(t, g)).unwrap();
            assert_eq!(c.terms, m as u64, "q={num}/{den}");
            assert!(!c.saturated);
        }
    }

    #[test]
    fn cutoff_known_values() {
        let half = Float::with_val(200, 0.5);
        assert_eq!(geometric_tail_cutoff(&half, &budget(30, 20)).unwrap().terms, 168);
        let tenth = Float::with_val(200, Float::parse("0.1").unwrap());
        assert_eq!(geometric_tail_cutoff(&tenth, &budget(10, 20)).unwrap().terms, 31);
    }

    #[test]
    fn cutoff_saturates_and_rejects() {
        let q = Float::with_val(100, 0.999999);
        let b = TailBudget::new(50, 20, 1000).unwrap();
        let c = geometric_tail_cutoff(&q, &b).unwrap();
        assert!(c.saturated);
        assert_eq!(c.terms, 1000);
        assert!(geometric_tail_cutoff(&Float::with_val(64, 1.0), &b).is_err());
        assert!(TailBudget::new(0, 20, 10).is_err());
        assert!(TailBudget::new(10, 19, 10).is_err());
    }

    #[test]
    fn exp2pii_basics() {
        let d = 50;
        let one = exp2pii(&BigComplex::zero(d));
        assert!(one.dist(&BigComplex::one(d)) < ten_pow_neg(48, 200));
        let half = BigComplex::from_f64(0.5, 0.0, d);
        let m1 = exp2pii(&half);
        assert!(m1.dist(&BigComplex::from_f64(-1.0, 0.0, d)) < ten_pow_neg(48, 200));
        let e = exp2pii(&BigComplex::i(d));
        let bits = digits_to_bits(d);
        let expect = Float::with_val(bits, pi(bits) * -2i32).exp();
        assert!(Float::with_val(bits, &e.re - &expect).abs() < ten_pow_neg(48, bits));
        assert!(float_string(&e.re, 6).starts_with("1.86744"), "{}", float_string(&e.re, 6));
    }

    #[test]
    fn log_abs_sq_values() {
        let d = 40;
        assert!(log_abs_sq(&BigComplex::one(d)).unwrap().is_zero());
        let bits = digits_to_bits(d);
        let e = Float::with_val(bits, 1).exp();
        let l = log_abs_sq(&BigComplex::from_real(e, d)).unwrap();
        assert!(Float::with_val(bits, l - 2u32).abs() < ten_pow_neg(38, bits));
        let z = BigComplex::from_f64(3.0, 4.0, d);
        let l = log_abs_sq(&z).unwrap();
        let expect = Float::with_val(bits, 25).ln();
        assert!(Float::with_val(bits, l - expect).abs() < ten_pow_neg(38, bits));
        assert!(log_abs_sq(&BigComplex::zero(d)).is_err());
    }

    #[test]
    fn complex_ops_roundtrip() {
        let d = 40;
        let a = BigComplex::from_f64(0.3, -1.25, d);
        let b = BigComplex::from_f64(-2.0, 0.5, d);
        let c = &(&a * &b) / &b;
        assert!(c.dist(&a) < ten_pow_neg(38, 200));
        let l = a.ln().exp();
        assert!(l.dist(&a) < ten_pow_neg(38, 200));
        let p = a.powi(5);
        let q = &(&(&a * &a) * &(&a * &a)) * &a;
        assert!(p.dist(&q) < ten_pow_neg(37, 200));
        let mut m = a.clone();
        let (mut t1, mut t2) = (Float::new(m.prec_bits()), Float::new(m.prec_bits()));
        m.mul_assign_ref(&b, &mut t1, &mut t2);
        assert!(m.dist(&(&a * &b)) < ten_pow_neg(38, 200));
    }
}
