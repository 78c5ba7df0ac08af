//! Complex numbers over `astro_float::BigFloat` at a recorded working precision.

use std::cell::RefCell;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::gauss::GaussianRational;

pub const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

pub(crate) fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Default working precision of the numeric backend.
pub const DEFAULT_PREC: usize = 256;

/// Rounds a requested precision up to what the float backend stores (whole 64-bit words).
pub fn normalize_prec(prec: usize) -> usize {
    prec.max(64).div_ceil(64) * 64
}

/// `2^{-e}` as an f64 (saturating to 0 for huge `e`).
pub fn pow2_neg(e: usize) -> f64 {
    (-(e as f64)).exp2()
}

/// The "negligible" threshold for a working precision: `2^{-prec/2}`.
pub fn negligible(prec: usize) -> f64 {
    pow2_neg(prec / 2)
}

pub fn bf_zero(prec: usize) -> BigFloat {
    BigFloat::from_word(0, prec)
}

pub fn bf_from_f64(v: f64, prec: usize) -> BigFloat {
    BigFloat::from_f64(v, prec)
}

/// Nearest f64 to a big float.
pub fn bf_to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    let Some((words, _, sign, exp, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    if x.is_zero() || words.is_empty() {
        return 0.0;
    }
    let top = words[words.len() - 1] as f64;
    let next = if words.len() > 1 {
        words[words.len() - 2] as f64
    } else {
        0.0
    };
    let e = exp;
    let mag = top * 2f64.powi(e - 64) + next * 2f64.powi(e - 128);
    if sign == Sign::Neg {
        -mag
    } else {
        mag
    }
}

pub fn bf_from_bigint(v: &BigInt, prec: usize) -> BigFloat {
    let (sign, digits) = v.to_u64_digits();
    if digits.is_empty() {
        return bf_zero(prec);
    }
    let s = if sign == num_bigint::Sign::Minus {
        Sign::Neg
    } else {
        Sign::Pos
    };
    let exact = BigFloat::from_words(&digits, s, (64 * digits.len()) as i32);
    let mut out = exact;
    if out.precision().unwrap_or(0) > prec {
        let _ = out.set_precision(prec, RM);
    }
    out
}

pub fn bf_from_rational(q: &BigRational, prec: usize) -> BigFloat {
    let num = bf_from_bigint(q.numer(), prec + 64);
    let den = bf_from_bigint(q.denom(), prec + 64);
    num.div(&den, prec, RM)
}

fn bf_format(x: &BigFloat) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    with_consts(|cc| x.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".to_string())
}

fn bf_parse(s: &str, prec: usize) -> Result<BigFloat> {
    let v = with_consts(|cc| BigFloat::parse(s, Radix::Dec, prec, RM, cc));
    if v.is_nan() {
        return Err(Error::parse(0, format!("malformed decimal '{s}'")));
    }
    Ok(v)
}

/// A complex number whose parts carry `prec` bits. Binary operations run at
/// the larger precision of the two operands.
#[derive(Clone)]
pub struct BigComplex {
    pub re: BigFloat,
    pub im: BigFloat,
    prec: usize,
}

impl BigComplex {
    pub fn new(re: BigFloat, im: BigFloat, prec: usize) -> Self {
        Self { re, im, prec }
    }

    pub fn zero(prec: usize) -> Self {
        let prec = normalize_prec(prec);
        Self::new(bf_zero(prec), bf_zero(prec), prec)
    }

    pub fn one(prec: usize) -> Self {
        Self::from_f64(1.0, 0.0, prec)
    }

    pub fn from_f64(re: f64, im: f64, prec: usize) -> Self {
        let prec = normalize_prec(prec);
        Self::new(bf_from_f64(re, prec), bf_from_f64(im, prec), prec)
    }

    pub fn from_i64(v: i64, prec: usize) -> Self {
        let prec = normalize_prec(prec);
        Self::new(bf_from_bigint(&BigInt::from(v), prec), bf_zero(prec), prec)
    }

    pub fn from_gaussian(g: &GaussianRational, prec: usize) -> Self {
        let prec = normalize_prec(prec);
        Self::new(bf_from_rational(&g.re, prec), bf_from_rational(&g.im, prec), prec)
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn with_prec(&self, prec: usize) -> Self {
        let prec = normalize_prec(prec);
        let mut re = self.re.clone();
        let mut im = self.im.clone();
        let _ = re.set_precision(prec, RM);
        let _ = im.set_precision(prec, RM);
        Self::new(re, im, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !(self.re.is_nan() || self.im.is_nan() || self.re.is_inf() || self.im.is_inf())
    }

    pub fn re_f64(&self) -> f64 {
        bf_to_f64(&self.re)
    }

    pub fn im_f64(&self) -> f64 {
        bf_to_f64(&self.im)
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re_f64(), self.im_f64())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), self.im.clone().neg(), self.prec)
    }

    pub fn norm_sqr(&self) -> BigFloat {
        let p = self.prec;
        self.re.mul(&self.re, p, RM).add(&self.im.mul(&self.im, p, RM), p, RM)
    }

    pub fn abs(&self) -> BigFloat {
        self.norm_sqr().sqrt(self.prec, RM)
    }

    /// Magnitude as f64, computed without overflow for moderate exponents.
    pub fn abs_f64(&self) -> f64 {
        let (re, im) = self.to_f64_pair();
        let m = re.hypot(im);
        if m.is_finite() {
            m
        } else {
            bf_to_f64(&self.abs())
        }
    }

    pub fn scale(&self, s: &BigFloat) -> Self {
        let p = self.prec;
        Self::new(self.re.mul(s, p, RM), self.im.mul(s, p, RM), p)
    }

    pub fn scale_f64(&self, s: f64) -> Self {
        self.scale(&bf_from_f64(s, self.prec))
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let p = self.prec;
        let n = self.norm_sqr();
        Some(Self::new(self.re.div(&n, p, RM), self.im.clone().neg().div(&n, p, RM), p))
    }

    pub fn powi(&self, e: u32) -> Self {
        let mut acc = Self::one(self.prec);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        let p = self.prec;
        if self.is_zero() {
            return Self::zero(p);
        }
        let r = self.abs();
        let half = bf_from_f64(0.5, p);
        let a = r.add(&self.re, p, RM).mul(&half, p, RM).sqrt(p, RM);
        let b = r.sub(&self.re, p, RM).mul(&half, p, RM).sqrt(p, RM);
        let b = if self.im.is_negative() { b.neg() } else { b };
        Self::new(a, b, p)
    }

    pub fn dist_f64(&self, other: &Self) -> f64 {
        (self - other).abs_f64()
    }

    /// `"<re>+<im>i"` with decimal mantissas and exponents.
    pub fn to_decimal_string(&self) -> String {
        let re = bf_format(&self.re);
        let im = bf_format(&self.im);
        if im.starts_with('-') {
            format!("{re}{im}i")
        } else {
            format!("{re}+{im}i")
        }
    }

    pub fn parse_decimal(s: &str, prec: usize) -> Result<Self> {
        let prec = normalize_prec(prec);
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(body) = t.strip_suffix('i') {
            let bytes = body.as_bytes();
            let split = (1..bytes.len())
                .rev()
                .find(|&j| (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
            let (re, im) = match split {
                Some(j) => (&body[..j], &body[j..]),
                None => ("0", body),
            };
            let im = match im {
                "" | "+" => "1",
                "-" => "-1",
                other => other.strip_prefix('+').unwrap_or(other),
            };
            Ok(Self::new(bf_parse(re, prec)?, bf_parse(im, prec)?, prec))
        } else {
            Ok(Self::new(bf_parse(&t, prec)?, bf_zero(prec), prec))
        }
    }
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_f64_pair();
        write!(f, "({re:e}{im:+e}i @{})", self.prec)
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl<'a> Add<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &BigComplex) -> BigComplex {
        let p = self.prec.max(rhs.prec);
        BigComplex::new(self.re.add(&rhs.re, p, RM), self.im.add(&rhs.im, p, RM), p)
    }
}

impl<'a> Sub<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: &BigComplex) -> BigComplex {
        let p = self.prec.max(rhs.prec);
        BigComplex::new(self.re.sub(&rhs.re, p, RM), self.im.sub(&rhs.im, p, RM), p)
    }
}

impl<'a> Mul<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &BigComplex) -> BigComplex {
        let p = self.prec.max(rhs.prec);
        let ac = self.re.mul(&rhs.re, p, RM);
        let bd = self.im.mul(&rhs.im, p, RM);
        let ad = self.re.mul(&rhs.im, p, RM);
        let bc = self.im.mul(&rhs.re, p, RM);
        BigComplex::new(ac.sub(&bd, p, RM), ad.add(&bc, p, RM), p)
    }
}

impl<'a> Div<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: &BigComplex) -> BigComplex {
        let p = self.prec.max(rhs.prec);
        let n = rhs.norm_sqr();
        let num = self * &rhs.conj();
        BigComplex::new(num.re.div(&n, p, RM), num.im.div(&n, p, RM), p)
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex::new(self.re.clone().neg(), self.im.clone().neg(), self.prec)
    }
}

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: BigComplex) -> BigComplex {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: &'a BigComplex) -> BigComplex {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions() {
        let g: GaussianRational = "1/3-5/2i".parse().unwrap();
        let c = BigComplex::from_gaussian(&g, 256);
        let (re, im) = c.to_f64_pair();
        assert!((re - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(im, -2.5);
        let big = BigInt::from(3).pow(100);
        let f = bf_from_bigint(&big, 256);
        assert!((bf_to_f64(&f) / 3f64.powi(100) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn arithmetic_at_precision() {
        let p = 256;
        let a = BigComplex::from_f64(1.5, -2.0, p);
        let b = BigComplex::from_f64(0.25, 3.0, p);
        let q = &a / &b;
        let back = &q * &b;
        assert!(back.dist_f64(&a) < 1e-70);
        let s = BigComplex::from_f64(-4.0, 0.0, p).sqrt();
        assert!(s.dist_f64(&BigComplex::from_f64(0.0, 2.0, p)) < 1e-70);
        let third = BigComplex::from_gaussian(&GaussianRational::from_ratio(1, 3), p);
        let three = BigComplex::from_i64(3, p);
        let err = (&(&third * &three) - &BigComplex::one(p)).abs_f64();
        assert!(err < 1e-75, "{err}");
    }

    #[test]
    fn mixed_precision_promotes() {
        let a = BigComplex::from_f64(1.0, 0.0, 128);
        let b = BigComplex::from_f64(2.0, 0.0, 320);
        assert_eq!((&a + &b).prec(), 320);
        assert_eq!((&a * &b).prec(), 320);
    }

    #[test]
    fn decimal_round_trip() {
        let p = 256;
        let x = BigComplex::from_gaussian(&"2/7-13/3i".parse().unwrap(), p);
        let s = x.to_decimal_string();
        let y = BigComplex::parse_decimal(&s, p).unwrap();
        assert!(x.dist_f64(&y) < 1e-70, "{s}");
        let r = BigComplex::parse_decimal("1.5", p).unwrap();
        assert_eq!(r.to_f64_pair(), (1.5, 0.0));
        let i = BigComplex::parse_decimal("-2.5e-3i", p).unwrap();
        assert_eq!(i.to_f64_pair(), (0.0, -2.5e-3));
    }
}
