//! Exact arithmetic over the Gaussian rationals `Q(i)` and Gaussian integers `Z[i]`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `re + im*i` with arbitrary-precision rational parts. `BigRational` keeps
/// both parts reduced with positive denominators.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_integer(v: i64) -> Self {
        Self::new(BigRational::from_integer(v.into()), BigRational::zero())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::new(
            BigRational::new(num.into(), den.into()),
            BigRational::zero(),
        )
    }

    pub fn from_parts(re: (i64, i64), im: (i64, i64)) -> Self {
        Self::new(
            BigRational::new(re.0.into(), re.1.into()),
            BigRational::new(im.0.into(), im.1.into()),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self::new(&self.re / &n, -&self.im / &n))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
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

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    pub fn abs_f64(&self) -> f64 {
        let (re, im) = self.to_f64_pair();
        re.hypot(im)
    }

    /// Least common multiple of the two denominators.
    pub fn denom_lcm(&self) -> BigInt {
        self.re.denom().lcm(self.im.denom())
    }

    /// `self * scale` as a Gaussian integer; `scale` must clear both denominators.
    pub fn scaled_to_int(&self, scale: &BigInt) -> GaussInt {
        let re = self.re.numer() * (scale / self.re.denom());
        let im = self.im.numer() * (scale / self.im.denom());
        GaussInt::new(re, im)
    }
}

impl From<GaussInt> for GaussianRational {
    fn from(g: GaussInt) -> Self {
        Self::new(BigRational::from_integer(g.re), BigRational::from_integer(g.im))
    }
}

impl From<i64> for GaussianRational {
    fn from(v: i64) -> Self {
        Self::from_integer(v)
    }
}

macro_rules! forward_owned {
    ($t:ty, $tr:ident, $m:ident) => {
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a $t> for $t {
            type Output = $t;
            fn $m(self, rhs: &'a $t) -> $t {
                (&self).$m(rhs)
            }
        }
    };
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussianRational::new(&self.re * &rhs.re, BigRational::zero());
        }
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl<'a> Div<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    /// Panics on division by zero, like the rational type underneath.
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        let inv = rhs.inv().expect("division by zero Gaussian rational");
        self * &inv
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re, -self.im)
    }
}

forward_owned!(GaussianRational, Add, add);
forward_owned!(GaussianRational, Sub, sub);
forward_owned!(GaussianRational, Mul, mul);
forward_owned!(GaussianRational, Div, div);

fn fmt_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for GaussianRational {
    /// Canonical `p/q+r/si` form; zero parts are omitted and a unit
    /// imaginary coefficient prints as `i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut out = String::new();
        if !self.re.is_zero() {
            out.push_str(&fmt_rational(&self.re));
        }
        if !self.im.is_zero() {
            let mag = self.im.abs();
            if self.im.is_negative() {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            if !mag.is_one() {
                out.push_str(&fmt_rational(&mag));
            }
            out.push('i');
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for GaussianRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_gaussian(s)
    }
}

/// Parses `"p/q+r/si"` with optional parts: `"3"`, `"-1/2"`, `"i"`,
/// `"-2/3i"`, `"1+i"`, `"3/5+6/5i"`. Whitespace is ignored.
pub fn parse_gaussian(s: &str) -> Result<GaussianRational> {
    // Whitespace may surround signs and slashes but cannot split a number.
    let raw: Vec<(usize, char)> = s.char_indices().collect();
    for w in raw.windows(3) {
        if w[1].1.is_whitespace() && w[0].1.is_ascii_digit() && w[2].1.is_ascii_digit() {
            return Err(Error::parse(w[2].0, "unexpected whitespace inside a number"));
        }
    }
    let chars: Vec<(usize, char)> = raw.into_iter().filter(|(_, c)| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err(Error::parse(0, "empty Gaussian rational"));
    }
    let mut pos = 0;
    let mut re: Option<BigRational> = None;
    let mut im: Option<BigRational> = None;
    let offset = |p: usize| chars.get(p).map(|c| c.0).unwrap_or(s.len());

    while pos < chars.len() {
        let term_start = pos;
        let mut negative = false;
        match chars[pos].1 {
            '+' | '-' => {
                negative = chars[pos].1 == '-';
                pos += 1;
            }
            _ if term_start != 0 => {
                return Err(Error::parse(offset(pos), "expected '+' or '-' between parts"));
            }
            _ => {}
        }
        let value = if pos < chars.len() && chars[pos].1 == 'i' {
            None
        } else {
            let num = read_digits(&chars, &mut pos)
                .ok_or_else(|| Error::parse(offset(pos), "expected digits"))?;
            let den = if pos < chars.len() && chars[pos].1 == '/' {
                pos += 1;
                let d = read_digits(&chars, &mut pos)
                    .ok_or_else(|| Error::parse(offset(pos), "expected denominator digits"))?;
                if d.is_zero() {
                    return Err(Error::parse(offset(pos - 1), "zero denominator"));
                }
                d
            } else {
                BigInt::one()
            };
            Some(BigRational::new(num, den))
        };
        let imaginary = pos < chars.len() && chars[pos].1 == 'i';
        if imaginary {
            pos += 1;
        } else if value.is_none() {
            return Err(Error::parse(offset(pos), "expected a number"));
        }
        let mut v = value.unwrap_or_else(BigRational::one);
        if negative {
            v = -v;
        }
        let slot = if imaginary { &mut im } else { &mut re };
        if slot.is_some() {
            return Err(Error::parse(
                offset(term_start),
                if imaginary {
                    "duplicate imaginary part"
                } else {
                    "duplicate real part"
                },
            ));
        }
        *slot = Some(v);
    }
    Ok(GaussianRational::new(
        re.unwrap_or_else(BigRational::zero),
        im.unwrap_or_else(BigRational::zero),
    ))
}

fn read_digits(chars: &[(usize, char)], pos: &mut usize) -> Option<BigInt> {
    let start = *pos;
    while *pos < chars.len() && chars[*pos].1.is_ascii_digit() {
        *pos += 1;
    }
    if *pos == start {
        return None;
    }
    let digits: String = chars[start..*pos].iter().map(|c| c.1).collect();
    digits.parse().ok()
}

/// Gaussian integer, the ring used by fraction-free elimination.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct GaussInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussInt {
    pub fn new(re: BigInt, im: BigInt) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::new(BigInt::one(), BigInt::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&self.re - &o.re, &self.im - &o.im)
    }

    /// Division known to be exact (Bareiss step). Debug builds check it.
    pub fn div_exact(&self, d: &Self) -> Self {
        let n = d.norm();
        let re = &self.re * &d.re + &self.im * &d.im;
        let im = &self.im * &d.re - &self.re * &d.im;
        debug_assert!(re.is_multiple_of(&n) && im.is_multiple_of(&n), "inexact Gaussian division");
        Self::new(re / &n, im / &n)
    }

    /// Euclidean division with the quotient rounded to the nearest lattice point.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let n = d.norm();
        let re = &self.re * &d.re + &self.im * &d.im;
        let im = &self.im * &d.re - &self.re * &d.im;
        let round = |x: BigInt| -> BigInt {
            let two_x: BigInt = x * 2 + &n;
            two_x.div_floor(&(&n * 2))
        };
        let q = Self::new(round(re), round(im));
        let r = self.sub(&q.mul(d));
        (q, r)
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a
    }

    /// Multiplies by the unit that moves `self` into the sector `re > 0, im >= 0`.
    pub fn unit_normalizer(&self) -> Self {
        let (z, o) = (BigInt::zero(), BigInt::one());
        if self.is_zero() {
            return Self::one();
        }
        if self.re.is_positive() && !self.im.is_negative() {
            Self::new(o, z)
        } else if !self.re.is_positive() && self.im.is_positive() {
            Self::new(z, -o)
        } else if self.re.is_negative() && !self.im.is_positive() {
            Self::new(-o, z)
        } else {
            Self::new(z, o)
        }
    }
}
