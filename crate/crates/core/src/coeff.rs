//! The two coefficient domains shared by series, linear algebra and solutions.

use std::fmt::Debug;

use crate::bigc::{negligible, normalize_prec, BigComplex};
use crate::error::Result;
use crate::gauss::GaussianRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Exact,
    Numeric { prec_bits: usize },
}

impl Domain {
    pub fn tag(&self) -> &'static str {
        match self {
            Domain::Exact => "exact",
            Domain::Numeric { .. } => "numeric",
        }
    }

    pub fn prec_bits(&self) -> Option<usize> {
        match self {
            Domain::Exact => None,
            Domain::Numeric { prec_bits } => Some(*prec_bits),
        }
    }
}

/// Field operations used by generic algorithms. `Ctx` is whatever a value
/// needs to create new values of the same kind (the precision for floats).
pub trait Coeff: Clone + Debug + Send + Sync + 'static {
    type Ctx: Copy + Debug + PartialEq + Send + Sync;

    fn zero(ctx: Self::Ctx) -> Self;
    fn one(ctx: Self::Ctx) -> Self;
    fn from_gaussian(g: &GaussianRational, ctx: Self::Ctx) -> Self;
    fn ctx(&self) -> Self::Ctx;
    fn domain(ctx: Self::Ctx) -> Domain;

    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;

    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.mul(&r))
    }

    fn from_i64(v: i64, ctx: Self::Ctx) -> Self {
        Self::from_gaussian(&GaussianRational::from_integer(v), ctx)
    }

    fn magnitude(&self) -> f64;

    /// Zero for exact values; below `2^{-prec/2} * scale` for numeric ones.
    fn is_negligible(&self, scale: f64) -> bool;

    fn to_big(&self, prec: usize) -> BigComplex;
    /// `None` in the exact domain, which cannot represent rounded values.
    fn from_big(b: &BigComplex, ctx: Self::Ctx) -> Option<Self>;

    fn to_json_string(&self) -> String;
    fn from_json_string(s: &str, ctx: Self::Ctx) -> Result<Self>;
}

impl Coeff for GaussianRational {
    type Ctx = ();

    fn zero(_: ()) -> Self {
        GaussianRational::zero()
    }
    fn one(_: ()) -> Self {
        GaussianRational::one()
    }
    fn from_gaussian(g: &GaussianRational, _: ()) -> Self {
        g.clone()
    }
    fn ctx(&self) {}
    fn domain(_: ()) -> Domain {
        Domain::Exact
    }
    fn is_zero(&self) -> bool {
        GaussianRational::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        GaussianRational::inv(self)
    }
    fn magnitude(&self) -> f64 {
        self.abs_f64()
    }
    fn is_negligible(&self, _scale: f64) -> bool {
        GaussianRational::is_zero(self)
    }
    fn to_big(&self, prec: usize) -> BigComplex {
        BigComplex::from_gaussian(self, prec)
    }
    fn from_big(_: &BigComplex, _: ()) -> Option<Self> {
        None
    }
    fn to_json_string(&self) -> String {
        self.to_string()
    }
    fn from_json_string(s: &str, _: ()) -> Result<Self> {
        s.parse()
    }
}

impl Coeff for BigComplex {
    type Ctx = usize;

    fn zero(prec: usize) -> Self {
        BigComplex::zero(prec)
    }
    fn one(prec: usize) -> Self {
        BigComplex::one(prec)
    }
    fn from_gaussian(g: &GaussianRational, prec: usize) -> Self {
        BigComplex::from_gaussian(g, prec)
    }
    fn ctx(&self) -> usize {
        self.prec()
    }
    fn domain(prec: usize) -> Domain {
        Domain::Numeric {
            prec_bits: normalize_prec(prec),
        }
    }
    fn is_zero(&self) -> bool {
        BigComplex::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        BigComplex::inv(self)
    }
    fn magnitude(&self) -> f64 {
        self.abs_f64()
    }
    fn is_negligible(&self, scale: f64) -> bool {
        self.abs_f64() < negligible(self.prec()) * scale
    }
    fn to_big(&self, prec: usize) -> BigComplex {
        self.with_prec(prec)
    }
    fn from_big(b: &BigComplex, prec: usize) -> Option<Self> {
        Some(b.with_prec(prec))
    }
    fn to_json_string(&self) -> String {
        self.to_decimal_string()
    }
    fn from_json_string(s: &str, prec: usize) -> Result<Self> {
        BigComplex::parse_decimal(s, prec)
    }
}
