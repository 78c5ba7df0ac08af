//! Truncated Laurent series in the local coordinate `t = 1/z` at infinity.
//!
//! Coefficients past the truncation order are unknown, not zero, and every
//! operation reports the largest order its inputs actually determine.

use serde::{Deserialize, Serialize};

use crate::coeff::{Coeff, Domain};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct TruncatedSeries<C: Coeff> {
    valuation: i64,
    coeffs: Vec<C>,
    order: i64,
    ctx: C::Ctx,
}

impl<C: Coeff> TruncatedSeries<C> {
    /// Coefficients start at `t^valuation`; entries past `order` are dropped
    /// and missing ones up to `order` are zero.
    pub fn new(valuation: i64, mut coeffs: Vec<C>, order: i64, ctx: C::Ctx) -> Self {
        let len = (order - valuation + 1).max(0) as usize;
        coeffs.truncate(len);
        coeffs.resize_with(len, || C::zero(ctx));
        let mut s = Self {
            valuation,
            coeffs,
            order,
            ctx,
        };
        s.normalize();
        s
    }

    /// Series known exactly through its last given coefficient.
    pub fn from_coeffs(valuation: i64, coeffs: Vec<C>, ctx: C::Ctx) -> Self {
        let order = valuation + coeffs.len() as i64 - 1;
        Self::new(valuation, coeffs, order, ctx)
    }

    pub fn zero(order: i64, ctx: C::Ctx) -> Self {
        Self::new(order + 1, Vec::new(), order, ctx)
    }

    pub fn one(order: i64, ctx: C::Ctx) -> Self {
        Self::monomial(C::one(ctx), 0, order)
    }

    pub fn monomial(c: C, exponent: i64, order: i64) -> Self {
        let ctx = c.ctx();
        Self::new(exponent, vec![c], order, ctx)
    }

    /// `p(z) = sum p_d z^d` rewritten in `t = 1/z`, known through `t^order`.
    pub fn from_z_polynomial(coeffs: &[C], order: i64, ctx: C::Ctx) -> Self {
        let deg = coeffs.len() as i64 - 1;
        if deg < 0 {
            return Self::zero(order, ctx);
        }
        let rev: Vec<C> = coeffs.iter().rev().cloned().collect();
        Self::new(-deg, rev, order, ctx)
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.valuation += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.valuation = self.order + 1;
        }
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn ctx(&self) -> C::Ctx {
        self.ctx
    }

    pub fn domain(&self) -> Domain {
        C::domain(self.ctx)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `t^e`; `None` past the truncation order.
    pub fn coeff(&self, e: i64) -> Option<C> {
        if e > self.order {
            None
        } else if e < self.valuation {
            Some(C::zero(self.ctx))
        } else {
            Some(self.coeffs[(e - self.valuation) as usize].clone())
        }
    }

    /// Coefficient of `t^e` by reference, `None` when it is zero below the
    /// valuation or unknown past the order.
    pub fn coeff_ref(&self, e: i64) -> Option<&C> {
        if e < self.valuation || e > self.order {
            None
        } else {
            self.coeffs.get((e - self.valuation) as usize)
        }
    }

    /// Coefficients of `t^0 .. t^upto`, requiring valuation >= 0.
    pub fn taylor(&self, upto: i64) -> Result<Vec<C>> {
        if upto > self.order {
            return Err(Error::TruncationTooShort {
                have: self.order,
                need: upto,
            });
        }
        Ok((0..=upto).map(|e| self.coeff(e).expect("within order")).collect())
    }

    pub fn truncate(&self, order: i64) -> Self {
        let order = order.min(self.order);
        Self::new(self.valuation, self.coeffs.clone(), order, self.ctx)
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            valuation: self.valuation + k,
            coeffs: self.coeffs.clone(),
            order: self.order + k,
            ctx: self.ctx,
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.mul(c)).collect();
        Self::new(self.valuation, coeffs, self.order, self.ctx)
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.neg()).collect();
        Self::new(self.valuation, coeffs, self.order, self.ctx)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a.sub(b))
    }

    fn combine(&self, other: &Self, f: impl Fn(&C, &C) -> C) -> Self {
        let order = self.order.min(other.order);
        let val = self.valuation.min(other.valuation);
        let zero = C::zero(self.ctx);
        let coeffs = (val..=order)
            .map(|e| {
                let a = self.coeff_ref(e).unwrap_or(&zero);
                let b = other.coeff_ref(e).unwrap_or(&zero);
                f(a, b)
            })
            .collect();
        Self::new(val, coeffs, order, self.ctx)
    }

    /// Cauchy product; order = min(ord a + val b, ord b + val a).
    pub fn mul(&self, other: &Self) -> Self {
        let order = (self.order + other.valuation).min(other.order + self.valuation);
        if self.is_zero() || other.is_zero() {
            return Self::zero(order, self.ctx);
        }
        let val = self.valuation + other.valuation;
        let len = (order - val + 1).max(0) as usize;
        let mut coeffs = Vec::with_capacity(len);
        for i in 0..len {
            let mut acc = C::zero(self.ctx);
            let lo = i.saturating_sub(other.coeffs.len() - 1);
            let hi = i.min(self.coeffs.len() - 1);
            for j in lo..=hi {
                let prod = self.coeffs[j].mul(&other.coeffs[i - j]);
                acc = acc.add(&prod);
            }
            coeffs.push(acc);
        }
        Self::new(val, coeffs, order, self.ctx)
    }

    /// Multiplicative inverse, valuation `-val(a)`, order `ord(a) - 2 val(a)`.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroSeries);
        }
        let v = self.valuation;
        let rel = self.order - v;
        let a0_inv = self.coeffs[0].inv().ok_or(Error::ZeroSeries)?;
        let n = (rel + 1) as usize;
        let mut b: Vec<C> = Vec::with_capacity(n);
        b.push(a0_inv.clone());
        for i in 1..n {
            let mut acc = C::zero(self.ctx);
            for j in 1..=i.min(self.coeffs.len() - 1) {
                acc = acc.add(&self.coeffs[j].mul(&b[i - j]));
            }
            b.push(acc.mul(&a0_inv).neg());
        }
        Ok(Self::new(-v, b, -v + rel, self.ctx))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    /// `a^j` by repeated squaring; `a^0` is one with the relative precision of `a`.
    pub fn pow(&self, j: u32) -> Self {
        let rel = if self.is_zero() {
            self.order
        } else {
            self.order - self.valuation
        };
        let mut acc = Self::one(rel.max(self.order), self.ctx);
        if j == 0 {
            return acc;
        }
        let mut base = self.clone();
        let mut e = j;
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                acc = if first { base.clone() } else { acc.mul(&base) };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Largest coefficient magnitude.
    pub fn max_magnitude(&self) -> f64 {
        self.coeffs.iter().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    /// Drops leading coefficients below `2^{-prec/2}` relative to the largest
    /// one. No-op in exact mode.
    pub fn drop_negligible_leading(&self) -> Self {
        let scale = self.max_magnitude();
        let lead = self.coeffs.iter().take_while(|c| c.is_negligible(scale)).count();
        if lead == 0 {
            return self.clone();
        }
        Self::new(
            self.valuation + lead as i64,
            self.coeffs[lead..].to_vec(),
            self.order,
            self.ctx,
        )
    }

    /// Converts every coefficient with `f`.
    pub fn map<D: Coeff>(&self, ctx: D::Ctx, f: impl Fn(&C) -> D) -> TruncatedSeries<D> {
        TruncatedSeries::new(self.valuation, self.coeffs.iter().map(f).collect(), self.order, ctx)
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            domain: self.domain().tag().to_string(),
            prec_bits: self.domain().prec_bits(),
            valuation: self.valuation,
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c.to_json_string()).collect(),
        }
    }

    pub fn from_json(json: &SeriesJson, ctx: C::Ctx) -> Result<Self> {
        let coeffs = json
            .coeffs
            .iter()
            .map(|s| C::from_json_string(s, ctx))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(json.valuation, coeffs, json.order, ctx))
    }
}

/// On-disk form: exact coefficients as `"p/q+r/si"`, numeric ones as decimal
/// strings with `prec_bits` recorded.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SeriesJson {
    pub domain: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub prec_bits: Option<usize>,
    pub valuation: i64,
    pub order: i64,
    pub coeffs: Vec<String>,
}
