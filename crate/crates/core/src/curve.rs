//! Plane algebraic curves `P(z, w) = 0` with Gaussian-rational coefficients,
//! viewed as an `(m+1)`-sheeted covering of the `z`-sphere.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bigc::BigComplex;
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::expr::{Expr, ExprValue};
use crate::gauss::GaussianRational as Q;
use crate::poly;

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraicCurve {
    m: usize,
    /// `(a, b) -> c` for the term `c z^a w^b`; only nonzero entries.
    terms: BTreeMap<(usize, usize), Q>,
    /// `Res_w(P, dP/dw)` as a polynomial in `z`, assembled exactly.
    resultant: Vec<Q>,
}

impl AlgebraicCurve {
    pub fn from_terms(terms: impl IntoIterator<Item = ((usize, usize), Q)>) -> Result<Self> {
        let mut map: BTreeMap<(usize, usize), Q> = BTreeMap::new();
        for (k, c) in terms {
            let e = map.entry(k).or_default();
            *e = &*e + &c;
        }
        map.retain(|_, c| !c.is_zero());
        let deg_w = map.keys().map(|k| k.1).max().unwrap_or(0);
        if deg_w < 2 {
            return Err(Error::invalid(format!(
                "curve must have degree >= 2 in w (got {deg_w})"
            )));
        }
        let mut curve = Self {
            m: deg_w - 1,
            terms: map,
            resultant: Vec::new(),
        };
        curve.resultant = curve.compute_resultant();
        if curve.resultant.is_empty() {
            return Err(Error::invalid("curve is not square-free in w"));
        }
        Ok(curve)
    }

    /// Parses a polynomial expression such as `"w^4 - 2(2z-1)w^2 + 1"`.
    pub fn parse(src: &str) -> Result<Self> {
        let expr = Expr::parse(src)?;
        let p = expr.eval(&BiPoly::z(), &BiPoly::w())?;
        Self::from_terms(p.0)
    }

    /// Number of sheets minus one.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> &BTreeMap<(usize, usize), Q> {
        &self.terms
    }

    pub fn deg_z(&self) -> usize {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    /// Coefficient of `w^b` as a polynomial in `z` (ascending).
    pub fn w_coeff(&self, b: usize) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.deg_z() + 1];
        for (&(a, bb), c) in &self.terms {
            if bb == b {
                out[a] = c.clone();
            }
        }
        poly::trim(out)
    }

    pub fn leading_coeff(&self) -> Vec<Q> {
        self.w_coeff(self.m + 1)
    }

    pub fn resultant(&self) -> &[Q] {
        &self.resultant
    }

    /// Coefficients of `P(z0, w)` in `w`.
    pub fn fiber_poly<C: Coeff>(&self, z: &C) -> Vec<C> {
        let ctx = z.ctx();
        let mut by_b: Vec<Vec<C>> = vec![Vec::new(); self.m + 2];
        for b in 0..=self.m + 1 {
            by_b[b] = self.w_coeff(b).iter().map(|c| C::from_gaussian(c, ctx)).collect();
        }
        by_b.iter().map(|p| poly::horner(p, z)).collect()
    }

    /// `dP/dz` at `z0` as a polynomial in `w`.
    pub fn fiber_poly_dz<C: Coeff>(&self, z: &C) -> Vec<C> {
        let ctx = z.ctx();
        (0..=self.m + 1)
            .map(|b| {
                let p: Vec<C> = self.w_coeff(b).iter().map(|c| C::from_gaussian(c, ctx)).collect();
                poly::horner(&poly::derivative(&p), z)
            })
            .collect()
    }

    pub fn eval<C: Coeff>(&self, z: &C, w: &C) -> C {
        poly::horner(&self.fiber_poly(z), w)
    }

    /// Sum of coefficient magnitudes weighted by `|z|^a |w|^b`; the natural
    /// scale for residuals of `P(z, w)`.
    pub fn eval_scale(&self, z_abs: f64, w_abs: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(a, b), c)| c.abs_f64() * z_abs.powi(a as i32) * w_abs.powi(b as i32))
            .sum::<f64>()
            .max(f64::MIN_POSITIVE)
    }

    fn sylvester_det(&self, z0: &Q) -> Q {
        let p: Vec<Q> = self.fiber_poly(z0);
        let dp = poly::derivative(&p);
        let n = self.m + 1; // formal degree of p
        let size = 2 * n - 1;
        let mut mat = vec![vec![Q::zero(); size]; size];
        for r in 0..n - 1 {
            for (j, c) in p.iter().enumerate() {
                mat[r][r + j] = c.clone();
            }
        }
        for r in 0..n {
            for (j, c) in dp.iter().enumerate() {
                mat[n - 1 + r][r + j] = c.clone();
            }
        }
        exact_det(mat)
    }

    fn compute_resultant(&self) -> Vec<Q> {
        let bound = (2 * self.m + 1) * self.deg_z();
        let xs: Vec<Q> = (0..=bound as i64).map(Q::from_integer).collect();
        let ys: Vec<Q> = xs.iter().map(|x| self.sylvester_det(x)).collect();
        poly::interpolate(&xs, &ys)
    }

    /// Monic square-free polynomial whose roots are the finite critical values.
    pub fn critical_polynomial(&self) -> Vec<Q> {
        let lc = self.leading_coeff();
        let prod = poly::mul(&self.resultant, &lc);
        poly::squarefree_part(&prod)
    }

    /// Whether the branches over infinity fail to be `m+1` simple branches
    /// `w ~ c z^p` with integer `p` and distinct `c`, judged from the upper
    /// Newton polygon of the support of `P`.
    pub fn infinity_degenerate(&self) -> bool {
        let pts: Vec<(i64, i64)> = (0..=self.m + 1)
            .filter_map(|b| {
                let c = self.w_coeff(b);
                (!c.is_empty()).then(|| (b as i64, c.len() as i64 - 1))
            })
            .collect();
        if pts.first().map(|p| p.0) != Some(0) {
            // w = 0 is a component; treat as degenerate.
            return true;
        }
        // Upper convex hull in the (b, deg_z) plane.
        let mut hull: Vec<(i64, i64)> = Vec::new();
        for &p in &pts {
            while hull.len() >= 2 {
                let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
                if cross >= 0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        for edge in hull.windows(2) {
            let ((b0, a0), (b1, a1)) = (edge[0], edge[1]);
            let db = b1 - b0;
            let da = a0 - a1;
            if da % db != 0 {
                return true;
            }
            let q = da / db; // w ~ c z^q along this edge
            let mut edge_poly = vec![Q::zero(); db as usize + 1];
            for (&(a, b), c) in &self.terms {
                let (a, b) = (a as i64, b as i64);
                if b >= b0 && b <= b1 && a + q * b == a0 + q * b0 {
                    edge_poly[(b - b0) as usize] = c.clone();
                }
            }
            let g = poly::gcd(&edge_poly, &poly::derivative(&edge_poly));
            if g.len() > 1 {
                return true;
            }
        }
        false
    }

    pub fn to_json(&self) -> CurveJson {
        CurveJson {
            m: self.m,
            terms: self
                .terms
                .iter()
                .map(|(&(za, wb), c)| TermJson {
                    za,
                    wb,
                    c: c.to_string(),
                })
                .collect(),
            branch: None,
        }
    }
}

/// Determinant over `Q(i)` by elimination.
pub fn exact_det(mut mat: Vec<Vec<Q>>) -> Q {
    let n = mat.len();
    let mut det = Q::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !mat[r][col].is_zero()) else {
            return Q::zero();
        };
        if piv != col {
            mat.swap(piv, col);
            det = -det;
        }
        let pv = mat[col][col].clone();
        det = &det * &pv;
        let inv = pv.inv().expect("nonzero pivot");
        for r in col + 1..n {
            if mat[r][col].is_zero() {
                continue;
            }
            let f = &mat[r][col] * &inv;
            for c in col..n {
                let t = &f * &mat[col][c];
                mat[r][c] = &mat[r][c] - &t;
            }
        }
    }
    det
}

/// Bivariate polynomial used only to turn curve expressions into terms.
#[derive(Clone, Debug, Default)]
struct BiPoly(BTreeMap<(usize, usize), Q>);

impl BiPoly {
    fn z() -> Self {
        Self(BTreeMap::from([((1, 0), Q::one())]))
    }
    fn w() -> Self {
        Self(BTreeMap::from([((0, 1), Q::one())]))
    }
    fn constant(&self) -> Option<Q> {
        match self.0.len() {
            0 => Some(Q::zero()),
            1 => self.0.get(&(0, 0)).cloned(),
            _ => None,
        }
    }
    fn cleaned(mut self) -> Self {
        self.0.retain(|_, c| !c.is_zero());
        self
    }
}

impl ExprValue for BiPoly {
    fn constant_like(&self, c: &Q) -> Self {
        Self(BTreeMap::from([((0, 0), c.clone())])).cleaned()
    }
    fn e_add(&self, o: &Self) -> Self {
        let mut out = self.0.clone();
        for (k, c) in &o.0 {
            let e = out.entry(*k).or_default();
            *e = &*e + c;
        }
        Self(out).cleaned()
    }
    fn e_sub(&self, o: &Self) -> Self {
        self.e_add(&o.e_neg())
    }
    fn e_mul(&self, o: &Self) -> Self {
        let mut out: BTreeMap<(usize, usize), Q> = BTreeMap::new();
        for (&(a1, b1), c1) in &self.0 {
            for (&(a2, b2), c2) in &o.0 {
                let e = out.entry((a1 + a2, b1 + b2)).or_default();
                *e = &*e + &(c1 * c2);
            }
        }
        Self(out).cleaned()
    }
    fn e_div(&self, o: &Self) -> Result<Self> {
        match o.constant() {
            Some(c) if !c.is_zero() => {
                let inv = c.inv().expect("nonzero");
                Ok(Self(self.0.iter().map(|(k, v)| (*k, v * &inv)).collect()))
            }
            _ => Err(Error::invalid("curve polynomial may only be divided by nonzero constants")),
        }
    }
    fn e_neg(&self) -> Self {
        Self(self.0.iter().map(|(k, v)| (*k, -v)).collect())
    }
    fn e_pow(&self, e: i32) -> Result<Self> {
        if e < 0 {
            return Err(Error::invalid("negative power in curve polynomial"));
        }
        let mut acc = self.constant_like(&Q::one());
        for _ in 0..e {
            acc = acc.e_mul(self);
        }
        Ok(acc)
    }
}

/// Which branch over `infinity` carries the germs.
#[derive(Clone, Debug, PartialEq)]
pub enum GermSpec {
    /// `w(infinity) = value`; `Approx` anchors are decimal strings polished numerically.
    Regular(Anchor),
    /// `w ~ leading * z^order` with `order >= 1`.
    Pole { order: u32, leading: Anchor },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Anchor {
    Exact(Q),
    Approx(String),
}

impl Anchor {
    pub fn parse(s: &str) -> Result<Self> {
        match s.parse::<Q>() {
            Ok(q) => Ok(Anchor::Exact(q)),
            Err(_) => {
                BigComplex::parse_decimal(s, 64)?;
                Ok(Anchor::Approx(s.to_string()))
            }
        }
    }

    pub fn to_big(&self, prec: usize) -> Result<BigComplex> {
        match self {
            Anchor::Exact(q) => Ok(BigComplex::from_gaussian(q, prec)),
            Anchor::Approx(s) => BigComplex::parse_decimal(s, prec),
        }
    }

    fn to_json_string(&self) -> String {
        match self {
            Anchor::Exact(q) => q.to_string(),
            Anchor::Approx(s) => s.clone(),
        }
    }
}

impl GermSpec {
    pub fn pole(order: u32, leading: Q) -> Self {
        GermSpec::Pole {
            order,
            leading: Anchor::Exact(leading),
        }
    }

    pub fn regular(value: Q) -> Self {
        GermSpec::Regular(Anchor::Exact(value))
    }

    pub fn pole_order(&self) -> u32 {
        match self {
            GermSpec::Regular(_) => 0,
            GermSpec::Pole { order, .. } => *order,
        }
    }

    pub fn anchor(&self) -> &Anchor {
        match self {
            GermSpec::Regular(a) => a,
            GermSpec::Pole { leading, .. } => leading,
        }
    }

    pub fn to_json(&self) -> BranchJson {
        match self {
            GermSpec::Regular(a) => BranchJson {
                pole_order: None,
                leading: None,
                value: Some(a.to_json_string()),
            },
            GermSpec::Pole { order, leading } => BranchJson {
                pole_order: Some(*order),
                leading: Some(leading.to_json_string()),
                value: None,
            },
        }
    }

    pub fn from_json(b: &BranchJson) -> Result<Self> {
        match (b.pole_order, &b.leading, &b.value) {
            (Some(p), Some(l), None) if p >= 1 => Ok(GermSpec::Pole {
                order: p,
                leading: Anchor::parse(l)?,
            }),
            (Some(0), None, Some(v)) | (None, None, Some(v)) => Ok(GermSpec::Regular(Anchor::parse(v)?)),
            _ => Err(Error::invalid(
                "branch must be {\"pole_order\": p >= 1, \"leading\": c} or {\"value\": v}",
            )),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub za: usize,
    pub wb: usize,
    pub c: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Default)]
pub struct BranchJson {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pole_order: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub leading: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<String>,
}

/// Curve input file.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CurveJson {
    pub m: usize,
    pub terms: Vec<TermJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub branch: Option<BranchJson>,
}

impl CurveJson {
    pub fn into_curve(&self) -> Result<(AlgebraicCurve, Option<GermSpec>)> {
        let terms = self
            .terms
            .iter()
            .map(|t| Ok(((t.za, t.wb), t.c.parse::<Q>()?)))
            .collect::<Result<Vec<_>>>()?;
        let curve = AlgebraicCurve::from_terms(terms)?;
        if curve.m() != self.m {
            return Err(Error::invalid(format!(
                "declared m = {} but deg_w P = {}",
                self.m,
                curve.m() + 1
            )));
        }
        let spec = self.branch.as_ref().map(GermSpec::from_json).transpose()?;
        Ok((curve, spec))
    }

    pub fn from_curve(curve: &AlgebraicCurve, spec: Option<&GermSpec>) -> Self {
        let mut j = curve.to_json();
        j.branch = spec.map(|s| s.to_json());
        j
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_degree() {
        let c = AlgebraicCurve::parse("w^4 - 2(2z-1)w^2 + 1").unwrap();
        assert_eq!(c.m(), 3);
        assert_eq!(c.deg_z(), 1);
        assert_eq!(c.w_coeff(2), vec![Q::from_integer(2), Q::from_integer(-4)]);
        assert!(AlgebraicCurve::parse("(w-z)^2").is_err());
        assert!(AlgebraicCurve::parse("w - z").is_err());
    }

    #[test]
    fn resultant_of_square_root_curve() {
        // Res_w(w^2 - (z^2-1), 2w) = 4 (z^2 - 1) up to sign.
        let c = AlgebraicCurve::parse("w^2 - (z^2 - 1)").unwrap();
        let sf = c.critical_polynomial();
        assert_eq!(sf, vec![Q::from_integer(-1), Q::zero(), Q::one()]);
    }

    #[test]
    fn infinity_structure() {
        let sqrt = AlgebraicCurve::parse("w^2 - (z^2 - 1)").unwrap();
        assert!(!sqrt.infinity_degenerate());
        let quartic = AlgebraicCurve::parse("w^4 - z").unwrap();
        assert!(quartic.infinity_degenerate());
        let cubic = AlgebraicCurve::parse("w^3 - (z^3 - 1)").unwrap();
        assert!(!cubic.infinity_degenerate());
        let ex1 = AlgebraicCurve::parse("w^4 - 2(2z-1)w^2 + 1").unwrap();
        assert!(ex1.infinity_degenerate());
    }

    #[test]
    fn json_round_trip() {
        let c = AlgebraicCurve::parse("w^4 - (1+i)w^3 + 3i w^2 - z(w^2 + (1+i)/3 w + i/3)").unwrap();
        let spec = GermSpec::pole(1, Q::one());
        let j = CurveJson::from_curve(&c, Some(&spec));
        let text = serde_json::to_string(&j).unwrap();
        let back: CurveJson = serde_json::from_str(&text).unwrap();
        let (c2, s2) = back.into_curve().unwrap();
        assert_eq!(c2, c);
        assert_eq!(s2, Some(spec));
    }
}
