//! Newton expansion of a simple branch at infinity and of rational
//! expressions in `(z, w)` along it.

use crate::coeff::{Coeff, Domain};
use crate::curve::{AlgebraicCurve, Anchor, GermSpec};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::series::TruncatedSeries;

/// `Q(t, v) = t^D P(1/t, v/t^p)` as polynomials in `t` indexed by the power of `v`.
struct Localized<C: Coeff> {
    by_v: Vec<Vec<C>>,
}

impl<C: Coeff> Localized<C> {
    fn new(curve: &AlgebraicCurve, p: u32, ctx: C::Ctx) -> Self {
        let p = p as usize;
        let d = curve.terms().keys().map(|&(a, b)| a + p * b).max().unwrap_or(0);
        let mut by_v = vec![vec![C::zero(ctx); d + 1]; curve.m() + 2];
        for (&(a, b), c) in curve.terms() {
            by_v[b][d - a - p * b] = C::from_gaussian(c, ctx);
        }
        Self { by_v }
    }

    /// `Q(0, v)` as a polynomial in `v`.
    fn at_zero(&self) -> Vec<C> {
        self.by_v.iter().map(|col| col[0].clone()).collect()
    }

    fn coeff_series(&self, b: usize, order: i64, ctx: C::Ctx) -> TruncatedSeries<C> {
        TruncatedSeries::new(0, self.by_v[b].clone(), order, ctx)
    }

    /// `Q(t, v)` and `Q_v(t, v)` for a series `v`, to order `order`.
    fn eval(&self, v: &TruncatedSeries<C>, order: i64, ctx: C::Ctx) -> (TruncatedSeries<C>, TruncatedSeries<C>) {
        let mut q = TruncatedSeries::zero(order, ctx);
        let mut dq = TruncatedSeries::zero(order, ctx);
        for b in (0..self.by_v.len()).rev() {
            dq = dq.mul(v).add(&q);
            q = q.mul(v).add(&self.coeff_series(b, order, ctx));
        }
        (q, dq)
    }
}

fn anchor_value<C: Coeff>(anchor: &Anchor, ctx: C::Ctx) -> Result<C> {
    match (anchor, C::domain(ctx)) {
        (Anchor::Exact(q), _) => Ok(C::from_gaussian(q, ctx)),
        (Anchor::Approx(_), Domain::Exact) => Err(Error::invalid(
            "an approximate anchor needs the numeric backend",
        )),
        (Anchor::Approx(_), Domain::Numeric { prec_bits }) => {
            let b = anchor.to_big(prec_bits)?;
            Ok(C::from_big(&b, ctx).expect("numeric domain"))
        }
    }
}

fn poly_scale<C: Coeff>(p: &[C], x: f64) -> f64 {
    p.iter()
        .enumerate()
        .map(|(i, c)| c.magnitude() * x.powi(i as i32))
        .sum::<f64>()
        .max(f64::MIN_POSITIVE)
}

/// Checks (and in numeric mode polishes) the anchor `v0` of `Q(0, v)`.
fn settle_anchor<C: Coeff>(q0: &[C], v0: C) -> Result<C> {
    use crate::poly::horner_with_derivative;
    let approx = matches!(C::domain(v0.ctx()), Domain::Numeric { .. });
    let mut v = v0.clone();
    if approx {
        // Newton converges quadratically: two steps past "negligible" reach full precision.
        let mut tail = 0;
        for _ in 0..200 {
            let (f, df) = horner_with_derivative(q0, &v);
            let Some(step) = f.div(&df) else { break };
            v = v.sub(&step);
            if step.is_negligible(v.magnitude().max(1.0)) {
                tail += 1;
                if tail == 2 {
                    break;
                }
            }
        }
        let moved = v.sub(&v0).magnitude();
        if moved > 1e-6 * v0.magnitude().max(1.0) {
            let (f, _) = horner_with_derivative(q0, &v0);
            return Err(Error::AnchorMismatch {
                residual: f.magnitude(),
            });
        }
    }
    let (f, df) = horner_with_derivative(q0, &v);
    let scale = poly_scale(q0, v.magnitude());
    if !f.is_negligible(scale) {
        return Err(Error::AnchorMismatch {
            residual: f.magnitude(),
        });
    }
    if df.is_negligible(scale) {
        return Err(Error::NotSimpleBranch);
    }
    Ok(v)
}

/// The series `v(t)` with `w = v / t^p` (or `w(t)` itself for a regular
/// branch) satisfying the curve through `t^order`.
pub fn newton_germ<C: Coeff>(
    curve: &AlgebraicCurve,
    spec: &GermSpec,
    order: i64,
    ctx: C::Ctx,
) -> Result<TruncatedSeries<C>> {
    let p = spec.pole_order();
    let q = Localized::<C>::new(curve, p, ctx);
    let q0 = q.at_zero();
    let v0 = settle_anchor(&q0, anchor_value::<C>(spec.anchor(), ctx)?)?;
    let mut v = TruncatedSeries::new(0, vec![v0], 0, ctx);
    let mut known = 0i64;
    while known < order {
        let next = (2 * known + 1).min(order);
        let dense: Vec<C> = (0..=known).map(|e| v.coeff(e).expect("known")).collect();
        let v_ext = TruncatedSeries::new(0, dense, next, ctx);
        let (qv, dqv) = q.eval(&v_ext, next, ctx);
        let corr = qv.div(&dqv)?;
        v = v_ext.sub(&corr).truncate(next);
        known = next;
    }
    Ok(v)
}

/// The branch itself as a Laurent series in `t`: `w = v t^{-p}`.
pub fn branch_series<C: Coeff>(
    curve: &AlgebraicCurve,
    spec: &GermSpec,
    order: i64,
    ctx: C::Ctx,
) -> Result<TruncatedSeries<C>> {
    let p = spec.pole_order() as i64;
    Ok(newton_germ::<C>(curve, spec, order + p, ctx)?.shift(-p))
}

/// `expr(z, w)` along the anchored branch, to `t^order`. The germ must be
/// holomorphic at infinity.
pub fn germ_of_expression<C: Coeff>(
    curve: &AlgebraicCurve,
    spec: &GermSpec,
    expr: &Expr,
    order: i64,
    ctx: C::Ctx,
) -> Result<TruncatedSeries<C>> {
    let p = spec.pole_order() as i64;
    let mut margin = 2 * p + 2;
    for _ in 0..8 {
        let w_order = order + margin;
        let w = branch_series::<C>(curve, spec, w_order, ctx)?;
        let z = TruncatedSeries::monomial(C::one(ctx), -1, w_order + 4 * margin + 64);
        let val = expr.eval(&z, &w)?;
        if val.order() >= order {
            let val = val.drop_negligible_leading();
            if val.valuation() < 0 {
                return Err(Error::PoleAtInfinity {
                    valuation: val.valuation(),
                });
            }
            return Ok(val.truncate(order));
        }
        margin = 2 * margin + (order - val.order()).max(0);
    }
    Err(Error::TruncationTooShort {
        have: -1,
        need: order,
    })
}

/// Residual `Q(t, v(t))` of a computed germ, for verification.
pub fn germ_residual<C: Coeff>(
    curve: &AlgebraicCurve,
    spec: &GermSpec,
    v: &TruncatedSeries<C>,
) -> TruncatedSeries<C> {
    let ctx = v.ctx();
    let q = Localized::<C>::new(curve, spec.pole_order(), ctx);
    q.eval(v, v.order(), ctx).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigc::BigComplex;
    use crate::gauss::GaussianRational as Q;

    fn q(s: &str) -> Q {
        s.parse().unwrap()
    }

    fn coeffs(s: &TruncatedSeries<Q>, upto: i64) -> Vec<String> {
        (0..=upto).map(|e| s.coeff(e).unwrap().to_string()).collect()
    }

    #[test]
    fn square_root_branch() {
        let c = AlgebraicCurve::parse("w^2 - (z^2 - 1)").unwrap();
        let v = newton_germ::<Q>(&c, &GermSpec::pole(1, Q::one()), 6, ()).unwrap();
        assert_eq!(coeffs(&v, 6), ["1", "0", "-1/2", "0", "-1/8", "0", "-1/16"]);
        assert!(germ_residual(&c, &GermSpec::pole(1, Q::one()), &v).is_zero());
    }

    #[test]
    fn cube_root_branch() {
        let c = AlgebraicCurve::parse("w^3 - (z^3 - 1)").unwrap();
        let v = newton_germ::<Q>(&c, &GermSpec::pole(1, Q::one()), 6, ()).unwrap();
        assert_eq!(coeffs(&v, 6), ["1", "0", "0", "-1/3", "0", "0", "-1/9"]);
    }

    #[test]
    fn regular_anchor_gives_positive_valuation() {
        // w^2 - z w - 1 has the branches w ~ z and w ~ -1/z.
        let c = AlgebraicCurve::parse("w^2 - z w - 1").unwrap();
        let v = newton_germ::<Q>(&c, &GermSpec::regular(Q::zero()), 5, ()).unwrap();
        assert!(v.valuation() >= 1);
        assert!(germ_residual(&c, &GermSpec::regular(Q::zero()), &v).is_zero());
    }

    #[test]
    fn expression_germs() {
        let c = AlgebraicCurve::parse("w^2 - (z^2 - 1)").unwrap();
        let spec = GermSpec::pole(1, Q::one());
        let f = germ_of_expression::<Q>(&c, &spec, &Expr::parse("1/w").unwrap(), 7, ()).unwrap();
        assert_eq!(coeffs(&f, 7), ["0", "1", "0", "1/2", "0", "3/8", "0", "5/16"]);
        let c3 = AlgebraicCurve::parse("w^3 - (z^3 - 1)").unwrap();
        let f3 = germ_of_expression::<Q>(&c3, &spec, &Expr::parse("1/w").unwrap(), 7, ()).unwrap();
        assert_eq!(coeffs(&f3, 7), ["0", "1", "0", "0", "1/3", "0", "0", "2/9"]);
        assert!(matches!(
            germ_of_expression::<Q>(&c, &spec, &Expr::parse("w").unwrap(), 4, ()),
            Err(Error::PoleAtInfinity { valuation: -1 })
        ));
        // f^2 against an independent rational expansion of 1/(z^2-1).
        let f2 = germ_of_expression::<Q>(&c, &spec, &Expr::parse("1/w^2").unwrap(), 8, ()).unwrap();
        assert_eq!(coeffs(&f2, 8), ["0", "0", "1", "0", "1", "0", "1", "0", "1"]);
        assert_eq!(coeffs(&f.pow(2).truncate(8), 8), coeffs(&f2, 8));
    }

    #[test]
    fn branch_errors() {
        let c = AlgebraicCurve::parse("w^2 - (z^2 - 1)").unwrap();
        assert!(matches!(
            newton_germ::<Q>(&c, &GermSpec::pole(1, q("2")), 4, ()),
            Err(Error::AnchorMismatch { .. })
        ));
        // w^2 = z^3 + 1 has a Puiseux branch; anchoring p = 1 gives Q(0,v) = -1.
        let c = AlgebraicCurve::parse("w^2 - z^3 - 1").unwrap();
        assert!(newton_germ::<Q>(&c, &GermSpec::pole(1, q("1")), 4, ()).is_err());
        // Double root of Q(0, v): (w - z)^2 + 1 at leading coefficient 1.
        let c = AlgebraicCurve::parse("(w - z)^2 + 1").unwrap();
        assert!(matches!(
            newton_germ::<Q>(&c, &GermSpec::pole(1, q("1")), 4, ()),
            Err(Error::NotSimpleBranch)
        ));
    }

    #[test]
    fn numeric_matches_exact() {
        let c = AlgebraicCurve::parse("w^3 - (z^3 - 1) - i z w").unwrap();
        let spec = GermSpec::pole(1, Q::one());
        let ex = germ_of_expression::<Q>(&c, &spec, &Expr::parse("1/w").unwrap(), 12, ()).unwrap();
        let nu = germ_of_expression::<BigComplex>(&c, &spec, &Expr::parse("1/w").unwrap(), 12, 256).unwrap();
        for e in 0..=12 {
            let a = ex.coeff(e).unwrap().to_big(256);
            let b = nu.coeff(e).unwrap();
            assert!(a.dist_f64(&b) < 1e-60 * a.abs_f64().max(1.0), "t^{e}");
        }
    }

    #[test]
    fn approximate_regular_anchor_is_polished() {
        // Regular branches of the four-sheeted example: roots of w^2 + (1+i)/3 w + i/3.
        let c = AlgebraicCurve::parse("w^4 - (1+i)w^3 + 3i w^2 - z(w^2 + (1+i)/3 w + i/3)").unwrap();
        let r = BigComplex::parse_decimal("-0.1666666666666666-0.1666666666666666i", 256).unwrap();
        let s = BigComplex::from_gaussian(&q("-10/9i"), 256).sqrt().scale_f64(0.5);
        let root = &r + &s;
        let spec = GermSpec::Regular(Anchor::Approx(format!("{:.15}{:+.15}i", root.re_f64(), root.im_f64())));
        let v = newton_germ::<BigComplex>(&c, &spec, 10, 256).unwrap();
        let res = germ_residual(&c, &spec, &v);
        assert!(res.coeffs().iter().all(|x| x.abs_f64() < 1e-60), "{res:?}");
        assert!(newton_germ::<Q>(&c, &spec, 4, ()).is_err());
    }
}
