//! Curve services: critical values, fibers, and analytic continuation of
//! fiber roots along paths in the `z`-plane.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;

use crate::bigc::{negligible, pow2_neg, BigComplex};
use crate::coeff::Coeff;
use crate::curve::{AlgebraicCurve, GermSpec};
use crate::error::{Error, Result};
use crate::germ::branch_series;
use crate::poly::{self, horner, horner_with_derivative};
use crate::roots::{aberth, canonical_sort};

pub fn to_c64(z: &BigComplex) -> C64 {
    let (re, im) = z.to_f64_pair();
    C64::new(re, im)
}

pub fn from_c64(z: C64, prec: usize) -> BigComplex {
    BigComplex::from_f64(z.re, z.im, prec)
}

#[derive(Clone, Debug)]
pub struct CriticalValues {
    pub finite: Vec<BigComplex>,
    pub infinity: bool,
}

#[derive(Clone, Debug)]
pub struct FiberRoots {
    pub z: BigComplex,
    pub roots: Vec<BigComplex>,
    /// Smallest pairwise distance between the roots.
    pub separation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Segment {
    Line { from: C64, to: C64 },
    /// Points `center + radius e^{i(start + s sweep)}`, `s` in `[0, 1]`.
    Arc { center: C64, radius: f64, start: f64, sweep: f64 },
}

impl Segment {
    pub fn at(&self, s: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => from + (to - from) * s,
            Segment::Arc {
                center,
                radius,
                start,
                sweep,
            } => center + C64::from_polar(radius, start + s * sweep),
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => (to - from).norm(),
            Segment::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    pub fn reversed(&self) -> Self {
        match *self {
            Segment::Line { from, to } => Segment::Line { from: to, to: from },
            Segment::Arc {
                center,
                radius,
                start,
                sweep,
            } => Segment::Arc {
                center,
                radius,
                start: start + sweep,
                sweep: -sweep,
            },
        }
    }
}

/// A piecewise path. `start` and `end` are exact; interior points come from
/// the segments in double precision, which is harmless because the corrector
/// solves at whatever point it is handed.
#[derive(Clone, Debug)]
pub struct Path {
    pub start: BigComplex,
    pub end: BigComplex,
    pub segments: Vec<Segment>,
    /// Initial step; defaults to clearance / 8.
    pub initial_step: Option<f64>,
}

impl Path {
    pub fn line(a: &BigComplex, b: &BigComplex) -> Self {
        Self {
            start: a.clone(),
            end: b.clone(),
            segments: vec![Segment::Line {
                from: to_c64(a),
                to: to_c64(b),
            }],
            initial_step: None,
        }
    }

    /// Full counterclockwise circle through `start` around `center`.
    pub fn circle(center: C64, start: &BigComplex) -> Self {
        let d = to_c64(start) - center;
        Self {
            start: start.clone(),
            end: start.clone(),
            segments: vec![Segment::Arc {
                center,
                radius: d.norm(),
                start: d.arg(),
                sweep: TAU,
            }],
            initial_step: None,
        }
    }

    pub fn reversed(&self) -> Self {
        Self {
            start: self.end.clone(),
            end: self.start.clone(),
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
            initial_step: self.initial_step,
        }
    }

    /// `self` followed by `other`; `other` must start where `self` ends.
    pub fn then(mut self, other: Path) -> Self {
        self.segments.extend(other.segments);
        self.end = other.end;
        self
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    /// Distance from the path to `p` (sampled on arcs).
    pub fn distance_to(&self, p: C64) -> f64 {
        let mut best = f64::INFINITY;
        for seg in &self.segments {
            match *seg {
                Segment::Line { from, to } => {
                    let d = to - from;
                    let l2 = d.norm_sqr();
                    let s = if l2 == 0.0 {
                        0.0
                    } else {
                        (((p - from) * d.conj()).re / l2).clamp(0.0, 1.0)
                    };
                    best = best.min((from + d * s - p).norm());
                }
                Segment::Arc { .. } => {
                    for i in 0..=256 {
                        best = best.min((seg.at(i as f64 / 256.0) - p).norm());
                    }
                }
            }
        }
        best
    }
}

/// Half the smallest distance among `cvs` and from `cvs` to `extra`, capped at 1.
pub fn clearance(cvs: &[C64], extra: &[C64]) -> f64 {
    let mut best = 2.0f64;
    for (i, a) in cvs.iter().enumerate() {
        for b in &cvs[i + 1..] {
            best = best.min((a - b).norm());
        }
        for b in extra {
            best = best.min((a - b).norm());
        }
    }
    (best / 2.0).min(1.0)
}

fn separations(ws: &[C64]) -> Vec<f64> {
    ws.iter()
        .enumerate()
        .map(|(i, a)| {
            ws.iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, b)| (a - b).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

const GROW_AFTER: usize = 4;
/// Critical values this close to a segment (relative to the detour radius)
/// count as lying on it.
pub const COLLINEAR_TOL: f64 = 1e-9;
const CORRECTOR_ITERS: usize = 8;

pub struct CurveLab {
    curve: AlgebraicCurve,
    prec: usize,
    by_w: Vec<Vec<BigComplex>>,
    dz_by_w: Vec<Vec<BigComplex>>,
    cvs: CriticalValues,
    cv64: Vec<C64>,
    base_clearance: f64,
}

impl CurveLab {
    pub fn new(curve: &AlgebraicCurve, prec: usize) -> Self {
        let by_w: Vec<Vec<BigComplex>> = (0..=curve.m() + 1)
            .map(|b| curve.w_coeff(b).iter().map(|c| BigComplex::from_gaussian(c, prec)).collect())
            .collect();
        let dz_by_w = by_w.iter().map(|p| poly::derivative(p)).collect();
        let cvs = critical_values(curve, prec);
        let cv64: Vec<C64> = cvs.finite.iter().map(to_c64).collect();
        let base_clearance = clearance(&cv64, &[]);
        Self {
            curve: curve.clone(),
            prec,
            by_w,
            dz_by_w,
            cvs,
            cv64,
            base_clearance,
        }
    }

    pub fn curve(&self) -> &AlgebraicCurve {
        &self.curve
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn critical_values(&self) -> &CriticalValues {
        &self.cvs
    }

    pub fn critical_values_c64(&self) -> &[C64] {
        &self.cv64
    }

    pub fn clearance_with(&self, extra: &[C64]) -> f64 {
        clearance(&self.cv64, extra)
    }

    pub fn max_critical_modulus(&self) -> f64 {
        self.cv64.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn nearest_cv_distance(&self, z: C64) -> f64 {
        self.cv64.iter().map(|c| (c - z).norm()).fold(f64::INFINITY, f64::min)
    }

    fn fiber_poly(&self, z: &BigComplex) -> Vec<BigComplex> {
        self.by_w.iter().map(|p| horner(p, z)).collect()
    }

    fn fiber_poly_dz(&self, z: &BigComplex) -> Vec<BigComplex> {
        self.dz_by_w.iter().map(|p| horner(p, z)).collect()
    }

    /// All roots of `P(z, .)` in canonical order, with no clearance check.
    pub fn fiber_roots_unchecked(&self, z: &BigComplex) -> Result<FiberRoots> {
        let z = z.with_prec(self.prec);
        let coeffs = self.fiber_poly(&z);
        let scale = coeffs.iter().map(|c| c.abs_f64()).fold(0.0, f64::max);
        if coeffs.last().expect("deg >= 2").abs_f64() <= negligible(self.prec) * scale {
            return Err(Error::DegenerateFiber {
                z: z.to_decimal_string(),
                critical: z.to_decimal_string(),
                clearance: 0.0,
            });
        }
        let report = aberth(&coeffs, self.prec);
        let mut roots = report.roots;
        for r in roots.iter_mut() {
            *r = self.polish(&coeffs, r);
        }
        canonical_sort(&mut roots, 1e-12);
        let r64: Vec<C64> = roots.iter().map(to_c64).collect();
        let separation = separations(&r64).into_iter().fold(f64::INFINITY, f64::min);
        Ok(FiberRoots { z, roots, separation })
    }

    /// All roots of `P(z, .)`; fails when `z` is within the clearance radius
    /// of a critical value.
    pub fn fiber_roots(&self, z: &BigComplex) -> Result<FiberRoots> {
        let z64 = to_c64(z);
        for (cv, c64) in self.cvs.finite.iter().zip(&self.cv64) {
            if (z64 - c64).norm() < self.base_clearance * (1.0 - 1e-9) {
                return Err(Error::DegenerateFiber {
                    z: z.to_decimal_string(),
                    critical: cv.to_decimal_string(),
                    clearance: self.base_clearance,
                });
            }
        }
        self.fiber_roots_unchecked(z)
    }

    /// Residual scale `sum |c_ab| |z|^a |w|^b` at a point.
    pub fn residual_scale(&self, z: &BigComplex, w: &BigComplex) -> f64 {
        self.curve.eval_scale(z.abs_f64(), w.abs_f64())
    }

    pub fn residual(&self, z: &BigComplex, w: &BigComplex) -> f64 {
        horner(&self.fiber_poly(&z.with_prec(self.prec)), w).abs_f64()
    }

    /// Newton in `w` to full working precision.
    fn polish(&self, coeffs: &[BigComplex], w: &BigComplex) -> BigComplex {
        let tol = pow2_neg(self.prec.saturating_sub(8));
        let mut w = w.with_prec(self.prec);
        for _ in 0..60 {
            let (v, dv) = horner_with_derivative(coeffs, &w);
            if v.is_zero() || dv.is_zero() {
                break;
            }
            let step = &v / &dv;
            w = &w - &step;
            if step.abs_f64() <= tol * w.abs_f64().max(1.0) {
                break;
            }
        }
        w
    }

    /// Tracks every root in `roots` (a full fiber over `path.start`) along
    /// `path` and returns them in the same order.
    pub fn track(&self, path: &Path, roots: &[BigComplex]) -> Result<Vec<BigComplex>> {
        let clear = self.clearance_with(&[to_c64(&path.start), to_c64(&path.end)]);
        let floor = clear * 1e-9;
        let mut h = path.initial_step.unwrap_or(clear / 8.0);
        let mut z = path.start.with_prec(self.prec);
        let mut ws: Vec<BigComplex> = roots.iter().map(|w| w.with_prec(self.prec)).collect();
        let nseg = path.segments.len();
        for (si, seg) in path.segments.iter().enumerate() {
            let len = seg.length();
            let mut s = 0.0f64;
            let mut streak = 0usize;
            while s < len {
                let z64 = to_c64(&z);
                let cap = self.nearest_cv_distance(z64) / 2.0;
                let step = h.min(cap).min(len - s);
                if step < floor && len - s > floor {
                    return Err(Error::StepCollapse {
                        z: z.to_decimal_string(),
                        floor,
                    });
                }
                let s_new = if len - s <= step * (1.0 + 1e-12) { len } else { s + step };
                let z_new = if s_new >= len {
                    if si + 1 == nseg {
                        path.end.with_prec(self.prec)
                    } else {
                        from_c64(seg.at(1.0), self.prec)
                    }
                } else {
                    from_c64(seg.at(s_new / len), self.prec)
                };
                match self.try_step(&z, &z_new, &ws) {
                    Some(next) => {
                        ws = next;
                        z = z_new;
                        s = s_new;
                        streak += 1;
                        if streak >= GROW_AFTER {
                            h *= 2.0;
                            streak = 0;
                        }
                    }
                    None => {
                        h = step / 2.0;
                        streak = 0;
                        if h < floor {
                            return Err(Error::StepCollapse {
                                z: z.to_decimal_string(),
                                floor,
                            });
                        }
                    }
                }
            }
        }
        // Polish at the endpoint and confirm the roots did not merge.
        let coeffs = self.fiber_poly(&z);
        let w64: Vec<C64> = ws.iter().map(to_c64).collect();
        let seps = separations(&w64);
        let polished: Vec<BigComplex> = ws.iter().map(|w| self.polish(&coeffs, w)).collect();
        for (i, p) in polished.iter().enumerate() {
            if (to_c64(p) - w64[i]).norm() >= seps[i] / 3.0 {
                return Err(Error::SheetAmbiguity { z: z.to_decimal_string() });
            }
        }
        Ok(polished)
    }

    /// One predictor-corrector step for all roots; `None` if rejected.
    fn try_step(&self, z: &BigComplex, z_new: &BigComplex, ws: &[BigComplex]) -> Option<Vec<BigComplex>> {
        let p_here = self.fiber_poly(z);
        let pz_here = self.fiber_poly_dz(z);
        let p_new = self.fiber_poly(z_new);
        let dz = z_new - z;
        let w64: Vec<C64> = ws.iter().map(to_c64).collect();
        let seps = separations(&w64);
        let mut out = Vec::with_capacity(ws.len());
        for (i, w) in ws.iter().enumerate() {
            let (_, pw) = horner_with_derivative(&p_here, w);
            let pz = horner(&pz_here, w);
            let slope = -&(&pz / &pw);
            if !slope.is_finite() {
                return None;
            }
            let pred = w + &(&slope * &dz);
            let mut c = pred.clone();
            let mut converged = false;
            for _ in 0..CORRECTOR_ITERS {
                let (v, dv) = horner_with_derivative(&p_new, &c);
                if dv.is_zero() {
                    return None;
                }
                let step = &v / &dv;
                c = &c - &step;
                if step.abs_f64() <= 1e-14 * c.abs_f64().max(1.0) {
                    converged = true;
                    break;
                }
            }
            let c64 = to_c64(&c);
            let limit = seps[i] / 3.0;
            if !converged || (c64 - to_c64(&pred)).norm() >= limit || (c64 - w64[i]).norm() >= limit {
                return None;
            }
            out.push(c);
        }
        Some(out)
    }

    /// Continues the root nearest `start_root` over `path.start` along `path`.
    pub fn continue_branch(&self, path: &Path, start_root: &BigComplex) -> Result<BigComplex> {
        let fiber = self.fiber_roots_unchecked(&path.start)?;
        let idx = self.identify(&fiber, start_root)?;
        let end = self.track(path, &fiber.roots)?;
        Ok(end[idx].clone())
    }

    /// Index of the fiber root within a third of the separation of `w`.
    pub fn identify(&self, fiber: &FiberRoots, w: &BigComplex) -> Result<usize> {
        let w64 = to_c64(w);
        let (idx, d) = fiber
            .roots
            .iter()
            .enumerate()
            .map(|(i, r)| (i, (to_c64(r) - w64).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty fiber");
        if d >= fiber.separation / 3.0 {
            return Err(Error::SheetAmbiguity {
                z: fiber.z.to_decimal_string(),
            });
        }
        Ok(idx)
    }

    /// Straight path from `a` to `b`, replacing each stretch that enters a
    /// disk of `radius` around a critical value by the shorter boundary arc
    /// (counterclockwise when the segment passes through the center).
    pub fn detour_path(&self, a: &BigComplex, b: &BigComplex, radius: f64) -> Path {
        let (p, q) = (to_c64(a), to_c64(b));
        let d = q - p;
        let len = d.norm();
        if len == 0.0 {
            return Path {
                start: a.clone(),
                end: b.clone(),
                segments: Vec::new(),
                initial_step: None,
            };
        }
        let dir = d / len;
        let mut hits: Vec<(f64, C64, f64, bool)> = Vec::new();
        for &c in &self.cv64 {
            let rel = (c - p) * dir.conj();
            let (along, off) = (rel.re, rel.im);
            if off.abs() < radius && along > 0.0 && along < len {
                let half = (radius * radius - off * off).sqrt();
                hits.push((along, c, half, off.abs() <= COLLINEAR_TOL * radius));
            }
        }
        hits.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut segments = Vec::new();
        let mut cursor = p;
        for (along, c, half, through) in hits {
            let entry = p + dir * (along - half);
            let exit = p + dir * (along + half);
            if (entry - cursor).norm() > 0.0 {
                segments.push(Segment::Line { from: cursor, to: entry });
            }
            let a0 = (entry - c).arg();
            let a1 = (exit - c).arg();
            let mut ccw = (a1 - a0).rem_euclid(TAU);
            if ccw == 0.0 {
                ccw = TAU;
            }
            let sweep = if through || ccw <= TAU - ccw { ccw } else { ccw - TAU };
            segments.push(Segment::Arc {
                center: c,
                radius,
                start: a0,
                sweep,
            });
            cursor = exit;
        }
        segments.push(Segment::Line { from: cursor, to: q });
        Path {
            start: a.clone(),
            end: b.clone(),
            segments,
            initial_step: None,
        }
    }

    /// Value at `z` of the branch anchored at infinity by `spec`.
    pub fn germ_branch_at(&self, spec: &GermSpec, z: &BigComplex) -> Result<BigComplex> {
        let z64 = to_c64(z);
        let r = 4.0 * self.max_critical_modulus() + 4.0;
        let z_ref = if z64.norm() >= r {
            z.with_prec(self.prec)
        } else if z64.norm() == 0.0 {
            from_c64(C64::new(r, 0.0), self.prec)
        } else {
            from_c64(z64 * (r / z64.norm()), self.prec)
        };
        let w_ref = self.series_value(spec, &z_ref)?;
        let fiber = self.fiber_roots_unchecked(&z_ref)?;
        let idx = self.identify(&fiber, &w_ref)?;
        if to_c64(&z_ref) == z64 {
            return Ok(fiber.roots[idx].clone());
        }
        self.fiber_roots(z)?;
        let radius = self.clearance_with(&[to_c64(&z_ref), z64]);
        let path = self.detour_path(&z_ref, z, radius);
        Ok(self.track(&path, &fiber.roots)?[idx].clone())
    }

    /// Continues the branch through `(z0, w0)` to `z` along a detoured segment.
    pub fn branch_at_from(&self, z0: &BigComplex, w0: &BigComplex, z: &BigComplex) -> Result<BigComplex> {
        let fiber = self.fiber_roots_unchecked(z0)?;
        let idx = self.identify(&fiber, w0)?;
        if to_c64(z0) == to_c64(z) {
            return Ok(fiber.roots[idx].clone());
        }
        let radius = self.clearance_with(&[to_c64(z0), to_c64(z)]);
        let path = self.detour_path(z0, z, radius);
        Ok(self.track(&path, &fiber.roots)?[idx].clone())
    }

    /// Sum of the anchored branch's Laurent series at a large `z`.
    fn series_value(&self, spec: &GermSpec, z: &BigComplex) -> Result<BigComplex> {
        let terms = 48;
        let w = branch_series::<BigComplex>(&self.curve, spec, terms, self.prec)?;
        let t = z.inv().ok_or(Error::DenominatorVanishes)?;
        let mut acc = BigComplex::zero(self.prec);
        let mut e = w.order();
        while e >= w.valuation() {
            let c = w.coeff(e).expect("within order");
            acc = &(&acc * &t) + &c;
            e -= 1;
        }
        // acc now holds sum c_e t^{e - valuation}
        let v = w.valuation();
        let shift = if v >= 0 { t.powi(v as u32) } else { z.powi((-v) as u32) };
        Ok(&acc * &shift)
    }
}

/// Finite critical values (roots of the discriminant and of the leading
/// coefficient) and whether infinity is critical.
pub fn critical_values(curve: &AlgebraicCurve, prec: usize) -> CriticalValues {
    let sf = curve.critical_polynomial();
    let coeffs: Vec<BigComplex> = sf.iter().map(|c| c.to_big(prec)).collect();
    let mut finite = if coeffs.len() >= 2 { aberth(&coeffs, prec).roots } else { Vec::new() };
    canonical_sort(&mut finite, 1e-12);
    CriticalValues {
        finite,
        infinity: curve.infinity_degenerate(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::GaussianRational as Q;

    const P: usize = 256;

    fn c(re: f64, im: f64) -> BigComplex {
        BigComplex::from_f64(re, im, P)
    }

    fn lab(src: &str) -> CurveLab {
        CurveLab::new(&AlgebraicCurve::parse(src).unwrap(), P)
    }

    fn gq(s: &str) -> BigComplex {
        BigComplex::from_gaussian(&s.parse::<Q>().unwrap(), P)
    }

    #[test]
    fn critical_values_of_examples() {
        let l = lab("w^2 - (z^2 - 1)");
        let cv = l.critical_values();
        assert_eq!(cv.finite.len(), 2);
        assert!(cv.finite[0].dist_f64(&c(-1.0, 0.0)) < 1e-70);
        assert!(cv.finite[1].dist_f64(&c(1.0, 0.0)) < 1e-70);
        assert!(!cv.infinity);

        let l = lab("w^4 - z");
        assert_eq!(l.critical_values().finite.len(), 1);
        assert!(l.critical_values().finite[0].abs_f64() < 1e-70);
        assert!(l.critical_values().infinity);

        let l = lab("w^4 - (1+i)w^3 + 3i w^2 - z(w^2 + (1+i)/3 w + i/3)");
        let want = ["0", "3/5+6/5i", "3+6i", "-3/5+6/5i", "-3+6i"];
        let cv = l.critical_values();
        assert_eq!(cv.finite.len(), 5);
        for w in want {
            let target = gq(w);
            assert!(cv.finite.iter().any(|x| x.dist_f64(&target) < 1e-20), "{w}");
        }
        assert!(cv.infinity);
    }

    #[test]
    fn critical_values_ignore_scaling() {
        let a = lab("w^3 - (z^3 - 1)");
        let b = lab("(3+2i)(w^3 - (z^3 - 1))");
        for (x, y) in a.critical_values().finite.iter().zip(&b.critical_values().finite) {
            assert!(x.dist_f64(y) < 1e-70);
        }
    }

    #[test]
    fn fibers() {
        let l = lab("w^2 - (z^2 - 1)");
        let f = l.fiber_roots(&c(2.0, 0.0)).unwrap();
        let s3 = c(3.0, 0.0).sqrt();
        assert!(f.roots[0].dist_f64(&-&s3) < 1e-70);
        assert!(f.roots[1].dist_f64(&s3) < 1e-70);

        // Cube-root oracle: 7^{1/3} by bisection in f64, refined by Newton at 256 bits.
        let (mut lo, mut hi) = (1.0f64, 2.0f64);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if mid * mid * mid < 7.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        let seven = c(7.0, 0.0);
        let three = c(3.0, 0.0);
        let mut x = c(lo, 0.0);
        for _ in 0..8 {
            let fx = &(&(&x * &x) * &x) - &seven;
            x = &x - &(&fx / &(&three * &(&x * &x)));
        }
        assert!((x.re_f64() - 1.912_931_2).abs() < 1e-7);
        let l = lab("w^3 - (z^3 - 1)");
        let f = l.fiber_roots(&c(2.0, 0.0)).unwrap();
        assert!(f.roots.iter().any(|r| r.dist_f64(&x) < 1e-70));
        for r in &f.roots {
            assert!(l.residual(&f.z, r) < negligible(P) * l.residual_scale(&f.z, r));
            assert!(((&(r * r) * r).dist_f64(&seven)) < 1e-70);
        }

        let l = lab("w^4 - z");
        let f = l.fiber_roots(&c(1.0, 0.0)).unwrap();
        let want = [c(-1.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(1.0, 0.0)];
        for (r, w) in f.roots.iter().zip(&want) {
            assert!(r.dist_f64(w) < 1e-70);
        }
        assert!(matches!(l.fiber_roots(&c(0.3, 0.0)), Err(Error::DegenerateFiber { .. })));
    }

    #[test]
    fn loops() {
        let l = lab("w^2 - z");
        let w = l.continue_branch(&Path::circle(C64::new(0.0, 0.0), &c(1.0, 0.0)), &c(1.0, 0.0)).unwrap();
        assert!(w.dist_f64(&c(-1.0, 0.0)) < 1e-70);

        let l = lab("w^2 - (z^2 - 1)");
        let s3 = c(3.0, 0.0).sqrt();
        let w = l.continue_branch(&Path::circle(C64::new(0.0, 0.0), &c(2.0, 0.0)), &s3).unwrap();
        assert!(w.dist_f64(&s3) < 1e-70);

        let l = lab("w^4 - z");
        let w = l.continue_branch(&Path::circle(C64::new(0.0, 0.0), &c(1.0, 0.0)), &c(1.0, 0.0)).unwrap();
        assert!(w.dist_f64(&c(0.0, 1.0)) < 1e-70);
    }

    #[test]
    fn round_trip() {
        let l = lab("w^3 - (z^3 - 1)");
        let a = c(2.0, 0.5);
        let b = c(-1.5, -1.0);
        let path = l.detour_path(&a, &b, 0.4);
        let f = l.fiber_roots(&a).unwrap();
        let there = l.track(&path, &f.roots).unwrap();
        let back = l.track(&path.reversed(), &there).unwrap();
        for (x, y) in back.iter().zip(&f.roots) {
            assert!(x.dist_f64(y) < pow2_neg(100));
        }
    }

    #[test]
    fn anchored_branches() {
        let l = lab("w^2 - (z^2 - 1)");
        let spec = GermSpec::pole(1, Q::one());
        let w = l.germ_branch_at(&spec, &c(2.0, 0.0)).unwrap();
        assert!(w.dist_f64(&c(3.0, 0.0).sqrt()) < 1e-70);

        let l = lab("w^3 - (z^3 - 1)");
        let w = l.germ_branch_at(&spec, &c(2.0, 0.0)).unwrap();
        assert!((w.re_f64() - 1.912_931_18).abs() < 1e-8 && w.im_f64().abs() < 1e-70);

        let l = lab("w^4 - z");
        let w = l.branch_at_from(&c(16.0, 0.0), &c(2.0, 0.0), &c(16.0, 0.0)).unwrap();
        assert!(w.dist_f64(&c(2.0, 0.0)) < 1e-70);
    }

    #[test]
    fn detours_avoid_disks() {
        let l = lab("w^3 - (z^3 - 1)");
        let path = l.detour_path(&c(3.0, 0.0), &c(-3.0, 0.0), 0.5);
        for cv in l.critical_values_c64() {
            assert!(path.distance_to(*cv) >= 0.5 - 1e-9);
        }
        // The segment passes through z = 1 itself, so the tie rule picks the counterclockwise arc.
        let arc = path.segments.iter().find_map(|s| match s {
            Segment::Arc { center, sweep, .. } if (center - C64::new(1.0, 0.0)).norm() < 1e-9 => Some(*sweep),
            _ => None,
        });
        assert!(arc.unwrap() > 0.0);
    }
}
