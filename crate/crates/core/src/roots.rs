//! Simultaneous polynomial root finding (Aberth–Ehrlich).
//!
//! A double-precision pass finds all roots cheaply; the same iteration is then
//! rerun at the working precision, where it converges cubically.

use num_complex::Complex64;

use crate::bigc::{pow2_neg, BigComplex};
use crate::poly::horner_with_derivative;

const F64_MAX_ITER: usize = 800;
const BIG_MAX_ITER: usize = 80;

#[derive(Clone, Debug)]
pub struct RootReport {
    pub roots: Vec<BigComplex>,
    pub converged: bool,
    pub iterations: usize,
}

fn eval_f64(p: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for c in p.iter().rev() {
        d = d * z + v;
        v = v * z + c;
    }
    (v, d)
}

fn initial_guesses(monic: &[Complex64]) -> Vec<Complex64> {
    let d = monic.len() - 1;
    // Fujiwara bound on root moduli.
    let mut bound: f64 = 0.0;
    for (i, c) in monic.iter().enumerate().take(d) {
        let k = (d - i) as f64;
        let mut m = c.norm();
        if i == 0 {
            m /= 2.0;
        }
        bound = bound.max(m.powf(1.0 / k));
    }
    let bound = (2.0 * bound).max(f64::MIN_POSITIVE.sqrt());
    let r0 = monic[0].norm().powf(1.0 / d as f64);
    let radius = if r0 > 0.0 && r0.is_finite() {
        r0.clamp(bound * 1e-6, bound)
    } else {
        bound * 0.5
    };
    let center = -monic[d - 1] / d as f64;
    (0..d)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / d as f64 + 0.7;
            center + Complex64::from_polar(radius, theta)
        })
        .collect()
}

fn aberth_f64(monic: &[Complex64]) -> Option<Vec<Complex64>> {
    let d = monic.len() - 1;
    let mut z = initial_guesses(monic);
    for _ in 0..F64_MAX_ITER {
        let mut max_step: f64 = 0.0;
        for k in 0..d {
            let (v, dv) = eval_f64(monic, z[k]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..d {
                if j != k {
                    s += (z[k] - z[j]).inv();
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if !step.is_finite() {
                return None;
            }
            z[k] -= step;
            max_step = max_step.max(step.norm() / z[k].norm().max(1.0));
        }
        if max_step < 1e-14 {
            break;
        }
    }
    z.iter().all(|c| c.is_finite()).then_some(z)
}

/// All roots of `sum coeffs[i] x^i` at `prec` bits. The leading coefficient
/// must be nonzero.
pub fn aberth(coeffs: &[BigComplex], prec: usize) -> RootReport {
    let d = coeffs.len().saturating_sub(1);
    if d == 0 {
        return RootReport {
            roots: Vec::new(),
            converged: true,
            iterations: 0,
        };
    }
    let lead = coeffs[d].with_prec(prec);
    assert!(!lead.is_zero(), "aberth: zero leading coefficient");
    let monic: Vec<BigComplex> = coeffs.iter().map(|c| &c.with_prec(prec) / &lead).collect();
    if d == 1 {
        return RootReport {
            roots: vec![-&monic[0]],
            converged: true,
            iterations: 0,
        };
    }
    let monic64: Vec<Complex64> = monic
        .iter()
        .map(|c| {
            let (re, im) = c.to_f64_pair();
            Complex64::new(re, im)
        })
        .collect();
    let start = if monic64.iter().all(|c| c.is_finite()) {
        aberth_f64(&monic64).unwrap_or_else(|| initial_guesses(&monic64))
    } else {
        (0..d)
            .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / d as f64 + 0.7))
            .collect()
    };
    let mut z: Vec<BigComplex> = start.iter().map(|c| BigComplex::from_f64(c.re, c.im, prec)).collect();
    let tol = pow2_neg(prec.saturating_sub(12));
    let one = BigComplex::one(prec);
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..BIG_MAX_ITER {
        iterations = it + 1;
        let mut max_step: f64 = 0.0;
        for k in 0..d {
            let (v, dv) = horner_with_derivative(&monic, &z[k]);
            if v.is_zero() {
                continue;
            }
            let ratio = &v / &dv;
            let mut s = BigComplex::zero(prec);
            for j in 0..d {
                if j != k {
                    if let Some(r) = (&z[k] - &z[j]).inv() {
                        s = &s + &r;
                    }
                }
            }
            let denom = &one - &(&ratio * &s);
            let step = if denom.is_zero() { ratio } else { &ratio / &denom };
            if !step.is_finite() {
                continue;
            }
            z[k] = &z[k] - &step;
            max_step = max_step.max(step.abs_f64() / z[k].abs_f64().max(1.0));
        }
        if max_step < tol {
            converged = true;
            break;
        }
    }
    RootReport {
        roots: z,
        converged,
        iterations,
    }
}

/// Sorts by real part, then imaginary part, treating real parts that agree to
/// within `tol * scale` as equal.
pub fn canonical_sort(roots: &mut [BigComplex], tol: f64) {
    let scale = roots.iter().map(|r| r.abs_f64()).fold(1.0, f64::max);
    let eps = tol * scale;
    roots.sort_by(|a, b| {
        let (ar, ai) = a.to_f64_pair();
        let (br, bi) = b.to_f64_pair();
        if (ar - br).abs() <= eps {
            ai.partial_cmp(&bi).unwrap_or(std::cmp::Ordering::Equal)
        } else {
            ar.partial_cmp(&br).unwrap_or(std::cmp::Ordering::Equal)
        }
    });
}
