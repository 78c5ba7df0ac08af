//! Dense univariate polynomials, coefficients in ascending degree order.

use crate::coeff::Coeff;
use crate::gauss::GaussianRational as Q;

pub fn horner<C: Coeff>(coeffs: &[C], x: &C) -> C {
    let mut it = coeffs.iter().rev();
    let Some(first) = it.next() else {
        return C::zero(x.ctx());
    };
    let mut acc = first.clone();
    for c in it {
        acc = acc.mul(x).add(c);
    }
    acc
}

/// Value and first derivative together.
pub fn horner_with_derivative<C: Coeff>(coeffs: &[C], x: &C) -> (C, C) {
    let zero = C::zero(x.ctx());
    let mut p = zero.clone();
    let mut dp = zero;
    for c in coeffs.iter().rev() {
        dp = dp.mul(x).add(&p);
        p = p.mul(x).add(c);
    }
    (p, dp)
}

pub fn derivative<C: Coeff>(coeffs: &[C]) -> Vec<C> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(d, c)| c.mul(&C::from_i64(d as i64, c.ctx())))
        .collect()
}

/// Removes exactly-zero leading coefficients.
pub fn trim<C: Coeff>(mut p: Vec<C>) -> Vec<C> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn degree<C: Coeff>(p: &[C]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn mul<C: Coeff>(a: &[C], b: &[C]) -> Vec<C> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let ctx = a[0].ctx();
    let mut out = vec![C::zero(ctx); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

/// Exact long division over `Q(i)`. Panics if `d` is zero.
pub fn div_rem(n: &[Q], d: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let d = trim(d.to_vec());
    let dd = d.len().checked_sub(1).expect("division by zero polynomial");
    let lead_inv = d[dd].inv().expect("nonzero lead");
    let mut r = trim(n.to_vec());
    if r.len() < d.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![Q::zero(); r.len() - dd];
    while r.len() >= d.len() {
        let shift = r.len() - d.len();
        let c = &r[r.len() - 1] * &lead_inv;
        for (k, dk) in d.iter().enumerate() {
            r[shift + k] = &r[shift + k] - &(&c * dk);
        }
        q[shift] = c;
        r.pop();
        r = trim(r);
    }
    (q, r)
}

pub fn monic(p: &[Q]) -> Vec<Q> {
    let p = trim(p.to_vec());
    match p.last() {
        None => p,
        Some(lead) => {
            let inv = lead.inv().expect("nonzero");
            p.iter().map(|c| c * &inv).collect()
        }
    }
}

/// Monic greatest common divisor over `Q(i)`.
pub fn gcd(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let (_, r) = div_rem(&x, &y);
        x = y;
        y = monic(&r);
    }
    monic(&x)
}

/// `p / gcd(p, p')`: same roots, all simple.
pub fn squarefree_part(p: &[Q]) -> Vec<Q> {
    let p = trim(p.to_vec());
    if p.len() <= 2 {
        return monic(&p);
    }
    let g = gcd(&p, &derivative(&p));
    let (q, r) = div_rem(&p, &g);
    debug_assert!(r.is_empty());
    monic(&q)
}

/// Polynomial through `(xs[i], ys[i])` via Newton divided differences.
pub fn interpolate(xs: &[Q], ys: &[Q]) -> Vec<Q> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    let mut dd = ys.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = &(&dd[i] - &dd[i - 1]) / &(&xs[i] - &xs[i - level]);
        }
    }
    // Expand the Newton form from the innermost coefficient outward.
    let mut out: Vec<Q> = vec![dd[n - 1].clone()];
    for i in (0..n - 1).rev() {
        // out = out * (x - xs[i]) + dd[i]
        let mut next = vec![Q::zero(); out.len() + 1];
        for (k, c) in out.iter().enumerate() {
            next[k + 1] = &next[k + 1] + c;
            next[k] = &next[k] - &(c * &xs[i]);
        }
        next[0] = &next[0] + &dd[i];
        out = next;
    }
    trim(out)
}
