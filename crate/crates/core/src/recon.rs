//! Ratio approximants of an HP system, the branch-value candidates they are
//! expected to converge to, and zero export.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::bigc::{negligible, pow2_neg, BigComplex};
use crate::coeff::Coeff;
use crate::curve::GermSpec;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::hp::{k_subsets, HPSolution};
use crate::lab::{to_c64, CurveLab};
use crate::roots::{aberth, canonical_sort};

/// `{0, .., k-2, k}`, the numerator of the distinguished ratio.
pub fn distinguished_numerator(k: usize) -> Vec<usize> {
    (0..k - 1).chain(std::iter::once(k)).collect()
}

/// `{0, .., k-1}`.
pub fn distinguished_denominator(k: usize) -> Vec<usize> {
    (0..k).collect()
}

fn poly_of<'a, C: Coeff>(sol: &'a HPSolution<C>, s: &[usize]) -> Result<&'a [C]> {
    sol.poly(s)
        .ok_or_else(|| Error::InvalidInput(format!("{s:?} is not a {}-subset of 0..={}", sol.k, sol.m)))
}

/// Value and `sum |c_d| |z|^d`.
fn eval_with_scale<C: Coeff>(p: &[C], z: &C) -> (C, f64) {
    let az = z.magnitude();
    let mut v = C::zero(z.ctx());
    let mut s = 0.0;
    for c in p.iter().rev() {
        v = v.mul(z).add(c);
        s = s * az + c.magnitude();
    }
    (v, s)
}

/// `P_J(z) / P_I(z)` in the solution's own domain.
pub fn ratio_eval<C: Coeff>(sol: &HPSolution<C>, j: &[usize], i: &[usize], z: &C) -> Result<C> {
    let (num, _) = eval_with_scale(poly_of(sol, j)?, z);
    let (den, scale) = eval_with_scale(poly_of(sol, i)?, z);
    if den.is_negligible(scale) {
        return Err(Error::DenominatorNearZero {
            z: z.to_json_string(),
            value: den.magnitude(),
        });
    }
    Ok(num.div(&den).expect("nonzero denominator"))
}

/// `P_J(z) / P_I(z)` at a floating point `z`, whatever the solution's domain.
pub fn ratio_at<C: Coeff>(sol: &HPSolution<C>, j: &[usize], i: &[usize], z: &BigComplex) -> Result<BigComplex> {
    let prec = z.prec();
    let big = |s: &[usize]| -> Result<Vec<BigComplex>> { Ok(poly_of(sol, s)?.iter().map(|c| c.to_big(prec)).collect()) };
    let (num, _) = eval_with_scale(&big(j)?, z);
    let (den, scale) = eval_with_scale(&big(i)?, z);
    if den.abs_f64() <= negligible(prec) * scale {
        return Err(Error::DenominatorNearZero {
            z: z.to_decimal_string(),
            value: den.abs_f64(),
        });
    }
    Ok(&num / &den)
}

#[derive(Clone, Debug)]
pub struct Candidate {
    pub subset: Vec<usize>,
    /// `None` when the defining minor is singular.
    pub value: Option<BigComplex>,
}

#[derive(Clone, Debug)]
pub struct CandidateTable {
    pub z: BigComplex,
    pub k: usize,
    /// Fiber roots at `z`; their indices are the branch labels.
    pub branches: Vec<BigComplex>,
    pub germ_branch: usize,
    pub candidates: Vec<Candidate>,
    /// Minimum pairwise distance between present candidate values.
    pub separation: f64,
}

impl CandidateTable {
    fn new(z: BigComplex, k: usize, branches: Vec<BigComplex>, germ_branch: usize, candidates: Vec<Candidate>) -> Self {
        let vals: Vec<C64> = candidates.iter().filter_map(|c| c.value.as_ref().map(to_c64)).collect();
        let mut separation = f64::INFINITY;
        for (a, x) in vals.iter().enumerate() {
            for y in &vals[a + 1..] {
                separation = separation.min((x - y).norm());
            }
        }
        Self {
            z,
            k,
            branches,
            germ_branch,
            candidates,
            separation,
        }
    }

    /// Present candidates ordered by distance to `v`.
    pub fn nearest(&self, v: &BigComplex) -> Vec<(usize, f64)> {
        let mut d: Vec<(usize, f64)> = self
            .candidates
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.value.as_ref().map(|x| (i, x.dist_f64(v))))
            .collect();
        d.sort_by(|a, b| a.1.total_cmp(&b.1));
        d
    }
}

struct Fiber {
    z: BigComplex,
    roots: Vec<BigComplex>,
    germ: usize,
}

fn fiber_with_germ(lab: &CurveLab, spec: &GermSpec, z: &BigComplex) -> Result<Fiber> {
    let z = z.with_prec(lab.prec());
    let fiber = lab.fiber_roots(&z)?;
    let w = lab.germ_branch_at(spec, &z)?;
    let germ = lab.identify(&fiber, &w)?;
    Ok(Fiber {
        z,
        roots: fiber.roots,
        germ,
    })
}

/// Candidates `sum_{s in S} f(z, w_s)` over all `k`-subsets `S` of the fiber.
pub fn subset_sum_oracle(lab: &CurveLab, f: &Expr, spec: &GermSpec, k: usize, z: &BigComplex) -> Result<CandidateTable> {
    let fib = fiber_with_germ(lab, spec, z)?;
    let vals: Vec<BigComplex> = fib.roots.iter().map(|w| f.eval(&fib.z, w)).collect::<Result<_>>()?;
    let candidates = k_subsets(vals.len(), k)
        .into_iter()
        .map(|s| {
            let v = s.iter().fold(BigComplex::zero(lab.prec()), |acc, &i| &acc + &vals[i]);
            Candidate {
                subset: s,
                value: Some(v),
            }
        })
        .collect();
    Ok(CandidateTable::new(fib.z, k, fib.roots, fib.germ, candidates))
}

/// Determinant by Gaussian elimination with partial pivoting, together with
/// the Hadamard bound of the input.
fn det_with_bound(mut a: Vec<Vec<BigComplex>>, prec: usize) -> (BigComplex, f64) {
    let n = a.len();
    let bound: f64 = a
        .iter()
        .map(|row| row.iter().map(|x| x.abs_f64().powi(2)).sum::<f64>().sqrt())
        .product();
    let mut det = BigComplex::one(prec);
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| a[x][c].abs_f64().total_cmp(&a[y][c].abs_f64()))
            .expect("nonempty");
        if a[p][c].is_zero() {
            return (BigComplex::zero(prec), bound);
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det = &det * &a[c][c];
        let inv = a[c][c].inv().expect("nonzero pivot");
        for r in c + 1..n {
            let factor = &a[r][c] * &inv;
            for cc in c..n {
                let t = &factor * &a[c][cc];
                a[r][cc] = &a[r][cc] - &t;
            }
        }
    }
    (det, bound)
}

/// Candidates `det F_S[J] / det F_S[I]` over all `k`-subsets `S` of the
/// fiber, where `F_S` has rows `(f_0, .., f_m)` at the branches in `S` and
/// `f_0 = 1`.
pub fn minor_ratio_candidates(
    lab: &CurveLab,
    fs: &[Expr],
    spec: &GermSpec,
    j: &[usize],
    i: &[usize],
    z: &BigComplex,
) -> Result<CandidateTable> {
    let k = i.len();
    if j.len() != k {
        return Err(Error::InvalidInput("J and I must have the same size".into()));
    }
    let m = lab.curve().m();
    if fs.len() != m {
        return Err(Error::InvalidInput(format!("expected {m} functions, got {}", fs.len())));
    }
    if j.iter().chain(i).any(|&x| x > m) {
        return Err(Error::InvalidInput(format!("column index above {m}")));
    }
    let prec = lab.prec();
    let fib = fiber_with_germ(lab, spec, z)?;
    let rows: Vec<Vec<BigComplex>> = fib
        .roots
        .iter()
        .map(|w| {
            std::iter::once(Ok(BigComplex::one(prec)))
                .chain(fs.iter().map(|f| f.eval(&fib.z, w)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let minor = |s: &[usize], cols: &[usize]| -> Vec<Vec<BigComplex>> {
        s.iter()
            .map(|&r| cols.iter().map(|&c| rows[r][c].clone()).collect())
            .collect()
    };
    let candidates = k_subsets(fib.roots.len(), k)
        .into_iter()
        .map(|s| {
            let (dj, _) = det_with_bound(minor(&s, j), prec);
            let (di, bound) = det_with_bound(minor(&s, i), prec);
            let value = if di.abs_f64() <= negligible(prec) * bound {
                None
            } else {
                Some(&dj / &di)
            };
            Candidate { subset: s, value }
        })
        .collect();
    Ok(CandidateTable::new(fib.z, k, fib.roots, fib.germ, candidates))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RatioEntry {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<String>,
    /// Distance to the matched candidate.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<f64>,
    pub skipped: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RateFit {
    /// `exp` of the least-squares slope of `ln error` against `n`.
    pub rho: f64,
    pub r_squared: f64,
    /// The `n` values of the monotone tail used for the fit.
    pub tail: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ReconReport {
    pub z: String,
    pub numerator: Vec<usize>,
    pub denominator: Vec<usize>,
    pub entries: Vec<RatioEntry>,
    pub matched_subset: Vec<usize>,
    pub matched_value: String,
    pub final_error: f64,
    pub separation: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rate: Option<RateFit>,
    pub ambiguous: bool,
    pub germ_branch: usize,
    pub germ_in_subset: bool,
    pub disconnected_warning: bool,
}

/// Minimum number of points for a rate fit.
pub const MIN_TAIL: usize = 4;

/// Least-squares fit of `ln e` against `n` on the longest strictly decreasing
/// run of positive errors that ends at the last usable entry.
pub fn fit_rate(points: &[(usize, f64)]) -> Option<RateFit> {
    let usable: Vec<(usize, f64)> = points.to_vec();
    let last = usable.len().checked_sub(1)?;
    if usable[last].1 <= 0.0 || !usable[last].1.is_finite() {
        return None;
    }
    let mut start = last;
    while start > 0 && usable[start - 1].1 > usable[start].1 && usable[start - 1].1.is_finite() {
        start -= 1;
    }
    let tail = &usable[start..];
    if tail.len() < MIN_TAIL {
        return None;
    }
    let xs: Vec<f64> = tail.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = tail.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Some(RateFit {
        rho: slope.exp(),
        r_squared,
        tail: tail.iter().map(|p| p.0).collect(),
    })
}

/// Evaluates `P_J / P_I` at the table's point for every solution, matches
/// the largest-`n` value to the nearest candidate and measures the whole
/// sequence against it.
pub fn infer_limit_and_rate<C: Coeff>(
    sols: &[HPSolution<C>],
    j: &[usize],
    i: &[usize],
    table: &CandidateTable,
    connected: bool,
) -> Result<ReconReport> {
    let mut ordered: Vec<&HPSolution<C>> = sols.iter().collect();
    ordered.sort_by_key(|s| s.n);
    let values: Vec<(usize, Option<BigComplex>)> = ordered
        .iter()
        .map(|s| match ratio_at(s, j, i, &table.z) {
            Ok(v) => Ok((s.n, Some(v))),
            Err(Error::DenominatorNearZero { .. }) => Ok((s.n, None)),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let usable = values.iter().filter(|v| v.1.is_some()).count();
    if usable < 2 {
        return Err(Error::NoUsableN);
    }
    let last = values.iter().rev().find_map(|v| v.1.as_ref()).expect("usable value");
    let near = table.nearest(last);
    let &(matched, final_error) = near.first().ok_or(Error::SingularMinor)?;
    let target = table.candidates[matched].value.clone().expect("present candidate");
    let entries: Vec<RatioEntry> = values
        .iter()
        .map(|(n, v)| RatioEntry {
            n: *n,
            value: v.as_ref().map(|x| x.to_decimal_string()),
            error: v.as_ref().map(|x| x.dist_f64(&target)),
            skipped: v.is_none(),
        })
        .collect();
    let points: Vec<(usize, f64)> = entries.iter().filter_map(|e| e.error.map(|x| (e.n, x))).collect();
    let ambiguous = near.get(1).is_some_and(|&(_, d)| d <= 10.0 * final_error) || final_error >= table.separation / 2.0;
    let subset = table.candidates[matched].subset.clone();
    Ok(ReconReport {
        z: table.z.to_decimal_string(),
        numerator: j.to_vec(),
        denominator: i.to_vec(),
        entries,
        germ_in_subset: subset.contains(&table.germ_branch),
        matched_subset: subset,
        matched_value: target.to_decimal_string(),
        final_error,
        separation: table.separation,
        rate: fit_rate(&points),
        ambiguous,
        germ_branch: table.germ_branch,
        disconnected_warning: !connected,
    })
}

/// `n,|error|,skipped` rows.
pub fn errors_csv(report: &ReconReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "abs_error", "skipped"]).map_err(csv_err)?;
    for e in &report.entries {
        let err = e.error.map(|x| format!("{x:e}")).unwrap_or_default();
        w.write_record([e.n.to_string(), err, e.skipped.to_string()]).map_err(csv_err)?;
    }
    into_string(w)
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidInput(format!("csv: {e}"))
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Clone, Debug)]
pub struct Zero {
    pub value: BigComplex,
    pub multiplicity: usize,
}

/// Roots of `P_I`, with roots closer than `2^{-prec/4}` merged.
pub fn export_zeros<C: Coeff>(sol: &HPSolution<C>, i: &[usize], prec: usize) -> Result<Vec<Zero>> {
    let p = poly_of(sol, i)?;
    let scale = p.iter().map(|c| c.magnitude()).fold(0.0, f64::max);
    let deg = match p.iter().rposition(|c| !c.is_negligible(scale)) {
        Some(d) => d,
        None => return Err(Error::InvalidInput(format!("P_{i:?} vanishes identically"))),
    };
    let coeffs: Vec<BigComplex> = p[..=deg].iter().map(|c| c.to_big(prec)).collect();
    let mut roots = aberth(&coeffs, prec).roots;
    canonical_sort(&mut roots, pow2_neg(prec / 2));
    let tol = pow2_neg(prec / 4);
    let mut used = vec![false; roots.len()];
    let mut out = Vec::new();
    for a in 0..roots.len() {
        if used[a] {
            continue;
        }
        let mut members = vec![a];
        used[a] = true;
        // grow the cluster transitively
        let mut q = 0;
        while q < members.len() {
            let r = members[q];
            for b in 0..roots.len() {
                if !used[b] && roots[r].dist_f64(&roots[b]) < tol {
                    used[b] = true;
                    members.push(b);
                }
            }
            q += 1;
        }
        let sum = members.iter().fold(BigComplex::zero(prec), |acc, &r| &acc + &roots[r]);
        let inv = BigComplex::from_f64(1.0 / members.len() as f64, 0.0, prec);
        out.push(Zero {
            value: &sum * &inv,
            multiplicity: members.len(),
        });
    }
    Ok(out)
}

/// `re,im,multiplicity` rows.
pub fn zeros_csv(zeros: &[Zero]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["re", "im", "multiplicity"]).map_err(csv_err)?;
    for z in zeros {
        let (re, im) = z.value.to_f64_pair();
        w.write_record([format!("{re:e}"), format!("{im:e}"), z.multiplicity.to_string()])
            .map_err(csv_err)?;
    }
    into_string(w)
}

const SVG_SIZE: f64 = 480.0;

/// Scatter plot on the square `[-h, h]^2`: zeros as dots, critical values as
/// crosses. `h` is the larger of 2 and 1.1 times the largest modulus shown.
pub fn zeros_svg(zeros: &[Zero], critical: &[C64]) -> String {
    let pts: Vec<C64> = zeros.iter().map(|z| to_c64(&z.value)).collect();
    let h = pts
        .iter()
        .chain(critical)
        .map(|p| 1.1 * p.re.abs().max(p.im.abs()))
        .fold(2.0, f64::max);
    let map = |p: C64| ((p.re + h) / (2.0 * h) * SVG_SIZE, (h - p.im) / (2.0 * h) * SVG_SIZE);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_SIZE}\" height=\"{SVG_SIZE}\" viewBox=\"0 0 {SVG_SIZE} {SVG_SIZE}\">\n"
    );
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let (ox, oy) = map(C64::new(0.0, 0.0));
    s.push_str(&format!(
        "<line x1=\"0\" y1=\"{oy:.2}\" x2=\"{SVG_SIZE}\" y2=\"{oy:.2}\" stroke=\"#ccc\"/>\n<line x1=\"{ox:.2}\" y1=\"0\" x2=\"{ox:.2}\" y2=\"{SVG_SIZE}\" stroke=\"#ccc\"/>\n"
    ));
    for (p, z) in pts.iter().zip(zeros) {
        let (x, y) = map(*p);
        let r = 2.0 + z.multiplicity as f64;
        s.push_str(&format!("<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{r}\" fill=\"#1f4e9c\"/>\n"));
    }
    for c in critical {
        let (x, y) = map(*c);
        s.push_str(&format!(
            "<path d=\"M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}\" stroke=\"#c0392b\" stroke-width=\"1.5\"/>\n",
            x - 5.0,
            y - 5.0,
            x + 5.0,
            y + 5.0,
            x - 5.0,
            y + 5.0,
            x + 5.0,
            y - 5.0
        ));
    }
    s.push_str("</svg>\n");
    s
}
