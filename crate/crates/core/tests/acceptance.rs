//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`). A failing criterion is
//! reported but only turns into a nonzero exit status when
//! `HPM_ACCEPTANCE_STRICT=1` is set.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use hpm_core::bigc::BigComplex;
use hpm_core::curve::CurveJson;
use hpm_core::expr::Expr;
use hpm_core::germ::germ_of_expression;
use hpm_core::hp::{binomial, solve_for, verify_homogeneous_conditions, verify_order_conditions, GermTuple, HPSolution};
use hpm_core::lab::{from_c64, CurveLab};
use hpm_core::monodromy::{
    branching_profile, compose, connected_components, identity, ksubset_action, monodromy_generators, simple_branching_check,
    MonodromyGenerators, MonodromyOptions,
};
use hpm_core::recon::{export_zeros, infer_limit_and_rate, minor_ratio_candidates, ratio_at, ratio_eval, subset_sum_oracle};
use hpm_core::{AlgebraicCurve, Coeff, GaussianRational as Q, GermSpec};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PREC: usize = 256;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixture(name: &str) -> (AlgebraicCurve, Option<GermSpec>) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    let json: CurveJson = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    json.into_curve().unwrap()
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn orbit_sizes(g: &MonodromyGenerators, k: usize) -> Vec<usize> {
    connected_components(&ksubset_action(&g.all_permutations(), g.m, k)).iter().map(|o| o.size).collect()
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

fn power_germs(curve: &AlgebraicCurve, spec: &GermSpec, order: i64) -> GermTuple<Q> {
    let f = germ_of_expression::<Q>(curve, spec, &Expr::parse("1/w").unwrap(), order, ()).unwrap();
    GermTuple::power_tuple(&f, curve.m()).unwrap()
}

// ---------------------------------------------------------------- 1

fn criterion_1() -> Outcome {
    let opts = MonodromyOptions::default();
    let mut notes = Vec::new();

    let (c, _) = fixture("sum_of_roots.json");
    let g = monodromy_generators(&c, opts).map_err(|e| e.to_string())?;
    let s = orbit_sizes(&g, 2);
    check(s == vec![2, 2, 2], || format!("sum of square roots: orbits {s:?}"))?;
    notes.push(format!("(a) {s:?}"));

    let (c, _) = fixture("fourth_root.json");
    let g = monodromy_generators(&c, opts).map_err(|e| e.to_string())?;
    let s = sorted(orbit_sizes(&g, 2));
    check(s == vec![2, 4], || format!("fourth root: orbits {s:?}"))?;
    notes.push(format!("(b) {s:?}"));

    let (c, _) = fixture("rational.json");
    let g = monodromy_generators(&c, opts).map_err(|e| e.to_string())?;
    let s = orbit_sizes(&g, 2);
    check(s == vec![6], || format!("rational example: orbits {s:?}"))?;
    let (simple, witness) = simple_branching_check(&branching_profile(&g));
    check(simple, || format!("rational example: not simple ({witness:?})"))?;
    let expected = [(0, 0, 1), (3, 6, 5), (3, 6, 1), (-3, 6, 5), (-3, 6, 1)];
    let lab = CurveLab::new(&c, PREC);
    let found = &lab.critical_values().finite;
    check(found.len() == expected.len(), || format!("rational example: {} critical values", found.len()))?;
    for &(re, im, d) in &expected {
        let e = BigComplex::from_gaussian(&Q::from_parts((re, d), (im, d)), PREC);
        let best = found.iter().map(|f| f.dist_f64(&e)).fold(f64::INFINITY, f64::min);
        check(best < 1e-20, || format!("critical value ({re}+{im}i)/{d} missed by {best:e}"))?;
    }
    notes.push(format!("(c) {s:?} simple, 5 critical values"));

    let (c, _) = fixture("cyclic.json");
    let g = monodromy_generators(&c, opts).map_err(|e| e.to_string())?;
    let s = orbit_sizes(&g, 2);
    check(s.len() > 1, || format!("cyclic cover: orbits {s:?}"))?;
    notes.push(format!("(d) {s:?}"));
    Ok(notes.join("; "))
}

// ---------------------------------------------------------------- 2

fn criterion_2() -> Outcome {
    let cases: [(&str, usize, std::ops::RangeInclusive<usize>); 4] =
        [("sqrt.json", 1, 1..=6), ("cube.json", 1, 1..=6), ("cube.json", 2, 1..=6), ("quartic.json", 2, 1..=3)];
    let threshold = 2f64.powi(-128);
    let mut worst = 0f64;
    let mut count = 0;
    for (name, k, ns) in cases {
        let (c, spec) = fixture(name);
        let spec = spec.unwrap();
        let m = c.m();
        let germs = power_germs(&c, &spec, ((m + 1) * ns.end() + 2) as i64);
        let numeric = germs.to_numeric(PREC);
        for n in ns {
            let ex = solve_for(&germs, n, k).map_err(|e| format!("{name} k={k} n={n}: {e}"))?;
            check(verify_order_conditions(&ex, &germs).all_exact_zero, || format!("{name} k={k} n={n}: exact order residual"))?;
            check(verify_homogeneous_conditions(&ex, &germs).all_exact_zero, || {
                format!("{name} k={k} n={n}: exact homogeneous residual")
            })?;
            check(ex.nullspace_dim >= binomial(m, k - 1), || format!("{name} k={k} n={n}: nullspace {}", ex.nullspace_dim))?;
            let nu = solve_for(&numeric, n, k).map_err(|e| format!("{name} k={k} n={n} numeric: {e}"))?;
            let r1 = verify_order_conditions(&nu, &numeric).max_relative;
            let r2 = verify_homogeneous_conditions(&nu, &numeric).max_relative;
            worst = worst.max(r1).max(r2);
            check(r1 < threshold && r2 < threshold, || format!("{name} k={k} n={n}: numeric residual {r1:e} / {r2:e}"))?;
            check(nu.nullspace_dim >= binomial(m, k - 1), || format!("{name} k={k} n={n}: numeric nullspace {}", nu.nullspace_dim))?;
            count += 1;
        }
    }
    Ok(format!("{count} systems, exact residuals zero, worst numeric relative residual {worst:.2e}"))
}

// ---------------------------------------------------------------- 3

/// Coefficients of `1/sqrt(z^2 - 1) = sum_j c_j t^j`, `t = 1/z`, from the
/// binomial series `t (1 - t^2)^{-1/2}`.
fn arcsine_moments(upto: usize) -> Vec<Q> {
    let mut c = vec![Q::zero(); upto + 1];
    let mut term = Q::one(); // C(2i, i) / 4^i
    let mut i = 0;
    while 2 * i < upto {
        c[2 * i + 1] = term.clone();
        term = &term * &Q::from_ratio((2 * i + 1) as i64, (2 * i + 2) as i64);
        i += 1;
    }
    c
}

/// Denominator and numerator of the `[n/n]` Pade approximant at infinity,
/// from the Hankel system of the moments with a monic denominator.
fn hankel_pade(c: &[Q], n: usize) -> (Vec<Q>, Vec<Q>) {
    // sum_d q_d c_{d+r} = 0 for r = 1..n, q_n = 1
    let mut a: Vec<Vec<Q>> = (1..=n)
        .map(|r| {
            let mut row: Vec<Q> = (0..n).map(|d| c[d + r].clone()).collect();
            row.push(-&c[n + r]);
            row
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero()).expect("Hankel matrix of a positive measure");
        a.swap(col, p);
        let inv = a[col][col].inv().unwrap();
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot) {
                    *x = &*x - &(&f * y);
                }
            }
        }
    }
    let mut q: Vec<Q> = a.iter().map(|row| row[n].clone()).collect();
    q.push(Q::one());
    let p = (0..=n)
        .map(|e| (e..=n).fold(Q::zero(), |acc, d| &acc + &(&q[d] * &c[d - e])))
        .collect();
    (q, p)
}

fn relative_to_scalar(got: &[BigComplex], want: &[Q]) -> f64 {
    let lead = want.len() - 1;
    let lambda = got[lead].inv().expect("nonzero leading coefficient");
    let scale = want.iter().map(|w| w.abs_f64()).fold(0.0, f64::max);
    got.iter()
        .zip(want)
        .map(|(g, w)| {
            let g = g.mul(&lambda);
            g.dist_f64(&BigComplex::from_gaussian(w, PREC)) / scale
        })
        .fold(0.0, f64::max)
}

/// Least squares of `ln e` on `n` over the longest strictly decreasing run
/// ending at the last point.
fn geometric_fit(points: &[(usize, f64)]) -> Option<(f64, f64, usize)> {
    let mut start = points.len() - 1;
    while start > 0 && points[start - 1].1 > points[start].1 && points[start - 1].1 > 0.0 {
        start -= 1;
    }
    let tail = &points[start..];
    if tail.len() < 4 {
        return None;
    }
    let xs: Vec<f64> = tail.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = tail.iter().map(|p| p.1.ln()).collect();
    let len = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / len, ys.iter().sum::<f64>() / len);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    Some((slope.exp(), sxy * sxy / (sxx * syy), tail.len()))
}

fn sqrt_solutions(ns: std::ops::RangeInclusive<usize>) -> Result<(AlgebraicCurve, Vec<HPSolution<Q>>), String> {
    let (c, spec) = fixture("sqrt.json");
    let germs = power_germs(&c, &spec.unwrap(), 2 * *ns.end() as i64 + 2);
    let sols = ns.map(|n| solve_for(&germs, n, 1).map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
    Ok((c, sols))
}

fn criterion_3() -> Outcome {
    let (c, spec) = fixture("sqrt.json");
    let germs = power_germs(&c, spec.as_ref().unwrap(), 42);
    let numeric = germs.to_numeric(PREC);
    let moments = arcsine_moments(42);
    for (e, m) in moments.iter().enumerate() {
        check(germs.germ(1).coeff(e as i64).as_ref() == Some(m), || format!("germ coefficient t^{e} differs from the binomial series"))?;
    }
    let z = BigComplex::from_i64(2, PREC);
    let target = BigComplex::from_i64(3, PREC).sqrt().inv().unwrap();
    let mut errors = Vec::new();
    let mut oracle_worst = 0f64;
    for n in 1..=20 {
        let ex = solve_for(&germs, n, 1).map_err(|e| e.to_string())?;
        let nu = solve_for(&numeric, n, 1).map_err(|e| e.to_string())?;
        let (q, p) = hankel_pade(&moments, n);
        let den: Vec<BigComplex> = nu.poly(&[0]).unwrap().to_vec();
        let num: Vec<BigComplex> = nu.poly(&[1]).unwrap().to_vec();
        // one scalar for the whole pair
        let lambda = den[n].inv().unwrap();
        let num_scaled: Vec<BigComplex> = num.iter().map(|x| x.mul(&lambda)).collect();
        let e1 = relative_to_scalar(&den, &q);
        let e2 = num_scaled
            .iter()
            .zip(&p)
            .map(|(g, w)| g.dist_f64(&BigComplex::from_gaussian(w, PREC)))
            .fold(0.0, f64::max)
            / p.iter().map(|w| w.abs_f64()).fold(1e-300, f64::max);
        let exact_match = {
            let d = ex.poly(&[0]).unwrap();
            let lam = d[n].inv().unwrap();
            d.iter().zip(&q).all(|(a, b)| &(a * &lam) == b)
                && ex.poly(&[1]).unwrap().iter().zip(&p).all(|(a, b)| &(a * &lam) == b)
        };
        check(exact_match, || format!("n={n}: exact solution differs from the Hankel oracle"))?;
        oracle_worst = oracle_worst.max(e1).max(e2);
        check(e1 < 2f64.powi(-100) && e2 < 2f64.powi(-100), || format!("n={n}: numeric vs oracle {e1:e} / {e2:e}"))?;
        let r = ratio_at(&ex, &[1], &[0], &z).map_err(|e| e.to_string())?;
        errors.push((n, r.dist_f64(&target)));
    }
    let e20 = errors.last().unwrap().1;
    check(e20 < 1e-8, || format!("error at n=20 is {e20:e}"))?;
    let (rho, r2, len) = geometric_fit(&errors).ok_or("no monotone tail of length 4")?;
    check(rho <= 0.2 && r2 >= 0.98, || format!("rate {rho:.4}, R^2 {r2:.4}"))?;
    Ok(format!("error(20) = {e20:.2e}, rho = {rho:.4}, R^2 = {r2:.5} over {len} points, oracle agreement {oracle_worst:.1e}"))
}

// ---------------------------------------------------------------- 4

fn distance_to_segment(z: &BigComplex) -> f64 {
    let (x, y) = z.to_f64_pair();
    let dx = (x.abs() - 1.0).max(0.0);
    (dx * dx + y * y).sqrt()
}

fn criterion_4() -> Outcome {
    let (_, sols) = sqrt_solutions(10..=25)?;
    let mut notes = Vec::new();
    for sol in &sols {
        if ![10, 15, 20, 25].contains(&sol.n) {
            continue;
        }
        let zeros = export_zeros(sol, &[0], PREC).map_err(|e| e.to_string())?;
        let total: usize = zeros.iter().map(|z| z.multiplicity).sum();
        check(total == sol.n, || format!("n={}: {} zeros found", sol.n, total))?;
        let far = zeros.iter().filter(|z| distance_to_segment(&z.value) > 0.1).count();
        let worst = zeros.iter().map(|z| distance_to_segment(&z.value)).fold(0.0, f64::max);
        check(far == 0, || format!("n={}: {far} zeros outside the 0.1-neighbourhood", sol.n))?;
        if sol.n == 20 {
            check(worst <= 0.02, || format!("n=20: zero at distance {worst:e}"))?;
        }
        notes.push(format!("n={}: max dist {worst:.1e}", sol.n));
    }
    Ok(notes.join(", "))
}

// ---------------------------------------------------------------- 5

fn criterion_5() -> Outcome {
    let (c, spec) = fixture("cube.json");
    let spec = spec.unwrap();
    let lab = CurveLab::new(&c, PREC);
    let germs = power_germs(&c, &spec, 3 * 15 + 2);
    let f = Expr::parse("1/w").unwrap();
    let k1: Vec<_> = (2..=15).map(|n| solve_for(&germs, n, 1)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let k2: Vec<_> = (2..=15).map(|n| solve_for(&germs, n, 2)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let points = [C64::new(2.0, 0.0), C64::new(2.0, 1.0), C64::new(-3.0, 0.0)];
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for p in points {
        let z = from_c64(p, PREC);
        let germ_value = lab.germ_branch_at(&spec, &z).map_err(|e| e.to_string())?.inv().unwrap();

        let t1 = subset_sum_oracle(&lab, &f, &spec, 1, &z).map_err(|e| e.to_string())?;
        let r1 = infer_limit_and_rate(&k1, &[1], &[0], &t1, true).map_err(|e| e.to_string())?;
        let v15 = ratio_at(k1.last().unwrap(), &[1], &[0], &z).map_err(|e| e.to_string())?;
        let e1 = v15.dist_f64(&germ_value);
        if r1.matched_subset != vec![t1.germ_branch] || e1 >= 1e-8 {
            failures.push(format!("k=1 at {p}: matched {:?}, |ratio - germ| = {e1:.1e}", r1.matched_subset));
        }

        let t2 = subset_sum_oracle(&lab, &f, &spec, 2, &z).map_err(|e| e.to_string())?;
        match infer_limit_and_rate(&k2, &[0, 2], &[0, 1], &t2, true) {
            Ok(r2) => {
                let rate_ok = r2.rate.as_ref().is_some_and(|r| r.rho < 1.0);
                if !r2.germ_in_subset || r2.final_error >= 1e-6 || !rate_ok {
                    failures.push(format!(
                        "k=2 at {p}: matched {:?}, error(15) = {:.1e}, rho = {}",
                        r2.matched_subset,
                        r2.final_error,
                        r2.rate.as_ref().map_or("none".to_string(), |r| format!("{:.3}", r.rho))
                    ));
                }
            }
            Err(e) => failures.push(format!("k=2 at {p}: {e}")),
        }
        notes.push(format!("k=1 at {p}: {e1:.1e}"));
    }
    if failures.is_empty() {
        Ok(notes.join(", "))
    } else {
        Err(failures.join("; "))
    }
}

// ---------------------------------------------------------------- 6

fn criterion_6() -> Outcome {
    let (c, spec) = fixture("cube.json");
    let spec = spec.unwrap();
    let lab = CurveLab::new(&c, PREC);
    let fs = [Expr::parse("1/w").unwrap(), Expr::parse("1/w^2").unwrap()];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0f64;
    for _ in 0..10 {
        let z = C64::from_polar(rng.gen_range(2.0..5.0), rng.gen_range(0.0..std::f64::consts::TAU));
        let zb = from_c64(z, PREC);
        let a = minor_ratio_candidates(&lab, &fs, &spec, &[0, 2], &[0, 1], &zb).map_err(|e| e.to_string())?;
        let b = subset_sum_oracle(&lab, &fs[0], &spec, 2, &zb).map_err(|e| e.to_string())?;
        check(a.candidates.len() == 3 && b.candidates.len() == 3, || format!("{z}: candidate count"))?;
        for (x, y) in a.candidates.iter().zip(&b.candidates) {
            check(x.subset == y.subset, || format!("{z}: subset order differs"))?;
            let (x, y) = (x.value.as_ref().ok_or("missing")?, y.value.as_ref().ok_or("missing")?);
            let rel = x.dist_f64(y) / y.abs_f64();
            worst = worst.max(rel);
            check(rel < 2f64.powi(-100), || format!("{z}: relative gap {rel:e}"))?;
        }
    }
    Ok(format!("10 points, worst relative gap {worst:.1e}"))
}

// ---------------------------------------------------------------- 7

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut notes = Vec::new();

    // rescaling, exact
    let (c, spec) = fixture("cube.json");
    let germs = power_germs(&c, &spec.unwrap(), 3 * 6 + 2);
    let mut compared = 0;
    for n in 1..=6 {
        for k in 1..=2 {
            let sol = solve_for(&germs, n, k).map_err(|e| e.to_string())?;
            let s = Q::from_parts((rng.gen_range(1..9), rng.gen_range(1..5)), (rng.gen_range(-9..9), rng.gen_range(1..5)));
            let scaled = sol.scaled(&s);
            let (j, i): (Vec<usize>, Vec<usize>) = ((0..k - 1).chain([k]).collect(), (0..k).collect());
            for z in [Q::from_integer(2), Q::from_parts((2, 1), (1, 1)), Q::from_integer(-3)] {
                if let (Ok(a), Ok(b)) = (ratio_eval(&sol, &j, &i, &z), ratio_eval(&scaled, &j, &i, &z)) {
                    check(a == b, || format!("rescaling changed the ratio at n={n}, k={k}"))?;
                    compared += 1;
                }
            }
        }
    }
    notes.push(format!("{compared} exact ratios invariant"));

    // base point doubling and the product relation
    let names = ["sqrt.json", "cube.json", "quartic.json", "sum_of_roots.json", "fourth_root.json", "rational.json", "cyclic.json", "quintic.json"];
    for name in names {
        let (c, _) = fixture(name);
        let a = monodromy_generators(&c, MonodromyOptions::default()).map_err(|e| format!("{name}: {e}"))?;
        let b = monodromy_generators(&c, MonodromyOptions { base_factor: 4.0, ..Default::default() })
            .map_err(|e| format!("{name}: {e}"))?;
        for k in 1..=c.m() {
            check(sorted(orbit_sizes(&a, k)) == sorted(orbit_sizes(&b, k)), || format!("{name}: orbits at k={k} move with the base point"))?;
        }
        for g in [&a, &b] {
            check(compose(&g.infinity, &g.finite_product()) == identity(c.m() + 1), || format!("{name}: product relation"))?;
        }
    }
    notes.push(format!("{} curves: orbits stable, products trivial", names.len()));

    // round trips
    let mut worst = 0f64;
    for name in ["sqrt.json", "cube.json", "quartic.json", "rational.json"] {
        let (c, _) = fixture(name);
        let lab = CurveLab::new(&c, PREC);
        let outer = lab.max_critical_modulus() + lab.clearance_with(&[]) + 0.1;
        for _ in 0..3 {
            let pa = C64::from_polar(outer * rng.gen_range(1.0..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
            let pb = C64::from_polar(outer * rng.gen_range(1.0..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
            let (za, zb) = (from_c64(pa, PREC), from_c64(pb, PREC));
            let path = lab.detour_path(&za, &zb, lab.clearance_with(&[pa, pb]));
            let start = lab.fiber_roots(&za).map_err(|e| e.to_string())?.roots;
            let there = lab.track(&path, &start).map_err(|e| e.to_string())?;
            let back = lab.track(&path.reversed(), &there).map_err(|e| e.to_string())?;
            for (x, y) in back.iter().zip(&start) {
                let d = x.dist_f64(y) / y.abs_f64().max(1.0);
                worst = worst.max(d);
                check(d < 2f64.powi(-100), || format!("{name}: round trip off by {d:e}"))?;
            }
        }
    }
    notes.push(format!("round trips within {worst:.1e}"));
    Ok(notes.join("; "))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("monodromy fixtures", criterion_1),
        ("order conditions", criterion_2),
        ("Pade degeneration", criterion_3),
        ("zero localisation", criterion_4),
        ("branch reconstruction", criterion_5),
        ("oracle cross-check", criterion_6),
        ("invariance suite", criterion_7),
    ];
    let mut failed = 0;
    for (idx, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS [{secs:.1}s] {detail}", idx + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL [{secs:.1}s] {why}", idx + 1)
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 && std::env::var("HPM_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
