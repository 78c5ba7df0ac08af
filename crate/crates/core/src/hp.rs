//! k-th polynomials of the Hermite-Pade m-system: assembly of the defining
//! linear system, its solution, and independent checks of the order
//! conditions.

use serde::{Deserialize, Serialize};

use crate::bigc::{negligible, BigComplex};
use crate::coeff::{Coeff, Domain};
use crate::curve::{AlgebraicCurve, GermSpec};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::gauss::GaussianRational as Q;
use crate::germ::germ_of_expression;
use crate::linalg::{exact_null_vector, numeric_null_vector, NullVector, SparseMatrix};
use crate::series::TruncatedSeries;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All `k`-element subsets of `{0, .., n-1}` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// The germs `f_1, .., f_m` at infinity; `f_0 = 1` is implicit.
#[derive(Clone, Debug)]
pub struct GermTuple<C: Coeff> {
    germs: Vec<TruncatedSeries<C>>,
}

impl<C: Coeff> GermTuple<C> {
    pub fn new(germs: Vec<TruncatedSeries<C>>) -> Result<Self> {
        if germs.is_empty() {
            return Err(Error::invalid("a germ tuple needs m >= 1 germs"));
        }
        let ctx = germs[0].ctx();
        for (j, g) in germs.iter().enumerate() {
            if g.ctx() != ctx {
                return Err(Error::invalid("germs must share one coefficient domain"));
            }
            if !g.is_zero() && g.valuation() < 0 {
                return Err(Error::invalid(format!("germ f_{} has a pole at infinity", j + 1)));
            }
        }
        Ok(Self { germs })
    }

    /// `f, f^2, .., f^m`.
    pub fn power_tuple(f: &TruncatedSeries<C>, m: usize) -> Result<Self> {
        Self::new((1..=m as u32).map(|j| f.pow(j)).collect())
    }

    /// Germs of rational expressions along an anchored branch.
    pub fn from_expressions(
        curve: &AlgebraicCurve,
        spec: &GermSpec,
        exprs: &[Expr],
        order: i64,
        ctx: C::Ctx,
    ) -> Result<Self> {
        let germs = exprs
            .iter()
            .map(|e| germ_of_expression::<C>(curve, spec, e, order, ctx))
            .collect::<Result<Vec<_>>>()?;
        Self::new(germs)
    }

    pub fn m(&self) -> usize {
        self.germs.len()
    }

    pub fn ctx(&self) -> C::Ctx {
        self.germs[0].ctx()
    }

    /// Common truncation order.
    pub fn order(&self) -> i64 {
        self.germs.iter().map(|g| g.order()).min().unwrap_or(-1)
    }

    /// `f_j` for `j` in `0..=m`.
    pub fn germ(&self, j: usize) -> TruncatedSeries<C> {
        if j == 0 {
            TruncatedSeries::one(self.order(), self.ctx())
        } else {
            self.germs[j - 1].clone()
        }
    }

    pub fn germs(&self) -> &[TruncatedSeries<C>] {
        &self.germs
    }

    pub fn to_numeric(&self, prec: usize) -> GermTuple<BigComplex> {
        GermTuple {
            germs: self.germs.iter().map(|g| g.map(prec, |c| c.to_big(prec))).collect(),
        }
    }
}

/// The assembled homogeneous system.
#[derive(Clone, Debug)]
pub struct HpSystem<C: Coeff> {
    pub m: usize,
    pub k: usize,
    pub n: usize,
    /// Degree bound `(m+1-k) n`.
    pub degree: usize,
    /// Unknown blocks, one per `k`-subset of `{0..m}`.
    pub subsets: Vec<Vec<usize>>,
    /// Equation blocks, one per `k`-subset of `{1..m}`.
    pub blocks: Vec<Vec<usize>>,
    pub matrix: SparseMatrix<C>,
    pub ctx: C::Ctx,
}

impl<C: Coeff> HpSystem<C> {
    pub fn column(&self, subset_index: usize, d: usize) -> usize {
        subset_index * (self.degree + 1) + d
    }
}

fn subset_index(subsets: &[Vec<usize>], s: &[usize]) -> usize {
    subsets
        .binary_search_by(|x| x.as_slice().cmp(s))
        .expect("subset enumerated")
}

/// Builds the system whose nullspace holds the k-th polynomials of degree
/// at most `(m+1-k) n`.
pub fn assemble_system<C: Coeff>(germs: &GermTuple<C>, n: usize, k: usize) -> Result<HpSystem<C>> {
    let m = germs.m();
    if k == 0 || k > m {
        return Err(Error::invalid(format!("k must lie in [1, {m}], got {k}")));
    }
    let need = ((m + 1) * n) as i64;
    if germs.order() < need {
        return Err(Error::TruncationTooShort {
            have: germs.order(),
            need,
        });
    }
    let ctx = germs.ctx();
    let degree = (m + 1 - k) * n;
    let subsets = k_subsets(m + 1, k);
    let blocks: Vec<Vec<usize>> = k_subsets(m, k)
        .into_iter()
        .map(|s| s.into_iter().map(|j| j + 1).collect())
        .collect();
    let rows_per_block = (m + 1) * n + 1;
    let rows = rows_per_block * blocks.len();
    let cols = (degree + 1) * subsets.len();
    assert_eq!(rows, (n * (m + 1) + 1) * binomial(m, k));
    assert_eq!(cols, (n * (m + 1 - k) + 1) * binomial(m + 1, k));
    let mut matrix = SparseMatrix::new(rows, cols);
    let d = degree as i64;
    for (bi, j) in blocks.iter().enumerate() {
        let own = subset_index(&subsets, j);
        let partners: Vec<(usize, usize, bool)> = (0..k)
            .map(|s| {
                let mut i: Vec<usize> = vec![0];
                i.extend(j.iter().enumerate().filter(|&(t, _)| t != s).map(|(_, &x)| x));
                // sign (-1)^{s+1} for the 0-based position s
                (subset_index(&subsets, &i), j[s], s % 2 == 0)
            })
            .collect();
        for r in -d..=(k * n) as i64 {
            let row = bi * rows_per_block + (r + d) as usize;
            if r <= 0 {
                matrix.push(row, own * (degree + 1) + (-r) as usize, C::one(ctx));
            }
            for &(idx, fj, negative) in &partners {
                let f = &germs.germs[fj - 1];
                for deg in 0..=degree {
                    let e = r + deg as i64;
                    if e < 0 {
                        continue;
                    }
                    let c = f.coeff(e).expect("order checked");
                    if c.is_zero() {
                        continue;
                    }
                    let v = if negative { c.neg() } else { c };
                    matrix.push(row, idx * (degree + 1) + deg, v);
                }
            }
        }
    }
    Ok(HpSystem {
        m,
        k,
        n,
        degree,
        subsets,
        blocks,
        matrix,
        ctx,
    })
}

/// Coefficient types with a nullspace solver.
pub trait Solvable: Coeff {
    fn null_vector(a: &SparseMatrix<Self>, ctx: Self::Ctx) -> Result<NullVector<Self>>;
}

impl Solvable for Q {
    fn null_vector(a: &SparseMatrix<Q>, _: ()) -> Result<NullVector<Q>> {
        exact_null_vector(a)
    }
}

impl Solvable for BigComplex {
    fn null_vector(a: &SparseMatrix<BigComplex>, prec: usize) -> Result<NullVector<BigComplex>> {
        numeric_null_vector(a, prec)
    }
}

#[derive(Clone, Debug)]
pub struct HPSolution<C: Coeff> {
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub subsets: Vec<Vec<usize>>,
    /// Ascending coefficients in `z`, length `(m+1-k) n + 1`, one per subset.
    pub polys: Vec<Vec<C>>,
    pub backend: Domain,
    pub nullspace_dim: usize,
    pub max_residual: f64,
    pub threads: usize,
    pub ctx: C::Ctx,
}

impl<C: Coeff> HPSolution<C> {
    pub fn degree_bound(&self) -> usize {
        (self.m + 1 - self.k) * self.n
    }

    /// Lower bound on the nullspace dimension from counting.
    pub fn expected_nullspace_dim(&self) -> usize {
        binomial(self.m, self.k - 1)
    }

    pub fn excess_nullspace(&self) -> bool {
        self.nullspace_dim > self.expected_nullspace_dim()
    }

    pub fn poly(&self, subset: &[usize]) -> Option<&[C]> {
        self.subsets
            .binary_search_by(|x| x.as_slice().cmp(subset))
            .ok()
            .map(|i| self.polys[i].as_slice())
    }

    /// Every polynomial multiplied by `c`.
    pub fn scaled(&self, c: &C) -> Self {
        let mut out = self.clone();
        for p in out.polys.iter_mut() {
            for v in p.iter_mut() {
                *v = v.mul(c);
            }
        }
        out
    }

    pub fn to_numeric(&self, prec: usize) -> HPSolution<BigComplex> {
        HPSolution {
            m: self.m,
            k: self.k,
            n: self.n,
            subsets: self.subsets.clone(),
            polys: self
                .polys
                .iter()
                .map(|p| p.iter().map(|c| c.to_big(prec)).collect())
                .collect(),
            backend: self.backend,
            nullspace_dim: self.nullspace_dim,
            max_residual: self.max_residual,
            threads: self.threads,
            ctx: prec,
        }
    }

    pub fn to_json(&self) -> HPSolutionJson {
        HPSolutionJson {
            n: self.n,
            k: self.k,
            m: self.m,
            backend: self.backend.tag().to_string(),
            prec_bits: self.backend.prec_bits(),
            nullspace_dim: self.nullspace_dim,
            expected_nullspace_dim: self.expected_nullspace_dim(),
            excess_nullspace: self.excess_nullspace(),
            max_residual: self.max_residual,
            threads: self.threads,
            polynomials: self
                .subsets
                .iter()
                .zip(&self.polys)
                .map(|(s, p)| PolyJson {
                    subset: s.clone(),
                    coeffs: p.iter().map(|c| c.to_json_string()).collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &HPSolutionJson, ctx: C::Ctx) -> Result<Self> {
        if j.k == 0 || j.k > j.m {
            return Err(Error::invalid("solution has k outside [1, m]"));
        }
        let subsets = k_subsets(j.m + 1, j.k);
        if j.polynomials.len() != subsets.len() {
            return Err(Error::invalid("solution has the wrong number of polynomials"));
        }
        let mut polys = Vec::with_capacity(subsets.len());
        for (s, p) in subsets.iter().zip(&j.polynomials) {
            if &p.subset != s {
                return Err(Error::invalid("solution polynomials must be in lexicographic subset order"));
            }
            polys.push(
                p.coeffs
                    .iter()
                    .map(|c| C::from_json_string(c, ctx))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        Ok(Self {
            m: j.m,
            k: j.k,
            n: j.n,
            subsets,
            polys,
            backend: C::domain(ctx),
            nullspace_dim: j.nullspace_dim,
            max_residual: j.max_residual,
            threads: j.threads,
            ctx,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PolyJson {
    pub subset: Vec<usize>,
    pub coeffs: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HPSolutionJson {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub backend: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub prec_bits: Option<usize>,
    pub nullspace_dim: usize,
    pub expected_nullspace_dim: usize,
    pub excess_nullspace: bool,
    pub max_residual: f64,
    pub threads: usize,
    pub polynomials: Vec<PolyJson>,
}

/// Solves the system and attaches the order-condition residual.
pub fn solve_hp<C: Solvable>(sys: &HpSystem<C>, germs: &GermTuple<C>) -> Result<HPSolution<C>> {
    let nv = C::null_vector(&sys.matrix, sys.ctx)?;
    let width = sys.degree + 1;
    let polys: Vec<Vec<C>> = nv.vector.chunks(width).map(|c| c.to_vec()).collect();
    let mut sol = HPSolution {
        m: sys.m,
        k: sys.k,
        n: sys.n,
        subsets: sys.subsets.clone(),
        polys,
        backend: C::domain(sys.ctx),
        nullspace_dim: nv.nullity,
        max_residual: 0.0,
        threads: 1,
        ctx: sys.ctx,
    };
    sol.max_residual = verify_order_conditions(&sol, germs).max_abs;
    Ok(sol)
}

/// Assemble and solve in one call.
pub fn solve_for<C: Solvable>(germs: &GermTuple<C>, n: usize, k: usize) -> Result<HPSolution<C>> {
    let sys = assemble_system(germs, n, k)?;
    solve_hp(&sys, germs)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConditionResidual {
    /// The index set of the condition.
    pub indices: Vec<usize>,
    pub max_abs: f64,
    /// Magnitude bound of the terms entering the combination.
    pub scale: f64,
    pub exact_zero: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ResidualReport {
    pub conditions: Vec<ConditionResidual>,
    pub max_abs: f64,
    /// Largest `max_abs / scale`.
    pub max_relative: f64,
    pub all_exact_zero: bool,
}

impl ResidualReport {
    /// Exact mode: all zero. Numeric: relative residuals below `2^{-prec/2}`.
    pub fn passes(&self, domain: Domain) -> bool {
        match domain {
            Domain::Exact => self.all_exact_zero,
            Domain::Numeric { prec_bits } => self.max_relative < negligible(prec_bits),
        }
    }
}

/// `sum_s sign_s P_{I_s} f_{i_s}` checked on `t^{-D} .. t^{kn}`, computed
/// with series arithmetic rather than the assembled matrix.
fn combination_residual<C: Coeff>(
    sol: &HPSolution<C>,
    germs: &GermTuple<C>,
    indices: &[usize],
    terms: &[(Vec<usize>, usize, bool)],
) -> ConditionResidual {
    let ctx = sol.ctx;
    let top = (sol.k * sol.n) as i64;
    let d = sol.degree_bound() as i64;
    let mut acc = TruncatedSeries::zero(top, ctx);
    let mut scale = 0.0f64;
    for (subset, fj, negative) in terms {
        let p = sol.poly(subset).expect("subset of the solution");
        let ps = TruncatedSeries::from_z_polynomial(p, top, ctx);
        let f = germs.germ(*fj).truncate(top + d);
        let prod = ps.mul(&f);
        let pmag: f64 = p.iter().map(|c| c.magnitude()).sum();
        scale = scale.max(pmag * f.max_magnitude().max(1.0));
        acc = if *negative { acc.sub(&prod) } else { acc.add(&prod) };
    }
    let mut max_abs = 0.0f64;
    let mut exact_zero = true;
    for e in -d..=top {
        let c = acc.coeff(e).expect("within order");
        if !c.is_zero() {
            exact_zero = false;
            max_abs = max_abs.max(c.magnitude());
        }
    }
    ConditionResidual {
        indices: indices.to_vec(),
        max_abs,
        scale: scale.max(f64::MIN_POSITIVE),
        exact_zero,
    }
}

fn summarize(conditions: Vec<ConditionResidual>) -> ResidualReport {
    ResidualReport {
        max_abs: conditions.iter().map(|c| c.max_abs).fold(0.0, f64::max),
        max_relative: conditions.iter().map(|c| c.max_abs / c.scale).fold(0.0, f64::max),
        all_exact_zero: conditions.iter().all(|c| c.exact_zero),
        conditions,
    }
}

/// The defining conditions, one per `k`-subset `J` of `{1..m}`.
pub fn verify_order_conditions<C: Coeff>(sol: &HPSolution<C>, germs: &GermTuple<C>) -> ResidualReport {
    let blocks: Vec<Vec<usize>> = k_subsets(sol.m, sol.k)
        .into_iter()
        .map(|s| s.into_iter().map(|j| j + 1).collect())
        .collect();
    let conds = blocks
        .iter()
        .map(|j| {
            let mut terms = vec![(j.clone(), 0usize, false)];
            for s in 0..sol.k {
                let mut i = vec![0];
                i.extend(j.iter().enumerate().filter(|&(t, _)| t != s).map(|(_, &x)| x));
                terms.push((i, j[s], s % 2 == 0));
            }
            combination_residual(sol, germs, j, &terms)
        })
        .collect();
    summarize(conds)
}

/// The homogeneous conditions over every `(k+1)`-subset of `{0..m}`.
pub fn verify_homogeneous_conditions<C: Coeff>(sol: &HPSolution<C>, germs: &GermTuple<C>) -> ResidualReport {
    let conds = k_subsets(sol.m + 1, sol.k + 1)
        .iter()
        .map(|big| {
            let terms: Vec<(Vec<usize>, usize, bool)> = (0..=sol.k)
                .map(|s| {
                    let rest: Vec<usize> = big.iter().enumerate().filter(|&(t, _)| t != s).map(|(_, &x)| x).collect();
                    (rest, big[s], s % 2 == 1)
                })
                .collect();
            combination_residual(sol, germs, big, &terms)
        })
        .collect();
    summarize(conds)
}

/// `Q_j = (-1)^j P_{{0..m} \ {j}}` for a `k = m` solution.
pub fn type_one_from_top<C: Coeff>(sol: &HPSolution<C>) -> Vec<Vec<C>> {
    assert_eq!(sol.k, sol.m);
    (0..=sol.m)
        .map(|j| {
            let rest: Vec<usize> = (0..=sol.m).filter(|&x| x != j).collect();
            let p = sol.poly(&rest).expect("subset");
            if j % 2 == 1 {
                p.iter().map(|c| c.neg()).collect()
            } else {
                p.to_vec()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt_germs(order: i64) -> GermTuple<Q> {
        let c = AlgebraicCurve::parse("w^2 - (z^2 - 1)").unwrap();
        let spec = GermSpec::pole(1, Q::one());
        GermTuple::from_expressions(&c, &spec, &[Expr::parse("1/w").unwrap()], order, ()).unwrap()
    }

    fn cube_power_germs(order: i64) -> GermTuple<Q> {
        let c = AlgebraicCurve::parse("w^3 - (z^3 - 1)").unwrap();
        let spec = GermSpec::pole(1, Q::one());
        let f = germ_of_expression::<Q>(&c, &spec, &Expr::parse("1/w").unwrap(), order, ()).unwrap();
        GermTuple::power_tuple(&f, 2).unwrap()
    }

    #[test]
    fn subsets_are_lexicographic() {
        assert_eq!(k_subsets(4, 2), vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(k_subsets(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(binomial(5, 2), 10);
    }

    #[test]
    fn system_shapes() {
        let s = assemble_system(&sqrt_germs(10), 1, 1).unwrap();
        assert_eq!((s.matrix.rows, s.matrix.cols), (3, 4));
        let s = assemble_system(&cube_power_germs(10), 2, 1).unwrap();
        assert_eq!((s.matrix.rows, s.matrix.cols), (14, 15));
        let c = AlgebraicCurve::parse("w^4 - z^4 - z - 1").unwrap();
        let f = germ_of_expression::<Q>(&c, &GermSpec::pole(1, Q::one()), &Expr::parse("1/w").unwrap(), 8, ()).unwrap();
        let g = GermTuple::power_tuple(&f, 3).unwrap();
        let s = assemble_system(&g, 1, 2).unwrap();
        assert_eq!((s.matrix.rows, s.matrix.cols), (15, 18));
        assert!(matches!(
            assemble_system(&sqrt_germs(3), 2, 1),
            Err(Error::TruncationTooShort { have: 3, need: 4 })
        ));
    }

    #[test]
    fn hand_solved_pade() {
        let g = sqrt_germs(6);
        let sol = solve_for(&g, 1, 1).unwrap();
        // q0 = z, q1 = 1
        assert_eq!(sol.poly(&[0]).unwrap(), &[Q::zero(), Q::one()]);
        assert_eq!(sol.poly(&[1]).unwrap(), &[Q::one(), Q::zero()]);
        assert_eq!(sol.nullspace_dim, 1);
        let sol = solve_for(&g, 2, 1).unwrap();
        // q0 = z^2 - 1/2, q1 = z, scaled to coprime integers with a positive first entry
        assert_eq!(sol.poly(&[0]).unwrap(), &[Q::one(), Q::zero(), Q::from_integer(-2)]);
        assert_eq!(sol.poly(&[1]).unwrap(), &[Q::zero(), Q::from_integer(-2), Q::zero()]);
    }

    #[test]
    fn homogeneous_conditions_follow() {
        let g = cube_power_germs(20);
        for k in 1..=2 {
            for n in 1..=4 {
                let sol = solve_for(&g, n, k).unwrap();
                assert!(verify_order_conditions(&sol, &g).all_exact_zero);
                assert!(verify_homogeneous_conditions(&sol, &g).all_exact_zero, "k={k} n={n}");
                assert!(sol.nullspace_dim >= binomial(2, k - 1));
            }
        }
    }

    #[test]
    fn top_degeneration_is_type_one() {
        let g = cube_power_germs(20);
        let sol = solve_for(&g, 3, 2).unwrap();
        let q = type_one_from_top(&sol);
        // sum_j Q_j f_j = O(t^{mn+1})
        let top = (2 * 3) as i64;
        let mut acc = TruncatedSeries::<Q>::zero(top, ());
        for (j, qj) in q.iter().enumerate() {
            let p = TruncatedSeries::from_z_polynomial(qj, top, ());
            acc = acc.add(&p.mul(&g.germ(j).truncate(top + 3)));
        }
        for e in -3..=top {
            assert!(acc.coeff(e).unwrap().is_zero(), "t^{e}");
        }
    }

    #[test]
    fn corrupted_solution_is_detected() {
        let g = cube_power_germs(20);
        let sol = solve_for(&g, 3, 1).unwrap().to_numeric(256);
        let gn = g.to_numeric(256);
        assert!(verify_order_conditions(&sol, &gn).max_abs < 1e-60);
        let mut bad = sol.clone();
        bad.polys[1][0] = &bad.polys[1][0] + &BigComplex::from_f64(1e-3, 0.0, 256);
        assert!(verify_order_conditions(&bad, &gn).max_abs > 1e-4);
    }

    #[test]
    fn numeric_solution_projects_onto_exact() {
        let g = cube_power_germs(20);
        let ex = solve_for(&g, 3, 2).unwrap();
        let nu = solve_for(&g.to_numeric(256), 3, 2).unwrap();
        assert_eq!(nu.nullspace_dim, ex.nullspace_dim);
        let rep = verify_order_conditions(&nu, &g.to_numeric(256));
        assert!(rep.passes(nu.backend));
        assert!(rep.max_relative < crate::bigc::pow2_neg(128));
    }

    #[test]
    fn json_round_trip() {
        let g = cube_power_germs(20);
        let sol = solve_for(&g, 2, 2).unwrap();
        let text = serde_json::to_string(&sol.to_json()).unwrap();
        let back = HPSolution::<Q>::from_json(&serde_json::from_str(&text).unwrap(), ()).unwrap();
        assert_eq!(back.polys, sol.polys);
    }
}
