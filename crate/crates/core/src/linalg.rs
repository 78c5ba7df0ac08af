//! Nullspaces of homogeneous systems: fraction-free elimination over the
//! Gaussian integers, and column-pivoted Householder QR in `BigComplex`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::bigc::{bf_from_f64, bf_zero, negligible, BigComplex, RM};
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::gauss::{GaussInt, GaussianRational as Q};

/// Row-major sparse matrix.
#[derive(Clone, Debug)]
pub struct SparseMatrix<C: Coeff> {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<(usize, C)>>,
}

impl<C: Coeff> SparseMatrix<C> {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Vec::new(); rows],
        }
    }

    pub fn push(&mut self, row: usize, col: usize, v: C) {
        debug_assert!(row < self.rows && col < self.cols);
        if !v.is_zero() {
            self.entries[row].push((col, v));
        }
    }

    pub fn nnz(&self) -> usize {
        self.entries.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self, ctx: C::Ctx) -> Vec<Vec<C>> {
        let mut out = vec![vec![C::zero(ctx); self.cols]; self.rows];
        for (r, row) in self.entries.iter().enumerate() {
            for (c, v) in row {
                out[r][*c] = out[r][*c].add(v);
            }
        }
        out
    }

    /// `A x` computed from the sparse entries.
    pub fn apply(&self, x: &[C], ctx: C::Ctx) -> Vec<C> {
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .fold(C::zero(ctx), |acc, (c, v)| acc.add(&v.mul(&x[*c])))
            })
            .collect()
    }
}

/// Result of a nullspace computation.
#[derive(Clone, Debug)]
pub struct NullVector<C> {
    pub vector: Vec<C>,
    pub rank: usize,
    pub nullity: usize,
}

struct Echelon {
    rows: Vec<Vec<GaussInt>>,
    pivots: Vec<usize>,
    cols: usize,
}

fn to_gauss_rows(a: &SparseMatrix<Q>) -> Vec<Vec<GaussInt>> {
    a.to_dense(())
        .into_iter()
        .map(|row| {
            let scale = row.iter().fold(BigInt::one(), |l, c| l.lcm(&c.denom_lcm()));
            row.iter().map(|c| c.scaled_to_int(&scale)).collect()
        })
        .collect()
}

/// Fraction-free (Bareiss) row echelon form; all divisions are exact.
fn bareiss(mut m: Vec<Vec<GaussInt>>, cols: usize) -> Echelon {
    let nrows = m.len();
    let mut prev = GaussInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let piv = m[r][c].clone();
        for i in r + 1..nrows {
            let lead = m[i][c].clone();
            for j in c..cols {
                let v = piv.mul(&m[i][j]).sub(&lead.mul(&m[r][j]));
                m[i][j] = v.div_exact(&prev);
            }
        }
        // Rows above r are untouched; Bareiss only needs the lower part.
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    Echelon { rows: m, pivots, cols }
}

fn back_substitute(e: &Echelon, free_values: &[(usize, Q)]) -> Vec<Q> {
    let mut x = vec![Q::zero(); e.cols];
    for (c, v) in free_values {
        x[*c] = v.clone();
    }
    for (r, &pc) in e.pivots.iter().enumerate().rev() {
        let row = &e.rows[r];
        let mut acc = Q::zero();
        for j in pc + 1..e.cols {
            if !row[j].is_zero() && !x[j].is_zero() {
                acc = &acc + &(&Q::from(row[j].clone()) * &x[j]);
            }
        }
        let piv = Q::from(row[pc].clone());
        x[pc] = -&(&acc / &piv);
    }
    x
}

/// Scales an exact vector to coprime Gaussian integers whose first nonzero
/// entry lies in the sector `re > 0, im >= 0`.
pub fn content_free(x: &[Q]) -> Vec<Q> {
    let scale = x.iter().fold(BigInt::one(), |l, c| l.lcm(&c.denom_lcm()));
    let ints: Vec<GaussInt> = x.iter().map(|c| c.scaled_to_int(&scale)).collect();
    let g = ints.iter().fold(GaussInt::zero(), |g, v| g.gcd(v));
    if g.is_zero() {
        return x.to_vec();
    }
    let first = ints.iter().find(|v| !v.is_zero()).expect("nonzero");
    let q0 = first.div_exact(&g);
    let u = q0.unit_normalizer();
    ints.iter().map(|v| Q::from(v.div_exact(&g).mul(&u))).collect()
}

fn free_columns(e: &Echelon) -> Vec<usize> {
    let mut is_pivot = vec![false; e.cols];
    for &p in &e.pivots {
        is_pivot[p] = true;
    }
    (0..e.cols).filter(|&c| !is_pivot[c]).collect()
}

/// One nullspace vector: free variables zero except the last free column,
/// which is one. Content-free Gaussian integers.
pub fn exact_null_vector(a: &SparseMatrix<Q>) -> Result<NullVector<Q>> {
    let e = bareiss(to_gauss_rows(a), a.cols);
    let free = free_columns(&e);
    let Some(&last) = free.last() else {
        return Err(Error::EmptyNullspace);
    };
    let x = back_substitute(&e, &[(last, Q::one())]);
    Ok(NullVector {
        vector: content_free(&x),
        rank: e.pivots.len(),
        nullity: free.len(),
    })
}

/// A basis of the nullspace, one vector per free column.
pub fn exact_nullspace_basis(a: &SparseMatrix<Q>) -> Vec<Vec<Q>> {
    let e = bareiss(to_gauss_rows(a), a.cols);
    free_columns(&e)
        .into_iter()
        .map(|f| back_substitute(&e, &[(f, Q::one())]))
        .collect()
}

/// Exact rank.
pub fn exact_rank(a: &SparseMatrix<Q>) -> usize {
    bareiss(to_gauss_rows(a), a.cols).pivots.len()
}

/// Nullspace vector from a column-pivoted Householder QR of `A^H`.
///
/// With `A^H P = Q R` and numerical rank `rho`, the columns of `Q` past `rho`
/// span the nullspace of `A`; the last one is returned, scaled so its
/// largest entry is one.
pub fn numeric_null_vector(a: &SparseMatrix<BigComplex>, prec: usize) -> Result<NullVector<BigComplex>> {
    let rows = a.rows;
    let cols = a.cols;
    // m = A^H, stored by columns: col j of A^H is conj(row j of A).
    let dense = a.to_dense(prec);
    let mut m: Vec<Vec<BigComplex>> = dense
        .iter()
        .map(|row| row.iter().map(|v| v.conj().with_prec(prec)).collect())
        .collect();
    let mut norms: Vec<f64> = m.iter().map(|c| col_norm_f64(c)).collect();
    let steps = rows.min(cols);
    let mut reflectors: Vec<(usize, Vec<BigComplex>)> = Vec::new();
    let mut diag: Vec<f64> = Vec::new();
    for k in 0..steps {
        // Pivot: remaining column of largest norm below row k.
        let (best, _) = (k..rows)
            .map(|j| (j, norms[j]))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("nonempty");
        m.swap(k, best);
        norms.swap(k, best);
        let x: Vec<BigComplex> = m[k][k..].to_vec();
        let alpha_abs = col_norm(&x, prec);
        if alpha_abs.is_zero() {
            diag.push(0.0);
            break;
        }
        let x0 = &x[0];
        let phase = if x0.is_zero() {
            BigComplex::one(prec)
        } else {
            x0.scale(&recip(&x0.abs(), prec))
        };
        let alpha = -&phase.scale(&alpha_abs.abs());
        let mut v = x;
        v[0] = &v[0] - &alpha;
        let two_over = reflector_factor(&v, prec);
        for col in m.iter_mut().skip(k) {
            apply_reflector(&v, &two_over, &mut col[k..]);
        }
        diag.push(alpha.abs_f64());
        for j in k + 1..rows {
            norms[j] = col_norm_f64(&m[j][k + 1..]);
        }
        reflectors.push((k, v));
    }
    let r11 = diag.first().copied().unwrap_or(0.0);
    let thresh = r11 * negligible(prec);
    let rank = diag.iter().take_while(|&&d| d > thresh).count();
    if rank >= cols {
        return Err(Error::EmptyNullspace);
    }
    // q = H_1 ... H_rank e_cols
    let mut q = vec![BigComplex::zero(prec); cols];
    q[cols - 1] = BigComplex::one(prec);
    for (k, v) in reflectors.iter().take(rank).rev() {
        apply_reflector(v, &reflector_factor(v, prec), &mut q[*k..]);
    }
    let (imax, _) = q
        .iter()
        .enumerate()
        .map(|(i, c)| (i, c.abs_f64()))
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .expect("nonempty");
    let inv = q[imax].inv().ok_or(Error::EmptyNullspace)?;
    let vector = q.iter().map(|c| c * &inv).collect();
    Ok(NullVector {
        vector,
        rank,
        nullity: cols - rank,
    })
}

fn recip(x: &astro_float::BigFloat, prec: usize) -> astro_float::BigFloat {
    bf_from_f64(1.0, prec).div(x, prec, RM)
}

/// `2 / |v|^2`.
fn reflector_factor(v: &[BigComplex], prec: usize) -> BigComplex {
    let n2 = v.iter().fold(BigComplex::zero(prec), |acc, c| {
        &acc + &BigComplex::new(c.norm_sqr(), bf_zero(prec), prec)
    });
    &BigComplex::from_i64(2, prec) / &n2
}

fn col_norm(x: &[BigComplex], prec: usize) -> BigComplex {
    let s = x.iter().fold(BigComplex::zero(prec), |acc, c| {
        &acc + &BigComplex::new(c.norm_sqr(), bf_zero(prec), prec)
    });
    s.sqrt()
}

fn col_norm_f64(x: &[BigComplex]) -> f64 {
    x.iter().map(|c| c.abs_f64().powi(2)).sum::<f64>().sqrt()
}

/// `y <- (I - t v v^H) y`.
fn apply_reflector(v: &[BigComplex], t: &BigComplex, y: &mut [BigComplex]) {
    let mut dot = BigComplex::zero(t.prec());
    for (vi, yi) in v.iter().zip(y.iter()) {
        dot = &dot + &(&vi.conj() * yi);
    }
    let f = t * &dot;
    if f.is_zero() {
        return;
    }
    for (vi, yi) in v.iter().zip(y.iter_mut()) {
        *yi = &*yi - &(vi * &f);
    }
}
