//! Monodromy of the covering and its induced action on k-subsets of sheets.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bigc::BigComplex;
use crate::curve::AlgebraicCurve;
use crate::error::{Error, Result};
use crate::hp::k_subsets;
use crate::lab::{from_c64, to_c64, CurveLab, Path, COLLINEAR_TOL};

/// `perm[i]` is the sheet reached from sheet `i`.
pub type Permutation = Vec<usize>;

/// `(a . b)(i) = a(b(i))`: first `b`, then `a`.
pub fn compose(a: &[usize], b: &[usize]) -> Permutation {
    b.iter().map(|&i| a[i]).collect()
}

pub fn inverse(p: &[usize]) -> Permutation {
    let mut out = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        out[j] = i;
    }
    out
}

pub fn identity(n: usize) -> Permutation {
    (0..n).collect()
}

pub fn is_identity(p: &[usize]) -> bool {
    p.iter().enumerate().all(|(i, &j)| i == j)
}

/// Cycle lengths in decreasing order (a partition of the degree).
pub fn cycle_type(p: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        out.push(len);
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub critical_value: BigComplex,
    pub permutation: Permutation,
}

#[derive(Clone, Debug)]
pub struct MonodromyGenerators {
    pub m: usize,
    pub base: BigComplex,
    /// Fiber over the base point; its order fixes the sheet labels.
    pub fiber: Vec<BigComplex>,
    /// In traversal order around the base point.
    pub generators: Vec<Generator>,
    pub infinity: Permutation,
    pub infinity_critical: bool,
    pub prec: usize,
}

impl MonodromyGenerators {
    /// Finite generators followed by the permutation at infinity.
    pub fn all_permutations(&self) -> Vec<Permutation> {
        let mut out: Vec<Permutation> = self.generators.iter().map(|g| g.permutation.clone()).collect();
        out.push(self.infinity.clone());
        out
    }

    /// Ordered product of the finite generators, last loop outermost.
    pub fn finite_product(&self) -> Permutation {
        self.generators
            .iter()
            .fold(identity(self.m + 1), |acc, g| compose(&g.permutation, &acc))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MonodromyOptions {
    pub prec: usize,
    /// Base point `|z*| = factor * (max |cv| + 1)`.
    pub base_factor: f64,
    pub parallel: bool,
}

impl Default for MonodromyOptions {
    fn default() -> Self {
        Self {
            prec: crate::bigc::DEFAULT_PREC,
            base_factor: 2.0,
            parallel: true,
        }
    }
}

const COLLISION_RETRIES: usize = 2;

pub fn monodromy_generators(curve: &AlgebraicCurve, opts: MonodromyOptions) -> Result<MonodromyGenerators> {
    let mut prec = opts.prec;
    let mut attempt = 0;
    loop {
        match generators_at(curve, MonodromyOptions { prec, ..opts }) {
            Err(Error::PermutationCollision { .. }) if attempt < COLLISION_RETRIES => {
                attempt += 1;
                prec *= 2;
            }
            other => return other,
        }
    }
}

/// Traversal order: increasing `arg(a - z*)` in `[0, 2pi)`; along a common
/// ray the farther value comes first, matching the counterclockwise detour
/// taken around the nearer one.
fn loop_order(base: C64, cvs: &[C64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..cvs.len()).collect();
    let key = |i: usize| {
        let d = cvs[i] - base;
        (d.arg().rem_euclid(std::f64::consts::TAU), d.norm())
    };
    idx.sort_by(|&a, &b| {
        let (ta, ra) = key(a);
        let (tb, rb) = key(b);
        let tie = (ta - tb).abs() * ra.min(rb) <= COLLINEAR_TOL;
        if tie {
            rb.total_cmp(&ra)
        } else {
            ta.total_cmp(&tb)
        }
    });
    idx
}

/// Lasso around `cvs[i]`: out to its clearance circle, once around
/// counterclockwise, and back the same way.
pub fn lasso(lab: &CurveLab, base: &BigComplex, cv: C64, radius: f64) -> Path {
    let b64 = to_c64(base);
    let toward = (b64 - cv) / (b64 - cv).norm();
    let entry = from_c64(cv + toward * radius, lab.prec());
    let out = lab.detour_path(base, &entry, radius);
    let back = out.reversed();
    out.then(Path::circle(cv, &entry)).then(back)
}

/// Matches tracked endpoints to the fiber they started from.
pub fn match_fiber(start: &[BigComplex], end: &[BigComplex], cv: &str) -> Result<Permutation> {
    let s64: Vec<C64> = start.iter().map(to_c64).collect();
    let sep = s64
        .iter()
        .enumerate()
        .flat_map(|(i, a)| s64[i + 1..].iter().map(move |b| (a - b).norm()))
        .fold(f64::INFINITY, f64::min);
    let mut perm = Vec::with_capacity(end.len());
    let mut used = vec![false; start.len()];
    for e in end {
        let e64 = to_c64(e);
        let (j, d) = s64
            .iter()
            .enumerate()
            .map(|(j, s)| (j, (s - e64).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty fiber");
        if d >= sep / 3.0 || used[j] {
            return Err(Error::PermutationCollision { critical: cv.to_string() });
        }
        used[j] = true;
        perm.push(j);
    }
    Ok(perm)
}

fn generators_at(curve: &AlgebraicCurve, opts: MonodromyOptions) -> Result<MonodromyGenerators> {
    let lab = CurveLab::new(curve, opts.prec);
    let cvs = lab.critical_values_c64().to_vec();
    let base64 = C64::new(opts.base_factor * (lab.max_critical_modulus() + 1.0), 0.0);
    let base = from_c64(base64, opts.prec);
    let fiber = lab.fiber_roots(&base)?;
    let radius = lab.clearance_with(&[base64]);
    let order = loop_order(base64, &cvs);
    let run = |&i: &usize| -> Result<Generator> {
        let path = lasso(&lab, &base, cvs[i], radius);
        let end = lab.track(&path, &fiber.roots)?;
        let cv = &lab.critical_values().finite[i];
        Ok(Generator {
            critical_value: cv.clone(),
            permutation: match_fiber(&fiber.roots, &end, &cv.to_decimal_string())?,
        })
    };
    let generators: Vec<Generator> = if opts.parallel {
        order.par_iter().map(run).collect::<Result<_>>()?
    } else {
        order.iter().map(run).collect::<Result<_>>()?
    };
    let mut out = MonodromyGenerators {
        m: curve.m(),
        base,
        fiber: fiber.roots,
        generators,
        infinity: Vec::new(),
        infinity_critical: lab.critical_values().infinity,
        prec: opts.prec,
    };
    out.infinity = inverse(&out.finite_product());
    Ok(out)
}

/// Permutations induced on the `k`-subsets of sheets.
#[derive(Clone, Debug)]
pub struct KSubsetAction {
    pub k: usize,
    pub subsets: Vec<Vec<usize>>,
    pub permutations: Vec<Permutation>,
}

pub fn ksubset_action(perms: &[Permutation], m: usize, k: usize) -> KSubsetAction {
    let subsets = k_subsets(m + 1, k);
    let index = |s: &[usize]| {
        subsets
            .binary_search_by(|x| x.as_slice().cmp(s))
            .expect("subset enumerated")
    };
    let permutations = perms
        .iter()
        .map(|p| {
            subsets
                .iter()
                .map(|s| {
                    let mut img: Vec<usize> = s.iter().map(|&i| p[i]).collect();
                    img.sort_unstable();
                    index(&img)
                })
                .collect()
        })
        .collect();
    KSubsetAction {
        k,
        subsets,
        permutations,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Orbit {
    pub size: usize,
    pub subsets: Vec<Vec<usize>>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.0[hi] = lo;
        }
    }
}

/// Orbits of the action, largest first, ties by smallest member.
pub fn connected_components(action: &KSubsetAction) -> Vec<Orbit> {
    let n = action.subsets.len();
    let mut uf = UnionFind((0..n).collect());
    for p in &action.permutations {
        for (i, &j) in p.iter().enumerate() {
            uf.union(i, j);
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = uf.find(i);
        groups.entry(r).or_default().push(i);
    }
    let mut orbits: Vec<Orbit> = groups
        .into_values()
        .map(|members| Orbit {
            size: members.len(),
            subsets: members.iter().map(|&i| action.subsets[i].clone()).collect(),
        })
        .collect();
    orbits.sort_by(|a, b| b.size.cmp(&a.size).then_with(|| a.subsets[0].cmp(&b.subsets[0])));
    orbits
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BranchPoint {
    /// Decimal critical value, or `"inf"`.
    pub label: String,
    pub cycle_type: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BranchingProfile {
    pub points: Vec<BranchPoint>,
    /// Ramification points (cycles of length > 1) over all critical values.
    pub critical_points: usize,
    /// `orders[r]` counts ramification points of order `r + 1`.
    pub orders: Vec<usize>,
}

pub fn branching_profile(gens: &MonodromyGenerators) -> BranchingProfile {
    let mut points: Vec<BranchPoint> = gens
        .generators
        .iter()
        .map(|g| BranchPoint {
            label: g.critical_value.to_decimal_string(),
            cycle_type: cycle_type(&g.permutation),
        })
        .collect();
    points.push(BranchPoint {
        label: "inf".into(),
        cycle_type: cycle_type(&gens.infinity),
    });
    let mut orders = vec![0usize; gens.m + 1];
    let mut critical_points = 0;
    for p in &points {
        for &len in p.cycle_type.iter().filter(|&&l| l > 1) {
            critical_points += 1;
            orders[len - 2] += 1;
        }
    }
    while orders.last() == Some(&0) {
        orders.pop();
    }
    BranchingProfile {
        points,
        critical_points,
        orders,
    }
}

/// Whether every nontrivial permutation is a single transposition; the
/// first offending critical value otherwise.
pub fn simple_branching_check(profile: &BranchingProfile) -> (bool, Option<String>) {
    for p in &profile.points {
        let nontrivial: Vec<usize> = p.cycle_type.iter().copied().filter(|&l| l > 1).collect();
        if !nontrivial.is_empty() && nontrivial != [2] {
            return (false, Some(p.label.clone()));
        }
    }
    (true, None)
}

/// `w^{m+1} - R(z)` with constant leading coefficient and `m >= 3`.
pub fn cyclic_disconnection_expected(curve: &AlgebraicCurve) -> bool {
    let m = curve.m();
    m >= 3
        && curve.terms().keys().all(|&(a, b)| b == 0 || (b == m + 1 && a == 0))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MonodromyReport {
    pub critical_values: Vec<String>,
    pub infinity_critical: bool,
    pub base_point: String,
    pub permutations: Vec<Permutation>,
    pub infinity_permutation: Permutation,
    pub k: usize,
    pub orbits: Vec<Orbit>,
    pub connected: bool,
    pub simple_branching: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub simple_branching_witness: Option<String>,
    pub profile: BranchingProfile,
    pub cyclic_disconnection_expected: bool,
    pub prec_bits: usize,
}

pub fn monodromy_report(curve: &AlgebraicCurve, gens: &MonodromyGenerators, k: usize) -> MonodromyReport {
    let action = ksubset_action(&gens.all_permutations(), gens.m, k);
    let orbits = connected_components(&action);
    let profile = branching_profile(gens);
    let (simple, witness) = simple_branching_check(&profile);
    MonodromyReport {
        critical_values: gens.generators.iter().map(|g| g.critical_value.to_decimal_string()).collect(),
        infinity_critical: gens.infinity_critical,
        base_point: gens.base.to_decimal_string(),
        permutations: gens.generators.iter().map(|g| g.permutation.clone()).collect(),
        infinity_permutation: gens.infinity.clone(),
        k,
        connected: orbits.len() == 1,
        orbits,
        simple_branching: simple,
        simple_branching_witness: witness,
        profile,
        cyclic_disconnection_expected: cyclic_disconnection_expected(curve),
        prec_bits: gens.prec,
    }
}
