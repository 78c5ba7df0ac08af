//! The `hpm` command line: file-based wrappers over the library.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::bigc::BigComplex;
use crate::coeff::Coeff;
use crate::curve::{AlgebraicCurve, Anchor, CurveJson, GermSpec};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::germ::germ_of_expression;
use crate::gauss::GaussianRational;
use crate::hp::{solve_for, verify_homogeneous_conditions, verify_order_conditions, GermTuple, HPSolution, Solvable};
use crate::lab::CurveLab;
use crate::monodromy::{monodromy_generators, monodromy_report, MonodromyOptions};
use crate::recon::{
    distinguished_denominator, distinguished_numerator, errors_csv, export_zeros, infer_limit_and_rate,
    minor_ratio_candidates, subset_sum_oracle, zeros_csv, zeros_svg,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_REFUSED: i32 = 4;

/// Above this `n` the default backend is numeric.
pub const EXACT_N_LIMIT: usize = 8;

#[derive(Parser, Debug)]
#[command(name = "hpm", version, about = "Hermite-Pade m-systems of algebraic function germs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum Command {
    /// Expand f_1..f_m along the anchored branch at infinity.
    Expand {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        germs: GermArgs,
        /// Number of coefficients after the leading one.
        #[arg(long)]
        order: i64,
        #[arg(long, value_enum)]
        backend: Option<Backend>,
    },
    /// Solve the HP system for each requested n and check all order conditions.
    Solve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        germs: GermArgs,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        range: NArgs,
        #[arg(long, value_enum)]
        backend: Option<Backend>,
    },
    /// Evaluate ratio approximants at points and match them to branch values.
    Reconstruct {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        germs: GermArgs,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        range: NArgs,
        #[arg(long, value_enum)]
        backend: Option<Backend>,
        /// Comma separated points, or a CSV file with columns re,im.
        #[arg(long)]
        points: String,
        /// Numerator subset J, e.g. "0,2" (default {0..k-2, k}).
        #[arg(long)]
        numerator: Option<String>,
        /// Denominator subset I (default {0..k-1}).
        #[arg(long)]
        denominator: Option<String>,
        /// Refuse to reconstruct when the k-subset surface is disconnected.
        #[arg(long)]
        strict: bool,
    },
    /// Monodromy generators and orbits on k-subsets of sheets.
    Monodromy {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k: usize,
    },
    /// Zeros of one polynomial of the system.
    Zeros {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        germs: GermArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        backend: Option<Backend>,
        /// Subset I (default {0..k-1}).
        #[arg(long)]
        subset: Option<String>,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct Common {
    /// Curve JSON file.
    #[arg(long)]
    pub curve: PathBuf,
    #[arg(long = "prec-bits", default_value_t = 256)]
    pub prec_bits: usize,
    /// Output directory; not part of the config hash.
    #[arg(long, default_value = ".")]
    #[serde(skip)]
    pub out: PathBuf,
    /// Worker threads (0 = rayon default).
    #[arg(long, default_value_t = 0)]
    #[serde(skip)]
    pub jobs: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct GermArgs {
    /// Rational expression in z and w; repeat for f_1..f_m.
    #[arg(long = "f", required = true)]
    pub f: Vec<String>,
    /// Use f_j = f^j with a single --f.
    #[arg(long = "power-tuple")]
    pub power_tuple: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct NArgs {
    #[arg(long, conflicts_with = "n_range")]
    pub n: Option<usize>,
    /// start:stop:step, inclusive.
    #[arg(long = "n-range")]
    pub n_range: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Numeric,
}

/// Parses and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.exit_code() {
                0 => EXIT_OK,
                _ => EXIT_INPUT,
            };
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Refused(_) => EXIT_REFUSED,
        e if e.is_numeric() => EXIT_NUMERIC,
        _ => EXIT_INPUT,
    }
}

pub fn execute(cmd: &Command) -> Result<i32> {
    let common = match cmd {
        Command::Expand { common, .. }
        | Command::Solve { common, .. }
        | Command::Reconstruct { common, .. }
        | Command::Monodromy { common, .. }
        | Command::Zeros { common, .. } => common,
    };
    if common.prec_bits < 64 {
        return Err(Error::invalid("--prec-bits must be at least 64"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.jobs)
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    let mut job = Job::load(cmd, common)?;
    job.threads = pool.current_num_threads();
    fs::create_dir_all(&common.out)?;
    pool.install(|| match cmd {
        Command::Expand { germs, order, backend, .. } => job.expand(germs, *order, *backend),
        Command::Solve {
            germs, k, range, backend, ..
        } => job.solve(germs, *k, &parse_range(range)?, *backend),
        Command::Reconstruct {
            germs,
            k,
            range,
            backend,
            points,
            numerator,
            denominator,
            strict,
            ..
        } => job.reconstruct(
            germs,
            *k,
            &parse_range(range)?,
            *backend,
            points,
            numerator.as_deref(),
            denominator.as_deref(),
            *strict,
        ),
        Command::Monodromy { k, .. } => job.monodromy(*k),
        Command::Zeros {
            germs,
            k,
            n,
            backend,
            subset,
            ..
        } => job.zeros(germs, *k, *n, *backend, subset.as_deref()),
    })
}

/// `start:stop:step` (inclusive) or a single `n`.
pub fn parse_range(r: &NArgs) -> Result<Vec<usize>> {
    let ns: Vec<usize> = match (&r.n, &r.n_range) {
        (Some(n), None) => vec![*n],
        (None, Some(s)) => {
            let parts: Vec<&str> = s.split(':').collect();
            let num = |p: &str| -> Result<usize> {
                p.trim()
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad --n-range component {p:?}")))
            };
            let (a, b, step) = match parts.as_slice() {
                [a, b] => (num(a)?, num(b)?, 1),
                [a, b, c] => (num(a)?, num(b)?, num(c)?),
                _ => return Err(Error::invalid(format!("--n-range must be start:stop[:step], got {s:?}"))),
            };
            if step == 0 {
                return Err(Error::invalid("--n-range step must be positive"));
            }
            (a..=b).step_by(step).collect()
        }
        _ => return Err(Error::invalid("one of --n or --n-range is required")),
    };
    if ns.is_empty() || ns.contains(&0) {
        return Err(Error::invalid("n values must be positive and the range nonempty"));
    }
    Ok(ns)
}

/// Comma separated indices.
pub fn parse_subset(s: &str) -> Result<Vec<usize>> {
    let mut v: Vec<usize> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad subset entry {p:?}")))
        })
        .collect::<Result<_>>()?;
    let len = v.len();
    v.sort_unstable();
    v.dedup();
    if v.len() != len {
        return Err(Error::invalid(format!("repeated index in {s:?}")));
    }
    Ok(v)
}

fn parse_point(s: &str, prec: usize) -> Result<BigComplex> {
    match s.parse::<GaussianRational>() {
        Ok(g) => Ok(BigComplex::from_gaussian(&g, prec)),
        Err(_) => BigComplex::parse_decimal(s, prec),
    }
}

/// Inline `a,b,c` (Gaussian rationals or decimals) or a CSV file of `re,im`.
pub fn parse_points(spec: &str, prec: usize) -> Result<Vec<BigComplex>> {
    let path = Path::new(spec);
    let pts: Vec<BigComplex> = if path.is_file() {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::invalid(format!("points file: {e}")))?;
        let mut out = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::invalid(format!("points file: {e}")))?;
            let re = rec.get(0).unwrap_or("");
            if re.eq_ignore_ascii_case("re") {
                continue;
            }
            let im = rec.get(1).unwrap_or("0");
            out.push(BigComplex::parse_decimal(&format!("{re}{}{im}i", if im.starts_with('-') { "" } else { "+" }), prec)?);
        }
        out
    } else {
        spec.split(',').map(|p| parse_point(p.trim(), prec)).collect::<Result<_>>()?
    };
    if pts.is_empty() {
        return Err(Error::invalid("no evaluation points"));
    }
    Ok(pts)
}

struct Job {
    curve: AlgebraicCurve,
    spec: Option<GermSpec>,
    prec: usize,
    out: PathBuf,
    hash: String,
    threads: usize,
}

fn config_hash(cmd: &Command, curve_text: &str) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(cmd).expect("serializable config"));
    h.update([0u8]);
    h.update(curve_text.as_bytes());
    hex::encode(h.finalize())
}

impl Job {
    fn load(cmd: &Command, common: &Common) -> Result<Self> {
        let text = fs::read_to_string(&common.curve)?;
        let cj: CurveJson = serde_json::from_str(&text)?;
        let (curve, spec) = cj.into_curve()?;
        Ok(Self {
            curve,
            spec,
            prec: common.prec_bits,
            out: common.out.clone(),
            hash: config_hash(cmd, &text),
            threads: 1,
        })
    }

    fn spec(&self) -> Result<&GermSpec> {
        self.spec
            .as_ref()
            .ok_or_else(|| Error::invalid("the curve file has no \"branch\" entry"))
    }

    fn write_json(&self, name: &str, mut v: Value) -> Result<PathBuf> {
        if let Value::Object(map) = &mut v {
            map.insert("config_hash".into(), json!(self.hash));
        }
        let path = self.out.join(name);
        fs::write(&path, serde_json::to_string_pretty(&v)? + "\n")?;
        Ok(path)
    }

    fn expressions(&self, g: &GermArgs) -> Result<Vec<Expr>> {
        let m = self.curve.m();
        let parsed: Vec<Expr> = g.f.iter().map(|s| Expr::parse(s)).collect::<Result<_>>()?;
        if g.power_tuple || (m == 1 && parsed.len() == 1) {
            if parsed.len() != 1 {
                return Err(Error::invalid("--power-tuple takes exactly one --f"));
            }
            (1..=m)
                .map(|j| Expr::parse(&format!("({})^{j}", g.f[0])))
                .collect()
        } else if parsed.len() != m {
            Err(Error::invalid(format!(
                "expected {m} --f expressions (or --power-tuple), got {}",
                parsed.len()
            )))
        } else {
            Ok(parsed)
        }
    }

    fn germs<C: Coeff>(&self, g: &GermArgs, order: i64, ctx: C::Ctx) -> Result<GermTuple<C>> {
        let spec = self.spec()?;
        if g.power_tuple || (self.curve.m() == 1 && g.f.len() == 1) {
            if g.f.len() != 1 {
                return Err(Error::invalid("--power-tuple takes exactly one --f"));
            }
            let f = germ_of_expression::<C>(&self.curve, spec, &Expr::parse(&g.f[0])?, order, ctx)?;
            GermTuple::power_tuple(&f, self.curve.m())
        } else {
            GermTuple::from_expressions(&self.curve, spec, &self.expressions(g)?, order, ctx)
        }
    }

    /// Exact up to `EXACT_N_LIMIT` unless the branch anchor is a decimal.
    fn backend(&self, chosen: Option<Backend>, n_max: usize) -> Backend {
        let approx = matches!(self.spec.as_ref().map(|s| s.anchor()), Some(Anchor::Approx(_)));
        chosen.unwrap_or(if approx || n_max > EXACT_N_LIMIT {
            Backend::Numeric
        } else {
            Backend::Exact
        })
    }

    fn check_k(&self, k: usize) -> Result<()> {
        let m = self.curve.m();
        if k == 0 || k > m {
            return Err(Error::invalid(format!("--k must lie in [1, {m}], got {k}")));
        }
        Ok(())
    }

    fn expand(&self, g: &GermArgs, order: i64, backend: Option<Backend>) -> Result<i32> {
        if order < 1 {
            return Err(Error::invalid("--order must be positive"));
        }
        let germs: Vec<Value> = match self.backend(backend, 0) {
            Backend::Exact => self
                .germs::<GaussianRational>(g, order, ())?
                .germs()
                .iter()
                .map(|s| serde_json::to_value(s.to_json()))
                .collect::<serde_json::Result<_>>()?,
            Backend::Numeric => self
                .germs::<BigComplex>(g, order, self.prec)?
                .germs()
                .iter()
                .map(|s| serde_json::to_value(s.to_json()))
                .collect::<serde_json::Result<_>>()?,
        };
        let path = self.write_json(
            "germs.json",
            json!({ "m": self.curve.m(), "order": order, "expressions": g.f, "power_tuple": g.power_tuple, "germs": germs }),
        )?;
        println!("wrote {}", path.display());
        Ok(EXIT_OK)
    }

    fn solve_all<C: Solvable>(&self, g: &GermArgs, k: usize, ns: &[usize], ctx: C::Ctx) -> Result<(GermTuple<C>, Vec<HPSolution<C>>)> {
        let n_max = *ns.iter().max().expect("nonempty range");
        let germs = self.germs::<C>(g, ((self.curve.m() + 1) * n_max) as i64, ctx)?;
        let threads = self.threads;
        let sols = ns
            .par_iter()
            .map(|&n| {
                let mut s = solve_for(&germs, n, k)?;
                s.threads = threads;
                Ok(s)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((germs, sols))
    }

    fn solve(&self, g: &GermArgs, k: usize, ns: &[usize], backend: Option<Backend>) -> Result<i32> {
        self.check_k(k)?;
        let n_max = *ns.iter().max().expect("nonempty range");
        match self.backend(backend, n_max) {
            Backend::Exact => self.solve_in::<GaussianRational>(g, k, ns, ()),
            Backend::Numeric => self.solve_in::<BigComplex>(g, k, ns, self.prec),
        }
    }

    fn solve_in<C: Solvable>(&self, g: &GermArgs, k: usize, ns: &[usize], ctx: C::Ctx) -> Result<i32> {
        let (germs, sols) = self.solve_all::<C>(g, k, ns, ctx)?;
        let mut code = EXIT_OK;
        for sol in &sols {
            let order = verify_order_conditions(sol, &germs);
            let homog = verify_homogeneous_conditions(sol, &germs);
            let ok = order.passes(sol.backend) && homog.passes(sol.backend);
            if !ok {
                code = EXIT_NUMERIC;
            }
            let path = self.write_json(
                &format!("solution_n{}.json", sol.n),
                json!({
                    "solution": sol.to_json(),
                    "order_conditions": order,
                    "homogeneous_conditions": homog,
                    "residuals_pass": ok,
                }),
            )?;
            println!(
                "n={} nullspace={} residual={:e} {} -> {}",
                sol.n,
                sol.nullspace_dim,
                order.max_abs.max(homog.max_abs),
                if ok { "ok" } else { "FAILED" },
                path.display()
            );
        }
        Ok(code)
    }

    fn connected(&self, k: usize) -> Result<bool> {
        let gens = monodromy_generators(
            &self.curve,
            MonodromyOptions {
                prec: self.prec,
                ..Default::default()
            },
        )?;
        Ok(monodromy_report(&self.curve, &gens, k).connected)
    }

    #[allow(clippy::too_many_arguments)]
    fn reconstruct(
        &self,
        g: &GermArgs,
        k: usize,
        ns: &[usize],
        backend: Option<Backend>,
        points: &str,
        numerator: Option<&str>,
        denominator: Option<&str>,
        strict: bool,
    ) -> Result<i32> {
        self.check_k(k)?;
        let j = numerator.map(parse_subset).transpose()?.unwrap_or_else(|| distinguished_numerator(k));
        let i = denominator
            .map(parse_subset)
            .transpose()?
            .unwrap_or_else(|| distinguished_denominator(k));
        if j.len() != k || i.len() != k || j.iter().chain(&i).any(|&x| x > self.curve.m()) {
            return Err(Error::invalid(format!("numerator and denominator must be {k}-subsets of 0..={}", self.curve.m())));
        }
        let pts = parse_points(points, self.prec)?;
        let connected = self.connected(k)?;
        if !connected && strict {
            return Err(Error::Refused(format!(
                "the surface of {k}-subsets is disconnected; no reconstruction guarantee"
            )));
        }
        let n_max = *ns.iter().max().expect("nonempty range");
        match self.backend(backend, n_max) {
            Backend::Exact => self.reconstruct_in::<GaussianRational>(g, k, ns, (), &pts, &j, &i, connected),
            Backend::Numeric => self.reconstruct_in::<BigComplex>(g, k, ns, self.prec, &pts, &j, &i, connected),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn reconstruct_in<C: Solvable>(
        &self,
        g: &GermArgs,
        k: usize,
        ns: &[usize],
        ctx: C::Ctx,
        pts: &[BigComplex],
        j: &[usize],
        i: &[usize],
        connected: bool,
    ) -> Result<i32> {
        let (_, sols) = self.solve_all::<C>(g, k, ns, ctx)?;
        let lab = CurveLab::new(&self.curve, self.prec);
        let spec = self.spec()?;
        let power = g.power_tuple || (self.curve.m() == 1 && g.f.len() == 1);
        let distinguished = j == distinguished_numerator(k) && i == distinguished_denominator(k);
        let exprs = self.expressions(g)?;
        let outcomes: Vec<Result<_>> = pts
            .par_iter()
            .map(|z| {
                let table = if power && distinguished {
                    subset_sum_oracle(&lab, &Expr::parse(&g.f[0])?, spec, k, z)?
                } else {
                    minor_ratio_candidates(&lab, &exprs, spec, j, i, z)?
                };
                infer_limit_and_rate(&sols, j, i, &table, connected)
            })
            .collect();
        let mut code = EXIT_OK;
        let mut reports = Vec::new();
        for (idx, (z, out)) in pts.iter().zip(outcomes).enumerate() {
            match out {
                Ok(r) => {
                    fs::write(self.out.join(format!("errors_{idx}.csv")), errors_csv(&r)?)?;
                    println!(
                        "z={} matched {:?} error={:e} rho={} germ_in_subset={}{}",
                        z.to_decimal_string(),
                        r.matched_subset,
                        r.final_error,
                        r.rate.as_ref().map_or("n/a".to_string(), |f| format!("{:.4}", f.rho)),
                        r.germ_in_subset,
                        if r.ambiguous { " (ambiguous)" } else { "" }
                    );
                    reports.push(serde_json::to_value(&r)?);
                }
                Err(e) => {
                    eprintln!("z={}: {e}", z.to_decimal_string());
                    code = code.max(exit_code(&e));
                    reports.push(json!({ "z": z.to_decimal_string(), "error": e.to_string() }));
                }
            }
        }
        if !connected {
            eprintln!("warning: the surface of {k}-subsets is disconnected; limits carry no guarantee");
        }
        let path = self.write_json(
            "recon.json",
            json!({ "k": k, "connected": connected, "n": ns, "reports": reports }),
        )?;
        println!("wrote {}", path.display());
        Ok(code)
    }

    fn monodromy(&self, k: usize) -> Result<i32> {
        self.check_k(k)?;
        let gens = monodromy_generators(
            &self.curve,
            MonodromyOptions {
                prec: self.prec,
                ..Default::default()
            },
        )?;
        let report = monodromy_report(&self.curve, &gens, k);
        let sizes: Vec<usize> = report.orbits.iter().map(|o| o.size).collect();
        println!(
            "k={k} orbits {sizes:?} connected={} simple_branching={}",
            report.connected, report.simple_branching
        );
        let path = self.write_json("monodromy.json", serde_json::to_value(&report)?)?;
        println!("wrote {}", path.display());
        Ok(EXIT_OK)
    }

    fn zeros(&self, g: &GermArgs, k: usize, n: usize, backend: Option<Backend>, subset: Option<&str>) -> Result<i32> {
        self.check_k(k)?;
        let i = subset.map(parse_subset).transpose()?.unwrap_or_else(|| distinguished_denominator(k));
        if i.len() != k {
            return Err(Error::invalid(format!("--subset must have {k} entries")));
        }
        let zeros = match self.backend(backend, n) {
            Backend::Exact => {
                let (_, sols) = self.solve_all::<GaussianRational>(g, k, &[n], ())?;
                export_zeros(&sols[0], &i, self.prec)?
            }
            Backend::Numeric => {
                let (_, sols) = self.solve_all::<BigComplex>(g, k, &[n], self.prec)?;
                export_zeros(&sols[0], &i, self.prec)?
            }
        };
        let lab = CurveLab::new(&self.curve, self.prec);
        fs::write(self.out.join("zeros.csv"), zeros_csv(&zeros)?)?;
        fs::write(self.out.join("zeros.svg"), zeros_svg(&zeros, lab.critical_values_c64()))?;
        let path = self.write_json(
            "zeros.json",
            json!({
                "n": n,
                "k": k,
                "subset": i,
                "count": zeros.iter().map(|z| z.multiplicity).sum::<usize>(),
                "zeros": zeros.iter().map(|z| json!({ "value": z.value.to_decimal_string(), "multiplicity": z.multiplicity })).collect::<Vec<_>>(),
            }),
        )?;
        println!("{} distinct zeros -> {}", zeros.len(), path.display());
        Ok(EXIT_OK)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let r = |s: &str| parse_range(&NArgs { n: None, n_range: Some(s.into()) });
        assert_eq!(r("1:7:3").unwrap(), vec![1, 4, 7]);
        assert_eq!(r("5:6").unwrap(), vec![5, 6]);
        assert!(r("6:5").is_err());
        assert!(r("1:5:0").is_err());
        assert!(r("0:2").is_err());
        assert!(r("a:b").is_err());
        assert_eq!(parse_range(&NArgs { n: Some(3), n_range: None }).unwrap(), vec![3]);
        assert!(parse_range(&NArgs { n: None, n_range: None }).is_err());
    }

    #[test]
    fn subsets_and_points() {
        assert_eq!(parse_subset("2, 0").unwrap(), vec![0, 2]);
        assert!(parse_subset("1,1").is_err());
        let p = parse_points("2, 2+i, -3, 0.5", 128).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p[1].to_f64_pair(), (2.0, 1.0));
        assert_eq!(p[3].to_f64_pair(), (0.5, 0.0));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Refused("x".into())), EXIT_REFUSED);
        assert_eq!(exit_code(&Error::NoUsableN), EXIT_NUMERIC);
        assert_eq!(exit_code(&Error::invalid("x")), EXIT_INPUT);
    }
}
