//! Invariant suites shared by the command line and the test targets. Each
//! check maps onto a property of one module.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use rug::{Float, Integer, Rational};

use crate::clt::{self, ScaledRow};
use crate::edgeworth::{self, BernoulliArray, EdgeworthConfig};
use crate::error::{LabError, Result};
use crate::formulas;
use crate::gamma::GammaParam;
use crate::hp::pow2;
use crate::laplace::{self, DEFAULT_M_MAX};
use crate::poly::{self, IntegerPolynomial, Parity};
use crate::sturm;
use crate::triangle::{modified_row, modified_rows_at, StirlingTriangle};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Roots,
    Eisenstein,
    Clt,
    Edgeworth,
    All,
}

impl FromStr for Suite {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identities" => Ok(Suite::Identities),
            "roots" => Ok(Suite::Roots),
            "eisenstein" => Ok(Suite::Eisenstein),
            "clt" => Ok(Suite::Clt),
            "edgeworth" => Ok(Suite::Edgeworth),
            "all" => Ok(Suite::All),
            other => Err(LabError::Parse(format!("unknown suite '{other}'"))),
        }
    }
}

/// Knobs for the suites; `None` selects the desk-scale default.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub n_max: Option<usize>,
    pub n: Option<usize>,
    pub j: Option<usize>,
    pub precision_bits: u32,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { n_max: None, n: None, j: None, precision_bits: crate::hp::DEFAULT_PRECISION }
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Measured values, or the first counterexample on failure.
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {} ({:.2}s)", self.name, self.seconds)?;
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

/// Runs `body`, turning `Err` into a failed check with the error as detail.
pub fn check(name: impl Into<String>, body: impl FnOnce() -> Result<String>) -> Check {
    let start = Instant::now();
    let (passed, detail) = match body() {
        Ok(d) => (true, d),
        Err(e) => (false, e.to_string()),
    };
    Check { name: name.into(), passed, detail, seconds: start.elapsed().as_secs_f64() }
}

fn fail(msg: String) -> LabError {
    LabError::Invariant(msg)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(fail(msg()))
    }
}

fn sci(x: &Float) -> String {
    format!("{:.6e}", x.to_f64())
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Vec<Check> {
    match suite {
        Suite::Identities => identities(cfg),
        Suite::Roots => roots(cfg),
        Suite::Eisenstein => eisenstein(cfg),
        Suite::Clt => clt_suite(cfg),
        Suite::Edgeworth => edgeworth_suite(cfg),
        Suite::All => [Suite::Identities, Suite::Roots, Suite::Eisenstein, Suite::Clt, Suite::Edgeworth]
            .into_iter()
            .flat_map(|s| run_suite(s, cfg))
            .collect(),
    }
}

// ---------------------------------------------------------------- identities

/// Recurrence, explicit sum and the two Legendre sums agree for `0 <= j <= n <= n_max`.
pub fn cross_formula_legendre(n_max: usize) -> Result<String> {
    let g = GammaParam::legendre();
    let t = StirlingTriangle::build(g.clone(), n_max)?;
    for n in 0..=n_max {
        let mismatch = (0..=n).into_par_iter().find_map_any(|j| {
            let rec = t.get(n, j).unwrap();
            let values = (
                formulas::js_explicit(n, j, &g),
                formulas::ls_altsum(n, j),
                formulas::ls_binsum(n, j),
            );
            match values {
                (Ok(e), Ok(a), Ok(b)) if e == rec && a == rec && b == rec => None,
                v => Some(format!("({n},{j}): recurrence {rec}, others {v:?}")),
            }
        });
        if let Some(m) = mismatch {
            return Err(fail(m));
        }
    }
    Ok(format!("{} entries", (n_max + 1) * (n_max + 2) / 2))
}

/// Recurrence, explicit sum and the central-factorial sum agree at `gamma = 1/2`.
pub fn cross_formula_chebyshev(n_max: usize) -> Result<String> {
    let g = GammaParam::chebyshev();
    let t = StirlingTriangle::build(g.clone(), n_max)?;
    for n in 0..=n_max {
        for j in 0..=n {
            let rec = t.get(n, j).unwrap();
            let e = formulas::js_explicit(n, j, &g)?;
            let c = formulas::cs_binsum(n, j)?;
            ensure(e == rec && c == rec, || format!("({n},{j}): {rec} vs {e}, {c}"))?;
        }
    }
    Ok(format!("{} entries", (n_max + 1) * (n_max + 2) / 2))
}

/// Recurrence and explicit sum agree for non-integer rational `gamma`.
pub fn cross_formula_rational(gamma: &GammaParam, n_max: usize) -> Result<String> {
    let t = StirlingTriangle::build(gamma.clone(), n_max)?;
    for n in 0..=n_max {
        for j in 0..=n {
            let rec = t.get(n, j).unwrap();
            let e = formulas::js_explicit(n, j, gamma)?;
            ensure(e == rec, || format!("gamma={gamma} ({n},{j}): {rec} vs {e}"))?;
        }
    }
    Ok(format!("gamma={gamma}"))
}

/// Both connection formulas reproduce Legendre-Stirling entries for `k <= k_max`.
pub fn connection_numbers(k_max: usize) -> Result<String> {
    let t = StirlingTriangle::build(GammaParam::legendre(), 2 * k_max + 1)?;
    for k in 0..=k_max {
        for j in 0..=2 * k + 1 {
            let odd = formulas::connect_odd(k, j)?;
            ensure(t.get(2 * k + 1, j).unwrap() == odd, || format!("odd k={k} j={j}"))?;
            if j <= 2 * k {
                let even = formulas::connect_even(k, j)?;
                ensure(t.get(2 * k, j).unwrap() == even, || format!("even k={k} j={j}"))?;
            }
        }
    }
    Ok(format!("k <= {k_max}"))
}

/// Polynomial connection: weighted `L` sums equal `M_{2k+1}` and `M_{2k}`.
pub fn connection_polynomials(k_max: usize) -> Result<String> {
    let rows = {
        let ns: Vec<usize> = (0..=2 * k_max + 1).collect();
        modified_rows_at(&ns)?
    };
    (0..=k_max).into_par_iter().try_for_each(|k| {
        let odd = poly::connect_polynomials(k, Parity::Odd)?;
        ensure(odd == IntegerPolynomial::new(rows[2 * k + 1].clone()), || format!("odd k={k}"))?;
        let even = poly::connect_polynomials(k, Parity::Even)?;
        ensure(even == IntegerPolynomial::new(rows[2 * k].clone()), || format!("even k={k}"))
    })?;
    Ok(format!("k <= {k_max}"))
}

/// The polynomial recurrence gives `2s`, `4s(6s+1)`, `8s(90s^2+24s+1)` and
/// agrees with the modified triangle up to `n_max`.
pub fn generating_polynomials(n_max: usize) -> Result<String> {
    let expected = [
        IntegerPolynomial::from_i64(&[0, 2]),
        IntegerPolynomial::from_i64(&[0, 4, 24]),
        IntegerPolynomial::from_i64(&[0, 8, 192, 720]),
    ];
    for (i, e) in expected.iter().enumerate() {
        let got = poly::build_m_recurrence(i + 1)?;
        ensure(&got == e, || format!("M_{} = {got}", i + 1))?;
    }
    for n in 0..=n_max {
        let a = poly::build_m_recurrence(n)?;
        let b = poly::build_m_from_triangle(n)?;
        ensure(a == b, || format!("M_{n}: recurrence and triangle differ"))?;
    }
    Ok(format!("n <= {n_max}"))
}

/// `{n, j}_0 = {n-1, j-1}_1` for `1 <= j <= n <= n_max`.
pub fn gamma_zero(n_max: usize) -> Result<String> {
    for n in 1..=n_max {
        for j in 1..=n {
            formulas::gamma_zero_shift(n, j)?;
        }
    }
    Ok(format!("n <= {n_max}"))
}

/// Fixed-`j` ratios move towards 1 (or are exactly 1) as `n` doubles.
pub fn fixed_j_trend(j_max: usize, n: usize) -> Result<String> {
    for g in [GammaParam::legendre(), GammaParam::chebyshev(), GammaParam::from_ratio(3, 2)?] {
        for j in 1..=j_max {
            let one = Rational::from(1);
            let r1 = (formulas::fixed_j_ratio(n, j, &g)? - &one).abs();
            let r2 = (formulas::fixed_j_ratio(2 * n, j, &g)? - &one).abs();
            ensure(r2 < r1 || (r1 == 0 && r2 == 0), || format!("gamma={g} j={j}: {r1} -> {r2}"))?;
        }
    }
    Ok(format!("j <= {j_max}, n = {n} -> {}", 2 * n))
}

fn identities(cfg: &VerifyConfig) -> Vec<Check> {
    let n = cfg.n_max.unwrap_or(30);
    vec![
        check(format!("cross-formula equality n<={n} (gamma=1)"), || cross_formula_legendre(n)),
        check(format!("cross-formula equality n<={n} (gamma=1/2)"), || cross_formula_chebyshev(n)),
        check("cross-formula equality n<=15 (gamma=1/3, 3/2)", || {
            cross_formula_rational(&GammaParam::from_ratio(1, 3)?, 15)?;
            cross_formula_rational(&GammaParam::from_ratio(3, 2)?, 15)
        }),
        check("connection formulas k<=20", || connection_numbers(20)),
        check("connection polynomials k<=40", || connection_polynomials(40)),
        check(format!("generating polynomials n<={n}"), || generating_polynomials(n)),
        check("gamma=0 shift n<=40", || gamma_zero(40)),
        check("fixed-j ratio trend j<=5", || fixed_j_trend(5, 30)),
    ]
}

// ---------------------------------------------------------------------- roots

/// Sturm certificates for `1 <= n <= n_max`.
pub fn root_certificates(n_max: usize) -> Result<String> {
    (1..=n_max).into_par_iter().try_for_each(|n| sturm::certify_roots(n).map(|_| ()))?;
    Ok(format!("{n_max} certificates"))
}

/// Peak-or-plateau shape of `(2j)! {n, j}_1` for `3 <= n <= n_max`, from one
/// rolling pass over the modified triangle.
pub fn unimodality(n_max: usize) -> Result<String> {
    let mut row = vec![Integer::from(1)];
    let mut plateaus = 0usize;
    for n in 1..=n_max {
        row = crate::triangle::modified_next_row(&row);
        if n >= 3 {
            match poly::classify_unimodal(&row) {
                Ok(poly::UnimodalMode::Plateau(..)) => plateaus += 1,
                Ok(_) => {}
                Err(j) => return Err(LabError::Unimodality { n, j }),
            }
        }
    }
    Ok(format!("3 <= n <= {n_max}, {plateaus} plateaus"))
}

fn roots(cfg: &VerifyConfig) -> Vec<Check> {
    let n = cfg.n_max.unwrap_or(30);
    vec![
        check(format!("root certificates 1<=n<={n}"), || root_certificates(n)),
        check("unimodality 3<=n<=300", || unimodality(300.max(n))),
    ]
}

// ----------------------------------------------------------------- eisenstein

/// Truncated lattice sums against `M_n(g(w))` for `2 <= n <= n_max` at
/// `w = omega/2, omega, 2 omega`; returns the smallest bound slack.
pub fn eisenstein_representation(n_max: usize, prec: u32) -> Result<String> {
    let w0 = clt::omega(prec);
    let ws = [Float::with_val(prec, &w0 / 2u32), w0.clone(), Float::with_val(prec, &w0 * 2u32)];
    let ns: Vec<usize> = (2..=n_max).collect();
    let rows = modified_rows_at(&ns)?;
    let mut worst_ratio = 0f64;
    for (n, row) in ns.iter().zip(&rows) {
        let poly = IntegerPolynomial::new(row.clone());
        for w in &ws {
            let exact = poly.eval_float(&laplace::g_of(w));
            let sum = laplace::eisenstein_m(*n, w, DEFAULT_M_MAX)?;
            let rel = Float::with_val(prec, &sum.value - &exact).abs() / &exact;
            let bound = sum.tail_bound.clone().unwrap();
            ensure(rel <= bound, || format!("n={n} w={}: residual {} > bound {}", w.to_f64(), sci(&rel), sci(&bound)))?;
            ensure(sum.imag_residual < pow2(prec, -(prec as i32) / 2), || {
                format!("n={n}: imaginary part {}", sci(&sum.imag_residual))
            })?;
            let bf = bound.to_f64();
            if bf > 0.0 {
                worst_ratio = worst_ratio.max(rel.to_f64() / bf);
            }
        }
    }
    Ok(format!("max residual/bound = {worst_ratio:.3e}"))
}

/// `eisenstein_l` against `L_n(g(w))` for `1 <= n <= n_max` at `omega`.
pub fn eisenstein_l_representation(n_max: usize, prec: u32) -> Result<String> {
    let w = clt::omega(prec);
    let g = laplace::g_of(&w);
    for n in 1..=n_max {
        let exact = poly::build_l(n)?.eval_float(&g);
        let sum = laplace::eisenstein_l(n, &w, DEFAULT_M_MAX)?;
        let rel = Float::with_val(prec, &sum.value - &exact).abs() / &exact;
        let bound = sum.tail_bound.clone().unwrap();
        ensure(rel <= bound, || format!("n={n}: {} > {}", sci(&rel), sci(&bound)))?;
    }
    Ok(format!("n <= {n_max}"))
}

/// Closed-form derivative identity for the Laplace integrals.
pub fn laplace_derivatives(max: usize) -> Result<String> {
    for r in 0..=max {
        for n in 0..=max {
            for order in 0..=2 {
                ensure(laplace::laplace_derivative_check(r, n, order), || format!("r={r} n={n} order={order}"))?;
            }
        }
    }
    Ok(format!("r, n <= {max}"))
}

/// `n (Q(n) - b)` within `tolerance` (relative) of `b_nu` at `n`.
pub fn saddle_expansion(n: usize, tolerance: f64, prec: u32) -> Result<String> {
    let w = clt::omega(prec);
    let zs = [w, Float::with_val(prec, 1), Float::with_val(prec, 2)];
    let mut worst = 0f64;
    for nu in 0..=2 {
        for z in &zs {
            let report = laplace::saddle_convergence_check(nu, z, &[n])?;
            let row = &report.rows[0];
            let rel = Float::with_val(report.precision_bits, row.residual.abs_ref())
                / Float::with_val(report.precision_bits, report.coefficients.b_nu.abs_ref());
            let relf = rel.to_f64();
            worst = worst.max(relf);
            ensure(relf <= tolerance, || format!("nu={nu} z={}: relative residual {relf:.4e}", z.to_f64()))?;
        }
    }
    Ok(format!("n={n}, max relative residual {worst:.4e}"))
}

fn eisenstein(cfg: &VerifyConfig) -> Vec<Check> {
    let n = cfg.n_max.unwrap_or(50);
    let prec = cfg.precision_bits;
    vec![
        check(format!("Eisenstein representation 2<=n<={n}"), || eisenstein_representation(n, prec)),
        check("Eisenstein L representation n<=20", || eisenstein_l_representation(20, prec)),
        check("Laplace closed-form derivatives", || laplace_derivatives(12)),
        check("saddle expansion n=400", || saddle_expansion(400, 0.05, prec)),
    ]
}

// ------------------------------------------------------------------------ clt

/// Ratio window for `{1000, 930}_1 / A(1000, 930)`.
pub const RATIO_WINDOW: (f64, f64) = (1.0438485, 1.0438495);

pub fn ratio_check(n: usize, j: usize, prec: u32) -> Result<String> {
    let report = clt::ratio_report(n, j, prec)?;
    let r = report.ratio.to_f64();
    let shown = crate::hp::fmt_float(&report.ratio, 12);
    ensure((RATIO_WINDOW.0..=RATIO_WINDOW.1).contains(&r), || {
        format!("ratio {shown} outside [{}, {}]", RATIO_WINDOW.0, RATIO_WINDOW.1)
    })?;
    Ok(format!("ratio {shown}"))
}

/// Mean-residual doubling ratios in `(0.3, 0.7)`; `|sigma^2 - b|` stays below
/// `ceiling` and grows by at most `slack` per doubling.
pub fn moment_decay_check(ns: &[usize], ceiling: f64, slack: f64, prec: u32) -> Result<String> {
    let rows = clt::lemma41_residuals(ns, prec)?;
    let mut parts = Vec::new();
    for r in &rows {
        if let Some(d) = &r.mean_doubling_ratio {
            let d = d.to_f64();
            ensure(d > 0.3 && d < 0.7, || format!("n={}: mean doubling ratio {d:.4}", r.n))?;
            parts.push(format!("ratio@{}={d:.4}", r.n));
        }
        let v = r.variance_residual.to_f64().abs();
        ensure(v < ceiling, || format!("n={}: |sigma^2-b| = {v:.6}", r.n))?;
    }
    for w in rows.windows(2) {
        let a = w[0].variance_residual.to_f64().abs();
        let b = w[1].variance_residual.to_f64().abs();
        ensure(b <= a + slack, || format!("|sigma^2-b| grows {a:.6} -> {b:.6}"))?;
    }
    let vs: Vec<String> = rows.iter().map(|r| format!("{:.6}", r.variance_residual.to_f64())).collect();
    Ok(format!("{}; sigma^2-b = [{}]", parts.join(", "), vs.join(", ")))
}

pub fn local_residual_check(n_small: usize, n_large: usize, ceiling: f64, prec: u32) -> Result<String> {
    let a = clt::theorem42_residual(n_small, prec)?.max_residual.to_f64();
    let b = clt::theorem42_residual(n_large, prec)?.max_residual.to_f64();
    ensure(a < ceiling, || format!("residual({n_small}) = {a:.6} >= {ceiling}"))?;
    ensure(b < a, || format!("residual({n_large}) = {b:.6} >= residual({n_small}) = {a:.6}"))?;
    Ok(format!("residual({n_small}) = {a:.6}, residual({n_large}) = {b:.6}"))
}

pub fn ks_check(n_small: usize, n_large: usize, prec: u32) -> Result<String> {
    let rows = modified_rows_at(&[n_small, n_large])?;
    let mut it = rows.into_iter();
    let a = ScaledRow::from_row(n_small, it.next().unwrap(), prec)?.ks_grid_distance().to_f64();
    let b = ScaledRow::from_row(n_large, it.next().unwrap(), prec)?.ks_grid_distance().to_f64();
    ensure(b < a, || format!("KS({n_large}) = {b:.6} >= KS({n_small}) = {a:.6}"))?;
    Ok(format!("KS({n_small}) = {a:.6}, KS({n_large}) = {b:.6}"))
}

/// `r_n = |M_n(1) omega^(2n+1)/(2n)! - 1|` halves (ratio in `(0.3, 0.7)`) per doubling.
pub fn mass_decay_check(ns: &[usize], prec: u32) -> Result<String> {
    let rows = modified_rows_at(ns)?;
    let mut rs = Vec::new();
    for (&n, row) in ns.iter().zip(rows) {
        let m = ScaledRow::from_row(n, row, prec)?.total_mass();
        rs.push((n, (m - 1u32).abs().to_f64()));
    }
    let mut parts = Vec::new();
    for w in rs.windows(2) {
        if w[1].0 == 2 * w[0].0 {
            let ratio = w[1].1 / w[0].1;
            ensure(ratio > 0.3 && ratio < 0.7, || format!("r_{}/r_{} = {ratio:.4}", w[1].0, w[0].0))?;
            parts.push(format!("r_{}/r_{}={ratio:.4}", w[1].0, w[0].0));
        }
    }
    Ok(parts.join(", "))
}

pub fn cdf_checks(n: usize, prec: u32) -> Result<String> {
    let row = ScaledRow::new(n, prec)?;
    let mid = row.cdf(&Float::with_val(prec, 0)).value.to_f64();
    ensure((mid - 0.5).abs() < 0.05, || format!("cdf({n}, 0) = {mid:.6}"))?;
    let low = row.cdf(&Float::with_val(prec, -8)).value.to_f64();
    ensure(low < 1e-6, || format!("cdf({n}, -8) = {low:.3e}"))?;
    Ok(format!("cdf(0) = {mid:.6}, cdf(-8) = {low:.3e}"))
}

pub fn consistency_check(ns: &[usize], prec: u32) -> Result<String> {
    let tol = pow2(prec, -(prec as i32) + 64);
    for &n in ns {
        let d = clt::edgeworth_consistency(n, prec)?;
        ensure(d <= tol, || format!("n={n}: difference {}", sci(&d)))?;
    }
    Ok(format!("n in {ns:?}"))
}

pub fn moment_identities(n_max: usize, prec: u32) -> Result<String> {
    (2..=n_max).into_par_iter().try_for_each(|n| {
        for (k, (dev, bound)) in clt::moment_identity_check(n, prec)?.iter().enumerate() {
            ensure(dev <= bound, || format!("n={n} identity {k}: {} > {}", sci(dev), sci(bound)))?;
        }
        Ok(())
    })?;
    Ok(format!("2 <= n <= {n_max}"))
}

pub fn normal_cdf_symmetry(prec: u32) -> Result<String> {
    let tol = pow2(prec, -(prec as i32) + 4);
    for k in 0..=120 {
        let y = Float::with_val(prec, Rational::from((k, 10)));
        let s = clt::normal_cdf(&y, prec) + clt::normal_cdf(&Float::with_val(prec, -&y), prec);
        ensure(Float::with_val(prec, s - 1u32).abs() <= tol, || format!("y = {}", y.to_f64()))?;
    }
    Ok("y in [0, 12]".into())
}

fn clt_suite(cfg: &VerifyConfig) -> Vec<Check> {
    let prec = cfg.precision_bits;
    let n = cfg.n.unwrap_or(1000);
    let j = cfg.j.unwrap_or(930);
    vec![
        check("omega closed form and root agree", || {
            let d = Float::with_val(prec, clt::omega(prec) - clt::omega_root_solve(prec)).abs();
            ensure(d <= pow2(prec, -(prec as i32) + 4), || sci(&d))?;
            Ok(crate::hp::fmt_float(&clt::omega(prec), 20))
        }),
        check("normal cdf symmetry", || normal_cdf_symmetry(prec)),
        check(format!("ratio {{{n},{j}}}_1 / A({n},{j})"), || ratio_check(n, j, prec)),
        check("mean and variance residual decay n=100,200,400", || {
            moment_decay_check(&[100, 200, 400], VARIANCE_RESIDUAL_CEILING, VARIANCE_RESIDUAL_SLACK, prec)
        }),
        check("local approximation residual n=100 vs 400", || local_residual_check(100, 400, 0.05, prec)),
        check("KS grid distance n=100 vs 400", || ks_check(100, 400, prec)),
        check("total mass decay n=50,100,200", || mass_decay_check(&[50, 100, 200], prec)),
        check("cdf n=400 at y=0 and y=-8", || cdf_checks(400, prec)),
        check("scaled values match Bernoulli distribution n<=50", || consistency_check(&[5, 20, 50], prec)),
        check("lattice-sum moment identities n<=50", || moment_identities(50, prec)),
    ]
}

/// Upper bound on `|sigma_n^2 - b_n|` for `n` in `100..=400`.
pub const VARIANCE_RESIDUAL_CEILING: f64 = 0.035;
/// Allowed growth of `|sigma_n^2 - b_n|` per doubling.
pub const VARIANCE_RESIDUAL_SLACK: f64 = 0.001;

// ------------------------------------------------------------------ edgeworth

/// Distribution by multiplying factors against a `2^n` enumeration of outcomes.
pub fn brute_force_distribution(arr: &BernoulliArray<Rational>) -> Vec<Rational> {
    let ps = arr.probabilities();
    let n = ps.len();
    let mut dist = vec![Rational::new(); n + 1];
    for mask in 0u64..(1u64 << n) {
        let mut w = Rational::from(1);
        for (i, p) in ps.iter().enumerate() {
            if mask >> i & 1 == 1 {
                w *= p;
            } else {
                w *= Rational::from(1 - p);
            }
        }
        dist[mask.count_ones() as usize] += w;
    }
    dist
}

/// Exact arrays `p_v = v/(n+v)`, `1 <= v <= n`, and the certified `M_n`
/// arrays for `n <= n_max`.
pub fn brute_force_check(n_max: usize, prec: u32) -> Result<String> {
    for n in 1..=n_max {
        let ps: Vec<Rational> = (1..=n).map(|v| Rational::from((v as u64, (n + v) as u64))).collect();
        let arr = BernoulliArray::new(ps)?;
        let d = edgeworth::distribution(&arr);
        ensure(d == brute_force_distribution(&arr), || format!("rational array n={n}"))?;
        ensure(d.iter().sum::<Rational>() == 1, || format!("normalization n={n}"))?;
    }
    let tol = pow2(prec, -(prec as i32) + 16);
    for n in 2..=n_max {
        let row = modified_row(n)?;
        let total: Integer = row.iter().sum();
        let probs = m_array_probabilities(n, prec)?;
        for (j, p) in probs.iter().enumerate() {
            let exact = Rational::from((row[j].clone(), total.clone()));
            let d = Float::with_val(prec, p - &exact).abs();
            ensure(d <= tol, || format!("M_{n} array at j={j}: {}", sci(&d)))?;
        }
    }
    Ok(format!("n <= {n_max}"))
}

/// Bernoulli distribution from the certified, refined roots of `M_n`.
pub fn m_array_probabilities(n: usize, prec: u32) -> Result<Vec<Float>> {
    Ok(edgeworth::distribution(&m_array(n, prec)?))
}

pub fn m_array(n: usize, prec: u32) -> Result<BernoulliArray<Float>> {
    let cert = sturm::certify_roots(n)?;
    let mut roots = sturm::refine_roots(&cert, prec + 32)?;
    roots.push(Float::with_val(prec + 32, 0));
    edgeworth::probs_from_roots(&roots)
}

/// Cumulants from roots and from factorial moments agree to `2^(16-prec)` (relative).
pub fn two_path_check(ns: &[usize], order: usize, prec: u32) -> Result<String> {
    let tol = pow2(prec, -(prec as i32) + 16);
    for &n in ns {
        let a = edgeworth::cumulants_from_probs(&m_array(n, prec)?, order, prec)?;
        let b = edgeworth::cumulants_from_factorial_moments(&poly::build_m_from_triangle(n)?, order, prec)?;
        let rel = |x: &Float, y: &Float| Float::with_val(prec, x - y).abs() / Float::with_val(prec, y.abs_ref()).max(&Float::with_val(prec, 1));
        ensure(rel(&a.mean, &b.mean) <= tol, || format!("n={n}: mean"))?;
        ensure(rel(&a.variance, &b.variance) <= tol, || format!("n={n}: variance"))?;
        for v in 2..=order {
            let (x, y) = (a.lambda(v).unwrap(), b.lambda(v).unwrap());
            ensure(rel(x, y) <= tol, || format!("n={n}: lambda_{v} {} vs {}", sci(x), sci(y)))?;
        }
    }
    Ok(format!("n in {ns:?}, orders <= {order}"))
}

/// Max over `j` of `|sigma_n p(n,j) - expansion_k|` for `k = 2, 3, 4`, using
/// the exact cumulants of `M_n`.
pub fn expansion_errors(n: usize, prec: u32) -> Result<[Float; 3]> {
    let row = modified_row(n)?;
    let poly = IntegerPolynomial::new(row.clone());
    let profile = edgeworth::cumulants_from_factorial_moments(&poly, 6, prec)?;
    let total: Integer = row.iter().sum();
    let sigma = profile.sigma();
    let cfg = EdgeworthConfig::default();
    let per_j: Vec<[Float; 3]> = (0..=n)
        .into_par_iter()
        .map(|j| {
            let exact = Float::with_val(prec, &row[j]) / Float::with_val(prec, &total) * &sigma;
            let mut out = [Float::new(prec), Float::new(prec), Float::new(prec)];
            for (slot, k) in out.iter_mut().zip(2..=4) {
                let e = edgeworth::lclt_expand(&profile, j as i64, k, &cfg)?;
                *slot = Float::with_val(prec, &exact - e).abs();
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut worst = [Float::new(prec), Float::new(prec), Float::new(prec)];
    for row in per_j {
        for (w, v) in worst.iter_mut().zip(row) {
            if v > *w {
                *w = v;
            }
        }
    }
    Ok(worst)
}

pub fn sharpening_check(n: usize, prec: u32) -> Result<String> {
    let [k2, k3, k4] = expansion_errors(n, prec)?;
    ensure(k3 < k2, || format!("k=3 error {} not below k=2 error {}", sci(&k3), sci(&k2)))?;
    Ok(format!("max error k=2 {}, k=3 {}, k=4 {}", sci(&k2), sci(&k3), sci(&k4)))
}

pub fn hermite_parity(prec: u32) -> Result<String> {
    for m in 0..=10 {
        for x in [0.3f64, 1.7, 4.2] {
            let a = edgeworth::hermite(m, &Float::with_val(prec, x));
            let b = edgeworth::hermite(m, &Float::with_val(prec, -x));
            let expect = if m % 2 == 0 { b.clone() } else { -b.clone() };
            ensure(a == expect, || format!("m={m} x={x}"))?;
        }
    }
    Ok("m <= 10".into())
}

fn edgeworth_suite(cfg: &VerifyConfig) -> Vec<Check> {
    let prec = cfg.precision_bits;
    vec![
        check("brute-force enumeration n<=12", || brute_force_check(12, prec)),
        check("two-path cumulants n in {5,10,20,50}", || two_path_check(&[5, 10, 20, 50], 6, prec)),
        check("Hermite parity", || hermite_parity(prec)),
        check("expansion sharpening n=200", || sharpening_check(cfg.n.unwrap_or(200), prec)),
    ]
}
