//! Central limit behaviour of the modified Legendre-Stirling distribution
//! `p(n,j) = (2j)! {n, j}_1 / M_n(1)`.

use std::fmt::Write as _;

use rayon::prelude::*;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::edgeworth::{distribution, probs_from_roots};
use crate::error::{LabError, Result};
use crate::hp::{fmt_float, ln_factorial, normal_density, pi, pow2};
use crate::laplace::{eisenstein_i, tail_bound, DEFAULT_M_MAX};
use crate::poly::IntegerPolynomial;
use crate::sturm::{certify_polynomial, refine_roots};
use crate::triangle::{modified_row, modified_rows_at};

/// `omega = 2 log((sqrt 5 + 1)/2)`.
pub fn omega(prec: u32) -> Float {
    let s5 = Float::with_val(prec, 5u32).sqrt();
    let phi = (s5 + 1u32) / 2u32;
    phi.ln() * 2u32
}

/// Newton iteration for the positive root of `2(cosh w - 1) = 1`.
pub fn omega_root_solve(prec: u32) -> Float {
    let wp = prec + 32;
    let mut w = Float::with_val(wp, 1);
    let tol = pow2(wp, -(prec as i32) - 8);
    for _ in 0..200 {
        let f = (Float::with_val(wp, w.cosh_ref()) - 1u32) * 2u32 - 1u32;
        let df = Float::with_val(wp, w.sinh_ref()) * 2u32;
        let step = f / df;
        w -= &step;
        if step.abs() < tol {
            break;
        }
    }
    Float::with_val(prec, w)
}

/// Centering and scaling constants.
#[derive(Debug, Clone)]
pub struct CltConstants {
    pub n: usize,
    pub omega: Float,
    /// `(2n+1)/(sqrt 5 omega) - 1/2`.
    pub a_n: Float,
    /// `(1/2 - omega/sqrt 5) (2/omega)^2 n/5`.
    pub b_n: Float,
}

pub fn constants(n: usize, prec: u32) -> Result<CltConstants> {
    if n == 0 {
        return Err(LabError::Domain("constants need n >= 1".into()));
    }
    let w = omega(prec);
    let s5 = Float::with_val(prec, 5u32).sqrt();
    let s5w = Float::with_val(prec, &s5 * &w);
    let a_n = Float::with_val(prec, 2 * n as u64 + 1) / &s5w - Float::with_val(prec, 0.5);
    let half = Float::with_val(prec, 0.5) - Float::with_val(prec, &w / &s5);
    let two_over = Float::with_val(prec, 2u32) / &w;
    let b_n = half * two_over.square() * n as u64 / 5u32;
    Ok(CltConstants { n, omega: w, a_n, b_n })
}

/// `(M'(1)/M(1), M''(1)/M(1) + M'(1)/M(1) - (M'(1)/M(1))^2)` for coefficients `row`.
pub fn mu_sigma_from_row(row: &[Integer]) -> Result<(Rational, Rational)> {
    let poly = IntegerPolynomial::new(row.to_vec());
    let (p0, p1, p2) = poly.derivatives_at_one();
    if p0 <= 0 {
        return Err(LabError::Domain("row sum must be positive".into()));
    }
    let mu = Rational::from((p1, p0.clone()));
    let second = Rational::from((p2, p0));
    let var = second + &mu - Rational::from(mu.square_ref());
    if var == 0 {
        return Err(LabError::DegenerateVariance);
    }
    Ok((mu, var))
}

/// Exact mean and variance of `p(n, .)`.
pub fn mu_sigma_exact(n: usize) -> Result<(Rational, Rational)> {
    if n <= 1 {
        return Err(LabError::DegenerateVariance);
    }
    mu_sigma_from_row(&modified_row(n)?)
}

#[derive(Debug, Clone)]
pub struct MomentResidualRow {
    pub n: usize,
    pub mean: Rational,
    pub variance: Rational,
    /// `mu_n - a_n`.
    pub mean_residual: Float,
    /// `sigma_n^2 - b_n`.
    pub variance_residual: Float,
    /// `|mu_n - a_n| / |mu_{n/2} - a_{n/2}|` when `n/2` precedes in the list.
    pub mean_doubling_ratio: Option<Float>,
}

pub fn lemma41_residuals(n_list: &[usize], prec: u32) -> Result<Vec<MomentResidualRow>> {
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LabError::Domain("n_list must be strictly ascending".into()));
    }
    if n_list.iter().any(|&n| n < 2) {
        return Err(LabError::DegenerateVariance);
    }
    let rows = modified_rows_at(n_list)?;
    let mut out: Vec<MomentResidualRow> = Vec::with_capacity(n_list.len());
    for (&n, row) in n_list.iter().zip(&rows) {
        let (mean, variance) = mu_sigma_from_row(row)?;
        let c = constants(n, prec)?;
        let mean_residual = Float::with_val(prec, &mean) - &c.a_n;
        let variance_residual = Float::with_val(prec, &variance) - &c.b_n;
        let mean_doubling_ratio = out
            .iter()
            .find(|r| 2 * r.n == n)
            .map(|r| Float::with_val(prec, mean_residual.abs_ref()) / Float::with_val(prec, r.mean_residual.abs_ref()));
        out.push(MomentResidualRow {
            n,
            mean,
            variance,
            mean_residual,
            variance_residual,
            mean_doubling_ratio,
        });
    }
    Ok(out)
}

fn check_precision(prec: u32) -> Result<()> {
    if prec < 64 {
        return Err(LabError::PrecisionInsufficient {
            bits: prec,
            detail: "at least 64 bits are required".into(),
        });
    }
    Ok(())
}

/// `log(omega^(2n+1) / (2n)!)` at precision `prec`.
fn log_scale(n: usize, w: &Float, prec: u32) -> Float {
    let lw = Float::with_val(prec, w.ln_ref());
    lw * (2 * n as u64 + 1) - ln_factorial(2 * n as u32, prec)
}

/// `A(n,j) = (2n)! / (sqrt(2 pi b_n) (2j)! omega^(2n+1)) exp(-x^2/2)`, `x = (j - a_n)/sqrt(b_n)`.
pub fn lclt_density_approx(n: usize, j: usize, prec: u32) -> Result<Float> {
    check_precision(prec)?;
    if j < 1 || j > n {
        return Err(LabError::Domain(format!("need 1 <= j <= n, got j={j}, n={n}")));
    }
    // The log carries about log2(log((2n)!)) integer bits that cost fraction bits.
    let wp = prec + 64;
    let magnitude_bits = (2.0 * n as f64 * (2.0 * n as f64).ln().max(1.0)).log2().ceil() as u32;
    if magnitude_bits + 32 > wp {
        return Err(LabError::PrecisionInsufficient {
            bits: prec,
            detail: format!("log-factorial magnitude needs {magnitude_bits} integer bits"),
        });
    }
    let c = constants(n, wp)?;
    let sb = Float::with_val(wp, c.b_n.sqrt_ref());
    let x = (Float::with_val(wp, j) - &c.a_n) / &sb;
    let two_pi_b = Float::with_val(wp, pi(wp) * 2u32) * &c.b_n;
    let log_a = -log_scale(n, &c.omega, wp) - ln_factorial(2 * j as u32, wp)
        - Float::with_val(wp, two_pi_b.ln_ref()) / 2u32
        - Float::with_val(wp, x.square_ref()) / 2u32;
    Ok(Float::with_val(prec, log_a.exp()))
}

/// `{n, j}_1 / A(n,j)` with the exact numerator computed two ways.
#[derive(Debug, Clone)]
pub struct RatioReport {
    pub n: usize,
    pub j: usize,
    pub value: Integer,
    pub ratio: Float,
    pub precision_bits: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RatioJson {
    pub n: usize,
    pub j: usize,
    pub ratio: String,
    pub precision_bits: u32,
}

impl RatioReport {
    pub fn to_json(&self) -> RatioJson {
        RatioJson {
            n: self.n,
            j: self.j,
            ratio: fmt_float(&self.ratio, 20),
            precision_bits: self.precision_bits,
        }
    }
}

pub fn ratio_report(n: usize, j: usize, prec: u32) -> Result<RatioReport> {
    let value = crate::formulas::ls_binsum(n, j)?;
    let row = modified_row(n)?;
    let scaled = &value * Integer::from(Integer::factorial(2 * j as u32));
    if row.get(j) != Some(&scaled) {
        return Err(LabError::Invariant(format!(
            "binomial sum and modified recurrence disagree at ({n}, {j})"
        )));
    }
    let a = lclt_density_approx(n, j, prec)?;
    let ratio = Float::with_val(prec, &value) / a;
    Ok(RatioReport { n, j, value, ratio, precision_bits: prec })
}

/// Row `n` of the modified triangle together with the constants and the
/// scale `omega^(2n+1)/(2n)!`.
#[derive(Debug, Clone)]
pub struct ScaledRow {
    pub n: usize,
    pub row: Vec<Integer>,
    pub constants: CltConstants,
    pub scale: Float,
    prec: u32,
}

impl ScaledRow {
    pub fn new(n: usize, prec: u32) -> Result<Self> {
        Self::from_row(n, modified_row(n)?, prec)
    }

    pub fn from_row(n: usize, row: Vec<Integer>, prec: u32) -> Result<Self> {
        check_precision(prec)?;
        if n < 2 {
            return Err(LabError::Domain("need n >= 2".into()));
        }
        if row.len() != n + 1 {
            return Err(LabError::Domain(format!("row {n} must have {} entries", n + 1)));
        }
        let constants = constants(n, prec)?;
        let wp = prec + 32;
        let w = omega(wp);
        let scale = Float::with_val(prec, log_scale(n, &w, wp).exp());
        Ok(ScaledRow { n, row, constants, scale, prec })
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// `M_n(1) omega^(2n+1) / (2n)!`.
    pub fn total_mass(&self) -> Float {
        let total: Integer = self.row.iter().sum();
        Float::with_val(self.prec, &total) * &self.scale
    }

    /// `sqrt(b_n) (2j)! {n, j}_1 omega^(2n+1)/(2n)!`.
    pub fn scaled(&self, j: usize) -> Float {
        let sb = Float::with_val(self.prec, self.constants.b_n.sqrt_ref());
        Float::with_val(self.prec, &self.row[j]) * &self.scale * sb
    }

    /// `x = (j - a_n)/sqrt(b_n)`.
    pub fn x_of(&self, j: usize) -> Float {
        let sb = Float::with_val(self.prec, self.constants.b_n.sqrt_ref());
        (Float::with_val(self.prec, j) - &self.constants.a_n) / sb
    }

    /// `(j, x, scaled, phi(x), |scaled - phi(x)|)` for `j = 0..=n`.
    pub fn residual_rows(&self) -> Vec<(usize, Float, Float, Float, Float)> {
        (0..=self.n)
            .into_par_iter()
            .map(|j| {
                let x = self.x_of(j);
                let s = self.scaled(j);
                let phi = normal_density(&x);
                let d = Float::with_val(self.prec, &s - &phi).abs();
                (j, x, s, phi, d)
            })
            .collect()
    }

    /// Largest `|scaled - phi(x)|` over `j`; ties resolve to the smallest `j`.
    pub fn theorem42_residual(&self) -> LocalResidual {
        let mut best = (0usize, Float::new(self.prec));
        for (j, _, _, _, d) in self.residual_rows() {
            if d > best.1 {
                best = (j, d);
            }
        }
        LocalResidual { n: self.n, argmax_j: best.0, max_residual: best.1 }
    }

    /// `omega^(2n+1)/(2n)! sum_{j <= a_n + y sqrt(b_n)} (2j)! {n, j}_1`.
    pub fn cdf(&self, y: &Float) -> CdfValue {
        let prec = self.prec;
        if y.is_infinite() {
            let value = if y.is_sign_positive() { self.total_mass() } else { Float::new(prec) };
            return CdfValue { value, cutoff: None, knife_edge: false, exclusive: None };
        }
        let sb = Float::with_val(prec, self.constants.b_n.sqrt_ref());
        let bound = Float::with_val(prec, y * sb) + &self.constants.a_n;
        let nearest = Float::with_val(prec, bound.round_ref());
        let gap = Float::with_val(prec, &bound - &nearest).abs();
        let knife_edge = gap < pow2(prec, -((prec / 2) as i32));
        let cutoff = if knife_edge { nearest.clone() } else { bound.floor() };
        let cutoff = cutoff.to_integer().unwrap_or_default();
        let partial = |upto_inclusive: &Integer| -> Float {
            let mut sum = Integer::new();
            for (j, v) in self.row.iter().enumerate() {
                if *upto_inclusive < j as u64 {
                    break;
                }
                sum += v;
            }
            Float::with_val(prec, &sum) * &self.scale
        };
        let value = partial(&cutoff);
        let exclusive = knife_edge.then(|| partial(&Integer::from(&cutoff - 1)));
        CdfValue { value, cutoff: cutoff.to_i64(), knife_edge, exclusive }
    }

    /// `max |cdf(y) - Phi(y)|` over `y = -4, -3.9, ..., 4`.
    pub fn ks_grid_distance(&self) -> Float {
        ks_grid(self)
            .into_iter()
            .map(|(_, _, _, d)| d)
            .fold(Float::new(self.prec), |a, b| if b > a { b } else { a })
    }
}

fn ks_grid(row: &ScaledRow) -> Vec<(Float, Float, Float, Float)> {
    let prec = row.prec;
    (-40i32..=40)
        .into_par_iter()
        .map(|k| {
            let y = Float::with_val(prec, Rational::from((k, 10)));
            let c = row.cdf(&y).value;
            let phi = normal_cdf(&y, prec);
            let d = Float::with_val(prec, &c - &phi).abs();
            (y, c, phi, d)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct LocalResidual {
    pub n: usize,
    pub argmax_j: usize,
    pub max_residual: Float,
}

pub fn theorem42_residual(n: usize, prec: u32) -> Result<LocalResidual> {
    Ok(ScaledRow::new(n, prec)?.theorem42_residual())
}

#[derive(Debug, Clone)]
pub struct CdfValue {
    pub value: Float,
    /// Largest `j` included, absent for infinite `y`.
    pub cutoff: Option<i64>,
    /// Set when the bound lies within `2^(-prec/2)` of an integer.
    pub knife_edge: bool,
    /// Sum with the boundary index excluded, reported on knife edges.
    pub exclusive: Option<Float>,
}

pub fn theorem43_cdf(n: usize, y: &Float, prec: u32) -> Result<CdfValue> {
    Ok(ScaledRow::new(n, prec)?.cdf(y))
}

pub fn ks_grid_distance(n: usize, prec: u32) -> Result<Float> {
    Ok(ScaledRow::new(n, prec)?.ks_grid_distance())
}

/// `|M_n(1) omega^(2n+1)/(2n)! - 1|`.
pub fn mass_residual(n: usize, prec: u32) -> Result<Float> {
    let m = ScaledRow::new(n, prec)?.total_mass();
    Ok((m - 1u32).abs())
}

/// Standard normal distribution function.
pub fn normal_cdf(y: &Float, prec: u32) -> Float {
    if y.is_nan() {
        return Float::with_val(prec, y);
    }
    if y.is_infinite() {
        return Float::with_val(prec, if y.is_sign_positive() { 1 } else { 0 });
    }
    if y.is_zero() {
        return Float::with_val(prec, 0.5);
    }
    if y.clone().abs() <= 8 {
        return normal_cdf_series(y, prec);
    }
    let upper = normal_upper_tail_cf(&Float::with_val(prec + 32, y.abs_ref()), prec + 32);
    if y.is_sign_positive() {
        Float::with_val(prec, 1 - upper)
    } else {
        Float::with_val(prec, upper)
    }
}

/// `1/2 + phi(0) sum_k (-1)^k y^(2k+1) / (2^k k! (2k+1))`.
fn normal_cdf_series(y: &Float, prec: u32) -> Float {
    // Terms peak near exp(y^2/2) and the negative side cancels down to
    // about exp(-y^2/2), so both cost y^2/(2 ln 2) guard bits.
    let yf = y.to_f64();
    let wp = prec + 32 + (yf * yf * 1.45).ceil() as u32;
    let y = Float::with_val(wp, y);
    let y2 = Float::with_val(wp, y.square_ref()) / 2u32;
    let mut power = y.clone();
    let mut sum = Float::with_val(wp, &y);
    let tol = pow2(wp, -(wp as i32));
    let mut k = 1u64;
    loop {
        power *= &y2;
        power /= k;
        power = -power;
        let term = Float::with_val(wp, &power / (2 * k + 1));
        sum += &term;
        if term.abs() < tol && k as f64 > y2.to_f64() {
            break;
        }
        k += 1;
    }
    let root = Float::with_val(wp, pi(wp) * 2u32).sqrt();
    Float::with_val(prec, sum / root + Float::with_val(wp, 0.5))
}

/// `1 - Phi(y)` for `y > 8` via the continued fraction
/// `phi(y) / (y + 1/(y + 2/(y + 3/(y + ...))))`, evaluated bottom-up.
fn normal_upper_tail_cf(y: &Float, prec: u32) -> Float {
    let depth = {
        let t = prec as f64 * std::f64::consts::LN_2 / (2.0 * y.to_f64());
        (t * t) as u64 + 64
    };
    let mut acc = y.clone();
    for k in (1..=depth).rev() {
        acc = Float::with_val(prec, k) / acc + y;
    }
    normal_density(y) / acc
}

/// Cross-module check: for `n` small, the scaled values equal
/// `sigma_n p(n,j) (sqrt(b_n)/sigma_n) M_n(1) omega^(2n+1)/(2n)!` with
/// `p(n,j)` taken from the Bernoulli array built on the certified roots.
/// Returns the largest absolute difference.
pub fn edgeworth_consistency(n: usize, prec: u32) -> Result<Float> {
    let row = ScaledRow::new(n, prec)?;
    let poly = IntegerPolynomial::new(row.row.clone());
    let cert = certify_polynomial(n, &poly)?;
    let mut roots = refine_roots(&cert, prec + 32)?;
    roots.push(Float::with_val(prec + 32, 0));
    let probs = distribution(&probs_from_roots(&roots)?);
    let (_, var) = mu_sigma_from_row(&row.row)?;
    let sigma = Float::with_val(prec, &var).sqrt();
    let sb = Float::with_val(prec, row.constants.b_n.sqrt_ref());
    let mass = row.total_mass();
    let mut worst = Float::new(prec);
    for (j, p) in probs.iter().enumerate() {
        let composed = Float::with_val(prec, p * &sigma) * Float::with_val(prec, &sb / &sigma) * &mass;
        let d = Float::with_val(prec, &composed - row.scaled(j)).abs();
        if d > worst {
            worst = d;
        }
    }
    Ok(worst)
}

/// Relative deviations of the three lattice-sum moment identities at `omega`
/// against their relative tail bounds: `(deviation, bound)` for
/// `sqrt 5 M(1)`, `2M(1) + 5M'(1)` and `sqrt 5 (2M + 11M' + 5M'')(1)`.
pub fn moment_identity_check(n: usize, prec: u32) -> Result<[(Float, Float); 3]> {
    if n < 2 {
        return Err(LabError::Domain("moment identities need n >= 2".into()));
    }
    let w = omega(prec);
    let s5 = Float::with_val(prec, 5u32).sqrt();
    let poly = IntegerPolynomial::new(modified_row(n)?);
    let (m0, m1, m2) = poly.derivatives_at_one();
    let f = |x: &Integer| Float::with_val(prec, x);
    let targets = [
        Float::with_val(prec, f(&m0) * &s5),
        f(&m0) * 2u32 + f(&m1) * 5u32,
        (f(&m0) * 2u32 + f(&m1) * 11u32 + f(&m2) * 5u32) * &s5,
    ];
    let mut out: Vec<(Float, Float)> = Vec::with_capacity(3);
    for (k, target) in targets.iter().enumerate() {
        let r = n + k;
        let sum = eisenstein_i(r, n, &w, DEFAULT_M_MAX)?;
        // eisenstein_i divides by f(omega) = sqrt 5
        let full = Float::with_val(prec, &sum.value * &s5);
        let rel = Float::with_val(prec, &full - target).abs() / target;
        out.push((rel, tail_bound(r, &w)?));
    }
    Ok(out.try_into().unwrap())
}

/// `j, x, scaled, phi, abs_diff` CSV for the local approximation.
pub fn residual_csv(row: &ScaledRow) -> String {
    let mut s = String::from("j,x,scaled,phi,abs_diff\n");
    for (j, x, v, phi, d) in row.residual_rows() {
        let _ = writeln!(s, "{j},{},{},{},{}", fmt_float(&x, 16), fmt_float(&v, 16), fmt_float(&phi, 16), fmt_float(&d, 16));
    }
    s
}

/// `y, cdf, Phi, abs_diff` CSV over the KS grid.
pub fn cdf_csv(row: &ScaledRow) -> String {
    let mut s = String::from("y,cdf,normal_cdf,abs_diff\n");
    for (y, c, phi, d) in ks_grid(row) {
        let _ = writeln!(s, "{},{},{},{}", fmt_float(&y, 4), fmt_float(&c, 16), fmt_float(&phi, 16), fmt_float(&d, 16));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laplace::{f_of, g_of};

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn omega_forms_agree() {
        let w = omega(256);
        let diff = Float::with_val(256, &w - omega_root_solve(256)).abs();
        assert!(diff < pow2(256, -250));
        let defining = (Float::with_val(256, w.cosh_ref()) - 1u32) * 2u32 - 1u32;
        assert!(defining.abs() < pow2(256, -252));
        assert!((omega(64).to_f64() - 0.9624236501192069).abs() < 1e-15);
        let g = Float::with_val(256, g_of(&w) - 1u32).abs();
        assert!(g < pow2(256, -250));
        let f = Float::with_val(256, f_of(&w) - Float::with_val(256, 5).sqrt()).abs();
        assert!(f < pow2(256, -248));
    }

    #[test]
    fn constant_values() {
        let c = constants(1000, 256).unwrap();
        assert!((c.a_n.to_f64() - 929.31).abs() < 0.01);
        assert!((c.b_n.to_f64() - 60.11).abs() < 0.01);
        let c1 = constants(1, 256).unwrap();
        assert!((c1.a_n.to_f64() - 0.894).abs() < 1e-3);
        for n in [10usize, 500] {
            let c = constants(n, 128).unwrap();
            assert!((c.b_n.to_f64() / n as f64 - 0.0601).abs() < 1e-4);
        }
    }

    #[test]
    fn exact_mean_variance() {
        assert_eq!(mu_sigma_exact(2).unwrap(), (q(13, 7), q(6, 49)));
        let (mu, var) = mu_sigma_exact(3).unwrap();
        assert_eq!(mu, q(2552, 920));
        let expected = q(4704, 920) + q(2552, 920) - Rational::from(q(2552, 920).square_ref());
        assert_eq!(var, expected);
        assert_eq!(mu_sigma_exact(1).unwrap_err(), LabError::DegenerateVariance);
    }

    #[test]
    fn density_peak_and_domain() {
        let c = constants(100, 128).unwrap();
        let peak = c.a_n.to_f64().round() as usize;
        let at = lclt_density_approx(100, peak, 128).unwrap();
        let scale_free = |j: usize| {
            // A(n,j) (2j)! is the Gaussian factor times a j-independent constant.
            let a = lclt_density_approx(100, j, 128).unwrap();
            a * Float::with_val(128, Integer::from(Integer::factorial(2 * j as u32)))
        };
        assert!(scale_free(peak) > scale_free(peak + 3));
        assert!(scale_free(peak) > scale_free(peak - 3));
        assert!(at > 0);
        assert!(lclt_density_approx(100, 0, 128).is_err());
        assert!(lclt_density_approx(100, 101, 128).is_err());
        assert!(matches!(lclt_density_approx(100, 50, 32), Err(LabError::PrecisionInsufficient { .. })));
    }

    #[test]
    fn normal_cdf_values() {
        let prec = 256;
        assert_eq!(normal_cdf(&Float::with_val(prec, 0), prec), 0.5);
        for y in [0.3f64, 1.96, 5.5, 7.99, 8.5, 12.0, 30.0] {
            let yf = Float::with_val(prec, y);
            let sum = normal_cdf(&yf, prec) + normal_cdf(&Float::with_val(prec, -y), prec);
            assert!(Float::with_val(prec, sum - 1u32).abs() < pow2(prec, -(prec as i32) + 4), "{y}");
            // MPFR erfc as an independent reference
            let arg = Float::with_val(prec, -&yf) / Float::with_val(prec, 2).sqrt();
            let reference = arg.erfc() / 2u32;
            let got = normal_cdf(&yf, prec);
            let rel = Float::with_val(prec, &got - &reference).abs() / &reference;
            assert!(rel < pow2(prec, -(prec as i32) + 8), "{y}: {got} vs {reference}");
            let lo = normal_cdf(&Float::with_val(prec, -y), prec);
            let arg = Float::with_val(prec, &yf) / Float::with_val(prec, 2).sqrt();
            let reference = arg.erfc() / 2u32;
            let rel = Float::with_val(prec, &lo - &reference).abs() / &reference;
            assert!(rel < pow2(prec, -(prec as i32) + 8), "-{y}");
        }
        assert!((normal_cdf(&Float::with_val(prec, 1.96), prec).to_f64() - 0.97500).abs() < 1e-5);
    }

    #[test]
    fn small_n_cdf_and_consistency() {
        let row = ScaledRow::new(20, 192).unwrap();
        let all = row.cdf(&Float::with_val(192, rug::float::Special::Infinity));
        assert_eq!(all.value, row.total_mass());
        let none = row.cdf(&Float::with_val(192, -50));
        assert_eq!(none.value, 0);
        let d = edgeworth_consistency(12, 192).unwrap();
        assert!(d < pow2(192, -150), "{d}");
    }

    #[test]
    fn knife_edge_flag() {
        let row = ScaledRow::new(10, 128).unwrap();
        let sb = Float::with_val(128, row.constants.b_n.sqrt_ref());
        let y = (Float::with_val(128, 8) - &row.constants.a_n) / sb;
        let v = row.cdf(&y);
        assert!(v.knife_edge);
        assert_eq!(v.cutoff, Some(8));
        assert!(v.exclusive.unwrap() < v.value);
    }

    #[test]
    fn moment_identities_small() {
        for n in [2usize, 5, 20] {
            for (dev, bound) in moment_identity_check(n, 256).unwrap() {
                assert!(dev <= bound, "n={n}: {dev} > {bound}");
            }
        }
    }
}
