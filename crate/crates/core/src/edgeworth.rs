//! Local limit expansions for row sums of independent Bernoulli variables
//! whose generating polynomial has only real non-positive zeros.
//!
//! A polynomial `A(s) = c prod (s + x_v)` normalizes to
//! `prod (p_v s + 1 - p_v)` with `p_v = 1/(1 + x_v)`; the coefficients become
//! the distribution of `S_n = sum X_v`.

use std::fmt::Write as _;

use rug::{Float, Integer, Rational};

use crate::error::{LabError, Result};
use crate::hp::{fmt_float, normal_density};
use crate::poly::IntegerPolynomial;

/// Field operations shared by exact and floating probabilities.
pub trait ProbScalar: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn mul_int(&self, k: &Integer) -> Self;
    fn to_float(&self, prec: u32) -> Float;
    fn in_unit_interval(&self) -> bool;
}

impl ProbScalar for Rational {
    fn zero_like(&self) -> Self {
        Rational::new()
    }
    fn one_like(&self) -> Self {
        Rational::from(1)
    }
    fn add(&self, other: &Self) -> Self {
        Rational::from(self + other)
    }
    fn sub(&self, other: &Self) -> Self {
        Rational::from(self - other)
    }
    fn mul(&self, other: &Self) -> Self {
        Rational::from(self * other)
    }
    fn mul_int(&self, k: &Integer) -> Self {
        Rational::from(self * k)
    }
    fn to_float(&self, prec: u32) -> Float {
        Float::with_val(prec, self)
    }
    fn in_unit_interval(&self) -> bool {
        *self >= 0 && *self <= 1
    }
}

impl ProbScalar for Float {
    fn zero_like(&self) -> Self {
        Float::new(self.prec())
    }
    fn one_like(&self) -> Self {
        Float::with_val(self.prec(), 1)
    }
    fn add(&self, other: &Self) -> Self {
        Float::with_val(self.prec(), self + other)
    }
    fn sub(&self, other: &Self) -> Self {
        Float::with_val(self.prec(), self - other)
    }
    fn mul(&self, other: &Self) -> Self {
        Float::with_val(self.prec(), self * other)
    }
    fn mul_int(&self, k: &Integer) -> Self {
        Float::with_val(self.prec(), self * k)
    }
    fn to_float(&self, prec: u32) -> Float {
        Float::with_val(prec, self)
    }
    fn in_unit_interval(&self) -> bool {
        *self >= 0 && *self <= 1
    }
}

/// Success probabilities of one row of a Bernoulli triangular array.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliArray<T> {
    probabilities: Vec<T>,
}

impl<T: ProbScalar> BernoulliArray<T> {
    pub fn new(probabilities: Vec<T>) -> Result<Self> {
        if probabilities.iter().any(|p| !p.in_unit_interval()) {
            return Err(LabError::Domain("probabilities must lie in [0, 1]".into()));
        }
        Ok(BernoulliArray { probabilities })
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probabilities
    }
}

/// `p = 1/(1 + x)` with `x = -root`; zero roots give `p = 1`.
pub fn probs_from_roots(roots: &[Float]) -> Result<BernoulliArray<Float>> {
    let mut ps = Vec::with_capacity(roots.len());
    for r in roots {
        if *r > 0 {
            return Err(LabError::Domain(format!("positive root {r}")));
        }
        let one_minus = Float::with_val(r.prec(), 1 - r);
        ps.push(one_minus.recip());
    }
    BernoulliArray::new(ps)
}

/// Exact variant of [`probs_from_roots`] for rational roots.
pub fn probs_from_rational_roots(roots: &[Rational]) -> Result<BernoulliArray<Rational>> {
    let mut ps = Vec::with_capacity(roots.len());
    for r in roots {
        if *r > 0 {
            return Err(LabError::Domain(format!("positive root {r}")));
        }
        ps.push(Rational::from(1) / Rational::from(1 - r));
    }
    BernoulliArray::new(ps)
}

/// `P(S_n = j)` for `j = 0..=n`, by multiplying out the Bernoulli factors.
pub fn distribution<T: ProbScalar>(arr: &BernoulliArray<T>) -> Vec<T> {
    let Some(first) = arr.probabilities.first() else {
        return Vec::new();
    };
    let mut dist = vec![first.one_like()];
    for p in &arr.probabilities {
        let q = p.one_like().sub(p);
        let mut next = vec![p.zero_like(); dist.len() + 1];
        for (j, d) in dist.iter().enumerate() {
            next[j] = next[j].add(&d.mul(&q));
            next[j + 1] = next[j + 1].add(&d.mul(p));
        }
        dist = next;
    }
    dist
}

/// Cumulants `k_1..=k_K` from raw moments `m_1..=m_K`.
pub fn cumulants_from_raw_moments<T: ProbScalar>(raw: &[T]) -> Vec<T> {
    let mut kappa: Vec<T> = Vec::with_capacity(raw.len());
    for m in 1..=raw.len() {
        let mut k = raw[m - 1].clone();
        for i in 1..m {
            let c = Integer::from(Integer::binomial_u((m - 1) as u32, (i - 1) as u32));
            k = k.sub(&kappa[i - 1].mul(&raw[m - i - 1]).mul_int(&c));
        }
        kappa.push(k);
    }
    kappa
}

/// Cumulants of `S_n`: each Bernoulli factor has every raw moment equal to
/// `p`; cumulants of independent summands add.
pub fn array_cumulants<T: ProbScalar>(arr: &BernoulliArray<T>, order: usize) -> Vec<T> {
    let Some(first) = arr.probabilities.first() else {
        return Vec::new();
    };
    let mut total = vec![first.zero_like(); order];
    for p in &arr.probabilities {
        let raw = vec![p.clone(); order];
        for (t, k) in total.iter_mut().zip(cumulants_from_raw_moments(&raw)) {
            *t = t.add(&k);
        }
    }
    total
}

/// Mean, variance and normalized cumulants `lambda_{v,n} = n^((v-2)/2) k_v / sigma^v`.
#[derive(Debug, Clone)]
pub struct CumulantProfile {
    pub n: usize,
    pub mean: Float,
    pub variance: Float,
    /// `lambda_2..=lambda_K`; `lambda_2 = 1`.
    pub normalized: Vec<Float>,
}

impl CumulantProfile {
    /// Builds the profile from cumulants `k_1..=k_K` of a row with `n` summands.
    pub fn from_cumulants(n: usize, kappa: &[Float]) -> Result<Self> {
        if kappa.len() < 2 {
            return Err(LabError::InsufficientCumulants { needed: 2, available: kappa.len() });
        }
        let prec = kappa[0].prec();
        let variance = kappa[1].clone();
        if variance <= 0 {
            return Err(LabError::DegenerateVariance);
        }
        let sigma = Float::with_val(prec, variance.sqrt_ref());
        let nf = Float::with_val(prec, n);
        let sqrt_n = Float::with_val(prec, nf.sqrt_ref());
        let mut normalized = vec![Float::with_val(prec, 1)];
        let mut scale = Float::with_val(prec, 1);
        let ratio = Float::with_val(prec, &sqrt_n / &sigma);
        let sigma2_inv = Float::with_val(prec, variance.recip_ref());
        for k in &kappa[2..] {
            // n^((v-2)/2) / sigma^v = (sqrt(n)/sigma)^(v-2) / sigma^2
            scale *= &ratio;
            normalized.push(Float::with_val(prec, k * &scale) * &sigma2_inv);
        }
        Ok(CumulantProfile {
            n,
            mean: kappa[0].clone(),
            variance,
            normalized,
        })
    }

    pub fn sigma(&self) -> Float {
        Float::with_val(self.variance.prec(), self.variance.sqrt_ref())
    }

    /// `lambda_{v,n}` for `v >= 2`.
    pub fn lambda(&self, v: usize) -> Option<&Float> {
        v.checked_sub(2).and_then(|i| self.normalized.get(i))
    }

    /// Highest cumulant order held.
    pub fn max_order(&self) -> usize {
        self.normalized.len() + 1
    }
}

pub fn cumulants_from_probs<T: ProbScalar>(
    arr: &BernoulliArray<T>,
    order: usize,
    prec: u32,
) -> Result<CumulantProfile> {
    if order < 2 {
        return Err(LabError::InsufficientCumulants { needed: 2, available: order });
    }
    let kappa: Vec<Float> = array_cumulants(arr, order).iter().map(|k| k.to_float(prec)).collect();
    CumulantProfile::from_cumulants(arr.len(), &kappa)
}

/// Stirling numbers of the second kind `S(m, i)`, `0 <= i <= m <= max`.
fn stirling2_table(max: usize) -> Vec<Vec<Integer>> {
    let mut t = vec![vec![Integer::from(1)]];
    for m in 1..=max {
        let prev = &t[m - 1];
        let row: Vec<Integer> = (0..=m)
            .map(|i| {
                let mut v = Integer::new();
                if i >= 1 {
                    v += &prev[i - 1];
                }
                if i < prev.len() {
                    v += Integer::from(&prev[i] * i as u64);
                }
                v
            })
            .collect();
        t.push(row);
    }
    t
}

/// Exact cumulants `k_1..=k_K` of the distribution with generating polynomial
/// `poly`, through factorial moments `poly^(m)(1)/poly(1)`.
pub fn exact_cumulants_from_polynomial(poly: &IntegerPolynomial, order: usize) -> Result<Vec<Rational>> {
    if poly.coeffs().iter().any(|c| *c < 0) {
        return Err(LabError::Domain("generating polynomial has a negative coefficient".into()));
    }
    let total = poly.derivative_at_one(0);
    if total <= 0 {
        return Err(LabError::Domain("generating polynomial must be positive at 1".into()));
    }
    let factorial: Vec<Rational> = (0..=order)
        .map(|m| Rational::from((poly.derivative_at_one(m), total.clone())))
        .collect();
    let s2 = stirling2_table(order);
    let raw: Vec<Rational> = (1..=order)
        .map(|m| {
            (1..=m).fold(Rational::new(), |acc, i| acc + Rational::from(&factorial[i] * &s2[m][i]))
        })
        .collect();
    Ok(cumulants_from_raw_moments(&raw))
}

/// Profile from the generating polynomial; `n` is its degree.
pub fn cumulants_from_factorial_moments(
    poly: &IntegerPolynomial,
    order: usize,
    prec: u32,
) -> Result<CumulantProfile> {
    if order < 2 {
        return Err(LabError::InsufficientCumulants { needed: 2, available: order });
    }
    let kappa = exact_cumulants_from_polynomial(poly, order)?;
    let floats: Vec<Float> = kappa.iter().map(|k| Float::with_val(prec, k)).collect();
    CumulantProfile::from_cumulants(poly.degree().unwrap_or(0), &floats)
}

/// Probabilists' Hermite polynomial `He_m(x)`.
pub fn hermite(m: usize, x: &Float) -> Float {
    let prec = x.prec();
    let mut prev = Float::with_val(prec, 1);
    if m == 0 {
        return prev;
    }
    let mut cur = x.clone();
    for k in 1..m {
        let next = Float::with_val(prec, x * &cur) - Float::with_val(prec, &prev * k as u64);
        prev = cur;
        cur = next;
    }
    cur
}

/// Tuples `(mu_1, ..., mu_nu)` with `sum m mu_m = nu`, ascending lexicographically.
pub fn weighted_partitions(nu: usize) -> Vec<Vec<usize>> {
    fn rec(m: usize, nu: usize, remaining: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if m > nu {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for count in 0..=remaining / m {
            cur.push(count);
            rec(m + 1, nu, remaining - count * m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, nu, nu, &mut Vec::with_capacity(nu), &mut out);
    out
}

/// Edgeworth correction `q_{nu,n}(x)`.
pub fn q_correction(nu: usize, profile: &CumulantProfile, x: &Float) -> Result<Float> {
    if nu == 0 {
        return Err(LabError::Domain("q_correction needs nu >= 1".into()));
    }
    if profile.max_order() < nu + 2 {
        return Err(LabError::InsufficientCumulants {
            needed: nu + 2,
            available: profile.max_order(),
        });
    }
    let prec = x.prec();
    let mut sum = Float::new(prec);
    for mu in weighted_partitions(nu) {
        let s: usize = mu.iter().sum();
        let mut term = hermite(nu + 2 * s, x);
        for (idx, &count) in mu.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let m = idx + 1;
            let lam = profile.lambda(m + 2).unwrap();
            let base = Float::with_val(prec, lam / Float::with_val(prec, Integer::from(Integer::factorial(m as u32 + 2))));
            let pw = Float::with_val(prec, rug::ops::Pow::pow(&base, count as u32));
            term *= pw / Float::with_val(prec, Integer::from(Integer::factorial(count as u32)));
        }
        sum += term;
    }
    Ok(sum * normal_density(x))
}

/// Largest expansion order `k` accepted (cumulants up to order 6).
pub const MAX_EXPANSION_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeworthConfig {
    /// Lower bound enforced on `sigma_n^2 / n`.
    pub variance_floor: f64,
}

impl Default for EdgeworthConfig {
    fn default() -> Self {
        EdgeworthConfig { variance_floor: 0.01 }
    }
}

/// `phi(x) + sum_{v=1}^{k-2} q_{v,n}(x) / n^(v/2)` at `x = (j - mu_n)/sigma_n`,
/// to be compared with `sigma_n P(S_n = j)`.
pub fn lclt_expand(profile: &CumulantProfile, j: i64, k: usize, config: &EdgeworthConfig) -> Result<Float> {
    if !(2..=MAX_EXPANSION_ORDER).contains(&k) {
        return Err(LabError::Domain(format!("expansion order k must be in 2..={MAX_EXPANSION_ORDER}")));
    }
    let prec = profile.variance.prec();
    let ratio = Float::with_val(prec, &profile.variance / profile.n.max(1) as u64).to_f64();
    if ratio < config.variance_floor {
        return Err(LabError::ConditionViolation { ratio, floor: config.variance_floor });
    }
    let x = Float::with_val(prec, Float::with_val(prec, j) - &profile.mean) / profile.sigma();
    let mut value = normal_density(&x);
    let sqrt_n = Float::with_val(prec, profile.n as u64).sqrt();
    let mut npow = Float::with_val(prec, 1);
    for v in 1..=k - 2 {
        npow *= &sqrt_n;
        value += q_correction(v, profile, &x)? / &npow;
    }
    Ok(value)
}

/// One row of an expansion comparison table.
#[derive(Debug, Clone)]
pub struct ExpansionRow {
    pub j: usize,
    pub x: Float,
    /// `sigma_n P(S_n = j)`.
    pub exact: Float,
    pub k2: Float,
    pub k3: Float,
}

impl ExpansionRow {
    pub fn err_k2(&self) -> Float {
        Float::with_val(self.exact.prec(), &self.exact - &self.k2).abs()
    }

    pub fn err_k3(&self) -> Float {
        Float::with_val(self.exact.prec(), &self.exact - &self.k3).abs()
    }
}

/// Compares the `k = 2` and `k = 3` expansions with the exact scaled probabilities.
pub fn expansion_table(
    profile: &CumulantProfile,
    probabilities: &[Float],
    config: &EdgeworthConfig,
) -> Result<Vec<ExpansionRow>> {
    let prec = profile.variance.prec();
    let sigma = profile.sigma();
    probabilities
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let x = Float::with_val(prec, Float::with_val(prec, j) - &profile.mean) / &sigma;
            Ok(ExpansionRow {
                j,
                x,
                exact: Float::with_val(prec, p * &sigma),
                k2: lclt_expand(profile, j as i64, 2, config)?,
                k3: lclt_expand(profile, j as i64, 3, config)?,
            })
        })
        .collect()
}

/// `j, x, exact, k2, k3, abs_err_k2, abs_err_k3`.
pub fn expansion_csv(rows: &[ExpansionRow]) -> String {
    let mut s = String::from("j,x,exact_sigma_p,k2,k3,abs_err_k2,abs_err_k3\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.j,
            fmt_float(&r.x, 16),
            fmt_float(&r.exact, 16),
            fmt_float(&r.k2, 16),
            fmt_float(&r.k3, 16),
            fmt_float(&r.err_k2(), 16),
            fmt_float(&r.err_k3(), 16)
        );
    }
    s
}
