//! Closed-form sums for the Jacobi-Stirling family and the identities tying
//! them together. All sums are exact; the alternating sums cancel far too
//! violently for floating point.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::error::{LabError, Result};
use crate::gamma::GammaParam;
use crate::triangle::{js_recurrence, StirlingTriangle};

fn binomial(n: u32, k: u32) -> Integer {
    Integer::from(Integer::binomial_u(n, k))
}

fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

fn signed(v: Integer, negative: bool) -> Integer {
    if negative {
        -v
    } else {
        v
    }
}

fn exact_quotient(num: Integer, den: &Integer, what: &str) -> Result<Integer> {
    let (q, rem) = num.div_rem_ref(den).into();
    let (q, rem): (Integer, Integer) = (q, rem);
    if rem != 0 {
        return Err(LabError::Invariant(format!("{what}: sum is not divisible by {den}")));
    }
    Ok(q)
}

/// `{n, j}_gamma` from the explicit alternating sum over `r = 0..=j`, with the
/// Gamma ratio taken as the reciprocal of the rising product
/// `prod_{t=0}^{j} (r + 2gamma - 1 + t)`.
///
/// At `gamma = 1/2` the `r = 0` summand is a zero factor against a pole; it is
/// defined as 0 for `n >= 1`, and row 0 comes from the boundary condition.
pub fn js_explicit(n: usize, j: usize, gamma: &GammaParam) -> Result<Rational> {
    if *gamma.value() <= 0 {
        return Err(LabError::Domain(
            "explicit formula requires gamma > 0; use the recurrence".into(),
        ));
    }
    if n == 0 {
        return Ok(Rational::from(u32::from(j == 0)));
    }
    let shift = gamma.shift();
    let mut total = Rational::new();
    for r in 0..=j {
        let rq = Rational::from(r as u64);
        let base = Rational::from(&rq + &shift);
        let mut rising = Rational::from(1);
        let mut zero_factor = false;
        for t in 0..=j {
            let f = Rational::from(&base + t as u64);
            if f == 0 {
                zero_factor = true;
            }
            rising *= f;
        }
        if zero_factor {
            if r == 0 && shift == 0 {
                continue;
            }
            return Err(LabError::Arithmetic(format!(
                "zero factor in the Gamma ratio at r = {r}, gamma = {gamma}"
            )));
        }
        let weight = Rational::from(2 * r as u64) + &shift;
        let power = Rational::from(&rq * &base).pow(n as u32);
        let denom = rising * factorial(r as u32) * factorial((j - r) as u32);
        let mut term = weight * power / denom;
        if (r + j) % 2 == 1 {
            term = -term;
        }
        total += term;
    }
    Ok(total)
}

/// Legendre-Stirling number from the alternating sum with factorial denominators.
pub fn ls_altsum(n: usize, j: usize) -> Result<Integer> {
    let mut total = Rational::new();
    for r in 0..=j {
        let r64 = r as u64;
        let num = Integer::from(r64 * (r64 + 1)).pow(n as u32) * (2 * r64 + 1);
        let den = factorial((j - r) as u32) * factorial((j + r + 1) as u32);
        let term = Rational::from((num, den));
        if (r + j) % 2 == 1 {
            total -= term;
        } else {
            total += term;
        }
    }
    if *total.denom() != 1 {
        return Err(LabError::Invariant(format!("alternating sum for ({n}, {j}) is not integral")));
    }
    let value = total.numer().clone();
    if value < 0 {
        return Err(LabError::Invariant(format!("alternating sum for ({n}, {j}) is negative")));
    }
    Ok(value)
}

/// Legendre-Stirling number from the binomial sum over `nu = 0..=2j`, divided
/// exactly by `(2j)!`. Terms are evaluated in parallel; integer addition makes
/// the result independent of scheduling.
pub fn ls_binsum(n: usize, j: usize) -> Result<Integer> {
    if j > n {
        return Ok(Integer::new());
    }
    let jj = j as i64;
    let sum: Integer = (0..=2 * j as u32)
        .into_par_iter()
        .map(|nu| {
            let d = jj - i64::from(nu);
            let base = Integer::from(d * (d + 1));
            signed(binomial(2 * j as u32, nu) * base.pow(n as u32), nu % 2 == 1)
        })
        .reduce(Integer::new, |a, b| a + b);
    exact_quotient(sum, &factorial(2 * j as u32), "Legendre-Stirling binomial sum")
}

/// `sum_{nu=0}^{2j} (-1)^nu C(2j, nu) (j - nu)^e`.
pub fn central_power_sum(j: usize, e: u32) -> Integer {
    let jj = j as i64;
    (0..=2 * j as u32)
        .into_par_iter()
        .map(|nu| {
            let base = Integer::from(jj - i64::from(nu));
            signed(binomial(2 * j as u32, nu) * base.pow(e), nu % 2 == 1)
        })
        .reduce(Integer::new, |a, b| a + b)
}

/// Chebyshev-Stirling number `{n, j}_{1/2}` from the central-power sum.
pub fn cs_binsum(n: usize, j: usize) -> Result<Integer> {
    if j > n {
        return Ok(Integer::new());
    }
    exact_quotient(
        central_power_sum(j, 2 * n as u32),
        &factorial(2 * j as u32),
        "Chebyshev-Stirling binomial sum",
    )
}

fn chebyshev_triangle(max_n: usize) -> Result<StirlingTriangle> {
    StirlingTriangle::build(GammaParam::chebyshev(), max_n)
}

fn as_integer(v: Rational) -> Integer {
    debug_assert_eq!(*v.denom(), 1);
    v.into_numer_denom().0
}

/// `sum_{mu=0}^{k} C(2k+1, 2mu+1) {k+mu+1, j}_{1/2}`, which equals `{2k+1, j}_1`.
pub fn connect_odd(k: usize, j: usize) -> Result<Integer> {
    let cheb = chebyshev_triangle(2 * k + 1)?;
    Ok((0..=k)
        .map(|mu| {
            binomial(2 * k as u32 + 1, 2 * mu as u32 + 1)
                * as_integer(cheb.get(k + mu + 1, j).unwrap())
        })
        .sum())
}

/// `sum_{mu=0}^{k} C(2k, 2mu) {k+mu, j}_{1/2}`, which equals `{2k, j}_1`.
pub fn connect_even(k: usize, j: usize) -> Result<Integer> {
    let cheb = chebyshev_triangle(2 * k)?;
    Ok((0..=k)
        .map(|mu| binomial(2 * k as u32, 2 * mu as u32) * as_integer(cheb.get(k + mu, j).unwrap()))
        .sum())
}

/// Checks `{n, j}_0 = {n-1, j-1}_1` and returns the common value.
pub fn gamma_zero_shift(n: usize, j: usize) -> Result<Integer> {
    if n == 0 || j == 0 {
        return Err(LabError::Domain("gamma-zero shift needs n >= 1 and j >= 1".into()));
    }
    let lhs = js_recurrence(n, j, &GammaParam::zero())?;
    let rhs = js_recurrence(n - 1, j - 1, &GammaParam::legendre())?;
    if lhs != rhs {
        return Err(LabError::Invariant(format!(
            "{{{n},{j}}}_0 = {lhs} but {{{},{}}}_1 = {rhs}",
            n - 1,
            j - 1
        )));
    }
    Ok(as_integer(lhs))
}

/// Leading constant `Gamma(j+2gamma-1) / (j! Gamma(2j+2gamma-1))` of the
/// fixed-`j` asymptotics, as the exact reciprocal of `j!` times a rising product.
pub fn fixed_j_constant(j: usize, gamma: &GammaParam) -> Result<Rational> {
    let base = Rational::from(j as u64) + gamma.shift();
    let mut rising = Rational::from(1);
    for t in 0..j {
        let f = Rational::from(&base + t as u64);
        if f == 0 {
            return Err(LabError::Domain(format!("Gamma pole for j = {j}, gamma = {gamma}")));
        }
        rising *= f;
    }
    Ok(Rational::from(1) / (rising * factorial(j as u32)))
}

/// Exact ratio `{n, j}_gamma / (C_j (j(j+2gamma-1))^n)`, which tends to 1 for fixed `j >= 1`.
pub fn fixed_j_ratio(n: usize, j: usize, gamma: &GammaParam) -> Result<Rational> {
    if j == 0 {
        return Err(LabError::Domain("fixed-j asymptotics need j >= 1".into()));
    }
    let lead = fixed_j_constant(j, gamma)? * gamma.weight(j).pow(n as u32);
    Ok(js_recurrence(n, j, gamma)? / lead)
}
