//! Laplace integrals `I_{r,n}(z) = int_0^inf e^{-xi z} xi^r ((xi+1)^n + (xi-1)^n) dxi`
//! in exact closed form, the Eisenstein-type lattice sums built from them, and
//! the saddle-point coefficients of `I_{n+nu,n}`.
//!
//! Integrating the binomially expanded integrand term by term gives
//! `I_{r,n}(z) = sum_{k even} 2 C(n,k) (r+n-k)! / z^(r+n-k+1)`, so nothing here
//! is ever evaluated by quadrature.

use std::fmt::Write as _;

use rug::ops::Pow;
use rug::{Complex, Float, Integer};

use crate::error::{LabError, Result};
use crate::hp::{fmt_float, pi};
use crate::zeta::zeta_half;

/// Default truncation `|m| <= 16` of the lattice sums.
pub const DEFAULT_M_MAX: u32 = 16;

/// `sum_k c_k / z^(e_k)` with exponents strictly decreasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaplaceClosedForm {
    pub r: usize,
    pub n: usize,
    pub terms: Vec<(Integer, u32)>,
}

/// Closed form of `I_{r,n}`.
pub fn laplace_closed_form(r: usize, n: usize) -> LaplaceClosedForm {
    let terms = (0..=n)
        .step_by(2)
        .map(|k| {
            let c = Integer::from(Integer::binomial_u(n as u32, k as u32))
                * Integer::from(Integer::factorial((r + n - k) as u32))
                * 2u32;
            (c, (r + n - k + 1) as u32)
        })
        .collect();
    LaplaceClosedForm { r, n, terms }
}

/// Symbolic `d/dz` of a term list: `c z^-e -> -e c z^-(e+1)`.
pub fn differentiate_terms(terms: &[(Integer, u32)]) -> Vec<(Integer, u32)> {
    terms
        .iter()
        .map(|(c, e)| (Integer::from(c * *e) * -1i32, e + 1))
        .collect()
}

/// Checks `I_{r,n}^(order) = (-1)^order I_{r+order,n}` by exact comparison of
/// term lists.
pub fn laplace_derivative_check(r: usize, n: usize, order: usize) -> bool {
    let mut terms = laplace_closed_form(r, n).terms;
    for _ in 0..order {
        terms = differentiate_terms(&terms);
    }
    let target: Vec<(Integer, u32)> = laplace_closed_form(r + order, n)
        .terms
        .into_iter()
        .map(|(c, e)| (if order % 2 == 1 { -c } else { c }, e))
        .collect();
    terms == target
}

impl LaplaceClosedForm {
    pub fn eval_real(&self, z: &Float) -> Float {
        let prec = z.prec();
        let inv = Float::with_val(prec, z.recip_ref());
        let mut acc = Float::new(prec);
        // ascending exponents; consecutive ones differ by 2
        let mut pw: Option<Float> = None;
        for (c, e) in self.terms.iter().rev() {
            let p = match pw.take() {
                None => Float::with_val(prec, (&inv).pow(*e)),
                Some(prev) => prev * Float::with_val(prec, inv.square_ref()),
            };
            acc += Float::with_val(prec, &p * c);
            pw = Some(p);
        }
        acc
    }

    pub fn eval_complex(&self, z: &Complex) -> Complex {
        let prec = z.prec();
        let inv = Complex::with_val(prec, z.recip_ref());
        let inv2 = Complex::with_val(prec, inv.square_ref());
        let mut acc = Complex::new(prec);
        let mut pw: Option<Complex> = None;
        for (c, e) in self.terms.iter().rev() {
            let p = match pw.take() {
                None => Complex::with_val(prec, (&inv).pow(*e)),
                Some(prev) => prev * &inv2,
            };
            acc += Complex::with_val(prec, &p * c);
            pw = Some(p);
        }
        acc
    }
}

/// `I_{r,n}(z)` at real `z > 0`.
pub fn laplace_real(r: usize, n: usize, z: &Float) -> Float {
    laplace_closed_form(r, n).eval_real(z)
}

/// `f(w) = sinh w / (cosh w - 1)`.
pub fn f_of(w: &Float) -> Float {
    let prec = w.prec();
    let c = Float::with_val(prec, w.cosh_ref()) - 1u32;
    Float::with_val(prec, w.sinh_ref()) / c
}

/// `g(w) = 1 / (2 (cosh w - 1))`.
pub fn g_of(w: &Float) -> Float {
    let prec = w.prec();
    let c = Float::with_val(prec, w.cosh_ref()) - 1u32;
    Float::with_val(prec, c * 2u32).recip()
}

/// Upper bound `2 zeta((r+1)/2) (w / 4pi)^((r+1)/2)` on the relative
/// contribution of all lattice terms `m != 0` to `sum_m I_{r,n}(w + 2 pi i m)`.
pub fn tail_bound(r: usize, w: &Float) -> Result<Float> {
    if r < 2 {
        return Err(LabError::Domain(format!("tail bound needs r >= 2, got {r}")));
    }
    if *w <= 0 {
        return Err(LabError::Domain("tail bound needs w > 0".into()));
    }
    let prec = w.prec();
    let zeta = zeta_half(r as u32 + 1, prec)?;
    let ratio = Float::with_val(prec, w / pi(prec)) / 4u32;
    let expo = Float::with_val(prec, r as u32 + 1) / 2u32;
    Ok(zeta * ratio.pow(expo) * 2u32)
}

/// Lattice sum `sum_{|m| <= m_max} F(w + 2 pi i m)`, reduced in the fixed
/// order `m = 0, 1, -1, 2, -2, ...`. Returns the sum and the largest
/// `|Im|/|Re|` seen over the partial sums completed after each pair.
fn lattice_sum(w: &Float, m_max: u32, term: impl Fn(&Complex) -> Complex) -> (Complex, Float) {
    let prec = w.prec();
    let two_pi = Float::with_val(prec, pi(prec) * 2u32);
    let mut acc = term(&Complex::with_val(prec, (w, 0)));
    let mut worst = Float::new(prec);
    for m in 1..=m_max {
        let im = Float::with_val(prec, &two_pi * m);
        acc += term(&Complex::with_val(prec, (w, &im)));
        acc += term(&Complex::with_val(prec, (w, -im)));
        let rel = Float::with_val(prec, acc.imag().abs_ref()) / Float::with_val(prec, acc.real().abs_ref());
        if rel > worst {
            worst = rel;
        }
    }
    (acc, worst)
}

/// Result of a truncated Eisenstein-type sum.
#[derive(Debug, Clone)]
pub struct EisensteinSum {
    /// Real part of the scaled truncated sum.
    pub value: Float,
    /// Largest relative imaginary part over the pairwise partial sums.
    pub imag_residual: Float,
    /// Relative bound on the `m != 0` lattice contribution, where defined.
    pub tail_bound: Option<Float>,
    pub m_max: u32,
}

fn check_w(w: &Float) -> Result<()> {
    if *w <= 0 {
        Err(LabError::Domain(format!("w must be positive, got {w}")))
    } else {
        Ok(())
    }
}

/// `(2n)! (2(cosh w - 1)/sinh w) sum_{|m| <= m_max} (w + 2 pi i m)^-(2n+1)`,
/// which approximates `L_n(g(w))`.
pub fn eisenstein_l(n: usize, w: &Float, m_max: u32) -> Result<EisensteinSum> {
    check_w(w)?;
    if n == 0 {
        return Err(LabError::Domain("eisenstein_l needs n >= 1".into()));
    }
    let prec = w.prec();
    let e = 2 * n as i32 + 1;
    let (sum, worst) = lattice_sum(w, m_max, |z| Complex::with_val(prec, z.pow(-e)));
    let scale = Float::with_val(prec, Integer::from(Integer::factorial(2 * n as u32))) * 2u32 / f_of(w);
    Ok(EisensteinSum {
        value: Float::with_val(prec, sum.real() * &scale),
        imag_residual: worst,
        tail_bound: Some(tail_bound(2 * n, w)?),
        m_max,
    })
}

/// `((cosh w - 1)/sinh w) sum_{|m| <= m_max} I_{r,n}(w + 2 pi i m)`.
pub fn eisenstein_i(r: usize, n: usize, w: &Float, m_max: u32) -> Result<EisensteinSum> {
    check_w(w)?;
    let prec = w.prec();
    let form = laplace_closed_form(r, n);
    let (sum, worst) = lattice_sum(w, m_max, |z| form.eval_complex(z));
    Ok(EisensteinSum {
        value: Float::with_val(prec, sum.real() / f_of(w)),
        imag_residual: worst,
        tail_bound: tail_bound(r, w).ok(),
        m_max,
    })
}

/// Truncated lattice sum approximating `M_n(g(w))`.
pub fn eisenstein_m(n: usize, w: &Float, m_max: u32) -> Result<EisensteinSum> {
    if n == 0 {
        return Err(LabError::Domain("eisenstein_m needs n >= 1".into()));
    }
    eisenstein_i(n, n, w, m_max)
}

/// Leading saddle-point coefficients of `I_{n+nu,n}(z)`.
#[derive(Debug, Clone)]
pub struct SaddleCoefficients {
    pub nu: usize,
    pub z: Float,
    /// `cosh(z/2)`.
    pub b: Float,
    /// `-(1/8)((z^2/2) cosh(z/2) + 2 z nu sinh(z/2) + (2nu^2 + 2nu + 1) cosh(z/2))`.
    pub b_nu: Float,
}

pub fn saddle_coefficients(nu: usize, z: &Float) -> SaddleCoefficients {
    let prec = z.prec();
    let half = Float::with_val(prec, z / 2u32);
    let ch = Float::with_val(prec, half.cosh_ref());
    let sh = Float::with_val(prec, half.sinh_ref());
    let nu64 = nu as u64;
    let t1 = Float::with_val(prec, z.square_ref()) / 2u32 * &ch;
    let t2 = Float::with_val(prec, z * &sh) * (2 * nu64);
    let t3 = Float::with_val(prec, &ch * (2 * nu64 * nu64 + 2 * nu64 + 1));
    let b_nu = -(t1 + t2 + t3) / 8u32;
    SaddleCoefficients {
        nu,
        z: z.clone(),
        b: ch,
        b_nu,
    }
}

/// One row of a saddle convergence report.
#[derive(Debug, Clone)]
pub struct SaddleRow {
    pub n: usize,
    /// `I_{n+nu,n}(z) sqrt(pi n) (z/2)^(2n+nu+1) / (n! (n+nu)!)`.
    pub q: Float,
    pub q_minus_b: Float,
    /// `n (Q - b)`.
    pub scaled: Float,
    /// `n (Q - b) - b_nu`.
    pub residual: Float,
    /// `Q - b - b_nu / n`.
    pub second_order: Float,
    pub tail_bound: Float,
}

#[derive(Debug, Clone)]
pub struct SaddleReport {
    pub coefficients: SaddleCoefficients,
    pub precision_bits: u32,
    pub rows: Vec<SaddleRow>,
}

impl SaddleReport {
    /// `n, Q, Q-b, n(Q-b), n(Q-b)-b_nu, tail_bound`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,Q,Q_minus_b,n_Q_minus_b,n_Q_minus_b_minus_b_nu,tail_bound\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                r.n,
                fmt_float(&r.q, 20),
                fmt_float(&r.q_minus_b, 20),
                fmt_float(&r.scaled, 20),
                fmt_float(&r.residual, 20),
                fmt_float(&r.tail_bound, 20)
            );
        }
        s
    }
}

/// Normalized `Q(n)` at the given precision.
pub fn saddle_q(nu: usize, n: usize, z: &Float) -> Float {
    let prec = z.prec();
    let i = laplace_real(n + nu, n, z);
    let half = Float::with_val(prec, z / 2u32);
    let scale = half.pow((2 * n + nu + 1) as u32);
    let root = Float::with_val(prec, pi(prec) * n as u64).sqrt();
    let denom = Float::with_val(prec, Integer::from(Integer::factorial(n as u32)))
        * Float::with_val(prec, Integer::from(Integer::factorial((n + nu) as u32)));
    i * scale * root / denom
}

/// Maximum precision the saddle check escalates to.
pub const MAX_SADDLE_PRECISION: u32 = 1024;

fn saddle_row(nu: usize, n: usize, z: &Float, coeffs: &SaddleCoefficients) -> Result<SaddleRow> {
    let prec = z.prec();
    let q = saddle_q(nu, n, z);
    let q_minus_b = Float::with_val(prec, &q - &coeffs.b);
    let scaled = Float::with_val(prec, &q_minus_b * n as u64);
    let residual = Float::with_val(prec, &scaled - &coeffs.b_nu);
    let second_order = Float::with_val(prec, &coeffs.b_nu / n as u64);
    let second_order = Float::with_val(prec, &q_minus_b - second_order);
    Ok(SaddleRow {
        n,
        q,
        q_minus_b,
        scaled,
        residual,
        second_order,
        tail_bound: tail_bound(n + nu, z)?,
    })
}

/// Compares `Q(n)` with `b + b_nu / n` along `n_list`. Each residual is
/// recomputed 64 bits higher; when the two disagree beyond half the working
/// precision the whole report is redone at up to 1024 bits.
pub fn saddle_convergence_check(nu: usize, z: &Float, n_list: &[usize]) -> Result<SaddleReport> {
    if *z <= 0 {
        return Err(LabError::Domain("saddle check needs z > 0".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) || n_list.first() == Some(&0) {
        return Err(LabError::Domain("n_list must be ascending and positive".into()));
    }
    let mut prec = z.prec().max(64);
    loop {
        let zp = Float::with_val(prec, z);
        let zq = Float::with_val(prec + 64, z);
        let coeffs = saddle_coefficients(nu, &zp);
        let coeffs_hi = saddle_coefficients(nu, &zq);
        let mut rows = Vec::with_capacity(n_list.len());
        let mut ok = true;
        for &n in n_list {
            let row = saddle_row(nu, n, &zp, &coeffs)?;
            let hi = saddle_row(nu, n, &zq, &coeffs_hi)?;
            let diff = Float::with_val(prec + 64, &hi.residual - &row.residual).abs();
            let tol = Float::with_val(prec + 64, hi.residual.abs_ref())
                * crate::hp::pow2(prec + 64, -(prec as i32) / 2);
            if diff > tol {
                ok = false;
                break;
            }
            rows.push(row);
        }
        if ok {
            return Ok(SaddleReport {
                coefficients: coeffs,
                precision_bits: prec,
                rows,
            });
        }
        if prec >= MAX_SADDLE_PRECISION {
            return Err(LabError::PrecisionInsufficient {
                bits: prec,
                detail: "saddle residual unstable under precision increase".into(),
            });
        }
        prec = MAX_SADDLE_PRECISION;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clt::omega;

    fn terms(t: &[(i64, u32)]) -> Vec<(Integer, u32)> {
        t.iter().map(|&(c, e)| (Integer::from(c), e)).collect()
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(laplace_closed_form(0, 0).terms, terms(&[(2, 1)]));
        assert_eq!(laplace_closed_form(1, 1).terms, terms(&[(4, 3)]));
        assert_eq!(laplace_closed_form(2, 2).terms, terms(&[(48, 5), (4, 3)]));
    }

    #[test]
    fn derivative_examples() {
        assert!(laplace_derivative_check(0, 0, 1));
        assert!(laplace_derivative_check(2, 2, 1));
        assert!(laplace_derivative_check(1, 3, 2));
        assert!(laplace_derivative_check(4, 4, 0));
    }

    #[test]
    fn real_and_complex_evaluation_agree() {
        let z = Float::with_val(128, 1.5);
        let f = laplace_closed_form(3, 4);
        let real = f.eval_real(&z);
        let c = f.eval_complex(&Complex::with_val(128, (&z, 0)));
        assert!(Float::with_val(128, c.real() - &real).abs() < 1e-30);
        // 2 * (7!/z^8 + 6 * 5!/z^6 + 3!/z^4)
        let expect = 2.0 * (5040.0 / 1.5f64.powi(8) + 720.0 / 1.5f64.powi(6) + 6.0 / 1.5f64.powi(4));
        assert!((real.to_f64() - expect).abs() < 1e-9);
    }

    #[test]
    fn saddle_coefficient_values() {
        let w = omega(256);
        let c = saddle_coefficients(3, &w);
        let sqrt5_half = Float::with_val(256, 5).sqrt() / 2u32;
        assert!(Float::with_val(256, &c.b - sqrt5_half).abs() < Float::with_val(256, Float::i_exp(1, -250)));

        let z = Float::with_val(128, 0.7);
        let c0 = saddle_coefficients(0, &z);
        let direct = -(0.7f64 * 0.7 / 2.0 + 1.0) * (0.35f64).cosh() / 8.0;
        assert!((c0.b_nu.to_f64() - direct).abs() < 1e-15);

        let c1 = saddle_coefficients(1, &Float::with_val(128, 2));
        let direct = -(2.0 * 1f64.cosh() + 4.0 * 1f64.sinh() + 5.0 * 1f64.cosh()) / 8.0;
        assert!((c1.b_nu.to_f64() - direct).abs() < 1e-14);
    }

    #[test]
    fn tail_bound_values() {
        let w = omega(256);
        let b2 = tail_bound(2, &w).unwrap().to_f64();
        assert!((b2 - 0.111).abs() < 5e-4, "{b2}");
        let b10 = tail_bound(10, &w).unwrap().to_f64();
        assert!((b10 - 1.495e-6).abs() < 5e-9, "{b10}");
        assert!(tail_bound(1, &w).is_err());
        let small = tail_bound(2, &Float::with_val(256, 1e-3)).unwrap();
        let smaller = tail_bound(2, &Float::with_val(256, 1e-4)).unwrap();
        assert!(smaller < small && small < b2);
    }
}
