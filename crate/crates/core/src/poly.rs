//! Dense integer polynomials and the horizontal generating polynomials
//! `M_n(s) = sum_j (2j)! {n, j}_1 s^j` and `L_n(s) = sum_j (2j)! {n, j}_{1/2} s^j`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::error::{LabError, Result};
use crate::gamma::GammaParam;
use crate::triangle::{modified_row, StirlingTriangle};

/// Polynomial with arbitrary-precision integer coefficients in ascending order.
/// The leading stored coefficient is never zero; the zero polynomial is empty.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntegerPolynomial {
    coeffs: Vec<Integer>,
}

impl IntegerPolynomial {
    pub fn new(mut coeffs: Vec<Integer>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        IntegerPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Integer::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Integer> {
        self.coeffs
    }

    /// Coefficient of `s^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> Integer {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Integer> {
        self.coeffs.last()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| Integer::from(c * k as u64))
                .collect(),
        )
    }

    pub fn scale(&self, factor: &Integer) -> Self {
        Self::new(self.coeffs.iter().map(|c| Integer::from(c * factor)).collect())
    }

    /// Multiplies by `s^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Integer::new(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs)
    }

    /// Exact division by `s`; the constant term must vanish.
    pub fn divide_by_s(&self) -> Result<Self> {
        match self.coeffs.first() {
            None => Ok(Self::zero()),
            Some(c) if *c != 0 => Err(LabError::Arithmetic("constant term is not zero".into())),
            Some(_) => Ok(Self::new(self.coeffs[1..].to_vec())),
        }
    }

    pub fn eval_integer(&self, x: &Integer) -> Integer {
        let mut acc = Integer::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_rational(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_float(&self, x: &rug::Float) -> rug::Float {
        let mut acc = rug::Float::new(x.prec());
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// Exact sign of `p(x)` using only integer arithmetic on the homogenized form.
    pub fn sign_at(&self, x: &Rational) -> Ordering {
        let (p, q) = (x.numer(), x.denom());
        let mut acc = Integer::new();
        let mut qpow = Integer::from(1);
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if k + 1 == self.coeffs.len() {
                acc = c.clone();
            } else {
                qpow *= q;
                acc *= p;
                acc += Integer::from(c * &qpow);
            }
        }
        acc.cmp0()
    }

    /// The `m`-th derivative at `s = 1`: `sum_j c_j j(j-1)...(j-m+1)`.
    pub fn derivative_at_one(&self, m: usize) -> Integer {
        self.coeffs
            .iter()
            .enumerate()
            .skip(m)
            .map(|(j, c)| {
                let mut falling = Integer::from(1);
                for t in 0..m {
                    falling *= (j - t) as u64;
                }
                falling * c
            })
            .sum()
    }

    /// `(p(1), p'(1), p''(1))`.
    pub fn derivatives_at_one(&self) -> (Integer, Integer, Integer) {
        (
            self.derivative_at_one(0),
            self.derivative_at_one(1),
            self.derivative_at_one(2),
        )
    }

    /// Non-negative gcd of the coefficients.
    pub fn content(&self) -> Integer {
        let mut g = Integer::new();
        for c in &self.coeffs {
            g.gcd_mut(c);
        }
        g
    }

    /// Divides out the content; keeps the sign of the leading coefficient.
    pub fn primitive(&self) -> Self {
        let g = self.content();
        if g == 0 || g == 1 {
            return self.clone();
        }
        Self::new(self.coeffs.iter().map(|c| Integer::from(c.div_exact_ref(&g))).collect())
    }

    /// `lc(d)^(deg self - deg d + 1) * self mod d`.
    pub fn pseudo_rem(&self, d: &Self) -> Self {
        let dd = d.degree().expect("pseudo-remainder by zero polynomial");
        let lc = d.leading().unwrap().clone();
        let mut r = self.clone();
        let Some(dr) = r.degree() else { return r };
        if dr < dd {
            return r;
        }
        let mut e = dr - dd + 1;
        while let Some(deg) = r.degree() {
            if deg < dd {
                break;
            }
            let lr = r.leading().unwrap().clone();
            r = r.scale(&lc) - d.shift_up(deg - dd).scale(&lr);
            e -= 1;
        }
        r.scale(&Integer::from((&lc).pow(e as u32)))
    }

    /// Primitive gcd with positive leading coefficient.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.primitive(), other.primitive());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive();
            a = b;
            b = r;
        }
        if a.leading().is_some_and(|c| *c < 0) {
            -a
        } else {
            a
        }
    }
}

impl Add for &IntegerPolynomial {
    type Output = IntegerPolynomial;

    fn add(self, rhs: Self) -> IntegerPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        IntegerPolynomial::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Add for IntegerPolynomial {
    type Output = IntegerPolynomial;

    fn add(self, rhs: Self) -> IntegerPolynomial {
        &self + &rhs
    }
}

impl Sub for &IntegerPolynomial {
    type Output = IntegerPolynomial;

    fn sub(self, rhs: Self) -> IntegerPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        IntegerPolynomial::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Sub for IntegerPolynomial {
    type Output = IntegerPolynomial;

    fn sub(self, rhs: Self) -> IntegerPolynomial {
        &self - &rhs
    }
}

impl Neg for IntegerPolynomial {
    type Output = IntegerPolynomial;

    fn neg(self) -> IntegerPolynomial {
        IntegerPolynomial::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl Mul for &IntegerPolynomial {
    type Output = IntegerPolynomial;

    fn mul(self, rhs: Self) -> IntegerPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntegerPolynomial::zero();
        }
        let mut out = vec![Integer::new(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += Integer::from(a * b);
            }
        }
        IntegerPolynomial::new(out)
    }
}

impl fmt::Display for IntegerPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let neg = *c < 0;
            let abs = Integer::from(c.abs_ref());
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (k, abs == 1) {
                (0, _) => write!(f, "{abs}")?,
                (1, true) => write!(f, "s")?,
                (1, false) => write!(f, "{abs}s")?,
                (_, true) => write!(f, "s^{k}")?,
                (_, false) => write!(f, "{abs}s^{k}")?,
            }
        }
        Ok(())
    }
}

/// `M_n` from `M_n = s (2 M_{n-1} + (10s + 2) M'_{n-1} + s(4s + 1) M''_{n-1})`, `M_0 = 1`.
pub fn build_m_recurrence(n: usize) -> Result<IntegerPolynomial> {
    if n > crate::triangle::DEFAULT_ROW_CAP {
        return Err(LabError::ResourceLimit {
            requested: n,
            cap: crate::triangle::DEFAULT_ROW_CAP,
        });
    }
    let lin = IntegerPolynomial::from_i64(&[2, 10]);
    let quad = IntegerPolynomial::from_i64(&[0, 1, 4]);
    let mut m = IntegerPolynomial::one();
    for _ in 0..n {
        let d1 = m.derivative();
        let d2 = d1.derivative();
        let inner = &(&m.scale(&Integer::from(2)) + &(&lin * &d1)) + &(&quad * &d2);
        m = inner.shift_up(1);
    }
    Ok(m)
}

/// `M_n` with coefficients read off the modified Legendre-Stirling triangle.
pub fn build_m_from_triangle(n: usize) -> Result<IntegerPolynomial> {
    Ok(IntegerPolynomial::new(modified_row(n)?))
}

/// `L_n(s) = sum_j (2j)! {n, j}_{1/2} s^j`.
pub fn build_l(n: usize) -> Result<IntegerPolynomial> {
    let t = StirlingTriangle::build(GammaParam::chebyshev(), n)?;
    Ok(l_from_triangle(&t, n))
}

fn l_from_triangle(t: &StirlingTriangle, n: usize) -> IntegerPolynomial {
    IntegerPolynomial::new(
        t.row(n)
            .unwrap()
            .iter()
            .enumerate()
            .map(|(j, v)| v.numer().clone() * Integer::from(Integer::factorial(2 * j as u32)))
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

/// Binomially weighted sum of `L` polynomials that reproduces `M_{2k+1}`
/// (odd) or `M_{2k}` (even).
pub fn connect_polynomials(k: usize, parity: Parity) -> Result<IntegerPolynomial> {
    let t = StirlingTriangle::build(GammaParam::chebyshev(), 2 * k + 1)?;
    let mut acc = IntegerPolynomial::zero();
    for mu in 0..=k {
        let (weight, idx) = match parity {
            Parity::Odd => (Integer::binomial_u(2 * k as u32 + 1, 2 * mu as u32 + 1), k + mu + 1),
            Parity::Even => (Integer::binomial_u(2 * k as u32, 2 * mu as u32), k + mu),
        };
        acc = &acc + &l_from_triangle(&t, idx).scale(&Integer::from(weight));
    }
    Ok(acc)
}

/// Location of the maximum of `(2j)! {n, j}_1`, `0 <= j <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnimodalMode {
    Peak(usize),
    /// Two adjacent equal maxima at `j` and `j + 1`.
    Plateau(usize, usize),
}

impl UnimodalMode {
    /// The mode as a real location (midpoint for a plateau).
    pub fn center(&self) -> f64 {
        match *self {
            UnimodalMode::Peak(j) => j as f64,
            UnimodalMode::Plateau(a, b) => (a + b) as f64 / 2.0,
        }
    }
}

/// Classifies an exact sequence as strictly increasing then strictly
/// decreasing, allowing one adjacent equal pair at the top.
pub fn classify_unimodal(seq: &[Integer]) -> std::result::Result<UnimodalMode, usize> {
    if seq.is_empty() {
        return Err(0);
    }
    let mut i = 0;
    while i + 1 < seq.len() && seq[i] < seq[i + 1] {
        i += 1;
    }
    let mode = if i + 1 < seq.len() && seq[i] == seq[i + 1] {
        i += 1;
        UnimodalMode::Plateau(i - 1, i)
    } else {
        UnimodalMode::Peak(i)
    };
    while i + 1 < seq.len() {
        if seq[i] <= seq[i + 1] {
            return Err(i + 1);
        }
        i += 1;
    }
    Ok(mode)
}

pub fn unimodality_report(n: usize) -> Result<UnimodalMode> {
    if n < 3 {
        return Err(LabError::Domain("unimodality is asserted for n >= 3".into()));
    }
    let row = modified_row(n)?;
    classify_unimodal(&row).map_err(|j| LabError::Unimodality { n, j })
}
