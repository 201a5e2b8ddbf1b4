//! Exact Sturm-sequence certification of the real zeros of `M_n`.
//!
//! `M_n(s) = s * q(s)`; the certificate isolates every zero of `q` inside the
//! open interval `(-1/4, 0)` using only integer and rational arithmetic.

use std::cmp::Ordering;

use rayon::prelude::*;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::poly::{build_m_from_triangle, IntegerPolynomial};

/// Sturm chain `p, p', -rem(p, p'), ...`, kept primitive. Each step divides
/// out only positive factors so the sign pattern is preserved.
pub fn sturm_chain(p: &IntegerPolynomial) -> Vec<IntegerPolynomial> {
    let mut chain = vec![p.primitive()];
    let d = p.derivative().primitive();
    if d.is_zero() {
        return chain;
    }
    chain.push(d);
    loop {
        let a = &chain[chain.len() - 2];
        let b = &chain[chain.len() - 1];
        let prem = a.pseudo_rem(b);
        if prem.is_zero() {
            break;
        }
        let delta = a.degree().unwrap() - b.degree().unwrap();
        let lc_negative = *b.leading().unwrap() < 0;
        // prem = lc(b)^(delta+1) * rem; flip when that factor is positive.
        let factor_positive = !lc_negative || (delta + 1) % 2 == 0;
        let next = if factor_positive { -prem } else { prem };
        chain.push(next.primitive());
    }
    chain
}

fn count_changes(signs: impl Iterator<Item = Ordering>) -> usize {
    let mut last = Ordering::Equal;
    let mut changes = 0;
    for s in signs {
        if s == Ordering::Equal {
            continue;
        }
        if last != Ordering::Equal && s != last {
            changes += 1;
        }
        last = s;
    }
    changes
}

pub fn sign_changes_at(chain: &[IntegerPolynomial], x: &Rational) -> usize {
    count_changes(chain.iter().map(|p| p.sign_at(x)))
}

fn sign_changes_at_infinity(chain: &[IntegerPolynomial], positive: bool) -> usize {
    count_changes(chain.iter().map(|p| {
        let lc = p.leading().map_or(Ordering::Equal, |c| c.cmp0());
        if positive || p.degree().unwrap_or(0) % 2 == 0 {
            lc
        } else {
            lc.reverse()
        }
    }))
}

/// Number of distinct real zeros in `(lo, hi)`; neither endpoint may be a zero.
pub fn count_roots_between(chain: &[IntegerPolynomial], lo: &Rational, hi: &Rational) -> usize {
    sign_changes_at(chain, lo) - sign_changes_at(chain, hi)
}

/// Number of distinct real zeros.
pub fn count_real_roots(chain: &[IntegerPolynomial]) -> usize {
    sign_changes_at_infinity(chain, false) - sign_changes_at_infinity(chain, true)
}

/// Isolating intervals for the zeros of `p` in `(lo, hi)`, sorted ascending.
/// Each returned open interval holds exactly one zero and its endpoints are
/// not zeros of `p`.
pub fn isolate(p: &IntegerPolynomial, lo: &Rational, hi: &Rational) -> Vec<(Rational, Rational)> {
    let chain = sturm_chain(p);
    let mut out = Vec::new();
    let mut stack = vec![(lo.clone(), hi.clone(), count_roots_between(&chain, lo, hi))];
    while let Some((a, b, count)) = stack.pop() {
        match count {
            0 => {}
            1 => out.push((a, b)),
            _ => {
                let mut mid = Rational::from(&a + &b) / 2u32;
                let mut k = 3u32;
                while p.sign_at(&mid) == Ordering::Equal {
                    mid = &a + Rational::from(&b - &a) / k;
                    k += 1;
                }
                let left = count_roots_between(&chain, &a, &mid);
                stack.push((mid.clone(), b, count - left));
                stack.push((a, mid, left));
            }
        }
    }
    out.sort_by(|x, y| x.0.cmp(&y.0));
    out
}

/// Certified location of the zeros of `M_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootCertificate {
    pub n: usize,
    /// Open isolating intervals for the nonzero zeros, ascending.
    pub isolating_intervals: Vec<(Rational, Rational)>,
    /// Sign of `M_n(-1/4)`.
    pub sign_at_quarter: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub n: usize,
    pub intervals: Vec<[String; 2]>,
    pub sign_at_quarter: i32,
}

impl RootCertificate {
    /// Interval closest to `-1/4`, if any.
    pub fn leftmost(&self) -> Option<&(Rational, Rational)> {
        self.isolating_intervals.first()
    }

    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            n: self.n,
            intervals: self
                .isolating_intervals
                .iter()
                .map(|(a, b)| [a.to_string(), b.to_string()])
                .collect(),
            sign_at_quarter: self.sign_at_quarter,
        }
    }

    pub fn from_json(json: &CertificateJson) -> Result<Self> {
        let parse = |s: &str| {
            s.parse::<Rational>()
                .map_err(|_| LabError::Parse(format!("bad rational {s:?}")))
        };
        Ok(RootCertificate {
            n: json.n,
            isolating_intervals: json
                .intervals
                .iter()
                .map(|[a, b]| Ok((parse(a)?, parse(b)?)))
                .collect::<Result<_>>()?,
            sign_at_quarter: json.sign_at_quarter,
        })
    }
}

fn fail(n: usize, clause: impl Into<String>) -> LabError {
    LabError::Certification { n, clause: clause.into() }
}

fn quarter() -> Rational {
    Rational::from((-1, 4))
}

/// Certifies that `M_n` has `n` real simple zeros in `(-1/4, 0]`.
pub fn certify_roots(n: usize) -> Result<RootCertificate> {
    if n == 0 {
        return Err(LabError::Domain("root certification needs n >= 1".into()));
    }
    let m = build_m_from_triangle(n)?;
    certify_polynomial(n, &m)
}

/// Certification for an explicitly supplied `M_n`.
pub fn certify_polynomial(n: usize, m: &IntegerPolynomial) -> Result<RootCertificate> {
    if m.degree() != Some(n) {
        return Err(fail(n, format!("degree is {:?}, expected {n}", m.degree())));
    }
    let q = m.divide_by_s().map_err(|_| fail(n, "M_n(0) != 0"))?;
    let zero = Rational::new();
    if q.sign_at(&zero) == Ordering::Equal {
        return Err(fail(n, "zero at s = 0 is not simple"));
    }
    let quarter_sign = match m.sign_at(&quarter()) {
        Ordering::Less => -1,
        Ordering::Greater => 1,
        Ordering::Equal => return Err(fail(n, "M_n(-1/4) = 0")),
    };
    let expected_sign = if n.is_multiple_of(2) { 1 } else { -1 };
    if quarter_sign != expected_sign {
        return Err(fail(n, format!("sign of M_n(-1/4) is {quarter_sign}, expected {expected_sign}")));
    }
    if q.degree().unwrap_or(0) > 0 && q.gcd(&q.derivative()).degree() != Some(0) {
        return Err(fail(n, "M_n/s is not squarefree"));
    }
    let chain = sturm_chain(&q);
    let total = count_real_roots(&chain);
    if total != n - 1 {
        return Err(fail(n, format!("{total} real zeros of M_n/s, expected {}", n - 1)));
    }
    let inside = count_roots_between(&chain, &quarter(), &zero);
    if inside != n - 1 {
        return Err(fail(n, format!("{inside} zeros in (-1/4, 0), expected {}", n - 1)));
    }
    let intervals = isolate(&q, &quarter(), &zero);
    if intervals.len() != n - 1 {
        return Err(fail(n, format!("isolated {} intervals, expected {}", intervals.len(), n - 1)));
    }
    for w in intervals.windows(2) {
        if w[0].1 > w[1].0 {
            return Err(fail(n, "isolating intervals overlap"));
        }
    }
    Ok(RootCertificate {
        n,
        isolating_intervals: intervals,
        sign_at_quarter: quarter_sign,
    })
}

/// Bisects every certified interval until its width is below `2^-bits` and
/// returns the midpoints. The zero at `s = 0` is not included.
pub fn refine_roots(cert: &RootCertificate, bits: u32) -> Result<Vec<Float>> {
    if cert.isolating_intervals.is_empty() {
        return Ok(Vec::new());
    }
    let q = build_m_from_triangle(cert.n)?.divide_by_s()?;
    let width = Rational::from((Integer::from(1), Integer::from(1) << bits));
    let prec = bits + 16;
    cert.isolating_intervals
        .par_iter()
        .map(|(lo, hi)| {
            let (mut a, mut b) = (lo.clone(), hi.clone());
            let sa = q.sign_at(&a);
            if sa == Ordering::Equal || sa == q.sign_at(&b) {
                return Err(fail(cert.n, "refinement interval has no sign change"));
            }
            while Rational::from(&b - &a) >= width {
                let mid = Rational::from(&a + &b) / 2u32;
                match q.sign_at(&mid) {
                    Ordering::Equal => return Ok(Float::with_val(prec, &mid)),
                    s if s == sa => a = mid,
                    _ => b = mid,
                }
            }
            Ok(Float::with_val(prec, Rational::from(&a + &b) / 2u32))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_counts_simple_roots() {
        // (s - 1)(s - 2)(s + 3)
        let p = IntegerPolynomial::from_i64(&[6, -7, 0, 1]);
        let chain = sturm_chain(&p);
        assert_eq!(count_real_roots(&chain), 3);
        assert_eq!(count_roots_between(&chain, &Rational::from(0), &Rational::from(5)), 2);
        let iv = isolate(&p, &Rational::from(-10), &Rational::from(10));
        assert_eq!(iv.len(), 3);
        // s^2 + 1
        let chain = sturm_chain(&IntegerPolynomial::from_i64(&[1, 0, 1]));
        assert_eq!(count_real_roots(&chain), 0);
    }

    #[test]
    fn isolate_handles_rational_midpoint_roots() {
        // zero exactly at 0 = midpoint of (-1, 1) and another at 1/2
        let p = IntegerPolynomial::from_i64(&[0, -1, 2]);
        let iv = isolate(&p, &Rational::from(-1), &Rational::from(1));
        assert_eq!(iv.len(), 2);
        for (a, b) in &iv {
            assert_ne!(p.sign_at(a), Ordering::Equal);
            assert_ne!(p.sign_at(b), Ordering::Equal);
        }
    }

    #[test]
    fn certificate_n1_n2_n3() {
        let c1 = certify_roots(1).unwrap();
        assert!(c1.isolating_intervals.is_empty());
        assert_eq!(c1.sign_at_quarter, -1);
        assert!(refine_roots(&c1, 64).unwrap().is_empty());

        let c2 = certify_roots(2).unwrap();
        assert_eq!(c2.isolating_intervals.len(), 1);
        let (a, b) = &c2.isolating_intervals[0];
        let sixth = Rational::from((-1, 6));
        assert!(*a < sixth && sixth < *b);
        assert_eq!(c2.sign_at_quarter, 1);

        let c3 = certify_roots(3).unwrap();
        assert_eq!(c3.isolating_intervals.len(), 2);
        let roots = refine_roots(&c3, 64).unwrap();
        let r0 = roots[0].to_f64();
        let r1 = roots[1].to_f64();
        assert!((r0 + 0.2150).abs() < 1e-3 && (r1 + 0.0517).abs() < 1e-3, "{r0} {r1}");
    }

    #[test]
    fn refine_n2_is_minus_sixth() {
        let c2 = certify_roots(2).unwrap();
        let r = refine_roots(&c2, 64).unwrap();
        let err = Float::with_val(128, &r[0] + Rational::from((1, 6))).abs();
        assert!(err < Float::with_val(128, Float::i_exp(1, -64)));
    }

    #[test]
    fn refine_n3_matches_vieta() {
        let r = refine_roots(&certify_roots(3).unwrap(), 64).unwrap();
        let sum = Float::with_val(128, &r[0] + &r[1]);
        let err = Float::with_val(128, sum + Rational::from((24, 90))).abs();
        assert!(err < Float::with_val(128, Float::i_exp(1, -60)));
    }

    #[test]
    fn rejects_bad_polynomial() {
        let not_real = IntegerPolynomial::from_i64(&[0, 1, 0, 1]);
        assert!(matches!(certify_polynomial(3, &not_real), Err(LabError::Certification { .. })));
        assert!(certify_polynomial(2, &IntegerPolynomial::from_i64(&[1, 1, 1])).is_err());
        assert!(certify_roots(0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = certify_roots(5).unwrap();
        let json = serde_json::to_string(&c.to_json()).unwrap();
        assert!(json.contains("\"sign_at_quarter\":-1"));
        let back: CertificateJson = serde_json::from_str(&json).unwrap();
        assert_eq!(RootCertificate::from_json(&back).unwrap(), c);
    }
}
