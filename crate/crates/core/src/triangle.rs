//! Memoized triangles built row by row from the triangular recurrences.
//!
//! Rows are appended by a single writer; a finished triangle is immutable and
//! can be shared between readers.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;
use rug::{Integer, Rational};

use crate::error::{LabError, Result};
use crate::gamma::GammaParam;

/// Default bound on the number of rows a triangle may hold.
pub const DEFAULT_ROW_CAP: usize = 2000;

// Rows shorter than this are built sequentially.
const PAR_ROW_MIN: usize = 96;

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(LabError::ResourceLimit { requested: n, cap })
    } else {
        Ok(())
    }
}

/// Jacobi-Stirling numbers of the second kind `{n, j}_gamma` for a fixed gamma.
#[derive(Debug, Clone, PartialEq)]
pub struct StirlingTriangle {
    gamma: GammaParam,
    rows: Vec<Vec<Rational>>,
    row_cap: usize,
}

impl StirlingTriangle {
    pub fn new(gamma: GammaParam) -> Self {
        Self::with_cap(gamma, DEFAULT_ROW_CAP)
    }

    pub fn with_cap(gamma: GammaParam, row_cap: usize) -> Self {
        StirlingTriangle {
            gamma,
            rows: vec![vec![Rational::from(1)]],
            row_cap,
        }
    }

    /// Triangle with rows `0..=max_n`.
    pub fn build(gamma: GammaParam, max_n: usize) -> Result<Self> {
        let mut t = Self::new(gamma);
        t.extend_to(max_n)?;
        Ok(t)
    }

    /// Rebuilds a triangle from externally supplied rows, checking every
    /// boundary value and every recurrence step.
    pub fn from_rows(gamma: GammaParam, rows: Vec<Vec<Rational>>) -> Result<Self> {
        let mut t = StirlingTriangle {
            gamma,
            rows: vec![vec![Rational::from(1)]],
            row_cap: DEFAULT_ROW_CAP,
        };
        if rows.is_empty() || rows[0] != t.rows[0] {
            return Err(LabError::Invariant("row 0 must be [1]".into()));
        }
        check_cap(rows.len() - 1, t.row_cap)?;
        for (n, row) in rows.into_iter().enumerate().skip(1) {
            let expected = t.next_row();
            if row != expected {
                return Err(LabError::Invariant(format!("row {n} violates the recurrence")));
            }
            t.rows.push(row);
        }
        Ok(t)
    }

    pub fn gamma(&self) -> &GammaParam {
        &self.gamma
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn row_cap(&self) -> usize {
        self.row_cap
    }

    fn next_row(&self) -> Vec<Rational> {
        let prev = self.rows.last().expect("row 0 always present");
        let n = self.rows.len();
        let entry = |j: usize| -> Rational {
            if j == 0 {
                return Rational::new();
            }
            let mut v = prev[j - 1].clone();
            if j < prev.len() {
                v += self.gamma.weight(j) * &prev[j];
            }
            v
        };
        if n + 1 >= PAR_ROW_MIN {
            (0..=n).into_par_iter().map(entry).collect()
        } else {
            (0..=n).map(entry).collect()
        }
    }

    /// Appends rows until `max_n() >= n`.
    pub fn extend_to(&mut self, n: usize) -> Result<()> {
        check_cap(n, self.row_cap)?;
        while self.max_n() < n {
            let row = self.next_row();
            self.rows.push(row);
        }
        Ok(())
    }

    /// `{n, j}`, or `None` when row `n` has not been built.
    pub fn get(&self, n: usize, j: usize) -> Option<Rational> {
        let row = self.rows.get(n)?;
        Some(row.get(j).cloned().unwrap_or_default())
    }

    pub fn row(&self, n: usize) -> Option<&[Rational]> {
        self.rows.get(n).map(Vec::as_slice)
    }

    /// `(n, j, value)` for `0 <= j <= n <= max_n`, in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(n, row)| row.iter().enumerate().map(move |(j, v)| (n, j, v)))
    }
}

fn triangle_cache() -> &'static Mutex<HashMap<GammaParam, StirlingTriangle>> {
    static CACHE: OnceLock<Mutex<HashMap<GammaParam, StirlingTriangle>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `{n, j}_gamma` from the triangular recurrence. The triangle for `gamma` is
/// memoized process-wide up to the largest `n` requested so far.
pub fn js_recurrence(n: usize, j: usize, gamma: &GammaParam) -> Result<Rational> {
    check_cap(n, DEFAULT_ROW_CAP)?;
    let mut cache = triangle_cache().lock().expect("triangle cache poisoned");
    let tri = cache
        .entry(gamma.clone())
        .or_insert_with(|| StirlingTriangle::new(gamma.clone()));
    tri.extend_to(n)?;
    Ok(tri.get(n, j).expect("row built above"))
}

/// Modified Legendre-Stirling numbers `(2j)! {n, j}_1`, built from their own
/// integer recurrence `m(n,j) = 2j(2j-1) m(n-1,j-1) + j(j+1) m(n-1,j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModifiedTriangle {
    rows: Vec<Vec<Integer>>,
}

/// Next row of the modified triangle.
pub fn modified_next_row(prev: &[Integer]) -> Vec<Integer> {
    modified_next(prev)
}

fn modified_next(prev: &[Integer]) -> Vec<Integer> {
    let n = prev.len();
    let entry = |j: usize| -> Integer {
        if j == 0 {
            return Integer::new();
        }
        let j64 = j as u64;
        let mut v = Integer::from(&prev[j - 1] * (2 * j64 * (2 * j64 - 1)));
        if j < prev.len() {
            v += Integer::from(&prev[j] * (j64 * (j64 + 1)));
        }
        v
    };
    if n + 1 >= PAR_ROW_MIN {
        (0..=n).into_par_iter().map(entry).collect()
    } else {
        (0..=n).map(entry).collect()
    }
}

impl ModifiedTriangle {
    pub fn build(max_n: usize) -> Result<Self> {
        check_cap(max_n, DEFAULT_ROW_CAP)?;
        let mut rows = vec![vec![Integer::from(1)]];
        for _ in 0..max_n {
            let next = modified_next(rows.last().unwrap());
            rows.push(next);
        }
        Ok(ModifiedTriangle { rows })
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn get(&self, n: usize, j: usize) -> Option<Integer> {
        let row = self.rows.get(n)?;
        Some(row.get(j).cloned().unwrap_or_default())
    }

    pub fn row(&self, n: usize) -> Option<&[Integer]> {
        self.rows.get(n).map(Vec::as_slice)
    }
}

/// Row `n` of the modified triangle without retaining the earlier rows.
pub fn modified_row(n: usize) -> Result<Vec<Integer>> {
    check_cap(n, DEFAULT_ROW_CAP)?;
    let mut row = vec![Integer::from(1)];
    for _ in 0..n {
        row = modified_next(&row);
    }
    Ok(row)
}

/// Rows of the modified triangle at each `n` in `ns`, from a single rolling pass.
pub fn modified_rows_at(ns: &[usize]) -> Result<Vec<Vec<Integer>>> {
    let max = ns.iter().copied().max().unwrap_or(0);
    check_cap(max, DEFAULT_ROW_CAP)?;
    let mut out = vec![Vec::new(); ns.len()];
    let mut row = vec![Integer::from(1)];
    for n in 0..=max {
        if n > 0 {
            row = modified_next(&row);
        }
        for (slot, _) in ns.iter().enumerate().filter(|(_, &m)| m == n) {
            out[slot] = row.clone();
        }
    }
    Ok(out)
}

/// Row `n` of the Legendre-Stirling triangle as integers.
pub fn legendre_row(n: usize) -> Result<Vec<Integer>> {
    check_cap(n, DEFAULT_ROW_CAP)?;
    let mut row = vec![Integer::from(1)];
    for m in 1..=n {
        let prev = row;
        row = (0..=m)
            .map(|j| {
                if j == 0 {
                    return Integer::new();
                }
                let mut v = prev[j - 1].clone();
                if j < prev.len() {
                    v += Integer::from(&prev[j] * (j as u64 * (j as u64 + 1)));
                }
                v
            })
            .collect();
    }
    Ok(row)
}

/// `(2j)! {n, j}_1` via the modified recurrence, cross-checked against the
/// binomial-sum representation.
pub fn modified_ls(n: usize, j: usize) -> Result<Integer> {
    let row = modified_row(n)?;
    let value = row.get(j).cloned().unwrap_or_default();
    let direct = crate::formulas::ls_binsum(n, j)? * Integer::from(Integer::factorial(2 * j as u32));
    if direct != value {
        return Err(LabError::Invariant(format!(
            "modified recurrence and binomial sum disagree at ({n}, {j})"
        )));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn recurrence_examples() {
        let leg = GammaParam::legendre();
        let cheb = GammaParam::chebyshev();
        assert_eq!(js_recurrence(2, 1, &leg).unwrap(), 2);
        assert_eq!(js_recurrence(0, 0, &GammaParam::from_ratio(7, 3).unwrap()).unwrap(), 1);
        assert_eq!(js_recurrence(3, 2, &cheb).unwrap(), 5);
        assert_eq!(js_recurrence(2, 1, &GammaParam::from_ratio(2, 1).unwrap()).unwrap(), 4);
    }

    #[test]
    fn boundary_and_diagonal() {
        let t = StirlingTriangle::build(GammaParam::from_ratio(3, 7).unwrap(), 12).unwrap();
        for n in 0..=12 {
            assert_eq!(t.get(n, 0).unwrap(), if n == 0 { 1 } else { 0 });
            assert_eq!(t.get(n, n).unwrap(), 1);
            assert_eq!(t.get(n, n + 3).unwrap(), 0);
        }
        assert_eq!(t.get(0, 4).unwrap(), 0);
        assert!(t.get(13, 0).is_none());
    }

    #[test]
    fn non_integer_gamma_gives_rationals() {
        // {2,1}_{1/3} = weight(1) = 1 * (1 + 2/3 - 1) = 2/3
        let g = GammaParam::from_ratio(1, 3).unwrap();
        assert_eq!(js_recurrence(2, 1, &g).unwrap(), r(2, 3));
    }

    #[test]
    fn integer_families_stay_integral() {
        for g in [GammaParam::zero(), GammaParam::chebyshev(), GammaParam::legendre()] {
            let t = StirlingTriangle::build(g, 25).unwrap();
            for (_, _, v) in t.entries() {
                assert_eq!(*v.denom(), 1);
                assert!(*v >= 0);
            }
        }
    }

    #[test]
    fn row_cap_is_enforced() {
        let err = js_recurrence(DEFAULT_ROW_CAP + 1, 0, &GammaParam::legendre()).unwrap_err();
        assert!(matches!(err, LabError::ResourceLimit { .. }));
        let mut t = StirlingTriangle::with_cap(GammaParam::legendre(), 5);
        assert!(t.extend_to(6).is_err());
        assert!(modified_row(DEFAULT_ROW_CAP + 1).is_err());
    }

    #[test]
    fn from_rows_detects_tampering() {
        let t = StirlingTriangle::build(GammaParam::legendre(), 6).unwrap();
        let mut rows: Vec<Vec<Rational>> = (0..=6).map(|n| t.row(n).unwrap().to_vec()).collect();
        assert_eq!(StirlingTriangle::from_rows(GammaParam::legendre(), rows.clone()).unwrap(), t);
        rows[4][2] += 1;
        assert!(StirlingTriangle::from_rows(GammaParam::legendre(), rows).is_err());
    }

    #[test]
    fn modified_examples() {
        assert_eq!(modified_ls(3, 2).unwrap(), 192);
        assert_eq!(modified_ls(3, 3).unwrap(), 720);
        assert_eq!(modified_ls(1, 1).unwrap(), 2);
    }

    #[test]
    fn modified_matches_factorial_scaling() {
        let m = ModifiedTriangle::build(40).unwrap();
        let leg = StirlingTriangle::build(GammaParam::legendre(), 40).unwrap();
        for n in 0..=40 {
            let row = legendre_row(n).unwrap();
            for j in 0..=n {
                let plain = leg.get(n, j).unwrap();
                assert_eq!(Rational::from(&row[j]), plain);
                let scaled = &row[j] * Integer::from(Integer::factorial(2 * j as u32));
                assert_eq!(m.get(n, j).unwrap(), scaled);
            }
        }
        assert_eq!(modified_row(40).unwrap(), m.row(40).unwrap());
    }
}
