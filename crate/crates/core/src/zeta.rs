//! Riemann zeta for real `s > 1` by direct summation plus an
//! Euler-Maclaurin tail.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{LabError, Result};

/// Terms summed directly before the Euler-Maclaurin correction.
pub const DIRECT_TERMS: u32 = 10_000;

/// Exact Bernoulli numbers `B_0..=B_m` (with `B_1 = -1/2`).
pub fn bernoulli_numbers(m: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(m + 1);
    b.push(Rational::from(1));
    for k in 1..=m {
        let mut acc = Rational::new();
        for (i, bi) in b.iter().enumerate() {
            acc += Rational::from(bi * Integer::from(Integer::binomial_u(k as u32 + 1, i as u32)));
        }
        b.push(-acc / (k as u64 + 1));
    }
    b
}

/// `zeta(s)` for real `s > 1` at `prec` bits.
pub fn zeta(s: &Float, prec: u32) -> Result<Float> {
    if *s <= 1 {
        return Err(LabError::Domain(format!("zeta needs s > 1, got {s}")));
    }
    let wp = prec + 32;
    let s = Float::with_val(wp, s);
    let mut sum = Float::new(wp);
    for k in 1..DIRECT_TERMS {
        let kf = Float::with_val(wp, k);
        sum += kf.pow(-s.clone());
    }
    let n = Float::with_val(wp, DIRECT_TERMS);
    let n_pow = Float::with_val(wp, (&n).pow(-s.clone()));
    // integral tail and half endpoint
    sum += Float::with_val(wp, &n_pow * &n) / Float::with_val(wp, &s - 1u32);
    sum += Float::with_val(wp, &n_pow / 2u32);
    // B_{2i}/(2i)! * s(s+1)...(s+2i-2) * N^(-s-2i+1)
    let terms = (wp as usize / 8).clamp(8, 80);
    let bern = bernoulli_numbers(2 * terms);
    let mut rising = Float::with_val(wp, &s);
    let mut npow = Float::with_val(wp, &n_pow / &n);
    let n2 = Float::with_val(wp, n.square_ref());
    let mut fact = Integer::from(2);
    for i in 1..=terms {
        let coeff = Float::with_val(wp, &bern[2 * i]) / Float::with_val(wp, &fact);
        sum += coeff * &rising * &npow;
        // advance to i + 1
        let a = Float::with_val(wp, &s + (2 * i - 1) as u32);
        let b = Float::with_val(wp, &s + (2 * i) as u32);
        rising *= a * b;
        npow /= &n2;
        fact *= (2 * i + 1) as u32 * (2 * i + 2) as u32;
    }
    Ok(Float::with_val(prec, sum))
}

/// `zeta(k/2)` memoized by `(k, prec)`.
pub fn zeta_half(twice_s: u32, prec: u32) -> Result<Float> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Float>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&(twice_s, prec)) {
        return Ok(v.clone());
    }
    let s = Float::with_val(prec, twice_s) / 2u32;
    let v = zeta(&s, prec)?;
    cache.lock().unwrap().insert((twice_s, prec), v.clone());
    Ok(v)
}
