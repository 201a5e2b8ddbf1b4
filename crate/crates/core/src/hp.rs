//! Small helpers around MPFR floats.

use rug::float::Constant;
use rug::Float;

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 256;

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// `2^e` at the given precision.
pub fn pow2(prec: u32, e: i32) -> Float {
    Float::with_val(prec, Float::i_exp(1, e))
}

/// Decimal rendering with `digits` significant digits.
pub fn fmt_float(x: &Float, digits: usize) -> String {
    x.to_string_radix(10, Some(digits))
}

/// Standard normal density.
pub fn normal_density(x: &Float) -> Float {
    let prec = x.prec();
    let two_pi = Float::with_val(prec, pi(prec) * 2u32);
    let e = Float::with_val(prec, x.square_ref()) / -2i32;
    e.exp() / two_pi.sqrt()
}

/// Natural log of `k!`.
pub fn ln_factorial(k: u32, prec: u32) -> Float {
    Float::with_val(prec, rug::Integer::from(rug::Integer::factorial(k))).ln()
}
