//! Exact coefficient fields: big rationals and Gaussian rationals.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary precision rational, always stored in lowest terms with a positive denominator.
pub type Rat = BigRational;

/// Gaussian rational `re + i im`.
pub type GaussRat = Complex<Rat>;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn gr(re: Rat, im: Rat) -> GaussRat {
    Complex::new(re, im)
}

pub fn gr_int(n: i64) -> GaussRat {
    Complex::new(rat_int(n), Rat::zero())
}

pub fn gr_rat(r: Rat) -> GaussRat {
    Complex::new(r, Rat::zero())
}

pub fn gr_i() -> GaussRat {
    Complex::new(Rat::zero(), Rat::one())
}

/// `i^k` for a possibly negative exponent.
pub fn i_pow(k: i64) -> GaussRat {
    match k.rem_euclid(4) {
        0 => gr_int(1),
        1 => gr_i(),
        2 => gr_int(-1),
        _ => -gr_i(),
    }
}

pub fn factorial(k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for j in 2..=k {
        acc *= BigInt::from(j);
    }
    acc
}

/// Product of factorials of the entries of a multi-index.
pub fn multi_factorial(e: &[u8]) -> BigInt {
    e.iter().fold(BigInt::one(), |acc, &x| acc * factorial(x as u32))
}

/// Formats a rational as `p/q`, denominator always printed.
pub fn fmt_rat(r: &Rat) -> String {
    let mut s = String::new();
    let _ = write!(s, "{}/{}", r.numer(), r.denom());
    s
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RatParseError {
    Malformed,
    ZeroDenominator,
}

/// Parses `p/q` or a bare integer `p`. Rejects a zero denominator.
pub fn parse_rat(s: &str) -> Result<Rat, RatParseError> {
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| RatParseError::Malformed)?;
    let q: BigInt = q.parse().map_err(|_| RatParseError::Malformed)?;
    if q.is_zero() {
        return Err(RatParseError::ZeroDenominator);
    }
    Ok(Rat::new(p, q))
}

/// Nearest double. Very large parts are shifted before conversion.
pub fn rat_to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a / b,
        _ => {
            // Shift both parts down until they fit in a double.
            let bits = r.numer().bits().max(r.denom().bits()) as i64;
            let shift = (bits - 1000).max(0) as usize;
            let a = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let b = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            a / b
        }
    }
}

pub fn is_real(c: &GaussRat) -> bool {
    c.im.is_zero()
}

pub fn abs_sq(c: &GaussRat) -> Rat {
    &c.re * &c.re + &c.im * &c.im
}

/// Sign of a rational as -1, 0 or 1.
pub fn sign(r: &Rat) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

pub fn vec_is_zero(v: &[GaussRat]) -> bool {
    v.iter().all(|c| c.is_zero())
}

pub fn zeros(n: usize) -> Vec<GaussRat> {
    (0..n).map(|_| GaussRat::zero()).collect()
}
