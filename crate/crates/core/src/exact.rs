//! Exact scalars: big rationals and Gaussian rationals.
//!
//! Every decision about phases, masses and faithfulness is taken on these
//! types. Floating point only appears through [`ln_rational`] and the
//! `to_f64` helpers, which feed display and the chordal metric.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Exact rational number.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"`, `"-p"` or `"p/q"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Q, Error> {
    let s = text.trim();
    let bad = || Error::Parse {
        pos: 0,
        msg: format!("invalid rational {s:?}"),
    };
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(num).map_err(|_| bad())?;
    let d = BigInt::from_str(den).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Parse {
            pos: 0,
            msg: format!("zero denominator in {s:?}"),
        });
    }
    Ok(Q::new(n, d))
}

/// Formats a rational as `p` or `p/q` in lowest terms.
pub fn format_rational(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn ln_bigint(n: &BigInt) -> f64 {
    debug_assert!(n.sign() == Sign::Plus);
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("finite below 2^1000").ln();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural logarithm of a positive rational, robust to huge numerators.
pub fn ln_rational(x: &Q) -> f64 {
    assert!(x.is_positive(), "logarithm of a non-positive rational");
    ln_bigint(x.numer()) - ln_bigint(x.denom())
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// A complex number with exact rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Gauss {
    pub re: Q,
    pub im: Q,
}

impl Gauss {
    pub fn new(re: Q, im: Q) -> Self {
        Self { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::new(q(re), q(im))
    }

    pub fn zero() -> Self {
        Self::new(Q::zero(), Q::zero())
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        let k = Q::from_integer(k.clone());
        Self::new(&self.re * &k, &self.im * &k)
    }

    pub fn scale_q(&self, k: &Q) -> Self {
        Self::new(&self.re * k, &self.im * k)
    }

    /// `Im(conj(self) * other)`: positive iff `other` is counter-clockwise
    /// from `self` by an angle in `(0, π)`.
    pub fn cross(&self, other: &Gauss) -> Q {
        &self.re * &other.im - &self.im * &other.re
    }

    pub fn norm_sq(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Strict upper half plane together with the strictly negative real axis.
    pub fn in_stability_cone(&self) -> bool {
        self.im.is_positive() || (self.im.is_zero() && self.re.is_negative())
    }

    /// Compares the arguments of two values in the stability cone, where the
    /// argument lies in `(0, π]`.
    pub fn cmp_arg(&self, other: &Gauss) -> Ordering {
        debug_assert!(self.in_stability_cone() && other.in_stability_cone());
        // arg(self) > arg(other) iff self is counter-clockwise of other
        let c = other.cross(self);
        if c.is_positive() {
            Ordering::Greater
        } else if c.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }

    /// Distance in the max-norm of the real and imaginary parts.
    pub fn linf_dist(&self, other: &Gauss) -> Q {
        let dr = (&self.re - &other.re).abs();
        let di = (&self.im - &other.im).abs();
        dr.max(di)
    }

    pub fn arg_f64(&self) -> f64 {
        to_f64(&self.im).atan2(to_f64(&self.re))
    }
}

impl Add for &Gauss {
    type Output = Gauss;
    fn add(self, rhs: &Gauss) -> Gauss {
        Gauss::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &Gauss {
    type Output = Gauss;
    fn sub(self, rhs: &Gauss) -> Gauss {
        Gauss::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &Gauss {
    type Output = Gauss;
    fn mul(self, rhs: &Gauss) -> Gauss {
        Gauss::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &Gauss {
    type Output = Gauss;
    fn neg(self) -> Gauss {
        Gauss::new(-&self.re, -&self.im)
    }
}

impl fmt::Display for Gauss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} + {}i",
            format_rational(&self.re),
            format_rational(&self.im)
        )
    }
}
