//! Exact scalars: arbitrary-precision rationals and complex rationals.

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

pub type Rational = BigRational;
pub type ComplexRational = Complex<BigRational>;

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn integer(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn cq(re: Rational, im: Rational) -> ComplexRational {
    Complex::new(re, im)
}

pub fn creal(re: Rational) -> ComplexRational {
    Complex::new(re, Rational::zero())
}

pub fn cint(re: i64, im: i64) -> ComplexRational {
    Complex::new(integer(re), integer(im))
}

pub fn czero() -> ComplexRational {
    Complex::zero()
}

pub fn cone() -> ComplexRational {
    Complex::one()
}

/// `-i` raised to `n`.
pub fn minus_i_pow(n: usize) -> ComplexRational {
    match n % 4 {
        0 => cint(1, 0),
        1 => cint(0, -1),
        2 => cint(-1, 0),
        _ => cint(0, 1),
    }
}

/// Parses `"p/q"`, `"p"` or a finite decimal like `"-0.25"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not an exact rational: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let numer: BigInt = digits.parse().map_err(|_| bad())?;
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        let value = Rational::new(numer, denom);
        return Ok(if negative { -value } else { value });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

pub fn format_rational(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn format_complex(value: &ComplexRational) -> String {
    match (value.re.is_zero(), value.im.is_zero()) {
        (_, true) => format_rational(&value.re),
        (true, false) => format!("{}i", format_rational(&value.im)),
        (false, false) => {
            let sign = if value.im < Rational::zero() { "-" } else { "+" };
            format!(
                "{}{}{}i",
                format_rational(&value.re),
                sign,
                format_rational(&value.im.abs())
            )
        }
    }
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn to_complex64(value: &ComplexRational) -> Complex64 {
    Complex64::new(to_f64(&value.re), to_f64(&value.im))
}

pub fn is_czero(value: &ComplexRational) -> bool {
    value.re.is_zero() && value.im.is_zero()
}

pub fn conj(value: &ComplexRational) -> ComplexRational {
    Complex::new(value.re.clone(), -value.im.clone())
}

/// |z|² as an exact rational.
pub fn norm_sqr(value: &ComplexRational) -> Rational {
    &value.re * &value.re + &value.im * &value.im
}
