use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ArithError;

/// Exact complex number `re + im*i` with rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Self { re: BigRational::from_integer(BigInt::from(n)), im: BigRational::zero() }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn from_parts(re: (i64, i64), im: (i64, i64)) -> Self {
        Self {
            re: BigRational::new(BigInt::from(re.0), BigInt::from(re.1)),
            im: BigRational::new(BigInt::from(im.0), BigInt::from(im.1)),
        }
    }

    /// Exact conversion of a finite `f64` (every finite double is a dyadic rational).
    pub fn from_f64_exact(re: f64, im: f64) -> Option<Self> {
        Some(Self { re: BigRational::from_float(re)?, im: BigRational::from_float(im)? })
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    /// `|z|^2`, exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let d = self.norm_sqr();
        Ok(Self { re: &self.re / &d, im: -(&self.im / &d) })
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ArithError> {
        Ok(self * &rhs.inv()?)
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, e: i32) -> Result<Self, ArithError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    pub fn scale_int(&self, k: i64) -> Self {
        let k = BigRational::from_integer(BigInt::from(k));
        Self { re: &self.re * &k, im: &self.im * &k }
    }

    /// Nearest `(re, im)` pair of doubles.
    pub fn to_f64(&self) -> (f64, f64) {
        (ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re, im: -self.im }
    }
}

fn fmt_ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `a/b+c/d*i`, denominators always written out.
impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_negative() {
            write!(f, "{}-{}*i", fmt_ratio(&self.re), fmt_ratio(&-self.im.clone()))
        } else {
            write!(f, "{}+{}*i", fmt_ratio(&self.re), fmt_ratio(&self.im))
        }
    }
}

fn parse_ratio(s: &str) -> Result<BigRational, ArithError> {
    let bad = || ArithError::Parse(format!("bad rational `{s}`"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
    let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

impl FromStr for GaussianRational {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let body = s
            .strip_suffix("*i")
            .ok_or_else(|| ArithError::Parse(format!("coefficient `{s}` lacks `*i` part")))?;
        // split at the sign that separates the real and imaginary parts (skip a leading sign)
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .find(|&i| !body[..i].ends_with(['+', '-']))
            .ok_or_else(|| ArithError::Parse(format!("coefficient `{s}` lacks imaginary part")))?;
        let re = parse_ratio(&body[..split])?;
        let (sign, rest) = body[split..].split_at(1);
        let mut im = parse_ratio(rest)?;
        if sign == "-" {
            im = -im;
        }
        Ok(Self { re, im })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_parse() {
        let a = GaussianRational::from_parts((1, 4), (-3, 2));
        assert_eq!(a.to_string(), "1/4-3/2*i");
        assert_eq!(a.to_string().parse::<GaussianRational>().unwrap(), a);
        let b = GaussianRational::from_parts((-2, 1), (0, 1));
        assert_eq!(b.to_string(), "-2/1+0/1*i");
        assert_eq!("-2/1+0/1*i".parse::<GaussianRational>().unwrap(), b);
        assert_eq!("1/4+-1/2*i".parse::<GaussianRational>().unwrap(), GaussianRational::from_parts((1, 4), (-1, 2)));
        assert!("1/4".parse::<GaussianRational>().is_err());
    }

    #[test]
    fn inverse_of_zero_fails() {
        assert_eq!(GaussianRational::zero().inv(), Err(ArithError::DivisionByZero));
    }

    #[test]
    fn powers_of_minus_two_i() {
        let m2i = GaussianRational::from_parts((0, 1), (-2, 1));
        assert_eq!(m2i.pow(2).unwrap(), GaussianRational::from_int(-4));
        assert_eq!(m2i.pow(3).unwrap(), GaussianRational::from_parts((0, 1), (8, 1)));
        assert_eq!(&m2i.pow(-3).unwrap() * &m2i.pow(3).unwrap(), GaussianRational::one());
    }
}
