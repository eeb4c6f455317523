//! Exact scalar types: Gaussian rationals for operator coefficients and the
//! quadratic field Q(sqrt 2) for character values and symmetry substitutions.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact complex rational `re + i im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coefficient {
    pub re: BigRational,
    pub im: BigRational,
}

impl Coefficient {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    pub fn from_ints(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        Self {
            re: ratio(re_num, re_den),
            im: ratio(im_num, im_den),
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::real(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn i() -> Self {
        Self { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn zero() -> Self {
        Self { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        Self::real(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self { re: &self.re * k, im: &self.im * k }
    }

    pub fn scale_int(&self, k: u64) -> Self {
        let k = BigRational::from_integer(BigInt::from(k));
        self.scale(&k)
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

impl Add for &Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: &Coefficient) -> Coefficient {
        Coefficient { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: &Coefficient) -> Coefficient {
        Coefficient { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: &Coefficient) -> Coefficient {
        Coefficient {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl AddAssign<&Coefficient> for Coefficient {
    fn add_assign(&mut self, rhs: &Coefficient) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", fmt_ratio(&self.re), fmt_ratio(&self.im))
    }
}

/// Element `rat + sqrt2 * sqrt(2)` of Q(sqrt 2).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd2 {
    pub rat: BigRational,
    pub sqrt2: BigRational,
}

impl Surd2 {
    pub fn new(rat: BigRational, sqrt2: BigRational) -> Self {
        Self { rat, sqrt2 }
    }

    pub fn from_ints(rat: i64, sqrt2: i64) -> Self {
        Self { rat: ratio(rat, 1), sqrt2: ratio(sqrt2, 1) }
    }

    pub fn rational(r: BigRational) -> Self {
        Self { rat: r, sqrt2: BigRational::zero() }
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0)
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    /// `1/sqrt(2) = sqrt(2)/2`.
    pub fn inv_sqrt2() -> Self {
        Self { rat: BigRational::zero(), sqrt2: ratio(1, 2) }
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.sqrt2.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.sqrt2.is_zero()
    }

    pub fn scale_int(&self, k: u64) -> Self {
        let k = BigRational::from_integer(BigInt::from(k));
        Self { rat: &self.rat * &k, sqrt2: &self.sqrt2 * &k }
    }

    /// Galois conjugate `a - b sqrt 2`.
    pub fn galois(&self) -> Self {
        Self { rat: self.rat.clone(), sqrt2: -self.sqrt2.clone() }
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.rat) + std::f64::consts::SQRT_2 * rational_to_f64(&self.sqrt2)
    }

    /// Exact inverse; `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        // (a + b r)^-1 = (a - b r) / (a^2 - 2 b^2)
        let norm = &self.rat * &self.rat - ratio(2, 1) * &self.sqrt2 * &self.sqrt2;
        if norm.is_zero() {
            return None;
        }
        Some(Self { rat: &self.rat / &norm, sqrt2: -&self.sqrt2 / &norm })
    }

    /// Closest element `a + b sqrt 2` with integer `a, b` bounded by `bound`
    /// in both the value and its Galois conjugate. Used to recover exact
    /// algebraic integers from floating estimates.
    pub fn snap_integer(x: f64, bound: i64, tol: f64) -> Option<Self> {
        let mut best: Option<(f64, i64, i64)> = None;
        for b in -bound..=bound {
            let a = (x - b as f64 * std::f64::consts::SQRT_2).round() as i64;
            let conj = a as f64 - b as f64 * std::f64::consts::SQRT_2;
            if conj.abs() > bound as f64 + 1e-9 || (a.abs() > 2 * bound) {
                continue;
            }
            let err = (a as f64 + b as f64 * std::f64::consts::SQRT_2 - x).abs();
            if err < tol && best.map_or(true, |(e, _, _)| err < e) {
                best = Some((err, a, b));
            }
        }
        best.map(|(_, a, b)| Self::from_ints(a, b))
    }
}

impl Add for &Surd2 {
    type Output = Surd2;
    fn add(self, rhs: &Surd2) -> Surd2 {
        Surd2 { rat: &self.rat + &rhs.rat, sqrt2: &self.sqrt2 + &rhs.sqrt2 }
    }
}

impl Sub for &Surd2 {
    type Output = Surd2;
    fn sub(self, rhs: &Surd2) -> Surd2 {
        Surd2 { rat: &self.rat - &rhs.rat, sqrt2: &self.sqrt2 - &rhs.sqrt2 }
    }
}

impl Mul for &Surd2 {
    type Output = Surd2;
    fn mul(self, rhs: &Surd2) -> Surd2 {
        Surd2 {
            rat: &self.rat * &rhs.rat + ratio(2, 1) * &self.sqrt2 * &rhs.sqrt2,
            sqrt2: &self.rat * &rhs.sqrt2 + &self.sqrt2 * &rhs.rat,
        }
    }
}

impl Neg for &Surd2 {
    type Output = Surd2;
    fn neg(self) -> Surd2 {
        Surd2 { rat: -self.rat.clone(), sqrt2: -self.sqrt2.clone() }
    }
}

impl AddAssign<&Surd2> for Surd2 {
    fn add_assign(&mut self, rhs: &Surd2) {
        self.rat += &rhs.rat;
        self.sqrt2 += &rhs.sqrt2;
    }
}

impl fmt::Display for Surd2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rat.is_zero(), self.sqrt2.is_zero()) {
            (_, true) => write!(f, "{}", fmt_ratio(&self.rat)),
            (true, false) => write!(f, "{}r2", fmt_ratio(&self.sqrt2)),
            (false, false) => {
                let sign = if self.sqrt2.is_negative() { "-" } else { "+" };
                write!(f, "{}{}{}r2", fmt_ratio(&self.rat), sign, fmt_ratio(&self.sqrt2.abs()))
            }
        }
    }
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fallback for ratios whose parts overflow f64 individually.
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// `num/den` with `den` always printed, as in the operator text format.
pub fn fmt_ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_ratio(s: &str) -> Option<BigRational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.trim().parse().ok()?;
    let d: BigInt = d.trim().parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_product() {
        let a = Coefficient::from_ints(1, 2, 1, 1);
        let b = Coefficient::from_ints(0, 1, 1, 1);
        // (1/2 + i) i = -1 + i/2
        assert_eq!(&a * &b, Coefficient::from_ints(-1, 1, 1, 2));
        assert_eq!(a.conj(), Coefficient::from_ints(1, 2, -1, 1));
    }

    #[test]
    fn surd_arithmetic() {
        let r2 = Surd2::from_ints(0, 1);
        assert_eq!(&r2 * &r2, Surd2::from_ints(2, 0));
        let x = Surd2::from_ints(3, 2);
        let inv = x.inverse().unwrap();
        assert_eq!(&x * &inv, Surd2::one());
        assert!(Surd2::zero().inverse().is_none());
    }

    #[test]
    fn snapping_recovers_sqrt8() {
        let s = Surd2::snap_integer(-8f64.sqrt(), 4, 1e-9).unwrap();
        assert_eq!(s, Surd2::from_ints(0, -2));
        assert_eq!(Surd2::snap_integer(2.0, 4, 1e-9).unwrap(), Surd2::from_ints(2, 0));
    }

    #[test]
    fn ratio_text_roundtrip() {
        let r = ratio(-3, 8);
        assert_eq!(parse_ratio(&fmt_ratio(&r)).unwrap(), r);
        assert_eq!(parse_ratio("5").unwrap(), ratio(5, 1));
        assert!(parse_ratio("1/0").is_none());
    }
}
