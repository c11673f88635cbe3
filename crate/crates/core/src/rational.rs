//! Exact rational numbers with a machine-word fast path.
//!
//! Values that fit in an `i64` numerator/denominator pair are kept as
//! [`Ratio<i64>`] and combined with checked arithmetic; anything that
//! overflows is promoted to an arbitrary-precision [`BigRational`]. Results
//! are demoted back whenever they fit again, so the representation of a given
//! value is canonical.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone)]
enum Repr {
    Small(Ratio<i64>),
    Big(Box<BigRational>),
}

/// An exact rational number.
#[derive(Clone)]
pub struct Rational(Repr);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

fn small_to_big(r: &Ratio<i64>) -> BigRational {
    BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small(Ratio::from_integer(0)))
    }

    pub fn one() -> Self {
        Rational(Repr::Small(Ratio::from_integer(1)))
    }

    pub fn from_int(n: i64) -> Self {
        Rational(Repr::Small(Ratio::from_integer(n)))
    }

    /// Builds `numer / denom`. Panics on a zero denominator.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        if numer == i64::MIN || denom == i64::MIN {
            return Self::from_big(BigRational::new(BigInt::from(numer), BigInt::from(denom)));
        }
        Rational(Repr::Small(Ratio::new(numer, denom)))
    }

    pub fn from_big(value: BigRational) -> Self {
        match (value.numer().to_i64(), value.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN && d != i64::MIN => {
                Rational(Repr::Small(Ratio::new_raw(n, d)))
            }
            _ => Rational(Repr::Big(Box::new(value))),
        }
    }

    pub fn from_bigint(value: BigInt) -> Self {
        Self::from_big(BigRational::from_integer(value))
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(r) => small_to_big(r),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(r) => BigInt::from(*r.numer()),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(r) => BigInt::from(*r.denom()),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    /// `self -= factor * value`, skipping the intermediate when all three
    /// are machine integers.
    pub fn sub_mul(&mut self, factor: &Rational, value: &Rational) {
        if let (Repr::Small(a), Repr::Small(f), Repr::Small(v)) = (&mut self.0, &factor.0, &value.0) {
            if *a.denom() == 1 && *f.denom() == 1 && *v.denom() == 1 {
                let n = f.numer().checked_mul(*v.numer()).and_then(|p| a.numer().checked_sub(p));
                if let Some(n) = n.filter(|&n| n != i64::MIN) {
                    *a = Ratio::new_raw(n, 1);
                    return;
                }
            }
        }
        *self = &*self - &(factor * value);
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => *r.numer() == 0,
            Repr::Big(b) => b.is_zero(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => *r.numer() > 0,
            Repr::Big(b) => b.is_positive(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => *r.numer() < 0,
            Repr::Big(b) => b.is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => *r.denom() == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn floor(&self) -> Self {
        match &self.0 {
            Repr::Small(r) => Rational(Repr::Small(r.floor())),
            Repr::Big(b) => Self::from_big(b.floor()),
        }
    }

    pub fn ceil(&self) -> Self {
        match &self.0 {
            Repr::Small(r) => Rational(Repr::Small(r.ceil())),
            Repr::Big(b) => Self::from_big(b.ceil()),
        }
    }

    /// `self - floor(self)`, always in `[0, 1)`.
    pub fn fract_floor(&self) -> Self {
        self - &self.floor()
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        match &self.0 {
            Repr::Small(r) if *r.numer() != i64::MIN => Rational(Repr::Small(r.recip())),
            _ => Self::from_big(self.to_big().recip()),
        }
    }

    /// The integer value, if this is an integer that fits in `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(r) if *r.denom() == 1 => Some(*r.numer()),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(r) => *r.numer() as f64 / *r.denom() as f64,
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Always `p/q`, even for integers (`27/1`).
    pub fn to_fraction_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    /// Exact decimal expansion, or `None` when the denominator has a prime
    /// factor other than 2 or 5.
    pub fn to_exact_decimal(&self) -> Option<String> {
        let mut denom = self.denom();
        let two = BigInt::from(2);
        let five = BigInt::from(5);
        let mut twos = 0u32;
        let mut fives = 0u32;
        while denom.is_even() {
            denom /= &two;
            twos += 1;
        }
        while (&denom % &five).is_zero() {
            denom /= &five;
            fives += 1;
        }
        if !denom.is_one() {
            return None;
        }
        let places = twos.max(fives) as usize;
        Some(format_scaled(&self.numer(), &self.denom(), places))
    }

    /// Decimal rounded half away from zero to `places` digits.
    pub fn to_decimal(&self, places: usize) -> String {
        format_scaled(&self.numer(), &self.denom(), places)
    }

    /// Largest `g` such that both values are integer multiples of `g`.
    pub fn gcd(&self, other: &Self) -> Self {
        let (a, b) = (self.to_big(), other.to_big());
        let numer = a.numer().gcd(b.numer());
        let denom = a.denom().lcm(b.denom());
        Self::from_big(BigRational::new(numer, denom))
    }
}

fn format_scaled(numer: &BigInt, denom: &BigInt, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = numer.abs() * &scale;
    let (mut q, r) = scaled.div_rem(denom);
    if r * 2 >= *denom {
        q += 1;
    }
    let (int_part, frac_part) = q.div_rem(&scale);
    let sign = if numer.is_negative() && !q.is_zero() { "-" } else { "" };
    if places == 0 {
        format!("{sign}{int_part}")
    } else {
        let frac = frac_part.to_string();
        format!("{sign}{int_part}.{}{frac}", "0".repeat(places - frac.len()))
    }
}

/// Reduces `n / d` with `d > 0`, refusing `i64::MIN` so negation stays safe.
fn small(n: i64, d: i64) -> Option<Ratio<i64>> {
    if n == i64::MIN || d == i64::MIN {
        return None;
    }
    if d == 1 {
        return Some(Ratio::new_raw(n, 1));
    }
    let g = n.gcd(&d);
    Some(Ratio::new_raw(n / g, d / g))
}

fn small_add(a: &Ratio<i64>, b: &Ratio<i64>, negate_b: bool) -> Option<Ratio<i64>> {
    let (an, ad, bd) = (*a.numer(), *a.denom(), *b.denom());
    let bn = if negate_b { b.numer().checked_neg()? } else { *b.numer() };
    if ad == bd {
        return small(an.checked_add(bn)?, ad);
    }
    let g = ad.gcd(&bd);
    let (ad_g, bd_g) = (ad / g, bd / g);
    let n = an.checked_mul(bd_g)?.checked_add(bn.checked_mul(ad_g)?)?;
    let d = ad.checked_mul(bd_g)?;
    small(n, d)
}

fn small_mul(a: &Ratio<i64>, b: &Ratio<i64>) -> Option<Ratio<i64>> {
    let (an, ad, bn, bd) = (*a.numer(), *a.denom(), *b.numer(), *b.denom());
    if ad == 1 && bd == 1 {
        let n = an.checked_mul(bn)?;
        return (n != i64::MIN).then(|| Ratio::new_raw(n, 1));
    }
    if an == 0 || bn == 0 {
        return Some(Ratio::new_raw(0, 1));
    }
    // Cross-cancel first; the product of reduced factors is already reduced.
    let g1 = an.gcd(&bd);
    let g2 = bn.gcd(&ad);
    let n = (an / g1).checked_mul(bn / g2)?;
    let d = (ad / g2).checked_mul(bd / g1)?;
    (n != i64::MIN && d != i64::MIN).then(|| Ratio::new_raw(n, d))
}

fn small_div(a: &Ratio<i64>, b: &Ratio<i64>) -> Option<Ratio<i64>> {
    let (bn, bd) = (*b.numer(), *b.denom());
    if bn == 0 {
        return None;
    }
    let recip = if bn < 0 { Ratio::new_raw(bd.checked_neg()?, bn.checked_neg()?) } else { Ratio::new_raw(bd, bn) };
    small_mul(a, &recip)
}

macro_rules! binop {
    ($trait:ident, $method:ident, $fast:expr) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &rhs.0) {
                    if let Some(v) = $fast(a, b) {
                        return Rational(Repr::Small(v));
                    }
                }
                Rational::from_big(self.to_big().$method(rhs.to_big()))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                (&self).$method(rhs)
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| small_add(a, b, false));
binop!(Sub, sub, |a, b| small_add(a, b, true));
binop!(Mul, mul, small_mul);
binop!(Div, div, small_div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = &*self + rhs;
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        *self = &*self + &rhs;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        *self = &*self * rhs;
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(r) if *r.numer() != i64::MIN => Rational(Repr::Small(-r)),
            _ => Rational::from_big(-self.to_big()),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, v| acc + v)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, v| acc + v)
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Rational {}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        match i64::try_from(n) {
            Ok(v) => Rational::from_int(v),
            Err(_) => Rational::from_bigint(BigInt::from(n)),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `p`, `p/q`, and finite decimals such as `1.25`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        let invalid = || ParseRationalError::Invalid(s.to_string());
        if let Some((n, d)) = s.split_once('/') {
            let numer: BigInt = n.trim().parse().map_err(|_| invalid())?;
            let denom: BigInt = d.trim().parse().map_err(|_| invalid())?;
            if denom.is_zero() {
                return Err(ParseRationalError::ZeroDenominator(s.to_string()));
            }
            return Ok(Rational::from_big(BigRational::new(numer, denom)));
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            let negative = int_part.starts_with('-');
            let digits_ok = |t: &str| t.chars().all(|c| c.is_ascii_digit());
            let int_digits = int_part.trim_start_matches(['-', '+']);
            if !digits_ok(int_digits) || !digits_ok(frac_part) || (int_digits.is_empty() && frac_part.is_empty()) {
                return Err(invalid());
            }
            let all: BigInt = format!("{int_digits}{frac_part}").parse().map_err(|_| invalid())?;
            let scale = num_traits::pow(BigInt::from(10), frac_part.len());
            let value = BigRational::new(if negative { -all } else { all }, scale);
            return Ok(Rational::from_big(value));
        }
        let numer: BigInt = s.parse().map_err(|_| invalid())?;
        Ok(Rational::from_bigint(numer))
    }
}
