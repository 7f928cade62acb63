//! Exact rational scalars.
//!
//! Values live in a machine-word `Ratio<i64>` while they fit and are promoted
//! to arbitrary precision on overflow, so results never depend on the
//! representation that produced them.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

#[derive(Clone)]
pub enum Scalar {
    Small(Ratio<i64>),
    Big(BigRational),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Small(Ratio::zero())
    }

    pub fn one() -> Self {
        Scalar::Small(Ratio::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Small(Ratio::from_integer(n))
    }

    /// `num / den`; panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Small(Ratio::new(num, den))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Scalar::Big(BigRational::new(num, den)).normalized()
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Small(r) => r.is_zero(),
            Scalar::Big(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Small(r) => r.is_one(),
            Scalar::Big(r) => r.is_one(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Small(r) => r.is_negative(),
            Scalar::Big(r) => r.is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Scalar::Small(r) => r.is_integer(),
            Scalar::Big(r) => r.is_integer(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Scalar::Small(r) => BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom())),
            Scalar::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Scalar::Small(r) => BigInt::from(*r.numer()),
            Scalar::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Scalar::Small(r) => BigInt::from(*r.denom()),
            Scalar::Big(r) => r.denom().clone(),
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Small(r) => match r.numer().checked_abs() {
                Some(_) => Scalar::Small(r.recip()),
                None => Scalar::Big(self.to_big().recip()),
            },
            Scalar::Big(r) => Scalar::Big(r.recip()).normalized(),
        })
    }

    pub fn pow(&self, exp: i32) -> Self {
        if exp < 0 {
            return self.recip().expect("negative power of zero").pow(-exp);
        }
        let mut acc = Scalar::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    fn normalized(self) -> Self {
        match self {
            Scalar::Big(r) => match (r.numer().to_i64(), r.denom().to_i64()) {
                (Some(n), Some(d)) => Scalar::Small(Ratio::new_raw(n, d)),
                _ => Scalar::Big(r),
            },
            small => small,
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Small(a), Scalar::Small(b)) => a == b,
            _ => self.to_big() == other.to_big(),
        }
    }
}

impl Eq for Scalar {}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Scalar::Small(a), Scalar::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl std::hash::Hash for Scalar {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        // Small and Big never hold the same value after normalization.
        match self {
            Scalar::Small(r) => {
                r.numer().hash(state);
                r.denom().hash(state);
            }
            Scalar::Big(r) => {
                r.numer().hash(state);
                r.denom().hash(state);
            }
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Small(r) => write!(f, "{r}"),
            Scalar::Big(r) => write!(f, "{r}"),
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        if let (Scalar::Small(a), Scalar::Small(b)) = (self, rhs) {
            if let Some(r) = a.checked_add(b) {
                return Scalar::Small(r);
            }
        }
        Scalar::Big(self.to_big() + rhs.to_big()).normalized()
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        if let (Scalar::Small(a), Scalar::Small(b)) = (self, rhs) {
            if let Some(r) = a.checked_sub(b) {
                return Scalar::Small(r);
            }
        }
        Scalar::Big(self.to_big() - rhs.to_big()).normalized()
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        if let (Scalar::Small(a), Scalar::Small(b)) = (self, rhs) {
            if let Some(r) = a.checked_mul(b) {
                return Scalar::Small(r);
            }
        }
        Scalar::Big(self.to_big() * rhs.to_big()).normalized()
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &'a Scalar) -> Scalar {
        self * &rhs.recip().expect("division by zero scalar")
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Small(r) => match r.numer().checked_neg() {
                Some(n) => Scalar::Small(Ratio::new_raw(n, *r.denom())),
                None => Scalar::Big(-Scalar::Small(r).to_big()),
            },
            Scalar::Big(r) => Scalar::Big(-r).normalized(),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

/// `n!` as an exact scalar.
pub fn factorial(n: u32) -> Scalar {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    Scalar::from_big(acc, BigInt::one())
}
