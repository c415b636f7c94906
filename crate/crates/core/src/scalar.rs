//! Scalar types that expressions can be evaluated in.
//!
//! Floating point (`f32`, `f64`) evaluation follows IEEE semantics with explicit
//! domain checks. `BigRational` evaluation is exact and refuses anything that
//! has no exact rational value (`sin(1)`, `sqrt(2)`, ...).

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::symexpr::{Func, Num};

/// Why a scalar operation could not produce a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarError {
    DivisionByZero,
    LogNonPositive,
    SqrtNegative,
    /// Fractional power of a negative number, or `0^e` with `e < 0`.
    PowDomain,
    /// Result is infinite or NaN.
    Overflow,
    /// The exact scalar cannot represent the result.
    Inexact,
}

impl std::fmt::Display for ScalarError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ScalarError::DivisionByZero => "division by zero",
            ScalarError::LogNonPositive => "log of a non-positive number",
            ScalarError::SqrtNegative => "sqrt of a negative number",
            ScalarError::PowDomain => "power outside its real domain",
            ScalarError::Overflow => "non-finite result",
            ScalarError::Inexact => "no exact value",
        };
        f.write_str(s)
    }
}

/// A number system expressions can be evaluated in.
pub trait Scalar:
    num_traits::Num + std::ops::Neg<Output = Self> + Clone + PartialOrd + Debug + Send + Sync + 'static
{
    fn from_num(c: &Num) -> Result<Self, ScalarError>;
    fn from_f64(v: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;
    fn recip(&self) -> Result<Self, ScalarError>;
    fn pow_rational(&self, e: &Rational64) -> Result<Self, ScalarError>;
    fn apply(&self, f: Func) -> Result<Self, ScalarError>;
    fn abs_value(&self) -> Self;
}

macro_rules! impl_float_scalar {
    ($f:ty) => {
        impl Scalar for $f {
            fn from_num(c: &Num) -> Result<Self, ScalarError> {
                match c {
                    Num::Rat(r) => Ok(<$f>::from_i64(*r.numer()).unwrap_or(<$f>::NAN)
                        / <$f>::from_i64(*r.denom()).unwrap_or(<$f>::NAN)),
                    Num::Real(v) => Ok(*v as $f),
                }
            }

            fn from_f64(v: f64) -> Option<Self> {
                Some(v as $f)
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn recip(&self) -> Result<Self, ScalarError> {
                if *self == 0.0 {
                    return Err(ScalarError::DivisionByZero);
                }
                finite(1.0 / *self)
            }

            fn pow_rational(&self, e: &Rational64) -> Result<Self, ScalarError> {
                let b = *self;
                if e.is_integer() {
                    if b == 0.0 && e.is_negative() {
                        return Err(ScalarError::DivisionByZero);
                    }
                    return match i32::try_from(*e.numer()) {
                        Ok(k) => finite(b.powi(k)),
                        Err(_) => finite(b.powf(*e.numer() as $f)),
                    };
                }
                if b < 0.0 || (b == 0.0 && e.is_negative()) {
                    return Err(ScalarError::PowDomain);
                }
                finite(b.powf(*e.numer() as $f / *e.denom() as $f))
            }

            fn apply(&self, f: Func) -> Result<Self, ScalarError> {
                let v = *self;
                match f {
                    Func::Sin => finite(v.sin()),
                    Func::Cos => finite(v.cos()),
                    Func::Exp => finite(v.exp()),
                    Func::Log => {
                        if v <= 0.0 {
                            Err(ScalarError::LogNonPositive)
                        } else {
                            finite(v.ln())
                        }
                    }
                    Func::Sqrt => {
                        if v < 0.0 {
                            Err(ScalarError::SqrtNegative)
                        } else {
                            finite(v.sqrt())
                        }
                    }
                }
            }

            fn abs_value(&self) -> Self {
                self.abs()
            }
        }
    };
}

fn finite<F: num_traits::Float>(v: F) -> Result<F, ScalarError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ScalarError::Overflow)
    }
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for BigRational {
    fn from_num(c: &Num) -> Result<Self, ScalarError> {
        match c {
            Num::Rat(r) => Ok(BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))),
            Num::Real(v) => BigRational::from_float(*v).ok_or(ScalarError::Overflow),
        }
    }

    fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn recip(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            Err(ScalarError::DivisionByZero)
        } else {
            Ok(BigRational::recip(self))
        }
    }

    fn pow_rational(&self, e: &Rational64) -> Result<Self, ScalarError> {
        if self.is_zero() && e.is_negative() {
            return Err(ScalarError::DivisionByZero);
        }
        let k = i32::try_from(*e.numer()).map_err(|_| ScalarError::Inexact)?;
        if e.is_integer() {
            return Ok(num_traits::Pow::pow(self, k));
        }
        if self.is_negative() {
            return Err(ScalarError::PowDomain);
        }
        let d = u32::try_from(*e.denom()).map_err(|_| ScalarError::Inexact)?;
        let root = exact_root(self, d).ok_or(ScalarError::Inexact)?;
        if root.is_zero() && k < 0 {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(num_traits::Pow::pow(&root, k))
    }

    fn apply(&self, f: Func) -> Result<Self, ScalarError> {
        match f {
            Func::Sin if self.is_zero() => Ok(Self::zero()),
            Func::Cos | Func::Exp if self.is_zero() => Ok(Self::one()),
            Func::Log if !self.is_positive() => Err(ScalarError::LogNonPositive),
            Func::Log if self.is_one() => Ok(Self::zero()),
            Func::Sqrt if self.is_negative() => Err(ScalarError::SqrtNegative),
            Func::Sqrt => exact_root(self, 2).ok_or(ScalarError::Inexact),
            _ => Err(ScalarError::Inexact),
        }
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }
}

fn exact_root(v: &BigRational, d: u32) -> Option<BigRational> {
    let n = v.numer().nth_root(d);
    let m = v.denom().nth_root(d);
    let r = BigRational::new(n, m);
    (num_traits::Pow::pow(&r, d) == *v).then_some(r)
}
