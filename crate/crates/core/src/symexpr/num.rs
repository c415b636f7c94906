use std::fmt;
use std::hash::{Hash, Hasher};

use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedMul, One, Signed, ToPrimitive, Zero};

/// A numeric literal inside an expression.
///
/// Literals stay exact rationals until an `i64` overflow forces them onto
/// the reals.
#[derive(Clone, Copy, Debug)]
pub enum Num {
    Rat(Rational64),
    Real(f64),
}

impl Num {
    pub const ZERO: Num = Num::Rat(Rational64::new_raw(0, 1));
    pub const ONE: Num = Num::Rat(Rational64::new_raw(1, 1));

    pub fn int(v: i64) -> Self {
        Num::Rat(Rational64::from_integer(v))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Num::Rat(Rational64::new(n, d))
    }

    /// Non-finite reals are rejected.
    pub fn real(v: f64) -> Option<Self> {
        v.is_finite().then_some(Num::Real(v))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Num::Rat(r) => *r.numer() as f64 / *r.denom() as f64,
            Num::Real(v) => *v,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Num::Rat(r) => r.is_zero(),
            Num::Real(v) => *v == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Num::Rat(r) => r.is_one(),
            Num::Real(v) => *v == 1.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Num::Rat(r) => r.is_negative(),
            Num::Real(v) => *v < 0.0,
        }
    }

    pub fn as_rational(&self) -> Option<Rational64> {
        match self {
            Num::Rat(r) => Some(*r),
            Num::Real(_) => None,
        }
    }

    pub fn add(&self, other: &Num) -> Num {
        match (self, other) {
            (Num::Rat(a), Num::Rat(b)) => match a.checked_add(b) {
                Some(r) => Num::Rat(r),
                None => Num::Real(self.to_f64() + other.to_f64()),
            },
            _ => Num::Real(self.to_f64() + other.to_f64()),
        }
    }

    pub fn mul(&self, other: &Num) -> Num {
        match (self, other) {
            (Num::Rat(a), Num::Rat(b)) => match a.checked_mul(b) {
                Some(r) => Num::Rat(r),
                None => Num::Real(self.to_f64() * other.to_f64()),
            },
            _ => Num::Real(self.to_f64() * other.to_f64()),
        }
    }

    pub fn neg(&self) -> Num {
        match self {
            Num::Rat(r) => match 0i64.checked_sub(*r.numer()) {
                Some(n) => Num::Rat(Rational64::new_raw(n, *r.denom())),
                None => Num::Real(-self.to_f64()),
            },
            Num::Real(v) => Num::Real(-v),
        }
    }

    pub fn abs(&self) -> Num {
        if self.is_negative() {
            self.neg()
        } else {
            *self
        }
    }

    /// `None` for zero.
    pub fn recip(&self) -> Option<Num> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Num::Rat(r) => {
                if *r.numer() == i64::MIN {
                    Num::Real(1.0 / self.to_f64())
                } else {
                    Num::Rat(r.recip())
                }
            }
            Num::Real(v) => Num::Real(1.0 / v),
        })
    }

    /// Integer power; `None` when undefined (`0^-k`) or when an exact result
    /// overflows and no finite real fallback exists.
    pub fn powi(&self, k: i64) -> Option<Num> {
        if k < 0 {
            return self.recip()?.powi(k.checked_neg()?);
        }
        if let Num::Rat(r) = self {
            let mut acc = Rational64::one();
            let mut ok = true;
            for _ in 0..k {
                match acc.checked_mul(r) {
                    Some(v) => acc = v,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                return Some(Num::Rat(acc));
            }
        }
        let v = self.to_f64().powf(k as f64);
        Num::real(v)
    }

    /// Exact `p/q`-th power of a rational when it exists (perfect powers only).
    pub fn pow_exact(&self, e: &Rational64) -> Option<Num> {
        if e.is_integer() {
            return self.powi(*e.numer());
        }
        let r = self.as_rational()?;
        if r.is_negative() {
            return None;
        }
        let d = u32::try_from(*e.denom()).ok()?;
        let n = int_root(*r.numer(), d)?;
        let m = int_root(*r.denom(), d)?;
        Num::Rat(Rational64::new(n, m)).powi(*e.numer())
    }

    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Num::Rat(r) if r.is_integer() => Some(*r.numer()),
            Num::Real(v) if v.fract() == 0.0 => v.to_i64(),
            _ => None,
        }
    }
}

fn int_root(v: i64, d: u32) -> Option<i64> {
    if v < 0 {
        return None;
    }
    let guess = (v as f64).powf(1.0 / d as f64).round() as i64;
    (guess.saturating_sub(1)..=guess.saturating_add(1)).find(|c| *c >= 0 && c.checked_pow(d) == Some(v))
}

impl PartialEq for Num {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Num::Rat(a), Num::Rat(b)) => a == b,
            (Num::Real(a), Num::Real(b)) => a.to_bits() == b.to_bits(),
            _ => false,
        }
    }
}

impl Eq for Num {}

impl Hash for Num {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Num::Rat(r) => {
                0u8.hash(state);
                r.numer().hash(state);
                r.denom().hash(state);
            }
            Num::Real(v) => {
                1u8.hash(state);
                v.to_bits().hash(state);
            }
        }
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Rat(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Num::Rat(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Num::Real(v) => write!(f, "{v:?}"),
        }
    }
}

impl From<i64> for Num {
    fn from(v: i64) -> Self {
        Num::int(v)
    }
}

impl From<Rational64> for Num {
    fn from(v: Rational64) -> Self {
        Num::Rat(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_degrades_to_real() {
        let big = Num::int(i64::MAX / 2);
        let sum = big.add(&big).add(&big);
        assert!(matches!(sum, Num::Real(_)));
        assert!((sum.to_f64() - 1.5 * i64::MAX as f64).abs() / sum.to_f64() < 1e-12);
    }

    #[test]
    fn exact_powers() {
        assert_eq!(Num::ratio(4, 9).pow_exact(&Rational64::new(1, 2)), Some(Num::ratio(2, 3)));
        assert_eq!(Num::ratio(2, 1).pow_exact(&Rational64::new(1, 2)), None);
        assert_eq!(Num::int(2).powi(-2), Some(Num::ratio(1, 4)));
        assert_eq!(Num::ZERO.powi(-1), None);
    }
}
