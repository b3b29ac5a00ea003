//! Exact arithmetic in Q/Z, the coefficient group standing in for C^×.
//!
//! Every cohomology class of a finite group with C^× coefficients is torsion,
//! so a reduced fraction mod 1 is a complete model. Equality is exact.

use crate::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// An element of Q/Z as a reduced fraction `num/den` with `0 <= num < den`.
/// Zero is uniquely `0/1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct QZ {
    num: u64,
    den: u64,
}

impl PartialOrd for QZ {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QZ {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // numeric order of the canonical representatives in [0, 1)
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

impl QZ {
    pub const ZERO: QZ = QZ { num: 0, den: 1 };
    pub const HALF: QZ = QZ { num: 1, den: 2 };

    /// Reduce `num/den` mod 1. `den` must be nonzero.
    pub fn new(num: i64, den: i64) -> Result<QZ> {
        if den == 0 {
            return Err(Error::InvalidFraction { num, den });
        }
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let den = den as u64;
        let num = (num.rem_euclid(den as i64)) as u64;
        let g = gcd(num, den);
        let (num, den) = (num / g, den / g);
        Ok(QZ { num, den })
    }

    fn make(num: i128, den: u64) -> QZ {
        debug_assert!(den != 0);
        let num = num.rem_euclid(den as i128) as u64;
        let g = gcd(num, den);
        QZ {
            num: num / g,
            den: den / g,
        }
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn add(&self, other: &QZ) -> QZ {
        let den = lcm(self.den, other.den);
        let num = self.num as i128 * (den / self.den) as i128
            + other.num as i128 * (den / other.den) as i128;
        QZ::make(num, den)
    }

    pub fn neg(&self) -> QZ {
        QZ::make(-(self.num as i128), self.den)
    }

    pub fn sub(&self, other: &QZ) -> QZ {
        self.add(&other.neg())
    }

    /// n-fold sum of `self`.
    pub fn scale(&self, n: i64) -> QZ {
        QZ::make(self.num as i128 * n as i128, self.den)
    }

    /// Least m >= 1 with m * self = 0; equals the reduced denominator.
    pub fn order(&self) -> u64 {
        self.den
    }

    /// An exact half: `h` with `2h = self` (the canonical choice `num/(2 den)`).
    pub fn half(&self) -> QZ {
        QZ::make(self.num as i128, self.den * 2)
    }

    /// Interpret a {0, 1/2}-valued element as a bit of Z/2.
    pub fn as_z2(&self) -> Option<u64> {
        match (self.num, self.den) {
            (0, 1) => Some(0),
            (1, 2) => Some(1),
            _ => None,
        }
    }

    pub fn from_z2(bit: u64) -> QZ {
        if bit % 2 == 0 {
            QZ::ZERO
        } else {
            QZ::HALF
        }
    }

    /// Numerator after rescaling to denominator `n`; fails if `den ∤ n`.
    pub fn with_denominator(&self, n: u64) -> Option<u64> {
        if n == 0 || n % self.den != 0 {
            return None;
        }
        Some(self.num * (n / self.den))
    }
}

impl fmt::Display for QZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for QZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for QZ {
    type Err = Error;

    fn from_str(s: &str) -> Result<QZ> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("cannot parse {s:?} as an element of Q/Z"));
        match s.split_once('/') {
            Some((p, q)) => {
                let num: i64 = p.trim().parse().map_err(|_| bad())?;
                let den: i64 = q.trim().parse().map_err(|_| bad())?;
                QZ::new(num, den)
            }
            None => {
                let num: i64 = s.parse().map_err(|_| bad())?;
                QZ::new(num, 1)
            }
        }
    }
}

impl Serialize for QZ {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QZ {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<QZ, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> QZ {
        QZ::new(n, d).unwrap()
    }

    #[test]
    fn reduced_examples() {
        assert_eq!(q(1, 2).add(&q(1, 2)), QZ::ZERO);
        assert_eq!(q(1, 4).add(&q(1, 4)), q(1, 2));
        assert_eq!(q(1, 8).scale(2), q(1, 4));
        assert_eq!(q(1, 4).neg(), q(3, 4));
        assert_eq!(q(1, 8).scale(4), q(1, 2));
        assert_eq!(q(1, 2).order(), 2);
        assert_eq!(q(-1, 4), q(3, 4));
        assert_eq!(q(5, 10), q(1, 2));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("1/2".parse::<QZ>().unwrap(), q(1, 2));
        assert_eq!("0".parse::<QZ>().unwrap(), QZ::ZERO);
        assert_eq!("3".parse::<QZ>().unwrap(), QZ::ZERO);
        assert_eq!(q(3, 4).to_string(), "3/4");
        assert_eq!(QZ::ZERO.to_string(), "0");
        assert!("1/0".parse::<QZ>().is_err());
        assert!("x".parse::<QZ>().is_err());
    }

    #[test]
    fn half_doubles_back() {
        for d in 1..30i64 {
            for n in 0..d {
                let a = q(n, d);
                assert_eq!(a.half().scale(2), a);
            }
        }
    }

    proptest! {
        #[test]
        fn add_assoc_comm(a in 0i64..60, b in 0i64..60, c in 0i64..60,
                          da in 1i64..60, db in 1i64..60, dc in 1i64..60) {
            let (x, y, z) = (q(a, da), q(b, db), q(c, dc));
            prop_assert_eq!(x.add(&y), y.add(&x));
            prop_assert_eq!(x.add(&y).add(&z), x.add(&y.add(&z)));
            prop_assert_eq!(x.add(&x.neg()), QZ::ZERO);
        }

        #[test]
        fn order_divides_and_kills(a in 0i64..120, d in 1i64..120) {
            let x = q(a, d);
            prop_assert_eq!(x.denom() % x.order(), 0);
            prop_assert_eq!(x.scale(x.order() as i64), QZ::ZERO);
            // order is minimal
            for m in 1..x.order() {
                prop_assert!(!x.scale(m as i64).is_zero());
            }
        }
    }
}
