use std::fmt;
use std::ops::{Add, Sub};

use serde::{Serialize, Serializer};

/// An exact number with denominator dividing 2, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);

    pub fn from_int(n: i64) -> Self {
        HalfInt(2 * n)
    }

    /// Builds `twice / 2`.
    pub fn from_twice(twice: i64) -> Self {
        HalfInt(twice)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn max(self, other: HalfInt) -> HalfInt {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: HalfInt) -> HalfInt {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Multiplication by an integer.
    pub fn scale(self, k: i64) -> HalfInt {
        HalfInt(self.0 * k)
    }

    /// Parses `3`, `-1`, `5/2` or `2.5`.
    pub fn parse(s: &str) -> Option<HalfInt> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: i64 = num.trim().parse().ok()?;
            match den.trim() {
                "1" => Some(HalfInt(2 * num)),
                "2" => Some(HalfInt(num)),
                _ => None,
            }
        } else if let Ok(n) = s.parse::<i64>() {
            Some(HalfInt(2 * n))
        } else {
            let x: f64 = s.parse().ok()?;
            let t = x * 2.0;
            (t.fract() == 0.0 && t.abs() < 1e15).then_some(HalfInt(t as i64))
        }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

// JSON carries the value as a number; halves are exact in binary floating point.
impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_integer() {
            s.serialize_i64(self.0 / 2)
        } else {
            s.serialize_f64(self.to_f64())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_parse_round_trip() {
        for t in -7..7 {
            let h = HalfInt::from_twice(t);
            assert_eq!(HalfInt::parse(&h.to_string()), Some(h));
        }
        assert_eq!(HalfInt::parse("2.5"), Some(HalfInt::from_twice(5)));
        assert_eq!(HalfInt::parse("1/3"), None);
        assert_eq!(HalfInt::parse("0.3"), None);
    }

    #[test]
    fn arithmetic() {
        let a = HalfInt::from_twice(3);
        let b = HalfInt::from_int(2);
        assert_eq!((a + b).twice(), 7);
        assert_eq!((a - b).twice(), -1);
        assert_eq!(a.scale(4), HalfInt::from_int(6));
        assert_eq!(a.max(b), b);
    }
}
