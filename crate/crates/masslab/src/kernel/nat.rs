//! Arbitrary-precision naturals with an inline fast path for values that fit in a `u64`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A natural number. Values above `u64::MAX` are boxed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Nat {
    Small(u64),
    Big(Arc<BigUint>),
}

impl Nat {
    pub const ZERO: Nat = Nat::Small(0);

    pub fn from_big(b: BigUint) -> Nat {
        match b.to_u64() {
            Some(v) => Nat::Small(v),
            None => Nat::Big(Arc::new(b)),
        }
    }

    pub fn to_big(&self) -> BigUint {
        match self {
            Nat::Small(v) => BigUint::from(*v),
            Nat::Big(b) => (**b).clone(),
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        match self {
            Nat::Small(v) => Some(*v),
            Nat::Big(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Nat::Small(0))
    }

    pub fn add(&self, o: &Nat) -> Nat {
        if let (Nat::Small(a), Nat::Small(b)) = (self, o) {
            if let Some(c) = a.checked_add(*b) {
                return Nat::Small(c);
            }
        }
        Nat::from_big(self.to_big() + o.to_big())
    }

    /// Truncated subtraction.
    pub fn monus(&self, o: &Nat) -> Nat {
        if let (Nat::Small(a), Nat::Small(b)) = (self, o) {
            return Nat::Small(a.saturating_sub(*b));
        }
        if self <= o {
            Nat::ZERO
        } else {
            Nat::from_big(self.to_big() - o.to_big())
        }
    }

    pub fn mul(&self, o: &Nat) -> Nat {
        if let (Nat::Small(a), Nat::Small(b)) = (self, o) {
            if let Some(c) = a.checked_mul(*b) {
                return Nat::Small(c);
            }
        }
        Nat::from_big(self.to_big() * o.to_big())
    }

    /// Floor division; division by zero yields zero.
    pub fn div(&self, o: &Nat) -> Nat {
        if o.is_zero() {
            return Nat::ZERO;
        }
        if let (Nat::Small(a), Nat::Small(b)) = (self, o) {
            return Nat::Small(a / b);
        }
        Nat::from_big(self.to_big() / o.to_big())
    }

    /// Remainder; modulo zero yields the dividend.
    pub fn rem(&self, o: &Nat) -> Nat {
        if o.is_zero() {
            return self.clone();
        }
        if let (Nat::Small(a), Nat::Small(b)) = (self, o) {
            return Nat::Small(a % b);
        }
        Nat::from_big(self.to_big() % o.to_big())
    }

    /// Cantor pairing.
    pub fn pair(a: &Nat, b: &Nat) -> Nat {
        if let (Nat::Small(x), Nat::Small(y)) = (a, b) {
            let s = *x as u128 + *y as u128;
            let v = s * (s + 1) / 2 + *y as u128;
            if let Ok(v) = u64::try_from(v) {
                return Nat::Small(v);
            }
        }
        let s = a.to_big() + b.to_big();
        let t = &s * (&s + 1u32) / 2u32;
        Nat::from_big(t + b.to_big())
    }

    /// Inverse of [`Nat::pair`].
    pub fn unpair(&self) -> (Nat, Nat) {
        if let Nat::Small(z) = self {
            let (a, b) = crate::pairing::unpair(*z);
            return (Nat::Small(a), Nat::Small(b));
        }
        let z = self.to_big();
        let w = ((&z * 8u32 + 1u32).sqrt() - 1u32) / 2u32;
        let t = &w * (&w + 1u32) / 2u32;
        let b = &z - t;
        let a = &w - &b;
        (Nat::from_big(a), Nat::from_big(b))
    }

    pub fn to_bytes_be(&self) -> Vec<u8> {
        if self.is_zero() {
            return Vec::new();
        }
        self.to_big().to_bytes_be()
    }

    pub fn from_bytes_be(bytes: &[u8]) -> Nat {
        if bytes.is_empty() {
            return Nat::ZERO;
        }
        Nat::from_big(BigUint::from_bytes_be(bytes))
    }
}

impl Default for Nat {
    fn default() -> Self {
        Nat::ZERO
    }
}

impl From<u64> for Nat {
    fn from(v: u64) -> Self {
        Nat::Small(v)
    }
}

impl From<usize> for Nat {
    fn from(v: usize) -> Self {
        Nat::Small(v as u64)
    }
}

impl From<BigUint> for Nat {
    fn from(b: BigUint) -> Self {
        Nat::from_big(b)
    }
}

impl Ord for Nat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Nat::Small(a), Nat::Small(b)) => a.cmp(b),
            (Nat::Small(_), Nat::Big(_)) => Ordering::Less,
            (Nat::Big(_), Nat::Small(_)) => Ordering::Greater,
            (Nat::Big(a), Nat::Big(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Nat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nat::Small(v) => write!(f, "{v}"),
            Nat::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Nat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() || !s.bytes().all(|c| c.is_ascii_digit()) {
            return Err(format!("not a natural number: {s:?}"));
        }
        if let Ok(v) = s.parse::<u64>() {
            return Ok(Nat::Small(v));
        }
        BigUint::from_str(s)
            .map(Nat::from_big)
            .map_err(|e| e.to_string())
    }
}

impl Serialize for Nat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Nat::Small(v) => s.serialize_u64(*v),
            Nat::Big(b) => s.serialize_str(&b.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Nat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(Nat::Small(v)),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}
