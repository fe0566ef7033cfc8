//! The four-valued qualitative sign and its product/sum algebra.

use std::fmt;
use std::ops::{Add, AddAssign, Mul};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A qualitative sign: the direction of a shift in probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
    Zero,
    Ambiguous,
}

impl Sign {
    pub const ALL: [Sign; 4] = [Sign::Plus, Sign::Minus, Sign::Zero, Sign::Ambiguous];

    /// Sign of an observed value: `+` for true, `-` for false.
    pub fn of_value(value: bool) -> Sign {
        if value {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// Sign product: chains influences (transitivity).
    pub fn product(self, other: Sign) -> Sign {
        use Sign::*;
        match (self, other) {
            (Zero, _) | (_, Zero) => Zero,
            (Ambiguous, _) | (_, Ambiguous) => Ambiguous,
            (Plus, s) | (s, Plus) => s,
            (Minus, Minus) => Plus,
        }
    }

    /// Sign sum: composes parallel influences.
    pub fn sum(self, other: Sign) -> Sign {
        use Sign::*;
        match (self, other) {
            (Zero, s) | (s, Zero) => s,
            (Plus, Plus) => Plus,
            (Minus, Minus) => Minus,
            _ => Ambiguous,
        }
    }

    pub fn is_ambiguous(self) -> bool {
        self == Sign::Ambiguous
    }

    /// True for `+` and `-`.
    pub fn is_strict(self) -> bool {
        matches!(self, Sign::Plus | Sign::Minus)
    }

    /// Printable glyph using the typographic minus.
    pub fn glyph(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "\u{2212}",
            Sign::Zero => "0",
            Sign::Ambiguous => "?",
        }
    }

    /// ASCII form, as used in network files and rendered output.
    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
            Sign::Zero => "0",
            Sign::Ambiguous => "?",
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        self.product(rhs)
    }
}

impl Add for Sign {
    type Output = Sign;

    fn add(self, rhs: Sign) -> Sign {
        self.sum(rhs)
    }
}

impl AddAssign for Sign {
    fn add_assign(&mut self, rhs: Sign) {
        *self = self.sum(rhs);
    }
}

impl std::iter::Sum for Sign {
    fn sum<I: Iterator<Item = Sign>>(iter: I) -> Sign {
        iter.fold(Sign::Zero, Sign::sum)
    }
}

impl std::iter::Product for Sign {
    fn product<I: Iterator<Item = Sign>>(iter: I) -> Sign {
        iter.fold(Sign::Plus, Sign::product)
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid sign `{0}`; expected one of +, -, 0, ?")]
pub struct ParseSignError(pub String);

impl FromStr for Sign {
    type Err = ParseSignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+" => Ok(Sign::Plus),
            "-" | "\u{2212}" => Ok(Sign::Minus),
            "0" => Ok(Sign::Zero),
            "?" => Ok(Sign::Ambiguous),
            other => Err(ParseSignError(other.to_string())),
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
