//! Fixed-width bit strings.
//!
//! Text form is ASCII `0`/`1`, most significant bit first. The empty string
//! is the single 0-bit value.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, MixError};

/// Widest string we represent. Elements and indices both live in a `u64`.
pub const MAX_WIDTH: u32 = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits {
    value: u64,
    width: u32,
}

impl Bits {
    pub fn new(value: u64, width: u32) -> Result<Self, MixError> {
        if width > MAX_WIDTH {
            return Err(invalid(format!("bit width {width} exceeds {MAX_WIDTH}")));
        }
        if width < 64 && value >> width != 0 {
            return Err(invalid(format!("value {value} does not fit in {width} bits")));
        }
        Ok(Bits { value, width })
    }

    /// Caller guarantees `value < 2^width`.
    pub(crate) fn raw(value: u64, width: u32) -> Self {
        debug_assert!(width <= MAX_WIDTH && value >> width == 0);
        Bits { value, width }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn width(&self) -> u32 {
        self.width
    }
}

/// Number of bits needed to write every value in `0..count`.
pub fn width_for(count: u64) -> u32 {
    if count <= 1 {
        0
    } else {
        64 - (count - 1).leading_zeros()
    }
}

pub fn format_bits(value: u64, width: u32) -> String {
    (0..width)
        .rev()
        .map(|k| if (value >> k) & 1 == 1 { '1' } else { '0' })
        .collect()
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_bits(self.value, self.width))
    }
}

impl FromStr for Bits {
    type Err = MixError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let width = s.len() as u32;
        if width > MAX_WIDTH {
            return Err(invalid(format!("bit string of length {width} is too long")));
        }
        let mut value = 0u64;
        for c in s.chars() {
            value = (value << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    other => return Err(invalid(format!("bad bit character {other:?}"))),
                };
        }
        Ok(Bits { value, width })
    }
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn msb_first() {
        let b: Bits = "101".parse().unwrap();
        assert_eq!(b.value(), 5);
        assert_eq!(b.width(), 3);
        assert_eq!(Bits::raw(1, 4).to_string(), "0001");
    }

    #[test]
    fn rejects_overflow_and_junk() {
        assert!(Bits::new(8, 3).is_err());
        assert!("10a".parse::<Bits>().is_err());
    }

    #[test]
    fn widths() {
        assert_eq!(width_for(0), 0);
        assert_eq!(width_for(1), 0);
        assert_eq!(width_for(2), 1);
        assert_eq!(width_for(5), 3);
        assert_eq!(width_for(8), 3);
        assert_eq!(width_for(9), 4);
    }

    proptest! {
        #[test]
        fn text_round_trip(width in 0u32..=20, raw in any::<u64>()) {
            let value = if width == 0 { 0 } else { raw & ((1u64 << width) - 1) };
            let b = Bits::new(value, width).unwrap();
            prop_assert_eq!(b.to_string().parse::<Bits>().unwrap(), b);
        }
    }
}
