use std::fmt;

use bitvec::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A binary outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Outcome {
    Zero = 0,
    One = 1,
}

impl Outcome {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Outcome::One
        } else {
            Outcome::Zero
        }
    }

    pub fn as_bool(self) -> bool {
        self == Outcome::One
    }

    pub fn flip(self) -> Self {
        Outcome::from_bool(!self.as_bool())
    }

    pub const BOTH: [Outcome; 2] = [Outcome::Zero, Outcome::One];
}

impl TryFrom<u8> for Outcome {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            0 => Ok(Outcome::Zero),
            1 => Ok(Outcome::One),
            other => Err(format!("outcome must be 0 or 1, got {other}")),
        }
    }
}

impl From<Outcome> for u8 {
    fn from(o: Outcome) -> u8 {
        o as u8
    }
}

/// A finite binary string; the empty situation is `□`.
///
/// Bits are packed into `u64` words. Equality is length plus content.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Situation {
    bits: BitVec<u64, Lsb0>,
}

/// A finite realised prefix `ω_{1:n}` of a path.
pub type SequencePrefix = Situation;

impl Situation {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self { bits: BitVec::with_capacity(n) }
    }

    pub fn from_outcomes<I: IntoIterator<Item = Outcome>>(it: I) -> Self {
        Self { bits: it.into_iter().map(Outcome::as_bool).collect() }
    }

    /// Builds from a `"0101"` literal. Panics on other characters; use
    /// [`parse_bits`] for untrusted input.
    pub fn from_str_bits(text: &str) -> Self {
        parse_bits(text).expect("valid bit literal")
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Outcome at zero-based index `k`, i.e. `ω_{k+1}`.
    pub fn get(&self, k: usize) -> Outcome {
        Outcome::from_bool(self.bits[k])
    }

    pub fn last(&self) -> Option<Outcome> {
        self.bits.last().map(|b| Outcome::from_bool(*b))
    }

    pub fn push(&mut self, x: Outcome) {
        self.bits.push(x.as_bool());
    }

    pub fn pop(&mut self) -> Option<Outcome> {
        self.bits.pop().map(Outcome::from_bool)
    }

    pub fn truncate(&mut self, n: usize) {
        self.bits.truncate(n);
    }

    /// `s x`
    pub fn child(&self, x: Outcome) -> Self {
        let mut c = self.clone();
        c.push(x);
        c
    }

    /// `s_{1:n}` as an owned situation.
    pub fn prefix(&self, n: usize) -> Self {
        Self { bits: self.bits[..n].to_bitvec() }
    }

    pub fn is_prefix_of(&self, other: &Situation) -> bool {
        self.len() <= other.len() && self.bits[..] == other.bits[..self.len()]
    }

    /// Length of the longest common prefix.
    pub fn common_prefix_len(&self, other: &Situation) -> usize {
        let n = self.len().min(other.len());
        if self.bits[..n] == other.bits[..n] {
            return n;
        }
        (0..n).find(|&k| self.bits[k] != other.bits[k]).unwrap_or(n)
    }

    pub fn ends_with(&self, pattern: &[Outcome]) -> bool {
        if pattern.len() > self.len() {
            return false;
        }
        let start = self.len() - pattern.len();
        pattern.iter().enumerate().all(|(i, p)| self.get(start + i) == *p)
    }

    pub fn iter(&self) -> impl Iterator<Item = Outcome> + '_ {
        self.bits.iter().map(|b| Outcome::from_bool(*b))
    }

    pub fn count_ones(&self) -> usize {
        self.bits.count_ones()
    }

    /// The bits packed into 64-bit words, `ω_1` in the least significant
    /// bit of the first word; the last word is zero-padded.
    pub fn words(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.chunks(64).map(|c| c.load_le::<u64>())
    }
}

impl fmt::Display for Situation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("□");
        }
        for b in self.bits.iter() {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Situation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Situation({self})")
    }
}

/// Serialised as a string of `0`/`1` characters.
impl Serialize for Situation {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let text: String = self.iter().map(|x| if x.as_bool() { '1' } else { '0' }).collect();
        ser.serialize_str(&text)
    }
}

impl<'de> Deserialize<'de> for Situation {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(de)?;
        parse_bits(&text).map_err(serde::de::Error::custom)
    }
}

impl FromIterator<Outcome> for Situation {
    fn from_iter<I: IntoIterator<Item = Outcome>>(iter: I) -> Self {
        Self::from_outcomes(iter)
    }
}

/// Parses the bitstream format: `'0'`/`'1'` digits, whitespace ignored,
/// `'#'` starts a comment running to the end of the line.
pub fn parse_bits(text: &str) -> Result<SequencePrefix> {
    let mut out = Situation::with_capacity(text.len());
    let mut in_comment = false;
    for (offset, c) in text.char_indices() {
        if in_comment {
            in_comment = c != '\n';
            continue;
        }
        match c {
            '0' => out.push(Outcome::Zero),
            '1' => out.push(Outcome::One),
            '#' => in_comment = true,
            c if c.is_whitespace() => {}
            found => return Err(Error::Parse { offset, found }),
        }
    }
    Ok(out)
}

/// Canonical bitstream rendering: 64 digits per line, trailing newline.
pub fn to_bits_string(s: &Situation) -> String {
    let mut out = String::with_capacity(s.len() + s.len() / 64 + 1);
    for (k, x) in s.iter().enumerate() {
        if k > 0 && k % 64 == 0 {
            out.push('\n');
        }
        out.push(if x.as_bool() { '1' } else { '0' });
    }
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_ignores_whitespace_and_comments() {
        let p = parse_bits("0100 11 # note").unwrap();
        assert_eq!(p.to_string(), "010011");
        let p = parse_bits("01 # 111\n1\t0").unwrap();
        assert_eq!(p.to_string(), "0110");
    }

    #[test]
    fn parse_empty_is_box() {
        let p = parse_bits("").unwrap();
        assert!(p.is_empty());
        assert_eq!(p.to_string(), "□");
    }

    #[test]
    fn parse_reports_offset() {
        match parse_bits("012") {
            Err(Error::Parse { offset, found }) => {
                assert_eq!(offset, 2);
                assert_eq!(found, '2');
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn prefix_relations() {
        let s = Situation::from_str_bits("0110");
        assert!(s.prefix(2).is_prefix_of(&s));
        assert!(Situation::empty().is_prefix_of(&s));
        assert!(!Situation::from_str_bits("1").is_prefix_of(&s));
        assert_eq!(s.common_prefix_len(&Situation::from_str_bits("0100")), 2);
        assert!(s.ends_with(&[Outcome::One, Outcome::Zero]));
        assert!(!s.ends_with(&[Outcome::One, Outcome::One, Outcome::Zero, Outcome::One, Outcome::Zero]));
        assert_eq!(s.count_ones(), 2);
    }

    proptest! {
        #[test]
        fn serialize_parse_roundtrip(bits in proptest::collection::vec(any::<bool>(), 0..300)) {
            let s: Situation = bits.iter().map(|b| Outcome::from_bool(*b)).collect();
            prop_assert_eq!(parse_bits(&to_bits_string(&s)).unwrap(), s);
        }
    }
}
