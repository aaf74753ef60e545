//! Exact decimal numbers and number-token extraction.
//!
//! Gold answers and model answers are compared *numerically* (so `"72"`,
//! `"72.0"` and `"72.00"` agree) but without ever rounding, which rules out
//! binary floats. [`Decimal`] is an arbitrary-precision scaled integer.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// An exact decimal: `mantissa × 10^(-scale)`, kept normalized so the
/// fractional part has no trailing zeros. Equality is therefore numeric.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Decimal {
    mantissa: BigInt,
    scale: u32,
}

impl Decimal {
    pub fn zero() -> Self {
        Self {
            mantissa: BigInt::zero(),
            scale: 0,
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self {
            mantissa: BigInt::from(v),
            scale: 0,
        }
    }

    fn normalized(mut mantissa: BigInt, mut scale: u32) -> Self {
        if mantissa.is_zero() {
            return Self::zero();
        }
        let ten = BigInt::from(10);
        while scale > 0 && (&mantissa % &ten).is_zero() {
            mantissa /= &ten;
            scale -= 1;
        }
        Self { mantissa, scale }
    }

    fn align(&self, other: &Self) -> (BigInt, BigInt, u32) {
        let scale = self.scale.max(other.scale);
        let a = &self.mantissa * BigInt::from(10).pow(scale - self.scale);
        let b = &other.mantissa * BigInt::from(10).pow(scale - other.scale);
        (a, b, scale)
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }
}

impl Add for &Decimal {
    type Output = Decimal;
    fn add(self, rhs: &Decimal) -> Decimal {
        let (a, b, scale) = self.align(rhs);
        Decimal::normalized(a + b, scale)
    }
}

impl Sub for &Decimal {
    type Output = Decimal;
    fn sub(self, rhs: &Decimal) -> Decimal {
        let (a, b, scale) = self.align(rhs);
        Decimal::normalized(a - b, scale)
    }
}

impl Mul for &Decimal {
    type Output = Decimal;
    fn mul(self, rhs: &Decimal) -> Decimal {
        Decimal::normalized(&self.mantissa * &rhs.mantissa, self.scale + rhs.scale)
    }
}

impl Neg for Decimal {
    type Output = Decimal;
    fn neg(self) -> Decimal {
        Decimal {
            mantissa: -self.mantissa,
            scale: self.scale,
        }
    }
}

impl PartialOrd for Decimal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Decimal {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.align(other);
        a.cmp(&b)
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale == 0 {
            return write!(f, "{}", self.mantissa);
        }
        let sign = if self.mantissa.is_negative() { "-" } else { "" };
        let digits = self.mantissa.abs().to_string();
        let scale = self.scale as usize;
        if digits.len() > scale {
            let (int_part, frac_part) = digits.split_at(digits.len() - scale);
            write!(f, "{sign}{int_part}.{frac_part}")
        } else {
            write!(f, "{sign}0.{}{digits}", "0".repeat(scale - digits.len()))
        }
    }
}

/// Error parsing a decimal string.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a decimal number: {0:?}")]
pub struct ParseDecimalError(pub String);

impl FromStr for Decimal {
    type Err = ParseDecimalError;

    /// Accepts optional sign, optional thousands commas in the integer part,
    /// optional fractional part, optional surrounding `$`/`%` clutter.
    fn from_str(raw: &str) -> Result<Self, Self::Err> {
        let bad = || ParseDecimalError(raw.to_string());
        let s = raw
            .trim()
            .trim_start_matches('$')
            .trim_end_matches('%')
            .trim_end_matches('$')
            .trim();
        let s = s.replace(',', "");
        let (negative, s) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(&s)),
        };
        if s.is_empty() {
            return Err(bad());
        }
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let combined = format!("{int_part}{frac_part}");
        let mut mantissa: BigInt = if combined.is_empty() {
            BigInt::zero()
        } else {
            combined.parse().map_err(|_| bad())?
        };
        if negative {
            mantissa = -mantissa;
        }
        Ok(Decimal::normalized(mantissa, frac_part.len() as u32))
    }
}

impl Serialize for Decimal {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Number tokens of a text with their byte spans, in order of appearance.
///
/// A token is a maximal digit run, optionally with comma thousands
/// separators and one decimal point; commas are stripped in the returned
/// token (`"1,200.50"` → `"1200.50"`) but the span covers the original
/// spelling.
pub fn number_token_spans(text: &str) -> Vec<(std::ops::Range<usize>, String)> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if !bytes[i].is_ascii_digit() {
            i += 1;
            continue;
        }
        let start = i;
        let mut seen_dot = false;
        let mut end = i;
        while i < bytes.len() {
            let b = bytes[i];
            if b.is_ascii_digit() {
                end = i + 1;
                i += 1;
            } else if b == b',' && i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                i += 1;
            } else if b == b'.' && !seen_dot && i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit()
            {
                seen_dot = true;
                end = i + 1;
                i += 1;
            } else {
                break;
            }
        }
        let token: String = text[start..end].chars().filter(|&c| c != ',').collect();
        tokens.push((start..end, token));
    }
    tokens
}

/// Extracts the number tokens of a text in order of appearance. See
/// [`number_token_spans`] for the tokenization rules. Used for
/// digit-preservation checks and for simple answer mining.
pub fn extract_number_tokens(text: &str) -> Vec<String> {
    number_token_spans(text)
        .into_iter()
        .map(|(_, token)| token)
        .collect()
}

/// Multiset of number tokens in a text.
pub fn number_multiset(text: &str) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for tok in extract_number_tokens(text) {
        *out.entry(tok).or_insert(0) += 1;
    }
    out
}

/// Multiset of digit characters in a text (used for "no digits lost" checks
/// where token boundaries may legitimately move).
pub fn digit_multiset(text: &str) -> BTreeMap<char, usize> {
    let mut out = BTreeMap::new();
    for c in text.chars().filter(|c| c.is_ascii_digit()) {
        *out.entry(c).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(s: &str) -> Decimal {
        s.parse().unwrap()
    }

    #[test]
    fn numeric_equality_ignores_trailing_zeros() {
        assert_eq!(d("72"), d("72.0"));
        assert_eq!(d("72"), d("72.00"));
        assert_eq!(d("0.5"), d(".5"));
        assert_eq!(d("-3.10"), d("-3.1"));
        assert_ne!(d("72"), d("72.01"));
    }

    #[test]
    fn parses_clutter() {
        assert_eq!(d("$1,200"), d("1200"));
        assert_eq!(d(" 15% "), d("15"));
        assert_eq!(d("+4"), d("4"));
    }

    #[test]
    fn rejects_non_numbers() {
        for bad in ["", "abc", "1.2.3", "--4", "1..2", "."] {
            assert!(bad.parse::<Decimal>().is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn arithmetic_is_exact() {
        assert_eq!(&d("0.1") + &d("0.2"), d("0.3"));
        assert_eq!(&d("1.5") * &d("2"), d("3"));
        assert_eq!(&d("10") - &d("0.01"), d("9.99"));
        assert_eq!((&d("25") * &d("3")).to_string(), "75");
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(d("007").to_string(), "7");
        assert_eq!(d("1.50").to_string(), "1.5");
        assert_eq!(d("-0.25").to_string(), "-0.25");
        assert_eq!(d("0.0").to_string(), "0");
    }

    #[test]
    fn extracts_number_tokens_in_order() {
        assert_eq!(
            extract_number_tokens("sold 48 clips, then 1,200.50 more in 2024."),
            vec!["48", "1200.50", "2024"]
        );
        assert_eq!(extract_number_tokens("no numbers here"), Vec::<String>::new());
        assert_eq!(extract_number_tokens("ends with 7"), vec!["7"]);
        assert_eq!(extract_number_tokens("3.x is not decimal"), vec!["3"]);
    }

    proptest! {
        #[test]
        fn parse_display_roundtrip(int in -100_000i64..100_000, frac in 0u32..10_000) {
            let s = format!("{int}.{frac:04}");
            let v = d(&s);
            let back = d(&v.to_string());
            prop_assert_eq!(v, back);
        }

        #[test]
        fn addition_commutes(a in -1_000_000i64..1_000_000, b in -1_000_000i64..1_000_000) {
            let (a, b) = (Decimal::from_int(a), Decimal::from_int(b));
            prop_assert_eq!(&a + &b, &b + &a);
        }

        #[test]
        fn ordering_matches_f64_on_small_ints(a in -10_000i64..10_000, b in -10_000i64..10_000) {
            let (da, db) = (Decimal::from_int(a), Decimal::from_int(b));
            prop_assert_eq!(da.cmp(&db), a.cmp(&b));
        }
    }
}
