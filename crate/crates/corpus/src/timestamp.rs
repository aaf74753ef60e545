//! Month-granularity timestamps and their assignment from a graph coloring.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{CorpusError, ProblemId};

/// A calendar month, serialized as zero-padded `"YYYY-MM"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp {
    year: i32,
    month: u8,
}

impl Timestamp {
    pub fn new(year: i32, month: u8) -> Result<Self, CorpusError> {
        if !(1..=12).contains(&month) || year < 0 {
            return Err(CorpusError::InvalidTimestamp(format!("{year:04}-{month:02}")));
        }
        Ok(Self { year, month })
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn month(&self) -> u8 {
        self.month
    }

    /// Advances by `k` months, rolling the year as needed.
    pub fn plus_months(&self, k: u32) -> Self {
        let total = (self.year as i64) * 12 + (self.month as i64 - 1) + k as i64;
        Self {
            year: (total / 12) as i32,
            month: (total % 12 + 1) as u8,
        }
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for Timestamp {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CorpusError::InvalidTimestamp(s.to_string());
        let (y, m) = s.split_once('-').ok_or_else(bad)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(bad());
        }
        let year: i32 = y.parse().map_err(|_| bad())?;
        let month: u8 = m.parse().map_err(|_| bad())?;
        Timestamp::new(year, month).map_err(|_| bad())
    }
}

impl Serialize for Timestamp {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Maps each problem's color to a concrete month: color `k` becomes
/// `base + k` months. Because the coloring is proper, two problems that
/// share an entity always land on different months.
pub fn assign_timestamps(
    coloring: &BTreeMap<ProblemId, u32>,
    base: Timestamp,
) -> BTreeMap<ProblemId, Timestamp> {
    coloring
        .iter()
        .map(|(id, &color)| (id.clone(), base.plus_months(color)))
        .collect()
}
