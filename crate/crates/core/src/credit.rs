//! Fractional author credit.
//!
//! Fields that list authors alphabetically split credit equally. Fields that
//! encode contribution through byline order use positional weights whose
//! scheme depends on whether the first and last authors share a university.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::corpus::Author;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Convention {
    Alphabetical,
    PositionWeighted,
}

impl Convention {
    pub fn as_str(self) -> &'static str {
        match self {
            Convention::Alphabetical => "alphabetical",
            Convention::PositionWeighted => "position_weighted",
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "alphabetical" => Ok(Convention::Alphabetical),
            "position_weighted" | "position-weighted" => Ok(Convention::PositionWeighted),
            other => Err(Error::Parse {
                what: "credit convention",
                input: other.to_string(),
            }),
        }
    }
}

/// Positional scheme for a position-weighted byline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositionScheme {
    /// First and last authors share a university: 40% each, 20% to the rest.
    SameUniversity,
    /// First and last authors at different universities: 30% first and last,
    /// 15% second and penultimate, 10% to the rest.
    DifferentUniversities,
}

pub const SAME_UNI_END_SHARE: f64 = 0.40;
pub const SAME_UNI_MIDDLE_POOL: f64 = 0.20;
pub const DIFF_UNI_END_SHARE: f64 = 0.30;
pub const DIFF_UNI_INNER_SHARE: f64 = 0.15;
pub const DIFF_UNI_MIDDLE_POOL: f64 = 0.10;

pub fn position_scheme(byline: &[Author]) -> PositionScheme {
    match (byline.first(), byline.last()) {
        (Some(first), Some(last)) if first.university_id == last.university_id => {
            PositionScheme::SameUniversity
        }
        _ => PositionScheme::DifferentUniversities,
    }
}

/// Credit weights for every byline position. Always sums to one.
pub fn byline_weights(byline: &[Author], convention: Convention) -> Vec<f64> {
    let n = byline.len();
    match n {
        0 => Vec::new(),
        1 => vec![1.0],
        _ => match convention {
            Convention::Alphabetical => vec![1.0 / n as f64; n],
            Convention::PositionWeighted => positional_weights(n, position_scheme(byline)),
        },
    }
}

/// Positional weights for `n >= 2` authors. When the byline is too short to
/// host every named position, the shares that exist are renormalized.
pub fn positional_weights(n: usize, scheme: PositionScheme) -> Vec<f64> {
    assert!(n >= 2);
    let mut w = vec![0.0; n];
    let complete = match scheme {
        PositionScheme::SameUniversity => {
            w[0] = SAME_UNI_END_SHARE;
            w[n - 1] = SAME_UNI_END_SHARE;
            let middle = n - 2;
            for x in &mut w[1..n - 1] {
                *x = SAME_UNI_MIDDLE_POOL / middle as f64;
            }
            middle > 0
        }
        PositionScheme::DifferentUniversities => {
            w[0] = DIFF_UNI_END_SHARE;
            w[n - 1] = DIFF_UNI_END_SHARE;
            if n >= 3 {
                // second and penultimate coincide when n == 3
                w[1] = DIFF_UNI_INNER_SHARE;
                w[n - 2] = DIFF_UNI_INNER_SHARE;
            }
            let middle = n.saturating_sub(4);
            for x in w.iter_mut().take(n.saturating_sub(2)).skip(2) {
                *x = DIFF_UNI_MIDDLE_POOL / middle as f64;
            }
            middle > 0
        }
    };
    if !complete {
        let total: f64 = w.iter().sum();
        for x in &mut w {
            *x /= total;
        }
    }
    w
}

pub fn fractional_contribution(
    byline: &[Author],
    position: usize,
    convention: Convention,
) -> Result<f64> {
    if position >= byline.len() {
        return Err(Error::PositionOutOfRange {
            position,
            len: byline.len(),
        });
    }
    Ok(byline_weights(byline, convention)[position])
}

/// Total credit earned by `author_id` (summed if listed more than once).
pub fn author_credit(byline: &[Author], author_id: &str, convention: Convention) -> f64 {
    let weights = byline_weights(byline, convention);
    byline
        .iter()
        .zip(weights)
        .filter(|(a, _)| a.author_id == author_id)
        .map(|(_, w)| w)
        .sum()
}

/// UDAs whose fields order bylines by contribution.
pub const POSITION_WEIGHTED_UDAS: [&str; 3] = ["BIO", "MED", "AVS"];

/// Resolves the credit convention of an SDS.
///
/// Lookup order: global override, explicit SDS entry, then the UDA default
/// (life sciences position-weighted, everything else alphabetical) unless
/// defaults are disabled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConventionMap {
    by_sds: BTreeMap<String, Convention>,
    global_override: Option<Convention>,
    uda_defaults: bool,
}

impl Default for ConventionMap {
    fn default() -> Self {
        Self {
            by_sds: BTreeMap::new(),
            global_override: None,
            uda_defaults: true,
        }
    }
}

impl ConventionMap {
    /// A map with no fallbacks: every SDS must be listed.
    pub fn explicit() -> Self {
        Self {
            uda_defaults: false,
            ..Self::default()
        }
    }

    pub fn insert(&mut self, sds: impl Into<String>, convention: Convention) {
        self.by_sds.insert(sds.into(), convention);
    }

    pub fn with_override(mut self, convention: Option<Convention>) -> Self {
        self.global_override = convention;
        self
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, Convention)> {
        self.by_sds.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn resolve(&self, sds: &str, uda: &str) -> Result<Convention> {
        if let Some(c) = self.global_override {
            return Ok(c);
        }
        if let Some(c) = self.by_sds.get(sds) {
            return Ok(*c);
        }
        if self.uda_defaults {
            return Ok(if POSITION_WEIGHTED_UDAS.contains(&uda) {
                Convention::PositionWeighted
            } else {
                Convention::Alphabetical
            });
        }
        Err(Error::UnresolvedConvention(sds.to_string()))
    }
}
