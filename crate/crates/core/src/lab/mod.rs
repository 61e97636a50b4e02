//! Exhaustive inversion and uniqueness experiments.
//!
//! The only known way to invert a public key is to try every balanced split
//! of the roots `{1, ..., p-1}` and keep the ones whose factor satisfies the
//! congruence. [`brute_force_invert`] does exactly that, with two sound
//! filters in front of the full check. [`uniqueness_survey`] maps *every*
//! split to its public key and groups the splits that collide.
//!
//! Enumeration is lexicographic over sorted root sequences, split into
//! contiguous rank ranges for the workers, and merged in range order; the
//! worker count never changes a result.

mod attack;
pub mod combinations;
mod parallel;
pub(crate) mod survey;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use thiserror::Error;

use crate::gf::{GfError, Prime};
use crate::owf::OwfError;

pub use attack::{brute_force_invert, AttackOptions, AttackResult, Preimage};
pub use survey::{
    expected_rows, uniqueness_survey, verify_report, CollisionGroup, ReportDefect, SurveyOptions,
    SurveyReport, SurveyRow,
};

/// Default ceiling on enumerated candidates.
pub const DEFAULT_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Owf(#[from] OwfError),
    #[error("search space for p = {p} has {size} candidates, above the limit of {limit}; it grows exponentially in p")]
    SearchSpaceTooLarge { p: u64, size: BigUint, limit: u64 },
}

/// Which factorizations to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchMode {
    /// `deg P = deg Q = (p-1)/2` only.
    Balanced,
    /// Every nontrivial split, `1 <= deg P <= p-2`.
    All,
}

/// Whether `(P, Q)` and `(Q, P)` count as different factorizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pairing {
    Ordered,
    Unordered,
}

impl SearchMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchMode::Balanced => "balanced",
            SearchMode::All => "all",
        }
    }

    /// Admissible `deg P` values.
    pub(crate) fn degrees(self, p: Prime) -> std::ops::RangeInclusive<usize> {
        match self {
            SearchMode::Balanced => p.half()..=p.half(),
            SearchMode::All => 1..=p.units() - 1,
        }
    }
}

impl Pairing {
    pub fn as_str(self) -> &'static str {
        match self {
            Pairing::Ordered => "ordered",
            Pairing::Unordered => "unordered",
        }
    }
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SearchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "balanced" => Ok(SearchMode::Balanced),
            "all" => Ok(SearchMode::All),
            _ => Err(format!("unknown mode `{s}` (expected balanced or all)")),
        }
    }
}

impl FromStr for Pairing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ordered" => Ok(Pairing::Ordered),
            "unordered" => Ok(Pairing::Unordered),
            _ => Err(format!(
                "unknown pairing `{s}` (expected ordered or unordered)"
            )),
        }
    }
}

/// Number of ordered factor pairs in the given mode:
/// `C(p-1, (p-1)/2)` balanced, `2^(p-1) - 2` for all nontrivial splits.
pub fn count_search_space(p: Prime, mode: SearchMode) -> BigUint {
    let n = p.units();
    match mode {
        SearchMode::Balanced => big_binomial(n, p.half()),
        SearchMode::All => (BigUint::from(1u8) << n) - 2u8,
    }
}

fn big_binomial(n: usize, k: usize) -> BigUint {
    (0..k).fold(BigUint::from(1u8), |c, i| c * (n - i) / (i + 1))
}

/// Fails with [`LabError::SearchSpaceTooLarge`] unless `size <= limit`;
/// returns the size as a `u64`.
fn within_limit(p: Prime, size: BigUint, limit: u64) -> Result<u64, LabError> {
    match u64::try_from(&size) {
        Ok(n) if n <= limit => Ok(n),
        _ => Err(LabError::SearchSpaceTooLarge {
            p: p.get(),
            size,
            limit,
        }),
    }
}
