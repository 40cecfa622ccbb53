// Copyright 2026 The cba-rs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Exact fractions for support and confidence bookkeeping.
//!
//! [`Frac`] keeps the raw numerator and denominator (so `2/2` prints as
//! `2/2`, not `1/1`) and compares by cross-multiplication. [`Threshold`]
//! turns a user supplied decimal such as `0.15` into the rational `15/100`
//! so that threshold tests are exact.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{CbaError, Result};

/// An unreduced non-negative fraction `num/den` with `den > 0`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Frac {
    pub num: u64,
    pub den: u64,
}

impl Frac {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "fraction with zero denominator");
        Frac { num, den }
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialEq for Frac {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frac {}

impl PartialOrd for Frac {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frac {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl fmt::Display for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Maximum number of fractional decimal digits kept from a threshold.
const MAX_THRESHOLD_DIGITS: u32 = 15;

/// A threshold in `[0, 1]` held as an exact decimal rational.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "f64", try_from = "f64")]
pub struct Threshold {
    num: u64,
    den: u64,
}

impl Threshold {
    /// Builds the threshold from the shortest decimal rendering of `x`.
    /// More than 15 fractional digits are rounded away.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() || !(0.0..=1.0).contains(&x) {
            return Err(CbaError::InvalidThreshold(x));
        }
        let text = format!("{x}");
        let (int_part, frac_part) = text.split_once('.').unwrap_or((text.as_str(), ""));
        let t = if frac_part.len() as u32 > MAX_THRESHOLD_DIGITS {
            let den = 10u64.pow(MAX_THRESHOLD_DIGITS);
            Threshold {
                num: (x * den as f64).round() as u64,
                den,
            }
        } else {
            let den = 10u64.pow(frac_part.len() as u32);
            let int: u64 = int_part.parse().map_err(|_| CbaError::InvalidThreshold(x))?;
            let frac: u64 = if frac_part.is_empty() {
                0
            } else {
                frac_part.parse().map_err(|_| CbaError::InvalidThreshold(x))?
            };
            Threshold {
                num: int * den + frac,
                den,
            }
        };
        Ok(t)
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `count / total >= self`, evaluated exactly.
    pub fn admits(self, count: u64, total: u64) -> bool {
        count as u128 * self.den as u128 >= self.num as u128 * total as u128
    }
}

impl From<Threshold> for f64 {
    fn from(t: Threshold) -> f64 {
        t.value()
    }
}

impl TryFrom<f64> for Threshold {
    type Error = CbaError;

    fn try_from(x: f64) -> Result<Self> {
        Threshold::from_f64(x)
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}
