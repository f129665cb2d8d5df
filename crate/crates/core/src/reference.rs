//! Country-level monthly reference consumption.
//!
//! Values are read as *per-household* monthly kWh. National totals must be
//! divided by the household count when the file is authored.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Scalar;

pub const MONTH_NAMES: [&str; 12] = [
    "January",
    "February",
    "March",
    "April",
    "May",
    "June",
    "July",
    "August",
    "September",
    "October",
    "November",
    "December",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct ReferenceProfile<T> {
    country: String,
    #[serde(rename = "source")]
    source_label: String,
    monthly_kwh: [T; 12],
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar")]
struct RawProfile<T> {
    country: String,
    #[serde(default)]
    source: String,
    monthly_kwh: Vec<T>,
}

impl<T: Scalar> ReferenceProfile<T> {
    pub fn new(country: &str, source_label: &str, monthly_kwh: [T; 12]) -> Result<Self> {
        let valid_code = country.len() == 2 && country.bytes().all(|b| b.is_ascii_uppercase());
        if !valid_code {
            return Err(Error::Validation(format!(
                "country `{country}` is not a two-letter upper-case code"
            )));
        }
        for (name, v) in MONTH_NAMES.iter().zip(&monthly_kwh) {
            if !(v.is_finite() && *v > T::zero()) {
                return Err(Error::Validation(format!(
                    "reference value for {name} must be positive, got {v}"
                )));
            }
        }
        Ok(ReferenceProfile {
            country: country.to_string(),
            source_label: source_label.to_string(),
            monthly_kwh,
        })
    }

    pub fn country(&self) -> &str {
        &self.country
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    pub fn monthly_kwh(&self) -> &[T; 12] {
        &self.monthly_kwh
    }

    /// Reference value for a 1-based month.
    pub fn month(&self, m: u32) -> T {
        self.monthly_kwh[m as usize - 1]
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawProfile<T> =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        let n = raw.monthly_kwh.len();
        let monthly: [T; 12] = raw
            .monthly_kwh
            .try_into()
            .map_err(|_| Error::Schema(format!("expected 12 monthly values, found {n}")))?;
        ReferenceProfile::new(&raw.country, &raw.source, monthly)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serializes")
    }
}

pub fn load_reference_profile<T: Scalar>(path: &Path) -> Result<ReferenceProfile<T>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ReferenceProfile::from_json(&text)
}

pub fn save_reference_profile<T: Scalar>(path: &Path, p: &ReferenceProfile<T>) -> Result<()> {
    fs::write(path, p.to_json()).map_err(|e| Error::io(path, e))
}
