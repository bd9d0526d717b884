use serde::{Deserialize, Deserializer, Serialize};
use std::fmt;
use std::str::FromStr;

/// A sample or step count that also accepts scientific notation (`1e6`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Count(pub usize);

const MAX_EXACT: f64 = 9_007_199_254_740_992.0;

impl Count {
    fn from_f64(x: f64) -> Result<Self, String> {
        if x.is_finite() && x >= 0.0 && x.fract() == 0.0 && x <= MAX_EXACT {
            Ok(Count(x as usize))
        } else {
            Err(format!("`{x}` is not a nonnegative whole number"))
        }
    }
}

impl FromStr for Count {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim().replace('_', "");
        if let Ok(n) = s.parse::<usize>() {
            return Ok(Count(n));
        }
        let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
        Count::from_f64(x)
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<'de> Deserialize<'de> for Count {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Float(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(Count(n as usize)),
            Raw::Float(x) => Count::from_f64(x),
            Raw::Text(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}
