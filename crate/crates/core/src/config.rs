//! Problem description files.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::{H2Class, SurfaceData, SurfaceFlags};
use crate::symring::OracleCaps;
use crate::walls::ChernData;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    pub b2: usize,
    pub gram: Vec<Vec<i64>>,
    #[serde(rename = "K")]
    pub k: Vec<i64>,
    #[serde(default = "one")]
    pub n2: u64,
    #[serde(default)]
    pub flags: SurfaceFlags,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Polarizations {
    #[serde(rename = "H_minus")]
    pub h_minus: H2Class,
    #[serde(rename = "H_plus")]
    pub h_plus: H2Class,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub surface: SurfaceConfig,
    pub chern: ChernData,
    pub polarizations: Polarizations,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<H2Class>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleCaps>,
}

/// A validated problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub surface: SurfaceData,
    pub chern: ChernData,
    pub h_minus: H2Class,
    pub h_plus: H2Class,
    pub c: Option<H2Class>,
    pub caps: OracleCaps,
}

impl ProblemConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks vector lengths against `b2` and builds the surface.
    pub fn validate(&self) -> Result<Problem> {
        let b2 = self.surface.b2;
        if self.surface.gram.len() != b2 {
            return Err(Error::Config(format!(
                "gram has {} rows but b2 = {b2}",
                self.surface.gram.len()
            )));
        }
        let mut vectors = vec![
            ("K", self.surface.k.len()),
            ("c1", self.chern.c1.len()),
            ("H_minus", self.polarizations.h_minus.len()),
            ("H_plus", self.polarizations.h_plus.len()),
        ];
        if let Some(c) = &self.c {
            vectors.push(("C", c.len()));
        }
        for (name, len) in vectors {
            if len != b2 {
                return Err(Error::Config(format!(
                    "{name} has length {len} but b2 = {b2}"
                )));
            }
        }
        let surface = SurfaceData::new(
            self.surface.gram.clone(),
            H2Class(self.surface.k.clone()),
            self.surface.n2,
            self.surface.flags,
        )?;
        Ok(Problem {
            surface,
            chern: self.chern.clone(),
            h_minus: self.polarizations.h_minus.clone(),
            h_plus: self.polarizations.h_plus.clone(),
            c: self.c.clone(),
            caps: self.oracle.unwrap_or_default(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P1: &str = r#"{
        "surface": {"b2": 2, "gram": [[0,1],[1,0]], "K": [-2,-2], "n2": 1,
                    "flags": {"minus_K_effective": true, "K_torsion": false}},
        "chern": {"c1": [1,1], "c2": 2},
        "polarizations": {"H_minus": [1,2], "H_plus": [2,1]},
        "C": [10,-10]
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let c = ProblemConfig::from_json(P1).unwrap();
        assert!(c.surface.flags.minus_k_effective);
        let p = c.validate().unwrap();
        assert_eq!(p.surface.k_squared(), 8);
        assert_eq!(ProblemConfig::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_lengths() {
        let bad = P1.replace("\"n2\": 1", "\"n2\": 1, \"extra\": 0");
        assert!(matches!(
            ProblemConfig::from_json(&bad),
            Err(Error::Config(_))
        ));
        let short = P1.replace("[1,1], \"c2\"", "[1], \"c2\"");
        assert!(matches!(
            ProblemConfig::from_json(&short).unwrap().validate(),
            Err(Error::Config(_))
        ));
        let asym = P1.replace("[[0,1],[1,0]]", "[[0,1],[2,0]]");
        assert_eq!(
            ProblemConfig::from_json(&asym)
                .unwrap()
                .validate()
                .unwrap_err(),
            Error::NotSymmetric
        );
    }
}
