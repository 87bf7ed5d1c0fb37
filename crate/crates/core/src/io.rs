//! JSON system files: `{"d": 2, "n": 3, "p": [ ... d^n entries ... ]}`.
//!
//! Entries follow the crate-wide index order (coordinate 0 most significant).
//! Floats are written in shortest round-trip form, so save/load is lossless.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::{JointDistribution, SystemShape};

/// Normalization slack accepted when reading a file.
pub const LOAD_TOL: f64 = 1e-9;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    d: usize,
    n: usize,
    p: Vec<f64>,
}

fn schema(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("field `{field}`: {msg}"))
}

pub fn system_from_json(text: &str) -> Result<JointDistribution> {
    let file: SystemFile = serde_json::from_str(text)?;
    if file.d < 2 {
        return Err(schema("d", format!("alphabet size must be at least 2, got {}", file.d)));
    }
    if file.n == 0 {
        return Err(schema("n", "system needs at least one coordinate"));
    }
    let shape = SystemShape::new(file.d, file.n).map_err(|e| schema("n", e))?;
    if file.p.len() != shape.num_states() {
        return Err(schema(
            "p",
            format!("length {} does not match d^n = {}", file.p.len(), shape.num_states()),
        ));
    }
    JointDistribution::with_tolerance(shape, file.p, LOAD_TOL).map_err(|e| schema("p", e))
}

pub fn system_to_json(dist: &JointDistribution) -> String {
    let file = SystemFile { d: dist.shape().d(), n: dist.shape().n(), p: dist.probs().to_vec() };
    serde_json::to_string_pretty(&file).expect("plain struct serializes")
}

pub fn load_system(path: impl AsRef<Path>) -> Result<JointDistribution> {
    system_from_json(&fs::read_to_string(path)?)
}

pub fn save_system(dist: &JointDistribution, path: impl AsRef<Path>) -> Result<()> {
    let mut text = system_to_json(dist);
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let shape = SystemShape::new(3, 2).unwrap();
        let w: Vec<f64> = (1..=9).map(|i| (i as f64).sqrt()).collect();
        let dist = JointDistribution::from_weights(shape, w).unwrap();
        let back = system_from_json(&system_to_json(&dist)).unwrap();
        assert_eq!(back, dist);
    }

    #[test]
    fn schema_errors_name_the_field() {
        let err = system_from_json(r#"{"d":1,"n":2,"p":[1.0]}"#).unwrap_err().to_string();
        assert!(err.contains("`d`"), "{err}");
        let err = system_from_json(r#"{"d":2,"n":3,"p":[0.2,0.2,0.2,0.1,0.1,0.1,0.1]}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("`p`") && err.contains("length 7"), "{err}");
        let err = system_from_json(r#"{"d":2,"n":1,"p":[0.5,0.6]}"#).unwrap_err().to_string();
        assert!(err.contains("`p`"), "{err}");
        assert!(system_from_json(r#"{"d":2,"p":[0.5,0.5]}"#).unwrap_err().to_string().contains("`n`"));
    }
}
