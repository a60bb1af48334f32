//! Operator JSON interchange: `{"dim": D, "re": [[...]], "im": [[...]]}`,
//! row-major, shared by every module and the CLI.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::ComplexMatrix;
use num_complex::Complex64 as C64;

#[derive(Debug, Error)]
pub enum OperatorJsonError {
    #[error("operator JSON is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("operator JSON is malformed: {0}")]
    Shape(String),
}

/// Serde mirror of the operator wire format.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OperatorJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl OperatorJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let dim = m.dim();
        let component = |pick: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..dim)
                .map(|i| (0..dim).map(|j| pick(&m[(i, j)])).collect())
                .collect()
        };
        Self {
            dim,
            re: component(|c| c.re),
            im: component(|c| c.im),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, OperatorJsonError> {
        let d = self.dim;
        if d == 0 {
            return Err(OperatorJsonError::Shape("dim must be positive".into()));
        }
        for (name, part) in [("re", &self.re), ("im", &self.im)] {
            if part.len() != d || part.iter().any(|row| row.len() != d) {
                return Err(OperatorJsonError::Shape(format!(
                    "{name} must be a {d}×{d} array"
                )));
            }
            if part.iter().flatten().any(|v| !v.is_finite()) {
                return Err(OperatorJsonError::Shape(format!(
                    "{name} contains a non-finite entry"
                )));
            }
        }
        Ok(ComplexMatrix::from_fn(d, |i, j| {
            C64::new(self.re[i][j], self.im[i][j])
        }))
    }
}

/// Renders an operator in its wire format (pretty-printed, deterministic).
pub fn operator_to_json(m: &ComplexMatrix) -> String {
    serde_json::to_string_pretty(&OperatorJson::from_matrix(m))
        .expect("operator serialization is infallible")
}

/// Parses and validates an operator from its wire format.
pub fn operator_from_json(text: &str) -> Result<ComplexMatrix, OperatorJsonError> {
    let doc: OperatorJson = serde_json::from_str(text)?;
    doc.to_matrix()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_entries_bitwise() {
        let m = ComplexMatrix::from_fn(3, |i, j| {
            C64::new(0.1 * i as f64 - 7.25 * j as f64, (i * j) as f64 / 3.0)
        });
        let text = operator_to_json(&m);
        let back = operator_from_json(&text).unwrap();
        assert_eq!(m, back);
        assert_eq!(text, operator_to_json(&back));
    }

    #[test]
    fn shape_violations_are_rejected() {
        assert!(operator_from_json("{").is_err());
        assert!(operator_from_json(r#"{"dim":2,"re":[[1,0]],"im":[[0,0],[0,0]]}"#).is_err());
        assert!(operator_from_json(r#"{"dim":0,"re":[],"im":[]}"#).is_err());
        assert!(
            operator_from_json(r#"{"dim":1,"re":[[1e999]],"im":[[0]]}"#).is_err(),
            "non-finite entries must be rejected"
        );
    }
}
