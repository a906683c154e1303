//! Common result type for the statistical null models.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{skewness_of_counts, BipartiteGraph};
use crate::matrix::SquareMatrix;

/// Run metadata attached to every null-model result. `extra` carries
/// model-specific parameters (trials, probability method, seed) so a run can
/// be reproduced from its serialized summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub model_name: String,
    pub rows: usize,
    pub cols: usize,
    pub row_skew: f64,
    pub col_skew: f64,
    pub runtime_seconds: f64,
    #[serde(flatten)]
    pub extra: BTreeMap<String, serde_json::Value>,
}

impl ModelSummary {
    /// Summary skeleton for a model run on `b`; skews are computed from the
    /// margins, runtime is stamped by the caller when the run finishes.
    pub fn for_graph(model_name: &str, b: &BipartiteGraph) -> Result<Self> {
        let margins = b.margins();
        Ok(Self {
            model_name: model_name.to_string(),
            rows: b.rows(),
            cols: b.cols(),
            row_skew: skewness_of_counts(&margins.rows)?,
            col_skew: skewness_of_counts(&margins.cols)?,
            runtime_seconds: 0.0,
            extra: BTreeMap::new(),
        })
    }
}

/// Per-pair tail probabilities under a null model.
///
/// `positive[i][j] = P(G*_ij >= G_ij)` and `negative[i][j] = P(G*_ij <= G_ij)`
/// where `G*` is the projection of a random graph drawn from the model. Mass
/// at the observed weight counts toward both tails, so the two entries sum to
/// at least 1. Diagonal entries are fixed at 1 (self-pairs are never
/// extracted).
#[derive(Debug, Clone, PartialEq)]
pub struct NullModelResult {
    row_labels: Vec<String>,
    positive: SquareMatrix<f64>,
    negative: SquareMatrix<f64>,
    summary: ModelSummary,
}

impl NullModelResult {
    pub fn new(
        row_labels: Vec<String>,
        positive: SquareMatrix<f64>,
        negative: SquareMatrix<f64>,
        summary: ModelSummary,
    ) -> Result<Self> {
        let m = row_labels.len();
        if positive.n() != m || negative.n() != m {
            return Err(Error::InvalidInput(format!(
                "probability matrices are {}x{} and {}x{} but there are {m} labels",
                positive.n(),
                positive.n(),
                negative.n(),
                negative.n()
            )));
        }
        for mat in [&positive, &negative] {
            if !mat.is_symmetric() {
                return Err(Error::InvalidInput(
                    "tail probability matrices must be symmetric".into(),
                ));
            }
            for (i, p) in mat.data().iter().enumerate() {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::InvalidInput(format!(
                        "probability {p} at cell ({}, {}) is outside [0, 1]",
                        i / m,
                        i % m
                    )));
                }
            }
        }
        for i in 0..m {
            for j in 0..m {
                let s = positive.get(i, j) + negative.get(i, j);
                if s < 1.0 - 1e-9 {
                    return Err(Error::InvalidInput(format!(
                        "tails at ({i}, {j}) sum to {s}; mass at the observed value must be counted in both"
                    )));
                }
            }
        }
        Ok(Self {
            row_labels,
            positive,
            negative,
            summary,
        })
    }

    pub fn size(&self) -> usize {
        self.row_labels.len()
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    /// `P(G*_ij >= G_ij)` matrix.
    pub fn positive(&self) -> &SquareMatrix<f64> {
        &self.positive
    }

    /// `P(G*_ij <= G_ij)` matrix.
    pub fn negative(&self) -> &SquareMatrix<f64> {
        &self.negative
    }

    pub fn summary(&self) -> &ModelSummary {
        &self.summary
    }

    pub fn summary_mut(&mut self) -> &mut ModelSummary {
        &mut self.summary
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dummy_summary() -> ModelSummary {
        ModelSummary {
            model_name: "test".into(),
            rows: 2,
            cols: 3,
            row_skew: 0.0,
            col_skew: 0.5,
            runtime_seconds: 1.25,
            extra: BTreeMap::from([("trials".into(), serde_json::json!(100))]),
        }
    }

    #[test]
    fn summary_json_round_trip() {
        let s = dummy_summary();
        let text = serde_json::to_string(&s).unwrap();
        let back: ModelSummary = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.model_name, "test");
        assert_eq!(back.extra["trials"], serde_json::json!(100));
    }

    #[test]
    fn rejects_asymmetric_and_out_of_range() {
        let labels = vec!["a".to_string(), "b".to_string()];
        let ones = SquareMatrix::from_fn(2, |_, _| 1.0);
        let mut asym = ones.clone();
        asym.set(0, 1, 0.5);
        assert!(NullModelResult::new(labels.clone(), asym, ones.clone(), dummy_summary()).is_err());

        let mut big = ones.clone();
        big.set_sym(0, 1, 1.5);
        assert!(NullModelResult::new(labels.clone(), big, ones.clone(), dummy_summary()).is_err());

        let mut thin = ones.clone();
        thin.set_sym(0, 1, 0.4);
        // 0.4 + 1.0 >= 1 is fine
        assert!(NullModelResult::new(labels.clone(), thin.clone(), ones.clone(), dummy_summary()).is_ok());
        // 0.4 + 0.4 < 1 is not
        assert!(NullModelResult::new(labels, thin.clone(), thin, dummy_summary()).is_err());
    }
}
