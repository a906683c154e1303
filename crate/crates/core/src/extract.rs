//! Backbone extraction from null-model tail probabilities via a two-tailed
//! test with optional familywise-error-rate control.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::null_model::NullModelResult;

/// Familywise-error-rate correction over the `l = m(m-1)/2` tests of one
/// tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fwer {
    #[default]
    None,
    Bonferroni,
    Holm,
}

impl fmt::Display for Fwer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fwer::None => "none",
            Fwer::Bonferroni => "bonferroni",
            Fwer::Holm => "holm",
        })
    }
}

impl FromStr for Fwer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Fwer::None),
            "bonferroni" => Ok(Fwer::Bonferroni),
            "holm" => Ok(Fwer::Holm),
            other => Err(Error::InvalidInput(format!(
                "unknown correction {other:?}; expected none, bonferroni or holm"
            ))),
        }
    }
}

/// How a backbone was produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub model_name: String,
    /// Two-tailed significance level; None for threshold backbones.
    pub alpha: Option<f64>,
    pub signed: bool,
    pub fwer: Fwer,
}

/// A signed {-1, 0, +1} or binary {0, 1} symmetric adjacency matrix with a
/// zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Backbone {
    row_labels: Vec<String>,
    entries: SquareMatrix<i8>,
    provenance: Provenance,
}

impl Backbone {
    pub fn from_entries(
        row_labels: Vec<String>,
        entries: SquareMatrix<i8>,
        provenance: Provenance,
    ) -> Result<Self> {
        if entries.n() != row_labels.len() {
            return Err(Error::InvalidInput(
                "label count does not match matrix size".into(),
            ));
        }
        if !entries.is_symmetric() {
            return Err(Error::InvalidInput("backbone must be symmetric".into()));
        }
        for i in 0..entries.n() {
            if entries.get(i, i) != 0 {
                return Err(Error::InvalidInput("backbone diagonal must be zero".into()));
            }
        }
        for &v in entries.data() {
            match v {
                -1 | 0 | 1 => {}
                other => {
                    return Err(Error::InvalidInput(format!(
                        "backbone entry {other} is outside {{-1, 0, 1}}"
                    )))
                }
            }
            if v == -1 && !provenance.signed {
                return Err(Error::InvalidInput(
                    "binary backbone contains a negative edge".into(),
                ));
            }
        }
        Ok(Self {
            row_labels,
            entries,
            provenance,
        })
    }

    pub fn size(&self) -> usize {
        self.entries.n()
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> i8 {
        self.entries.get(i, j)
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn entries(&self) -> &SquareMatrix<i8> {
        &self.entries
    }

    /// Upper-triangle (i, j, value) of nonzero cells.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, i8)> + '_ {
        self.entries.upper_triangle().filter(|&(_, _, v)| v != 0)
    }

    pub fn positive_edge_count(&self) -> usize {
        self.entries
            .upper_triangle()
            .filter(|&(_, _, v)| v > 0)
            .count()
    }

    /// Copy with negative edges dropped.
    pub fn to_binary(&self) -> Backbone {
        let mut entries = self.entries.clone();
        for v in entries.data_mut() {
            if *v < 0 {
                *v = 0;
            }
        }
        Backbone {
            row_labels: self.row_labels.clone(),
            entries,
            provenance: Provenance {
                signed: false,
                ..self.provenance.clone()
            },
        }
    }
}

/// Decide which of the `l` upper-triangle tests of one tail fire at a
/// per-tail budget, under the given correction. Probabilities arrive in
/// pair order (row major, i < j); the returned mask uses the same order.
fn fire_mask(p_values: &[f64], budget: f64, fwer: Fwer) -> Vec<bool> {
    let l = p_values.len();
    match fwer {
        Fwer::None => p_values.iter().map(|&p| p < budget).collect(),
        Fwer::Bonferroni => {
            let t = budget / l as f64;
            p_values.iter().map(|&p| p < t).collect()
        }
        Fwer::Holm => {
            // step-down: sort ascending, retain while p_(i) <= budget/(l-i+1)
            let mut order: Vec<usize> = (0..l).collect();
            order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]));
            let mut mask = vec![false; l];
            for (rank, &idx) in order.iter().enumerate() {
                if p_values[idx] <= budget / (l - rank) as f64 {
                    mask[idx] = true;
                } else {
                    break;
                }
            }
            mask
        }
    }
}

/// Extract a backbone from null-model tails with a two-tailed test at level
/// `alpha` (budget `alpha/2` per tail). An edge is kept as +1 when its upper
/// tail fires and -1 when its lower tail fires (signed only); in the
/// degenerate case where both fire the cell is zeroed and a warning logged.
pub fn backbone_extract(
    r: &NullModelResult,
    alpha: f64,
    signed: bool,
    fwer: Fwer,
) -> Result<Backbone> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!(
            "alpha {alpha} must lie strictly between 0 and 1"
        )));
    }
    let m = r.size();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let pos: Vec<f64> = pairs.iter().map(|&(i, j)| r.positive().get(i, j)).collect();
    let neg: Vec<f64> = pairs.iter().map(|&(i, j)| r.negative().get(i, j)).collect();
    let budget = alpha / 2.0;
    let pos_fire = fire_mask(&pos, budget, fwer);
    let neg_fire = fire_mask(&neg, budget, fwer);

    let mut entries = SquareMatrix::<i8>::new(m);
    for (idx, &(i, j)) in pairs.iter().enumerate() {
        let v = match (pos_fire[idx], neg_fire[idx]) {
            (true, true) => {
                log::warn!(
                    "both tails significant for pair ({}, {}); leaving the edge out",
                    r.row_labels()[i],
                    r.row_labels()[j]
                );
                0
            }
            (true, false) => 1,
            (false, true) => {
                if signed {
                    -1
                } else {
                    0
                }
            }
            (false, false) => 0,
        };
        entries.set_sym(i, j, v);
    }
    Backbone::from_entries(
        r.row_labels().to_vec(),
        entries,
        Provenance {
            model_name: r.summary().model_name.clone(),
            alpha: Some(alpha),
            signed,
            fwer,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::null_model::ModelSummary;

    /// Result with given upper-tail p-values; lower tails are the
    /// complements plus the tie mass so the pair invariant holds.
    fn result_from_upper(m: usize, upper: &[(usize, usize, f64)]) -> NullModelResult {
        let mut pos = SquareMatrix::from_fn(m, |i, j| if i == j { 1.0 } else { 0.5 });
        let mut neg = pos.clone();
        for &(i, j, p) in upper {
            pos.set_sym(i, j, p);
            neg.set_sym(i, j, 1.0 - p + p.min(1.0 - p));
        }
        for i in 0..m {
            for j in i + 1..m {
                let v = neg.get(i, j).min(1.0);
                neg.set_sym(i, j, v);
            }
        }
        NullModelResult::new(
            (0..m).map(|i| format!("n{i}")).collect(),
            pos,
            neg,
            test_summary(m),
        )
        .unwrap()
    }

    fn test_summary(m: usize) -> ModelSummary {
        ModelSummary {
            model_name: "test".into(),
            rows: m,
            cols: 4,
            row_skew: 0.0,
            col_skew: 0.0,
            runtime_seconds: 0.0,
            extra: Default::default(),
        }
    }

    #[test]
    fn all_ones_give_empty_backbone() {
        let pos = SquareMatrix::from_fn(3, |_, _| 1.0);
        let r = NullModelResult::new(
            vec!["a".into(), "b".into(), "c".into()],
            pos.clone(),
            pos,
            test_summary(3),
        )
        .unwrap();
        let b = backbone_extract(&r, 0.05, true, Fwer::None).unwrap();
        assert_eq!(b.edges().count(), 0);
    }

    #[test]
    fn holm_step_down_hand_example() {
        // l = 3, alpha = 0.1: thresholds 0.05/3, 0.05/2, 0.05/1; the sorted
        // p-values 0.001, 0.002, 0.02 all pass
        let r = result_from_upper(3, &[(0, 1, 0.001), (0, 2, 0.002), (1, 2, 0.02)]);
        let b = backbone_extract(&r, 0.1, false, Fwer::Holm).unwrap();
        assert_eq!(b.positive_edge_count(), 3);
        // bonferroni keeps only p < 0.05/3
        let b = backbone_extract(&r, 0.1, false, Fwer::Bonferroni).unwrap();
        assert_eq!(b.positive_edge_count(), 2);
        assert_eq!(b.entry(1, 2), 0);
    }

    #[test]
    fn holm_stops_at_first_failure() {
        // sorted: 0.001 <= 0.05/3 passes; 0.04 > 0.05/2 fails; 0.045 is not
        // retained even though 0.045 <= 0.05/1
        let r = result_from_upper(3, &[(0, 1, 0.001), (0, 2, 0.04), (1, 2, 0.045)]);
        let b = backbone_extract(&r, 0.1, false, Fwer::Holm).unwrap();
        assert_eq!(b.positive_edge_count(), 1);
        assert_eq!(b.entry(0, 1), 1);
    }

    #[test]
    fn signed_extraction_keeps_negative_tail() {
        // (0,1) fires positive, (0,2) fires negative
        let r = result_from_upper(3, &[(0, 1, 0.001), (0, 2, 0.999)]);
        let signed = backbone_extract(&r, 0.05, true, Fwer::None).unwrap();
        assert_eq!(signed.entry(0, 1), 1);
        assert_eq!(signed.entry(0, 2), -1);
        assert_eq!(signed.entry(1, 2), 0);
        // binary equals signed with negatives zeroed
        let binary = backbone_extract(&r, 0.05, false, Fwer::None).unwrap();
        assert_eq!(binary.entries(), signed.to_binary().entries());
    }

    #[test]
    fn alpha_domain_is_open() {
        let r = result_from_upper(2, &[(0, 1, 0.5)]);
        assert!(backbone_extract(&r, 0.0, true, Fwer::None).is_err());
        assert!(backbone_extract(&r, 1.0, true, Fwer::None).is_err());
        assert!(backbone_extract(&r, 1.5, true, Fwer::None).is_err());
        assert!(backbone_extract(&r, 0.5, true, Fwer::None).is_ok());
    }

    #[test]
    fn corrections_nest() {
        let ps = [
            (0, 1, 0.0001),
            (0, 2, 0.004),
            (0, 3, 0.014),
            (1, 2, 0.02),
            (1, 3, 0.3),
            (2, 3, 0.8),
        ];
        let r = result_from_upper(4, &ps);
        let none = backbone_extract(&r, 0.1, false, Fwer::None).unwrap();
        let holm = backbone_extract(&r, 0.1, false, Fwer::Holm).unwrap();
        let bonf = backbone_extract(&r, 0.1, false, Fwer::Bonferroni).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!(bonf.entry(i, j) <= holm.entry(i, j));
                assert!(holm.entry(i, j) <= none.entry(i, j));
            }
        }
    }

    #[test]
    fn from_entries_validates() {
        let labels = vec!["a".to_string(), "b".to_string()];
        let prov = Provenance {
            model_name: "t".into(),
            alpha: None,
            signed: false,
            fwer: Fwer::None,
        };
        let mut asym = SquareMatrix::<i8>::new(2);
        asym.set(0, 1, 1);
        assert!(Backbone::from_entries(labels.clone(), asym, prov.clone()).is_err());

        let mut neg = SquareMatrix::<i8>::new(2);
        neg.set_sym(0, 1, -1);
        // negative entry in a backbone declared binary
        assert!(Backbone::from_entries(labels.clone(), neg.clone(), prov.clone()).is_err());
        let signed_prov = Provenance {
            signed: true,
            ..prov
        };
        assert!(Backbone::from_entries(labels, neg, signed_prov).is_ok());
    }
}
