//! Universal-threshold backbones: one global cutoff, constant or a statistic
//! of the weight distribution.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::extract::{Backbone, Fwer, Provenance};
use crate::graph::Projection;
use crate::matrix::SquareMatrix;

/// A threshold that is either a constant or resolved once from the
/// projection's off-diagonal upper-triangle weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdSpec {
    Constant(f64),
    /// `mean + k * sd`; negative `k` gives `mean - |k| * sd`.
    MeanPlusSd(f64),
    /// Interpolated quantile, `q` in [0, 1].
    Quantile(f64),
}

impl fmt::Display for ThresholdSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdSpec::Constant(v) => write!(f, "{v}"),
            ThresholdSpec::MeanPlusSd(k) if *k == 0.0 => write!(f, "mean"),
            ThresholdSpec::MeanPlusSd(k) if *k < 0.0 => write!(f, "mean-{}sd", -k),
            ThresholdSpec::MeanPlusSd(k) => write!(f, "mean+{k}sd"),
            ThresholdSpec::Quantile(q) => write!(f, "q{q}"),
        }
    }
}

impl FromStr for ThresholdSpec {
    type Err = Error;

    /// Accepts a plain number, `mean`, `mean+1.5sd` / `mean-2sd` (the factor
    /// defaults to 1), or a quantile as `q0.9` / `quantile(0.9)`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if let Ok(v) = t.parse::<f64>() {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("threshold {t:?} is not finite")));
            }
            return Ok(ThresholdSpec::Constant(v));
        }
        if t == "mean" {
            return Ok(ThresholdSpec::MeanPlusSd(0.0));
        }
        if let Some(rest) = t.strip_prefix("mean") {
            if let Some(body) = rest.strip_suffix("sd") {
                let (sign, mag) = match body.as_bytes().first() {
                    Some(b'+') => (1.0, &body[1..]),
                    Some(b'-') => (-1.0, &body[1..]),
                    _ => {
                        return Err(Error::InvalidInput(format!(
                            "unknown threshold statistic {s:?}"
                        )))
                    }
                };
                let k = if mag.is_empty() {
                    1.0
                } else {
                    mag.parse::<f64>().map_err(|_| {
                        Error::InvalidInput(format!("bad sd factor in threshold {s:?}"))
                    })?
                };
                if !k.is_finite() {
                    return Err(Error::InvalidInput(format!("bad sd factor in threshold {s:?}")));
                }
                return Ok(ThresholdSpec::MeanPlusSd(sign * k));
            }
        }
        let q = t
            .strip_prefix("quantile(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| t.strip_prefix('q'));
        if let Some(qs) = q {
            let q: f64 = qs
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad quantile in threshold {s:?}")))?;
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::InvalidInput(format!(
                    "quantile {q} must be between 0 and 1"
                )));
            }
            return Ok(ThresholdSpec::Quantile(q));
        }
        Err(Error::InvalidInput(format!("unknown threshold statistic {s:?}")))
    }
}

impl ThresholdSpec {
    /// Resolve against the weight population. Statistics use the sample
    /// standard deviation (n - 1 normalization) and interpolated quantiles;
    /// single-element populations have sd 0.
    pub fn resolve(&self, weights: &[f64]) -> Result<f64> {
        match *self {
            ThresholdSpec::Constant(v) => Ok(v),
            ThresholdSpec::MeanPlusSd(k) => {
                if weights.is_empty() {
                    return Err(Error::InvalidInput(
                        "statistic threshold needs at least one weight".into(),
                    ));
                }
                let n = weights.len() as f64;
                let mean = weights.iter().sum::<f64>() / n;
                let sd = if weights.len() < 2 {
                    0.0
                } else {
                    (weights.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
                };
                Ok(mean + k * sd)
            }
            ThresholdSpec::Quantile(q) => {
                if weights.is_empty() {
                    return Err(Error::InvalidInput(
                        "statistic threshold needs at least one weight".into(),
                    ));
                }
                let mut sorted = weights.to_vec();
                sorted.sort_by(f64::total_cmp);
                let h = (sorted.len() - 1) as f64 * q;
                let lo = h.floor() as usize;
                let hi = (lo + 1).min(sorted.len() - 1);
                Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
            }
        }
    }
}

/// Universal-threshold backbone of `g`. With only `upper` the result is
/// binary (`w > T`); with `lower` it is signed (`+1` above the upper
/// threshold, `-1` below the lower one). Ties at a threshold are excluded.
pub fn universal(
    g: &Projection,
    upper: &ThresholdSpec,
    lower: Option<&ThresholdSpec>,
) -> Result<Backbone> {
    let weights = g.off_diagonal_weights();
    let t_up = upper.resolve(&weights)?;
    let t_lo = lower.map(|l| l.resolve(&weights)).transpose()?;
    if let Some(t_lo) = t_lo {
        // equal thresholds are allowed: they make a backbone that excludes
        // exactly the tied weights
        if t_lo > t_up {
            return Err(Error::InvalidInput(format!(
                "lower threshold {t_lo} exceeds upper threshold {t_up}"
            )));
        }
    }
    let m = g.size();
    let mut entries = SquareMatrix::<i8>::new(m);
    for i in 0..m {
        for j in i + 1..m {
            let w = g.weight(i, j) as f64;
            let v = if w > t_up {
                1
            } else if t_lo.is_some_and(|t| w < t) {
                -1
            } else {
                0
            };
            entries.set_sym(i, j, v);
        }
    }
    Backbone::from_entries(
        g.row_labels().to_vec(),
        entries,
        Provenance {
            model_name: "universal".into(),
            alpha: None,
            signed: t_lo.is_some(),
            fwer: Fwer::None,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::BipartiteGraph;

    fn projection(rows: &[Vec<u8>]) -> Projection {
        let m = rows.len();
        let n = rows[0].len();
        BipartiteGraph::from_rows(
            (0..m).map(|i| format!("r{i}")).collect(),
            (0..n).map(|j| format!("c{j}")).collect(),
            rows,
        )
        .unwrap()
        .project()
    }

    #[test]
    fn parses_constant_mean_sd_and_quantile() {
        assert_eq!("3".parse::<ThresholdSpec>().unwrap(), ThresholdSpec::Constant(3.0));
        assert_eq!("-0.5".parse::<ThresholdSpec>().unwrap(), ThresholdSpec::Constant(-0.5));
        assert_eq!("mean".parse::<ThresholdSpec>().unwrap(), ThresholdSpec::MeanPlusSd(0.0));
        assert_eq!("mean+sd".parse::<ThresholdSpec>().unwrap(), ThresholdSpec::MeanPlusSd(1.0));
        assert_eq!(
            "mean+1.5sd".parse::<ThresholdSpec>().unwrap(),
            ThresholdSpec::MeanPlusSd(1.5)
        );
        assert_eq!("MEAN-2sd".parse::<ThresholdSpec>().unwrap(), ThresholdSpec::MeanPlusSd(-2.0));
        assert_eq!("q0.9".parse::<ThresholdSpec>().unwrap(), ThresholdSpec::Quantile(0.9));
        assert_eq!(
            "quantile(0.25)".parse::<ThresholdSpec>().unwrap(),
            ThresholdSpec::Quantile(0.25)
        );
        assert!("median".parse::<ThresholdSpec>().is_err());
        assert!("q1.5".parse::<ThresholdSpec>().is_err());
        assert!("mean*2sd".parse::<ThresholdSpec>().is_err());
    }

    #[test]
    fn resolve_uses_sample_sd_and_interpolated_quantile() {
        let w = [1.0, 2.0, 3.0, 4.0];
        // sample sd of 1..4 is sqrt(5/3)
        let t = ThresholdSpec::MeanPlusSd(1.0).resolve(&w).unwrap();
        assert!((t - (2.5 + (5.0f64 / 3.0).sqrt())).abs() < 1e-12);
        let q = ThresholdSpec::Quantile(0.5).resolve(&w).unwrap();
        assert!((q - 2.5).abs() < 1e-12);
        assert_eq!(ThresholdSpec::Quantile(1.0).resolve(&w).unwrap(), 4.0);
        assert_eq!(ThresholdSpec::MeanPlusSd(5.0).resolve(&[7.0]).unwrap(), 7.0);
    }

    #[test]
    fn zero_threshold_on_empty_weights_gives_empty_backbone() {
        let g = projection(&[vec![1, 0], vec![0, 1]]);
        let b = universal(&g, &ThresholdSpec::Constant(0.0), None).unwrap();
        assert_eq!(b.positive_edge_count(), 0);
    }

    #[test]
    fn strict_inequalities_exclude_ties() {
        let g = projection(&[vec![1, 1, 0], vec![1, 1, 1]]);
        // single off-diagonal weight 2; mean 2, sd 0, so both thresholds
        // resolve to 2 and the tied weight is excluded from both signs
        let b = universal(
            &g,
            &"mean+sd".parse().unwrap(),
            Some(&"mean-sd".parse().unwrap()),
        )
        .unwrap();
        assert_eq!(b.entry(0, 1), 0);
        assert!(b.provenance().signed);
    }

    #[test]
    fn signed_extraction_splits_on_thresholds() {
        // weights: (0,1)=2, (0,2)=0, (1,2)=1
        let g = projection(&[vec![1, 1, 0], vec![1, 1, 1], vec![0, 0, 1]]);
        let b = universal(
            &g,
            &ThresholdSpec::Constant(1.5),
            Some(&ThresholdSpec::Constant(0.5)),
        )
        .unwrap();
        assert_eq!(b.entry(0, 1), 1);
        assert_eq!(b.entry(0, 2), -1);
        assert_eq!(b.entry(1, 2), 0);
        assert_eq!(b.entry(1, 0), 1);
    }

    #[test]
    fn rejects_crossed_thresholds() {
        let g = projection(&[vec![1, 1, 0], vec![1, 1, 1]]);
        let r = universal(
            &g,
            &ThresholdSpec::Constant(1.0),
            Some(&ThresholdSpec::Constant(2.0)),
        );
        assert!(r.is_err());
    }

    #[test]
    fn raising_threshold_never_adds_edges() {
        let g = projection(&[
            vec![1, 1, 0, 1, 0],
            vec![1, 1, 1, 0, 0],
            vec![0, 1, 1, 1, 1],
            vec![1, 0, 1, 1, 0],
        ]);
        let mut last = usize::MAX;
        for t in [0.0, 1.0, 2.0, 3.0, 4.0] {
            let b = universal(&g, &ThresholdSpec::Constant(t), None).unwrap();
            let count = b.positive_edge_count();
            assert!(count <= last);
            last = count;
        }
    }
}
