//! Extract the backbone of a weighted bipartite projection.
//!
//! A bipartite graph `B` (agents x artifacts) is projected to a weighted
//! co-occurrence graph `G = B * B^T`. The backbone of `G` is an unweighted
//! (binary) or signed graph that keeps only the edges whose weights are
//! significant either against a fixed threshold or under a null model that
//! controls for the degree sequences of `B`:
//!
//! * [`universal`] — a single global threshold (constant or a statistic of
//!   the weight distribution such as `mean + 1sd`),
//! * [`hyperg`] — row sums fixed, column sums free; exact hypergeometric
//!   edge-weight tails,
//! * [`sdsm`] — both degree sequences fixed in expectation; Poisson-binomial
//!   tails from a cellwise probability matrix,
//! * [`fdsm`] — both degree sequences fixed exactly; Monte Carlo tails from
//!   curveball-sampled matrices.
//!
//! Null-model tails are turned into a backbone with [`backbone_extract`],
//! which runs the two-tailed test at a significance level `alpha` with
//! optional Bonferroni or Holm-Bonferroni familywise-error-rate control.
//!
//! ```
//! use backbone::{BipartiteGraph, Fwer};
//!
//! let b = BipartiteGraph::from_rows(
//!     vec!["a".into(), "b".into(), "c".into()],
//!     vec!["w".into(), "x".into(), "y".into(), "z".into()],
//!     &[vec![1, 1, 0, 0], vec![1, 1, 1, 0], vec![0, 0, 1, 1]],
//! )
//! .unwrap();
//! let probs = backbone::hyperg(&b).unwrap();
//! let bb = backbone::backbone_extract(&probs, 0.05, true, Fwer::None).unwrap();
//! assert_eq!(bb.size(), 3);
//! ```

#![forbid(unsafe_code)]

pub mod error;
pub mod extract;
pub mod fdsm;
pub mod graph;
pub mod hyperg;
pub mod io;
pub mod matrix;
pub mod metrics;
pub mod null_model;
pub mod sdsm;
mod special;
pub mod threshold;

pub use error::{Error, Result};
pub use extract::{backbone_extract, Backbone, Fwer, Provenance};
pub use fdsm::{curveball_sample, fdsm, CurveballSampler, Dyad, FdsmConfig, FdsmResult};
pub use graph::{skewness, BipartiteGraph, EdgeWeightBounds, Margins, Projection};
pub use hyperg::{hyperg, hypergeom_tail, Tail};
pub use matrix::SquareMatrix;
pub use metrics::{backbone_correlation, density, modularity, Partition};
pub use null_model::{ModelSummary, NullModelResult};
pub use io::BackboneFormat;
pub use sdsm::{
    poisson_binomial_distribution, poisson_binomial_exact, poisson_binomial_lower_rna,
    poisson_binomial_upper_rna, probability_matrix_polytope, probability_matrix_ratio, sdsm,
    ProbabilityMatrix, ProbabilityMethod,
};
pub use threshold::{universal, ThresholdSpec};
