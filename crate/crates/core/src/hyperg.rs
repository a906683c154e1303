//! Hypergeometric null model: row sums fixed, column sums unconstrained.
//!
//! Under this model the weight of pair (i, j) follows a hypergeometric
//! distribution: of the `|W|` artifacts, agent j selects `R_j` of them, and
//! the overlap with agent i's fixed `R_i` artifacts is counted. Tails are
//! exact, evaluated in log space.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::matrix::SquareMatrix;
use crate::null_model::{ModelSummary, NullModelResult};
use crate::special::LnFactorial;

/// Which tail of a distribution to accumulate. Both tails are inclusive of
/// the point itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    Upper,
    Lower,
}

/// Exact hypergeometric tail probability.
///
/// `X` counts successes in `draws` draws without replacement from a
/// population of size `pop` containing `successes` successes. Returns
/// `P(X >= k)` (upper) or `P(X <= k)` (lower).
pub fn hypergeom_tail(k: usize, pop: usize, draws: usize, successes: usize, tail: Tail) -> Result<f64> {
    if draws > pop || successes > pop {
        return Err(Error::InvalidInput(format!(
            "draws {draws} and successes {successes} must not exceed population {pop}"
        )));
    }
    if k > draws.min(successes) {
        return Err(Error::InvalidInput(format!(
            "overlap {k} exceeds min(draws, successes) = {}",
            draws.min(successes)
        )));
    }
    let lnf = LnFactorial::up_to(pop);
    Ok(tail_with_table(k, pop, draws, successes, tail, &lnf))
}

/// Tail probability using a precomputed log-factorial table covering `pop`.
fn tail_with_table(
    k: usize,
    pop: usize,
    draws: usize,
    successes: usize,
    tail: Tail,
    lnf: &LnFactorial,
) -> f64 {
    // support of X is [lo, hi]
    let lo = (draws + successes).saturating_sub(pop);
    let hi = draws.min(successes);
    let (from, to) = match tail {
        Tail::Upper => {
            if k <= lo {
                return 1.0;
            }
            (k, hi)
        }
        Tail::Lower => {
            if k >= hi {
                return 1.0;
            }
            (lo, k)
        }
    };
    let ln_denom = lnf.ln_choose(pop, draws);
    let ln_pmf =
        |x: usize| lnf.ln_choose(successes, x) + lnf.ln_choose(pop - successes, draws - x) - ln_denom;
    // sum in linear space relative to the largest term so nothing underflows
    let max_ln = (from..=to).map(ln_pmf).fold(f64::NEG_INFINITY, f64::max);
    if max_ln == f64::NEG_INFINITY {
        return 0.0;
    }
    let sum: f64 = (from..=to).map(|x| (ln_pmf(x) - max_ln).exp()).sum();
    (sum * max_ln.exp()).min(1.0)
}

/// Hypergeometric null model over all agent pairs of `b`.
pub fn hyperg(b: &BipartiteGraph) -> Result<NullModelResult> {
    let start = Instant::now();
    let mut summary = ModelSummary::for_graph("hypergeometric", b)?;
    let g = b.project();
    let margins = b.margins();
    let m = b.rows();
    let pop = b.cols();
    let lnf = LnFactorial::up_to(pop);

    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let tails: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let k = g.weight(i, j) as usize;
            let up = tail_with_table(k, pop, margins.rows[i], margins.rows[j], Tail::Upper, &lnf);
            let lo = tail_with_table(k, pop, margins.rows[i], margins.rows[j], Tail::Lower, &lnf);
            (up, lo)
        })
        .collect();

    let mut positive = SquareMatrix::<f64>::new(m);
    let mut negative = SquareMatrix::<f64>::new(m);
    for i in 0..m {
        positive.set(i, i, 1.0);
        negative.set(i, i, 1.0);
    }
    for (&(i, j), &(up, lo)) in pairs.iter().zip(&tails) {
        positive.set_sym(i, j, up);
        negative.set_sym(i, j, lo);
    }
    summary.runtime_seconds = start.elapsed().as_secs_f64();
    NullModelResult::new(b.row_labels().to_vec(), positive, negative, summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whole_distribution_tails_are_one() {
        assert_eq!(hypergeom_tail(0, 50, 10, 20, Tail::Upper).unwrap(), 1.0);
        assert_eq!(hypergeom_tail(10, 50, 10, 20, Tail::Lower).unwrap(), 1.0);
    }

    #[test]
    fn four_artifact_example() {
        // two agents each holding 2 of 4 artifacts; full overlap has
        // probability C(2,2)C(2,0)/C(4,2) = 1/6
        let p = hypergeom_tail(2, 4, 2, 2, Tail::Upper).unwrap();
        assert!((p - 1.0 / 6.0).abs() < 1e-14);
        let p = hypergeom_tail(0, 4, 2, 2, Tail::Lower).unwrap();
        assert!((p - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn tails_overlap_by_exactly_the_point_mass() {
        let lnf = LnFactorial::up_to(60);
        for (pop, draws, successes) in [(10usize, 4usize, 6usize), (60, 25, 30), (7, 7, 3)] {
            for k in (draws + successes).saturating_sub(pop)..=draws.min(successes) {
                let up = hypergeom_tail(k, pop, draws, successes, Tail::Upper).unwrap();
                let lo = hypergeom_tail(k, pop, draws, successes, Tail::Lower).unwrap();
                let ln_pmf = lnf.ln_choose(successes, k)
                    + lnf.ln_choose(pop - successes, draws - k)
                    - lnf.ln_choose(pop, draws);
                assert!((up + lo - ln_pmf.exp() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn symmetric_in_the_two_agents() {
        for k in 0..=3 {
            let a = hypergeom_tail(k, 20, 3, 9, Tail::Upper).unwrap();
            let b = hypergeom_tail(k, 20, 9, 3, Tail::Upper).unwrap();
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_domain_violations() {
        assert!(hypergeom_tail(0, 4, 5, 2, Tail::Upper).is_err());
        assert!(hypergeom_tail(3, 4, 2, 2, Tail::Upper).is_err());
    }

    #[test]
    fn model_result_on_small_graph() {
        // both rows hold the same 2 of 4 artifacts, so overlap 2 is the
        // extreme upper outcome with probability 1/6
        let b = BipartiteGraph::from_rows(
            vec!["a".into(), "b".into()],
            vec!["w".into(), "x".into(), "y".into(), "z".into()],
            &[vec![1, 1, 0, 0], vec![1, 1, 0, 0]],
        )
        .unwrap();
        let r = hyperg(&b).unwrap();
        assert!((r.positive().get(0, 1) - 1.0 / 6.0).abs() < 1e-14);
        assert_eq!(r.negative().get(0, 1), 1.0);
        assert_eq!(r.positive().get(0, 0), 1.0);
        assert_eq!(r.summary().model_name, "hypergeometric");
    }

    #[test]
    fn zero_degree_row_always_has_upper_tail_one() {
        let b = BipartiteGraph::from_rows(
            vec!["a".into(), "b".into()],
            vec!["x".into(), "y".into()],
            &[vec![0, 0], vec![1, 1]],
        )
        .unwrap();
        let r = hyperg(&b).unwrap();
        assert_eq!(r.positive().get(0, 1), 1.0);
    }
}
