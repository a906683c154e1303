//! Evaluation metrics for comparing backbones: partition modularity,
//! pairwise correlation, and density.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::extract::Backbone;

/// Assignment of every node label to a community.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: BTreeMap<String, String>,
}

impl Partition {
    pub fn new(assignment: BTreeMap<String, String>) -> Result<Self> {
        if assignment.is_empty() {
            return Err(Error::InvalidInput("partition has no members".into()));
        }
        Ok(Self { assignment })
    }

    pub fn from_pairs<I, S, T>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        Self::new(
            pairs
                .into_iter()
                .map(|(label, community)| (label.into(), community.into()))
                .collect(),
        )
    }

    pub fn community_of(&self, label: &str) -> Option<&str> {
        self.assignment.get(label).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }
}

/// Newman-Girvan modularity of the positive subgraph of `b` under partition
/// `p`: `Q = sum_c [ L_c/E - (D_c/2E)^2 ]` with `L_c` the edges inside
/// community c, `D_c` its degree sum and `E` the positive edge count.
/// An empty positive edge set has modularity 0.
pub fn modularity(b: &Backbone, p: &Partition) -> Result<f64> {
    let mut communities: HashMap<&str, usize> = HashMap::new();
    let mut node_comm = Vec::with_capacity(b.size());
    for label in b.row_labels() {
        let c = p
            .community_of(label)
            .ok_or_else(|| Error::UnknownLabel(format!("{label} is not in the partition")))?;
        let next = communities.len();
        node_comm.push(*communities.entry(c).or_insert(next));
    }

    let mut edge_count = 0usize;
    let mut within = vec![0usize; communities.len()];
    let mut degree = vec![0usize; communities.len()];
    for (i, j, v) in b.edges() {
        if v <= 0 {
            continue;
        }
        edge_count += 1;
        degree[node_comm[i]] += 1;
        degree[node_comm[j]] += 1;
        if node_comm[i] == node_comm[j] {
            within[node_comm[i]] += 1;
        }
    }
    if edge_count == 0 {
        return Ok(0.0);
    }
    let e = edge_count as f64;
    Ok(within
        .iter()
        .zip(&degree)
        .map(|(&l, &d)| l as f64 / e - (d as f64 / (2.0 * e)).powi(2))
        .sum())
}

/// Pearson correlation of two backbones over their upper-triangle signed
/// entries, aligned by node label. Returns 0 with a warning when either
/// vector is constant.
pub fn backbone_correlation(b1: &Backbone, b2: &Backbone) -> Result<f64> {
    if b1.size() != b2.size() {
        return Err(Error::LabelMismatch(format!(
            "backbones have {} and {} nodes",
            b1.size(),
            b2.size()
        )));
    }
    let mut position = HashMap::with_capacity(b2.size());
    for (idx, label) in b2.row_labels().iter().enumerate() {
        position.insert(label.as_str(), idx);
    }
    let mapped: Vec<usize> = b1
        .row_labels()
        .iter()
        .map(|label| {
            position
                .get(label.as_str())
                .copied()
                .ok_or_else(|| Error::LabelMismatch(format!("{label} is missing from the second backbone")))
        })
        .collect::<Result<_>>()?;

    let m = b1.size();
    let mut xs = Vec::with_capacity(m * (m - 1) / 2);
    let mut ys = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in i + 1..m {
            xs.push(b1.entry(i, j) as f64);
            ys.push(b2.entry(mapped[i], mapped[j]) as f64);
        }
    }
    let n = xs.len() as f64;
    if n == 0.0 {
        log::warn!("correlation of single-node backbones is undefined; returning 0");
        return Ok(0.0);
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        log::warn!("correlation against a constant backbone vector; returning 0");
        return Ok(0.0);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Positive edge count over the `m(m-1)/2` possible edges.
pub fn density(b: &Backbone) -> f64 {
    let m = b.size();
    if m < 2 {
        return 0.0;
    }
    b.positive_edge_count() as f64 / (m * (m - 1) / 2) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::{Fwer, Provenance};
    use crate::matrix::SquareMatrix;

    fn backbone(m: usize, edges: &[(usize, usize, i8)]) -> Backbone {
        let mut entries = SquareMatrix::<i8>::new(m);
        for &(i, j, v) in edges {
            entries.set_sym(i, j, v);
        }
        Backbone::from_entries(
            (0..m).map(|i| format!("n{i}")).collect(),
            entries,
            Provenance {
                model_name: "test".into(),
                alpha: None,
                signed: true,
                fwer: Fwer::None,
            },
        )
        .unwrap()
    }

    fn components_partition(m: usize, split: usize) -> Partition {
        Partition::from_pairs((0..m).map(|i| {
            (
                format!("n{i}"),
                if i < split { "a".to_string() } else { "b".to_string() },
            )
        }))
        .unwrap()
    }

    #[test]
    fn one_community_is_zero() {
        let b = backbone(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]);
        let p = components_partition(4, 4);
        assert_eq!(modularity(&b, &p).unwrap(), 0.0);
    }

    #[test]
    fn two_triangles_have_modularity_half() {
        let b = backbone(
            6,
            &[(0, 1, 1), (0, 2, 1), (1, 2, 1), (3, 4, 1), (3, 5, 1), (4, 5, 1)],
        );
        let p = components_partition(6, 3);
        assert!((modularity(&b, &p).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn empty_positive_subgraph_is_zero() {
        let b = backbone(3, &[(0, 1, -1)]);
        let p = components_partition(3, 2);
        assert_eq!(modularity(&b, &p).unwrap(), 0.0);
    }

    #[test]
    fn uncovered_node_is_an_error() {
        let b = backbone(3, &[(0, 1, 1)]);
        let p = Partition::from_pairs([("n0", "a"), ("n1", "a")]).unwrap();
        assert!(matches!(modularity(&b, &p), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn modularity_invariant_under_relabeling() {
        let b = backbone(5, &[(0, 1, 1), (1, 2, 1), (3, 4, 1), (0, 4, 1)]);
        let p1 = components_partition(5, 2);
        let p2 = Partition::from_pairs((0..5).map(|i| {
            (
                format!("n{i}"),
                if i < 2 { "blue".to_string() } else { "red".to_string() },
            )
        }))
        .unwrap();
        assert_eq!(modularity(&b, &p1).unwrap(), modularity(&b, &p2).unwrap());
    }

    #[test]
    fn correlation_of_self_and_negation() {
        let b = backbone(4, &[(0, 1, 1), (1, 2, -1), (2, 3, 1)]);
        assert_eq!(backbone_correlation(&b, &b).unwrap(), 1.0);
        let neg = backbone(4, &[(0, 1, -1), (1, 2, 1), (2, 3, -1)]);
        assert_eq!(backbone_correlation(&b, &neg).unwrap(), -1.0);
    }

    #[test]
    fn correlation_aligns_by_label_not_index() {
        let b1 = backbone(3, &[(0, 1, 1)]);
        // same graph with node order reversed: edge connects n0 and n1
        let mut entries = SquareMatrix::<i8>::new(3);
        entries.set_sym(1, 2, 1);
        let b2 = Backbone::from_entries(
            vec!["n2".into(), "n1".into(), "n0".into()],
            entries,
            b1.provenance().clone(),
        )
        .unwrap();
        assert_eq!(backbone_correlation(&b1, &b2).unwrap(), 1.0);
    }

    #[test]
    fn constant_vector_warns_and_returns_zero() {
        let empty = backbone(3, &[]);
        let b = backbone(3, &[(0, 1, 1)]);
        assert_eq!(backbone_correlation(&empty, &b).unwrap(), 0.0);
    }

    #[test]
    fn label_mismatch_is_an_error() {
        let b1 = backbone(3, &[(0, 1, 1)]);
        let mut entries = SquareMatrix::<i8>::new(3);
        entries.set_sym(0, 1, 1);
        let b2 = Backbone::from_entries(
            vec!["x".into(), "y".into(), "z".into()],
            entries,
            b1.provenance().clone(),
        )
        .unwrap();
        assert!(matches!(
            backbone_correlation(&b1, &b2),
            Err(Error::LabelMismatch(_))
        ));
    }

    #[test]
    fn density_counts_positive_edges_only() {
        assert_eq!(density(&backbone(4, &[])), 0.0);
        let full = backbone(
            3,
            &[(0, 1, 1), (0, 2, 1), (1, 2, 1)],
        );
        assert_eq!(density(&full), 1.0);
        let mixed = backbone(3, &[(0, 1, 1), (0, 2, -1)]);
        assert!((density(&mixed) - 1.0 / 3.0).abs() < 1e-15);
    }
}
