//! Scoring fitted instances against ground-truth labels.

use crate::geometry::{sampson_residual, Correspondence};
use crate::pipeline::Hypothesis;

/// A ground-truth structure and the fitted instance assigned to it.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureMatch {
    /// Ground-truth label (1-based).
    pub label: usize,
    /// Index into the instance list.
    pub instance: Option<usize>,
    /// Fraction of the structure's points in the instance's inlier set.
    pub recall: f64,
    /// Mean Sampson residual of the structure's points under the instance.
    pub mean_error: f64,
}

/// One-to-one assignment of structures to instances by greatest inlier
/// overlap, decided greedily from the largest overlap down (ties to the lower
/// label, then the lower instance). Pairs with no overlap stay unassigned.
pub fn match_structures(instances: &[Hypothesis], data: &[Correspondence], labels: &[usize]) -> Vec<StructureMatch> {
    let k = labels.iter().copied().max().unwrap_or(0);
    let sizes: Vec<usize> = (0..=k).map(|l| labels.iter().filter(|&&x| x == l).count()).collect();
    let mut overlap = vec![vec![0usize; instances.len()]; k + 1];
    for (j, h) in instances.iter().enumerate() {
        for &i in &h.inlier_set {
            if let Some(&l) = labels.get(i) {
                overlap[l][j] += 1;
            }
        }
    }
    let mut assigned: Vec<Option<usize>> = vec![None; k + 1];
    let mut taken = vec![false; instances.len()];
    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        for l in 1..=k {
            if assigned[l].is_some() {
                continue;
            }
            for j in (0..instances.len()).filter(|&j| !taken[j]) {
                let o = overlap[l][j];
                if o > 0 && best.is_none_or(|(bo, _, _)| o > bo) {
                    best = Some((o, l, j));
                }
            }
        }
        let Some((_, l, j)) = best else { break };
        assigned[l] = Some(j);
        taken[j] = true;
    }
    (1..=k)
        .filter(|&l| sizes[l] > 0)
        .map(|l| {
            let instance = assigned[l];
            let (recall, mean_error) = match instance {
                Some(j) => (
                    overlap[l][j] as f64 / sizes[l] as f64,
                    mean_residual(&instances[j], data, labels, l),
                ),
                None => (0.0, f64::INFINITY),
            };
            StructureMatch {
                label: l,
                instance,
                recall,
                mean_error,
            }
        })
        .collect()
}

fn mean_residual(h: &Hypothesis, data: &[Correspondence], labels: &[usize], label: usize) -> f64 {
    let (mut sum, mut n) = (0.0, 0usize);
    for (c, _) in data.iter().zip(labels).filter(|(_, &l)| l == label) {
        sum += sampson_residual(&h.params, h.kind, c);
        n += 1;
    }
    sum / n.max(1) as f64
}

/// Mean Sampson residual of every ground-truth inlier under the instance
/// assigned to its structure, or under the best-fitting instance when its
/// structure went unmatched. Infinite when there are no instances.
pub fn mean_sampson_error(instances: &[Hypothesis], data: &[Correspondence], labels: &[usize]) -> f64 {
    if instances.is_empty() {
        return f64::INFINITY;
    }
    let matches = match_structures(instances, data, labels);
    let (mut sum, mut n) = (0.0, 0usize);
    for (c, &l) in data.iter().zip(labels) {
        if l == 0 {
            continue;
        }
        let assigned = matches.iter().find(|m| m.label == l).and_then(|m| m.instance);
        sum += match assigned {
            Some(j) => sampson_residual(&instances[j].params, instances[j].kind, c),
            None => instances
                .iter()
                .map(|h| sampson_residual(&h.params, h.kind, c))
                .fold(f64::INFINITY, f64::min),
        };
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Per instance, the mean Sampson residual over the structure assigned to it.
pub fn instance_errors(instances: &[Hypothesis], data: &[Correspondence], labels: &[usize]) -> Vec<Option<f64>> {
    let matches = match_structures(instances, data, labels);
    (0..instances.len())
        .map(|j| matches.iter().find(|m| m.instance == Some(j)).map(|m| m.mean_error))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ModelKind, ModelParams, Point2};
    use nalgebra::Matrix3;

    fn hyp(inliers: &[usize]) -> Hypothesis {
        Hypothesis {
            params: ModelParams::new(Matrix3::identity()),
            kind: ModelKind::Homography,
            sampled_subset: Vec::new(),
            inlier_set: inliers.to_vec(),
            gen_index: 0,
        }
    }

    #[test]
    fn greedy_assignment_is_one_to_one() {
        let p = Point2::new(1.0, 2.0);
        let data = vec![Correspondence::new(p, p, 1.0); 6];
        let labels = [1, 1, 1, 2, 2, 0];
        // instance 0 covers all of structure 1 and one point of 2
        let hs = [hyp(&[0, 1, 2, 3]), hyp(&[3, 4])];
        let m = match_structures(&hs, &data, &labels);
        assert_eq!(m[0].instance, Some(0));
        assert_eq!(m[1].instance, Some(1));
        assert_eq!(m[0].recall, 1.0);
        assert_eq!(m[1].recall, 1.0);
        assert_eq!(mean_sampson_error(&hs, &data, &labels), 0.0);
        assert_eq!(instance_errors(&hs, &data, &labels), vec![Some(0.0), Some(0.0)]);
    }

    #[test]
    fn unmatched_structure_has_zero_recall() {
        let p = Point2::new(1.0, 2.0);
        let data = vec![Correspondence::new(p, p, 1.0); 4];
        let m = match_structures(&[hyp(&[0, 1])], &data, &[1, 1, 2, 2]);
        assert_eq!(m[1].instance, None);
        assert_eq!(m[1].recall, 0.0);
    }
}
