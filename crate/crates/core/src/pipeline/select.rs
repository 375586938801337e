use serde::{Deserialize, Serialize};

use super::{FitConfig, FitError, FitResult, FitStatus, Hypothesis};

/// The hypothesis with most inliers; ties go to the lowest `gen_index`.
pub fn select_single(hypotheses: &[Hypothesis]) -> Result<&Hypothesis, FitError> {
    best_of(hypotheses.iter()).ok_or_else(FitError::empty)
}

fn best_of<'a>(it: impl Iterator<Item = &'a Hypothesis>) -> Option<&'a Hypothesis> {
    it.fold(None, |best: Option<&Hypothesis>, h| match best {
        Some(b)
            if b.inlier_count() > h.inlier_count()
                || (b.inlier_count() == h.inlier_count() && b.gen_index < h.gen_index) =>
        {
            Some(b)
        }
        _ => Some(h),
    })
}

/// Whether `candidate`'s sampled subset shares any correspondence with the
/// inlier set of `selected`.
pub fn is_redundant(selected: &Hypothesis, candidate: &Hypothesis) -> bool {
    candidate
        .sampled_subset
        .iter()
        .any(|i| selected.inlier_set.binary_search(i).is_ok())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionStep {
    /// `gen_index` of the selected hypothesis.
    pub selected: usize,
    /// `gen_index` of every other hypothesis removed in this step, ascending.
    pub removed: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub steps: Vec<SelectionStep>,
    /// The hypothesis set emptied before the requested number of selections.
    pub exhausted: bool,
}

/// Up to `t` rounds of: select the best surviving hypothesis, then drop it
/// and every survivor redundant with it. Inlier sets are never recomputed.
pub fn select_with_trace(hypotheses: &[Hypothesis], t: usize) -> Result<(Vec<&Hypothesis>, SelectionTrace), FitError> {
    if hypotheses.is_empty() {
        return Err(FitError::empty());
    }
    let universe = hypotheses
        .iter()
        .flat_map(|h| h.inlier_set.iter().chain(&h.sampled_subset))
        .max()
        .map_or(0, |m| m + 1);
    let mut alive = vec![true; hypotheses.len()];
    let mut in_selected = vec![false; universe];
    let mut chosen = Vec::new();
    let mut trace = SelectionTrace::default();

    for _ in 0..t {
        let best = best_of(hypotheses.iter().zip(&alive).filter(|(_, &a)| a).map(|(h, _)| h));
        let Some(best) = best else {
            trace.exhausted = true;
            break;
        };
        for &i in &best.inlier_set {
            in_selected[i] = true;
        }
        let mut removed = Vec::new();
        for (h, a) in hypotheses.iter().zip(alive.iter_mut()) {
            if !*a {
                continue;
            }
            if std::ptr::eq(h, best) {
                *a = false;
            } else if h.sampled_subset.iter().any(|&i| in_selected[i]) {
                *a = false;
                removed.push(h.gen_index);
            }
        }
        for &i in &best.inlier_set {
            in_selected[i] = false;
        }
        removed.sort_unstable();
        trace.steps.push(SelectionStep {
            selected: best.gen_index,
            removed,
        });
        chosen.push(best);
    }
    Ok((chosen, trace))
}

/// Multi-instance selection with `cfg.num_structures` rounds.
pub fn select_models(hypotheses: &[Hypothesis], cfg: &FitConfig) -> Result<FitResult, FitError> {
    let t = cfg.num_structures;
    let (chosen, trace) = select_with_trace(hypotheses, t)?;
    let status = if trace.exhausted {
        FitStatus::Exhausted {
            requested: t,
            found: chosen.len(),
        }
    } else {
        FitStatus::Complete
    };
    Ok(FitResult {
        instances: chosen.into_iter().cloned().collect(),
        removed_counts: trace.steps.iter().map(|s| s.removed.len()).collect(),
        status,
        hypothesis_count: hypotheses.len(),
        iterations: Vec::new(),
        timings: Vec::new(),
    })
}
