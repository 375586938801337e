//! Grouping of correspondences by superpixel membership.
//!
//! Correspondences whose view-k features fall in the same superpixel form a
//! group. Adjacent groups are then merged pairwise when the union of their
//! superpixel boxes fits in a 2S x 2S window, and each group is ranked by
//! matching score.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::geometry::Correspondence;
use crate::superpixel::{adjacent_pairs, superpixel_bounding_boxes, BBox, LabelMap};

/// The image a segmentation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum View {
    First,
    Second,
}

/// Which views' segmentations feed the grouping stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupingView {
    #[default]
    Both,
    View1,
    View2,
}

impl GroupingView {
    pub const fn name(self) -> &'static str {
        match self {
            GroupingView::Both => "both",
            GroupingView::View1 => "view1",
            GroupingView::View2 => "view2",
        }
    }

    pub fn views(self) -> &'static [View] {
        match self {
            GroupingView::Both => &[View::First, View::Second],
            GroupingView::View1 => &[View::First],
            GroupingView::View2 => &[View::Second],
        }
    }
}

impl std::str::FromStr for GroupingView {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "both" => Ok(GroupingView::Both),
            "view1" => Ok(GroupingView::View1),
            "view2" => Ok(GroupingView::View2),
            other => Err(format!("unknown grouping view `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    /// Correspondence indices, ascending.
    pub members: Vec<usize>,
    /// One source superpixel, or two after a merge.
    pub sources: Vec<(View, u32)>,
    /// Union of the source superpixels' boxes.
    pub region: BBox,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupSet {
    pub groups: Vec<Group>,
    pub view: View,
    pub grid_interval: f64,
    /// For each group, the indices of groups whose superpixels touch it.
    /// Empty once groups have been combined.
    pub neighbors: Vec<Vec<usize>>,
}

impl GroupSet {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

/// One group per superpixel containing at least one view-`view` feature,
/// ordered by superpixel id. Out-of-bounds features are clamped to the map.
pub fn partition_groups(correspondences: &[Correspondence], lm: &LabelMap, view: View, grid_interval: f64) -> GroupSet {
    let mut buckets: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, c) in correspondences.iter().enumerate() {
        let p = match view {
            View::First => c.p1,
            View::Second => c.p2,
        };
        buckets.entry(lm.label_at_point(p.x, p.y)).or_default().push(i);
    }
    let boxes = superpixel_bounding_boxes(lm);
    let mut group_of = vec![usize::MAX; lm.count()];
    let groups: Vec<Group> = buckets
        .into_iter()
        .enumerate()
        .map(|(g, (label, members))| {
            group_of[label as usize] = g;
            Group {
                members,
                sources: vec![(view, label)],
                region: boxes[label as usize],
            }
        })
        .collect();
    let mut neighbors = vec![Vec::new(); groups.len()];
    for (a, b) in adjacent_pairs(lm) {
        let (ga, gb) = (group_of[a as usize], group_of[b as usize]);
        if ga != usize::MAX && gb != usize::MAX {
            neighbors[ga].push(gb);
            neighbors[gb].push(ga);
        }
    }
    for n in &mut neighbors {
        n.sort_unstable();
        n.dedup();
    }
    GroupSet {
        groups,
        view,
        grid_interval,
        neighbors,
    }
}

/// Whether the union of two boxes fits in a `2s x 2s` window.
pub fn fits_limited_region(a: &BBox, b: &BBox, s: f64) -> bool {
    let u = a.union(b);
    u.width() as f64 <= 2.0 * s && u.height() as f64 <= 2.0 * s
}

/// Pairwise combination of neighbouring groups.
///
/// Every unordered neighbour pair `(i, j)`, `i < j`, whose union box fits in
/// `2s x 2s` yields the merged group; groups with no such partner pass
/// through. Pass-throughs come first in input order, then merged groups in
/// lexicographic `(i, j)` order.
pub fn combine_groups(gs: &GroupSet, s: f64) -> GroupSet {
    let n = gs.groups.len();
    let mut merged_pairs = Vec::new();
    let mut has_partner = vec![false; n];
    for i in 0..n {
        for &j in gs.neighbors.get(i).map(Vec::as_slice).unwrap_or(&[]) {
            if j <= i {
                continue;
            }
            if fits_limited_region(&gs.groups[i].region, &gs.groups[j].region, s) {
                merged_pairs.push((i, j));
                has_partner[i] = true;
                has_partner[j] = true;
            }
        }
    }
    let mut groups: Vec<Group> = gs
        .groups
        .iter()
        .zip(&has_partner)
        .filter(|(_, &p)| !p)
        .map(|(g, _)| g.clone())
        .collect();
    groups.extend(merged_pairs.into_iter().map(|(i, j)| {
        let (a, b) = (&gs.groups[i], &gs.groups[j]);
        let mut members: Vec<usize> = a.members.iter().chain(&b.members).copied().collect();
        members.sort_unstable();
        members.dedup();
        let mut sources = a.sources.clone();
        sources.extend_from_slice(&b.sources);
        Group {
            members,
            sources,
            region: a.region.union(&b.region),
        }
    }));
    GroupSet {
        groups,
        view: gs.view,
        grid_interval: s,
        neighbors: Vec::new(),
    }
}

/// Member positions ordered by non-ascending score; equal scores keep
/// ascending correspondence index.
pub fn sort_group(g: &Group, correspondences: &[Correspondence]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.members.len()).collect();
    order.sort_by(|&u, &v| {
        let (a, b) = (g.members[u], g.members[v]);
        correspondences[b]
            .score
            .total_cmp(&correspondences[a].score)
            .then(a.cmp(&b))
    });
    order
}
