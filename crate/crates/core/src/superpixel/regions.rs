use std::collections::VecDeque;

use super::{BBox, LabelMap};

/// Tight inclusive bounding box of every superpixel, indexed by id.
pub fn superpixel_bounding_boxes(lm: &LabelMap) -> Vec<BBox> {
    let mut boxes: Vec<Option<BBox>> = vec![None; lm.count()];
    for y in 0..lm.height() {
        for x in 0..lm.width() {
            let b = &mut boxes[lm.at(x, y) as usize];
            *b = Some(match b {
                None => BBox::new(x, y, x, y),
                Some(bb) => bb.union(&BBox::new(x, y, x, y)),
            });
        }
    }
    boxes
        .into_iter()
        .map(|b| b.expect("label ids are contiguous"))
        .collect()
}

/// Sorted, de-duplicated pairs `(a, b)`, `a < b`, of superpixels that share at
/// least one pair of 4-adjacent pixels.
pub fn adjacent_pairs(lm: &LabelMap) -> Vec<(u32, u32)> {
    let mut pairs = Vec::new();
    let (w, h) = (lm.width(), lm.height());
    for y in 0..h {
        for x in 0..w {
            let l = lm.at(x, y);
            if x + 1 < w {
                let r = lm.at(x + 1, y);
                if r != l {
                    pairs.push((l.min(r), l.max(r)));
                }
            }
            if y + 1 < h {
                let d = lm.at(x, y + 1);
                if d != l {
                    pairs.push((l.min(d), l.max(d)));
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

/// True when every label forms a single 4-connected region.
pub fn is_label_connected(lm: &LabelMap) -> bool {
    let (w, h) = (lm.width(), lm.height());
    let mut sizes = vec![0usize; lm.count()];
    for &l in lm.labels() {
        sizes[l as usize] += 1;
    }
    let mut visited = vec![false; w * h];
    let mut filled = vec![false; lm.count()];
    for start in 0..w * h {
        if visited[start] {
            continue;
        }
        let l = lm.labels()[start];
        if filled[l as usize] {
            return false;
        }
        filled[l as usize] = true;
        let reached = flood(lm.labels(), w, h, start, &mut visited, |_| {});
        if reached != sizes[l as usize] {
            return false;
        }
    }
    true
}

fn flood(
    labels: &[u32],
    w: usize,
    h: usize,
    start: usize,
    visited: &mut [bool],
    mut on_pixel: impl FnMut(usize),
) -> usize {
    let l = labels[start];
    let mut queue = VecDeque::from([start]);
    visited[start] = true;
    let mut n = 0;
    while let Some(p) = queue.pop_front() {
        n += 1;
        on_pixel(p);
        let (x, y) = (p % w, p / w);
        let mut push = |q: usize| {
            if !visited[q] && labels[q] == l {
                visited[q] = true;
                queue.push_back(q);
            }
        };
        if x > 0 {
            push(p - 1);
        }
        if x + 1 < w {
            push(p + 1);
        }
        if y > 0 {
            push(p - w);
        }
        if y + 1 < h {
            push(p + w);
        }
    }
    n
}

fn find(parent: &mut [usize], mut c: usize) -> usize {
    while parent[c] != c {
        parent[c] = parent[parent[c]];
        c = parent[c];
    }
    c
}

/// Relabels raw cluster assignments into 4-connected superpixels.
///
/// The largest connected piece of every cluster keeps it; other pieces, and
/// any piece smaller than `min_size`, are absorbed by the largest adjacent
/// region. Final ids are assigned in raster order of first appearance.
pub(crate) fn enforce_connectivity(raw: &[u32], w: usize, h: usize, min_size: usize) -> LabelMap {
    let n = w * h;
    let mut comp = vec![usize::MAX; n];
    let mut comp_label = Vec::new();
    let mut comp_size = Vec::new();
    let mut visited = vec![false; n];
    for start in 0..n {
        if visited[start] {
            continue;
        }
        let id = comp_label.len();
        let size = flood(raw, w, h, start, &mut visited, |p| comp[p] = id);
        comp_label.push(raw[start]);
        comp_size.push(size);
    }
    let ncomp = comp_label.len();

    let max_label = raw.iter().copied().max().unwrap_or(0) as usize;
    let mut main: Vec<Option<usize>> = vec![None; max_label + 1];
    for c in 0..ncomp {
        let slot = &mut main[comp_label[c] as usize];
        match slot {
            Some(m) if comp_size[*m] >= comp_size[c] => {}
            _ => *slot = Some(c),
        }
    }

    let mut edges = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let p = y * w + x;
            if x + 1 < w && comp[p] != comp[p + 1] {
                edges.push((comp[p], comp[p + 1]));
                edges.push((comp[p + 1], comp[p]));
            }
            if y + 1 < h && comp[p] != comp[p + w] {
                edges.push((comp[p], comp[p + w]));
                edges.push((comp[p + w], comp[p]));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
    for (a, b) in edges {
        neighbors[a].push(b);
    }

    let mut parent: Vec<usize> = (0..ncomp).collect();
    let mut set_size = comp_size.clone();
    for c in 0..ncomp {
        let is_main = main[comp_label[c] as usize] == Some(c);
        if is_main && set_size[c] >= min_size {
            continue;
        }
        let root = find(&mut parent, c);
        let mut target: Option<usize> = None;
        for &nb in &neighbors[c] {
            let r = find(&mut parent, nb);
            if r == root {
                continue;
            }
            target = match target {
                Some(t) if set_size[t] > set_size[r] || (set_size[t] == set_size[r] && t < r) => Some(t),
                _ => Some(r),
            };
        }
        if let Some(t) = target {
            parent[root] = t;
            set_size[t] += set_size[root];
        }
    }

    let mut final_id = vec![u32::MAX; ncomp];
    let mut next = 0u32;
    let mut labels = vec![0u32; n];
    for p in 0..n {
        let r = find(&mut parent, comp[p]);
        if final_id[r] == u32::MAX {
            final_id[r] = next;
            next += 1;
        }
        labels[p] = final_id[r];
    }
    LabelMap::from_parts(w, h, labels, next as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_label_box_covers_image() {
        let lm = LabelMap::new(4, 4, vec![0; 16]).unwrap();
        assert_eq!(superpixel_bounding_boxes(&lm), vec![BBox::new(0, 0, 3, 3)]);
    }

    #[test]
    fn vertical_halves() {
        let labels = (0..32).map(|i| if i % 8 < 4 { 0 } else { 1 }).collect();
        let lm = LabelMap::new(8, 4, labels).unwrap();
        assert_eq!(
            superpixel_bounding_boxes(&lm),
            vec![BBox::new(0, 0, 3, 3), BBox::new(4, 0, 7, 3)]
        );
        assert_eq!(adjacent_pairs(&lm), vec![(0, 1)]);
    }

    #[test]
    fn random_map_boxes_are_tight() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (w, h) = (23, 17);
        let mut labels: Vec<u32> = (0..w * h).map(|_| rng.random_range(0..6)).collect();
        labels[0..6].copy_from_slice(&[0, 1, 2, 3, 4, 5]);
        let lm = LabelMap::new(w, h, labels).unwrap();
        let boxes = superpixel_bounding_boxes(&lm);
        for (id, b) in boxes.iter().enumerate() {
            let pix: Vec<(usize, usize)> = (0..h)
                .flat_map(|y| (0..w).map(move |x| (x, y)))
                .filter(|&(x, y)| lm.at(x, y) as usize == id)
                .collect();
            assert!(pix.iter().all(|&(x, y)| b.contains(x, y)));
            assert!(pix.iter().any(|&(x, _)| x == b.x0));
            assert!(pix.iter().any(|&(x, _)| x == b.x1));
            assert!(pix.iter().any(|&(_, y)| y == b.y0));
            assert!(pix.iter().any(|&(_, y)| y == b.y1));
        }
    }

    #[test]
    fn split_label_is_reconnected() {
        // label 0 appears in two disconnected pieces
        #[rustfmt::skip]
        let raw = vec![
            0, 0, 1, 1, 0,
            0, 0, 1, 1, 1,
            0, 0, 1, 1, 1,
        ];
        let lm = enforce_connectivity(&raw, 5, 3, 1);
        assert!(is_label_connected(&lm));
        assert_eq!(lm.count(), 2);
        // the stray piece joins its only neighbour
        assert_eq!(lm.at(4, 0), lm.at(2, 0));
    }

    #[test]
    fn orphans_join_largest_neighbour() {
        #[rustfmt::skip]
        let raw = vec![
            0, 0, 0, 1, 1,
            0, 2, 0, 1, 1,
            0, 0, 0, 1, 1,
        ];
        // the single pixel of label 2 is below min size and only touches 0
        let lm = enforce_connectivity(&raw, 5, 3, 2);
        assert_eq!(lm.count(), 2);
        assert_eq!(lm.at(1, 1), lm.at(0, 0));
    }

    #[test]
    fn connectivity_detects_split_regions() {
        let lm = LabelMap::new(3, 1, vec![0, 1, 0]).unwrap();
        assert!(!is_label_connected(&lm));
        let lm = LabelMap::new(3, 1, vec![0, 0, 1]).unwrap();
        assert!(is_label_connected(&lm));
    }
}
