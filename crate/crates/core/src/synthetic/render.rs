//! Flat-shaded procedural views: one base colour per structure region plus
//! low-amplitude hash noise.

use super::{Motion, SceneSpec};
use crate::geometry::Point2;

const BACKGROUND: [u8; 3] = [128, 128, 128];

const PALETTE: [[u8; 3]; 8] = [
    [200, 60, 50],
    [40, 110, 200],
    [60, 170, 70],
    [220, 190, 40],
    [150, 60, 170],
    [40, 180, 180],
    [230, 120, 30],
    [90, 60, 30],
];

/// Peak-to-peak amplitude of the texture noise, in 8-bit levels.
const NOISE_LEVELS: u64 = 17;

pub(super) fn render_views(spec: &SceneSpec, clean2: &[Vec<Point2>]) -> (Vec<u8>, Vec<u8>) {
    let polys1: Vec<Vec<Point2>> = spec.structures.iter().map(|s| s.region.corners().to_vec()).collect();
    let polys2: Vec<Vec<Point2>> = spec
        .structures
        .iter()
        .zip(clean2)
        .map(|(s, pts)| match &s.motion {
            Motion::Homography(_) => convex_hull(s.region.corners().iter().map(|&c| s.motion.apply(c, 1.0)).collect()),
            Motion::Rigid { .. } => convex_hull(pts.clone()),
        })
        .collect();
    (
        paint(spec, &polys1, spec.seed.wrapping_mul(2)),
        paint(spec, &polys2, spec.seed.wrapping_mul(2).wrapping_add(1)),
    )
}

fn paint(spec: &SceneSpec, polys: &[Vec<Point2>], salt: u64) -> Vec<u8> {
    let (w, h) = (spec.width, spec.height);
    let mut out = Vec::with_capacity(w * h * 3);
    for y in 0..h {
        for x in 0..w {
            let p = Point2::new(x as f64, y as f64);
            let base = polys
                .iter()
                .enumerate()
                .rev()
                .find(|(_, poly)| inside_convex(poly, p))
                .map_or(BACKGROUND, |(k, _)| PALETTE[k % PALETTE.len()]);
            let n = hash(salt, (y * w + x) as u64) % NOISE_LEVELS;
            for ch in base {
                out.push((ch as i64 + n as i64 - (NOISE_LEVELS / 2) as i64).clamp(0, 255) as u8);
            }
        }
    }
    out
}

fn hash(salt: u64, i: u64) -> u64 {
    let mut z = salt ^ i.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Counter-clockwise hull (monotone chain); fewer than three points give an empty hull.
fn convex_hull(mut pts: Vec<Point2>) -> Vec<Point2> {
    pts.retain(|p| p.is_finite());
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return Vec::new();
    }
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
    for pass in [pts.clone(), pts.iter().rev().copied().collect()] {
        let start = hull.len();
        for p in pass {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.len() < 3 {
        hull.clear();
    }
    hull
}

/// Whether `p` lies in the convex polygon `poly` of either orientation.
fn inside_convex(poly: &[Point2], p: Point2) -> bool {
    if poly.len() < 3 {
        return false;
    }
    let (mut pos, mut neg) = (false, false);
    for i in 0..poly.len() {
        let c = cross(poly[i], poly[(i + 1) % poly.len()], p);
        pos |= c > 0.0;
        neg |= c < 0.0;
    }
    !(pos && neg)
}
