//! Simple linear iterative clustering: grid-seeded k-means in (L, a, b, x, y)
//! restricted to a 2S x 2S window around each centre, followed by connectivity
//! enforcement.
//!
//! The assignment step is evaluated independently per pixel row, and the centre
//! update is a sequential pass, so the output does not depend on the number of
//! worker threads.

use super::regions::enforce_connectivity;
use super::{grid_interval, Image, LabelMap, SlicConfig, SuperpixelError};
use crate::par;

#[derive(Debug, Clone, Copy)]
struct Center {
    lab: [f64; 3],
    x: f64,
    y: f64,
}

pub fn slic_segment(img: &Image, cfg: &SlicConfig) -> Result<LabelMap, SuperpixelError> {
    let n = img.pixel_count();
    cfg.validate(n)?;
    let (w, h) = (img.width(), img.height());
    let s = grid_interval(n, cfg.superpixels)?;
    let mut centers = seed_centers(img, s);
    let spatial_weight = (cfg.compactness / s).powi(2);

    let mut labels = vec![u32::MAX; n];
    for _ in 0..cfg.max_iters {
        let grid = Buckets::new(&centers, s, w, h);
        let previous = labels.clone();
        par::for_each_row(&mut labels, w, |y, row| {
            for (x, slot) in row.iter_mut().enumerate() {
                *slot = assign(img.at(x, y), x as f64, y as f64, &centers, &grid, s, spatial_weight);
            }
        });
        update_centers(img, &labels, &mut centers);
        if labels == previous {
            break;
        }
    }

    let min_size = (n / centers.len() / 4).max(1);
    Ok(enforce_connectivity(&labels, w, h, min_size))
}

/// Seeds on a regular nx x ny lattice with nx ≈ w / S, ny ≈ h / S, each moved to
/// the lowest-gradient pixel of its 3x3 neighbourhood.
fn seed_centers(img: &Image, s: f64) -> Vec<Center> {
    let (w, h) = (img.width(), img.height());
    let nx = ((w as f64 / s).round() as usize).clamp(1, w);
    let ny = ((h as f64 / s).round() as usize).clamp(1, h);
    let mut centers = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let px = (((i as f64 + 0.5) * w as f64 / nx as f64) as usize).min(w - 1);
            let py = (((j as f64 + 0.5) * h as f64 / ny as f64) as usize).min(h - 1);
            let (bx, by) = lowest_gradient(img, px, py);
            centers.push(Center {
                lab: img.at(bx, by),
                x: bx as f64,
                y: by as f64,
            });
        }
    }
    centers
}

fn lab_dist2(a: [f64; 3], b: [f64; 3]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)
}

fn gradient(img: &Image, x: usize, y: usize) -> Option<f64> {
    if x == 0 || y == 0 || x + 1 >= img.width() || y + 1 >= img.height() {
        return None;
    }
    Some(lab_dist2(img.at(x + 1, y), img.at(x - 1, y)) + lab_dist2(img.at(x, y + 1), img.at(x, y - 1)))
}

fn lowest_gradient(img: &Image, x: usize, y: usize) -> (usize, usize) {
    let mut best = (x, y);
    let mut best_g = match gradient(img, x, y) {
        Some(g) => g,
        None => return best,
    };
    for dy in -1i64..=1 {
        for dx in -1i64..=1 {
            let (cx, cy) = (x as i64 + dx, y as i64 + dy);
            if cx < 0 || cy < 0 {
                continue;
            }
            if let Some(g) = gradient(img, cx as usize, cy as usize) {
                if g < best_g {
                    best_g = g;
                    best = (cx as usize, cy as usize);
                }
            }
        }
    }
    best
}

/// Centres bucketed on a grid of cell size S; every centre within S of a pixel
/// along both axes lies in the 3x3 block of cells around it.
struct Buckets {
    cell: f64,
    cols: usize,
    rows: usize,
    cells: Vec<Vec<u32>>,
}

impl Buckets {
    fn new(centers: &[Center], s: f64, w: usize, h: usize) -> Self {
        let cols = ((w as f64 / s).floor() as usize + 1).max(1);
        let rows = ((h as f64 / s).floor() as usize + 1).max(1);
        let mut cells = vec![Vec::new(); cols * rows];
        for (k, c) in centers.iter().enumerate() {
            let (cx, cy) = Self::cell_of(c.x, c.y, s, cols, rows);
            cells[cy * cols + cx].push(k as u32);
        }
        Self {
            cell: s,
            cols,
            rows,
            cells,
        }
    }

    fn cell_of(x: f64, y: f64, s: f64, cols: usize, rows: usize) -> (usize, usize) {
        let cx = ((x / s).floor().max(0.0) as usize).min(cols - 1);
        let cy = ((y / s).floor().max(0.0) as usize).min(rows - 1);
        (cx, cy)
    }
}

fn assign(lab: [f64; 3], x: f64, y: f64, centers: &[Center], grid: &Buckets, s: f64, spatial_weight: f64) -> u32 {
    let (gx, gy) = Buckets::cell_of(x, y, grid.cell, grid.cols, grid.rows);
    let mut best = u32::MAX;
    let mut best_d = f64::INFINITY;
    let consider = |k: u32, best: &mut u32, best_d: &mut f64| {
        let c = &centers[k as usize];
        let dxy = (c.x - x).powi(2) + (c.y - y).powi(2);
        let d = lab_dist2(lab, c.lab) + dxy * spatial_weight;
        if d < *best_d || (d == *best_d && k < *best) {
            *best_d = d;
            *best = k;
        }
    };
    for cy in gy.saturating_sub(1)..=(gy + 1).min(grid.rows - 1) {
        for cx in gx.saturating_sub(1)..=(gx + 1).min(grid.cols - 1) {
            for &k in &grid.cells[cy * grid.cols + cx] {
                let c = &centers[k as usize];
                if (c.x - x).abs() <= s && (c.y - y).abs() <= s {
                    consider(k, &mut best, &mut best_d);
                }
            }
        }
    }
    if best == u32::MAX {
        // no centre within the window: fall back to all of them
        for k in 0..centers.len() as u32 {
            consider(k, &mut best, &mut best_d);
        }
    }
    best
}

fn update_centers(img: &Image, labels: &[u32], centers: &mut [Center]) {
    let w = img.width();
    let mut sums = vec![[0.0f64; 5]; centers.len()];
    let mut counts = vec![0usize; centers.len()];
    for (p, &l) in labels.iter().enumerate() {
        let lab = img.pixels()[p];
        let acc = &mut sums[l as usize];
        acc[0] += lab[0];
        acc[1] += lab[1];
        acc[2] += lab[2];
        acc[3] += (p % w) as f64;
        acc[4] += (p / w) as f64;
        counts[l as usize] += 1;
    }
    for ((c, acc), &n) in centers.iter_mut().zip(&sums).zip(&counts) {
        if n > 0 {
            let k = n as f64;
            c.lab = [acc[0] / k, acc[1] / k, acc[2] / k];
            c.x = acc[3] / k;
            c.y = acc[4] / k;
        }
    }
}
