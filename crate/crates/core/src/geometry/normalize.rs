use nalgebra::Matrix3;

use super::{GeometryError, Point2};

/// Similarity normalisation: translate the centroid to the origin and scale so
/// the mean distance from it is √2.
///
/// Returns the transformed points and the 3x3 transform mapping the originals
/// onto them.
pub fn normalize_points(points: &[Point2]) -> Result<(Vec<Point2>, Matrix3<f64>), GeometryError> {
    if points.len() < 2 {
        return Err(GeometryError::NotEnoughPoints {
            needed: 2,
            got: points.len(),
        });
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    let n = points.len() as f64;
    let cx = points.iter().map(|p| p.x).sum::<f64>() / n;
    let cy = points.iter().map(|p| p.y).sum::<f64>() / n;
    let mean_dist = points
        .iter()
        .map(|p| ((p.x - cx).powi(2) + (p.y - cy).powi(2)).sqrt())
        .sum::<f64>()
        / n;
    let spread = cx.abs().max(cy.abs()).max(1.0);
    if !(mean_dist > spread * 1e-12) {
        return Err(GeometryError::Degenerate("all points coincide"));
    }
    let s = std::f64::consts::SQRT_2 / mean_dist;
    let transform = Matrix3::new(s, 0.0, -s * cx, 0.0, s, -s * cy, 0.0, 0.0, 1.0);
    let out = points
        .iter()
        .map(|p| Point2::new(s * (p.x - cx), s * (p.y - cy)))
        .collect();
    Ok((out, transform))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn centroid_and_radius(pts: &[Point2]) -> (f64, f64, f64) {
        let n = pts.len() as f64;
        let cx = pts.iter().map(|p| p.x).sum::<f64>() / n;
        let cy = pts.iter().map(|p| p.y).sum::<f64>() / n;
        let r = pts.iter().map(|p| p.x.hypot(p.y)).sum::<f64>() / n;
        (cx, cy, r)
    }

    #[test]
    fn square_is_centred_with_root_two_radius() {
        let pts = [
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(0.0, 2.0),
            Point2::new(2.0, 2.0),
        ];
        let (out, t) = normalize_points(&pts).unwrap();
        let (cx, cy, r) = centroid_and_radius(&out);
        assert!(cx.abs() < 1e-15 && cy.abs() < 1e-15);
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        // the shift is (-1, -1) before scaling by sqrt(2)/sqrt(2) = 1
        assert!((t[(0, 2)] + 1.0).abs() < 1e-15 && (t[(1, 2)] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn repeated_point_is_degenerate() {
        let pts = [Point2::new(3.0, 4.0); 4];
        assert!(matches!(normalize_points(&pts), Err(GeometryError::Degenerate(_))));
    }

    #[test]
    fn random_cloud_meets_postconditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<Point2> = (0..10)
            .map(|_| Point2::new(rng.random_range(0.0..640.0), rng.random_range(0.0..480.0)))
            .collect();
        let (out, t) = normalize_points(&pts).unwrap();
        let (cx, cy, r) = centroid_and_radius(&out);
        assert!(cx.abs() < 1e-12 && cy.abs() < 1e-12);
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
        for (p, q) in pts.iter().zip(&out) {
            let h = t * nalgebra::Vector3::new(p.x, p.y, 1.0);
            assert!((h.x - q.x).abs() < 1e-12 && (h.y - q.y).abs() < 1e-12);
        }
    }
}
