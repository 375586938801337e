//! Normalised DLT for homographies and the normalised 8-point algorithm for
//! fundamental matrices. Over-determined subsets are solved in the
//! least-squares sense through the SVD of the stacked design matrix.

use nalgebra::{DMatrix, Matrix3};

use super::{normalize_points, Correspondence, GeometryError, ModelKind, ModelParams, Point2, DEFAULT_DEGENERACY_TOL};

// twice the triangle area, in normalised coordinates
const COLLINEAR_EPS: f64 = 1e-9;

pub fn fit_homography(subset: &[Correspondence]) -> Result<ModelParams, GeometryError> {
    fit_model_with_tolerance(ModelKind::Homography, subset, DEFAULT_DEGENERACY_TOL)
}

pub fn fit_fundamental(subset: &[Correspondence]) -> Result<ModelParams, GeometryError> {
    fit_model_with_tolerance(ModelKind::FundamentalMatrix, subset, DEFAULT_DEGENERACY_TOL)
}

pub fn fit_model(kind: ModelKind, subset: &[Correspondence]) -> Result<ModelParams, GeometryError> {
    fit_model_with_tolerance(kind, subset, DEFAULT_DEGENERACY_TOL)
}

/// Fits `kind` to `subset`; `tol` is the relative singular-value gap under which
/// the design matrix counts as rank deficient.
pub fn fit_model_with_tolerance(
    kind: ModelKind,
    subset: &[Correspondence],
    tol: f64,
) -> Result<ModelParams, GeometryError> {
    let needed = kind.min_sample_size();
    if subset.len() < needed {
        return Err(GeometryError::NotEnoughPoints {
            needed,
            got: subset.len(),
        });
    }
    let pts1: Vec<Point2> = subset.iter().map(|c| c.p1).collect();
    let pts2: Vec<Point2> = subset.iter().map(|c| c.p2).collect();
    let (n1, t1) = normalize_points(&pts1)?;
    let (n2, t2) = normalize_points(&pts2)?;
    match kind {
        ModelKind::Homography => solve_homography(&n1, &n2, &t1, &t2, tol),
        ModelKind::FundamentalMatrix => solve_fundamental(&n1, &n2, &t1, &t2, tol),
    }
}

fn solve_homography(
    n1: &[Point2],
    n2: &[Point2],
    t1: &Matrix3<f64>,
    t2: &Matrix3<f64>,
    tol: f64,
) -> Result<ModelParams, GeometryError> {
    if n1.len() == 4 && (has_collinear_triple(n1) || has_collinear_triple(n2)) {
        return Err(GeometryError::Degenerate("three collinear points in a minimal sample"));
    }
    if all_collinear(n1) || all_collinear(n2) {
        return Err(GeometryError::Degenerate("points are collinear"));
    }
    let rows = (2 * n1.len()).max(9);
    let mut a = DMatrix::<f64>::zeros(rows, 9);
    for (i, (p, q)) in n1.iter().zip(n2).enumerate() {
        let (x, y, u, v) = (p.x, p.y, q.x, q.y);
        let r0 = [-x, -y, -1.0, 0.0, 0.0, 0.0, u * x, u * y, u];
        let r1 = [0.0, 0.0, 0.0, -x, -y, -1.0, v * x, v * y, v];
        for c in 0..9 {
            a[(2 * i, c)] = r0[c];
            a[(2 * i + 1, c)] = r1[c];
        }
    }
    let hn = null_vector(a, tol)?;
    let t2_inv = t2
        .try_inverse()
        .ok_or(GeometryError::Degenerate("singular normalisation"))?;
    Ok(ModelParams::new(t2_inv * hn * t1))
}

fn solve_fundamental(
    n1: &[Point2],
    n2: &[Point2],
    t1: &Matrix3<f64>,
    t2: &Matrix3<f64>,
    tol: f64,
) -> Result<ModelParams, GeometryError> {
    let rows = n1.len().max(9);
    let mut a = DMatrix::<f64>::zeros(rows, 9);
    for (i, (p, q)) in n1.iter().zip(n2).enumerate() {
        let (x, y, u, v) = (p.x, p.y, q.x, q.y);
        let r = [u * x, u * y, u, v * x, v * y, v, x, y, 1.0];
        for c in 0..9 {
            a[(i, c)] = r[c];
        }
    }
    let fn_ = enforce_rank2(&null_vector(a, tol)?);
    let f = t2.transpose() * fn_ * t1;
    Ok(ModelParams::new(enforce_rank2(&f)))
}

/// Right singular vector of the smallest singular value, reshaped row-major.
fn null_vector(a: DMatrix<f64>, tol: f64) -> Result<Matrix3<f64>, GeometryError> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.ok_or(GeometryError::Degenerate("svd did not converge"))?;
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[i].total_cmp(&sv[j]).then(i.cmp(&j)));
    let largest = sv[order[sv.len() - 1]];
    if !(largest > 0.0) || sv[order[1]] < tol * largest {
        return Err(GeometryError::Degenerate("design matrix is rank deficient"));
    }
    let row = v_t.row(order[0]);
    Ok(Matrix3::from_fn(|r, c| row[3 * r + c]))
}

fn enforce_rank2(f: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = f.svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return *f,
    };
    let mut s = svd.singular_values;
    let imin = s.imin();
    s[imin] = 0.0;
    u * Matrix3::from_diagonal(&s) * v_t
}

fn cross(a: &Point2, b: &Point2, c: &Point2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn has_collinear_triple(pts: &[Point2]) -> bool {
    let n = pts.len();
    (0..n).any(|i| (i + 1..n).any(|j| (j + 1..n).any(|k| cross(&pts[i], &pts[j], &pts[k]).abs() < COLLINEAR_EPS)))
}

fn all_collinear(pts: &[Point2]) -> bool {
    // normalised points have mean radius sqrt(2); the farthest point defines the line
    let anchor = &pts[0];
    let far = pts
        .iter()
        .max_by(|a, b| {
            let da = (a.x - anchor.x).hypot(a.y - anchor.y);
            let db = (b.x - anchor.x).hypot(b.y - anchor.y);
            da.total_cmp(&db)
        })
        .unwrap_or(anchor);
    pts.iter().all(|p| cross(anchor, far, p).abs() < COLLINEAR_EPS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sampson_residual;
    use nalgebra::Vector3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn map_h(h: &Matrix3<f64>, p: Point2) -> Point2 {
        let v = h * Vector3::new(p.x, p.y, 1.0);
        Point2::new(v.x / v.z, v.y / v.z)
    }

    fn corr(p: Point2, q: Point2) -> Correspondence {
        Correspondence::new(p, q, 1.0)
    }

    #[test]
    fn identity_from_four_points() {
        let pts = [(0.0, 0.0), (10.0, 0.0), (0.0, 10.0), (10.0, 12.0)];
        let subset: Vec<_> = pts
            .iter()
            .map(|&(x, y)| corr(Point2::new(x, y), Point2::new(x, y)))
            .collect();
        let h = fit_homography(&subset).unwrap();
        let expected = Matrix3::identity() / 3f64.sqrt();
        assert!((h.matrix() - expected).abs().max() <= 1e-12);
    }

    #[test]
    fn recovers_known_similarity_from_six_points() {
        let known = Matrix3::new(2.0, 0.0, 5.0, 0.0, 2.0, -3.0, 0.0, 0.0, 1.0);
        let pts = [
            (1.0, 2.0),
            (40.0, 3.0),
            (7.0, 55.0),
            (60.0, 70.0),
            (30.0, 31.0),
            (12.0, 90.0),
        ];
        let subset: Vec<_> = pts
            .iter()
            .map(|&(x, y)| {
                let p = Point2::new(x, y);
                corr(p, map_h(&known, p))
            })
            .collect();
        let h = fit_homography(&subset).unwrap();
        assert!(h.max_abs_diff(&ModelParams::new(known)) <= 1e-9);
    }

    #[test]
    fn collinear_triple_in_minimal_sample_is_degenerate() {
        let subset = vec![
            corr(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0)),
            corr(Point2::new(1.0, 1.0), Point2::new(5.0, 2.0)),
            corr(Point2::new(2.0, 2.0), Point2::new(3.0, 9.0)),
            corr(Point2::new(0.0, 5.0), Point2::new(8.0, 4.0)),
        ];
        assert!(matches!(fit_homography(&subset), Err(GeometryError::Degenerate(_))));
    }

    #[test]
    fn too_few_points_is_rejected() {
        let c = corr(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0));
        assert!(matches!(
            fit_homography(&[c, c, c]),
            Err(GeometryError::NotEnoughPoints { needed: 4, got: 3 })
        ));
    }

    /// Rank-2 F from two cameras: P1 = [I|0], P2 = [R|t], F = [t]x R.
    fn constructed_f() -> (Matrix3<f64>, Matrix3<f64>, Vector3<f64>) {
        let r = nalgebra::Rotation3::from_euler_angles(0.05, -0.1, 0.03).into_inner();
        let t = Vector3::new(1.0, 0.2, 0.1);
        let tx = Matrix3::new(0.0, -t.z, t.y, t.z, 0.0, -t.x, -t.y, t.x, 0.0);
        (tx * r, r, t)
    }

    fn epipolar_subset(n: usize, seed: u64) -> (Vec<Correspondence>, Matrix3<f64>) {
        let (f, r, t) = constructed_f();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let subset = (0..n)
            .map(|_| {
                let x = Vector3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(3.0..8.0),
                );
                let y = r * x + t;
                corr(Point2::new(x.x / x.z, x.y / x.z), Point2::new(y.x / y.z, y.y / y.z))
            })
            .collect();
        (subset, f)
    }

    #[test]
    fn eight_point_recovers_constructed_f() {
        for n in [8, 10] {
            let (subset, f) = epipolar_subset(n, 5);
            let est = fit_fundamental(&subset).unwrap();
            assert!(est.max_abs_diff(&ModelParams::new(f)) <= 1e-8, "n = {n}");
            for c in &subset {
                let e = Vector3::new(c.p2.x, c.p2.y, 1.0).dot(&(est.matrix() * Vector3::new(c.p1.x, c.p1.y, 1.0)));
                assert!(e.abs() <= 1e-9);
            }
            assert!(est.matrix().determinant().abs() <= 1e-9);
        }
    }

    #[test]
    fn identical_view_one_points_are_degenerate() {
        let (mut subset, _) = epipolar_subset(8, 1);
        for c in &mut subset {
            c.p1 = Point2::new(0.1, 0.2);
        }
        assert!(matches!(fit_fundamental(&subset), Err(GeometryError::Degenerate(_))));
    }

    #[test]
    fn fits_are_bit_deterministic() {
        let (subset, _) = epipolar_subset(12, 9);
        let a = fit_fundamental(&subset).unwrap();
        let b = fit_fundamental(&subset).unwrap();
        for i in 0..9 {
            assert_eq!(a.matrix()[i].to_bits(), b.matrix()[i].to_bits());
        }
    }

    #[test]
    fn residuals_scale_with_coordinates() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = Matrix3::new(1.1, 0.05, 12.0, -0.03, 0.95, 4.0, 1e-4, -2e-4, 1.0);
        let data: Vec<_> = (0..12)
            .map(|_| {
                let p = Point2::new(rng.random_range(0.0..300.0), rng.random_range(0.0..200.0));
                let q = map_h(&h, p);
                corr(
                    p,
                    Point2::new(q.x + rng.random_range(-1.0..1.0), q.y + rng.random_range(-1.0..1.0)),
                )
            })
            .collect();
        let k = 3.5;
        let scaled: Vec<_> = data.iter().map(|c| c.scaled(k)).collect();
        let m = fit_homography(&data).unwrap();
        let ms = fit_homography(&scaled).unwrap();
        for (c, cs) in data.iter().zip(&scaled) {
            let r = sampson_residual(&m, ModelKind::Homography, c);
            let rs = sampson_residual(&ms, ModelKind::Homography, cs);
            assert!((rs - k * r).abs() <= 1e-6 * (k * r).max(1e-9));
        }
    }
}
