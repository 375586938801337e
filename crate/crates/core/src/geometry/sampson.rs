//! First-order geometric (Sampson) distances.
//!
//! For a fundamental matrix the single epipolar constraint `x2ᵀ F x1` is
//! divided by the norm of its gradient. For a homography the two independent
//! rows of `x2 × H x1` form the algebraic error `e`, with `J` its 2x4 Jacobian
//! with respect to `(x1, y1, x2, y2)`; the distance is `sqrt(eᵀ (J Jᵀ)⁻¹ e)`.
//! A vanishing gradient yields `+∞`, which never counts as an inlier.

use nalgebra::{Matrix2, Vector2, Vector3};

use super::{Correspondence, ModelKind, ModelParams};
use crate::par;

const GRADIENT_EPS: f64 = 1e-30;

pub fn sampson_residual(model: &ModelParams, kind: ModelKind, c: &Correspondence) -> f64 {
    let m = model.matrix();
    let x1 = Vector3::new(c.p1.x, c.p1.y, 1.0);
    let x2 = Vector3::new(c.p2.x, c.p2.y, 1.0);
    let d = match kind {
        ModelKind::FundamentalMatrix => {
            let fx1 = m * x1;
            let ftx2 = m.transpose() * x2;
            let err = x2.dot(&fx1);
            let g2 = fx1.x * fx1.x + fx1.y * fx1.y + ftx2.x * ftx2.x + ftx2.y * ftx2.y;
            if !(g2 > GRADIENT_EPS) {
                return f64::INFINITY;
            }
            err.abs() / g2.sqrt()
        }
        ModelKind::Homography => {
            let hx = m * x1;
            let e = Vector2::new(hx.x - c.p2.x * hx.z, hx.y - c.p2.y * hx.z);
            // rows: d/d(x1, y1, x2, y2)
            let j0 = [
                m[(0, 0)] - c.p2.x * m[(2, 0)],
                m[(0, 1)] - c.p2.x * m[(2, 1)],
                -hx.z,
                0.0,
            ];
            let j1 = [
                m[(1, 0)] - c.p2.y * m[(2, 0)],
                m[(1, 1)] - c.p2.y * m[(2, 1)],
                0.0,
                -hx.z,
            ];
            let dot = |a: &[f64; 4], b: &[f64; 4]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
            let jjt = Matrix2::new(dot(&j0, &j0), dot(&j0, &j1), dot(&j1, &j0), dot(&j1, &j1));
            if !(jjt.determinant().abs() > GRADIENT_EPS) {
                return f64::INFINITY;
            }
            match jjt.try_inverse() {
                Some(inv) => (e.transpose() * inv * e)[(0, 0)].max(0.0).sqrt(),
                None => return f64::INFINITY,
            }
        }
    };
    if d.is_finite() {
        d
    } else {
        f64::INFINITY
    }
}

/// Residual kernel specialised on the model entries, evaluated without
/// intermediate matrix types.
#[derive(Clone, Copy)]
struct Kernel {
    kind: ModelKind,
    m: [f64; 9],
}

impl Kernel {
    fn new(model: &ModelParams, kind: ModelKind) -> Self {
        let r = model.to_rows();
        Self {
            kind,
            m: [
                r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], r[2][0], r[2][1], r[2][2],
            ],
        }
    }

    #[inline]
    fn eval(&self, c: &Correspondence) -> f64 {
        let [a, b, cc, d, e, f, g, h, i] = self.m;
        let (x, y, u, v) = (c.p1.x, c.p1.y, c.p2.x, c.p2.y);
        let r = match self.kind {
            ModelKind::FundamentalMatrix => {
                let l0 = a * x + b * y + cc;
                let l1 = d * x + e * y + f;
                let l2 = g * x + h * y + i;
                let m0 = a * u + d * v + g;
                let m1 = b * u + e * v + h;
                let err = u * l0 + v * l1 + l2;
                let g2 = l0 * l0 + l1 * l1 + m0 * m0 + m1 * m1;
                if !(g2 > GRADIENT_EPS) {
                    return f64::INFINITY;
                }
                err.abs() / g2.sqrt()
            }
            ModelKind::Homography => {
                let w = g * x + h * y + i;
                let e0 = (a * x + b * y + cc) - u * w;
                let e1 = (d * x + e * y + f) - v * w;
                let (p0, p1) = (a - u * g, b - u * h);
                let (q0, q1) = (d - v * g, e - v * h);
                let s00 = p0 * p0 + p1 * p1 + w * w;
                let s01 = p0 * q0 + p1 * q1;
                let s11 = q0 * q0 + q1 * q1 + w * w;
                let det = s00 * s11 - s01 * s01;
                if !(det.abs() > GRADIENT_EPS) {
                    return f64::INFINITY;
                }
                let quad = (s11 * e0 * e0 - 2.0 * s01 * e0 * e1 + s00 * e1 * e1) / det;
                quad.max(0.0).sqrt()
            }
        };
        if r.is_finite() {
            r
        } else {
            f64::INFINITY
        }
    }
}

/// Sampson residual of every correspondence, in input order.
pub fn residuals(model: &ModelParams, kind: ModelKind, data: &[Correspondence]) -> Vec<f64> {
    let k = Kernel::new(model, kind);
    par::map(data, |c| k.eval(c))
}

/// Ascending indices of the correspondences whose residual is at most `scale`.
pub fn inlier_indices(model: &ModelParams, kind: ModelKind, data: &[Correspondence], scale: f64) -> Vec<usize> {
    residuals(model, kind, data)
        .into_iter()
        .enumerate()
        .filter_map(|(i, r)| (r <= scale).then_some(i))
        .collect()
}
