//! Multi-structure geometric model fitting with superpixel-guided,
//! deterministic hypothesis generation, plus RANSAC and PROSAC baselines.

// `!(x > t)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod geometry;
pub mod grouping;
pub mod io;
pub mod par;
pub mod pipeline;
pub mod superpixel;
pub mod synthetic;
