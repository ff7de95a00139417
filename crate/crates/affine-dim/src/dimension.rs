//! Dimension formulas for measures on planar self-affine attractors, and
//! the matrix-class conditions under which the Lyapunov dimension is known
//! to be attained.
//!
//! Throughout, `h` is the entropy of an ergodic measure and
//! `0 < chi_s <= chi_ss` are its Lyapunov exponents written as contraction
//! rates (both positive, strong-stable the larger).

use crate::matrix::Mat2;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

fn validate_exponents(h: f64, chi_s: f64, chi_ss: f64) -> Result<()> {
    if !(h >= 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "entropy must be >= 0, got {h}"
        )));
    }
    if !(chi_s > 0.0 && chi_ss.is_finite() && chi_ss >= chi_s) {
        return Err(Error::InvalidInput(format!(
            "need 0 < chi_s <= chi_ss, got chi_s = {chi_s}, chi_ss = {chi_ss}"
        )));
    }
    Ok(())
}

/// Lyapunov dimension `min(h / chi_s, 1 + (h - chi_s) / chi_ss)`.
///
/// The minimum reproduces the usual piecewise definition: the first branch
/// is smaller exactly when `h <= chi_s`.
pub fn lyapunov_dimension(h: f64, chi_s: f64, chi_ss: f64) -> Result<f64> {
    validate_exponents(h, chi_s, chi_ss)?;
    Ok((h / chi_s).min(1.0 + (h - chi_s) / chi_ss))
}

/// Dimension of the strong-stable slices, `min(1, h / (chi_ss - chi_s))`.
///
/// Needs a strict gap between the exponents; equal exponents make the
/// quotient meaningless and return [`Error::NoDominationGap`].
pub fn ess_dimension(h: f64, chi_s: f64, chi_ss: f64) -> Result<f64> {
    validate_exponents(h, chi_s, chi_ss)?;
    if chi_ss - chi_s <= 0.0 {
        return Err(Error::NoDominationGap { chi: chi_s });
    }
    Ok((h / (chi_ss - chi_s)).min(1.0))
}

/// Ledrappier-Young value `h / chi_ss + (1 - chi_s / chi_ss) * dim_t`,
/// where `dim_t` is the dimension of the projection along the stable
/// direction field. With `dim_t = 1` this equals the second Lyapunov
/// branch `1 + (h - chi_s) / chi_ss`.
pub fn ledrappier_young_dimension(h: f64, chi_s: f64, chi_ss: f64, dim_t: f64) -> Result<f64> {
    validate_exponents(h, chi_s, chi_ss)?;
    if !(0.0..=1.0).contains(&dim_t) {
        return Err(Error::InvalidInput(format!(
            "transverse dimension must lie in [0, 1], got {dim_t}"
        )));
    }
    Ok(h / chi_ss + (1.0 - chi_s / chi_ss) * dim_t)
}

/// The entropy condition deciding whether slice dimension cannot drop
/// below the Lyapunov dimension.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SliceCondition {
    /// `h / (chi_ss - chi_s)`, the candidate slice dimension before capping.
    pub slice_ratio: f64,
    /// `min(1, h / chi_s)`.
    pub lyapunov_floor: f64,
    /// `slice_ratio >= lyapunov_floor`.
    pub direct: bool,
    /// `slice_ratio + 2 h / chi_ss`.
    pub combined_value: f64,
    /// `combined_value > 2`.
    pub combined: bool,
    /// Whether either route succeeds.
    pub holds: bool,
}

/// Checks `h / (chi_ss - chi_s) >= min(1, h / chi_s)` or, failing that,
/// `h / (chi_ss - chi_s) + 2 h / chi_ss > 2`.
pub fn slice_condition(h: f64, chi_s: f64, chi_ss: f64) -> Result<SliceCondition> {
    validate_exponents(h, chi_s, chi_ss)?;
    if chi_ss - chi_s <= 0.0 {
        return Err(Error::NoDominationGap { chi: chi_s });
    }
    let slice_ratio = h / (chi_ss - chi_s);
    let lyapunov_floor = (h / chi_s).min(1.0);
    let direct = slice_ratio >= lyapunov_floor;
    let combined_value = slice_ratio + 2.0 * h / chi_ss;
    let combined = combined_value > 2.0;
    Ok(SliceCondition {
        slice_ratio,
        lyapunov_floor,
        direct,
        combined_value,
        combined,
        holds: direct || combined,
    })
}

/// Lower bound for the combined slice-condition value in terms of the
/// affinity dimension alone, valid when the measure is the equilibrium
/// state at `s0` (so that `h >= chi_s + (s0 - 1) chi_ss`):
/// `-3 + (2 + 1 / (1 - r)) s0 + 2 r` with `r = chi_s / chi_ss`.
///
/// `None` when the exponents have no gap (`r >= 1`).
pub fn combined_condition_lower_bound(s0: f64, chi_ratio: f64) -> Option<f64> {
    if !(0.0..1.0).contains(&chi_ratio) {
        return None;
    }
    Some(-3.0 + (2.0 + 1.0 / (1.0 - chi_ratio)) * s0 + 2.0 * chi_ratio)
}

/// Per-matrix membership data for the norm and singular-value classes.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MatrixClassReport {
    pub index: usize,
    /// All four entries share a sign.
    pub sign_definite: bool,
    /// `|det A| / (min row sum of |entries|)^2`; membership needs `< 1/2`.
    pub det_ratio: f64,
    /// `max row sum of |entries|`; membership needs `< 1`.
    pub sup_norm: f64,
    /// Sign-definite with `0 < det_ratio < 1/2` and `sup_norm < 1`.
    pub in_base_class: bool,
    /// `alpha_1^2 / alpha_2`, i.e. `||A^{-1}|| * ||A||^2`.
    pub norm_ratio: f64,
    /// `norm_ratio <= 1`.
    pub norm_inequality: bool,
}

/// System-level class verdicts used by the attained-dimension results.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassReport {
    pub per_matrix: Vec<MatrixClassReport>,
    /// Every matrix is in the base (sign-definite, small-determinant) class.
    pub base_class: bool,
    /// Base class plus the norm inequality for every matrix.
    pub norm_class: bool,
    /// Affinity dimension used for the threshold check.
    pub s0: f64,
    /// `s0` exceeds the threshold.
    pub large_dimension_class: bool,
    /// `5/3`, or `3/2` when the relaxed variant is requested.
    pub threshold: f64,
    pub relaxed: bool,
}

/// Class data for a single matrix; `index` is its position in the system.
pub fn classify_matrix(a: &Mat2, index: usize) -> MatrixClassReport {
    let sign_definite = a.is_sign_definite();
    let floor = a.min_abs_row_sum();
    let det_ratio = if floor > 0.0 {
        a.det().abs() / (floor * floor)
    } else {
        f64::INFINITY
    };
    let sup_norm = a.max_abs_row_sum();
    let in_base_class = sign_definite && det_ratio > 0.0 && det_ratio < 0.5 && sup_norm < 1.0;
    let (a1, a2) = a.singular_values();
    let norm_ratio = a1 * a1 / a2;
    MatrixClassReport {
        index,
        sign_definite,
        det_ratio,
        sup_norm,
        in_base_class,
        norm_ratio,
        norm_inequality: norm_ratio <= 1.0,
    }
}

/// Classifies each matrix and the system: the base class asks for sign
/// definiteness, determinant ratio below one half and sup norm below one;
/// the norm class additionally asks `||A^{-1}|| ||A||^2 <= 1`; the
/// large-dimension class asks `s0 > 5/3` (relaxed: `> 3/2`).
pub fn classify_system(mats: &[Mat2], s0: f64, relaxed: bool) -> Result<ClassReport> {
    crate::matrix::validate_system(mats)?;
    let per_matrix: Vec<MatrixClassReport> = mats
        .iter()
        .enumerate()
        .map(|(index, a)| classify_matrix(a, index))
        .collect();
    let base_class = per_matrix.iter().all(|m| m.in_base_class);
    let norm_class = base_class && per_matrix.iter().all(|m| m.norm_inequality);
    let threshold = if relaxed { 1.5 } else { 5.0 / 3.0 };
    Ok(ClassReport {
        per_matrix,
        base_class,
        norm_class,
        s0,
        large_dimension_class: s0 > threshold,
        threshold,
        relaxed,
    })
}
