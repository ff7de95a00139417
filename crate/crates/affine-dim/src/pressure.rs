//! Subadditive pressure of the singular value function and the affinity
//! dimension.
//!
//! For a system `{A_1, ..., A_N}` and exponent `s`, the depth-`n` pressure
//! is
//!
//! ```text
//! P_n(s) = (1/n) * log( sum over words w of length n of phi^s(A_w) )
//! ```
//!
//! where `phi^s` is the singular value function and `A_w` the forward
//! product along `w`. `phi^s` is submultiplicative, so `n * P_n(s)` is
//! subadditive and `P_n(s)` converges to the pressure from above. The
//! affinity dimension is the root in `s` of the pressure; we track the root
//! of `P_n` over increasing depths and report the last depth-to-depth
//! movement as the error estimate.

use crate::matrix::{validate_system, word_count, Mat2};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Hard cap on full word enumeration (number of leaves).
pub const ENUMERATION_BUDGET: u64 = 1 << 24;

/// Default depth for pressure computations: the largest `n <= 12` with
/// `N^n` within the enumeration budget.
pub fn default_pressure_depth(n_symbols: usize) -> usize {
    let mut n = 0;
    while n < 12 && word_count(n_symbols, n + 1) <= ENUMERATION_BUDGET as u128 {
        n += 1;
    }
    n.max(1)
}

/// The singular value function `phi^s(A)`.
///
/// With singular values `a1 >= a2`:
/// * `a1^s` for `0 <= s <= 1`,
/// * `a1 * a2^(s-1)` for `1 < s <= 2`,
/// * `(a1 * a2)^(s/2)` for `s > 2`.
///
/// Continuous in `s` at the branch points. Errors on negative `s`.
pub fn singular_value_function(m: &Mat2, s: f64) -> Result<f64> {
    if s < 0.0 || s.is_nan() {
        return Err(Error::NegativeExponent { s });
    }
    let (a1, a2) = m.singular_values();
    let v = if s <= 1.0 {
        a1.powf(s)
    } else if s <= 2.0 {
        a1 * a2.powf(s - 1.0)
    } else {
        (a1 * a2).powf(s / 2.0)
    };
    Ok(v)
}

/// Compensated (Neumaier) summation, so the pressure sum does not depend on
/// enumeration order beyond ~1e-16 relative error.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sum of `phi^s(A_w)` over all words of length `n` (forward products),
/// via depth-first traversal with prefix products.
fn pressure_sum(mats: &[Mat2], s: f64, n: usize) -> Result<f64> {
    check_budget(mats.len(), n)?;
    let mut acc = CompensatedSum::default();
    let mut stack: Vec<Mat2> = Vec::with_capacity(n + 1);
    stack.push(Mat2::identity());
    // Iterative DFS: `path` holds the current word, `stack` the prefix
    // products (stack[k] = product of the first k symbols).
    let mut path: Vec<usize> = Vec::with_capacity(n);
    loop {
        if path.len() == n {
            let leaf = stack.last().unwrap();
            acc.add(singular_value_function(leaf, s)?);
            // Backtrack to the next unfinished branch.
            loop {
                match path.pop() {
                    None => return Ok(acc.total()),
                    Some(i) => {
                        stack.pop();
                        if i + 1 < mats.len() {
                            path.push(i + 1);
                            let prod = stack.last().unwrap().mul(&mats[i + 1]);
                            stack.push(prod);
                            break;
                        }
                    }
                }
            }
        } else {
            path.push(0);
            let prod = stack.last().unwrap().mul(&mats[0]);
            stack.push(prod);
        }
    }
}

fn check_budget(n_symbols: usize, len: usize) -> Result<()> {
    let required = word_count(n_symbols, len);
    if required > ENUMERATION_BUDGET as u128 {
        return Err(Error::BudgetExceeded {
            required,
            budget: ENUMERATION_BUDGET,
        });
    }
    Ok(())
}

/// Depth-`n` pressure `P_n(s)`.
pub fn finite_pressure(mats: &[Mat2], s: f64, n: usize) -> Result<f64> {
    validate_system(mats)?;
    if n == 0 {
        return Err(Error::InvalidInput("pressure depth must be >= 1".into()));
    }
    let total = pressure_sum(mats, s, n)?;
    Ok(total.ln() / n as f64)
}

/// Result of the affinity dimension search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AffinityDimension {
    /// Root of the deepest finite pressure computed.
    pub s0: f64,
    /// Depth of that pressure.
    pub depth_used: usize,
    /// Last depth-to-depth movement of the root (heuristic error size).
    pub error_bound: f64,
    /// Root of `P_n` for each depth `n = 1..=depth_used`.
    pub per_depth: Vec<(usize, f64)>,
    pub warnings: Vec<String>,
}

/// Root of `s -> P_n(s)` by bisection. The pressure is strictly decreasing
/// in `s` for contracting systems.
fn pressure_root(mats: &[Mat2], n: usize, warnings: &mut Vec<String>) -> Result<f64> {
    let mut lo = 0.0f64;
    let mut hi = 2.0f64;
    let p_lo = finite_pressure(mats, lo, n)?;
    if p_lo <= 0.0 {
        // log N <= 0 only for a single-map system; the root is s = 0.
        return Ok(0.0);
    }
    let mut p_hi = finite_pressure(mats, hi, n)?;
    while p_hi > 0.0 {
        if hi >= 64.0 {
            return Err(Error::InvalidInput(format!(
                "pressure still positive at s = {hi}; system is not dimension-bounded"
            )));
        }
        if hi == 2.0 {
            warnings.push(format!(
                "P_{n}(2) = {p_hi:.6} > 0: affinity dimension exceeds 2, extending bracket"
            ));
        }
        hi *= 2.0;
        p_hi = finite_pressure(mats, hi, n)?;
    }
    // Bisection to near machine precision in s; each step halves [lo, hi].
    for _ in 0..70 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let p_mid = finite_pressure(mats, mid, n)?;
        if p_mid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Affinity dimension: root of the finite pressure, refined over increasing
/// depths `n = 1..=n_max`, stopping early once the root moves less than
/// `tol` between consecutive depths.
pub fn affinity_dimension(mats: &[Mat2], n_max: usize, tol: f64) -> Result<AffinityDimension> {
    validate_system(mats)?;
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be >= 1".into()));
    }
    let mut warnings = Vec::new();
    let mut per_depth = Vec::with_capacity(n_max);
    let mut prev: Option<f64> = None;
    let mut movement = f64::INFINITY;
    for n in 1..=n_max {
        let root = pressure_root(mats, n, &mut warnings)?;
        per_depth.push((n, root));
        if let Some(p) = prev {
            movement = (root - p).abs();
        }
        prev = Some(root);
        if movement < tol && n >= 2 {
            break;
        }
    }
    let (depth_used, s0) = *per_depth.last().unwrap();
    Ok(AffinityDimension {
        s0,
        depth_used,
        error_bound: if movement.is_finite() { movement } else { 0.0 },
        per_depth,
        warnings,
    })
}

/// Largest violation of subadditivity `a_{n+m} <= a_n + a_m` for
/// `a_n = n * P_n(s)`, over `n, m <= limit`. For an exactly
/// submultiplicative `phi^s` this is nonpositive up to rounding; a sizable
/// positive value signals an implementation bug.
pub fn subadditivity_defect(mats: &[Mat2], s: f64, limit: usize) -> Result<f64> {
    let mut a = Vec::with_capacity(2 * limit + 1);
    a.push(0.0); // a_0
    for n in 1..=2 * limit {
        a.push(n as f64 * finite_pressure(mats, s, n)?);
    }
    let mut worst = f64::NEG_INFINITY;
    for n in 1..=limit {
        for m in 1..=limit {
            worst = worst.max(a[n + m] - a[n] - a[m]);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::for_each_word;

    fn assert_close(x: f64, y: f64, tol: f64) {
        assert!(
            (x - y).abs() <= tol,
            "expected {x} close to {y} (tol {tol}, diff {})",
            (x - y).abs()
        );
    }

    fn conformal_thirds() -> Vec<Mat2> {
        vec![Mat2::diagonal(1.0 / 3.0, 1.0 / 3.0); 2]
    }

    fn half_quarter(copies: usize) -> Vec<Mat2> {
        vec![Mat2::diagonal(0.5, 0.25); copies]
    }

    #[test]
    fn phi_s_branch_values() {
        let m = Mat2::diagonal(0.5, 0.25);
        assert_close(
            singular_value_function(&m, 0.5).unwrap(),
            0.5f64.sqrt(),
            1e-15,
        );
        assert_close(singular_value_function(&m, 1.5).unwrap(), 0.25, 1e-15);
        assert_eq!(singular_value_function(&m, 0.0).unwrap(), 1.0);
        assert_close(singular_value_function(&m, 2.0).unwrap(), 0.125, 1e-15);
        assert_close(
            singular_value_function(&m, 3.0).unwrap(),
            0.125f64.powf(1.5),
            1e-15,
        );
        assert!(singular_value_function(&m, -0.1).is_err());
    }

    #[test]
    fn phi_s_continuous_at_branch_points() {
        let m = Mat2::new(0.5, 0.4, 0.1, 0.1);
        for s in [1.0, 2.0] {
            let below = singular_value_function(&m, s - 1e-9).unwrap();
            let above = singular_value_function(&m, s + 1e-9).unwrap();
            assert_close(below, above, 1e-7);
        }
        let at1 = singular_value_function(&m, 1.0).unwrap();
        assert_close(at1, m.norm(), 1e-12);
    }

    #[test]
    fn finite_pressure_conformal_closed_form() {
        let mats = conformal_thirds();
        for n in 1..=6 {
            for k in 0..=8 {
                let s = 0.25 * k as f64;
                let expected = (2.0 * 3.0f64.powf(-s)).ln();
                assert_close(finite_pressure(&mats, s, n).unwrap(), expected, 1e-12);
            }
        }
    }

    #[test]
    fn finite_pressure_known_values() {
        let mats = half_quarter(3);
        // At s = 1 every depth gives log(3/2).
        for n in 1..=5 {
            assert_close(finite_pressure(&mats, 1.0, n).unwrap(), 1.5f64.ln(), 1e-12);
        }
        // At s = 0 the pressure is log N at every depth.
        assert_close(finite_pressure(&mats, 0.0, 1).unwrap(), 3.0f64.ln(), 1e-14);
        assert_close(finite_pressure(&mats, 0.0, 4).unwrap(), 3.0f64.ln(), 1e-14);
    }

    #[test]
    fn affinity_dimension_conformal() {
        let mats = conformal_thirds();
        let expected = 2.0f64.ln() / 3.0f64.ln();
        // The root is depth-independent for equal-ratio conformal systems.
        for n_max in 1..=6 {
            let res = affinity_dimension(&mats, n_max, 0.0).unwrap();
            assert_close(res.s0, expected, 1e-8);
        }
    }

    #[test]
    fn affinity_dimension_two_maps_exactly_one() {
        let res = affinity_dimension(&half_quarter(2), 6, 1e-6).unwrap();
        assert_close(res.s0, 1.0, 1e-9);
    }

    #[test]
    fn affinity_dimension_three_maps() {
        let res = affinity_dimension(&half_quarter(3), 8, 1e-6).unwrap();
        let expected = 1.0 + (1.5f64).ln() / 4.0f64.ln();
        assert_close(res.s0, expected, 1e-6);
        assert!(res.error_bound <= 1e-6);
    }

    #[test]
    fn pressure_decreasing_in_s() {
        let mats = vec![Mat2::new(0.5, 0.4, 0.1, 0.1), Mat2::new(0.4, 0.1, 0.2, 0.3)];
        let mut last = f64::INFINITY;
        for k in 0..=16 {
            let s = 0.25 * k as f64;
            let p = finite_pressure(&mats, s, 4).unwrap();
            assert!(p < last, "pressure not strictly decreasing at s={s}");
            last = p;
        }
    }

    #[test]
    fn subadditive_along_depths() {
        let mats = vec![Mat2::new(0.5, 0.4, 0.1, 0.1), Mat2::new(0.4, 0.1, 0.2, 0.3)];
        for s in [0.5, 1.0, 1.5] {
            let defect = subadditivity_defect(&mats, s, 5).unwrap();
            assert!(defect <= 1e-9, "subadditivity defect {defect} at s={s}");
        }
    }

    #[test]
    fn enumeration_order_insensitive() {
        // Summing phi^s over words in lexicographic vs reversed order must
        // agree to 1e-12 relative.
        let mats = vec![Mat2::new(0.5, 0.4, 0.1, 0.1), Mat2::new(0.4, 0.1, 0.2, 0.3)];
        let s = 1.3;
        let n = 8;
        let via_dfs = finite_pressure(&mats, s, n).unwrap();
        let mut values = Vec::new();
        for_each_word(2, n, &mut |w| {
            let word = crate::Word::new(w.to_vec()).unwrap();
            let prod = crate::matrix::word_product(&mats, &word, crate::MatOrder::Forward).unwrap();
            values.push(singular_value_function(&prod, s).unwrap());
        });
        let mut fwd = CompensatedSum::default();
        for &v in &values {
            fwd.add(v);
        }
        let mut rev = CompensatedSum::default();
        for &v in values.iter().rev() {
            rev.add(v);
        }
        let p_fwd = fwd.total().ln() / n as f64;
        let p_rev = rev.total().ln() / n as f64;
        assert_close(p_fwd, p_rev, 1e-12);
        assert_close(via_dfs, p_fwd, 1e-12);
    }

    #[test]
    fn budget_and_validation_errors() {
        let mats = vec![Mat2::diagonal(0.5, 0.5); 2];
        assert!(matches!(
            finite_pressure(&mats, 1.0, 30),
            Err(Error::BudgetExceeded { .. })
        ));
        let bad = vec![Mat2::diagonal(1.5, 0.5)];
        assert!(matches!(
            finite_pressure(&bad, 1.0, 2),
            Err(Error::NonContracting { .. })
        ));
        assert!(finite_pressure(&[], 1.0, 2).is_err());
    }

    #[test]
    fn default_depth_scales_with_alphabet() {
        assert_eq!(default_pressure_depth(2), 12);
        assert_eq!(default_pressure_depth(3), 12);
        assert_eq!(default_pressure_depth(5), 10);
        assert_eq!(default_pressure_depth(100), 3);
    }
}
