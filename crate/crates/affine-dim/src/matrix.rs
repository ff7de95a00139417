//! Planar linear algebra: 2x2 matrices in closed form, projective points
//! (lines through the origin), and symbolic words with ordered matrix
//! products.
//!
//! Everything is plain `f64`. Singular values come from the exact 2x2
//! closed form, not an iterative SVD, so downstream pressure sums and
//! domination estimates are deterministic and cheap.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// A 2x2 real matrix, row-major: `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub const fn identity() -> Self {
        Mat2::new(1.0, 0.0, 0.0, 1.0)
    }

    pub const fn diagonal(a: f64, d: f64) -> Self {
        Mat2::new(a, 0.0, 0.0, d)
    }

    pub fn from_array(m: [f64; 4]) -> Self {
        Mat2::new(m[0], m[1], m[2], m[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new(self.a, self.c, self.b, self.d)
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        Mat2::new(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        )
    }

    pub fn scale(&self, t: f64) -> Mat2 {
        Mat2::new(t * self.a, t * self.b, t * self.c, t * self.d)
    }

    pub fn add(&self, rhs: &Mat2) -> Mat2 {
        Mat2::new(
            self.a + rhs.a,
            self.b + rhs.b,
            self.c + rhs.c,
            self.d + rhs.d,
        )
    }

    pub fn inverse(&self) -> Result<Mat2> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::SingularMatrix { det });
        }
        Ok(Mat2::new(
            self.d / det,
            -self.b / det,
            -self.c / det,
            self.a / det,
        ))
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    /// Singular values `(alpha1, alpha2)` with `alpha1 >= alpha2 >= 0`.
    ///
    /// Uses the closed form obtained from the eigenvalues of `A A^T`: with
    /// `q = sqrt(((a+d)/2)^2 + ((c-b)/2)^2)` and
    /// `r = sqrt(((a-d)/2)^2 + ((c+b)/2)^2)` the singular values are
    /// `q + r` and `|q - r|`. This form is exact (`q^2 - r^2 = det A`), so
    /// the product `alpha1 * alpha2` reproduces `|det A|` to rounding error
    /// even when the matrix is badly conditioned.
    pub fn singular_values(&self) -> (f64, f64) {
        let e = (self.a + self.d) / 2.0;
        let f = (self.a - self.d) / 2.0;
        let g = (self.c + self.b) / 2.0;
        let h = (self.c - self.b) / 2.0;
        let q = (e * e + h * h).sqrt();
        let r = (f * f + g * g).sqrt();
        (q + r, (q - r).abs())
    }

    /// Operator norm (largest singular value).
    pub fn norm(&self) -> f64 {
        self.singular_values().0
    }

    /// Smallest singular value (the conorm); equals `1 / ||A^{-1}||` for
    /// invertible matrices.
    pub fn conorm(&self) -> f64 {
        self.singular_values().1
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d).sqrt()
    }

    /// Smallest absolute row sum: `min(|a| + |b|, |c| + |d|)`.
    pub fn min_abs_row_sum(&self) -> f64 {
        (self.a.abs() + self.b.abs()).min(self.c.abs() + self.d.abs())
    }

    /// Largest absolute row sum (the l-infinity operator norm).
    pub fn max_abs_row_sum(&self) -> f64 {
        (self.a.abs() + self.b.abs()).max(self.c.abs() + self.d.abs())
    }

    /// True if all entries are strictly positive or all strictly negative.
    pub fn is_sign_definite(&self) -> bool {
        (self.a > 0.0 && self.b > 0.0 && self.c > 0.0 && self.d > 0.0)
            || (self.a < 0.0 && self.b < 0.0 && self.c < 0.0 && self.d < 0.0)
    }

    /// Norm of the restriction to the line `p`: `||A v||` for a unit vector
    /// `v` spanning `p`.
    pub fn restricted_norm(&self, p: &ProjPoint) -> f64 {
        let v = p.direction();
        let w = self.apply(v);
        (w[0] * w[0] + w[1] * w[1]).sqrt()
    }

    /// Eigenvalues if real, ordered by absolute value (largest first).
    /// Returns `None` for a complex conjugate pair.
    pub fn real_eigenvalues(&self) -> Option<(f64, f64)> {
        let half_tr = (self.a + self.d) / 2.0;
        let disc = half_tr * half_tr - self.det();
        if disc < 0.0 {
            return None;
        }
        let s = disc.sqrt();
        let (l1, l2) = (half_tr + s, half_tr - s);
        if l1.abs() >= l2.abs() {
            Some((l1, l2))
        } else {
            Some((l2, l1))
        }
    }

    /// Eigendirection for a real eigenvalue.
    pub fn eigendirection(&self, lambda: f64) -> Result<ProjPoint> {
        // (A - lambda I) v = 0; pick the larger row for stability.
        let r1 = [self.a - lambda, self.b];
        let r2 = [self.c, self.d - lambda];
        let n1 = r1[0].abs() + r1[1].abs();
        let n2 = r2[0].abs() + r2[1].abs();
        let row = if n1 >= n2 { r1 } else { r2 };
        if row[0].abs() + row[1].abs() == 0.0 {
            // A == lambda I: every direction works.
            return ProjPoint::from_vector(1.0, 0.0);
        }
        ProjPoint::from_vector(-row[1], row[0])
    }
}

/// A point of the projective line: a line through the origin in the plane.
///
/// Stored as its canonical angle in `[0, pi)`. Antipodal vectors give the
/// same point; comparisons go through the sine of the angular difference so
/// there is no wrap-around at the ends of the fundamental domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjPoint {
    angle: f64,
}

impl ProjPoint {
    /// Horizontal axis, `span(e1)`.
    pub const E1: ProjPoint = ProjPoint { angle: 0.0 };
    /// Vertical axis, `span(e2)`.
    pub const E2: ProjPoint = ProjPoint {
        angle: std::f64::consts::FRAC_PI_2,
    };

    /// The line spanned by `(x, y)`. Errors on the zero vector.
    pub fn from_vector(x: f64, y: f64) -> Result<ProjPoint> {
        if x == 0.0 && y == 0.0 {
            return Err(Error::InvalidInput(
                "projective point needs a nonzero vector".into(),
            ));
        }
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::InvalidInput(
                "projective point needs finite coordinates".into(),
            ));
        }
        Ok(ProjPoint::from_angle(y.atan2(x)))
    }

    /// The line at the given angle (any real; reduced mod pi).
    pub fn from_angle(theta: f64) -> ProjPoint {
        let mut angle = theta.rem_euclid(std::f64::consts::PI);
        // rem_euclid can return the modulus itself after rounding.
        if angle >= std::f64::consts::PI {
            angle = 0.0;
        }
        ProjPoint { angle }
    }

    /// Canonical angle in `[0, pi)`.
    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// A unit vector spanning the line.
    pub fn direction(&self) -> [f64; 2] {
        [self.angle.cos(), self.angle.sin()]
    }

    /// Image line under an invertible matrix.
    pub fn apply(&self, m: &Mat2) -> ProjPoint {
        let w = m.apply(self.direction());
        ProjPoint::from_vector(w[0], w[1])
            .expect("invertible matrix cannot map a unit vector to zero")
    }

    /// Projective angle metric, in `[0, pi/2]`.
    ///
    /// For angles `t1, t2` this is `min(|t1 - t2|, pi - |t1 - t2|)`,
    /// computed as `atan2(|sin d|, |cos d|)` to stay exact across the
    /// wrap-around at 0 and pi.
    pub fn angle_to(&self, other: &ProjPoint) -> f64 {
        let d = self.angle - other.angle;
        d.sin().abs().atan2(d.cos().abs())
    }

    /// `|sin|` of the angle between the two lines; proportional to the area
    /// of the parallelogram spanned by unit representatives.
    pub fn sin_angle_to(&self, other: &ProjPoint) -> f64 {
        (self.angle - other.angle).sin().abs()
    }
}

/// Order of a symbolic matrix product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatOrder {
    /// `A_{w1} A_{w2} ... A_{wn}`, indices as written.
    Forward,
    /// `A_{wn} ... A_{w2} A_{w1}`.
    Reversed,
}

/// A finite word over the alphabet `{1, ..., N}`.
///
/// Words that index cylinders of the past `(i_{-n}, ..., i_{-1})` are stored
/// oldest-first, so the most recent symbol is the last entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(symbols: Vec<u8>) -> Result<Word> {
        if symbols.iter().any(|&s| s == 0) {
            return Err(Error::SymbolOutOfRange {
                symbol: 0,
                n_symbols: 0,
            });
        }
        Ok(Word(symbols))
    }

    /// The constant word `(s, s, ..., s)` of the given length.
    pub fn constant(symbol: u8, len: usize) -> Word {
        Word(vec![symbol; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    /// Zero-based matrix index at position `k`.
    pub fn idx(&self, k: usize) -> usize {
        (self.0[k] - 1) as usize
    }

    pub fn first(&self) -> Option<u8> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<u8> {
        self.0.last().copied()
    }

    pub fn push(&mut self, symbol: u8) {
        self.0.push(symbol);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Word {
        Word(self.0[range].to_vec())
    }

    pub fn reversed(&self) -> Word {
        let mut v = self.0.clone();
        v.reverse();
        Word(v)
    }

    /// Checks every symbol against the alphabet size.
    pub fn validate(&self, n_symbols: usize) -> Result<()> {
        for &s in &self.0 {
            if s == 0 || s as usize > n_symbols {
                return Err(Error::SymbolOutOfRange {
                    symbol: s,
                    n_symbols,
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&s| s <= 9) {
            for s in &self.0 {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
            write!(f, "{}", parts.join("-"))
        }
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Parses either a digit string (`"1221"`) or a dash/comma separated
    /// list (`"1-12-3"`, `"1,12,3"`) for alphabets past 9 symbols.
    fn from_str(s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::EmptyWord);
        }
        let symbols = if s.contains(['-', ',']) {
            s.split(['-', ','])
                .map(|p| {
                    p.trim()
                        .parse::<u8>()
                        .map_err(|_| Error::InvalidInput(format!("bad word chunk {p:?}")))
                })
                .collect::<Result<Vec<u8>>>()?
        } else {
            s.chars()
                .map(|ch| {
                    ch.to_digit(10)
                        .filter(|&d| d >= 1)
                        .map(|d| d as u8)
                        .ok_or_else(|| Error::InvalidInput(format!("bad word digit {ch:?}")))
                })
                .collect::<Result<Vec<u8>>>()?
        };
        Word::new(symbols)
    }
}

/// Ordered product of system matrices along a word.
pub fn word_product(mats: &[Mat2], word: &Word, order: MatOrder) -> Result<Mat2> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    word.validate(mats.len())?;
    let mut acc = Mat2::identity();
    match order {
        MatOrder::Forward => {
            for k in 0..word.len() {
                acc = acc.mul(&mats[word.idx(k)]);
            }
        }
        MatOrder::Reversed => {
            for k in (0..word.len()).rev() {
                acc = acc.mul(&mats[word.idx(k)]);
            }
        }
    }
    Ok(acc)
}

/// Checks that a matrix family is a usable system: nonempty, every member
/// invertible and a strict contraction in operator norm.
pub fn validate_system(mats: &[Mat2]) -> Result<()> {
    if mats.is_empty() {
        return Err(Error::EmptySystem);
    }
    for (index, m) in mats.iter().enumerate() {
        let det = m.det();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::SingularMatrix { det });
        }
        let norm = m.norm();
        if !(norm < 1.0) {
            return Err(Error::NonContracting { index, norm });
        }
    }
    Ok(())
}

/// `n_symbols^len` as u128, for budget checks.
pub fn word_count(n_symbols: usize, len: usize) -> u128 {
    (n_symbols as u128).saturating_pow(len as u32)
}

/// Errors out if enumerating all words of the given length would exceed
/// `budget`.
pub fn check_enumeration_budget(n_symbols: usize, len: usize, budget: u64) -> Result<()> {
    let required = word_count(n_symbols, len);
    if required > budget as u128 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(())
}

/// Calls `f` on every word of the given length (as a symbol slice, symbols
/// 1-based), in lexicographic order.
pub fn for_each_word(n_symbols: usize, len: usize, f: &mut impl FnMut(&[u8])) {
    let mut buf = vec![1u8; len];
    if len == 0 {
        f(&buf);
        return;
    }
    loop {
        f(&buf);
        // Odometer increment, last position fastest.
        let mut k = len;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if (buf[k] as usize) < n_symbols {
                buf[k] += 1;
                for slot in &mut buf[k + 1..] {
                    *slot = 1;
                }
                break;
            }
        }
    }
}


#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    fn small_entry() -> impl Strategy<Value = f64> {
        prop_oneof![(-1.0..1.0f64), (-0.01..0.01f64)]
    }

    fn nonsingular() -> impl Strategy<Value = Mat2> {
        (small_entry(), small_entry(), small_entry(), small_entry())
            .prop_map(|(a, b, c, d)| Mat2::new(a, b, c, d))
            .prop_filter("nonsingular", |m| m.det().abs() > 1e-9)
    }

    proptest! {
        #[test]
        fn sv_product_is_abs_det(m in nonsingular()) {
            let (a1, a2) = m.singular_values();
            let det = m.det().abs();
            prop_assert!((a1 * a2 - det).abs() <= 1e-12 * det.max(1.0));
            prop_assert!(a1 >= a2);
        }

        #[test]
        fn norm_dominates_application(m in nonsingular(), theta in 0.0..std::f64::consts::PI) {
            let p = ProjPoint::from_angle(theta);
            let r = m.restricted_norm(&p);
            let (a1, a2) = m.singular_values();
            prop_assert!(r <= a1 * (1.0 + 1e-12) + 1e-12);
            prop_assert!(r >= a2 * (1.0 - 1e-12) - 1e-12);
        }

        #[test]
        fn angle_metric_axioms(t1 in 0.0..std::f64::consts::PI,
                               t2 in 0.0..std::f64::consts::PI,
                               t3 in 0.0..std::f64::consts::PI) {
            let p = ProjPoint::from_angle(t1);
            let q = ProjPoint::from_angle(t2);
            let r = ProjPoint::from_angle(t3);
            prop_assert!((p.angle_to(&q) - q.angle_to(&p)).abs() <= 1e-15);
            prop_assert!(p.angle_to(&q) <= std::f64::consts::FRAC_PI_2 + 1e-15);
            prop_assert!(p.angle_to(&r) <= p.angle_to(&q) + q.angle_to(&r) + 1e-12);
            prop_assert!(p.angle_to(&p) == 0.0);
        }

        #[test]
        fn product_splits_at_any_cut(len in 2usize..6, cut in 1usize..5, seed in 0u64..1000) {
            prop_assume!(cut < len);
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mats = [Mat2::new(0.5, 0.4, 0.1, 0.1), Mat2::new(0.4, 0.1, 0.2, 0.3)];
            let symbols: Vec<u8> = (0..len).map(|_| rng.gen_range(1..=2)).collect();
            let w = Word::new(symbols).unwrap();
            let u = w.slice(0..cut);
            let v = w.slice(cut..len);
            let whole = word_product(&mats, &w, MatOrder::Forward).unwrap();
            let split = word_product(&mats, &u, MatOrder::Forward).unwrap()
                .mul(&word_product(&mats, &v, MatOrder::Forward).unwrap());
            for (x, y) in whole.to_array().iter().zip(split.to_array().iter()) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }
    }
}
