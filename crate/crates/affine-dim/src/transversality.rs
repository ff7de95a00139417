//! The induced interval maps of a sign-definite system, their natural
//! projection, and transversality certificates for translation families.
//!
//! A sign-definite matrix `A` acts on directions in the closed positive
//! quadrant; in barycentric coordinates `x <-> span(x, 1-x)` the transpose
//! action reads
//!
//! ```text
//! S(x, A) = (|a| x + |c| (1-x)) / ((|a|+|b|) x + (|c|+|d|) (1-x))
//! ```
//!
//! which maps `[0, 1]` into itself with derivative `det A / D(x)^2` for a
//! linear denominator `D`. The right fold `S_{w_1}(S_{w_2}(... S_{w_n}(1/2)))`
//! converges to a natural projection `Pi` whose value encodes the
//! strong-stable direction: `(Pi - 1, Pi)` spans it, after the quarter-turn
//! identification between quadrant and anti-quadrant directions.
//!
//! Replacing `A_i` by `A_i + t_i B_i` with
//! `B_i = [[a_i + b_i, -(a_i + b_i)], [c_i + d_i, -(c_i + d_i)]]` translates
//! the interval map exactly: `S(x, A_i + t_i B_i) = S(x, A_i) + t_i`. When
//! every map contracts by less than one half, separations of projection
//! points move transversally in the parameter box.

use crate::dimension::classify_matrix;
use crate::matrix::{Mat2, ProjPoint, Word};
use crate::splitting::{strong_stable_direction, SplittingCertificate};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

fn ensure_sign_definite(a: &Mat2, index: usize) -> Result<()> {
    if a.is_sign_definite() {
        Ok(())
    } else {
        Err(Error::SignIndefinite { index })
    }
}

/// Induced map on `[0, 1]`.
pub fn s_map(a: &Mat2, x: f64) -> Result<f64> {
    ensure_sign_definite(a, 0)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidInput(format!(
            "interval map argument must lie in [0, 1], got {x}"
        )));
    }
    let [aa, ab, ac, ad] = a.to_array().map(f64::abs);
    let num = aa * x + ac * (1.0 - x);
    let den = (aa + ab) * x + (ac + ad) * (1.0 - x);
    Ok(num / den)
}

/// Derivative of the induced map: `det A / D(x)^2` with
/// `D(x) = (|a|+|b|) x + (|c|+|d|) (1-x)`.
pub fn s_map_derivative(a: &Mat2, x: f64) -> Result<f64> {
    ensure_sign_definite(a, 0)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidInput(format!(
            "interval map argument must lie in [0, 1], got {x}"
        )));
    }
    let [aa, ab, ac, ad] = a.to_array().map(f64::abs);
    let den = (aa + ab) * x + (ac + ad) * (1.0 - x);
    Ok(a.det() / (den * den))
}

/// `(inf, sup)` of `|S'(., A)|` over `[0, 1]`: the denominator is linear,
/// so the extrema sit at the endpoints and equal `|det A| / ||A||_inf^2`
/// and `|det A| / (min abs row sum)^2`.
pub fn s_map_derivative_bounds(a: &Mat2) -> Result<(f64, f64)> {
    ensure_sign_definite(a, 0)?;
    let det = a.det().abs();
    let floor = a.min_abs_row_sum();
    let ceil = a.max_abs_row_sum();
    Ok((det / (ceil * ceil), det / (floor * floor)))
}

/// A sign-definite system viewed through its induced interval maps.
#[derive(Debug, Clone)]
pub struct IntervalMapSystem {
    mats: Vec<Mat2>,
    /// Per-map `(inf, sup)` of `|S'|`.
    pub derivative_bounds: Vec<(f64, f64)>,
}

impl IntervalMapSystem {
    pub fn new(mats: &[Mat2]) -> Result<IntervalMapSystem> {
        crate::matrix::validate_system(mats)?;
        let mut derivative_bounds = Vec::with_capacity(mats.len());
        for (index, a) in mats.iter().enumerate() {
            ensure_sign_definite(a, index)?;
            derivative_bounds.push(s_map_derivative_bounds(a)?);
        }
        Ok(IntervalMapSystem {
            mats: mats.to_vec(),
            derivative_bounds,
        })
    }

    pub fn mats(&self) -> &[Mat2] {
        &self.mats
    }

    pub fn apply(&self, symbol: u8, x: f64) -> Result<f64> {
        let a = self
            .mats
            .get((symbol - 1) as usize)
            .ok_or(Error::SymbolOutOfRange {
                symbol,
                n_symbols: self.mats.len(),
            })?;
        s_map(a, x)
    }

    /// `max_i sup_x |S'(x, A_i)|`.
    pub fn sup_contraction(&self) -> f64 {
        self.derivative_bounds
            .iter()
            .fold(0.0, |acc, &(_, sup)| acc.max(sup))
    }
}

/// Finite-depth natural projection value with its tail error.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProjectionValue {
    pub value: f64,
    /// `prod_j sup |S'_{w_j}|`: the diameter of the image of `[0, 1]`
    /// under the composed maps, hence a bound on the seed dependence.
    pub error_bound: f64,
}

/// Right fold `S_{w_1}(S_{w_2}(... S_{w_n}(seed)))` approximating the
/// natural projection of the infinite words extending `word`.
pub fn natural_projection_1d(
    system: &IntervalMapSystem,
    word: &Word,
    seed: f64,
) -> Result<ProjectionValue> {
    word.validate(system.mats.len())?;
    if word.len() == 0 {
        return Err(Error::EmptyWord);
    }
    if system.sup_contraction() >= 1.0 {
        return Err(Error::NonContracting {
            index: 0,
            norm: system.sup_contraction(),
        });
    }
    let mut x = seed.clamp(0.0, 1.0);
    let mut error_bound = 1.0;
    for k in (0..word.len()).rev() {
        let symbol = word.symbols()[k];
        x = system.apply(symbol, x)?;
        error_bound *= system.derivative_bounds[(symbol - 1) as usize].1;
    }
    Ok(ProjectionValue {
        value: x,
        error_bound,
    })
}

/// The rank-one perturbation direction whose translation action on the
/// induced map is exact: `[[a+b, -(a+b)], [c+d, -(c+d)]]`.
pub fn perturbation_matrix(a: &Mat2) -> Mat2 {
    let [ea, eb, ec, ed] = a.to_array();
    Mat2::new(ea + eb, -(ea + eb), ec + ed, -(ec + ed))
}

/// A perturbed system `{A_i + t_i B_i}` together with a flag recording
/// whether every perturbed matrix stayed in the base class.
#[derive(Debug, Clone)]
pub struct PerturbedFamily {
    pub mats: Vec<Mat2>,
    pub ts: Vec<f64>,
    /// False when some perturbed matrix left the sign-definite
    /// small-determinant class; the family is then outside the certified
    /// parameter box.
    pub in_base_class: bool,
}

/// Applies the per-map translations `t_i`.
pub fn perturbation_family(mats: &[Mat2], ts: &[f64]) -> Result<PerturbedFamily> {
    if mats.len() != ts.len() {
        return Err(Error::InvalidInput(format!(
            "{} matrices but {} parameters",
            mats.len(),
            ts.len()
        )));
    }
    for (index, a) in mats.iter().enumerate() {
        ensure_sign_definite(a, index)?;
    }
    let perturbed: Vec<Mat2> = mats
        .iter()
        .zip(ts)
        .map(|(a, &t)| a.add(&perturbation_matrix(a).scale(t)))
        .collect();
    let in_base_class = perturbed
        .iter()
        .enumerate()
        .all(|(i, a)| classify_matrix(a, i).in_base_class);
    Ok(PerturbedFamily {
        mats: perturbed,
        ts: ts.to_vec(),
        in_base_class,
    })
}

/// Angle agreement between the cone-iterated strong-stable directions and
/// the span of `(Pi - 1, Pi)` from the interval maps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EssPiCrossCheck {
    pub max_angle: f64,
    /// Certificate error at depth `n` plus twice the worst projection
    /// error (the direction map `x -> span(x-1, x)` is 2-Lipschitz on the
    /// relevant range).
    pub bound: f64,
    pub depth: usize,
    pub words_checked: usize,
    pub passed: bool,
}

/// Samples depth-`n` words, extends each into a fixed infinite word by a
/// tail of 1s, and measures how far both depth-`n` approximations of its
/// strong-stable direction (cone iteration and interval-map projection)
/// sit from a much deeper reference of the same direction.
pub fn ess_vs_pi_crosscheck(
    mats: &[Mat2],
    cert: &SplittingCertificate,
    n: usize,
    samples: usize,
    rng_seed: u64,
) -> Result<EssPiCrossCheck> {
    let system = IntervalMapSystem::new(mats)?;
    let n_sym = mats.len();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut max_angle = 0.0f64;
    let mut max_pi_error = 0.0f64;
    let tail = 30usize;
    for _ in 0..samples {
        let word = Word::new((0..n).map(|_| rng.gen_range(1..=n_sym as u8)).collect())?;
        let mut extended_symbols = word.symbols().to_vec();
        extended_symbols.extend(std::iter::repeat(1).take(tail));
        let extended = Word::new(extended_symbols)?;
        let (reference, _) = strong_stable_direction(mats, &extended, n + tail, cert)?;
        let (ess, _) = strong_stable_direction(mats, &word, n, cert)?;
        let pi = natural_projection_1d(&system, &word, 0.5)?;
        let from_pi = ProjPoint::from_vector(pi.value - 1.0, pi.value)?;
        max_angle = max_angle
            .max(ess.angle_to(&from_pi))
            .max(ess.angle_to(&reference))
            .max(from_pi.angle_to(&reference));
        max_pi_error = max_pi_error.max(pi.error_bound);
    }
    let bound = cert.error_bound(n) + 2.0 * max_pi_error;
    Ok(EssPiCrossCheck {
        max_angle,
        bound,
        depth: n,
        words_checked: samples,
        passed: max_angle <= bound,
    })
}

/// Transversality certificate for the translation family of a system.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransversalityCertificate {
    pub certified: bool,
    /// Half-width of the certified parameter box `(-delta, delta)^N`.
    pub delta: f64,
    /// `max_i sup_x |S'(x, A_i)|`; certification needs `< 1/2`.
    pub contraction: f64,
    /// Guaranteed separation speed `1 - c/(1-c)` for `c = contraction`.
    pub derivative_lower_bound: f64,
    /// Smallest finite-difference separation derivative observed across
    /// the sampled word pairs; `None` when the contraction test already
    /// failed.
    pub min_observed_derivative: Option<f64>,
    pub pairs_checked: usize,
}

/// Separation of the two projection points when the first symbols' maps
/// are translated in opposite directions at half speed.
fn separation_at(mats: &[Mat2], wi: &Word, wj: &Word, u: f64) -> Result<f64> {
    let i0 = wi.first().ok_or(Error::EmptyWord)?;
    let j0 = wj.first().ok_or(Error::EmptyWord)?;
    let ts: Vec<f64> = (0..mats.len())
        .map(|k| {
            if k == (i0 - 1) as usize {
                u / 2.0
            } else if k == (j0 - 1) as usize {
                -u / 2.0
            } else {
                0.0
            }
        })
        .collect();
    let family = perturbation_family(mats, &ts)?;
    let system = IntervalMapSystem::new(&family.mats)?;
    let pi = natural_projection_1d(&system, wi, 0.5)?.value;
    let pj = natural_projection_1d(&system, wj, 0.5)?.value;
    Ok(pi - pj)
}

/// Certifies transversality of the translation family `{A_i + t_i B_i}`.
///
/// Certification requires `c = max_i sup |S'_i| < 1/2`; then any two
/// projection points with distinct first symbols separate at speed at
/// least `1 - c/(1-c) > 0` under the antisymmetric translation of their
/// first-symbol maps (the later occurrences of the two symbols contribute
/// at most the geometric tail `c/(1-c)` in total per word). The bound is
/// verified by central finite differences on random word pairs, and
/// `delta` is the largest box half-width keeping every corner matrix
/// `A_i +- delta B_i` in the base class, found by bisection.
pub fn certify_translation_transversality(
    mats: &[Mat2],
    pair_samples: usize,
    rng_seed: u64,
) -> Result<TransversalityCertificate> {
    let system = IntervalMapSystem::new(mats)?;
    let c = system.sup_contraction();
    let derivative_lower_bound = 1.0 - c / (1.0 - c);
    if c >= 0.5 {
        return Ok(TransversalityCertificate {
            certified: false,
            delta: 0.0,
            contraction: c,
            derivative_lower_bound,
            min_observed_derivative: None,
            pairs_checked: 0,
        });
    }

    // Largest delta with every corner A_i +- delta B_i in the base class.
    // Membership is monotone in delta: the determinant and the row sums of
    // a perturbed matrix are constant on the sign-preserving range, so the
    // binding constraint is an entry reaching zero.
    let corners_ok = |delta: f64| {
        mats.iter().enumerate().all(|(i, a)| {
            let b = perturbation_matrix(a);
            classify_matrix(&a.add(&b.scale(delta)), i).in_base_class
                && classify_matrix(&a.add(&b.scale(-delta)), i).in_base_class
        })
    };
    let mut delta = 0.0;
    if corners_ok(0.0) {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        if corners_ok(hi) {
            delta = hi;
        } else {
            for _ in 0..20 {
                let mid = 0.5 * (lo + hi);
                if corners_ok(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            delta = lo;
        }
    }

    // Finite-difference verification of the separation speed on random
    // word pairs with distinct first symbols.
    let n_sym = mats.len();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut min_observed = f64::INFINITY;
    let mut checked = 0;
    let eps = 1e-6;
    if n_sym >= 2 {
        while checked < pair_samples {
            let len = rng.gen_range(4..=16);
            let mut wi: Vec<u8> = (0..len).map(|_| rng.gen_range(1..=n_sym as u8)).collect();
            let mut wj: Vec<u8> = (0..len).map(|_| rng.gen_range(1..=n_sym as u8)).collect();
            if wi[0] == wj[0] {
                wj[0] = wi[0] % n_sym as u8 + 1;
            }
            // Orient so the perturbation pushes the pair apart.
            let (wi, wj) = (
                Word::new(std::mem::take(&mut wi))?,
                Word::new(std::mem::take(&mut wj))?,
            );
            let fd = (separation_at(mats, &wi, &wj, eps)? - separation_at(mats, &wi, &wj, -eps)?)
                / (2.0 * eps);
            min_observed = min_observed.min(fd);
            checked += 1;
        }
    }
    let fd_ok = n_sym < 2 || min_observed >= derivative_lower_bound - 1e-6;
    Ok(TransversalityCertificate {
        certified: delta > 0.0 && fd_ok,
        delta,
        contraction: c,
        derivative_lower_bound,
        min_observed_derivative: if n_sym >= 2 { Some(min_observed) } else { None },
        pairs_checked: checked,
    })
}
