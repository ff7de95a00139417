//! Attractor geometry: the planar natural projection, strong-separation
//! checks, point-cloud sampling, box-counting dimension estimates, and
//! CSV/SVG emitters.
//!
//! The attractor of `{f_i(x) = A_i x + t_i}` is covered by the images of a
//! bounding disk `B(c, R)` with `f_i(B)` contained in `B`; depth-`n` words
//! (oldest-first) give points `f_{w_n}(... f_{w_1}(c))` whose distance to
//! the attractor is at most the top singular value of the newest-first
//! matrix product times `R`.

use crate::fit::{linear_fit, max_residual};
use crate::matrix::{check_enumeration_budget, word_count, Mat2, Word};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Word-enumeration cap for cloud generation and separation checks.
pub const CLOUD_BUDGET: u64 = 1 << 20;

/// Planar affine iterated function system.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AffineIfs {
    mats: Vec<Mat2>,
    translations: Vec<[f64; 2]>,
}

impl AffineIfs {
    pub fn new(mats: Vec<Mat2>, translations: Vec<[f64; 2]>) -> Result<AffineIfs> {
        crate::matrix::validate_system(&mats)?;
        if mats.len() != translations.len() {
            return Err(Error::InvalidInput(format!(
                "{} matrices but {} translations",
                mats.len(),
                translations.len()
            )));
        }
        Ok(AffineIfs { mats, translations })
    }

    pub fn mats(&self) -> &[Mat2] {
        &self.mats
    }

    pub fn translations(&self) -> &[[f64; 2]] {
        &self.translations
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    /// `f_i(p)` for a 1-based symbol.
    pub fn apply(&self, symbol: u8, p: [f64; 2]) -> [f64; 2] {
        let i = (symbol - 1) as usize;
        let q = self.mats[i].apply([p[0], p[1]]);
        [
            q[0] + self.translations[i][0],
            q[1] + self.translations[i][1],
        ]
    }

    /// Fixed point `(I - A_i)^{-1} t_i`.
    pub fn fixed_point(&self, symbol: u8) -> Result<[f64; 2]> {
        let i = (symbol - 1) as usize;
        let a = self.mats[i].to_array();
        let m = Mat2::new(1.0 - a[0], -a[1], -a[2], 1.0 - a[3]);
        let inv = m.inverse()?;
        Ok(inv.apply(self.translations[i]))
    }

    /// Largest one-step top singular value.
    pub fn contraction(&self) -> f64 {
        self.mats.iter().fold(0.0, |acc, m| acc.max(m.norm()))
    }

    /// Disk `B(c, R)` with `f_i(B)` inside `B` for every map: `c` is the
    /// centroid of the fixed points and `R = max ||t_i - (I - A_i) c||
    /// / (1 - max ||A_i||)`.
    pub fn bounding_disk(&self) -> Result<([f64; 2], f64)> {
        let n = self.len() as f64;
        let mut c = [0.0, 0.0];
        for s in 1..=self.len() as u8 {
            let p = self.fixed_point(s)?;
            c[0] += p[0] / n;
            c[1] += p[1] / n;
        }
        let mut worst = 0.0f64;
        for (a, t) in self.mats.iter().zip(&self.translations) {
            let ac = a.apply(c);
            let dx = t[0] - (c[0] - ac[0]);
            let dy = t[1] - (c[1] - ac[1]);
            worst = worst.max((dx * dx + dy * dy).sqrt());
        }
        Ok((c, worst / (1.0 - self.contraction())))
    }
}

/// One sampled attractor point with its generating word and error radius.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CloudPoint {
    pub word: Word,
    pub x: f64,
    pub y: f64,
    /// Distance bound to the attractor points of all words extending this
    /// one into the past.
    pub error_radius: f64,
}

/// Depth-`n` attractor sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointCloud {
    pub depth: usize,
    pub points: Vec<CloudPoint>,
    pub center: [f64; 2],
    pub radius: f64,
    /// Largest one-step contraction (for resolution/depth arithmetic).
    pub contraction: f64,
}

impl PointCloud {
    pub fn max_error_radius(&self) -> f64 {
        self.points
            .iter()
            .fold(0.0, |acc, p| acc.max(p.error_radius))
    }
}

/// Point for a single word: the maps applied oldest symbol innermost, with
/// error radius `alpha_1(A_{w_n} ... A_{w_1}) * R`.
pub fn natural_projection_2d(ifs: &AffineIfs, word: &Word) -> Result<([f64; 2], f64)> {
    word.validate(ifs.len())?;
    let (c, r) = ifs.bounding_disk()?;
    let mut p = c;
    let mut prod = Mat2::identity();
    for &s in word.symbols() {
        p = ifs.apply(s, p);
        prod = ifs.mats[(s - 1) as usize].mul(&prod);
    }
    let (a1, _) = prod.singular_values();
    Ok((p, a1 * r))
}

/// All depth-`n` words, enumerated depth-first with incremental points and
/// matrix products.
pub fn generate_cloud(ifs: &AffineIfs, depth: usize) -> Result<PointCloud> {
    check_enumeration_budget(ifs.len(), depth, CLOUD_BUDGET)?;
    let (center, radius) = ifs.bounding_disk()?;
    let mut points = Vec::with_capacity(word_count(ifs.len(), depth) as usize);
    let mut path: Vec<u8> = Vec::with_capacity(depth);
    // Stacks of the point and newest-first product along the current path.
    let mut point_stack = vec![center];
    let mut prod_stack = vec![Mat2::identity()];
    loop {
        if path.len() == depth {
            let p = *point_stack.last().unwrap();
            let (a1, _) = prod_stack.last().unwrap().singular_values();
            points.push(CloudPoint {
                word: Word::new(path.clone())?,
                x: p[0],
                y: p[1],
                error_radius: a1 * radius,
            });
        } else {
            path.push(1);
            let p = *point_stack.last().unwrap();
            point_stack.push(ifs.apply(1, p));
            prod_stack.push(ifs.mats[0].mul(prod_stack.last().unwrap()));
            continue;
        }
        // Advance: increment the deepest symbol that still has successors.
        loop {
            match path.pop() {
                None => {
                    return Ok(PointCloud {
                        depth,
                        points,
                        center,
                        radius,
                        contraction: ifs.contraction(),
                    })
                }
                Some(s) => {
                    point_stack.pop();
                    prod_stack.pop();
                    if (s as usize) < ifs.len() {
                        let next = s + 1;
                        path.push(next);
                        let p = *point_stack.last().unwrap();
                        point_stack.push(ifs.apply(next, p));
                        prod_stack
                            .push(ifs.mats[(next - 1) as usize].mul(prod_stack.last().unwrap()));
                        break;
                    }
                }
            }
        }
    }
}

/// `samples` random depth-`n` words (with repetition) instead of the full
/// enumeration.
pub fn sample_cloud(
    ifs: &AffineIfs,
    depth: usize,
    samples: usize,
    seed: u64,
) -> Result<PointCloud> {
    let (center, radius) = ifs.bounding_disk()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(samples);
    for _ in 0..samples {
        let word = Word::new(
            (0..depth)
                .map(|_| rng.gen_range(1..=ifs.len() as u8))
                .collect(),
        )?;
        let mut p = center;
        let mut prod = Mat2::identity();
        for &s in word.symbols() {
            p = ifs.apply(s, p);
            prod = ifs.mats[(s - 1) as usize].mul(&prod);
        }
        let (a1, _) = prod.singular_values();
        points.push(CloudPoint {
            word,
            x: p[0],
            y: p[1],
            error_radius: a1 * radius,
        });
    }
    Ok(PointCloud {
        depth,
        points,
        center,
        radius,
        contraction: ifs.contraction(),
    })
}

/// Verdict of the strong-separation check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SscVerdict {
    Verified,
    /// Two words with different newest symbols land on the same point.
    Violated {
        pair: (Word, Word),
        distance: f64,
    },
    Undetermined,
}

/// Result of [`check_ssc`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SscReport {
    pub verdict: SscVerdict,
    pub depth: usize,
    /// Smallest distance between cloud points with different newest
    /// symbols.
    pub min_cross_distance: f64,
    /// Smallest certified separation gap across the piece pairs (positive
    /// exactly when verified).
    pub separation_margin: f64,
}

const SSC_DIRECTIONS: usize = 64;

/// Support value of the ellipse `p + M B(0, r)` in direction `u`.
fn ellipse_support(p: [f64; 2], m: &Mat2, r: f64, u: [f64; 2]) -> f64 {
    let mt_u = m.transpose().apply(u);
    p[0] * u[0] + p[1] * u[1] + r * (mt_u[0] * mt_u[0] + mt_u[1] * mt_u[1]).sqrt()
}

/// Checks the strong separation condition at depth `n`.
///
/// The pieces `f_i(attractor)` are covered by the depth-`n` ellipse images
/// of the bounding disk, grouped by newest symbol. A pair of pieces is
/// certified disjoint when some of 64 fixed directions strictly separates
/// the two ellipse families (by support-function comparison); if the hulls
/// overlap, the same test runs on individual cross-family ellipse pairs
/// when the counts allow. Violation is reported only for near-exact point
/// coincidence across pieces; touching pieces stay undetermined.
pub fn check_ssc(ifs: &AffineIfs, depth: usize) -> Result<SscReport> {
    if ifs.len() < 2 {
        return Err(Error::InvalidInput(
            "separation needs at least two maps".into(),
        ));
    }
    if depth == 0 {
        return Err(Error::InvalidInput("separation depth must be >= 1".into()));
    }
    check_enumeration_budget(ifs.len(), depth, CLOUD_BUDGET)?;
    let (_, radius) = ifs.bounding_disk()?;
    let cloud = generate_cloud(ifs, depth)?;
    let n_sym = ifs.len();

    // Newest-first products per word, grouped by newest symbol.
    let mut families: Vec<Vec<(usize, Mat2)>> = vec![Vec::new(); n_sym];
    for (idx, p) in cloud.points.iter().enumerate() {
        let prod = crate::matrix::word_product(&ifs.mats, &p.word, crate::MatOrder::Reversed)?;
        let newest = (p.word.last().unwrap() - 1) as usize;
        families[newest].push((idx, prod));
    }

    let dirs: Vec<[f64; 2]> = (0..SSC_DIRECTIONS)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / SSC_DIRECTIONS as f64;
            [a.cos(), a.sin()]
        })
        .collect();

    // Per-family support tables: max and min support per direction.
    let mut hi = vec![vec![f64::NEG_INFINITY; SSC_DIRECTIONS]; n_sym];
    let mut lo = vec![vec![f64::INFINITY; SSC_DIRECTIONS]; n_sym];
    for (fam, members) in families.iter().enumerate() {
        for &(idx, ref m) in members {
            let p = [cloud.points[idx].x, cloud.points[idx].y];
            for (d, u) in dirs.iter().enumerate() {
                let h = ellipse_support(p, m, radius, *u);
                let l = -ellipse_support(p, m, radius, [-u[0], -u[1]]);
                if h > hi[fam][d] {
                    hi[fam][d] = h;
                }
                if l < lo[fam][d] {
                    lo[fam][d] = l;
                }
            }
        }
    }

    let mut separation_margin = f64::INFINITY;
    for i in 0..n_sym {
        for j in (i + 1)..n_sym {
            let mut gap = f64::NEG_INFINITY;
            for d in 0..SSC_DIRECTIONS {
                gap = gap.max(lo[i][d] - hi[j][d]).max(lo[j][d] - hi[i][d]);
            }
            if gap <= 0.0 && families[i].len() * families[j].len() <= 1 << 18 {
                // The family hulls overlap; try every cross pair.
                let mut pair_min = f64::INFINITY;
                'pairs: for &(ia, ref ma) in &families[i] {
                    for &(ib, ref mb) in &families[j] {
                        let pa = [cloud.points[ia].x, cloud.points[ia].y];
                        let pb = [cloud.points[ib].x, cloud.points[ib].y];
                        let mut best = f64::NEG_INFINITY;
                        for u in &dirs {
                            let s = -ellipse_support(pa, ma, radius, [-u[0], -u[1]])
                                - ellipse_support(pb, mb, radius, *u);
                            best = best.max(s);
                        }
                        pair_min = pair_min.min(best);
                        if pair_min <= 0.0 {
                            break 'pairs;
                        }
                    }
                }
                gap = pair_min;
            }
            separation_margin = separation_margin.min(gap);
        }
    }

    // Closest cross-piece point pair.
    let mut min_cross = f64::INFINITY;
    let mut closest: Option<(usize, usize)> = None;
    for i in 0..cloud.points.len() {
        for j in (i + 1)..cloud.points.len() {
            let (a, b) = (&cloud.points[i], &cloud.points[j]);
            if a.word.last() == b.word.last() {
                continue;
            }
            let d = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt();
            if d < min_cross {
                min_cross = d;
                closest = Some((i, j));
            }
        }
    }

    let verdict = if separation_margin > 0.0 {
        SscVerdict::Verified
    } else if min_cross <= 1e-9 * radius.max(1e-300) {
        let (i, j) = closest.unwrap();
        SscVerdict::Violated {
            pair: (cloud.points[i].word.clone(), cloud.points[j].word.clone()),
            distance: min_cross,
        }
    } else {
        SscVerdict::Undetermined
    };
    Ok(SscReport {
        verdict,
        depth,
        min_cross_distance: min_cross,
        separation_margin,
    })
}

/// Box-counting estimate data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoxDimensionEstimate {
    /// Least-squares slope of `log count` against `log (1/scale)`.
    pub slope: f64,
    pub intercept: f64,
    /// `(scale, count)` per requested scale, coarsest first.
    pub counts: Vec<(f64, u64)>,
    pub max_residual: f64,
}

/// Dyadic scales `radius / 2^k` for `k` in `k_min..=k_max`.
pub fn dyadic_scales(radius: f64, k_min: u32, k_max: u32) -> Vec<f64> {
    (k_min..=k_max)
        .map(|k| radius / f64::powi(2.0, k as i32))
        .collect()
}

/// Counts occupied grid cells per scale (grid anchored at the bounding
/// disk's lower-left corner) and fits the log-log slope.
pub fn box_dimension_estimate(cloud: &PointCloud, scales: &[f64]) -> Result<BoxDimensionEstimate> {
    if scales.is_empty() {
        return Err(Error::InvalidInput("no scales provided".into()));
    }
    let mut scales = scales.to_vec();
    scales.sort_by(|a, b| b.partial_cmp(a).unwrap());
    if scales.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::InvalidInput("scales must be positive".into()));
    }
    let finest = *scales.last().unwrap();
    let err = cloud.max_error_radius();
    if err >= finest {
        // Extra depth needed so the residual error drops below the scale.
        let ratio = cloud.contraction.min(1.0 - 1e-12);
        let extra = ((finest / err).ln() / ratio.ln()).ceil().max(1.0) as usize;
        return Err(Error::InsufficientResolution {
            error_radius: err,
            scale: finest,
            required_depth: cloud.depth + extra,
        });
    }
    let anchor = [
        cloud.center[0] - cloud.radius,
        cloud.center[1] - cloud.radius,
    ];
    let mut counts = Vec::with_capacity(scales.len());
    let mut cells: HashSet<(i64, i64)> = HashSet::new();
    for &scale in &scales {
        cells.clear();
        for p in &cloud.points {
            let cx = ((p.x - anchor[0]) / scale).floor() as i64;
            let cy = ((p.y - anchor[1]) / scale).floor() as i64;
            cells.insert((cx, cy));
        }
        counts.push((scale, cells.len() as u64));
    }
    let data: Vec<(f64, f64)> = counts
        .iter()
        .map(|&(scale, count)| ((1.0 / scale).ln(), (count as f64).ln()))
        .collect();
    let (slope, intercept) = if data.len() == 1 {
        (0.0, data[0].1)
    } else {
        linear_fit(&data)
    };
    Ok(BoxDimensionEstimate {
        slope,
        intercept,
        counts,
        max_residual: max_residual(&data, slope, intercept),
    })
}

/// CSV rows `x,y,word`, one per cloud point.
pub fn cloud_to_csv(cloud: &PointCloud) -> String {
    let mut out = String::with_capacity(cloud.points.len() * 48 + 16);
    out.push_str("x,y,word\n");
    for p in &cloud.points {
        out.push_str(&format!("{},{},{}\n", p.x, p.y, p.word));
    }
    out
}

/// SVG scatter plot on a 1000 x 1000 view box mapped from the bounding
/// disk's enclosing square.
pub fn cloud_to_svg(cloud: &PointCloud) -> String {
    let span = if cloud.radius > 0.0 {
        2.0 * cloud.radius
    } else {
        1.0
    };
    let anchor = [cloud.center[0] - 0.5 * span, cloud.center[1] - 0.5 * span];
    let mut out = String::with_capacity(cloud.points.len() * 48 + 256);
    out.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\">\n\
         <rect width=\"1000\" height=\"1000\" fill=\"white\"/>\n",
    );
    for p in &cloud.points {
        let cx = (p.x - anchor[0]) / span * 1000.0;
        let cy = 1000.0 - (p.y - anchor[1]) / span * 1000.0;
        out.push_str(&format!(
            "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"1\" fill=\"#1f4e79\"/>\n"
        ));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(x: f64, y: f64, tol: f64) {
        assert!(
            (x - y).abs() <= tol,
            "expected {x} close to {y} (tol {tol})"
        );
    }

    fn separated_ifs() -> AffineIfs {
        AffineIfs::new(
            vec![Mat2::diagonal(0.5, 0.25), Mat2::diagonal(0.5, 0.25)],
            vec![[0.0, 0.0], [0.5, 0.75]],
        )
        .unwrap()
    }

    fn cantor_line() -> AffineIfs {
        let third = 1.0 / 3.0;
        AffineIfs::new(
            vec![Mat2::diagonal(third, third), Mat2::diagonal(third, third)],
            vec![[0.0, 0.0], [2.0 / 3.0, 0.0]],
        )
        .unwrap()
    }

    #[test]
    fn fixed_points_and_bounding_disk() {
        let ifs = separated_ifs();
        let p1 = ifs.fixed_point(1).unwrap();
        let p2 = ifs.fixed_point(2).unwrap();
        assert_close(p1[0], 0.0, 1e-15);
        assert_close(p1[1], 0.0, 1e-15);
        assert_close(p2[0], 1.0, 1e-15);
        assert_close(p2[1], 1.0, 1e-15);
        let (c, r) = ifs.bounding_disk().unwrap();
        assert_close(c[0], 0.5, 1e-15);
        assert_close(c[1], 0.5, 1e-15);
        // Images of the disk stay inside it.
        for s in 1..=2u8 {
            let image_center = ifs.apply(s, c);
            let d = ((image_center[0] - c[0]).powi(2) + (image_center[1] - c[1]).powi(2)).sqrt();
            assert!(d + ifs.mats()[(s - 1) as usize].norm() * r <= r + 1e-12);
        }
    }

    #[test]
    fn projection_hits_map_fixed_points() {
        let ifs = separated_ifs();
        let (p, err) = natural_projection_2d(&ifs, &Word::constant(1, 30)).unwrap();
        assert!(p[0].abs() <= err + 1e-12 && p[1].abs() <= err + 1e-12);
        assert!(err <= 0.5f64.powi(30) * 1.0);
        let (q, err2) = natural_projection_2d(&ifs, &Word::constant(2, 30)).unwrap();
        assert!((q[0] - 1.0).abs() <= err2 + 1e-12 && (q[1] - 1.0).abs() <= err2 + 1e-12);
    }

    #[test]
    fn error_radius_contracts_per_symbol() {
        let ifs = separated_ifs();
        let (_, e5) = natural_projection_2d(&ifs, &Word::constant(1, 5)).unwrap();
        let (_, e6) = natural_projection_2d(&ifs, &Word::constant(1, 6)).unwrap();
        assert!(e6 <= ifs.contraction() * e5 + 1e-15);
    }

    #[test]
    fn cloud_enumeration_matches_single_projections() {
        let ifs = separated_ifs();
        let cloud = generate_cloud(&ifs, 4).unwrap();
        assert_eq!(cloud.points.len(), 16);
        for p in &cloud.points {
            let (q, err) = natural_projection_2d(&ifs, &p.word).unwrap();
            assert_close(p.x, q[0], 1e-14);
            assert_close(p.y, q[1], 1e-14);
            assert_close(p.error_radius, err, 1e-14);
            // Inside the bounding disk.
            let d = ((p.x - cloud.center[0]).powi(2) + (p.y - cloud.center[1]).powi(2)).sqrt();
            assert!(d <= cloud.radius + 1e-12);
        }
    }

    #[test]
    fn refinement_stays_within_error_radius() {
        use rand::{Rng, SeedableRng};
        let ifs = separated_ifs();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let word = Word::new((0..8).map(|_| rng.gen_range(1..=2)).collect()).unwrap();
            let (p, err) = natural_projection_2d(&ifs, &word).unwrap();
            // Deepen the past: prepend four symbols at the oldest end.
            let prefix = Word::new((0..4).map(|_| rng.gen_range(1..=2)).collect()).unwrap();
            let refined = prefix.concat(&word);
            let (q, _) = natural_projection_2d(&ifs, &refined).unwrap();
            let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
            assert!(d <= err + 1e-12, "refinement moved {d} > {err}");
        }
    }

    #[test]
    fn ssc_verified_for_separated_system() {
        let report = check_ssc(&separated_ifs(), 2).unwrap();
        assert_eq!(report.verdict, SscVerdict::Verified);
        assert!(report.separation_margin > 0.0);
    }

    #[test]
    fn ssc_violated_for_identical_maps() {
        let ifs = AffineIfs::new(
            vec![Mat2::diagonal(0.5, 0.25); 2],
            vec![[0.1, 0.2], [0.1, 0.2]],
        )
        .unwrap();
        let report = check_ssc(&ifs, 3).unwrap();
        match report.verdict {
            SscVerdict::Violated { distance, .. } => assert!(distance <= 1e-12),
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn ssc_touching_pieces_undetermined() {
        let ifs = AffineIfs::new(
            vec![Mat2::diagonal(0.5, 0.5); 2],
            vec![[0.0, 0.0], [0.5, 0.0]],
        )
        .unwrap();
        let report = check_ssc(&ifs, 6).unwrap();
        assert_eq!(report.verdict, SscVerdict::Undetermined);
        assert!(report.min_cross_distance > 0.0);
    }

    #[test]
    fn box_dimension_of_cantor_line() {
        let ifs = cantor_line();
        let cloud = generate_cloud(&ifs, 14).unwrap();
        let scales = dyadic_scales(cloud.radius, 2, 10);
        let est = box_dimension_estimate(&cloud, &scales).unwrap();
        assert_close(est.slope, 2.0f64.ln() / 3.0f64.ln(), 0.05);
        // Counts grow monotonically as the scale shrinks.
        for pair in est.counts.windows(2) {
            assert!(pair[1].1 >= pair[0].1);
        }
    }

    #[test]
    fn box_dimension_of_single_point() {
        let ifs = AffineIfs::new(vec![Mat2::diagonal(0.3, 0.3)], vec![[0.0, 0.0]]).unwrap();
        let cloud = generate_cloud(&ifs, 10).unwrap();
        let est = box_dimension_estimate(&cloud, &[0.25, 0.125, 0.0625]).unwrap();
        assert_close(est.slope, 0.0, 1e-12);
        assert!(est.counts.iter().all(|&(_, n)| n == 1));
    }

    #[test]
    fn box_dimension_of_filled_square() {
        let half = Mat2::diagonal(0.5, 0.5);
        let ifs = AffineIfs::new(
            vec![half; 4],
            vec![[0.0, 0.0], [0.5, 0.0], [0.0, 0.5], [0.5, 0.5]],
        )
        .unwrap();
        let cloud = sample_cloud(&ifs, 10, 300_000, 5).unwrap();
        let scales: Vec<f64> = (5..=8).map(|k| f64::powi(2.0, -k)).collect();
        let est = box_dimension_estimate(&cloud, &scales).unwrap();
        assert_close(est.slope, 2.0, 0.05);
    }

    #[test]
    fn box_dimension_requires_resolution() {
        let ifs = cantor_line();
        let cloud = generate_cloud(&ifs, 4).unwrap();
        let err = box_dimension_estimate(&cloud, &[1e-6]);
        match err {
            Err(Error::InsufficientResolution { required_depth, .. }) => {
                assert!(required_depth > 4);
                // The suggested depth actually suffices.
                let deeper = generate_cloud(&ifs, required_depth.min(14)).unwrap();
                if required_depth <= 14 {
                    assert!(deeper.max_error_radius() < 1e-6);
                }
            }
            other => panic!("expected resolution error, got {other:?}"),
        }
    }

    #[test]
    fn csv_and_svg_emitters() {
        let ifs = separated_ifs();
        let cloud = generate_cloud(&ifs, 3).unwrap();
        let csv = cloud_to_csv(&cloud);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x,y,word"));
        assert_eq!(csv.lines().count(), 9);
        let first = lines.next().unwrap();
        assert!(first.ends_with(",111"));
        let svg = cloud_to_svg(&cloud);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("viewBox=\"0 0 1000 1000\""));
        assert_eq!(svg.matches("<circle").count(), 8);
        // Deterministic output.
        assert_eq!(svg, cloud_to_svg(&cloud));
    }
}
