//! Assembled machine-readable reports.
//!
//! [`build_full_report`] runs the whole pipeline on one system: affinity
//! dimension, matrix classes, dominated splitting, Gibbs thermodynamics,
//! dimension formulas, and (when translations are present) separation and
//! box counting. Every numeric field travels with an error or tolerance
//! companion. Stages that cannot run on the given system are reported as
//! absent sections with a warning instead of failing the whole report.

use serde::{Deserialize, Serialize};

use crate::dimension::{
    classify_system, combined_condition_lower_bound, ess_dimension, ledrappier_young_dimension,
    lyapunov_dimension, slice_condition, ClassReport, SliceCondition,
};
use crate::error::Result;
use crate::geometry::{
    check_ssc, dyadic_scales, generate_cloud, BoxDimensionEstimate, SscReport, SscVerdict,
};
use crate::matrix::Mat2;
use crate::pressure::{affinity_dimension, AffinityDimension};
use crate::splitting::{find_backward_invariant_multicone, SplittingCertificate};
use crate::system_spec::SystemSpecFile;
use crate::thermo::{
    entropy, entropy_shannon_gap, gibbs_constant_check, gibbs_measure, lyapunov_exponents,
    plus_side_measure, quasi_bernoulli_check, TransferOperator,
};

/// Iteration cap for the transfer-operator power iteration.
const POWER_ITERATION_CAP: u64 = 100_000;

/// Dominated-splitting stage: either a certificate or the reason none was
/// found.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplittingSection {
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<SplittingCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// Thermodynamic quantities of one Gibbs measure at cylinder depth `k`.
///
/// `pressure` and `entropy` are per-symbol log units; `entropy_gap` is the
/// distance of the depth-`k` Shannon rate from the Gibbs entropy, and the
/// crosscheck gaps compare each Lyapunov exponent against the depth-`k`
/// singular values of cylinder products.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThermoReport {
    pub potential: String,
    pub cylinder_depth: usize,
    pub power_iteration_tol: f64,
    pub pressure: f64,
    pub entropy: f64,
    pub shannon_entropy: f64,
    pub entropy_gap: f64,
    pub chi_s: f64,
    pub chi_ss: f64,
    pub chi_s_crosscheck_gap: f64,
    pub chi_ss_crosscheck_gap: f64,
    pub gibbs_c: f64,
    pub gibbs_depth_checked: usize,
    pub quasi_bernoulli_c: f64,
    pub quasi_bernoulli_max_len: usize,
    pub total_mass_defect: f64,
    pub marginal_defect: f64,
}

/// Dimension values derived from the measured entropy and exponents.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DimensionNumbers {
    /// Affinity dimension (root of the deepest finite pressure).
    pub s0: f64,
    /// Depth-to-depth movement of that root.
    pub s0_error_bound: f64,
    /// `min(h/chi_s, 1 + (h - chi_s)/chi_ss)`.
    pub lyapunov_dim: f64,
    /// Entropy/exponent formula with the transversal dimension below.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ly_dim: Option<f64>,
    /// Transversal dimension fed into `ly_dim` (the strong-stable
    /// pushforward value).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ly_dim_transverse_input: Option<f64>,
    /// `min(1, h/(chi_ss - chi_s))`; absent when the exponents carry no
    /// usable gap.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ess_pushforward_dim: Option<f64>,
    /// The strong-stable pushforward value is only an a.e. candidate here;
    /// no per-parameter transversality certificate accompanies it.
    pub ess_upper_bound_only: bool,
    /// `|lyapunov_dim - s0|`, reported when the potential is the
    /// singular-value potential at `s0` (where equality is expected).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kaenmaki_gap: Option<f64>,
}

/// Hypothesis flags: matrix classes, the slice condition, and the combined
/// lower bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionsSection {
    pub classes: ClassReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slice: Option<SliceCondition>,
    /// `-3 + (2 + 1/(1-r)) s0 + 2r` for `r = chi_s/chi_ss`, when `r < 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain_lower_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain_chi_ratio: Option<f64>,
    pub notes: Vec<String>,
}

/// Separation and box-counting results for the planar attractor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometrySection {
    pub ssc: SscReport,
    pub cloud_depth: usize,
    pub cloud_points: usize,
    pub cloud_max_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub box_count: Option<BoxDimensionEstimate>,
}

/// Everything the dimension command reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FullReport {
    pub version: u32,
    pub seed: u64,
    pub affinity: AffinityDimension,
    pub splitting: SplittingSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thermo: Option<ThermoReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dimensions: Option<DimensionNumbers>,
    pub conditions: ConditionsSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySection>,
    /// Whether the equal-dimensions chain (measure, Hausdorff, box) is
    /// applicable: requires a splitting certificate and verified
    /// separation.
    pub dimension_chain_applicable: bool,
    pub warnings: Vec<String>,
}

/// Knobs shared by the report-producing commands.
#[derive(Debug, Clone, Default)]
pub struct ReportOptions {
    pub seed: u64,
    /// Use the relaxed large-dimension threshold 3/2 instead of 5/3.
    pub relaxed: bool,
    /// Overrides the spec's pressure depth.
    pub depth: Option<usize>,
    /// Overrides the spec's root tolerance.
    pub tol: Option<f64>,
}

fn thermo_stage(
    spec: &SystemSpecFile,
    mats: &[Mat2],
    cert: &SplittingCertificate,
    s0: f64,
    seed: u64,
) -> Result<(ThermoReport, f64, f64, f64)> {
    let k = spec.cylinder_depth();
    let power_tol = spec.tolerances.power_iteration_tol;
    let potential = spec.build_potential(mats, cert, s0)?;
    let op = TransferOperator::build(mats.len(), &potential, k)?;
    let (measure, pressure) = gibbs_measure(&op, power_tol, POWER_ITERATION_CAP)?;
    let h = entropy(&measure);
    let (shannon, entropy_gap) = entropy_shannon_gap(&measure);
    let exponents = lyapunov_exponents(mats, &measure, cert)?;
    let gibbs = gibbs_constant_check(&measure, &potential, k + 2, seed)?;
    let plus = plus_side_measure(&measure);
    let qb_max_len = (2 * k).max(3);
    let qb = quasi_bernoulli_check(&plus, qb_max_len, seed)?;
    let report = ThermoReport {
        potential: format!("{potential:?}"),
        cylinder_depth: k,
        power_iteration_tol: power_tol,
        pressure,
        entropy: h,
        shannon_entropy: shannon,
        entropy_gap,
        chi_s: exponents.chi_s,
        chi_ss: exponents.chi_ss,
        chi_s_crosscheck_gap: exponents.crosscheck_gap_s,
        chi_ss_crosscheck_gap: exponents.crosscheck_gap_ss,
        gibbs_c: gibbs.c,
        gibbs_depth_checked: gibbs.test_depth,
        quasi_bernoulli_c: qb.c,
        quasi_bernoulli_max_len: qb.max_word_len,
        total_mass_defect: (measure.total_mass() - 1.0).abs(),
        marginal_defect: measure.marginal_consistency_defect(),
    };
    Ok((report, h, exponents.chi_s, exponents.chi_ss))
}

fn dimension_stage(
    spec: &SystemSpecFile,
    affinity: &AffinityDimension,
    h: f64,
    chi_s: f64,
    chi_ss: f64,
    warnings: &mut Vec<String>,
) -> Result<DimensionNumbers> {
    let lyap = lyapunov_dimension(h, chi_s, chi_ss)?;
    let ess = match ess_dimension(h, chi_s, chi_ss) {
        Ok(v) => Some(v),
        Err(e) => {
            warnings.push(format!(
                "strong-stable pushforward dimension unavailable: {e}"
            ));
            None
        }
    };
    let ly = match ess {
        Some(dim_t) => Some(ledrappier_young_dimension(h, chi_s, chi_ss, dim_t)?),
        None => None,
    };
    let kaenmaki_at_s0 = match &spec.potential {
        None => true,
        Some(p) => p.kind == "kaenmaki" && p.s.is_none(),
    };
    Ok(DimensionNumbers {
        s0: affinity.s0,
        s0_error_bound: affinity.error_bound,
        lyapunov_dim: lyap,
        ly_dim: ly,
        ly_dim_transverse_input: ess,
        ess_pushforward_dim: ess,
        ess_upper_bound_only: true,
        kaenmaki_gap: kaenmaki_at_s0.then(|| (lyap - affinity.s0).abs()),
    })
}

fn geometry_stage(
    spec: &SystemSpecFile,
    warnings: &mut Vec<String>,
) -> Result<Option<GeometrySection>> {
    let Some(ifs) = spec.ifs()? else {
        return Ok(None);
    };
    let depth = spec.cloud_depth();
    let ssc = check_ssc(&ifs, depth)?;
    let cloud = generate_cloud(&ifs, depth)?;
    let max_err = cloud.max_error_radius();
    let radius = cloud.radius;
    let mut k_max = 2u32;
    while k_max < 20 && radius / f64::powi(2.0, k_max as i32 + 1) > 4.0 * max_err {
        k_max += 1;
    }
    let box_count = if k_max < 4 {
        warnings.push(format!(
            "cloud error radius {max_err:.3e} leaves too few usable box scales; \
             increase cloud_depth for a box-dimension estimate"
        ));
        None
    } else {
        let scales = dyadic_scales(radius, 2, k_max);
        match crate::geometry::box_dimension_estimate(&cloud, &scales) {
            Ok(est) => Some(est),
            Err(e) => {
                warnings.push(format!("box-dimension estimate skipped: {e}"));
                None
            }
        }
    };
    Ok(Some(GeometrySection {
        ssc,
        cloud_depth: depth,
        cloud_points: cloud.points.len(),
        cloud_max_error: max_err,
        box_count,
    }))
}

/// Runs every stage of the pipeline on one spec.
///
/// Hard errors (invalid system, budget overruns) propagate; a missing
/// splitting certificate or an unusable box-count setup degrade to absent
/// sections plus a warning.
pub fn build_full_report(spec: &SystemSpecFile, opts: &ReportOptions) -> Result<FullReport> {
    let mats = spec.matrices()?;
    let mut warnings = Vec::new();

    let pressure_depth = opts.depth.unwrap_or_else(|| spec.pressure_depth());
    let root_tol = opts.tol.unwrap_or(spec.tolerances.root_tol);
    let affinity = affinity_dimension(&mats, pressure_depth, root_tol)?;

    let classes = classify_system(&mats, affinity.s0, opts.relaxed)?;

    let (splitting, cert) = match find_backward_invariant_multicone(&mats) {
        Ok(cert) => (
            SplittingSection {
                certified: true,
                certificate: Some(cert.clone()),
                reason: None,
            },
            Some(cert),
        ),
        Err(e) => {
            warnings.push(
                "no dominated-splitting certificate; thermodynamic and dimension sections omitted"
                    .into(),
            );
            (
                SplittingSection {
                    certified: false,
                    certificate: None,
                    reason: Some(e.to_string()),
                },
                None,
            )
        }
    };

    let mut thermo = None;
    let mut dimensions = None;
    let mut slice = None;
    let mut chain_lower_bound = None;
    let mut chain_chi_ratio = None;
    if let Some(cert) = &cert {
        let (report, h, chi_s, chi_ss) = thermo_stage(spec, &mats, cert, affinity.s0, opts.seed)?;
        dimensions = Some(dimension_stage(
            spec,
            &affinity,
            h,
            chi_s,
            chi_ss,
            &mut warnings,
        )?);
        match slice_condition(h, chi_s, chi_ss) {
            Ok(s) => slice = Some(s),
            Err(e) => warnings.push(format!("slice condition not evaluable: {e}")),
        }
        let ratio = chi_s / chi_ss;
        chain_lower_bound = combined_condition_lower_bound(affinity.s0, ratio);
        chain_chi_ratio = Some(ratio);
        thermo = Some(report);
    }

    let geometry = geometry_stage(spec, &mut warnings)?;
    if let Some(g) = &geometry {
        if g.ssc.verdict == SscVerdict::Verified && affinity.s0 > 2.0 - 1e-9 {
            warnings.push(format!(
                "verified separation should force the affinity dimension below 2, \
                 but the computed root is {:.9}",
                affinity.s0
            ));
        }
    }

    let ssc_verified = geometry
        .as_ref()
        .map(|g| g.ssc.verdict == SscVerdict::Verified)
        .unwrap_or(false);
    let dimension_chain_applicable = splitting.certified && ssc_verified;

    let notes = vec![
        "the slice condition's dimension floor is taken to be min(1, entropy/chi_s), \
         the capped Lyapunov value"
            .into(),
        "the strong-stable pushforward dimension is the almost-everywhere candidate \
         min(1, entropy/(chi_ss - chi_s)); certifying it for a specific translation \
         family is the transversality command's job"
            .into(),
    ];

    Ok(FullReport {
        version: 1,
        seed: opts.seed,
        affinity,
        splitting,
        thermo,
        dimensions,
        conditions: ConditionsSection {
            classes,
            slice,
            chain_lower_bound,
            chain_chi_ratio,
            notes,
        },
        geometry,
        dimension_chain_applicable,
        warnings,
    })
}

/// Transversality-command report: interval-map data, parameter box, and
/// the direction cross-check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransversalityReport {
    pub version: u32,
    pub seed: u64,
    pub classes: ClassReport,
    /// Per-map `(inf, sup)` of the projected derivative `|S'|`.
    pub derivative_bounds: Vec<(f64, f64)>,
    pub certificate: crate::transversality::TransversalityCertificate,
    pub cross_check: crate::transversality::EssPiCrossCheck,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system_spec::SystemSpecFile;

    fn separated_spec() -> SystemSpecFile {
        SystemSpecFile::from_json(
            r#"{
                "version": 1,
                "matrices": [[0.5, 0.0, 0.0, 0.25], [0.5, 0.0, 0.0, 0.25]],
                "translations": [[0.0, 0.0], [0.5, 0.75]],
                "budgets": {"pressure_depth": 8, "cylinder_depth": 5, "cloud_depth": 10}
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn full_report_on_separated_diagonal_system() {
        let spec = separated_spec();
        let report = build_full_report(&spec, &ReportOptions::default()).unwrap();
        assert!((report.affinity.s0 - 1.0).abs() < 1e-6);
        assert!(report.splitting.certified);
        let thermo = report.thermo.as_ref().unwrap();
        assert!((thermo.pressure).abs() < 1e-6);
        assert!(thermo.chi_s <= thermo.chi_ss);
        let dims = report.dimensions.as_ref().unwrap();
        assert!(dims.kaenmaki_gap.unwrap() < 1e-2);
        let geometry = report.geometry.as_ref().unwrap();
        assert_eq!(geometry.ssc.verdict, SscVerdict::Verified);
        assert!(report.dimension_chain_applicable);
    }

    #[test]
    fn report_without_translations_skips_geometry() {
        let spec = SystemSpecFile::from_json(
            r#"{
                "version": 1,
                "matrices": [[0.5, 0.0, 0.0, 0.25], [0.5, 0.0, 0.0, 0.25]],
                "budgets": {"pressure_depth": 6, "cylinder_depth": 4}
            }"#,
        )
        .unwrap();
        let report = build_full_report(&spec, &ReportOptions::default()).unwrap();
        assert!(report.geometry.is_none());
        assert!(!report.dimension_chain_applicable);
    }

    #[test]
    fn rotation_system_degrades_to_affinity_only() {
        let spec = SystemSpecFile::from_json(
            r#"{
                "version": 1,
                "matrices": [[0.0, -0.5, 0.5, 0.0], [0.0, -0.5, 0.5, 0.0]],
                "budgets": {"pressure_depth": 6}
            }"#,
        )
        .unwrap();
        let report = build_full_report(&spec, &ReportOptions::default()).unwrap();
        assert!(!report.splitting.certified);
        assert!(report.splitting.reason.is_some());
        assert!(report.thermo.is_none());
        assert!(report.dimensions.is_none());
        assert!(!report.warnings.is_empty());
    }

    #[test]
    fn report_serializes_deterministically() {
        let spec = separated_spec();
        let opts = ReportOptions {
            seed: 7,
            ..Default::default()
        };
        let a = serde_json::to_string_pretty(&build_full_report(&spec, &opts).unwrap()).unwrap();
        let b = serde_json::to_string_pretty(&build_full_report(&spec, &opts).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
