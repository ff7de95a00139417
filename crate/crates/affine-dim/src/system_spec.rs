//! On-disk system description.
//!
//! A versioned JSON document naming the matrices of a planar affine system,
//! optional translation parts, an optional potential, and per-analysis
//! budgets. Unknown fields are rejected so that a spec file pins down one
//! reproducible computation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::AffineIfs;
use crate::matrix::Mat2;
use crate::splitting::SplittingCertificate;
use crate::thermo::Potential;

/// Default bisection tolerance for the affinity-dimension root.
pub const DEFAULT_ROOT_TOL: f64 = 1e-6;

/// Default convergence tolerance for the transfer-operator power iteration.
pub const DEFAULT_POWER_TOL: f64 = 1e-12;

/// Default point-cloud depth: the largest `d` with `N^d <= 2^16`, clamped
/// to `[4, 14]`.
pub fn default_cloud_depth(n_symbols: usize) -> usize {
    let mut d = 1usize;
    while d < 14 && crate::matrix::word_count(n_symbols, d + 1) <= 1 << 16 {
        d += 1;
    }
    d.max(4)
}

/// Per-analysis enumeration depths. Absent fields fall back to
/// system-size-dependent defaults at use time.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    /// Deepest level of the finite pressure sequence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pressure_depth: Option<usize>,
    /// Cylinder depth `k` of the transfer-operator discretisation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cylinder_depth: Option<usize>,
    /// Word depth of generated point clouds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cloud_depth: Option<usize>,
}

/// Numerical tolerances, with conservative defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Bisection tolerance for pressure roots.
    #[serde(default = "default_root_tol")]
    pub root_tol: f64,
    /// Power-iteration convergence tolerance.
    #[serde(default = "default_power_tol")]
    pub power_iteration_tol: f64,
}

fn default_root_tol() -> f64 {
    DEFAULT_ROOT_TOL
}

fn default_power_tol() -> f64 {
    DEFAULT_POWER_TOL
}

impl Default for Tolerances {
    fn default() -> Tolerances {
        Tolerances {
            root_tol: DEFAULT_ROOT_TOL,
            power_iteration_tol: DEFAULT_POWER_TOL,
        }
    }
}

/// Potential selector. `kind` is one of `"kaenmaki"`, `"bernoulli"`,
/// `"constant"`; exactly the parameters of the chosen kind may be present.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub kind: String,
    /// Singular-value exponent for `kind = "kaenmaki"`. Defaults to the
    /// computed affinity dimension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    /// Probability vector for `kind = "bernoulli"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    /// Value for `kind = "constant"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

/// Parsed and validated system description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpecFile {
    /// Schema version; must be 1.
    pub version: u32,
    /// Row-major `[a, b, c, d]` per matrix.
    pub matrices: Vec<[f64; 4]>,
    /// Translation part per map; required for geometric commands.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translations: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialSpec>,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl SystemSpecFile {
    /// Parses a JSON document and checks every schema invariant.
    pub fn from_json(text: &str) -> Result<SystemSpecFile> {
        let spec: SystemSpecFile =
            serde_json::from_str(text).map_err(|e| Error::SpecFile(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Loads and validates a spec file, prefixing diagnostics with the path.
    pub fn load(path: &Path) -> Result<SystemSpecFile> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::SpecFile(format!("{}: {e}", path.display())))?;
        SystemSpecFile::from_json(&text).map_err(|e| match e {
            Error::SpecFile(msg) => Error::SpecFile(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Schema invariants: version 1, at least one matrix, all matrices
    /// non-singular and contracting, list lengths consistent, potential
    /// parameters matching its kind.
    pub fn validate(&self) -> Result<()> {
        if self.version != 1 {
            return Err(Error::SpecFile(format!(
                "unsupported version {} (expected 1)",
                self.version
            )));
        }
        let mats = self.matrices()?;
        crate::matrix::validate_system(&mats).map_err(|e| Error::SpecFile(e.to_string()))?;
        if let Some(ts) = &self.translations {
            if ts.len() != mats.len() {
                return Err(Error::SpecFile(format!(
                    "{} matrices but {} translations",
                    mats.len(),
                    ts.len()
                )));
            }
        }
        if let Some(p) = &self.potential {
            self.validate_potential(p, mats.len())?;
        }
        if let Some(d) = self.budgets.pressure_depth {
            if d == 0 {
                return Err(Error::SpecFile("pressure_depth must be >= 1".into()));
            }
        }
        if let Some(d) = self.budgets.cylinder_depth {
            if d == 0 {
                return Err(Error::SpecFile("cylinder_depth must be >= 1".into()));
            }
        }
        if let Some(d) = self.budgets.cloud_depth {
            if d == 0 {
                return Err(Error::SpecFile("cloud_depth must be >= 1".into()));
            }
        }
        if !(self.tolerances.root_tol > 0.0) || !(self.tolerances.power_iteration_tol > 0.0) {
            return Err(Error::SpecFile("tolerances must be positive".into()));
        }
        Ok(())
    }

    fn validate_potential(&self, p: &PotentialSpec, n_maps: usize) -> Result<()> {
        let reject = |field: &str| {
            Err(Error::SpecFile(format!(
                "potential kind {:?} does not take {field}",
                p.kind
            )))
        };
        match p.kind.as_str() {
            "kaenmaki" => {
                if p.weights.is_some() {
                    return reject("weights");
                }
                if p.value.is_some() {
                    return reject("value");
                }
                if let Some(s) = p.s {
                    if !(0.0..2.0).contains(&s) {
                        return Err(Error::SpecFile(format!(
                            "potential s must lie in [0, 2), got {s}"
                        )));
                    }
                }
            }
            "bernoulli" => {
                if p.s.is_some() {
                    return reject("s");
                }
                if p.value.is_some() {
                    return reject("value");
                }
                let weights = p
                    .weights
                    .as_ref()
                    .ok_or_else(|| Error::SpecFile("bernoulli potential needs weights".into()))?;
                if weights.len() != n_maps {
                    return Err(Error::SpecFile(format!(
                        "{} weights for {} maps",
                        weights.len(),
                        n_maps
                    )));
                }
                Potential::bernoulli(weights.clone())
                    .map_err(|e| Error::SpecFile(e.to_string()))?;
            }
            "constant" => {
                if p.s.is_some() {
                    return reject("s");
                }
                if p.weights.is_some() {
                    return reject("weights");
                }
                if p.value.is_none() {
                    return Err(Error::SpecFile("constant potential needs value".into()));
                }
            }
            other => {
                return Err(Error::SpecFile(format!(
                    "unknown potential kind {other:?} (expected kaenmaki, bernoulli, or constant)"
                )));
            }
        }
        Ok(())
    }

    /// The linear parts as matrices.
    pub fn matrices(&self) -> Result<Vec<Mat2>> {
        if self.matrices.is_empty() {
            return Err(Error::SpecFile("matrices must be non-empty".into()));
        }
        Ok(self.matrices.iter().map(|r| Mat2::from_array(*r)).collect())
    }

    /// The full affine system, when translations are present.
    pub fn ifs(&self) -> Result<Option<AffineIfs>> {
        match &self.translations {
            None => Ok(None),
            Some(ts) => {
                let ifs = AffineIfs::new(self.matrices()?, ts.clone())?;
                Ok(Some(ifs))
            }
        }
    }

    /// Builds the configured potential, defaulting to the singular-value
    /// potential at exponent `s0`.
    pub fn build_potential(
        &self,
        mats: &[Mat2],
        cert: &SplittingCertificate,
        s0: f64,
    ) -> Result<Potential> {
        match &self.potential {
            None => Potential::kaenmaki(mats, cert, s0),
            Some(p) => match p.kind.as_str() {
                "kaenmaki" => Potential::kaenmaki(mats, cert, p.s.unwrap_or(s0)),
                "bernoulli" => Potential::bernoulli(p.weights.clone().unwrap_or_default()),
                "constant" => Ok(Potential::Constant {
                    value: p.value.unwrap_or(0.0),
                }),
                other => Err(Error::SpecFile(format!("unknown potential kind {other:?}"))),
            },
        }
    }

    pub fn pressure_depth(&self) -> usize {
        self.budgets
            .pressure_depth
            .unwrap_or_else(|| crate::pressure::default_pressure_depth(self.matrices.len()))
    }

    pub fn cylinder_depth(&self) -> usize {
        self.budgets
            .cylinder_depth
            .unwrap_or_else(|| crate::thermo::default_cylinder_depth(self.matrices.len()))
    }

    pub fn cloud_depth(&self) -> usize {
        self.budgets
            .cloud_depth
            .unwrap_or_else(|| default_cloud_depth(self.matrices.len()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> String {
        r#"{
            "version": 1,
            "matrices": [[0.5, 0.0, 0.0, 0.25], [0.5, 0.0, 0.0, 0.25]]
        }"#
        .to_string()
    }

    #[test]
    fn parses_minimal_spec_with_defaults() {
        let spec = SystemSpecFile::from_json(&minimal()).unwrap();
        assert_eq!(spec.version, 1);
        assert_eq!(spec.matrices.len(), 2);
        assert!(spec.translations.is_none());
        assert_eq!(spec.tolerances.root_tol, DEFAULT_ROOT_TOL);
        assert_eq!(spec.pressure_depth(), 12);
        assert_eq!(spec.cylinder_depth(), 6);
        assert_eq!(spec.cloud_depth(), 14);
    }

    #[test]
    fn rejects_unknown_fields() {
        let text = r#"{
            "version": 1,
            "matrices": [[0.5, 0.0, 0.0, 0.25]],
            "matrcies": []
        }"#;
        let err = SystemSpecFile::from_json(text).unwrap_err();
        assert!(matches!(err, Error::SpecFile(_)));
        assert!(err.to_string().contains("matrcies"), "{err}");
    }

    #[test]
    fn rejects_wrong_version() {
        let text = minimal().replace("\"version\": 1", "\"version\": 2");
        let err = SystemSpecFile::from_json(&text).unwrap_err();
        assert!(err.to_string().contains("version"), "{err}");
    }

    #[test]
    fn rejects_non_contracting_matrix() {
        let text = r#"{
            "version": 1,
            "matrices": [[1.5, 0.0, 0.0, 0.25]]
        }"#;
        let err = SystemSpecFile::from_json(text).unwrap_err();
        assert!(matches!(err, Error::SpecFile(_)), "{err}");
    }

    #[test]
    fn rejects_singular_matrix() {
        let text = r#"{
            "version": 1,
            "matrices": [[0.5, 0.5, 0.5, 0.5]]
        }"#;
        let err = SystemSpecFile::from_json(text).unwrap_err();
        assert!(matches!(err, Error::SpecFile(_)), "{err}");
    }

    #[test]
    fn rejects_translation_count_mismatch() {
        let text = r#"{
            "version": 1,
            "matrices": [[0.5, 0.0, 0.0, 0.25], [0.5, 0.0, 0.0, 0.25]],
            "translations": [[0.0, 0.0]]
        }"#;
        let err = SystemSpecFile::from_json(text).unwrap_err();
        assert!(err.to_string().contains("translations"), "{err}");
    }

    #[test]
    fn rejects_mismatched_potential_parameters() {
        let text = r#"{
            "version": 1,
            "matrices": [[0.5, 0.0, 0.0, 0.25], [0.5, 0.0, 0.0, 0.25]],
            "potential": {"kind": "bernoulli", "weights": [0.3, 0.7], "value": 1.0}
        }"#;
        let err = SystemSpecFile::from_json(text).unwrap_err();
        assert!(err.to_string().contains("value"), "{err}");

        let text = r#"{
            "version": 1,
            "matrices": [[0.5, 0.0, 0.0, 0.25], [0.5, 0.0, 0.0, 0.25]],
            "potential": {"kind": "bernoulli", "weights": [0.3, 0.3]}
        }"#;
        let err = SystemSpecFile::from_json(text).unwrap_err();
        assert!(err.to_string().contains("sum to 1"), "{err}");

        let text = r#"{
            "version": 1,
            "matrices": [[0.5, 0.0, 0.0, 0.25], [0.5, 0.0, 0.0, 0.25]],
            "potential": {"kind": "gibbs"}
        }"#;
        let err = SystemSpecFile::from_json(text).unwrap_err();
        assert!(err.to_string().contains("unknown potential kind"), "{err}");
    }

    #[test]
    fn json_error_carries_line_and_column() {
        let text = "{\n  \"version\": 1,\n  \"matrices\": [[0.5]]\n}";
        let err = SystemSpecFile::from_json(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line") && msg.contains("column"), "{msg}");
    }

    #[test]
    fn ifs_round_trip() {
        let text = r#"{
            "version": 1,
            "matrices": [[0.5, 0.0, 0.0, 0.25], [0.5, 0.0, 0.0, 0.25]],
            "translations": [[0.0, 0.0], [0.5, 0.75]]
        }"#;
        let spec = SystemSpecFile::from_json(text).unwrap();
        let ifs = spec.ifs().unwrap().unwrap();
        assert_eq!(ifs.len(), 2);
        assert_eq!(ifs.translations()[1], [0.5, 0.75]);
    }

    #[test]
    fn budget_overrides_win() {
        let text = r#"{
            "version": 1,
            "matrices": [[0.5, 0.0, 0.0, 0.25], [0.5, 0.0, 0.0, 0.25]],
            "budgets": {"pressure_depth": 6, "cylinder_depth": 4, "cloud_depth": 9},
            "tolerances": {"root_tol": 1e-8}
        }"#;
        let spec = SystemSpecFile::from_json(text).unwrap();
        assert_eq!(spec.pressure_depth(), 6);
        assert_eq!(spec.cylinder_depth(), 4);
        assert_eq!(spec.cloud_depth(), 9);
        assert_eq!(spec.tolerances.root_tol, 1e-8);
        assert_eq!(spec.tolerances.power_iteration_tol, DEFAULT_POWER_TOL);
    }
}
