//! JSON scenario files.
//!
//! Complex numbers serialize as two-element arrays `[re, im]` everywhere.
//! The projector can be given either as an explicit matrix or as a list of
//! computational basis indices; an optional Hermitian observable rides along
//! for weak-value reports.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "psi": [[0.8660254037844386, 0.0], [0.5, 0.0]],
//!   "phi": [[0.8660254037844386, 0.0], [-0.5, 0.0]],
//!   "pi": [1],
//!   "sigma": 10.0,
//!   "observable": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]]
//! }
//! ```

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{Operator, State};
use crate::pointer::Scenario;

/// Projector specification: basis indices or an explicit matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProjectorSpec {
    Basis(Vec<usize>),
    Matrix(Vec<Vec<[f64; 2]>>),
}

/// On-disk scenario description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub dimension: usize,
    pub psi: Vec<[f64; 2]>,
    pub phi: Vec<[f64; 2]>,
    pub pi: ProjectorSpec,
    pub sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<Vec<Vec<[f64; 2]>>>,
}

pub(crate) fn to_complex(pair: [f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

pub(crate) fn from_complex(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn parse_matrix(rows: &[Vec<[f64; 2]>], dimension: usize) -> Result<Operator> {
    if rows.len() != dimension || rows.iter().any(|r| r.len() != dimension) {
        return Err(Error::InvalidInput(format!(
            "matrix must be {dimension} x {dimension}"
        )));
    }
    Operator::from_rows(
        rows.iter()
            .map(|r| r.iter().copied().map(to_complex).collect())
            .collect(),
    )
}

impl ScenarioFile {
    pub fn from_json_str(text: &str) -> Result<ScenarioFile> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("scenario file: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<ScenarioFile> {
        let text = std::fs::read_to_string(path)?;
        ScenarioFile::from_json_str(&text)
    }

    /// Validates and builds the runtime scenario plus the optional
    /// observable. `sigma_override` substitutes the file's pointer width.
    pub fn to_scenario(&self, sigma_override: Option<f64>) -> Result<(Scenario, Option<Operator>)> {
        let d = self.dimension;
        if self.psi.len() != d || self.phi.len() != d {
            return Err(Error::InvalidInput(format!(
                "state length does not match dimension {d}"
            )));
        }
        let psi = State::new(self.psi.iter().copied().map(to_complex).collect())?;
        let phi = State::new(self.phi.iter().copied().map(to_complex).collect())?;
        let pi = match &self.pi {
            ProjectorSpec::Basis(indices) => Operator::basis_projector(d, indices)?,
            ProjectorSpec::Matrix(rows) => parse_matrix(rows, d)?,
        };
        let observable = match &self.observable {
            Some(rows) => {
                let a = parse_matrix(rows, d)?;
                if !a.is_hermitian() {
                    return Err(Error::NotHermitian {
                        deviation: a.hermitian_deviation(),
                    });
                }
                Some(a)
            }
            None => None,
        };
        let sigma = sigma_override.unwrap_or(self.sigma);
        Ok((Scenario::new(psi, phi, pi, sigma)?, observable))
    }
}

/// Serializes an operator as nested `[re, im]` rows.
pub fn operator_to_rows(op: &Operator) -> Vec<Vec<[f64; 2]>> {
    (0..op.dim())
        .map(|i| (0..op.dim()).map(|j| from_complex(op.get(i, j))).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const ZW2: &str = r#"{
        "dimension": 2,
        "psi": [[0.8660254037844386, 0.0], [0.5, 0.0]],
        "phi": [[0.8660254037844386, 0.0], [-0.5, 0.0]],
        "pi": [1],
        "sigma": 10.0
    }"#;

    #[test]
    fn parses_basis_projector_scenario() {
        let file = ScenarioFile::from_json_str(ZW2).unwrap();
        let (scenario, observable) = file.to_scenario(None).unwrap();
        assert!(observable.is_none());
        assert_eq!(scenario.dim(), 2);
        assert!((scenario.p_phi() - 0.25).abs() < 1e-12);
        assert!((scenario.pi_weak_value().re + 0.5).abs() < 1e-12);
    }

    #[test]
    fn sigma_override_takes_effect() {
        let file = ScenarioFile::from_json_str(ZW2).unwrap();
        let (scenario, _) = file.to_scenario(Some(2.5)).unwrap();
        assert_eq!(scenario.sigma(), 2.5);
    }

    #[test]
    fn parses_matrix_projector_and_observable() {
        let text = r#"{
            "dimension": 2,
            "psi": [[0.8660254037844386, 0.0], [0.5, 0.0]],
            "phi": [[0.8660254037844386, 0.0], [-0.5, 0.0]],
            "pi": [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],
            "sigma": 10.0,
            "observable": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]]
        }"#;
        let file = ScenarioFile::from_json_str(text).unwrap();
        let (scenario, observable) = file.to_scenario(None).unwrap();
        let z = observable.unwrap();
        assert!((z.get(0, 0).re - 1.0).abs() < 1e-15);
        assert!((scenario.pi_weak_value().re + 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(ScenarioFile::from_json_str("{").is_err());

        // Unnormalized state.
        let bad_norm = ZW2.replace("0.8660254037844386", "0.9");
        let file = ScenarioFile::from_json_str(&bad_norm).unwrap();
        assert!(matches!(
            file.to_scenario(None),
            Err(Error::NotNormalized { .. })
        ));

        // Non-projector matrix.
        let text = r#"{
            "dimension": 2,
            "psi": [[1.0, 0.0], [0.0, 0.0]],
            "phi": [[1.0, 0.0], [0.0, 0.0]],
            "pi": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]],
            "sigma": 1.0
        }"#;
        let file = ScenarioFile::from_json_str(text).unwrap();
        assert!(matches!(
            file.to_scenario(None),
            Err(Error::NotProjector { .. })
        ));

        // Nonpositive sigma.
        let bad_sigma = ZW2.replace("10.0", "-1.0");
        let file = ScenarioFile::from_json_str(&bad_sigma).unwrap();
        assert!(matches!(
            file.to_scenario(None),
            Err(Error::InvalidSigma(_))
        ));

        // Non-Hermitian observable.
        let text = r#"{
            "dimension": 2,
            "psi": [[1.0, 0.0], [0.0, 0.0]],
            "phi": [[1.0, 0.0], [0.0, 0.0]],
            "pi": [0],
            "sigma": 1.0,
            "observable": [[[0.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]
        }"#;
        let file = ScenarioFile::from_json_str(text).unwrap();
        assert!(matches!(
            file.to_scenario(None),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn scenario_file_round_trips_through_json() {
        let file = ScenarioFile::from_json_str(ZW2).unwrap();
        let text = serde_json::to_string(&file).unwrap();
        let again = ScenarioFile::from_json_str(&text).unwrap();
        let (a, _) = file.to_scenario(None).unwrap();
        let (b, _) = again.to_scenario(None).unwrap();
        assert_eq!(a.p_phi(), b.p_phi());
        assert_eq!(a.sigma(), b.sigma());
    }
}
