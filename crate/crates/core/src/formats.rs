//! JSON and CSV file formats.
//!
//! - operator: `{"dim": n, "re": [[..]], "im": [[..]]}`, row-major; `"im"`
//!   may be omitted for real matrices and is omitted on output when all
//!   imaginary parts are zero.
//! - vector: `{"re": [..], "im": [..]}`.
//! - decomposition: `{"dim": n, "components": [{"weight": x, "re": [..], "im": [..]}, ..]}`.
//! - measure: `{"dim": n, "atoms": [{"weight": x, "state": <operator>}, ..]}`.
//!
//! Floats are written in shortest round-trip form and parsed exactly, so a
//! load/store cycle reproduces the bytes of any file this crate wrote.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::decomposition::{Component, Decomposition};
use crate::measure::StatisticalWeightMeasure;
use crate::operator::{make_hermitian, validate_state_operator, HermitianOperator, StateOperator};
use crate::{CMatrix, CVector, Error, Result, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorJson {
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentJson {
    pub weight: f64,
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionJson {
    pub dim: usize,
    pub components: Vec<ComponentJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomJson {
    pub weight: f64,
    pub state: OperatorJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureJson {
    pub dim: usize,
    pub atoms: Vec<AtomJson>,
}

fn parse_err(what: &str, reason: impl std::fmt::Display) -> Error {
    Error::ParseError(format!("{what}: {reason}"))
}

impl OperatorJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let n = m.nrows();
        let re = (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect();
        let im = if m.iter().all(|z| z.im == 0.0) {
            None
        } else {
            Some((0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect())
        };
        OperatorJson { dim: n, re, im }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.dim;
        if n == 0 {
            return Err(parse_err("operator", "dim must be positive"));
        }
        let check = |rows: &Vec<Vec<f64>>, part: &str| -> Result<()> {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(parse_err("operator", format!("\"{part}\" is not {n}x{n}")));
            }
            Ok(())
        };
        check(&self.re, "re")?;
        if let Some(im) = &self.im {
            check(im, "im")?;
        }
        Ok(CMatrix::from_fn(n, n, |i, j| {
            let im = self.im.as_ref().map_or(0.0, |m| m[i][j]);
            C64::new(self.re[i][j], im)
        }))
    }
}

impl VectorJson {
    pub fn from_vector(v: &CVector) -> Self {
        let re = v.iter().map(|z| z.re).collect();
        let im = if v.iter().all(|z| z.im == 0.0) {
            None
        } else {
            Some(v.iter().map(|z| z.im).collect())
        };
        VectorJson { re, im }
    }

    pub fn to_vector(&self) -> Result<CVector> {
        to_vector(&self.re, self.im.as_deref())
    }
}

fn to_vector(re: &[f64], im: Option<&[f64]>) -> Result<CVector> {
    if let Some(im) = im {
        if im.len() != re.len() {
            return Err(parse_err("vector", "\"re\" and \"im\" lengths differ"));
        }
    }
    Ok(CVector::from_fn(re.len(), |i, _| {
        C64::new(re[i], im.map_or(0.0, |m| m[i]))
    }))
}

impl DecompositionJson {
    pub fn from_decomposition(d: &Decomposition) -> Self {
        DecompositionJson {
            dim: d.dim(),
            components: d
                .components()
                .iter()
                .map(|c| ComponentJson {
                    weight: c.weight,
                    re: c.vector.iter().map(|z| z.re).collect(),
                    im: Some(c.vector.iter().map(|z| z.im).collect()),
                })
                .collect(),
        }
    }

    pub fn components(&self) -> Result<Vec<Component>> {
        self.components
            .iter()
            .map(|c| {
                if c.re.len() != self.dim {
                    return Err(parse_err("decomposition", "component length differs from dim"));
                }
                Ok(Component::new(c.weight, to_vector(&c.re, c.im.as_deref())?))
            })
            .collect()
    }

    /// Validated decomposition whose target is its own reconstruction.
    pub fn to_decomposition(&self) -> Result<Decomposition> {
        Decomposition::from_components(self.components()?)
    }
}

impl MeasureJson {
    pub fn from_measure(mu: &StatisticalWeightMeasure) -> Self {
        MeasureJson {
            dim: mu.dim(),
            atoms: mu
                .atoms()
                .iter()
                .map(|a| AtomJson {
                    weight: a.weight,
                    state: OperatorJson::from_matrix(a.state.matrix()),
                })
                .collect(),
        }
    }

    pub fn to_measure(&self) -> Result<StatisticalWeightMeasure> {
        let mut components = Vec::with_capacity(self.atoms.len());
        for atom in &self.atoms {
            if atom.state.dim != self.dim {
                return Err(Error::DimensionMismatch {
                    left: self.dim,
                    right: atom.state.dim,
                });
            }
            components.push((atom.weight, StateOperator::new(atom.state.to_matrix()?)?));
        }
        crate::measure::make_measure(components)
    }
}

pub fn from_json_str<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| parse_err(what, e))
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    from_json_str(&text, &format!("{what} {}", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = fs::File::create(path)
        .map_err(|e| Error::Io(format!("cannot create {}: {e}", path.display())))?;
    f.write_all(text.as_bytes())
        .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_json_string(value))
}

/// Loads an operator file and validates it as Hermitian within `tol`.
pub fn load_hermitian(path: &Path, tol: f64) -> Result<HermitianOperator> {
    let json: OperatorJson = read_json(path, "operator")?;
    make_hermitian(json.to_matrix()?, tol)
}

/// Loads an operator file and validates it as a state operator within `tol`.
pub fn load_state(path: &Path, tol: f64) -> Result<StateOperator> {
    let json: OperatorJson = read_json(path, "operator")?;
    validate_state_operator(json.to_matrix()?, tol)
}

pub fn load_vector(path: &Path) -> Result<CVector> {
    let json: VectorJson = read_json(path, "vector")?;
    json.to_vector()
}

pub fn load_decomposition(path: &Path) -> Result<Decomposition> {
    let json: DecompositionJson = read_json(path, "decomposition")?;
    json.to_decomposition()
}

pub fn load_measure(path: &Path) -> Result<StatisticalWeightMeasure> {
    let json: MeasureJson = read_json(path, "measure")?;
    json.to_measure()
}

/// Locale-independent float with 17 significant digits.
pub fn float17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::park_qubit_example;

    #[test]
    fn real_operator_omits_im() {
        let json = OperatorJson::from_matrix(StateOperator::maximally_mixed(2).matrix());
        let text = serde_json::to_string(&json).unwrap();
        assert_eq!(text, r#"{"dim":2,"re":[[0.5,0.0],[0.0,0.5]]}"#);
        let back: OperatorJson = from_json_str(&text, "operator").unwrap();
        assert_eq!(back, json);
    }

    #[test]
    fn malformed_operator_is_a_parse_error() {
        let err = from_json_str::<OperatorJson>(r#"{"dim":2,"re":[[1]]"#, "operator").unwrap_err();
        assert_eq!(err.kind(), "ParseError");
        let json: OperatorJson = from_json_str(r#"{"dim":2,"re":[[1,0]]}"#, "operator").unwrap();
        assert_eq!(json.to_matrix().unwrap_err().kind(), "ParseError");
    }

    #[test]
    fn decomposition_bytes_round_trip() {
        let ex = park_qubit_example(0.25).unwrap();
        let first = to_json_string(&DecompositionJson::from_decomposition(&ex.alternative));
        let parsed: DecompositionJson = from_json_str(&first, "decomposition").unwrap();
        let d = parsed.to_decomposition().unwrap();
        let second = to_json_string(&DecompositionJson::from_decomposition(&d));
        assert_eq!(first, second);
    }

    #[test]
    fn float17_has_seventeen_digits() {
        assert_eq!(float17(0.25), "2.5000000000000000e-1");
        assert_eq!(float17(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
