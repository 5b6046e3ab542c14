//! Gate and measurement tables, including user sidecar files.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::linalg::exchange::MatrixDoc;
use crate::linalg::{gates, is_unitary, CMatrix, LinalgError};

/// Largest `k` for the generated `Hk` gate family.
pub const MAX_HADAMARD_POWER: usize = 8;

/// Name of the computational-basis measurement, available at any arity.
pub const STANDARD_MEASUREMENT: &str = "std";

#[derive(Debug, Error)]
pub enum TableError {
    #[error("gate `{name}` is not unitary (‖U†U − I‖ = {defect:.3e})")]
    NotUnitary { name: String, defect: f64 },
    #[error("measurement `{name}` is incomplete (‖Σ M†M − I‖ = {defect:.3e})")]
    Incomplete { name: String, defect: f64 },
    #[error("measurement `{name}` has operators of differing shapes")]
    RaggedMeasurement { name: String },
    #[error("`{0}` is a built-in name and cannot be redefined")]
    Reserved(String),
    #[error("sidecar matrix `{name}`: {source}")]
    Matrix { name: String, source: LinalgError },
    #[error("sidecar: {0}")]
    Format(String),
}

/// Named unitaries.
#[derive(Debug, Clone, Default)]
pub struct GateTable {
    user: BTreeMap<String, CMatrix>,
}

fn builtin_gate(name: &str) -> Option<CMatrix> {
    Some(match name {
        "I" => CMatrix::identity(2),
        "H" => gates::hadamard(),
        "X" | "N" => gates::pauli_x(),
        "Y" => gates::pauli_y(),
        "Z" => gates::pauli_z(),
        "S" => gates::phase_s(),
        "CNOT" => gates::cnot(),
        _ => {
            let k: usize = name.strip_prefix('H')?.parse().ok()?;
            if k == 0 || k > MAX_HADAMARD_POWER {
                return None;
            }
            gates::hadamard_power(k)
        }
    })
}

impl GateTable {
    /// Built-in gates only: I, H, X (= N), Y, Z, S, CNOT and `Hk` = H^⊗k.
    pub fn builtin() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<Cow<'_, CMatrix>> {
        if let Some(m) = self.user.get(name) {
            return Some(Cow::Borrowed(m));
        }
        builtin_gate(name).map(Cow::Owned)
    }

    /// Registers a user gate after checking unitarity at `tol`.
    pub fn insert(&mut self, name: &str, u: CMatrix, tol: f64) -> Result<(), TableError> {
        if builtin_gate(name).is_some() {
            return Err(TableError::Reserved(name.to_string()));
        }
        let unitary = is_unitary(&u, tol).map_err(|source| TableError::Matrix {
            name: name.to_string(),
            source,
        })?;
        if !unitary {
            let defect = u.dagger().matmul(&u).max_diff(&CMatrix::identity(u.rows()));
            return Err(TableError::NotUnitary {
                name: name.to_string(),
                defect,
            });
        }
        self.user.insert(name.to_string(), u);
        Ok(())
    }

    pub fn user_names(&self) -> impl Iterator<Item = &str> {
        self.user.keys().map(String::as_str)
    }
}

/// Named measurements `{M_m}`.
#[derive(Debug, Clone, Default)]
pub struct MeasTable {
    user: BTreeMap<String, Vec<CMatrix>>,
}

impl MeasTable {
    pub fn builtin() -> Self {
        Self::default()
    }

    /// Measurement operators for `name` acting on a space of dimension `dim`,
    /// or `None` if unknown or of the wrong dimension.
    pub fn get(&self, name: &str, dim: usize) -> Option<Cow<'_, [CMatrix]>> {
        if name == STANDARD_MEASUREMENT {
            return Some(Cow::Owned(
                (0..dim).map(|m| CMatrix::basis_projector(dim, m)).collect(),
            ));
        }
        let ops = self.user.get(name)?;
        (ops[0].rows() == dim).then_some(Cow::Borrowed(ops.as_slice()))
    }

    pub fn contains(&self, name: &str) -> bool {
        name == STANDARD_MEASUREMENT || self.user.contains_key(name)
    }

    /// Dimension a user measurement acts on (`None` for `std`, which adapts).
    pub fn fixed_dim(&self, name: &str) -> Option<usize> {
        self.user.get(name).map(|ops| ops[0].rows())
    }

    /// Outcome count of `name` on a space of dimension `dim`.
    pub fn outcomes(&self, name: &str, dim: usize) -> Option<usize> {
        if name == STANDARD_MEASUREMENT {
            return Some(dim);
        }
        self.user.get(name).map(Vec::len)
    }

    /// Registers a measurement after checking `Σ M†M = I` at `tol`.
    pub fn insert(&mut self, name: &str, ops: Vec<CMatrix>, tol: f64) -> Result<(), TableError> {
        if name == STANDARD_MEASUREMENT {
            return Err(TableError::Reserved(name.to_string()));
        }
        let Some(first) = ops.first() else {
            return Err(TableError::RaggedMeasurement {
                name: name.to_string(),
            });
        };
        let shape = first.shape();
        if shape.0 != shape.1 || ops.iter().any(|m| m.shape() != shape) {
            return Err(TableError::RaggedMeasurement {
                name: name.to_string(),
            });
        }
        let mut sum = CMatrix::zeros(shape.0, shape.0);
        for m in &ops {
            sum = &sum + &m.dagger().matmul(m);
        }
        let defect = sum.max_diff(&CMatrix::identity(shape.0));
        if defect > tol {
            return Err(TableError::Incomplete {
                name: name.to_string(),
                defect,
            });
        }
        self.user.insert(name.to_string(), ops);
        Ok(())
    }

    pub fn user_names(&self) -> impl Iterator<Item = &str> {
        self.user.keys().map(String::as_str)
    }
}

/// Gate and measurement tables passed explicitly to every consumer.
#[derive(Debug, Clone, Default)]
pub struct Tables {
    pub gates: GateTable,
    pub meas: MeasTable,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SidecarDoc {
    #[serde(default)]
    gates: BTreeMap<String, MatrixDoc>,
    #[serde(default)]
    measurements: BTreeMap<String, Vec<MatrixDoc>>,
}

impl Tables {
    pub fn builtin() -> Self {
        Self::default()
    }

    /// Loads a sidecar document:
    /// `{"gates": {"Uf": <matrix>}, "measurements": {"M": [<matrix>, …]}}`.
    pub fn load_sidecar_str(&mut self, text: &str, tol: f64) -> Result<(), TableError> {
        let doc: SidecarDoc =
            serde_json::from_str(text).map_err(|e| TableError::Format(e.to_string()))?;
        for (name, m) in doc.gates {
            let u = m.to_matrix().map_err(|source| TableError::Matrix {
                name: name.clone(),
                source,
            })?;
            self.gates.insert(&name, u, tol)?;
        }
        for (name, ms) in doc.measurements {
            let ops = ms
                .iter()
                .map(MatrixDoc::to_matrix)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|source| TableError::Matrix {
                    name: name.clone(),
                    source,
                })?;
            self.meas.insert(&name, ops, tol)?;
        }
        Ok(())
    }

    pub fn load_sidecar(&mut self, path: impl AsRef<Path>, tol: f64) -> Result<(), TableError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| TableError::Format(format!("{}: {e}", path.display())))?;
        self.load_sidecar_str(&text, tol)
    }

    /// Serializes the user-defined entries in sidecar form.
    pub fn sidecar_string(&self) -> String {
        let gates: BTreeMap<&str, MatrixDoc> = self
            .gates
            .user
            .iter()
            .map(|(k, v)| (k.as_str(), MatrixDoc::from_matrix(v)))
            .collect();
        let measurements: BTreeMap<&str, Vec<MatrixDoc>> = self
            .meas
            .user
            .iter()
            .map(|(k, v)| (k.as_str(), v.iter().map(MatrixDoc::from_matrix).collect()))
            .collect();
        serde_json::json!({ "gates": gates, "measurements": measurements }).to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_unitary() {
        let t = GateTable::builtin();
        for name in ["I", "H", "X", "N", "Y", "Z", "S", "CNOT", "H2", "H3"] {
            let u = t.get(name).unwrap();
            assert!(is_unitary(&u, 1e-12).unwrap(), "{name}");
        }
        assert!(t.get("H0").is_none());
        assert!(t.get("nope").is_none());
    }

    #[test]
    fn std_measurement_is_complete() {
        let m = MeasTable::builtin();
        for dim in [2, 3, 4] {
            let ops = m.get("std", dim).unwrap();
            let mut sum = CMatrix::zeros(dim, dim);
            for op in ops.iter() {
                sum = &sum + &op.dagger().matmul(op);
            }
            assert!(sum.max_diff(&CMatrix::identity(dim)) <= 1e-12);
        }
    }

    #[test]
    fn sidecar_validation() {
        let mut t = Tables::builtin();
        t.load_sidecar_str(
            r#"{"gates": {"Flip": {"dim": [2,2], "re": [[0,1],[1,0]]}},
                "measurements": {"M": [{"dim":[2,2],"re":[[1,0],[0,0]]},{"dim":[2,2],"re":[[0,0],[0,1]]}]}}"#,
            1e-9,
        )
        .unwrap();
        assert!(t.gates.get("Flip").is_some());
        assert_eq!(t.meas.outcomes("M", 2), Some(2));

        let bad = r#"{"gates": {"Half": {"dim": [1,1], "re": [[0.5]]}}}"#;
        assert!(matches!(
            Tables::builtin().load_sidecar_str(bad, 1e-9),
            Err(TableError::NotUnitary { .. })
        ));
        let incomplete = r#"{"measurements": {"M": [{"dim":[2,2],"re":[[1,0],[0,0]]}]}}"#;
        assert!(matches!(
            Tables::builtin().load_sidecar_str(incomplete, 1e-9),
            Err(TableError::Incomplete { .. })
        ));
        let reserved = r#"{"gates": {"H": {"dim": [1,1], "re": [[1]]}}}"#;
        assert!(matches!(
            Tables::builtin().load_sidecar_str(reserved, 1e-9),
            Err(TableError::Reserved(_))
        ));
    }
}
