//! Text exchange format for matrices:
//!
//! ```json
//! {"dim": [2, 2], "re": [[1, 0], [0, 0]], "im": [[0, 0], [0, 0]]}
//! ```
//!
//! `im` may be omitted for real matrices. Non-finite values are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::matrix::{CMatrix, C64};
use super::LinalgError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub dim: [usize; 2],
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let (r, c) = m.shape();
        let re = (0..r).map(|i| (0..c).map(|j| clean(m[(i, j)].re)).collect()).collect();
        let has_im = m.data().iter().any(|z| z.im != 0.0);
        let im = has_im.then(|| (0..r).map(|i| (0..c).map(|j| clean(m[(i, j)].im)).collect()).collect());
        MatrixDoc { dim: [r, c], re, im }
    }

    pub fn to_matrix(&self) -> Result<CMatrix, LinalgError> {
        let [rows, cols] = self.dim;
        check_shape("re", &self.re, rows, cols)?;
        if let Some(im) = &self.im {
            check_shape("im", im, rows, cols)?;
        }
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let re = self.re[i][j];
                let im = self.im.as_ref().map_or(0.0, |m| m[i][j]);
                data.push(C64::new(re, im));
            }
        }
        CMatrix::from_vec(rows, cols, data)
    }
}

// Normalizes -0.0 so that output is byte-stable.
fn clean(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

fn check_shape(field: &str, rows_data: &[Vec<f64>], rows: usize, cols: usize) -> Result<(), LinalgError> {
    if rows_data.len() != rows || rows_data.iter().any(|r| r.len() != cols) {
        return Err(LinalgError::Format(format!(
            "field `{field}` does not match dim [{rows}, {cols}]"
        )));
    }
    Ok(())
}

pub fn parse_matrix(text: &str) -> Result<CMatrix, LinalgError> {
    let doc: MatrixDoc =
        serde_json::from_str(text).map_err(|e| LinalgError::Format(e.to_string()))?;
    doc.to_matrix()
}

pub fn matrix_to_string(m: &CMatrix) -> String {
    serde_json::to_string(&MatrixDoc::from_matrix(m)).expect("matrix serialization")
}

pub fn read_matrix_file(path: impl AsRef<Path>) -> Result<CMatrix, LinalgError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| LinalgError::Format(format!("{}: {e}", path.display())))?;
    parse_matrix(&text).map_err(|e| match e {
        LinalgError::Format(msg) => LinalgError::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_matrix_file(path: impl AsRef<Path>, m: &CMatrix) -> std::io::Result<()> {
    let mut text = matrix_to_string(m);
    text.push('\n');
    std::fs::write(path, text)
}
