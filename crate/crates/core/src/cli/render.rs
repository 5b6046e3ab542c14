//! Human-readable rendering helpers.

use crate::linalg::CMatrix;

/// Entries below this magnitude print as zero.
pub const ZERO_THRESHOLD: f64 = 1e-12;

fn fixed(x: f64) -> String {
    if x.abs() < ZERO_THRESHOLD {
        "0".to_string()
    } else {
        let s = format!("{x:.6}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    }
}

fn entry(re: f64, im: f64, complex: bool) -> String {
    if !complex || im.abs() < ZERO_THRESHOLD {
        return fixed(re);
    }
    if re.abs() < ZERO_THRESHOLD {
        return format!("{}i", fixed(im));
    }
    let sign = if im < 0.0 { '-' } else { '+' };
    format!("{}{sign}{}i", fixed(re), fixed(im.abs()))
}

/// Right-aligned columns, one matrix row per line, each line indented by
/// `indent` spaces.
pub fn matrix(m: &CMatrix, indent: usize) -> String {
    let complex = m.data().iter().any(|z| z.im.abs() >= ZERO_THRESHOLD);
    let cells: Vec<Vec<String>> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| entry(m[(i, j)].re, m[(i, j)].im, complex)).collect())
        .collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    let pad = " ".repeat(indent);
    let mut out = String::new();
    for row in cells {
        out.push_str(&pad);
        out.push('[');
        let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        out.push_str(&line.join("  "));
        out.push_str("]\n");
    }
    out
}

/// Compact scientific form for residuals and gaps.
pub fn sci(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:.3e}")
    }
}
