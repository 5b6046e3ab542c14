//! Named single- and two-qubit gates.

use std::f64::consts::FRAC_1_SQRT_2;

use super::matrix::{kron, CMatrix, C64, ONE, ZERO};

const I_UNIT: C64 = C64::new(0.0, 1.0);

pub fn identity2() -> CMatrix {
    CMatrix::identity(2)
}

pub fn hadamard() -> CMatrix {
    CMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]]).scale_real(FRAC_1_SQRT_2)
}

/// Phase gate diag(1, i).
pub fn phase_s() -> CMatrix {
    CMatrix::diag(&[ONE, I_UNIT])
}

/// σx, also written N (bit flip).
pub fn pauli_x() -> CMatrix {
    CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_rows(&[&[ZERO, -I_UNIT], &[I_UNIT, ZERO]])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::real_diag(&[1.0, -1.0])
}

/// Controlled-NOT with the first tensor factor as control.
pub fn cnot() -> CMatrix {
    CMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])
}

/// H⊗…⊗H with `k` factors; `k = 0` yields the 1×1 identity.
pub fn hadamard_power(k: usize) -> CMatrix {
    let h = hadamard();
    (0..k).fold(CMatrix::identity(1), |acc, _| kron(&acc, &h))
}
