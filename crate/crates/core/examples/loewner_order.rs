//! Löwner order checks, eigendecomposition, and Kraus maps on raw matrices.

use qhl::linalg::{eigh, gates, kron, loewner_gap, random_density, random_predicate, CMatrix, KrausMap};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = random_predicate(4, 3)?;
    let e = eigh(p.mat(), 1e-9)?;
    println!("random predicate spectrum: {:?}", e.values.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>());

    let gap = loewner_gap(p.mat(), &CMatrix::identity(4), 1e-9)?;
    println!("P <= I: {} (min eigenvalue of I - P = {:.4})", gap.is_psd(), gap.min_eigenvalue);
    let gap = loewner_gap(&CMatrix::identity(4), p.mat(), 1e-9)?;
    println!("I <= P: {} (min eigenvalue of P - I = {:.4})", gap.is_psd(), gap.min_eigenvalue);

    // Conjugation preserves the order: A <= B implies U A U† <= U B U†.
    let u = kron(&gates::hadamard(), &gates::pauli_x());
    let a = p.mat().scale_real(0.5);
    let gap = loewner_gap(&u.sandwich(&a), &u.sandwich(p.mat()), 1e-9)?;
    println!("conjugated order holds: {}", gap.is_psd());

    // Computational-basis measurement keeps only the diagonal.
    let meas = KrausMap::new(vec![CMatrix::basis_projector(2, 0), CMatrix::basis_projector(2, 1)])?;
    let rho = random_density(2, 11)?;
    let out = meas.apply_mat(rho.mat());
    println!("off-diagonal before {:.4}, after {:.1e}", rho.mat()[(0, 1)].norm(), out[(0, 1)].norm());
    Ok(())
}
