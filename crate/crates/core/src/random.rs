//! Seeded generation of random unitaries, Hamiltonians, and states.
//!
//! Random unitaries come from orthonormalizing a complex Gaussian matrix,
//! which is Haar-like and more than uniform enough for the property sweeps
//! here. Every caller passes an explicit seed so sweeps are reproducible.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, SubsystemLayout};
use crate::state::QuantumState;

/// The RNG used throughout; constructed from an explicit seed only.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Complex Gaussian (Ginibre) matrix.
pub fn random_gaussian_matrix(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |_, _| gaussian_complex(rng))
}

/// Random Hermitian matrix, `(G + G^dag)/2` with Gaussian G.
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = random_gaussian_matrix(dim, rng);
    (&g + &g.adjoint()).scale_re(0.5)
}

/// Haar-like random unitary: modified Gram-Schmidt on a Gaussian matrix.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    loop {
        let g = random_gaussian_matrix(dim, rng);
        if let Some(q) = orthonormalize_columns(&g) {
            return q;
        }
        // Numerically dependent columns: essentially never, but retry.
    }
}

#[allow(clippy::needless_range_loop)] // indexes two columns of the same Vec
fn orthonormalize_columns(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = m.rows();
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| m.get(i, j)).collect())
        .collect();
    for j in 0..n {
        for k in 0..j {
            let proj: Complex64 = (0..n).map(|i| cols[k][i].conj() * cols[j][i]).sum();
            for i in 0..n {
                let d = proj * cols[k][i];
                cols[j][i] -= d;
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return None;
        }
        for z in &mut cols[j] {
            *z /= norm;
        }
    }
    Some(ComplexMatrix::from_fn(n, n, |i, j| cols[j][i]))
}

/// Random normalized complex amplitude vector.
pub fn random_amplitudes(dim: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Random density matrix from the Hilbert-Schmidt (Ginibre) ensemble.
pub fn random_density(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = random_gaussian_matrix(dim, rng);
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    rho.scale_re(1.0 / tr)
}

/// Random pure state on the given layout.
pub fn random_pure_state(layout: &SubsystemLayout, rng: &mut impl Rng) -> QuantumState {
    QuantumState::pure(random_amplitudes(layout.total_dim(), rng), layout.clone())
        .expect("random amplitudes are normalized")
}

/// Random mixed state on the given layout.
pub fn random_mixed_state(layout: &SubsystemLayout, rng: &mut impl Rng) -> QuantumState {
    QuantumState::mixed(random_density(layout.total_dim(), rng), layout.clone())
        .expect("Ginibre densities are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = seeded_rng(11);
        for dim in [2, 4, 8] {
            let u = random_unitary(dim, &mut rng);
            assert!(u.unitarity_error() < 1e-12, "dim {dim}");
        }
    }

    #[test]
    fn random_density_is_valid() {
        let mut rng = seeded_rng(12);
        let rho = random_density(6, &mut rng);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        assert!(rho.hermiticity_error() < 1e-14);
        let vals = crate::linalg::hermitian_eigenvalues(&rho).unwrap();
        assert!(vals.iter().all(|&v| v > -1e-12));
    }

    #[test]
    fn same_seed_same_stream() {
        let a = random_amplitudes(8, &mut seeded_rng(99));
        let b = random_amplitudes(8, &mut seeded_rng(99));
        assert_eq!(a, b);
    }
}
