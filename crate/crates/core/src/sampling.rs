//! Seeded random generators for the randomized suites.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hypercomplex::HermitianForm;
use crate::quaternion::{QuatMatrix, Quaternion};

pub type LabRng = ChaCha8Rng;

pub fn rng(seed: u64) -> LabRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(normal(rng), normal(rng))
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// `B B^*` with `B` a `2n x rank` complex gaussian matrix.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> HermitianForm {
    let b = random_complex(rng, 2 * n, rank);
    HermitianForm::from_matrix_symmetrized(n, &(&b * b.adjoint()))
}

/// PSD with a random rank in `0..=2n`, so degenerate forms are exercised too.
pub fn random_psd_any_rank<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianForm {
    let rank = rng.random_range(0..=2 * n);
    random_psd(rng, n, rank)
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianForm {
    let b = random_complex(rng, 2 * n, 2 * n);
    HermitianForm::from_matrix_symmetrized(n, &b)
}

pub fn random_antisymmetric<R: Rng + ?Sized>(rng: &mut R, size: usize) -> DMatrix<Complex64> {
    let b = random_complex(rng, size, size);
    &b - b.transpose()
}

pub fn random_quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    Quaternion::new(normal(rng), normal(rng), normal(rng), normal(rng))
}

pub fn random_quat_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> QuatMatrix {
    let mut h = QuatMatrix::zeros(n);
    for a in 0..n {
        h[(a, a)] = Quaternion::real(normal(rng));
        for b in a + 1..n {
            let q = random_quaternion(rng);
            h[(a, b)] = q;
            h[(b, a)] = q.conj();
        }
    }
    h
}

/// Positive-definite quaternion-hermitian matrix `Q Q^* + eps Id`.
pub fn random_quat_positive<R: Rng + ?Sized>(rng: &mut R, n: usize) -> QuatMatrix {
    let mut q = QuatMatrix::zeros(n);
    for a in 0..n {
        for b in 0..n {
            q[(a, b)] = random_quaternion(rng);
        }
    }
    let mut h = QuatMatrix::zeros(n);
    for a in 0..n {
        for b in 0..n {
            let mut acc = if a == b { Quaternion::real(0.1) } else { Quaternion::ZERO };
            for c in 0..n {
                acc = acc + q[(a, c)] * q[(b, c)].conj();
            }
            h[(a, b)] = acc;
        }
    }
    h
}
