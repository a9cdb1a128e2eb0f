//! Seeded random instances for fuzzing and property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::kernels::{adjoint, CMatrix, CVector, C64};
use crate::localizer::{MatrixTuple, ProbeSite};

pub type Rand = ChaCha8Rng;

pub fn rng(seed: u64) -> Rand {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(r: &mut Rand) -> f64 {
    r.sample(StandardNormal)
}

/// Complex standard normal: real and imaginary parts each `N(0, 1/2)`.
pub fn complex_normal(r: &mut Rand) -> C64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    C64::new(normal(r) * s, normal(r) * s)
}

pub fn random_matrix(r: &mut Rand, n: usize) -> CMatrix {
    CMatrix::from_shape_simple_fn((n, n), || complex_normal(r))
}

pub fn random_hermitian(r: &mut Rand, n: usize) -> CMatrix {
    let g = random_matrix(r, n);
    (&g + &adjoint(&g)).mapv(|z| z * 0.5)
}

pub fn random_unit_vector(r: &mut Rand, n: usize) -> CVector {
    let v = CVector::from_shape_simple_fn(n, || complex_normal(r));
    let norm = crate::kernels::vector_norm(&v);
    v.mapv(|z| z / norm)
}

/// Haar-ish unitary from modified Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary(r: &mut Rand, n: usize) -> CMatrix {
    let mut q = random_matrix(r, n);
    for j in 0..n {
        for k in 0..j {
            let proj: C64 = (0..n).map(|i| q[[i, k]].conj() * q[[i, j]]).sum();
            for i in 0..n {
                let v = q[[i, k]];
                q[[i, j]] -= proj * v;
            }
        }
        let norm = (0..n).map(|i| q[[i, j]].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            q[[i, j]] /= norm;
        }
    }
    q
}

/// `d1` Hermitian and `d2` general `n x n` matrices.
pub fn random_tuple(r: &mut Rand, n: usize, d1: usize, d2: usize) -> MatrixTuple {
    let herm = (0..d1).map(|_| random_hermitian(r, n)).collect();
    let nonherm = (0..d2).map(|_| random_matrix(r, n)).collect();
    MatrixTuple { herm, nonherm }
}

pub fn random_site(r: &mut Rand, d1: usize, d2: usize) -> ProbeSite {
    ProbeSite::new(
        (0..d1).map(|_| normal(r)).collect(),
        (0..d2).map(|_| complex_normal(r)).collect(),
    )
}

/// Tuple of the same shape as `t` with every entry drawn at scale `scale`.
pub fn perturbation(r: &mut Rand, t: &MatrixTuple, scale: f64) -> MatrixTuple {
    let n = t.dim();
    MatrixTuple {
        herm: (0..t.d1())
            .map(|_| random_hermitian(r, n).mapv(|z| z * scale))
            .collect(),
        nonherm: (0..t.d2())
            .map(|_| random_matrix(r, n).mapv(|z| z * scale))
            .collect(),
    }
}
