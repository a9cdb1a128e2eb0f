//! Shared inputs for the benchmarks.

use nhpseudo::kernels::C64;
use nhpseudo::models::{build_haldane_heterostructure, scaled_tuple, HaldaneParams};
use nhpseudo::random::{random_site, random_tuple, rng};
use nhpseudo::{MatrixTuple, ProbeSite};

/// A random tuple with one Hermitian and one general matrix of size `n`.
pub fn random_instance(n: usize, seed: u64) -> (MatrixTuple, ProbeSite) {
    let mut r = rng(seed);
    (random_tuple(&mut r, n, 1, 1), random_site(&mut r, 1, 1))
}

/// The default heterostructure with its positions scaled, probed at the
/// centre at energy zero.
pub fn haldane_instance() -> (MatrixTuple, ProbeSite) {
    let p = HaldaneParams::default();
    let model = build_haldane_heterostructure(&p).expect("default model builds");
    let t = scaled_tuple(&model, p.kappa).expect("scaled tuple");
    (t, ProbeSite::new(vec![0.1, 0.1], vec![C64::new(0.0, 0.0)]))
}
