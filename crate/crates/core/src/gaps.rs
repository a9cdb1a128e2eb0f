//! Clifford linear and radial gaps, approximate joint eigenvectors with
//! residual certificates, and the reverse direction: certifying a probe site
//! from a given state.

use serde::Serialize;

use crate::clifford::CliffordRep;
use crate::error::{Error, Result};
use crate::kernels::{
    adjoint, eigenvalues, min_abs_real, shifted, sigma_min, smallest_right_singular,
    vector_norm, CMatrix, CVector, C64,
};
use crate::localizer::{
    commutator_sum_norm, f_term_norm, hermitian_localizer, nh_localizer, split_blocks,
    MatrixTuple, ProbeSite,
};
use crate::quadratic::{ensure_unit, quadratic_gaps};

/// Relative slack allowed when a computed quantity is compared with a
/// theoretical upper bound.
pub const BOUND_TOL: f64 = 1e-9;

/// `min |Re Spec L|`.
pub fn clifford_linear_gap(t: &MatrixTuple, site: &ProbeSite, rep: &CliffordRep) -> Result<f64> {
    Ok(min_abs_real(&eigenvalues(&nh_localizer(t, site, rep)?)?))
}

/// `sigma_min(L)`.
pub fn clifford_radial_gap(t: &MatrixTuple, site: &ProbeSite, rep: &CliffordRep) -> Result<f64> {
    sigma_min(&nh_localizer(t, site, rep)?)
}

/// `sigma_min` of the Hermitian localizer of a purely Hermitian tuple.
pub fn hermitian_localizer_gap(
    t: &MatrixTuple,
    site: &ProbeSite,
    rep: &CliffordRep,
) -> Result<f64> {
    sigma_min(&hermitian_localizer(t, site, rep)?)
}

/// `sum_{i<k} |[A_i, A_k]| + |F|`, the correction every certificate pays.
pub fn cross_term_bound(t: &MatrixTuple, site: &ProbeSite, rep: &CliffordRep) -> Result<f64> {
    Ok(commutator_sum_norm(t)? + f_term_norm(t, site, rep)?)
}

/// All five gap functions at one probe site.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapRecord {
    pub site: ProbeSite,
    pub gap_linear: f64,
    pub gap_radial: f64,
    pub gap_rq: f64,
    pub gap_lq: f64,
    pub gap_q: f64,
}

pub fn gap_record(t: &MatrixTuple, site: &ProbeSite, rep: &CliffordRep) -> Result<GapRecord> {
    let l = nh_localizer(t, site, rep)?;
    let q = quadratic_gaps(t, site)?;
    Ok(GapRecord {
        site: site.clone(),
        gap_linear: min_abs_real(&eigenvalues(&l)?),
        gap_radial: sigma_min(&l)?,
        gap_rq: q.rq,
        gap_lq: q.lq,
        gap_q: q.q,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Approximate eigenvector of every `A_i` and of `B`.
    Right,
    /// Approximate eigenvector of every `A_i` and of `B^†`.
    Left,
    /// Approximate eigenvector of `A_i`, `B` and `B^†` simultaneously.
    Both,
}

/// A unit state extracted from the localizer's smallest singular vector,
/// with its measured residuals and the guaranteed bound on them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualCertificate {
    pub psi: CVector,
    pub side: Side,
    /// `|A_i psi - lambda_i psi|` for each `i`, then `|B psi - nu psi|`
    /// (right) or `|B^† psi - conj(nu) psi|` (left).
    pub residuals: Vec<f64>,
    /// `sqrt(2m) * sqrt(eps1^2 + eps2)`.
    pub bound: f64,
    /// Zero-based index of the selected block among the `2m`.
    pub block_index: usize,
    /// The radial gap.
    pub eps1: f64,
    /// Commutator and `F` correction.
    pub eps2: f64,
}

impl ResidualCertificate {
    pub fn residual_norm(&self) -> f64 {
        self.residuals.iter().map(|r| r * r).sum::<f64>().sqrt()
    }

    pub fn holds(&self) -> bool {
        self.residual_norm() <= self.bound + BOUND_TOL * self.bound.max(1.0)
    }
}

fn residuals(t: &MatrixTuple, site: &ProbeSite, psi: &CVector, side: Side) -> Vec<f64> {
    let mut out: Vec<f64> = t
        .shifted_herm(site)
        .iter()
        .map(|a| vector_norm(&a.dot(psi)))
        .collect();
    let b = &t.nonherm[0];
    let nu = site.nu[0];
    match side {
        Side::Right => out.push(vector_norm(&shifted(b, nu).dot(psi))),
        Side::Left => out.push(vector_norm(&shifted(&adjoint(b), nu.conj()).dot(psi))),
        Side::Both => {
            out.push(vector_norm(&shifted(b, nu).dot(psi)));
            out.push(vector_norm(&shifted(&adjoint(b), nu.conj()).dot(psi)));
        }
    }
    out
}

/// Split the smallest right singular vector of `L` into its `2m` blocks,
/// keep the block of largest norm (lowest index on ties) and normalise it.
/// Blocks `0..m` give a right, blocks `m..2m` a left approximate eigenvector.
pub fn extract_approx_eigvec(
    t: &MatrixTuple,
    site: &ProbeSite,
    rep: &CliffordRep,
) -> Result<ResidualCertificate> {
    let l = nh_localizer(t, site, rep)?;
    let (eps1, v) = smallest_right_singular(&l)?;
    let eps2 = cross_term_bound(t, site, rep)?;
    let blocks = split_blocks(&v, rep.size());
    let mut block_index = 0;
    let mut best = f64::NEG_INFINITY;
    for (k, b) in blocks.iter().enumerate() {
        let nrm = vector_norm(b);
        if nrm > best {
            best = nrm;
            block_index = k;
        }
    }
    let psi = blocks[block_index].mapv(|z| z / best);
    let side = if block_index < rep.m {
        Side::Right
    } else {
        Side::Left
    };
    Ok(ResidualCertificate {
        residuals: residuals(t, site, &psi, side),
        psi,
        side,
        bound: (rep.size() as f64).sqrt() * (eps1 * eps1 + eps2).sqrt(),
        block_index,
        eps1,
        eps2,
    })
}

/// Outcome of certifying a probe site from a unit state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipCertificate {
    pub side: Side,
    /// Squared residual sum appropriate to `side`.
    pub eps1: f64,
    pub eps2: f64,
    /// The certified radius.
    pub eps: f64,
    pub radial_gap: f64,
    /// Whether `radial_gap <= eps` (within tolerance).
    pub holds: bool,
}

/// The radius `eps` for which `psi` certifies the probe site in the radial
/// pseudospectrum, plus the check `sigma_min(L) <= eps`.
///
/// * right: `eps1 = sum |A_i psi - lambda_i psi|^2 + |B psi - nu psi|^2`, `eps = sqrt(eps1 + eps2)`
/// * left: the same with `B^†` and `conj(nu)`
/// * both: `eps1 = 2 sum |A_i psi - lambda_i psi|^2 + |B psi - nu psi|^2 + |B^† psi - conj(nu) psi|^2`,
///   `eps = sqrt(eps1 / sqrt 2 + eps2)`
pub fn reverse_membership_eps(
    t: &MatrixTuple,
    site: &ProbeSite,
    rep: &CliffordRep,
    psi: &CVector,
    side: Side,
) -> Result<MembershipCertificate> {
    ensure_unit(psi)?;
    if psi.len() != t.dim() {
        return Err(Error::input("state length differs from the matrix dimension"));
    }
    let radial_gap = clifford_radial_gap(t, site, rep)?;
    let eps2 = cross_term_bound(t, site, rep)?;
    let r = residuals(t, site, psi, side);
    let d1 = t.d1();
    let herm_sq: f64 = r[..d1].iter().map(|x| x * x).sum();
    let rest_sq: f64 = r[d1..].iter().map(|x| x * x).sum();
    let (eps1, eps) = match side {
        Side::Right | Side::Left => {
            let e1 = herm_sq + rest_sq;
            (e1, (e1 + eps2).sqrt())
        }
        Side::Both => {
            let e1 = 2.0 * herm_sq + rest_sq;
            (e1, (e1 * std::f64::consts::FRAC_1_SQRT_2 + eps2).sqrt())
        }
    };
    Ok(MembershipCertificate {
        side,
        eps1,
        eps2,
        eps,
        radial_gap,
        holds: radial_gap <= eps + BOUND_TOL * eps.max(1.0),
    })
}

/// `sigma_min(A - z)`; `z` lies in the open `eps`-pseudospectrum of `A`
/// exactly when this is below `eps`.
pub fn single_matrix_pseudospectrum_eps(a: &CMatrix, z: C64) -> Result<f64> {
    crate::kernels::ensure_square(a, "matrix")?;
    sigma_min(&shifted(a, z))
}

/// The value of [`single_matrix_pseudospectrum_eps`] with a unit vector `v`
/// attaining it: `|(A - z) v| = sigma_min(A - z)`.
pub fn pseudospectrum_witness(a: &CMatrix, z: C64) -> Result<(f64, CVector)> {
    crate::kernels::ensure_square(a, "matrix")?;
    smallest_right_singular(&shifted(a, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::build_rep;
    use crate::kernels::{min_abs, op_norm, ONE, ZERO};
    use crate::random::{random_hermitian, random_site, random_tuple, random_unit_vector, random_unitary, rng};
    use ndarray::array;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tls() -> MatrixTuple {
        let x = array![[c(-1.0, 0.0), ZERO], [ZERO, ONE]];
        let h = array![[c(0.0, 2.0), ONE], [ONE, ZERO]];
        MatrixTuple::new(vec![x], vec![h]).unwrap()
    }

    fn ep_site() -> ProbeSite {
        ProbeSite::new(vec![0.0], vec![c(0.0, 1.0)])
    }

    #[test]
    fn radial_gap_matches_assembled_svd() {
        let t = tls();
        let rep = build_rep(1).unwrap();
        let l = nh_localizer(&t, &ep_site(), &rep).unwrap();
        let direct = *crate::kernels::singular_values(&l).unwrap().last().unwrap();
        assert_eq!(clifford_radial_gap(&t, &ep_site(), &rep).unwrap(), direct);
    }

    #[test]
    fn spectral_orderings_on_random_localizers() {
        let mut r = rng(1);
        let rep = build_rep(2).unwrap();
        for _ in 0..20 {
            let t = random_tuple(&mut r, 4, 2, 1);
            let site = random_site(&mut r, 2, 1);
            let l = nh_localizer(&t, &site, &rep).unwrap();
            let ev = eigenvalues(&l).unwrap();
            let radial = sigma_min(&l).unwrap();
            assert!(radial <= min_abs(&ev) + 1e-10);
            assert!(min_abs_real(&ev) <= min_abs(&ev));
        }
    }

    #[test]
    fn hermitian_reduction() {
        let mut r = rng(2);
        for d1 in 1..=3 {
            let rep = build_rep(d1).unwrap();
            let herm: Vec<_> = (0..d1).map(|_| random_hermitian(&mut r, 3)).collect();
            let b = random_hermitian(&mut r, 3);
            let t = MatrixTuple::new(herm.clone(), vec![b.clone()]).unwrap();
            let site = ProbeSite::new(vec![0.1; d1], vec![c(-0.3, 0.0)]);
            let lin = clifford_linear_gap(&t, &site, &rep).unwrap();
            let rad = clifford_radial_gap(&t, &site, &rep).unwrap();
            let mut all = herm;
            all.push(b);
            let ht = MatrixTuple::new(all, vec![]).unwrap();
            let mut lam = site.lambda.clone();
            lam.push(-0.3);
            let herm_gap =
                hermitian_localizer_gap(&ht, &ProbeSite::new(lam, vec![]), &rep).unwrap();
            assert!((lin - rad).abs() < 1e-10, "d1={d1}");
            assert!((rad - herm_gap).abs() < 1e-10, "d1={d1}");
        }
    }

    #[test]
    fn unitary_invariance_of_linear_gap() {
        let mut r = rng(3);
        let rep = build_rep(2).unwrap();
        let t = random_tuple(&mut r, 4, 2, 1);
        let site = random_site(&mut r, 2, 1);
        let u = random_unitary(&mut r, 4);
        let a = clifford_linear_gap(&t, &site, &rep).unwrap();
        let b = clifford_linear_gap(&t.conjugated(&u), &site, &rep).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn radial_gap_is_taxicab_lipschitz_in_the_site() {
        let mut r = rng(4);
        let rep = build_rep(2).unwrap();
        let t = random_tuple(&mut r, 4, 2, 1);
        for _ in 0..50 {
            let s1 = random_site(&mut r, 2, 1);
            let s2 = random_site(&mut r, 2, 1);
            let g1 = clifford_radial_gap(&t, &s1, &rep).unwrap();
            let g2 = clifford_radial_gap(&t, &s2, &rep).unwrap();
            assert!((g1 - g2).abs() <= 2.0 * s1.taxicab_distance(&s2) + 1e-10);
        }
    }

    #[test]
    fn exact_joint_eigenvector_certificate() {
        let a = CMatrix::from_diag(&array![c(1.0, 0.0), c(2.0, 0.0), c(-1.0, 0.0)]);
        let b = CMatrix::from_diag(&array![c(0.0, 1.0), c(1.0, 1.0), c(3.0, 0.0)]);
        let t = MatrixTuple::new(vec![a], vec![b]).unwrap();
        let site = ProbeSite::new(vec![2.0], vec![c(1.0, 1.0)]);
        let rep = build_rep(1).unwrap();
        let cert = extract_approx_eigvec(&t, &site, &rep).unwrap();
        assert!(cert.residual_norm() < 1e-12);
        assert!(cert.holds());
        let psi = array![ZERO, ONE, ZERO];
        let m = reverse_membership_eps(&t, &site, &rep, &psi, Side::Right).unwrap();
        assert_eq!(m.eps, m.eps2.sqrt());
        assert!(m.holds);
    }

    #[test]
    fn tls_certificate_and_round_trip() {
        let rep = build_rep(1).unwrap();
        let cert = extract_approx_eigvec(&tls(), &ep_site(), &rep).unwrap();
        assert!(cert.holds(), "{cert:?}");
        let m = reverse_membership_eps(&tls(), &ep_site(), &rep, &cert.psi, cert.side).unwrap();
        assert!(m.holds);
    }

    #[test]
    fn certificates_on_random_instances() {
        let mut r = rng(5);
        for d1 in 1..=3 {
            let rep = build_rep(d1).unwrap();
            for _ in 0..10 {
                let t = random_tuple(&mut r, 4, d1, 1);
                let site = random_site(&mut r, d1, 1);
                let cert = extract_approx_eigvec(&t, &site, &rep).unwrap();
                assert!(cert.holds(), "{cert:?}");
                assert!((vector_norm(&cert.psi) - 1.0).abs() < 1e-12);
                for side in [Side::Right, Side::Left, Side::Both] {
                    let psi = random_unit_vector(&mut r, 4);
                    assert!(reverse_membership_eps(&t, &site, &rep, &psi, side).unwrap().holds);
                }
            }
        }
    }

    #[test]
    fn block_index_selects_side() {
        // B = diag(i, 5): the right eigenvector of B at nu = i sits in the top block
        let a = CMatrix::from_diag(&array![c(0.0, 0.0), c(3.0, 0.0)]);
        let b = CMatrix::from_diag(&array![c(0.0, 1.0), c(5.0, 0.0)]);
        let t = MatrixTuple::new(vec![a], vec![b]).unwrap();
        let cert = extract_approx_eigvec(&t, &ProbeSite::new(vec![0.0], vec![c(0.0, 1.0)]), &build_rep(1).unwrap()).unwrap();
        assert!(cert.residual_norm() < 1e-12);
        assert!(cert.block_index < 2);
    }

    #[test]
    fn single_matrix_pseudospectrum() {
        let j = array![[ZERO, ONE], [ZERO, ZERO]];
        assert_eq!(single_matrix_pseudospectrum_eps(&j, ZERO).unwrap(), 0.0);
        let (v, w) = pseudospectrum_witness(&j, c(0.1, 0.0)).unwrap();
        assert!(v < 0.1);
        // rank-one perturbation E = -(A - z) w w^† of norm v makes z an eigenvalue
        let az = shifted(&j, c(0.1, 0.0));
        let aw = az.dot(&w);
        let e = CMatrix::from_shape_fn((2, 2), |(i, k)| -aw[i] * w[k].conj());
        assert!((op_norm(&e).unwrap() - v).abs() < 1e-12);
        assert!(sigma_min(&(&az + &e)).unwrap() < 1e-12);
        let mut r = rng(6);
        let a = crate::random::random_matrix(&mut r, 5);
        let z = c(0.3, -0.2);
        let (v, w) = pseudospectrum_witness(&a, z).unwrap();
        assert!((vector_norm(&shifted(&a, z).dot(&w)) - v).abs() < 1e-12);
    }
}
