//! Hermitian and non-Hermitian spectral localizers and the correction terms
//! of `L^† L`.
//!
//! Tensor products always put the Clifford factor on the outside: block
//! `(p, q)` of size `n x n` of `Γ ⊗ M` is `Γ[p, q] * M`.

use ndarray::{s, Axis};
use serde::{Deserialize, Serialize};

use crate::clifford::{CliffordRep, ExactMatrix};
use crate::error::{Error, Result};
use crate::kernels::{
    adjoint, ensure_finite, ensure_square, hermitian_op_norm, max_abs_entry, shifted, CMatrix,
    C64, I, ZERO,
};

/// The system `(A_1, ..., A_d1; B_1, ..., B_d2)`: Hermitian matrices
/// (typically scaled positions) and non-Hermitian ones (typically a
/// Hamiltonian).
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTuple {
    pub herm: Vec<CMatrix>,
    pub nonherm: Vec<CMatrix>,
}

/// Trial positions `lambda` and energies `nu`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeSite {
    pub lambda: Vec<f64>,
    pub nu: Vec<C64>,
}

impl ProbeSite {
    pub fn new(lambda: Vec<f64>, nu: Vec<C64>) -> Self {
        ProbeSite { lambda, nu }
    }

    pub fn is_finite(&self) -> bool {
        self.lambda.iter().all(|x| x.is_finite())
            && self.nu.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Euclidean distance, treating `nu` as points of the plane.
    pub fn distance(&self, other: &ProbeSite) -> f64 {
        let a: f64 = self
            .lambda
            .iter()
            .zip(&other.lambda)
            .map(|(x, y)| (x - y).powi(2))
            .sum();
        let b: f64 = self
            .nu
            .iter()
            .zip(&other.nu)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum();
        (a + b).sqrt()
    }

    /// Taxi-cab distance `sum |lambda_i - lambda_i'| + sum |nu_j - nu_j'|`.
    pub fn taxicab_distance(&self, other: &ProbeSite) -> f64 {
        let a: f64 = self
            .lambda
            .iter()
            .zip(&other.lambda)
            .map(|(x, y)| (x - y).abs())
            .sum();
        let b: f64 = self
            .nu
            .iter()
            .zip(&other.nu)
            .map(|(x, y)| (x - y).norm())
            .sum();
        a + b
    }
}

const HERMITIAN_TOL: f64 = 1e-12;

impl MatrixTuple {
    /// Validate shapes, finiteness and Hermiticity of the `herm` part.
    pub fn new(herm: Vec<CMatrix>, nonherm: Vec<CMatrix>) -> Result<Self> {
        let first = herm
            .first()
            .or(nonherm.first())
            .ok_or_else(|| Error::input("matrix tuple is empty"))?;
        let n = ensure_square(first, "tuple member")?;
        if n == 0 {
            return Err(Error::input("matrices must be at least 1x1"));
        }
        for (k, m) in herm.iter().chain(&nonherm).enumerate() {
            if m.dim() != (n, n) {
                return Err(Error::input(format!(
                    "tuple member {k} is {:?}, expected {n}x{n}",
                    m.dim()
                )));
            }
            ensure_finite(m, "tuple member")?;
        }
        for (k, a) in herm.iter().enumerate() {
            let defect = max_abs_entry((a - &adjoint(a)).view());
            if defect > HERMITIAN_TOL * max_abs_entry(a.view()).max(1.0) {
                return Err(Error::input(format!(
                    "A_{} is not Hermitian (max |A - A^†| = {defect:e})",
                    k + 1
                )));
            }
        }
        Ok(MatrixTuple { herm, nonherm })
    }

    pub fn dim(&self) -> usize {
        self.herm
            .first()
            .or(self.nonherm.first())
            .map_or(0, |m| m.nrows())
    }

    pub fn d1(&self) -> usize {
        self.herm.len()
    }

    pub fn d2(&self) -> usize {
        self.nonherm.len()
    }

    pub fn check_site(&self, site: &ProbeSite) -> Result<()> {
        if site.lambda.len() != self.d1() || site.nu.len() != self.d2() {
            return Err(Error::input(format!(
                "probe site has {} positions and {} energies, tuple has d1 = {}, d2 = {}",
                site.lambda.len(),
                site.nu.len(),
                self.d1(),
                self.d2()
            )));
        }
        if !site.is_finite() {
            return Err(Error::input("probe site has non-finite coordinates"));
        }
        Ok(())
    }

    /// `A_i - lambda_i` for every `i`.
    pub fn shifted_herm(&self, site: &ProbeSite) -> Vec<CMatrix> {
        self.herm
            .iter()
            .zip(&site.lambda)
            .map(|(a, &l)| shifted(a, C64::new(l, 0.0)))
            .collect()
    }

    /// `B_j - nu_j` for every `j`.
    pub fn shifted_nonherm(&self, site: &ProbeSite) -> Vec<CMatrix> {
        self.nonherm
            .iter()
            .zip(&site.nu)
            .map(|(b, &z)| shifted(b, z))
            .collect()
    }

    /// Conjugate every matrix by the unitary `u`: `M -> u M u^†`.
    pub fn conjugated(&self, u: &CMatrix) -> MatrixTuple {
        let ud = adjoint(u);
        let f = |m: &CMatrix| u.dot(m).dot(&ud);
        MatrixTuple {
            herm: self.herm.iter().map(f).collect(),
            nonherm: self.nonherm.iter().map(f).collect(),
        }
    }

    /// Replace every `B_j` by `B_j^†`.
    pub fn with_adjoint_nonherm(&self) -> MatrixTuple {
        MatrixTuple {
            herm: self.herm.clone(),
            nonherm: self.nonherm.iter().map(adjoint).collect(),
        }
    }
}

/// Add `gamma ⊗ m` into `out` (which is `gamma.dim() * n` square).
fn add_kron(out: &mut CMatrix, gamma: &ExactMatrix, m: &CMatrix, scale: C64) {
    let n = m.nrows();
    for p in 0..gamma.dim() {
        for q in 0..gamma.dim() {
            let w = gamma.get(p, q);
            if w.is_zero() {
                continue;
            }
            let w = w.to_c64() * scale;
            let mut block = out.slice_mut(s![p * n..(p + 1) * n, q * n..(q + 1) * n]);
            block.scaled_add(w, m);
        }
    }
}

/// `sum_i (A_i - lambda_i) ⊗ Γ_i` for a purely Hermitian tuple. Uses the
/// representation's generators followed by its diagonal element, so up to
/// `rep.d + 1` matrices are accepted.
pub fn hermitian_localizer(
    t: &MatrixTuple,
    site: &ProbeSite,
    rep: &CliffordRep,
) -> Result<CMatrix> {
    if t.d2() != 0 {
        return Err(Error::input(
            "Hermitian localizer takes no non-Hermitian matrices",
        ));
    }
    t.check_site(site)?;
    let gens = rep.full_generators();
    if t.d1() > gens.len() {
        return Err(Error::input(format!(
            "representation supplies {} generators, tuple needs {}",
            gens.len(),
            t.d1()
        )));
    }
    let n = t.dim();
    let mut out = CMatrix::zeros((rep.size() * n, rep.size() * n));
    for (a, g) in t.shifted_herm(site).iter().zip(&gens) {
        add_kron(&mut out, g, a, C64::new(1.0, 0.0));
    }
    Ok(out)
}

fn check_nh(t: &MatrixTuple, site: &ProbeSite, rep: &CliffordRep) -> Result<()> {
    if t.d2() != 1 {
        return Err(Error::Unsupported(format!(
            "the non-Hermitian localizer takes exactly one non-Hermitian matrix, got {}",
            t.d2()
        )));
    }
    if rep.d != t.d1() {
        return Err(Error::input(format!(
            "representation built for d = {}, tuple has d1 = {}",
            rep.d,
            t.d1()
        )));
    }
    t.check_site(site)
}

/// `sum_i (A_i - lambda_i) ⊗ Γ_i + (B - nu) ⊗ diag(I, 0) + (B - nu)^† ⊗ diag(0, -I)`.
pub fn nh_localizer(t: &MatrixTuple, site: &ProbeSite, rep: &CliffordRep) -> Result<CMatrix> {
    check_nh(t, site, rep)?;
    let n = t.dim();
    let mut out = CMatrix::zeros((rep.size() * n, rep.size() * n));
    for (a, g) in t.shifted_herm(site).iter().zip(&rep.gammas) {
        add_kron(&mut out, g, a, C64::new(1.0, 0.0));
    }
    let b = &t.shifted_nonherm(site)[0];
    add_kron(&mut out, &rep.diag_plus, b, C64::new(1.0, 0.0));
    add_kron(&mut out, &rep.diag_minus, &adjoint(b), C64::new(1.0, 0.0));
    Ok(out)
}

/// `sum_{i<k} |[A_i, A_k]|`.
pub fn commutator_sum_norm(t: &MatrixTuple) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..t.d1() {
        for k in i + 1..t.d1() {
            let (a, b) = (&t.herm[i], &t.herm[k]);
            let c = a.dot(b) - b.dot(a);
            // the commutator of Hermitian matrices is skew-Hermitian
            total += hermitian_op_norm(&c.mapv(|z| z * I))?;
        }
    }
    Ok(total)
}

/// The cross term `F` of `L^† L`:
/// `sum_i (Γ_i P ⊗ a_i b + Γ_i N ⊗ a_i b^†) + h.c.` with `a_i = A_i - lambda_i`,
/// `b = B - nu`, `P = diag(I, 0)` and `N = diag(0, -I)`.
pub fn f_term(t: &MatrixTuple, site: &ProbeSite, rep: &CliffordRep) -> Result<CMatrix> {
    check_nh(t, site, rep)?;
    let n = t.dim();
    let b = &t.shifted_nonherm(site)[0];
    let bd = adjoint(b);
    let mut g = CMatrix::zeros((rep.size() * n, rep.size() * n));
    for (a, gamma) in t.shifted_herm(site).iter().zip(&rep.gammas) {
        add_kron(&mut g, &(gamma * &rep.diag_plus), &a.dot(b), C64::new(1.0, 0.0));
        add_kron(&mut g, &(gamma * &rep.diag_minus), &a.dot(&bd), C64::new(1.0, 0.0));
    }
    Ok(&g + &adjoint(&g))
}

pub fn f_term_norm(t: &MatrixTuple, site: &ProbeSite, rep: &CliffordRep) -> Result<f64> {
    hermitian_op_norm(&f_term(t, site, rep)?)
}

/// `sum_i (A_i - lambda_i)^2 ⊗ I + (B - nu)^†(B - nu) ⊗ diag(I, 0) + (B - nu)(B - nu)^† ⊗ diag(0, I)`,
/// the part of `L^† L` that survives when everything commutes.
pub fn localizer_square_diagonal_part(
    t: &MatrixTuple,
    site: &ProbeSite,
    rep: &CliffordRep,
) -> Result<CMatrix> {
    check_nh(t, site, rep)?;
    let n = t.dim();
    let size = rep.size();
    let mut sq = CMatrix::zeros((n, n));
    for a in t.shifted_herm(site) {
        sq = sq + a.dot(&a);
    }
    let b = &t.shifted_nonherm(site)[0];
    let bd = adjoint(b);
    let top = &sq + &bd.dot(b);
    let bottom = &sq + &b.dot(&bd);
    let mut out = CMatrix::from_elem((size * n, size * n), ZERO);
    for p in 0..size {
        let src = if p < rep.m { &top } else { &bottom };
        out.slice_mut(s![p * n..(p + 1) * n, p * n..(p + 1) * n])
            .assign(src);
    }
    Ok(out)
}

/// `sum_{i<j} [A_i, A_j] ⊗ Γ_i Γ_j`.
pub fn localizer_square_commutator_part(t: &MatrixTuple, rep: &CliffordRep) -> Result<CMatrix> {
    let n = t.dim();
    let size = rep.size();
    let mut out = CMatrix::zeros((size * n, size * n));
    for i in 0..t.d1() {
        for j in i + 1..t.d1() {
            let (a, b) = (&t.herm[i], &t.herm[j]);
            let c = a.dot(b) - b.dot(a);
            add_kron(&mut out, &(&rep.gammas[i] * &rep.gammas[j]), &c, C64::new(1.0, 0.0));
        }
    }
    Ok(out)
}

/// Split a vector of length `blocks * n` into its `blocks` consecutive pieces.
pub fn split_blocks(v: &crate::kernels::CVector, blocks: usize) -> Vec<crate::kernels::CVector> {
    let n = v.len() / blocks;
    v.view()
        .into_shape_with_order((blocks, n))
        .map(|m| m.axis_iter(Axis(0)).map(|r| r.to_owned()).collect())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::build_rep;
    use crate::kernels::{hermiticity_defect, op_norm, sigma_min};
    use crate::random::{random_hermitian, random_matrix, rng};
    use ndarray::array;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tls() -> MatrixTuple {
        let x = array![[c(-1.0, 0.0), ZERO], [ZERO, c(1.0, 0.0)]];
        let h = array![[c(0.0, 2.0), c(1.0, 0.0)], [c(1.0, 0.0), ZERO]];
        MatrixTuple::new(vec![x], vec![h]).unwrap()
    }

    fn random_tuple(seed: u64, n: usize, d1: usize) -> MatrixTuple {
        let mut r = rng(seed);
        let herm = (0..d1).map(|_| random_hermitian(&mut r, n)).collect();
        MatrixTuple::new(herm, vec![random_matrix(&mut r, n)]).unwrap()
    }

    fn random_site(seed: u64, d1: usize) -> ProbeSite {
        let mut r = rng(seed);
        ProbeSite::new(
            (0..d1).map(|_| crate::random::normal(&mut r)).collect(),
            vec![crate::random::complex_normal(&mut r)],
        )
    }

    #[test]
    fn hermitian_localizer_single_term() {
        let x = array![[c(-1.0, 0.0), ZERO], [ZERO, c(1.0, 0.0)]];
        let t = MatrixTuple::new(vec![x.clone()], vec![]).unwrap();
        let l = hermitian_localizer(&t, &ProbeSite::new(vec![0.0], vec![]), &build_rep(1).unwrap())
            .unwrap();
        let mut want = CMatrix::zeros((4, 4));
        want.slice_mut(s![0..2, 2..4]).assign(&x);
        want.slice_mut(s![2..4, 0..2]).assign(&x);
        assert_eq!(l, want);
        assert_eq!(hermiticity_defect(&l).unwrap(), 0.0);
    }

    #[test]
    fn hermitian_localizer_singular_at_joint_eigenvalue() {
        let a1 = CMatrix::from_diag(&array![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let a2 = CMatrix::from_diag(&array![c(-1.0, 0.0), c(0.5, 0.0), c(4.0, 0.0)]);
        let t = MatrixTuple::new(vec![a1, a2], vec![]).unwrap();
        let l = hermitian_localizer(
            &t,
            &ProbeSite::new(vec![2.0, 0.5], vec![]),
            &build_rep(2).unwrap(),
        )
        .unwrap();
        assert!(sigma_min(&l).unwrap() < 1e-14);
    }

    #[test]
    fn tls_localizer_blocks() {
        let t = tls();
        let e = c(0.0, 1.0);
        let l = nh_localizer(&t, &ProbeSite::new(vec![0.0], vec![e]), &build_rep(1).unwrap())
            .unwrap();
        let h = shifted(&t.nonherm[0], e);
        let x = &t.herm[0];
        assert_eq!(l.slice(s![0..2, 0..2]), h);
        assert_eq!(l.slice(s![0..2, 2..4]), x);
        assert_eq!(l.slice(s![2..4, 0..2]), x);
        assert_eq!(l.slice(s![2..4, 2..4]), adjoint(&h).mapv(|z| -z));
    }

    #[test]
    fn hermitian_b_real_nu_gives_hermitian_localizer() {
        let mut r = rng(3);
        let t = MatrixTuple::new(
            vec![random_hermitian(&mut r, 4), random_hermitian(&mut r, 4)],
            vec![random_hermitian(&mut r, 4)],
        )
        .unwrap();
        let site = ProbeSite::new(vec![0.3, -0.2], vec![c(0.7, 0.0)]);
        let l = nh_localizer(&t, &site, &build_rep(2).unwrap()).unwrap();
        assert!(hermiticity_defect(&l).unwrap() < 1e-12);
    }

    #[test]
    fn skew_part_of_localizer_matches_energy_term() {
        for seed in 0..5 {
            let t = random_tuple(seed, 4, 2);
            let site = random_site(100 + seed, 2);
            let l = nh_localizer(&t, &site, &build_rep(2).unwrap()).unwrap();
            let b = &t.shifted_nonherm(&site)[0];
            let lhs = op_norm(&(&l - &adjoint(&l))).unwrap();
            let rhs = op_norm(&(b - &adjoint(b))).unwrap();
            assert!((lhs - rhs).abs() < 1e-10 * rhs.max(1.0));
        }
    }

    #[test]
    fn square_expansion_is_exact() {
        for (seed, d1) in [(1, 1), (2, 2), (3, 3), (4, 4)] {
            let t = random_tuple(seed, 4, d1);
            let site = random_site(50 + seed, d1);
            let rep = build_rep(d1).unwrap();
            let l = nh_localizer(&t, &site, &rep).unwrap();
            let ltl = adjoint(&l).dot(&l);
            let rebuilt = localizer_square_diagonal_part(&t, &site, &rep).unwrap()
                + localizer_square_commutator_part(&t, &rep).unwrap()
                + f_term(&t, &site, &rep).unwrap();
            let err = max_abs_entry((&ltl - &rebuilt).view());
            assert!(err < 1e-10 * (1.0 + max_abs_entry(ltl.view())), "d1={d1}: {err:e}");
        }
    }

    #[test]
    fn f_term_is_hermitian_and_bounds_the_expansion() {
        let t = random_tuple(9, 4, 2);
        let site = random_site(10, 2);
        let rep = build_rep(2).unwrap();
        let f = f_term(&t, &site, &rep).unwrap();
        assert!(hermiticity_defect(&f).unwrap() < 1e-12);
        let l = nh_localizer(&t, &site, &rep).unwrap();
        let rest = adjoint(&l).dot(&l) - localizer_square_diagonal_part(&t, &site, &rep).unwrap();
        let lhs = op_norm(&rest).unwrap();
        let rhs = commutator_sum_norm(&t).unwrap() + f_term_norm(&t, &site, &rep).unwrap();
        assert!(lhs <= rhs + 1e-10);
    }

    #[test]
    fn f_term_vanishes_for_diagonal_data() {
        let a = CMatrix::from_diag(&array![c(1.0, 0.0), c(2.0, 0.0)]);
        let b = CMatrix::from_diag(&array![c(0.0, 1.0), c(3.0, -1.0)]);
        let t = MatrixTuple::new(vec![a], vec![b]).unwrap();
        let site = ProbeSite::new(vec![1.0], vec![c(0.0, 1.0)]);
        assert_eq!(f_term_norm(&t, &site, &build_rep(1).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn f_term_does_not_depend_on_the_probe_site() {
        let t = random_tuple(21, 5, 2);
        let rep = build_rep(2).unwrap();
        let f1 = f_term(&t, &random_site(1, 2), &rep).unwrap();
        let f2 = f_term(&t, &random_site(2, 2), &rep).unwrap();
        assert!(max_abs_entry((&f1 - &f2).view()) < 1e-10 * (1.0 + max_abs_entry(f1.view())));
    }

    #[test]
    fn commutator_norms() {
        let sx = ExactMatrix::pauli_x().to_complex();
        let sy = ExactMatrix::pauli_y().to_complex();
        let t = MatrixTuple::new(vec![sx, sy], vec![]).unwrap();
        assert!((commutator_sum_norm(&t).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(commutator_sum_norm(&tls()).unwrap(), 0.0);
    }

    #[test]
    fn shift_covariance() {
        let t = random_tuple(5, 3, 2);
        let rep = build_rep(2).unwrap();
        let site = random_site(6, 2);
        let delta = ProbeSite::new(vec![0.4, -1.1], vec![c(0.25, 0.5)]);
        let moved = ProbeSite::new(
            site.lambda.iter().zip(&delta.lambda).map(|(a, b)| a + b).collect(),
            vec![site.nu[0] + delta.nu[0]],
        );
        let t_shift = MatrixTuple::new(
            t.shifted_herm(&ProbeSite::new(delta.lambda.clone(), vec![])),
            vec![shifted(&t.nonherm[0], delta.nu[0])],
        )
        .unwrap();
        let l1 = nh_localizer(&t, &moved, &rep).unwrap();
        let l2 = nh_localizer(&t_shift, &site, &rep).unwrap();
        assert!(max_abs_entry((&l1 - &l2).view()) < 1e-12);
    }

    #[test]
    fn commutator_bound_on_localizer_normality() {
        for seed in 0..5 {
            let t = random_tuple(seed + 30, 4, 2);
            let site = random_site(seed + 40, 2);
            let l = nh_localizer(&t, &site, &build_rep(2).unwrap()).unwrap();
            let ld = adjoint(&l);
            let lhs = op_norm(&(ld.dot(&l) - l.dot(&ld))).unwrap();
            let rhs = 2.0
                * op_norm(&l).unwrap()
                * (hermiticity_defect(&t.nonherm[0]).unwrap() + 2.0 * site.nu[0].im.abs());
            assert!(lhs <= rhs + 1e-10);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let t = tls();
        let rep = build_rep(1).unwrap();
        assert!(nh_localizer(&t, &ProbeSite::new(vec![0.0, 1.0], vec![ZERO]), &rep).is_err());
        assert!(matches!(
            nh_localizer(
                &MatrixTuple::new(t.herm.clone(), vec![]).unwrap(),
                &ProbeSite::new(vec![0.0], vec![]),
                &rep
            ),
            Err(Error::Unsupported(_))
        ));
        let skew = array![[ZERO, c(1.0, 0.0)], [c(-1.0, 0.0), ZERO]];
        assert!(MatrixTuple::new(vec![skew], vec![]).is_err());
    }
}
