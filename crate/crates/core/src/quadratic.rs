//! Right, left and combined quadratic composite operators and their gaps.

use ndarray::{concatenate, s, Axis};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{
    adjoint, hermitian_eigenvalues, op_norm, sigma_min, CMatrix, CVector, C64,
};
use crate::localizer::{MatrixTuple, ProbeSite};

/// Above this dimension the gaps are read from the eigenvalues of `RQ`/`LQ`
/// instead of the SVD of the stacked matrix.
pub const STACK_SVD_MAX_DIM: usize = 1024;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticOperators {
    /// `sum (A_i - lambda_i)^2 + sum (B_j - nu_j)^† (B_j - nu_j)`.
    pub rq: CMatrix,
    /// `sum (A_i - lambda_i)^2 + sum (B_j - nu_j)(B_j - nu_j)^†`.
    pub lq: CMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadraticGaps {
    pub rq: f64,
    pub lq: f64,
    pub q: f64,
}

impl QuadraticGaps {
    pub fn new(rq: f64, lq: f64) -> Self {
        QuadraticGaps {
            rq,
            lq,
            q: rq.min(lq),
        }
    }
}

pub fn build_quadratic(t: &MatrixTuple, site: &ProbeSite) -> Result<QuadraticOperators> {
    t.check_site(site)?;
    let n = t.dim();
    let mut sq = CMatrix::zeros((n, n));
    for a in t.shifted_herm(site) {
        sq = sq + a.dot(&a);
    }
    let mut rq = sq.clone();
    let mut lq = sq;
    for b in t.shifted_nonherm(site) {
        let bd = adjoint(&b);
        rq = rq + bd.dot(&b);
        lq = lq + b.dot(&bd);
    }
    Ok(QuadraticOperators { rq, lq })
}

fn stack(blocks: &[CMatrix]) -> Result<CMatrix> {
    if blocks.is_empty() {
        return Err(Error::input("tuple has no matrices to stack"));
    }
    let views: Vec<_> = blocks.iter().map(|b| b.view()).collect();
    concatenate(Axis(0), &views).map_err(|e| Error::input(e.to_string()))
}

/// `[A_1 - lambda_1; ...; A_d1 - lambda_d1; B_1 - nu_1; ...]`, of size
/// `(d1 + d2) n x n`.
pub fn rm_stack(t: &MatrixTuple, site: &ProbeSite) -> Result<CMatrix> {
    t.check_site(site)?;
    let mut blocks = t.shifted_herm(site);
    blocks.extend(t.shifted_nonherm(site));
    stack(&blocks)
}

/// The left counterpart of [`rm_stack`], built from `B_j^† - conj(nu_j)`.
pub fn lm_stack(t: &MatrixTuple, site: &ProbeSite) -> Result<CMatrix> {
    t.check_site(site)?;
    let mut blocks = t.shifted_herm(site);
    blocks.extend(t.shifted_nonherm(site).iter().map(adjoint));
    stack(&blocks)
}

fn sqrt_smallest(m: &CMatrix) -> Result<f64> {
    let ev = hermitian_eigenvalues(m)?;
    Ok(ev.first().copied().unwrap_or(0.0).max(0.0).sqrt())
}

pub fn quadratic_gaps(t: &MatrixTuple, site: &ProbeSite) -> Result<QuadraticGaps> {
    if t.dim() <= STACK_SVD_MAX_DIM {
        Ok(QuadraticGaps::new(
            sigma_min(&rm_stack(t, site)?)?,
            sigma_min(&lm_stack(t, site)?)?,
        ))
    } else {
        let ops = build_quadratic(t, site)?;
        Ok(QuadraticGaps::new(sqrt_smallest(&ops.rq)?, sqrt_smallest(&ops.lq)?))
    }
}

/// The same gaps read from the eigenvalues of the composite operators.
pub fn quadratic_gaps_via_eigenvalues(t: &MatrixTuple, site: &ProbeSite) -> Result<QuadraticGaps> {
    let ops = build_quadratic(t, site)?;
    Ok(QuadraticGaps::new(sqrt_smallest(&ops.rq)?, sqrt_smallest(&ops.lq)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuadraticMembership {
    pub in_rq: bool,
    pub in_lq: bool,
    pub in_q: bool,
}

/// Closed `eps`-pseudospectrum membership for the three quadratic gaps.
pub fn quadratic_epsilon_membership(
    t: &MatrixTuple,
    site: &ProbeSite,
    eps: f64,
) -> Result<QuadraticMembership> {
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::input(format!("eps must be non-negative, got {eps}")));
    }
    let g = quadratic_gaps(t, site)?;
    Ok(QuadraticMembership {
        in_rq: g.rq <= eps,
        in_lq: g.lq <= eps,
        in_q: g.q <= eps,
    })
}

const UNIT_TOL: f64 = 1e-12;

pub(crate) fn ensure_unit(psi: &CVector) -> Result<()> {
    let norm = crate::kernels::vector_norm(psi);
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::input(format!("state must be a unit vector, |psi| = {norm}")));
    }
    Ok(())
}

fn inner(a: &CVector, b: &CVector) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `E = <psi, B psi>` and `V^2 = <psi, B^† B psi> - |E|^2`.
pub fn expectation_variance(b: &CMatrix, psi: &CVector) -> Result<(C64, f64)> {
    ensure_unit(psi)?;
    if b.dim() != (psi.len(), psi.len()) {
        return Err(Error::input("operator and state dimensions differ"));
    }
    let bpsi = b.dot(psi);
    let e = inner(psi, &bpsi);
    let v2 = inner(&bpsi, &bpsi).re - e.norm_sqr();
    Ok((e, v2))
}

/// `sqrt |sum (A_i - C_i)^2 + sum (B_j - D_j)^†(B_j - D_j)|`: the operator
/// norm of the difference of the two stacked tuples.
pub fn tuple_distance(t: &MatrixTuple, u: &MatrixTuple) -> Result<f64> {
    if t.dim() != u.dim() || t.d1() != u.d1() || t.d2() != u.d2() {
        return Err(Error::input("tuples have different shapes"));
    }
    let diffs: Vec<CMatrix> = t
        .herm
        .iter()
        .zip(&u.herm)
        .chain(t.nonherm.iter().zip(&u.nonherm))
        .map(|(a, b)| a - b)
        .collect();
    op_norm(&stack(&diffs)?)
}

/// View the `k`-th `n x n` block of a stacked matrix.
pub fn stack_block(stacked: &CMatrix, k: usize) -> CMatrix {
    let n = stacked.ncols();
    stacked.slice(s![k * n..(k + 1) * n, ..]).to_owned()
}
