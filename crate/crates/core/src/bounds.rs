//! Inequalities between the linear, radial and quadratic gaps, and the
//! locality sandwich for the quadratic gaps, as checkable reports.
//!
//! Each `check_*` function evaluates everything it needs from scratch. The
//! `*_from_parts` variants take precomputed ingredients so sweeps can share
//! one Schur factorisation between several reports.

use serde::Serialize;

use crate::clifford::CliffordRep;
use crate::error::{Error, Result};
use crate::kernels::{
    adjoint, departure_of, frobenius_norm, hermitian_eigenvalues, hermitian_eigh, hermitian_op_norm,
    max_abs_entry, min_abs_real, schur, sigma_min, CMatrix, CVector, C64, I,
};
use crate::localizer::{commutator_sum_norm, f_term_norm, nh_localizer, MatrixTuple, ProbeSite};
use crate::quadratic::{quadratic_gaps, QuadraticGaps};

/// Relative tolerance in `lhs <= rhs + BOUND_TOL * scale`.
pub const BOUND_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    LinearRadial,
    RadialQuadratic,
    LinearQuadratic,
    LocalityRqLower,
    LocalityRqUpper,
    LocalityQLower,
    LocalityQUpper,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::LinearRadial => "linear_radial",
            BoundKind::RadialQuadratic => "radial_quadratic",
            BoundKind::LinearQuadratic => "linear_quadratic",
            BoundKind::LocalityRqLower => "locality_rq_lower",
            BoundKind::LocalityRqUpper => "locality_rq_upper",
            BoundKind::LocalityQLower => "locality_q_lower",
            BoundKind::LocalityQUpper => "locality_q_upper",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub slack: f64,
    /// Magnitude the tolerance is measured against.
    pub scale: f64,
    pub satisfied: bool,
}

impl BoundReport {
    pub fn new(kind: BoundKind, lhs: f64, rhs: f64, scale: f64) -> Self {
        let scale = scale.max(1.0);
        BoundReport {
            kind,
            lhs,
            rhs,
            slack: rhs - lhs,
            scale,
            satisfied: lhs <= rhs + BOUND_TOL * scale,
        }
    }
}

/// Eigenvalues of `i (B - B^†)`, from which `|(B - nu) - (B - nu)^†|` is
/// available for every `nu` without another factorisation.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewSpectrum {
    eigs: Vec<f64>,
}

impl SkewSpectrum {
    pub fn new(b: &CMatrix) -> Result<Self> {
        let skew = (b - &adjoint(b)).mapv(|z| z * I);
        Ok(SkewSpectrum {
            eigs: hermitian_eigenvalues(&skew)?,
        })
    }

    /// `|(B - nu) - (B - nu)^†|`.
    pub fn norm_at(&self, nu: C64) -> f64 {
        let shift = 2.0 * nu.im;
        self.eigs
            .iter()
            .fold(0.0_f64, |acc, &e| acc.max((e + shift).abs()))
    }
}

pub fn linear_radial_rhs(dim_l: usize, skew_norm: f64, departure: f64) -> f64 {
    (dim_l as f64).sqrt() * skew_norm + departure
}

pub fn radial_quadratic_rhs(commutator_sum: f64, f_norm: f64) -> f64 {
    (commutator_sum + f_norm).sqrt()
}

pub fn linear_radial_from_parts(linear: f64, radial: f64, rhs: f64, scale: f64) -> BoundReport {
    BoundReport::new(BoundKind::LinearRadial, (linear - radial).abs(), rhs, scale)
}

pub fn radial_quadratic_from_parts(radial: f64, gap_q: f64, rhs: f64, scale: f64) -> BoundReport {
    BoundReport::new(BoundKind::RadialQuadratic, (radial - gap_q).abs(), rhs, scale)
}

pub fn linear_quadratic_from_parts(
    linear: f64,
    gap_q: f64,
    rhs_linear_radial: f64,
    rhs_radial_quadratic: f64,
    scale: f64,
) -> BoundReport {
    BoundReport::new(
        BoundKind::LinearQuadratic,
        (linear - gap_q).abs(),
        rhs_linear_radial + rhs_radial_quadratic,
        scale,
    )
}

/// All ingredients of the three gap comparisons at one probe site.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapComparison {
    pub linear: f64,
    pub radial: f64,
    pub quadratic: QuadraticGaps,
    pub skew_norm: f64,
    pub departure_schur: f64,
    pub departure_frobenius: f64,
    pub commutator_sum: f64,
    pub f_norm: f64,
    pub dim_l: usize,
    /// `|L|_F`, used as the tolerance scale.
    pub scale: f64,
}

impl GapComparison {
    pub fn evaluate(t: &MatrixTuple, site: &ProbeSite, rep: &CliffordRep) -> Result<Self> {
        let l = nh_localizer(t, site, rep)?;
        let sf = schur(&l, false)?;
        let dep = departure_of(&sf)?;
        let b = &t.shifted_nonherm(site)[0];
        let skew = (b - &adjoint(b)).mapv(|z| z * I);
        Ok(GapComparison {
            linear: min_abs_real(&sf.eigenvalues()),
            radial: sigma_min(&l)?,
            quadratic: quadratic_gaps(t, site)?,
            skew_norm: hermitian_op_norm(&skew)?,
            departure_schur: dep.schur,
            departure_frobenius: dep.frobenius,
            commutator_sum: commutator_sum_norm(t)?,
            f_norm: f_term_norm(t, site, rep)?,
            dim_l: l.nrows(),
            scale: frobenius_norm(&l),
        })
    }

    pub fn linear_radial_rhs(&self) -> f64 {
        linear_radial_rhs(self.dim_l, self.skew_norm, self.departure_schur)
    }

    pub fn radial_quadratic_rhs(&self) -> f64 {
        radial_quadratic_rhs(self.commutator_sum, self.f_norm)
    }

    pub fn linear_radial(&self) -> BoundReport {
        linear_radial_from_parts(self.linear, self.radial, self.linear_radial_rhs(), self.scale)
    }

    pub fn radial_quadratic(&self) -> BoundReport {
        radial_quadratic_from_parts(
            self.radial,
            self.quadratic.q,
            self.radial_quadratic_rhs(),
            self.scale,
        )
    }

    pub fn linear_quadratic(&self) -> BoundReport {
        linear_quadratic_from_parts(
            self.linear,
            self.quadratic.q,
            self.linear_radial_rhs(),
            self.radial_quadratic_rhs(),
            self.scale,
        )
    }

    pub fn reports(&self) -> [BoundReport; 3] {
        [
            self.linear_radial(),
            self.radial_quadratic(),
            self.linear_quadratic(),
        ]
    }
}

/// `|linear - radial| <= sqrt(N) |(B - nu) - (B - nu)^†| + Δ(L)`, with `N`
/// the dimension of `L` and `Δ(L)` the Schur departure from normality.
pub fn check_linear_vs_radial(
    t: &MatrixTuple,
    site: &ProbeSite,
    rep: &CliffordRep,
) -> Result<BoundReport> {
    Ok(GapComparison::evaluate(t, site, rep)?.linear_radial())
}

/// `|radial - mu_Q| <= sqrt(sum_{i<j} |[A_i, A_j]| + |F|)`.
pub fn check_radial_vs_quadratic(
    t: &MatrixTuple,
    site: &ProbeSite,
    rep: &CliffordRep,
) -> Result<BoundReport> {
    Ok(GapComparison::evaluate(t, site, rep)?.radial_quadratic())
}

/// `|linear - mu_Q|` against the sum of the two right-hand sides above.
pub fn check_linear_vs_quadratic(
    t: &MatrixTuple,
    site: &ProbeSite,
    rep: &CliffordRep,
) -> Result<BoundReport> {
    Ok(GapComparison::evaluate(t, site, rep)?.linear_quadratic())
}

/// Outcome of the locality check. The sandwich reports are present only
/// for the gaps whose hypothesis `K < 1` holds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalityReport {
    /// `|Z^-1 (sum (B_j - nu_j)^† C_j + C_j^† (B_j - nu_j) + C_j^† C_j) Z^-1|`.
    pub k_rq: f64,
    /// The same with `(B_j - nu_j) C_j^† + C_j (B_j - nu_j)^† + C_j C_j^†`.
    pub k_lq: f64,
    /// `max(k_rq, k_lq)`, governing the combined gap.
    pub k_q: f64,
    /// Condition number of `Z = sqrt(sum (A_i - lambda_i)^2)`.
    pub cond_z: f64,
    pub before: QuadraticGaps,
    pub after: QuadraticGaps,
    pub reports: Vec<BoundReport>,
}

impl LocalityReport {
    pub fn hypothesis_met_rq(&self) -> bool {
        self.k_rq < 1.0
    }

    pub fn hypothesis_met_q(&self) -> bool {
        self.k_q < 1.0
    }

    pub fn all_satisfied(&self) -> bool {
        self.reports.iter().all(|r| r.satisfied)
    }
}

/// `Z^-1` and `cond(Z)` for `Z^2 = sum (A_i - lambda_i)^2` of commuting
/// Hermitian `A_i`.
fn inverse_root(t: &MatrixTuple, site: &ProbeSite) -> Result<(CMatrix, f64)> {
    let n = t.dim();
    let shifted = t.shifted_herm(site);
    let mut z2 = CMatrix::zeros((n, n));
    for a in &shifted {
        z2 = z2 + a.dot(a);
    }
    let diagonal = shifted.iter().all(|a| {
        a.indexed_iter()
            .all(|((i, j), z)| i == j || *z == C64::new(0.0, 0.0))
    });
    let (inv, smin, smax) = if diagonal {
        let d: Vec<f64> = (0..n).map(|k| z2[[k, k]].re).collect();
        let smin = d.iter().copied().fold(f64::INFINITY, f64::min);
        let smax = d.iter().copied().fold(0.0_f64, f64::max);
        let inv = CMatrix::from_diag(&d.iter().map(|&x| C64::new(x.sqrt().recip(), 0.0)).collect::<CVector>());
        (inv, smin, smax)
    } else {
        let (w, v) = hermitian_eigh(&z2)?;
        let smin = w.iter().copied().fold(f64::INFINITY, f64::min);
        let smax = w.iter().copied().fold(0.0_f64, f64::max);
        let scaled = CMatrix::from_shape_fn((n, n), |(i, j)| {
            v[[i, j]] * C64::new(w[j].max(f64::MIN_POSITIVE).sqrt().recip(), 0.0)
        });
        (scaled.dot(&adjoint(&v)), smin, smax)
    };
    if smin.is_nan() || smin <= 1e-14 * smax.max(1.0) {
        return Err(Error::input(
            "sum of squared shifted positions is singular at this probe site; shift the site",
        ));
    }
    Ok((inv, (smax / smin).sqrt()))
}

fn sandwich(
    lower: BoundKind,
    upper: BoundKind,
    k: f64,
    before: f64,
    after: f64,
) -> [BoundReport; 2] {
    let scale = before.max(after);
    [
        BoundReport::new(lower, (1.0 - k).sqrt() * before, after, scale),
        BoundReport::new(upper, after, (1.0 + k).sqrt() * before, scale),
    ]
}

/// Perturb each `B_j` by `C_j` and check
/// `sqrt(1 - K) mu <= mu' <= sqrt(1 + K) mu` for the right quadratic gap
/// and for the combined gap, whenever the respective `K < 1`.
pub fn check_locality(
    t: &MatrixTuple,
    site: &ProbeSite,
    c: &[CMatrix],
) -> Result<LocalityReport> {
    t.check_site(site)?;
    if c.len() != t.d2() {
        return Err(Error::input(format!(
            "need one perturbation per non-Hermitian matrix: got {}, expected {}",
            c.len(),
            t.d2()
        )));
    }
    if t.d1() == 0 {
        return Err(Error::input("locality needs at least one Hermitian matrix"));
    }
    let n = t.dim();
    if c.iter().any(|m| m.dim() != (n, n)) {
        return Err(Error::input("perturbation dimension mismatch"));
    }
    for i in 0..t.d1() {
        for k in i + 1..t.d1() {
            let (a, b) = (&t.herm[i], &t.herm[k]);
            let comm = a.dot(b) - b.dot(a);
            let scale = max_abs_entry(a.view()) * max_abs_entry(b.view());
            if max_abs_entry(comm.view()) > 1e-12 * scale.max(1.0) {
                return Err(Error::input(format!(
                    "A_{} and A_{} do not commute",
                    i + 1,
                    k + 1
                )));
            }
        }
    }
    let (zinv, cond_z) = inverse_root(t, site)?;
    let mut e_r = CMatrix::zeros((n, n));
    let mut e_l = CMatrix::zeros((n, n));
    for (b, cj) in t.shifted_nonherm(site).iter().zip(c) {
        let (bd, cd) = (adjoint(b), adjoint(cj));
        e_r = e_r + bd.dot(cj) + cd.dot(b) + cd.dot(cj);
        e_l = e_l + b.dot(&cd) + cj.dot(&bd) + cj.dot(&cd);
    }
    let k_rq = hermitian_op_norm(&zinv.dot(&e_r).dot(&zinv))?;
    let k_lq = hermitian_op_norm(&zinv.dot(&e_l).dot(&zinv))?;
    let k_q = k_rq.max(k_lq);
    let perturbed = MatrixTuple {
        herm: t.herm.clone(),
        nonherm: t.nonherm.iter().zip(c).map(|(b, cj)| b + cj).collect(),
    };
    let before = quadratic_gaps(t, site)?;
    let after = quadratic_gaps(&perturbed, site)?;
    let mut reports = Vec::new();
    if k_rq < 1.0 {
        reports.extend(sandwich(
            BoundKind::LocalityRqLower,
            BoundKind::LocalityRqUpper,
            k_rq,
            before.rq,
            after.rq,
        ));
    }
    if k_q < 1.0 {
        reports.extend(sandwich(
            BoundKind::LocalityQLower,
            BoundKind::LocalityQUpper,
            k_q,
            before.q,
            after.q,
        ));
    }
    Ok(LocalityReport {
        k_rq,
        k_lq,
        k_q,
        cond_z,
        before,
        after,
        reports,
    })
}
