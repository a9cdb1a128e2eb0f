//! Seeded fuzzing of the gap-comparison and locality bounds.

use std::fmt::Write as _;

use rand::Rng;

use crate::bounds::{check_locality, BoundReport, GapComparison};
use crate::clifford::build_rep;
use crate::error::{Error, Result};
use crate::kernels::{CMatrix, C64};
use crate::localizer::{MatrixTuple, ProbeSite};
use crate::models::{build_tls, TwoLevelParams};
use crate::random::{complex_normal, normal, random_hermitian, random_matrix, random_tuple, rng, Rand};

/// One bound evaluation with a label identifying the instance.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteEntry {
    pub label: String,
    pub report: BoundReport,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOutcome {
    pub entries: Vec<SuiteEntry>,
    /// Locality instances where `K >= 1` for both gaps, so nothing was asserted.
    pub hypothesis_not_met: usize,
    pub violations: usize,
    /// Human-readable report; identical for identical arguments.
    pub text: String,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn draw_instance(r: &mut Rand, hermitian: bool) -> (MatrixTuple, ProbeSite) {
    let n = r.random_range(2..=6);
    let d1 = r.random_range(1..=3);
    let mut t = random_tuple(r, n, d1, 1);
    if hermitian {
        t.nonherm[0] = random_hermitian(r, n);
    }
    let lambda = (0..d1).map(|_| normal(r)).collect();
    let nu = if hermitian {
        C64::new(normal(r), 0.0)
    } else {
        complex_normal(r)
    };
    (t, ProbeSite::new(lambda, vec![nu]))
}

/// Commuting diagonal positions probed at the origin, with `B` perturbed
/// on the site farthest from it.
fn draw_locality(r: &mut Rand, hermitian: bool) -> (MatrixTuple, ProbeSite, CMatrix) {
    let n = r.random_range(4..=8);
    let d1 = r.random_range(1..=2);
    let herm: Vec<CMatrix> = (0..d1)
        .map(|_| {
            let d: Vec<C64> = (0..n).map(|_| C64::new(3.0 * normal(r), 0.0)).collect();
            CMatrix::from_diag(&ndarray::Array1::from(d))
        })
        .collect();
    let b = if hermitian {
        random_hermitian(r, n)
    } else {
        random_matrix(r, n)
    };
    let far = (0..n)
        .max_by(|&i, &j| {
            let zi: f64 = herm.iter().map(|a| a[[i, i]].norm_sqr()).sum();
            let zj: f64 = herm.iter().map(|a| a[[j, j]].norm_sqr()).sum();
            zi.total_cmp(&zj)
        })
        .unwrap();
    let mut c = CMatrix::zeros((n, n));
    c[[far, far]] = if hermitian {
        C64::new(0.2 * normal(r), 0.0)
    } else {
        complex_normal(r) * 0.2
    };
    let site = ProbeSite::new(vec![0.0; d1], vec![C64::new(0.0, 0.0)]);
    (MatrixTuple { herm, nonherm: vec![b] }, site, c)
}

fn line(out: &mut String, label: &str, rep: &BoundReport) {
    let _ = writeln!(
        out,
        "{label} {} lhs={:.12e} rhs={:.12e} slack={:.12e} {}",
        rep.kind.name(),
        rep.lhs,
        rep.rhs,
        rep.slack,
        if rep.satisfied { "ok" } else { "VIOLATION" }
    );
}

/// Run the three gap-comparison bounds on `instances` random tuples and on
/// `instances` random two-level probe sites, then the locality sandwich on
/// `instances` random diagonal instances. With `hermitian` every `B` is
/// Hermitian and every `nu` real.
pub fn check_suite(seed: u64, instances: usize, hermitian: bool) -> Result<SuiteOutcome> {
    if instances == 0 {
        return Err(Error::input("instances must be at least 1"));
    }
    let mut r = rng(seed);
    let mut entries = Vec::new();
    let mut text = String::new();
    let _ = writeln!(
        text,
        "check suite seed={seed} instances={instances} hermitian={hermitian}"
    );

    for i in 0..instances {
        let (t, site) = draw_instance(&mut r, hermitian);
        let rep = build_rep(t.d1())?;
        let label = format!("random[{i}] n={} d1={}", t.dim(), t.d1());
        for report in GapComparison::evaluate(&t, &site, &rep)?.reports() {
            line(&mut text, &label, &report);
            entries.push(SuiteEntry {
                label: label.clone(),
                report,
            });
        }
    }

    let tls = build_tls(&TwoLevelParams::default())?;
    let tls_rep = build_rep(1)?;
    for i in 0..instances {
        let x = r.random_range(-2.0..2.0);
        let nu = C64::new(r.random_range(-3.0..3.0), r.random_range(-1.0..3.0));
        let site = ProbeSite::new(vec![x], vec![if hermitian { C64::new(nu.re, 0.0) } else { nu }]);
        let label = format!("tls[{i}]");
        for report in GapComparison::evaluate(&tls, &site, &tls_rep)?.reports() {
            line(&mut text, &label, &report);
            entries.push(SuiteEntry {
                label: label.clone(),
                report,
            });
        }
    }

    let mut hypothesis_not_met = 0;
    for i in 0..instances {
        let (t, site, c) = draw_locality(&mut r, hermitian);
        let loc = check_locality(&t, &site, std::slice::from_ref(&c))?;
        let label = format!("locality[{i}] n={} d1={}", t.dim(), t.d1());
        let _ = writeln!(
            text,
            "{label} k_rq={:.12e} k_q={:.12e} cond_z={:.12e}",
            loc.k_rq, loc.k_q, loc.cond_z
        );
        if !loc.hypothesis_met_rq() && !loc.hypothesis_met_q() {
            hypothesis_not_met += 1;
            let _ = writeln!(text, "{label} hypothesis not met");
        }
        for report in loc.reports {
            line(&mut text, &label, &report);
            entries.push(SuiteEntry {
                label: label.clone(),
                report,
            });
        }
    }

    let violations = entries.iter().filter(|e| !e.report.satisfied).count();
    let _ = writeln!(
        text,
        "checks={} violations={violations} locality_hypothesis_not_met={hypothesis_not_met}",
        entries.len()
    );
    Ok(SuiteOutcome {
        entries,
        hypothesis_not_met,
        violations,
        text,
    })
}
