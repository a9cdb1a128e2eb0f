//! The two-level system worked by hand at a general energy `E`.

use nhpseudo::kernels::{max_abs_entry, sigma_min, CMatrix, C64};
use nhpseudo::localizer::nh_localizer;
use nhpseudo::models::{build_tls, exceptional_point_locus, tls_eigenvalues, TwoLevelParams};
use nhpseudo::quadratic::{build_quadratic, quadratic_gaps};
use nhpseudo::{build_rep, ProbeSite};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

const ENERGIES: [(f64, f64); 5] = [(0.0, 1.0), (0.3, -0.7), (-1.5, 2.0), (2.0, 0.0), (0.0, 0.0)];

#[test]
fn localizer_entries_at_zero_position() {
    let t = build_tls(&TwoLevelParams::default()).unwrap();
    let rep = build_rep(1).unwrap();
    for (re, im) in ENERGIES {
        let e = c(re, im);
        let l = nh_localizer(&t, &ProbeSite::new(vec![0.0], vec![e]), &rep).unwrap();
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let want = CMatrix::from_shape_vec(
            (4, 4),
            vec![
                c(0.0, 2.0) - e, one, -one, zero,
                one, -e, zero, one,
                -one, zero, c(0.0, 2.0) + e.conj(), -one,
                zero, one, -one, e.conj(),
            ],
        )
        .unwrap();
        assert!(max_abs_entry((l - want).view()) < 1e-15, "E = {e}");
    }
}

#[test]
fn quadratic_blocks_at_zero_position() {
    let t = build_tls(&TwoLevelParams::default()).unwrap();
    for (re, im) in ENERGIES {
        let e = c(re, im);
        let ops = build_quadratic(&t, &ProbeSite::new(vec![0.0], vec![e])).unwrap();
        let n2 = e.norm_sqr();
        let rq = CMatrix::from_shape_vec(
            (2, 2),
            vec![c(n2 + 6.0 - 4.0 * im, 0.0), c(-2.0 * re, -2.0), c(-2.0 * re, 2.0), c(2.0 + n2, 0.0)],
        )
        .unwrap();
        let lq = CMatrix::from_shape_vec(
            (2, 2),
            vec![c(n2 + 6.0 - 4.0 * im, 0.0), c(-2.0 * re, 2.0), c(-2.0 * re, -2.0), c(2.0 + n2, 0.0)],
        )
        .unwrap();
        assert!(max_abs_entry((&ops.rq - &rq).view()) < 1e-14, "E = {e}");
        assert!(max_abs_entry((&ops.lq - &lq).view()) < 1e-14, "E = {e}");
    }
}

#[test]
fn exceptional_point_is_detected() {
    let p = TwoLevelParams::default();
    let [a, b] = tls_eigenvalues(&p);
    assert!((a - c(0.0, 1.0)).norm() < 1e-7 && (b - c(0.0, 1.0)).norm() < 1e-7);
    assert_eq!(exceptional_point_locus(&p).unwrap(), vec![1.0, -1.0]);
    let t = build_tls(&p).unwrap();
    let h = &t.nonherm[0];
    let shifted = h - &CMatrix::from_diag_elem(2, c(0.0, 1.0));
    assert!(sigma_min(&shifted).unwrap() < 1e-12);
    let q = quadratic_gaps(&t, &ProbeSite::new(vec![0.0], vec![c(0.0, 1.0)])).unwrap();
    assert!((q.rq - 1.0).abs() < 1e-10 && (q.lq - 1.0).abs() < 1e-10);
}
