//! Clifford representations for the non-Hermitian spectral localizer.
//!
//! Generators are stored exactly, with Gaussian-integer entries, so every
//! algebraic relation is checked with zero tolerance.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{CMatrix, C64};

/// Largest number of Hermitian generators `build_rep` will construct.
pub const MAX_GENERATORS: usize = 11;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct GaussInt {
    pub re: i64,
    pub im: i64,
}

impl GaussInt {
    pub const ZERO: GaussInt = GaussInt { re: 0, im: 0 };
    pub const ONE: GaussInt = GaussInt { re: 1, im: 0 };
    pub const I: GaussInt = GaussInt { re: 0, im: 1 };

    pub const fn new(re: i64, im: i64) -> Self {
        GaussInt { re, im }
    }

    pub fn conj(self) -> Self {
        GaussInt::new(self.re, -self.im)
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn to_c64(self) -> C64 {
        C64::new(self.re as f64, self.im as f64)
    }
}

impl Add for GaussInt {
    type Output = GaussInt;
    fn add(self, o: GaussInt) -> GaussInt {
        GaussInt::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for GaussInt {
    type Output = GaussInt;
    fn sub(self, o: GaussInt) -> GaussInt {
        GaussInt::new(self.re - o.re, self.im - o.im)
    }
}

impl Neg for GaussInt {
    type Output = GaussInt;
    fn neg(self) -> GaussInt {
        GaussInt::new(-self.re, -self.im)
    }
}

impl Mul for GaussInt {
    type Output = GaussInt;
    fn mul(self, o: GaussInt) -> GaussInt {
        GaussInt::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

/// Square matrix over the Gaussian integers, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ExactMatrix {
    dim: usize,
    entries: Vec<GaussInt>,
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| {
                    let z = self.get(r, c);
                    match (z.re, z.im) {
                        (re, 0) => format!("{re}"),
                        (0, im) => format!("{im}i"),
                        (re, im) => format!("{re}{im:+}i"),
                    }
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ExactMatrix {
    pub fn zeros(dim: usize) -> Self {
        ExactMatrix {
            dim,
            entries: vec![GaussInt::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m.set(k, k, GaussInt::ONE);
        }
        m
    }

    pub fn from_rows(rows: &[&[GaussInt]]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::input("exact matrix rows must form a square"));
        }
        Ok(ExactMatrix {
            dim,
            entries: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        })
    }

    pub fn pauli_x() -> Self {
        let (o, l) = (GaussInt::ZERO, GaussInt::ONE);
        Self::from_rows(&[&[o, l], &[l, o]]).unwrap()
    }

    pub fn pauli_y() -> Self {
        let (o, i) = (GaussInt::ZERO, GaussInt::I);
        Self::from_rows(&[&[o, -i], &[i, o]]).unwrap()
    }

    pub fn pauli_z() -> Self {
        let (o, l) = (GaussInt::ZERO, GaussInt::ONE);
        Self::from_rows(&[&[l, o], &[o, -l]]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> GaussInt {
        self.entries[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: GaussInt) {
        self.entries[r * self.dim + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|z| z.is_zero())
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    /// Kronecker product with `self` as the coarse (outer) factor.
    pub fn kron(&self, other: &ExactMatrix) -> Self {
        let n = other.dim;
        let mut out = Self::zeros(self.dim * n);
        for p in 0..self.dim {
            for q in 0..self.dim {
                let w = self.get(p, q);
                if w.is_zero() {
                    continue;
                }
                for i in 0..n {
                    for j in 0..n {
                        out.set(p * n + i, q * n + j, w * other.get(i, j));
                    }
                }
            }
        }
        out
    }

    /// Conjugate by a permutation: `out[perm[i], perm[j]] = self[i, j]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(perm[i], perm[j], self.get(i, j));
            }
        }
        out
    }

    pub fn to_complex(&self) -> CMatrix {
        CMatrix::from_shape_fn((self.dim, self.dim), |(r, c)| self.get(r, c).to_c64())
    }

    fn zip_with(&self, o: &ExactMatrix, f: impl Fn(GaussInt, GaussInt) -> GaussInt) -> Self {
        assert_eq!(self.dim, o.dim, "dimension mismatch");
        ExactMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&o.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl Add for &ExactMatrix {
    type Output = ExactMatrix;
    fn add(self, o: &ExactMatrix) -> ExactMatrix {
        self.zip_with(o, |a, b| a + b)
    }
}

impl Sub for &ExactMatrix {
    type Output = ExactMatrix;
    fn sub(self, o: &ExactMatrix) -> ExactMatrix {
        self.zip_with(o, |a, b| a - b)
    }
}

impl Mul for &ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, o: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.dim, o.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = ExactMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let v = out.get(r, c) + a * o.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        out
    }
}

/// `d` anticommuting Hermitian involutions of size `2m`, together with the
/// split `diag(I_m, 0_m)` / `diag(0_m, -I_m)` of the diagonal generator
/// `J = diag(I_m, -I_m)` they all anticommute with.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CliffordRep {
    pub d: usize,
    pub m: usize,
    pub gammas: Vec<ExactMatrix>,
    pub diag_plus: ExactMatrix,
    pub diag_minus: ExactMatrix,
}

impl CliffordRep {
    /// Wrap arbitrary generators; the split blocks are the canonical
    /// `diag(I_m, 0)` and `diag(0, -I_m)`. No relation is checked here, see
    /// [`verify_rep`].
    pub fn from_parts(gammas: Vec<ExactMatrix>, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::input("half-block dimension m must be positive"));
        }
        if let Some(g) = gammas.iter().find(|g| g.dim() != 2 * m) {
            return Err(Error::input(format!(
                "generator of size {} does not match 2m = {}",
                g.dim(),
                2 * m
            )));
        }
        let mut diag_plus = ExactMatrix::zeros(2 * m);
        let mut diag_minus = ExactMatrix::zeros(2 * m);
        for k in 0..m {
            diag_plus.set(k, k, GaussInt::ONE);
            diag_minus.set(m + k, m + k, -GaussInt::ONE);
        }
        Ok(CliffordRep {
            d: gammas.len(),
            m,
            gammas,
            diag_plus,
            diag_minus,
        })
    }

    pub fn size(&self) -> usize {
        2 * self.m
    }

    /// `J = diag(I_m, -I_m)`.
    pub fn diagonal(&self) -> ExactMatrix {
        &self.diag_plus + &self.diag_minus
    }

    /// The `d` generators followed by `J`: a Clifford family of `d + 1`
    /// elements usable for a Hermitian localizer.
    pub fn full_generators(&self) -> Vec<ExactMatrix> {
        let mut g = self.gammas.clone();
        g.push(self.diagonal());
        g
    }
}

/// Half-block dimension `m = 2^floor((d-1)/2)` for `d` Hermitian generators.
pub fn half_block_dim(d: usize) -> usize {
    1 << ((d.max(1) - 1) / 2)
}

/// The recursive odd-size family: `{[1]}` for one generator, and from a
/// family `{g_i}` of size `k` with blocks of size `s`, the family of size
/// `k + 2` is `{g_i ⊗ σx, I_s ⊗ σy, I_s ⊗ σz}` (Pauli factor inner).
pub fn odd_generators(count: usize) -> Result<Vec<ExactMatrix>> {
    if count == 0 || count.is_multiple_of(2) {
        return Err(Error::input(format!(
            "odd generator family needs an odd count, got {count}"
        )));
    }
    let mut family = vec![ExactMatrix::identity(1)];
    while family.len() < count {
        let s = family[0].dim();
        let id = ExactMatrix::identity(s);
        let mut next: Vec<ExactMatrix> = family
            .iter()
            .map(|g| g.kron(&ExactMatrix::pauli_x()))
            .collect();
        next.push(id.kron(&ExactMatrix::pauli_y()));
        next.push(id.kron(&ExactMatrix::pauli_z()));
        family = next;
    }
    Ok(family)
}

/// Representation for `d` Hermitian matrices.
///
/// Takes the odd family with `d + 2` (odd `d`) or `d + 1` (even `d`)
/// elements, whose last member is `I_m ⊗ σz`, reorders the basis so that
/// member becomes `diag(I_m, -I_m)`, and keeps the first `d` of the others
/// (for odd `d` this drops `I_m ⊗ σy`).
pub fn build_rep(d: usize) -> Result<CliffordRep> {
    if d == 0 {
        return Err(Error::input("need at least one Hermitian generator (d >= 1)"));
    }
    if d > MAX_GENERATORS {
        return Err(Error::input(format!(
            "d = {d} exceeds the supported maximum {MAX_GENERATORS}"
        )));
    }
    let count = if d % 2 == 1 { d + 2 } else { d + 1 };
    let family = odd_generators(count)?;
    let size = family[0].dim();
    let m = size / 2;
    debug_assert_eq!(m, half_block_dim(d));
    // basis index 2a + s (Pauli factor inner) -> s*m + a (Pauli factor outer)
    let perm: Vec<usize> = (0..size).map(|i| (i % 2) * m + i / 2).collect();
    let gammas = family[..d].iter().map(|g| g.permuted(&perm)).collect();
    CliffordRep::from_parts(gammas, m)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    WrongSize { index: usize, size: usize },
    NotHermitian { index: usize },
    NotInvolution { index: usize },
    NotAnticommuting { i: usize, k: usize },
    /// Generator `index` fails to anticommute with `diag_plus + diag_minus`.
    DiagonalSplit { index: usize },
    /// `diag_plus`/`diag_minus` are not `diag(I_m, 0)`/`diag(0, -I_m)`.
    MalformedSplit,
}

/// Every violated relation; empty for a valid representation.
pub fn verify_rep(rep: &CliffordRep) -> Vec<Violation> {
    let size = rep.size();
    let mut out = Vec::new();
    let expected = CliffordRep::from_parts(Vec::new(), rep.m.max(1));
    match expected {
        Ok(e) if e.diag_plus == rep.diag_plus && e.diag_minus == rep.diag_minus => {}
        _ => out.push(Violation::MalformedSplit),
    }
    let id = ExactMatrix::identity(size);
    let j = rep.diagonal();
    let sized: Vec<bool> = rep.gammas.iter().map(|g| g.dim() == size).collect();
    for (index, g) in rep.gammas.iter().enumerate() {
        if !sized[index] {
            out.push(Violation::WrongSize {
                index,
                size: g.dim(),
            });
            continue;
        }
        if &g.adjoint() != g {
            out.push(Violation::NotHermitian { index });
        }
        if g * g != id {
            out.push(Violation::NotInvolution { index });
        }
        if j.dim() == size && !(&(g * &j) + &(&j * g)).is_zero() {
            out.push(Violation::DiagonalSplit { index });
        }
    }
    for i in 0..rep.gammas.len() {
        for k in i + 1..rep.gammas.len() {
            if !(sized[i] && sized[k]) {
                continue;
            }
            let (a, b) = (&rep.gammas[i], &rep.gammas[k]);
            if !(&(a * b) + &(b * a)).is_zero() {
                out.push(Violation::NotAnticommuting { i, k });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sx() -> ExactMatrix {
        ExactMatrix::pauli_x()
    }
    fn sy() -> ExactMatrix {
        ExactMatrix::pauli_y()
    }
    fn sz() -> ExactMatrix {
        ExactMatrix::pauli_z()
    }

    #[test]
    fn one_generator_is_sigma_x() {
        let rep = build_rep(1).unwrap();
        assert_eq!(rep.m, 1);
        assert_eq!(rep.gammas, vec![sx()]);
        assert_eq!(rep.diagonal(), sz());
    }

    #[test]
    fn two_generators_are_sigma_x_and_y() {
        let rep = build_rep(2).unwrap();
        assert_eq!(rep.m, 1);
        assert_eq!(rep.gammas, vec![sx(), sy()]);
    }

    #[test]
    fn three_element_family_is_the_paulis() {
        assert_eq!(odd_generators(3).unwrap(), vec![sx(), sy(), sz()]);
    }

    #[test]
    fn five_element_family_matches_tensor_construction() {
        let id2 = ExactMatrix::identity(2);
        let want = vec![
            sx().kron(&sx()),
            sy().kron(&sx()),
            sz().kron(&sx()),
            id2.kron(&sy()),
            id2.kron(&sz()),
        ];
        assert_eq!(odd_generators(5).unwrap(), want);
    }

    #[test]
    fn sizes_follow_half_block_rule() {
        for d in 1..=MAX_GENERATORS {
            let rep = build_rep(d).unwrap();
            assert_eq!(rep.m, half_block_dim(d), "d={d}");
            assert_eq!(rep.gammas.len(), d);
            assert!(rep.gammas.iter().all(|g| g.dim() == 2 * rep.m));
        }
        assert_eq!(
            (1..=6).map(half_block_dim).collect::<Vec<_>>(),
            vec![1, 1, 2, 2, 4, 4]
        );
    }

    #[test]
    fn built_reps_verify_clean() {
        for d in 1..=7 {
            assert_eq!(verify_rep(&build_rep(d).unwrap()), vec![], "d={d}");
        }
    }

    #[test]
    fn entries_are_units_or_zero() {
        let allowed = [
            GaussInt::ZERO,
            GaussInt::ONE,
            -GaussInt::ONE,
            GaussInt::I,
            -GaussInt::I,
        ];
        for d in 1..=7 {
            for g in build_rep(d).unwrap().gammas {
                for r in 0..g.dim() {
                    for c in 0..g.dim() {
                        assert!(allowed.contains(&g.get(r, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn repeated_generator_fails_anticommutation() {
        let rep = CliffordRep::from_parts(vec![sx(), sx()], 1).unwrap();
        let v = verify_rep(&rep);
        assert!(v.contains(&Violation::NotAnticommuting { i: 0, k: 1 }));
    }

    #[test]
    fn sigma_z_generator_fails_diagonal_split() {
        let rep = CliffordRep::from_parts(vec![sx(), sz()], 1).unwrap();
        let v = verify_rep(&rep);
        assert_eq!(v, vec![Violation::DiagonalSplit { index: 1 }]);
    }

    #[test]
    fn non_involution_and_non_hermitian_are_reported() {
        let two = ExactMatrix::from_rows(&[
            &[GaussInt::new(2, 0), GaussInt::ZERO],
            &[GaussInt::ZERO, GaussInt::ZERO],
        ])
        .unwrap();
        let skew = ExactMatrix::from_rows(&[
            &[GaussInt::ZERO, GaussInt::ONE],
            &[-GaussInt::ONE, GaussInt::ZERO],
        ])
        .unwrap();
        let v = verify_rep(&CliffordRep::from_parts(vec![two, skew], 1).unwrap());
        assert!(v.contains(&Violation::NotInvolution { index: 0 }));
        assert!(v.contains(&Violation::NotHermitian { index: 1 }));
    }

    #[test]
    fn zero_generators_rejected() {
        assert!(build_rep(0).is_err());
        assert!(build_rep(MAX_GENERATORS + 1).is_err());
        assert!(odd_generators(4).is_err());
    }
}
