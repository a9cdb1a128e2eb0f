//! Dense spectral primitives: eigenvalues, smallest singular values, the
//! complex Schur form, departure from normality and Hermiticity tests.
//!
//! Everything here is a pure function of its input. The heavy lifting is
//! done by LAPACK (through `ndarray-linalg`, plus a direct `zgees` call for
//! the Schur form, which `ndarray-linalg` does not expose).

use std::cmp::Ordering;
use std::os::raw::{c_char, c_int};

use ndarray::{s, Array1, Array2, ArrayView2, ShapeBuilder};
use ndarray_linalg::{EigValsh, Eigh, SVD, UPLO};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub type C64 = Complex64;
/// Dense complex matrix, indexed `[row, col]`.
pub type CMatrix = Array2<C64>;
pub type CVector = Array1<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

extern "C" {
    fn openblas_set_num_threads(num_threads: c_int);
}

/// Pin the BLAS backend to `n` threads. Sweeps parallelise over probe sites
/// and call this with 1 so results do not depend on the thread count.
pub fn set_blas_threads(n: usize) {
    // SAFETY: plain setter exported by libopenblas.
    unsafe { openblas_set_num_threads(n.max(1) as c_int) }
}

pub fn ensure_square(m: &CMatrix, what: &str) -> Result<usize> {
    let (r, c) = m.dim();
    if r != c {
        return Err(Error::input(format!("{what} must be square, got {r}x{c}")));
    }
    Ok(r)
}

pub fn ensure_finite(m: &CMatrix, what: &str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::input(format!("{what} has non-finite entries")))
    }
}

fn ensure_square_finite(m: &CMatrix, what: &str) -> Result<usize> {
    let n = ensure_square(m, what)?;
    ensure_finite(m, what)?;
    Ok(n)
}

pub fn identity(n: usize) -> CMatrix {
    Array2::from_diag_elem(n, ONE)
}

pub fn adjoint(m: &CMatrix) -> CMatrix {
    m.t().mapv(|z| z.conj())
}

/// `m - z I`.
pub fn shifted(m: &CMatrix, z: C64) -> CMatrix {
    let mut out = m.clone();
    for k in 0..out.nrows().min(out.ncols()) {
        out[[k, k]] -= z;
    }
    out
}

/// Kronecker product; `a` indexes the coarse blocks.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = CMatrix::zeros((ar * br, ac * bc));
    for p in 0..ar {
        for q in 0..ac {
            let w = a[[p, q]];
            if w == ZERO {
                continue;
            }
            out.slice_mut(s![p * br..(p + 1) * br, q * bc..(q + 1) * bc])
                .zip_mut_with(b, |o, &x| *o = w * x);
        }
    }
    out
}

pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vector_norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Singular values in descending order. Works for rectangular input.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    ensure_finite(m, "matrix")?;
    let (_, s, _) = m.svd(false, false)?;
    Ok(s.to_vec())
}

/// Spectral (operator 2-) norm.
pub fn op_norm(m: &CMatrix) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

/// Operator norm of a Hermitian matrix via its eigenvalues.
pub fn hermitian_op_norm(m: &CMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?
        .into_iter()
        .fold(0.0_f64, |acc, x| acc.max(x.abs())))
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (as columns) of a
/// Hermitian matrix. The input is copied to column-major order first, since
/// the backend returns conjugated eigenvectors for row-major input.
pub fn hermitian_eigh(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = ensure_square_finite(m, "Hermitian matrix")?;
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros((0, 0))));
    }
    let mut f = CMatrix::zeros((n, n).f());
    f.assign(m);
    let (w, v) = f.eigh(UPLO::Upper)?;
    Ok((w.to_vec(), v))
}

/// Eigenvalues of a Hermitian matrix in ascending order. Only the upper
/// triangle is read.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    let n = ensure_square_finite(m, "Hermitian matrix")?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let w = m.eigvalsh(UPLO::Upper)?;
    Ok(w.to_vec())
}

/// Smallest singular value. For a tall matrix (rows >= cols) this is
/// `min |Mv|` over unit `v`.
pub fn sigma_min(m: &CMatrix) -> Result<f64> {
    let (r, c) = m.dim();
    if r < c {
        return Err(Error::input(format!(
            "sigma_min needs rows >= cols, got {r}x{c}"
        )));
    }
    Ok(singular_values(m)?.last().copied().unwrap_or(0.0))
}

/// Smallest singular value together with its right singular vector. The
/// vector's phase is fixed so that its first non-negligible component is
/// real and positive.
pub fn smallest_right_singular(m: &CMatrix) -> Result<(f64, CVector)> {
    let (r, c) = m.dim();
    if r < c || c == 0 {
        return Err(Error::input(format!(
            "smallest_right_singular needs rows >= cols > 0, got {r}x{c}"
        )));
    }
    ensure_finite(m, "matrix")?;
    let (_, s, vt) = m.svd(false, true)?;
    let vt = vt.ok_or_else(|| Error::Linalg("SVD returned no right vectors".into()))?;
    let k = c - 1;
    let v: CVector = vt.row(k).mapv(|z| z.conj());
    Ok((s[k], canonical_phase(v)))
}

/// Rotate `v` so that its first component with modulus above `1e-12 * |v|_inf`
/// is real and positive.
pub fn canonical_phase(v: CVector) -> CVector {
    let peak = v.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    if peak == 0.0 {
        return v;
    }
    match v.iter().find(|z| z.norm() > 1e-12 * peak) {
        Some(&z0) => {
            let phase = z0.conj() / z0.norm();
            v.mapv(|z| z * phase)
        }
        None => v,
    }
}

/// Total order used for every eigenvalue list: real part, then imaginary part.
pub fn eig_order(a: &C64, b: &C64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Complex Schur form `M = Z T Z^†` with `T` upper triangular.
#[derive(Clone, Debug)]
pub struct SchurForm {
    pub t: CMatrix,
    /// Unitary Schur vectors; `None` when only `T` was requested.
    pub z: Option<CMatrix>,
}

impl SchurForm {
    pub fn eigenvalues(&self) -> Vec<C64> {
        let mut ev: Vec<C64> = self.t.diag().to_vec();
        ev.sort_by(eig_order);
        ev
    }

    /// The strictly upper triangular part of `T`.
    pub fn nilpotent_part(&self) -> CMatrix {
        let n = self.t.nrows();
        let mut u = self.t.clone();
        for i in 0..n {
            for j in 0..=i {
                u[[i, j]] = ZERO;
            }
        }
        u
    }
}

/// Complex Schur decomposition via LAPACK `zgees` (no eigenvalue reordering).
pub fn schur(m: &CMatrix, want_vectors: bool) -> Result<SchurForm> {
    let n = ensure_square_finite(m, "matrix")?;
    if n == 0 {
        return Ok(SchurForm {
            t: CMatrix::zeros((0, 0)),
            z: want_vectors.then(|| CMatrix::zeros((0, 0))),
        });
    }
    // column-major copy
    let mut a: Vec<C64> = m.t().iter().copied().collect();
    let ni = n as c_int;
    let jobvs = if want_vectors { b'V' } else { b'N' } as c_char;
    let sort = b'N' as c_char;
    let mut sdim: c_int = 0;
    let mut w = vec![ZERO; n];
    let ldvs = if want_vectors { ni } else { 1 };
    let mut vs = vec![ZERO; if want_vectors { n * n } else { 1 }];
    let mut rwork = vec![0.0_f64; n];
    let mut bwork: Vec<c_int> = vec![0; 1];
    let mut info: c_int = 0;

    let mut query = [ZERO; 1];
    // SAFETY: all buffers are sized per the zgees contract; Complex64 is
    // repr(C) with the same layout as LAPACK's double complex.
    unsafe {
        lapack_sys::zgees_(
            &jobvs,
            &sort,
            None,
            &ni,
            a.as_mut_ptr() as *mut _,
            &ni,
            &mut sdim,
            w.as_mut_ptr() as *mut _,
            vs.as_mut_ptr() as *mut _,
            &ldvs,
            query.as_mut_ptr() as *mut _,
            &-1,
            rwork.as_mut_ptr(),
            bwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Linalg(format!("zgees workspace query: info={info}")));
    }
    let lwork = (query[0].re as usize).max(2 * n);
    let mut work = vec![ZERO; lwork];
    let lwork_i = lwork as c_int;
    unsafe {
        lapack_sys::zgees_(
            &jobvs,
            &sort,
            None,
            &ni,
            a.as_mut_ptr() as *mut _,
            &ni,
            &mut sdim,
            w.as_mut_ptr() as *mut _,
            vs.as_mut_ptr() as *mut _,
            &ldvs,
            work.as_mut_ptr() as *mut _,
            &lwork_i,
            rwork.as_mut_ptr(),
            bwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Linalg(format!("zgees failed: info={info}")));
    }
    let t = Array2::from_shape_vec((n, n).f(), a)
        .map_err(|e| Error::Linalg(e.to_string()))?;
    let z = if want_vectors {
        Some(
            Array2::from_shape_vec((n, n).f(), vs)
                .map_err(|e| Error::Linalg(e.to_string()))?,
        )
    } else {
        None
    };
    Ok(SchurForm { t, z })
}

/// All `n` eigenvalues with multiplicity, ordered by real part then
/// imaginary part. Read off the diagonal of the Schur form, so the list is
/// reproducible bit for bit for a given input.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    Ok(schur(m, false)?.eigenvalues())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralSummary {
    pub eigenvalues: Vec<C64>,
    pub sigma_min: f64,
    pub min_abs_spec: f64,
    pub min_abs_real_spec: f64,
}

pub fn spectral_summary(m: &CMatrix) -> Result<SpectralSummary> {
    let eigenvalues = eigenvalues(m)?;
    Ok(SpectralSummary {
        sigma_min: sigma_min(m)?,
        min_abs_spec: min_abs(&eigenvalues),
        min_abs_real_spec: min_abs_real(&eigenvalues),
        eigenvalues,
    })
}

pub fn min_abs(ev: &[C64]) -> f64 {
    ev.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
}

pub fn min_abs_real(ev: &[C64]) -> f64 {
    ev.iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min)
}

/// Two computable stand-ins for the departure from normality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Departure {
    /// `|U|_2` for the strictly upper part `U` of one computed Schur form.
    /// Upper-bounds the infimum over all Schur forms.
    pub schur: f64,
    /// `sqrt(|M|_F^2 - sum |lambda_i|^2)`, which equals `|U|_F` for every
    /// Schur form and therefore also bounds the infimum from above.
    pub frobenius: f64,
}

pub fn departure_from_normality(m: &CMatrix) -> Result<Departure> {
    let sf = schur(m, false)?;
    departure_of(&sf)
}

/// Departure measures from an already computed Schur form.
pub fn departure_of(sf: &SchurForm) -> Result<Departure> {
    let u = sf.nilpotent_part();
    Ok(Departure {
        schur: op_norm(&u)?,
        frobenius: frobenius_norm(&u),
    })
}

/// `|M - M^†|_2`; zero exactly when `M` is Hermitian.
pub fn hermiticity_defect(m: &CMatrix) -> Result<f64> {
    ensure_square_finite(m, "matrix")?;
    // i (M - M^†) is Hermitian with the same norm
    let skew = m - &adjoint(m);
    hermitian_op_norm(&skew.mapv(|z| z * I))
}

/// `|M M^† - M^† M|_2`.
pub fn normality_defect(m: &CMatrix) -> Result<f64> {
    ensure_square_finite(m, "matrix")?;
    let md = adjoint(m);
    let c = m.dot(&md) - md.dot(m);
    hermitian_op_norm(&c)
}

/// `max |x_ij|`.
pub fn max_abs_entry(m: ArrayView2<'_, C64>) -> f64 {
    m.iter().fold(0.0_f64, |a, z| a.max(z.norm()))
}
