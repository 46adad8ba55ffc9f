//! Finite spaces, weights and quasi-Hausdorff distances.

use std::slice;

use quasimetric::{
    check_embedding, check_perimeter_identity, compose, e_embedding_distance, qh_backward, qh_forward, qh_max,
    recover_weight, FiniteMetric, FiniteQuasiMetric, Matrix, PointSubset, ValidationOptions, WeightedQuasiMetric,
};

use crate::status::{fail, guard, FfiResult, QmStatus};

/// A validated quasi-metric space. Opaque.
pub struct QmSpace {
    pub(crate) inner: FiniteQuasiMetric,
}

/// A weighted quasi-metric space. Opaque.
pub struct QmWeighted {
    pub(crate) inner: WeightedQuasiMetric,
}

pub(crate) unsafe fn slice_in<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], crate::status::Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(fail(QmStatus::NullPointer, format!("{what} is null")));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

pub(crate) unsafe fn slice_out<'a, T>(
    ptr: *mut T,
    len: usize,
    need: usize,
    what: &str,
) -> Result<&'a mut [T], crate::status::Fail> {
    if ptr.is_null() {
        return Err(fail(QmStatus::NullPointer, format!("{what} is null")));
    }
    if len < need {
        return Err(fail(
            QmStatus::BufferTooSmall,
            format!("{what} holds {len}, need {need}"),
        ));
    }
    Ok(slice::from_raw_parts_mut(ptr, need))
}

pub(crate) unsafe fn out<'a, T>(ptr: *mut T, what: &str) -> Result<&'a mut T, crate::status::Fail> {
    ptr.as_mut()
        .ok_or_else(|| fail(QmStatus::NullPointer, format!("{what} is null")))
}

pub(crate) unsafe fn handle<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, crate::status::Fail> {
    ptr.as_ref()
        .ok_or_else(|| fail(QmStatus::NullPointer, format!("{what} is null")))
}

fn options(tol: f64, weak_separation: bool) -> Result<ValidationOptions, crate::status::Fail> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(fail(
            QmStatus::InvalidArgument,
            format!("tolerance {tol} must be finite and >= 0"),
        ));
    }
    Ok(ValidationOptions { tol, weak_separation })
}

fn matrix(data: *const f64, n: usize) -> Result<Matrix, crate::status::Fail> {
    if n == 0 {
        return Err(fail(QmStatus::InvalidArgument, "empty space"));
    }
    let values = unsafe { slice_in(data, n * n, "matrix") }?;
    Ok(Matrix::from_row_major(n, values.to_vec())?)
}

/// Validates the row-major `n x n` matrix `data` and returns a new space in
/// `*out`. `tol` is the base tolerance (1e-9 is the usual choice).
///
/// # Safety
/// `data` must point to `n * n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qm_space_new(
    data: *const f64,
    n: usize,
    tol: f64,
    weak_separation: bool,
    out_space: *mut *mut QmSpace,
) -> QmStatus {
    guard(|| {
        let slot = out(out_space, "out_space")?;
        let q = FiniteQuasiMetric::from_matrix(matrix(data, n)?, &options(tol, weak_separation)?)?;
        *slot = Box::into_raw(Box::new(QmSpace { inner: q }));
        Ok(())
    })
}

/// Frees a space. Null is ignored.
///
/// # Safety
/// `space` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qm_space_free(space: *mut QmSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Number of points, or 0 for a null handle.
///
/// # Safety
/// `space` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qm_space_size(space: *const QmSpace) -> usize {
    space.as_ref().map_or(0, |s| s.inner.n())
}

fn index(i: usize, n: usize) -> FfiResult {
    if i >= n {
        return Err(fail(
            QmStatus::IndexOutOfRange,
            format!("index {i} out of range for {n} points"),
        ));
    }
    Ok(())
}

/// `*out = d(i, j)`.
///
/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qm_space_distance(space: *const QmSpace, i: usize, j: usize, out_value: *mut f64) -> QmStatus {
    guard(|| {
        let s = handle(space, "space")?;
        index(i, s.inner.n())?;
        index(j, s.inner.n())?;
        *out(out_value, "out_value")? = s.inner.d(i, j);
        Ok(())
    })
}

/// Perimeter-identity test. Writes whether the space is weightable and the
/// largest perimeter gap.
///
/// # Safety
/// `space` must be a live handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn qm_space_is_weightable(
    space: *const QmSpace,
    tol: f64,
    out_weightable: *mut bool,
    out_residual: *mut f64,
) -> QmStatus {
    guard(|| {
        let s = handle(space, "space")?;
        let check = check_perimeter_identity(&s.inner, &options(tol, false)?);
        *out(out_weightable, "out_weightable")? = check.holds;
        *out(out_residual, "out_residual")? = check.max_residual;
        Ok(())
    })
}

/// Recovers the weight from `basepoint`, shifted so its minimum is zero,
/// into `out_weight[0..n]`. Fails with `QM_STATUS_NOT_WEIGHTABLE` when the
/// perimeter identity fails.
///
/// # Safety
/// `space` must be a live handle; `out_weight` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qm_space_recover_weight(
    space: *const QmSpace,
    basepoint: usize,
    tol: f64,
    out_weight: *mut f64,
    len: usize,
) -> QmStatus {
    guard(|| {
        let s = handle(space, "space")?;
        let n = s.inner.n();
        index(basepoint, n)?;
        let dst = slice_out(out_weight, len, n, "out_weight")?;
        let w = recover_weight(&s.inner, basepoint, &options(tol, false)?)?;
        dst.copy_from_slice(&w.normalized());
        Ok(())
    })
}

fn subset(ptr: *const usize, len: usize, n: usize, what: &str) -> Result<PointSubset, crate::status::Fail> {
    let idx = unsafe { slice_in(ptr, len, what) }?;
    Ok(PointSubset::within(idx.to_vec(), n)?)
}

/// Forward, backward and max quasi-Hausdorff distances between the index
/// sets `a` and `b`. Any output pointer may be null.
///
/// # Safety
/// `space` must be a live handle; `a` and `b` must hold `a_len` and `b_len`
/// indices.
#[no_mangle]
pub unsafe extern "C" fn qm_quasi_hausdorff(
    space: *const QmSpace,
    a: *const usize,
    a_len: usize,
    b: *const usize,
    b_len: usize,
    out_forward: *mut f64,
    out_backward: *mut f64,
    out_max: *mut f64,
) -> QmStatus {
    guard(|| {
        let s = handle(space, "space")?;
        let n = s.inner.n();
        let (sa, sb) = (subset(a, a_len, n, "a")?, subset(b, b_len, n, "b")?);
        if let Some(o) = out_forward.as_mut() {
            *o = qh_forward(&s.inner, &sa, &sb)?;
        }
        if let Some(o) = out_backward.as_mut() {
            *o = qh_backward(&s.inner, &sa, &sb)?;
        }
        if let Some(o) = out_max.as_mut() {
            *o = qh_max(&s.inner, &sa, &sb)?;
        }
        Ok(())
    })
}

/// Forward Hausdorff distance between the sets `E(x)` and `E(y)` in the
/// height bundle; equals `d(x, y)`.
///
/// # Safety
/// `space` must be a live handle and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn qm_e_embedding_distance(
    space: *const QmSpace,
    x: usize,
    y: usize,
    out_value: *mut f64,
) -> QmStatus {
    guard(|| {
        let s = handle(space, "space")?;
        *out(out_value, "out_value")? = e_embedding_distance(&s.inner, x, y)?;
        Ok(())
    })
}

/// Builds `d(x, y) = rho(x, y) + (w(y) - w(x)) / 2` from a symmetric
/// row-major `n x n` metric and an `n`-vector weight.
///
/// # Safety
/// `rho` must hold `n * n` doubles, `weight` `n` doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qm_weighted_compose(
    rho: *const f64,
    weight: *const f64,
    n: usize,
    tol: f64,
    out_weighted: *mut *mut QmWeighted,
) -> QmStatus {
    guard(|| {
        let slot = out(out_weighted, "out_weighted")?;
        let opts = options(tol, false)?;
        let w = slice_in(weight, n, "weight")?;
        let metric = FiniteMetric::from_matrix(matrix(rho, n)?, &opts)?;
        let qw = compose(&metric, w, &opts)?;
        *slot = Box::into_raw(Box::new(QmWeighted { inner: qw }));
        Ok(())
    })
}

/// Frees a weighted space. Null is ignored.
///
/// # Safety
/// `weighted` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qm_weighted_free(weighted: *mut QmWeighted) {
    if !weighted.is_null() {
        drop(Box::from_raw(weighted));
    }
}

/// Copies the composed row-major distance matrix into `out_matrix`.
///
/// # Safety
/// `weighted` must be a live handle; `out_matrix` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qm_weighted_matrix(weighted: *const QmWeighted, out_matrix: *mut f64, len: usize) -> QmStatus {
    guard(|| {
        let w = handle(weighted, "weighted")?;
        let m = w.inner.space().matrix();
        slice_out(out_matrix, len, m.n() * m.n(), "out_matrix")?.copy_from_slice(m.as_slice());
        Ok(())
    })
}

/// Largest deviation of the bundle embedding `x -> (x, w(x) / 2)` from an
/// isometry.
///
/// # Safety
/// `weighted` must be a live handle and `out_residual` writable.
#[no_mangle]
pub unsafe extern "C" fn qm_weighted_embedding_residual(
    weighted: *const QmWeighted,
    tol: f64,
    out_residual: *mut f64,
) -> QmStatus {
    guard(|| {
        let w = handle(weighted, "weighted")?;
        *out(out_residual, "out_residual")? = check_embedding(&w.inner, &options(tol, false)?).max_residual;
        Ok(())
    })
}

/// Wraps an existing weighted space's distances as a plain space handle.
///
/// # Safety
/// `weighted` must be a live handle and `out_space` writable.
#[no_mangle]
pub unsafe extern "C" fn qm_weighted_space(weighted: *const QmWeighted, out_space: *mut *mut QmSpace) -> QmStatus {
    guard(|| {
        let w = handle(weighted, "weighted")?;
        *out(out_space, "out_space")? = Box::into_raw(Box::new(QmSpace {
            inner: w.inner.space().clone(),
        }));
        Ok(())
    })
}
