use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use quasimetric::Error;

/// Result of every fallible call. `QM_STATUS_OK` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The matrix fails an axiom; the message names the witness.
    InvalidSpace = 3,
    NotWeightable = 4,
    /// `|w(x) - w(y)| / 2 <= rho(x, y)` fails.
    Lipschitz = 5,
    IndexOutOfRange = 6,
    Domain = 7,
    NotPositive = 8,
    Parse = 9,
    Io = 10,
    /// The caller's buffer is too small.
    BufferTooSmall = 11,
    /// A Rust panic was caught at the boundary.
    Panic = 12,
}

impl From<&Error> for QmStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Structural(_) | Error::EmptySubset => QmStatus::InvalidArgument,
            Error::InvalidSpace(_) => QmStatus::InvalidSpace,
            Error::NotWeightable { .. } => QmStatus::NotWeightable,
            Error::Lipschitz { .. } => QmStatus::Lipschitz,
            Error::IndexOutOfRange { .. } => QmStatus::IndexOutOfRange,
            Error::Domain(_) | Error::RayExitsMask { .. } | Error::Evaluation { .. } => QmStatus::Domain,
            Error::NotPositive { .. } | Error::NonPositiveEdge { .. } => QmStatus::NotPositive,
            Error::Parse { .. } => QmStatus::Parse,
            Error::Io { .. } => QmStatus::Io,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

pub(crate) fn set_last_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

/// Failure carried out of a guarded body.
pub(crate) struct Fail(pub QmStatus, pub String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(QmStatus::from(&e), e.to_string())
    }
}

pub(crate) type FfiResult = Result<(), Fail>;

pub(crate) fn fail(status: QmStatus, msg: impl Into<String>) -> Fail {
    Fail(status, msg.into())
}

/// Runs `body`, recording any error or panic as the thread's last error.
/// Entry points only read through existing handles, so a panic cannot leave
/// one half-modified.
pub(crate) fn guard(body: impl FnOnce() -> FfiResult) -> QmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error(String::new());
            QmStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("panic: {msg}"));
            QmStatus::Panic
        }
    }
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len - 1` bytes) and returns the full message
/// length in bytes, excluding the terminator. Pass a null `buf` to query the
/// length. An empty message means the last call succeeded.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn qm_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Static NUL-terminated version string.
#[no_mangle]
pub extern "C" fn qm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
