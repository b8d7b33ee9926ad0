//! Process-wide enumeration limit.
//!
//! Every exhaustive search (subset constructions, pattern languages, rule
//! tables, pair graphs) refuses to grow past this many objects and reports
//! [`EdenError::Capacity`](crate::EdenError::Capacity) instead.

use std::sync::atomic::{AtomicUsize, Ordering};

pub const DEFAULT_LIMIT: usize = 1 << 22;

/// Default height bound for two-dimensional strip computations.
pub const DEFAULT_STRIP_HEIGHT: usize = 8;

static LIMIT: AtomicUsize = AtomicUsize::new(DEFAULT_LIMIT);

pub fn limit() -> usize {
    LIMIT.load(Ordering::Relaxed)
}

pub fn set_limit(n: usize) {
    LIMIT.store(n.max(1), Ordering::Relaxed);
}

/// Applies `EDEN_CAPACITY` when it is set to a positive integer.
pub fn init_from_env() -> Option<usize> {
    let n = std::env::var("EDEN_CAPACITY").ok()?.trim().parse::<usize>().ok()?;
    set_limit(n);
    Some(n)
}

/// Fails with a capacity error once `n` exceeds the limit.
pub(crate) fn check(n: usize, what: &str) -> crate::Result<()> {
    let l = limit();
    if n > l {
        return Err(crate::error::capacity(format!("{what}: {n} exceeds the limit {l}")));
    }
    Ok(())
}
