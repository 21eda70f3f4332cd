//! Process-wide zero tolerance used for support detection and rank decisions.

use std::sync::atomic::{AtomicU64, Ordering};

/// Default relative zero tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

static TOLERANCE_BITS: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695);

/// Current global tolerance (initially [`DEFAULT_TOLERANCE`]).
pub fn tolerance() -> f64 {
    f64::from_bits(TOLERANCE_BITS.load(Ordering::Relaxed))
}

/// Overrides the global tolerance. Non-positive or non-finite values are ignored.
pub fn set_tolerance(tau: f64) {
    if tau.is_finite() && tau > 0.0 {
        TOLERANCE_BITS.store(tau.to_bits(), Ordering::Relaxed);
    }
}
