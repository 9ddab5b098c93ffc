//! Ordered parallel scans over integer ranges.
//!
//! A range is cut into chunks at fixed multiples of the segment size, chunks
//! are processed on the rayon pool, and the per-chunk partials come back in
//! chunk order. Callers fold them left to right, so results do not depend on
//! the number of worker threads.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::Result;
use crate::sieve::{FactorSieve, FactoredSegment, DEFAULT_SEGMENT_SIZE};

static SEGMENT_SIZE: AtomicU64 = AtomicU64::new(DEFAULT_SEGMENT_SIZE);

/// Chunk length used by every scan in this process.
pub fn segment_size() -> u64 {
    SEGMENT_SIZE.load(Ordering::Relaxed)
}

/// Changes the chunk length; values are clamped to at least 1.
pub fn set_segment_size(size: u64) {
    SEGMENT_SIZE.store(size.max(1), Ordering::Relaxed);
}

/// One chunk of a factored scan: the integers `[lo, hi)` of interest plus a
/// segment that also covers the requested padding on either side.
pub struct Chunk<'a> {
    pub lo: u64,
    pub hi: u64,
    pub seg: &'a FactoredSegment,
}

impl Chunk<'_> {
    /// Offset of `n` inside the padded segment.
    #[inline]
    pub fn offset(&self, n: u64) -> usize {
        (n - self.seg.lo()) as usize
    }
}

fn chunk_bounds(lo: u64, hi: u64, size: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut a = lo;
    while a < hi {
        let b = hi.min(a.saturating_add(size));
        out.push((a, b));
        a = b;
    }
    out
}

/// Runs `f` over the factored chunks of `[lo, hi)`; each chunk's segment
/// extends `pad_before` integers below (never below 1) and `pad_after` above.
pub fn scan_factored<A, F>(lo: u64, hi: u64, pad_before: u64, pad_after: u64, f: F) -> Result<Vec<A>>
where
    A: Send,
    F: Fn(&Chunk<'_>) -> A + Sync,
{
    if hi <= lo {
        return Ok(Vec::new());
    }
    let lo = lo.max(1);
    let sieve = FactorSieve::for_range_end(hi + pad_after)?;
    chunk_bounds(lo, hi, segment_size())
        .into_par_iter()
        .map(|(a, b)| {
            let seg = sieve.segment(a.saturating_sub(pad_before).max(1), b + pad_after)?;
            Ok(f(&Chunk { lo: a, hi: b, seg: &seg }))
        })
        .collect()
}

/// Runs `f(a, b)` over the chunks of `[lo, hi)` without factoring anything.
pub fn scan_plain<A, F>(lo: u64, hi: u64, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(u64, u64) -> A + Sync,
{
    chunk_bounds(lo, hi, segment_size())
        .into_par_iter()
        .map(|(a, b)| f(a, b))
        .collect()
}
