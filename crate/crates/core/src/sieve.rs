//! Segmented factor sieve.
//!
//! Every integer of a half-open range `[lo, hi)` receives its sorted list of
//! distinct primes with multiplicities and its largest prime factor, with the
//! convention `P⁺(1) = 1`. Segments are independent and may be sieved on any
//! thread once the sieving primes up to `√hi` exist.

use std::fmt;

use crate::error::{domain, Error, Result};

/// Largest exclusive range end accepted by the sieve (2⁴⁸).
///
/// Sieving primes stay below 2²⁴ and fit in `u32`; offsets within a segment
/// are `u32`, so a single segment holds fewer than 2³² integers.
pub const WORD_LIMIT: u64 = 1 << 48;

pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 20;

/// Below 2⁶⁴ no integer has more than 15 distinct prime factors.
pub const MAX_DISTINCT_FACTORS: usize = 15;

/// A validated request to factor every integer of `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveRequest {
    lo: u64,
    hi: u64,
    segment_size: u64,
}

impl SieveRequest {
    pub fn new(lo: u64, hi: u64, segment_size: u64) -> Result<Self> {
        if lo == 0 {
            return domain("sieve ranges start at 1; 0 has no factorization");
        }
        if hi <= lo {
            return domain(format!("empty sieve range [{lo}, {hi})"));
        }
        if hi > WORD_LIMIT {
            return Err(Error::Capacity(format!(
                "range end {hi} exceeds the sieve word limit 2^48"
            )));
        }
        if segment_size == 0 || segment_size > u32::MAX as u64 {
            return domain(format!("segment size {segment_size} outside [1, 2^32)"));
        }
        Ok(Self { lo, hi, segment_size })
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn segment_size(&self) -> u64 {
        self.segment_size
    }
}

/// Floor of the square root.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// All primes up to a limit, from a bit-packed odd-only Eratosthenes sieve.
#[derive(Debug, Clone, Default)]
pub struct SievingPrimes {
    limit: u64,
    primes: Vec<u32>,
}

impl SievingPrimes {
    pub fn up_to(limit: u64) -> Self {
        assert!(limit < 1 << 32, "sieving prime limit must fit in u32");
        let mut primes = Vec::new();
        if limit >= 2 {
            primes.push(2);
        }
        if limit >= 3 {
            // bit i stands for the odd number 2i + 1
            let nbits = (limit as usize - 1) / 2 + 1;
            let mut composite = vec![0u64; nbits.div_ceil(64)];
            let mut i = 1usize;
            while (2 * i + 1) * (2 * i + 1) <= limit as usize {
                if composite[i / 64] >> (i % 64) & 1 == 0 {
                    let p = 2 * i + 1;
                    let mut j = p * p / 2;
                    while j < nbits {
                        composite[j / 64] |= 1 << (j % 64);
                        j += p;
                    }
                }
                i += 1;
            }
            for i in 1..nbits {
                if composite[i / 64] >> (i % 64) & 1 == 0 {
                    primes.push((2 * i + 1) as u32);
                }
            }
        }
        Self { limit, primes }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Whether these primes suffice to factor every integer below `hi`.
    pub fn covers(&self, hi: u64) -> bool {
        hi <= 1 || isqrt(hi - 1) <= self.limit
    }
}

/// Factoring engine holding the sieving primes; rebuilds them only when a
/// request reaches beyond the square of the current limit.
#[derive(Debug, Clone, Default)]
pub struct FactorSieve {
    primes: SievingPrimes,
}

impl FactorSieve {
    pub fn new() -> Self {
        Self::default()
    }

    /// Engine ready for ranges ending at `hi`.
    pub fn for_range_end(hi: u64) -> Result<Self> {
        let mut s = Self::new();
        s.reserve(hi)?;
        Ok(s)
    }

    pub fn reserve(&mut self, hi: u64) -> Result<()> {
        if hi > WORD_LIMIT {
            return Err(Error::Capacity(format!(
                "range end {hi} exceeds the sieve word limit 2^48"
            )));
        }
        if !self.primes.covers(hi) {
            self.primes = SievingPrimes::up_to(isqrt(hi - 1));
        }
        Ok(())
    }

    pub fn sieving_primes(&self) -> &SievingPrimes {
        &self.primes
    }

    /// Factors `[lo, hi)` as one segment.
    pub fn segment(&self, lo: u64, hi: u64) -> Result<FactoredSegment> {
        if lo == 0 {
            return domain("sieve ranges start at 1; 0 has no factorization");
        }
        if hi <= lo {
            return domain(format!("empty sieve range [{lo}, {hi})"));
        }
        if hi > WORD_LIMIT {
            return Err(Error::Capacity(format!(
                "range end {hi} exceeds the sieve word limit 2^48"
            )));
        }
        if hi - lo > u32::MAX as u64 {
            return Err(Error::Capacity("segment longer than 2^32 integers".into()));
        }
        if !self.primes.covers(hi) {
            return Err(Error::Capacity(format!(
                "sieving primes up to {} cannot factor integers below {hi}",
                self.primes.limit
            )));
        }
        Ok(factor_segment(self.primes.primes(), lo, hi))
    }

    /// Streams the segments of a request in ascending order.
    pub fn sieve_range(&mut self, req: &SieveRequest) -> Result<SegmentStream<'_>> {
        self.reserve(req.hi)?;
        Ok(SegmentStream { sieve: self, next: req.lo, hi: req.hi, step: req.segment_size })
    }
}

/// Convenience entry point: a fresh engine streaming the request's segments.
pub fn sieve_range(req: &SieveRequest) -> Result<OwnedSegmentStream> {
    let sieve = FactorSieve::for_range_end(req.hi)?;
    Ok(OwnedSegmentStream { sieve, next: req.lo, hi: req.hi, step: req.segment_size })
}

pub struct SegmentStream<'a> {
    sieve: &'a FactorSieve,
    next: u64,
    hi: u64,
    step: u64,
}

impl Iterator for SegmentStream<'_> {
    type Item = FactoredSegment;

    fn next(&mut self) -> Option<FactoredSegment> {
        if self.next >= self.hi {
            return None;
        }
        let end = self.hi.min(self.next.saturating_add(self.step));
        let seg = factor_segment(self.sieve.primes.primes(), self.next, end);
        self.next = end;
        Some(seg)
    }
}

pub struct OwnedSegmentStream {
    sieve: FactorSieve,
    next: u64,
    hi: u64,
    step: u64,
}

impl Iterator for OwnedSegmentStream {
    type Item = FactoredSegment;

    fn next(&mut self) -> Option<FactoredSegment> {
        if self.next >= self.hi {
            return None;
        }
        let end = self.hi.min(self.next.saturating_add(self.step));
        let seg = factor_segment(self.sieve.primes.primes(), self.next, end);
        self.next = end;
        Some(seg)
    }
}

fn factor_segment(sieving: &[u32], lo: u64, hi: u64) -> FactoredSegment {
    let len = (hi - lo) as usize;
    let mut residual: Vec<u64> = (lo..hi).collect();
    let mut counts = vec![0u8; len];
    // Hits are produced prime by prime, so a stable bucket pass by offset
    // leaves every list sorted.
    let mut hit_at: Vec<u32> = Vec::with_capacity(len * 3);
    let mut hit_prime: Vec<u32> = Vec::with_capacity(len * 3);
    let mut hit_exp: Vec<u8> = Vec::with_capacity(len * 3);
    let top = hi - 1;
    for &p in sieving {
        let p = p as u64;
        if p * p > top {
            break;
        }
        let mut m = lo.div_ceil(p) * p;
        while m < hi {
            let i = (m - lo) as usize;
            let mut r = residual[i] / p;
            let mut e = 1u8;
            while r % p == 0 {
                r /= p;
                e += 1;
            }
            residual[i] = r;
            counts[i] += 1;
            hit_at.push(i as u32);
            hit_prime.push(p as u32);
            hit_exp.push(e);
            m += p;
        }
    }

    let mut offsets = Vec::with_capacity(len + 1);
    let mut total = 0u32;
    offsets.push(0);
    for (c, &r) in counts.iter_mut().zip(&residual) {
        if r > 1 {
            *c += 1;
        }
        assert!(
            (*c as usize) <= MAX_DISTINCT_FACTORS,
            "more than {MAX_DISTINCT_FACTORS} distinct prime factors"
        );
        total += *c as u32;
        offsets.push(total);
    }

    let mut primes = vec![0u64; total as usize];
    let mut exps = vec![0u8; total as usize];
    let mut cursor: Vec<u32> = offsets[..len].to_vec();
    for ((&i, &p), &e) in hit_at.iter().zip(&hit_prime).zip(&hit_exp) {
        let slot = &mut cursor[i as usize];
        primes[*slot as usize] = p as u64;
        exps[*slot as usize] = e;
        *slot += 1;
    }
    let mut lpf = vec![1u64; len];
    for i in 0..len {
        if residual[i] > 1 {
            let slot = cursor[i] as usize;
            primes[slot] = residual[i];
            exps[slot] = 1;
        }
        let end = offsets[i + 1] as usize;
        if end > offsets[i] as usize {
            lpf[i] = primes[end - 1];
        }
    }
    FactoredSegment { lo, hi, offsets, primes, exps, lpf }
}

/// Factorizations of every integer in `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredSegment {
    lo: u64,
    hi: u64,
    offsets: Vec<u32>,
    primes: Vec<u64>,
    exps: Vec<u8>,
    lpf: Vec<u64>,
}

impl FactoredSegment {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }

    pub fn contains(&self, n: u64) -> bool {
        (self.lo..self.hi).contains(&n)
    }

    fn offset_of(&self, n: u64) -> Result<usize> {
        if self.contains(n) {
            Ok((n - self.lo) as usize)
        } else {
            Err(Error::Range(format!(
                "{n} lies outside the sieved segment [{}, {})",
                self.lo, self.hi
            )))
        }
    }

    pub fn factors(&self, n: u64) -> Result<Factorization<'_>> {
        Ok(self.factors_at(self.offset_of(n)?))
    }

    /// Factorization of `lo + offset`; panics when the offset is out of bounds.
    #[inline]
    pub fn factors_at(&self, offset: usize) -> Factorization<'_> {
        let a = self.offsets[offset] as usize;
        let b = self.offsets[offset + 1] as usize;
        Factorization { primes: &self.primes[a..b], exps: &self.exps[a..b] }
    }

    /// Largest prime factor `P⁺(n)`.
    pub fn lpf(&self, n: u64) -> Result<u64> {
        Ok(self.lpf[self.offset_of(n)?])
    }

    #[inline]
    pub fn lpf_at(&self, offset: usize) -> u64 {
        self.lpf[offset]
    }

    pub fn lpf_slice(&self) -> &[u64] {
        &self.lpf
    }

    /// `ω_{>y}(n)`: the number of distinct primes `p | n` with `p > y`.
    pub fn omega_gt(&self, n: u64, y: f64) -> Result<u32> {
        if !(y.is_finite() && y > 1.0) {
            return domain(format!("threshold y = {y} must be finite and > 1"));
        }
        Ok(self.factors(n)?.omega_gt(y))
    }

    /// `(n, factorization)` pairs in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, Factorization<'_>)> + '_ {
        (0..self.len()).map(move |i| (self.lo + i as u64, self.factors_at(i)))
    }
}

/// Borrowed `(prime, multiplicity)` list of one integer, primes ascending.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Factorization<'a> {
    primes: &'a [u64],
    exps: &'a [u8],
}

impl<'a> Factorization<'a> {
    /// Wraps explicit slices. Both must have the same length.
    pub fn from_parts(primes: &'a [u64], exps: &'a [u8]) -> Self {
        assert_eq!(primes.len(), exps.len());
        Self { primes, exps }
    }

    pub fn primes(&self) -> &'a [u64] {
        self.primes
    }

    pub fn exps(&self) -> &'a [u8] {
        self.exps
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u32)> + 'a {
        self.primes.iter().copied().zip(self.exps.iter().map(|&e| e as u32))
    }

    /// ω(n)
    pub fn distinct(&self) -> u32 {
        self.primes.len() as u32
    }

    /// Ω(n)
    pub fn total(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    pub fn largest(&self) -> u64 {
        self.primes.last().copied().unwrap_or(1)
    }

    pub fn is_squarefree(&self) -> bool {
        self.exps.iter().all(|&e| e == 1)
    }

    pub fn omega_gt(&self, y: f64) -> u32 {
        self.primes.iter().filter(|&&p| p as f64 > y).count() as u32
    }

    /// The product of the prime powers, or `None` on overflow.
    pub fn product(&self) -> Option<u128> {
        let mut acc: u128 = 1;
        for (p, e) in self.iter() {
            acc = acc.checked_mul((p as u128).checked_pow(e)?)?;
        }
        Some(acc)
    }
}

impl fmt::Display for Factorization<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (p, e)) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}^{e}")?;
        }
        Ok(())
    }
}
