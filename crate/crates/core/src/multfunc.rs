//! Real multiplicative functions with values in [−1, 1], evaluated from sieve
//! factorizations, and the mean-value and uniformity statistics built on them.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::charsum::{factor_modulus, jacobi_u64, CharacterModulus};
use crate::error::{domain, Error, Result};
use crate::scalar::Neumaier;
use crate::scan::{scan_factored, scan_plain};
use crate::sieve::{Factorization, SievingPrimes, WORD_LIMIT};

/// Largest modulus bound accepted by the progression scans.
pub const MAX_UNIFORMITY_Q: u64 = 2048;
/// Default number of probe points for the strong uniformity scan.
pub const DEFAULT_PROBES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum FuncKind {
    ConstantOne,
    Liouville,
    Moebius,
    /// `(−1)^{Ω_{>y}(n)}`, prime factors above `y` counted with multiplicity.
    TruncatedLiouvilleGt { y: f64 },
    /// `(−1)^{Ω_{<y}(n)}`.
    TruncatedLiouvilleLt { y: f64 },
    /// `1` when `P⁺(n) ≤ y`.
    SmoothIndicator { y: f64 },
    /// `z^{ω_{>y}(n)}` with the distinct count.
    PowerWeight { y: f64, z: f64 },
    /// The Jacobi symbol `(n|Q)`.
    RealCharacter(CharacterModulus),
}

/// A validated multiplicative function.
#[derive(Debug, Clone, PartialEq)]
pub struct MultFuncSpec {
    kind: FuncKind,
}

fn check_threshold(y: f64) -> Result<f64> {
    if y.is_finite() && y >= 1.0 {
        Ok(y)
    } else {
        domain(format!("threshold y must be finite and at least 1, got {y}"))
    }
}

impl MultFuncSpec {
    pub fn constant_one() -> Self {
        Self { kind: FuncKind::ConstantOne }
    }

    pub fn liouville() -> Self {
        Self { kind: FuncKind::Liouville }
    }

    pub fn moebius() -> Self {
        Self { kind: FuncKind::Moebius }
    }

    pub fn truncated_liouville_gt(y: f64) -> Result<Self> {
        Ok(Self { kind: FuncKind::TruncatedLiouvilleGt { y: check_threshold(y)? } })
    }

    pub fn truncated_liouville_lt(y: f64) -> Result<Self> {
        Ok(Self { kind: FuncKind::TruncatedLiouvilleLt { y: check_threshold(y)? } })
    }

    pub fn smooth_indicator(y: f64) -> Result<Self> {
        Ok(Self { kind: FuncKind::SmoothIndicator { y: check_threshold(y)? } })
    }

    pub fn power_weight(y: f64, z: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&z) {
            return domain(format!("z must lie in [-1, 1], got {z}"));
        }
        Ok(Self { kind: FuncKind::PowerWeight { y: check_threshold(y)?, z } })
    }

    pub fn real_character(q: u64) -> Result<Self> {
        Ok(Self { kind: FuncKind::RealCharacter(factor_modulus(q)?) })
    }

    pub fn kind(&self) -> &FuncKind {
        &self.kind
    }

    /// False for functions computable from `n` alone.
    pub fn needs_factors(&self) -> bool {
        !matches!(self.kind, FuncKind::ConstantOne | FuncKind::RealCharacter(_))
    }

    /// Evaluates at `n` given its factorization, without checking it.
    #[inline]
    pub fn eval_factored(&self, n: u64, f: &Factorization<'_>) -> f64 {
        let sign = |k: u32| if k % 2 == 0 { 1.0 } else { -1.0 };
        match &self.kind {
            FuncKind::ConstantOne => 1.0,
            FuncKind::Liouville => sign(f.total()),
            FuncKind::Moebius => {
                if f.is_squarefree() {
                    sign(f.distinct())
                } else {
                    0.0
                }
            }
            FuncKind::TruncatedLiouvilleGt { y } => {
                sign(f.iter().filter(|&(p, _)| p as f64 > *y).map(|(_, e)| e).sum())
            }
            FuncKind::TruncatedLiouvilleLt { y } => {
                sign(f.iter().filter(|&(p, _)| (p as f64) < *y).map(|(_, e)| e).sum())
            }
            FuncKind::SmoothIndicator { y } => {
                if f.largest() as f64 <= *y {
                    1.0
                } else {
                    0.0
                }
            }
            FuncKind::PowerWeight { y, z } => z.powi(f.omega_gt(*y) as i32),
            FuncKind::RealCharacter(m) => jacobi_u64(n, m.q()) as f64,
        }
    }

    /// Evaluates at `n`, rejecting a factorization that does not multiply
    /// back to `n`.
    pub fn eval(&self, n: u64, f: &Factorization<'_>) -> Result<f64> {
        let ordered = f.primes().windows(2).all(|w| w[0] < w[1]);
        if !ordered || f.product() != Some(n as u128) {
            return Err(Error::Integrity(format!("factorization `{f}` does not equal {n}")));
        }
        Ok(self.eval_factored(n, f))
    }

    /// Value at a prime `p`.
    pub fn at_prime(&self, p: u64) -> f64 {
        self.eval_factored(p, &Factorization::from_parts(&[p], &[1]))
    }

    /// Parses the compact grammar, resolving `x^e` values against `x`.
    pub fn parse_with_x(s: &str, x: Option<u64>) -> Result<Self> {
        parse_spec(s, x)
    }

    /// `Σ_{lo ≤ n ≤ hi} g(n)·w(n)`, skipping `n` with zero weight.
    pub fn weighted_sum<W>(&self, lo: u64, hi: u64, weight: W) -> Result<f64>
    where
        W: Fn(u64) -> f64 + Sync,
    {
        if hi < lo {
            return Ok(0.0);
        }
        let lo = lo.max(1);
        if hi >= WORD_LIMIT {
            return Err(Error::Capacity(format!("window end {hi} exceeds the sieve word limit")));
        }
        let parts = if self.needs_factors() {
            scan_factored(lo, hi + 1, 0, 0, |c| {
                let mut acc = Neumaier::new();
                for n in c.lo..c.hi {
                    let w = weight(n);
                    if w != 0.0 {
                        acc.add(self.eval_factored(n, &c.seg.factors_at(c.offset(n))) * w);
                    }
                }
                acc
            })?
        } else {
            let empty = Factorization::from_parts(&[], &[]);
            scan_plain(lo, hi + 1, |a, b| {
                let mut acc = Neumaier::new();
                for n in a..b {
                    let w = weight(n);
                    if w != 0.0 {
                        acc.add(self.eval_factored(n, &empty) * w);
                    }
                }
                acc
            })
        };
        let mut total = Neumaier::new();
        for p in &parts {
            total.merge(p);
        }
        Ok(total.value())
    }
}

impl Serialize for MultFuncSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for MultFuncSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FuncKind::ConstantOne => write!(f, "one"),
            FuncKind::Liouville => write!(f, "liouville"),
            FuncKind::Moebius => write!(f, "moebius"),
            FuncKind::TruncatedLiouvilleGt { y } => write!(f, "tliouville_gt:y={y}"),
            FuncKind::TruncatedLiouvilleLt { y } => write!(f, "tliouville_lt:y={y}"),
            FuncKind::SmoothIndicator { y } => write!(f, "smooth:y={y}"),
            FuncKind::PowerWeight { y, z } => write!(f, "power:y={y},z={z}"),
            FuncKind::RealCharacter(m) => write!(f, "char:Q={}", m.q()),
        }
    }
}

impl FromStr for MultFuncSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_spec(s, None)
    }
}

fn parse_value(tok: &str, x: Option<u64>) -> Result<f64> {
    let bad = || Error::Parse(format!("bad value `{tok}`"));
    if let Some(e) = tok.strip_prefix("x^") {
        let x = x.ok_or_else(|| Error::Parse(format!("`{tok}` needs a value of x")))?;
        let e: f64 = e.parse().map_err(|_| bad())?;
        return Ok((x as f64).powf(e));
    }
    let v: f64 = tok.parse().map_err(|_| bad())?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn parse_spec(s: &str, x: Option<u64>) -> Result<MultFuncSpec> {
    let s = s.trim();
    let (name, rest) = match s.split_once(':') {
        Some((n, r)) => (n, Some(r)),
        None => (s, None),
    };
    let mut params: Vec<(&str, &str)> = Vec::new();
    if let Some(rest) = rest {
        for tok in rest.split(',') {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, found `{tok}`")))?;
            if params.iter().any(|(p, _)| *p == k) {
                return Err(Error::Parse(format!("duplicate parameter `{tok}`")));
            }
            params.push((k, v));
        }
    }
    let allowed: &[&str] = match name {
        "one" | "constant_one" | "liouville" | "moebius" | "mobius" => &[],
        "tliouville_gt" | "tliouville_lt" | "smooth" => &["y"],
        "power" => &["y", "z"],
        "char" => &["Q"],
        _ => return Err(Error::Parse(format!("unknown function `{name}`"))),
    };
    if let Some((k, v)) = params.iter().find(|(k, _)| !allowed.contains(k)) {
        return Err(Error::Parse(format!("unexpected parameter `{k}={v}` for `{name}`")));
    }
    let get = |key: &str| -> Result<f64> {
        let (_, v) = params
            .iter()
            .find(|(k, _)| *k == key)
            .ok_or_else(|| Error::Parse(format!("`{name}` is missing parameter `{key}`")))?;
        parse_value(v, x)
    };
    let wrap = |r: Result<MultFuncSpec>| r.map_err(|e| Error::Parse(format!("in `{s}`: {e}")));
    match name {
        "one" | "constant_one" => Ok(MultFuncSpec::constant_one()),
        "liouville" => Ok(MultFuncSpec::liouville()),
        "moebius" | "mobius" => Ok(MultFuncSpec::moebius()),
        "tliouville_gt" => wrap(MultFuncSpec::truncated_liouville_gt(get("y")?)),
        "tliouville_lt" => wrap(MultFuncSpec::truncated_liouville_lt(get("y")?)),
        "smooth" => wrap(MultFuncSpec::smooth_indicator(get("y")?)),
        "power" => wrap(MultFuncSpec::power_weight(get("y")?, get("z")?)),
        _ => {
            let q = get("Q")?;
            if q.fract() != 0.0 || q < 1.0 || q >= 9.2e18 {
                let tok = params.iter().find(|(k, _)| *k == "Q").map_or("", |(_, v)| v);
                return Err(Error::Parse(format!("bad value `{tok}`: Q must be a positive integer")));
            }
            wrap(MultFuncSpec::real_character(q as u64))
        }
    }
}

/// `(1/x) Σ_{x ≤ n ≤ 2x} g(n)`.
pub fn mean_value(spec: &MultFuncSpec, x: u64) -> Result<f64> {
    if x == 0 {
        return domain("mean value needs x >= 1");
    }
    Ok(spec.weighted_sum(x, 2 * x, |_| 1.0)? / x as f64)
}

/// Integer bounds `[⌈x/ω⌉, x]` of the logarithmic window.
pub fn log_window(x: u64, omega: f64) -> Result<(u64, u64)> {
    if !(omega > 1.0) {
        return domain(format!("omega = {omega} must exceed 1 (log omega normalizes the average)"));
    }
    let cap = (3.0 * x as f64).ln();
    if omega > cap {
        return domain(format!("omega = {omega} exceeds log(3x) = {cap}"));
    }
    Ok((((x as f64 / omega).ceil() as u64).max(1), x))
}

/// `(1/log ω) Σ_{x/ω ≤ n ≤ x} g(n)/n`.
pub fn log_mean_value(spec: &MultFuncSpec, x: u64, omega: f64) -> Result<f64> {
    let (lo, hi) = log_window(x, omega)?;
    Ok(spec.weighted_sum(lo, hi, |n| 1.0 / n as f64)? / omega.ln())
}

/// `D(f, g; X) = (Σ_{p ≤ X} (1 − f(p)g(p))/p)^{1/2}` for real `f`, `g`.
pub fn pretentious_distance(f: &MultFuncSpec, g: &MultFuncSpec, x: u64) -> Result<f64> {
    if x < 2 {
        return domain(format!("pretentious distance needs X >= 2, got {x}"));
    }
    if x > u32::MAX as u64 {
        return Err(Error::Capacity(format!("prime sum up to {x} exceeds 2^32")));
    }
    let primes = SievingPrimes::up_to(x);
    let sum: Neumaier<f64> = primes
        .primes()
        .iter()
        .map(|&p| {
            let p = p as u64;
            (1.0 - f.at_prime(p) * g.at_prime(p)) / p as f64
        })
        .collect();
    Ok(sum.value().max(0.0).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformityReport {
    pub x: u64,
    pub q_cap: u64,
    pub eta_star: f64,
    pub worst_a: u64,
    pub worst_q: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrongUniformityReport {
    pub x: u64,
    pub q_cap: u64,
    pub delta: f64,
    pub eta_star: f64,
    pub worst_a: u64,
    pub worst_q: u64,
    pub worst_y: f64,
    pub probe_points: Vec<f64>,
}

/// Sums of `g(n)` over `lo ≤ n ≤ hi` split by residue: entry `[q][a mod q]`
/// for every `1 ≤ q ≤ q_cap`. Row 1 holds the full sum.
fn progression_sums(spec: &MultFuncSpec, lo: u64, hi: u64, q_cap: u64) -> Result<Vec<Vec<f64>>> {
    let q_cap = q_cap as usize;
    let fresh = || -> Vec<Vec<Neumaier<f64>>> {
        (0..=q_cap).map(|q| vec![Neumaier::new(); q]).collect()
    };
    let fold = |acc: &mut Vec<Vec<Neumaier<f64>>>, n: u64, v: f64| {
        if v != 0.0 {
            for (q, row) in acc.iter_mut().enumerate().skip(1) {
                row[(n % q as u64) as usize].add(v);
            }
        }
    };
    let parts = if spec.needs_factors() {
        scan_factored(lo, hi + 1, 0, 0, |c| {
            let mut acc = fresh();
            for n in c.lo..c.hi {
                fold(&mut acc, n, spec.eval_factored(n, &c.seg.factors_at(c.offset(n))));
            }
            acc
        })?
    } else {
        let empty = Factorization::from_parts(&[], &[]);
        scan_plain(lo, hi + 1, |a, b| {
            let mut acc = fresh();
            for n in a..b {
                fold(&mut acc, n, spec.eval_factored(n, &empty));
            }
            acc
        })
    };
    let mut total = fresh();
    for p in &parts {
        for (dst, src) in total.iter_mut().zip(p) {
            for (d, s) in dst.iter_mut().zip(src) {
                d.merge(s);
            }
        }
    }
    Ok(total.into_iter().map(|row| row.into_iter().map(|a| a.value()).collect()).collect())
}

fn check_q_cap(q_cap: u64) -> Result<()> {
    if q_cap == 0 {
        return domain("Q must be at least 1");
    }
    if q_cap > MAX_UNIFORMITY_Q {
        return Err(Error::Capacity(format!("Q = {q_cap} exceeds {MAX_UNIFORMITY_Q}")));
    }
    Ok(())
}

/// Returns `(η*, a, q)` maximizing `q·|sums[q][a]/scale − target/q|`.
/// Residue `a` is reported in `1..=q`.
fn worst_deviation(sums: &[Vec<f64>], scale: f64, target: f64) -> (f64, u64, u64) {
    let mut worst = (0.0, 1, 1);
    for (q, row) in sums.iter().enumerate().skip(1) {
        let qf = q as f64;
        for (r, &s) in row.iter().enumerate() {
            let dev = qf * (s / scale - target / qf).abs();
            if dev > worst.0 {
                let a = if r == 0 { q } else { r };
                worst = (dev, a as u64, q as u64);
            }
        }
    }
    worst
}

/// Smallest `η` with `g ∈ U(x, Q, η)`, and the pair `(a, q)` attaining it.
pub fn uniformity_deficiency(spec: &MultFuncSpec, x: u64, q_cap: u64) -> Result<UniformityReport> {
    check_q_cap(q_cap)?;
    if q_cap > x {
        return domain(format!("Q = {q_cap} exceeds x = {x}"));
    }
    let sums = progression_sums(spec, x, 2 * x, q_cap)?;
    let scale = x as f64;
    let full = sums[1][0] / scale;
    let (eta_star, worst_a, worst_q) = worst_deviation(&sums, scale, full);
    Ok(UniformityReport { x, q_cap, eta_star, worst_a, worst_q })
}

/// Geometric probe points `y` across `[x/ω, x]`.
pub fn probe_points(x: u64, omega: f64, probes: usize) -> Result<Vec<f64>> {
    if probes < 2 {
        return domain(format!("need at least 2 probes, got {probes}"));
    }
    log_window(x, omega)?;
    let lo = x as f64 / omega;
    Ok((0..probes)
        .map(|j| lo * omega.powf(j as f64 / (probes - 1) as f64))
        .collect())
}

/// Largest deviation in the definition of `U_ω(x, Q, η, δ)` over the probe
/// points, with `δ` the mean value over `[x, 2x]`. Probing a finite set of
/// `y` under-approximates the supremum over the whole interval.
pub fn strong_uniformity_deficiency(
    spec: &MultFuncSpec,
    x: u64,
    q_cap: u64,
    omega: f64,
    probes: usize,
) -> Result<StrongUniformityReport> {
    check_q_cap(q_cap)?;
    if q_cap > x {
        return domain(format!("Q = {q_cap} exceeds x = {x}"));
    }
    let ys = probe_points(x, omega, probes)?;
    let delta = mean_value(spec, x)?;
    let mut report = StrongUniformityReport {
        x,
        q_cap,
        delta,
        eta_star: 0.0,
        worst_a: 1,
        worst_q: 1,
        worst_y: ys[0],
        probe_points: ys.clone(),
    };
    for &y in &ys {
        let sums = progression_sums(spec, y.ceil() as u64, (2.0 * y).floor() as u64, q_cap)?;
        let (eta, a, q) = worst_deviation(&sums, y, delta);
        if eta > report.eta_star {
            report.eta_star = eta;
            report.worst_a = a;
            report.worst_q = q;
            report.worst_y = y;
        }
    }
    Ok(report)
}

/// `|(1/x) Σ_{x≤n≤2x, n≡a} g(n) − (y/x) Σ_{x/y≤n≤2x/y, n≡a} g(n)|`.
pub fn stability_gap(spec: &MultFuncSpec, x: u64, y_shrink: f64, a: u64, q: u64) -> Result<f64> {
    if q == 0 {
        return domain("modulus q must be at least 1");
    }
    if !(y_shrink >= 1.0) {
        return domain(format!("shrink factor must be at least 1, got {y_shrink}"));
    }
    let small = x as f64 / y_shrink;
    if small < q as f64 {
        return domain(format!("x/y = {small} is below q = {q}"));
    }
    let a = a % q;
    let in_class = |n: u64| if n % q == a { 1.0 } else { 0.0 };
    let big = spec.weighted_sum(x, 2 * x, in_class)? / x as f64;
    let lo = small.ceil() as u64;
    let hi = (2.0 * small).floor() as u64;
    let shrunk = spec.weighted_sum(lo, hi, in_class)? / small;
    Ok((big - shrunk).abs())
}
