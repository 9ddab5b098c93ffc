//! Desk-scale density experiments for largest-prime-factor statistics of
//! consecutive integers, each compared with a target from [`crate::dickmann`].
//!
//! Every experiment is a tally over a window of `n`: each `n` contributes its
//! weight (`1/n` or `1`) to the events it belongs to, and an estimate is the
//! event weight divided by the total weight of the window. Dividing by the
//! total rather than by `log x` makes the estimates of a partition sum to 1.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::Serialize;

use crate::dickmann::{default_table, integral_i, integral_t, rect_density, IntegralRequest, DEFAULT_SEED, DEFAULT_T_NODES};
use crate::error::{domain, Error, Result};
use crate::multfunc::{log_window, MultFuncSpec};
use crate::scalar::Neumaier;
use crate::scan::{scan_factored, Chunk};

/// How `ω(x)` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaExpr {
    /// `ω(x) = log x`
    LogX,
    /// `ω(x) = log 3x`
    Log3X,
    Const(f64),
}

impl OmegaExpr {
    pub fn eval(&self, x: u64) -> f64 {
        match *self {
            OmegaExpr::LogX => (x as f64).ln(),
            OmegaExpr::Log3X => (3.0 * x as f64).ln(),
            OmegaExpr::Const(c) => c,
        }
    }
}

impl FromStr for OmegaExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "logx" => Ok(OmegaExpr::LogX),
            "log3x" => Ok(OmegaExpr::Log3X),
            t => {
                let c = t
                    .strip_prefix("const:")
                    .ok_or_else(|| Error::Parse(format!("unknown omega expression `{t}` (expected logx, log3x or const:c)")))?;
                match c.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(OmegaExpr::Const(v)),
                    _ => Err(Error::Parse(format!("bad omega constant `{c}`"))),
                }
            }
        }
    }
}

impl fmt::Display for OmegaExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaExpr::LogX => write!(f, "logx"),
            OmegaExpr::Log3X => write!(f, "log3x"),
            OmegaExpr::Const(c) => write!(f, "const:{c}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    Logarithmic,
    Natural,
}

impl FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "log" | "logarithmic" => Ok(Weighting::Logarithmic),
            "natural" => Ok(Weighting::Natural),
            t => Err(Error::Parse(format!("unknown weighting `{t}` (expected log or natural)"))),
        }
    }
}

/// Which integers are tallied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    /// `2 ≤ n ≤ x`
    Full,
    /// `x/ω ≤ n ≤ x`
    Tail,
}

impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "full" => Ok(Window::Full),
            "tail" => Ok(Window::Tail),
            t => Err(Error::Parse(format!("unknown window `{t}` (expected full or tail)"))),
        }
    }
}

/// Parameter names an experiment may read.
pub const PARAM_KEYS: [&str; 10] = ["a", "b", "c", "d", "k", "l", "alpha", "Q", "h", "eps"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub x: u64,
    pub omega: OmegaExpr,
    pub window: Window,
    /// `None` picks the experiment's own default.
    pub weighting: Option<Weighting>,
    pub params: BTreeMap<String, f64>,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            x: 1_000_000,
            omega: OmegaExpr::LogX,
            window: Window::Tail,
            weighting: None,
            params: BTreeMap::new(),
            seed: DEFAULT_SEED,
        }
    }
}

impl ExperimentConfig {
    pub fn new(x: u64) -> Self {
        Self { x, ..Self::default() }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn with_window(mut self, window: Window) -> Self {
        self.window = window;
        self
    }

    pub fn with_weighting(mut self, weighting: Weighting) -> Self {
        self.weighting = Some(weighting);
        self
    }

    pub fn with_omega(mut self, omega: OmegaExpr) -> Self {
        self.omega = omega;
        self
    }

    pub fn param(&self, key: &str) -> Result<f64> {
        self.params
            .get(key)
            .copied()
            .ok_or_else(|| Error::Validation(format!("missing parameter `{key}`")))
    }

    fn exponent(&self, key: &str) -> Result<f64> {
        let v = self.param(key)?;
        if v > 0.0 && v <= 1.0 {
            Ok(v)
        } else {
            domain(format!("parameter `{key}` must lie in (0, 1], got {v}"))
        }
    }

    fn count(&self, key: &str) -> Result<usize> {
        let v = self.param(key)?;
        if v >= 0.0 && v.fract() == 0.0 && v < 64.0 {
            Ok(v as usize)
        } else {
            domain(format!("parameter `{key}` must be a small nonnegative integer, got {v}"))
        }
    }

    /// Integer bounds of the tallied window.
    pub fn bounds(&self) -> Result<(u64, u64)> {
        if self.x < 16 {
            return domain(format!("x must be at least 16, got {}", self.x));
        }
        match self.window {
            Window::Full => Ok((2, self.x)),
            Window::Tail => {
                let (lo, hi) = log_window(self.x, self.omega.eval(self.x))?;
                Ok((lo.max(2), hi))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub label: String,
    pub x: u64,
    pub weighting: Weighting,
    pub window: Window,
    /// `ω(x)` for tail windows.
    pub omega: Option<f64>,
    pub estimate: f64,
    pub target: Option<f64>,
    pub abs_error: Option<f64>,
    /// Numerical uncertainty of the target.
    pub target_error: Option<f64>,
    pub n_terms: u64,
}

impl DensityEstimate {
    fn with_target(mut self, target: f64, target_error: f64) -> Self {
        self.target = Some(target);
        self.abs_error = Some((self.estimate - target).abs());
        self.target_error = Some(target_error);
        self
    }
}

/// Best rational approximation `r/s` of `a ≥ 0` with `s ≤ 1000`.
pub fn rational_approx(a: f64) -> (u64, u64) {
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut v = a;
    for _ in 0..64 {
        let t = v.floor();
        let (p2, q2) = (t as u64 * p1 + p0, t as u64 * q1 + q0);
        if q2 > 1000 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = v - t;
        if frac < 1e-12 {
            break;
        }
        v = 1.0 / frac;
    }
    (p1, q1)
}

/// Compares `big` with `small · n^a`. Near-ties in floating point are
/// settled exactly with `a` replaced by its rational approximation.
pub fn cmp_scaled(big: u64, small: u64, n: u64, a: f64) -> Ordering {
    let d = (big as f64).ln() - (small as f64).ln() - a * (n as f64).ln();
    if d > 1e-12 {
        return Ordering::Greater;
    }
    if d < -1e-12 {
        return Ordering::Less;
    }
    let (r, s) = rational_approx(a);
    let lhs = BigUint::from(big).pow(s as u32);
    let rhs = BigUint::from(small).pow(s as u32) * BigUint::from(n).pow(r as u32);
    lhs.cmp(&rhs)
}

/// `big > small · n^a`.
#[inline]
pub fn exceeds_scaled(big: u64, small: u64, n: u64, a: f64) -> bool {
    cmp_scaled(big, small, n, a) == Ordering::Greater
}

/// Distinct primes of a factor list strictly above `n^a`.
fn omega_above(primes: &[u64], n: u64, a: f64) -> usize {
    primes.iter().rev().take_while(|&&p| exceeds_scaled(p, 1, n, a)).count()
}

struct Tally {
    events: Vec<f64>,
    n_terms: u64,
}

/// Tallies `events` indicator bits over the window; `f(chunk, n)` returns the
/// bitmask of events `n` belongs to. Segments extend `pad_after` past each
/// chunk so `n + pad_after` can be looked up.
fn tally<F>(cfg: &ExperimentConfig, weighting: Weighting, pad_after: u64, events: usize, f: F) -> Result<Tally>
where
    F: Fn(&Chunk<'_>, u64) -> u64 + Sync,
{
    assert!(events <= 64);
    let (lo, hi) = cfg.bounds()?;
    let parts = scan_factored(lo, hi + 1, 0, pad_after, |c| {
        let mut acc = vec![Neumaier::new(); events];
        let mut total = Neumaier::new();
        for n in c.lo..c.hi {
            let w = match weighting {
                Weighting::Logarithmic => 1.0 / n as f64,
                Weighting::Natural => 1.0,
            };
            total.add(w);
            let mut mask = f(c, n);
            while mask != 0 {
                let e = mask.trailing_zeros() as usize;
                acc[e].add(w);
                mask &= mask - 1;
            }
        }
        (acc, total)
    })?;
    let mut acc = vec![Neumaier::new(); events];
    let mut total = Neumaier::new();
    for (a, t) in &parts {
        for (d, s) in acc.iter_mut().zip(a) {
            d.merge(s);
        }
        total.merge(t);
    }
    let total = total.value();
    Ok(Tally { events: acc.iter().map(|a| a.value() / total).collect(), n_terms: hi + 1 - lo })
}

impl Tally {
    fn estimate(&self, cfg: &ExperimentConfig, weighting: Weighting, label: impl Into<String>, event: usize) -> DensityEstimate {
        DensityEstimate {
            label: label.into(),
            x: cfg.x,
            weighting,
            window: cfg.window,
            omega: (cfg.window == Window::Tail).then(|| cfg.omega.eval(cfg.x)),
            estimate: self.events[event],
            target: None,
            abs_error: None,
            target_error: None,
            n_terms: self.n_terms,
        }
    }
}

fn factorial(k: usize) -> f64 {
    (2..=k).map(|i| i as f64).product()
}

/// `I_{a,k}/k!` and its uncertainty.
fn marginal_target(a: f64, k: usize, seed: u64) -> Result<(f64, f64)> {
    let r = integral_i(default_table(), &IntegralRequest::new(a, k)?.with_seed(seed))?;
    let f = factorial(k);
    Ok((r.value / f, r.error_bound / f))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaJointReport {
    /// `ω_{>n^a}(n) = k` and `ω_{>n^b}(n+1) = ℓ`, against the product target.
    pub joint: DensityEstimate,
    /// `ω_{>n^a}(n) = k` alone, against `I_{a,k}/k!`.
    pub marginal_n: DensityEstimate,
    /// `ω_{>n^b}(n+1) = ℓ` alone, against `I_{b,ℓ}/ℓ!`.
    pub marginal_shift: DensityEstimate,
}

/// Joint law of the number of large prime factors of `n` and `n+1`.
pub fn exp_omega_joint(cfg: &ExperimentConfig) -> Result<OmegaJointReport> {
    let (a, b) = (cfg.exponent("a")?, cfg.exponent("b")?);
    let (k, l) = (cfg.count("k")?, cfg.count("l")?);
    if a >= 1.0 || b >= 1.0 {
        return domain("a and b must lie in (0, 1)");
    }
    let w = cfg.weighting.unwrap_or(Weighting::Logarithmic);
    let t = tally(cfg, w, 1, 3, |c, n| {
        let here = omega_above(c.seg.factors_at(c.offset(n)).primes(), n, a) == k;
        let next = omega_above(c.seg.factors_at(c.offset(n + 1)).primes(), n, b) == l;
        u64::from(here && next) | u64::from(here) << 1 | u64::from(next) << 2
    })?;
    let (ta, ea) = marginal_target(a, k, cfg.seed)?;
    let (tb, eb) = marginal_target(b, l, cfg.seed)?;
    Ok(OmegaJointReport {
        joint: t.estimate(cfg, w, format!("omega_joint(a={a},b={b},k={k},l={l})"), 0).with_target(ta * tb, ta * eb + tb * ea),
        marginal_n: t.estimate(cfg, w, format!("omega_marginal(a={a},k={k})"), 1).with_target(ta, ea),
        marginal_shift: t.estimate(cfg, w, format!("omega_marginal_shift(b={b},l={l})"), 2).with_target(tb, eb),
    })
}

/// `P⁺(n) ≤ n^a` and `P⁺(n+1) ≤ n^b`, against `ρ(1/a)ρ(1/b)`.
pub fn exp_erdos_pomerance(cfg: &ExperimentConfig) -> Result<DensityEstimate> {
    let (a, b) = (cfg.exponent("a")?, cfg.exponent("b")?);
    let w = cfg.weighting.unwrap_or(Weighting::Logarithmic);
    let t = tally(cfg, w, 1, 1, |c, n| {
        let p = c.seg.lpf_at(c.offset(n));
        let q = c.seg.lpf_at(c.offset(n + 1));
        u64::from(!exceeds_scaled(p, 1, n, a) && !exceeds_scaled(q, 1, n, b))
    })?;
    let table = default_table();
    let target = table.rho(1.0 / a) * table.rho(1.0 / b);
    Ok(t.estimate(cfg, w, format!("erdos_pomerance(a={a},b={b})"), 0).with_target(target, 0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErdosTuranReport {
    /// `P⁺(n) < P⁺(n+1)`, target 1/2.
    pub less: DensityEstimate,
    pub greater: DensityEstimate,
    /// Ties; empty for `n ≥ 2` since `n` and `n+1` share no prime.
    pub equal: DensityEstimate,
}

pub fn exp_erdos_turan(cfg: &ExperimentConfig) -> Result<ErdosTuranReport> {
    let w = cfg.weighting.unwrap_or(Weighting::Logarithmic);
    let t = tally(cfg, w, 1, 3, |c, n| {
        let p = c.seg.lpf_at(c.offset(n));
        let q = c.seg.lpf_at(c.offset(n + 1));
        1 << (p.cmp(&q) as i8 + 1) as u32
    })?;
    Ok(ErdosTuranReport {
        less: t.estimate(cfg, w, "erdos_turan(less)", 0).with_target(0.5, 0.0),
        equal: t.estimate(cfg, w, "erdos_turan(equal)", 1).with_target(0.0, 0.0),
        greater: t.estimate(cfg, w, "erdos_turan(greater)", 2).with_target(0.5, 0.0),
    })
}

/// `P⁺(n+1) > P⁺(n)·n^α` for each α in one pass, against `∫∫_{T_α} u(x)u(y)`.
pub fn exp_alpha_shift_curve(cfg: &ExperimentConfig, alphas: &[f64]) -> Result<Vec<DensityEstimate>> {
    if alphas.len() > 64 {
        return Err(Error::Capacity("at most 64 alphas per pass".into()));
    }
    if let Some(a) = alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return domain(format!("alpha must lie in [0, 1], got {a}"));
    }
    let w = cfg.weighting.unwrap_or(Weighting::Logarithmic);
    let t = tally(cfg, w, 1, alphas.len(), |c, n| {
        let p = c.seg.lpf_at(c.offset(n));
        let q = c.seg.lpf_at(c.offset(n + 1));
        alphas
            .iter()
            .enumerate()
            .filter(|(_, &a)| exceeds_scaled(q, p, n, a))
            .fold(0u64, |m, (i, _)| m | 1 << i)
    })?;
    alphas
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let target = integral_t(default_table(), a, DEFAULT_T_NODES)?;
            Ok(t.estimate(cfg, w, format!("alpha_shift(alpha={a})"), i).with_target(target.value, target.error_bound))
        })
        .collect()
}

pub fn exp_alpha_shift(cfg: &ExperimentConfig) -> Result<DensityEstimate> {
    let a = cfg.param("alpha")?;
    Ok(exp_alpha_shift_curve(cfg, &[a])?.remove(0))
}

/// `P⁺(n) ∈ [n^a, n^b]` and `P⁺(n+1) ∈ [n^c, n^d]`, natural weighting by
/// default, against the rectangle density.
pub fn exp_hildebrand_rect(cfg: &ExperimentConfig) -> Result<DensityEstimate> {
    let (a, b, c, d) = (cfg.param("a")?, cfg.param("b")?, cfg.param("c")?, cfg.param("d")?);
    let target = rect_density(default_table(), a, b, c, d)?;
    let w = cfg.weighting.unwrap_or(Weighting::Natural);
    let inside = |p: u64, n: u64, lo: f64, hi: f64| {
        cmp_scaled(p, 1, n, lo) != Ordering::Less && cmp_scaled(p, 1, n, hi) != Ordering::Greater
    };
    let t = tally(cfg, w, 1, 1, |ch, n| {
        let p = ch.seg.lpf_at(ch.offset(n));
        let q = ch.seg.lpf_at(ch.offset(n + 1));
        u64::from(inside(p, n, a, b) && inside(q, n, c, d))
    })?;
    Ok(t.estimate(cfg, w, format!("hildebrand_rect(a={a},b={b},c={c},d={d})"), 0).with_target(target, 0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingReport {
    pub k: usize,
    /// Each permutation lists the shifts `1..=k` from smallest to largest
    /// `P⁺(n+i)`.
    pub orderings: Vec<(Vec<usize>, DensityEstimate)>,
    pub ties: DensityEstimate,
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Relative order of `P⁺(n+1), …, P⁺(n+k)` for `2 ≤ k ≤ 4`. Exploratory.
pub fn exp_ordering(cfg: &ExperimentConfig) -> Result<OrderingReport> {
    let k = cfg.count("k")?;
    if k > 4 {
        return Err(Error::Capacity(format!("k = {k} gives {} orderings; at most k = 4", factorial(k))));
    }
    if k < 2 {
        return domain(format!("k must be at least 2, got {k}"));
    }
    let perms = permutations(k);
    let w = cfg.weighting.unwrap_or(Weighting::Logarithmic);
    let t = tally(cfg, w, k as u64, perms.len() + 1, |c, n| {
        let mut vals: Vec<(u64, usize)> = (1..=k).map(|i| (c.seg.lpf_at(c.offset(n + i as u64)), i)).collect();
        vals.sort_unstable();
        if vals.windows(2).any(|w| w[0].0 == w[1].0) {
            return 1 << perms.len();
        }
        let order: Vec<usize> = vals.iter().map(|&(_, i)| i).collect();
        1 << perms.binary_search(&order).expect("every ordering is listed")
    })?;
    let target = 1.0 / factorial(k);
    let orderings = perms
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let label = format!("ordering({p:?})");
            (p.clone(), t.estimate(cfg, w, label, i).with_target(target, 0.0))
        })
        .collect();
    Ok(OrderingReport { k, orderings, ties: t.estimate(cfg, w, "ordering(ties)", perms.len()) })
}

/// `(1/log x) Σ_{n ≤ x} λ_{>x^ε}(n) λ_{>x^ε}(n+1)/n`. The window is always
/// `1 ≤ n ≤ x` and the normalization is `log x`, whatever `cfg` says.
pub fn exp_truncated_liouville(cfg: &ExperimentConfig) -> Result<f64> {
    let eps = cfg.param("eps")?;
    if !(eps > 0.0 && eps < 1.0) {
        return domain(format!("eps must lie in (0, 1), got {eps}"));
    }
    let x = cfg.x;
    if x < 16 {
        return domain(format!("x must be at least 16, got {x}"));
    }
    let g = MultFuncSpec::truncated_liouville_gt((x as f64).powf(eps).max(1.0))?;
    let parts = scan_factored(1, x + 1, 0, 1, |c| {
        let mut acc = Neumaier::new();
        for n in c.lo..c.hi {
            let a = g.eval_factored(n, &c.seg.factors_at(c.offset(n)));
            let b = g.eval_factored(n + 1, &c.seg.factors_at(c.offset(n + 1)));
            acc.add(a * b / n as f64);
        }
        acc
    })?;
    let mut total = Neumaier::new();
    for p in &parts {
        total.merge(p);
    }
    Ok(total.value() / (x as f64).ln())
}

pub const EXPERIMENTS: [&str; 7] = [
    "omega_joint",
    "erdos_pomerance",
    "erdos_turan",
    "alpha_shift",
    "hildebrand_rect",
    "ordering",
    "truncated_liouville",
];

/// Uniform result of [`run_experiment`]: the headline estimate plus any
/// companion estimates the experiment produces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub estimate: DensityEstimate,
    pub components: Vec<DensityEstimate>,
}

pub fn run_experiment(name: &str, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let (estimate, components) = match name {
        "omega_joint" => {
            let r = exp_omega_joint(cfg)?;
            (r.joint, vec![r.marginal_n, r.marginal_shift])
        }
        "erdos_pomerance" => (exp_erdos_pomerance(cfg)?, Vec::new()),
        "erdos_turan" => {
            let r = exp_erdos_turan(cfg)?;
            (r.less, vec![r.greater, r.equal])
        }
        "alpha_shift" => (exp_alpha_shift(cfg)?, Vec::new()),
        "hildebrand_rect" => (exp_hildebrand_rect(cfg)?, Vec::new()),
        "ordering" => {
            let r = exp_ordering(cfg)?;
            let mut all: Vec<_> = r.orderings.into_iter().map(|(_, e)| e).collect();
            let first = all.remove(0);
            all.push(r.ties);
            (first, all)
        }
        "truncated_liouville" => {
            let v = exp_truncated_liouville(cfg)?;
            let e = DensityEstimate {
                label: format!("truncated_liouville(eps={})", cfg.param("eps")?),
                x: cfg.x,
                weighting: Weighting::Logarithmic,
                window: Window::Full,
                omega: None,
                estimate: v,
                target: None,
                abs_error: None,
                target_error: None,
                n_terms: cfg.x,
            };
            (e, Vec::new())
        }
        _ => {
            return Err(Error::Parse(format!(
                "unknown experiment `{name}` (known: {})",
                EXPERIMENTS.join(", ")
            )))
        }
    };
    Ok(ExperimentReport { name: name.to_string(), estimate, components })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub estimate: f64,
    pub target: Option<f64>,
    pub abs_error: Option<f64>,
}

/// Values `start, start+step, …` up to `stop` inclusive (with a little
/// tolerance for accumulated rounding).
pub fn sweep_values(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return domain(format!("bad sweep range {start}:{stop}:{step}"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    if n > 10_000 {
        return Err(Error::Capacity(format!("sweep with {} points", n + 1)));
    }
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

/// Runs one experiment per value of `param`.
pub fn sweep(name: &str, cfg: &ExperimentConfig, param: &str, values: &[f64]) -> Result<Vec<SweepRow>> {
    if !PARAM_KEYS.contains(&param) {
        return Err(Error::Parse(format!("unknown parameter `{param}`")));
    }
    if name == "alpha_shift" && param == "alpha" {
        return Ok(exp_alpha_shift_curve(cfg, values)?
            .into_iter()
            .zip(values)
            .map(|(e, &v)| SweepRow { param: v, estimate: e.estimate, target: e.target, abs_error: e.abs_error })
            .collect());
    }
    values
        .iter()
        .map(|&v| {
            let e = run_experiment(name, &cfg.clone().with(param, v))?.estimate;
            Ok(SweepRow { param: v, estimate: e.estimate, target: e.target, abs_error: e.abs_error })
        })
        .collect()
}
