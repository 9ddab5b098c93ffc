//! Dickmann's function ρ and the smooth-number densities built from it.
//!
//! ρ is 1 on [0, 1] and satisfies `u ρ(u) = ∫_{u−1}^{u} ρ(t) dt` beyond. The
//! table is produced by an implicit trapezoid march on a grid aligned with
//! the integers, run at `h` and `h/2` and Richardson-combined, so the stored
//! values are fourth-order accurate. Between grid points ρ is a monotone
//! Hermite cubic whose node slopes come straight from `u ρ'(u) = −ρ(u−1)`.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::quadrature::GaussLegendre;
use crate::scalar::{from_usize, lit, Neumaier, Real};

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_U_MAX: f64 = 40.0;
pub const DEFAULT_TOL: f64 = 1e-8;
/// Gauss–Legendre nodes per smooth piece for [`integral_t`].
pub const DEFAULT_T_NODES: usize = 32;
/// Gauss–Legendre nodes per axis piece for [`integral_i`].
pub const DEFAULT_I_NODES: usize = 64;
pub const DEFAULT_MC_SAMPLES: usize = 1 << 20;
pub const DEFAULT_SEED: u64 = 0x5eed;

/// A value read from a table, flagged when it lies beyond the tabulated range
/// and was replaced by 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eval<T> {
    pub value: T,
    pub truncated: bool,
}

/// ρ on the grid `0, h, 2h, …, u_max`.
#[derive(Debug, Clone)]
pub struct RhoTable<T> {
    per_unit: usize,
    values: Vec<T>,
    max_residual: T,
}

/// One implicit trapezoid march with `per_unit` steps per unit and `n` steps
/// in total. No extrapolation and no residual check.
pub fn trapezoid_pass<T: Real>(per_unit: usize, n: usize) -> Result<Vec<T>> {
    let m = per_unit;
    let h = T::one() / from_usize(m);
    let half = lit::<T>(0.5);
    let mut v = vec![T::one(); m.min(n) + 1];
    if n <= m {
        return Ok(v);
    }
    v.reserve(n - m);
    let mut window = T::zero();
    for i in m + 1..=n {
        // resynchronise the running sum once per unit so drift stays relative
        if (i - m - 1) % m == 0 {
            window = v[i - m + 1..i].iter().fold(T::zero(), |a, &b| a + b);
        }
        let u = from_usize::<T>(i) / from_usize(m);
        let r = h * (v[i - m] * half + window) / (u - h * half);
        if !(r.is_finite() && r > T::zero()) {
            return Err(Error::Numeric(format!(
                "implicit step produced {r:?} at grid point u = {u} (underflow or overflow)"
            )));
        }
        v.push(r);
        window = window + r - v[i - m + 1];
    }
    Ok(v)
}

fn grid_size(step: f64, u_max: f64) -> Result<(usize, usize)> {
    if !(step > 0.0 && step <= 0.01) {
        return domain(format!("step must lie in (0, 0.01], got {step}"));
    }
    if !(u_max >= 2.0 && u_max.is_finite()) {
        return domain(format!("u_max must be at least 2, got {u_max}"));
    }
    let m = (1.0 / step).round();
    if ((1.0 / step) - m).abs() > 1e-9 * m {
        return domain(format!("1/step must be an integer so the grid hits every integer, got step {step}"));
    }
    let m = m as usize;
    let n = (u_max * m as f64 - 1e-9).ceil() as usize;
    if n.checked_mul(2).is_none_or(|c| c > 1 << 32) {
        return Err(Error::Capacity(format!("grid with {n} points is too large")));
    }
    Ok((m, n))
}

/// Builds a Richardson-extrapolated table and checks the delay identity at
/// every grid point past 1.
pub fn build_rho<T: Real>(step: f64, u_max: f64, tol: f64) -> Result<RhoTable<T>> {
    let (m, n) = grid_size(step, u_max)?;
    let coarse = trapezoid_pass::<T>(m, n)?;
    let fine = trapezoid_pass::<T>(2 * m, 2 * n)?;
    let three = lit::<T>(3.0);
    let four = lit::<T>(4.0);
    let mut values = Vec::with_capacity(n + 1);
    for (i, &c) in coarse.iter().enumerate() {
        let r = if i <= m { T::one() } else { (four * fine[2 * i] - c) / three };
        if !(r > T::zero()) {
            return Err(Error::Numeric(format!(
                "extrapolated value is not positive at grid point u = {}",
                i as f64 / m as f64
            )));
        }
        values.push(r);
    }
    let mut table = RhoTable { per_unit: m, values, max_residual: T::zero() };
    let (worst, at) = table.max_residual_on(1.0, table.u_max_f64());
    if !(worst.to_f64().unwrap_or(f64::INFINITY) <= tol) {
        return Err(Error::Numeric(format!(
            "delay identity residual {worst:?} exceeds {tol:e} at grid point u = {at}"
        )));
    }
    table.max_residual = worst;
    Ok(table)
}

/// Shared `f64` table with the default grid.
pub fn default_table() -> &'static RhoTable<f64> {
    static TABLE: OnceLock<RhoTable<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        build_rho(DEFAULT_STEP, DEFAULT_U_MAX, DEFAULT_TOL).expect("default Dickmann table builds")
    })
}

impl<T: Real> RhoTable<T> {
    pub fn step(&self) -> T {
        T::one() / from_usize(self.per_unit)
    }

    pub fn per_unit(&self) -> usize {
        self.per_unit
    }

    pub fn u_max(&self) -> T {
        from_usize::<T>(self.values.len() - 1) / from_usize(self.per_unit)
    }

    fn u_max_f64(&self) -> f64 {
        (self.values.len() - 1) as f64 / self.per_unit as f64
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Largest delay-identity residual seen while building.
    pub fn max_residual(&self) -> T {
        self.max_residual
    }

    fn grid_u(&self, i: usize) -> T {
        from_usize::<T>(i) / from_usize(self.per_unit)
    }

    /// Exact slope at grid index `i`, taken from the right at `u = 1`.
    fn slope(&self, i: usize) -> T {
        if i < self.per_unit {
            T::zero()
        } else {
            -self.values[i - self.per_unit] / self.grid_u(i)
        }
    }

    /// ρ(u) with 1 on `[0, 1]`, 0 beyond `u_max`, and monotone cubic
    /// interpolation in between. Negative and NaN arguments give 1 and NaN.
    #[inline]
    pub fn rho(&self, u: T) -> T {
        if u <= T::one() {
            return if u.is_nan() { u } else { T::one() };
        }
        let pos = u * from_usize(self.per_unit);
        let last = self.values.len() - 1;
        let Some(i) = pos.floor().to_usize() else { return T::zero() };
        if i >= last {
            return if pos == from_usize(last) { self.values[last] } else { T::zero() };
        }
        let t = pos - from_usize(i);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let h = self.step();
        let secant = (y1 - y0) / h;
        let (mut d0, mut d1) = (self.slope(i), self.slope(i + 1));
        if secant == T::zero() {
            d0 = T::zero();
            d1 = T::zero();
        } else {
            let a = d0 / secant;
            let b = d1 / secant;
            let s = a * a + b * b;
            let nine = lit::<T>(9.0);
            if a < T::zero() {
                d0 = T::zero();
            }
            if b < T::zero() {
                d1 = T::zero();
            }
            if a >= T::zero() && b >= T::zero() && s > nine {
                let tau = lit::<T>(3.0) / s.sqrt();
                d0 = tau * a * secant;
                d1 = tau * b * secant;
            }
        }
        let one = T::one();
        let two = lit::<T>(2.0);
        let three = lit::<T>(3.0);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = two * t3 - three * t2 + one;
        let h10 = t3 - two * t2 + t;
        let h01 = three * t2 - two * t3;
        let h11 = t3 - t2;
        h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
    }

    /// Checked ρ(u).
    pub fn rho_at(&self, u: T) -> Result<Eval<T>> {
        if u.is_nan() || u < T::zero() {
            return domain(format!("rho needs u >= 0, got {u}"));
        }
        Ok(Eval { value: self.rho(u), truncated: u > self.u_max() })
    }

    /// `u(x) = ρ(1/x − 1)/x` without argument checks.
    #[inline]
    pub fn density(&self, x: T) -> T {
        self.rho(x.recip() - T::one()) / x
    }

    /// Checked `u(x)` for `0 < x ≤ 1`.
    pub fn u_density(&self, x: T) -> Result<Eval<T>> {
        if !(x > T::zero() && x <= T::one()) {
            return domain(format!("u(x) needs 0 < x <= 1, got {x}"));
        }
        let arg = x.recip() - T::one();
        Ok(Eval { value: self.density(x), truncated: arg > self.u_max() })
    }

    /// Smallest `x` at which `u(x)` is still tabulated.
    pub fn x_min(&self) -> T {
        (self.u_max() + T::one()).recip()
    }

    /// Largest grid slope `|ρ(u_{i+1}) − ρ(u_i)|/h`, an empirical Lipschitz
    /// constant for ρ.
    pub fn lipschitz_constant(&self) -> T {
        let h = self.step();
        self.values
            .windows(2)
            .map(|w| (w[1] - w[0]).abs() / h)
            .fold(T::zero(), T::max)
    }

    /// Largest `|u ρ(u) − ∫_{u−1}^{u} ρ|` over grid points in `(lo, hi]`,
    /// with the integral taken by a fourth-order rule split at integers.
    /// Returns the residual and where it occurs.
    pub fn max_residual_on(&self, lo: f64, hi: f64) -> (T, f64) {
        let m = self.per_unit;
        let first = ((lo.max(1.0) * m as f64).floor() as usize + 1).max(m + 1);
        let last = ((hi * m as f64).floor() as usize).min(self.values.len() - 1);
        let mut worst = (T::zero(), lo);
        for i in first..=last {
            let r = self.residual_at(i);
            if r > worst.0 {
                worst = (r, i as f64 / m as f64);
            }
        }
        worst
    }

    fn residual_at(&self, i: usize) -> T {
        let m = self.per_unit;
        let start = i - m;
        let split = (i / m) * m;
        let integral = if split > start && split < i {
            self.piece_integral(start, split) + self.piece_integral(split, i)
        } else {
            self.piece_integral(start, i)
        };
        (self.grid_u(i) * self.values[i] - integral).abs()
    }

    /// Simpson on an even number of intervals, 3/8 on the last three when the
    /// count is odd, trapezoid for a single interval.
    fn piece_integral(&self, a: usize, b: usize) -> T {
        let v = &self.values;
        let h = self.step();
        let c = b - a;
        match c {
            0 => T::zero(),
            1 => h * (v[a] + v[b]) * lit(0.5),
            _ => {
                let simpson_end = if c % 2 == 0 { b } else { b - 3 };
                let mut acc = Neumaier::new();
                if simpson_end > a {
                    acc.add(v[a] + v[simpson_end]);
                    for j in a + 1..simpson_end {
                        acc.add(v[j] * if (j - a) % 2 == 1 { lit(4.0) } else { lit(2.0) });
                    }
                }
                let simpson = acc.value() * h / lit(3.0);
                if simpson_end == b {
                    simpson
                } else {
                    let k = simpson_end;
                    let three8 = (v[k] + lit::<T>(3.0) * (v[k + 1] + v[k + 2]) + v[k + 3]) * h * lit(0.375);
                    simpson + three8
                }
            }
        }
    }
}

/// A quadrature value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Integral<T> {
    pub value: T,
    pub error_bound: T,
}

fn sorted_breaks<T: Real>(mut b: Vec<T>) -> Vec<T> {
    b.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    b.dedup_by(|x, y| (*x - *y).abs() <= T::epsilon() * lit(16.0));
    b
}

/// Points `1/(k+1)` strictly inside `(lo, hi)`, where `u` has derivative jumps.
fn density_kinks<T: Real>(lo: T, hi: T, out: &mut Vec<T>) {
    let mut k = 1usize;
    loop {
        let p = from_usize::<T>(k + 1).recip();
        if p <= lo {
            break;
        }
        if p < hi {
            out.push(p);
        }
        k += 1;
    }
}

fn t_value<T: Real>(table: &RhoTable<T>, alpha: T, rule: &GaussLegendre<T>) -> T {
    let x_min = table.x_min();
    let upper = T::one() - alpha;
    if upper <= x_min {
        return T::zero();
    }
    let mut outer = vec![x_min, upper];
    density_kinks(x_min, upper, &mut outer);
    let shifted: Vec<T> = {
        let mut s = Vec::new();
        density_kinks(x_min + alpha, T::one(), &mut s);
        s.into_iter().map(|p| p - alpha).filter(|&p| p > x_min && p < upper).collect()
    };
    outer.extend(shifted);
    let outer = sorted_breaks(outer);

    let inner = |s: T| {
        let mut b = vec![s, T::one()];
        density_kinks(s, T::one(), &mut b);
        rule.integrate_pieces(&sorted_breaks(b), |y| table.density(y))
    };
    let nodes: Vec<(T, T)> = outer
        .windows(2)
        .flat_map(|w| rule.mapped(w[0], w[1]).collect::<Vec<_>>())
        .collect();
    let terms: Vec<T> = nodes
        .par_iter()
        .map(|&(x, w)| w * table.density(x) * inner(x + alpha))
        .collect();
    terms.into_iter().collect::<Neumaier<T>>().value()
}

/// `∫∫_{y ≥ x+α} u(x)u(y) dx dy` over the unit square, as the iterated
/// integral `∫ u(x) ∫_{x+α}^1 u(y) dy dx` with Gauss–Legendre on every
/// smooth piece. `nodes` is the rule size per piece.
pub fn integral_t<T: Real>(table: &RhoTable<T>, alpha: T, nodes: usize) -> Result<Integral<T>> {
    if !(alpha >= T::zero() && alpha <= T::one()) {
        return domain(format!("alpha must lie in [0, 1], got {alpha}"));
    }
    if nodes < 2 {
        return domain("integral_T needs at least 2 nodes per piece");
    }
    let full = GaussLegendre::new(nodes)?;
    let half = GaussLegendre::new(nodes / 2)?;
    let value = t_value(table, alpha, &full);
    let coarse = t_value(table, alpha, &half);
    // mass of u below x_min is ρ(u_max); it is missing from both axes
    let truncation = table.rho(table.u_max()) * lit(2.0);
    Ok(Integral { value, error_bound: (value - coarse).abs() + truncation })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegralMethod {
    TensorQuadrature,
    MonteCarlo,
}

/// Parameters of `I_{α,m} = ∫ ρ((1−u₁−⋯−u_m)/α) / (u₁⋯u_m) du` over
/// `u_i ≥ α`, `u₁+⋯+u_m ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralRequest<T> {
    pub alpha: T,
    pub m: usize,
    pub method: IntegralMethod,
    /// Nodes per axis piece, or Monte Carlo samples.
    pub nodes_or_samples: usize,
    pub seed: u64,
}

impl<T: Real> IntegralRequest<T> {
    /// Tensor quadrature for `m ≤ 3`, Monte Carlo above.
    pub fn new(alpha: T, m: usize) -> Result<Self> {
        if !(alpha > T::zero() && alpha < T::one()) {
            return domain(format!("alpha must lie in (0, 1), got {alpha}"));
        }
        let (method, n) = if m <= 3 {
            (IntegralMethod::TensorQuadrature, DEFAULT_I_NODES)
        } else {
            (IntegralMethod::MonteCarlo, DEFAULT_MC_SAMPLES)
        };
        Ok(Self { alpha, m, method, nodes_or_samples: n, seed: DEFAULT_SEED })
    }

    pub fn with_method(mut self, method: IntegralMethod, nodes_or_samples: usize) -> Self {
        self.method = method;
        self.nodes_or_samples = nodes_or_samples;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// True when `mα ≥ 1`, so the region has no volume.
    pub fn is_empty_region(&self) -> bool {
        from_usize::<T>(self.m) * self.alpha >= T::one()
    }
}

/// Breakpoints on the axis `[α, 1 − s − rest·α]` where the innermost ρ
/// argument crosses an integer.
fn axis_breaks<T: Real>(alpha: T, s: T, rest: usize) -> Vec<T> {
    let lo = alpha;
    let hi = T::one() - s - from_usize::<T>(rest) * alpha;
    let mut b = vec![lo, hi];
    let mut j = rest;
    loop {
        let p = T::one() - s - from_usize::<T>(j) * alpha;
        if p <= lo {
            break;
        }
        if p < hi {
            b.push(p);
        }
        j += 1;
    }
    sorted_breaks(b)
}

fn tensor_level<T: Real>(table: &RhoTable<T>, rule: &GaussLegendre<T>, alpha: T, depth: usize, s: T) -> T {
    let rest = depth - 1;
    let hi = T::one() - s - from_usize::<T>(rest) * alpha;
    if hi <= alpha {
        return T::zero();
    }
    let breaks = axis_breaks(alpha, s, rest);
    rule.integrate_pieces(&breaks, |u| {
        let inner = if depth == 1 {
            table.rho((T::one() - s - u) / alpha)
        } else {
            tensor_level(table, rule, alpha, depth - 1, s + u)
        };
        inner / u
    })
}

fn tensor_integral<T: Real>(table: &RhoTable<T>, alpha: T, m: usize, nodes: usize) -> Result<T> {
    let rule = GaussLegendre::new(nodes)?;
    let breaks = axis_breaks(alpha, T::zero(), m - 1);
    let pts: Vec<(T, T)> = breaks
        .windows(2)
        .flat_map(|w| rule.mapped(w[0], w[1]).collect::<Vec<_>>())
        .collect();
    let terms: Vec<T> = pts
        .par_iter()
        .map(|&(u, w)| {
            let inner = if m == 1 {
                table.rho((T::one() - u) / alpha)
            } else {
                tensor_level(table, &rule, alpha, m - 1, u)
            };
            w * inner / u
        })
        .collect();
    Ok(terms.into_iter().collect::<Neumaier<T>>().value())
}

/// Stratified Monte Carlo on the shifted simplex `v_i = u_i − α ≥ 0`,
/// `Σ v_i ≤ 1 − mα`; the first coordinate of each draw is stratified.
fn monte_carlo_integral<T: Real>(table: &RhoTable<T>, alpha: T, m: usize, samples: usize, seed: u64) -> Result<Integral<T>> {
    if samples < 2 {
        return domain("Monte Carlo needs at least 2 samples");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let room = T::one() - from_usize::<T>(m) * alpha;
    let mut volume = room.powi(m as i32);
    for k in 2..=m {
        volume = volume / from_usize(k);
    }
    let mut uniforms = vec![T::zero(); m];
    let mut mean = Neumaier::new();
    let mut sq = Neumaier::new();
    let n = from_usize::<T>(samples);
    for s in 0..samples {
        uniforms[0] = (from_usize::<T>(s) + lit(rng.gen::<f64>())) / n;
        for u in uniforms.iter_mut().skip(1) {
            *u = lit(rng.gen::<f64>());
        }
        uniforms.sort_by(|a, b| a.partial_cmp(b).expect("finite uniforms"));
        let mut prev = T::zero();
        let mut denom = T::one();
        for &u in &uniforms {
            denom = denom * ((u - prev) * room + alpha);
            prev = u;
        }
        let used = prev * room;
        let f = table.rho((room - used) / alpha) / denom;
        mean.add(f);
        sq.add(f * f);
    }
    let mu = mean.value() / n;
    let var = (sq.value() / n - mu * mu).max(T::zero());
    let stderr = (var / n).sqrt() * volume;
    Ok(Integral { value: mu * volume, error_bound: stderr * lit(3.0) })
}

/// `I_{α,m}`; `m = 0` gives ρ(1/α) and an empty region gives exactly 0.
pub fn integral_i<T: Real>(table: &RhoTable<T>, req: &IntegralRequest<T>) -> Result<Integral<T>> {
    let alpha = req.alpha;
    if !(alpha > T::zero() && alpha < T::one()) {
        return domain(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    let zero = Integral { value: T::zero(), error_bound: T::zero() };
    if req.m == 0 {
        return Ok(Integral { value: table.rho(alpha.recip()), error_bound: T::zero() });
    }
    if req.is_empty_region() {
        return Ok(zero);
    }
    match req.method {
        IntegralMethod::TensorQuadrature => {
            if req.m > 6 {
                return Err(Error::Capacity(format!(
                    "tensor quadrature in {} dimensions; use Monte Carlo",
                    req.m
                )));
            }
            let n = req.nodes_or_samples.max(2);
            let value = tensor_integral(table, alpha, req.m, n)?;
            let coarse = tensor_integral(table, alpha, req.m, (n / 2).max(1))?;
            Ok(Integral { value, error_bound: (value - coarse).abs() })
        }
        IntegralMethod::MonteCarlo => monte_carlo_integral(table, alpha, req.m, req.nodes_or_samples, req.seed),
    }
}

/// `(ρ(1/d) − ρ(1/c))(ρ(1/b) − ρ(1/a))` for `0 < a < b ≤ 1`, `0 < c < d ≤ 1`.
pub fn rect_density<T: Real>(table: &RhoTable<T>, a: T, b: T, c: T, d: T) -> Result<T> {
    let ok = |lo: T, hi: T| lo > T::zero() && lo < hi && hi <= T::one();
    if !ok(a, b) {
        return domain(format!("need 0 < a < b <= 1, got a = {a}, b = {b}"));
    }
    if !ok(c, d) {
        return domain(format!("need 0 < c < d <= 1, got c = {c}, d = {d}"));
    }
    let r = |v: T| table.rho(v.recip());
    Ok((r(d) - r(c)) * (r(b) - r(a)))
}
