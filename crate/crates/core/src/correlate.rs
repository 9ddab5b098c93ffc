//! Logarithmically averaged binary correlations
//! `f_{x,ω}(h) = (1/log ω) Σ_{x/ω ≤ n ≤ x} g₁(n) g₂(n+h) / n`
//! and their comparison with the product of mean values over `[x, 2x]`.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::multfunc::{log_window, mean_value, MultFuncSpec};
use crate::scalar::Neumaier;
use crate::scan::{scan_factored, scan_plain};
use crate::sieve::Factorization;

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRequest {
    pub g1: MultFuncSpec,
    pub g2: MultFuncSpec,
    pub h: i64,
    pub x: u64,
    pub omega: f64,
}

impl CorrelationRequest {
    pub fn new(g1: MultFuncSpec, g2: MultFuncSpec, h: i64, x: u64, omega: f64) -> Result<Self> {
        if h == 0 {
            return domain("shift h must be nonzero");
        }
        if x < 100 {
            return domain(format!("x must be at least 100, got {x}"));
        }
        if h.unsigned_abs() >= x {
            return domain(format!("shift {h} is not smaller than x = {x}"));
        }
        log_window(x, omega)?;
        Ok(Self { g1, g2, h, x, omega })
    }

    /// Integer window `[⌈x/ω⌉, x]`, trimmed so that `n + h ≥ 1`.
    pub fn window(&self) -> (u64, u64) {
        let (lo, hi) = log_window(self.x, self.omega).expect("validated at construction");
        let min_n = if self.h < 0 { self.h.unsigned_abs() + 1 } else { 1 };
        (lo.max(min_n), hi)
    }
}

/// Runs `term(g₁(n), g₂(n+h))` over the window, weighting each of the `K`
/// outputs by `1/n`. Returns the weighted sums and the number of terms.
fn pair_scan<const K: usize, F>(req: &CorrelationRequest, term: F) -> Result<([f64; K], u64)>
where
    F: Fn(f64, f64) -> [f64; K] + Sync,
{
    let (lo, hi) = req.window();
    let h = req.h;
    let add = |acc: &mut [Neumaier<f64>; K], n: u64, a: f64, b: f64| {
        let w = 1.0 / n as f64;
        for (s, t) in acc.iter_mut().zip(term(a, b)) {
            if t != 0.0 {
                s.add(t * w);
            }
        }
    };
    let parts: Vec<[Neumaier<f64>; K]> = if req.g1.needs_factors() || req.g2.needs_factors() {
        let before = if h < 0 { h.unsigned_abs() } else { 0 };
        let after = if h > 0 { h as u64 } else { 0 };
        scan_factored(lo, hi + 1, before, after, |c| {
            let mut acc = [Neumaier::new(); K];
            for n in c.lo..c.hi {
                let m = n.checked_add_signed(h).expect("window keeps n + h positive");
                let a = req.g1.eval_factored(n, &c.seg.factors_at(c.offset(n)));
                let b = req.g2.eval_factored(m, &c.seg.factors_at(c.offset(m)));
                add(&mut acc, n, a, b);
            }
            acc
        })?
    } else {
        let empty = Factorization::from_parts(&[], &[]);
        scan_plain(lo, hi + 1, |s, e| {
            let mut acc = [Neumaier::new(); K];
            for n in s..e {
                let m = n.checked_add_signed(h).expect("window keeps n + h positive");
                add(&mut acc, n, req.g1.eval_factored(n, &empty), req.g2.eval_factored(m, &empty));
            }
            acc
        })
    };
    let mut total = [Neumaier::new(); K];
    for p in &parts {
        for (t, s) in total.iter_mut().zip(p) {
            t.merge(s);
        }
    }
    Ok((total.map(|a| a.value()), hi + 1 - lo))
}

/// `f_{x,ω}(h)`.
pub fn log_correlation(req: &CorrelationRequest) -> Result<f64> {
    let ([s], _) = pair_scan(req, |a, b| [a * b])?;
    Ok(s / req.omega.ln())
}

/// The four log-averages from which the centred correlation expands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationPieces {
    /// `(1/log ω) Σ g₁(n)g₂(n+h)/n`
    pub lhs: f64,
    /// `(1/log ω) Σ g₁(n)/n`
    pub g1_mean: f64,
    /// `(1/log ω) Σ g₂(n+h)/n`
    pub g2_shifted_mean: f64,
    /// `(1/log ω) Σ 1/n`
    pub one_mean: f64,
}

impl CorrelationPieces {
    /// `lhs − δ₁·g2_shifted_mean − δ₂·g1_mean + δ₁δ₂·one_mean`.
    pub fn expand(&self, delta1: f64, delta2: f64) -> f64 {
        self.lhs - delta1 * self.g2_shifted_mean - delta2 * self.g1_mean + delta1 * delta2 * self.one_mean
    }
}

pub fn correlation_pieces(req: &CorrelationRequest) -> Result<CorrelationPieces> {
    let ([lhs, g1, g2, one], _) = pair_scan(req, |a, b| [a * b, a, b, 1.0])?;
    let l = req.omega.ln();
    Ok(CorrelationPieces { lhs: lhs / l, g1_mean: g1 / l, g2_shifted_mean: g2 / l, one_mean: one / l })
}

/// `(1/log ω) Σ (g₁(n) − δ₁)(g₂(n+h) − δ₂)/n` with `δⱼ` the mean values
/// over `[x, 2x]`, summed directly.
pub fn normalized_correlation(req: &CorrelationRequest) -> Result<f64> {
    let d1 = mean_value(&req.g1, req.x)?;
    let d2 = mean_value(&req.g2, req.x)?;
    normalized_correlation_with(req, d1, d2)
}

pub fn normalized_correlation_with(req: &CorrelationRequest, delta1: f64, delta2: f64) -> Result<f64> {
    let ([s], _) = pair_scan(req, |a, b| [(a - delta1) * (b - delta2)])?;
    Ok(s / req.omega.ln())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub g1: MultFuncSpec,
    pub g2: MultFuncSpec,
    pub h: i64,
    pub x: u64,
    pub omega: f64,
    pub lhs: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub rhs: f64,
    pub discrepancy: f64,
    pub n_terms: u64,
}

/// Both sides of the correlation asymptotic: `f_{x,ω}(h)` against `δ₁δ₂`.
pub fn theorem13_check(req: &CorrelationRequest) -> Result<CorrelationReport> {
    let ([s], n_terms) = pair_scan(req, |a, b| [a * b])?;
    let lhs = s / req.omega.ln();
    let delta1 = mean_value(&req.g1, req.x)?;
    let delta2 = mean_value(&req.g2, req.x)?;
    let rhs = delta1 * delta2;
    Ok(CorrelationReport {
        g1: req.g1.clone(),
        g2: req.g2.clone(),
        h: req.h,
        x: req.x,
        omega: req.omega,
        lhs,
        delta1,
        delta2,
        rhs,
        discrepancy: (lhs - rhs).abs(),
        n_terms,
    })
}

/// One [`theorem13_check`] per `x`; `make` builds the request for each `x`
/// so that thresholds like `y = x^{1/2}` can follow it.
pub fn discrepancy_trend<F>(make: F, xs: &[u64]) -> Result<Vec<(u64, f64)>>
where
    F: Fn(u64) -> Result<CorrelationRequest>,
{
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return domain("x values must be strictly ascending");
    }
    xs.iter()
        .map(|&x| Ok((x, theorem13_check(&make(x)?)?.discrepancy)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn one() -> MultFuncSpec {
        MultFuncSpec::constant_one()
    }

    #[test]
    fn zero_shift_rejected() {
        let e = CorrelationRequest::new(one(), one(), 0, 1000, 3.0).unwrap_err();
        assert_eq!(e, Error::Domain("shift h must be nonzero".into()));
        assert!(CorrelationRequest::new(one(), one(), 1, 50, 2.0).is_err());
        assert!(CorrelationRequest::new(one(), one(), 1, 1000, 1.0).is_err());
        assert!(CorrelationRequest::new(one(), one(), 1, 1000, 100.0).is_err());
    }

    #[test]
    fn constant_pair_is_harmonic() {
        let x = 1_000_000;
        let om = (3.0 * x as f64).ln();
        let req = CorrelationRequest::new(one(), one(), 1, x, om).unwrap();
        let lo = (x as f64 / om).ceil() as u64;
        let h: f64 = (lo..=x).map(|n| 1.0 / n as f64).sum();
        assert!((log_correlation(&req).unwrap() - h / om.ln()).abs() < 1e-12);
        let r = theorem13_check(&req).unwrap();
        assert!(r.discrepancy <= 3.0 / om.ln());
        assert_eq!(r.n_terms, x - lo + 1);
    }

    #[test]
    fn negative_shift_skips_nonpositive_arguments() {
        let req = CorrelationRequest::new(one(), one(), -50, 100, (300f64).ln()).unwrap();
        assert_eq!(req.window(), (51, 100));
    }

    #[test]
    fn centred_constant_vanishes() {
        let req = CorrelationRequest::new(one(), one(), 2, 10_000, 5.0).unwrap();
        let v = normalized_correlation(&req).unwrap();
        assert!(v.abs() < 1e-7, "{v}");
    }

    #[test]
    fn trend_requires_ascending() {
        let mk = |x| CorrelationRequest::new(one(), one(), 1, x, 2.0);
        assert!(discrepancy_trend(mk, &[1000, 100]).is_err());
        let t = discrepancy_trend(mk, &[1000, 10_000, 100_000]).unwrap();
        assert!(t.windows(2).all(|w| w[1].1 <= w[0].1));
    }
}
