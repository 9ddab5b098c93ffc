//! Gauss–Legendre rules on `[-1, 1]`, mapped onto arbitrary intervals.

use crate::error::{domain, Result};
use crate::scalar::{from_usize, lit, Real};

#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Builds the `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return domain("Gauss-Legendre rule needs at least one node");
        }
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = from_usize::<T>(n);
        let half = lit::<T>(0.5);
        let tol = T::epsilon() * lit(4.0);
        for i in 0..(n + 1) / 2 {
            // Tricomi initial guess for the i-th largest root.
            let k = from_usize::<T>(i) + lit(0.75);
            let mut x = (T::PI() * k / (nf + half)).cos();
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let step = p / d;
                x = x - step;
                if step.abs() <= tol {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != T::zero() {
                dp = d;
            }
            let w = lit::<T>(2.0) / ((T::one() - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: T, b: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = (b - a) * lit(0.5);
        let mid = (a + b) * lit(0.5);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        if b <= a {
            return T::zero();
        }
        let mut acc = T::zero();
        for (x, w) in self.mapped(a, b) {
            acc = acc + w * f(x);
        }
        acc
    }

    /// Composite rule: one copy of the rule on each consecutive pair of `breaks`.
    pub fn integrate_pieces<F: FnMut(T) -> T>(&self, breaks: &[T], mut f: F) -> T {
        breaks
            .windows(2)
            .map(|w| self.integrate(w[0], w[1], &mut f))
            .fold(T::zero(), |a, b| a + b)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = from_usize::<T>(k);
        let p2 = ((lit::<T>(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (T::one(), T::zero());
    }
    let nf = from_usize::<T>(n);
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 16, 64, 101] {
            let rule = GaussLegendre::<f64>::new(n).unwrap();
            let s: f64 = rule.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n} s={s}");
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let rule = GaussLegendre::<f64>::new(6).unwrap();
        for deg in 0..12 {
            let got = rule.integrate(0.0, 1.0, |x| x.powi(deg));
            let want = 1.0 / (deg as f64 + 1.0);
            assert!((got - want).abs() < 1e-14, "deg={deg}");
        }
    }

    #[test]
    fn single_precision_rule() {
        let rule = GaussLegendre::<f32>::new(32).unwrap();
        let got = rule.integrate(0.0, std::f32::consts::PI, |x| x.sin());
        assert!((got - 2.0).abs() < 1e-5);
    }

    #[test]
    fn composite_matches_smooth_integral() {
        let rule = GaussLegendre::<f64>::new(16).unwrap();
        let got = rule.integrate_pieces(&[1.0, 2.0, 4.0, 8.0], |x| 1.0 / x);
        assert!((got - 8f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_nodes_rejected() {
        assert!(GaussLegendre::<f64>::new(0).is_err());
    }
}
