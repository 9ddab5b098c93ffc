//! Independent reference implementations used as test oracles. Nothing here
//! calls into the library.
#![allow(dead_code)]

/// Factorization by trial division.
pub fn trial_factor(mut n: u64) -> Vec<(u64, u8)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime_naive(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

pub fn primes_below(n: u64) -> Vec<u64> {
    (2..n).filter(|&p| is_prime_naive(p)).collect()
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Legendre symbol by Euler's criterion; `p` an odd prime below 2^32.
pub fn euler_symbol(n: u64, p: u64) -> i8 {
    match pow_mod(n % p, (p - 1) / 2, p) {
        0 => 0,
        1 => 1,
        v if v == p - 1 => -1,
        v => panic!("Euler criterion gave {v} mod {p}"),
    }
}

/// Double-double number: `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn new(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }

    fn norm(s: f64, e: f64) -> Self {
        let hi = s + e;
        Dd { hi, lo: e - (hi - s) }
    }

    fn add(self, o: Dd) -> Dd {
        let s = self.hi + o.hi;
        let bb = s - self.hi;
        let e = (self.hi - (s - bb)) + (o.hi - bb) + self.lo + o.lo;
        Dd::norm(s, e)
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p) + self.hi * o.lo + self.lo * o.hi;
        Dd::norm(p, e)
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul(Dd::new(q1)).neg());
        let q2 = r.hi / o.hi;
        let r = r.add(o.mul(Dd::new(q2)).neg());
        let q3 = r.hi / o.hi;
        Dd::norm(q1, q2).add(Dd::new(q3))
    }
}

/// Dickmann ρ from Taylor series about the midpoints `k + 1/2` of each unit
/// interval, in double-double arithmetic. With `s = u − (k + 1/2)` the delay
/// equation reads `(k + 1/2 + s) ρ_k'(s) = −ρ_{k−1}(s)`, so the coefficients
/// follow by a recurrence and the constant term is fixed by continuity at
/// `u = k`. Plain f64 is not enough here: the series terms dwarf ρ itself
/// and the error reaches 1e-6 relative by `u = 10`.
pub struct RhoSeries {
    pieces: Vec<Vec<f64>>,
}

const TERMS: usize = 90;

fn eval_dd(c: &[Dd], s: Dd) -> Dd {
    c.iter().rev().fold(Dd::ZERO, |acc, &a| acc.mul(s).add(a))
}

fn eval_poly(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * s + a)
}

impl RhoSeries {
    pub fn new(u_max: usize) -> Self {
        let half = Dd::new(0.5);
        let mut prev: Vec<Dd> = {
            let mut one = vec![Dd::ZERO; TERMS];
            one[0] = Dd::new(1.0);
            one
        };
        let mut left = Dd::new(1.0);
        let mut pieces = Vec::new();
        for k in 1..u_max {
            let c = Dd::new(k as f64 + 0.5);
            let mut a = vec![Dd::ZERO; TERMS];
            for j in 0..TERMS - 1 {
                let num = prev[j].add(a[j].mul(Dd::new(j as f64)));
                a[j + 1] = num.neg().div(c.mul(Dd::new((j + 1) as f64)));
            }
            a[0] = left.add(eval_dd(&a, half.neg()).neg());
            left = eval_dd(&a, half);
            pieces.push(a.iter().map(|d| d.hi + d.lo).collect());
            prev = a;
        }
        Self { pieces }
    }

    pub fn rho(&self, u: f64) -> f64 {
        if u <= 1.0 {
            return 1.0;
        }
        let k = (u.floor() as usize).min(self.pieces.len());
        let k = if u == u.floor() && k > 1 { k - 1 } else { k };
        let s = u - (k as f64 + 0.5);
        eval_poly(&self.pieces[k - 1], s)
    }

    /// `u(x) = ρ(1/x − 1)/x`, zero below the covered range.
    pub fn density(&self, x: f64) -> f64 {
        let v = 1.0 / x - 1.0;
        if v > self.pieces.len() as f64 {
            0.0
        } else {
            self.rho(v) / x
        }
    }
}

/// Composite Simpson with `n` (even) panels.
pub fn simpson(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}
