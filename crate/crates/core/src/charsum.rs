//! Real characters modulo odd squarefree `Q` and their shifted sums.
//!
//! For odd squarefree `Q` the Jacobi symbol `(·|Q)` is the real primitive
//! character modulo `Q`. Values at `n(n+h)` are always taken as the product
//! `(n|Q)(n+h|Q)`, never by reducing the product itself.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::scalar::Neumaier;
use crate::scan::scan_plain;

/// Jacobi symbol `(n|q)` for odd `q ≥ 1`.
pub fn jacobi(n: i64, q: u64) -> Result<i8> {
    if q == 0 || q % 2 == 0 {
        return domain(format!("Jacobi symbol needs an odd positive modulus, got {q}"));
    }
    let a = (n as i128).rem_euclid(q as i128) as u64;
    Ok(jacobi_u64(a, q))
}

/// Jacobi symbol for `q` odd; `a` may be any value.
#[inline]
pub fn jacobi_u64(mut a: u64, mut q: u64) -> i8 {
    debug_assert!(q % 2 == 1);
    a %= q;
    let mut sign = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        // (2|q) = -1 exactly when q ≡ 3, 5 (mod 8)
        if tz % 2 == 1 && (q & 7 == 3 || q & 7 == 5) {
            sign = -sign;
        }
        if a & 3 == 3 && q & 3 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut q);
        a %= q;
    }
    if q == 1 {
        sign
    } else {
        0
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Brent's variant of Pollard rho; `n` must be composite and odd.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        let mut power = 1u64;
        let mut lam = 0u64;
        while d == 1 {
            if power == lam {
                x = y;
                power *= 2;
                lam = 0;
            }
            y = f(y);
            lam += 1;
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn factor_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Prime factors of an odd, squarefree modulus `Q > 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharacterModulus {
    q: u64,
    primes: Vec<u64>,
}

impl CharacterModulus {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    #[inline]
    pub fn chi(&self, n: u64) -> i8 {
        jacobi_u64(n, self.q)
    }
}

/// Factors `Q` (trial division to 10⁶, then Miller–Rabin and Pollard rho) and
/// checks that it is odd and squarefree.
pub fn factor_modulus(q: u64) -> Result<CharacterModulus> {
    if q <= 1 {
        return domain(format!("character modulus must exceed 1, got {q}"));
    }
    if q % 2 == 0 {
        return domain(format!("character modulus must be odd, got {q}"));
    }
    if q >= 1 << 63 {
        return Err(Error::Capacity(format!("modulus {q} is not below 2^63")));
    }
    let mut rest = q;
    let mut found = Vec::new();
    let mut p = 3u64;
    while p <= 1_000_000 && p * p <= rest {
        while rest % p == 0 {
            found.push(p);
            rest /= p;
        }
        p += 2;
    }
    if rest > 1 {
        if p * p > rest {
            found.push(rest);
        } else {
            factor_into(rest, &mut found);
        }
    }
    found.sort_unstable();
    if let Some(w) = found.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Validation(format!(
            "modulus {q} is not squarefree: {}^2 divides it",
            w[0]
        )));
    }
    Ok(CharacterModulus { q, primes: found })
}

/// `∏_{p|Q} (1 − 2/p)`.
pub fn euler_product_factor(m: &CharacterModulus) -> f64 {
    m.primes.iter().map(|&p| 1.0 - 2.0 / p as f64).product()
}

/// How character values are produced inside the scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharacterKernel {
    /// Binary Jacobi algorithm per value.
    Direct,
    /// Lookup in a precomputed table of one period.
    Table,
}

enum Chi<'a> {
    Direct(&'a CharacterModulus),
    Table(Vec<i8>, u64),
}

impl Chi<'_> {
    fn new(m: &CharacterModulus, kernel: CharacterKernel) -> Result<Chi<'_>> {
        match kernel {
            CharacterKernel::Direct => Ok(Chi::Direct(m)),
            CharacterKernel::Table => {
                if m.q > 1 << 26 {
                    return Err(Error::Capacity(format!(
                        "period table for Q = {} is too large",
                        m.q
                    )));
                }
                let t = (0..m.q).map(|r| jacobi_u64(r, m.q)).collect();
                Ok(Chi::Table(t, m.q))
            }
        }
    }

    #[inline]
    fn at(&self, n: u64) -> i8 {
        match self {
            Chi::Direct(m) => jacobi_u64(n, m.q),
            Chi::Table(t, q) => t[(n % q) as usize],
        }
    }
}

/// Logarithmically averaged `χ_Q(n(n+h))` over `[x/ω, x]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BurgessReport {
    pub q: u64,
    pub h: i64,
    pub x: u64,
    pub omega: f64,
    pub value: f64,
    pub n_terms: u64,
    /// `3 ≤ Q ≤ x^{4−ε}` with ε = [`BURGESS_EPSILON`].
    pub in_regime: bool,
}

/// ε used for the Burgess-regime flag.
pub const BURGESS_EPSILON: f64 = 0.1;

pub fn in_burgess_regime(q: u64, x: u64) -> bool {
    q >= 3 && (q as f64).ln() <= (4.0 - BURGESS_EPSILON) * (x as f64).ln()
}

pub fn burgess_corr(m: &CharacterModulus, h: i64, x: u64, omega: f64) -> Result<BurgessReport> {
    burgess_corr_with(m, h, x, omega, CharacterKernel::Direct)
}

pub fn burgess_corr_with(
    m: &CharacterModulus,
    h: i64,
    x: u64,
    omega: f64,
    kernel: CharacterKernel,
) -> Result<BurgessReport> {
    if h == 0 {
        return domain("shift h must be nonzero");
    }
    check_omega(x, omega)?;
    let chi = Chi::new(m, kernel)?;
    let lo = ((x as f64 / omega).ceil() as u64).max(1);
    let parts = scan_plain(lo, x + 1, |a, b| {
        let mut acc = Neumaier::new();
        let mut terms = 0u64;
        for n in a..b {
            let shifted = n as i64 + h;
            if shifted < 1 {
                continue;
            }
            terms += 1;
            let v = chi.at(n) * chi.at(shifted as u64);
            if v != 0 {
                acc.add(v as f64 / n as f64);
            }
        }
        (acc, terms)
    });
    let mut total = Neumaier::new();
    let mut n_terms = 0;
    for (acc, t) in &parts {
        total.merge(acc);
        n_terms += t;
    }
    Ok(BurgessReport {
        q: m.q,
        h,
        x,
        omega,
        value: total.value() / omega.ln(),
        n_terms,
        in_regime: in_burgess_regime(m.q, x),
    })
}

pub(crate) fn check_omega(x: u64, omega: f64) -> Result<()> {
    if !(omega > 1.0) {
        return domain(format!("omega = {omega} must exceed 1 (log omega normalizes the average)"));
    }
    if omega > (3.0 * x as f64).ln() {
        return domain(format!("omega = {omega} exceeds log(3x) = {}", (3.0 * x as f64).ln()));
    }
    Ok(())
}

/// Densities of `n` with both `n` and `n+1` quadratic nonresidues mod `Q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QnrPairReport {
    pub q: u64,
    pub x: u64,
    /// `(1/log x) Σ_{n≤x, χ(n)=χ(n+1)=−1} 1/n`
    pub log_density: f64,
    /// `(1/x) #{n ≤ x : χ(n)=χ(n+1)=−1}`
    pub natural_density: f64,
    /// `(1/4) ∏_{p|Q}(1 − 2/p)`
    pub target: f64,
    pub in_regime: bool,
}

pub fn qnr_pair_densities(m: &CharacterModulus, x: u64) -> Result<QnrPairReport> {
    if x < 2 {
        return domain("x must be at least 2");
    }
    let parts = scan_plain(1, x + 1, |a, b| {
        let mut acc = Neumaier::new();
        let mut count = 0u64;
        let mut prev = m.chi(a);
        for n in a..b {
            let next = m.chi(n + 1);
            if prev == -1 && next == -1 {
                acc.add(1.0 / n as f64);
                count += 1;
            }
            prev = next;
        }
        (acc, count)
    });
    let mut total = Neumaier::new();
    let mut count = 0;
    for (acc, c) in &parts {
        total.merge(acc);
        count += c;
    }
    Ok(QnrPairReport {
        q: m.q,
        x,
        log_density: total.value() / (x as f64).ln(),
        natural_density: count as f64 / x as f64,
        target: euler_product_factor(m) / 4.0,
        in_regime: in_burgess_regime(m.q, x),
    })
}

/// Logarithmic weights of the four sign cells `(χ(n), χ(n+1)) ∈ {±1}²` over
/// `n ≤ x`, and of `{gcd(n(n+1), Q) = 1}`, each divided by `log x`.
/// Cells are ordered `(+,+), (+,−), (−,+), (−,−)`.
pub fn sign_cells(m: &CharacterModulus, x: u64) -> ([f64; 4], f64) {
    let parts = scan_plain(1, x + 1, |a, b| {
        let mut cells = [Neumaier::new(); 4];
        let mut coprime = Neumaier::new();
        for n in a..b {
            let (s, t) = (m.chi(n), m.chi(n + 1));
            if s == 0 || t == 0 {
                continue;
            }
            let w = 1.0 / n as f64;
            coprime.add(w);
            let idx = usize::from(s < 0) * 2 + usize::from(t < 0);
            cells[idx].add(w);
        }
        (cells, coprime)
    });
    let mut cells = [Neumaier::new(); 4];
    let mut coprime = Neumaier::new();
    for (c, k) in &parts {
        for (dst, src) in cells.iter_mut().zip(c) {
            dst.merge(src);
        }
        coprime.merge(k);
    }
    let l = (x as f64).ln();
    (cells.map(|c| c.value() / l), coprime.value() / l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(2, 5).unwrap(), -1);
        assert_eq!(jacobi(0, 5).unwrap(), 0);
        assert_eq!(jacobi(2, 15).unwrap(), 1);
        assert_eq!(jacobi(-1, 7).unwrap(), -1);
        assert_eq!(jacobi(-1, 5).unwrap(), 1);
        assert_eq!(jacobi(5, 1).unwrap(), 1);
        assert!(matches!(jacobi(3, 10), Err(Error::Domain(_))));
        assert!(matches!(jacobi(3, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn factor_modulus_examples() {
        assert_eq!(factor_modulus(15).unwrap().primes(), &[3, 5]);
        let e = factor_modulus(9).unwrap_err();
        assert!(matches!(&e, Error::Validation(m) if m.contains("3^2")), "{e}");
        assert_eq!(factor_modulus(1_000_003).unwrap().primes(), &[1_000_003]);
        assert!(matches!(factor_modulus(12), Err(Error::Domain(_))));
        assert!(matches!(factor_modulus(1), Err(Error::Domain(_))));
    }

    #[test]
    fn factor_modulus_large_semiprime() {
        // two primes above the trial-division bound
        let (p, q) = (1_000_003u64, 2_000_029u64);
        assert!(is_prime(p) && is_prime(q));
        let m = factor_modulus(p * q * 7).unwrap();
        assert_eq!(m.primes(), &[7, p, q]);
        let sq = factor_modulus(p * p * 3).unwrap_err();
        assert!(matches!(sq, Error::Validation(m) if m.contains("1000003^2")));
    }

    #[test]
    fn euler_factor_examples() {
        let f = |q| euler_product_factor(&factor_modulus(q).unwrap());
        assert!((f(15) - 0.2).abs() < 1e-15);
        assert!((f(5) - 0.6).abs() < 1e-15);
        assert!((f(3) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn miller_rabin_against_trial_division() {
        for n in 0..20_000u64 {
            let slow = n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(is_prime(n), slow, "n={n}");
        }
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2,3,5,7
    }

    #[test]
    fn burgess_rejects_zero_shift() {
        let m = factor_modulus(5).unwrap();
        let e = burgess_corr(&m, 0, 1000, 3.0).unwrap_err();
        assert_eq!(e, Error::Domain("shift h must be nonzero".into()));
    }

    #[test]
    fn shift_multiple_of_modulus_gives_coprime_density() {
        let m = factor_modulus(3).unwrap();
        let r = burgess_corr(&m, 3, 1_000_000, (1e6f64).ln()).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 0.05, "{}", r.value);
    }

    #[test]
    fn regime_flag() {
        assert!(in_burgess_regime(1_000_003, 1_000_000));
        assert!(!in_burgess_regime(1 << 62, 1000));
        assert!(!in_burgess_regime(1, 1000));
    }
}
