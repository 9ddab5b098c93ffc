use multcorr::correlate::{
    correlation_pieces, discrepancy_trend, log_correlation, normalized_correlation, normalized_correlation_with,
    theorem13_check, CorrelationRequest,
};
use multcorr::multfunc::mean_value;
use multcorr::{Error, MultFuncSpec};

fn one() -> MultFuncSpec {
    MultFuncSpec::constant_one()
}

fn lam() -> MultFuncSpec {
    MultFuncSpec::liouville()
}

fn logx(x: u64) -> f64 {
    (x as f64).ln()
}

#[test]
fn zero_shift_message() {
    let e = CorrelationRequest::new(lam(), lam(), 0, 10_000, 3.0).unwrap_err();
    assert_eq!(e, Error::Domain("shift h must be nonzero".into()));
    assert_eq!(e.to_string().contains("shift h must be nonzero"), true);
}

#[test]
fn chained_windows_telescope_to_full_harmonic_sum() {
    let x = 2_000_000u64;
    let mut y = x;
    let mut chained = 0.0;
    let mut bottom = x;
    while y >= 1000 {
        let om = logx(y);
        let req = CorrelationRequest::new(one(), one(), 1, y, om).unwrap();
        chained += om.ln() * log_correlation(&req).unwrap();
        bottom = req.window().0;
        y = (y as f64 / om).floor() as u64;
    }
    let head: f64 = (1..bottom).map(|n| 1.0 / n as f64).sum();
    let full: f64 = (1..=x).map(|n| 1.0 / n as f64).sum();
    assert!(((chained + head) - full).abs() < 1e-10 * full, "{} vs {full}", chained + head);
}

#[test]
fn shift_symmetry_bound() {
    let x = 1_000_000;
    let om = logx(x);
    for g in [lam(), MultFuncSpec::moebius(), MultFuncSpec::smooth_indicator(1000.0).unwrap()] {
        for h in [1i64, 2, 7] {
            let plus = log_correlation(&CorrelationRequest::new(g.clone(), g.clone(), h, x, om).unwrap()).unwrap();
            let minus = log_correlation(&CorrelationRequest::new(g.clone(), g.clone(), -h, x, om).unwrap()).unwrap();
            let slack = 4.0 * (h as f64 + 1.0) * om / x as f64 + 2.0 / om.ln();
            assert!((plus - minus).abs() <= slack, "{g} h={h}");
        }
    }
}

#[test]
fn lhs_bounded_by_harmonic_slack() {
    let x = 200_000;
    for om in [1.5, 3.0, logx(x), (3.0 * x as f64).ln()] {
        for (g1, g2) in [(one(), one()), (lam(), one()), (MultFuncSpec::moebius(), MultFuncSpec::moebius())] {
            let r = theorem13_check(&CorrelationRequest::new(g1, g2, 1, x, om).unwrap()).unwrap();
            assert!(r.lhs.abs() <= 1.0 + 4.0 / om.ln(), "{r:?}");
            // inclusive [x, 2x] holds x + 1 integers
            let cap = 1.0 + 1.0 / x as f64;
            assert!(r.delta1.abs() <= cap && r.delta2.abs() <= cap);
            assert_eq!(r.rhs, r.delta1 * r.delta2);
        }
    }
}

#[test]
fn log_correlation_examples() {
    let x = 1_000_000;
    let om = (3.0 * x as f64).ln();
    let v = log_correlation(&CorrelationRequest::new(one(), one(), 1, x, om).unwrap()).unwrap();
    assert!((v - 1.0).abs() < 1.0 / om.ln(), "{v}");

    let x = 10_000_000;
    let v = log_correlation(&CorrelationRequest::new(lam(), one(), 1, x, logx(x)).unwrap()).unwrap();
    assert!(v.abs() < 0.05, "{v}");
    let t = MultFuncSpec::truncated_liouville_gt((x as f64).powf(0.1)).unwrap();
    let v = log_correlation(&CorrelationRequest::new(t.clone(), t, 1, x, logx(x)).unwrap()).unwrap();
    assert!(v.abs() < 0.15, "{v}");
}

#[test]
fn normalized_examples_and_expansion() {
    let req = CorrelationRequest::new(one(), one(), 3, 100_000, 4.0).unwrap();
    let v = normalized_correlation(&req).unwrap();
    let d = mean_value(&one(), 100_000).unwrap();
    let slack = (d - 1.0).abs();
    assert!(v.abs() <= 2.0 * slack * 1.01 + 1e-12, "{v}");

    let x = 10_000_000;
    let req = CorrelationRequest::new(lam(), lam(), 1, x, logx(x)).unwrap();
    let v = normalized_correlation(&req).unwrap();
    assert!(v.abs() < 0.15, "{v}");

    // direct centred sum against the four separately accumulated pieces
    let x = 1_000_000;
    for (g1, g2, h) in [
        (lam(), lam(), 1i64),
        (MultFuncSpec::smooth_indicator(1000.0).unwrap(), MultFuncSpec::moebius(), -2),
        (MultFuncSpec::power_weight(100.0, 0.5).unwrap(), MultFuncSpec::real_character(15).unwrap(), 5),
    ] {
        let req = CorrelationRequest::new(g1, g2, h, x, logx(x)).unwrap();
        let (d1, d2) = (0.3, -0.7);
        let direct = normalized_correlation_with(&req, d1, d2).unwrap();
        let pieces = correlation_pieces(&req).unwrap();
        assert!((direct - pieces.expand(d1, d2)).abs() <= 1e-10, "{direct} vs {}", pieces.expand(d1, d2));
    }
}

#[test]
fn theorem13_examples() {
    let x = 1_000_000;
    let om = logx(x);
    let r = theorem13_check(&CorrelationRequest::new(one(), one(), 1, x, om).unwrap()).unwrap();
    assert!(r.discrepancy <= 3.0 / om.ln());

    let x = 10_000_000;
    let y = (x as f64).sqrt();
    let g = MultFuncSpec::power_weight(y, 0.5).unwrap();
    let r = theorem13_check(&CorrelationRequest::new(g.clone(), g, 1, x, logx(x)).unwrap()).unwrap();
    assert!(r.discrepancy < 0.1, "{r:?}");
    assert_eq!(r.n_terms, x - (x as f64 / logx(x)).ceil() as u64 + 1);
}

#[test]
fn trends() {
    let flat = discrepancy_trend(|x| CorrelationRequest::new(one(), one(), 1, x, 2.0), &[10_000, 100_000, 1_000_000]).unwrap();
    assert!(flat.windows(2).all(|w| w[1].1 <= w[0].1), "{flat:?}");

    let xs = [100_000, 1_000_000, 10_000_000];
    let l = discrepancy_trend(|x| CorrelationRequest::new(lam(), lam(), 1, x, logx(x)), &xs).unwrap();
    assert!(l[2].1 < l[0].1, "{l:?}");
}

#[test]
fn smooth_pair_discrepancy_shrinks_with_x() {
    // The correlation window [x/ω, x] sits at u just below 2 while the mean
    // values are taken on [x, 2x] at u just above 2; the gap closes only like
    // log ω / log x.
    let xs = [100_000, 1_000_000, 10_000_000];
    let make = |x: u64| {
        let s = MultFuncSpec::smooth_indicator((x as f64).sqrt())?;
        CorrelationRequest::new(s.clone(), s, 1, x, logx(x))
    };
    let t = discrepancy_trend(make, &xs).unwrap();
    assert!(t.windows(2).all(|w| w[1].1 < w[0].1), "{t:?}");
    let r = theorem13_check(&make(10_000_000).unwrap()).unwrap();
    assert!(r.lhs > r.rhs);
    let rho2 = 1.0 - 2f64.ln();
    assert!((r.lhs - rho2 * rho2).abs() < 0.05, "{r:?}");
}
