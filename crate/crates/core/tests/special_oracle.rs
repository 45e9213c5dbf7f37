//! Special functions against reference values computed at 40 digits.

#![allow(clippy::excessive_precision)]

use famrisk::special::{beta_pdf, inv_reg_inc_beta, log_beta, log_gamma, reg_inc_beta, BetaParams};

fn bp(a: f64, b: f64) -> BetaParams {
    BetaParams::new(a, b).unwrap()
}

// Absolute 1e-12 where that is representable; relative 1e-14 once the
// magnitude makes a 1e-12 absolute bound finer than one ulp.
fn assert_log_close(got: f64, want: f64, what: &str) {
    let tol = if want.abs() < 1e3 {
        1e-12
    } else {
        1e-14 * want.abs()
    };
    assert!(
        (got - want).abs() <= tol,
        "{what}: got {got:e}, want {want:e}, diff {:e}",
        (got - want).abs()
    );
}

#[test]
fn log_gamma_reference() {
    let cases = [
        (1e-300, 690.77552789821371),
        (1e-10, 23.025850929882735),
        (0.5, 0.57236494292470009),
        (1.0, 0.0),
        (1.5, -0.12078223763524522),
        (2.0, 0.0),
        (3.7, 1.4280723266653879),
        (10.0, 12.80182748008147),
        (14.9, 24.924132002217277),
        (15.0, 25.191221182738682),
        (15.1, 25.458999750992664),
        (100.0, 359.1342053695754),
        (12345.678, 103959.91990554606),
        (1e6, 12815504.569147612),
        (1e10, 220258509288.81058),
        (1e100, 2.2925850929940457e102),
    ];
    for (x, want) in cases {
        assert_log_close(log_gamma(x).unwrap(), want, &format!("lnΓ({x})"));
    }
}

#[test]
fn log_gamma_recurrence_across_range() {
    // ln Γ(x + 1) - ln Γ(x) = ln x, across the series switch point.
    let mut x = 1e-3;
    while x < 1e6 {
        let lhs = log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap();
        let scale = log_gamma(x + 1.0).unwrap().abs().max(1.0);
        assert!(
            (lhs - x.ln()).abs() <= 1e-12 * scale,
            "x = {x}: {lhs} vs {}",
            x.ln()
        );
        x *= 1.37;
    }
}

#[test]
fn log_gamma_domain() {
    for x in [0.0, -1.0, -0.5, f64::NAN, f64::INFINITY] {
        assert!(log_gamma(x).is_err(), "{x}");
    }
}

#[test]
fn log_beta_reference() {
    let cases = [
        (0.75, 74.0, -3.0235024104487285),
        (0.5, 0.5, 1.1447298858494002),
        (1.0, 1.0, 0.0),
        (2.0, 3.0, -2.4849066497880003),
        (0.0887273, 44.2749, 2.0417859657098027),
        (1e-3, 1e3, 6.900271629687955),
        (500.0, 700.0, -816.95057018565839),
    ];
    for (a, b, want) in cases {
        assert_log_close(log_beta(&bp(a, b)), want, &format!("ln B({a}, {b})"));
    }
}

#[test]
fn pdf_reference() {
    let cases = [
        (0.01, 0.75, 74.0, 31.22192085562958),
        (0.5, 2.0, 3.0, 1.5),
        (1e-5, 0.5, 0.5, 100.65892750486984),
        (0.999, 5.0, 0.8, 12.150553684991088),
        (0.2, 100.0, 300.0, 1.1260156430682412),
        (0.5, 1.0, 1.0, 1.0),
        (0.25, 2.0, 2.0, 1.125),
    ];
    for (x, a, b, want) in cases {
        let got = beta_pdf(x, &bp(a, b)).unwrap();
        assert!(
            (got - want).abs() <= 1e-12 * want.max(1.0),
            "pdf({x}; {a}, {b}) = {got}, want {want}"
        );
    }
}

#[test]
fn pdf_endpoint_convention() {
    assert_eq!(beta_pdf(0.0, &bp(0.5, 2.0)).unwrap(), f64::INFINITY);
    assert_eq!(beta_pdf(1.0, &bp(2.0, 0.5)).unwrap(), f64::INFINITY);
    assert_eq!(beta_pdf(0.0, &bp(2.0, 2.0)).unwrap(), 0.0);
    assert!((beta_pdf(0.0, &bp(1.0, 3.0)).unwrap() - 3.0).abs() < 1e-12);
    assert!(beta_pdf(-0.1, &bp(1.0, 1.0)).is_err());
}

#[test]
fn cdf_reference() {
    let cases = [
        (0.01, 0.75, 74.0, 0.64845860265105898),
        (0.05, 0.75, 74.0, 0.98745739229208661),
        (0.5, 2.0, 3.0, 0.6875),
        (0.3, 0.5, 0.5, 0.36901011956554538),
        (1e-8, 0.2, 5.0, 0.037135728755866108),
        (0.999, 5.0, 0.8, 0.98477798631653441),
        (0.25, 100.0, 300.0, 0.50768065289827085),
        (0.26, 100.0, 300.0, 0.68325546415919068),
        (0.9, 1000.0, 100.0, 0.14747917625807249),
        (0.001, 0.0887273, 44.2749, 0.78978136151411606),
    ];
    for (x, a, b, want) in cases {
        let got = reg_inc_beta(x, &bp(a, b)).unwrap();
        assert!(
            (got - want).abs() <= 1e-12,
            "I({x}; {a}, {b}) = {got}, want {want}, diff {:e}",
            (got - want).abs()
        );
    }
}

#[test]
fn quantile_reference() {
    let cases = [
        (0.5, 0.75, 74.0, 0.0061288917410360379),
        (0.99, 0.75, 74.0, 0.052762267530636626),
        (0.1, 2.0, 3.0, 0.14255931671003072),
        (1e-6, 0.05, 40.0, 1.4786784521773091e-122),
        (0.995, 0.0887273, 44.2749, 0.044464504684905834),
        (0.495, 0.0887273, 44.2749, 0.0000049679921855762472),
        (0.5, 1000.0, 100.0, 0.90933882427707986),
        (0.999999, 3.0, 2.0, 0.99959164053979574),
    ];
    for (u, a, b, want) in cases {
        let got = inv_reg_inc_beta(u, &bp(a, b)).unwrap();
        assert!(
            (got - want).abs() <= 1e-10 * want,
            "Q({u}; {a}, {b}) = {got:e}, want {want:e}"
        );
    }
}

#[test]
fn quantile_of_parkinsons_fit_round_trips() {
    let p = bp(0.75, 74.0);
    let x = inv_reg_inc_beta(0.9, &p).unwrap();
    assert!((reg_inc_beta(x, &p).unwrap() - 0.9).abs() <= 1e-12);
}
