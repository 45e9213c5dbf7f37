//! Acceptance checks with their stated tolerances. Prints one [PASS] or
//! [FAIL] line per criterion, followed by the individual checks, and exits
//! non-zero if any criterion fails.

use std::process::Command;

use famrisk::dataset::{bundled_records, PrintedValue};
use famrisk::simulation::{estimate_gini_by_sampling, simulate, RiskSource, SimulationConfig};
use famrisk::special::{beta_pdf, inv_reg_inc_beta, reg_inc_beta, seeded_rng, BetaParams};
use famrisk::{
    fit_from_risk_and_frr, frr_curve, irr_given_frr, solve_risk_structure, Affected,
    DichotomousRiskModel, Error, Sweep,
};
use rand::Rng;

struct Check {
    label: String,
    ok: bool,
    detail: String,
}

fn check(label: impl Into<String>, ok: bool, detail: impl Into<String>) -> Check {
    Check {
        label: label.into(),
        ok,
        detail: detail.into(),
    }
}

fn within(label: &str, got: f64, want: f64, tol: f64) -> Check {
    check(
        label,
        (got - want).abs() <= tol,
        format!("{got:.6} vs {want} ± {tol}"),
    )
}

struct Suite {
    failed: usize,
}

impl Suite {
    fn criterion(&mut self, id: u32, title: &str, checks: Vec<Check>) {
        let ok = checks.iter().all(|c| c.ok);
        if !ok {
            self.failed += 1;
        }
        let tag = if ok { "[PASS]" } else { "[FAIL]" };
        println!("{tag} {id:>2}. {title}");
        for c in &checks {
            let mark = if c.ok { "ok  " } else { "MISS" };
            println!("         {mark} {}: {}", c.label, c.detail);
        }
    }
}

const TWO_GROUP_ROWS: [(&str, f64, f64, &str, &str); 7] = [
    ("testicular", 5.88, 21.71, "30.6", "0.010"),
    ("prostate", 2.96, 7.71, "12.2", "0.027"),
    ("colorectal", 2.25, 4.25, "7.4", "0.067"),
    ("melanoma", 1.9, 4.7, "8.2", "0.025"),
    ("breast", 1.80, 2.93, "5.2", "0.10"),
    ("Hodgkin", 6.0, 13.0, "22.6", "0.030"),
    ("thyroid", 3.1, 23.2, "34.2", "0.0022"),
];

fn two_group_rows() -> Vec<Check> {
    TWO_GROUP_ROWS
        .iter()
        .map(
            |&(name, f1, f2, irr, q)| match solve_risk_structure(f1, f2) {
                Ok(s) => {
                    let (irr_p, q_p): (PrintedValue, PrintedValue) =
                        (irr.parse().unwrap(), q.parse().unwrap());
                    let got_q = s.q.unwrap_or(f64::NAN);
                    check(
                        name,
                        irr_p.matches(s.irr) && q_p.matches(got_q),
                        format!("IRR {:.4} vs {irr}, q {got_q:.5} vs {q}", s.irr),
                    )
                }
                Err(e) => check(name, false, e.to_string()),
            },
        )
        .collect()
}

fn parkinsons_fit() -> Vec<Check> {
    let m = fit_from_risk_and_frr(0.01, 2.3).unwrap();
    let p = m.params().unwrap();
    vec![
        check(
            "alpha",
            (p.alpha() * 100.0).round() == 75.0,
            format!("{:.6} rounds to 0.75", p.alpha()),
        ),
        check(
            "beta",
            p.beta().round() == 74.0,
            format!("{:.4} rounds to 74", p.beta()),
        ),
        within("Gini", m.gini(), 0.55, 0.005),
    ]
}

const GINI_GOLDEN: [(&str, f64, f64, f64, f64); 8] = [
    ("pancreas", 0.015, 2.19, 0.54, 0.005),
    ("leukemias", 0.0096, 2.01, 0.50, 0.005),
    ("stomach", 0.0178, 1.92, 0.49, 0.005),
    ("breast", 0.12, 1.8, 0.47, 0.005),
    ("testicular-like", 0.01, 6.0, 0.80, 0.005),
    ("(0.01, 1.5)", 0.01, 1.5, 0.37, 0.005),
    ("type 1 diabetes", 0.002, 12.0, 0.89, 0.005),
    ("type 2 diabetes", 0.30, 2.24, 0.60, 0.03),
];

fn gini_golden() -> Vec<Check> {
    GINI_GOLDEN
        .iter()
        .map(|&(name, mu, frr, want, tol)| {
            within(
                name,
                fit_from_risk_and_frr(mu, frr).unwrap().gini(),
                want,
                tol,
            )
        })
        .collect()
}

fn burden_shares() -> Vec<Check> {
    [
        ("top 10% at (0.01, 1.5)", 0.01, 1.5, 0.10, 0.26),
        ("top 10% at (0.01, 6)", 0.01, 6.0, 0.10, 0.65),
        ("top 10% at (0.12, 1.8)", 0.12, 1.8, 0.10, 0.30),
        ("top 1% at (0.002, 12)", 0.002, 12.0, 0.01, 0.25),
    ]
    .iter()
    .map(|&(name, mu, frr, f, want)| {
        let share = fit_from_risk_and_frr(mu, frr)
            .unwrap()
            .top_share(f)
            .unwrap();
        within(name, share, want, 0.005)
    })
    .collect()
}

fn ratios() -> Vec<Check> {
    let breast = fit_from_risk_and_frr(0.12, 1.8).unwrap();
    let t1d = fit_from_risk_and_frr(0.002, 12.0).unwrap();
    let median = t1d.median_risk_ratio(0.01).unwrap();
    vec![
        within(
            "mean risk ratio, top 10% at (0.12, 1.8)",
            breast.mean_risk_ratio(0.1).unwrap(),
            6.2,
            0.1,
        ),
        check(
            "median risk ratio, top 1% at (0.002, 12)",
            median > 10_000.0,
            format!("{median:.1} > 10000"),
        ),
    ]
}

fn doubling() -> Vec<Check> {
    let one = irr_given_frr(0.01, 2.0, Affected::One).unwrap();
    let two = irr_given_frr(0.01, 2.0, Affected::Two).unwrap();
    vec![
        within("IRR for FRR1 = 2 at q = 0.01", one, 12.2, 0.05),
        check(
            "IRR for FRR2 = 2 at q = 0.01",
            two > 5.0,
            format!("{two:.4} > 5"),
        ),
    ]
}

fn ceilings() -> Vec<Check> {
    // Dense log grid on [1, 1e6].
    let grid: Vec<f64> = (0..=60_000)
        .map(|i| 10f64.powf(i as f64 / 10_000.0))
        .collect();
    let sup = |q: f64| {
        frr_curve(Sweep::Irr { q }, &grid, Affected::One)
            .unwrap()
            .into_iter()
            .map(|(_, f)| f)
            .fold(f64::MIN, f64::max)
    };
    let unattainable = |q: f64, frr: f64| {
        matches!(
            irr_given_frr(q, frr, Affected::One),
            Err(Error::Unattainable { .. })
        )
    };
    let (s5, s8) = (sup(0.5), sup(0.8));
    vec![
        check("grid sup FRR1 at q = 0.5", s5 < 2.0, format!("{s5:.9} < 2")),
        check(
            "FRR1 = 2 at q = 0.5 unattainable",
            unattainable(0.5, 2.0),
            "",
        ),
        check(
            "grid sup FRR1 at q = 0.8",
            s8 <= 1.25,
            format!("{s8:.9} <= 1.25"),
        ),
        check(
            "FRR1 just above 1.25 at q = 0.8 unattainable",
            unattainable(0.8, 1.25 + 1e-12),
            "",
        ),
    ]
}

fn property_suites() -> Vec<Check> {
    let mut rng = seeded_rng(8, 0);

    // Two-group round trip over 1000 random models.
    let mut worst = 0.0_f64;
    let mut failures = 0;
    for _ in 0..1000 {
        let q = 10f64.powf(rng.random_range(-4.0..(0.9f64).log10()));
        let irr = 10f64.powf(rng.random_range((1.1f64).log10()..2.0));
        let m = DichotomousRiskModel::new(q, irr, None).unwrap();
        match solve_risk_structure(m.frr_one_affected(), m.frr_two_affected()) {
            Ok(s) => {
                let rel = ((s.irr - irr) / irr)
                    .abs()
                    .max(((s.q.unwrap() - q) / q).abs());
                worst = worst.max(rel);
            }
            Err(_) => failures += 1,
        }
    }
    let round_trip = check(
        "two-group round trip, 1000 models",
        failures == 0 && worst <= 1e-6,
        format!("{failures} unsolved, worst relative error {worst:.2e} <= 1e-6"),
    );

    // Lorenz shape on 1001-point grids for 100 random feasible fits.
    let mut bad = Vec::new();
    for _ in 0..100 {
        let mu = 10f64.powf(rng.random_range(-3.0..(0.5f64).log10()));
        let top = (1.0 / mu).min(60.0);
        let frr = 1.0 + (top - 1.0) * rng.random_range(0.001..0.999);
        let c = fit_from_risk_and_frr(mu, frr).unwrap().lorenz_curve(1001);
        let p = &c.points;
        let ok = p[0].1 == 0.0
            && p[1000].1 == 1.0
            && p.windows(2).all(|w| w[1].1 >= w[0].1)
            && p.iter().all(|&(u, l)| l <= u + 1e-12)
            && p.windows(3)
                .all(|w| w[2].1 - 2.0 * w[1].1 + w[0].1 >= -1e-12);
        if !ok {
            bad.push(format!("({mu:.4}, {frr:.4})"));
        }
    }
    let lorenz = check(
        "Lorenz monotone, convex, below diagonal, 100 models",
        bad.is_empty(),
        format!("{} violations {}", bad.len(), bad.join(" ")),
    );

    // FRR = 1 + CV^2, exactly as computed.
    let mut exact = true;
    for _ in 0..1000 {
        let mu = 10f64.powf(rng.random_range(-3.0..(0.9f64).log10()));
        let frr = 1.0 + (1.0 / mu - 1.0) * rng.random_range(0.0..0.999);
        let m = fit_from_risk_and_frr(mu, frr).unwrap();
        exact &= m.frr_of() == 1.0 + m.cv_squared();
    }
    let identity = check("FRR = 1 + CV^2 exact, 1000 fits", exact, "");

    // Quantile and CDF round trips. Near 1 with β << 1, adjacent doubles can
    // differ in I by more than 1e-9; there the returned quantile must be the
    // double whose neighbours bracket u. Starting from x, the check is
    // restricted to densities above 1e-6, where a rounding of I(x) moves the
    // quantile by less than 1e-9.
    let mut worst_u = 0.0_f64;
    let mut worst_x = 0.0_f64;
    let mut misses = 0;
    let mut resolution_limited = 0;
    for _ in 0..2000 {
        let a = 10f64.powf(rng.random_range(-2.0..2.5));
        let b = 10f64.powf(rng.random_range(-2.0..2.5));
        let p = BetaParams::new(a, b).unwrap();
        let u: f64 = rng.random_range(0.0..1.0);
        let x = inv_reg_inc_beta(u, &p).unwrap();
        let err = (reg_inc_beta(x, &p).unwrap() - u).abs();
        if err <= 1e-9 {
            worst_u = worst_u.max(err);
        } else {
            let below = reg_inc_beta(x.next_down().max(0.0), &p).unwrap();
            let above = reg_inc_beta(x.next_up().min(1.0), &p).unwrap();
            if below <= u && u <= above {
                resolution_limited += 1;
            } else {
                misses += 1;
            }
        }
        let x: f64 = rng.random_range(0.0..1.0);
        if beta_pdf(x, &p).unwrap() >= 1e-6 {
            let back = inv_reg_inc_beta(reg_inc_beta(x, &p).unwrap(), &p).unwrap();
            worst_x = worst_x.max((back - x).abs());
        }
    }
    let quantile = check(
        "quantile/CDF round trips, 2000 shapes",
        misses == 0 && worst_x <= 1e-9,
        format!(
            "worst |I(Q(u)) - u| {worst_u:.2e} ({resolution_limited} at double resolution, \
             {misses} misses), worst |Q(I(x)) - x| {worst_x:.2e}"
        ),
    );

    vec![round_trip, lorenz, identity, quantile]
}

fn oracle_equivalence() -> Vec<Check> {
    let mut checks = Vec::new();
    for (i, &(name, f1, f2, _, _)) in TWO_GROUP_ROWS.iter().enumerate() {
        let s = solve_risk_structure(f1, f2).unwrap();
        let m = DichotomousRiskModel::new(s.q.unwrap(), s.irr, Some(0.01)).unwrap();
        let cfg = SimulationConfig::new(RiskSource::Dichotomous(m), 3, 10_000_000, 100 + i as u64)
            .unwrap();
        let out = simulate(&cfg).unwrap();
        let (one, two) = (out.frr_one.unwrap(), out.frr_two.unwrap());
        let z1 = (one.value - m.frr_one_affected()) / one.std_error;
        let z2 = (two.value - m.frr_two_affected()) / two.std_error;
        checks.push(check(
            format!("simulated FRRs, {name}"),
            z1.abs() <= 3.0 && z2.abs() <= 3.0,
            format!(
                "FRR1 {:.4} ± {:.4} (z {z1:+.2}), FRR2 {:.3} ± {:.3} (z {z2:+.2})",
                one.value, one.std_error, two.value, two.std_error
            ),
        ));
    }
    for (i, &(name, mu, frr, _, _)) in GINI_GOLDEN.iter().enumerate() {
        let m = fit_from_risk_and_frr(mu, frr).unwrap();
        let est = estimate_gini_by_sampling(&m, 1_000_000, 200 + i as u64).unwrap();
        let z = (est.value - m.gini()) / est.std_error;
        checks.push(check(
            format!("sampled Gini, {name}"),
            z.abs() <= 3.0,
            format!(
                "{:.5} ± {:.5} vs {:.5} (z {z:+.2})",
                est.value,
                est.std_error,
                m.gini()
            ),
        ));
    }
    checks
}

fn determinism() -> Vec<Check> {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_famrisk"))
            .args(["report", "--bundled", "--seed", "20170101"])
            .output()
            .expect("binary runs")
    };
    let (a, b) = (run(), run());
    vec![check(
        "report --bundled twice",
        a.status.success() && !a.stdout.is_empty() && a.stdout == b.stdout,
        format!("{} bytes", a.stdout.len()),
    )]
}

fn main() {
    assert_eq!(bundled_records().len(), 15);
    let mut suite = Suite { failed: 0 };
    suite.criterion(
        1,
        "Two-group solutions match the printed IRR and q",
        two_group_rows(),
    );
    suite.criterion(2, "Parkinson's disease fit", parkinsons_fit());
    suite.criterion(3, "Gini golden set", gini_golden());
    suite.criterion(
        4,
        "Burden shares within 0.5 percentage points",
        burden_shares(),
    );
    suite.criterion(5, "Mean and median risk ratios", ratios());
    suite.criterion(6, "IRR needed to double the risk", doubling());
    suite.criterion(7, "FRR ceilings for common high-risk groups", ceilings());
    suite.criterion(8, "Property suites", property_suites());
    suite.criterion(9, "Monte Carlo oracles", oracle_equivalence());
    suite.criterion(10, "Byte-identical report", determinism());
    println!("\n{} of 10 criteria failed", suite.failed);
    if suite.failed > 0 {
        std::process::exit(1);
    }
}
