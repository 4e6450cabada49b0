//! Acceptance criteria, one test each. Every test writes a single PASS/FAIL
//! line straight to stdout so the lines survive output capture.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};
use std::io::Write;
use std::time::{Duration, Instant};

use conidx_core::density::{default_checkpoints, index_to_target, Dilation, Interval, Prediction, SeqWindow, Target};
use conidx_core::harness::props::run_property_suite;
use conidx_core::harness::rules::check_product_rule;
use conidx_core::harness::scan::{uniform_convergence_scan, Region, ScanOperator};
use conidx_core::harness::{generate_window, run_index_experiment, ExperimentSpec};
use conidx_core::zeta::{preimage_measure_2d, Profile1D, Profile2D, BISECTION_TOL};
use conidx_core::{
    cheb_grid, fn_sigma_decomposition, g_profile, hurwitz_zeta, lagrange_eval_1d, lagrange_step, lerch_j1,
    preimage_measure_1d, subsequence_k_m, Abscissa, Convention, EvalAt, NamedIrrational, Orientation, PointSpec,
    SeriesTolerance, StepFn1D,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// `g(1/3)` and `g(2/3)` to 15 digits.
const G_THIRD: f64 = 0.691076034711422;
const G_TWO_THIRDS: f64 = 0.308923965288578;

fn verdict(criterion: u32, title: &str, pass: bool, detail: String) {
    let line = format!(
        "criterion {criterion:>2} {}: {title} | {detail}\n",
        if pass { "PASS" } else { "FAIL" }
    );
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn within(budget_secs: u64, start: Instant) -> (bool, Duration) {
    let t = start.elapsed();
    (t < Duration::from_secs(budget_secs), t)
}

fn rat(p: u64, q: u64) -> PointSpec {
    PointSpec::rational(p, q).unwrap()
}

#[test]
fn criterion_01_cosine_product_indices() {
    let start = Instant::now();
    let n = 2000;
    let c: Vec<f64> = (1..=n).map(|k| (k as f64 * FRAC_PI_2).cos()).collect();
    let win = SeqWindow::product(c.clone(), c);
    let cps = default_checkpoints(n, 16);
    let mut pass = true;
    let mut parts = Vec::new();
    for (target, expected) in [(0.0, 0.75), (1.0, 0.125), (-1.0, 0.125)] {
        let r = index_to_target(&win, &Target::Value(target), &Dilation::Epsilon(0.1), &cps).unwrap();
        pass &= (r.index() - expected).abs() <= 0.01;
        parts.push(format!("i(x;{target})={:.4}", r.index()));
    }
    let (fast, t) = within(1, start);
    parts.push(format!("{t:.2?}"));
    verdict(1, "cosine product at N=2000", pass && fast, parts.join(" "));
}

#[test]
fn criterion_02_special_functions() {
    let start = Instant::now();
    let tol = SeriesTolerance::default();
    let g_half = g_profile(0.5).unwrap();
    let j1 = lerch_j1(1.0, tol).unwrap();
    let z2 = hurwitz_zeta(2.0, 1.0, tol).unwrap();
    let reflection = (0..1024)
        .map(|i| (i as f64 + 0.5) / 1024.0)
        .map(|x| (g_profile(x).unwrap() + g_profile(1.0 - x).unwrap() - 1.0).abs())
        .fold(0.0, f64::max);
    let pass = (g_half - 0.5).abs() <= 1e-10
        && (j1 - LN_2).abs() <= 1e-10
        && (z2 - PI * PI / 6.0).abs() <= 1e-10
        && reflection <= 1e-10;
    let (fast, t) = within(1, start);
    verdict(
        2,
        "g, J(1,a), zeta(s,a)",
        pass && fast,
        format!(
            "g(1/2)-1/2={:.1e} J(1,1)-ln2={:.1e} zeta(2,1)-pi^2/6={:.1e} reflection={reflection:.1e} {t:.2?}",
            g_half - 0.5,
            j1 - LN_2,
            z2 - PI * PI / 6.0
        ),
    );
}

#[test]
fn criterion_03_decomposition_oracle() {
    let start = Instant::now();
    let mut worst = Vec::new();
    for spec in [rat(1, 3), PointSpec::Irrational(NamedIrrational::InvSqrt2)] {
        let x0 = (PI * spec.value()).cos();
        let h = StepFn1D::new(Abscissa::ChebAngle(spec), Orientation::Left0Right1 { d: 1.0 });
        let gap = (2..=2000)
            .map(|n| {
                // direct sum of the fundamental polynomials at the float abscissa
                let direct = lagrange_eval_1d(&cheb_grid(n).unwrap(), &h.cheb_values(n), x0);
                (direct - fn_sigma_decomposition(&spec, 1.0, n)).abs()
            })
            .fold(0.0, f64::max);
        worst.push(gap);
    }
    let (fast, t) = within(5, start);
    verdict(
        3,
        "direct sum vs three-term decomposition, n <= 2000",
        worst.iter().all(|&g| g <= 1e-8) && fast,
        format!("max gap 1/3: {:.2e}, inv_sqrt2: {:.2e} {t:.2?}", worst[0], worst[1]),
    );
}

#[test]
fn criterion_04_lagrange_rational_angle() {
    let start = Instant::now();
    let spec = ExperimentSpec::lagrange_1d(rat(1, 3), 1.0, 3000).with_tol(0.02);
    let out = run_index_experiment(&spec).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for limit in [1.0, G_THIRD, G_TWO_THIRDS] {
        match out.cluster_at(limit) {
            Some(c) => {
                pass &= (c.report.index() - 1.0 / 3.0).abs() <= 0.02;
                parts.push(format!("i(L;{limit:.4})={:.4}", c.report.index()));
            }
            None => {
                pass = false;
                parts.push(format!("no cluster at {limit}"));
            }
        }
    }
    // σ = m/3 along k_m(n); the limit is 1 for m = 0 and g(m/3) otherwise
    let h = StepFn1D::new(Abscissa::ChebAngle(rat(1, 3)), Orientation::Left0Right1 { d: 1.0 });
    for (m, limit) in [(0, 1.0), (1, G_THIRD), (2, G_TWO_THIRDS)] {
        let k = subsequence_k_m(1, 3, m).unwrap().take_while(|&k| k <= 2000).last().unwrap() as usize;
        let dev = (lagrange_step(&h, k, EvalAt::Jump) - limit).abs();
        pass &= dev <= 5e-3;
        parts.push(format!("k_{m}={k} dev={dev:.1e}"));
    }
    let (fast, t) = within(10, start);
    parts.push(format!("{t:.2?}"));
    verdict(4, "Lagrange at rational angle 1/3, N=3000", pass && fast, parts.join(" "));
}

/// `|g⁻¹([a, b])|` by bisection on the decreasing profile.
fn g_preimage_oracle(a: f64, b: f64) -> f64 {
    let crossing = |level: f64| {
        let (mut lo, mut hi) = (0.0f64, 1.0f64 - 1e-15);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if g_profile(mid).unwrap() > level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    crossing(a) - crossing(b)
}

#[test]
fn criterion_05_lagrange_irrational_angle() {
    let start = Instant::now();
    let a = Interval { lo: 0.3, hi: 0.6 };
    let spec = ExperimentSpec::lagrange_1d(PointSpec::Irrational(NamedIrrational::InvSqrt2), 1.0, 5000)
        .with_measure_targets(vec![a])
        .with_tol(0.02);
    let out = run_index_experiment(&spec).unwrap();
    let oracle = g_preimage_oracle(a.lo, a.hi);
    let library = preimage_measure_1d(&Profile1D::g(), &[a], BISECTION_TOL).unwrap();
    let est = out.targets[0].report.index();
    let (fast, t) = within(10, start);
    verdict(
        5,
        "Lagrange at angle inv_sqrt2, A=[0.3,0.6], N=5000",
        (est - oracle).abs() <= 0.02 && (library - oracle).abs() <= 1e-8 && fast,
        format!("estimate {est:.4}, |g^-1(A)| {oracle:.4} (library {library:.6}) {t:.2?}"),
    );
}

#[test]
fn criterion_06_lagrange_corner() {
    let start = Instant::now();
    let spec = ExperimentSpec::lagrange_2d(rat(1, 3), rat(1, 2), 600).with_tol(0.03);
    let out = run_index_experiment(&spec).unwrap();
    let g_half = 0.5;
    let mut pass = out.targets.len() == 6;
    let mut parts = Vec::new();
    for a in [1.0, G_THIRD, G_TWO_THIRDS] {
        for b in [1.0, g_half] {
            let value = a * b;
            match out.cluster_at(value) {
                Some(c) => {
                    pass &= (c.report.index() - 1.0 / 6.0).abs() <= 0.03;
                    parts.push(format!("{value:.4}:{:.4}", c.report.index()));
                }
                None => {
                    pass = false;
                    parts.push(format!("{value:.4}:missing"));
                }
            }
        }
    }
    let residual = out.residual_mass.unwrap_or(1.0);
    pass &= residual <= 0.03;
    let (fast, t) = within(30, start);
    verdict(
        6,
        "Lagrange corner 1/3 x 1/2, N=600 per axis",
        pass && fast,
        format!("{} residual {residual:.4} {t:.2?}", parts.join(" ")),
    );
}

#[test]
fn criterion_07_shepard_edge_s2() {
    let start = Instant::now();
    let spec = ExperimentSpec::shepard_2d(2.0, rat(1, 2), rat(1, 2), 1000)
        .at(EvalAt::Value(0.25), EvalAt::Jump)
        .with_tol(0.02);
    let out = run_index_experiment(&spec).unwrap();
    let mut pass = out.targets.len() == 2;
    let mut parts = Vec::new();
    // g_2(0) = 1 on even m, g_2(1/2) = 1/2 by symmetry on odd m
    for value in [1.0, 0.5] {
        match out.cluster_at(value) {
            Some(c) => {
                pass &= (c.report.index() - 0.5).abs() <= 0.02;
                parts.push(format!("i(S;{value})={:.4}", c.report.index()));
            }
            None => {
                pass = false;
                parts.push(format!("no cluster at {value}"));
            }
        }
    }
    verdict(
        7,
        "Shepard s=2 on the edge y=y0=1/2, N=1000 per axis",
        pass,
        format!("{} {:.2?}", parts.join(" "), start.elapsed()),
    );
}

#[test]
fn criterion_08_shepard_corner_s1() {
    let start = Instant::now();
    let half = rat(1, 2);
    let spec = ExperimentSpec::shepard_2d(1.0, half, half, 1000);
    let win = generate_window(&spec).unwrap();
    let cps = spec.checkpoint_grid();
    // stated clusters 1/2 and 1/4; dilation is half their gap, capped at 0.05
    let eps = (0.5f64 * 0.25).min(0.05);
    let mut pass = true;
    let mut parts = Vec::new();
    for (value, expected) in [(0.5, 0.25), (0.25, 0.75)] {
        let r = index_to_target(&win, &Target::Value(value), &Dilation::Epsilon(eps), &cps)
            .unwrap()
            .judge(Prediction::Exact(expected), 0.03);
        pass &= r.passed() == Some(true);
        parts.push(format!("i(S;{value})={:.4} expected {expected}", r.index()));
    }
    let hit = index_to_target(&win, &Target::Value(1.0), &Dilation::Epsilon(eps), &cps).unwrap();
    parts.push(format!("i(S;1)={:.4}", hit.index()));
    parts.push(format!("closed-rectangle convention, {:.2?}", start.elapsed()));
    verdict(8, "Shepard s=1 corner x0=y0=1/2, N=1000 per axis", pass, parts.join(" "));
}

#[test]
fn criterion_09_product_rule() {
    let start = Instant::now();
    let a = Interval { lo: 0.0, hi: 0.5 };
    let closed_form = (1.0 + LN_2) / 2.0;
    let r = check_product_rule(NamedIrrational::Sqrt2Minus1, NamedIrrational::GoldenFrac, a, 1500, 0.02).unwrap();
    let est = r.index();

    let measure = preimage_measure_2d(&Profile2D::new(Profile1D::identity(), Profile1D::identity()), &[a], BISECTION_TOL)
        .unwrap()
        .value;
    let mut rng = StdRng::seed_from_u64(20_240_917);
    let samples = 4_000_000;
    let hits = (0..samples)
        .filter(|_| {
            let (x, y): (f64, f64) = (rng.gen(), rng.gen());
            x * y <= 0.5
        })
        .count();
    let mc = hits as f64 / samples as f64;
    let pass = (est - closed_form).abs() <= 0.02 && (measure - mc).abs() <= 5e-3;
    verdict(
        9,
        "product of rotations, A=[0,1/2], N=1500 per axis",
        pass,
        format!(
            "estimate {est:.4} closed form {closed_form:.4} measure {measure:.5} monte carlo {mc:.5} {:.2?}",
            start.elapsed()
        ),
    );
}

#[test]
fn criterion_10_uniform_convergence() {
    let start = Instant::now();
    let n_list = [500, 1000, 2000];
    let half = rat(1, 2);
    let x0 = (PI / 3.0).cos();
    let cases = [
        (
            "lagrange1d",
            ScanOperator::Lagrange1d { theta: rat(1, 3), d: 1.0 },
            vec![Region::interval(-1.0, x0 - 0.2).unwrap(), Region::interval(x0 + 0.2, 1.0).unwrap()],
        ),
        (
            "lagrange2d",
            ScanOperator::Lagrange2d {
                theta: rat(1, 3),
                gamma: half,
            },
            vec![
                Region::rect((-1.0, x0 - 0.2), (-1.0, 1.0)).unwrap(),
                Region::rect((-1.0, 1.0), (-1.0, -0.2)).unwrap(),
                Region::rect((x0 + 0.2, 1.0), (0.2, 1.0)).unwrap(),
            ],
        ),
        (
            "shepard2d",
            ScanOperator::Shepard2d {
                s: 2.0,
                x0: half,
                y0: half,
                convention: Convention::LowerLeft,
            },
            vec![
                Region::rect((0.7, 1.0), (0.0, 1.0)).unwrap(),
                Region::rect((0.0, 0.3), (0.0, 0.3)).unwrap(),
                Region::rect((0.0, 1.0), (0.7, 1.0)).unwrap(),
            ],
        ),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, op, regions) in cases {
        let table = uniform_convergence_scan(&op, &regions, &n_list).unwrap();
        let sup = &table.sup_by_n;
        let ok = sup[0] <= 0.05 && sup.windows(2).all(|w| w[1] <= 1.2 * w[0] + 1e-12);
        pass &= ok;
        parts.push(format!("{name} {:.2e}/{:.2e}/{:.2e}", sup[0], sup[1], sup[2]));
    }
    parts.push(format!("{:.2?}", start.elapsed()));
    verdict(10, "sup error away from the jump set, n=500..2000", pass, parts.join(" "));
}

#[test]
fn criterion_11_property_suite() {
    let start = Instant::now();
    let outcomes = run_property_suite(11, 100).unwrap();
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.passed())
        .map(|o| format!("{:?}: {}", o.property, o.failures[0]))
        .collect();
    let (fast, t) = within(60, start);
    verdict(
        11,
        "randomized properties, 100 configurations each",
        failed.is_empty() && outcomes.iter().all(|o| o.cases == 100) && fast,
        if failed.is_empty() {
            format!("{} properties green {t:.2?}", outcomes.len())
        } else {
            failed.join("; ")
        },
    );
}
