//! Release gate: every criterion below must hold before shipping. Each test
//! checks one criterion end to end and prints as a single pass/fail line
//! under `cargo test --test acceptance`.

use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use qcorr::config::RunConfig;
use qcorr::dynamics::{
    find_crossings, qsl_turning_points, sweep, verify_hierarchy, EventDirection, MeasureKey,
    MeasureSelection, SweepSpec, Verdict,
};
use qcorr::table::{run_table, TableEntry, SHIPPED_CONFIGS};
use qcorr::validate::{run_validation, ValidateOptions};
use qcorr::measures::{evaluate_state, SteeringMode};
use qcorr::{make_werner, BellState, WernerSpec};

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const LN_2: f64 = std::f64::consts::LN_2;

/// The full ten-scenario table is expensive enough that the criteria which
/// need it share one computation.
fn table() -> &'static [TableEntry] {
    static TABLE: OnceLock<Vec<TableEntry>> = OnceLock::new();
    TABLE.get_or_init(|| run_table().expect("table scenarios must run"))
}

fn table_entry(name: &str) -> &'static TableEntry {
    table()
        .iter()
        .find(|e| e.name == name)
        .unwrap_or_else(|| panic!("{name} missing from table"))
}

fn spec_for(name: &str) -> SweepSpec {
    let json = SHIPPED_CONFIGS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, j)| *j)
        .unwrap_or_else(|| panic!("{name} missing from shipped configs"));
    RunConfig::from_json(json).and_then(|c| c.to_spec()).expect("shipped config must parse")
}

/// Bisection on a scalar function of the Werner mixing weight.
fn bisect_werner(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    assert!(f(lo) < 0.0 && f(hi) > 0.0, "bracket must straddle the root");
    for _ in 0..200 {
        if hi - lo <= 1e-12 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Criterion 1: static Werner thresholds located by bisection — concurrence
/// becomes positive at p = 1/3, the Bell strength passes 2 and the two-axis
/// steering parameter passes 0 at p = 1/sqrt(2) — each within 1e-6, and the
/// whole search finishes in under a second.
#[test]
fn criterion_1_werner_static_thresholds() {
    let start = Instant::now();
    let measure_at = |p: f64| {
        let rho = make_werner(&WernerSpec { p, bell: BellState::PhiPlus }).unwrap();
        evaluate_state(&rho, SteeringMode::SingularValues).unwrap()
    };

    let p_conc = bisect_werner(|p| measure_at(p).concurrence_raw, 0.0, 1.0);
    let p_bell = bisect_werner(|p| measure_at(p).bell - 2.0, 0.0, 1.0);
    let p_s2 = bisect_werner(|p| measure_at(p).lambda2 - 1.0, 0.0, 1.0);

    assert!(
        (p_conc - 1.0 / 3.0).abs() < 1e-6,
        "concurrence threshold {p_conc} should be 1/3"
    );
    assert!(
        (p_bell - 1.0 / SQRT_2).abs() < 1e-6,
        "Bell threshold {p_bell} should be 1/sqrt(2)"
    );
    assert!(
        (p_s2 - 1.0 / SQRT_2).abs() < 1e-6,
        "two-axis steering threshold {p_s2} should be 1/sqrt(2)"
    );
    assert!(start.elapsed().as_secs_f64() < 1.0, "threshold search must finish within 1 s");
}

/// Criterion 2: for a Bell pair under Markovian amplitude damping with
/// gamma = 1, the refined death times must match the closed forms
/// q_B = q_S2 = ln 2, q_S3 = -ln(sqrt(2) - 1), q_N = -ln(3 - 2 sqrt(2))
/// within 1e-6.
#[test]
fn criterion_2_closed_form_death_times_markovian_damping() {
    let crossings = &table_entry("bell_ad_markov").artifacts.crossings;
    let cases = [
        (MeasureKey::Bell, LN_2),
        (MeasureKey::S2, LN_2),
        (MeasureKey::S3, -(SQRT_2 - 1.0).ln()),
        (MeasureKey::NValue, -(3.0 - 2.0 * SQRT_2).ln()),
    ];
    for (key, expected) in cases {
        let found = crossings
            .first_death(key)
            .unwrap_or_else(|| panic!("{} must die", key.as_str()));
        assert!(
            (found - expected).abs() < 1e-6,
            "{} death at {found}, closed form {expected}",
            key.as_str()
        );
    }
}

/// Criterion 3: on every one of the ten shipped scenarios the measures die in
/// chain order (stronger first), and on every scenario whose verdict is
/// "both" the revivals respect the reversed order.
#[test]
fn criterion_3_hierarchy_ordering_all_rows() {
    let entries = table();
    assert_eq!(entries.len(), 10);
    for entry in entries {
        let h = &entry.artifacts.hierarchy;
        assert!(h.decay_order_ok, "{}: deaths out of order: {:?}", entry.name, h.violations);
        if h.verdict == Verdict::Both {
            assert_eq!(
                h.revival_order_ok,
                Some(true),
                "{}: revivals out of order: {:?}",
                entry.name,
                h.violations
            );
        }
    }
}

/// Criterion 4: the `table1` command emits exactly the expected verdict line
/// for each of the ten scenarios, in order.
#[test]
fn criterion_4_table1_verdict_lines() {
    let out = Command::new(env!("CARGO_BIN_EXE_qcorr"))
        .arg("table1")
        .output()
        .expect("binary must run");
    assert!(out.status.success(), "table1 failed: {}", String::from_utf8_lossy(&out.stderr));
    let expected = "\
Bell phi+ x AD x Markovian: decay
Bell phi+ x AD x non-Markovian: both
Bell phi+ x PD x Markovian: decay
Bell phi+ x PD x non-Markovian: decay
Bell phi+ x DP x Markovian: decay
Bell phi+ x DP x non-Markovian: both
Bell phi+ x RTN x Markovian: decay
Bell phi+ x RTN x non-Markovian: both
Werner(0.9) x AD x non-Markovian: both
Werner(0.9) x RTN x non-Markovian: both
";
    assert_eq!(String::from_utf8_lossy(&out.stdout), expected);
}

/// Criterion 5: non-Markovian phase damping with line width 0.1 never
/// revives anything — zero revival events for every measure on [0, 40]
/// sampled at 4000 points.
#[test]
fn criterion_5_nonmarkovian_dephasing_no_revivals() {
    let mut spec = spec_for("bell_pd_nonmarkov");
    spec.n_points = 4000;
    spec.measures = MeasureSelection::without_qsl();
    assert_eq!(spec.x_max, 40.0);
    let traj = sweep(&spec).unwrap();
    let report = find_crossings(&spec, &traj).unwrap();
    for key in MeasureKey::CHAIN {
        let revivals = report
            .of(key)
            .iter()
            .filter(|e| e.direction == EventDirection::Revival)
            .count();
        assert_eq!(revivals, 0, "{} revived under non-Markovian dephasing", key.as_str());
    }
    let h = verify_hierarchy(&spec, &traj, &report);
    assert_ne!(h.verdict, Verdict::Both);
}

/// Criterion 6: the speed-limit time is monotone non-decreasing (discrete
/// differences >= -1e-10) on (0, 15] for Markovian amplitude and phase
/// damping, and under non-Markovian amplitude damping it has an interior
/// turning point within one coarse grid step of the first concurrence
/// revival.
#[test]
fn criterion_6_qsl_monotone_and_turning_point() {
    for name in ["bell_ad_markov", "bell_pd_markov"] {
        let mut spec = spec_for(name);
        spec.x_max = 15.0;
        spec.n_points = 1500;
        spec.measures = MeasureSelection::none();
        spec.measures.tau_qsl = true;
        let traj = sweep(&spec).unwrap();
        let tau: Vec<f64> =
            traj.points.iter().skip(1).map(|p| p.qsl.expect("tau requested").tau).collect();
        for (i, w) in tau.windows(2).enumerate() {
            assert!(
                w[1] - w[0] >= -1e-10,
                "{name}: tau decreases at step {} ({} -> {})",
                i + 1,
                w[0],
                w[1]
            );
        }
    }

    let spec = spec_for("bell_ad_nonmarkov");
    let entry = table_entry("bell_ad_nonmarkov");
    let turnings = qsl_turning_points(&spec, &entry.artifacts.trajectory).unwrap();
    assert!(!turnings.is_empty(), "oscillatory damping must produce tau turning points");
    let revival = entry
        .artifacts
        .crossings
        .first_revival(MeasureKey::Concurrence)
        .expect("concurrence must revive under oscillatory damping");
    let grid_step = spec.x_max / spec.n_points as f64;
    let nearest = turnings
        .iter()
        .map(|t| (t - revival).abs())
        .fold(f64::INFINITY, f64::min);
    assert!(
        nearest <= grid_step,
        "no tau turning point within {grid_step} of the concurrence revival at {revival} \
         (closest {nearest})"
    );
}

/// Criterion 7: the property suite — completeness at 1000 grid times for all
/// eight channel/regime combinations (<= 1e-10), trace and positivity
/// preservation on 100 random states per channel, analytic-vs-finite-
/// difference Kraus derivatives (<= 1e-6 relative), Hermitian-route
/// concurrence against the root-finding oracle on 100 random states
/// (<= 1e-9), and local-unitary invariance on 50 unitary pairs (<= 1e-10).
#[test]
fn criterion_7_property_suite() {
    let report = run_validation(&ValidateOptions::default()).unwrap();
    let required = [
        "kraus_completeness_",
        "trace_positivity_",
        "kraus_derivative_fd_",
        "concurrence_bruteforce",
        "local_unitary_invariance",
    ];
    for prefix in required {
        assert!(
            report.checks.iter().any(|c| c.name.starts_with(prefix)),
            "validation suite lost the {prefix} checks"
        );
    }
    for check in &report.checks {
        assert!(check.passed, "{} failed: {}", check.name, check.detail);
    }
}

/// Criterion 8: sweeping the same config twice produces byte-identical CSV
/// and JSON artifacts.
#[test]
fn criterion_8_csv_determinism() {
    for name in ["bell_rtn_nonmarkov", "werner_psweep"] {
        let spec = spec_for(name);
        let a = qcorr::output::run_artifacts(&spec).unwrap();
        let b = qcorr::output::run_artifacts(&spec).unwrap();
        assert_eq!(a.trajectory_csv, b.trajectory_csv, "{name}: CSV differs between runs");
        assert_eq!(a.crossings_json, b.crossings_json, "{name}: crossings differ between runs");
        assert_eq!(a.verdict_json, b.verdict_json, "{name}: verdict differs between runs");
    }
}
