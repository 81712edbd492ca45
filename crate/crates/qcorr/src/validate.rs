//! The self-check suite behind `qcorr validate`: channel invariants,
//! independently cross-checked measure implementations, and the
//! death/revival hierarchy across every shipped configuration.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{
    apply, completeness_defect, kraus_phase_damping_sqrt_variant, ChannelFamily, ChannelKind,
    ChannelParams, NoiseSides, Regime, COMPLETENESS_TOL,
};
use crate::config::RunConfig;
use crate::dynamics::MeasureKey;
use crate::error::{QcorrError, Result};
use crate::linalg::{pauli, ComplexMatrix};
use crate::measures::{concurrence, evaluate_state, SteeringMode};
use crate::output::run_artifacts;
use crate::states::{make_pure, make_werner, pauli_decompose, BellState, DensityMatrix,
    PureStateSpec, WernerSpec};
use crate::table::SHIPPED_CONFIGS;

const RNG_SEED: u64 = 0x71c0_44ee_5eed;
const FD_STEP: f64 = 1e-6;
const FD_REL_TOL: f64 = 1e-6;
const IDENTITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const EIG_FLOOR: f64 = -1e-10;
const BRUTEFORCE_TOL: f64 = 1e-9;
const UNITARY_INVARIANCE_TOL: f64 = 1e-10;
/// Regular sample points for the derivative checks; away from t = 0 (the
/// only derivative branch point of the shipped parameter sets).
const DERIVATIVE_TIMES: [f64; 5] = [0.35, 0.8, 1.9, 3.7, 7.3];

/// One named invariant check.
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

/// The whole suite's outcome.
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
    /// Informational lines (no pass/fail semantics).
    pub info: Vec<String>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ValidateOptions {
    /// Swap in the non-trace-preserving square-root dephasing kernel to
    /// demonstrate that the completeness check catches it.
    pub pd_sqrt_kernel: bool,
}

/// The eight canonical (family, regime) combinations used by the channel
/// checks, with the same parameters as the shipped Bell-pair configs.
fn canonical_families() -> Result<Vec<ChannelFamily>> {
    let scalar = |gamma: f64| ChannelParams { gamma: Some(gamma), ..Default::default() };
    Ok(vec![
        ChannelFamily::new(ChannelKind::AmplitudeDamping, Regime::Markovian, &scalar(1.0))?,
        ChannelFamily::new(
            ChannelKind::AmplitudeDamping,
            Regime::NonMarkovian,
            &ChannelParams { gamma: Some(1.0), line_width: Some(0.1), ..Default::default() },
        )?,
        ChannelFamily::new(ChannelKind::PhaseDamping, Regime::Markovian, &scalar(1.0))?,
        ChannelFamily::new(
            ChannelKind::PhaseDamping,
            Regime::NonMarkovian,
            &ChannelParams { gamma: Some(1.0), line_width: Some(0.1), ..Default::default() },
        )?,
        ChannelFamily::new(
            ChannelKind::Depolarizing,
            Regime::Markovian,
            &ChannelParams {
                gamma_axes: Some([0.2, 0.2, 0.2]),
                line_width: Some(1.0),
                ..Default::default()
            },
        )?,
        ChannelFamily::new(
            ChannelKind::Depolarizing,
            Regime::NonMarkovian,
            &ChannelParams {
                gamma_axes: Some([0.2, 0.2, 5.0]),
                line_width_axes: Some([1.0, 1.0, 1.0]),
                ..Default::default()
            },
        )?,
        ChannelFamily::new(
            ChannelKind::RandomTelegraph,
            Regime::Markovian,
            &ChannelParams { gamma: Some(1.0), switching_rate: Some(0.25), ..Default::default() },
        )?,
        ChannelFamily::new(
            ChannelKind::RandomTelegraph,
            Regime::NonMarkovian,
            &ChannelParams { gamma: Some(1.0), switching_rate: Some(40.0), ..Default::default() },
        )?,
    ])
}

fn slug(family: &ChannelFamily) -> String {
    let kind = match family.kind() {
        ChannelKind::AmplitudeDamping => "ad",
        ChannelKind::PhaseDamping => "pd",
        ChannelKind::Depolarizing => "dp",
        ChannelKind::RandomTelegraph => "rtn",
    };
    let regime = match family.regime() {
        Regime::Markovian => "markov",
        Regime::NonMarkovian => "nonmarkov",
    };
    format!("{kind}_{regime}")
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller on two uniforms.
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    let re = standard_normal(rng);
    let im = standard_normal(rng);
    Complex64::new(re, im)
}

/// A full-rank random state: `G G^dag / tr(G G^dag)` with Ginibre `G`.
fn ginibre_state(rng: &mut ChaCha8Rng) -> Result<DensityMatrix> {
    let mut entries = [Complex64::new(0.0, 0.0); 16];
    for e in entries.iter_mut() {
        *e = random_complex(rng);
    }
    let g = ComplexMatrix::from_fn(4, |i, j| entries[4 * i + j])?;
    let m = g.mul(&g.adjoint())?;
    let tr = m.trace().re;
    DensityMatrix::new(m.scale(Complex64::new(1.0 / tr, 0.0)))
}

/// A Haar-ish random 2x2 unitary: Gram-Schmidt on a Ginibre matrix.
fn random_unitary2(rng: &mut ChaCha8Rng) -> Result<ComplexMatrix> {
    loop {
        let mut a = [random_complex(rng), random_complex(rng)];
        let mut b = [random_complex(rng), random_complex(rng)];
        let na = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt();
        if na < 1e-6 {
            continue;
        }
        a = [a[0] / na, a[1] / na];
        let overlap = a[0].conj() * b[0] + a[1].conj() * b[1];
        b = [b[0] - overlap * a[0], b[1] - overlap * a[1]];
        let nb = (b[0].norm_sqr() + b[1].norm_sqr()).sqrt();
        if nb < 1e-6 {
            continue;
        }
        b = [b[0] / nb, b[1] / nb];
        return ComplexMatrix::from_slice(2, &[a[0], b[0], a[1], b[1]]);
    }
}

/// Concurrence through a route sharing no code with the primary one:
/// the characteristic polynomial of `rho rho~` via Newton's identities on
/// trace powers, its roots by Durand-Kerner iteration.
///
/// Root iteration converges quadratically only for simple roots, so this
/// oracle is accurate (~1e-12) on states whose `rho rho~` spectrum is
/// well separated — random full-rank states in particular. Repeated
/// eigenvalues (pure states, Werner states) smear into root clusters and
/// only the primary implementation should be trusted there.
pub fn bruteforce_concurrence(rho: &DensityMatrix) -> Result<f64> {
    let sy = pauli(2);
    let syy = ComplexMatrix::kron(&sy, &sy)?;
    let flipped = syy.mul(&rho.matrix().conjugate())?.mul(&syy)?;
    let m = rho.matrix().mul(&flipped)?;
    let m2 = m.mul(&m)?;
    let m3 = m2.mul(&m)?;
    let m4 = m3.mul(&m)?;
    let s = [m.trace(), m2.trace(), m3.trace(), m4.trace()];
    let e1 = s[0];
    let e2 = (e1 * s[0] - s[1]) / 2.0;
    let e3 = (e2 * s[0] - e1 * s[1] + s[2]) / 3.0;
    let e4 = (e3 * s[0] - e2 * s[1] + e1 * s[2] - s[3]) / 4.0;
    let coeffs = [
        Complex64::new(1.0, 0.0),
        -e1,
        e2,
        -e3,
        e4,
    ];
    let roots = durand_kerner(&coeffs);
    let mut lambda: Vec<f64> = roots.iter().map(|z| z.re.max(0.0)).collect();
    lambda.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let raw = lambda[0].sqrt() - lambda[1].sqrt() - lambda[2].sqrt() - lambda[3].sqrt();
    Ok(raw.max(0.0))
}

/// Simultaneous root iteration for a monic quartic.
fn durand_kerner(coeffs: &[Complex64; 5]) -> [Complex64; 4] {
    let eval = |z: Complex64| {
        coeffs
            .iter()
            .skip(1)
            .fold(coeffs[0], |acc, &c| acc * z + c)
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut r = [
        Complex64::new(1.0, 0.0),
        seed,
        seed * seed,
        seed * seed * seed,
    ];
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..4 {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..4 {
                if j != i {
                    denom *= r[i] - r[j];
                }
            }
            if denom.norm() < 1e-300 {
                continue;
            }
            let step = eval(r[i]) / denom;
            r[i] -= step;
            max_step = max_step.max(step.norm());
        }
        let scale = r.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
        if max_step < 1e-15 * scale {
            break;
        }
    }
    r
}

fn phi_plus() -> Result<DensityMatrix> {
    make_pure(&PureStateSpec {
        alpha: Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        beta: Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
    })
}

fn check_completeness(
    family: &ChannelFamily,
    opts: &ValidateOptions,
    out: &mut Vec<CheckResult>,
) -> Result<()> {
    let corrupted = opts.pd_sqrt_kernel && family.kind() == ChannelKind::PhaseDamping;
    let mut worst = 0.0f64;
    let mut worst_t = 0.0f64;
    for i in 0..1000 {
        let t = 10.0 * (i as f64) / 999.0;
        let defect = if corrupted {
            let p = family
                .memory_kernel(t)?
                .as_scalar()
                .expect("dephasing kernel is scalar");
            completeness_defect(&kraus_phase_damping_sqrt_variant(p)?)?
        } else {
            completeness_defect(family.kraus_at(t)?.operators())?
        };
        if defect > worst {
            worst = defect;
            worst_t = t;
        }
    }
    let label = if corrupted { " (sqrt-kernel variant)" } else { "" };
    out.push(CheckResult::new(
        format!("kraus_completeness_{}{label}", slug(family)),
        worst <= COMPLETENESS_TOL,
        format!("worst defect {worst:.3e} at t = {worst_t:.3}"),
    ));
    Ok(())
}

fn check_identity_at_zero(family: &ChannelFamily, out: &mut Vec<CheckResult>) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(RNG_SEED ^ 0x1d);
    let states = [phi_plus()?, ginibre_state(&mut rng)?];
    let kraus = family.kraus_at(0.0)?;
    let mut worst = 0.0f64;
    for rho in &states {
        for sides in [NoiseSides::First, NoiseSides::Both] {
            let evolved = apply(&kraus, rho, sides)?;
            let diff = evolved.matrix().sub(rho.matrix())?.hs_norm();
            worst = worst.max(diff);
        }
    }
    out.push(CheckResult::new(
        format!("identity_at_time_zero_{}", slug(family)),
        worst <= IDENTITY_TOL,
        format!("worst deviation {worst:.3e}"),
    ));
    Ok(())
}

fn check_trace_positivity(family: &ChannelFamily, out: &mut Vec<CheckResult>) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(RNG_SEED ^ 0x2e);
    let mut worst_trace = 0.0f64;
    let mut worst_eig = f64::INFINITY;
    let mut failure = None;
    for i in 0..100 {
        let rho = ginibre_state(&mut rng)?;
        let t = 0.25 + 4.75 * (i as f64) / 99.0;
        let sides = if i % 2 == 0 { NoiseSides::First } else { NoiseSides::Both };
        // `apply` revalidates trace, Hermiticity, and positivity on
        // construction of the evolved state.
        match apply(&family.kraus_at(t)?, &rho, sides) {
            Ok(evolved) => {
                let tr = evolved.matrix().trace();
                worst_trace = worst_trace.max((tr.re - 1.0).abs().max(tr.im.abs()));
                let eig = evolved.matrix().hermitian_eig()?;
                worst_eig = worst_eig.min(
                    eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min),
                );
            }
            Err(e) => {
                failure = Some(format!("state {i} at t = {t:.3}: {e}"));
                break;
            }
        }
    }
    let (passed, detail) = match failure {
        Some(msg) => (false, msg),
        None => (
            worst_trace <= TRACE_TOL && worst_eig >= EIG_FLOOR,
            format!("worst trace defect {worst_trace:.3e}, min eigenvalue {worst_eig:.3e}"),
        ),
    };
    out.push(CheckResult::new(
        format!("trace_positivity_{}", slug(family)),
        passed,
        detail,
    ));
    Ok(())
}

fn check_kraus_derivative_fd(family: &ChannelFamily, out: &mut Vec<CheckResult>) -> Result<()> {
    let mut worst = 0.0f64;
    let mut worst_t = 0.0f64;
    for &t in &DERIVATIVE_TIMES {
        let analytic = family.kraus_derivative_at(t)?;
        let ahead = family.kraus_at(t + FD_STEP)?;
        let behind = family.kraus_at(t - FD_STEP)?;
        for (k, a) in analytic.iter().enumerate() {
            let fd = ahead.operators()[k]
                .sub(&behind.operators()[k])?
                .scale(Complex64::new(1.0 / (2.0 * FD_STEP), 0.0));
            let rel = a.sub(&fd)?.hs_norm() / a.hs_norm().max(1.0);
            if rel > worst {
                worst = rel;
                worst_t = t;
            }
        }
    }
    out.push(CheckResult::new(
        format!("kraus_derivative_fd_{}", slug(family)),
        worst <= FD_REL_TOL,
        format!("worst relative error {worst:.3e} at t = {worst_t}"),
    ));
    Ok(())
}

fn check_concurrence_bruteforce(out: &mut Vec<CheckResult>) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(RNG_SEED ^ 0x3f);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let rho = ginibre_state(&mut rng)?;
        let primary = concurrence(&rho)?;
        let oracle = bruteforce_concurrence(&rho)?;
        worst = worst.max((primary - oracle).abs());
    }
    out.push(CheckResult::new(
        "concurrence_bruteforce_agreement",
        worst <= BRUTEFORCE_TOL,
        format!("worst |primary - oracle| = {worst:.3e} over 100 random states"),
    ));
    Ok(())
}

fn check_local_unitary_invariance(out: &mut Vec<CheckResult>) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(RNG_SEED ^ 0x4a);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let rho = ginibre_state(&mut rng)?;
        let u = random_unitary2(&mut rng)?;
        let v = random_unitary2(&mut rng)?;
        let uv = ComplexMatrix::kron(&u, &v)?;
        let rotated = DensityMatrix::new(uv.mul(rho.matrix())?.mul(&uv.adjoint())?)?;
        let a = evaluate_state(&rho, SteeringMode::SingularValues)?;
        let b = evaluate_state(&rotated, SteeringMode::SingularValues)?;
        for (x, y) in [
            (a.fidelity, b.fidelity),
            (a.n_value, b.n_value),
            (a.bell, b.bell),
            (a.lambda2, b.lambda2),
            (a.lambda3, b.lambda3),
            (a.concurrence_raw, b.concurrence_raw),
        ] {
            worst = worst.max((x - y).abs());
        }
    }
    out.push(CheckResult::new(
        "local_unitary_invariance",
        worst <= UNITARY_INVARIANCE_TOL,
        format!("worst measure shift {worst:.3e} over 50 unitary pairs"),
    ));
    Ok(())
}

/// Key crossing counts and the verdict must not depend on whether steering
/// coefficients come from singular values or eigenvalue magnitudes when the
/// correlation matrix is symmetric (it is diagonal for every shipped row).
fn check_steering_mode_agreement(out: &mut Vec<CheckResult>) -> Result<()> {
    for name in ["bell_ad_markov", "bell_rtn_markov"] {
        let json = SHIPPED_CONFIGS
            .iter()
            .find(|(n, _)| *n == name)
            .expect("shipped config")
            .1;
        let cfg = RunConfig::from_json(json)?;
        let mut spec = cfg.to_spec()?;
        spec.measures.tau_qsl = false;
        spec.steering_mode = SteeringMode::SingularValues;
        let singular = run_artifacts(&spec)?;
        spec.steering_mode = SteeringMode::Eigenvalues;
        let eigen = run_artifacts(&spec)?;
        let mut agree = singular.hierarchy.verdict == eigen.hierarchy.verdict
            && singular.hierarchy.decay_order_ok == eigen.hierarchy.decay_order_ok
            && singular.hierarchy.revival_order_ok == eigen.hierarchy.revival_order_ok;
        for key in MeasureKey::CHAIN {
            agree &= singular.crossings.of(key).len() == eigen.crossings.of(key).len();
        }
        out.push(CheckResult::new(
            format!("steering_mode_verdicts_{name}"),
            agree,
            format!(
                "singular-value verdict {}, eigenvalue verdict {}",
                singular.hierarchy.verdict.as_str(),
                eigen.hierarchy.verdict.as_str()
            ),
        ));
    }
    Ok(())
}

fn check_shipped_hierarchies(out: &mut Vec<CheckResult>) -> Result<()> {
    for (name, json) in SHIPPED_CONFIGS {
        let cfg = RunConfig::from_json(json)
            .map_err(|e| QcorrError::Config(format!("{name}: {e}")))?;
        let mut spec = cfg.to_spec()?;
        // The QSL column does not participate in the hierarchy.
        spec.measures.tau_qsl = false;
        let artifacts = run_artifacts(&spec)?;
        let h = &artifacts.hierarchy;
        let revival_ok = h.revival_order_ok.unwrap_or(true);
        out.push(CheckResult::new(
            format!("hierarchy_{name}"),
            h.decay_order_ok && revival_ok,
            format!(
                "verdict {}, decay order {}, revival order {}",
                h.verdict.as_str(),
                h.decay_order_ok,
                h.revival_order_ok.map_or("n/a".to_string(), |b| b.to_string()),
            ),
        ));
    }
    Ok(())
}

fn bloch_sum_info(label: &str, rho: &DensityMatrix) -> Result<String> {
    let d = pauli_decompose(rho)?;
    let sum_r: f64 = d.r.iter().sum();
    let sum_s: f64 = d.s.iter().sum();
    Ok(format!(
        "bloch sums for {label}: sum(r) = {sum_r:.6e}, sum(s) = {sum_s:.6e} \
         (reported for inspection; no constraint imposed)"
    ))
}

/// Runs every check; a `Result` error means the suite itself could not run,
/// not that an invariant failed.
pub fn run_validation(opts: &ValidateOptions) -> Result<ValidationReport> {
    let families = canonical_families()?;
    let mut checks = Vec::new();
    for family in &families {
        check_completeness(family, opts, &mut checks)?;
    }
    for family in &families {
        check_identity_at_zero(family, &mut checks)?;
    }
    for family in &families {
        check_trace_positivity(family, &mut checks)?;
    }
    for family in &families {
        check_kraus_derivative_fd(family, &mut checks)?;
    }
    check_concurrence_bruteforce(&mut checks)?;
    check_local_unitary_invariance(&mut checks)?;
    check_steering_mode_agreement(&mut checks)?;
    check_shipped_hierarchies(&mut checks)?;

    let info = vec![
        bloch_sum_info("Bell phi+", &phi_plus()?)?,
        bloch_sum_info(
            "Werner(0.9)",
            &make_werner(&WernerSpec { p: 0.9, bell: BellState::PhiPlus })?,
        )?,
    ];

    Ok(ValidationReport { checks, info })
}
