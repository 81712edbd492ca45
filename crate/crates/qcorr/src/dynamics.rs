//! Trajectory sweeps, threshold-crossing detection with sub-grid refinement,
//! hierarchy verification, and quantum-speed-limit turning points.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{apply, ChannelFamily, NoiseSides};
use crate::error::{QcorrError, Result};
use crate::measures::{
    evaluate_state, qsl_time, MeasureSample, QslGenerator, QslSample, SteeringMode, Thresholds,
};
use crate::states::{make_pure, make_werner, DensityMatrix, PureStateSpec, WernerSpec};

/// Indicator values within this band of zero carry no sign; a crossing needs
/// a genuine flip between banded signs. This suppresses the floating-point
/// flutter of indicators that approach a threshold asymptotically.
pub const DEAD_BAND: f64 = 1e-12;
/// Bisection stops when the bracket is at most this wide.
pub const BISECTION_WIDTH: f64 = 1e-12;
/// First-death and aliveness comparisons treat events this close as ties.
pub const EVENT_TIE: f64 = 1e-8;
/// A sampled local minimum only counts as a revival if the measure fell at
/// least this far before it and climbs at least this far after it.
pub const REVIVAL_PROMINENCE: f64 = 1e-6;
/// Golden-section width for refining local-minimum revivals.
pub const LOCAL_MIN_TOL: f64 = 1e-9;
/// Golden-section width for refining QSL turning points.
pub const QSL_TURNING_TOL: f64 = 1e-6;

/// What the sweep variable is.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Evolve one initial state through the channel over `[0, x_max]`.
    #[default]
    Time,
    /// No channel: scan the Werner family over mixing weights `[0, x_max]`.
    WernerP,
}

impl SweepAxis {
    pub fn label(&self) -> &'static str {
        match self {
            SweepAxis::Time => "t",
            SweepAxis::WernerP => "p",
        }
    }
}

/// The state the sweep starts from (or, for the Werner axis, the Bell state
/// the family is built on).
#[derive(Clone, Copy, Debug)]
pub enum InitialState {
    Pure(PureStateSpec),
    Werner(WernerSpec),
}

impl InitialState {
    pub fn build(&self) -> Result<DensityMatrix> {
        match self {
            InitialState::Pure(s) => make_pure(s),
            InitialState::Werner(s) => make_werner(s),
        }
    }
}

/// Which measures are computed into output columns. Threshold analysis always
/// sees the full set; this only controls the emitted columns and whether the
/// (comparatively expensive) QSL column is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeasureSelection {
    pub fidelity: bool,
    pub n_value: bool,
    pub bell: bool,
    pub s2: bool,
    pub s3: bool,
    pub concurrence: bool,
    pub tau_qsl: bool,
}

impl Default for MeasureSelection {
    fn default() -> Self {
        Self {
            fidelity: true,
            n_value: true,
            bell: true,
            s2: true,
            s3: true,
            concurrence: true,
            tau_qsl: true,
        }
    }
}

impl MeasureSelection {
    pub const COLUMN_ORDER: [&'static str; 7] =
        ["fidelity", "n_value", "bell", "s2", "s3", "concurrence", "tau_qsl"];

    pub fn none() -> Self {
        Self {
            fidelity: false,
            n_value: false,
            bell: false,
            s2: false,
            s3: false,
            concurrence: false,
            tau_qsl: false,
        }
    }

    pub fn without_qsl() -> Self {
        Self { tau_qsl: false, ..Self::default() }
    }

    pub fn from_names(names: &[String]) -> Result<Self> {
        let mut sel = Self::none();
        for name in names {
            match name.as_str() {
                "fidelity" => sel.fidelity = true,
                "n_value" => sel.n_value = true,
                "bell" => sel.bell = true,
                "s2" => sel.s2 = true,
                "s3" => sel.s3 = true,
                "concurrence" => sel.concurrence = true,
                "tau_qsl" => sel.tau_qsl = true,
                other => {
                    return Err(QcorrError::Config(format!(
                        "unknown measure `{other}` (expected one of {:?})",
                        Self::COLUMN_ORDER
                    )))
                }
            }
        }
        if sel == Self::none() {
            return Err(QcorrError::Config("empty measure list".into()));
        }
        Ok(sel)
    }

    pub fn contains(&self, name: &str) -> bool {
        match name {
            "fidelity" => self.fidelity,
            "n_value" => self.n_value,
            "bell" => self.bell,
            "s2" => self.s2,
            "s3" => self.s3,
            "concurrence" => self.concurrence,
            "tau_qsl" => self.tau_qsl,
            _ => false,
        }
    }
}

/// A fully validated sweep request.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub initial: InitialState,
    pub channel: Option<ChannelFamily>,
    /// End of the sweep range: a time for the time axis, a mixing weight
    /// (at most 1) for the Werner axis. The range always starts at 0.
    pub x_max: f64,
    pub n_points: usize,
    pub sides: NoiseSides,
    pub measures: MeasureSelection,
    pub thresholds: Thresholds,
    pub steering_mode: SteeringMode,
    pub qsl_generator: QslGenerator,
}

impl SweepSpec {
    pub fn time_sweep(
        initial: InitialState,
        channel: ChannelFamily,
        t_max: f64,
        n_points: usize,
    ) -> Self {
        Self {
            axis: SweepAxis::Time,
            initial,
            channel: Some(channel),
            x_max: t_max,
            n_points,
            sides: NoiseSides::First,
            measures: MeasureSelection::default(),
            thresholds: Thresholds::default(),
            steering_mode: SteeringMode::default(),
            qsl_generator: QslGenerator::default(),
        }
    }

    pub fn werner_sweep(spec: WernerSpec, p_max: f64, n_points: usize) -> Self {
        Self {
            axis: SweepAxis::WernerP,
            initial: InitialState::Werner(spec),
            channel: None,
            x_max: p_max,
            n_points,
            sides: NoiseSides::First,
            measures: MeasureSelection::without_qsl(),
            thresholds: Thresholds::default(),
            steering_mode: SteeringMode::default(),
            qsl_generator: QslGenerator::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < 2 {
            return Err(QcorrError::InvalidArgument(format!(
                "n_points must be at least 2, got {}",
                self.n_points
            )));
        }
        if !self.x_max.is_finite() || self.x_max <= 0.0 {
            return Err(QcorrError::InvalidArgument(format!(
                "sweep range end must be positive and finite, got {}",
                self.x_max
            )));
        }
        match self.axis {
            SweepAxis::Time => {
                if self.channel.is_none() {
                    return Err(QcorrError::InvalidArgument(
                        "a time sweep needs a channel".into(),
                    ));
                }
            }
            SweepAxis::WernerP => {
                if self.channel.is_some() {
                    return Err(QcorrError::InvalidArgument(
                        "a Werner-weight sweep takes no channel".into(),
                    ));
                }
                if self.x_max > 1.0 {
                    return Err(QcorrError::InvalidArgument(format!(
                        "Werner mixing weight cannot exceed 1, got {}",
                        self.x_max
                    )));
                }
                if !matches!(self.initial, InitialState::Werner(_)) {
                    return Err(QcorrError::InvalidArgument(
                        "a Werner-weight sweep needs a werner initial_state \
                         (its bell field selects the family)"
                            .into(),
                    ));
                }
                if self.measures.tau_qsl {
                    return Err(QcorrError::InvalidArgument(
                        "tau_qsl is only defined along a time axis".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Grid coordinate of sample `i`, fixed to this exact expression so that
    /// repeated runs are bit-identical.
    pub fn grid_point(&self, i: usize) -> f64 {
        self.x_max * (i as f64) / ((self.n_points - 1) as f64)
    }

    /// The state at sweep coordinate `x` (any `x` in range, not only grid
    /// points; refinement relies on this).
    pub fn state_at(&self, x: f64) -> Result<DensityMatrix> {
        match self.axis {
            SweepAxis::Time => {
                let rho0 = self.initial.build()?;
                self.evolved(&rho0, x)
            }
            SweepAxis::WernerP => {
                let InitialState::Werner(w) = self.initial else {
                    unreachable!("validated");
                };
                make_werner(&WernerSpec { p: x, bell: w.bell })
            }
        }
    }

    fn evolved(&self, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        let family = self.channel.as_ref().expect("validated");
        let kraus = family.kraus_at(t)?;
        apply(&kraus, rho0, self.sides)
    }

    fn sample_at(&self, rho0: Option<&DensityMatrix>, x: f64) -> Result<TrajectoryPoint> {
        let rho = match (self.axis, rho0) {
            (SweepAxis::Time, Some(r)) => self.evolved(r, x)?,
            _ => self.state_at(x)?,
        };
        let sample = evaluate_state(&rho, self.steering_mode)?;
        let qsl = if self.measures.tau_qsl {
            let family = self.channel.as_ref().expect("validated");
            let base = match rho0 {
                Some(r) => r.clone(),
                None => self.initial.build()?,
            };
            Some(qsl_time(family, &base, x, self.sides, self.qsl_generator)?)
        } else {
            None
        };
        Ok(TrajectoryPoint { x, sample, qsl })
    }
}

/// One grid sample of a sweep.
#[derive(Clone, Debug)]
pub struct TrajectoryPoint {
    pub x: f64,
    pub sample: MeasureSample,
    pub qsl: Option<QslSample>,
}

/// A full sweep: `n_points` samples over `[0, x_max]`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub axis: SweepAxis,
    pub points: Vec<TrajectoryPoint>,
}

fn with_grid_context(e: QcorrError, label: &str, x: f64) -> QcorrError {
    use QcorrError::*;
    match e {
        InvalidArgument(m) => InvalidArgument(format!("at {label} = {x}: {m}")),
        NumericalFailure(m) => NumericalFailure(format!("at {label} = {x}: {m}")),
        NotPsd(m) => NotPsd(format!("at {label} = {x}: {m}")),
        NotAState(m) => NotAState(format!("at {label} = {x}: {m}")),
        CompletePositivityViolation(m) => {
            CompletePositivityViolation(format!("at {label} = {x}: {m}"))
        }
        other => other,
    }
}

/// Evaluates the whole grid. Points are independent and run in parallel on
/// the current rayon pool; the output order (and every floating-point
/// operation) is identical regardless of thread count.
pub fn sweep(spec: &SweepSpec) -> Result<Trajectory> {
    spec.validate()?;
    let rho0 = match spec.axis {
        SweepAxis::Time => Some(spec.initial.build()?),
        SweepAxis::WernerP => None,
    };
    let label = spec.axis.label();
    let points: Result<Vec<TrajectoryPoint>> = (0..spec.n_points)
        .into_par_iter()
        .map(|i| {
            let x = spec.grid_point(i);
            spec.sample_at(rho0.as_ref(), x)
                .map_err(|e| with_grid_context(e, label, x))
        })
        .collect();
    Ok(Trajectory { axis: spec.axis, points: points? })
}

/// The six thresholded measures, ordered from the strongest correlation
/// criterion to the weakest. Every earlier member implies every later one
/// pointwise, which is what the hierarchy checks lean on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKey {
    FLhv,
    Bell,
    S2,
    S3,
    NValue,
    Concurrence,
}

impl MeasureKey {
    pub const CHAIN: [MeasureKey; 6] = [
        MeasureKey::FLhv,
        MeasureKey::Bell,
        MeasureKey::S2,
        MeasureKey::S3,
        MeasureKey::NValue,
        MeasureKey::Concurrence,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MeasureKey::FLhv => "f_lhv",
            MeasureKey::Bell => "bell",
            MeasureKey::S2 => "s2",
            MeasureKey::S3 => "s3",
            MeasureKey::NValue => "n_value",
            MeasureKey::Concurrence => "concurrence",
        }
    }
}

/// Signed distance of a sample from `key`'s threshold: positive while the
/// property holds, negative once it is lost.
pub fn indicator(sample: &MeasureSample, key: MeasureKey, th: &Thresholds) -> f64 {
    match key {
        MeasureKey::FLhv => sample.fidelity - th.f_lhv,
        MeasureKey::Bell => sample.bell - th.bell_classical,
        MeasureKey::S2 => {
            (sample.lambda2 - 1.0) / (std::f64::consts::SQRT_2 - 1.0) - th.steering_zero
        }
        MeasureKey::S3 => (sample.lambda3 - 1.0) / (3.0f64.sqrt() - 1.0) - th.steering_zero,
        MeasureKey::NValue => sample.n_value - th.n_useful,
        MeasureKey::Concurrence => sample.concurrence_raw - th.concurrence_zero,
    }
}

/// The clipped (reported) value of the measure behind `key`.
pub fn clipped_value(sample: &MeasureSample, key: MeasureKey) -> f64 {
    match key {
        MeasureKey::FLhv => sample.fidelity,
        MeasureKey::Bell => sample.bell,
        MeasureKey::S2 => sample.s2,
        MeasureKey::S3 => sample.s3,
        MeasureKey::NValue => sample.n_value,
        MeasureKey::Concurrence => sample.concurrence,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventDirection {
    /// The indicator fell through the threshold.
    Death,
    /// It climbed back above.
    Revival,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// A genuine sign change of the indicator, refined by bisection.
    Crossing,
    /// A prominent sampled minimum of a measure that never crossed; counts
    /// as a revival of a quantity that approached zero and climbed back.
    LocalMinimum,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdEvent {
    pub x: f64,
    pub direction: EventDirection,
    pub kind: EventKind,
}

/// All detected events, keyed by measure in chain order.
#[derive(Clone, Debug, Default)]
pub struct CrossingReport {
    pub events: BTreeMap<MeasureKey, Vec<ThresholdEvent>>,
}

impl CrossingReport {
    pub fn of(&self, key: MeasureKey) -> &[ThresholdEvent] {
        self.events.get(&key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn first_death(&self, key: MeasureKey) -> Option<f64> {
        self.of(key)
            .iter()
            .filter(|e| e.direction == EventDirection::Death)
            .map(|e| e.x)
            .next()
    }

    pub fn first_revival(&self, key: MeasureKey) -> Option<f64> {
        self.of(key)
            .iter()
            .filter(|e| e.direction == EventDirection::Revival)
            .map(|e| e.x)
            .next()
    }
}

fn banded_sign(v: f64) -> i8 {
    if v.abs() <= DEAD_BAND {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}

fn indicator_at(spec: &SweepSpec, key: MeasureKey, x: f64) -> Result<f64> {
    let rho = spec.state_at(x)?;
    let sample = evaluate_state(&rho, spec.steering_mode)?;
    Ok(indicator(&sample, key, &spec.thresholds))
}

fn clipped_at(spec: &SweepSpec, key: MeasureKey, x: f64) -> Result<f64> {
    let rho = spec.state_at(x)?;
    let sample = evaluate_state(&rho, spec.steering_mode)?;
    Ok(clipped_value(&sample, key))
}

/// Bisection on the raw indicator; `positive_left` is the sign at `a`.
fn bisect_crossing(
    spec: &SweepSpec,
    key: MeasureKey,
    mut a: f64,
    mut b: f64,
    positive_left: bool,
) -> Result<f64> {
    for _ in 0..200 {
        if b - a <= BISECTION_WIDTH {
            break;
        }
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let v = indicator_at(spec, key, mid)?;
        if (v > 0.0) == positive_left {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Golden-section minimization of `f` on `[a, b]` down to width `tol`.
fn golden_min(f: &dyn Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    const INV_PHI: f64 = 0.6180339887498949;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..300 {
        if b - a <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Scans the trajectory for threshold crossings of every measure and refines
/// each to sub-grid precision. Measures that never cross are additionally
/// scanned for prominent local minima, which count as revivals.
pub fn find_crossings(spec: &SweepSpec, traj: &Trajectory) -> Result<CrossingReport> {
    spec.validate()?;
    let label = spec.axis.label();
    let keys: Vec<MeasureKey> = MeasureKey::CHAIN.to_vec();
    let per_key: Result<Vec<(MeasureKey, Vec<ThresholdEvent>)>> = keys
        .into_par_iter()
        .map(|key| -> Result<(MeasureKey, Vec<ThresholdEvent>)> {
            let mut events = Vec::new();
            let values: Vec<f64> = traj
                .points
                .iter()
                .map(|p| indicator(&p.sample, key, &spec.thresholds))
                .collect();
            let mut last: Option<(i8, usize)> = None;
            for (i, &v) in values.iter().enumerate() {
                let s = banded_sign(v);
                if s == 0 {
                    continue;
                }
                if let Some((prev_sign, prev_idx)) = last {
                    if s != prev_sign {
                        let a = traj.points[prev_idx].x;
                        let b = traj.points[i].x;
                        let x = bisect_crossing(spec, key, a, b, prev_sign > 0)
                            .map_err(|e| with_grid_context(e, label, a))?;
                        events.push(ThresholdEvent {
                            x,
                            direction: if prev_sign > 0 {
                                EventDirection::Death
                            } else {
                                EventDirection::Revival
                            },
                            kind: EventKind::Crossing,
                        });
                    }
                }
                last = Some((s, i));
            }
            if events.is_empty() {
                scan_local_minima(spec, traj, key, &mut events)?;
            }
            Ok((key, events))
        })
        .collect();
    let mut report = CrossingReport::default();
    for (key, events) in per_key? {
        report.events.insert(key, events);
    }
    Ok(report)
}

fn scan_local_minima(
    spec: &SweepSpec,
    traj: &Trajectory,
    key: MeasureKey,
    events: &mut Vec<ThresholdEvent>,
) -> Result<()> {
    let v: Vec<f64> = traj
        .points
        .iter()
        .map(|p| clipped_value(&p.sample, key))
        .collect();
    let n = v.len();
    if n < 3 {
        return Ok(());
    }
    let mut prefix_max = v.clone();
    for i in 1..n {
        prefix_max[i] = prefix_max[i].max(prefix_max[i - 1]);
    }
    let mut suffix_max = v.clone();
    for i in (0..n - 1).rev() {
        suffix_max[i] = suffix_max[i].max(suffix_max[i + 1]);
    }
    for i in 1..n - 1 {
        // The strict fall from the left keeps one event per plateau.
        let sampled_min = v[i] <= v[i - 1] && v[i] <= v[i + 1] && v[i] < v[i - 1];
        if !sampled_min {
            continue;
        }
        if prefix_max[i - 1] - v[i] <= REVIVAL_PROMINENCE
            || suffix_max[i + 1] - v[i] <= REVIVAL_PROMINENCE
        {
            continue;
        }
        let f = |x: f64| clipped_at(spec, key, x);
        let x = golden_min(&f, traj.points[i - 1].x, traj.points[i + 1].x, LOCAL_MIN_TOL)?;
        events.push(ThresholdEvent {
            x,
            direction: EventDirection::Revival,
            kind: EventKind::LocalMinimum,
        });
    }
    Ok(())
}

/// Row verdict: did anything die, and did anything come back.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// At least one death and no revivals of any kind.
    Decay,
    /// Deaths and revivals (or revivals alone).
    Both,
    /// Nothing crossed and nothing revived.
    None,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Decay => "decay",
            Verdict::Both => "both",
            Verdict::None => "none",
        }
    }
}

/// Hierarchy analysis of one trajectory's events.
#[derive(Clone, Debug)]
pub struct HierarchyReport {
    /// First crossing-death per measure, chain order; `None` = never died.
    pub first_death: Vec<(MeasureKey, Option<f64>)>,
    /// First revival (either kind) per measure, chain order.
    pub first_revival: Vec<(MeasureKey, Option<f64>)>,
    /// Deaths occur in chain order: each stronger measure dies no later than
    /// every weaker one (ties allowed within `EVENT_TIE`).
    pub decay_order_ok: bool,
    /// Every revival of a stronger measure happens while all weaker measures
    /// are alive; `None` when the trajectory has no revivals to check.
    pub revival_order_ok: Option<bool>,
    /// Human-readable descriptions of any aliveness violations.
    pub violations: Vec<String>,
    pub verdict: Verdict,
}

/// Walks `events` (crossings only) to decide whether the measure is alive at
/// coordinate `q`; events within the tie window count as already happened,
/// so a simultaneous revival means alive.
fn alive_at(events: &[ThresholdEvent], initially_alive: bool, q: f64) -> bool {
    let mut alive = initially_alive;
    for e in events {
        if e.kind != EventKind::Crossing {
            continue;
        }
        if e.x >= q + EVENT_TIE {
            break;
        }
        alive = e.direction == EventDirection::Revival;
    }
    alive
}

/// Checks the death/revival ordering of the measure chain against `report`.
pub fn verify_hierarchy(
    spec: &SweepSpec,
    traj: &Trajectory,
    report: &CrossingReport,
) -> HierarchyReport {
    let label = spec.axis.label();
    let chain = MeasureKey::CHAIN;
    let first_death: Vec<(MeasureKey, Option<f64>)> =
        chain.iter().map(|&k| (k, report.first_death(k))).collect();
    let first_revival: Vec<(MeasureKey, Option<f64>)> =
        chain.iter().map(|&k| (k, report.first_revival(k))).collect();

    let mut decay_order_ok = true;
    for w in first_death.windows(2) {
        let a = w[0].1.unwrap_or(f64::INFINITY);
        let b = w[1].1.unwrap_or(f64::INFINITY);
        if a > b + EVENT_TIE {
            decay_order_ok = false;
        }
    }

    let initial = &traj.points[0].sample;
    let mut violations = Vec::new();
    let mut any_revival = false;
    for (xi, &x_key) in chain.iter().enumerate() {
        for e in report.of(x_key) {
            if e.direction != EventDirection::Revival {
                continue;
            }
            any_revival = true;
            for &y_key in &chain[xi + 1..] {
                let initially_alive =
                    indicator(initial, y_key, &spec.thresholds) > DEAD_BAND;
                if !alive_at(report.of(y_key), initially_alive, e.x) {
                    violations.push(format!(
                        "{} revives at {label} = {:.9} while {} is dead",
                        x_key.as_str(),
                        e.x,
                        y_key.as_str()
                    ));
                }
            }
        }
    }
    let revival_order_ok = if any_revival { Some(violations.is_empty()) } else { None };

    let any_death = first_death.iter().any(|(_, d)| d.is_some());
    let verdict = if any_revival {
        Verdict::Both
    } else if any_death {
        Verdict::Decay
    } else {
        Verdict::None
    };

    HierarchyReport {
        first_death,
        first_revival,
        decay_order_ok,
        revival_order_ok,
        violations,
        verdict,
    }
}

/// Locates interior extrema of the QSL column and refines each with a
/// golden-section search on the continuous QSL evaluation.
pub fn qsl_turning_points(spec: &SweepSpec, traj: &Trajectory) -> Result<Vec<f64>> {
    if spec.axis != SweepAxis::Time {
        return Err(QcorrError::InvalidArgument(
            "QSL turning points need a time axis".into(),
        ));
    }
    let tau: Option<Vec<f64>> = traj.points.iter().map(|p| p.qsl.map(|q| q.tau)).collect();
    let tau = tau.ok_or_else(|| {
        QcorrError::InvalidArgument("tau_qsl was not computed on this trajectory".into())
    })?;
    let rho0 = spec.initial.build()?;
    let family = spec.channel.as_ref().expect("validated");
    let eval = |t: f64| -> Result<f64> {
        Ok(qsl_time(family, &rho0, t, spec.sides, spec.qsl_generator)?.tau)
    };
    let mut out = Vec::new();
    let n = tau.len();
    for i in 1..n - 1 {
        let d_prev = tau[i] - tau[i - 1];
        let d_next = tau[i + 1] - tau[i];
        let a = traj.points[i - 1].x;
        let b = traj.points[i + 1].x;
        if d_prev > 0.0 && d_next < 0.0 {
            let f = |t: f64| Ok(-eval(t)?);
            out.push(golden_min(&f, a, b, QSL_TURNING_TOL)?);
        } else if d_prev < 0.0 && d_next > 0.0 {
            out.push(golden_min(&eval, a, b, QSL_TURNING_TOL)?);
        }
    }
    Ok(out)
}
