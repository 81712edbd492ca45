//! Renders sweep results to their on-disk artifacts: `trajectory.csv`,
//! `crossings.json`, and `verdict.json`.
//!
//! Every float is written with `{:.16e}` (CSV) or as a JSON number, and rows
//! end in `\n`, so a given trajectory always serializes to identical bytes.

use std::path::Path;

use serde_json::{json, Map, Value};

use crate::dynamics::{
    find_crossings, sweep, verify_hierarchy, CrossingReport, HierarchyReport, MeasureKey,
    MeasureSelection, SweepSpec, Trajectory,
};
use crate::error::{QcorrError, Result};

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// The trajectory as CSV. The first column is the sweep coordinate (named
/// `t` or `p` by the axis); the rest follow the measure selection in the
/// fixed column order.
pub fn trajectory_csv(spec: &SweepSpec, traj: &Trajectory) -> String {
    let mut header: Vec<&str> = vec![spec.axis.label()];
    header.extend(
        MeasureSelection::COLUMN_ORDER
            .iter()
            .copied()
            .filter(|name| spec.measures.contains(name)),
    );
    let mut out = header.join(",");
    out.push('\n');
    for p in &traj.points {
        let mut fields = vec![fmt_float(p.x)];
        let s = &p.sample;
        for name in MeasureSelection::COLUMN_ORDER {
            if !spec.measures.contains(name) {
                continue;
            }
            let v = match name {
                "fidelity" => s.fidelity,
                "n_value" => s.n_value,
                "bell" => s.bell,
                "s2" => s.s2,
                "s3" => s.s3,
                "concurrence" => s.concurrence,
                "tau_qsl" => p.qsl.map(|q| q.tau).unwrap_or(f64::NAN),
                _ => unreachable!(),
            };
            fields.push(fmt_float(v));
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// All threshold events, keyed by measure.
pub fn crossings_json(spec: &SweepSpec, report: &CrossingReport) -> Value {
    let mut measures = Map::new();
    for key in MeasureKey::CHAIN {
        let events: Vec<Value> = report
            .of(key)
            .iter()
            .map(|e| {
                json!({
                    "x": e.x,
                    "direction": serde_json::to_value(e.direction).expect("plain enum"),
                    "kind": serde_json::to_value(e.kind).expect("plain enum"),
                })
            })
            .collect();
        measures.insert(
            key.as_str().to_string(),
            json!({
                "events": events,
                "first_death": report.first_death(key),
                "first_revival": report.first_revival(key),
            }),
        );
    }
    json!({
        "axis": spec.axis.label(),
        "thresholds": serde_json::to_value(spec.thresholds).expect("plain struct"),
        "measures": Value::Object(measures),
    })
}

/// The hierarchy analysis in JSON form.
pub fn verdict_json(spec: &SweepSpec, h: &HierarchyReport) -> Value {
    let to_map = |entries: &[(MeasureKey, Option<f64>)]| -> Value {
        let mut m = Map::new();
        for (k, v) in entries {
            m.insert(k.as_str().to_string(), json!(v));
        }
        Value::Object(m)
    };
    json!({
        "axis": spec.axis.label(),
        "verdict": h.verdict.as_str(),
        "decay_order_ok": h.decay_order_ok,
        "revival_order_ok": h.revival_order_ok,
        "first_death": to_map(&h.first_death),
        "first_revival": to_map(&h.first_revival),
        "violations": h.violations,
    })
}

/// Everything one sweep produces.
pub struct SweepArtifacts {
    pub trajectory: Trajectory,
    pub crossings: CrossingReport,
    pub hierarchy: HierarchyReport,
    pub trajectory_csv: String,
    pub crossings_json: Value,
    pub verdict_json: Value,
}

/// Runs the sweep, the crossing scan, and the hierarchy check, and renders
/// all three artifacts.
pub fn run_artifacts(spec: &SweepSpec) -> Result<SweepArtifacts> {
    let trajectory = sweep(spec)?;
    let crossings = find_crossings(spec, &trajectory)?;
    let hierarchy = verify_hierarchy(spec, &trajectory, &crossings);
    let trajectory_csv = trajectory_csv(spec, &trajectory);
    let crossings_json = crossings_json(spec, &crossings);
    let verdict_json = verdict_json(spec, &hierarchy);
    Ok(SweepArtifacts {
        trajectory,
        crossings,
        hierarchy,
        trajectory_csv,
        crossings_json,
        verdict_json,
    })
}

/// Writes the three artifacts into `dir`, creating it if needed.
pub fn write_artifacts(dir: &Path, artifacts: &SweepArtifacts) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("trajectory.csv"), &artifacts.trajectory_csv)?;
    write_json(&dir.join("crossings.json"), &artifacts.crossings_json)?;
    write_json(&dir.join("verdict.json"), &artifacts.verdict_json)?;
    Ok(())
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| QcorrError::Config(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{ChannelFamily, ChannelKind, ChannelParams, Regime};
    use crate::dynamics::InitialState;
    use crate::states::PureStateSpec;
    use num_complex::Complex64;

    fn small_spec() -> SweepSpec {
        let fam = ChannelFamily::new(
            ChannelKind::AmplitudeDamping,
            Regime::Markovian,
            &ChannelParams { gamma: Some(1.0), ..Default::default() },
        )
        .unwrap();
        let initial = InitialState::Pure(PureStateSpec {
            alpha: Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            beta: Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        });
        SweepSpec::time_sweep(initial, fam, 2.0, 5)
    }

    #[test]
    fn csv_shape_and_format() {
        let spec = small_spec();
        let traj = sweep(&spec).unwrap();
        let csv = trajectory_csv(&spec, &traj);
        let lines: Vec<&str> = csv.split('\n').collect();
        // 1 header + 5 rows + empty tail after the final newline.
        assert_eq!(lines.len(), 7);
        assert_eq!(lines[6], "");
        assert_eq!(
            lines[0],
            "t,fidelity,n_value,bell,s2,s3,concurrence,tau_qsl"
        );
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first.len(), 8);
        assert_eq!(first[0], "0.0000000000000000e0");
        assert_eq!(first[1], "1.0000000000000000e0");
        assert!(csv.ends_with('\n'));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn csv_respects_measure_selection() {
        let mut spec = small_spec();
        spec.measures = MeasureSelection::none();
        spec.measures.bell = true;
        spec.measures.concurrence = true;
        let traj = sweep(&spec).unwrap();
        let csv = trajectory_csv(&spec, &traj);
        assert!(csv.starts_with("t,bell,concurrence\n"));
        assert_eq!(csv.lines().nth(1).unwrap().split(',').count(), 3);
    }

    #[test]
    fn artifacts_round_trip_to_disk() {
        let spec = small_spec();
        let artifacts = run_artifacts(&spec).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_artifacts(dir.path(), &artifacts).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
        assert_eq!(csv, artifacts.trajectory_csv);
        let crossings: Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("crossings.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(crossings["axis"], "t");
        assert!(crossings["measures"]["f_lhv"]["events"].is_array());
        let verdict: Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("verdict.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(verdict["verdict"], "decay");
        assert_eq!(verdict["decay_order_ok"], true);
        assert_eq!(verdict["revival_order_ok"], Value::Null);
    }

    #[test]
    fn verdict_json_reports_death_times() {
        let spec = small_spec();
        let artifacts = run_artifacts(&spec).unwrap();
        let v = &artifacts.verdict_json;
        let f_death = v["first_death"]["f_lhv"].as_f64().unwrap();
        assert!((f_death - 0.460246091606119).abs() < 1e-6);
        assert!(v["first_death"]["concurrence"].is_null());
    }
}
