//! The ten-scenario summary table: the eight Bell-pair noise rows plus the
//! two non-Markovian Werner rows, each reduced to one verdict line.

use crate::config::RunConfig;
use crate::error::{QcorrError, Result};
use crate::output::{run_artifacts, SweepArtifacts};

/// One table scenario; `config_json` is the shipped config embedded at
/// compile time so the binary needs no files at run time.
pub struct TableRow {
    /// Identifier, also the shipped config's basename and the per-row output
    /// directory name.
    pub name: &'static str,
    pub state_label: &'static str,
    pub config_json: &'static str,
}

pub const TABLE_ROWS: [TableRow; 10] = [
    TableRow {
        name: "bell_ad_markov",
        state_label: "Bell phi+",
        config_json: include_str!("../configs/bell_ad_markov.json"),
    },
    TableRow {
        name: "bell_ad_nonmarkov",
        state_label: "Bell phi+",
        config_json: include_str!("../configs/bell_ad_nonmarkov.json"),
    },
    TableRow {
        name: "bell_pd_markov",
        state_label: "Bell phi+",
        config_json: include_str!("../configs/bell_pd_markov.json"),
    },
    TableRow {
        name: "bell_pd_nonmarkov",
        state_label: "Bell phi+",
        config_json: include_str!("../configs/bell_pd_nonmarkov.json"),
    },
    TableRow {
        name: "bell_dp_markov",
        state_label: "Bell phi+",
        config_json: include_str!("../configs/bell_dp_markov.json"),
    },
    TableRow {
        name: "bell_dp_nonmarkov",
        state_label: "Bell phi+",
        config_json: include_str!("../configs/bell_dp_nonmarkov.json"),
    },
    TableRow {
        name: "bell_rtn_markov",
        state_label: "Bell phi+",
        config_json: include_str!("../configs/bell_rtn_markov.json"),
    },
    TableRow {
        name: "bell_rtn_nonmarkov",
        state_label: "Bell phi+",
        config_json: include_str!("../configs/bell_rtn_nonmarkov.json"),
    },
    TableRow {
        name: "werner_ad_nonmarkov",
        state_label: "Werner(0.9)",
        config_json: include_str!("../configs/werner_ad_nonmarkov.json"),
    },
    TableRow {
        name: "werner_rtn_nonmarkov",
        state_label: "Werner(0.9)",
        config_json: include_str!("../configs/werner_rtn_nonmarkov.json"),
    },
];

/// Every shipped configuration by name, table rows and extras alike; the
/// validation suite runs the hierarchy check across all of them.
pub const SHIPPED_CONFIGS: [(&str, &str); 13] = [
    ("bell_ad_markov", include_str!("../configs/bell_ad_markov.json")),
    ("bell_ad_nonmarkov", include_str!("../configs/bell_ad_nonmarkov.json")),
    ("bell_pd_markov", include_str!("../configs/bell_pd_markov.json")),
    ("bell_pd_nonmarkov", include_str!("../configs/bell_pd_nonmarkov.json")),
    ("bell_dp_markov", include_str!("../configs/bell_dp_markov.json")),
    ("bell_dp_nonmarkov", include_str!("../configs/bell_dp_nonmarkov.json")),
    ("bell_rtn_markov", include_str!("../configs/bell_rtn_markov.json")),
    ("bell_rtn_nonmarkov", include_str!("../configs/bell_rtn_nonmarkov.json")),
    ("werner_ad_markov", include_str!("../configs/werner_ad_markov.json")),
    ("werner_ad_nonmarkov", include_str!("../configs/werner_ad_nonmarkov.json")),
    ("werner_rtn_markov", include_str!("../configs/werner_rtn_markov.json")),
    ("werner_rtn_nonmarkov", include_str!("../configs/werner_rtn_nonmarkov.json")),
    ("werner_psweep", include_str!("../configs/werner_psweep.json")),
];

/// One computed row: its verdict line plus the full artifacts behind it.
pub struct TableEntry {
    pub name: &'static str,
    pub line: String,
    pub artifacts: SweepArtifacts,
}

/// Runs one scenario end to end and formats its verdict line.
pub fn run_row(row: &TableRow) -> Result<TableEntry> {
    let with_row = |e: QcorrError| -> QcorrError {
        match e {
            QcorrError::Config(m) => QcorrError::Config(format!("{}: {m}", row.name)),
            other => other,
        }
    };
    let cfg = RunConfig::from_json(row.config_json).map_err(with_row)?;
    let spec = cfg.to_spec().map_err(with_row)?;
    let artifacts = run_artifacts(&spec)?;
    let family = spec.channel.as_ref().expect("every table row evolves in time");
    let line = format!(
        "{} x {} x {}: {}",
        row.state_label,
        family.kind().label(),
        family.regime().label(),
        artifacts.hierarchy.verdict.as_str()
    );
    Ok(TableEntry { name: row.name, line, artifacts })
}

/// Runs all ten scenarios in their fixed order.
pub fn run_table() -> Result<Vec<TableEntry>> {
    TABLE_ROWS.iter().map(run_row).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::ChannelKind;
    use crate::dynamics::{SweepAxis, Verdict};

    #[test]
    fn all_shipped_configs_parse() {
        let mut seen = std::collections::BTreeSet::new();
        for (name, json) in SHIPPED_CONFIGS {
            let cfg = RunConfig::from_json(json).expect(name);
            cfg.to_spec().expect(name);
            assert!(seen.insert(name), "duplicate config {name}");
        }
        // Each table row's config is one of the shipped set.
        for row in &TABLE_ROWS {
            assert!(
                SHIPPED_CONFIGS.iter().any(|(n, j)| *n == row.name && *j == row.config_json),
                "{} missing from SHIPPED_CONFIGS",
                row.name
            );
        }
    }

    #[test]
    fn all_rows_parse_into_time_sweeps() {
        let mut seen = std::collections::BTreeSet::new();
        for row in &TABLE_ROWS {
            let cfg = RunConfig::from_json(row.config_json).expect(row.name);
            let spec = cfg.to_spec().expect(row.name);
            assert_eq!(spec.axis, SweepAxis::Time, "{}", row.name);
            assert!(spec.channel.is_some(), "{}", row.name);
            assert!(seen.insert(row.name), "duplicate row {}", row.name);
        }
        let kinds: Vec<ChannelKind> = TABLE_ROWS
            .iter()
            .map(|r| {
                RunConfig::from_json(r.config_json)
                    .unwrap()
                    .channel
                    .unwrap()
                    .kind
            })
            .collect();
        // Every noise family appears in both regimes among the Bell rows.
        assert_eq!(
            kinds.iter().filter(|k| **k == ChannelKind::AmplitudeDamping).count(),
            3
        );
        assert_eq!(
            kinds.iter().filter(|k| **k == ChannelKind::RandomTelegraph).count(),
            3
        );
    }

    #[test]
    fn first_row_line_is_stable() {
        let entry = run_row(&TABLE_ROWS[0]).unwrap();
        assert_eq!(entry.line, "Bell phi+ x AD x Markovian: decay");
        assert_eq!(entry.artifacts.hierarchy.verdict, Verdict::Decay);
        assert!(entry.artifacts.hierarchy.decay_order_ok);
    }
}
