use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::config::{Command, ExperimentConfig};

/// One measured quantity. `asserted` metrics decide the exit status.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub bound: Option<f64>,
    pub satisfied: Option<bool>,
    pub asserted: bool,
}

impl Metric {
    pub fn value(name: &str, value: f64) -> Self {
        Metric {
            name: name.to_string(),
            value,
            bound: None,
            satisfied: None,
            asserted: false,
        }
    }

    /// `value <= bound`, reported but not asserted.
    pub fn bounded(name: &str, value: f64, bound: f64) -> Self {
        Metric {
            bound: Some(bound),
            satisfied: Some(value <= bound),
            ..Metric::value(name, value)
        }
    }

    pub fn asserted(name: &str, value: f64, bound: f64) -> Self {
        Metric {
            asserted: true,
            ..Metric::bounded(name, value, bound)
        }
    }

    pub fn failed(&self) -> bool {
        self.asserted && self.satisfied == Some(false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub command: Command,
    pub config: ExperimentConfig,
    /// Channel sizes actually used for the first two receivers.
    pub n_a: usize,
    pub n_b: usize,
    pub metrics: Vec<Metric>,
    pub wall_time_ms: u64,
    pub version: String,
    pub seed: u64,
}

impl ResultRecord {
    pub fn any_failed(&self) -> bool {
        self.metrics.iter().any(Metric::failed)
    }
}

#[derive(Serialize, Deserialize)]
struct Document<'a> {
    records: std::borrow::Cow<'a, [ResultRecord]>,
}

pub fn write_json<W: Write>(records: &[ResultRecord], mut out: W) -> anyhow::Result<()> {
    let doc = Document {
        records: records.into(),
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    Ok(())
}

pub fn read_json(text: &str) -> anyhow::Result<Vec<ResultRecord>> {
    let doc: Document<'static> = serde_json::from_str(text)?;
    Ok(doc.records.into_owned())
}

pub const CSV_HEADER: [&str; 11] = [
    "command",
    "d",
    "epsilon",
    "n_A",
    "n_B",
    "trials",
    "seed",
    "metric",
    "value",
    "bound",
    "satisfied",
];

/// One row per metric.
pub fn write_csv<W: Write>(records: &[ResultRecord], out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        for m in &r.metrics {
            w.write_record([
                r.command.name().to_string(),
                r.config.d.to_string(),
                format!("{:?}", r.config.epsilon),
                r.n_a.to_string(),
                r.n_b.to_string(),
                r.config.trials.to_string(),
                r.seed.to_string(),
                m.name.clone(),
                format!("{:?}", m.value),
                m.bound.map(|b| format!("{b:?}")).unwrap_or_default(),
                m.satisfied.map(|s| s.to_string()).unwrap_or_default(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
