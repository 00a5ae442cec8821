//! TOML scenario files and snapshot CSV output.
//!
//! ```toml
//! [pool]
//! x = 1000.0
//! y = 250.0
//! fee_rate = 0.003                  # optional, default 0
//! fee_model = "collect_separately"  # or "auto_compound" (default)
//! provider = "genesis"              # optional, default "genesis"
//!
//! [prices]
//! px = 1.0
//! py = 4.0
//!
//! [[events]]
//! t = 0.1
//! kind = "trade"
//! direction = "y2x"                 # or "x2y"
//! amount = 10.0
//! spread = 0.05                     # optional
//!
//! [[events]]
//! t = 0.5
//! kind = "price_move"
//! delta_x = 1.0
//! delta_y = 1.5
//!
//! [[events]]
//! t = 0.5
//! kind = "collect_fees"
//! provider = "genesis"
//!
//! [[events]]
//! t = 1.0
//! kind = "snapshot"
//! label = "year_one"
//! ```

use std::io::Write;
use std::path::Path;

use cpamm_core::scenario::{Event, PoolSetup, PortfolioSnapshot, ScenarioScript, TimedEvent};
use cpamm_core::{Direction, FeeModel, ProviderId, Scalar, Spread};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioFileError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("invalid scenario file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("event {index}: {reason}")]
    Invalid { index: usize, reason: &'static str },
    #[error("value {0} cannot be represented exactly")]
    NotRepresentable(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeeModelName {
    AutoCompound,
    CollectSeparately,
}

impl From<FeeModelName> for FeeModel {
    fn from(name: FeeModelName) -> Self {
        match name {
            FeeModelName::AutoCompound => FeeModel::AutoCompound,
            FeeModelName::CollectSeparately => FeeModel::CollectSeparately,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum DirectionName {
    #[serde(rename = "y2x")]
    YforX,
    #[serde(rename = "x2y")]
    XforY,
}

impl From<DirectionName> for Direction {
    fn from(name: DirectionName) -> Self {
        match name {
            DirectionName::YforX => Direction::YforX,
            DirectionName::XforY => Direction::XforY,
        }
    }
}

fn default_provider() -> String {
    "genesis".into()
}

fn default_fee_model() -> FeeModelName {
    FeeModelName::AutoCompound
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolSection {
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub fee_rate: f64,
    #[serde(default = "default_fee_model")]
    pub fee_model: FeeModelName,
    #[serde(default = "default_provider")]
    pub provider: String,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PricesSection {
    pub px: f64,
    pub py: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventEntry {
    Trade {
        direction: DirectionName,
        amount: f64,
        spread: Option<f64>,
    },
    PriceMove {
        delta_x: f64,
        delta_y: f64,
    },
    CollectFees {
        provider: String,
    },
    Snapshot {
        label: String,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct TimedEntry {
    pub t: f64,
    #[serde(flatten)]
    pub event: EventEntry,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub pool: PoolSection,
    pub prices: PricesSection,
    #[serde(default)]
    pub events: Vec<TimedEntry>,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, ScenarioFileError> {
        let file: ScenarioFile = toml::from_str(text)?;
        file.check_times()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioFileError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioFileError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    fn check_times(&self) -> Result<(), ScenarioFileError> {
        let mut last = 0.0;
        for (index, entry) in self.events.iter().enumerate() {
            if !(entry.t.is_finite() && entry.t >= 0.0) {
                return Err(ScenarioFileError::Invalid {
                    index,
                    reason: "time must be finite and non-negative",
                });
            }
            if entry.t < last {
                return Err(ScenarioFileError::Invalid {
                    index,
                    reason: "event times must be non-decreasing",
                });
            }
            last = entry.t;
        }
        Ok(())
    }

    /// Builds a script over any scalar backend. Floats convert exactly into
    /// the rational backend.
    pub fn to_script<N: Scalar>(&self) -> Result<ScenarioScript<N>, ScenarioFileError> {
        let num = |v: f64| N::from_f64(v).ok_or(ScenarioFileError::NotRepresentable(v));
        let pool = PoolSetup {
            x0: num(self.pool.x)?,
            y0: num(self.pool.y)?,
            fee_rate: num(self.pool.fee_rate)?,
            fee_model: self.pool.fee_model.into(),
            provider: ProviderId::new(self.pool.provider.clone()),
        };
        let mut events = Vec::with_capacity(self.events.len());
        for entry in &self.events {
            let event = match &entry.event {
                EventEntry::Trade {
                    direction,
                    amount,
                    spread,
                } => Event::Trade {
                    direction: (*direction).into(),
                    amount: num(*amount)?,
                    spread: match spread {
                        Some(s) => Spread::Max(num(*s)?),
                        None => Spread::Unbounded,
                    },
                },
                EventEntry::PriceMove { delta_x, delta_y } => Event::PriceMove {
                    delta_x: num(*delta_x)?,
                    delta_y: num(*delta_y)?,
                },
                EventEntry::CollectFees { provider } => Event::CollectFees {
                    provider: ProviderId::new(provider.clone()),
                },
                EventEntry::Snapshot { label } => Event::Snapshot { label: label.clone() },
            };
            events.push(TimedEvent { t: entry.t, event });
        }
        Ok(ScenarioScript {
            pool,
            price_x0: num(self.prices.px)?,
            price_y0: num(self.prices.py)?,
            events,
        })
    }
}

pub const SNAPSHOT_COLUMNS: [&str; 16] = [
    "label",
    "t",
    "reserve_x",
    "reserve_y",
    "liquidity",
    "side_fees_x",
    "side_fees_y",
    "fees_generated_x",
    "fees_generated_y",
    "fees_collected_x",
    "fees_collected_y",
    "price_x",
    "price_y",
    "value_pooled",
    "value_held",
    "lambda_realized",
];

/// One row per snapshot, columns as in [`SNAPSHOT_COLUMNS`].
pub fn write_snapshots<N: Scalar, W: Write>(snapshots: &[PortfolioSnapshot<N>], out: W) -> Result<(), csv::Error> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(SNAPSHOT_COLUMNS)?;
    for s in snapshots {
        let mut row = vec![s.label.clone(), s.t.to_string()];
        row.extend(
            [
                &s.reserve_x,
                &s.reserve_y,
                &s.liquidity,
                &s.side_ledger.fees_x,
                &s.side_ledger.fees_y,
                &s.fees_generated.fees_x,
                &s.fees_generated.fees_y,
                &s.fees_collected.fees_x,
                &s.fees_collected.fees_y,
                &s.price_x,
                &s.price_y,
                &s.value_pooled,
                &s.value_held,
                &s.lambda_realized,
            ]
            .into_iter()
            .map(|v| v.to_f64().to_string()),
        );
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[pool]
x = 1000.0
y = 250.0
fee_rate = 0.003
fee_model = "collect_separately"

[prices]
px = 1.0
py = 4.0

[[events]]
t = 0.1
kind = "trade"
direction = "y2x"
amount = 10.0
spread = 0.05

[[events]]
t = 0.5
kind = "price_move"
delta_x = 1.0
delta_y = 1.5

[[events]]
t = 0.5
kind = "collect_fees"
provider = "genesis"

[[events]]
t = 1.0
kind = "snapshot"
label = "year_one"
"#;

    #[test]
    fn parses_every_event_kind() {
        let file = ScenarioFile::parse(SAMPLE).unwrap();
        assert_eq!(file.pool.provider, "genesis");
        assert_eq!(file.events.len(), 4);
        let script = file.to_script::<f64>().unwrap();
        assert_eq!(script.pool.fee_model, FeeModel::CollectSeparately);
        assert_eq!(
            script.events[0].event,
            Event::Trade {
                direction: Direction::YforX,
                amount: 10.0,
                spread: Spread::Max(0.05)
            }
        );
        assert_eq!(
            script.events[3].event,
            Event::Snapshot {
                label: "year_one".into()
            }
        );
    }

    #[test]
    fn rejects_unknown_kinds_and_fields() {
        let bad_kind = SAMPLE.replace("\"price_move\"", "\"teleport\"");
        assert!(matches!(
            ScenarioFile::parse(&bad_kind),
            Err(ScenarioFileError::Parse(_))
        ));
        let bad_field = SAMPLE.replace("px = 1.0", "px = 1.0\npz = 2.0");
        assert!(matches!(
            ScenarioFile::parse(&bad_field),
            Err(ScenarioFileError::Parse(_))
        ));
    }

    #[test]
    fn rejects_time_travel() {
        let text = SAMPLE.replace("t = 1.0", "t = 0.2");
        assert!(matches!(
            ScenarioFile::parse(&text),
            Err(ScenarioFileError::Invalid { index: 3, .. })
        ));
    }
}
