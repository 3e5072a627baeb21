//! Environment scripts: values for the external attribute channels, step by step.

use std::collections::BTreeMap;

use serde_json::Value as Json;

use crate::compile::{ChannelRole, ProcessGraph};
use crate::decimal::Decimal;
use crate::model::DomainModel;

use super::SimError;

/// Points are `(step, value)` in increasing step order. A finite series holds
/// each value until the next point and runs out after its last point's step;
/// a cyclic one repeats every `period` steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Series {
    Finite(Vec<(u64, Decimal)>),
    Cyclic { period: u64, points: Vec<(u64, Decimal)> },
}

fn latest(points: &[(u64, Decimal)], s: u64) -> Option<&Decimal> {
    points.iter().take_while(|(t, _)| *t <= s).last().map(|(_, v)| v)
}

impl Series {
    pub fn points(&self) -> &[(u64, Decimal)] {
        match self {
            Series::Finite(p) | Series::Cyclic { points: p, .. } => p,
        }
    }

    /// The value in force at step `s`, or `None` once a finite series is
    /// exhausted (or before its first point).
    pub fn value_at(&self, s: u64) -> Option<&Decimal> {
        match self {
            Series::Finite(points) => {
                let last = points.last()?.0;
                if s > last {
                    None
                } else {
                    latest(points, s)
                }
            }
            Series::Cyclic { period, points } => latest(points, s % period.max(&1)),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EnvironmentScript {
    pub channels: BTreeMap<String, Series>,
}

impl EnvironmentScript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, channel: &str, series: Series) -> Self {
        self.channels.insert(channel.into(), series);
        self
    }

    /// Holds one value on `channel` for every step.
    pub fn constant(self, channel: &str, v: Decimal) -> Self {
        self.with(channel, Series::Cyclic { period: 1, points: vec![(0, v)] })
    }

    /// Reads the JSON form: channel → `[[step, "value unit"], …]` or
    /// `{"cycle": P, "points": [[step, "value unit"], …]}`. Values are
    /// converted to the channel kind's unit.
    pub fn from_json(text: &str, model: &DomainModel, graph: &ProcessGraph) -> Result<Self, SimError> {
        let json: Json = serde_json::from_str(text).map_err(|e| SimError::Script(e.to_string()))?;
        let Json::Object(map) = json else {
            return Err(SimError::Script("a script is a JSON object keyed by channel".into()));
        };
        let (reg, _) = crate::analysis::model_registry(model);
        let mut script = EnvironmentScript::new();
        for (channel, spec) in map {
            let info = graph
                .channel(&channel)
                .filter(|c| c.role == ChannelRole::External)
                .ok_or_else(|| SimError::Script(format!("`{channel}` is not an external channel of the graph")))?;
            let kind = reg
                .get(&info.message[0])
                .ok_or_else(|| SimError::Script(format!("unknown kind `{}` on `{channel}`", info.message[0])))?;
            let (cycle, raw) = match &spec {
                Json::Array(items) => (None, items.as_slice()),
                Json::Object(o) => {
                    let period = o.get("cycle").and_then(Json::as_u64).filter(|p| *p > 0);
                    let points = o.get("points").and_then(Json::as_array);
                    match (period, points) {
                        (Some(p), Some(points)) => (Some(p), points.as_slice()),
                        _ => return Err(SimError::Script(format!("`{channel}`: a cyclic series needs a positive `cycle` and `points`"))),
                    }
                }
                _ => return Err(SimError::Script(format!("`{channel}`: expected a list of [step, value] points"))),
            };
            let mut points = Vec::new();
            for item in raw {
                let pair = item.as_array().filter(|a| a.len() == 2);
                let step = pair.and_then(|a| a[0].as_u64());
                let value = pair.and_then(|a| match &a[1] {
                    Json::String(s) => Some(s.clone()),
                    Json::Number(n) => Some(n.to_string()),
                    _ => None,
                });
                let (Some(step), Some(value)) = (step, value) else {
                    return Err(SimError::Script(format!("`{channel}`: bad point {item}")));
                };
                let v = reg.parse_value(kind, &value).map_err(|e| SimError::Script(format!("`{channel}`: {e}")))?;
                if points.last().is_some_and(|(t, _)| *t >= step) {
                    return Err(SimError::Script(format!("`{channel}`: steps must increase")));
                }
                points.push((step, v));
            }
            let series = match cycle {
                Some(period) => Series::Cyclic { period, points },
                None => Series::Finite(points),
            };
            script.channels.insert(channel, series);
        }
        Ok(script)
    }
}
