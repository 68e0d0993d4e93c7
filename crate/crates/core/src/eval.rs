use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Min,
    Max,
}

/// Relative gap to a baseline: `(cost - base) / base` when minimizing,
/// `(base - cost) / base` when maximizing. Positive means worse.
pub fn compute_gap(cost: f64, baseline: f64, sense: Sense) -> Result<f64> {
    if baseline.is_nan() || baseline <= 0.0 {
        return Err(invalid(format!("baseline {baseline} must be positive")));
    }
    Ok(match sense {
        Sense::Min => (cost - baseline) / baseline,
        Sense::Max => (baseline - cost) / baseline,
    })
}

/// One row of an evaluation table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub instance: usize,
    pub method: String,
    pub cost: f64,
    pub baseline: f64,
    pub gap: f64,
    pub time_s: f64,
}

pub fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 { 0.0 } else { sum / n as f64 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_rows() {
        let g = compute_gap(73.85, 71.77, Sense::Min).unwrap();
        assert_eq!(format!("{:.4}", g), "0.0290");
        let g = compute_gap(42.21, 44.87, Sense::Max).unwrap();
        assert_eq!(format!("{:.4}", g), "0.0593");
    }

    #[test]
    fn equal_costs_and_bad_baseline() {
        assert_eq!(compute_gap(3.5, 3.5, Sense::Min).unwrap(), 0.0);
        assert_eq!(compute_gap(3.5, 3.5, Sense::Max).unwrap(), 0.0);
        assert!(compute_gap(1.0, 0.0, Sense::Min).is_err());
        assert!(compute_gap(1.0, -2.0, Sense::Max).is_err());
    }
}
