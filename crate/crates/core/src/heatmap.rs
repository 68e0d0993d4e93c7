use crate::error::{invalid, Result};

/// Per-variable scores in `[0, 1]`; the interface between sampling,
/// decoding and subgraph merging.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap(Vec<f64>);

impl Heatmap {
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        if let Some(bad) = scores.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            return Err(invalid(format!("heatmap score {bad} outside [0, 1]")));
        }
        Ok(Heatmap(scores))
    }

    /// `h = clamp(0.5 (x + 1), 0, 1)`; non-finite entries map to 0.
    pub fn from_signed(x: &[f64]) -> Self {
        Heatmap(
            x.iter()
                .map(|v| {
                    let h = 0.5 * (v + 1.0);
                    if h.is_nan() { 0.0 } else { h.clamp(0.0, 1.0) }
                })
                .collect(),
        )
    }

    pub fn scores(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}
