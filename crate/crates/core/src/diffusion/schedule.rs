/// Noise schedule `(alpha_t, beta_t)` over continuous time `t in [0, 1]`.
///
/// Implementations must satisfy `alpha(0) = 1`, `beta(0) = 0`, with alpha
/// non-increasing and beta non-decreasing.
pub trait Schedule: Send + Sync {
    fn alpha(&self, t: f64) -> f64;
    fn beta(&self, t: f64) -> f64;
    /// Number of discrete grid points used by the residual chain.
    fn grid(&self) -> usize;
}

/// `alpha_t = 1 - t`, `beta_t = sqrt(t)`.
///
/// With this choice the residual forward marginal coincides with the
/// decoupled one, so a single network serves both samplers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearSchedule {
    pub grid: usize,
}

impl Default for LinearSchedule {
    fn default() -> Self {
        LinearSchedule { grid: 1000 }
    }
}

impl Schedule for LinearSchedule {
    fn alpha(&self, t: f64) -> f64 {
        1.0 - t
    }

    fn beta(&self, t: f64) -> f64 {
        t.max(0.0).sqrt()
    }

    fn grid(&self) -> usize {
        self.grid
    }
}

/// Descending timestamps `1 = t_0 > t_1 > .. > t_K = 0` for a `K`-step
/// chain. On a discrete grid of size `T` the points snap to multiples of
/// `1/T` (duplicates removed), so `K > T` degrades to `T` steps.
pub fn time_points(steps: usize, grid: Option<usize>) -> Vec<f64> {
    let mut ts: Vec<f64> = (0..=steps)
        .map(|j| {
            let t = (steps - j) as f64 / steps as f64;
            match grid {
                Some(g) => ((t * g as f64).round() / g as f64).clamp(0.0, 1.0),
                None => t,
            }
        })
        .collect();
    ts.dedup();
    ts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_endpoints_and_monotonicity() {
        let s = LinearSchedule::default();
        assert_eq!(s.alpha(0.0), 1.0);
        assert_eq!(s.beta(0.0), 0.0);
        assert_eq!(s.alpha(1.0), 0.0);
        assert_eq!(s.beta(1.0), 1.0);
        let ts: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        for w in ts.windows(2) {
            assert!(s.alpha(w[1]) <= s.alpha(w[0]));
            assert!(s.beta(w[1]) >= s.beta(w[0]));
        }
    }

    #[test]
    fn time_points_cover_unit_interval() {
        assert_eq!(time_points(1, None), vec![1.0, 0.0]);
        assert_eq!(time_points(4, None), vec![1.0, 0.75, 0.5, 0.25, 0.0]);
        let snapped = time_points(3, Some(1000));
        assert_eq!(snapped, vec![1.0, 0.667, 0.333, 0.0]);
        assert_eq!(time_points(50, Some(10)).len(), 11);
    }
}
