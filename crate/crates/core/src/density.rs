//! Recursive per-class statistics, Cauchy data density and typicality.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::feature_space::{sq_dist, sq_norm};
use crate::learner::DataCloud;

/// Variances and kernel scales at or below this are treated as zero.
pub const DEGENERATE_EPS: f64 = 1e-12;

/// Running mean and mean squared norm of a sample stream.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GlobalStats {
    /// Running mean μ. Empty until the first sample arrives.
    pub mean: Vec<f64>,
    /// Running mean of ‖x‖² (Σ).
    pub mean_sq_norm: f64,
    pub count: u64,
}

impl GlobalStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Folds one sample into the running statistics.
    pub fn update(&mut self, x: &[f64]) -> Result<()> {
        if self.count == 0 {
            if x.is_empty() {
                return Err(Error::Dimension("empty sample".into()));
            }
            self.mean = x.to_vec();
            self.mean_sq_norm = sq_norm(x);
            self.count = 1;
            return Ok(());
        }
        check_dim(self.dim(), x.len(), "statistics update")?;
        self.count += 1;
        let i = self.count as f64;
        let keep = (i - 1.0) / i;
        let add = 1.0 / i;
        for (m, &v) in self.mean.iter_mut().zip(x) {
            *m = keep * *m + add * v;
        }
        self.mean_sq_norm = keep * self.mean_sq_norm + add * sq_norm(x);
        Ok(())
    }

    /// `Σ − ‖μ‖²`, clamped at zero.
    pub fn variance(&self) -> f64 {
        (self.mean_sq_norm - sq_norm(&self.mean)).max(0.0)
    }

    /// Cauchy density `1 / (1 + ‖x − μ‖² / σ²)`.
    ///
    /// When σ² is degenerate the density is 1 at the mean and 0 elsewhere.
    pub fn density(&self, x: &[f64]) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::State("density of empty statistics".into()));
        }
        check_dim(self.dim(), x.len(), "density")?;
        Ok(self.density_unchecked(x))
    }

    pub(crate) fn density_unchecked(&self, x: &[f64]) -> f64 {
        let dist = sq_dist(x, &self.mean);
        let var = self.variance();
        if var <= DEGENERATE_EPS {
            if dist <= DEGENERATE_EPS {
                1.0
            } else {
                0.0
            }
        } else {
            1.0 / (1.0 + dist / var)
        }
    }
}

/// Support-weighted mixture of per-cloud Cauchy kernels, normalized over `grid`.
///
/// Each cloud contributes `support · 1/(1 + ‖g − p‖² / r²)` at grid point `g`,
/// with `r²` floored at [`DEGENERATE_EPS`]. The returned weights are
/// nonnegative and sum to one.
pub fn typicality<G: AsRef<[f64]>>(clouds: &[DataCloud], grid: &[G]) -> Result<Vec<f64>> {
    if clouds.is_empty() {
        return Err(Error::State(
            "typicality needs at least one data cloud".into(),
        ));
    }
    if grid.is_empty() {
        return Err(Error::State("typicality needs a nonempty grid".into()));
    }
    let dim = clouds[0].prototype.len();
    for c in clouds {
        check_dim(dim, c.prototype.len(), "typicality cloud")?;
    }
    let mut raw = Vec::with_capacity(grid.len());
    for g in grid {
        let g = g.as_ref();
        check_dim(dim, g.len(), "typicality grid point")?;
        let mass: f64 = clouds
            .iter()
            .map(|c| {
                let scale = c.radius_sq.max(DEGENERATE_EPS);
                c.support as f64 / (1.0 + sq_dist(g, &c.prototype) / scale)
            })
            .sum();
        raw.push(mass);
    }
    let total: f64 = raw.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::DegenerateInput(format!(
            "typicality mass over the grid is {total}"
        )));
    }
    Ok(raw.into_iter().map(|m| m / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud(p: Vec<f64>, support: u64, radius_sq: f64) -> DataCloud {
        DataCloud {
            prototype: p,
            support,
            radius_sq,
            source_ref: String::new(),
            class_id: 0,
        }
    }

    #[test]
    fn first_sample_seeds_stats() {
        let mut s = GlobalStats::new();
        s.update(&[0.2, 0.8]).unwrap();
        assert_eq!(s.count, 1);
        assert_eq!(s.mean, vec![0.2, 0.8]);
        assert_eq!(s.mean_sq_norm, 0.2 * 0.2 + 0.8 * 0.8);
    }

    #[test]
    fn two_sample_mean() {
        let mut s = GlobalStats::new();
        s.update(&[1.0, 0.0]).unwrap();
        s.update(&[0.0, 3.0]).unwrap();
        assert_eq!(s.mean, vec![0.5, 1.5]);
        assert_eq!(s.mean_sq_norm, 5.0);
        assert!(matches!(s.update(&[1.0]), Err(Error::Dimension(_))));
    }

    #[test]
    fn density_at_mean_is_one() {
        let mut s = GlobalStats::new();
        for x in [[0.0], [2.0]] {
            s.update(&x).unwrap();
        }
        // μ = 1, Σ = 2, σ² = 1
        assert_eq!(s.variance(), 1.0);
        assert_eq!(s.density(&[1.0]).unwrap(), 1.0);
        assert_eq!(s.density(&[2.0]).unwrap(), 0.5);
        assert!(s.density(&[3.0]).unwrap() < s.density(&[2.0]).unwrap());
    }

    #[test]
    fn density_of_empty_stats_is_state_error() {
        assert!(matches!(
            GlobalStats::new().density(&[0.0]),
            Err(Error::State(_))
        ));
    }

    #[test]
    fn degenerate_variance_convention() {
        let mut s = GlobalStats::new();
        s.update(&[0.3, 0.3]).unwrap();
        assert_eq!(s.density(&[0.3, 0.3]).unwrap(), 1.0);
        assert_eq!(s.density(&[0.3, 0.4]).unwrap(), 0.0);
    }

    #[test]
    fn single_cloud_typicality_is_proportional_to_kernel() {
        let c = cloud(vec![0.0], 4, 1.0);
        let grid = [[0.0], [1.0], [3.0]];
        let w = typicality(&[c], &grid).unwrap();
        let k = [1.0, 0.5, 0.1];
        let total: f64 = k.iter().sum();
        for (wi, ki) in w.iter().zip(k) {
            assert!((wi - ki / total).abs() < 1e-15);
        }
    }

    #[test]
    fn mirrored_clouds_give_symmetric_profile() {
        let clouds = [cloud(vec![0.25], 3, 0.02), cloud(vec![0.75], 3, 0.02)];
        let grid: Vec<[f64; 1]> = (0..=20).map(|k| [k as f64 / 20.0]).collect();
        let w = typicality(&clouds, &grid).unwrap();
        for k in 0..=20 {
            assert!((w[k] - w[20 - k]).abs() < 1e-15);
        }
    }

    #[test]
    fn typicality_rejects_empty_inputs() {
        let grid: [[f64; 1]; 0] = [];
        assert!(matches!(
            typicality(&[cloud(vec![0.0], 1, 1.0)], &grid),
            Err(Error::State(_))
        ));
        assert!(matches!(typicality(&[], &[[0.0]]), Err(Error::State(_))));
    }
}
