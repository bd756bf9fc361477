//! Log-log least squares for scaling exponents.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::chain::contact::{contact_probabilities, ContactMode, DEFAULT_SAMPLES};
use crate::chain::matrix::expected_matrix;
use crate::chain::spectral::relaxation_time;
use crate::error::{Error, Result};
use crate::gossip::{estimate_ave_time, GossipConfig};
use crate::mobility::MobilityAssignment;

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingFit {
    /// `(log x, log T)` pairs.
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square residual in log space.
    pub residual: f64,
    /// 95% confidence interval on the slope.
    pub ci: (f64, f64),
}

impl ScalingFit {
    pub fn report(&self) -> String {
        format!(
            "slope={:.6}\nintercept={:.6}\nresidual={:.3e}\nslope_ci_low={:.6}\nslope_ci_high={:.6}\npoints={}\n",
            self.slope,
            self.intercept,
            self.residual,
            self.ci.0,
            self.ci.1,
            self.points.len()
        )
    }
}

/// Least-squares line through `(ln x, ln y)`.
pub fn fit_log_log(xs: &[f64], ys: &[f64]) -> Result<ScalingFit> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidSpec("sizes and values differ in length".into()));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidSpec("log-log fit needs positive finite values".into()));
    }
    let points: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    let mut distinct: Vec<f64> = points.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if distinct.len() < 3 {
        return Err(Error::InvalidSpec("a scaling fit needs at least 3 distinct sizes".into()));
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let dof = k - 2.0;
    let se = (sse / dof / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| Error::InvalidSpec(e.to_string()))?
        .inverse_cdf(0.975);
    Ok(ScalingFit {
        points,
        slope,
        intercept,
        residual: (sse / k).sqrt(),
        ci: (slope - t * se, slope + t * se),
    })
}

/// Quantity measured per instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Quantity {
    /// Relaxation time of the expected matrix; exact on lattices, Monte
    /// Carlo with the default sample count elsewhere.
    TRelax,
    /// Empirical averaging time with a linear-field start.
    TAveEstimate { epsilon: f64, trials: usize, max_ticks: usize, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct ScalingInstance {
    /// Abscissa of the fit, usually the agent count.
    pub size: f64,
    pub assignment: MobilityAssignment,
}

pub fn measure(assignment: &MobilityAssignment, quantity: Quantity) -> Result<f64> {
    match quantity {
        Quantity::TRelax => {
            let mode = if assignment.topology().is_discrete() {
                ContactMode::Exact
            } else {
                ContactMode::MonteCarlo { samples: DEFAULT_SAMPLES }
            };
            relaxation_time(&expected_matrix(&contact_probabilities(assignment, mode, 1)?)?)
        }
        Quantity::TAveEstimate { epsilon, trials, max_ticks, seed } => {
            let mut c = GossipConfig::new(assignment.clone(), max_ticks);
            c.epsilon = epsilon;
            c.trials = trials;
            c.seed = seed;
            let est = estimate_ave_time(&c)?;
            if est.saturated {
                log::warn!("averaging time saturated at {max_ticks} ticks");
            }
            Ok(est.ticks as f64)
        }
    }
}

/// Slope of `log T` against `log size`.
pub fn fit_scaling(instances: &[ScalingInstance], quantity: Quantity) -> Result<ScalingFit> {
    let xs: Vec<f64> = instances.iter().map(|i| i.size).collect();
    let ys = instances
        .iter()
        .map(|i| measure(&i.assignment, quantity))
        .collect::<Result<Vec<_>>>()?;
    fit_log_log(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_power_law() {
        let xs = [4.0, 9.0, 16.0, 25.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(1.5)).collect();
        let f = fit_log_log(&xs, &ys).unwrap();
        assert_abs_diff_eq!(f.slope, 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(f.intercept, 3.0f64.ln(), epsilon = 1e-12);
        assert!(f.residual < 1e-12);
        assert!((f.ci.1 - f.ci.0).abs() < 1e-9);
    }

    #[test]
    fn confidence_interval_matches_t_quantile() {
        // residuals +-d at the ends, 0 in the middle
        let xs = [1.0f64, std::f64::consts::E, std::f64::consts::E.powi(2)];
        let ys = [1.0f64, std::f64::consts::E.powf(1.0 + 0.1), std::f64::consts::E.powi(2)];
        let f = fit_log_log(&xs, &ys).unwrap();
        // slope 1, residuals (-1/30, 1/15, -1/30), sse = 1/150, sxx = 2
        let se = (1.0f64 / 150.0 / 2.0).sqrt();
        assert_abs_diff_eq!(f.slope, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.ci.1 - f.slope, 12.706204736 * se, epsilon = 1e-6);
    }

    #[test]
    fn degenerate_sweeps_are_rejected() {
        assert!(matches!(fit_log_log(&[1.0, 2.0], &[1.0, 2.0]), Err(Error::InvalidSpec(_))));
        assert!(matches!(fit_log_log(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]), Err(Error::InvalidSpec(_))));
        assert!(fit_log_log(&[1.0, 2.0, 3.0], &[1.0, 0.0, 3.0]).is_err());
    }
}
