//! ML scaling laws: training compute, single-variable power laws in compute,
//! and the joint data/parameter loss law with its compute-optimal split.

use nalgebra::{DMatrix, DVector, SMatrix, SVector};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScalingError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("power-law fit needs at least two distinct compute values")]
    RankDeficient,
    #[error("joint fit needs >= 5 samples with >= 2 distinct D and >= 2 distinct P values")]
    InsufficientSpread,
    #[error("fit parameters are not valid for allocation: {0}")]
    InvalidFit(&'static str),
    #[error(
        "beta {beta} and gamma {gamma} differ by more than {tolerance} relative; use optimal_allocation numerically"
    )]
    ExponentMismatch { beta: f64, gamma: f64, tolerance: f64 },
}

fn positive(name: &'static str, value: f64) -> Result<f64, ScalingError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(ScalingError::NonPositive { name, value })
    }
}

/// Training compute in FLOPs from dataset size, parameter count and pass factor.
pub fn training_compute(d: f64, p: f64, t: f64) -> Result<f64, ScalingError> {
    Ok(positive("D", d)? * positive("P", p)? * positive("T", t)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComputeSpec {
    pub d: f64,
    pub p: f64,
    pub t: f64,
    pub c: f64,
}

impl ComputeSpec {
    pub fn new(d: f64, p: f64, t: f64) -> Result<Self, ScalingError> {
        Ok(Self {
            d,
            p,
            t,
            c: training_compute(d, p, t)?,
        })
    }

    /// Share `phi` of a year's compute stock `k_flops` (FLOP/sec) in FLOPs.
    pub fn from_stock_share(phi: f64, seconds_per_year: f64, k_flops: f64) -> f64 {
        phi * seconds_per_year * k_flops
    }
}

/// `Y = prefactor * C^alpha_prime`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub alpha_prime: f64,
    pub prefactor: f64,
    /// Euclidean norm of the log-space residuals.
    pub residual_norm: f64,
    pub n: usize,
}

impl ScalingFit {
    pub fn predict(&self, c: f64) -> f64 {
        self.prefactor * c.powf(self.alpha_prime)
    }
}

/// Least squares on `ln Y = ln a + alpha' ln C`.
pub fn fit_power_law(samples: &[(f64, f64)]) -> Result<ScalingFit, ScalingError> {
    let mut xs = Vec::with_capacity(samples.len());
    let mut ys = Vec::with_capacity(samples.len());
    for &(c, y) in samples {
        xs.push(positive("C", c)?.ln());
        ys.push(positive("Y", y)?.ln());
    }
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return Err(ScalingError::RankDeficient);
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(ScalingError::RankDeficient);
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_norm = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(ScalingFit {
        alpha_prime: slope,
        prefactor: intercept.exp(),
        residual_norm,
        n: xs.len(),
    })
}

/// `L = l_min + b / D^beta + g / P^gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointLossFit {
    pub l_min: f64,
    pub b: f64,
    pub beta: f64,
    pub g: f64,
    pub gamma: f64,
    pub residual_norm: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl JointLossFit {
    pub fn loss(&self, d: f64, p: f64) -> f64 {
        self.l_min + self.excess_loss(d, p)
    }

    pub fn excess_loss(&self, d: f64, p: f64) -> f64 {
        self.b * d.powf(-self.beta) + self.g * p.powf(-self.gamma)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointFitOptions {
    /// Candidate exponents for the start grid; used for both beta and gamma.
    pub exponent_grid: Vec<f64>,
    /// Number of best grid points refined locally.
    pub refine_starts: usize,
    pub max_iterations: usize,
}

impl Default for JointFitOptions {
    fn default() -> Self {
        let n = 40;
        let (lo, hi) = (0.02f64.ln(), 2.0f64.ln());
        Self {
            exponent_grid: (0..n)
                .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
                .collect(),
            refine_starts: 6,
            max_iterations: 500,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    ln_d: f64,
    ln_p: f64,
    loss: f64,
}

/// Nonnegative least squares for (l_min, b, g) at fixed exponents, by
/// enumerating active sets. Returns coefficients and the residual sum of squares.
fn linear_coefficients(samples: &[Sample], beta: f64, gamma: f64) -> ([f64; 3], f64) {
    let cols: [Vec<f64>; 3] = [
        vec![1.0; samples.len()],
        samples.iter().map(|s| (-beta * s.ln_d).exp()).collect(),
        samples.iter().map(|s| (-gamma * s.ln_p).exp()).collect(),
    ];
    let target = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.loss));
    let mut best = ([0.0; 3], target.norm_squared());
    for mask in 1u8..8 {
        let active: Vec<usize> = (0..3).filter(|k| mask & (1 << k) != 0).collect();
        let a = DMatrix::from_fn(samples.len(), active.len(), |i, j| cols[active[j]][i]);
        let Ok(x) = a.clone().svd(true, true).solve(&target, 1e-14) else {
            continue;
        };
        if x.iter().any(|v| *v < 0.0 || !v.is_finite()) {
            continue;
        }
        let rss = (&a * &x - &target).norm_squared();
        if rss < best.1 {
            let mut coef = [0.0; 3];
            for (j, &k) in active.iter().enumerate() {
                coef[k] = x[j];
            }
            best = (coef, rss);
        }
    }
    best
}

fn rss(samples: &[Sample], theta: &[f64; 5]) -> f64 {
    samples.iter().map(|s| residual(s, theta).powi(2)).sum()
}

fn residual(s: &Sample, [l_min, b, beta, g, gamma]: &[f64; 5]) -> f64 {
    l_min + b * (-beta * s.ln_d).exp() + g * (-gamma * s.ln_p).exp() - s.loss
}

fn feasible(theta: &[f64; 5]) -> bool {
    theta.iter().all(|v| v.is_finite() && *v >= 0.0)
}

/// Damped Gauss-Newton refinement of all five parameters.
fn levenberg_marquardt(samples: &[Sample], start: [f64; 5], max_iter: usize) -> ([f64; 5], f64, bool, usize) {
    let mut theta = start;
    let mut cost = rss(samples, &theta);
    let mut lambda = 1e-3;
    for iter in 0..max_iter {
        if cost <= 1e-30 {
            return (theta, cost, true, iter);
        }
        let mut jtj = SMatrix::<f64, 5, 5>::zeros();
        let mut jtr = SVector::<f64, 5>::zeros();
        let [_, b, beta, g, gamma] = theta;
        for s in samples {
            let ed = (-beta * s.ln_d).exp();
            let ep = (-gamma * s.ln_p).exp();
            let row = SVector::<f64, 5>::from([1.0, ed, -b * s.ln_d * ed, ep, -g * s.ln_p * ep]);
            jtj += row * row.transpose();
            jtr += row * residual(s, &theta);
        }
        let scale = jtj.diagonal().max().max(1e-300);
        let mut improved = false;
        while lambda < 1e16 {
            let mut damped = jtj;
            for k in 0..5 {
                damped[(k, k)] += lambda * (jtj[(k, k)] + 1e-12 * scale);
            }
            let Some(step) = damped.cholesky().map(|c| c.solve(&(-jtr))) else {
                lambda *= 10.0;
                continue;
            };
            let mut next = theta;
            for k in 0..5 {
                next[k] += step[k];
            }
            let next_cost = if feasible(&next) {
                rss(samples, &next)
            } else {
                f64::INFINITY
            };
            if next_cost < cost {
                let rel_drop = (cost - next_cost) / cost;
                let step_small = step
                    .iter()
                    .zip(theta.iter())
                    .all(|(s, t)| s.abs() <= 1e-13 * (t.abs() + 1e-13));
                theta = next;
                cost = next_cost;
                lambda = (lambda / 3.0).max(1e-15);
                improved = true;
                if rel_drop < 1e-15 || step_small {
                    return (theta, cost, true, iter + 1);
                }
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            // no downhill step at any damping: stationary point
            return (theta, cost, true, iter + 1);
        }
    }
    (theta, cost, false, max_iter)
}

/// Fits the joint loss law: grid over exponents with a nonnegative linear
/// solve for the remaining coefficients, then local refinement of the best
/// starts. Ties between starts are broken by start index.
pub fn fit_joint_loss(samples: &[(f64, f64, f64)], opts: &JointFitOptions) -> Result<JointLossFit, ScalingError> {
    let mut prepared = Vec::with_capacity(samples.len());
    for &(d, p, l) in samples {
        prepared.push(Sample {
            ln_d: positive("D", d)?.ln(),
            ln_p: positive("P", p)?.ln(),
            loss: positive("L", l)?,
        });
    }
    let distinct = |f: fn(&Sample) -> f64| {
        let mut v: Vec<f64> = prepared.iter().map(f).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v.len()
    };
    if prepared.len() < 5 || distinct(|s| s.ln_d) < 2 || distinct(|s| s.ln_p) < 2 {
        return Err(ScalingError::InsufficientSpread);
    }

    let mut starts: Vec<(f64, usize, [f64; 5])> = Vec::new();
    for (bi, &beta) in opts.exponent_grid.iter().enumerate() {
        for (gi, &gamma) in opts.exponent_grid.iter().enumerate() {
            let ([l_min, b, g], cost) = linear_coefficients(&prepared, beta, gamma);
            starts.push((cost, bi * opts.exponent_grid.len() + gi, [l_min, b, beta, g, gamma]));
        }
    }
    starts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    starts.truncate(opts.refine_starts.max(1));

    let mut best: Option<(f64, usize, [f64; 5], bool, usize)> = None;
    for (grid_cost, idx, theta0) in starts {
        let (theta, cost, converged, iters) = levenberg_marquardt(&prepared, theta0, opts.max_iterations);
        let candidate = if cost <= grid_cost {
            (cost, idx, theta, converged, iters)
        } else {
            (grid_cost, idx, theta0, converged, iters)
        };
        let better = match &best {
            None => true,
            Some(b) => candidate.0 < b.0 || (candidate.0 == b.0 && candidate.1 < b.1),
        };
        if better {
            best = Some(candidate);
        }
    }
    let (cost, _, [l_min, b, beta, g, gamma], converged, iterations) = best.expect("at least one start");
    if !converged {
        log::warn!(
            "joint loss fit did not converge within {} iterations",
            opts.max_iterations
        );
    }
    Ok(JointLossFit {
        l_min,
        b,
        beta,
        g,
        gamma,
        residual_norm: cost.sqrt(),
        converged,
        iterations,
    })
}

/// Loss-minimizing (D, P) with `D * P = C / T`.
pub fn optimal_allocation(fit: &JointLossFit, c: f64, t: f64) -> Result<(f64, f64), ScalingError> {
    let budget = positive("C", c)? / positive("T", t)?;
    if !(fit.b > 0.0 && fit.g > 0.0) {
        return Err(ScalingError::InvalidFit("B and G must be positive"));
    }
    if !(fit.beta > 0.0 && fit.gamma > 0.0) {
        return Err(ScalingError::InvalidFit("exponents must be positive"));
    }
    // first-order condition: beta B D^-beta = gamma G P^-gamma with P = budget / D
    let ln_d = ((fit.beta * fit.b).ln() - (fit.gamma * fit.g).ln() + fit.gamma * budget.ln()) / (fit.beta + fit.gamma);
    let d = ln_d.exp();
    Ok((d, budget / d))
}

/// Default relative tolerance on `|beta - gamma|` for [`effective_alpha`].
pub const EXPONENT_TOLERANCE: f64 = 0.05;

/// Compute exponent at the optimal allocation when `beta ~ gamma`.
pub fn effective_alpha(fit: &JointLossFit, tolerance: f64) -> Result<f64, ScalingError> {
    let scale = fit.beta.abs().max(fit.gamma.abs());
    if scale == 0.0 || (fit.beta - fit.gamma).abs() > tolerance * scale {
        return Err(ScalingError::ExponentMismatch {
            beta: fit.beta,
            gamma: fit.gamma,
            tolerance,
        });
    }
    Ok(fit.beta / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn law(l_min: f64, b: f64, beta: f64, g: f64, gamma: f64) -> JointLossFit {
        JointLossFit {
            l_min,
            b,
            beta,
            g,
            gamma,
            residual_norm: 0.0,
            converged: true,
            iterations: 0,
        }
    }

    #[test]
    fn compute_examples() {
        assert_eq!(training_compute(10.0, 10.0, 1.0).unwrap(), 100.0);
        assert_eq!(training_compute(10.0, 10.0, 2.0).unwrap(), 200.0);
        let k = 7.0;
        assert!(
            (training_compute(k * 3.0, k * 5.0, 1.5).unwrap() - k * k * training_compute(3.0, 5.0, 1.5).unwrap()).abs()
                < 1e-9
        );
        assert!(matches!(
            training_compute(0.0, 1.0, 1.0),
            Err(ScalingError::NonPositive { name: "D", .. })
        ));
        assert_eq!(ComputeSpec::new(2.0, 3.0, 4.0).unwrap().c, 24.0);
    }

    #[test]
    fn power_law_examples() {
        let exact: Vec<_> = [1e3, 1e5, 1e8, 1e12].iter().map(|&c: &f64| (c, c.powf(0.1))).collect();
        let fit = fit_power_law(&exact).unwrap();
        assert!((fit.alpha_prime - 0.1).abs() < 1e-12);
        assert!(fit.residual_norm < 1e-12);
        let flat: Vec<_> = [1.0, 10.0, 100.0].iter().map(|&c| (c, 3.0)).collect();
        assert!(fit_power_law(&flat).unwrap().alpha_prime.abs() < 1e-15);
        assert_eq!(
            fit_power_law(&[(5.0, 1.0), (5.0, 2.0)]),
            Err(ScalingError::RankDeficient)
        );
    }

    #[test]
    fn allocation_closed_form() {
        let sym = law(0.0, 5.0, 0.3, 5.0, 0.3);
        let (d, p) = optimal_allocation(&sym, 1e12, 2.0).unwrap();
        assert!((d - (5e11f64).sqrt()).abs() < 1e-6 * d);
        assert!((p - d).abs() < 1e-6 * d);

        let skew = law(0.0, 8.0, 0.3, 1.0, 0.3);
        let (d, p) = optimal_allocation(&skew, 1e12, 1.0).unwrap();
        assert!((d / 1e6 - 8f64.powf(1.0 / 0.6)).abs() < 1e-9 * d);
        assert!((d / p - 8f64.powf(1.0 / 0.3)).abs() < 1e-6 * (d / p));
        assert!(optimal_allocation(&law(0.0, 0.0, 0.3, 1.0, 0.3), 1e12, 1.0).is_err());
    }

    #[test]
    fn effective_alpha_rules() {
        assert!((effective_alpha(&law(0.0, 1.0, 0.3, 1.0, 0.3), EXPONENT_TOLERANCE).unwrap() - 0.15).abs() < 1e-15);
        let a = effective_alpha(&law(0.0, 1.0, 0.2, 1.0, 0.2), EXPONENT_TOLERANCE).unwrap();
        assert!((a - 0.10).abs() < 1e-15);
        assert!((0.05..=0.15).contains(&a));
        assert!(matches!(
            effective_alpha(&law(0.0, 1.0, 0.3, 1.0, 0.4), EXPONENT_TOLERANCE),
            Err(ScalingError::ExponentMismatch { .. })
        ));
    }

    #[test]
    fn joint_fit_rejects_thin_designs() {
        let line: Vec<_> = (1..=6).map(|i| (10.0 * i as f64, 100.0, 1.0)).collect();
        assert_eq!(
            fit_joint_loss(&line, &JointFitOptions::default()),
            Err(ScalingError::InsufficientSpread)
        );
    }

    #[test]
    fn joint_fit_plateau() {
        let mut samples = Vec::new();
        for d in [1e2, 1e3, 1e4] {
            for p in [1e2, 1e3, 1e4] {
                samples.push((d, p, 0.7));
            }
        }
        let fit = fit_joint_loss(&samples, &JointFitOptions::default()).unwrap();
        assert!((fit.l_min - 0.7).abs() < 1e-9);
        assert!(fit.b.abs() < 1e-9 && fit.g.abs() < 1e-9);
    }
}
