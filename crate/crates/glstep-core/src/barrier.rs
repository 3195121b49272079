//! Barrier energy per unit length, extrapolated from a strip-width schedule.
//!
//! The strip ground-state energy `g(R)` grows linearly in the width `R`, and
//! the per-unit-length limit `e = lim g(R)/R` is approached from above with
//! an excess that decays like `R^{-1/3}`:
//!
//! ```text
//! e <= g(R)/R <= e + c * R^{-1/3}.
//! ```
//!
//! Solving a schedule of widths and fitting the tail of that model gives a
//! two-sided bracket `[e_lower, e_upper]` plus a best estimate. The limit
//! vanishes exactly when the step coefficient is positive or when
//! `b >= 1/β_a`, and those branches short-circuit without any 2D solve.

use alloc::format;
use alloc::vec::Vec;

use crate::fiber::{self, DispersionCurve};
use crate::gl1d;
use crate::numerics::LineDisc;
use crate::strip2d::{strip_ground_state, StripSpacing};
use crate::{Error, Result};

/// Default width schedule for the extrapolation in `R`.
pub const R_SCHEDULE: [f64; 5] = [4.0, 6.0, 9.0, 13.5, 20.0];

/// Empirical cap on the minimizer mass per unit width, scaled by the field:
/// schedule minimizers satisfy `∫ (b|∇ψ|² + |ψ|²) <= MASS_PER_LENGTH · b·R`
/// with a comfortable margin (measured ≈ 0.5 at a = -1, b = 1.2 across
/// widths). It feeds the crude linear lower bound in [`analytic_bounds`].
pub const MASS_PER_LENGTH: f64 = 1.0;

/// Slack allowed on the `g/R` monotonicity check (solver tolerance).
const MONOTONE_SLACK: f64 = 1e-6;

/// Two-sided estimate of the barrier energy per unit length.
#[derive(Clone, Debug, PartialEq)]
pub struct BarrierEnergyEstimate {
    /// Step coefficient.
    pub a: f64,
    /// Field strength.
    pub b: f64,
    /// Solved truncations as `(R, g(R)/R)`, sorted by `R`; empty when the
    /// limit vanishes analytically.
    pub schedule: Vec<(f64, f64)>,
    /// Certified lower end of the bracket.
    pub e_lower: f64,
    /// Certified upper end (`g/R` is an upper bound at every width).
    pub e_upper: f64,
    /// Tail-fit estimate, clamped into `[e_lower, e_upper]`.
    pub e_best: f64,
    /// Fitted tail constant `c` of `g/R = e + c·R^{-1/3}`, divided by `b²`
    /// for cross-parameter comparison.
    pub c_over_b2: f64,
}

fn vanishing(a: f64, b: f64) -> BarrierEnergyEstimate {
    BarrierEnergyEstimate {
        a,
        b,
        schedule: Vec::new(),
        e_lower: 0.0,
        e_upper: 0.0,
        e_best: 0.0,
        c_over_b2: 0.0,
    }
}

/// Least-squares fit of `y = e + c·x` with `x = R^{-1/3}` through the given
/// `(R, y)` points; returns `(e, c)`.
fn fit_tail(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let xs = points.iter().map(|&(r, _)| r.powf(-1.0 / 3.0));
    let x_mean = xs.clone().sum::<f64>() / n;
    let y_mean = points.iter().map(|&(_, y)| y).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, &(_, y)) in xs.zip(points.iter()) {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
    }
    let c = sxy / sxx;
    (y_mean - c * x_mean, c)
}

/// Estimates the barrier energy per unit length at `(a, b)` by solving the
/// strip ground state over the width `schedule` and extrapolating.
///
/// For `a ∈ (0,1)`, or for `b >= 1/β_a`, the limit is 0 exactly and the
/// returned estimate has an empty schedule. The nontrivial branch needs
/// `a ∈ [-1,0)`, `b >= 1/|a|` and at least three schedule widths for the
/// tail fit.
pub fn barrier_energy(
    a: f64,
    b: f64,
    schedule: &[f64],
    spacing: StripSpacing,
) -> Result<BarrierEnergyEstimate> {
    fiber::check_a(a)?;
    if !b.is_finite() || b <= 0.0 {
        return Err(Error::Input(format!("field strength b = {b} must be positive")));
    }
    if a > 0.0 {
        return Ok(vanishing(a, b));
    }
    let curve = fiber::beta(a, LineDisc::default())?;
    if b >= 1.0 / curve.beta {
        return Ok(vanishing(a, b));
    }
    if b < 1.0 / -a {
        return Err(Error::Domain(format!(
            "b = {b} below 1/|a| = {}: bulk superconductivity dominates and the \
             strip energy has no per-length limit",
            1.0 / -a
        )));
    }
    if schedule.len() < 3 {
        return Err(Error::Input(format!(
            "width schedule needs at least 3 entries for the tail fit, got {}",
            schedule.len()
        )));
    }
    let mut widths: Vec<f64> = schedule.to_vec();
    if widths.iter().any(|r| !r.is_finite() || *r <= 0.0) {
        return Err(Error::Input("width schedule entries must be positive".into()));
    }
    widths.sort_by(|p, q| p.partial_cmp(q).unwrap());
    if widths.windows(2).any(|w| w[1] - w[0] < 1e-9) {
        return Err(Error::Input("width schedule entries must be distinct".into()));
    }

    let mut points = Vec::with_capacity(widths.len());
    for &r in &widths {
        let (g, _) = strip_ground_state(a, b, r, spacing)?;
        points.push((r, g / r));
    }
    for w in points.windows(2) {
        if w[1].1 > w[0].1 + MONOTONE_SLACK {
            return Err(Error::Resolution(format!(
                "g/R increased from {:.6e} (R = {}) to {:.6e} (R = {}); refine the \
                 spatial grids or deepen the height schedule",
                w[0].1, w[0].0, w[1].1, w[1].0
            )));
        }
    }

    let (e_hat, c_hat) = fit_tail(&points[points.len() - 3..]);
    let e_upper = points.iter().map(|&(_, y)| y).fold(0.0, f64::min);
    let e_lower = points
        .iter()
        .map(|&(r, y)| y - c_hat * r.powf(-1.0 / 3.0))
        .fold(f64::NEG_INFINITY, f64::max)
        .min(e_upper);
    let e_best = e_hat.clamp(e_lower, e_upper);
    Ok(BarrierEnergyEstimate {
        a,
        b,
        schedule: points,
        e_lower,
        e_upper,
        e_best,
        c_over_b2: c_hat / (b * b),
    })
}

/// Closed-form bracket `(lower, upper)` for the barrier energy per unit
/// length, with no 2D solve.
///
/// The upper bound `-(1 - b·β_a)²/(2ν_a)` comes from a trial state built on
/// the band minimizer; the lower bound `b·(b·β_a - 1)·C` pairs the spectral
/// inequality with the empirical mass cap [`MASS_PER_LENGTH`]. Both vanish
/// (returning `(0, 0)`) once `b >= 1/β_a`.
pub fn analytic_bounds(curve: &DispersionCurve, b: f64) -> Result<(f64, f64)> {
    if !b.is_finite() || b <= 0.0 {
        return Err(Error::Input(format!("field strength b = {b} must be positive")));
    }
    if curve.a >= 0.0 {
        return Ok((0.0, 0.0));
    }
    if b >= 1.0 / curve.beta {
        return Ok((0.0, 0.0));
    }
    if b < 1.0 / -curve.a {
        return Err(Error::Domain(format!(
            "b = {b} below 1/|a| = {}: bulk regime",
            1.0 / -curve.a
        )));
    }
    let nu = curve.nu.ok_or_else(|| {
        Error::Input("dispersion curve carries no quartic data at the minimizer".into())
    })?;
    let defect = 1.0 - b * curve.beta;
    let upper = -defect * defect / (2.0 * nu);
    let lower = (b * (b * curve.beta - 1.0) * MASS_PER_LENGTH).min(upper);
    Ok((lower, upper))
}

/// Evidence for the identification of the barrier energy with the 1D line
/// energy: returns `(e2d, e1d, relative_gap)` without asserting equality.
///
/// `e2d` is the schedule extrapolation [`barrier_energy`] and `e1d` the
/// optimal whole-line 1D energy from [`gl1d::optimal_xi`]. Both vanish for
/// `b >= 1/β_a`, where the gap is reported as 0.
pub fn conjecture_gap(
    a: f64,
    b: f64,
    schedule: &[f64],
    spacing: StripSpacing,
    line: LineDisc,
) -> Result<(f64, f64, f64)> {
    fiber::check_a(a)?;
    if a > 0.0 {
        return Err(Error::Domain(format!(
            "the line-energy comparison needs a in [-1,0), got a = {a}"
        )));
    }
    let curve = fiber::beta(a, line)?;
    if b >= 1.0 / curve.beta {
        return Ok((0.0, 0.0, 0.0));
    }
    let estimate = barrier_energy(a, b, schedule, spacing)?;
    let (_, e1d, _) = gl1d::optimal_xi(&curve, b, line)?;
    if e1d == 0.0 {
        return Err(Error::Conditioning(
            "1D line energy vanished below the threshold; cannot form a relative gap".into(),
        ));
    }
    Ok((estimate.e_best, e1d, (estimate.e_best - e1d).abs() / e1d.abs()))
}
