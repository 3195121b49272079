//! Whole-line fiber operator `-d²/dt² + V_a(ξ,t)` with a step coefficient.
//!
//! The potential is `(ξ+at)²` for `t < 0` and `(ξ+t)²` for `t > 0`; it is
//! continuous with a kink at 0, which the grid places exactly on a node.
//! Provides the band function `μ_a(ξ)`, the barrier constant
//! `β_a = inf_ξ μ_a(ξ)` with minimizer `ζ_a`, the associated de Gennes
//! parameter `γ_a(ξ)`, the closed-form band derivative, two-sided half-line
//! comparison bounds, a closed-form trial upper bound, and the `ξ`-interval
//! where the band dips below a threshold `1/b`.

use crate::halfline::{self, auto_truncation, DeGennesPoint};
use crate::numerics::{
    minimize_scalar, smallest_eigenpair, EigenResult, LineDisc, EIGEN_TOL, SCALAR_TOL,
};
use crate::{Error, Result};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Validates the step coefficient `a ∈ [-1,1) \ {0}`.
pub(crate) fn check_a(a: f64) -> Result<()> {
    if !a.is_finite() || !(-1.0..1.0).contains(&a) || a == 0.0 {
        return Err(Error::Input(format!("step coefficient a = {a} must lie in [-1,1) and be nonzero")));
    }
    Ok(())
}

/// Discretized fiber problem: Dirichlet cutoffs at `-truncation_neg` and
/// `truncation_pos`, `n` unknowns, one node exactly at `t = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiberOperator {
    /// Step coefficient `a ∈ [-1,1) \ {0}`.
    pub a: f64,
    /// Momentum offset `ξ`.
    pub xi: f64,
    /// Cutoff below zero (the domain extends to `t = -truncation_neg`).
    pub truncation_neg: f64,
    /// Cutoff above zero.
    pub truncation_pos: f64,
    /// Number of unknowns (both cutoff nodes are eliminated).
    pub n: usize,
}

impl FiberOperator {
    /// Chooses both cutoffs from the potential-level rule: each side extends
    /// until `V_a >= mu_estimate + 25`, and at least 8 past the well on that
    /// side, so the Dirichlet truncation error is negligible against `O(h²)`.
    pub fn auto(a: f64, xi: f64, disc: LineDisc) -> Result<Self> {
        check_a(a)?;
        if !xi.is_finite() {
            return Err(Error::Input("non-finite xi".into()));
        }
        let h = LineDisc::new(disc.h)?.h;
        // Right side: identical rule to the half-line problems at offset -xi.
        let tpos = auto_truncation(-xi, h);
        // Left side: the potential (ξ+at)² grows with rate |a|, well at -ξ/a.
        let mu_est = 3.0 + xi * xi + 2.26 * xi.abs();
        let root = (mu_est + 25.0).sqrt();
        let decay = if a > 0.0 { (root + xi) / a } else { (root - xi) / (-a) };
        let well = -xi / a;
        let tneg = (12.0_f64).max(8.0 - well).max(decay);
        let tneg = (tneg / h).ceil() * h;
        Self::with_cutoffs(a, xi, tneg, tpos, h)
    }

    fn with_cutoffs(a: f64, xi: f64, tneg: f64, tpos: f64, h: f64) -> Result<Self> {
        let kn = (tneg / h).round() as usize;
        let kp = (tpos / h).round() as usize;
        if kn < 2 || kp < 2 {
            return Err(Error::Input("cutoffs too small for the grid spacing".into()));
        }
        Ok(FiberOperator {
            a,
            xi,
            truncation_neg: kn as f64 * h,
            truncation_pos: kp as f64 * h,
            n: kn + kp - 1,
        })
    }

    /// Grid spacing.
    pub fn spacing(&self) -> f64 {
        (self.truncation_neg + self.truncation_pos) / (self.n + 1) as f64
    }

    /// Coordinate of unknown `i` (`i = 0` is the node next to the left cutoff).
    pub fn node(&self, i: usize) -> f64 {
        -self.truncation_neg + (i + 1) as f64 * self.spacing()
    }

    /// Index of the unknown at `t = 0`.
    pub fn zero_index(&self) -> usize {
        (self.truncation_neg / self.spacing()).round() as usize - 1
    }

    /// Potential value at coordinate `t`.
    pub fn potential(&self, t: f64) -> f64 {
        let s = if t < 0.0 { self.xi + self.a * t } else { self.xi + t };
        s * s
    }
}

/// Sampled band function with its minimum and minimizer data.
///
/// For `a ∈ (0,1)` the infimum `β_a = a` is not attained (the band decreases
/// strictly to it), so `zeta`, `f0`, `nu` are `None` and no scan is stored.
#[derive(Clone, Debug, PartialEq)]
pub struct DispersionCurve {
    /// Step coefficient.
    pub a: f64,
    /// Scan abscissas (empty on the analytic positive-`a` branch).
    pub xi_samples: Vec<f64>,
    /// Band values at `xi_samples`.
    pub mu_samples: Vec<f64>,
    /// `β_a = inf_ξ μ_a(ξ)`.
    pub beta: f64,
    /// Minimizer `ζ_a < 0` (negative-`a` branch only).
    pub zeta: Option<f64>,
    /// Ground-state boundary value `f_{a,ζ_a}(0)` at the minimizer.
    pub f0: Option<f64>,
    /// Quartic integral `ν_a = ∫ f_{a,ζ_a}⁴` at the minimizer.
    pub nu: Option<f64>,
    /// Set when the coarse scan shows a second local minimum within `1e-6`
    /// of the best one; the smallest `ζ` is then reported.
    pub near_tie: bool,
}

/// One sample of the de Gennes parameter `γ_a(ξ) = f'(0)/f(0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeGennesParamSample {
    /// Momentum offset.
    pub xi: f64,
    /// Logarithmic derivative of the ground state at the kink.
    pub gamma_a: f64,
}

fn solve_fiber(op: &FiberOperator) -> Result<EigenResult> {
    let h = op.spacing();
    let inv_h2 = 1.0 / (h * h);
    let diag: Vec<f64> = (0..op.n).map(|i| 2.0 * inv_h2 + op.potential(op.node(i))).collect();
    let off = vec![-inv_h2; op.n - 1];
    let r = smallest_eigenpair(&diag, &off, EIGEN_TOL)?;
    let phi: Vec<f64> = r.vector.iter().map(|&v| v / h.sqrt()).collect();
    let edge_mass = |range: core::ops::Range<usize>| -> f64 {
        range.map(|i| h * phi[i] * phi[i]).sum()
    };
    let left = edge_mass(0..3.min(op.n));
    let right = edge_mass(op.n.saturating_sub(3)..op.n);
    if left > 1e-8 || right > 1e-8 {
        return Err(Error::Truncation(format!(
            "ground state mass near a cutoff ({left:.3e} left, {right:.3e} right); widen [-{}, {}]",
            op.truncation_neg, op.truncation_pos
        )));
    }
    Ok(EigenResult { value: r.value, vector: phi, residual: r.residual })
}

/// Automatic-cutoff solve, widening whichever side traps mass.
pub(crate) fn solve_fiber_auto(a: f64, xi: f64, disc: LineDisc) -> Result<(FiberOperator, EigenResult)> {
    let mut op = FiberOperator::auto(a, xi, disc)?;
    let h = disc.h;
    for _ in 0..2 {
        match solve_fiber(&op) {
            Err(Error::Truncation(_)) => {
                op = FiberOperator::with_cutoffs(
                    a,
                    xi,
                    op.truncation_neg * 1.5,
                    op.truncation_pos * 1.5,
                    h,
                )?;
            }
            other => return other.map(|r| (op, r)),
        }
    }
    solve_fiber(&op).map(|r| (op, r))
}

/// First eigenvalue `μ_a(ξ)` of the fiber operator.
pub fn mu_fiber(a: f64, xi: f64, disc: LineDisc) -> Result<f64> {
    Ok(solve_fiber_auto(a, xi, disc)?.1.value)
}

/// Band minimum `β_a` with scan data and minimizer diagnostics.
///
/// Negative branch: coarse scan over `ξ ∈ [-6, 1]` at step 0.05 (wide enough
/// by the band limits: `|a|` at `-∞`, growth at `+∞`), then Brent refinement
/// around the best sample. Positive branch: `β_a = a` analytically; scanning
/// would only produce a cutoff artifact for a non-attained infimum.
pub fn beta(a: f64, disc: LineDisc) -> Result<DispersionCurve> {
    check_a(a)?;
    if a > 0.0 {
        return Ok(DispersionCurve {
            a,
            xi_samples: Vec::new(),
            mu_samples: Vec::new(),
            beta: a,
            zeta: None,
            f0: None,
            nu: None,
            near_tie: false,
        });
    }
    let (lo, hi, step) = (-6.0, 1.0, 0.05);
    let count = ((hi - lo) / step).round() as usize + 1;
    let mut xi_samples = Vec::with_capacity(count);
    let mut mu_samples = Vec::with_capacity(count);
    for i in 0..count {
        let xi = lo + i as f64 * step;
        xi_samples.push(xi);
        mu_samples.push(mu_fiber(a, xi, disc)?);
    }

    // Local minima of the sampled sequence; ties within 1e-6 are flagged.
    let mut minima: Vec<usize> = Vec::new();
    for i in 1..count - 1 {
        if mu_samples[i] <= mu_samples[i - 1] && mu_samples[i] <= mu_samples[i + 1] {
            minima.push(i);
        }
    }
    if minima.is_empty() {
        return Err(Error::Convergence(
            "no interior band minimum inside the scan window [-6, 1]".into(),
        ));
    }
    let best_val = minima.iter().map(|&i| mu_samples[i]).fold(f64::INFINITY, f64::min);
    let near: Vec<usize> =
        minima.iter().copied().filter(|&i| mu_samples[i] - best_val <= 1e-6).collect();
    let near_tie = near.len() > 1;
    let idx = near[0]; // smallest ζ among the tied minima

    let mut fail: Option<Error> = None;
    let refined = minimize_scalar(
        |xi| match mu_fiber(a, xi, disc) {
            Ok(v) => v,
            Err(e) => {
                fail = Some(e);
                f64::NAN
            }
        },
        (xi_samples[idx] - step, xi_samples[idx] + step),
        SCALAR_TOL,
    );
    if let Some(e) = fail {
        return Err(e);
    }
    let refined = refined?;
    let (op, ground) = solve_fiber_auto(a, refined.x, disc)?;
    let h = op.spacing();
    let f0 = ground.vector[op.zero_index()];
    let nu = ground.vector.iter().map(|&v| h * v * v * v * v).sum::<f64>();
    Ok(DispersionCurve {
        a,
        xi_samples,
        mu_samples,
        beta: refined.f,
        zeta: Some(refined.x),
        f0: Some(f0),
        nu: Some(nu),
        near_tie,
    })
}

/// One-sided `O(h²)` log-derivative estimates of the ground state at `t=0`.
fn degennes_sides(op: &FiberOperator, ground: &EigenResult) -> Result<(f64, f64)> {
    let h = op.spacing();
    let i0 = op.zero_index();
    let f = &ground.vector;
    let f0 = f[i0];
    if f0.abs() < 1e-12 {
        return Err(Error::Conditioning(format!(
            "ground state nearly vanishes at the kink (f(0) = {f0:.3e})"
        )));
    }
    let right = (-3.0 * f[i0] + 4.0 * f[i0 + 1] - f[i0 + 2]) / (2.0 * h);
    let left = (3.0 * f[i0] - 4.0 * f[i0 - 1] + f[i0 - 2]) / (2.0 * h);
    Ok((left / f0, right / f0))
}

/// De Gennes parameter `γ_a(ξ)`, averaged over the two one-sided estimates
/// (which agree to `O(h²)` because the eigenfunction has a continuous
/// derivative across the kink).
pub fn degennes_param(a: f64, xi: f64, disc: LineDisc) -> Result<DeGennesParamSample> {
    check_a(a)?;
    let (op, ground) = solve_fiber_auto(a, xi, disc)?;
    let (l, r) = degennes_sides(&op, &ground)?;
    Ok(DeGennesParamSample { xi, gamma_a: 0.5 * (l + r) })
}

/// Closed-form band derivative `∂_ξ μ_a(ξ)` for `a ∈ [-1, 0)`:
/// `(1 - 1/a)·(γ_a(ξ)² + μ_a(ξ) - ξ²)·f_{a,ξ}(0)²`.
pub fn mu_fiber_derivative(a: f64, xi: f64, disc: LineDisc) -> Result<f64> {
    check_a(a)?;
    if a >= 0.0 {
        return Err(Error::Domain(format!(
            "the closed-form band derivative requires a in [-1,0), got a = {a}"
        )));
    }
    let (op, ground) = solve_fiber_auto(a, xi, disc)?;
    let f0 = ground.vector[op.zero_index()];
    if f0.abs() < 1e-12 {
        return Err(Error::Conditioning(format!(
            "ground state nearly vanishes at the kink (f(0) = {f0:.3e})"
        )));
    }
    let (l, r) = degennes_sides(&op, &ground)?;
    let gamma = 0.5 * (l + r);
    let mu = ground.value;
    Ok((1.0 - 1.0 / a) * (gamma * gamma + mu - xi * xi) * f0 * f0)
}

/// Two-sided half-line envelopes for the band function.
///
/// Lower: Neumann halves, `min(μ^N(-ξ), |a|·μ^N(∓ξ/√|a|))`; upper: the same
/// combination with Dirichlet halves. The sign of the rescaled argument
/// follows the branch of `a` (`+ξ/√a` for `a > 0`, `-ξ/√|a|` for `a < 0`).
pub fn sandwich_bounds(a: f64, xi: f64, disc: LineDisc) -> Result<(f64, f64)> {
    check_a(a)?;
    if !xi.is_finite() {
        return Err(Error::Input("non-finite xi".into()));
    }
    let s = a.abs().sqrt();
    let scaled = if a > 0.0 { xi / s } else { -xi / s };
    let lower = halfline::mu_neumann(-xi, disc)?.min(a.abs() * halfline::mu_neumann(scaled, disc)?);
    let upper =
        halfline::mu_dirichlet(-xi, disc)?.min(a.abs() * halfline::mu_dirichlet(scaled, disc)?);
    Ok((lower, upper))
}

/// Closed-form upper bound on `β_a` for `a ∈ (-1, 0)` from a glued trial
/// state built out of the Robin minimizer at `γ = √(1/(2|a|(1-|a|)))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialBound {
    /// Robin coefficient used by the trial state.
    pub gamma: f64,
    /// Gluing slope `m = √|a|·γ`.
    pub m: f64,
    /// The de Gennes point at `gamma` (reused by callers).
    pub degennes: DeGennesPoint,
    /// Sharper quotient bound `√|a|·Θ(γ) / (1/√|a| + φ_γ(0)²/(2m))`.
    pub quotient: f64,
    /// Looser product bound `|a|·Θ(γ)`.
    pub product: f64,
}

/// Evaluates the trial-state upper bound; requires `a ∈ (-1, 0)` strictly
/// (the Robin coefficient `γ` diverges at `a = -1`).
pub fn trial_upper_bound(a: f64, disc: LineDisc) -> Result<TrialBound> {
    if !a.is_finite() || !(a > -1.0 && a < 0.0) {
        return Err(Error::Domain(format!(
            "trial bound requires a strictly inside (-1, 0), got a = {a}"
        )));
    }
    let abs_a = -a;
    let gamma = (1.0 / (2.0 * abs_a * (1.0 - abs_a))).sqrt();
    let m = abs_a.sqrt() * gamma;
    let dg = halfline::theta(gamma, disc)?;
    let quotient =
        abs_a.sqrt() * dg.theta / (1.0 / abs_a.sqrt() + dg.phi0 * dg.phi0 / (2.0 * m));
    let product = abs_a * dg.theta;
    Ok(TrialBound { gamma, m, degennes: dg, quotient, product })
}

/// Bisection solve of `μ_a(ξ) = target`.
///
/// `below` has `μ < target`, `above` has `μ > target`; their order on the
/// axis is irrelevant. Stops when the band value is within `1e-9`.
fn band_level_crossing(
    a: f64,
    disc: LineDisc,
    target: f64,
    mut below: f64,
    mut above: f64,
) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (below + above);
        let v = mu_fiber(a, mid, disc)?;
        if (v - target).abs() <= 1e-9 || (above - below).abs() < 1e-13 {
            return Ok(mid);
        }
        if v < target {
            below = mid;
        } else {
            above = mid;
        }
    }
    Err(Error::Convergence("band level bisection did not settle".into()))
}

/// Interval `(ξ₁, ξ₂)` where the band dips below `1/b`, computed from a
/// precomputed dispersion curve (negative `a` only): `ξ₁ < ζ_a < ξ₂`.
pub fn xi_bracket_from(curve: &DispersionCurve, b: f64, disc: LineDisc) -> Result<(f64, f64)> {
    let a = curve.a;
    check_a(a)?;
    if a > 0.0 {
        return Err(Error::Domain(format!(
            "the sub-level interval needs a in [-1,0), got a = {a}"
        )));
    }
    let abs_a = -a;
    if !(b.is_finite() && b > 1.0 / abs_a) {
        return Err(Error::Domain(format!(
            "b = {b} must exceed 1/|a| = {} strictly",
            1.0 / abs_a
        )));
    }
    if b >= 1.0 / curve.beta {
        return Err(Error::Domain(format!(
            "b = {b} must stay below 1/beta_a = {} strictly",
            1.0 / curve.beta
        )));
    }
    let zeta = curve.zeta.ok_or_else(|| Error::Domain("curve lacks a minimizer".into()))?;
    let target = 1.0 / b;

    // Walk out from the minimizer until the band exceeds the level; the
    // left branch tends to |a| > 1/b from below, the right branch grows.
    let mut left = zeta - 0.5;
    let mut found = false;
    for _ in 0..40 {
        if mu_fiber(a, left, disc)? > target {
            found = true;
            break;
        }
        left -= 0.5;
    }
    if !found {
        return Err(Error::Convergence(format!(
            "band never exceeded 1/b = {target} down to xi = {left}; b may sit too close to 1/|a|"
        )));
    }
    let mut right = zeta + 0.5;
    let mut found = false;
    for _ in 0..40 {
        if mu_fiber(a, right, disc)? > target {
            found = true;
            break;
        }
        right += 0.5;
    }
    if !found {
        return Err(Error::Convergence(format!(
            "band never exceeded 1/b = {target} up to xi = {right}"
        )));
    }
    let xi1 = band_level_crossing(a, disc, target, zeta, left)?;
    let xi2 = band_level_crossing(a, disc, target, zeta, right)?;
    Ok((xi1, xi2))
}

/// Interval `(ξ₁, ξ₂)` with `μ_a < 1/b`, recomputing the dispersion curve.
pub fn xi_bracket(a: f64, b: f64, disc: LineDisc) -> Result<(f64, f64)> {
    let curve = beta(a, disc)?;
    xi_bracket_from(&curve, b, disc)
}
