//! Effective one-dimensional Ginzburg-Landau energies.
//!
//! Whole-line functional `∫ b f'² + b V_a(ξ,t) f² - f² + ½f⁴` with the
//! two-branch potential `(ξ+at)²` / `(ξ+t)²`, and its half-line analogue
//! with potential `(t+ξ)²` and a natural (Neumann) condition at 0. Provides
//! ground-state profiles, the optimal momentum `ξ₀`, the first-moment
//! optimality identity, and the surface energy `E_surf(b)`.

use crate::fiber::{self, DispersionCurve};
use crate::halfline::{self, RobinParams};
use crate::numerics::{minimize_scalar, Grid1D, LineDisc, DESCENT_TOL};
use crate::{Error, Result};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// A non-negative 1D order-parameter profile with its energy.
///
/// `values` hold nodal samples on `grid` (Dirichlet zeros included at
/// truncated ends); `a = None` marks a half-line profile.
#[derive(Clone, Debug, PartialEq)]
pub struct GLProfile1D {
    /// Sample grid (half-line grids start at 0).
    pub grid: Grid1D,
    /// Nodal profile values, all `>= 0`.
    pub values: Vec<f64>,
    /// Energy of the stored profile (exact quadrature of the integrand).
    pub energy: f64,
    /// Step coefficient; `None` for the half-line functional.
    pub a: Option<f64>,
    /// Field strength parameter.
    pub b: f64,
    /// Momentum offset.
    pub xi: f64,
}

impl GLProfile1D {
    /// Trapezoid `L²` mass of the profile.
    pub fn mass(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v * v).collect();
        self.grid.integrate(&sq)
    }
}

/// One point of the surface-energy curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceEnergySample {
    /// Field strength, `b >= 1`.
    pub b: f64,
    /// `E_surf(b) <= 0`; exactly 0 on the extension branch.
    pub value: f64,
}

/// Potential of the 1D functional at coordinate `t`.
fn potential(a: Option<f64>, xi: f64, t: f64) -> f64 {
    let s = match a {
        Some(a) if t < 0.0 => xi + a * t,
        _ => xi + t,
    };
    s * s
}

/// Energy of nodal `values` on `grid`: piecewise-linear gradient term plus
/// trapezoid quadrature of the local terms. This quadrature is the defining
/// discrete energy; stored profile energies reproduce it exactly.
pub fn energy_1d(a: Option<f64>, b: f64, xi: f64, grid: &Grid1D, values: &[f64]) -> Result<f64> {
    if values.len() != grid.n {
        return Err(Error::Input(format!(
            "profile has {} values on a grid of {} nodes",
            values.len(),
            grid.n
        )));
    }
    if values.iter().any(|v| !v.is_finite()) || !(b.is_finite() && xi.is_finite()) {
        return Err(Error::Input("non-finite profile or parameter".into()));
    }
    let h = grid.spacing;
    let mut e = 0.0;
    for i in 0..grid.n - 1 {
        let d = values[i + 1] - values[i];
        e += b * d * d / h;
    }
    for i in 0..grid.n {
        let f2 = values[i] * values[i];
        let v = potential(a, xi, grid.node(i));
        e += grid.weight(i) * ((b * v - 1.0) * f2 + 0.5 * f2 * f2);
    }
    Ok(e)
}

/// Discrete 1D problem: nodal grid, free-node window, frozen zeros outside.
struct Problem1D {
    grid: Grid1D,
    v: Vec<f64>,
    b: f64,
    free_lo: usize,
    free_count: usize,
}

impl Problem1D {
    fn whole_line(a: f64, b: f64, xi: f64, disc: LineDisc) -> Result<(Self, Vec<f64>)> {
        let (op, ground) = fiber::solve_fiber_auto(a, xi, disc)?;
        let grid = Grid1D::new(-op.truncation_neg, op.truncation_pos, op.n + 2)?;
        let v: Vec<f64> = (0..grid.n).map(|i| potential(Some(a), xi, grid.node(i))).collect();
        let h = grid.spacing;
        // Scaled-eigenfunction start: t·f with t² = max(0, 1-bμ)/∫f⁴.
        let nu: f64 = ground.vector.iter().map(|&f| h * f * f * f * f).sum();
        let t2 = (1.0 - b * ground.value).max(0.0) / nu;
        let init: Vec<f64> = ground.vector.iter().map(|&f| t2.sqrt() * f).collect();
        Ok((Problem1D { grid, v, b, free_lo: 1, free_count: op.n }, init))
    }

    fn half_line(b: f64, xi: f64, disc: LineDisc) -> Result<(Self, Vec<f64>)> {
        // Potential (t+ξ)² matches the Robin family at offset -ξ.
        let p = RobinParams::auto(0.0, -xi, disc)?;
        let ground = halfline::ground_eigenfunction(&p)?;
        let grid = Grid1D::new(0.0, p.truncation, p.n + 1)?;
        let v: Vec<f64> = (0..grid.n).map(|i| potential(None, xi, grid.node(i))).collect();
        let mut f4: Vec<f64> = ground.vector.iter().map(|&f| f * f * f * f).collect();
        f4.resize(grid.n, 0.0);
        let nu = grid.integrate(&f4);
        let t2 = (1.0 - b * ground.value).max(0.0) / nu;
        let init: Vec<f64> = ground.vector.iter().map(|&f| t2.sqrt() * f).collect();
        Ok((Problem1D { grid, v, b, free_lo: 0, free_count: p.n }, init))
    }

    /// Assembles full nodal values from the free sub-vector.
    fn fill(&self, x: &[f64], full: &mut [f64]) {
        full.iter_mut().for_each(|v| *v = 0.0);
        full[self.free_lo..self.free_lo + self.free_count].copy_from_slice(x);
    }

    fn energy_and_gradient(&self, x: &[f64], g: &mut [f64], full: &mut [f64]) -> f64 {
        self.fill(x, full);
        let n = self.grid.n;
        let h = self.grid.spacing;
        let b = self.b;
        let mut e = 0.0;
        for i in 0..n - 1 {
            let d = full[i + 1] - full[i];
            e += b * d * d / h;
        }
        for i in 0..n {
            let f2 = full[i] * full[i];
            e += self.grid.weight(i) * ((b * self.v[i] - 1.0) * f2 + 0.5 * f2 * f2);
        }
        for (k, gk) in g.iter_mut().enumerate() {
            let j = self.free_lo + k;
            let mut acc = 0.0;
            if j > 0 {
                acc += 2.0 * b * (full[j] - full[j - 1]) / h;
            }
            if j + 1 < n {
                acc += 2.0 * b * (full[j] - full[j + 1]) / h;
            }
            acc += self.grid.weight(j)
                * (2.0 * (b * self.v[j] - 1.0) * full[j] + 2.0 * full[j] * full[j] * full[j]);
            *gk = acc;
        }
        e
    }

    fn energy_only(&self, x: &[f64], full: &mut [f64]) -> f64 {
        self.fill(x, full);
        let h = self.grid.spacing;
        let mut e = 0.0;
        for i in 0..self.grid.n - 1 {
            let d = full[i + 1] - full[i];
            e += self.b * d * d / h;
        }
        for i in 0..self.grid.n {
            let f2 = full[i] * full[i];
            e += self.grid.weight(i) * ((self.b * self.v[i] - 1.0) * f2 + 0.5 * f2 * f2);
        }
        e
    }

    /// Projected Newton descent with non-negativity clamping. The Hessian
    /// of the discrete energy is tridiagonal, so each step is one damped
    /// tridiagonal solve; active (clamped) nodes are pinned to zero steps.
    fn descend(&self, init: &[f64], a: Option<f64>, xi: f64) -> Result<GLProfile1D> {
        let nf = self.free_count;
        let h = self.grid.spacing;
        let mut full = vec![0.0; self.grid.n];
        let mut x: Vec<f64> = init.iter().map(|&v| v.max(0.0)).collect();
        let mut g = vec![0.0; nf];
        let mut e = self.energy_and_gradient(&x, &mut g, &mut full);
        if !e.is_finite() {
            return Err(Error::Input("non-finite energy at the initial profile".into()));
        }
        let mut converged = false;
        let mut iterations = 0;
        let mut grad_norm = 0.0;
        let mut escapes = 0;
        'outer: loop {
        for _ in 0..200 {
            grad_norm = x
                .iter()
                .zip(g.iter())
                .map(|(&xi_, &gi)| {
                    let step = (xi_ - gi).max(0.0) - xi_;
                    step * step
                })
                .sum::<f64>()
                .sqrt();
            if grad_norm <= DESCENT_TOL {
                converged = true;
                break;
            }
            // Assemble the tridiagonal Hessian on free nodes; rows of
            // clamped nodes with outward gradient are pinned.
            let active: Vec<bool> =
                (0..nf).map(|k| x[k] <= 0.0 && g[k] > 0.0).collect();
            let mut diag = vec![0.0; nf];
            let mut off = vec![0.0; nf.saturating_sub(1)];
            for k in 0..nf {
                let j = self.free_lo + k;
                let links = (j > 0) as u8 + (j + 1 < self.grid.n) as u8;
                diag[k] = 2.0 * self.b * links as f64 / h
                    + self.grid.weight(j) * (2.0 * (self.b * self.v[j] - 1.0) + 6.0 * x[k] * x[k]);
            }
            for k in 0..nf - 1 {
                off[k] = if active[k] || active[k + 1] { 0.0 } else { -2.0 * self.b / h };
            }
            let scale = diag.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
            let mut lambda = 0.0;
            let mut dir: Option<Vec<f64>> = None;
            for _ in 0..12 {
                let d_reg: Vec<f64> = (0..nf)
                    .map(|k| if active[k] { 1.0 } else { diag[k] + lambda })
                    .collect();
                if let Ok(lu) = crate::numerics::TridiagLu::factor(&off, &d_reg, &off) {
                    let mut d: Vec<f64> = (0..nf).map(|k| if active[k] { 0.0 } else { -g[k] }).collect();
                    lu.solve_in_place(&mut d);
                    let slope: f64 = d.iter().zip(g.iter()).map(|(a, b)| a * b).sum();
                    if slope < 0.0 && d.iter().all(|v| v.is_finite()) {
                        dir = Some(d);
                        break;
                    }
                }
                lambda = if lambda == 0.0 { 1e-6 * scale.max(1.0) } else { lambda * 16.0 };
            }
            let d = match dir {
                Some(d) => d,
                None => g.iter().zip(active.iter()).map(|(&gi, &a)| if a { 0.0 } else { -gi }).collect(),
            };
            // Backtracking Armijo line search along the projected path.
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..50 {
                let xt: Vec<f64> =
                    (0..nf).map(|k| (x[k] + t * d[k]).max(0.0)).collect();
                let realized: f64 = (0..nf).map(|k| (xt[k] - x[k]) * g[k]).sum();
                let et = self.energy_only(&xt, &mut full);
                if realized < 0.0 && et <= e + 1e-4 * realized {
                    x = xt;
                    e = self.energy_and_gradient(&x, &mut g, &mut full);
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            iterations += 1;
            if !accepted {
                break;
            }
        }
        // A stationary point can be the zero saddle (the gradient vanishes
        // there even when nontrivial minimizers exist). Check the exact
        // Hessian: a negative bottom eigenvalue means a descent direction
        // remains; its eigenvector is one-signed, so step along it with the
        // amplitude minimizing the quartic restriction and keep going.
        if converged && escapes < 3 {
            let mut diag = vec![0.0; nf];
            let mut off = vec![0.0; nf - 1];
            for k in 0..nf {
                let j = self.free_lo + k;
                let links = (j > 0) as u8 + (j + 1 < self.grid.n) as u8;
                diag[k] = 2.0 * self.b * links as f64 / h
                    + self.grid.weight(j) * (2.0 * (self.b * self.v[j] - 1.0) + 6.0 * x[k] * x[k]);
            }
            off.iter_mut().for_each(|o| *o = -2.0 * self.b / h);
            if let Ok(pair) = crate::numerics::smallest_eigenpair(&diag, &off, 1e-8) {
                if pair.value < -1e-8 {
                    let w: Vec<f64> = pair.vector.iter().map(|v| v.abs()).collect();
                    let quart: f64 = (0..nf)
                        .map(|k| 0.5 * self.grid.weight(self.free_lo + k) * w[k].powi(4))
                        .sum();
                    let t = (-pair.value / (4.0 * quart)).sqrt();
                    for k in 0..nf {
                        x[k] = (x[k] + t * w[k]).max(0.0);
                    }
                    e = self.energy_and_gradient(&x, &mut g, &mut full);
                    converged = false;
                    escapes += 1;
                    continue 'outer;
                }
            }
        }
        break 'outer;
        }
        if !converged {
            return Err(Error::Convergence(format!(
                "profile descent stalled after {iterations} iterations (projected grad {grad_norm:.3e}, energy {e:.6e})"
            )));
        }
        let mut values = vec![0.0; self.grid.n];
        self.fill(&x, &mut values);
        let energy = energy_1d(a, self.b, xi, &self.grid, &values)?;
        Ok(GLProfile1D { grid: self.grid.clone(), values, energy, a, b: self.b, xi })
    }
}

fn zero_profile(problem: &Problem1D, a: Option<f64>, xi: f64) -> GLProfile1D {
    GLProfile1D {
        grid: problem.grid.clone(),
        values: vec![0.0; problem.grid.n],
        energy: 0.0,
        a,
        b: problem.b,
        xi,
    }
}

/// Minimizes the whole-line functional at fixed `ξ` for `a ∈ [-1, 0)`.
///
/// Takes the precomputed dispersion curve (which carries `a` and `β_a`).
/// Needs `b >= 1/|a|`: below that threshold the energy is unbounded (the
/// field is too weak to suppress bulk superconductivity on the `a` side).
/// For `b >= 1/μ_a(ξ)` the zero profile is the exact minimizer.
pub fn minimize_profile(
    curve: &DispersionCurve,
    b: f64,
    xi: f64,
    disc: LineDisc,
) -> Result<GLProfile1D> {
    let a = curve.a;
    if a >= 0.0 {
        return Err(Error::Domain(format!(
            "profile minimization needs a in [-1,0), got a = {a}"
        )));
    }
    if !(b.is_finite() && xi.is_finite()) {
        return Err(Error::Input("non-finite b or xi".into()));
    }
    if b < 1.0 / -a {
        return Err(Error::Domain(format!(
            "b = {b} below 1/|a| = {}: energy unbounded below on the line",
            1.0 / -a
        )));
    }
    let (problem, init) = Problem1D::whole_line(a, b, xi, disc)?;
    if init.iter().all(|&v| v == 0.0) {
        return Ok(zero_profile(&problem, Some(a), xi));
    }
    problem.descend(&init, Some(a), xi)
}

/// Minimizes `ξ ↦ E¹ᴰ_{a,b}(ξ)` over the sub-level interval `(ξ₁, ξ₂)`
/// where the band dips below `1/b`; outside it the infimum is 0 exactly.
pub fn optimal_xi(
    curve: &DispersionCurve,
    b: f64,
    disc: LineDisc,
) -> Result<(f64, f64, GLProfile1D)> {
    let (x1, x2) = fiber::xi_bracket_from(curve, b, disc)?;
    let mut fail: Option<Error> = None;
    let m = minimize_scalar(
        |xi| match minimize_profile(curve, b, xi, disc) {
            Ok(p) => p.energy,
            Err(e) => {
                fail = Some(e);
                f64::NAN
            }
        },
        (x1, x2),
        1e-6,
    );
    if let Some(e) = fail {
        return Err(e);
    }
    let m = m?;
    let profile = minimize_profile(curve, b, m.x, disc)?;
    Ok((m.x, profile.energy, profile))
}

/// Signed first moment `∫ (at+ξ)f²` (left) `+ ∫ (t+ξ)f²` (right) of a
/// profile; vanishes at the optimal `ξ₀` by the derivative identity.
pub fn moment_identity_residual(f: &GLProfile1D) -> f64 {
    let weighted: Vec<f64> = (0..f.grid.n)
        .map(|i| {
            let t = f.grid.node(i);
            let w = match f.a {
                Some(a) if t < 0.0 => a * t + f.xi,
                _ => t + f.xi,
            };
            w * f.values[i] * f.values[i]
        })
        .collect();
    f.grid.integrate(&weighted)
}

/// Minimizes the half-line functional at fixed `ξ`.
fn half_line_profile(b: f64, xi: f64, disc: LineDisc) -> Result<GLProfile1D> {
    let (problem, init) = Problem1D::half_line(b, xi, disc)?;
    if init.iter().all(|&v| v == 0.0) {
        return Ok(zero_profile(&problem, None, xi));
    }
    problem.descend(&init, None, xi)
}

/// Half-line ground energy minimized over `ξ`, i.e. `E¹ᴰ_b`.
///
/// The `ξ`-bracket comes from the Neumann band: nontrivial profiles need
/// `μ^N(-ξ) < 1/b`, and the band tends to its minimum `Θ₀ < 1/b` at
/// `-ξ = √Θ₀` and to 1 at `±∞` growth/limit, so a short walk brackets the
/// sub-level set.
fn half_line_optimal(b: f64, disc: LineDisc) -> Result<(f64, f64, GLProfile1D)> {
    let band = |xi: f64| halfline::mu_neumann(-xi, disc);
    let center = -(0.59_f64).sqrt();
    let level = 1.0 / b;
    // Steep side: the well leaves the half-line as ξ grows, μ^N(-ξ) → ∞.
    let mut hi = center + 0.5;
    let mut found = false;
    for _ in 0..30 {
        if band(hi)? > level {
            found = true;
            break;
        }
        hi += 0.5;
    }
    if !found {
        return Err(Error::Convergence("half-line band never exceeded 1/b on the right".into()));
    }
    // Shallow side: μ^N(-ξ) → 1 from below as ξ → -∞, so for b = 1 the
    // sub-level set is unbounded; stop once the band is flat to 1e-6.
    let mut lo = center - 0.5;
    for _ in 0..30 {
        if band(lo)? >= level - 1e-6 {
            break;
        }
        lo -= 0.5;
    }
    let mut fail: Option<Error> = None;
    let m = minimize_scalar(
        |xi| match half_line_profile(b, xi, disc) {
            Ok(p) => p.energy,
            Err(e) => {
                fail = Some(e);
                f64::NAN
            }
        },
        (lo, hi),
        1e-6,
    );
    if let Some(e) = fail {
        return Err(e);
    }
    let m = m?;
    let profile = half_line_profile(b, m.x, disc)?;
    Ok((m.x, profile.energy, profile))
}

/// Surface energy `E_surf(b)`: the half-line ground energy `E¹ᴰ_b` for
/// `b ∈ [1, 1/Θ₀)`, extended by 0 on `[1/Θ₀, ∞)` (continuously: the value
/// tends to 0 as `b ↑ 1/Θ₀`).
pub fn surface_energy(b: f64, disc: LineDisc) -> Result<SurfaceEnergySample> {
    if !(b.is_finite() && b >= 1.0) {
        return Err(Error::Domain(format!("surface energy needs b >= 1, got b = {b}")));
    }
    let theta0 = halfline::theta(0.0, disc)?.theta;
    if b >= 1.0 / theta0 {
        return Ok(SurfaceEnergySample { b, value: 0.0 });
    }
    let (_, value, _) = half_line_optimal(b, disc)?;
    Ok(SurfaceEnergySample { b, value: value.min(0.0) })
}

/// Half-line ground energy with its optimal offset and profile (the
/// non-extended branch of the surface energy, exposed for comparisons).
pub fn surface_profile(b: f64, disc: LineDisc) -> Result<(f64, f64, GLProfile1D)> {
    if !(b.is_finite() && b >= 1.0) {
        return Err(Error::Domain(format!("surface profile needs b >= 1, got b = {b}")));
    }
    half_line_optimal(b, disc)
}
