//! Phase-diagram layer: critical-field thresholds, regime classification,
//! the leading-order energy `E^L_a(b)` and the limiting L⁴ line densities.
//!
//! At applied field `H = bκ` with `b > 1/|a|`, superconductivity survives
//! (to leading order in `κ`) only near three curves: the barrier `Γ`, the
//! part of the outer boundary bordering the unit-field region (`∂Ω₁∩∂Ω`),
//! and the part bordering the scaled-field region (`∂Ω₂∩∂Ω`). Each curve
//! dies at its own critical `b`, and the surviving contributions add up to
//!
//! ```text
//! E^L_a(b) = b^{-1/2} (|Γ|·e_a(b) + L₁·E_surf(b) + L₂·|a|^{-1/2}·E_surf(b|a|)).
//! ```

use alloc::format;
use alloc::string::{String, ToString};

use crate::fiber::DispersionCurve;
use crate::halfline;
use crate::numerics::LineDisc;
use crate::{Error, Result};

/// The four critical field scales of the phase diagram at a given `a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    /// Step coefficient.
    pub a: f64,
    /// `1/|a|`: below it the bulk of the scaled-field region superconducts
    /// (outside this classification).
    pub inv_abs_a: f64,
    /// `1/β_a`: the barrier's critical field.
    pub inv_beta: f64,
    /// `1/Θ₀`: critical field of the unit-field boundary part.
    pub inv_theta: f64,
    /// `1/(|a|Θ₀)`: critical field of the scaled-field boundary part.
    pub inv_a_theta: f64,
}

/// Arc lengths of the three superconducting interfaces.
///
/// The default is a disc of unit radius split by a diameter: barrier length
/// 2 and two half-circle boundary arcs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainGeometry {
    /// Barrier length `|Γ|`.
    pub len_gamma: f64,
    /// Outer boundary length of the unit-field region, `|∂Ω₁∩∂Ω|`.
    pub len_bnd1: f64,
    /// Outer boundary length of the scaled-field region, `|∂Ω₂∩∂Ω|`.
    pub len_bnd2: f64,
}

impl Default for DomainGeometry {
    fn default() -> Self {
        DomainGeometry {
            len_gamma: 2.0,
            len_bnd1: core::f64::consts::PI,
            len_bnd2: core::f64::consts::PI,
        }
    }
}

/// Per-unit-length energies of the three interfaces at a given `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionEnergies {
    /// Barrier energy `e_a(b) ≤ 0`.
    pub barrier: f64,
    /// Surface energy at the unit-field boundary, `E_surf(b) ≤ 0`.
    pub surface1: f64,
    /// Surface energy at the scaled-field boundary, `E_surf(b|a|) ≤ 0`.
    pub surface2: f64,
}

/// Where superconductivity survives at a given `(a, b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseVerdict {
    /// The barrier carries a negative energy density.
    pub barrier_super: bool,
    /// The unit-field boundary part does.
    pub bnd1_super: bool,
    /// The scaled-field boundary part does.
    pub bnd2_super: bool,
    /// Human-readable regime name.
    pub regime_label: String,
    /// Leading-order energy `E^L_a(b)`; `Some(0)` in the vanishing regime,
    /// otherwise filled from [`leading_energy`] when geometry and energies
    /// are available.
    pub el: Option<f64>,
    /// Total L⁴ mass coefficient `-2·E^L_a(b)`, filled alongside `el`.
    pub l4_coefficient: Option<f64>,
}

fn check_b(b: f64) -> Result<()> {
    if !b.is_finite() || b <= 0.0 {
        return Err(Error::Input(format!("field strength b = {b} must be positive")));
    }
    Ok(())
}

fn check_bulk(inv_abs_a: f64, b: f64) -> Result<()> {
    if b <= inv_abs_a {
        return Err(Error::Domain(format!(
            "b = {b} <= 1/|a| = {inv_abs_a}: bulk regime (the scaled-field region \
             superconducts in its interior), outside this classification"
        )));
    }
    Ok(())
}

/// Computes the four thresholds from a dispersion curve (which carries `a`
/// and `β_a`) and a fresh de Gennes solve for `Θ₀`.
pub fn thresholds(curve: &DispersionCurve, disc: LineDisc) -> Result<Thresholds> {
    let theta0 = halfline::theta(0.0, disc)?.theta;
    let abs_a = curve.a.abs();
    Ok(Thresholds {
        a: curve.a,
        inv_abs_a: 1.0 / abs_a,
        inv_beta: 1.0 / curve.beta,
        inv_theta: 1.0 / theta0,
        inv_a_theta: 1.0 / (abs_a * theta0),
    })
}

fn label(barrier: bool, bnd1: bool, bnd2: bool) -> Result<&'static str> {
    Ok(match (barrier, bnd1, bnd2) {
        (true, true, true) => "barrier+full-surface",
        (true, false, true) => "barrier+surface-Ω₂",
        (false, true, true) => "full-surface",
        (false, false, true) => "surface-Ω₂-only",
        (false, false, false) => "normal",
        // The full-surface threshold 1/Θ₀ never exceeds the Ω₂ one
        // 1/(|a|Θ₀), and the barrier dies no later than the Ω₂ boundary;
        // the remaining combinations can only come from inconsistent
        // caller-supplied energies.
        _ => {
            return Err(Error::Input(format!(
                "inconsistent region energies: flags (barrier, bnd1, bnd2) = \
                 ({barrier}, {bnd1}, {bnd2}) violate the threshold ordering"
            )))
        }
    })
}

/// Classifies the phase at `(a, b)`.
///
/// With `energies: None` (sign-only mode) the flags come from comparing `b`
/// against the thresholds, with no solves; otherwise from the signs of the
/// supplied per-length energies. Requires `b > 1/|a|`. The verdict's `el`
/// is filled only in the vanishing regime (where it is 0 exactly); use
/// [`leading_energy`] for the general value.
pub fn classify(
    th: &Thresholds,
    b: f64,
    energies: Option<&RegionEnergies>,
) -> Result<PhaseVerdict> {
    check_b(b)?;
    check_bulk(th.inv_abs_a, b)?;
    let (barrier_super, bnd1_super, bnd2_super) = match energies {
        None => (th.a < 0.0 && b < th.inv_beta, b < th.inv_theta, b < th.inv_a_theta),
        Some(e) => (e.barrier < 0.0, e.surface1 < 0.0, e.surface2 < 0.0),
    };
    let regime_label = label(barrier_super, bnd1_super, bnd2_super)?.to_string();
    let (el, l4_coefficient) = if !bnd2_super && !bnd1_super && !barrier_super {
        (Some(0.0), Some(0.0))
    } else {
        (None, None)
    };
    Ok(PhaseVerdict { barrier_super, bnd1_super, bnd2_super, regime_label, el, l4_coefficient })
}

fn check_geometry(geom: &DomainGeometry) -> Result<()> {
    let lens = [geom.len_gamma, geom.len_bnd1, geom.len_bnd2];
    if lens.iter().any(|l| !l.is_finite() || *l < 0.0) {
        return Err(Error::Input(format!(
            "interface lengths must be finite and non-negative, got {lens:?}"
        )));
    }
    Ok(())
}

fn check_energies(e: &RegionEnergies) -> Result<()> {
    let vals = [e.barrier, e.surface1, e.surface2];
    if vals.iter().any(|v| !v.is_finite() || *v > 0.0) {
        return Err(Error::Input(format!(
            "per-length energies must be finite and non-positive, got {vals:?}"
        )));
    }
    Ok(())
}

/// Leading-order energy `E^L_a(b)`; the ground-state energy at parameter
/// `κ` is `E^L·κ + o(κ)`.
pub fn leading_energy(
    a: f64,
    b: f64,
    geom: &DomainGeometry,
    energies: &RegionEnergies,
) -> Result<f64> {
    crate::fiber::check_a(a)?;
    check_b(b)?;
    check_bulk(1.0 / a.abs(), b)?;
    check_geometry(geom)?;
    check_energies(energies)?;
    let scale = 1.0 / b.sqrt();
    Ok(scale
        * (geom.len_gamma * energies.barrier
            + geom.len_bnd1 * energies.surface1
            + geom.len_bnd2 * energies.surface2 / a.abs().sqrt()))
}

/// Line densities of the limiting L⁴ measure on the three interfaces
/// (weights multiplying arc length on `Γ`, `∂Ω₁∩∂Ω`, `∂Ω₂∩∂Ω`).
///
/// Each density is `-2b^{-1/2}` times the (non-positive) per-length energy,
/// so all three are non-negative, and the total mass over the geometry is
/// `-2·E^L_a(b)`.
pub fn l4_distribution(
    a: f64,
    b: f64,
    geom: &DomainGeometry,
    energies: &RegionEnergies,
) -> Result<(f64, f64, f64)> {
    crate::fiber::check_a(a)?;
    check_b(b)?;
    check_bulk(1.0 / a.abs(), b)?;
    check_geometry(geom)?;
    check_energies(energies)?;
    let scale = -2.0 / b.sqrt();
    Ok((
        scale * energies.barrier,
        scale * energies.surface1,
        scale * energies.surface2 / a.abs().sqrt(),
    ))
}
