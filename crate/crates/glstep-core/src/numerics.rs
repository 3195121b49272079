//! Shared discretization and solver kernels.
//!
//! Uniform 1D grids, a symmetric-tridiagonal smallest-eigenpair solver
//! (shifted inverse iteration over a pivoted tridiagonal LU), bracketed
//! scalar minimization (Brent), and projected limited-memory quasi-Newton
//! descent for energy functionals. All routines are deterministic for fixed
//! input: start vectors and schedules contain no randomness.

use crate::{Error, Result};
use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Default residual tolerance for eigenpair computations.
pub const EIGEN_TOL: f64 = 1e-10;
/// Default x-tolerance for bracketed scalar minimization.
pub const SCALAR_TOL: f64 = 1e-8;
/// Default gradient-norm tolerance for energy descent.
pub const DESCENT_TOL: f64 = 1e-7;

/// Spacing options for the 1D line discretizations.
///
/// The default spacing 0.005 puts 200 nodes per unit length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineDisc {
    /// Grid spacing; truncation lengths are rounded up to multiples of it.
    pub h: f64,
}

impl Default for LineDisc {
    fn default() -> Self {
        LineDisc { h: 0.005 }
    }
}

impl LineDisc {
    /// Spacing-validated constructor.
    pub fn new(h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Input(format!("grid spacing must be positive, got {h}")));
        }
        Ok(LineDisc { h })
    }
}

/// A uniform 1D grid with nodes `left + i*spacing`, `i = 0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid1D {
    /// Leftmost node coordinate.
    pub left: f64,
    /// Rightmost node coordinate.
    pub right: f64,
    /// Node count (at least 3).
    pub n: usize,
    /// Node spacing, `(right - left)/(n - 1)`.
    pub spacing: f64,
}

impl Grid1D {
    /// Builds a grid after validating the invariants.
    pub fn new(left: f64, right: f64, n: usize) -> Result<Self> {
        if !(left.is_finite() && right.is_finite()) {
            return Err(Error::Input(format!("grid endpoints must be finite: [{left}, {right}]")));
        }
        if !(left < right) {
            return Err(Error::Input(format!("grid needs left < right, got [{left}, {right}]")));
        }
        if n < 3 {
            return Err(Error::Input(format!("grid needs n >= 3 nodes, got {n}")));
        }
        let spacing = (right - left) / (n - 1) as f64;
        Ok(Grid1D { left, right, n, spacing })
    }

    /// Coordinate of node `i`.
    pub fn node(&self, i: usize) -> f64 {
        self.left + i as f64 * self.spacing
    }

    /// All node coordinates.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Trapezoid quadrature weight of node `i` (spacing included).
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i == self.n - 1 {
            0.5 * self.spacing
        } else {
            self.spacing
        }
    }

    /// Trapezoid quadrature of nodal samples.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (i, v) in values.iter().enumerate() {
            acc += self.weight(i) * v;
        }
        acc
    }
}

/// An eigenvalue with its grid-sampled eigenvector and solver residual.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenResult {
    /// Eigenvalue.
    pub value: f64,
    /// Eigenvector samples, unit-normalized, global sign fixed to positive mean.
    pub vector: Vec<f64>,
    /// Euclidean residual `‖A v − value·v‖₂` in the solver basis.
    pub residual: f64,
}

/// Outcome summary of an energy descent run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DescentReport {
    /// Final energy value.
    pub energy: f64,
    /// Accepted iterations performed.
    pub iterations: usize,
    /// Final (projected) gradient norm.
    pub grad_norm: f64,
    /// Whether the gradient tolerance was reached.
    pub converged: bool,
}

/// Result of a bracketed scalar minimization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarMin {
    /// Approximate minimizer.
    pub x: f64,
    /// Function value at `x`.
    pub f: f64,
    /// Set when the minimum sits at a bracket endpoint (caller should widen).
    pub boundary: bool,
}

/// Pivoted LU factorization of a general tridiagonal matrix.
///
/// Row interchanges make the factorization stable for the nearly singular
/// shifted systems that inverse iteration produces; underflowing pivots are
/// replaced by a tiny multiple of the matrix scale so a solve always exists.
pub struct TridiagLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swap: Vec<bool>,
}

impl TridiagLu {
    /// Factors the matrix with subdiagonal `sub`, diagonal `diag`,
    /// superdiagonal `sup`.
    pub fn factor(sub: &[f64], diag: &[f64], sup: &[f64]) -> Result<Self> {
        let n = diag.len();
        if n < 2 || sub.len() != n - 1 || sup.len() != n - 1 {
            return Err(Error::Input(format!(
                "tridiagonal bands mismatched: diag {n}, sub {}, sup {}",
                sub.len(),
                sup.len()
            )));
        }
        let mut scale: f64 = 0.0;
        for &v in diag.iter().chain(sub).chain(sup) {
            if !v.is_finite() {
                return Err(Error::Input("non-finite matrix entry".into()));
            }
            scale = scale.max(v.abs());
        }
        let tiny = f64::EPSILON * scale.max(1.0);

        let mut dl = sub.to_vec();
        let mut d = diag.to_vec();
        let mut du = sup.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swap = vec![false; n - 1];

        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                } else {
                    dl[i] = 0.0;
                }
                if i < n - 2 {
                    du2[i] = 0.0;
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - fact * d[i + 1];
                if i < n - 2 {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swap[i] = true;
            }
        }
        for pivot in d.iter_mut() {
            if pivot.abs() < tiny {
                *pivot = if *pivot < 0.0 { -tiny } else { tiny };
            }
        }
        Ok(TridiagLu { dl, d, du, du2, swap })
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.d.len();
        debug_assert_eq!(b.len(), n);
        for i in 0..n - 1 {
            if !self.swap[i] {
                b[i + 1] -= self.dl[i] * b[i];
            } else {
                let tmp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = tmp - self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y = A x` for a symmetric tridiagonal matrix.
fn sym_tridiag_mul(diag: &[f64], offdiag: &[f64], x: &[f64], y: &mut [f64]) {
    let n = diag.len();
    for i in 0..n {
        let mut acc = diag[i] * x[i];
        if i > 0 {
            acc += offdiag[i - 1] * x[i - 1];
        }
        if i + 1 < n {
            acc += offdiag[i] * x[i + 1];
        }
        y[i] = acc;
    }
}

fn check_sym_tridiag(diag: &[f64], offdiag: &[f64], tol: f64) -> Result<()> {
    if diag.len() < 3 {
        return Err(Error::Input(format!("matrix needs n >= 3, got {}", diag.len())));
    }
    if offdiag.len() != diag.len() - 1 {
        return Err(Error::Input(format!(
            "offdiagonal length {} does not match diagonal length {}",
            offdiag.len(),
            diag.len()
        )));
    }
    if diag.iter().chain(offdiag).any(|v| !v.is_finite()) {
        return Err(Error::Input("non-finite matrix entry".into()));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Input(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// Gershgorin bounds: (lower bound of the spectrum, matrix scale).
fn gershgorin(diag: &[f64], offdiag: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut scale: f64 = 0.0;
    for i in 0..n {
        let mut r = 0.0;
        if i > 0 {
            r += offdiag[i - 1].abs();
        }
        if i + 1 < n {
            r += offdiag[i].abs();
        }
        lo = lo.min(diag[i] - r);
        scale = scale.max(diag[i].abs() + r);
    }
    (lo, scale)
}

/// Fixes the global sign of `v` so its mean is positive.
fn orient(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    let flip = if s != 0.0 {
        s < 0.0
    } else {
        v.iter().cloned().fold(0.0_f64, |m, x| if x.abs() > m.abs() { x } else { m }) < 0.0
    };
    if flip {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// Shifted inverse iteration targeting one eigenpair.
///
/// The shift starts strictly below the spectrum (so the smallest eigenvalue
/// is the nearest one) and is raised to `rayleigh − residual`, which provably
/// stays at or below the target eigenvalue for a symmetric matrix. With
/// `deflate` set, iterates are re-orthogonalized against those vectors,
/// steering the iteration to the smallest eigenvalue of the complement.
fn inverse_iteration(
    diag: &[f64],
    offdiag: &[f64],
    tol: f64,
    deflate: &[&[f64]],
    shift0: f64,
) -> Result<EigenResult> {
    let n = diag.len();
    let (_, scale) = gershgorin(diag, offdiag);
    // Numerical floor: a residual below ~eps*scale is not attainable in f64.
    let target = tol.max(32.0 * f64::EPSILON * scale.max(1.0));

    // Plain runs start from all-ones. Deflated runs need a start vector with
    // no accidental symmetry (an all-ones start on a symmetric grid has no
    // overlap with odd modes), so they use fixed-seed SplitMix64 noise,
    // which is just as deterministic.
    let mut v: Vec<f64> = if deflate.is_empty() {
        vec![1.0 / (n as f64).sqrt(); n]
    } else {
        let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
        (0..n)
            .map(|_| {
                state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
                let mut z = state;
                z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
                z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
                z ^= z >> 31;
                (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
            })
            .collect()
    };
    let reproject = |v: &mut Vec<f64>| {
        for _ in 0..2 {
            for q in deflate {
                let c = dot(v, q);
                for (vi, qi) in v.iter_mut().zip(q.iter()) {
                    *vi -= c * qi;
                }
            }
        }
    };
    reproject(&mut v);
    let nv = norm2(&v);
    if nv < 1e-8 {
        // The all-ones start is (numerically) inside the deflated span;
        // fall back to an alternating start, still deterministic.
        for (i, x) in v.iter_mut().enumerate() {
            *x = if i % 2 == 0 { 1.0 } else { -1.0 };
        }
        reproject(&mut v);
    }
    let nv = norm2(&v);
    for x in v.iter_mut() {
        *x /= nv;
    }

    let mut sigma = shift0;
    let mut lu = shifted_lu(diag, offdiag, sigma)?;
    let mut av = vec![0.0; n];
    let mut best: Option<EigenResult> = None;

    for _ in 0..200 {
        let mut w = v.clone();
        lu.solve_in_place(&mut w);
        reproject(&mut w);
        let nw = norm2(&w);
        if !nw.is_finite() || nw == 0.0 {
            return Err(Error::Convergence("inverse iteration produced a degenerate iterate".into()));
        }
        for x in w.iter_mut() {
            *x /= nw;
        }
        sym_tridiag_mul(diag, offdiag, &w, &mut av);
        let rho = dot(&w, &av);
        let mut res = 0.0;
        for i in 0..n {
            let r = av[i] - rho * w[i];
            res += r * r;
        }
        let res = res.sqrt();
        v = w;
        if best.as_ref().map_or(true, |b| res < b.residual) {
            best = Some(EigenResult { value: rho, vector: v.clone(), residual: res });
        }
        if res <= target {
            let mut out = best.unwrap();
            orient(&mut out.vector);
            return Ok(out);
        }
        // Raise the shift, staying at or below the targeted eigenvalue.
        let new_sigma = rho - res;
        if new_sigma > sigma {
            sigma = new_sigma;
            lu = shifted_lu(diag, offdiag, sigma)?;
        }
    }
    let b = best.unwrap();
    Err(Error::Convergence(format!(
        "inverse iteration stalled: best value {:.16e}, residual {:.3e} > target {:.3e}",
        b.value, b.residual, target
    )))
}

fn shifted_lu(diag: &[f64], offdiag: &[f64], sigma: f64) -> Result<TridiagLu> {
    let shifted: Vec<f64> = diag.iter().map(|d| d - sigma).collect();
    TridiagLu::factor(offdiag, &shifted, offdiag)
}

/// Diagonal `±1` similarity making every off-diagonal entry nonpositive.
///
/// The spectrum is unchanged and eigenvectors map entrywise through the
/// signs. In the gauged matrix the ground vector is entrywise nonnegative
/// (Perron-Frobenius), so the all-ones start cannot be near-orthogonal to
/// it and the shift updates cannot capture an interior eigenvalue.
fn sign_gauge(offdiag: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut signs = Vec::with_capacity(offdiag.len() + 1);
    signs.push(1.0_f64);
    let mut gauged = offdiag.to_vec();
    for (i, o) in offdiag.iter().enumerate() {
        signs.push(if *o > 0.0 { -signs[i] } else { signs[i] });
        gauged[i] = -o.abs();
    }
    (signs, gauged)
}

fn ungauge(result: &mut EigenResult, signs: &[f64]) {
    for (v, s) in result.vector.iter_mut().zip(signs) {
        *v *= s;
    }
    orient(&mut result.vector);
}

/// Smallest eigenpair of a symmetric tridiagonal matrix.
///
/// Deterministic: all-ones start vector, Gershgorin initial shift, and a
/// sign gauge that makes off-diagonal signs immaterial. The returned vector
/// is unit-normalized with positive mean; the residual is
/// `‖A v − λ v‖₂ ≤ max(tol, numerical floor)`.
pub fn smallest_eigenpair(diag: &[f64], offdiag: &[f64], tol: f64) -> Result<EigenResult> {
    check_sym_tridiag(diag, offdiag, tol)?;
    let (lo, scale) = gershgorin(diag, offdiag);
    let shift0 = lo - 1e-3 * scale.max(1.0).sqrt().min(scale.max(1.0));
    let (signs, gauged) = sign_gauge(offdiag);
    let mut out = inverse_iteration(diag, &gauged, tol, &[], shift0)?;
    ungauge(&mut out, &signs);
    Ok(out)
}

/// Second-smallest eigenpair via one deflation step against `ground`.
pub fn second_eigenpair(
    diag: &[f64],
    offdiag: &[f64],
    ground: &EigenResult,
    tol: f64,
) -> Result<EigenResult> {
    check_sym_tridiag(diag, offdiag, tol)?;
    if ground.vector.len() != diag.len() {
        return Err(Error::Input(format!(
            "ground vector length {} does not match matrix size {}",
            ground.vector.len(),
            diag.len()
        )));
    }
    let (signs, gauged) = sign_gauge(offdiag);
    let gauged_ground: Vec<f64> =
        ground.vector.iter().zip(&signs).map(|(v, s)| v * s).collect();
    let mut out = inverse_iteration(diag, &gauged, tol, &[&gauged_ground], ground.value)?;
    ungauge(&mut out, &signs);
    Ok(out)
}

/// Brent minimization of `f` on the bracket `(lo, hi)`.
///
/// Golden-section/parabolic hybrid; `tol` is the x-tolerance. A minimizer
/// that lands within `2·tol`-scale of an endpoint sets the `boundary` flag
/// so the caller can widen the bracket.
pub fn minimize_scalar<F: FnMut(f64) -> f64>(
    mut f: F,
    bracket: (f64, f64),
    tol: f64,
) -> Result<ScalarMin> {
    let (lo, hi) = bracket;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::Input(format!("bracket endpoints must be finite: ({lo}, {hi})")));
    }
    if !(lo < hi) {
        return Err(Error::Input(format!("bracket needs lo < hi, got ({lo}, {hi})")));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Input(format!("tolerance must be positive, got {tol}")));
    }
    const CGOLD: f64 = 0.381_966_011_250_105_1;
    const ZEPS: f64 = 1e-14;
    let mut eval = |x: f64| -> Result<f64> {
        let y = f(x);
        if y.is_nan() {
            Err(Error::Input(format!("objective returned NaN at x = {x}")))
        } else {
            Ok(y)
        }
    };

    let (mut a, mut b) = (lo, hi);
    let mut x = a + CGOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = eval(x)?;
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;

    for _ in 0..200 {
        let xm = 0.5 * (a + b);
        let tol1 = tol * x.abs() + ZEPS;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut use_golden = true;
        if e.abs() > tol1 {
            // Parabolic fit through (x, w, v).
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            e = d;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if xm >= x { tol1 } else { -tol1 };
                }
                use_golden = false;
            }
        }
        if use_golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + if d >= 0.0 { tol1 } else { -tol1 } };
        let fu = eval(u)?;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    let edge = 2.0 * (tol * x.abs() + tol);
    let boundary = (x - lo) <= edge || (hi - x) <= edge;
    Ok(ScalarMin { x, f: fx, boundary })
}

const LBFGS_MEMORY: usize = 8;
const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

/// Minimizes an energy functional by limited-memory quasi-Newton descent.
///
/// `energy_and_gradient` fills the gradient slice and returns the energy.
/// Stops when the Euclidean gradient norm drops to `tol`. Backtracking
/// (Armijo) line search keeps the energy non-increasing per accepted step.
/// Returns the report plus the final state; non-convergence is reported via
/// `converged = false`, not an error.
pub fn minimize_energy<F>(
    energy_and_gradient: F,
    init: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(DescentReport, Vec<f64>)>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    minimize_energy_projected(energy_and_gradient, |_: &mut [f64]| {}, init, tol, max_iter)
}

/// [`minimize_energy`] with a projection applied after every trial step.
///
/// The convergence measure becomes the projected-gradient norm
/// `‖x − P(x − g)‖₂`, which coincides with `‖g‖₂` for the identity
/// projection and vanishes at constrained stationary points.
pub fn minimize_energy_projected<F, P>(
    mut energy_and_gradient: F,
    mut project: P,
    init: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(DescentReport, Vec<f64>)>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
    P: FnMut(&mut [f64]),
{
    if init.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("non-finite entry in initial state".into()));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Input(format!("tolerance must be positive, got {tol}")));
    }
    let n = init.len();
    let mut x = init.to_vec();
    project(&mut x);
    let mut g = vec![0.0; n];
    let mut fx = energy_and_gradient(&x, &mut g);
    if !fx.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("energy or gradient non-finite at initial state".into()));
    }

    let mut pg = vec![0.0; n];
    let proj_grad_norm = |x: &[f64], g: &[f64], pg: &mut Vec<f64>, project: &mut P| -> f64 {
        pg.copy_from_slice(x);
        for i in 0..x.len() {
            pg[i] -= g[i];
        }
        project(pg);
        let mut acc = 0.0;
        for i in 0..x.len() {
            let d = x[i] - pg[i];
            acc += d * d;
        }
        acc.sqrt()
    };
    let mut gnorm = proj_grad_norm(&x, &g, &mut pg, &mut project);

    let mut s_mem: VecDeque<Vec<f64>> = VecDeque::new();
    let mut y_mem: VecDeque<Vec<f64>> = VecDeque::new();
    let mut rho_mem: VecDeque<f64> = VecDeque::new();
    let mut dir = vec![0.0; n];
    let mut xn = vec![0.0; n];
    let mut gn = vec![0.0; n];
    let mut iterations = 0usize;
    let mut converged = gnorm <= tol;

    while !converged && iterations < max_iter {
        // Two-loop recursion for dir = -H*g.
        dir.copy_from_slice(&g);
        let k = s_mem.len();
        let mut alpha = vec![0.0; k];
        for j in (0..k).rev() {
            alpha[j] = rho_mem[j] * dot(&s_mem[j], &dir);
            for (di, yi) in dir.iter_mut().zip(y_mem[j].iter()) {
                *di -= alpha[j] * yi;
            }
        }
        if k > 0 {
            let yy = dot(&y_mem[k - 1], &y_mem[k - 1]);
            let sy = 1.0 / rho_mem[k - 1];
            if yy > 0.0 {
                let h0 = sy / yy;
                for di in dir.iter_mut() {
                    *di *= h0;
                }
            }
        }
        for j in 0..k {
            let beta = rho_mem[j] * dot(&y_mem[j], &dir);
            for (di, si) in dir.iter_mut().zip(s_mem[j].iter()) {
                *di += (alpha[j] - beta) * si;
            }
        }
        for di in dir.iter_mut() {
            *di = -*di;
        }
        let mut dg = dot(&dir, &g);
        if !(dg < -1e-14 * norm2(&dir) * gnorm.max(1e-300)) {
            // Not a descent direction: restart from steepest descent.
            s_mem.clear();
            y_mem.clear();
            rho_mem.clear();
            for (di, gi) in dir.iter_mut().zip(g.iter()) {
                *di = -gi;
            }
            dg = -dot(&g, &g);
            if dg == 0.0 {
                converged = true;
                break;
            }
        }

        let mut t = if iterations == 0 { (1.0 / norm2(&dir).max(1e-12)).min(1.0) } else { 1.0 };
        let mut accepted = false;
        for _ in 0..MAX_BACKTRACKS {
            for i in 0..n {
                xn[i] = x[i] + t * dir[i];
            }
            project(&mut xn);
            let fn_ = energy_and_gradient(&xn, &mut gn);
            // Armijo on the realized (projected) step.
            let mut gs = 0.0;
            for i in 0..n {
                gs += g[i] * (xn[i] - x[i]);
            }
            if fn_.is_finite() && fn_ <= fx + ARMIJO_C1 * gs && gs < 0.0 {
                let mut sy = 0.0;
                let mut ss = 0.0;
                let mut yy = 0.0;
                for i in 0..n {
                    let si = xn[i] - x[i];
                    let yi = gn[i] - g[i];
                    sy += si * yi;
                    ss += si * si;
                    yy += yi * yi;
                }
                if sy > 1e-12 * ss.sqrt() * yy.sqrt() {
                    let mut s = vec![0.0; n];
                    let mut yv = vec![0.0; n];
                    for i in 0..n {
                        s[i] = xn[i] - x[i];
                        yv[i] = gn[i] - g[i];
                    }
                    if s_mem.len() == LBFGS_MEMORY {
                        s_mem.pop_front();
                        y_mem.pop_front();
                        rho_mem.pop_front();
                    }
                    rho_mem.push_back(1.0 / sy);
                    s_mem.push_back(s);
                    y_mem.push_back(yv);
                }
                core::mem::swap(&mut x, &mut xn);
                core::mem::swap(&mut g, &mut gn);
                fx = fn_;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // Line search failure: report the best state found so far.
            return Ok((
                DescentReport { energy: fx, iterations, grad_norm: gnorm, converged: false },
                x,
            ));
        }
        iterations += 1;
        gnorm = proj_grad_norm(&x, &g, &mut pg, &mut project);
        converged = gnorm <= tol;
    }

    Ok((DescentReport { energy: fx, iterations, grad_norm: gnorm, converged }, x))
}
