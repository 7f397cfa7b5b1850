//! Discrete spatial operators: one-sided and transverse-averaged differences,
//! the regularized curvature, the three upwind gradient magnitudes, and the
//! slope limiter.
//!
//! Every operator is exact on affine fields. Per-node entry points exist for
//! tests and diagnostics; whole-field sweeps are used by the time steppers.

use crate::grid::{Field, GridSpec};
use crate::{Error, Result};
use rayon::prelude::*;

/// Regularization and switching constants of the curvature discretization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilParams {
    /// Curvature regularization `eps` in `sqrt(eps^2 + |Du|^2)`.
    pub eps: f64,
    /// Slope threshold below which the central difference in the gradient
    /// factor is replaced by the larger one-sided slope.
    pub rho: f64,
}

impl StencilParams {
    pub fn new(eps: f64, rho: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::Config(format!("eps must be positive, got {eps}")));
        }
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::Config(format!("rho must be positive, got {rho}")));
        }
        Ok(Self { eps, rho })
    }

    /// The values used throughout the grid experiments.
    pub fn default_params() -> Self {
        Self {
            eps: 1e-3,
            rho: 1e-2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    #[inline]
    fn offset(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// Slope-limiter variant for the second-order upwind differences.
///
/// `Printed` keeps the literal branch `p if |p| < q, else q`; `Minmod` is the
/// standard sign-checking minmod, exposed so both readings can be compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Limiter {
    #[default]
    Printed,
    Minmod,
}

impl Limiter {
    #[inline]
    pub fn apply(self, p: f64, q: f64) -> f64 {
        match self {
            Limiter::Printed => limiter_mu(p, q),
            Limiter::Minmod => limiter_minmod(p, q),
        }
    }
}

/// The literal limiter branch: `p` if `|p| < q`, otherwise `q` (including
/// `q < 0`, where the condition is always false).
#[inline]
pub fn limiter_mu(p: f64, q: f64) -> f64 {
    if p.abs() < q {
        p
    } else {
        q
    }
}

/// Sign-checking minmod: zero on disagreeing signs, else the smaller slope.
#[inline]
pub fn limiter_minmod(p: f64, q: f64) -> f64 {
    if p * q <= 0.0 {
        0.0
    } else if p.abs() < q.abs() {
        p
    } else {
        q
    }
}

/// Read access to grid values with the clamped (Neumann) index extension.
///
/// Implemented by [`Field`] directly and by [`PaddedField`], which resolves
/// the clamping once up front so stencil sweeps read contiguously.
pub trait NodeAccess: Sync {
    fn index_radius(&self) -> i32;
    fn spacing(&self) -> f64;
    /// Value at `(i, j)`; indices up to two cells outside the grid clamp.
    fn at(&self, i: i32, j: i32) -> f64;
}

impl NodeAccess for Field {
    #[inline]
    fn index_radius(&self) -> i32 {
        self.spec().index_radius()
    }

    #[inline]
    fn spacing(&self) -> f64 {
        self.spec().spacing()
    }

    #[inline]
    fn at(&self, i: i32, j: i32) -> f64 {
        self.neumann_get(i, j)
    }
}

/// A field copied into a buffer with a two-cell clamped border, so interior
/// stencil reads need no index clamping.
pub struct PaddedField {
    n: i32,
    width: usize,
    dx: f64,
    values: Vec<f64>,
}

impl PaddedField {
    pub fn from_field(f: &Field) -> Self {
        let mut p = Self::empty(f.spec());
        p.refill(f);
        p
    }

    pub(crate) fn empty(spec: GridSpec) -> Self {
        let n = spec.index_radius();
        let width = 2 * n as usize + 5;
        Self {
            n,
            width,
            dx: spec.spacing(),
            values: vec![0.0; width * width],
        }
    }

    /// The padded buffer, `(2N + 5)^2` values in row-major order.
    pub(crate) fn raw(&self) -> &[f64] {
        &self.values
    }

    /// Overwrites the buffer with `f` plus its clamped border.
    pub(crate) fn refill(&mut self, f: &Field) {
        let n = self.n;
        assert_eq!(f.spec().index_radius(), n);
        let w = self.width;
        let per_axis = 2 * n as usize + 1;
        let src = f.values();
        for jj in 0..w {
            let j_src = (jj as i32 - 2 - n).clamp(-n, n);
            let src_row = &src[(j_src + n) as usize * per_axis..][..per_axis];
            let dst_row = &mut self.values[jj * w..][..w];
            dst_row[2..2 + per_axis].copy_from_slice(src_row);
            dst_row[0] = src_row[0];
            dst_row[1] = src_row[0];
            dst_row[w - 2] = src_row[per_axis - 1];
            dst_row[w - 1] = src_row[per_axis - 1];
        }
    }
}

impl NodeAccess for PaddedField {
    #[inline]
    fn index_radius(&self) -> i32 {
        self.n
    }

    #[inline]
    fn spacing(&self) -> f64 {
        self.dx
    }

    #[inline]
    fn at(&self, i: i32, j: i32) -> f64 {
        debug_assert!(i.abs() <= self.n + 2 && j.abs() <= self.n + 2);
        self.values[(j + self.n + 2) as usize * self.width + (i + self.n + 2) as usize]
    }
}

/// One-sided forward difference along `axis`.
#[inline]
pub fn diff_fwd<A: NodeAccess + ?Sized>(u: &A, axis: Axis, i: i32, j: i32) -> f64 {
    let dxi = 1.0 / u.spacing();
    match axis {
        Axis::X1 => (u.at(i + 1, j) - u.at(i, j)) * dxi,
        Axis::X2 => (u.at(i, j + 1) - u.at(i, j)) * dxi,
    }
}

/// One-sided backward difference along `axis`.
#[inline]
pub fn diff_bwd<A: NodeAccess + ?Sized>(u: &A, axis: Axis, i: i32, j: i32) -> f64 {
    let dxi = 1.0 / u.spacing();
    match axis {
        Axis::X1 => (u.at(i, j) - u.at(i - 1, j)) * dxi,
        Axis::X2 => (u.at(i, j) - u.at(i, j - 1)) * dxi,
    }
}

/// Central difference along `axis` averaged with its transverse-shifted copy:
/// the derivative approximation at the face picked out by `sign`.
#[inline]
pub fn diff_transverse_avg<A: NodeAccess + ?Sized>(
    u: &A,
    axis: Axis,
    sign: Sign,
    i: i32,
    j: i32,
) -> f64 {
    let half_dxi = 0.5 / u.spacing();
    let s = sign.offset();
    match axis {
        Axis::X1 => {
            ((u.at(i + 1, j + s) + u.at(i + 1, j)) * 0.5
                - (u.at(i - 1, j + s) + u.at(i - 1, j)) * 0.5)
                * half_dxi
        }
        Axis::X2 => {
            ((u.at(i + s, j + 1) + u.at(i, j + 1)) * 0.5
                - (u.at(i + s, j - 1) + u.at(i, j - 1)) * 0.5)
                * half_dxi
        }
    }
}

/// Normalized x1-slope on the vertical face between nodes `i` and `i + 1`:
/// equals both `P+` at `(i, j)` and `P-` at `(i + 1, j)`.
#[inline]
pub(crate) fn p_face<A: NodeAccess + ?Sized>(u: &A, eps: f64, i: i32, j: i32) -> f64 {
    let dxi = 1.0 / u.spacing();
    let d = (u.at(i + 1, j) - u.at(i, j)) * dxi;
    let tv = ((u.at(i + 1, j + 1) + u.at(i, j + 1)) * 0.5
        - (u.at(i + 1, j - 1) + u.at(i, j - 1)) * 0.5)
        * (0.5 * dxi);
    d / (eps * eps + d * d + tv * tv).sqrt()
}

/// Normalized x2-slope on the horizontal face between nodes `j` and `j + 1`:
/// equals both `Q+` at `(i, j)` and `Q-` at `(i, j + 1)`.
#[inline]
pub(crate) fn q_face<A: NodeAccess + ?Sized>(u: &A, eps: f64, i: i32, j: i32) -> f64 {
    let dxi = 1.0 / u.spacing();
    let d = (u.at(i, j + 1) - u.at(i, j)) * dxi;
    let tv = ((u.at(i + 1, j + 1) + u.at(i + 1, j)) * 0.5
        - (u.at(i - 1, j + 1) + u.at(i - 1, j)) * 0.5)
        * (0.5 * dxi);
    d / (eps * eps + d * d + tv * tv).sqrt()
}

/// Regularized curvature at a node: divergence of the normalized slopes.
#[inline]
pub fn curvature_at<A: NodeAccess + ?Sized>(u: &A, params: StencilParams, i: i32, j: i32) -> f64 {
    let dxi = 1.0 / u.spacing();
    let eps = params.eps;
    (p_face(u, eps, i, j) - p_face(u, eps, i - 1, j)) * dxi
        + (q_face(u, eps, i, j) - q_face(u, eps, i, j - 1)) * dxi
}

#[inline]
fn grad_hat_axis(dp: f64, dm: f64, central: f64, rho: f64) -> f64 {
    let c = central.abs();
    if c >= rho {
        c
    } else {
        dp.abs().max(dm.abs())
    }
}

/// Gradient magnitude multiplying the curvature: central differences with a
/// switch to the larger one-sided slope where the central slope drops below
/// `rho` (so critical points of `u` do not silence the curvature term).
#[inline]
pub fn grad_hat_at<A: NodeAccess + ?Sized>(u: &A, params: StencilParams, i: i32, j: i32) -> f64 {
    let dxi = 1.0 / u.spacing();
    let cx = (u.at(i + 1, j) - u.at(i - 1, j)) * (0.5 * dxi);
    let cy = (u.at(i, j + 1) - u.at(i, j - 1)) * (0.5 * dxi);
    let ax = grad_hat_axis(
        (u.at(i + 1, j) - u.at(i, j)) * dxi,
        (u.at(i, j) - u.at(i - 1, j)) * dxi,
        cx,
        params.rho,
    );
    let ay = grad_hat_axis(
        (u.at(i, j + 1) - u.at(i, j)) * dxi,
        (u.at(i, j) - u.at(i, j - 1)) * dxi,
        cy,
        params.rho,
    );
    (ax * ax + ay * ay).sqrt()
}

#[inline]
fn grad_tilde_axis(
    um2: f64,
    um1: f64,
    u0: f64,
    up1: f64,
    up2: f64,
    dx: f64,
    dxi: f64,
    limiter: Limiter,
) -> f64 {
    let dp = (up1 - u0) * dxi;
    let dm = (u0 - um1) * dxi;
    let dxi2 = dxi * dxi;
    let d2c = (up1 - 2.0 * u0 + um1) * dxi2;
    let d2p = (up2 - 2.0 * up1 + u0) * dxi2;
    let d2m = (um2 - 2.0 * um1 + u0) * dxi2;
    let tp = dp - 0.5 * dx * limiter.apply(d2p, d2c);
    let tm = dm + 0.5 * dx * limiter.apply(d2m, d2c);
    tp.max(0.0).max((-tm).max(0.0))
}

/// Second-order upwind gradient magnitude (the eikonal term of the forced
/// mean curvature scheme). Local maxima report zero slope, so pure spreading
/// preserves the supremum.
#[inline]
pub fn grad_tilde_at<A: NodeAccess + ?Sized>(u: &A, limiter: Limiter, i: i32, j: i32) -> f64 {
    let dx = u.spacing();
    let dxi = 1.0 / dx;
    let ax = grad_tilde_axis(
        u.at(i - 2, j),
        u.at(i - 1, j),
        u.at(i, j),
        u.at(i + 1, j),
        u.at(i + 2, j),
        dx,
        dxi,
        limiter,
    );
    let ay = grad_tilde_axis(
        u.at(i, j - 2),
        u.at(i, j - 1),
        u.at(i, j),
        u.at(i, j + 1),
        u.at(i, j + 2),
        dx,
        dxi,
        limiter,
    );
    (ax * ax + ay * ay).sqrt()
}

/// First-order upwind gradient magnitude used by the truncated inverse mean
/// curvature scheme.
#[inline]
pub fn grad_bar_at<A: NodeAccess + ?Sized>(u: &A, i: i32, j: i32) -> f64 {
    let dxi = 1.0 / u.spacing();
    let ax = {
        let dp = (u.at(i + 1, j) - u.at(i, j)) * dxi;
        let dm = (u.at(i, j) - u.at(i - 1, j)) * dxi;
        dp.max(0.0).max(-dm.min(0.0))
    };
    let ay = {
        let dp = (u.at(i, j + 1) - u.at(i, j)) * dxi;
        let dm = (u.at(i, j) - u.at(i, j - 1)) * dxi;
        dp.max(0.0).max(-dm.min(0.0))
    };
    (ax * ax + ay * ay).sqrt()
}

/// Runs `per_node` at every node, in parallel over rows. The output is
/// bitwise independent of the parallel partition because each node is
/// computed by a single closure call.
fn sweep(spec: GridSpec, per_node: impl Fn(i32, i32) -> f64 + Sync) -> Field {
    let n = spec.index_radius();
    let w = spec.nodes_per_axis();
    let mut out = Field::zeros(spec);
    out.values_mut()
        .par_chunks_mut(w)
        .enumerate()
        .for_each(|(jr, row)| {
            let j = jr as i32 - n;
            for (ir, v) in row.iter_mut().enumerate() {
                *v = per_node(ir as i32 - n, j);
            }
        });
    out
}

/// Regularized curvature at every node.
pub fn curvature_reg(field: &Field, params: StencilParams) -> Field {
    let padded = PaddedField::from_field(field);
    sweep(field.spec(), |i, j| curvature_at(&padded, params, i, j))
}

/// `|D^ u|` at every node.
pub fn grad_hat(field: &Field, params: StencilParams) -> Field {
    let padded = PaddedField::from_field(field);
    sweep(field.spec(), |i, j| grad_hat_at(&padded, params, i, j))
}

/// `|D~ u|` at every node.
pub fn grad_tilde(field: &Field, limiter: Limiter) -> Field {
    let padded = PaddedField::from_field(field);
    sweep(field.spec(), |i, j| grad_tilde_at(&padded, limiter, i, j))
}

/// `|D- u|` at every node.
pub fn grad_bar(field: &Field) -> Field {
    let padded = PaddedField::from_field(field);
    sweep(field.spec(), |i, j| grad_bar_at(&padded, i, j))
}

/// Largest `|D~ u|` over all nodes.
pub fn grad_tilde_max(field: &Field, limiter: Limiter) -> f64 {
    grad_tilde(field, limiter).sup()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use proptest::prelude::*;

    /// Spacing 0.25 and quarter-integer data keep all differences exact.
    fn dyadic_spec() -> GridSpec {
        GridSpec::new(1.0, 4).unwrap()
    }

    fn params() -> StencilParams {
        StencilParams::new(1e-3, 1e-2).unwrap()
    }

    #[test]
    fn one_sided_differences_on_linear_and_quadratic() {
        let spec = dyadic_spec();
        let lin = Field::from_fn(spec, |x, _| 3.0 * x);
        for i in -3..=3 {
            for j in -3..=3 {
                assert_eq!(diff_fwd(&lin, Axis::X1, i, j), 3.0);
                assert_eq!(diff_bwd(&lin, Axis::X1, i, j), 3.0);
                assert_eq!(diff_fwd(&lin, Axis::X2, i, j), 0.0);
            }
        }

        let c = Field::constant(spec, 2.5);
        assert_eq!(diff_fwd(&c, Axis::X1, 0, 0), 0.0);
        assert_eq!(diff_bwd(&c, Axis::X2, 1, -2), 0.0);

        let quad = Field::from_fn(spec, |x, _| x * x);
        let dx = spec.spacing();
        assert_eq!(diff_fwd(&quad, Axis::X1, 0, 0), dx);
        assert_eq!(diff_bwd(&quad, Axis::X1, 0, 0), -dx);
    }

    #[test]
    fn transverse_avg_linear_cases() {
        let spec = dyadic_spec();
        let lin = Field::from_fn(spec, |x, _| 5.0 * x);
        assert_eq!(diff_transverse_avg(&lin, Axis::X1, Sign::Plus, 0, 0), 5.0);
        assert_eq!(diff_transverse_avg(&lin, Axis::X1, Sign::Minus, 1, -1), 5.0);

        let perp = Field::from_fn(spec, |_, y| y);
        assert_eq!(diff_transverse_avg(&perp, Axis::X1, Sign::Plus, 0, 0), 0.0);
        assert_eq!(diff_transverse_avg(&perp, Axis::X1, Sign::Minus, 0, 0), 0.0);
    }

    #[test]
    fn transverse_avg_bilinear_against_expansion() {
        // u = x1 x2 at the origin: brute-force expansion of the 6-point
        // stencil gives dx/2 (the x1-derivative of u at height j + 1/2).
        let spec = dyadic_spec();
        let dx = spec.spacing();
        let u = Field::from_fn(spec, |x, y| x * y);
        let brute = |s: f64| {
            let uv = |i: i32, j: i32| (i as f64 * dx) * (j as f64 * dx);
            ((uv(1, s as i32) + uv(1, 0)) / 2.0 - (uv(-1, s as i32) + uv(-1, 0)) / 2.0) / (2.0 * dx)
        };
        let got = diff_transverse_avg(&u, Axis::X1, Sign::Plus, 0, 0);
        assert!((got - brute(1.0)).abs() < 1e-15);
        assert!((got - dx / 2.0).abs() < 1e-15);
        let got_m = diff_transverse_avg(&u, Axis::X1, Sign::Minus, 0, 0);
        assert!((got_m - (-dx / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn curvature_vanishes_on_constant_and_affine() {
        let spec = dyadic_spec();
        let c = Field::constant(spec, 7.0);
        let k = curvature_reg(&c, params());
        assert!(k.values().iter().all(|v| *v == 0.0));

        let aff = Field::from_fn(spec, |x, y| 0.5 * x - 0.25 * y + 2.0);
        let k = curvature_reg(&aff, params());
        let n = spec.index_radius();
        for i in -n + 1..=n - 1 {
            for j in -n + 1..=n - 1 {
                assert_eq!(k.get(i, j), 0.0, "at ({i}, {j})");
            }
        }
    }

    #[test]
    fn curvature_paraboloid_matches_expansion() {
        // u = -|x|^2 / 2 at the origin with the experiment constants. The
        // oracle below expands the twelve-point stencil by hand.
        let spec = GridSpec::new(2.56, 128).unwrap();
        let p = StencilParams::new(1e-3, 1e-2).unwrap();
        let u = Field::from_fn(spec, |x, y| -(x * x + y * y) / 2.0);
        let dx = spec.spacing();

        let uv = |i: f64, j: f64| -((i * dx).powi(2) + (j * dx).powi(2)) / 2.0;
        let dplus = (uv(1.0, 0.0) - uv(0.0, 0.0)) / dx;
        let dminus = -(uv(-1.0, 0.0) - uv(0.0, 0.0)) / dx;
        let tv_p = ((uv(1.0, 1.0) + uv(1.0, 0.0)) / 2.0 - (uv(1.0, -1.0) + uv(1.0, 0.0)) / 2.0)
            / (2.0 * dx);
        // The transverse averages vanish by symmetry here; keep the term in
        // the expansion anyway.
        let p_plus = dplus / (p.eps * p.eps + dplus * dplus + tv_p * tv_p).sqrt();
        let p_minus = dminus / (p.eps * p.eps + dminus * dminus + tv_p * tv_p).sqrt();
        let expected = 2.0 * (p_plus - p_minus) / dx; // x2 contributes identically

        let got = curvature_at(&u, p, 0, 0);
        assert!(
            (got - expected).abs() < 1e-10,
            "got {got}, expansion {expected}"
        );
        // Closed form of the same expansion.
        let closed = -2.0 / (p.eps * p.eps + dx * dx / 4.0).sqrt();
        assert!((got - closed).abs() < 1e-9);
    }

    #[test]
    fn grad_hat_switch_cases() {
        let spec = dyadic_spec();
        let p = params();
        let lin = Field::from_fn(spec, |x, y| 0.75 * x - 0.5 * y);
        let expect = (0.75f64 * 0.75 + 0.5 * 0.5).sqrt();
        assert!((grad_hat_at(&lin, p, 0, 0) - expect).abs() < 1e-15);

        // u = x^2 at i = 0: central difference is zero, below rho, so the
        // switch picks max(dx, dx) = dx on the x1 axis.
        let quad = Field::from_fn(spec, |x, _| x * x);
        let dx = spec.spacing();
        assert_eq!(grad_hat_at(&quad, p, 0, 0), dx);

        let c = Field::constant(spec, 3.0);
        assert_eq!(grad_hat_at(&c, p, 0, 0), 0.0);
    }

    #[test]
    fn limiter_branch_table() {
        assert_eq!(limiter_mu(0.5, 1.0), 0.5);
        assert_eq!(limiter_mu(2.0, 1.0), 1.0);
        assert_eq!(limiter_mu(0.0, 0.0), 0.0);
        assert_eq!(limiter_mu(-0.5, 1.0), -0.5);
        assert_eq!(limiter_mu(0.5, -1.0), -1.0); // |p| < q false for q < 0

        assert_eq!(limiter_minmod(0.5, 1.0), 0.5);
        assert_eq!(limiter_minmod(2.0, 1.0), 1.0);
        assert_eq!(limiter_minmod(0.5, -1.0), 0.0);
        assert_eq!(limiter_minmod(-0.5, -1.0), -0.5);
    }

    #[test]
    fn grad_tilde_exact_on_affine_and_constant() {
        let spec = dyadic_spec();
        let aff = Field::from_fn(spec, |x, y| 0.5 * x + 0.25 * y);
        let expect = (0.5f64 * 0.5 + 0.25 * 0.25).sqrt();
        let n = spec.index_radius();
        for i in -n + 2..=n - 2 {
            for j in -n + 2..=n - 2 {
                assert!((grad_tilde_at(&aff, Limiter::Printed, i, j) - expect).abs() < 1e-15);
            }
        }
        let c = Field::constant(spec, 1.0);
        assert_eq!(grad_tilde_at(&c, Limiter::Printed, 0, 0), 0.0);
    }

    #[test]
    fn grad_tilde_kink_against_expansion() {
        // u = |x1| at the kink. Expansion: the centered second difference is
        // 2/dx, both shifted ones vanish, mu(0, 2/dx) = 0, so the corrected
        // slopes stay +-1 and the upwind magnitude is 1.
        let spec = dyadic_spec();
        let u = Field::from_fn(spec, |x, _| x.abs());
        let dx = spec.spacing();
        let dxi = 1.0 / dx;
        let dp = 1.0;
        let dm = -1.0;
        let d2c = (dx - 0.0 + dx) * dxi * dxi;
        let tp: f64 = dp - 0.5 * dx * limiter_mu(0.0, d2c);
        let tm = dm + 0.5 * dx * limiter_mu(0.0, d2c);
        let expected = tp.max(0.0).max((-tm).max(0.0));
        assert_eq!(expected, 1.0);
        assert_eq!(grad_tilde_at(&u, Limiter::Printed, 0, 0), expected);
    }

    #[test]
    fn grad_bar_cases() {
        let spec = dyadic_spec();
        let lin = Field::from_fn(spec, |x, y| 0.5 * x + 0.25 * y);
        let expect = (0.5f64 * 0.5 + 0.25 * 0.25).sqrt();
        assert!((grad_bar_at(&lin, 0, 0) - expect).abs() < 1e-15);

        let ridge = Field::from_fn(spec, |x, _| -x.abs());
        assert_eq!(grad_bar_at(&ridge, 0, 0), 0.0);

        let valley = Field::from_fn(spec, |x, _| x.abs());
        assert_eq!(grad_bar_at(&valley, 0, 0), 1.0);
    }

    #[test]
    fn grad_tilde_equals_grad_bar_without_curvature() {
        // Fields with vanishing second differences: both upwind gradients
        // reduce to the same one-sided slopes.
        let spec = dyadic_spec();
        let aff = Field::from_fn(spec, |x, y| 0.5 * x - 0.75 * y + 0.25);
        let n = spec.index_radius();
        for i in -n + 2..=n - 2 {
            for j in -n + 2..=n - 2 {
                assert_eq!(
                    grad_tilde_at(&aff, Limiter::Printed, i, j),
                    grad_bar_at(&aff, i, j)
                );
            }
        }
    }

    #[test]
    fn padded_field_matches_neumann_access() {
        let spec = GridSpec::new(1.3, 6).unwrap();
        let f = Field::from_fn(spec, |x, y| (x * 3.0).sin() + (y * 2.0).cos());
        let p = PaddedField::from_field(&f);
        let n = spec.index_radius();
        for i in -n - 2..=n + 2 {
            for j in -n - 2..=n + 2 {
                assert_eq!(p.at(i, j), f.neumann_get(i, j), "at ({i}, {j})");
            }
        }
    }

    #[test]
    fn sweeps_match_per_node_everywhere() {
        let spec = GridSpec::new(1.0, 7).unwrap();
        let f = Field::from_fn(spec, |x, y| (3.0 * x).sin() * (2.0 * y).cos() + 0.3 * x);
        let p = params();
        let k = curvature_reg(&f, p);
        let gh = grad_hat(&f, p);
        let gt = grad_tilde(&f, Limiter::Printed);
        let gb = grad_bar(&f);
        let n = spec.index_radius();
        for i in -n..=n {
            for j in -n..=n {
                assert_eq!(k.get(i, j), curvature_at(&f, p, i, j));
                assert_eq!(gh.get(i, j), grad_hat_at(&f, p, i, j));
                assert_eq!(gt.get(i, j), grad_tilde_at(&f, Limiter::Printed, i, j));
                assert_eq!(gb.get(i, j), grad_bar_at(&f, i, j));
            }
        }
    }

    #[test]
    fn translation_equivariance_interior() {
        let spec = GridSpec::new(1.0, 8).unwrap();
        let f = Field::from_fn(spec, |x, y| (2.0 * x + 0.3).sin() + (1.7 * y).cos());
        let n = spec.index_radius();
        let mut shifted = Field::zeros(spec);
        for j in -n..=n {
            for i in -n..=n {
                shifted.set(i, j, f.neumann_get(i - 1, j));
            }
        }
        let p = params();
        // Away from the boundary influence region the shifted stencil output
        // equals the output of the shifted input.
        for i in -n + 4..=n - 4 {
            for j in -n + 4..=n - 4 {
                assert_eq!(
                    curvature_at(&shifted, p, i, j),
                    curvature_at(&f, p, i - 1, j)
                );
                assert_eq!(
                    grad_tilde_at(&shifted, Limiter::Printed, i, j),
                    grad_tilde_at(&f, Limiter::Printed, i - 1, j)
                );
                assert_eq!(grad_bar_at(&shifted, i, j), grad_bar_at(&f, i - 1, j));
            }
        }
    }

    proptest! {
        #[test]
        fn affine_exactness_random_coefficients(a1 in -3.0f64..3.0, a2 in -3.0f64..3.0, b in -2.0f64..2.0) {
            let spec = GridSpec::new(1.1, 5).unwrap();
            let f = Field::from_fn(spec, |x, y| a1 * x + a2 * y + b);
            let p = params();
            let mag = (a1 * a1 + a2 * a2).sqrt();
            let n = spec.index_radius();
            for i in -n + 2..=n - 2 {
                for j in -n + 2..=n - 2 {
                    prop_assert!(curvature_at(&f, p, i, j).abs() < 1e-12);
                    prop_assert!((grad_tilde_at(&f, Limiter::Printed, i, j) - mag).abs() < 1e-12);
                    prop_assert!((grad_bar_at(&f, i, j) - mag).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn curvature_bounded_and_bar_clipped(values in proptest::collection::vec(-10.0f64..10.0, 81)) {
            let spec = GridSpec::new(1.0, 4).unwrap();
            let f = Field::from_values(spec, values).unwrap();
            let p = params();
            let dx = spec.spacing();
            let n = spec.index_radius();
            for i in -n..=n {
                for j in -n..=n {
                    // |P|, |Q| <= 1 gives the stated curvature bound.
                    prop_assert!(curvature_at(&f, p, i, j).abs() <= 8.0 / dx + 1e-9);
                    // Upwind clipping never amplifies the one-sided slopes.
                    let bar = grad_bar_at(&f, i, j);
                    let bound = |axis: Axis| {
                        diff_fwd(&f, axis, i, j).abs().max(diff_bwd(&f, axis, i, j).abs())
                    };
                    let bx = bound(Axis::X1);
                    let by = bound(Axis::X2);
                    prop_assert!(bar <= (bx * bx + by * by).sqrt() + 1e-12);
                }
            }
        }
    }
}
