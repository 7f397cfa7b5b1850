//! Explicit time steppers for the three growth PDEs, the nucleation /
//! propagation splitting driver, and the radially reduced 1D solver.
//!
//! All steppers are pure functions from the previous field to the next one.
//! Sweeps parallelize over rows; every node is computed by exactly one
//! closure call, so results are bitwise independent of the thread count.

use crate::grid::{Field, GridSpec};
use crate::stencils::{Limiter, PaddedField, StencilParams};
use crate::{Error, Result};
use rayon::prelude::*;

/// Growth law selector with its scheme-specific constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    /// Forced mean curvature flow: `u_t = |D^u| ktilde + |D~u| + f`.
    Fmcf,
    /// Truncated inverse mean curvature flow:
    /// `u_t = |D-u| / chi(-ktilde) + f` with `chi` clamping to
    /// `[lambda, lambda_max]`.
    ImcfTruncated { lambda: f64, lambda_max: f64 },
    /// Constant-speed spreading: `u_t = delta |D~u| + f`.
    Eikonal { delta: f64 },
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Fmcf => "fmcf",
            Scheme::ImcfTruncated { .. } => "imcf_truncated",
            Scheme::Eikonal { .. } => "eikonal",
        }
    }
}

/// Time step, spatial constants, and limiter choice for a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub scheme: Scheme,
    pub dt: f64,
    pub stencil: StencilParams,
    pub limiter: Limiter,
}

impl SolverConfig {
    pub fn new(scheme: Scheme, dt: f64, stencil: StencilParams) -> Result<Self> {
        let cfg = Self {
            scheme,
            dt,
            stencil,
            limiter: Limiter::Printed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_limiter(mut self, limiter: Limiter) -> Self {
        self.limiter = limiter;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!(
                "time step must be positive, got {}",
                self.dt
            )));
        }
        match self.scheme {
            Scheme::Fmcf => {}
            Scheme::ImcfTruncated { lambda, lambda_max } => {
                if !(lambda.is_finite() && lambda_max.is_finite() && 0.0 < lambda && lambda < lambda_max)
                {
                    return Err(Error::Config(format!(
                        "curvature cutoffs need 0 < lambda < Lambda, got {lambda}, {lambda_max}"
                    )));
                }
            }
            Scheme::Eikonal { delta } => {
                if !(delta.is_finite() && delta > 0.0) {
                    return Err(Error::Config(format!(
                        "eikonal speed delta must be positive, got {delta}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Clamp to `[lambda, lambda_max]`; callers guarantee `lambda < lambda_max`.
#[inline]
pub fn chi(r: f64, lambda: f64, lambda_max: f64) -> f64 {
    debug_assert!(lambda < lambda_max);
    r.max(lambda).min(lambda_max)
}

/// Number of full steps of size `dt` taken by a run of length `t`.
pub fn step_count(t: f64, dt: f64) -> usize {
    if t <= 0.0 {
        return 0;
    }
    let ratio = t / dt;
    (ratio * (1.0 + 1e-12) + 1e-9).floor() as usize
}

/// Scratch buffers reused across steps of one run.
///
/// The row kernels below are slice-indexed restatements of the per-node
/// operators in [`stencils`]; they evaluate the same expressions in the same
/// order, so their output is bitwise equal to the per-node path (a unit test
/// pins this down).
struct StepCore {
    spec: GridSpec,
    padded: PaddedField,
    /// Normalized x1 slopes on vertical faces, rows of `2N + 2` values.
    p_faces: Vec<f64>,
    /// Normalized x2 slopes on horizontal faces, `2N + 2` rows.
    q_faces: Vec<f64>,
}

struct RowStats {
    max_rate: f64,
    finite: bool,
}

/// Five consecutive padded rows centered on the output row, plus the cached
/// face rows it needs.
struct RowView<'a> {
    rm2: &'a [f64],
    rm1: &'a [f64],
    r0: &'a [f64],
    rp1: &'a [f64],
    rp2: &'a [f64],
    p_row: &'a [f64],
    q_lo: &'a [f64],
    q_hi: &'a [f64],
    frow: &'a [f64],
}

#[inline(always)]
fn grad_hat_cols(r: &RowView<'_>, c: usize, dxi: f64, rho: f64) -> f64 {
    let cx = (r.r0[c + 1] - r.r0[c - 1]) * (0.5 * dxi);
    let ax = if cx.abs() >= rho {
        cx.abs()
    } else {
        let dp = (r.r0[c + 1] - r.r0[c]) * dxi;
        let dm = (r.r0[c] - r.r0[c - 1]) * dxi;
        dp.abs().max(dm.abs())
    };
    let cy = (r.rp1[c] - r.rm1[c]) * (0.5 * dxi);
    let ay = if cy.abs() >= rho {
        cy.abs()
    } else {
        let dp = (r.rp1[c] - r.r0[c]) * dxi;
        let dm = (r.r0[c] - r.rm1[c]) * dxi;
        dp.abs().max(dm.abs())
    };
    (ax * ax + ay * ay).sqrt()
}

#[inline(always)]
fn grad_tilde_axis_cols(
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

#[inline(always)]
fn grad_tilde_cols(r: &RowView<'_>, c: usize, dx: f64, dxi: f64, limiter: Limiter) -> f64 {
    let ax = grad_tilde_axis_cols(
        r.r0[c - 2],
        r.r0[c - 1],
        r.r0[c],
        r.r0[c + 1],
        r.r0[c + 2],
        dx,
        dxi,
        limiter,
    );
    let ay = grad_tilde_axis_cols(
        r.rm2[c],
        r.rm1[c],
        r.r0[c],
        r.rp1[c],
        r.rp2[c],
        dx,
        dxi,
        limiter,
    );
    (ax * ax + ay * ay).sqrt()
}

#[inline(always)]
fn grad_bar_cols(r: &RowView<'_>, c: usize, dxi: f64) -> f64 {
    let ax = {
        let dp = (r.r0[c + 1] - r.r0[c]) * dxi;
        let dm = (r.r0[c] - r.r0[c - 1]) * dxi;
        dp.max(0.0).max(-dm.min(0.0))
    };
    let ay = {
        let dp = (r.rp1[c] - r.r0[c]) * dxi;
        let dm = (r.r0[c] - r.rm1[c]) * dxi;
        dp.max(0.0).max(-dm.min(0.0))
    };
    (ax * ax + ay * ay).sqrt()
}

/// Curvature from the cached face rows: `ir` is the zero-based column.
#[inline(always)]
fn kappa_cols(r: &RowView<'_>, ir: usize, dxi: f64) -> f64 {
    (r.p_row[ir + 1] - r.p_row[ir]) * dxi + (r.q_hi[ir] - r.q_lo[ir]) * dxi
}

impl StepCore {
    fn new(spec: GridSpec) -> Self {
        let w = spec.nodes_per_axis();
        Self {
            spec,
            padded: PaddedField::empty(spec),
            p_faces: vec![0.0; (w + 1) * w],
            q_faces: vec![0.0; (w + 1) * w],
        }
    }

    fn padded_row(&self, jr_out: i32) -> &[f64] {
        let wp = self.spec.nodes_per_axis() + 4;
        let row = (jr_out + 2) as usize;
        &self.padded.raw()[row * wp..][..wp]
    }

    fn compute_faces(&mut self, eps: f64) {
        let w = self.spec.nodes_per_axis();
        let wp = w + 1;
        let dxi = 1.0 / self.spec.spacing();
        let eps2 = eps * eps;
        let padded = &self.padded;
        let pad_w = w + 4;
        let raw = padded.raw();

        // Vertical faces: P at (i + 1/2, j) from rows j - 1, j, j + 1.
        self.p_faces
            .par_chunks_mut(wp)
            .enumerate()
            .for_each(|(jr, out_row)| {
                let rm = &raw[(jr + 1) * pad_w..][..pad_w];
                let r0 = &raw[(jr + 2) * pad_w..][..pad_w];
                let rp = &raw[(jr + 3) * pad_w..][..pad_w];
                for (fi, v) in out_row.iter_mut().enumerate() {
                    let c = fi + 1; // left node of the face in padded columns
                    let d = (r0[c + 1] - r0[c]) * dxi;
                    let tv = ((rp[c + 1] + rp[c]) * 0.5 - (rm[c + 1] + rm[c]) * 0.5) * (0.5 * dxi);
                    *v = d / (eps2 + d * d + tv * tv).sqrt();
                }
            });

        // Horizontal faces: Q at (i, j + 1/2) from rows j and j + 1.
        self.q_faces
            .par_chunks_mut(w)
            .enumerate()
            .for_each(|(fj, out_row)| {
                let r0 = &raw[(fj + 1) * pad_w..][..pad_w];
                let rp = &raw[(fj + 2) * pad_w..][..pad_w];
                for (ir, v) in out_row.iter_mut().enumerate() {
                    let c = ir + 2;
                    let d = (rp[c] - r0[c]) * dxi;
                    let tv = ((rp[c + 1] + r0[c + 1]) * 0.5 - (rp[c - 1] + r0[c - 1]) * 0.5)
                        * (0.5 * dxi);
                    *v = d / (eps2 + d * d + tv * tv).sqrt();
                }
            });
    }

    /// One explicit step `out = u + dt * rhs(u)`. Returns the largest
    /// absolute update rate and whether every output value is finite.
    fn step(
        &mut self,
        u: &Field,
        source: &Field,
        cfg: &SolverConfig,
        dt: f64,
        out: &mut Field,
    ) -> (f64, bool) {
        self.padded.refill(u);
        if !matches!(cfg.scheme, Scheme::Eikonal { .. }) {
            self.compute_faces(cfg.stencil.eps);
        }
        let w = self.spec.nodes_per_axis();
        let wp = w + 1;
        let dx = self.spec.spacing();
        let dxi = 1.0 / dx;
        let core = &*self;
        let fv = source.values();
        let scheme = cfg.scheme;
        let rho = cfg.stencil.rho;
        let limiter = cfg.limiter;

        let stats = out
            .values_mut()
            .par_chunks_mut(w)
            .enumerate()
            .map(|(jr, out_row)| {
                let jr = jr as i32;
                let view = RowView {
                    rm2: core.padded_row(jr - 2),
                    rm1: core.padded_row(jr - 1),
                    r0: core.padded_row(jr),
                    rp1: core.padded_row(jr + 1),
                    rp2: core.padded_row(jr + 2),
                    p_row: &core.p_faces[jr as usize * wp..][..wp],
                    q_lo: &core.q_faces[jr as usize * w..][..w],
                    q_hi: &core.q_faces[(jr as usize + 1) * w..][..w],
                    frow: &fv[jr as usize * w..][..w],
                };
                let mut stats = RowStats {
                    max_rate: 0.0,
                    finite: true,
                };
                match scheme {
                    Scheme::Fmcf => {
                        for (ir, v) in out_row.iter_mut().enumerate() {
                            let c = ir + 2;
                            let rhs = grad_hat_cols(&view, c, dxi, rho) * kappa_cols(&view, ir, dxi)
                                + grad_tilde_cols(&view, c, dx, dxi, limiter)
                                + view.frow[ir];
                            let next = view.r0[c] + dt * rhs;
                            *v = next;
                            stats.finite &= next.is_finite();
                            stats.max_rate = stats.max_rate.max(rhs.abs());
                        }
                    }
                    Scheme::ImcfTruncated { lambda, lambda_max } => {
                        for (ir, v) in out_row.iter_mut().enumerate() {
                            let c = ir + 2;
                            let rhs = grad_bar_cols(&view, c, dxi)
                                / chi(-kappa_cols(&view, ir, dxi), lambda, lambda_max)
                                + view.frow[ir];
                            let next = view.r0[c] + dt * rhs;
                            *v = next;
                            stats.finite &= next.is_finite();
                            stats.max_rate = stats.max_rate.max(rhs.abs());
                        }
                    }
                    Scheme::Eikonal { delta } => {
                        for (ir, v) in out_row.iter_mut().enumerate() {
                            let c = ir + 2;
                            let rhs = delta * grad_tilde_cols(&view, c, dx, dxi, limiter)
                                + view.frow[ir];
                            let next = view.r0[c] + dt * rhs;
                            *v = next;
                            stats.finite &= next.is_finite();
                            stats.max_rate = stats.max_rate.max(rhs.abs());
                        }
                    }
                }
                stats
            })
            .reduce(
                || RowStats {
                    max_rate: 0.0,
                    finite: true,
                },
                |a, b| RowStats {
                    max_rate: a.max_rate.max(b.max_rate),
                    finite: a.finite && b.finite,
                },
            );
        (stats.max_rate, stats.finite)
    }
}

fn sup_abs_finite(f: &Field) -> f64 {
    f.values()
        .iter()
        .filter(|v| v.is_finite())
        .fold(0.0f64, |m, v| m.max(v.abs()))
}

fn check_inputs(u: &Field, source: &Field, cfg: &SolverConfig) -> Result<()> {
    cfg.validate()?;
    if u.spec() != source.spec() {
        return Err(Error::Config(
            "solution and source fields must share one grid spec".into(),
        ));
    }
    Ok(())
}

fn single_step(u: &Field, source: &Field, cfg: &SolverConfig) -> Result<Field> {
    check_inputs(u, source, cfg)?;
    let mut core = StepCore::new(u.spec());
    let mut out = Field::zeros(u.spec());
    let (_, finite) = core.step(u, source, cfg, cfg.dt, &mut out);
    if !finite {
        return Err(Error::BlowUp {
            scheme: cfg.scheme.name(),
            step: 1,
            time: cfg.dt,
            sup_abs: sup_abs_finite(&out),
        });
    }
    Ok(out)
}

/// One forced mean curvature step.
pub fn step_fmcf(u: &Field, source: &Field, cfg: &SolverConfig) -> Result<Field> {
    if !matches!(cfg.scheme, Scheme::Fmcf) {
        return Err(Error::Config("step_fmcf needs an fmcf config".into()));
    }
    single_step(u, source, cfg)
}

/// One truncated inverse mean curvature step. The denominator is clamped to
/// `[lambda, lambda_max]`, so no division by zero is possible.
pub fn step_imcf_truncated(u: &Field, source: &Field, cfg: &SolverConfig) -> Result<Field> {
    if !matches!(cfg.scheme, Scheme::ImcfTruncated { .. }) {
        return Err(Error::Config(
            "step_imcf_truncated needs an imcf_truncated config".into(),
        ));
    }
    single_step(u, source, cfg)
}

/// One eikonal step, `u + dt (delta |D~u| + f)`.
pub fn step_eikonal(u: &Field, source: &Field, cfg: &SolverConfig) -> Result<Field> {
    if !matches!(cfg.scheme, Scheme::Eikonal { .. }) {
        return Err(Error::Config("step_eikonal needs an eikonal config".into()));
    }
    single_step(u, source, cfg)
}

/// Result of a completed run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub final_field: Field,
    pub steps: usize,
    /// Largest `sup |u^k - u^{k-1}| / dt` over steps past the first percent.
    pub max_rate_after_warmup: f64,
    pub wall_seconds: f64,
}

/// Marches `u0` to `t_final` with the configured fixed step, invoking
/// `observer` at every sample time with the last computed state at or before
/// it (no interpolation in time). Sample times must be sorted and lie in
/// `[0, t_final]`.
pub fn run_with_observer(
    u0: &Field,
    source: &Field,
    cfg: &SolverConfig,
    t_final: f64,
    sample_times: &[f64],
    mut observer: impl FnMut(f64, &Field),
) -> Result<RunOutcome> {
    check_inputs(u0, source, cfg)?;
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(Error::Config(format!(
            "final time must be finite and >= 0, got {t_final}"
        )));
    }
    if sample_times.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Config("sample times must be sorted".into()));
    }
    if sample_times
        .iter()
        .any(|t| !(0.0..=t_final * (1.0 + 1e-12)).contains(t))
    {
        return Err(Error::Config("sample times must lie in [0, T]".into()));
    }

    let started = std::time::Instant::now();
    let total = step_count(t_final, cfg.dt);
    let warmup = total / 100;
    let sample_steps: Vec<usize> = sample_times
        .iter()
        .map(|t| step_count(*t, cfg.dt).min(total))
        .collect();

    let mut core = StepCore::new(u0.spec());
    let mut cur = u0.clone();
    let mut next = Field::zeros(u0.spec());
    let mut max_rate: f64 = 0.0;
    let mut sample_idx = 0;
    for k in 0..=total {
        while sample_idx < sample_steps.len() && sample_steps[sample_idx] == k {
            observer(sample_times[sample_idx], &cur);
            sample_idx += 1;
        }
        if k == total {
            break;
        }
        let (rate, finite) = core.step(&cur, source, cfg, cfg.dt, &mut next);
        if !finite {
            return Err(Error::BlowUp {
                scheme: cfg.scheme.name(),
                step: k + 1,
                time: (k + 1) as f64 * cfg.dt,
                sup_abs: sup_abs_finite(&next),
            });
        }
        if k + 1 > warmup {
            max_rate = max_rate.max(rate);
        }
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(RunOutcome {
        final_field: cur,
        steps: total,
        max_rate_after_warmup: max_rate,
        wall_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Like [`run_with_observer`], additionally cloning the state at each sample
/// time.
pub fn run_sampled(
    u0: &Field,
    source: &Field,
    cfg: &SolverConfig,
    t_final: f64,
    sample_times: &[f64],
) -> Result<(Vec<(f64, Field)>, RunOutcome)> {
    let mut samples = Vec::with_capacity(sample_times.len());
    let outcome = run_with_observer(u0, source, cfg, t_final, sample_times, |t, f| {
        samples.push((t, f.clone()));
    })?;
    Ok((samples, outcome))
}

/// Alternating nucleation / propagation product: starting from `u0`, applies
/// the nucleation map `v + tau f`, then `i_steps` rounds of propagation over
/// `tau` followed by nucleation, reading the operator product right to left.
/// Propagation integrates the fmcf scheme with a zero source in
/// `ceil(tau / dt)` substeps, the last one shortened so the substep lengths
/// sum exactly to `tau`.
pub fn trotter_kato(
    u0: &Field,
    source: &Field,
    tau: f64,
    i_steps: usize,
    cfg: &SolverConfig,
) -> Result<Field> {
    check_inputs(u0, source, cfg)?;
    if !matches!(cfg.scheme, Scheme::Fmcf) {
        return Err(Error::Config(
            "the splitting driver propagates with the fmcf scheme".into(),
        ));
    }
    if !(tau.is_finite() && tau >= cfg.dt) {
        return Err(Error::Config(format!(
            "splitting interval tau = {tau} must be at least dt = {}",
            cfg.dt
        )));
    }
    let n_sub = ((tau / cfg.dt) * (1.0 - 1e-12)).ceil() as usize;
    let last_dt = tau - (n_sub - 1) as f64 * cfg.dt;

    let zero_source = Field::zeros(u0.spec());
    let mut core = StepCore::new(u0.spec());
    let mut cur = u0.clone();
    let mut scratch = Field::zeros(u0.spec());
    let mut substep = 0usize;
    cur.add_scaled(source, tau);
    for _ in 0..i_steps {
        for s in 0..n_sub {
            let dt_s = if s + 1 == n_sub { last_dt } else { cfg.dt };
            if dt_s <= 0.0 {
                continue;
            }
            let (_, finite) = core.step(&cur, &zero_source, cfg, dt_s, &mut scratch);
            substep += 1;
            if !finite {
                return Err(Error::BlowUp {
                    scheme: cfg.scheme.name(),
                    step: substep,
                    time: substep as f64 * cfg.dt,
                    sup_abs: sup_abs_finite(&scratch),
                });
            }
            std::mem::swap(&mut cur, &mut scratch);
        }
        cur.add_scaled(source, tau);
    }
    Ok(cur)
}

/// Radial samples `phi(m dr)`, `m = 0 ..= M`, for the dimension-reduced
/// solver and the value-function oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    dr: f64,
    dim: u32,
    values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(dr: f64, dim: u32, values: Vec<f64>) -> Result<Self> {
        if !(dr.is_finite() && dr > 0.0) {
            return Err(Error::Config(format!("dr must be positive, got {dr}")));
        }
        if dim < 2 {
            return Err(Error::Config(format!("dimension must be >= 2, got {dim}")));
        }
        if values.len() < 2 {
            return Err(Error::Config("a radial profile needs at least two nodes".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("radial profile values must be finite".into()));
        }
        Ok(Self { dr, dim, values })
    }

    pub fn zeros(dr: f64, dim: u32, nodes: usize) -> Result<Self> {
        Self::new(dr, dim, vec![0.0; nodes])
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_radius(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.dr
    }

    /// Linear interpolation in `r`, clamped to the tabulated range.
    pub fn interp(&self, r: f64) -> f64 {
        let m_max = self.values.len() - 1;
        let pos = (r / self.dr).clamp(0.0, m_max as f64);
        let k = (pos.floor() as usize).min(m_max - 1);
        let w = pos - k as f64;
        self.values[k] + w * (self.values[k + 1] - self.values[k])
    }
}

/// Largest stable step for the radial scheme: the origin term behaves like a
/// diffusion with coefficient `n - 1`.
pub fn radial_dt_limit(dr: f64, dim: u32) -> f64 {
    dr * dr / (2.0 * (dim as f64 - 1.0))
}

/// One explicit step of `phi_t = (n-1)/r phi_r + |phi_r| + f~`.
///
/// The advection coefficient is nonnegative, so its upwind side is the
/// forward difference; at the origin the singular term is replaced by its
/// even-extension limit `2(n-1)(phi_1 - phi_0)/dr^2`, and the outer node
/// uses backward differences only.
pub fn step_radial(phi: &RadialProfile, f_tilde: &[f64], dt: f64) -> Result<RadialProfile> {
    if f_tilde.len() != phi.values.len() {
        return Err(Error::Config(
            "radial source length must match the profile".into(),
        ));
    }
    if !(dt.is_finite() && dt > 0.0 && dt <= radial_dt_limit(phi.dr, phi.dim)) {
        return Err(Error::Config(format!(
            "radial step {dt} exceeds the stability limit {}",
            radial_dt_limit(phi.dr, phi.dim)
        )));
    }
    let dr = phi.dr;
    let a_dim = phi.dim as f64 - 1.0;
    let v = &phi.values;
    let m_max = v.len() - 1;
    let mut out = Vec::with_capacity(v.len());
    let mut finite = true;
    for m in 0..=m_max {
        let rhs = if m == 0 {
            let slope = (v[1] - v[0]) / dr;
            2.0 * a_dim * (v[1] - v[0]) / (dr * dr) + slope.max(0.0) + f_tilde[0]
        } else if m == m_max {
            let dm = (v[m] - v[m - 1]) / dr;
            a_dim / (m as f64 * dr) * dm + (-dm).max(0.0) + f_tilde[m]
        } else {
            let dp = (v[m + 1] - v[m]) / dr;
            let dm = (v[m] - v[m - 1]) / dr;
            a_dim / (m as f64 * dr) * dp + dp.max(0.0).max((-dm).max(0.0)) + f_tilde[m]
        };
        let next = v[m] + dt * rhs;
        finite &= next.is_finite();
        out.push(next);
    }
    if !finite {
        return Err(Error::BlowUp {
            scheme: "radial",
            step: 1,
            time: dt,
            sup_abs: out.iter().filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs())),
        });
    }
    Ok(RadialProfile {
        dr,
        dim: phi.dim,
        values: out,
    })
}

/// Marches the radial profile to `t_final` with fixed steps.
pub fn run_radial(
    phi0: &RadialProfile,
    f_tilde: &[f64],
    dt: f64,
    t_final: f64,
) -> Result<RadialProfile> {
    let steps = step_count(t_final, dt);
    let mut cur = phi0.clone();
    for k in 0..steps {
        cur = step_radial(&cur, f_tilde, dt).map_err(|e| match e {
            Error::BlowUp {
                scheme,
                time: _,
                sup_abs,
                ..
            } => Error::BlowUp {
                scheme,
                step: k + 1,
                time: (k + 1) as f64 * dt,
                sup_abs,
            },
            other => other,
        })?;
    }
    Ok(cur)
}
