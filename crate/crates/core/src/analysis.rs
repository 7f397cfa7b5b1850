//! Asymptotic-speed estimation, error metrics, least-squares fitting,
//! structural-invariant monitors, and level-set radius extraction.

use crate::grid::Field;
use crate::stencils::{grad_tilde_max, Limiter};
use crate::{Error, Result};

/// Time-stamped diagnostics of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedSample {
    pub t: f64,
    /// Domain-mean growth rate `mean(u) / t`.
    pub c_delta: f64,
    /// Supremum `m(t) = sup u`.
    pub m_sup: f64,
    /// Largest upwind gradient magnitude over the grid.
    pub grad_max: f64,
}

/// Strictly increasing, positive-time sequence of [`SpeedSample`]s.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpeedSeries {
    samples: Vec<SpeedSample>,
}

impl SpeedSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, sample: SpeedSample) -> Result<()> {
        if !(sample.t > 0.0) {
            return Err(Error::Config(format!(
                "speed samples need t > 0, got {}",
                sample.t
            )));
        }
        if let Some(last) = self.samples.last() {
            if sample.t <= last.t {
                return Err(Error::Config("sample times must strictly increase".into()));
            }
        }
        self.samples.push(sample);
        Ok(())
    }

    /// Records the standard diagnostics of a field snapshot at `t > 0`.
    pub fn record(&mut self, t: f64, u: &Field, limiter: Limiter) -> Result<()> {
        self.push(SpeedSample {
            t,
            c_delta: speed_estimate(u, t),
            m_sup: u.sup(),
            grad_max: grad_tilde_max(u, limiter),
        })
    }

    pub fn samples(&self) -> &[SpeedSample] {
        &self.samples
    }

    pub fn last(&self) -> Option<&SpeedSample> {
        self.samples.last()
    }
}

/// Domain-mean growth rate `mean(u) / t`; `t` must be positive.
pub fn speed_estimate(u: &Field, t: f64) -> f64 {
    assert!(t > 0.0, "speed estimate needs t > 0");
    u.mean() / t
}

/// Normalized `L^2` distance of `u(., t)/t` from the constant `c_target`:
/// `|| u/t - c ||_2 / (2R)^2`.
pub fn l2_error(u: &Field, t: f64, c_target: f64) -> f64 {
    assert!(t > 0.0, "l2 error needs t > 0");
    let dx = u.spec().spacing();
    let sum_sq: f64 = u
        .values()
        .iter()
        .map(|v| {
            let d = v / t - c_target;
            d * d
        })
        .sum();
    let two_r = 2.0 * u.spec().half_width();
    sum_sq.sqrt() * dx / (two_r * two_r)
}

/// A sampled pair violating `m(t + s) <= m(t) + m(s) + tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubadditivityViolation {
    pub t: f64,
    pub s: f64,
    /// `m(t + s) - m(t) - m(s)`, before tolerance.
    pub excess: f64,
}

/// Checks subadditivity of `m(t) = sup u` over every sampled pair whose sum
/// is also a sample time, with tolerance `rel_tol * m(t + s) + abs_tol`.
/// An empty report is a pass.
pub fn subadditivity_report(
    series: &SpeedSeries,
    rel_tol: f64,
    abs_tol: f64,
) -> Vec<SubadditivityViolation> {
    let samples = series.samples();
    let mut violations = Vec::new();
    for (a, sa) in samples.iter().enumerate() {
        for sb in samples.iter().skip(a) {
            let sum = sa.t + sb.t;
            // Match t + s against the sample grid with a relative slop.
            let Some(sc) = samples
                .iter()
                .find(|s| (s.t - sum).abs() <= 1e-9 * sum.max(1.0))
            else {
                continue;
            };
            let excess = sc.m_sup - sa.m_sup - sb.m_sup;
            if excess > rel_tol * sc.m_sup + abs_tol {
                violations.push(SubadditivityViolation {
                    t: sa.t,
                    s: sb.t,
                    excess,
                });
            }
        }
    }
    violations
}

/// Ordinary least-squares line through `points`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub n_points: usize,
    pub residual_l2: f64,
}

pub fn fit_line(points: &[(f64, f64)]) -> Result<LineFit> {
    if points.len() < 2 {
        return Err(Error::DegenerateFit);
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residual_l2 = points
        .iter()
        .map(|p| {
            let r = p.1 - (slope * p.0 + intercept);
            r * r
        })
        .sum::<f64>()
        .sqrt();
    Ok(LineFit {
        slope,
        intercept,
        n_points: points.len(),
        residual_l2,
    })
}

/// Radius at which `u` crosses `level` moving outward from the origin,
/// linearly interpolated along each of the four axis rays and averaged.
pub fn level_radius(u: &Field, level: f64) -> Result<f64> {
    let n = u.spec().index_radius();
    let dx = u.spec().spacing();
    let rays: [fn(i32) -> (i32, i32); 4] =
        [|k| (k, 0), |k| (-k, 0), |k| (0, k), |k| (0, -k)];
    let mut total = 0.0;
    for ray in rays {
        let mut found = None;
        for k in 0..n {
            let (i0, j0) = ray(k);
            let (i1, j1) = ray(k + 1);
            let a = u.get(i0, j0) - level;
            let b = u.get(i1, j1) - level;
            if a == 0.0 {
                found = Some(k as f64 * dx);
                break;
            }
            if a * b < 0.0 || b == 0.0 {
                let frac = a / (a - b);
                found = Some((k as f64 + frac) * dx);
                break;
            }
        }
        match found {
            Some(r) => total += r,
            None => return Err(Error::NoCrossing { level }),
        }
    }
    Ok(total / 4.0)
}

/// Like [`level_radius`] but restricted to one ray, for diagnostics.
pub fn level_radius_rays(u: &Field, level: f64) -> Result<[f64; 4]> {
    let n = u.spec().index_radius();
    let dx = u.spec().spacing();
    let rays: [fn(i32) -> (i32, i32); 4] =
        [|k| (k, 0), |k| (-k, 0), |k| (0, k), |k| (0, -k)];
    let mut out = [0.0; 4];
    for (ridx, ray) in rays.iter().enumerate() {
        let mut found = None;
        for k in 0..n {
            let (i0, j0) = ray(k);
            let (i1, j1) = ray(k + 1);
            let a = u.get(i0, j0) - level;
            let b = u.get(i1, j1) - level;
            if a == 0.0 {
                found = Some(k as f64 * dx);
                break;
            }
            if a * b < 0.0 || b == 0.0 {
                found = Some((k as f64 + a / (a - b)) * dx);
                break;
            }
        }
        out[ridx] = found.ok_or(Error::NoCrossing { level })?;
    }
    Ok(out)
}

/// Inputs the monitors need about the run being checked.
#[derive(Debug, Clone, Copy)]
pub struct MonitorConfig {
    /// Source maximum `M_f`.
    pub m_f: f64,
    /// Source Lipschitz constant; `None` disables the gradient monitor
    /// (discontinuous sources).
    pub lip_f: Option<f64>,
    /// Space dimension, for the late-time gradient constant.
    pub dim: u32,
    /// Grid spacing, setting the discretization floor of the tolerances.
    pub dx: f64,
}

/// One monitored bound: `pass` with the worst margin observed (positive
/// margins mean slack remained).
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub worst_margin: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct MonitorReport {
    pub checks: Vec<CheckOutcome>,
}

impl MonitorReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Uniform-in-time gradient constant from the a-priori estimate
/// `|Du|^2/2 - C <= n Df . Du` with `C = 4(2M + 1)^2`.
pub fn late_gradient_bound(m_f: f64, lip_f: f64, dim: u32) -> f64 {
    let n = dim as f64;
    let c = 4.0 * (2.0 * m_f + 1.0) * (2.0 * m_f + 1.0);
    n * lip_f + (n * n * lip_f * lip_f + 2.0 * c).sqrt()
}

/// Runs the structural monitors over sampled fields from a zero start:
///
/// * `0 <= u <= M_f t + 10 dx` at every node,
/// * step rate `sup |u^k - u^{k-1}|/dt <= M_f + 0.1 (1 + M_f)` past warm-up,
/// * subadditivity of `m(t)` with tolerance `0.05 m + 10 dx`,
/// * gradient growth `max |D~u| <= min(lip_f t, C_late) + 0.1`.
///
/// Monitors report; they never abort.
pub fn monitors(
    samples: &[(f64, Field)],
    series: &SpeedSeries,
    max_rate_after_warmup: Option<f64>,
    cfg: &MonitorConfig,
) -> MonitorReport {
    let mut report = MonitorReport::default();
    let growth_tol = 10.0 * cfg.dx;

    // Height bounds.
    {
        let mut worst: f64 = f64::INFINITY;
        let mut detail = String::new();
        for (t, u) in samples {
            let hi = cfg.m_f * t + growth_tol;
            for v in u.values() {
                // Slack below zero only for accumulated rounding.
                let margin = (hi - v).min(v + 1e-12 * (1.0 + cfg.m_f * t));
                if margin < worst {
                    worst = margin;
                    detail = format!("tightest at t = {t}");
                }
            }
        }
        report.checks.push(CheckOutcome {
            name: "height_bounds",
            pass: worst >= 0.0,
            worst_margin: worst,
            detail,
        });
    }

    // Time-Lipschitz rate.
    if let Some(rate) = max_rate_after_warmup {
        let bound = cfg.m_f + 0.1 * (1.0 + cfg.m_f);
        report.checks.push(CheckOutcome {
            name: "time_lipschitz_rate",
            pass: rate <= bound,
            worst_margin: bound - rate,
            detail: format!("max rate {rate}, bound {bound}"),
        });
    }

    // Monotone growth and subadditivity of the supremum.
    {
        let mut worst = f64::INFINITY;
        for w in series.samples().windows(2) {
            worst = worst.min(w[1].m_sup - w[0].m_sup + growth_tol);
        }
        report.checks.push(CheckOutcome {
            name: "sup_monotone",
            pass: worst >= 0.0,
            worst_margin: worst,
            detail: String::new(),
        });

        let violations = subadditivity_report(series, 0.05, growth_tol);
        report.checks.push(CheckOutcome {
            name: "sup_subadditivity",
            pass: violations.is_empty(),
            worst_margin: violations
                .iter()
                .map(|v| -v.excess)
                .fold(f64::INFINITY, f64::min),
            detail: format!("{} violating pairs", violations.len()),
        });
    }

    // Spatial gradient growth and late-time boundedness.
    if let Some(lip) = cfg.lip_f {
        let late = late_gradient_bound(cfg.m_f, lip, cfg.dim);
        let mut worst = f64::INFINITY;
        let mut detail = String::new();
        for s in series.samples() {
            let bound = (lip * s.t).min(late) + 0.1;
            let margin = bound - s.grad_max;
            if margin < worst {
                worst = margin;
                detail = format!("tightest at t = {}, grad {}, bound {bound}", s.t, s.grad_max);
            }
        }
        report.checks.push(CheckOutcome {
            name: "space_lipschitz",
            pass: worst >= 0.0,
            worst_margin: worst,
            detail,
        });
    }

    report
}

/// Nodewise comparison monitor for nested sources: requires
/// `u_small <= u_large + 10 dx` at every matched sample.
pub fn monitor_comparison(
    samples_small: &[(f64, Field)],
    samples_large: &[(f64, Field)],
    dx: f64,
) -> CheckOutcome {
    let mut worst = f64::INFINITY;
    let mut detail = String::new();
    let tol = 10.0 * dx;
    for ((ta, ua), (tb, ub)) in samples_small.iter().zip(samples_large) {
        debug_assert!((ta - tb).abs() < 1e-12);
        for (a, b) in ua.values().iter().zip(ub.values()) {
            let margin = b + tol - a;
            if margin < worst {
                worst = margin;
                detail = format!("tightest at t = {ta}");
            }
        }
    }
    CheckOutcome {
        name: "source_monotonicity",
        pass: worst >= 0.0,
        worst_margin: worst,
        detail,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn series_from(m: impl Fn(f64) -> f64, times: &[f64]) -> SpeedSeries {
        let mut s = SpeedSeries::new();
        for &t in times {
            s.push(SpeedSample {
                t,
                c_delta: m(t) / t,
                m_sup: m(t),
                grad_max: 0.0,
            })
            .unwrap();
        }
        s
    }

    #[test]
    fn speed_estimate_examples() {
        let spec = GridSpec::new(1.0, 8).unwrap();
        let t = 2.5;
        let u = Field::constant(spec, 0.7 * t);
        assert!((speed_estimate(&u, t) - 0.7).abs() < 1e-15);
        assert_eq!(speed_estimate(&Field::zeros(spec), 1.0), 0.0);
        // Linearity and 1/t scaling.
        let mut u2 = u.clone();
        u2.add_scaled(&u, 1.0);
        assert!((speed_estimate(&u2, t) - 1.4).abs() < 1e-15);
        assert!((speed_estimate(&u, 2.0 * t) - 0.35).abs() < 1e-15);
    }

    #[test]
    #[should_panic]
    fn speed_estimate_rejects_zero_time() {
        let spec = GridSpec::new(1.0, 2).unwrap();
        speed_estimate(&Field::zeros(spec), 0.0);
    }

    #[test]
    fn l2_error_examples() {
        let spec = GridSpec::new(2.56, 128).unwrap();
        let t = 4.0;
        let c = 0.6;
        let exact = Field::constant(spec, c * t);
        assert!(l2_error(&exact, t, c) < 1e-15);

        let zero = Field::zeros(spec);
        let want = c * 257.0 * spec.spacing() / (2.0 * 2.56 * 2.0 * 2.56);
        assert!((l2_error(&zero, t, c) - want).abs() < 1e-12);
    }

    #[test]
    fn subadditivity_examples() {
        let times: Vec<f64> = (1..=16).map(|k| k as f64 * 0.5).collect();
        let linear = series_from(|t| 0.7 * t, &times);
        assert!(subadditivity_report(&linear, 0.0, 1e-12).is_empty());

        let sqrt = series_from(|t| t.sqrt(), &times);
        assert!(subadditivity_report(&sqrt, 0.0, 0.0).is_empty());

        let quadratic = series_from(|t| t * t, &times);
        assert!(!subadditivity_report(&quadratic, 0.0, 1e-6).is_empty());
    }

    #[test]
    fn fit_line_examples() {
        let pts: Vec<(f64, f64)> = (0..5).map(|k| (k as f64, 2.0 * k as f64 + 1.0)).collect();
        let fit = fit_line(&pts).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!(fit.residual_l2 < 1e-12);

        let fit = fit_line(&[(0.0, 0.0), (1.0, 1.0)]).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-15);
        assert!(fit.intercept.abs() < 1e-15);

        assert_eq!(fit_line(&[(1.0, 2.0)]), Err(Error::DegenerateFit));
        assert_eq!(
            fit_line(&[(1.0, 2.0), (1.0, 3.0)]),
            Err(Error::DegenerateFit)
        );
    }

    #[test]
    fn level_radius_examples() {
        let spec = GridSpec::new(2.56, 64).unwrap();
        let dx = spec.spacing();

        let cone = Field::from_fn(spec, |x, y| -(x * x + y * y).sqrt());
        let r = level_radius(&cone, -1.0).unwrap();
        assert!((r - 1.0).abs() <= dx);

        let dome = Field::from_fn(spec, |x, y| 1.0 - (x * x + y * y));
        let r = level_radius(&dome, 0.0).unwrap();
        assert!((r - 1.0).abs() <= dx);

        // Radially symmetric data: the four rays agree to machine precision.
        let rays = level_radius_rays(&dome, 0.0).unwrap();
        for w in rays.windows(2) {
            assert!((w[0] - w[1]).abs() < 1e-12);
        }

        // Level never reached.
        assert!(level_radius(&dome, 10.0).is_err());
    }

    #[test]
    fn monitors_pass_fabricated_exact_series_and_flag_violations() {
        let spec = GridSpec::new(1.0, 64).unwrap();
        let m_f = 1.5;
        let cfg = MonitorConfig {
            m_f,
            lip_f: Some(1.0),
            dim: 2,
            dx: spec.spacing(),
        };
        let times = [0.5, 1.0, 1.5, 2.0];
        let mut samples = Vec::new();
        let mut series = SpeedSeries::new();
        for &t in &times {
            let u = Field::constant(spec, m_f * t);
            series.record(t, &u, Limiter::Printed).unwrap();
            samples.push((t, u));
        }
        let report = monitors(&samples, &series, Some(m_f), &cfg);
        assert!(report.pass(), "{report:?}");
        // The height bound is met with equality up to the tolerance.
        let bound_check = report
            .checks
            .iter()
            .find(|c| c.name == "height_bounds")
            .unwrap();
        assert!((bound_check.worst_margin - 10.0 * cfg.dx).abs() < 1e-12);

        // One node above M t + tolerance flips the check.
        let mut bad = samples.clone();
        let t_last = times[times.len() - 1];
        bad.last_mut()
            .unwrap()
            .1
            .set(0, 0, m_f * t_last + 1.0);
        let report = monitors(&bad, &series, Some(m_f), &cfg);
        assert!(!report.pass());

        // A step rate beyond the bound flips the rate check.
        let report = monitors(&samples, &series, Some(m_f + 1.0), &cfg);
        assert!(!report.pass());
    }

    #[test]
    fn comparison_monitor_flags_inversions() {
        let spec = GridSpec::new(1.0, 64).unwrap();
        let lo = vec![(1.0, Field::constant(spec, 1.0))];
        let hi = vec![(1.0, Field::constant(spec, 2.0))];
        assert!(monitor_comparison(&lo, &hi, spec.spacing()).pass);
        assert!(!monitor_comparison(&hi, &lo, spec.spacing()).pass);
    }
}
