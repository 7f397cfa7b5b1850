//! Independent ground truths: closed-form asymptotic speeds, the explicit
//! volcano profiles, the optimal-control value function of the radial
//! problem, and the expanding-circle radius ODE.
//!
//! Nothing here touches the grid steppers, so agreement between the two is a
//! genuine cross-check.

use crate::solvers::RadialProfile;
use crate::sources::SourceTerm;
use crate::{Error, Result};

/// What is known about an asymptotic speed for a given source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpeedClaim {
    Exact(f64),
    LowerBound(f64),
    Positive,
    Zero,
    Unknown,
}

/// Asymptotic speed of the forced mean curvature flow for the radial cone of
/// size `r`: `(r - 1)_+` in two dimensions.
pub fn speed_radial_cone(r: f64) -> f64 {
    assert!(r >= 0.0, "cone size must be nonnegative");
    (r - 1.0).max(0.0)
}

/// Asymptotic speed for a tabulated radial source under the forced mean
/// curvature flow: the maximum of `f~` over radii at least `n - 1`, located
/// by dense sampling of the interpolant at a tenth of the table spacing.
pub fn speed_radial(f_tilde: &RadialProfile) -> f64 {
    let critical = f_tilde.dim() as f64 - 1.0;
    let r_max = f_tilde.max_radius();
    if critical > r_max {
        return 0.0;
    }
    let fine = f_tilde.dr() / 10.0;
    let steps = ((r_max - critical) / fine).ceil() as usize;
    let mut best: f64 = 0.0;
    for k in 0..=steps {
        let r = (critical + k as f64 * fine).min(r_max);
        best = best.max(f_tilde.interp(r));
    }
    best
}

/// When the spreading velocity is bounded below by a positive constant, the
/// asymptotic speed is simply the source maximum.
pub fn speed_positive_velocity(src: &SourceTerm) -> f64 {
    src.max_value()
}

/// Partial characterization of the speed for the square cone of size `r`.
pub fn speed_claim_l1(r: f64) -> SpeedClaim {
    let sqrt2 = std::f64::consts::SQRT_2;
    if r < 1.0 {
        SpeedClaim::Zero
    } else if r == 1.0 || r == sqrt2 {
        SpeedClaim::Unknown
    } else if r < sqrt2 {
        SpeedClaim::Positive
    } else {
        SpeedClaim::LowerBound(r - sqrt2)
    }
}

/// Partial characterization of the speed for twin cones of size `r0` with
/// apex offset `r`.
pub fn speed_claim_twin(r0: f64, r: f64) -> SpeedClaim {
    if r0 > 0.5 && r0 < 1.0 {
        if r < 1.0 - r0 || r > r0 {
            SpeedClaim::Zero
        } else {
            SpeedClaim::Unknown
        }
    } else if r0 > 1.0 {
        if r == 0.0 {
            SpeedClaim::Exact(2.0 * (r0 - 1.0))
        } else if r > r0 {
            SpeedClaim::Exact(r0 - 1.0)
        } else {
            SpeedClaim::Unknown
        }
    } else {
        SpeedClaim::Unknown
    }
}

/// The explicit maximal solution of the truncated inverse flow driven by the
/// disk indicator of radius `r0`, as a function of radius and time.
///
/// Requires `lambda_max >= 1/r0` and `0 < lambda < lambda_max`. `switch_time`
/// is `log(lambda_max) - log(lambda)`.
pub fn volcano_profile(r: f64, t: f64, r0: f64, lambda: f64, lambda_max: f64) -> Result<f64> {
    if !(r0 > 0.0 && lambda > 0.0 && lambda < lambda_max) {
        return Err(Error::Config(format!(
            "volcano profile needs 0 < lambda < Lambda and R0 > 0, got R0={r0}, lambda={lambda}, Lambda={lambda_max}"
        )));
    }
    if lambda_max < 1.0 / r0 {
        return Err(Error::Config(format!(
            "volcano profile needs Lambda >= 1/R0, got Lambda={lambda_max}, 1/R0={}",
            1.0 / r0
        )));
    }
    if r < 0.0 || t < 0.0 {
        return Err(Error::Config("volcano profile needs r, t >= 0".into()));
    }
    let switch = switch_time(lambda, lambda_max);
    let value = if t < switch {
        if r <= r0 {
            t
        } else {
            (t + (r0 / r).ln()).max(0.0)
        }
    } else if r <= r0 {
        t
    } else if r <= 1.0 / lambda {
        t + (r0 / r).ln()
    } else {
        (t - lambda * r - switch).max(0.0)
    };
    Ok(value)
}

/// Time at which the inner clamp of the explicit volcano solution switches.
pub fn switch_time(lambda: f64, lambda_max: f64) -> f64 {
    lambda_max.ln() - lambda.ln()
}

/// The single-crater target in the plane: `min(t, max(0, t - log|x| + log R0))`,
/// valid for `|x| <= 1/lambda`.
pub fn fuji_field(x: (f64, f64), t: f64, r0: f64) -> f64 {
    let norm = (x.0 * x.0 + x.1 * x.1).sqrt();
    t.min((t - norm.ln() + r0.ln()).max(0.0))
}

/// The twin-crater comparison target with crater centers `+-a`. This is a
/// conjectured profile, not a proven solution; it serves as a comparison
/// target only.
pub fn twin_target(x: (f64, f64), t: f64, r0: f64, a: (f64, f64)) -> f64 {
    let d1 = ((x.0 - a.0) * (x.0 - a.0) + (x.1 - a.1) * (x.1 - a.1)).sqrt();
    let d2 = ((x.0 + a.0) * (x.0 + a.0) + (x.1 + a.1) * (x.1 + a.1)).sqrt();
    let psi1 = t - d1.ln() + r0.ln();
    let psi2 = t - d2.ln() + r0.ln();
    t.min(psi1.max(psi2).max(0.0))
}

/// Number of control samples per node in the value iteration.
pub const VALUE_FN_CONTROLS: usize = 33;

/// Semi-Lagrangian value iteration for the radial optimal-control problem:
/// paths `gamma > 0` with `|gamma' + (n-1)/gamma| <= 1` collect the running
/// reward `f~`. Returns the value profile at time `t_final`.
///
/// The interpolation feet are clipped to `(0, r_max]`; the profile is flat at
/// the origin, so clipping there is consistent. Requires `dt <= dr`.
pub fn value_function_radial(
    f_tilde: impl Fn(f64) -> f64,
    dim: u32,
    r_max: f64,
    dr: f64,
    dt: f64,
    t_final: f64,
) -> Result<RadialProfile> {
    if dim < 2 {
        return Err(Error::Config(format!("dimension must be >= 2, got {dim}")));
    }
    if !(dr > 0.0 && r_max > dr) {
        return Err(Error::Config("value iteration needs r_max > dr > 0".into()));
    }
    if !(dt > 0.0 && dt <= dr) {
        return Err(Error::Config(format!(
            "value iteration needs 0 < dt <= dr, got dt={dt}, dr={dr}"
        )));
    }
    let m_max = (r_max / dr).round() as usize;
    let nodes = m_max + 1;
    let reward: Vec<f64> = (0..nodes).map(|m| dt * f_tilde(m as f64 * dr)).collect();
    let a_dim = dim as f64 - 1.0;
    let steps = crate::solvers::step_count(t_final, dt);

    let mut cur = vec![0.0f64; nodes];
    let mut next = vec![0.0f64; nodes];
    let interp = |vals: &[f64], r: f64| -> f64 {
        let pos = (r / dr).clamp(0.0, m_max as f64);
        let k = (pos.floor() as usize).min(m_max - 1);
        let w = pos - k as f64;
        vals[k] + w * (vals[k + 1] - vals[k])
    };
    for _ in 0..steps {
        for m in 1..=m_max {
            let r = m as f64 * dr;
            let drift = a_dim / r;
            let v_lo = -1.0 - drift;
            let v_hi = 1.0 - drift;
            let mut best = f64::NEG_INFINITY;
            for c in 0..VALUE_FN_CONTROLS {
                let v = v_lo + (v_hi - v_lo) * c as f64 / (VALUE_FN_CONTROLS - 1) as f64;
                let foot = (r - dt * v).clamp(0.0, r_max);
                best = best.max(interp(&cur, foot));
            }
            next[m] = reward[m] + best;
        }
        next[0] = next[1];
        std::mem::swap(&mut cur, &mut next);
    }
    RadialProfile::new(dr, dim, cur)
}

/// Fixed integration step of the circle-radius oracle.
pub const CIRCLE_ODE_STEP: f64 = 1e-4;

/// Radius at time `t` of a circle evolving by `rho' = 1 - 1/rho` from
/// `rho(0) = rho0`, by fourth-order Runge-Kutta with a fixed step. Radii at
/// or below zero report a collapse with the time reached.
pub fn circle_radius(rho0: f64, t: f64) -> Result<f64> {
    circle_radius_with_step(rho0, t, CIRCLE_ODE_STEP)
}

/// Same as [`circle_radius`] with an explicit step, for step-halving checks.
pub fn circle_radius_with_step(rho0: f64, t: f64, h: f64) -> Result<f64> {
    assert!(rho0 > 0.0 && h > 0.0 && t >= 0.0);
    let rate = |rho: f64| 1.0 - 1.0 / rho;
    let mut rho = rho0;
    let mut elapsed = 0.0;
    let floor = 1e-9;
    while elapsed < t {
        let step = h.min(t - elapsed);
        let k1 = rate(rho);
        let k2 = rate(rho + 0.5 * step * k1);
        let k3 = rate(rho + 0.5 * step * k2);
        let k4 = rate(rho + step * k3);
        let next = rho + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !next.is_finite() || next <= floor {
            return Err(Error::Collapse {
                time: elapsed + step,
            });
        }
        rho = next;
        elapsed += step;
    }
    Ok(rho)
}
