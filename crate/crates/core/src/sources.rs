//! Source terms `f(x) >= 0` driving the growth, with the exact metadata
//! (maximum value, support radius, Lipschitz constant) the invariant
//! monitors need.

use crate::grid::{Field, GridSpec};
use crate::{Error, Result};

/// The source families used by the experiments.
///
/// All evaluate to nonnegative values and vanish outside a closed disk whose
/// radius [`SourceTerm::support_radius`] reports. The indicator variants are
/// discontinuous; monitors that need a gradient bound are disabled for them.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceTerm {
    /// `f(x) = (r - |x|)_+`, the benchmark cone.
    RadialCone { r: f64 },
    /// `f(x) = (r - |x1| - |x2|)_+`, the square cone.
    L1Cone { r: f64 },
    /// Sum of two cones of size `r0` with apexes at `(+-offset, 0)`.
    TwinCones { r0: f64, offset: f64 },
    /// Indicator of the closed disk of radius `r0` about the origin.
    BallIndicator { r0: f64 },
    /// Indicator of the union of two closed disks at `(+-offset, 0)`.
    TwinBalls { r0: f64, offset: f64 },
    /// Radial profile tabulated at strictly increasing radii, linearly
    /// interpolated in `|x|` and zero beyond the last radius.
    RadialTable { radii: Vec<f64>, values: Vec<f64> },
}

impl SourceTerm {
    pub fn radial_table(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.len() != values.len() || radii.is_empty() {
            return Err(Error::Config(
                "radial table needs matching, nonempty radius/value columns".into(),
            ));
        }
        if !radii.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config("radial table radii must strictly increase".into()));
        }
        if radii[0] < 0.0 {
            return Err(Error::Config("radial table radii must be nonnegative".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Config("radial table values must be finite and >= 0".into()));
        }
        Ok(SourceTerm::RadialTable { radii, values })
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        match self {
            // A zero cone is the zero source, allowed for baseline sweeps.
            SourceTerm::RadialCone { r } | SourceTerm::L1Cone { r } => {
                if r.is_finite() && *r >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::Config(format!("cone size r must be >= 0, got {r}")))
                }
            }
            SourceTerm::TwinCones { r0, offset } | SourceTerm::TwinBalls { r0, offset } => {
                positive("R0", *r0)?;
                if offset.is_finite() && *offset >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::Config(format!("offset must be >= 0, got {offset}")))
                }
            }
            SourceTerm::BallIndicator { r0 } => positive("R0", *r0),
            SourceTerm::RadialTable { radii, values } => {
                Self::radial_table(radii.clone(), values.clone()).map(|_| ())
            }
        }
    }

    /// Pointwise value at `x = (x1, x2)`.
    pub fn eval(&self, x: (f64, f64)) -> f64 {
        let (x1, x2) = x;
        match self {
            SourceTerm::RadialCone { r } => (r - (x1 * x1 + x2 * x2).sqrt()).max(0.0),
            SourceTerm::L1Cone { r } => (r - (x1.abs() + x2.abs())).max(0.0),
            SourceTerm::TwinCones { r0, offset } => {
                let d1 = ((x1 - offset) * (x1 - offset) + x2 * x2).sqrt();
                let d2 = ((x1 + offset) * (x1 + offset) + x2 * x2).sqrt();
                (r0 - d1).max(0.0) + (r0 - d2).max(0.0)
            }
            SourceTerm::BallIndicator { r0 } => {
                if x1 * x1 + x2 * x2 <= r0 * r0 {
                    1.0
                } else {
                    0.0
                }
            }
            SourceTerm::TwinBalls { r0, offset } => {
                let in1 = (x1 - offset) * (x1 - offset) + x2 * x2 <= r0 * r0;
                let in2 = (x1 + offset) * (x1 + offset) + x2 * x2 <= r0 * r0;
                if in1 || in2 {
                    1.0
                } else {
                    0.0
                }
            }
            SourceTerm::RadialTable { radii, values } => {
                eval_table(radii, values, (x1 * x1 + x2 * x2).sqrt())
            }
        }
    }

    /// The true supremum of [`SourceTerm::eval`], in closed form.
    pub fn max_value(&self) -> f64 {
        match self {
            SourceTerm::RadialCone { r } | SourceTerm::L1Cone { r } => *r,
            // The axis maximum sits either at an apex (value R0 when the two
            // cones barely interact) or on the central overlap plateau.
            SourceTerm::TwinCones { r0, offset } => r0 + (r0 - 2.0 * offset).max(0.0),
            SourceTerm::BallIndicator { .. } | SourceTerm::TwinBalls { .. } => 1.0,
            SourceTerm::RadialTable { values, .. } => {
                values.iter().copied().fold(0.0, f64::max)
            }
        }
    }

    /// Radius of a closed disk containing the support.
    pub fn support_radius(&self) -> f64 {
        match self {
            SourceTerm::RadialCone { r } | SourceTerm::L1Cone { r } => *r,
            SourceTerm::TwinCones { r0, offset } | SourceTerm::TwinBalls { r0, offset } => {
                offset + r0
            }
            SourceTerm::BallIndicator { r0 } => *r0,
            SourceTerm::RadialTable { radii, .. } => *radii.last().unwrap(),
        }
    }

    /// Euclidean Lipschitz constant of `eval`; infinite for the indicator
    /// variants and for tables that jump at the support edge.
    pub fn lipschitz_bound(&self) -> f64 {
        match self {
            SourceTerm::RadialCone { .. } => 1.0,
            SourceTerm::L1Cone { .. } => std::f64::consts::SQRT_2,
            SourceTerm::TwinCones { r0, offset } => {
                if offset >= r0 {
                    1.0
                } else {
                    2.0
                }
            }
            SourceTerm::BallIndicator { .. } | SourceTerm::TwinBalls { .. } => f64::INFINITY,
            SourceTerm::RadialTable { radii, values } => {
                if values.last().copied().unwrap_or(0.0) != 0.0 {
                    return f64::INFINITY;
                }
                let mut lip: f64 = 0.0;
                for w in radii.windows(2).zip(values.windows(2)) {
                    let (rw, vw) = w;
                    lip = lip.max(((vw[1] - vw[0]) / (rw[1] - rw[0])).abs());
                }
                lip
            }
        }
    }

    /// Samples `eval` at every node of the grid.
    pub fn sample_to_field(&self, spec: GridSpec) -> Field {
        Field::from_fn(spec, |x1, x2| self.eval((x1, x2)))
    }

    /// Radial section `f~(r)`, meaningful for the radially symmetric
    /// variants (evaluates along the positive x1-axis).
    pub fn eval_radial(&self, r: f64) -> f64 {
        self.eval((r, 0.0))
    }
}

fn eval_table(radii: &[f64], values: &[f64], r: f64) -> f64 {
    let last = *radii.last().unwrap();
    if r >= last {
        // Zero beyond the last radius; at the node itself keep the tabulated
        // value so the support edge is closed.
        return if r == last { *values.last().unwrap() } else { 0.0 };
    }
    if r <= radii[0] {
        return values[0];
    }
    let k = radii.partition_point(|rk| *rk <= r) - 1;
    let w = (r - radii[k]) / (radii[k + 1] - radii[k]);
    values[k] + w * (values[k + 1] - values[k])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn eval_examples() {
        let cone = SourceTerm::RadialCone { r: 1.6 };
        assert_eq!(cone.eval((0.0, 0.0)), 1.6);

        let zero_cone = SourceTerm::RadialCone { r: 0.0 };
        assert!(zero_cone.validate().is_ok());
        assert_eq!(zero_cone.eval((0.3, 0.1)), 0.0);
        assert_eq!(zero_cone.max_value(), 0.0);

        let l1 = SourceTerm::L1Cone { r: 2.0 };
        assert_eq!(l1.eval((1.0, 1.0)), 0.0);

        let twin = SourceTerm::TwinCones {
            r0: 1.2,
            offset: 0.0,
        };
        assert_eq!(twin.eval((0.0, 0.0)), 2.4);

        let ball = SourceTerm::BallIndicator { r0: 0.2 };
        assert_eq!(ball.eval((0.1, 0.0)), 1.0);
        assert_eq!(ball.eval((0.3, 0.0)), 0.0);
        assert_eq!(ball.eval((0.2, 0.0)), 1.0); // closed ball
    }

    #[test]
    fn max_and_support_examples() {
        let cone = SourceTerm::RadialCone { r: 1.6 };
        assert_eq!(cone.max_value(), 1.6);
        assert_eq!(cone.support_radius(), 1.6);

        let disjoint = SourceTerm::TwinCones {
            r0: 1.2,
            offset: 1.5,
        };
        assert_eq!(disjoint.max_value(), 1.2);
        assert_eq!(disjoint.support_radius(), 2.7);

        let ball = SourceTerm::BallIndicator { r0: 0.2 };
        assert_eq!(ball.max_value(), 1.0);
        assert_eq!(ball.support_radius(), 0.2);
    }

    #[test]
    fn twin_cone_max_matches_dense_axis_scan() {
        // Overlapping case: scan eval along the symmetry axis.
        for &offset in &[0.0, 0.3, 0.5, 0.7, 0.9, 1.1, 1.5] {
            let twin = SourceTerm::TwinCones { r0: 1.2, offset };
            let mut best: f64 = 0.0;
            let steps = 80_000;
            for k in 0..=steps {
                let x = -4.0 + 8.0 * k as f64 / steps as f64;
                best = best.max(twin.eval((x, 0.0)));
            }
            assert!(
                (twin.max_value() - best).abs() < 1e-4,
                "offset {offset}: closed form {} vs scan {best}",
                twin.max_value()
            );
        }
    }

    #[test]
    fn lipschitz_examples() {
        assert_eq!(SourceTerm::RadialCone { r: 1.0 }.lipschitz_bound(), 1.0);
        assert_eq!(
            SourceTerm::L1Cone { r: 1.0 }.lipschitz_bound(),
            std::f64::consts::SQRT_2
        );
        assert!(SourceTerm::BallIndicator { r0: 0.2 }
            .lipschitz_bound()
            .is_infinite());
        assert_eq!(
            SourceTerm::TwinCones {
                r0: 1.2,
                offset: 1.5
            }
            .lipschitz_bound(),
            1.0
        );
        assert_eq!(
            SourceTerm::TwinCones {
                r0: 1.2,
                offset: 0.3
            }
            .lipschitz_bound(),
            2.0
        );
    }

    #[test]
    fn table_interpolation_and_validation() {
        let t = SourceTerm::radial_table(vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 0.0]).unwrap();
        assert_eq!(t.eval((0.0, 0.0)), 1.0);
        assert!((t.eval((0.5, 0.0)) - 0.75).abs() < 1e-15);
        assert_eq!(t.eval((3.0, 0.0)), 0.0);
        assert_eq!(t.support_radius(), 2.0);
        assert_eq!(t.lipschitz_bound(), 0.5);

        assert!(SourceTerm::radial_table(vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(SourceTerm::radial_table(vec![0.0], vec![-1.0]).is_err());
    }

    #[test]
    fn sampled_fields_respect_metadata() {
        let spec = GridSpec::new(2.56, 32).unwrap();
        let sources = [
            SourceTerm::RadialCone { r: 1.6 },
            SourceTerm::L1Cone { r: 1.2 },
            SourceTerm::TwinCones {
                r0: 1.2,
                offset: 0.7,
            },
            SourceTerm::BallIndicator { r0: 0.2 },
            SourceTerm::TwinBalls {
                r0: 0.2,
                offset: 0.8,
            },
        ];
        let n = spec.index_radius();
        for src in &sources {
            let f = src.sample_to_field(spec);
            let mut attained: f64 = f64::NEG_INFINITY;
            for j in -n..=n {
                for i in -n..=n {
                    let v = f.get(i, j);
                    let (x1, x2) = spec.node_coord(i, j);
                    assert!(v >= 0.0);
                    assert!(v <= src.max_value() + 1e-15);
                    if (x1 * x1 + x2 * x2).sqrt() > src.support_radius() {
                        assert_eq!(v, 0.0, "support violated for {src:?} at ({x1}, {x2})");
                    }
                    attained = attained.max(v);
                }
            }
            // The sampled maximum sits within one slope * dx of the true one.
            let lip = src.lipschitz_bound();
            let slack = if lip.is_finite() {
                lip * spec.spacing() * 2.0
            } else {
                0.0
            };
            assert!(
                attained >= src.max_value() - slack,
                "{src:?}: attained {attained} vs {}",
                src.max_value()
            );
        }
    }

    #[test]
    fn radial_variants_rotation_invariant_on_node_pairs() {
        let spec = GridSpec::new(2.0, 16).unwrap();
        let sources = [
            SourceTerm::RadialCone { r: 1.6 },
            SourceTerm::BallIndicator { r0: 0.7 },
        ];
        let n = spec.index_radius();
        for src in &sources {
            let f = src.sample_to_field(spec);
            for j in -n..=n {
                for i in -n..=n {
                    // 90-degree rotations and reflections land on nodes.
                    assert_eq!(f.get(i, j), f.get(-j, i));
                    assert_eq!(f.get(i, j), f.get(-i, -j));
                    assert_eq!(f.get(i, j), f.get(j, i));
                }
            }
        }
    }
}
