//! Uniform square grid on `[-R, R]^2` and scalar fields on it.
//!
//! Nodes are indexed by signed pairs `(i, j)` with `-N <= i, j <= N` and sit
//! at coordinates `(i * dx, j * dx)` with `dx = R / N`. Out-of-range accesses
//! clamp to the nearest valid index, which realizes the homogeneous Neumann
//! boundary condition by constant extension.

use crate::{Error, Result};
use std::io::{self, BufRead, Write};

/// Geometry of the grid: half-width `R` and index radius `N`; the spacing
/// `dx = R / N` is derived, never stored independently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    half_width: f64,
    index_radius: i32,
}

impl GridSpec {
    pub fn new(half_width: f64, index_radius: u32) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::Config(format!(
                "grid half-width must be positive and finite, got {half_width}"
            )));
        }
        if index_radius == 0 || index_radius > i32::MAX as u32 / 4 {
            return Err(Error::Config(format!(
                "grid index radius must be a positive (moderate) count, got {index_radius}"
            )));
        }
        Ok(Self {
            half_width,
            index_radius: index_radius as i32,
        })
    }

    /// Domain half-width `R`.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Index radius `N`; valid node indices are `-N ..= N` per axis.
    pub fn index_radius(&self) -> i32 {
        self.index_radius
    }

    /// Grid spacing `dx = R / N`.
    pub fn spacing(&self) -> f64 {
        self.half_width / self.index_radius as f64
    }

    /// Nodes per axis, `2N + 1`.
    pub fn nodes_per_axis(&self) -> usize {
        2 * self.index_radius as usize + 1
    }

    /// Total node count, `(2N + 1)^2`.
    pub fn node_count(&self) -> usize {
        self.nodes_per_axis() * self.nodes_per_axis()
    }

    /// Coordinates `(i * dx, j * dx)` of node `(i, j)`.
    pub fn node_coord(&self, i: i32, j: i32) -> (f64, f64) {
        assert!(
            i.abs() <= self.index_radius && j.abs() <= self.index_radius,
            "node index ({i}, {j}) outside [-{n}, {n}]",
            n = self.index_radius
        );
        let dx = self.spacing();
        (i as f64 * dx, j as f64 * dx)
    }
}

/// A scalar sample per grid node, row-major in `j` then `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    spec: GridSpec,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(spec: GridSpec) -> Self {
        Self {
            values: vec![0.0; spec.node_count()],
            spec,
        }
    }

    pub fn constant(spec: GridSpec, value: f64) -> Self {
        Self {
            values: vec![value; spec.node_count()],
            spec,
        }
    }

    /// Sample `f(x1, x2)` at every node.
    pub fn from_fn(spec: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = spec.index_radius;
        let dx = spec.spacing();
        let mut values = Vec::with_capacity(spec.node_count());
        for j in -n..=n {
            for i in -n..=n {
                values.push(f(i as f64 * dx, j as f64 * dx));
            }
        }
        Self { spec, values }
    }

    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.node_count() {
            return Err(Error::Config(format!(
                "value array length {} does not match node count {}",
                values.len(),
                spec.node_count()
            )));
        }
        Ok(Self { spec, values })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    fn lin(&self, i: i32, j: i32) -> usize {
        let n = self.spec.index_radius;
        debug_assert!(i.abs() <= n && j.abs() <= n);
        let w = 2 * n as usize + 1;
        (j + n) as usize * w + (i + n) as usize
    }

    /// Direct access; `(i, j)` must be a valid node.
    #[inline]
    pub fn get(&self, i: i32, j: i32) -> f64 {
        let n = self.spec.index_radius;
        assert!(
            i.abs() <= n && j.abs() <= n,
            "node index ({i}, {j}) outside [-{n}, {n}]"
        );
        self.values[self.lin(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: i32, j: i32, value: f64) {
        let idx = self.lin(i, j);
        self.values[idx] = value;
    }

    /// Access with Neumann extension: out-of-range indices clamp to the
    /// nearest valid index, so the one ghost layer of the boundary condition
    /// and the second layer reached by wide stencils both copy edge values.
    #[inline]
    pub fn neumann_get(&self, i: i32, j: i32) -> f64 {
        let n = self.spec.index_radius;
        self.values[self.lin(i.clamp(-n, n), j.clamp(-n, n))]
    }

    /// Arithmetic mean over all nodes.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Discrete `L^2` seminorm, `sqrt(sum v^2 * dx^2)`.
    pub fn l2_seminorm(&self) -> f64 {
        let sum_sq = self.values.iter().map(|v| v * v).sum::<f64>();
        sum_sq.sqrt() * self.spec.spacing()
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn inf(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    fn assert_same_spec(&self, other: &Field) {
        assert!(
            self.spec == other.spec,
            "fields combine arithmetically only on identical grid specs"
        );
    }

    /// In-place `self += scale * other`.
    pub fn add_scaled(&mut self, other: &Field, scale: f64) {
        self.assert_same_spec(other);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += scale * b;
        }
    }

    /// Returns `self - other` as a fresh field.
    pub fn sub(&self, other: &Field) -> Field {
        self.assert_same_spec(other);
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Field {
            spec: self.spec,
            values,
        }
    }

    /// Largest `|self - other|` over all nodes.
    pub fn sup_abs_diff(&self, other: &Field) -> f64 {
        self.assert_same_spec(other);
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Writes the heightmap dump: a comment line `# R=<R> N=<N> t=<t>`
    /// followed by `2N + 1` comma-separated rows (`j` ascending from `-N`,
    /// `i` ascending within a row), full double precision.
    pub fn write_heightmap(&self, out: &mut dyn Write, t: f64) -> io::Result<()> {
        let n = self.spec.index_radius;
        writeln!(
            out,
            "# R={} N={} t={}",
            fmt_g17(self.spec.half_width),
            n,
            fmt_g17(t)
        )?;
        for j in -n..=n {
            let mut line = String::new();
            for i in -n..=n {
                if i > -n {
                    line.push(',');
                }
                line.push_str(&fmt_g17(self.values[self.lin(i, j)]));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    /// Reads a heightmap dump written by [`Field::write_heightmap`].
    pub fn read_heightmap(input: &mut dyn BufRead) -> Result<(Field, f64)> {
        let bad = |msg: &str| Error::Config(format!("heightmap parse: {msg}"));
        let mut header = String::new();
        input
            .read_line(&mut header)
            .map_err(|e| bad(&e.to_string()))?;
        let header = header.trim();
        let rest = header
            .strip_prefix("# R=")
            .ok_or_else(|| bad("missing '# R=' header"))?;
        let mut parts = rest.split_whitespace();
        let r: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad R"))?;
        let n: u32 = parts
            .next()
            .and_then(|s| s.strip_prefix("N="))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad N"))?;
        let t: f64 = parts
            .next()
            .and_then(|s| s.strip_prefix("t="))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad t"))?;
        let spec = GridSpec::new(r, n)?;
        let per_axis = spec.nodes_per_axis();
        let mut values = Vec::with_capacity(spec.node_count());
        for line in input.lines() {
            let line = line.map_err(|e| bad(&e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            for tok in line.split(',') {
                values.push(tok.trim().parse().map_err(|_| bad("bad value"))?);
            }
        }
        if values.len() != per_axis * per_axis {
            return Err(bad("row/column count mismatch"));
        }
        Ok((Field { spec, values }, t))
    }
}

/// Formats with 17 significant digits, enough to reproduce any f64 exactly.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}
