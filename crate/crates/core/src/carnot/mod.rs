//! Hörmander vector fields, horizontal gradients and Carnot–Carathéodory distances
//! computed as shortest paths on a lattice.

mod geometry;
mod lattice;
mod window;

pub use geometry::{heisenberg_geometry, loglog_slope, HeisenbergGeometry};
pub use lattice::{cc_distance, CCGrid, GridSpec, SourceDistances};
pub use window::{build_cc_space, jerison_check, CCSpace, MAX_WINDOW_NODES};

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::space::Grid;

type Coefficient = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// `X1 = ∂x - (y/2)∂t`, `X2 = ∂y + (x/2)∂t` on `ℝ³`.
    Heisenberg,
    /// `X1 = ∂x`, `X2 = x ∂y` on `ℝ²`.
    Grushin,
    /// `X_i = ∂_i` on `ℝⁿ`.
    Euclidean,
    Custom,
}

/// `m` vector fields on `ℝⁿ`, each a coefficient map `x -> ℝⁿ`.
#[derive(Clone)]
pub struct VectorFieldSystem {
    name: String,
    kind: FieldKind,
    dim: usize,
    /// Bracket length needed to span the tangent space; recorded, not computed.
    step: usize,
    fields: Vec<Coefficient>,
}

impl fmt::Debug for VectorFieldSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorFieldSystem")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("fields", &self.fields.len())
            .field("step", &self.step)
            .finish()
    }
}

impl VectorFieldSystem {
    pub fn heisenberg() -> Self {
        Self {
            name: "heisenberg".into(),
            kind: FieldKind::Heisenberg,
            dim: 3,
            step: 2,
            fields: vec![
                Arc::new(|x: &[f64]| vec![1.0, 0.0, -x[1] / 2.0]),
                Arc::new(|x: &[f64]| vec![0.0, 1.0, x[0] / 2.0]),
            ],
        }
    }

    pub fn grushin() -> Self {
        Self {
            name: "grushin".into(),
            kind: FieldKind::Grushin,
            dim: 2,
            step: 2,
            fields: vec![Arc::new(|_: &[f64]| vec![1.0, 0.0]), Arc::new(|x: &[f64]| vec![0.0, x[0]])],
        }
    }

    pub fn euclidean(dim: usize) -> Self {
        let fields = (0..dim)
            .map(|i| {
                Arc::new(move |_: &[f64]| {
                    let mut e = vec![0.0; dim];
                    e[i] = 1.0;
                    e
                }) as Coefficient
            })
            .collect();
        Self { name: "euclidean".into(), kind: FieldKind::Euclidean, dim, step: 1, fields }
    }

    pub fn custom(name: &str, dim: usize, step: usize, fields: Vec<Coefficient>) -> Self {
        Self { name: name.into(), kind: FieldKind::Custom, dim, step, fields }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn step(&self) -> usize {
        self.step
    }

    /// Number of fields `m`.
    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn coefficients(&self, field: usize, x: &[f64]) -> Vec<f64> {
        (self.fields[field])(x)
    }

    /// `Σ_i c_i X_i(x)`.
    pub fn combine(&self, controls: &[f64], x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, &c) in controls.iter().enumerate() {
            if c != 0.0 {
                for (o, v) in out.iter_mut().zip(self.coefficients(i, x)) {
                    *o += c * v;
                }
            }
        }
        out
    }
}

impl FromStr for VectorFieldSystem {
    type Err = Error;

    /// `heisenberg`, `grushin`, `euclidean` (2D) or `euclidean:n`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "heisenberg" => Ok(Self::heisenberg()),
            "grushin" => Ok(Self::grushin()),
            "euclidean" => Ok(Self::euclidean(2)),
            other => match other.strip_prefix("euclidean:").map(str::parse::<usize>) {
                Some(Ok(n)) if n > 0 => Ok(Self::euclidean(n)),
                _ => Err(Error::Parse(format!("unknown vector fields {other:?}"))),
            },
        }
    }
}

/// `|Xf| = (Σ_i (X_i f)²)^{1/2}` with `X_i f = ∇f · X_i` and `∇f` from grid differences.
pub fn horizontal_gradient(fields: &VectorFieldSystem, grid: &Grid, f: &[f64]) -> Result<Vec<f64>> {
    if grid.dim() != fields.dim() {
        return Err(Error::Argument(format!(
            "{}-dimensional fields on a {}-dimensional grid",
            fields.dim(),
            grid.dim()
        )));
    }
    if f.len() != grid.len() {
        return Err(Error::Argument(format!("{} values for {} grid points", f.len(), grid.len())));
    }
    let grad = grid.gradient(f);
    Ok((0..grid.len())
        .map(|i| {
            let x = grid.point(i);
            (0..fields.len())
                .map(|k| {
                    let c = fields.coefficients(k, &x);
                    let d: f64 = c.iter().zip(&grad).map(|(ci, g)| ci * g[i]).sum();
                    d * d
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect())
}
