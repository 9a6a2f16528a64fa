//! Scalar fields on a uniform square grid, representing graph surfaces in
//! 3-space (cones, self-expanders, squashed limits, space-time tracks).
//!
//! Serialization formats (also documented in the README):
//!
//! * `gridfield.bin` — little-endian binary: magic `GRIDFLD1` (8 bytes),
//!   `half_width: f64`, `resolution: u32`, `boundary_kind: u8`
//!   (0 = dirichlet_cone, 1 = linear_extension), `stretch: f64`, then
//!   `resolution^2` row-major `f64` heights (y-major, x fastest).
//! * `gridfield.csv` — header `x,y,value`, one row per grid point, `.`
//!   decimal separator, LF line endings.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    #[default]
    DirichletCone,
    LinearExtension,
}

/// Heights over the uniform grid on `[-L, L]^2`; odd resolution so the
/// origin is a grid point. Index `(ix, iy)` sits at
/// `(-L + ix h, -L + iy h)`, `h = 2L/(resolution-1)`, stored row-major
/// with `x` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    half_width: f64,
    resolution: usize,
    values: Vec<f64>,
    boundary: BoundaryKind,
    /// Vertical stretch parameter `N` the field was built with (1 if not
    /// applicable); recorded for serialization.
    stretch: f64,
}

impl GridField {
    pub fn new(
        half_width: f64,
        resolution: usize,
        values: Vec<f64>,
        boundary: BoundaryKind,
        stretch: f64,
    ) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::NonPositiveParameter { what: "half width", value: half_width });
        }
        if resolution < 5 || resolution % 2 == 0 {
            return Err(Error::ResolutionTooCoarse {
                resolution,
                why: "need an odd resolution >= 5".into(),
            });
        }
        if values.len() != resolution * resolution {
            return Err(Error::Config {
                field: "values".into(),
                message: format!(
                    "expected {} heights, got {}",
                    resolution * resolution,
                    values.len()
                ),
            });
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { context: format!("grid value at index {bad}") });
        }
        Ok(Self { half_width, resolution, values, boundary, stretch })
    }

    /// Build from a height function evaluated at grid points.
    pub fn from_fn(
        half_width: f64,
        resolution: usize,
        boundary: BoundaryKind,
        stretch: f64,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(resolution * resolution);
        let h = 2.0 * half_width / (resolution - 1) as f64;
        for iy in 0..resolution {
            let y = -half_width + iy as f64 * h;
            for ix in 0..resolution {
                let x = -half_width + ix as f64 * h;
                values.push(f(x, y));
            }
        }
        Self::new(half_width, resolution, values, boundary, stretch)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.resolution - 1) as f64
    }

    pub fn boundary(&self) -> BoundaryKind {
        self.boundary
    }

    pub fn stretch(&self) -> f64 {
        self.stretch
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.resolution + ix]
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    /// Bilinear sample at `(x, y)`; clamps to the box.
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let h = self.spacing();
        let n = self.resolution - 1;
        let fx = ((x + self.half_width) / h).clamp(0.0, n as f64);
        let fy = ((y + self.half_width) / h).clamp(0.0, n as f64);
        let ix = (fx.floor() as usize).min(n - 1);
        let iy = (fy.floor() as usize).min(n - 1);
        let ux = fx - ix as f64;
        let uy = fy - iy as f64;
        let v00 = self.at(ix, iy);
        let v10 = self.at(ix + 1, iy);
        let v01 = self.at(ix, iy + 1);
        let v11 = self.at(ix + 1, iy + 1);
        v00 * (1.0 - ux) * (1.0 - uy)
            + v10 * ux * (1.0 - uy)
            + v01 * (1.0 - ux) * uy
            + v11 * ux * uy
    }

    /// Lipschitz estimate: largest |height difference| / spacing over
    /// grid edges (both axis directions).
    pub fn lipschitz(&self) -> f64 {
        let n = self.resolution;
        let h = self.spacing();
        let mut worst = 0.0_f64;
        for iy in 0..n {
            for ix in 0..n {
                if ix + 1 < n {
                    worst = worst.max((self.at(ix + 1, iy) - self.at(ix, iy)).abs() / h);
                }
                if iy + 1 < n {
                    worst = worst.max((self.at(ix, iy + 1) - self.at(ix, iy)).abs() / h);
                }
            }
        }
        worst
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Pointwise scale by `c > 0` (used by squashing; margins and
    /// Lipschitz constants scale by exactly `c`).
    pub fn scaled(&self, c: f64, stretch: f64) -> Self {
        Self {
            half_width: self.half_width,
            resolution: self.resolution,
            values: self.values.iter().map(|v| v * c).collect(),
            boundary: self.boundary,
            stretch,
        }
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            half_width: self.half_width,
            resolution: self.resolution,
            values: self.values.iter().map(|&v| f(v)).collect(),
            boundary: self.boundary,
            stretch: self.stretch,
        }
    }

    pub fn write_bin(&self, mut w: impl Write) -> Result<()> {
        w.write_all(b"GRIDFLD1")?;
        w.write_all(&self.half_width.to_le_bytes())?;
        w.write_all(&(self.resolution as u32).to_le_bytes())?;
        w.write_all(&[match self.boundary {
            BoundaryKind::DirichletCone => 0u8,
            BoundaryKind::LinearExtension => 1u8,
        }])?;
        w.write_all(&self.stretch.to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_bin(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != b"GRIDFLD1" {
            return Err(Error::Config {
                field: "gridfield.bin".into(),
                message: "bad magic".into(),
            });
        }
        let mut f8 = [0u8; 8];
        let mut f4 = [0u8; 4];
        let mut f1 = [0u8; 1];
        r.read_exact(&mut f8)?;
        let half_width = f64::from_le_bytes(f8);
        r.read_exact(&mut f4)?;
        let resolution = u32::from_le_bytes(f4) as usize;
        r.read_exact(&mut f1)?;
        let boundary = match f1[0] {
            0 => BoundaryKind::DirichletCone,
            1 => BoundaryKind::LinearExtension,
            other => {
                return Err(Error::Config {
                    field: "gridfield.bin".into(),
                    message: format!("bad boundary kind {other}"),
                })
            }
        };
        r.read_exact(&mut f8)?;
        let stretch = f64::from_le_bytes(f8);
        let mut values = Vec::with_capacity(resolution * resolution);
        for _ in 0..resolution * resolution {
            r.read_exact(&mut f8)?;
            values.push(f64::from_le_bytes(f8));
        }
        Self::new(half_width, resolution, values, boundary, stretch)
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        w.write_all(b"x,y,value\n")?;
        for iy in 0..self.resolution {
            for ix in 0..self.resolution {
                writeln!(w, "{},{},{}", self.coord(ix), self.coord(iy), self.at(ix, iy))?;
            }
        }
        Ok(())
    }
}
