//! Continuous Young diagrams after `sqrt(n)` rescaling.
//!
//! A shape is stored in English coordinates: `y` runs down the rows, and the
//! boundary `f(y)` is the rescaled row length at depth `y`. The boundary is
//! kept as exact cell averages on a uniform grid over `[0, height]`, so the
//! enclosed area is the plain sum of cells times the step.

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::quad::adaptive_simpson;

/// Resolution of a shape grid as a fraction of its bounding box.
pub const DEFAULT_CELLS: usize = 1000;
/// Required accuracy of the enclosed area of reference shapes.
pub const AREA_TOLERANCE: f64 = 1e-6;

/// Side of the box the uniform-measure curve is clipped to; the area lost
/// outside it is below `1e-7`.
const UNIFORM_BOX: f64 = 14.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeSource {
    /// Logan–Shepp / Vershik–Kerov Plancherel limit.
    Lsvk,
    /// `exp(-c x) + exp(-c y) = 1` with `c = pi / sqrt(6)`.
    Uniform,
    Sampled,
}

#[derive(Debug, Clone)]
pub struct ContinuousShape {
    source: ShapeSource,
    height: f64,
    width: f64,
    cells: Vec<f64>,
}

impl ContinuousShape {
    pub fn lsvk() -> Self {
        Self::lsvk_with(DEFAULT_CELLS)
    }

    pub fn lsvk_with(cells: usize) -> Self {
        let mut s = Self::from_boundary(lsvk_boundary, 2.0, cells);
        s.source = ShapeSource::Lsvk;
        s
    }

    pub fn uniform_limit() -> Self {
        Self::uniform_limit_with(DEFAULT_CELLS)
    }

    pub fn uniform_limit_with(cells: usize) -> Self {
        let mut s = Self::from_boundary(uniform_boundary, UNIFORM_BOX, cells);
        s.source = ShapeSource::Uniform;
        s
    }

    /// Samples a nonincreasing boundary `f` on `[0, height]` by cell averages.
    pub fn from_boundary<F: Fn(f64) -> f64>(f: F, height: f64, cells: usize) -> Self {
        assert!(cells > 0 && height > 0.0);
        let step = height / cells as f64;
        let tol = AREA_TOLERANCE * 1e-2 / cells as f64;
        let avgs: Vec<f64> = (0..cells)
            .map(|i| {
                let a = i as f64 * step;
                adaptive_simpson(&f, a, a + step, tol) / step
            })
            .collect();
        let width = f(0.0).max(avgs.first().copied().unwrap_or(0.0));
        ContinuousShape {
            source: ShapeSource::Sampled,
            height,
            width,
            cells: avgs,
        }
    }

    /// The diagram of `p` rescaled by `1/sqrt(|p|)` in both directions.
    pub fn from_partition(p: &Partition, cells: usize) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::invalid("cannot rescale the empty partition"));
        }
        let scale = (p.size() as f64).sqrt();
        let height = p.height() as f64 / scale;
        let step = height / cells as f64;
        let steps = RescaledRows::new(p);
        let avgs = (0..cells)
            .map(|i| {
                let a = i as f64 * step;
                steps.integral(a, a + step) / step
            })
            .collect();
        Ok(ContinuousShape {
            source: ShapeSource::Sampled,
            height,
            width: p.width() as f64 / scale,
            cells: avgs,
        })
    }

    pub fn source(&self) -> ShapeSource {
        self.source
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn step(&self) -> f64 {
        self.height / self.cells.len() as f64
    }

    pub fn area(&self) -> f64 {
        self.cells.iter().sum::<f64>() * self.step()
    }

    /// Grid value of the boundary at depth `y`; zero below the shape.
    pub fn boundary_at(&self, y: f64) -> f64 {
        if y < 0.0 || y >= self.height {
            return 0.0;
        }
        let i = ((y / self.step()) as usize).min(self.cells.len() - 1);
        self.cells[i]
    }
}

/// Row lengths of a partition as a step function of rescaled depth.
struct RescaledRows {
    unit: f64,
    rows: Vec<f64>,
}

impl RescaledRows {
    fn new(p: &Partition) -> Self {
        let scale = (p.size() as f64).sqrt();
        RescaledRows {
            unit: 1.0 / scale,
            rows: p.rows().iter().map(|&r| r as f64 / scale).collect(),
        }
    }

    fn depth(&self) -> f64 {
        self.rows.len() as f64 * self.unit
    }

    fn value(&self, row: usize) -> f64 {
        self.rows.get(row).copied().unwrap_or(0.0)
    }

    fn integral(&self, a: f64, b: f64) -> f64 {
        self.integral_abs_diff(a, b, 0.0)
    }

    /// `int_a^b |g(y) - c| dy` for the step function `g`.
    fn integral_abs_diff(&self, a: f64, b: f64, c: f64) -> f64 {
        let mut total = 0.0;
        let mut y = a;
        while y < b {
            let mut row = (y / self.unit).floor() as usize;
            if (row + 1) as f64 * self.unit <= y {
                row += 1;
            }
            let next = if row >= self.rows.len() {
                b
            } else {
                ((row + 1) as f64 * self.unit).min(b)
            };
            total += (self.value(row) - c).abs() * (next - y);
            y = next;
        }
        total
    }
}

/// L1 area between the rescaled diagram of `p` and `shape`, evaluated on the
/// shape's grid.
pub fn rescaled_shape_distance(p: &Partition, shape: &ContinuousShape) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::invalid("distance of the empty partition"));
    }
    let g = RescaledRows::new(p);
    let step = shape.step();
    let mut total = 0.0;
    for (i, &f) in shape.cells.iter().enumerate() {
        let a = i as f64 * step;
        total += g.integral_abs_diff(a, a + step, f);
    }
    if g.depth() > shape.height {
        total += g.integral(shape.height, g.depth());
    }
    Ok(total)
}

fn lsvk_omega(u: f64) -> f64 {
    let u = u.clamp(-2.0, 2.0);
    2.0 / std::f64::consts::PI * (u * (u / 2.0).asin() + (4.0 - u * u).max(0.0).sqrt())
}

/// Rescaled row length at depth `y` on the Plancherel limit curve.
fn lsvk_boundary(y: f64) -> f64 {
    if y <= 0.0 {
        return 2.0;
    }
    if y >= 2.0 {
        return 0.0;
    }
    // depth (omega(u) - u) / 2 decreases from 2 at u = -2 to 0 at u = 2
    let (mut lo, mut hi) = (-2.0f64, 2.0f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if (lsvk_omega(mid) - mid) / 2.0 > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u = 0.5 * (lo + hi);
    (u + lsvk_omega(u)) / 2.0
}

fn uniform_boundary(y: f64) -> f64 {
    let c = std::f64::consts::PI / 6f64.sqrt();
    if y <= 0.0 {
        return UNIFORM_BOX;
    }
    (-(-(-c * y).exp()).ln_1p() / c).min(UNIFORM_BOX)
}
