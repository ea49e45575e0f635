//! Uniformly sampled 2-D complex functions and centered FFT helpers.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("N must be a power of two with N ≥ 8, got {0}")]
    BadSize(usize),
    #[error("half-width L must be positive, got {0}")]
    BadHalfWidth(f64),
    #[error("grid contains a non-finite sample at index ({0}, {1})")]
    NonFinite(usize, usize),
    #[error("operation requires {expected} axis metadata, grid carries {found}")]
    MetadataMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("grids have mismatched shapes or axes")]
    ShapeMismatch,
    #[error("grid too large for this operation (N = {n}, cap {cap})")]
    TooLarge { n: usize, cap: usize },
    #[error("bad grid file: {0}")]
    BadFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One sampling axis: `n` samples at coordinates `(i − n/2)·step`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub step: f64,
}

impl Axis {
    pub fn coord(&self, i: usize, n: usize) -> f64 {
        (i as f64 - (n / 2) as f64) * self.step
    }

    /// Step of the DFT-dual axis: 2π/(n·step).
    pub fn freq_step(&self, n: usize) -> f64 {
        2.0 * std::f64::consts::PI / (n as f64 * self.step)
    }
}

/// Which plane the samples live on.
///
/// `Space` is the square [−L, L)² with equal steps. `WigPlane` is the image
/// of the Wigner transform: axis 0 is still spatial, axis 1 carries the DFT
/// output frequencies `πj/(2L)`. `FreqPlane` is a full 2-D frequency
/// lattice (σ̂ samples).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridKind {
    Space,
    WigPlane,
    FreqPlane,
}

impl GridKind {
    fn name(self) -> &'static str {
        match self {
            GridKind::Space => "spatial",
            GridKind::WigPlane => "Wigner-output",
            GridKind::FreqPlane => "frequency",
        }
    }
}

/// An `n × n` complex sample array with axis metadata; `values[i*n + j]`
/// holds the sample at `(axis0.coord(i), axis1.coord(j))`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid2 {
    n: usize,
    axes: [Axis; 2],
    kind: GridKind,
    values: Vec<Complex64>,
}

impl Grid2 {
    pub fn new(
        n: usize,
        axes: [Axis; 2],
        kind: GridKind,
        values: Vec<Complex64>,
    ) -> Result<Self, GridError> {
        if n < 8 || !n.is_power_of_two() {
            return Err(GridError::BadSize(n));
        }
        if !(axes[0].step > 0.0 && axes[1].step > 0.0) {
            return Err(GridError::BadHalfWidth(axes[0].step.min(axes[1].step)));
        }
        assert_eq!(values.len(), n * n);
        let g = Self {
            n,
            axes,
            kind,
            values,
        };
        g.check_finite()?;
        Ok(g)
    }

    /// Samples `f(x, y)` on the square grid [−L, L)² with N points per axis.
    pub fn from_fn<F: Fn(f64, f64) -> Complex64>(
        n: usize,
        l: f64,
        f: F,
    ) -> Result<Self, GridError> {
        if n < 8 || !n.is_power_of_two() {
            return Err(GridError::BadSize(n));
        }
        if !(l > 0.0) {
            return Err(GridError::BadHalfWidth(l));
        }
        let step = 2.0 * l / n as f64;
        let axis = Axis { step };
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            let x = axis.coord(i, n);
            for j in 0..n {
                values.push(f(x, axis.coord(j, n)));
            }
        }
        Self::new(n, [axis, axis], GridKind::Space, values)
    }

    fn check_finite(&self) -> Result<(), GridError> {
        for (pos, v) in self.values.iter().enumerate() {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(GridError::NonFinite(pos / self.n, pos % self.n));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn axes(&self) -> [Axis; 2] {
        self.axes
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    /// Half-width of axis 0 (the spatial x axis in both grid kinds).
    pub fn half_width(&self) -> f64 {
        (self.n / 2) as f64 * self.axes[0].step
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.n + j]
    }

    pub fn coord0(&self, i: usize) -> f64 {
        self.axes[0].coord(i, self.n)
    }

    pub fn coord1(&self, j: usize) -> f64 {
        self.axes[1].coord(j, self.n)
    }

    pub fn require_kind(&self, kind: GridKind) -> Result<(), GridError> {
        if self.kind != kind {
            return Err(GridError::MetadataMismatch {
                expected: kind.name(),
                found: self.kind.name(),
            });
        }
        Ok(())
    }

    pub(crate) fn same_shape(&self, other: &Self) -> bool {
        self.n == other.n && self.axes == other.axes
    }

    pub(crate) fn with_values(&self, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), self.values.len());
        Self {
            n: self.n,
            axes: self.axes,
            kind: self.kind,
            values,
        }
    }

    pub(crate) fn with_kind_axis1(
        &self,
        kind: GridKind,
        axis1: Axis,
        values: Vec<Complex64>,
    ) -> Self {
        assert_eq!(values.len(), self.values.len());
        Self {
            n: self.n,
            axes: [self.axes[0], axis1],
            kind,
            values,
        }
    }

    /// L² norm with the cell measure `step₀·step₁`.
    pub fn norm_l2(&self) -> f64 {
        let cell = self.axes[0].step * self.axes[1].step;
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell).sqrt()
    }

    pub fn add(&self, other: &Self) -> Result<Self, GridError> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, GridError> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.with_values(self.values.iter().map(|v| v * s).collect())
    }

    fn zip(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self, GridError> {
        if !self.same_shape(other) || self.kind != other.kind {
            return Err(GridError::ShapeMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(self.with_values(values))
    }

    // -- file formats -------------------------------------------------------

    /// Binary format: magic `WGK1`, u32 N, f64 L (little endian), then N²
    /// (re, im) f64 pairs row-major. Spatial grids only.
    pub fn write_wgk1<W: Write>(&self, w: &mut W) -> Result<(), GridError> {
        self.require_kind(GridKind::Space)?;
        w.write_all(b"WGK1")?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        w.write_all(&self.half_width().to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_wgk1<R: Read>(r: &mut R) -> Result<Self, GridError> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != b"WGK1" {
            return Err(GridError::BadFile("bad magic".to_owned()));
        }
        let mut nb = [0u8; 4];
        r.read_exact(&mut nb)?;
        let n = u32::from_le_bytes(nb) as usize;
        let mut lb = [0u8; 8];
        r.read_exact(&mut lb)?;
        let l = f64::from_le_bytes(lb);
        if n < 8 || !n.is_power_of_two() {
            return Err(GridError::BadFile(format!("bad N = {n}")));
        }
        if !(l > 0.0) {
            return Err(GridError::BadFile(format!("bad L = {l}")));
        }
        let mut values = Vec::with_capacity(n * n);
        let mut buf = [0u8; 16];
        for _ in 0..n * n {
            r.read_exact(&mut buf)?;
            values.push(Complex64::new(
                f64::from_le_bytes(buf[0..8].try_into().unwrap()),
                f64::from_le_bytes(buf[8..16].try_into().unwrap()),
            ));
        }
        let step = 2.0 * l / n as f64;
        Self::new(n, [Axis { step }, Axis { step }], GridKind::Space, values)
    }

    /// CSV export `x,y,re,im`, row-major.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<(), GridError> {
        writeln!(w, "x,y,re,im")?;
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self.value(i, j);
                writeln!(w, "{},{},{},{}", self.coord0(i), self.coord1(j), v.re, v.im)?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Centered FFTs
// ---------------------------------------------------------------------------

/// Centered 1-D DFT: `out[p] = Σ_k e^{∓2πi pk/N}·buf[k]` with both indices
/// running over `−N/2 ‥ N/2−1` (array index `i ↔ i − N/2`). For N divisible
/// by 4 this is `(−1)^p·FFT[(−1)^i·buf]`; the inverse includes the 1/N.
pub fn centered_fft_1d(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    debug_assert!(n % 4 == 0);
    for (i, v) in buf.iter_mut().enumerate() {
        if i % 2 == 1 {
            *v = -*v;
        }
    }
    plan(n, inverse).process(buf);
    let scale = if inverse { 1.0 / n as f64 } else { 1.0 };
    for (i, v) in buf.iter_mut().enumerate() {
        *v *= if i % 2 == 1 { -scale } else { scale };
    }
}

/// Centered 2-D DFT over both axes of a row-major n×n array.
pub fn centered_fft_2d(values: &mut [Complex64], n: usize, inverse: bool) {
    use rayon::prelude::*;
    values
        .par_chunks_mut(n)
        .for_each(|row| centered_fft_1d(row, inverse));
    let mut transposed = vec![Complex64::new(0.0, 0.0); n * n];
    transpose(values, &mut transposed, n);
    transposed
        .par_chunks_mut(n)
        .for_each(|row| centered_fft_1d(row, inverse));
    transpose(&transposed, values, n);
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    const BLOCK: usize = 32;
    for ib in (0..n).step_by(BLOCK) {
        for jb in (0..n).step_by(BLOCK) {
            for i in ib..(ib + BLOCK).min(n) {
                for j in jb..(jb + BLOCK).min(n) {
                    dst[j * n + i] = src[i * n + j];
                }
            }
        }
    }
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let plans = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = plans.lock().unwrap();
    map.entry((n, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid2::from_fn(7, 1.0, |_, _| c(0.0, 0.0)).is_err());
        assert!(Grid2::from_fn(12, 1.0, |_, _| c(0.0, 0.0)).is_err());
        assert!(Grid2::from_fn(8, 0.0, |_, _| c(0.0, 0.0)).is_err());
        assert!(Grid2::from_fn(8, 1.0, |_, _| c(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn centered_dft_matches_direct_sum() {
        let n = 16usize;
        let mut buf: Vec<Complex64> = (0..n)
            .map(|i| c((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let orig = buf.clone();
        centered_fft_1d(&mut buf, false);
        for p in 0..n {
            let j = p as f64 - (n / 2) as f64;
            let mut acc = c(0.0, 0.0);
            for (i, v) in orig.iter().enumerate() {
                let k = i as f64 - (n / 2) as f64;
                let ph = -2.0 * std::f64::consts::PI * j * k / n as f64;
                acc += v * c(ph.cos(), ph.sin());
            }
            assert!((buf[p] - acc).norm() < 1e-12, "bin {p}");
        }
    }

    #[test]
    fn fft2_roundtrip_is_identity() {
        let g = Grid2::from_fn(32, 4.0, |x, y| c((-(x * x + y * y) / 2.0).exp(), 0.3 * x)).unwrap();
        let mut v = g.values().to_vec();
        centered_fft_2d(&mut v, 32, false);
        centered_fft_2d(&mut v, 32, true);
        let max_err = v
            .iter()
            .zip(g.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_err < 1e-13);
    }

    #[test]
    fn wgk1_roundtrip() {
        let g = Grid2::from_fn(16, 3.0, |x, y| c(x * y, x - y)).unwrap();
        let mut buf = Vec::new();
        g.write_wgk1(&mut buf).unwrap();
        let back = Grid2::read_wgk1(&mut buf.as_slice()).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn norm_is_grid_weighted() {
        // ∫∫ e^{−x²−y²} over the box ≈ π for a wide box.
        let g = Grid2::from_fn(64, 8.0, |x, y| c((-(x * x + y * y) / 2.0).exp(), 0.0)).unwrap();
        assert!((g.norm_l2() * g.norm_l2() - std::f64::consts::PI).abs() < 1e-10);
    }
}
