//! Grid realizations of the Wigner transform, Cohen-class representations
//! `Q = σ ∗ Wig` as Fourier multipliers, and operator application by
//! spectral differentiation.
//!
//! Conventions, used everywhere: `D = −i∂`; forward Fourier kernel
//! `e^{−i⟨x,ξ⟩}`, inverse carries `(2π)⁻²`. The Wigner transform samples
//! `Tw(x,t) = w(x+½t, x−½t)` on the t-grid `{2Δk}`, so both arguments land
//! on the x-grid, then takes the DFT in t; output frequencies are `πj/(2L)`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::{KernelSpec, WeylOp};
use crate::grid::{centered_fft_1d, centered_fft_2d, Axis, Grid2, GridError, GridKind};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Error)]
pub enum CohenError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("kernel vanishes numerically on the frequency lattice (min |σ̂| = {min:e})")]
    KernelVanishes { min: f64 },
}

/// Discrete Wigner transform.
///
/// Output grid: axis 0 unchanged (spatial), axis 1 the DFT frequencies
/// `πj/(2L)`; samples of `Tw` outside the box read as zero.
pub fn wig(w: &Grid2) -> Result<Grid2, CohenError> {
    w.require_kind(GridKind::Space)?;
    let n = w.n();
    let dt = 2.0 * w.axes()[0].step;
    let mut values = vec![ZERO; n * n];
    let mut row = vec![ZERO; n];
    for i in 0..n {
        for (k_idx, slot) in row.iter_mut().enumerate() {
            let k = k_idx as i64 - (n / 2) as i64;
            let a = i as i64 + k;
            let b = i as i64 - k;
            *slot = if a >= 0 && a < n as i64 && b >= 0 && b < n as i64 {
                w.value(a as usize, b as usize)
            } else {
                ZERO
            };
        }
        centered_fft_1d(&mut row, false);
        for (j, &v) in row.iter().enumerate() {
            values[i * n + j] = v * dt;
        }
    }
    let axis1 = Axis {
        step: w.axes()[0].freq_step(n) / 2.0,
    };
    Ok(w.with_kind_axis1(GridKind::WigPlane, axis1, values))
}

/// Inverse of [`wig`] on its range.
///
/// The row-wise inverse DFT recovers `w` on the even sublattice
/// `{(a,b): a+b even}` (the image of `(i,k) ↦ (i+k, i−k)`); the odd
/// sublattice is reconstructed by unmasking in the spectrum: the
/// checkerboard mask aliases `ŵ` by a half-period shift, and for inputs
/// band-limited to the diamond `|ξ|+|η| < π/Δ` the two copies are disjoint.
pub fn wig_inverse(v: &Grid2) -> Result<Grid2, CohenError> {
    v.require_kind(GridKind::WigPlane)?;
    let n = v.n();
    let dt = 2.0 * v.axes()[0].step;
    let mut masked = vec![ZERO; n * n];
    let mut row = vec![ZERO; n];
    for i in 0..n {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = v.value(i, j);
        }
        centered_fft_1d(&mut row, true);
        for (k_idx, &val) in row.iter().enumerate() {
            let k = k_idx as i64 - (n / 2) as i64;
            let a = i as i64 + k;
            let b = i as i64 - k;
            if a >= 0 && a < n as i64 && b >= 0 && b < n as i64 {
                masked[a as usize * n + b as usize] = val / dt;
            }
        }
    }
    centered_fft_2d(&mut masked, n, false);
    let half = (n / 2) as i64;
    for p in 0..n {
        for q in 0..n {
            let pc = (p as i64 - half).abs();
            let qc = (q as i64 - half).abs();
            let factor = match (pc + qc).cmp(&half) {
                std::cmp::Ordering::Less => 2.0,
                std::cmp::Ordering::Equal => 1.0,
                std::cmp::Ordering::Greater => 0.0,
            };
            masked[p * n + q] *= factor;
        }
    }
    centered_fft_2d(&mut masked, n, true);
    let axis = v.axes()[0];
    Ok(Grid2::new(n, [axis, axis], GridKind::Space, masked)?)
}

/// Samples `σ̂ = q·e^{−iP}` on the DFT frequency lattice of the given grid.
pub fn sigma_hat_on_grid(ker: &KernelSpec, grid: &Grid2) -> Grid2 {
    let n = grid.n();
    let f0 = Axis {
        step: grid.axes()[0].freq_step(n),
    };
    let f1 = Axis {
        step: grid.axes()[1].freq_step(n),
    };
    let mut values = Vec::with_capacity(n * n);
    for p in 0..n {
        let xi = f0.coord(p, n);
        for q in 0..n {
            values.push(ker.sigma_hat(xi, f1.coord(q, n)));
        }
    }
    Grid2::new(n, [f0, f1], GridKind::FreqPlane, values).expect("lattice is valid")
}

/// Options for the Fourier-multiplier stage.
///
/// `pad = 1` applies the multiplier on the grid's own DFT lattice; the
/// stage is then exactly unitary for `|q| = 1` and exactly invertible.
/// `pad ≥ 2` zero-embeds onto a `pad·N` lattice first, which pushes the
/// periodization images of slowly decaying outputs (chirp kernels spread
/// Gaussians) far outside the box at the cost of discarding the leaked
/// tails when cropping back.
#[derive(Clone, Copy, Debug)]
pub struct CohenOpts {
    pub pad: usize,
}

impl Default for CohenOpts {
    fn default() -> Self {
        Self { pad: 1 }
    }
}

/// `Q[w] = F⁻¹(σ̂·F(Wig[w]))` on the Wigner output grid.
pub fn cohen_q(w: &Grid2, ker: &KernelSpec) -> Result<Grid2, CohenError> {
    cohen_q_opts(w, ker, CohenOpts::default())
}

pub fn cohen_q_opts(w: &Grid2, ker: &KernelSpec, opts: CohenOpts) -> Result<Grid2, CohenError> {
    let wig_w = wig(w)?;
    multiplier_stage(&wig_w, ker, opts.pad, false)
}

/// Inverse representation: divide the spectrum by `σ̂`, then invert the
/// Wigner transform. Fails when `|σ̂|` collapses on the lattice.
pub fn cohen_q_inverse(v: &Grid2, ker: &KernelSpec) -> Result<Grid2, CohenError> {
    cohen_q_inverse_opts(v, ker, CohenOpts::default())
}

pub fn cohen_q_inverse_opts(
    v: &Grid2,
    ker: &KernelSpec,
    opts: CohenOpts,
) -> Result<Grid2, CohenError> {
    v.require_kind(GridKind::WigPlane)?;
    let unfiltered = multiplier_stage(v, ker, opts.pad, true)?;
    wig_inverse(&unfiltered)
}

fn multiplier_stage(
    v: &Grid2,
    ker: &KernelSpec,
    pad: usize,
    invert: bool,
) -> Result<Grid2, CohenError> {
    let pad = pad.max(1);
    let n = v.n();
    let big = n * pad;
    let off = (pad - 1) * n / 2;
    let mut values = vec![ZERO; big * big];
    for i in 0..n {
        for j in 0..n {
            values[(i + off) * big + (j + off)] = v.value(i, j);
        }
    }
    let f0 = Axis {
        step: v.axes()[0].freq_step(big),
    };
    let f1 = Axis {
        step: v.axes()[1].freq_step(big),
    };
    if invert {
        let mut min = f64::INFINITY;
        for p in 0..big {
            let xi = f0.coord(p, big);
            for q in 0..big {
                min = min.min(ker.sigma_hat(xi, f1.coord(q, big)).norm());
            }
        }
        if min < 1e-13 {
            return Err(CohenError::KernelVanishes { min });
        }
    }
    centered_fft_2d(&mut values, big, false);
    for p in 0..big {
        let xi = f0.coord(p, big);
        for q in 0..big {
            let s = ker.sigma_hat(xi, f1.coord(q, big));
            let slot = &mut values[p * big + q];
            *slot = if invert { *slot / s } else { *slot * s };
        }
    }
    centered_fft_2d(&mut values, big, true);
    let mut out = vec![ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = values[(i + off) * big + (j + off)];
        }
    }
    Ok(v.with_values(out))
}

/// Applies a normal-ordered operator to grid samples: derivatives by
/// spectral differentiation (`D ↦` multiplication by the frequency under
/// the fixed transform convention), coordinate multiplications pointwise,
/// factors of each term acting right to left.
pub fn apply_op(op: &WeylOp, g: &Grid2) -> Grid2 {
    let n = g.n();
    // Group terms by derivative part so each (h,k) costs one transform pair.
    let mut groups: BTreeMap<(u32, u32), Vec<([u32; 2], Complex64)>> = BTreeMap::new();
    for (&[m, nn, h, k], &c) in op.terms() {
        groups.entry((h, k)).or_default().push(([m, nn], c));
    }
    let f0 = Axis {
        step: g.axes()[0].freq_step(n),
    };
    let f1 = Axis {
        step: g.axes()[1].freq_step(n),
    };
    let mut spectrum: Option<Vec<Complex64>> = None;
    let mut acc = vec![ZERO; n * n];
    for ((h, k), terms) in groups {
        // Derivative-free terms act pointwise; no transform pair needed.
        let part = if h == 0 && k == 0 {
            g.values().to_vec()
        } else {
            let spectrum = spectrum.get_or_insert_with(|| {
                let mut s = g.values().to_vec();
                centered_fft_2d(&mut s, n, false);
                s
            });
            let mut part = spectrum.clone();
            for p in 0..n {
                let xi = f0.coord(p, n).powi(h as i32);
                for q in 0..n {
                    part[p * n + q] *= xi * f1.coord(q, n).powi(k as i32);
                }
            }
            centered_fft_2d(&mut part, n, true);
            part
        };
        for i in 0..n {
            let x = g.coord0(i);
            for j in 0..n {
                let y = g.coord1(j);
                let mut w = ZERO;
                for ([m, nn], c) in &terms {
                    w += c * x.powi(*m as i32) * y.powi(*nn as i32);
                }
                acc[i * n + j] += w * part[i * n + j];
            }
        }
    }
    g.with_values(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Gen, Poly2};
    use crate::dsl::parse_poly2;

    const N: usize = 256;
    const L: f64 = 12.0;

    fn gaussian() -> Grid2 {
        Grid2::from_fn(N, L, |x, y| {
            Complex64::new((-(x * x + y * y) / 2.0).exp(), 0.0)
        })
        .unwrap()
    }

    fn rel_l2(a: &Grid2, b: &Grid2) -> f64 {
        let d = a.sub(b).unwrap().norm_l2();
        let nb = b.norm_l2();
        if d == 0.0 && nb == 0.0 {
            0.0
        } else {
            d / nb
        }
    }

    #[test]
    fn wig_of_gaussian_matches_closed_form() {
        // Wig[e^{−(x²+y²)/2}] = 2√π·e^{−x²−y²}
        let w = wig(&gaussian()).unwrap();
        let scale = 2.0 * std::f64::consts::PI.sqrt();
        let mut max_err: f64 = 0.0;
        for i in 0..N {
            let x = w.coord0(i);
            for j in 0..N {
                let y = w.coord1(j);
                let expected = scale * (-(x * x) - y * y).exp();
                max_err = max_err.max((w.value(i, j) - expected).norm());
            }
        }
        assert!(max_err <= 1e-10, "max err {max_err:e}");
    }

    #[test]
    fn wig_is_linear() {
        let w1 = gaussian();
        let w2 = Grid2::from_fn(N, L, |x, y| {
            Complex64::new(x * (-(x * x + y * y) / 2.0).exp(), 0.0)
        })
        .unwrap();
        let a = Complex64::new(0.7, -0.3);
        let b = Complex64::new(-1.2, 0.5);
        let combo = w1.scale(a).add(&w2.scale(b)).unwrap();
        let lhs = wig(&combo).unwrap();
        let rhs = wig(&w1).unwrap().scale(a).add(&wig(&w2).unwrap().scale(b)).unwrap();
        assert!(rel_l2(&lhs, &rhs) <= 1e-14);
    }

    #[test]
    fn wig_roundtrips() {
        for f in [
            Grid2::from_fn(N, L, |x, y| {
                Complex64::new((-(x * x + y * y) / 2.0).exp(), 0.0)
            })
            .unwrap(),
            Grid2::from_fn(N, L, |x, y| {
                Complex64::new(x * (-(x * x + y * y) / 2.0).exp(), 0.0)
            })
            .unwrap(),
        ] {
            let back = wig_inverse(&wig(&f).unwrap()).unwrap();
            assert!(rel_l2(&back, &f) <= 1e-12);
        }
    }

    #[test]
    fn wig_inverse_of_zero_is_zero() {
        let z = wig(&gaussian()).unwrap().scale(ZERO);
        let back = wig_inverse(&z).unwrap();
        assert!(back.norm_l2() == 0.0);
    }

    #[test]
    fn wig_inverse_demands_metadata() {
        assert!(matches!(
            wig_inverse(&gaussian()),
            Err(CohenError::Grid(GridError::MetadataMismatch { .. }))
        ));
    }

    #[test]
    fn sigma_hat_examples() {
        let w = wig(&gaussian()).unwrap();
        // P = 0, q = 1 → constant 1.
        let s = sigma_hat_on_grid(&KernelSpec::delta(), &w);
        assert!(s.values().iter().all(|v| (v - 1.0).norm() == 0.0));
        // q = 1, any P → |σ̂| ≡ 1.
        let ker = KernelSpec::new(parse_poly2("xi^2 - eta^2").unwrap(), Poly2::one()).unwrap();
        let s = sigma_hat_on_grid(&ker, &w);
        assert!(s
            .values()
            .iter()
            .all(|v| (v.norm() - 1.0).abs() <= 1e-15));
    }

    #[test]
    fn cohen_with_delta_kernel_equals_wig() {
        let w = gaussian();
        let q = cohen_q(&w, &KernelSpec::delta()).unwrap();
        let ww = wig(&w).unwrap();
        assert!(rel_l2(&q, &ww) <= 1e-13);
    }

    #[test]
    fn unimodular_multiplier_preserves_spectrum_magnitudes() {
        // The computable form of |σ̂| = 1, exact for the unpadded stage:
        // sample-by-sample spectrum magnitudes agree to 1e−12, and the L²
        // norms to 1e−10, for every phase including the chirps.
        let w = gaussian();
        let ww = wig(&w).unwrap();
        for ptext in ["xi*eta/2", "xi^2 - eta^2", "xi^2 + eta^3"] {
            let ker = KernelSpec::new(parse_poly2(ptext).unwrap(), Poly2::one()).unwrap();
            let q = cohen_q(&w, &ker).unwrap();
            let mut sw = ww.values().to_vec();
            let mut sq = q.values().to_vec();
            centered_fft_2d(&mut sw, N, false);
            centered_fft_2d(&mut sq, N, false);
            let max_mag_err = sw
                .iter()
                .zip(&sq)
                .map(|(a, b)| (a.norm() - b.norm()).abs())
                .fold(0.0, f64::max)
                / sw.iter().map(|v| v.norm()).fold(0.0, f64::max);
            assert!(max_mag_err <= 1e-12, "{ptext}: {max_mag_err:e}");
            assert!(
                (q.norm_l2() - ww.norm_l2()).abs() / ww.norm_l2() <= 1e-10,
                "{ptext}"
            );
        }
    }

    #[test]
    fn cohen_roundtrip_with_cubic_phase() {
        // Degree-3 phase: the output looks nothing like the input, but the
        // multiplier stage inverts exactly and the Wigner roundtrip holds.
        let w = gaussian();
        let ker = KernelSpec::new(parse_poly2("xi^2 + eta^3").unwrap(), Poly2::one()).unwrap();
        let back = cohen_q_inverse(&cohen_q(&w, &ker).unwrap(), &ker).unwrap();
        assert!(rel_l2(&back, &w) <= 1e-9);
    }

    #[test]
    fn cohen_roundtrip_with_polynomial_factor() {
        let w = gaussian();
        let ker = KernelSpec::new(Poly2::zero(), parse_poly2("xi^2 + 1").unwrap()).unwrap();
        let back = cohen_q_inverse(&cohen_q(&w, &ker).unwrap(), &ker).unwrap();
        assert!(rel_l2(&back, &w) <= 1e-9);
    }

    #[test]
    fn apply_op_multiplication_and_derivative() {
        let w = gaussian();
        // M₁: x·w.
        let xw = apply_op(&WeylOp::generator(Gen::M1), &w);
        let mut max_err: f64 = 0.0;
        for i in 0..N {
            for j in 0..N {
                let expected = w.value(i, j) * w.coord0(i);
                max_err = max_err.max((xw.value(i, j) - expected).norm());
            }
        }
        assert!(max_err <= 1e-12);

        // D₁ on the Gaussian: i·x·e^{−(x²+y²)/2}, interior error ≤ 1e−10.
        let dw = apply_op(&WeylOp::generator(Gen::D1), &w);
        let mut max_err: f64 = 0.0;
        for i in 0..N {
            let x = w.coord0(i);
            if x.abs() > L - 2.0 {
                continue;
            }
            for j in 0..N {
                let y = w.coord1(j);
                if y.abs() > L - 2.0 {
                    continue;
                }
                let expected = Complex64::new(0.0, x) * w.value(i, j);
                max_err = max_err.max((dw.value(i, j) - expected).norm());
            }
        }
        assert!(max_err <= 1e-10, "{max_err:e}");
    }

    #[test]
    fn harmonic_oscillator_eigenvalue_on_grid() {
        let w = gaussian();
        let ho = WeylOp::generator(Gen::M1)
            .pow(2)
            .add(&WeylOp::generator(Gen::D1).pow(2));
        let hw = apply_op(&ho, &w);
        assert!(rel_l2(&hw, &w) <= 1e-9);
    }
}
