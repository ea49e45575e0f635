//! Exact backend: functions of the form `p(v)·exp(−½ vᵀAv + bᵀv + c)` with
//! a complex symmetric `A` whose real part is positive definite.
//!
//! The class is closed under everything the harness needs: coordinate
//! multiplication, differentiation, invertible real-linear changes of
//! variables, partial Fourier transforms (complete the square), and
//! multiplication of the spectrum by `q·e^{−iP}` for `deg P ≤ 2`.

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::{KernelSpec, Poly2, WeylOp};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const NEG_I: Complex64 = Complex64::new(0.0, -1.0);

#[derive(Debug, Error, PartialEq)]
pub enum PgError {
    #[error("real part of the quadratic form is not positive definite (minors {m1:e}, {m2:e})")]
    NotPositiveDefinite { m1: f64, m2: f64 },
    #[error("degenerate Gaussian: Re of the integrated-axis coefficient is {0:e}")]
    DegenerateGaussian(f64),
    #[error("degree of P exceeds 2 (got {0})")]
    PhaseDegreeTooHigh(u32),
    #[error("summands carry different Gaussian exponents")]
    ExponentMismatch,
}

/// `p(v)·exp(−½ vᵀAv + bᵀv + c)` on ℝ².
#[derive(Clone, Debug, PartialEq)]
pub struct PolyGauss {
    p: Poly2,
    a: [[Complex64; 2]; 2],
    b: [Complex64; 2],
    c: Complex64,
}

/// Leading-principal-minor tolerance for the positive definiteness check.
const MINOR_TOL: f64 = 1e-12;

impl PolyGauss {
    pub fn new(
        p: Poly2,
        a: [[Complex64; 2]; 2],
        b: [Complex64; 2],
        c: Complex64,
    ) -> Result<Self, PgError> {
        let a = [[a[0][0], (a[0][1] + a[1][0]) * 0.5], [
            (a[0][1] + a[1][0]) * 0.5,
            a[1][1],
        ]];
        let m1 = a[0][0].re;
        let m2 = a[0][0].re * a[1][1].re - a[0][1].re * a[1][0].re;
        if m1 <= MINOR_TOL || m2 <= MINOR_TOL {
            return Err(PgError::NotPositiveDefinite { m1, m2 });
        }
        Ok(Self { p, a, b, c })
    }

    /// `e^{−(x²+y²)/2}`.
    pub fn standard_gaussian() -> Self {
        Self::new(
            Poly2::one(),
            [[ONE, ZERO], [ZERO, ONE]],
            [ZERO, ZERO],
            ZERO,
        )
        .unwrap()
    }

    /// Standard Gaussian with a polynomial prefactor.
    pub fn gaussian_with_poly(p: Poly2) -> Self {
        Self::new(p, [[ONE, ZERO], [ZERO, ONE]], [ZERO, ZERO], ZERO).unwrap()
    }

    pub fn poly(&self) -> &Poly2 {
        &self.p
    }

    pub fn value(&self, x: f64, y: f64) -> Complex64 {
        let v = [Complex64::new(x, 0.0), Complex64::new(y, 0.0)];
        let quad = self.a[0][0] * v[0] * v[0]
            + (self.a[0][1] + self.a[1][0]) * v[0] * v[1]
            + self.a[1][1] * v[1] * v[1];
        let e = -0.5 * quad + self.b[0] * v[0] + self.b[1] * v[1] + self.c;
        self.p.eval(v[0], v[1]) * e.exp()
    }

    /// |e^{E(x,y)}| = e^{Re E(x,y)}, the Gaussian envelope without the
    /// polynomial prefactor.
    pub fn gauss_abs(&self, x: f64, y: f64) -> f64 {
        let quad = self.a[0][0].re * x * x
            + (self.a[0][1] + self.a[1][0]).re * x * y
            + self.a[1][1].re * y * y;
        (-0.5 * quad + self.b[0].re * x + self.b[1].re * y + self.c.re).exp()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            p: self.p.scale(s),
            ..self.clone()
        }
    }

    /// Sum of two members with the same Gaussian exponent.
    pub fn add(&self, other: &Self) -> Result<Self, PgError> {
        let close = |u: Complex64, v: Complex64| (u - v).norm() <= 1e-12 * (1.0 + u.norm());
        let same = (0..2).all(|i| (0..2).all(|j| close(self.a[i][j], other.a[i][j])))
            && (0..2).all(|i| close(self.b[i], other.b[i]))
            && close(self.c, other.c);
        if !same {
            return Err(PgError::ExponentMismatch);
        }
        Ok(Self {
            p: self.p.add(&other.p),
            ..self.clone()
        })
    }

    /// Multiplication by the coordinate `v_axis`.
    pub fn mul_coord(&self, axis: usize) -> Self {
        let mono = if axis == 0 {
            Poly2::xi()
        } else {
            Poly2::eta()
        };
        Self {
            p: self.p.mul(&mono),
            ..self.clone()
        }
    }

    /// `D = −i∂` along `axis`: product rule on `p·e^{E}` with `∂E` linear.
    pub fn diff_d(&self, axis: usize) -> Self {
        let other = 1 - axis;
        // ∂E/∂v = −a_vv·v − a_vs·s + b_v
        let mut de = Poly2::constant(self.b[axis]);
        let var = |ax: usize| if ax == 0 { Poly2::xi() } else { Poly2::eta() };
        de = de.add(&var(axis).scale(-self.a[axis][axis]));
        de = de.add(&var(other).scale(-self.a[axis][other]));
        let p = self.p.diff(axis).add(&self.p.mul(&de)).scale(NEG_I);
        Self { p, ..self.clone() }
    }

    /// Applies a normal-ordered operator exactly; terms act right to left
    /// (derivatives first, then coordinate multiplications).
    pub fn apply_weyl(&self, op: &WeylOp) -> Self {
        let mut acc = Self {
            p: Poly2::zero(),
            ..self.clone()
        };
        for (&[m, n, h, k], &coeff) in op.terms() {
            let mut g = self.clone();
            for _ in 0..k {
                g = g.diff_d(1);
            }
            for _ in 0..h {
                g = g.diff_d(0);
            }
            for _ in 0..m {
                g = g.mul_coord(0);
            }
            for _ in 0..n {
                g = g.mul_coord(1);
            }
            acc.p = acc.p.add(&g.p.scale(coeff));
        }
        acc
    }

    /// Precomposition with the real-linear map `v ↦ Mv`.
    pub fn linear_change(&self, m: [[f64; 2]; 2]) -> Result<Self, PgError> {
        let mc = [
            [Complex64::new(m[0][0], 0.0), Complex64::new(m[0][1], 0.0)],
            [Complex64::new(m[1][0], 0.0), Complex64::new(m[1][1], 0.0)],
        ];
        // A' = MᵀAM, b' = Mᵀb
        let mut a = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for r in 0..2 {
                    for s in 0..2 {
                        a[i][j] += mc[r][i] * self.a[r][s] * mc[s][j];
                    }
                }
            }
        }
        let b = [
            mc[0][0] * self.b[0] + mc[1][0] * self.b[1],
            mc[0][1] * self.b[0] + mc[1][1] * self.b[1],
        ];
        let row0 = Poly2::xi().scale(mc[0][0]).add(&Poly2::eta().scale(mc[0][1]));
        let row1 = Poly2::xi().scale(mc[1][0]).add(&Poly2::eta().scale(mc[1][1]));
        let p = self.p.substitute(&row0, &row1);
        Self::new(p, a, b, self.c)
    }

    /// Closed-form partial Fourier transform along `axis` with kernel
    /// `e^{sign·i·u·ω}`; `sign = −1` is the forward convention.
    pub fn partial_ft(&self, axis: usize, sign: f64) -> Result<Self, PgError> {
        let other = 1 - axis;
        let alpha = self.a[axis][axis];
        if alpha.re <= MINOR_TOL {
            return Err(PgError::DegenerateGaussian(alpha.re));
        }
        // β(s, ω) = b_u − a_us·s + sign·i·ω in the output variable slots.
        let p0 = self.b[axis];
        let ps = -self.a[axis][other];
        let pw = Complex64::new(0.0, sign);
        let var = |ax: usize| if ax == 0 { Poly2::xi() } else { Poly2::eta() };
        let beta = Poly2::constant(p0)
            .add(&var(other).scale(ps))
            .add(&var(axis).scale(pw));

        // Group p by powers of the integrated variable; spectators keep
        // their slot in the output.
        let max_k = self
            .p
            .terms()
            .map(|(&(i, j), _)| if axis == 0 { i } else { j })
            .max()
            .unwrap_or(0);
        let mut by_k: Vec<Poly2> = vec![Poly2::zero(); max_k as usize + 1];
        for (&(i, j), &coeff) in self.p.terms() {
            let (k, s_exp) = if axis == 0 { (i, j) } else { (j, i) };
            let mono = if other == 0 {
                Poly2::monomial(s_exp, 0, coeff)
            } else {
                Poly2::monomial(0, s_exp, coeff)
            };
            by_k[k as usize] = by_k[k as usize].add(&mono);
        }

        // ∫ u^k e^{−½αu²+βu} du = √(2π/α)·e^{β²/(2α)}·G_k(β),
        // G₀ = 1, G_{k+1} = (β/α)·G_k + G_k′; assemble Σ_k c_k(s)·G_k(β).
        let mut beta_pows = vec![Poly2::one()];
        let mut gk: Vec<Complex64> = vec![ONE]; // coefficients of G_k in β
        let mut poly = Poly2::zero();
        for (k, ck) in by_k.iter().enumerate() {
            if k > 0 {
                let mut next = vec![ZERO; k + 1];
                for (j, &gj) in gk.iter().enumerate() {
                    next[j + 1] += gj / alpha;
                    if j > 0 {
                        next[j - 1] += gj * j as f64;
                    }
                }
                gk = next;
            }
            if ck.is_zero() {
                continue;
            }
            let mut gk_poly = Poly2::zero();
            for (j, &gj) in gk.iter().enumerate() {
                if gj != ZERO {
                    while beta_pows.len() <= j {
                        let last = beta_pows.last().unwrap().mul(&beta);
                        beta_pows.push(last);
                    }
                    gk_poly = gk_poly.add(&beta_pows[j].scale(gj));
                }
            }
            poly = poly.add(&ck.mul(&gk_poly));
        }
        let scalar = (Complex64::new(2.0 * std::f64::consts::PI, 0.0) / alpha).sqrt();
        let poly = poly.scale(scalar);

        // Exponent update from completing the square: +β²/(2α).
        let mut a = self.a;
        let mut b = self.b;
        a[axis][axis] = -pw * pw / alpha;
        let cross = -ps * pw / alpha;
        a[axis][other] = cross;
        a[other][axis] = cross;
        a[other][other] = self.a[other][other] - ps * ps / alpha;
        b[axis] = p0 * pw / alpha;
        b[other] = self.b[other] + p0 * ps / alpha;
        let c = self.c + p0 * p0 / (2.0 * alpha);
        Self::new(poly, a, b, c)
    }

    /// Full forward transform `F(f)(ξ,η) = ∫∫ e^{−i⟨v,ξ⟩} f(v) dv`.
    pub fn ft2(&self) -> Result<Self, PgError> {
        self.partial_ft(0, -1.0)?.partial_ft(1, -1.0)
    }

    /// Inverse transform with the (2π)⁻² normalization.
    pub fn ift2(&self) -> Result<Self, PgError> {
        let g = self.partial_ft(0, 1.0)?.partial_ft(1, 1.0)?;
        let scale = 1.0 / (4.0 * std::f64::consts::PI * std::f64::consts::PI);
        Ok(g.scale(Complex64::new(scale, 0.0)))
    }

    /// Exact Wigner transform: change of variables
    /// `(x,t) ↦ (x+½t, x−½t)` then the partial transform in `t`.
    pub fn wig_exact(&self) -> Result<Self, PgError> {
        self.linear_change([[1.0, 0.5], [1.0, -0.5]])?
            .partial_ft(1, -1.0)
    }

    /// Exact Cohen-class representation `Q[f]` for a quadratic-phase kernel:
    /// forward transform of `Wig[f]`, spectrum multiplied by `q·e^{−iP}`,
    /// inverse transform.
    pub fn cohen_exact(&self, ker: &KernelSpec) -> Result<Self, PgError> {
        let p_deg = ker.phase().degree();
        if p_deg > 2 {
            return Err(PgError::PhaseDegreeTooHigh(p_deg));
        }
        let mut spec = self.wig_exact()?.ft2()?;
        spec.p = spec.p.mul(ker.q());
        // E ← E − iP for P = p₂₀ξ² + p₁₁ξη + p₀₂η² + p₁₀ξ + p₀₁η + p₀₀.
        let phase = ker.phase();
        let i = Complex64::new(0.0, 1.0);
        spec.a[0][0] += 2.0 * i * phase.coeff(2, 0);
        spec.a[1][1] += 2.0 * i * phase.coeff(0, 2);
        let cross = i * phase.coeff(1, 1);
        spec.a[0][1] += cross;
        spec.a[1][0] += cross;
        spec.b[0] -= i * phase.coeff(1, 0);
        spec.b[1] -= i * phase.coeff(0, 1);
        spec.c -= i * phase.coeff(0, 0);
        spec.ift2()
    }

    /// Sup of |f| over a centered box, by coarse scan plus local refinement.
    pub fn sup_on_box(&self, half_width: f64, step: f64) -> f64 {
        let n = (2.0 * half_width / step).ceil() as usize + 1;
        let mut best = (0.0f64, 0.0f64, 0.0f64);
        for i in 0..n {
            let x = -half_width + i as f64 * step;
            for j in 0..n {
                let y = -half_width + j as f64 * step;
                let v = self.value(x, y).norm();
                if v > best.0 {
                    best = (v, x, y);
                }
            }
        }
        let (p, neg) = crate::util::nelder_mead(
            |p| -self.value(p[0], p[1]).norm(),
            &[best.1, best.2],
            step,
            80,
        );
        let refined = if p[0].abs() <= half_width && p[1].abs() <= half_width {
            -neg
        } else {
            best.0
        };
        refined.max(best.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Gen;

    #[test]
    fn wig_of_standard_gaussian_is_2sqrtpi_gaussian() {
        let w = PolyGauss::standard_gaussian().wig_exact().unwrap();
        let scale = 2.0 * std::f64::consts::PI.sqrt();
        for (x, y) in [(0.0f64, 0.0f64), (0.7, -1.3), (2.0, 1.0)] {
            let expected = scale * (-(x * x) - y * y).exp();
            assert!((w.value(x, y) - Complex64::new(expected, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn ft_roundtrip() {
        let f = PolyGauss::gaussian_with_poly({
            let mut p = Poly2::xi().scale(Complex64::new(1.0, 0.0));
            p.add_term(0, 1, Complex64::new(0.5, -0.25));
            p
        });
        let back = f.ft2().unwrap().ift2().unwrap();
        for (x, y) in [(0.0, 0.0), (1.1, 0.3), (-2.0, 1.7)] {
            assert!((f.value(x, y) - back.value(x, y)).norm() < 1e-12);
        }
    }

    #[test]
    fn apply_weyl_matches_hand_derivatives() {
        let f = PolyGauss::standard_gaussian();
        // M₁: multiply by x.
        let xf = f.apply_weyl(&WeylOp::generator(Gen::M1));
        assert!((xf.value(1.5, 0.0) - 1.5 * f.value(1.5, 0.0)).norm() < 1e-14);
        // D₁ on e^{−(x²+y²)/2} = i·x·e^{−(x²+y²)/2}.
        let df = f.apply_weyl(&WeylOp::generator(Gen::D1));
        let expected = Complex64::new(0.0, 1.5) * f.value(1.5, -0.4);
        assert!((df.value(1.5, -0.4) - expected).norm() < 1e-14);
    }

    #[test]
    fn harmonic_oscillator_eigenfunction() {
        // (M₁² + D₁²)·e^{−x²/2}g(y) = e^{−x²/2}g(y), coefficient-exact.
        let f = PolyGauss::standard_gaussian();
        let ho = WeylOp::generator(Gen::M1)
            .pow(2)
            .add(&WeylOp::generator(Gen::D1).pow(2));
        let g = f.apply_weyl(&ho);
        assert_eq!(g.poly(), f.poly());
    }

    #[test]
    fn cohen_exact_rejects_cubic_phase() {
        // Degree check happens before the q spot-check can matter.
        let p = crate::dsl::parse_poly2("xi^3").unwrap();
        let ker = KernelSpec::new(p, Poly2::one()).unwrap();
        assert_eq!(
            PolyGauss::standard_gaussian().cohen_exact(&ker).unwrap_err(),
            PgError::PhaseDegreeTooHigh(3)
        );
    }

    #[test]
    fn cohen_with_delta_kernel_is_wigner() {
        let f = PolyGauss::standard_gaussian();
        let q = f.cohen_exact(&KernelSpec::delta()).unwrap();
        let w = f.wig_exact().unwrap();
        for (x, y) in [(0.0, 0.0), (1.0, -0.5), (-1.2, 2.0)] {
            assert!((q.value(x, y) - w.value(x, y)).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_degenerate() {
        let r = PolyGauss::new(
            Poly2::one(),
            [[ZERO, ZERO], [ZERO, ONE]],
            [ZERO, ZERO],
            ZERO,
        );
        assert!(matches!(r, Err(PgError::NotPositiveDefinite { .. })));
    }
}
