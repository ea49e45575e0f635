//! Cohen-class kernel data: a real phase polynomial `P` and a spectral
//! factor `q`, together defining `σ̂(ξ,η) = q(ξ,η)·e^{−iP(ξ,η)}`.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use super::Poly2;
use crate::util::nelder_mead;

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("phase polynomial P must have exactly real coefficients")]
    PhaseNotReal,
    #[error("factor q vanishes on the real plane near ({xi}, {eta}) (|q| = {value:e})")]
    VanishingFactor { xi: f64, eta: f64, value: f64 },
}

/// Kernel specification for a Cohen-class representation `Q = σ ∗ Wig`.
///
/// Construction validates that `P` is real and spot-checks the claim that
/// `q` never vanishes on ℝ² (dense sampling plus local minimization on an
/// expanding box; a found zero is a hard error). The partial derivatives
/// `P₁ = ∂_ξP` and `P₂ = ∂_ηP` are always recomputed from `P`.
#[derive(Clone, Debug, Serialize)]
pub struct KernelSpec {
    p: Poly2,
    q: Poly2,
}

impl KernelSpec {
    pub fn new(p: Poly2, q: Poly2) -> Result<Self, KernelError> {
        if !p.is_real() {
            return Err(KernelError::PhaseNotReal);
        }
        check_nonvanishing(&q)?;
        Ok(Self { p, q })
    }

    /// The kernel with `P = 0`, `q = 1`; then `σ = δ` and `Q = Wig`.
    pub fn delta() -> Self {
        Self {
            p: Poly2::zero(),
            q: Poly2::one(),
        }
    }

    pub fn phase(&self) -> &Poly2 {
        &self.p
    }

    pub fn q(&self) -> &Poly2 {
        &self.q
    }

    /// `P₁ = ∂_ξ P`.
    pub fn p1(&self) -> Poly2 {
        self.p.diff(0)
    }

    /// `P₂ = ∂_η P`.
    pub fn p2(&self) -> Poly2 {
        self.p.diff(1)
    }

    pub fn has_trivial_q(&self) -> bool {
        self.q == Poly2::one()
    }

    /// `σ̂` evaluated at a real frequency point.
    pub fn sigma_hat(&self, xi: f64, eta: f64) -> Complex64 {
        let phase = self.p.eval_real(xi, eta).re;
        self.q.eval_real(xi, eta) * Complex64::new(0.0, -phase).exp()
    }
}

/// Dense sampling of |q| on boxes [−R,R]² for growing R, refining the worst
/// sample with Nelder–Mead. This is a spot check, not a proof.
fn check_nonvanishing(q: &Poly2) -> Result<(), KernelError> {
    const GRID: i32 = 40;
    const THRESHOLD: f64 = 1e-12;
    if q.is_zero() {
        return Err(KernelError::VanishingFactor {
            xi: 0.0,
            eta: 0.0,
            value: 0.0,
        });
    }
    if q.degree() == 0 {
        return Ok(());
    }
    let abs_q = |p: &[f64]| q.eval_real(p[0], p[1]).norm();
    for radius in [1.0, 4.0, 16.0, 64.0, 256.0] {
        let mut best = (f64::INFINITY, [0.0, 0.0]);
        for a in -GRID..=GRID {
            for b in -GRID..=GRID {
                let xi = radius * a as f64 / GRID as f64;
                let eta = radius * b as f64 / GRID as f64;
                let v = abs_q(&[xi, eta]);
                if v < best.0 {
                    best = (v, [xi, eta]);
                }
            }
        }
        let (point, value) = nelder_mead(abs_q, &best.1, radius / GRID as f64, 200);
        if value < THRESHOLD {
            return Err(KernelError::VanishingFactor {
                xi: point[0],
                eta: point[1],
                value,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_complex_phase() {
        let p = Poly2::monomial(1, 0, Complex64::new(0.0, 1.0));
        assert_eq!(
            KernelSpec::new(p, Poly2::one()).unwrap_err(),
            KernelError::PhaseNotReal
        );
    }

    #[test]
    fn accepts_xi_squared_plus_one() {
        // q(i) = 0 is a complex zero; q never vanishes on ℝ².
        let mut q = Poly2::one();
        q.add_term(2, 0, Complex64::new(1.0, 0.0));
        assert!(KernelSpec::new(Poly2::zero(), q).is_ok());
    }

    #[test]
    fn rejects_vanishing_q() {
        // q = ξ² + η² vanishes at the origin.
        let mut q = Poly2::monomial(2, 0, Complex64::new(1.0, 0.0));
        q.add_term(0, 2, Complex64::new(1.0, 0.0));
        match KernelSpec::new(Poly2::zero(), q) {
            Err(KernelError::VanishingFactor { value, .. }) => assert!(value < 1e-12),
            other => panic!("expected vanishing factor, got {other:?}"),
        }
    }

    #[test]
    fn rejects_offaxis_zero() {
        // q = (ξ−3)² + (η+2)² vanishes at (3, −2), away from the sample grid origin.
        let mut q = Poly2::zero();
        q.add_term(2, 0, Complex64::new(1.0, 0.0));
        q.add_term(1, 0, Complex64::new(-6.0, 0.0));
        q.add_term(0, 2, Complex64::new(1.0, 0.0));
        q.add_term(0, 1, Complex64::new(4.0, 0.0));
        q.add_term(0, 0, Complex64::new(13.0, 0.0));
        match KernelSpec::new(Poly2::zero(), q) {
            Err(KernelError::VanishingFactor { xi, eta, .. }) => {
                assert!((xi - 3.0).abs() < 1e-3 && (eta + 2.0).abs() < 1e-3);
            }
            other => panic!("expected vanishing factor, got {other:?}"),
        }
    }

    #[test]
    fn unimodular_sigma_hat() {
        let p = Poly2::monomial(1, 1, Complex64::new(0.5, 0.0));
        let ker = KernelSpec::new(p, Poly2::one()).unwrap();
        // At (2,3): e^{−3i}
        let v = ker.sigma_hat(2.0, 3.0);
        let expected = Complex64::new(0.0, -3.0).exp();
        assert!((v - expected).norm() < 1e-15);
        assert!((v.norm() - 1.0).abs() < 1e-15);
    }
}
