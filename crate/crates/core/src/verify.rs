//! Residual harness for the operator intertwining identities.
//!
//! Five named identities are checked by computing both sides independently
//! and reporting L² residuals:
//!
//! * `wig-lemma21`:    `P(D₁,D₂)·Wig[w] = Wig[P(D₁+D₂, M₂−M₁)·w]`
//! * `wig-prop22`:     `B·Wig[w] = Wig[B(½(M₂+M₁),½(D₁−D₂),D₁+D₂,M₂−M₁)·w]`
//! * `bar-thm34`:      `B·Q[w] = Q[B̄·w]`
//! * `tilde-thm35`:    `Q[B·w] = B̃·Q[w]`
//! * `sigma1-thm310`:  `Q^{(σ₁)}[B·w] = (AB)~ · Q^{(σ)}[w]`, `A = q(D₁+D₂, M₂−M₁)`
//!
//! Inputs can live on either backend: sampled grids, or exact
//! polynomial×Gaussian closed forms (the latter require `deg P ≤ 2`).

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{a_of_q, Gen, KernelSpec, Poly2, WeylOp};
use crate::cohen::{apply_op, cohen_q_opts, wig, CohenError, CohenOpts};
use crate::grid::{Axis, Grid2, GridError, GridKind};
use crate::polygauss::{PgError, PolyGauss};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Identity {
    WigLemma21,
    WigProp22,
    BarThm34,
    TildeThm35,
    Sigma1Thm310,
}

impl Identity {
    pub const ALL: [Identity; 5] = [
        Identity::WigLemma21,
        Identity::WigProp22,
        Identity::BarThm34,
        Identity::TildeThm35,
        Identity::Sigma1Thm310,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::WigLemma21 => "wig-lemma21",
            Identity::WigProp22 => "wig-prop22",
            Identity::BarThm34 => "bar-thm34",
            Identity::TildeThm35 => "tilde-thm35",
            Identity::Sigma1Thm310 => "sigma1-thm310",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|id| id.name() == name)
    }
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("wig-lemma21 requires a constant-coefficient operator")]
    NotConstantCoefficient,
    #[error(transparent)]
    Cohen(#[from] CohenError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Exact(#[from] PgError),
}

/// A test function on one of the two backends, with a display label.
#[derive(Clone, Debug)]
pub enum TestInput {
    Grid { w: Grid2, label: String },
    Exact { f: PolyGauss, label: String },
}

impl TestInput {
    pub fn label(&self) -> &str {
        match self {
            TestInput::Grid { label, .. } | TestInput::Exact { label, .. } => label,
        }
    }

    pub fn backend_name(&self) -> &'static str {
        match self {
            TestInput::Grid { .. } => "grid",
            TestInput::Exact { .. } => "exact",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOpts {
    /// Grid size for the grid backend and for sampling exact-backend
    /// residuals.
    pub n: usize,
    /// Half-width of the spatial box.
    pub l: f64,
    /// Zero-padding factor for the Cohen multiplier stage (grid backend).
    pub pad: usize,
}

impl Default for VerifyOpts {
    fn default() -> Self {
        Self {
            n: 256,
            l: 12.0,
            pad: 1,
        }
    }
}

/// One identity check: name, backend, grid parameters, residuals, operands.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub backend: String,
    pub n: usize,
    pub l: f64,
    pub pad: usize,
    pub operator: String,
    pub phase: String,
    pub factor: String,
    pub input: String,
    pub abs_residual: f64,
    pub rel_residual: f64,
}

/// Relative residual with the 0/0 → 0 convention.
fn rel(abs: f64, denom: f64) -> f64 {
    if abs == 0.0 && denom == 0.0 {
        0.0
    } else {
        abs / denom
    }
}

pub fn verify_identity(
    id: Identity,
    op: &WeylOp,
    ker: &KernelSpec,
    input: &TestInput,
    opts: VerifyOpts,
) -> Result<IdentityReport, VerifyError> {
    if id == Identity::WigLemma21 {
        let constant_coeff = op.terms().all(|(&[m, n, _, _], _)| m == 0 && n == 0);
        if !constant_coeff {
            return Err(VerifyError::NotConstantCoefficient);
        }
    }
    let (abs, denom) = match input {
        TestInput::Grid { w, .. } => grid_sides(id, op, ker, w, opts)?,
        TestInput::Exact { f, .. } => exact_sides(id, op, ker, f, opts)?,
    };
    Ok(IdentityReport {
        identity: id.name().to_owned(),
        backend: input.backend_name().to_owned(),
        n: opts.n,
        l: opts.l,
        pad: opts.pad,
        operator: op.pretty(),
        phase: ker.phase().pretty(["xi", "eta"]),
        factor: ker.q().pretty(["xi", "eta"]),
        input: input.label().to_owned(),
        abs_residual: abs,
        rel_residual: rel(abs, denom),
    })
}

fn grid_sides(
    id: Identity,
    op: &WeylOp,
    ker: &KernelSpec,
    w: &Grid2,
    opts: VerifyOpts,
) -> Result<(f64, f64), VerifyError> {
    let copts = CohenOpts { pad: opts.pad };
    let (lhs, rhs) = match id {
        Identity::WigLemma21 | Identity::WigProp22 => {
            let lhs = apply_op(op, &wig(w)?);
            let rhs = wig(&apply_op(&op.wig_pushforward(), w))?;
            (lhs, rhs)
        }
        Identity::BarThm34 => {
            let lhs = apply_op(op, &cohen_q_opts(w, ker, copts)?);
            let rhs = cohen_q_opts(&apply_op(&op.bar_transform(ker), w), ker, copts)?;
            (lhs, rhs)
        }
        Identity::TildeThm35 => {
            let lhs = cohen_q_opts(&apply_op(op, w), ker, copts)?;
            let rhs = apply_op(&op.tilde_transform(ker), &cohen_q_opts(w, ker, copts)?);
            (lhs, rhs)
        }
        Identity::Sigma1Thm310 => {
            let plain = KernelSpec::new(ker.phase().clone(), Poly2::one())
                .expect("phase already validated");
            let ab = a_of_q(ker.q()).normal_mul(op);
            let lhs = cohen_q_opts(&apply_op(op, w), ker, copts)?;
            let rhs = apply_op(&ab.tilde_transform(&plain), &cohen_q_opts(w, &plain, copts)?);
            (lhs, rhs)
        }
    };
    let abs = lhs.sub(&rhs)?.norm_l2();
    Ok((abs, rhs.norm_l2()))
}

fn exact_sides(
    id: Identity,
    op: &WeylOp,
    ker: &KernelSpec,
    f: &PolyGauss,
    opts: VerifyOpts,
) -> Result<(f64, f64), VerifyError> {
    let (lhs, rhs) = match id {
        Identity::WigLemma21 | Identity::WigProp22 => {
            let lhs = f.wig_exact()?.apply_weyl(op);
            let rhs = f.apply_weyl(&op.wig_pushforward()).wig_exact()?;
            (lhs, rhs)
        }
        Identity::BarThm34 => {
            let lhs = f.cohen_exact(ker)?.apply_weyl(op);
            let rhs = f.apply_weyl(&op.bar_transform(ker)).cohen_exact(ker)?;
            (lhs, rhs)
        }
        Identity::TildeThm35 => {
            let lhs = f.apply_weyl(op).cohen_exact(ker)?;
            let rhs = f.cohen_exact(ker)?.apply_weyl(&op.tilde_transform(ker));
            (lhs, rhs)
        }
        Identity::Sigma1Thm310 => {
            let plain = KernelSpec::new(ker.phase().clone(), Poly2::one())
                .expect("phase already validated");
            let ab = a_of_q(ker.q()).normal_mul(op);
            let lhs = f.apply_weyl(op).cohen_exact(ker)?;
            let rhs = f
                .cohen_exact(&plain)?
                .apply_weyl(&ab.tilde_transform(&plain));
            (lhs, rhs)
        }
    };
    // Residual by direct evaluation of the closed forms on the Wigner
    // output lattice for the configured (N, L).
    let n = opts.n;
    let dx = 2.0 * opts.l / n as f64;
    let ax0 = Axis { step: dx };
    let ax1 = Axis {
        step: std::f64::consts::PI / (2.0 * opts.l),
    };
    let mut sum_diff = 0.0;
    let mut sum_rhs = 0.0;
    for i in 0..n {
        let x = ax0.coord(i, n);
        for j in 0..n {
            let y = ax1.coord(j, n);
            let a = lhs.value(x, y);
            let b = rhs.value(x, y);
            sum_diff += (a - b).norm_sqr();
            sum_rhs += b.norm_sqr();
        }
    }
    let cell = ax0.step * ax1.step;
    Ok(((sum_diff * cell).sqrt(), (sum_rhs * cell).sqrt()))
}

// ---------------------------------------------------------------------------
// The standard test matrix
// ---------------------------------------------------------------------------

/// The twisted Laplacian `L = (D₁−½M₂)² + (D₂+½M₁)²`.
pub fn twisted_laplacian() -> WeylOp {
    let half = Complex64::new(0.5, 0.0);
    let d1 = WeylOp::generator(Gen::D1);
    let d2 = WeylOp::generator(Gen::D2);
    let m1 = WeylOp::generator(Gen::M1);
    let m2 = WeylOp::generator(Gen::M2);
    d1.sub(&m2.scale(half))
        .pow(2)
        .add(&d2.add(&m1.scale(half)).pow(2))
}

/// The harmonic oscillator (in the first variable) `M₁² + D₁²`.
pub fn harmonic_oscillator() -> WeylOp {
    WeylOp::generator(Gen::M1)
        .pow(2)
        .add(&WeylOp::generator(Gen::D1).pow(2))
}

/// The five operators of the standard matrix.
pub fn standard_operators() -> Vec<(String, WeylOp)> {
    let m1 = WeylOp::generator(Gen::M1);
    let d1 = WeylOp::generator(Gen::D1);
    vec![
        ("M1".to_owned(), m1.clone()),
        ("D1".to_owned(), d1.clone()),
        ("M1*D1".to_owned(), m1.normal_mul(&d1)),
        ("M1^2+D1^2".to_owned(), harmonic_oscillator()),
        ("twisted".to_owned(), twisted_laplacian()),
    ]
}

/// The three phases of the standard matrix: 0, ½ξη, ξ²−η².
pub fn standard_phases() -> Vec<(String, Poly2)> {
    let half_shear = Poly2::monomial(1, 1, Complex64::new(0.5, 0.0));
    let mut saddle = Poly2::monomial(2, 0, Complex64::new(1.0, 0.0));
    saddle.add_term(0, 2, Complex64::new(-1.0, 0.0));
    vec![
        ("0".to_owned(), Poly2::zero()),
        ("xi*eta/2".to_owned(), half_shear),
        ("xi^2-eta^2".to_owned(), saddle),
    ]
}

/// The two spectral factors of the standard matrix: 1 and ξ²+η²+1.
pub fn standard_factors() -> Vec<(String, Poly2)> {
    let mut q = Poly2::one();
    q.add_term(2, 0, Complex64::new(1.0, 0.0));
    q.add_term(0, 2, Complex64::new(1.0, 0.0));
    vec![("1".to_owned(), Poly2::one()), ("xi^2+eta^2+1".to_owned(), q)]
}

/// The three test functions: Gaussian, x·Gaussian, (x²+y)·Gaussian.
pub fn standard_prefactors() -> Vec<(String, Poly2)> {
    let mut x2y = Poly2::monomial(2, 0, Complex64::new(1.0, 0.0));
    x2y.add_term(0, 1, Complex64::new(1.0, 0.0));
    vec![
        ("gaussian".to_owned(), Poly2::one()),
        ("x*gaussian".to_owned(), Poly2::xi()),
        ("(x^2+y)*gaussian".to_owned(), x2y),
    ]
}

pub fn exact_input(label: &str, prefactor: &Poly2) -> TestInput {
    TestInput::Exact {
        f: PolyGauss::gaussian_with_poly(prefactor.clone()),
        label: label.to_owned(),
    }
}

pub fn grid_input(label: &str, prefactor: &Poly2, n: usize, l: f64) -> Result<TestInput, GridError> {
    let w = Grid2::from_fn(n, l, |x, y| {
        prefactor.eval_real(x, y) * (-(x * x + y * y) / 2.0).exp()
    })?;
    debug_assert_eq!(w.kind(), GridKind::Space);
    Ok(TestInput::Grid {
        w,
        label: label.to_owned(),
    })
}
