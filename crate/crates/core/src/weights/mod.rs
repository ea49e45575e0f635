//! Weight functions ω, their Young conjugates φ*, the growth/convexity
//! condition checks, inequality suites and seminorm systems.
//!
//! A weight is a continuous nondecreasing ω: [0,∞) → [0,∞) subject to four
//! conditions: (α) ω(2t) ≤ L(ω(t)+1), (β) ∫₁^∞ ω(t)/t² dt < ∞,
//! (γ) ω(t) ≥ a + b·log(1+t), (δ) φ(t) = ω(eᵗ) convex. The classical case
//! ω₀(t) = log(1+t) recovers the Schwartz seminorms.

mod conditions;
mod conjugate;
mod lemmas;
mod seminorm;

pub use conditions::{check_conditions, CondCheck, ConditionReport};
pub use conjugate::{biconjugate_check, young_conjugate, Conjugator};
pub use lemmas::{
    check_factorial_bound, check_lemma_lt, check_rho_lemma, FactorialReport, LemmaReport,
};
pub use seminorm::{seminorm, SeminormEntry, SeminormInput, SeminormParams, SeminormReport};

use std::sync::Arc;

/// Search ceiling for conjugate maximizations; φ stays representable in
/// f64 for every builtin up to here.
pub const T_CEILING: f64 = 700.0;

#[derive(Clone)]
enum WeightKind {
    /// ω₀(t) = log(1+t); recovers the classical Schwartz space.
    Classical,
    /// ω(t) = t^{1/s}, s > 1.
    Gevrey(f64),
    /// ω(t) = (log(1+t))^β, β > 1.
    PowerLog(f64),
    /// User-supplied evaluator (test weights, counterexamples).
    Custom {
        name: String,
        omega: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        /// Optional direct φ(t) = ω(eᵗ) evaluator when ω(eᵗ) would overflow.
        phi: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    },
}

/// A weight function, optionally normalized to vanish on [0, 1].
#[derive(Clone)]
pub struct WeightFunction {
    kind: WeightKind,
    normalized: bool,
}

impl std::fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "WeightFunction({})", self.id())
    }
}

impl WeightFunction {
    pub fn classical() -> Self {
        Self {
            kind: WeightKind::Classical,
            normalized: false,
        }
    }

    /// Gevrey weight t^{1/s}; requires s > 1.
    pub fn gevrey(s: f64) -> Option<Self> {
        (s > 1.0).then_some(Self {
            kind: WeightKind::Gevrey(s),
            normalized: false,
        })
    }

    /// Power-of-log weight (log(1+t))^β; requires β > 1.
    pub fn powerlog(beta: f64) -> Option<Self> {
        (beta > 1.0).then_some(Self {
            kind: WeightKind::PowerLog(beta),
            normalized: false,
        })
    }

    pub fn custom(
        name: impl Into<String>,
        omega: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        phi: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    ) -> Self {
        Self {
            kind: WeightKind::Custom {
                name: name.into(),
                omega,
                phi,
            },
            normalized: false,
        }
    }

    /// Registry lookup: `classical`, `gevrey:S`, `powerlog:B`.
    pub fn from_id(id: &str) -> Option<Self> {
        if id == "classical" {
            return Some(Self::classical());
        }
        if let Some(s) = id.strip_prefix("gevrey:") {
            return Self::gevrey(s.parse().ok()?);
        }
        if let Some(b) = id.strip_prefix("powerlog:") {
            return Self::powerlog(b.parse().ok()?);
        }
        None
    }

    /// The three builtin instances exercised by the test suites.
    pub fn builtins() -> Vec<Self> {
        vec![
            Self::classical(),
            Self::gevrey(2.0).unwrap(),
            Self::powerlog(1.5).unwrap(),
        ]
    }

    pub fn id(&self) -> String {
        let base = match &self.kind {
            WeightKind::Classical => "classical".to_owned(),
            WeightKind::Gevrey(s) => format!("gevrey:{s}"),
            WeightKind::PowerLog(b) => format!("powerlog:{b}"),
            WeightKind::Custom { name, .. } => format!("custom:{name}"),
        };
        if self.normalized {
            format!("{base}+norm")
        } else {
            base
        }
    }

    /// The variant with ω replaced by max(0, ω(t) − ω(1)).
    pub fn normalized(&self) -> Self {
        Self {
            kind: self.kind.clone(),
            normalized: true,
        }
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    fn omega_raw(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        match &self.kind {
            WeightKind::Classical => t.ln_1p(),
            WeightKind::Gevrey(s) => t.powf(1.0 / s),
            WeightKind::PowerLog(b) => t.ln_1p().powf(*b),
            WeightKind::Custom { omega, .. } => omega(t),
        }
    }

    /// ω(t) for t ≥ 0 (radial evaluation: callers pass |x|).
    pub fn omega(&self, t: f64) -> f64 {
        let v = self.omega_raw(t);
        if self.normalized {
            (v - self.omega_raw(1.0)).max(0.0)
        } else {
            v
        }
    }

    /// φ(t) = ω(eᵗ), evaluated in a form that stays finite for t ≤ 700.
    pub fn phi(&self, t: f64) -> f64 {
        let v = match &self.kind {
            WeightKind::Classical => softplus(t),
            WeightKind::Gevrey(s) => (t / s).exp(),
            WeightKind::PowerLog(b) => softplus(t).powf(*b),
            WeightKind::Custom { omega, phi, .. } => match phi {
                Some(phi) => phi(t),
                None => omega(t.exp()),
            },
        };
        if self.normalized {
            (v - self.omega_raw(1.0)).max(0.0)
        } else {
            v
        }
    }
}

/// log(1 + eᵗ) without overflow.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_roundtrip() {
        for id in ["classical", "gevrey:2", "powerlog:1.5"] {
            assert_eq!(WeightFunction::from_id(id).unwrap().id(), id);
        }
        assert!(WeightFunction::from_id("gevrey:1").is_none());
        assert!(WeightFunction::from_id("powerlog:0.5").is_none());
        assert!(WeightFunction::from_id("nope").is_none());
    }

    #[test]
    fn normalization_vanishes_on_unit_interval() {
        let w = WeightFunction::gevrey(2.0).unwrap().normalized();
        assert_eq!(w.omega(0.0), 0.0);
        assert_eq!(w.omega(1.0), 0.0);
        assert!(w.omega(4.0) > 0.0);
    }

    #[test]
    fn phi_is_stable_at_the_ceiling() {
        let w = WeightFunction::classical();
        assert_eq!(w.phi(T_CEILING), T_CEILING);
        let g = WeightFunction::gevrey(2.0).unwrap();
        assert!((g.phi(700.0) - (350.0f64).exp()).abs() < 1e290);
        assert!(g.phi(700.0).is_finite());
    }
}
