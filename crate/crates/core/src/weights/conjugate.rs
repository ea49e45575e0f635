//! Young conjugate φ*(s) = sup_{t≥0} {st − φ(t)} and the biconjugation
//! check φ** = φ.

use super::{WeightFunction, T_CEILING};
use crate::util::golden_max;

/// Numerically computes φ*(s) for s ≥ 0.
///
/// The concave objective st − φ(t) is maximized by bracketing plus
/// golden-section search to absolute tolerance 1e−10 on the argument.
/// Returns `f64::INFINITY` when the objective is still increasing at the
/// search ceiling t = 700 (slope test `s > φ′(700)`); the formal
/// conventions `e^{+∞} = +∞`, `e^{−∞} = 0` then apply downstream.
pub fn young_conjugate(wf: &WeightFunction, s: f64) -> f64 {
    debug_assert!(s >= 0.0);
    if s == 0.0 {
        // φ is nondecreasing, so the sup sits at t = 0.
        return -wf.phi(0.0);
    }
    let h = 1e-6 * T_CEILING;
    let slope_at_ceiling = (wf.phi(T_CEILING) - wf.phi(T_CEILING - h)) / h;
    if s > slope_at_ceiling {
        return f64::INFINITY;
    }
    golden_max(|t| s * t - wf.phi(t), 0.0, T_CEILING, 1e-10).1
}

/// Shared conjugate evaluator with a per-weight memo table; the lemma
/// suites hit the same `j/λ` arguments repeatedly.
pub struct Conjugator<'a> {
    wf: &'a WeightFunction,
    memo: std::cell::RefCell<std::collections::HashMap<u64, f64>>,
}

impl<'a> Conjugator<'a> {
    pub fn new(wf: &'a WeightFunction) -> Self {
        Self {
            wf,
            memo: std::cell::RefCell::new(std::collections::HashMap::new()),
        }
    }

    pub fn get(&self, s: f64) -> f64 {
        let key = s.to_bits();
        if let Some(&v) = self.memo.borrow().get(&key) {
            return v;
        }
        let v = young_conjugate(self.wf, s);
        self.memo.borrow_mut().insert(key, v);
        v
    }
}

/// Max |φ**(t) − φ(t)| over the given t samples, with
/// φ**(t) = sup_{s≥0} {st − φ*(s)} maximized over the finite domain of φ*.
pub fn biconjugate_check(wf: &WeightFunction, ts: &[f64]) -> f64 {
    let conj = Conjugator::new(wf);
    let mut max_gap: f64 = 0.0;
    for &t in ts {
        // The sup is attained near the subgradient φ′(t); extend the
        // bracket past it and treat the +∞ region of φ* as −∞ objective.
        let h = 1e-6 * (1.0 + t.abs());
        let slope = (wf.phi(t + h) - wf.phi(t - h)) / (2.0 * h);
        let hi = (1.5 * slope + 1.0).max(2.0);
        let objective = |s: f64| {
            let c = conj.get(s);
            if c.is_infinite() {
                -1e300
            } else {
                s * t - c
            }
        };
        let (_, biconj) = golden_max(objective, 0.0, hi, 1e-10 * (1.0 + hi));
        max_gap = max_gap.max((biconj - wf.phi(t)).abs());
    }
    max_gap
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    /// Closed form for the unnormalized Gevrey conjugate, φ(t) = e^{t/s}:
    /// φ*(σ) = σs·log(σs) − σs for σ ≥ 1/s, else −1.
    fn gevrey_conjugate_closed(s: f64, sigma: f64) -> f64 {
        if sigma < 1.0 / s {
            -1.0
        } else {
            let z = sigma * s;
            sigma * s * z.ln() - z
        }
    }

    #[test]
    fn gevrey2_matches_closed_form() {
        let w = WeightFunction::gevrey(2.0).unwrap();
        // Spot value from the stationary point t* = 2·log(2s): at s = 1,
        // φ*(1) = 2·log 2 − 2.
        let v = young_conjugate(&w, 1.0);
        assert!((v - (2.0 * (2.0f64).ln() - 2.0)).abs() < 1e-10);
        for i in 0..=80 {
            let s = 0.25 * i as f64;
            let num = young_conjugate(&w, s);
            let closed = gevrey_conjugate_closed(2.0, s);
            assert!((num - closed).abs() <= 1e-8, "s={s}: {num} vs {closed}");
        }
    }

    #[test]
    fn classical_is_infinite_past_slope_one() {
        let w = WeightFunction::classical();
        assert!(young_conjugate(&w, 2.0).is_infinite());
        assert!(young_conjugate(&w, 1.0 + 1e-9).is_infinite());
        // φ*(1) = 0 and φ*(s) ≤ 0 on [0, 1].
        assert!(young_conjugate(&w, 1.0).abs() < 1e-12);
        assert!((young_conjugate(&w, 0.5) + (2.0f64).ln()).abs() < 1e-10);
    }

    #[test]
    fn conjugate_at_zero_is_minus_phi_zero() {
        for wf in WeightFunction::builtins() {
            assert_eq!(young_conjugate(&wf, 0.0), -wf.phi(0.0));
        }
    }

    #[test]
    fn biconjugate_gap_small_for_builtins() {
        let ts: Vec<f64> = (0..=40).map(|i| 0.5 * i as f64).collect();
        for wf in WeightFunction::builtins() {
            let gap = biconjugate_check(&wf, &ts);
            assert!(gap <= 1e-6, "{}: gap {gap:e}", wf.id());
        }
    }

    #[test]
    fn affine_phi_degenerate_case() {
        // ω = max(0, log t) gives φ(t) = t on [0,∞): φ* = 0 on [0,1], +∞
        // beyond, and φ** = φ with zero gap.
        let w = WeightFunction::custom(
            "logplus",
            Arc::new(|t: f64| t.ln().max(0.0)),
            Some(Arc::new(|t: f64| t.max(0.0))),
        );
        assert!(young_conjugate(&w, 0.5).abs() < 1e-9);
        assert!(young_conjugate(&w, 1.5).is_infinite());
        let ts: Vec<f64> = (0..=20).map(|i| i as f64).collect();
        assert!(biconjugate_check(&w, &ts) <= 1e-6);
    }

    #[test]
    fn conjugate_is_convex_on_finite_domain() {
        // Midpoint convexity on an s-ladder, slack 1e−8.
        for wf in WeightFunction::builtins() {
            let conj = Conjugator::new(&wf);
            let smax = match wf.id().as_str() {
                "classical" => 1.0,
                _ => 40.0,
            };
            let n = 81;
            for i in 0..n - 2 {
                let s0 = smax * i as f64 / (n - 1) as f64;
                let s2 = smax * (i + 2) as f64 / (n - 1) as f64;
                let (f0, f1, f2) = (
                    conj.get(s0),
                    conj.get(0.5 * (s0 + s2)),
                    conj.get(s2),
                );
                if f0.is_finite() && f2.is_finite() {
                    assert!(
                        f1 <= 0.5 * (f0 + f2) + 1e-8,
                        "{} at s ∈ [{s0}, {s2}]",
                        wf.id()
                    );
                }
            }
        }
    }

    #[test]
    fn normalized_conjugate_over_s_is_increasing() {
        // With ω vanishing on [0,1], φ*(s)/s is nondecreasing.
        for wf in WeightFunction::builtins() {
            let wf = wf.normalized();
            let conj = Conjugator::new(&wf);
            let mut prev = f64::NEG_INFINITY;
            for i in 1..=60 {
                let s = 0.25 * i as f64;
                let v = conj.get(s);
                if v.is_infinite() {
                    break;
                }
                let ratio = v / s;
                assert!(
                    ratio >= prev - 1e-9,
                    "{}: φ*(s)/s dropped at s = {s}",
                    wf.id()
                );
                prev = ratio;
            }
        }
    }
}
