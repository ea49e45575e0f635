//! Randomized and exhaustive inequality suites for the conjugate lemmas.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{check_conditions, Conjugator, WeightFunction};

/// Slack allowed beyond exact inequality, absorbing conjugate and
/// quadrature rounding.
const SLACK: f64 = 1e-9;

/// Outcome of a randomized inequality suite.
#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub weight: String,
    pub trials: u64,
    pub seed: u64,
    pub violations: u64,
    /// Largest observed lhs − rhs in log space (negative margins are good).
    pub worst_margin: f64,
    pub first_violation: Option<(f64, u32, f64)>,
    pub pass: bool,
}

/// Randomized check of both conjugate–weight inequalities:
///
/// (i)  `t^k·e^{−λω(t)} ≤ e^{λφ*(k/λ)}` for t ≥ 1, and
/// (ii) `inf_j t^{−j}·e^{λφ*(j/λ)} ≤ e^{−(λ−1/b)ω(t) − a/b}`,
///
/// with (a, b) the fitted constants of condition (γ). Trials draw t
/// log-uniformly from [1, 5000] — the cap keeps the minimizing j of (ii)
/// inside the fixed search range j ≤ 400 for every builtin at λ ≤ 10 —
/// k ≤ 60 and λ ∈ [0.1, 10]. Everything is compared in log space.
pub fn check_lemma_lt(wf: &WeightFunction, trials: u64, seed: u64) -> LemmaReport {
    let conditions = check_conditions(wf, 1e3, 1000);
    let (a, b) = (conditions.gamma_a, conditions.gamma_b);
    let conj = Conjugator::new(wf);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut violations = 0;
    let mut worst_margin = f64::NEG_INFINITY;
    let mut first_violation = None;

    let mut record =
        |lhs: f64, rhs: f64, t: f64, k: u32, lambda: f64, worst: &mut f64| -> bool {
            if rhs.is_infinite() {
                return false;
            }
            let margin = lhs - rhs;
            if margin.is_finite() && margin > *worst {
                *worst = margin;
            }
            if margin > SLACK {
                if first_violation.is_none() {
                    first_violation = Some((t, k, lambda));
                }
                return true;
            }
            false
        };

    for trial in 0..trials {
        // Deterministic boundary case first, random afterwards.
        let (t, k, lambda): (f64, u32, f64) = if trial == 0 {
            (1.0, 3, 1.0)
        } else {
            (
                (rng.gen::<f64>() * (5000.0f64).ln()).exp(),
                rng.gen_range(0..=60),
                rng.gen_range(0.1..10.0),
            )
        };

        // (i)
        let lhs = k as f64 * t.ln() - lambda * wf.omega(t);
        let rhs = lambda * conj.get(k as f64 / lambda);
        if record(lhs, rhs, t, k, lambda, &mut worst_margin) {
            violations += 1;
        }

        // (ii): the sequence −j·log t + λφ*(j/λ) is convex in j, so the
        // infimum is found by binary search on the first nondecreasing step.
        let term = |j: u32| -(j as f64) * t.ln() + lambda * conj.get(j as f64 / lambda);
        let jmin = first_nondecreasing(term, 400);
        let lhs = term(jmin);
        let rhs = -(lambda - 1.0 / b) * wf.omega(t) - a / b;
        if record(lhs, rhs, t, 0, lambda, &mut worst_margin) {
            violations += 1;
        }
    }

    LemmaReport {
        lemma: "conjugate-weight".to_owned(),
        weight: wf.id(),
        trials,
        seed,
        violations,
        worst_margin,
        first_violation,
        pass: violations == 0,
    }
}

/// First j in [0, j_max] where `f(j+1) ≥ f(j)`; for a convex sequence this
/// is the argmin. Handles +∞ plateaus (comparisons, no subtraction).
fn first_nondecreasing<F: Fn(u32) -> f64>(f: F, j_max: u32) -> u32 {
    let (mut lo, mut hi) = (0u32, j_max);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if f(mid + 1) >= f(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Exhaustive check of the scaling inequality
/// `ρ^j·e^{λφ*(j/λ)} ≤ Λ_{ρ,λ}·e^{λ′φ*(j/λ′)}` for j = 0..j_max, with
/// `λ′ = λ/D^{⌊log ρ+1⌋}` and `Λ_{ρ,λ} = exp{λ⌊log ρ+1⌋}`.
pub fn check_rho_lemma(wf: &WeightFunction, rho: f64, lambda: f64, j_max: u32) -> LemmaReport {
    debug_assert!(rho > 0.0 && lambda > 0.0);
    let conditions = check_conditions(wf, 1e3, 1000);
    let d = conditions.d_constant;
    let int_part = (rho.ln() + 1.0).floor();
    let lambda_p = lambda / d.powf(int_part);
    let log_big_lambda = lambda * int_part;
    let conj = Conjugator::new(wf);

    let mut violations = 0;
    let mut worst_margin = f64::NEG_INFINITY;
    let mut first_violation = None;
    for j in 0..=j_max {
        let lhs = j as f64 * rho.ln() + lambda * conj.get(j as f64 / lambda);
        let rhs = log_big_lambda + lambda_p * conj.get(j as f64 / lambda_p);
        if rhs.is_infinite() {
            continue;
        }
        let margin = lhs - rhs;
        if margin.is_finite() && margin > worst_margin {
            worst_margin = margin;
        }
        if margin > SLACK {
            violations += 1;
            if first_violation.is_none() {
                first_violation = Some((rho, j, lambda));
            }
        }
    }
    LemmaReport {
        lemma: "rho-scaling".to_owned(),
        weight: wf.id(),
        trials: j_max as u64 + 1,
        seed: 0,
        violations,
        worst_margin,
        first_violation,
        pass: violations == 0,
    }
}

/// Smallest admissible constant in `n! ≤ C_λ·e^{λφ*(n/λ)}`, computed in
/// log space over n ≤ n_max; entries where φ* = +∞ contribute nothing
/// (the bound is formally trivial there).
#[derive(Clone, Debug, Serialize)]
pub struct FactorialReport {
    pub weight: String,
    pub lambda: f64,
    pub n_max: u32,
    pub log_c: f64,
    pub argmax_n: u32,
    pub pass: bool,
}

pub fn check_factorial_bound(wf: &WeightFunction, lambda: f64, n_max: u32) -> FactorialReport {
    let conj = Conjugator::new(wf);
    let mut log_c = f64::NEG_INFINITY;
    let mut argmax_n = 0;
    let mut ln_fact = 0.0;
    for n in 0..=n_max {
        if n > 0 {
            ln_fact += (n as f64).ln();
        }
        let c = conj.get(n as f64 / lambda);
        if c.is_infinite() {
            continue;
        }
        let term = ln_fact - lambda * c;
        if term > log_c {
            log_c = term;
            argmax_n = n;
        }
    }
    FactorialReport {
        weight: wf.id(),
        lambda,
        n_max,
        log_c,
        argmax_n,
        pass: log_c.is_finite(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_suites_pass_for_builtins() {
        for wf in WeightFunction::builtins() {
            let report = check_lemma_lt(&wf, 2000, 7);
            assert!(
                report.pass,
                "{}: {} violations, first {:?}",
                wf.id(),
                report.violations,
                report.first_violation
            );
        }
    }

    #[test]
    fn rho_lemma_spec_cases() {
        let classical = WeightFunction::classical();
        assert!(check_rho_lemma(&classical, 2.0, 1.0, 200).pass);
        assert!(check_rho_lemma(&classical, 1.0, 1.0, 200).pass);
        let gevrey = WeightFunction::gevrey(2.0).unwrap();
        assert!(check_rho_lemma(&gevrey, 4.0, 0.5, 200).pass);
    }

    #[test]
    fn factorial_bound_examples() {
        // Gevrey(2), λ=1: finite constant over n ≤ 100.
        let gevrey = WeightFunction::gevrey(2.0).unwrap();
        let report = check_factorial_bound(&gevrey, 1.0, 100);
        assert!(report.pass);
        // Classical, λ=1: φ* finite only up to s = 1; C comes from n ∈ {0,1}
        // and equals max(e^{log 2}, 1) = 2.
        let classical = WeightFunction::classical();
        let report = check_factorial_bound(&classical, 1.0, 100);
        assert!(report.pass);
        assert!((report.log_c - (2.0f64).ln()).abs() < 1e-9);
        assert_eq!(report.argmax_n, 0);
    }

    #[test]
    fn convex_argmin_search() {
        let f = |j: u32| (j as f64 - 7.3).powi(2);
        assert_eq!(first_nondecreasing(f, 100), 7);
        let g = |j: u32| if j < 3 { -(j as f64) } else { f64::INFINITY };
        // min at the last finite entry
        assert_eq!(first_nondecreasing(g, 100), 2);
    }
}
