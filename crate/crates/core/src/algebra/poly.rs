//! Sparse commutative bivariate polynomials with complex coefficients.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::util::format_coeff;

/// A polynomial Σ cᵢⱼ·u^i·v^j in two commuting indeterminates.
///
/// Zero coefficients are never stored, so structural equality is canonical
/// equality. The indeterminate names are display-only; kernel phases use
/// (ξ, η), Gaussian prefactors use (x, y).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), Complex64>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        let mut p = Self::zero();
        p.add_term(0, 0, c);
        p
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    /// First indeterminate (ξ).
    pub fn xi() -> Self {
        Self::monomial(1, 0, Complex64::new(1.0, 0.0))
    }

    /// Second indeterminate (η).
    pub fn eta() -> Self {
        Self::monomial(0, 1, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(i: u32, j: u32, c: Complex64) -> Self {
        let mut p = Self::zero();
        p.add_term(i, j, c);
        p
    }

    /// Adds `c·u^i·v^j`, merging exponents and pruning exact zeros.
    pub fn add_term(&mut self, i: u32, j: u32, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let entry = self.terms.entry((i, j)).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            self.terms.remove(&(i, j));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Complex64 {
        self.terms
            .get(&(i, j))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Complex64)> {
        self.terms.iter()
    }

    /// Total degree; zero polynomial reports 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    /// True iff every stored coefficient has exactly zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.im == 0.0)
    }

    /// Largest coefficient magnitude (0 for the zero polynomial).
    pub fn max_coeff_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), &c) in &other.terms {
            out.add_term(i, j, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero();
        for (&(i, j), &c) in &self.terms {
            out.add_term(i, j, s * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(i1, j1), &c1) in &self.terms {
            for (&(i2, j2), &c2) in &other.terms {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// ∂/∂u for `axis` 0, ∂/∂v for `axis` 1.
    pub fn diff(&self, axis: usize) -> Self {
        let mut out = Self::zero();
        for (&(i, j), &c) in &self.terms {
            match axis {
                0 if i > 0 => out.add_term(i - 1, j, c * i as f64),
                1 if j > 0 => out.add_term(i, j - 1, c * j as f64),
                _ => {}
            }
        }
        out
    }

    /// Antiderivative along `axis` with zero constant of integration.
    pub fn integrate(&self, axis: usize) -> Self {
        let mut out = Self::zero();
        for (&(i, j), &c) in &self.terms {
            match axis {
                0 => out.add_term(i + 1, j, c / (i + 1) as f64),
                _ => out.add_term(i, j + 1, c / (j + 1) as f64),
            }
        }
        out
    }

    pub fn eval(&self, u: Complex64, v: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(i, j), &c) in &self.terms {
            acc += c * u.powu(i) * v.powu(j);
        }
        acc
    }

    pub fn eval_real(&self, u: f64, v: f64) -> Complex64 {
        self.eval(Complex64::new(u, 0.0), Complex64::new(v, 0.0))
    }

    /// Substitutes polynomials for the two indeterminates.
    pub fn substitute(&self, u: &Self, v: &Self) -> Self {
        let mut out = Self::zero();
        for (&(i, j), &c) in &self.terms {
            out = out.add(&u.pow(i).mul(&v.pow(j)).scale(c));
        }
        out
    }

    /// Canonical rendering with the given indeterminate names; parses back
    /// through the DSL to the same polynomial.
    pub fn pretty(&self, names: [&str; 2]) -> String {
        if self.terms.is_empty() {
            return "0".to_owned();
        }
        let mut out = String::new();
        for (idx, (&(i, j), &c)) in self.terms.iter().enumerate() {
            let mut mono = String::new();
            for (name, e) in [(names[0], i), (names[1], j)] {
                if e == 0 {
                    continue;
                }
                if !mono.is_empty() {
                    mono.push('*');
                }
                if e == 1 {
                    mono.push_str(name);
                } else {
                    let _ = write!(mono, "{name}^{e}");
                }
            }
            let first = idx == 0;
            out.push_str(&format_coeff(c, &mono, first));
        }
        out
    }
}

/// Serializes as a JSON array of `{"i","j","re","im"}` records in
/// lexicographic exponent order.
impl Serialize for Poly2 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term {
            i: u32,
            j: u32,
            re: f64,
            im: f64,
        }
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (&(i, j), &c) in &self.terms {
            seq.serialize_element(&Term {
                i,
                j,
                re: c.re,
                im: c.im,
            })?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn add_merges_and_prunes() {
        let mut p = Poly2::zero();
        p.add_term(1, 0, c(2.0, 0.0));
        p.add_term(1, 0, c(-2.0, 0.0));
        assert!(p.is_zero());
    }

    #[test]
    fn diff_and_integrate_roundtrip() {
        // P = ξ²η + 3η
        let mut p = Poly2::zero();
        p.add_term(2, 1, c(1.0, 0.0));
        p.add_term(0, 1, c(3.0, 0.0));
        let dxi = p.diff(0);
        assert_eq!(dxi.coeff(1, 1), c(2.0, 0.0));
        assert_eq!(dxi.integrate(0), Poly2::monomial(2, 1, c(1.0, 0.0)));
    }

    #[test]
    fn real_flag_is_exact() {
        let mut p = Poly2::zero();
        p.add_term(1, 1, c(0.5, 0.0));
        assert!(p.is_real());
        p.add_term(0, 0, c(0.0, 1e-300));
        assert!(!p.is_real());
    }

    #[test]
    fn eval_matches_hand_expansion() {
        // q = ξη + 1 at (2, 3) = 7
        let mut q = Poly2::one();
        q.add_term(1, 1, c(1.0, 0.0));
        assert_eq!(q.eval_real(2.0, 3.0), c(7.0, 0.0));
    }

    #[test]
    fn serializes_sorted() {
        let mut p = Poly2::zero();
        p.add_term(0, 1, c(1.0, 0.0));
        p.add_term(1, 0, c(-0.5, 0.25));
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(
            json,
            r#"[{"i":0,"j":1,"re":1.0,"im":0.0},{"i":1,"j":0,"re":-0.5,"im":0.25}]"#
        );
    }
}
