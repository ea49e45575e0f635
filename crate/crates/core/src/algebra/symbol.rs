//! Commutative symbols in the four variables (x, y, ξ, η).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::util::format_coeff;

/// Sparse polynomial in (x, y, ξ, η); the image of a normal-ordered operator
/// under `c·M₁^m M₂^n D₁^h D₂^k ↦ c·x^m y^n ξ^h η^k`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly4 {
    terms: BTreeMap<[u32; 4], Complex64>,
}

impl Poly4 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, idx: [u32; 4], c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let entry = self.terms.entry(idx).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            self.terms.remove(&idx);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|t| t.iter().sum()).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; 4], &Complex64)> {
        self.terms.iter()
    }

    pub fn eval(&self, p: [f64; 4]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&idx, &c) in &self.terms {
            let mut v = c;
            for (e, x) in idx.iter().zip(p.iter()) {
                v *= Complex64::new(x.powi(*e as i32), 0.0);
            }
            acc += v;
        }
        acc
    }

    /// Partial derivative in variable `axis` (0..4 for x, y, ξ, η).
    pub fn diff(&self, axis: usize) -> Self {
        let mut out = Self::zero();
        for (&idx, &c) in &self.terms {
            if idx[axis] == 0 {
                continue;
            }
            let mut d = idx;
            d[axis] -= 1;
            out.add_term(d, c * idx[axis] as f64);
        }
        out
    }

    pub fn pretty(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_owned();
        }
        let names = ["x", "y", "xi", "eta"];
        let mut out = String::new();
        for (t, (&idx, &c)) in self.terms.iter().enumerate() {
            let mut mono = String::new();
            for (name, &e) in names.iter().zip(idx.iter()) {
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
            out.push_str(&format_coeff(c, &mono, t == 0));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_diff() {
        // a = x·ξ² + 2η
        let mut a = Poly4::zero();
        a.add_term([1, 0, 2, 0], Complex64::new(1.0, 0.0));
        a.add_term([0, 0, 0, 1], Complex64::new(2.0, 0.0));
        assert_eq!(a.eval([3.0, 0.0, 2.0, 1.0]), Complex64::new(14.0, 0.0));
        let dxi = a.diff(2);
        assert_eq!(dxi.eval([3.0, 0.0, 2.0, 0.0]), Complex64::new(12.0, 0.0));
    }
}
