//! Normal-ordered noncommutative polynomials in the generators
//! `M₁, M₂, D₁, D₂`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use super::{KernelSpec, Poly2, Poly4};
use crate::util::format_coeff;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// One of the four algebra generators.
///
/// `M₁, M₂` multiply by the first/second coordinate; `D₁, D₂` are `−i∂`
/// in the first/second coordinate, so `[D₁,M₁] = [D₂,M₂] = −i·Id` and all
/// other generator pairs commute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gen {
    M1,
    M2,
    D1,
    D2,
}

/// An element of the Weyl algebra in canonical normal order.
///
/// The map is keyed by the exponent quadruple `(m, n, h, k)` of the monomial
/// `M₁^m M₂^n D₁^h D₂^k`; coefficients are complex and exact zeros are never
/// stored. Values are immutable in spirit: every operation returns a new
/// operator.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeylOp {
    terms: BTreeMap<[u32; 4], Complex64>,
}

impl WeylOp {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::monomial([0, 0, 0, 0], ONE)
    }

    pub fn generator(g: Gen) -> Self {
        let idx = match g {
            Gen::M1 => [1, 0, 0, 0],
            Gen::M2 => [0, 1, 0, 0],
            Gen::D1 => [0, 0, 1, 0],
            Gen::D2 => [0, 0, 0, 1],
        };
        Self::monomial(idx, ONE)
    }

    pub fn monomial(idx: [u32; 4], c: Complex64) -> Self {
        let mut op = Self::zero();
        op.add_term(idx, c);
        op
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial([0, 0, 0, 0], c)
    }

    pub fn add_term(&mut self, idx: [u32; 4], c: Complex64) {
        if c == ZERO {
            return;
        }
        let entry = self.terms.entry(idx).or_insert(ZERO);
        *entry += c;
        if *entry == ZERO {
            self.terms.remove(&idx);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, idx: [u32; 4]) -> Complex64 {
        self.terms.get(&idx).copied().unwrap_or(ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; 4], &Complex64)> {
        self.terms.iter()
    }

    /// Max of `m+n+h+k` over stored terms; 0 for the zero operator.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|t| t.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&idx, &c) in &other.terms {
            out.add_term(idx, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero();
        for (&idx, &c) in &self.terms {
            out.add_term(idx, s * c);
        }
        out
    }

    /// Canonical product in the Weyl algebra.
    ///
    /// Reduces `(M₁^a M₂^b D₁^c D₂^d)·(M₁^m M₂^n D₁^h D₂^k)` with the
    /// closed form of `D^h M^m` under `[D,M] = −i`:
    ///
    /// `D^h M^m = Σⱼ C(h,j)·C(m,j)·j!·(−i)^j · M^{m−j} D^{h−j}`.
    pub fn normal_mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&a, &ca) in &self.terms {
            for (&b, &cb) in &other.terms {
                mono_mul_into(&mut out, a, b, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::identity();
        for _ in 0..e {
            out = out.normal_mul(self);
        }
        out
    }

    /// Replaces the generators by the given operators, term by term, in the
    /// fixed order `x₁^m · x₂^n · y₁^h · y₂^k`.
    pub fn substitute_ordered(&self, x1: &Self, x2: &Self, y1: &Self, y2: &Self) -> Self {
        // Powers are cached per substituted generator; exponents are small.
        let max = |pos: usize| self.terms.keys().map(|t| t[pos]).max().unwrap_or(0);
        let pows = [
            power_table(x1, max(0)),
            power_table(x2, max(1)),
            power_table(y1, max(2)),
            power_table(y2, max(3)),
        ];
        let mut out = Self::zero();
        for (&idx, &c) in &self.terms {
            let mut term = WeylOp::constant(c);
            for (pos, table) in pows.iter().enumerate() {
                term = term.normal_mul(&table[idx[pos] as usize]);
            }
            out = out.add(&term);
        }
        out
    }

    /// The substitution that transports an operator through the Wigner
    /// transform: `B(M₁,M₂,D₁,D₂) ↦ B(½(M₂+M₁), ½(D₁−D₂), D₁+D₂, M₂−M₁)`.
    pub fn wig_pushforward(&self) -> Self {
        let m1 = Self::generator(Gen::M1);
        let m2 = Self::generator(Gen::M2);
        let d1 = Self::generator(Gen::D1);
        let d2 = Self::generator(Gen::D2);
        let half = Complex64::new(0.5, 0.0);
        self.substitute_ordered(
            &m1.add(&m2).scale(half),
            &d1.sub(&d2).scale(half),
            &d1.add(&d2),
            &m2.sub(&m1),
        )
    }

    /// The "bar" transform `B ↦ B̄` with
    /// `B̄ = B(½(M₂+M₁)+P₁*, ½(D₁−D₂)+P₂*, D₁+D₂, M₂−M₁)`,
    /// where `Pᵢ* = (∂ᵢP)(D₁+D₂, M₂−M₁)`; it satisfies `B Q[w] = Q[B̄ w]`.
    pub fn bar_transform(&self, ker: &KernelSpec) -> Self {
        let m1 = Self::generator(Gen::M1);
        let m2 = Self::generator(Gen::M2);
        let d1 = Self::generator(Gen::D1);
        let d2 = Self::generator(Gen::D2);
        let half = Complex64::new(0.5, 0.0);
        // The pair (D₁+D₂, M₂−M₁) commutes, so evaluating the bivariate
        // derivative polynomials at it is unambiguous.
        let u = d1.add(&d2);
        let v = m2.sub(&m1);
        let p1 = eval_poly2_at_ops(&ker.p1(), &u, &v);
        let p2 = eval_poly2_at_ops(&ker.p2(), &u, &v);
        self.substitute_ordered(
            &m1.add(&m2).scale(half).add(&p1),
            &d1.sub(&d2).scale(half).add(&p2),
            &u,
            &v,
        )
    }

    /// The "tilde" transform `B ↦ B̃` with
    /// `B̃ = B(M₁−½D₂−P₁, M₁+½D₂−P₁, ½D₁+M₂−P₂, ½D₁−M₂+P₂)`,
    /// where `Pᵢ = (∂ᵢP)(D₁,D₂)`; it satisfies `Q[B w] = B̃ Q[w]`.
    pub fn tilde_transform(&self, ker: &KernelSpec) -> Self {
        let m1 = Self::generator(Gen::M1);
        let m2 = Self::generator(Gen::M2);
        let d1 = Self::generator(Gen::D1);
        let d2 = Self::generator(Gen::D2);
        let half = Complex64::new(0.5, 0.0);
        let p1 = eval_poly2_at_ops(&ker.p1(), &d1, &d2);
        let p2 = eval_poly2_at_ops(&ker.p2(), &d1, &d2);
        let half_d2 = d2.scale(half);
        let half_d1 = d1.scale(half);
        self.substitute_ordered(
            &m1.sub(&half_d2).sub(&p1),
            &m1.add(&half_d2).sub(&p1),
            &half_d1.add(&m2).sub(&p2),
            &half_d1.sub(&m2).add(&p2),
        )
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.normal_mul(other).sub(&other.normal_mul(self))
    }

    /// The commutative symbol: `c·M₁^m M₂^n D₁^h D₂^k ↦ c·x^m y^n ξ^h η^k`.
    pub fn symbol(&self) -> Poly4 {
        let mut p = Poly4::zero();
        for (&idx, &c) in &self.terms {
            p.add_term(idx, c);
        }
        p
    }

    /// Canonical rendering in DSL syntax (`x`, `y`, `Dx`, `Dy`); parses back
    /// to the same operator.
    pub fn pretty(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_owned();
        }
        let mut out = String::new();
        for (idx, (&[m, n, h, k], &c)) in self.terms.iter().enumerate() {
            let mut mono = String::new();
            for (name, e) in [("x", m), ("y", n), ("Dx", h), ("Dy", k)] {
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
            out.push_str(&format_coeff(c, &mono, idx == 0));
        }
        out
    }
}

/// Evaluates a bivariate polynomial at a pair of operators, as
/// `Σ cᵢⱼ · X^i · Y^j`. Callers must pass a commuting pair, otherwise the
/// expression would depend on the monomial order.
pub(crate) fn eval_poly2_at_ops(p: &Poly2, x: &WeylOp, y: &WeylOp) -> WeylOp {
    debug_assert!(x.commutator(y).is_zero());
    let max_i = p.terms().map(|(&(i, _), _)| i).max().unwrap_or(0);
    let max_j = p.terms().map(|(&(_, j), _)| j).max().unwrap_or(0);
    let xp = power_table(x, max_i);
    let yp = power_table(y, max_j);
    let mut out = WeylOp::zero();
    for (&(i, j), &c) in p.terms() {
        out = out.add(&xp[i as usize].normal_mul(&yp[j as usize]).scale(c));
    }
    out
}

/// The auxiliary operator `A(M₁,M₂,D₁,D₂) = q(D₁+D₂, M₂−M₁)` attached to a
/// spectral factor `q`; it satisfies `Q^{(σ₁)}[w] = Q^{(σ)}[A w]`.
pub fn a_of_q(q: &Poly2) -> WeylOp {
    let u = WeylOp::generator(Gen::D1).add(&WeylOp::generator(Gen::D2));
    let v = WeylOp::generator(Gen::M2).sub(&WeylOp::generator(Gen::M1));
    eval_poly2_at_ops(q, &u, &v)
}

fn power_table(op: &WeylOp, max: u32) -> Vec<WeylOp> {
    let mut table = Vec::with_capacity(max as usize + 1);
    table.push(WeylOp::identity());
    for e in 1..=max {
        let prev = &table[e as usize - 1];
        table.push(prev.normal_mul(op));
    }
    table
}

/// Product of two normal monomials, accumulated into `out` with prefactor
/// `c`. Only `D₁^c·M₁^m` and `D₂^d·M₂^n` need reordering; everything else
/// commutes freely.
fn mono_mul_into(out: &mut WeylOp, a: [u32; 4], b: [u32; 4], c: Complex64) {
    let [m1, n1, h1, k1] = a;
    let [m2, n2, h2, k2] = b;
    for j in 0..=h1.min(m2) {
        let cj = contraction_count(h1, m2, j);
        for l in 0..=k1.min(n2) {
            let cl = contraction_count(k1, n2, l);
            let coeff = c * (cj * cl) * neg_i_pow(j + l);
            out.add_term(
                [m1 + m2 - j, n1 + n2 - l, h1 + h2 - j, k1 + k2 - l],
                coeff,
            );
        }
    }
}

/// `C(h,j)·C(m,j)·j!` computed as `hᵈᵒʷⁿʲ · mᵈᵒʷⁿʲ / j!`; exact in f64 for
/// the exponent ranges that arise here.
fn contraction_count(h: u32, m: u32, j: u32) -> f64 {
    let mut v = 1.0;
    for t in 0..j {
        v *= (h - t) as f64 * (m - t) as f64 / (t + 1) as f64;
    }
    v
}

fn neg_i_pow(e: u32) -> Complex64 {
    match e % 4 {
        0 => ONE,
        1 => -I,
        2 => -ONE,
        _ => I,
    }
}

/// Serializes as a JSON array of `{"m","n","h","k","re","im"}` records in
/// lexicographic exponent order.
impl Serialize for WeylOp {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term {
            m: u32,
            n: u32,
            h: u32,
            k: u32,
            re: f64,
            im: f64,
        }
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (&[m, n, h, k], &c) in &self.terms {
            seq.serialize_element(&Term {
                m,
                n,
                h,
                k,
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

    fn gen(g: Gen) -> WeylOp {
        WeylOp::generator(g)
    }

    #[test]
    fn d1_times_m1_is_leibniz() {
        // D₁·M₁ = M₁·D₁ − i·Id
        let prod = gen(Gen::D1).normal_mul(&gen(Gen::M1));
        let mut expected = WeylOp::monomial([1, 0, 1, 0], ONE);
        expected.add_term([0, 0, 0, 0], -I);
        assert_eq!(prod, expected);
    }

    #[test]
    fn eq11_commutation() {
        // (D₁+D₂)·(M₂−M₁) = (M₂−M₁)·(D₁+D₂)
        let u = gen(Gen::D1).add(&gen(Gen::D2));
        let v = gen(Gen::M2).sub(&gen(Gen::M1));
        assert_eq!(u.normal_mul(&v), v.normal_mul(&u));
        for h in 0..4u32 {
            for k in 0..4u32 {
                assert_eq!(
                    u.pow(h).normal_mul(&v.pow(k)),
                    v.pow(k).normal_mul(&u.pow(h))
                );
            }
        }
    }

    #[test]
    fn d1_squared_times_m1() {
        // D₁²·M₁ = M₁·D₁² − 2i·D₁
        let prod = gen(Gen::D1).pow(2).normal_mul(&gen(Gen::M1));
        let mut expected = WeylOp::monomial([1, 0, 2, 0], ONE);
        expected.add_term([0, 0, 1, 0], Complex64::new(0.0, -2.0));
        assert_eq!(prod, expected);
    }

    #[test]
    fn identity_substitution_is_identity() {
        let b = gen(Gen::M1).normal_mul(&gen(Gen::D1));
        let out = b.substitute_ordered(
            &gen(Gen::M1),
            &gen(Gen::M2),
            &gen(Gen::D1),
            &gen(Gen::D2),
        );
        assert_eq!(out, b);
    }

    #[test]
    fn pushforward_of_generators() {
        let half = Complex64::new(0.5, 0.0);
        assert_eq!(
            gen(Gen::M1).wig_pushforward(),
            gen(Gen::M1).add(&gen(Gen::M2)).scale(half)
        );
        assert_eq!(
            gen(Gen::M2).wig_pushforward(),
            gen(Gen::D1).sub(&gen(Gen::D2)).scale(half)
        );
        assert_eq!(gen(Gen::D1).wig_pushforward(), gen(Gen::D1).add(&gen(Gen::D2)));
        assert_eq!(gen(Gen::D2).wig_pushforward(), gen(Gen::M2).sub(&gen(Gen::M1)));
    }

    #[test]
    fn pushforward_of_m1d1() {
        // M₁·D₁ ↦ ½(M₂+M₁)·(D₁+D₂)
        let b = gen(Gen::M1).normal_mul(&gen(Gen::D1));
        let expected = gen(Gen::M1)
            .add(&gen(Gen::M2))
            .scale(Complex64::new(0.5, 0.0))
            .normal_mul(&gen(Gen::D1).add(&gen(Gen::D2)));
        assert_eq!(b.wig_pushforward(), expected);
    }

    #[test]
    fn bar_with_trivial_kernel_reduces_to_pushforward() {
        let ker = KernelSpec::delta();
        let b = gen(Gen::M1);
        assert_eq!(b.bar_transform(&ker), b.wig_pushforward());
    }

    #[test]
    fn bar_of_m2_picks_up_eta_derivative() {
        // P = ½ξη ⇒ ∂_ηP = ½ξ ⇒ B̄(M₂) = ½(D₁−D₂) + ½(D₁+D₂) = D₁
        let p = Poly2::monomial(1, 1, Complex64::new(0.5, 0.0));
        let ker = KernelSpec::new(p, Poly2::one()).unwrap();
        assert_eq!(gen(Gen::M2).bar_transform(&ker), gen(Gen::D1));
    }

    #[test]
    fn tilde_of_d1_with_delta_kernel() {
        // Q[D₁w] = (½D₁+M₂)Q[w] at P = 0
        let ker = KernelSpec::delta();
        let expected = gen(Gen::D1)
            .scale(Complex64::new(0.5, 0.0))
            .add(&gen(Gen::M2));
        assert_eq!(gen(Gen::D1).tilde_transform(&ker), expected);
    }

    #[test]
    fn tilde_of_m1_with_shear_phase() {
        // P = ½ξη ⇒ P₁ = ½D₂ ⇒ M₁ ↦ M₁ − D₂
        let p = Poly2::monomial(1, 1, Complex64::new(0.5, 0.0));
        let ker = KernelSpec::new(p, Poly2::one()).unwrap();
        assert_eq!(
            gen(Gen::M1).tilde_transform(&ker),
            gen(Gen::M1).sub(&gen(Gen::D2))
        );
    }

    #[test]
    fn a_of_q_examples() {
        assert_eq!(a_of_q(&Poly2::one()), WeylOp::identity());
        assert_eq!(a_of_q(&Poly2::xi()), gen(Gen::D1).add(&gen(Gen::D2)));
        // q = ξη + 1 → (D₁+D₂)(M₂−M₁) + Id in normal order
        let mut q = Poly2::one();
        q.add_term(1, 1, ONE);
        let expected = gen(Gen::D1)
            .add(&gen(Gen::D2))
            .normal_mul(&gen(Gen::M2).sub(&gen(Gen::M1)))
            .add(&WeylOp::identity());
        assert_eq!(a_of_q(&q), expected);
    }

    #[test]
    fn symbol_of_twisted_laplacian() {
        // L = (D₁−½M₂)² + (D₂+½M₁)² has symbol (ξ−½y)² + (η+½x)²
        let half = Complex64::new(0.5, 0.0);
        let l = gen(Gen::D1)
            .sub(&gen(Gen::M2).scale(half))
            .pow(2)
            .add(&gen(Gen::D2).add(&gen(Gen::M1).scale(half)).pow(2));
        let sym = l.symbol();
        let mut expected = Poly4::zero();
        // ξ² − yξ + ¼y² + η² + xη + ¼x²
        expected.add_term([0, 0, 2, 0], ONE);
        expected.add_term([0, 1, 1, 0], -ONE);
        expected.add_term([0, 2, 0, 0], Complex64::new(0.25, 0.0));
        expected.add_term([0, 0, 0, 2], ONE);
        expected.add_term([1, 0, 0, 1], ONE);
        expected.add_term([2, 0, 0, 0], Complex64::new(0.25, 0.0));
        assert_eq!(sym, expected);
    }

    #[test]
    fn pretty_renders_canonical_sum() {
        let op = gen(Gen::D1).normal_mul(&gen(Gen::M1));
        assert_eq!(op.pretty(), "-i + x*Dx");
    }
}
