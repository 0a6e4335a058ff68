//! The coordinate *-algebra of quantum SU(2) at a rational deformation
//! parameter, in exact normal-ordered form.
//!
//! Generators `a` (alpha) and `b` (beta) satisfy
//!
//! ```text
//! a* a + b* b = 1        a a* + q^2 b b* = 1
//! a b = q b a            a b* = q b* a        b b* = b* b
//! ```
//!
//! Every element is stored on the linear basis `a_i b^j b*^k` where `a_i`
//! means `a^i` for `i >= 0` and `(a*)^|i|` for `i < 0`. Products reduce to
//! this basis by two exact rewrites: moving `a`-letters left across
//! `b`-letters costs a power of `q`, and mixed `a`-powers collapse through
//! the closed forms for `a^p (a*)^r` and `(a*)^r a^p` as polynomials in the
//! central positive element `W = b b*`. All coefficients stay rational.

use std::collections::BTreeMap;
use std::fmt;

use num::traits::{One, Signed, Zero};
use rand::Rng;

use crate::scalar::{format_rat, parse_rat, rat_pow, Rat, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("deformation parameter must satisfy 0 < q < 1, got {0}")]
    BadQ(String),
    #[error("mismatched deformation parameters: {0} vs {1}")]
    MismatchedQ(String, String),
    #[error("cannot parse element text: {0:?}")]
    BadElementText(String),
}

/// Basis monomial `a_i b^j b*^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mon {
    pub i: i32,
    pub j: u32,
    pub k: u32,
}

impl Mon {
    pub fn new(i: i32, j: u32, k: u32) -> Self {
        Mon { i, j, k }
    }

    pub const ONE: Mon = Mon { i: 0, j: 0, k: 0 };

    /// Total second-leg displacement of the represented operator: `b`
    /// lowers the winding index, `b*` raises it.
    pub fn winding(&self) -> i64 {
        self.j as i64 - self.k as i64
    }

    pub fn is_scalar(&self) -> bool {
        *self == Mon::ONE
    }
}

impl fmt::Display for Mon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a^{} b^{} b*^{}", self.i, self.j, self.k)
    }
}

fn check_q(q: &Rat) -> Result<(), AlgebraError> {
    if q.is_positive() && q < &Rat::one() {
        Ok(())
    } else {
        Err(AlgebraError::BadQ(format!("{q}")))
    }
}

/// Reduction of `a_{i1} a_{i2}` to normal form: a list of
/// `(rational coefficient, W-power)` pairs attached to `a_{i1+i2}`.
///
/// Same-sign powers concatenate freely. For mixed signs the closed forms
/// are, with `p, r > 0` and `min` the smaller of the two,
///
/// ```text
/// a^p (a*)^r  = a_{p-r} * prod_{s = r-min+1}^{r} (1 - q^{2s} W)
/// (a*)^r a^p  = a_{p-r} * prod_{s = p-min}^{p-1} (1 - q^{-2s} W)
/// ```
///
/// both provable by induction on `min` from `a a* = 1 - q^2 W`,
/// `a* a = 1 - W` and `W a = q^{-2} a W`.
fn alpha_product_w_poly(q: &Rat, i1: i32, i2: i32) -> Vec<Rat> {
    if i1 == 0 || i2 == 0 || i1.signum() == i2.signum() {
        return vec![Rat::one()];
    }
    let exponents: Vec<i64> = if i1 > 0 {
        // a^p (a*)^r
        let (p, r) = (i1 as i64, (-i2) as i64);
        let min = p.min(r);
        ((r - min + 1)..=r).map(|s| 2 * s).collect()
    } else {
        // (a*)^r a^p
        let (r, p) = ((-i1) as i64, i2 as i64);
        let min = p.min(r);
        ((p - min)..=(p - 1)).map(|s| -2 * s).collect()
    };
    // Expand prod (1 - q^e W) as a polynomial in W.
    let mut poly = vec![Rat::one()];
    for e in exponents {
        let qe = rat_pow(q, e);
        let mut next = vec![Rat::zero(); poly.len() + 1];
        for (t, c) in poly.iter().enumerate() {
            next[t] += c;
            next[t + 1] -= c * &qe;
        }
        poly = next;
    }
    poly
}

/// Exact normal-ordered product of two basis monomials.
pub fn mul_mon(q: &Rat, m1: Mon, m2: Mon) -> Vec<(Mon, Rat)> {
    // Step 1: move a_{i2} across b^{j1} b*^{k1}; each b-type letter costs
    // q^{-1} per a and q^{+1} per a*, uniformly q^{-(j1+k1)*i2}.
    let phase = rat_pow(q, -((m1.j + m1.k) as i64) * m2.i as i64);
    let j = m1.j + m2.j;
    let k = m1.k + m2.k;
    let i = m1.i + m2.i;
    alpha_product_w_poly(q, m1.i, m2.i)
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(t, c)| (Mon::new(i, j + t as u32, k + t as u32), c * &phase))
        .collect()
}

/// Element of the quantum SU(2) algebra: a finite rational-coefficient (or
/// generic scalar) combination of normal-ordered monomials, tagged with its
/// deformation parameter.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlgebraElement<T: Scalar> {
    q: Rat,
    terms: BTreeMap<Mon, T>,
}

impl<T: Scalar> AlgebraElement<T> {
    pub fn zero(q: &Rat) -> Result<Self, AlgebraError> {
        check_q(q)?;
        Ok(AlgebraElement {
            q: q.clone(),
            terms: BTreeMap::new(),
        })
    }

    pub fn one(q: &Rat) -> Result<Self, AlgebraError> {
        Self::monomial(q, 0, 0, 0, T::one())
    }

    pub fn monomial(q: &Rat, i: i32, j: u32, k: u32, coeff: T) -> Result<Self, AlgebraError> {
        check_q(q)?;
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(Mon::new(i, j, k), coeff);
        }
        Ok(AlgebraElement {
            q: q.clone(),
            terms,
        })
    }

    pub fn gen_alpha(q: &Rat) -> Result<Self, AlgebraError> {
        Self::monomial(q, 1, 0, 0, T::one())
    }

    pub fn gen_alpha_star(q: &Rat) -> Result<Self, AlgebraError> {
        Self::monomial(q, -1, 0, 0, T::one())
    }

    pub fn gen_beta(q: &Rat) -> Result<Self, AlgebraError> {
        Self::monomial(q, 0, 1, 0, T::one())
    }

    pub fn gen_beta_star(q: &Rat) -> Result<Self, AlgebraError> {
        Self::monomial(q, 0, 0, 1, T::one())
    }

    pub fn q(&self) -> &Rat {
        &self.q
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mon, &T)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: Mon) -> Option<&T> {
        self.terms.get(&m)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, m: Mon, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn check_same_q(&self, rhs: &Self) -> Result<(), AlgebraError> {
        if self.q != rhs.q {
            return Err(AlgebraError::MismatchedQ(
                format!("{}", self.q),
                format!("{}", rhs.q),
            ));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        self.check_same_q(rhs)?;
        let mut out = self.clone();
        for (&m, c) in &rhs.terms {
            out.insert(m, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        AlgebraElement {
            q: self.q.clone(),
            terms: self.terms.iter().map(|(&m, c)| (m, -c.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        let mut out = AlgebraElement {
            q: self.q.clone(),
            terms: BTreeMap::new(),
        };
        for (&m, c) in &self.terms {
            out.insert(m, c.clone() * s.clone());
        }
        out
    }

    pub fn scale_rat(&self, s: &Rat) -> Self {
        let mut out = AlgebraElement {
            q: self.q.clone(),
            terms: BTreeMap::new(),
        };
        for (&m, c) in &self.terms {
            out.insert(m, c.mul_rat(s));
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        self.check_same_q(rhs)?;
        let mut out = AlgebraElement {
            q: self.q.clone(),
            terms: BTreeMap::new(),
        };
        for (&m1, c1) in &self.terms {
            for (&m2, c2) in &rhs.terms {
                let c12 = c1.clone() * c2.clone();
                for (m, coef) in mul_mon(&self.q, m1, m2) {
                    out.insert(m, c12.mul_rat(&coef));
                }
            }
        }
        Ok(out)
    }

    /// The involution: `(c a_i b^j b*^k)* = conj(c) q^{(j+k) i} a_{-i} b^k b*^j`.
    pub fn adjoint(&self) -> Self {
        let mut out = AlgebraElement {
            q: self.q.clone(),
            terms: BTreeMap::new(),
        };
        for (&m, c) in &self.terms {
            let phase = rat_pow(&self.q, (m.j + m.k) as i64 * m.i as i64);
            out.insert(Mon::new(-m.i, m.k, m.j), c.conj().mul_rat(&phase));
        }
        out
    }

    pub fn pow(&self, n: u32) -> Result<Self, AlgebraError> {
        let mut acc = Self::one(&self.q)?;
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Commutator `[self, rhs]`.
    pub fn commutator(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        self.mul(rhs)?.sub(&rhs.mul(self)?)
    }

    /// True when every monomial contains a `b`-type letter, i.e. the element
    /// lies in the two-sided ideal generated by `b`.
    pub fn in_ideal_beta(&self) -> bool {
        self.terms.keys().all(|m| m.j + m.k >= 1)
    }

    /// Splits into (ideal part, part on the `a`-line).
    pub fn ideal_split(&self) -> (Self, Self) {
        let mut ideal = AlgebraElement {
            q: self.q.clone(),
            terms: BTreeMap::new(),
        };
        let mut line = ideal.clone();
        for (&m, c) in &self.terms {
            if m.j + m.k >= 1 {
                ideal.insert(m, c.clone());
            } else {
                line.insert(m, c.clone());
            }
        }
        (ideal, line)
    }

    /// Image under the quotient by the `b`-ideal: the Laurent polynomial
    /// `a_i -> z^i`. This is a *-homomorphism onto the circle algebra.
    pub fn symbol(&self) -> LaurentPoly<T> {
        let mut p = LaurentPoly::zero();
        for (&m, c) in &self.terms {
            if m.j == 0 && m.k == 0 {
                p.insert(m.i as i64, c.clone());
            }
        }
        p
    }

    /// The Haar state: monomials with `i != 0` or `j != k` vanish, and
    /// `h(W^j) = (1 - q^2) / (1 - q^{2(j+1)})`.
    pub fn haar(&self) -> T {
        let mut acc = T::zero();
        for (&m, c) in &self.terms {
            if m.i != 0 || m.j != m.k {
                continue;
            }
            let num = Rat::one() - rat_pow(&self.q, 2);
            let den = Rat::one() - rat_pow(&self.q, 2 * (m.j as i64 + 1));
            acc = acc + c.mul_rat(&(num / den));
        }
        acc
    }

    /// Largest index displacement of the represented operator, the margin
    /// the representation assigns: `max(|i|, |j - k|)` over monomials.
    pub fn rep_margin(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| (m.i.unsigned_abs()).max(m.winding().unsigned_abs() as u32))
            .max()
            .unwrap_or(0)
    }

    pub fn map_scalar<T2: Scalar>(&self, f: impl Fn(&T) -> T2) -> AlgebraElement<T2> {
        let mut out = AlgebraElement {
            q: self.q.clone(),
            terms: BTreeMap::new(),
        };
        for (&m, c) in &self.terms {
            out.insert(m, f(c));
        }
        out
    }
}

impl AlgebraElement<Rat> {
    /// Text form `num/den * a^i b^j b*^k + ...`; `0` for the zero element.
    /// Round-trips exactly.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(m, c)| format!("{} * {}", format_rat(c), m))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn from_text(q: &Rat, text: &str) -> Result<Self, AlgebraError> {
        check_q(q)?;
        let text = text.trim();
        let mut out = Self::zero(q)?;
        if text == "0" {
            return Ok(out);
        }
        let bad = || AlgebraError::BadElementText(text.to_string());
        for term in text.split(" + ") {
            let (coeff, mon) = term.split_once(" * ").ok_or_else(bad)?;
            let c = parse_rat(coeff).map_err(|_| bad())?;
            let tokens: Vec<&str> = mon.split_whitespace().collect();
            let [ta, tb, tbs] = tokens.as_slice() else {
                return Err(bad());
            };
            let i: i32 = ta
                .strip_prefix("a^")
                .ok_or_else(bad)?
                .parse()
                .map_err(|_| bad())?;
            let j: u32 = tb
                .strip_prefix("b^")
                .ok_or_else(bad)?
                .parse()
                .map_err(|_| bad())?;
            let k: u32 = tbs
                .strip_prefix("b*^")
                .ok_or_else(bad)?
                .parse()
                .map_err(|_| bad())?;
            out.insert(Mon::new(i, j, k), c);
        }
        Ok(out)
    }

    /// The five defining relations as elements that must normal-order to
    /// zero; each is returned with a stable name.
    pub fn relation_defects(q: &Rat) -> Result<Vec<(&'static str, Self)>, AlgebraError> {
        let a = Self::gen_alpha(q)?;
        let astar = Self::gen_alpha_star(q)?;
        let b = Self::gen_beta(q)?;
        let bstar = Self::gen_beta_star(q)?;
        let one = Self::one(q)?;
        let q2 = rat_pow(q, 2);
        Ok(vec![
            (
                "a*a + b*b - 1",
                astar.mul(&a)?.add(&bstar.mul(&b)?)?.sub(&one)?,
            ),
            (
                "aa* + q^2 bb* - 1",
                a.mul(&astar)?
                    .add(&b.mul(&bstar)?.scale_rat(&q2))?
                    .sub(&one)?,
            ),
            ("ab - q ba", a.mul(&b)?.sub(&b.mul(&a)?.scale_rat(q))?),
            (
                "ab* - q b*a",
                a.mul(&bstar)?.sub(&bstar.mul(&a)?.scale_rat(q))?,
            ),
            ("bb* - b*b", b.mul(&bstar)?.sub(&bstar.mul(&b)?)?),
        ])
    }

    /// Deterministic random element for property sweeps.
    pub fn random(
        q: &Rat,
        rng: &mut impl Rng,
        max_abs_i: i32,
        max_jk: u32,
        n_terms: usize,
    ) -> Result<Self, AlgebraError> {
        let mut out = Self::zero(q)?;
        for _ in 0..n_terms {
            let i = rng.gen_range(-max_abs_i..=max_abs_i);
            let j = rng.gen_range(0..=max_jk);
            let k = rng.gen_range(0..=max_jk);
            let num = rng.gen_range(-9i64..=9);
            let den = rng.gen_range(1i64..=9);
            out.insert(Mon::new(i, j, k), crate::scalar::rat(num, den));
        }
        Ok(out)
    }
}

impl<T: Scalar> fmt::Display for AlgebraElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c}) * {m}")?;
        }
        Ok(())
    }
}

/// Laurent polynomial in one variable: the circle algebra side of the
/// quotient and the aggregate carrier of the square-integrable calculus.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaurentPoly<T> {
    terms: BTreeMap<i64, T>,
}

impl<T: Scalar> LaurentPoly<T> {
    pub fn zero() -> Self {
        LaurentPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::z_pow(0)
    }

    pub fn z_pow(n: i64) -> Self {
        let mut p = Self::zero();
        p.insert(n, T::one());
        p
    }

    pub fn insert(&mut self, n: i64, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(n) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn coeff(&self, n: i64) -> T {
        self.terms.get(&n).cloned().unwrap_or_else(T::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &T)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (&n, c) in &rhs.terms {
            out.insert(n, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(&n, c)| (n, -c.clone())).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (&n, c) in &self.terms {
            for (&m, d) in &rhs.terms {
                out.insert(n + m, c.clone() * d.clone());
            }
        }
        out
    }

    pub fn scale(&self, s: &T) -> Self {
        let mut out = Self::zero();
        for (&n, c) in &self.terms {
            out.insert(n, c.clone() * s.clone());
        }
        out
    }

    pub fn scale_rat(&self, s: &Rat) -> Self {
        let mut out = Self::zero();
        for (&n, c) in &self.terms {
            out.insert(n, c.mul_rat(s));
        }
        out
    }

    /// `z^n -> conj(c) z^{-n}`: the circle-algebra involution.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for (&n, c) in &self.terms {
            out.insert(-n, c.conj());
        }
        out
    }

    pub fn constant_term(&self) -> T {
        self.coeff(0)
    }
}

impl<T: Scalar> fmt::Display for LaurentPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (n, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*z^{n}")?;
        }
        Ok(())
    }
}

/// Fixed element `W^j = (b b*)^j` used by Haar-state oracles.
pub fn w_power(q: &Rat, j: u32) -> Result<AlgebraElement<Rat>, AlgebraError> {
    AlgebraElement::monomial(q, 0, j, j, Rat::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q() -> Rat {
        rat(1, 2)
    }

    fn el(i: i32, j: u32, k: u32) -> AlgebraElement<Rat> {
        AlgebraElement::monomial(&q(), i, j, k, Rat::one()).unwrap()
    }

    #[test]
    fn defining_relations_normal_order_to_zero() {
        for (name, defect) in AlgebraElement::relation_defects(&q()).unwrap() {
            assert!(defect.is_zero(), "{name} has defect {defect}");
        }
    }

    #[test]
    fn mixed_alpha_powers_match_hand_reduction() {
        // a^2 a* = a - q^2 a W.
        let lhs = el(2, 0, 0).mul(&el(-1, 0, 0)).unwrap();
        let mut expect = el(1, 0, 0);
        expect = expect
            .sub(&el(1, 1, 1).scale_rat(&rat_pow(&q(), 2)))
            .unwrap();
        assert_eq!(lhs, expect);

        // a* a^2 = a - q^{-2} a W.
        let lhs = el(-1, 0, 0).mul(&el(2, 0, 0)).unwrap();
        let mut expect = el(1, 0, 0);
        expect = expect
            .sub(&el(1, 1, 1).scale_rat(&rat_pow(&q(), -2)))
            .unwrap();
        assert_eq!(lhs, expect);
    }

    #[test]
    fn beta_letters_cost_q_per_alpha() {
        // b^2 a = q^{-2} a b^2.
        let lhs = el(0, 2, 0).mul(&el(1, 0, 0)).unwrap();
        let expect = el(1, 2, 0).scale_rat(&rat_pow(&q(), -2));
        assert_eq!(lhs, expect);
        // b* a* = q a* b*.
        let lhs = el(0, 0, 1).mul(&el(-1, 0, 0)).unwrap();
        let expect = el(-1, 0, 1).scale_rat(&q());
        assert_eq!(lhs, expect);
    }

    #[test]
    fn adjoint_is_an_involution_and_antihomomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let a = AlgebraElement::random(&q(), &mut rng, 2, 2, 3).unwrap();
            let b = AlgebraElement::random(&q(), &mut rng, 2, 2, 3).unwrap();
            assert_eq!(a.adjoint().adjoint(), a);
            let lhs = a.mul(&b).unwrap().adjoint();
            let rhs = b.adjoint().mul(&a.adjoint()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn multiplication_is_associative_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let a = AlgebraElement::random(&q(), &mut rng, 2, 2, 2).unwrap();
            let b = AlgebraElement::random(&q(), &mut rng, 2, 2, 2).unwrap();
            let c = AlgebraElement::random(&q(), &mut rng, 2, 2, 2).unwrap();
            let lhs = a.mul(&b).unwrap().mul(&c).unwrap();
            let rhs = a.mul(&b.mul(&c).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn haar_state_on_w_powers() {
        // h(1) = 1, h(W) = 1/(1+q^2), h(W^2) = (1-q^2)/(1-q^6).
        assert_eq!(w_power(&q(), 0).unwrap().haar(), Rat::one());
        assert_eq!(w_power(&q(), 1).unwrap().haar(), rat(4, 5));
        assert_eq!(w_power(&q(), 2).unwrap().haar(), rat(16, 21));
        // Off-diagonal monomials vanish.
        assert_eq!(el(1, 2, 2).haar(), Rat::zero());
        assert_eq!(el(0, 2, 1).haar(), Rat::zero());
    }

    #[test]
    fn haar_state_is_positive_on_random_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..40 {
            let a = AlgebraElement::random(&q(), &mut rng, 2, 2, 3).unwrap();
            let v = a.adjoint().mul(&a).unwrap().haar();
            assert!(!v.is_negative(), "h(a*a) = {v} < 0");
        }
    }

    #[test]
    fn symbol_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..40 {
            let a = AlgebraElement::random(&q(), &mut rng, 2, 2, 3).unwrap();
            let b = AlgebraElement::random(&q(), &mut rng, 2, 2, 3).unwrap();
            let lhs = a.mul(&b).unwrap().symbol();
            let rhs = a.symbol().mul(&b.symbol());
            assert_eq!(lhs, rhs);
        }
        // And a spot value: symbol(a a*) = 1.
        let p = el(1, 0, 0).mul(&el(-1, 0, 0)).unwrap().symbol();
        assert_eq!(p, LaurentPoly::one());
    }

    #[test]
    fn ideal_membership_and_split() {
        let x = el(1, 1, 0).add(&el(2, 0, 0)).unwrap();
        assert!(!x.in_ideal_beta());
        let (ideal, line) = x.ideal_split();
        assert!(ideal.in_ideal_beta());
        assert_eq!(line, el(2, 0, 0));
        assert_eq!(ideal.add(&line).unwrap(), x);
        // b b* a stays in the ideal after reduction.
        let y = el(0, 1, 1).mul(&el(1, 0, 0)).unwrap();
        assert!(y.in_ideal_beta());
    }

    #[test]
    fn element_text_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let a = AlgebraElement::random(&q(), &mut rng, 3, 2, 4).unwrap();
            let text = a.to_text();
            let back = AlgebraElement::from_text(&q(), &text).unwrap();
            assert_eq!(a, back, "text was {text}");
        }
        assert_eq!(
            AlgebraElement::from_text(&q(), "0").unwrap(),
            AlgebraElement::zero(&q()).unwrap()
        );
        assert!(AlgebraElement::from_text(&q(), "not an element").is_err());
        assert!(AlgebraElement::from_text(&rat(3, 2), "0").is_err());
    }

    #[test]
    fn mismatched_q_contexts_are_rejected() {
        let a = AlgebraElement::<Rat>::gen_alpha(&rat(1, 2)).unwrap();
        let b = AlgebraElement::<Rat>::gen_alpha(&rat(1, 3)).unwrap();
        assert!(matches!(a.mul(&b), Err(AlgebraError::MismatchedQ(_, _))));
        assert!(matches!(a.add(&b), Err(AlgebraError::MismatchedQ(_, _))));
    }

    #[test]
    fn laurent_poly_ops() {
        let z = LaurentPoly::<Rat>::z_pow(1);
        let zi = LaurentPoly::<Rat>::z_pow(-1);
        assert_eq!(z.mul(&zi), LaurentPoly::one());
        assert_eq!(z.adjoint(), zi);
        let p = z.scale_rat(&rat(2, 1)).add(&LaurentPoly::one());
        assert_eq!(p.coeff(1), rat(2, 1));
        assert_eq!(p.constant_term(), Rat::one());
    }
}
