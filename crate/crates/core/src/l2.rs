//! Square-integrable forms: the circle model and its pullback through the
//! symbol map.
//!
//! A circle form of degree `k` is a combination of words
//! `z^{n0} dz^{n1} ... dz^{nk}`. Its only invariant up to null forms is the
//! polynomial `P = sum coeff * n1...nk * z^{n0+...+nk}`, so the inner
//! product is the Fourier pairing of `P`s and the kernel is `P = 0`. The
//! quotient by the kernel collapses every degree above one and identifies
//! degree zero and one with Laurent polynomials, which is what the
//! reduction relations and the degree-two certificates pin down.

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{AlgebraElement, LaurentPoly};
use crate::connes::{psi_of_form, represent_form, CalculusError, PsiPair, UniversalForm};
use crate::dirac::DiracSpec;
use crate::scalar::{rat_int, Rat};
use crate::truncation::{tail_decay_pass, PlaneWindow};

use num::traits::{One, Zero};

type A = AlgebraElement<Rat>;

#[derive(Debug, Clone, PartialEq)]
pub enum L2Error {
    DegreeMismatch {
        left: usize,
        right: usize,
    },
    EmptyWord,
    /// The antiderivative relation divides by `r + 1`.
    BadPower {
        r: i64,
    },
    /// Relations that need at least one trailing `dz` factor.
    DegreeTooSmall {
        k: usize,
    },
    Calculus(CalculusError),
}

impl fmt::Display for L2Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            L2Error::DegreeMismatch { left, right } => {
                write!(f, "circle form degrees differ: {left} vs {right}")
            }
            L2Error::EmptyWord => write!(f, "circle form words need at least the z-power slot"),
            L2Error::BadPower { r } => {
                write!(f, "antiderivative relation undefined at power {r}")
            }
            L2Error::DegreeTooSmall { k } => {
                write!(f, "relation needs degree at least 2, got {k}")
            }
            L2Error::Calculus(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for L2Error {}

impl From<CalculusError> for L2Error {
    fn from(e: CalculusError) -> Self {
        L2Error::Calculus(e)
    }
}

/// Finite combination of words `z^{n0} dz^{n1} ... dz^{nk}`; the key stores
/// `(n0, ..., nk)` and zero coefficients are never kept.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleForm {
    degree: usize,
    terms: BTreeMap<Vec<i64>, Rat>,
}

impl CircleForm {
    pub fn zero(degree: usize) -> Self {
        CircleForm {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(word: &[i64], coeff: Rat) -> Result<Self, L2Error> {
        if word.is_empty() {
            return Err(L2Error::EmptyWord);
        }
        let mut out = CircleForm::zero(word.len() - 1);
        out.insert(word.to_vec(), coeff);
        Ok(out)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i64], &Rat)> {
        self.terms.iter().map(|(w, c)| (w.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, word: Vec<i64>, coeff: Rat) {
        debug_assert_eq!(word.len(), self.degree + 1);
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().clone() + coeff;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, L2Error> {
        if self.degree != rhs.degree {
            return Err(L2Error::DegreeMismatch {
                left: self.degree,
                right: rhs.degree,
            });
        }
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.insert(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        CircleForm {
            degree: self.degree,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, L2Error> {
        self.add(&rhs.neg())
    }

    pub fn scale_rat(&self, s: &Rat) -> Self {
        if s.is_zero() {
            return CircleForm::zero(self.degree);
        }
        CircleForm {
            degree: self.degree,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c * s)).collect(),
        }
    }

    /// The invariant polynomial: each word contributes
    /// `coeff * n1...nk * z^{n0+...+nk}`.
    pub fn p_polynomial(&self) -> LaurentPoly<Rat> {
        let mut p: LaurentPoly<Rat> = LaurentPoly::zero();
        for (word, c) in &self.terms {
            let mut weight = c.clone();
            for &n in &word[1..] {
                weight *= rat_int(n);
            }
            let total: i64 = word.iter().sum();
            p.insert(total, weight);
        }
        p
    }

    /// Fourier pairing of the invariant polynomials.
    pub fn inner_product(&self, rhs: &Self) -> Result<Rat, L2Error> {
        if self.degree != rhs.degree {
            return Err(L2Error::DegreeMismatch {
                left: self.degree,
                right: rhs.degree,
            });
        }
        let p = self.p_polynomial();
        let q = rhs.p_polynomial();
        let mut acc = Rat::zero();
        for (&n, c) in p.terms() {
            acc += c * q.coeff(n);
        }
        Ok(acc)
    }

    /// Same pairing through the constant term of `P* Q`; a second exact
    /// route used to cross-check the Fourier one.
    pub fn inner_product_via_constant_term(&self, rhs: &Self) -> Result<Rat, L2Error> {
        if self.degree != rhs.degree {
            return Err(L2Error::DegreeMismatch {
                left: self.degree,
                right: rhs.degree,
            });
        }
        Ok(self
            .p_polynomial()
            .adjoint()
            .mul(&rhs.p_polynomial())
            .constant_term())
    }

    /// Null exactly when the invariant polynomial vanishes, i.e. every
    /// total-degree aggregate of weighted coefficients is zero.
    pub fn kernel_membership(&self) -> bool {
        self.p_polynomial().is_zero()
    }

    /// The universal differential: `d(z^{n0} dz^{n1} ...) = dz^{n0} dz^{n1} ...`.
    pub fn delta(&self) -> Self {
        let mut out = CircleForm::zero(self.degree + 1);
        for (word, c) in &self.terms {
            if word[0] == 0 {
                continue;
            }
            let mut w2 = Vec::with_capacity(word.len() + 1);
            w2.push(0);
            w2.extend(word.iter().copied());
            out.insert(w2, c.clone());
        }
        out
    }
}

/// `z^{n0} dz^{n1}...dz^{nk} - n1...nk z^{sum - k} dz...dz`, a null form for
/// every word: both sides share the invariant polynomial.
pub fn power_reduction_relation(word: &[i64]) -> Result<CircleForm, L2Error> {
    let first = CircleForm::monomial(word, Rat::one())?;
    let k = word.len() - 1;
    let total: i64 = word.iter().sum();
    let mut weight = Rat::one();
    for &n in &word[1..] {
        weight *= rat_int(n);
    }
    let mut canonical = vec![1i64; word.len()];
    canonical[0] = total - k as i64;
    first.sub(&CircleForm::monomial(&canonical, weight)?)
}

/// `dz^r (dz)^{k-1} - r z^{r-1} dz (dz)^{k-1}`, null in degree `k`.
pub fn delta_power_relation(r: i64, k: usize) -> Result<CircleForm, L2Error> {
    if k < 1 {
        return Err(L2Error::DegreeTooSmall { k });
    }
    let mut first = vec![1i64; k + 1];
    first[0] = 0;
    first[1] = r;
    let mut second = vec![1i64; k + 1];
    second[0] = r - 1;
    CircleForm::monomial(&first, Rat::one())?.sub(&CircleForm::monomial(&second, rat_int(r))?)
}

/// `z^r (dz)^{k-1} - (r+1)^{-1} dz^{r+1} (dz)^{k-2}`, null in degree `k - 1`;
/// undefined at `r = -1`.
pub fn antiderivative_relation(r: i64, k: usize) -> Result<CircleForm, L2Error> {
    if r == -1 {
        return Err(L2Error::BadPower { r });
    }
    if k < 2 {
        return Err(L2Error::DegreeTooSmall { k });
    }
    let mut first = vec![1i64; k];
    first[0] = r;
    let mut second = vec![1i64; k];
    second[0] = 0;
    second[1] = r + 1;
    CircleForm::monomial(&first, Rat::one())?
        .sub(&CircleForm::monomial(&second, Rat::one() / rat_int(r + 1))?)
}

/// The differential the quotient induces on circle zero-forms: `z^n` goes to
/// `n z^n`.
pub fn circle_differential(p: &LaurentPoly<Rat>) -> LaurentPoly<Rat> {
    let mut out: LaurentPoly<Rat> = LaurentPoly::zero();
    for (&n, c) in p.terms() {
        let w = c * rat_int(n);
        if !w.is_zero() {
            out.insert(n, w);
        }
    }
    out
}

/// Which reading of the quotient differential on the deformed algebra to
/// apply to monomials inside the ideal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DifferentialMode {
    /// `a_i b^j b*^k` goes to `-i z^i` for every monomial.
    Literal,
    /// Ideal monomials go to zero; only the `a`-line contributes.
    Quotiented,
}

/// The degree-zero-to-one differential in the square-integrable quotient,
/// landing in Laurent polynomials. The two modes differ only on monomials
/// containing a `b`-type letter; both are kept because the vanishing of the
/// ideal's differential classes and the monomial formula pull in different
/// directions there, and neither reading is asserted beyond its own mode.
pub fn l2_differential(a: &A, mode: DifferentialMode) -> LaurentPoly<Rat> {
    let mut out: LaurentPoly<Rat> = LaurentPoly::zero();
    for (&m, c) in a.terms() {
        if matches!(mode, DifferentialMode::Quotiented) && (m.j > 0 || m.k > 0) {
            continue;
        }
        out.insert(m.i as i64, c * rat_int(-(m.i as i64)));
    }
    out
}

/// Certificate that the canonical degree-two word `z^{r-2} dz dz` is a
/// differential modulo null forms: subtracting `d` of
/// `-1/2 z^{r-2} dz^2 + z^{r-1} dz` lands in the kernel. Together with the
/// power reduction relation this collapses all of degree two.
pub fn degree_two_null_certificate(r: i64) -> Result<bool, L2Error> {
    let canonical = CircleForm::monomial(&[r - 2, 1, 1], Rat::one())?;
    let anti = CircleForm::monomial(&[r - 2, 2], -(Rat::one() / rat_int(2)))?
        .add(&CircleForm::monomial(&[r - 1, 1], Rat::one())?)?;
    Ok(canonical.sub(&anti.delta())?.kernel_membership())
}

/// Applies the symbol (kill every `b`-type letter, send `a_i` to `z^i`) to
/// head and letters of a universal form, producing a circle form of the
/// same degree.
pub fn symbol_form(form: &UniversalForm) -> CircleForm {
    let mut out = CircleForm::zero(form.degree());
    for (word, a0) in form.terms() {
        if word.iter().any(|m| m.j > 0 || m.k > 0) {
            continue;
        }
        for (&hm, c) in a0.terms() {
            if hm.j > 0 || hm.k > 0 {
                continue;
            }
            let mut tuple = Vec::with_capacity(word.len() + 1);
            tuple.push(hm.i as i64);
            tuple.extend(word.iter().map(|m| m.i as i64));
            out.insert(tuple, c.clone());
        }
    }
    out
}

/// The class of the obvious preimage of a circle form: each `z^n` slot
/// lifts to the `a`-line power, and each `dz^n` letter to the commutator
/// class `(0, -n a_n)`.
pub fn lift_pair(q: &Rat, circle: &CircleForm) -> Result<PsiPair, CalculusError> {
    let mut acc = PsiPair::zero(q)?;
    for (word, c) in circle.terms() {
        let head = A::monomial(q, word[0] as i32, 0, 0, c.clone())?;
        let mut pair = PsiPair::from_plain(&head);
        for &n in &word[1..] {
            let letter = PsiPair {
                plain: A::zero(q)?,
                s_part: A::monomial(q, n as i32, 0, 0, rat_int(-n))?,
            };
            pair = pair.mul(&letter)?;
        }
        acc = acc.add(&pair)?;
    }
    Ok(acc)
}

/// Result of checking the pushforward identity for one universal form.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaPushforwardReport {
    pub symbol_terms: usize,
    /// Pairing of the symbol with itself by the Fourier route.
    pub left: Rat,
    /// The same pairing by the constant-term route.
    pub right: Rat,
    pub sides_equal: bool,
    /// The class of the form minus the lifted class of its symbol has both
    /// components inside the ideal.
    pub ideal_ok: bool,
    /// First-leg tail norms of the represented discrepancy.
    pub profile: Vec<f64>,
    pub decay_ok: bool,
}

impl SigmaPushforwardReport {
    pub fn passed(&self) -> bool {
        self.sides_equal && self.ideal_ok && self.decay_ok
    }
}

/// Checks that pairing a form against itself factors through its symbol:
/// both exact routes to the circle pairing agree, the discrepancy class
/// lies in the ideal, and the represented discrepancy has decaying
/// first-leg tails.
pub fn sigma_pushforward_check(
    form: &UniversalForm,
    ladder: &[u32],
) -> Result<SigmaPushforwardReport, L2Error> {
    let sym = symbol_form(form);
    let left = sym.inner_product(&sym)?;
    let right = sym.inner_product_via_constant_term(&sym)?;
    let q = form.q().clone();
    let lift = lift_pair(&q, &sym)?;
    let pair = psi_of_form(form)?;
    let diff_plain = pair.plain.sub(&lift.plain).map_err(CalculusError::from)?;
    let diff_s = pair.s_part.sub(&lift.s_part).map_err(CalculusError::from)?;
    let ideal_ok = diff_plain.in_ideal_beta() && diff_s.in_ideal_beta();

    let last = ladder.last().copied().unwrap_or(8);
    let mut cuts: Vec<u32> = ladder.to_vec();
    cuts.push(2 * last);
    let m = 2 * last + 8;
    let w = PlaneWindow { m_row: m, m_col: m };
    let spec = DiracSpec::generic();
    let defect = represent_form(&spec, form, w)?
        .sub(&lift.evaluate(w)?)
        .map_err(CalculusError::from)?;
    let guard = defect.margin();
    let profile = defect
        .interior_filtered(guard)
        .tail_norm_profile_first_leg(&cuts);
    let decay_ok = tail_decay_pass(&profile, 2.0);
    Ok(SigmaPushforwardReport {
        symbol_terms: sym.terms().count(),
        sides_equal: left == right,
        left,
        right,
        ideal_ok,
        profile,
        decay_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q() -> Rat {
        rat(1, 2)
    }

    fn dz() -> CircleForm {
        CircleForm::monomial(&[0, 1], Rat::one()).unwrap()
    }

    #[test]
    fn basic_pairings() {
        let zdz = CircleForm::monomial(&[1, 1], Rat::one()).unwrap();
        assert_eq!(dz().inner_product(&dz()).unwrap(), Rat::one());
        assert_eq!(zdz.inner_product(&dz()).unwrap(), Rat::zero());
        let zero = CircleForm::zero(1);
        assert_eq!(zero.inner_product(&dz()).unwrap(), Rat::zero());
        assert_eq!(
            dz().inner_product(&CircleForm::zero(2)),
            Err(L2Error::DegreeMismatch { left: 1, right: 2 })
        );
    }

    #[test]
    fn two_pairing_routes_agree_on_random_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        for _ in 0..40 {
            let k = rng.gen_range(1..=3usize);
            let mut w = CircleForm::zero(k);
            let mut v = CircleForm::zero(k);
            for _ in 0..3 {
                let word: Vec<i64> = (0..=k).map(|_| rng.gen_range(-3..=3)).collect();
                w = w
                    .add(&CircleForm::monomial(&word, rat(rng.gen_range(-5..=5), 1)).unwrap())
                    .unwrap();
                let word2: Vec<i64> = (0..=k).map(|_| rng.gen_range(-3..=3)).collect();
                v = v
                    .add(&CircleForm::monomial(&word2, rat(rng.gen_range(-5..=5), 1)).unwrap())
                    .unwrap();
            }
            assert_eq!(
                w.inner_product(&v).unwrap(),
                w.inner_product_via_constant_term(&v).unwrap()
            );
        }
    }

    #[test]
    fn self_pairing_nonnegative_and_detects_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..100 {
            let k = rng.gen_range(1..=3usize);
            let mut w = CircleForm::zero(k);
            for _ in 0..rng.gen_range(1..=4) {
                let word: Vec<i64> = (0..=k).map(|_| rng.gen_range(-4..=4)).collect();
                w = w
                    .add(
                        &CircleForm::monomial(
                            &word,
                            rat(rng.gen_range(-6..=6), rng.gen_range(1..=3)),
                        )
                        .unwrap(),
                    )
                    .unwrap();
            }
            let n = w.inner_product(&w).unwrap();
            assert!(n >= Rat::zero());
            assert_eq!(n.is_zero(), w.kernel_membership());
        }
    }

    #[test]
    fn reduction_relations_are_null() {
        let mut rng = ChaCha8Rng::seed_from_u64(111);
        for _ in 0..20 {
            let k = rng.gen_range(1..=3usize);
            let word: Vec<i64> = (0..=k).map(|_| rng.gen_range(-4..=4)).collect();
            assert!(power_reduction_relation(&word).unwrap().kernel_membership());
            let r = rng.gen_range(-4..=4);
            assert!(delta_power_relation(r, k).unwrap().kernel_membership());
            if k >= 2 {
                let mut r2 = rng.gen_range(-4..=4);
                if r2 == -1 {
                    r2 = 0;
                }
                assert!(antiderivative_relation(r2, k).unwrap().kernel_membership());
            }
        }
        assert!(!dz().kernel_membership());
        assert_eq!(
            antiderivative_relation(-1, 2),
            Err(L2Error::BadPower { r: -1 })
        );
    }

    #[test]
    fn circle_differential_examples() {
        let p = circle_differential(&LaurentPoly::z_pow(3));
        assert_eq!(p.coeff(3), rat(3, 1));
        assert!(circle_differential(&LaurentPoly::z_pow(0)).is_zero());
        let p = circle_differential(&LaurentPoly::z_pow(-2));
        assert_eq!(p.coeff(-2), rat(-2, 1));
    }

    #[test]
    fn deformed_differential_modes() {
        let qq = q();
        let alpha = A::gen_alpha(&qq).unwrap();
        for mode in [DifferentialMode::Literal, DifferentialMode::Quotiented] {
            let d = l2_differential(&alpha, mode);
            assert_eq!(d.coeff(1), rat(-1, 1));
            assert_eq!(d.terms().count(), 1);
            assert!(l2_differential(&A::one(&qq).unwrap(), mode).is_zero());
        }
        let ab = alpha.mul(&A::gen_beta(&qq).unwrap()).unwrap();
        let lit = l2_differential(&ab, DifferentialMode::Literal);
        assert_eq!(lit.coeff(1), rat(-1, 1));
        assert!(l2_differential(&ab, DifferentialMode::Quotiented).is_zero());
    }

    #[test]
    fn modes_agree_off_the_ideal() {
        let qq = q();
        let mut rng = ChaCha8Rng::seed_from_u64(121);
        for _ in 0..20 {
            let a = A::random(&qq, &mut rng, 3, 0, 3).unwrap();
            assert_eq!(
                l2_differential(&a, DifferentialMode::Literal),
                l2_differential(&a, DifferentialMode::Quotiented)
            );
        }
    }

    #[test]
    fn delta_image_of_kernel_can_leave_kernel() {
        // dz^2 - 2 z dz is null in degree one, but its differential is
        // -2 dz dz, which is not null: the degree-two collapse needs the
        // antiderivative certificate, not naive d-images.
        let k1 = CircleForm::monomial(&[0, 2], Rat::one())
            .unwrap()
            .sub(&CircleForm::monomial(&[1, 1], rat(2, 1)).unwrap())
            .unwrap();
        assert!(k1.kernel_membership());
        let image = k1.delta();
        assert!(!image.kernel_membership());
    }

    #[test]
    fn degree_two_certificates() {
        for r in -3..=5 {
            assert!(degree_two_null_certificate(r).unwrap(), "failed at {r}");
        }
        // Every degree-two word then collapses through the power reduction.
        let mut rng = ChaCha8Rng::seed_from_u64(131);
        for _ in 0..20 {
            let word: Vec<i64> = (0..3).map(|_| rng.gen_range(-3..=3)).collect();
            assert!(power_reduction_relation(&word).unwrap().kernel_membership());
        }
    }

    #[test]
    fn pushforward_of_alpha_delta() {
        let qq = q();
        let alpha = A::gen_alpha(&qq).unwrap();
        let report = sigma_pushforward_check(&UniversalForm::delta(&alpha), &[8, 16]).unwrap();
        assert_eq!(report.left, Rat::one());
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn pushforward_of_beta_delta_vanishes() {
        let qq = q();
        let beta = A::gen_beta(&qq).unwrap();
        let report = sigma_pushforward_check(&UniversalForm::delta(&beta), &[8, 16]).unwrap();
        assert_eq!(report.symbol_terms, 0);
        assert_eq!(report.left, Rat::zero());
        assert!(report.passed(), "{report:?}");
        // The discrepancy here is the whole commutator; its first-leg decay
        // is a genuine measurement, not an exact zero.
        assert!(report.profile[0] > 1e-6);
    }

    #[test]
    fn pushforward_of_mixed_form() {
        let qq = q();
        let alpha = A::gen_alpha(&qq).unwrap();
        let form = UniversalForm::delta(&alpha.adjoint())
            .left_mul(&alpha)
            .unwrap();
        let report = sigma_pushforward_check(&form, &[8, 16]).unwrap();
        // Symbol is z dz^{-1}: P = -1, so the self-pairing is 1.
        assert_eq!(report.left, Rat::one());
        assert!(report.passed(), "{report:?}");
    }
}
