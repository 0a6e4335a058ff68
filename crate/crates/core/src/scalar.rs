//! Scalar tower shared by every operator and algebra type in the crate.
//!
//! Exact arithmetic is the default. The base is `Rat` (arbitrary-precision
//! rationals); on top of it sit Gaussian rationals, a fixed real quadratic
//! extension, and `SqrtExt`, a ring of formal sums `sum c_w * prod sqrt(x)`
//! indexed by finite multisets of radicands. Floating point enters only
//! through [`Scalar::to_f64`], which the norm certificates use.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, the ground field for all exact data.
pub type Rat = BigRational;

/// `n/d` as a `Rat`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as a `Rat`.
pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// `q^e` for any integer exponent; `e < 0` requires `q != 0`.
pub fn rat_pow(q: &Rat, e: i64) -> Rat {
    if e == 0 {
        return Rat::one();
    }
    let base = if e < 0 { q.recip() } else { q.clone() };
    let mut acc = Rat::one();
    for _ in 0..e.unsigned_abs() {
        acc *= &base;
    }
    acc
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rat_sqrt(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    if r.is_zero() {
        return Some(Rat::zero());
    }
    let (num, den) = (r.numer(), r.denom());
    let sn = num.sqrt();
    let sd = den.sqrt();
    if &(&sn * &sn) == num && &(&sd * &sd) == den {
        Some(Rat::new(sn, sd))
    } else {
        None
    }
}

/// Renders `r` as `num/den` (always with an explicit denominator), the form
/// used by every text serialization in the crate.
pub fn format_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `num/den` or a bare integer.
pub fn parse_rat(s: &str) -> Result<Rat, ScalarError> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = n
        .parse()
        .map_err(|_| ScalarError::BadRational(s.to_string()))?;
    let den: BigInt = d
        .parse()
        .map_err(|_| ScalarError::BadRational(s.to_string()))?;
    if den.is_zero() {
        return Err(ScalarError::BadRational(s.to_string()));
    }
    Ok(Rat::new(num, den))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("cannot parse rational from {0:?}")]
    BadRational(String),
    #[error("negative radicand {0}")]
    NegativeRadicand(String),
}

/// Commutative ring with a unit, a rational embedding, and a float shadow.
///
/// `PartialOrd` is not required; equality is exact for every implementor
/// except `f64`, whose impl exists so the same operator code can run a
/// floating cross-check of an exact computation.
pub trait Scalar:
    Clone + PartialEq + fmt::Debug + fmt::Display + Zero + One + Neg<Output = Self> + Sub<Output = Self>
{
    fn from_rat(r: &Rat) -> Self;

    fn to_f64(&self) -> f64;

    /// Complex conjugation; identity on real scalars.
    fn conj(&self) -> Self {
        self.clone()
    }

    fn mul_rat(&self, r: &Rat) -> Self {
        self.clone() * Self::from_rat(r)
    }

    fn from_i64(n: i64) -> Self {
        Self::from_rat(&rat_int(n))
    }
}

/// Scalars with division, needed by the elimination-based rank routines.
pub trait FieldScalar: Scalar + Div<Output = Self> {
    /// Multiplicative inverse; `None` for zero.
    fn try_inv(&self) -> Option<Self>;
}

impl Scalar for f64 {
    fn from_rat(r: &Rat) -> Self {
        // Desk-scale rationals always convert; fall back on a
        // numerator/denominator split for extreme cases.
        ToPrimitive::to_f64(r)
            .unwrap_or_else(|| r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap())
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl FieldScalar for f64 {
    fn try_inv(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }
}

impl Scalar for Rat {
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self)
            .unwrap_or_else(|| self.numer().to_f64().unwrap() / self.denom().to_f64().unwrap())
    }

    fn mul_rat(&self, r: &Rat) -> Self {
        self * r
    }
}

impl FieldScalar for Rat {
    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// Gaussian rational `re + im*i`, used for root-of-unity phase matrices.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct GaussRat {
    pub re: Rat,
    pub im: Rat,
}

impl GaussRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        GaussRat { re, im }
    }

    pub fn i() -> Self {
        GaussRat::new(Rat::zero(), Rat::one())
    }

    /// `i^e` for any integer exponent.
    pub fn i_pow(e: i64) -> Self {
        match e.rem_euclid(4) {
            0 => GaussRat::one(),
            1 => GaussRat::i(),
            2 => -GaussRat::one(),
            _ => -GaussRat::i(),
        }
    }

    pub fn norm_sq(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})+({})i", self.re, self.im)
    }
}

impl Add for GaussRat {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        GaussRat::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for GaussRat {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        GaussRat::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for GaussRat {
    type Output = Self;
    fn neg(self) -> Self {
        GaussRat::new(-self.re, -self.im)
    }
}

impl Mul for GaussRat {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let re = &self.re * &rhs.re - &self.im * &rhs.im;
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        GaussRat::new(re, im)
    }
}

impl Div for GaussRat {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let n = rhs.norm_sq();
        assert!(!n.is_zero(), "division by zero GaussRat");
        let c = rhs.conj();
        let p = self * c;
        GaussRat::new(p.re / &n, p.im / &n)
    }
}

impl Zero for GaussRat {
    fn zero() -> Self {
        GaussRat::new(Rat::zero(), Rat::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussRat {
    fn one() -> Self {
        GaussRat::new(Rat::one(), Rat::zero())
    }
}

impl Scalar for GaussRat {
    fn from_rat(r: &Rat) -> Self {
        GaussRat::new(r.clone(), Rat::zero())
    }

    fn to_f64(&self) -> f64 {
        // Magnitude shadow; phases feed norm estimates only through it.
        Scalar::to_f64(&self.norm_sq()).sqrt()
    }

    fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -self.im.clone())
    }
}

impl FieldScalar for GaussRat {
    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(GaussRat::one() / self.clone())
        }
    }
}

/// Element `a + b*sqrt(r)` of a fixed real quadratic extension of `Rat`.
///
/// The radicand is carried per value; values with `b == 0` are radicand-free
/// and mix with any other. Mixing two distinct nonzero radicands is a
/// programming error and panics. Construction folds perfect-square radicands
/// back into `Rat`, so equality is canonical.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Quad {
    a: Rat,
    b: Rat,
    r: Rat,
}

impl Quad {
    /// `a + b*sqrt(r)`; requires `r >= 0`.
    pub fn new(a: Rat, b: Rat, r: Rat) -> Self {
        assert!(!r.is_negative(), "negative radicand in Quad: {}", r);
        if b.is_zero() || r.is_zero() {
            return Quad {
                a,
                b: Rat::zero(),
                r: Rat::zero(),
            };
        }
        if let Some(s) = rat_sqrt(&r) {
            return Quad {
                a: a + b * s,
                b: Rat::zero(),
                r: Rat::zero(),
            };
        }
        Quad { a, b, r }
    }

    pub fn sqrt_of(r: Rat) -> Self {
        Quad::new(Rat::zero(), Rat::one(), r)
    }

    pub fn rational_part(&self) -> &Rat {
        &self.a
    }

    pub fn irrational_coeff(&self) -> &Rat {
        &self.b
    }

    pub fn radicand(&self) -> &Rat {
        &self.r
    }

    /// Exact rational value if the irrational part vanishes.
    pub fn as_rational(&self) -> Option<Rat> {
        if self.b.is_zero() {
            Some(self.a.clone())
        } else {
            None
        }
    }

    /// Galois conjugate `a - b*sqrt(r)`.
    pub fn galois_conj(&self) -> Self {
        Quad {
            a: self.a.clone(),
            b: -self.b.clone(),
            r: self.r.clone(),
        }
    }

    fn merged_radicand(&self, rhs: &Self) -> Rat {
        if self.b.is_zero() {
            rhs.r.clone()
        } else if rhs.b.is_zero() {
            self.r.clone()
        } else {
            assert_eq!(
                self.r, rhs.r,
                "mixed Quad radicands: {} vs {}",
                self.r, rhs.r
            );
            self.r.clone()
        }
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}+{}*sqrt({})", self.a, self.b, self.r)
        }
    }
}

impl Add for Quad {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let r = self.merged_radicand(&rhs);
        Quad::new(self.a + rhs.a, self.b + rhs.b, r)
    }
}

impl Sub for Quad {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for Quad {
    type Output = Self;
    fn neg(self) -> Self {
        Quad {
            a: -self.a,
            b: -self.b,
            r: self.r,
        }
    }
}

impl Mul for Quad {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let r = self.merged_radicand(&rhs);
        let a = &self.a * &rhs.a + &self.b * &rhs.b * &r;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        Quad::new(a, b, r)
    }
}

impl Div for Quad {
    type Output = Self;
    // Division is multiplication by the field inverse.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.try_inv().expect("division by zero Quad")
    }
}

impl Zero for Quad {
    fn zero() -> Self {
        Quad {
            a: Rat::zero(),
            b: Rat::zero(),
            r: Rat::zero(),
        }
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for Quad {
    fn one() -> Self {
        Quad {
            a: Rat::one(),
            b: Rat::zero(),
            r: Rat::zero(),
        }
    }
}

impl Scalar for Quad {
    fn from_rat(r: &Rat) -> Self {
        Quad {
            a: r.clone(),
            b: Rat::zero(),
            r: Rat::zero(),
        }
    }

    fn to_f64(&self) -> f64 {
        Scalar::to_f64(&self.a) + Scalar::to_f64(&self.b) * Scalar::to_f64(&self.r).sqrt()
    }
}

impl FieldScalar for Quad {
    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // (a + b sqrt r)^-1 = (a - b sqrt r) / (a^2 - b^2 r); the norm is
        // nonzero because r is not a perfect square when b != 0.
        let n = &self.a * &self.a - &self.b * &self.b * &self.r;
        assert!(!n.is_zero(), "zero norm for nonzero Quad {}", self);
        let c = self.galois_conj();
        Some(Quad::new(c.a / &n, c.b / &n, c.r))
    }
}

/// Base rings usable as radicands in [`SqrtExt`].
///
/// `try_sqrt` lets construction fold perfect squares; `is_negative` guards
/// against imaginary radicands, which never arise in this crate's models.
pub trait Radicand: Scalar + Ord {
    fn try_sqrt(&self) -> Option<Self>;

    fn is_negative_value(&self) -> bool;
}

impl Radicand for Rat {
    fn try_sqrt(&self) -> Option<Self> {
        rat_sqrt(self)
    }

    fn is_negative_value(&self) -> bool {
        self.is_negative()
    }
}

impl Radicand for Quad {
    fn try_sqrt(&self) -> Option<Self> {
        self.as_rational()
            .and_then(|a| rat_sqrt(&a).map(|s| Quad::from_rat(&s)))
    }

    fn is_negative_value(&self) -> bool {
        // Exact sign of a + b*sqrt(r): compare a^2 against b^2 r when the
        // two halves disagree in sign.
        if self.b.is_zero() {
            return self.a.is_negative();
        }
        if self.a.is_zero() {
            return self.b.is_negative();
        }
        let radical_sq = &self.b * &self.b * &self.r;
        let rational_sq = &self.a * &self.a;
        match (self.a.is_negative(), self.b.is_negative()) {
            (false, false) => false,
            (true, true) => true,
            // a > 0 > b: negative iff b^2 r exceeds a^2.
            (false, true) => radical_sq > rational_sq,
            // a < 0 < b: negative iff a^2 exceeds b^2 r.
            (true, false) => rational_sq > radical_sq,
        }
    }
}

impl Radicand for GaussRat {
    fn try_sqrt(&self) -> Option<Self> {
        if self.im.is_zero() {
            rat_sqrt(&self.re).map(|s| GaussRat::from_rat(&s))
        } else {
            None
        }
    }

    fn is_negative_value(&self) -> bool {
        self.im.is_zero() && self.re.is_negative()
    }
}

/// Sorted multiset of radicands with all multiplicities reduced mod 2.
type SqrtWord<R> = Vec<R>;

/// Formal finite sum `sum_w c_w * prod_{x in w} sqrt(x)` over a base ring.
///
/// Multiplication merges repeated radicands by `sqrt(x)*sqrt(x) = x`.
/// Equality is equality of reduced words; the representation entries this
/// crate builds always use one fixed word per matrix position, so formal
/// equality of operators coincides with numerical equality.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SqrtExt<R: Radicand> {
    terms: BTreeMap<SqrtWord<R>, R>,
}

/// Square-root extension over the rationals; the scalar type of every
/// quantum SU(2) representation matrix.
pub type SqrtRat = SqrtExt<Rat>;

/// Scalars for the Podles sphere representations: square roots of quadratic
/// extension elements.
pub type SqrtQuad = SqrtExt<Quad>;

impl<R: Radicand> SqrtExt<R> {
    fn from_terms(terms: BTreeMap<SqrtWord<R>, R>) -> Self {
        SqrtExt { terms }
    }

    /// `sqrt(r)`; folds `r` in `{0, 1, perfect squares}`, rejects negatives.
    pub fn sqrt_of(r: R) -> Self {
        assert!(
            !r.is_negative_value(),
            "negative radicand in SqrtExt: {r:?}"
        );
        if r.is_zero() {
            return Self::zero();
        }
        if let Some(s) = r.try_sqrt() {
            return SqrtExt::from_base(s);
        }
        let mut terms = BTreeMap::new();
        terms.insert(vec![r], R::one());
        SqrtExt::from_terms(terms)
    }

    pub fn from_base(c: R) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        SqrtExt::from_terms(terms)
    }

    /// Exact base-ring value if no radical survives.
    pub fn as_base(&self) -> Option<R> {
        match self.terms.len() {
            0 => Some(R::zero()),
            1 => {
                let (w, c) = self.terms.iter().next().unwrap();
                if w.is_empty() {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Terms as (radicand word, coefficient) pairs in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&[R], &R)> {
        self.terms.iter().map(|(w, c)| (w.as_slice(), c))
    }

    fn insert(terms: &mut BTreeMap<SqrtWord<R>, R>, w: SqrtWord<R>, c: R) {
        if c.is_zero() {
            return;
        }
        match terms.entry(w) {
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

    /// Applies a base-ring embedding to coefficients and radicands.
    pub fn map_base<R2: Radicand>(&self, f: impl Fn(&R) -> R2 + Copy) -> SqrtExt<R2> {
        let mut terms = BTreeMap::new();
        for (w, c) in &self.terms {
            let w2: Vec<R2> = {
                let mut v: Vec<R2> = w.iter().map(f).collect();
                v.sort();
                v
            };
            SqrtExt::insert(&mut terms, w2, f(c));
        }
        SqrtExt::from_terms(terms)
    }

    fn mul_terms(lw: &SqrtWord<R>, lc: &R, rw: &SqrtWord<R>, rc: &R) -> (SqrtWord<R>, R) {
        // Merge two sorted words; a radicand appearing on both sides leaves
        // the word and multiplies the coefficient.
        let mut coeff = lc.clone() * rc.clone();
        let mut word = Vec::with_capacity(lw.len() + rw.len());
        let (mut i, mut j) = (0, 0);
        while i < lw.len() && j < rw.len() {
            match lw[i].cmp(&rw[j]) {
                std::cmp::Ordering::Less => {
                    word.push(lw[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    word.push(rw[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    coeff = coeff * lw[i].clone();
                    i += 1;
                    j += 1;
                }
            }
        }
        word.extend_from_slice(&lw[i..]);
        word.extend_from_slice(&rw[j..]);
        (word, coeff)
    }
}

impl<R: Radicand> fmt::Display for SqrtExt<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for x in w {
                write!(f, "*sqrt({x})")?;
            }
        }
        Ok(())
    }
}

impl<R: Radicand> Add for SqrtExt<R> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut terms = self.terms;
        for (w, c) in rhs.terms {
            SqrtExt::insert(&mut terms, w, c);
        }
        SqrtExt::from_terms(terms)
    }
}

impl<R: Radicand> Sub for SqrtExt<R> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<R: Radicand> Neg for SqrtExt<R> {
    type Output = Self;
    fn neg(self) -> Self {
        let terms = self.terms.into_iter().map(|(w, c)| (w, -c)).collect();
        SqrtExt::from_terms(terms)
    }
}

impl<R: Radicand> Mul for SqrtExt<R> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut terms = BTreeMap::new();
        for (lw, lc) in &self.terms {
            for (rw, rc) in &rhs.terms {
                let (w, c) = SqrtExt::mul_terms(lw, lc, rw, rc);
                SqrtExt::insert(&mut terms, w, c);
            }
        }
        SqrtExt::from_terms(terms)
    }
}

impl<R: Radicand> Zero for SqrtExt<R> {
    fn zero() -> Self {
        SqrtExt::from_terms(BTreeMap::new())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<R: Radicand> One for SqrtExt<R> {
    fn one() -> Self {
        SqrtExt::from_base(R::one())
    }
}

impl<R: Radicand> Scalar for SqrtExt<R> {
    fn from_rat(r: &Rat) -> Self {
        SqrtExt::from_base(R::from_rat(r))
    }

    fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(w, c)| w.iter().fold(c.to_f64(), |acc, x| acc * x.to_f64().sqrt()))
            .sum()
    }

    fn conj(&self) -> Self {
        // Radicands are real nonnegative, so conjugation only touches the
        // coefficients.
        let terms = self
            .terms
            .iter()
            .map(|(w, c)| (w.clone(), c.conj()))
            .collect();
        SqrtExt::from_terms(terms)
    }
}

/// Divides by a radical-free scalar; the only division `SqrtExt` supports.
impl<R: Radicand + Div<Output = R>> SqrtExt<R> {
    pub fn div_base(&self, d: &R) -> Self {
        assert!(!d.is_zero(), "division by zero base scalar");
        let terms = self
            .terms
            .iter()
            .map(|(w, c)| (w.clone(), c.clone() / d.clone()))
            .collect();
        SqrtExt::from_terms(terms)
    }
}
