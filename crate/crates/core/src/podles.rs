//! Quantum two-sphere at parameters `(q, c)`: exact normal ordering for the
//! *-algebra generated by `A` and `B`, the two irreducible half-line
//! representations, the even Dirac pairing over the doubled space, and the
//! boundedness and calculus certificates attached to it.
//!
//! Every basis monomial is `A^m B^n` with a signed `B`-power: `n < 0` means
//! `B*^{|n|}`. Products reduce to this basis by peeling one `B B*` or `B* B`
//! pair at a time into a quadratic polynomial in `A` and commuting `A`-powers
//! left with exact `q`-phases, so the structure constants stay rational.
//! Representations need `sqrt(c + 1/4)` and hop amplitudes `sqrt(c_leg(n))`;
//! both live in the exact quadratic/square-root scalar tower, and floats
//! appear only inside norm and trend certificates.

use std::collections::BTreeMap;
use std::fmt;

use num::traits::{One, Signed, Zero};
use rand::Rng;

use crate::fredholm::{stabilized_index, FredholmError, IndexCertificate, IndexCount};
use crate::scalar::{rat, rat_int, rat_pow, Quad, Rat, Scalar, SqrtExt, SqrtQuad};
use crate::sparse::SparseMat;
use crate::truncation::{
    hl_number, hl_shift, tail_decay_pass, EvenOp, EvenWindow, HalfLineOp, HalfLineWindow,
    TruncationError, Windowed,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SphereError {
    #[error("sphere parameters must satisfy 0 < q < 1 and c > 0, got q = {0}, c = {1}")]
    BadParams(String, String),
    #[error("mismatched sphere parameters: (q, c) = ({0}, {1}) vs ({2}, {3})")]
    MismatchedParams(String, String, String, String),
    #[error("operator is not concentrated in the expected grading blocks at degree {0}")]
    BlockParity(u32),
    #[error("band symbol does not stabilize at offset {offset}: probe gap {gap}")]
    UnstableSymbol { offset: i64, gap: String },
    #[error(transparent)]
    Truncation(#[from] TruncationError),
}

/// Basis monomial `A^m B^n`; `n < 0` stands for `B*^{|n|}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SphereMon {
    pub m: u32,
    pub n: i64,
}

impl SphereMon {
    pub fn new(m: u32, n: i64) -> Self {
        SphereMon { m, n }
    }

    pub const ONE: SphereMon = SphereMon { m: 0, n: 0 };

    pub fn is_scalar(&self) -> bool {
        *self == SphereMon::ONE
    }
}

impl fmt::Display for SphereMon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n >= 0 {
            write!(f, "A^{} B^{}", self.m, self.n)
        } else {
            write!(f, "A^{} B*^{}", self.m, -self.n)
        }
    }
}

fn check_params(q: &Rat, c: &Rat) -> Result<(), SphereError> {
    if q.is_positive() && q < &Rat::one() && c.is_positive() {
        Ok(())
    } else {
        Err(SphereError::BadParams(format!("{q}"), format!("{c}")))
    }
}

/// `B B* = c + q^2 A - q^4 A^2` as `(A-power, coefficient)` pairs.
fn peel_b_bstar(q: &Rat, c: &Rat) -> [(u32, Rat); 3] {
    [(0, c.clone()), (1, rat_pow(q, 2)), (2, -rat_pow(q, 4))]
}

/// `B* B = c + A - A^2` as `(A-power, coefficient)` pairs.
fn peel_bstar_b(c: &Rat) -> [(u32, Rat); 3] {
    [(0, c.clone()), (1, Rat::one()), (2, -Rat::one())]
}

/// Normal form of `B^x B^y` as `(A^e B^{n}, coefficient)` pairs.
///
/// Same-sign powers concatenate. Mixed signs peel one adjacent `B B*` or
/// `B* B` pair into its quadratic `A`-polynomial, commute the `A`-powers
/// left through the remaining `B`-letters with the exact phase, and recurse
/// on one fewer letter per side.
fn reduce_b_powers(q: &Rat, c: &Rat, x: i64, y: i64) -> BTreeMap<SphereMon, Rat> {
    let mut out = BTreeMap::new();
    if x == 0 || y == 0 || x.signum() == y.signum() {
        out.insert(SphereMon::new(0, x + y), Rat::one());
        return out;
    }
    let (peel, rest_x, rest_y, phase_exp): ([(u32, Rat); 3], i64, i64, i64) = if x > 0 {
        // B^x B^y = B^{x-1} (B B*) B^{y+1}; then B^{x-1} A^e = q^{2e(x-1)} A^e B^{x-1}.
        (peel_b_bstar(q, c), x - 1, y + 1, x - 1)
    } else {
        // B*^{|x|} B^y = B*^{|x|-1} (B* B) B^{y-1}; B*^k A^e = q^{-2ek} A^e B*^k.
        (peel_bstar_b(c), x + 1, y - 1, -(-x - 1))
    };
    let inner = reduce_b_powers(q, c, rest_x, rest_y);
    for (e, w) in peel {
        let factor = w * rat_pow(q, 2 * e as i64 * phase_exp);
        for (mon, w2) in &inner {
            let v = &factor * w2;
            let key = SphereMon::new(mon.m + e, mon.n);
            let entry = out.entry(key).or_insert_with(Rat::zero);
            *entry += v;
            if entry.is_zero() {
                out.remove(&key);
            }
        }
    }
    out
}

/// Element of the sphere algebra: a normal-ordered sum over [`SphereMon`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereElement<T: Scalar> {
    q: Rat,
    c: Rat,
    terms: BTreeMap<SphereMon, T>,
}

impl<T: Scalar> SphereElement<T> {
    pub fn zero(q: &Rat, c: &Rat) -> Result<Self, SphereError> {
        check_params(q, c)?;
        Ok(SphereElement {
            q: q.clone(),
            c: c.clone(),
            terms: BTreeMap::new(),
        })
    }

    pub fn one(q: &Rat, c: &Rat) -> Result<Self, SphereError> {
        Self::monomial(q, c, 0, 0, T::one())
    }

    pub fn monomial(q: &Rat, c: &Rat, m: u32, n: i64, coeff: T) -> Result<Self, SphereError> {
        check_params(q, c)?;
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(SphereMon::new(m, n), coeff);
        }
        Ok(SphereElement {
            q: q.clone(),
            c: c.clone(),
            terms,
        })
    }

    pub fn gen_a(q: &Rat, c: &Rat) -> Result<Self, SphereError> {
        Self::monomial(q, c, 1, 0, T::one())
    }

    pub fn gen_b(q: &Rat, c: &Rat) -> Result<Self, SphereError> {
        Self::monomial(q, c, 0, 1, T::one())
    }

    pub fn gen_b_star(q: &Rat, c: &Rat) -> Result<Self, SphereError> {
        Self::monomial(q, c, 0, -1, T::one())
    }

    pub fn q(&self) -> &Rat {
        &self.q
    }

    pub fn c(&self) -> &Rat {
        &self.c
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SphereMon, &T)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: SphereMon) -> Option<&T> {
        self.terms.get(&m)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, m: SphereMon, c: T) {
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

    fn check_same_params(&self, rhs: &Self) -> Result<(), SphereError> {
        if self.q != rhs.q || self.c != rhs.c {
            return Err(SphereError::MismatchedParams(
                format!("{}", self.q),
                format!("{}", self.c),
                format!("{}", rhs.q),
                format!("{}", rhs.c),
            ));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, SphereError> {
        self.check_same_params(rhs)?;
        let mut out = self.clone();
        for (&m, c) in &rhs.terms {
            out.insert(m, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, SphereError> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        SphereElement {
            q: self.q.clone(),
            c: self.c.clone(),
            terms: self.terms.iter().map(|(&m, c)| (m, -c.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        let mut out = SphereElement {
            q: self.q.clone(),
            c: self.c.clone(),
            terms: BTreeMap::new(),
        };
        for (&m, c) in &self.terms {
            out.insert(m, c.clone() * s.clone());
        }
        out
    }

    pub fn scale_rat(&self, s: &Rat) -> Self {
        let mut out = SphereElement {
            q: self.q.clone(),
            c: self.c.clone(),
            terms: BTreeMap::new(),
        };
        for (&m, c) in &self.terms {
            out.insert(m, c.mul_rat(s));
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, SphereError> {
        self.check_same_params(rhs)?;
        let mut out = SphereElement {
            q: self.q.clone(),
            c: self.c.clone(),
            terms: BTreeMap::new(),
        };
        for (&m1, c1) in &self.terms {
            for (&m2, c2) in &rhs.terms {
                // A^{m1} B^{n1} A^{m2} B^{n2}: commute A^{m2} left, then
                // normal-order the B-letters.
                let phase = rat_pow(&self.q, 2 * m1_swap_exponent(m1.n, m2.m));
                let c12 = (c1.clone() * c2.clone()).mul_rat(&phase);
                for (mon, w) in reduce_b_powers(&self.q, &self.c, m1.n, m2.n) {
                    out.insert(SphereMon::new(m1.m + m2.m + mon.m, mon.n), c12.mul_rat(&w));
                }
            }
        }
        Ok(out)
    }

    /// The involution: `(t A^m B^n)* = conj(t) q^{-2 m n} A^m B^{-n}`.
    pub fn adjoint(&self) -> Self {
        let mut out = SphereElement {
            q: self.q.clone(),
            c: self.c.clone(),
            terms: BTreeMap::new(),
        };
        for (&m, c) in &self.terms {
            let phase = rat_pow(&self.q, -2 * m.m as i64 * m.n);
            out.insert(SphereMon::new(m.m, -m.n), c.conj().mul_rat(&phase));
        }
        out
    }

    pub fn pow(&self, n: u32) -> Result<Self, SphereError> {
        let mut acc = Self::one(&self.q, &self.c)?;
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }
}

/// Exponent `e` in `B^{n} A^{m} = q^{2e} A^{m} B^{n}`, signed in `n`.
fn m1_swap_exponent(n1: i64, m2: u32) -> i64 {
    n1 * m2 as i64
}

impl<T: Scalar> fmt::Display for SphereElement<T> {
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
            write!(f, "{c} * {m}")?;
        }
        Ok(())
    }
}

impl SphereElement<Rat> {
    /// The defining relations as elements that must normal-order to zero;
    /// each comes with a stable name.
    pub fn relation_defects(q: &Rat, c: &Rat) -> Result<Vec<(&'static str, Self)>, SphereError> {
        let a = Self::gen_a(q, c)?;
        let b = Self::gen_b(q, c)?;
        let bs = Self::gen_b_star(q, c)?;
        let one = Self::one(q, c)?;
        let a2 = a.mul(&a)?;
        let q2 = rat_pow(q, 2);
        Ok(vec![
            ("A* - A", a.adjoint().sub(&a)?),
            (
                "B*B - (A - A^2 + c)",
                bs.mul(&b)?.sub(&a)?.add(&a2)?.sub(&one.scale_rat(c))?,
            ),
            (
                "BB* - (q^2 A - q^4 A^2 + c)",
                b.mul(&bs)?
                    .sub(&a.scale_rat(&q2))?
                    .add(&a2.scale_rat(&rat_pow(q, 4)))?
                    .sub(&one.scale_rat(c))?,
            ),
            ("BA - q^2 AB", b.mul(&a)?.sub(&a.mul(&b)?.scale_rat(&q2))?),
            (
                "B*A - q^-2 AB*",
                bs.mul(&a)?.sub(&a.mul(&bs)?.scale_rat(&rat_pow(q, -2)))?,
            ),
        ])
    }

    /// Deterministic random element for property sweeps.
    pub fn random(
        q: &Rat,
        c: &Rat,
        rng: &mut impl Rng,
        max_m: u32,
        max_abs_n: i64,
        n_terms: usize,
    ) -> Result<Self, SphereError> {
        let mut out = Self::zero(q, c)?;
        for _ in 0..n_terms {
            let m = rng.gen_range(0..=max_m);
            let n = rng.gen_range(-max_abs_n..=max_abs_n);
            let num = rng.gen_range(-9i64..=9);
            let den = rng.gen_range(1i64..=9);
            out.insert(SphereMon::new(m, n), rat(num, den));
        }
        Ok(out)
    }
}

// Representations. The two irreducible half-line representations send A to
// a positive diagonal and B to a weighted down shift; which of the two
// roots of x^2 = x + c scales the diagonal names the leg.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leg {
    Plus,
    Minus,
}

impl Leg {
    pub const BOTH: [Leg; 2] = [Leg::Plus, Leg::Minus];
}

impl fmt::Display for Leg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Leg::Plus => write!(f, "plus"),
            Leg::Minus => write!(f, "minus"),
        }
    }
}

/// Root `1/2 +- sqrt(c + 1/4)` of `x^2 = x + c`, the top of the `A`-spectrum
/// in each leg. Exact: the square root stays symbolic unless it is rational.
pub fn leg_scale(c: &Rat, leg: Leg) -> Quad {
    let b = match leg {
        Leg::Plus => Rat::one(),
        Leg::Minus => -Rat::one(),
    };
    Quad::new(rat(1, 2), b, c.clone() + rat(1, 4))
}

/// Squared hop amplitude `c_leg(n) = lam q^{2n} - lam^2 q^{4n} + c` of the
/// lowering generator between `e_n` and `e_{n-1}`.
///
/// At `n = 0` this vanishes identically in `(q, c)` because `lam^2 = lam + c`,
/// so the vacuum is annihilated exactly and the half line is stable.
pub fn hop_amplitude_sq(q: &Rat, c: &Rat, leg: Leg, n: i64) -> Quad {
    let lam = leg_scale(c, leg);
    let q2n = Quad::from_rat(&rat_pow(q, 2 * n));
    let q4n = Quad::from_rat(&rat_pow(q, 4 * n));
    lam.clone() * q2n - lam.clone() * lam * q4n + Quad::from_rat(c)
}

fn quad_pow(base: &Quad, e: u32) -> Quad {
    let mut acc = Quad::one();
    for _ in 0..e {
        acc = acc * base.clone();
    }
    acc
}

fn sqrt_c(c: &Rat) -> SqrtQuad {
    SqrtExt::sqrt_of(Quad::from_rat(c))
}

/// One leg of the representation on a half-line window.
///
/// `A^m B^n` acts in closed form: the `B`-letters hop the basis vector with
/// a product of exact square-root amplitudes, then the `A`-power scales by
/// `(lam q^{2 row})^m` at the landing slot. Margin is the largest hop.
pub fn represent_sphere_leg(a: &SphereElement<Rat>, leg: Leg, m: u32) -> HalfLineOp<SqrtQuad> {
    let (q, c) = (a.q().clone(), a.c().clone());
    let margin = a
        .terms()
        .map(|(mon, _)| mon.n.unsigned_abs() as u32)
        .max()
        .unwrap_or(0);
    let mut op = Windowed::zero(HalfLineWindow { m }).with_margin(margin);
    let mm = m as i64;
    for (mon, coeff) in a.terms() {
        for col in 0..=mm {
            let row = col - mon.n;
            if row < 0 || row > mm {
                continue;
            }
            let mut val = SqrtQuad::from_rat(coeff);
            let (lo, hi) = if mon.n >= 0 {
                (row + 1, col)
            } else {
                (col + 1, row)
            };
            for s in lo..=hi {
                let amp = hop_amplitude_sq(&q, &c, leg, s);
                assert!(
                    !crate::scalar::Radicand::is_negative_value(&amp),
                    "negative hop amplitude at n = {s}"
                );
                val = val * SqrtExt::sqrt_of(amp);
            }
            let diag = quad_pow(
                &(leg_scale(&c, leg) * Quad::from_rat(&rat_pow(&q, 2 * row))),
                mon.m,
            );
            val = val * SqrtExt::from_base(diag);
            if !val.is_zero() {
                op.add_entry(row, col, val);
            }
        }
    }
    op
}

/// Both legs at once, in the order `(plus, minus)`.
pub fn represent_sphere(
    a: &SphereElement<Rat>,
    m: u32,
) -> (HalfLineOp<SqrtQuad>, HalfLineOp<SqrtQuad>) {
    (
        represent_sphere_leg(a, Leg::Plus, m),
        represent_sphere_leg(a, Leg::Minus, m),
    )
}

// The even triple: the doubled space carries pi = pi_plus + pi_minus, the
// off-diagonal number operator D, and the leg-parity grading.

/// `D`: the number operator placed in the two off-diagonal corners.
pub fn even_dirac<T: Scalar>(m: u32) -> EvenOp<T> {
    let mut op = Windowed::zero(EvenWindow { m });
    for n in 1..=m as i64 {
        op.add_entry((0, n), (1, n), T::from_i64(n));
        op.add_entry((1, n), (0, n), T::from_i64(n));
    }
    op
}

/// The grading: `+1` on the plus leg, `-1` on the minus leg.
pub fn even_grading<T: Scalar>(m: u32) -> EvenOp<T> {
    Windowed::diagonal(
        EvenWindow { m },
        |(s, _)| {
            if s == 0 {
                T::one()
            } else {
                -T::one()
            }
        },
    )
}

/// Block-diagonal embedding of two half-line operators over the same window.
pub fn embed_legs<T: Scalar>(plus: &HalfLineOp<T>, minus: &HalfLineOp<T>) -> EvenOp<T> {
    assert_eq!(plus.geom().m, minus.geom().m, "mismatched leg windows");
    let m = plus.geom().m;
    let mut op = Windowed::zero(EvenWindow { m }).with_margin(plus.margin().max(minus.margin()));
    for (r, c, v) in plus.entries() {
        op.add_entry((0, r), (0, c), v.clone());
    }
    for (r, c, v) in minus.entries() {
        op.add_entry((1, r), (1, c), v.clone());
    }
    op
}

pub fn represent_sphere_even(a: &SphereElement<Rat>, m: u32) -> EvenOp<SqrtQuad> {
    let (plus, minus) = represent_sphere(a, m);
    embed_legs(&plus, &minus)
}

/// `[D, pi(a)]` on the doubled window. Strictly off-diagonal in the leg
/// blocks, hence grading-odd, by construction.
pub fn even_triple_commutator(
    a: &SphereElement<Rat>,
    m: u32,
) -> Result<EvenOp<SqrtQuad>, SphereError> {
    let d = even_dirac::<SqrtQuad>(m);
    let p = represent_sphere_even(a, m);
    Ok(d.mul(&p)?.sub(&p.mul(&d)?)?)
}

/// One leg block of a doubled operator, margins preserved.
pub fn even_block<T: Scalar>(op: &EvenOp<T>, row_leg: i64, col_leg: i64) -> HalfLineOp<T> {
    let m = op.geom().m;
    let mut out = Windowed::zero(HalfLineWindow { m }).with_margin(op.margin());
    for ((s, r), (s2, c), v) in op.entries() {
        if s == row_leg && s2 == col_leg {
            out.add_entry(r, c, v.clone());
        }
    }
    out
}

/// The down shift on each leg with the legs swapped (the leading band shape
/// of `[D, pi(B)]`).
pub fn shift_swap<T: Scalar>(m: u32) -> EvenOp<T> {
    let mut op = Windowed::zero(EvenWindow { m }).with_margin(1);
    for n in 1..=m as i64 {
        op.add_entry((0, n - 1), (1, n), T::one());
        op.add_entry((1, n - 1), (0, n), T::one());
    }
    op
}

/// `-sqrt(c)` times [`shift_swap`]: the exact band limit of `[D, pi(B)]`.
/// The scalar is forced by `(n-1) sqrt(c_minus(n)) - n sqrt(c_plus(n)) ->
/// -sqrt(c)` as `n` grows.
pub fn leading_shift_block(c: &Rat, m: u32) -> EvenOp<SqrtQuad> {
    shift_swap::<SqrtQuad>(m).scale(&-sqrt_c(c))
}

// Boundedness certificates. The proofs bound three quantities; the
// certificates scan each over nested windows and demand a flat-or-shrinking
// increment trend, except the last, which is an exact identity.

/// Floating scan maxima at three nested scan radii.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatScanProfile {
    pub family: String,
    pub scans: [u32; 3],
    pub maxima: [f64; 3],
}

impl FloatScanProfile {
    /// Increments between nested maxima shrink by at least the ratio 3/5;
    /// a flat profile passes, fresh growth at larger scans fails.
    pub fn trend_is_bounded(&self) -> bool {
        let d1 = self.maxima[1] - self.maxima[0];
        let d2 = self.maxima[2] - self.maxima[1];
        5.0 * d2 <= 3.0 * d1
    }
}

fn float_scan(family: String, scan: u32, f: impl Fn(i64) -> f64) -> FloatScanProfile {
    let scans = [scan, 2 * scan, 4 * scan];
    let maxima = scans.map(|s| {
        (0..=s as i64)
            .map(&f)
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
    });
    FloatScanProfile {
        family,
        scans,
        maxima,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereBoundednessReport {
    pub q: Rat,
    pub c: Rat,
    pub scans: [u32; 3],
    /// `|n lam q^{2n}|` per leg: the number operator against the diagonal.
    pub weighted_diagonal: Vec<FloatScanProfile>,
    /// `|n (sqrt(c_leg(n)) - sqrt(c))|` per leg: the shift-band deviation.
    pub hop_deviation: Vec<FloatScanProfile>,
    /// `[N, l] = -l` exactly on the interior.
    pub shift_number_exact: bool,
}

impl SphereBoundednessReport {
    pub fn passed(&self) -> bool {
        self.shift_number_exact
            && self
                .weighted_diagonal
                .iter()
                .chain(self.hop_deviation.iter())
                .all(FloatScanProfile::trend_is_bounded)
    }
}

/// Scans the two bounded families behind the commutator estimates and checks
/// the exact shift/number commutation, at scan radii `scan, 2 scan, 4 scan`.
pub fn sphere_boundedness_certificates(
    q: &Rat,
    c: &Rat,
    scan: u32,
) -> Result<SphereBoundednessReport, SphereError> {
    check_params(q, c)?;
    assert!(scan >= 8, "certificates need a scan of at least 8");
    let qf = Scalar::to_f64(q);
    let cf = Scalar::to_f64(c);
    let weighted_diagonal = Leg::BOTH
        .iter()
        .map(|&leg| {
            let lam = leg_scale(c, leg).to_f64();
            float_scan(format!("n lam q^2n ({leg} leg)"), scan, move |n| {
                n as f64 * lam * qf.powi(2 * n as i32)
            })
        })
        .collect();
    let hop_deviation = Leg::BOTH
        .iter()
        .map(|&leg| {
            let q = q.clone();
            let c = c.clone();
            float_scan(format!("n (sqrt(c_{leg}(n)) - sqrt(c))"), scan, move |n| {
                let amp = hop_amplitude_sq(&q, &c, leg, n).to_f64().max(0.0);
                n as f64 * (amp.sqrt() - cf.sqrt())
            })
        })
        .collect();
    let m = 4 * scan;
    let number = hl_number::<Rat>(m);
    let shift = hl_shift::<Rat>(m);
    let defect = number.mul(&shift)?.sub(&shift.mul(&number)?)?.add(&shift)?;
    let shift_number_exact = defect.is_zero_on_interior(1)?;
    Ok(SphereBoundednessReport {
        q: q.clone(),
        c: c.clone(),
        scans: [scan, 2 * scan, 4 * scan],
        weighted_diagonal,
        hop_deviation,
        shift_number_exact,
    })
}

// Index pairing. The off-diagonal corner of D is the number operator:
// positive, with a one-dimensional kernel. Its phase is the identity away
// from the kernel line, and any bounded choice on that line perturbs the
// compression by finite rank, which no index can see; the pairing therefore
// compresses the identity (or a sign-flipped variant, to exercise exactly
// that invariance) between the two grading corners, cut down by the
// projection's columns in each corner.

/// Projections whose sphere pairing the certificate machinery computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereProjection {
    /// `0` on the plus leg, the vacuum line on the minus leg: the class of
    /// the compact ideal's corner in the symbol sequence.
    VacuumMinus,
    /// The zero projection.
    Trivial,
    /// The vacuum line on both legs.
    VacuumBoth,
}

impl SphereProjection {
    pub fn label(&self) -> &'static str {
        match self {
            SphereProjection::VacuumMinus => "vacuum line, minus leg",
            SphereProjection::Trivial => "zero projection",
            SphereProjection::VacuumBoth => "vacuum line, both legs",
        }
    }

    /// Flat column masks `(plus corner, minus corner)` on a half-line window.
    fn masks(&self) -> (Vec<u32>, Vec<u32>) {
        match self {
            SphereProjection::VacuumMinus => (vec![], vec![0]),
            SphereProjection::Trivial => (vec![], vec![]),
            SphereProjection::VacuumBoth => (vec![0], vec![0]),
        }
    }
}

/// Pairing of one projection against the even triple: kernel minus cokernel
/// of the corner-compressed phase, by exact rank with a floating
/// cross-check, at two window sizes that must agree.
pub fn sphere_index_pairing(
    m: u32,
    projection: SphereProjection,
    flipped_phase: bool,
) -> Result<IndexCertificate, FredholmError> {
    let label = if flipped_phase {
        format!("sphere pairing, {} (flipped phase)", projection.label())
    } else {
        format!("sphere pairing, {}", projection.label())
    };
    let guard = 2u32;
    stabilized_index(&label, m, |mm| {
        let dim = mm + 1;
        let mut u = SparseMat::<Rat>::identity(dim);
        if flipped_phase {
            u.set_entry(0, 0, -Rat::one());
        }
        let uf = u.to_f64();
        let (plus_mask, minus_mask) = projection.masks();
        let keep = |mask: &[u32]| -> Vec<u32> {
            mask.iter().copied().filter(|&n| n + guard <= mm).collect()
        };
        let plus_inner = keep(&plus_mask);
        let minus_inner = keep(&minus_mask);
        let col_rank = u.submatrix(&minus_mask, &plus_inner).rank_exact();
        let row_rank = u.submatrix(&minus_inner, &plus_mask).rank_exact();
        for (which, exact, sub) in [
            ("columns", col_rank, uf.submatrix(&minus_mask, &plus_inner)),
            ("rows", row_rank, uf.submatrix(&minus_inner, &plus_mask)),
        ] {
            let float = sub.rank_f64(1e-8);
            if float != exact {
                return Err(FredholmError::RankMethodsDisagree {
                    label: format!("{label} ({which})"),
                    exact,
                    float,
                });
            }
        }
        Ok(IndexCount {
            kernel: plus_inner.len() - col_rank,
            cokernel: minus_inner.len() - row_rank,
        })
    })
}

// Calculus certificates. Degree-k commutator images sit in the grading
// blocks of parity k exactly; modulo compact tails the two live blocks
// agree, and in degree one the surviving band is a Laurent polynomial in
// the shift, which is the circle identification.

#[derive(Debug, Clone, PartialEq)]
pub struct ParityCase {
    pub label: String,
    pub degree: u32,
    /// Wrong-parity blocks vanish exactly.
    pub pattern_exact: bool,
    /// Tail profile of the difference of the two live blocks.
    pub cross_block_profile: Vec<f64>,
    pub cross_block_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessCase {
    pub degree: u32,
    pub value_profile: Vec<f64>,
    pub value_ok: bool,
    pub defect_profile: Vec<f64>,
    pub defect_ok: bool,
}

/// Band limit of a degree-one image: coefficients of shift powers, probed at
/// two interior columns that must agree.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSymbol {
    pub coefficients: Vec<(i64, f64)>,
    pub probe_cols: (i64, i64),
    pub max_probe_gap: f64,
}

impl BandSymbol {
    /// Coefficients divided by the band limit of `[D, pi(B)]`, which the
    /// circle identification sends to the generating mode.
    pub fn normalized(&self, c: &Rat) -> Vec<(i64, f64)> {
        let unit = -Scalar::to_f64(c).sqrt();
        self.coefficients
            .iter()
            .map(|&(d, v)| (d, v / unit))
            .collect()
    }
}

/// Extracts the stabilized band of a degree-one (leg-odd) image. The two
/// off-diagonal blocks must agree at the probes; offsets are powers of the
/// down shift.
pub fn degree_one_symbol(op: &EvenOp<SqrtQuad>, tol: f64) -> Result<BandSymbol, SphereError> {
    if !even_block(op, 0, 0).mat().is_zero_mat() || !even_block(op, 1, 1).mat().is_zero_mat() {
        return Err(SphereError::BlockParity(1));
    }
    let m = op.geom().m as i64;
    let top = even_block(op, 0, 1);
    let bottom = even_block(op, 1, 0);
    let width = op.bandwidth() as i64 + 1;
    let probes = (m / 2, m / 2 + m / 4);
    let mut coefficients = Vec::new();
    let mut max_probe_gap = 0.0f64;
    for d in -width..=width {
        let read = |block: &HalfLineOp<SqrtQuad>, col: i64| -> f64 {
            block.get(col - d, col).map(|v| v.to_f64()).unwrap_or(0.0)
        };
        let samples = [
            read(&top, probes.0),
            read(&top, probes.1),
            read(&bottom, probes.0),
            read(&bottom, probes.1),
        ];
        let limit = samples[1];
        for s in &samples {
            let gap = (s - limit).abs();
            max_probe_gap = max_probe_gap.max(gap);
            if gap > tol {
                return Err(SphereError::UnstableSymbol {
                    offset: d,
                    gap: format!("{gap:.3e}"),
                });
            }
        }
        if limit.abs() > tol {
            coefficients.push((d, limit));
        }
    }
    Ok(BandSymbol {
        coefficients,
        probe_cols: probes,
        max_probe_gap,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereCalculusReport {
    pub q: Rat,
    pub c: Rat,
    pub parity: Vec<ParityCase>,
    pub witnesses: Vec<WitnessCase>,
    /// Band symbol of `[D, pi(B)]` and its normalized class.
    pub generator_symbol: BandSymbol,
    pub generator_class: Vec<(i64, f64)>,
    pub generator_class_ok: bool,
}

impl SphereCalculusReport {
    pub fn passed(&self) -> bool {
        self.generator_class_ok
            && self
                .parity
                .iter()
                .all(|p| p.pattern_exact && p.cross_block_ok)
            && self.witnesses.iter().all(|w| w.value_ok && w.defect_ok)
    }
}

/// Image of `a0 da1 ... dak` under the commutator representation on the
/// doubled window.
pub fn represent_sphere_form(
    head: &SphereElement<Rat>,
    letters: &[SphereElement<Rat>],
    m: u32,
) -> Result<EvenOp<SqrtQuad>, SphereError> {
    let mut acc = represent_sphere_even(head, m);
    for letter in letters {
        acc = acc.mul(&even_triple_commutator(letter, m)?)?;
    }
    Ok(acc)
}

fn parity_case(
    label: String,
    head: &SphereElement<Rat>,
    letters: &[SphereElement<Rat>],
    m: u32,
    cuts: &[u32],
) -> Result<ParityCase, SphereError> {
    let op = represent_sphere_form(head, letters, m)?;
    let degree = letters.len() as u32;
    let (dead, live) = if degree % 2 == 1 {
        ([(0, 0), (1, 1)], [(0, 1), (1, 0)])
    } else {
        ([(0, 1), (1, 0)], [(0, 0), (1, 1)])
    };
    let pattern_exact = dead
        .iter()
        .all(|&(r, c)| even_block(&op, r, c).mat().is_zero_mat());
    let first = even_block(&op, live[0].0, live[0].1);
    let second = even_block(&op, live[1].0, live[1].1);
    let cross = first.sub(&second)?;
    // The margin strip holds truncation residue from compositions through
    // lost top-edge slots, not operator content; drop it before measuring.
    let cross_block_profile = cross
        .interior_filtered(cross.margin())
        .tail_norm_profile(cuts);
    let cross_block_ok = tail_decay_pass(&cross_block_profile, 2.0);
    Ok(ParityCase {
        label,
        degree,
        pattern_exact,
        cross_block_profile,
        cross_block_ok,
    })
}

fn witness_case(
    q: &Rat,
    c: &Rat,
    degree: u32,
    m: u32,
    cuts: &[u32],
) -> Result<WitnessCase, SphereError> {
    assert!(degree >= 2);
    let b = SphereElement::<Rat>::gen_b(q, c)?;
    let bs = SphereElement::<Rat>::gen_b_star(q, c)?;
    let cb = even_triple_commutator(&b, m)?;
    let cbs = even_triple_commutator(&bs, m)?;
    let pb = represent_sphere_even(&b, m);
    let pbs = represent_sphere_even(&bs, m);
    let mut tail_pow = Windowed::identity(EvenWindow { m });
    let mut lead = Windowed::identity(EvenWindow { m });
    for _ in 0..degree - 2 {
        tail_pow = tail_pow.mul(&cb)?;
        lead = lead.mul(&leading_shift_block(c, m))?;
    }
    lead = lead.scale_rat(&(rat_int(-2) * c));
    // omega = B dB* (dB)^{degree-2} + B* dB (dB)^{degree-2}: a compact
    // image whose differential has the invertible band limit -2c K^{deg-2}.
    let value = pb
        .mul(&cbs)?
        .mul(&tail_pow)?
        .add(&pbs.mul(&cb)?.mul(&tail_pow)?)?;
    let dvalue = cb
        .mul(&cbs)?
        .mul(&tail_pow)?
        .add(&cbs.mul(&cb)?.mul(&tail_pow)?)?;
    let value_profile = value
        .interior_filtered(value.margin())
        .tail_norm_profile(cuts);
    let defect = dvalue.sub(&lead)?;
    let defect_profile = defect
        .interior_filtered(defect.margin())
        .tail_norm_profile(cuts);
    Ok(WitnessCase {
        degree,
        value_profile: value_profile.clone(),
        value_ok: tail_decay_pass(&value_profile, 2.0),
        defect_profile: defect_profile.clone(),
        defect_ok: tail_decay_pass(&defect_profile, 2.0),
    })
}

/// Runs the parity, witness, and symbol certificates at window `4 scan + 8`
/// with tail cuts `scan, 2 scan`. Sampled heads and letters are drawn
/// deterministically from the seed.
pub fn sphere_calculus(
    q: &Rat,
    c: &Rat,
    scan: u32,
    samples: usize,
    seed: u64,
) -> Result<SphereCalculusReport, SphereError> {
    use rand::SeedableRng;
    check_params(q, c)?;
    assert!(scan >= 8, "certificates need a scan of at least 8");
    let m = 4 * scan + 8;
    let cuts = [scan, 2 * scan];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut parity = Vec::new();
    for sample in 0..samples {
        for degree in 0..=3usize {
            let head = SphereElement::<Rat>::random(q, c, &mut rng, 2, 2, 2)?;
            let letters: Vec<_> = (0..degree)
                .map(|_| SphereElement::<Rat>::random(q, c, &mut rng, 1, 1, 2))
                .collect::<Result<_, _>>()?;
            parity.push(parity_case(
                format!("sample {sample} degree {degree}"),
                &head,
                &letters,
                m,
                &cuts,
            )?);
        }
    }
    let witnesses = vec![
        witness_case(q, c, 2, m, &cuts)?,
        witness_case(q, c, 3, m, &cuts)?,
    ];
    let b = SphereElement::<Rat>::gen_b(q, c)?;
    let generator_symbol = degree_one_symbol(&even_triple_commutator(&b, m)?, 1e-3)?;
    let generator_class = generator_symbol.normalized(c);
    let generator_class_ok = generator_class.len() == 1
        && generator_class[0].0 == 1
        && (generator_class[0].1 - 1.0).abs() <= 1e-3;
    Ok(SphereCalculusReport {
        q: q.clone(),
        c: c.clone(),
        parity,
        witnesses,
        generator_symbol,
        generator_class,
        generator_class_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type S = SphereElement<Rat>;

    fn params() -> [(Rat, Rat); 2] {
        [(rat(1, 2), rat_int(2)), (rat(3, 4), rat(1, 10))]
    }

    #[test]
    fn relations_normal_order_to_zero() {
        for (q, c) in params() {
            for (name, defect) in S::relation_defects(&q, &c).unwrap() {
                assert!(defect.is_zero(), "{name} at q={q} c={c}: {defect}");
            }
        }
    }

    #[test]
    fn product_examples_match_closed_forms() {
        let (q, c) = (rat(1, 2), rat_int(2));
        let a = S::gen_a(&q, &c).unwrap();
        let b = S::gen_b(&q, &c).unwrap();
        let ba = b.mul(&a).unwrap();
        let ab_scaled = a.mul(&b).unwrap().scale_rat(&rat_pow(&q, 2));
        assert_eq!(ba, ab_scaled);
        let one = S::one(&q, &c).unwrap();
        assert_eq!(one.mul(&b).unwrap(), b);
        assert_eq!(b.mul(&one).unwrap(), b);
    }

    #[test]
    fn multiplication_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for (q, c) in params() {
            for _ in 0..8 {
                let x = S::random(&q, &c, &mut rng, 2, 2, 2).unwrap();
                let y = S::random(&q, &c, &mut rng, 2, 2, 2).unwrap();
                let z = S::random(&q, &c, &mut rng, 2, 2, 2).unwrap();
                let left = x.mul(&y).unwrap().mul(&z).unwrap();
                let right = x.mul(&y.mul(&z).unwrap()).unwrap();
                assert_eq!(left, right);
            }
        }
    }

    #[test]
    fn adjoint_is_an_antihomomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for (q, c) in params() {
            for _ in 0..8 {
                let x = S::random(&q, &c, &mut rng, 2, 2, 2).unwrap();
                let y = S::random(&q, &c, &mut rng, 2, 2, 2).unwrap();
                let left = x.mul(&y).unwrap().adjoint();
                let right = y.adjoint().mul(&x.adjoint()).unwrap();
                assert_eq!(left, right);
                assert_eq!(x.adjoint().adjoint(), x);
            }
        }
    }

    #[test]
    fn bad_params_are_rejected() {
        assert!(matches!(
            S::gen_a(&rat_int(2), &rat_int(1)),
            Err(SphereError::BadParams(_, _))
        ));
        assert!(matches!(
            S::gen_a(&rat(1, 2), &rat_int(-1)),
            Err(SphereError::BadParams(_, _))
        ));
        let x = S::gen_a(&rat(1, 2), &rat_int(2)).unwrap();
        let y = S::gen_a(&rat(1, 2), &rat_int(3)).unwrap();
        assert!(matches!(
            x.mul(&y),
            Err(SphereError::MismatchedParams(_, _, _, _))
        ));
    }

    #[test]
    fn leg_scales_solve_the_quadratic() {
        for (_, c) in params() {
            for leg in Leg::BOTH {
                let lam = leg_scale(&c, leg);
                let defect = lam.clone() * lam.clone() - lam - Quad::from_rat(&c);
                assert!(defect.is_zero(), "leg {leg} at c={c}");
            }
        }
        // c = 2 gives rational roots; the symbolic part must fold away.
        assert_eq!(
            leg_scale(&rat_int(2), Leg::Plus).as_rational(),
            Some(rat_int(2))
        );
        assert_eq!(
            leg_scale(&rat_int(2), Leg::Minus).as_rational(),
            Some(rat_int(-1))
        );
        assert_eq!(leg_scale(&rat(1, 10), Leg::Plus).as_rational(), None);
    }

    #[test]
    fn vacuum_amplitude_vanishes_identically() {
        for (q, c) in params() {
            for leg in Leg::BOTH {
                assert!(hop_amplitude_sq(&q, &c, leg, 0).is_zero());
            }
        }
    }

    #[test]
    fn hop_amplitudes_stay_positive_on_windows() {
        for (q, c) in params() {
            for leg in Leg::BOTH {
                for n in 1..=64 {
                    let amp = hop_amplitude_sq(&q, &c, leg, n);
                    assert!(
                        !crate::scalar::Radicand::is_negative_value(&amp) && !amp.is_zero(),
                        "leg {leg}, n = {n}"
                    );
                }
            }
        }
    }

    #[test]
    fn representation_is_multiplicative_on_interiors() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for (q, c) in params() {
            for leg in Leg::BOTH {
                for _ in 0..6 {
                    let x = S::random(&q, &c, &mut rng, 1, 2, 2).unwrap();
                    let y = S::random(&q, &c, &mut rng, 1, 2, 2).unwrap();
                    let xy = x.mul(&y).unwrap();
                    let px = represent_sphere_leg(&x, leg, 12);
                    let py = represent_sphere_leg(&y, leg, 12);
                    let pxy = represent_sphere_leg(&xy, leg, 12);
                    let prod = px.mul(&py).unwrap();
                    assert_eq!(
                        prod.eq_on_interior_with(&pxy, prod.margin().max(pxy.margin()))
                            .unwrap(),
                        Ok(()),
                        "leg {leg}"
                    );
                }
            }
        }
    }

    #[test]
    fn representation_respects_the_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for (q, c) in params() {
            for leg in Leg::BOTH {
                for _ in 0..6 {
                    let x = S::random(&q, &c, &mut rng, 2, 2, 3).unwrap();
                    let px = represent_sphere_leg(&x, leg, 10);
                    let pxs = represent_sphere_leg(&x.adjoint(), leg, 10);
                    assert!(px.adjoint().sub(&pxs).unwrap().mat().is_zero_mat());
                }
            }
        }
    }

    #[test]
    fn representation_respects_relations_on_interiors() {
        for (q, c) in params() {
            for leg in Leg::BOTH {
                for (name, defect) in S::relation_defects(&q, &c).unwrap() {
                    let op = represent_sphere_leg(&defect, leg, 10);
                    // Zero elements represent to empty matrices outright.
                    assert!(op.mat().is_zero_mat(), "{name} on leg {leg}");
                }
                // The quadratic relation checked at operator level, not via
                // normal ordering: pi(B*) pi(B) against the A-polynomial.
                let b = represent_sphere_leg(&S::gen_b(&q, &c).unwrap(), leg, 10);
                let a = represent_sphere_leg(&S::gen_a(&q, &c).unwrap(), leg, 10);
                let one: HalfLineOp<SqrtQuad> = Windowed::identity(HalfLineWindow { m: 10 });
                let lhs = b.adjoint().mul(&b).unwrap();
                let rhs = a
                    .sub(&a.mul(&a).unwrap())
                    .unwrap()
                    .add(&one.scale_rat(&c))
                    .unwrap();
                assert_eq!(lhs.eq_on_interior_with(&rhs, 1).unwrap(), Ok(()));
            }
        }
    }

    #[test]
    fn even_triple_is_graded_correctly() {
        let (q, c) = (rat(1, 2), rat_int(2));
        let m = 10;
        let d = even_dirac::<SqrtQuad>(m);
        let g = even_grading::<SqrtQuad>(m);
        assert!(d
            .mul(&g)
            .unwrap()
            .add(&g.mul(&d).unwrap())
            .unwrap()
            .mat()
            .is_zero_mat());
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let x = S::random(&q, &c, &mut rng, 2, 2, 3).unwrap();
        let p = represent_sphere_even(&x, m);
        assert!(p
            .mul(&g)
            .unwrap()
            .sub(&g.mul(&p).unwrap())
            .unwrap()
            .mat()
            .is_zero_mat());
        let comm = even_triple_commutator(&x, m).unwrap();
        assert!(comm
            .mul(&g)
            .unwrap()
            .add(&g.mul(&comm).unwrap())
            .unwrap()
            .mat()
            .is_zero_mat());
    }

    #[test]
    fn commutator_with_the_identity_vanishes() {
        let (q, c) = (rat(1, 2), rat_int(2));
        let one = S::one(&q, &c).unwrap();
        assert!(even_triple_commutator(&one, 8).unwrap().mat().is_zero_mat());
    }

    #[test]
    fn generator_commutator_approaches_the_shift_band() {
        for (q, c) in params() {
            let m = 40;
            let b = S::gen_b(&q, &c).unwrap();
            let comm = even_triple_commutator(&b, m).unwrap();
            let defect = comm.sub(&leading_shift_block(&c, m)).unwrap();
            let profile = defect.tail_norm_profile(&[8, 16]);
            assert!(tail_decay_pass(&profile, 2.0), "q={q} c={c}: {profile:?}");
        }
    }

    #[test]
    fn boundedness_certificates_pass() {
        for (q, c) in params() {
            let report = sphere_boundedness_certificates(&q, &c, 8).unwrap();
            assert!(report.shift_number_exact);
            assert!(report.passed(), "q={q} c={c}: {report:?}");
        }
    }

    #[test]
    fn index_pairing_reproduces_the_vacuum_class() {
        let cert = sphere_index_pairing(12, SphereProjection::VacuumMinus, false).unwrap();
        assert_eq!(cert.index, -1);
        assert_eq!(cert.windows, (12, 24));
        assert_eq!(cert.counts.0.kernel, 0);
        assert_eq!(cert.counts.0.cokernel, 1);
    }

    #[test]
    fn index_pairing_variants_and_phase_invariance() {
        for flipped in [false, true] {
            assert_eq!(
                sphere_index_pairing(12, SphereProjection::VacuumMinus, flipped)
                    .unwrap()
                    .index,
                -1
            );
            assert_eq!(
                sphere_index_pairing(12, SphereProjection::Trivial, flipped)
                    .unwrap()
                    .index,
                0
            );
            assert_eq!(
                sphere_index_pairing(12, SphereProjection::VacuumBoth, flipped)
                    .unwrap()
                    .index,
                0
            );
        }
    }

    #[test]
    fn calculus_report_passes() {
        let (q, c) = (rat(1, 2), rat_int(2));
        let report = sphere_calculus(&q, &c, 8, 2, 36).unwrap();
        for p in &report.parity {
            assert!(p.pattern_exact, "{}", p.label);
            assert!(p.cross_block_ok, "{}: {:?}", p.label, p.cross_block_profile);
        }
        for w in &report.witnesses {
            assert!(w.value_ok, "degree {}: {:?}", w.degree, w.value_profile);
            assert!(w.defect_ok, "degree {}: {:?}", w.degree, w.defect_profile);
        }
        assert!(report.generator_class_ok, "{:?}", report.generator_class);
        assert!(report.passed());
    }

    #[test]
    fn degree_one_symbol_identifies_the_generating_mode() {
        let (q, c) = (rat(1, 2), rat_int(2));
        let b = S::gen_b(&q, &c).unwrap();
        let comm = even_triple_commutator(&b, 48).unwrap();
        let symbol = degree_one_symbol(&comm, 1e-6).unwrap();
        assert_eq!(symbol.coefficients.len(), 1);
        assert_eq!(symbol.coefficients[0].0, 1);
        let class = symbol.normalized(&c);
        assert!((class[0].1 - 1.0).abs() < 1e-6);
        // A head with a B-power shifts the band accordingly.
        let two = represent_sphere_even(&b, 48).mul(&comm).unwrap();
        let sym2 = degree_one_symbol(&two, 1e-4).unwrap();
        assert_eq!(sym2.coefficients.len(), 1);
        assert_eq!(sym2.coefficients[0].0, 2);
    }

    #[test]
    fn symbol_rejects_even_degree_images() {
        let (q, c) = (rat(1, 2), rat_int(2));
        let a = S::gen_a(&q, &c).unwrap();
        let op = represent_sphere_even(&a, 24);
        assert!(matches!(
            degree_one_symbol(&op, 1e-6),
            Err(SphereError::BlockParity(1))
        ));
    }
}
