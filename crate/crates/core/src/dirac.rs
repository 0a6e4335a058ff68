//! Diagonal Dirac candidates `D e_{ij} = d_{ij} e_{ij}` on the plane, their
//! commutators with represented algebra elements, and the finite-evidence
//! audits: the boundedness gate, the linear-growth audit, summability
//! trends, eigenvalue multiplicities, and sign-projection classification.
//!
//! Every audit here certifies evidence from nested scans, never a proof of
//! an asymptotic statement; reports carry the raw profiles.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num::traits::{Signed, Zero};
use rand::Rng;

use crate::algebra::{AlgebraElement, Mon};
use crate::represent::{represent, represent_mon};
use crate::scalar::{parse_rat, rat, rat_int, rat_pow, Rat, Scalar, SqrtRat};
use crate::truncation::{sign_s, PlaneWindow, TruncatedOperator, TruncationError, Windowed};

/// `+1` on the right half line including 0, `-1` below; the global
/// convention that makes `sign(D)` unambiguous at the one zero eigenvalue.
pub fn sign_plus(j: i64) -> i64 {
    if j >= 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone)]
enum DiracRule {
    /// `d_{ij} = i sgn(j) + j`: the equivariant operator with simple
    /// first-leg differences and linear growth.
    Generic,
    Zero,
    /// `d_{ij} = i^2 sgn(j) + j`: first-leg differences grow like `2i`,
    /// so the boundedness gate must fail on it.
    SquareFirstLeg,
    Table {
        entries: Arc<BTreeMap<(i64, i64), Rat>>,
        default: Arc<DiracRule>,
    },
    Custom(Arc<dyn Fn(i64, i64) -> Rat + Send + Sync>),
}

/// A Dirac candidate: a name plus a total rule `(i, j) -> rational`.
#[derive(Clone)]
pub struct DiracSpec {
    name: String,
    rule: DiracRule,
}

impl fmt::Debug for DiracSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiracSpec({})", self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiracError {
    #[error("csv line {0}: expected `i,j,value`, got {1:?}")]
    BadCsv(usize, String),
    #[error(transparent)]
    Truncation(#[from] TruncationError),
    #[error("summability needs at least 3 increasing cutoffs, got {0}")]
    BadCutoffs(usize),
    #[error("spec {0} is zero on the whole scan region; no spectrum to sum")]
    AllZero(String),
    #[error("column j = {0}: sign does not stabilize within the scan")]
    UnstableColumn(i64),
    #[error("multiplicity table changed between search radii {0} and {1}")]
    UnstableMultiplicities(u32, u32),
}

fn rule_eval(rule: &DiracRule, i: i64, j: i64) -> Rat {
    match rule {
        DiracRule::Generic => rat_int(i * sign_plus(j) + j),
        DiracRule::Zero => Rat::zero(),
        DiracRule::SquareFirstLeg => rat_int(i * i * sign_plus(j) + j),
        DiracRule::Table { entries, default } => entries
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| rule_eval(default, i, j)),
        DiracRule::Custom(f) => f(i, j),
    }
}

impl DiracSpec {
    pub fn generic() -> Self {
        DiracSpec {
            name: "generic".into(),
            rule: DiracRule::Generic,
        }
    }

    pub fn zero() -> Self {
        DiracSpec {
            name: "zero".into(),
            rule: DiracRule::Zero,
        }
    }

    pub fn square_first_leg() -> Self {
        DiracSpec {
            name: "square-first-leg".into(),
            rule: DiracRule::SquareFirstLeg,
        }
    }

    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(i64, i64) -> Rat + Send + Sync + 'static,
    ) -> Self {
        DiracSpec {
            name: name.into(),
            rule: DiracRule::Custom(Arc::new(f)),
        }
    }

    /// Eigenvalue table from `i,j,value` lines (blank lines and `#`
    /// comments ignored); positions outside the table fall back to
    /// `default`'s rule.
    pub fn from_csv(
        name: impl Into<String>,
        text: &str,
        default: &DiracSpec,
    ) -> Result<Self, DiracError> {
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || DiracError::BadCsv(lineno + 1, line.to_string());
            let mut parts = line.split(',');
            let i: i64 = parts
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(bad)?;
            let j: i64 = parts
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(bad)?;
            let v = parts
                .next()
                .map(str::trim)
                .and_then(|s| parse_rat(s).ok())
                .ok_or_else(bad)?;
            if parts.next().is_some() || i < 0 {
                return Err(bad());
            }
            entries.insert((i, j), v);
        }
        Ok(DiracSpec {
            name: name.into(),
            rule: DiracRule::Table {
                entries: Arc::new(entries),
                default: Arc::new(default.rule.clone()),
            },
        })
    }

    /// A seeded pseudorandom candidate, affine in `i sgn(j)` and `j` with
    /// small rational coefficients; used to exercise commutator routes on
    /// rules with no special structure.
    pub fn random_linear(rng: &mut impl Rng) -> Self {
        let pick = |rng: &mut dyn rand::RngCore| rat(rng.gen_range(-4..=4), rng.gen_range(1..=3));
        let a = pick(rng);
        let b = pick(rng);
        let c = pick(rng);
        let name = format!("linear({}, {}, {})", a, b, c);
        DiracSpec::custom(name, move |i, j| {
            a.clone() * rat_int(i * sign_plus(j))
                + b.clone() * rat_int(j)
                + c.clone() * rat_int(i % 2)
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eigenvalue(&self, i: i64, j: i64) -> Rat {
        debug_assert!(i >= 0, "first leg index must be nonnegative");
        rule_eval(&self.rule, i, j)
    }

    /// The diagonal matrix of the candidate on a window; exact everywhere,
    /// so the margin is zero.
    pub fn operator(&self, w: PlaneWindow) -> TruncatedOperator<Rat> {
        Windowed::diagonal(w, |(i, j)| self.eigenvalue(i, j))
    }

    pub fn operator_sqrt(&self, w: PlaneWindow) -> TruncatedOperator<SqrtRat> {
        Windowed::diagonal(w, |(i, j)| SqrtRat::from_rat(&self.eigenvalue(i, j)))
    }

    /// Diagonal projection onto nonnegative eigenvalues, `sign(0) = +1`.
    pub fn sign_projection(&self, w: PlaneWindow) -> TruncatedOperator<Rat> {
        Windowed::diagonal(w, |(i, j)| {
            if self.eigenvalue(i, j) >= Rat::zero() {
                Rat::from_integer(1.into())
            } else {
                Rat::zero()
            }
        })
    }
}

/// `D pi(a) - pi(a) D` on the window; the reference route every other
/// commutator construction is checked against.
pub fn direct_commutator(
    spec: &DiracSpec,
    a: &AlgebraElement<Rat>,
    w: PlaneWindow,
) -> TruncatedOperator<SqrtRat> {
    let d = spec.operator_sqrt(w);
    let p = represent(a, w);
    d.mul(&p)
        .and_then(|x| x.sub(&p.mul(&d)?))
        .expect("same window")
}

/// Generator letters of a monomial word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    Alpha,
    AlphaStar,
    Beta,
    BetaStar,
}

impl Letter {
    pub fn element(self, q: &Rat) -> AlgebraElement<Rat> {
        match self {
            Letter::Alpha => AlgebraElement::gen_alpha(q),
            Letter::AlphaStar => AlgebraElement::gen_alpha_star(q),
            Letter::Beta => AlgebraElement::gen_beta(q),
            Letter::BetaStar => AlgebraElement::gen_beta_star(q),
        }
        .expect("generator at valid q")
    }
}

/// The letter word of a normal-ordered monomial.
pub fn mon_letters(m: Mon) -> Vec<Letter> {
    let mut out = Vec::new();
    if m.i >= 0 {
        out.extend(std::iter::repeat_n(Letter::Alpha, m.i as usize));
    } else {
        out.extend(std::iter::repeat_n(Letter::AlphaStar, (-m.i) as usize));
    }
    out.extend(std::iter::repeat_n(Letter::Beta, m.j as usize));
    out.extend(std::iter::repeat_n(Letter::BetaStar, m.k as usize));
    out
}

/// `[D, pi(a)]` assembled by the Leibniz rule over each monomial's letter
/// word, with per-letter commutators computed directly. Independent of
/// [`direct_commutator`] as a computation: it exercises products of up to
/// `|i|+j+k` windowed factors and their margin bookkeeping.
pub fn assembled_commutator(
    spec: &DiracSpec,
    a: &AlgebraElement<Rat>,
    w: PlaneWindow,
) -> TruncatedOperator<SqrtRat> {
    let q = a.q();
    let letter_reps: BTreeMap<u8, TruncatedOperator<SqrtRat>> = [
        Letter::Alpha,
        Letter::AlphaStar,
        Letter::Beta,
        Letter::BetaStar,
    ]
    .into_iter()
    .enumerate()
    .map(|(n, l)| (n as u8, represent(&l.element(q), w)))
    .collect();
    let letter_comms: BTreeMap<u8, TruncatedOperator<SqrtRat>> = [
        Letter::Alpha,
        Letter::AlphaStar,
        Letter::Beta,
        Letter::BetaStar,
    ]
    .into_iter()
    .enumerate()
    .map(|(n, l)| (n as u8, direct_commutator(spec, &l.element(q), w)))
    .collect();
    let code = |l: Letter| match l {
        Letter::Alpha => 0u8,
        Letter::AlphaStar => 1,
        Letter::Beta => 2,
        Letter::BetaStar => 3,
    };
    let mut acc = Windowed::zero(w);
    for (&mon, c) in a.terms() {
        let letters = mon_letters(mon);
        if letters.is_empty() {
            continue;
        }
        // Prefix products pi(X_1 .. X_t); suffixes built right to left.
        let mut prefixes: Vec<TruncatedOperator<SqrtRat>> = vec![TruncatedOperator::identity(w)];
        for &l in &letters {
            let next = prefixes
                .last()
                .unwrap()
                .mul(&letter_reps[&code(l)])
                .expect("same window");
            prefixes.push(next);
        }
        let mut suffixes: Vec<TruncatedOperator<SqrtRat>> = vec![TruncatedOperator::identity(w)];
        for &l in letters.iter().rev() {
            let next = letter_reps[&code(l)]
                .mul(suffixes.last().unwrap())
                .expect("same window");
            suffixes.push(next);
        }
        let mut term = Windowed::zero(w);
        for (t, &l) in letters.iter().enumerate() {
            let piece = prefixes[t]
                .mul(&letter_comms[&code(l)])
                .and_then(|x| x.mul(&suffixes[letters.len() - 1 - t]))
                .expect("same window");
            term = term.add(&piece).expect("same window");
        }
        acc = acc.add(&term.scale_rat(c)).expect("same window");
    }
    acc
}

/// Closed-form `[D, pi(letter)]` for the generic candidate:
///
/// ```text
/// [D, pi(a)]  = -(I (x) S) pi(a)         [D, pi(a*)] = +(I (x) S) pi(a*)
/// [D, pi(b)]  = -pi(b)  - 2 (N q^N (x) |e_{-1}><e_0|)
/// [D, pi(b*)] = +pi(b*) + 2 (N q^N (x) |e_0><e_{-1}|)
/// ```
///
/// The rank-one second-leg tails are where the second-leg shift crosses
/// the sign step of the spectrum.
pub fn closed_letter_commutator(
    q: &Rat,
    w: PlaneWindow,
    letter: Letter,
) -> TruncatedOperator<SqrtRat> {
    let s = sign_s::<SqrtRat>(w);
    match letter {
        Letter::Alpha => s
            .mul(&represent(&Letter::Alpha.element(q), w))
            .expect("same window")
            .neg(),
        Letter::AlphaStar => s
            .mul(&represent(&Letter::AlphaStar.element(q), w))
            .expect("same window"),
        Letter::Beta => {
            let mut tail = Windowed::zero(w);
            for m in 0..=w.m_row as i64 {
                let c = rat_int(m) * rat_pow(q, m);
                tail.add_entry((m, -1), (m, 0), SqrtRat::from_rat(&c));
            }
            represent(&Letter::Beta.element(q), w)
                .add(&tail.scale_rat(&rat_int(2)))
                .expect("same window")
                .neg()
        }
        Letter::BetaStar => {
            let mut tail = Windowed::zero(w);
            for m in 0..=w.m_row as i64 {
                let c = rat_int(m) * rat_pow(q, m);
                tail.add_entry((m, 0), (m, -1), SqrtRat::from_rat(&c));
            }
            represent(&Letter::BetaStar.element(q), w)
                .add(&tail.scale_rat(&rat_int(2)))
                .expect("same window")
        }
    }
}

/// Four-term decomposition of `[D, pi(a)]` for the generic candidate:
/// termwise on monomials `a_i b^j b*^k` with winding `r = j - k`,
///
/// ```text
/// [D, pi(mon)] = -i (I (x) S) pi(mon) + (k - j) pi(mon) + tail(r)
/// ```
///
/// where the tail is supported on the second-leg strip crossed by the
/// winding: for `r > 0` it is `-2 (Z_i (x) C_r) pi(a_i b^{j-1} b*^k)` with
/// `C_r` the partial down-shift from `{1-r..0}` and `Z_i` the first-leg
/// diagonal `(N + i) q^{N + i}`; for `r < 0` the mirror with the partial
/// up-shift from `{-1..|r|-2}` and the reduced monomial `a_i b^j b*^{k-1}`,
/// scaled `+2`. For `r = 0` there is no tail.
pub fn four_term_commutator(a: &AlgebraElement<Rat>, w: PlaneWindow) -> TruncatedOperator<SqrtRat> {
    let q = a.q();
    let s = sign_s::<SqrtRat>(w);
    let mut acc = Windowed::zero(w);
    for (&mon, c) in a.terms() {
        let pi = represent_mon(q, mon, w);
        let s_part = s
            .mul(&pi)
            .expect("same window")
            .scale_rat(&rat_int(-(mon.i as i64)));
        let plain = pi.scale_rat(&rat_int(mon.k as i64 - mon.j as i64));
        let mut term = s_part.add(&plain).expect("same window");
        if let Some(tail) = crossing_tail(q, mon, w) {
            term = term.add(&tail).expect("same window");
        }
        acc = acc.add(&term.scale_rat(c)).expect("same window");
    }
    acc
}

/// The compact tail of `[D, pi(mon)]` for the generic candidate: the part
/// of the commutator supported where the second-leg winding crosses the
/// sign step. `None` when the winding is zero. Entries decay like
/// `m q^m` up the first leg, which is what tail-norm certificates measure.
pub fn crossing_tail(q: &Rat, mon: Mon, w: PlaneWindow) -> Option<TruncatedOperator<SqrtRat>> {
    let r = mon.winding();
    if r == 0 {
        return None;
    }
    let z_diag = |t: i64| {
        let e = t + mon.i as i64;
        SqrtRat::from_rat(&(rat_int(e) * rat_pow(q, e)))
    };
    let mut strip = Windowed::zero(w);
    let (reduced, sign) = if r > 0 {
        for t in 0..=w.m_row as i64 {
            for n in (1 - r)..=0 {
                strip.add_entry((t, n - 1), (t, n), z_diag(t));
            }
        }
        (Mon::new(mon.i, mon.j - 1, mon.k), -2)
    } else {
        for t in 0..=w.m_row as i64 {
            for n in -1..=(-r - 2) {
                strip.add_entry((t, n + 1), (t, n), z_diag(t));
            }
        }
        (Mon::new(mon.i, mon.j, mon.k - 1), 2)
    };
    Some(
        strip
            .mul(&represent_mon(q, reduced, w))
            .expect("same window")
            .scale_rat(&rat_int(sign)),
    )
}

/// Argmaxed scan maxima for one difference family at three nested scans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanProfile {
    pub family: &'static str,
    pub scans: [u32; 3],
    pub maxima: [Rat; 3],
    pub witnesses: [(i64, i64); 3],
}

impl ScanProfile {
    /// Evidence of boundedness: the increments between nested scan maxima
    /// shrink geometrically (ratio at most 3/5, compared exactly). A flat
    /// profile passes; fresh growth at the larger scans fails.
    pub fn trend_is_bounded(&self) -> bool {
        let d1 = self.maxima[1].clone() - self.maxima[0].clone();
        let d2 = self.maxima[2].clone() - self.maxima[1].clone();
        d2.clone() * rat_int(5) <= d1 * rat_int(3)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundednessCertificate {
    pub spec: String,
    pub first_leg: ScanProfile,
    pub second_leg: ScanProfile,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditFailure {
    pub spec: String,
    pub profile: ScanProfile,
}

fn scan_profile(
    spec: &DiracSpec,
    family: &'static str,
    scan: u32,
    f: impl Fn(i64, i64) -> Option<Rat>,
) -> ScanProfile {
    let scans = [scan, 2 * scan, 4 * scan];
    let mut maxima = [Rat::zero(), Rat::zero(), Rat::zero()];
    let mut witnesses = [(0i64, 0i64); 3];
    for (t, &s) in scans.iter().enumerate() {
        let mut best: Option<(Rat, (i64, i64))> = None;
        for i in 0..=s as i64 {
            for j in -(s as i64)..=s as i64 {
                if let Some(v) = f(i, j) {
                    if best.as_ref().is_none_or(|(b, _)| v > *b) {
                        best = Some((v, (i, j)));
                    }
                }
            }
        }
        let (m, pos) = best.unwrap_or((Rat::zero(), (0, 0)));
        maxima[t] = m;
        witnesses[t] = pos;
    }
    let _ = spec;
    ScanProfile {
        family,
        scans,
        maxima,
        witnesses,
    }
}

/// Finite-evidence certificate that both commutator difference families
/// stay bounded: `|d_{i-1,j} - d_{ij}|` flat and `|d_{i,j-1} - d_{ij}|`
/// at most linear in `i`. Scans `scan, 2 scan, 4 scan`; all comparisons
/// exact.
pub fn boundedness_gate(
    spec: &DiracSpec,
    scan: u32,
) -> Result<BoundednessCertificate, Box<AuditFailure>> {
    assert!(scan >= 8, "gate needs a scan of at least 8");
    let first = scan_profile(spec, "first-leg difference", scan, |i, j| {
        if i >= 1 {
            Some((spec.eigenvalue(i - 1, j) - spec.eigenvalue(i, j)).abs())
        } else {
            None
        }
    });
    let second = scan_profile(spec, "second-leg difference over i+1", scan, |i, j| {
        Some((spec.eigenvalue(i, j - 1) - spec.eigenvalue(i, j)).abs() / rat_int(i + 1))
    });
    for p in [&first, &second] {
        if !p.trend_is_bounded() {
            return Err(Box::new(AuditFailure {
                spec: spec.name.clone(),
                profile: p.clone(),
            }));
        }
    }
    Ok(BoundednessCertificate {
        spec: spec.name.clone(),
        first_leg: first,
        second_leg: second,
    })
}

/// Finite-evidence certificate that `|d_{ij}|` grows at most linearly in
/// `i + |j| + 1`.
pub fn growth_audit(spec: &DiracSpec, scan: u32) -> Result<ScanProfile, Box<AuditFailure>> {
    assert!(scan >= 8, "audit needs a scan of at least 8");
    let p = scan_profile(spec, "eigenvalue over i+|j|+1", scan, |i, j| {
        Some(spec.eigenvalue(i, j).abs() / rat_int(i + j.abs() + 1))
    });
    if p.trend_is_bounded() {
        Ok(p)
    } else {
        Err(Box::new(AuditFailure {
            spec: spec.name.clone(),
            profile: p,
        }))
    }
}

/// Counts eigenvalues with `|d| <= bound` over the scan square of radius
/// `search`, keyed by exact value.
pub fn multiplicity_table(spec: &DiracSpec, bound: &Rat, search: u32) -> BTreeMap<Rat, u64> {
    let mut out = BTreeMap::new();
    for i in 0..=search as i64 {
        for j in -(search as i64)..=search as i64 {
            let d = spec.eigenvalue(i, j);
            if d.abs() <= *bound {
                *out.entry(d).or_insert(0) += 1;
            }
        }
    }
    out
}

/// Multiplicity table required to agree between search radii `search` and
/// `2 search`; disagreement means the scan was cutting level sets.
pub fn multiplicity_table_stabilized(
    spec: &DiracSpec,
    bound: &Rat,
    search: u32,
) -> Result<BTreeMap<Rat, u64>, DiracError> {
    let t1 = multiplicity_table(spec, bound, search);
    let t2 = multiplicity_table(spec, bound, 2 * search);
    if t1 == t2 {
        Ok(t1)
    } else {
        Err(DiracError::UnstableMultiplicities(search, 2 * search))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummabilityTrend {
    Convergent,
    Divergent,
    Undetermined,
}

#[derive(Debug, Clone)]
pub struct SummabilityProfile {
    pub spec: String,
    pub p: Rat,
    pub cutoffs: Vec<Rat>,
    pub partial_sums: Vec<f64>,
    /// Ratio of the last two increments, when defined.
    pub increment_ratio: Option<f64>,
    pub trend: SummabilityTrend,
}

/// Partial sums of `|d|^{-p}` over `0 < |d| <= cutoff` on the scan square,
/// with a trend verdict from the last two increments: a ratio at most 0.6
/// reads as convergent, at least 0.8 as divergent, in between as
/// undetermined. Zero eigenvalues are excluded; an identically zero scan
/// is rejected rather than reported convergent.
pub fn summability_profile(
    spec: &DiracSpec,
    p: &Rat,
    cutoffs: &[Rat],
    search: u32,
) -> Result<SummabilityProfile, DiracError> {
    if cutoffs.len() < 3 || cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(DiracError::BadCutoffs(cutoffs.len()));
    }
    let mut spectrum: Vec<Rat> = Vec::new();
    for i in 0..=search as i64 {
        for j in -(search as i64)..=search as i64 {
            let d = spec.eigenvalue(i, j);
            if !d.is_zero() {
                spectrum.push(d.abs());
            }
        }
    }
    if spectrum.is_empty() {
        return Err(DiracError::AllZero(spec.name.clone()));
    }
    let pf = Scalar::to_f64(p);
    let sums: Vec<f64> = cutoffs
        .iter()
        .map(|lam| {
            spectrum
                .iter()
                .filter(|d| *d <= lam)
                .map(|d| Scalar::to_f64(d).powf(-pf))
                .sum()
        })
        .collect();
    let n = sums.len();
    let d1 = sums[n - 2] - sums[n - 3];
    let d2 = sums[n - 1] - sums[n - 2];
    let (ratio, trend) = if d1 <= 0.0 {
        if d2 <= 0.0 {
            (None, SummabilityTrend::Convergent)
        } else {
            (None, SummabilityTrend::Undetermined)
        }
    } else {
        let r = d2 / d1;
        let t = if r <= 0.6 {
            SummabilityTrend::Convergent
        } else if r >= 0.8 {
            SummabilityTrend::Divergent
        } else {
            SummabilityTrend::Undetermined
        };
        (Some(r), t)
    };
    Ok(SummabilityProfile {
        spec: spec.name.clone(),
        p: p.clone(),
        cutoffs: cutoffs.to_vec(),
        partial_sums: sums,
        increment_ratio: ratio,
        trend,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionKind {
    /// Columns `j <= -M` plus exceptions.
    P1,
    /// Columns `j >= M` plus exceptions.
    P2,
    /// Finitely many columns.
    P3,
    /// All but finitely many columns.
    P4,
    Other,
}

/// Shape of the nonnegative-eigenvalue projection, described per column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignProjectionClass {
    pub kind: ProjectionKind,
    /// Minimal cutoff beyond which columns have a uniform eventual sign.
    pub cutoff: u32,
    /// Columns inside `(-cutoff, cutoff)` that belong to the projection
    /// (for P4: that are excluded from it).
    pub exceptional: BTreeSet<i64>,
    /// Positions whose sign differs from their column's eventual sign.
    pub per_column_exceptions: Vec<(i64, i64)>,
}

/// Classifies the sign projection of a candidate by the eventual sign of
/// each column, `sign(0) = +1`. A column must keep one sign on the upper
/// half of the scan to count as stable; sporadic low-`i` exceptions are
/// tolerated and recorded, matching the idea that a finite-rank change
/// does not move an index.
pub fn classify_sign_projection(
    spec: &DiracSpec,
    scan: u32,
) -> Result<SignProjectionClass, DiracError> {
    assert!(scan >= 8, "classification needs a scan of at least 8");
    let s = scan as i64;
    let mut eventual: BTreeMap<i64, bool> = BTreeMap::new();
    let mut exceptions: Vec<(i64, i64)> = Vec::new();
    for j in -s..=s {
        let sign_at = |i: i64| spec.eigenvalue(i, j) >= Rat::zero();
        let tail = sign_at(s);
        for i in (s / 2)..=s {
            if sign_at(i) != tail {
                return Err(DiracError::UnstableColumn(j));
            }
        }
        for i in 0..(s / 2) {
            if sign_at(i) != tail {
                exceptions.push((i, j));
            }
        }
        eventual.insert(j, tail);
    }
    let uniform_beyond = |m: i64| -> Option<(bool, bool)> {
        let up = eventual[&m];
        let dn = eventual[&-m];
        for j in m..=s {
            if eventual[&j] != up || eventual[&-j] != dn {
                return None;
            }
        }
        Some((up, dn))
    };
    let (cutoff, up, dn) = match (1..=s).find_map(|m| uniform_beyond(m).map(|p| (m, p))) {
        Some((m, (up, dn))) => (m as u32, up, dn),
        None => {
            return Ok(SignProjectionClass {
                kind: ProjectionKind::Other,
                cutoff: scan,
                exceptional: BTreeSet::new(),
                per_column_exceptions: exceptions,
            })
        }
    };
    let c = cutoff as i64;
    let inner_positive: BTreeSet<i64> = ((-c + 1)..c).filter(|j| eventual[j]).collect();
    let inner_negative: BTreeSet<i64> = ((-c + 1)..c).filter(|j| !eventual[j]).collect();
    let (kind, exceptional) = match (up, dn) {
        (true, false) => (ProjectionKind::P2, inner_positive),
        (false, true) => (ProjectionKind::P1, inner_positive),
        (false, false) => (ProjectionKind::P3, inner_positive),
        (true, true) => (ProjectionKind::P4, inner_negative),
    };
    Ok(SignProjectionClass {
        kind,
        cutoff,
        exceptional,
        per_column_exceptions: exceptions,
    })
}
