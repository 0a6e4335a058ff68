//! The defining representation of the quantum SU(2) algebra on windows of
//! `l^2(N) (x) l^2(Z)`, plus the quotient representation of the circle
//! algebra on `l^2(Z)`.
//!
//! On basis vectors `e_{m,n}`:
//!
//! ```text
//! pi(a)  e_{m,n} = sqrt(1 - q^{2m})     e_{m-1,n}
//! pi(a*) e_{m,n} = sqrt(1 - q^{2(m+1)}) e_{m+1,n}
//! pi(b)  e_{m,n} = q^m e_{m,n-1}
//! pi(b*) e_{m,n} = q^m e_{m,n+1}
//! ```
//!
//! A normal-ordered monomial therefore acts in closed form: `a_i b^j b*^k`
//! sends `e_{m,n}` to `q^{(j+k)m} A_i(m) e_{m-i, n-(j-k)}` where `A_i(m)` is
//! the product of `sqrt(1 - q^{2s})` over the `|i|` values of `s` crossed by
//! the first-leg shift. Entries are exact elements of the square-root
//! extension of the rationals; floats appear only in norm certificates.

use num::traits::{One, Zero};

use crate::algebra::{AlgebraElement, LaurentPoly, Mon};
use crate::scalar::{rat_pow, GaussRat, Rat, Scalar, SqrtExt, SqrtRat};
use crate::truncation::{PlaneWindow, TruncatedOperator, TruncationError, Windowed, ZLineOp};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RepresentError {
    #[error(transparent)]
    Truncation(#[from] TruncationError),
    #[error("probe windows must differ: both are {0}")]
    EqualProbeWindows(String),
}

/// First-leg amplitude of `a_i` at source `m`: the exact product of
/// `sqrt(1 - q^{2s})` factors, zero when the shift crosses the bottom.
fn alpha_amplitude(q: &Rat, i: i32, m: i64) -> SqrtRat {
    let mut acc = SqrtRat::one();
    if i >= 0 {
        // a^i lowers by i; factors s = m-i+1 .. m. Any s <= 0 kills it.
        if m < i as i64 {
            return SqrtRat::zero();
        }
        for s in (m - i as i64 + 1)..=m {
            acc = acc * SqrtRat::sqrt_of(Rat::one() - rat_pow(q, 2 * s));
        }
    } else {
        // (a*)^{|i|} raises; factors s = m+1 .. m+|i|.
        for s in (m + 1)..=(m + (-i) as i64) {
            acc = acc * SqrtRat::sqrt_of(Rat::one() - rat_pow(q, 2 * s));
        }
    }
    acc
}

/// Matrix of one normal-ordered monomial on a window, coefficient 1.
pub fn represent_mon(q: &Rat, mon: Mon, w: PlaneWindow) -> TruncatedOperator<SqrtRat> {
    let margin = (mon.i.unsigned_abs()).max(mon.winding().unsigned_abs() as u32);
    let mut op = Windowed::zero(w).with_margin(margin);
    let r = mon.winding();
    for m in 0..=w.m_row as i64 {
        let amp = alpha_amplitude(q, mon.i, m);
        if amp.is_zero() {
            continue;
        }
        let phase = rat_pow(q, (mon.j + mon.k) as i64 * m);
        let coeff = amp.mul_rat(&phase);
        for n in -(w.m_col as i64)..=w.m_col as i64 {
            op.add_entry((m - mon.i as i64, n - r), (m, n), coeff.clone());
        }
    }
    op
}

/// Linear extension to elements. The margin is the element's total shift
/// bandwidth, so interior entries match the infinite operator exactly.
pub fn represent(a: &AlgebraElement<Rat>, w: PlaneWindow) -> TruncatedOperator<SqrtRat> {
    let mut acc = Windowed::zero(w).with_margin(a.rep_margin());
    for (&mon, c) in a.terms() {
        let piece = represent_mon(a.q(), mon, w).scale_rat(c);
        acc = acc.add(&piece).expect("same window by construction");
    }
    acc
}

/// The circle-algebra representation on `l^2(Z)`: `z^n` acts as the
/// bilateral shift by `n`. All entries are rational.
pub fn represent_circle(p: &LaurentPoly<Rat>, m: u32) -> ZLineOp<Rat> {
    let margin = p
        .terms()
        .map(|(&n, _)| n.unsigned_abs() as u32)
        .max()
        .unwrap_or(0);
    let mut op = Windowed::zero(crate::truncation::ZWindow { m }).with_margin(margin);
    for (&n, c) in p.terms() {
        for src in -(m as i64)..=m as i64 {
            op.add_entry(src + n, src, c.clone());
        }
    }
    op
}

/// `pi(a*) = pi(a)*` holds entry for entry on the full window: compression
/// commutes with adjoints (though not with products).
pub fn star_defect_is_zero(a: &AlgebraElement<Rat>, w: PlaneWindow) -> bool {
    represent(&a.adjoint(), w) == represent(a, w).adjoint()
}

/// `pi(ab) = pi(a) pi(b)` on the interior; the margin bookkeeping of the
/// product side sets the guard.
pub fn homomorphism_defect_is_zero(
    a: &AlgebraElement<Rat>,
    b: &AlgebraElement<Rat>,
    w: PlaneWindow,
) -> Result<bool, RepresentError> {
    let ab = represent(&a.mul(b).expect("same q"), w);
    let prod = represent(a, w).mul(&represent(b, w))?;
    Ok(ab.eq_on_interior(&prod)?.is_ok())
}

/// The five defining relations evaluated at the matrix level, from
/// generator matrices only (no algebra-side normal ordering), as named
/// interior-zero checks.
pub fn relation_matrix_defects(
    q: &Rat,
    w: PlaneWindow,
) -> Result<Vec<(&'static str, bool)>, RepresentError> {
    let a = represent(&AlgebraElement::gen_alpha(q).unwrap(), w);
    let astar = represent(&AlgebraElement::gen_alpha_star(q).unwrap(), w);
    let b = represent(&AlgebraElement::gen_beta(q).unwrap(), w);
    let bstar = represent(&AlgebraElement::gen_beta_star(q).unwrap(), w);
    let id = TruncatedOperator::<SqrtRat>::identity(w);
    let q2 = rat_pow(q, 2);
    let mut out = Vec::new();
    let checks: Vec<(&'static str, TruncatedOperator<SqrtRat>)> = vec![
        (
            "a*a + b*b - 1",
            astar.mul(&a)?.add(&bstar.mul(&b)?)?.sub(&id)?,
        ),
        (
            "aa* + q^2 bb* - 1",
            a.mul(&astar)?
                .add(&b.mul(&bstar)?.scale_rat(&q2))?
                .sub(&id)?,
        ),
        ("ab - q ba", a.mul(&b)?.sub(&b.mul(&a)?.scale_rat(q))?),
        (
            "ab* - q b*a",
            a.mul(&bstar)?.sub(&bstar.mul(&a)?.scale_rat(q))?,
        ),
        ("bb* - b*b", b.mul(&bstar)?.sub(&bstar.mul(&b)?)?),
    ];
    for (name, defect) in checks {
        out.push((name, defect.is_zero_on_interior(defect.margin())?));
    }
    Ok(out)
}

/// Diagonal torus phase `U_{z,w} = z^N (x) w^N` at fourth roots of unity:
/// `z = i^{z_exp}`, `w = i^{w_exp}`, exact over the Gaussian rationals.
fn torus_phase(w: PlaneWindow, z_exp: i64, w_exp: i64) -> TruncatedOperator<GaussRat> {
    Windowed::diagonal(w, |(m, n)| GaussRat::i_pow(z_exp * m + w_exp * n))
}

/// Defect of torus equivariance: `U* pi(a) U` minus the phase-twisted
/// representation, where each monomial `a_i b^j b*^k` picks up the exact
/// phase `z^i w^{j-k}`. Zero on the whole window, not just the interior:
/// conjugation by a diagonal commutes with compression.
pub fn equivariance_defect(
    a: &AlgebraElement<Rat>,
    w: PlaneWindow,
    z_exp: i64,
    w_exp: i64,
) -> TruncatedOperator<SqrtExt<GaussRat>> {
    let lift = |x: &SqrtRat| x.map_base(|r: &Rat| GaussRat::from_rat(r));
    let u = torus_phase(w, z_exp, w_exp).map_scalar(|g| SqrtExt::from_base(g.clone()));
    let pia = represent(a, w).map_scalar(lift);
    let conj = u
        .adjoint()
        .mul(&pia)
        .and_then(|x| x.mul(&u))
        .expect("same window");
    let mut twisted = Windowed::zero(w).with_margin(a.rep_margin());
    for (&mon, c) in a.terms() {
        let phase = GaussRat::i_pow(z_exp * mon.i as i64 + w_exp * mon.winding());
        let piece = represent_mon(a.q(), mon, w)
            .map_scalar(lift)
            .scale(&SqrtExt::from_base(phase).mul_rat(c));
        twisted = twisted.add(&piece).expect("same window");
    }
    // Conjugation by a diagonal leaves the sparsity pattern in place, so the
    // margins match and the defect is meaningful entrywise.
    conj.sub(&twisted).expect("same window")
}

/// Outcome of the linear-independence probe for represented elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbeOutcome {
    /// The only combination representing to zero on the interior is trivial.
    Independent,
    /// Every input normal-ordered to zero; nothing to separate.
    VacuouslyTrue { dropped: usize },
    /// Rank deficiency persisted across both windows. Either the elements
    /// are genuinely dependent or neither window separates them; finite
    /// data cannot tell these apart, so no boolean is claimed.
    Inconclusive {
        rank_small: usize,
        rank_large: usize,
        count: usize,
    },
}

impl ProbeOutcome {
    pub fn is_independent(&self) -> bool {
        matches!(
            self,
            ProbeOutcome::Independent | ProbeOutcome::VacuouslyTrue { .. }
        )
    }
}

/// Exact rank of the coefficient-to-interior-entries map: each represented
/// element contributes one column; rows are (position, square-root word)
/// triples, so linear independence is decided over the rationals.
fn probe_rank(elements: &[&AlgebraElement<Rat>], w: PlaneWindow) -> usize {
    use std::collections::BTreeMap;
    let guard = elements.iter().map(|a| a.rep_margin()).max().unwrap_or(0);
    let reps: Vec<TruncatedOperator<SqrtRat>> = elements
        .iter()
        .map(|a| represent(a, w).interior_filtered(guard))
        .collect();
    let mut row_index: BTreeMap<(u32, u32, Vec<Rat>), u32> = BTreeMap::new();
    for op in &reps {
        for (&(r, c), v) in op.mat().iter() {
            for (word, _) in v.terms() {
                let next = row_index.len() as u32;
                row_index.entry((r, c, word.to_vec())).or_insert(next);
            }
        }
    }
    let mut mat =
        crate::sparse::SparseMat::<Rat>::new(row_index.len() as u32, elements.len() as u32);
    for (t, op) in reps.iter().enumerate() {
        for (&(r, c), v) in op.mat().iter() {
            for (word, coeff) in v.terms() {
                let row = row_index[&(r, c, word.to_vec())];
                mat.add_entry(row, t as u32, coeff.clone());
            }
        }
    }
    mat.rank_exact()
}

/// Linear-independence probe at two windows; see [`ProbeOutcome`].
pub fn faithfulness_probe(
    elements: &[AlgebraElement<Rat>],
    small: PlaneWindow,
    large: PlaneWindow,
) -> Result<ProbeOutcome, RepresentError> {
    if small == large {
        return Err(RepresentError::EqualProbeWindows(format!(
            "({}, {})",
            small.m_row, small.m_col
        )));
    }
    let kept: Vec<&AlgebraElement<Rat>> = elements.iter().filter(|a| !a.is_zero()).collect();
    let dropped = elements.len() - kept.len();
    if kept.is_empty() {
        return Ok(ProbeOutcome::VacuouslyTrue { dropped });
    }
    let r1 = probe_rank(&kept, small);
    if r1 == kept.len() {
        return Ok(ProbeOutcome::Independent);
    }
    let r2 = probe_rank(&kept, large);
    if r2 == kept.len() {
        return Ok(ProbeOutcome::Independent);
    }
    Ok(ProbeOutcome::Inconclusive {
        rank_small: r1,
        rank_large: r2,
        count: kept.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::truncation::Geometry;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q() -> Rat {
        rat(1, 2)
    }

    fn w() -> PlaneWindow {
        PlaneWindow::square(8)
    }

    #[test]
    fn generator_entries_match_closed_form() {
        let b = represent(&AlgebraElement::gen_beta(&q()).unwrap(), w());
        // pi(b) e_{2,0} = q^2 e_{2,-1}.
        assert_eq!(b.get((2, -1), (2, 0)), Some(&SqrtRat::from_rat(&rat(1, 4))));
        let a = represent(&AlgebraElement::gen_alpha(&q()).unwrap(), w());
        // pi(a) kills the bottom row: no column with source m = 0 survives.
        let bottom = (0..=8).map(|n| w().flat((0, n - 4)).unwrap());
        for col in bottom {
            assert!(a.mat().iter().all(|(&(_, c), _)| c != col));
        }
        // pi(a) e_{1,n} = sqrt(1 - q^2) e_{0,n}.
        assert_eq!(a.get((0, 3), (1, 3)), Some(&SqrtRat::sqrt_of(rat(3, 4))));
        // Identity represents to the identity.
        let one = represent(&AlgebraElement::one(&q()).unwrap(), w());
        assert_eq!(one, TruncatedOperator::<SqrtRat>::identity(w()));
    }

    #[test]
    fn representation_is_multiplicative_on_interior() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..25 {
            let a = AlgebraElement::random(&q(), &mut rng, 2, 2, 2).unwrap();
            let b = AlgebraElement::random(&q(), &mut rng, 2, 2, 2).unwrap();
            assert!(homomorphism_defect_is_zero(&a, &b, w()).unwrap());
        }
    }

    #[test]
    fn representation_respects_star_on_full_window() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..25 {
            let a = AlgebraElement::random(&q(), &mut rng, 2, 2, 3).unwrap();
            assert!(star_defect_is_zero(&a, w()));
        }
    }

    #[test]
    fn matrix_level_relations_vanish_on_interior() {
        for (name, ok) in relation_matrix_defects(&q(), w()).unwrap() {
            assert!(ok, "relation {name} fails at the matrix level");
        }
    }

    #[test]
    fn circle_representation_shifts() {
        let z = represent_circle(&LaurentPoly::z_pow(1), 6);
        assert_eq!(z.get(1, 0), Some(&Rat::one()));
        let zz = represent_circle(&LaurentPoly::z_pow(1).mul(&LaurentPoly::z_pow(-1)), 6);
        assert_eq!(zz, ZLineOp::identity(crate::truncation::ZWindow { m: 6 }));
        // z z^{-1} as a matrix product is the identity on the interior.
        let zi = represent_circle(&LaurentPoly::z_pow(-1), 6);
        let prod = z.mul(&zi).unwrap();
        assert!(prod.eq_on_interior(&zz).unwrap().is_ok());
    }

    #[test]
    fn equivariance_phases_match_the_torus_twist() {
        let a = AlgebraElement::gen_alpha(&q()).unwrap();
        let b = AlgebraElement::gen_beta(&q()).unwrap();
        let mixed = a.mul(&b).unwrap().add(&b.adjoint()).unwrap();
        for (ze, we) in [(1, 0), (0, 1), (1, 3), (2, 2)] {
            for el in [&a, &b, &mixed] {
                let d = equivariance_defect(el, PlaneWindow::square(5), ze, we);
                assert!(d.mat().is_zero_mat(), "defect at phases ({ze},{we})");
            }
        }
    }

    #[test]
    fn faithfulness_probe_separates_basis_elements() {
        let els = vec![
            AlgebraElement::gen_alpha(&q()).unwrap(),
            AlgebraElement::gen_beta(&q()).unwrap(),
            AlgebraElement::one(&q()).unwrap(),
        ];
        let out =
            faithfulness_probe(&els, PlaneWindow::square(6), PlaneWindow::square(12)).unwrap();
        assert_eq!(out, ProbeOutcome::Independent);
    }

    #[test]
    fn faithfulness_probe_handles_zero_inputs() {
        let b = AlgebraElement::gen_beta(&q()).unwrap();
        let zero = b.sub(&b).unwrap();
        let rel = {
            // a*a + b*b - 1 normal-orders to zero.
            let a = AlgebraElement::gen_alpha(&q()).unwrap();
            let bs = AlgebraElement::gen_beta_star(&q()).unwrap();
            a.adjoint()
                .mul(&a)
                .unwrap()
                .add(&bs.mul(&b).unwrap())
                .unwrap()
                .sub(&AlgebraElement::one(&q()).unwrap())
                .unwrap()
        };
        assert!(rel.is_zero());
        let out = faithfulness_probe(
            &[zero, rel],
            PlaneWindow::square(6),
            PlaneWindow::square(12),
        )
        .unwrap();
        assert_eq!(out, ProbeOutcome::VacuouslyTrue { dropped: 2 });
    }

    #[test]
    fn faithfulness_probe_reports_persistent_deficiency() {
        let a = AlgebraElement::gen_alpha(&q()).unwrap();
        let two_a = a.scale_rat(&rat(2, 1));
        let out = faithfulness_probe(&[a, two_a], PlaneWindow::square(6), PlaneWindow::square(12))
            .unwrap();
        assert_eq!(
            out,
            ProbeOutcome::Inconclusive {
                rank_small: 1,
                rank_large: 1,
                count: 2
            }
        );
        assert!(!out.is_independent());
    }
}
