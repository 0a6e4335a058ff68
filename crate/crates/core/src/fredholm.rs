//! Exact Fredholm index pairings on guarded windows: the flux unitary
//! against column projections and sign projections, the 2x2 matrix
//! unitary over the doubled space, and multiplicity direct sums.
//!
//! Kernel and cokernel are counted by exact rank over the rationals. A
//! window cannot prove an index, so every pairing runs at two window
//! sizes and must agree; each exact rank is also recomputed in floating
//! point and the two methods must match.

use std::collections::BTreeSet;

use num::traits::{One, Zero};

use crate::dirac::DiracSpec;
use crate::scalar::{rat_pow, Rat, Scalar, SqrtRat};
use crate::sparse::SparseMat;
use crate::truncation::{Geometry, PlaneWindow, TruncatedOperator, Windowed};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FredholmError {
    #[error("projection exceptions {0:?} must lie strictly between -{1} and {1}")]
    BadExceptions(Vec<i64>, u32),
    #[error("no interior positions survive the guard {guard} on {label}")]
    EmptyInterior { label: String, guard: u32 },
    #[error("exact rank {exact} and float rank {float} disagree on {label}")]
    RankMethodsDisagree {
        label: String,
        exact: usize,
        float: usize,
    },
    #[error(
        "index does not stabilize on {label}: {first} at the small window, {second} at the large"
    )]
    Unstable {
        label: String,
        first: i64,
        second: i64,
    },
    #[error("multiplicity zero has no pairing")]
    ZeroMultiplicity,
    #[error("square-root word fails to cancel during rationalization at {0}")]
    ResidualRadical(String),
}

/// Kernel/cokernel counts of one guarded compression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexCount {
    pub kernel: usize,
    pub cokernel: usize,
}

impl IndexCount {
    pub fn index(&self) -> i64 {
        self.kernel as i64 - self.cokernel as i64
    }
}

/// Two-window agreement certificate for one pairing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexCertificate {
    pub label: String,
    pub windows: (u32, u32),
    pub counts: (IndexCount, IndexCount),
    pub index: i64,
}

/// Index of a compression from masked exact ranks, floating cross-checked.
///
/// `mat` holds the operator on the full window; `mask` selects the
/// projection's positions (rows and columns of the compression) and
/// `inner` the subset lying at least a guard band inside the window. A
/// compression kernel vector supported on `inner` is exactly a null
/// combination of the `inner` columns against all `mask` rows: the guard
/// keeps its image inside the window, and positions off the mask are
/// killed by the projection either way. Cokernel counts the mirror on
/// rows. Kernel vectors with support near the cut are missed here; the
/// two-window agreement in [`stabilized_index`] is what certifies against
/// that.
fn masked_index(
    label: &str,
    mat: &SparseMat<Rat>,
    matf: &SparseMat<f64>,
    mask: &[u32],
    inner: &[u32],
) -> Result<IndexCount, FredholmError> {
    let col_block = mat.submatrix(mask, inner);
    let row_block = mat.submatrix(inner, mask);
    let col_rank = col_block.rank_exact();
    let row_rank = row_block.rank_exact();
    for (which, exact, sub) in [
        ("columns", col_rank, matf.submatrix(mask, inner)),
        ("rows", row_rank, matf.submatrix(inner, mask)),
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
        kernel: inner.len() - col_rank,
        cokernel: inner.len() - row_rank,
    })
}

/// Runs one pairing at a window size and its double; the two indices must
/// agree or the result is an error, never a silently wrong integer.
pub fn stabilized_index(
    label: &str,
    m: u32,
    run: impl Fn(u32) -> Result<IndexCount, FredholmError>,
) -> Result<IndexCertificate, FredholmError> {
    let first = run(m)?;
    let second = run(2 * m)?;
    if first.index() != second.index() {
        return Err(FredholmError::Unstable {
            label: label.to_string(),
            first: first.index(),
            second: second.index(),
        });
    }
    Ok(IndexCertificate {
        label: label.to_string(),
        windows: (m, 2 * m),
        counts: (first, second),
        index: first.index(),
    })
}

/// The flux unitary: the bilateral second-leg shift on the bottom first-leg
/// row, the identity elsewhere. All entries are 0 or 1; it is an exact
/// compression of a unitary, so `u* u = I` holds on the interior.
pub fn build_u(w: PlaneWindow) -> TruncatedOperator<Rat> {
    let mut u = Windowed::zero(w).with_margin(1);
    for n in -(w.m_col as i64)..=w.m_col as i64 {
        u.add_entry((0, n - 1), (0, n), Rat::one());
    }
    for m in 1..=w.m_row as i64 {
        for n in -(w.m_col as i64)..=w.m_col as i64 {
            u.add_entry((m, n), (m, n), Rat::one());
        }
    }
    u
}

/// Interior defect of `u* u = I`; must be empty for a unitary compression.
pub fn interior_unitarity_holds(u: &TruncatedOperator<Rat>) -> Result<bool, FredholmError> {
    let w = *u.geom();
    let defect = u
        .adjoint()
        .mul(u)
        .and_then(|x| x.sub(&TruncatedOperator::identity(w)))
        .expect("same window");
    defect
        .is_zero_on_interior(defect.margin())
        .map_err(|e| FredholmError::EmptyInterior {
            label: format!("unitarity on {e}"),
            guard: defect.margin(),
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PFamily {
    /// Columns `j <= -M` plus exceptions: pairs to -1.
    P1,
    /// Columns `j >= M` plus exceptions: pairs to +1.
    P2,
    /// Finitely many columns: pairs to 0.
    P3,
    /// Complement of finitely many columns: pairs to 0.
    P4,
}

/// A diagonal projection determined by second-leg column membership.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnProjection {
    pub family: PFamily,
    pub cutoff: u32,
    pub exceptions: BTreeSet<i64>,
}

impl ColumnProjection {
    pub fn new(
        family: PFamily,
        cutoff: u32,
        exceptions: impl IntoIterator<Item = i64>,
    ) -> Result<Self, FredholmError> {
        assert!(cutoff >= 1);
        let exceptions: BTreeSet<i64> = exceptions.into_iter().collect();
        let c = cutoff as i64;
        let bad: Vec<i64> = exceptions
            .iter()
            .copied()
            .filter(|j| *j <= -c || *j >= c)
            .collect();
        if !bad.is_empty() {
            return Err(FredholmError::BadExceptions(bad, cutoff));
        }
        Ok(ColumnProjection {
            family,
            cutoff,
            exceptions,
        })
    }

    pub fn contains(&self, j: i64) -> bool {
        let c = self.cutoff as i64;
        match self.family {
            PFamily::P1 => j <= -c || self.exceptions.contains(&j),
            PFamily::P2 => j >= c || self.exceptions.contains(&j),
            PFamily::P3 => self.exceptions.contains(&j),
            PFamily::P4 => !self.exceptions.contains(&j),
        }
    }

    /// The index each family pairs to against the flux unitary: the
    /// compression is a half-line shift (one deficiency at the matched
    /// end) for P1/P2 and finite or cofinite (no net flux) for P3/P4.
    pub fn expected_index(&self) -> i64 {
        match self.family {
            PFamily::P1 => -1,
            PFamily::P2 => 1,
            PFamily::P3 => 0,
            PFamily::P4 => 0,
        }
    }

    pub fn label(&self) -> String {
        format!(
            "{:?}(M={}, E={:?})",
            self.family, self.cutoff, self.exceptions
        )
    }
}

/// Position mask of a diagonal projection on a window: the flat indices
/// it keeps, and the subset at depth >= guard.
#[derive(Debug, Clone)]
pub struct ProjectionMask {
    pub label: String,
    pub mask: Vec<u32>,
    pub inner: Vec<u32>,
}

impl ProjectionMask {
    pub fn from_predicate(
        label: impl Into<String>,
        w: PlaneWindow,
        guard: u32,
        keep: impl Fn((i64, i64)) -> bool,
    ) -> Self {
        let mut mask = Vec::new();
        let mut inner = Vec::new();
        for flat in 0..w.dim() {
            let ix = w.unflat(flat);
            if keep(ix) {
                mask.push(flat);
                if w.depth(ix) >= guard {
                    inner.push(flat);
                }
            }
        }
        ProjectionMask {
            label: label.into(),
            mask,
            inner,
        }
    }

    pub fn from_columns(p: &ColumnProjection, w: PlaneWindow, guard: u32) -> Self {
        Self::from_predicate(p.label(), w, guard, |(_, j)| p.contains(j))
    }

    /// Nonnegative-eigenvalue positions of a Dirac candidate.
    pub fn from_sign_of(spec: &DiracSpec, w: PlaneWindow, guard: u32) -> Self {
        Self::from_predicate(format!("sign({})", spec.name()), w, guard, |(i, j)| {
            spec.eigenvalue(i, j) >= Rat::zero()
        })
    }
}

/// Index of the compression of `u` to a projection mask at one window.
pub fn compression_index(
    u: &TruncatedOperator<Rat>,
    pm: &ProjectionMask,
) -> Result<IndexCount, FredholmError> {
    if pm.mask.is_empty() {
        // The zero projection compresses everything to zero.
        return Ok(IndexCount {
            kernel: 0,
            cokernel: 0,
        });
    }
    if pm.inner.is_empty() {
        return Err(FredholmError::EmptyInterior {
            label: pm.label.clone(),
            guard: 0,
        });
    }
    let matf = u.mat().to_f64();
    masked_index(&pm.label, u.mat(), &matf, &pm.mask, &pm.inner)
}

/// Guard for pairings against the flux unitary: its bandwidth plus one.
pub const U_GUARD: u32 = 2;

/// Pairing of the flux unitary with a column projection, two-window
/// certified.
pub fn u_pairing(p: &ColumnProjection, m: u32) -> Result<IndexCertificate, FredholmError> {
    stabilized_index(&format!("u vs {}", p.label()), m, |size| {
        let w = PlaneWindow::square(size);
        let u = build_u(w);
        compression_index(&u, &ProjectionMask::from_columns(p, w, U_GUARD))
    })
}

/// Pairing of the flux unitary with the sign projection of a Dirac
/// candidate.
pub fn sign_pairing(spec: &DiracSpec, m: u32) -> Result<IndexCertificate, FredholmError> {
    stabilized_index(&format!("u vs sign({})", spec.name()), m, |size| {
        let w = PlaneWindow::square(size);
        let u = build_u(w);
        compression_index(&u, &ProjectionMask::from_sign_of(spec, w, U_GUARD))
    })
}

/// First-leg weight words `prod_{s<=m} sqrt(1 - q^{2s})` and their exact
/// squares.
fn weight_words(q: &Rat, top: i64) -> (Vec<SqrtRat>, Vec<Rat>) {
    let mut words = vec![SqrtRat::one()];
    let mut squares = vec![Rat::one()];
    for s in 1..=top {
        let f = Rat::one() - rat_pow(q, 2 * s);
        words.push(words.last().unwrap().clone() * SqrtRat::sqrt_of(f.clone()));
        squares.push(squares.last().unwrap().clone() * f);
    }
    (words, squares)
}

/// Conjugates an operator by the diagonal first-leg weight, which turns
/// every square-root entry rational: entry' = w(row) entry / w(col) =
/// w(row) entry w(col) / w(col)^2, and the radicand word of the numerator
/// cancels completely. Row and column scaling by invertible diagonals
/// preserves the rank of every submatrix, which is all the index
/// computation uses.
fn rationalize_first_leg(
    op: &TruncatedOperator<SqrtRat>,
    q: &Rat,
) -> Result<TruncatedOperator<Rat>, FredholmError> {
    let w = *op.geom();
    let (words, squares) = weight_words(q, w.m_row as i64);
    let mut out = Windowed::zero(w).with_margin(op.margin());
    for (r, c, v) in op.entries() {
        let m_row = r.0 as usize;
        let m_col = c.0 as usize;
        let lifted = v.clone() * words[m_row].clone() * words[m_col].clone();
        let base = lifted
            .as_base()
            .ok_or_else(|| FredholmError::ResidualRadical(format!("{r:?} <- {c:?}")))?;
        out.add_entry(r, c, base / squares[m_col].clone());
    }
    Ok(out)
}

/// The 2x2 matrix unitary `[[a, -q b*], [b, a*]]` over the doubled space,
/// as a flat sparse matrix: block `s` maps flat index `x` to `s dim + x`.
/// Returned both rationalized (for exact ranks) and as floats of the
/// original square-root entries (an independent second method).
fn canonical_unitary(
    q: &Rat,
    w: PlaneWindow,
) -> Result<(SparseMat<Rat>, SparseMat<f64>), FredholmError> {
    use crate::algebra::AlgebraElement;
    use crate::represent::represent;
    let a = represent(&AlgebraElement::gen_alpha(q).unwrap(), w);
    let astar = represent(&AlgebraElement::gen_alpha_star(q).unwrap(), w);
    let b = represent(&AlgebraElement::gen_beta(q).unwrap(), w);
    let bstar = represent(&AlgebraElement::gen_beta_star(q).unwrap(), w).scale_rat(&-q.clone());
    let blocks = [[&a, &bstar], [&b, &astar]];
    let dim = w.dim();
    let mut exact = SparseMat::<Rat>::new(2 * dim, 2 * dim);
    let mut float = SparseMat::<f64>::new(2 * dim, 2 * dim);
    for (br, row) in blocks.iter().enumerate() {
        for (bc, op) in row.iter().enumerate() {
            let rat_op = rationalize_first_leg(op, q)?;
            for (&(r, c), v) in rat_op.mat().iter() {
                exact.add_entry(br as u32 * dim + r, bc as u32 * dim + c, v.clone());
            }
            for (&(r, c), v) in op.mat().iter() {
                float.add_entry(br as u32 * dim + r, bc as u32 * dim + c, Scalar::to_f64(v));
            }
        }
    }
    Ok((exact, float))
}

/// Pairing of the 2x2 matrix unitary with `P (x) I_2`, `P` the sign
/// projection of a Dirac candidate. The guard covers the generator
/// bandwidth 1.
pub fn canonical_pairing(
    q: &Rat,
    spec: &DiracSpec,
    m: u32,
) -> Result<IndexCertificate, FredholmError> {
    stabilized_index(
        &format!("2x2 unitary vs sign({})", spec.name()),
        m,
        |size| {
            let w = PlaneWindow::square(size);
            let pm = ProjectionMask::from_sign_of(spec, w, U_GUARD);
            let dim = w.dim();
            let double = |flats: &[u32]| -> Vec<u32> {
                let mut v: Vec<u32> = flats.to_vec();
                v.extend(flats.iter().map(|&f| f + dim));
                v
            };
            let (exact, float) = canonical_unitary(q, w)?;
            if pm.inner.is_empty() {
                return Err(FredholmError::EmptyInterior {
                    label: pm.label,
                    guard: U_GUARD,
                });
            }
            masked_index(
                &pm.label,
                &exact,
                &float,
                &double(&pm.mask),
                &double(&pm.inner),
            )
        },
    )
}

/// Pairing of `mult` copies of the flux unitary against the sign-oriented
/// projection: each copy keeps columns `j >= 0` when `mult > 0` and
/// `j < 0` when `mult < 0`. The direct sum is materialized and the index
/// computed, not assumed additive.
pub fn multiplicity_pairing(mult: i64, m: u32) -> Result<IndexCertificate, FredholmError> {
    if mult == 0 {
        return Err(FredholmError::ZeroMultiplicity);
    }
    stabilized_index(&format!("{mult} copies of u vs oriented sign"), m, |size| {
        let w = PlaneWindow::square(size);
        let u = build_u(w);
        let copies = mult.unsigned_abs() as usize;
        let mats: Vec<&SparseMat<Rat>> = std::iter::repeat_n(u.mat(), copies).collect();
        let big = SparseMat::block_diag(&mats);
        let bigf = big.to_f64();
        let keep = |j: i64| if mult > 0 { j >= 0 } else { j < 0 };
        let single = ProjectionMask::from_predicate("copy", w, U_GUARD, |(_, j)| keep(j));
        let dim = w.dim();
        let mut mask = Vec::new();
        let mut inner = Vec::new();
        for copy in 0..copies as u32 {
            mask.extend(single.mask.iter().map(|&f| copy * dim + f));
            inner.extend(single.inner.iter().map(|&f| copy * dim + f));
        }
        if inner.is_empty() {
            return Err(FredholmError::EmptyInterior {
                label: "multiplicity".into(),
                guard: U_GUARD,
            });
        }
        masked_index("multiplicity", &big, &bigf, &mask, &inner)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn u_is_interior_unitary() {
        let u = build_u(PlaneWindow::square(8));
        assert!(interior_unitarity_holds(&u).unwrap());
    }

    #[test]
    fn index_table_for_all_families() {
        for (family, expected) in [
            (PFamily::P1, -1),
            (PFamily::P2, 1),
            (PFamily::P3, 0),
            (PFamily::P4, 0),
        ] {
            let p = ColumnProjection::new(family, 2, [0, 1]).unwrap();
            assert_eq!(p.expected_index(), expected);
            let cert = u_pairing(&p, 10).unwrap();
            assert_eq!(cert.index, expected, "{}", p.label());
        }
    }

    #[test]
    fn sign_projection_of_generic_dirac_pairs_to_one() {
        let cert = sign_pairing(&DiracSpec::generic(), 10).unwrap();
        assert_eq!(cert.index, 1);
        assert_eq!(cert.counts.0.kernel, 1);
        assert_eq!(cert.counts.0.cokernel, 0);
    }

    #[test]
    fn identity_unitary_pairs_to_zero() {
        let w = PlaneWindow::square(8);
        let id = TruncatedOperator::identity(w);
        let p = ColumnProjection::new(PFamily::P2, 1, []).unwrap();
        let pm = ProjectionMask::from_columns(&p, w, U_GUARD);
        let count = compression_index(&id, &pm).unwrap();
        assert_eq!(count.index(), 0);
        // The zero projection is trivially index 0.
        let empty = ProjectionMask::from_predicate("none", w, U_GUARD, |_| false);
        assert_eq!(compression_index(&id, &empty).unwrap().index(), 0);
    }

    #[test]
    fn index_survives_guard_enlargement_and_finite_twist() {
        let p = ColumnProjection::new(PFamily::P2, 1, []).unwrap();
        for guard in [2, 3, 4] {
            let w = PlaneWindow::square(10);
            let u = build_u(w);
            let pm = ProjectionMask::from_columns(&p, w, guard);
            assert_eq!(
                compression_index(&u, &pm).unwrap().index(),
                1,
                "guard {guard}"
            );
        }
        // Multiply u by a diagonal unitary differing from I at finitely
        // many basis vectors: a compact perturbation, same index.
        let w = PlaneWindow::square(10);
        let mut v = TruncatedOperator::<Rat>::identity(w);
        for pos in [(0i64, 0i64), (1, 2), (0, -1)] {
            // Accumulate -2 onto the diagonal 1 to flip it to -1.
            v.add_entry(pos, pos, rat(-2, 1));
        }
        let vu = v.mul(&build_u(w)).unwrap();
        let pm = ProjectionMask::from_columns(&p, w, U_GUARD);
        assert_eq!(compression_index(&vu, &pm).unwrap().index(), 1);
    }

    #[test]
    fn index_is_additive_on_block_sums() {
        // P2 copy (+1) next to a P1 copy (-1): the direct sum must carry 0.
        let w = PlaneWindow::square(10);
        let u = build_u(w);
        let big = SparseMat::block_diag(&[u.mat(), u.mat()]);
        let bigf = big.to_f64();
        let dim = w.dim();
        let p2 = ProjectionMask::from_columns(
            &ColumnProjection::new(PFamily::P2, 1, []).unwrap(),
            w,
            U_GUARD,
        );
        let p1 = ProjectionMask::from_columns(
            &ColumnProjection::new(PFamily::P1, 1, []).unwrap(),
            w,
            U_GUARD,
        );
        let mask: Vec<u32> = p2
            .mask
            .iter()
            .copied()
            .chain(p1.mask.iter().map(|&f| f + dim))
            .collect();
        let inner: Vec<u32> = p2
            .inner
            .iter()
            .copied()
            .chain(p1.inner.iter().map(|&f| f + dim))
            .collect();
        let count = masked_index("sum", &big, &bigf, &mask, &inner).unwrap();
        assert_eq!(count.index(), 0);
    }

    #[test]
    fn multiplicity_copies_carry_their_signed_count() {
        for mult in [-2i64, 1, 3] {
            let cert = multiplicity_pairing(mult, 8).unwrap();
            assert_eq!(cert.index, mult);
        }
        assert!(matches!(
            multiplicity_pairing(0, 8),
            Err(FredholmError::ZeroMultiplicity)
        ));
    }

    #[test]
    fn canonical_unitary_pairs_nontrivially() {
        let cert = canonical_pairing(&rat(1, 2), &DiracSpec::generic(), 8).unwrap();
        assert_ne!(cert.index, 0);
        assert_eq!(cert.counts.0.index(), cert.counts.1.index());
    }

    #[test]
    fn rationalization_rejects_nothing_on_generators() {
        let w = PlaneWindow::square(6);
        let q = rat(1, 2);
        let a =
            crate::represent::represent(&crate::algebra::AlgebraElement::gen_alpha(&q).unwrap(), w);
        let r = rationalize_first_leg(&a, &q).unwrap();
        // Down-shift weights cancel to 1 exactly.
        for (ix, c, v) in r.entries() {
            assert_eq!(v, &Rat::one(), "at {ix:?} <- {c:?}");
        }
    }

    #[test]
    fn exceptions_outside_the_gap_are_rejected() {
        assert!(matches!(
            ColumnProjection::new(PFamily::P2, 2, [2]),
            Err(FredholmError::BadExceptions(_, 2))
        ));
    }
}
