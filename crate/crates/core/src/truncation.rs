//! Finite windows of infinite Hilbert-space operators.
//!
//! Every operator in the crate acts on one of four index geometries: the
//! quarter-plane `N x Z` (the quantum SU(2) Hilbert space), the half line
//! `N`, the full line `Z` (circle Fourier modes), and `{0,1} x N` (the even
//! sphere triple). A [`Windowed`] value stores a finite matrix over one of
//! these geometries together with a `margin`: how far truncation artifacts
//! can reach in from the artificial cuts. Entries deeper than the margin
//! coincide with the infinite operator's entries, and every exactness claim
//! in the crate is phrased on that interior.
//!
//! Margins compose: `max` under addition, `a + b + max(bandwidth)` under
//! multiplication, unchanged under adjoints and scalar multiples.

use std::fmt;

use crate::scalar::{format_rat, parse_rat, Rat, Scalar};
use crate::sparse::SparseMat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TruncationError {
    #[error("window mismatch: {0} vs {1}")]
    WindowMismatch(String, String),
    #[error("bad operator text header: {0:?}")]
    BadHeader(String),
    #[error("bad operator text entry: {0:?}")]
    BadEntry(String),
    #[error("index out of window in operator text: {0:?}")]
    OutOfWindow(String),
    #[error("interior is empty at guard {guard} for window {window}")]
    EmptyInterior { window: String, guard: u32 },
}

/// An index geometry: a finite window into a fixed infinite basis, with a
/// notion of distance from the artificial cuts.
pub trait Geometry: Clone + PartialEq + Eq + fmt::Debug {
    type Idx: Copy + Ord + fmt::Debug;

    fn dim(&self) -> u32;

    /// Flat position of an index, `None` outside the window.
    fn flat(&self, ix: Self::Idx) -> Option<u32>;

    fn unflat(&self, k: u32) -> Self::Idx;

    /// Distance from the truncation cuts. Genuine boundaries of the
    /// underlying space (the bottom of `N`, the finite `{0,1}` leg) do not
    /// count: the infinite operator really ends there.
    fn depth(&self, ix: Self::Idx) -> u32;

    /// Chebyshev displacement between two indices, ignoring finite legs.
    fn cheb(a: Self::Idx, b: Self::Idx) -> u32;

    fn describe(&self) -> String;

    /// Serialization header, margin included.
    fn header(&self, margin: u32) -> String;

    fn parse_header(line: &str) -> Result<(Self, u32), TruncationError>;

    fn fmt_idx(ix: Self::Idx) -> String;

    /// Number of whitespace tokens one index occupies in text form.
    fn idx_tokens() -> usize;

    fn parse_idx(tokens: &[&str]) -> Option<Self::Idx>;
}

/// Window `i in [0, m_row], j in [-m_col, m_col]` of the quarter plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlaneWindow {
    pub m_row: u32,
    pub m_col: u32,
}

impl PlaneWindow {
    pub fn new(m_row: u32, m_col: u32) -> Self {
        PlaneWindow { m_row, m_col }
    }

    pub fn square(m: u32) -> Self {
        PlaneWindow { m_row: m, m_col: m }
    }
}

fn parse_u32(t: &str) -> Option<u32> {
    t.parse().ok()
}

impl Geometry for PlaneWindow {
    type Idx = (i64, i64);

    fn dim(&self) -> u32 {
        (self.m_row + 1) * (2 * self.m_col + 1)
    }

    fn flat(&self, (i, j): (i64, i64)) -> Option<u32> {
        if i < 0 || i > self.m_row as i64 || j.abs() > self.m_col as i64 {
            return None;
        }
        Some(i as u32 * (2 * self.m_col + 1) + (j + self.m_col as i64) as u32)
    }

    fn unflat(&self, k: u32) -> (i64, i64) {
        let width = 2 * self.m_col + 1;
        ((k / width) as i64, (k % width) as i64 - self.m_col as i64)
    }

    fn depth(&self, (i, j): (i64, i64)) -> u32 {
        let di = self.m_row as i64 - i;
        let dj = self.m_col as i64 - j.abs();
        di.min(dj).max(0) as u32
    }

    fn cheb(a: (i64, i64), b: (i64, i64)) -> u32 {
        ((a.0 - b.0).abs().max((a.1 - b.1).abs())) as u32
    }

    fn describe(&self) -> String {
        format!("plane({}, {})", self.m_row, self.m_col)
    }

    fn header(&self, margin: u32) -> String {
        format!("window {} {} {}", self.m_row, self.m_col, margin)
    }

    fn parse_header(line: &str) -> Result<(Self, u32), TruncationError> {
        let t: Vec<&str> = line.split_whitespace().collect();
        match t.as_slice() {
            ["window", a, b, m] => {
                let (Some(m_row), Some(m_col), Some(margin)) =
                    (parse_u32(a), parse_u32(b), parse_u32(m))
                else {
                    return Err(TruncationError::BadHeader(line.to_string()));
                };
                Ok((PlaneWindow { m_row, m_col }, margin))
            }
            _ => Err(TruncationError::BadHeader(line.to_string())),
        }
    }

    fn fmt_idx((i, j): (i64, i64)) -> String {
        format!("{i} {j}")
    }

    fn idx_tokens() -> usize {
        2
    }

    fn parse_idx(tokens: &[&str]) -> Option<(i64, i64)> {
        Some((tokens[0].parse().ok()?, tokens[1].parse().ok()?))
    }
}

/// Window `n in [0, m]` of the half line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfLineWindow {
    pub m: u32,
}

impl Geometry for HalfLineWindow {
    type Idx = i64;

    fn dim(&self) -> u32 {
        self.m + 1
    }

    fn flat(&self, n: i64) -> Option<u32> {
        if n < 0 || n > self.m as i64 {
            None
        } else {
            Some(n as u32)
        }
    }

    fn unflat(&self, k: u32) -> i64 {
        k as i64
    }

    fn depth(&self, n: i64) -> u32 {
        (self.m as i64 - n).max(0) as u32
    }

    fn cheb(a: i64, b: i64) -> u32 {
        (a - b).unsigned_abs() as u32
    }

    fn describe(&self) -> String {
        format!("halfline({})", self.m)
    }

    fn header(&self, margin: u32) -> String {
        format!("halfline {} {}", self.m, margin)
    }

    fn parse_header(line: &str) -> Result<(Self, u32), TruncationError> {
        let t: Vec<&str> = line.split_whitespace().collect();
        match t.as_slice() {
            ["halfline", a, m] => match (parse_u32(a), parse_u32(m)) {
                (Some(mm), Some(margin)) => Ok((HalfLineWindow { m: mm }, margin)),
                _ => Err(TruncationError::BadHeader(line.to_string())),
            },
            _ => Err(TruncationError::BadHeader(line.to_string())),
        }
    }

    fn fmt_idx(n: i64) -> String {
        format!("{n}")
    }

    fn idx_tokens() -> usize {
        1
    }

    fn parse_idx(tokens: &[&str]) -> Option<i64> {
        tokens[0].parse().ok()
    }
}

/// Window `n in [-m, m]` of the full line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZWindow {
    pub m: u32,
}

impl Geometry for ZWindow {
    type Idx = i64;

    fn dim(&self) -> u32 {
        2 * self.m + 1
    }

    fn flat(&self, n: i64) -> Option<u32> {
        if n.abs() > self.m as i64 {
            None
        } else {
            Some((n + self.m as i64) as u32)
        }
    }

    fn unflat(&self, k: u32) -> i64 {
        k as i64 - self.m as i64
    }

    fn depth(&self, n: i64) -> u32 {
        (self.m as i64 - n.abs()).max(0) as u32
    }

    fn cheb(a: i64, b: i64) -> u32 {
        (a - b).unsigned_abs() as u32
    }

    fn describe(&self) -> String {
        format!("zline({})", self.m)
    }

    fn header(&self, margin: u32) -> String {
        format!("zline {} {}", self.m, margin)
    }

    fn parse_header(line: &str) -> Result<(Self, u32), TruncationError> {
        let t: Vec<&str> = line.split_whitespace().collect();
        match t.as_slice() {
            ["zline", a, m] => match (parse_u32(a), parse_u32(m)) {
                (Some(mm), Some(margin)) => Ok((ZWindow { m: mm }, margin)),
                _ => Err(TruncationError::BadHeader(line.to_string())),
            },
            _ => Err(TruncationError::BadHeader(line.to_string())),
        }
    }

    fn fmt_idx(n: i64) -> String {
        format!("{n}")
    }

    fn idx_tokens() -> usize {
        1
    }

    fn parse_idx(tokens: &[&str]) -> Option<i64> {
        tokens[0].parse().ok()
    }
}

/// Window `(s, n) in {0,1} x [0, m]`: two half-line legs, the doubled space
/// of the even sphere triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvenWindow {
    pub m: u32,
}

impl Geometry for EvenWindow {
    type Idx = (i64, i64);

    fn dim(&self) -> u32 {
        2 * (self.m + 1)
    }

    fn flat(&self, (s, n): (i64, i64)) -> Option<u32> {
        if !(0..=1).contains(&s) || n < 0 || n > self.m as i64 {
            return None;
        }
        Some(s as u32 * (self.m + 1) + n as u32)
    }

    fn unflat(&self, k: u32) -> (i64, i64) {
        ((k / (self.m + 1)) as i64, (k % (self.m + 1)) as i64)
    }

    fn depth(&self, (_, n): (i64, i64)) -> u32 {
        (self.m as i64 - n).max(0) as u32
    }

    fn cheb(a: (i64, i64), b: (i64, i64)) -> u32 {
        // The two-point leg is genuine structure, not a truncation axis.
        (a.1 - b.1).unsigned_abs() as u32
    }

    fn describe(&self) -> String {
        format!("even({})", self.m)
    }

    fn header(&self, margin: u32) -> String {
        format!("even {} {}", self.m, margin)
    }

    fn parse_header(line: &str) -> Result<(Self, u32), TruncationError> {
        let t: Vec<&str> = line.split_whitespace().collect();
        match t.as_slice() {
            ["even", a, m] => match (parse_u32(a), parse_u32(m)) {
                (Some(mm), Some(margin)) => Ok((EvenWindow { m: mm }, margin)),
                _ => Err(TruncationError::BadHeader(line.to_string())),
            },
            _ => Err(TruncationError::BadHeader(line.to_string())),
        }
    }

    fn fmt_idx((s, n): (i64, i64)) -> String {
        format!("{s} {n}")
    }

    fn idx_tokens() -> usize {
        2
    }

    fn parse_idx(tokens: &[&str]) -> Option<(i64, i64)> {
        Some((tokens[0].parse().ok()?, tokens[1].parse().ok()?))
    }
}

/// First index-row/index-column mismatch found on an interior comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteriorMismatch<Ix> {
    pub row: Ix,
    pub col: Ix,
    pub left: String,
    pub right: String,
}

/// A finite window of an operator, with margin bookkeeping.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Windowed<G: Geometry, T> {
    geom: G,
    margin: u32,
    mat: SparseMat<T>,
}

pub type TruncatedOperator<T> = Windowed<PlaneWindow, T>;
pub type HalfLineOp<T> = Windowed<HalfLineWindow, T>;
pub type ZLineOp<T> = Windowed<ZWindow, T>;
pub type EvenOp<T> = Windowed<EvenWindow, T>;

impl<G: Geometry, T: Scalar> Windowed<G, T> {
    pub fn zero(geom: G) -> Self {
        let mat = SparseMat::new(geom.dim(), geom.dim());
        Windowed {
            geom,
            margin: 0,
            mat,
        }
    }

    pub fn identity(geom: G) -> Self {
        let mat = SparseMat::identity(geom.dim());
        Windowed {
            geom,
            margin: 0,
            mat,
        }
    }

    pub fn from_mat(geom: G, margin: u32, mat: SparseMat<T>) -> Self {
        assert_eq!(mat.nrows(), geom.dim());
        assert_eq!(mat.ncols(), geom.dim());
        Windowed { geom, margin, mat }
    }

    /// Builds a diagonal operator from an index function; margin 0.
    pub fn diagonal(geom: G, f: impl Fn(G::Idx) -> T) -> Self {
        let mut mat = SparseMat::new(geom.dim(), geom.dim());
        for k in 0..geom.dim() {
            let v = f(geom.unflat(k));
            mat.add_entry(k, k, v);
        }
        Windowed {
            geom,
            margin: 0,
            mat,
        }
    }

    pub fn geom(&self) -> &G {
        &self.geom
    }

    pub fn margin(&self) -> u32 {
        self.margin
    }

    pub fn mat(&self) -> &SparseMat<T> {
        &self.mat
    }

    pub fn with_margin(mut self, margin: u32) -> Self {
        self.margin = margin;
        self
    }

    /// Inserts `v` at `(row, col)` in index coordinates. Indices outside the
    /// window are dropped: that is what truncation means.
    pub fn add_entry(&mut self, row: G::Idx, col: G::Idx, v: T) {
        if let (Some(r), Some(c)) = (self.geom.flat(row), self.geom.flat(col)) {
            self.mat.add_entry(r, c, v);
        }
    }

    pub fn get(&self, row: G::Idx, col: G::Idx) -> Option<&T> {
        let r = self.geom.flat(row)?;
        let c = self.geom.flat(col)?;
        self.mat.get(r, c)
    }

    pub fn entries(&self) -> impl Iterator<Item = (G::Idx, G::Idx, &T)> {
        self.mat
            .iter()
            .map(|(&(r, c), v)| (self.geom.unflat(r), self.geom.unflat(c), v))
    }

    /// Largest index displacement among stored entries.
    pub fn bandwidth(&self) -> u32 {
        self.mat
            .iter()
            .map(|(&(r, c), _)| G::cheb(self.geom.unflat(r), self.geom.unflat(c)))
            .max()
            .unwrap_or(0)
    }

    pub fn check_same_window(&self, rhs: &Self) -> Result<(), TruncationError> {
        if self.geom != rhs.geom {
            return Err(TruncationError::WindowMismatch(
                self.geom.describe(),
                rhs.geom.describe(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, TruncationError> {
        self.check_same_window(rhs)?;
        Ok(Windowed {
            geom: self.geom.clone(),
            margin: self.margin.max(rhs.margin),
            mat: &self.mat + &rhs.mat,
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, TruncationError> {
        self.check_same_window(rhs)?;
        Ok(Windowed {
            geom: self.geom.clone(),
            margin: self.margin.max(rhs.margin),
            mat: &self.mat - &rhs.mat,
        })
    }

    /// Composition. An intermediate index in the product sum lies within
    /// bandwidth of both endpoints, so at depth >= max(margins) +
    /// min(bandwidths) every contributing index is in the window and both
    /// factor entries there are exact. Requires the stored patterns to
    /// witness the factors' true bands, which all builders here do.
    pub fn mul(&self, rhs: &Self) -> Result<Self, TruncationError> {
        self.check_same_window(rhs)?;
        let margin = self.margin.max(rhs.margin) + self.bandwidth().min(rhs.bandwidth());
        Ok(Windowed {
            geom: self.geom.clone(),
            margin,
            mat: &self.mat * &rhs.mat,
        })
    }

    pub fn neg(&self) -> Self {
        Windowed {
            geom: self.geom.clone(),
            margin: self.margin,
            mat: -&self.mat,
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        Windowed {
            geom: self.geom.clone(),
            margin: self.margin,
            mat: self.mat.scale(s),
        }
    }

    pub fn scale_rat(&self, s: &Rat) -> Self {
        Windowed {
            geom: self.geom.clone(),
            margin: self.margin,
            mat: self.mat.scale_rat(s),
        }
    }

    pub fn adjoint(&self) -> Self {
        Windowed {
            geom: self.geom.clone(),
            margin: self.margin,
            mat: self.mat.adjoint(),
        }
    }

    pub fn map_scalar<T2: Scalar>(&self, f: impl Fn(&T) -> T2) -> Windowed<G, T2> {
        Windowed {
            geom: self.geom.clone(),
            margin: self.margin,
            mat: self.mat.map(f),
        }
    }

    pub fn op_norm(&self) -> f64 {
        self.mat.op_norm_f64()
    }

    /// Norm of the composition with the coordinate projection selected by
    /// `keep_col` (a tail projection, an ideal cut, and so on).
    pub fn column_restricted_norm(&self, keep_col: impl Fn(G::Idx) -> bool) -> f64 {
        let geom = &self.geom;
        self.mat
            .filtered(|_| true, |c| keep_col(geom.unflat(c)))
            .op_norm_f64()
    }

    /// Entries whose row and column both lie at depth >= `guard`.
    pub fn interior_filtered(&self, guard: u32) -> Self {
        let geom = self.geom.clone();
        let mat = self.mat.filtered(
            |r| geom.depth(geom.unflat(r)) >= guard,
            |c| geom.depth(geom.unflat(c)) >= guard,
        );
        Windowed {
            geom: self.geom.clone(),
            margin: self.margin,
            mat,
        }
    }

    fn interior_nonempty(&self, guard: u32) -> bool {
        (0..self.geom.dim()).any(|k| self.geom.depth(self.geom.unflat(k)) >= guard)
    }

    /// Exact equality of interior entries, at guard
    /// `max(self.margin, rhs.margin)`. An empty interior is an error, never
    /// a vacuous pass.
    pub fn eq_on_interior(
        &self,
        rhs: &Self,
    ) -> Result<Result<(), InteriorMismatch<G::Idx>>, TruncationError> {
        let guard = self.margin.max(rhs.margin);
        self.eq_on_interior_with(rhs, guard)
    }

    pub fn eq_on_interior_with(
        &self,
        rhs: &Self,
        guard: u32,
    ) -> Result<Result<(), InteriorMismatch<G::Idx>>, TruncationError> {
        self.check_same_window(rhs)?;
        if !self.interior_nonempty(guard) {
            return Err(TruncationError::EmptyInterior {
                window: self.geom.describe(),
                guard,
            });
        }
        let diff = &self.interior_filtered(guard).mat - &rhs.interior_filtered(guard).mat;
        if let Some((&(r, c), _)) = diff.iter().next() {
            let (row, col) = (self.geom.unflat(r), self.geom.unflat(c));
            let show = |m: &SparseMat<T>| {
                m.get(r, c)
                    .map(|v| format!("{v:?}"))
                    .unwrap_or_else(|| "0".to_string())
            };
            return Ok(Err(InteriorMismatch {
                row,
                col,
                left: show(&self.mat),
                right: show(&rhs.mat),
            }));
        }
        Ok(Ok(()))
    }

    /// True when every interior entry vanishes; errors on empty interiors.
    pub fn is_zero_on_interior(&self, guard: u32) -> Result<bool, TruncationError> {
        if !self.interior_nonempty(guard) {
            return Err(TruncationError::EmptyInterior {
                window: self.geom.describe(),
                guard,
            });
        }
        Ok(self.interior_filtered(guard).mat.is_zero_mat())
    }
}

impl<G: Geometry> Windowed<G, Rat> {
    /// Plain-text form: a header line, then one line per entry in row-major
    /// order, `row-index col-index numerator denominator`. Bit-exact
    /// round-trips.
    pub fn to_text(&self) -> String {
        let mut out = self.geom.header(self.margin);
        out.push('\n');
        for (&(r, c), v) in self.mat.iter() {
            let ri = G::fmt_idx(self.geom.unflat(r));
            let ci = G::fmt_idx(self.geom.unflat(c));
            out.push_str(&format!("{ri} {ci} {}\n", format_rat(v)));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, TruncationError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| TruncationError::BadHeader(String::new()))?;
        let (geom, margin) = G::parse_header(header)?;
        let mut mat = SparseMat::new(geom.dim(), geom.dim());
        let k = G::idx_tokens();
        for line in lines {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 2 * k + 1 {
                return Err(TruncationError::BadEntry(line.to_string()));
            }
            let row = G::parse_idx(&tokens[0..k])
                .ok_or_else(|| TruncationError::BadEntry(line.to_string()))?;
            let col = G::parse_idx(&tokens[k..2 * k])
                .ok_or_else(|| TruncationError::BadEntry(line.to_string()))?;
            let v = parse_rat(tokens[2 * k])
                .map_err(|_| TruncationError::BadEntry(line.to_string()))?;
            let (Some(r), Some(c)) = (geom.flat(row), geom.flat(col)) else {
                return Err(TruncationError::OutOfWindow(line.to_string()));
            };
            mat.add_entry(r, c, v);
        }
        Ok(Windowed { geom, margin, mat })
    }
}

impl<T: Scalar> TruncatedOperator<T> {
    /// Norms of the compositions with the projections onto
    /// `{e_{i,j} : i > M or |j| > M}` for each cut `M`; decaying profiles
    /// certify compactness at evidence level.
    pub fn tail_norm_profile(&self, cuts: &[u32]) -> Vec<f64> {
        cuts.iter()
            .map(|&m| self.column_restricted_norm(|(i, j)| i > m as i64 || j.abs() > m as i64))
            .collect()
    }

    /// Same, but cutting only the first leg: `{e_{i,j} : i > M}`. Operators
    /// in the shift ideal die along this direction regardless of `j`.
    pub fn tail_norm_profile_first_leg(&self, cuts: &[u32]) -> Vec<f64> {
        cuts.iter()
            .map(|&m| self.column_restricted_norm(|(i, _)| i > m as i64))
            .collect()
    }
}

impl<T: Scalar> HalfLineOp<T> {
    pub fn tail_norm_profile(&self, cuts: &[u32]) -> Vec<f64> {
        cuts.iter()
            .map(|&m| self.column_restricted_norm(|n| n > m as i64))
            .collect()
    }
}

impl<T: Scalar> EvenOp<T> {
    pub fn tail_norm_profile(&self, cuts: &[u32]) -> Vec<f64> {
        cuts.iter()
            .map(|&m| self.column_restricted_norm(|(_, n)| n > m as i64))
            .collect()
    }
}

/// Decay verdict over a tail profile: every cut doubling must shrink the
/// norm by at least `factor` (vanishing profiles pass outright).
pub fn tail_decay_pass(profile: &[f64], factor: f64) -> bool {
    if profile.iter().all(|&v| v <= 1e-12) {
        return true;
    }
    profile.windows(2).all(|w| {
        let (a, b) = (w[0], w[1]);
        b <= 1e-12 || a >= factor * b
    })
}

// Elementary operators on the plane window. Shifts carry margin 1 (the row
// just inside a cut misses its out-of-window source), diagonals margin 0.

/// First-leg down shift: `e_{i,j} -> e_{i-1,j}`.
pub fn shift_n<T: Scalar>(w: PlaneWindow) -> TruncatedOperator<T> {
    let mut op = Windowed::zero(w).with_margin(1);
    for i in 1..=w.m_row as i64 {
        for j in -(w.m_col as i64)..=w.m_col as i64 {
            op.add_entry((i - 1, j), (i, j), T::one());
        }
    }
    op
}

/// Second-leg down shift: `e_{i,j} -> e_{i,j-1}`.
pub fn shift_z<T: Scalar>(w: PlaneWindow) -> TruncatedOperator<T> {
    let mut op = Windowed::zero(w).with_margin(1);
    for i in 0..=w.m_row as i64 {
        for j in (1 - (w.m_col as i64))..=w.m_col as i64 {
            op.add_entry((i, j - 1), (i, j), T::one());
        }
    }
    op
}

/// Diagonal `i` (first-leg number operator).
pub fn number_n<T: Scalar>(w: PlaneWindow) -> TruncatedOperator<T> {
    Windowed::diagonal(w, |(i, _)| T::from_i64(i))
}

/// Diagonal `j` (second-leg number operator).
pub fn number_z<T: Scalar>(w: PlaneWindow) -> TruncatedOperator<T> {
    Windowed::diagonal(w, |(_, j)| T::from_i64(j))
}

/// Diagonal `q^i`.
pub fn q_pow_n<T: Scalar>(w: PlaneWindow, q: &Rat) -> TruncatedOperator<T> {
    Windowed::diagonal(w, |(i, _)| T::from_rat(&crate::scalar::rat_pow(q, i)))
}

/// Diagonal sign of the second leg, `+1` for `j >= 0`, `-1` for `j < 0`.
pub fn sign_s<T: Scalar>(w: PlaneWindow) -> TruncatedOperator<T> {
    Windowed::diagonal(w, |(_, j)| if j >= 0 { T::one() } else { -T::one() })
}

/// `|target><source|`; margin 0, a fixed finite-rank operator.
pub fn rank_one<T: Scalar>(
    w: PlaneWindow,
    target: (i64, i64),
    source: (i64, i64),
) -> TruncatedOperator<T> {
    let mut op = Windowed::zero(w);
    op.add_entry(target, source, T::one());
    op
}

// Elementary operators on the half line and the full line.

/// Half-line down shift `e_n -> e_{n-1}`.
pub fn hl_shift<T: Scalar>(m: u32) -> HalfLineOp<T> {
    let mut op = Windowed::zero(HalfLineWindow { m }).with_margin(1);
    for n in 1..=m as i64 {
        op.add_entry(n - 1, n, T::one());
    }
    op
}

/// Half-line number operator, diagonal `n`.
pub fn hl_number<T: Scalar>(m: u32) -> HalfLineOp<T> {
    Windowed::diagonal(HalfLineWindow { m }, |n| T::from_i64(n))
}

pub fn hl_diagonal<T: Scalar>(m: u32, f: impl Fn(i64) -> T) -> HalfLineOp<T> {
    Windowed::diagonal(HalfLineWindow { m }, f)
}

pub fn hl_rank_one<T: Scalar>(m: u32, target: i64, source: i64) -> HalfLineOp<T> {
    let mut op = Windowed::zero(HalfLineWindow { m });
    op.add_entry(target, source, T::one());
    op
}

/// Full-line up shift `e_n -> e_{n+1}` (multiplication by the generating
/// Fourier mode).
pub fn z_shift_up<T: Scalar>(m: u32) -> ZLineOp<T> {
    let mut op = Windowed::zero(ZWindow { m }).with_margin(1);
    let mm = m as i64;
    for n in -mm..mm {
        op.add_entry(n + 1, n, T::one());
    }
    op
}

/// Full-line number operator, diagonal `n`.
pub fn z_number<T: Scalar>(m: u32) -> ZLineOp<T> {
    Windowed::diagonal(ZWindow { m }, |n| T::from_i64(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    #[test]
    fn plane_flat_round_trips() {
        let w = PlaneWindow::new(3, 2);
        assert_eq!(w.dim(), 20);
        for k in 0..w.dim() {
            let ix = w.unflat(k);
            assert_eq!(w.flat(ix), Some(k));
        }
        assert_eq!(w.flat((4, 0)), None);
        assert_eq!(w.flat((0, 3)), None);
        assert_eq!(w.flat((-1, 0)), None);
    }

    #[test]
    fn plane_depth_ignores_genuine_boundary() {
        let w = PlaneWindow::new(4, 4);
        // Bottom row is not an artificial cut: depth is governed by the
        // distance to the top and side cuts only.
        assert_eq!(w.depth((0, 0)), 4);
        assert_eq!(w.depth((4, 0)), 0);
        assert_eq!(w.depth((2, -4)), 0);
        assert_eq!(w.depth((1, 3)), 1);
    }

    #[test]
    fn shifts_compose_with_margin_growth() {
        let w = PlaneWindow::new(5, 5);
        let a = shift_n::<Rat>(w);
        let b = shift_z::<Rat>(w);
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab.margin(), 2); // max margin 1 + min bandwidth 1
        assert_eq!(ab.get((0, 0), (1, 1)), Some(&rat_int(1)));
        // Second-leg shift and its adjoint commute with the first-leg shift.
        let ba = b.mul(&a).unwrap();
        assert!(ab.eq_on_interior(&ba).unwrap().is_ok());
    }

    #[test]
    fn shift_adjoint_is_up_shift() {
        let a = shift_n::<Rat>(PlaneWindow::new(4, 2)).adjoint();
        assert_eq!(a.get((3, 0), (2, 0)), Some(&rat_int(1)));
        assert_eq!(a.get((2, 0), (3, 0)), None);
    }

    #[test]
    fn number_and_shift_commutator_is_minus_shift() {
        // [number_n, shift_n] = -shift_n away from the cut.
        let w = PlaneWindow::new(6, 2);
        let n = number_n::<Rat>(w);
        let l = shift_n::<Rat>(w);
        let comm = n.mul(&l).unwrap().sub(&l.mul(&n).unwrap()).unwrap();
        assert!(comm.eq_on_interior(&l.neg()).unwrap().is_ok());
    }

    #[test]
    fn empty_interior_is_an_error_not_a_pass() {
        let w = PlaneWindow::new(2, 2);
        let a = number_n::<Rat>(w);
        let e = a.eq_on_interior_with(&a, 5).unwrap_err();
        assert!(matches!(e, TruncationError::EmptyInterior { .. }));
    }

    #[test]
    fn text_round_trip_is_exact() {
        let w = PlaneWindow::new(3, 3);
        let op = q_pow_n::<Rat>(w, &rat(2, 3))
            .mul(&shift_z::<Rat>(w))
            .unwrap();
        let text = op.to_text();
        let back = TruncatedOperator::<Rat>::from_text(&text).unwrap();
        assert_eq!(op, back);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn text_rejects_malformed_input() {
        assert!(TruncatedOperator::<Rat>::from_text("nonsense 1 2 3").is_err());
        let bad_entry = "window 2 2 0\n0 0 0 nonsense\n";
        assert!(TruncatedOperator::<Rat>::from_text(bad_entry).is_err());
        let out_of_window = "window 2 2 0\n9 0 0 0 1/1\n";
        assert!(matches!(
            TruncatedOperator::<Rat>::from_text(out_of_window),
            Err(TruncationError::OutOfWindow(_))
        ));
    }

    #[test]
    fn tail_profile_of_q_diagonal_decays() {
        let w = PlaneWindow::new(32, 4);
        let op = q_pow_n::<f64>(w, &rat(1, 2));
        let profile = op.tail_norm_profile(&[4, 8, 16]);
        assert!(profile[0] > profile[1] && profile[1] > profile[2]);
        assert!(tail_decay_pass(&profile, 2.0));
        // The identity's tails never decay.
        let id = TruncatedOperator::<f64>::identity(w);
        assert!(!tail_decay_pass(&id.tail_norm_profile(&[4, 8, 16]), 2.0));
    }

    #[test]
    fn zline_and_even_geometry_round_trip() {
        let z = ZWindow { m: 3 };
        for k in 0..z.dim() {
            assert_eq!(z.flat(z.unflat(k)), Some(k));
        }
        let e = EvenWindow { m: 3 };
        for k in 0..e.dim() {
            assert_eq!(e.flat(e.unflat(k)), Some(k));
        }
        assert_eq!(e.flat((1, 0)), Some(4));
        assert_eq!(e.flat((2, 0)), None);
    }

    #[test]
    fn halfline_serialization_round_trips() {
        let op = hl_shift::<Rat>(4);
        let text = op.to_text();
        assert!(text.starts_with("halfline 4 1\n"));
        let back = HalfLineOp::<Rat>::from_text(&text).unwrap();
        assert_eq!(op, back);
    }

    #[test]
    fn window_mismatch_is_rejected() {
        let a = number_n::<Rat>(PlaneWindow::new(3, 3));
        let b = number_n::<Rat>(PlaneWindow::new(4, 3));
        assert!(matches!(
            a.add(&b),
            Err(TruncationError::WindowMismatch(_, _))
        ));
    }
}
