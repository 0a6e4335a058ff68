//! Sparse matrices over an arbitrary [`Scalar`], with the three kernels the
//! rest of the crate leans on: exact multiplication, exact rank by fraction-
//! free-style elimination over a field, and a deterministic power-iteration
//! operator norm for floating certificates.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{FieldScalar, Rat, Scalar};

/// Row-major sparse matrix; absent entries are zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SparseMat<T> {
    nrows: u32,
    ncols: u32,
    entries: BTreeMap<(u32, u32), T>,
}

impl<T: Scalar> SparseMat<T> {
    pub fn new(nrows: u32, ncols: u32) -> Self {
        SparseMat {
            nrows,
            ncols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: u32) -> Self {
        let mut m = SparseMat::new(n, n);
        for i in 0..n {
            m.entries.insert((i, i), T::one());
        }
        m
    }

    pub fn nrows(&self) -> u32 {
        self.nrows
    }

    pub fn ncols(&self) -> u32 {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, r: u32, c: u32) -> Option<&T> {
        self.entries.get(&(r, c))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u32, u32), &T)> {
        self.entries.iter()
    }

    /// Accumulates `v` into entry `(r, c)`, dropping exact zeros.
    pub fn add_entry(&mut self, r: u32, c: u32, v: T) {
        assert!(r < self.nrows && c < self.ncols, "entry out of bounds");
        if v.is_zero() {
            return;
        }
        match self.entries.entry((r, c)) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(v);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().clone() + v;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn set_entry(&mut self, r: u32, c: u32, v: T) {
        assert!(r < self.nrows && c < self.ncols, "entry out of bounds");
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn map<T2: Scalar>(&self, f: impl Fn(&T) -> T2) -> SparseMat<T2> {
        let mut m = SparseMat::new(self.nrows, self.ncols);
        for (&(r, c), v) in &self.entries {
            m.add_entry(r, c, f(v));
        }
        m
    }

    pub fn to_f64(&self) -> SparseMat<f64> {
        self.map(|v| v.to_f64())
    }

    pub fn transpose(&self) -> Self {
        let mut m = SparseMat::new(self.ncols, self.nrows);
        for (&(r, c), v) in &self.entries {
            m.entries.insert((c, r), v.clone());
        }
        m
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = SparseMat::new(self.ncols, self.nrows);
        for (&(r, c), v) in &self.entries {
            m.entries.insert((c, r), v.conj());
        }
        m
    }

    pub fn scale(&self, s: &T) -> Self {
        let mut m = SparseMat::new(self.nrows, self.ncols);
        for (&(r, c), v) in &self.entries {
            m.add_entry(r, c, v.clone() * s.clone());
        }
        m
    }

    pub fn scale_rat(&self, s: &Rat) -> Self {
        let mut m = SparseMat::new(self.nrows, self.ncols);
        for (&(r, c), v) in &self.entries {
            m.add_entry(r, c, v.mul_rat(s));
        }
        m
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.ncols, rhs.nrows, "dimension mismatch in matmul");
        // Group the right factor by row once, then scatter.
        let mut rhs_rows: BTreeMap<u32, Vec<(u32, &T)>> = BTreeMap::new();
        for (&(r, c), v) in &rhs.entries {
            rhs_rows.entry(r).or_default().push((c, v));
        }
        let mut out = SparseMat::new(self.nrows, rhs.ncols);
        for (&(r, k), a) in &self.entries {
            if let Some(row) = rhs_rows.get(&k) {
                for &(c, b) in row {
                    out.add_entry(r, c, a.clone() * b.clone());
                }
            }
        }
        out
    }

    /// Entrywise filter keeping dimensions; used for interior and tail cuts.
    pub fn filtered(&self, keep_row: impl Fn(u32) -> bool, keep_col: impl Fn(u32) -> bool) -> Self {
        let mut m = SparseMat::new(self.nrows, self.ncols);
        for (&(r, c), v) in &self.entries {
            if keep_row(r) && keep_col(c) {
                m.entries.insert((r, c), v.clone());
            }
        }
        m
    }

    /// Reindexed submatrix on explicit row and column lists.
    pub fn submatrix(&self, rows: &[u32], cols: &[u32]) -> Self {
        let rmap: BTreeMap<u32, u32> = rows
            .iter()
            .enumerate()
            .map(|(i, &r)| (r, i as u32))
            .collect();
        let cmap: BTreeMap<u32, u32> = cols
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i as u32))
            .collect();
        let mut m = SparseMat::new(rows.len() as u32, cols.len() as u32);
        for (&(r, c), v) in &self.entries {
            if let (Some(&ri), Some(&ci)) = (rmap.get(&r), cmap.get(&c)) {
                m.entries.insert((ri, ci), v.clone());
            }
        }
        m
    }

    /// Largest Chebyshev displacement `max(|r - c|)` over stored entries;
    /// zero for diagonal matrices. Operator wrappers translate this into
    /// their own index geometry before using it in margin bookkeeping.
    pub fn flat_bandwidth(&self) -> u32 {
        self.entries
            .keys()
            .map(|&(r, c)| r.abs_diff(c))
            .max()
            .unwrap_or(0)
    }

    /// Block-diagonal stack of `blocks`.
    pub fn block_diag(blocks: &[&SparseMat<T>]) -> Self {
        let nrows = blocks.iter().map(|b| b.nrows).sum();
        let ncols = blocks.iter().map(|b| b.ncols).sum();
        let mut m = SparseMat::new(nrows, ncols);
        let (mut ro, mut co) = (0u32, 0u32);
        for b in blocks {
            for (&(r, c), v) in &b.entries {
                m.entries.insert((ro + r, co + c), v.clone());
            }
            ro += b.nrows;
            co += b.ncols;
        }
        m
    }

    /// `[[a, b], [c, d]]` with equal block dimensions.
    pub fn from_blocks_2x2(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let (nr, nc) = (a.nrows, a.ncols);
        for m in [b, c, d] {
            assert!(m.nrows == nr && m.ncols == nc, "block dimension mismatch");
        }
        let mut out = SparseMat::new(2 * nr, 2 * nc);
        for (src, ro, co) in [(a, 0, 0), (b, 0, nc), (c, nr, 0), (d, nr, nc)] {
            for (&(r, cc), v) in &src.entries {
                out.entries.insert((ro + r, co + cc), v.clone());
            }
        }
        out
    }

    pub fn is_zero_mat(&self) -> bool {
        self.entries.is_empty()
    }

    /// Operator norm of the float shadow; see [`SparseMat::op_norm`].
    pub fn op_norm_f64(&self) -> f64 {
        self.to_f64().op_norm()
    }
}

impl<T: Scalar> Add for &SparseMat<T> {
    type Output = SparseMat<T>;
    fn add(self, rhs: Self) -> SparseMat<T> {
        assert!(
            self.nrows == rhs.nrows && self.ncols == rhs.ncols,
            "dimension mismatch in add"
        );
        let mut out = self.clone();
        for (&(r, c), v) in &rhs.entries {
            out.add_entry(r, c, v.clone());
        }
        out
    }
}

impl<T: Scalar> Sub for &SparseMat<T> {
    type Output = SparseMat<T>;
    fn sub(self, rhs: Self) -> SparseMat<T> {
        self + &(-rhs)
    }
}

impl<T: Scalar> Neg for &SparseMat<T> {
    type Output = SparseMat<T>;
    fn neg(self) -> SparseMat<T> {
        self.map(|v| -v.clone())
    }
}

impl<T: Scalar> Mul for &SparseMat<T> {
    type Output = SparseMat<T>;
    fn mul(self, rhs: Self) -> SparseMat<T> {
        self.matmul(rhs)
    }
}

impl<T: FieldScalar> SparseMat<T> {
    /// Exact rank by sparse Gaussian elimination.
    ///
    /// Pivot selection is sparsity-driven (shortest active row, then the
    /// column touching fewest other rows), which keeps fill near zero on the
    /// banded and shift-like matrices this crate produces.
    pub fn rank_exact(&self) -> usize {
        let mut rows: Vec<BTreeMap<u32, T>> = Vec::new();
        let mut by_row: BTreeMap<u32, BTreeMap<u32, T>> = BTreeMap::new();
        for (&(r, c), v) in &self.entries {
            by_row.entry(r).or_default().insert(c, v.clone());
        }
        for (_, row) in by_row {
            rows.push(row);
        }
        let mut rank = 0usize;
        let mut active: Vec<usize> = (0..rows.len()).collect();
        while !active.is_empty() {
            // Shortest active row.
            let (pos, &pr) = active
                .iter()
                .enumerate()
                .min_by_key(|(_, &i)| rows[i].len())
                .unwrap();
            if rows[pr].is_empty() {
                active.swap_remove(pos);
                continue;
            }
            // Among its columns, the one hitting fewest other active rows.
            let pc = {
                let candidates: Vec<u32> = rows[pr].keys().copied().collect();
                candidates
                    .into_iter()
                    .min_by_key(|c| {
                        active
                            .iter()
                            .filter(|&&i| i != pr && rows[i].contains_key(c))
                            .count()
                    })
                    .unwrap()
            };
            let pivot_row = rows[pr].clone();
            let pivot_val = pivot_row.get(&pc).unwrap().clone();
            let pivot_inv = pivot_val.try_inv().expect("nonzero pivot");
            active.swap_remove(pos);
            rank += 1;
            for &i in &active {
                let Some(f) = rows[i].get(&pc).cloned() else {
                    continue;
                };
                let factor = f * pivot_inv.clone();
                for (&c, v) in &pivot_row {
                    let delta = -(factor.clone() * v.clone());
                    match rows[i].entry(c) {
                        std::collections::btree_map::Entry::Vacant(e) => {
                            if !delta.is_zero() {
                                e.insert(delta);
                            }
                        }
                        std::collections::btree_map::Entry::Occupied(mut e) => {
                            let s = e.get().clone() + delta;
                            if s.is_zero() {
                                e.remove();
                            } else {
                                *e.get_mut() = s;
                            }
                        }
                    }
                }
                debug_assert!(!rows[i].contains_key(&pc));
            }
        }
        rank
    }
}

impl SparseMat<f64> {
    /// Numerical rank with an absolute pivot threshold.
    ///
    /// Full-magnitude pivoting; elimination stops when every remaining entry
    /// sits below `tol`.
    pub fn rank_f64(&self, tol: f64) -> usize {
        let mut by_row: BTreeMap<u32, BTreeMap<u32, f64>> = BTreeMap::new();
        for (&(r, c), v) in &self.entries {
            by_row.entry(r).or_default().insert(c, *v);
        }
        let mut rows: Vec<BTreeMap<u32, f64>> = by_row.into_values().collect();
        let mut active: Vec<usize> = (0..rows.len()).collect();
        let mut rank = 0usize;
        loop {
            let mut best: Option<(usize, u32, f64)> = None;
            for (pos, &i) in active.iter().enumerate() {
                for (&c, v) in &rows[i] {
                    if best.is_none_or(|(_, _, b)| v.abs() > b) {
                        best = Some((pos, c, v.abs()));
                    }
                }
            }
            let Some((pos, pc, mag)) = best else { break };
            if mag < tol {
                break;
            }
            let pr = active[pos];
            let pivot_row = rows[pr].clone();
            let pivot_val = *pivot_row.get(&pc).unwrap();
            active.swap_remove(pos);
            rank += 1;
            for &i in &active {
                let Some(&f) = rows[i].get(&pc) else { continue };
                let factor = f / pivot_val;
                for (&c, v) in &pivot_row {
                    let cur = rows[i].remove(&c).unwrap_or(0.0);
                    let upd = cur - factor * v;
                    if upd.abs() > tol * 1e-3 {
                        rows[i].insert(c, upd);
                    }
                }
                rows[i].remove(&pc);
            }
        }
        rank
    }

    fn matvec(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (&(r, c), v) in &self.entries {
            out[r as usize] += v * x[c as usize];
        }
    }

    fn matvec_t(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (&(r, c), v) in &self.entries {
            out[c as usize] += v * x[r as usize];
        }
    }

    /// Largest singular value via power iteration on `A^T A`.
    ///
    /// Deterministic: the start vector is a fixed all-positive ramp, so two
    /// runs of the same binary agree bit for bit. Converges to roughly 1e-12
    /// relative accuracy, far below every certificate threshold in the
    /// crate.
    pub fn op_norm(&self) -> f64 {
        if self.entries.is_empty() {
            return 0.0;
        }
        let n = self.ncols as usize;
        let m = self.nrows as usize;
        let mut x: Vec<f64> = (0..n)
            .map(|k| 1.0 + ((k as u64).wrapping_mul(2654435761) % 4096) as f64 / 8192.0)
            .collect();
        let norm = |v: &[f64]| v.iter().map(|t| t * t).sum::<f64>().sqrt();
        let nx = norm(&x);
        x.iter_mut().for_each(|t| *t /= nx);
        let mut y = vec![0.0; m];
        let mut s = vec![0.0; n];
        let mut prev = -1.0f64;
        let mut stable = 0;
        for _ in 0..20000 {
            self.matvec(&x, &mut y);
            self.matvec_t(&y, &mut s);
            let sigma_sq: f64 = x.iter().zip(&s).map(|(a, b)| a * b).sum();
            let ns = norm(&s);
            if ns <= f64::MIN_POSITIVE {
                // Start vector fell in the kernel; the Rayleigh value so far
                // is the norm of the reachable part.
                return sigma_sq.max(0.0).sqrt();
            }
            x.iter_mut().zip(&s).for_each(|(t, v)| *t = v / ns);
            if (sigma_sq - prev).abs() <= 1e-13 * sigma_sq.abs().max(1e-30) {
                stable += 1;
                if stable >= 3 {
                    return sigma_sq.max(0.0).sqrt();
                }
            } else {
                stable = 0;
            }
            prev = sigma_sq;
        }
        prev.max(0.0).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num::traits::One;

    fn rmat(entries: &[(u32, u32, i64, i64)], nr: u32, nc: u32) -> SparseMat<Rat> {
        let mut m = SparseMat::new(nr, nc);
        for &(r, c, n, d) in entries {
            m.add_entry(r, c, rat(n, d));
        }
        m
    }

    #[test]
    fn matmul_matches_hand_product() {
        let a = rmat(&[(0, 0, 1, 1), (0, 1, 2, 1), (1, 1, 3, 1)], 2, 2);
        let b = rmat(&[(0, 0, 5, 1), (1, 0, 7, 1), (1, 1, 1, 2)], 2, 2);
        let p = &a * &b;
        assert_eq!(p.get(0, 0), Some(&rat(19, 1)));
        assert_eq!(p.get(0, 1), Some(&rat(1, 1)));
        assert_eq!(p.get(1, 0), Some(&rat(21, 1)));
        assert_eq!(p.get(1, 1), Some(&rat(3, 2)));
    }

    #[test]
    fn add_cancels_to_sparse_zero() {
        let a = rmat(&[(0, 0, 1, 2)], 1, 1);
        let b = rmat(&[(0, 0, -1, 2)], 1, 1);
        assert!((&a + &b).is_zero_mat());
    }

    #[test]
    fn rank_exact_counts_pivots() {
        // Rank 2: third row is the sum of the first two.
        let m = rmat(
            &[
                (0, 0, 1, 1),
                (0, 2, 2, 1),
                (1, 1, 1, 3),
                (2, 0, 1, 1),
                (2, 1, 1, 3),
                (2, 2, 2, 1),
            ],
            3,
            3,
        );
        assert_eq!(m.rank_exact(), 2);
        assert_eq!(SparseMat::<Rat>::identity(5).rank_exact(), 5);
        assert_eq!(SparseMat::<Rat>::new(4, 4).rank_exact(), 0);
    }

    #[test]
    fn rank_f64_agrees_with_exact_on_well_conditioned_input() {
        let m = rmat(
            &[
                (0, 0, 1, 1),
                (0, 2, 2, 1),
                (1, 1, 1, 3),
                (2, 0, 1, 1),
                (2, 1, 1, 3),
                (2, 2, 2, 1),
            ],
            3,
            3,
        );
        assert_eq!(m.to_f64().rank_f64(1e-8), 2);
    }

    #[test]
    fn op_norm_on_known_matrices() {
        // Shift on C^6 has norm 1.
        let mut shift = SparseMat::<f64>::new(6, 6);
        for i in 0..5 {
            shift.add_entry(i, i + 1, 1.0);
        }
        assert!((shift.op_norm() - 1.0).abs() < 1e-10);

        // Diagonal norm is the largest magnitude.
        let mut d = SparseMat::<f64>::new(4, 4);
        for (i, v) in [0.5, -2.5, 1.0, 2.0].iter().enumerate() {
            d.add_entry(i as u32, i as u32, *v);
        }
        assert!((d.op_norm() - 2.5).abs() < 1e-10);

        // [[1,1],[0,1]] has sigma_max^2 = (3+sqrt(5))/2.
        let mut j = SparseMat::<f64>::new(2, 2);
        j.add_entry(0, 0, 1.0);
        j.add_entry(0, 1, 1.0);
        j.add_entry(1, 1, 1.0);
        let expect = ((3.0 + 5f64.sqrt()) / 2.0).sqrt();
        assert!((j.op_norm() - expect).abs() < 1e-10);

        assert_eq!(SparseMat::<f64>::new(3, 3).op_norm(), 0.0);
    }

    #[test]
    fn adjoint_conjugates_entries() {
        use crate::scalar::GaussRat;
        let mut m = SparseMat::<GaussRat>::new(2, 2);
        m.add_entry(0, 1, GaussRat::i());
        let a = m.adjoint();
        assert_eq!(a.get(1, 0), Some(&(-GaussRat::i())));
        assert_eq!(a.get(0, 1), None);
    }

    #[test]
    fn block_helpers_place_entries() {
        let a = rmat(&[(0, 0, 1, 1)], 2, 2);
        let b = rmat(&[(1, 1, 2, 1)], 2, 2);
        let blk = SparseMat::block_diag(&[&a, &b]);
        assert_eq!(blk.get(0, 0), Some(&Rat::one()));
        assert_eq!(blk.get(3, 3), Some(&rat(2, 1)));
        let two = SparseMat::from_blocks_2x2(&a, &b, &b, &a);
        assert_eq!(two.get(0, 0), Some(&Rat::one()));
        assert_eq!(two.get(1, 3), Some(&rat(2, 1)));
        assert_eq!(two.get(3, 1), Some(&rat(2, 1)));
        assert_eq!(two.get(2, 2), Some(&Rat::one()));
    }

    #[test]
    fn submatrix_reindexes() {
        let m = rmat(&[(0, 0, 1, 1), (2, 1, 5, 1)], 3, 3);
        let s = m.submatrix(&[0, 2], &[0, 1]);
        assert_eq!(s.nrows(), 2);
        assert_eq!(s.get(1, 1), Some(&rat(5, 1)));
        assert_eq!(s.get(0, 0), Some(&Rat::one()));
    }
}
