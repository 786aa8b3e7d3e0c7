//! Sparse exact linear algebra over the rationals.
//!
//! Two complementary engines live here. The bulk work (ranks, kernels,
//! linear solves) goes through a fraction-free forward elimination on
//! integer-cleared rows: every update is `(p·r − q·s)/content`, so no
//! rational arithmetic happens until the back-substitution that extracts
//! kernel vectors or particular solutions. Quotient bookkeeping (spans,
//! cohomology representatives, coboundary witnesses) uses an incremental
//! rational [`Echelon`] that can carry shadow rows recording how each
//! echelon row was combined from the inserted vectors.
//!
//! Pivoting is always "first nonzero in column order, earliest row wins":
//! with exact arithmetic there is nothing to gain from numerical pivot
//! heuristics, and the fixed rule makes every basis bit-reproducible.

use crate::rational::Q;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Sparse rational vector: strictly increasing indices, nonzero entries.
pub type QVec = Vec<(usize, Q)>;
/// Sparse integer vector: strictly increasing indices, nonzero entries.
pub type ZVec = Vec<(usize, BigInt)>;

/// Sparse rational matrix stored by columns.
#[derive(Clone, Debug)]
pub struct QMat {
    pub nrows: usize,
    pub ncols: usize,
    cols: Vec<QVec>,
}

impl QMat {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        QMat {
            nrows,
            ncols,
            cols: vec![Vec::new(); ncols],
        }
    }

    pub fn from_cols(nrows: usize, cols: Vec<QVec>) -> Self {
        for c in &cols {
            debug_assert!(c.windows(2).all(|w| w[0].0 < w[1].0));
            debug_assert!(c.iter().all(|(i, v)| *i < nrows && !v.is_zero()));
        }
        QMat {
            nrows,
            ncols: cols.len(),
            cols,
        }
    }

    pub fn set_col(&mut self, j: usize, col: QVec) {
        self.cols[j] = col;
    }

    pub fn col(&self, j: usize) -> &QVec {
        &self.cols[j]
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    /// Rows of the matrix, each sorted by column index.
    pub fn rows(&self) -> Vec<QVec> {
        let mut rows: Vec<QVec> = vec![Vec::new(); self.nrows];
        for (j, col) in self.cols.iter().enumerate() {
            for (i, v) in col {
                rows[*i].push((j, v.clone()));
            }
        }
        for r in &mut rows {
            r.sort_by_key(|(j, _)| *j);
        }
        rows
    }

    /// Matrix–vector product with a sparse vector over the column space.
    pub fn apply(&self, v: &QVec) -> QVec {
        let mut acc: std::collections::BTreeMap<usize, Q> = Default::default();
        for (j, c) in v {
            for (i, a) in &self.cols[*j] {
                let e = acc.entry(*i).or_insert_with(Q::zero);
                *e += a * c;
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        Elimination::run(self.rows(), self.ncols).rank()
    }

    /// Deterministic basis of `{ x : M x = 0 }`, one canonically scaled
    /// vector per free column, free columns in increasing order.
    pub fn kernel_basis(&self) -> Vec<QVec> {
        Elimination::run(self.rows(), self.ncols).kernel()
    }

    /// A particular solution of `M x = b`, free variables set to zero.
    pub fn solve(&self, b: &QVec) -> Option<QVec> {
        let mut rows = self.rows();
        // augmented column at index ncols
        for (i, v) in b {
            rows[*i].push((self.ncols, v.clone()));
        }
        Elimination::run(rows, self.ncols).particular_solution(self.ncols)
    }
}

fn content(row: &ZVec) -> BigInt {
    let mut g = BigInt::zero();
    for (_, v) in row {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    g
}

fn reduce_content(row: &mut ZVec) {
    let g = content(row);
    if !g.is_zero() && !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v = &*v / &g;
        }
    }
}

/// `a*x - b*y` on sparse integer rows, content-reduced.
fn row_combine(a: &BigInt, x: &ZVec, b: &BigInt, y: &ZVec) -> ZVec {
    let mut out: ZVec = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let next = match (x.get(i), y.get(j)) {
            (Some((ci, vi)), Some((cj, vj))) => {
                if ci == cj {
                    let v = a * vi - b * vj;
                    i += 1;
                    j += 1;
                    (*ci, v)
                } else if ci < cj {
                    i += 1;
                    (*ci, a * vi)
                } else {
                    j += 1;
                    (*cj, -(b * vj))
                }
            }
            (Some((ci, vi)), None) => {
                i += 1;
                (*ci, a * vi)
            }
            (None, Some((cj, vj))) => {
                j += 1;
                (*cj, -(b * vj))
            }
            (None, None) => unreachable!(),
        };
        if !next.1.is_zero() {
            out.push(next);
        }
    }
    reduce_content(&mut out);
    out
}

/// Clears denominators of a rational row; the scaling leaves the row's
/// solution set (and any span it participates in, up to scale) unchanged.
fn clear_denominators(row: &QVec) -> ZVec {
    let mut lcm = BigInt::one();
    for (_, v) in row {
        lcm = lcm.lcm(v.denom());
    }
    let mut out: ZVec = row
        .iter()
        .map(|(c, v)| (*c, v.numer() * (&lcm / v.denom())))
        .collect();
    reduce_content(&mut out);
    out
}

/// Result of the fraction-free forward pass: integer echelon rows with
/// strictly increasing pivot columns (pivot columns < `npivot_cols`).
struct Elimination {
    rows: Vec<ZVec>,
    pivot_cols: Vec<usize>,
    npivot_cols: usize,
    inconsistent: bool,
}

impl Elimination {
    /// Forward-eliminates `rows`, allowing pivots only in columns
    /// `0..npivot_cols`. A surviving row supported entirely on columns
    /// `>= npivot_cols` marks an inconsistent augmented system.
    fn run(rows: Vec<QVec>, npivot_cols: usize) -> Self {
        let mut work: Vec<ZVec> = rows
            .into_iter()
            .map(|r| clear_denominators(&r))
            .filter(|r| !r.is_empty())
            .collect();
        let mut echelon: Vec<ZVec> = Vec::new();
        let mut pivot_cols: Vec<usize> = Vec::new();
        let mut inconsistent = false;
        loop {
            // earliest leading column among remaining rows, first row wins
            let mut best: Option<(usize, usize)> = None; // (lead col, row idx)
            for (idx, r) in work.iter().enumerate() {
                let lead = r[0].0;
                if best.map_or(true, |(bl, _)| lead < bl) {
                    best = Some((lead, idx));
                }
            }
            let Some((lead, idx)) = best else { break };
            if lead >= npivot_cols {
                inconsistent = true;
                break;
            }
            let pivot = work.remove(idx);
            let pval = pivot[0].1.clone();
            let mut next_work = Vec::with_capacity(work.len());
            for r in work.into_iter() {
                if r[0].0 == lead {
                    let rv = r[0].1.clone();
                    let combined = row_combine(&pval, &r, &rv, &pivot);
                    if !combined.is_empty() {
                        next_work.push(combined);
                    }
                } else {
                    next_work.push(r);
                }
            }
            work = next_work;
            pivot_cols.push(lead);
            echelon.push(pivot);
        }
        Elimination {
            rows: echelon,
            pivot_cols,
            npivot_cols,
            inconsistent,
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Back-substitutes one kernel vector per free column.
    fn kernel(&self) -> Vec<QVec> {
        debug_assert!(!self.inconsistent);
        let mut is_pivot = vec![false; self.npivot_cols];
        for &c in &self.pivot_cols {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in 0..self.npivot_cols {
            if is_pivot[free] {
                continue;
            }
            let mut x: std::collections::BTreeMap<usize, Q> = Default::default();
            x.insert(free, Q::one());
            for (row, &p) in self.rows.iter().zip(&self.pivot_cols).rev() {
                let mut acc = Q::zero();
                for (c, v) in &row[1..] {
                    if let Some(xc) = x.get(c) {
                        acc += Q::from_integer(v.clone()) * xc;
                    }
                }
                if !acc.is_zero() {
                    x.insert(p, -acc / Q::from_integer(row[0].1.clone()));
                }
            }
            let v: QVec = x.into_iter().filter(|(_, v)| !v.is_zero()).collect();
            basis.push(canonical_scale(v));
        }
        basis
    }

    /// Solution with all free variables zero; `None` if inconsistent.
    fn particular_solution(&self, rhs_col: usize) -> Option<QVec> {
        if self.inconsistent {
            return None;
        }
        let mut x: std::collections::BTreeMap<usize, Q> = Default::default();
        for (row, &p) in self.rows.iter().zip(&self.pivot_cols).rev() {
            let mut acc = Q::zero();
            for (c, v) in &row[1..] {
                if *c == rhs_col {
                    acc -= Q::from_integer(v.clone());
                } else if let Some(xc) = x.get(c) {
                    acc += Q::from_integer(v.clone()) * xc;
                }
            }
            if !acc.is_zero() {
                x.insert(p, -acc / Q::from_integer(row[0].1.clone()));
            }
        }
        Some(x.into_iter().filter(|(_, v)| !v.is_zero()).collect())
    }
}

/// Scales a rational vector to integer entries with content one and a
/// positive leading coefficient — the canonical representative of its line.
pub fn canonical_scale(v: QVec) -> QVec {
    if v.is_empty() {
        return v;
    }
    let mut lcm = BigInt::one();
    for (_, q) in &v {
        lcm = lcm.lcm(q.denom());
    }
    let mut ints: Vec<(usize, BigInt)> = v
        .iter()
        .map(|(c, q)| (*c, q.numer() * (&lcm / q.denom())))
        .collect();
    let g = content(&ints);
    if !g.is_zero() && !g.is_one() {
        for (_, n) in ints.iter_mut() {
            *n = &*n / &g;
        }
    }
    if ints[0].1.is_negative() {
        for (_, n) in ints.iter_mut() {
            *n = -&*n;
        }
    }
    ints.into_iter()
        .map(|(c, n)| (c, Q::from_integer(n)))
        .collect()
}

/// Incremental echelon span over the rationals.
///
/// Rows are kept monic (pivot entry 1) and sorted by pivot column. When
/// built via [`Echelon::with_witnesses`], each row carries a shadow row
/// expressing it as a combination of the inserted vectors, which is what
/// turns "this vector lies in the span" into an explicit witness.
pub struct Echelon {
    rows: Vec<QVec>,
    pivots: Vec<usize>,
    shadows: Option<Vec<QVec>>,
    inserted: usize,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon {
            rows: Vec::new(),
            pivots: Vec::new(),
            shadows: None,
            inserted: 0,
        }
    }

    pub fn with_witnesses() -> Self {
        Echelon {
            rows: Vec::new(),
            pivots: Vec::new(),
            shadows: Some(Vec::new()),
            inserted: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the span. Returns the residue and, when witness
    /// tracking is on, the combination `c` with `v = residue + Σ c_j · v_j`
    /// over the inserted vectors `v_j`.
    pub fn reduce(&self, v: &QVec) -> (QVec, Option<QVec>) {
        let mut res: std::collections::BTreeMap<usize, Q> = v.iter().cloned().collect();
        let mut combo: std::collections::BTreeMap<usize, Q> = Default::default();
        for (k, &p) in self.pivots.iter().enumerate() {
            let Some(coef) = res.get(&p).cloned() else {
                continue;
            };
            if coef.is_zero() {
                continue;
            }
            for (c, rv) in &self.rows[k] {
                let e = res.entry(*c).or_insert_with(Q::zero);
                *e -= &coef * rv;
            }
            if let Some(shadows) = &self.shadows {
                for (j, sv) in &shadows[k] {
                    let e = combo.entry(*j).or_insert_with(Q::zero);
                    *e += &coef * sv;
                }
            }
        }
        let residue: QVec = res.into_iter().filter(|(_, q)| !q.is_zero()).collect();
        let combo: QVec = combo.into_iter().filter(|(_, q)| !q.is_zero()).collect();
        (residue, self.shadows.as_ref().map(|_| combo))
    }

    /// Inserts a vector; returns `true` when it enlarged the span.
    pub fn insert(&mut self, v: &QVec) -> bool {
        let idx = self.inserted;
        self.inserted += 1;
        let (residue, combo) = self.reduce(v);
        if residue.is_empty() {
            return false;
        }
        let lead = residue[0].1.clone();
        let row: QVec = residue.iter().map(|(c, q)| (*c, q / &lead)).collect();
        let pivot = row[0].0;
        let pos = self.pivots.partition_point(|&p| p < pivot);
        self.pivots.insert(pos, pivot);
        self.rows.insert(pos, row);
        if let Some(shadows) = &mut self.shadows {
            // residue = v - Σ combo·v_j, scaled monic
            let mut shadow: std::collections::BTreeMap<usize, Q> = Default::default();
            shadow.insert(idx, Q::one() / &lead);
            for (j, c) in combo.unwrap() {
                shadow.insert(j, -c / &lead);
            }
            let shadow: QVec = shadow.into_iter().filter(|(_, q)| !q.is_zero()).collect();
            shadows.insert(pos, shadow);
        }
        true
    }

    /// Membership test with witness: `v = Σ c_j v_j` over inserted vectors.
    pub fn express(&self, v: &QVec) -> Option<QVec> {
        let (residue, combo) = self.reduce(v);
        if residue.is_empty() {
            Some(combo.expect("express requires witness tracking"))
        } else {
            None
        }
    }
}

impl Default for Echelon {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod prop_tests {
    use super::*;
    use crate::rational::qi;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn arb_matrix() -> impl Strategy<Value = QMat> {
        (1usize..6, 1usize..6).prop_flat_map(|(nrows, ncols)| {
            proptest::collection::vec(-3i64..4, nrows * ncols).prop_map(move |entries| {
                let mut cols: Vec<QVec> = vec![Vec::new(); ncols];
                for (k, v) in entries.into_iter().enumerate() {
                    if v != 0 {
                        cols[k % ncols].push((k / ncols, qi(v)));
                    }
                }
                for c in &mut cols {
                    c.sort_by_key(|(i, _)| *i);
                }
                QMat::from_cols(nrows, cols)
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rank_plus_nullity_is_the_domain(m in arb_matrix()) {
            prop_assert_eq!(m.rank() + m.kernel_basis().len(), m.ncols);
        }

        #[test]
        fn kernel_vectors_annihilate(m in arb_matrix()) {
            for v in m.kernel_basis() {
                prop_assert!(m.apply(&v).is_empty());
                prop_assert!(!v.is_empty() && !v[0].1.is_zero());
            }
        }

        #[test]
        fn solve_recovers_images(m in arb_matrix(), coeffs in proptest::collection::vec(-2i64..3, 1..6)) {
            let x: QVec = coeffs
                .iter()
                .enumerate()
                .filter(|(j, &c)| *j < m.ncols && c != 0)
                .map(|(j, &c)| (j, qi(c)))
                .collect();
            let b = m.apply(&x);
            let solved = m.solve(&b).expect("consistent by construction");
            prop_assert_eq!(m.apply(&solved), b);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{qi, qr};

    fn mat(rows: &[&[i64]]) -> QMat {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut cols: Vec<QVec> = vec![Vec::new(); ncols];
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if v != 0 {
                    cols[j].push((i, qi(v)));
                }
            }
        }
        QMat::from_cols(nrows, cols)
    }

    #[test]
    fn rank_and_kernel() {
        let m = mat(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        for v in &k {
            assert!(m.apply(v).is_empty());
        }
        // kernel of [1 2 3; 0 1 1] is the line through (-1, -1, 1),
        // canonically scaled to a positive leading entry
        assert_eq!(k[0], vec![(0, qi(1)), (1, qi(1)), (2, qi(-1))]);
    }

    #[test]
    fn rank_nullity() {
        let m = mat(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[1, 0, 1, 0], &[0, 2, 2, 4]]);
        assert_eq!(m.rank() + m.kernel_basis().len(), m.ncols);
    }

    #[test]
    fn solve_consistent_and_not() {
        let m = mat(&[&[1, 2], &[3, 4]]);
        let b = vec![(0, qi(5)), (1, qi(11))];
        let x = m.solve(&b).unwrap();
        assert_eq!(m.apply(&x), b);
        let sing = mat(&[&[1, 2], &[2, 4]]);
        assert!(sing.solve(&vec![(0, qi(1)), (1, qi(3))]).is_none());
        let x = sing.solve(&vec![(0, qi(1)), (1, qi(2))]).unwrap();
        assert_eq!(sing.apply(&x), vec![(0, qi(1)), (1, qi(2))]);
    }

    #[test]
    fn echelon_witnesses() {
        let v1: QVec = vec![(0, qi(1)), (1, qi(2))];
        let v2: QVec = vec![(1, qi(1)), (2, qi(1))];
        let mut e = Echelon::with_witnesses();
        assert!(e.insert(&v1));
        assert!(e.insert(&v2));
        // 2*v1 - 3*v2
        let target: QVec = vec![(0, qi(2)), (1, qi(1)), (2, qi(-3))];
        let combo = e.express(&target).unwrap();
        assert_eq!(combo, vec![(0, qi(2)), (1, qi(-3))]);
        assert!(e.express(&vec![(3, qi(1))]).is_none());
        // dependent insert does not grow the rank
        assert!(!e.insert(&vec![(0, qr(1, 2)), (1, qi(1))]));
        assert_eq!(e.rank(), 2);
    }

    #[test]
    fn canonical_scaling() {
        let v: QVec = vec![(0, qr(-2, 3)), (2, qr(4, 3))];
        assert_eq!(canonical_scale(v), vec![(0, qi(1)), (2, qi(-2))]);
    }
}
