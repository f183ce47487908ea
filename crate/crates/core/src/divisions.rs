//! Divisions, rank and rich divisions, grid rank, the Marcus-Tardos finder,
//! the eight staircase matrices and Latin division verification.

use std::collections::HashSet;
use std::hash::Hash;
use std::ops::Range;

use num_bigint::BigUint;

use crate::contraction::{Partition, Side};
use crate::error::{invalid, Error, Result};
use crate::matrix::{OrderedMatrix, Placement};

/// Interval partition of rows and columns, stored as cut positions: a cut `c`
/// separates the first `c` lines from the rest.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Division {
    n_rows: usize,
    n_cols: usize,
    row_cuts: Vec<usize>,
    col_cuts: Vec<usize>,
}

fn check_cuts(cuts: &[usize], n: usize, what: &str) -> Result<()> {
    if cuts.windows(2).any(|w| w[0] >= w[1]) || cuts.iter().any(|&c| c == 0 || c >= n) {
        return invalid(format!("{what} cuts must be strictly increasing within 1..{}", n.saturating_sub(1)));
    }
    Ok(())
}

fn parts_of(cuts: &[usize], n: usize) -> Vec<Range<usize>> {
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut start = 0;
    for &c in cuts.iter().chain(std::iter::once(&n)) {
        out.push(start..c);
        start = c;
    }
    out
}

impl Division {
    pub fn new(n_rows: usize, n_cols: usize, row_cuts: Vec<usize>, col_cuts: Vec<usize>) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return invalid("division of an empty matrix");
        }
        check_cuts(&row_cuts, n_rows, "row")?;
        check_cuts(&col_cuts, n_cols, "column")?;
        Ok(Division {
            n_rows,
            n_cols,
            row_cuts,
            col_cuts,
        })
    }

    pub fn singletons(n_rows: usize, n_cols: usize) -> Self {
        Division {
            n_rows,
            n_cols,
            row_cuts: (1..n_rows).collect(),
            col_cuts: (1..n_cols).collect(),
        }
    }

    pub fn trivial(n_rows: usize, n_cols: usize) -> Self {
        Division {
            n_rows,
            n_cols,
            row_cuts: vec![],
            col_cuts: vec![],
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row_cuts(&self) -> &[usize] {
        &self.row_cuts
    }

    pub fn col_cuts(&self) -> &[usize] {
        &self.col_cuts
    }

    pub fn row_parts(&self) -> Vec<Range<usize>> {
        parts_of(&self.row_cuts, self.n_rows)
    }

    pub fn col_parts(&self) -> Vec<Range<usize>> {
        parts_of(&self.col_cuts, self.n_cols)
    }

    pub fn d_rows(&self) -> usize {
        self.row_cuts.len() + 1
    }

    pub fn d_cols(&self) -> usize {
        self.col_cuts.len() + 1
    }

    pub fn transpose(&self) -> Self {
        Division {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_cuts: self.col_cuts.clone(),
            col_cuts: self.row_cuts.clone(),
        }
    }

    /// Merge row parts `a` and `a+1`.
    pub fn merge_rows(&self, a: usize) -> Self {
        let mut d = self.clone();
        d.row_cuts.remove(a);
        d
    }

    /// Merge column parts `b` and `b+1`.
    pub fn merge_cols(&self, b: usize) -> Self {
        let mut d = self.clone();
        d.col_cuts.remove(b);
        d
    }

    pub fn to_partitions(&self) -> (Partition, Partition) {
        let conv = |side, parts: Vec<Range<usize>>, n| {
            Partition::new(side, n, parts.into_iter().map(|r| r.collect()).collect())
                .expect("division parts partition the lines")
        };
        (
            conv(Side::Rows, self.row_parts(), self.n_rows),
            conv(Side::Cols, self.col_parts(), self.n_cols),
        )
    }
}

fn distinct<T: Eq + Hash>(items: impl Iterator<Item = T>) -> usize {
    items.collect::<HashSet<T>>().len()
}

/// Distinct row vectors of the submatrix on the given rows and columns. With
/// no columns every row is the empty vector.
pub fn distinct_rows_on(m: &OrderedMatrix, rows: impl IntoIterator<Item = usize>, cols: &[usize]) -> usize {
    distinct(
        rows.into_iter()
            .map(|r| cols.iter().map(|&c| m.get(r, c)).collect::<Vec<_>>()),
    )
}

pub fn count_distinct_rows(m: &OrderedMatrix, rows: Range<usize>, cols: Range<usize>) -> usize {
    distinct(rows.map(|r| &m.row(r)[cols.clone()]))
}

pub fn count_distinct_cols(m: &OrderedMatrix, rows: Range<usize>, cols: Range<usize>) -> usize {
    distinct(cols.map(|c| rows.clone().map(|r| m.get(r, c)).collect::<Vec<_>>()))
}

fn zone_is_diverse(m: &OrderedMatrix, rows: Range<usize>, cols: Range<usize>, k: usize) -> bool {
    count_distinct_rows(m, rows.clone(), cols.clone()) >= k || count_distinct_cols(m, rows, cols) >= k
}

/// Every zone has at least k distinct rows or at least k distinct columns.
pub fn is_rank_division(m: &OrderedMatrix, d: &Division, k: usize) -> Result<bool> {
    if d.d_rows() != d.d_cols() {
        return invalid("rank divisions must have as many row parts as column parts");
    }
    if d.n_rows != m.n_rows() || d.n_cols != m.n_cols() {
        return invalid("division does not match the matrix");
    }
    let cols = d.col_parts();
    Ok(d.row_parts()
        .into_iter()
        .all(|r| cols.iter().all(|c| zone_is_diverse(m, r.clone(), c.clone(), k))))
}

/// Lexicographic enumeration of the (d-1)-subsets of 1..n-1 used as cuts.
fn for_each_cuts(n: usize, d: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if d == 0 || d > n {
        return;
    }
    let mut cuts: Vec<usize> = (1..d).collect();
    loop {
        if f(&cuts) {
            return;
        }
        // Advance to the next combination.
        let mut i = cuts.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            let max_here = n - (cuts.len() - i);
            if cuts[i] < max_here {
                cuts[i] += 1;
                for j in i + 1..cuts.len() {
                    cuts[j] = cuts[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Column cuts in lexicographic order; for each, row bands are chosen greedily
/// as short as possible. `good` must be monotone: a band that works keeps
/// working when extended, which makes the greedy choice exact.
fn search_division(
    n: usize,
    m: usize,
    d: usize,
    good: impl Fn(Range<usize>, Range<usize>) -> bool,
) -> Option<Division> {
    let mut found = None;
    for_each_cuts(m, d, |col_cuts| {
        let cols = parts_of(col_cuts, m);
        let band_ok = |rows: Range<usize>| cols.iter().all(|c| good(rows.clone(), c.clone()));
        let mut row_cuts = Vec::with_capacity(d - 1);
        let mut start = 0;
        for t in 0..d - 1 {
            let last_end = n - (d - 1 - t);
            let Some(end) = (start + 1..=last_end).find(|&e| band_ok(start..e)) else {
                return false;
            };
            row_cuts.push(end);
            start = end;
        }
        if !band_ok(start..n) {
            return false;
        }
        found = Some(Division {
            n_rows: n,
            n_cols: m,
            row_cuts,
            col_cuts: col_cuts.to_vec(),
        });
        true
    });
    found
}

/// First rank-k d-division in the search order, if any.
pub fn find_rank_division(m: &OrderedMatrix, d: usize, k: usize) -> Option<Division> {
    search_division(m.n_rows(), m.n_cols(), d, |r, c| zone_is_diverse(m, r, c, k))
}

/// Largest k ≤ max_k such that the matrix has a rank-k k-division. A matrix
/// with fewer than k rows or columns has no k-division at all.
pub fn grid_rank(m: &OrderedMatrix, max_k: usize) -> usize {
    let mut best = 0;
    for k in 1..=max_k {
        if find_rank_division(m, k, k).is_none() {
            break;
        }
        best = k;
    }
    best
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RichCheck {
    Rich,
    /// Removing the opposite-side parts `removed` leaves part `part` of `side`
    /// with fewer than k distinct vectors.
    Violation {
        side: Side,
        part: usize,
        removed: Vec<usize>,
    },
}

pub const RICH_CHECK_CAP: u128 = 1_000_000;

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Calls `f` on every k-subset of 0..n in colex order until it returns true.
pub(crate) fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if k > n {
        return false;
    }
    let mut s: Vec<usize> = (0..k).collect();
    loop {
        if f(&s) {
            return true;
        }
        let mut i = 0;
        while i < k && (i + 1 == k && s[i] + 1 == n || i + 1 < k && s[i] + 1 == s[i + 1]) {
            i += 1;
        }
        if i == k {
            return false;
        }
        s[i] += 1;
        for (j, v) in s.iter_mut().enumerate().take(i) {
            *v = j;
        }
    }
}

/// Rows of a part after deleting any ≤ k column parts still show ≥ k distinct
/// vectors, and symmetrically for columns.
pub fn is_rich_division(m: &OrderedMatrix, d: &Division, k: usize) -> Result<RichCheck> {
    if d.n_rows != m.n_rows() || d.n_cols != m.n_cols() {
        return invalid("division does not match the matrix");
    }
    let upto = |parts: usize| (0..=k.min(parts)).map(|i| binomial(parts, i)).sum::<u128>();
    let work = d.d_rows() as u128 * upto(d.d_cols()) + d.d_cols() as u128 * upto(d.d_rows());
    if work > RICH_CHECK_CAP {
        return Err(Error::ResourceLimit(format!(
            "rich check needs {work} subset checks (cap {RICH_CHECK_CAP})"
        )));
    }
    if let Some(v) = rich_side(m, d, k, Side::Rows) {
        return Ok(v);
    }
    let t = m.transpose();
    Ok(rich_side(&t, &d.transpose(), k, Side::Cols).unwrap_or(RichCheck::Rich))
}

fn rich_side(m: &OrderedMatrix, d: &Division, k: usize, side: Side) -> Option<RichCheck> {
    let cols = d.col_parts();
    // Removing more parts only merges vectors, so maximal removals suffice.
    let size = k.min(cols.len());
    for (a, rows) in d.row_parts().into_iter().enumerate() {
        let mut violation = None;
        for_each_subset(cols.len(), size, |removed| {
            let kept: Vec<usize> = cols
                .iter()
                .enumerate()
                .filter(|(j, _)| !removed.contains(j))
                .flat_map(|(_, c)| c.clone())
                .collect();
            if distinct_rows_on(m, rows.clone(), &kept) < k {
                violation = Some(removed.to_vec());
                true
            } else {
                false
            }
        });
        if let Some(removed) = violation {
            return Some(RichCheck::Violation { side, part: a, removed });
        }
    }
    None
}

/// ⌈(8/3)(k+1)²·2^{4k}⌉.
pub fn mt_bound(k: u32) -> BigUint {
    let num = BigUint::from(8u32) * BigUint::from(k + 1).pow(2) * BigUint::from(2u32).pow(4 * k);
    (num + BigUint::from(2u32)) / BigUint::from(3u32)
}

/// A k-division in which every zone has a non-zero entry.
pub fn find_mt_division(m: &OrderedMatrix, k: usize) -> Result<Option<Division>> {
    let Some(zero) = m.alphabet().zero() else {
        return invalid("matrix has no \"0\" symbol");
    };
    Ok(search_division(m.n_rows(), m.n_cols(), k, |rows, cols| {
        rows.clone().any(|r| cols.clone().any(|c| m.get(r, c) != zero))
    }))
}

/// A d×d sub-grid of `labels` whose cells all carry one label, searched by
/// label, then row subset, then columns (first d agreeing columns).
/// `None` labels never match.
pub fn monochromatic_coarsening(
    labels: &[Vec<Option<usize>>],
    d: usize,
) -> Option<(Vec<usize>, Vec<usize>, usize)> {
    let rows = labels.len();
    let cols = labels.first().map_or(0, Vec::len);
    if d == 0 || d > rows || d > cols {
        return None;
    }
    let mut symbols: Vec<usize> = labels.iter().flatten().flatten().copied().collect();
    symbols.sort_unstable();
    symbols.dedup();
    for a in symbols {
        let mut hit = None;
        lex_subsets(rows, d, |chosen| {
            let agree: Vec<usize> = (0..cols)
                .filter(|&j| chosen.iter().all(|&i| labels[i][j] == Some(a)))
                .take(d)
                .collect();
            if agree.len() == d {
                hit = Some((chosen.to_vec(), agree));
                true
            } else {
                false
            }
        });
        if let Some((r, c)) = hit {
            return Some((r, c, a));
        }
    }
    None
}

/// k-subsets of 0..n in lexicographic order.
fn lex_subsets(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut s: Vec<usize> = (0..k).collect();
    loop {
        if f(&s) {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if s[i] < n - (k - i) {
                s[i] += 1;
                for j in i + 1..k {
                    s[j] = s[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Threshold (k-1)^{|A|-1} + 1, saturating.
pub fn selection_threshold(k: usize, alphabet_size: usize) -> usize {
    let base = (k.saturating_sub(1)) as u128;
    let mut acc: u128 = 1;
    for _ in 1..alphabet_size {
        acc = acc.saturating_mul(base);
    }
    usize::try_from(acc.saturating_add(1)).unwrap_or(usize::MAX)
}

/// Find a letter `a` and a d-division that is rank-k for the a-selection of
/// the matrix. Searches rank-K D-divisions for D = d, d+1, ..., labels cells
/// by a letter that keeps k distinct rows or columns (non-zero letters are
/// preferred), then looks for a monochromatic d×d sub-grid.
pub fn select_rank_division(m: &OrderedMatrix, k: usize, d: usize) -> Result<Option<(String, Division)>> {
    let big_k = selection_threshold(k, m.alphabet().len());
    let mut letters: Vec<usize> = (0..m.alphabet().len()).collect();
    letters.sort_by_key(|&a| m.alphabet().symbol(a) == "0");
    let selections: Vec<OrderedMatrix> = (0..m.alphabet().len())
        .map(|a| m.a_selection(m.alphabet().symbol(a)).expect("own symbol"))
        .collect();
    for big_d in d..=m.n_rows().min(m.n_cols()) {
        let Some(div) = find_rank_division(m, big_d, big_k) else {
            continue;
        };
        let (rows, cols) = (div.row_parts(), div.col_parts());
        let labels: Vec<Vec<Option<usize>>> = rows
            .iter()
            .map(|r| {
                cols.iter()
                    .map(|c| {
                        letters
                            .iter()
                            .copied()
                            .find(|&a| zone_is_diverse(&selections[a], r.clone(), c.clone(), k))
                    })
                    .collect()
            })
            .collect();
        let Some((ri, ci, a)) = monochromatic_coarsening(&labels, d) else {
            continue;
        };
        let coarse = Division::new(
            m.n_rows(),
            m.n_cols(),
            coarse_cuts(&rows, &ri),
            coarse_cuts(&cols, &ci),
        )?;
        if !is_rank_division(&selections[a], &coarse, k)? {
            return Err(Error::Internal("coarsened division lost its rank".into()));
        }
        return Ok(Some((m.alphabet().symbol(a).to_string(), coarse)));
    }
    Ok(None)
}

// Coarse part t runs from just after chosen block t-1 through chosen block t;
// the last one extends to the end.
fn coarse_cuts(parts: &[Range<usize>], chosen: &[usize]) -> Vec<usize> {
    chosen[..chosen.len() - 1].iter().map(|&i| parts[i].end).collect()
}

/// I, 1-I, U (i ≤ j), L (i ≥ j), then the same four with columns reversed.
pub fn nk_matrices(k: usize) -> Vec<OrderedMatrix> {
    let base = [
        OrderedMatrix::binary_from_fn(k, k, |i, j| i == j),
        OrderedMatrix::binary_from_fn(k, k, |i, j| i != j),
        OrderedMatrix::binary_from_fn(k, k, |i, j| i <= j),
        OrderedMatrix::binary_from_fn(k, k, |i, j| i >= j),
    ];
    let mirrored: Vec<OrderedMatrix> = base.iter().map(OrderedMatrix::mirror).collect();
    base.into_iter().chain(mirrored).collect()
}

/// First member of `nk_matrices(k)` (numbered 1..8) occurring in the matrix.
pub fn find_nk_submatrix(m: &OrderedMatrix, k: usize) -> Option<(usize, Placement)> {
    nk_matrices(k)
        .iter()
        .enumerate()
        .find_map(|(i, n)| m.contains_submatrix(n).map(|p| (i + 1, p)))
}

/// The k×k block of a Latin witness sitting in cell (i, j).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatinCell {
    pub i: usize,
    pub j: usize,
    /// 1..8, indexing `nk_matrices`.
    pub member: usize,
    pub row_start: usize,
    pub col_start: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatinWitness {
    pub division: Division,
    pub cells: Vec<LatinCell>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatinCheck {
    Valid,
    WrongMember { cell: (usize, usize) },
    /// Rows of `cell`'s block against columns of `other`'s block.
    CrossNotConstant { cell: (usize, usize), other: (usize, usize) },
}

fn cell_error(i: usize, j: usize, msg: impl Into<String>) -> Error {
    Error::CertificateInvalid {
        at: format!("cell ({},{})", i + 1, j + 1),
        msg: msg.into(),
    }
}

pub fn verify_rank_latin_division(m: &OrderedMatrix, w: &LatinWitness, k: usize) -> Result<LatinCheck> {
    if !m.alphabet().is_binary() {
        return invalid("Latin divisions are checked on 0/1 matrices");
    }
    let div = &w.division;
    if div.n_rows != m.n_rows() || div.n_cols != m.n_cols() {
        return Err(Error::CertificateInvalid {
            at: "division".into(),
            msg: "dimensions differ from the matrix".into(),
        });
    }
    let d = div.d_rows();
    if div.d_cols() != d {
        return Err(Error::CertificateInvalid {
            at: "division".into(),
            msg: "division is not square".into(),
        });
    }
    if k == 0 {
        return invalid("k must be positive");
    }
    let (rows, cols) = (div.row_parts(), div.col_parts());
    let mut by_cell: Vec<Option<&LatinCell>> = vec![None; d * d];
    for c in &w.cells {
        if c.i >= d || c.j >= d {
            return Err(cell_error(c.i, c.j, "cell outside the division"));
        }
        if by_cell[c.i * d + c.j].replace(c).is_some() {
            return Err(cell_error(c.i, c.j, "cell listed twice"));
        }
        if !(1..=8).contains(&c.member) {
            return Err(cell_error(c.i, c.j, format!("member {} not in 1..8", c.member)));
        }
        let (r, q) = (&rows[c.i], &cols[c.j]);
        if c.row_start < r.start || c.row_start + k > r.end || c.col_start < q.start || c.col_start + k > q.end {
            return Err(cell_error(c.i, c.j, "block does not lie inside its cell"));
        }
    }
    let mut row_owner = vec![None; m.n_rows()];
    let mut col_owner = vec![None; m.n_cols()];
    for i in 0..d {
        for j in 0..d {
            let c = by_cell[i * d + j].ok_or_else(|| cell_error(i, j, "missing cell"))?;
            for r in c.row_start..c.row_start + k {
                if row_owner[r].replace((i, j)).is_some() {
                    return Err(cell_error(i, j, format!("row {} used twice", r + 1)));
                }
            }
            for q in c.col_start..c.col_start + k {
                if col_owner[q].replace((i, j)).is_some() {
                    return Err(cell_error(i, j, format!("column {} used twice", q + 1)));
                }
            }
        }
    }
    if let Some(r) = row_owner.iter().position(Option::is_none) {
        return Err(Error::CertificateInvalid {
            at: format!("row {}", r + 1),
            msg: "row not covered by any block".into(),
        });
    }
    if let Some(q) = col_owner.iter().position(Option::is_none) {
        return Err(Error::CertificateInvalid {
            at: format!("column {}", q + 1),
            msg: "column not covered by any block".into(),
        });
    }

    let members = nk_matrices(k);
    let block = |rs: usize, cs: usize| {
        let rr: Vec<usize> = (rs..rs + k).collect();
        let cc: Vec<usize> = (cs..cs + k).collect();
        m.submatrix(&rr, &cc).expect("bounds checked")
    };
    for c in by_cell.iter().flatten() {
        let got = block(c.row_start, c.col_start);
        if got.entries().iter().zip(members[c.member - 1].entries()).any(|(&x, &y)| {
            m.alphabet().symbol(x) != if y == 1 { "1" } else { "0" }
        }) {
            return Ok(LatinCheck::WrongMember { cell: (c.i, c.j) });
        }
    }
    for a in by_cell.iter().flatten() {
        for b in by_cell.iter().flatten() {
            if (a.i, a.j) == (b.i, b.j) {
                continue;
            }
            let z = block(a.row_start, b.col_start);
            if z.entries().iter().any(|&s| s != z.get(0, 0)) {
                return Ok(LatinCheck::CrossNotConstant {
                    cell: (a.i, a.j),
                    other: (b.i, b.j),
                });
            }
        }
    }
    Ok(LatinCheck::Valid)
}

/// An 18×18 rank-2 Latin 3-division. Each column block t of width 2 holds one
/// staircase block in row block (t mod 3)·3 + ⌊t/3⌋, so cell (t mod 3, ⌊t/3⌋)
/// owns it. All other 2×2 blocks are constant, 0 or 1 by a fixed hash of the
/// block coordinates.
pub fn sample_latin_instance() -> (OrderedMatrix, LatinWitness) {
    // (column block, member) in cell order t = 0..9.
    const MEMBERS: [usize; 9] = [5, 3, 1, 1, 3, 8, 4, 1, 7];
    let nk = nk_matrices(2);
    let mut owner = [[None; 9]; 9];
    let mut cells = Vec::new();
    for (t, &member) in MEMBERS.iter().enumerate() {
        let rb = (t % 3) * 3 + t / 3;
        owner[rb][t] = Some(member);
        cells.push(LatinCell {
            i: t % 3,
            j: t / 3,
            member,
            row_start: 2 * rb,
            col_start: 2 * t,
        });
    }
    let m = OrderedMatrix::binary_from_fn(18, 18, |r, c| {
        let (rb, cb) = (r / 2, c / 2);
        match owner[rb][cb] {
            Some(member) => nk[member - 1].is_one(r % 2, c % 2),
            None => ((rb * 9 + cb) as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 63 == 1,
        }
    });
    let division = Division::new(18, 18, vec![6, 12], vec![6, 12]).expect("valid cuts");
    (m, LatinWitness { division, cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mt_bound_values() {
        assert_eq!(mt_bound(1), BigUint::from(171u32));
        assert_eq!(mt_bound(2), BigUint::from(6144u32));
        for k in 1..10 {
            assert!(mt_bound(k + 1) > mt_bound(k));
        }
    }

    #[test]
    fn nk_at_one_and_two() {
        let v: Vec<bool> = nk_matrices(1).iter().map(|m| m.is_one(0, 0)).collect();
        assert_eq!(v, vec![true, false, true, true, true, false, true, true]);
        let u2 = &nk_matrices(2)[2];
        assert_eq!(u2, &OrderedMatrix::binary_from_rows(&[&[1, 1], &[0, 1]]).unwrap());
        assert_eq!(nk_matrices(3)[4], OrderedMatrix::identity(3).mirror());
    }

    #[test]
    fn nk_search() {
        let (member, p) = find_nk_submatrix(&OrderedMatrix::identity(5), 3).unwrap();
        assert_eq!(member, 1);
        assert_eq!(p.rows, vec![0, 1, 2]);
        assert!(find_nk_submatrix(&OrderedMatrix::zeros(2, 2), 2).is_none());
    }

    #[test]
    fn distinct_counts() {
        let z = OrderedMatrix::zeros(3, 3);
        assert_eq!((count_distinct_rows(&z, 0..3, 0..3), count_distinct_cols(&z, 0..3, 0..3)), (1, 1));
        let i = OrderedMatrix::identity(4);
        assert_eq!((count_distinct_rows(&i, 0..4, 0..4), count_distinct_cols(&i, 0..4, 0..4)), (4, 4));
        let cb = OrderedMatrix::checkerboard(7);
        assert!(count_distinct_rows(&cb, 1..6, 2..7) <= 2);
    }

    #[test]
    fn rank_division_basics() {
        let i = OrderedMatrix::identity(3);
        assert!(is_rank_division(&i, &Division::trivial(3, 3), 3).unwrap());
        let d = Division::new(3, 3, vec![1], vec![]).unwrap();
        assert!(is_rank_division(&i, &d, 1).is_err());
        assert_eq!(grid_rank(&OrderedMatrix::zeros(5, 5), 4), 1);
        assert_eq!(grid_rank(&OrderedMatrix::checkerboard(12), 5), 2);
    }

    #[test]
    fn checkerboard_three_divisions_fail() {
        let cb = OrderedMatrix::checkerboard(12);
        for_each_cuts(12, 3, |rc| {
            for_each_cuts(12, 3, |cc| {
                let d = Division::new(12, 12, rc.to_vec(), cc.to_vec()).unwrap();
                assert!(!is_rank_division(&cb, &d, 3).unwrap());
                false
            });
            false
        });
    }

    #[test]
    fn rich_basics() {
        let i = OrderedMatrix::identity(3);
        assert_eq!(is_rich_division(&i, &Division::singletons(3, 3), 0).unwrap(), RichCheck::Rich);
        assert!(matches!(
            is_rich_division(&i, &Division::singletons(3, 3), 2).unwrap(),
            RichCheck::Violation { side: Side::Rows, part: 0, .. }
        ));
        let big = OrderedMatrix::zeros(40, 40);
        assert!(matches!(
            is_rich_division(&big, &Division::singletons(40, 40), 6),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn mt_finder_basics() {
        // Off-diagonal zones of I_k are zero, so only k = 1 works for it.
        let i = OrderedMatrix::identity(4);
        assert!(find_mt_division(&i, 2).unwrap().is_none());
        assert_eq!(find_mt_division(&i, 1).unwrap(), Some(Division::trivial(4, 4)));
        let ones = OrderedMatrix::binary_from_fn(4, 4, |_, _| true);
        let d = find_mt_division(&ones, 4).unwrap().unwrap();
        assert_eq!(d, Division::singletons(4, 4));
        assert!(find_mt_division(&OrderedMatrix::zeros(3, 3), 1).unwrap().is_none());
        let ab = crate::matrix::Alphabet::new(["a", "b"]).unwrap();
        let m = OrderedMatrix::from_fn(2, 2, ab, |_, _| 0).unwrap();
        assert!(find_mt_division(&m, 1).is_err());
    }

    #[test]
    fn monochromatic() {
        let constant = vec![vec![Some(4); 3]; 3];
        assert_eq!(monochromatic_coarsening(&constant, 2), Some((vec![0, 1], vec![0, 1], 4)));
        let distinct = vec![vec![Some(0), Some(1)], vec![Some(2), Some(3)]];
        assert_eq!(monochromatic_coarsening(&distinct, 2), None);
    }

    #[test]
    fn selection_binary_keeps_division() {
        let cb = OrderedMatrix::checkerboard(4);
        let direct = find_rank_division(&cb, 2, 2).unwrap();
        let (a, d) = select_rank_division(&cb, 2, 2).unwrap().unwrap();
        assert_eq!((a.as_str(), &d), ("1", &direct));
        assert!(find_rank_division(&OrderedMatrix::identity(4), 2, 2).is_none());
        assert_eq!(selection_threshold(2, 3), 2);
        assert_eq!(select_rank_division(&OrderedMatrix::zeros(4, 4), 2, 2).unwrap(), None);
    }

    #[test]
    fn sample_latin_is_valid() {
        let (m, w) = sample_latin_instance();
        assert_eq!(verify_rank_latin_division(&m, &w, 2).unwrap(), LatinCheck::Valid);
        assert!(is_rank_division(&m, &w.division, 2).unwrap());
    }

    #[test]
    fn latin_structural_errors() {
        let (m, mut w) = sample_latin_instance();
        w.cells.pop();
        assert!(matches!(verify_rank_latin_division(&m, &w, 2), Err(Error::CertificateInvalid { .. })));
    }

    #[test]
    fn latin_k1_permutation() {
        // One entry per cell of a 2-division; 1×1 cross zones are always constant.
        let m = OrderedMatrix::binary_from_rows(&[&[1, 0, 0, 0], &[0, 0, 1, 0], &[0, 1, 0, 0], &[0, 0, 0, 1]]).unwrap();
        let division = Division::new(4, 4, vec![2], vec![2]).unwrap();
        let spots = [(0, 0, 0, 0), (0, 1, 1, 2), (1, 0, 2, 1), (1, 1, 3, 3)];
        let cells = spots
            .iter()
            .map(|&(i, j, r, c)| LatinCell {
                i,
                j,
                member: if m.is_one(r, c) { 1 } else { 2 },
                row_start: r,
                col_start: c,
            })
            .collect();
        let w = LatinWitness { division, cells };
        assert_eq!(verify_rank_latin_division(&m, &w, 1).unwrap(), LatinCheck::Valid);
    }

    #[test]
    fn subsets_colex() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |s| {
            seen.push(s.to_vec());
            false
        });
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 3], vec![1, 3], vec![2, 3]]);
    }
}
