//! Partitions, overlap and error values, contraction sequences, and an exact
//! twin-width search for tiny matrices.

use std::collections::HashMap;

use crate::error::{invalid, Error, Result};
use crate::matrix::OrderedMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Rows,
    Cols,
}

impl Side {
    pub fn letter(self) -> char {
        match self {
            Side::Rows => 'R',
            Side::Cols => 'C',
        }
    }
}

/// Partition of 0..size into non-empty blocks, kept sorted internally and
/// ordered by minimum element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    side: Side,
    size: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(side: Side, size: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; size];
        let mut blocks = blocks;
        for b in &mut blocks {
            if b.is_empty() {
                return invalid("empty block");
            }
            b.sort_unstable();
            for &x in b.iter() {
                if x >= size || seen[x] {
                    return invalid(format!("element {x} out of range or repeated"));
                }
                seen[x] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return invalid("blocks do not cover the ground set");
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Partition { side, size, blocks })
    }

    pub fn singletons(side: Side, size: usize) -> Self {
        Partition {
            side,
            size,
            blocks: (0..size).map(|x| vec![x]).collect(),
        }
    }

    pub fn full(side: Side, size: usize) -> Self {
        Partition {
            side,
            size,
            blocks: vec![(0..size).collect()],
        }
    }

    /// Blocks given by a label per element.
    pub fn from_labels(side: Side, labels: &[usize]) -> Self {
        let mut by_label: HashMap<usize, Vec<usize>> = HashMap::new();
        for (x, &l) in labels.iter().enumerate() {
            by_label.entry(l).or_default().push(x);
        }
        Self::new(side, labels.len(), by_label.into_values().collect()).expect("labels cover")
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block position of every element.
    pub fn labels(&self) -> Vec<usize> {
        let mut out = vec![0; self.size];
        for (i, b) in self.blocks.iter().enumerate() {
            for &x in b {
                out[x] = i;
            }
        }
        out
    }

    /// Merge the blocks at positions `i` and `j`.
    pub fn merge(&self, i: usize, j: usize) -> Self {
        let (i, j) = (i.min(j), i.max(j));
        let mut blocks = self.blocks.clone();
        let b = blocks.remove(j);
        blocks[i].extend(b);
        blocks[i].sort_unstable();
        Partition {
            side: self.side,
            size: self.size,
            blocks,
        }
    }

    pub fn position_of_min(&self, min: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b[0] == min)
    }

    /// Every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        let labels = coarser.labels();
        self.size == coarser.size
            && self
                .blocks
                .iter()
                .all(|b| b.iter().all(|&x| labels[x] == labels[b[0]]))
    }
}

pub fn span(block: &[usize]) -> Result<(usize, usize)> {
    match (block.iter().min(), block.iter().max()) {
        (Some(&lo), Some(&hi)) => Ok((lo, hi)),
        _ => invalid("span of an empty block"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapReport {
    pub per_block: Vec<usize>,
    pub max: usize,
}

/// For each block, how many other blocks have an intersecting span.
pub fn overlap_degree(p: &Partition) -> OverlapReport {
    let spans: Vec<(usize, usize)> = p.blocks.iter().map(|b| (b[0], b[b.len() - 1])).collect();
    let per_block: Vec<usize> = spans
        .iter()
        .enumerate()
        .map(|(i, &(lo, hi))| {
            spans
                .iter()
                .enumerate()
                .filter(|&(j, &(lo2, hi2))| j != i && lo <= hi2 && lo2 <= hi)
                .count()
        })
        .collect();
    let max = per_block.iter().copied().max().unwrap_or(0);
    OverlapReport { per_block, max }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorReport {
    pub row_errors: Vec<usize>,
    pub col_errors: Vec<usize>,
    pub max: usize,
}

pub(crate) fn zone_constant(m: &OrderedMatrix, rows: &[usize], cols: &[usize]) -> bool {
    let first = m.get(rows[0], cols[0]);
    rows.iter().all(|&r| cols.iter().all(|&c| m.get(r, c) == first))
}

/// A part's error is the number of opposite parts it meets in a non-constant
/// zone.
pub fn error_value(m: &OrderedMatrix, rows: &Partition, cols: &Partition) -> Result<ErrorReport> {
    if rows.size != m.n_rows() || cols.size != m.n_cols() {
        return invalid("partitions do not match the matrix dimensions");
    }
    let mut row_errors = vec![0; rows.len()];
    let mut col_errors = vec![0; cols.len()];
    for (i, rb) in rows.blocks.iter().enumerate() {
        for (j, cb) in cols.blocks.iter().enumerate() {
            if !zone_constant(m, rb, cb) {
                row_errors[i] += 1;
                col_errors[j] += 1;
            }
        }
    }
    let max = row_errors.iter().chain(&col_errors).copied().max().unwrap_or(0);
    Ok(ErrorReport {
        row_errors,
        col_errors,
        max,
    })
}

/// One contraction: merge the blocks whose minimum elements are `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Merge {
    pub side: Side,
    pub a: usize,
    pub b: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionSequence {
    n_rows: usize,
    n_cols: usize,
    steps: Vec<(Partition, Partition)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SequenceProfile {
    pub max_overlap: usize,
    pub max_error: usize,
}

fn cert(step: usize, msg: impl Into<String>) -> Error {
    Error::CertificateInvalid {
        at: format!("step {step}"),
        msg: msg.into(),
    }
}

impl ContractionSequence {
    /// Unchecked list of steps; `verify_sequence` does the structural checks.
    pub fn from_steps(n_rows: usize, n_cols: usize, steps: Vec<(Partition, Partition)>) -> Self {
        ContractionSequence {
            n_rows,
            n_cols,
            steps,
        }
    }

    /// Replay merges from the all-singletons start. A merge naming a block
    /// minimum that does not exist is a certificate error at that step.
    pub fn from_merges(n_rows: usize, n_cols: usize, merges: &[Merge]) -> Result<Self> {
        let mut rows = Partition::singletons(Side::Rows, n_rows);
        let mut cols = Partition::singletons(Side::Cols, n_cols);
        let mut steps = vec![(rows.clone(), cols.clone())];
        for (i, mv) in merges.iter().enumerate() {
            let p = match mv.side {
                Side::Rows => &mut rows,
                Side::Cols => &mut cols,
            };
            let (Some(x), Some(y)) = (p.position_of_min(mv.a), p.position_of_min(mv.b)) else {
                return Err(cert(i + 2, format!("no blocks with minima {} and {}", mv.a, mv.b)));
            };
            if x == y {
                return Err(cert(i + 2, "merging a block with itself"));
            }
            *p = p.merge(x, y);
            steps.push((rows.clone(), cols.clone()));
        }
        Ok(Self::from_steps(n_rows, n_cols, steps))
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn steps(&self) -> &[(Partition, Partition)] {
        &self.steps
    }

    /// The merge performed at each step after the first. Assumes a
    /// structurally valid sequence.
    pub fn merges(&self) -> Vec<Merge> {
        self.steps
            .windows(2)
            .filter_map(|w| {
                let (r0, c0) = &w[0];
                let (r1, c1) = &w[1];
                single_merge(r0, r1)
                    .map(|(a, b)| Merge { side: Side::Rows, a, b })
                    .or_else(|| single_merge(c0, c1).map(|(a, b)| Merge { side: Side::Cols, a, b }))
            })
            .collect()
    }
}

/// If `after` is `before` with exactly two blocks merged, their minima.
fn single_merge(before: &Partition, after: &Partition) -> Option<(usize, usize)> {
    if before.size != after.size || before.len() != after.len() + 1 {
        return None;
    }
    let gone: Vec<&Vec<usize>> = before.blocks.iter().filter(|b| !after.blocks.contains(b)).collect();
    let new: Vec<&Vec<usize>> = after.blocks.iter().filter(|b| !before.blocks.contains(b)).collect();
    if gone.len() != 2 || new.len() != 1 {
        return None;
    }
    let mut union: Vec<usize> = gone[0].iter().chain(gone[1]).copied().collect();
    union.sort_unstable();
    (&union == new[0]).then_some((gone[0][0], gone[1][0]))
}

/// Check the structure of `seq` and return its worst overlap and error value.
pub fn verify_sequence(m: &OrderedMatrix, seq: &ContractionSequence) -> Result<SequenceProfile> {
    let (n, k) = (m.n_rows(), m.n_cols());
    if seq.n_rows != n || seq.n_cols != k {
        return Err(cert(0, "sequence dimensions differ from the matrix"));
    }
    if seq.steps.len() != n + k - 1 {
        return Err(cert(
            seq.steps.len(),
            format!("expected {} steps, found {}", n + k - 1, seq.steps.len()),
        ));
    }
    let mut profile = SequenceProfile {
        max_overlap: 0,
        max_error: 0,
    };
    for (i, (rows, cols)) in seq.steps.iter().enumerate() {
        let step = i + 1;
        if rows.side != Side::Rows || cols.side != Side::Cols || rows.size != n || cols.size != k {
            return Err(cert(step, "partition over the wrong ground set"));
        }
        if i == 0 && (rows.len() != n || cols.len() != k) {
            return Err(cert(step, "first step must be all singletons"));
        }
        if i > 0 {
            let (r0, c0) = &seq.steps[i - 1];
            let row_merge = single_merge(r0, rows).is_some() && c0 == cols;
            let col_merge = single_merge(c0, cols).is_some() && r0 == rows;
            if !row_merge && !col_merge {
                return Err(cert(step, "step is not a single merge of two blocks"));
            }
        }
        profile.max_overlap = profile
            .max_overlap
            .max(overlap_degree(rows).max)
            .max(overlap_degree(cols).max);
        profile.max_error = profile.max_error.max(error_value(m, rows, cols)?.max);
    }
    let (rows, cols) = seq.steps.last().expect("length checked");
    if rows.len() != 1 || cols.len() != 1 {
        return Err(cert(seq.steps.len(), "last step must be the two full blocks"));
    }
    Ok(profile)
}

pub const DEFAULT_SIZE_GUARD: usize = 10;

/// Minimum of max_overlap + max_error over all contraction sequences, with a
/// witness.
pub fn exact_twinwidth(m: &OrderedMatrix, size_guard: usize) -> Result<(usize, ContractionSequence)> {
    exact_search(m, size_guard, |k, e| k + e)
}

/// Minimum of max(max_overlap, max_error), with a witness.
pub fn min_kk_value(m: &OrderedMatrix, size_guard: usize) -> Result<(usize, ContractionSequence)> {
    exact_search(m, size_guard, |k, e| k.max(e))
}

struct Search<'a> {
    m: &'a OrderedMatrix,
    cost: fn(usize, usize) -> usize,
    best: usize,
    best_path: Option<Vec<Merge>>,
    path: Vec<Merge>,
    // Pareto front of (overlap, error) prefixes already explored per state.
    seen: HashMap<(Vec<usize>, Vec<usize>), Vec<(usize, usize)>>,
}

fn exact_search(
    m: &OrderedMatrix,
    size_guard: usize,
    cost: fn(usize, usize) -> usize,
) -> Result<(usize, ContractionSequence)> {
    let (n, k) = (m.n_rows(), m.n_cols());
    if n + k > size_guard {
        return Err(Error::ResourceLimit(format!(
            "exact search on {n}x{k} exceeds the size guard {size_guard}"
        )));
    }
    // Upper bound from merging consecutive rows, then consecutive columns.
    let simple: Vec<Merge> = (1..n)
        .map(|i| Merge { side: Side::Rows, a: 0, b: i })
        .chain((1..k).map(|j| Merge { side: Side::Cols, a: 0, b: j }))
        .collect();
    let simple_seq = ContractionSequence::from_merges(n, k, &simple)?;
    let p = verify_sequence(m, &simple_seq)?;
    let mut search = Search {
        m,
        cost,
        best: cost(p.max_overlap, p.max_error) + 1,
        best_path: None,
        path: Vec::new(),
        seen: HashMap::new(),
    };
    search.dfs(
        &Partition::singletons(Side::Rows, n),
        &Partition::singletons(Side::Cols, k),
        0,
        0,
    );
    let path = search
        .best_path
        .ok_or_else(|| Error::Internal("exact search found no sequence".into()))?;
    let seq = ContractionSequence::from_merges(n, k, &path)?;
    Ok((search.best, seq))
}

impl Search<'_> {
    fn dfs(&mut self, rows: &Partition, cols: &Partition, k: usize, e: usize) {
        if (self.cost)(k, e) >= self.best {
            return;
        }
        if rows.len() == 1 && cols.len() == 1 {
            self.best = (self.cost)(k, e);
            self.best_path = Some(self.path.clone());
            return;
        }
        let front = self.seen.entry((rows.labels(), cols.labels())).or_default();
        if front.iter().any(|&(k2, e2)| k2 <= k && e2 <= e) {
            return;
        }
        front.retain(|&(k2, e2)| !(k <= k2 && e <= e2));
        front.push((k, e));

        for side in [Side::Rows, Side::Cols] {
            let p = if side == Side::Rows { rows } else { cols };
            for i in 0..p.len() {
                for j in i + 1..p.len() {
                    let merged = p.merge(i, j);
                    let (r2, c2) = match side {
                        Side::Rows => (&merged, cols),
                        Side::Cols => (rows, &merged),
                    };
                    let k2 = k.max(overlap_degree(r2).max).max(overlap_degree(c2).max);
                    let e2 = e.max(error_value(self.m, r2, c2).expect("sizes match").max);
                    self.path.push(Merge {
                        side,
                        a: p.blocks[i][0],
                        b: p.blocks[j][0],
                    });
                    self.dfs(r2, c2, k2, e2);
                    self.path.pop();
                }
            }
        }
    }
}
