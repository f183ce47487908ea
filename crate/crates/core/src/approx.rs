//! Approximating twin-width: greedily coarsen a division while every part
//! keeps few distinct vectors outside a few zones. Getting stuck yields a rich
//! division; finishing yields a contraction sequence.

use std::collections::{HashMap, HashSet};
use std::ops::Range;

use num_bigint::BigUint;

use crate::contraction::{verify_sequence, ContractionSequence, Partition, SequenceProfile, Side};
use crate::divisions::{is_rich_division, Division, RichCheck};
use crate::error::{invalid, Error, Result};
use crate::matrix::OrderedMatrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxParams {
    pub k: usize,
    pub r: usize,
    pub alphabet_size: usize,
    pub w: BigUint,
}

impl ApproxParams {
    pub fn new(k: usize, alphabet_size: usize) -> Result<Self> {
        if k == 0 {
            return invalid("k must be at least 1");
        }
        if alphabet_size == 0 {
            return invalid("empty alphabet");
        }
        let r = 4 * k * (k + 1) + 1;
        let per_zone = BigUint::from(alphabet_size).pow((r - 1) as u32);
        let w = BigUint::from(r) * per_zone.pow(r as u32);
        Ok(ApproxParams { k, r, alphabet_size, w })
    }

    pub fn rich_level(&self) -> usize {
        2 * self.k * (self.k + 1)
    }

    /// (overlap bound, error bound) = (w, (r+2)·w).
    pub fn claimed_bound(&self) -> (BigUint, BigUint) {
        (self.w.clone(), BigUint::from(self.r + 2) * &self.w)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApproxOutcome {
    Rich {
        division: Division,
        level: usize,
    },
    Sequence {
        sequence: ContractionSequence,
        profile: SequenceProfile,
        claimed: (BigUint, BigUint),
    },
}

/// Canonical labels: equal vectors get equal labels, numbered by first
/// occurrence.
fn labels<T: Eq + std::hash::Hash>(items: impl IntoIterator<Item = T>) -> Vec<usize> {
    let mut seen = HashMap::new();
    items
        .into_iter()
        .map(|v| {
            let next = seen.len();
            *seen.entry(v).or_insert(next)
        })
        .collect()
}

fn n_distinct(labels: &[usize]) -> usize {
    labels.iter().max().map_or(0, |m| m + 1)
}

/// Witness search for one part. `lines` are the lines of the part, `cross`
/// the parts of the other side, and `cell(line, cross_index)` reads M.
fn witness(lines: Range<usize>, cross: &[Range<usize>], r: usize, cell: impl Fn(usize, usize) -> usize) -> Option<Vec<usize>> {
    let zone = |b: usize| labels(lines.clone().map(|i| cross[b].clone().map(|j| cell(i, j)).collect::<Vec<_>>()));
    let zones: Vec<Vec<usize>> = (0..cross.len()).map(zone).collect();
    let forced: Vec<usize> = (0..cross.len()).filter(|&b| n_distinct(&zones[b]) > r - 1).collect();
    if forced.len() > r {
        return None;
    }
    let rest: Vec<usize> = (0..cross.len()).filter(|b| !forced.contains(b)).collect();
    // lines that agree on every non-forced zone behave identically
    let classes = labels(
        (0..lines.len()).map(|i| rest.iter().map(|&b| zones[b][i]).collect::<Vec<_>>()),
    );
    let reps: Vec<usize> = (0..n_distinct(&classes))
        .map(|c| classes.iter().position(|&x| x == c).expect("class occurs"))
        .collect();
    if reps.len() < r {
        return Some(forced);
    }
    let cutoff = ((r - 1) as u128).checked_pow(r as u32 + 1).unwrap_or(u128::MAX);
    if reps.len() as u128 > cutoff {
        return None;
    }
    // zones inducing the same split of the representatives are interchangeable
    let mut groups: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for &b in &rest {
        let split = labels(reps.iter().map(|&i| zones[b][i]));
        match groups.iter_mut().find(|(s, _)| *s == split) {
            Some((_, members)) => members.push(b),
            None => groups.push((split, vec![b])),
        }
    }
    let budget = r - forced.len();
    let mut seen = HashSet::new();
    let gone = remove_search(&groups, reps.len(), r, budget, &mut vec![false; groups.len()], &mut seen)?;
    let mut y = forced;
    y.extend(gone.into_iter().flat_map(|g| groups[g].1.iter().copied()));
    y.sort_unstable();
    Some(y)
}

/// Groups to remove so the representatives fall into at most r−1 classes.
/// Among any r representatives in distinct classes two must end up equal, and
/// that needs every group separating them gone; branching over those pairs
/// is exhaustive.
fn remove_search(
    groups: &[(Vec<usize>, Vec<usize>)],
    n_reps: usize,
    r: usize,
    budget: usize,
    removed: &mut Vec<bool>,
    seen: &mut HashSet<Vec<bool>>,
) -> Option<Vec<usize>> {
    if !seen.insert(removed.clone()) {
        return None;
    }
    let kept: Vec<usize> = (0..groups.len()).filter(|&g| !removed[g]).collect();
    let classes = labels((0..n_reps).map(|i| kept.iter().map(|&g| groups[g].0[i]).collect::<Vec<_>>()));
    if n_distinct(&classes) < r {
        return Some((0..groups.len()).filter(|&g| removed[g]).collect());
    }
    let picks: Vec<usize> = (0..r)
        .map(|c| classes.iter().position(|&x| x == c).expect("class occurs"))
        .collect();
    for (p, &x) in picks.iter().enumerate() {
        for &y in &picks[p + 1..] {
            let split: Vec<usize> = kept.iter().copied().filter(|&g| groups[g].0[x] != groups[g].0[y]).collect();
            let cost: usize = split.iter().map(|&g| groups[g].1.len()).sum();
            if cost > budget {
                continue;
            }
            for &g in &split {
                removed[g] = true;
            }
            let found = remove_search(groups, n_reps, r, budget - cost, removed, seen);
            for &g in &split {
                removed[g] = false;
            }
            if found.is_some() {
                return found;
            }
        }
    }
    None
}

/// A set Y of at most r column parts such that row part `part` has at most
/// r−1 distinct row vectors outside ∪Y.
pub fn check_property_rows(m: &OrderedMatrix, d: &Division, part: usize, r: usize) -> Option<Vec<usize>> {
    let rows = d.row_parts().get(part)?.clone();
    witness(rows, &d.col_parts(), r, |i, j| m.get(i, j))
}

/// Column counterpart of `check_property_rows`.
pub fn check_property_cols(m: &OrderedMatrix, d: &Division, part: usize, r: usize) -> Option<Vec<usize>> {
    let cols = d.col_parts().get(part)?.clone();
    witness(cols, &d.row_parts(), r, |j, i| m.get(i, j))
}

fn all_cols_hold(m: &OrderedMatrix, d: &Division, r: usize) -> bool {
    (0..d.d_cols()).all(|b| check_property_cols(m, d, b, r).is_some())
}

fn all_rows_hold(m: &OrderedMatrix, d: &Division, r: usize) -> bool {
    (0..d.d_rows()).all(|a| check_property_rows(m, d, a, r).is_some())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GreedyOutcome {
    /// No merge keeps both properties.
    Stuck(Division),
    /// Every division from the singletons down to the 1×1 division.
    Complete(Vec<Division>),
}

/// First admissible merge in scan order (row parts left to right, then
/// column parts), rescanning from the start after each merge.
pub fn greedy_coarsen(m: &OrderedMatrix, k: usize) -> Result<GreedyOutcome> {
    let params = ApproxParams::new(k, m.alphabet().len())?;
    let r = params.r;
    let mut d = Division::singletons(m.n_rows(), m.n_cols());
    let mut levels = vec![d.clone()];
    loop {
        if d.d_rows() == 1 && d.d_cols() == 1 {
            return Ok(GreedyOutcome::Complete(levels));
        }
        let row_merge = (0..d.d_rows() - 1).map(|a| d.merge_rows(a)).enumerate().find(|(a, next)| {
            check_property_rows(m, next, *a, r).is_some() && all_cols_hold(m, next, r)
        });
        let next = match row_merge {
            Some((_, next)) => Some(next),
            None => (0..d.d_cols() - 1)
                .map(|b| (b, d.merge_cols(b)))
                .find(|(b, next)| check_property_cols(m, next, *b, r).is_some() && all_rows_hold(m, next, r))
                .map(|(_, next)| next),
        };
        match next {
            Some(next) => {
                d = next;
                levels.push(d.clone());
            }
            None => return Ok(GreedyOutcome::Stuck(d)),
        }
    }
}

/// Merge parts 2a and 2a+1 on both sides; an odd last part stays alone.
pub fn pair_coarsen(d: &Division) -> Division {
    let pair = |cuts: &[usize]| cuts.iter().skip(1).step_by(2).copied().collect::<Vec<_>>();
    Division::new(d.n_rows(), d.n_cols(), pair(d.row_cuts()), pair(d.col_cuts()))
        .expect("subset of valid cuts")
}

/// Split each part into classes of lines agreeing outside the full zones
/// (zones with at least r distinct rows and r distinct columns).
pub fn refine_to_partition(m: &OrderedMatrix, d: &Division, r: usize) -> Result<(Partition, Partition)> {
    let row_parts = d.row_parts();
    let col_parts = d.col_parts();
    let full = |a: usize, b: usize| {
        let rows = &row_parts[a];
        let cols = &col_parts[b];
        let nr = n_distinct(&labels(rows.clone().map(|i| cols.clone().map(|j| m.get(i, j)).collect::<Vec<_>>())));
        let nc = n_distinct(&labels(cols.clone().map(|j| rows.clone().map(|i| m.get(i, j)).collect::<Vec<_>>())));
        nr >= r && nc >= r
    };
    let mut col_blocks = Vec::new();
    for b in 0..col_parts.len() {
        if check_property_cols(m, d, b, r).is_none() {
            return Err(Error::Internal(format!("column part {b} violates the column property")));
        }
        let outside: Vec<usize> = (0..row_parts.len())
            .filter(|&a| !full(a, b))
            .flat_map(|a| row_parts[a].clone())
            .collect();
        let cols: Vec<usize> = col_parts[b].clone().collect();
        let lab = labels(cols.iter().map(|&j| outside.iter().map(|&i| m.get(i, j)).collect::<Vec<_>>()));
        for c in 0..n_distinct(&lab) {
            col_blocks.push(cols.iter().zip(&lab).filter(|(_, &l)| l == c).map(|(&j, _)| j).collect());
        }
    }
    let mut row_blocks = Vec::new();
    for a in 0..row_parts.len() {
        if check_property_rows(m, d, a, r).is_none() {
            return Err(Error::Internal(format!("row part {a} violates the row property")));
        }
        let outside: Vec<usize> = (0..col_parts.len())
            .filter(|&b| !full(a, b))
            .flat_map(|b| col_parts[b].clone())
            .collect();
        let rows: Vec<usize> = row_parts[a].clone().collect();
        let lab = labels(rows.iter().map(|&i| outside.iter().map(|&j| m.get(i, j)).collect::<Vec<_>>()));
        for c in 0..n_distinct(&lab) {
            row_blocks.push(rows.iter().zip(&lab).filter(|(_, &l)| l == c).map(|(&i, _)| i).collect());
        }
    }
    Ok((
        Partition::new(Side::Rows, m.n_rows(), row_blocks)?,
        Partition::new(Side::Cols, m.n_cols(), col_blocks)?,
    ))
}

/// Merge blocks of `p` lying in a common block of `target`, smallest minima
/// first, recording each intermediate partition.
fn fill(p: &Partition, target: &Partition, out: &mut Vec<Partition>) -> Result<Partition> {
    if !p.refines(target) {
        return Err(Error::Internal("refined partitions are not nested".into()));
    }
    let owner = target.labels();
    let mut cur = p.clone();
    while cur.len() > target.len() {
        let blocks = cur.blocks();
        let (i, j) = (0..blocks.len())
            .find_map(|i| {
                (i + 1..blocks.len())
                    .find(|&j| owner[blocks[i][0]] == owner[blocks[j][0]])
                    .map(|j| (i, j))
            })
            .expect("a coarser target leaves a mergeable pair");
        cur = cur.merge(i, j);
        out.push(cur.clone());
    }
    Ok(cur)
}

/// Either a division that is 2k(k+1)-rich, certifying twin-width > k, or a
/// contraction sequence within the claimed bounds. Both are verified.
pub fn approximate_twinwidth(m: &OrderedMatrix, k: usize) -> Result<ApproxOutcome> {
    let params = ApproxParams::new(k, m.alphabet().len())?;
    match greedy_coarsen(m, k)? {
        GreedyOutcome::Stuck(d) => {
            let division = pair_coarsen(&d);
            let level = params.rich_level();
            match is_rich_division(m, &division, level)? {
                RichCheck::Rich => Ok(ApproxOutcome::Rich { division, level }),
                RichCheck::Violation { .. } => Err(Error::Internal("stuck division is not rich after pairing".into())),
            }
        }
        GreedyOutcome::Complete(levels) => {
            let mut targets = Vec::with_capacity(levels.len() + 1);
            for d in &levels {
                targets.push(refine_to_partition(m, d, params.r)?);
            }
            targets.push((
                Partition::full(Side::Rows, m.n_rows()),
                Partition::full(Side::Cols, m.n_cols()),
            ));
            let mut rows = Partition::singletons(Side::Rows, m.n_rows());
            let mut cols = Partition::singletons(Side::Cols, m.n_cols());
            let mut steps = vec![(rows.clone(), cols.clone())];
            for (tr, tc) in &targets {
                let mut row_steps = Vec::new();
                rows = fill(&rows, tr, &mut row_steps)?;
                steps.extend(row_steps.into_iter().map(|r| (r, cols.clone())));
                let mut col_steps = Vec::new();
                cols = fill(&cols, tc, &mut col_steps)?;
                steps.extend(col_steps.into_iter().map(|c| (rows.clone(), c)));
            }
            let sequence = ContractionSequence::from_steps(m.n_rows(), m.n_cols(), steps);
            let profile = verify_sequence(m, &sequence)?;
            let claimed = params.claimed_bound();
            if BigUint::from(profile.max_overlap) > claimed.0 || BigUint::from(profile.max_error) > claimed.1 {
                return Err(Error::Internal(format!(
                    "sequence profile ({}, {}) exceeds the claimed bound",
                    profile.max_overlap, profile.max_error
                )));
            }
            Ok(ApproxOutcome::Sequence {
                sequence,
                profile,
                claimed,
            })
        }
    }
}
