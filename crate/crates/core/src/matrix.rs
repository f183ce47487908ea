use std::fmt;

use crate::error::{invalid, Result};

/// Ordered list of distinct symbol tokens. The token `"0"` plays the role of the
/// zero symbol wherever "non-zero entry" matters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return invalid("alphabet must be non-empty");
        }
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                return invalid(format!("bad symbol token {s:?}"));
            }
            if symbols[..i].contains(s) {
                return invalid(format!("duplicate symbol {s:?}"));
            }
        }
        Ok(Alphabet { symbols })
    }

    pub fn binary() -> Self {
        Alphabet {
            symbols: vec!["0".into(), "1".into()],
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, index: usize) -> &str {
        &self.symbols[index]
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == token)
    }

    pub fn zero(&self) -> Option<usize> {
        self.index_of("0")
    }

    pub fn is_binary(&self) -> bool {
        self.symbols.iter().all(|s| s == "0" || s == "1")
    }
}

/// Matrix with totally ordered rows and columns over a finite alphabet.
/// Entries are stored row-major as symbol indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderedMatrix {
    rows: usize,
    cols: usize,
    alphabet: Alphabet,
    data: Vec<usize>,
}

/// Row and column indices of an occurrence of a submatrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl OrderedMatrix {
    pub fn new(rows: usize, cols: usize, alphabet: Alphabet, data: Vec<usize>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return invalid("matrix dimensions must be positive");
        }
        if data.len() != rows * cols {
            return invalid(format!(
                "expected {} entries, got {}",
                rows * cols,
                data.len()
            ));
        }
        if let Some(&bad) = data.iter().find(|&&s| s >= alphabet.len()) {
            return invalid(format!("symbol index {bad} outside alphabet"));
        }
        Ok(OrderedMatrix {
            rows,
            cols,
            alphabet,
            data,
        })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        alphabet: Alphabet,
        mut f: impl FnMut(usize, usize) -> usize,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self::new(rows, cols, alphabet, data)
    }

    /// 0/1 matrix from a predicate. Panics on empty dimensions.
    pub fn binary_from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        Self::from_fn(rows, cols, Alphabet::binary(), |r, c| f(r, c) as usize)
            .expect("binary_from_fn needs positive dimensions")
    }

    pub fn binary_from_rows(rows: &[&[u8]]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != m || r.iter().any(|&v| v > 1)) {
            return invalid("ragged or non-binary rows");
        }
        Self::from_fn(n, m, Alphabet::binary(), |r, c| rows[r][c] as usize)
    }

    pub fn identity(k: usize) -> Self {
        Self::binary_from_fn(k, k, |r, c| r == c)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::binary_from_fn(rows, cols, |_, _| false)
    }

    /// The n×n checkerboard: entry (i,j) is 1 when i+j is odd.
    pub fn checkerboard(n: usize) -> Self {
        Self::binary_from_fn(n, n, |r, c| (r + c) % 2 == 1)
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn get(&self, r: usize, c: usize) -> usize {
        self.data[r * self.cols + c]
    }

    pub fn symbol(&self, r: usize, c: usize) -> &str {
        self.alphabet.symbol(self.get(r, c))
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[usize] {
        &self.data
    }

    /// Is the entry the symbol "1"? Convenient for 0/1 matrices.
    pub fn is_one(&self, r: usize, c: usize) -> bool {
        self.symbol(r, c) == "1"
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c));
            }
        }
        OrderedMatrix {
            rows: self.cols,
            cols: self.rows,
            alphabet: self.alphabet.clone(),
            data,
        }
    }

    /// Reverse the column order.
    pub fn mirror(&self) -> Self {
        let mut out = self.clone();
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[r * self.cols + c] = self.get(r, self.cols - 1 - c);
            }
        }
        out
    }

    /// Entrywise 1 - x on a 0/1 matrix.
    pub fn complement(&self) -> Result<Self> {
        if !self.alphabet.is_binary() {
            return invalid("complement needs a 0/1 matrix");
        }
        Ok(Self::binary_from_fn(self.rows, self.cols, |r, c| {
            self.symbol(r, c) == "0"
        }))
    }

    pub fn count(&self, symbol: usize) -> usize {
        self.data.iter().filter(|&&s| s == symbol).count()
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        check_indices(rows, self.rows, "row")?;
        check_indices(cols, self.cols, "column")?;
        Self::from_fn(rows.len(), cols.len(), self.alphabet.clone(), |r, c| {
            self.get(rows[r], cols[c])
        })
    }

    /// 0/1 matrix marking the occurrences of `a`.
    pub fn a_selection(&self, a: &str) -> Result<Self> {
        let Some(a) = self.alphabet.index_of(a) else {
            return invalid(format!("symbol {a:?} not in alphabet"));
        };
        Ok(Self::binary_from_fn(self.rows, self.cols, |r, c| {
            self.get(r, c) == a
        }))
    }

    /// Lexicographically least occurrence of `pattern` (by row set, then column
    /// set). Symbols are matched by token.
    pub fn contains_submatrix(&self, pattern: &OrderedMatrix) -> Option<Placement> {
        if pattern.rows > self.rows || pattern.cols > self.cols {
            return None;
        }
        let mut target = Vec::with_capacity(pattern.data.len());
        for &s in &pattern.data {
            target.push(self.alphabet.index_of(pattern.alphabet.symbol(s))?);
        }
        let mut chosen = Vec::with_capacity(pattern.rows);
        let cols = self.place_rows(pattern, &target, 0, &mut chosen)?;
        Some(Placement { rows: chosen, cols })
    }

    fn place_rows(
        &self,
        pattern: &OrderedMatrix,
        target: &[usize],
        start: usize,
        chosen: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        let depth = chosen.len();
        if depth == pattern.rows {
            return self.greedy_cols(pattern, target, chosen);
        }
        let last = self.rows - (pattern.rows - depth);
        for r in start..=last {
            chosen.push(r);
            if self.greedy_cols(pattern, target, chosen).is_some() {
                if let Some(cols) = self.place_rows(pattern, target, r + 1, chosen) {
                    return Some(cols);
                }
            }
            chosen.pop();
        }
        None
    }

    // Leftmost column embedding for the rows chosen so far; leftmost matching is
    // optimal for subsequence embedding, so failure here is final.
    fn greedy_cols(&self, pattern: &OrderedMatrix, target: &[usize], rows: &[usize]) -> Option<Vec<usize>> {
        let mut cols = Vec::with_capacity(pattern.cols);
        let mut c = 0;
        for j in 0..pattern.cols {
            loop {
                if c >= self.cols {
                    return None;
                }
                let ok = rows
                    .iter()
                    .enumerate()
                    .all(|(i, &r)| self.get(r, c) == target[i * pattern.cols + j]);
                c += 1;
                if ok {
                    cols.push(c - 1);
                    break;
                }
            }
        }
        Some(cols)
    }
}

fn check_indices(idx: &[usize], bound: usize, what: &str) -> Result<()> {
    if idx.is_empty() {
        return invalid(format!("empty {what} index list"));
    }
    if idx.windows(2).any(|w| w[0] >= w[1]) {
        return invalid(format!("{what} indices must be strictly increasing"));
    }
    if idx[idx.len() - 1] >= bound {
        return invalid(format!("{what} index {} out of range", idx[idx.len() - 1]));
    }
    Ok(())
}

impl fmt::Display for OrderedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let line: Vec<&str> = (0..self.cols).map(|c| self.symbol(r, c)).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}
