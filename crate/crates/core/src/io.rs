//! Text formats. Everything here is 1-based; the library is 0-based.
//!
//! Blank lines and lines starting with `#` are ignored everywhere.

use std::fmt::Write;

use crate::contraction::{ContractionSequence, Merge, Side};
use crate::divisions::{Division, LatinCell, LatinWitness};
use crate::error::{Error, Result};
use crate::graph::OrderedGraph;
use crate::matrix::{Alphabet, OrderedMatrix};
use crate::structure::OrderedBinaryStructure;

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn lines(text: &str) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i, l.split_whitespace().collect()))
        .collect()
}

fn last_line(text: &str) -> usize {
    text.lines().count().max(1)
}

fn num(line: usize, tok: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| err(line, format!("expected a non-negative integer, found {tok:?}")))
}

/// A 1-based index in 1..=bound, returned 0-based.
fn index(line: usize, tok: &str, bound: usize) -> Result<usize> {
    let v = num(line, tok)?;
    if v == 0 || v > bound {
        return Err(err(line, format!("index {v} outside 1..{bound}")));
    }
    Ok(v - 1)
}

/// `n m`, an optional alphabet line (omitted means `0 1`), then n rows.
pub fn parse_matrix(text: &str) -> Result<OrderedMatrix> {
    let ls = lines(text);
    let Some((hl, header)) = ls.first() else {
        return Err(err(1, "empty matrix file"));
    };
    if header.len() != 2 {
        return Err(err(*hl, "header must be `n m`"));
    }
    let (n, m) = (num(*hl, header[0])?, num(*hl, header[1])?);
    if n == 0 || m == 0 {
        return Err(err(*hl, "dimensions must be positive"));
    }
    let rest = &ls[1..];
    let (alphabet, rows) = if rest.len() == n + 1 {
        let (al, toks) = &rest[0];
        let a = Alphabet::new(toks.iter().copied()).map_err(|e| err(*al, e.to_string()))?;
        (a, &rest[1..])
    } else if rest.len() == n {
        (Alphabet::binary(), rest)
    } else if rest.len() < n {
        return Err(err(last_line(text), format!("expected {n} rows, found {}", rest.len())));
    } else {
        return Err(err(rest[n + 1].0, "more rows than declared"));
    };
    let mut data = Vec::with_capacity(n * m);
    for (l, toks) in rows {
        if toks.len() != m {
            return Err(err(*l, format!("expected {m} entries, found {}", toks.len())));
        }
        for t in toks {
            data.push(
                alphabet
                    .index_of(t)
                    .ok_or_else(|| err(*l, format!("unknown symbol {t:?}")))?,
            );
        }
    }
    OrderedMatrix::new(n, m, alphabet, data).map_err(|e| err(*hl, e.to_string()))
}

pub fn serialize_matrix(m: &OrderedMatrix) -> String {
    let mut out = format!("{} {}\n{}\n", m.n_rows(), m.n_cols(), m.alphabet().symbols().join(" "));
    out.push_str(&m.to_string());
    out
}

/// Same content with the first row printed last, the way pattern figures are
/// usually drawn. Not parseable back.
pub fn render_bottom_first(m: &OrderedMatrix) -> String {
    let mut out = String::new();
    for r in (0..m.n_rows()).rev() {
        let line: Vec<&str> = (0..m.n_cols()).map(|c| m.symbol(r, c)).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

/// `n` then one `i j` edge per line.
pub fn parse_graph(text: &str) -> Result<OrderedGraph> {
    let ls = lines(text);
    let Some((hl, header)) = ls.first() else {
        return Err(err(1, "empty graph file"));
    };
    if header.len() != 1 {
        return Err(err(*hl, "header must be the vertex count"));
    }
    let n = num(*hl, header[0])?;
    let mut g = OrderedGraph::new(n).map_err(|e| err(*hl, e.to_string()))?;
    for (l, toks) in &ls[1..] {
        if toks.len() != 2 {
            return Err(err(*l, "edge lines are `i j`"));
        }
        let (u, v) = (index(*l, toks[0], n)?, index(*l, toks[1], n)?);
        g.add_edge(u, v).map_err(|e| err(*l, e.to_string()))?;
    }
    Ok(g)
}

pub fn serialize_graph(g: &OrderedGraph) -> String {
    let mut out = format!("{}\n", g.n_vertices());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{} {}", u + 1, v + 1);
    }
    out
}

/// `n`, then `unary NAME i...` lines and `binary NAME` blocks of `i j` lines
/// closed by `end`.
pub fn parse_structure(text: &str) -> Result<OrderedBinaryStructure> {
    let ls = lines(text);
    let Some((hl, header)) = ls.first() else {
        return Err(err(1, "empty structure file"));
    };
    if header.len() != 1 {
        return Err(err(*hl, "header must be the domain size"));
    }
    let n = num(*hl, header[0])?;
    let mut s = OrderedBinaryStructure::new(n);
    let mut i = 1;
    while i < ls.len() {
        let (l, toks) = &ls[i];
        match toks.first().copied() {
            Some("unary") if toks.len() >= 2 => {
                let members = toks[2..]
                    .iter()
                    .map(|t| index(*l, t, n))
                    .collect::<Result<Vec<_>>>()?;
                s.add_unary(toks[1], &members).map_err(|e| err(*l, e.to_string()))?;
                i += 1;
            }
            Some("binary") if toks.len() == 2 => {
                let mut pairs = Vec::new();
                i += 1;
                loop {
                    let Some((pl, p)) = ls.get(i) else {
                        return Err(err(last_line(text), "binary block without `end`"));
                    };
                    i += 1;
                    if p.as_slice() == ["end"] {
                        break;
                    }
                    if p.len() != 2 {
                        return Err(err(*pl, "pair lines are `i j`"));
                    }
                    pairs.push((index(*pl, p[0], n)?, index(*pl, p[1], n)?));
                }
                s.add_binary(toks[1], &pairs).map_err(|e| err(*l, e.to_string()))?;
            }
            _ => return Err(err(*l, "expected `unary NAME ...` or `binary NAME`")),
        }
    }
    Ok(s)
}

pub fn serialize_structure(s: &OrderedBinaryStructure) -> String {
    let mut out = format!("{}\n", s.domain_size());
    for (u, name) in s.unary_names().enumerate() {
        let mut line = format!("unary {name}");
        for x in s.unary_members(u) {
            let _ = write!(line, " {}", x + 1);
        }
        out.push_str(&line);
        out.push('\n');
    }
    for (b, name) in s.binary_names().enumerate() {
        let _ = writeln!(out, "binary {name}");
        for (x, y) in s.binary_pairs(b) {
            let _ = writeln!(out, "{} {}", x + 1, y + 1);
        }
        out.push_str("end\n");
    }
    out
}

fn cut_line(letter: char, cuts: &[usize]) -> String {
    let mut line = letter.to_string();
    for c in cuts {
        let _ = write!(line, " {c}");
    }
    line
}

/// Reads the `R ...` / `C ...` cut lines; other lines go to `other`.
fn parse_cuts<'a>(
    ls: &'a [(usize, Vec<&'a str>)],
    n: usize,
    m: usize,
) -> Result<(Division, Vec<&'a (usize, Vec<&'a str>)>)> {
    let (mut rows, mut cols) = (None, None);
    let mut other = Vec::new();
    for entry in ls {
        let (l, toks) = entry;
        let slot = match toks[0] {
            "R" => &mut rows,
            "C" => &mut cols,
            _ => {
                other.push(entry);
                continue;
            }
        };
        if slot.is_some() {
            return Err(err(*l, "cut line given twice"));
        }
        let cuts = toks[1..].iter().map(|t| num(*l, t)).collect::<Result<Vec<_>>>()?;
        *slot = Some((*l, cuts));
    }
    let (rl, rc) = rows.unwrap_or((1, vec![]));
    let (cl, cc) = cols.unwrap_or((1, vec![]));
    let d = Division::new(n, m, rc, vec![]).map_err(|e| err(rl, e.to_string()))?;
    let d = Division::new(n, m, d.row_cuts().to_vec(), cc).map_err(|e| err(cl, e.to_string()))?;
    Ok((d, other))
}

/// `R c1 c2 ...` and `C c1 c2 ...`: a cut after line c.
pub fn parse_division(text: &str, n_rows: usize, n_cols: usize) -> Result<Division> {
    let ls = lines(text);
    let (d, other) = parse_cuts(&ls, n_rows, n_cols)?;
    if let Some((l, _)) = other.first() {
        return Err(err(*l, "expected `R ...` or `C ...`"));
    }
    Ok(d)
}

pub fn serialize_division(d: &Division) -> String {
    format!("{}\n{}\n", cut_line('R', d.row_cuts()), cut_line('C', d.col_cuts()))
}

/// Division lines plus one `i j member r1 c1` line per cell.
pub fn parse_latin_witness(text: &str, n_rows: usize, n_cols: usize) -> Result<LatinWitness> {
    let ls = lines(text);
    let (division, other) = parse_cuts(&ls, n_rows, n_cols)?;
    let mut cells = Vec::new();
    for (l, toks) in other {
        if toks.len() != 5 {
            return Err(err(*l, "cell lines are `i j member r1 c1`"));
        }
        let v = toks.iter().map(|t| num(*l, t)).collect::<Result<Vec<_>>>()?;
        if v.iter().any(|&x| x == 0) {
            return Err(err(*l, "indices are 1-based"));
        }
        cells.push(LatinCell {
            i: v[0] - 1,
            j: v[1] - 1,
            member: v[2],
            row_start: v[3] - 1,
            col_start: v[4] - 1,
        });
    }
    Ok(LatinWitness { division, cells })
}

pub fn serialize_latin_witness(w: &LatinWitness) -> String {
    let mut out = serialize_division(&w.division);
    for c in &w.cells {
        let _ = writeln!(out, "{} {} {} {} {}", c.i + 1, c.j + 1, c.member, c.row_start + 1, c.col_start + 1);
    }
    out
}

/// One `R a b` or `C a b` line per merge, blocks named by their minimum.
pub fn parse_sequence(text: &str, n_rows: usize, n_cols: usize) -> Result<ContractionSequence> {
    let mut merges = Vec::new();
    for (l, toks) in lines(text) {
        let side = match toks.first().copied() {
            Some("R") => Side::Rows,
            Some("C") => Side::Cols,
            _ => return Err(err(l, "expected `R a b` or `C a b`")),
        };
        if toks.len() != 3 {
            return Err(err(l, "expected `R a b` or `C a b`"));
        }
        let bound = if side == Side::Rows { n_rows } else { n_cols };
        merges.push(Merge {
            side,
            a: index(l, toks[1], bound)?,
            b: index(l, toks[2], bound)?,
        });
    }
    ContractionSequence::from_merges(n_rows, n_cols, &merges)
}

pub fn serialize_sequence(seq: &ContractionSequence) -> String {
    let mut out = String::new();
    for mv in seq.merges() {
        let _ = writeln!(out, "{} {} {}", mv.side.letter(), mv.a + 1, mv.b + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anti_identity_file() {
        let m = parse_matrix("2 2\n0 1\n0 1\n1 0\n").unwrap();
        assert_eq!(m, OrderedMatrix::identity(2).mirror());
        let m2 = parse_matrix("2 2\n0 1\n1 0\n").unwrap();
        assert_eq!(m2, m);
    }

    #[test]
    fn matrix_errors_carry_lines() {
        let e = parse_matrix("2 2\n0 1\n0 1 1\n1 0\n").unwrap_err();
        assert_eq!(e, err(3, "expected 2 entries, found 3"));
        assert!(matches!(parse_matrix("2 2\na b\n").unwrap_err(), Error::Parse { .. }));
        assert!(matches!(parse_matrix("2\n").unwrap_err(), Error::Parse { line: 1, .. }));
        assert!(matches!(parse_matrix("1 2\n0 2\n").unwrap_err(), Error::Parse { line: 2, .. }));
    }

    #[test]
    fn structure_round_trip() {
        let mut s = OrderedBinaryStructure::new(3);
        s.add_unary("U", &[0, 2]).unwrap();
        s.add_unary("V", &[]).unwrap();
        s.add_binary("E", &[(0, 1), (2, 2)]).unwrap();
        let text = serialize_structure(&s);
        assert_eq!(parse_structure(&text).unwrap(), s);
    }

    #[test]
    fn sequence_round_trip() {
        let seq = parse_sequence("R 1 2\nC 1 3\nC 1 2\n", 2, 3).unwrap();
        assert_eq!(serialize_sequence(&seq), "R 1 2\nC 1 3\nC 1 2\n");
        assert!(matches!(parse_sequence("R 1 4\n", 2, 3), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn division_round_trip() {
        let d = parse_division("R 2 4\nC 3\n", 6, 5).unwrap();
        assert_eq!(d.row_parts(), vec![0..2, 2..4, 4..6]);
        assert_eq!(parse_division(&serialize_division(&d), 6, 5).unwrap(), d);
        assert!(parse_division("R 6\n", 6, 5).is_err());
    }
}
