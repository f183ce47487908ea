//! Permutations, the pattern matrices F_s and F_η, the shuffle reduction,
//! ordered matchings and the classes built from them, and slice enumeration.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;

use crate::error::{invalid, Error, Result};
use crate::graph::OrderedGraph;
use crate::matrix::OrderedMatrix;

/// A bijection on 0..n, stored as its list of images.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &v in &images {
            if v >= images.len() || seen[v] {
                return invalid(format!("{images:?} is not a permutation"));
            }
            seen[v] = true;
        }
        Ok(Permutation(images))
    }

    /// From 1-based one-line notation.
    pub fn from_one_line(values: &[usize]) -> Result<Self> {
        if values.contains(&0) {
            return invalid("one-line notation is 1-based");
        }
        Self::new(values.iter().map(|v| v - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// Every permutation of 0..n in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut cur: Vec<usize> = (0..n).collect();
        let mut out = vec![Permutation(cur.clone())];
        while next_permutation(&mut cur) {
            out.push(Permutation(cur.clone()));
        }
        out
    }

    /// One-line (`3 4 5 2 1`, `34521`) or cycle notation (`(135)(24)`). Cycles
    /// may separate entries by spaces or commas; without separators every digit
    /// is an entry.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.contains('(') {
            return Self::parse_cycles(text);
        }
        let toks: Vec<&str> = text.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).collect();
        let values = if toks.len() == 1 && toks[0].len() > 1 {
            digits(toks[0])?
        } else {
            toks.iter()
                .map(|t| t.parse::<usize>().map_err(|_| Error::InvalidArgument(format!("bad entry {t:?}"))))
                .collect::<Result<Vec<_>>>()?
        };
        Self::from_one_line(&values)
    }

    fn parse_cycles(text: &str) -> Result<Self> {
        let mut cycles = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            rest = rest.trim_start();
            let Some(body) = rest.strip_prefix('(') else {
                return invalid(format!("bad cycle notation {text:?}"));
            };
            let Some(end) = body.find(')') else {
                return invalid(format!("unclosed cycle in {text:?}"));
            };
            let inner = &body[..end];
            let toks: Vec<&str> = inner.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).collect();
            let cycle = if toks.len() == 1 {
                digits(toks[0])?
            } else {
                toks.iter()
                    .map(|t| t.parse::<usize>().map_err(|_| Error::InvalidArgument(format!("bad entry {t:?}"))))
                    .collect::<Result<Vec<_>>>()?
            };
            cycles.push(cycle);
            rest = body[end + 1..].trim_start();
        }
        let n = cycles.iter().flatten().copied().max().unwrap_or(0);
        let mut images: Vec<usize> = (0..n).collect();
        let mut moved = vec![false; n];
        for c in &cycles {
            for (t, &v) in c.iter().enumerate() {
                if v == 0 || moved[v - 1] {
                    return invalid(format!("bad or repeated cycle entry {v}"));
                }
                moved[v - 1] = true;
                images[v - 1] = c[(t + 1) % c.len()] - 1;
            }
        }
        Self::new(images)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v] = i;
        }
        Permutation(inv)
    }

    pub fn one_line(&self) -> Vec<usize> {
        self.0.iter().map(|v| v + 1).collect()
    }
}

fn digits(tok: &str) -> Result<Vec<usize>> {
    tok.chars()
        .map(|c| {
            c.to_digit(10)
                .map(|d| d as usize)
                .ok_or_else(|| Error::InvalidArgument(format!("bad digit {c:?}")))
        })
        .collect()
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_line().iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

/// -1 if x > y, 0 if equal, 1 if x < y.
pub fn order_type(x: usize, y: usize) -> i8 {
    match x.cmp(&y) {
        std::cmp::Ordering::Greater => -1,
        std::cmp::Ordering::Equal => 0,
        std::cmp::Ordering::Less => 1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternSymbol {
    Eq,
    Neq,
    LeR,
    GeR,
    LeC,
    GeC,
}

impl PatternSymbol {
    pub const ALL: [PatternSymbol; 6] = [
        PatternSymbol::Eq,
        PatternSymbol::Neq,
        PatternSymbol::LeR,
        PatternSymbol::GeR,
        PatternSymbol::LeC,
        PatternSymbol::GeC,
    ];

    /// Matrix names (`eq`, `leR`, `<=C`, ...) and graph aliases (`lel` = `leR`,
    /// `ler` = `leC`, ...). Case matters for the R/C versus l/r suffix.
    pub fn parse(tok: &str) -> Result<Self> {
        use PatternSymbol::*;
        Ok(match tok {
            "=" | "eq" => Eq,
            "!=" | "≠" | "neq" => Neq,
            "leR" | "<=R" | "≤R" | "lel" | "<=l" | "≤l" => LeR,
            "geR" | ">=R" | "≥R" | "gel" | ">=l" | "≥l" => GeR,
            "leC" | "<=C" | "≤C" | "ler" | "<=r" | "≤r" => LeC,
            "geC" | ">=C" | "≥C" | "ger" | ">=r" | "≥r" => GeC,
            _ => return invalid(format!("unknown pattern symbol {tok:?}")),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            PatternSymbol::Eq => "eq",
            PatternSymbol::Neq => "neq",
            PatternSymbol::LeR => "leR",
            PatternSymbol::GeR => "geR",
            PatternSymbol::LeC => "leC",
            PatternSymbol::GeC => "geC",
        }
    }

    fn bracket(self, sigma: &Permutation, inv: &Permutation, i: usize, j: usize) -> bool {
        match self {
            PatternSymbol::Eq => sigma.apply(i) == j,
            PatternSymbol::Neq => sigma.apply(i) != j,
            PatternSymbol::LeR => i <= inv.apply(j),
            PatternSymbol::GeR => i >= inv.apply(j),
            PatternSymbol::LeC => j <= sigma.apply(i),
            PatternSymbol::GeC => j >= sigma.apply(i),
        }
    }
}

pub fn f_matrix_s(s: PatternSymbol, sigma: &Permutation) -> Result<OrderedMatrix> {
    let k = sigma.len();
    if k == 0 {
        return invalid("empty permutation");
    }
    let inv = sigma.inverse();
    Ok(OrderedMatrix::binary_from_fn(k, k, |i, j| s.bracket(sigma, &inv, i, j)))
}

/// A map {-1,1}² → {0,1}, stored in the order (-1,-1), (-1,1), (1,-1), (1,1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EncodingEta([bool; 4]);

fn slot(x: i8, y: i8) -> usize {
    ((x == 1) as usize) * 2 + (y == 1) as usize
}

impl EncodingEta {
    pub fn from_fn(f: impl Fn(i8, i8) -> bool) -> Self {
        EncodingEta([f(-1, -1), f(-1, 1), f(1, -1), f(1, 1)])
    }

    pub fn from_values(values: [bool; 4]) -> Self {
        EncodingEta(values)
    }

    /// All sixteen, by the 4-bit value read in slot order.
    pub fn all() -> Vec<EncodingEta> {
        (0..16u8)
            .map(|mask| EncodingEta(std::array::from_fn(|b| mask >> (3 - b) & 1 == 1)))
            .collect()
    }

    pub fn at(&self, x: i8, y: i8) -> bool {
        self.0[slot(x, y)]
    }

    pub fn depends_only_on_x(&self) -> bool {
        self.at(-1, -1) == self.at(-1, 1) && self.at(1, -1) == self.at(1, 1)
    }

    pub fn depends_only_on_y(&self) -> bool {
        self.at(-1, -1) == self.at(1, -1) && self.at(-1, 1) == self.at(1, 1)
    }

    pub fn is_one_coordinate(&self) -> bool {
        self.depends_only_on_x() || self.depends_only_on_y()
    }

    /// The one-coordinate encoding matching the bracket of `s` off the
    /// diagonal. For `geR` and `leC` the diagonal differs (strict versions).
    pub fn for_symbol(s: PatternSymbol) -> Self {
        match s {
            PatternSymbol::Eq => Self::from_fn(|_, _| false),
            PatternSymbol::Neq => Self::from_fn(|_, _| true),
            PatternSymbol::LeR => Self::from_fn(|x, _| x == -1),
            PatternSymbol::GeR => Self::from_fn(|x, _| x == 1),
            PatternSymbol::LeC => Self::from_fn(|_, y| y == 1),
            PatternSymbol::GeC => Self::from_fn(|_, y| y == -1),
        }
    }

    pub fn token(&self) -> String {
        self.0.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn parse(tok: &str) -> Result<Self> {
        let bits: Vec<bool> = tok
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => invalid(format!("bad eta token {tok:?}")),
            })
            .collect::<Result<_>>()?;
        let arr: [bool; 4] = bits
            .try_into()
            .map_err(|_| Error::InvalidArgument(format!("eta token {tok:?} needs 4 bits")))?;
        Ok(EncodingEta(arr))
    }
}

pub fn f_matrix_eta(eta: EncodingEta, sigma: &Permutation) -> Result<OrderedMatrix> {
    let k = sigma.len();
    if k == 0 {
        return invalid("empty permutation");
    }
    let inv = sigma.inverse();
    Ok(OrderedMatrix::binary_from_fn(k, k, |i, j| {
        if sigma.apply(i) == j {
            !eta.at(1, 1)
        } else {
            eta.at(order_type(inv.apply(j), i), order_type(j, sigma.apply(i)))
        }
    }))
}

/// The σ with F_η(σ) = M, if any.
///
/// Peels off the last row: there every other row lies above, so the row reads
/// η(1,1) before column σ(row), the value 1-η(1,1) at it, and η(1,-1) after.
/// σ(row) is therefore the first column holding 1-η(1,1). Deleting that row
/// and column leaves F_η of the restricted permutation.
pub fn decode_f(eta: EncodingEta, m: &OrderedMatrix) -> Option<Permutation> {
    let k = m.n_rows();
    if m.n_cols() != k || !m.alphabet().is_binary() {
        return None;
    }
    let target = !eta.at(1, 1);
    let mut cols: Vec<usize> = (0..k).collect();
    let mut images = vec![0; k];
    for row in (0..k).rev() {
        let pos = cols.iter().position(|&c| m.is_one(row, c) == target)?;
        images[row] = cols.remove(pos);
    }
    let sigma = Permutation::new(images).ok()?;
    (f_matrix_eta(eta, &sigma).ok()? == *m).then_some(sigma)
}

/// τ(i) = 2σ(i)-1 and τ(k+i) = 2i, in 1-based terms.
pub fn shuffle_permutation(sigma: &Permutation) -> Permutation {
    let k = sigma.len();
    let mut t = vec![0; 2 * k];
    for i in 0..k {
        t[i] = 2 * sigma.apply(i);
        t[k + i] = 2 * i + 1;
    }
    Permutation(t)
}

/// The mirrored shuffle: τ(i) = 2i and τ(k+i) = 2σ(i)-1, in 1-based terms.
pub fn upper_shuffle_permutation(sigma: &Permutation) -> Permutation {
    let k = sigma.len();
    let mut t = vec![0; 2 * k];
    for i in 0..k {
        t[i] = 2 * i + 1;
        t[k + i] = 2 * sigma.apply(i);
    }
    Permutation(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionCase {
    /// η already depends on one coordinate.
    OneCoordinate,
    /// η(-1,1) ≠ η(-1,-1): γ(x,y) = η(-1,y), plain shuffle, first k rows.
    Lower,
    /// η(1,1) ≠ η(1,-1): γ(x,y) = η(1,y), mirrored shuffle, last k rows.
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reduction {
    pub gamma: EncodingEta,
    pub case: ReductionCase,
}

impl Reduction {
    /// The permutation τ with F_γ(σ) inside F_η(τ).
    pub fn shuffle(&self, sigma: &Permutation) -> Permutation {
        match self.case {
            ReductionCase::OneCoordinate => sigma.clone(),
            ReductionCase::Lower => shuffle_permutation(sigma),
            ReductionCase::Upper => upper_shuffle_permutation(sigma),
        }
    }

    /// Where F_γ(σ) sits in F_η(shuffle(σ)) for σ of size k: even columns and
    /// the first or last k rows.
    pub fn placement(&self, k: usize) -> (Vec<usize>, Vec<usize>) {
        match self.case {
            ReductionCase::OneCoordinate => ((0..k).collect(), (0..k).collect()),
            ReductionCase::Lower => ((0..k).collect(), (0..k).map(|j| 2 * j + 1).collect()),
            ReductionCase::Upper => ((k..2 * k).collect(), (0..k).map(|j| 2 * j + 1).collect()),
        }
    }
}

pub fn reduce_eta(eta: EncodingEta) -> Reduction {
    if eta.is_one_coordinate() {
        Reduction {
            gamma: eta,
            case: ReductionCase::OneCoordinate,
        }
    } else if eta.at(-1, 1) != eta.at(-1, -1) {
        Reduction {
            gamma: EncodingEta::from_fn(|_, y| eta.at(-1, y)),
            case: ReductionCase::Lower,
        }
    } else {
        // Not one-coordinate and the x = -1 row is constant, so the x = 1 row
        // is not.
        Reduction {
            gamma: EncodingEta::from_fn(|_, y| eta.at(1, y)),
            case: ReductionCase::Upper,
        }
    }
}

/// i < j adjacent iff π(i) > π(j).
pub fn permutation_graph(pi: &Permutation) -> Result<OrderedGraph> {
    OrderedGraph::from_fn(pi.len(), |i, j| pi.apply(i) > pi.apply(j))
}

/// f: {-1,1} → {0,1} given as (f(-1), f(1)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrderFn(pub bool, pub bool);

impl OrderFn {
    pub fn constant(v: bool) -> Self {
        OrderFn(v, v)
    }

    pub fn at(&self, ot: i8) -> bool {
        if ot < 0 {
            self.0
        } else {
            self.1
        }
    }

    /// Two bits `f(-1)f(1)`.
    pub fn parse(tok: &str) -> Result<Self> {
        match tok {
            "00" => Ok(OrderFn(false, false)),
            "01" => Ok(OrderFn(false, true)),
            "10" => Ok(OrderFn(true, false)),
            "11" => Ok(OrderFn(true, true)),
            _ => invalid(format!("bad order function {tok:?}")),
        }
    }

    pub fn token(&self) -> String {
        format!("{}{}", self.0 as u8, self.1 as u8)
    }
}

/// Vertices a_1..a_n then b_1..b_n, a_i adjacent to b_j iff F_s(σ)(i,j) = 1.
pub fn s_sigma_matching(s: PatternSymbol, sigma: &Permutation) -> Result<OrderedGraph> {
    regular_matching(s, OrderFn::constant(false), OrderFn::constant(false), sigma)
}

/// The (s,σ)-matching plus a_i~a_j iff f(ot(σ(i),σ(j))) and b_i~b_j iff
/// g(ot(σ⁻¹(i),σ⁻¹(j))).
pub fn regular_matching(s: PatternSymbol, f: OrderFn, g: OrderFn, sigma: &Permutation) -> Result<OrderedGraph> {
    let n = sigma.len();
    if n == 0 {
        return invalid("empty permutation");
    }
    let inv = sigma.inverse();
    OrderedGraph::from_fn(2 * n, |u, v| match (u < n, v < n) {
        (true, true) => f.at(order_type(sigma.apply(u), sigma.apply(v))),
        (false, false) => g.at(order_type(inv.apply(u - n), inv.apply(v - n))),
        _ => s.bracket(sigma, &inv, u, v - n),
    })
}

/// Perfect matching a_i–b_{σ(i)} between the two halves.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderedMatching {
    pub sigma: Permutation,
}

impl OrderedMatching {
    pub fn half_size(&self) -> usize {
        self.sigma.len()
    }

    pub fn to_graph(&self) -> Result<OrderedGraph> {
        s_sigma_matching(PatternSymbol::Eq, &self.sigma)
    }

    /// Recognizes a graph on 2n vertices whose edges form a perfect matching
    /// between the first and second halves.
    pub fn from_graph(g: &OrderedGraph) -> Option<Self> {
        let n2 = g.n_vertices();
        if n2 % 2 != 0 {
            return None;
        }
        let n = n2 / 2;
        let mut images = Vec::with_capacity(n);
        for a in 0..n {
            let nb: Vec<usize> = g.neighbors(a).collect();
            if nb.len() != 1 || nb[0] < n {
                return None;
            }
            images.push(nb[0] - n);
        }
        if g.n_edges() != n {
            return None;
        }
        Permutation::new(images).ok().map(|sigma| OrderedMatching { sigma })
    }
}

/// H[s, λ, ρ]: constant intra-half adjacency λ on the left, ρ on the right.
pub fn m_class_graph(h: &OrderedMatching, s: PatternSymbol, lambda: bool, rho: bool) -> Result<OrderedGraph> {
    regular_matching(s, OrderFn::constant(lambda), OrderFn::constant(rho), &h.sigma)
}

/// μ_s(x, y; z) for x ≤ z < y: the pair the decoder reads as matched.
pub(crate) fn mu(s: PatternSymbol, g: &OrderedGraph, x: usize, y: usize, z: usize) -> bool {
    let e = |a, b| g.has_edge(a, b);
    match s {
        PatternSymbol::Eq | PatternSymbol::GeC => e(x, y) && (z + 1..y).all(|y2| !e(x, y2)),
        PatternSymbol::LeC => e(x, y) && (y + 1..g.n_vertices()).all(|y2| !e(x, y2)),
        PatternSymbol::Neq => !e(x, y) && (z + 1..y).all(|y2| e(x, y2)),
        PatternSymbol::LeR => e(x, y) && (x + 1..=z).all(|x2| !e(x2, y)),
        PatternSymbol::GeR => e(x, y) && (0..x).all(|x2| !e(x2, y)),
    }
}

/// Recover the matching from a graph of the (s, f, g) family: find the unique
/// z where μ_s(·,·;z) is a bijection between [0, z] and (z, n), and read the
/// matched pairs off μ.
pub fn decode_regular(s: PatternSymbol, g: &OrderedGraph) -> Option<OrderedMatching> {
    let n = g.n_vertices();
    let mut found = None;
    for z in 0..n {
        let mut images = Vec::with_capacity(z + 1);
        let mut hit = vec![0usize; n - z - 1];
        let mut ok = true;
        for x in 0..=z {
            let ys: Vec<usize> = (z + 1..n).filter(|&y| mu(s, g, x, y, z)).collect();
            if ys.len() != 1 {
                ok = false;
                break;
            }
            hit[ys[0] - z - 1] += 1;
            images.push(ys[0] - z - 1);
        }
        if ok && hit.iter().all(|&c| c == 1) && z + 1 == n - z - 1 {
            if found.is_some() {
                return None;
            }
            found = Some(images);
        }
    }
    let sigma = Permutation::new(found?).ok()?;
    Some(OrderedMatching { sigma })
}

/// Positions of the vertices in the graph-to-matching encoding.
struct EncodingLayout {
    n: usize,
    m: usize,
}

impl EncodingLayout {
    fn half(&self) -> usize {
        self.n + 2 + 3 * self.m
    }
    fn x(&self) -> usize {
        self.n
    }
    fn edge_minus(&self, k: usize) -> usize {
        self.n + 1 + 3 * k
    }
    fn edge_mid(&self, k: usize) -> usize {
        self.n + 2 + 3 * k
    }
    fn edge_plus(&self, k: usize) -> usize {
        self.n + 3 + 3 * k
    }
    fn y_prime(&self) -> usize {
        self.n + 1 + 3 * self.m
    }
}

/// Encode an ordered graph as an ordered matching.
///
/// Left side: v_1..v_n, x, then e'^-, e', e'^+ for every edge, then y'.
/// Right side: x', then for i = n down to 1 the incidence vertices ε_{i,·} of
/// v_i followed by v_i', then y, then the edge vertices e_m..e_1. Edges are
/// numbered lexicographically, and v_i's incidences follow the edge numbering.
/// ε_{i,j} is matched to e'^- when v_i is the smaller endpoint of that edge and
/// to e'^+ otherwise.
pub fn encode_graph_as_matching(g: &OrderedGraph) -> OrderedMatching {
    let edges = g.edges();
    let lay = EncodingLayout {
        n: g.n_vertices(),
        m: edges.len(),
    };
    let mut sigma = vec![usize::MAX; lay.half()];
    let mut right = 0;
    sigma[lay.x()] = right;
    right += 1;
    for i in (0..lay.n).rev() {
        for (k, &(u, _)) in edges.iter().enumerate().filter(|(_, &(u, v))| u == i || v == i) {
            sigma[if u == i { lay.edge_minus(k) } else { lay.edge_plus(k) }] = right;
            right += 1;
        }
        sigma[i] = right;
        right += 1;
    }
    sigma[lay.y_prime()] = right;
    right += 1;
    for k in (0..lay.m).rev() {
        sigma[lay.edge_mid(k)] = right;
        right += 1;
    }
    OrderedMatching {
        sigma: Permutation::new(sigma).expect("layout is a bijection"),
    }
}

/// Inverse of `encode_graph_as_matching`, following the definable
/// reconstruction: x' is the first right vertex and x its partner; y' is the
/// last left vertex and y its partner; the v_i are the left vertices before x.
/// An e'_k is a left vertex matched beyond y; its neighbours e'^-, e'^+ point
/// into the incidence blocks of the two endpoints. Returns `None` off the
/// image.
pub fn decode_matching_to_graph(h: &OrderedMatching) -> Option<OrderedGraph> {
    let half = h.half_size();
    if half < 3 {
        return None;
    }
    let sigma = &h.sigma;
    let x = sigma.inverse().apply(0);
    let y = sigma.apply(half - 1);
    let n = x;
    if n == 0 {
        return None;
    }
    let v_prime: Vec<usize> = (0..n).map(|i| sigma.apply(i)).collect();
    // Incidence block of v_i: strictly between v_{i+1}' (x' for the last
    // vertex) and v_i'.
    let lower = |i: usize| if i + 1 == n { 0 } else { v_prime[i + 1] };
    if (0..n).any(|i| lower(i) >= v_prime[i]) || v_prime[0] >= y {
        return None;
    }
    let block_of = |z: usize| (0..n).find(|&i| lower(i) < z && z < v_prime[i]);
    let mut g = OrderedGraph::new(n).ok()?;
    for p in x + 1..half - 1 {
        if sigma.apply(p) <= y {
            continue;
        }
        if p < x + 2 || p + 2 > half - 1 {
            return None;
        }
        let i = block_of(sigma.apply(p - 1))?;
        let j = block_of(sigma.apply(p + 1))?;
        if i >= j {
            return None;
        }
        g.add_edge(i, j).ok()?;
    }
    (encode_graph_as_matching(&g) == *h).then_some(g)
}

/// Hereditary classes whose slices can be enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassSpec {
    /// Ordered permutation graphs.
    Permutations,
    /// Graphs H[s, λ, ρ] over all matchings H.
    Matching { s: PatternSymbol, lambda: bool, rho: bool },
    /// (f, g)-regular (s, σ)-matchings.
    Regular { s: PatternSymbol, f: OrderFn, g: OrderFn },
}

impl ClassSpec {
    /// `P`, `M=00`, `Mneq11`, `Rler:f10:g01`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad class spec {text:?}"));
        if text == "P" {
            return Ok(ClassSpec::Permutations);
        }
        if let Some(rest) = text.strip_prefix('M') {
            if rest.len() < 3 || !rest.is_char_boundary(rest.len() - 2) {
                return Err(bad());
            }
            let (sym, bits) = rest.split_at(rest.len() - 2);
            let f = OrderFn::parse(bits).map_err(|_| bad())?;
            return Ok(ClassSpec::Matching {
                s: PatternSymbol::parse(sym)?,
                lambda: f.0,
                rho: f.1,
            });
        }
        if let Some(rest) = text.strip_prefix('R') {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 3 {
                return Err(bad());
            }
            let f = parts[1].strip_prefix('f').ok_or_else(bad)?;
            let g = parts[2].strip_prefix('g').ok_or_else(bad)?;
            return Ok(ClassSpec::Regular {
                s: PatternSymbol::parse(parts[0])?,
                f: OrderFn::parse(f)?,
                g: OrderFn::parse(g)?,
            });
        }
        Err(bad())
    }

    fn generator(&self, sigma: &Permutation) -> Result<OrderedGraph> {
        match *self {
            ClassSpec::Permutations => permutation_graph(sigma),
            ClassSpec::Matching { s, lambda, rho } => {
                regular_matching(s, OrderFn::constant(lambda), OrderFn::constant(rho), sigma)
            }
            ClassSpec::Regular { s, f, g } => regular_matching(s, f, g, sigma),
        }
    }
}

pub const DEFAULT_SLICE_GUARD: usize = 6;

/// All n-vertex graphs of the class, sorted and deduplicated. Permutation
/// graphs come straight from S_n; matching classes take every n-subset of the
/// generators of half-size n.
pub fn enumerate_slice(spec: ClassSpec, n: usize, guard: usize) -> Result<Vec<OrderedGraph>> {
    if n > guard {
        return Err(Error::ResourceLimit(format!("slice size {n} exceeds guard {guard}")));
    }
    let half = if spec == ClassSpec::Permutations { n } else { n.max(1) };
    slice_from_generators(spec, n, half)
}

/// n-vertex induced subgraphs of the generators built from S_half.
pub fn slice_from_generators(spec: ClassSpec, n: usize, half: usize) -> Result<Vec<OrderedGraph>> {
    if n == 0 {
        return invalid("slices start at n = 1");
    }
    let mut seen: HashMap<Vec<u64>, OrderedGraph> = HashMap::new();
    for sigma in Permutation::all(half) {
        let g = spec.generator(&sigma)?;
        if g.n_vertices() < n {
            continue;
        }
        let mut subset: Vec<usize> = (0..n).collect();
        loop {
            let sub = g.induced(&subset)?;
            seen.entry(sub.key()).or_insert(sub);
            if !next_subset(&mut subset, g.n_vertices()) {
                break;
            }
        }
    }
    let mut out: Vec<OrderedGraph> = seen.into_values().collect();
    out.sort();
    Ok(out)
}

fn next_subset(s: &mut [usize], n: usize) -> bool {
    let k = s.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if s[i] < n - (k - i) {
            s[i] += 1;
            for j in i + 1..k {
                s[j] = s[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Σ_k C(n, 2k) k!.
pub fn growth_formula(n: u32) -> BigUint {
    let mut total = BigUint::from(0u32);
    let mut binom = BigUint::from(1u32); // C(n, j), updated as j advances
    let mut fact = BigUint::from(1u32);
    for j in 0..=n {
        if j > 0 {
            binom = binom * BigUint::from(n - j + 1) / BigUint::from(j);
        }
        if j % 2 == 0 {
            if j > 0 {
                fact *= BigUint::from(j / 2);
            }
            total += &binom * &fact;
        }
    }
    total
}
