use std::collections::BTreeSet;
use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::graph::OrderedGraph;
use crate::matrix::{Alphabet, OrderedMatrix};

/// Domain 0..n with the implicit numeric order plus named unary and binary
/// relations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderedBinaryStructure {
    n: usize,
    unary: Vec<(String, Vec<bool>)>,
    binary: Vec<(String, Vec<bool>)>,
}

pub(crate) fn is_relation_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl OrderedBinaryStructure {
    pub fn new(n: usize) -> Self {
        OrderedBinaryStructure {
            n,
            unary: Vec::new(),
            binary: Vec::new(),
        }
    }

    pub fn domain_size(&self) -> usize {
        self.n
    }

    fn check_name(&self, name: &str) -> Result<()> {
        if !is_relation_name(name) {
            return invalid(format!("bad relation name {name:?}"));
        }
        if self.unary_index(name).is_some() || self.binary_index(name).is_some() {
            return invalid(format!("duplicate relation name {name:?}"));
        }
        Ok(())
    }

    pub fn add_unary(&mut self, name: &str, members: &[usize]) -> Result<()> {
        self.check_name(name)?;
        let mut set = vec![false; self.n];
        for &x in members {
            if x >= self.n {
                return invalid(format!("element {x} outside domain"));
            }
            set[x] = true;
        }
        self.unary.push((name.to_string(), set));
        Ok(())
    }

    pub fn add_binary(&mut self, name: &str, pairs: &[(usize, usize)]) -> Result<()> {
        self.check_name(name)?;
        let mut set = vec![false; self.n * self.n];
        for &(x, y) in pairs {
            if x >= self.n || y >= self.n {
                return invalid(format!("pair ({x},{y}) outside domain"));
            }
            set[x * self.n + y] = true;
        }
        self.binary.push((name.to_string(), set));
        Ok(())
    }

    pub(crate) fn add_unary_fn(&mut self, name: &str, f: impl Fn(usize) -> bool) -> Result<()> {
        let members: Vec<usize> = (0..self.n).filter(|&x| f(x)).collect();
        self.add_unary(name, &members)
    }

    pub(crate) fn add_binary_fn(&mut self, name: &str, f: impl Fn(usize, usize) -> bool) -> Result<()> {
        let mut pairs = Vec::new();
        for x in 0..self.n {
            for y in 0..self.n {
                if f(x, y) {
                    pairs.push((x, y));
                }
            }
        }
        self.add_binary(name, &pairs)
    }

    pub fn unary_names(&self) -> impl Iterator<Item = &str> {
        self.unary.iter().map(|(n, _)| n.as_str())
    }

    pub fn binary_names(&self) -> impl Iterator<Item = &str> {
        self.binary.iter().map(|(n, _)| n.as_str())
    }

    pub fn n_unary(&self) -> usize {
        self.unary.len()
    }

    pub fn n_binary(&self) -> usize {
        self.binary.len()
    }

    pub fn unary_index(&self, name: &str) -> Option<usize> {
        self.unary.iter().position(|(n, _)| n == name)
    }

    pub fn binary_index(&self, name: &str) -> Option<usize> {
        self.binary.iter().position(|(n, _)| n == name)
    }

    pub fn unary_holds(&self, rel: usize, x: usize) -> bool {
        self.unary[rel].1[x]
    }

    pub fn binary_holds(&self, rel: usize, x: usize, y: usize) -> bool {
        self.binary[rel].1[x * self.n + y]
    }

    pub fn unary_members(&self, rel: usize) -> Vec<usize> {
        (0..self.n).filter(|&x| self.unary_holds(rel, x)).collect()
    }

    pub fn binary_pairs(&self, rel: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.n {
            for y in 0..self.n {
                if self.binary_holds(rel, x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// A graph as a structure with one symmetric relation `E`.
    pub fn from_graph(g: &OrderedGraph) -> Self {
        let mut s = Self::new(g.n_vertices());
        s.add_binary_fn("E", |x, y| x != y && g.has_edge(x, y))
            .expect("fresh structure");
        s
    }

    /// Read binary relation `name` as an undirected graph (either direction
    /// gives an edge; loops are dropped).
    pub fn to_graph(&self, name: &str) -> Result<OrderedGraph> {
        let rel = self
            .binary_index(name)
            .ok_or_else(|| Error::InvalidArgument(format!("no binary relation {name:?}")))?;
        OrderedGraph::from_fn(self.n, |x, y| {
            self.binary_holds(rel, x, y) || self.binary_holds(rel, y, x)
        })
    }

    /// The matrix seen as a structure: rows then columns, unary `R` and `C`,
    /// and one binary relation per symbol linking a row to a column.
    pub fn from_matrix(m: &OrderedMatrix) -> Self {
        let (n, k) = (m.n_rows(), m.n_cols());
        let mut s = Self::new(n + k);
        s.add_unary_fn("R", |x| x < n).expect("fresh");
        s.add_unary_fn("C", |x| x >= n).expect("fresh");
        for a in 0..m.alphabet().len() {
            let name = matrix_relation_name(m.alphabet(), a);
            s.add_binary_fn(&name, |x, y| x < n && y >= n && m.get(x, y - n) == a)
                .expect("symbol relation names are distinct");
        }
        s
    }

    pub fn atomic_type(&self, a: usize, b: usize) -> AtomicType {
        AtomicType {
            order: OrderType::of(a, b),
            unary_x: (0..self.unary.len()).map(|u| self.unary_holds(u, a)).collect(),
            unary_y: (0..self.unary.len()).map(|u| self.unary_holds(u, b)).collect(),
            binary: (0..self.binary.len())
                .map(|e| (self.binary_holds(e, a, b), self.binary_holds(e, b, a)))
                .collect(),
        }
    }

    /// n×n matrix whose (a,b) entry is the atomic type of (a,b). The alphabet is
    /// the sorted set of occurring type tokens.
    pub fn adjacency_matrix(&self) -> Result<OrderedMatrix> {
        self.matrix_of(|a, b| self.atomic_type(a, b).token())
    }

    /// Per binary relation, -1/0/1/2 for the four combinations of E(x,y), E(y,x).
    pub fn mixed_symmetric_encoding(&self) -> Result<OrderedMatrix> {
        self.matrix_of(|a, b| {
            let parts: Vec<String> = (0..self.binary.len())
                .map(|e| {
                    match (self.binary_holds(e, a, b), self.binary_holds(e, b, a)) {
                        (false, false) => "0",
                        (true, false) => "1",
                        (false, true) => "-1",
                        (true, true) => "2",
                    }
                    .to_string()
                })
                .collect();
            format!("({})", parts.join(","))
        })
    }

    fn matrix_of(&self, token: impl Fn(usize, usize) -> String) -> Result<OrderedMatrix> {
        let mut tokens = Vec::with_capacity(self.n * self.n);
        for a in 0..self.n {
            for b in 0..self.n {
                tokens.push(token(a, b));
            }
        }
        let symbols: BTreeSet<&String> = tokens.iter().collect();
        let alphabet = Alphabet::new(symbols.iter().map(|s| s.to_string()))?;
        let data = tokens
            .iter()
            .map(|t| alphabet.index_of(t).expect("collected above"))
            .collect();
        OrderedMatrix::new(self.n, self.n, alphabet, data)
    }
}

/// Relation name used for symbol `a` when a matrix is turned into a structure.
pub fn matrix_relation_name(alphabet: &Alphabet, a: usize) -> String {
    let token = alphabet.symbol(a);
    if token.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        format!("E_{token}")
    } else {
        format!("E_s{a}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrderType {
    Less,
    Equal,
    Greater,
}

impl OrderType {
    pub fn of(a: usize, b: usize) -> Self {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => OrderType::Less,
            std::cmp::Ordering::Equal => OrderType::Equal,
            std::cmp::Ordering::Greater => OrderType::Greater,
        }
    }
}

/// Quantifier-free type of a pair (x,y): order, unary memberships of both, and
/// both directions of every binary relation, relative to a structure's
/// relation lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomicType {
    pub order: OrderType,
    pub unary_x: Vec<bool>,
    pub unary_y: Vec<bool>,
    pub binary: Vec<(bool, bool)>,
}

fn bits(v: impl Iterator<Item = bool>) -> String {
    v.map(|b| if b { '1' } else { '0' }).collect()
}

impl AtomicType {
    /// Canonical token, e.g. `lt_u01_v00_e1001`.
    pub fn token(&self) -> String {
        let ord = match self.order {
            OrderType::Less => "lt",
            OrderType::Equal => "eq",
            OrderType::Greater => "gt",
        };
        format!(
            "{ord}_u{}_v{}_e{}",
            bits(self.unary_x.iter().copied()),
            bits(self.unary_y.iter().copied()),
            bits(self.binary.iter().flat_map(|&(a, b)| [a, b]))
        )
    }

    pub fn parse_token(token: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad atomic type token {token:?}"));
        let parts: Vec<&str> = token.split('_').collect();
        if parts.len() != 4 {
            return Err(bad());
        }
        let order = match parts[0] {
            "lt" => OrderType::Less,
            "eq" => OrderType::Equal,
            "gt" => OrderType::Greater,
            _ => return Err(bad()),
        };
        let field = |s: &str, prefix: char| -> Result<Vec<bool>> {
            let rest = s.strip_prefix(prefix).ok_or_else(bad)?;
            rest.chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(bad()),
                })
                .collect()
        };
        let unary_x = field(parts[1], 'u')?;
        let unary_y = field(parts[2], 'v')?;
        let e = field(parts[3], 'e')?;
        if unary_x.len() != unary_y.len() || e.len() % 2 != 0 {
            return Err(bad());
        }
        let binary = e.chunks(2).map(|p| (p[0], p[1])).collect();
        Ok(AtomicType {
            order,
            unary_x,
            unary_y,
            binary,
        })
    }
}

impl fmt::Display for AtomicType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token())
    }
}
