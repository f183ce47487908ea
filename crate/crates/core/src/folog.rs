//! First-order formulas over ordered binary structures: parser, printer, a
//! naive evaluator with an atom budget, simple interpretations, and the
//! matrix-sentence rewriting.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::graph::OrderedGraph;
use crate::patterns::{OrderedMatching, PatternSymbol};
use crate::structure::{is_relation_name, AtomicType, OrderType, OrderedBinaryStructure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sort {
    Row,
    Col,
}

impl Sort {
    fn guard(self) -> &'static str {
        match self {
            Sort::Row => "R",
            Sort::Col => "C",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Less(String, String),
    Equal(String, String),
    Unary(String, String),
    Binary(String, String, String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(String, Option<Sort>, Box<Formula>),
    Forall(String, Option<Sort>, Box<Formula>),
}

use Formula as F;

pub fn not(a: Formula) -> Formula {
    F::Not(Box::new(a))
}

pub fn and(a: Formula, b: Formula) -> Formula {
    F::And(Box::new(a), Box::new(b))
}

pub fn or(a: Formula, b: Formula) -> Formula {
    F::Or(Box::new(a), Box::new(b))
}

pub fn implies(a: Formula, b: Formula) -> Formula {
    F::Implies(Box::new(a), Box::new(b))
}

/// Conjunction of a list; empty means true.
pub fn conj(parts: Vec<Formula>) -> Formula {
    parts.into_iter().reduce(and).unwrap_or(F::True)
}

impl Formula {
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut see = |v: &String, bound: &Vec<String>| {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        };
        match self {
            F::True | F::False => {}
            F::Less(a, b) | F::Equal(a, b) | F::Binary(_, a, b) => {
                see(a, bound);
                see(b, bound);
            }
            F::Unary(_, a) => see(a, bound),
            F::Not(a) => a.collect_free(bound, out),
            F::And(a, b) | F::Or(a, b) | F::Implies(a, b) | F::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            F::Exists(v, _, body) | F::Forall(v, _, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Longest chain of nested quantifiers.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            F::Not(a) => a.quantifier_depth(),
            F::And(a, b) | F::Or(a, b) | F::Implies(a, b) | F::Iff(a, b) => {
                a.quantifier_depth().max(b.quantifier_depth())
            }
            F::Exists(_, _, body) | F::Forall(_, _, body) => 1 + body.quantifier_depth(),
            _ => 0,
        }
    }

    /// Replace free variables by the mapped names. Bound variables are renamed
    /// to fresh names first, so the result never captures.
    pub fn substitute(&self, map: &HashMap<String, String>, fresh: &mut Fresh) -> Formula {
        let v = |x: &String| map.get(x).cloned().unwrap_or_else(|| x.clone());
        match self {
            F::True => F::True,
            F::False => F::False,
            F::Less(a, b) => F::Less(v(a), v(b)),
            F::Equal(a, b) => F::Equal(v(a), v(b)),
            F::Unary(r, a) => F::Unary(r.clone(), v(a)),
            F::Binary(r, a, b) => F::Binary(r.clone(), v(a), v(b)),
            F::Not(a) => not(a.substitute(map, fresh)),
            F::And(a, b) => and(a.substitute(map, fresh), b.substitute(map, fresh)),
            F::Or(a, b) => or(a.substitute(map, fresh), b.substitute(map, fresh)),
            F::Implies(a, b) => implies(a.substitute(map, fresh), b.substitute(map, fresh)),
            F::Iff(a, b) => F::Iff(Box::new(a.substitute(map, fresh)), Box::new(b.substitute(map, fresh))),
            F::Exists(x, s, body) | F::Forall(x, s, body) => {
                let y = fresh.next();
                let mut inner = map.clone();
                inner.insert(x.clone(), y.clone());
                let body = Box::new(body.substitute(&inner, fresh));
                if matches!(self, F::Exists(..)) {
                    F::Exists(y, *s, body)
                } else {
                    F::Forall(y, *s, body)
                }
            }
        }
    }
}

/// Source of variable names that cannot clash with parsed ones.
#[derive(Debug, Default)]
pub struct Fresh(usize);

impl Fresh {
    pub fn next(&mut self) -> String {
        self.0 += 1;
        format!("_v{}", self.0)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let quant = |f: &mut fmt::Formatter<'_>, q: &str, v: &str, s: &Option<Sort>, body: &Formula| {
            let ann = match s {
                Some(Sort::Row) => ":R",
                Some(Sort::Col) => ":C",
                None => "",
            };
            write!(f, "({q} {v}{ann}. {body})")
        };
        match self {
            F::True => write!(f, "T"),
            F::False => write!(f, "F"),
            F::Less(a, b) => write!(f, "{a} < {b}"),
            F::Equal(a, b) => write!(f, "{a} = {b}"),
            F::Unary(r, a) => write!(f, "{r}({a})"),
            F::Binary(r, a, b) => write!(f, "{r}({a},{b})"),
            F::Not(a) => write!(f, "~({a})"),
            F::And(a, b) => write!(f, "({a} & {b})"),
            F::Or(a, b) => write!(f, "({a} | {b})"),
            F::Implies(a, b) => write!(f, "({a} -> {b})"),
            F::Iff(a, b) => write!(f, "({a} <-> {b})"),
            F::Exists(v, s, body) => quant(f, "E", v, s, body),
            F::Forall(v, s, body) => quant(f, "A", v, s, body),
        }
    }
}

/// Relation names a formula may use.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub unary: Vec<String>,
    pub binary: Vec<String>,
}

impl Signature {
    /// Just the edge relation `E`.
    pub fn graph() -> Self {
        Signature {
            unary: vec![],
            binary: vec!["E".into()],
        }
    }

    pub fn of(s: &OrderedBinaryStructure) -> Self {
        Signature {
            unary: s.unary_names().map(String::from).collect(),
            binary: s.binary_names().map(String::from).collect(),
        }
    }

    /// Conjunction of literals describing `tau` for the pair (x, y).
    pub fn type_formula(&self, tau: &AtomicType, x: &str, y: &str) -> Result<Formula> {
        if tau.unary_x.len() != self.unary.len() || tau.binary.len() != self.binary.len() {
            return invalid(format!("atomic type {tau} does not fit the signature"));
        }
        let lit = |on: bool, a: Formula| if on { a } else { not(a) };
        let mut parts = vec![match tau.order {
            OrderType::Less => F::Less(x.into(), y.into()),
            OrderType::Equal => F::Equal(x.into(), y.into()),
            OrderType::Greater => F::Less(y.into(), x.into()),
        }];
        for (u, name) in self.unary.iter().enumerate() {
            parts.push(lit(tau.unary_x[u], F::Unary(name.clone(), x.into())));
            parts.push(lit(tau.unary_y[u], F::Unary(name.clone(), y.into())));
        }
        for (e, name) in self.binary.iter().enumerate() {
            parts.push(lit(tau.binary[e].0, F::Binary(name.clone(), x.into(), y.into())));
            parts.push(lit(tau.binary[e].1, F::Binary(name.clone(), y.into(), x.into())));
        }
        Ok(conj(parts))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    TypeTok(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Neq,
    Exists,
    Forall,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let syntax = |pos: usize, msg: String| Error::Syntax { pos, msg };
    while i < chars.len() {
        let (pos, c) = chars[i];
        let next = chars.get(i + 1).map(|&(_, c)| c);
        let next2 = chars.get(i + 2).map(|&(_, c)| c);
        let (tok, len) = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ',' => (Tok::Comma, 1),
            '.' => (Tok::Dot, 1),
            ':' => (Tok::Colon, 1),
            '~' | '¬' => (Tok::Not, 1),
            '!' if next == Some('=') => (Tok::Neq, 2),
            '!' => (Tok::Not, 1),
            '&' | '∧' => (Tok::And, 1),
            '|' | '∨' => (Tok::Or, 1),
            '→' => (Tok::Implies, 1),
            '↔' => (Tok::Iff, 1),
            '-' if next == Some('>') => (Tok::Implies, 2),
            '<' if next == Some('-') && next2 == Some('>') => (Tok::Iff, 3),
            '<' if next == Some('=') => (Tok::Le, 2),
            '<' => (Tok::Lt, 1),
            '>' if next == Some('=') => (Tok::Ge, 2),
            '>' => (Tok::Gt, 1),
            '≤' => (Tok::Le, 1),
            '≥' => (Tok::Ge, 1),
            '=' => (Tok::Eq, 1),
            '≠' => (Tok::Neq, 1),
            '∃' => (Tok::Exists, 1),
            '∀' => (Tok::Forall, 1),
            '⊤' => (Tok::Ident("T".into()), 1),
            '⊥' => (Tok::Ident("F".into()), 1),
            '[' => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].1 != ']' {
                    j += 1;
                }
                if j == chars.len() {
                    return Err(syntax(pos, "unclosed `[`".into()));
                }
                let s: String = chars[i + 1..j].iter().map(|&(_, c)| c).collect();
                (Tok::TypeTok(s.trim().to_string()), j + 1 - i)
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].1.is_alphanumeric() || chars[j].1 == '_' || chars[j].1 == '\'') {
                    j += 1;
                }
                let s: String = chars[i..j].iter().map(|&(_, c)| c).collect();
                (Tok::Ident(s), j - i)
            }
            _ => return Err(syntax(pos, format!("unexpected character {c:?}"))),
        };
        out.push((pos, tok));
        i += len;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
    sig: &'a Signature,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.i += 1;
                Ok(s)
            }
            _ => self.err("expected a name"),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            Ok(implies(lhs, self.formula()?))
        } else if self.eat(&Tok::Iff) {
            Ok(F::Iff(Box::new(lhs), Box::new(self.formula()?)))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut f = self.conjunction()?;
        while self.eat(&Tok::Or) {
            f = or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.eat(&Tok::And) {
            f = and(f, self.unary()?);
        }
        Ok(f)
    }

    fn quantifier_ahead(&self) -> Option<bool> {
        let next_is_var = matches!(self.toks.get(self.i + 1), Some((_, Tok::Ident(_))));
        match self.peek()? {
            Tok::Exists => Some(true),
            Tok::Forall => Some(false),
            Tok::Ident(s) if s == "E" && next_is_var => Some(true),
            Tok::Ident(s) if s == "A" && next_is_var => Some(false),
            _ => None,
        }
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat(&Tok::Not) {
            return Ok(not(self.unary()?));
        }
        if let Some(exists) = self.quantifier_ahead() {
            self.i += 1;
            let v = self.ident()?;
            let sort = if self.eat(&Tok::Colon) {
                match self.ident()?.as_str() {
                    "R" => Some(Sort::Row),
                    "C" => Some(Sort::Col),
                    _ => return self.err("sort must be R or C"),
                }
            } else {
                None
            };
            self.expect(Tok::Dot, "`.` after the quantified variable")?;
            let body = Box::new(self.formula()?);
            return Ok(if exists { F::Exists(v, sort, body) } else { F::Forall(v, sort, body) });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula> {
        if self.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(f);
        }
        let start = self.pos();
        let name = self.ident()?;
        if name == "type" {
            let Some(Tok::TypeTok(tok)) = self.peek().cloned() else {
                return self.err("expected `[token]` after `type`");
            };
            self.i += 1;
            let (x, y) = self.args2()?;
            let tau = AtomicType::parse_token(&tok).map_err(|e| Error::Syntax {
                pos: start,
                msg: e.to_string(),
            })?;
            return self.sig.type_formula(&tau, &x, &y).map_err(|e| Error::Syntax {
                pos: start,
                msg: e.to_string(),
            });
        }
        if self.peek() == Some(&Tok::LParen) {
            self.i += 1;
            let a = self.ident()?;
            if self.eat(&Tok::Comma) {
                let b = self.ident()?;
                self.expect(Tok::RParen, "`)`")?;
                if !self.sig.binary.contains(&name) {
                    return Err(Error::Syntax {
                        pos: start,
                        msg: format!("unknown binary relation {name:?}"),
                    });
                }
                return Ok(F::Binary(name, a, b));
            }
            self.expect(Tok::RParen, "`)`")?;
            if !self.sig.unary.contains(&name) {
                return Err(Error::Syntax {
                    pos: start,
                    msg: format!("unknown unary relation {name:?}"),
                });
            }
            return Ok(F::Unary(name, a));
        }
        if name == "T" {
            return Ok(F::True);
        }
        if name == "F" {
            return Ok(F::False);
        }
        let op = self.peek().cloned();
        self.i += 1;
        let b = self.ident()?;
        let (a2, b2) = (name.clone(), b.clone());
        Ok(match op {
            Some(Tok::Lt) => F::Less(name, b),
            Some(Tok::Gt) => F::Less(b, name),
            Some(Tok::Eq) => F::Equal(name, b),
            Some(Tok::Neq) => not(F::Equal(name, b)),
            Some(Tok::Le) => or(F::Less(name, b), F::Equal(a2, b2)),
            Some(Tok::Ge) => or(F::Less(b, name), F::Equal(a2, b2)),
            _ => {
                self.i -= 2;
                return self.err("expected a comparison");
            }
        })
    }

    fn args2(&mut self) -> Result<(String, String)> {
        self.expect(Tok::LParen, "`(`")?;
        let a = self.ident()?;
        self.expect(Tok::Comma, "`,`")?;
        let b = self.ident()?;
        self.expect(Tok::RParen, "`)`")?;
        Ok((a, b))
    }
}

/// Precedence ¬ > ∧ > ∨ > →, ↔ (right associative). Quantifiers `E x.` and
/// `A x.` (or ∃, ∀) take everything to their right; `E x:R.` annotates a sort.
/// Atoms: `x < y`, `x = y` (plus `!=`, `<=`, `>`, `>=` as sugar), `U(x)`,
/// `E(x,y)`, `T`, `F`, and `type[token](x,y)` for an atomic type, expanded
/// against the signature.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula> {
    let mut p = Parser {
        toks: lex(text)?,
        i: 0,
        end: text.len(),
        sig,
    };
    let f = p.formula()?;
    if p.i != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(f)
}

pub const DEFAULT_ATOM_BUDGET: u64 = 10_000_000;

#[derive(Debug)]
enum Compiled {
    True,
    False,
    Less(usize, usize),
    Equal(usize, usize),
    Unary(usize, usize),
    Binary(usize, usize, usize),
    Not(Box<Compiled>),
    And(Box<Compiled>, Box<Compiled>),
    Or(Box<Compiled>, Box<Compiled>),
    Implies(Box<Compiled>, Box<Compiled>),
    Iff(Box<Compiled>, Box<Compiled>),
    Exists(usize, Box<Compiled>),
    Forall(usize, Box<Compiled>),
}

struct Compiler<'a> {
    s: &'a OrderedBinaryStructure,
    slots: HashMap<String, usize>,
}

impl Compiler<'_> {
    fn slot(&mut self, v: &str) -> usize {
        let next = self.slots.len();
        *self.slots.entry(v.to_string()).or_insert(next)
    }

    fn compile(&mut self, f: &Formula) -> Result<Compiled> {
        use Compiled as C;
        let b = |c: Compiled| Box::new(c);
        Ok(match f {
            F::True => C::True,
            F::False => C::False,
            F::Less(a, c) => C::Less(self.slot(a), self.slot(c)),
            F::Equal(a, c) => C::Equal(self.slot(a), self.slot(c)),
            F::Unary(r, a) => {
                let rel = self
                    .s
                    .unary_index(r)
                    .ok_or_else(|| Error::InvalidArgument(format!("structure has no unary relation {r:?}")))?;
                C::Unary(rel, self.slot(a))
            }
            F::Binary(r, a, c) => {
                let rel = self
                    .s
                    .binary_index(r)
                    .ok_or_else(|| Error::InvalidArgument(format!("structure has no binary relation {r:?}")))?;
                C::Binary(rel, self.slot(a), self.slot(c))
            }
            F::Not(a) => C::Not(b(self.compile(a)?)),
            F::And(x, y) => C::And(b(self.compile(x)?), b(self.compile(y)?)),
            F::Or(x, y) => C::Or(b(self.compile(x)?), b(self.compile(y)?)),
            F::Implies(x, y) => C::Implies(b(self.compile(x)?), b(self.compile(y)?)),
            F::Iff(x, y) => C::Iff(b(self.compile(x)?), b(self.compile(y)?)),
            F::Exists(v, _, body) => C::Exists(self.slot(v), b(self.compile(body)?)),
            F::Forall(v, _, body) => C::Forall(self.slot(v), b(self.compile(body)?)),
        })
    }
}

/// A formula prepared for repeated evaluation on one structure.
pub struct Evaluator<'a> {
    s: &'a OrderedBinaryStructure,
    code: Compiled,
    slots: HashMap<String, usize>,
    free: Vec<String>,
    budget: u64,
}

impl<'a> Evaluator<'a> {
    pub fn new(s: &'a OrderedBinaryStructure, f: &Formula, budget: u64) -> Result<Self> {
        let mut c = Compiler {
            s,
            slots: HashMap::new(),
        };
        let code = c.compile(f)?;
        Ok(Evaluator {
            s,
            code,
            slots: c.slots,
            free: f.free_vars().into_iter().collect(),
            budget,
        })
    }

    /// Evaluate under an assignment of the free variables.
    pub fn eval(&self, valuation: &[(&str, usize)]) -> Result<bool> {
        let mut env = vec![usize::MAX; self.slots.len()];
        for (name, value) in valuation {
            if *value >= self.s.domain_size() {
                return invalid(format!("value {value} for {name} outside the domain"));
            }
            if let Some(&slot) = self.slots.get(*name) {
                env[slot] = *value;
            }
        }
        for v in &self.free {
            if !valuation.iter().any(|(n, _)| n == v) {
                return invalid(format!("free variable {v} is unbound"));
            }
        }
        let mut spent = 0;
        let out = self.run(&self.code, &mut env, &mut spent);
        if spent > self.budget {
            return Err(Error::ResourceLimit(format!(
                "evaluation needs more than {} atom evaluations",
                self.budget
            )));
        }
        Ok(out)
    }

    fn run(&self, c: &Compiled, env: &mut [usize], spent: &mut u64) -> bool {
        use Compiled as C;
        if *spent > self.budget {
            return false;
        }
        match c {
            C::True => true,
            C::False => false,
            C::Less(a, b) => {
                *spent += 1;
                env[*a] < env[*b]
            }
            C::Equal(a, b) => {
                *spent += 1;
                env[*a] == env[*b]
            }
            C::Unary(r, a) => {
                *spent += 1;
                self.s.unary_holds(*r, env[*a])
            }
            C::Binary(r, a, b) => {
                *spent += 1;
                self.s.binary_holds(*r, env[*a], env[*b])
            }
            C::Not(a) => !self.run(a, env, spent),
            C::And(a, b) => self.run(a, env, spent) && self.run(b, env, spent),
            C::Or(a, b) => self.run(a, env, spent) || self.run(b, env, spent),
            C::Implies(a, b) => !self.run(a, env, spent) || self.run(b, env, spent),
            C::Iff(a, b) => self.run(a, env, spent) == self.run(b, env, spent),
            C::Exists(v, body) | C::Forall(v, body) => {
                let want = matches!(c, C::Exists(..));
                let saved = env[*v];
                let mut result = !want;
                for x in 0..self.s.domain_size() {
                    env[*v] = x;
                    if self.run(body, env, spent) == want {
                        result = want;
                        break;
                    }
                }
                env[*v] = saved;
                result
            }
        }
    }
}

/// Naive recursive semantics with the default budget of atom evaluations.
pub fn evaluate(s: &OrderedBinaryStructure, f: &Formula, valuation: &[(&str, usize)]) -> Result<bool> {
    Evaluator::new(s, f, DEFAULT_ATOM_BUDGET)?.eval(valuation)
}

/// An output relation of an interpretation, defined by a formula in `vars`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationDef {
    pub name: String,
    pub vars: Vec<String>,
    pub body: Formula,
}

/// Domain formula in one variable plus one formula per output relation. The
/// order of the output is the order inherited from the input.
#[derive(Debug, Clone, PartialEq)]
pub struct Interpretation {
    pub domain_var: String,
    pub domain: Formula,
    pub relations: Vec<RelationDef>,
}

impl Interpretation {
    /// Copies every relation of `sig` unchanged.
    pub fn identity(sig: &Signature) -> Self {
        let mut relations = Vec::new();
        for u in &sig.unary {
            relations.push(RelationDef {
                name: u.clone(),
                vars: vec!["x".into()],
                body: F::Unary(u.clone(), "x".into()),
            });
        }
        for b in &sig.binary {
            relations.push(RelationDef {
                name: b.clone(),
                vars: vec!["x".into(), "y".into()],
                body: F::Binary(b.clone(), "x".into(), "y".into()),
            });
        }
        Interpretation {
            domain_var: "x".into(),
            domain: F::True,
            relations,
        }
    }

    pub fn output_signature(&self) -> Signature {
        let mut sig = Signature::default();
        for r in &self.relations {
            if r.vars.len() == 1 {
                sig.unary.push(r.name.clone());
            } else {
                sig.binary.push(r.name.clone());
            }
        }
        sig
    }

    /// J ∘ I: first `inner`, then `self`. Relation atoms of `self` are replaced
    /// by their definitions in `inner`, and quantifiers are relativized to the
    /// domain of `inner`.
    pub fn compose(&self, inner: &Interpretation) -> Result<Interpretation> {
        let mut fresh = Fresh::default();
        let dom = |v: &str, fresh: &mut Fresh| {
            let map = HashMap::from([(inner.domain_var.clone(), v.to_string())]);
            inner.domain.substitute(&map, fresh)
        };
        let rewrite = |f: &Formula, fresh: &mut Fresh| translate(f, inner, fresh);
        let domain = and(
            dom(&self.domain_var, &mut fresh),
            rewrite(&self.domain, &mut fresh)?,
        );
        let relations = self
            .relations
            .iter()
            .map(|r| {
                Ok(RelationDef {
                    name: r.name.clone(),
                    vars: r.vars.clone(),
                    body: rewrite(&r.body, &mut fresh)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Interpretation {
            domain_var: self.domain_var.clone(),
            domain,
            relations,
        })
    }
}

fn translate(f: &Formula, inner: &Interpretation, fresh: &mut Fresh) -> Result<Formula> {
    let def = |name: &str, args: &[&String], fresh: &mut Fresh| -> Result<Formula> {
        let r = inner
            .relations
            .iter()
            .find(|r| r.name == name && r.vars.len() == args.len())
            .ok_or_else(|| Error::InvalidArgument(format!("inner interpretation does not define {name}")))?;
        let map = r.vars.iter().cloned().zip(args.iter().map(|a| a.to_string())).collect();
        Ok(r.body.substitute(&map, fresh))
    };
    let relativize = |v: &String, fresh: &mut Fresh| {
        let map = HashMap::from([(inner.domain_var.clone(), v.clone())]);
        inner.domain.substitute(&map, fresh)
    };
    Ok(match f {
        F::Unary(r, a) => def(r, &[a], fresh)?,
        F::Binary(r, a, b) => def(r, &[a, b], fresh)?,
        F::True | F::False | F::Less(..) | F::Equal(..) => f.clone(),
        F::Not(a) => not(translate(a, inner, fresh)?),
        F::And(a, b) => and(translate(a, inner, fresh)?, translate(b, inner, fresh)?),
        F::Or(a, b) => or(translate(a, inner, fresh)?, translate(b, inner, fresh)?),
        F::Implies(a, b) => implies(translate(a, inner, fresh)?, translate(b, inner, fresh)?),
        F::Iff(a, b) => F::Iff(
            Box::new(translate(a, inner, fresh)?),
            Box::new(translate(b, inner, fresh)?),
        ),
        F::Exists(v, s, body) => F::Exists(
            v.clone(),
            *s,
            Box::new(and(relativize(v, fresh), translate(body, inner, fresh)?)),
        ),
        F::Forall(v, s, body) => F::Forall(
            v.clone(),
            *s,
            Box::new(implies(relativize(v, fresh), translate(body, inner, fresh)?)),
        ),
    })
}

pub fn apply_interpretation(s: &OrderedBinaryStructure, it: &Interpretation) -> Result<OrderedBinaryStructure> {
    let dom_eval = Evaluator::new(s, &it.domain, DEFAULT_ATOM_BUDGET)?;
    let mut dom = Vec::new();
    for a in 0..s.domain_size() {
        if dom_eval.eval(&[(it.domain_var.as_str(), a)])? {
            dom.push(a);
        }
    }
    let mut out = OrderedBinaryStructure::new(dom.len());
    for r in &it.relations {
        let ev = Evaluator::new(s, &r.body, DEFAULT_ATOM_BUDGET)?;
        for v in r.body.free_vars() {
            if !r.vars.contains(&v) {
                return invalid(format!("relation {} uses unbound variable {v}", r.name));
            }
        }
        match r.vars.as_slice() {
            [x] => {
                let mut members = Vec::new();
                for (i, &a) in dom.iter().enumerate() {
                    if ev.eval(&[(x.as_str(), a)])? {
                        members.push(i);
                    }
                }
                out.add_unary(&r.name, &members)?;
            }
            [x, y] => {
                let mut pairs = Vec::new();
                for (i, &a) in dom.iter().enumerate() {
                    for (j, &b) in dom.iter().enumerate() {
                        if ev.eval(&[(x.as_str(), a), (y.as_str(), b)])? {
                            pairs.push((i, j));
                        }
                    }
                }
                out.add_binary(&r.name, &pairs)?;
            }
            _ => return invalid(format!("relation {} must have arity 1 or 2", r.name)),
        }
    }
    Ok(out)
}

/// Add one relation defined by a formula, keeping domain and old relations.
pub fn expand(s: &OrderedBinaryStructure, name: &str, vars: &[&str], text: &str) -> Result<OrderedBinaryStructure> {
    let sig = Signature::of(s);
    let mut it = Interpretation::identity(&sig);
    it.relations.push(RelationDef {
        name: name.into(),
        vars: vars.iter().map(|v| v.to_string()).collect(),
        body: parse_formula(text, &sig)?,
    });
    apply_interpretation(s, &it)
}

/// Lines `domain x: φ`, `unary NAME x: φ`, `binary NAME x y: φ`; `#` starts
/// a comment line. Formulas are parsed against `sig`.
pub fn parse_interpretation(text: &str, sig: &Signature) -> Result<Interpretation> {
    let mut domain = None;
    let mut relations = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let perr = |msg: String| Error::Parse { line: no + 1, msg };
        let (head, body) = line.split_once(':').ok_or_else(|| perr("missing `:`".into()))?;
        let body = parse_formula(body, sig).map_err(|e| perr(e.to_string()))?;
        let head: Vec<&str> = head.split_whitespace().collect();
        match head.as_slice() {
            ["domain", x] => domain = Some((x.to_string(), body)),
            ["unary", name, x] if is_relation_name(name) => relations.push(RelationDef {
                name: name.to_string(),
                vars: vec![x.to_string()],
                body,
            }),
            ["binary", name, x, y] if is_relation_name(name) => relations.push(RelationDef {
                name: name.to_string(),
                vars: vec![x.to_string(), y.to_string()],
                body,
            }),
            _ => return Err(perr("expected `domain x`, `unary NAME x` or `binary NAME x y`".into())),
        }
    }
    let (domain_var, domain) = domain.unwrap_or_else(|| ("x".into(), F::True));
    Ok(Interpretation {
        domain_var,
        domain,
        relations,
    })
}

/// Same domain and order; u < v adjacent iff the atomic type of (u, v) is τ.
pub fn i_tau(s: &OrderedBinaryStructure, tau: &AtomicType) -> Result<OrderedGraph> {
    if tau.order != OrderType::Less {
        return invalid("I_tau needs a type with x < y");
    }
    if s.domain_size() == 0 {
        return invalid("empty structure");
    }
    OrderedGraph::from_fn(s.domain_size(), |u, v| s.atomic_type(u, v) == *tau)
}

/// I_τ as an interpretation producing a symmetric relation `E`.
pub fn i_tau_interpretation(sig: &Signature, tau: &AtomicType) -> Result<Interpretation> {
    let fwd = sig.type_formula(tau, "x", "y")?;
    let bwd = sig.type_formula(tau, "y", "x")?;
    Ok(Interpretation {
        domain_var: "x".into(),
        domain: F::True,
        relations: vec![RelationDef {
            name: "E".into(),
            vars: vec!["x".into(), "y".into()],
            body: or(fwd, bwd),
        }],
    })
}

/// Insert the guards R(x) / C(x) under every sort-annotated quantifier:
/// `∃x:R. ψ` becomes `∃x:R. R(x) ∧ ψ` and `∀x:R. ψ` becomes `∀x:R. R(x) → ψ`.
pub fn normalize_guards(f: &Formula) -> Result<Formula> {
    Ok(match f {
        F::Exists(v, s, body) | F::Forall(v, s, body) => {
            let Some(sort) = s else {
                return invalid(format!("quantified variable {v} has no sort"));
            };
            let guard = F::Unary(sort.guard().into(), v.clone());
            let inner = normalize_guards(body)?;
            if matches!(f, F::Exists(..)) {
                F::Exists(v.clone(), *s, Box::new(and(guard, inner)))
            } else {
                F::Forall(v.clone(), *s, Box::new(implies(guard, inner)))
            }
        }
        F::Not(a) => not(normalize_guards(a)?),
        F::And(a, b) => and(normalize_guards(a)?, normalize_guards(b)?),
        F::Or(a, b) => or(normalize_guards(a)?, normalize_guards(b)?),
        F::Implies(a, b) => implies(normalize_guards(a)?, normalize_guards(b)?),
        F::Iff(a, b) => F::Iff(Box::new(normalize_guards(a)?), Box::new(normalize_guards(b)?)),
        _ => f.clone(),
    })
}

/// Turn a guarded sentence about the atomic-type matrix of a structure S
/// (signature `R`, `C`, `E_<type token>`) into an equivalent sentence about S
/// itself over `sig`.
///
/// Guards and sort atoms become constants, an equality between a row and a
/// column variable is false, `x < y` between sorts is decided by rows coming
/// first, and `E_τ(x, y)` with x a row and y a column becomes the type
/// formula τ(x, y); in any other position it is false.
pub fn rewrite_matrix_sentence(f: &Formula, sig: &Signature) -> Result<Formula> {
    if let Some(v) = f.free_vars().into_iter().next() {
        return invalid(format!("free variable {v}: expected a sentence"));
    }
    rewrite(f, sig, &mut HashMap::new())
}

fn rewrite(f: &Formula, sig: &Signature, sorts: &mut HashMap<String, Sort>) -> Result<Formula> {
    let sort_of = |v: &String, sorts: &HashMap<String, Sort>| {
        sorts
            .get(v)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("variable {v} has no sort")))
    };
    Ok(match f {
        F::True | F::False => f.clone(),
        F::Unary(r, v) => {
            let s = sort_of(v, sorts)?;
            match r.as_str() {
                "R" => constant(s == Sort::Row),
                "C" => constant(s == Sort::Col),
                _ => return invalid(format!("unary relation {r} is not part of the matrix signature")),
            }
        }
        F::Equal(a, b) => {
            if sort_of(a, sorts)? == sort_of(b, sorts)? {
                f.clone()
            } else {
                F::False
            }
        }
        F::Less(a, b) => match (sort_of(a, sorts)?, sort_of(b, sorts)?) {
            (x, y) if x == y => f.clone(),
            (Sort::Row, Sort::Col) => F::True,
            _ => F::False,
        },
        F::Binary(r, a, b) => {
            let tau = r
                .strip_prefix("E_")
                .map(AtomicType::parse_token)
                .transpose()
                .ok()
                .flatten()
                .ok_or_else(|| Error::InvalidArgument(format!("{r} is not an atomic-type relation")))?;
            match (sort_of(a, sorts)?, sort_of(b, sorts)?) {
                (Sort::Row, Sort::Col) => sig.type_formula(&tau, a, b)?,
                _ => F::False,
            }
        }
        F::Not(a) => simplify_not(rewrite(a, sig, sorts)?),
        F::And(a, b) => simplify_and(rewrite(a, sig, sorts)?, rewrite(b, sig, sorts)?),
        F::Or(a, b) => simplify_or(rewrite(a, sig, sorts)?, rewrite(b, sig, sorts)?),
        F::Implies(a, b) => simplify_or(simplify_not(rewrite(a, sig, sorts)?), rewrite(b, sig, sorts)?),
        F::Iff(a, b) => F::Iff(Box::new(rewrite(a, sig, sorts)?), Box::new(rewrite(b, sig, sorts)?)),
        F::Exists(v, s, body) | F::Forall(v, s, body) => {
            let exists = matches!(f, F::Exists(..));
            let Some(sort) = s else {
                return invalid(format!("quantified variable {v} has no sort"));
            };
            let rest = match (exists, body.as_ref()) {
                (true, F::And(g, rest)) | (false, F::Implies(g, rest))
                    if **g == F::Unary(sort.guard().into(), v.clone()) =>
                {
                    rest
                }
                _ => return invalid(format!("quantifier over {v} is not guarded by {}({v})", sort.guard())),
            };
            let saved = sorts.insert(v.clone(), *sort);
            let inner = rewrite(rest, sig, sorts);
            match saved {
                Some(old) => sorts.insert(v.clone(), old),
                None => sorts.remove(v),
            };
            let inner = inner?;
            if exists {
                F::Exists(v.clone(), None, Box::new(inner))
            } else {
                F::Forall(v.clone(), None, Box::new(inner))
            }
        }
    })
}

fn constant(b: bool) -> Formula {
    if b {
        F::True
    } else {
        F::False
    }
}

fn simplify_not(a: Formula) -> Formula {
    match a {
        F::True => F::False,
        F::False => F::True,
        a => not(a),
    }
}

fn simplify_and(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (F::False, _) | (_, F::False) => F::False,
        (F::True, x) | (x, F::True) => x,
        (a, b) => and(a, b),
    }
}

fn simplify_or(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (F::True, _) | (_, F::True) => F::True,
        (F::False, x) | (x, F::False) => x,
        (a, b) => or(a, b),
    }
}

/// μ_s(x, y; z) as formula text, using `w` as the inner bound variable.
pub fn mu_text(s: PatternSymbol, x: &str, y: &str, z: &str, w: &str) -> String {
    let side = format!("{x} <= {z} & {z} < {y}");
    let rest = match s {
        PatternSymbol::Eq | PatternSymbol::GeC => {
            format!("E({x},{y}) & A {w}. (({z} < {w} & {w} < {y}) -> ~E({x},{w}))")
        }
        PatternSymbol::LeC => format!("E({x},{y}) & A {w}. ({y} < {w} -> ~E({x},{w}))"),
        PatternSymbol::Neq => format!("~E({x},{y}) & A {w}. (({z} < {w} & {w} < {y}) -> E({x},{w}))"),
        PatternSymbol::LeR => format!("E({x},{y}) & A {w}. (({x} < {w} & {w} <= {z}) -> ~E({w},{y}))"),
        PatternSymbol::GeR => format!("E({x},{y}) & A {w}. ({w} < {x} -> ~E({w},{y}))"),
    };
    format!("({side} & {rest})")
}

/// ρ(z): μ_s(·,·;z) is the graph of a bijection between [.., z] and (z, ..].
pub fn rho_text(s: PatternSymbol) -> String {
    let mu = |x: &str, y: &str| mu_text(s, x, y, "z", "w");
    format!(
        "(A x. (x <= z -> E y. ({} & A y2. ({} -> y2 = y)))) & (A y. (z < y -> E x. ({} & A x2. ({} -> x2 = x))))",
        mu("x", "y"),
        mu("x", "y2"),
        mu("x", "y"),
        mu("x2", "y")
    )
}

/// The matching decoder run through the evaluator: define `Mid` by ρ, then
/// `Match(x,y)` by ∃z (Mid(z) ∧ μ(x,y;z)), and read the symmetric closure as
/// a graph.
pub fn decode_regular_fo(s: PatternSymbol, g: &OrderedGraph) -> Result<Option<OrderedMatching>> {
    let base = OrderedBinaryStructure::from_graph(g);
    let st = expand(&base, "Mid", &["z"], &rho_text(s))?;
    let st = expand(&st, "Match", &["x", "y"], &format!("E z. (Mid(z) & {})", mu_text(s, "x", "y", "z", "w")))?;
    let out = apply_interpretation(
        &st,
        &parse_interpretation("binary E x y: Match(x,y) | Match(y,x)", &Signature::of(&st))?,
    )?;
    Ok(OrderedMatching::from_graph(&out.to_graph("E")?))
}

/// Definitions, in order, used to read a graph back from its matching
/// encoding. Each one only mentions `E`, the order and earlier names.
pub const MATCHING_DECODER_STAGES: &[(&str, &[&str], &str)] = &[
    // right-hand vertices: matched to something smaller
    ("Rt", &["u"], "E w. (w < u & E(w,u))"),
    ("Xp", &["u"], "Rt(u) & A w. (w < u -> ~Rt(w))"),
    ("X", &["u"], "E w. (Xp(w) & E(u,w))"),
    ("Yp", &["u"], "~Rt(u) & A w. (u < w -> Rt(w))"),
    ("Yv", &["u"], "E w. (Yp(w) & E(u,w))"),
    ("V", &["u"], "E w. (X(w) & u < w)"),
    ("Succ", &["u", "v"], "u < v & A w. ~(u < w & w < v)"),
    // z lies strictly between the partner of u's successor and u's partner
    (
        "Blk",
        &["z", "u"],
        "V(u) & Rt(z) & (E p. (E(u,p) & z < p)) & (E s. (Succ(u,s) & E q. (E(s,q) & q < z)))",
    ),
    ("Mid", &["k"], "~Rt(k) & E w. (E(k,w) & E t. (Yv(t) & t < w))"),
    (
        "Edge",
        &["u", "v"],
        "V(u) & V(v) & u < v & E k. (Mid(k) & (E p. (Succ(p,k) & E z. (E(p,z) & Blk(z,u)))) & (E s. (Succ(k,s) & E z. (E(s,z) & Blk(z,v)))))",
    ),
];

/// Graph decoded from a matching by the staged FO definitions.
pub fn decode_matching_fo(h: &OrderedMatching) -> Result<OrderedGraph> {
    let mut st = OrderedBinaryStructure::from_graph(&h.to_graph()?);
    for (name, vars, text) in MATCHING_DECODER_STAGES {
        st = expand(&st, name, vars, text)?;
    }
    let it = parse_interpretation(
        "domain x: V(x)\nbinary E x y: Edge(x,y) | Edge(y,x)",
        &Signature::of(&st),
    )?;
    apply_interpretation(&st, &it)?.to_graph("E")
}
