//! Formula language: data variables, datasets, formulas, the text grammar and
//! its printer.
//!
//! Surface grammar, loosest binding first:
//!
//! ```text
//! formula := imp ( "<->" formula )?
//! imp     := unary ( "->" imp )?
//! unary   := "!" unary
//!          | "B" "{" vars "}" "{" vars "}" unary
//!          | "K" "{" vars "}" unary
//!          | "[" vars "]" unary
//!          | "false" | atom | "(" formula ")"
//! vars    := ( ident ( "," ident )* )?
//! ```
//!
//! `K`, `<->` and `false` are sugar and never reach the [`Formula`] tree.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Atom used to encode `false` as `!(__f -> __f)`. Users cannot write it.
pub const RESERVED_ATOM: &str = "__f";

/// True for `[A-Za-z][A-Za-z0-9_]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Name of a data variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarName(String);

impl VarName {
    pub fn new(name: impl Into<String>) -> Result<Self, InvalidName> {
        let name = name.into();
        if is_identifier(&name) {
            Ok(VarName(name))
        } else {
            Err(InvalidName(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid identifier `{0}`")]
pub struct InvalidName(pub String);

/// A finite set of data variables, kept sorted and duplicate-free so that
/// structural equality is set equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dataset(Vec<VarName>);

impl Dataset {
    pub fn empty() -> Self {
        Dataset(Vec::new())
    }

    pub fn new(vars: impl IntoIterator<Item = VarName>) -> Self {
        let mut v: Vec<VarName> = vars.into_iter().collect();
        v.sort();
        v.dedup();
        Dataset(v)
    }

    /// Builds a dataset from raw names, rejecting non-identifiers.
    pub fn from_names<I, S>(names: I) -> Result<Self, InvalidName>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        names
            .into_iter()
            .map(VarName::new)
            .collect::<Result<Vec<_>, _>>()
            .map(Dataset::new)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, VarName> {
        self.0.iter()
    }

    pub fn contains(&self, var: &VarName) -> bool {
        self.0.binary_search(var).is_ok()
    }

    pub fn union(&self, other: &Dataset) -> Dataset {
        if other.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return other.clone();
        }
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(x), Some(y)) => match x.cmp(y) {
                    std::cmp::Ordering::Less => out.push(a.next().unwrap().clone()),
                    std::cmp::Ordering::Greater => out.push(b.next().unwrap().clone()),
                    std::cmp::Ordering::Equal => {
                        out.push(a.next().unwrap().clone());
                        b.next();
                    }
                },
                (Some(_), None) => out.push(a.next().unwrap().clone()),
                (None, Some(_)) => out.push(b.next().unwrap().clone()),
                (None, None) => break,
            }
        }
        Dataset(out)
    }

    pub fn is_subset(&self, other: &Dataset) -> bool {
        self.0.iter().all(|v| other.contains(v))
    }

    pub fn names(&self) -> Vec<String> {
        self.0.iter().map(|v| v.0.clone()).collect()
    }
}

impl FromIterator<VarName> for Dataset {
    fn from_iter<I: IntoIterator<Item = VarName>>(iter: I) -> Self {
        Dataset::new(iter)
    }
}

impl<'a> IntoIterator for &'a Dataset {
    type Item = &'a VarName;
    type IntoIter = std::slice::Iter<'a, VarName>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Renders as `x,y` (no braces).
impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(v.as_str())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(String),
    Not(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// `B{trust}{data} body`
    Belief {
        trust: Dataset,
        data: Dataset,
        body: Box<Formula>,
    },
    /// `[data] body`
    Announce {
        data: Dataset,
        body: Box<Formula>,
    },
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(body: Formula) -> Self {
        Formula::Not(Box::new(body))
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Self {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn belief(trust: Dataset, data: Dataset, body: Formula) -> Self {
        Formula::Belief {
            trust,
            data,
            body: Box::new(body),
        }
    }

    /// Data-informed knowledge, i.e. belief with an empty trust set.
    pub fn knows(data: Dataset, body: Formula) -> Self {
        Formula::belief(Dataset::empty(), data, body)
    }

    pub fn announce(data: Dataset, body: Formula) -> Self {
        Formula::Announce {
            data,
            body: Box::new(body),
        }
    }

    /// `a <-> b` as `!((a -> b) -> !(b -> a))`.
    pub fn iff(a: Formula, b: Formula) -> Self {
        let fwd = Formula::implies(a.clone(), b.clone());
        let back = Formula::implies(b, a);
        Formula::not(Formula::implies(fwd, Formula::not(back)))
    }

    /// `false` as `!(__f -> __f)`.
    pub fn falsum() -> Self {
        Formula::not(Formula::implies(
            Formula::atom(RESERVED_ATOM),
            Formula::atom(RESERVED_ATOM),
        ))
    }

    fn is_falsum(&self) -> bool {
        match self {
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Implies(a, b) => {
                    matches!(a.as_ref(), Formula::Atom(x) if x == RESERVED_ATOM)
                        && matches!(b.as_ref(), Formula::Atom(y) if y == RESERVED_ATOM)
                }
                _ => false,
            },
            _ => false,
        }
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Not(b) => 1 + b.size(),
            Formula::Implies(a, b) => 1 + a.size() + b.size(),
            Formula::Belief { body, .. } | Formula::Announce { body, .. } => 1 + body.size(),
        }
    }

    /// Every data variable mentioned by a modality anywhere in the formula.
    pub fn variables(&self) -> BTreeSet<VarName> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<VarName>) {
        match self {
            Formula::Atom(_) => {}
            Formula::Not(b) => b.collect_variables(out),
            Formula::Implies(a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
            Formula::Belief { trust, data, body } => {
                out.extend(trust.iter().cloned());
                out.extend(data.iter().cloned());
                body.collect_variables(out);
            }
            Formula::Announce { data, body } => {
                out.extend(data.iter().cloned());
                body.collect_variables(out);
            }
        }
    }

    /// Depth of the syntax tree; an atom has depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Not(b) => 1 + b.depth(),
            Formula::Implies(a, b) => 1 + a.depth().max(b.depth()),
            Formula::Belief { body, .. } | Formula::Announce { body, .. } => 1 + body.depth(),
        }
    }
}

/// Number of nodes in the syntax tree of `f` (occurrences, not distinct
/// subformulas).
pub fn subformula_occurrences(f: &Formula) -> usize {
    f.size()
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, f, false)
    }
}

/// Canonical text such that `parse(&print(f)) == Ok(f)`.
pub fn print(f: &Formula) -> String {
    f.to_string()
}

// `operand` is set when the formula sits in a position tighter than `->`
// (left of an implication or under a prefix operator).
fn write_formula(phi: &Formula, f: &mut fmt::Formatter<'_>, operand: bool) -> fmt::Result {
    if phi.is_falsum() {
        return f.write_str("false");
    }
    match phi {
        Formula::Atom(p) => f.write_str(p),
        Formula::Not(body) => {
            f.write_str("!")?;
            write_formula(body, f, true)
        }
        Formula::Implies(a, b) => {
            if operand {
                f.write_str("(")?;
            }
            write_formula(a, f, true)?;
            f.write_str(" -> ")?;
            write_formula(b, f, false)?;
            if operand {
                f.write_str(")")?;
            }
            Ok(())
        }
        Formula::Belief { trust, data, body } => {
            write!(f, "B{{{trust}}}{{{data}}} ")?;
            write_formula(body, f, true)
        }
        Formula::Announce { data, body } => {
            write!(f, "[{data}] ")?;
            write_formula(body, f, true)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("at {pos}: unexpected character `{ch}`")]
    UnexpectedChar { pos: usize, ch: char },
    #[error("at {pos}: expected {expected}, found {found}")]
    Unexpected {
        pos: usize,
        expected: &'static str,
        found: String,
    },
    #[error("at {pos}: `{RESERVED_ATOM}` is reserved")]
    ReservedAtom { pos: usize },
    #[error("at {pos}: invalid identifier `{name}`")]
    InvalidIdentifier { pos: usize, name: String },
}

impl ParseError {
    /// Byte offset into the input.
    pub fn position(&self) -> usize {
        match self {
            ParseError::UnexpectedChar { pos, .. }
            | ParseError::Unexpected { pos, .. }
            | ParseError::ReservedAtom { pos }
            | ParseError::InvalidIdentifier { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Bang,
    Arrow,
    Iff,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Iff => f.write_str("`<->`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'!' => Tok::Bang,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'{' => Tok::LBrace,
            b'}' => Tok::RBrace,
            b'[' => Tok::LBracket,
            b']' => Tok::RBracket,
            b',' => Tok::Comma,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                i += 2;
                Tok::Iff
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let name = &src[start..i];
                if name == RESERVED_ATOM {
                    return Err(ParseError::ReservedAtom { pos: start });
                }
                if !is_identifier(name) {
                    return Err(ParseError::InvalidIdentifier {
                        pos: start,
                        name: name.to_string(),
                    });
                }
                toks.push((start, Tok::Ident(name.to_string())));
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(ParseError::UnexpectedChar { pos: i, ch });
            }
        };
        i += 1;
        toks.push((start, tok));
    }
    toks.push((src.len(), Tok::Eof));
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        ParseError::Unexpected {
            pos: self.offset(),
            expected,
            found: self.peek().to_string(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.implication()?;
        if *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LBracket => {
                self.bump();
                let data = self.vars(Tok::RBracket, "`]`")?;
                Ok(Formula::announce(data, self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "B" => {
                        self.expect(Tok::LBrace, "`{` after `B`")?;
                        let trust = self.vars(Tok::RBrace, "`}`")?;
                        self.expect(Tok::LBrace, "`{` for the data set of `B`")?;
                        let data = self.vars(Tok::RBrace, "`}`")?;
                        Ok(Formula::belief(trust, data, self.unary()?))
                    }
                    "K" => {
                        self.expect(Tok::LBrace, "`{` after `K`")?;
                        let data = self.vars(Tok::RBrace, "`}`")?;
                        Ok(Formula::knows(data, self.unary()?))
                    }
                    "false" => Ok(Formula::falsum()),
                    _ => Ok(Formula::Atom(name)),
                }
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    // Parses `a,b,c` up to and including the closing token.
    fn vars(&mut self, close: Tok, close_desc: &'static str) -> Result<Dataset, ParseError> {
        let mut names = Vec::new();
        if *self.peek() == close {
            self.bump();
            return Ok(Dataset::empty());
        }
        loop {
            match self.bump() {
                Tok::Ident(name) => names.push(VarName(name)),
                _ => {
                    self.pos -= 1;
                    return Err(self.unexpected("a variable name"));
                }
            }
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                t if *t == close => {
                    self.bump();
                    return Ok(Dataset::new(names));
                }
                _ => return Err(self.unexpected(close_desc)),
            }
        }
    }
}

/// Parses formula text, expanding `K`, `<->` and `false`.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    Ok(f)
}

/// Parses a comma-separated variable list such as `x,y` (empty string allowed).
pub fn parse_dataset(text: &str) -> Result<Dataset, InvalidName> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Dataset::empty());
    }
    Dataset::from_names(text.split(',').map(|s| s.trim().to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(names: &[&str]) -> Dataset {
        Dataset::from_names(names.iter().copied()).unwrap()
    }

    fn p(name: &str) -> Formula {
        Formula::atom(name)
    }

    #[test]
    fn parses_tweet_statement() {
        let f = parse("[t] B{t}{} decline").unwrap();
        assert_eq!(
            f,
            Formula::announce(
                ds(&["t"]),
                Formula::belief(ds(&["t"]), Dataset::empty(), p("decline"))
            )
        );
    }

    #[test]
    fn implication_is_right_associative() {
        assert_eq!(
            parse("p -> q -> r").unwrap(),
            Formula::implies(p("p"), Formula::implies(p("q"), p("r")))
        );
    }

    #[test]
    fn knowledge_is_belief_without_trust() {
        assert_eq!(
            parse("K{x,y} p").unwrap(),
            Formula::belief(Dataset::empty(), ds(&["x", "y"]), p("p"))
        );
    }

    #[test]
    fn negation_binds_tighter_than_implication() {
        assert_eq!(
            parse("!p -> q").unwrap(),
            Formula::implies(Formula::not(p("p")), p("q"))
        );
    }

    #[test]
    fn datasets_are_canonical() {
        assert_eq!(parse("B{y,x}{} p").unwrap(), parse("B{x,y}{} p").unwrap());
        assert_eq!(parse("[x,x,y] p").unwrap(), parse("[y,x] p").unwrap());
    }

    #[test]
    fn sugar_is_eliminated() {
        assert_eq!(parse("p <-> q").unwrap(), Formula::iff(p("p"), p("q")));
        assert_eq!(
            parse("p <-> q").unwrap(),
            parse("!((p -> q) -> !(q -> p))").unwrap()
        );
        assert_eq!(parse("false").unwrap(), Formula::falsum());
    }

    #[test]
    fn reserved_atom_is_rejected() {
        assert_eq!(parse("p -> __f"), Err(ParseError::ReservedAtom { pos: 5 }));
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse("p ->").unwrap_err().position(), 4);
        assert_eq!(parse("B{x} p").unwrap_err().position(), 5);
        assert_eq!(parse("(p").unwrap_err().position(), 2);
        assert_eq!(parse("p q").unwrap_err().position(), 2);
        assert_eq!(parse("p & q").unwrap_err().position(), 2);
        assert_eq!(parse("[x,] p").unwrap_err().position(), 3);
        assert!(parse("").is_err());
        assert!(parse("B p").is_err());
        assert!(parse("_x").is_err());
    }

    #[test]
    fn prints_canonically() {
        assert_eq!(
            print(&Formula::belief(Dataset::empty(), ds(&["x"]), p("p"))),
            "B{}{x} p"
        );
        assert_eq!(print(&Formula::announce(Dataset::empty(), p("p"))), "[] p");
        assert_eq!(print(&Formula::implies(p("p"), p("p"))), "p -> p");
        assert_eq!(print(&parse("(p -> q) -> r").unwrap()), "(p -> q) -> r");
        assert_eq!(print(&parse("[y,x] !(p -> q)").unwrap()), "[x,y] !(p -> q)");
        assert_eq!(print(&parse("!B{t}{} false").unwrap()), "!B{t}{} false");
    }

    #[test]
    fn subformula_counts() {
        assert_eq!(subformula_occurrences(&p("p")), 1);
        assert_eq!(subformula_occurrences(&parse("[x][y]p").unwrap()), 3);
        assert_eq!(subformula_occurrences(&parse("p -> p").unwrap()), 3);
    }

    #[test]
    fn dataset_union_and_subset() {
        let a = ds(&["x", "z"]);
        let b = ds(&["y", "z"]);
        assert_eq!(a.union(&b), ds(&["x", "y", "z"]));
        assert!(ds(&["z"]).is_subset(&a));
        assert!(Dataset::empty().is_subset(&a));
        assert!(!b.is_subset(&a));
    }

    #[test]
    fn parse_dataset_lists() {
        assert_eq!(parse_dataset("").unwrap(), Dataset::empty());
        assert_eq!(parse_dataset("y, x").unwrap(), ds(&["x", "y"]));
        assert!(parse_dataset("x,,y").is_err());
    }
}
