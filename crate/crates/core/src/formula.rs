//! Formula syntax: AST, parser, printer and abbreviation expansion.
//!
//! Concrete syntax, loosest binding first:
//!
//! ```text
//! formula  := iff ('*' iff)*
//! iff      := imp ('<->' imp)*
//! imp      := or ('->' imp)?
//! or       := and ('\/' and)*
//! and      := unary ('/\' unary)*
//! unary    := '~' unary | '[]' unary | '<>' unary | atomExpr
//! atomExpr := 'T' | 'F' | IDENT | '(' formula '|' formula ')' | '(' formula ')'
//! ```
//!
//! `(psi | phi)` is the conditional "psi given phi" and `psi * phi` is
//! independence. `T` and `F` are reserved and cannot name atoms.

use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Bot,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Box(Box<Formula>),
    Diamond(Box<Formula>),
    /// `Cond(consequent, antecedent)`, written `(consequent | antecedent)`.
    Cond(Box<Formula>, Box<Formula>),
    /// `Indep(psi, phi)`, written `psi * phi`.
    Indep(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn boxed(f: Formula) -> Formula {
        Formula::Box(Box::new(f))
    }

    pub fn diamond(f: Formula) -> Formula {
        Formula::Diamond(Box::new(f))
    }

    pub fn cond(consequent: Formula, antecedent: Formula) -> Formula {
        Formula::Cond(Box::new(consequent), Box::new(antecedent))
    }

    pub fn indep(psi: Formula, phi: Formula) -> Formula {
        Formula::Indep(Box::new(psi), Box::new(phi))
    }

    /// Direct subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Top | Formula::Bot | Formula::Atom(_) => vec![],
            Formula::Not(a) | Formula::Box(a) | Formula::Diamond(a) => vec![a],
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b)
            | Formula::Cond(a, b)
            | Formula::Indep(a, b) => vec![a, b],
        }
    }

    /// Atom names in order of first occurrence.
    pub fn atoms(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<String>) {
        if let Formula::Atom(name) = self {
            if !out.contains(name) {
                out.push(name.clone());
            }
        }
        for c in self.children() {
            c.collect_atoms(out);
        }
    }

    pub fn atom_set(&self) -> BTreeSet<String> {
        self.atoms().into_iter().collect()
    }

    /// Maximum nesting of conditionals (`p` has depth 0, `(q|p)` depth 1).
    pub fn cond_depth(&self) -> usize {
        let inner = self
            .children()
            .into_iter()
            .map(Formula::cond_depth)
            .max()
            .unwrap_or(0);
        match self {
            Formula::Cond(..) => inner + 1,
            _ => inner,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    /// True when the formula uses only `T`, `F`, atoms and the classical
    /// connectives.
    pub fn is_classical(&self) -> bool {
        match self {
            Formula::Top | Formula::Bot | Formula::Atom(_) => true,
            Formula::Not(a) => a.is_classical(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.is_classical() && b.is_classical()
            }
            Formula::Box(_) | Formula::Diamond(_) | Formula::Cond(..) | Formula::Indep(..) => false,
        }
    }
}

/// Rewrite the abbreviations away: `Iff`, `Indep` and `Diamond` disappear.
pub fn expand(f: &Formula) -> Formula {
    match f {
        Formula::Top => Formula::Top,
        Formula::Bot => Formula::Bot,
        Formula::Atom(a) => Formula::Atom(a.clone()),
        Formula::Not(a) => Formula::not(expand(a)),
        Formula::And(a, b) => Formula::and(expand(a), expand(b)),
        Formula::Or(a, b) => Formula::or(expand(a), expand(b)),
        Formula::Implies(a, b) => Formula::implies(expand(a), expand(b)),
        Formula::Iff(a, b) => expand_iff(expand(a), expand(b)),
        Formula::Box(a) => Formula::boxed(expand(a)),
        Formula::Diamond(a) => Formula::not(Formula::boxed(Formula::not(expand(a)))),
        Formula::Cond(a, b) => Formula::cond(expand(a), expand(b)),
        Formula::Indep(psi, phi) => {
            let psi = expand(psi);
            let c = Formula::cond(psi.clone(), expand(phi));
            Formula::boxed(expand_iff(c, psi))
        }
    }
}

fn expand_iff(a: Formula, b: Formula) -> Formula {
    Formula::and(
        Formula::implies(a.clone(), b.clone()),
        Formula::implies(b, a),
    )
}

pub fn is_box_free(f: &Formula) -> bool {
    fn walk(f: &Formula) -> bool {
        match f {
            Formula::Box(_) => false,
            _ => f.children().into_iter().all(walk),
        }
    }
    walk(&expand(f))
}

// ---------------------------------------------------------------------------
// Printing

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Indep(..) => 1,
        Formula::Iff(..) => 2,
        Formula::Implies(..) => 3,
        Formula::Or(..) => 4,
        Formula::And(..) => 5,
        Formula::Not(_) | Formula::Box(_) | Formula::Diamond(_) => 6,
        _ => 7,
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn wrap(out: &mut fmt::Formatter<'_>, f: &Formula, paren: bool) -> fmt::Result {
            if paren {
                write!(out, "({f})")
            } else {
                write!(out, "{f}")
            }
        }
        fn left_assoc(out: &mut fmt::Formatter<'_>, a: &Formula, op: &str, b: &Formula, p: u8) -> fmt::Result {
            wrap(out, a, prec(a) < p)?;
            write!(out, " {op} ")?;
            wrap(out, b, prec(b) <= p)
        }
        match self {
            Formula::Top => write!(out, "T"),
            Formula::Bot => write!(out, "F"),
            Formula::Atom(a) => write!(out, "{a}"),
            Formula::Not(a) => {
                write!(out, "~")?;
                wrap(out, a, prec(a) < 6)
            }
            Formula::Box(a) => {
                write!(out, "[]")?;
                wrap(out, a, prec(a) < 6)
            }
            Formula::Diamond(a) => {
                write!(out, "<>")?;
                wrap(out, a, prec(a) < 6)
            }
            Formula::And(a, b) => left_assoc(out, a, "/\\", b, 5),
            Formula::Or(a, b) => left_assoc(out, a, "\\/", b, 4),
            Formula::Iff(a, b) => left_assoc(out, a, "<->", b, 2),
            Formula::Indep(a, b) => left_assoc(out, a, "*", b, 1),
            Formula::Implies(a, b) => {
                wrap(out, a, prec(a) <= 3)?;
                write!(out, " -> ")?;
                wrap(out, b, prec(b) < 3)
            }
            Formula::Cond(a, b) => write!(out, "({a} | {b})"),
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", .expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("unknown atom `{name}` at byte {offset}")]
    UnknownAtom { name: String, offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownAtom { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Top,
    Bot,
    Ident(String),
    LParen,
    RParen,
    Bar,
    Tilde,
    BoxOp,
    DiaOp,
    AndOp,
    OrOp,
    ImpOp,
    IffOp,
    Star,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Top => "`T`".into(),
            Tok::Bot => "`F`".into(),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::BoxOp => "`[]`".into(),
            Tok::DiaOp => "`<>`".into(),
            Tok::AndOp => "`/\\`".into(),
            Tok::OrOp => "`\\/`".into(),
            Tok::ImpOp => "`->`".into(),
            Tok::IffOp => "`<->`".into(),
            Tok::Star => "`*`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

const START: &[&str] = &["`~`", "`[]`", "`<>`", "`T`", "`F`", "identifier", "`(`"];
const BINARY: &[&str] = &["`/\\`", "`\\/`", "`->`", "`<->`", "`*`"];

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let rest = &text[i..];
        let fixed: &[(&str, Tok)] = &[
            ("<->", Tok::IffOp),
            ("->", Tok::ImpOp),
            ("/\\", Tok::AndOp),
            ("\\/", Tok::OrOp),
            ("[]", Tok::BoxOp),
            ("<>", Tok::DiaOp),
            ("(", Tok::LParen),
            (")", Tok::RParen),
            ("|", Tok::Bar),
            ("~", Tok::Tilde),
            ("*", Tok::Star),
        ];
        if let Some((s, t)) = fixed.iter().find(|(s, _)| rest.starts_with(s)) {
            toks.push((t.clone(), i));
            i += s.len();
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &text[start..i];
            let tok = match word {
                "T" => Tok::Top,
                "F" => Tok::Bot,
                _ => Tok::Ident(word.to_string()),
            };
            toks.push((tok, start));
            continue;
        }
        let ch = rest.chars().next().unwrap_or('?');
        let mut expected = START.to_vec();
        expected.extend_from_slice(BINARY);
        expected.extend_from_slice(&["`)`", "`|`"]);
        return Err(ParseError::Syntax {
            offset: i,
            expected,
            found: format!("character `{ch}`"),
        });
    }
    toks.push((Tok::Eof, text.len()));
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    atoms: Option<&'a [String]>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: Vec<&'static str>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            offset: self.offset(),
            expected,
            found: self.peek().describe(),
        })
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.iff()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let right = self.iff()?;
            left = Formula::indep(left, right);
        }
        Ok(left)
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.imp()?;
        while *self.peek() == Tok::IffOp {
            self.bump();
            let right = self.imp()?;
            left = Formula::iff(left, right);
        }
        Ok(left)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let left = self.or()?;
        if *self.peek() == Tok::ImpOp {
            self.bump();
            let right = self.imp()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.and()?;
        while *self.peek() == Tok::OrOp {
            self.bump();
            let right = self.and()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.unary()?;
        while *self.peek() == Tok::AndOp {
            self.bump();
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::BoxOp => {
                self.bump();
                Ok(Formula::boxed(self.unary()?))
            }
            Tok::DiaOp => {
                self.bump();
                Ok(Formula::diamond(self.unary()?))
            }
            _ => self.atom_expr(),
        }
    }

    fn atom_expr(&mut self) -> Result<Formula, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Top => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Bot => {
                self.bump();
                Ok(Formula::Bot)
            }
            Tok::Ident(name) => {
                if let Some(theta) = self.atoms {
                    if !theta.contains(&name) {
                        return Err(ParseError::UnknownAtom { name, offset });
                    }
                }
                self.bump();
                Ok(Formula::Atom(name))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.formula()?;
                let out = match self.peek() {
                    Tok::Bar => {
                        self.bump();
                        let antecedent = self.formula()?;
                        if *self.peek() != Tok::RParen {
                            let mut exp = BINARY.to_vec();
                            exp.push("`)`");
                            return self.fail(exp);
                        }
                        self.bump();
                        Formula::cond(inner, antecedent)
                    }
                    Tok::RParen => {
                        self.bump();
                        inner
                    }
                    _ => {
                        let mut exp = BINARY.to_vec();
                        exp.extend_from_slice(&["`|`", "`)`"]);
                        return self.fail(exp);
                    }
                };
                Ok(out)
            }
            _ => self.fail(START.to_vec()),
        }
    }
}

fn run_parser(text: &str, atoms: Option<&[String]>) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        atoms,
    };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        let mut exp = BINARY.to_vec();
        exp.push("end of input");
        return p.fail(exp);
    }
    Ok(f)
}

/// Parse without restricting atom names.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    run_parser(text, None)
}

/// Parse, rejecting any atom outside `theta`.
pub fn parse_in(text: &str, theta: &[String]) -> Result<Formula, ParseError> {
    run_parser(text, Some(theta))
}
