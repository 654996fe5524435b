//! Hilbert-style derivation checking.
//!
//! Formulas are compared after `expand`, so `↔`, `×` and `◇` are treated as
//! the abbreviations they are. Besides axiom instances, modus ponens and
//! necessitation, the checker accepts two derived rules: classical tautology
//! instances (truth tables over atoms and opaque modal or conditional
//! subformulas) and substitution of a proved equivalence at one position.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::eval::{valid, EvalError};
use crate::formula::{expand, parse, Formula, ParseError};
use crate::model::ModelState;

pub const MAX_PLACEHOLDERS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AxiomId {
    #[serde(rename = "c1")]
    C1,
    #[serde(rename = "c2")]
    C2,
    #[serde(rename = "c3")]
    C3,
    #[serde(rename = "c4")]
    C4,
    #[serde(rename = "c5")]
    C5,
    #[serde(rename = "c6")]
    C6,
    #[serde(rename = "c7")]
    C7,
    #[serde(rename = "m2")]
    M2,
    #[serde(rename = "m3")]
    M3,
    #[serde(rename = "m4")]
    M4,
    #[serde(rename = "b1")]
    B1,
    #[serde(rename = "b2")]
    B2,
    #[serde(rename = "b3")]
    B3,
    #[serde(rename = "b4")]
    B4,
    #[serde(rename = "b5")]
    B5,
    #[serde(rename = "b6")]
    B6,
    #[serde(rename = "b6wA")]
    B6wA,
    #[serde(rename = "b6wB")]
    B6wB,
}

/// Schema shapes; `phi`, `psi` and `eta` are the metavariables.
const SCHEMAS: &[(AxiomId, &str, &str)] = &[
    (AxiomId::C1, "c1", "T"),
    (AxiomId::C2, "c2", "phi -> (psi -> phi)"),
    (AxiomId::C3, "c3", "(eta -> (phi -> psi)) -> ((eta -> phi) -> (eta -> psi))"),
    (AxiomId::C4, "c4", "(~phi -> ~psi) -> ((~phi -> psi) -> phi)"),
    (AxiomId::C5, "c5", "F <-> ~T"),
    (AxiomId::C6, "c6", "(phi -> psi) <-> (~phi \\/ psi)"),
    (AxiomId::C7, "c7", "(phi /\\ psi) <-> ~(~phi \\/ ~psi)"),
    (AxiomId::M2, "m2", "[](phi -> psi) -> ([]phi -> []psi)"),
    (AxiomId::M3, "m3", "[]phi -> phi"),
    (AxiomId::M4, "m4", "<>phi <-> ~[]~phi"),
    (AxiomId::B1, "b1", "[](phi -> psi) -> ([]~phi \\/ [](psi | phi))"),
    (AxiomId::B2, "b2", "(psi -> eta | phi) -> ((psi | phi) -> (eta | phi))"),
    (AxiomId::B3, "b3", "(psi | phi) -> (phi -> psi)"),
    (AxiomId::B4, "b4", "~(~psi | phi) <-> (psi | phi)"),
    (AxiomId::B5, "b5", "(psi * phi) <-> []((psi | phi) <-> psi)"),
    (AxiomId::B6, "b6", "(psi * phi) <-> (phi * psi)"),
    (AxiomId::B6wA, "b6wA", "(psi * ~phi) <-> (psi * phi)"),
    (AxiomId::B6wB, "b6wB", "[](psi <-> eta) -> []((phi | psi) <-> (phi | eta))"),
];

const METAVARS: [&str; 3] = ["phi", "psi", "eta"];

impl AxiomId {
    pub fn all() -> impl Iterator<Item = AxiomId> {
        SCHEMAS.iter().map(|s| s.0)
    }

    pub fn name(self) -> &'static str {
        SCHEMAS.iter().find(|s| s.0 == self).map(|s| s.1).expect("every id has a schema")
    }

    pub fn from_name(name: &str) -> Option<AxiomId> {
        SCHEMAS.iter().find(|s| s.1 == name).map(|s| s.0)
    }

    pub fn shape(self) -> Formula {
        let text = SCHEMAS.iter().find(|s| s.0 == self).map(|s| s.2).expect("every id has a schema");
        parse(text).expect("schema shapes parse")
    }

    pub fn allowed_in(self, logic: Logic) -> bool {
        match self {
            AxiomId::B6 => logic == Logic::DmBL,
            AxiomId::B6wA | AxiomId::B6wB => logic == Logic::DmBLStar,
            _ => true,
        }
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Logic {
    #[serde(rename = "DmBL")]
    DmBL,
    #[default]
    #[serde(rename = "DmBL*")]
    DmBLStar,
}

pub type Subst = BTreeMap<String, Formula>;

fn match_into(shape: &Formula, f: &Formula, s: &mut Subst) -> bool {
    if let Formula::Atom(m) = shape {
        if METAVARS.contains(&m.as_str()) {
            return match s.get(m) {
                Some(bound) => bound == f,
                None => {
                    s.insert(m.clone(), f.clone());
                    true
                }
            };
        }
    }
    if std::mem::discriminant(shape) != std::mem::discriminant(f) {
        return false;
    }
    match (shape, f) {
        (Formula::Atom(a), Formula::Atom(b)) => a == b,
        _ => {
            let (xs, ys) = (shape.children(), f.children());
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_into(x, y, s))
        }
    }
}

/// A substitution σ with σ(shape) = f: first structurally, then up to
/// abbreviation expansion.
pub fn match_schema(f: &Formula, id: AxiomId) -> Option<Subst> {
    let shape = id.shape();
    let mut s = Subst::new();
    if match_into(&shape, f, &mut s) {
        return Some(s);
    }
    let mut s = Subst::new();
    match_into(&expand(&shape), &expand(f), &mut s).then_some(s)
}

pub fn instantiate(shape: &Formula, s: &Subst) -> Option<Formula> {
    Some(match shape {
        Formula::Atom(m) if METAVARS.contains(&m.as_str()) => s.get(m)?.clone(),
        Formula::Top | Formula::Bot | Formula::Atom(_) => shape.clone(),
        Formula::Not(a) => Formula::not(instantiate(a, s)?),
        Formula::Box(a) => Formula::boxed(instantiate(a, s)?),
        Formula::Diamond(a) => Formula::diamond(instantiate(a, s)?),
        Formula::And(a, b) => Formula::and(instantiate(a, s)?, instantiate(b, s)?),
        Formula::Or(a, b) => Formula::or(instantiate(a, s)?, instantiate(b, s)?),
        Formula::Implies(a, b) => Formula::implies(instantiate(a, s)?, instantiate(b, s)?),
        Formula::Iff(a, b) => Formula::iff(instantiate(a, s)?, instantiate(b, s)?),
        Formula::Cond(a, b) => Formula::cond(instantiate(a, s)?, instantiate(b, s)?),
        Formula::Indep(a, b) => Formula::indep(instantiate(a, s)?, instantiate(b, s)?),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Axiom { id: AxiomId, subst: Option<Subst> },
    /// From line `minor` (φ) and line `major` (φ → ψ); 1-based.
    ModusPonens { minor: usize, major: usize },
    Necessitation { from: usize },
    Tautology,
    /// Replace, at one position of line `theorem`, one side of the
    /// equivalence proved at line `equivalence` by the other.
    EquivSubst {
        theorem: usize,
        equivalence: usize,
        path: Option<Vec<usize>>,
    },
}

impl Justification {
    fn refs(&self) -> Vec<usize> {
        match self {
            Justification::Axiom { .. } | Justification::Tautology => vec![],
            Justification::ModusPonens { minor, major } => vec![*minor, *major],
            Justification::Necessitation { from } => vec![*from],
            Justification::EquivSubst { theorem, equivalence, .. } => vec![*theorem, *equivalence],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub formula: Formula,
    pub just: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub lines: Vec<Line>,
    pub target: Formula,
    pub logic: Logic,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProofError {
    #[error("line {line}: reference to line {index}, which does not precede it")]
    MalformedIndex { line: usize, index: usize },
    #[error("line {line}: {count} placeholders exceed the truth-table limit of {MAX_PLACEHOLDERS}")]
    TooManyPlaceholders { line: usize, count: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub accepted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
}

impl Verdict {
    fn reject(line: usize, reason: impl Into<String>) -> Verdict {
        Verdict {
            accepted: false,
            failure: Some(Failure {
                line,
                reason: reason.into(),
            }),
        }
    }
}

/// Classical skeleton: atoms and maximal non-classical subformulas become
/// numbered variables.
fn skeleton(f: &Formula, vars: &mut Vec<Formula>) -> Skel {
    let mut var = |g: &Formula| {
        let i = vars.iter().position(|v| v == g).unwrap_or_else(|| {
            vars.push(g.clone());
            vars.len() - 1
        });
        Skel::Var(i)
    };
    match f {
        Formula::Top => Skel::Const(true),
        Formula::Bot => Skel::Const(false),
        Formula::Not(a) => Skel::Not(Box::new(skeleton(a, vars))),
        Formula::And(a, b) => Skel::And(Box::new(skeleton(a, vars)), Box::new(skeleton(b, vars))),
        Formula::Or(a, b) => Skel::Or(Box::new(skeleton(a, vars)), Box::new(skeleton(b, vars))),
        Formula::Implies(a, b) => Skel::Implies(Box::new(skeleton(a, vars)), Box::new(skeleton(b, vars))),
        _ => var(f),
    }
}

enum Skel {
    Const(bool),
    Var(usize),
    Not(Box<Skel>),
    And(Box<Skel>, Box<Skel>),
    Or(Box<Skel>, Box<Skel>),
    Implies(Box<Skel>, Box<Skel>),
}

impl Skel {
    fn eval(&self, bits: u32) -> bool {
        match self {
            Skel::Const(b) => *b,
            Skel::Var(i) => bits >> i & 1 == 1,
            Skel::Not(a) => !a.eval(bits),
            Skel::And(a, b) => a.eval(bits) && b.eval(bits),
            Skel::Or(a, b) => a.eval(bits) || b.eval(bits),
            Skel::Implies(a, b) => !a.eval(bits) || b.eval(bits),
        }
    }
}

/// `Ok(Some(n))` when tautological over `n` placeholders, `Ok(None)` when
/// some assignment falsifies it.
pub fn tautology(f: &Formula) -> Result<Option<usize>, usize> {
    let mut vars = Vec::new();
    let sk = skeleton(&expand(f), &mut vars);
    if vars.len() > MAX_PLACEHOLDERS {
        return Err(vars.len());
    }
    Ok((0..1u32 << vars.len()).all(|bits| sk.eval(bits)).then_some(vars.len()))
}

fn split_iff(f: &Formula) -> Option<(&Formula, &Formula)> {
    if let Formula::And(x, y) = f {
        if let (Formula::Implies(a, b), Formula::Implies(c, d)) = (x.as_ref(), y.as_ref()) {
            if a == d && b == c {
                return Some((a, b));
            }
        }
    }
    None
}

fn subterm<'a>(f: &'a Formula, path: &[usize]) -> Option<&'a Formula> {
    match path.split_first() {
        None => Some(f),
        Some((&i, rest)) => subterm(f.children().get(i)?, rest),
    }
}

fn replace_at(f: &Formula, path: &[usize], with: &Formula) -> Option<Formula> {
    let Some((&i, rest)) = path.split_first() else {
        return Some(with.clone());
    };
    let mut kids: Vec<Formula> = f.children().into_iter().cloned().collect();
    let new = replace_at(kids.get(i)?, rest, with)?;
    kids[i] = new;
    let mut it = kids.into_iter();
    let mut next = || it.next().expect("arity preserved");
    Some(match f {
        Formula::Not(_) => Formula::not(next()),
        Formula::Box(_) => Formula::boxed(next()),
        Formula::Diamond(_) => Formula::diamond(next()),
        Formula::And(..) => Formula::and(next(), next()),
        Formula::Or(..) => Formula::or(next(), next()),
        Formula::Implies(..) => Formula::implies(next(), next()),
        Formula::Iff(..) => Formula::iff(next(), next()),
        Formula::Cond(..) => Formula::cond(next(), next()),
        Formula::Indep(..) => Formula::indep(next(), next()),
        Formula::Top | Formula::Bot | Formula::Atom(_) => return None,
    })
}

fn positions(f: &Formula, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(prefix.clone());
    for (i, c) in f.children().into_iter().enumerate() {
        prefix.push(i);
        positions(c, prefix, out);
        prefix.pop();
    }
}

/// Whether `goal` is `theorem` with one subformula equal to a side of
/// `l ↔ r` replaced by the other side. Positions address the formula as
/// written; comparisons are up to expansion (`l`, `r`, `goal` expanded).
fn equiv_rewrite(theorem: &Formula, l: &Formula, r: &Formula, goal: &Formula, path: Option<&[usize]>) -> bool {
    let candidates: Vec<Vec<usize>> = match path {
        Some(p) => vec![p.to_vec()],
        None => {
            let mut all = Vec::new();
            positions(theorem, &mut Vec::new(), &mut all);
            all
        }
    };
    candidates.iter().any(|p| {
        let Some(here) = subterm(theorem, p) else {
            return false;
        };
        let here = expand(here);
        [(l, r), (r, l)].iter().any(|(from, to)| {
            here == **from && replace_at(theorem, p, to).is_some_and(|g| expand(&g) == *goal)
        })
    })
}

/// Check every line; the verdict names the first unlicensed line.
pub fn check(d: &Derivation) -> Result<Verdict, ProofError> {
    if d.lines.is_empty() {
        return Ok(Verdict::reject(0, "empty derivation"));
    }
    let expanded: Vec<Formula> = d.lines.iter().map(|l| expand(&l.formula)).collect();
    for (k, line) in d.lines.iter().enumerate() {
        let n = k + 1;
        for index in line.just.refs() {
            if index == 0 || index >= n {
                return Err(ProofError::MalformedIndex { line: n, index });
            }
        }
        let here = &expanded[k];
        let at = |i: usize| &expanded[i - 1];
        let failure: Option<String> = match &line.just {
            Justification::Axiom { id, subst } => {
                if !id.allowed_in(d.logic) {
                    Some(format!("axiom {id} is not part of this logic"))
                } else {
                    match subst {
                        Some(s) => match instantiate(&id.shape(), s) {
                            None => Some(format!("substitution for {id} misses a metavariable")),
                            Some(inst) if expand(&inst) == *here => None,
                            Some(_) => Some(format!("not the {id} instance under the given substitution")),
                        },
                        None => match_schema(&line.formula, *id)
                            .is_none()
                            .then(|| format!("not an instance of {id}")),
                    }
                }
            }
            Justification::ModusPonens { minor, major } => {
                let want = Formula::implies(at(*minor).clone(), here.clone());
                (*at(*major) != want).then(|| format!("line {major} is not line {minor} -> this line"))
            }
            Justification::Necessitation { from } => {
                (*here != Formula::boxed(at(*from).clone())).then(|| format!("not [] of line {from}"))
            }
            Justification::Tautology => match tautology(here) {
                Err(count) => return Err(ProofError::TooManyPlaceholders { line: n, count }),
                Ok(None) => Some("not a classical tautology".into()),
                Ok(Some(_)) => None,
            },
            Justification::EquivSubst {
                theorem,
                equivalence,
                path,
            } => match split_iff(at(*equivalence)) {
                None => Some(format!("line {equivalence} is not an equivalence")),
                Some((l, r)) => (!equiv_rewrite(&d.lines[*theorem - 1].formula, l, r, here, path.as_deref()))
                    .then(|| format!("not a rewrite of line {theorem} by line {equivalence}")),
            },
        };
        if let Some(reason) = failure {
            return Ok(Verdict::reject(n, reason));
        }
    }
    if *expanded.last().expect("nonempty") != expand(&d.target) {
        return Ok(Verdict::reject(d.lines.len(), "last line is not the target"));
    }
    Ok(Verdict {
        accepted: true,
        failure: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SoundnessReport {
    pub accepted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_valid: Option<bool>,
    /// Accepted lines that are not valid in the model; must stay empty.
    pub violations: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CrossError {
    #[error(transparent)]
    Proof(#[from] ProofError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("only DmBL* derivations can be checked against the model")]
    WrongLogic,
}

/// Evaluate an accepted derivation's lines in copies of `state`; the target
/// is evaluated in `state` itself.
pub fn cross_validate(d: &Derivation, state: &mut ModelState) -> Result<SoundnessReport, CrossError> {
    if d.logic != Logic::DmBLStar {
        return Err(CrossError::WrongLogic);
    }
    if !check(d)?.accepted {
        return Ok(SoundnessReport {
            accepted: false,
            target_valid: None,
            violations: vec![],
        });
    }
    let mut violations = Vec::new();
    for (k, line) in d.lines.iter().enumerate() {
        let mut copy = state.clone();
        if !valid(&mut copy, &line.formula)? {
            violations.push(k + 1);
        }
    }
    let target_valid = valid(state, &d.target)?;
    Ok(SoundnessReport {
        accepted: true,
        target_valid: Some(target_valid),
        violations,
    })
}

// ---------------------------------------------------------------------------
// Script files

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptLine {
    pub formula: String,
    pub rule: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub refs: Vec<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub subst: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Script {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub logic: Logic,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    pub lines: Vec<ScriptLine>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScriptFile {
    Full(Script),
    Bare(Vec<ScriptLine>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScriptError {
    #[error("invalid proof script: {0}")]
    Json(String),
    #[error("line {line}: {error}")]
    Formula { line: usize, error: ParseError },
    #[error("target: {0}")]
    Target(ParseError),
    #[error("line {line}: unknown rule `{rule}`")]
    UnknownRule { line: usize, rule: String },
    #[error("line {line}: rule `{rule}` takes {expected} references")]
    RefCount { line: usize, rule: String, expected: usize },
    #[error("empty script")]
    Empty,
}

pub fn parse_script(text: &str) -> Result<Script, ScriptError> {
    match serde_json::from_str::<ScriptFile>(text).map_err(|e| ScriptError::Json(e.to_string()))? {
        ScriptFile::Full(s) => Ok(s),
        ScriptFile::Bare(lines) => Ok(Script {
            name: None,
            logic: Logic::default(),
            target: None,
            lines,
        }),
    }
}

impl Script {
    /// Resolve rules and formulas. Without an explicit target the last line
    /// is the target.
    pub fn to_derivation(&self) -> Result<Derivation, ScriptError> {
        let mut lines = Vec::new();
        for (k, l) in self.lines.iter().enumerate() {
            let n = k + 1;
            let formula = parse(&l.formula).map_err(|error| ScriptError::Formula { line: n, error })?;
            let arity = |expected: usize| {
                if l.refs.len() == expected {
                    Ok(())
                } else {
                    Err(ScriptError::RefCount {
                        line: n,
                        rule: l.rule.clone(),
                        expected,
                    })
                }
            };
            let just = match l.rule.as_str() {
                "mp" => {
                    arity(2)?;
                    Justification::ModusPonens {
                        minor: l.refs[0],
                        major: l.refs[1],
                    }
                }
                "nec" | "m1" => {
                    arity(1)?;
                    Justification::Necessitation { from: l.refs[0] }
                }
                "taut" => {
                    arity(0)?;
                    Justification::Tautology
                }
                "equiv" => {
                    arity(2)?;
                    Justification::EquivSubst {
                        theorem: l.refs[0],
                        equivalence: l.refs[1],
                        path: l.path.clone(),
                    }
                }
                other => {
                    let id = AxiomId::from_name(other).ok_or_else(|| ScriptError::UnknownRule {
                        line: n,
                        rule: other.to_string(),
                    })?;
                    arity(0)?;
                    let subst = if l.subst.is_empty() {
                        None
                    } else {
                        let mut s = Subst::new();
                        for (m, text) in &l.subst {
                            let f = parse(text).map_err(|error| ScriptError::Formula { line: n, error })?;
                            s.insert(m.clone(), f);
                        }
                        Some(s)
                    };
                    Justification::Axiom { id, subst }
                }
            };
            lines.push(Line { formula, just });
        }
        let target = match &self.target {
            Some(t) => parse(t).map_err(ScriptError::Target)?,
            None => lines.last().ok_or(ScriptError::Empty)?.formula.clone(),
        };
        Ok(Derivation {
            lines,
            target,
            logic: self.logic,
        })
    }
}

impl Derivation {
    /// Script form, with formulas printed in concrete syntax.
    pub fn to_script(&self) -> Script {
        let lines = self
            .lines
            .iter()
            .map(|l| {
                let (rule, refs, subst, path) = match &l.just {
                    Justification::Axiom { id, subst } => (
                        id.name().to_string(),
                        vec![],
                        subst
                            .iter()
                            .flatten()
                            .map(|(k, v)| (k.clone(), v.to_string()))
                            .collect(),
                        None,
                    ),
                    Justification::ModusPonens { minor, major } => ("mp".into(), vec![*minor, *major], BTreeMap::new(), None),
                    Justification::Necessitation { from } => ("nec".into(), vec![*from], BTreeMap::new(), None),
                    Justification::Tautology => ("taut".into(), vec![], BTreeMap::new(), None),
                    Justification::EquivSubst {
                        theorem,
                        equivalence,
                        path,
                    } => ("equiv".into(), vec![*theorem, *equivalence], BTreeMap::new(), path.clone()),
                };
                ScriptLine {
                    formula: l.formula.to_string(),
                    rule,
                    refs,
                    subst,
                    path,
                }
            })
            .collect();
        Script {
            name: None,
            logic: self.logic,
            target: Some(self.target.to_string()),
            lines,
        }
    }
}
