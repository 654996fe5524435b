//! Shared oracles for the integration suites.
#![allow(dead_code)]

use std::collections::BTreeSet;

use dmbl_core::model::{Case, Model, ModelState};
use dmbl_core::worlds::PropSet;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Levels up to this many worlds have every subset enumerated.
pub const EXHAUSTIVE: usize = 12;

pub fn set0(universe: usize, members: &[usize]) -> PropSet {
    PropSet::from_indices(0, universe, members.iter().copied())
}

pub fn all_sets(level: usize, universe: usize) -> impl Iterator<Item = PropSet> {
    assert!(universe <= 20);
    (0u64..1 << universe).map(move |m| PropSet::from_mask(level, universe, m))
}

pub fn mask(s: &PropSet) -> u64 {
    s.members().fold(0, |m, i| m | 1 << i)
}

pub fn random_set(rng: &mut StdRng, level: usize, universe: usize) -> PropSet {
    PropSet::from_indices(level, universe, (0..universe).filter(|_| rng.gen_bool(0.5)))
}

/// Nontrivial level-0 sets over four worlds, one per complement pair.
pub fn base_classes() -> Vec<PropSet> {
    (1u64..15).filter(|m| m & 1 == 1).map(|m| PropSet::from_mask(0, 4, m)).collect()
}

/// Demand models over {p,q}: every class stepped then re-stepped (case 0),
/// and every ordered pair of distinct classes (X, Y, X again).
pub fn invariant_models() -> Vec<Model> {
    let classes = base_classes();
    let mut out = Vec::new();
    for (k, x) in classes.iter().enumerate() {
        let mut s = ModelState::demand(&["p", "q"]);
        s.step(Some(x.clone())).unwrap();
        // Alternate the orientation of the repeat.
        let again = if k % 2 == 0 { x.clone() } else { x.complement() };
        let again = s.tower().lift(&again, 1).unwrap();
        s.step(Some(again)).unwrap();
        out.push(s.snapshot());
    }
    for x in &classes {
        for y in &classes {
            if x == y {
                continue;
            }
            let mut s = ModelState::demand(&["p", "q"]);
            s.step(Some(x.clone())).unwrap();
            let y1 = s.tower().lift(y, 1).unwrap();
            s.step(Some(y1)).unwrap();
            let x2 = s.tower().lift(x, 2).unwrap();
            s.step(Some(x2)).unwrap();
            out.push(s.snapshot());
        }
    }
    out
}

#[derive(Debug, Default)]
pub struct Report {
    pub pairs: usize,
    pub violations: Vec<String>,
}

impl Report {
    fn fail(&mut self, what: String) {
        if self.violations.len() < 20 {
            self.violations.push(what);
        }
    }
}

/// The consequents to test against an antecedent whose latest event was
/// processed at step `nu`: every set of level `nu+1` when it is small,
/// otherwise singletons, their complements, pairs and a random sample.
fn consequents(m: &Model, nu: usize, rng: &mut StdRng) -> (Vec<PropSet>, bool) {
    let level = nu + 1;
    let size = m.size(level);
    if size <= EXHAUSTIVE {
        return (all_sets(level, size).collect(), true);
    }
    let t = m.tower();
    let mut out = vec![t.empty(level), t.full(level)];
    for i in 0..size {
        let s = PropSet::from_indices(level, size, [i]);
        out.push(s.complement());
        out.push(s);
    }
    for i in 0..size.min(24) {
        for j in i + 1..size.min(24) {
            out.push(PropSet::from_indices(level, size, [i, j]));
        }
    }
    for _ in 0..200 {
        out.push(random_set(rng, level, size));
    }
    (out, false)
}

/// The latest step whose event lifts to `a` or its complement.
fn latest_event(m: &Model, a: &PropSet) -> Option<usize> {
    let t = m.tower();
    (0..m.history().len().min(a.level())).rev().find(|&nu| {
        let b = t.lift(&m.history()[nu].event, a.level()).unwrap();
        *a == b || *a == b.complement()
    })
}

/// β̃1–β̃4, β̃6w, β̃7, Lemma 2, the fix-point identity and transfer, on every
/// defined pair at every level of `m`.
pub fn check_invariants(m: &Model, seed: u64) -> Report {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut r = Report::default();
    let t = m.tower();
    for n in 1..=m.top() {
        let mut antecedents: Vec<PropSet> = Vec::new();
        for ev in &m.history()[..n] {
            let a = t.lift(&ev.event, n).unwrap();
            for x in [a.complement(), a] {
                if !antecedents.contains(&x) {
                    antecedents.push(x);
                }
            }
        }
        for a in &antecedents {
            let nu = latest_event(m, a).expect("antecedent comes from an event");
            let (cs, exhaustive) = consequents(m, nu, &mut rng);
            let lifted: Vec<PropSet> = cs.iter().map(|c| t.lift(c, n).unwrap()).collect();
            let fs: Vec<PropSet> = lifted.iter().map(|b| m.f_eval(b, a).unwrap()).collect();
            let not_a = a.complement();
            let low_a = t.image_test(a, nu + 1).unwrap().expect("event lifts");
            let mut lows = Vec::with_capacity(cs.len());
            for (k, (b, f)) in lifted.iter().zip(&fs).enumerate() {
                r.pairs += 1;
                let ctx = || format!("level {n}, A={a:?}, B={b:?}");
                if f.level() != n {
                    r.fail(format!("{}: value at level {}", ctx(), f.level()));
                    continue;
                }
                if !a.is_empty() && a.is_subset(b).unwrap() && !f.is_full() {
                    r.fail(format!("β̃1 {}", ctx()));
                }
                if a.intersection(f).unwrap() != a.intersection(b).unwrap() {
                    r.fail(format!("β̃3 {}", ctx()));
                }
                if m.f_eval(&b.complement(), a).unwrap() != f.complement() {
                    r.fail(format!("β̃4 {}", ctx()));
                }
                let g = m.f_eval(b, &not_a).unwrap();
                if f == b && g != *b {
                    r.fail(format!("β̃6w {}", ctx()));
                }
                if m.f_eval(f, a).unwrap() != *f || m.f_eval(f, &not_a).unwrap() != *f {
                    r.fail(format!("lemma 2 {}", ctx()));
                }
                let fix = a.intersection(b).unwrap().union(&not_a.intersection(f).unwrap()).unwrap();
                if fix != *f {
                    r.fail(format!("fix point {}", ctx()));
                }
                // Transfer: f at the level just above the step, lifted.
                let low = m.f_eval(&cs[k], &low_a).unwrap();
                if t.lift(&low, n).unwrap() != *f {
                    r.fail(format!("transfer {}", ctx()));
                }
                lows.push(low);
            }
            if exhaustive {
                check_lattice_exhaustive(&cs, &lows, n, a, &mut r);
            } else {
                check_lattice_by_singletons(m, nu, a, &mut rng, &mut r);
            }
        }
    }
    r
}

/// β̃2 and β̃7 on every pair, using the mask enumeration of `all_sets`.
/// `fs` are the values at the level of `cs`; transfer covers level `n`.
fn check_lattice_exhaustive(cs: &[PropSet], fs: &[PropSet], n: usize, a: &PropSet, r: &mut Report) {
    let fm: Vec<u64> = fs.iter().map(mask).collect();
    for (x, fx) in fm.iter().enumerate() {
        for (y, fy) in fm.iter().enumerate().skip(x + 1) {
            r.pairs += 1;
            if fm[x | y] != fx | fy {
                r.fail(format!("β̃2 level {n}, A={a:?}, B={:?}, C={:?}", cs[x], cs[y]));
            }
            if fm[x & y] != fx & fy {
                r.fail(format!("β̃7 level {n}, A={a:?}, B={:?}, C={:?}", cs[x], cs[y]));
            }
        }
    }
}

/// Above the exhaustive bound: the singleton values partition the level and
/// every tested set maps to the union of its singletons' values, which
/// together give β̃2 and β̃7 for every pair.
fn check_lattice_by_singletons(m: &Model, nu: usize, a: &PropSet, rng: &mut StdRng, r: &mut Report) {
    let t = m.tower();
    let n = a.level();
    let level = nu + 1;
    let size = m.size(level);
    let single: Vec<PropSet> = (0..size)
        .map(|i| {
            let s = PropSet::from_indices(level, size, [i]);
            m.f_eval(&t.lift(&s, n).unwrap(), a).unwrap()
        })
        .collect();
    let mut cover = t.empty(n);
    for (i, x) in single.iter().enumerate() {
        r.pairs += 1;
        if !cover.is_disjoint(x).unwrap() {
            r.fail(format!("singleton overlap level {n}, A={a:?}, world {i}"));
        }
        cover = cover.union(x).unwrap();
    }
    if !cover.is_full() {
        r.fail(format!("singletons do not cover level {n}, A={a:?}"));
    }
    for _ in 0..200 {
        let c = random_set(rng, level, size);
        let f = m.f_eval(&t.lift(&c, n).unwrap(), a).unwrap();
        let u = c.members().fold(t.empty(n), |acc, i| acc.union(&single[i]).unwrap());
        r.pairs += 1;
        if f != u {
            r.fail(format!("union decomposition level {n}, A={a:?}, C={c:?}"));
        }
    }
}

/// Recompute every case-0 step's blocks from the literal index set
/// μ_ν(b_ν) × ~μ_ν(b_ν), using f as it stood before the step, and compare
/// the nonempty ones and the resulting pair table with the model.
pub fn check_literal_blocks(m: &Model) -> Vec<String> {
    let t = m.tower();
    let mut bad = Vec::new();
    for ev in m.history() {
        let Case::Repeat { of: nu } = ev.case else { continue };
        let n = ev.step;
        let image = &m.history()[nu].image;
        let b = &ev.event;
        let not_b = b.complement();
        let size = m.size(nu + 1);
        let mut literal: BTreeSet<(Vec<usize>, Vec<usize>)> = BTreeSet::new();
        let mut pairs: BTreeSet<(u32, u32)> = BTreeSet::new();
        for w in image.members() {
            for w2 in (0..size).filter(|i| !image.contains(*i)) {
                let sw = t.lift(&PropSet::from_indices(nu + 1, size, [w]), n).unwrap();
                let sw2 = t.lift(&PropSet::from_indices(nu + 1, size, [w2]), n).unwrap();
                let pi = m.f_eval(&sw2, &not_b).unwrap().intersection(&sw).unwrap();
                let gamma = m.f_eval(&sw, b).unwrap().intersection(&sw2).unwrap();
                if pi.is_empty() || gamma.is_empty() {
                    continue;
                }
                for x in pi.members() {
                    for y in gamma.members() {
                        pairs.insert((x as u32, y as u32));
                        pairs.insert((y as u32, x as u32));
                    }
                }
                literal.insert((pi.to_vec(), gamma.to_vec()));
            }
        }
        let stored: BTreeSet<(Vec<usize>, Vec<usize>)> = ev
            .blocks
            .iter()
            .filter(|bl| !bl.pi.is_empty() && !bl.gamma.is_empty())
            .map(|bl| (bl.pi.to_vec(), bl.gamma.to_vec()))
            .collect();
        if literal != stored {
            bad.push(format!("step {n}: literal blocks {literal:?} but stored {stored:?}"));
        }
        let built: BTreeSet<(u32, u32)> = t.pairs(n + 1).iter().copied().collect();
        if built != pairs {
            bad.push(format!("step {n}: pair table differs from the literal construction"));
        }
    }
    bad
}

// ---------------------------------------------------------------------------
// Formulas

use dmbl_core::formula::{parse, Formula};
use dmbl_core::model::{Base, Limits, ModelConfig, ScheduleMode, SeedOrder};

pub fn pq_state(mode: ScheduleMode) -> ModelState {
    let config = ModelConfig {
        schedule: mode,
        seed: SeedOrder::AtomsFirst,
        limits: Limits::default(),
    };
    ModelState::new(&Base::Atoms(vec!["p".into(), "q".into()]), &config).unwrap()
}

/// Schema templates for the validity fixtures, over `{phi}`, `{psi}`, `{eta}`.
pub const THEOREMS: &[(&str, &str)] = &[
    ("true antecedent", "({psi}|T) <-> {psi}"),
    ("false antecedent", "({psi}|F) <-> {psi}"),
    ("negation", "(~{psi}|{phi}) <-> ~({psi}|{phi})"),
    ("conjunction", "({psi} /\\ {eta}|{phi}) <-> ({psi}|{phi}) /\\ ({eta}|{phi})"),
    ("disjunction", "({psi} \\/ {eta}|{phi}) <-> ({psi}|{phi}) \\/ ({eta}|{phi})"),
    ("implication", "({psi} -> {eta}|{phi}) <-> (({psi}|{phi}) -> ({eta}|{phi}))"),
    ("constants", "((T|{phi}) <-> T) /\\ ((F|{phi}) <-> F)"),
    ("inference", "({psi}|{phi}) /\\ {phi} <-> {phi} /\\ {psi}"),
    ("introspection", "[]~{phi} \\/ []({phi}|{phi})"),
    ("inter-independence", "({psi}|{phi}) * {phi}"),
    ("negated independence", "({psi} * {phi}) -> (~{psi} * {phi})"),
    ("joint independence", "(({psi} * {phi}) /\\ ({eta} * {phi})) -> (({psi} /\\ {eta}) * {phi})"),
    ("narcissistic", "({phi} * {phi}) -> ([]~{phi} \\/ []{phi})"),
    ("independence and proof", "({psi} * {phi}) -> ([]({phi} \\/ {psi}) -> ([]{phi} \\/ []{psi}))"),
    (
        "regularity",
        "(({phi} * {eta}) /\\ ({psi} * {eta})) -> ([](({phi} /\\ {eta}) -> ({psi} /\\ {eta})) -> ([]~{eta} \\/ []({phi} -> {psi})))",
    ),
];

/// (phi, psi, eta) choices. Antecedent positions stay literals so that the
/// canonical schedule reaches them early.
pub const INSTANCES: &[(&str, &str, &str)] = &[
    ("p", "q", "p \\/ q"),
    ("q", "p", "~p"),
    ("~p", "p /\\ q", "q"),
    ("p", "(q|p)", "~q"),
    ("q", "~q", "p"),
    ("p", "p", "q"),
    ("T", "q", "p"),
];

pub fn instantiate(template: &str, (phi, psi, eta): (&str, &str, &str)) -> Formula {
    let text = template
        .replace("{phi}", &format!("({phi})"))
        .replace("{psi}", &format!("({psi})"))
        .replace("{eta}", &format!("({eta})"));
    parse(&text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

/// Truth value of a classical formula under `world` (bit j = atom j).
pub fn truth(f: &Formula, atoms: &[&str], world: usize) -> bool {
    match f {
        Formula::Top => true,
        Formula::Bot => false,
        Formula::Atom(a) => world >> atoms.iter().position(|x| x == a).unwrap() & 1 == 1,
        Formula::Not(a) => !truth(a, atoms, world),
        Formula::And(a, b) => truth(a, atoms, world) && truth(b, atoms, world),
        Formula::Or(a, b) => truth(a, atoms, world) || truth(b, atoms, world),
        Formula::Implies(a, b) => !truth(a, atoms, world) || truth(b, atoms, world),
        Formula::Iff(a, b) => truth(a, atoms, world) == truth(b, atoms, world),
        _ => panic!("not classical: {f}"),
    }
}

/// The classical formula over {p,q} whose models are the bits of `class`,
/// written as a disjunction of minterms.
pub fn class_formula(class: u8) -> Formula {
    let minterm = |w: usize| {
        let lit = |name: &str, bit: usize| {
            if w >> bit & 1 == 1 {
                Formula::atom(name)
            } else {
                Formula::not(Formula::atom(name))
            }
        };
        Formula::and(lit("p", 0), lit("q", 1))
    };
    (0..4)
        .filter(|w| class >> w & 1 == 1)
        .map(minterm)
        .reduce(Formula::or)
        .unwrap_or(Formula::Bot)
}

pub fn random_classical(rng: &mut StdRng, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..6) {
            0 => Formula::Top,
            1 => Formula::Bot,
            2 | 3 => Formula::atom("p"),
            _ => Formula::atom("q"),
        };
    }
    let a = random_classical(rng, depth - 1);
    match rng.gen_range(0..5) {
        0 => Formula::not(a),
        1 => Formula::and(a, random_classical(rng, depth - 1)),
        2 => Formula::or(a, random_classical(rng, depth - 1)),
        3 => Formula::implies(a, random_classical(rng, depth - 1)),
        _ => Formula::iff(a, random_classical(rng, depth - 1)),
    }
}

/// A box-free formula over {p,q} with at most `nest` levels of conditional
/// nesting. Antecedents are classical or a single conditional.
pub fn random_box_free(rng: &mut StdRng, depth: usize, nest: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return random_classical(rng, 1);
    }
    let a = random_box_free(rng, depth - 1, nest);
    match rng.gen_range(0..7) {
        0 => Formula::not(a),
        1 => Formula::and(a, random_box_free(rng, depth - 1, nest)),
        2 => Formula::or(a, random_box_free(rng, depth - 1, nest)),
        3 => Formula::implies(a, random_box_free(rng, depth - 1, nest)),
        _ if nest == 0 => Formula::iff(a, random_box_free(rng, depth - 1, nest)),
        4 if nest >= 2 => Formula::cond(random_box_free(rng, depth - 1, nest - 1), random_conditional(rng)),
        _ => Formula::cond(random_box_free(rng, depth - 1, nest - 1), random_classical(rng, 2)),
    }
}

fn random_conditional(rng: &mut StdRng) -> Formula {
    Formula::cond(random_classical(rng, 1), random_classical(rng, 1))
}

// ---------------------------------------------------------------------------
// Rational functions of ε, for the limit oracle

use num_rational::BigRational;
use num_traits::{One, Zero};

/// `num(ε) / den(ε)` with coefficients in increasing degree.
#[derive(Debug, Clone)]
pub struct Ratio {
    pub num: Vec<BigRational>,
    pub den: Vec<BigRational>,
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    out
}

impl Ratio {
    pub fn constant(c: BigRational) -> Ratio {
        Ratio {
            num: vec![c],
            den: vec![BigRational::one()],
        }
    }

    /// `a + b·ε`
    pub fn linear(a: BigRational, b: BigRational) -> Ratio {
        Ratio {
            num: vec![a, b],
            den: vec![BigRational::one()],
        }
    }

    pub fn add(&self, o: &Ratio) -> Ratio {
        Ratio {
            num: poly_add(&poly_mul(&self.num, &o.den), &poly_mul(&o.num, &self.den)),
            den: poly_mul(&self.den, &o.den),
        }
    }

    pub fn mul(&self, o: &Ratio) -> Ratio {
        Ratio {
            num: poly_mul(&self.num, &o.num),
            den: poly_mul(&self.den, &o.den),
        }
    }

    pub fn div(&self, o: &Ratio) -> Ratio {
        Ratio {
            num: poly_mul(&self.num, &o.den),
            den: poly_mul(&self.den, &o.num),
        }
    }

    /// Value as ε → 0+, from the lowest-order terms.
    pub fn limit(&self) -> BigRational {
        let j = self.den.iter().position(|c| !c.is_zero()).expect("nonzero denominator");
        assert!(self.num[..j.min(self.num.len())].iter().all(Zero::is_zero), "unbounded");
        self.num.get(j).cloned().unwrap_or_else(BigRational::zero) / &self.den[j]
    }
}

// ---------------------------------------------------------------------------
// Proofs

use dmbl_core::formula::expand;
use dmbl_core::proof::{instantiate as fill, parse_script, AxiomId, Derivation, Justification, Line, Logic, Subst};

pub fn corpus() -> Vec<(String, Derivation)> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            let d = parse_script(&text).unwrap().to_derivation().unwrap();
            (p.file_name().unwrap().to_string_lossy().into_owned(), d)
        })
        .collect()
}

fn swap_atoms(f: &Formula) -> Formula {
    match f {
        Formula::Atom(a) if a == "p" => Formula::atom("q"),
        Formula::Atom(a) if a == "q" => Formula::atom("p"),
        Formula::Top | Formula::Bot | Formula::Atom(_) => f.clone(),
        Formula::Not(a) => Formula::not(swap_atoms(a)),
        Formula::Box(a) => Formula::boxed(swap_atoms(a)),
        Formula::Diamond(a) => Formula::diamond(swap_atoms(a)),
        Formula::And(a, b) => Formula::and(swap_atoms(a), swap_atoms(b)),
        Formula::Or(a, b) => Formula::or(swap_atoms(a), swap_atoms(b)),
        Formula::Implies(a, b) => Formula::implies(swap_atoms(a), swap_atoms(b)),
        Formula::Iff(a, b) => Formula::iff(swap_atoms(a), swap_atoms(b)),
        Formula::Cond(a, b) => Formula::cond(swap_atoms(a), swap_atoms(b)),
        Formula::Indep(a, b) => Formula::indep(swap_atoms(a), swap_atoms(b)),
    }
}

/// One random single-line change that alters what the line claims or how it
/// is justified. `None` when the drawn change would be a no-op.
pub fn mutate(d: &Derivation, rng: &mut StdRng) -> Option<(String, Derivation)> {
    let k = rng.gen_range(0..d.lines.len());
    let mut out = d.clone();
    let line = &mut out.lines[k];
    let same = |a: &Formula, b: &Formula| expand(a) == expand(b);
    let what = match rng.gen_range(0..5) {
        0 => {
            line.formula = Formula::not(line.formula.clone());
            "negated formula"
        }
        1 => {
            let swapped = swap_atoms(&line.formula);
            if same(&swapped, &line.formula) {
                return None;
            }
            line.formula = swapped;
            "swapped atoms"
        }
        2 => {
            let shift = |i: usize, up: bool| if up { i + 1 } else { i.wrapping_sub(1) };
            let up = rng.gen_bool(0.5);
            let first = rng.gen_bool(0.5);
            let (old, new) = match &mut line.just {
                Justification::ModusPonens { minor, major } => {
                    let r = if first { minor } else { major };
                    let old = *r;
                    *r = shift(*r, up);
                    (old, *r)
                }
                Justification::Necessitation { from } => {
                    let old = *from;
                    *from = shift(*from, up);
                    (old, *from)
                }
                Justification::EquivSubst { theorem, equivalence, .. } => {
                    let r = if first { theorem } else { equivalence };
                    let old = *r;
                    *r = shift(*r, up);
                    (old, *r)
                }
                _ => return None,
            };
            // A shift onto an identical line changes nothing.
            if (1..=d.lines.len()).contains(&new) && same(&d.lines[old - 1].formula, &d.lines[new - 1].formula) {
                return None;
            }
            "shifted reference"
        }
        3 => match &mut line.just {
            Justification::ModusPonens { minor, major } => {
                if same(&d.lines[*minor - 1].formula, &d.lines[*major - 1].formula) {
                    return None;
                }
                std::mem::swap(minor, major);
                "swapped premises"
            }
            _ => return None,
        },
        _ => {
            let ids: Vec<AxiomId> = AxiomId::all().collect();
            let id = ids[rng.gen_range(0..ids.len())];
            let fits = |f: &Formula| dmbl_core::proof::match_schema(f, id).is_some() && id.allowed_in(d.logic);
            if matches!(line.just, Justification::Axiom { id: old, .. } if old == id) || fits(&line.formula) {
                return None;
            }
            line.just = Justification::Axiom { id, subst: None };
            "changed rule"
        }
    };
    Some((format!("line {}: {what}", k + 1), out))
}

const POOL: &[&str] = &["p", "q", "~p", "p /\\ q", "T", "F", "(q|p)"];

fn pool_formula(rng: &mut StdRng) -> Formula {
    parse(POOL[rng.gen_range(0..POOL.len())]).unwrap()
}

/// A random derivation in DmBL*. Lines are axiom instances over a small pool,
/// weakenings `A -> (B -> A)`, modus ponens where it applies, necessitation,
/// and guessed tautologies that the checker may refuse.
pub fn random_derivation(rng: &mut StdRng, len: usize) -> Derivation {
    let ids: Vec<AxiomId> = AxiomId::all().filter(|id| id.allowed_in(Logic::DmBLStar)).collect();
    let mut lines: Vec<Line> = Vec::new();
    while lines.len() < len {
        let n = lines.len();
        let pick = |rng: &mut StdRng| if n == 0 { pool_formula(rng) } else if rng.gen_bool(0.5) {
            lines[rng.gen_range(0..n)].formula.clone()
        } else {
            pool_formula(rng)
        };
        let line = match rng.gen_range(0..5) {
            0 | 1 => {
                let id = ids[rng.gen_range(0..ids.len())];
                let mut s = Subst::new();
                for m in ["phi", "psi", "eta"] {
                    s.insert(m.to_string(), pool_formula(rng));
                }
                let formula = fill(&id.shape(), &s).unwrap();
                Line { formula, just: Justification::Axiom { id, subst: None } }
            }
            2 => {
                let (a, b) = (pick(rng), pick(rng));
                let formula = if rng.gen_bool(0.7) {
                    Formula::implies(a.clone(), Formula::implies(b, a))
                } else {
                    Formula::implies(a, b)
                };
                Line { formula, just: Justification::Tautology }
            }
            3 if n > 0 => {
                let from = rng.gen_range(0..n);
                Line { formula: Formula::boxed(lines[from].formula.clone()), just: Justification::Necessitation { from: from + 1 } }
            }
            _ => {
                let found = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| {
                    matches!(&lines[j].formula, Formula::Implies(a, _) if expand(a) == expand(&lines[i].formula))
                        && rng_free_choice(i, j, n)
                });
                match found {
                    Some((i, j)) => {
                        let Formula::Implies(_, b) = &lines[j].formula else { unreachable!() };
                        Line { formula: (**b).clone(), just: Justification::ModusPonens { minor: i + 1, major: j + 1 } }
                    }
                    None => continue,
                }
            }
        };
        lines.push(line);
    }
    let target = lines.last().unwrap().formula.clone();
    Derivation { lines, target, logic: Logic::DmBLStar }
}

/// Prefer the most recent applicable pair so chains get longer.
fn rng_free_choice(i: usize, j: usize, n: usize) -> bool {
    i + 3 >= n || j + 3 >= n
}
