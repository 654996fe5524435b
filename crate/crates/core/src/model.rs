//! Step-by-step construction of the conditional model.
//!
//! Each step processes one event `b_n` at the top level `n` and builds level
//! `n+1`. A fresh event (case 1) yields the single block `(b_n, ~b_n)`. An
//! event that repeats an earlier one up to lifting and complement (case 0)
//! yields one block per world `ω` of the earlier image `μ_ν(b_ν)`, pairing the
//! lift of `ω` with the lift of `Tω`; the other index pairs of that case have
//! empty blocks and are not stored.
//!
//! The conditional map is never tabulated. `f_eval` finds the latest step
//! whose event matches the antecedent, pulls the consequent back to the level
//! just above that step and applies the closed form
//! `f(C, e) = (C ∩ e) ∪ (T(C) ∩ ~e)`.

use std::collections::VecDeque;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::worlds::{AlgebraError, PropSet, Tower, WorldId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("the base world set is empty")]
    EmptyBase,
    #[error("invalid base: {0}")]
    BadBase(String),
    #[error("invalid seed order: {0}")]
    BadSeed(String),
    #[error("event is empty or full; the conditional is the identity there")]
    TrivialEvent,
    #[error("event is at level {level} but the top level is {top}")]
    NotTopLevel { level: usize, top: usize },
    #[error("{0}")]
    Schedule(&'static str),
    #[error("f is undefined on this pair at level {level}: {reason}")]
    Undefined { level: usize, reason: &'static str },
    #[error("level cap exceeded: level {requested} requested, max_levels is {limit}")]
    LevelCap { requested: usize, limit: usize },
    #[error("world cap exceeded: {requested} worlds requested, max_worlds is {limit}")]
    WorldCap { requested: usize, limit: usize },
    #[error("canonical list exhausted")]
    Exhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Highest level index that may be built.
    pub max_levels: usize,
    /// Largest card(Ω_n) that may be built.
    pub max_worlds: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_levels: 8,
            max_worlds: 1 << 17,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Base {
    /// Ω_0 = {0,1}^Θ. World `i` makes the `j`-th atom true iff bit `j` of `i`
    /// is set.
    Atoms(Vec<String>),
    /// Named worlds, with an optional valuation listing the worlds where
    /// each atom holds.
    Worlds {
        names: Vec<String>,
        valuation: Vec<(String, Vec<String>)>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleMode {
    Canonical,
    #[default]
    Demand,
}

/// Order of the initial canonical list.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum SeedOrder {
    /// By (cardinality, lexicographic membership), complements paired.
    #[default]
    CardinalityLex,
    /// Each atom's valuation and its complement first, then as above.
    AtomsFirst,
    /// The given complement-paired prefix, then the remaining sets as above.
    Explicit(Vec<PropSet>),
}

#[derive(Debug, Clone, Default)]
pub struct ModelConfig {
    pub schedule: ScheduleMode,
    pub seed: SeedOrder,
    pub limits: Limits,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    /// First occurrence of the event.
    Fresh,
    /// Repeats the event of step `of`.
    Repeat { of: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub pi: PropSet,
    pub gamma: PropSet,
}

#[derive(Debug, Clone)]
pub struct ProcessedEvent {
    pub step: usize,
    /// b_n, at level n.
    pub event: PropSet,
    /// μ_n(b_n), at level n+1.
    pub image: PropSet,
    pub blocks: Vec<Block>,
    pub case: Case,
    /// Block index of every level-n world.
    block_of: Vec<u32>,
}

impl ProcessedEvent {
    /// Block index of level-n world `w` and whether it lies on the Π side.
    pub fn side(&self, w: usize) -> (usize, bool) {
        (self.block_of[w] as usize, self.event.contains(w))
    }
}

/// A frozen model: levels and processed events, no schedule.
#[derive(Debug, Clone)]
pub struct Model {
    tower: Tower,
    atoms: Vec<String>,
    valuation: Vec<PropSet>,
    history: Vec<ProcessedEvent>,
}

impl Model {
    fn new(base: &Base) -> Result<Model, ModelError> {
        match base {
            Base::Atoms(theta) => {
                if theta.is_empty() {
                    return Err(ModelError::EmptyBase);
                }
                check_names(theta, "atom")?;
                if theta.len() > 16 {
                    return Err(ModelError::BadBase("at most 16 atoms".into()));
                }
                let n = 1usize << theta.len();
                let names = (0..n).map(|i| minterm_name(theta, i)).collect();
                let valuation = (0..theta.len())
                    .map(|j| PropSet::from_indices(0, n, (0..n).filter(|i| i >> j & 1 == 1)))
                    .collect();
                Ok(Model {
                    tower: Tower::new(names),
                    atoms: theta.clone(),
                    valuation,
                    history: Vec::new(),
                })
            }
            Base::Worlds { names, valuation } => {
                if names.is_empty() {
                    return Err(ModelError::EmptyBase);
                }
                check_names(names, "world")?;
                let atoms: Vec<String> = valuation.iter().map(|(a, _)| a.clone()).collect();
                check_names(&atoms, "atom")?;
                let mut sets = Vec::new();
                for (atom, worlds) in valuation {
                    let mut s = PropSet::empty(0, names.len());
                    for w in worlds {
                        let i = names
                            .iter()
                            .position(|n| n == w)
                            .ok_or_else(|| ModelError::BadBase(format!("atom {atom} names unknown world {w}")))?;
                        s.insert(i);
                    }
                    sets.push(s);
                }
                Ok(Model {
                    tower: Tower::new(names.clone()),
                    atoms,
                    valuation: sets,
                    history: Vec::new(),
                })
            }
        }
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn history(&self) -> &[ProcessedEvent] {
        &self.history
    }

    pub fn top(&self) -> usize {
        self.tower.top()
    }

    pub fn size(&self, level: usize) -> usize {
        self.tower.size(level)
    }

    /// h(θ) at level 0.
    pub fn valuation(&self, atom: &str) -> Option<&PropSet> {
        let i = self.atoms.iter().position(|a| a == atom)?;
        Some(&self.valuation[i])
    }

    /// h_n(θ) = h_0(θ) lifted to `level`.
    pub fn atom_at(&self, atom: &str, level: usize) -> Result<PropSet, ModelError> {
        let h = self
            .valuation(atom)
            .ok_or_else(|| ModelError::BadBase(format!("unknown atom {atom}")))?;
        Ok(self.tower.lift(h, level)?)
    }

    /// Latest step ν whose event lifts to `a` (true) or to `~a` (false).
    fn find_event(&self, a: &PropSet) -> Result<Option<(usize, bool)>, ModelError> {
        let upto = self.history.len().min(a.level());
        for nu in (0..upto).rev() {
            let Some(x) = self.tower.image_test(a, nu)? else {
                // Not in the image of M_ν, hence not in any lower image either.
                return Ok(None);
            };
            let b = &self.history[nu].event;
            if x == *b {
                return Ok(Some((nu, true)));
            }
            if x == b.complement() {
                return Ok(Some((nu, false)));
            }
        }
        Ok(None)
    }

    /// f(b, a), computed at the common level of `a` and `b`.
    pub fn f_eval(&self, b: &PropSet, a: &PropSet) -> Result<PropSet, ModelError> {
        let (a, b) = self.tower.align(a, b)?;
        if a.is_trivial() {
            return Ok(b);
        }
        let level = a.level();
        let Some((nu, positive)) = self.find_event(&a)? else {
            return Err(ModelError::Undefined {
                level,
                reason: "antecedent not processed",
            });
        };
        let Some(c) = self.tower.image_test(&b, nu + 1)? else {
            return Err(ModelError::Undefined {
                level,
                reason: "consequent finer than the processed step",
            });
        };
        let e = &self.history[nu].image;
        let t = self.tower.transpose(&c)?;
        let (keep, swap) = if positive {
            (e.clone(), e.complement())
        } else {
            (e.complement(), e.clone())
        };
        let out = c.intersection(&keep)?.union(&t.intersection(&swap)?)?;
        Ok(self.tower.lift(&out, level)?)
    }

    pub fn is_defined(&self, b: &PropSet, a: &PropSet) -> bool {
        self.f_eval(b, a).is_ok()
    }

    pub fn dump(&self) -> ModelDump {
        let levels = (0..=self.top())
            .map(|n| {
                let size = self.size(n);
                let worlds = (0..size)
                    .map(|i| {
                        let w = WorldId { level: n, index: i };
                        WorldDump {
                            index: i,
                            pair: self.tower.resolve(w).map(|(x, y)| [x.index, y.index]),
                            label: (n <= 2).then(|| self.tower.label(w)),
                        }
                    })
                    .collect();
                let valuation = self
                    .atoms
                    .iter()
                    .map(|a| AtomDump {
                        atom: a.clone(),
                        members: self.atom_at(a, n).map(|s| s.to_vec()).unwrap_or_default(),
                    })
                    .collect();
                LevelDump {
                    level: n,
                    size,
                    worlds,
                    valuation,
                }
            })
            .collect();
        let history = self
            .history
            .iter()
            .map(|p| EventDump {
                step: p.step,
                case: p.case,
                event: p.event.to_vec(),
                blocks: p
                    .blocks
                    .iter()
                    .map(|b| BlockDump {
                        pi: b.pi.to_vec(),
                        gamma: b.gamma.to_vec(),
                    })
                    .collect(),
            })
            .collect();
        ModelDump {
            base: self.tower.base_names().to_vec(),
            atoms: self.atoms.clone(),
            levels,
            history,
        }
    }
}

fn check_names(names: &[String], what: &str) -> Result<(), ModelError> {
    for (i, n) in names.iter().enumerate() {
        if n.is_empty() {
            return Err(ModelError::BadBase(format!("empty {what} name")));
        }
        if names[..i].contains(n) {
            return Err(ModelError::BadBase(format!("duplicate {what} {n}")));
        }
    }
    Ok(())
}

fn minterm_name(theta: &[String], i: usize) -> String {
    theta
        .iter()
        .enumerate()
        .map(|(j, a)| if i >> j & 1 == 1 { a.clone() } else { format!("~{a}") })
        .collect::<Vec<_>>()
        .join(" /\\ ")
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelDump {
    pub base: Vec<String>,
    pub atoms: Vec<String>,
    pub levels: Vec<LevelDump>,
    pub history: Vec<EventDump>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelDump {
    pub level: usize,
    pub size: usize,
    pub worlds: Vec<WorldDump>,
    pub valuation: Vec<AtomDump>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WorldDump {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AtomDump {
    pub atom: String,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EventDump {
    pub step: usize,
    pub case: Case,
    pub event: Vec<usize>,
    pub blocks: Vec<BlockDump>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockDump {
    pub pi: Vec<usize>,
    pub gamma: Vec<usize>,
}

// ---------------------------------------------------------------------------
// Canonical list

/// Lazily enumerated sets of one level, in (cardinality, lex) order, keeping
/// only the member of each complement pair that comes first.
#[derive(Debug, Clone)]
struct FreshSets {
    level: usize,
    universe: usize,
    combo: Vec<usize>,
    exclude: Vec<PropSet>,
    done: bool,
}

impl FreshSets {
    fn new(level: usize, universe: usize, exclude: Vec<PropSet>) -> FreshSets {
        FreshSets {
            level,
            universe,
            combo: Vec::new(),
            exclude,
            done: universe < 2,
        }
    }

    fn advance(&mut self) -> bool {
        let n = self.universe;
        let k = self.combo.len();
        // Next k-combination in lex order, else the first of size k+1.
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.combo[i] < n - k + i {
                self.combo[i] += 1;
                for j in i + 1..k {
                    self.combo[j] = self.combo[j - 1] + 1;
                }
                return true;
            }
        }
        if 2 * (k + 1) > n {
            return false;
        }
        self.combo = (0..=k).collect();
        true
    }

    fn next_candidate(&mut self) -> Option<PropSet> {
        while !self.done {
            if !self.advance() {
                self.done = true;
                break;
            }
            let k = self.combo.len();
            if 2 * k == self.universe && self.combo[0] != 0 {
                continue;
            }
            let s = PropSet::from_indices(self.level, self.universe, self.combo.iter().copied());
            if self.exclude.iter().any(|x| *x == s || x.complement() == s) {
                continue;
            }
            return Some(s);
        }
        None
    }
}

#[derive(Debug, Clone)]
enum Segment {
    /// Leading members of complement pairs, at their own levels.
    Pairs(VecDeque<PropSet>),
    Fresh(FreshSets),
}

/// Λ_n: a queue of complement pairs, each represented by its first member.
#[derive(Debug, Clone)]
struct Lambda {
    segments: VecDeque<Segment>,
}

impl Lambda {
    fn pop(&mut self, tower: &Tower) -> Result<Option<PropSet>, ModelError> {
        while let Some(seg) = self.segments.front_mut() {
            match seg {
                Segment::Pairs(q) => {
                    if let Some(x) = q.pop_front() {
                        return Ok(Some(tower.lift(&x, tower.top())?));
                    }
                }
                Segment::Fresh(f) => {
                    while let Some(x) = f.next_candidate() {
                        let fresh = x.level() == 0 || tower.image_test(&x, x.level() - 1)?.is_none();
                        if fresh {
                            return Ok(Some(tower.lift(&x, tower.top())?));
                        }
                    }
                }
            }
            self.segments.pop_front();
        }
        Ok(None)
    }
}

#[derive(Debug, Clone)]
enum Schedule {
    Canonical(Lambda),
    Demand,
}

// ---------------------------------------------------------------------------
// Builder

/// A model under construction.
#[derive(Debug, Clone)]
pub struct ModelState {
    model: Model,
    schedule: Schedule,
    limits: Limits,
}

impl ModelState {
    pub fn new(base: &Base, config: &ModelConfig) -> Result<ModelState, ModelError> {
        let model = Model::new(base)?;
        let schedule = match config.schedule {
            ScheduleMode::Demand => Schedule::Demand,
            ScheduleMode::Canonical => Schedule::Canonical(seed_list(&model, &config.seed)?),
        };
        Ok(ModelState {
            model,
            schedule,
            limits: config.limits,
        })
    }

    /// Demand-mode model over Θ with default limits.
    pub fn demand(atoms: &[&str]) -> ModelState {
        let base = Base::Atoms(atoms.iter().map(|s| s.to_string()).collect());
        ModelState::new(&base, &ModelConfig::default()).expect("valid atom list")
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn snapshot(&self) -> Model {
        self.model.clone()
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    pub fn mode(&self) -> ScheduleMode {
        match self.schedule {
            Schedule::Canonical(_) => ScheduleMode::Canonical,
            Schedule::Demand => ScheduleMode::Demand,
        }
    }

    pub fn tower(&self) -> &Tower {
        &self.model.tower
    }

    pub fn top(&self) -> usize {
        self.model.top()
    }

    pub fn f_eval(&self, b: &PropSet, a: &PropSet) -> Result<PropSet, ModelError> {
        self.model.f_eval(b, a)
    }

    pub fn is_defined(&self, b: &PropSet, a: &PropSet) -> bool {
        self.model.is_defined(b, a)
    }

    /// One construction step. Canonical mode takes the next pair of the list
    /// and requires `event` to be absent; demand mode requires it.
    pub fn step(&mut self, event: Option<PropSet>) -> Result<&ProcessedEvent, ModelError> {
        match (&mut self.schedule, event) {
            (Schedule::Canonical(lambda), None) => {
                let b = lambda.pop(&self.model.tower)?.ok_or(ModelError::Exhausted)?;
                self.apply(b)
            }
            (Schedule::Demand, Some(b)) => self.apply(b),
            (Schedule::Canonical(_), Some(_)) => Err(ModelError::Schedule("canonical steps take no event")),
            (Schedule::Demand, None) => Err(ModelError::Schedule("demand steps need an event")),
        }
    }

    /// Step until f(b, a) is defined at the top level; returns the number of
    /// steps taken.
    pub fn ensure(&mut self, b: &PropSet, a: &PropSet) -> Result<usize, ModelError> {
        let mut steps = 0;
        loop {
            let top = self.top();
            let a_top = self.model.tower.lift(a, top)?;
            let b_top = self.model.tower.lift(b, top)?;
            if self.model.is_defined(&b_top, &a_top) {
                return Ok(steps);
            }
            match self.schedule {
                Schedule::Demand => {
                    self.apply(a_top)?;
                }
                Schedule::Canonical(_) => {
                    self.step(None)?;
                }
            }
            steps += 1;
        }
    }

    fn apply(&mut self, event: PropSet) -> Result<&ProcessedEvent, ModelError> {
        let n = self.top();
        if event.level() != n {
            return Err(ModelError::NotTopLevel { level: event.level(), top: n });
        }
        if event.is_trivial() {
            return Err(ModelError::TrivialEvent);
        }
        if n + 1 > self.limits.max_levels {
            return Err(ModelError::LevelCap {
                requested: n + 1,
                limit: self.limits.max_levels,
            });
        }
        let tower = &self.model.tower;
        let (case, event) = match self.model.find_event(&event)? {
            None => (Case::Fresh, event),
            Some((nu, true)) => (Case::Repeat { of: nu }, event),
            Some((nu, false)) => (Case::Repeat { of: nu }, event.complement()),
        };
        let size = tower.size(n);
        let (block_of, mut blocks) = match case {
            Case::Fresh => (
                vec![0u32; size],
                vec![Block {
                    pi: event.clone(),
                    gamma: event.complement(),
                }],
            ),
            Case::Repeat { of } => {
                let image = &self.model.history[of].image;
                let above = of + 1;
                let key_of: Vec<Option<u32>> = {
                    let mut k = vec![None; tower.size(above)];
                    for (i, w) in image.members().enumerate() {
                        k[w] = Some(i as u32);
                    }
                    k
                };
                let t = tower.transpose_map(above);
                let blocks: Vec<Block> = (0..image.card())
                    .map(|_| Block {
                        pi: tower.empty(n),
                        gamma: tower.empty(n),
                    })
                    .collect();
                let mut block_of = vec![0u32; size];
                for (w, slot) in block_of.iter_mut().enumerate() {
                    let anc = if n == above { w } else { tower.ancestor_map(n, above)[w] as usize };
                    *slot = match key_of[anc] {
                        Some(k) => k,
                        None => key_of[t[anc] as usize].expect("image and its transpose cover the level"),
                    };
                }
                (block_of, blocks)
            }
        };
        if let Case::Repeat { .. } = case {
            for w in 0..size {
                let b = &mut blocks[block_of[w] as usize];
                if event.contains(w) {
                    b.pi.insert(w);
                } else {
                    b.gamma.insert(w);
                }
            }
        }
        let requested: usize = blocks.iter().map(|b| 2 * b.pi.card() * b.gamma.card()).sum();
        if requested > self.limits.max_worlds {
            return Err(ModelError::WorldCap {
                requested,
                limit: self.limits.max_worlds,
            });
        }
        let members: Vec<(Vec<u32>, Vec<u32>)> = blocks
            .iter()
            .map(|b| {
                (
                    b.pi.members().map(|x| x as u32).collect(),
                    b.gamma.members().map(|x| x as u32).collect(),
                )
            })
            .collect();
        let mut pairs = Vec::with_capacity(requested);
        let mut in_pi = FixedBitSet::with_capacity(size);
        for w in event.members() {
            in_pi.insert(w);
        }
        for flip in [false, true] {
            for x in 0..size {
                if in_pi.contains(x) == flip {
                    continue;
                }
                let (pi, gamma) = &members[block_of[x] as usize];
                let other = if flip { pi } else { gamma };
                pairs.extend(other.iter().map(|&y| (x as u32, y)));
            }
        }
        self.model.tower.push_level(pairs);
        let image = self.model.tower.mu(n, &event)?;
        if let Schedule::Canonical(lambda) = &mut self.schedule {
            let fresh = FreshSets::new(n + 1, self.model.tower.size(n + 1), Vec::new());
            lambda.segments.push_back(Segment::Fresh(fresh));
            lambda.segments.push_back(Segment::Pairs(VecDeque::from([image.clone()])));
        }
        self.model.history.push(ProcessedEvent {
            step: n,
            event,
            image,
            blocks,
            case,
            block_of,
        });
        Ok(self.model.history.last().expect("just pushed"))
    }
}

fn seed_list(model: &Model, seed: &SeedOrder) -> Result<Lambda, ModelError> {
    let n = model.size(0);
    let mut prefix: Vec<PropSet> = Vec::new();
    match seed {
        SeedOrder::CardinalityLex => {}
        SeedOrder::AtomsFirst => {
            for h in &model.valuation {
                let seen = prefix.iter().any(|x| x == h || x.complement() == *h);
                if !h.is_trivial() && !seen {
                    prefix.push(h.clone());
                }
            }
        }
        SeedOrder::Explicit(list) => {
            if list.len() % 2 != 0 {
                return Err(ModelError::BadSeed("odd number of entries".into()));
            }
            for pair in list.chunks(2) {
                let (x, y) = (&pair[0], &pair[1]);
                if x.level() != 0 || x.universe() != n || y.level() != 0 || y.universe() != n {
                    return Err(ModelError::BadSeed("entries must be base-level sets".into()));
                }
                if x.is_trivial() {
                    return Err(ModelError::BadSeed(format!("trivial entry {:?}", x.to_vec())));
                }
                if *y != x.complement() {
                    return Err(ModelError::BadSeed(format!(
                        "{:?} is not followed by its complement",
                        x.to_vec()
                    )));
                }
                if prefix.iter().any(|p| p == x || p.complement() == *x) {
                    return Err(ModelError::BadSeed(format!("repeated entry {:?}", x.to_vec())));
                }
                prefix.push(x.clone());
            }
        }
    }
    let rest = FreshSets::new(0, n, prefix.clone());
    Ok(Lambda {
        segments: VecDeque::from([Segment::Pairs(prefix.into()), Segment::Fresh(rest)]),
    })
}
