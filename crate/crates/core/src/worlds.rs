//! World spaces and their set algebra.
//!
//! Level 0 is a list of named base worlds. A world at level `n+1` is a pair of
//! level-`n` worlds; its left coordinate is its parent, so lifting a set along
//! μ is membership of the parent. Every level keeps the ancestor map to each
//! lower level and the transposition permutation `T(x,y) = (y,x)`.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WorldId {
    pub level: usize,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("level mismatch: {left} vs {right}")]
    LevelMismatch { left: usize, right: usize },
    #[error("transpose is undefined on level 0")]
    LevelZero,
    #[error("level {0} is not built")]
    MissingLevel(usize),
    #[error("cannot lift a level-{from} set down to level {to}")]
    Downward { from: usize, to: usize },
}

/// A subset of Ω_level, stored as a dense membership array.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PropSet {
    level: usize,
    bits: FixedBitSet,
}

impl PropSet {
    pub fn empty(level: usize, universe: usize) -> PropSet {
        PropSet {
            level,
            bits: FixedBitSet::with_capacity(universe),
        }
    }

    pub fn full(level: usize, universe: usize) -> PropSet {
        let mut s = PropSet::empty(level, universe);
        s.bits.insert_range(..);
        s
    }

    pub fn from_indices(level: usize, universe: usize, members: impl IntoIterator<Item = usize>) -> PropSet {
        let mut s = PropSet::empty(level, universe);
        for i in members {
            s.bits.insert(i);
        }
        s
    }

    /// Members are the set bits of `mask`; only valid for universes up to 64.
    pub fn from_mask(level: usize, universe: usize, mask: u64) -> PropSet {
        debug_assert!(universe <= 64);
        PropSet::from_indices(level, universe, (0..universe).filter(|i| mask >> i & 1 == 1))
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// card(Ω_level).
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.bits.contains(index)
    }

    pub fn insert(&mut self, index: usize) {
        self.bits.insert(index);
    }

    pub fn card(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.members().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.bits.is_full()
    }

    pub fn is_trivial(&self) -> bool {
        self.is_empty() || self.is_full()
    }

    pub fn complement(&self) -> PropSet {
        let mut out = self.clone();
        out.bits.toggle_range(..);
        out
    }

    fn check(&self, other: &PropSet) -> Result<(), AlgebraError> {
        if self.level != other.level || self.universe() != other.universe() {
            return Err(AlgebraError::LevelMismatch {
                left: self.level,
                right: other.level,
            });
        }
        Ok(())
    }

    pub fn intersection(&self, other: &PropSet) -> Result<PropSet, AlgebraError> {
        self.check(other)?;
        let mut out = self.clone();
        out.bits.intersect_with(&other.bits);
        Ok(out)
    }

    pub fn union(&self, other: &PropSet) -> Result<PropSet, AlgebraError> {
        self.check(other)?;
        let mut out = self.clone();
        out.bits.union_with(&other.bits);
        Ok(out)
    }

    pub fn difference(&self, other: &PropSet) -> Result<PropSet, AlgebraError> {
        self.check(other)?;
        let mut out = self.clone();
        out.bits.difference_with(&other.bits);
        Ok(out)
    }

    pub fn is_subset(&self, other: &PropSet) -> Result<bool, AlgebraError> {
        self.check(other)?;
        Ok(self.bits.is_subset(&other.bits))
    }

    pub fn is_disjoint(&self, other: &PropSet) -> Result<bool, AlgebraError> {
        self.check(other)?;
        Ok(self.bits.is_disjoint(&other.bits))
    }

    /// Order used wherever sets must be enumerated deterministically:
    /// cardinality first, then the sorted member lists lexicographically.
    pub fn card_lex_cmp(&self, other: &PropSet) -> std::cmp::Ordering {
        self.card()
            .cmp(&other.card())
            .then_with(|| self.members().cmp(other.members()))
    }
}

impl fmt::Debug for PropSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}{:?}", self.level, self.to_vec())
    }
}

#[derive(Debug, Clone)]
struct Level {
    /// (left, right) coordinates at the level below; empty for level 0.
    pairs: Vec<(u32, u32)>,
    transpose: Vec<u32>,
    /// `ancestors[k][w]` is the level-k ancestor of world `w`, for k below
    /// this level.
    ancestors: Vec<Vec<u32>>,
}

/// The tower Ω_0, Ω_1, ... of world spaces built so far.
#[derive(Debug, Clone)]
pub struct Tower {
    names: Vec<String>,
    levels: Vec<Level>,
}

impl Tower {
    pub fn new(base_names: Vec<String>) -> Tower {
        Tower {
            names: base_names,
            levels: vec![Level {
                pairs: Vec::new(),
                transpose: Vec::new(),
                ancestors: Vec::new(),
            }],
        }
    }

    pub fn base_names(&self) -> &[String] {
        &self.names
    }

    /// Index of the highest built level.
    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn size(&self, level: usize) -> usize {
        if level == 0 {
            self.names.len()
        } else {
            self.levels[level].pairs.len()
        }
    }

    pub fn empty(&self, level: usize) -> PropSet {
        PropSet::empty(level, self.size(level))
    }

    pub fn full(&self, level: usize) -> PropSet {
        PropSet::full(level, self.size(level))
    }

    pub fn singleton(&self, w: WorldId) -> PropSet {
        PropSet::from_indices(w.level, self.size(w.level), [w.index])
    }

    /// Append level `top+1` from its pair table. Pairs must be distinct and
    /// closed under swapping.
    pub fn push_level(&mut self, pairs: Vec<(u32, u32)>) {
        let index: HashMap<(u32, u32), u32> = pairs
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i as u32))
            .collect();
        assert_eq!(index.len(), pairs.len(), "duplicate world pairs");
        let transpose = pairs
            .iter()
            .map(|&(x, y)| *index.get(&(y, x)).expect("pair table not closed under swap"))
            .collect();
        let below = self.top();
        let mut ancestors: Vec<Vec<u32>> = self.levels[below]
            .ancestors
            .iter()
            .map(|anc| pairs.iter().map(|&(x, _)| anc[x as usize]).collect())
            .collect();
        ancestors.push(pairs.iter().map(|&(x, _)| x).collect());
        self.levels.push(Level {
            pairs,
            transpose,
            ancestors,
        });
    }

    fn built(&self, level: usize) -> Result<(), AlgebraError> {
        if level > self.top() {
            Err(AlgebraError::MissingLevel(level))
        } else {
            Ok(())
        }
    }

    pub fn resolve(&self, w: WorldId) -> Option<(WorldId, WorldId)> {
        if w.level == 0 || w.level > self.top() {
            return None;
        }
        let (x, y) = *self.levels[w.level].pairs.get(w.index)?;
        let below = w.level - 1;
        Some((
            WorldId { level: below, index: x as usize },
            WorldId { level: below, index: y as usize },
        ))
    }

    pub fn pairs(&self, level: usize) -> &[(u32, u32)] {
        &self.levels[level].pairs
    }

    /// The level-k ancestor map of level `level` (k < level).
    pub fn ancestor_map(&self, level: usize, k: usize) -> &[u32] {
        &self.levels[level].ancestors[k]
    }

    pub fn transpose_map(&self, level: usize) -> &[u32] {
        &self.levels[level].transpose
    }

    /// Nested-pair rendering such as `(a,c)`.
    pub fn label(&self, w: WorldId) -> String {
        match self.resolve(w) {
            None => self.names[w.index].clone(),
            Some((x, y)) => format!("({},{})", self.label(x), self.label(y)),
        }
    }

    pub fn transpose(&self, a: &PropSet) -> Result<PropSet, AlgebraError> {
        if a.level == 0 {
            return Err(AlgebraError::LevelZero);
        }
        self.built(a.level)?;
        let t = &self.levels[a.level].transpose;
        let mut out = self.empty(a.level);
        for w in a.members() {
            out.insert(t[w] as usize);
        }
        Ok(out)
    }

    /// μ_n: the level-(n+1) worlds whose parent lies in `a`.
    pub fn mu(&self, n: usize, a: &PropSet) -> Result<PropSet, AlgebraError> {
        if a.level != n {
            return Err(AlgebraError::LevelMismatch { left: a.level, right: n });
        }
        self.lift(a, n + 1)
    }

    /// A_[m]: iterated μ from `a.level` up to `m`.
    pub fn lift(&self, a: &PropSet, m: usize) -> Result<PropSet, AlgebraError> {
        if m < a.level {
            return Err(AlgebraError::Downward { from: a.level, to: m });
        }
        self.built(m)?;
        if m == a.level {
            return Ok(a.clone());
        }
        let anc = &self.levels[m].ancestors[a.level];
        let mut out = self.empty(m);
        for (w, &x) in anc.iter().enumerate() {
            if a.contains(x as usize) {
                out.insert(w);
            }
        }
        Ok(out)
    }

    /// The unique set at `src` whose lift is `a`, if there is one.
    pub fn image_test(&self, a: &PropSet, src: usize) -> Result<Option<PropSet>, AlgebraError> {
        if src > a.level {
            return Err(AlgebraError::Downward { from: src, to: a.level });
        }
        self.built(a.level)?;
        if src == a.level {
            return Ok(Some(a.clone()));
        }
        let anc = &self.levels[a.level].ancestors[src];
        let mut seen: Vec<Option<bool>> = vec![None; self.size(src)];
        for (w, &x) in anc.iter().enumerate() {
            let inside = a.contains(w);
            match seen[x as usize] {
                None => seen[x as usize] = Some(inside),
                Some(v) if v != inside => return Ok(None),
                Some(_) => {}
            }
        }
        let mut out = self.empty(src);
        for (x, v) in seen.iter().enumerate() {
            if *v == Some(true) {
                out.insert(x);
            }
        }
        Ok(Some(out))
    }

    /// Lift two sets to their common (higher) level.
    pub fn align(&self, a: &PropSet, b: &PropSet) -> Result<(PropSet, PropSet), AlgebraError> {
        let m = a.level.max(b.level);
        Ok((self.lift(a, m)?, self.lift(b, m)?))
    }
}
