//! Formula assignment, validity and the independence diagnostics.
//!
//! Formulas are expanded first, then evaluated bottom-up. A conditional
//! `(ψ|φ)` makes sure f is defined on `(H(ψ), H(φ))`, which may grow the
//! model, and the value is computed at the resulting top level. Boxes follow
//! the universal accessibility relation: `H(□φ)` is everything when `H(φ)` is
//! everything and nothing otherwise.

use serde::Serialize;

use crate::formula::{expand, is_box_free, Formula};
use crate::model::{Model, ModelError, ModelState};
use crate::worlds::PropSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
}

impl From<crate::worlds::AlgebraError> for EvalError {
    fn from(e: crate::worlds::AlgebraError) -> Self {
        EvalError::Model(e.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation {
    pub formula: Formula,
    pub value: PropSet,
    pub level: usize,
}

/// Where conditionals get their definedness from.
trait Context {
    fn model(&self) -> &Model;
    fn ensure(&mut self, b: &PropSet, a: &PropSet) -> Result<(), EvalError>;
}

impl Context for ModelState {
    fn model(&self) -> &Model {
        ModelState::model(self)
    }

    fn ensure(&mut self, b: &PropSet, a: &PropSet) -> Result<(), EvalError> {
        ModelState::ensure(self, b, a)?;
        Ok(())
    }
}

struct Frozen<'a>(&'a Model);

impl Context for Frozen<'_> {
    fn model(&self) -> &Model {
        self.0
    }

    fn ensure(&mut self, _: &PropSet, _: &PropSet) -> Result<(), EvalError> {
        Ok(())
    }
}

fn eval<C: Context>(ctx: &mut C, f: &Formula) -> Result<PropSet, EvalError> {
    let m = ctx.model();
    Ok(match f {
        Formula::Top => m.tower().full(0),
        Formula::Bot => m.tower().empty(0),
        Formula::Atom(a) => m
            .valuation(a)
            .cloned()
            .ok_or_else(|| EvalError::UnknownAtom(a.clone()))?,
        Formula::Not(a) => eval(ctx, a)?.complement(),
        Formula::And(a, b) => {
            let (x, y) = eval_pair(ctx, a, b)?;
            x.intersection(&y)?
        }
        Formula::Or(a, b) => {
            let (x, y) = eval_pair(ctx, a, b)?;
            x.union(&y)?
        }
        Formula::Implies(a, b) => {
            let (x, y) = eval_pair(ctx, a, b)?;
            x.complement().union(&y)?
        }
        Formula::Box(a) => {
            if eval(ctx, a)?.is_full() {
                ctx.model().tower().full(0)
            } else {
                ctx.model().tower().empty(0)
            }
        }
        Formula::Cond(c, a) => {
            let (b, a) = eval_pair(ctx, c, a)?;
            ctx.ensure(&b, &a)?;
            let m = ctx.model();
            let top = m.top();
            m.f_eval(&m.tower().lift(&b, top)?, &m.tower().lift(&a, top)?)?
        }
        Formula::Iff(..) | Formula::Indep(..) | Formula::Diamond(_) => eval(ctx, &expand(f))?,
    })
}

/// Both values, lifted to their common level. The second evaluation may
/// grow the model, so the first is lifted afterwards.
fn eval_pair<C: Context>(ctx: &mut C, a: &Formula, b: &Formula) -> Result<(PropSet, PropSet), EvalError> {
    let x = eval(ctx, a)?;
    let y = eval(ctx, b)?;
    Ok(ctx.model().tower().align(&x, &y)?)
}

fn finish(model: &Model, f: &Formula, value: PropSet) -> Result<Valuation, EvalError> {
    let level = model.top();
    Ok(Valuation {
        formula: f.clone(),
        value: model.tower().lift(&value, level)?,
        level,
    })
}

/// H(f) at the top level, growing the model as needed.
pub fn assign(state: &mut ModelState, f: &Formula) -> Result<Valuation, EvalError> {
    let value = eval(state, &expand(f))?;
    finish(state.model(), f, value)
}

/// H(f) on a frozen model; fails if some conditional is not yet defined.
pub fn assign_frozen(model: &Model, f: &Formula) -> Result<Valuation, EvalError> {
    let value = eval(&mut Frozen(model), &expand(f))?;
    finish(model, f, value)
}

pub fn valid(state: &mut ModelState, f: &Formula) -> Result<bool, EvalError> {
    Ok(assign(state, f)?.value.is_full())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decision {
    pub valid: bool,
    /// When false, `valid` is validity in this model only, not theoremhood.
    pub box_free: bool,
    pub level: usize,
    pub worlds: usize,
}

pub fn decide(state: &mut ModelState, f: &Formula) -> Result<Decision, EvalError> {
    let v = assign(state, f)?;
    Ok(Decision {
        valid: v.value.is_full(),
        box_free: is_box_free(f),
        level: v.level,
        worlds: v.value.universe(),
    })
}

/// `psi × phi`: f(H(ψ), H(φ)) = H(ψ).
pub fn independent(state: &mut ModelState, phi: &Formula, psi: &Formula) -> Result<bool, EvalError> {
    let (b, a) = eval_pair(state, &expand(psi), &expand(phi))?;
    state.ensure(&b, &a)?;
    let top = state.top();
    let t = state.tower();
    let (a, b) = (t.lift(&a, top)?, t.lift(&b, top)?);
    Ok(state.f_eval(&b, &a)? == b)
}

/// Whether `~A ∩ (B|A)` leaves the base algebra, for ∅ ⊊ B ⊊ A ⊊ Ω_0.
pub fn lewis_escape(state: &mut ModelState, a: &PropSet, b: &PropSet) -> Result<bool, EvalError> {
    if a.level() != 0 || b.level() != 0 {
        return Err(EvalError::Precondition("sets must be at level 0"));
    }
    let strict = |x: &PropSet, y: &PropSet| -> Result<bool, EvalError> { Ok(x.is_subset(y)? && x != y) };
    if b.is_empty() || !strict(b, a)? || a.is_full() {
        return Err(EvalError::Precondition("need ∅ ⊊ B ⊊ A ⊊ Ω_0"));
    }
    state.ensure(b, a)?;
    let top = state.top();
    let t = state.tower();
    let (la, lb) = (t.lift(a, top)?, t.lift(b, top)?);
    let c = la.complement().intersection(&state.f_eval(&lb, &la)?)?;
    Ok(state.tower().image_test(&c, 0)?.is_none())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct B6Report {
    /// psi × phi
    pub forward: bool,
    /// phi × psi
    pub backward: bool,
    pub symmetric: bool,
    /// Whether ((η|ψ)|φ) and (η|φ∧ψ) have the same value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub star: Option<bool>,
}

pub fn diagnose_b6(
    state: &mut ModelState,
    phi: &Formula,
    psi: &Formula,
    eta: Option<&Formula>,
) -> Result<B6Report, EvalError> {
    let forward = independent(state, phi, psi)?;
    let backward = independent(state, psi, phi)?;
    let star = match eta {
        None => None,
        Some(eta) => {
            let nested = Formula::cond(Formula::cond(eta.clone(), psi.clone()), phi.clone());
            let joint = Formula::cond(eta.clone(), Formula::and(phi.clone(), psi.clone()));
            let x = assign(state, &nested)?.value;
            let y = assign(state, &joint)?.value;
            let (x, y) = state.tower().align(&x, &y)?;
            Some(x == y)
        }
    };
    Ok(B6Report {
        forward,
        backward,
        symmetric: forward == backward,
        star,
    })
}
