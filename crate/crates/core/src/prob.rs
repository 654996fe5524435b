//! Exact probabilities on the constructed model.
//!
//! A base measure weights the level-0 worlds. Step `n` spreads the weight of
//! level `n` over level `n+1`: the world `(x, y)` of block `i` receives
//! `P(x)·P(y)/P(S)`, where `S` is the side (Π_i or Γ_i) holding `y`.
//! Zero-weight base measures cannot be extended directly; `limit_prob`
//! handles them by perturbing, reconstructing the resulting rational function
//! of ε exactly and taking its value at 0.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::eval::{assign, assign_frozen, EvalError};
use crate::formula::Formula;
use crate::model::{Model, ModelError, ModelState};
use crate::worlds::PropSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProbError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("weights sum to {0}, not 1")]
    SumNotOne(BigRational),
    #[error("negative weight on world {0}")]
    Negative(usize),
    #[error("measure has {got} weights for {expected} worlds")]
    Size { expected: usize, got: usize },
    #[error("zero-weight block at step {step}; extension needs a strictly positive measure")]
    ZeroBlock { step: usize },
    #[error("epsilon must lie strictly between 0 and 1")]
    EpsOutOfRange,
    #[error("rational reconstruction failed: {0}")]
    Reconstruction(&'static str),
}

impl From<ModelError> for ProbError {
    fn from(e: ModelError) -> Self {
        ProbError::Eval(e.into())
    }
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parse `num/den`, an integer, or a finite decimal such as `0.25`, exactly.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let digits = format!("{}{frac}", int.trim_start_matches(['-', '+']));
        let n = BigInt::from_str(&digits).ok()?;
        let r = BigRational::new(n, BigInt::from(10u32).pow(frac.len() as u32));
        return Some(if negative { -r } else { r });
    }
    let r = BigRational::from_str(t).ok()?;
    Some(r)
}

/// Decimal rendering rounded half away from zero.
pub fn decimal(r: &BigRational, places: usize) -> String {
    let scale = BigInt::from(10u32).pow(places as u32);
    let scaled = r.abs() * BigRational::from_integer(scale.clone());
    let rounded = (scaled + rational(1, 2)).floor().to_integer();
    let int = &rounded / &scale;
    let frac = &rounded % &scale;
    let sign = if r.is_negative() && !rounded.is_zero() { "-" } else { "" };
    if places == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{:0>width$}", frac.to_string(), width = places)
    }
}

/// Weights on the level-0 worlds, summing to exactly 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseMeasure {
    weights: Vec<BigRational>,
}

impl BaseMeasure {
    pub fn new(weights: Vec<BigRational>) -> Result<BaseMeasure, ProbError> {
        if let Some(i) = weights.iter().position(|w| w.is_negative()) {
            return Err(ProbError::Negative(i));
        }
        let sum: BigRational = weights.iter().sum();
        if !sum.is_one() {
            return Err(ProbError::SumNotOne(sum));
        }
        Ok(BaseMeasure { weights })
    }

    pub fn uniform(n: usize) -> BaseMeasure {
        BaseMeasure {
            weights: vec![rational(1, n as i64); n],
        }
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.weights.iter().all(|w| w.is_positive())
    }

    /// π(A) for a level-0 set.
    pub fn measure(&self, a: &PropSet) -> BigRational {
        a.members().map(|i| &self.weights[i]).sum()
    }
}

/// `π_ε(σ) = ε/|Σ| + (1-ε)π(σ)`.
pub fn perturb(pi: &BaseMeasure, eps: &BigRational) -> Result<BaseMeasure, ProbError> {
    if !eps.is_positive() || *eps >= BigRational::one() {
        return Err(ProbError::EpsOutOfRange);
    }
    let share = eps / BigRational::from_integer(BigInt::from(pi.len()));
    let keep = BigRational::one() - eps;
    Ok(BaseMeasure {
        weights: pi.weights.iter().map(|w| &share + &keep * w).collect(),
    })
}

/// World weights for every level built so far.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureState {
    levels: Vec<Vec<BigRational>>,
}

impl MeasureState {
    pub fn level(&self, n: usize) -> &[BigRational] {
        &self.levels[n]
    }

    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    /// Sum of world weights over `a`, at `a`'s level.
    pub fn measure(&self, a: &PropSet) -> BigRational {
        let w = &self.levels[a.level()];
        a.members().map(|i| &w[i]).sum()
    }

    /// Extend through the model's top level.
    pub fn extend_to(&mut self, model: &Model) -> Result<(), ProbError> {
        while self.top() < model.top() {
            let next = next_level(model, &self.levels[self.top()], self.top())?;
            self.levels.push(next);
        }
        Ok(())
    }
}

fn next_level(model: &Model, weights: &[BigRational], n: usize) -> Result<Vec<BigRational>, ProbError> {
    let step = &model.history()[n];
    let mut pi_sum = vec![BigRational::zero(); step.blocks.len()];
    let mut gamma_sum = pi_sum.clone();
    for (w, p) in weights.iter().enumerate() {
        let (i, in_pi) = step.side(w);
        if in_pi {
            pi_sum[i] += p;
        } else {
            gamma_sum[i] += p;
        }
    }
    if pi_sum.iter().chain(&gamma_sum).any(|s| s.is_zero()) {
        return Err(ProbError::ZeroBlock { step: n });
    }
    let inv_pi: Vec<BigRational> = pi_sum.iter().map(|s| s.recip()).collect();
    let inv_gamma: Vec<BigRational> = gamma_sum.iter().map(|s| s.recip()).collect();
    Ok(model
        .tower()
        .pairs(n + 1)
        .iter()
        .map(|&(x, y)| {
            let (i, y_in_pi) = step.side(y as usize);
            let inv = if y_in_pi { &inv_pi[i] } else { &inv_gamma[i] };
            &weights[x as usize] * &weights[y as usize] * inv
        })
        .collect())
}

/// Copy π to level 0 and extend through every built level.
pub fn init_measure(model: &Model, pi: &BaseMeasure) -> Result<MeasureState, ProbError> {
    let expected = model.size(0);
    if pi.len() != expected {
        return Err(ProbError::Size { expected, got: pi.len() });
    }
    let mut m = MeasureState {
        levels: vec![pi.weights.clone()],
    };
    m.extend_to(model)?;
    Ok(m)
}

/// One more level of weights, as a new measure state.
pub fn extend_level(model: &Model, m: &MeasureState, n: usize) -> Result<MeasureState, ProbError> {
    assert_eq!(n, m.top(), "extend_level continues from the top measured level");
    let mut out = m.clone();
    let next = next_level(model, &m.levels[n], n)?;
    out.levels.push(next);
    Ok(out)
}

/// P(f), extending the measure after any growth of the model.
pub fn prob(state: &mut ModelState, m: &mut MeasureState, f: &Formula) -> Result<BigRational, ProbError> {
    let v = assign(state, f)?;
    m.extend_to(state.model())?;
    Ok(m.measure(&v.value))
}

pub fn prob_frozen(model: &Model, m: &MeasureState, f: &Formula) -> Result<BigRational, ProbError> {
    let v = assign_frozen(model, f)?;
    if m.top() < v.level {
        return Err(ProbError::Reconstruction("measure not extended to the model's top level"));
    }
    Ok(m.measure(&v.value))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BayesCheck {
    #[serde(serialize_with = "ser_rational")]
    pub lhs: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub rhs: BigRational,
    pub equal: bool,
}

pub fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// P((ψ|φ))·P(φ) against P(φ∧ψ).
pub fn bayes_check(
    state: &mut ModelState,
    m: &mut MeasureState,
    phi: &Formula,
    psi: &Formula,
) -> Result<BayesCheck, ProbError> {
    let cond = prob(state, m, &Formula::cond(psi.clone(), phi.clone()))?;
    let lhs = cond * prob(state, m, phi)?;
    let rhs = prob(state, m, &Formula::and(phi.clone(), psi.clone()))?;
    Ok(BayesCheck {
        equal: lhs == rhs,
        lhs,
        rhs,
    })
}

/// `R(ε) = N(ε)/D(ε)` with coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    pub numerator: Vec<BigRational>,
    pub denominator: Vec<BigRational>,
}

fn horner(c: &[BigRational], x: &BigRational) -> BigRational {
    c.iter().rev().fold(BigRational::zero(), |acc, a| acc * x + a)
}

impl RationalFunction {
    pub fn eval(&self, x: &BigRational) -> Option<BigRational> {
        let d = horner(&self.denominator, x);
        (!d.is_zero()).then(|| horner(&self.numerator, x) / d)
    }

    /// Limit as ε → 0 from above.
    pub fn limit_at_zero(&self) -> Result<BigRational, ProbError> {
        let j = self
            .denominator
            .iter()
            .position(|c| !c.is_zero())
            .ok_or(ProbError::Reconstruction("zero denominator"))?;
        if self.numerator[..j].iter().any(|c| !c.is_zero()) {
            return Err(ProbError::Reconstruction("unbounded at zero"));
        }
        Ok(&self.numerator[j] / &self.denominator[j])
    }
}

/// A nonzero solution of `rows · x = 0`, if the system has one.
fn null_vector(mut rows: Vec<Vec<BigRational>>, cols: usize) -> Option<Vec<BigRational>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let factor = rows[i][c].clone();
                for k in c..cols {
                    let delta = &factor * &rows[r][k];
                    rows[i][k] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let free = (0..cols).find(|c| !pivots.contains(c))?;
    let mut x = vec![BigRational::zero(); cols];
    x[free] = BigRational::one();
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = -rows[i][free].clone();
    }
    Some(x)
}

/// Recover `R` with numerator and denominator degree at most `degree` from
/// the function `sample`.
pub fn reconstruct(
    degree: usize,
    mut sample: impl FnMut(&BigRational) -> Result<BigRational, ProbError>,
) -> Result<RationalFunction, ProbError> {
    let cols = 2 * degree + 2;
    let mut rows = Vec::with_capacity(cols);
    for k in 0..cols {
        let eps = rational(1, k as i64 + 2);
        let r = sample(&eps)?;
        let mut row = Vec::with_capacity(cols);
        let mut power = BigRational::one();
        for _ in 0..=degree {
            row.push(power.clone());
            power *= &eps;
        }
        let mut power = BigRational::one();
        for _ in 0..=degree {
            row.push(-(&r * &power));
            power *= &eps;
        }
        rows.push(row);
    }
    let x = null_vector(rows, cols).ok_or(ProbError::Reconstruction("degree bound too small"))?;
    let f = RationalFunction {
        numerator: x[..=degree].to_vec(),
        denominator: x[degree + 1..].to_vec(),
    };
    let check = rational(1, cols as i64 + 3);
    match f.eval(&check) {
        Some(v) if v == sample(&check)? => Ok(f),
        _ => Err(ProbError::Reconstruction("verification sample disagrees; degree bound too small")),
    }
}

/// Exact limit of P_ε(f) as ε → 0, for any base measure (zeros allowed).
/// `degree_bound` defaults to the number of worlds at the deepest level.
pub fn limit_prob(
    state: &mut ModelState,
    pi: &BaseMeasure,
    f: &Formula,
    degree_bound: Option<usize>,
) -> Result<BigRational, ProbError> {
    let value = assign(state, f)?.value;
    let model = state.model();
    let degree = degree_bound.unwrap_or_else(|| model.size(model.top()));
    let r = reconstruct(degree, |eps| {
        let m = init_measure(model, &perturb(pi, eps)?)?;
        Ok(m.measure(&value))
    })?;
    r.limit_at_zero()
}
