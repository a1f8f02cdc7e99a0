//! Projected gradient ascent over the simplex and over simplex ∩ half-space.
//!
//! Two objectives are supported: the concave `log F(π, μ)` used by the main
//! algorithm's optimization step, and the generally non-concave
//! `F(π, μ) + bonus·π` used by the additive-bonus algorithms. Matrices are
//! rounded up entrywise to [`MEAN_CLAMP`] on entry because expected rewards
//! divide the gradient.
//!
//! The step rule is a backtracking line search halving from the caller's
//! initial step, accepting a step when the objective does not decrease, so
//! the objective sequence is nondecreasing. The accepted step seeds the next
//! iteration's search (doubled, capped at the initial step).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::welfare::{nsw, Policy, RewardMatrix, MEAN_CLAMP};

/// Below this trial step the line search gives up and the iterate stalls.
const MIN_STEP: f64 = 1e-14;

/// Slack allowed on the half-space constraint for returned policies.
const CONSTRAINT_TOL: f64 = 1e-9;

/// Stopping rule: halt when the objective improves by less than
/// `min_improvement` over `window` iterations, or after `max_iters`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TerminationRule {
    pub min_improvement: f64,
    pub window: usize,
    pub max_iters: usize,
}

impl TerminationRule {
    pub fn new(min_improvement: f64, window: usize, max_iters: usize) -> Result<Self> {
        let rule = Self {
            min_improvement,
            window,
            max_iters,
        };
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min_improvement > 0.0) {
            return Err(Error::InvalidConfig {
                field: "min_improvement",
                reason: format!("{} is not positive", self.min_improvement),
            });
        }
        if self.window == 0 {
            return Err(Error::InvalidConfig {
                field: "window",
                reason: "must be at least 1".to_string(),
            });
        }
        if self.max_iters < self.window {
            return Err(Error::InvalidConfig {
                field: "max_iters",
                reason: format!("{} is below window {}", self.max_iters, self.window),
            });
        }
        Ok(())
    }
}

/// The half-space `{π : normal·π ≤ offset}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpace {
    normal: Vec<f64>,
    offset: f64,
}

impl HalfSpace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        if normal.is_empty() {
            return Err(Error::EmptyDimension("n_arms"));
        }
        if normal.iter().any(|c| !c.is_finite()) || !offset.is_finite() {
            return Err(Error::OutOfRange(
                "half-space coefficients must be finite".to_string(),
            ));
        }
        Ok(Self { normal, offset })
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.normal.iter().zip(x).map(|(&c, &v)| c * v).sum()
    }

    /// Whether the intersection with the simplex is nonempty.
    ///
    /// Every simplex point satisfies `normal·π ≥ min_a normal_a`, with
    /// equality at the minimizing vertex, so the intersection is nonempty
    /// exactly when that minimum is at most `offset`.
    pub fn feasible_on_simplex(&self) -> bool {
        let min = self.normal.iter().cloned().fold(f64::INFINITY, f64::min);
        min <= self.offset + CONSTRAINT_TOL
    }
}

/// Euclidean projection onto the probability simplex.
///
/// Sort-and-threshold construction: with entries sorted descending, find the
/// largest prefix whose shifted values stay positive and subtract the
/// corresponding threshold.
pub fn project_to_simplex(v: &[f64]) -> Result<Policy> {
    if v.is_empty() {
        return Err(Error::EmptyDimension("n_arms"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::OutOfRange(
            "cannot project a non-finite vector".to_string(),
        ));
    }
    let mut out = vec![0.0; v.len()];
    let mut scratch = Vec::with_capacity(v.len());
    project_simplex_into(v, &mut scratch, &mut out);
    Policy::new(out)
}

fn project_simplex_into(v: &[f64], scratch: &mut Vec<f64>, out: &mut [f64]) {
    scratch.clear();
    scratch.extend_from_slice(v);
    scratch.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite entries"));
    let mut prefix = 0.0;
    let mut theta = 0.0;
    for (i, &u) in scratch.iter().enumerate() {
        prefix += u;
        let t = (prefix - 1.0) / (i as f64 + 1.0);
        if u - t > 0.0 {
            theta = t;
        }
    }
    for (o, &vi) in out.iter_mut().zip(v) {
        *o = (vi - theta).max(0.0);
    }
}

/// Euclidean projection onto simplex ∩ half-space.
///
/// If the plain simplex projection already satisfies the constraint it is
/// returned unchanged. Otherwise the constraint is active at the optimum and
/// the KKT system reduces to a one-dimensional search over the constraint
/// multiplier ν: the candidate `x(ν) = proj_Δ(v − ν·normal)` has
/// `normal·x(ν)` nonincreasing in ν, so a bisection finds the active point.
pub fn project_to_simplex_halfspace(v: &[f64], h: &HalfSpace) -> Result<Policy> {
    if h.normal.len() != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "vector has {} entries, half-space has {}",
            v.len(),
            h.normal.len()
        )));
    }
    if !h.feasible_on_simplex() {
        return Err(Error::InfeasibleConstraint);
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::OutOfRange(
            "cannot project a non-finite vector".to_string(),
        ));
    }
    let k = v.len();
    let mut out = vec![0.0; k];
    let mut scratch = Vec::with_capacity(k);
    let mut shifted = vec![0.0; k];
    project_halfspace_into(v, h, &mut scratch, &mut shifted, &mut out);
    Policy::new(out)
}

fn project_halfspace_into(
    v: &[f64],
    h: &HalfSpace,
    scratch: &mut Vec<f64>,
    shifted: &mut [f64],
    out: &mut [f64],
) {
    project_simplex_into(v, scratch, out);
    if h.dot(out) <= h.offset + CONSTRAINT_TOL {
        return;
    }

    fn eval(
        nu: f64,
        v: &[f64],
        h: &HalfSpace,
        scratch: &mut Vec<f64>,
        shifted: &mut [f64],
        out: &mut [f64],
    ) -> f64 {
        for ((s, &vi), &ci) in shifted.iter_mut().zip(v).zip(&h.normal) {
            *s = vi - nu * ci;
        }
        project_simplex_into(shifted, scratch, out);
        h.dot(out)
    }

    // Bracket the active multiplier, then bisect. normal·x(ν) is
    // nonincreasing in ν and approaches min_a normal_a ≤ offset, so either
    // the doubling finds a feasible ν or ν grows until the iterate sits on
    // the minimizing face, which is feasible within tolerance.
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut doublings = 0;
    while eval(hi, v, h, scratch, shifted, out) > h.offset && doublings < 80 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if eval(mid, v, h, scratch, shifted, out) > h.offset {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    eval(hi, v, h, scratch, shifted, out);
}

enum Objective<'a> {
    /// `Σ_j ln ⟨x, μ_j⟩`
    LogNsw,
    /// `∏_j ⟨x, μ_j⟩ + bonus·x`
    NswPlusLinear { bonus: &'a [f64] },
}

/// Objective value at `x`, filling `expected` with `⟨x, μ_j⟩` per agent.
fn eval_objective(
    mu: &RewardMatrix,
    objective: &Objective<'_>,
    x: &[f64],
    expected: &mut [f64],
) -> f64 {
    for (j, e) in expected.iter_mut().enumerate() {
        *e = x
            .iter()
            .zip(mu.row(j))
            .map(|(&p, &m)| p * m)
            .sum::<f64>();
    }
    match objective {
        Objective::LogNsw => expected.iter().map(|e| e.ln()).sum(),
        Objective::NswPlusLinear { bonus } => {
            let f: f64 = expected.iter().product();
            let lin: f64 = bonus.iter().zip(x).map(|(&b, &xi)| b * xi).sum();
            f + lin
        }
    }
}

/// Gradient at the point `expected` was filled for.
fn gradient_from_expected(
    mu: &RewardMatrix,
    objective: &Objective<'_>,
    expected: &[f64],
    grad: &mut [f64],
) {
    grad.iter_mut().for_each(|g| *g = 0.0);
    match objective {
        Objective::LogNsw => {
            for (j, &e) in expected.iter().enumerate() {
                let inv = 1.0 / e;
                for (g, &m) in grad.iter_mut().zip(mu.row(j)) {
                    *g += m * inv;
                }
            }
        }
        Objective::NswPlusLinear { bonus } => {
            let f: f64 = expected.iter().product();
            for (j, &e) in expected.iter().enumerate() {
                let scale = f / e;
                for (g, &m) in grad.iter_mut().zip(mu.row(j)) {
                    *g += m * scale;
                }
            }
            for (g, &b) in grad.iter_mut().zip(bonus.iter()) {
                *g += b;
            }
        }
    }
}

fn project_feasible(
    src: &[f64],
    constraint: Option<&HalfSpace>,
    sort_scratch: &mut Vec<f64>,
    halfspace_buf: &mut [f64],
    out: &mut [f64],
) {
    match constraint {
        Some(h) => project_halfspace_into(src, h, sort_scratch, halfspace_buf, out),
        None => project_simplex_into(src, sort_scratch, out),
    }
}

/// Runs the ascent from `x0` under `rule`, returning the final iterate and
/// objective value.
fn ascend(
    mu: &RewardMatrix,
    objective: &Objective<'_>,
    constraint: Option<&HalfSpace>,
    x0: &[f64],
    rule: &TerminationRule,
    step: f64,
) -> Result<(Vec<f64>, f64)> {
    let n = mu.n_agents();
    let k = mu.n_arms();
    let mut expected = vec![0.0; n];
    let mut grad = vec![0.0; k];
    let mut x = vec![0.0; k];
    let mut shifted = vec![0.0; k];
    let mut trial = vec![0.0; k];
    let mut hs_buf = vec![0.0; k];
    let mut sort_scratch: Vec<f64> = Vec::with_capacity(k);

    project_feasible(x0, constraint, &mut sort_scratch, &mut hs_buf, &mut x);
    let mut obj = eval_objective(mu, objective, &x, &mut expected);
    if !obj.is_finite() {
        return Err(Error::NonFiniteObjective);
    }
    let mut history = Vec::with_capacity(rule.max_iters.min(4096) + 1);
    history.push(obj);
    let mut next_step = step;
    for _ in 0..rule.max_iters {
        gradient_from_expected(mu, objective, &expected, &mut grad);
        let mut s = next_step;
        let mut accepted = false;
        loop {
            for ((sh, &xi), &gi) in shifted.iter_mut().zip(&x).zip(&grad) {
                *sh = xi + s * gi;
            }
            project_feasible(&shifted, constraint, &mut sort_scratch, &mut hs_buf, &mut trial);
            let t = eval_objective(mu, objective, &trial, &mut expected);
            if t.is_finite() && t >= obj {
                std::mem::swap(&mut x, &mut trial);
                obj = t;
                accepted = true;
                break;
            }
            s *= 0.5;
            if s < MIN_STEP {
                break;
            }
        }
        if !accepted {
            // No ascent step remains; the window rule would observe zero
            // improvement from here on. `expected` is refreshed below.
            break;
        }
        next_step = (2.0 * s).min(step);
        history.push(obj);
        let len = history.len();
        if len > rule.window
            && history[len - 1] - history[len - 1 - rule.window] < rule.min_improvement
        {
            break;
        }
    }
    let obj = eval_objective(mu, objective, &x, &mut expected);
    Ok((x, obj))
}

/// Maximizes the concave `log F(π, μ)` by projected gradient ascent from the
/// uniform policy. Returns the policy and its NSW value (not the log).
///
/// Deterministic given `(mu, rule, step)`.
pub fn maximize_log_nsw(
    mu: &RewardMatrix,
    rule: &TerminationRule,
    step: f64,
) -> Result<(Policy, f64)> {
    rule.validate()?;
    validate_step(step)?;
    let clamped = mu.clamped_min(MEAN_CLAMP);
    let k = clamped.n_arms();
    let x0 = vec![1.0 / k as f64; k];
    let (x, _) = ascend(&clamped, &Objective::LogNsw, None, &x0, rule, step)?;
    let policy = Policy::new(x)?;
    // Report the welfare of the caller's matrix; the clamp is an internal
    // gradient-safety device.
    let value = nsw(&policy, mu)?;
    Ok((policy, value))
}

/// Maximizes `F(π, μ) + bonus·π`, optionally over simplex ∩ half-space.
///
/// The objective is non-concave in general, so the ascent restarts from
/// `restarts` initial points: the uniform policy plus `restarts − 1` random
/// simplex points drawn from `rng`. Returns the best local optimum found;
/// monotone line search guarantees the result is at least as good as every
/// initial point.
pub fn maximize_nsw_plus_linear(
    mu: &RewardMatrix,
    bonus: &[f64],
    constraint: Option<&HalfSpace>,
    rule: &TerminationRule,
    step: f64,
    restarts: usize,
    rng: &mut impl Rng,
) -> Result<(Policy, f64)> {
    rule.validate()?;
    validate_step(step)?;
    if bonus.len() != mu.n_arms() {
        return Err(Error::DimensionMismatch(format!(
            "bonus has {} entries for {} arms",
            bonus.len(),
            mu.n_arms()
        )));
    }
    if bonus.iter().any(|b| !b.is_finite() || *b < 0.0) {
        return Err(Error::OutOfRange(
            "bonus entries must be finite and nonnegative".to_string(),
        ));
    }
    if restarts == 0 {
        return Err(Error::InvalidConfig {
            field: "restarts",
            reason: "must be at least 1".to_string(),
        });
    }
    if let Some(h) = constraint {
        if h.normal().len() != mu.n_arms() {
            return Err(Error::DimensionMismatch(format!(
                "half-space has {} entries for {} arms",
                h.normal().len(),
                mu.n_arms()
            )));
        }
        if !h.feasible_on_simplex() {
            return Err(Error::InfeasibleConstraint);
        }
    }

    let clamped = mu.clamped_min(MEAN_CLAMP);
    let k = clamped.n_arms();
    let objective = Objective::NswPlusLinear { bonus };

    let mut best: Option<(Vec<f64>, f64)> = None;
    for r in 0..restarts {
        let x0 = if r == 0 {
            vec![1.0 / k as f64; k]
        } else {
            random_simplex_point(k, rng)
        };
        let (x, obj) = ascend(&clamped, &objective, constraint, &x0, rule, step)?;
        if best.as_ref().is_none_or(|(_, b)| obj > *b) {
            best = Some((x, obj));
        }
    }
    let (x, _) = best.expect("at least one restart");
    let policy = Policy::new(x)?;
    let lin: f64 = bonus
        .iter()
        .zip(policy.probs())
        .map(|(&b, &p)| b * p)
        .sum();
    let obj = nsw(&policy, mu)? + lin;
    Ok((policy, obj))
}

fn validate_step(step: f64) -> Result<()> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidConfig {
            field: "step",
            reason: format!("{step} is not a positive finite number"),
        });
    }
    Ok(())
}

/// Uniform point on the simplex via normalized exponentials.
fn random_simplex_point(k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..k)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let sum: f64 = v.iter().sum();
    if sum <= 0.0 {
        return vec![1.0 / k as f64; k];
    }
    v.iter_mut().for_each(|x| *x /= sum);
    v
}
