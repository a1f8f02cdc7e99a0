//! The three bandit algorithms as round-by-round state machines.
//!
//! * [`fair_ucb_step`] — sweep every arm once, then maximize the welfare of
//!   the upper-confidence matrix `min(μ̂ + w, 1)`. The optimization step is
//!   log-concave, so a single ascent from the uniform policy suffices.
//! * [`high_startup_step`] — the variant that buys a tighter horizon bound
//!   with a long deterministic warm-up, then maximizes `F(π, μ̂) + π·η`
//!   over the simplex cut by a total-shortfall half-space.
//! * [`baseline_ucb_step`] — the prior additive-bonus rule
//!   `argmax F(π, μ̂) + α_t Σ_a π_a √(ln(NKt)/N_{a,t})` with `α_t = N`,
//!   which is not log-concave.
//!
//! Rounds and arms are 0-based internally; round `t` below refers to the
//! 1-based paper count `state.round() + 1`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::environment::{sample_rewards, stream, BanditInstance};
use crate::error::{Error, Result};
use crate::optimizer::{
    maximize_log_nsw, maximize_nsw_plus_linear, HalfSpace, TerminationRule,
};
use crate::welfare::{nsw, BanditState, Policy, RegretTrace, RewardMatrix, TraceRecord};

/// Parameters of the confidence width
/// `w = width_scale · (√(12(1−μ̂)L/n) + 12L/n)`.
///
/// `L = ln(4NKT/δ)` for the horizon-aware width; the anytime variant uses
/// `L = ln(8NKt²/δ)` with the current round instead of the horizon.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceSpec {
    pub delta: f64,
    pub horizon: u64,
    pub anytime: bool,
    pub width_scale: f64,
}

impl ConfidenceSpec {
    /// Spec with the experiment defaults: δ = 0.01 and the 0.5 width scaling.
    pub fn defaults(horizon: u64) -> Self {
        Self {
            delta: 0.01,
            horizon,
            anytime: false,
            width_scale: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidConfig {
                field: "delta",
                reason: format!("{} is not in (0, 1)", self.delta),
            });
        }
        if self.horizon == 0 {
            return Err(Error::InvalidConfig {
                field: "horizon",
                reason: "must be at least 1".to_string(),
            });
        }
        if !(self.width_scale > 0.0 && self.width_scale.is_finite()) {
            return Err(Error::InvalidConfig {
                field: "width_scale",
                reason: format!("{} is not a positive finite number", self.width_scale),
            });
        }
        Ok(())
    }

    /// The log term `L` for round `t`.
    pub fn log_term(&self, n_agents: usize, n_arms: usize, t: u64) -> f64 {
        let nk = (n_agents * n_arms) as f64;
        if self.anytime {
            (8.0 * nk * (t as f64) * (t as f64) / self.delta).ln()
        } else {
            (4.0 * nk * self.horizon as f64 / self.delta).ln()
        }
    }
}

/// Width formula without the scale factor, for an explicit log term.
fn width_from_log_term(mu_hat: f64, count: u64, log_term: f64) -> f64 {
    let n = count as f64;
    (12.0 * (1.0 - mu_hat) * log_term / n).sqrt() + 12.0 * log_term / n
}

/// Confidence width for one (agent, arm) cell at round `t`.
pub fn confidence_width(
    mu_hat: f64,
    count: u64,
    spec: &ConfidenceSpec,
    n_agents: usize,
    n_arms: usize,
    t: u64,
) -> Result<f64> {
    if count == 0 {
        return Err(Error::ZeroCount { arm: usize::MAX });
    }
    if !(0.0..=1.0).contains(&mu_hat) {
        return Err(Error::OutOfRange(format!(
            "empirical mean {mu_hat} not in [0, 1]"
        )));
    }
    Ok(spec.width_scale * width_from_log_term(mu_hat, count, spec.log_term(n_agents, n_arms, t)))
}

/// Which algorithm a runner executes, with its per-kind parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlgorithmKind {
    FairUcb,
    /// `warmup_multiplier` scales the warm-up constant 180. The paper value
    /// (1.0) exceeds any desk-scale horizon, so experiments shrink it.
    HighStartupUcb { warmup_multiplier: f64 },
    /// `bonus_scale` is the empirical 0.8 factor on the additive term.
    BaselineUcb { bonus_scale: f64 },
}

impl AlgorithmKind {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmKind::FairUcb => "fair-ucb",
            AlgorithmKind::HighStartupUcb { .. } => "high-startup",
            AlgorithmKind::BaselineUcb { .. } => "baseline-ucb",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            AlgorithmKind::FairUcb => Ok(()),
            AlgorithmKind::HighStartupUcb { warmup_multiplier } => {
                if !(warmup_multiplier > 0.0 && warmup_multiplier.is_finite()) {
                    return Err(Error::InvalidConfig {
                        field: "warmup_multiplier",
                        reason: format!("{warmup_multiplier} is not a positive finite number"),
                    });
                }
                Ok(())
            }
            AlgorithmKind::BaselineUcb { bonus_scale } => {
                if !(bonus_scale >= 0.0 && bonus_scale.is_finite()) {
                    return Err(Error::InvalidConfig {
                        field: "bonus_scale",
                        reason: format!("{bonus_scale} is not a nonnegative finite number"),
                    });
                }
                Ok(())
            }
        }
    }
}

/// Inner-solver knobs shared by the step functions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Initial step of the backtracking line search.
    pub step: f64,
    /// Restart count for the non-concave solves; 1 mirrors the paper.
    pub restarts: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            step: 0.1,
            restarts: 1,
        }
    }
}

/// One round of the fair UCB algorithm: returns the policy played and the
/// sampled arm. Rounds `t ≤ K` deterministically sweep the arms.
pub fn fair_ucb_step(
    state: &BanditState,
    spec: &ConfidenceSpec,
    rule: &TerminationRule,
    solver: &SolverSettings,
    rng: &mut impl Rng,
) -> Result<(Policy, usize)> {
    spec.validate()?;
    let k = state.n_arms();
    let n = state.n_agents();
    let t = state.round() + 1;
    if t <= k as u64 {
        let arm = (t - 1) as usize;
        return Ok((Policy::vertex(k, arm)?, arm));
    }
    let log_term = spec.log_term(n, k, t);
    let mut ucb = Vec::with_capacity(n * k);
    for j in 0..n {
        for a in 0..k {
            let count = state.count(a);
            if count == 0 {
                return Err(Error::ZeroCount { arm: a });
            }
            let mu_hat = state.empirical_mean(j, a);
            let w = spec.width_scale * width_from_log_term(mu_hat, count, log_term);
            ucb.push((mu_hat + w).min(1.0));
        }
    }
    let ucb = RewardMatrix::new(n, k, ucb)?;
    let (policy, _) = maximize_log_nsw(&ucb, rule, solver.step)?;
    let arm = policy.sample(rng);
    Ok((policy, arm))
}

/// Warm-up block length of the high-start-up algorithm: how many consecutive
/// rounds each arm is pulled, `multiplier · 180 N² ln(6NTK/δ) ln T`.
pub fn startup_block(
    n_agents: usize,
    n_arms: usize,
    horizon: u64,
    delta: f64,
    multiplier: f64,
) -> f64 {
    let n = n_agents as f64;
    let t = horizon as f64;
    let log_term = (6.0 * n * t * n_arms as f64 / delta).ln();
    multiplier * 180.0 * n * n * log_term * t.ln()
}

/// Total warm-up rounds: `K` blocks.
pub fn startup_warmup_rounds(
    n_agents: usize,
    n_arms: usize,
    horizon: u64,
    delta: f64,
    multiplier: f64,
) -> u64 {
    (n_arms as f64 * startup_block(n_agents, n_arms, horizon, delta, multiplier)).floor() as u64
}

/// The feasibility region of the high-start-up optimization step:
/// `{π : Σ_a π_a Σ_j (1 − μ̂_{j,a}) ≤ 1 + 2 ln T}`.
pub fn startup_constraint(state: &BanditState, horizon: u64) -> HalfSpace {
    let k = state.n_arms();
    let n = state.n_agents();
    let normal: Vec<f64> = (0..k)
        .map(|a| (0..n).map(|j| 1.0 - state.empirical_mean(j, a)).sum())
        .collect();
    let offset = 1.0 + 2.0 * (horizon as f64).ln();
    HalfSpace::new(normal, offset).expect("nonempty finite constraint")
}

/// The per-arm exploration bonus of the high-start-up algorithm, exactly as
/// the appendix theorem displays it:
///
/// ```text
/// η_a = (4√ln(6KT/δ) + 6√2 ln(6NKT/δ) √(2+2lnT)) √(K/T) Σ_j (1−μ̂_{j,a})
///     + ((4√ln(6KT/δ) + √(1+lnT)) √(T/K)
///        + 12√2 √N ln(6NKT/δ) √(2+2lnT)) / N_{a,t}
///     + (1 / (20√N/19 − 1)) Σ_j w_{j,a,t}
/// ```
///
/// `widths` is the row-major `N × K` matrix of confidence widths.
pub fn eta_vector(
    state: &BanditState,
    widths: &[f64],
    horizon: u64,
    delta: f64,
) -> Result<Vec<f64>> {
    let n = state.n_agents();
    let k = state.n_arms();
    if widths.len() != n * k {
        return Err(Error::DimensionMismatch(format!(
            "widths has {} entries for a {n}x{k} state",
            widths.len()
        )));
    }
    for (a, &c) in state.counts().iter().enumerate() {
        if c == 0 {
            return Err(Error::ZeroCount { arm: a });
        }
    }
    let nf = n as f64;
    let kf = k as f64;
    let tf = horizon as f64;
    let ln_t = tf.ln();
    let l_kt = (6.0 * kf * tf / delta).ln();
    let l_nkt = (6.0 * nf * kf * tf / delta).ln();
    let root_warm = (2.0 + 2.0 * ln_t).sqrt();
    let sqrt2 = std::f64::consts::SQRT_2;

    let shortfall_coef = (4.0 * l_kt.sqrt() + 6.0 * sqrt2 * l_nkt * root_warm) * (kf / tf).sqrt();
    let count_coef = (4.0 * l_kt.sqrt() + (1.0 + ln_t).sqrt()) * (tf / kf).sqrt()
        + 12.0 * sqrt2 * nf.sqrt() * l_nkt * root_warm;
    let width_coef = 1.0 / (20.0 * nf.sqrt() / 19.0 - 1.0);

    Ok((0..k)
        .map(|a| {
            let shortfall: f64 = (0..n).map(|j| 1.0 - state.empirical_mean(j, a)).sum();
            let width_sum: f64 = (0..n).map(|j| widths[j * k + a]).sum();
            shortfall_coef * shortfall
                + count_coef / state.count(a) as f64
                + width_coef * width_sum
        })
        .collect())
}

/// One round of the high-start-up algorithm.
///
/// During the warm-up (`t ≤ K` blocks of [`startup_block`] rounds) arms are
/// pulled in deterministic blocks. Afterwards the policy maximizes
/// `F(π, μ̂) + π·η` over the constrained simplex; when the constraint is
/// infeasible the round plays a uniformly random single arm instead.
///
/// The widths inside `η` use the Algorithm-2 log term `ln(6NKT/δ)` and are
/// not touched by `spec.width_scale`, which is an empirical tuning of the
/// fair UCB width only.
pub fn high_startup_step(
    state: &BanditState,
    spec: &ConfidenceSpec,
    rule: &TerminationRule,
    warmup_multiplier: f64,
    solver: &SolverSettings,
    rng: &mut impl Rng,
) -> Result<(Policy, usize)> {
    spec.validate()?;
    AlgorithmKind::HighStartupUcb { warmup_multiplier }.validate()?;
    let k = state.n_arms();
    let n = state.n_agents();
    let t = state.round() + 1;
    let block = startup_block(n, k, spec.horizon, spec.delta, warmup_multiplier);
    if (t as f64) <= k as f64 * block {
        let arm_one_based = (t as f64 / block).ceil() as usize;
        let arm = arm_one_based.clamp(1, k) - 1;
        return Ok((Policy::vertex(k, arm)?, arm));
    }

    let constraint = startup_constraint(state, spec.horizon);
    if !constraint.feasible_on_simplex() {
        let arm = rng.random_range(0..k);
        return Ok((Policy::vertex(k, arm)?, arm));
    }

    for (a, &c) in state.counts().iter().enumerate() {
        if c == 0 {
            return Err(Error::ZeroCount { arm: a });
        }
    }
    let l_alg2 = (6.0 * (n * k) as f64 * spec.horizon as f64 / spec.delta).ln();
    let mut widths = Vec::with_capacity(n * k);
    for j in 0..n {
        for a in 0..k {
            widths.push(width_from_log_term(
                state.empirical_mean(j, a),
                state.count(a),
                l_alg2,
            ));
        }
    }
    let eta = eta_vector(state, &widths, spec.horizon, spec.delta)?;
    let mu_hat = state.empirical_means();
    let (policy, _) = maximize_nsw_plus_linear(
        &mu_hat,
        &eta,
        Some(&constraint),
        rule,
        solver.step,
        solver.restarts,
        rng,
    )?;
    let arm = policy.sample(rng);
    Ok((policy, arm))
}

/// One round of the prior-work additive-bonus UCB baseline.
///
/// Sweeps every arm once (so counts are positive before the bonus is
/// evaluated), then maximizes `F(π, μ̂) + Σ_a π_a · bonus_scale · N ·
/// √(ln(NKt)/N_{a,t})`.
pub fn baseline_ucb_step(
    state: &BanditState,
    rule: &TerminationRule,
    bonus_scale: f64,
    solver: &SolverSettings,
    rng: &mut impl Rng,
) -> Result<(Policy, usize)> {
    AlgorithmKind::BaselineUcb { bonus_scale }.validate()?;
    let k = state.n_arms();
    let n = state.n_agents();
    let t = state.round() + 1;
    if t <= k as u64 {
        let arm = (t - 1) as usize;
        return Ok((Policy::vertex(k, arm)?, arm));
    }
    for (a, &c) in state.counts().iter().enumerate() {
        if c == 0 {
            return Err(Error::ZeroCount { arm: a });
        }
    }
    let alpha = n as f64;
    let log_term = ((n * k) as f64 * t as f64).ln();
    let bonus: Vec<f64> = (0..k)
        .map(|a| bonus_scale * alpha * (log_term / state.count(a) as f64).sqrt())
        .collect();
    let mu_hat = state.empirical_means();
    let (policy, _) = maximize_nsw_plus_linear(
        &mu_hat,
        &bonus,
        None,
        rule,
        solver.step,
        solver.restarts,
        rng,
    )?;
    let arm = policy.sample(rng);
    Ok((policy, arm))
}

/// A finished episode: the regret trace plus concentration diagnostics.
#[derive(Clone, Debug)]
pub struct EpisodeOutcome {
    pub trace: RegretTrace,
    /// Whether `|μ*_{j,a} − μ̂_{j,a,t}| ≤ w_{j,a,t}` held for every agent and
    /// arm at every round where all arms had at least one pull.
    pub coverage_ok: bool,
    /// `Σ_t Σ_a π_{a,t}/N_{a,t}` accumulated over rounds where every arm in
    /// the policy's support had been pulled (the statistic is undefined
    /// against zero counts during the warm-up sweep).
    pub martingale_sum: f64,
}

/// Runs `horizon` rounds of `kind` on `instance`, sampling rewards from the
/// environment. Deterministic given `seed`: one ChaCha stream drives restart
/// draws, arm sampling, and reward draws in a fixed per-round order.
pub fn run_episode(
    kind: &AlgorithmKind,
    instance: &BanditInstance,
    horizon: u64,
    spec: &ConfidenceSpec,
    rule: &TerminationRule,
    solver: &SolverSettings,
    seed: u64,
) -> Result<EpisodeOutcome> {
    kind.validate()?;
    spec.validate()?;
    rule.validate()?;
    if horizon == 0 {
        return Err(Error::InvalidConfig {
            field: "horizon",
            reason: "must be at least 1".to_string(),
        });
    }
    let n = instance.mu_star.n_agents();
    let k = instance.mu_star.n_arms();
    let mut rng = stream(seed, "episode", 0);
    let mut state = BanditState::new(n, k)?;
    let mut records = Vec::with_capacity(horizon as usize);
    let mut cum_regret = 0.0;
    let mut coverage_ok = true;
    let mut martingale_sum = 0.0;

    for t in 1..=horizon {
        let (policy, arm) = match *kind {
            AlgorithmKind::FairUcb => fair_ucb_step(&state, spec, rule, solver, &mut rng)?,
            AlgorithmKind::HighStartupUcb { warmup_multiplier } => {
                high_startup_step(&state, spec, rule, warmup_multiplier, solver, &mut rng)?
            }
            AlgorithmKind::BaselineUcb { bonus_scale } => {
                baseline_ucb_step(&state, rule, bonus_scale, solver, &mut rng)?
            }
        };

        if state.counts().iter().all(|&c| c > 0) {
            let log_term = spec.log_term(n, k, t);
            'coverage: for j in 0..n {
                for a in 0..k {
                    let mu_hat = state.empirical_mean(j, a);
                    let w = spec.width_scale
                        * width_from_log_term(mu_hat, state.count(a), log_term);
                    if (instance.mu_star.get(j, a) - mu_hat).abs() > w {
                        coverage_ok = false;
                        break 'coverage;
                    }
                }
            }
            for (a, &p) in policy.probs().iter().enumerate() {
                martingale_sum += p / state.count(a) as f64;
            }
        }

        let rewards = sample_rewards(&instance.mu_star, arm, &mut rng)?;
        let nsw_t = nsw(&policy, &instance.mu_star)?;
        cum_regret += instance.opt_nsw - nsw_t;
        records.push(TraceRecord {
            round: t,
            arm,
            policy,
            nsw: nsw_t,
            cum_regret,
        });
        state.record(arm, &rewards)?;
    }

    Ok(EpisodeOutcome {
        trace: RegretTrace {
            opt_nsw: instance.opt_nsw,
            records,
        },
        coverage_ok,
        martingale_sum,
    })
}
