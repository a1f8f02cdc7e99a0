//! Domain types and the Nash social welfare objective.
//!
//! A problem instance has `N` agents and `K` arms. Each round every agent
//! receives a reward from the single arm pulled, so the decision variable is
//! a probability distribution over arms rather than a single arm. The
//! welfare of a policy `π` under a mean reward matrix `μ` is the product of
//! the agents' expected rewards,
//!
//! ```text
//! F(π, μ) = ∏_j ( Σ_a π_a μ_{j,a} )
//! ```
//!
//! which sits between the egalitarian minimum and the utilitarian mean.
//! Regret is measured against the fixed optimal policy of the instance.

use rand::Rng;

use crate::error::{Error, Result};

/// Entrywise floor applied to mean matrices before they enter an optimizer.
///
/// Expected rewards appear as divisors in the log gradient, so means are
/// rounded up to this value at the optimizer boundary. The floor is never
/// stored back into the caller's matrix.
pub const MEAN_CLAMP: f64 = 1e-3;

/// Documented optimizer gap, in NSW units.
///
/// Regret increments may dip below zero by at most this amount because the
/// optimal policy of an instance is itself computed numerically.
pub const EPS_OPT: f64 = 1e-3;

/// Absolute tolerance on the simplex sum constraint.
pub const SIMPLEX_SUM_TOL: f64 = 1e-9;

/// An `N × K` matrix of per-agent, per-arm mean rewards in `[0, 1]`.
///
/// Stored row-major: row `j` holds agent `j`'s mean reward for every arm.
/// The same type carries true means, empirical means, and upper confidence
/// bound matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct RewardMatrix {
    n_agents: usize,
    n_arms: usize,
    values: Vec<f64>,
}

impl RewardMatrix {
    /// Builds a matrix from row-major values, validating shape and range.
    pub fn new(n_agents: usize, n_arms: usize, values: Vec<f64>) -> Result<Self> {
        if n_agents == 0 {
            return Err(Error::EmptyDimension("n_agents"));
        }
        if n_arms == 0 {
            return Err(Error::EmptyDimension("n_arms"));
        }
        if values.len() != n_agents * n_arms {
            return Err(Error::DimensionMismatch(format!(
                "expected {}x{}={} entries, got {}",
                n_agents,
                n_arms,
                n_agents * n_arms,
                values.len()
            )));
        }
        for (i, &v) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange(format!(
                    "reward matrix entry ({}, {}) = {v} not in [0, 1]",
                    i / n_arms,
                    i % n_arms
                )));
            }
        }
        Ok(Self {
            n_agents,
            n_arms,
            values,
        })
    }

    /// Builds a matrix by evaluating `f(agent, arm)` for every cell.
    pub fn from_fn(
        n_agents: usize,
        n_arms: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(n_agents * n_arms);
        for j in 0..n_agents {
            for a in 0..n_arms {
                values.push(f(j, a));
            }
        }
        Self::new(n_agents, n_arms, values)
    }

    /// Builds a matrix from per-agent rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_agents = rows.len();
        if n_agents == 0 {
            return Err(Error::EmptyDimension("n_agents"));
        }
        let n_arms = rows[0].len();
        for row in rows {
            if row.len() != n_arms {
                return Err(Error::DimensionMismatch(
                    "ragged rows in reward matrix".to_string(),
                ));
            }
        }
        Self::new(n_agents, n_arms, rows.concat())
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn n_arms(&self) -> usize {
        self.n_arms
    }

    pub fn get(&self, agent: usize, arm: usize) -> f64 {
        self.values[agent * self.n_arms + arm]
    }

    /// Agent `j`'s mean rewards across all arms.
    pub fn row(&self, agent: usize) -> &[f64] {
        let start = agent * self.n_arms;
        &self.values[start..start + self.n_arms]
    }

    /// Row-major view of all entries.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Copy of the matrix with every entry rounded up to `floor`.
    pub fn clamped_min(&self, floor: f64) -> Self {
        Self {
            n_agents: self.n_agents,
            n_arms: self.n_arms,
            values: self.values.iter().map(|&v| v.max(floor)).collect(),
        }
    }

    fn check_policy_dims(&self, policy: &Policy) -> Result<()> {
        if policy.n_arms() != self.n_arms {
            return Err(Error::DimensionMismatch(format!(
                "policy has {} arms, matrix has {}",
                policy.n_arms(),
                self.n_arms
            )));
        }
        Ok(())
    }

    fn check_same_dims(&self, other: &Self) -> Result<()> {
        if self.n_agents != other.n_agents || self.n_arms != other.n_arms {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.n_agents, self.n_arms, other.n_agents, other.n_arms
            )));
        }
        Ok(())
    }
}

/// A point on the `K`-simplex: the probability of pulling each arm.
#[derive(Clone, Debug, PartialEq)]
pub struct Policy {
    probs: Vec<f64>,
}

impl Policy {
    /// Validates nonnegativity and that the entries sum to 1 within
    /// [`SIMPLEX_SUM_TOL`].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyDimension("n_arms"));
        }
        let mut sum = 0.0;
        for &p in &probs {
            if !(p >= 0.0) {
                return Err(Error::OutOfRange(format!("negative policy entry {p}")));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > SIMPLEX_SUM_TOL {
            return Err(Error::OutOfRange(format!(
                "policy entries sum to {sum}, expected 1"
            )));
        }
        Ok(Self { probs })
    }

    /// The uniform distribution over `k` arms.
    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::EmptyDimension("n_arms"));
        }
        Ok(Self {
            probs: vec![1.0 / k as f64; k],
        })
    }

    /// Probability 1 on a single arm.
    pub fn vertex(k: usize, arm: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::EmptyDimension("n_arms"));
        }
        if arm >= k {
            return Err(Error::ArmOutOfRange { arm, n_arms: k });
        }
        let mut probs = vec![0.0; k];
        probs[arm] = 1.0;
        Ok(Self { probs })
    }

    pub fn n_arms(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Samples an arm by inverting the CDF on a single uniform draw.
    ///
    /// Ties in cumulative probabilities resolve to the lower arm index.
    pub fn sample(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.random();
        let mut cum = 0.0;
        for (a, &p) in self.probs.iter().enumerate() {
            cum += p;
            if u < cum {
                return a;
            }
        }
        self.probs.len() - 1
    }
}

/// Pull counts, per-(agent, arm) reward sums, and the round index.
///
/// `counts[a]` is the number of times arm `a` has been pulled in rounds
/// `1..=round`, so at the start of round `t = round + 1` it equals the
/// paper-style count "before round t".
#[derive(Clone, Debug)]
pub struct BanditState {
    n_agents: usize,
    n_arms: usize,
    counts: Vec<u64>,
    reward_sums: Vec<f64>,
    round: u64,
}

impl BanditState {
    pub fn new(n_agents: usize, n_arms: usize) -> Result<Self> {
        if n_agents == 0 {
            return Err(Error::EmptyDimension("n_agents"));
        }
        if n_arms == 0 {
            return Err(Error::EmptyDimension("n_arms"));
        }
        Ok(Self {
            n_agents,
            n_arms,
            counts: vec![0; n_arms],
            reward_sums: vec![0.0; n_agents * n_arms],
            round: 0,
        })
    }

    /// Reconstructs a state from raw counts and reward sums.
    ///
    /// The round index is the sum of the counts. Used by tests that need a
    /// state in a specific configuration.
    pub fn from_parts(counts: Vec<u64>, reward_sums: Vec<Vec<f64>>) -> Result<Self> {
        let n_arms = counts.len();
        let n_agents = reward_sums.len();
        if n_arms == 0 {
            return Err(Error::EmptyDimension("n_arms"));
        }
        if n_agents == 0 {
            return Err(Error::EmptyDimension("n_agents"));
        }
        let mut flat = Vec::with_capacity(n_agents * n_arms);
        for row in &reward_sums {
            if row.len() != n_arms {
                return Err(Error::DimensionMismatch(
                    "reward_sums rows must match counts length".to_string(),
                ));
            }
            for (a, &s) in row.iter().enumerate() {
                if !(s >= 0.0) || s > counts[a] as f64 {
                    return Err(Error::OutOfRange(format!(
                        "reward sum {s} outside [0, count={}] for arm {a}",
                        counts[a]
                    )));
                }
                flat.push(s);
            }
        }
        let round = counts.iter().sum();
        Ok(Self {
            n_agents,
            n_arms,
            counts,
            reward_sums: flat,
            round,
        })
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn n_arms(&self) -> usize {
        self.n_arms
    }

    /// Rounds completed so far; equals the sum of the pull counts.
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, arm: usize) -> u64 {
        self.counts[arm]
    }

    /// Records one pull of `arm` with the observed per-agent rewards.
    pub fn record(&mut self, arm: usize, rewards: &[f64]) -> Result<()> {
        if arm >= self.n_arms {
            return Err(Error::ArmOutOfRange {
                arm,
                n_arms: self.n_arms,
            });
        }
        if rewards.len() != self.n_agents {
            return Err(Error::DimensionMismatch(format!(
                "{} rewards for {} agents",
                rewards.len(),
                self.n_agents
            )));
        }
        for &r in rewards {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::OutOfRange(format!("reward {r} not in [0, 1]")));
            }
        }
        for (j, &r) in rewards.iter().enumerate() {
            self.reward_sums[j * self.n_arms + arm] += r;
        }
        self.counts[arm] += 1;
        self.round += 1;
        debug_assert_eq!(self.counts.iter().sum::<u64>(), self.round);
        Ok(())
    }

    /// Empirical mean reward of `agent` on `arm`; 0 while the arm is unpulled.
    pub fn empirical_mean(&self, agent: usize, arm: usize) -> f64 {
        let c = self.counts[arm];
        if c == 0 {
            0.0
        } else {
            self.reward_sums[agent * self.n_arms + arm] / c as f64
        }
    }

    /// The full empirical mean matrix (zeros for unpulled arms).
    pub fn empirical_means(&self) -> RewardMatrix {
        let mut values = Vec::with_capacity(self.n_agents * self.n_arms);
        for j in 0..self.n_agents {
            for a in 0..self.n_arms {
                values.push(self.empirical_mean(j, a));
            }
        }
        RewardMatrix {
            n_agents: self.n_agents,
            n_arms: self.n_arms,
            values,
        }
    }
}

/// One row of a regret trace.
#[derive(Clone, Debug)]
pub struct TraceRecord {
    /// 1-based round index.
    pub round: u64,
    /// 0-based arm actually pulled this round.
    pub arm: usize,
    /// Policy the arm was sampled from.
    pub policy: Policy,
    /// `F(π_t, μ*)` for this round.
    pub nsw: f64,
    /// Cumulative regret through this round.
    pub cum_regret: f64,
}

/// Per-round record of an episode together with the instance optimum.
#[derive(Clone, Debug)]
pub struct RegretTrace {
    /// `F(π*, μ*)` of the instance the episode ran on.
    pub opt_nsw: f64,
    pub records: Vec<TraceRecord>,
}

impl RegretTrace {
    /// Cumulative regret at round `t`, if the trace reaches it.
    ///
    /// Records are stored in round order; full traces are indexed directly.
    pub fn cum_regret_at(&self, t: u64) -> Option<f64> {
        if t == 0 {
            return Some(0.0);
        }
        let idx = t as usize - 1;
        if idx < self.records.len() && self.records[idx].round == t {
            return Some(self.records[idx].cum_regret);
        }
        match self.records.binary_search_by_key(&t, |r| r.round) {
            Ok(i) => Some(self.records[i].cum_regret),
            Err(_) => None,
        }
    }

    pub fn final_cum_regret(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.cum_regret)
    }
}

/// Nash social welfare `F(π, μ) = ∏_j ⟨π, μ_j⟩`.
///
/// Always lies in `[0, 1]` for valid inputs.
pub fn nsw(policy: &Policy, mu: &RewardMatrix) -> Result<f64> {
    mu.check_policy_dims(policy)?;
    let mut product = 1.0;
    for j in 0..mu.n_agents {
        let expected: f64 = policy
            .probs
            .iter()
            .zip(mu.row(j))
            .map(|(&p, &m)| p * m)
            .sum();
        product *= expected;
    }
    Ok(product)
}

/// Gradient of `log F(π, μ)` with respect to `π`, in ambient coordinates.
///
/// Component `a` is `Σ_j μ_{j,a} / ⟨π, μ_j⟩`. Errors if any agent has zero
/// expected reward; callers avoid that by clamping `μ` up to [`MEAN_CLAMP`],
/// which makes every `⟨π, μ_j⟩` at least the clamp for `π` on the simplex.
pub fn log_nsw_gradient(policy: &Policy, mu: &RewardMatrix) -> Result<Vec<f64>> {
    mu.check_policy_dims(policy)?;
    let mut grad = vec![0.0; mu.n_arms];
    for j in 0..mu.n_agents {
        let row = mu.row(j);
        let expected: f64 = policy
            .probs
            .iter()
            .zip(row)
            .map(|(&p, &m)| p * m)
            .sum();
        if expected <= 0.0 {
            return Err(Error::ZeroExpectedReward { agent: j });
        }
        let inv = 1.0 / expected;
        for (g, &m) in grad.iter_mut().zip(row) {
            *g += m * inv;
        }
    }
    Ok(grad)
}

/// `F(π*, μ*) − F(π, μ*)` against a precomputed optimum.
///
/// May be slightly negative (at worst `−`[`EPS_OPT`]) because the optimal
/// policy is found numerically.
pub fn instantaneous_regret(opt_nsw: f64, policy: &Policy, mu_star: &RewardMatrix) -> Result<f64> {
    Ok(opt_nsw - nsw(policy, mu_star)?)
}

/// Welfare gap between two matrices and its Lipschitz bound.
///
/// Returns `(gap, bound)` with `gap = |F(π,μ¹) − F(π,μ²)|` and
/// `bound = Σ_j Σ_a π_a |μ¹_{j,a} − μ²_{j,a}|`; the contract is
/// `gap ≤ bound`.
pub fn lipschitz_gap_bound(
    policy: &Policy,
    mu1: &RewardMatrix,
    mu2: &RewardMatrix,
) -> Result<(f64, f64)> {
    mu1.check_same_dims(mu2)?;
    mu1.check_policy_dims(policy)?;
    let gap = (nsw(policy, mu1)? - nsw(policy, mu2)?).abs();
    let mut bound = 0.0;
    for j in 0..mu1.n_agents {
        for (a, &p) in policy.probs.iter().enumerate() {
            bound += p * (mu1.get(j, a) - mu2.get(j, a)).abs();
        }
    }
    Ok((gap, bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn policy(probs: &[f64]) -> Policy {
        Policy::new(probs.to_vec()).unwrap()
    }

    fn matrix(rows: &[&[f64]]) -> RewardMatrix {
        RewardMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn nsw_symmetric_two_agent_case() {
        let mu = matrix(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let v = nsw(&policy(&[0.5, 0.5]), &mu).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn nsw_degenerate_policy_is_direct_product() {
        let mu = matrix(&[&[0.9, 0.2], &[0.8, 0.1]]);
        let v = nsw(&policy(&[1.0, 0.0]), &mu).unwrap();
        assert!((v - 0.72).abs() < 1e-15);
    }

    #[test]
    fn nsw_direct_evaluation() {
        let mu = matrix(&[&[0.4, 0.8], &[1.0, 0.2]]);
        let v = nsw(&policy(&[0.25, 0.75]), &mu).unwrap();
        // (0.25*0.4 + 0.75*0.8) * (0.25*1.0 + 0.75*0.2) = 0.7 * 0.4
        assert!((v - 0.28).abs() < 1e-15);
    }

    #[test]
    fn nsw_rejects_dimension_mismatch() {
        let mu = matrix(&[&[0.4, 0.8]]);
        let err = nsw(&policy(&[1.0, 0.0, 0.0]), &mu).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn gradient_single_agent_quotient() {
        let mu = matrix(&[&[0.5, 1.0]]);
        let g = log_nsw_gradient(&policy(&[0.5, 0.5]), &mu).unwrap();
        assert!((g[0] - 0.5 / 0.75).abs() < 1e-15);
        assert!((g[1] - 1.0 / 0.75).abs() < 1e-15);
    }

    #[test]
    fn gradient_constant_matrix_is_uniform() {
        // Each agent contributes c/⟨π, c·1⟩ = c/c = 1 on the simplex, so the
        // gradient is the constant vector N in every component.
        let c = 0.3;
        let mu = RewardMatrix::from_fn(4, 3, |_, _| c).unwrap();
        let g = log_nsw_gradient(&policy(&[0.2, 0.5, 0.3]), &mu).unwrap();
        for &ga in &g {
            assert!((ga - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_stationary_at_identity_optimum() {
        // log(π₁ π₂) has equal partials at π = (0.5, 0.5): each is 1/0.5 = 2.
        let mu = matrix(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let g = log_nsw_gradient(&policy(&[0.5, 0.5]), &mu).unwrap();
        assert!((g[0] - 2.0).abs() < 1e-15);
        assert!((g[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn gradient_errors_on_zero_expected_reward() {
        let mu = matrix(&[&[0.0, 0.5]]);
        let err = log_nsw_gradient(&policy(&[1.0, 0.0]), &mu).unwrap_err();
        assert!(matches!(err, Error::ZeroExpectedReward { agent: 0 }));
    }

    #[test]
    fn gradient_matches_central_finite_differences() {
        // Independent oracle: evaluate the product formula directly on the
        // perturbed (non-simplex) vectors.
        let log_f = |v: &[f64], mu: &RewardMatrix| -> f64 {
            (0..mu.n_agents())
                .map(|j| {
                    v.iter()
                        .zip(mu.row(j))
                        .map(|(&p, &m)| p * m)
                        .sum::<f64>()
                        .ln()
                })
                .sum()
        };
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let h = 1e-6;
        for _ in 0..1000 {
            let n = rng.random_range(1..=6);
            let k = rng.random_range(2..=6);
            let mu =
                RewardMatrix::from_fn(n, k, |_, _| 0.1 + 0.9 * rng.random::<f64>()).unwrap();
            // Interior point: mix a random draw with uniform mass.
            let raw: Vec<f64> = (0..k).map(|_| 0.1 + rng.random::<f64>()).collect();
            let sum: f64 = raw.iter().sum();
            let pi = policy(&raw.iter().map(|&x| x / sum).collect::<Vec<_>>());
            let grad = log_nsw_gradient(&pi, &mu).unwrap();
            for a in 0..k {
                let mut up = pi.probs().to_vec();
                let mut dn = pi.probs().to_vec();
                up[a] += h;
                dn[a] -= h;
                let fd = (log_f(&up, &mu) - log_f(&dn, &mu)) / (2.0 * h);
                let rel = (grad[a] - fd).abs() / grad[a].abs().max(1e-12);
                assert!(
                    rel < 1e-5,
                    "gradient mismatch: analytic {} vs fd {}",
                    grad[a],
                    fd
                );
            }
        }
    }

    #[test]
    fn regret_examples() {
        let mu = matrix(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let r = instantaneous_regret(0.25, &policy(&[1.0, 0.0]), &mu).unwrap();
        assert!((r - 0.25).abs() < 1e-15);

        // Optimum at π = (1, 0) gives 0.72; uniform gives 0.5 * 0.5 = 0.25.
        let mu = matrix(&[&[0.9, 0.1], &[0.8, 0.2]]);
        let r = instantaneous_regret(0.72, &policy(&[0.5, 0.5]), &mu).unwrap();
        assert!((r - 0.47).abs() < 1e-15);
    }

    #[test]
    fn lipschitz_identity_and_single_agent() {
        let mu = matrix(&[&[0.3, 0.6], &[0.2, 0.9]]);
        let (gap, bound) = lipschitz_gap_bound(&policy(&[0.4, 0.6]), &mu, &mu).unwrap();
        assert_eq!(gap, 0.0);
        assert_eq!(bound, 0.0);

        let mu1 = matrix(&[&[0.7, 0.5]]);
        let mu2 = matrix(&[&[0.4, 0.5]]);
        let (gap, bound) = lipschitz_gap_bound(&policy(&[1.0, 0.0]), &mu1, &mu2).unwrap();
        assert!((gap - 0.3).abs() < 1e-15);
        assert!((bound - 0.3).abs() < 1e-15);
    }

    #[test]
    fn lipschitz_bound_holds_on_random_triples() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let n = rng.random_range(1..=8);
            let k = rng.random_range(1..=8);
            let mu1 = RewardMatrix::from_fn(n, k, |_, _| rng.random()).unwrap();
            let mu2 = RewardMatrix::from_fn(n, k, |_, _| rng.random()).unwrap();
            let raw: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
            let sum: f64 = raw.iter().sum();
            let pi = policy(&raw.iter().map(|&x| x / sum).collect::<Vec<_>>());
            let (gap, bound) = lipschitz_gap_bound(&pi, &mu1, &mu2).unwrap();
            assert!(gap <= bound + 1e-12, "gap {gap} exceeded bound {bound}");
        }
    }

    #[test]
    fn bandit_state_tracks_counts_and_means() {
        let mut state = BanditState::new(2, 3).unwrap();
        state.record(1, &[1.0, 0.0]).unwrap();
        state.record(1, &[1.0, 1.0]).unwrap();
        state.record(0, &[0.0, 1.0]).unwrap();
        assert_eq!(state.round(), 3);
        assert_eq!(state.counts(), &[1, 2, 0]);
        assert!((state.empirical_mean(0, 1) - 1.0).abs() < 1e-15);
        assert!((state.empirical_mean(1, 1) - 0.5).abs() < 1e-15);
        assert_eq!(state.empirical_mean(0, 2), 0.0);
        let means = state.empirical_means();
        assert_eq!(means.n_agents(), 2);
        assert_eq!(means.n_arms(), 3);
    }

    #[test]
    fn bandit_state_rejects_bad_rewards() {
        let mut state = BanditState::new(1, 2).unwrap();
        assert!(state.record(0, &[1.5]).is_err());
        assert!(state.record(2, &[0.5]).is_err());
        assert!(state.record(0, &[0.5, 0.5]).is_err());
    }

    #[test]
    fn from_parts_validates_reward_sums() {
        let state = BanditState::from_parts(vec![2, 1], vec![vec![1.5, 0.5]]).unwrap();
        assert_eq!(state.round(), 3);
        assert!((state.empirical_mean(0, 0) - 0.75).abs() < 1e-15);
        // Sum exceeding the count is impossible for rewards in [0, 1].
        assert!(BanditState::from_parts(vec![1, 1], vec![vec![1.5, 0.5]]).is_err());
    }

    #[test]
    fn policy_validation_and_sampling() {
        assert!(Policy::new(vec![0.5, 0.6]).is_err());
        assert!(Policy::new(vec![-0.1, 1.1]).is_err());
        assert!(Policy::new(vec![]).is_err());
        let v = Policy::vertex(3, 1).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert_eq!(v.sample(&mut rng), 1);
        }
        // Zero-probability arms are never drawn even with ties in the CDF.
        let p = policy(&[0.0, 1.0]);
        for _ in 0..100 {
            assert_eq!(p.sample(&mut rng), 1);
        }
    }

    #[test]
    fn trace_lookup_by_round() {
        let mk = |round, cum| TraceRecord {
            round,
            arm: 0,
            policy: Policy::uniform(2).unwrap(),
            nsw: 0.5,
            cum_regret: cum,
        };
        let trace = RegretTrace {
            opt_nsw: 0.6,
            records: vec![mk(1, 0.1), mk(2, 0.2), mk(3, 0.3)],
        };
        assert_eq!(trace.cum_regret_at(2), Some(0.2));
        assert_eq!(trace.cum_regret_at(4), None);
        assert_eq!(trace.final_cum_regret(), 0.3);

        let strided = RegretTrace {
            opt_nsw: 0.6,
            records: vec![mk(100, 1.0), mk(200, 2.0)],
        };
        assert_eq!(strided.cum_regret_at(200), Some(2.0));
        assert_eq!(strided.cum_regret_at(150), None);
    }

    proptest! {
        #[test]
        fn nsw_stays_in_unit_interval(
            n in 1usize..6,
            k in 1usize..6,
            seed in any::<u64>(),
        ) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mu = RewardMatrix::from_fn(n, k, |_, _| rng.random()).unwrap();
            let raw: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
            let sum: f64 = raw.iter().sum();
            let pi = Policy::new(raw.iter().map(|&x| x / sum).collect()).unwrap();
            let v = nsw(&pi, &mu).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
        }

        #[test]
        fn nsw_monotone_in_means(
            n in 1usize..6,
            k in 1usize..6,
            seed in any::<u64>(),
        ) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let lo = RewardMatrix::from_fn(n, k, |_, _| rng.random()).unwrap();
            let hi = RewardMatrix::from_fn(n, k, |j, a| {
                let v = lo.get(j, a);
                v + (1.0 - v) * rng.random::<f64>()
            })
            .unwrap();
            let raw: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
            let sum: f64 = raw.iter().sum();
            let pi = Policy::new(raw.iter().map(|&x| x / sum).collect()).unwrap();
            prop_assert!(nsw(&pi, &lo).unwrap() <= nsw(&pi, &hi).unwrap() + 1e-15);
        }

        #[test]
        fn nsw_invariant_under_arm_permutation(
            n in 1usize..5,
            k in 2usize..6,
            seed in any::<u64>(),
            rot in 1usize..5,
        ) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mu = RewardMatrix::from_fn(n, k, |_, _| rng.random()).unwrap();
            let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
            let sum: f64 = raw.iter().sum();
            let probs: Vec<f64> = raw.iter().map(|&x| x / sum).collect();
            let rot = rot % k;
            let perm = |a: usize| (a + rot) % k;
            let mu_p = RewardMatrix::from_fn(n, k, |j, a| mu.get(j, perm(a))).unwrap();
            let probs_p: Vec<f64> = (0..k).map(|a| probs[perm(a)]).collect();
            let v1 = nsw(&Policy::new(probs).unwrap(), &mu).unwrap();
            let v2 = nsw(&Policy::new(probs_p).unwrap(), &mu_p).unwrap();
            prop_assert!((v1 - v2).abs() < 1e-12);
        }
    }
}
