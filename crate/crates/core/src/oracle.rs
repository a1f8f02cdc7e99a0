//! Brute-force references used by the test suite.
//!
//! The lattice search evaluates the welfare product with its own inline
//! arithmetic — it shares no gradient or ascent code with the optimizer, so
//! the two routes check each other. Restricted to `K ≤ 3`; the hardness the
//! oracle guards against lives in the objective shape, not the dimension.

use crate::error::{Error, Result};
use crate::optimizer::HalfSpace;
use crate::welfare::{Policy, RewardMatrix};

/// Hard cap on lattice size.
const MAX_GRID_POINTS: u64 = 10_000_000;

/// Exhaustive NSW maximization over the simplex lattice with the given
/// spacing. Ties resolve to the lexicographically smallest grid point.
pub fn grid_optimal_policy(mu: &RewardMatrix, resolution: f64) -> Result<(Policy, f64)> {
    let best = search(mu, None, None, resolution)?;
    // The unconstrained lattice always contains feasible points.
    let (policy, objective) = best.expect("unconstrained grid is nonempty");
    Ok((policy, objective))
}

/// Lattice search for `F(π, μ) + bonus·π` restricted to a half-space.
///
/// Returns `None` when no lattice point satisfies the constraint.
pub fn grid_optimal_constrained(
    mu: &RewardMatrix,
    bonus: &[f64],
    h: &HalfSpace,
    resolution: f64,
) -> Result<Option<(Policy, f64)>> {
    if bonus.len() != mu.n_arms() {
        return Err(Error::DimensionMismatch(format!(
            "bonus has {} entries for {} arms",
            bonus.len(),
            mu.n_arms()
        )));
    }
    if h.normal().len() != mu.n_arms() {
        return Err(Error::DimensionMismatch(format!(
            "half-space has {} entries for {} arms",
            h.normal().len(),
            mu.n_arms()
        )));
    }
    search(mu, Some(bonus), Some(h), resolution)
}

fn search(
    mu: &RewardMatrix,
    bonus: Option<&[f64]>,
    h: Option<&HalfSpace>,
    resolution: f64,
) -> Result<Option<(Policy, f64)>> {
    let k = mu.n_arms();
    if k > 3 {
        return Err(Error::InvalidConfig {
            field: "n_arms",
            reason: format!("grid oracle supports at most 3 arms, got {k}"),
        });
    }
    if !(resolution > 0.0 && resolution <= 1.0) {
        return Err(Error::InvalidConfig {
            field: "resolution",
            reason: format!("{resolution} is not in (0, 1]"),
        });
    }
    let m = (1.0 / resolution).round() as u64;
    let points = (m + 1).pow(k.saturating_sub(1) as u32);
    if points > MAX_GRID_POINTS {
        return Err(Error::GridTooLarge {
            points,
            limit: MAX_GRID_POINTS,
        });
    }

    // Objective evaluated inline: product of per-agent expected rewards,
    // plus the linear bonus when present.
    let eval = |pi: &[f64]| -> f64 {
        let mut value = 1.0;
        for j in 0..mu.n_agents() {
            let mut expected = 0.0;
            for (a, &p) in pi.iter().enumerate() {
                expected += p * mu.get(j, a);
            }
            value *= expected;
        }
        if let Some(b) = bonus {
            for (a, &p) in pi.iter().enumerate() {
                value += b[a] * p;
            }
        }
        value
    };
    let feasible = |pi: &[f64]| -> bool {
        match h {
            Some(h) => h.dot(pi) <= h.offset() + 1e-12,
            None => true,
        }
    };

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut consider = |pi: Vec<f64>| {
        if !feasible(&pi) {
            return;
        }
        let v = eval(&pi);
        // Strict improvement keeps the first (lexicographically smallest)
        // maximizer, since points are visited in lexicographic order.
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((pi, v));
        }
    };

    let mf = m as f64;
    match k {
        1 => consider(vec![1.0]),
        2 => {
            for i in 0..=m {
                let p0 = i as f64 / mf;
                consider(vec![p0, 1.0 - p0]);
            }
        }
        _ => {
            for i in 0..=m {
                let p0 = i as f64 / mf;
                for jj in 0..=(m - i) {
                    let p1 = jj as f64 / mf;
                    let p2 = (m - i - jj) as f64 / mf;
                    consider(vec![p0, p1, p2]);
                }
            }
        }
    }

    match best {
        Some((pi, v)) => Ok(Some((Policy::new(pi)?, v))),
        None => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::{maximize_log_nsw, TerminationRule};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn matrix(rows: &[&[f64]]) -> RewardMatrix {
        RewardMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn grid_symmetric_instance() {
        let mu = matrix(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let (p, v) = grid_optimal_policy(&mu, 1e-3).unwrap();
        assert!((p.probs()[0] - 0.5).abs() < 1e-12);
        assert!((v - 0.25).abs() < 1e-12);
    }

    #[test]
    fn grid_vertex_instance() {
        let mu = matrix(&[&[0.9, 0.1], &[0.8, 0.2]]);
        let (p, v) = grid_optimal_policy(&mu, 1e-3).unwrap();
        assert!((p.probs()[0] - 1.0).abs() < 1e-12);
        assert!((v - 0.72).abs() < 1e-12);
    }

    #[test]
    fn grid_three_arms_and_size_limit() {
        let mu = matrix(&[&[0.2, 0.9, 0.4]]);
        let (p, v) = grid_optimal_policy(&mu, 1e-2).unwrap();
        assert!((p.probs()[1] - 1.0).abs() < 1e-12);
        assert!((v - 0.9).abs() < 1e-12);

        assert!(matches!(
            grid_optimal_policy(&mu, 1e-4),
            Err(Error::GridTooLarge { .. })
        ));
        let wide = RewardMatrix::from_fn(1, 4, |_, _| 0.5).unwrap();
        assert!(grid_optimal_policy(&wide, 0.5).is_err());
    }

    #[test]
    fn grid_ties_pick_lexicographically_smallest() {
        // Constant matrix: every lattice point ties; (0, 1) comes first.
        let mu = matrix(&[&[0.5, 0.5]]);
        let (p, _) = grid_optimal_policy(&mu, 0.25).unwrap();
        assert_eq!(p.probs()[0], 0.0);
        assert_eq!(p.probs()[1], 1.0);
    }

    #[test]
    fn constrained_degenerate_parameters_match_unconstrained() {
        let mu = matrix(&[&[0.9, 0.1], &[0.8, 0.2]]);
        let slack = HalfSpace::new(vec![0.1, 0.1], 2.0).unwrap();
        let (p0, v0) = grid_optimal_policy(&mu, 1e-3).unwrap();
        let (p1, v1) = grid_optimal_constrained(&mu, &[0.0, 0.0], &slack, 1e-3)
            .unwrap()
            .unwrap();
        assert_eq!(p0.probs(), p1.probs());
        assert_eq!(v0, v1);
    }

    #[test]
    fn constrained_forced_vertex_and_infeasible() {
        let mu = matrix(&[&[0.9, 0.1], &[0.8, 0.2]]);
        // Only the second vertex satisfies 3π₁ ≤ 0.0005 on the lattice.
        let h = HalfSpace::new(vec![3.0, 0.0], 5e-4).unwrap();
        let (p, _) = grid_optimal_constrained(&mu, &[0.0, 0.0], &h, 1e-3)
            .unwrap()
            .unwrap();
        assert_eq!(p.probs(), &[0.0, 1.0]);

        let h = HalfSpace::new(vec![3.0, 2.0], 1.0).unwrap();
        assert!(grid_optimal_constrained(&mu, &[0.0, 0.0], &h, 1e-3)
            .unwrap()
            .is_none());
    }

    #[test]
    fn grid_and_pga_dominate_each_other_within_tolerance() {
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        let rule = TerminationRule::new(1e-10, 50, 200_000).unwrap();
        for _ in 0..25 {
            let n = rng.random_range(1..=5);
            let mu = RewardMatrix::from_fn(n, 2, |_, _| {
                (1.0 - (-(1.0 - rng.random::<f64>()).ln()) * 0.04).max(0.1)
            })
            .unwrap();
            let (_, grid_v) = grid_optimal_policy(&mu, 1e-3).unwrap();
            let (_, pga_v) = maximize_log_nsw(&mu, &rule, 0.1).unwrap();
            assert!(grid_v >= pga_v - 1e-3);
            assert!(pga_v >= grid_v - 1e-3);
        }
    }
}
