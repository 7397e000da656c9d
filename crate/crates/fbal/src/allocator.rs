//! Feedback-bit allocation solvers.
//!
//! Four routes to an allocation, kept deliberately independent of each other
//! so they can cross-check one another:
//!
//! - [`allocate_minmax_exact`] — continuous min-max optimum. The optimum
//!   equalizes the interference of every user that receives bits, so the
//!   solver bisects on that common level `t`, converting each candidate
//!   level into per-user bits through
//!   [`bits_for_interference`](crate::model::bits_for_interference) until the
//!   bits sum to the budget.
//! - [`allocate_lnorm`] — minimizes the L-norm surrogate
//!   `(sum I_k^L)^(1/L)` of the maximum by water-filling: bisection on the
//!   multiplier in its stationarity condition. All multiplier arithmetic is
//!   carried in log2 domain because `gain^L` overflows hardware floats long
//!   before the search becomes interesting.
//! - [`brute_force_minmax`] — exhaustive integer enumeration, used as the
//!   oracle in tests and available behind a size guard.
//! - [`min_bits_for_threshold`] — per-user minimum bits under an
//!   interference cap; closed form, no search.
//!
//! [`round_allocation`] converts a continuous allocation to integers with a
//! budget repair that keeps the min-max objective small.

use crate::error::{Error, Result};
use crate::model::{
    avg_interference, bits_for_interference, distortion, is_non_negative, is_positive,
    AllocationReport, BitAllocation, SolverConfig, SolverTag, SystemParams,
};

/// Diagnostics of one water-filling run.
#[derive(Debug, Clone)]
pub struct WaterfillTrace {
    /// Multiplier of the stationarity condition at termination. Can
    /// overflow to `inf` for extreme gain/L combinations; the log2 form
    /// below is always finite and is what the solver actually works with.
    pub multiplier: f64,
    /// `log2` of the multiplier.
    pub log2_multiplier: f64,
    /// Bisection iterations consumed (bracketing included).
    pub iterations: usize,
    /// Users that received a positive share, ascending.
    pub active_set: Vec<usize>,
    /// `|sum(bits) - budget|` at termination.
    pub residual: f64,
}

/// Result of [`min_bits_for_threshold`]: the integer allocation plus the
/// real-valued requirement it was rounded up from.
#[derive(Debug, Clone)]
pub struct ThresholdAllocation {
    pub report: AllocationReport,
    /// Per-user real-valued bit requirement before rounding up.
    pub unrounded_bits: Vec<f64>,
    /// Sum of the unrounded requirements.
    pub unrounded_total: f64,
}

fn validate_budget(budget: f64) -> Result<()> {
    if !is_non_negative(budget) {
        return Err(Error::InvalidParameter(format!(
            "budget must be non-negative and finite, got {budget}"
        )));
    }
    Ok(())
}

/// Continuous min-max optimal split of `budget` feedback bits.
///
/// At the optimum every user with a positive share sees the same average
/// interference `t*`, and users clamped at zero bits sit below it. The
/// solver bisects on `log2 t`: the total bits needed to push every user down
/// to level `t` is continuous and strictly decreasing in `t`, so the budget
/// constraint pins `t*` uniquely. A final analytic polish on the detected
/// active set sharpens the equalization to machine precision.
///
/// A zero budget short-circuits to the all-zeros allocation whose objective
/// is `max_k P0 * lambda_k * (N-1) / N`.
pub fn allocate_minmax_exact(
    params: &SystemParams,
    budget: f64,
    cfg: &SolverConfig,
) -> Result<AllocationReport> {
    validate_budget(budget)?;
    cfg.validate()?;
    let k = params.num_users();
    let n = params.num_antennas() as f64;
    let p0 = params.tx_power();

    if budget <= 0.0 {
        let alloc = BitAllocation::new(vec![0.0; k], 0.0)?;
        return AllocationReport::from_allocation(params, alloc, SolverTag::ExactMinMax);
    }

    // bits required at level t = 2^u, summed over users
    let bits_at = |u: f64| -> Vec<f64> {
        (0..k)
            .map(|i| {
                bits_for_interference(p0, params.gain(i), u.exp2(), params.num_antennas())
                    .expect("level stays positive inside the bracket")
            })
            .collect()
    };
    let sum_at = |u: f64| -> f64 { bits_at(u).iter().sum() };

    // Bracket in log2 of the interference level. At the zero-bit maximum the
    // required total is 0; pushing the strongest user alone down by
    // budget/(N-1)+1 halvings already needs more than the whole budget.
    let hi = params.max_zero_bit_interference().log2();
    let lo = hi - (budget / (n - 1.0) + 1.0);
    debug_assert!(sum_at(lo) > budget);

    let tol = cfg.bisection_tol * budget.max(1.0);
    let (mut lo, mut hi) = (lo, hi);
    let mut iterations = 0usize;
    let mut u = 0.5 * (lo + hi);
    let mut residual = f64::INFINITY;
    while iterations < cfg.max_iters {
        u = 0.5 * (lo + hi);
        let total = sum_at(u);
        residual = (total - budget).abs();
        if residual <= tol {
            break;
        }
        if total > budget {
            lo = u;
        } else {
            hi = u;
        }
        iterations += 1;
    }
    if residual > tol {
        return Err(Error::NoConvergence {
            iterations,
            residual,
        });
    }

    // Polish: solve the budget equation exactly on the detected active set,
    // keeping the result only if the active set is stable.
    let bits = bits_at(u);
    let active: Vec<usize> = (0..k).filter(|&i| bits[i] > 0.0).collect();
    let bits = if active.is_empty() {
        bits
    } else {
        let score = |i: usize| (p0 * params.gain(i) * (n - 1.0) / n).log2();
        let sum_scores: f64 = active.iter().map(|&i| score(i)).sum();
        let u_star = (sum_scores - budget / (n - 1.0)) / active.len() as f64;
        let polished = bits_at(u_star);
        let same_set = (0..k).all(|i| (polished[i] > 0.0) == active.contains(&i));
        if same_set {
            polished
        } else {
            bits
        }
    };

    let alloc = BitAllocation::new(bits, budget)?;
    AllocationReport::from_allocation(params, alloc, SolverTag::ExactMinMax)
}

/// Water-filling solution of the L-norm surrogate objective.
///
/// Stationarity gives `b_k = (N-1)/L * max(0, L*log2(lambda_k) - m)` where
/// `m` is the log2 multiplier; the budget constraint fixes `m`. Starting
/// from the level at which the weakest user would activate, the solver
/// expands a bracket by doubling steps and then bisects, finishing with an
/// analytic polish on the stable active set.
pub fn allocate_lnorm(
    params: &SystemParams,
    budget: f64,
    cfg: &SolverConfig,
) -> Result<(AllocationReport, WaterfillTrace)> {
    validate_budget(budget)?;
    cfg.validate()?;
    let k = params.num_users();
    let n = params.num_antennas() as f64;
    let l = cfg.l_exponent as f64;

    // per-user scores L*log2(lambda_k); bits are a clamped affine map of them
    let scores: Vec<f64> = params.avg_gains().iter().map(|g| l * g.log2()).collect();
    let weight = (n - 1.0) / l;
    let bits_at =
        |m: f64| -> Vec<f64> { scores.iter().map(|s| weight * (s - m).max(0.0)).collect() };
    let sum_at = |m: f64| -> f64 { bits_at(m).iter().sum() };
    let max_score = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_score = scores.iter().copied().fold(f64::INFINITY, f64::min);

    let trace_for = |m: f64, iterations: usize, bits: &[f64]| WaterfillTrace {
        multiplier: (m + (l / (n - 1.0)).log2()).exp2(),
        log2_multiplier: m + (l / (n - 1.0)).log2(),
        iterations,
        active_set: (0..k).filter(|&i| bits[i] > 0.0).collect(),
        residual: (bits.iter().sum::<f64>() - budget).abs(),
    };

    if budget <= 0.0 {
        let bits = vec![0.0; k];
        let trace = trace_for(max_score, 0, &bits);
        let alloc = BitAllocation::new(bits, 0.0)?;
        let report = AllocationReport::from_allocation(params, alloc, SolverTag::LNormWaterfill)?;
        return Ok((report, trace));
    }

    let mut iterations = 0usize;

    // Bracket the water level: start where the weakest user activates and
    // expand with doubling steps until the budget is straddled.
    let mut lo = min_score; // sum_at(lo) may be above or below budget
    let mut hi = max_score; // sum_at(hi) == 0 <= budget
    if sum_at(lo) <= budget {
        let mut step = 1.0f64;
        hi = lo;
        while sum_at(lo) <= budget {
            hi = lo;
            lo -= step;
            step *= 2.0;
            iterations += 1;
            if iterations > cfg.max_iters {
                return Err(Error::NoConvergence {
                    iterations,
                    residual: (sum_at(lo) - budget).abs(),
                });
            }
        }
    }

    let tol = cfg.bisection_tol * budget.max(1.0);
    let mut m = 0.5 * (lo + hi);
    let mut residual = f64::INFINITY;
    while iterations < cfg.max_iters {
        m = 0.5 * (lo + hi);
        let total = sum_at(m);
        residual = (total - budget).abs();
        if residual <= tol {
            break;
        }
        if total > budget {
            lo = m;
        } else {
            hi = m;
        }
        iterations += 1;
    }
    if residual > tol {
        return Err(Error::NoConvergence {
            iterations,
            residual,
        });
    }

    // Analytic polish on the stable active set.
    let bits = bits_at(m);
    let active: Vec<usize> = (0..k).filter(|&i| bits[i] > 0.0).collect();
    let (bits, m) = if active.is_empty() {
        (bits, m)
    } else {
        let sum_scores: f64 = active.iter().map(|&i| scores[i]).sum();
        let m_star = (sum_scores - budget / weight) / active.len() as f64;
        let polished = bits_at(m_star);
        let same_set = (0..k).all(|i| (polished[i] > 0.0) == active.contains(&i));
        if same_set {
            (polished, m_star)
        } else {
            (bits, m)
        }
    };

    let trace = trace_for(m, iterations, &bits);
    let alloc = BitAllocation::new(bits, budget)?;
    let report = AllocationReport::from_allocation(params, alloc, SolverTag::LNormWaterfill)?;
    Ok((report, trace))
}

/// Round a continuous allocation to integers without exceeding `budget`.
///
/// Entries are rounded half-up first. If the rounded total overshoots the
/// budget, the entry whose decrement leaves the smallest maximum
/// interference is decremented (ties prefer the highest index, which keeps
/// bits on stronger users under the usual descending-gain ordering); if it
/// undershoots, the user currently suffering the largest interference gets
/// the spare bit (ties prefer the lowest index).
pub fn round_allocation(
    params: &SystemParams,
    alloc: &BitAllocation,
    budget: u64,
) -> Result<AllocationReport> {
    if alloc.num_users() != params.num_users() {
        return Err(Error::Dimension(format!(
            "allocation has {} entries for {} users",
            alloc.num_users(),
            params.num_users()
        )));
    }
    let k = params.num_users();
    let n = params.num_antennas();
    let p0 = params.tx_power();
    let interference = |user: usize, bits: u64| -> f64 {
        avg_interference(p0, params.gain(user), distortion(bits as f64, n).unwrap()).unwrap()
    };
    let max_over = |bits: &[u64]| -> f64 {
        bits.iter()
            .enumerate()
            .map(|(i, &b)| interference(i, b))
            .fold(f64::NEG_INFINITY, f64::max)
    };

    // f64::round is half away from zero, i.e. half-up for non-negatives
    let mut bits: Vec<u64> = alloc.bits().iter().map(|b| b.round() as u64).collect();
    let mut total: u64 = bits.iter().sum();

    while total > budget {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..k {
            if bits[i] == 0 {
                continue;
            }
            bits[i] -= 1;
            let cand = max_over(&bits);
            bits[i] += 1;
            // <= lets a later index win ties
            if best.is_none_or(|(_, m)| cand <= m) {
                best = Some((i, cand));
            }
        }
        let (i, _) = best.expect("total > budget >= 0 implies a positive entry");
        bits[i] -= 1;
        total -= 1;
    }

    while total < budget {
        let mut worst = 0usize;
        let mut worst_val = f64::NEG_INFINITY;
        for (i, &b) in bits.iter().enumerate() {
            let v = interference(i, b);
            if v > worst_val {
                worst_val = v;
                worst = i;
            }
        }
        bits[worst] += 1;
        total += 1;
    }

    let alloc = BitAllocation::new(bits.iter().map(|&b| b as f64).collect(), budget as f64)?;
    AllocationReport::from_allocation(params, alloc, SolverTag::ExactMinMax)
}

/// Number of ways to split at most `budget` bits over `k` users,
/// i.e. `C(budget + k, k)`, saturating at `u64::MAX`.
fn composition_count(budget: u64, k: u64) -> u64 {
    let mut acc: u128 = 1;
    for j in 1..=k {
        acc = acc * (budget as u128 + j as u128) / j as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

const BRUTE_FORCE_GUARD: u64 = 10_000_000;

/// Exhaustive integer min-max oracle.
///
/// Enumerates every integer allocation with `sum <= budget` and returns one
/// minimizing the maximum interference; among optima the lexicographically
/// largest bits vector wins, so equal-gain ties resolve towards low-index
/// users deterministically. Refuses instances with more than `10^7`
/// candidate allocations.
pub fn brute_force_minmax(params: &SystemParams, budget: u64) -> Result<AllocationReport> {
    let k = params.num_users();
    let count = composition_count(budget, k as u64);
    if count > BRUTE_FORCE_GUARD {
        return Err(Error::TooLarge(format!(
            "{count} candidate allocations exceed the enumeration guard of {BRUTE_FORCE_GUARD}"
        )));
    }
    let n = params.num_antennas();
    let p0 = params.tx_power();
    // interference lookup per user and bit count
    let table: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..=budget)
                .map(|b| {
                    avg_interference(p0, params.gain(i), distortion(b as f64, n).unwrap()).unwrap()
                })
                .collect()
        })
        .collect();

    struct Search<'a> {
        table: &'a [Vec<f64>],
        budget: u64,
        best_max: f64,
        best_bits: Vec<u64>,
        current: Vec<u64>,
    }

    impl Search<'_> {
        fn recurse(&mut self, user: usize, spent: u64, running_max: f64) {
            // a deeper assignment can only raise the maximum
            if running_max > self.best_max {
                return;
            }
            if user == self.table.len() {
                let better = running_max < self.best_max
                    || (running_max == self.best_max && self.current > self.best_bits);
                if better {
                    self.best_max = running_max;
                    self.best_bits = self.current.clone();
                }
                return;
            }
            for b in 0..=(self.budget - spent) {
                self.current[user] = b;
                let m = running_max.max(self.table[user][b as usize]);
                self.recurse(user + 1, spent + b, m);
            }
            self.current[user] = 0;
        }
    }

    let mut search = Search {
        table: &table,
        budget,
        best_max: f64::INFINITY,
        best_bits: vec![0; k],
        current: vec![0; k],
    };
    search.recurse(0, 0, f64::NEG_INFINITY);

    let alloc = BitAllocation::new(
        search.best_bits.iter().map(|&b| b as f64).collect(),
        budget as f64,
    )?;
    AllocationReport::from_allocation(params, alloc, SolverTag::BruteForce)
}

/// Fewest integer bits per user keeping every user's average interference
/// at or below `threshold`.
///
/// Each user's requirement is independent: the real-valued bound from
/// [`bits_for_interference`] rounded up. Removing one bit from any user with
/// a positive count pushes that user back above the threshold.
pub fn min_bits_for_threshold(
    params: &SystemParams,
    threshold: f64,
) -> Result<ThresholdAllocation> {
    if !is_positive(threshold) {
        return Err(Error::InvalidParameter(format!(
            "threshold must be positive and finite, got {threshold}"
        )));
    }
    let k = params.num_users();
    let mut unrounded = Vec::with_capacity(k);
    let mut bits = Vec::with_capacity(k);
    for i in 0..k {
        let need = bits_for_interference(
            params.tx_power(),
            params.gain(i),
            threshold,
            params.num_antennas(),
        )?;
        unrounded.push(need);
        bits.push(need.ceil());
    }
    let unrounded_total = unrounded.iter().sum();
    let total: f64 = bits.iter().sum();
    let alloc = BitAllocation::new(bits, total)?;
    let report = AllocationReport::from_allocation(params, alloc, SolverTag::ThresholdMin)?;
    Ok(ThresholdAllocation {
        report,
        unrounded_bits: unrounded,
        unrounded_total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::asymptotic_minmax;
    use proptest::prelude::*;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
    }

    fn params(n: usize, gains: &[f64]) -> SystemParams {
        SystemParams::new(n, 1.0, gains.to_vec()).unwrap()
    }

    #[test]
    fn exact_two_user_instance() {
        // (N-1)*log2(4/1) = 4 is integral, so the continuous optimum lands
        // on integers and the brute-force oracle must agree exactly.
        let p = params(3, &[4.0, 1.0]);
        let cfg = SolverConfig::default();
        let r = allocate_minmax_exact(&p, 6.0, &cfg).unwrap();
        assert!(rel_close(r.bits()[0], 5.0, 1e-9), "{:?}", r.bits());
        assert!(rel_close(r.bits()[1], 1.0, 1e-9), "{:?}", r.bits());
        let expect = (2.0 / 3.0) * 4.0 * 2f64.powf(-2.5);
        assert!(rel_close(r.max_interference(), expect, 1e-9));
        assert!((r.max_interference() - 0.4714).abs() < 1e-4);

        let oracle = brute_force_minmax(&p, 6).unwrap();
        assert_eq!(oracle.bits(), &[5.0, 1.0]);
        assert!(rel_close(oracle.max_interference(), expect, 1e-12));
    }

    #[test]
    fn exact_equal_gains_split_evenly() {
        for c in [0.5, 1.0, 42.0] {
            let p = params(4, &[c, c, c]);
            let r = allocate_minmax_exact(&p, 9.0, &SolverConfig::default()).unwrap();
            for &b in r.bits() {
                assert!(rel_close(b, 3.0, 1e-9), "{:?}", r.bits());
            }
        }
    }

    #[test]
    fn exact_zero_budget() {
        let p = params(4, &[100.0, 10.0, 1.0]);
        let r = allocate_minmax_exact(&p, 0.0, &SolverConfig::default()).unwrap();
        assert_eq!(r.bits(), &[0.0, 0.0, 0.0]);
        assert_eq!(r.max_interference(), 75.0);
    }

    #[test]
    fn exact_equalizes_active_users() {
        let p = params(4, &[100.0, 10.0, 1.0]);
        let r = allocate_minmax_exact(&p, 18.0, &SolverConfig::default()).unwrap();
        let m = r.max_interference();
        for (i, &b) in r.bits().iter().enumerate() {
            if b > 0.0 {
                assert!(
                    rel_close(r.per_user_interference()[i], m, 1e-6),
                    "user {i} not equalized: {} vs {m}",
                    r.per_user_interference()[i]
                );
            } else {
                assert!(r.per_user_interference()[i] <= m * (1.0 + 1e-9));
            }
        }
        assert!(rel_close(r.allocation().total(), 18.0, 1e-8));
    }

    #[test]
    fn exact_matches_asymptote_once_all_active() {
        let p = params(4, &[100.0, 10.0, 1.0]);
        // all users active well past B ~ K(N-1)*log2 spread
        for budget in [40.0, 45.0, 60.0] {
            let r = allocate_minmax_exact(&p, budget, &SolverConfig::default()).unwrap();
            assert!(
                r.bits().iter().all(|&b| b > 0.0),
                "{budget}: {:?}",
                r.bits()
            );
            let a = asymptotic_minmax(&p, budget).unwrap();
            assert!(
                rel_close(r.max_interference(), a, 1e-9),
                "B={budget}: {} vs {a}",
                r.max_interference()
            );
        }
    }

    #[test]
    fn lnorm_equal_gains_any_exponent() {
        for l in [1u32, 2, 7, 100] {
            let cfg = SolverConfig {
                l_exponent: l,
                ..SolverConfig::default()
            };
            let p = params(4, &[3.0, 3.0, 3.0]);
            let (r, trace) = allocate_lnorm(&p, 9.0, &cfg).unwrap();
            for &b in r.bits() {
                assert!(rel_close(b, 3.0, 1e-9), "L={l}: {:?}", r.bits());
            }
            assert_eq!(trace.active_set, vec![0, 1, 2]);
            assert!(trace.residual <= cfg.bisection_tol * 9.0);
        }
    }

    #[test]
    fn lnorm_close_to_exact() {
        let cfg = SolverConfig::default();
        let p = params(3, &[4.0, 1.0]);
        let (r, _) = allocate_lnorm(&p, 6.0, &cfg).unwrap();
        assert!((r.bits()[0] - 5.0).abs() < 0.05, "{:?}", r.bits());
        assert!((r.bits()[1] - 1.0).abs() < 0.05, "{:?}", r.bits());

        let p = params(4, &[100.0, 10.0, 1.0]);
        let exact = allocate_minmax_exact(&p, 18.0, &cfg).unwrap();
        let (sub, trace) = allocate_lnorm(&p, 18.0, &cfg).unwrap();
        let gap =
            (sub.max_interference() - exact.max_interference()).abs() / exact.max_interference();
        assert!(gap <= 0.02, "surrogate off by {gap}");
        assert!(trace.multiplier > 0.0);
        assert!(trace.log2_multiplier.is_finite());
    }

    #[test]
    fn lnorm_more_gain_more_bits() {
        let p = params(4, &[100.0, 10.0, 1.0]);
        let (r, _) = allocate_lnorm(&p, 11.0, &SolverConfig::default()).unwrap();
        assert!(r.bits()[0] >= r.bits()[1] && r.bits()[1] >= r.bits()[2]);
    }

    #[test]
    fn lnorm_objective_non_increasing_in_exponent() {
        let p = params(4, &[100.0, 10.0, 1.0]);
        let mut prev = f64::INFINITY;
        for l in [1u32, 2, 5, 10, 50, 100] {
            let cfg = SolverConfig {
                l_exponent: l,
                ..SolverConfig::default()
            };
            let (r, _) = allocate_lnorm(&p, 14.0, &cfg).unwrap();
            assert!(
                r.max_interference() <= prev * (1.0 + 1e-9),
                "L={l}: {} after {prev}",
                r.max_interference()
            );
            prev = r.max_interference();
        }
        let exact = allocate_minmax_exact(&p, 14.0, &SolverConfig::default()).unwrap();
        assert!(prev >= exact.max_interference() * (1.0 - 1e-9));
    }

    #[test]
    fn rounding_no_repair_needed() {
        let p = params(3, &[2.0, 2.0]);
        let a = BitAllocation::new(vec![2.4, 3.6], 6.0).unwrap();
        let r = round_allocation(&p, &a, 6).unwrap();
        assert_eq!(r.bits(), &[2.0, 4.0]);
    }

    #[test]
    fn rounding_overshoot_repair() {
        // Half-up turns [2.5, 2.5, 1.0] into [3, 3, 1] with sum 7 > 6; the
        // repair must drop one bit where the maximum suffers least. Either
        // tied candidate leaves max = I(1 bit); the high-index tie rule
        // picks user 1.
        let p = params(4, &[1.0, 1.0, 1.0]);
        let a = BitAllocation::new(vec![2.5, 2.5, 1.0], 6.0).unwrap();
        let r = round_allocation(&p, &a, 6).unwrap();
        assert_eq!(r.bits(), &[3.0, 2.0, 1.0]);

        // brute-force over single-decrement repairs confirms optimality
        let candidates = [[2u64, 3, 1], [3, 2, 1], [3, 3, 0]];
        let best = candidates
            .iter()
            .map(|c| {
                c.iter()
                    .enumerate()
                    .map(|(i, &b)| {
                        avg_interference(1.0, p.gain(i), distortion(b as f64, 4).unwrap()).unwrap()
                    })
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .fold(f64::INFINITY, f64::min);
        assert!(rel_close(r.max_interference(), best, 1e-12));
    }

    #[test]
    fn rounding_zero_budget() {
        let p = params(4, &[1.0, 1.0, 1.0]);
        let a = BitAllocation::new(vec![0.2, 0.2, 0.2], 0.6).unwrap();
        let r = round_allocation(&p, &a, 0).unwrap();
        assert_eq!(r.bits(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn rounding_undershoot_tops_up() {
        let p = params(4, &[100.0, 10.0, 1.0]);
        let a = BitAllocation::new(vec![2.4, 2.4, 1.2], 6.0).unwrap();
        let r = round_allocation(&p, &a, 6).unwrap();
        assert_eq!(r.allocation().total(), 6.0);
        assert!(r.allocation().is_integer());
    }

    #[test]
    fn brute_force_known_instances() {
        let p = params(3, &[4.0, 1.0]);
        let r = brute_force_minmax(&p, 6).unwrap();
        assert_eq!(r.bits(), &[5.0, 1.0]);

        let p = params(4, &[7.0]);
        let r = brute_force_minmax(&p, 5).unwrap();
        assert_eq!(r.bits(), &[5.0]);

        // equal gains tie: the lexicographically largest optimum wins
        let p = params(2, &[1.0, 1.0]);
        let r = brute_force_minmax(&p, 5).unwrap();
        assert_eq!(r.bits(), &[3.0, 2.0]);
    }

    #[test]
    fn brute_force_guard() {
        let p = params(4, &[1.0, 2.0, 3.0, 4.0]);
        let err = brute_force_minmax(&p, 200).unwrap_err();
        assert!(matches!(err, Error::TooLarge(_)), "{err}");
    }

    #[test]
    fn threshold_known_instance() {
        let p = params(3, &[100.0]);
        let t = min_bits_for_threshold(&p, 2.0 / 3.0).unwrap();
        assert_eq!(t.report.bits(), &[14.0]);
        assert!(rel_close(t.unrounded_total, 2.0 * 100f64.log2(), 1e-12));
        assert!((t.unrounded_total - 13.2877).abs() < 1e-4);
    }

    #[test]
    fn threshold_generous_cap_needs_nothing() {
        let p = params(4, &[100.0, 10.0, 1.0]);
        let t = min_bits_for_threshold(&p, 80.0).unwrap();
        assert_eq!(t.report.bits(), &[0.0, 0.0, 0.0]);
        assert_eq!(t.unrounded_total, 0.0);
    }

    #[test]
    fn threshold_meets_cap_and_is_minimal() {
        let p = params(4, &[100.0, 10.0, 1.0]);
        let cap = 0.1;
        let t = min_bits_for_threshold(&p, cap).unwrap();
        for (i, &b) in t.report.bits().iter().enumerate() {
            assert!(
                t.report.per_user_interference()[i] <= cap * (1.0 + 1e-12),
                "user {i} exceeds the cap"
            );
            if b > 0.0 {
                let relaxed =
                    avg_interference(1.0, p.gain(i), distortion(b - 1.0, 4).unwrap()).unwrap();
                assert!(relaxed > cap, "user {i} had a spare bit");
            }
        }
    }

    #[test]
    fn threshold_halving_adds_n_minus_one_per_active_user() {
        let p = params(4, &[100.0, 10.0, 1.0]);
        let cap = 0.05; // all users active at this cap and below
        let a = min_bits_for_threshold(&p, cap).unwrap();
        let b = min_bits_for_threshold(&p, cap / 2.0).unwrap();
        for i in 0..3 {
            let diff = b.unrounded_bits[i] - a.unrounded_bits[i];
            assert!(rel_close(diff, 3.0, 1e-9), "user {i}: {diff}");
        }
    }

    #[test]
    fn threshold_rejects_bad_input() {
        let p = params(4, &[1.0]);
        assert!(min_bits_for_threshold(&p, 0.0).is_err());
        assert!(min_bits_for_threshold(&p, -1.0).is_err());
    }

    #[test]
    fn composition_count_values() {
        assert_eq!(composition_count(5, 2), 21); // C(7,2)
        assert_eq!(composition_count(20, 3), 1771); // C(23,3)
        assert!(composition_count(200, 4) > BRUTE_FORCE_GUARD);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rounded_exact_within_one_bit_of_oracle(
            n in 3usize..6,
            budget in 0u64..14,
            g0 in 1u32..100,
            g1 in 1u32..100,
            g2 in 1u32..100,
        ) {
            let p = params(n, &[g0 as f64, g1 as f64, g2 as f64]);
            let cont = allocate_minmax_exact(&p, budget as f64, &SolverConfig::default()).unwrap();
            let rounded = round_allocation(&p, cont.allocation(), budget).unwrap();
            let oracle = brute_force_minmax(&p, budget).unwrap();
            prop_assert!(rounded.max_interference() >= oracle.max_interference() * (1.0 - 1e-12));
            let bound = oracle.max_interference() * (1.0f64 / (n as f64 - 1.0)).exp2();
            prop_assert!(
                rounded.max_interference() <= bound * (1.0 + 1e-12),
                "rounded {} vs oracle bound {}",
                rounded.max_interference(),
                bound
            );
        }

        #[test]
        fn solvers_respect_gain_ordering(
            budget in 0.0f64..30.0,
            gains in proptest::collection::vec(0.01f64..1000.0, 1..5),
            n in 2usize..9,
        ) {
            let p = params(n, &gains);
            let cfg = SolverConfig::default();
            for bits in [
                allocate_minmax_exact(&p, budget, &cfg).unwrap().bits().to_vec(),
                allocate_lnorm(&p, budget, &cfg).unwrap().0.bits().to_vec(),
            ] {
                for i in 0..gains.len() {
                    for j in 0..gains.len() {
                        if gains[i] > gains[j] {
                            prop_assert!(
                                bits[i] >= bits[j] - 1e-9,
                                "gains {:?} bits {:?}",
                                gains,
                                bits
                            );
                        }
                    }
                }
            }
        }
    }
}
