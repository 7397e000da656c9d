//! Closed-form interference model and shared domain types.
//!
//! A multi-antenna transmitter nulls its beam against quantized channel
//! directions fed back by `K` receivers. With `b` feedback bits, the
//! spherical-cap cell model puts the expected squared quantization error at
//!
//! ```text
//! delta(b, N) = (N - 1) / N * 2^(-b / (N - 1))
//! ```
//!
//! and the resulting average leakage power towards a receiver with average
//! channel gain `lambda` is `P0 * lambda * delta(b, N)`. Everything in this
//! module is a pure function of its arguments; gains and powers are linear
//! (never dB).

use crate::error::{Error, Result};

/// Finite and strictly positive (false for NaN).
pub(crate) fn is_positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

/// Finite and non-negative (false for NaN).
pub(crate) fn is_non_negative(x: f64) -> bool {
    x.is_finite() && x >= 0.0
}

/// Physical description of one scenario: antenna count, transmit power and
/// the per-receiver average channel gains.
///
/// Invariants are enforced on construction: `N >= 2`, `P0 > 0`, at least one
/// gain and every gain positive. The Monte Carlo simulator additionally
/// requires `N >= K + 1` (checked there, not here — the closed-form side is
/// meaningful for any `N >= 2`).
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    num_antennas: usize,
    tx_power: f64,
    avg_gains: Vec<f64>,
}

impl SystemParams {
    pub fn new(num_antennas: usize, tx_power: f64, avg_gains: Vec<f64>) -> Result<Self> {
        if num_antennas < 2 {
            return Err(Error::InvalidParameter(format!(
                "num_antennas must be >= 2, got {num_antennas}"
            )));
        }
        if !is_positive(tx_power) {
            return Err(Error::InvalidParameter(format!(
                "tx_power must be positive and finite, got {tx_power}"
            )));
        }
        if avg_gains.is_empty() {
            return Err(Error::InvalidParameter(
                "avg_gains must contain at least one entry".into(),
            ));
        }
        for (k, &g) in avg_gains.iter().enumerate() {
            if !is_positive(g) {
                return Err(Error::InvalidParameter(format!(
                    "avg_gains[{k}] must be positive and finite, got {g}"
                )));
            }
        }
        Ok(Self {
            num_antennas,
            tx_power,
            avg_gains,
        })
    }

    pub fn num_antennas(&self) -> usize {
        self.num_antennas
    }

    /// Number of receivers `K` (one gain per receiver).
    pub fn num_users(&self) -> usize {
        self.avg_gains.len()
    }

    pub fn tx_power(&self) -> f64 {
        self.tx_power
    }

    pub fn avg_gains(&self) -> &[f64] {
        &self.avg_gains
    }

    pub fn gain(&self, user: usize) -> f64 {
        self.avg_gains[user]
    }

    /// Average interference at user `k` when it gets zero feedback bits:
    /// `P0 * lambda_k * (N - 1) / N`.
    pub fn zero_bit_interference(&self, user: usize) -> f64 {
        let n = self.num_antennas as f64;
        self.tx_power * self.avg_gains[user] * (n - 1.0) / n
    }

    /// Largest zero-bit interference over all users. This is the min-max
    /// objective value of the empty-budget allocation and an upper bracket
    /// for any equalized interference level.
    pub fn max_zero_bit_interference(&self) -> f64 {
        (0..self.num_users())
            .map(|k| self.zero_bit_interference(k))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A per-user feedback-bit split together with the budget it was drawn from.
///
/// Entries are non-negative reals; integer allocations are the special case
/// where every entry is integral. `sum(bits) <= budget` is enforced with a
/// `1e-9` slack for real allocations and exactly for integer ones.
#[derive(Debug, Clone, PartialEq)]
pub struct BitAllocation {
    bits: Vec<f64>,
    budget: f64,
}

/// Absolute slack allowed between `sum(bits)` and `budget` for real-valued
/// allocations.
pub const REAL_BUDGET_SLACK: f64 = 1e-9;

impl BitAllocation {
    pub fn new(bits: Vec<f64>, budget: f64) -> Result<Self> {
        if !is_non_negative(budget) {
            return Err(Error::InvalidParameter(format!(
                "budget must be non-negative and finite, got {budget}"
            )));
        }
        let mut integral = true;
        for (k, &b) in bits.iter().enumerate() {
            if !is_non_negative(b) {
                return Err(Error::InvalidParameter(format!(
                    "bits[{k}] must be non-negative and finite, got {b}"
                )));
            }
            integral &= b.fract() == 0.0;
        }
        let total: f64 = bits.iter().sum();
        let slack = if integral && budget.fract() == 0.0 {
            0.0
        } else {
            REAL_BUDGET_SLACK
        };
        if total > budget + slack {
            return Err(Error::InvalidParameter(format!(
                "bits sum to {total} which exceeds the budget {budget}"
            )));
        }
        Ok(Self { bits, budget })
    }

    pub fn bits(&self) -> &[f64] {
        &self.bits
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn total(&self) -> f64 {
        self.bits.iter().sum()
    }

    pub fn num_users(&self) -> usize {
        self.bits.len()
    }

    /// True when every entry is an integer.
    pub fn is_integer(&self) -> bool {
        self.bits.iter().all(|b| b.fract() == 0.0)
    }

    /// Integer view of the entries; errors when the allocation is not
    /// integer-valued.
    pub fn integer_bits(&self) -> Result<Vec<u64>> {
        if !self.is_integer() {
            return Err(Error::InvalidParameter(
                "allocation is not integer-valued".into(),
            ));
        }
        Ok(self.bits.iter().map(|&b| b as u64).collect())
    }
}

/// Which solver produced an [`AllocationReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverTag {
    /// Continuous min-max optimum found by bisecting the common
    /// interference level.
    ExactMinMax,
    /// L-norm surrogate solved by water-filling on the multiplier.
    LNormWaterfill,
    /// Exhaustive integer search.
    BruteForce,
    /// Per-user minimum bits under an interference cap.
    ThresholdMin,
}

impl SolverTag {
    /// Short stable name used in CSV output and CLI flags.
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverTag::ExactMinMax => "exact",
            SolverTag::LNormWaterfill => "lnorm",
            SolverTag::BruteForce => "brute",
            SolverTag::ThresholdMin => "threshold",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(SolverTag::ExactMinMax),
            "lnorm" => Ok(SolverTag::LNormWaterfill),
            "brute" => Ok(SolverTag::BruteForce),
            "threshold" => Ok(SolverTag::ThresholdMin),
            other => Err(Error::InvalidParameter(format!(
                "unknown solver '{other}' (expected exact|lnorm|brute|threshold)"
            ))),
        }
    }
}

impl std::fmt::Display for SolverTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An allocation plus the per-user average interference it predicts.
///
/// `per_user_interference[k]` is always recomputed from the stored bits via
/// [`distortion`] and [`avg_interference`], so a report can never disagree
/// with the model.
#[derive(Debug, Clone)]
pub struct AllocationReport {
    allocation: BitAllocation,
    per_user_interference: Vec<f64>,
    max_interference: f64,
    solver_tag: SolverTag,
}

impl AllocationReport {
    /// Build a report by evaluating the interference model at `allocation`.
    pub fn from_allocation(
        params: &SystemParams,
        allocation: BitAllocation,
        solver_tag: SolverTag,
    ) -> Result<Self> {
        if allocation.num_users() != params.num_users() {
            return Err(Error::Dimension(format!(
                "allocation has {} entries for {} users",
                allocation.num_users(),
                params.num_users()
            )));
        }
        let per_user: Vec<f64> = allocation
            .bits()
            .iter()
            .enumerate()
            .map(|(k, &b)| {
                let d = distortion(b, params.num_antennas())?;
                avg_interference(params.tx_power(), params.gain(k), d)
            })
            .collect::<Result<_>>()?;
        let max = per_user.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            allocation,
            per_user_interference: per_user,
            max_interference: max,
            solver_tag,
        })
    }

    pub fn allocation(&self) -> &BitAllocation {
        &self.allocation
    }

    pub fn bits(&self) -> &[f64] {
        self.allocation.bits()
    }

    pub fn per_user_interference(&self) -> &[f64] {
        &self.per_user_interference
    }

    pub fn max_interference(&self) -> f64 {
        self.max_interference
    }

    pub fn solver_tag(&self) -> SolverTag {
        self.solver_tag
    }
}

/// Tuning knobs for the level-search solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Exponent of the max surrogate norm; larger tracks the true maximum
    /// more closely.
    pub l_exponent: u32,
    /// Relative tolerance on the budget residual at termination.
    pub bisection_tol: f64,
    /// Iteration cap for the bisection loop.
    pub max_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            l_exponent: 100,
            bisection_tol: 1e-10,
            max_iters: 200,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.l_exponent < 1 {
            return Err(Error::InvalidParameter("l_exponent must be >= 1".into()));
        }
        if !is_positive(self.bisection_tol) {
            return Err(Error::InvalidParameter(
                "bisection_tol must be positive".into(),
            ));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
        }
        Ok(())
    }
}

/// Expected squared quantization error (`E[sin^2 theta]`) of a unit channel
/// direction quantized with `bits` feedback bits on `num_antennas` antennas,
/// under the spherical-cap cell model:
/// `(N - 1) / N * 2^(-bits / (N - 1))`.
///
/// Strictly decreasing and convex in `bits`; halves exactly every `N - 1`
/// bits.
pub fn distortion(bits: f64, num_antennas: usize) -> Result<f64> {
    if num_antennas < 2 {
        return Err(Error::InvalidParameter(format!(
            "distortion requires num_antennas >= 2, got {num_antennas}"
        )));
    }
    if !is_non_negative(bits) {
        return Err(Error::InvalidParameter(format!(
            "bits must be non-negative and finite, got {bits}"
        )));
    }
    let n = num_antennas as f64;
    Ok((n - 1.0) / n * (-bits / (n - 1.0)).exp2())
}

/// Average leakage power `P0 * lambda * delta` towards a user with average
/// gain `lambda` when the residual direction error is `delta`.
pub fn avg_interference(tx_power: f64, gain: f64, distortion: f64) -> Result<f64> {
    if !is_positive(tx_power) {
        return Err(Error::InvalidParameter(format!(
            "tx_power must be positive, got {tx_power}"
        )));
    }
    if !is_positive(gain) {
        return Err(Error::InvalidParameter(format!(
            "gain must be positive, got {gain}"
        )));
    }
    if !(is_positive(distortion) && distortion < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "distortion must lie in (0, 1), got {distortion}"
        )));
    }
    Ok(tx_power * gain * distortion)
}

/// Fewest (real-valued) feedback bits that push the average interference at
/// one user down to `target` watts:
/// `(N - 1) * max(0, log2(P0 * lambda) - log2(N * target / (N - 1)))`.
///
/// Inverse of `avg_interference(P0, lambda, distortion(b, N))` in `b`; the
/// round trip reproduces `target` whenever the clamp at zero is inactive.
pub fn bits_for_interference(
    tx_power: f64,
    gain: f64,
    target: f64,
    num_antennas: usize,
) -> Result<f64> {
    if num_antennas < 2 {
        return Err(Error::InvalidParameter(format!(
            "bits_for_interference requires num_antennas >= 2, got {num_antennas}"
        )));
    }
    if !is_positive(tx_power) || !is_positive(gain) {
        return Err(Error::InvalidParameter(
            "tx_power and gain must be positive".into(),
        ));
    }
    if !is_positive(target) {
        return Err(Error::InvalidParameter(format!(
            "target interference must be positive and finite, got {target}"
        )));
    }
    let n = num_antennas as f64;
    let needed = (n - 1.0) * ((tx_power * gain).log2() - (n * target / (n - 1.0)).log2());
    Ok(needed.max(0.0))
}

/// Equalized min-max interference level reached by an optimal continuous
/// split of `budget` bits once every user is active:
/// `(N - 1) / N * P0 * geomean(lambda) * 2^(-B / (K * (N - 1)))`.
///
/// For small budgets (some users clamped at zero bits) the true optimum sits
/// above this value; the two agree exactly as soon as every user receives a
/// positive share.
pub fn asymptotic_minmax(params: &SystemParams, budget: f64) -> Result<f64> {
    if !is_non_negative(budget) {
        return Err(Error::InvalidParameter(format!(
            "budget must be non-negative and finite, got {budget}"
        )));
    }
    let n = params.num_antennas() as f64;
    let k = params.num_users() as f64;
    let mean_log: f64 = params.avg_gains().iter().map(|g| g.ln()).sum::<f64>() / k;
    let geo_mean = mean_log.exp();
    Ok((n - 1.0) / n * params.tx_power() * geo_mean * (-budget / (k * (n - 1.0))).exp2())
}
