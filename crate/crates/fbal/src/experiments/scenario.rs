//! Declarative sweep descriptions in TOML.
//!
//! A scenario file names a parameter set, exactly one sweep axis, the
//! solvers to run, and an optional Monte Carlo overlay:
//!
//! ```toml
//! # which solvers fill the rows; threshold sweeps use ["threshold"]
//! solvers = ["exact", "lnorm"]
//! l_exponent = 100            # optional, default 100
//!
//! [params]
//! antennas = 4
//! power = 1.0
//! gains = [100.0, 10.0, 1.0]
//!
//! [sweep]                     # exactly one of the three axes:
//! budgets = [0, 2, 4, 6]      #   total feedback bits per point
//! # thresholds = [0.5, 0.1]   #   per-user interference caps
//! # gain_vectors = [[100.0, 50.0, 1.0], [100.0, 10.0, 1.0]]
//! # budget = 18               #   required with gain_vectors
//!
//! [monte_carlo]               # optional measurement overlay
//! trials = 20000
//! seed = 7                    # optional; defaults to 12345
//! ```
//!
//! Monte Carlo rows are simulated with the rounded bit vector, so the
//! overlay needs `antennas >= users + 1` and per-user bit counts within the
//! codebook guard. Measured columns are checked against the predicted ones
//! with the two-tier rule used everywhere for model-versus-measurement
//! comparisons: agree within three standard errors, or within 25% relative
//! (the closed-form error model is an approximation, not an exact law).

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{is_positive, SolverConfig, SolverTag, SystemParams};

use super::{budget_sweep_rows, threshold_sweep_rows, Check, Overlay, SweepOutput, SweepRow};

/// Default Monte Carlo seed when neither the scenario file nor the caller
/// provides one.
pub const DEFAULT_SEED: u64 = 12345;

/// Monte Carlo overlay settings of a scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McConfig {
    pub trials: usize,
    /// `None` falls back to [`DEFAULT_SEED`]; the CLI may fill it from the
    /// environment before running.
    pub seed: Option<u64>,
}

/// The sweep axis of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    /// One point per total bit budget.
    Budgets(Vec<u64>),
    /// One point per interference cap.
    Thresholds(Vec<f64>),
    /// One point per gain profile, at a fixed budget.
    GainVectors { vectors: Vec<Vec<f64>>, budget: u64 },
}

/// A validated scenario, ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub params: SystemParams,
    pub sweep: Sweep,
    pub solvers: Vec<SolverTag>,
    pub l_exponent: u32,
    pub monte_carlo: Option<McConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    solvers: Vec<String>,
    l_exponent: Option<u32>,
    params: ParamsSection,
    sweep: SweepSection,
    monte_carlo: Option<McSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsSection {
    antennas: usize,
    power: f64,
    gains: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    budgets: Option<Vec<u64>>,
    thresholds: Option<Vec<f64>>,
    gain_vectors: Option<Vec<Vec<f64>>>,
    budget: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct McSection {
    trials: usize,
    seed: Option<u64>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::ScenarioInvalid(msg.into())
}

impl Scenario {
    /// Parse and validate a scenario from TOML text.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ScenarioFile =
            toml::from_str(text).map_err(|e| Error::ScenarioParse(e.to_string()))?;
        Self::from_file(file)
    }

    /// Parse and validate a scenario file on disk.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    fn from_file(file: ScenarioFile) -> Result<Self> {
        let params = SystemParams::new(
            file.params.antennas,
            file.params.power,
            file.params.gains.clone(),
        )?;

        let axes = [
            file.sweep.budgets.is_some(),
            file.sweep.thresholds.is_some(),
            file.sweep.gain_vectors.is_some(),
        ]
        .iter()
        .filter(|&&x| x)
        .count();
        if axes != 1 {
            return Err(invalid(
                "sweep: exactly one of budgets / thresholds / gain_vectors must be set",
            ));
        }

        let sweep = if let Some(budgets) = file.sweep.budgets {
            if budgets.is_empty() {
                return Err(invalid("sweep.budgets must not be empty"));
            }
            if file.sweep.budget.is_some() {
                return Err(invalid("sweep.budget only applies to gain_vectors sweeps"));
            }
            Sweep::Budgets(budgets)
        } else if let Some(thresholds) = file.sweep.thresholds {
            if thresholds.is_empty() {
                return Err(invalid("sweep.thresholds must not be empty"));
            }
            if let Some(&bad) = thresholds.iter().find(|&&t| !is_positive(t)) {
                return Err(invalid(format!(
                    "sweep.thresholds entries must be positive and finite, got {bad}"
                )));
            }
            if file.sweep.budget.is_some() {
                return Err(invalid("sweep.budget only applies to gain_vectors sweeps"));
            }
            Sweep::Thresholds(thresholds)
        } else {
            let vectors = file.sweep.gain_vectors.unwrap();
            if vectors.is_empty() {
                return Err(invalid("sweep.gain_vectors must not be empty"));
            }
            let k = params.num_users();
            for (i, v) in vectors.iter().enumerate() {
                if v.len() != k {
                    return Err(invalid(format!(
                        "sweep.gain_vectors[{i}] has {} entries, params.gains defines {k} users",
                        v.len()
                    )));
                }
            }
            let budget = file
                .sweep
                .budget
                .ok_or_else(|| invalid("sweep.budget is required with gain_vectors"))?;
            Sweep::GainVectors { vectors, budget }
        };

        if file.solvers.is_empty() {
            return Err(invalid("solvers must not be empty"));
        }
        let solvers: Vec<SolverTag> = file
            .solvers
            .iter()
            .map(|s| SolverTag::parse(s))
            .collect::<Result<_>>()?;
        let has_threshold = solvers.contains(&SolverTag::ThresholdMin);
        match &sweep {
            Sweep::Thresholds(_) if !(has_threshold && solvers.len() == 1) => {
                return Err(invalid(
                    "threshold sweeps require solvers = [\"threshold\"] exactly",
                ));
            }
            Sweep::Budgets(_) | Sweep::GainVectors { .. } if has_threshold => {
                return Err(invalid(
                    "the threshold solver only applies to threshold sweeps",
                ));
            }
            _ => {}
        }

        let l_exponent = file.l_exponent.unwrap_or(100);
        if l_exponent < 1 {
            return Err(invalid("l_exponent must be >= 1"));
        }

        let monte_carlo = match file.monte_carlo {
            Some(mc) => {
                if mc.trials == 0 {
                    return Err(invalid("monte_carlo.trials must be >= 1"));
                }
                if params.num_antennas() < params.num_users() + 1 {
                    return Err(invalid(format!(
                        "monte_carlo needs antennas >= users + 1, got {} antennas for {} users",
                        params.num_antennas(),
                        params.num_users()
                    )));
                }
                Some(McConfig {
                    trials: mc.trials,
                    seed: mc.seed,
                })
            }
            None => None,
        };

        Ok(Scenario {
            params,
            sweep,
            solvers,
            l_exponent,
            monte_carlo,
        })
    }
}

/// Execute a scenario: solve every sweep point with every configured solver,
/// optionally overlay Monte Carlo measurements, and attach the generic
/// checks for its sweep kind.
pub fn run_scenario(scenario: &Scenario) -> Result<SweepOutput> {
    let cfg = SolverConfig {
        l_exponent: scenario.l_exponent,
        ..SolverConfig::default()
    };
    let overlay = scenario.monte_carlo.as_ref().map(|mc| Overlay {
        trials: mc.trials,
        base_seed: mc.seed.unwrap_or(DEFAULT_SEED),
    });
    let mut counter = 0u64;

    let rows = match &scenario.sweep {
        Sweep::Budgets(budgets) => budget_sweep_rows(
            &scenario.params,
            budgets,
            &scenario.solvers,
            &cfg,
            overlay,
            &mut counter,
        )?,
        Sweep::Thresholds(thresholds) => {
            threshold_sweep_rows(&scenario.params, thresholds, overlay, &mut counter)?
        }
        Sweep::GainVectors { vectors, budget } => {
            let mut rows = Vec::new();
            for v in vectors {
                let params = SystemParams::new(
                    scenario.params.num_antennas(),
                    scenario.params.tx_power(),
                    v.clone(),
                )?;
                let mut point = budget_sweep_rows(
                    &params,
                    &[*budget],
                    &scenario.solvers,
                    &cfg,
                    overlay,
                    &mut counter,
                )?;
                for row in &mut point {
                    row.sweep_value = super::SweepValue::Gains(v.clone());
                }
                rows.extend(point);
            }
            rows
        }
    };

    let mut checks = Vec::new();
    match &scenario.sweep {
        Sweep::Budgets(_) => {
            for &solver in &scenario.solvers {
                let series: Vec<&SweepRow> = rows.iter().filter(|r| r.solver == solver).collect();
                let monotone = series.windows(2).all(|w| {
                    w[1].max_interference_unrounded <= w[0].max_interference_unrounded + 1e-12
                });
                checks.push(Check::assert(
                    format!("budget_sweep_{solver}_objective_non_increasing"),
                    monotone,
                    "objective never grows with the budget",
                ));
            }
            if scenario.solvers.contains(&SolverTag::ExactMinMax)
                && scenario.solvers.contains(&SolverTag::LNormWaterfill)
            {
                let exact: Vec<&SweepRow> = rows
                    .iter()
                    .filter(|r| r.solver == SolverTag::ExactMinMax)
                    .collect();
                let lnorm: Vec<&SweepRow> = rows
                    .iter()
                    .filter(|r| r.solver == SolverTag::LNormWaterfill)
                    .collect();
                let worst = exact
                    .iter()
                    .zip(&lnorm)
                    .map(|(e, l)| {
                        super::rel_gap(e.max_interference_unrounded, l.max_interference_unrounded)
                    })
                    .fold(0.0f64, f64::max);
                checks.push(Check::assert(
                    "budget_sweep_surrogate_within_2pct",
                    worst <= 0.02,
                    format!("largest exact-vs-surrogate gap {worst:.3e}"),
                ));
            }
        }
        Sweep::Thresholds(_) => {
            let monotone = rows
                .windows(2)
                .all(|w| w[1].total_bits_rounded <= w[0].total_bits_rounded);
            checks.push(Check::assert(
                "threshold_sweep_total_bits_non_increasing",
                monotone,
                "total bits never grow as the cap loosens",
            ));
            let caps_met = rows.iter().all(|r| match r.sweep_value {
                super::SweepValue::Threshold(t) => r.max_interference_rounded <= t * (1.0 + 1e-12),
                _ => false,
            });
            checks.push(Check::assert(
                "threshold_sweep_caps_met",
                caps_met,
                "every row keeps each user at or below its cap",
            ));
        }
        Sweep::GainVectors { .. } => {}
    }

    if overlay.is_some() {
        let mut worst_sigma = 0.0f64;
        let mut worst_rel = 0.0f64;
        let mut agreed = true;
        for row in &rows {
            let (m, se) = (
                row.max_interference_measured.unwrap(),
                row.measured_std_error.unwrap(),
            );
            let predicted = row.max_interference_rounded;
            let within_noise = (m - predicted).abs() <= 3.0 * se;
            let within_model = super::rel_gap(m, predicted) <= 0.25;
            agreed &= within_noise || within_model;
            if se > 0.0 {
                worst_sigma = worst_sigma.max((m - predicted).abs() / se);
            }
            worst_rel = worst_rel.max(super::rel_gap(m, predicted));
        }
        checks.push(Check::assert(
            "monte_carlo_matches_prediction",
            agreed,
            format!(
                "measured vs predicted: worst {worst_sigma:.1} sigma, worst {:.1}% relative \
                 (pass = within 3 sigma or 25%)",
                100.0 * worst_rel
            ),
        ));
    }

    Ok(SweepOutput { rows, checks })
}
