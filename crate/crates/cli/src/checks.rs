//! Guarantee checks over seeded batches, shared by `verify`, `sweep` and the
//! acceptance suite.

use rayon::prelude::*;
use resknap_core::adversary::{play_value, GameResult, ValueAdversaryConfig};
use resknap_core::bounds::{c_star, size_mode_beta, ub_value, RAT_GRID};
use resknap_core::policy::{run, Trace};
use resknap_core::{optimal_packing, ratio, Instance, Mode, PolicyConfig, PolicyKind, Rat, Ratio};

use crate::error::{CliError, CliResult};
use crate::gen::{instance, GenParams};

/// Relative slack added to the float bound before it becomes exact.
pub const UB_ROUNDING: f64 = 1e-9;

/// `c_star(alpha)` rounded down onto the `1e-12` grid.
pub fn default_value_c(alpha: &Rat) -> CliResult<Rat> {
    let a = alpha.to_f64();
    if !(0.0..0.5).contains(&a) {
        return Err(CliError::Config(format!(
            "value-proportional costs need 0 <= alpha < 1/2, got {alpha}; no policy is competitive beyond"
        )));
    }
    let c = Rat::floor_to_grid(c_star(a), RAT_GRID).unwrap_or_else(Rat::one);
    Ok(c.max(Rat::one()))
}

/// `1 + epsilon / 4`, inside the admissible range `(1, 1 + epsilon/2)`.
pub fn default_size_c(epsilon: &Rat) -> Rat {
    Rat::one() + epsilon / &Rat::from_integer(4)
}

#[derive(Clone, Debug)]
pub struct ValueCheck {
    pub alpha: Rat,
    pub c: Rat,
    pub ub: f64,
    /// `ub * (1 + UB_ROUNDING)` as an exact rational.
    pub ub_rat: Rat,
}

impl ValueCheck {
    pub fn new(alpha: Rat, c: Rat) -> CliResult<ValueCheck> {
        let a = alpha.to_f64();
        if !(0.0..0.5).contains(&a) {
            return Err(CliError::Config(format!(
                "value-proportional costs need 0 <= alpha < 1/2, got {alpha}"
            )));
        }
        let ub = ub_value(a, c.to_f64());
        if !ub.is_finite() {
            return Err(CliError::Config(format!("no finite guarantee for alpha {alpha} and c {c}")));
        }
        let ub_rat = Rat::from_f64_exact(ub * (1.0 + UB_ROUNDING)).expect("finite bound");
        Ok(ValueCheck { alpha, c, ub, ub_rat })
    }

    pub fn policy(&self) -> CliResult<PolicyConfig> {
        let mode = Mode::value(self.alpha.clone())?;
        Ok(PolicyConfig::new(mode, self.c.clone(), PolicyKind::Alg2)?)
    }

    /// Violated conditions for one run; empty when the run passes.
    pub fn check(&self, opt: &Rat, trace: &Trace) -> Vec<String> {
        let net = &trace.report.net_gain;
        let mut failed = Vec::new();
        if opt > &(&self.ub_rat * net) {
            failed.push(format!("opt {opt} exceeds {} x net {net}", self.ub));
        }
        if let Some(ceiling) = trace.ledger.low_density_ceiling(&self.alpha, &self.c) {
            if trace.ledger.low_density_cost > ceiling {
                failed.push(format!("low-density cost {} above {ceiling}", trace.ledger.low_density_cost));
            }
        }
        failed
    }
}

#[derive(Clone, Debug)]
pub struct SizeCheck {
    pub alpha: Rat,
    pub epsilon: Rat,
    pub c: Rat,
    pub beta: Rat,
}

impl SizeCheck {
    /// `beta = None` derives the constant from the ledger bounds.
    pub fn new(alpha: Rat, epsilon: Rat, c: Rat, beta: Option<Rat>) -> CliResult<SizeCheck> {
        if !alpha.is_positive() {
            return Err(CliError::Config("size-proportional verification needs alpha > 0".into()));
        }
        if !epsilon.is_positive() {
            return Err(CliError::Config("epsilon must be positive".into()));
        }
        let upper = Rat::one() + &epsilon / &Rat::from_integer(2);
        if c <= Rat::one() || c >= upper {
            return Err(CliError::Config(format!("c must lie in (1, {upper}), got {c}")));
        }
        let beta = match beta {
            Some(b) if b.is_negative() => return Err(CliError::Config("beta must be non-negative".into())),
            Some(b) => b,
            None => size_mode_beta(&alpha, &epsilon, &c).expect("c lies in the admissible range"),
        };
        Ok(SizeCheck { alpha, epsilon, c, beta })
    }

    pub fn policy(&self) -> CliResult<PolicyConfig> {
        let mode = Mode::size(self.alpha.clone())?;
        Ok(PolicyConfig::new(mode, self.c.clone(), PolicyKind::Alg1)?)
    }

    pub fn check(&self, opt: &Rat, trace: &Trace) -> Vec<String> {
        let net = &trace.report.net_gain;
        let mut failed = Vec::new();
        let factor = Rat::from_integer(2) + &self.epsilon;
        let allowed = &(&factor * net) + &self.beta;
        if opt > &allowed {
            failed.push(format!("opt {opt} exceeds (2 + {}) x net {net} + {}", self.epsilon, self.beta));
        }
        let floor = trace.ledger.gain_floor(&self.alpha);
        if net < &floor {
            failed.push(format!("net {net} below ledger floor {floor}"));
        }
        let ceiling = trace.ledger.size_cost_ceiling(&self.alpha);
        if trace.report.reservation_cost > ceiling {
            failed.push(format!("reservation cost {} above {ceiling}", trace.report.reservation_cost));
        }
        failed
    }
}

#[derive(Clone, Debug)]
pub struct Violation {
    pub index: u64,
    pub instance: Instance,
    pub reasons: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct BatchOutcome {
    pub instances: u64,
    pub violations: Vec<Violation>,
    /// Worst ratio with the check's additive constant.
    pub worst: Ratio,
    pub worst_strict: Ratio,
}

/// Runs `policy` on instances `0..count` of the seeded batch and applies
/// `check`; `beta` enters the reported worst ratio only.
pub fn run_batch<F>(
    seed: u64,
    count: u64,
    params: &GenParams,
    policy: &PolicyConfig,
    beta: &Rat,
    check: F,
) -> CliResult<BatchOutcome>
where
    F: Fn(&Rat, &Trace) -> Vec<String> + Sync,
{
    let results: Vec<(Ratio, Ratio, Option<Violation>)> = (0..count)
        .into_par_iter()
        .map(|index| {
            let inst = instance(seed, index, params);
            let trace = run(policy, &inst)?;
            let opt = optimal_packing(&inst.items, &Rat::one()).total_value;
            let r = ratio(&opt, &trace.report.net_gain, beta);
            let strict = ratio(&opt, &trace.report.net_gain, &Rat::zero());
            let reasons = check(&opt, &trace);
            let violation = (!reasons.is_empty()).then_some(Violation { index, instance: inst, reasons });
            Ok((r, strict, violation))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut worst = Ratio::Finite(Rat::zero());
    let mut worst_strict = Ratio::Finite(Rat::zero());
    let mut violations = Vec::new();
    for (r, strict, v) in results {
        worst = worst.max(r);
        worst_strict = worst_strict.max(strict);
        violations.extend(v);
    }
    violations.sort_by_key(|v| v.index);
    Ok(BatchOutcome { instances: count, violations, worst, worst_strict })
}

pub fn value_batch(seed: u64, count: u64, n_max: usize, check: &ValueCheck) -> CliResult<BatchOutcome> {
    let params = GenParams { alpha: check.alpha.to_f64(), c: check.c.to_f64(), n_max };
    run_batch(seed, count, &params, &check.policy()?, &Rat::zero(), |opt, t| check.check(opt, t))
}

pub fn size_batch(seed: u64, count: u64, n_max: usize, check: &SizeCheck) -> CliResult<BatchOutcome> {
    let params = GenParams { alpha: check.alpha.to_f64(), c: check.c.to_f64(), n_max };
    run_batch(seed, count, &params, &check.policy()?, &check.beta, |opt, t| check.check(opt, t))
}

/// The value adversary against Alg2 under `check`'s parameters.
pub fn value_game(check: &ValueCheck, n: usize, eps2: &Rat) -> CliResult<(GameResult, Vec<String>)> {
    let config = ValueAdversaryConfig::for_alpha(check.alpha.to_f64(), n, eps2.clone())?;
    let result = play_value(&config, &check.policy()?)?;
    let reasons = check.check(&result.opt_value, &result.trace);
    Ok((result, reasons))
}
