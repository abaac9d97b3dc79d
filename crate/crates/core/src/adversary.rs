//! Adaptive lower-bound adversaries and the game loop.
//!
//! Each adversary is a state machine that sees the policy's decision on the
//! previous item before choosing the next one. The `next_item_*` functions
//! replay a recorded history through a fresh adversary and reject histories
//! it would not have produced.

use std::fmt;

use crate::bounds::{lb_value, RAT_GRID};
use crate::error::{Error, Result};
use crate::model::{ratio, reservation_cost, Item, Mode, ModeKind, Ratio};
use crate::policy::{Decision, OnlinePolicy, PolicyConfig, Trace};
use crate::rat::Rat;
use crate::solver::optimal_packing;

pub const DEFAULT_SIZE_ROUNDS: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Termination {
    RejectedEarly,
    TookBait,
    Complemented,
    ReservationBudgetExhausted,
    CopyReserved,
    CopiesExhausted,
    ScheduleConverged,
    RoundLimit,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::RejectedEarly => "rejected-early",
            Termination::TookBait => "took-bait",
            Termination::Complemented => "complemented",
            Termination::ReservationBudgetExhausted => "reservation-budget-exhausted",
            Termination::CopyReserved => "copy-reserved",
            Termination::CopiesExhausted => "copies-exhausted",
            Termination::ScheduleConverged => "schedule-converged",
            Termination::RoundLimit => "round-limit",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Emission {
    Item(Item),
    End(Termination),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeAdversaryConfig {
    pub epsilon: Rat,
    pub big_c: Rat,
    pub beta: Rat,
    pub max_rounds: usize,
}

impl SizeAdversaryConfig {
    pub fn new(epsilon: Rat, big_c: Rat, beta: Rat) -> Result<SizeAdversaryConfig> {
        let config = SizeAdversaryConfig { epsilon, big_c, beta, max_rounds: DEFAULT_SIZE_ROUNDS };
        config.validate()?;
        Ok(config)
    }

    pub fn with_max_rounds(mut self, max_rounds: usize) -> SizeAdversaryConfig {
        self.max_rounds = max_rounds;
        self
    }

    /// `0 < epsilon < 1/2`, `beta >= 0`, `C > 2 beta`, at least one round.
    pub fn validate(&self) -> Result<()> {
        if !self.epsilon.is_positive() || self.epsilon >= Rat::new(1, 2) {
            return Err(Error::InvalidConfig(format!("epsilon {} outside (0, 1/2)", self.epsilon)));
        }
        if self.beta.is_negative() {
            return Err(Error::InvalidConfig(format!("beta {} is negative", self.beta)));
        }
        if self.big_c <= &Rat::from_integer(2) * &self.beta || !self.big_c.is_positive() {
            return Err(Error::InvalidConfig(format!("C {} must exceed 2 beta", self.big_c)));
        }
        if self.max_rounds == 0 {
            return Err(Error::InvalidConfig("max_rounds must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
enum SizePhase {
    Fresh,
    Offering(usize),
    Closing(Termination),
    Ended(Termination),
}

/// Items `(1/2 + eps^i, C)` until the policy stops reserving them.
#[derive(Clone, Debug)]
pub struct SizeAdversary {
    config: SizeAdversaryConfig,
    alpha: Rat,
    phase: SizePhase,
    eps_pow: Rat,
    spent: Rat,
    emitted: usize,
    last: Option<Item>,
}

impl SizeAdversary {
    /// `alpha` prices reservations against the budget `C`.
    pub fn new(config: SizeAdversaryConfig, alpha: Rat) -> Result<SizeAdversary> {
        config.validate()?;
        let eps_pow = config.epsilon.clone();
        Ok(SizeAdversary {
            config,
            alpha,
            phase: SizePhase::Fresh,
            eps_pow,
            spent: Rat::zero(),
            emitted: 0,
            last: None,
        })
    }

    fn emit(&mut self, size: Rat, value: Rat) -> Emission {
        let item = Item::new(size, value, self.emitted).expect("adversary items fit the knapsack");
        self.emitted += 1;
        self.last = Some(item.clone());
        Emission::Item(item)
    }

    fn end(&mut self, t: Termination) -> Emission {
        self.phase = SizePhase::Ended(t);
        self.last = None;
        Emission::End(t)
    }

    /// `None` requests the first item; afterwards pass the decision on the
    /// item just emitted.
    pub fn next(&mut self, last: Option<Decision>) -> Result<Emission> {
        let half = Rat::new(1, 2);
        match (self.phase.clone(), last) {
            (SizePhase::Fresh, None) => {
                self.phase = SizePhase::Offering(1);
                let size = &half + &self.eps_pow;
                Ok(self.emit(size, self.config.big_c.clone()))
            }
            (SizePhase::Fresh, Some(_)) => Err(Error::InvalidHistory("decision before the first item".into())),
            (SizePhase::Ended(t), _) => Ok(Emission::End(t)),
            (_, None) => Err(Error::InvalidHistory("missing decision".into())),
            (SizePhase::Closing(t), Some(_)) => Ok(self.end(t)),
            (SizePhase::Offering(_), Some(Decision::Pack)) => {
                self.phase = SizePhase::Closing(Termination::TookBait);
                let value = &Rat::from_integer(3) * &self.config.big_c;
                Ok(self.emit(Rat::one(), value))
            }
            (SizePhase::Offering(1), Some(Decision::Reject)) => Ok(self.end(Termination::RejectedEarly)),
            (SizePhase::Offering(_), Some(Decision::Reject)) => {
                self.phase = SizePhase::Closing(Termination::Complemented);
                let size = &half - &self.eps_pow;
                Ok(self.emit(size, self.config.big_c.clone()))
            }
            (SizePhase::Offering(i), Some(Decision::Reserve)) => {
                let item = self.last.as_ref().expect("an item is in flight");
                self.spent += &self.alpha * &item.size;
                if self.spent >= self.config.big_c {
                    return Ok(self.end(Termination::ReservationBudgetExhausted));
                }
                if i >= self.config.max_rounds {
                    return Ok(self.end(Termination::RoundLimit));
                }
                self.phase = SizePhase::Offering(i + 1);
                self.eps_pow = &self.eps_pow * &self.config.epsilon;
                let size = &half + &self.eps_pow;
                Ok(self.emit(size, self.config.big_c.clone()))
            }
        }
    }
}

/// Parameters of the value-cost adversary.
///
/// Item `x_k = (1 - k eps1, v_k)` grows in value by `f_k`, where
/// `f_k - limit` decays geometrically by `rho` on a `1e-12` grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueAdversaryConfig {
    pub eps1: Rat,
    pub eps2: Rat,
    pub n: usize,
    pub f1: Rat,
    pub rho: Rat,
    pub limit: Rat,
    pub copy_cap: usize,
    pub max_rounds: usize,
}

impl ValueAdversaryConfig {
    /// Parameters aimed at `lb_value(alpha)`: `f1` is the bound times
    /// `1 + eps2`, `rho^n >= 1 - eps2`, the schedule decays toward 1 and the
    /// round cap leaves `n` rounds past convergence.
    pub fn for_alpha(alpha: f64, n: usize, eps2: Rat) -> Result<ValueAdversaryConfig> {
        if !(alpha > 0.0 && alpha < 0.5) {
            return Err(Error::InvalidConfig(format!("alpha {alpha} outside (0, 1/2)")));
        }
        if n == 0 {
            return Err(Error::InvalidConfig("n must be positive".into()));
        }
        if !eps2.is_positive() || eps2 >= Rat::one() {
            return Err(Error::InvalidConfig(format!("eps2 {eps2} outside (0, 1)")));
        }
        let lb = lb_value(alpha);
        let f1 = Rat::ceil_to_grid(lb * (1.0 + eps2.to_f64()), RAT_GRID)
            .ok_or_else(|| Error::InvalidConfig("lower bound is not finite".into()))?;
        let keep = Rat::one() - &eps2;
        let mut rho = Rat::ceil_to_grid(keep.to_f64().powf(1.0 / n as f64), RAT_GRID)
            .ok_or_else(|| Error::InvalidConfig("rho is not finite".into()))?;
        let step = Rat::new(1, RAT_GRID as i64);
        while rho.pow(n as u32) < keep {
            rho = &rho + &step;
        }
        if rho >= Rat::one() {
            return Err(Error::InvalidConfig(format!("eps2 {eps2} too small for n = {n}")));
        }
        let limit = Rat::one();
        let copy_cap = lb.ceil() as usize + 1;
        let mut probe = ValueAdversaryConfig {
            eps1: Rat::one(),
            eps2,
            n,
            f1,
            rho,
            limit,
            copy_cap,
            max_rounds: usize::MAX,
        };
        let converge = probe.rounds_to_converge().ok_or_else(|| {
            Error::InvalidConfig("factor schedule does not converge within 10^7 rounds".into())
        })?;
        probe.max_rounds = converge + n;
        probe.eps1 = Rat::from_integer(1) / Rat::from_integer(((copy_cap + 1) * (probe.max_rounds + 1)) as i64);
        probe.validate()?;
        Ok(probe)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n == 0 || self.max_rounds == 0 {
            return bad("n and max_rounds must be positive".into());
        }
        if !self.eps2.is_positive() || self.eps2 >= Rat::one() {
            return bad(format!("eps2 {} outside (0, 1)", self.eps2));
        }
        if !self.rho.is_positive() || self.rho >= Rat::one() {
            return bad(format!("rho {} outside (0, 1)", self.rho));
        }
        if self.rho.pow(self.n as u32) < Rat::one() - &self.eps2 {
            return bad("rho^n must be at least 1 - eps2".into());
        }
        if self.limit < Rat::one() || self.f1 <= self.limit {
            return bad(format!("need 1 <= limit < f1, got limit {} and f1 {}", self.limit, self.f1));
        }
        if !self.eps1.is_positive() {
            return bad("eps1 must be positive".into());
        }
        let rounds = Rat::from_integer(self.max_rounds as i64);
        let copies = Rat::from_integer(self.copy_cap as i64 + 1);
        if &(&rounds * &copies) * &self.eps1 > Rat::one() {
            return bad("eps1 too large: items or copies could exceed the capacity".into());
        }
        Ok(())
    }

    /// First `k >= 1` with `f_k < 1 + eps2`.
    pub fn rounds_to_converge(&self) -> Option<usize> {
        let target = Rat::one() + &self.eps2;
        let mut schedule = FactorSchedule::new(self);
        (1..=10_000_000usize).find(|_| schedule.next_factor() < target)
    }
}

/// Successive factors `f_1, f_2, ...`.
#[derive(Clone, Debug)]
pub struct FactorSchedule {
    gap: Option<Rat>,
    first_gap: Rat,
    rho: Rat,
    limit: Rat,
}

impl FactorSchedule {
    pub fn new(config: &ValueAdversaryConfig) -> FactorSchedule {
        FactorSchedule {
            gap: None,
            first_gap: &config.f1 - &config.limit,
            rho: config.rho.clone(),
            limit: config.limit.clone(),
        }
    }

    pub fn next_factor(&mut self) -> Rat {
        let gap = match self.gap.take() {
            None => self.first_gap.clone(),
            Some(g) => (&g * &self.rho).ceil_to(RAT_GRID),
        };
        let f = &self.limit + &gap;
        self.gap = Some(gap);
        f
    }
}

/// `f_k`, with the convention `f_0 = 1`.
pub fn factor_schedule(k: usize, config: &ValueAdversaryConfig) -> Rat {
    let mut schedule = FactorSchedule::new(config);
    let mut f = Rat::one();
    for _ in 0..k {
        f = schedule.next_factor();
    }
    f
}

#[derive(Clone, Debug)]
enum ValuePhase {
    Fresh,
    Offering(usize),
    Copies { presented: usize },
    Closing(Termination),
    Ended(Termination),
}

#[derive(Clone, Debug)]
pub struct ValueAdversary {
    config: ValueAdversaryConfig,
    phase: ValuePhase,
    schedule: FactorSchedule,
    factor: Rat,
    values: Vec<Rat>,
    value_sum: Rat,
    emitted: usize,
    copy: Option<Item>,
}

impl ValueAdversary {
    pub fn new(config: ValueAdversaryConfig) -> Result<ValueAdversary> {
        config.validate()?;
        let schedule = FactorSchedule::new(&config);
        Ok(ValueAdversary {
            config,
            phase: ValuePhase::Fresh,
            schedule,
            factor: Rat::one(),
            values: Vec::new(),
            value_sum: Rat::zero(),
            emitted: 0,
            copy: None,
        })
    }

    /// `v_0, v_1, ...` of the items `x_k` emitted so far.
    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    /// `v_k / v_{k-1}` for the last emitted `x_k`, if `k >= 1`.
    pub fn realized_factor(&self) -> Option<Rat> {
        let n = self.values.len();
        if n < 2 || self.values[n - 2].is_zero() {
            return None;
        }
        Some(&self.values[n - 1] / &self.values[n - 2])
    }

    fn emit(&mut self, size: Rat, value: Rat) -> Emission {
        let item = Item::new(size, value.clone(), self.emitted).expect("adversary items fit the knapsack");
        self.emitted += 1;
        self.value_sum += &value;
        Emission::Item(item)
    }

    fn emit_x(&mut self, k: usize) -> Emission {
        let value = if k == 0 {
            Rat::one()
        } else {
            self.factor = self.schedule.next_factor();
            (&self.values[k - 1] * &self.factor).floor_to(RAT_GRID)
        };
        self.values.push(value.clone());
        self.phase = ValuePhase::Offering(k);
        let size = Rat::one() - &(&self.config.eps1 * &Rat::from_integer(k as i64));
        self.emit(size, value)
    }

    fn end(&mut self, t: Termination) -> Emission {
        self.phase = ValuePhase::Ended(t);
        Emission::End(t)
    }

    fn bait(&mut self) -> Emission {
        self.phase = ValuePhase::Closing(Termination::TookBait);
        let value = &self.config.f1 * &self.value_sum;
        self.emit(Rat::one(), value)
    }

    fn emit_copy(&mut self, presented: usize) -> Emission {
        self.phase = ValuePhase::Copies { presented };
        let copy = self.copy.clone().expect("copy template set");
        self.emit(copy.size, copy.value)
    }

    pub fn next(&mut self, last: Option<Decision>) -> Result<Emission> {
        match (self.phase.clone(), last) {
            (ValuePhase::Fresh, None) => Ok(self.emit_x(0)),
            (ValuePhase::Fresh, Some(_)) => Err(Error::InvalidHistory("decision before the first item".into())),
            (ValuePhase::Ended(t), _) => Ok(Emission::End(t)),
            (_, None) => Err(Error::InvalidHistory("missing decision".into())),
            (ValuePhase::Closing(t), Some(_)) => Ok(self.end(t)),
            (ValuePhase::Offering(_), Some(Decision::Pack)) | (ValuePhase::Copies { .. }, Some(Decision::Pack)) => {
                Ok(self.bait())
            }
            (ValuePhase::Offering(k), Some(Decision::Reserve)) => {
                if k >= 1 && self.factor < Rat::one() + &self.config.eps2 {
                    return Ok(self.end(Termination::ScheduleConverged));
                }
                if k >= self.config.max_rounds {
                    return Ok(self.end(Termination::RoundLimit));
                }
                Ok(self.emit_x(k + 1))
            }
            (ValuePhase::Offering(k), Some(Decision::Reject)) => {
                if k < self.config.n {
                    return Ok(self.end(Termination::RejectedEarly));
                }
                let size = &self.config.eps1 * &Rat::from_integer(k as i64);
                let value = self.values[k - 1].clone();
                self.copy = Some(Item { size, value, arrival: 0 });
                Ok(self.emit_copy(1))
            }
            (ValuePhase::Copies { .. }, Some(Decision::Reserve)) => Ok(self.end(Termination::CopyReserved)),
            (ValuePhase::Copies { presented }, Some(Decision::Reject)) => {
                if presented >= self.config.copy_cap {
                    Ok(self.end(Termination::CopiesExhausted))
                } else {
                    Ok(self.emit_copy(presented + 1))
                }
            }
        }
    }
}

fn replay<F>(history: &[(Item, Decision)], mut next: F) -> Result<Emission>
where
    F: FnMut(Option<Decision>) -> Result<Emission>,
{
    let mut emission = next(None)?;
    for (pos, (item, decision)) in history.iter().enumerate() {
        match &emission {
            Emission::Item(expected) if expected == item => {}
            Emission::Item(expected) => {
                return Err(Error::InvalidHistory(format!("step {pos}: expected {expected}, got {item}")));
            }
            Emission::End(t) => {
                return Err(Error::InvalidHistory(format!("step {pos}: game already ended ({t})")));
            }
        }
        emission = next(Some(*decision))?;
    }
    Ok(emission)
}

/// The size adversary's reply to `history`; `alpha` prices reservations.
pub fn next_item_size_lb(config: &SizeAdversaryConfig, alpha: &Rat, history: &[(Item, Decision)]) -> Result<Emission> {
    let mut adversary = SizeAdversary::new(config.clone(), alpha.clone())?;
    replay(history, |d| adversary.next(d))
}

pub fn next_item_value_lb(config: &ValueAdversaryConfig, history: &[(Item, Decision)]) -> Result<Emission> {
    let mut adversary = ValueAdversary::new(config.clone())?;
    replay(history, |d| adversary.next(d))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameResult {
    pub trace: Trace,
    pub opt_value: Rat,
    pub forced_ratio: Ratio,
    pub termination: Termination,
    /// `v_k / v_{k-1}` at the last `x_k`; value games only.
    pub realized_factor: Option<Rat>,
}

impl GameResult {
    pub fn rounds(&self) -> usize {
        self.trace.decisions.len()
    }
}

fn run_game<F>(policy: &mut OnlinePolicy, mut next: F) -> Result<Termination>
where
    F: FnMut(Option<Decision>) -> Result<Emission>,
{
    let mut emission = next(None)?;
    loop {
        match emission {
            Emission::End(t) => return Ok(t),
            Emission::Item(item) => {
                let d = policy.step(item);
                emission = next(Some(d))?;
            }
        }
    }
}

fn score(trace: Trace, beta: &Rat, termination: Termination, realized_factor: Option<Rat>) -> GameResult {
    let items: Vec<Item> = trace.decisions.iter().map(|(x, _)| x.clone()).collect();
    let opt_value = optimal_packing(&items, &Rat::one()).total_value;
    let forced_ratio = ratio(&opt_value, &trace.report.net_gain, beta);
    GameResult { trace, opt_value, forced_ratio, termination, realized_factor }
}

fn expect_mode(mode: &Mode, expected: ModeKind) -> Result<()> {
    if mode.kind != expected {
        return Err(Error::ModeMismatch { expected, actual: mode.kind });
    }
    Ok(())
}

/// Size adversary against `policy`; the ratio is non-strict with `beta`.
pub fn play_size(config: &SizeAdversaryConfig, policy: &PolicyConfig) -> Result<GameResult> {
    expect_mode(&policy.mode, ModeKind::SizeProportional)?;
    let mut online = OnlinePolicy::new(policy.clone())?;
    let mut adversary = SizeAdversary::new(config.clone(), policy.mode.alpha.clone())?;
    let termination = run_game(&mut online, |d| adversary.next(d))?;
    Ok(score(online.finish(), &config.beta, termination, None))
}

/// Value adversary against `policy`; the ratio is strict.
pub fn play_value(config: &ValueAdversaryConfig, policy: &PolicyConfig) -> Result<GameResult> {
    expect_mode(&policy.mode, ModeKind::ValueProportional)?;
    let mut online = OnlinePolicy::new(policy.clone())?;
    let mut adversary = ValueAdversary::new(config.clone())?;
    let termination = run_game(&mut online, |d| adversary.next(d))?;
    let realized = adversary.realized_factor();
    Ok(score(online.finish(), &Rat::zero(), termination, realized))
}

/// `(f + 1) / (1 - alpha - alpha (1/(1 - 1/f) - eps3))` with
/// `eps3 = f^-n / (1 - 1/f)`: the ratio forced at a rejection after `n`
/// rounds of factor `f`. Infinite when the denominator is not positive.
pub fn finite_n_bound(alpha: f64, f: f64, n: usize) -> f64 {
    if f <= 1.0 {
        return f64::INFINITY;
    }
    let geo = 1.0 / (1.0 - 1.0 / f);
    let eps3 = f.powi(-(n.min(i32::MAX as usize) as i32)) * geo;
    let den = 1.0 - alpha - alpha * (geo - eps3);
    if den <= 0.0 {
        f64::INFINITY
    } else {
        (f + 1.0) / den
    }
}

/// Reservation cost charged by `mode` for every reserved item in `history`.
pub fn history_cost(history: &[(Item, Decision)], mode: &Mode) -> Rat {
    history
        .iter()
        .filter(|(_, d)| *d == Decision::Reserve)
        .map(|(x, _)| reservation_cost(x, mode))
        .sum()
}
