//! Online decision procedures and run instrumentation.
//!
//! `Alg1` (size-proportional costs) and `Alg2` (value-proportional costs)
//! reserve into the densest pool while it is underfull or when an item beats
//! `c` times the pool's least density; everything reserved is packed
//! optimally once the sequence ends. The baselines exist for adversary games.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{gain, Instance, Item, Mode, ModeKind, GainReport};
use crate::pool::Pool;
use crate::rat::Rat;
use crate::solver::optimal_packing;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    Alg1,
    Alg2,
    PackFirstFit,
    RejectAll,
    ReserveAll,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 5] = [
        PolicyKind::Alg1,
        PolicyKind::Alg2,
        PolicyKind::PackFirstFit,
        PolicyKind::RejectAll,
        PolicyKind::ReserveAll,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Alg1 => "alg1",
            PolicyKind::Alg2 => "alg2",
            PolicyKind::PackFirstFit => "pack-first-fit",
            PolicyKind::RejectAll => "reject-all",
            PolicyKind::ReserveAll => "reserve-all",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolicyConfig {
    pub mode: Mode,
    pub c: Rat,
    pub kind: PolicyKind,
}

impl PolicyConfig {
    pub fn new(mode: Mode, c: Rat, kind: PolicyKind) -> Result<PolicyConfig> {
        let config = PolicyConfig { mode, c, kind };
        config.validate()?;
        Ok(config)
    }

    /// `Alg1` needs size costs, `alpha > 0` and `c > 1`; `Alg2` needs value
    /// costs and `c >= 1`. Baselines accept any mode.
    pub fn validate(&self) -> Result<()> {
        match self.kind {
            PolicyKind::Alg1 => {
                self.expect_mode(ModeKind::SizeProportional)?;
                if !self.mode.alpha.is_positive() {
                    return Err(Error::InvalidConfig("alg1 requires alpha > 0".into()));
                }
                if self.c <= Rat::one() {
                    return Err(Error::InvalidConfig(format!("alg1 requires c > 1, got {}", self.c)));
                }
            }
            PolicyKind::Alg2 => {
                self.expect_mode(ModeKind::ValueProportional)?;
                if self.c < Rat::one() {
                    return Err(Error::InvalidConfig(format!("alg2 requires c >= 1, got {}", self.c)));
                }
            }
            PolicyKind::PackFirstFit | PolicyKind::RejectAll | PolicyKind::ReserveAll => {}
        }
        Ok(())
    }

    fn expect_mode(&self, expected: ModeKind) -> Result<()> {
        if self.mode.kind != expected {
            return Err(Error::ModeMismatch { expected, actual: self.mode.kind });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Decision {
    Pack,
    Reject,
    Reserve,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Pack => "pack",
            Decision::Reject => "reject",
            Decision::Reserve => "reserve",
        })
    }
}

/// End-of-run quantities read off the pool and the reservation history.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstrumentationLedger {
    /// Times `d_delta` reached `c` times the previous epoch base after the
    /// pool first held size 1.
    pub epoch_count: usize,
    /// Least `k` with `d_delta <= c^k alpha`; size costs only.
    pub density_level: Option<u32>,
    /// Value and size of pool entries strictly denser than `c * d_delta`.
    pub v_c: Rat,
    pub s_c: Rat,
    pub d_delta_final: Rat,
    pub pool_size_final: Rat,
    pub pool_filled: bool,
    /// Reservation cost of reserved items less dense than `d_delta_final`.
    pub low_density_cost: Rat,
    /// Deepest band `i` (density in `[d/c^i, d/c^(i-1))`) holding a costed item.
    pub low_density_bands: u32,
}

impl InstrumentationLedger {
    /// `max{v_c, (v_c + (min(1, |pool|) - s_c) d_delta) / 2} - 2 alpha (k + 1)`.
    pub fn gain_floor(&self, alpha: &Rat) -> Rat {
        let fill = self.pool_size_final.clone().min(Rat::one());
        let half = (&self.v_c + &(&(&fill - &self.s_c) * &self.d_delta_final)) / Rat::from_integer(2);
        let k = self.density_level.unwrap_or(0) as i64;
        self.v_c.clone().max(half) - Rat::from_integer(2) * alpha * Rat::from_integer(k + 1)
    }

    /// `alpha (2 epochs + 3)`, the size-cost reservation ceiling.
    pub fn size_cost_ceiling(&self, alpha: &Rat) -> Rat {
        alpha * &Rat::from_integer(2 * self.epoch_count as i64 + 3)
    }

    /// `alpha d (2 + 2 sum_{i=1..B} c^(1-i))`; `None` when `c <= 1`.
    pub fn low_density_ceiling(&self, alpha: &Rat, c: &Rat) -> Option<Rat> {
        if c <= &Rat::one() {
            return None;
        }
        // sum_{i=1..B} c^(1-i) = (c^B - 1) / (c^(B-1) (c - 1))
        let b = self.low_density_bands;
        let geo = if b == 0 {
            Rat::zero()
        } else {
            (c.pow(b) - Rat::one()) / (c.pow(b - 1) * (c - &Rat::one()))
        };
        let two = Rat::from_integer(2);
        Some(alpha * &self.d_delta_final * (&two + &(&two * &geo)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub decisions: Vec<(Item, Decision)>,
    /// Every reserved item in arrival order, evicted ones included.
    pub reserved: Vec<Item>,
    pub packed_online: Vec<Item>,
    pub final_packing: Vec<Item>,
    pub report: GainReport,
    pub ledger: InstrumentationLedger,
}

impl Trace {
    pub fn count(&self, decision: Decision) -> usize {
        self.decisions.iter().filter(|(_, d)| *d == decision).count()
    }
}

/// Incremental runner: feed items one at a time, then `finish`.
#[derive(Clone, Debug)]
pub struct OnlinePolicy {
    config: PolicyConfig,
    pool: Pool,
    decisions: Vec<(Item, Decision)>,
    reserved: Vec<Item>,
    reserved_cost: Rat,
    packed_online: Vec<Item>,
    packed_size: Rat,
    epoch_base: Option<Rat>,
    epoch_count: usize,
}

impl OnlinePolicy {
    pub fn new(config: PolicyConfig) -> Result<OnlinePolicy> {
        config.validate()?;
        Ok(OnlinePolicy {
            config,
            pool: Pool::new(),
            decisions: Vec::new(),
            reserved: Vec::new(),
            reserved_cost: Rat::zero(),
            packed_online: Vec::new(),
            packed_size: Rat::zero(),
            epoch_base: None,
            epoch_count: 0,
        })
    }

    pub fn config(&self) -> &PolicyConfig {
        &self.config
    }

    pub fn pool(&self) -> &Pool {
        &self.pool
    }

    pub fn decisions(&self) -> &[(Item, Decision)] {
        &self.decisions
    }

    /// Reservation cost paid so far.
    pub fn reserved_cost(&self) -> &Rat {
        &self.reserved_cost
    }

    pub fn decide(&self, item: &Item) -> Decision {
        match self.config.kind {
            PolicyKind::Alg1 => alg1_decision(&self.pool, &self.config, item),
            PolicyKind::Alg2 => alg2_decision(&self.pool, &self.config, item),
            PolicyKind::PackFirstFit => {
                if &self.packed_size + &item.size <= Rat::one() {
                    Decision::Pack
                } else {
                    Decision::Reject
                }
            }
            PolicyKind::RejectAll => Decision::Reject,
            PolicyKind::ReserveAll => Decision::Reserve,
        }
    }

    pub fn step(&mut self, item: Item) -> Decision {
        let decision = self.decide(&item);
        match decision {
            Decision::Pack => {
                self.packed_size += &item.size;
                self.packed_online.push(item.clone());
            }
            Decision::Reserve => {
                self.reserved_cost += crate::model::reservation_cost(&item, &self.config.mode);
                self.reserved.push(item.clone());
                self.pool.insert(item.clone());
                self.track_epoch();
            }
            Decision::Reject => {}
        }
        self.decisions.push((item, decision));
        decision
    }

    fn track_epoch(&mut self) {
        if self.pool.size() < &Rat::one() {
            return;
        }
        let d = self.pool.d_delta();
        match &self.epoch_base {
            None => self.epoch_base = Some(d),
            Some(base) => {
                if d > *base && d >= &self.config.c * base {
                    self.epoch_count += 1;
                    self.epoch_base = Some(d);
                }
            }
        }
    }

    pub fn finish(self) -> Trace {
        let final_packing = finalize(&self.reserved, &self.packed_online);
        let ledger = self.ledger();
        let mut packed = self.packed_online.clone();
        packed.extend(final_packing.iter().cloned());
        let report = gain(&packed, &self.reserved, &self.config.mode)
            .expect("final packing respects the residual capacity");
        Trace {
            decisions: self.decisions,
            reserved: self.reserved,
            packed_online: self.packed_online,
            final_packing,
            report,
            ledger,
        }
    }

    fn ledger(&self) -> InstrumentationLedger {
        let c = &self.config.c;
        let alpha = &self.config.mode.alpha;
        let d = self.pool.d_delta();
        let threshold = c * &d;
        let (mut v_c, mut s_c) = (Rat::zero(), Rat::zero());
        for (item, density) in self.pool.entries_with_density() {
            if density > &threshold {
                v_c += &item.value;
                s_c += &item.size;
            }
        }

        let density_level = match self.config.mode.kind {
            ModeKind::SizeProportional if alpha.is_positive() && c > &Rat::one() && !self.pool.is_empty() => {
                Some(least_power_reaching(c, &(&d / alpha), 0))
            }
            _ => None,
        };

        let mut low_density_cost = Rat::zero();
        let mut low_density_bands = 0u32;
        for item in &self.reserved {
            let density = item.density();
            if density >= d {
                continue;
            }
            let cost = crate::model::reservation_cost(item, &self.config.mode);
            if cost.is_zero() {
                continue;
            }
            low_density_cost += &cost;
            if c > &Rat::one() && density.is_positive() {
                let band = least_power_reaching(c, &(&d / &density), 1);
                low_density_bands = low_density_bands.max(band);
            }
        }

        InstrumentationLedger {
            epoch_count: self.epoch_count,
            density_level,
            v_c,
            s_c,
            d_delta_final: d,
            pool_size_final: self.pool.size().clone(),
            pool_filled: self.pool.size() >= &Rat::one(),
            low_density_cost,
            low_density_bands,
        }
    }
}

/// Least `k >= start` with `c^k >= target`, for `c > 1`.
fn least_power_reaching(c: &Rat, target: &Rat, start: u32) -> u32 {
    let guess = (target.log2_approx() / c.log2_approx()).ceil();
    let mut k = if guess.is_finite() && guess > start as f64 { guess as u32 } else { start };
    while c.pow(k) < *target {
        k += 1;
    }
    while k > start && c.pow(k - 1) >= *target {
        k -= 1;
    }
    k
}

fn alg1_decision(pool: &Pool, config: &PolicyConfig, item: &Item) -> Decision {
    let d = item.density();
    if d <= config.mode.alpha {
        Decision::Reject
    } else if pool.size() < &Rat::one() || d >= &config.c * &pool.d_delta() {
        Decision::Reserve
    } else {
        Decision::Reject
    }
}

fn alg2_decision(pool: &Pool, config: &PolicyConfig, item: &Item) -> Decision {
    if pool.size() < &Rat::one() || item.density() >= &config.c * &pool.d_delta() {
        Decision::Reserve
    } else {
        Decision::Reject
    }
}

/// One step of the size-cost threshold policy.
pub fn step_alg1(pool: &mut Pool, config: &PolicyConfig, item: Item) -> Result<Decision> {
    if config.mode.kind != ModeKind::SizeProportional {
        return Err(Error::ModeMismatch { expected: ModeKind::SizeProportional, actual: config.mode.kind });
    }
    let decision = alg1_decision(pool, config, &item);
    if decision == Decision::Reserve {
        pool.insert(item);
    }
    Ok(decision)
}

/// One step of the value-cost threshold policy.
pub fn step_alg2(pool: &mut Pool, config: &PolicyConfig, item: Item) -> Result<Decision> {
    if config.mode.kind != ModeKind::ValueProportional {
        return Err(Error::ModeMismatch { expected: ModeKind::ValueProportional, actual: config.mode.kind });
    }
    let decision = alg2_decision(pool, config, &item);
    if decision == Decision::Reserve {
        pool.insert(item);
    }
    Ok(decision)
}

/// Optimal packing of the reserved items into the room left by online packs.
pub fn finalize(reserved: &[Item], packed_online: &[Item]) -> Vec<Item> {
    let used: Rat = packed_online.iter().map(|x| &x.size).sum();
    optimal_packing(reserved, &(Rat::one() - used)).chosen
}

pub fn run(config: &PolicyConfig, instance: &Instance) -> Result<Trace> {
    let mut policy = OnlinePolicy::new(config.clone())?;
    for item in &instance.items {
        policy.step(item.clone());
    }
    Ok(policy.finish())
}
