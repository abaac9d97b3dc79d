//! Online knapsack with reservation costs: exact rationals, the densest
//! reservation pool, threshold policies, an exact offline solver, adaptive
//! lower-bound adversaries and closed-form ratio bounds.

pub mod adversary;
pub mod bounds;
pub mod error;
pub mod model;
pub mod policy;
pub mod pool;
pub mod rat;
pub mod solver;

pub use error::{Error, Result};
pub use model::{gain, parse_instance, ratio, reservation_cost, GainReport, Instance, Item, Mode, ModeKind, Ratio};
pub use policy::{Decision, PolicyConfig, PolicyKind, Trace};
pub use pool::Pool;
pub use rat::Rat;
pub use solver::{brute_force, optimal_packing, Solution};
