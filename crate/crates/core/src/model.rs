//! Items, instances, reservation-cost modes and gain / ratio accounting.
//!
//! The knapsack capacity is normalized to 1. An item that is reserved pays
//! its reservation cost exactly once, whether or not it ends up packed; an
//! item packed without reservation pays nothing.

use std::fmt;

use crate::error::{Error, Result};
use crate::rat::Rat;

/// A request `(size, value)` with its position in the arrival order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Item {
    pub size: Rat,
    pub value: Rat,
    pub arrival: usize,
}

impl Item {
    /// Checks `0 < size <= 1` and `value >= 0`.
    pub fn new(size: Rat, value: Rat, arrival: usize) -> Result<Item> {
        if !size.is_positive() {
            return Err(Error::InvalidConfig(format!("item size {size} must be positive")));
        }
        if size > Rat::one() {
            return Err(Error::InvalidConfig(format!("item size {size} exceeds the capacity")));
        }
        if value.is_negative() {
            return Err(Error::InvalidConfig(format!("item value {value} is negative")));
        }
        Ok(Item { size, value, arrival })
    }

    pub fn density(&self) -> Rat {
        density(self)
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}({}, {})", self.arrival, self.size, self.value)
    }
}

pub fn density(item: &Item) -> Rat {
    &item.value / &item.size
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModeKind {
    SizeProportional,
    ValueProportional,
}

impl fmt::Display for ModeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeKind::SizeProportional => f.write_str("size"),
            ModeKind::ValueProportional => f.write_str("value"),
        }
    }
}

/// Reservation cost model: a fraction `alpha` of either size or value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mode {
    pub kind: ModeKind,
    pub alpha: Rat,
}

impl Mode {
    pub fn new(kind: ModeKind, alpha: Rat) -> Result<Mode> {
        if alpha.is_negative() {
            return Err(Error::InvalidConfig(format!("alpha {alpha} is negative")));
        }
        Ok(Mode { kind, alpha })
    }

    pub fn size(alpha: Rat) -> Result<Mode> {
        Mode::new(ModeKind::SizeProportional, alpha)
    }

    pub fn value(alpha: Rat) -> Result<Mode> {
        Mode::new(ModeKind::ValueProportional, alpha)
    }
}

pub fn reservation_cost(item: &Item, mode: &Mode) -> Rat {
    match mode.kind {
        ModeKind::SizeProportional => &mode.alpha * &item.size,
        ModeKind::ValueProportional => &mode.alpha * &item.value,
    }
}

/// Request sequence in arrival order; `items[i].arrival == i`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Instance {
    pub items: Vec<Item>,
}

impl Instance {
    pub fn from_pairs<I>(pairs: I) -> Result<Instance>
    where
        I: IntoIterator<Item = (Rat, Rat)>,
    {
        let items = pairs
            .into_iter()
            .enumerate()
            .map(|(i, (s, v))| Item::new(s, v, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(Instance { items })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GainReport {
    pub packed_value: Rat,
    pub reservation_cost: Rat,
    pub net_gain: Rat,
}

/// Value packed minus the reservation cost of every reserved item.
///
/// An item that appears in both sets is charged once, through `reserved`.
pub fn gain(packed: &[Item], reserved: &[Item], mode: &Mode) -> Result<GainReport> {
    let total: Rat = packed.iter().map(|x| &x.size).sum();
    if total > Rat::one() {
        return Err(Error::CapacityExceeded { total });
    }
    let packed_value: Rat = packed.iter().map(|x| &x.value).sum();
    let reservation_cost: Rat = reserved.iter().map(|x| reservation_cost(x, mode)).sum();
    let net_gain = &packed_value - &reservation_cost;
    Ok(GainReport { packed_value, reservation_cost, net_gain })
}

/// A competitive ratio, possibly unbounded.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Ratio {
    Finite(Rat),
    Infinite,
}

impl Ratio {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Ratio::Infinite)
    }

    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Ratio::Finite(r) => Some(r),
            Ratio::Infinite => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Ratio::Finite(r) => r.to_f64(),
            Ratio::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ratio::Finite(r) => write!(f, "{r}"),
            Ratio::Infinite => f.write_str("inf"),
        }
    }
}

/// Least `c` with `opt <= c * alg + beta`; `beta = 0` gives the strict ratio.
pub fn ratio(opt_gain: &Rat, alg_gain: &Rat, beta: &Rat) -> Ratio {
    if opt_gain <= beta {
        return Ratio::Finite(Rat::zero());
    }
    if !alg_gain.is_positive() {
        return Ratio::Infinite;
    }
    Ratio::Finite((opt_gain - beta) / alg_gain)
}

/// Parses the instance text format: one `size,value` pair per line, decimal
/// literals, `#` starts a comment, blank lines are skipped.
pub fn parse_instance(text: &[u8]) -> Result<Instance> {
    let text = std::str::from_utf8(text).map_err(|e| Error::Parse {
        line: 0,
        message: format!("not UTF-8: {e}"),
    })?;
    let mut items = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line: line_no, message };
        let mut fields = line.split(',');
        let (Some(size), Some(value), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err(format!("expected `size,value`, got `{line}`")));
        };
        let size: Rat = size.trim().parse().map_err(|e| parse_err(format!("size: {e}")))?;
        let value: Rat = value.trim().parse().map_err(|e| parse_err(format!("value: {e}")))?;
        if !size.is_positive() {
            return Err(parse_err(format!("size {size} must be positive")));
        }
        if size > Rat::one() {
            return Err(parse_err(format!("size {size} exceeds the unit capacity")));
        }
        if value.is_negative() {
            return Err(parse_err(format!("value {value} is negative")));
        }
        let arrival = items.len();
        items.push(Item { size, value, arrival });
    }
    Ok(Instance { items })
}
