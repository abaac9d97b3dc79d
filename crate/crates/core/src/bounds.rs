//! Closed-form competitive-ratio bounds in `f64`.
//!
//! Value-cost formulas are defined for `0 < alpha < 1/2`; outside that range,
//! or where a denominator is not positive, they return `f64::INFINITY`.

use crate::rat::Rat;

/// Grid used when an irrational bound is turned into a `Rat`.
pub const RAT_GRID: u64 = 1_000_000_000_000;

fn in_value_range(alpha: f64) -> bool {
    alpha > 0.0 && alpha < 0.5
}

/// Guaranteed strict ratio of the value-cost threshold policy with factor `c`.
pub fn ub_value(alpha: f64, c: f64) -> f64 {
    if c <= 1.0 || !(0.0..0.5).contains(&alpha) {
        return f64::INFINITY;
    }
    let den = 1.0 - alpha * (4.0 / (1.0 - 1.0 / c) - 2.0);
    if den <= 0.0 {
        f64::INFINITY
    } else {
        2.0 * c / den
    }
}

/// Threshold factor minimizing `ub_value(alpha, .)`.
pub fn c_star(alpha: f64) -> f64 {
    if !in_value_range(alpha) {
        return f64::INFINITY;
    }
    (2.0 * (2.0 * alpha * alpha + alpha).sqrt() + 2.0 * alpha + 1.0) / (1.0 - 2.0 * alpha)
}

pub fn ub_value_opt(alpha: f64) -> f64 {
    if !in_value_range(alpha) {
        return f64::INFINITY;
    }
    let r = (alpha * (1.0 + 2.0 * alpha)).sqrt();
    let d = 1.0 - 2.0 * alpha;
    2.0 * (2.0 * alpha + r) * (1.0 + 2.0 * alpha + 2.0 * r) / (d * d * r)
}

/// Lower bound on the strict ratio of any deterministic value-cost policy.
pub fn lb_value(alpha: f64) -> f64 {
    if !in_value_range(alpha) {
        return f64::INFINITY;
    }
    let d = 1.0 - 2.0 * alpha;
    2.0 * (1.0 - alpha + ((2.0 - 3.0 * alpha) * alpha).sqrt()) / (d * d)
}

/// Ratio-minimizing growth factor of the value adversary.
pub fn f_star(alpha: f64) -> f64 {
    if !in_value_range(alpha) {
        return f64::INFINITY;
    }
    (1.0 - alpha + (2.0 * alpha - 3.0 * alpha * alpha).sqrt()) / (1.0 - 2.0 * alpha)
}

/// `f_star` rounded down onto the `1e-12` grid.
pub fn f_star_rat(alpha: f64) -> Option<Rat> {
    Rat::floor_to_grid(f_star(alpha), RAT_GRID)
}

/// `lb_value` rounded up onto the `1e-12` grid.
pub fn lb_value_rat(alpha: f64) -> Option<Rat> {
    Rat::ceil_to_grid(lb_value(alpha), RAT_GRID)
}

/// Matching lower and upper bound under size-proportional costs.
///
/// For `alpha == 0` reservation is free of charge but useless against an
/// adaptive adversary, and no deterministic policy is competitive.
pub fn size_bounds(alpha: f64) -> (f64, f64) {
    if alpha > 0.0 {
        (2.0, 2.0)
    } else {
        (f64::INFINITY, f64::INFINITY)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundPoint {
    pub alpha: f64,
    pub lb: f64,
    pub ub_opt: f64,
    pub c_star: f64,
    pub f_star: f64,
}

pub fn bound_point(alpha: f64) -> BoundPoint {
    BoundPoint {
        alpha,
        lb: lb_value(alpha),
        ub_opt: ub_value_opt(alpha),
        c_star: c_star(alpha),
        f_star: f_star(alpha),
    }
}

/// `alpha = i / 200` for `i = 1..=99`.
pub fn alpha_grid() -> Vec<f64> {
    (1..=99).map(|i| i as f64 / 200.0).collect()
}

pub fn bounds_curve() -> Vec<BoundPoint> {
    alpha_grid().into_iter().map(bound_point).collect()
}

/// Additive constant for the size-cost guarantee `OPT <= (2+eps) ALG + beta`.
///
/// With `1 < c < 1 + eps/2` the per-run slack is at most
/// `sup_m (2+eps) alpha (2m+3) - (2+eps-2c) c^m alpha / 2`, where `m` is the
/// density level of the final pool. The supremum is attained where the
/// increment first becomes non-positive, and the result is never below
/// `2 alpha`.
pub fn size_mode_beta(alpha: &Rat, eps: &Rat, c: &Rat) -> Option<Rat> {
    let one = Rat::one();
    let two = Rat::from_integer(2);
    let lead = &two + eps;
    let gap = &lead - &(&two * c);
    if c <= &one || !gap.is_positive() || alpha.is_negative() {
        return None;
    }
    let half = Rat::new(1, 2);
    let term = |m: u32, cm: &Rat| -> Rat {
        &(&(&lead * alpha) * &Rat::from_integer(2 * m as i64 + 3)) - &(&(&(&gap * cm) * alpha) * &half)
    };
    let mut best = &two * alpha;
    let mut cm = one;
    let mut m = 0u32;
    let mut prev = term(0, &cm);
    loop {
        if prev > best {
            best = prev.clone();
        }
        m += 1;
        cm = &cm * c;
        let next = term(m, &cm);
        if next <= prev {
            return Some(best);
        }
        prev = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn reference_values() {
        assert!(close(lb_value(0.25), 10.472136, 1e-5));
        assert!(close(lb_value(0.1), 4.101, 0.01));
        assert!(close(c_star(0.25), 5.449490, 1e-5));
        assert!(close(c_star(0.4), 17.485, 0.01));
        assert!(close(ub_value_opt(0.25), 39.596, 0.01));
        assert!(close(ub_value(0.25, 5.449490), 39.596, 0.01));
        assert!(close(f_star(0.25), 2.618034, 1e-5));
        assert!(close(f_star(0.1), 1.640, 0.01));
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(ub_value(0.25, 2.0), f64::INFINITY);
        assert_eq!(ub_value(0.1, 1.0), f64::INFINITY);
        assert!(close(ub_value(0.0, 3.0), 6.0, 1e-12));
        assert_eq!(ub_value_opt(0.5), f64::INFINITY);
        assert_eq!(lb_value(0.6), f64::INFINITY);
        assert_eq!(size_bounds(0.3), (2.0, 2.0));
        assert_eq!(size_bounds(0.0).0, f64::INFINITY);
    }

    #[test]
    fn small_alpha_limits() {
        assert!(close(c_star(1e-9), 1.0, 1e-3));
        assert!(close(f_star(1e-9), 1.0, 1e-3));
        assert!(close(ub_value_opt(1e-6), 2.0, 0.01));
        assert!(close(lb_value(1e-6), 2.0, 0.01));
    }

    #[test]
    fn grid_shape() {
        let grid = alpha_grid();
        assert_eq!(grid.len(), 99);
        assert_eq!(grid[0], 0.005);
        assert_eq!(grid[98], 0.495);
        assert_eq!(grid[49], 0.25);
    }

    #[test]
    fn rounded_rationals_bracket_floats() {
        let f = f_star_rat(0.25).unwrap();
        assert!(f.to_f64() <= f_star(0.25));
        assert!(f_star(0.25) - f.to_f64() < 2e-12);
        let lb = lb_value_rat(0.1).unwrap();
        assert!(lb.to_f64() >= lb_value(0.1));
    }

    #[test]
    fn beta_examples() {
        // c = 1.125, eps = 1/2: increments stay positive while c^m (1/8)(1/4)/2 < 5.
        let alpha = Rat::new(1, 5);
        let beta = size_mode_beta(&alpha, &Rat::new(1, 2), &Rat::new(9, 8)).unwrap();
        assert!(beta >= Rat::new(2, 5));
        assert!(beta.to_f64() > 40.0 && beta.to_f64() < 80.0, "{}", beta.to_f64());
        assert!(size_mode_beta(&alpha, &Rat::new(1, 2), &Rat::new(5, 4)).is_none());
        assert!(size_mode_beta(&alpha, &Rat::new(1, 2), &Rat::one()).is_none());
        assert_eq!(
            size_mode_beta(&Rat::zero(), &Rat::new(1, 2), &Rat::new(9, 8)),
            Some(Rat::zero())
        );
    }
}
