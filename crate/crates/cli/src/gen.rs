//! Seeded random instances.
//!
//! Instance `index` of a batch draws from its own ChaCha stream, so batches
//! can be generated in any order. Sizes are `k / 2^16` with `k` uniform in
//! `1..=2^16`; densities are log-uniform in `[alpha/4, 8 c alpha]`, rounded up
//! to a multiple of `1e-9`; values are size times density, exact.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resknap_core::{Instance, Item, Rat};

pub const SIZE_STEPS: i64 = 1 << 16;
pub const DENSITY_GRID: u64 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenParams {
    pub alpha: f64,
    pub c: f64,
    pub n_max: usize,
}

impl GenParams {
    /// Density range; a zero `alpha` falls back to a base of `1/8`.
    pub fn density_range(&self) -> (f64, f64) {
        let base = if self.alpha > 0.0 { self.alpha } else { 0.125 };
        (base / 4.0, 8.0 * self.c.max(1.0) * base)
    }
}

pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn instance(seed: u64, index: u64, params: &GenParams) -> Instance {
    let mut rng = rng_for(seed, index);
    let n = rng.gen_range(1..=params.n_max.max(1));
    let (lo, hi) = params.density_range();
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    let items = (0..n)
        .map(|arrival| {
            let k = rng.gen_range(1..=SIZE_STEPS);
            let size = Rat::new(k, SIZE_STEPS);
            let u: f64 = rng.gen();
            let d = (ln_lo + u * (ln_hi - ln_lo)).exp();
            let density = Rat::ceil_to_grid(d, DENSITY_GRID).expect("finite density");
            let value = &size * &density;
            Item::new(size, value, arrival).expect("generated sizes lie in (0, 1]")
        })
        .collect();
    Instance { items }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: GenParams = GenParams { alpha: 0.1, c: 2.0, n_max: 50 };

    #[test]
    fn reproducible_and_independent_streams() {
        assert_eq!(instance(7, 3, &P), instance(7, 3, &P));
        assert_ne!(instance(7, 3, &P), instance(7, 4, &P));
        assert_ne!(instance(7, 3, &P), instance(8, 3, &P));
    }

    #[test]
    fn ranges() {
        let (lo, hi) = P.density_range();
        for i in 0..50 {
            let inst = instance(1, i, &P);
            assert!((1..=50).contains(&inst.len()));
            for (j, x) in inst.items.iter().enumerate() {
                assert_eq!(x.arrival, j);
                assert!(x.size.is_positive() && x.size <= Rat::one());
                let scaled = &x.size * &Rat::from_integer(SIZE_STEPS);
                assert_eq!(Rat::from(scaled.floor()), scaled);
                let d = x.density().to_f64();
                assert!(d >= lo * (1.0 - 1e-9) && d <= hi + 1e-9, "{d}");
            }
        }
    }

    #[test]
    fn zero_alpha_range_is_positive() {
        let p = GenParams { alpha: 0.0, c: 1.0, n_max: 5 };
        let (lo, hi) = p.density_range();
        assert!(lo > 0.0 && hi > lo);
    }
}
