use std::cmp::Ordering;

use proptest::prelude::*;
use resknap_core::model::{gain, ratio, Instance, Item, Mode, Ratio};
use resknap_core::policy::{run, Decision, PolicyConfig, PolicyKind};
use resknap_core::pool::Pool;
use resknap_core::rat::Rat;
use resknap_core::solver::{brute_force, fractional_bound, optimal_packing};

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

fn item_strategy() -> impl Strategy<Value = (i64, i64)> {
    // size k/64, value j/16
    (1i64..=64, 0i64..=96)
}

fn items_from(raw: &[(i64, i64)]) -> Vec<Item> {
    raw.iter()
        .enumerate()
        .map(|(i, &(s, v))| Item::new(rat(s, 64), rat(v, 16), i).unwrap())
        .collect()
}

/// Plain include/exclude recursion with the same tie-break on sorted arrivals.
fn enumerate_oracle(items: &[Item], cap: &Rat) -> (Rat, Vec<usize>) {
    fn go(items: &[Item], i: usize, room: Rat, value: Rat, set: &mut Vec<usize>, best: &mut (Rat, Vec<usize>)) {
        if i == items.len() {
            let better = match value.cmp(&best.0) {
                Ordering::Greater => true,
                Ordering::Equal => *set < best.1,
                Ordering::Less => false,
            };
            if better {
                *best = (value, set.clone());
            }
            return;
        }
        if items[i].size <= room {
            set.push(items[i].arrival);
            go(items, i + 1, &room - &items[i].size, &value + &items[i].value, set, best);
            set.pop();
        }
        go(items, i + 1, room, value, set, best);
    }
    let mut best = (Rat::zero(), Vec::new());
    go(items, 0, cap.clone(), Rat::zero(), &mut Vec::new(), &mut best);
    best
}

/// Pool contents by literal replay: append, then drop the least dense
/// (later arrival on ties) while the rest still has size at least 1.
fn pool_oracle(items: &[Item]) -> Vec<usize> {
    let mut held: Vec<Item> = Vec::new();
    for x in items {
        held.push(x.clone());
        loop {
            let mut least = 0;
            for j in 1..held.len() {
                let (a, b) = (&held[j], &held[least]);
                // density a < density b  <=>  va * sb < vb * sa
                let lhs = &a.value * &b.size;
                let rhs = &b.value * &a.size;
                if lhs < rhs || (lhs == rhs && a.arrival > b.arrival) {
                    least = j;
                }
            }
            let total: Rat = held.iter().map(|x| &x.size).sum();
            if held.is_empty() || &total - &held[least].size < Rat::one() {
                break;
            }
            held.remove(least);
        }
    }
    let mut ids: Vec<usize> = held.iter().map(|x| x.arrival).collect();
    ids.sort_unstable();
    ids
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rat_field_laws(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
        let x = rat(a, b);
        let y = rat(c, d);
        prop_assert_eq!(&(&x + &y) - &y, x.clone());
        prop_assert_eq!(&x * &y, &y * &x);
        if !y.is_zero() {
            prop_assert_eq!(&(&x / &y) * &y, x.clone());
        }
        prop_assert_eq!(x.to_string().parse::<Rat>().unwrap(), x.clone());
        prop_assert_eq!(rat(a * 7, b * 7), x);
    }

    #[test]
    fn gain_is_additive(raw in prop::collection::vec(item_strategy(), 0..8), alpha in 0i64..20) {
        let xs = items_from(&raw);
        let mode = Mode::value(rat(alpha, 40)).unwrap();
        let whole = gain(&[], &xs, &mode).unwrap();
        let split = xs.len() / 2;
        let a = gain(&[], &xs[..split], &mode).unwrap();
        let b = gain(&[], &xs[split..], &mode).unwrap();
        prop_assert_eq!(whole.reservation_cost, a.reservation_cost + b.reservation_cost);
    }

    #[test]
    fn ratio_monotone(opt in 1i64..1000, alg in 1i64..1000, beta in 0i64..10, bump in 1i64..100) {
        let r = ratio(&Rat::from_integer(opt), &Rat::from_integer(alg), &Rat::from_integer(beta));
        let lower_alg = ratio(&Rat::from_integer(opt), &Rat::from_integer(alg + bump), &Rat::from_integer(beta));
        let higher_opt = ratio(&Rat::from_integer(opt + bump), &Rat::from_integer(alg), &Rat::from_integer(beta));
        prop_assert!(lower_alg <= r);
        prop_assert!(higher_opt >= r);
        prop_assert_eq!(ratio(&Rat::from_integer(opt + beta), &Rat::zero(), &Rat::from_integer(beta)), Ratio::Infinite);
    }

    #[test]
    fn pool_matches_replay(raw in prop::collection::vec(item_strategy(), 1..12)) {
        let xs = items_from(&raw);
        let mut pool = Pool::new();
        let mut last_d = Rat::zero();
        for x in &xs {
            pool.insert(x.clone());
            let least = pool.least_dense().unwrap();
            prop_assert!(pool.size() - &least.size < Rat::one());
            if pool.size() >= &Rat::one() {
                prop_assert!(pool.d_delta() >= last_d);
                last_d = pool.d_delta();
            }
        }
        let mut ids: Vec<usize> = pool.entries().map(|x| x.arrival).collect();
        ids.sort_unstable();
        prop_assert_eq!(ids, pool_oracle(&xs));
        let mut all: Vec<usize> = pool.all_reserved().iter().map(|x| x.arrival).collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..xs.len()).collect::<Vec<_>>());
    }

    #[test]
    fn solvers_agree(raw in prop::collection::vec(item_strategy(), 0..14), cap in 1i64..=64) {
        let xs = items_from(&raw);
        let cap = rat(cap, 64);
        let bb = optimal_packing(&xs, &cap);
        let bf = brute_force(&xs, &cap).unwrap();
        let (oracle_value, oracle_set) = enumerate_oracle(&xs, &cap);
        prop_assert_eq!(&bb.total_value, &oracle_value);
        prop_assert_eq!(&bf.total_value, &oracle_value);
        prop_assert_eq!(bb.arrivals(), oracle_set.clone());
        prop_assert_eq!(bf.arrivals(), oracle_set);
        prop_assert!(bb.total_size <= cap);
        prop_assert!(fractional_bound(&xs, &cap) >= bb.total_value);
    }

    #[test]
    fn optimum_monotone_and_scaling(raw in prop::collection::vec(item_strategy(), 1..12), lambda in 1i64..9) {
        let xs = items_from(&raw);
        let base = optimal_packing(&xs[..xs.len() - 1], &Rat::one()).total_value;
        let full = optimal_packing(&xs, &Rat::one()).total_value;
        prop_assert!(full >= base);
        let scale = rat(lambda, 3);
        let scaled: Vec<Item> = xs
            .iter()
            .map(|x| Item::new(x.size.clone(), &x.value * &scale, x.arrival).unwrap())
            .collect();
        prop_assert_eq!(optimal_packing(&scaled, &Rat::one()).total_value, &full * &scale);
    }

    #[test]
    fn alg1_ledger_holds(raw in prop::collection::vec(item_strategy(), 0..40), alpha in 1i64..8, c in 1i64..6) {
        let alpha = rat(alpha, 16);
        let config = PolicyConfig::new(Mode::size(alpha.clone()).unwrap(), &Rat::one() + &rat(c, 8), PolicyKind::Alg1).unwrap();
        let inst = Instance { items: items_from(&raw) };
        let trace = run(&config, &inst).unwrap();
        prop_assert_eq!(trace.count(Decision::Pack), 0);
        prop_assert!(trace.ledger.s_c < Rat::one());
        prop_assert!(trace.report.net_gain >= trace.ledger.gain_floor(&alpha));
        prop_assert!(trace.report.reservation_cost <= trace.ledger.size_cost_ceiling(&alpha));
    }

    #[test]
    fn alg2_ledger_holds(raw in prop::collection::vec(item_strategy(), 0..40), alpha in 1i64..8, c in 0i64..24) {
        let alpha = rat(alpha, 16);
        let c = &Rat::one() + &rat(c, 4);
        let config = PolicyConfig::new(Mode::value(alpha.clone()).unwrap(), c.clone(), PolicyKind::Alg2).unwrap();
        let inst = Instance { items: items_from(&raw) };
        let trace = run(&config, &inst).unwrap();
        prop_assert_eq!(trace.count(Decision::Pack), 0);
        if let Some(ceiling) = trace.ledger.low_density_ceiling(&alpha, &c) {
            prop_assert!(trace.ledger.low_density_cost <= ceiling);
        }
        let reserved: Rat = trace.reserved.iter().map(|x| &x.size).sum();
        prop_assert!(trace.final_packing.iter().all(|x| trace.reserved.contains(x)));
        prop_assert!(trace.final_packing.iter().map(|x| &x.size).sum::<Rat>() <= Rat::one());
        prop_assert!(reserved >= Rat::zero());
    }
}
