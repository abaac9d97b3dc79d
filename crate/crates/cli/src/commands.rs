use std::path::Path;

use resknap_core::adversary::{finite_n_bound, play_size, play_value, SizeAdversaryConfig, ValueAdversaryConfig};
use resknap_core::bounds::{bounds_curve, lb_value, ub_value};
use resknap_core::policy::run;
use resknap_core::{optimal_packing, ratio, Item, Mode, ModeKind, PolicyConfig, PolicyKind, Rat, Ratio};

use crate::args::{
    AdversaryArgs, BetaArg, BoundsCurveArgs, Command, FamilyArg, ModeArg, SimulateArgs, SolveArgs, SweepArgs,
    VerifyArgs,
};
use crate::checks::{default_size_c, default_value_c, size_batch, value_batch, value_game, SizeCheck, ValueCheck};
use crate::error::{CliError, CliResult};
use crate::io::{format_number, instance_text, read_instance, write_text};
use crate::report::{sig, Report};

/// Overrides every `--seed` flag when set.
pub const SEED_ENV: &str = "RESKNAP_SEED";

/// What a command printed and whether its checks held.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub passed: bool,
}

impl Outcome {
    fn pass(stdout: String) -> Outcome {
        Outcome { stdout, passed: true }
    }
}

pub fn execute(command: &Command) -> CliResult<Outcome> {
    match command {
        Command::Simulate(a) => simulate(a),
        Command::Solve(a) => solve(a),
        Command::Adversary(a) => adversary(a),
        Command::BoundsCurve(a) => bounds_curve_cmd(a),
        Command::Verify(a) => verify(a),
        Command::Sweep(a) => sweep(a),
    }
}

pub fn effective_seed(flag: u64) -> CliResult<u64> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{SEED_ENV}={s:?} is not an unsigned integer"))),
        Err(std::env::VarError::NotPresent) => Ok(flag),
        Err(e) => Err(CliError::Config(format!("{SEED_ENV}: {e}"))),
    }
}

fn emit(report: &Report, path: Option<&Path>) -> CliResult<String> {
    let text = report.to_string();
    if let Some(p) = path {
        write_text(p, &text)?;
    }
    Ok(text)
}

fn arrivals(items: &[Item]) -> String {
    items.iter().map(|x| x.arrival.to_string()).collect::<Vec<_>>().join(",")
}

fn mode_name(kind: ModeKind) -> &'static str {
    match kind {
        ModeKind::SizeProportional => "size",
        ModeKind::ValueProportional => "value",
    }
}

/// Threshold factor used when `--c` is absent.
pub fn default_c(kind: PolicyKind, mode: &Mode, epsilon: &Rat) -> CliResult<Rat> {
    match kind {
        PolicyKind::Alg1 => Ok(default_size_c(epsilon)),
        PolicyKind::Alg2 => default_value_c(&mode.alpha),
        _ => Ok(Rat::one()),
    }
}

pub fn simulate(a: &SimulateArgs) -> CliResult<Outcome> {
    let instance = read_instance(&a.input)?;
    let mode = Mode::new(a.mode.into(), a.alpha.clone())?;
    let kind: PolicyKind = match (a.policy, a.mode) {
        (Some(p), _) => p.into(),
        (None, ModeArg::Size) => PolicyKind::Alg1,
        (None, ModeArg::Value) => PolicyKind::Alg2,
    };
    let c = match &a.c {
        Some(c) => c.clone(),
        None => default_c(kind, &mode, &a.epsilon)?,
    };
    let config = PolicyConfig::new(mode, c, kind)?;
    let trace = run(&config, &instance)?;
    let opt = optimal_packing(&instance.items, &Rat::one()).total_value;

    let mut r = Report::new("simulate");
    r.push("policy", kind.name());
    r.push("mode", mode_name(config.mode.kind));
    r.push("alpha", &config.mode.alpha);
    r.push("c", &config.c);
    r.push("beta", &a.beta);
    r.push("items", instance.len());
    let decisions: Vec<String> = trace.decisions.iter().map(|(_, d)| d.to_string()).collect();
    r.push("decisions", decisions.join(","));
    r.push("reserved", arrivals(&trace.reserved));
    r.push("final_packing", arrivals(&trace.final_packing));
    r.push("packed_value", &trace.report.packed_value);
    r.push("reservation_cost", &trace.report.reservation_cost);
    r.push("net_gain", &trace.report.net_gain);
    r.push("opt_value", &opt);
    r.push("strict_ratio", ratio_text(&ratio(&opt, &trace.report.net_gain, &Rat::zero())));
    r.push("ratio", ratio_text(&ratio(&opt, &trace.report.net_gain, &a.beta)));
    Ok(Outcome::pass(emit(&r, a.report.as_deref())?))
}

fn ratio_text(r: &Ratio) -> String {
    match r {
        Ratio::Finite(x) => x.to_string(),
        Ratio::Infinite => "inf".into(),
    }
}

pub fn solve(a: &SolveArgs) -> CliResult<Outcome> {
    if !a.capacity.is_positive() {
        return Err(CliError::Config(format!("capacity must be positive, got {}", a.capacity)));
    }
    let instance = read_instance(&a.input)?;
    let sol = optimal_packing(&instance.items, &a.capacity);
    let mut r = Report::new("solve");
    r.push("items", instance.len());
    r.push("capacity", &a.capacity);
    r.push("opt_value", &sol.total_value);
    r.push("total_size", &sol.total_size);
    r.push("chosen", arrivals(&sol.chosen));
    Ok(Outcome::pass(emit(&r, a.report.as_deref())?))
}

pub fn adversary(a: &AdversaryArgs) -> CliResult<Outcome> {
    let (family_mode, family_name) = match a.family {
        FamilyArg::Size => (ModeArg::Size, "size"),
        FamilyArg::Value => (ModeArg::Value, "value"),
    };
    if let Some(m) = a.mode {
        if m != family_mode {
            return Err(CliError::Config(format!("the {family_name} adversary needs --mode {family_name}")));
        }
    }
    let kind: PolicyKind = a.policy.into();
    let mode = Mode::new(family_mode.into(), a.alpha.clone())?;
    let c = match &a.c {
        Some(c) => c.clone(),
        None => default_c(kind, &mode, &Rat::new(1, 2))?,
    };
    let policy = PolicyConfig::new(mode, c, kind)?;

    let mut r = Report::new("adversary");
    r.push("family", family_name);
    r.push("policy", kind.name());
    r.push("alpha", &policy.mode.alpha);
    r.push("c", &policy.c);
    let result = match a.family {
        FamilyArg::Size => {
            let mut config = SizeAdversaryConfig::new(a.epsilon.clone(), a.big_c.clone(), a.beta.clone())?;
            if let Some(m) = a.max_rounds {
                config = config.with_max_rounds(m);
            }
            r.push("epsilon", &config.epsilon);
            r.push("C", &config.big_c);
            r.push("beta", &config.beta);
            play_size(&config, &policy)?
        }
        FamilyArg::Value => {
            let alpha = policy.mode.alpha.to_f64();
            if !(alpha > 0.0 && alpha < 0.5) {
                return Err(CliError::Config(format!("the value adversary needs 0 < alpha < 1/2, got {}", a.alpha)));
            }
            let mut config = ValueAdversaryConfig::for_alpha(alpha, a.n, a.eps2.clone())?;
            if let Some(m) = a.max_rounds {
                config.max_rounds = m;
            }
            r.push("n", config.n);
            r.push("eps2", &a.eps2);
            play_value(&config, &policy)?
        }
    };
    r.push("termination", result.termination.name());
    r.push("rounds", result.rounds());
    r.push("opt_value", &result.opt_value);
    r.push("net_gain", &result.trace.report.net_gain);
    r.push("forced_ratio", ratio_text(&result.forced_ratio));
    r.push("forced_ratio_f64", sig(result.forced_ratio.to_f64(), 12));
    if a.family == FamilyArg::Value {
        let alpha = policy.mode.alpha.to_f64();
        match &result.realized_factor {
            Some(f) => {
                r.push("realized_factor", sig(f.to_f64(), 12));
                r.push("finite_n_bound", sig(finite_n_bound(alpha, f.to_f64(), a.n), 12));
            }
            None => {
                r.push("realized_factor", "none");
                r.push("finite_n_bound", "none");
            }
        }
        r.push("lb", sig(lb_value(alpha), 12));
        r.push("ub", sig(ub_value(alpha, policy.c.to_f64()), 12));
    }
    Ok(Outcome::pass(emit(&r, a.report.as_deref())?))
}

pub const CURVE_HEADER: &str = "alpha,lb,ub_opt,c_star,f_star";

pub fn bounds_curve_csv() -> String {
    let mut out = format!("{CURVE_HEADER}\n");
    for p in bounds_curve() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.alpha,
            sig(p.lb, 12),
            sig(p.ub_opt, 12),
            sig(p.c_star, 12),
            sig(p.f_star, 12)
        ));
    }
    out
}

fn bounds_curve_cmd(a: &BoundsCurveArgs) -> CliResult<Outcome> {
    let csv = bounds_curve_csv();
    match &a.output {
        Some(p) => {
            write_text(p, &csv)?;
            Ok(Outcome::pass(String::new()))
        }
        None => Ok(Outcome::pass(csv)),
    }
}

pub fn verify(a: &VerifyArgs) -> CliResult<Outcome> {
    let seed = effective_seed(a.seed)?;
    let mut r = Report::new("verify");
    r.push("mode", if a.mode == ModeArg::Size { "size" } else { "value" });
    r.push("alpha", &a.alpha);
    r.push("seed", seed);
    r.push("instances", a.n);
    r.push("n_max", a.n_max);

    let (batch, game_failures) = match a.mode {
        ModeArg::Size => {
            let c = a.c.clone().unwrap_or_else(|| default_size_c(&a.epsilon));
            let beta = match &a.beta {
                BetaArg::FromLedger => None,
                BetaArg::Value(b) => Some(b.clone()),
            };
            let check = SizeCheck::new(a.alpha.clone(), a.epsilon.clone(), c, beta)?;
            r.push("policy", "alg1");
            r.push("c", &check.c);
            r.push("epsilon", &check.epsilon);
            r.push("beta", sig(check.beta.to_f64(), 12));
            r.push("guarantee", sig(2.0 + check.epsilon.to_f64(), 12));
            (size_batch(seed, a.n, a.n_max, &check)?, Vec::new())
        }
        ModeArg::Value => {
            let c = match &a.c {
                Some(c) => c.clone(),
                None => default_value_c(&a.alpha)?,
            };
            let check = ValueCheck::new(a.alpha.clone(), c)?;
            r.push("policy", "alg2");
            r.push("c", &check.c);
            r.push("guarantee", sig(check.ub, 12));
            let batch = value_batch(seed, a.n, a.n_max, &check)?;
            let mut game_failures = Vec::new();
            if let Some(n) = a.game_n {
                let (game, reasons) = value_game(&check, n, &a.eps2)?;
                r.push("game_n", n);
                r.push("game_termination", game.termination.name());
                r.push("game_rounds", game.rounds());
                r.push("game_forced_ratio", sig(game.forced_ratio.to_f64(), 12));
                game_failures = reasons;
            }
            (batch, game_failures)
        }
    };
    r.push("worst_ratio", sig(batch.worst.to_f64(), 12));
    r.push("worst_strict_ratio", sig(batch.worst_strict.to_f64(), 12));
    r.push("violations", batch.violations.len());
    let passed = batch.violations.is_empty() && game_failures.is_empty();
    r.push("result", if passed { "pass" } else { "fail" });
    let mut stdout = emit(&r, a.report.as_deref())?;
    if let Some(v) = batch.violations.first() {
        stdout.push_str(&format!("# counterexample instance {}: {}\n", v.index, v.reasons.join("; ")));
        stdout.push_str(&instance_text(&v.instance));
    }
    for reason in &game_failures {
        stdout.push_str(&format!("# adversary game: {reason}\n"));
    }
    Ok(Outcome { stdout, passed })
}

pub const SWEEP_HEADER: &str = "alpha,measured_worst,adversary_forced,lb,ub";

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub alpha: Rat,
    pub measured_worst: Ratio,
    pub adversary_forced: Ratio,
    pub lb: f64,
    pub ub: f64,
}

impl SweepRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{}",
            format_number(&self.alpha),
            sig(self.measured_worst.to_f64(), 12),
            sig(self.adversary_forced.to_f64(), 12),
            sig(self.lb, 12),
            sig(self.ub, 12)
        )
    }

    /// Neither measurement may exceed the proven guarantee.
    pub fn within_guarantee(&self) -> bool {
        self.measured_worst.to_f64() <= self.ub && self.adversary_forced.to_f64() <= self.ub
    }
}

pub fn sweep_rows(alphas: &[Rat], seed: u64, n: u64, n_max: usize, game_n: usize, eps2: &Rat) -> CliResult<Vec<SweepRow>> {
    alphas
        .iter()
        .map(|alpha| {
            let check = ValueCheck::new(alpha.clone(), default_value_c(alpha)?)?;
            let batch = value_batch(seed, n, n_max, &check)?;
            let (game, _) = value_game(&check, game_n, eps2)?;
            Ok(SweepRow {
                alpha: alpha.clone(),
                measured_worst: batch.worst,
                adversary_forced: game.forced_ratio,
                lb: lb_value(alpha.to_f64()),
                ub: check.ub,
            })
        })
        .collect()
}

pub fn sweep(a: &SweepArgs) -> CliResult<Outcome> {
    let seed = effective_seed(a.seed)?;
    let rows = sweep_rows(&a.alphas.0, seed, a.n, a.n_max, a.game_n, &a.eps2)?;
    let mut csv = format!("{SWEEP_HEADER}\n");
    for row in &rows {
        csv.push_str(&row.csv());
        csv.push('\n');
    }
    let passed = rows.iter().all(SweepRow::within_guarantee);
    let stdout = match &a.output {
        Some(p) => {
            write_text(p, &csv)?;
            String::new()
        }
        None => csv,
    };
    Ok(Outcome { stdout, passed })
}
