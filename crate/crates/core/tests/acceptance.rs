//! Acceptance criteria. Each prints one `PASS`/`FAIL` line; the run fails
//! if any criterion has a single failure.

use std::path::Path;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use fairdiv::io::{generate, Family};
use fairdiv::model::{is_on_mbb, Allocation, Instance, MarketOutcome, Rational};
use fairdiv::oracles::{
    bruteforce_best, check_ef1, check_eq1, check_fpo_lp, check_pef1, check_po_bruteforce, Objective, Score,
};
use fairdiv::pls::{local_search, neighbor_d, EpsilonScheme};
use fairdiv::solver::{solve_ef1_fpo, solve_eq1_fpo, MarketRun, SolverError};
use fairdiv::structured::{solve_constant_n_ef1_po, solve_constant_nk, Route};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MIXED: [Family; 6] = [
    Family::Random,
    Family::Binary,
    Family::Kary(2),
    Family::Kary(3),
    Family::Positive,
    Family::Identical,
];

fn report(id: u32, title: &str, failures: &[String], total: usize, elapsed: Duration) -> bool {
    let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!(
        "criterion {id} [{verdict}] {title}: {}/{total} passed in {} ms",
        total.saturating_sub(failures.len()),
        elapsed.as_millis()
    );
    for f in failures.iter().take(5) {
        println!("    {f}");
    }
    failures.is_empty()
}

/// Deterministic corpus: sizes drawn from `rng`, families cycled.
fn corpus(seed: u64, count: usize, families: &[Family], max_n: usize, max_m: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(2..=max_n);
            let m = rng.gen_range(2..=max_m);
            let vmax = rng.gen_range(1..=10);
            let family = families[i % families.len()];
            let vmax = match family {
                Family::Kary(k) => vmax.max(k as u64),
                _ => vmax,
            };
            generate(family, n, m, vmax, rng.gen()).expect("valid generator parameters")
        })
        .collect()
}

type Runs = Vec<(Instance, Result<MarketRun, SolverError>)>;

struct Batch {
    runs: Runs,
    elapsed: Duration,
}

fn ef1_batch() -> &'static Batch {
    static BATCH: OnceLock<Batch> = OnceLock::new();
    BATCH.get_or_init(|| {
        let start = Instant::now();
        let runs = corpus(1, 500, &MIXED, 4, 7)
            .into_iter()
            .map(|inst| {
                let run = solve_ef1_fpo(&inst);
                (inst, run)
            })
            .collect();
        Batch {
            runs,
            elapsed: start.elapsed(),
        }
    })
}

fn eq1_batch() -> &'static Batch {
    static BATCH: OnceLock<Batch> = OnceLock::new();
    BATCH.get_or_init(|| {
        let start = Instant::now();
        let runs = corpus(2, 300, &[Family::Positive], 4, 7)
            .into_iter()
            .map(|inst| {
                let run = solve_eq1_fpo(&inst);
                (inst, run)
            })
            .collect();
        Batch {
            runs,
            elapsed: start.elapsed(),
        }
    })
}

fn criterion_1_ef1_market_soundness() -> bool {
    let batch = ef1_batch();
    let start = Instant::now();
    let mut failures = Vec::new();
    for (k, (inst, run)) in batch.runs.iter().enumerate() {
        let run = match run {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("#{k}: aborted: {e}"));
                continue;
            }
        };
        let a = &run.outcome.allocation;
        if !check_ef1(inst, a).holds() {
            failures.push(format!("#{k}: not EF1"));
        }
        if !is_on_mbb(inst, &run.outcome) {
            failures.push(format!("#{k}: off MBB"));
        }
        if !check_fpo_lp(inst, a).map(|v| v.holds()).unwrap_or(false) {
            failures.push(format!("#{k}: fPO LP refuted or unavailable"));
        }
    }
    let elapsed = batch.elapsed + start.elapsed();
    if elapsed >= Duration::from_secs(60) {
        failures.push(format!("runtime {} ms exceeds 60 s", elapsed.as_millis()));
    }
    report(
        1,
        "EF1 + on-MBB + fPO LP, 500 mixed instances, under 60 s",
        &failures,
        batch.runs.len(),
        elapsed,
    )
}

fn criterion_2_eq1_market_soundness() -> bool {
    let batch = eq1_batch();
    let start = Instant::now();
    let mut failures = Vec::new();
    for (k, (inst, run)) in batch.runs.iter().enumerate() {
        match run {
            Ok(run) => {
                if !check_eq1(inst, &run.outcome.allocation).holds() {
                    failures.push(format!("#{k}: not EQ1"));
                }
                if !is_on_mbb(inst, &run.outcome) {
                    failures.push(format!("#{k}: off MBB"));
                }
            }
            Err(e) => failures.push(format!("#{k}: aborted: {e}")),
        }
    }
    report(
        2,
        "EQ1 + on-MBB, 300 positive instances",
        &failures,
        batch.runs.len(),
        batch.elapsed + start.elapsed(),
    )
}

fn criterion_3_trace_audits() -> bool {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut total = 0;
    for (label, batch) in [("ef1", ef1_batch()), ("eq1", eq1_batch())] {
        for (k, (inst, run)) in batch.runs.iter().enumerate() {
            total += 1;
            let Ok(run) = run else {
                failures.push(format!("{label} #{k}: no trace"));
                continue;
            };
            let cap = inst.agents().pow(3) * inst.goods();
            let audits = [
                run.trace.audit_on_mbb(),
                run.trace.audit_min_monotone(),
                run.trace.audit_reentry(&run.utility_counts),
                run.trace.audit_epoch_transfers(cap),
            ];
            for err in audits.into_iter().filter_map(Result::err) {
                failures.push(format!("{label} #{k}: {err}"));
            }
        }
    }
    report(
        3,
        "trace audits on every run of criteria 1 and 2",
        &failures,
        total,
        start.elapsed(),
    )
}

/// A random allocation with integer prices and valuations built so that each
/// agent's MBB ratio is `alpha_i`, its own goods are MBB and other goods are
/// MBB or strictly worse. Resampled until the outcome is pEF1.
fn random_pef1_outcome(rng: &mut ChaCha8Rng) -> (Instance, MarketOutcome) {
    loop {
        let n = rng.gen_range(2..=4);
        let m = rng.gen_range(2..=7);
        let prices: Vec<u64> = (0..m).map(|_| rng.gen_range(1..=5)).collect();
        let alpha: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
        let owner: Vec<usize> = (0..m).map(|_| rng.gen_range(0..n)).collect();
        let values: Vec<Vec<u64>> = (0..n)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let mbb = alpha[i] * prices[j];
                        if owner[j] == i || rng.gen_ratio(3, 10) {
                            mbb
                        } else {
                            rng.gen_range(0..mbb)
                        }
                    })
                    .collect()
            })
            .collect();
        let Ok(instance) = Instance::from_values(values) else {
            continue;
        };
        let allocation = Allocation::from_owners(n, owner).expect("owners in range");
        let prices = prices.iter().map(|&p| Rational::from_integer(p.into())).collect();
        let outcome = MarketOutcome::new(allocation, prices).expect("positive prices");
        if check_pef1(&outcome, &Rational::from_integer(0.into())).holds() {
            return (instance, outcome);
        }
    }
}

fn criterion_4_pef1_on_mbb_implies_ef1_fpo() -> bool {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut failures = Vec::new();
    for k in 0..1000 {
        let (inst, outcome) = random_pef1_outcome(&mut rng);
        if !is_on_mbb(&inst, &outcome) {
            failures.push(format!("#{k}: construction left MBB"));
            continue;
        }
        if !check_ef1(&inst, &outcome.allocation).holds() {
            failures.push(format!("#{k}: not EF1"));
        }
        if !check_fpo_lp(&inst, &outcome.allocation)
            .map(|v| v.holds())
            .unwrap_or(false)
        {
            failures.push(format!("#{k}: fPO LP refuted or unavailable"));
        }
    }
    report(
        4,
        "1000 random on-MBB pEF1 outcomes are EF1 and fPO",
        &failures,
        1000,
        start.elapsed(),
    )
}

fn criterion_5_event_bound() -> bool {
    let start = Instant::now();
    let batch = ef1_batch();
    let mut failures = Vec::new();
    let mut worst = 0u64;
    for (k, (_, run)) in batch.runs.iter().enumerate() {
        match run {
            Ok(run) if run.events() > run.event_bound => {
                failures.push(format!("#{k}: {} events > bound {}", run.events(), run.event_bound));
            }
            Ok(run) => worst = worst.max(run.events()),
            Err(e) => failures.push(format!("#{k}: aborted: {e}")),
        }
    }
    println!("    most events in one run: {worst}");
    report(
        5,
        "events within the poly(n, m, U) bound, no aborts",
        &failures,
        batch.runs.len(),
        start.elapsed(),
    )
}

fn criterion_6_constant_nk_matches_bruteforce() -> bool {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = Vec::new();
    for k in 0..200 {
        let n = rng.gen_range(2..=3);
        let m = rng.gen_range(2..=8);
        let arity = rng.gen_range(1..=3);
        let vmax = rng.gen_range(arity as u64..=10);
        let inst = generate(Family::Kary(arity), n, m, vmax, rng.gen()).expect("valid parameters");
        let fast = solve_constant_nk(&inst, Objective::MaxNash).expect("MNW solves");
        let slow = bruteforce_best(&inst, Objective::MaxNash).expect("within cap");
        match (&fast.score, &slow.score) {
            (Score::Nash(a), Score::Nash(b)) if a.product(n) == b.product(n) => {}
            (a, b) => failures.push(format!("#{k}: MNW {a:?} vs {b:?}")),
        }
        let fast = solve_constant_nk(&inst, Objective::Leximin).expect("leximin solves");
        let slow = bruteforce_best(&inst, Objective::Leximin).expect("within cap");
        if fast.score != slow.score {
            failures.push(format!("#{k}: leximin {:?} vs {:?}", fast.score, slow.score));
        }
    }
    report(
        6,
        "MNW product and leximin vector match brute force, 200 k-ary instances",
        &failures,
        200,
        start.elapsed(),
    )
}

fn criterion_7_constant_n_pipeline() -> bool {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = Vec::new();
    let mut market_route = 0;
    for k in 0..200 {
        let n = rng.gen_range(2..=3);
        let m = rng.gen_range(2..=7);
        let family = MIXED[k % MIXED.len()];
        let vmax = rng.gen_range(3..=10);
        let inst = generate(family, n, m, vmax, rng.gen()).expect("valid parameters");
        match solve_constant_n_ef1_po(&inst) {
            Ok(res) => {
                market_route += usize::from(res.route == Route::Market);
                if !check_ef1(&inst, &res.allocation).holds() {
                    failures.push(format!("#{k}: not EF1 on the base instance"));
                }
                if !check_po_bruteforce(&inst, &res.allocation)
                    .map(|v| v.holds())
                    .unwrap_or(false)
                {
                    failures.push(format!("#{k}: not PO on the base instance"));
                }
            }
            Err(e) => failures.push(format!("#{k}: {e}")),
        }
    }
    println!("    {market_route} of 200 solved by the market route");
    report(
        7,
        "perturbed pipeline is EF1 and PO on the base instance, 200 instances",
        &failures,
        200,
        start.elapsed(),
    )
}

fn criterion_8_local_search() -> bool {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures = Vec::new();
    let (mut steps, mut nontrivial) = (0u64, 0usize);
    for k in 0..100 {
        let n = rng.gen_range(2..=3);
        let m = rng.gen_range(2..=5);
        let family = MIXED[k % MIXED.len()];
        let vmax = rng.gen_range(3..=10);
        let inst = generate(family, n, m, vmax, rng.gen()).expect("valid parameters");
        let scheme = EpsilonScheme::test_mode(&inst);
        let res = match local_search(&inst, &scheme) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("#{k}: {e}"));
                continue;
            }
        };
        steps += res.stats.steps;
        nontrivial += usize::from(res.stats.steps > 0);
        if let Some(w) = res.costs.windows(2).position(|w| w[0] >= w[1]) {
            failures.push(format!("#{k}: step {} does not increase the cost", w + 1));
        }
        if res.stats.steps > res.walk_budget {
            failures.push(format!("#{k}: {} steps > budget {}", res.stats.steps, res.walk_budget));
        }
        match neighbor_d(&inst, &scheme, &res.configuration) {
            Ok(next) if next == res.configuration => {}
            _ => failures.push(format!("#{k}: final configuration is not a fixpoint")),
        }
        let a = &res.configuration.allocation;
        if !check_ef1(&inst, a).holds() {
            failures.push(format!("#{k}: fixpoint not EF1"));
        }
        if !check_po_bruteforce(&inst, a).map(|v| v.holds()).unwrap_or(false) {
            failures.push(format!("#{k}: fixpoint not PO"));
        }
    }
    println!("    {steps} walk steps in total, {nontrivial} walks left the initial configuration");
    report(
        8,
        "local search strictly improves, stays in budget, ends EF1 + PO, 100 instances",
        &failures,
        100,
        start.elapsed(),
    )
}

/// Identifiers `f32`/`f64` anywhere in library sources.
fn float_tokens(dir: &Path, hits: &mut Vec<String>) {
    let mut entries: Vec<_> = std::fs::read_dir(dir)
        .expect("source dir")
        .flatten()
        .map(|e| e.path())
        .collect();
    entries.sort();
    for path in entries {
        if path.is_dir() {
            float_tokens(&path, hits);
        } else if path.extension().is_some_and(|e| e == "rs") {
            let text = std::fs::read_to_string(&path).expect("readable source");
            for (line_no, line) in text.lines().enumerate() {
                let found = line
                    .split(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                    .any(|tok| tok == "f32" || tok == "f64");
                if found {
                    hits.push(format!("{}:{}", path.display(), line_no + 1));
                }
            }
        }
    }
}

fn criterion_9_no_floating_point() -> bool {
    let start = Instant::now();
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("src");
    let mut hits = Vec::new();
    float_tokens(&src, &mut hits);
    report(9, "no f32/f64 in any library source", &hits, 1, start.elapsed())
}

fn main() {
    let criteria: [fn() -> bool; 9] = [
        criterion_1_ef1_market_soundness,
        criterion_2_eq1_market_soundness,
        criterion_3_trace_audits,
        criterion_4_pef1_on_mbb_implies_ef1_fpo,
        criterion_5_event_bound,
        criterion_6_constant_nk_matches_bruteforce,
        criterion_7_constant_n_pipeline,
        criterion_8_local_search,
        criterion_9_no_floating_point,
    ];
    let failed = criteria.iter().filter(|c| !c()).count();
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
