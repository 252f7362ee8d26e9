//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

#![allow(clippy::needless_range_loop)]

use std::collections::BTreeSet;
use std::process::ExitCode;

use hdwalk_core::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn reg(s: &str) -> CoinRegister {
    s.parse().unwrap()
}

fn random_table(rng: &mut ChaCha8Rng, coins: usize) -> HistoryRhoTable {
    HistoryRhoTable::from_fn(coins, |_| rng.gen::<f64>()).unwrap()
}

fn a1_unitarity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for coins in 1..=4 {
        for _ in 0..5 {
            let table = random_table(&mut rng, coins);
            let mut state = build_initial_state(coins, &InitialStateKind::Antisymmetric, 100).unwrap();
            for _ in 0..100 {
                toss(&mut state, &table).map_err(|e| e.to_string())?;
                worst = worst.max((state.norm() - 1.0).abs());
            }
        }
    }
    ensure(worst < 1e-12, format!("max |norm - 1| = {worst:e}"))?;
    Ok(format!(
        "max |norm - 1| = {worst:.1e} over M=1..4, 5 tables each, 100 steps"
    ))
}

fn a2_stationary_cycle() -> Check {
    let kind = InitialStateKind::Custom(vec![
        (0, reg("LR"), Complex64::new(1.0, 0.0)),
        (0, reg("RL"), Complex64::new(-1.0, 0.0)),
    ]);
    let initial = build_initial_state(2, &kind, 2).unwrap();
    let table = HistoryRhoTable::unbiased(2).unwrap();
    let mut state = initial.clone();
    toss(&mut state, &table).unwrap();

    let i = Complex64::i();
    let mut expected = WalkState::new(2, 2).unwrap();
    for (x, c, a) in [
        (1, "RL", Complex64::new(0.5, 0.0)),
        (-1, "LL", 0.5 * i),
        (-1, "LR", Complex64::new(-0.5, 0.0)),
        (1, "RR", -0.5 * i),
    ] {
        expected.set_amplitude(x, &reg(c), a).unwrap();
    }
    let dev = state
        .amplitudes()
        .iter()
        .zip(expected.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    ensure(dev < 1e-14, format!("one-toss deviation {dev:e}"))?;
    toss(&mut state, &table).unwrap();
    let f = fidelity(&state, &initial).unwrap();
    ensure(f >= 1.0 - 1e-12, format!("two-toss fidelity {f}"))?;
    Ok(format!("one-toss deviation {dev:.1e}, two-toss fidelity {f:.15}"))
}

fn final_distribution(coins: usize, table: &HistoryRhoTable, steps: usize) -> ProbabilityDistribution {
    let mut state = build_initial_state(coins, &InitialStateKind::Antisymmetric, steps).unwrap();
    for _ in 0..steps {
        toss(&mut state, table).unwrap();
    }
    state.position_distribution().unwrap()
}

fn near(x: i64, target: i64, tol: i64) -> bool {
    (x - target).abs() <= tol
}

fn a3_single_coin() -> Check {
    let table = HistoryRhoTable::unbiased(1).unwrap();
    let mut state = build_initial_state(1, &InitialStateKind::Antisymmetric, 100).unwrap();
    for _ in 0..100 {
        toss(&mut state, &table).unwrap();
    }
    let sites = state.site_probabilities();
    let odd_mass: f64 = sites
        .iter()
        .enumerate()
        .filter(|(k, _)| (*k as i64 - 100) % 2 != 0)
        .map(|(_, p)| p)
        .sum();
    ensure(odd_mass == 0.0, format!("odd-site probability {odd_mass:e}"))?;
    let dist = state.position_distribution().unwrap();
    let mean = dist.moments().mean;
    ensure(mean.abs() < 1e-10, format!("mean {mean:e}"))?;
    let report = smoothed_peaks(&dist, 5, 0.1).unwrap();
    let (l, r) = report.dominant_pair().ok_or("fewer than two peaks")?;
    ensure(
        near(l.position, -68, 4) && near(r.position, 68, 4),
        format!("dominant peaks at {} and {}", l.position, r.position),
    )?;
    Ok(format!(
        "mean {mean:.1e}, dominant peaks at {} and {}",
        l.position, r.position
    ))
}

fn a4_peak_structure() -> Check {
    let mut summary = Vec::new();
    let mut failures = Vec::new();
    for coins in 2..=4 {
        let dist = final_distribution(coins, &HistoryRhoTable::unbiased(coins).unwrap(), 100);
        let peaks = smoothed_peaks(&dist, 5, 0.1).unwrap().positions();
        summary.push(format!("M={coins}: {peaks:?}"));
        if peaks.len() != coins + 1 {
            failures.push(format!("M={coins} has {} peaks, expected {}", peaks.len(), coins + 1));
            continue;
        }
        if coins % 2 == 0 && peaks.iter().filter(|x| x.abs() <= 2).count() != 1 {
            failures.push(format!("M={coins} has no single central peak"));
        }
        let (lo, hi) = (peaks[0], peaks[peaks.len() - 1]);
        if !(near(lo, -68, 4) && near(hi, 68, 4)) {
            failures.push(format!("M={coins} outer peaks at {lo}, {hi}"));
        }
    }
    if failures.is_empty() {
        Ok(summary.join("; "))
    } else {
        Err(format!("{} [{}]", failures.join("; "), summary.join("; ")))
    }
}

fn a5_brun() -> Check {
    let mut worst = 0.0f64;
    for coins in 1..=3 {
        for rho in [0.1, 0.5, 0.9] {
            let table = HistoryRhoTable::uniform(coins, rho).unwrap();
            let list = BrunCoinList::new(vec![rho; coins]).unwrap();
            let mut a = build_initial_state(coins, &InitialStateKind::Antisymmetric, 50).unwrap();
            let mut b = a.clone();
            for t in 0..50 {
                toss(&mut a, &table).unwrap();
                brun_toss(&mut b, &list, t).unwrap();
            }
            let dev = a
                .amplitudes()
                .iter()
                .zip(b.amplitudes())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            worst = worst.max(dev);
        }
    }
    ensure(worst < 1e-12, format!("equal-coin deviation {worst:e}"))?;

    let table = HistoryRhoTable::unbiased(2)
        .unwrap()
        .with("L", 0.3)
        .unwrap()
        .with("R", 0.9)
        .unwrap();
    let list = BrunCoinList::new(vec![0.3, 0.9]).unwrap();
    let mut a = build_initial_state(2, &InitialStateKind::Antisymmetric, 50).unwrap();
    let mut b = a.clone();
    for t in 0..50 {
        toss(&mut a, &table).unwrap();
        brun_toss(&mut b, &list, t).unwrap();
    }
    let (pa, pb) = (a.site_probabilities(), b.site_probabilities());
    let diff = pa.iter().zip(&pb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    ensure(diff > 1e-3, format!("unequal coins differ by only {diff:e}"))?;
    Ok(format!(
        "equal coins agree to {worst:.1e}; unequal coins differ by {diff:.3}"
    ))
}

fn a6_classical() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_mean = 0.0f64;
    let mut worst_pi = 0.0f64;
    for coins in [2, 3] {
        for _ in 0..20 {
            let table = random_table(&mut rng, coins);
            let means = classical_mean_trajectory(&table, 1000, &ChainDistribution::uniform(1 << coins)).unwrap();
            worst_mean = worst_mean.max(means.iter().map(|m| m.abs()).fold(0.0, f64::max));
            let st = stationary_distribution(&history_walk_transition(&table)).unwrap();
            let pi = st.distribution().ok_or("stationary distribution not unique")?;
            let u = 1.0 / (1 << coins) as f64;
            worst_pi = worst_pi.max(pi.probabilities().iter().map(|p| (p - u).abs()).fold(0.0, f64::max));
        }
    }
    ensure(worst_mean < 1e-12, format!("max |mean| {worst_mean:e}"))?;
    ensure(worst_pi < 1e-12, format!("stationary deviation {worst_pi:e}"))?;

    // published 2-coin matrix; states listed (older, newer) from LL to RR
    let (rl, rr) = (0.3, 0.8);
    let table = HistoryRhoTable::unbiased(2)
        .unwrap()
        .with("L", rl)
        .unwrap()
        .with("R", rr)
        .unwrap();
    let t = history_walk_transition(&table);
    let expected = [
        [rl, 1.0 - rl, 0.0, 0.0],
        [0.0, 0.0, rr, 1.0 - rr],
        [1.0 - rl, rl, 0.0, 0.0],
        [0.0, 0.0, 1.0 - rr, rr],
    ];
    let ours = |i: usize| ((i & 1) << 1) | (i >> 1);
    for i in 0..4 {
        for j in 0..4 {
            let got = t.get(ours(i), ours(j));
            ensure(
                (got - expected[i][j]).abs() < 1e-15,
                format!("matrix entry ({i},{j}) = {got}"),
            )?;
        }
    }
    let st = stationary_distribution(&t).unwrap();
    let pi = st.distribution().ok_or("no unique stationary distribution")?;
    let dev = pi.probabilities().iter().map(|p| (p - 0.25).abs()).fold(0.0, f64::max);
    ensure(dev < 1e-12, format!("stationary deviation {dev:e}"))?;
    Ok(format!(
        "max |mean| {worst_mean:.1e}, stationary deviation {:.1e}, 2-coin matrix matches",
        worst_pi.max(dev)
    ))
}

fn parrondo_scan(key: &str, rho: f64) -> (f64, BTreeSet<String>) {
    let a = HistoryRhoTable::unbiased(3).unwrap();
    let b = HistoryRhoTable::unbiased(3).unwrap().with(key, rho).unwrap();
    let games = GameSet::from_specs([GameSpec::new('A', a), GameSpec::new('B', b)]).unwrap();
    let rows = scan_sequences(&games, 4, 3, 100, &InitialStateKind::Antisymmetric).unwrap();
    let b_mean = rows.iter().find(|r| r.pattern.to_string() == "B").unwrap().mean;
    let positive = rows
        .iter()
        .filter(|r| r.is_positive())
        .map(|r| r.pattern.to_string())
        .collect();
    (b_mean, positive)
}

fn expect_positive(key: &str, rho: f64, expected: &[&str], b_must_lose: bool) -> Check {
    let (b_mean, positive) = parrondo_scan(key, rho);
    let expected: BTreeSet<String> = expected.iter().map(|s| s.to_string()).collect();
    let detail = format!("B mean {b_mean:+.6}, positive {positive:?}");
    ensure(!b_must_lose || b_mean < 0.0, format!("B alone does not lose: {detail}"))?;
    ensure(
        positive == expected,
        format!("expected positive {expected:?}: {detail}"),
    )?;
    Ok(detail)
}

fn a7_parrondo_rr() -> Check {
    expect_positive("RR", 0.55, &["AAB", "AABB"], true)
}

fn a8_parrondo_lr() -> Check {
    expect_positive("LR", 0.6, &["AAAB"], false)
}

fn a9_threshold() -> Check {
    expect_positive("RR", 0.65, &[], false)
}

fn a10_mirror() -> Check {
    let grid = linear_grid(0.0, 1.0, 11);
    let base = GameSpec::new('B', HistoryRhoTable::unbiased(3).unwrap());
    let kind = InitialStateKind::Antisymmetric;
    let mut worst_mean = 0.0f64;
    let mut worst_std = 0.0f64;
    for (k1, k2) in [("LL", "RR"), ("LR", "RL")] {
        let a = sweep_parameter(&base, &reg(k1), &grid, 3, 100, &kind).unwrap();
        let b = sweep_parameter(&base, &reg(k2), &grid, 3, 100, &kind).unwrap();
        for (x, y) in a.iter().zip(&b) {
            worst_mean = worst_mean.max((x.moments.mean + y.moments.mean).abs());
            worst_std = worst_std.max((x.moments.std - y.moments.std).abs());
        }
    }
    ensure(worst_mean < 1e-10, format!("mean asymmetry {worst_mean:e}"))?;
    ensure(worst_std < 1e-10, format!("std asymmetry {worst_std:e}"))?;
    Ok(format!(
        "mean asymmetry {worst_mean:.1e}, std asymmetry {worst_std:.1e}"
    ))
}

fn capital_games() -> CapitalGames {
    let mut games = CapitalGames::new();
    games.insert('A', CapitalGameSpec::parrondo_a(0.005));
    games.insert('B', CapitalGameSpec::parrondo_capital_b(0.005));
    games
}

fn a11_classical_parrondo() -> Check {
    let games = capital_games();
    let mean = |p: &str| {
        *capital_game_trajectory(&games, &p.parse().unwrap(), 100)
            .unwrap()
            .last()
            .unwrap()
    };
    let (a, b, ab) = (mean("A"), mean("B"), mean("AABB"));
    ensure(a < 0.0 && b < 0.0, format!("A {a:+.4}, B {b:+.4}"))?;
    ensure(ab > 0.0, format!("AABB {ab:+.4}"))?;
    let hist = history_game_trajectory(&CapitalGameSpec::parrondo_history_b(0.005), None, 100).unwrap();
    let drift = hist[100] - hist[99];
    ensure(
        drift < 0.0 && hist[100] < 0.0,
        format!("history game drift {drift:+.6}"),
    )?;
    Ok(format!(
        "A {a:+.4}, B {b:+.4}, AABB {ab:+.4}, history game mean {:+.4} (drift {drift:+.5})",
        hist[100]
    ))
}

fn a12_monte_carlo() -> Check {
    let n = 100_000;
    let seed = 2024;
    let mut lines = Vec::new();
    let games = capital_games();
    let mut check = |label: &str, exact: f64, est: MonteCarloEstimate| -> std::result::Result<(), String> {
        let z = (est.mean - exact).abs() / est.std_error;
        lines.push(format!("{label} z={z:.2}"));
        ensure(
            z < 4.0,
            format!("{label}: exact {exact}, MC {} ± {}", est.mean, est.std_error),
        )
    };
    for p in ["A", "B", "AABB"] {
        let pattern: SequencePattern = p.parse().unwrap();
        let exact = capital_game_trajectory(&games, &pattern, 100).unwrap()[100];
        let est = monte_carlo_mean(
            MonteCarloModel::Capital {
                games: &games,
                pattern: &pattern,
            },
            100,
            n,
            seed,
        )
        .unwrap();
        check(p, exact, est)?;
    }
    let mut hist = CapitalGames::new();
    hist.insert('B', CapitalGameSpec::parrondo_history_b(0.005));
    let pattern: SequencePattern = "B".parse().unwrap();
    let exact = capital_game_trajectory(&hist, &pattern, 100).unwrap()[100];
    let est = monte_carlo_mean(
        MonteCarloModel::Capital {
            games: &hist,
            pattern: &pattern,
        },
        100,
        n,
        seed,
    )
    .unwrap();
    check("history B", exact, est)?;

    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let table = random_table(&mut rng, 3);
    let initial = ChainDistribution::point(8, 5);
    let exact = classical_mean_trajectory(&table, 100, &initial).unwrap()[100];
    let est = monte_carlo_mean(
        MonteCarloModel::HistoryWalk {
            table: &table,
            initial: &initial,
        },
        100,
        n,
        seed,
    )
    .unwrap();
    check("history walk", exact, est)?;
    Ok(lines.join(", "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("A1", "unitarity", a1_unitarity),
        ("A2", "two-coin stationary cycle", a2_stationary_cycle),
        ("A3", "single-coin walk", a3_single_coin),
        ("A4", "multi-coin peak structure", a4_peak_structure),
        ("A5", "equal-coin equivalence", a5_brun),
        ("A6", "classical unbiasedness", a6_classical),
        ("A7", "quantum Parrondo, RR bias", a7_parrondo_rr),
        ("A8", "quantum Parrondo, LR bias", a8_parrondo_lr),
        ("A9", "no winning patterns at RR = 0.65", a9_threshold),
        ("A10", "mirror law", a10_mirror),
        ("A11", "classical Parrondo games", a11_classical_parrondo),
        ("A12", "Monte Carlo agreement", a12_monte_carlo),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {id} {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {id} {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
