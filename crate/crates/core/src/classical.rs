//! Classical counterparts of the quantum walk.
//!
//! The classical limit of the history-dependent walk is a Markov chain over
//! the last `M` step directions: the oldest direction is retossed, kept with
//! probability `ρ_h` and reversed otherwise, where `h` is the `M - 1` most
//! recent directions. Chain states use the coin-register encoding (most
//! recent direction in the most significant bit, `L = 0`).
//!
//! The capital games are the classical Parrondo games: a biased coin, a game
//! whose coin depends on the capital modulo 3, and a game whose coin depends
//! on the results of the previous two plays. Their expected capital is
//! evolved exactly over the finite chain `(capital mod 3, last two results)`,
//! which is all the win probabilities can depend on.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Result, WalkError};
use crate::operators::HistoryRhoTable;
use crate::state::ProbabilityDistribution;
use crate::walker::SequencePattern;

const STOCHASTIC_TOLERANCE: f64 = 1e-12;

/// Row-stochastic matrix; row `i` holds the probabilities of moving from
/// state `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl TransitionMatrix {
    pub fn new(size: usize, entries: Vec<f64>) -> Result<Self> {
        if size == 0 || entries.len() != size * size {
            return Err(WalkError::NotStochastic(format!(
                "expected {size}x{size} entries, got {}",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(WalkError::NotStochastic(format!("entry {bad} outside [0, 1]")));
        }
        let m = TransitionMatrix { size, entries };
        for (i, s) in m.row_sums().iter().enumerate() {
            if (s - 1.0).abs() > STOCHASTIC_TOLERANCE {
                return Err(WalkError::NotStochastic(format!("row {i} sums to {s}")));
            }
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let size = rows.len();
        if rows.iter().any(|r| r.len() != size) {
            return Err(WalkError::NotStochastic("matrix is not square".into()));
        }
        Self::new(size, rows.concat())
    }

    pub fn identity(size: usize) -> Self {
        let mut entries = vec![0.0; size * size];
        for i in 0..size {
            entries[i * size + i] = 1.0;
        }
        TransitionMatrix { size, entries }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.entries[from * self.size + to]
    }

    pub fn row(&self, from: usize) -> &[f64] {
        &self.entries[from * self.size..(from + 1) * self.size]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.size).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.size)
            .map(|j| (0..self.size).map(|i| self.get(i, j)).sum())
            .collect()
    }

    /// `π ↦ π T`.
    pub fn step(&self, dist: &ChainDistribution) -> ChainDistribution {
        let mut next = vec![0.0; self.size];
        for (i, &p) in dist.0.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (j, &t) in self.row(i).iter().enumerate() {
                next[j] += p * t;
            }
        }
        ChainDistribution(next)
    }

    /// Closed communicating classes and, for each, its period.
    fn closed_classes(&self) -> Vec<(Vec<usize>, usize)> {
        let n = self.size;
        let reach: Vec<Vec<bool>> = (0..n)
            .map(|s| {
                let mut seen = vec![false; n];
                let mut stack = vec![s];
                seen[s] = true;
                while let Some(u) = stack.pop() {
                    for (v, &p) in self.row(u).iter().enumerate() {
                        if p > 0.0 && !seen[v] {
                            seen[v] = true;
                            stack.push(v);
                        }
                    }
                }
                seen
            })
            .collect();

        let mut assigned = vec![false; n];
        let mut classes = Vec::new();
        for s in 0..n {
            if assigned[s] {
                continue;
            }
            let class: Vec<usize> = (0..n).filter(|&v| reach[s][v] && reach[v][s]).collect();
            for &v in &class {
                assigned[v] = true;
            }
            let closed = class
                .iter()
                .all(|&u| (0..n).all(|v| !reach[u][v] || class.contains(&v)));
            if closed {
                let period = self.class_period(&class);
                classes.push((class, period));
            }
        }
        classes
    }

    fn class_period(&self, class: &[usize]) -> usize {
        let n = self.size;
        let mut level = vec![usize::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        level[class[0]] = 0;
        queue.push_back(class[0]);
        let mut g = 0usize;
        while let Some(u) = queue.pop_front() {
            for &v in class {
                if self.get(u, v) <= 0.0 {
                    continue;
                }
                if level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                } else {
                    let diff = (level[u] + 1).abs_diff(level[v]);
                    g = gcd(g, diff);
                }
            }
        }
        g.max(1)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Probabilities over chain states.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainDistribution(Vec<f64>);

impl ChainDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(WalkError::EmptyDistribution);
        }
        if let Some(&bad) = probs.iter().find(|p| p.is_nan() || **p < 0.0) {
            return Err(WalkError::ProbabilityOutOfRange(bad));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > STOCHASTIC_TOLERANCE {
            return Err(WalkError::NotStochastic(format!("distribution sums to {total}")));
        }
        Ok(ChainDistribution(probs))
    }

    pub fn uniform(size: usize) -> Self {
        ChainDistribution(vec![1.0 / size as f64; size])
    }

    pub fn point(size: usize, state: usize) -> Self {
        let mut p = vec![0.0; size];
        p[state] = 1.0;
        ChainDistribution(p)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Outcome of the stationary-distribution solver.
#[derive(Clone, Debug, PartialEq)]
pub enum Stationary {
    /// Irreducible aperiodic (or single closed class) chain.
    Unique(ChainDistribution),
    /// The stationary distribution is unique but the chain is periodic, so
    /// `π T^t` does not converge from a general start.
    Periodic {
        period: usize,
        distribution: ChainDistribution,
    },
    /// More than one closed class; every mixture of their stationary
    /// distributions is stationary.
    NonUnique { closed_classes: usize },
}

impl Stationary {
    pub fn distribution(&self) -> Option<&ChainDistribution> {
        match self {
            Stationary::Unique(d) => Some(d),
            Stationary::Periodic { distribution, .. } => Some(distribution),
            Stationary::NonUnique { .. } => None,
        }
    }
}

/// Solve `π T = π`, `Σ π = 1` directly (Gaussian elimination with partial
/// pivoting) on the unique closed class; transient states get zero weight.
pub fn stationary_distribution(matrix: &TransitionMatrix) -> Result<Stationary> {
    // re-validate: callers may have built the matrix via `identity`
    let matrix = TransitionMatrix::new(matrix.size, matrix.entries.clone())?;
    let classes = matrix.closed_classes();
    if classes.len() != 1 {
        return Ok(Stationary::NonUnique {
            closed_classes: classes.len(),
        });
    }
    let (class, period) = &classes[0];
    let k = class.len();
    // rows are equations: Σ_i π_i (T_ij - δ_ij) = 0 for each j, the last
    // replaced by normalisation
    let mut a = vec![vec![0.0f64; k + 1]; k];
    for (r, &j) in class.iter().enumerate() {
        for (c, &i) in class.iter().enumerate() {
            a[r][c] = matrix.get(i, j) - if i == j { 1.0 } else { 0.0 };
        }
    }
    a[k - 1] = vec![1.0; k + 1];
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        let p = a[col][col];
        if p.abs() < 1e-300 {
            return Err(WalkError::NotStochastic("singular stationary system".into()));
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col && row[col] != 0.0 {
                let f = row[col] / p;
                for (x, y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * y;
                }
            }
        }
    }
    let mut pi = vec![0.0; matrix.size];
    for (r, &s) in class.iter().enumerate() {
        pi[s] = (a[r][k] / a[r][r]).max(0.0);
    }
    let total: f64 = pi.iter().sum();
    for p in &mut pi {
        *p /= total;
    }
    let pi = ChainDistribution(pi);
    Ok(if *period > 1 {
        Stationary::Periodic {
            period: *period,
            distribution: pi,
        }
    } else {
        Stationary::Unique(pi)
    })
}

/// Probability that the next step from `state` is to the right.
fn right_probability(table: &HistoryRhoTable, state: usize) -> f64 {
    let rho = table.values()[state >> 1];
    if state & 1 == 1 {
        rho
    } else {
        1.0 - rho
    }
}

/// Classical limit of the history-dependent walk as a chain over the last
/// `M` step directions.
pub fn history_walk_transition(table: &HistoryRhoTable) -> TransitionMatrix {
    let coins = table.coin_count();
    let n = 1usize << coins;
    let mut entries = vec![0.0; n * n];
    for s in 0..n {
        let right = right_probability(table, s);
        let shifted = s >> 1;
        let to_l = shifted;
        let to_r = (1 << (coins - 1)) | shifted;
        entries[s * n + to_l] += 1.0 - right;
        entries[s * n + to_r] += right;
    }
    TransitionMatrix { size: n, entries }
}

/// Exact expected position over time for the classical history walk;
/// entry 0 is the starting position 0.
pub fn classical_mean_trajectory(
    table: &HistoryRhoTable,
    steps: usize,
    initial: &ChainDistribution,
) -> Result<Vec<f64>> {
    let matrix = history_walk_transition(table);
    if initial.len() != matrix.size() {
        return Err(WalkError::InvalidDimension(format!(
            "initial distribution has {} states, chain has {}",
            initial.len(),
            matrix.size()
        )));
    }
    let mut means = Vec::with_capacity(steps + 1);
    let mut mean = 0.0;
    means.push(mean);
    let mut pi = initial.clone();
    for _ in 0..steps {
        let drift: f64 =
            pi.0.iter()
                .enumerate()
                .map(|(s, p)| p * (2.0 * right_probability(table, s) - 1.0))
                .sum();
        mean += drift;
        means.push(mean);
        pi = matrix.step(&pi);
    }
    Ok(means)
}

/// One of the classical capital games.
///
/// `HistoryCoins` probabilities are indexed by the previous two results
/// `(older, newer)`: `[(lost, lost), (lost, won), (won, lost), (won, won)]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CapitalGameSpec {
    BiasedCoin(f64),
    CapitalMod3 { p1: f64, p2: f64 },
    HistoryCoins([f64; 4]),
}

impl CapitalGameSpec {
    /// Game A: a single coin with winning probability `1/2 - ε`.
    pub fn parrondo_a(eps: f64) -> Self {
        CapitalGameSpec::BiasedCoin(0.5 - eps)
    }

    /// Capital-dependent game B: `p1 = 1/10 - ε` when the capital is a
    /// multiple of three, `p2 = 3/4 - ε` otherwise.
    pub fn parrondo_capital_b(eps: f64) -> Self {
        CapitalGameSpec::CapitalMod3 {
            p1: 0.1 - eps,
            p2: 0.75 - eps,
        }
    }

    /// History-dependent game B: `9/10 - ε` after two losses, `1/4 - ε`
    /// after mixed results and `7/10 - ε` after two wins.
    pub fn parrondo_history_b(eps: f64) -> Self {
        CapitalGameSpec::HistoryCoins([0.9 - eps, 0.25 - eps, 0.25 - eps, 0.7 - eps])
    }

    pub fn validate(&self) -> Result<()> {
        let probs: &[f64] = match self {
            CapitalGameSpec::BiasedCoin(p) => std::slice::from_ref(p),
            CapitalGameSpec::CapitalMod3 { p1, p2 } => &[*p1, *p2],
            CapitalGameSpec::HistoryCoins(p) => p,
        };
        match probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            Some(&bad) => Err(WalkError::ProbabilityOutOfRange(bad)),
            None => Ok(()),
        }
    }

    /// Winning probability given `capital mod 3` and the history state
    /// `2 * older + newer` (won = 1).
    pub fn win_probability(&self, capital_mod3: usize, history: usize) -> f64 {
        match *self {
            CapitalGameSpec::BiasedCoin(p) => p,
            CapitalGameSpec::CapitalMod3 { p1, p2 } => {
                if capital_mod3 == 0 {
                    p1
                } else {
                    p2
                }
            }
            CapitalGameSpec::HistoryCoins(p) => p[history],
        }
    }
}

pub type CapitalGames = BTreeMap<char, CapitalGameSpec>;

fn resolve_capital<'g>(games: &'g CapitalGames, pattern: &SequencePattern) -> Result<Vec<&'g CapitalGameSpec>> {
    let resolved = pattern
        .letters()
        .iter()
        .map(|c| games.get(c).ok_or(WalkError::UnknownGame(*c)))
        .collect::<Result<Vec<_>>>()?;
    for g in &resolved {
        g.validate()?;
    }
    Ok(resolved)
}

fn next_history(history: usize, won: bool) -> usize {
    ((history & 1) << 1) | won as usize
}

/// Exact expected capital over time for a pattern of capital games, starting
/// from capital 0 with the previous-two-results history uniform.
pub fn capital_game_trajectory(games: &CapitalGames, pattern: &SequencePattern, steps: usize) -> Result<Vec<f64>> {
    let plays = resolve_capital(games, pattern)?;
    // state = 4 * (capital mod 3) + history
    let mut pi = [0.0f64; 12];
    pi[..4].fill(0.25);
    let mut means = Vec::with_capacity(steps + 1);
    let mut mean = 0.0;
    means.push(mean);
    for t in 0..steps {
        let game = plays[t % plays.len()];
        let mut next = [0.0f64; 12];
        let mut drift = 0.0;
        for (s, &p) in pi.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let (m, h) = (s / 4, s % 4);
            let win = game.win_probability(m, h);
            drift += p * (2.0 * win - 1.0);
            next[4 * ((m + 1) % 3) + next_history(h, true)] += p * win;
            next[4 * ((m + 2) % 3) + next_history(h, false)] += p * (1.0 - win);
        }
        pi = next;
        mean += drift;
        means.push(mean);
    }
    Ok(means)
}

/// Exact distribution of the capital after `steps` plays (same start as
/// [`capital_game_trajectory`]).
pub fn capital_distribution(
    games: &CapitalGames,
    pattern: &SequencePattern,
    steps: usize,
) -> Result<ProbabilityDistribution> {
    let plays = resolve_capital(games, pattern)?;
    let width = 2 * steps + 1;
    let offset = steps as i64;
    // index = 4 * (capital + offset) + history
    let mut dist = vec![0.0f64; 4 * width];
    for h in 0..4 {
        dist[4 * steps + h] = 0.25;
    }
    for t in 0..steps {
        let game = plays[t % plays.len()];
        let mut next = vec![0.0f64; 4 * width];
        for (i, &p) in dist.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let (site, h) = (i / 4, i % 4);
            let capital = site as i64 - offset;
            let win = game.win_probability(capital.rem_euclid(3) as usize, h);
            next[4 * (site + 1) + next_history(h, true)] += p * win;
            next[4 * (site - 1) + next_history(h, false)] += p * (1.0 - win);
        }
        dist = next;
    }
    let sites: Vec<f64> = dist.chunks_exact(4).map(|c| c.iter().sum()).collect();
    ProbabilityDistribution::from_sites(-offset, &sites)
}

/// Expected capital for the history-dependent game, optionally interleaved
/// with a second game. With `mix = Some((a, pattern))` the pattern's `A`
/// letters play `a` and its `B` letters play `spec`.
pub fn history_game_trajectory(
    spec: &CapitalGameSpec,
    mix: Option<(&CapitalGameSpec, &SequencePattern)>,
    steps: usize,
) -> Result<Vec<f64>> {
    let mut games = CapitalGames::new();
    games.insert('B', *spec);
    match mix {
        Some((a, pattern)) => {
            games.insert('A', *a);
            capital_game_trajectory(&games, pattern, steps)
        }
        None => capital_game_trajectory(&games, &SequencePattern::new(vec!['B'])?, steps),
    }
}

/// What [`monte_carlo_mean`] samples.
#[derive(Clone, Copy, Debug)]
pub enum MonteCarloModel<'a> {
    Capital {
        games: &'a CapitalGames,
        pattern: &'a SequencePattern,
    },
    HistoryWalk {
        table: &'a HistoryRhoTable,
        initial: &'a ChainDistribution,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
}

fn sample_index(rng: &mut ChaCha8Rng, probs: &[f64]) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Fills `path[1..]` with one sampled trajectory.
type PathSampler<'a> = dyn Fn(&mut ChaCha8Rng, &mut [i64]) + Sync + 'a;

/// Sample `trajectories` runs of `steps` plays and return, for every
/// `t = 0..=steps`, the mean capital (or position) with its standard error.
///
/// Trajectory `i` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream
/// `i`, and the sums are accumulated in integers, so the result depends only
/// on `seed` and `trajectories`, not on scheduling.
pub fn monte_carlo_trajectory(
    model: MonteCarloModel<'_>,
    steps: usize,
    trajectories: usize,
    seed: u64,
) -> Result<Vec<MonteCarloEstimate>> {
    if trajectories == 0 {
        return Err(WalkError::NoTrajectories);
    }
    let walk: Box<PathSampler> = match model {
        MonteCarloModel::Capital { games, pattern } => {
            let plays = resolve_capital(games, pattern)?;
            Box::new(move |rng, path| {
                let mut history = rng.gen_range(0..4usize);
                let mut capital: i64 = 0;
                for t in 0..steps {
                    let game = plays[t % plays.len()];
                    let win = game.win_probability(capital.rem_euclid(3) as usize, history);
                    let won = rng.gen::<f64>() < win;
                    capital += if won { 1 } else { -1 };
                    history = next_history(history, won);
                    path[t + 1] = capital;
                }
            })
        }
        MonteCarloModel::HistoryWalk { table, initial } => {
            let coins = table.coin_count();
            if initial.len() != 1 << coins {
                return Err(WalkError::InvalidDimension(format!(
                    "initial distribution has {} states, chain has {}",
                    initial.len(),
                    1 << coins
                )));
            }
            Box::new(move |rng, path| {
                let mut state = sample_index(rng, initial.probabilities());
                let mut x: i64 = 0;
                for t in 0..steps {
                    let right = rng.gen::<f64>() < right_probability(table, state);
                    x += if right { 1 } else { -1 };
                    state = ((right as usize) << (coins - 1)) | (state >> 1);
                    path[t + 1] = x;
                }
            })
        }
    };

    let zero = || (vec![0i128; steps + 1], vec![0i128; steps + 1]);
    let (sum, sum_sq) = (0..trajectories)
        .into_par_iter()
        .fold(
            || (zero(), vec![0i64; steps + 1]),
            |((mut s, mut ss), mut path), i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                walk(&mut rng, &mut path);
                for (t, &x) in path.iter().enumerate() {
                    s[t] += x as i128;
                    ss[t] += (x as i128) * (x as i128);
                }
                ((s, ss), path)
            },
        )
        .map(|(acc, _)| acc)
        .reduce(zero, |(mut s, mut ss), (s2, ss2)| {
            for t in 0..s.len() {
                s[t] += s2[t];
                ss[t] += ss2[t];
            }
            (s, ss)
        });

    let n = trajectories as i128;
    Ok(sum
        .iter()
        .zip(&sum_sq)
        .map(|(&s, &ss)| {
            let var = if n > 1 {
                (n * ss - s * s) as f64 / (n * (n - 1)) as f64
            } else {
                0.0
            };
            MonteCarloEstimate {
                mean: s as f64 / n as f64,
                std_error: (var / n as f64).sqrt(),
            }
        })
        .collect())
}

/// Final-step estimate of [`monte_carlo_trajectory`].
pub fn monte_carlo_mean(
    model: MonteCarloModel<'_>,
    steps: usize,
    trajectories: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    Ok(*monte_carlo_trajectory(model, steps, trajectories, seed)?
        .last()
        .unwrap())
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;

    fn pattern(s: &str) -> SequencePattern {
        s.parse().unwrap()
    }

    /// Eq. 15 ordering helper: paper states are `(older, newer)` with
    /// `-1 <-> L` listed `[-1,-1], [-1,+1], [+1,-1], [+1,+1]`; our index puts
    /// the newer direction in the high bit.
    fn paper_to_ours(i: usize) -> usize {
        let (older, newer) = (i >> 1, i & 1);
        (newer << 1) | older
    }

    #[test]
    fn two_coin_matrix_matches_published_form() {
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
        for i in 0..4 {
            for j in 0..4 {
                assert!(
                    (t.get(paper_to_ours(i), paper_to_ours(j)) - expected[i][j]).abs() < 1e-15,
                    "({i},{j})"
                );
            }
        }
    }

    #[test]
    fn deterministic_retention_is_permutation() {
        let t = history_walk_transition(&HistoryRhoTable::uniform(2, 1.0).unwrap());
        for i in 0..4 {
            assert_eq!(t.row(i).iter().filter(|&&p| p == 1.0).count(), 1);
            assert_eq!(t.row(i).iter().filter(|&&p| p == 0.0).count(), 3);
        }
        assert_eq!(t.column_sums(), vec![1.0; 4]);
    }

    #[test]
    fn matrix_validation() {
        assert!(TransitionMatrix::from_rows(&[vec![0.5, 0.4], vec![0.0, 1.0]]).is_err());
        assert!(TransitionMatrix::from_rows(&[vec![1.5, -0.5], vec![0.0, 1.0]]).is_err());
        assert!(TransitionMatrix::from_rows(&[vec![1.0, 0.0]]).is_err());
        assert!(TransitionMatrix::from_rows(&[vec![0.5, 0.5], vec![0.2, 0.8]]).is_ok());
    }

    #[test]
    fn stationary_of_published_chain_is_uniform() {
        let table = HistoryRhoTable::unbiased(2)
            .unwrap()
            .with("L", 0.3)
            .unwrap()
            .with("R", 0.8)
            .unwrap();
        let st = stationary_distribution(&history_walk_transition(&table)).unwrap();
        let Stationary::Unique(pi) = st else {
            panic!("expected unique, got {st:?}")
        };
        for p in pi.probabilities() {
            assert!((p - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn stationary_flags() {
        assert_eq!(
            stationary_distribution(&TransitionMatrix::identity(4)).unwrap(),
            Stationary::NonUnique { closed_classes: 4 }
        );
        // rho = 1 everywhere: LL and RR are fixed, LR <-> RL swap
        let keep = history_walk_transition(&HistoryRhoTable::uniform(2, 1.0).unwrap());
        assert_eq!(
            stationary_distribution(&keep).unwrap(),
            Stationary::NonUnique { closed_classes: 3 }
        );
        // rho = 0 everywhere: a single 4-cycle
        let flip = history_walk_transition(&HistoryRhoTable::uniform(2, 0.0).unwrap());
        match stationary_distribution(&flip).unwrap() {
            Stationary::Periodic { period, distribution } => {
                assert_eq!(period, 4);
                for p in distribution.probabilities() {
                    assert!((p - 0.25).abs() < 1e-12);
                }
            }
            other => panic!("expected periodic, got {other:?}"),
        }
    }

    #[test]
    fn stationary_non_uniform_chain() {
        let t = TransitionMatrix::from_rows(&[vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap();
        let st = stationary_distribution(&t).unwrap();
        let pi = st.distribution().unwrap().probabilities();
        assert!((pi[0] - 5.0 / 6.0).abs() < 1e-12);
        assert!((pi[1] - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn stationary_with_transient_state() {
        // state 0 leaks into the closed class {1, 2}
        let t = TransitionMatrix::from_rows(&[vec![0.5, 0.5, 0.0], vec![0.0, 0.3, 0.7], vec![0.0, 0.6, 0.4]]).unwrap();
        let st = stationary_distribution(&t).unwrap();
        let pi = st.distribution().unwrap().probabilities();
        assert!(pi[0].abs() < 1e-12);
        assert!((pi[1] - 6.0 / 13.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_right_march() {
        let table = HistoryRhoTable::uniform(2, 1.0).unwrap();
        let means = classical_mean_trajectory(&table, 20, &ChainDistribution::point(4, 3)).unwrap();
        for (t, m) in means.iter().enumerate() {
            assert_eq!(*m, t as f64);
        }
        assert!(classical_mean_trajectory(&table, 5, &ChainDistribution::uniform(8)).is_err());
    }

    #[test]
    fn chain_distribution_validation() {
        assert!(ChainDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(ChainDistribution::new(vec![1.5, -0.5]).is_err());
        assert!(ChainDistribution::new(vec![]).is_err());
        assert!(ChainDistribution::new(vec![0.25; 4]).is_ok());
    }

    #[test]
    fn biased_coin_drift_is_linear() {
        let mut games = CapitalGames::new();
        games.insert('A', CapitalGameSpec::parrondo_a(0.005));
        let means = capital_game_trajectory(&games, &pattern("A"), 100).unwrap();
        assert!((means[100] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn reduced_chain_matches_full_capital_distribution() {
        let mut games = CapitalGames::new();
        games.insert('A', CapitalGameSpec::parrondo_a(0.005));
        games.insert('B', CapitalGameSpec::parrondo_capital_b(0.005));
        games.insert('C', CapitalGameSpec::parrondo_history_b(0.005));
        for p in ["A", "B", "C", "AABB", "ABC", "CCA"] {
            let means = capital_game_trajectory(&games, &pattern(p), 60).unwrap();
            let dist = capital_distribution(&games, &pattern(p), 60).unwrap();
            assert!((dist.total() - 1.0).abs() < 1e-12);
            assert!((dist.moments().mean - means[60]).abs() < 1e-10, "{p}");
        }
    }

    #[test]
    fn negative_capital_uses_mathematical_modulus() {
        // p1 = 1 when capital ≡ 0 (mod 3), else 0: the walk bounces between 0 and -1... and -1 ≡ 2
        let mut games = CapitalGames::new();
        games.insert('B', CapitalGameSpec::CapitalMod3 { p1: 1.0, p2: 0.0 });
        let means = capital_game_trajectory(&games, &pattern("B"), 6).unwrap();
        assert_eq!(means, vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        let mut games = CapitalGames::new();
        games.insert('B', CapitalGameSpec::CapitalMod3 { p1: 0.0, p2: 0.0 });
        // always lose: capital 0, -1, -2, ...
        let means = capital_game_trajectory(&games, &pattern("B"), 4).unwrap();
        assert_eq!(means, vec![0.0, -1.0, -2.0, -3.0, -4.0]);
    }

    #[test]
    fn fair_history_coins_have_no_drift() {
        let spec = CapitalGameSpec::HistoryCoins([0.5; 4]);
        let means = history_game_trajectory(&spec, None, 50).unwrap();
        assert!(means.iter().all(|m| m.abs() < 1e-15));
    }

    #[test]
    fn history_coins_follow_previous_results() {
        // only win straight after two losses or two wins
        let spec = CapitalGameSpec::HistoryCoins([1.0, 0.0, 0.0, 1.0]);
        let mut games = CapitalGames::new();
        games.insert('B', spec);
        let dist = capital_distribution(&games, &pattern("B"), 3).unwrap();
        // start uniform over LL, LW, WL, WW:
        // LL -> W (LW) -> L (WL) -> L (LL): -1
        // LW -> L (WL) -> L (LL) -> W: -1
        // WL -> L (LL) -> W (LW) -> L: -1
        // WW -> W -> W -> W: +3
        assert!((dist.get(-1) - 0.75).abs() < 1e-15);
        assert!((dist.get(3) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn invalid_games_are_rejected() {
        let mut games = CapitalGames::new();
        games.insert('A', CapitalGameSpec::BiasedCoin(1.2));
        assert!(capital_game_trajectory(&games, &pattern("A"), 3).is_err());
        assert_eq!(
            capital_game_trajectory(&games, &pattern("Z"), 3),
            Err(WalkError::UnknownGame('Z'))
        );
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let mut games = CapitalGames::new();
        games.insert('A', CapitalGameSpec::BiasedCoin(0.5));
        let p = pattern("A");
        let model = MonteCarloModel::Capital {
            games: &games,
            pattern: &p,
        };
        let a = monte_carlo_mean(model, 50, 2000, 7).unwrap();
        let b = monte_carlo_mean(model, 50, 2000, 7).unwrap();
        let c = monte_carlo_mean(model, 50, 2000, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.std_error > 0.0);
        assert_eq!(monte_carlo_mean(model, 50, 0, 7), Err(WalkError::NoTrajectories));
        let traj = monte_carlo_trajectory(model, 50, 2000, 7).unwrap();
        assert_eq!(traj.len(), 51);
        assert_eq!(
            traj[0],
            MonteCarloEstimate {
                mean: 0.0,
                std_error: 0.0
            }
        );
        assert_eq!(traj[50], a);
    }

    #[test]
    fn monte_carlo_fair_coin() {
        let mut games = CapitalGames::new();
        games.insert('A', CapitalGameSpec::BiasedCoin(0.5));
        let p = pattern("A");
        let est = monte_carlo_mean(
            MonteCarloModel::Capital {
                games: &games,
                pattern: &p,
            },
            100,
            100_000,
            1,
        )
        .unwrap();
        assert!(est.mean.abs() < 4.0 * est.std_error, "{est:?}");
        // 10 / sqrt(1e5) for a ±1 walk of 100 steps
        assert!((est.std_error - 10.0 / (1e5f64).sqrt()).abs() < 1e-3);
    }
}
