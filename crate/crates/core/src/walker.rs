//! Initial states, game sequences, parameter sweeps and sequence scans.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, WalkError};
use crate::operators::{toss, HistoryRhoTable};
use crate::state::{CoinRegister, Moments, ProbabilityDistribution, WalkState, NORM_TOLERANCE};

/// A mean above this counts as positive in scan tables.
pub const POSITIVE_THRESHOLD: f64 = 1e-9;

#[derive(Clone, Debug, Default, PartialEq)]
pub enum InitialStateKind {
    /// Equal-magnitude superposition of all coin strings at `x = 0`, with
    /// sign `+` when the most recent coin is `L` and `-` when it is `R`.
    #[default]
    Antisymmetric,
    /// `|0, R..R⟩`.
    AllR,
    /// Arbitrary amplitudes; the result is normalised.
    Custom(Vec<(i64, CoinRegister, Complex64)>),
}

pub fn build_initial_state(coins: usize, kind: &InitialStateKind, t_max: usize) -> Result<WalkState> {
    let mut state = WalkState::new(coins, t_max)?;
    let dim = state.register_dim();
    match kind {
        InitialStateKind::Antisymmetric => {
            let mag = (dim as f64).sqrt().recip();
            for c in 0..dim {
                let sign = if c >> (coins - 1) == 0 { 1.0 } else { -1.0 };
                state.set_amplitude_at(0, c, Complex64::new(sign * mag, 0.0))?;
            }
        }
        InitialStateKind::AllR => {
            state.set_amplitude_at(0, dim - 1, Complex64::new(1.0, 0.0))?;
        }
        InitialStateKind::Custom(terms) => {
            for (x, reg, a) in terms {
                state.set_amplitude(*x, reg, *a)?;
            }
            let norm = state.norm();
            if norm == 0.0 {
                return Err(WalkError::ZeroNorm);
            }
            state.scale(Complex64::new(norm.recip(), 0.0));
        }
    }
    Ok(state)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameSpec {
    pub name: char,
    pub table: HistoryRhoTable,
}

impl GameSpec {
    pub fn new(name: char, table: HistoryRhoTable) -> Self {
        GameSpec { name, table }
    }
}

/// Named games available to a sequence; names are unique.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GameSet(BTreeMap<char, HistoryRhoTable>);

impl GameSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_specs<I: IntoIterator<Item = GameSpec>>(specs: I) -> Result<Self> {
        let mut set = GameSet::new();
        for spec in specs {
            set.insert(spec)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, spec: GameSpec) -> Result<()> {
        if self.0.contains_key(&spec.name) {
            return Err(WalkError::DuplicateGame(spec.name));
        }
        self.0.insert(spec.name, spec.table);
        Ok(())
    }

    pub fn get(&self, name: char) -> Option<&HistoryRhoTable> {
        self.0.get(&name)
    }

    /// Game names in ascending order.
    pub fn names(&self) -> Vec<char> {
        self.0.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn check_coins(&self, coins: usize) -> Result<()> {
        for table in self.0.values() {
            if table.coin_count() != coins {
                return Err(WalkError::CoinCountMismatch {
                    state: coins,
                    operand: table.coin_count(),
                });
            }
        }
        Ok(())
    }
}

/// A word over game names, applied left to right and repeated cyclically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SequencePattern(Vec<char>);

impl SequencePattern {
    pub fn new(letters: Vec<char>) -> Result<Self> {
        if letters.is_empty() {
            return Err(WalkError::EmptyPattern);
        }
        Ok(SequencePattern(letters))
    }

    pub fn letters(&self) -> &[char] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Game played at step `t` (0-based).
    pub fn letter_at(&self, t: usize) -> char {
        self.0[t % self.0.len()]
    }

    fn resolve<'g>(&self, games: &'g GameSet) -> Result<Vec<&'g HistoryRhoTable>> {
        self.0
            .iter()
            .map(|&c| games.get(c).ok_or(WalkError::UnknownGame(c)))
            .collect()
    }
}

impl FromStr for SequencePattern {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self> {
        SequencePattern::new(s.trim().chars().collect())
    }
}

impl fmt::Display for SequencePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Per-step moments of a run; entry 0 describes the initial state.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub snapshots: BTreeMap<usize, ProbabilityDistribution>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    pub fn final_mean(&self) -> f64 {
        *self.means.last().expect("trajectory has at least the initial entry")
    }

    pub fn final_std(&self) -> f64 {
        *self.stds.last().expect("trajectory has at least the initial entry")
    }
}

fn state_moments(state: &WalkState) -> Moments {
    let mut mean = 0.0;
    let mut second = 0.0;
    for (x, p) in state.positions().zip(state.site_probabilities()) {
        let x = x as f64;
        mean += p * x;
        second += p * x * x;
    }
    Moments {
        mean,
        std: (second - mean * mean).max(0.0).sqrt(),
    }
}

fn check_run(initial: &WalkState, games: &GameSet, steps: usize) -> Result<()> {
    games.check_coins(initial.coin_count())?;
    let norm = initial.norm();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(WalkError::NotNormalized(norm));
    }
    if initial.steps_taken() + steps > initial.t_max() {
        return Err(WalkError::HorizonExceeded { t_max: initial.t_max() });
    }
    Ok(())
}

/// Evolve `initial` for `steps` tosses, playing `pattern.letter_at(t)` at
/// step `t`, and return the final state.
pub fn evolve(initial: &WalkState, games: &GameSet, pattern: &SequencePattern, steps: usize) -> Result<WalkState> {
    let tables = pattern.resolve(games)?;
    check_run(initial, games, steps)?;
    let mut state = initial.clone();
    for t in 0..steps {
        toss(&mut state, tables[t % tables.len()])?;
    }
    Ok(state)
}

/// Run a game sequence, recording `⟨x⟩` and `σ_x` after every step and the
/// position distribution at each step listed in `snapshot_at`.
pub fn run_sequence(
    initial: &WalkState,
    games: &GameSet,
    pattern: &SequencePattern,
    steps: usize,
    snapshot_at: &[usize],
) -> Result<Trajectory> {
    let tables = pattern.resolve(games)?;
    check_run(initial, games, steps)?;
    if let Some(&step) = snapshot_at.iter().find(|&&s| s > steps) {
        return Err(WalkError::SnapshotOutOfRange { step, steps });
    }

    let mut traj = Trajectory {
        means: Vec::with_capacity(steps + 1),
        stds: Vec::with_capacity(steps + 1),
        snapshots: BTreeMap::new(),
    };
    let mut state = initial.clone();
    let record = |state: &WalkState, t: usize, traj: &mut Trajectory| -> Result<()> {
        let m = state_moments(state);
        traj.means.push(m.mean);
        traj.stds.push(m.std);
        if snapshot_at.contains(&t) {
            traj.snapshots.insert(t, state.position_distribution()?);
        }
        Ok(())
    };
    record(&state, 0, &mut traj)?;
    for t in 0..steps {
        toss(&mut state, tables[t % tables.len()])?;
        record(&state, t + 1, &mut traj)?;
    }
    let norm = state.norm();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(WalkError::NotNormalized(norm));
    }
    Ok(traj)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub pattern: SequencePattern,
    pub mean: f64,
}

impl ScanRow {
    pub fn is_positive(&self) -> bool {
        self.mean > POSITIVE_THRESHOLD
    }
}

/// All words of length `1..=max_len` over `alphabet`, in lexicographic order.
pub fn enumerate_patterns(alphabet: &[char], max_len: usize) -> Vec<SequencePattern> {
    let mut alphabet = alphabet.to_vec();
    alphabet.sort_unstable();
    alphabet.dedup();
    let mut words: Vec<Vec<char>> = Vec::new();
    let mut layer: Vec<Vec<char>> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| {
                alphabet.iter().map(move |&c| {
                    let mut next = w.clone();
                    next.push(c);
                    next
                })
            })
            .collect();
        words.extend(layer.iter().cloned());
    }
    words.sort();
    words.into_iter().map(SequencePattern).collect()
}

/// Final `⟨x⟩` after `steps` tosses for every pattern of length up to
/// `max_len` over the game alphabet, each from the same initial state.
pub fn scan_sequences(
    games: &GameSet,
    max_len: usize,
    coins: usize,
    steps: usize,
    kind: &InitialStateKind,
) -> Result<Vec<ScanRow>> {
    if max_len < 1 {
        return Err(WalkError::EmptyPattern);
    }
    games.check_coins(coins)?;
    let initial = build_initial_state(coins, kind, steps.max(1))?;
    enumerate_patterns(&games.names(), max_len)
        .into_par_iter()
        .map(|pattern| {
            let state = evolve(&initial, games, &pattern, steps)?;
            Ok(ScanRow {
                mean: state_moments(&state).mean,
                pattern,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub rho: f64,
    pub moments: Moments,
}

/// `n` evenly spaced values from `from` to `to`, endpoints included.
pub fn linear_grid(from: f64, to: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..n).map(|i| from + (to - from) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Single-game walks with one history entry of `base` replaced by each grid
/// value; returns the moments after `steps` tosses.
pub fn sweep_parameter(
    base: &GameSpec,
    history: &CoinRegister,
    grid: &[f64],
    coins: usize,
    steps: usize,
    kind: &InitialStateKind,
) -> Result<Vec<SweepRow>> {
    if base.table.coin_count() != coins {
        return Err(WalkError::CoinCountMismatch {
            state: coins,
            operand: base.table.coin_count(),
        });
    }
    // validate every point before doing any work
    let tables = grid
        .iter()
        .map(|&rho| {
            let mut table = base.table.clone();
            table.set(history, rho)?;
            Ok(table)
        })
        .collect::<Result<Vec<_>>>()?;
    let initial = build_initial_state(coins, kind, steps.max(1))?;
    let pattern = SequencePattern(vec![base.name]);
    grid.par_iter()
        .zip(tables.into_par_iter())
        .map(|(&rho, table)| {
            let games = GameSet::from_specs([GameSpec::new(base.name, table)])?;
            let state = evolve(&initial, &games, &pattern, steps)?;
            Ok(SweepRow {
                rho,
                moments: state_moments(&state),
            })
        })
        .collect()
}
