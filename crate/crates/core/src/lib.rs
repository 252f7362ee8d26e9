//! History-dependent multi-coin quantum walks on the line.
//!
//! A walker carries `M` two-level coins recording its last `M` step
//! directions. Each step retosses the oldest coin with a unitary whose bias
//! depends on the other `M - 1` coins, moves along the result and makes it
//! the newest entry. Several such games can be interleaved in a periodic
//! pattern; [`walker::scan_sequences`] looks for patterns of losing games
//! that win. [`classical`] holds the Markov-chain limit and the classical
//! capital games, [`analysis`] the distribution shape diagnostics.

pub mod analysis;
pub mod classical;
pub mod error;
pub mod operators;
pub mod state;
pub mod walker;

pub use analysis::{find_peaks, smooth_distribution, smoothed_peaks, symmetry_deviation, Peak, PeakReport};
pub use classical::{
    capital_distribution, capital_game_trajectory, classical_mean_trajectory, history_game_trajectory,
    history_walk_transition, monte_carlo_mean, monte_carlo_trajectory, stationary_distribution, CapitalGameSpec,
    CapitalGames, ChainDistribution, MonteCarloEstimate, MonteCarloModel, Stationary, TransitionMatrix,
};
pub use error::{Result, WalkError};
pub use operators::{
    apply_conditional_flip, apply_reorder, apply_shift, brun_toss, coin_unitary, toss, BrunCoinList, CoinUnitary,
    HistoryRhoTable,
};
pub use state::{fidelity, Chirality, CoinRegister, Moments, ProbabilityDistribution, WalkState};
pub use walker::{
    build_initial_state, enumerate_patterns, evolve, linear_grid, run_sequence, scan_sequences, sweep_parameter,
    GameSet, GameSpec, InitialStateKind, ScanRow, SequencePattern, SweepRow, Trajectory,
};
