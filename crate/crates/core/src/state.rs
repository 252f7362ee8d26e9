//! Joint position / coin-register state of a multi-coin walk.
//!
//! Coin strings are written `j_1 .. j_M` with `j_1` the most recent toss
//! result and `j_M` the oldest. The integer encoding used throughout the
//! crate puts `j_1` in the most significant bit, with `L = 0` and `R = 1`,
//! so `LRR` with `M = 3` is `0b011 = 3`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Result, WalkError};

/// Tolerance on `‖ψ‖` accepted by measurement and evolution entry points.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Chirality {
    L,
    R,
}

impl Chirality {
    /// Position increment selected by this chirality.
    pub fn step(self) -> i64 {
        match self {
            Chirality::L => -1,
            Chirality::R => 1,
        }
    }

    pub fn bit(self) -> usize {
        match self {
            Chirality::L => 0,
            Chirality::R => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Self {
        if bit & 1 == 0 {
            Chirality::L
        } else {
            Chirality::R
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Chirality::L => Chirality::R,
            Chirality::R => Chirality::L,
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'L' => Some(Chirality::L),
            'R' => Some(Chirality::R),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Chirality::L => 'L',
            Chirality::R => 'R',
        }
    }
}

/// Ordered toss results, most recent first.
///
/// The same type doubles as the history key of a rho table, where it holds
/// the `M - 1` most recent results (and may therefore be empty).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoinRegister(Vec<Chirality>);

impl CoinRegister {
    pub fn new(coins: Vec<Chirality>) -> Self {
        CoinRegister(coins)
    }

    /// Decode `index` as a register of `len` coins (most recent coin in the
    /// most significant bit).
    pub fn from_index(index: usize, len: usize) -> Self {
        debug_assert!(len >= usize::BITS as usize || index < (1usize << len));
        CoinRegister((0..len).map(|k| Chirality::from_bit(index >> (len - 1 - k))).collect())
    }

    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, c| (acc << 1) | c.bit())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coins(&self) -> &[Chirality] {
        &self.0
    }

    /// Global `L <-> R` swap.
    pub fn complement(&self) -> Self {
        CoinRegister(self.0.iter().map(|c| c.flipped()).collect())
    }
}

impl FromStr for CoinRegister {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(Chirality::from_char)
            .collect::<Option<Vec<_>>>()
            .map(CoinRegister)
            .ok_or_else(|| WalkError::InvalidChirality(s.to_string()))
    }
}

impl fmt::Display for CoinRegister {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            write!(f, "{}", c.as_char())?;
        }
        Ok(())
    }
}

/// Complex amplitudes over `x ∈ [-t_max, t_max]` and the `2^M` coin strings.
///
/// Storage is dense and position-major: the amplitude of `(x, c)` lives at
/// `(x + t_max) * 2^M + c`.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkState {
    coins: usize,
    t_max: usize,
    steps_taken: usize,
    amps: Vec<Complex64>,
}

impl WalkState {
    /// All-zero state; callers inject an initial state before evolving.
    pub fn new(coins: usize, t_max: usize) -> Result<Self> {
        if coins < 1 {
            return Err(WalkError::InvalidDimension(format!(
                "coin count must be >= 1, got {coins}"
            )));
        }
        if coins > 20 {
            return Err(WalkError::InvalidDimension(format!(
                "coin count {coins} is too large for a dense register"
            )));
        }
        if t_max < 1 {
            return Err(WalkError::InvalidDimension(format!(
                "horizon must be >= 1, got {t_max}"
            )));
        }
        let len = (2 * t_max + 1) * (1 << coins);
        Ok(WalkState {
            coins,
            t_max,
            steps_taken: 0,
            amps: vec![Complex64::new(0.0, 0.0); len],
        })
    }

    pub fn coin_count(&self) -> usize {
        self.coins
    }

    /// Number of coin strings, `2^M`.
    pub fn register_dim(&self) -> usize {
        1 << self.coins
    }

    pub fn t_max(&self) -> usize {
        self.t_max
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    pub(crate) fn advance_step(&mut self) {
        self.steps_taken += 1;
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub(crate) fn replace_amplitudes(&mut self, amps: Vec<Complex64>) {
        debug_assert_eq!(amps.len(), self.amps.len());
        self.amps = amps;
    }

    pub fn positions(&self) -> std::ops::RangeInclusive<i64> {
        -(self.t_max as i64)..=(self.t_max as i64)
    }

    fn site(&self, x: i64) -> Result<usize> {
        let t = self.t_max as i64;
        if x < -t || x > t {
            return Err(WalkError::PositionOutOfRange { x, t_max: self.t_max });
        }
        Ok((x + t) as usize)
    }

    /// Amplitude by raw coin index (see the module docs for the encoding).
    pub fn amplitude_at(&self, x: i64, coin_index: usize) -> Result<Complex64> {
        let site = self.site(x)?;
        assert!(coin_index < self.register_dim(), "coin index out of range");
        Ok(self.amps[site * self.register_dim() + coin_index])
    }

    pub fn set_amplitude_at(&mut self, x: i64, coin_index: usize, value: Complex64) -> Result<()> {
        let site = self.site(x)?;
        assert!(coin_index < self.register_dim(), "coin index out of range");
        let dim = self.register_dim();
        self.amps[site * dim + coin_index] = value;
        Ok(())
    }

    fn check_register(&self, coins: &CoinRegister) -> Result<()> {
        if coins.len() != self.coins {
            return Err(WalkError::RegisterLength {
                got: coins.len(),
                expected: self.coins,
            });
        }
        Ok(())
    }

    pub fn amplitude(&self, x: i64, coins: &CoinRegister) -> Result<Complex64> {
        self.check_register(coins)?;
        self.amplitude_at(x, coins.index())
    }

    pub fn set_amplitude(&mut self, x: i64, coins: &CoinRegister, value: Complex64) -> Result<()> {
        self.check_register(coins)?;
        self.set_amplitude_at(x, coins.index(), value)
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&mut self, factor: Complex64) {
        for a in &mut self.amps {
            *a *= factor;
        }
    }

    fn check_same_shape(&self, other: &WalkState) -> Result<()> {
        if self.coins != other.coins {
            return Err(WalkError::CoinCountMismatch {
                state: self.coins,
                operand: other.coins,
            });
        }
        if self.t_max != other.t_max {
            return Err(WalkError::InvalidDimension(format!(
                "horizon mismatch: {} vs {}",
                self.t_max, other.t_max
            )));
        }
        Ok(())
    }

    /// `⟨self|other⟩`, conjugating `self`.
    pub fn inner(&self, other: &WalkState) -> Result<Complex64> {
        self.check_same_shape(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Per-site probabilities for every `x` in `[-t_max, t_max]`.
    pub fn site_probabilities(&self) -> Vec<f64> {
        self.amps
            .chunks_exact(self.register_dim())
            .map(|site| site.iter().map(|a| a.norm_sqr()).sum())
            .collect()
    }

    /// `P(x) = Σ_c |ψ(x, c)|²` on the occupied sublattice.
    pub fn position_distribution(&self) -> Result<ProbabilityDistribution> {
        let norm = self.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(WalkError::NotNormalized(norm));
        }
        ProbabilityDistribution::from_sites(-(self.t_max as i64), &self.site_probabilities())
    }
}

/// `|⟨a|b⟩|`.
pub fn fidelity(a: &WalkState, b: &WalkState) -> Result<f64> {
    Ok(a.inner(b)?.norm())
}

/// Probabilities on the lattice `start, start + spacing, ...`.
///
/// `spacing` is 2 when every nonzero point shares one parity (the usual case
/// for walks started at a single site) and 1 otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityDistribution {
    start: i64,
    spacing: i64,
    probs: Vec<f64>,
}

impl ProbabilityDistribution {
    /// Build from `(x, p)` pairs. Gaps on the inferred lattice are filled
    /// with zeros.
    pub fn from_pairs<I: IntoIterator<Item = (i64, f64)>>(pairs: I) -> Result<Self> {
        let mut pairs: Vec<(i64, f64)> = pairs.into_iter().collect();
        if pairs.is_empty() {
            return Err(WalkError::EmptyDistribution);
        }
        for &(_, p) in &pairs {
            if !p.is_finite() || p < 0.0 {
                return Err(WalkError::ProbabilityOutOfRange(p));
            }
        }
        pairs.sort_by_key(|&(x, _)| x);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(WalkError::IrregularSupport);
        }
        let start = pairs[0].0;
        let single_parity = pairs.iter().all(|&(x, _)| (x - start).rem_euclid(2) == 0);
        let spacing = if single_parity { 2 } else { 1 };
        let end = pairs[pairs.len() - 1].0;
        let mut probs = vec![0.0; ((end - start) / spacing + 1) as usize];
        for (x, p) in pairs {
            probs[((x - start) / spacing) as usize] = p;
        }
        Ok(ProbabilityDistribution { start, spacing, probs })
    }

    /// Trim raw unit-spaced site probabilities to the occupied sublattice.
    pub fn from_sites(first_x: i64, sites: &[f64]) -> Result<Self> {
        let first = sites
            .iter()
            .position(|&p| p > 0.0)
            .ok_or(WalkError::EmptyDistribution)?;
        let last = sites.iter().rposition(|&p| p > 0.0).unwrap();
        let single_parity = sites[first..=last]
            .iter()
            .enumerate()
            .all(|(k, &p)| k % 2 == 0 || p == 0.0);
        let spacing = if single_parity { 2 } else { 1 };
        let probs = sites[first..=last].iter().step_by(spacing as usize).copied().collect();
        Ok(ProbabilityDistribution {
            start: first_x + first as i64,
            spacing,
            probs,
        })
    }

    pub(crate) fn with_probs(&self, probs: Vec<f64>) -> Self {
        debug_assert_eq!(probs.len(), self.probs.len());
        ProbabilityDistribution {
            start: self.start,
            spacing: self.spacing,
            probs,
        }
    }

    pub fn spacing(&self) -> i64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn position(&self, i: usize) -> i64 {
        self.start + self.spacing * i as i64
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs.iter().enumerate().map(move |(i, &p)| (self.position(i), p))
    }

    /// `P(x)`, zero off the lattice.
    pub fn get(&self, x: i64) -> f64 {
        let off = x - self.start;
        if off < 0 || off % self.spacing != 0 {
            return 0.0;
        }
        self.probs.get((off / self.spacing) as usize).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn moments(&self) -> Moments {
        let mean: f64 = self.iter().map(|(x, p)| p * x as f64).sum();
        let second: f64 = self.iter().map(|(x, p)| p * (x * x) as f64).sum();
        Moments {
            mean,
            std: (second - mean * mean).max(0.0).sqrt(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub std: f64,
}
