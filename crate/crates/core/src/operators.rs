//! Coin unitary and the single-step operators of the history-dependent walk.
//!
//! One toss acts on coin `M` (the oldest result) with a retention parameter
//! selected by coins `1 .. M-1`, moves the particle according to the new
//! value of coin `M`, and finally rotates the register so the fresh result
//! sits in position 1.

use num_complex::Complex64;

use crate::error::{Result, WalkError};
use crate::state::{CoinRegister, WalkState};

/// 2×2 coin matrix acting on `(a_L, a_R)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoinUnitary {
    pub entries: [[Complex64; 2]; 2],
}

impl CoinUnitary {
    pub fn apply(&self, l: Complex64, r: Complex64) -> (Complex64, Complex64) {
        let m = &self.entries;
        (m[0][0] * l + m[0][1] * r, m[1][0] * l + m[1][1] * r)
    }

    /// Largest entrywise deviation of `U†U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let m = &self.entries;
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let v: Complex64 = (0..2).map(|k| m[k][i].conj() * m[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - target).norm());
            }
        }
        worst
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(WalkError::RhoOutOfRange(rho));
    }
    Ok(())
}

/// `[[√ρ, i√(1-ρ)], [i√(1-ρ), √ρ]]`; `1 - ρ` is the probability that the
/// coin changes state.
pub fn coin_unitary(rho: f64) -> Result<CoinUnitary> {
    check_rho(rho)?;
    let keep = Complex64::new(rho.sqrt(), 0.0);
    let flip = Complex64::new(0.0, (1.0 - rho).sqrt());
    Ok(CoinUnitary {
        entries: [[keep, flip], [flip, keep]],
    })
}

/// Retention parameter for every history of the `M - 1` most recent coins.
///
/// This is one "game". Entries are indexed with the same bit order as
/// [`CoinRegister::index`]; for `M = 1` there is a single entry keyed by the
/// empty history.
#[derive(Clone, Debug, PartialEq)]
pub struct HistoryRhoTable {
    coins: usize,
    rho: Vec<f64>,
}

impl HistoryRhoTable {
    pub fn uniform(coins: usize, rho: f64) -> Result<Self> {
        if coins < 1 {
            return Err(WalkError::InvalidDimension(format!(
                "coin count must be >= 1, got {coins}"
            )));
        }
        check_rho(rho)?;
        Ok(HistoryRhoTable {
            coins,
            rho: vec![rho; 1 << (coins - 1)],
        })
    }

    /// Every entry 1/2.
    pub fn unbiased(coins: usize) -> Result<Self> {
        Self::uniform(coins, 0.5)
    }

    pub fn from_fn(coins: usize, mut f: impl FnMut(&CoinRegister) -> f64) -> Result<Self> {
        let mut table = Self::unbiased(coins)?;
        for i in 0..table.rho.len() {
            let rho = f(&CoinRegister::from_index(i, coins - 1));
            check_rho(rho)?;
            table.rho[i] = rho;
        }
        Ok(table)
    }

    pub fn coin_count(&self) -> usize {
        self.coins
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.rho
    }

    /// Parse a history key such as `"RL"` and check its length is `M - 1`.
    pub fn parse_history(&self, key: &str) -> Result<CoinRegister> {
        let history: CoinRegister = key.parse()?;
        if history.len() != self.coins - 1 {
            return Err(WalkError::HistoryLength {
                key: key.to_string(),
                got: history.len(),
                expected: self.coins - 1,
            });
        }
        Ok(history)
    }

    fn check_history(&self, history: &CoinRegister) -> Result<()> {
        if history.len() != self.coins - 1 {
            return Err(WalkError::HistoryLength {
                key: history.to_string(),
                got: history.len(),
                expected: self.coins - 1,
            });
        }
        Ok(())
    }

    pub fn get(&self, history: &CoinRegister) -> Result<f64> {
        self.check_history(history)?;
        Ok(self.rho[history.index()])
    }

    pub fn set(&mut self, history: &CoinRegister, rho: f64) -> Result<()> {
        self.check_history(history)?;
        check_rho(rho)?;
        self.rho[history.index()] = rho;
        Ok(())
    }

    /// Builder form of [`set`](Self::set) taking a string key.
    pub fn with(mut self, key: &str, rho: f64) -> Result<Self> {
        let history = self.parse_history(key)?;
        self.set(&history, rho)?;
        Ok(self)
    }

    pub fn entries(&self) -> impl Iterator<Item = (CoinRegister, f64)> + '_ {
        self.rho
            .iter()
            .enumerate()
            .map(move |(i, &r)| (CoinRegister::from_index(i, self.coins - 1), r))
    }

    /// Table with `ρ'_h = ρ_{complement(h)}`.
    pub fn mirrored(&self) -> Self {
        let mask = self.rho.len() - 1;
        HistoryRhoTable {
            coins: self.coins,
            rho: (0..self.rho.len()).map(|i| self.rho[i ^ mask]).collect(),
        }
    }

    fn unitaries(&self) -> Vec<CoinUnitary> {
        self.rho
            .iter()
            .map(|&r| coin_unitary(r).expect("table entries are validated"))
            .collect()
    }
}

/// Fixed coin sequence `ρ_1 .. ρ_M` cycled by step index.
#[derive(Clone, Debug, PartialEq)]
pub struct BrunCoinList(Vec<f64>);

impl BrunCoinList {
    pub fn new(rhos: Vec<f64>) -> Result<Self> {
        if rhos.is_empty() {
            return Err(WalkError::InvalidDimension("empty coin list".into()));
        }
        for &r in &rhos {
            check_rho(r)?;
        }
        Ok(BrunCoinList(rhos))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Coin used at step `t` (0-based), `ρ_{t mod M}`.
    pub fn rho_at(&self, t: usize) -> f64 {
        self.0[t % self.0.len()]
    }
}

fn check_table(state: &WalkState, table: &HistoryRhoTable) -> Result<()> {
    if table.coin_count() != state.coin_count() {
        return Err(WalkError::CoinCountMismatch {
            state: state.coin_count(),
            operand: table.coin_count(),
        });
    }
    Ok(())
}

fn flip_with(state: &mut WalkState, unitaries: &[CoinUnitary]) {
    let dim = state.register_dim();
    for site in state.amplitudes_mut().chunks_exact_mut(dim) {
        for (h, u) in unitaries.iter().enumerate() {
            let (l, r) = u.apply(site[2 * h], site[2 * h + 1]);
            site[2 * h] = l;
            site[2 * h + 1] = r;
        }
    }
}

/// Toss coin `M` with `U(ρ_{j_1..j_{M-1}})`; position and the other coins
/// are untouched.
pub fn apply_conditional_flip(state: &mut WalkState, table: &HistoryRhoTable) -> Result<()> {
    check_table(state, table)?;
    flip_with(state, &table.unitaries());
    Ok(())
}

fn check_shift_room(state: &WalkState) -> Result<()> {
    let dim = state.register_dim();
    let amps = state.amplitudes();
    let zero = Complex64::new(0.0, 0.0);
    let first = &amps[..dim];
    let last = &amps[amps.len() - dim..];
    let escapes_left = first.iter().step_by(2).any(|a| *a != zero);
    let escapes_right = last.iter().skip(1).step_by(2).any(|a| *a != zero);
    if escapes_left || escapes_right {
        return Err(WalkError::HorizonExceeded { t_max: state.t_max() });
    }
    Ok(())
}

fn rotate_index(c: usize, coins: usize) -> usize {
    ((c & 1) << (coins - 1)) | (c >> 1)
}

/// Move each basis amplitude one site right if coin `M` is `R`, left if `L`.
pub fn apply_shift(state: &mut WalkState) -> Result<()> {
    shift_and_maybe_reorder(state, false)
}

/// Relabel `j_1 .. j_M` as `j_M j_1 .. j_{M-1}`.
pub fn apply_reorder(state: &mut WalkState) {
    let coins = state.coin_count();
    let dim = state.register_dim();
    let mut scratch = vec![Complex64::new(0.0, 0.0); dim];
    for site in state.amplitudes_mut().chunks_exact_mut(dim) {
        for (c, a) in site.iter().enumerate() {
            scratch[rotate_index(c, coins)] = *a;
        }
        site.copy_from_slice(&scratch);
    }
}

fn shift_and_maybe_reorder(state: &mut WalkState, reorder: bool) -> Result<()> {
    check_shift_room(state)?;
    let coins = state.coin_count();
    let dim = state.register_dim();
    let amps = state.amplitudes();
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    let sites = amps.len() / dim;
    for s in 0..sites {
        for c in 0..dim {
            let a = amps[s * dim + c];
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            // check_shift_room guarantees the target site exists
            let target = if c & 1 == 1 { s + 1 } else { s - 1 };
            let tc = if reorder { rotate_index(c, coins) } else { c };
            out[target * dim + tc] = a;
        }
    }
    state.replace_amplitudes(out);
    Ok(())
}

fn toss_with(state: &mut WalkState, unitaries: &[CoinUnitary]) -> Result<()> {
    let dim = state.register_dim();
    let amps = state.amplitudes();
    let zero = Complex64::new(0.0, 0.0);
    let edges_empty = amps[..dim].iter().chain(&amps[amps.len() - dim..]).all(|a| *a == zero);
    if edges_empty {
        flip_with(state, unitaries);
        shift_and_maybe_reorder(state, true)?;
    } else {
        // the flip is undone on failure so the caller sees an unchanged state
        let before = state.clone();
        flip_with(state, unitaries);
        if let Err(e) = shift_and_maybe_reorder(state, true) {
            *state = before;
            return Err(e);
        }
    }
    state.advance_step();
    Ok(())
}

/// One full step: conditional flip, shift, reorder.
pub fn toss(state: &mut WalkState, table: &HistoryRhoTable) -> Result<()> {
    check_table(state, table)?;
    toss_with(state, &table.unitaries())
}

/// One step of the fixed-sequence multi-coin walk: coin `M` is flipped with
/// `ρ_{t mod M}` regardless of history, then shift and reorder as in
/// [`toss`].
pub fn brun_toss(state: &mut WalkState, coins: &BrunCoinList, t: usize) -> Result<()> {
    if coins.len() != state.coin_count() {
        return Err(WalkError::CoinCountMismatch {
            state: state.coin_count(),
            operand: coins.len(),
        });
    }
    let u = coin_unitary(coins.rho_at(t))?;
    toss_with(state, &vec![u; state.register_dim() / 2])
}
