//! Shape diagnostics for position distributions: smoothing, peak finding
//! and reflection symmetry.

use crate::error::{Result, WalkError};
use crate::state::ProbabilityDistribution;

/// Moving average over `window` lattice points, treating points outside the
/// support as zero, then renormalised to the original total. `window = 1`
/// returns the input unchanged.
pub fn smooth_distribution(dist: &ProbabilityDistribution, window: usize) -> Result<ProbabilityDistribution> {
    if window.is_multiple_of(2) {
        return Err(WalkError::InvalidWindow(window));
    }
    if dist.is_empty() {
        return Err(WalkError::EmptyDistribution);
    }
    if window == 1 {
        return Ok(dist.clone());
    }
    let probs = dist.probabilities();
    let half = window / 2;
    let n = probs.len();
    let mut out: Vec<f64> = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            probs[lo..=hi].iter().sum::<f64>() / window as f64
        })
        .collect();
    let before = dist.total();
    let after: f64 = out.iter().sum();
    if after > 0.0 {
        for p in &mut out {
            *p *= before / after;
        }
    }
    Ok(dist.with_probs(out))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    pub position: i64,
    pub height: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeakReport {
    pub peaks: Vec<Peak>,
    pub window: usize,
    pub prominence: f64,
}

impl PeakReport {
    pub fn positions(&self) -> Vec<i64> {
        self.peaks.iter().map(|p| p.position).collect()
    }

    /// The two highest peaks, ordered by position.
    pub fn dominant_pair(&self) -> Option<(Peak, Peak)> {
        if self.peaks.len() < 2 {
            return None;
        }
        let mut by_height = self.peaks.clone();
        by_height.sort_by(|a, b| b.height.total_cmp(&a.height).then(a.position.cmp(&b.position)));
        let (a, b) = (by_height[0], by_height[1]);
        Some(if a.position < b.position { (a, b) } else { (b, a) })
    }
}

/// Local maxima of `dist` on its lattice whose height is at least
/// `prominence` times the global maximum. Neighbours beyond the support
/// count as zero; a flat top is reported at its leftmost point.
pub fn find_peaks(dist: &ProbabilityDistribution, prominence: f64) -> Result<PeakReport> {
    if !(prominence > 0.0 && prominence < 1.0) {
        return Err(WalkError::InvalidProminence(prominence));
    }
    if dist.is_empty() {
        return Err(WalkError::EmptyDistribution);
    }
    let probs = dist.probabilities();
    let max = probs.iter().copied().fold(0.0, f64::max);
    let threshold = prominence * max;
    let mut peaks = Vec::new();
    let mut i = 0;
    while i < probs.len() {
        let mut j = i;
        while j + 1 < probs.len() && probs[j + 1] == probs[i] {
            j += 1;
        }
        let left = if i == 0 { 0.0 } else { probs[i - 1] };
        let right = probs.get(j + 1).copied().unwrap_or(0.0);
        let v = probs[i];
        if v > left && v > right && v > 0.0 && v >= threshold {
            peaks.push(Peak {
                position: dist.position(i),
                height: v,
            });
        }
        i = j + 1;
    }
    Ok(PeakReport {
        peaks,
        window: 1,
        prominence,
    })
}

/// Smooth with `window`, then find peaks.
pub fn smoothed_peaks(dist: &ProbabilityDistribution, window: usize, prominence: f64) -> Result<PeakReport> {
    let smoothed = smooth_distribution(dist, window)?;
    let mut report = find_peaks(&smoothed, prominence)?;
    report.window = window;
    Ok(report)
}

/// `max_x |P(x) - P(-x)|`.
pub fn symmetry_deviation(dist: &ProbabilityDistribution) -> f64 {
    dist.iter().map(|(x, p)| (p - dist.get(-x)).abs()).fold(0.0, f64::max)
}
