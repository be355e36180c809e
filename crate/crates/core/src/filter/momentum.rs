use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quantum::C64;

/// Largest number of phase bits accepted for a momentum state.
pub const MAX_PHASE_BITS: usize = 24;

/// `2^{-k/2} Σ_j e^{-i2πμj} |j⟩` over `k` phase bits.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumState {
    mu: f64,
    bits: usize,
    amplitudes: Vec<C64>,
}

impl MomentumState {
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }
}

pub fn momentum_state(mu: f64, bits: usize) -> Result<MomentumState> {
    if bits == 0 {
        return Err(Error::validation(
            "momentum state needs at least one phase bit",
        ));
    }
    if bits > MAX_PHASE_BITS {
        return Err(Error::capacity("phase bits", bits, MAX_PHASE_BITS));
    }
    if !(0.0..1.0).contains(&mu) {
        return Err(Error::validation(format!(
            "filter center {mu} must lie in [0, 1)"
        )));
    }
    let size = 1usize << bits;
    let norm = 1.0 / (size as f64).sqrt();
    let amplitudes = (0..size)
        .map(|j| {
            // Reduce μ·j mod 1 before scaling by 2π to keep the phase exact.
            let turns = (mu * j as f64).rem_euclid(1.0);
            C64::from_polar(norm, -2.0 * PI * turns)
        })
        .collect();
    Ok(MomentumState {
        mu,
        bits,
        amplitudes,
    })
}

/// `⟨φ|μ⟩ = 2^{-k} Σ_{j<2^k} e^{i2πj(φ-μ)}`, summed term by term.
pub fn momentum_overlap(phi: f64, mu: f64, bits: usize) -> C64 {
    let size = 1usize << bits;
    let delta = (phi - mu).rem_euclid(1.0);
    let step = C64::from_polar(1.0, 2.0 * PI * delta);
    let mut term = C64::new(1.0, 0.0);
    let mut sum = C64::new(0.0, 0.0);
    for j in 0..size {
        // Re-anchor periodically so the running product does not drift.
        if j % 64 == 0 {
            term = C64::from_polar(1.0, 2.0 * PI * (delta * j as f64).rem_euclid(1.0));
        }
        sum += term;
        term *= step;
    }
    sum / size as f64
}

/// Geometric-series form of [`momentum_overlap`]; an independent route used
/// for cross-checks.
pub fn momentum_overlap_closed_form(phi: f64, mu: f64, bits: usize) -> C64 {
    let size = (1u64 << bits) as f64;
    let delta = (phi - mu).rem_euclid(1.0);
    let denom = C64::new(1.0, 0.0) - C64::from_polar(1.0, 2.0 * PI * delta);
    if denom.norm() < 1e-14 {
        return C64::new(1.0, 0.0);
    }
    let numer =
        C64::new(1.0, 0.0) - C64::from_polar(1.0, 2.0 * PI * (delta * size).rem_euclid(1.0));
    numer / denom / size
}

/// Distance between two phases on the unit circle, in `[0, 1/2]`.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// `1 / (2^{k+1} d)` with `d` the circular phase distance.
pub fn overlap_upper_bound(phi: f64, mu: f64, bits: usize) -> f64 {
    1.0 / ((1u64 << (bits + 1)) as f64 * phase_distance(phi, mu))
}

/// Radius `2^{-k} / (2π√η)` inside which `|⟨φ|μ⟩|^η ≥ 1/2`.
pub fn overlap_lower_bound_radius(bits: usize, repetitions: usize) -> f64 {
    1.0 / ((1u64 << bits) as f64 * 2.0 * PI * (repetitions as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_center_is_uniform() {
        let s = momentum_state(0.0, 3).unwrap();
        let a = 1.0 / 8f64.sqrt();
        assert!(s
            .amplitudes()
            .iter()
            .all(|z| (z - C64::new(a, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn half_center_single_bit() {
        let s = momentum_state(0.5, 1).unwrap();
        let a = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0] - C64::new(a, 0.0)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - C64::new(-a, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn unit_norm() {
        for (mu, k) in [(0.1, 1), (0.37, 5), (0.999, 10)] {
            let s = momentum_state(mu, k).unwrap();
            let n: f64 = s.amplitudes().iter().map(|z| z.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-13);
        }
        assert!(momentum_state(1.0, 3).is_err());
        assert!(momentum_state(0.5, 0).is_err());
    }

    #[test]
    fn overlap_matches_state_inner_product() {
        let (phi, mu, k) = (0.31, 0.27, 4);
        let a = momentum_state(phi, k).unwrap();
        let b = momentum_state(mu, k).unwrap();
        let ip: C64 = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| x.conj() * y)
            .sum();
        assert!((ip - momentum_overlap(phi, mu, k)).norm() < 1e-14);
    }

    #[test]
    fn identical_phases_overlap_one() {
        assert!((momentum_overlap(0.4, 0.4, 6) - C64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn quarter_offset_with_two_bits_vanishes() {
        assert!(momentum_overlap(0.5, 0.25, 2).norm() < 1e-15);
    }

    #[test]
    fn sum_and_closed_form_agree() {
        for k in 1..=10 {
            for i in 0..50 {
                let phi = (i as f64 * 0.0731).fract();
                let mu = (i as f64 * 0.1377 + 0.05).fract();
                let a = momentum_overlap(phi, mu, k);
                let b = momentum_overlap_closed_form(phi, mu, k);
                assert!((a - b).norm() < 1e-12, "k={k} phi={phi} mu={mu}");
            }
        }
    }

    #[test]
    fn peak_at_center_with_width_of_order_two_to_minus_k() {
        for k in 2..=8 {
            let mu = 0.4;
            let peak = momentum_overlap(mu, mu, k).norm();
            let step = 1.0 / (1u64 << (k + 6)) as f64;
            let mut half_width = None;
            for i in 1..(1 << 8) {
                let v = momentum_overlap(mu + i as f64 * step, mu, k).norm();
                assert!(v <= peak + 1e-12);
                if half_width.is_none() && v < 0.5 {
                    half_width = Some(i as f64 * step);
                }
            }
            // |sin(πKd)/(K sin(πd))| = 1/2 at d ≈ 0.603/K.
            let w = half_width.unwrap() * (1u64 << k) as f64;
            assert!(w > 0.5 && w < 0.7, "k={k} scaled half width {w}");
        }
    }
}
