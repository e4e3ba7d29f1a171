//! Seeded sampling of the sets the checks quantify over: the `α`-ball of
//! `X₊ ⊕ X₋` and the unit sphere of `X₀`.
//!
//! Every sample owns its own ChaCha stream (`seed`, sample index), so results
//! do not depend on how the work is split across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::spectral::{Decomposition, SpectralState};

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform point of `{y ∈ X₊ ⊕ X₋ : Σ w_i² y_i² ≤ radius²}` where `w_i = (λ_i+δ)^α`.
pub fn uniform_in_q_ball<R: Rng>(
    rng: &mut R,
    d: &Decomposition,
    alpha_weights: &[f64],
    radius: f64,
) -> SpectralState {
    let q_modes: Vec<usize> = d.idx_minus.iter().chain(&d.idx_plus).copied().collect();
    let mut out = SpectralState::zeros(d.n_modes());
    if q_modes.is_empty() || radius == 0.0 {
        return out;
    }
    let z: Vec<f64> = q_modes.iter().map(|_| rng.sample(StandardNormal)).collect();
    let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    let scale = radius * rng.random::<f64>().powf(1.0 / q_modes.len() as f64) / norm;
    for (&i, zi) in q_modes.iter().zip(&z) {
        out.0[i] = scale * zi / alpha_weights[i];
    }
    out
}

/// Uniform direction on the `H`-unit sphere of `X₀`.
pub fn unit_kernel_direction<R: Rng>(rng: &mut R, d: &Decomposition) -> SpectralState {
    let mut out = SpectralState::zeros(d.n_modes());
    loop {
        let z: Vec<f64> = d.idx0.iter().map(|_| rng.sample(StandardNormal)).collect();
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for (&i, zi) in d.idx0.iter().zip(&z) {
                out.0[i] = zi / norm;
            }
            return out;
        }
    }
}

/// `count` directions on the unit sphere of `X₀`: first `±e_i` for every kernel
/// mode, then seeded random directions. With `dim X₀ = 1` and `count = 2` this
/// is exactly `{+φ_k, −φ_k}`.
pub fn kernel_directions(d: &Decomposition, count: usize, seed: u64) -> Vec<SpectralState> {
    let mut dirs = Vec::with_capacity(count);
    'axes: for &i in &d.idx0 {
        for sign in [1.0, -1.0] {
            if dirs.len() == count {
                break 'axes;
            }
            let mut e = SpectralState::zeros(d.n_modes());
            e.0[i] = sign;
            dirs.push(e);
        }
    }
    let mut rng = stream(seed, u64::MAX);
    while dirs.len() < count {
        dirs.push(unit_kernel_direction(&mut rng, d));
    }
    dirs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{alpha_weights, build_laplacian_1d, decompose, fractional_norm_with, project, Part};
    use std::f64::consts::PI;

    #[test]
    fn ball_samples_stay_in_ball_and_in_q() {
        let es = build_laplacian_1d(12, PI).unwrap();
        let d = decompose(&es, 2).unwrap();
        let w = alpha_weights(&es, 0.8, 0.0).unwrap();
        for i in 0..200 {
            let y = uniform_in_q_ball(&mut stream(7, i), &d, &w, 3.0);
            assert!(fractional_norm_with(&y, &es, 0.8, 0.0).unwrap() <= 3.0 + 1e-12);
            assert_eq!(project(&y, &d, Part::P).unwrap(), es.zero_state());
        }
    }

    #[test]
    fn streams_are_reproducible() {
        let es = build_laplacian_1d(6, PI).unwrap();
        let d = decompose(&es, 1).unwrap();
        let w = alpha_weights(&es, 0.8, 0.0).unwrap();
        let a = uniform_in_q_ball(&mut stream(1, 5), &d, &w, 1.0);
        let b = uniform_in_q_ball(&mut stream(1, 5), &d, &w, 1.0);
        let c = uniform_in_q_ball(&mut stream(1, 6), &d, &w, 1.0);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn kernel_directions_cover_both_signs() {
        let es = build_laplacian_1d(5, PI).unwrap();
        let d = decompose(&es, 2).unwrap();
        let dirs = kernel_directions(&d, 2, 0);
        assert_eq!(dirs, vec![es.mode_state(1), es.mode_state(1).scaled(-1.0)]);
        let many = kernel_directions(&d, 5, 0);
        assert!(many.iter().all(|u| (u.norm() - 1.0).abs() < 1e-12));
    }
}
