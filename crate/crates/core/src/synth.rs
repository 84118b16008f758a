//! Seeded generators for test polynomials and majorants.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::majorant::Majorant;
use crate::trigpoly::TrigPoly;

/// Single exponential `e^{2 pi i k x}` in one dimension, box radius `|k|`.
pub fn wave(k: i64) -> TrigPoly {
    let mut p = TrigPoly::zeros(1, k.abs().max(1)).unwrap();
    p.set_coeff(&[k], Complex64::new(1.0, 0.0));
    p
}

/// Dense random polynomial with iid coefficients in the unit square.
pub fn random_box(d: usize, n: i64, seed: u64) -> Result<TrigPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = (2 * n as usize + 1).pow(d as u32);
    let mut coeffs = Vec::with_capacity(len);
    for _ in 0..len {
        coeffs.push(Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    }
    TrigPoly::from_coeffs(d, n, coeffs)
}

/// Random real-coefficient polynomial whose shell energies decay like
/// `R_n = n^{-gamma}`: each coefficient on shell `n` has modulus
/// `n^{-gamma}/sqrt(#shell)` and a random sign.
pub fn random_shell_decay(d: usize, n: i64, gamma: f64, seed: u64) -> Result<TrigPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = TrigPoly::zeros(d, n)?;
    let mut counts = vec![0u64; n as usize + 1];
    for (k, _) in p.iter() {
        let shell = k.iter().take(d).map(|ki| ki.unsigned_abs()).max().unwrap();
        counts[shell as usize] += 1;
    }
    let keys: Vec<[i64; 3]> = p.iter().map(|(k, _)| k).collect();
    for k in keys {
        let shell = k.iter().take(d).map(|ki| ki.unsigned_abs()).max().unwrap();
        if shell == 0 {
            continue;
        }
        let amp = (shell as f64).powf(-gamma) / (counts[shell as usize] as f64).sqrt();
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        p.set_coeff(&k[..d], Complex64::new(sign * amp, 0.0));
    }
    Ok(p)
}

/// Polynomial with prescribed shell energies and uniformly random phases:
/// shell `n` gets `#shell` coefficients of modulus `profile[n]/sqrt(#shell)`.
pub fn from_shell_energies(d: usize, profile: &[f64], seed: u64) -> Result<TrigPoly> {
    let n = profile.len() as i64 - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = TrigPoly::zeros(d, n)?;
    let mut counts = vec![0u64; profile.len()];
    for (k, _) in p.iter() {
        let shell = k.iter().take(d).map(|ki| ki.unsigned_abs()).max().unwrap();
        counts[shell as usize] += 1;
    }
    let keys: Vec<[i64; 3]> = p.iter().map(|(k, _)| k).collect();
    for k in keys {
        let shell = k.iter().take(d).map(|ki| ki.unsigned_abs()).max().unwrap() as usize;
        if profile[shell] == 0.0 {
            continue;
        }
        let amp = profile[shell] / (counts[shell] as f64).sqrt();
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        p.set_coeff(&k[..d], Complex64::from_polar(amp, phase));
    }
    Ok(p)
}

/// Uniform nonnegative vector in `[0,1)^size`.
pub fn random_nonneg(size: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..size).map(|_| rng.gen_range(0.0..1.0)).collect()
}

/// Random r-quasiconcave tabulated majorant built from multiplicative steps
/// that respect both monotonicities exactly.
pub fn random_quasiconcave(r: f64, nmax: u64, seed: u64) -> Majorant {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(nmax as usize);
    values.push(1.0f64);
    for n in 1..nmax {
        let lo = (n as f64 / (n as f64 + 1.0)).powf(r);
        let u = rng.gen_range(lo..=1.0);
        values.push(values[n as usize - 1] * u);
    }
    Majorant::Tabulated { values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorant::validate_quasiconcave;

    #[test]
    fn shell_decay_profile_matches_target() {
        let p = random_shell_decay(2, 8, 1.3, 5).unwrap();
        let prof = p.shell_profile();
        for n in 1..=8u32 {
            let want = (n as f64).powf(-1.3);
            assert!((prof.values[n as usize] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn random_quasiconcave_validates() {
        for seed in 0..5 {
            let m = random_quasiconcave(1.5, 300, seed);
            assert!(validate_quasiconcave(&m, 1.5, 300).pass);
        }
    }

    #[test]
    fn prescribed_energies_are_reproduced() {
        let profile = vec![0.0, 1.0, 0.25, 0.0, 2.0];
        let p = from_shell_energies(2, &profile, 9).unwrap();
        let got = p.shell_profile();
        for (a, b) in profile.iter().zip(&got.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
