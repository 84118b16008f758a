//! Moduli of smoothness and the equivalent Lipschitz functionals.
//!
//! The central object is `omega_r(D^l f, t)_q = sup |Delta_h^r (d_alpha f)|_q`
//! over steps `0 < |h| < t` and multi-indices `|alpha| = l`. The supremum over
//! `h` is realized as a maximum over a geometric radius ladder crossed with a
//! finite direction set; for a dyadic `t`-grid the ladders nest, so the
//! sampled modulus is monotone in `t` by construction. For `q = 2` the norm
//! is evaluated exactly through Parseval; for `q = infinity` through
//! oversampled grid maxima.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::majorant::{BlockLabel, DiscretizingSequence, Majorant};
use crate::trigpoly::{multi_indices, ShellProfile, TrigPoly};

/// Levels below the smallest grid `t` kept in every radius ladder.
const RADII_EXTRA_DEPTH: u32 = 4;

/// Which function norm the modulus uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleNorm {
    /// Exact Parseval path.
    L2,
    /// Oversampled grid maxima.
    Sup,
}

/// Parameters of a modulus sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModulusQuery {
    /// Order of the finite difference, `r >= 1`.
    pub r: u32,
    /// Derivative order `l >= 0`.
    pub l: u32,
    pub q: SampleNorm,
    /// Decreasing values in `(0, 1]`.
    pub t_grid: Vec<f64>,
    /// Direction sampling density (ignored for d = 1).
    pub direction_count: usize,
    /// Oversampling factor for the sup-norm path.
    pub oversample: usize,
}

impl ModulusQuery {
    pub fn new(r: u32, l: u32, q: SampleNorm, t_grid: Vec<f64>) -> Self {
        ModulusQuery { r, l, q, t_grid, direction_count: 8, oversample: 4 }
    }
}

/// Dyadic grid `1/2, 1/4, ..., 1/n` (powers of two only).
pub fn dyadic_t_grid(n: u64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut t = 0.5;
    while t >= 1.0 / n as f64 {
        out.push(t);
        t /= 2.0;
    }
    if out.is_empty() {
        out.push(0.5);
    }
    out
}

/// One row of a modulus sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModulusPoint {
    pub t: f64,
    pub value: f64,
    /// Step realizing the sampled maximum.
    pub argmax_h: Vec<f64>,
    /// Multi-index realizing the sampled maximum.
    pub argmax_alpha: Vec<u32>,
}

fn directions(d: usize, count: usize) -> Vec<[f64; 3]> {
    match d {
        1 => vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
        2 => (0..count.max(1))
            .map(|i| {
                let th = std::f64::consts::TAU * i as f64 / count.max(1) as f64;
                [th.cos(), th.sin(), 0.0]
            })
            .collect(),
        3 => {
            // spherical Fibonacci set
            let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
            let count = count.max(2);
            (0..count)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                    let rho = (1.0 - z * z).sqrt();
                    let th = std::f64::consts::TAU * i as f64 / golden;
                    [rho * th.cos(), rho * th.sin(), z]
                })
                .collect()
        }
        _ => panic!("dimension must be 1..=3"),
    }
}

fn radius_ladder(t: f64, floor: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut rho = t;
    while rho >= floor * (1.0 - 1e-12) {
        out.push(rho);
        rho /= 2.0;
    }
    if out.is_empty() {
        out.push(t);
    }
    out
}

/// Modulus of smoothness sweep over the query's `t`-grid.
pub fn modulus(f: &TrigPoly, query: &ModulusQuery) -> Result<Vec<ModulusPoint>> {
    if query.t_grid.is_empty() {
        return Err(Error::Parameter("empty t grid".into()));
    }
    if query.t_grid.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
        return Err(Error::Parameter("t grid values must lie in (0,1]".into()));
    }
    if query.t_grid.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::Parameter("t grid must be strictly decreasing".into()));
    }
    let d = f.d();
    let dirs = directions(d, query.direction_count);
    let t_min = *query.t_grid.last().unwrap();
    let floor = t_min / 2.0f64.powi(RADII_EXTRA_DEPTH as i32);
    let alphas = multi_indices(d, query.l);

    // Pre-extract data per alpha.
    enum Prepared {
        Sparse(Vec<([i64; 3], f64)>), // (k, |(2 pi k)^alpha|^2 |a_k|^2)
        Poly(TrigPoly),
    }
    let prepared: Vec<Prepared> = alphas
        .iter()
        .map(|alpha| match query.q {
            SampleNorm::L2 => {
                let tau = std::f64::consts::TAU;
                let entries = f
                    .iter()
                    .filter(|(_, c)| c.norm_sqr() > 0.0)
                    .map(|(k, c)| {
                        let mut w = c.norm_sqr();
                        for i in 0..d {
                            let base = (tau * k[i] as f64) * (tau * k[i] as f64);
                            for _ in 0..alpha[i] {
                                w *= base;
                            }
                        }
                        (k, w)
                    })
                    .collect();
                Prepared::Sparse(entries)
            }
            SampleNorm::Sup => Prepared::Poly(f.partial_derivative(&alpha[..d])),
        })
        .collect();

    let value_at = |h: &[f64; 3], alpha_idx: usize| -> f64 {
        match &prepared[alpha_idx] {
            Prepared::Sparse(entries) => {
                let tau = std::f64::consts::TAU;
                let mut acc = 0.0;
                for (k, w) in entries {
                    let mut phase = 0.0;
                    for i in 0..d {
                        phase += k[i] as f64 * h[i];
                    }
                    // |1 - e^{i tau phase}|^2 = 2 - 2 cos(tau phase)
                    let m2 = 2.0 - 2.0 * (tau * phase).cos();
                    acc += w * m2.powi(query.r as i32);
                }
                acc.sqrt()
            }
            Prepared::Poly(g) => {
                g.difference(&h[..d], query.r).sup_norm(query.oversample)
            }
        }
    };

    let mut out = Vec::with_capacity(query.t_grid.len());
    for &t in &query.t_grid {
        let mut best = 0.0f64;
        let mut best_h = vec![0.0; d];
        let mut best_alpha = vec![0u32; d];
        for rho in radius_ladder(t, floor) {
            for u in &dirs {
                let h = [rho * u[0], rho * u[1], rho * u[2]];
                for (ai, alpha) in alphas.iter().enumerate() {
                    let v = value_at(&h, ai);
                    if v > best {
                        best = v;
                        best_h = h[..d].to_vec();
                        best_alpha = alpha[..d].to_vec();
                    }
                }
            }
        }
        out.push(ModulusPoint { t, value: best, argmax_h: best_h, argmax_alpha: best_alpha });
    }
    Ok(out)
}

/// CSV rows `t,value,h_1..h_d,alpha_1..alpha_d` for plot pipelines.
pub fn modulus_to_csv(points: &[ModulusPoint]) -> String {
    let mut out = String::new();
    if let Some(first) = points.first() {
        out.push_str("t,value");
        for i in 1..=first.argmax_h.len() {
            out.push_str(&format!(",h{i}"));
        }
        for i in 1..=first.argmax_alpha.len() {
            out.push_str(&format!(",alpha{i}"));
        }
        out.push('\n');
    }
    for p in points {
        out.push_str(&format!("{:.16e},{:.16e}", p.t, p.value));
        for h in &p.argmax_h {
            out.push_str(&format!(",{h:.16e}"));
        }
        for a in &p.argmax_alpha {
            out.push_str(&format!(",{a}"));
        }
        out.push('\n');
    }
    out
}

/// Functional (i): `sup_t omega_r(D^l f, t)_2 / omega(t)` over the query's
/// `t`-grid. The L2 norm is forced regardless of the query's `q`.
pub fn lip_functional_i(f: &TrigPoly, omega: &Majorant, query: &ModulusQuery) -> Result<f64> {
    let mut q = query.clone();
    q.q = SampleNorm::L2;
    let points = modulus(f, &q)?;
    let mut best = 0.0f64;
    for p in &points {
        let w = omega.eval(p.t)?;
        if w <= 0.0 {
            return Err(Error::DegenerateMajorant(format!("omega({}) = 0", p.t)));
        }
        best = best.max(p.value / w);
    }
    Ok(best)
}

/// Functional (ii): `max_N (sum_n |R_n n^l min(1, n^r/N^r)|^2)^(1/2) / omega(1/N)`.
pub fn lip_functional_ii(
    profile: &ShellProfile,
    omega: &Majorant,
    r: u32,
    l: u32,
    n_grid: &[u64],
) -> f64 {
    let mut best = 0.0f64;
    for &cap in n_grid {
        if cap == 0 {
            continue;
        }
        let mut acc = 0.0f64;
        for (n, rn) in profile.values.iter().enumerate().skip(1) {
            if *rn == 0.0 {
                continue;
            }
            let nf = n as f64;
            let ramp = if (n as u64) <= cap { (nf / cap as f64).powi(r as i32) } else { 1.0 };
            let term = rn * nf.powi(l as i32) * ramp.min(1.0);
            acc += term * term;
        }
        let w = omega.eval_at_inv(cap);
        best = best.max(acc.sqrt() / w);
    }
    best
}

/// Default `N`-grid for functional (ii): `1..=n_box` plus one sentinel far
/// beyond the box, where the weighted multiplier has saturated.
pub fn default_n_grid(n_box: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=n_box).collect();
    out.push(4 * n_box.max(1));
    out
}

/// Value of functional (iii) plus a truncation marker.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BlockFunctional {
    pub value: f64,
    /// Set when blocks extended past the profile length and were cut.
    pub truncated: bool,
}

/// Functional (iii): block sums against the discretizing sequence, with
/// `omega_{mu_k}` normalization on I-blocks and the weighted end value on
/// J-blocks.
pub fn lip_functional_iii(
    profile: &ShellProfile,
    omega: &Majorant,
    seq: &DiscretizingSequence,
    r: u32,
    l: u32,
) -> BlockFunctional {
    let n_profile = profile.values.len() as u64 - 1;
    let mut truncated = false;
    let mut best = 0.0f64;
    for k in 0..seq.block_count() {
        let (lo, hi) = seq.block_range(k);
        if lo > n_profile {
            truncated = true;
            break;
        }
        let hi_eff = if hi > n_profile {
            truncated = truncated || k + 1 < seq.block_count();
            n_profile
        } else {
            hi
        };
        let (power, norm) = match seq.labels[k] {
            BlockLabel::I => (l as f64, omega.eval_at_inv(lo)),
            BlockLabel::J => ((l + r) as f64, omega.weighted_at_inv(hi_eff, r as f64)),
        };
        let mut acc = 0.0f64;
        for n in lo..=hi_eff {
            let rn = profile.values[n as usize];
            if rn > 0.0 {
                let term = (n as f64).powf(power) * rn;
                acc += term * term;
            }
        }
        best = best.max(acc.sqrt() / norm);
    }
    BlockFunctional { value: best, truncated }
}

/// `|T|_{C^{l+r}} / (N^r |T|_{C^l})` with `N` the box radius.
pub fn bernstein_ratio(t: &TrigPoly, l: u32, r: u32, oversample: usize) -> Result<f64> {
    if t.is_zero() {
        return Err(Error::UndefinedRatio("bernstein ratio of the zero polynomial".into()));
    }
    let n = t.box_radius();
    if n < 1 {
        return Err(Error::Parameter("box radius must be at least 1".into()));
    }
    let hi = t.cs_norm(l + r, oversample);
    let lo = t.cs_norm(l, oversample);
    Ok(hi / ((n as f64).powi(r as i32) * lo))
}

/// `|F|_{C^{l+r}} / (N^r |F|_{C^l})` for a high-pass polynomial: every
/// nonzero coefficient must have `||k||_inf >= n_min`.
pub fn reverse_bernstein_ratio(
    f: &TrigPoly,
    l: u32,
    r: u32,
    n_min: u64,
    oversample: usize,
) -> Result<f64> {
    if f.is_zero() {
        return Err(Error::UndefinedRatio("reverse bernstein ratio of the zero polynomial".into()));
    }
    if n_min < 1 {
        return Err(Error::Parameter("n_min must be at least 1".into()));
    }
    for (k, c) in f.iter() {
        if c.norm_sqr() > 0.0 {
            let shell = k.iter().take(f.d()).map(|ki| ki.unsigned_abs()).max().unwrap();
            if shell < n_min {
                return Err(Error::Precondition(format!(
                    "coefficient at ||k||_inf = {shell} violates the high-pass condition >= {n_min}"
                )));
            }
        }
    }
    let hi = f.cs_norm(l + r, oversample);
    let lo = f.cs_norm(l, oversample);
    Ok(hi / ((n_min as f64).powi(r as i32) * lo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorant::discretize;
    use crate::synth;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    #[test]
    fn modulus_single_wave_closed_form() {
        // sup_{|h|<t} |1 - e^{2 pi i h}| = 2 sin(pi t) for t <= 1/2, hit at the
        // ladder's top radius.
        let f = synth::wave(1);
        let q = ModulusQuery::new(1, 0, SampleNorm::L2, vec![0.5]);
        let pts = modulus(&f, &q).unwrap();
        assert_relative_eq!(pts[0].value, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn modulus_vanishes_at_small_t() {
        let f = synth::random_box(1, 4, 3).unwrap();
        let q = ModulusQuery::new(1, 0, SampleNorm::L2, vec![1e-6]);
        let pts = modulus(&f, &q).unwrap();
        assert!(pts[0].value < 1e-3);
    }

    #[test]
    fn l2_below_sup_norm() {
        let f = synth::random_shell_decay(1, 8, 1.0, 11).unwrap();
        let grid = dyadic_t_grid(8);
        let q2 = ModulusQuery::new(1, 0, SampleNorm::L2, grid.clone());
        let qi = ModulusQuery::new(1, 0, SampleNorm::Sup, grid);
        let a = modulus(&f, &q2).unwrap();
        let b = modulus(&f, &qi).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(x.value <= y.value * (1.0 + 1e-9), "{} > {}", x.value, y.value);
        }
    }

    #[test]
    fn modulus_monotone_on_dyadic_grid() {
        let f = synth::random_box(2, 5, 17).unwrap();
        let q = ModulusQuery::new(2, 1, SampleNorm::L2, dyadic_t_grid(32));
        let pts = modulus(&f, &q).unwrap();
        for w in pts.windows(2) {
            // grid is decreasing in t, so values must be non-increasing
            assert!(w[0].value >= w[1].value * (1.0 - 1e-12));
        }
    }

    #[test]
    fn modulus_order_scaling() {
        let f = synth::random_box(1, 6, 23).unwrap();
        for r in [1u32, 2] {
            let grid = vec![0.5, 0.25, 0.125];
            let q = ModulusQuery::new(r, 0, SampleNorm::L2, grid.clone());
            let pts = modulus(&f, &q).unwrap();
            // omega_r(2t) <= 3^r omega_r(t) on nested dyadic ladders
            for w in pts.windows(2) {
                assert!(w[0].value <= 3.0f64.powi(r as i32) * w[1].value * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn modulus_three_dimensional() {
        let f = synth::random_box(3, 2, 41).unwrap();
        let grid = vec![0.5, 0.25, 0.125];
        let mut q2 = ModulusQuery::new(1, 0, SampleNorm::L2, grid.clone());
        q2.direction_count = 16;
        let a = modulus(&f, &q2).unwrap();
        for w in a.windows(2) {
            assert!(w[0].value >= w[1].value * (1.0 - 1e-12));
        }
        let mut qi = ModulusQuery::new(1, 0, SampleNorm::Sup, grid);
        qi.direction_count = 16;
        qi.oversample = 2;
        let b = modulus(&f, &qi).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(x.value <= y.value * (1.0 + 1e-9));
        }
    }

    #[test]
    fn parseval_path_matches_grid_path() {
        let f = synth::random_box(2, 3, 29).unwrap();
        let m = 32usize;
        let h = [2.0 / m as f64, 5.0 / m as f64];
        let r = 2u32;
        // multiplier path
        let value = f.difference(&h, r).l2_norm();
        // grid path: r-fold difference of shifted samples
        let samples = f.evaluate_on_grid(m).unwrap();
        let mut cur = samples;
        for _ in 0..r {
            let mut next = vec![Complex64::new(0.0, 0.0); cur.len()];
            for x1 in 0..m {
                for x2 in 0..m {
                    let src = x1 * m + x2;
                    let shifted = ((x1 + 2) % m) * m + (x2 + 5) % m;
                    next[src] = cur[src] - cur[shifted];
                }
            }
            cur = next;
        }
        let grid_norm =
            (cur.iter().map(|v| v.norm_sqr()).sum::<f64>() / cur.len() as f64).sqrt();
        assert_relative_eq!(value, grid_norm, max_relative = 1e-8);
    }

    #[test]
    fn functional_i_ratio_definition() {
        // f whose modulus is exactly c * omega on the grid: take omega equal to
        // the modulus of f itself divided by c.
        let f = synth::wave(1);
        let grid = vec![0.5, 0.25];
        let q = ModulusQuery::new(1, 0, SampleNorm::L2, grid.clone());
        let pts = modulus(&f, &q).unwrap();
        // tabulated omega with omega(1/2) = value/3 at index 2, omega(1/4) at 4
        let mut values = vec![0.0; 4];
        values[0] = pts[0].value / 3.0;
        values[1] = pts[0].value / 3.0;
        values[2] = pts[1].value / 3.0;
        values[3] = pts[1].value / 3.0;
        let omega = Majorant::Tabulated { values };
        let got = lip_functional_i(&f, &omega, &q).unwrap();
        assert_relative_eq!(got, 3.0, max_relative = 1e-12);
    }

    #[test]
    fn functional_i_zero_polynomial() {
        let f = TrigPoly::zeros(1, 2).unwrap();
        let q = ModulusQuery::new(1, 0, SampleNorm::L2, vec![0.5]);
        let got = lip_functional_i(&f, &Majorant::power(0.5), &q).unwrap();
        assert_eq!(got, 0.0);
    }

    #[test]
    fn functional_ii_single_shell_is_one() {
        let n0 = 6usize;
        let mut values = vec![0.0; 17];
        values[n0] = 1.0;
        let profile = ShellProfile::from_values(1, values).unwrap();
        // omega(1/N) = min(1, (n0/N)^r)
        let r = 2u32;
        let omega_vals: Vec<f64> =
            (1..=64).map(|n| (n0 as f64 / n as f64).powi(r as i32).min(1.0)).collect();
        let omega = Majorant::Tabulated { values: omega_vals };
        let got = lip_functional_ii(&profile, &omega, r, 0, &default_n_grid(64));
        assert_relative_eq!(got, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn functional_ii_zero_profile() {
        let profile = ShellProfile::from_values(1, vec![0.0; 9]).unwrap();
        let got = lip_functional_ii(&profile, &Majorant::power(0.5), 1, 0, &default_n_grid(8));
        assert_eq!(got, 0.0);
    }

    #[test]
    fn functional_iii_single_shell_in_block() {
        let omega = Majorant::power(1.0); // r = 2 half power
        let seq = discretize(&omega, 5.0, 2.0, 64).unwrap();
        // place one shell in the second block [6, 30]
        let mut values = vec![0.0; 11];
        values[10] = 1.0;
        let profile = ShellProfile::from_values(1, values).unwrap();
        let got = lip_functional_iii(&profile, &omega, &seq, 2, 0);
        let (lo, hi) = seq.block_range(1);
        assert!(lo <= 10 && 10 <= hi);
        let expected = match seq.labels[1] {
            BlockLabel::I => 1.0 / omega.eval_at_inv(lo),
            BlockLabel::J => 100.0 / omega.weighted_at_inv(10.min(hi), 2.0),
        };
        assert_relative_eq!(got.value, expected, max_relative = 1e-12);
    }

    #[test]
    fn bernstein_single_wave() {
        let n = 64i64;
        let f = synth::wave(n);
        let ratio = bernstein_ratio(&f, 0, 1, 8).unwrap();
        let closed = (1.0 + std::f64::consts::TAU * n as f64) / n as f64;
        assert_relative_eq!(ratio, closed, max_relative = 1e-9);
        assert!((ratio - std::f64::consts::TAU).abs() / std::f64::consts::TAU < 0.01);
    }

    #[test]
    fn bernstein_constant() {
        let mut f = TrigPoly::zeros(1, 8).unwrap();
        f.set_coeff(&[0], Complex64::new(3.0, 0.0));
        for (l, r) in [(0u32, 1u32), (1, 2)] {
            let ratio = bernstein_ratio(&f, l, r, 4).unwrap();
            assert_relative_eq!(ratio, 8.0f64.powi(-(r as i32)), max_relative = 1e-12);
        }
    }

    #[test]
    fn bernstein_rejects_zero() {
        let f = TrigPoly::zeros(1, 4).unwrap();
        assert!(matches!(bernstein_ratio(&f, 0, 1, 4), Err(Error::UndefinedRatio(_))));
    }

    #[test]
    fn reverse_bernstein_single_wave_and_scaling() {
        let n = 32i64;
        let f = synth::wave(n);
        let ratio = reverse_bernstein_ratio(&f, 0, 1, n as u64, 8).unwrap();
        assert!(ratio >= std::f64::consts::TAU);
        let scaled = f.map_multiplier(|_| Complex64::new(7.5, 0.0));
        let ratio2 = reverse_bernstein_ratio(&scaled, 0, 1, n as u64, 8).unwrap();
        assert_relative_eq!(ratio, ratio2, max_relative = 1e-12);
    }

    #[test]
    fn reverse_bernstein_rejects_low_spectrum() {
        let f = synth::random_box(1, 8, 31).unwrap();
        assert!(matches!(
            reverse_bernstein_ratio(&f, 0, 1, 4, 4),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn vp_annihilates_high_pass_derivatives() {
        // the reverse Bernstein mechanism: V_{N/2}(d_alpha F) = 0 for
        // spec(F) outside B(N-1)
        let n = 8u64;
        let mut f = TrigPoly::zeros(1, 12).unwrap();
        f.set_coeff(&[8], Complex64::new(1.0, 0.0));
        f.set_coeff(&[-11], Complex64::new(0.5, 0.2));
        let v = f.partial_derivative(&[1]).vallee_poussin(n / 2).unwrap();
        assert!(v.is_zero());
    }
}
