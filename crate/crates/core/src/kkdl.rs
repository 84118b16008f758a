//! Dominating-function construction: per-block coefficient flattening,
//! de la Vallée-Poussin block surgery, and the rotated block sum.
//!
//! Given `g`, the pipeline extracts an r-quasiconcave majorant from its L2
//! modulus, discretizes it, and builds one real-coefficient block polynomial
//! `S_k` per block: a best-of-trials random-sign flattening of `|g^|` on the
//! block's shell window, then `S_k = V_{m_k}(h - V_{mu_k/2}(h))`. The sum
//! `f = sum i^k S_k` (plus the constant term, which no block covers) then
//! dominates `|g^|` coefficient-wise with zero tolerance: on its own window
//! each `S_k` carries `|g^|` untouched, and the `i^k` rotation puts the two
//! neighboring blocks on the orthogonal axis of the complex plane so they can
//! only add in quadrature.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::majorant::{
    default_lambda, discretize, BlockLabel, DiscretizingSequence, Majorant,
};
use crate::smoothness::{dyadic_t_grid, modulus, ModulusQuery, SampleNorm};
use crate::trigpoly::TrigPoly;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Nonnegative amplitude array over a coefficient box; same indexing as
/// [`TrigPoly`].
#[derive(Debug, Clone)]
pub struct Amplitudes {
    d: usize,
    n: i64,
    vals: Vec<f64>,
}

impl Amplitudes {
    /// Absolute values of a polynomial's coefficients.
    pub fn from_poly(f: &TrigPoly) -> Self {
        Amplitudes {
            d: f.d(),
            n: f.box_radius(),
            vals: f.coeffs().iter().map(|c| c.norm()).collect(),
        }
    }

    pub fn zeros(d: usize, n: i64) -> Result<Self> {
        let p = TrigPoly::zeros(d, n)?;
        Ok(Amplitudes { d, n, vals: vec![0.0; p.len()] })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn box_radius(&self) -> i64 {
        self.n
    }

    fn side(&self) -> usize {
        (2 * self.n + 1) as usize
    }

    fn index_of(&self, k: &[i64]) -> usize {
        debug_assert_eq!(k.len(), self.d);
        let side = self.side();
        let mut idx = 0usize;
        for &ki in k {
            debug_assert!(ki.abs() <= self.n);
            idx = idx * side + (ki + self.n) as usize;
        }
        idx
    }

    fn decode(&self, mut idx: usize) -> [i64; 3] {
        let side = self.side();
        let mut k = [0i64; 3];
        for i in (0..self.d).rev() {
            k[i] = (idx % side) as i64 - self.n;
            idx /= side;
        }
        k
    }

    /// Iterate `(frequency, amplitude)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = ([i64; 3], f64)> + '_ {
        self.vals.iter().enumerate().map(|(i, &v)| (self.decode(i), v))
    }

    /// Amplitude at frequency `k` (zero outside the box).
    pub fn get(&self, k: &[i64]) -> f64 {
        if k.iter().any(|ki| ki.abs() > self.n) {
            return 0.0;
        }
        self.vals[self.index_of(k)]
    }

    pub fn set(&mut self, k: &[i64], v: f64) {
        assert!(v >= 0.0, "amplitudes must be nonnegative");
        let idx = self.index_of(k);
        self.vals[idx] = v;
    }

    /// Restriction to the shell window `lo <= ||k||_inf <= hi`.
    pub fn window(&self, lo: u64, hi: u64) -> Amplitudes {
        let mut out = self.clone();
        for i in 0..out.vals.len() {
            let k = self.decode(i);
            let shell = k.iter().take(self.d).map(|ki| ki.unsigned_abs()).max().unwrap();
            if shell < lo || shell > hi {
                out.vals[i] = 0.0;
            }
        }
        out
    }

    /// Number of strictly positive amplitudes.
    pub fn support_count(&self) -> usize {
        self.vals.iter().filter(|v| **v > 0.0).count()
    }

    /// l2 budget `(sum (c_k |k|^s)^2)^(1/2)` with Euclidean `|k|` and the
    /// convention `|k|^0 = 1`.
    pub fn budget(&self, s: u32) -> f64 {
        let mut acc = 0.0;
        for (i, v) in self.vals.iter().enumerate() {
            if *v > 0.0 {
                let k = self.decode(i);
                let norm: f64 = k
                    .iter()
                    .take(self.d)
                    .map(|ki| (*ki as f64) * (*ki as f64))
                    .sum::<f64>()
                    .sqrt();
                let w = v * norm.powi(s as i32);
                acc += w * w;
            }
        }
        acc.sqrt()
    }
}

/// Output of the flattening step.
#[derive(Debug, Clone)]
pub struct FlattenResult {
    pub poly: TrigPoly,
    /// Achieved `C^s` norm of the best trial.
    pub achieved: f64,
    /// l2 budget `(sum (c_k |k|^s)^2)^(1/2)`.
    pub budget: f64,
    /// `achieved / budget`; monitored, not certified.
    pub ratio: f64,
}

/// Randomized-signs flattening: returns `h` with real coefficients
/// `eps_k c_k`, `|h^(k)| = c_k` exactly, minimizing the `C^s` norm over
/// `trials` seeded sign draws.
pub fn kkdl_flatten(
    c: &Amplitudes,
    s: u32,
    trials: u32,
    seed: u64,
    oversample: usize,
) -> Result<FlattenResult> {
    if trials < 1 {
        return Err(Error::Parameter("trials must be at least 1".into()));
    }
    let support: Vec<([i64; 3], f64)> = c.iter().filter(|(_, v)| *v > 0.0).collect();
    if support.is_empty() {
        return Ok(FlattenResult {
            poly: TrigPoly::zeros(c.d, c.n)?,
            achieved: 0.0,
            budget: 0.0,
            ratio: 0.0,
        });
    }
    let budget = c.budget(s);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, TrigPoly)> = None;
    for _ in 0..trials {
        let mut h = TrigPoly::zeros(c.d, c.n)?;
        for (k, v) in &support {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            h.set_coeff(&k[..c.d], Complex64::new(sign * v, 0.0));
        }
        let norm = h.cs_norm(s, oversample);
        if best.as_ref().is_none_or(|(b, _)| norm < *b) {
            best = Some((norm, h));
        }
    }
    let (achieved, poly) = best.unwrap();
    let ratio = if budget > 0.0 { achieved / budget } else { f64::INFINITY };
    Ok(FlattenResult { poly, achieved, budget, ratio })
}

/// One block polynomial `S_k` with its measured norms.
#[derive(Debug, Clone)]
pub struct BlockPolynomial {
    pub poly: TrigPoly,
    /// 1-based block index (the exponent of the rotation `i^k`).
    pub index: usize,
    pub mode: BlockLabel,
    pub mu_lo: u64,
    pub mu_hi: u64,
    /// Measured `C^l` norm.
    pub achieved_cl: f64,
    /// Measured `C^{l+r}` norm.
    pub achieved_clr: f64,
    /// Flattening constant `|h|_{C^s} / l2-budget` for this block.
    pub flatten_ratio: f64,
    /// `|h|_{C^s}` over the lemma budget (`omega_{mu_k}` on I-blocks,
    /// `m_k^r omega_{m_k}` on J-blocks).
    pub lemma_ratio: f64,
}

/// Knobs for block construction.
#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub trials: u32,
    pub oversample: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { trials: 16, oversample: 4 }
    }
}

/// Build `S_k` for block `k` (0-based) of the sequence: flatten the window
/// amplitudes with `s = l` (I-blocks) or `s = l + r` (J-blocks), then apply
/// the two-sided de la Vallée-Poussin surgery.
#[allow(clippy::too_many_arguments)]
pub fn build_block(
    a: &Amplitudes,
    seq: &DiscretizingSequence,
    k: usize,
    omega: &Majorant,
    l: u32,
    r: u32,
    seed: u64,
    opts: &BuildOptions,
) -> Result<BlockPolynomial> {
    let (lo, hi_raw) = seq.block_range(k);
    let hi = hi_raw.min(a.box_radius() as u64);
    // support must stay inside the window
    for (key, v) in a.iter() {
        if v > 0.0 {
            let shell = key.iter().take(a.d()).map(|ki| ki.unsigned_abs()).max().unwrap();
            if shell < lo || shell > hi {
                return Err(Error::Precondition(format!(
                    "amplitude at shell {shell} leaks outside block window [{lo}, {hi}]"
                )));
            }
        }
    }
    let mode = seq.labels[k];
    let s = match mode {
        BlockLabel::I => l,
        BlockLabel::J => l + r,
    };
    if a.support_count() == 0 {
        return Ok(BlockPolynomial {
            poly: TrigPoly::zeros(a.d(), a.box_radius())?,
            index: k + 1,
            mode,
            mu_lo: lo,
            mu_hi: hi,
            achieved_cl: 0.0,
            achieved_clr: 0.0,
            flatten_ratio: 0.0,
            lemma_ratio: 0.0,
        });
    }
    let flat = kkdl_flatten(a, s, opts.trials, seed, opts.oversample)?;
    let inner = flat.poly.vallee_poussin_half(lo)?;
    let trimmed = flat.poly.sub(&inner)?;
    let poly = trimmed.vallee_poussin(hi)?;
    let achieved_cl = poly.cs_norm(l, opts.oversample);
    let achieved_clr = poly.cs_norm(l + r, opts.oversample);
    let lemma_budget = match mode {
        BlockLabel::I => omega.eval_at_inv(lo),
        BlockLabel::J => omega.weighted_at_inv(hi, r as f64),
    };
    Ok(BlockPolynomial {
        poly,
        index: k + 1,
        mode,
        mu_lo: lo,
        mu_hi: hi,
        achieved_cl,
        achieved_clr,
        flatten_ratio: flat.ratio,
        lemma_ratio: if lemma_budget > 0.0 { flat.achieved / lemma_budget } else { 0.0 },
    })
}

/// Serializable block metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockSummary {
    pub index: usize,
    pub mode: BlockLabel,
    pub mu_lo: u64,
    pub mu_hi: u64,
    pub achieved_cl: f64,
    pub achieved_clr: f64,
    pub flatten_ratio: f64,
    pub lemma_ratio: f64,
}

impl From<&BlockPolynomial> for BlockSummary {
    fn from(b: &BlockPolynomial) -> Self {
        BlockSummary {
            index: b.index,
            mode: b.mode,
            mu_lo: b.mu_lo,
            mu_hi: b.mu_hi,
            achieved_cl: b.achieved_cl,
            achieved_clr: b.achieved_clr,
            flatten_ratio: b.flatten_ratio,
            lemma_ratio: b.lemma_ratio,
        }
    }
}

/// Full record of a dominating-function construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstructionReport {
    pub f: TrigPoly,
    pub domination_ok: bool,
    /// `min |f^(n)| - |g^(n)|` over the support of `g`.
    pub worst_margin: f64,
    /// `(t, omega_r(D^l f, t)_inf / omega(t))` rows.
    pub modulus_ratios: Vec<(f64, f64)>,
    pub blocks: Vec<BlockSummary>,
    pub flatten_constants: Vec<f64>,
    pub seed: u64,
    /// Majorant extracted from the input's L2 modulus.
    pub omega: Majorant,
    pub sequence: DiscretizingSequence,
}

/// Knobs for the full pipeline.
#[derive(Debug, Clone)]
pub struct ConstructOptions {
    pub trials: u32,
    pub oversample: usize,
    pub direction_count: usize,
    /// Discretization parameter; defaults to `max(5, 4^r + 1)`.
    pub lambda: Option<f64>,
    /// Ratio-table grid; defaults to the dyadic grid down to `1/N`.
    pub t_grid: Option<Vec<f64>>,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions {
            trials: 16,
            oversample: 4,
            direction_count: 8,
            lambda: None,
            t_grid: None,
        }
    }
}

/// Smallest r-quasiconcave tabulated majorant dominating the L2 modulus of
/// `g` on the grid `t = 1/n`, `n = 1..=nmax`.
///
/// The least admissible majorant of point data `m_j` is
/// `omega_n = max_j m_j min(1, (j/n)^r)`, evaluated here with two sweeps.
pub fn extract_majorant(
    g: &TrigPoly,
    r: u32,
    l: u32,
    direction_count: usize,
    nmax: u64,
) -> Result<Majorant> {
    let t_grid: Vec<f64> = (1..=nmax).map(|n| 1.0 / n as f64).collect();
    let mut query = ModulusQuery::new(r, l, SampleNorm::L2, t_grid);
    query.direction_count = direction_count;
    let points = modulus(g, &query)?;
    let m: Vec<f64> = points.iter().map(|p| p.value).collect();

    let count = m.len();
    // suffix max of m_j and prefix max of j^r m_j
    let mut suffix = vec![0.0f64; count];
    let mut acc = 0.0f64;
    for j in (0..count).rev() {
        acc = acc.max(m[j]);
        suffix[j] = acc;
    }
    let mut values = Vec::with_capacity(count);
    let mut prefix = 0.0f64;
    for (j, mj) in m.iter().enumerate() {
        let n = (j + 1) as f64;
        prefix = prefix.max(n.powi(r as i32) * mj);
        values.push(suffix[j].max(prefix / n.powi(r as i32)));
    }
    if values.iter().all(|v| *v == 0.0) {
        return Err(Error::DegenerateMajorant(
            "input has vanishing modulus; nothing to dominate".into(),
        ));
    }
    Majorant::tabulated(values)
}

/// Rotate a real-coefficient polynomial by `i^quarter` and accumulate.
/// Components are placed, not multiplied, so the rotation is exact.
fn add_rotated(f: &mut TrigPoly, s: &TrigPoly, quarter: usize) {
    for (k, c) in s.iter() {
        if c == ZERO {
            continue;
        }
        let d = s.d();
        let cur = f.coeff(&k[..d]);
        let v = match quarter % 4 {
            0 => Complex64::new(cur.re + c.re, cur.im),
            1 => Complex64::new(cur.re, cur.im + c.re),
            2 => Complex64::new(cur.re - c.re, cur.im),
            _ => Complex64::new(cur.re, cur.im - c.re),
        };
        f.set_coeff(&k[..d], v);
    }
}

/// Run the full construction for `g`: extract the majorant, discretize,
/// build and rotate the blocks, set the constant term, and verify.
pub fn construct_dominating(
    g: &TrigPoly,
    r: u32,
    l: u32,
    seed: u64,
    opts: &ConstructOptions,
) -> Result<ConstructionReport> {
    if g.is_zero() {
        return Err(Error::Precondition("input polynomial is zero".into()));
    }
    if r < 1 {
        return Err(Error::Parameter("difference order r must be at least 1".into()));
    }
    let d = g.d();
    let nbox = g.box_radius() as u64;
    let a = Amplitudes::from_poly(g);
    let a0 = a.get(&[0, 0, 0][..d]);

    // Constant input: nothing beyond the DC term to dominate.
    let only_dc = a.window(1, nbox.max(1)).support_count() == 0 || nbox == 0;
    if only_dc {
        let mut f = TrigPoly::zeros(d, g.box_radius())?;
        f.set_coeff(&[0, 0, 0][..d], Complex64::new(a0, 0.0));
        let (ok, margin) = verify_domination(&f, g)?;
        return Ok(ConstructionReport {
            f,
            domination_ok: ok,
            worst_margin: margin,
            modulus_ratios: Vec::new(),
            blocks: Vec::new(),
            flatten_constants: Vec::new(),
            seed,
            omega: Majorant::tabulated(vec![1.0, 1.0])?,
            sequence: DiscretizingSequence {
                mu: vec![1],
                labels: vec![BlockLabel::I],
                lambda: default_lambda(r as f64),
                r: r as f64,
                nmax: nbox.max(2),
            },
        });
    }

    let omega = extract_majorant(g, r, l, opts.direction_count, nbox)?;
    let lambda = opts.lambda.unwrap_or_else(|| default_lambda(r as f64));
    let seq = discretize(&omega, lambda, r as f64, nbox)?;

    let bopts = BuildOptions { trials: opts.trials, oversample: opts.oversample };
    let mut f = TrigPoly::zeros(d, g.box_radius())?;
    let mut blocks = Vec::new();
    for k in 0..seq.block_count() {
        let (lo, hi_raw) = seq.block_range(k);
        if lo > nbox {
            break;
        }
        let wa = a.window(lo, hi_raw.min(nbox));
        let bp = build_block(&wa, &seq, k, &omega, l, r, seed ^ (k as u64 + 1), &bopts)?;
        add_rotated(&mut f, &bp.poly, bp.index);
        blocks.push(bp);
    }
    if a0 > 0.0 {
        f.set_coeff(&[0, 0, 0][..d], Complex64::new(a0, 0.0));
    }

    let (domination_ok, worst_margin) = verify_domination(&f, g)?;

    let t_grid = opts.t_grid.clone().unwrap_or_else(|| dyadic_t_grid(nbox.max(2)));
    let mut mq = ModulusQuery::new(r, l, SampleNorm::Sup, t_grid);
    mq.direction_count = opts.direction_count;
    mq.oversample = opts.oversample;
    let points = modulus(&f, &mq)?;
    let mut modulus_ratios = Vec::with_capacity(points.len());
    for p in &points {
        let w = omega.eval(p.t)?;
        modulus_ratios.push((p.t, if w > 0.0 { p.value / w } else { f64::INFINITY }));
    }

    let flatten_constants = blocks.iter().map(|b| b.flatten_ratio).collect();
    Ok(ConstructionReport {
        f,
        domination_ok,
        worst_margin,
        modulus_ratios,
        blocks: blocks.iter().map(BlockSummary::from).collect(),
        flatten_constants,
        seed,
        omega,
        sequence: seq,
    })
}

/// Exact coefficient-wise domination check. Returns the verdict together
/// with `min |f^(n)| - |g^(n)|` over the support of `g` (infinite when `g`
/// has empty support). The verdict compares squared moduli, which is safe
/// against rounding in the square root.
pub fn verify_domination(f: &TrigPoly, g: &TrigPoly) -> Result<(bool, f64)> {
    if f.d() != g.d() {
        return Err(Error::BoxMismatch("dimension mismatch".into()));
    }
    if f.box_radius() < g.box_radius() {
        return Err(Error::BoxMismatch("f's box must contain g's".into()));
    }
    let d = g.d();
    let mut ok = true;
    let mut margin = f64::INFINITY;
    for (k, cg) in g.iter() {
        let cf = f.coeff(&k[..d]);
        let fa2 = cf.re * cf.re + cf.im * cf.im;
        let ga2 = cg.re * cg.re + cg.im * cg.im;
        if fa2 < ga2 {
            ok = false;
        }
        if ga2 > 0.0 {
            margin = margin.min(cf.norm() - cg.norm());
        }
    }
    Ok((ok, margin))
}
