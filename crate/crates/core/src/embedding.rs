//! Embedding of Lipschitz classes into the Wiener spaces `A_p`, `0 < p < 2`.
//!
//! With `theta = d(1/p - 1/2)`, the class `Lip^{r,l}(omega)` embeds exactly
//! when one of three cases holds: `theta < l` unconditionally; for
//! `l < theta < l + r` when `int_0^1 omega^p(t) t^{-(theta-l)p} dt/t` is
//! finite; and at the critical line `theta = l` when
//! `int_0^1 omega^p(t) (log 2/t)^{-p/2} dt/t` is finite. At or above `l + r`
//! the embedding always fails. The best constant is estimated three
//! independent ways — the case integral, the discretized block sum, and a
//! feasible witness of the underlying weighted inequality — and the
//! estimates are cross-checked.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::majorant::{default_lambda, discretize, BlockLabel, DiscretizingSequence, Majorant};
use crate::smoothness::{lip_functional_i, ModulusQuery, SampleNorm};
use crate::trigpoly::TrigPoly;

/// Dyadic levels inspected by the tail trend test.
const TREND_LEVELS: usize = 10;
/// Level-ratio at or above which the tail is declared divergent.
const RATIO_DIVERGENT_MIN: f64 = 0.98;
/// Level-ratio at or below which the tail is declared summable.
const RATIO_CONVERGENT_MAX: f64 = 0.95;
/// Dyadic level cap for closed-form majorants.
const MAX_LEVELS: usize = 4000;

/// `theta = d (1/p - 1/2)`.
pub fn theta(d: u32, p: f64) -> f64 {
    d as f64 * (1.0 / p - 0.5)
}

/// An embedding question: does `Lip^{r,l}(omega; T^d)` sit inside `A_p`?
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingQuery {
    pub d: u32,
    pub r: u32,
    pub l: u32,
    pub p: f64,
    pub omega: Majorant,
    /// Label the report as the continuous-variable (Fourier transform)
    /// criterion; the decision procedure is identical.
    #[serde(default)]
    pub continuous: bool,
}

impl EmbeddingQuery {
    fn check(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p < 2.0) {
            return Err(Error::Parameter(format!("p must lie in (0,2), got {}", self.p)));
        }
        if self.r < 1 {
            return Err(Error::Parameter("difference order r must be at least 1".into()));
        }
        if self.d < 1 {
            return Err(Error::Parameter("dimension must be at least 1".into()));
        }
        Ok(())
    }
}

/// Which case of the characterization applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    /// `theta < l`: embeds for every majorant.
    #[serde(rename = "i")]
    SubDerivative,
    /// `l < theta < l + r`: decided by the power-weighted integral.
    #[serde(rename = "ii")]
    Intermediate,
    /// `theta = l`: decided by the log-weighted integral.
    #[serde(rename = "iii")]
    Critical,
    /// `theta >= l + r`: the inequality cannot hold.
    #[serde(rename = "out-of-range")]
    OutOfRange,
}

/// Embedding verdict. `Undecided` can only arise for tabulated majorants
/// whose dyadic tail trend is not decisive at the table length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Embeds,
    Fails,
    Undecided,
}

/// Tri-state numeric outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flag {
    Finite(f64),
    Divergent,
    Undecided,
}

impl Flag {
    pub fn finite(&self) -> Option<f64> {
        match self {
            Flag::Finite(v) => Some(*v),
            _ => None,
        }
    }
}

/// Full report of a classification (and optionally the estimators).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub theta: f64,
    pub case: CaseTag,
    pub verdict: Verdict,
    pub integral_value: Option<Flag>,
    pub k_bruteforce: Option<Flag>,
    pub k_discretized: Option<Flag>,
    pub k_integral: Option<Flag>,
    /// Largest pairwise ratio among the finite estimates.
    pub agreement_bracket: Option<f64>,
    pub continuous: bool,
}

// The case integrand in log coordinates: W(t) such that the criterion is
// int_0^1 W(t) dt/t.
fn case_integrand<'a>(
    q: &'a EmbeddingQuery,
    case: CaseTag,
    th: f64,
) -> impl Fn(f64) -> f64 + 'a {
    let p = q.p;
    let l = q.l as f64;
    move |t: f64| {
        let w = q.omega.eval(t).unwrap_or(0.0);
        match case {
            CaseTag::Intermediate => w.powf(p) * t.powf(-(th - l) * p),
            CaseTag::Critical => w.powf(p) * (2.0 / t).ln().powf(-p / 2.0),
            _ => 0.0,
        }
    }
}

// Dyadic level integrals I_m = int over (2^{-m-1}, 2^{-m}] of W dln t,
// midpoint rule in log coordinates with `pts` nodes per level.
fn level_integral(w: &impl Fn(f64) -> f64, m: usize, pts: usize) -> f64 {
    let pts = pts.max(2);
    let lo = -(m as f64 + 1.0) * std::f64::consts::LN_2;
    let step = std::f64::consts::LN_2 / pts as f64;
    let mut acc = 0.0;
    for i in 0..pts {
        let u = lo + (i as f64 + 0.5) * step;
        acc += w(u.exp());
    }
    acc * step
}

/// Outcome of the dyadic integral test.
fn dyadic_integral(
    w: &impl Fn(f64) -> f64,
    levels: usize,
    pts: usize,
    symbolic: Option<bool>,
) -> Flag {
    if let Some(false) = symbolic {
        return Flag::Divergent;
    }
    let mut total = 0.0;
    let mut level_vals = Vec::new();
    for m in 0..levels {
        let im = level_integral(w, m, pts);
        total += im;
        level_vals.push(im);
        if symbolic == Some(true) && im < 1e-15 * total.max(f64::MIN_POSITIVE) {
            return Flag::Finite(total);
        }
    }
    // Trend over the last TREND_LEVELS ratios.
    let n = level_vals.len();
    if n < TREND_LEVELS + 1 {
        return if symbolic == Some(true) { Flag::Finite(total) } else { Flag::Undecided };
    }
    let ratios: Vec<f64> = (n - TREND_LEVELS..n)
        .map(|i| {
            if level_vals[i - 1] > 0.0 {
                level_vals[i] / level_vals[i - 1]
            } else if level_vals[i] > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .collect();
    let rho_max = ratios.iter().cloned().fold(0.0f64, f64::max);
    let rho_min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    if symbolic == Some(true) || rho_max <= RATIO_CONVERGENT_MAX {
        let rho = rho_max.min(0.999);
        let tail = level_vals[n - 1] * rho / (1.0 - rho);
        Flag::Finite(total + tail)
    } else if rho_min >= RATIO_DIVERGENT_MIN {
        Flag::Divergent
    } else {
        Flag::Undecided
    }
}

// Symbolic convergence for power-log majorants; None when not closed-form.
fn symbolic_convergence(q: &EmbeddingQuery, case: CaseTag, th: f64) -> Option<bool> {
    let (a, b) = match &q.omega {
        Majorant::PowerLog { a, b } => (*a, *b),
        Majorant::Tabulated { .. } => return None,
    };
    let p = q.p;
    let l = q.l as f64;
    // integrand ~ t^{c} (log 2/t)^{beta} dln t
    let (c, beta) = match case {
        CaseTag::Intermediate => (p * a - (th - l) * p, p * b),
        CaseTag::Critical => (p * a, p * b - p / 2.0),
        _ => return Some(true),
    };
    if c > 0.0 {
        Some(true)
    } else if c < 0.0 {
        Some(false)
    } else {
        Some(beta < -1.0)
    }
}

fn levels_for(q: &EmbeddingQuery) -> usize {
    match q.omega.table_len() {
        Some(len) => (len.max(2) as f64).log2().floor() as usize,
        None => MAX_LEVELS,
    }
}

/// Decide the embedding and report the decisive integral. Convergence is
/// decided symbolically for power-log majorants and by a dyadic-tail trend
/// test for tabulated ones (which may come back `Undecided`).
pub fn classify(q: &EmbeddingQuery, quadrature_points: usize) -> Result<EmbeddingReport> {
    q.check()?;
    let th = theta(q.d, q.p);
    let l = q.l as f64;
    let lr = (q.l + q.r) as f64;

    let (case, verdict, integral_value) = if th < l {
        (CaseTag::SubDerivative, Verdict::Embeds, None)
    } else if th >= lr {
        (CaseTag::OutOfRange, Verdict::Fails, None)
    } else {
        let case = if th == l { CaseTag::Critical } else { CaseTag::Intermediate };
        let symbolic = symbolic_convergence(q, case, th);
        let w = case_integrand(q, case, th);
        let flag = dyadic_integral(&w, levels_for(q), quadrature_points, symbolic);
        let verdict = match flag {
            Flag::Finite(_) => Verdict::Embeds,
            Flag::Divergent => Verdict::Fails,
            Flag::Undecided => Verdict::Undecided,
        };
        (case, verdict, Some(flag))
    };

    Ok(EmbeddingReport {
        theta: th,
        case,
        verdict,
        integral_value,
        k_bruteforce: None,
        k_discretized: None,
        k_integral: None,
        agreement_bracket: None,
        continuous: q.continuous,
    })
}

/// Best-constant estimate from the case integral: `K = (integral)^{1/p}`.
pub fn best_constant_integral(q: &EmbeddingQuery, quadrature_points: usize) -> Result<Flag> {
    q.check()?;
    let th = theta(q.d, q.p);
    let l = q.l as f64;
    let lr = (q.l + q.r) as f64;
    if th < l || th >= lr {
        return Err(Error::NotApplicable(
            "integral estimator applies only in cases (ii) and (iii)".into(),
        ));
    }
    let case = if th == l { CaseTag::Critical } else { CaseTag::Intermediate };
    let symbolic = symbolic_convergence(q, case, th);
    let w = case_integrand(q, case, th);
    Ok(match dyadic_integral(&w, levels_for(q), quadrature_points, symbolic) {
        Flag::Finite(v) => Flag::Finite(v.powf(1.0 / q.p)),
        other => other,
    })
}

/// Truncated version of the case integral over `(eps, 1]`, as a growth probe
/// for failing queries.
pub fn partial_integral_constant(
    q: &EmbeddingQuery,
    eps: f64,
    quadrature_points: usize,
) -> Result<f64> {
    q.check()?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Parameter("eps must lie in (0,1)".into()));
    }
    let th = theta(q.d, q.p);
    let l = q.l as f64;
    let lr = (q.l + q.r) as f64;
    if th < l || th >= lr {
        return Err(Error::NotApplicable(
            "integral estimator applies only in cases (ii) and (iii)".into(),
        ));
    }
    let case = if th == l { CaseTag::Critical } else { CaseTag::Intermediate };
    let w = case_integrand(q, case, th);
    let levels = (1.0 / eps).log2().ceil() as usize;
    let mut total = 0.0;
    for m in 0..levels {
        total += level_integral(&w, m, quadrature_points);
    }
    Ok(total.powf(1.0 / q.p))
}

/// Best-constant estimate from the discretized block sum
/// `K^p = sum_k (sum_block omega_n^{2p/(2-p)} n^{d-1-2pl/(2-p)})^{1-p/2}`.
pub fn best_constant_discretized(
    q: &EmbeddingQuery,
    seq: &DiscretizingSequence,
    nmax: u64,
) -> Result<f64> {
    q.check()?;
    let th = theta(q.d, q.p);
    if th < q.l as f64 || th >= (q.l + q.r) as f64 {
        return Err(Error::NotApplicable(
            "discretized estimator applies only in cases (ii) and (iii)".into(),
        ));
    }
    let q_exp = 1.0 / (1.0 / q.p - 0.5);
    let n_exp = (q.d as f64 - 1.0) - q.l as f64 * q_exp;
    let mut kp = 0.0;
    for k in 0..seq.block_count() {
        let (lo, hi) = seq.block_range(k);
        if lo > nmax {
            break;
        }
        let hi = hi.min(nmax);
        let mut inner = 0.0;
        for n in lo..=hi {
            inner += q.omega.eval_at_inv(n).powf(q_exp) * (n as f64).powf(n_exp);
        }
        kp += inner.powf(1.0 - q.p / 2.0);
    }
    Ok(kp.powf(1.0 / q.p))
}

/// Feasible witness of the weighted inequality and the value it certifies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BruteForceResult {
    /// Certified lower bound `K = objective^{1/p}`.
    pub k: f64,
    /// Maximizing sequence `x_1..x_nmax`.
    pub witness: Vec<f64>,
    /// Constraint functional at the witness (must be <= 1 + 1e-9).
    pub constraint_value: f64,
    pub objective: f64,
}

struct ConstraintEval {
    omega_sq: Vec<f64>, // omega_N^2
    pow2r: Vec<f64>,    // n^{2r}
}

impl ConstraintEval {
    fn new(omega: &Majorant, r: u32, nmax: u64) -> Self {
        let omega_sq = (1..=nmax).map(|n| omega.eval_at_inv(n).powi(2)).collect();
        let pow2r = (1..=nmax).map(|n| (n as f64).powi(2 * r as i32)).collect();
        ConstraintEval { omega_sq, pow2r }
    }

    /// `sup_N omega_N^{-2} sum_n (x_n min(1, n/N)^r)^2` via prefix sums.
    fn value(&self, x: &[f64]) -> f64 {
        let nmax = x.len();
        let mut weighted_prefix = vec![0.0f64; nmax]; // sum_{n<=N} x_n^2 n^{2r}
        let mut plain_prefix = vec![0.0f64; nmax]; // sum_{n<=N} x_n^2
        let mut wacc = 0.0;
        let mut pacc = 0.0;
        for n in 0..nmax {
            let sq = x[n] * x[n];
            wacc += sq * self.pow2r[n];
            pacc += sq;
            weighted_prefix[n] = wacc;
            plain_prefix[n] = pacc;
        }
        let total = pacc;
        let mut sup = 0.0f64;
        for n in 0..nmax {
            let inner = weighted_prefix[n] / self.pow2r[n] + (total - plain_prefix[n]);
            sup = sup.max(inner / self.omega_sq[n]);
        }
        sup
    }
}

/// Maximize `sum x_n^p n^{(d-1)(1-p/2)-pl}` over nonnegative `x` subject to
/// the weighted constraint, by the per-block Hölder-equality warm start
/// followed by projected random-coordinate ascent (`iterations` shuffled
/// coordinate sweeps).
pub fn best_constant_bruteforce(
    q: &EmbeddingQuery,
    nmax: u64,
    iterations: u64,
    seed: u64,
) -> Result<BruteForceResult> {
    bruteforce_with_start(q, nmax, iterations, seed, None)
}

fn bruteforce_with_start(
    q: &EmbeddingQuery,
    nmax: u64,
    iterations: u64,
    seed: u64,
    initial: Option<&[f64]>,
) -> Result<BruteForceResult> {
    q.check()?;
    if nmax < 1 {
        return Err(Error::Parameter("nmax must be at least 1".into()));
    }
    let p = q.p;
    let r = q.r;
    let e_obj = (q.d as f64 - 1.0) * (1.0 - p / 2.0) - p * q.l as f64;
    let weights: Vec<f64> = (1..=nmax).map(|n| (n as f64).powf(e_obj)).collect();
    let objective = |x: &[f64]| -> f64 {
        x.iter().zip(&weights).map(|(xi, w)| if *xi > 0.0 { xi.powf(p) * w } else { 0.0 }).sum()
    };
    let cons = ConstraintEval::new(&q.omega, r, nmax);
    let renorm = |x: &mut [f64]| -> f64 {
        let g = cons.value(x);
        if g > 0.0 {
            let scale = 1.0 / (g.sqrt() * (1.0 + 1e-12));
            for xi in x.iter_mut() {
                *xi *= scale;
            }
        }
        cons.value(x)
    };

    // Warm start: the per-block extremizer that saturates the block constraint.
    let mut x = vec![0.0f64; nmax as usize];
    if nmax == 1 {
        x[0] = q.omega.eval_at_inv(1);
    } else {
        let seq = discretize(&q.omega, default_lambda(r as f64), r as f64, nmax)?;
        for k in 0..seq.block_count() {
            let (lo, hi) = seq.block_range(k);
            if lo > nmax {
                break;
            }
            let hi = hi.min(nmax);
            match seq.labels[k] {
                BlockLabel::I => {
                    // maximize sum x^p w s.t. sum x^2 <= omega_lo^2
                    let cap = q.omega.eval_at_inv(lo);
                    let mut norm = 0.0;
                    for n in lo..=hi {
                        let u = weights[(n - 1) as usize].powf(1.0 / (2.0 - p));
                        norm += u * u;
                    }
                    let norm = norm.sqrt();
                    if norm > 0.0 {
                        for n in lo..=hi {
                            let u = weights[(n - 1) as usize].powf(1.0 / (2.0 - p));
                            x[(n - 1) as usize] = cap * u / norm;
                        }
                    }
                }
                BlockLabel::J => {
                    // substitute z = n^r x: maximize sum z^p (w n^{-pr})
                    // s.t. sum z^2 <= (hi^r omega_hi)^2
                    let cap = q.omega.weighted_at_inv(hi, r as f64);
                    let mut norm = 0.0;
                    for n in lo..=hi {
                        let wz = weights[(n - 1) as usize] * (n as f64).powf(-p * r as f64);
                        let u = wz.powf(1.0 / (2.0 - p));
                        norm += u * u;
                    }
                    let norm = norm.sqrt();
                    if norm > 0.0 {
                        for n in lo..=hi {
                            let wz =
                                weights[(n - 1) as usize] * (n as f64).powf(-p * r as f64);
                            let u = wz.powf(1.0 / (2.0 - p));
                            x[(n - 1) as usize] =
                                cap * u / norm * (n as f64).powf(-(r as f64));
                        }
                    }
                }
            }
        }
    }
    let mut g = renorm(&mut x);
    let mut best_obj = objective(&x);

    // A caller-provided start (for example a zero-padded witness from a
    // smaller nmax, which stays feasible) replaces the warm start when it
    // scores higher.
    if let Some(init) = initial {
        let mut y = vec![0.0f64; nmax as usize];
        for (slot, v) in y.iter_mut().zip(init.iter()) {
            *slot = v.max(0.0);
        }
        let gy = renorm(&mut y);
        let oy = objective(&y);
        if oy > best_obj && gy <= 1.0 + 1e-9 {
            x = y;
            best_obj = oy;
            g = gy;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let factors = [0.6f64, 0.85, 1.2, 1.6];
    let mut order: Vec<usize> = (0..x.len()).collect();
    for _ in 0..iterations {
        // one shuffled coordinate sweep
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        for &idx in &order {
            let f = factors[rng.gen_range(0..factors.len())];
            let mut y = x.clone();
            y[idx] = if y[idx] > 0.0 { y[idx] * f } else { 1e-3 * q.omega.eval_at_inv(1) };
            let gy = renorm(&mut y);
            let oy = objective(&y);
            // ascent invariant: accept only feasible improvements
            if oy > best_obj && gy <= 1.0 + 1e-9 {
                x = y;
                best_obj = oy;
                g = gy;
            }
        }
        debug_assert!(g <= 1.0 + 1e-9);
    }

    Ok(BruteForceResult {
        k: best_obj.powf(1.0 / p),
        witness: x,
        constraint_value: g,
        objective: best_obj,
    })
}

/// Options for [`analyze`].
#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub nmax: u64,
    pub iterations: u64,
    pub seed: u64,
    pub quadrature_points: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions { nmax: 1024, iterations: 8, seed: 0, quadrature_points: 32 }
    }
}

/// Classify and, in cases (ii)/(iii), attach all three best-constant
/// estimates with their agreement bracket.
pub fn analyze(q: &EmbeddingQuery, opts: &AnalyzeOptions) -> Result<EmbeddingReport> {
    let mut rep = classify(q, opts.quadrature_points)?;
    if !matches!(rep.case, CaseTag::Intermediate | CaseTag::Critical) {
        return Ok(rep);
    }
    match rep.verdict {
        Verdict::Embeds => {
            let ki = best_constant_integral(q, opts.quadrature_points)?;
            let seq = discretize(&q.omega, default_lambda(q.r as f64), q.r as f64, opts.nmax)?;
            let kd = best_constant_discretized(q, &seq, opts.nmax)?;
            let kb = best_constant_bruteforce(q, opts.nmax, opts.iterations, opts.seed)?;
            let values = [ki.finite().unwrap_or(f64::NAN), kd, kb.k];
            let mut bracket = 1.0f64;
            for a in values {
                for b in values {
                    if a.is_finite() && b.is_finite() && b > 0.0 {
                        bracket = bracket.max(a / b);
                    }
                }
            }
            rep.k_integral = Some(ki);
            rep.k_discretized = Some(Flag::Finite(kd));
            rep.k_bruteforce = Some(Flag::Finite(kb.k));
            rep.agreement_bracket = Some(bracket);
        }
        Verdict::Fails => {
            rep.k_integral = Some(Flag::Divergent);
            rep.k_discretized = Some(Flag::Divergent);
            rep.k_bruteforce = Some(Flag::Divergent);
        }
        Verdict::Undecided => {
            rep.k_integral = Some(Flag::Undecided);
            rep.k_discretized = Some(Flag::Undecided);
            rep.k_bruteforce = Some(Flag::Undecided);
        }
    }
    Ok(rep)
}

/// Result of the two-sided Hardy-type split.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lemma22Result {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Evaluate both sides of the discrete Hardy split for nonnegative `alpha`
/// and `f`:
/// `lhs = sum_n alpha_n (sum_j f_j / (j^{pr/q} + n^{pr/q}))^q`,
/// `rhs = sum_blocks (sum_block omega_bar_l^{p/q} f_l)^q`, with the blocks of
/// the discretizing sequence of `omega_bar^p_l = sum alpha_n/(n^{pr}+l^{pr})`.
pub fn lemma22_equivalence(
    alpha: &[f64],
    f: &[f64],
    p: f64,
    q: f64,
    r: f64,
    lambda: f64,
) -> Result<Lemma22Result> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::Parameter(format!("q must lie in (0,1], got {q}")));
    }
    if !(p > 0.0 && r > 0.0) {
        return Err(Error::Parameter("p and r must be positive".into()));
    }
    if alpha.iter().chain(f.iter()).any(|v| *v < 0.0 || !v.is_finite()) {
        return Err(Error::Parameter("alpha and f must be nonnegative and finite".into()));
    }
    if alpha.is_empty() || f.is_empty() {
        return Err(Error::Parameter("alpha and f must be nonempty".into()));
    }

    let pr = p * r;
    let len = f.len().max(2) as u64;

    // omega_bar^p table
    let alpha_pows: Vec<f64> = (1..=alpha.len()).map(|n| (n as f64).powf(pr)).collect();
    let omega_bar_p: Vec<f64> = (1..=len)
        .map(|l| {
            let lp = (l as f64).powf(pr);
            alpha
                .iter()
                .zip(&alpha_pows)
                .map(|(a, np)| if *a > 0.0 { a / (np + lp) } else { 0.0 })
                .sum()
        })
        .collect();
    if omega_bar_p.iter().all(|v| *v == 0.0) {
        return Ok(Lemma22Result { lhs: 0.0, rhs: 0.0, ratio: 1.0 });
    }

    // lhs
    let prq = pr / q;
    let jq: Vec<f64> = (1..=f.len()).map(|j| (j as f64).powf(prq)).collect();
    let nq: Vec<f64> = (1..=alpha.len()).map(|n| (n as f64).powf(prq)).collect();
    let mut lhs = 0.0;
    for (n, a) in alpha.iter().enumerate() {
        if *a == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for (j, fj) in f.iter().enumerate() {
            if *fj > 0.0 {
                inner += fj / (jq[j] + nq[n]);
            }
        }
        lhs += a * inner.powf(q);
    }

    // rhs over the blocks of omega_bar^p (a pr-quasiconcave sequence)
    let bar = Majorant::tabulated(omega_bar_p.clone())?;
    let seq = discretize(&bar, lambda, pr, len)?;
    let mut rhs = 0.0;
    for k in 0..seq.block_count() {
        let (lo, hi) = seq.block_range(k);
        if lo > f.len() as u64 {
            break;
        }
        let hi = hi.min(f.len() as u64);
        let mut inner = 0.0;
        for l in lo..=hi {
            let fl = f[(l - 1) as usize];
            if fl > 0.0 {
                inner += omega_bar_p[(l - 1) as usize].powf(1.0 / q) * fl;
            }
        }
        rhs += inner.powf(q);
    }

    let ratio = if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };
    Ok(Lemma22Result { lhs, rhs, ratio })
}

/// Lattice points on the sphere `||k||_inf = n` in dimension `d`.
pub fn shell_count(d: u32, n: u64) -> u64 {
    if n == 0 {
        return 1;
    }
    let outer = (2 * n + 1).pow(d);
    let inner = (2 * n - 1).pow(d);
    outer - inner
}

/// `sup_a (sum_{shell} |a_k|^p) / R_n^p = (#shell)^{1-p/2}` for `p < 2`,
/// attained at equal moduli.
pub fn shell_extremal_ratio(d: u32, n: u64, p: f64) -> f64 {
    (shell_count(d, n) as f64).powf(1.0 - p / 2.0)
}

/// Besov seminorm `( int_0^1 (t^{-theta} omega_{ceil(theta)+1}(f,t)_q)^p dt/t )^{1/p}`
/// by quadrature over the given decreasing `t`-grid.
pub fn besov_seminorm(
    f: &TrigPoly,
    theta_s: f64,
    qnorm: SampleNorm,
    p: f64,
    t_grid: &[f64],
) -> Result<f64> {
    if !(theta_s > 0.0) {
        return Err(Error::Parameter("theta must be positive".into()));
    }
    if !(p > 0.0) {
        return Err(Error::Parameter("p must be positive".into()));
    }
    let r = theta_s.ceil() as u32 + 1;
    let query = ModulusQuery::new(r, 0, qnorm, t_grid.to_vec());
    let points = crate::smoothness::modulus(f, &query)?;
    let mut acc = 0.0;
    for (i, pt) in points.iter().enumerate() {
        let weight = if i == 0 {
            (1.0 / pt.t).ln()
        } else {
            (points[i - 1].t / pt.t).ln()
        };
        acc += (pt.t.powf(-theta_s) * pt.value).powf(p) * weight;
    }
    Ok(acc.powf(1.0 / p))
}

/// `(sum_k |a_k|^p)^{1/p}`.
pub fn ap_norm(f: &TrigPoly, p: f64) -> f64 {
    assert!(p > 0.0, "p must be positive");
    f.coeffs()
        .iter()
        .map(|c| {
            let m = c.norm();
            if m > 0.0 {
                m.powf(p)
            } else {
                0.0
            }
        })
        .sum::<f64>()
        .powf(1.0 / p)
}

/// One row of a sharpness growth table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthRow {
    pub nmax: u64,
    pub ap_norm: f64,
    pub lip_functional: f64,
}

/// Witness data for a failing embedding query.
#[derive(Debug, Clone)]
pub struct SharpnessResult {
    pub rows: Vec<GrowthRow>,
    /// Witness polynomial at the largest size.
    pub final_poly: TrigPoly,
}

/// Options for [`sharpness_witness`].
#[derive(Debug, Clone)]
pub struct WitnessOptions {
    pub iterations: u64,
    pub direction_count: usize,
    pub quadrature_points: usize,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions { iterations: 6, direction_count: 4, quadrature_points: 32 }
    }
}

/// For a failing query, take the brute-force witness at doubling sizes,
/// spread it over the shells with random signs, and tabulate `ap_norm`
/// against the Lipschitz functional of the synthesized polynomial.
///
/// Witnesses are chained: the previous level's witness (zero-padded, which
/// keeps it feasible) seeds the next level's ascent, so the reported
/// objective never decreases as the size doubles. The shell amplitude undoes
/// the `x_n = R_n n^l` change of variables: `R_n = x_n n^{-l}`.
pub fn sharpness_witness(
    q: &EmbeddingQuery,
    nmax: u64,
    seed: u64,
    opts: &WitnessOptions,
) -> Result<SharpnessResult> {
    let rep = classify(q, opts.quadrature_points)?;
    if rep.verdict != Verdict::Fails {
        return Err(Error::NotApplicable(
            "sharpness witness requires a failing query".into(),
        ));
    }
    let mut levels = vec![nmax.max(2)];
    while *levels.last().unwrap() > 64 {
        levels.push(levels.last().unwrap() / 2);
    }
    levels.reverse();

    let mut rows = Vec::new();
    let mut final_poly = None;
    let mut prev_witness: Option<Vec<f64>> = None;
    for (li, &level) in levels.iter().enumerate() {
        let bf = bruteforce_with_start(
            q,
            level,
            opts.iterations,
            seed ^ li as u64,
            prev_witness.as_deref(),
        )?;
        let poly = spread_witness(q.d as usize, q.l, &bf.witness, seed.wrapping_add(li as u64))?;
        let ap = ap_norm(&poly, q.p);
        let t_grid = sparse_dyadic_grid(level);
        let mut mq = ModulusQuery::new(q.r, q.l, SampleNorm::L2, t_grid);
        mq.direction_count = opts.direction_count;
        let lip = lip_functional_i(&poly, &q.omega, &mq)?;
        rows.push(GrowthRow { nmax: level, ap_norm: ap, lip_functional: lip });
        prev_witness = Some(bf.witness);
        final_poly = Some(poly);
    }
    Ok(SharpnessResult { rows, final_poly: final_poly.unwrap() })
}

// Spread witness values over the box with random signs: each coefficient on
// shell n gets modulus (x_n n^{-l})/sqrt(#shell), so the shell energy is
// R_n = x_n n^{-l}.
fn spread_witness(d: usize, l: u32, x: &[f64], seed: u64) -> Result<TrigPoly> {
    let n = x.len() as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut poly = TrigPoly::zeros(d, n)?;
    let mut counts = vec![0u64; x.len() + 1];
    for (k, _) in poly.iter() {
        let shell = k.iter().take(d).map(|ki| ki.unsigned_abs()).max().unwrap();
        counts[shell as usize] += 1;
    }
    let keys: Vec<[i64; 3]> = poly.iter().map(|(k, _)| k).collect();
    for k in keys {
        let shell = k.iter().take(d).map(|ki| ki.unsigned_abs()).max().unwrap() as usize;
        if shell == 0 || x[shell - 1] == 0.0 {
            continue;
        }
        let r_n = x[shell - 1] * (shell as f64).powi(-(l as i32));
        let amp = r_n / (counts[shell] as f64).sqrt();
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        poly.set_coeff(&k[..d], num_complex::Complex64::new(sign * amp, 0.0));
    }
    Ok(poly)
}

// Every other dyadic level between 1/2 and 1/n: keeps the lip-functional
// sweep affordable at large boxes.
fn sparse_dyadic_grid(n: u64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut t = 0.5;
    let floor = 1.0 / n as f64;
    while t >= floor {
        out.push(t);
        t /= 4.0;
    }
    if out.is_empty() {
        out.push(0.5);
    }
    out
}
