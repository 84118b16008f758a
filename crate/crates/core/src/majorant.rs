//! r-quasiconcave majorants: evaluation, validation, discretizing sequences,
//! and weight representations through the least concave majorant.
//!
//! A majorant is a weight `omega` on `(0,1]` with `omega(t)` non-decreasing in
//! `t` and `t^r/omega(t)` non-decreasing. In sequence form (`omega_n :=
//! omega(1/n)`) this reads: `omega_n` non-increasing and `n^r * omega_n`
//! non-decreasing. Discretizing sequences split the index range into blocks on
//! which either `omega` or the weighted form is constant within a factor
//! `lambda`; they drive both the block constructions and the discrete
//! best-constant formulas downstream.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative guard used only when *validating* monotonicity of evaluated
/// sequences. Exactly flat stretches (e.g. `n^r * omega_n` constant) wobble by
/// a few ulps under floating-point evaluation; the guard absorbs that without
/// admitting any real violation (corpus margins are many orders larger).
const MONOTONE_ULP_GUARD: f64 = 8.0 * f64::EPSILON;

/// Default discretization parameter for order `r`.
///
/// Keeps `lambda^(1/r) > 4`, hence `4*mu_k < mu_{k+1}`, which the block
/// construction needs for spectral disjointness of next-nearest blocks.
pub fn default_lambda(r: f64) -> f64 {
    (4.0f64.powf(r) + 1.0).max(5.0)
}

/// An r-quasiconcave weight, either in closed power-log form or tabulated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Majorant {
    /// `omega(t) = t^a * (log(2/t))^b` on `(0,1]`, with `a >= 0`.
    PowerLog { a: f64, b: f64 },
    /// Tabulated values `omega_n = omega(1/n)` for `n = 1..=values.len()`.
    Tabulated { values: Vec<f64> },
}

impl Majorant {
    /// Pure power `t^a`.
    pub fn power(a: f64) -> Self {
        Majorant::PowerLog { a, b: 0.0 }
    }

    /// Pure logarithmic weight `(log(2/t))^b`.
    pub fn log_power(b: f64) -> Self {
        Majorant::PowerLog { a: 0.0, b }
    }

    /// Product form `t^a * (log(2/t))^b`.
    pub fn power_log(a: f64, b: f64) -> Self {
        Majorant::PowerLog { a, b }
    }

    /// Tabulated majorant; values must be positive and finite.
    pub fn tabulated(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Parameter("tabulated majorant needs at least one value".into()));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Parameter(format!("tabulated majorant value {v} is not positive")));
        }
        Ok(Majorant::Tabulated { values })
    }

    /// Evaluate `omega(t)` for `t` in `(0,1]`.
    ///
    /// Tabulated form reads the entry nearest to `1/t`, capped at the table
    /// length.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::Domain(format!("majorant argument t={t} outside (0,1]")));
        }
        match self {
            Majorant::PowerLog { a, b } => Ok(t.powf(*a) * (2.0 / t).ln().powf(*b)),
            Majorant::Tabulated { values } => {
                let n = (1.0 / t).round().max(1.0) as usize;
                Ok(values[n.min(values.len()) - 1])
            }
        }
    }

    /// `omega_n = omega(1/n)` for `n >= 1`, without the rounding round-trip.
    pub fn eval_at_inv(&self, n: u64) -> f64 {
        debug_assert!(n >= 1);
        match self {
            Majorant::PowerLog { a, b } => {
                let nf = n as f64;
                nf.powf(-a) * (2.0 * nf).ln().powf(*b)
            }
            Majorant::Tabulated { values } => values[(n as usize).min(values.len()) - 1],
        }
    }

    /// Weighted value `n^r * omega_n`.
    ///
    /// For the power-log form this is computed as `n^(r-a) * (log 2n)^b`, so
    /// that exactly-flat cases (`a = r`) come out bit-constant instead of
    /// accumulating rounding noise from the product `n^r * n^(-a)`.
    pub fn weighted_at_inv(&self, n: u64, r: f64) -> f64 {
        debug_assert!(n >= 1);
        match self {
            Majorant::PowerLog { a, b } => {
                let nf = n as f64;
                nf.powf(r - a) * (2.0 * nf).ln().powf(*b)
            }
            Majorant::Tabulated { values } => {
                (n as f64).powf(r) * values[(n as usize).min(values.len()) - 1]
            }
        }
    }

    /// Table length for tabulated majorants, `None` for closed forms.
    pub fn table_len(&self) -> Option<u64> {
        match self {
            Majorant::PowerLog { .. } => None,
            Majorant::Tabulated { values } => Some(values.len() as u64),
        }
    }
}

/// Which monotonicity failed during validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuasiViolation {
    /// `omega_n` increased at some step.
    OmegaIncreased,
    /// `n^r * omega_n` decreased at some step.
    WeightedDecreased,
}

/// Result of scanning both monotonicities over `n = 1..=nmax`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuasiReport {
    pub pass: bool,
    /// First violating index (the `n+1` of the failing comparison) and kind.
    pub violation: Option<(u64, QuasiViolation)>,
}

/// Check that `omega_n` is non-increasing and `n^r * omega_n` non-decreasing
/// for `n = 1..=nmax`.
pub fn validate_quasiconcave(omega: &Majorant, r: f64, nmax: u64) -> QuasiReport {
    assert!(nmax >= 2, "nmax must be at least 2");
    let mut prev_o = omega.eval_at_inv(1);
    let mut prev_w = omega.weighted_at_inv(1, r);
    for n in 2..=nmax {
        let o = omega.eval_at_inv(n);
        let w = omega.weighted_at_inv(n, r);
        if o > prev_o * (1.0 + MONOTONE_ULP_GUARD) {
            return QuasiReport { pass: false, violation: Some((n, QuasiViolation::OmegaIncreased)) };
        }
        if w < prev_w * (1.0 - MONOTONE_ULP_GUARD) {
            return QuasiReport { pass: false, violation: Some((n, QuasiViolation::WeightedDecreased)) };
        }
        prev_o = o;
        prev_w = w;
    }
    QuasiReport { pass: true, violation: None }
}

/// Block label: on `I`-blocks `omega` is constant within `lambda`, on
/// `J`-blocks the weighted form `n^r * omega_n` is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockLabel {
    I,
    J,
}

/// A discretizing sequence `mu_1 < mu_2 < ... < mu_L` (with the implicit
/// sentinel `mu_{L+1} = infinity`), block labels, and its parameters.
///
/// Block `k` (0-based) covers indices `mu[k] ..= mu[k+1]-1`; the last block
/// runs to `nmax`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizingSequence {
    pub mu: Vec<u64>,
    pub labels: Vec<BlockLabel>,
    pub lambda: f64,
    pub r: f64,
    pub nmax: u64,
}

impl DiscretizingSequence {
    /// Number of blocks `L`.
    pub fn block_count(&self) -> usize {
        self.mu.len()
    }

    /// Inclusive index range of block `k` (0-based), capped at `nmax`.
    pub fn block_range(&self, k: usize) -> (u64, u64) {
        let lo = self.mu[k];
        let hi = if k + 1 < self.mu.len() { self.mu[k + 1] - 1 } else { self.nmax };
        (lo, hi)
    }
}

/// Build the discretizing sequence of `omega` at order `r`.
///
/// The recursion takes `mu_{k+1}` as the least `n <= nmax` with
/// `n^r * omega_n > lambda * mu_k^r * omega_{mu_k}` and
/// `lambda * omega_n < omega_{mu_k}`; both comparisons are strict and exact.
/// When no such `n` exists within `nmax` the sequence terminates. Each block
/// then gets label `J` when the weighted form at the block end stays within
/// `lambda` of its start, and `I` otherwise (when both brackets hold, `J`
/// wins).
pub fn discretize(omega: &Majorant, lambda: f64, r: f64, nmax: u64) -> Result<DiscretizingSequence> {
    if !(lambda > 4.0) {
        return Err(Error::Parameter(format!("lambda must exceed 4, got {lambda}")));
    }
    if !(r > 0.0) {
        return Err(Error::Parameter(format!("order r must be positive, got {r}")));
    }
    if nmax < 2 {
        return Err(Error::Parameter("nmax must be at least 2".into()));
    }
    let report = validate_quasiconcave(omega, r, nmax);
    if let Some((n, kind)) = report.violation {
        return Err(Error::Precondition(format!(
            "majorant is not {r}-quasiconcave: {kind:?} at n={n}"
        )));
    }

    let mut mu = vec![1u64];
    loop {
        let cur = *mu.last().unwrap();
        let weighted_bound = lambda * omega.weighted_at_inv(cur, r);
        let omega_bound = omega.eval_at_inv(cur);
        // Both defining conditions are monotone in n, so the least solution is
        // the first n at which both hold.
        let mut next = None;
        for n in (cur + 1)..=nmax {
            if omega.weighted_at_inv(n, r) > weighted_bound
                && lambda * omega.eval_at_inv(n) < omega_bound
            {
                next = Some(n);
                break;
            }
        }
        match next {
            Some(n) => mu.push(n),
            None => break,
        }
    }

    let count = mu.len();
    let mut labels = Vec::with_capacity(count);
    for k in 0..count {
        let lo = mu[k];
        let end = if k + 1 < count { mu[k + 1] - 1 } else { nmax };
        let j_holds = omega.weighted_at_inv(end, r) <= lambda * omega.weighted_at_inv(lo, r);
        labels.push(if j_holds { BlockLabel::J } else { BlockLabel::I });
    }

    Ok(DiscretizingSequence { mu, labels, lambda, r, nmax })
}

/// Property report for a discretizing sequence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscretizingReport {
    pub pass: bool,
    pub violations: Vec<String>,
    /// Worst `omega_{mu_k} / omega_{mu_{k+1}-1}` over I-blocks.
    pub worst_i_ratio: Option<f64>,
    /// Worst `(mu_{k+1}-1)^r omega_{mu_{k+1}-1} / (mu_k^r omega_{mu_k})` over J-blocks.
    pub worst_j_ratio: Option<f64>,
}

/// Check every structural property of a discretizing sequence against its
/// majorant; violations are reported, not thrown.
pub fn verify_discretizing_properties(
    seq: &DiscretizingSequence,
    omega: &Majorant,
) -> DiscretizingReport {
    let mut violations = Vec::new();
    let lambda = seq.lambda;
    let r = seq.r;
    let mu = &seq.mu;

    if mu.first() != Some(&1) {
        violations.push("item (1): mu_1 != 1".into());
    }
    if mu.windows(2).any(|w| w[0] >= w[1]) {
        violations.push("mu is not strictly increasing".into());
    }
    if mu.last().is_some_and(|&m| m > seq.nmax) {
        violations.push("mu exceeds nmax".into());
    }
    if seq.labels.len() != mu.len() {
        violations.push("labels and mu lengths differ".into());
    }

    for k in 0..mu.len().saturating_sub(1) {
        let a = mu[k];
        let b = mu[k + 1];
        if !((b as f64).powf(r) >= lambda * (a as f64).powf(r)) {
            violations.push(format!("item (3) fails at k={}", k + 1));
        }
        if !(lambda * omega.eval_at_inv(b) <= omega.eval_at_inv(a)) {
            violations.push(format!("item (4) fails at k={}", k + 1));
        }
        if !(lambda * omega.weighted_at_inv(a, r) <= omega.weighted_at_inv(b, r)) {
            violations.push(format!("item (5) fails at k={}", k + 1));
        }
    }

    let mut worst_i: Option<f64> = None;
    let mut worst_j: Option<f64> = None;
    for k in 0..mu.len() {
        if k >= seq.labels.len() {
            break;
        }
        let (lo, end) = seq.block_range(k);
        match seq.labels[k] {
            BlockLabel::I => {
                let ratio = omega.eval_at_inv(lo) / omega.eval_at_inv(end);
                if !(ratio >= 1.0 - MONOTONE_ULP_GUARD && ratio <= lambda) {
                    violations.push(format!(
                        "item (6) I-bracket fails at k={}: ratio {ratio}",
                        k + 1
                    ));
                }
                worst_i = Some(worst_i.map_or(ratio, |w: f64| w.max(ratio)));
            }
            BlockLabel::J => {
                let ratio = omega.weighted_at_inv(end, r) / omega.weighted_at_inv(lo, r);
                if !(ratio >= 1.0 - MONOTONE_ULP_GUARD && ratio <= lambda) {
                    violations.push(format!(
                        "item (6) J-bracket fails at k={}: ratio {ratio}",
                        k + 1
                    ));
                }
                worst_j = Some(worst_j.map_or(ratio, |w: f64| w.max(ratio)));
            }
        }
    }

    DiscretizingReport { pass: violations.is_empty(), violations, worst_i_ratio: worst_i, worst_j_ratio: worst_j }
}

/// Nonnegative weights `alpha` with reconstruction
/// `omega_bar^p(1/N) = sum_n alpha_n / (N^{pr} + n^{pr})`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightRepresentation {
    pub alpha: Vec<f64>,
    pub p: f64,
    pub r: f64,
    /// Recorded two-sided equivalence bracket: `omega_bar/omega` stays in
    /// `[lower, upper]` on the evaluation grid `N = 1..=alpha.len()`.
    pub lower: f64,
    pub upper: f64,
}

impl WeightRepresentation {
    /// `omega_bar^p(1/N)`.
    pub fn reconstruct_p(&self, n_val: u64) -> f64 {
        let pr = self.p * self.r;
        let npr = (n_val as f64).powf(pr);
        let mut acc = 0.0;
        for (i, &a) in self.alpha.iter().enumerate() {
            if a > 0.0 {
                acc += a / (npr + ((i + 1) as f64).powf(pr));
            }
        }
        acc
    }

    /// `omega_bar(1/N)`.
    pub fn reconstruct(&self, n_val: u64) -> f64 {
        self.reconstruct_p(n_val).powf(1.0 / self.p)
    }
}

/// Represent `omega^p` as a weighted kernel sum via the least concave
/// majorant of `f(t) = omega^p(t^{1/(pr)})`.
///
/// The graph of `f` on the grid `t_N = N^{-pr}` (with the origin adjoined) is
/// replaced by its upper convex hull; slope drops at hull vertices become the
/// weights `alpha_n`, and the final segment's slope maps to `alpha_1`. The
/// returned bracket records how well `omega_bar` reproduces `omega` on
/// `N = 1..=m`.
pub fn represent_weights(omega: &Majorant, p: f64, r: f64, m: u64) -> Result<WeightRepresentation> {
    if m < 2 {
        return Err(Error::Parameter(format!("grid size M must be at least 2, got {m}")));
    }
    if !(p > 0.0 && p < 2.0) {
        return Err(Error::Parameter(format!("p must lie in (0,2), got {p}")));
    }
    let report = validate_quasiconcave(omega, r, m);
    if let Some((n, kind)) = report.violation {
        return Err(Error::Precondition(format!(
            "majorant is not {r}-quasiconcave: {kind:?} at n={n}"
        )));
    }

    let pr = p * r;
    // Points of f in ascending t order, tagged with the grid index N.
    let mut pts: Vec<(f64, f64, u64)> = Vec::with_capacity(m as usize + 1);
    pts.push((0.0, 0.0, 0));
    for n in (1..=m).rev() {
        pts.push(((n as f64).powf(-pr), omega.eval_at_inv(n).powf(p), n));
    }

    // Upper hull, monotone chain: pop while the middle point sits on or below
    // the chord of its neighbors.
    let mut hull: Vec<(f64, f64, u64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.0 - a.0) * (pt.1 - a.1) - (pt.0 - a.0) * (b.1 - a.1);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }

    let slopes: Vec<f64> =
        hull.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
    let mut alpha = vec![0.0f64; m as usize];
    for i in 1..hull.len().saturating_sub(1) {
        let drop = slopes[i - 1] - slopes[i];
        if drop > 0.0 {
            alpha[hull[i].2 as usize - 1] += drop;
        }
    }
    if let Some(&last) = slopes.last() {
        if last > 0.0 {
            alpha[0] += last;
        }
    }

    let mut rep = WeightRepresentation { alpha, p, r, lower: f64::INFINITY, upper: 0.0 };
    for n in 1..=m {
        let ratio = rep.reconstruct(n) / omega.eval_at_inv(n);
        rep.lower = rep.lower.min(ratio);
        rep.upper = rep.upper.max(ratio);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eval_power_identity() {
        let m = Majorant::power(1.0);
        assert_relative_eq!(m.eval(0.5).unwrap(), 0.5);
    }

    #[test]
    fn eval_log_closed_form() {
        // omega = (log 2/t)^{-1/2} at t = 2 e^{-2} gives 2^{-1/2}.
        let m = Majorant::log_power(-0.5);
        let t = 2.0 * (-2.0f64).exp();
        assert_relative_eq!(m.eval(t).unwrap(), 0.5f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn eval_tabulated_lookup() {
        let m = Majorant::tabulated(vec![1.0, 0.5, 1.0 / 3.0]).unwrap();
        assert_relative_eq!(m.eval(0.5).unwrap(), 0.5);
        // Beyond the table: capped at the last entry.
        assert_relative_eq!(m.eval(0.1).unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn eval_rejects_bad_domain() {
        let m = Majorant::power(1.0);
        assert!(m.eval(0.0).is_err());
        assert!(m.eval(1.5).is_err());
    }

    #[test]
    fn validate_half_power_passes() {
        for r in [0.5, 1.0, 2.0] {
            let m = Majorant::power(r / 2.0);
            assert!(validate_quasiconcave(&m, r, 1000).pass);
        }
    }

    #[test]
    fn validate_oversteep_power_fails() {
        let r = 1.0;
        let m = Majorant::power(r + 1.0);
        let rep = validate_quasiconcave(&m, r, 100);
        assert!(!rep.pass);
        assert_eq!(rep.violation.unwrap().1, QuasiViolation::WeightedDecreased);
    }

    #[test]
    fn validate_log_half_passes_to_ten_thousand() {
        let m = Majorant::log_power(-0.5);
        assert!(validate_quasiconcave(&m, 1.0, 10_000).pass);
    }

    #[test]
    fn validate_exact_flat_weighted_passes() {
        // omega = t^r makes n^r omega_n exactly constant.
        let m = Majorant::power(1.0);
        assert!(validate_quasiconcave(&m, 1.0, 10_000).pass);
    }

    #[test]
    fn discretize_flat_weighted_is_single_block() {
        // omega_n = n^{-r}: the weighted condition can never exceed lambda.
        let m = Majorant::power(2.0);
        let seq = discretize(&m, 5.0, 2.0, 500).unwrap();
        assert_eq!(seq.mu, vec![1]);
        assert_eq!(seq.labels, vec![BlockLabel::J]);
    }

    #[test]
    fn discretize_half_power_matches_linear_scan() {
        // omega = t^{r/2} with r=2: both conditions reduce to n > 5 mu_k.
        let m = Majorant::power(1.0);
        let seq = discretize(&m, 5.0, 2.0, 200).unwrap();
        assert_eq!(seq.mu, vec![1, 6, 31, 156]);

        // Independent oracle: literal scan of the recursion over a value table.
        let omega_n: Vec<f64> = (1..=200u64).map(|n| 1.0 / n as f64).collect();
        let mut mu = vec![1u64];
        'outer: loop {
            let cur = *mu.last().unwrap() as usize;
            for n in cur + 1..=200 {
                let wn = (n as f64).powf(2.0) * omega_n[n - 1];
                let wc = (cur as f64).powf(2.0) * omega_n[cur - 1];
                if wn > 5.0 * wc && 5.0 * omega_n[n - 1] < omega_n[cur - 1] {
                    mu.push(n as u64);
                    continue 'outer;
                }
            }
            break;
        }
        assert_eq!(seq.mu, mu);
    }

    #[test]
    fn discretize_constant_is_single_block() {
        let m = Majorant::tabulated(vec![1.0; 64]).unwrap();
        let seq = discretize(&m, 5.0, 1.0, 64).unwrap();
        assert_eq!(seq.mu, vec![1]);
        // omega never drops, so the I-bracket is the one that holds.
        assert_eq!(seq.labels, vec![BlockLabel::I]);
    }

    #[test]
    fn discretize_rejects_small_lambda() {
        let m = Majorant::power(0.5);
        assert!(matches!(discretize(&m, 4.0, 1.0, 100), Err(Error::Parameter(_))));
    }

    #[test]
    fn discretize_rejects_invalid_majorant() {
        let m = Majorant::power(2.5);
        assert!(matches!(discretize(&m, 5.0, 1.0, 100), Err(Error::Precondition(_))));
    }

    #[test]
    fn verify_passes_on_discretize_output() {
        let m = Majorant::power(1.0);
        let seq = discretize(&m, 5.0, 2.0, 200).unwrap();
        let rep = verify_discretizing_properties(&seq, &m);
        assert!(rep.pass, "violations: {:?}", rep.violations);
        if let Some(w) = rep.worst_i_ratio {
            assert!(w <= 5.0);
        }
        if let Some(w) = rep.worst_j_ratio {
            assert!(w <= 5.0);
        }
    }

    #[test]
    fn verify_catches_forged_sequence() {
        let m = Majorant::power(1.0);
        let seq = DiscretizingSequence {
            mu: vec![1, 2],
            labels: vec![BlockLabel::I, BlockLabel::J],
            lambda: 5.0,
            r: 1.0,
            nmax: 10,
        };
        let rep = verify_discretizing_properties(&seq, &m);
        assert!(!rep.pass);
        assert!(rep.violations.iter().any(|v| v.contains("item (3)")));
    }

    #[test]
    fn verify_single_block_is_vacuous_on_items_3_to_5() {
        let m = Majorant::tabulated(vec![1.0; 32]).unwrap();
        let seq = discretize(&m, 5.0, 1.0, 32).unwrap();
        assert_eq!(seq.mu.len(), 1);
        let rep = verify_discretizing_properties(&seq, &m);
        assert!(rep.pass);
    }

    #[test]
    fn discretize_scale_invariance_on_tabulated() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let r = 1.5;
        let n = 400u64;
        let mut values = vec![1.0f64];
        for i in 1..n {
            let lo = ((i as f64) / (i as f64 + 1.0)).powf(r);
            let u = rng.gen_range(lo..=1.0);
            values.push(values[i as usize - 1] * u);
        }
        let m = Majorant::tabulated(values.clone()).unwrap();
        let seq = discretize(&m, 6.0, r, n).unwrap();
        for c in [0.25f64, 4.0, 1024.0] {
            let scaled =
                Majorant::tabulated(values.iter().map(|v| c * v).collect()).unwrap();
            let seq_c = discretize(&scaled, 6.0, r, n).unwrap();
            assert_eq!(seq.mu, seq_c.mu);
            assert_eq!(seq.labels, seq_c.labels);
        }
    }

    #[test]
    fn represent_power_r_single_atom() {
        // omega = t^r, p = 1: f(t) is linear, all mass lands on alpha_1.
        let rep = represent_weights(&Majorant::power(1.0), 1.0, 1.0, 64).unwrap();
        assert_relative_eq!(rep.alpha[0], 1.0, max_relative = 1e-9);
        assert!(rep.alpha[1..].iter().all(|&a| a.abs() < 1e-12));
        for n in [1u64, 2, 16, 64] {
            let ratio = rep.reconstruct_p(n) * (n as f64);
            assert!((0.5..=1.0 + 1e-12).contains(&ratio), "ratio {ratio} at N={n}");
        }
    }

    #[test]
    fn represent_half_power_bracket_within_four() {
        let rep = represent_weights(&Majorant::power(1.0), 1.0, 2.0, 256).unwrap();
        assert!(rep.alpha.iter().all(|&a| a >= 0.0));
        assert!(rep.upper / rep.lower <= 4.0, "bracket {} .. {}", rep.lower, rep.upper);
    }

    #[test]
    fn represent_log_half_nonnegative_and_bounded() {
        let rep = represent_weights(&Majorant::log_power(-0.5), 1.0, 1.0, 512).unwrap();
        assert!(rep.alpha.iter().all(|&a| a >= 0.0));
        assert!(rep.lower > 0.0 && rep.upper.is_finite());
        assert!(rep.upper / rep.lower <= 8.0);
    }

    #[test]
    fn represent_reconstruction_is_quasiconcave() {
        let rep = represent_weights(&Majorant::power(0.7), 1.0, 1.0, 128).unwrap();
        let values: Vec<f64> = (1..=128).map(|n| rep.reconstruct(n)).collect();
        let bar = Majorant::tabulated(values).unwrap();
        assert!(validate_quasiconcave(&bar, 1.0, 128).pass);
    }

    #[test]
    fn represent_rejects_tiny_grid() {
        assert!(matches!(
            represent_weights(&Majorant::power(0.5), 1.0, 1.0, 1),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn majorant_json_round_trip() {
        let m = Majorant::power_log(0.5, -1.0);
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("power-log"));
        let back: Majorant = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);

        let t = Majorant::tabulated(vec![1.0, 0.5]).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.contains("tabulated"));
        let back: Majorant = serde_json::from_str(&s).unwrap();
        assert_eq!(t, back);
    }
}
