//! Trigonometric polynomials on the d-torus in coefficient space.
//!
//! A polynomial is a dense complex array over the box `[-N,N]^d` (1 <= d <= 3)
//! holding the coefficients of `f(x) = sum_k a_k e^{2 pi i <k,x>}`. All
//! operators here are diagonal in frequency: derivatives, finite differences,
//! and de la Vallée-Poussin means multiply coefficients pointwise. Grid
//! evaluation goes through a zero-padded inverse FFT, with a naive summation
//! twin kept as the always-on oracle for tests.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Default oversampling factor for sup-norm grids.
pub const DEFAULT_OVERSAMPLE: usize = 8;

/// Dense coefficient box of a trigonometric polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    d: usize,
    n: i64,
    real_valued: bool,
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    /// Zero polynomial on `[-n,n]^d`.
    pub fn zeros(d: usize, n: i64) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(Error::Parameter(format!("dimension must be 1..=3, got {d}")));
        }
        if n < 0 {
            return Err(Error::Parameter(format!("box radius must be nonnegative, got {n}")));
        }
        let side = (2 * n + 1) as usize;
        let len = side.pow(d as u32);
        Ok(TrigPoly { d, n, real_valued: false, coeffs: vec![ZERO; len] })
    }

    /// Wrap an existing coefficient array; its length must be `(2n+1)^d`.
    pub fn from_coeffs(d: usize, n: i64, coeffs: Vec<Complex64>) -> Result<Self> {
        let mut p = TrigPoly::zeros(d, n)?;
        if coeffs.len() != p.coeffs.len() {
            return Err(Error::BoxMismatch(format!(
                "expected {} coefficients for d={d}, N={n}, got {}",
                p.coeffs.len(),
                coeffs.len()
            )));
        }
        p.coeffs = coeffs;
        Ok(p)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn box_radius(&self) -> i64 {
        self.n
    }

    pub fn side(&self) -> usize {
        (2 * self.n + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Whether the polynomial is flagged as a real-valued function.
    pub fn real_valued(&self) -> bool {
        self.real_valued
    }

    /// Set the real-valued flag after checking Hermitian symmetry
    /// `a_{-k} = conj(a_k)` exactly.
    pub fn flag_real_valued(&mut self) -> Result<()> {
        if !self.is_hermitian() {
            return Err(Error::Precondition(
                "coefficients are not Hermitian-symmetric".into(),
            ));
        }
        self.real_valued = true;
        Ok(())
    }

    /// Check Hermitian symmetry of the coefficient array.
    pub fn is_hermitian(&self) -> bool {
        for (k, c) in self.iter() {
            let mut neg = [0i64; 3];
            for i in 0..self.d {
                neg[i] = -k[i];
            }
            let cn = self.coeff(&neg[..self.d]);
            if cn != c.conj() {
                return false;
            }
        }
        true
    }

    fn index_of(&self, k: &[i64]) -> usize {
        debug_assert_eq!(k.len(), self.d);
        let side = self.side();
        let mut idx = 0usize;
        for &ki in k {
            debug_assert!(ki.abs() <= self.n, "frequency {ki} outside box radius {}", self.n);
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

    /// Coefficient at frequency `k` (zero outside the box).
    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        if k.iter().any(|ki| ki.abs() > self.n) {
            return ZERO;
        }
        self.coeffs[self.index_of(k)]
    }

    pub fn set_coeff(&mut self, k: &[i64], v: Complex64) {
        let idx = self.index_of(k);
        self.coeffs[idx] = v;
    }

    /// Iterate `(frequency, coefficient)` pairs in lexicographic order.
    /// Only the first `d` entries of the frequency array are meaningful.
    pub fn iter(&self) -> impl Iterator<Item = ([i64; 3], Complex64)> + '_ {
        self.coeffs.iter().enumerate().map(|(i, &c)| (self.decode(i), c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    /// Coefficient l2 norm; equals the L2 norm of the function by Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// New polynomial with coefficients `m(k) * a_k`.
    pub fn map_multiplier(&self, m: impl Fn(&[i64]) -> Complex64) -> TrigPoly {
        let mut out = self.clone();
        out.real_valued = false;
        for i in 0..out.coeffs.len() {
            if out.coeffs[i] != ZERO {
                let k = self.decode(i);
                out.coeffs[i] *= m(&k[..self.d]);
            }
        }
        out
    }

    /// Pointwise sum; boxes must agree.
    pub fn add(&self, other: &TrigPoly) -> Result<TrigPoly> {
        if self.d != other.d || self.n != other.n {
            return Err(Error::BoxMismatch("add requires identical boxes".into()));
        }
        let mut out = self.clone();
        out.real_valued = false;
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        Ok(out)
    }

    /// `self - other`, where `other` may live on a smaller box.
    pub fn sub(&self, other: &TrigPoly) -> Result<TrigPoly> {
        if self.d != other.d || other.n > self.n {
            return Err(Error::BoxMismatch("sub requires other's box within self's".into()));
        }
        let mut out = self.clone();
        out.real_valued = false;
        for (k, c) in other.iter() {
            if c != ZERO {
                let idx = out.index_of(&k[..self.d]);
                out.coeffs[idx] -= c;
            }
        }
        Ok(out)
    }

    /// Copy into a (weakly) larger box.
    pub fn embed(&self, n: i64) -> Result<TrigPoly> {
        if n < self.n {
            return Err(Error::BoxMismatch("embed target box is smaller".into()));
        }
        let mut out = TrigPoly::zeros(self.d, n)?;
        out.real_valued = self.real_valued;
        for (k, c) in self.iter() {
            if c != ZERO {
                out.set_coeff(&k[..self.d], c);
            }
        }
        Ok(out)
    }

    /// Samples on the uniform grid `x_j = j/m` per axis via zero-padded
    /// inverse FFT; exact up to rounding for `m >= 2N+1`.
    pub fn evaluate_on_grid(&self, m: usize) -> Result<Vec<Complex64>> {
        let need = self.side();
        if m < need {
            return Err(Error::Aliasing { m, need });
        }
        let total = m.pow(self.d as u32);
        let mut data = vec![ZERO; total];
        let mi = m as i64;
        for (k, c) in self.iter() {
            if c != ZERO {
                let mut idx = 0usize;
                for ki in k.iter().take(self.d) {
                    idx = idx * m + ki.rem_euclid(mi) as usize;
                }
                data[idx] = c;
            }
        }
        fft_inverse_nd(&mut data, self.d, m);
        Ok(data)
    }

    /// Naive direct summation; the slow twin of [`Self::evaluate_on_grid`].
    pub fn evaluate_on_grid_direct(&self, m: usize) -> Result<Vec<Complex64>> {
        let need = self.side();
        if m < need {
            return Err(Error::Aliasing { m, need });
        }
        let support: Vec<([i64; 3], Complex64)> =
            self.iter().filter(|(_, c)| *c != ZERO).collect();
        let total = m.pow(self.d as u32);
        let mut out = vec![ZERO; total];
        let tau = std::f64::consts::TAU;
        for (idx, slot) in out.iter_mut().enumerate() {
            // grid point j in base-m digits, axis 0 slowest
            let mut rem = idx;
            let mut j = [0usize; 3];
            for i in (0..self.d).rev() {
                j[i] = rem % m;
                rem /= m;
            }
            let mut acc = ZERO;
            for (k, c) in &support {
                let mut phase = 0.0;
                for i in 0..self.d {
                    phase += k[i] as f64 * j[i] as f64 / m as f64;
                }
                acc += c * Complex64::from_polar(1.0, tau * phase);
            }
            *slot = acc;
        }
        Ok(out)
    }

    /// Partial derivative of multi-index `alpha`: multiply `a_k` by
    /// `prod_i (2 pi i k_i)^{alpha_i}`.
    pub fn partial_derivative(&self, alpha: &[u32]) -> TrigPoly {
        assert_eq!(alpha.len(), self.d, "multi-index length must equal dimension");
        let tau = std::f64::consts::TAU;
        self.map_multiplier(|k| {
            let mut m = Complex64::new(1.0, 0.0);
            for (i, &a) in alpha.iter().enumerate() {
                let factor = Complex64::new(0.0, tau * k[i] as f64);
                for _ in 0..a {
                    m *= factor;
                }
            }
            m
        })
    }

    /// r-th finite difference with step `h`: multiply `a_k` by
    /// `(1 - e^{2 pi i <k,h>})^r` (sign convention `Delta_h f = f(x) - f(x+h)`).
    pub fn difference(&self, h: &[f64], r: u32) -> TrigPoly {
        assert_eq!(h.len(), self.d, "step vector length must equal dimension");
        let tau = std::f64::consts::TAU;
        self.map_multiplier(|k| {
            let mut phase = 0.0;
            for i in 0..self.d {
                phase += k[i] as f64 * h[i];
            }
            let base = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, tau * phase);
            let mut m = Complex64::new(1.0, 0.0);
            for _ in 0..r {
                m *= base;
            }
            m
        })
    }

    /// De la Vallée-Poussin mean of integer degree `n >= 1`: coefficient `k`
    /// is scaled by `prod_i min(1, 2 - |k_i|/n)` inside `||k||_inf <= 2n` and
    /// dropped outside. The output box radius is `min(N, 2n)`.
    pub fn vallee_poussin(&self, n: u64) -> Result<TrigPoly> {
        if n < 1 {
            return Err(Error::Parameter("de la Vallée-Poussin degree must be >= 1".into()));
        }
        let out_n = self.n.min(2 * n as i64);
        let mut out = TrigPoly::zeros(self.d, out_n)?;
        for (k, c) in self.iter() {
            if c == ZERO {
                continue;
            }
            let mut m = 1.0;
            for ki in k.iter().take(self.d) {
                m *= vp_axis_factor(ki.unsigned_abs(), n);
                if m == 0.0 {
                    break;
                }
            }
            if m != 0.0 {
                out.set_coeff(&k[..self.d], c * m);
            }
        }
        Ok(out)
    }

    /// De la Vallée-Poussin mean of half-integer degree `mu/2`, written out
    /// exactly: factor 1 for `2|k_i| <= mu`, 0 for `|k_i| >= mu`, and the
    /// linear ramp `2 - 2|k_i|/mu` in between. Support is `||k||_inf < mu`,
    /// and the full box `[-mu/2, mu/2]^d` reproduces exactly. For `mu = 1`
    /// this keeps only the constant term.
    pub fn vallee_poussin_half(&self, mu: u64) -> Result<TrigPoly> {
        if mu < 1 {
            return Err(Error::Parameter("de la Vallée-Poussin degree must be >= 1".into()));
        }
        let out_n = self.n.min(mu as i64);
        let mut out = TrigPoly::zeros(self.d, out_n)?;
        for (k, c) in self.iter() {
            if c == ZERO {
                continue;
            }
            let mut m = 1.0;
            for ki in k.iter().take(self.d) {
                let ka = ki.unsigned_abs();
                let f = if 2 * ka <= mu {
                    1.0
                } else if ka >= mu {
                    0.0
                } else {
                    2.0 - 2.0 * ka as f64 / mu as f64
                };
                m *= f;
                if m == 0.0 {
                    break;
                }
            }
            if m != 0.0 {
                out.set_coeff(&k[..self.d], c * m);
            }
        }
        Ok(out)
    }

    /// Shell energies `R_n = (sum_{||k||_inf = n} |a_k|^2)^{1/2}`.
    pub fn shell_profile(&self) -> ShellProfile {
        let mut sums = vec![0.0f64; self.n as usize + 1];
        for (k, c) in self.iter() {
            if c != ZERO {
                let shell = k.iter().take(self.d).map(|ki| ki.unsigned_abs()).max().unwrap();
                sums[shell as usize] += c.norm_sqr();
            }
        }
        ShellProfile {
            d: self.d,
            n: self.n as u64,
            values: sums.into_iter().map(f64::sqrt).collect(),
        }
    }

    /// Grid maximum of `|f|` on an oversampled alias-free grid: a certified
    /// lower bound for the sup norm. `oversample` is clamped to at least 2.
    pub fn sup_norm(&self, oversample: usize) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let m = oversample.max(2) * self.side();
        let samples = self.evaluate_on_grid(m).expect("oversampled grid is alias-free");
        samples.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }

    /// Two-sided sup-norm bracket: the grid maximum below, and above it the
    /// mean-value correction `grid_max + (sqrt(d)/(2m)) * 2 pi sum_k |k| |a_k|`
    /// using the coefficient bound for the gradient.
    pub fn sup_norm_bracket(&self, oversample: usize) -> (f64, f64) {
        let lo = self.sup_norm(oversample);
        let m = oversample.max(2) * self.side();
        let grad_bound: f64 = self
            .iter()
            .map(|(k, c)| {
                let norm_k = k
                    .iter()
                    .take(self.d)
                    .map(|ki| (*ki as f64) * (*ki as f64))
                    .sum::<f64>()
                    .sqrt();
                std::f64::consts::TAU * norm_k * c.norm()
            })
            .sum();
        let half_diag = (self.d as f64).sqrt() / (2.0 * m as f64);
        (lo, lo + grad_bound * half_diag)
    }

    /// `C^s` norm: `||f||_C` for `s = 0`, otherwise
    /// `||f||_C + max_{|alpha| = s} ||d^alpha f||_C`, all via grid maxima.
    pub fn cs_norm(&self, s: u32, oversample: usize) -> f64 {
        let base = self.sup_norm(oversample);
        if s == 0 {
            return base;
        }
        let mut worst = 0.0f64;
        for alpha in multi_indices(self.d, s) {
            worst = worst.max(self.partial_derivative(&alpha[..self.d]).sup_norm(oversample));
        }
        base + worst
    }

    /// Flat CSV layout: `d,n,real` header, then one `k_1..k_d,re,im` row per
    /// coefficient in lexicographic order, at 17 significant digits (decimal
    /// round-trip is bit-exact).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,n,real\n");
        out.push_str(&format!("{},{},{}\n", self.d, self.n, u8::from(self.real_valued)));
        for (k, c) in self.iter() {
            for ki in k.iter().take(self.d) {
                out.push_str(&format!("{ki},"));
            }
            out.push_str(&format!("{:.16e},{:.16e}\n", c.re, c.im));
        }
        out
    }

    /// Parse the CSV layout emitted by [`Self::to_csv`]. Rows may come in any
    /// order; omitted frequencies stay zero.
    pub fn from_csv(text: &str) -> Result<TrigPoly> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        if header.trim() != "d,n,real" {
            return Err(Error::Parse(format!("expected 'd,n,real' header, got '{header}'")));
        }
        let meta = lines.next().ok_or_else(|| Error::Parse("missing header values".into()))?;
        let fields: Vec<&str> = meta.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::Parse("header must have three fields".into()));
        }
        let d: usize = fields[0].parse().map_err(|_| Error::Parse("bad dimension".into()))?;
        let n: i64 = fields[1].parse().map_err(|_| Error::Parse("bad box radius".into()))?;
        let real = fields[2] == "1" || fields[2] == "true";
        let mut poly = TrigPoly::zeros(d, n)?;
        for line in lines {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != d + 2 {
                return Err(Error::Parse(format!("row '{line}' must have {} fields", d + 2)));
            }
            let mut k = [0i64; 3];
            for i in 0..d {
                k[i] = fields[i].parse().map_err(|_| Error::Parse("bad frequency".into()))?;
                if k[i].abs() > n {
                    return Err(Error::Parse(format!("frequency {} outside box", k[i])));
                }
            }
            let re: f64 = fields[d].parse().map_err(|_| Error::Parse("bad real part".into()))?;
            let im: f64 =
                fields[d + 1].parse().map_err(|_| Error::Parse("bad imaginary part".into()))?;
            poly.set_coeff(&k[..d], Complex64::new(re, im));
        }
        if real {
            poly.flag_real_valued()?;
        }
        Ok(poly)
    }
}

fn vp_axis_factor(k_abs: u64, deg: u64) -> f64 {
    if k_abs <= deg {
        1.0
    } else if k_abs >= 2 * deg {
        0.0
    } else {
        2.0 - k_abs as f64 / deg as f64
    }
}

/// All multi-indices of the given total weight in `d` slots (only the first
/// `d` entries are used).
pub fn multi_indices(d: usize, weight: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    match d {
        1 => out.push([weight, 0, 0]),
        2 => {
            for a in 0..=weight {
                out.push([a, weight - a, 0]);
            }
        }
        3 => {
            for a in 0..=weight {
                for b in 0..=(weight - a) {
                    out.push([a, b, weight - a - b]);
                }
            }
        }
        _ => panic!("dimension must be 1..=3"),
    }
    out
}

fn fft_inverse_nd(data: &mut [Complex64], d: usize, m: usize) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_inverse(m);
    let mut line = vec![ZERO; m];
    for axis in 0..d {
        let inner: usize = m.pow((d - 1 - axis) as u32);
        let outer: usize = data.len() / (m * inner);
        for o in 0..outer {
            for i in 0..inner {
                let start = o * m * inner + i;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + j * inner];
                }
                fft.process(&mut line);
                for (j, slot) in line.iter().enumerate() {
                    data[start + j * inner] = *slot;
                }
            }
        }
    }
}

/// Shell energy profile of a coefficient box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellProfile {
    pub d: usize,
    pub n: u64,
    /// `values[n] = R_n` for `n = 0..=N`.
    pub values: Vec<f64>,
}

impl ShellProfile {
    /// Build a profile directly from shell values (`values[0]` is shell 0).
    pub fn from_values(d: usize, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Parameter("profile needs at least the 0-shell".into()));
        }
        Ok(ShellProfile { d, n: values.len() as u64 - 1, values })
    }

    /// Total squared coefficient mass `sum R_n^2`.
    pub fn total_energy(&self) -> f64 {
        self.values.iter().map(|r| r * r).sum()
    }
}

// Serde: flat row layout mirroring the CSV format.
#[derive(Serialize, Deserialize)]
struct PolyRepr {
    d: usize,
    n: i64,
    real: bool,
    rows: Vec<Vec<f64>>,
}

impl From<TrigPoly> for PolyRepr {
    fn from(p: TrigPoly) -> Self {
        let mut rows = Vec::new();
        for (k, c) in p.iter() {
            if c != ZERO {
                let mut row: Vec<f64> = k.iter().take(p.d).map(|ki| *ki as f64).collect();
                row.push(c.re);
                row.push(c.im);
                rows.push(row);
            }
        }
        PolyRepr { d: p.d, n: p.n, real: p.real_valued, rows }
    }
}

impl TryFrom<PolyRepr> for TrigPoly {
    type Error = Error;

    fn try_from(repr: PolyRepr) -> Result<TrigPoly> {
        let mut poly = TrigPoly::zeros(repr.d, repr.n)?;
        for row in &repr.rows {
            if row.len() != repr.d + 2 {
                return Err(Error::Parse("coefficient row has wrong arity".into()));
            }
            let mut k = [0i64; 3];
            for i in 0..repr.d {
                k[i] = row[i] as i64;
                if k[i].abs() > repr.n {
                    return Err(Error::Parse(format!("frequency {} outside box", k[i])));
                }
            }
            poly.set_coeff(&k[..repr.d], Complex64::new(row[repr.d], row[repr.d + 1]));
        }
        if repr.real {
            poly.flag_real_valued()?;
        }
        Ok(poly)
    }
}

impl Serialize for TrigPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr::from(self.clone()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for TrigPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(d)?;
        TrigPoly::try_from(repr).map_err(serde::de::Error::custom)
    }
}
