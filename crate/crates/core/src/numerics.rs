//! Small numerical building blocks: compensated summation, modified Bessel
//! weights, Gauss-Hermite rules and a golden-section maximizer.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Kahan-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Scaled modified Bessel functions e^{-x} I_k(x) for k = 0, 1, 2, ...
///
/// Computed with Miller's backward recurrence and normalized through
/// e^{-x} (I_0 + 2 Σ_{k≥1} I_k) = 1. Entries past the returned length are
/// below 1e-300 relative to I_0.
pub fn scaled_bessel_i(x: f64) -> Vec<f64> {
    assert!(x >= 0.0 && x.is_finite(), "argument must be finite and nonnegative");
    if x == 0.0 {
        return vec![1.0];
    }
    let start = (2.0 * (x + 30.0) + 10.0 * x.sqrt()) as usize + 20;
    let mut vals = vec![0.0f64; start + 2];
    let mut next = 0.0; // I_{k+1}
    let mut cur = 1e-280; // I_k
    vals[start] = cur;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur + next;
        next = cur;
        cur = prev;
        vals[k - 1] = cur;
        if cur > 1e250 {
            for v in vals[k - 1..=start].iter_mut() {
                *v *= 1e-250;
            }
            next *= 1e-250;
            cur *= 1e-250;
        }
    }
    let norm: KahanSum = std::iter::once(vals[0])
        .chain(vals[1..].iter().map(|v| 2.0 * v))
        .collect();
    let norm = norm.value();
    let mut out: Vec<f64> = vals.into_iter().map(|v| v / norm).collect();
    while out.len() > 1 && *out.last().unwrap() < 1e-300 * out[0] {
        out.pop();
    }
    out
}

/// A Gauss-Hermite rule for the weight e^{-x²}.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Builds an `n`-point rule. Roots of the orthonormal Hermite polynomial
    /// are found from the largest down by Newton iteration from an
    /// extrapolated guess; each root is checked with a Sturm count on the
    /// Jacobi matrix and re-isolated by bisection when Newton lands on the
    /// wrong one. The recurrence is rescaled on the fly so the outermost
    /// nodes of high-order rules do not overflow.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let off_sq: Vec<f64> = (1..n).map(|j| 0.5 * j as f64).collect();
        let m = n.div_ceil(2);
        let mut upper = (2.0 * n as f64 + 1.0).sqrt() + 1.0;
        for i in 0..m {
            // the (i+1)-th largest root has exactly n - 1 - i roots below it
            let target = n - 1 - i;
            let z = if n % 2 == 1 && i == m - 1 {
                0.0
            } else {
                let guess = match i {
                    0 => (2.0 * n as f64 + 1.0).sqrt() - 1.85575 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0),
                    1 => 2.0 * nodes[0] - upper.min(nodes[0] + 1.0),
                    _ => 2.0 * nodes[i - 1] - nodes[i - 2],
                };
                match newton_root(n, guess) {
                    Some(z) if z < upper && is_root_index(&off_sq, z, target) => z,
                    _ => {
                        let (mut lo, mut hi) = (0.0, upper);
                        while hi - lo > 1e-6 * hi.abs().max(1.0) {
                            let mid = 0.5 * (lo + hi);
                            if sturm_count(&off_sq, mid) > target {
                                hi = mid;
                            } else {
                                lo = mid;
                            }
                        }
                        newton_root(n, 0.5 * (lo + hi))
                            .filter(|z| *z > lo && *z < hi)
                            .unwrap_or(0.5 * (lo + hi))
                    }
                }
            };
            let (_, p2, log_scale) = hermite_orthonormal(n, z);
            let log_pp = ((2.0 * n as f64).sqrt() * p2).abs().ln() + log_scale;
            let w = (2.0f64.ln() - 2.0 * log_pp).exp();
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = w;
            weights[n - 1 - i] = w;
            upper = z;
        }
        Self { nodes, weights }
    }

    /// E[f(X)] for X ~ Normal(0, variance).
    pub fn gaussian_expectation<F: Fn(f64) -> f64>(&self, variance: f64, f: F) -> f64 {
        let scale = (2.0 * variance).sqrt();
        let sum: KahanSum = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(scale * x))
            .collect();
        sum.value() / std::f64::consts::PI.sqrt()
    }
}

/// Newton iteration on the orthonormal Hermite polynomial of degree `n`.
fn newton_root(n: usize, mut z: f64) -> Option<f64> {
    let scale = (2.0 * n as f64).sqrt();
    for _ in 0..60 {
        let (p1, p2, _) = hermite_orthonormal(n, z);
        let step = p1 / (scale * p2);
        if !step.is_finite() {
            return None;
        }
        z -= step;
        if step.abs() <= 1e-15 * z.abs().max(1.0) {
            return Some(z);
        }
    }
    None
}

/// True when `z` is the root with exactly `below` roots under it.
fn is_root_index(off_sq: &[f64], z: f64, below: usize) -> bool {
    let eps = 1e-9 * z.abs().max(1.0);
    sturm_count(off_sq, z - eps) == below && sturm_count(off_sq, z + eps) == below + 1
}

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix
/// with zero diagonal and squared off-diagonal entries `off_sq`.
fn sturm_count(off_sq: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = -x;
    if q < 0.0 {
        count += 1;
    }
    for &b2 in off_sq {
        let prev = if q == 0.0 { f64::MIN_POSITIVE } else { q };
        q = -x - b2 / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Orthonormal Hermite recurrence at `z`; returns (p_n, p_{n-1}, ln scale).
fn hermite_orthonormal(n: usize, z: f64) -> (f64, f64, f64) {
    const PIM4: f64 = 0.751_125_544_464_942_5; // π^{-1/4}
    let mut p1 = PIM4;
    let mut p2 = 0.0;
    let mut log_scale = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
        if p1.abs() > 1e200 {
            p1 *= 1e-200;
            p2 *= 1e-200;
            log_scale += 200.0 * std::f64::consts::LN_10;
        }
    }
    (p1, p2, log_scale)
}

/// Cached Gauss-Hermite rule of the given order.
pub fn gauss_hermite(n: usize) -> Arc<GaussHermite> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&n) {
        return rule.clone();
    }
    let rule = Arc::new(GaussHermite::new(n));
    cache.lock().unwrap().insert(n, rule.clone());
    rule
}

/// Result of a bracketed one-dimensional maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub argmax: f64,
    pub value: f64,
    /// The maximizer sits on (or within tolerance of) a bracket endpoint.
    pub at_endpoint: bool,
}

/// Maximizes `f` over `[lo, hi]` (both positive) in log coordinates.
///
/// A coarse log scan picks the best cell, then golden-section search
/// refines it until the bracket is narrower than `rel_tol` in relative
/// terms.
pub fn maximize_log<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> Maximum {
    assert!(lo > 0.0 && hi > lo);
    const SCAN: usize = 96;
    let (ll, lh) = (lo.ln(), hi.ln());
    let at = |i: usize| (ll + (lh - ll) * i as f64 / SCAN as f64).exp();
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for i in 0..=SCAN {
        let v = f(at(i));
        if v > best_val {
            best_val = v;
            best = i;
        }
    }
    let mut a = at(best.saturating_sub(1)).ln();
    let mut b = at((best + 1).min(SCAN)).ln();
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c.exp());
    let mut fd = f(d.exp());
    let log_tol = rel_tol.ln_1p();
    while (b - a) > log_tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c.exp());
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d.exp());
        }
    }
    let mut x = (0.5 * (a + b)).exp();
    let mut v = f(x);
    for edge in [lo, hi] {
        let fe = f(edge);
        if fe >= v {
            x = edge;
            v = fe;
        }
    }
    let near = |e: f64| ((x / e).ln()).abs() <= 2.0 * log_tol;
    Maximum {
        argmax: x,
        value: v,
        at_endpoint: near(lo) || near(hi),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kahan_beats_naive_on_cancellation() {
        let xs = std::iter::once(1.0).chain(std::iter::repeat_n(1e-16, 10_000));
        let s: KahanSum = xs.collect();
        assert_relative_eq!(s.value(), 1.0 + 1e-12, max_relative = 1e-15);
    }

    #[test]
    fn bessel_known_values() {
        // e^{-8} I_0(8), e^{-1} I_1(1), e^{-32} I_5(32) from mpmath
        assert_relative_eq!(scaled_bessel_i(8.0)[0], 0.143_431_781_856_850_3, max_relative = 1e-13);
        assert_relative_eq!(
            scaled_bessel_i(1.0)[1],
            0.565_159_103_992_485 * (-1f64).exp(),
            max_relative = 1e-13
        );
        let w = scaled_bessel_i(32.0);
        assert_relative_eq!(w[5], 0.047_648_032_165_004_16, max_relative = 1e-11);
        assert_eq!(scaled_bessel_i(0.0), vec![1.0]);
    }

    #[test]
    fn gauss_hermite_moments() {
        let rule = GaussHermite::new(1);
        assert_eq!(rule.nodes, vec![0.0]);
        assert_relative_eq!(rule.weights[0], std::f64::consts::PI.sqrt(), max_relative = 1e-14);
        for n in [2usize, 7, 40, 200, 800, 3200] {
            let rule = GaussHermite::new(n);
            let total: f64 = rule.weights.iter().sum();
            assert_relative_eq!(total, std::f64::consts::PI.sqrt(), max_relative = 1e-12);
            assert!(rule.nodes.windows(2).all(|w| w[0] > w[1]));
            let var = rule.gaussian_expectation(2.5, |x| x * x);
            assert_relative_eq!(var, 2.5, max_relative = 1e-11);
        }
        let rule = GaussHermite::new(60);
        // E[cos X] = e^{-σ²/2}
        assert_relative_eq!(
            rule.gaussian_expectation(1.7, f64::cos),
            (-0.85f64).exp(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn golden_section_finds_interior_and_endpoint() {
        let a = 2.6e8;
        let m = maximize_log(|t| t * t * (-2.0 * a * t * t).exp(), 1e-6, 1e-3, 1e-4);
        assert_relative_eq!(m.argmax, 1.0 / (2.0 * a).sqrt(), max_relative = 1e-3);
        assert!(!m.at_endpoint);
        let m = maximize_log(|t| t * t, 1e-6, 1e-3, 1e-4);
        assert!(m.at_endpoint);
        assert_eq!(m.argmax, 1e-3);
    }
}
