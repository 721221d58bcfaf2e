//! Small numerical kernels shared by the other modules: deterministic
//! summation, Gauss–Legendre rules, adaptive quadrature and bracketed
//! bisection.

use std::sync::OnceLock;

/// Pairwise (cascade) summation. The result depends only on the order of
/// `xs`, never on how the caller produced them.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if xs.len() <= BLOCK {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Pairwise sum of `f(i)` for `i in 0..n` without an intermediate
/// allocation for short inputs.
pub fn pairwise_sum_by<F: Fn(usize) -> f64>(n: usize, f: F) -> f64 {
    fn rec<F: Fn(usize) -> f64>(lo: usize, hi: usize, f: &F) -> f64 {
        if hi - lo <= 16 {
            let mut s = 0.0;
            for i in lo..hi {
                s += f(i);
            }
            return s;
        }
        let mid = lo + (hi - lo) / 2;
        rec(lo, mid, f) + rec(mid, hi, f)
    }
    rec(0, n, &f)
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl8() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(8))
}

/// Nodes/weights of the 4-point rule; used where the integrand is smooth on
/// short geometric cells.
pub fn gl4() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(4))
}

fn gl_fixed<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (x, w) = gl8();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        s += wi * f(c + h * xi);
    }
    s * h
}

/// Adaptive Gauss–Legendre quadrature: an interval is accepted when the
/// 8-point rule agrees with the sum over its two halves to `rel_tol`
/// relative to the running magnitude of the integral.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let whole = gl_fixed(&f, a, b);
    let scale = whole.abs().max(f64::MIN_POSITIVE);
    adapt(&f, a, b, whole, rel_tol, scale, 0)
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, scale: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = gl_fixed(f, a, m);
    let right = gl_fixed(f, m, b);
    let sum = left + right;
    if depth >= 40 || (sum - whole).abs() <= tol * scale.max(sum.abs()) {
        return sum;
    }
    adapt(f, a, m, left, tol, scale, depth + 1) + adapt(f, m, b, right, tol, scale, depth + 1)
}

/// Bisection for the boundary of a monotone predicate: `pred(lo)` is false,
/// `pred(hi)` is true; returns the smallest `x` (to relative tolerance) with
/// `pred(x)` true.
pub fn bisect_predicate<P: Fn(f64) -> bool>(mut lo: f64, mut hi: f64, rel_tol: f64, pred: P) -> f64 {
    for _ in 0..400 {
        if hi - lo <= rel_tol * hi.abs() {
            break;
        }
        // geometric midpoint when the bracket spans decades
        let mid = if lo > 0.0 && hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Relative difference `|a-b| / max(|a|,|b|)`, zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rules_integrate_polynomials_exactly() {
        for n in 1..=10 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let approx: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((approx - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn adaptive_handles_log_singularity() {
        // ∫_0^1 -ln x dx = 1
        let v = integrate_adaptive(|x: f64| -x.ln(), 1e-300, 1.0, 1e-12);
        assert!((v - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64 * 0.5).collect();
        assert_eq!(pairwise_sum(&xs), 2475.0);
        assert_eq!(pairwise_sum_by(100, |i| xs[i]), 2475.0);
    }

    #[test]
    fn bisection_finds_threshold() {
        let r = bisect_predicate(0.0, 10.0, 1e-12, |x| x * x >= 2.0);
        assert!((r - 2f64.sqrt()).abs() < 1e-10);
    }
}
