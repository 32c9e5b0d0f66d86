//! Gauss–Legendre panels and a bisecting adaptive integrator.

use std::sync::OnceLock;

use num_complex::Complex64;

/// Points per panel.
pub const GL_POINTS: usize = 16;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_POINTS))
}

/// Nodes and weights of `panels` equal Gauss–Legendre panels on `[a, b]`.
pub fn composite_nodes(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let (x, w) = rule();
    let width = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * GL_POINTS);
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let mid = lo + width / 2.0;
        for (xi, wi) in x.iter().zip(w) {
            out.push((mid + width / 2.0 * xi, width / 2.0 * wi));
        }
    }
    out
}

pub fn panel(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> Complex64 {
    let (x, w) = rule();
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    let mut s = Complex64::new(0.0, 0.0);
    for (xi, wi) in x.iter().zip(w) {
        s += f(mid + half * xi) * *wi;
    }
    s * half
}

/// `∫_a^b f` by bisection until each panel agrees with its two halves to
/// within its share of `tol`; returns the value and the summed disagreement.
pub fn adaptive(f: &impl Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> (Complex64, f64) {
    fn go(f: &impl Fn(f64) -> Complex64, a: f64, b: f64, whole: Complex64, tol: f64, depth: u32) -> (Complex64, f64) {
        let m = (a + b) / 2.0;
        let left = panel(f, a, m);
        let right = panel(f, m, b);
        let err = (left + right - whole).norm();
        if err <= tol || depth >= 48 || (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
            return (left + right, err);
        }
        let (l, el) = go(f, a, m, left, tol / 2.0, depth + 1);
        let (r, er) = go(f, m, b, right, tol / 2.0, depth + 1);
        (l + r, el + er)
    }
    if a == b {
        return (Complex64::new(0.0, 0.0), 0.0);
    }
    go(f, a, b, panel(f, a, b), tol, 0)
}

pub fn adaptive_real(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (v, e) = adaptive(&|t| Complex64::new(f(t), 0.0), a, b, tol);
    (v.re, e)
}

/// Adaptive integral over consecutive breakpoints.
pub fn adaptive_pieces(f: &impl Fn(f64) -> Complex64, breaks: &[f64], tol: f64) -> (Complex64, f64) {
    let pieces = breaks.len().saturating_sub(1).max(1) as f64;
    breaks.windows(2).fold((Complex64::new(0.0, 0.0), 0.0), |(v, e), w| {
        let (pv, pe) = adaptive(f, w[0], w[1], tol / pieces);
        (v + pv, e + pe)
    })
}
