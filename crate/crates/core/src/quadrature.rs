//! Numerical integration used by the oracle and the bound evaluators.
//!
//! Adaptive Simpson handles the smooth integrands on finite intervals. Long
//! intervals are first cut into panels of at most [`PANEL_WIDTH`] so the
//! initial Simpson estimate cannot miss a localized feature. Gauss-Legendre
//! is kept for integrands that must not be evaluated at the endpoints.

/// Panel length used before adaptive refinement.
pub const PANEL_WIDTH: f64 = 0.5;

const MAX_DEPTH: u32 = 48;

#[inline]
fn simpson(fa: f64, fm: f64, fb: f64, width: f64) -> f64 {
    width / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
///
/// `a > b` is allowed and flips the sign, as for an oriented integral.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if a > b {
        return -adaptive_simpson(f, b, a, tol);
    }
    let len = b - a;
    let panels = (len / PANEL_WIDTH).ceil().max(1.0) as usize;
    let step = len / panels as f64;
    let panel_tol = tol / panels as f64;
    let mut total = 0.0;
    let mut lo = a;
    let mut flo = f(lo);
    for i in 0..panels {
        let hi = if i + 1 == panels { b } else { a + step * (i + 1) as f64 };
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        let fhi = f(hi);
        let whole = simpson(flo, fmid, fhi, hi - lo);
        total += refine(&f, lo, hi, flo, fmid, fhi, whole, panel_tol, MAX_DEPTH);
        lo = hi;
        flo = fhi;
    }
    total
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1, "Gauss-Legendre needs at least one node");
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-like initial guess, refined by Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let (pn, pn1) = if n == 1 { (x, 1.0) } else { (p1, p0) };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    rule
}

/// Composite Gauss-Legendre over `[a, b]` with `panels` equal panels of an
/// `order`-point rule. Never evaluates `f` at `a` or `b`.
pub fn gauss_legendre_composite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    order: usize,
    panels: usize,
) -> f64 {
    let rule = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let lo = a + h * p as f64;
            let c = lo + 0.5 * h;
            rule.iter()
                .map(|&(x, w)| w * f(c + 0.5 * h * x))
                .sum::<f64>()
                * 0.5
                * h
        })
        .sum()
}
