//! Adaptive Simpson quadrature for complex-valued integrands on a real interval.

use num_complex::Complex64 as C64;

const MAX_DEPTH: u32 = 48;
const INITIAL_PANELS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: C64,
    /// Sum of the local Richardson error estimates.
    pub error_estimate: f64,
    pub evaluations: usize,
    /// True when some panel hit the depth limit without meeting its tolerance.
    pub depth_limited: bool,
}

struct Panel {
    a: f64,
    fa: C64,
    m: f64,
    fm: C64,
    b: f64,
    fb: C64,
    whole: C64,
}

fn simpson(a: f64, fa: C64, fm: C64, b: f64, fb: C64) -> C64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Integrates `f` over `[a, b]` to a relative tolerance `rel_tol`.
///
/// The interval is first split into a fixed number of panels so that narrow
/// features are not missed by the first Simpson estimate; each panel is then
/// refined recursively until `|S_left + S_right - S_whole| <= 15 eps`.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Quadrature
where
    F: Fn(f64) -> C64,
{
    let mut evaluations = 0usize;
    let mut eval = |x: f64| {
        evaluations += 1;
        f(x)
    };

    let width = (b - a) / INITIAL_PANELS as f64;
    let mut panels = Vec::with_capacity(INITIAL_PANELS);
    let mut left = a;
    let mut f_left = eval(a);
    let mut coarse = C64::new(0.0, 0.0);
    let mut coarse_abs = 0.0;
    for i in 1..=INITIAL_PANELS {
        let right = if i == INITIAL_PANELS {
            b
        } else {
            a + i as f64 * width
        };
        let m = 0.5 * (left + right);
        let fm = eval(m);
        let f_right = eval(right);
        let whole = simpson(left, f_left, fm, right, f_right);
        coarse += whole;
        coarse_abs += (right - left) / 6.0 * (f_left.norm() + 4.0 * fm.norm() + f_right.norm());
        panels.push(Panel {
            a: left,
            fa: f_left,
            m,
            fm,
            b: right,
            fb: f_right,
            whole,
        });
        left = right;
        f_left = f_right;
    }

    // Scale the tolerance by the integral of |f| so that cancelling integrands
    // (odd moments) still get an absolute floor.
    let eps_total = rel_tol * coarse.norm().max(coarse_abs * 1e-3).max(f64::MIN_POSITIVE);
    let eps_panel = eps_total / INITIAL_PANELS as f64;

    let mut value = C64::new(0.0, 0.0);
    let mut error_estimate = 0.0;
    let mut depth_limited = false;
    for p in panels {
        let (v, e) = refine(&mut eval, p, eps_panel, 0, &mut depth_limited);
        value += v;
        error_estimate += e;
    }

    Quadrature {
        value,
        error_estimate,
        evaluations,
        depth_limited,
    }
}

fn refine<F>(f: &mut F, p: Panel, eps: f64, depth: u32, depth_limited: &mut bool) -> (C64, f64)
where
    F: FnMut(f64) -> C64,
{
    let lm = 0.5 * (p.a + p.m);
    let rm = 0.5 * (p.m + p.b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(p.a, p.fa, flm, p.m, p.fm);
    let right = simpson(p.m, p.fm, frm, p.b, p.fb);
    let delta = left + right - p.whole;
    if delta.norm() <= 15.0 * eps {
        return (left + right + delta / 15.0, delta.norm() / 15.0);
    }
    if depth >= MAX_DEPTH {
        *depth_limited = true;
        return (left + right + delta / 15.0, delta.norm() / 15.0);
    }
    let (lv, le) = refine(
        f,
        Panel {
            a: p.a,
            fa: p.fa,
            m: lm,
            fm: flm,
            b: p.m,
            fb: p.fm,
            whole: left,
        },
        0.5 * eps,
        depth + 1,
        depth_limited,
    );
    let (rv, re) = refine(
        f,
        Panel {
            a: p.m,
            fa: p.fm,
            m: rm,
            fm: frm,
            b: p.b,
            fb: p.fb,
            whole: right,
        },
        0.5 * eps,
        depth + 1,
        depth_limited,
    );
    (lv + rv, le + re)
}
