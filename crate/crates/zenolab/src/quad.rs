//! Quadrature engines shared by the spectral modules: adaptive
//! Gauss-Kronrod integration, principal values by singularity subtraction,
//! and fixed Gauss-Legendre panel rules for oscillatory transforms.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

// 15-point Kronrod abscissae (positive half) and weights, with the embedded
// 7-point Gauss weights. Standard QUADPACK values.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

// 8-point Gauss-Legendre rule on [-1, 1].
pub(crate) const GL8_NODES: [f64; 8] = [
    -0.9602898564975363,
    -0.7966664774136267,
    -0.5255324099163290,
    -0.1834346424956498,
    0.1834346424956498,
    0.5255324099163290,
    0.7966664774136267,
    0.9602898564975363,
];
pub(crate) const GL8_WEIGHTS: [f64; 8] = [
    0.1012285362903763,
    0.2223810344533745,
    0.3137066458778873,
    0.3626837833783620,
    0.3626837833783620,
    0.3137066458778873,
    0.2223810344533745,
    0.1012285362903763,
];

/// One Gauss-Kronrod 15/7 pass over `[a, b]`: returns (value, error estimate).
fn gk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];
    for (j, &x) in XGK.iter().take(7).enumerate() {
        let dx = half * x;
        let sum = f(center - dx) + f(center + dx);
        kronrod += sum * WGK[j];
        if j % 2 == 1 {
            gauss += sum * WG[j / 2];
        }
    }
    let value = kronrod * half;
    // |K - G| over the panel: a conservative bound for the Kronrod error
    let err = ((kronrod - gauss) * half).norm();
    (value, err)
}

/// Adaptive complex-valued integration over `[a, b]` to an absolute
/// tolerance. Bisects the worst panel until the summed error estimate is
/// below `abs_tol`; fails with the achieved estimate if the panel budget
/// runs out.
pub fn adaptive<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, abs_tol: f64) -> Result<C64> {
    adaptive_split(f, &[a, b], abs_tol)
}

/// Adaptive integration with mandatory panel boundaries (support endpoints,
/// tabulation knots, singularity locations).
pub fn adaptive_split<F: Fn(f64) -> C64>(
    f: &F,
    breakpoints: &[f64],
    abs_tol: f64,
) -> Result<C64> {
    const MAX_PANELS: usize = 100_000;
    if breakpoints.len() < 2 {
        return Err(Error::InvalidInput("need at least two panel boundaries".into()));
    }
    for pair in breakpoints.windows(2) {
        if !(pair[0] < pair[1]) {
            return Err(Error::InvalidInput("panel boundaries must increase strictly".into()));
        }
    }

    struct Panel {
        a: f64,
        b: f64,
        value: C64,
        err: f64,
    }
    let mut panels: Vec<Panel> = breakpoints
        .windows(2)
        .map(|p| {
            let (value, err) = gk15(f, p[0], p[1]);
            Panel { a: p[0], b: p[1], value, err }
        })
        .collect();

    loop {
        let total_err: f64 = panels.iter().map(|p| p.err).sum();
        if total_err <= abs_tol {
            return Ok(panels.iter().map(|p| p.value).sum());
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::NumericFailure {
                message: "adaptive quadrature exceeded its panel budget".into(),
                residual: total_err,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .expect("non-empty panel list");
        let Panel { a, b, .. } = panels[worst];
        let mid = 0.5 * (a + b);
        if !(a < mid && mid < b) {
            // interval exhausted at floating-point resolution
            return Err(Error::NumericFailure {
                message: "adaptive quadrature stalled on a point-like panel".into(),
                residual: total_err,
            });
        }
        let (v1, e1) = gk15(f, a, mid);
        let (v2, e2) = gk15(f, mid, b);
        panels[worst] = Panel { a, b: mid, value: v1, err: e1 };
        panels.push(Panel { a: mid, b, value: v2, err: e2 });
    }
}

/// Real-valued adaptive integration.
pub fn adaptive_real<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    Ok(adaptive(&|x| C64::new(f(x), 0.0), a, b, abs_tol)?.re)
}

/// Principal value `P int_a^b g(w) / (x - w) dw` for `a < x < b` by
/// singularity subtraction:
///
/// ```text
/// P int g(w)/(x-w) dw = int (g(w) - g(x))/(x - w) dw + g(x) ln((x-a)/(b-x))
/// ```
///
/// The subtracted integrand is bounded for differentiable `g`, so ordinary
/// adaptive panels apply; `extra_breakpoints` lets callers pin tabulation
/// knots.
pub fn principal_value<F: Fn(f64) -> f64>(
    g: &F,
    a: f64,
    b: f64,
    x: f64,
    extra_breakpoints: &[f64],
    abs_tol: f64,
) -> Result<f64> {
    if !(a < x && x < b) {
        return Err(Error::InvalidInput(format!(
            "principal value point x = {x} must lie strictly inside ({a}, {b})"
        )));
    }
    let gx = g(x);
    let mut breaks: Vec<f64> = vec![a, x, b];
    breaks.extend(extra_breakpoints.iter().copied().filter(|&p| p > a && p < b));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let smooth = adaptive_split(&|w| C64::new((g(w) - gx) / (x - w), 0.0), &breaks, abs_tol)?;
    Ok(smooth.re + gx * ((x - a) / (b - x)).ln())
}

/// A fixed set of quadrature nodes assembled from Gauss-Legendre panels.
#[derive(Debug, Clone)]
pub struct PanelNodes {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub panel_count: usize,
}

/// Uniform panels of width at most `max_width` over `[a, b]`, with the two
/// outermost panels subdivided geometrically (`refine_levels` halvings) so
/// integrands with endpoint log structure are resolved. Interior
/// `breakpoints` (tabulation knots) become mandatory panel edges.
pub fn panel_nodes(
    a: f64,
    b: f64,
    max_width: f64,
    refine_levels: usize,
    max_panels: usize,
    breakpoints: &[f64],
) -> Result<PanelNodes> {
    if !(a < b) || !max_width.is_finite() || max_width <= 0.0 {
        return Err(Error::InvalidInput("invalid panel specification".into()));
    }
    let base = ((b - a) / max_width).ceil() as usize;
    let base = base.max(2);
    if base + 2 * refine_levels + breakpoints.len() > max_panels {
        return Err(Error::Resolution(format!(
            "panel count {} exceeds the cap {max_panels}; use the asymptotic regime fitter \
             for longer times",
            base + 2 * refine_levels + breakpoints.len()
        )));
    }
    let width = (b - a) / base as f64;

    let mut edges = Vec::with_capacity(base + 2 * refine_levels + breakpoints.len() + 1);
    edges.push(a);
    // geometric refinement of the first panel toward a
    for k in (1..=refine_levels).rev() {
        edges.push(a + width * 0.5_f64.powi(k as i32));
    }
    for j in 1..base {
        edges.push(a + width * j as f64);
    }
    // geometric refinement of the last panel toward b
    for k in 1..=refine_levels {
        edges.push(b - width * 0.5_f64.powi(k as i32));
    }
    edges.push(b);
    edges.extend(breakpoints.iter().copied().filter(|&p| p > a && p < b));
    edges.sort_by(f64::total_cmp);
    edges.dedup();

    let mut nodes = Vec::with_capacity(8 * (edges.len() - 1));
    let mut weights = Vec::with_capacity(nodes.capacity());
    for pair in edges.windows(2) {
        let center = 0.5 * (pair[0] + pair[1]);
        let half = 0.5 * (pair[1] - pair[0]);
        if half <= 0.0 {
            continue;
        }
        for (&x, &w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
            nodes.push(center + half * x);
            weights.push(half * w);
        }
    }
    Ok(PanelNodes { nodes, weights, panel_count: edges.len() - 1 })
}
