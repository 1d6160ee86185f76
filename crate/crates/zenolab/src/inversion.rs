//! Exact survival dynamics from the resolvent: the spectral density of the
//! initial state, Fourier reconstruction of the amplitude, the pole/cut
//! decomposition and the three decay regimes.
//!
//! The transform `A(E) = i / (E - w0 - Sigma(E))` is inverted along a
//! horizontal path above the real axis. With no first-sheet poles the path
//! collapses onto the branch cut, and the discontinuity of `(E - w0 -
//! Sigma(E))^{-1}` across it (boundary values `Sigma(x +- i0) = Delta(x)
//! -+ i pi g^2(x)`) leaves a single real integral
//!
//! ```text
//! A(t) = int S(x) e^{-ixt} dx,
//! S(x) = g^2(x) / [ (x - w0 - Delta(x))^2 + (pi g^2(x))^2 ],
//! ```
//!
//! with `S` supported on the continuum and normalized to 1 (completeness of
//! the eigenbasis, `A(0) = 1`). `S` is the initial state's local density of
//! states: everything downstream (Zeno curvature, exponential era, power
//! tail) is a property of this one function.
//!
//! The pole channel `A_pole(t) = e^{-i(w0 + dw0)t - gamma t/2} / (1 -
//! Sigma_II'(E_pole))` is the residue of the second-sheet resonance; the cut
//! channel is computed as `A - A_pole`, which is exact given an exact `A`
//! and avoids a deformed-contour quadrature.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::resolvent::{boundary_values, find_pole, FormFactor, PoleSolution, Sheet, Support};

const NORMALIZATION_TOL: f64 = 1e-3;
const RECONSTRUCTION_TOL: f64 = 1e-6;
const MAX_PANELS: usize = 200_000;
/// Halvings applied to the outermost panels: integrable log structure at
/// the support edges.
const EDGE_REFINE_LEVELS: usize = 45;

/// The spectral density `S(x)` of the initial state for a given form factor
/// and level energy, with its measured normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    ff: FormFactor,
    omega0: f64,
    normalization: f64,
    /// Set when `|Sigma(w_g + i0)|` is not small against `w0 - w_g`: the
    /// no-first-sheet-pole assumption is then doubtful.
    edge_warning: bool,
}

impl SpectralDensity {
    pub fn form_factor(&self) -> &FormFactor {
        &self.ff
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// `int S` as measured by adaptive quadrature at construction.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn edge_warning(&self) -> bool {
        self.edge_warning
    }

    /// `Delta(x) = Re Sigma(x + i0)` on the support interior.
    pub fn delta(&self, x: f64) -> f64 {
        match &self.ff {
            FormFactor::FlatInterval { g0_sq, omega_g, omega_max } => {
                g0_sq * ((x - omega_g) / (omega_max - x)).ln()
            }
            FormFactor::ConstantLine { .. } => 0.0,
            FormFactor::Tabulated { omega, .. } => {
                tabulated_principal_value(&self.ff, omega, x)
            }
        }
    }

    /// `S(x)`; zero off the support interior.
    pub fn evaluate(&self, x: f64) -> f64 {
        match self.ff.support() {
            Support::Interval(a, b) => {
                if x <= a || x >= b {
                    return 0.0;
                }
            }
            Support::Line => {}
        }
        let g2 = self.ff.g_sq(x);
        if g2 == 0.0 {
            return 0.0;
        }
        let delta = self.delta(x);
        let centered = x - self.omega0 - delta;
        let width = std::f64::consts::PI * g2;
        g2 / (centered * centered + width * width)
    }
}

/// Fixed-rule principal value for the piecewise-linear density: within each
/// knot segment the subtracted integrand is smooth, so composite GL8 panels
/// are accurate without adaptivity (and without a failure path, which keeps
/// `S` evaluation infallible after construction).
fn tabulated_principal_value(ff: &FormFactor, knots: &[f64], x: f64) -> f64 {
    let gx = ff.g_sq(x);
    let (a, b) = (knots[0], *knots.last().unwrap());
    let mut edges: Vec<f64> = knots.to_vec();
    if x > a && x < b {
        edges.push(x);
        edges.sort_by(f64::total_cmp);
        edges.dedup();
    }
    const SUBDIV: usize = 8;
    let mut smooth = 0.0;
    for pair in edges.windows(2) {
        let width = (pair[1] - pair[0]) / SUBDIV as f64;
        for s in 0..SUBDIV {
            let lo = pair[0] + s as f64 * width;
            let center = lo + 0.5 * width;
            let half = 0.5 * width;
            for (&xi, &wi) in quad::GL8_NODES.iter().zip(quad::GL8_WEIGHTS.iter()) {
                let w = center + half * xi;
                let num = ff.g_sq(w) - gx;
                // the removable point never coincides with a GL node
                smooth += half * wi * num / (x - w);
            }
        }
    }
    smooth + gx * ((x - a) / (b - x)).ln()
}

/// Builds the spectral density and verifies its normalization against 1.
pub fn spectral_density(ff: &FormFactor, omega0: f64) -> Result<SpectralDensity> {
    ff.validate()?;
    if !omega0.is_finite() || !ff.strictly_inside_support(omega0) {
        return Err(Error::InvalidInput(format!(
            "omega0 = {omega0} must be embedded strictly inside the continuum support"
        )));
    }

    let edge_warning = match ff.support() {
        Support::Interval(a, _) => {
            let standoff = 1e-9 * (omega0 - a).abs().max(1.0);
            let sigma = crate::resolvent::self_energy(ff, C64::new(a, standoff), Sheet::First)?;
            sigma.value.norm() >= omega0 - a
        }
        Support::Line => false,
    };

    let mut density = SpectralDensity { ff: ff.clone(), omega0, normalization: 1.0, edge_warning };
    let normalization = match ff.support() {
        // exact Lorentzian: normalized by construction
        Support::Line => 1.0,
        Support::Interval(a, b) => {
            let width = (std::f64::consts::PI * ff.g_sq(omega0)).max(1e-6 * (b - a));
            let mut breaks = vec![a, b];
            for split in [omega0 - 10.0 * width, omega0 + 10.0 * width, omega0] {
                if split > a && split < b {
                    breaks.push(split);
                }
            }
            breaks.sort_by(f64::total_cmp);
            breaks.dedup();
            quad::adaptive_split(&|x| C64::new(density.evaluate(x), 0.0), &breaks, 1e-9)?.re
        }
    };
    if (normalization - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Consistency(format!(
            "spectral density normalization {normalization} deviates from 1 by more than \
             {NORMALIZATION_TOL}; a first-sheet pole or quadrature failure is likely"
        )));
    }
    density.normalization = normalization;
    Ok(density)
}

/// A time series of the survival amplitude, its probability, and (when a
/// decomposition was requested) the pole and cut channels.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalSeries {
    pub times: Vec<f64>,
    pub amplitude: Vec<C64>,
    pub probability: Vec<f64>,
    pub pole_part: Option<Vec<C64>>,
    pub cut_part: Option<Vec<C64>>,
}

impl SurvivalSeries {
    fn new(times: Vec<f64>, amplitude: Vec<C64>) -> Self {
        let probability = amplitude.iter().map(|a| a.norm_sqr()).collect();
        Self { times, amplitude, probability, pole_part: None, cut_part: None }
    }

    pub fn has_decomposition(&self) -> bool {
        self.pole_part.is_some() && self.cut_part.is_some()
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidInput("need at least one evaluation time".into()));
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidInput("times must be finite and >= 0".into()));
    }
    if times.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::InvalidInput("times must increase strictly".into()));
    }
    Ok(())
}

/// `A(t) = int S(x) e^{-ixt} dx` on a fixed node set whose panel width
/// resolves the fastest requested phase (at most a quarter period over
/// `pi/(4 t_max)`) as well as the resonance structure of `S`.
pub fn survival_from_spectrum(sd: &SpectralDensity, times: &[f64]) -> Result<SurvivalSeries> {
    check_times(times)?;
    let t_max = *times.last().expect("non-empty");

    let amplitude: Vec<C64> = match sd.ff.support() {
        Support::Line => {
            // exact Lorentzian: A(t) = e^{-i w0 t - gamma t / 2}
            let hwhm = std::f64::consts::PI * sd.ff.g_sq(0.0);
            times
                .iter()
                .map(|&t| (C64::new(-hwhm, -sd.omega0) * t).exp())
                .collect()
        }
        Support::Interval(a, b) => {
            let osc_width = if t_max > 0.0 {
                std::f64::consts::PI / (4.0 * t_max)
            } else {
                f64::INFINITY
            };
            let shape_width = (std::f64::consts::PI * sd.ff.g_sq(sd.omega0) / 8.0)
                .max(1e-9 * (b - a));
            let width = osc_width.min(shape_width).min((b - a) / 64.0);
            let knots = match &sd.ff {
                FormFactor::Tabulated { omega, .. } => omega.clone(),
                _ => Vec::new(),
            };
            let rule = quad::panel_nodes(a, b, width, EDGE_REFINE_LEVELS, MAX_PANELS, &knots)?;
            let weighted: Vec<(f64, f64)> = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&x, &w)| (x, w * sd.evaluate(x)))
                .collect();

            let a0: f64 = weighted.iter().map(|(_, ws)| ws).sum();
            if (a0 - 1.0).abs() > RECONSTRUCTION_TOL {
                return Err(Error::Consistency(format!(
                    "reconstructed A(0) = {a0} deviates from 1 beyond {RECONSTRUCTION_TOL}"
                )));
            }

            times
                .iter()
                .map(|&t| {
                    weighted
                        .iter()
                        .map(|&(x, ws)| C64::new(0.0, -x * t).exp() * ws)
                        .sum()
                })
                .collect()
        }
    };

    Ok(SurvivalSeries::new(times.to_vec(), amplitude))
}

/// Splits the amplitude into its resonance-pole channel and the remainder
/// (the branch-cut channel). The pole must belong to the same
/// `(form factor, omega0)` pair as the density.
pub fn decompose(
    sd: &SpectralDensity,
    pole: &PoleSolution,
    times: &[f64],
) -> Result<SurvivalSeries> {
    if pole.form_factor != sd.ff || pole.omega0 != sd.omega0 {
        return Err(Error::InvalidInput(
            "pole solution and spectral density belong to different models".into(),
        ));
    }
    let mut series = survival_from_spectrum(sd, times)?;
    let residue = (C64::new(1.0, 0.0) - pole.sigma_prime).finv();
    let pole_part: Vec<C64> = series
        .times
        .iter()
        .map(|&t| residue * (C64::new(0.0, -t) * pole.e_pole).exp())
        .collect();
    let cut_part: Vec<C64> =
        series.amplitude.iter().zip(&pole_part).map(|(a, p)| a - p).collect();
    series.pole_part = Some(pole_part);
    series.cut_part = Some(cut_part);
    Ok(series)
}

/// One fitted window of a regime fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub rms_residual: f64,
}

/// The three decay regimes extracted from one survival series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeFit {
    /// `c` in `1 - p ~ c t^2`; the implied Zeno time is `c^{-1/2}`.
    pub zeno_coefficient: f64,
    pub tau_z_implied: f64,
    /// Slope of the exponential era, `p ~ Z exp(-gamma t)`.
    pub exp_rate: f64,
    pub exp_intercept_z: f64,
    /// Log-log slope of the power tail.
    pub power_exponent: f64,
    /// `(end of the quadratic era, onset of cut dominance)`.
    pub crossover_times: (f64, f64),
    pub zeno_window: FitWindow,
    pub exponential_window: FitWindow,
    pub power_window: FitWindow,
}

/// Fits the quadratic, exponential and power-law eras of a decomposed
/// survival series.
///
/// Windows are selected from the data: the quadratic fit uses `t <= 0.1
/// tau_z` (with `tau_z` bootstrapped from the earliest samples), the
/// exponential fit uses the pole-dominated region `|cut|/|pole| < 0.05`
/// past the quadratic era, and the power fit uses the cut-dominated tail.
/// The tail is fitted through per-bin maxima: the two support edges beat
/// against each other, and for a symmetric level the interference nulls
/// would otherwise dominate a pointwise fit.
pub fn fit_regimes(series: &SurvivalSeries) -> Result<RegimeFit> {
    let (pole_part, cut_part) = match (&series.pole_part, &series.cut_part) {
        (Some(p), Some(c)) => (p, c),
        _ => {
            return Err(Error::Window(
                "regime fitting needs a decomposed series (pole and cut channels)".into(),
            ))
        }
    };
    let n = series.times.len();
    if n < 16 {
        return Err(Error::Window("series too short for regime fitting".into()));
    }

    // --- quadratic era -----------------------------------------------------
    let first = series
        .times
        .iter()
        .zip(&series.probability)
        .find(|&(&t, &p)| t > 0.0 && p < 1.0)
        .ok_or_else(|| Error::Window("no early-time samples for the quadratic era".into()))?;
    let tau_est = ((1.0 - first.1) / (first.0 * first.0)).powf(-0.5);

    let zeno_pts: Vec<(f64, f64)> = series
        .times
        .iter()
        .zip(&series.probability)
        .filter(|&(&t, _)| t > 0.0 && t <= 0.1 * tau_est)
        .map(|(&t, &p)| (t, 1.0 - p))
        .collect();
    if zeno_pts.len() < 3 {
        return Err(Error::Window(format!(
            "quadratic era not covered: need several samples at t <= {:.3e}",
            0.1 * tau_est
        )));
    }
    let num: f64 = zeno_pts.iter().map(|(t, y)| y * t * t).sum();
    let den: f64 = zeno_pts.iter().map(|(t, _)| t.powi(4)).sum();
    let zeno_coefficient = num / den;
    let tau_z = zeno_coefficient.powf(-0.5);
    let zeno_rms = rms(zeno_pts.iter().map(|(t, y)| y - zeno_coefficient * t * t));
    let zeno_window = FitWindow {
        t_min: zeno_pts[0].0,
        t_max: zeno_pts[zeno_pts.len() - 1].0,
        points: zeno_pts.len(),
        rms_residual: zeno_rms,
    };

    // --- exponential era ---------------------------------------------------
    // pole-dominated and disjoint from the quadratic window
    let exp_pts: Vec<(f64, f64)> = series
        .times
        .iter()
        .enumerate()
        .filter(|&(i, &t)| {
            t >= 2.0 * tau_z
                && series.probability[i] > 0.0
                && pole_part[i].norm() > 0.0
                && cut_part[i].norm() < 0.05 * pole_part[i].norm()
        })
        .map(|(i, &t)| (t, series.probability[i].ln()))
        .collect();
    if exp_pts.len() < 8 {
        return Err(Error::Window(
            "exponential era not resolved: no window past the quadratic era has \
             |cut| / |pole| < 0.05"
                .into(),
        ));
    }
    let (slope, intercept) = linear_fit(&exp_pts);
    let exp_rate = -slope;
    let exp_intercept_z = intercept.exp();
    let exp_rms = rms(exp_pts.iter().map(|(t, y)| y - (intercept + slope * t)));
    let exponential_window = FitWindow {
        t_min: exp_pts[0].0,
        t_max: exp_pts[exp_pts.len() - 1].0,
        points: exp_pts.len(),
        rms_residual: exp_rms,
    };

    // --- power-law tail ----------------------------------------------------
    let t_cross = series
        .times
        .iter()
        .enumerate()
        .find(|&(i, _)| cut_part[i].norm() >= pole_part[i].norm() && series.times[i] > 0.0)
        .map(|(_, &t)| t)
        .ok_or_else(|| {
            Error::Window("power-law era not covered: the cut channel never dominates".into())
        })?;
    let tail_start = 1.3 * t_cross;
    let tail: Vec<(f64, f64)> = series
        .times
        .iter()
        .zip(&series.probability)
        .filter(|&(&t, &p)| t >= tail_start && p > 0.0)
        .map(|(&t, &p)| (t, p))
        .collect();
    let t_end = tail.last().map(|&(t, _)| t).unwrap_or(0.0);
    if tail.len() < 30 || t_end < 2.5 * tail_start {
        return Err(Error::Window(format!(
            "power-law era not covered: need a tail spanning t in [{tail_start:.1}, \
             {:.1}] or beyond",
            2.5 * tail_start
        )));
    }
    // per-bin maxima across the edge-beat oscillation
    let bins = 40usize;
    let bin_width = (t_end - tail_start) / bins as f64;
    let mut envelope: Vec<(f64, f64)> = Vec::with_capacity(bins);
    for bin in 0..bins {
        let lo = tail_start + bin as f64 * bin_width;
        let hi = lo + bin_width;
        if let Some(&(t, p)) = tail
            .iter()
            .filter(|&&(t, _)| t >= lo && t < hi)
            .max_by(|x, y| x.1.total_cmp(&y.1))
        {
            envelope.push((t.ln(), p.ln()));
        }
    }
    if envelope.len() < 6 {
        return Err(Error::Window("power-law era too sparse for an envelope fit".into()));
    }
    let (power_exponent, pw_intercept) = linear_fit(&envelope);
    let pw_rms = rms(envelope.iter().map(|(x, y)| y - (pw_intercept + power_exponent * x)));
    let power_window = FitWindow {
        t_min: tail_start,
        t_max: t_end,
        points: envelope.len(),
        rms_residual: pw_rms,
    };

    Ok(RegimeFit {
        zeno_coefficient,
        tau_z_implied: tau_z,
        exp_rate,
        exp_intercept_z,
        power_exponent,
        crossover_times: (0.1 * tau_z, t_cross),
        zeno_window,
        exponential_window,
        power_window,
    })
}

/// `|p_exact(t) - Z e^{-gamma t}|`: the pointwise error of the purely
/// exponential approximation. At `t = 0` this is `|1 - Z|`.
pub fn weisskopf_wigner_error(
    sd: &SpectralDensity,
    pole: &PoleSolution,
    times: &[f64],
) -> Result<Vec<f64>> {
    if pole.form_factor != sd.ff || pole.omega0 != sd.omega0 {
        return Err(Error::InvalidInput(
            "pole solution and spectral density belong to different models".into(),
        ));
    }
    let series = survival_from_spectrum(sd, times)?;
    Ok(series
        .times
        .iter()
        .zip(&series.probability)
        .map(|(&t, &p)| (p - pole.z * (-pole.gamma * t).exp()).abs())
        .collect())
}

fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|(x, _)| x).sum();
    let sy: f64 = pts.iter().map(|(_, y)| y).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

fn rms(residuals: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for r in residuals {
        sum += r * r;
        count += 1;
    }
    if count == 0 {
        0.0
    } else {
        (sum / count as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn flat_reference() -> FormFactor {
        FormFactor::flat_interval(0.01, 0.0, 1.0).unwrap()
    }

    #[test]
    fn normalization_of_the_flat_reference() {
        let sd = spectral_density(&flat_reference(), 0.5).unwrap();
        assert_abs_diff_eq!(sd.normalization(), 1.0, epsilon = 1e-6);
        assert!(!sd.edge_warning());
    }

    #[test]
    fn rejects_levels_outside_the_continuum() {
        assert!(spectral_density(&flat_reference(), 1.5).is_err());
        assert!(spectral_density(&flat_reference(), 0.0).is_err());
    }

    #[test]
    fn density_peaks_at_the_shifted_level() {
        let sd = spectral_density(&flat_reference(), 0.5).unwrap();
        // scan for the peak; symmetric model peaks at omega0 itself
        let mut best = (0.0, 0.0);
        for k in 1..2000 {
            let x = k as f64 / 2000.0;
            let s = sd.evaluate(x);
            if s > best.1 {
                best = (x, s);
            }
        }
        assert_abs_diff_eq!(best.0, 0.5, epsilon = 1e-3);
        // peak height ~ 1 / (pi^2 g^2)
        assert_relative_eq!(
            best.1,
            1.0 / (std::f64::consts::PI.powi(2) * 0.01),
            max_relative = 1e-3
        );
    }

    #[test]
    fn narrow_coupling_concentrates_the_mass() {
        let ff = FormFactor::flat_interval(1e-4, 0.0, 1.0).unwrap();
        let sd = spectral_density(&ff, 0.5).unwrap();
        let gamma = 2.0 * std::f64::consts::PI * 1e-4;
        let mass = quad::adaptive_real(
            &|x| sd.evaluate(x),
            0.5 - 10.0 * gamma,
            0.5 + 10.0 * gamma,
            1e-9,
        )
        .unwrap();
        // a Lorentzian holds ~0.937 of its mass within +-10 half-widths
        assert!(mass >= 0.9, "mass {mass}");
    }

    #[test]
    fn constant_line_is_exactly_exponential() {
        let ff = FormFactor::constant_line(0.8).unwrap();
        let sd = spectral_density(&ff, 0.3).unwrap();
        assert_abs_diff_eq!(sd.normalization(), 1.0);
        let times = [0.0, 0.5, 1.0, 2.0, 5.0];
        let series = survival_from_spectrum(&sd, &times).unwrap();
        for (&t, &p) in times.iter().zip(&series.probability) {
            assert_relative_eq!(p, (-0.8 * t).exp(), max_relative = 1e-12);
        }
    }

    #[test]
    fn reconstruction_is_normalized_at_zero() {
        let sd = spectral_density(&flat_reference(), 0.5).unwrap();
        let series = survival_from_spectrum(&sd, &[0.0, 0.5]).unwrap();
        assert_abs_diff_eq!(series.amplitude[0].re, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(series.amplitude[0].im, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(series.probability[0], 1.0, epsilon = 2e-6);
    }

    #[test]
    fn short_time_curvature_matches_the_continuum_zeno_time() {
        let sd = spectral_density(&flat_reference(), 0.5).unwrap();
        // tau_z = 10; probe at t = 0.05 tau_z
        let t = 0.5;
        let series = survival_from_spectrum(&sd, &[t]).unwrap();
        let curvature = (1.0 - series.probability[0]) / (t * t);
        assert_relative_eq!(curvature, 0.01, max_relative = 0.02);
    }

    #[test]
    fn decomposition_identity_and_pole_weight() {
        let ff = flat_reference();
        let sd = spectral_density(&ff, 0.5).unwrap();
        let pole = find_pole(&ff, 0.5).unwrap();
        let times: Vec<f64> = (0..200).map(|k| 0.5 * k as f64).collect();
        let series = decompose(&sd, &pole, &times).unwrap();
        let pole_part = series.pole_part.as_ref().unwrap();
        let cut_part = series.cut_part.as_ref().unwrap();
        // amplitude = pole + cut by construction
        for i in 0..times.len() {
            assert!((series.amplitude[i] - pole_part[i] - cut_part[i]).norm() < 1e-12);
        }
        // |pole(0)|^2 = Z
        assert_abs_diff_eq!(pole_part[0].norm_sqr(), pole.z, epsilon = 1e-6);
    }

    #[test]
    fn decompose_rejects_mismatched_models() {
        let sd = spectral_density(&flat_reference(), 0.5).unwrap();
        let other = FormFactor::flat_interval(0.02, 0.0, 1.0).unwrap();
        let pole = find_pole(&other, 0.5).unwrap();
        assert!(matches!(
            decompose(&sd, &pole, &[0.0, 1.0]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn ww_error_at_zero_is_one_minus_z() {
        let ff = flat_reference();
        let sd = spectral_density(&ff, 0.5).unwrap();
        let pole = find_pole(&ff, 0.5).unwrap();
        let err = weisskopf_wigner_error(&sd, &pole, &[0.0]).unwrap();
        assert_abs_diff_eq!(err[0], (1.0 - pole.z).abs(), epsilon = 1e-5);
    }

    #[test]
    fn fit_regimes_requires_decomposition() {
        let sd = spectral_density(&flat_reference(), 0.5).unwrap();
        let times: Vec<f64> = (1..100).map(|k| 0.1 * k as f64).collect();
        let series = survival_from_spectrum(&sd, &times).unwrap();
        assert!(matches!(fit_regimes(&series), Err(Error::Window(_))));
    }

    #[test]
    fn time_grid_validation() {
        let sd = spectral_density(&flat_reference(), 0.5).unwrap();
        assert!(survival_from_spectrum(&sd, &[]).is_err());
        assert!(survival_from_spectrum(&sd, &[-1.0, 0.0]).is_err());
        assert!(survival_from_spectrum(&sd, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn huge_horizons_hit_the_panel_cap() {
        let sd = spectral_density(&flat_reference(), 0.5).unwrap();
        assert!(matches!(
            survival_from_spectrum(&sd, &[0.0, 1e9]),
            Err(Error::Resolution(_))
        ));
    }
}
