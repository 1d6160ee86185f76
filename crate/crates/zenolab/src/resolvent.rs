//! Form factors, self-energy functions, analytic continuation to the second
//! Riemann sheet, and resonance-pole analysis.
//!
//! The self-energy of a discrete level coupled to a continuum with coupling
//! density `g^2(w)` is
//!
//! ```text
//! Sigma(E) = int g^2(w) / (E - w) dw,
//! ```
//!
//! analytic off the support of `g^2` with a branch cut along it. On the cut
//! the boundary values are `Sigma(x +- i0) = P int g^2/(x-w) dw -+ i pi g^2(x)`,
//! so the discontinuity is `-2 pi i g^2(x)`. Continuing *downward through*
//! the cut (where resonance poles live) therefore gives the second-sheet
//! determination
//!
//! ```text
//! Sigma_II(E) = Sigma(E) - 2 pi i g^2(E),
//! ```
//!
//! which requires `g^2` to make sense at complex argument: closed form for
//! the flat and constant densities, refused for tabulated data.
//!
//! The resonance pole solves `E - w0 - Sigma_II(E) = 0` just below the cut;
//! its real shift, width `gamma = -2 Im E_pole`, and residue weight
//! `Z = |1 - Sigma_II'(E_pole)|^{-2}` drive the exponential decay era. At
//! second order in the coupling the width reduces to the golden-rule value
//! `2 pi g^2(w0)`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

const PV_ABS_TOL: f64 = 1e-11;
const POLE_RESIDUAL_TARGET: f64 = 1e-10;
const POLE_MAX_ITERATIONS: u32 = 200;

/// Coupling density `g^2(w)` between the discrete level and the continuum.
///
/// The JSON form tags the variant: `{"kind": "flat_interval", "g0_sq": 0.01,
/// "omega_g": 0.0, "omega_max": 1.0}`, `{"kind": "constant_line", "gamma": 1.0}`,
/// `{"kind": "tabulated", "omega": [...], "g_sq": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FormFactor {
    /// `g^2 = g0^2` on `[omega_g, omega_max]`, zero outside.
    FlatInterval { g0_sq: f64, omega_g: f64, omega_max: f64 },
    /// `g^2 = gamma / 2 pi` on the whole real line (the Markovian idealization).
    ConstantLine { gamma: f64 },
    /// Linear interpolation of `g^2` samples on a strictly increasing grid;
    /// zero outside the grid. First-sheet only.
    Tabulated { omega: Vec<f64>, g_sq: Vec<f64> },
}

/// Support of a coupling density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Interval(f64, f64),
    Line,
}

impl FormFactor {
    pub fn flat_interval(g0_sq: f64, omega_g: f64, omega_max: f64) -> Result<Self> {
        let ff = Self::FlatInterval { g0_sq, omega_g, omega_max };
        ff.validate()?;
        Ok(ff)
    }

    pub fn constant_line(gamma: f64) -> Result<Self> {
        let ff = Self::ConstantLine { gamma };
        ff.validate()?;
        Ok(ff)
    }

    pub fn tabulated(omega: Vec<f64>, g_sq: Vec<f64>) -> Result<Self> {
        let ff = Self::Tabulated { omega, g_sq };
        ff.validate()?;
        Ok(ff)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::FlatInterval { g0_sq, omega_g, omega_max } => {
                if !g0_sq.is_finite() || *g0_sq < 0.0 {
                    return Err(Error::InvalidInput("g0_sq must be finite and >= 0".into()));
                }
                if !omega_g.is_finite() || !omega_max.is_finite() || omega_g >= omega_max {
                    return Err(Error::InvalidInput(
                        "flat interval requires finite omega_g < omega_max".into(),
                    ));
                }
            }
            Self::ConstantLine { gamma } => {
                if !gamma.is_finite() || *gamma < 0.0 {
                    return Err(Error::InvalidInput("gamma must be finite and >= 0".into()));
                }
            }
            Self::Tabulated { omega, g_sq } => {
                if omega.len() < 2 || omega.len() != g_sq.len() {
                    return Err(Error::InvalidInput(
                        "tabulated form factor needs matching grids of length >= 2".into(),
                    ));
                }
                if omega.len() > 1_000_000 {
                    return Err(Error::InvalidInput("tabulated grid too large".into()));
                }
                if omega.iter().any(|w| !w.is_finite()) {
                    return Err(Error::InvalidInput("tabulated grid must be finite".into()));
                }
                if omega.windows(2).any(|p| p[0] >= p[1]) {
                    return Err(Error::InvalidInput(
                        "tabulated grid must increase strictly".into(),
                    ));
                }
                if g_sq.iter().any(|g| !g.is_finite() || *g < 0.0) {
                    return Err(Error::InvalidInput(
                        "tabulated g_sq values must be finite and >= 0".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn support(&self) -> Support {
        match self {
            Self::FlatInterval { omega_g, omega_max, .. } => Support::Interval(*omega_g, *omega_max),
            Self::ConstantLine { .. } => Support::Line,
            Self::Tabulated { omega, .. } => Support::Interval(omega[0], *omega.last().unwrap()),
        }
    }

    pub fn strictly_inside_support(&self, x: f64) -> bool {
        match self.support() {
            Support::Interval(a, b) => a < x && x < b,
            Support::Line => x.is_finite(),
        }
    }

    /// `g^2(w)` on the real line (zero outside the support).
    pub fn g_sq(&self, w: f64) -> f64 {
        match self {
            Self::FlatInterval { g0_sq, omega_g, omega_max } => {
                if (*omega_g..=*omega_max).contains(&w) {
                    *g0_sq
                } else {
                    0.0
                }
            }
            Self::ConstantLine { gamma } => gamma / (2.0 * std::f64::consts::PI),
            Self::Tabulated { omega, g_sq } => {
                if w < omega[0] || w > *omega.last().unwrap() {
                    return 0.0;
                }
                let idx = omega.partition_point(|&p| p <= w).saturating_sub(1);
                let idx = idx.min(omega.len() - 2);
                let frac = (w - omega[idx]) / (omega[idx + 1] - omega[idx]);
                g_sq[idx] + frac * (g_sq[idx + 1] - g_sq[idx])
            }
        }
    }

    /// Analytic extension of the interior coupling density to complex
    /// argument, needed by the second-sheet formula.
    fn g_sq_analytic(&self, _e: C64) -> Result<C64> {
        match self {
            Self::FlatInterval { g0_sq, .. } => Ok(C64::new(*g0_sq, 0.0)),
            Self::ConstantLine { gamma } => {
                Ok(C64::new(gamma / (2.0 * std::f64::consts::PI), 0.0))
            }
            Self::Tabulated { .. } => Err(Error::UnsupportedContinuation(
                "tabulated form factors have no principled analytic extension; \
                 second-sheet evaluation is refused"
                    .into(),
            )),
        }
    }

    /// `int g^2(w) dw`, or `None` when it diverges (constant line).
    pub fn coupling_integral(&self) -> Option<f64> {
        match self {
            Self::FlatInterval { g0_sq, omega_g, omega_max } => {
                Some(g0_sq * (omega_max - omega_g))
            }
            Self::ConstantLine { gamma } => {
                if *gamma == 0.0 {
                    Some(0.0)
                } else {
                    None
                }
            }
            Self::Tabulated { omega, g_sq } => {
                // trapezoid is exact for the linear interpolant
                Some(
                    omega
                        .windows(2)
                        .zip(g_sq.windows(2))
                        .map(|(w, g)| 0.5 * (g[0] + g[1]) * (w[1] - w[0]))
                        .sum(),
                )
            }
        }
    }

    fn tabulated_knots(&self) -> Vec<f64> {
        match self {
            Self::Tabulated { omega, .. } => omega.clone(),
            _ => Vec::new(),
        }
    }
}

/// Riemann sheet of a self-energy evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sheet {
    First,
    Second,
}

/// A self-energy value tagged with its evaluation point and sheet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfEnergyValue {
    pub e: C64,
    pub sheet: Sheet,
    pub value: C64,
}

/// Boundary values of the self-energy on the two edges of the cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryValues {
    /// `Sigma(x + i0+) = P - i pi g^2(x)`.
    pub above: C64,
    /// `Sigma(x - i0+) = P + i pi g^2(x)`.
    pub below: C64,
    /// The principal-value part `P int g^2(w)/(x - w) dw`.
    pub principal: f64,
}

fn first_sheet(ff: &FormFactor, e: C64) -> Result<C64> {
    match ff {
        FormFactor::FlatInterval { g0_sq, omega_g, omega_max } => {
            if e.im == 0.0 && (*omega_g..=*omega_max).contains(&e.re) {
                return Err(Error::Boundary(format!(
                    "E = {} lies on the branch cut [{}, {}]; use boundary_values",
                    e.re, omega_g, omega_max
                )));
            }
            // principal log of the cross-ratio is analytic off the support
            Ok(((e - *omega_g) / (e - *omega_max)).ln() * *g0_sq)
        }
        FormFactor::ConstantLine { gamma } => {
            if e.im > 0.0 {
                Ok(C64::new(0.0, -gamma / 2.0))
            } else if e.im < 0.0 {
                Ok(C64::new(0.0, gamma / 2.0))
            } else {
                Err(Error::Boundary(
                    "the constant-line cut covers the whole real axis; use boundary_values".into(),
                ))
            }
        }
        FormFactor::Tabulated { omega, .. } => {
            let (a, b) = (omega[0], *omega.last().unwrap());
            if e.im == 0.0 && (a..=b).contains(&e.re) {
                return Err(Error::Boundary(format!(
                    "E = {} lies on the branch cut [{a}, {b}]; use boundary_values",
                    e.re
                )));
            }
            let knots = ff.tabulated_knots();
            quad::adaptive_split(&|w| C64::new(ff.g_sq(w), 0.0) / (e - w), &knots, PV_ABS_TOL)
        }
    }
}

/// Second-sheet determination continued downward through the cut. Internal
/// variant without the `Im E <= 0` restriction (the formula is one global
/// analytic expression; the public API restricts the domain to where the
/// sheet label is meaningful).
fn second_sheet_value(ff: &FormFactor, e: C64) -> Result<C64> {
    let g2 = ff.g_sq_analytic(e)?;
    let base = if e.im != 0.0 {
        first_sheet(ff, e)?
    } else {
        match ff.support() {
            Support::Interval(a, b) if e.re > a && e.re < b => {
                // approach from below: P + i pi g^2
                let bv = boundary_values(ff, e.re)?;
                bv.below
            }
            Support::Interval(a, b) if e.re == a || e.re == b => {
                return Err(Error::EndpointSingularity(format!(
                    "self-energy is singular at the support endpoint {}",
                    e.re
                )));
            }
            Support::Interval(..) => first_sheet(ff, e)?,
            Support::Line => boundary_values(ff, e.re)?.below,
        }
    };
    Ok(base - C64::new(0.0, 2.0 * std::f64::consts::PI) * g2)
}

/// Self-energy at `e` on the requested sheet.
///
/// First-sheet evaluation on the cut itself is refused with a boundary
/// error; second-sheet evaluation requires `Im E <= 0` and an analytically
/// extendable form factor.
pub fn self_energy(ff: &FormFactor, e: C64, sheet: Sheet) -> Result<SelfEnergyValue> {
    ff.validate()?;
    if !e.re.is_finite() || !e.im.is_finite() {
        return Err(Error::InvalidInput("evaluation point must be finite".into()));
    }
    let value = match sheet {
        Sheet::First => first_sheet(ff, e)?,
        Sheet::Second => {
            if e.im > 0.0 {
                return Err(Error::Domain(
                    "second-sheet evaluation is defined for Im E <= 0".into(),
                ));
            }
            second_sheet_value(ff, e)?
        }
    };
    Ok(SelfEnergyValue { e, sheet, value })
}

/// Convenience wrapper for [`self_energy`] on the second sheet.
pub fn second_sheet(ff: &FormFactor, e: C64) -> Result<SelfEnergyValue> {
    self_energy(ff, e, Sheet::Second)
}

/// Boundary values `Sigma(x +- i0+)` for `x` strictly inside the support.
/// Their difference is the cut discontinuity `-2 pi i g^2(x)`.
pub fn boundary_values(ff: &FormFactor, x: f64) -> Result<BoundaryValues> {
    ff.validate()?;
    if !x.is_finite() {
        return Err(Error::InvalidInput("boundary point must be finite".into()));
    }
    match ff.support() {
        Support::Interval(a, b) if x == a || x == b => {
            return Err(Error::EndpointSingularity(format!(
                "boundary values diverge at the support endpoint {x}"
            )));
        }
        Support::Interval(a, b) if x < a || x > b => {
            return Err(Error::InvalidInput(format!(
                "x = {x} is outside the support [{a}, {b}]"
            )));
        }
        _ => {}
    }
    let principal = match ff {
        FormFactor::FlatInterval { g0_sq, omega_g, omega_max } => {
            g0_sq * ((x - omega_g) / (omega_max - x)).ln()
        }
        // symmetric infinite line: the principal value vanishes
        FormFactor::ConstantLine { .. } => 0.0,
        FormFactor::Tabulated { omega, .. } => {
            let (a, b) = (omega[0], *omega.last().unwrap());
            let knots = ff.tabulated_knots();
            quad::principal_value(&|w| ff.g_sq(w), a, b, x, &knots, PV_ABS_TOL)?
        }
    };
    let jump = std::f64::consts::PI * ff.g_sq(x);
    Ok(BoundaryValues {
        above: C64::new(principal, -jump),
        below: C64::new(principal, jump),
        principal,
    })
}

/// A located resonance pole `E_pole = w0 + delta_omega0 - i gamma/2` of the
/// second-sheet resolvent, with the residue data the pole/cut decomposition
/// needs. Carries its `(form_factor, omega0)` identity so downstream
/// consumers can verify they are combining matching objects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleSolution {
    pub form_factor: FormFactor,
    pub omega0: f64,
    pub e_pole: C64,
    pub delta_omega0: f64,
    pub gamma: f64,
    pub z: f64,
    pub sigma_prime: C64,
    pub residual: f64,
    pub iterations: u32,
}

fn support_width(ff: &FormFactor) -> f64 {
    match ff.support() {
        Support::Interval(a, b) => b - a,
        Support::Line => f64::INFINITY,
    }
}

/// Solves `E - w0 - Sigma_II(E) = 0` by damped fixed-point iteration from
/// `E = w0 - i pi g^2(w0)`, with a secant fallback. The pole of a weakly
/// coupled level is `O(g^2)`-close to `w0`, so a local method suffices.
pub fn find_pole(ff: &FormFactor, omega0: f64) -> Result<PoleSolution> {
    ff.validate()?;
    if !omega0.is_finite() || !ff.strictly_inside_support(omega0) {
        return Err(Error::InvalidInput(format!(
            "omega0 = {omega0} must be embedded strictly inside the continuum support"
        )));
    }
    let g2_w0 = ff.g_sq(omega0);
    if g2_w0 == 0.0 {
        // free level: the resolvent pole sits exactly at omega0
        return Ok(PoleSolution {
            form_factor: ff.clone(),
            omega0,
            e_pole: C64::new(omega0, 0.0),
            delta_omega0: 0.0,
            gamma: 0.0,
            z: 1.0,
            sigma_prime: C64::new(0.0, 0.0),
            residual: 0.0,
            iterations: 0,
        });
    }

    let escape = support_width(ff);
    let mut trajectory = Vec::new();
    let mut e = C64::new(omega0, -std::f64::consts::PI * g2_w0);
    let mut converged = false;
    let mut iterations = 0;

    // damped fixed point E <- E + (w0 + Sigma_II(E) - E) / 2
    for _ in 0..POLE_MAX_ITERATIONS {
        trajectory.push(e);
        let sigma = second_sheet_value(ff, e)?;
        let residual = C64::new(omega0, 0.0) + sigma - e;
        iterations += 1;
        if residual.norm() < POLE_RESIDUAL_TARGET {
            converged = true;
            break;
        }
        e += residual * 0.5;
        if e.im.abs() > escape {
            return Err(Error::ModelRegime(format!(
                "pole iterate escaped below the support width ({escape}); \
                 the weak-coupling pole picture does not apply"
            )));
        }
    }

    if !converged {
        // secant on r(E) = E - w0 - Sigma_II(E)
        let r = |e: C64| -> Result<C64> { Ok(e - omega0 - second_sheet_value(ff, e)?) };
        let mut e0 = trajectory[trajectory.len() - 2];
        let mut e1 = e;
        let mut r0 = r(e0)?;
        let mut r1 = r(e1)?;
        for _ in 0..POLE_MAX_ITERATIONS {
            trajectory.push(e1);
            if r1.norm() < POLE_RESIDUAL_TARGET {
                converged = true;
                e = e1;
                break;
            }
            let denom = r1 - r0;
            if denom.norm() == 0.0 {
                break;
            }
            let e2 = e1 - r1 * (e1 - e0) / denom;
            e0 = e1;
            r0 = r1;
            e1 = e2;
            r1 = r(e1)?;
            iterations += 1;
            if e1.im.abs() > escape {
                return Err(Error::ModelRegime(format!(
                    "pole iterate escaped below the support width ({escape})"
                )));
            }
        }
        if !converged {
            return Err(Error::Solver {
                message: format!(
                    "pole search did not reach residual {POLE_RESIDUAL_TARGET:.1e} in {} iterations",
                    trajectory.len()
                ),
                trajectory,
            });
        }
    }

    let sigma = second_sheet_value(ff, e)?;
    let residual = (e - omega0 - sigma).norm();

    // central differencing in a real direction; Sigma_II is analytic here
    let step = 1e-6 * e.norm().max(1.0);
    let sigma_prime =
        (second_sheet_value(ff, e + step)? - second_sheet_value(ff, e - step)?) / (2.0 * step);
    let denom = C64::new(1.0, 0.0) - sigma_prime;
    let z = denom.norm_sqr().recip();

    Ok(PoleSolution {
        form_factor: ff.clone(),
        omega0,
        e_pole: e,
        delta_omega0: e.re - omega0,
        gamma: -2.0 * e.im,
        z,
        sigma_prime,
        residual,
        iterations,
    })
}

/// Golden-rule decay width `2 pi g^2(w0)`. `on_shell` is false (and the rate
/// zero) when `w0` lies outside the support: no decay channel on shell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoldenRule {
    pub gamma: f64,
    pub on_shell: bool,
}

pub fn golden_rule(ff: &FormFactor, omega0: f64) -> Result<GoldenRule> {
    ff.validate()?;
    if !omega0.is_finite() {
        return Err(Error::InvalidInput("omega0 must be finite".into()));
    }
    let inside = match ff.support() {
        Support::Interval(a, b) => omega0 >= a && omega0 <= b,
        Support::Line => true,
    };
    Ok(GoldenRule {
        gamma: if inside { 2.0 * std::f64::consts::PI * ff.g_sq(omega0) } else { 0.0 },
        on_shell: inside,
    })
}

/// Continuum Zeno time `tau_z = (int g^2 dw)^{-1/2}`.
///
/// `divergent_coupling` marks non-normalizable densities (constant line):
/// there the short-time region has no quadratic era at all and the Zeno
/// time is reported as zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuumZenoTime {
    pub tau_z: f64,
    pub divergent_coupling: bool,
}

pub fn zeno_time_continuum(ff: &FormFactor) -> Result<ContinuumZenoTime> {
    ff.validate()?;
    match ff.coupling_integral() {
        None => Ok(ContinuumZenoTime { tau_z: 0.0, divergent_coupling: true }),
        Some(integral) if integral == 0.0 => {
            Ok(ContinuumZenoTime { tau_z: f64::INFINITY, divergent_coupling: false })
        }
        Some(integral) => {
            Ok(ContinuumZenoTime { tau_z: integral.powf(-0.5), divergent_coupling: false })
        }
    }
}

/// Pole-only survival amplitude `exp(-i E_pole t)`: the purely exponential
/// approximation with `|A|^2 = exp(-gamma t)`.
pub fn weisskopf_wigner_amplitude(pole: &PoleSolution, t: f64) -> C64 {
    (C64::new(0.0, -t) * pole.e_pole).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn flat_reference() -> FormFactor {
        FormFactor::flat_interval(0.01, 0.0, 1.0).unwrap()
    }

    #[test]
    fn validation_rejects_bad_densities() {
        assert!(FormFactor::flat_interval(-0.1, 0.0, 1.0).is_err());
        assert!(FormFactor::flat_interval(0.1, 1.0, 0.0).is_err());
        assert!(FormFactor::flat_interval(0.1, 0.0, f64::INFINITY).is_err());
        assert!(FormFactor::constant_line(-1.0).is_err());
        assert!(FormFactor::tabulated(vec![0.0], vec![0.1]).is_err());
        assert!(FormFactor::tabulated(vec![0.0, 0.0], vec![0.1, 0.1]).is_err());
        assert!(FormFactor::tabulated(vec![0.0, 1.0], vec![0.1, -0.1]).is_err());
    }

    #[test]
    fn flat_interval_closed_form_spot_values() {
        let ff = flat_reference();
        // real point left of the support
        let s = self_energy(&ff, C64::new(-1.0, 0.0), Sheet::First).unwrap();
        assert_abs_diff_eq!(s.value.re, -0.0069314718, epsilon = 1e-10);
        assert_abs_diff_eq!(s.value.im, 0.0, epsilon = 1e-15);
        // on the cut: refused
        assert!(matches!(
            self_energy(&ff, C64::new(0.5, 0.0), Sheet::First),
            Err(Error::Boundary(_))
        ));
        // just above the midpoint: symmetric real part, -i pi g^2
        let s = self_energy(&ff, C64::new(0.5, 1e-9), Sheet::First).unwrap();
        assert_abs_diff_eq!(s.value.re, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(s.value.im, -0.031415927, epsilon = 1e-7);
    }

    #[test]
    fn flat_closed_form_matches_quadrature_off_cut() {
        let ff = flat_reference();
        for &e in &[
            C64::new(-0.7, 0.0),
            C64::new(1.9, 0.0),
            C64::new(0.3, 0.4),
            C64::new(0.8, -0.2),
            C64::new(-0.1, -1.3),
        ] {
            let closed = self_energy(&ff, e, Sheet::First).unwrap().value;
            let numeric =
                quad::adaptive(&|w| C64::new(0.01, 0.0) / (e - w), 0.0, 1.0, 1e-12).unwrap();
            assert!((closed - numeric).norm() < 1e-10, "e = {e}");
        }
    }

    #[test]
    fn boundary_values_and_discontinuity() {
        let ff = flat_reference();
        let bv = boundary_values(&ff, 0.5).unwrap();
        assert_abs_diff_eq!(bv.above.re, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bv.above.im, -0.031415927, epsilon = 1e-9);
        assert_abs_diff_eq!(bv.below.im, 0.031415927, epsilon = 1e-9);
        // discontinuity = -2 pi i g^2
        let jump = bv.above - bv.below;
        assert_abs_diff_eq!(jump.im, -2.0 * std::f64::consts::PI * 0.01, epsilon = 1e-12);

        let bv = boundary_values(&ff, 0.25).unwrap();
        assert_abs_diff_eq!(bv.principal, -0.010986123, epsilon = 1e-9);

        assert!(matches!(
            boundary_values(&ff, 0.0),
            Err(Error::EndpointSingularity(_))
        ));
    }

    #[test]
    fn tabulated_matches_flat_on_matching_density() {
        // a two-point table reproduces the flat density exactly
        let tab = FormFactor::tabulated(vec![0.0, 1.0], vec![0.01, 0.01]).unwrap();
        let flat = flat_reference();
        let e = C64::new(0.4, 0.3);
        let s_tab = self_energy(&tab, e, Sheet::First).unwrap().value;
        let s_flat = self_energy(&flat, e, Sheet::First).unwrap().value;
        assert!((s_tab - s_flat).norm() < 1e-9);

        let bv_tab = boundary_values(&tab, 0.25).unwrap();
        let bv_flat = boundary_values(&flat, 0.25).unwrap();
        assert!((bv_tab.above - bv_flat.above).norm() < 1e-9);

        assert!(matches!(
            second_sheet(&tab, C64::new(0.5, -0.01)),
            Err(Error::UnsupportedContinuation(_))
        ));
    }

    #[test]
    fn constant_line_is_markovian() {
        let ff = FormFactor::constant_line(1.0).unwrap();
        for &e in &[C64::new(0.0, 0.1), C64::new(-3.0, 2.0), C64::new(7.0, 1e-6)] {
            let s = self_energy(&ff, e, Sheet::First).unwrap().value;
            assert_abs_diff_eq!(s.re, 0.0);
            assert_abs_diff_eq!(s.im, -0.5);
        }
        // second sheet keeps the same value: constant density
        let s = second_sheet(&ff, C64::new(0.3, -0.2)).unwrap().value;
        assert_abs_diff_eq!(s.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.im, -0.5, epsilon = 1e-15);

        let zt = zeno_time_continuum(&ff).unwrap();
        assert!(zt.divergent_coupling);
        assert_abs_diff_eq!(zt.tau_z, 0.0);
    }

    #[test]
    fn sheet_matching_across_the_cut() {
        let ff = flat_reference();
        let x = 0.5;
        let mut prev = f64::INFINITY;
        for k in 4..=8 {
            let eps = 10f64.powi(-k);
            let above = self_energy(&ff, C64::new(x, eps), Sheet::First).unwrap().value;
            let below = second_sheet(&ff, C64::new(x, -eps)).unwrap().value;
            let gap = (above - below).norm();
            assert!(gap < prev, "gap should shrink monotonically");
            prev = gap;
        }
        assert!(prev < 1e-6);
    }

    #[test]
    fn second_sheet_formula() {
        let ff = flat_reference();
        let e = C64::new(0.5, -0.0314);
        let first = self_energy(&ff, e, Sheet::First).unwrap().value;
        let second = second_sheet(&ff, e).unwrap().value;
        let shift = C64::new(0.0, -2.0 * std::f64::consts::PI * 0.01);
        assert!((second - (first + shift)).norm() < 1e-14);
        assert!(matches!(
            second_sheet(&ff, C64::new(0.5, 0.1)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn schwarz_reflection_on_first_sheet() {
        use rand::{Rng, SeedableRng};
        let ff = flat_reference();
        let tab =
            FormFactor::tabulated(vec![0.0, 0.3, 1.0], vec![0.005, 0.02, 0.01]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let e = C64::new(rng.gen_range(-2.0..3.0), rng.gen_range(0.05..2.0));
            for ff in [&ff, &tab] {
                let up = self_energy(ff, e, Sheet::First).unwrap().value;
                let down = self_energy(ff, e.conj(), Sheet::First).unwrap().value;
                assert!((down - up.conj()).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn self_energy_is_bilinear_in_the_coupling() {
        let weak = flat_reference();
        let strong = FormFactor::flat_interval(0.04, 0.0, 1.0).unwrap();
        for &e in &[C64::new(0.2, 0.7), C64::new(-1.0, 0.0), C64::new(0.5, -0.3)] {
            let s1 = self_energy(&weak, e, Sheet::First).unwrap().value;
            let s4 = self_energy(&strong, e, Sheet::First).unwrap().value;
            assert!((s4 - s1 * 4.0).norm() < 1e-15 + 1e-12 * s4.norm());
        }
    }

    #[test]
    fn reference_pole_solution() {
        let pole = find_pole(&flat_reference(), 0.5).unwrap();
        assert!(pole.residual <= 1e-10);
        assert!(pole.e_pole.im < 0.0);
        // frozen against an independent damped-iteration + dense-grid oracle
        assert_abs_diff_eq!(pole.e_pole.re, 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(pole.gamma, 0.0654459636405, epsilon = 1e-9);
        assert_abs_diff_eq!(pole.delta_omega0, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(pole.z, 1.084683904, epsilon = 1e-6);
        assert_abs_diff_eq!(pole.sigma_prime.re, 0.0398294037, epsilon = 1e-6);
    }

    #[test]
    fn off_center_pole_shift() {
        let pole = find_pole(&flat_reference(), 0.25).unwrap();
        // exact shift, frozen
        assert_abs_diff_eq!(pole.delta_omega0, -0.011523846, epsilon = 1e-7);
        // second-order principal-value estimate g^2 ln(w0/(L-w0)), valid to O(g^4)
        assert_abs_diff_eq!(pole.delta_omega0, -0.010986123, epsilon = 1e-3);
    }

    #[test]
    fn pole_approaches_free_level_with_coupling() {
        let mut prev = f64::INFINITY;
        for &g2 in &[1e-3, 1e-5, 1e-7] {
            let ff = FormFactor::flat_interval(g2, 0.0, 1.0).unwrap();
            let pole = find_pole(&ff, 0.5).unwrap();
            let dist = (pole.e_pole - C64::new(0.5, 0.0)).norm();
            assert!(dist < prev);
            prev = dist;
        }
        assert!(prev < 1e-6);
        // exactly free level
        let free = FormFactor::flat_interval(0.0, 0.0, 1.0).unwrap();
        let pole = find_pole(&free, 0.5).unwrap();
        assert_abs_diff_eq!(pole.e_pole.re, 0.5);
        assert_abs_diff_eq!(pole.gamma, 0.0);
    }

    #[test]
    fn pole_requires_embedded_level() {
        assert!(find_pole(&flat_reference(), 1.5).is_err());
        assert!(find_pole(&flat_reference(), 1.0).is_err());
    }

    #[test]
    fn golden_rule_values() {
        let ff = flat_reference();
        let gr = golden_rule(&ff, 0.5).unwrap();
        assert!(gr.on_shell);
        assert_abs_diff_eq!(gr.gamma, 0.0628318530718, epsilon = 1e-12);
        let off = golden_rule(&ff, 1.5).unwrap();
        assert!(!off.on_shell);
        assert_abs_diff_eq!(off.gamma, 0.0);
    }

    #[test]
    fn pole_width_approaches_golden_rule_at_weak_coupling() {
        let gap = |g2: f64| {
            let ff = FormFactor::flat_interval(g2, 0.0, 1.0).unwrap();
            let pole = find_pole(&ff, 0.5).unwrap();
            (pole.gamma - golden_rule(&ff, 0.5).unwrap().gamma).abs()
        };
        let ratio = gap(1e-2) / gap(1e-3);
        assert!((50.0..=200.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn continuum_zeno_time() {
        let zt = zeno_time_continuum(&flat_reference()).unwrap();
        assert_abs_diff_eq!(zt.tau_z, 10.0, epsilon = 1e-12);
        assert!(!zt.divergent_coupling);

        let free = FormFactor::flat_interval(0.0, 0.0, 1.0).unwrap();
        assert!(zeno_time_continuum(&free).unwrap().tau_z.is_infinite());
    }

    #[test]
    fn weisskopf_wigner_amplitude_decay() {
        let pole = find_pole(&flat_reference(), 0.5).unwrap();
        let a0 = weisskopf_wigner_amplitude(&pole, 0.0);
        assert!((a0 - C64::new(1.0, 0.0)).norm() < 1e-15);
        let lifetime = 1.0 / pole.gamma;
        let a = weisskopf_wigner_amplitude(&pole, lifetime);
        assert_relative_eq!(a.norm_sqr(), (-1.0_f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn form_factor_json_round_trip() {
        let ff = flat_reference();
        let json = serde_json::to_string(&ff).unwrap();
        assert!(json.contains("\"kind\":\"flat_interval\""));
        let back: FormFactor = serde_json::from_str(&json).unwrap();
        assert_eq!(ff, back);

        let parsed: FormFactor = serde_json::from_str(
            r#"{"kind":"flat_interval","g0_sq":0.01,"omega_g":0.0,"omega_max":1.0}"#,
        )
        .unwrap();
        assert_eq!(parsed, ff);
        assert!(serde_json::from_str::<FormFactor>(
            r#"{"kind":"flat_interval","g0_sq":0.01,"omega_g":0.0,"omega_max":1.0,"extra":1}"#
        )
        .is_err());
    }
}
