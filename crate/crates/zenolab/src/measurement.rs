//! Pulsed (projective) and continuous (absorptive) measurement models.
//!
//! Pulsed monitoring projects the system back onto its initial state `N`
//! times in `[0, t]`, giving `p_N(t) = p(t/N)^N`; by construction this is
//! interpolated by `exp(-gamma_eff(tau) t)` with
//! `gamma_eff(tau) = -log p(tau) / tau`. Continuous monitoring is modeled
//! by the absorptive two-level generator
//!
//! ```text
//! H = [[0, Omega], [Omega, -2iV]]
//! ```
//!
//! whose survival amplitude splits into a slow and a fast decay,
//!
//! ```text
//! A(t) = (1 + V/h)/2 e^{-(V-h)t} + (1 - V/h)/2 e^{-(V+h)t},  h = sqrt(V^2 - Omega^2).
//! ```
//!
//! For strong monitoring (`V >> Omega`) the slow probability rate tends to
//! `Omega^2 / V`: increasing the absorption *suppresses* the decay, the same
//! effect the pulsed schedule produces as `tau -> 0`, with the heuristic
//! correspondence `V ~ 1/tau`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::qdyn::{self, OperatorMatrix, StateVector};

/// Survival probabilities below this floor are treated as a measurement at a
/// survival zero, for which the effective rate diverges.
pub const DIVERGENT_SURVIVAL_FLOOR: f64 = 1e-30;

/// `N` projective measurements at intervals `tau = t/N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSchedule {
    total_time: f64,
    pulses: u32,
}

impl PulseSchedule {
    pub fn new(total_time: f64, pulses: u32) -> Result<Self> {
        if !total_time.is_finite() || total_time <= 0.0 {
            return Err(Error::InvalidInput("total time must be finite and > 0".into()));
        }
        if pulses == 0 {
            return Err(Error::InvalidInput("pulse count must be >= 1".into()));
        }
        Ok(Self { total_time, pulses })
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn pulses(&self) -> u32 {
        self.pulses
    }

    /// Interval between measurements, `tau = t / N`.
    pub fn tau(&self) -> f64 {
        self.total_time / self.pulses as f64
    }
}

/// Two-level system with Rabi coupling `Omega` and an absorber of strength
/// `V` on the unmonitored level: generator `[[0, Omega], [Omega, -2iV]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelAbsorptive {
    omega: f64,
    v: f64,
}

impl TwoLevelAbsorptive {
    pub fn new(omega: f64, v: f64) -> Result<Self> {
        if !omega.is_finite() || omega <= 0.0 {
            return Err(Error::InvalidInput("omega must be finite and > 0".into()));
        }
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidInput("v must be finite and >= 0".into()));
        }
        Ok(Self { omega, v })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    /// `h = sqrt(V^2 - Omega^2)` with the principal square root: real in the
    /// overdamped regime `V > Omega`, imaginary in the oscillatory one.
    pub fn h(&self) -> C64 {
        C64::new(self.v * self.v - self.omega * self.omega, 0.0).sqrt()
    }

    /// The generator as a dense matrix.
    pub fn hamiltonian(&self) -> OperatorMatrix {
        OperatorMatrix::general_from_rows(
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(self.omega, 0.0),
                C64::new(self.omega, 0.0),
                C64::new(0.0, -2.0 * self.v),
            ],
        )
        .expect("static matrix")
    }
}

/// An effective decay rate extracted from one measurement interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveRate {
    pub tau: f64,
    pub gamma_eff: f64,
}

/// Continuous-monitoring decay rates: the asymptotic `Omega^2 / V` and the
/// exact slow-pole rate `2(V - h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousRate {
    pub asymptotic: f64,
    pub exact_slow_pole: f64,
    /// Set when `V < 5 Omega`: the asymptotic rate is then a poor guide.
    pub weak_regime_warning: bool,
}

/// Survival probability after `N` projective measurements: `p(t/N)^N`.
pub fn pulsed_survival(
    h: &OperatorMatrix,
    psi0: &StateVector,
    schedule: &PulseSchedule,
) -> Result<f64> {
    if !h.is_hermitian() {
        return Err(Error::ContractViolation(
            "pulsed monitoring is defined for Hermitian generators".into(),
        ));
    }
    let p_tau = qdyn::survival_probability(h, psi0, schedule.tau())?;
    Ok(p_tau.powi(schedule.pulses() as i32))
}

/// `p^{(N)}(t)` over a list of pulse counts at fixed total time.
pub fn pulsed_survival_series(
    h: &OperatorMatrix,
    psi0: &StateVector,
    total_time: f64,
    pulse_counts: &[u32],
) -> Result<Vec<(u32, f64)>> {
    pulse_counts
        .iter()
        .map(|&n| {
            let schedule = PulseSchedule::new(total_time, n)?;
            Ok((n, pulsed_survival(h, psi0, &schedule)?))
        })
        .collect()
}

/// `gamma_eff(tau) = -log p(tau) / tau`.
///
/// Errors with [`Error::DivergentRate`] when the measurement lands on a
/// survival zero. For small `tau` the rate approaches `tau / tau_z^2`.
pub fn effective_rate_pulsed(
    h: &OperatorMatrix,
    psi0: &StateVector,
    tau: f64,
) -> Result<EffectiveRate> {
    if !tau.is_finite() || tau <= 0.0 {
        return Err(Error::InvalidInput("tau must be finite and > 0".into()));
    }
    let p = qdyn::survival_probability(h, psi0, tau)?;
    if p <= DIVERGENT_SURVIVAL_FLOOR {
        return Err(Error::DivergentRate { tau, survival: p });
    }
    Ok(EffectiveRate { tau, gamma_eff: -p.ln() / tau })
}

/// Stable evaluation of `e^{-vt} [cosh(ht) + vt sinhc(ht)]` and the lower
/// component `-i omega t e^{-vt} sinhc(ht)`, valid across the oscillatory,
/// critical and overdamped regimes.
pub(crate) fn absorptive_xy(omega: f64, v: f64, t: f64) -> (C64, C64) {
    let h = C64::new(v * v - omega * omega, 0.0).sqrt();
    let z = h * t;
    if z.norm() < 1e-2 {
        // series in z^2; truncation error below 1e-20 at |z| = 1e-2
        let one = C64::new(1.0, 0.0);
        let z2 = z * z;
        let cosh = one + z2 * (one * 0.5 + z2 * (one / 24.0 + z2 / 720.0));
        let sinhc = one + z2 * (one / 6.0 + z2 * (one / 120.0 + z2 / 5040.0));
        let damp = C64::new((-v * t).exp(), 0.0);
        let x = damp * (cosh + sinhc * (v * t));
        let y = -C64::i() * omega * t * damp * sinhc;
        (x, y)
    } else {
        // split into slow/fast exponentials; no overflow for large vt
        let slow = (-(C64::new(v, 0.0) - h) * t).exp();
        let fast = (-(C64::new(v, 0.0) + h) * t).exp();
        let vh = C64::new(v, 0.0) / h;
        let x = (slow * (C64::new(1.0, 0.0) + vh) + fast * (C64::new(1.0, 0.0) - vh)) * 0.5;
        let y = -C64::i() * omega * (slow - fast) / (2.0 * h);
        (x, y)
    }
}

/// Survival amplitude of the absorptive two-level model.
///
/// Reduces to `cos(Omega t)` at `V = 0` and to `e^{-Vt}(1 + Vt)` at the
/// critical point `V = Omega`.
pub fn absorptive_amplitude(sys: &TwoLevelAbsorptive, t: f64) -> Result<C64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidInput("time must be finite and >= 0".into()));
    }
    Ok(absorptive_xy(sys.omega(), sys.v(), t).0)
}

/// `|A(t)|^2` of the absorptive two-level model.
pub fn absorptive_probability(sys: &TwoLevelAbsorptive, t: f64) -> Result<f64> {
    Ok(absorptive_amplitude(sys, t)?.norm_sqr())
}

/// Continuous-monitoring effective decay rate in the overdamped regime.
///
/// Requires `V > Omega`; flags `V < 5 Omega`, where the asymptotic form is
/// unreliable. Returns both the asymptotic rate `Omega^2 / V` and the exact
/// slow-pole rate `2(V - h)`.
pub fn effective_rate_continuous(sys: &TwoLevelAbsorptive) -> Result<ContinuousRate> {
    if sys.v() <= sys.omega() {
        return Err(Error::Regime(format!(
            "continuous effective rate requires v > omega (v = {}, omega = {})",
            sys.v(),
            sys.omega()
        )));
    }
    let h = (sys.v() * sys.v() - sys.omega() * sys.omega()).sqrt();
    Ok(ContinuousRate {
        asymptotic: sys.omega() * sys.omega() / sys.v(),
        exact_slow_pole: 2.0 * (sys.v() - h),
        weak_regime_warning: sys.v() < 5.0 * sys.omega(),
    })
}

/// Heuristic monitoring-strength correspondence: `tau = 1/V`.
pub fn v_to_tau(v: f64) -> Result<f64> {
    reciprocal(v, "v")
}

/// Heuristic monitoring-strength correspondence: `V = 1/tau`.
pub fn tau_to_v(tau: f64) -> Result<f64> {
    reciprocal(tau, "tau")
}

fn reciprocal(x: f64, what: &str) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::InvalidInput(format!("{what} must be finite and > 0")));
    }
    Ok(1.0 / x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn rabi() -> OperatorMatrix {
        OperatorMatrix::pauli_x()
    }

    #[test]
    fn schedule_validation() {
        assert!(PulseSchedule::new(1.0, 0).is_err());
        assert!(PulseSchedule::new(0.0, 4).is_err());
        assert!(PulseSchedule::new(-1.0, 4).is_err());
        let s = PulseSchedule::new(1.0, 4).unwrap();
        assert_abs_diff_eq!(s.tau() * s.pulses() as f64, s.total_time());
    }

    #[test]
    fn single_pulse_matches_survival_probability() {
        let s = PulseSchedule::new(1.0, 1).unwrap();
        let p = pulsed_survival(&rabi(), &StateVector::plus(), &s).unwrap();
        assert_abs_diff_eq!(p, 0.291926581726, epsilon = 1e-11);
    }

    #[test]
    fn pulsed_survival_at_zero_time_is_one() {
        // t -> 0 limit realized on a tiny interval
        let s = PulseSchedule::new(1e-300, 17).unwrap();
        let p = pulsed_survival(&rabi(), &StateVector::plus(), &s).unwrap();
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn four_pulses_match_explicit_project_and_evolve() {
        let h = rabi();
        let plus = StateVector::plus();
        let s = PulseSchedule::new(1.0, 4).unwrap();
        let p = pulsed_survival(&h, &plus, &s).unwrap();
        assert_abs_diff_eq!(p, 0.776740928179, epsilon = 1e-11);

        // independent oracle: evolve for tau, project onto |+>, repeat
        let u = qdyn::propagator(&h, s.tau()).unwrap();
        let mut survival = 1.0;
        for _ in 0..s.pulses() {
            let evolved = u.apply(&plus).unwrap();
            let amp = plus.overlap(&evolved).unwrap();
            survival *= amp.norm_sqr();
        }
        assert_abs_diff_eq!(p, survival, epsilon = 1e-13);
    }

    #[test]
    fn series_is_increasing_on_doublings() {
        let ns: Vec<u32> = (0..11).map(|k| 1 << k).collect();
        let series = pulsed_survival_series(&rabi(), &StateVector::plus(), 1.0, &ns).unwrap();
        for pair in series.windows(2) {
            assert!(pair[1].1 > pair[0].1, "{pair:?} not increasing");
        }
        // large-N limit exp(-t^2 / (N tau_z^2))
        let (_, p_large) =
            pulsed_survival_series(&rabi(), &StateVector::plus(), 1.0, &[10_000]).unwrap()[0];
        assert_abs_diff_eq!(p_large, (-1.0_f64 / 10_000.0).exp(), epsilon = 1e-3);
    }

    #[test]
    fn effective_rate_small_tau() {
        let r = effective_rate_pulsed(&rabi(), &StateVector::plus(), 0.01).unwrap();
        assert_relative_eq!(r.gamma_eff, 0.01, max_relative = 1e-4);
    }

    #[test]
    fn effective_rate_slope_is_inverse_zeno_time_squared() {
        // gamma_eff(tau)/tau -> 1/tau_z^2 = Omega^2 = 1
        let taus: Vec<f64> = (0..20).map(|k| 1e-3 * (10f64.powf(k as f64 / 19.0))).collect();
        let mut num = 0.0;
        let mut den = 0.0;
        for &tau in &taus {
            let r = effective_rate_pulsed(&rabi(), &StateVector::plus(), tau).unwrap();
            num += r.gamma_eff * tau;
            den += tau * tau;
        }
        assert_relative_eq!(num / den, 1.0, max_relative = 1e-3);
    }

    #[test]
    fn effective_rate_diverges_at_survival_zero() {
        let err = effective_rate_pulsed(&rabi(), &StateVector::plus(), std::f64::consts::FRAC_PI_2)
            .unwrap_err();
        assert!(matches!(err, Error::DivergentRate { .. }));
    }

    #[test]
    fn absorptive_amplitude_reduces_to_rabi() {
        let sys = TwoLevelAbsorptive::new(1.0, 0.0).unwrap();
        let a = absorptive_amplitude(&sys, 1.0).unwrap();
        assert_abs_diff_eq!(a.re, 1.0_f64.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn absorptive_amplitude_strong_monitoring() {
        let sys = TwoLevelAbsorptive::new(1.0, 10.0).unwrap();
        let a = absorptive_amplitude(&sys, 1.0).unwrap();
        assert_abs_diff_eq!(a.re, 0.953505688122, epsilon = 1e-11);
        assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-14);
        // slow-pole probability rate 2(V - h)
        let r = effective_rate_continuous(&sys).unwrap();
        assert_abs_diff_eq!(r.exact_slow_pole, 0.100251257868, epsilon = 1e-11);
        assert_abs_diff_eq!(r.asymptotic, 0.1, epsilon = 1e-15);
        assert!(!r.weak_regime_warning);
    }

    #[test]
    fn absorptive_amplitude_matches_matrix_exponential() {
        // cross-check the closed form against the dense propagator
        let plus = StateVector::plus();
        for &(omega, v) in &[(1.0, 0.4), (1.0, 1.0), (1.0, 2.0), (0.7, 3.0)] {
            let sys = TwoLevelAbsorptive::new(omega, v).unwrap();
            for &t in &[0.1, 0.5, 1.0, 3.0] {
                let closed = absorptive_amplitude(&sys, t).unwrap();
                let dense = qdyn::survival_amplitude(&sys.hamiltonian(), &plus, t).unwrap();
                assert!((closed - dense).norm() < 1e-11, "omega={omega} v={v} t={t}");
            }
        }
    }

    #[test]
    fn critical_point_limit() {
        let sys = TwoLevelAbsorptive::new(1.0, 1.0).unwrap();
        let t = 0.7;
        let a = absorptive_amplitude(&sys, t).unwrap();
        let expect = (-t).exp() * (1.0 + t);
        assert_abs_diff_eq!(a.re, expect, epsilon = 1e-13);
    }

    #[test]
    fn weak_absorption_oscillates_with_decaying_maxima() {
        let sys = TwoLevelAbsorptive::new(1.0, 0.4).unwrap();
        let mut maxima = Vec::new();
        let dt = 0.01;
        let mut prev2 = absorptive_probability(&sys, 0.0).unwrap();
        let mut prev1 = absorptive_probability(&sys, dt).unwrap();
        for k in 2..1500 {
            let p = absorptive_probability(&sys, k as f64 * dt).unwrap();
            if prev1 > prev2 && prev1 > p {
                maxima.push(prev1);
            }
            prev2 = prev1;
            prev1 = p;
        }
        assert!(maxima.len() >= 2);
        for pair in maxima.windows(2) {
            assert!(pair[1] < pair[0]);
        }
    }

    #[test]
    fn continuous_rate_regime_checks() {
        assert!(matches!(
            effective_rate_continuous(&TwoLevelAbsorptive::new(1.0, 0.5).unwrap()),
            Err(Error::Regime(_))
        ));
        let weak = effective_rate_continuous(&TwoLevelAbsorptive::new(1.0, 2.0).unwrap()).unwrap();
        assert!(weak.weak_regime_warning);

        let r100 = effective_rate_continuous(&TwoLevelAbsorptive::new(1.0, 100.0).unwrap()).unwrap();
        assert_relative_eq!(r100.exact_slow_pole, r100.asymptotic, max_relative = 3e-5);
        let r10 = effective_rate_continuous(&TwoLevelAbsorptive::new(1.0, 10.0).unwrap()).unwrap();
        // stronger monitoring decays slower
        assert!(r100.exact_slow_pole < r10.exact_slow_pole);
    }

    #[test]
    fn monitoring_strength_correspondence() {
        assert_abs_diff_eq!(v_to_tau(10.0).unwrap(), 0.1);
        assert_abs_diff_eq!(tau_to_v(1.0).unwrap(), 1.0);
        assert!(v_to_tau(0.0).is_err());
        // pulsed at tau = 0.1 and continuous at V = 10 give comparable rates
        let pulsed = effective_rate_pulsed(&rabi(), &StateVector::plus(), 0.1).unwrap();
        let cont =
            effective_rate_continuous(&TwoLevelAbsorptive::new(1.0, 10.0).unwrap()).unwrap();
        assert_relative_eq!(pulsed.gamma_eff, cont.exact_slow_pole, max_relative = 0.05);
    }
}
