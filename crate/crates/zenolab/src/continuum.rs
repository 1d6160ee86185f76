//! Two-level system coupled to a flat one-dimensional boson continuum in
//! the rotating-wave approximation, and its exact reduction to non-Hermitian
//! 2x2 dynamics.
//!
//! The state `x(t)|+> + y(t)|-> + sum_k z_k(t)|w_k>` obeys
//!
//! ```text
//! i x' = Omega y
//! i y' = Omega x + g sum_k z_k dw        g = sqrt(Gamma / 2 pi)
//! i z_k' = w_k z_k + g y
//! ```
//!
//! with modes `w_k` uniform on `[-W, W]`. Eliminating the modes produces a
//! memory kernel that collapses, for flat coupling and `W -> inf`, onto an
//! instantaneous loss term `-i Gamma/2 y` (the `t = tau` half of the kernel
//! spike contributes half its weight), i.e. the absorptive two-level
//! generator with `V = Gamma / 4`. The window half-width `W` is an explicit
//! convergence parameter of the simulation, never hidden.
//!
//! Integration is fixed-step 4th-order Runge-Kutta so golden outputs are
//! bit-reproducible across runs.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::measurement::absorptive_xy;

const RESOLUTION_GUARD: f64 = 0.1;
/// Sampled snapshots kept per run (the `y` history is kept at every step).
const TARGET_SAMPLES: usize = 160;

/// Discretized flat-coupling field model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldModel {
    omega: f64,
    gamma: f64,
    window: f64,
    modes: usize,
    dt: f64,
}

impl FieldModel {
    pub fn new(omega: f64, gamma: f64, window: f64, modes: usize, dt: f64) -> Result<Self> {
        if !omega.is_finite() || omega < 0.0 {
            return Err(Error::InvalidInput("omega must be finite and >= 0".into()));
        }
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidInput("gamma must be finite and >= 0".into()));
        }
        if !window.is_finite() || window <= 0.0 {
            return Err(Error::InvalidInput("window half-width must be finite and > 0".into()));
        }
        if modes < 2 {
            return Err(Error::InvalidInput("need at least 2 field modes".into()));
        }
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::InvalidInput("dt must be finite and > 0".into()));
        }
        Ok(Self { omega, gamma, window, modes, dt })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `dw = 2W / (n - 1)`.
    pub fn mode_spacing(&self) -> f64 {
        2.0 * self.window / (self.modes - 1) as f64
    }

    pub fn mode_frequency(&self, k: usize) -> f64 {
        -self.window + k as f64 * self.mode_spacing()
    }

    /// Continuum coupling density `g = sqrt(Gamma / 2 pi)`.
    pub fn coupling_density(&self) -> f64 {
        (self.gamma / (2.0 * std::f64::consts::PI)).sqrt()
    }

    /// Coupling of one discretized mode, `g sqrt(dw)`.
    pub fn mode_coupling(&self) -> f64 {
        self.coupling_density() * self.mode_spacing().sqrt()
    }

    fn check_resolution(&self, dt: f64) -> Result<()> {
        let scale = self.window.max(self.omega).max(self.gamma);
        if dt * scale > RESOLUTION_GUARD * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "integrator under-resolved: dt * max(W, Omega, Gamma) = {:.3e} exceeds {}",
                dt * scale,
                RESOLUTION_GUARD
            )));
        }
        Ok(())
    }
}

/// Snapshot of the full system + field state.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub x: C64,
    pub y: C64,
    pub z: Vec<C64>,
}

impl FieldState {
    /// `|x|^2 + |y|^2 + sum_k |z_k|^2 dw`: conserved by the full model.
    pub fn total_norm_sqr(&self, mode_spacing: f64) -> f64 {
        self.x.norm_sqr()
            + self.y.norm_sqr()
            + mode_spacing * self.z.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }
}

/// Result of a field-model run: sampled snapshots (always including the
/// initial and final times) plus the full-resolution `y` history the memory
/// kernel reconstruction needs.
#[derive(Debug, Clone)]
pub struct FieldSeries {
    model: FieldModel,
    step_dt: f64,
    states: Vec<FieldState>,
    sample_steps: Vec<usize>,
    y_history: Vec<C64>,
}

impl FieldSeries {
    pub fn model(&self) -> &FieldModel {
        &self.model
    }

    /// The actual integrator step (at most the configured `dt`).
    pub fn step_dt(&self) -> f64 {
        self.step_dt
    }

    pub fn states(&self) -> &[FieldState] {
        &self.states
    }

    /// Step index of each sampled state.
    pub fn sample_steps(&self) -> &[usize] {
        &self.sample_steps
    }

    /// `y` at every integrator step, `y_history[j] = y(j * step_dt)`.
    pub fn y_history(&self) -> &[C64] {
        &self.y_history
    }

    pub fn final_state(&self) -> &FieldState {
        self.states.last().expect("series holds at least the initial state")
    }
}

struct Rhs<'a> {
    omega: f64,
    g: f64,
    dw: f64,
    freqs: &'a [f64],
}

impl Rhs<'_> {
    #[inline]
    fn eval(&self, x: C64, y: C64, z: &[C64], dx: &mut C64, dy: &mut C64, dz: &mut [C64]) {
        let mi = C64::new(0.0, -1.0);
        let zsum: C64 = z.iter().sum();
        *dx = mi * self.omega * y;
        *dy = mi * (self.omega * x + self.g * self.dw * zsum);
        for (k, dzk) in dz.iter_mut().enumerate() {
            *dzk = mi * (self.freqs[k] * z[k] + self.g * y);
        }
    }
}

/// Integrates the coupled system from `x = 1, y = 0, z = 0` up to
/// `total_time` with fixed-step RK4.
///
/// The configured `dt` must satisfy `dt * max(W, Omega, Gamma) <= 0.1`; the
/// actual step is `total_time / n_steps` with an even `n_steps`, so sampled
/// snapshots land on even step indices (as the kernel reconstruction
/// quadrature requires).
pub fn simulate_field(model: &FieldModel, total_time: f64) -> Result<FieldSeries> {
    if !total_time.is_finite() || total_time <= 0.0 {
        return Err(Error::InvalidInput("total time must be finite and > 0".into()));
    }
    model.check_resolution(model.dt())?;
    let n_steps = 2 * ((total_time / model.dt() / 2.0).ceil() as usize).max(1);
    let step_dt = total_time / n_steps as f64;

    let n = model.modes();
    let freqs: Vec<f64> = (0..n).map(|k| model.mode_frequency(k)).collect();
    let rhs = Rhs {
        omega: model.omega(),
        g: model.coupling_density(),
        dw: model.mode_spacing(),
        freqs: &freqs,
    };

    // even stride so every sample sits on an even step index
    let stride = {
        let s = n_steps.div_ceil(TARGET_SAMPLES);
        (s + s % 2).max(2)
    };

    let zero = C64::new(0.0, 0.0);
    let mut x = C64::new(1.0, 0.0);
    let mut y = zero;
    let mut z = vec![zero; n];

    let mut states = Vec::with_capacity(n_steps / stride + 2);
    let mut sample_steps = Vec::with_capacity(states.capacity());
    let mut y_history = Vec::with_capacity(n_steps + 1);

    states.push(FieldState { t: 0.0, x, y, z: z.clone() });
    sample_steps.push(0);
    y_history.push(y);

    // RK4 stage buffers
    let (mut dx1, mut dy1, mut dz1) = (zero, zero, vec![zero; n]);
    let (mut dx2, mut dy2, mut dz2) = (zero, zero, vec![zero; n]);
    let (mut dx3, mut dy3, mut dz3) = (zero, zero, vec![zero; n]);
    let (mut dx4, mut dy4, mut dz4) = (zero, zero, vec![zero; n]);
    let mut zt = vec![zero; n];

    for step in 1..=n_steps {
        let h = step_dt;
        rhs.eval(x, y, &z, &mut dx1, &mut dy1, &mut dz1);

        for k in 0..n {
            zt[k] = z[k] + dz1[k] * (h / 2.0);
        }
        rhs.eval(x + dx1 * (h / 2.0), y + dy1 * (h / 2.0), &zt, &mut dx2, &mut dy2, &mut dz2);

        for k in 0..n {
            zt[k] = z[k] + dz2[k] * (h / 2.0);
        }
        rhs.eval(x + dx2 * (h / 2.0), y + dy2 * (h / 2.0), &zt, &mut dx3, &mut dy3, &mut dz3);

        for k in 0..n {
            zt[k] = z[k] + dz3[k] * h;
        }
        rhs.eval(x + dx3 * h, y + dy3 * h, &zt, &mut dx4, &mut dy4, &mut dz4);

        x += (dx1 + dx2 * 2.0 + dx3 * 2.0 + dx4) * (h / 6.0);
        y += (dy1 + dy2 * 2.0 + dy3 * 2.0 + dy4) * (h / 6.0);
        for k in 0..n {
            z[k] += (dz1[k] + dz2[k] * 2.0 + dz3[k] * 2.0 + dz4[k]) * (h / 6.0);
        }

        y_history.push(y);
        if step % stride == 0 || step == n_steps {
            states.push(FieldState { t: step as f64 * step_dt, x, y, z: z.clone() });
            sample_steps.push(step);
        }
    }

    Ok(FieldSeries { model: *model, step_dt, states, sample_steps, y_history })
}

/// Closed-form dynamics of the reduced 2x2 model `[[0, Omega], [Omega, -i Gamma/2]]`,
/// equal to the absorptive two-level system with `V = Gamma / 4`.
pub fn reduced_dynamics(omega: f64, gamma: f64, t: f64) -> Result<(C64, C64)> {
    if !omega.is_finite() || omega < 0.0 || !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::InvalidInput("omega and gamma must be finite and >= 0".into()));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidInput("time must be finite and >= 0".into()));
    }
    Ok(absorptive_xy(omega, gamma / 4.0, t))
}

/// Residual of the memory-kernel identity
/// `z_k(t) = -i g int_0^t e^{-i w_k (t - tau)} y(tau) dtau`,
/// reconstructed from the stored `y` history by cumulative Simpson panels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelResidualReport {
    pub max_residual: f64,
    pub checked_modes: usize,
    pub checked_samples: usize,
}

pub fn memory_kernel_check(series: &FieldSeries) -> Result<KernelResidualReport> {
    let model = series.model();
    let dt = series.step_dt();
    if series.y_history.len() < 3 {
        return Err(Error::Resolution("series too short for kernel reconstruction".into()));
    }
    // Simpson on the y grid needs the same resolution the integrator needed
    model.check_resolution(dt)?;

    let n = model.modes();
    let g = model.coupling_density();
    let samples: Vec<(usize, &FieldState)> = series
        .sample_steps
        .iter()
        .copied()
        .zip(series.states.iter())
        .filter(|&(step, _)| step > 0)
        .collect();
    for &(step, _) in &samples {
        if step % 2 != 0 {
            return Err(Error::Resolution("sampled states must sit on even step indices".into()));
        }
    }

    let mut max_residual = 0.0_f64;
    for k in 0..n {
        let w = model.mode_frequency(k);
        // cumulative Simpson of e^{+i w tau} y(tau); phase advanced
        // multiplicatively to avoid n_steps trig calls per mode
        let rot = C64::new(0.0, w * dt).exp();
        let mut phase = C64::new(1.0, 0.0);
        let mut acc = C64::new(0.0, 0.0);
        let mut f_prev2 = series.y_history[0]; // phase(0) = 1
        let mut sample_iter = samples.iter().peekable();
        let mut j = 0usize;
        while let Some(&&(step, state)) = sample_iter.peek() {
            if j == step {
                let t = step as f64 * dt;
                let z_rec = -C64::i() * g * C64::new(0.0, -w * t).exp() * acc;
                let residual = (z_rec - state.z[k]).norm();
                if residual > max_residual {
                    max_residual = residual;
                }
                sample_iter.next();
                continue;
            }
            // advance one Simpson pair: j -> j+2
            phase *= rot;
            let f_mid = phase * series.y_history[j + 1];
            phase *= rot;
            let f_next = phase * series.y_history[j + 2];
            acc += (f_prev2 + f_mid * 4.0 + f_next) * (dt / 3.0);
            f_prev2 = f_next;
            j += 2;
        }
    }

    Ok(KernelResidualReport {
        max_residual,
        checked_modes: n,
        checked_samples: samples.len(),
    })
}
