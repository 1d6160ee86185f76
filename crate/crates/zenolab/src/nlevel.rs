//! Brute-force N-level discretization of a level coupled to a continuum.
//!
//! A discrete level `|+>` at `w0` couples with real strengths `g_j` to `N`
//! levels at frequencies `w_j`; the Hamiltonian is the arrowhead matrix
//!
//! ```text
//! [ w0   g_1  g_2 ... ]
//! [ g_1  w_1   0  ... ]
//! [ g_2   0   w_2 ... ]
//! ```
//!
//! Sampling a coupling density `g^2(w)` on a midpoint grid with
//! `g_j = g(w_j) sqrt(dw)` makes its survival amplitude converge to the
//! continuum one, which is what makes this module useful: it is the
//! independent, assumption-free oracle every spectral-route result in this
//! crate is checked against.
//!
//! The eigensystem is computed from the secular equation
//! `E - w0 - sum_j g_j^2 / (E - w_j) = 0`, whose roots interlace the `w_j`;
//! bisection per interlacing interval is machine-accurate and needs no
//! general eigensolver. The initial-state weight of each eigenvector is
//! `|<+|E_k>|^2 = 1 / (1 + sum_j g_j^2 / (E_k - w_j)^2)`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::qdyn::OperatorMatrix;
use crate::resolvent::FormFactor;

/// Discrete level + N-level bath with explicit frequencies and couplings.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedModel {
    omega0: f64,
    frequencies: Vec<f64>,
    couplings: Vec<f64>,
}

/// Eigenvalues and initial-state overlaps of a [`DiscretizedModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct Eigensystem {
    pub energies: Vec<f64>,
    pub overlaps_sq: Vec<f64>,
}

impl DiscretizedModel {
    pub fn new(omega0: f64, frequencies: Vec<f64>, couplings: Vec<f64>) -> Result<Self> {
        if frequencies.is_empty() || frequencies.len() != couplings.len() {
            return Err(Error::InvalidInput(
                "need matching non-empty frequency and coupling lists".into(),
            ));
        }
        if frequencies.iter().chain(couplings.iter()).any(|v| !v.is_finite())
            || !omega0.is_finite()
        {
            return Err(Error::InvalidInput("model parameters must be finite".into()));
        }
        if frequencies.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::InvalidInput("frequencies must increase strictly".into()));
        }
        Ok(Self { omega0, frequencies, couplings })
    }

    /// Midpoint sampling of a finite-support coupling density with `levels`
    /// bath levels: `w_j = a + (j + 1/2) dw`, `g_j = sqrt(g^2(w_j) dw)`.
    pub fn from_form_factor(ff: &FormFactor, omega0: f64, levels: usize) -> Result<Self> {
        ff.validate()?;
        if levels < 2 {
            return Err(Error::InvalidInput("need at least 2 bath levels".into()));
        }
        let (a, b) = match ff.support() {
            crate::resolvent::Support::Interval(a, b) => (a, b),
            crate::resolvent::Support::Line => {
                return Err(Error::InvalidInput(
                    "discretization needs a finite support; the constant line has none".into(),
                ))
            }
        };
        let dw = (b - a) / levels as f64;
        let frequencies: Vec<f64> = (0..levels).map(|j| a + (j as f64 + 0.5) * dw).collect();
        let couplings: Vec<f64> =
            frequencies.iter().map(|&w| (ff.g_sq(w) * dw).sqrt()).collect();
        Self::new(omega0, frequencies, couplings)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn levels(&self) -> usize {
        self.frequencies.len()
    }

    /// Dense arrowhead Hamiltonian (for small-N cross-checks).
    pub fn hamiltonian(&self) -> Result<OperatorMatrix> {
        let n = self.levels() + 1;
        let mut rows = vec![C64::new(0.0, 0.0); n * n];
        rows[0] = C64::new(self.omega0, 0.0);
        for j in 0..self.levels() {
            rows[j + 1] = C64::new(self.couplings[j], 0.0);
            rows[(j + 1) * n] = C64::new(self.couplings[j], 0.0);
            rows[(j + 1) * n + j + 1] = C64::new(self.frequencies[j], 0.0);
        }
        OperatorMatrix::hermitian_from_rows(n, &rows)
    }

    fn secular(&self, e: f64) -> f64 {
        let mut sum = 0.0;
        for (w, g) in self.frequencies.iter().zip(&self.couplings) {
            if *g != 0.0 {
                sum += g * g / (e - w);
            }
        }
        e - self.omega0 - sum
    }

    /// All `N + 1` eigenvalues with their initial-state weights. Levels with
    /// zero coupling are exact eigenvectors with zero weight and are passed
    /// through directly.
    pub fn eigensystem(&self) -> Eigensystem {
        // interlacing grid: only coupled levels produce secular poles
        let coupled: Vec<f64> = self
            .frequencies
            .iter()
            .zip(&self.couplings)
            .filter(|(_, g)| **g != 0.0)
            .map(|(w, _)| *w)
            .collect();

        let coupling_norm: f64 =
            self.couplings.iter().map(|g| g * g).sum::<f64>().sqrt();
        let mut energies = Vec::with_capacity(self.levels() + 1);

        if coupled.is_empty() {
            energies.push(self.omega0);
        } else {
            let lo = coupled[0].min(self.omega0) - coupling_norm - 1.0;
            let hi = coupled[coupled.len() - 1].max(self.omega0) + coupling_norm + 1.0;
            energies.push(self.bisect(lo, coupled[0]));
            for pair in coupled.windows(2) {
                energies.push(self.bisect(pair[0], pair[1]));
            }
            energies.push(self.bisect(coupled[coupled.len() - 1], hi));
        }
        // decoupled levels are exact eigenvalues with zero overlap
        for (w, g) in self.frequencies.iter().zip(&self.couplings) {
            if *g == 0.0 {
                energies.push(*w);
            }
        }
        energies.sort_by(f64::total_cmp);

        let overlaps_sq: Vec<f64> = energies
            .iter()
            .map(|&e| {
                let mut s = 1.0;
                let mut at_pole = false;
                for (w, g) in self.frequencies.iter().zip(&self.couplings) {
                    if *g == 0.0 {
                        if e == *w {
                            at_pole = true;
                        }
                        continue;
                    }
                    let d = e - w;
                    s += (g / d) * (g / d);
                }
                if at_pole {
                    0.0
                } else {
                    1.0 / s
                }
            })
            .collect();

        Eigensystem { energies, overlaps_sq }
    }

    /// Bisection of the secular function on an interlacing interval. The
    /// function rises from -inf at the left pole to +inf at the right one,
    /// so the bracket never fails; iterate to floating-point resolution.
    fn bisect(&self, left: f64, right: f64) -> f64 {
        // smallest representable step off the poles themselves
        let mut a = left.next_up();
        let mut b = right.next_down();
        if a >= b {
            return left;
        }
        if self.secular(a) >= 0.0 {
            return a;
        }
        if self.secular(b) <= 0.0 {
            return b;
        }
        for _ in 0..120 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if self.secular(mid) < 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    }

    /// Survival amplitude of the discrete level: `sum_k |c_k|^2 e^{-i E_k t}`.
    pub fn survival_series(&self, times: &[f64]) -> Result<Vec<C64>> {
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidInput("times must be finite".into()));
        }
        let eig = self.eigensystem();
        Ok(times
            .iter()
            .map(|&t| {
                eig.energies
                    .iter()
                    .zip(&eig.overlaps_sq)
                    .map(|(&e, &w)| C64::new(0.0, -e * t).exp() * w)
                    .sum()
            })
            .collect())
    }
}
