//! Floquet-Hill discretization of the linearized operator.
//!
//! Perturbations `e^{i xi z} v(z)` with `v` `2pi`-periodic turn the eigenvalue
//! problem into `lambda D v = -L v` on Fourier modes `n = -N..=N`, where
//! `D = diag(i (n + xi))` and `L` carries the dispersion on the diagonal and
//! the profile harmonics on the bands `|n - m| = 1, 2, 3`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::stokes::StokesWave;
use crate::symbols::ModelParams;

pub const DEFAULT_MODES: usize = 32;
pub const MIN_MODES: usize = 8;

/// `0.25 min(gamma, 1)`: wide enough for the modulational pair, narrow enough
/// to exclude the other Floquet branches.
pub fn default_window(p: &ModelParams) -> f64 {
    0.25 * p.gamma.min(1.0)
}

/// A wave, a perturbation amplitude and Floquet exponent, and a truncation.
#[derive(Debug, Clone)]
pub struct FloquetProblem {
    pub wave: StokesWave,
    pub a: f64,
    pub xi: f64,
    pub n_modes: usize,
}

impl FloquetProblem {
    pub fn new(wave: &StokesWave, a: f64, xi: f64, n_modes: usize) -> Result<Self> {
        if !(xi > 0.0 && xi <= 0.5) {
            return Err(Error::FloquetExponent {
                xi,
                range: "(0, 1/2]",
            });
        }
        if n_modes < MIN_MODES {
            return Err(Error::Truncation(n_modes));
        }
        if !(a.is_finite() && a.abs() <= wave.amplitude_bound()) {
            return Err(Error::AmplitudeTooLarge {
                a,
                bound: wave.amplitude_bound(),
            });
        }
        Ok(Self {
            wave: wave.clone(),
            a,
            xi,
            n_modes,
        })
    }

    /// Fourier index of row `i`.
    fn mode(&self, i: usize) -> i64 {
        i as i64 - self.n_modes as i64
    }

    /// `(L, diag D)` in the mode ordering `n = -N..=N`.
    pub fn assemble(&self) -> (DMatrix<Complex64>, DVector<Complex64>) {
        let size = 2 * self.n_modes + 1;
        let w = &self.wave;
        let (beta, gamma, k) = (w.params.beta, w.params.gamma, w.k);
        let a = self.a;
        let c = w.c0 + a * a * w.c2;
        let bands = [0.0, a / 2.0, a * a * w.a2 / 2.0, a * a * a * w.a3 / 2.0];

        let mut l = DMatrix::<Complex64>::zeros(size, size);
        let mut d = DVector::<Complex64>::zeros(size);
        for i in 0..size {
            let nu = self.mode(i) as f64 + self.xi;
            let scale = -k * k * nu * nu;
            d[i] = Complex64::new(0.0, nu);
            l[(i, i)] = Complex64::new(scale * (-c + beta * w.symbol.m(k * nu)) - gamma, 0.0);
            for j in 0..size {
                let offset = i.abs_diff(j);
                if (1..=3).contains(&offset) {
                    l[(i, j)] = Complex64::new(scale * 2.0 * bands[offset], 0.0);
                }
            }
        }
        (l, d)
    }

    /// Eigenvalues of `-D^{-1} L` with `|lambda| <= window_radius`.
    pub fn spectrum(&self, window_radius: f64) -> Result<FloquetSpectrum> {
        if !(window_radius > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "window radius must be positive, got {window_radius}"
            )));
        }
        let (l, d) = self.assemble();
        let mut a = l;
        for (i, mut row) in a.row_iter_mut().enumerate() {
            let inv = -d[i].inv();
            row.iter_mut().for_each(|x| *x *= inv);
        }
        let all = a
            .try_schur(1e-15, 10_000)
            .and_then(|s| s.eigenvalues())
            .ok_or(Error::Eigensolver {
                n_modes: self.n_modes,
            })?;
        let mut eigenvalues: Vec<Complex64> = all
            .iter()
            .copied()
            .filter(|z| z.norm() <= window_radius)
            .collect();
        eigenvalues.sort_by(|x, y| x.im.total_cmp(&y.im).then(x.re.total_cmp(&y.re)));
        let max_real = eigenvalues.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
        Ok(FloquetSpectrum {
            eigenvalues,
            window_radius,
            max_real_in_window: max_real,
            n_modes: self.n_modes,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FloquetSpectrum {
    pub eigenvalues: Vec<Complex64>,
    pub window_radius: f64,
    pub max_real_in_window: f64,
    pub n_modes: usize,
}

/// Eigenvalue of the zero-amplitude operator on `e^{i(n+xi)z}`:
/// `i [gamma (nu - 1/nu) + beta k^2 nu (m(k) - m(k nu))]`, `nu = n + xi`.
pub fn unperturbed_eigenvalue(wave: &StokesWave, n: i64, xi: f64) -> Complex64 {
    let (beta, gamma, k) = (wave.params.beta, wave.params.gamma, wave.k);
    let nu = n as f64 + xi;
    let m = &wave.symbol;
    Complex64::new(
        0.0,
        gamma * (nu - 1.0 / nu) + beta * k * k * nu * (m.m(k) - m.m(k * nu)),
    )
}

pub fn max_growth(wave: &StokesWave, a: f64, xi: f64, n_modes: usize, window: f64) -> Result<f64> {
    Ok(FloquetProblem::new(wave, a, xi, n_modes)?
        .spectrum(window)?
        .max_real_in_window)
}

/// Reasons a finite `(a, xi)` spectrum cannot be compared with the
/// leading-order modulational theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeViolation {
    /// `|a A2|` or `|a^2 A3|` above 0.01: the truncated profile is not small.
    LargeHarmonics,
    /// The modulational pair at `xi` is not well inside the window.
    PairOutsideWindow,
    /// Another Floquet branch lies close to the window at zero amplitude.
    BranchNearWindow,
    /// Predicted unstable, but `2 xi` already leaves the unstable sideband or
    /// the predicted growth is below the detection threshold.
    OutsideSideband,
}

/// Checks whether `(wave, a, xi)` sits in the small-amplitude, long-wave
/// regime where the sign of the index should be visible in the Hill spectrum.
pub fn regime_check(
    wave: &StokesWave,
    a: f64,
    xi: f64,
    n_modes: usize,
    window: f64,
) -> Option<RegimeViolation> {
    if (a * wave.a2).abs() > 0.01 || (a * a * wave.a3).abs() > 0.01 {
        return Some(RegimeViolation::LargeHarmonics);
    }
    let n = n_modes as i64;
    for m in -n..=n {
        let lam = unperturbed_eigenvalue(wave, m, xi).norm();
        if m.abs() == 1 {
            if lam > 0.5 * window {
                return Some(RegimeViolation::PairOutsideWindow);
            }
        } else if lam < 1.5 * window {
            return Some(RegimeViolation::BranchNearWindow);
        }
    }
    let (s, p, k) = (&wave.symbol, &wave.params, wave.k);
    let num = 2.0 * p.gamma + p.beta * k.powi(3) * (k * s.m2(k) + 2.0 * s.m1(k));
    let den = crate::mi_index::phase_factor_numerator(s, p, k);
    if num * den < 0.0 {
        let band = a.abs() * k * k * (8.0 / (num * den).abs()).sqrt();
        let x2 = xi * xi;
        let growth = 0.5
            * (-(x2 * x2 * num * num) - 8.0 * k.powi(4) * x2 * a * a * num / den)
                .max(0.0)
                .sqrt();
        if 2.0 * xi > band || growth < 1e-7 {
            return Some(RegimeViolation::OutsideSideband);
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n_modes: usize,
    pub max_growth: f64,
    /// `|growth(N) - growth(previous N)|`, absent for the first row.
    pub difference: Option<f64>,
}

pub fn convergence_study(
    wave: &StokesWave,
    a: f64,
    xi: f64,
    n_list: &[usize],
    window: f64,
) -> Result<Vec<ConvergenceRow>> {
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "truncations must be strictly ascending".into(),
        ));
    }
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let g = max_growth(wave, a, xi, n, window)?;
        let difference = rows.last().map(|r| (g - r.max_growth).abs());
        rows.push(ConvergenceRow {
            n_modes: n,
            max_growth: g,
            difference,
        });
    }
    Ok(rows)
}
