//! Dispersion symbols `m(k)` and the linear wave speeds derived from them.
//!
//! A symbol is evaluated on `k >= 0` and extended evenly to negative
//! wavenumbers. Every built-in symbol carries analytic first and second
//! derivatives; symbols with a removable singularity at the origin switch to a
//! truncated Taylor series below [`SERIES_CUTOFF`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Below this wavenumber the ILW and Whitham-type symbols use their series.
pub const SERIES_CUTOFF: f64 = 1e-3;

/// Names accepted by [`make_symbol`].
pub const BUILTIN_NAMES: [&str; 6] = ["kdv", "fkdv", "ilw", "whitham", "kdv_st", "whitham_st"];

/// Value of a symbol and its first two derivatives at one wavenumber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymbolValue {
    pub m: f64,
    pub m1: f64,
    pub m2: f64,
}

type ScalarFn = dyn Fn(f64) -> f64 + Send + Sync;

#[derive(Clone)]
struct CustomFns {
    m: Arc<ScalarFn>,
    m1: Arc<ScalarFn>,
    m2: Arc<ScalarFn>,
}

#[derive(Clone)]
enum Kind {
    Kdv,
    Fkdv {
        delta: f64,
    },
    Ilw,
    /// `sqrt(tanh(k)/k * (1 + T k^2))`; plain Whitham is `T = 0`.
    Whitham {
        tension: f64,
    },
    /// `1 - k^2 + 3 T k^2`.
    KdvTension {
        tension: f64,
    },
    Custom(CustomFns),
}

/// A Fourier multiplier symbol together with its model parameters.
#[derive(Clone)]
pub struct DispersionSymbol {
    name: String,
    params: BTreeMap<String, f64>,
    kind: Kind,
    growth_exponent: f64,
}

impl fmt::Debug for DispersionSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DispersionSymbol")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("growth_exponent", &self.growth_exponent)
            .finish()
    }
}

impl fmt::Display for DispersionSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        let mut sep = ':';
        for (key, value) in &self.params {
            write!(f, "{sep}{key}={value}")?;
            sep = ',';
        }
        Ok(())
    }
}

impl DispersionSymbol {
    /// `m(k) = 1 - k^2`, the classical Ostrovsky equation.
    pub fn kdv() -> Self {
        Self::builtin("kdv", BTreeMap::new(), Kind::Kdv, 2.0)
    }

    /// `m(k) = 1 - |k|^delta` with `delta > 1/2`.
    pub fn fkdv(delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.5) {
            return Err(Error::InvalidParameter {
                name: "delta".into(),
                value: delta,
                reason: "fractional order must satisfy delta > 1/2",
            });
        }
        let params = BTreeMap::from([("delta".to_string(), delta)]);
        Ok(Self::builtin("fkdv", params, Kind::Fkdv { delta }, delta))
    }

    /// `m(k) = k coth(k)`.
    pub fn ilw() -> Self {
        Self::builtin("ilw", BTreeMap::new(), Kind::Ilw, 1.0)
    }

    /// `m(k) = sqrt(tanh(k) / k)`.
    pub fn whitham() -> Self {
        Self::builtin(
            "whitham",
            BTreeMap::new(),
            Kind::Whitham { tension: 0.0 },
            -0.5,
        )
    }

    /// `m(k) = 1 - k^2 + 3 T k^2`.
    pub fn kdv_tension(tension: f64) -> Result<Self> {
        check_tension(tension)?;
        let params = BTreeMap::from([("T".to_string(), tension)]);
        let alpha = if tension == 1.0 / 3.0 { 0.0 } else { 2.0 };
        Ok(Self::builtin(
            "kdv_st",
            params,
            Kind::KdvTension { tension },
            alpha,
        ))
    }

    /// `m(k) = sqrt(tanh(k)/k * (1 + T k^2))`.
    pub fn whitham_tension(tension: f64) -> Result<Self> {
        check_tension(tension)?;
        let params = BTreeMap::from([("T".to_string(), tension)]);
        let alpha = if tension > 0.0 { 0.5 } else { -0.5 };
        Ok(Self::builtin(
            "whitham_st",
            params,
            Kind::Whitham { tension },
            alpha,
        ))
    }

    /// A symbol supplied programmatically. The closures are evaluated on
    /// `k >= 0` only; negative wavenumbers use the even extension.
    pub fn custom<M, M1, M2>(name: &str, growth_exponent: f64, m: M, m1: M1, m2: M2) -> Self
    where
        M: Fn(f64) -> f64 + Send + Sync + 'static,
        M1: Fn(f64) -> f64 + Send + Sync + 'static,
        M2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let fns = CustomFns {
            m: Arc::new(m),
            m1: Arc::new(m1),
            m2: Arc::new(m2),
        };
        Self::builtin(name, BTreeMap::new(), Kind::Custom(fns), growth_exponent)
    }

    fn builtin(name: &str, params: BTreeMap<String, f64>, kind: Kind, alpha: f64) -> Self {
        Self {
            name: name.to_string(),
            params,
            kind,
            growth_exponent: alpha,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    /// Exponent `alpha` of the large-`k` growth `m(k) ~ k^alpha`.
    pub fn growth_exponent(&self) -> f64 {
        self.growth_exponent
    }

    /// Surface tension coefficient, when the symbol has one.
    pub fn tension(&self) -> Option<f64> {
        match self.kind {
            Kind::KdvTension { tension } => Some(tension),
            Kind::Whitham { tension } if self.name == "whitham_st" => Some(tension),
            _ => None,
        }
    }

    /// Same family with a different surface tension. `None` for symbols
    /// without a tension parameter.
    pub fn with_tension(&self, tension: f64) -> Option<Result<Self>> {
        match self.name.as_str() {
            "kdv_st" => Some(Self::kdv_tension(tension)),
            "whitham_st" => Some(Self::whitham_tension(tension)),
            _ => None,
        }
    }

    /// Evaluates `m`, `m'` and `m''` at `k >= 0`.
    pub fn eval(&self, k: f64) -> Result<SymbolValue> {
        if !(k >= 0.0) || !k.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "symbol `{}` evaluated at k = {k}; wavenumbers must be non-negative",
                self.name
            )));
        }
        let v = self.raw(k);
        if v.m.is_finite() && v.m1.is_finite() && v.m2.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                name: self.name.clone(),
                k,
            })
        }
    }

    /// `m(k)` on the even extension.
    pub fn m(&self, k: f64) -> f64 {
        self.raw(k.abs()).m
    }

    /// `m'(k)` on the (odd) extension.
    pub fn m1(&self, k: f64) -> f64 {
        let d = self.raw(k.abs()).m1;
        if k < 0.0 {
            -d
        } else {
            d
        }
    }

    /// `m''(k)` on the even extension.
    pub fn m2(&self, k: f64) -> f64 {
        self.raw(k.abs()).m2
    }

    fn raw(&self, k: f64) -> SymbolValue {
        match &self.kind {
            Kind::Kdv => SymbolValue {
                m: 1.0 - k * k,
                m1: -2.0 * k,
                m2: -2.0,
            },
            Kind::Fkdv { delta } => {
                let d = *delta;
                SymbolValue {
                    m: 1.0 - k.powf(d),
                    m1: -d * k.powf(d - 1.0),
                    m2: -d * (d - 1.0) * k.powf(d - 2.0),
                }
            }
            Kind::Ilw => ilw(k),
            Kind::Whitham { tension } => whitham(k, *tension),
            Kind::KdvTension { tension } => {
                let s = 3.0 * tension;
                SymbolValue {
                    m: 1.0 - k * k + s * k * k,
                    m1: -2.0 * k + 2.0 * s * k,
                    m2: -2.0 + 2.0 * s,
                }
            }
            Kind::Custom(f) => SymbolValue {
                m: (f.m)(k),
                m1: (f.m1)(k),
                m2: (f.m2)(k),
            },
        }
    }
}

fn check_tension(tension: f64) -> Result<()> {
    if tension.is_finite() && tension >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "T".into(),
            value: tension,
            reason: "surface tension must be non-negative",
        })
    }
}

fn ilw(k: f64) -> SymbolValue {
    if k < SERIES_CUTOFF {
        let k2 = k * k;
        return SymbolValue {
            m: 1.0 + k2 / 3.0 - k2 * k2 / 45.0,
            m1: 2.0 * k / 3.0 - 4.0 * k * k2 / 45.0,
            m2: 2.0 / 3.0 - 4.0 * k2 / 15.0,
        };
    }
    let coth = 1.0 / k.tanh();
    let csch2 = (1.0 / k.sinh()).powi(2);
    SymbolValue {
        m: k * coth,
        m1: coth - k * csch2,
        m2: 2.0 * csch2 * (k * coth - 1.0),
    }
}

fn whitham(k: f64, tension: f64) -> SymbolValue {
    if k < SERIES_CUTOFF {
        // sqrt(1 + b1 k^2 + b2 k^4) to fourth order
        let b1 = tension - 1.0 / 3.0;
        let b2 = 2.0 / 15.0 - tension / 3.0;
        let q = b2 / 2.0 - b1 * b1 / 8.0;
        let k2 = k * k;
        return SymbolValue {
            m: 1.0 + 0.5 * b1 * k2 + q * k2 * k2,
            m1: b1 * k + 4.0 * q * k * k2,
            m2: b1 + 12.0 * q * k2,
        };
    }
    let t = k.tanh();
    let sech2 = (1.0 / k.cosh()).powi(2);
    let k2 = k * k;
    let g = t / k;
    let g1 = (k * sech2 - t) / k2;
    let g2 = (2.0 * t - 2.0 * k * sech2 - 2.0 * k2 * sech2 * t) / (k2 * k);
    let w = 1.0 + tension * k2;
    let h = g * w;
    let h1 = g1 * w + 2.0 * tension * k * g;
    let h2 = g2 * w + 4.0 * tension * k * g1 + 2.0 * tension * g;
    let m = h.sqrt();
    SymbolValue {
        m,
        m1: h1 / (2.0 * m),
        m2: h2 / (2.0 * m) - h1 * h1 / (4.0 * m * m * m),
    }
}

/// Builds a built-in symbol by name. `custom` symbols are constructed with
/// [`DispersionSymbol::custom`] instead.
pub fn make_symbol(name: &str, params: &BTreeMap<String, f64>) -> Result<DispersionSymbol> {
    let allowed: &[&str] = match name {
        "kdv" | "ilw" | "whitham" => &[],
        "fkdv" => &["delta"],
        "kdv_st" | "whitham_st" => &["T"],
        "custom" => {
            return Err(Error::InvalidArgument(
                "custom symbols must be supplied programmatically".into(),
            ))
        }
        other => return Err(Error::UnknownSymbol(other.to_string())),
    };
    if let Some(key) = params.keys().find(|key| !allowed.contains(&key.as_str())) {
        return Err(Error::InvalidArgument(format!(
            "symbol `{name}` does not take parameter `{key}`"
        )));
    }
    let get = |key: &'static str| params.get(key).copied().ok_or(Error::MissingParameter(key));
    match name {
        "kdv" => Ok(DispersionSymbol::kdv()),
        "ilw" => Ok(DispersionSymbol::ilw()),
        "whitham" => Ok(DispersionSymbol::whitham()),
        "fkdv" => DispersionSymbol::fkdv(get("delta")?),
        "kdv_st" => DispersionSymbol::kdv_tension(get("T")?),
        "whitham_st" => DispersionSymbol::whitham_tension(get("T")?),
        _ => unreachable!(),
    }
}

/// Splits `name[:key=value,...]` into the name and its parameter map.
/// `t` is accepted as an alias for `T`.
pub fn parse_spec(spec: &str) -> Result<(String, BTreeMap<String, f64>)> {
    let spec = spec.trim();
    let (name, rest) = match spec.split_once(':') {
        Some((name, rest)) => (name, Some(rest)),
        None => (spec, None),
    };
    let mut params = BTreeMap::new();
    if let Some(rest) = rest {
        for pair in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::MalformedSpec(spec.to_string()))?;
            let key = match key.trim() {
                "t" => "T",
                k => k,
            };
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::MalformedSpec(spec.to_string()))?;
            params.insert(key.to_string(), value);
        }
    }
    let name = name.trim();
    if name.is_empty() {
        return Err(Error::MalformedSpec(spec.to_string()));
    }
    Ok((name.to_string(), params))
}

impl FromStr for DispersionSymbol {
    type Err = Error;

    /// Parses `name[:key=value,...]`, e.g. `fkdv:delta=1.5`.
    fn from_str(spec: &str) -> Result<Self> {
        let (name, params) = parse_spec(spec)?;
        make_symbol(&name, &params)
    }
}

/// The coefficients `(beta, gamma)` fixing an equation instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub beta: f64,
    pub gamma: f64,
}

impl ModelParams {
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        if !(beta.is_finite() && beta != 0.0) {
            return Err(Error::InvalidParameter {
                name: "beta".into(),
                value: beta,
                reason: "dispersion coefficient must be non-zero",
            });
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParameter {
                name: "gamma".into(),
                value: gamma,
                reason: "rotation coefficient must be positive",
            });
        }
        Ok(Self { beta, gamma })
    }

    /// `beta = sign(alpha)`, `gamma = |alpha|`. The zero sets of both index
    /// factors depend on `(beta, gamma)` only through `alpha = gamma / beta`.
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        Self::new(alpha.signum(), alpha.abs())
    }

    pub fn alpha(&self) -> f64 {
        self.gamma / self.beta
    }
}

fn check_k(k: f64) -> Result<()> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveWavenumber(k))
    }
}

/// `c_p(k) = beta m(k) + gamma / k^2`.
pub fn phase_velocity(s: &DispersionSymbol, p: &ModelParams, k: f64) -> Result<f64> {
    check_k(k)?;
    Ok(p.beta * s.eval(k)?.m + p.gamma / (k * k))
}

/// `c_g(k) = beta (m + k m') - gamma / k^2`.
pub fn group_velocity(s: &DispersionSymbol, p: &ModelParams, k: f64) -> Result<f64> {
    check_k(k)?;
    let v = s.eval(k)?;
    Ok(p.beta * (v.m + k * v.m1) - p.gamma / (k * k))
}

/// `dc_g/dk` together with its numerator over `k^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupVelocitySlope {
    pub value: f64,
    /// `2 gamma + beta k^3 (k m'' + 2 m')`
    pub numerator: f64,
}

pub fn group_velocity_derivative(
    s: &DispersionSymbol,
    p: &ModelParams,
    k: f64,
) -> Result<GroupVelocitySlope> {
    check_k(k)?;
    let v = s.eval(k)?;
    let k3 = k * k * k;
    Ok(GroupVelocitySlope {
        value: p.beta * (2.0 * v.m1 + k * v.m2) + 2.0 * p.gamma / k3,
        numerator: 2.0 * p.gamma + p.beta * k3 * (k * v.m2 + 2.0 * v.m1),
    })
}

/// Outcome of the growth-condition fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthCheck {
    pub passed: bool,
    pub alpha: f64,
    pub fitted_slope: f64,
    /// `min |m(k)| / k^alpha` over the fitted tail.
    pub c1: f64,
    /// `max |m(k)| / k^alpha` over the fitted tail.
    pub c2: f64,
}

/// First wavenumber where `m(k) = m(n k)` was detected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonantPoint {
    pub n: u32,
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub h1_passed: bool,
    /// `m(0)` as evaluated.
    pub m_at_zero: f64,
    pub h2: GrowthCheck,
    pub h3_passed: bool,
    pub h3_first_violation: Option<ResonantPoint>,
}

/// Checks normalization (H1), power-law growth (H2) and the absence of
/// harmonic coincidences `m(k) = m(nk)`, `n = 2, 3` (H3) on the grid
/// `k_i = kmax * i / n_samples`.
pub fn check_hypotheses(
    s: &DispersionSymbol,
    kmax: f64,
    n_samples: usize,
) -> Result<HypothesisReport> {
    if !(kmax.is_finite() && kmax > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "kmax must be positive, got {kmax}"
        )));
    }
    if n_samples < 100 {
        return Err(Error::InvalidArgument(format!(
            "at least 100 samples are required, got {n_samples}"
        )));
    }
    let grid: Vec<f64> = (1..=n_samples)
        .map(|i| kmax * i as f64 / n_samples as f64)
        .collect();

    let m_at_zero = s.m(0.0);
    let finite = grid.iter().all(|&k| s.eval(k).is_ok() && s.m(-k) == s.m(k));
    let h1_passed = finite && (m_at_zero - 1.0).abs() <= 1e-12;

    let h2 = growth_check(s, &grid[n_samples / 2..]);

    let mut first: Option<ResonantPoint> = None;
    for n in [2u32, 3] {
        if let Some(k) = first_coincidence(s, &grid, n as f64) {
            if first.is_none_or(|f| k < f.k) {
                first = Some(ResonantPoint { n, k });
            }
        }
    }

    Ok(HypothesisReport {
        h1_passed,
        m_at_zero,
        h2,
        h3_passed: first.is_none(),
        h3_first_violation: first,
    })
}

fn growth_check(s: &DispersionSymbol, tail: &[f64]) -> GrowthCheck {
    let alpha = s.growth_exponent();
    let values: Vec<f64> = tail.iter().map(|&k| s.m(k)).collect();
    let one_signed = values.iter().all(|v| *v > 0.0) || values.iter().all(|v| *v < 0.0);
    let pts: Vec<(f64, f64)> = tail
        .iter()
        .zip(&values)
        .filter(|(_, v)| **v != 0.0 && v.is_finite())
        .map(|(&k, &v)| (k.ln(), v.abs().ln()))
        .collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    let slope = if sxx > 0.0 { sxy / sxx } else { f64::NAN };
    let ratios = tail
        .iter()
        .zip(&values)
        .map(|(&k, &v)| v.abs() / k.powf(alpha));
    let c1 = ratios.clone().fold(f64::INFINITY, f64::min);
    let c2 = ratios.fold(0.0, f64::max);
    GrowthCheck {
        passed: one_signed && (slope - alpha).abs() <= 0.05,
        alpha,
        fitted_slope: slope,
        c1,
        c2,
    }
}

fn first_coincidence(s: &DispersionSymbol, grid: &[f64], n: f64) -> Option<f64> {
    let diff = |k: f64| s.m(k) - s.m(n * k);
    let exact_zero = |k: f64, d: f64| d.abs() <= 1e-14 * (1.0 + s.m(k).abs());
    let mut prev: Option<(f64, f64)> = None;
    for &k in grid {
        let d = diff(k);
        if exact_zero(k, d) {
            return Some(k);
        }
        if let Some((kp, dp)) = prev {
            if dp.signum() != d.signum() {
                return crate::roots::bisect(diff, kp, k, 1e-12).ok();
            }
        }
        prev = Some((k, d));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn all_builtins() -> Vec<DispersionSymbol> {
        vec![
            DispersionSymbol::kdv(),
            DispersionSymbol::fkdv(1.5).unwrap(),
            DispersionSymbol::fkdv(0.8).unwrap(),
            DispersionSymbol::ilw(),
            DispersionSymbol::whitham(),
            DispersionSymbol::kdv_tension(0.2).unwrap(),
            DispersionSymbol::whitham_tension(0.2).unwrap(),
            DispersionSymbol::whitham_tension(0.6).unwrap(),
        ]
    }

    #[test]
    fn kdv_values_at_one() {
        let v = DispersionSymbol::kdv().eval(1.0).unwrap();
        assert_eq!(
            v,
            SymbolValue {
                m: 0.0,
                m1: -2.0,
                m2: -2.0
            }
        );
    }

    #[test]
    fn removable_singularities_normalized() {
        for s in [DispersionSymbol::ilw(), DispersionSymbol::whitham()] {
            assert_eq!(s.eval(0.0).unwrap().m, 1.0);
            // series and closed form meet continuously at the cutoff
            let below = s.m(SERIES_CUTOFF * (1.0 - 1e-9));
            let above = s.m(SERIES_CUTOFF * (1.0 + 1e-9));
            assert!(
                (below - above).abs() < 1e-12,
                "{}: {below} vs {above}",
                s.name()
            );
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for s in all_builtins() {
            let mut k = 0.1;
            while k <= 50.0 {
                let v = s.eval(k).unwrap();
                let h = 1e-4;
                let fd1 = (s.m(k + h) - s.m(k - h)) / (2.0 * h);
                // second differences lose eps*|m|/h^2 to rounding; scale the step with k
                let h = 1e-4 * k.max(1.0);
                let fd2 = (s.m(k + h) - 2.0 * s.m(k) + s.m(k - h)) / (h * h);
                assert!(
                    (v.m1 - fd1).abs() / (1.0 + v.m1.abs()) <= 1e-6,
                    "{} m1 at {k}: {} vs {fd1}",
                    s.name(),
                    v.m1
                );
                assert!(
                    (v.m2 - fd2).abs() / (1.0 + v.m2.abs()) <= 1e-6,
                    "{} m2 at {k}: {} vs {fd2}",
                    s.name(),
                    v.m2
                );
                k *= 1.07;
            }
        }
    }

    #[test]
    fn series_derivatives_match_closed_form_nearby() {
        for s in [
            DispersionSymbol::ilw(),
            DispersionSymbol::whitham(),
            DispersionSymbol::whitham_tension(0.3).unwrap(),
        ] {
            let lo = s.eval(SERIES_CUTOFF * (1.0 - 1e-9)).unwrap();
            let hi = s.eval(SERIES_CUTOFF * (1.0 + 1e-9)).unwrap();
            assert!((lo.m1 - hi.m1).abs() < 1e-9, "{}", s.name());
            assert!((lo.m2 - hi.m2).abs() < 1e-8, "{}", s.name());
        }
    }

    #[test]
    fn reductions_are_exact() {
        let kdv = DispersionSymbol::kdv();
        let fkdv2 = DispersionSymbol::fkdv(2.0).unwrap();
        let kst0 = DispersionSymbol::kdv_tension(0.0).unwrap();
        let wh = DispersionSymbol::whitham();
        let wst0 = DispersionSymbol::whitham_tension(0.0).unwrap();
        for i in 0..500 {
            let k = 0.013 * i as f64;
            let a = kdv.eval(k).unwrap();
            let b = fkdv2.eval(k).unwrap();
            assert_relative_eq!(a.m, b.m, epsilon = 1e-15, max_relative = 2e-16);
            assert_relative_eq!(a.m1, b.m1, epsilon = 1e-15, max_relative = 2e-16);
            assert_relative_eq!(a.m2, b.m2, epsilon = 1e-15, max_relative = 2e-16);
            assert_eq!(a, kst0.eval(k).unwrap());
            assert_eq!(wh.eval(k).unwrap(), wst0.eval(k).unwrap());
        }
    }

    #[test]
    fn evenness_of_extension() {
        for s in all_builtins() {
            for k in [0.0005, 0.3, 1.0, 7.5] {
                assert_eq!(s.m(-k), s.m(k));
                assert_eq!(s.m2(-k), s.m2(k));
                assert_eq!(s.m1(-k), -s.m1(k));
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            make_symbol("bo", &BTreeMap::new()),
            Err(Error::UnknownSymbol(_))
        ));
        assert!(matches!(
            make_symbol("fkdv", &BTreeMap::new()),
            Err(Error::MissingParameter("delta"))
        ));
        assert!(DispersionSymbol::fkdv(0.5).is_err());
        assert!(DispersionSymbol::kdv_tension(-0.1).is_err());
        assert!(DispersionSymbol::kdv().eval(-1.0).is_err());
        assert!("whitham_st".parse::<DispersionSymbol>().is_err());
        assert!("kdv:delta=2".parse::<DispersionSymbol>().is_err());
        assert!("fkdv:delta".parse::<DispersionSymbol>().is_err());
        assert!(matches!(parse_spec(":T=1"), Err(Error::MalformedSpec(_))));
        let (name, params) = parse_spec("kdv_st:t=0.25").unwrap();
        assert_eq!((name.as_str(), params["T"]), ("kdv_st", 0.25));
    }

    #[test]
    fn parses_spec_strings() {
        let s: DispersionSymbol = "fkdv:delta=1.5".parse().unwrap();
        assert_eq!(s.name(), "fkdv");
        assert_eq!(s.growth_exponent(), 1.5);
        let s: DispersionSymbol = "whitham_st:T=0.2".parse().unwrap();
        assert_eq!(s.tension(), Some(0.2));
        assert_eq!(s.to_string(), "whitham_st:T=0.2");
        let s: DispersionSymbol = " ilw ".parse().unwrap();
        assert_eq!(s.to_string(), "ilw");
    }

    #[test]
    fn velocities_kdv() {
        let s = DispersionSymbol::kdv();
        let p = ModelParams::new(1.0, 1.0).unwrap();
        assert_eq!(phase_velocity(&s, &p, 1.0).unwrap(), 1.0);
        assert_eq!(phase_velocity(&s, &p, 2.0).unwrap(), -2.75);
        assert_eq!(group_velocity_derivative(&s, &p, 1.0).unwrap().value, -4.0);
        assert_eq!(group_velocity_derivative(&s, &p, 0.5).unwrap().value, 13.0);
        let kc = (1.0f64 / 3.0).powf(0.25);
        assert!(group_velocity_derivative(&s, &p, kc).unwrap().value.abs() < 1e-14);
        assert!(phase_velocity(&s, &p, 0.0).is_err());
        assert!(group_velocity(&s, &p, -1.0).is_err());
    }

    #[test]
    fn phase_velocity_decays_for_negative_growth() {
        let s = DispersionSymbol::whitham();
        let p = ModelParams::new(2.0, 3.0).unwrap();
        assert!(phase_velocity(&s, &p, 1e8).unwrap().abs() < 1e-3);
    }

    #[test]
    fn group_velocity_slope_matches_difference() {
        let p = ModelParams::new(-1.3, 0.7).unwrap();
        for s in all_builtins() {
            for k in [0.2, 0.9, 2.5, 6.0] {
                let h = 1e-5 * k;
                let fd = (group_velocity(&s, &p, k + h).unwrap()
                    - group_velocity(&s, &p, k - h).unwrap())
                    / (2.0 * h);
                let d = group_velocity_derivative(&s, &p, k).unwrap();
                assert!((d.value - fd).abs() <= 1e-6 * (1.0 + d.value.abs()));
                assert_relative_eq!(d.numerator, d.value * k * k * k, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn hypotheses_kdv_and_whitham() {
        let r = check_hypotheses(&DispersionSymbol::kdv(), 100.0, 1000).unwrap();
        assert!(r.h1_passed && r.h2.passed && r.h3_passed, "{r:?}");
        assert_eq!(r.h2.alpha, 2.0);
        let r = check_hypotheses(&DispersionSymbol::whitham(), 100.0, 1000).unwrap();
        assert!(r.h1_passed && r.h2.passed && r.h3_passed, "{r:?}");
        assert_eq!(r.h2.alpha, -0.5);
        // m(k) <= k^(-1/2) in the tail, so the upper constant stays below one
        assert!(r.h2.c2 <= 1.0 + 1e-12 && r.h2.c1 > 0.9);
        let r = check_hypotheses(&DispersionSymbol::ilw(), 100.0, 1000).unwrap();
        assert!(r.h1_passed && r.h2.passed && r.h3_passed, "{r:?}");
    }

    #[test]
    fn hypotheses_with_tension() {
        // weak tension: m decreases then increases, so m(k) = m(2k) somewhere
        let r = check_hypotheses(
            &DispersionSymbol::whitham_tension(0.2).unwrap(),
            100.0,
            2000,
        )
        .unwrap();
        let v = r.h3_first_violation.expect("weak tension coincidence");
        let s = DispersionSymbol::whitham_tension(0.2).unwrap();
        let n = v.n as f64;
        assert!((s.m(v.k) - s.m(n * v.k)).abs() < 1e-9);
        // strong tension: monotone
        let r = check_hypotheses(
            &DispersionSymbol::whitham_tension(0.5).unwrap(),
            100.0,
            2000,
        )
        .unwrap();
        assert!(r.h3_passed && r.h2.passed, "{r:?}");
        // T = 1/3 makes the KdV symbol constant
        let r = check_hypotheses(
            &DispersionSymbol::kdv_tension(1.0 / 3.0).unwrap(),
            10.0,
            100,
        )
        .unwrap();
        assert!(!r.h3_passed);
        assert_eq!(r.h3_first_violation.unwrap().k, 0.1);
    }

    #[test]
    fn hypothesis_argument_checks() {
        assert!(check_hypotheses(&DispersionSymbol::kdv(), 10.0, 99).is_err());
        assert!(check_hypotheses(&DispersionSymbol::kdv(), 0.0, 100).is_err());
    }

    #[test]
    fn custom_symbol_uses_even_extension() {
        let s = DispersionSymbol::custom("bo", 1.0, |k| 1.0 + k, |_| 1.0, |_| 0.0);
        assert_eq!(s.m(-2.0), 3.0);
        assert_eq!(s.m1(-2.0), -1.0);
        let r = check_hypotheses(&s, 100.0, 200).unwrap();
        assert!(r.h1_passed && r.h2.passed && r.h3_passed);
    }
}
