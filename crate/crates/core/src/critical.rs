//! Critical wavenumbers, surface-tension thresholds and stability diagrams.
//!
//! The index changes sign where either factor does: a zero of
//! `c_p(k) - c_p(2k)` (first and second harmonic travel together) or a zero of
//! `dc_g/dk` (an extremum of the group velocity). Root searches work on the
//! numerators `3 gamma + 4 beta k^2 (m(k) - m(2k))` and
//! `2 gamma + beta k^3 (k m'' + 2 m')`, which have the same zeros for `k > 0`
//! and no poles.

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::floquet_hill::{self, RegimeViolation};
use crate::mi_index::{self, Classification};
use crate::roots;
use crate::stokes;
use crate::symbols::{self, DispersionSymbol, ModelParams};

/// Default bracket for numeric root searches.
pub const DEFAULT_BRACKET: (f64, f64) = (1e-2, 1e2);
/// Default number of log-spaced probes before bisection.
pub const DEFAULT_PROBES: usize = 400;
/// Tension values this close to 1/3 are treated as the inconclusive case.
pub const TENSION_THIRD_TOL: f64 = 1e-6;

const ROOT_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mechanism {
    /// `dc_g/dk = 0`
    GroupVelocityExtremum,
    /// `c_p(k) = c_p(2k)`
    PhaseVelocityCoincidence,
}

impl Mechanism {
    pub fn as_str(self) -> &'static str {
        match self {
            Mechanism::GroupVelocityExtremum => "group_velocity_extremum",
            Mechanism::PhaseVelocityCoincidence => "phase_velocity_coincidence",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Bisection,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalResult {
    pub model: String,
    pub beta: f64,
    pub gamma: f64,
    /// `delta` or `T` when the model has one.
    pub extra: BTreeMap<String, f64>,
    pub mechanism: Mechanism,
    pub kc: f64,
    pub method: Method,
}

fn phase_numerator(s: &DispersionSymbol, p: &ModelParams, k: f64) -> f64 {
    mi_index::phase_factor_numerator(s, p, k)
}

fn group_numerator(s: &DispersionSymbol, p: &ModelParams, k: f64) -> f64 {
    let k3 = k * k * k;
    2.0 * p.gamma + p.beta * k3 * (k * s.m2(k) + 2.0 * s.m1(k))
}

/// Critical wavenumber from the explicit formulas for the KdV-type symbols.
pub fn kc_closed_form(
    model: &str,
    p: &ModelParams,
    extra: &BTreeMap<String, f64>,
) -> Result<CriticalResult> {
    // validates the model name and its parameters
    symbols::make_symbol(model, extra).map_err(|e| match e {
        Error::UnknownSymbol(name) => Error::UnsupportedModel(name),
        other => other,
    })?;
    let (b, g) = (p.beta.abs(), p.gamma);
    let positive = p.beta > 0.0;
    let (kc, mechanism) = match model {
        "kdv" => {
            if positive {
                ((g / (3.0 * b)).powf(0.25), Mechanism::GroupVelocityExtremum)
            } else {
                (
                    (g / (4.0 * b)).powf(0.25),
                    Mechanism::PhaseVelocityCoincidence,
                )
            }
        }
        "fkdv" => {
            let d = extra["delta"];
            let e = 1.0 / (2.0 + d);
            if positive {
                (
                    (2.0 * g / (d * (1.0 + d) * b)).powf(e),
                    Mechanism::GroupVelocityExtremum,
                )
            } else {
                (
                    (3.0 * g / (4.0 * (2f64.powf(d) - 1.0) * b)).powf(e),
                    Mechanism::PhaseVelocityCoincidence,
                )
            }
        }
        "kdv_st" => {
            let t = extra["T"];
            if (t - 1.0 / 3.0).abs() < TENSION_THIRD_TOL {
                return Err(Error::InconclusiveTension);
            }
            let weak = t < 1.0 / 3.0;
            let s = (1.0 - 3.0 * t).abs();
            // the sign of beta (1 - 3T) decides which factor vanishes
            if positive == weak {
                (
                    (g / (3.0 * b * s)).powf(0.25),
                    Mechanism::GroupVelocityExtremum,
                )
            } else {
                (
                    (g / (4.0 * b * s)).powf(0.25),
                    Mechanism::PhaseVelocityCoincidence,
                )
            }
        }
        other => return Err(Error::UnsupportedModel(other.to_string())),
    };
    Ok(CriticalResult {
        model: model.to_string(),
        beta: p.beta,
        gamma: p.gamma,
        extra: extra.clone(),
        mechanism,
        kc,
        method: Method::ClosedForm,
    })
}

/// All critical wavenumbers found numerically, plus notes on anything
/// unexpected (several roots where a unique one was claimed).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalScan {
    pub roots: Vec<CriticalResult>,
    pub diagnostics: Vec<String>,
}

/// Zeros of both index factors in `bracket`, sorted by `k`.
pub fn critical_wavenumbers(
    s: &DispersionSymbol,
    p: &ModelParams,
    bracket: (f64, f64),
    n_probe: usize,
) -> Result<Vec<(f64, Mechanism)>> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidBracket { lo, hi });
    }
    for k in [lo, hi] {
        mi_index::index(s, p, k).map_err(|_| Error::InvalidBracket { lo, hi })?;
    }
    let probes = roots::log_grid(lo, hi, n_probe.max(2));
    let mut found: Vec<(f64, Mechanism)> =
        roots::sign_change_roots(|k| phase_numerator(s, p, k), &probes, ROOT_TOL)
            .into_iter()
            .map(|k| (k, Mechanism::PhaseVelocityCoincidence))
            .chain(
                roots::sign_change_roots(|k| group_numerator(s, p, k), &probes, ROOT_TOL)
                    .into_iter()
                    .map(|k| (k, Mechanism::GroupVelocityExtremum)),
            )
            .collect();
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(found)
}

pub fn kc_numeric(
    s: &DispersionSymbol,
    p: &ModelParams,
    bracket: (f64, f64),
) -> Result<CriticalScan> {
    let found = critical_wavenumbers(s, p, bracket, DEFAULT_PROBES)?;
    if found.is_empty() {
        return Err(Error::NoSignChange {
            lo: bracket.0,
            hi: bracket.1,
        });
    }
    let mut diagnostics = Vec::new();
    if matches!(s.name(), "ilw" | "whitham") && found.len() > 1 {
        let list: Vec<String> = found
            .iter()
            .map(|(k, m)| format!("{k:.12} ({})", m.as_str()))
            .collect();
        diagnostics.push(format!(
            "expected a unique critical wavenumber for {}, found {}: {}",
            s.name(),
            found.len(),
            list.join(", ")
        ));
    }
    let roots = found
        .into_iter()
        .map(|(kc, mechanism)| CriticalResult {
            model: s.name().to_string(),
            beta: p.beta,
            gamma: p.gamma,
            extra: s.params().clone(),
            mechanism,
            kc,
            method: Method::Bisection,
        })
        .collect();
    Ok(CriticalScan { roots, diagnostics })
}

/// A maximal wavenumber interval with constant index sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LabeledInterval {
    pub lo: f64,
    pub hi: f64,
    pub label: Classification,
}

/// Splits `k_range` at every critical wavenumber and labels the pieces.
/// Adjacent pieces with the same label (a double zero) are merged.
pub fn classify_intervals(
    s: &DispersionSymbol,
    p: &ModelParams,
    k_range: (f64, f64),
    n_probe: usize,
) -> Result<Vec<LabeledInterval>> {
    if n_probe < 100 {
        return Err(Error::InvalidArgument(format!(
            "at least 100 probes are required, got {n_probe}"
        )));
    }
    let crit = critical_wavenumbers(s, p, k_range, n_probe)?;
    let mut edges = vec![k_range.0];
    edges.extend(crit.iter().map(|c| c.0));
    edges.push(k_range.1);
    edges.dedup();
    let mut out: Vec<LabeledInterval> = Vec::new();
    for w in edges.windows(2) {
        let mid = (w[0] * w[1]).sqrt();
        let label = mi_index::index(s, p, mid)?.classification;
        match out.last_mut() {
            Some(prev) if prev.label == label => prev.hi = w[1],
            _ => out.push(LabeledInterval {
                lo: w[0],
                hi: w[1],
                label,
            }),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TcResult {
    pub variant: String,
    pub alpha: f64,
    pub tc: f64,
    /// Critical-wavenumber counts just below and above the threshold.
    pub count_below: usize,
    pub count_above: usize,
    /// Final tension bracket.
    pub bracket: (f64, f64),
}

const TC_PROBES: usize = 4000;
const TC_SCAN: [f64; 2] = [0.01, 1.0];
const TC_SCAN_POINTS: usize = 100;

fn critical_count(family: &DispersionSymbol, p: &ModelParams, t: f64) -> Result<usize> {
    let s = family.with_tension(t).expect("tension family")?;
    Ok(critical_wavenumbers(&s, p, DEFAULT_BRACKET, TC_PROBES)?.len())
}

/// Surface tension at which the number of critical wavenumbers drops from
/// three to one.
pub fn tc_of_alpha(variant: &str, alpha: f64, tol: f64) -> Result<TcResult> {
    if !(alpha.is_finite() && alpha != 0.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be non-zero, got {alpha}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let p = ModelParams::from_alpha(alpha)?;
    match variant {
        // the closed-form branches on either side meet (and blow up) at T = 1/3
        "kdv_st" => {
            return Ok(TcResult {
                variant: variant.to_string(),
                alpha,
                tc: 1.0 / 3.0,
                count_below: 1,
                count_above: 1,
                bracket: (1.0 / 3.0, 1.0 / 3.0),
            })
        }
        "whitham_st" => {}
        other => return Err(Error::UnsupportedModel(other.to_string())),
    }
    let family = DispersionSymbol::whitham_tension(0.0)?;

    let scan: Vec<f64> = (0..TC_SCAN_POINTS)
        .map(|i| TC_SCAN[0] + (TC_SCAN[1] - TC_SCAN[0]) * i as f64 / (TC_SCAN_POINTS - 1) as f64)
        .collect();
    let counts: Vec<usize> = scan
        .par_iter()
        .map(|&t| critical_count(&family, &p, t))
        .collect::<Result<_>>()?;
    let switch = counts
        .iter()
        .position(|&c| c != 3)
        .ok_or_else(|| Error::NotMonotone(format!("count stays 3 up to T = {}", TC_SCAN[1])))?;
    if switch == 0 {
        return Err(Error::NotMonotone(format!(
            "count is {} already at T = {}",
            counts[0], TC_SCAN[0]
        )));
    }
    if let Some(j) = counts[switch..].iter().position(|&c| c != 1) {
        let t = scan[switch + j];
        return Err(Error::NotMonotone(format!(
            "count {} at T = {t} after dropping to 1",
            counts[switch + j]
        )));
    }
    let (mut lo, mut hi) = (scan[switch - 1], scan[switch]);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if critical_count(&family, &p, mid)? == 3 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(TcResult {
        variant: variant.to_string(),
        alpha,
        tc: 0.5 * (lo + hi),
        count_below: 3,
        count_above: 1,
        bracket: (lo, hi),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagramCell {
    pub k: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub k_sqrt_t: f64,
    pub label: Classification,
    pub f1: f64,
    pub f2: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub k: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub k_sqrt_t: f64,
}

impl CurvePoint {
    fn new(k: f64, t: f64) -> Self {
        Self {
            k,
            t,
            k_sqrt_t: k * t.sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityDiagram {
    pub family: String,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub k_max: f64,
    pub t_max: f64,
    pub nk: usize,
    pub nt: usize,
    /// Row-major in `T`: cell `(i, j)` is at index `j * nk + i`.
    pub cells: Vec<DiagramCell>,
    /// Zeros of `c_p(k) - c_p(2k)` along each row.
    pub phase_curve: Vec<CurvePoint>,
    /// Zeros of `dc_g/dk` along each row.
    pub group_curve: Vec<CurvePoint>,
    /// Tensions where the two curves cross.
    pub intersections: Vec<CurvePoint>,
    /// Connected regions of equal label (4-neighbour connectivity on the grid).
    pub stable_regions: usize,
    pub unstable_regions: usize,
}

impl StabilityDiagram {
    pub fn cell(&self, i: usize, j: usize) -> &DiagramCell {
        &self.cells[j * self.nk + i]
    }
}

fn row_roots(s: &DispersionSymbol, p: &ModelParams, k_lo: f64, k_hi: f64) -> (Vec<f64>, Vec<f64>) {
    let probes = roots::log_grid(k_lo, k_hi, DEFAULT_PROBES);
    (
        roots::sign_change_roots(|k| phase_numerator(s, p, k), &probes, ROOT_TOL),
        roots::sign_change_roots(|k| group_numerator(s, p, k), &probes, ROOT_TOL),
    )
}

/// Order in which phase (`P`) and group (`G`) zeros appear along `k`.
fn interleaving(phase: &[f64], group: &[f64]) -> Vec<Mechanism> {
    let mut all: Vec<(f64, Mechanism)> = phase
        .iter()
        .map(|&k| (k, Mechanism::PhaseVelocityCoincidence))
        .chain(group.iter().map(|&k| (k, Mechanism::GroupVelocityExtremum)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    all.into_iter().map(|x| x.1).collect()
}

/// Labels the `(k, T)` grid for a tension family with `beta = sign(alpha)`,
/// `gamma = |alpha|`.
pub fn diagram(
    family: &str,
    alpha: f64,
    k_max: f64,
    t_max: f64,
    nk: usize,
    nt: usize,
) -> Result<StabilityDiagram> {
    if !(k_max > 0.0 && t_max > 0.0 && k_max.is_finite() && t_max.is_finite()) {
        return Err(Error::InvalidArgument(
            "diagram extents must be positive".into(),
        ));
    }
    if nk == 0 || nt == 0 {
        return Err(Error::InvalidArgument(
            "diagram resolution must be positive".into(),
        ));
    }
    let base = match family {
        "kdv_st" => DispersionSymbol::kdv_tension(0.0)?,
        "whitham_st" => DispersionSymbol::whitham_tension(0.0)?,
        other => return Err(Error::UnsupportedModel(other.to_string())),
    };
    let p = ModelParams::from_alpha(alpha)?;
    let tension = |j: usize| (j as f64 + 0.5) * t_max / nt as f64;
    let wavenumber = |i: usize| (i as f64 + 0.5) * k_max / nk as f64;
    let symbol_at = |t: f64| base.with_tension(t).expect("tension family");
    let k_lo = 1e-3 * k_max;

    struct Row {
        cells: Vec<DiagramCell>,
        phase: Vec<f64>,
        group: Vec<f64>,
    }
    let rows: Vec<Row> = (0..nt)
        .into_par_iter()
        .map(|j| {
            let t = tension(j);
            let s = symbol_at(t)?;
            let cells = (0..nk)
                .map(|i| {
                    let k = wavenumber(i);
                    let r = mi_index::index(&s, &p, k)?;
                    Ok(DiagramCell {
                        k,
                        t,
                        k_sqrt_t: k * t.sqrt(),
                        label: r.classification,
                        f1: r.f1,
                        f2: r.f2,
                        delta: r.delta,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let (phase, group) = row_roots(&s, &p, k_lo, k_max);
            Ok(Row {
                cells,
                phase,
                group,
            })
        })
        .collect::<Result<_>>()?;

    let mut intersections = Vec::new();
    for j in 1..nt {
        let (a, b) = (&rows[j - 1], &rows[j]);
        let before = interleaving(&a.phase, &a.group);
        let after = interleaving(&b.phase, &b.group);
        if before.len() == after.len() && before != after {
            if let Some(pt) =
                locate_crossing(&symbol_at, &p, k_lo, k_max, tension(j - 1), tension(j))?
            {
                intersections.push(pt);
            }
        }
    }

    let mut phase_curve = Vec::new();
    let mut group_curve = Vec::new();
    let mut cells = Vec::with_capacity(nk * nt);
    for (j, row) in rows.into_iter().enumerate() {
        let t = tension(j);
        phase_curve.extend(row.phase.iter().map(|&k| CurvePoint::new(k, t)));
        group_curve.extend(row.group.iter().map(|&k| CurvePoint::new(k, t)));
        cells.extend(row.cells);
    }
    let labels: Vec<Classification> = cells.iter().map(|c| c.label).collect();
    let stable_regions = count_regions(&labels, nk, nt, Classification::Stable);
    let unstable_regions = count_regions(&labels, nk, nt, Classification::Unstable);

    Ok(StabilityDiagram {
        family: family.to_string(),
        alpha,
        beta: p.beta,
        gamma: p.gamma,
        k_max,
        t_max,
        nk,
        nt,
        cells,
        phase_curve,
        group_curve,
        intersections,
        stable_regions,
        unstable_regions,
    })
}

/// Bisection in `T` on the interleaving pattern, then the crossing wavenumber
/// as the midpoint of the two zeros that swapped.
fn locate_crossing<F>(
    symbol_at: &F,
    p: &ModelParams,
    k_lo: f64,
    k_hi: f64,
    t_lo: f64,
    t_hi: f64,
) -> Result<Option<CurvePoint>>
where
    F: Fn(f64) -> Result<DispersionSymbol>,
{
    let pattern = |t: f64| -> Result<(Vec<f64>, Vec<f64>, Vec<Mechanism>)> {
        let (ph, gr) = row_roots(&symbol_at(t)?, p, k_lo, k_hi);
        let pat = interleaving(&ph, &gr);
        Ok((ph, gr, pat))
    };
    let (_, _, lo_pat) = pattern(t_lo)?;
    let (mut a, mut b) = (t_lo, t_hi);
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        let (_, _, pat) = pattern(mid)?;
        if pat == lo_pat {
            a = mid;
        } else {
            b = mid;
        }
    }
    let (ph, gr, pat) = pattern(a)?;
    let (_, _, next) = pattern(b)?;
    if pat.len() != next.len() {
        return Ok(None);
    }
    let Some(pos) = pat.iter().zip(&next).position(|(x, y)| x != y) else {
        return Ok(None);
    };
    let mut all: Vec<f64> = ph.iter().chain(&gr).copied().collect();
    all.sort_by(f64::total_cmp);
    let k = match all.get(pos + 1) {
        Some(&k2) => 0.5 * (all[pos] + k2),
        None => all[pos],
    };
    Ok(Some(CurvePoint::new(k, 0.5 * (a + b))))
}

/// Amplitude and Floquet exponent used to re-check diagram cells.
pub const SPOT_AMPLITUDE: f64 = 0.01;
pub const SPOT_EXPONENT: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpotCheck {
    pub i: usize,
    pub j: usize,
    pub k: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub label: Classification,
    pub hill_growth: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpotCheckReport {
    pub checks: Vec<SpotCheck>,
    /// Cells drawn but not checkable: degenerate, resonant, or outside the
    /// small-amplitude regime.
    pub skipped: usize,
}

/// Re-validates `count` randomly chosen cells against the Hill spectrum at
/// `a = 0.01`, `xi = 0.001`. Cells are drawn without replacement in an order
/// fixed by `seed`; cells that cannot be checked are skipped and counted.
pub fn spot_check(d: &StabilityDiagram, count: usize, seed: u64) -> Result<SpotCheckReport> {
    let base = match d.family.as_str() {
        "kdv_st" => DispersionSymbol::kdv_tension(0.0)?,
        _ => DispersionSymbol::whitham_tension(0.0)?,
    };
    let p = ModelParams::new(d.beta, d.gamma)?;
    let window = floquet_hill::default_window(&p);
    let mut order: Vec<usize> = (0..d.cells.len()).collect();
    order.shuffle(&mut StdRng::seed_from_u64(seed));

    let mut checks = Vec::new();
    let mut skipped = 0;
    for idx in order {
        if checks.len() == count {
            break;
        }
        let cell = d.cells[idx];
        if cell.label == Classification::Degenerate {
            skipped += 1;
            continue;
        }
        let s = base.with_tension(cell.t).expect("tension family")?;
        let Ok(wave) = stokes::expand(&s, &p, cell.k) else {
            skipped += 1;
            continue;
        };
        let regime: Option<RegimeViolation> = floquet_hill::regime_check(
            &wave,
            SPOT_AMPLITUDE,
            SPOT_EXPONENT,
            floquet_hill::DEFAULT_MODES,
            window,
        );
        if regime.is_some() {
            skipped += 1;
            continue;
        }
        let growth = floquet_hill::max_growth(
            &wave,
            SPOT_AMPLITUDE,
            SPOT_EXPONENT,
            floquet_hill::DEFAULT_MODES,
            window,
        )?;
        let unstable = growth > 1e-8;
        checks.push(SpotCheck {
            i: idx % d.nk,
            j: idx / d.nk,
            k: cell.k,
            t: cell.t,
            label: cell.label,
            hill_growth: growth,
            agrees: unstable == (cell.label == Classification::Unstable),
        });
    }
    Ok(SpotCheckReport { checks, skipped })
}

/// Number of 4-connected components of cells carrying `label`.
pub fn count_regions(
    labels: &[Classification],
    nk: usize,
    nt: usize,
    label: Classification,
) -> usize {
    let mut seen = vec![false; labels.len()];
    let mut regions = 0;
    let mut stack = Vec::new();
    for start in 0..labels.len() {
        if seen[start] || labels[start] != label {
            continue;
        }
        regions += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            let (i, j) = (idx % nk, idx / nk);
            let mut visit = |n: usize| {
                if !seen[n] && labels[n] == label {
                    seen[n] = true;
                    stack.push(n);
                }
            };
            if i > 0 {
                visit(idx - 1);
            }
            if i + 1 < nk {
                visit(idx + 1);
            }
            if j > 0 {
                visit(idx - nk);
            }
            if j + 1 < nt {
                visit(idx + nk);
            }
        }
    }
    regions
}
