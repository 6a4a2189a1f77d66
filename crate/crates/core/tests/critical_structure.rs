use std::collections::BTreeMap;

use gost_mi::critical::{self, Mechanism};
use gost_mi::mi_index::{self, Classification};
use gost_mi::{DispersionSymbol, ModelParams};

#[test]
fn tension_thresholds() {
    let up = critical::tc_of_alpha("whitham_st", 0.1, 1e-4).unwrap();
    assert!((up.tc - 0.132).abs() <= 5e-3, "{up:?}");
    let down = critical::tc_of_alpha("whitham_st", -0.1, 1e-4).unwrap();
    assert!((down.tc - 0.141).abs() <= 5e-3, "{down:?}");
}

#[test]
fn threshold_separates_three_from_one() {
    let r = critical::tc_of_alpha("whitham_st", 0.1, 1e-4).unwrap();
    let p = ModelParams::from_alpha(0.1).unwrap();
    let count = |t: f64| {
        let s = DispersionSymbol::whitham_tension(t).unwrap();
        critical::critical_wavenumbers(&s, &p, critical::DEFAULT_BRACKET, 4000).unwrap()
    };
    let below = count(r.bracket.0);
    assert_eq!(below.len(), 3);
    // for alpha > 0 the extra pair below T_c are group-velocity extrema
    let groups = below
        .iter()
        .filter(|c| c.1 == Mechanism::GroupVelocityExtremum)
        .count();
    assert_eq!(groups, 2);
    assert_eq!(count(r.bracket.1).len(), 1);
}

#[test]
fn negative_alpha_loses_phase_zeros() {
    let p = ModelParams::from_alpha(-0.1).unwrap();
    let s = DispersionSymbol::whitham_tension(0.05).unwrap();
    let c = critical::critical_wavenumbers(&s, &p, critical::DEFAULT_BRACKET, 4000).unwrap();
    let phase = c
        .iter()
        .filter(|c| c.1 == Mechanism::PhaseVelocityCoincidence)
        .count();
    assert_eq!((c.len(), phase), (3, 2));
    let s = DispersionSymbol::whitham_tension(0.3).unwrap();
    let c = critical::critical_wavenumbers(&s, &p, critical::DEFAULT_BRACKET, 4000).unwrap();
    assert_eq!(c.len(), 1);
    assert_eq!(c[0].1, Mechanism::GroupVelocityExtremum);
}

#[test]
fn fkdv_two_reduces_to_ostrovsky() {
    let fk = BTreeMap::from([("delta".to_string(), 2.0)]);
    let st = BTreeMap::from([("T".to_string(), 0.0)]);
    for beta in [1.0, -1.0, 2.5, -0.3] {
        let p = ModelParams::new(beta, 0.8).unwrap();
        let base = critical::kc_closed_form("kdv", &p, &BTreeMap::new()).unwrap();
        let a = critical::kc_closed_form("fkdv", &p, &fk).unwrap();
        let b = critical::kc_closed_form("kdv_st", &p, &st).unwrap();
        assert!((a.kc - base.kc).abs() <= 1e-12);
        assert!((b.kc - base.kc).abs() <= 1e-12);
        assert_eq!(a.mechanism, base.mechanism);
        assert_eq!(b.mechanism, base.mechanism);
    }
}

#[test]
fn tension_closed_forms_agree_with_bisection() {
    for beta in [1.0, -1.0] {
        for t in [0.1, 0.25, 0.5, 0.9] {
            let p = ModelParams::new(beta, 1.0).unwrap();
            let extra = BTreeMap::from([("T".to_string(), t)]);
            let exact = critical::kc_closed_form("kdv_st", &p, &extra).unwrap();
            let s = DispersionSymbol::kdv_tension(t).unwrap();
            let scan = critical::kc_numeric(&s, &p, critical::DEFAULT_BRACKET).unwrap();
            assert_eq!(scan.roots.len(), 1);
            assert!((scan.roots[0].kc - exact.kc).abs() <= 1e-10);
            assert_eq!(scan.roots[0].mechanism, exact.mechanism);
        }
    }
}

#[test]
fn whitham_tension_interval_counts() {
    let p = ModelParams::from_alpha(0.1).unwrap();
    let labels = |t: f64| -> Vec<Classification> {
        let s = DispersionSymbol::whitham_tension(t).unwrap();
        critical::classify_intervals(&s, &p, critical::DEFAULT_BRACKET, 400)
            .unwrap()
            .iter()
            .map(|iv| iv.label)
            .collect()
    };
    use Classification::*;
    assert_eq!(labels(0.02), vec![Stable, Unstable, Stable, Unstable]);
    assert_eq!(labels(0.5), vec![Stable, Unstable]);
}

#[test]
fn diagram_rows_reproduce_interval_labels() {
    let d = critical::diagram("whitham_st", 0.1, 6.0, 0.3, 120, 30).unwrap();
    let p = ModelParams::new(d.beta, d.gamma).unwrap();
    for j in [0, 7, 29] {
        let t = d.cell(0, j).t;
        let s = DispersionSymbol::whitham_tension(t).unwrap();
        let iv = critical::classify_intervals(&s, &p, (1e-3, 6.0), 400).unwrap();
        for i in 0..120 {
            let c = d.cell(i, j);
            let piece = iv.iter().find(|x| x.lo <= c.k && c.k <= x.hi).unwrap();
            if c.label != Classification::Degenerate {
                assert_eq!(c.label, piece.label, "cell ({i}, {j})");
            }
        }
    }
}

#[test]
fn curves_lie_on_factor_zeros() {
    let d = critical::diagram("kdv_st", 1.0, 2.0, 1.0, 50, 50).unwrap();
    let p = ModelParams::new(d.beta, d.gamma).unwrap();
    for pt in &d.phase_curve {
        let s = DispersionSymbol::kdv_tension(pt.t).unwrap();
        let r = mi_index::index(&s, &p, pt.k).unwrap();
        assert!(
            r.f1.abs() < 1e-8 * (1.0 + 1.0 / (pt.k * pt.k)),
            "{pt:?} {}",
            r.f1
        );
        assert_eq!(pt.k_sqrt_t, pt.k * pt.t.sqrt());
    }
    for pt in &d.group_curve {
        let s = DispersionSymbol::kdv_tension(pt.t).unwrap();
        let r = mi_index::index(&s, &p, pt.k).unwrap();
        assert!(
            r.f2.abs() < 1e-8 * (1.0 + 1.0 / pt.k.powi(3)),
            "{pt:?} {}",
            r.f2
        );
    }
    // group zeros for T < 1/3, phase zeros above, none cross
    assert!(d.group_curve.iter().all(|p| p.t < 1.0 / 3.0));
    assert!(d.phase_curve.iter().all(|p| p.t > 1.0 / 3.0));
    assert!(d.intersections.is_empty());
}

#[test]
fn negative_alpha_curves_intersect() {
    let d = critical::diagram("whitham_st", -0.1, 6.0, 0.3, 60, 60).unwrap();
    assert_eq!(d.intersections.len(), 1, "{:?}", d.intersections);
    let x = d.intersections[0];
    assert!(x.t > 0.05 && x.t < 0.14, "{x:?}");
    let p = ModelParams::new(d.beta, d.gamma).unwrap();
    let r = mi_index::index(&DispersionSymbol::whitham_tension(x.t).unwrap(), &p, x.k).unwrap();
    assert!(r.f1.abs() < 1e-4 && r.f2.abs() < 1e-4, "{r:?}");
}

#[test]
fn region_counts_are_recorded() {
    let d = critical::diagram("kdv_st", 1.0, 2.0, 1.0, 100, 100).unwrap();
    // stable below the curves, unstable beyond the group curve (T < 1/3)
    // and beyond the phase curve (T > 1/3)
    assert_eq!((d.stable_regions, d.unstable_regions), (1, 2));
}
