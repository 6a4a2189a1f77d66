mod common;

use common::builtin_symbols;
use gost_mi::stokes::{self, expand};
use gost_mi::symbols::check_hypotheses;
use gost_mi::{DispersionSymbol, ModelParams};

#[test]
fn residual_vanishes_to_fourth_order() {
    for p in [
        ModelParams::new(1.0, 1.0).unwrap(),
        ModelParams::new(-0.5, 2.0).unwrap(),
    ] {
        for s in builtin_symbols() {
            for k in [0.4, 1.3] {
                if !stokes::check_resonance(&s, &p, k, 3).unwrap().is_empty() {
                    continue;
                }
                let wave = expand(&s, &p, k).unwrap();
                // keep the expansion genuinely small
                if wave.a2.abs() * 0.02 > 0.05 || wave.a3.abs() * 4e-4 > 0.05 {
                    continue;
                }
                for a in [0.02, 0.01] {
                    let r1 = wave.residual_norm(a, 16).unwrap();
                    let r2 = wave.residual_norm(a / 2.0, 16).unwrap();
                    let order = (r1 / r2).log2();
                    assert!(
                        (3.5..=4.5).contains(&order),
                        "{s} beta {} k {k} a {a}: order {order}",
                        p.beta
                    );
                }
            }
        }
    }
}

#[test]
fn builtins_satisfy_growth_and_normalization() {
    for s in builtin_symbols() {
        let r = check_hypotheses(&s, 100.0, 1000).unwrap();
        assert!(r.h1_passed, "{s}: m(0) = {}", r.m_at_zero);
        assert!(
            r.h2.passed,
            "{s}: slope {} vs {}",
            r.h2.fitted_slope, r.h2.alpha
        );
        assert!(r.h2.c1 > 0.0 && r.h2.c2 >= r.h2.c1);
    }
}

#[test]
fn kdv_family_has_no_harmonic_coincidence() {
    for s in [
        DispersionSymbol::kdv(),
        DispersionSymbol::fkdv(1.5).unwrap(),
        DispersionSymbol::ilw(),
        DispersionSymbol::whitham(),
    ] {
        let r = check_hypotheses(&s, 100.0, 1000).unwrap();
        assert!(r.h3_passed, "{s}: {:?}", r.h3_first_violation);
    }
}
