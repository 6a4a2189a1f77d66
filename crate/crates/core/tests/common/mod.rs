#![allow(dead_code)]

use gost_mi::mi_index::{self, IndexResult};
use gost_mi::stokes::{self, StokesWave};
use gost_mi::{DispersionSymbol, ModelParams};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn builtin_symbols() -> Vec<DispersionSymbol> {
    vec![
        DispersionSymbol::kdv(),
        DispersionSymbol::fkdv(1.5).unwrap(),
        DispersionSymbol::fkdv(0.8).unwrap(),
        DispersionSymbol::ilw(),
        DispersionSymbol::whitham(),
        DispersionSymbol::kdv_tension(0.2).unwrap(),
        DispersionSymbol::kdv_tension(0.6).unwrap(),
        DispersionSymbol::whitham_tension(0.2).unwrap(),
        DispersionSymbol::whitham_tension(0.6).unwrap(),
    ]
}

fn log_uniform(rng: &mut StdRng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

pub struct Case {
    pub symbol: DispersionSymbol,
    pub params: ModelParams,
    pub k: f64,
}

/// symbol from the built-ins, beta in +-[0.1, 10], gamma in [0.1, 10],
/// k in [0.05, 5], all log-uniform in magnitude
pub fn random_case(rng: &mut StdRng) -> Case {
    let symbols = builtin_symbols();
    let symbol = symbols[rng.gen_range(0..symbols.len())].clone();
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let beta = sign * log_uniform(rng, 0.1, 10.0);
    let gamma = log_uniform(rng, 0.1, 10.0);
    let k = log_uniform(rng, 0.05, 5.0);
    Case {
        symbol,
        params: ModelParams::new(beta, gamma).unwrap(),
        k,
    }
}

impl Case {
    pub fn index(&self) -> IndexResult {
        mi_index::index(&self.symbol, &self.params, self.k).unwrap()
    }

    pub fn wave(&self) -> Option<StokesWave> {
        stokes::expand(&self.symbol, &self.params, self.k).ok()
    }

    pub fn describe(&self) -> String {
        format!(
            "{} beta={:.4} gamma={:.4} k={:.4}",
            self.symbol, self.params.beta, self.params.gamma, self.k
        )
    }
}

/// |ratio| and |delta| both clear of the degeneracy floor
pub fn clear_of_floor(r: &IndexResult) -> bool {
    let floor = mi_index::degeneracy_floor(r.f1, r.f2);
    r.delta.abs() > floor && r.ratio.abs() > floor
}
