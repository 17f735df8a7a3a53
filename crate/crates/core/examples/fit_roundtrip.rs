//! Minimal round-trip: simulate a bundled regime, fit it back.
//!
//! Run with `cargo run --release --example fit_roundtrip`.

use pll_ident::config::resolve_single_config;
use pll_ident::error::Result;
use pll_ident::identify::fit_integrated;
use pll_ident::model::{to_dimensionless, ModelState};
use pll_ident::pipeline::assemble_states;
use pll_ident::sim::simulate;

fn main() -> Result<()> {
    let (cfg, _origin) = resolve_single_config("1b")?;
    let dp = to_dimensionless(&cfg.physical)?;
    let init = ModelState::new(0.0, 0.1, 0.0);
    let (_phi, y, _z) = simulate(&dp, &init, 1e-3, 200_000, 40_000)?;
    let ens = assemble_states(&y, 1.0, false)?; // already in slow time
    let fit = fit_integrated(&ens, 0.0, 1)?;
    println!("beta0 = {:.5}, beta1 = {:.5}", fit.beta[0], fit.beta[1]);
    Ok(())
}
