// Analytic compilation of the 3-mode DFT and the first-order error decay in N.

use pwa_synth::bench::loglog_slope;
use pwa_synth::gates::dft;
use pwa_synth::planner::{compile, ChipPlan, TrotterConfig};
use pwa_synth::su2::ParameterBounds;

pub fn run_example() -> pwa_synth::Result<()> {
    let (d, length) = (3, 6e-3);
    let u = dft(d)?;
    let mut ns = Vec::new();
    let mut errs = Vec::new();
    for n in [4, 8, 16, 32] {
        let cfg = TrotterConfig::new(d, length, n)?;
        let plan = compile(&u, length, &cfg, &ParameterBounds::default())?;
        let m = &plan.metadata;
        let err = m.measured_error.unwrap_or(f64::NAN);
        println!(
            "N={n:>2}: K = {:>3}, {:>4} sections, q = {:?}, |U - V| = {err:.3e}",
            m.k, m.physical_sections, m.q
        );
        // plans survive a JSON round trip unchanged
        let back = ChipPlan::from_json(&plan.to_json()?)?;
        assert_eq!(back, plan);
        ns.push(n as f64);
        errs.push(err);
    }
    println!("log-log slope {:.3}", loglog_slope(&ns, &errs).unwrap_or(f64::NAN));
    Ok(())
}

#[allow(dead_code)]
fn main() -> pwa_synth::Result<()> {
    run_example()
}
