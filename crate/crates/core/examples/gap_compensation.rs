// Electrode gaps around a recurrence section, compensated exactly.

use pwa_synth::hamiltonian::TridiagonalHamiltonian;
use pwa_synth::linalg::{cascade, operator_norm, CMatrix};
use pwa_synth::planner::gap_compensate;

pub fn run_example() -> pwa_synth::Result<()> {
    let b = TridiagonalHamiltonian::uniform(4, 40.0, 2.0 * std::f64::consts::PI, 3.0)?;
    for delta_l in [0.0, 0.05, 0.2, 0.5] {
        match gap_compensate(&b, delta_l, 10.0, 1.0) {
            Ok(g) => {
                let us: Vec<CMatrix> = g.sections(4)?.iter().map(|h| h.unitary()).collect();
                let err = operator_norm(&(cascade(4, us.iter()) - b.unitary()))?;
                println!(
                    "dL={delta_l}: L' = {:.3}, beta' = {:.4}, C' = {:.4}, error {err:.1e}",
                    g.electrode_length, g.beta_prime, g.coupling_prime
                );
            }
            Err(e) => println!("dL={delta_l}: {e}"),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> pwa_synth::Result<()> {
    run_example()
}
