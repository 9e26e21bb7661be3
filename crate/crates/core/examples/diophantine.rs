// Recurrence integers for the uniform background: `|lambda_j q - p_j| <= eps`.

use pwa_synth::lattice::{certificate_error, simultaneous_diophantine};
use pwa_synth::linalg::toeplitz_eigenvalues;

pub fn run_example() -> pwa_synth::Result<()> {
    for d in 2..=8 {
        let lambdas = toeplitz_eigenvalues(d)?;
        let r = simultaneous_diophantine(&lambdas, 1e-4)?;
        let check = certificate_error(&lambdas, r.q, &r.p);
        println!("d={d}: q = {:>10}, max residual {:.2e} (recomputed {check:.2e})", r.q, r.epsilon);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> pwa_synth::Result<()> {
    run_example()
}
