// Exact two-waveguide synthesis with at most four positive sections.

use pwa_synth::gates::dft;
use pwa_synth::linalg::{haar_random_unitary, identity, operator_norm, CMatrix};
use pwa_synth::su2::{realize_sections, synthesize_su2, ParameterBounds};

pub fn run_example() -> pwa_synth::Result<()> {
    let length = 6e-3;
    let phase = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        num_complex::Complex64::from_polar(1.0, -0.4),
        num_complex::Complex64::from_polar(1.0, 0.4),
    ]));
    let cases = [
        ("identity", identity(2)),
        ("hadamard", dft(2)?),
        ("phase 0.4", phase),
        ("haar:3", haar_random_unitary(2, 3)?),
    ];
    for (name, u) in cases {
        let secs = synthesize_su2(&u, length, &ParameterBounds::default())?;
        let err = operator_norm(&(realize_sections(&secs) - &u))?;
        println!("{name:>10}: {} sections, error {err:.1e}", secs.len());
        for s in &secs {
            let (b1, b2) = s.betas();
            println!("            {:?}: beta = ({b1:.3}, {b2:.3}) /m, C = {:.3} /m", s.role, s.kappa);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> pwa_synth::Result<()> {
    run_example()
}
