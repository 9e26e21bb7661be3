// Clock, shift and DFT gates and the Weyl relation `Z X = w X Z`.

use num_complex::Complex64;
use pwa_synth::gates::{clock, dft, shift};
use pwa_synth::linalg::operator_norm;

pub fn run_example() -> pwa_synth::Result<()> {
    for d in 2..=5 {
        let (z, x, w) = (clock(d)?, shift(d)?, dft(d)?);
        let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / d as f64);
        let weyl = operator_norm(&(&z * &x - &x * &z * omega))?;
        let diag = w.adjoint() * &x * &w;
        let off: f64 = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| diag[(i, j)].norm())
            .fold(0.0, f64::max);
        println!("d={d}  |ZX - wXZ| = {weyl:.1e}  max offdiag(W^dag X W) = {off:.1e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> pwa_synth::Result<()> {
    run_example()
}
