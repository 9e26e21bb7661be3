// How close a single device section is to tridiagonal, and how well the
// first-order Dyson expansion tracks it at zero and at strong detuning.

use pwa_synth::device::{
    dyson_first_order, hamiltonian_from_voltages, off_tridiagonal_fraction, tridiagonal_part, DeviceModel,
    VoltageSettings,
};

pub fn run_example() -> pwa_synth::Result<()> {
    let model = DeviceModel::default();
    let cases = [
        ("zero voltage", VoltageSettings::zeros(5)),
        (
            "alternating +-15 V",
            VoltageSettings { beta_v: vec![15.0, -15.0, 15.0, -15.0, 15.0], coupling_v: vec![0.0; 4] },
        ),
    ];
    for (name, v) in cases {
        let h = hamiltonian_from_voltages(&model, &v)?;
        let exact = h.unitary();
        let dyson = dyson_first_order(&h.betas, &h.couplings, h.length)?;
        let band = tridiagonal_part(&exact);
        let worst = band.iter().zip(dyson.iter()).map(|(a, b)| (a.norm() - b.norm()).abs()).fold(0.0, f64::max);
        println!(
            "{name}: off-tridiagonal mass {:.2}%, max modulus error vs Dyson {worst:.3}",
            100.0 * off_tridiagonal_fraction(&exact)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> pwa_synth::Result<()> {
    run_example()
}
