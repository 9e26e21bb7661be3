// Mode propagation along z: a zero-voltage coupler and an optimized 3-mode shift.

use pwa_synth::device::{basis_state, propagate, voltage_layout, DeviceModel};
use pwa_synth::gates::shift;
use pwa_synth::hamiltonian::TridiagonalHamiltonian;
use pwa_synth::optimize::{optimize, OptimizationTask};

pub fn run_example() -> pwa_synth::Result<()> {
    let model = DeviceModel::default();
    let len = std::f64::consts::PI / model.c0;
    let coupler = TridiagonalHamiltonian::uniform(2, model.beta0(), model.c0, len)?;
    let trace = propagate(&basis_state(2, 1)?, &[coupler], len / 8.0)?;
    for (k, z) in trace.z.iter().enumerate() {
        let p = trace.probabilities(k);
        println!("z = {:6.3} mm  P = ({:.3}, {:.3})", z * 1e3, p[0], p[1]);
    }

    let mut task = OptimizationTask::new(shift(3)?, 4, model);
    task.restarts = 8;
    task.seed = 2;
    let res = optimize(&task)?;
    let layout = voltage_layout(&model, &res.voltages)?;
    println!("shift(3) with 4 sections, fidelity {:.4}", res.best_fidelity());
    for m in 1..=3 {
        let trace = propagate(&basis_state(3, m)?, &layout, model.gap)?;
        let p = trace.probabilities(trace.z.len() - 1);
        println!("input {m}: output P = ({:.3}, {:.3}, {:.3})", p[0], p[1], p[2]);
    }
    let csv = propagate(&basis_state(3, 1)?, &layout, model.gap)?.to_csv();
    println!("{} CSV rows, header: {}", csv.lines().count() - 1, csv.lines().next().unwrap_or(""));
    Ok(())
}

#[allow(dead_code)]
fn main() -> pwa_synth::Result<()> {
    run_example()
}
