// Voltage optimization of the 5-mode shift gate with one and five sections.

use pwa_synth::device::DeviceModel;
use pwa_synth::gates::shift;
use pwa_synth::optimize::{optimize, OptimizationTask};

pub fn run_example() -> pwa_synth::Result<()> {
    for k in [1, 5] {
        let mut task = OptimizationTask::new(shift(5)?, k, DeviceModel::default());
        task.restarts = 16;
        task.seed = 1;
        let res = optimize(&task)?;
        println!(
            "K={k}: best fidelity {:.4} (restart {}), {:.2} s",
            res.best_fidelity(),
            res.best_restart,
            res.wall_time_s
        );
        print!("{}", res.restart_csv().lines().take(4).collect::<Vec<_>>().join("\n"));
        println!("\n...");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> pwa_synth::Result<()> {
    run_example()
}
