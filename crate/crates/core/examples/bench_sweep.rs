// A small gate sweep written as CSV.

use pwa_synth::bench::{run_bench, BenchSpec, Experiment};

pub fn run_example() -> pwa_synth::Result<()> {
    let out = std::env::temp_dir().join("pwa_synth_bench_example");
    let spec = BenchSpec {
        experiment: Experiment::GateSweep,
        gates: vec!["dft".into(), "shift".into()],
        dims: vec![3],
        sections: vec![1, 3],
        lengths: vec![6e-3],
        seeds: vec![1],
        steps: vec![],
        restarts: 4,
        max_iterations: 500,
        dz: None,
        output_dir: out,
    };
    for path in run_bench(&spec)? {
        println!("{}:\n{}", path.display(), std::fs::read_to_string(&path)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> pwa_synth::Result<()> {
    run_example()
}
