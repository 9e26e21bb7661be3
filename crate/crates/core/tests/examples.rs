mod gate_library_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/gate_library.rs"));
}

#[test]
fn gate_library_example_runs() {
    gate_library_example::run_example().expect("gate_library example should run");
}

mod reck_decomposition_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/reck_decomposition.rs"));
}

#[test]
fn reck_decomposition_example_runs() {
    reck_decomposition_example::run_example().expect("reck_decomposition example should run");
}

mod su2_synthesis_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/su2_synthesis.rs"));
}

#[test]
fn su2_synthesis_example_runs() {
    su2_synthesis_example::run_example().expect("su2_synthesis example should run");
}

mod diophantine_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/diophantine.rs"));
}

#[test]
fn diophantine_example_runs() {
    diophantine_example::run_example().expect("diophantine example should run");
}

mod compile_plan_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/compile_plan.rs"));
}

#[test]
fn compile_plan_example_runs() {
    compile_plan_example::run_example().expect("compile_plan example should run");
}

mod gap_compensation_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/gap_compensation.rs"));
}

#[test]
fn gap_compensation_example_runs() {
    gap_compensation_example::run_example().expect("gap_compensation example should run");
}

mod voltage_optimization_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/voltage_optimization.rs"));
}

#[test]
fn voltage_optimization_example_runs() {
    voltage_optimization_example::run_example().expect("voltage_optimization example should run");
}

mod propagation_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/propagation.rs"));
}

#[test]
fn propagation_example_runs() {
    propagation_example::run_example().expect("propagation example should run");
}

mod dyson_tridiagonal_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/dyson_tridiagonal.rs"));
}

#[test]
fn dyson_tridiagonal_example_runs() {
    dyson_tridiagonal_example::run_example().expect("dyson_tridiagonal example should run");
}

mod bench_sweep_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/bench_sweep.rs"));
}

#[test]
fn bench_sweep_example_runs() {
    bench_sweep_example::run_example().expect("bench_sweep example should run");
}
