// Two-level nulling of a Haar unitary and its adjacent-mode expansion.

use pwa_synth::linalg::{haar_random_unitary, operator_norm};
use pwa_synth::reck::{adjacent_expand, count_sections, reconstruct, two_level_decompose, AdjacentKind, ExpandOptions};

pub fn run_example() -> pwa_synth::Result<()> {
    for d in [3, 4, 5] {
        let u = haar_random_unitary(d, 7)?;
        let dec = two_level_decompose(&u)?;
        let ops = adjacent_expand(&dec, ExpandOptions::default())?;
        let swaps = ops.iter().filter(|o| o.kind == AdjacentKind::Permutation).count();
        let err = operator_norm(&(reconstruct(d, &ops, dec.global_phase) - &u))?;
        println!(
            "d={d}: {} factors, {} adjacent ops ({} swaps, formula {}), |U - rebuilt| = {err:.2e}",
            dec.factors.len(),
            ops.len(),
            swaps,
            count_sections(d)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> pwa_synth::Result<()> {
    run_example()
}
