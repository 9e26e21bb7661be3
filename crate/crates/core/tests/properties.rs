use num_complex::Complex64;
use proptest::prelude::*;
use pwa_synth::device::{basis_state, propagate, realize_sections};
use pwa_synth::hamiltonian::TridiagonalHamiltonian;
use pwa_synth::PwaError;
use pwa_synth::linalg::{
    expm_hermitian, fidelity, haar_random_unitary, operator_norm, unitarity_deviation, CMatrix,
};
use pwa_synth::planner::{compile, gap_compensate, ChipPlan, TrotterConfig};
use pwa_synth::reck::{adjacent_expand, reconstruct, two_level_decompose, ExpandOptions};
use pwa_synth::su2::{realize_sections as realize_su2, synthesize_su2, ParameterBounds};

fn hermitian(d: usize, re: &[f64], im: &[f64]) -> CMatrix {
    let a = CMatrix::from_fn(d, d, |i, j| Complex64::new(re[i * d + j], im[i * d + j]));
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

fn arb_hermitian() -> impl Strategy<Value = CMatrix> {
    (1usize..7).prop_flat_map(|d| {
        (prop::collection::vec(-5.0f64..5.0, d * d), prop::collection::vec(-5.0f64..5.0, d * d))
            .prop_map(move |(re, im)| hermitian(d, &re, &im))
    })
}

fn arb_section(d: usize) -> impl Strategy<Value = TridiagonalHamiltonian> {
    (
        prop::collection::vec(0.1f64..50.0, d),
        prop::collection::vec(0.1f64..50.0, d - 1),
        0.01f64..0.5,
    )
        .prop_map(|(b, c, l)| TridiagonalHamiltonian::new(b, c, l).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn expm_is_unitary_and_a_group(h in arb_hermitian(), s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let us = expm_hermitian(&h, s).unwrap();
        let ut = expm_hermitian(&h, t).unwrap();
        prop_assert!(unitarity_deviation(&us) < 1e-12);
        let sum = expm_hermitian(&h, s + t).unwrap();
        prop_assert!(operator_norm(&(&us * &ut - sum)).unwrap() < 1e-11);
    }

    #[test]
    fn fidelity_symmetric_and_invariant(d in 1usize..7, a in 0u64..1000, b in 0u64..1000, w in 0u64..1000, phase in 0.0f64..6.3) {
        let (u, v, x) = (haar_random_unitary(d, a).unwrap(), haar_random_unitary(d, b).unwrap(), haar_random_unitary(d, w).unwrap());
        let f = fidelity(&u, &v).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&f));
        prop_assert!((f - fidelity(&v, &u).unwrap()).abs() < 1e-12);
        prop_assert!((f - fidelity(&(&x * &u), &(&x * &v)).unwrap()).abs() < 1e-12);
        let g = Complex64::from_polar(1.0, phase);
        prop_assert!((f - fidelity(&(&u * g), &v).unwrap()).abs() < 1e-12);
        prop_assert!((fidelity(&u, &u).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reck_reconstructs(d in 1usize..9, seed in 0u64..10_000) {
        let u = haar_random_unitary(d, seed).unwrap();
        let dec = two_level_decompose(&u).unwrap();
        let ops = adjacent_expand(&dec, ExpandOptions::default()).unwrap();
        prop_assert_eq!(ops.len(), d * (d - 1) * (2 * d - 1) / 6);
        prop_assert!(ops.iter().all(|o| o.mode >= 1 && o.mode < d));
        prop_assert!(operator_norm(&(reconstruct(d, &ops, dec.global_phase) - &u)).unwrap() < 1e-10);
    }

    #[test]
    fn su2_sections_positive_and_exact(seed in 0u64..100_000, length in 1e-3f64..1.0) {
        let u = haar_random_unitary(2, seed).unwrap();
        let secs = synthesize_su2(&u, length, &ParameterBounds::default()).unwrap();
        prop_assert!(!secs.is_empty() && secs.len() <= 4);
        for s in &secs {
            prop_assert!(s.is_positive());
            let h = s.hamiltonian().unwrap();
            prop_assert!(h.betas.iter().chain(&h.couplings).all(|&x| x > 0.0));
        }
        prop_assert!(operator_norm(&(realize_su2(&secs) - &u)).unwrap() < 1e-10);
    }

    #[test]
    fn realize_is_associative(secs in prop::collection::vec(arb_section(3), 1..6), cut in 0usize..6) {
        let cut = cut.min(secs.len());
        let whole = realize_sections(3, &secs).unwrap();
        // first sections act first
        let split = realize_sections(3, &secs[cut..]).unwrap() * realize_sections(3, &secs[..cut]).unwrap();
        prop_assert!(operator_norm(&(whole - split)).unwrap() < 1e-12);
    }

    #[test]
    fn propagation_matches_realize(secs in prop::collection::vec(arb_section(3), 1..4), mode in 1usize..4) {
        let psi = basis_state(3, mode).unwrap();
        let dz = secs.iter().map(|h| h.length).fold(f64::INFINITY, f64::min) / 3.0;
        let trace = propagate(&psi, &secs, dz).unwrap();
        let want = realize_sections(3, &secs).unwrap() * &psi;
        prop_assert!((trace.final_state() - want).norm() < 1e-10);
        prop_assert!(trace.max_norm_deviation() < 1e-10);
    }

    #[test]
    fn gap_compensation_is_exact(
        d in 2usize..6, beta in 50.0f64..500.0, coupling in 1.0f64..50.0, length in 0.5f64..5.0,
        frac in 0.0f64..0.2, beta0 in 1.0f64..50.0, coupling0 in 1.0f64..20.0,
    ) {
        let b = TridiagonalHamiltonian::uniform(d, beta, coupling, length).unwrap();
        let g = match gap_compensate(&b, frac * length, beta0, coupling0) {
            Err(PwaError::GapInfeasible { .. }) => return Err(TestCaseError::reject("infeasible gap")),
            other => other.unwrap(),
        };
        let chain = realize_sections(d, &g.sections(d).unwrap()).unwrap();
        prop_assert!(operator_norm(&(chain - b.unitary())).unwrap() < 1e-10);
    }

    #[test]
    fn two_mode_plans_round_trip(seed in 0u64..10_000) {
        let u = haar_random_unitary(2, seed).unwrap();
        let cfg = TrotterConfig::new(2, 6e-3, 1).unwrap();
        let plan = compile(&u, 6e-3, &cfg, &ParameterBounds::default()).unwrap();
        let back = ChipPlan::from_json(&plan.to_json().unwrap()).unwrap();
        prop_assert_eq!(&back, &plan);
        prop_assert!(operator_norm(&(back.realize().unwrap() - &u)).unwrap() < 1e-10);
    }
}
