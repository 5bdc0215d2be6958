use mpsrg::geometric::{brute_force_geometric, entanglement_per_block, total_block_entanglement, AnsatzKind, BruteForceOptions};
use mpsrg::linalg::{kron, max_abs_diff, CMatrix, CVector};
use mpsrg::models::{catalog_mps, ModelPoint};
use mpsrg::mps::{amplitude, norm_sq, state_vector, ChainLength, SpinConfiguration, UniformMps};
use mpsrg::observables::fidelity_per_site;
use mpsrg::transfer::{
    fixed_point_entanglement, fixed_point_entropy, fixed_point_spectrum, merge_sites, rg_step, transfer_operator,
    SchmidtSpectrum, DEGENERACY_TOL,
};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..Config::default()
    }
}

fn complex_entries(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

fn random_mps(d: usize, bond: usize) -> impl Strategy<Value = UniformMps> {
    complex_entries(d * bond * bond).prop_filter_map("null state", move |v| {
        let mats = v.chunks(bond * bond).map(|c| CMatrix::from_row_slice(bond, bond, c)).collect();
        UniformMps::new(mats).ok()
    })
}

fn any_mps() -> impl Strategy<Value = UniformMps> {
    (2usize..=3, 1usize..=3).prop_flat_map(|(d, bond)| random_mps(d, bond))
}

fn unitary(d: usize) -> impl Strategy<Value = CMatrix> {
    complex_entries(d * d).prop_map(move |v| CMatrix::from_row_slice(d, d, &v).qr().q())
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn amplitude_is_cyclic(mps in any_mps(), seed in any::<u64>(), m in 2usize..6) {
        let d = mps.phys_dim();
        let labels: Vec<usize> = (0..m).map(|k| ((seed >> (3 * k)) as usize) % d).collect();
        let mut shifted = labels.clone();
        shifted.rotate_left(1);
        let a = amplitude(&mps, &SpinConfiguration::new(labels)).unwrap();
        let b = amplitude(&mps, &SpinConfiguration::new(shifted)).unwrap();
        prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn gauge_leaves_amplitudes(mps in any_mps(), x in complex_entries(9), m in 1usize..5) {
        let bond = mps.bond_dim();
        let mut gauge = CMatrix::from_fn(bond, bond, |i, j| x[i * 3 + j]);
        for i in 0..bond {
            gauge[(i, i)] += Complex64::new(2.0, 0.0);
        }
        let moved = mps.gauge_transform(&gauge).unwrap();
        let d = mps.phys_dim();
        for index in 0..d.pow(m as u32) {
            let cfg = SpinConfiguration::from_index(index, d, m);
            let a = amplitude(&mps, &cfg).unwrap();
            let b = amplitude(&moved, &cfg).unwrap();
            prop_assert!((a - b).norm() <= 1e-9 * a.norm().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn unitary_mixing_leaves_transfer(mps in random_mps(2, 2), u in unitary(2)) {
        let e = transfer_operator(&mps);
        let mixed = transfer_operator(&mps.mix_physical(&u).unwrap());
        prop_assert!(max_abs_diff(e.matrix(), mixed.matrix()) < 1e-12 * e.matrix().norm().max(1.0));
    }

    #[test]
    fn merging_squares_transfer(mps in any_mps()) {
        let e = transfer_operator(&mps);
        let merged = transfer_operator(&merge_sites(&mps).unwrap().to_mps().unwrap());
        let sq = rg_step(&e);
        prop_assert!(max_abs_diff(merged.matrix(), sq.matrix()) < 1e-10 * sq.matrix().norm().max(1.0));
    }

    #[test]
    fn norm_matches_state_vector(mps in any_mps(), m in 1usize..6) {
        let sv = state_vector(&mps, ChainLength::new(m).unwrap()).unwrap();
        let n = norm_sq(&mps, ChainLength::new(m).unwrap());
        prop_assert!((n - sv.norm * sv.norm).abs() <= 1e-9 * n.max(1.0));
    }

    #[test]
    fn schmidt_spectrum_is_normalized(v in prop::collection::vec(0.0f64..10.0, 1..8)) {
        prop_assume!(v.iter().any(|&x| x > 0.0));
        let spec = SchmidtSpectrum::new(v).unwrap();
        let vals = spec.values();
        prop_assert!((vals.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(vals.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn per_block_is_nonnegative(mps in any_mps(), l in 1usize..5) {
        let rep = entanglement_per_block(&transfer_operator(&mps), l).unwrap();
        prop_assert!(rep.per_block >= 0.0);
        prop_assert!(rep.per_block.is_finite());
    }

    #[test]
    fn total_per_block_limit(mps in any_mps(), l in 1usize..4) {
        let e = transfer_operator(&mps);
        let per = entanglement_per_block(&e, l).unwrap().per_block;
        let a = total_block_entanglement(&e, l, 400).unwrap().total.unwrap() / 400.0;
        let b = total_block_entanglement(&e, l, 800).unwrap().total.unwrap() / 800.0;
        // the trace correction is O(1), so the deviation halves with n
        prop_assert!((b - per).abs() <= 0.5 * (a - per).abs() + 1e-9, "{per} {a} {b}");
    }

    #[test]
    fn fixed_point_bound_chain(mps in any_mps()) {
        let e = transfer_operator(&mps);
        if let Ok(spec) = fixed_point_spectrum(&e, DEGENERACY_TOL) {
            let ent = fixed_point_entanglement(&spec);
            let s = fixed_point_entropy(&spec);
            prop_assert!(ent <= s / 2.0 + 1e-10);
            prop_assert!(s / 2.0 <= (e.bond_dim() as f64).ln() + 1e-10);
        }
    }

    #[test]
    fn fidelity_is_symmetric_and_nonpositive(g1 in -3.0f64..3.0, g2 in -3.0f64..3.0, second in any::<bool>()) {
        let point = |g| if second { ModelPoint::model2(g) } else { ModelPoint::model1(g) };
        let a = catalog_mps(&point(g1)).unwrap();
        let b = catalog_mps(&point(g2)).unwrap();
        let fab = fidelity_per_site(&a, &b).unwrap();
        let fba = fidelity_per_site(&b, &a).unwrap();
        prop_assert!((fab - fba).abs() < 1e-12);
        prop_assert!(fab <= 1e-10);
    }
}

fn random_state(v: &[Complex64]) -> CVector {
    CVector::from_column_slice(v)
}

fn product_unitary(u: &CMatrix, m: usize) -> CMatrix {
    (1..m).fold(u.clone(), |acc, _| kron(&acc, u))
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn ansatz_hierarchy(v in complex_entries(16)) {
        let psi = random_state(&v);
        let opts = BruteForceOptions { restarts: 30, ..BruteForceOptions::default() };
        let e = |kind| brute_force_geometric(&psi, 2, kind, &opts).unwrap().total.unwrap();
        let (ident, alt, arb) = (e(AnsatzKind::Identical), e(AnsatzKind::Alternating), e(AnsatzKind::Arbitrary));
        prop_assert!(arb <= alt + 1e-6, "{arb} {alt}");
        prop_assert!(alt <= ident + 1e-6, "{alt} {ident}");
        let block = e(AnsatzKind::BlockArbitrary(2));
        prop_assert!(block <= arb + 1e-6);
    }

    #[test]
    fn brute_force_is_unitarily_invariant(v in complex_entries(16), u in unitary(2)) {
        let psi = random_state(&v);
        let rotated = product_unitary(&u, 4) * &psi;
        let opts = BruteForceOptions::default();
        let a = brute_force_geometric(&psi, 2, AnsatzKind::Arbitrary, &opts).unwrap().total.unwrap();
        let b = brute_force_geometric(&rotated, 2, AnsatzKind::Arbitrary, &opts).unwrap().total.unwrap();
        prop_assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
}
