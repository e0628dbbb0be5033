//! Decomposition invariants over the case matrix.

use nalgebra::{Complex, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rigidity_core::embed::embedding_for;
use rigidity_core::isotype::{
    decompose_adjoint, equivalence_test, reference_adjoint, reference_symmetric_power, ComponentLabel, ReferenceRep,
};
use rigidity_core::linops::{RealMatrix, ToleranceConfig};
use rigidity_core::verify::case_matrix;

fn eigenvalues(m: &RealMatrix) -> Vec<Complex<f64>> {
    nalgebra::Schur::try_new(m.clone(), 1e-14, 10_000)
        .expect("Schur iteration converges")
        .complex_eigenvalues()
        .iter()
        .copied()
        .collect()
}

/// Greedy nearest matching; the largest distance used.
fn multiset_distance(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("same length");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

fn combine(ms: &[RealMatrix], c: &DVector<f64>) -> RealMatrix {
    let mut acc = RealMatrix::zeros(ms[0].nrows(), ms[0].ncols());
    for (m, x) in ms.iter().zip(c.iter()) {
        acc += m * *x;
    }
    acc
}

#[test]
fn intertwined_components_share_spectra_with_their_reference() {
    let cfg = ToleranceConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in case_matrix() {
        let e = embedding_for(case, &cfg).unwrap();
        let rep = decompose_adjoint(&e, &cfg).unwrap();
        let n = case.n();
        for comp in &rep.components {
            let reference: ReferenceRep = match comp.label {
                ComponentLabel::Adjoint => reference_adjoint(n),
                ComponentLabel::SymPower(m) => reference_symmetric_power(n, m),
                _ => continue,
            };
            assert!(equivalence_test(comp, &reference, &e, &cfg).is_some(), "{case}: {}", comp.label);
            let q = comp.subspace.basis();
            let restricted: Vec<RealMatrix> = e.ad_operators().iter().map(|a| q.transpose() * a * q).collect();
            for _ in 0..3 {
                let c = DVector::from_fn(restricted.len(), |_, _| rng.gen_range(-1.0..1.0));
                let got = eigenvalues(&combine(&restricted, &c));
                let single = eigenvalues(&combine(&reference.matrices, &c));
                let want: Vec<_> = single
                    .iter()
                    .flat_map(|v| std::iter::repeat(*v).take(comp.multiplicity))
                    .collect();
                let d = multiset_distance(&got, &want);
                assert!(d < 1e-6, "{case}: {} spectra differ by {d:e}", comp.label);
            }
        }
    }
}

#[test]
fn components_sum_to_the_algebra_and_dims_are_integral() {
    let cfg = ToleranceConfig::default();
    for case in case_matrix() {
        let e = embedding_for(case, &cfg).unwrap();
        let rep = decompose_adjoint(&e, &cfg).unwrap();
        assert_eq!(rep.dim(), e.target().dim(), "{case}");
        assert_eq!(rep.g0_dim + rep.g1_dims.values().sum::<usize>(), e.target().dim());
        for (m, c) in rep.sym_powers() {
            let per_copy = reference_symmetric_power(case.n(), m).dim;
            assert_eq!(c.real_dim, c.multiplicity * per_copy, "{case}");
        }
    }
}

#[test]
fn casimir_scalar_on_standard_copies_is_eight_thirds() {
    let cfg = ToleranceConfig::default();
    let e = embedding_for(rigidity_core::groups::GroupCase::SuPq { n: 2, q0: 1, p: 3, q: 2 }, &cfg).unwrap();
    let rep = decompose_adjoint(&e, &cfg).unwrap();
    let c = rep.find(&ComponentLabel::SymPower(1)).unwrap();
    assert!((c.casimir_scalar - 8.0 / 3.0).abs() < 1e-9);
    assert!(rep.find(&ComponentLabel::Trivial).unwrap().casimir_scalar.abs() < 1e-12);
    // trace identity on one adjoint copy: tr C = 2(n+1)·dim l for the trace form
    let adj = rep.find(&ComponentLabel::Adjoint).unwrap();
    assert!((adj.casimir_scalar * 8.0 - 48.0).abs() < 1e-8);
}
