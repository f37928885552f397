use std::collections::BTreeMap;
use std::sync::Arc;
use twisted_core::coverings::*;
use twisted_core::groups::{AbelianGroup, GroupElement};
use twisted_core::linalg::{c, fro_norm, pauli_x, pauli_y, CMat};
use twisted_core::twist::{verify_twisting_pair, PTwisted, TwistingPair, VerifyMode};

fn ge(v: &[i64]) -> GroupElement {
    GroupElement::new(v.to_vec())
}

fn dims(a: &CoveringAction) -> Vec<usize> {
    spectral_decompose(a).unwrap().iter().map(|s| s.basis.len()).collect()
}

#[test]
fn spectral_dimensions() {
    assert_eq!(dims(&CoveringAction::m2_z2()), vec![2, 2]);
    assert_eq!(dims(&CoveringAction::c3_swap()), vec![2, 1]);
    let t = CoveringAction::trivial(vec![2, 1], AbelianGroup::finite(vec![3]).unwrap()).unwrap();
    assert_eq!(dims(&t), vec![5, 0, 0]);
}

#[test]
fn m2_subspaces_are_diagonal_and_antidiagonal() {
    let a = CoveringAction::m2_z2();
    let subs = spectral_decompose(&a).unwrap();
    for b in &subs[0].basis {
        assert!(b[(0, 1)].norm() < 1e-14 && b[(1, 0)].norm() < 1e-14);
    }
    for b in &subs[1].basis {
        assert!(b[(0, 0)].norm() < 1e-14 && b[(1, 1)].norm() < 1e-14);
    }
}

#[test]
fn projectors_are_complete_and_orthogonal() {
    let a = CoveringAction::c3_swap();
    let ks = a.characters();
    for b in a.basis() {
        let mut sum = CMat::zeros(3, 3);
        for k in &ks {
            let p = a.project(k, &b);
            assert!(fro_norm(&(a.project(k, &p) - &p)) < 1e-12);
            for k2 in &ks {
                if k2 != k {
                    assert!(fro_norm(&a.project(k2, &p)) < 1e-12);
                }
            }
            sum += p;
        }
        assert!(fro_norm(&(sum - b)) < 1e-12);
    }
}

#[test]
fn product_audit_passes() {
    for a in [CoveringAction::m2_z2(), CoveringAction::c3_swap(), CoveringAction::c2_swap()] {
        let subs = spectral_decompose(&a).unwrap();
        assert!(subspace_product_audit(&a, &subs).unwrap().is_ok(1e-12));
    }
}

#[test]
fn non_homomorphic_action_is_rejected() {
    let w = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)]));
    assert!(CoveringAction::from_generators(vec![2], AbelianGroup::z2n(1), &[w]).is_err());
}

#[test]
fn elwood_verdicts() {
    let m2 = elwood_freeness_check(&CoveringAction::m2_z2());
    assert!(m2.free && m2.rank == 8);
    assert!(!elwood_freeness_check(&CoveringAction::c3_swap()).free);
    assert!(!elwood_freeness_check(&CoveringAction::trivial(vec![2], AbelianGroup::z2n(1)).unwrap()).free);
    assert!(elwood_freeness_check(&CoveringAction::c2_swap()).free);
}

#[test]
fn polar_examples() {
    let u = pauli_y();
    let p = polar_decompose(&u, None).unwrap();
    assert!(fro_norm(&(p.v - &u)) < 1e-12 && fro_norm(&(p.h - CMat::identity(2, 2))) < 1e-12);
    let two = CMat::identity(2, 2) * c(2.0, 0.0);
    let p = polar_decompose(&two, None).unwrap();
    assert!(fro_norm(&(p.v - CMat::identity(2, 2))) < 1e-12 && fro_norm(&(p.h - &two)) < 1e-12);
    let m = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let p = polar_decompose(&m, None).unwrap();
    let h = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(2.0, 0.0)]));
    assert!(fro_norm(&(p.h - h)) < 1e-12);
    assert!(fro_norm(&(p.v - pauli_x())) < 1e-12);
    assert!(polar_decompose(&CMat::zeros(2, 2), None).is_err());
}

#[test]
fn rank1_verdicts() {
    let m2 = CoveringAction::m2_z2();
    let r = rank1_regular_check(&m2, &spectral_decompose(&m2).unwrap(), 1).unwrap();
    assert!(r.regular);
    let mu = &r.frame.as_ref().unwrap().mu[&ge(&[1])];
    assert!(mu[(0, 0)].norm() < 1e-12 && (mu[(0, 1)].norm() - 1.0).abs() < 1e-12);
    for seed in 0..5 {
        let c3 = CoveringAction::c3_swap();
        let r = rank1_regular_check(&c3, &spectral_decompose(&c3).unwrap(), seed).unwrap();
        assert!(!r.regular && r.frame.is_none());
        assert!(r.characters[1].certified_singular);
    }
    let c2 = CoveringAction::c2_swap();
    assert!(rank1_regular_check(&c2, &spectral_decompose(&c2).unwrap(), 3).unwrap().regular);
}

#[test]
fn frame_pair_and_phi_on_m2() {
    let a = CoveringAction::m2_z2();
    let mut mu = BTreeMap::new();
    mu.insert(ge(&[0]), CMat::identity(2, 2));
    mu.insert(ge(&[1]), pauli_x());
    let pair = frame_to_pair(&a, &Frame { mu }, 1e-12).unwrap();
    let rep = verify_twisting_pair(&pair, VerifyMode::Exhaustive, 1e-12).unwrap();
    assert!(rep.is_ok());
    assert!(fro_norm(&(pair.sigma(&ge(&[1]), &ge(&[1])) - CMat::identity(2, 2))) < 1e-14);
    let phi = crossed_iso_phi(&pair, &a, 100_000, 0).unwrap();
    assert!(phi.pass(1e-11), "{phi:?}");
    assert_eq!(phi.domain_dim, 4);
}

#[test]
fn bad_frame_is_rejected() {
    let a = CoveringAction::m2_z2();
    let mut mu = BTreeMap::new();
    mu.insert(ge(&[0]), CMat::identity(2, 2));
    mu.insert(ge(&[1]), twisted_core::linalg::pauli_z());
    assert!(frame_to_pair(&a, &Frame { mu: mu.clone() }, 1e-12).is_err());
    mu.insert(ge(&[1]), pauli_x() * c(2.0, 0.0));
    assert!(frame_to_pair(&a, &Frame { mu }, 1e-12).is_err());
}

#[test]
fn trivial_group_phi_is_identity() {
    let a = CoveringAction::trivial(vec![2], AbelianGroup::finite(vec![]).unwrap_or(AbelianGroup::trivial())).unwrap();
    let subs = spectral_decompose(&a).unwrap();
    let r = rank1_regular_check(&a, &subs, 0).unwrap();
    let pair = frame_to_pair(&a, r.frame.as_ref().unwrap(), 1e-12).unwrap();
    let phi = crossed_iso_phi(&pair, &a, 10_000, 0).unwrap();
    assert!(phi.pass(1e-12));
}

fn z3_action() -> CoveringAction {
    // ℤ₃ acting on M₃ by the clock matrix.
    let w = 2.0 * std::f64::consts::PI / 3.0;
    let clock = CMat::from_diagonal(&nalgebra::DVector::from_fn(3, |i, _| twisted_core::linalg::C64::from_polar(1.0, w * i as f64)));
    CoveringAction::from_generators(vec![3], AbelianGroup::finite(vec![3]).unwrap(), &[clock]).unwrap()
}

#[test]
fn z3_clock_covering_round_trip() {
    let a = z3_action();
    let subs = spectral_decompose(&a).unwrap();
    let r = rank1_regular_check(&a, &subs, 11).unwrap();
    assert!(r.regular);
    assert!(elwood_freeness_check(&a).free);
    let pair = frame_to_pair(&a, r.frame.as_ref().unwrap(), 1e-10).unwrap();
    assert!(verify_twisting_pair(&pair, VerifyMode::Exhaustive, 1e-10).unwrap().is_ok());
    assert!(crossed_iso_phi(&pair, &a, 100_000, 0).unwrap().pass(1e-10));
    for row in round_trip_dims(&a, &subs).unwrap() {
        assert_eq!(row.dim_b_k, row.dim_crossed);
    }
}

#[test]
fn two_frames_are_related_by_p() {
    let a = z3_action();
    let subs = spectral_decompose(&a).unwrap();
    let f1 = rank1_regular_check(&a, &subs, 1).unwrap().frame.unwrap();
    let f2 = rank1_regular_check(&a, &subs, 2).unwrap().frame.unwrap();
    let p1 = Arc::new(frame_to_pair(&a, &f1, 1e-10).unwrap());
    let p2 = frame_to_pair(&a, &f2, 1e-10).unwrap();
    let p: BTreeMap<_, _> = f1.mu.keys().map(|j| (j.clone(), &f2.mu[j] * f1.mu[j].adjoint())).collect();
    let moved = PTwisted::new(p1, p, 1e-10).unwrap();
    let samples = moved.test_elements();
    for j in a.characters() {
        for x in &samples {
            assert!(fro_norm(&(moved.rho(&j, x) - p2.rho(&j, x))) < 1e-10);
        }
        for k in a.characters() {
            assert!(fro_norm(&(moved.sigma(&j, &k) - p2.sigma(&j, &k))) < 1e-10);
        }
    }
}
