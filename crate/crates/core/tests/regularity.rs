use twisted_core::groups::GroupElement;
use twisted_core::length::{ball, m_ell_matrix, CliffordLength, LinearLength, TableLength, WordLength};
use twisted_core::linalg::{c, max_abs, random_hermitian, CMat};
use twisted_core::regularity::*;
use rand::SeedableRng;

fn ge(v: &[i64]) -> GroupElement {
    GroupElement::new(v.to_vec())
}

#[test]
fn delta_vanishes_on_functions_of_d() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(1);
    let d = random_hermitian(&mut rng, 6);
    let f = DiracFactor::new(&d).unwrap();
    let t = f.eig.apply(|x| x.abs().sqrt() + x * x);
    assert!(max_abs(&delta_k(&t, &f, 1)) < 1e-12);
}

#[test]
fn delta_obeys_leibniz() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(2);
    let d = random_hermitian(&mut rng, 7);
    let f = DiracFactor::new(&d).unwrap();
    let s = random_hermitian(&mut rng, 7);
    let t = random_hermitian(&mut rng, 7);
    let lhs = delta_k(&(&s * &t), &f, 1);
    let rhs = delta_k(&s, &f, 1) * &t + &s * delta_k(&t, &f, 1);
    assert!(max_abs(&(lhs - rhs)) < 1e-10);
}

#[test]
fn eigenbasis_and_block_absolute_values_agree_on_group_triple() {
    let l = CliffordLength::new(2);
    let b = ball(&l, 4.0).unwrap();
    let d = m_ell_matrix(&l, &b).to_dense();
    let f = DiracFactor::new(&d).unwrap();
    let (lam, com) = translation_and_commutator(&l, &b, &ge(&[1, 0])).unwrap();
    let abs = abs_m_ell(&l, &b);
    for k in 1..=3 {
        let dense = delta_k(&com.to_dense(), &f, k);
        let sparse = delta_k_sparse(&com, &abs, k).to_dense();
        assert!(max_abs(&(dense - &sparse)) < 1e-9 * (1.0 + max_abs(&sparse)));
        let dense_l = delta_k(&lam.to_dense(), &f, k);
        let sparse_l = delta_k_sparse(&lam, &abs, k).to_dense();
        assert!(max_abs(&(dense_l - sparse_l)) < 1e-9);
    }
}

#[test]
fn translation_delta_matches_the_block_formula() {
    let l = WordLength::new(twisted_core::groups::AbelianGroup::free(1));
    let b = ball(&l, 5.0).unwrap();
    let (lam, _) = translation_and_commutator(&l, &b, &ge(&[2])).unwrap();
    let d1 = delta_k_sparse(&lam, &abs_m_ell(&l, &b), 1);
    for (j, h) in b.elements.iter().enumerate() {
        let gh = h.coords[0] + 2;
        if let Some(i) = b.position(&ge(&[gh])) {
            assert_eq!(d1.get(i, j), c((gh.abs() - h.coords[0].abs()) as f64, 0.0));
        }
    }
}

#[test]
fn closed_form_matches_iterated_commutators() {
    let l = CliffordLength::new(2);
    let b = ball(&l, 8.0).unwrap();
    let abs = abs_m_ell(&l, &b);
    for g in [ge(&[1, 0]), ge(&[0, 1]), ge(&[1, -1])] {
        let (_, com) = translation_and_commutator(&l, &b, &g).unwrap();
        for k in 1..=3 {
            let a = delta_k_sparse(&com, &abs, k);
            let cf = closed_form_delta_commutator(&l, &b, &g, k).unwrap();
            assert!(a.max_abs_diff(&cf) < 1e-12 * (1.0 + cf.max_abs()), "k={k}");
        }
    }
}

#[test]
fn tech_condition_cases() {
    let l = CliffordLength::new(2);
    assert_eq!(tech_condition_check(&l, &ball(&l, 5.0).unwrap()).max_commutator, 0.0);
    let w = WordLength::new(twisted_core::groups::AbelianGroup::free(1));
    assert_eq!(tech_condition_check(&w, &ball(&w, 5.0).unwrap()).max_commutator, 0.0);
    let t = LinearLength::tilted(0.5).unwrap();
    let rep = tech_condition_check(&t, &ball(&t, 4.0).unwrap());
    assert!(rep.max_commutator > 0.1 && rep.worst.is_some());
}

#[test]
fn rotated_table_length_breaks_tech() {
    let g = twisted_core::groups::AbelianGroup::finite(vec![3]).unwrap();
    let mut vals = std::collections::HashMap::new();
    vals.insert(ge(&[0]), CMat::zeros(2, 2));
    vals.insert(ge(&[1]), twisted_core::linalg::pauli_z() + CMat::identity(2, 2) * c(2.0, 0.0));
    vals.insert(ge(&[2]), twisted_core::linalg::pauli_x() * c(2.0, 0.0) + CMat::identity(2, 2));
    let l = TableLength::new(g.clone(), 2, vals).unwrap();
    let rep = tech_condition_check(&l, &twisted_core::groups::Ball::whole(&g).unwrap());
    assert!(rep.max_commutator > 0.1);
}

#[test]
fn clifford_sweep_plateaus() {
    let l = CliffordLength::new(2);
    let rep = group_regularity_sweep(&l, &[ge(&[1, 0]), ge(&[0, 1])], 3, &[10.0, 20.0], 5.0).unwrap();
    assert!(rep.tech_holds);
    assert!(rep.all_plateau(), "{:?}", rep.plateaus);
    for r in &rep.rows {
        assert!(r.delta_commutator <= 1.0 + 1e-12);
    }
}

#[test]
fn scalar_word_length_bound_is_one() {
    let l = WordLength::new(twisted_core::groups::AbelianGroup::free(1));
    let rep = group_regularity_sweep(&l, &[ge(&[1])], 3, &[10.0, 30.0], 5.0).unwrap();
    for r in &rep.rows {
        assert_eq!(r.delta_translation, 1.0);
        assert_eq!(r.delta_commutator, 1.0);
    }
}

#[test]
fn tilted_length_grows() {
    let l = LinearLength::tilted(0.5).unwrap();
    let rep = group_regularity_sweep(&l, &[ge(&[1, 0])], 1, &[10.0, 20.0], 3.0).unwrap();
    assert!(!rep.tech_holds);
    assert!(rep.max_commutator_ratio() > 1.5, "{:?}", rep.plateaus);
}

#[test]
fn kmax_is_capped() {
    let l = CliffordLength::new(1);
    assert!(group_regularity_sweep(&l, &[ge(&[1])], 4, &[1.0, 2.0], 1.0).is_err());
    assert!(gdo_generate(1, 4, 9).is_err());
}

#[test]
fn lipschitz_constants() {
    let one = lipschitz_abs_check(1, 2000, 7).unwrap();
    assert!(one.max_ratio <= 1.0 + 1e-12);
    let two = lipschitz_abs_check(2, 10_000, 7).unwrap();
    assert!(two.exceeds_one, "{}", two.max_ratio);
    assert_eq!(lipschitz_abs_check(2, 300, 9).unwrap().max_ratio, lipschitz_abs_check(2, 300, 9).unwrap().max_ratio);
}

#[test]
fn sobolev_probe_trivial_cases() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(4);
    let d = random_hermitian(&mut rng, 8) * c(5.0, 0.0);
    let f = DiracFactor::new(&d).unwrap();
    let half = f.eig.apply(|x| (1.0 + x * x).sqrt());
    let p = sobolev_order_probe(&half, &f, 1.0, &DEFAULT_SGRID);
    assert!(p.norms.iter().all(|n| (n - 1.0).abs() < 1e-10));
    let q = sobolev_order_probe(&d, &f, 1.0, &DEFAULT_SGRID);
    assert!(q.norms.iter().all(|n| *n <= 1.0 + 1e-12));
}

#[test]
fn gdo_words_and_degrees() {
    let w0 = gdo_generate(2, 0, 9).unwrap();
    assert!(w0.words.iter().all(|w| w.degree() == 0));
    assert!(w0.words.iter().all(|w| !format!("{w}").contains('Δ')));
    let w2 = gdo_generate(2, 2, 9).unwrap();
    assert!(w2.words.iter().any(|w| matches!(w, GdoWord::AdDelta(_))));
    assert!(w2.words.iter().any(|w| matches!(w, GdoWord::Prod(a, b) if a.degree() == 0 && matches!(**b, GdoWord::AdDelta(_)))));
    for w in &w2.words {
        if let GdoWord::Prod(a, b) = w {
            assert_eq!(w.degree(), a.degree() + b.degree());
        }
        assert!(w.degree() <= 2);
    }
    assert!(w2.counts.windows(2).all(|p| p[1] > 0));
}

#[test]
fn gdo_words_have_their_order_on_the_z_triple() {
    let l = CliffordLength::new(1);
    let words = gdo_generate(1, 1, 4).unwrap().words;
    let mut rungs = Vec::new();
    for r in [20.0, 40.0] {
        let b = ball(&l, r).unwrap();
        let d = m_ell_matrix(&l, &b).to_dense();
        let (lam, _) = translation_and_commutator(&l, &b, &ge(&[1])).unwrap();
        rungs.push((d, vec![lam.to_dense()]));
    }
    let probes = gdo_order_ladder(&rungs, &words, &DEFAULT_SGRID).unwrap();
    for p in &probes {
        assert!(p.max_norms.iter().all(|x| x.is_finite()));
        assert!(p.ratio < 1.3, "{p:?}");
    }
}

#[test]
fn identity_action_passes_and_reversal_fails() {
    let mk = |n: usize, rev: bool| {
        let d = CMat::from_diagonal(&nalgebra::DVector::from_fn(n, |i, _| c(i as f64, 0.0)));
        let mut u = CMat::zeros(n, n);
        for i in 0..n {
            if rev {
                u[(n - 1 - i, i)] = c(1.0, 0.0);
            } else {
                u[(i, i)] = c(1.0, 0.0);
            }
        }
        ActionRung { dirac: d, unitaries: vec![("U".into(), u)] }
    };
    let id = group_action_order_check(&[mk(20, false), mk(40, false)], 2, &DEFAULT_SGRID).unwrap();
    assert!(id.pass());
    let bad = group_action_order_check(&[mk(20, true), mk(40, true)], 2, &DEFAULT_SGRID).unwrap();
    assert!(!bad.pass());
    let comm = bad.probes.iter().find(|p| p.label == "[D,U]").unwrap();
    assert!(comm.ratio > 1.5);
}
