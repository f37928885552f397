use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use twisted_core::algebra::verify_covariant;
use twisted_core::coeff::{CoeffAlgebra, TorusElement};
use twisted_core::coverings::crossed_iso_phi;
use twisted_core::groups::GroupElement;
use twisted_core::length::LengthFunction;
use twisted_core::linalg::eigvalsh;
use twisted_core::phase::Phase;
use twisted_core::torus::*;
use twisted_core::triple::{commutator_norms, summability_report};
use twisted_core::twist::{verify_twisting_pair, TwistingPair, VerifyMode};

const M2: [[i64; 2]; 2] = [[2, 0], [0, 2]];
const M6: [[i64; 2]; 2] = [[2, 1], [0, 3]];

fn cfg(m: [[i64; 2]; 2], r: i64) -> TorusConfig {
    TorusConfig::new(DEFAULT_THETA, m, r).unwrap()
}

fn g(v: &[i64]) -> GroupElement {
    GroupElement::new(v.to_vec())
}

#[test]
fn w_product_examples() {
    let (p, s) = w_product([0, 0], [3, -1]);
    assert!(p.is_one());
    assert_eq!(s, [3, -1]);
    let (p, s) = w_product([1, 0], [0, 1]);
    assert_eq!(p, Phase::theta(-1));
    assert_eq!(s, [1, 1]);
    let alg = cfg(M2, 2).algebra();
    for x in [[1, 0], [2, -3], [-4, 5]] {
        let w = TorusElement::w(x);
        assert!(alg.distance(&alg.mul(&w, &alg.adjoint(&w)), &alg.one()) < 1e-15);
    }
}

#[test]
fn w_product_is_a_cocycle_in_the_exponent() {
    let vs = [[1, 0], [0, 1], [2, -1], [-3, 4], [5, 5]];
    for x in vs {
        for y in vs {
            for z in vs {
                let lhs = w_product(y, z).0.mul(&w_product(x, [y[0] + z[0], y[1] + z[1]]).0);
                let rhs = w_product(x, y).0.mul(&w_product([x[0] + y[0], x[1] + y[1]], z).0);
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn trace_examples_and_traciality() {
    let alg = cfg(M2, 2).algebra();
    assert_eq!(trace_tau(&TorusElement::w([1, 0])), C64::new(0.0, 0.0));
    assert_eq!(trace_tau(&alg.one()), C64::new(1.0, 0.0));
    for x in [[1, 0], [3, -2], [0, 7]] {
        let p = alg.mul(&TorusElement::w(x), &TorusElement::w([-x[0], -x[1]]));
        assert!((trace_tau(&p) - C64::new(1.0, 0.0)).norm() < 1e-15);
    }
    let f = alg.add(&TorusElement::monomial([1, 2], C64::new(0.3, -1.0)), &TorusElement::monomial([0, -1], C64::new(2.0, 0.5)));
    let h = alg.add(&TorusElement::monomial([-1, -1], C64::new(-0.7, 0.2)), &TorusElement::monomial([0, 1], C64::new(1.1, 0.0)));
    let a = trace_tau(&alg.mul(&f, &h));
    let b = trace_tau(&alg.mul(&h, &f));
    assert!((a - b).norm() < 1e-12);
    let pos = trace_tau(&alg.mul(&alg.adjoint(&f), &f));
    assert!(pos.re > 0.0 && pos.im.abs() < 1e-12);
}

#[test]
fn gamma_examples() {
    let c = cfg(M2, 2);
    let lat = &c.lattice;
    assert_eq!(gamma_phase(lat, [1, 0], [1, 0]), Phase::minus_one());
    for t in [[2, 0], [0, 2], [4, -6]] {
        for x in [[1, 0], [1, 1], [3, -5]] {
            assert!(gamma_phase(lat, t, x).is_one());
        }
    }
    for t in [[1, 0], [0, 1], [1, 1]] {
        assert!(gamma_phase(lat, t, [2, -4]).is_one());
    }
    let c6 = cfg(M6, 2);
    for t in [[2, 0], [1, 3]] {
        for x in [[1, 0], [0, 1], [2, 7]] {
            assert!(gamma_phase(&c6.lattice, t, x).is_one(), "t={t:?} x={x:?}");
        }
    }
}

#[test]
fn spectral_subspaces_partition_the_window() {
    for m in [M2, M6] {
        let c = cfg(m, 3);
        let ks = c.dual_group().elements().unwrap();
        let mut all: Vec<[i64; 2]> = ks.iter().flat_map(|k| torus_spectral_subspace(&c, k)).collect();
        all.sort();
        assert_eq!(all, {
            let mut w = c.window();
            w.sort();
            w
        });
        for r in c.a_window() {
            assert!(c.lattice.mhat_apply(r).is_ok());
        }
    }
    let c = cfg(M2, 3);
    assert_eq!(c.dual_group().order(), Some(4));
    for k in c.dual_group().elements().unwrap() {
        let s = c.section(&k);
        for r in torus_spectral_subspace(&c, &k) {
            assert_eq!(((r[0] - s[0]).rem_euclid(2), (r[1] - s[1]).rem_euclid(2)), (0, 0));
        }
    }
}

#[test]
fn nu_and_y_examples() {
    let c = cfg(M2, 3);
    let e = g(&[0, 0]);
    let z = nu_and_y(&c, &e, &e, [0, 0]).unwrap();
    assert_eq!((z.nu, z.y), (0.0, [0, 0]));
    let j = c.lattice.character_of_section([1, 0]);
    assert_eq!(c.section(&j), [1, 0]);
    let z = nu_and_y(&c, &j, &j, [0, 0]).unwrap();
    assert_eq!((z.nu_over_theta, z.y), (0, [0, 0]));
    for m in [M2, M6] {
        let c = cfg(m, 3);
        let ks = c.dual_group().elements().unwrap();
        for j in &ks {
            for k in &ks {
                nu_and_y(&c, j, k, [1, -2]).unwrap();
            }
        }
    }
}

#[test]
fn frame_pair_sigma_example_and_axioms() {
    let c = cfg(M2, 2);
    let pair = frame_pair(&c).unwrap();
    let j = c.lattice.character_of_section([1, 0]);
    let k = c.lattice.character_of_section([0, 1]);
    let s = pair.sigma(&j, &k);
    let expect = C64::from_polar(1.0, -PI * DEFAULT_THETA);
    assert!(c.algebra().distance(&s, &TorusElement::monomial([0, 0], expect)) < 1e-14);
    for m in [M2, M6] {
        let pair = frame_pair(&cfg(m, 2)).unwrap();
        let rep = verify_twisting_pair(&pair, VerifyMode::Exhaustive, 1e-12).unwrap();
        assert!(rep.is_ok(), "{m:?}: {:?}", rep.violations.first());
    }
}

#[test]
fn coefficient_triple_examples() {
    let c = cfg(M2, 3);
    let t = build_torus_coefficient_triple(&c);
    let zero = t.labels.iter().position(|l| l == "+W(0,0)").unwrap();
    let col = t.dirac.cols[zero].iter().map(|(_, v)| v.norm()).sum::<f64>();
    assert_eq!(col, 0.0);
    let mut spec = t.spectrum().unwrap();
    let mut want: Vec<f64> =
        c.a_window().iter().flat_map(|r| [1.0, -1.0].map(|s| s * 2.0 * PI * ((r[0] * r[0] + r[1] * r[1]) as f64).sqrt())).collect();
    spec.sort_by(f64::total_cmp);
    want.sort_by(f64::total_cmp);
    for (a, b) in spec.iter().zip(&want) {
        assert!((a - b).abs() < 1e-9);
    }
    assert!(t.check(&c.a_generators()).is_ok(1e-12));
    let gens = [[2, 0], [0, 2], [2, 2]];
    let norms = commutator_norms(&t, &gens.map(TorusElement::w));
    for (n, r) in norms.iter().zip(gens) {
        let want = 2.0 * PI * ((r[0] * r[0] + r[1] * r[1]) as f64).sqrt();
        assert!((n - want).abs() < 1e-9 * want, "{n} vs {want}");
    }
}

#[test]
fn crossed_triple_examples() {
    let c = cfg(M2, 3);
    let t = build_torus_crossed_triple(&c).unwrap();
    let l = TorusLength { lattice: c.lattice.clone() };
    assert_eq!(l.eval(&g(&[0, 0])), epsilon([0.0, 0.0]));
    let ev = eigvalsh(&l.eval(&g(&[1, 0]))).unwrap();
    assert!((ev[1] - 0.5).abs() < 1e-15 && (ev[0] + 0.5).abs() < 1e-15);
    // The ĵ = 0, ĝ = 0 block reproduces the coefficient representation.
    let coeff = build_torus_coefficient_triple(&c);
    let a = TorusElement::w(c.lattice.mt_apply([1, 0]));
    let big = t.rep.apply(&twisted_core::algebra::TwistedElement::monomial(g(&[0, 0]), a.clone()));
    let small = coeff.rep.apply(&a);
    let p = coeff.split.unwrap();
    let nb = 4;
    for (j, col) in small.cols.iter().enumerate() {
        for &(i, v) in col {
            let (hi, hj) = (i, j);
            {
                let gi = 0;
                for w in 0..2 {
                    let got = big.get((hi * nb + gi) * 2 + w, (hj * nb + gi) * 2 + w);
                    assert!((got - v).norm() < 1e-14, "{hi} {hj} {p}");
                }
            }
        }
    }
    assert!(t.check(&[]).hermitian_residual < 1e-12);
}

#[test]
fn crossed_oracle_matches_generic_builder() {
    for m in [M2, M6] {
        let rep = crossed_oracle(&cfg(m, 3)).unwrap();
        assert!(rep.pass(1e-11), "{m:?}: {rep:?}");
        assert!(rep.dim > 0 && rep.dim <= 4000);
    }
}

#[test]
fn equivariant_oracle_matches_generic_builder() {
    for m in [M2, M6] {
        let rep = equivariant_oracle(&cfg(m, 3)).unwrap();
        assert!(rep.pass(1e-11), "{m:?}: {rep:?}");
    }
}

#[test]
fn equivariant_examples() {
    let c = cfg(M2, 3);
    let t = build_torus_equivariant_triple(&c).unwrap();
    let id = t.rep.apply(&twisted_core::algebra::TwistedElement::monomial(g(&[0, 0]), TorusElement::w([0, 0])));
    assert!(id.max_abs_diff(&twisted_core::linalg::SpMat::identity(t.dim())) < 1e-15);
    let b = build_torus_b_triple(&c);
    let cov = torus_covariant_pair(&c, true);
    for k in c.dual_group().elements().unwrap() {
        let u = (cov.unitary)(&k);
        let cm = b.dirac.matmul(&u).sub(&u.matmul(&b.dirac)).mask_cols(&b.interior).op_norm();
        let s = c.section(&k);
        let want = 2.0 * PI * ((s[0] * s[0] + s[1] * s[1]) as f64).sqrt();
        assert!((cm - want).abs() < 1e-9 * (1.0 + want), "{k}: {cm} vs {want}");
    }
    let pair = frame_pair(&c).unwrap();
    let ks = c.dual_group().elements().unwrap();
    let cov1 = torus_covariant_pair(&c, false);
    let mask: Vec<bool> = c.window().iter().map(|r| r[0].abs().max(r[1].abs()) <= 1).collect();
    let rep = verify_covariant(&cov1, &pair, &ks, &c.a_generators(), Some(&mask), 1e-12).unwrap();
    assert!(rep.is_ok(), "{:?}", rep.violations.first());
}

#[test]
fn intertwining_on_padded_window() {
    let rep = torus_intertwining(&cfg(M2, 3)).unwrap();
    assert!(rep.is_ok(1e-11), "{rep:?}");
    assert!(rep.w_unitarity < 1e-12);
}

#[test]
fn phi_on_torus_models() {
    for m in [M2, M6] {
        let c = cfg(m, 3);
        let pair = frame_pair(&c).unwrap();
        let amb = TorusCovering::new(&c).unwrap();
        let rep = crossed_iso_phi(&pair, &amb, 200_000, 1).unwrap();
        assert!(rep.pass(1e-11), "{m:?}: {rep:?}");
    }
}

#[test]
fn summability_is_two() {
    let c = cfg(M2, 3);
    let (coeff, crossed) = torus_rungs(&c, &[10, 20, 30]).unwrap();
    let a = summability_report(&coeff, 2.0, 0.0, 0.3).unwrap();
    let b = summability_report(&crossed, 2.0, 0.0, 0.3).unwrap();
    assert!((a.estimate - 2.0).abs() < 0.25, "{}", a.estimate);
    assert!((b.estimate - 2.0).abs() < 0.25, "{}", b.estimate);
    assert!(b.bound_holds);
}

#[test]
fn rejects_bad_configs() {
    assert!(TorusConfig::new(DEFAULT_THETA, [[1, 0], [0, 1]], 3).is_err());
    assert!(TorusConfig::new(DEFAULT_THETA, [[2, 0], [0, 2]], 0).is_err());
    assert!(TorusConfig::new(DEFAULT_THETA, [[2, 4], [1, 2]], 3).is_err());
}

#[test]
fn frame_unitaries_have_stable_orders() {
    let c = cfg(M2, 3);
    let rungs = torus_action_rungs(&c, &[3, 6]).unwrap();
    let rep = twisted_core::regularity::group_action_order_check(&rungs, 2, &[-2.0, -1.0, 0.0, 1.0, 2.0]).unwrap();
    assert!(rep.pass(), "{:?}", rep.probes.iter().filter(|p| !p.pass).collect::<Vec<_>>());
}
