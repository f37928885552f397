use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twisted_core::algebra::{
    add, distance, integrated_form, involution, left_regular_matrix, star_product, unit, verify_covariant,
    CovariantPair, TwistedElement, UnitaryMap,
};
use twisted_core::coeff::{CoeffAlgebra, Cyclo, DefiningRep, MatrixAlgebra, Representation, ScalarRep};
use twisted_core::groups::{enumerate_ball, AbelianGroup, Ball, GroupElement, QuotientLattice};
use twisted_core::length::{
    ball, growth_estimate, m_ell_matrix, m_ell_spectrum, properness_check, sigma_sandwich, translation_bounded_sweep,
    CliffordLength, LengthFunction, PullbackLength, TableLength, WordLength,
};
use twisted_core::linalg::{c, eigvalsh, eye, random_matrix, rank, CMat, SpMat};
use twisted_core::order::{
    counting_lambda, estimate_all, zeta_value, AbscissaEstimator, EigenvalueSequence, LambdaSlope, MuSlope, TraceScan,
};
use twisted_core::phase::Phase;
use twisted_core::twist::{
    clifford_unitaries, verify_twisting_pair, CliffordCocycle, InnerTwist, PTwisted, ScalarCocycle, ScalarTwist,
    TableCocycle, ThetaCocycle, TrivialPair, TwistingPair, VerifyMode,
};

fn el(v: &[i64]) -> GroupElement {
    GroupElement::new(v.to_vec())
}

// groups

#[test]
fn compose_examples() {
    let z22 = AbelianGroup::z2n(2);
    assert_eq!(z22.compose(&el(&[1, 0]), &el(&[0, 1])).unwrap(), el(&[1, 1]));
    let z3 = AbelianGroup::free(3);
    assert_eq!(z3.compose(&el(&[4, -7, 2]), &el(&[0, 0, 0])).unwrap(), el(&[4, -7, 2]));
    let z6 = AbelianGroup::finite(vec![6]).unwrap();
    assert_eq!(z6.compose(&el(&[4]), &el(&[5])).unwrap(), el(&[3]));
    assert!(z6.compose(&el(&[4]), &el(&[1, 0])).is_err());
}

#[test]
fn pairing_examples() {
    let z2 = AbelianGroup::z2n(1);
    assert_eq!(z2.pairing(&el(&[1]), &el(&[1])).unwrap(), Phase::minus_one());
    let g = AbelianGroup::finite(vec![3, 6]).unwrap();
    for x in g.elements().unwrap() {
        assert!(g.pairing(&g.identity(), &x).unwrap().is_one());
    }
    let lat = QuotientLattice::new([[2, 0], [0, 2]]).unwrap();
    let k = lat.character_of_section([1, 0]);
    assert_eq!(lat.pairing_lattice(&k, [1, 0]), Phase::minus_one());
}

#[test]
fn quotient_examples() {
    let cases: [([[i64; 2]; 2], Vec<i64>); 3] =
        [([[2, 0], [0, 2]], vec![2, 2]), ([[2, 1], [0, 3]], vec![6]), ([[1, 0], [0, 5]], vec![5])];
    for (m, factors) in cases {
        let lat = QuotientLattice::new(m).unwrap();
        assert_eq!(lat.group, AbelianGroup::finite(factors).unwrap());
        assert_eq!(lat.group.order().unwrap() as i64, lat.det().abs());
    }
    assert!(QuotientLattice::new([[1, 2], [2, 4]]).is_err());
    assert!(QuotientLattice::new([[1, 0], [0, 1]]).is_err());
}

#[test]
fn section_examples() {
    let lat = QuotientLattice::new([[2, 0], [0, 2]]).unwrap();
    let zero = lat.group.identity();
    assert_eq!(lat.section(&zero), [0, 0]);
    for s in [[1, 0], [1, 1], [0, 1]] {
        let k = lat.character_of_section(s);
        assert_eq!(lat.section(&k), s);
    }
    let k = lat.character_of_section([1, 0]);
    assert_eq!(lat.zeta(&k), [Ratio::new(1, 2), Ratio::new(0, 1)]);
}

#[test]
fn ball_examples() {
    let z = WordLength::new(AbelianGroup::free(1));
    let b = ball(&z, 3.0).unwrap();
    assert_eq!(b.len(), 7);
    assert_eq!(b.elements.first().unwrap(), &el(&[-3]));
    let cl = CliffordLength::new(2);
    assert_eq!(ball(&cl, 2.0).unwrap().len(), 13);
    let fin = WordLength::new(AbelianGroup::finite(vec![2, 4]).unwrap());
    assert_eq!(ball(&fin, 10.0).unwrap().len(), 8);
    let lex = ball(&cl, 2.0).unwrap();
    assert!(lex.elements.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn ball_box_too_small_is_an_error() {
    let g = AbelianGroup::free(1);
    assert!(enumerate_ball(&g, |x| x.coords[0].abs() as f64, 5.0, 2).is_err());
}

// twist

#[test]
fn clifford_cocycle_examples() {
    let s = CliffordCocycle::new(2);
    assert_eq!(s.exact(&el(&[1, 0]), &el(&[0, 1])).unwrap(), Phase::one());
    assert_eq!(s.exact(&el(&[0, 1]), &el(&[1, 0])).unwrap(), Phase::minus_one());
    let s4 = CliffordCocycle::new(4);
    for x in AbelianGroup::z2n(4).elements().unwrap() {
        assert!(s4.exact(&x, &el(&[0, 0, 0, 0])).unwrap().is_one());
    }
}

#[test]
fn theta_bicharacter_examples() {
    let t = ThetaCocycle::new(2f64.sqrt() - 1.0);
    assert_eq!(t.exact(&el(&[1, 0]), &el(&[0, 1])).unwrap(), Phase::theta(-1));
    let v = t.value(&el(&[1, 0]), &el(&[0, 1]));
    let expect = c(0.0, -std::f64::consts::PI * t.theta).exp();
    assert!((v - expect).norm() < 1e-15);
    for x in [[3, -2], [1, 1], [0, 5]] {
        assert!(t.exact(&el(&x), &el(&x)).unwrap().is_one());
    }
    for (x, y) in [([1, 2], [3, -4]), ([0, 1], [5, 5])] {
        let p = t.exact(&el(&x), &el(&y)).unwrap().mul(&t.exact(&el(&y), &el(&x)).unwrap());
        assert!(p.is_one());
    }
}

#[test]
fn verify_pair_examples() {
    let s2 = ScalarTwist::new(Arc::new(CliffordCocycle::new(2))).unwrap();
    assert!(verify_twisting_pair(&s2, VerifyMode::Exhaustive, 0.0).unwrap().is_ok());
    let th = ScalarTwist::new(Arc::new(ThetaCocycle::new(2f64.sqrt() - 1.0))).unwrap();
    let mode = VerifyMode::default_for(th.group());
    assert!(verify_twisting_pair(&th, mode, 0.0).unwrap().is_ok());

    let mut table = TableCocycle::from_cocycle(&CliffordCocycle::new(2)).unwrap();
    table.negate(&el(&[1, 1]), &el(&[0, 1]));
    let bad = ScalarTwist::new(Arc::new(table)).unwrap();
    let rep = verify_twisting_pair(&bad, VerifyMode::Exhaustive, 0.0).unwrap();
    assert!(!rep.is_ok());
    let v = rep.worst.expect("worst violation");
    assert_eq!(v.axiom, "cocycle");
    assert_eq!(v.elements.len(), 3);
    assert!(rep.violations.iter().all(|v| v.elements.iter().any(|g| g == &el(&[1, 1]) || g == &el(&[0, 1]))));
}

#[test]
fn cocycle_identity_exhaustive_up_to_order_64() {
    for n in 1..=6 {
        let p = ScalarTwist::new(Arc::new(CliffordCocycle::new(n))).unwrap();
        let rep = verify_twisting_pair(&p, VerifyMode::Exhaustive, 0.0).unwrap();
        assert!(rep.is_ok(), "n={n}");
        assert_eq!(rep.checked_triples, 1usize << (3 * n));
    }
}

#[test]
fn act_by_p_identity_and_coboundary() {
    let inner = Arc::new(ScalarTwist::new(Arc::new(CliffordCocycle::new(2))).unwrap());
    let g = inner.group().clone();
    let els = g.elements().unwrap();
    let same = PTwisted::new(inner.clone(), BTreeMap::new(), 0.0).unwrap();
    for x in &els {
        for y in &els {
            assert_eq!(same.sigma(x, y), inner.sigma(x, y));
        }
    }
    let mut p = BTreeMap::new();
    p.insert(el(&[1, 0]), Cyclo::from_phase(Phase::i()));
    p.insert(el(&[0, 1]), Cyclo::from_phase(Phase::turns(1, 8)));
    p.insert(el(&[1, 1]), Cyclo::from_phase(Phase::turns(5, 6)));
    let tw = PTwisted::new(inner.clone(), p.clone(), 0.0).unwrap();
    let alg = inner.algebra();
    for x in &els {
        for y in &els {
            let xy = g.compose(x, y).unwrap();
            let pj = tw.p(x);
            let expect = alg.mul(&alg.mul3(&pj, &tw.p(y), &alg.adjoint(&tw.p(&xy))), &inner.sigma(x, y));
            assert_eq!(tw.sigma(x, y), expect);
        }
    }
    assert!(verify_twisting_pair(&tw, VerifyMode::Exhaustive, 0.0).unwrap().is_ok());
    p.insert(g.identity(), Cyclo::from_phase(Phase::i()));
    assert!(PTwisted::new(inner, p, 0.0).is_err());
}

// algebra

fn clifford_algebra(n: usize) -> ScalarTwist {
    ScalarTwist::new(Arc::new(CliffordCocycle::new(n))).unwrap()
}

fn clifford_e(n: usize, i: usize) -> TwistedElement<Cyclo> {
    let mut v = vec![0; n];
    v[i] = 1;
    TwistedElement::monomial(GroupElement::new(v), Cyclo::from_phase(Phase::i()))
}

fn neg(pair: &ScalarTwist, f: &TwistedElement<Cyclo>) -> TwistedElement<Cyclo> {
    let mut out = TwistedElement::zero();
    for (x, a) in &f.terms {
        out = add(pair, &out, &TwistedElement::monomial(x.clone(), a.scale(Ratio::from_integer(-1))));
    }
    out
}

#[test]
fn clifford_relations_exact() {
    for n in 2..=4 {
        let p = clifford_algebra(n);
        let minus_one = neg(&p, &unit(&p));
        for i in 0..n {
            let ei = clifford_e(n, i);
            assert_eq!(distance(&p, &star_product(&p, &ei, &ei).unwrap(), &minus_one), 0.0);
            assert_eq!(distance(&p, &involution(&p, &ei).unwrap(), &neg(&p, &ei)), 0.0);
            for j in 0..i {
                let ej = clifford_e(n, j);
                let ab = star_product(&p, &ei, &ej).unwrap();
                let ba = star_product(&p, &ej, &ei).unwrap();
                assert_eq!(distance(&p, &ab, &neg(&p, &ba)), 0.0);
            }
        }
        let u = unit(&p);
        assert_eq!(distance(&p, &involution(&p, &u).unwrap(), &u), 0.0);
    }
}

#[test]
fn monomial_product_rule() {
    let p = clifford_algebra(3);
    let alg = p.algebra();
    let a = Cyclo::from_phase(Phase::turns(1, 3));
    let b = Cyclo::from_phase(Phase::turns(1, 4));
    for x in p.group().elements().unwrap() {
        for y in p.group().elements().unwrap() {
            let f = TwistedElement::monomial(x.clone(), a.clone());
            let g = TwistedElement::monomial(y.clone(), b.clone());
            let got = star_product(&p, &f, &g).unwrap();
            let xy = p.group().compose(&x, &y).unwrap();
            let want = TwistedElement::monomial(xy, alg.mul3(&a, &p.rho(&x, &b), &p.sigma(&x, &y)));
            assert_eq!(distance(&p, &got, &want), 0.0);
        }
    }
}

/// Independent twisted group ring over ℂ: (f*g)(z) = Σ_{x+y=z} f(x)g(y)σ(x,y).
fn twisted_ring_product(
    group: &AbelianGroup,
    sigma: &dyn ScalarCocycle,
    f: &HashMap<GroupElement, twisted_core::linalg::C64>,
    g: &HashMap<GroupElement, twisted_core::linalg::C64>,
) -> HashMap<GroupElement, twisted_core::linalg::C64> {
    let mut out = HashMap::new();
    for (x, a) in f {
        for (y, b) in g {
            let z = group.compose(x, y).unwrap();
            *out.entry(z).or_insert(c(0.0, 0.0)) += a * b * sigma.value(x, y);
        }
    }
    out
}

#[test]
fn star_product_matches_twisted_group_ring() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let group = AbelianGroup::finite(vec![2, 4]).unwrap();
    let mut b = BTreeMap::new();
    b.insert((1, 0), 1);
    let cocycle = Arc::new(twisted_core::twist::BicharacterCocycle::new(group.clone(), b).unwrap());
    let pair = ScalarTwist::new(cocycle.clone()).unwrap();
    let els = group.elements().unwrap();
    let phases = [Phase::one(), Phase::i(), Phase::turns(1, 8), Phase::turns(2, 3)];
    use rand::Rng;
    for _ in 0..50 {
        let mut f = TwistedElement::zero();
        let mut g = TwistedElement::zero();
        for _ in 0..4 {
            let x = els[rng.gen_range(0..els.len())].clone();
            let y = els[rng.gen_range(0..els.len())].clone();
            f = add(&pair, &f, &TwistedElement::monomial(x, Cyclo::from_phase(phases[rng.gen_range(0..4)])));
            g = add(&pair, &g, &TwistedElement::monomial(y, Cyclo::from_phase(phases[rng.gen_range(0..4)])));
        }
        let to_c = |h: &TwistedElement<Cyclo>| -> HashMap<GroupElement, _> {
            h.terms.iter().map(|(x, a)| (x.clone(), a.to_complex(0.0))).collect()
        };
        let want = twisted_ring_product(&group, cocycle.as_ref(), &to_c(&f), &to_c(&g));
        let got = to_c(&star_product(&pair, &f, &g).unwrap());
        for x in &els {
            let w = want.get(x).copied().unwrap_or(c(0.0, 0.0));
            let v = got.get(x).copied().unwrap_or(c(0.0, 0.0));
            assert!((w - v).norm() < 1e-12);
        }
    }
}

fn matrix_pair(n: usize) -> (InnerTwist, usize) {
    let d = 1usize << (n / 2);
    (InnerTwist::from_scalar(d, Arc::new(CliffordCocycle::new(n)), clifford_unitaries(n)), d)
}

fn random_element<R: rand::Rng>(rng: &mut R, els: &[GroupElement], d: usize, terms: usize) -> TwistedElement<CMat> {
    let mut out = BTreeMap::new();
    for _ in 0..terms {
        let x = els[rng.gen_range(0..els.len())].clone();
        out.insert(x, random_matrix(rng, d, d));
    }
    TwistedElement { terms: out }
}

#[test]
fn regular_representation_is_a_star_homomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=4 {
        let (pair, d) = matrix_pair(n);
        assert!(verify_twisting_pair(&pair, VerifyMode::Exhaustive, 1e-12).unwrap().is_ok());
        let els = pair.group().elements().unwrap();
        let whole = Ball::whole(pair.group()).unwrap();
        let rep = DefiningRep { dim: d };
        let pi = |f: &TwistedElement<CMat>| left_regular_matrix(&pair, &rep, f, &whole).unwrap();
        for _ in 0..5 {
            let f = random_element(&mut rng, &els, d, 3);
            let g = random_element(&mut rng, &els, d, 3);
            let fg = star_product(&pair, &f, &g).unwrap();
            let pf = pi(&f);
            assert!(pf.boundary.iter().all(|b| !b));
            let prod = pf.matrix.matmul(&pi(&g).matrix);
            assert!(prod.max_abs_diff(&pi(&fg).matrix) < 1e-12, "n={n}");
            let fs = involution(&pair, &f).unwrap();
            assert!(pi(&fs).matrix.max_abs_diff(&pf.matrix.adjoint()) < 1e-12);
            let fss = involution(&pair, &fs).unwrap();
            assert!(distance(&pair, &fss, &f) < 1e-12);
            let lhs = involution(&pair, &fg).unwrap();
            let rhs = star_product(&pair, &involution(&pair, &g).unwrap(), &fs).unwrap();
            assert!(distance(&pair, &lhs, &rhs) < 1e-12);
        }
    }
}

#[test]
fn untwisted_regular_matrix_is_permutation_tensor() {
    let group = AbelianGroup::finite(vec![4]).unwrap();
    let pair = TrivialPair { alg: MatrixAlgebra { dim: 2 }, group: group.clone(), samples: vec![] };
    let a = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 1.0), c(0.0, 0.0), c(-1.0, 0.0)]);
    let f = TwistedElement::monomial(el(&[1]), a.clone());
    let whole = Ball::whole(&group).unwrap();
    let m = left_regular_matrix(&pair, &DefiningRep { dim: 2 }, &f, &whole).unwrap().matrix.to_dense();
    let mut perm = CMat::zeros(4, 4);
    for y in 0..4 {
        perm[((y + 1) % 4, y)] = c(1.0, 0.0);
    }
    let want = twisted_core::linalg::kron(&a, &perm);
    assert!((m - want).norm() < 1e-14);
}

#[test]
fn regular_representation_is_faithful() {
    for n in 2..=3 {
        let (pair, d) = matrix_pair(n);
        let whole = Ball::whole(pair.group()).unwrap();
        let rep = DefiningRep { dim: d };
        let els = pair.group().elements().unwrap();
        let mut cols = Vec::new();
        for x in &els {
            for i in 0..d {
                for j in 0..d {
                    let mut e = CMat::zeros(d, d);
                    e[(i, j)] = c(1.0, 0.0);
                    let m = left_regular_matrix(&pair, &rep, &TwistedElement::monomial(x.clone(), e), &whole).unwrap();
                    cols.push(m.matrix.to_dense());
                }
            }
        }
        let k = cols.len();
        let gram = CMat::from_fn(k, k, |a, b| cols[a].dotc(&cols[b]));
        assert_eq!(rank(&gram, 1e-10), k);
    }
}

struct DiagonalRep {
    pair: Arc<InnerTwist>,
    ball: Ball,
    d: usize,
}

impl Representation<CMat> for DiagonalRep {
    fn dim(&self) -> usize {
        self.d * self.ball.len()
    }
    fn apply(&self, a: &CMat) -> SpMat {
        let f = TwistedElement::monomial(self.pair.group().identity(), a.clone());
        left_regular_matrix(self.pair.as_ref(), &DefiningRep { dim: self.d }, &f, &self.ball).unwrap().matrix
    }
}

fn regular_covariant(n: usize, fault: bool) -> (Arc<InnerTwist>, CovariantPair<CMat>) {
    let (pair, d) = matrix_pair(n);
    let pair = Arc::new(pair);
    let whole = Ball::whole(pair.group()).unwrap();
    let rep = Arc::new(DiagonalRep { pair: pair.clone(), ball: whole.clone(), d });
    let p2 = pair.clone();
    let unitary: UnitaryMap = Arc::new(move |x: &GroupElement| {
        if fault && x.is_zero() {
            return SpMat::identity(d * whole.len()).scale(c(-1.0, 0.0));
        }
        let f = TwistedElement::monomial(x.clone(), eye(d));
        left_regular_matrix(p2.as_ref(), &DefiningRep { dim: d }, &f, &whole).unwrap().matrix
    });
    (pair, CovariantPair { rep, unitary })
}

#[test]
fn integrated_form_and_covariance() {
    let (pair, cov) = regular_covariant(3, false);
    let els = pair.group().elements().unwrap();
    let samples = pair.test_elements();
    let rep = verify_covariant(&cov, pair.as_ref(), &els, &samples, None, 1e-12).unwrap();
    assert!(rep.is_ok(), "{:?}", rep.violations.first());
    let id = integrated_form(&cov, &unit(pair.as_ref()));
    assert!(id.max_abs_diff(&SpMat::identity(cov.dim())) < 1e-14);
    let a = CMat::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 1.0), c(2.0, 0.0), c(0.0, 0.0)]);
    let ae = integrated_form(&cov, &TwistedElement::monomial(pair.group().identity(), a.clone()));
    assert!(ae.max_abs_diff(&cov.rep.apply(&a)) < 1e-14);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = random_element(&mut rng, &els, 2, 4);
    let whole = Ball::whole(pair.group()).unwrap();
    let reg = left_regular_matrix(pair.as_ref(), &DefiningRep { dim: 2 }, &f, &whole).unwrap();
    assert!(integrated_form(&cov, &f).max_abs_diff(&reg.matrix) < 1e-12);

    let (pair, bad) = regular_covariant(3, true);
    let rep = verify_covariant(&bad, pair.as_ref(), &els, &samples, None, 1e-12).unwrap();
    assert!(!rep.is_ok());
    assert_eq!(rep.violations[0].axiom, "unit");
}

#[test]
fn scalar_regular_rep_uses_scalar_rep() {
    let p = clifford_algebra(2);
    let whole = Ball::whole(p.group()).unwrap();
    let rep = ScalarRep { dim: 1, theta: 0.0 };
    let e1 = clifford_e(2, 0);
    let m = left_regular_matrix(&p, &rep, &e1, &whole).unwrap().matrix;
    let sq = m.matmul(&m);
    assert!(sq.max_abs_diff(&SpMat::identity(4).scale(c(-1.0, 0.0))) < 1e-15);
}

#[test]
fn twisted_element_json_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let els = AbelianGroup::z2n(2).elements().unwrap();
    let f = random_element(&mut rng, &els, 2, 3);
    let back = TwistedElement::<CMat>::from_json(&f.to_json().unwrap()).unwrap();
    assert_eq!(back.terms.len(), f.terms.len());
    for (x, a) in &f.terms {
        assert!((a - &back.terms[x]).norm() < 1e-15);
    }
}

// length

#[test]
fn clifford_length_examples() {
    let l = CliffordLength::new(2);
    assert!(l.eval(&el(&[0, 0])).norm() == 0.0);
    let m = l.eval(&el(&[3, 4]));
    assert!((&m * &m - eye(2) * c(25.0, 0.0)).norm() < 1e-13);
    let l4 = CliffordLength::new(4);
    let ev = l4.spectrum(&el(&[1, 1, 0, 0]));
    let d = l4.dim();
    let r2 = 2f64.sqrt();
    assert_eq!(ev.iter().filter(|v| (*v - r2).abs() < 1e-12).count(), d / 2);
    assert_eq!(ev.iter().filter(|v| (*v + r2).abs() < 1e-12).count(), d / 2);
}

#[test]
fn pullback_examples() {
    let inner: Arc<dyn LengthFunction> = Arc::new(CliffordLength::new(2));
    let id = PullbackLength::identity(inner.clone()).unwrap();
    for x in [[1, 2], [-3, 0], [5, -5]] {
        assert!((id.eval(&el(&x)) - inner.eval(&el(&x))).norm() == 0.0);
    }
    let par = PullbackLength::parabola().unwrap();
    assert!(par.eval(&el(&[0])).norm() == 0.0);
    let sum = par.eval(&el(&[1])) + par.eval(&el(&[2]));
    assert!((sum - par.eval(&el(&[3]))).norm() > 1.0);
    assert!(properness_check(&par, &ball(&par, 30.0).unwrap()).is_ok());
    let bad = PullbackLength::new(
        "collapse",
        AbelianGroup::free(1),
        inner,
        Arc::new(|g: &GroupElement| GroupElement::new(vec![g.coords[0] - 1, 0])),
        Arc::new(|r| r as i64 + 2),
        5,
    );
    assert!(bad.is_err());
}

#[test]
fn m_ell_examples() {
    let l = CliffordLength::new(2);
    let b0 = Ball::new(vec![el(&[0, 0])], 0.0);
    assert_eq!(m_ell_matrix(&l, &b0).max_abs(), 0.0);
    let w = WordLength::new(AbelianGroup::free(1));
    let bw = ball(&w, 4.0).unwrap();
    let spec = m_ell_spectrum(&w, &bw);
    assert_eq!(spec, vec![0.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 4.0, 4.0]);
    let b = ball(&l, 3.0).unwrap();
    let dense = m_ell_matrix(&l, &b).to_dense();
    let mut from_matrix = eigvalsh(&dense).unwrap();
    from_matrix.sort_by(f64::total_cmp);
    let mut want: Vec<f64> = b
        .elements
        .iter()
        .flat_map(|z| {
            let r = ((z.coords[0].pow(2) + z.coords[1].pow(2)) as f64).sqrt();
            [r, -r]
        })
        .collect();
    want.sort_by(f64::total_cmp);
    assert_eq!(from_matrix.len(), want.len());
    for (a, b) in from_matrix.iter().zip(&want) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn translation_sweep_examples() {
    let radii = [5.0, 10.0, 20.0, 40.0];
    let l = CliffordLength::new(2);
    let y = el(&[2, -1]);
    let rep = translation_bounded_sweep(&l, &y, &radii).unwrap();
    let norm = 5f64.sqrt();
    assert!(rep.sups.iter().all(|s| (s - norm).abs() < 1e-12));
    assert!(rep.plateau);
    let w = WordLength::new(AbelianGroup::free(1));
    let rep = translation_bounded_sweep(&w, &el(&[1]), &radii).unwrap();
    assert!(rep.sups.iter().all(|&s| s == 1.0));
    let par = PullbackLength::parabola().unwrap();
    let rep = translation_bounded_sweep(&par, &el(&[1]), &radii).unwrap();
    assert!(!rep.plateau);
    assert!(rep.sups.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn properness_examples() {
    let l = CliffordLength::new(2);
    assert!(properness_check(&l, &ball(&l, 8.0).unwrap()).is_ok());

    let g = AbelianGroup::finite(vec![4]).unwrap();
    let mut vals = HashMap::new();
    for (k, v) in [0.0, 1.0, 0.0, 1.0].into_iter().enumerate() {
        vals.insert(el(&[k as i64]), CMat::from_element(1, 1, c(v, 0.0)));
    }
    let zero_at_two = TableLength::new(g.clone(), 1, vals).unwrap();
    let rep = properness_check(&zero_at_two, &Ball::whole(&g).unwrap());
    assert_eq!(rep.zero_violations, vec![el(&[2])]);

    let n = 2000;
    let g = AbelianGroup::finite(vec![n]).unwrap();
    let vals: HashMap<_, _> = (0..n)
        .map(|k| {
            let v = if k == 0 { 0.0 } else { 1.0 / k as f64 };
            (el(&[k]), CMat::from_element(1, 1, c(v, 0.0)))
        })
        .collect();
    let harmonic = TableLength::new(g.clone(), 1, vals).unwrap();
    let rep = properness_check(&harmonic, &Ball::whole(&g).unwrap());
    assert!(rep.zero_violations.is_empty());
    assert!(rep.clustering);
}

#[test]
fn growth_examples() {
    let w = WordLength::new(AbelianGroup::free(1));
    let rep = growth_estimate(&w, &[25.0, 50.0, 100.0, 150.0, 200.0]).unwrap();
    assert!((0.9..=1.1).contains(&rep.slope), "{}", rep.slope);
    assert!(rep.counts.windows(2).all(|c| c[1] >= c[0]));
    let l = CliffordLength::new(2);
    let rep = growth_estimate(&l, &[10.0, 20.0, 30.0, 45.0, 60.0]).unwrap();
    assert!((1.8..=2.2).contains(&rep.slope), "{}", rep.slope);
    let f = WordLength::new(AbelianGroup::z2n(3));
    let rep = growth_estimate(&f, &[1.0, 2.0, 3.0, 4.0]).unwrap();
    assert!(rep.finite);
    assert_eq!(rep.slope, 0.0);
    assert!(growth_estimate(&l, &[1.0, 2.0, 3.0]).is_err());
}

#[test]
fn sigma_sandwich_holds() {
    let ls: Vec<Box<dyn LengthFunction>> = vec![
        Box::new(CliffordLength::new(2)),
        Box::new(CliffordLength::new(3)),
        Box::new(WordLength::new(AbelianGroup::free(2))),
        Box::new(PullbackLength::parabola().unwrap()),
    ];
    for l in &ls {
        for n in [1.0, 2.5, 4.0, 7.0] {
            let r = sigma_sandwich(l.as_ref(), n).unwrap();
            assert!(r.holds, "{} n={n}: {r:?}", l.name());
        }
    }
}

// order

fn power_law(n: usize, d: f64) -> EigenvalueSequence {
    EigenvalueSequence::from_values((0..n).map(|k| ((k + 1) as f64).powf(-1.0 / d)))
}

#[test]
fn counting_examples() {
    let seq = EigenvalueSequence::from_values((1..=50).map(|k| 1.0 / k as f64));
    assert_eq!(counting_lambda(&seq, 1.0).unwrap(), 0);
    assert_eq!(counting_lambda(&seq, 0.3).unwrap(), 3);
    assert_eq!(counting_lambda(&seq, 7.0).unwrap(), 0);
    assert!(counting_lambda(&seq, 0.0).is_err());
    for k in 0..seq.len() {
        assert!(counting_lambda(&seq, seq.values[k] - 1e-12).unwrap() >= k + 1);
    }
}

#[test]
fn zeta_examples() {
    assert_eq!(zeta_value(&[0.0; 5], 3.3), 5.0);
    assert!((zeta_value(&[1.0, -1.0], 2.0) - 1.0).abs() < 1e-15);
    let eigs: Vec<f64> = (0..40).map(|k| (k as f64 * 0.37).sin() * 10.0).collect();
    let z: Vec<f64> = (1..20).map(|s| zeta_value(&eigs, s as f64 * 0.5)).collect();
    assert!(z.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn estimators_agree_on_power_laws() {
    for d in [1.0, 2.0, 3.0] {
        let seq = power_law(100_000, d);
        let est = estimate_all(&seq).unwrap();
        assert_eq!(est.len(), 3);
        for e in &est {
            assert!((e.value - d).abs() < 0.1, "{} d={d}: {}", e.estimator, e.value);
        }
        let lo = est.iter().map(|e| e.value).fold(f64::INFINITY, f64::min);
        let hi = est.iter().map(|e| e.value).fold(f64::NEG_INFINITY, f64::max);
        assert!(hi - lo < 0.15);
    }
}

#[test]
fn estimators_are_scale_covariant() {
    let seq = power_law(100_000, 2.0);
    let base = estimate_all(&seq).unwrap();
    for s in [0.1, 10.0] {
        let scaled = estimate_all(&seq.scaled(s)).unwrap();
        for (a, b) in base.iter().zip(&scaled) {
            assert!((a.value - b.value).abs() < 0.02, "{} c={s}: {} vs {}", a.estimator, a.value, b.value);
        }
    }
}

#[test]
fn superpolynomial_and_constant_sequences() {
    let geo = EigenvalueSequence::from_values((0..1000).map(|k| 0.5f64.powi(k)));
    let mu = MuSlope.estimate(&geo).unwrap();
    assert!(mu.value < 0.05 && mu.flag.is_some());
    let ts = TraceScan::default().estimate(&geo).unwrap();
    assert_eq!(ts.value, 0.01);
    let constant = EigenvalueSequence::from_values(vec![0.5; 300]);
    assert_eq!(LambdaSlope { grid: 64 }.estimate(&constant).unwrap().value, 0.0);
    assert!(MuSlope.estimate(&power_law(50, 2.0)).is_err());
}

#[test]
fn growth_matches_abscissa_for_clifford_group() {
    let l = CliffordLength::new(2);
    let b = ball(&l, 60.0).unwrap();
    let eigs = m_ell_spectrum(&l, &b);
    let seq = EigenvalueSequence::from_dirac_spectrum(&eigs);
    let lam = LambdaSlope { grid: 64 }.estimate(&seq).unwrap();
    assert!((lam.value - 2.0).abs() < 0.2, "{}", lam.value);
}

#[test]
fn cyclo_arithmetic_is_exact() {
    let alg = twisted_core::coeff::ExactScalars { theta: 0.3 };
    let i = Cyclo::from_phase(Phase::i());
    assert_eq!(alg.mul(&i, &i), Cyclo::from_phase(Phase::minus_one()));
    assert_eq!(alg.add(&i, &alg.adjoint(&i)), alg.zero());
    let w = Cyclo::from_phase(Phase::theta(3));
    assert_eq!(alg.mul(&w, &alg.adjoint(&w)), alg.one());
}
