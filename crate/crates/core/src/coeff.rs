//! Coefficient algebras for twisted convolution and their representations.

use crate::groups::{AbelianGroup, Ball, GroupElement};
use crate::linalg::{c, fro_norm, CMat, SpMat, C64};
use crate::phase::Phase;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;

pub trait CoeffAlgebra: Send + Sync {
    type Elem: Clone + Debug + Send + Sync;

    fn one(&self) -> Self::Elem;
    fn zero(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn adjoint(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Zero exactly when the elements agree; a norm of the difference otherwise.
    fn distance(&self, a: &Self::Elem, b: &Self::Elem) -> f64;

    fn mul3(&self, a: &Self::Elem, b: &Self::Elem, d: &Self::Elem) -> Self::Elem {
        self.mul(&self.mul(a, b), d)
    }

    /// Residual of `u u* = u* u = 1`.
    fn unitarity_defect(&self, u: &Self::Elem) -> f64 {
        let one = self.one();
        let ua = self.adjoint(u);
        self.distance(&self.mul(u, &ua), &one).max(self.distance(&self.mul(&ua, u), &one))
    }
}

/// A *-representation by (possibly compressed) matrices.
pub trait Representation<E>: Send + Sync {
    fn dim(&self) -> usize;
    fn apply(&self, a: &E) -> SpMat;
}

/// Finite sums `Σ qₖ·phaseₖ` with rational coefficients.
///
/// Phases with turns in `[½,1)` are folded onto `[0,½)` with a sign, so the
/// representation of ±1, ±i and their products is canonical.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Cyclo {
    pub terms: BTreeMap<Phase, Ratio<i64>>,
}

impl Cyclo {
    pub fn from_phase(p: Phase) -> Self {
        let mut c = Cyclo::default();
        c.push(p, Ratio::one());
        c
    }

    pub fn rational(q: Ratio<i64>) -> Self {
        let mut c = Cyclo::default();
        c.push(Phase::one(), q);
        c
    }

    fn push(&mut self, p: Phase, q: Ratio<i64>) {
        let half = Ratio::new(1, 2);
        let (key, q) = if p.turns >= half { (Phase { turns: p.turns - half, theta: p.theta }, -q) } else { (p, q) };
        let e = self.terms.entry(key).or_insert_with(Ratio::zero);
        *e += q;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn scale(&self, q: Ratio<i64>) -> Self {
        let mut out = Cyclo::default();
        for (p, v) in &self.terms {
            out.push(*p, *v * q);
        }
        out
    }

    pub fn to_complex(&self, theta: f64) -> C64 {
        self.terms
            .iter()
            .map(|(p, q)| p.to_complex(theta) * (*q.numer() as f64 / *q.denom() as f64))
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The single phase if this is exactly `1·phase`.
    pub fn as_phase(&self) -> Option<Phase> {
        if self.terms.len() != 1 {
            return None;
        }
        let (p, q) = self.terms.iter().next().unwrap();
        if q.is_one() {
            Some(*p)
        } else if (-*q).is_one() {
            Some(p.mul(&Phase::minus_one()))
        } else {
            None
        }
    }

    pub fn abs_sum(&self) -> f64 {
        self.terms.values().map(|q| (*q.numer() as f64 / *q.denom() as f64).abs()).sum()
    }

    pub fn is_negative_rational(&self) -> bool {
        self.terms.len() == 1 && self.terms.keys().next().unwrap().is_one() && self.terms.values().next().unwrap().is_negative()
    }
}

/// ℂ with exact cyclotomic arithmetic; `theta` only matters for conversion.
#[derive(Clone, Debug, Default)]
pub struct ExactScalars {
    pub theta: f64,
}

impl CoeffAlgebra for ExactScalars {
    type Elem = Cyclo;

    fn one(&self) -> Cyclo {
        Cyclo::from_phase(Phase::one())
    }
    fn zero(&self) -> Cyclo {
        Cyclo::default()
    }
    fn add(&self, a: &Cyclo, b: &Cyclo) -> Cyclo {
        let mut out = a.clone();
        for (p, q) in &b.terms {
            out.push(*p, *q);
        }
        out
    }
    fn mul(&self, a: &Cyclo, b: &Cyclo) -> Cyclo {
        let mut out = Cyclo::default();
        for (p, q) in &a.terms {
            for (r, s) in &b.terms {
                out.push(p.mul(r), *q * *s);
            }
        }
        out
    }
    fn adjoint(&self, a: &Cyclo) -> Cyclo {
        let mut out = Cyclo::default();
        for (p, q) in &a.terms {
            out.push(p.conj(), *q);
        }
        out
    }
    fn is_zero(&self, a: &Cyclo) -> bool {
        a.is_zero()
    }
    fn distance(&self, a: &Cyclo, b: &Cyclo) -> f64 {
        if a == b {
            return 0.0;
        }
        let d = self.add(a, &b.scale(-Ratio::one()));
        d.to_complex(self.theta).norm().max(f64::MIN_POSITIVE)
    }
}

/// M_d(ℂ) with matrix elements.
#[derive(Clone, Debug)]
pub struct MatrixAlgebra {
    pub dim: usize,
}

impl CoeffAlgebra for MatrixAlgebra {
    type Elem = CMat;

    fn one(&self) -> CMat {
        CMat::identity(self.dim, self.dim)
    }
    fn zero(&self) -> CMat {
        CMat::zeros(self.dim, self.dim)
    }
    fn add(&self, a: &CMat, b: &CMat) -> CMat {
        a + b
    }
    fn mul(&self, a: &CMat, b: &CMat) -> CMat {
        a * b
    }
    fn adjoint(&self, a: &CMat) -> CMat {
        a.adjoint()
    }
    fn is_zero(&self, a: &CMat) -> bool {
        fro_norm(a) < 1e-14
    }
    fn distance(&self, a: &CMat, b: &CMat) -> f64 {
        fro_norm(&(a - b))
    }
}

/// Identity representation of M_d(ℂ) on ℂ^d.
pub struct DefiningRep {
    pub dim: usize,
}

impl Representation<CMat> for DefiningRep {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, a: &CMat) -> SpMat {
        SpMat::from_dense(a)
    }
}

/// Scalars acting as multiples of the identity on ℂ^h.
pub struct ScalarRep {
    pub dim: usize,
    pub theta: f64,
}

impl Representation<Cyclo> for ScalarRep {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, a: &Cyclo) -> SpMat {
        SpMat::identity(self.dim).scale(a.to_complex(self.theta))
    }
}

/// σ_Θ(x,y) = e^{iπθ(x₂y₁ − x₁y₂)} as an exact θ-phase.
pub fn theta_phase(x: [i64; 2], y: [i64; 2]) -> Phase {
    Phase::theta(x[1] * y[0] - x[0] * y[1])
}

/// Finitely supported sums `Σ α_r 𝒲_r` in the quantum torus.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TorusElement {
    pub terms: BTreeMap<[i64; 2], C64>,
}

impl TorusElement {
    pub fn monomial(r: [i64; 2], alpha: C64) -> Self {
        let mut terms = BTreeMap::new();
        if alpha != c(0.0, 0.0) {
            terms.insert(r, alpha);
        }
        TorusElement { terms }
    }

    pub fn w(r: [i64; 2]) -> Self {
        Self::monomial(r, c(1.0, 0.0))
    }

    pub fn scale(&self, s: C64) -> Self {
        TorusElement { terms: self.terms.iter().map(|(k, v)| (*k, v * s)).collect() }
    }
}

#[derive(Clone, Debug)]
pub struct TorusAlgebra {
    pub theta: f64,
}

impl CoeffAlgebra for TorusAlgebra {
    type Elem = TorusElement;

    fn one(&self) -> TorusElement {
        TorusElement::w([0, 0])
    }
    fn zero(&self) -> TorusElement {
        TorusElement::default()
    }
    fn add(&self, a: &TorusElement, b: &TorusElement) -> TorusElement {
        let mut out = a.clone();
        for (k, v) in &b.terms {
            *out.terms.entry(*k).or_insert(c(0.0, 0.0)) += v;
        }
        out.terms.retain(|_, v| v.norm() >= 1e-15);
        out
    }
    fn mul(&self, a: &TorusElement, b: &TorusElement) -> TorusElement {
        let mut out = TorusElement::default();
        for (x, u) in &a.terms {
            for (y, v) in &b.terms {
                let ph = theta_phase(*x, *y).to_complex(self.theta);
                *out.terms.entry([x[0] + y[0], x[1] + y[1]]).or_insert(c(0.0, 0.0)) += u * v * ph;
            }
        }
        out.terms.retain(|_, v| v.norm() >= 1e-15);
        out
    }
    fn adjoint(&self, a: &TorusElement) -> TorusElement {
        TorusElement { terms: a.terms.iter().map(|(r, v)| ([-r[0], -r[1]], v.conj())).collect() }
    }
    fn is_zero(&self, a: &TorusElement) -> bool {
        a.terms.values().all(|v| v.norm() < 1e-14)
    }
    fn distance(&self, a: &TorusElement, b: &TorusElement) -> f64 {
        let mut s = 0.0;
        for (k, v) in &a.terms {
            s += (v - b.terms.get(k).copied().unwrap_or_default()).norm_sqr();
        }
        for (k, v) in &b.terms {
            if !a.terms.contains_key(k) {
                s += v.norm_sqr();
            }
        }
        s.sqrt()
    }
}

/// GNS representation of the torus on a finite window of modes `ι(𝒲_m)`,
/// compressed: components leaving the window are dropped.
#[derive(Clone, Debug)]
pub struct TorusGns {
    pub theta: f64,
    pub modes: Vec<[i64; 2]>,
    pub index: HashMap<[i64; 2], usize>,
}

impl TorusGns {
    pub fn new(theta: f64, mut modes: Vec<[i64; 2]>) -> Self {
        modes.sort();
        modes.dedup();
        let index = modes.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        TorusGns { theta, modes, index }
    }
}

impl Representation<TorusElement> for TorusGns {
    fn dim(&self) -> usize {
        self.modes.len()
    }
    fn apply(&self, a: &TorusElement) -> SpMat {
        let mut trip = Vec::new();
        for (x, alpha) in &a.terms {
            for (j, m) in self.modes.iter().enumerate() {
                if let Some(&i) = self.index.get(&[x[0] + m[0], x[1] + m[1]]) {
                    trip.push((i, j, alpha * theta_phase(*x, *m).to_complex(self.theta)));
                }
            }
        }
        SpMat::from_triplets(self.modes.len(), self.modes.len(), trip)
    }
}

pub type GroupAlgElem = BTreeMap<GroupElement, C64>;

/// The (untwisted) group algebra ℂG.
#[derive(Clone, Debug)]
pub struct GroupAlgebra {
    pub group: AbelianGroup,
}

impl CoeffAlgebra for GroupAlgebra {
    type Elem = GroupAlgElem;

    fn one(&self) -> GroupAlgElem {
        BTreeMap::from([(self.group.identity(), c(1.0, 0.0))])
    }
    fn zero(&self) -> GroupAlgElem {
        BTreeMap::new()
    }
    fn add(&self, a: &GroupAlgElem, b: &GroupAlgElem) -> GroupAlgElem {
        let mut out = a.clone();
        for (g, v) in b {
            *out.entry(g.clone()).or_insert(c(0.0, 0.0)) += v;
        }
        out.retain(|_, v| v.norm() >= 1e-15);
        out
    }
    fn mul(&self, a: &GroupAlgElem, b: &GroupAlgElem) -> GroupAlgElem {
        let mut out = BTreeMap::new();
        for (g, u) in a {
            for (h, v) in b {
                let gh = self.group.compose(g, h).expect("group elements");
                *out.entry(gh).or_insert(c(0.0, 0.0)) += u * v;
            }
        }
        out.retain(|_, v: &mut C64| v.norm() >= 1e-15);
        out
    }
    fn adjoint(&self, a: &GroupAlgElem) -> GroupAlgElem {
        a.iter().map(|(g, v)| (self.group.inverse(g).expect("group element"), v.conj())).collect()
    }
    fn is_zero(&self, a: &GroupAlgElem) -> bool {
        a.values().all(|v| v.norm() < 1e-14)
    }
    fn distance(&self, a: &GroupAlgElem, b: &GroupAlgElem) -> f64 {
        let neg: GroupAlgElem = b.iter().map(|(g, v)| (g.clone(), -v)).collect();
        self.add(a, &neg).values().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Amplified left regular representation `λ(δ_g)(δ_x⊗v) = δ_{gx}⊗v` compressed
/// to a ball.
#[derive(Clone, Debug)]
pub struct LeftRegular {
    pub group: AbelianGroup,
    pub ball: Ball,
    pub vdim: usize,
}

impl Representation<GroupAlgElem> for LeftRegular {
    fn dim(&self) -> usize {
        self.ball.len() * self.vdim
    }
    fn apply(&self, a: &GroupAlgElem) -> SpMat {
        let d = self.vdim;
        let mut trip = Vec::new();
        for (g, alpha) in a {
            for (j, x) in self.ball.elements.iter().enumerate() {
                let gx = self.group.compose(g, x).expect("group elements");
                if let Some(i) = self.ball.position(&gx) {
                    for v in 0..d {
                        trip.push((i * d + v, j * d + v, *alpha));
                    }
                }
            }
        }
        SpMat::from_triplets(self.dim(), self.dim(), trip)
    }
}
