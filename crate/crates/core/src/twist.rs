//! Twisting pairs (ρ,σ): scalar cocycles, inner and frame-induced pairs, the
//! action of unitary-valued maps p on pairs, and axiom verification.

use crate::coeff::{CoeffAlgebra, Cyclo, ExactScalars, MatrixAlgebra};
use crate::error::{Error, Result};
use crate::groups::{AbelianGroup, GroupElement};
use crate::linalg::{c, CMat, C64};
use crate::phase::Phase;
use crate::registry::Registry;
use num_integer::Integer;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::path::Path;
use std::sync::Arc;

/// A unit-modulus scalar 2-cocycle on a group.
pub trait ScalarCocycle: Send + Sync + Debug {
    fn name(&self) -> String;
    fn group(&self) -> &AbelianGroup;
    /// Exact value when the cocycle takes values in tracked phases.
    fn exact(&self, x: &GroupElement, y: &GroupElement) -> Option<Phase>;
    fn theta(&self) -> f64 {
        0.0
    }
    fn value(&self, x: &GroupElement, y: &GroupElement) -> C64 {
        self.exact(x, y).expect("exact cocycle").to_complex(self.theta())
    }
    fn is_exact(&self) -> bool {
        true
    }
}

/// σₙ(x,y) = (−1)^{Σ_{j<i} xᵢyⱼ} on ℤ₂ⁿ.
#[derive(Clone, Debug)]
pub struct CliffordCocycle {
    pub n: usize,
    group: AbelianGroup,
}

impl CliffordCocycle {
    pub fn new(n: usize) -> Self {
        CliffordCocycle { n, group: AbelianGroup::z2n(n) }
    }
}

impl ScalarCocycle for CliffordCocycle {
    fn name(&self) -> String {
        format!("clifford n={}", self.n)
    }
    fn group(&self) -> &AbelianGroup {
        &self.group
    }
    fn exact(&self, x: &GroupElement, y: &GroupElement) -> Option<Phase> {
        let mut s = 0;
        for i in 0..self.n {
            for j in 0..i {
                s += x.coords[i] * y.coords[j];
            }
        }
        Some(Phase::sign(s % 2 == 1))
    }
}

/// σ_Θ(x,y) = e^{iπθ(x₂y₁ − x₁y₂)} on ℤ².
#[derive(Clone, Debug)]
pub struct ThetaCocycle {
    pub theta: f64,
    group: AbelianGroup,
}

impl ThetaCocycle {
    pub fn new(theta: f64) -> Self {
        ThetaCocycle { theta, group: AbelianGroup::free(2) }
    }
}

impl ScalarCocycle for ThetaCocycle {
    fn name(&self) -> String {
        format!("theta θ={}", self.theta)
    }
    fn group(&self) -> &AbelianGroup {
        &self.group
    }
    fn exact(&self, x: &GroupElement, y: &GroupElement) -> Option<Phase> {
        Some(crate::coeff::theta_phase([x.coords[0], x.coords[1]], [y.coords[0], y.coords[1]]))
    }
    fn theta(&self) -> f64 {
        self.theta
    }
}

/// exp(2πi Σ_{i>j} b_{ij} xᵢyⱼ / gcd(dᵢ,dⱼ)) on a finite group.
#[derive(Clone, Debug)]
pub struct BicharacterCocycle {
    group: AbelianGroup,
    factors: Vec<i64>,
    /// Strictly lower triangular entries, keyed (i, j) with i > j.
    b: BTreeMap<(usize, usize), i64>,
}

impl BicharacterCocycle {
    pub fn new(group: AbelianGroup, b: BTreeMap<(usize, usize), i64>) -> Result<Self> {
        let AbelianGroup::Finite { factors } = &group else {
            return Err(Error::InvalidArgument("bicharacter cocycles need a finite group".into()));
        };
        if b.keys().any(|&(i, j)| i <= j || i >= factors.len()) {
            return Err(Error::InvalidArgument("bicharacter entries must be strictly lower triangular".into()));
        }
        Ok(BicharacterCocycle { factors: factors.clone(), group, b })
    }
}

impl ScalarCocycle for BicharacterCocycle {
    fn name(&self) -> String {
        format!("bicharacter {:?}", self.b)
    }
    fn group(&self) -> &AbelianGroup {
        &self.group
    }
    fn exact(&self, x: &GroupElement, y: &GroupElement) -> Option<Phase> {
        let mut p = Phase::one();
        for (&(i, j), &b) in &self.b {
            let g = self.factors[i].gcd(&self.factors[j]);
            p = p.mul(&Phase::turns((b * x.coords[i] * y.coords[j]).rem_euclid(g), g));
        }
        Some(p)
    }
}

/// Explicit table; unlisted pairs take the value 1.
#[derive(Clone, Debug)]
pub struct TableCocycle {
    group: AbelianGroup,
    values: HashMap<(GroupElement, GroupElement), (C64, Option<Phase>)>,
    exact: bool,
}

impl TableCocycle {
    pub fn from_cocycle(src: &dyn ScalarCocycle) -> Result<Self> {
        let g = src.group().elements()?;
        let mut values = HashMap::new();
        for x in &g {
            for y in &g {
                values.insert((x.clone(), y.clone()), (src.value(x, y), src.exact(x, y)));
            }
        }
        Ok(TableCocycle { group: src.group().clone(), values, exact: src.is_exact() })
    }

    /// Multiplies one entry by −1.
    pub fn negate(&mut self, x: &GroupElement, y: &GroupElement) {
        let e = self.values.entry((x.clone(), y.clone())).or_insert((c(1.0, 0.0), Some(Phase::one())));
        e.0 = -e.0;
        e.1 = e.1.map(|p| p.mul(&Phase::minus_one()));
    }

    /// Lines `x;y;re;im` with comma-separated coordinates.
    pub fn parse(group: AbelianGroup, text: &str) -> Result<Self> {
        let mut values = HashMap::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::InvalidSpec(format!("cocycle table line {}: {line:?}", ln + 1));
            let f: Vec<&str> = line.split(';').collect();
            if f.len() != 4 {
                return Err(bad());
            }
            let coords = |s: &str| -> Result<GroupElement> {
                let v = s
                    .split(',')
                    .map(|t| t.trim().parse::<i64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad())?;
                group.element(v)
            };
            let x = coords(f[0])?;
            let y = coords(f[1])?;
            let re: f64 = f[2].trim().parse().map_err(|_| bad())?;
            let im: f64 = f[3].trim().parse().map_err(|_| bad())?;
            values.insert((x, y), (c(re, im), None));
        }
        Ok(TableCocycle { group, values, exact: false })
    }

    pub fn load(group: AbelianGroup, path: &Path) -> Result<Self> {
        Self::parse(group, &std::fs::read_to_string(path)?)
    }
}

impl ScalarCocycle for TableCocycle {
    fn name(&self) -> String {
        "table".into()
    }
    fn group(&self) -> &AbelianGroup {
        &self.group
    }
    fn exact(&self, x: &GroupElement, y: &GroupElement) -> Option<Phase> {
        match self.values.get(&(x.clone(), y.clone())) {
            Some((_, p)) => *p,
            None => Some(Phase::one()),
        }
    }
    fn value(&self, x: &GroupElement, y: &GroupElement) -> C64 {
        self.values.get(&(x.clone(), y.clone())).map_or(c(1.0, 0.0), |v| v.0)
    }
    fn is_exact(&self) -> bool {
        self.exact
    }
}

pub fn cocycle_registry() -> Registry<dyn ScalarCocycle, AbelianGroup> {
    let mut r: Registry<dyn ScalarCocycle, AbelianGroup> = Registry::default();
    r.register("clifford", |a, _| Ok(Arc::new(CliffordCocycle::new(a.parsed(&["n"], 0)?))));
    r.register("theta", |a, _| Ok(Arc::new(ThetaCocycle::new(a.parsed(&["θ", "theta"], 0)?))));
    r.register("table", |a, g| {
        let path: String = a.parsed(&["path"], 0)?;
        Ok(Arc::new(TableCocycle::load(g.clone(), Path::new(&path))?))
    });
    r.register("bicharacter", |a, g| {
        // b=i:j:v,… entries of the strictly lower triangular matrix
        let mut b = BTreeMap::new();
        if let Some(list) = a.value(&["b"], 0) {
            for item in list.split(',') {
                let p: Vec<i64> = item
                    .split(':')
                    .map(|t| t.parse().map_err(|_| Error::InvalidSpec(format!("bicharacter entry {item:?}"))))
                    .collect::<Result<_>>()?;
                if p.len() != 3 {
                    return Err(Error::InvalidSpec(format!("bicharacter entry {item:?}")));
                }
                b.insert((p[0] as usize, p[1] as usize), p[2]);
            }
        }
        Ok(Arc::new(BicharacterCocycle::new(g.clone(), b)?))
    });
    r
}

/// The data (ρ, σ) over a coefficient algebra.
pub trait TwistingPair: Send + Sync {
    type Alg: CoeffAlgebra;

    fn algebra(&self) -> &Self::Alg;
    fn group(&self) -> &AbelianGroup;
    fn rho(&self, x: &GroupElement, a: &<Self::Alg as CoeffAlgebra>::Elem) -> <Self::Alg as CoeffAlgebra>::Elem;
    fn sigma(&self, x: &GroupElement, y: &GroupElement) -> <Self::Alg as CoeffAlgebra>::Elem;
    /// Elements on which automorphism identities are tested.
    fn test_elements(&self) -> Vec<<Self::Alg as CoeffAlgebra>::Elem>;
}

pub type Elem<P> = <<P as TwistingPair>::Alg as CoeffAlgebra>::Elem;

/// ρ = id, σ = 1.
#[derive(Clone, Debug)]
pub struct TrivialPair<A: CoeffAlgebra> {
    pub alg: A,
    pub group: AbelianGroup,
    pub samples: Vec<A::Elem>,
}

impl<A: CoeffAlgebra> TwistingPair for TrivialPair<A> {
    type Alg = A;
    fn algebra(&self) -> &A {
        &self.alg
    }
    fn group(&self) -> &AbelianGroup {
        &self.group
    }
    fn rho(&self, _: &GroupElement, a: &A::Elem) -> A::Elem {
        a.clone()
    }
    fn sigma(&self, _: &GroupElement, _: &GroupElement) -> A::Elem {
        self.alg.one()
    }
    fn test_elements(&self) -> Vec<A::Elem> {
        self.samples.clone()
    }
}

/// Trivial ρ with an exact scalar cocycle: the twisted group algebra.
#[derive(Clone, Debug)]
pub struct ScalarTwist {
    pub cocycle: Arc<dyn ScalarCocycle>,
    alg: ExactScalars,
}

impl ScalarTwist {
    pub fn new(cocycle: Arc<dyn ScalarCocycle>) -> Result<Self> {
        if !cocycle.is_exact() {
            return Err(Error::InvalidArgument("exact scalar twist needs an exact cocycle; use InnerTwist".into()));
        }
        let alg = ExactScalars { theta: cocycle.theta() };
        Ok(ScalarTwist { cocycle, alg })
    }
}

impl TwistingPair for ScalarTwist {
    type Alg = ExactScalars;
    fn algebra(&self) -> &ExactScalars {
        &self.alg
    }
    fn group(&self) -> &AbelianGroup {
        self.cocycle.group()
    }
    fn rho(&self, _: &GroupElement, a: &Cyclo) -> Cyclo {
        a.clone()
    }
    fn sigma(&self, x: &GroupElement, y: &GroupElement) -> Cyclo {
        Cyclo::from_phase(self.cocycle.exact(x, y).expect("exact cocycle"))
    }
    fn test_elements(&self) -> Vec<Cyclo> {
        vec![self.alg.one(), Cyclo::from_phase(Phase::i())]
    }
}

pub type UnitaryFamily = Arc<dyn Fn(&GroupElement) -> CMat + Send + Sync>;
pub type CocycleFamily = Arc<dyn Fn(&GroupElement, &GroupElement) -> CMat + Send + Sync>;

/// u_x = c₁^{x₁}⋯cₙ^{xₙ} from Jordan–Wigner generators; u_xu_y = σₙ(x,y)u_{x+y}.
pub fn clifford_unitaries(n: usize) -> UnitaryFamily {
    let gens = crate::length::clifford_generators(n);
    let d = gens.first().map_or(1, |g| g.nrows());
    Arc::new(move |x: &GroupElement| {
        let mut u = CMat::identity(d, d);
        for (i, g) in gens.iter().enumerate() {
            if x.coords[i].rem_euclid(2) == 1 {
                u = &u * g;
            }
        }
        u
    })
}

/// ρ_x = Ad(u_x) on M_d(ℂ) with a matrix-valued σ.
#[derive(Clone)]
pub struct InnerTwist {
    alg: MatrixAlgebra,
    group: AbelianGroup,
    pub u: UnitaryFamily,
    pub sigma: CocycleFamily,
}

impl InnerTwist {
    pub fn new(dim: usize, group: AbelianGroup, u: UnitaryFamily, sigma: CocycleFamily) -> Self {
        InnerTwist { alg: MatrixAlgebra { dim }, group, u, sigma }
    }

    /// σ·Id_d with ρ_x = Ad(u_x) for a projective representation u whose
    /// multiplier is trivial up to scalars (u_xu_y ∝ u_{xy}).
    pub fn from_scalar(dim: usize, cocycle: Arc<dyn ScalarCocycle>, u: UnitaryFamily) -> Self {
        let group = cocycle.group().clone();
        let sigma: CocycleFamily = Arc::new(move |x, y| CMat::identity(dim, dim) * cocycle.value(x, y));
        InnerTwist::new(dim, group, u, sigma)
    }
}

impl TwistingPair for InnerTwist {
    type Alg = MatrixAlgebra;
    fn algebra(&self) -> &MatrixAlgebra {
        &self.alg
    }
    fn group(&self) -> &AbelianGroup {
        &self.group
    }
    fn rho(&self, x: &GroupElement, a: &CMat) -> CMat {
        let u = (self.u)(x);
        &u * a * u.adjoint()
    }
    fn sigma(&self, x: &GroupElement, y: &GroupElement) -> CMat {
        (self.sigma)(x, y)
    }
    fn test_elements(&self) -> Vec<CMat> {
        let d = self.alg.dim;
        let mut out = Vec::new();
        for i in 0..d {
            for j in 0..d {
                let mut e = CMat::zeros(d, d);
                e[(i, j)] = c(1.0, 0.0);
                out.push(e);
            }
        }
        out
    }
}

/// The pair induced by a frame μ: ρ_j = Ad μ_j, σ_{j,k} = μ_jμ_kμ*_{j+k}.
#[derive(Clone, Debug)]
pub struct FrameTwist<A: CoeffAlgebra> {
    pub alg: A,
    pub group: AbelianGroup,
    pub frame: BTreeMap<GroupElement, A::Elem>,
    /// Elements of the fixed-point algebra used for automorphism checks.
    pub samples: Vec<A::Elem>,
}

impl<A: CoeffAlgebra> FrameTwist<A> {
    /// `membership(j, μ_j)` returns the residual of μ_j outside B_j.
    pub fn new(
        alg: A,
        group: AbelianGroup,
        frame: BTreeMap<GroupElement, A::Elem>,
        samples: Vec<A::Elem>,
        membership: Option<&dyn Fn(&GroupElement, &A::Elem) -> f64>,
        tol: f64,
    ) -> Result<Self> {
        let e = group.identity();
        let one = alg.one();
        match frame.get(&e) {
            Some(m) if alg.distance(m, &one) <= tol => {}
            _ => return Err(Error::InvalidFrame("μ_e must be the unit".into())),
        }
        for g in group.elements()? {
            let m = frame.get(&g).ok_or_else(|| Error::InvalidFrame(format!("missing μ at {g}")))?;
            let d = alg.unitarity_defect(m);
            if d > tol {
                return Err(Error::InvalidFrame(format!("μ_{g} not unitary (defect {d:e})")));
            }
            if let Some(f) = membership {
                let r = f(&g, m);
                if r > tol {
                    return Err(Error::InvalidFrame(format!("μ_{g} outside its spectral subspace (residual {r:e})")));
                }
            }
        }
        Ok(FrameTwist { alg, group, frame, samples })
    }

    pub fn mu(&self, j: &GroupElement) -> &A::Elem {
        &self.frame[j]
    }
}

impl<A: CoeffAlgebra> TwistingPair for FrameTwist<A> {
    type Alg = A;
    fn algebra(&self) -> &A {
        &self.alg
    }
    fn group(&self) -> &AbelianGroup {
        &self.group
    }
    fn rho(&self, x: &GroupElement, a: &A::Elem) -> A::Elem {
        let m = self.mu(x);
        self.alg.mul3(m, a, &self.alg.adjoint(m))
    }
    fn sigma(&self, x: &GroupElement, y: &GroupElement) -> A::Elem {
        let xy = self.group.compose(x, y).expect("group elements");
        self.alg.mul3(self.mu(x), self.mu(y), &self.alg.adjoint(self.mu(&xy)))
    }
    fn test_elements(&self) -> Vec<A::Elem> {
        self.samples.clone()
    }
}

/// (ρᵖ, σᵖ): ρᵖ_j = Ad(p(j))∘ρ_j, σᵖ_{j,k} = p(j)ρ_j(p(k))σ_{j,k}p(j+k)*.
pub struct PTwisted<P: TwistingPair> {
    pub inner: Arc<P>,
    p: BTreeMap<GroupElement, Elem<P>>,
}

impl<P: TwistingPair> PTwisted<P> {
    pub fn new(inner: Arc<P>, p: BTreeMap<GroupElement, Elem<P>>, tol: f64) -> Result<Self> {
        let alg = inner.algebra();
        if let Some(pe) = p.get(&inner.group().identity()) {
            if alg.distance(pe, &alg.one()) > tol {
                return Err(Error::InvalidArgument("p(e) must be 1".into()));
            }
        }
        Ok(PTwisted { inner, p })
    }

    pub fn p(&self, j: &GroupElement) -> Elem<P> {
        self.p.get(j).cloned().unwrap_or_else(|| self.inner.algebra().one())
    }
}

impl<P: TwistingPair> TwistingPair for PTwisted<P> {
    type Alg = P::Alg;
    fn algebra(&self) -> &P::Alg {
        self.inner.algebra()
    }
    fn group(&self) -> &AbelianGroup {
        self.inner.group()
    }
    fn rho(&self, x: &GroupElement, a: &Elem<P>) -> Elem<P> {
        let alg = self.algebra();
        let p = self.p(x);
        alg.mul3(&p, &self.inner.rho(x, a), &alg.adjoint(&p))
    }
    fn sigma(&self, j: &GroupElement, k: &GroupElement) -> Elem<P> {
        let alg = self.algebra();
        let jk = self.group().compose(j, k).expect("group elements");
        let left = alg.mul(&self.p(j), &self.inner.rho(j, &self.p(k)));
        alg.mul3(&left, &self.inner.sigma(j, k), &alg.adjoint(&self.p(&jk)))
    }
    fn test_elements(&self) -> Vec<Elem<P>> {
        self.inner.test_elements()
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Violation {
    pub axiom: String,
    pub elements: Vec<GroupElement>,
    pub residual: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct TwistReport {
    pub checked_triples: usize,
    pub checked_pairs: usize,
    pub violation_count: usize,
    /// First violations in enumeration order (capped).
    pub violations: Vec<Violation>,
    pub worst: Option<Violation>,
    pub nonunitary: Vec<Violation>,
}

impl TwistReport {
    pub fn is_ok(&self) -> bool {
        self.violation_count == 0 && self.nonunitary.is_empty()
    }
}

#[derive(Clone, Copy, Debug)]
pub enum VerifyMode {
    Exhaustive,
    Sampled { count: usize, seed: u64, bound: i64 },
}

impl VerifyMode {
    pub fn default_for(group: &AbelianGroup) -> Self {
        match group.order() {
            Some(n) if n <= 16 => VerifyMode::Exhaustive,
            _ => VerifyMode::Sampled { count: 10_000, seed: 0x5eed, bound: 50 },
        }
    }
}

const REPORT_CAP: usize = 32;

pub fn verify_twisting_pair<P: TwistingPair + ?Sized>(pair: &P, mode: VerifyMode, tol: f64) -> Result<TwistReport> {
    let g = pair.group();
    let alg = pair.algebra();
    let triples: Vec<[GroupElement; 3]> = match mode {
        VerifyMode::Exhaustive => {
            let els = g.elements()?;
            let mut t = Vec::with_capacity(els.len().pow(3));
            for x in &els {
                for y in &els {
                    for z in &els {
                        t.push([x.clone(), y.clone(), z.clone()]);
                    }
                }
            }
            t
        }
        VerifyMode::Sampled { count, seed, bound } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| {
                    [g.random_element(&mut rng, bound), g.random_element(&mut rng, bound), g.random_element(&mut rng, bound)]
                })
                .collect()
        }
    };
    let pairs: Vec<[GroupElement; 2]> = match mode {
        VerifyMode::Exhaustive => {
            let els = g.elements()?;
            els.iter().flat_map(|x| els.iter().map(move |y| [x.clone(), y.clone()])).collect()
        }
        VerifyMode::Sampled { .. } => triples.iter().map(|t| [t[0].clone(), t[1].clone()]).collect(),
    };
    let samples = pair.test_elements();

    let cocycle: Vec<Violation> = triples
        .par_iter()
        .filter_map(|[x, y, z]| {
            let xy = g.compose(x, y).ok()?;
            let yz = g.compose(y, z).ok()?;
            let lhs = pair.rho(x, &pair.sigma(y, z));
            let rhs = alg.mul3(&pair.sigma(x, y), &pair.sigma(&xy, z), &alg.adjoint(&pair.sigma(x, &yz)));
            let r = alg.distance(&lhs, &rhs);
            (r > tol).then(|| Violation { axiom: "cocycle".into(), elements: vec![x.clone(), y.clone(), z.clone()], residual: r })
        })
        .collect();

    let composition: Vec<Violation> = pairs
        .par_iter()
        .filter_map(|[x, y]| {
            let xy = g.compose(x, y).ok()?;
            let s = pair.sigma(x, y);
            let sa = alg.adjoint(&s);
            let mut worst = 0.0f64;
            for a in &samples {
                let lhs = pair.rho(x, &pair.rho(y, a));
                let rhs = alg.mul3(&s, &pair.rho(&xy, a), &sa);
                worst = worst.max(alg.distance(&lhs, &rhs));
            }
            (worst > tol).then(|| Violation { axiom: "composition".into(), elements: vec![x.clone(), y.clone()], residual: worst })
        })
        .collect();

    let nonunitary: Vec<Violation> = pairs
        .par_iter()
        .filter_map(|[x, y]| {
            let d = alg.unitarity_defect(&pair.sigma(x, y));
            (d > tol.max(1e-12)).then(|| Violation { axiom: "unitary".into(), elements: vec![x.clone(), y.clone()], residual: d })
        })
        .collect();

    let mut normal = Vec::new();
    let e = g.identity();
    let one = alg.one();
    let mut singles: Vec<GroupElement> = pairs.iter().map(|p| p[0].clone()).collect();
    singles.sort();
    singles.dedup();
    for x in &singles {
        let r = alg.distance(&pair.sigma(x, &e), &one).max(alg.distance(&pair.sigma(&e, x), &one));
        if r > tol {
            normal.push(Violation { axiom: "normalization".into(), elements: vec![x.clone()], residual: r });
        }
    }
    let r = samples.iter().map(|a| alg.distance(&pair.rho(&e, a), a)).fold(0.0, f64::max);
    if r > tol {
        normal.push(Violation { axiom: "normalization".into(), elements: vec![e.clone()], residual: r });
    }

    let all: Vec<Violation> = cocycle.into_iter().chain(composition).chain(normal).collect();
    let worst = all.iter().max_by(|a, b| a.residual.total_cmp(&b.residual)).cloned();
    Ok(TwistReport {
        checked_triples: triples.len(),
        checked_pairs: pairs.len(),
        violation_count: all.len(),
        violations: all.into_iter().take(REPORT_CAP).collect(),
        worst,
        nonunitary: nonunitary.into_iter().take(REPORT_CAP).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(c: &[i64]) -> GroupElement {
        GroupElement::new(c.to_vec())
    }

    #[test]
    fn clifford_values() {
        let s = CliffordCocycle::new(2);
        assert_eq!(s.exact(&e(&[1, 0]), &e(&[0, 1])), Some(Phase::one()));
        assert_eq!(s.exact(&e(&[0, 1]), &e(&[1, 0])), Some(Phase::minus_one()));
        assert_eq!(s.exact(&e(&[1, 1]), &e(&[0, 0])), Some(Phase::one()));
    }

    #[test]
    fn theta_values() {
        let s = ThetaCocycle::new(2f64.sqrt() - 1.0);
        assert_eq!(s.exact(&e(&[1, 0]), &e(&[0, 1])), Some(Phase::theta(-1)));
        assert!(s.exact(&e(&[1, 1]), &e(&[1, 1])).unwrap().is_one());
        let x = e(&[3, -7]);
        let y = e(&[-2, 5]);
        assert!(s.exact(&x, &y).unwrap().mul(&s.exact(&y, &x).unwrap()).is_one());
    }

    #[test]
    fn injected_fault_is_named() {
        let mut t = TableCocycle::from_cocycle(&CliffordCocycle::new(2)).unwrap();
        t.negate(&e(&[1, 0]), &e(&[1, 1]));
        let pair = ScalarTwist::new(Arc::new(t)).unwrap();
        let rep = verify_twisting_pair(&pair, VerifyMode::Exhaustive, 0.0).unwrap();
        assert!(!rep.is_ok());
        assert!(rep.violations.iter().any(|v| v.elements.contains(&e(&[1, 0])) && v.elements.contains(&e(&[1, 1]))));
    }

    #[test]
    fn registry_builds() {
        let r = cocycle_registry();
        let c = r.build("clifford n=3", &AbelianGroup::z2n(3)).unwrap();
        assert_eq!(c.group().order(), Some(8));
        assert!(r.build("theta θ=0.3", &AbelianGroup::free(2)).is_ok());
        assert!(r.build("nope", &AbelianGroup::free(2)).is_err());
    }

    #[test]
    fn table_parses() {
        let g = AbelianGroup::z2n(1);
        let t = TableCocycle::parse(g, "1;1;-1;0\n").unwrap();
        assert_eq!(t.value(&e(&[1]), &e(&[1])), c(-1.0, 0.0));
        assert!(!t.is_exact());
    }
}
