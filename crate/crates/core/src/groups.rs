//! Discrete abelian groups: ℤⁿ, finite products of cyclic groups, and the
//! quotients ℤ²/Mℤ² together with their duals.

use crate::error::{Error, Result};
use crate::phase::Phase;
use crate::snf::{det2, smith_normal_form, Smith};
use num_rational::Ratio;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    pub coords: Vec<i64>,
}

impl GroupElement {
    pub fn new(coords: Vec<i64>) -> Self {
        GroupElement { coords }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

impl std::fmt::Display for GroupElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Characters of a finite group are stored in the same coordinates as the
/// group itself (Ĝ ≅ G for finite abelian G).
pub type DualCharacter = GroupElement;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AbelianGroup {
    Free { rank: usize },
    Finite { factors: Vec<i64> },
}

impl AbelianGroup {
    pub fn free(rank: usize) -> Self {
        AbelianGroup::Free { rank }
    }

    /// Product of cyclic groups with invariant factors `d₁ | d₂ | …`.
    pub fn finite(factors: Vec<i64>) -> Result<Self> {
        if factors.iter().any(|&d| d < 2) {
            return Err(Error::InvalidArgument(format!("invariant factors must be ≥ 2: {factors:?}")));
        }
        if factors.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(Error::InvalidArgument(format!("factors do not form a divisor chain: {factors:?}")));
        }
        Ok(AbelianGroup::Finite { factors })
    }

    pub fn z2n(n: usize) -> Self {
        AbelianGroup::Finite { factors: vec![2; n] }
    }

    pub fn trivial() -> Self {
        AbelianGroup::Finite { factors: vec![] }
    }

    /// Parses `"free-abelian n"`, `"z2^n"`, `"cyclic d1,d2,…"` or
    /// `"quotient M=[[a,b],[c,d]]"`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let bad = || Error::InvalidSpec(format!("group spec {spec:?}"));
        if let Some(rest) = spec.strip_prefix("free-abelian") {
            let n: usize = rest.trim().parse().map_err(|_| bad())?;
            return Ok(Self::free(n));
        }
        if let Some(rest) = spec.strip_prefix("z2^") {
            let n: usize = rest.trim().parse().map_err(|_| bad())?;
            return Ok(Self::z2n(n));
        }
        if let Some(rest) = spec.strip_prefix("cyclic") {
            let factors = rest
                .split(',')
                .map(|s| s.trim().parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad())?;
            return Self::finite(factors);
        }
        if let Some(rest) = spec.strip_prefix("quotient") {
            let m = parse_matrix2(rest.trim().trim_start_matches("M=")).ok_or_else(bad)?;
            return Ok(QuotientLattice::new(m)?.group);
        }
        Err(bad())
    }

    pub fn rank(&self) -> usize {
        match self {
            AbelianGroup::Free { rank } => *rank,
            AbelianGroup::Finite { factors } => factors.len(),
        }
    }

    pub fn order(&self) -> Option<u64> {
        match self {
            AbelianGroup::Free { rank: 0 } => Some(1),
            AbelianGroup::Free { .. } => None,
            AbelianGroup::Finite { factors } => Some(factors.iter().map(|&d| d as u64).product()),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::new(vec![0; self.rank()])
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        match self {
            AbelianGroup::Free { rank } => g.coords.len() == *rank,
            AbelianGroup::Finite { factors } => {
                g.coords.len() == factors.len()
                    && g.coords.iter().zip(factors).all(|(&c, &d)| (0..d).contains(&c))
            }
        }
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    /// Reduces arbitrary integer coordinates into the group.
    pub fn element(&self, coords: Vec<i64>) -> Result<GroupElement> {
        if coords.len() != self.rank() {
            return Err(Error::GroupMismatch);
        }
        Ok(match self {
            AbelianGroup::Free { .. } => GroupElement::new(coords),
            AbelianGroup::Finite { factors } => {
                GroupElement::new(coords.iter().zip(factors).map(|(&c, &d)| c.rem_euclid(d)).collect())
            }
        })
    }

    pub fn compose(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        let mut c = Vec::with_capacity(a.coords.len());
        for (x, y) in a.coords.iter().zip(&b.coords) {
            c.push(x.checked_add(*y).ok_or(Error::Overflow("group composition"))?);
        }
        self.element(c)
    }

    pub fn inverse(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.element(a.coords.iter().map(|c| -c).collect())
    }

    pub fn elements(&self) -> Result<Vec<GroupElement>> {
        let AbelianGroup::Finite { factors } = self else {
            if self.rank() == 0 {
                return Ok(vec![self.identity()]);
            }
            return Err(Error::InvalidArgument("cannot enumerate an infinite group".into()));
        };
        let mut out = vec![GroupElement::new(vec![])];
        for &d in factors {
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for g in &out {
                for c in 0..d {
                    let mut coords = g.coords.clone();
                    coords.push(c);
                    next.push(GroupElement::new(coords));
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Uniform element of a finite group, or of the box `[-b,b]ⁿ` for ℤⁿ.
    pub fn random_element<R: Rng>(&self, rng: &mut R, b: i64) -> GroupElement {
        match self {
            AbelianGroup::Free { rank } => GroupElement::new((0..*rank).map(|_| rng.gen_range(-b..=b)).collect()),
            AbelianGroup::Finite { factors } => {
                GroupElement::new(factors.iter().map(|&d| rng.gen_range(0..d)).collect())
            }
        }
    }

    pub fn dual(&self) -> Result<AbelianGroup> {
        match self {
            AbelianGroup::Finite { .. } => Ok(self.clone()),
            AbelianGroup::Free { rank: 0 } => Ok(self.clone()),
            AbelianGroup::Free { .. } => Err(Error::InvalidArgument("dual of ℤⁿ is a torus".into())),
        }
    }

    /// `⟨k,g⟩ = exp(2πi Σ kᵢcᵢ/dᵢ)` as an exact phase.
    pub fn pairing(&self, k: &DualCharacter, g: &GroupElement) -> Result<Phase> {
        let AbelianGroup::Finite { factors } = self else {
            return Err(Error::InvalidArgument("pairing needs a finite group".into()));
        };
        self.check(k)?;
        self.check(g)?;
        let mut t = Ratio::zero();
        for ((&a, &b), &d) in k.coords.iter().zip(&g.coords).zip(factors) {
            t += Ratio::new((a * b) % d, d);
        }
        Ok(Phase { turns: t - t.floor(), theta: 0 })
    }
}

pub fn parse_matrix2(s: &str) -> Option<[[i64; 2]; 2]> {
    let v: Vec<i64> = s
        .chars()
        .map(|c| if c == '[' || c == ']' || c == ',' { ' ' } else { c })
        .collect::<String>()
        .split_whitespace()
        .map(|t| t.parse().ok())
        .collect::<Option<Vec<_>>>()?;
    (v.len() == 4).then(|| [[v[0], v[1]], [v[2], v[3]]])
}

/// `G = ℤ²/Mℤ²` with Smith data relating lattice vectors to group
/// coordinates and dual characters to sections `s(ĝ) = Mᵀζ(ĝ)`.
#[derive(Clone, Debug)]
pub struct QuotientLattice {
    pub m: [[i64; 2]; 2],
    pub group: AbelianGroup,
    smith: Smith,
    kept: Vec<usize>,
}

impl QuotientLattice {
    pub fn new(m: [[i64; 2]; 2]) -> Result<Self> {
        let det = det2(&m)?;
        if det == 0 {
            return Err(Error::Singular);
        }
        if det.abs() < 2 {
            return Err(Error::InvalidArgument("|det M| must exceed 1".into()));
        }
        let smith = smith_normal_form(&vec![m[0].to_vec(), m[1].to_vec()])?;
        let kept: Vec<usize> = (0..2).filter(|&i| smith.d[i][i] > 1).collect();
        let factors = kept.iter().map(|&i| smith.d[i][i]).collect();
        Ok(QuotientLattice { m, group: AbelianGroup::finite(factors)?, smith, kept })
    }

    pub fn det(&self) -> i64 {
        det2(&self.m).expect("checked at construction")
    }

    /// Class of `t ∈ ℤ²` in G.
    pub fn class_of(&self, t: [i64; 2]) -> GroupElement {
        let u = &self.smith.u;
        let c: Vec<i64> = self
            .kept
            .iter()
            .map(|&i| (u[i][0] * t[0] + u[i][1] * t[1]).rem_euclid(self.smith.d[i][i]))
            .collect();
        GroupElement::new(c)
    }

    /// A lattice representative of a group element.
    pub fn lift(&self, g: &GroupElement) -> [i64; 2] {
        // t = U⁻¹ c, found by search over the fundamental box of the class map.
        let n = self.det().abs();
        for a in 0..n {
            for b in 0..n {
                if &self.class_of([a, b]) == g {
                    return [a, b];
                }
            }
        }
        unreachable!("every class has a representative in [0,|det|)²")
    }

    /// Dual character of `ŝ = M̂s` for an integer vector `s` (`M̂ = M^{-T}`).
    pub fn character_of_section(&self, s: [i64; 2]) -> DualCharacter {
        let v = &self.smith.v;
        let k = self
            .kept
            .iter()
            .map(|&i| (v[0][i] * s[0] + v[1][i] * s[1]).rem_euclid(self.smith.d[i][i]))
            .collect();
        GroupElement::new(k)
    }

    /// ζ(ĝ) ∈ [0,1)², the representative of `M̂s` modulo ℤ².
    pub fn zeta(&self, k: &DualCharacter) -> [Ratio<i64>; 2] {
        let mut full = [Ratio::zero(); 2];
        for (slot, &i) in self.kept.iter().enumerate() {
            full[i] = Ratio::new(k.coords[slot], self.smith.d[i][i]);
        }
        let u = &self.smith.u;
        let mut z = [Ratio::zero(); 2];
        for (j, zj) in z.iter_mut().enumerate() {
            let r = full[0] * u[0][j] + full[1] * u[1][j];
            *zj = r - r.floor();
        }
        z
    }

    /// s(ĝ) = Mᵀζ(ĝ) ∈ ℤ².
    pub fn section(&self, k: &DualCharacter) -> [i64; 2] {
        let z = self.zeta(k);
        let m = &self.m;
        let mut s = [0i64; 2];
        for (i, si) in s.iter_mut().enumerate() {
            let r = z[0] * m[0][i] + z[1] * m[1][i];
            assert!(r.is_integer(), "section must be integral");
            *si = r.to_integer();
        }
        s
    }

    /// `⟨ĝ, t⟩ = exp(2πi⟨t, ζ(ĝ)⟩)` evaluated from the rational representative.
    pub fn pairing_lattice(&self, k: &DualCharacter, t: [i64; 2]) -> Phase {
        let z = self.zeta(k);
        let r = z[0] * t[0] + z[1] * t[1];
        Phase { turns: r - r.floor(), theta: 0 }
    }

    /// `M̂v` if it is integral.
    pub fn mhat_apply(&self, v: [i64; 2]) -> Result<[i64; 2]> {
        // M^{-T} = adj(M)ᵀ / det.
        let m = &self.m;
        let det = self.det();
        let a = m[1][1] * v[0] - m[1][0] * v[1];
        let b = -m[0][1] * v[0] + m[0][0] * v[1];
        if a % det != 0 || b % det != 0 {
            return Err(Error::NotIntegral(format!("M̂·{v:?}")));
        }
        Ok([a / det, b / det])
    }

    pub fn mt_apply(&self, n: [i64; 2]) -> [i64; 2] {
        let m = &self.m;
        [m[0][0] * n[0] + m[1][0] * n[1], m[0][1] * n[0] + m[1][1] * n[1]]
    }
}

/// An ordered finite subset of a group with an index lookup.
#[derive(Clone, Debug)]
pub struct Ball {
    pub elements: Vec<GroupElement>,
    pub index: HashMap<GroupElement, usize>,
    pub radius: f64,
}

impl Ball {
    pub fn new(mut elements: Vec<GroupElement>, radius: f64) -> Self {
        elements.sort();
        elements.dedup();
        let index = elements.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        Ball { elements, index, radius }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, g: &GroupElement) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn whole(group: &AbelianGroup) -> Result<Self> {
        Ok(Ball::new(group.elements()?, f64::INFINITY))
    }
}

/// Elements with `size(g) ≤ radius`. For ℤⁿ the search runs over the box
/// `[-b,b]ⁿ`; an element on the box boundary inside the ball means the box
/// cannot be shown to contain the ball.
pub fn enumerate_ball(
    group: &AbelianGroup,
    size: impl Fn(&GroupElement) -> f64,
    radius: f64,
    search_box: i64,
) -> Result<Ball> {
    if group.is_finite() {
        let elements: Vec<GroupElement> = group.elements()?.into_iter().filter(|g| size(g) <= radius).collect();
        return Ok(Ball::new(elements, radius));
    }
    let n = group.rank();
    let b = search_box;
    let mut elements = Vec::new();
    let mut coords = vec![-b; n];
    loop {
        let g = GroupElement::new(coords.clone());
        if size(&g) <= radius {
            if coords.iter().any(|c| c.abs() == b) && b > 0 {
                return Err(Error::SearchBoxTooSmall { box_radius: b, radius });
            }
            elements.push(g);
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(Ball::new(elements, radius));
            }
            i -= 1;
            if coords[i] < b {
                coords[i] += 1;
                for c in coords.iter_mut().skip(i + 1) {
                    *c = -b;
                }
                break;
            }
        }
    }
}
