//! Finite abelian group actions on finite-dimensional C*-algebras.

use crate::algebra::{involution, star_product, TwistedElement};
use crate::coeff::{CoeffAlgebra, MatrixAlgebra};
use crate::error::{Error, Result};
use crate::groups::{AbelianGroup, DualCharacter, GroupElement};
use crate::linalg::{c, fro_norm, rank, singular_values, sqrt_psd, CMat, C64};
use crate::twist::FrameTwist;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const RANK1_TRIALS: usize = 64;

/// γ_g = Ad(w_g) on B = ⊕ M_{nᵢ}(ℂ), embedded block-diagonally in M_N(ℂ).
#[derive(Clone, Debug)]
pub struct CoveringAction {
    pub blocks: Vec<usize>,
    pub group: AbelianGroup,
    pub w: BTreeMap<GroupElement, CMat>,
    offsets: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorSpec {
    /// Full unitary, rows of [re, im].
    #[serde(default)]
    pub unitary: Option<Vec<Vec<[f64; 2]>>>,
    /// Basis permutation: e_i ↦ e_{perm[i]}.
    #[serde(default)]
    pub permutation: Option<Vec<usize>>,
    /// Diagonal phases applied after the permutation, in turns.
    #[serde(default)]
    pub phases: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ActionSpec {
    pub blocks: Vec<usize>,
    /// Cyclic factors d₁ | d₂ | ….
    pub group: Vec<i64>,
    /// One conjugating unitary per cyclic factor.
    pub generators: Vec<GeneratorSpec>,
}

impl GeneratorSpec {
    fn matrix(&self, n: usize) -> Result<CMat> {
        if let Some(rows) = &self.unitary {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidSpec(format!("unitary must be {n}×{n}")));
            }
            return Ok(CMat::from_fn(n, n, |i, j| c(rows[i][j][0], rows[i][j][1])));
        }
        let perm = self.permutation.clone().unwrap_or_else(|| (0..n).collect());
        if perm.len() != n {
            return Err(Error::InvalidSpec("permutation length".into()));
        }
        let phases = self.phases.clone().unwrap_or_else(|| vec![0.0; n]);
        let mut m = CMat::zeros(n, n);
        for (i, &p) in perm.iter().enumerate() {
            if p >= n {
                return Err(Error::InvalidSpec("permutation entry out of range".into()));
            }
            m[(p, i)] = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * phases[p]);
        }
        Ok(m)
    }
}

impl CoveringAction {
    /// w_g = Π wᵢ^{gᵢ} from one unitary per cyclic factor.
    pub fn from_generators(blocks: Vec<usize>, group: AbelianGroup, gens: &[CMat]) -> Result<Self> {
        let n: usize = blocks.iter().sum();
        if gens.len() != group.rank() || gens.iter().any(|g| g.nrows() != n || g.ncols() != n) {
            return Err(Error::InvalidArgument("one N×N unitary per cyclic factor".into()));
        }
        let mut w = BTreeMap::new();
        for g in group.elements()? {
            let mut m = CMat::identity(n, n);
            for (gen, &e) in gens.iter().zip(&g.coords) {
                for _ in 0..e {
                    m = &m * gen;
                }
            }
            w.insert(g, m);
        }
        let mut offsets = vec![0];
        for b in &blocks {
            offsets.push(offsets.last().unwrap() + b);
        }
        let act = CoveringAction { blocks, group, w, offsets };
        act.validate()?;
        Ok(act)
    }

    pub fn from_spec(spec: &ActionSpec) -> Result<Self> {
        let n: usize = spec.blocks.iter().sum();
        let group = AbelianGroup::finite(spec.group.clone())?;
        let gens = spec.generators.iter().map(|g| g.matrix(n)).collect::<Result<Vec<_>>>()?;
        CoveringAction::from_generators(spec.blocks.clone(), group, &gens)
    }

    pub fn trivial(blocks: Vec<usize>, group: AbelianGroup) -> Result<Self> {
        let n: usize = blocks.iter().sum();
        let gens = vec![CMat::identity(n, n); group.rank()];
        CoveringAction::from_generators(blocks, group, &gens)
    }

    /// M₂(ℂ) with γ = Ad(diag(1,−1)).
    pub fn m2_z2() -> Self {
        let w = CMat::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)]));
        CoveringAction::from_generators(vec![2], AbelianGroup::z2n(1), &[w]).expect("valid action")
    }

    /// ℂ³ with ℤ₂ swapping the first two coordinates.
    pub fn c3_swap() -> Self {
        let mut w = CMat::zeros(3, 3);
        w[(1, 0)] = c(1.0, 0.0);
        w[(0, 1)] = c(1.0, 0.0);
        w[(2, 2)] = c(1.0, 0.0);
        CoveringAction::from_generators(vec![1, 1, 1], AbelianGroup::z2n(1), &[w]).expect("valid action")
    }

    /// ℂ² with ℤ₂ swapping the coordinates.
    pub fn c2_swap() -> Self {
        let w = crate::linalg::pauli_x();
        CoveringAction::from_generators(vec![1, 1], AbelianGroup::z2n(1), &[w]).expect("valid action")
    }

    pub fn n(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn dim_b(&self) -> usize {
        self.blocks.iter().map(|b| b * b).sum()
    }

    /// Matrix units of every block.
    pub fn basis(&self) -> Vec<CMat> {
        let n = self.n();
        let mut out = Vec::new();
        for (bi, &b) in self.blocks.iter().enumerate() {
            let o = self.offsets[bi];
            for i in 0..b {
                for j in 0..b {
                    let mut m = CMat::zeros(n, n);
                    m[(o + i, o + j)] = c(1.0, 0.0);
                    out.push(m);
                }
            }
        }
        out
    }

    /// Coordinates in the matrix-unit basis.
    pub fn coords(&self, b: &CMat) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.dim_b());
        for (bi, &s) in self.blocks.iter().enumerate() {
            let o = self.offsets[bi];
            for i in 0..s {
                for j in 0..s {
                    v.push(b[(o + i, o + j)]);
                }
            }
        }
        v
    }

    /// Frobenius norm of the part of `b` outside the block pattern.
    pub fn off_block(&self, b: &CMat) -> f64 {
        let mut block = vec![0; self.n()];
        for (bi, w) in self.offsets.windows(2).enumerate() {
            block[w[0]..w[1]].iter_mut().for_each(|x| *x = bi);
        }
        let mut s = 0.0;
        for j in 0..self.n() {
            for i in 0..self.n() {
                if block[i] != block[j] {
                    s += b[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    pub fn gamma(&self, g: &GroupElement, b: &CMat) -> CMat {
        let w = &self.w[g];
        w * b * w.adjoint()
    }

    fn validate(&self) -> Result<()> {
        let basis = self.basis();
        let e = self.group.identity();
        let mut worst = 0.0f64;
        for (g, w) in &self.w {
            worst = worst.max(fro_norm(&(w * w.adjoint() - CMat::identity(self.n(), self.n()))));
            for b in &basis {
                worst = worst.max(self.off_block(&self.gamma(g, b)));
            }
        }
        for b in &basis {
            worst = worst.max(fro_norm(&(self.gamma(&e, b) - b)));
        }
        let els: Vec<&GroupElement> = self.w.keys().collect();
        for g in &els {
            for h in &els {
                let gh = self.group.compose(g, h)?;
                for b in &basis {
                    let r = fro_norm(&(self.gamma(g, &self.gamma(h, b)) - self.gamma(&gh, b)));
                    worst = worst.max(r);
                }
            }
        }
        if worst > 1e-12 {
            return Err(Error::NotHomomorphic(worst));
        }
        Ok(())
    }

    pub fn pairing(&self, k: &DualCharacter, g: &GroupElement) -> C64 {
        self.group.pairing(k, g).expect("finite group").to_complex(0.0)
    }

    /// P_k(b) = |G|⁻¹ Σ_g conj⟨k,g⟩ γ_g(b).
    pub fn project(&self, k: &DualCharacter, b: &CMat) -> CMat {
        let n = self.n();
        let mut acc = CMat::zeros(n, n);
        for g in self.w.keys() {
            acc += self.gamma(g, b) * self.pairing(k, g).conj();
        }
        acc / c(self.w.len() as f64, 0.0)
    }

    pub fn characters(&self) -> Vec<DualCharacter> {
        self.group.dual().and_then(|d| d.elements()).expect("finite group")
    }
}

#[derive(Clone, Debug)]
pub struct SpectralSubspace {
    pub character: DualCharacter,
    /// Frobenius-orthonormal basis of B_k.
    pub basis: Vec<CMat>,
}

fn orthonormalize(vs: Vec<CMat>, tol: f64) -> Vec<CMat> {
    let mut out: Vec<CMat> = Vec::new();
    for mut v in vs {
        for _ in 0..2 {
            for u in &out {
                let ip = u.dotc(&v);
                v -= u * ip;
            }
        }
        let n = fro_norm(&v);
        if n > tol {
            out.push(v / c(n, 0.0));
        }
    }
    out
}

pub fn spectral_decompose(action: &CoveringAction) -> Result<Vec<SpectralSubspace>> {
    let basis = action.basis();
    let out: Vec<SpectralSubspace> = action
        .characters()
        .into_iter()
        .map(|k| {
            let imgs = basis.iter().map(|b| action.project(&k, b)).collect();
            SpectralSubspace { basis: orthonormalize(imgs, 1e-9), character: k }
        })
        .collect();
    let total: usize = out.iter().map(|s| s.basis.len()).sum();
    if total != action.dim_b() {
        return Err(Error::InvalidArgument(format!("spectral dimensions sum to {total}, dim B = {}", action.dim_b())));
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ProductAudit {
    pub products_checked: usize,
    pub product_residual: f64,
    pub adjoints_checked: usize,
    pub adjoint_residual: f64,
}

impl ProductAudit {
    pub fn is_ok(&self, tol: f64) -> bool {
        self.product_residual <= tol && self.adjoint_residual <= tol
    }
}

/// B_hB_k ⊂ B_{h+k} and B_k* ⊂ B_{−k}.
pub fn subspace_product_audit(action: &CoveringAction, subs: &[SpectralSubspace]) -> Result<ProductAudit> {
    let dual = action.group.dual()?;
    let mut rep = ProductAudit::default();
    for s in subs {
        let neg = dual.inverse(&s.character)?;
        for b in &s.basis {
            let a = b.adjoint();
            rep.adjoint_residual = rep.adjoint_residual.max(fro_norm(&(action.project(&neg, &a) - &a)));
            rep.adjoints_checked += 1;
        }
        for t in subs {
            let hk = dual.compose(&s.character, &t.character)?;
            for x in &s.basis {
                for y in &t.basis {
                    let p = x * y;
                    rep.product_residual = rep.product_residual.max(fro_norm(&(action.project(&hk, &p) - &p)));
                    rep.products_checked += 1;
                }
            }
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct ElwoodReport {
    pub rank: usize,
    pub target: usize,
    pub free: bool,
}

/// Rank of span{can(bᵢ⊗bⱼ)} with can(x⊗y) = Σ_g xγ_g(y)⊗δ_g.
pub fn elwood_freeness_check(action: &CoveringAction) -> ElwoodReport {
    let basis = action.basis();
    let els: Vec<&GroupElement> = action.w.keys().collect();
    let db = action.dim_b();
    let target = db * els.len();
    let mut cols = Vec::with_capacity(basis.len() * basis.len());
    for x in &basis {
        for y in &basis {
            let mut v = Vec::with_capacity(target);
            for g in &els {
                v.extend(action.coords(&(x * action.gamma(g, y))));
            }
            cols.push(v);
        }
    }
    let m = CMat::from_fn(target, cols.len(), |i, j| cols[j][i]);
    let r = rank(&m, 1e-10);
    ElwoodReport { rank: r, target, free: r == target }
}

#[derive(Clone, Debug)]
pub struct Polar {
    pub v: CMat,
    pub h: CMat,
    pub membership_residual: f64,
}

/// c = vh with h = (c*c)^{1/2}, v = ch⁻¹.
pub fn polar_decompose(cm: &CMat, membership: Option<&dyn Fn(&CMat) -> f64>) -> Result<Polar> {
    let s = singular_values(cm);
    let top = s.first().copied().unwrap_or(0.0);
    if s.last().map_or(true, |&m| m <= 1e-12 * top.max(1.0)) {
        return Err(Error::Singular);
    }
    let h = sqrt_psd(&(cm.adjoint() * cm))?;
    let hinv = h.clone().try_inverse().ok_or(Error::Singular)?;
    let v = cm * hinv;
    let membership_residual = membership.map_or(0.0, |f| f(&v).max(f(&h)));
    Ok(Polar { v, h, membership_residual })
}

#[derive(Clone, Debug)]
pub struct Frame {
    pub mu: BTreeMap<DualCharacter, CMat>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CharacterVerdict {
    pub character: DualCharacter,
    pub dim: usize,
    pub invertible_found: bool,
    pub best_min_singular: f64,
    /// Common kernel or cokernel across the basis: no element is invertible.
    pub certified_singular: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Rank1Report {
    pub regular: bool,
    pub characters: Vec<CharacterVerdict>,
    #[serde(skip)]
    pub frame: Option<Frame>,
}

fn stacked_rank(mats: &[CMat], vertical: bool) -> usize {
    if mats.is_empty() {
        return 0;
    }
    let n = mats[0].nrows();
    let m = if vertical {
        CMat::from_fn(n * mats.len(), n, |i, j| mats[i / n][(i % n, j)])
    } else {
        CMat::from_fn(n, n * mats.len(), |i, j| mats[j / n][(i, j % n)])
    };
    rank(&m, 1e-10)
}

/// Searches each B_k for an invertible element and unitarizes it.
pub fn rank1_regular_check(action: &CoveringAction, subs: &[SpectralSubspace], seed: u64) -> Result<Rank1Report> {
    let n = action.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut verdicts = Vec::new();
    let mut mu = BTreeMap::new();
    let e = action.group.dual()?.identity();
    for s in subs {
        let mut best = 0.0f64;
        let mut found = None;
        if s.character == e {
            found = Some(CMat::identity(n, n));
            best = 1.0;
        } else if !s.basis.is_empty() {
            for _ in 0..RANK1_TRIALS {
                let mut m = CMat::zeros(n, n);
                for b in &s.basis {
                    m += b * C64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU);
                }
                let sv = singular_values(&m);
                let ms = sv.last().copied().unwrap_or(0.0) / sv[0].max(1e-300);
                if ms > best {
                    best = ms;
                    if ms > 1e-8 {
                        let memb = |x: &CMat| fro_norm(&(action.project(&s.character, x) - x));
                        let p = polar_decompose(&m, None)?;
                        if memb(&p.v) <= 1e-9 {
                            found = Some(p.v);
                        }
                    }
                }
                if found.is_some() {
                    break;
                }
            }
        }
        let certified = found.is_none() && (s.basis.is_empty() || stacked_rank(&s.basis, true) < n || stacked_rank(&s.basis, false) < n);
        verdicts.push(CharacterVerdict {
            character: s.character.clone(),
            dim: s.basis.len(),
            invertible_found: found.is_some(),
            best_min_singular: best,
            certified_singular: certified,
        });
        if let Some(u) = found {
            mu.insert(s.character.clone(), u);
        }
    }
    let regular = verdicts.iter().all(|v| v.invertible_found);
    Ok(Rank1Report { regular, characters: verdicts, frame: regular.then_some(Frame { mu }) })
}

/// Frame-induced pair on A = B^G, indexed by Ĝ.
pub fn frame_to_pair(action: &CoveringAction, frame: &Frame, tol: f64) -> Result<FrameTwist<MatrixAlgebra>> {
    let subs = spectral_decompose(action)?;
    let e = action.group.dual()?.identity();
    let a_basis = subs.iter().find(|s| s.character == e).map(|s| s.basis.clone()).unwrap_or_default();
    let memb = |j: &GroupElement, m: &CMat| fro_norm(&(action.project(j, m) - m)).max(action.off_block(m));
    FrameTwist::new(MatrixAlgebra { dim: action.n() }, action.group.dual()?, frame.mu.clone(), a_basis, Some(&memb), tol)
}

/// The ambient algebra B with its G-action, as seen by Φ.
pub trait Ambient<A: CoeffAlgebra> {
    fn covering_group(&self) -> &AbelianGroup;
    fn gamma(&self, g: &GroupElement, b: &A::Elem) -> A::Elem;
    /// ⟨j, g⟩ for j ∈ Ĝ, g ∈ G.
    fn pairing(&self, j: &DualCharacter, g: &GroupElement) -> C64;
    fn vectorize(&self, b: &A::Elem) -> Vec<C64>;
    /// Dimension of the (model of the) ambient algebra Φ should fill.
    fn dim_b(&self) -> usize;
}

impl Ambient<MatrixAlgebra> for CoveringAction {
    fn covering_group(&self) -> &AbelianGroup {
        &self.group
    }
    fn gamma(&self, g: &GroupElement, b: &CMat) -> CMat {
        CoveringAction::gamma(self, g, b)
    }
    fn pairing(&self, j: &DualCharacter, g: &GroupElement) -> C64 {
        CoveringAction::pairing(self, j, g)
    }
    fn vectorize(&self, b: &CMat) -> Vec<C64> {
        self.coords(b)
    }
    fn dim_b(&self) -> usize {
        CoveringAction::dim_b(self)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PhiReport {
    pub pairs_checked: usize,
    pub multiplicativity: f64,
    pub involution: f64,
    pub equivariance: f64,
    pub domain_dim: usize,
    pub image_rank: usize,
    pub dim_b: usize,
    pub bijective: bool,
}

impl PhiReport {
    pub fn pass(&self, tol: f64) -> bool {
        self.multiplicativity <= tol && self.involution <= tol && self.equivariance <= tol && self.bijective
    }
}

/// Φ(Σ a_jδ_j) = Σ a_jμ_j.
pub fn phi<A: CoeffAlgebra>(pair: &FrameTwist<A>, f: &TwistedElement<A::Elem>) -> A::Elem {
    let alg = &pair.alg;
    f.terms.iter().fold(alg.zero(), |acc, (j, a)| alg.add(&acc, &alg.mul(a, pair.mu(j))))
}

fn vec_dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Checks Φ on the monomial basis {aᵢδ_j}: products of all pairs (or
/// `max_pairs` seeded samples), adjoints, rank and the equivariance
/// Φ(γ_g(a_jδ_j)) = ⟨j,g⟩a_jμ_j = γ_g(Φ(a_jδ_j)).
pub fn crossed_iso_phi<A: CoeffAlgebra>(
    pair: &FrameTwist<A>,
    ambient: &dyn Ambient<A>,
    max_pairs: usize,
    seed: u64,
) -> Result<PhiReport> {
    let alg = &pair.alg;
    let mut mono = Vec::new();
    for j in pair.group.elements()? {
        for a in &pair.samples {
            mono.push(TwistedElement::monomial(j.clone(), a.clone()));
        }
    }
    let nm = mono.len();
    let pairs: Vec<(usize, usize)> = if nm * nm <= max_pairs {
        (0..nm).flat_map(|i| (0..nm).map(move |j| (i, j))).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..max_pairs).map(|_| (rng.gen_range(0..nm), rng.gen_range(0..nm))).collect()
    };
    let images: Vec<A::Elem> = mono.iter().map(|f| phi(pair, f)).collect();
    let mut mult = 0.0f64;
    for &(i, j) in &pairs {
        let prod = star_product(pair, &mono[i], &mono[j])?;
        mult = mult.max(alg.distance(&phi(pair, &prod), &alg.mul(&images[i], &images[j])));
    }
    let mut inv = 0.0f64;
    let mut eqv = 0.0f64;
    for (f, img) in mono.iter().zip(&images) {
        inv = inv.max(alg.distance(&phi(pair, &involution(pair, f)?), &alg.adjoint(img)));
        let (j, _) = f.terms.iter().next().expect("monomial");
        let v = ambient.vectorize(img);
        for g in ambient.covering_group().elements()? {
            let ph = ambient.pairing(j, &g);
            let lhs: Vec<C64> = v.iter().map(|z| z * ph).collect();
            eqv = eqv.max(vec_dist(&lhs, &ambient.vectorize(&ambient.gamma(&g, img))));
        }
    }
    let vecs: Vec<Vec<C64>> = images.iter().map(|b| ambient.vectorize(b)).collect();
    let rows = vecs.iter().map(|v| v.len()).max().unwrap_or(0);
    let m = CMat::from_fn(rows, nm, |i, j| vecs[j].get(i).copied().unwrap_or_default());
    let image_rank = rank(&m, 1e-10);
    let dim_b = ambient.dim_b();
    Ok(PhiReport {
        pairs_checked: pairs.len(),
        multiplicativity: mult,
        involution: inv,
        equivariance: eqv,
        domain_dim: nm,
        image_rank,
        dim_b,
        bijective: nm == dim_b && image_rank == dim_b,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundTripRow {
    pub character: DualCharacter,
    pub dim_b_k: usize,
    pub dim_crossed: usize,
}

/// Spectral dimensions of B against those of the dual action
/// U_x(a_jδ_j) = conj⟨j,x⟩a_jδ_j on A⋊Ĝ, whose k-subspace is Aδ_{−k}.
pub fn round_trip_dims(action: &CoveringAction, subs: &[SpectralSubspace]) -> Result<Vec<RoundTripRow>> {
    let dual = action.group.dual()?;
    let js = dual.elements()?;
    let dim_a = subs.iter().find(|s| s.character == dual.identity()).map_or(0, |s| s.basis.len());
    let xs = action.group.elements()?;
    let nj = js.len();
    let mut out = Vec::new();
    for s in subs {
        // Averaging projector acts diagonally on the δ_j label.
        let diag: Vec<C64> = js
            .iter()
            .map(|j| {
                let sum: C64 = xs.iter().map(|x| action.pairing(j, x).conj() * action.pairing(&s.character, x).conj()).sum();
                sum / c(xs.len() as f64, 0.0)
            })
            .collect();
        let p = CMat::from_fn(nj, nj, |i, j| if i == j { diag[i] } else { c(0.0, 0.0) });
        out.push(RoundTripRow { character: s.character.clone(), dim_b_k: s.basis.len(), dim_crossed: dim_a * rank(&p, 1e-10) });
    }
    Ok(out)
}
