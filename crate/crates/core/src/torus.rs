//! The quantum 2-torus 𝔸²_θ with the covering action of G = ℤ²/Mℤ², its
//! fixed-point algebra A, the frame μ_ĝ = 𝒲_{s(ĝ)} and both triple
//! constructions (generic builders and explicit formulas).

use crate::algebra::{tensor_index, CovariantPair, TwistedElement};
use crate::coeff::{Representation, TorusAlgebra, TorusElement, TorusGns};
use crate::coverings::Ambient;
use crate::error::{Error, Result};
use crate::groups::{AbelianGroup, Ball, DualCharacter, GroupElement, QuotientLattice};
use crate::length::LengthFunction;
use crate::linalg::{c, CMat, SpMat, C64};
use crate::phase::Phase;
use crate::triple::{build_even_to_odd, equivariant_build, IntertwiningReport, Parity, Rung, TruncatedTriple, TruncationSpec};
use crate::twist::FrameTwist;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

pub const DEFAULT_THETA: f64 = SQRT_2 - 1.0;

#[derive(Clone, Debug)]
pub struct TorusConfig {
    pub theta: f64,
    pub m: [[i64; 2]; 2],
    /// Modes 𝒲_r with ‖r‖∞ ≤ cutoff are retained.
    pub cutoff: i64,
    pub lattice: QuotientLattice,
}

impl TorusConfig {
    pub fn new(theta: f64, m: [[i64; 2]; 2], cutoff: i64) -> Result<Self> {
        if cutoff < 1 {
            return Err(Error::InvalidArgument("GNS cutoff must be at least 1".into()));
        }
        if !theta.is_finite() {
            return Err(Error::InvalidArgument("θ must be finite".into()));
        }
        Ok(TorusConfig { theta, m, cutoff, lattice: QuotientLattice::new(m)? })
    }

    pub fn with_cutoff(&self, cutoff: i64) -> Result<Self> {
        TorusConfig::new(self.theta, self.m, cutoff)
    }

    pub fn algebra(&self) -> TorusAlgebra {
        TorusAlgebra { theta: self.theta }
    }

    /// Ĝ, with the same invariant factors as G.
    pub fn dual_group(&self) -> &AbelianGroup {
        &self.lattice.group
    }

    pub fn section(&self, k: &DualCharacter) -> [i64; 2] {
        self.lattice.section(k)
    }

    /// All modes of the box window, sorted.
    pub fn window(&self) -> Vec<[i64; 2]> {
        box_modes(self.cutoff)
    }

    /// Modes of the box lying in M^Tℤ².
    pub fn a_window(&self) -> Vec<[i64; 2]> {
        let e = self.dual_group().identity();
        torus_spectral_subspace(self, &e)
    }

    pub fn a_generators(&self) -> Vec<TorusElement> {
        [[1, 0], [0, 1], [1, 1], [-1, 0], [0, -1]].iter().map(|&n| TorusElement::w(self.lattice.mt_apply(n))).collect()
    }
}

fn box_modes(r: i64) -> Vec<[i64; 2]> {
    let mut v = Vec::with_capacity(((2 * r + 1) * (2 * r + 1)) as usize);
    for a in -r..=r {
        for b in -r..=r {
            v.push([a, b]);
        }
    }
    v
}

fn add(a: [i64; 2], b: [i64; 2]) -> [i64; 2] {
    [a[0] + b[0], a[1] + b[1]]
}

fn sub(a: [i64; 2], b: [i64; 2]) -> [i64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn inf_norm(a: [i64; 2]) -> i64 {
    a[0].abs().max(a[1].abs())
}

/// ⟨u, Θv⟩/θ = u₁v₂ − u₂v₁.
pub fn theta_form(u: [i64; 2], v: [i64; 2]) -> i64 {
    u[0] * v[1] - u[1] * v[0]
}

/// 𝒲_x𝒲_y = σ_Θ(x,y)𝒲_{x+y}.
pub fn w_product(x: [i64; 2], y: [i64; 2]) -> (Phase, [i64; 2]) {
    (Phase::theta(-theta_form(x, y)), add(x, y))
}

/// τ(Σα_r𝒲_r) = α₀₀.
pub fn trace_tau(e: &TorusElement) -> C64 {
    e.terms.get(&[0, 0]).copied().unwrap_or_default()
}

/// e^{2πi⟨M⁻¹t, x⟩} as an exact phase.
pub fn gamma_phase(lattice: &QuotientLattice, t: [i64; 2], x: [i64; 2]) -> Phase {
    // ⟨M⁻¹t, x⟩ = ⟨t, M^{-T}x⟩ and M^{-T} = adj(M)ᵀ/det.
    let m = &lattice.m;
    let a = m[1][1] * x[0] - m[1][0] * x[1];
    let b = -m[0][1] * x[0] + m[0][0] * x[1];
    Phase::turns(t[0] * a + t[1] * b, lattice.det())
}

/// γ_t on a lattice vector t; descends to G since γ_{Mt′} = id.
pub fn gamma_lattice(cfg: &TorusConfig, t: [i64; 2], e: &TorusElement) -> TorusElement {
    TorusElement {
        terms: e.terms.iter().map(|(x, a)| (*x, a * gamma_phase(&cfg.lattice, t, *x).to_complex(cfg.theta))).collect(),
    }
}

pub fn gamma_action(cfg: &TorusConfig, g: &GroupElement, e: &TorusElement) -> TorusElement {
    gamma_lattice(cfg, cfg.lattice.lift(g), e)
}

/// Window modes of B_ĝ = span{𝒲_{s(ĝ)+M^Tn}}.
pub fn torus_spectral_subspace(cfg: &TorusConfig, k: &DualCharacter) -> Vec<[i64; 2]> {
    cfg.window().into_iter().filter(|r| &cfg.lattice.character_of_section(*r) == k).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct NuY {
    /// ν/θ, an integer.
    pub nu_over_theta: i64,
    pub nu: f64,
    pub y: [i64; 2],
}

/// ν(ĵ,ĝ,x) and 𝒴(ĵ,ĝ) = M̂(s(−ĵ−ĝ) + s(ĵ) − s(−ĝ)).
pub fn nu_and_y(cfg: &TorusConfig, j: &DualCharacter, g: &DualCharacter, x: [i64; 2]) -> Result<NuY> {
    let grp = cfg.dual_group();
    let jg = grp.compose(j, g)?;
    let s_mjg = cfg.section(&grp.inverse(&jg)?);
    let s_j = cfg.section(j);
    let s_mg = cfg.section(&grp.inverse(g)?);
    let mtx = cfg.lattice.mt_apply(x);
    let k = theta_form(s_mjg, sub(add(mtx, s_j), s_mg)) + theta_form(mtx, sub(s_j, s_mg)) - theta_form(s_j, s_mg);
    let y = cfg
        .lattice
        .mhat_apply(sub(add(s_mjg, s_j), s_mg))
        .map_err(|_| Error::NotIntegral(format!("𝒴({j},{g})")))?;
    Ok(NuY { nu_over_theta: k, nu: cfg.theta * k as f64, y })
}

/// Residual of an element outside B_k.
pub fn outside_subspace(cfg: &TorusConfig, k: &DualCharacter, e: &TorusElement) -> f64 {
    e.terms
        .iter()
        .filter(|(r, _)| &cfg.lattice.character_of_section(**r) != k)
        .map(|(_, v)| v.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// The frame-induced pair on A indexed by Ĝ; samples are the A-window monomials.
pub fn frame_pair(cfg: &TorusConfig) -> Result<FrameTwist<TorusAlgebra>> {
    let grp = cfg.dual_group().clone();
    let frame: BTreeMap<GroupElement, TorusElement> =
        grp.elements()?.into_iter().map(|k| (k.clone(), TorusElement::w(cfg.section(&k)))).collect();
    let samples = cfg.a_window().into_iter().map(TorusElement::w).collect();
    let memb = |k: &GroupElement, m: &TorusElement| outside_subspace(cfg, k, m);
    FrameTwist::new(cfg.algebra(), grp, frame, samples, Some(&memb), 1e-12)
}

/// ℓ(ĝ) = ε(ζ(ĝ)), ε(x) = [[0, x₁ − ix₂], [x₁ + ix₂, 0]].
#[derive(Clone, Debug)]
pub struct TorusLength {
    pub lattice: QuotientLattice,
}

pub fn epsilon(x: [f64; 2]) -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(x[0], -x[1]), c(x[0], x[1]), c(0.0, 0.0)])
}

impl LengthFunction for TorusLength {
    fn name(&self) -> String {
        "torus-section".into()
    }
    fn group(&self) -> &AbelianGroup {
        &self.lattice.group
    }
    fn dim(&self) -> usize {
        2
    }
    fn eval(&self, g: &GroupElement) -> CMat {
        let z = self.lattice.zeta(g);
        epsilon([ratio_f64(z[0]), ratio_f64(z[1])])
    }
    fn search_box(&self, _radius: f64) -> i64 {
        0
    }
}

fn ratio_f64(r: num_rational::Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// π ⊕ π.
pub struct Doubled<E> {
    pub inner: Arc<dyn Representation<E>>,
}

impl<E> Representation<E> for Doubled<E> {
    fn dim(&self) -> usize {
        2 * self.inner.dim()
    }
    fn apply(&self, a: &E) -> SpMat {
        let m = self.inner.apply(a);
        SpMat::block_diag(&[&m, &m])
    }
}

/// 2π(r₁ − ir₂) and 2π(r₁ + ir₂): the blocks D⁻ and D⁺ of −i[[0, δ₁−iδ₂],[δ₁+iδ₂, 0]] on 𝒲_r.
pub fn dirac_blocks(r: [i64; 2]) -> (C64, C64) {
    let (a, b) = (2.0 * PI * r[0] as f64, 2.0 * PI * r[1] as f64);
    (c(a, -b), c(a, b))
}

fn even_dirac(modes: &[[i64; 2]]) -> SpMat {
    let p = modes.len();
    let mut trip = Vec::with_capacity(2 * p);
    for (i, r) in modes.iter().enumerate() {
        let (minus, plus) = dirac_blocks(*r);
        trip.push((i, p + i, minus));
        trip.push((p + i, i, plus));
    }
    SpMat::from_triplets(2 * p, 2 * p, trip)
}

fn mode_triple(cfg: &TorusConfig, modes: Vec<[i64; 2]>, steps: &[[i64; 2]]) -> TruncatedTriple<TorusElement> {
    let gns = TorusGns::new(cfg.theta, modes);
    let p = gns.modes.len();
    let interior_one: Vec<bool> = gns.modes.iter().map(|r| steps.iter().all(|s| gns.index.contains_key(&add(*r, *s)))).collect();
    let labels = ["+", "-"].iter().flat_map(|sg| gns.modes.iter().map(move |r| format!("{sg}W({},{})", r[0], r[1]))).collect();
    TruncatedTriple {
        labels,
        dirac: even_dirac(&gns.modes),
        rep: Arc::new(Doubled { inner: Arc::new(gns) as Arc<dyn Representation<TorusElement>> }),
        parity: Parity::Even,
        split: Some(p),
        trunc: TruncationSpec { radius: cfg.cutoff as f64, mode_cutoff: 2.0 * PI * cfg.cutoff as f64 },
        interior: [interior_one.clone(), interior_one].concat(),
    }
}

/// Even triple on L²(A)⊕L²(A) over the modes 𝒲_{M^Tn} in the window.
pub fn build_torus_coefficient_triple(cfg: &TorusConfig) -> TruncatedTriple<TorusElement> {
    let steps: Vec<[i64; 2]> = [[1, 0], [0, 1], [-1, 0], [0, -1]].iter().map(|&n| cfg.lattice.mt_apply(n)).collect();
    mode_triple(cfg, cfg.a_window(), &steps)
}

/// Even triple on L²(B)⊕L²(B) over the whole window.
pub fn build_torus_b_triple(cfg: &TorusConfig) -> TruncatedTriple<TorusElement> {
    mode_triple(cfg, cfg.window(), &[[1, 0], [0, 1], [-1, 0], [0, -1]])
}

/// The crossed-product triple by the generic chain: frame pair, ε∘ζ length,
/// even→odd builder.
pub fn generic_crossed_triple(cfg: &TorusConfig) -> Result<TruncatedTriple<TwistedElement<TorusElement>>> {
    let coeff = build_torus_coefficient_triple(cfg);
    let pair = Arc::new(frame_pair(cfg)?);
    let l = TorusLength { lattice: cfg.lattice.clone() };
    build_even_to_odd(&coeff, pair, &l, &Ball::whole(cfg.dual_group())?)
}

struct Layout {
    modes: Vec<[i64; 2]>,
    index: HashMap<[i64; 2], usize>,
    ball: Ball,
}

impl Layout {
    fn new(modes: Vec<[i64; 2]>, group: &AbelianGroup) -> Result<Self> {
        let gns = TorusGns::new(0.0, modes);
        Ok(Layout { modes: gns.modes, index: gns.index, ball: Ball::whole(group)? })
    }
    fn p(&self) -> usize {
        self.modes.len()
    }
    fn nb(&self) -> usize {
        self.ball.len()
    }
    fn dim(&self) -> usize {
        2 * self.p() * self.nb() * 2
    }
    /// Basis index of (sign, mode, ĝ, v) in (H⁺ ⊕ H⁻)⊗ℓ²(Ĝ)⊗ℂ².
    fn at(&self, minus: bool, m: usize, g: usize, v: usize) -> usize {
        let h = if minus { self.p() + m } else { m };
        tensor_index(h, g, v, self.nb(), 2)
    }
    fn dirac(&self, cfg: &TorusConfig) -> SpMat {
        let l = TorusLength { lattice: cfg.lattice.clone() };
        let mut trip = Vec::new();
        for (gi, g) in self.ball.elements.iter().enumerate() {
            let lg = l.eval(g);
            for (mi, r) in self.modes.iter().enumerate() {
                let (dm, dp) = dirac_blocks(*r);
                for v in 0..2 {
                    for w in 0..2 {
                        let e = lg[(w, v)];
                        if e != c(0.0, 0.0) {
                            trip.push((self.at(false, mi, gi, w), self.at(false, mi, gi, v), e));
                            trip.push((self.at(true, mi, gi, w), self.at(true, mi, gi, v), -e));
                        }
                    }
                    trip.push((self.at(false, mi, gi, v), self.at(true, mi, gi, v), dm));
                    trip.push((self.at(true, mi, gi, v), self.at(false, mi, gi, v), dp));
                }
            }
        }
        SpMat::from_triplets(self.dim(), self.dim(), trip)
    }
    fn labels(&self) -> Vec<String> {
        let mut out = vec![String::new(); self.dim()];
        for minus in [false, true] {
            for (mi, r) in self.modes.iter().enumerate() {
                for (gi, g) in self.ball.elements.iter().enumerate() {
                    for v in 0..2 {
                        let sg = if minus { '-' } else { '+' };
                        out[self.at(minus, mi, gi, v)] = format!("{sg}W({},{})|δ{g}|v{v}", r[0], r[1]);
                    }
                }
            }
        }
        out
    }
    /// Monomial action: column (m, ĝ) ↦ phase·(target mode, target ĝ).
    fn monomial_matrix(&self, f: impl Fn(usize, &GroupElement) -> Option<([i64; 2], GroupElement, C64)>) -> SpMat {
        let mut trip = Vec::new();
        for (gi, g) in self.ball.elements.iter().enumerate() {
            for mi in 0..self.p() {
                let Some((r, h, ph)) = f(mi, g) else { continue };
                let (Some(&ti), Some(hi)) = (self.index.get(&r), self.ball.position(&h)) else { continue };
                for minus in [false, true] {
                    for v in 0..2 {
                        trip.push((self.at(minus, ti, hi, v), self.at(minus, mi, gi, v), ph));
                    }
                }
            }
        }
        SpMat::from_triplets(self.dim(), self.dim(), trip)
    }
}

fn a_coordinate(cfg: &TorusConfig, r: [i64; 2]) -> [i64; 2] {
    cfg.lattice.mhat_apply(r).expect("coefficient lies in the fixed-point algebra")
}

/// Π(𝒲_{M^Tx}δ_ĵ): ι(𝒲_m)⊗δ_ĝ ↦ e^{−πiν}σ_Θ(M^T(x+𝒴), m) ι(𝒲_{m+M^T(x+𝒴)})⊗δ_{ĵ+ĝ}.
pub struct ExplicitCrossedRep {
    cfg: TorusConfig,
    layout: Layout,
}

impl Representation<TwistedElement<TorusElement>> for ExplicitCrossedRep {
    fn dim(&self) -> usize {
        self.layout.dim()
    }
    fn apply(&self, f: &TwistedElement<TorusElement>) -> SpMat {
        let cfg = &self.cfg;
        let grp = cfg.dual_group();
        let mut out = SpMat::zeros(self.dim(), self.dim());
        for (j, a) in &f.terms {
            for (r, alpha) in &a.terms {
                let x = a_coordinate(cfg, *r);
                let m = self.layout.monomial_matrix(|mi, g| {
                    let ny = nu_and_y(cfg, j, g, x).expect("integral 𝒴");
                    let shift = cfg.lattice.mt_apply(add(x, ny.y));
                    let mode = self.layout.modes[mi];
                    let ph = Phase::theta(-ny.nu_over_theta).mul(&w_product(shift, mode).0);
                    Some((add(mode, shift), grp.compose(j, g).expect("Ĝ"), alpha * ph.to_complex(cfg.theta)))
                });
                out = out.add(&m);
            }
        }
        out
    }
}

fn layout_interior(cfg: &TorusConfig, layout: &Layout, steps: &[[i64; 2]]) -> Vec<bool> {
    let mut out = vec![false; layout.dim()];
    let _ = cfg;
    for (mi, r) in layout.modes.iter().enumerate() {
        let inside = steps.iter().all(|s| layout.index.contains_key(&add(*r, *s)));
        for gi in 0..layout.nb() {
            for minus in [false, true] {
                for v in 0..2 {
                    out[layout.at(minus, mi, gi, v)] = inside;
                }
            }
        }
    }
    out
}

/// The odd crossed-product triple assembled from the explicit formulas on
/// (L²(A)⊗ℓ²(Ĝ)⊗ℂ²)⊕(same).
pub fn build_torus_crossed_triple(cfg: &TorusConfig) -> Result<TruncatedTriple<TwistedElement<TorusElement>>> {
    let layout = Layout::new(cfg.a_window(), cfg.dual_group())?;
    crate::linalg::check_cap(layout.dim())?;
    let steps: Vec<[i64; 2]> = [[1, 0], [0, 1], [-1, 0], [0, -1]].iter().map(|&n| cfg.lattice.mt_apply(n)).collect();
    Ok(TruncatedTriple {
        labels: layout.labels(),
        dirac: layout.dirac(cfg),
        interior: layout_interior(cfg, &layout, &steps),
        parity: Parity::Odd,
        split: None,
        trunc: TruncationSpec { radius: f64::INFINITY, mode_cutoff: 2.0 * PI * cfg.cutoff as f64 },
        rep: Arc::new(ExplicitCrossedRep { cfg: cfg.clone(), layout }),
    })
}

/// (π̂×L̂)(𝒲_{M^Tx}δ_ĵ): ι(𝒲_m)⊗δ_ĝ ↦ e^{−πi[⟨M^Tx,Θs(ĵ)⟩ + ⟨M^Tx+s(ĵ),Θm⟩]} ι(𝒲_{m+M^Tx+s(ĵ)})⊗δ_{ĵ+ĝ}.
pub struct ExplicitEquivariantRep {
    cfg: TorusConfig,
    layout: Layout,
}

impl Representation<TwistedElement<TorusElement>> for ExplicitEquivariantRep {
    fn dim(&self) -> usize {
        self.layout.dim()
    }
    fn apply(&self, f: &TwistedElement<TorusElement>) -> SpMat {
        let cfg = &self.cfg;
        let grp = cfg.dual_group();
        let mut out = SpMat::zeros(self.dim(), self.dim());
        for (j, a) in &f.terms {
            let sj = cfg.section(j);
            for (mtx, alpha) in &a.terms {
                let m = self.layout.monomial_matrix(|mi, g| {
                    let mode = self.layout.modes[mi];
                    let k = theta_form(*mtx, sj) + theta_form(add(*mtx, sj), mode);
                    let ph = Phase::theta(-k).to_complex(cfg.theta);
                    Some((add(add(mode, *mtx), sj), grp.compose(j, g).expect("Ĝ"), alpha * ph))
                });
                out = out.add(&m);
            }
        }
        out
    }
}

pub fn build_torus_equivariant_triple(cfg: &TorusConfig) -> Result<TruncatedTriple<TwistedElement<TorusElement>>> {
    let layout = Layout::new(cfg.window(), cfg.dual_group())?;
    crate::linalg::check_cap(layout.dim())?;
    let steps = [[1, 0], [0, 1], [-1, 0], [0, -1]];
    Ok(TruncatedTriple {
        labels: layout.labels(),
        dirac: layout.dirac(cfg),
        interior: layout_interior(cfg, &layout, &steps),
        parity: Parity::Odd,
        split: None,
        trunc: TruncationSpec { radius: f64::INFINITY, mode_cutoff: 2.0 * PI * cfg.cutoff as f64 },
        rep: Arc::new(ExplicitEquivariantRep { cfg: cfg.clone(), layout }),
    })
}

/// (π_B|_A, U) with U(ĝ) = π_B(𝒲_{s(ĝ)}), on a single or doubled copy of the window.
pub fn torus_covariant_pair(cfg: &TorusConfig, doubled: bool) -> CovariantPair<TorusElement> {
    let gns: Arc<dyn Representation<TorusElement>> = Arc::new(TorusGns::new(cfg.theta, cfg.window()));
    let rep: Arc<dyn Representation<TorusElement>> = if doubled { Arc::new(Doubled { inner: gns }) } else { gns };
    let lattice = cfg.lattice.clone();
    let r2 = rep.clone();
    CovariantPair { rep, unitary: Arc::new(move |g: &GroupElement| r2.apply(&TorusElement::w(lattice.section(g)))) }
}

/// The equivariant triple by the generic builder.
pub fn generic_equivariant_triple(cfg: &TorusConfig) -> Result<TruncatedTriple<TwistedElement<TorusElement>>> {
    let coeff = build_torus_b_triple(cfg);
    let l = TorusLength { lattice: cfg.lattice.clone() };
    equivariant_build(&coeff, torus_covariant_pair(cfg, true), cfg.dual_group(), &l, &Ball::whole(cfg.dual_group())?)
}

/// Monomials 𝒲_{M^Tx}δ_ĵ over the given x and every ĵ.
pub fn crossed_monomials(cfg: &TorusConfig, xs: &[[i64; 2]]) -> Result<Vec<TwistedElement<TorusElement>>> {
    let mut out = Vec::new();
    for j in cfg.dual_group().elements()? {
        for &x in xs {
            out.push(TwistedElement::monomial(j.clone(), TorusElement::w(cfg.lattice.mt_apply(x))));
        }
    }
    Ok(out)
}

pub const ORACLE_XS: [[i64; 2]; 7] = [[0, 0], [1, 0], [0, 1], [-1, 0], [0, -1], [1, 1], [1, -1]];

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub dim: usize,
    pub dirac_max_diff: f64,
    pub rep_max_diff: f64,
    pub monomials_checked: usize,
    pub columns_compared: usize,
    pub labels_match: bool,
}

impl OracleReport {
    pub fn pass(&self, tol: f64) -> bool {
        self.labels_match && self.dirac_max_diff <= tol && self.rep_max_diff <= tol
    }
}

fn compare<E>(a: &TruncatedTriple<E>, b: &TruncatedTriple<E>, elems: &[E], cols: Option<&[bool]>) -> Result<OracleReport> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidArgument(format!("dimensions differ: {} vs {}", a.dim(), b.dim())));
    }
    let dirac_max_diff = a.dirac.max_abs_diff(&b.dirac);
    let restrict = |m: SpMat| match cols {
        Some(k) => m.mask_cols(k),
        None => m,
    };
    let rep_max_diff = elems
        .iter()
        .map(|f| restrict(a.rep.apply(f)).max_abs_diff(&restrict(b.rep.apply(f))))
        .fold(0.0, f64::max);
    Ok(OracleReport {
        dim: a.dim(),
        dirac_max_diff,
        rep_max_diff,
        monomials_checked: elems.len(),
        columns_compared: cols.map_or(a.dim(), |k| k.iter().filter(|&&x| x).count()),
        labels_match: a.labels == b.labels,
    })
}

/// Explicit crossed-product matrices against the generic builder chain, entrywise.
pub fn crossed_oracle(cfg: &TorusConfig) -> Result<OracleReport> {
    let explicit = build_torus_crossed_triple(cfg)?;
    let generic = generic_crossed_triple(cfg)?;
    compare(&explicit, &generic, &crossed_monomials(cfg, &ORACLE_XS)?, None)
}

/// Explicit equivariant matrices against equivariant_build, entrywise. The
/// generic side multiplies the compressions π(a) and U(ĝ) separately, so the
/// representation is compared on columns whose U-step stays in the window.
pub fn equivariant_oracle(cfg: &TorusConfig) -> Result<OracleReport> {
    let explicit = build_torus_equivariant_triple(cfg)?;
    let generic = generic_equivariant_triple(cfg)?;
    let s_max = cfg.dual_group().elements()?.iter().map(|k| inf_norm(cfg.section(k))).max().unwrap_or(0);
    let layout = Layout::new(cfg.window(), cfg.dual_group())?;
    let mut cols = vec![false; layout.dim()];
    for (mi, r) in layout.modes.iter().enumerate() {
        for gi in 0..layout.nb() {
            for minus in [false, true] {
                for v in 0..2 {
                    cols[layout.at(minus, mi, gi, v)] = inf_norm(*r) + s_max <= cfg.cutoff;
                }
            }
        }
    }
    compare(&explicit, &generic, &crossed_monomials(cfg, &ORACLE_XS)?, Some(&cols))
}

/// W-intertwining for (π_B|_A, U) on the window of `cfg`, computed on a
/// window padded so that every operator in the check acts without loss on
/// the checked columns.
pub fn torus_intertwining(cfg: &TorusConfig) -> Result<IntertwiningReport> {
    let grp = cfg.dual_group();
    let ks = grp.elements()?;
    let s_max = ks.iter().map(|k| inf_norm(cfg.section(k))).max().unwrap_or(0);
    let samples = cfg.a_generators();
    let a_max = samples.iter().flat_map(|a| a.terms.keys()).map(|r| inf_norm(*r)).max().unwrap_or(0);
    let pad = a_max + 3 * s_max + 1;
    let big = cfg.with_cutoff(cfg.cutoff + pad)?;
    let cov = torus_covariant_pair(&big, false);
    let pair = frame_pair(&big)?;
    let ball = Ball::whole(grp)?;
    let modes = TorusGns::new(cfg.theta, big.window()).modes;
    let nb = ball.len();
    let mut mask = vec![false; modes.len() * nb];
    for (h, r) in modes.iter().enumerate() {
        for g in 0..nb {
            mask[tensor_index(h, g, 0, nb, 1)] = inf_norm(*r) <= cfg.cutoff;
        }
    }
    crate::triple::check_intertwining(&cov, &pair, &ball, &samples, &ks, &mask)
}

/// The covering action on the finite model B_R = ⊕_ĝ span{𝒲_{s(ĝ)+r} : r in the A-window},
/// which Φ maps A-window ⊗ ℓ²(Ĝ) onto.
pub struct TorusCovering {
    pub cfg: TorusConfig,
    index: HashMap<[i64; 2], usize>,
}

impl TorusCovering {
    pub fn new(cfg: &TorusConfig) -> Result<Self> {
        let mut modes = Vec::new();
        let a = cfg.a_window();
        for k in cfg.dual_group().elements()? {
            let s = cfg.section(&k);
            modes.extend(a.iter().map(|r| add(*r, s)));
        }
        let gns = TorusGns::new(cfg.theta, modes);
        Ok(TorusCovering { cfg: cfg.clone(), index: gns.index })
    }
}

impl Ambient<TorusAlgebra> for TorusCovering {
    fn covering_group(&self) -> &AbelianGroup {
        &self.cfg.lattice.group
    }
    fn gamma(&self, g: &GroupElement, b: &TorusElement) -> TorusElement {
        gamma_action(&self.cfg, g, b)
    }
    fn pairing(&self, j: &DualCharacter, g: &GroupElement) -> C64 {
        self.cfg.lattice.pairing_lattice(j, self.cfg.lattice.lift(g)).to_complex(self.cfg.theta)
    }
    fn vectorize(&self, b: &TorusElement) -> Vec<C64> {
        let mut v = vec![c(0.0, 0.0); self.index.len()];
        for (r, a) in &b.terms {
            if let Some(&i) = self.index.get(r) {
                v[i] = *a;
            }
        }
        v
    }
    fn dim_b(&self) -> usize {
        self.index.len()
    }
}

/// Summability rungs: the coefficient spectrum ±2π‖r‖ over the A-window and the
/// crossed spectrum by the Kronecker identity, both trusted below 2π·R.
pub fn torus_rungs(cfg: &TorusConfig, radii: &[i64]) -> Result<(Vec<Rung>, Vec<Rung>)> {
    let mut coeff_rungs = Vec::new();
    let mut crossed_rungs = Vec::new();
    let l = TorusLength { lattice: cfg.lattice.clone() };
    let ball = Ball::whole(cfg.dual_group())?;
    let lspec = crate::length::m_ell_spectrum(&l, &ball);
    for &r in radii {
        let c2 = cfg.with_cutoff(r)?;
        let valid = 2.0 * PI * r as f64;
        let spec: Vec<f64> = c2
            .a_window()
            .iter()
            .flat_map(|m| {
                let n = 2.0 * PI * ((m[0] * m[0] + m[1] * m[1]) as f64).sqrt();
                [n, -n]
            })
            .collect();
        crossed_rungs.push(Rung {
            radius: r as f64,
            mode_cutoff: valid,
            valid_below: valid,
            spectrum: crate::triple::kronecker_spectrum(&spec, &lspec),
        });
        coeff_rungs.push(Rung { radius: r as f64, mode_cutoff: valid, valid_below: valid, spectrum: spec });
    }
    Ok((coeff_rungs, crossed_rungs))
}

/// Regularity ladder for U(ĝ) against D_B: dense D_B and U(ĝ), ĝ ≠ 0, per cutoff.
pub fn torus_action_rungs(cfg: &TorusConfig, radii: &[i64]) -> Result<Vec<crate::regularity::ActionRung>> {
    let mut out = Vec::new();
    for &r in radii {
        let c2 = cfg.with_cutoff(r)?;
        let b = build_torus_b_triple(&c2);
        let cov = torus_covariant_pair(&c2, true);
        let unitaries = c2
            .dual_group()
            .elements()?
            .into_iter()
            .filter(|k| !k.is_zero())
            .map(|k| (format!("U{k}"), (cov.unitary)(&k).to_dense()))
            .collect();
        out.push(crate::regularity::ActionRung { dirac: b.dirac.to_dense(), unitaries });
    }
    Ok(out)
}
