//! Truncated spectral triples and the crossed-product constructions.

use crate::algebra::{expand_mask, induced_matrix, tensor_index, CovariantPair, TwistedElement};
use crate::coeff::{CoeffAlgebra, GroupAlgElem, LeftRegular, Representation};
use crate::error::{Error, Result};
use crate::groups::{AbelianGroup, Ball, GroupElement};
use crate::length::{m_ell_matrix, m_ell_spectrum, properness_check, LengthFunction};
use crate::linalg::{c, check_cap, eigvalsh, SpMat};
use crate::order::{AbscissaEstimate, AbscissaEstimator, EigenvalueSequence, LambdaSlope, MuSlope, TraceScan};
use crate::twist::{Elem, TwistingPair};
use serde::Serialize;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Parity {
    Odd,
    Even,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TruncationSpec {
    pub radius: f64,
    pub mode_cutoff: f64,
}

/// Finite-basis snapshot of a spectral triple. In the even case the first
/// `split` basis vectors span H⁺ and the grading is diag(1, −1).
#[derive(Clone)]
pub struct TruncatedTriple<E> {
    pub labels: Vec<String>,
    pub dirac: SpMat,
    pub rep: Arc<dyn Representation<E>>,
    pub parity: Parity,
    pub split: Option<usize>,
    pub trunc: TruncationSpec,
    /// Basis vectors away from the truncation boundary.
    pub interior: Vec<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TripleCheck {
    pub hermitian_residual: f64,
    pub grading_anticommutes: f64,
    pub grading_commutes_with_rep: f64,
}

impl TripleCheck {
    pub fn is_ok(&self, tol: f64) -> bool {
        self.hermitian_residual <= tol && self.grading_anticommutes <= tol && self.grading_commutes_with_rep <= tol
    }
}

fn off_diagonal_norm(m: &SpMat, p: usize) -> f64 {
    let mut s = 0.0;
    for (j, col) in m.cols.iter().enumerate() {
        for &(i, v) in col {
            if (i < p) != (j < p) {
                s += v.norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn diagonal_norm(m: &SpMat, p: usize) -> f64 {
    let mut s = 0.0;
    for (j, col) in m.cols.iter().enumerate() {
        for &(i, v) in col {
            if (i < p) == (j < p) {
                s += v.norm_sqr();
            }
        }
    }
    s.sqrt()
}

impl<E> TruncatedTriple<E> {
    pub fn dim(&self) -> usize {
        self.dirac.nrows
    }

    pub fn grading(&self) -> Option<SpMat> {
        let p = self.split?;
        let n = self.dim();
        Some(SpMat::from_triplets(n, n, (0..n).map(|i| (i, i, c(if i < p { 1.0 } else { -1.0 }, 0.0)))))
    }

    /// D Hermitian; for even triples χD = −Dχ and [χ, π(a)] = 0 on `samples`.
    pub fn check(&self, samples: &[E]) -> TripleCheck {
        let hermitian_residual = self.dirac.hermitian_residual();
        let (mut anti, mut comm) = (0.0, 0.0f64);
        if let Some(p) = self.split {
            anti = diagonal_norm(&self.dirac, p);
            for a in samples {
                comm = comm.max(off_diagonal_norm(&self.rep.apply(a), p));
            }
        }
        TripleCheck { hermitian_residual, grading_anticommutes: anti, grading_commutes_with_rep: comm }
    }

    pub fn spectrum(&self) -> Result<Vec<f64>> {
        check_cap(self.dim())?;
        eigvalsh(&self.dirac.to_dense())
    }

    /// [D, π(a)].
    pub fn commutator(&self, a: &E) -> SpMat {
        let p = self.rep.apply(a);
        self.dirac.matmul(&p).sub(&p.matmul(&self.dirac))
    }
}

/// Group elements all of whose neighbours (± standard generators, iterated
/// `depth` times) lie in the ball.
pub fn interior_elements(group: &AbelianGroup, ball: &Ball, depth: usize) -> Vec<bool> {
    if group.is_finite() {
        return vec![true; ball.len()];
    }
    let n = group.rank();
    ball.elements
        .iter()
        .map(|g| {
            let mut frontier = vec![g.clone()];
            for _ in 0..depth {
                let mut next = Vec::new();
                for x in &frontier {
                    for i in 0..n {
                        for s in [-1, 1] {
                            let mut y = x.coords.clone();
                            y[i] += s;
                            next.push(GroupElement::new(y));
                        }
                    }
                }
                if next.iter().any(|y| ball.position(y).is_none()) {
                    return false;
                }
                frontier = next;
            }
            true
        })
        .collect()
}

fn group_labels(h: usize, hname: &dyn Fn(usize) -> String, ball: &Ball, vdim: usize, prefix: &str) -> Vec<String> {
    let mut out = Vec::with_capacity(h * ball.len() * vdim);
    for i in 0..h {
        for g in &ball.elements {
            for v in 0..vdim {
                out.push(format!("{prefix}{}|δ{g}|v{v}", hname(i)));
            }
        }
    }
    out
}

/// (ℂG, ℓ²(G)⊗V, M_ℓ) compressed to a ball.
pub fn build_group_triple(l: Arc<dyn LengthFunction>, ball: &Ball) -> Result<TruncatedTriple<GroupAlgElem>> {
    if ball.is_empty() {
        return Err(Error::EmptyBall);
    }
    let proper = properness_check(l.as_ref(), ball);
    if !proper.zero_violations.is_empty() {
        return Err(Error::NotProper(format!("ℓ vanishes off the identity at {:?}", proper.zero_violations)));
    }
    let vdim = l.dim();
    check_cap(ball.len() * vdim)?;
    let group = l.group().clone();
    let labels = group_labels(1, &|_| String::new(), ball, vdim, "");
    let interior = expand_mask(&interior_elements(&group, ball, 1), 1, vdim);
    Ok(TruncatedTriple {
        labels,
        dirac: m_ell_matrix(l.as_ref(), ball),
        rep: Arc::new(LeftRegular { group, ball: ball.clone(), vdim }),
        parity: Parity::Odd,
        split: None,
        trunc: TruncationSpec { radius: ball.radius, mode_cutoff: f64::INFINITY },
        interior,
    })
}

/// Π ⊗ 1_V (optionally doubled) induced from a representation of A.
pub struct InducedRep<P: TwistingPair> {
    pub pair: Arc<P>,
    pub base: Arc<dyn Representation<Elem<P>>>,
    pub ball: Ball,
    pub vdim: usize,
    pub copies: usize,
}

impl<P: TwistingPair> Representation<TwistedElement<Elem<P>>> for InducedRep<P> {
    fn dim(&self) -> usize {
        self.base.dim() * self.ball.len() * self.vdim * self.copies
    }
    fn apply(&self, f: &TwistedElement<Elem<P>>) -> SpMat {
        let m = induced_matrix(self.pair.as_ref(), self.base.as_ref(), f, &self.ball, self.vdim)
            .expect("element of the pair's group")
            .matrix;
        if self.copies == 1 {
            m
        } else {
            SpMat::block_diag(&vec![&m; self.copies])
        }
    }
}

fn check_length_group<P: TwistingPair + ?Sized>(pair: &P, l: &dyn LengthFunction) -> Result<()> {
    if pair.group() != l.group() {
        return Err(Error::GroupMismatch);
    }
    Ok(())
}

/// D⊗1⊗1 and 1⊗M_ℓ on H⊗ℓ²(ball)⊗V.
fn dirac_pieces(d: &SpMat, l: &dyn LengthFunction, ball: &Ball) -> (SpMat, SpMat) {
    let k = ball.len() * l.dim();
    let x = d.kron(&SpMat::identity(k));
    let y = SpMat::identity(d.nrows).kron(&m_ell_matrix(l, ball));
    (x, y)
}

/// [[0, X − iY], [X + iY, 0]].
fn odd_to_even_dirac(x: &SpMat, y: &SpMat) -> SpMat {
    let n = x.nrows;
    let i = c(0.0, 1.0);
    let minus = x.lin_comb(c(1.0, 0.0), y, -i);
    let plus = x.lin_comb(c(1.0, 0.0), y, i);
    SpMat::blocks(&[n, n], &[n, n], &[(0, 1, &minus), (1, 0, &plus)])
}

fn doubled<T: Clone>(v: &[T]) -> Vec<T> {
    v.iter().chain(v.iter()).cloned().collect()
}

fn coeff_interior_mask<E>(coeff: &TruncatedTriple<E>, group_interior: &[bool], vdim: usize) -> Vec<bool> {
    let nb = group_interior.len();
    let mut out = vec![false; coeff.dim() * nb * vdim];
    for h in 0..coeff.dim() {
        for (g, &gi) in group_interior.iter().enumerate() {
            for v in 0..vdim {
                out[tensor_index(h, g, v, nb, vdim)] = gi && coeff.interior[h];
            }
        }
    }
    out
}

/// Odd coefficient triple ↦ even triple on (H⊗ℓ²(G)⊗V)^{⊕2} with Π⊕Π.
pub fn build_odd_to_even<P: TwistingPair + 'static>(
    coeff: &TruncatedTriple<Elem<P>>,
    pair: Arc<P>,
    l: &dyn LengthFunction,
    ball: &Ball,
) -> Result<TruncatedTriple<TwistedElement<Elem<P>>>> {
    if coeff.parity != Parity::Odd {
        return Err(Error::Parity("odd→even builder needs an odd coefficient triple".into()));
    }
    check_length_group(pair.as_ref(), l)?;
    if ball.is_empty() {
        return Err(Error::EmptyBall);
    }
    check_cap(2 * coeff.dim() * ball.len() * l.dim())?;
    let (x, y) = dirac_pieces(&coeff.dirac, l, ball);
    let dirac = odd_to_even_dirac(&x, &y);
    let vdim = l.dim();
    let labels_one = group_labels(coeff.dim(), &|i| coeff.labels[i].clone(), ball, vdim, "");
    let labels = labels_one.iter().map(|s| format!("+{s}")).chain(labels_one.iter().map(|s| format!("-{s}"))).collect();
    let interior = doubled(&coeff_interior_mask(coeff, &interior_elements(pair.group(), ball, 1), vdim));
    let n = x.nrows;
    Ok(TruncatedTriple {
        labels,
        dirac,
        rep: Arc::new(InducedRep { pair, base: coeff.rep.clone(), ball: ball.clone(), vdim, copies: 2 }),
        parity: Parity::Even,
        split: Some(n),
        trunc: TruncationSpec { radius: ball.radius, mode_cutoff: coeff.trunc.mode_cutoff },
        interior,
    })
}

/// [[1_{H⁺}⊗M_ℓ, D⁻⊗1⊗1], [D⁺⊗1⊗1, −1_{H⁻}⊗M_ℓ]].
fn even_to_odd_dirac(d: &SpMat, p: usize, l: &dyn LengthFunction, ball: &Ball) -> SpMat {
    let h = d.nrows;
    let k = ball.len() * l.dim();
    let m = m_ell_matrix(l, ball);
    let id_k = SpMat::identity(k);
    let d_minus = d.submatrix(0..p, p..h).kron(&id_k);
    let d_plus = d.submatrix(p..h, 0..p).kron(&id_k);
    let top = SpMat::identity(p).kron(&m);
    let bottom = SpMat::identity(h - p).kron(&m).scale(c(-1.0, 0.0));
    SpMat::blocks(&[p * k, (h - p) * k], &[p * k, (h - p) * k], &[(0, 0, &top), (0, 1, &d_minus), (1, 0, &d_plus), (1, 1, &bottom)])
}

/// Even coefficient triple ↦ odd triple on H⊗ℓ²(G)⊗V, representation induced
/// componentwise from π^±.
pub fn build_even_to_odd<P: TwistingPair + 'static>(
    coeff: &TruncatedTriple<Elem<P>>,
    pair: Arc<P>,
    l: &dyn LengthFunction,
    ball: &Ball,
) -> Result<TruncatedTriple<TwistedElement<Elem<P>>>> {
    let Some(p) = coeff.split.filter(|_| coeff.parity == Parity::Even) else {
        return Err(Error::Parity("even→odd builder needs an even coefficient triple".into()));
    };
    check_length_group(pair.as_ref(), l)?;
    if ball.is_empty() {
        return Err(Error::EmptyBall);
    }
    check_cap(coeff.dim() * ball.len() * l.dim())?;
    let vdim = l.dim();
    let dirac = even_to_odd_dirac(&coeff.dirac, p, l, ball);
    Ok(TruncatedTriple {
        labels: group_labels(coeff.dim(), &|i| coeff.labels[i].clone(), ball, vdim, ""),
        dirac,
        rep: Arc::new(InducedRep { pair: pair.clone(), base: coeff.rep.clone(), ball: ball.clone(), vdim, copies: 1 }),
        parity: Parity::Odd,
        split: None,
        trunc: TruncationSpec { radius: ball.radius, mode_cutoff: coeff.trunc.mode_cutoff },
        interior: coeff_interior_mask(coeff, &interior_elements(pair.group(), ball, 1), vdim),
    })
}

/// π₁(a)⊗π₂(b) on H₁⊗H₂, doubled.
pub struct ProductRep<E1, E2> {
    pub r1: Arc<dyn Representation<E1>>,
    pub r2: Arc<dyn Representation<E2>>,
}

impl<E1, E2> Representation<(E1, E2)> for ProductRep<E1, E2> {
    fn dim(&self) -> usize {
        2 * self.r1.dim() * self.r2.dim()
    }
    fn apply(&self, a: &(E1, E2)) -> SpMat {
        let m = self.r1.apply(&a.0).kron(&self.r2.apply(&a.1));
        SpMat::block_diag(&[&m, &m])
    }
}

/// Exterior product of two odd triples:
/// [[0, D₁⊗1 − i1⊗D₂], [D₁⊗1 + i1⊗D₂, 0]].
pub fn exterior_product<E1: 'static, E2: 'static>(
    t1: &TruncatedTriple<E1>,
    t2: &TruncatedTriple<E2>,
) -> Result<TruncatedTriple<(E1, E2)>> {
    if t1.parity != Parity::Odd || t2.parity != Parity::Odd {
        return Err(Error::Parity("exterior product implemented for odd × odd".into()));
    }
    check_cap(2 * t1.dim() * t2.dim())?;
    let x = t1.dirac.kron(&SpMat::identity(t2.dim()));
    let y = SpMat::identity(t1.dim()).kron(&t2.dirac);
    let dirac = odd_to_even_dirac(&x, &y);
    let mut labels_one = Vec::with_capacity(t1.dim() * t2.dim());
    let mut mask_one = Vec::with_capacity(t1.dim() * t2.dim());
    for i in 0..t1.dim() {
        for j in 0..t2.dim() {
            labels_one.push(format!("{}⊗{}", t1.labels[i], t2.labels[j]));
            mask_one.push(t1.interior[i] && t2.interior[j]);
        }
    }
    let n = x.nrows;
    Ok(TruncatedTriple {
        labels: labels_one.iter().map(|s| format!("+{s}")).chain(labels_one.iter().map(|s| format!("-{s}"))).collect(),
        dirac,
        rep: Arc::new(ProductRep { r1: t1.rep.clone(), r2: t2.rep.clone() }),
        parity: Parity::Even,
        split: Some(n),
        trunc: TruncationSpec { radius: t1.trunc.radius.min(t2.trunc.radius), mode_cutoff: t1.trunc.mode_cutoff.min(t2.trunc.mode_cutoff) },
        interior: doubled(&mask_one),
    })
}

/// `π(a_h)U_hξ⊗δ_{hx}⊗v`, optionally doubled.
pub struct EquivariantRep<E> {
    pub cov: CovariantPair<E>,
    pub group: AbelianGroup,
    pub ball: Ball,
    pub vdim: usize,
    pub copies: usize,
}

impl<E: Clone> Representation<TwistedElement<E>> for EquivariantRep<E> {
    fn dim(&self) -> usize {
        self.cov.dim() * self.ball.len() * self.vdim * self.copies
    }
    fn apply(&self, f: &TwistedElement<E>) -> SpMat {
        let h = self.cov.dim();
        let nb = self.ball.len();
        let dv = self.vdim;
        let n = h * nb * dv;
        let mut trip = Vec::new();
        for (x, a) in &f.terms {
            let block = self.cov.rep.apply(a).matmul(&(self.cov.unitary)(x));
            for (yi, y) in self.ball.elements.iter().enumerate() {
                let z = self.group.compose(x, y).expect("group element");
                let Some(zi) = self.ball.position(&z) else { continue };
                for (j, col) in block.cols.iter().enumerate() {
                    for &(i, v) in col {
                        for k in 0..dv {
                            trip.push((tensor_index(i, zi, k, nb, dv), tensor_index(j, yi, k, nb, dv), v));
                        }
                    }
                }
            }
        }
        let m = SpMat::from_triplets(n, n, trip);
        if self.copies == 1 {
            m
        } else {
            SpMat::block_diag(&vec![&m; self.copies])
        }
    }
}

/// Equivariant construction from a covariant pair on the coefficient space.
/// Odd coefficients give the even triple with the odd→even Dirac operator;
/// even coefficients give the odd triple with the even→odd one.
pub fn equivariant_build<E: Clone + Send + Sync + 'static>(
    coeff: &TruncatedTriple<E>,
    cov: CovariantPair<E>,
    group: &AbelianGroup,
    l: &dyn LengthFunction,
    ball: &Ball,
) -> Result<TruncatedTriple<TwistedElement<E>>> {
    if group != l.group() {
        return Err(Error::GroupMismatch);
    }
    if cov.dim() != coeff.dim() {
        return Err(Error::InvalidArgument("covariant pair and coefficient triple act on different spaces".into()));
    }
    let vdim = l.dim();
    check_cap(2 * coeff.dim() * ball.len() * vdim)?;
    let gi = interior_elements(group, ball, 1);
    let labels_one = group_labels(coeff.dim(), &|i| coeff.labels[i].clone(), ball, vdim, "");
    let mask_one = coeff_interior_mask(coeff, &gi, vdim);
    let trunc = TruncationSpec { radius: ball.radius, mode_cutoff: coeff.trunc.mode_cutoff };
    match coeff.parity {
        Parity::Odd => {
            let (x, y) = dirac_pieces(&coeff.dirac, l, ball);
            let n = x.nrows;
            Ok(TruncatedTriple {
                labels: labels_one.iter().map(|s| format!("+{s}")).chain(labels_one.iter().map(|s| format!("-{s}"))).collect(),
                dirac: odd_to_even_dirac(&x, &y),
                rep: Arc::new(EquivariantRep { cov, group: group.clone(), ball: ball.clone(), vdim, copies: 2 }),
                parity: Parity::Even,
                split: Some(n),
                trunc,
                interior: doubled(&mask_one),
            })
        }
        Parity::Even => {
            let p = coeff.split.ok_or_else(|| Error::Parity("even triple without grading".into()))?;
            Ok(TruncatedTriple {
                labels: labels_one,
                dirac: even_to_odd_dirac(&coeff.dirac, p, l, ball),
                rep: Arc::new(EquivariantRep { cov, group: group.clone(), ball: ball.clone(), vdim, copies: 1 }),
                parity: Parity::Odd,
                split: None,
                trunc,
                interior: mask_one,
            })
        }
    }
}

/// The block-diagonal pieces V_g = π(σ*_{g,g⁻¹})U_g of W.
pub fn w_blocks<P: TwistingPair + ?Sized>(cov: &CovariantPair<Elem<P>>, pair: &P, ball: &Ball) -> Result<Vec<SpMat>> {
    let g = pair.group();
    let alg = pair.algebra();
    ball.elements
        .iter()
        .map(|x| {
            let xi = g.inverse(x)?;
            Ok(cov.rep.apply(&alg.adjoint(&pair.sigma(x, &xi))).matmul(&(cov.unitary)(x)))
        })
        .collect()
}

/// W(ξ⊗δ_g⊗v) = π(σ*_{g,g⁻¹})U_gξ⊗δ_g⊗v.
pub fn conjugator_w<P: TwistingPair + ?Sized>(
    cov: &CovariantPair<Elem<P>>,
    pair: &P,
    ball: &Ball,
    vdim: usize,
) -> Result<SpMat> {
    let blocks = w_blocks(cov, pair, ball)?;
    let h = cov.dim();
    let nb = ball.len();
    let mut trip = Vec::new();
    for (gi, b) in blocks.iter().enumerate() {
        for (j, col) in b.cols.iter().enumerate() {
            for &(i, v) in col {
                for k in 0..vdim {
                    trip.push((tensor_index(i, gi, k, nb, vdim), tensor_index(j, gi, k, nb, vdim), v));
                }
            }
        }
    }
    Ok(SpMat::from_triplets(h * nb * vdim, h * nb * vdim, trip))
}

#[derive(Clone, Debug, Serialize)]
pub struct IntertwiningReport {
    pub w_unitarity: f64,
    pub rep_residual: f64,
    pub translation_residual: f64,
}

impl IntertwiningReport {
    pub fn is_ok(&self, tol: f64) -> bool {
        self.rep_residual <= tol && self.translation_residual <= tol
    }
}

/// Residuals of Wπ̃(a) = π̂(a)W and WL̃_h = L̂_hW on the columns in `mask`
/// (basis of H⊗ℓ²(ball)), which is the intertwining WXW* = Y on interior
/// vectors since W is block diagonal.
pub fn check_intertwining<P: TwistingPair + ?Sized>(
    cov: &CovariantPair<Elem<P>>,
    pair: &P,
    ball: &Ball,
    samples: &[Elem<P>],
    translations: &[GroupElement],
    mask: &[bool],
) -> Result<IntertwiningReport> {
    let w = conjugator_w(cov, pair, ball, 1)?;
    let n = w.nrows;
    let w_unitarity = w.adjoint().matmul(&w).sub(&SpMat::identity(n)).mask_cols(mask).fro_norm();
    let group = pair.group();
    let h = cov.dim();
    let nb = ball.len();
    let mut rep_residual = 0.0f64;
    for a in samples {
        let tilde = induced_matrix(pair, cov.rep.as_ref(), &TwistedElement::monomial(group.identity(), a.clone()), ball, 1)?.matrix;
        let hat = cov.rep.apply(a).kron(&SpMat::identity(nb));
        let r = w.matmul(&tilde).sub(&hat.matmul(&w)).mask_cols(mask).fro_norm();
        rep_residual = rep_residual.max(r);
    }
    let mut translation_residual = 0.0f64;
    for x in translations {
        let tilde = induced_matrix(pair, cov.rep.as_ref(), &TwistedElement::monomial(x.clone(), pair.algebra().one()), ball, 1)?.matrix;
        let ux = (cov.unitary)(x);
        let mut trip = Vec::new();
        for (yi, y) in ball.elements.iter().enumerate() {
            let Some(zi) = ball.position(&group.compose(x, y)?) else { continue };
            for (j, col) in ux.cols.iter().enumerate() {
                for &(i, v) in col {
                    trip.push((tensor_index(i, zi, 0, nb, 1), tensor_index(j, yi, 0, nb, 1), v));
                }
            }
        }
        let hat = SpMat::from_triplets(h * nb, h * nb, trip);
        let r = w.matmul(&tilde).sub(&hat.matmul(&w)).mask_cols(mask).fro_norm();
        translation_residual = translation_residual.max(r);
    }
    Ok(IntertwiningReport { w_unitarity, rep_residual, translation_residual })
}

#[derive(Clone, Debug, Serialize)]
pub struct PerturbationGap {
    /// ‖WD̃W* − D̃‖ = sup_g ‖[D, V_g]‖ on the masked columns.
    pub gap: f64,
    pub sup_commutator_u: f64,
    pub sup_commutator_sigma: f64,
    pub bounded_perturbation_evidence: bool,
}

/// W commutes with 1⊗M_ℓ, so WD̃W* − D̃ reduces to the blocks [D, V_g].
pub fn perturbation_gap<P: TwistingPair + ?Sized>(
    cov: &CovariantPair<Elem<P>>,
    pair: &P,
    dirac: &SpMat,
    ball: &Ball,
    mask: Option<&[bool]>,
) -> Result<PerturbationGap> {
    let group = pair.group();
    let comm = |m: &SpMat| -> f64 {
        let c = dirac.matmul(m).sub(&m.matmul(dirac));
        match mask {
            Some(k) => c.mask_cols(k).op_norm(),
            None => c.op_norm(),
        }
    };
    let mut gap = 0.0f64;
    let mut su = 0.0f64;
    let mut ss = 0.0f64;
    for (x, v) in ball.elements.iter().zip(w_blocks(cov, pair, ball)?) {
        gap = gap.max(comm(&v));
        su = su.max(comm(&(cov.unitary)(x)));
        let xi = group.inverse(x)?;
        ss = ss.max(comm(&cov.rep.apply(&pair.sigma(x, &xi))));
    }
    Ok(PerturbationGap {
        gap,
        sup_commutator_u: su,
        sup_commutator_sigma: ss,
        bounded_perturbation_evidence: gap <= su + ss + 1e-9 * (1.0 + su + ss),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EquicontinuityRow {
    pub radius: f64,
    pub sup: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquicontinuityReport {
    pub rows: Vec<EquicontinuityRow>,
    pub plateau: bool,
}

/// sup_{x∈B_R} ‖[D, π(ρ_x(a)σ_{x,y})]‖ per ball, columns restricted to the
/// coefficient interior.
pub fn equicontinuity_sweep<P: TwistingPair + ?Sized>(
    coeff: &TruncatedTriple<Elem<P>>,
    pair: &P,
    a: &Elem<P>,
    y: &GroupElement,
    balls: &[Ball],
) -> Result<EquicontinuityReport> {
    let alg = pair.algebra();
    let mut rows = Vec::new();
    let mut running = 0.0f64;
    for b in balls {
        for x in &b.elements {
            let e = alg.mul(&pair.rho(x, a), &pair.sigma(x, y));
            let cm = coeff.commutator(&e).mask_cols(&coeff.interior);
            running = running.max(cm.op_norm());
        }
        rows.push(EquicontinuityRow { radius: b.radius, sup: running });
    }
    let plateau = pair.group().is_finite()
        || rows.len() >= 2 && {
            let (p, q) = (rows[rows.len() - 2].sup, rows[rows.len() - 1].sup);
            (q - p).abs() <= 0.01 * q.max(1e-300)
        };
    Ok(EquicontinuityReport { rows, plateau })
}

/// Dimension of {c : [Σcᵢπ(aᵢ), [D,π(aⱼ)]] = 0 ∀j} on interior columns;
/// 1 means only multiples of the unit (when a₀ is the unit).
pub fn commutant_dimension<E>(triple: &TruncatedTriple<E>, span: &[E], tol: f64) -> Result<usize> {
    let reps: Vec<SpMat> = span.iter().map(|a| triple.rep.apply(a)).collect();
    let comms: Vec<SpMat> = span.iter().map(|a| triple.commutator(a)).collect();
    let k = span.len();
    let mut pieces: Vec<Vec<SpMat>> = Vec::with_capacity(k);
    for r in &reps {
        pieces.push(comms.iter().map(|cm| r.matmul(cm).sub(&cm.matmul(r)).mask_cols(&triple.interior)).collect());
    }
    let mut gram = crate::linalg::CMat::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let mut s = c(0.0, 0.0);
            for (a, b) in pieces[i].iter().zip(&pieces[j]) {
                for (ca, cb) in a.cols.iter().zip(&b.cols) {
                    let mut q = 0;
                    for &(r, v) in ca {
                        while q < cb.len() && cb[q].0 < r {
                            q += 1;
                        }
                        if q < cb.len() && cb[q].0 == r {
                            s += v.conj() * cb[q].1;
                        }
                    }
                }
            }
            gram[(i, j)] = s;
        }
    }
    let ev = eigvalsh(&gram)?;
    let top = ev.iter().cloned().fold(0.0f64, f64::max).max(1e-300);
    Ok(ev.iter().filter(|&&v| v <= tol * top).count())
}

/// Per-element ‖[D, π(a)]‖ on interior columns.
pub fn commutator_norms<E>(triple: &TruncatedTriple<E>, elems: &[E]) -> Vec<f64> {
    elems.iter().map(|a| triple.commutator(a).mask_cols(&triple.interior).op_norm()).collect()
}

/// ±√(ν² + μ²) over pairs of coefficient eigenvalues ν and length eigenvalues μ.
pub fn kronecker_spectrum(coeff: &[f64], length: &[f64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(2 * coeff.len() * length.len());
    for &a in coeff {
        for &b in length {
            let r = (a * a + b * b).sqrt();
            v.push(r);
            v.push(-r);
        }
    }
    v.sort_by(f64::total_cmp);
    v
}

#[derive(Clone, Debug, Serialize)]
pub struct SandwichRow {
    pub t: f64,
    pub lower: u64,
    pub middle: u64,
    pub upper: u64,
}

/// N_{t/√2}(√(1+M²))·N_{t/√2}(√(1+D²)) ≤ N_t(√(1+M²+D²)) ≤ N_t(√(1+M²))·N_t(√(1+D²)),
/// with N_t counting eigenvalues strictly below t; comparisons are made on
/// squares.
pub fn counting_sandwich(coeff: &[f64], length: &[f64], ts: &[f64]) -> (Vec<SandwichRow>, bool) {
    let below = |v: &[f64], t2: f64| v.iter().filter(|x| 1.0 + *x * *x < t2).count() as u64;
    let mut rows = Vec::new();
    let mut ok = true;
    for &t in ts {
        let t2 = t * t;
        let lower = below(length, t2 / 2.0) * below(coeff, t2 / 2.0);
        let upper = below(length, t2) * below(coeff, t2);
        let mut middle = 0u64;
        for a in coeff {
            for b in length {
                if 1.0 + a * a + b * b < t2 {
                    middle += 1;
                }
            }
        }
        ok &= lower <= middle && middle <= upper;
        rows.push(SandwichRow { t, lower, middle, upper });
    }
    (rows, ok)
}

#[derive(Clone, Debug, Serialize)]
pub struct Rung {
    pub radius: f64,
    pub mode_cutoff: f64,
    /// Eigenvalues below this magnitude coincide with those of the full operator.
    pub valid_below: f64,
    pub spectrum: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RungEstimate {
    pub radius: f64,
    pub modes_used: usize,
    pub estimates: Vec<AbscissaEstimate>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SummabilityReport {
    pub rungs: Vec<RungEstimate>,
    /// Primary (λ-slope) estimate at the top rung.
    pub estimate: f64,
    pub coefficient_abscissa: f64,
    pub growth: f64,
    pub bound: f64,
    pub slack: f64,
    pub bound_holds: bool,
}

pub fn summability_report(rungs: &[Rung], coefficient_abscissa: f64, growth: f64, slack: f64) -> Result<SummabilityReport> {
    if rungs.len() < 3 {
        return Err(Error::LadderTooShort(rungs.len()));
    }
    let mut out = Vec::new();
    for r in rungs {
        let window: Vec<f64> = r.spectrum.iter().cloned().filter(|x| x.abs() <= r.valid_below).collect();
        let seq = EigenvalueSequence::from_dirac_spectrum(&window);
        let mut estimates = vec![LambdaSlope { grid: 64 }.estimate(&seq)?];
        if seq.len() >= 100 {
            estimates.push(MuSlope.estimate(&seq)?);
        }
        estimates.push(TraceScan::default().estimate(&seq)?);
        out.push(RungEstimate { radius: r.radius, modes_used: window.len(), estimates });
    }
    let estimate = out.last().unwrap().estimates[0].value;
    let bound = coefficient_abscissa + growth;
    Ok(SummabilityReport {
        rungs: out,
        estimate,
        coefficient_abscissa,
        growth,
        bound,
        slack,
        bound_holds: estimate <= bound + slack,
    })
}

/// Spectrum rung of the odd→even (or exterior) triple via the Kronecker
/// identity D̃² = (D²⊗1 + 1⊗M_ℓ²) ⊕ (same).
pub fn kronecker_rung(coeff: &[f64], l: &dyn LengthFunction, ball: &Ball, mode_cutoff: f64) -> Rung {
    let kept: Vec<f64> = coeff.iter().cloned().filter(|x| x.abs() <= mode_cutoff).collect();
    let lspec = m_ell_spectrum(l, ball);
    Rung {
        radius: ball.radius,
        mode_cutoff,
        valid_below: ball.radius.min(mode_cutoff),
        spectrum: kronecker_spectrum(&kept, &lspec),
    }
}
