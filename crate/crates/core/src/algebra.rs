//! The twisted convolution algebra C_c(G,A), its regular and covariant
//! representations at truncation.

use crate::coeff::{CoeffAlgebra, Representation};
use crate::error::{Error, Result};
use crate::groups::{Ball, GroupElement};
use crate::linalg::{c, CMat, SpMat};
use crate::twist::{Elem, TwistingPair, Violation};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq)]
pub struct TwistedElement<E> {
    pub terms: BTreeMap<GroupElement, E>,
}

impl<E: Clone> TwistedElement<E> {
    pub fn zero() -> Self {
        TwistedElement { terms: BTreeMap::new() }
    }

    pub fn monomial(g: GroupElement, a: E) -> Self {
        TwistedElement { terms: BTreeMap::from([(g, a)]) }
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.terms.keys()
    }
}

fn check_support<P: TwistingPair + ?Sized>(pair: &P, f: &TwistedElement<Elem<P>>) -> Result<()> {
    if f.terms.keys().all(|g| pair.group().contains(g)) {
        Ok(())
    } else {
        Err(Error::GroupMismatch)
    }
}

fn accumulate<P: TwistingPair + ?Sized>(
    pair: &P,
    out: &mut BTreeMap<GroupElement, Elem<P>>,
    g: GroupElement,
    a: Elem<P>,
) {
    let alg = pair.algebra();
    match out.get_mut(&g) {
        Some(v) => *v = alg.add(v, &a),
        None => {
            out.insert(g, a);
        }
    }
}

fn prune<P: TwistingPair + ?Sized>(pair: &P, mut terms: BTreeMap<GroupElement, Elem<P>>) -> TwistedElement<Elem<P>> {
    terms.retain(|_, v| !pair.algebra().is_zero(v));
    TwistedElement { terms }
}

pub fn unit<P: TwistingPair + ?Sized>(pair: &P) -> TwistedElement<Elem<P>> {
    TwistedElement::monomial(pair.group().identity(), pair.algebra().one())
}

pub fn add<P: TwistingPair + ?Sized>(
    pair: &P,
    f: &TwistedElement<Elem<P>>,
    g: &TwistedElement<Elem<P>>,
) -> TwistedElement<Elem<P>> {
    let mut out = f.terms.clone();
    for (x, a) in &g.terms {
        accumulate(pair, &mut out, x.clone(), a.clone());
    }
    prune(pair, out)
}

/// `(aδ_x)⋆(bδ_y) = aρ_x(b)σ_{x,y}δ_{xy}`, extended bilinearly.
pub fn star_product<P: TwistingPair + ?Sized>(
    pair: &P,
    f: &TwistedElement<Elem<P>>,
    g: &TwistedElement<Elem<P>>,
) -> Result<TwistedElement<Elem<P>>> {
    check_support(pair, f)?;
    check_support(pair, g)?;
    let alg = pair.algebra();
    let mut out = BTreeMap::new();
    for (x, a) in &f.terms {
        for (y, b) in &g.terms {
            let xy = pair.group().compose(x, y)?;
            let v = alg.mul3(a, &pair.rho(x, b), &pair.sigma(x, y));
            accumulate(pair, &mut out, xy, v);
        }
    }
    Ok(prune(pair, out))
}

/// `(aδ_x)* = σ*_{x⁻¹,x}ρ_{x⁻¹}(a*)δ_{x⁻¹}`.
pub fn involution<P: TwistingPair + ?Sized>(
    pair: &P,
    f: &TwistedElement<Elem<P>>,
) -> Result<TwistedElement<Elem<P>>> {
    check_support(pair, f)?;
    let alg = pair.algebra();
    let mut out = BTreeMap::new();
    for (x, a) in &f.terms {
        let xi = pair.group().inverse(x)?;
        let v = alg.mul(&alg.adjoint(&pair.sigma(&xi, x)), &pair.rho(&xi, &alg.adjoint(a)));
        accumulate(pair, &mut out, xi, v);
    }
    Ok(prune(pair, out))
}

/// √Σ‖f(x) − g(x)‖², zero exactly when all coefficients agree.
pub fn distance<P: TwistingPair + ?Sized>(
    pair: &P,
    f: &TwistedElement<Elem<P>>,
    g: &TwistedElement<Elem<P>>,
) -> f64 {
    let alg = pair.algebra();
    let zero = alg.zero();
    let mut keys: Vec<&GroupElement> = f.terms.keys().chain(g.terms.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.iter()
        .map(|k| {
            let a = f.terms.get(*k).unwrap_or(&zero);
            let b = g.terms.get(*k).unwrap_or(&zero);
            alg.distance(a, b).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

/// Compressed operator with the ball elements whose images leave the ball.
#[derive(Clone, Debug)]
pub struct RegularMatrix {
    pub matrix: SpMat,
    /// Per ball element: true when some translate by supp(f) leaves the ball.
    pub boundary: Vec<bool>,
}

/// Basis index of `ξ_h ⊗ δ_g ⊗ v_k` in H⊗ℓ²(ball)⊗V.
pub fn tensor_index(h: usize, g: usize, k: usize, nb: usize, dv: usize) -> usize {
    (h * nb + g) * dv + k
}

/// Induced (left regular) representation amplified by ℂ^{vdim}:
/// `Π(aδ_x)(ξ⊗δ_y⊗v) = π(ρ_{(xy)⁻¹}(a)σ_{(xy)⁻¹,x})ξ⊗δ_{xy}⊗v`.
pub fn induced_matrix<P: TwistingPair + ?Sized>(
    pair: &P,
    rep: &dyn Representation<Elem<P>>,
    f: &TwistedElement<Elem<P>>,
    ball: &Ball,
    vdim: usize,
) -> Result<RegularMatrix> {
    if ball.is_empty() {
        return Err(Error::EmptyBall);
    }
    check_support(pair, f)?;
    let g = pair.group();
    let alg = pair.algebra();
    let nb = ball.len();
    let h = rep.dim();
    let n = h * nb * vdim;
    let mut boundary = vec![false; nb];
    let mut trip = Vec::new();
    for (x, a) in &f.terms {
        for (yi, y) in ball.elements.iter().enumerate() {
            let z = g.compose(x, y)?;
            let Some(zi) = ball.position(&z) else {
                boundary[yi] = true;
                continue;
            };
            let zinv = g.inverse(&z)?;
            let b = alg.mul(&pair.rho(&zinv, a), &pair.sigma(&zinv, x));
            let p = rep.apply(&b);
            for (j, col) in p.cols.iter().enumerate() {
                for &(i, v) in col {
                    for k in 0..vdim {
                        trip.push((tensor_index(i, zi, k, nb, vdim), tensor_index(j, yi, k, nb, vdim), v));
                    }
                }
            }
        }
    }
    Ok(RegularMatrix { matrix: SpMat::from_triplets(n, n, trip), boundary })
}

pub fn left_regular_matrix<P: TwistingPair + ?Sized>(
    pair: &P,
    rep: &dyn Representation<Elem<P>>,
    f: &TwistedElement<Elem<P>>,
    ball: &Ball,
) -> Result<RegularMatrix> {
    induced_matrix(pair, rep, f, ball, 1)
}

/// Expands a per-group-element mask to basis vectors of H⊗ℓ²(ball)⊗V.
pub fn expand_mask(per_group: &[bool], h: usize, vdim: usize) -> Vec<bool> {
    let nb = per_group.len();
    let mut out = vec![false; h * nb * vdim];
    for i in 0..h {
        for (g, &m) in per_group.iter().enumerate() {
            for k in 0..vdim {
                out[tensor_index(i, g, k, nb, vdim)] = m;
            }
        }
    }
    out
}

pub type UnitaryMap = Arc<dyn Fn(&GroupElement) -> SpMat + Send + Sync>;

/// (π, U) on a common Hilbert space.
#[derive(Clone)]
pub struct CovariantPair<E> {
    pub rep: Arc<dyn Representation<E>>,
    pub unitary: UnitaryMap,
}

impl<E> CovariantPair<E> {
    pub fn dim(&self) -> usize {
        self.rep.dim()
    }
}

/// `Σ π(a_x)U_x`.
pub fn integrated_form<E: Clone>(cov: &CovariantPair<E>, f: &TwistedElement<E>) -> SpMat {
    let n = cov.dim();
    let mut out = SpMat::zeros(n, n);
    for (x, a) in &f.terms {
        out = out.add(&cov.rep.apply(a).matmul(&(cov.unitary)(x)));
    }
    out
}

/// As [`integrated_form`], first checking `U_xU_y = π(σ_{x,y})U_{xy}` on the
/// support of f (columns restricted by `mask`).
pub fn integrated_form_checked<P: TwistingPair + ?Sized>(
    cov: &CovariantPair<Elem<P>>,
    pair: &P,
    f: &TwistedElement<Elem<P>>,
    mask: Option<&[bool]>,
    tol: f64,
) -> Result<SpMat> {
    let supp: Vec<GroupElement> = f.terms.keys().cloned().collect();
    let rep = verify_covariant(cov, pair, &supp, &[], mask, tol)?;
    if let Some(v) = rep.violations.first() {
        return Err(Error::Covariance(format!("{} at {:?}: {:e}", v.axiom, v.elements, v.residual)));
    }
    Ok(integrated_form(cov, f))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CovarianceReport {
    pub checked: usize,
    pub violations: Vec<Violation>,
    pub worst: f64,
}

impl CovarianceReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn masked(m: &SpMat, mask: Option<&[bool]>) -> f64 {
    match mask {
        Some(k) => m.mask_cols(k).fro_norm(),
        None => m.fro_norm(),
    }
}

/// Checks U_e = 1, U_xU_y = π(σ_{x,y})U_{xy} and π(ρ_x(a))U_x = U_xπ(a).
pub fn verify_covariant<P: TwistingPair + ?Sized>(
    cov: &CovariantPair<Elem<P>>,
    pair: &P,
    elements: &[GroupElement],
    samples: &[Elem<P>],
    mask: Option<&[bool]>,
    tol: f64,
) -> Result<CovarianceReport> {
    let g = pair.group();
    let mut rep = CovarianceReport::default();
    let record = |rep: &mut CovarianceReport, axiom: &str, els: Vec<GroupElement>, r: f64| {
        rep.checked += 1;
        rep.worst = rep.worst.max(r);
        if r > tol {
            rep.violations.push(Violation { axiom: axiom.into(), elements: els, residual: r });
        }
    };
    let e = g.identity();
    let id = SpMat::identity(cov.dim());
    record(&mut rep, "unit", vec![e.clone()], masked(&(cov.unitary)(&e).sub(&id), mask));
    for x in elements {
        let ux = (cov.unitary)(x);
        for y in elements {
            let xy = g.compose(x, y)?;
            let lhs = ux.matmul(&(cov.unitary)(y));
            let rhs = cov.rep.apply(&pair.sigma(x, y)).matmul(&(cov.unitary)(&xy));
            record(&mut rep, "multiplier", vec![x.clone(), y.clone()], masked(&lhs.sub(&rhs), mask));
        }
        for a in samples {
            let lhs = cov.rep.apply(&pair.rho(x, a)).matmul(&ux);
            let rhs = ux.matmul(&cov.rep.apply(a));
            record(&mut rep, "equivariance", vec![x.clone()], masked(&lhs.sub(&rhs), mask));
        }
    }
    Ok(rep)
}

#[derive(Serialize, Deserialize)]
struct CoeffRecord {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    group_element: Vec<i64>,
    coefficient: CoeffRecord,
}

impl TwistedElement<CMat> {
    pub fn to_json(&self) -> Result<String> {
        let recs: Vec<TermRecord> = self
            .terms
            .iter()
            .map(|(g, a)| TermRecord {
                group_element: g.coords.clone(),
                coefficient: CoeffRecord {
                    rows: a.nrows(),
                    cols: a.ncols(),
                    data: (0..a.nrows()).flat_map(|i| (0..a.ncols()).map(move |j| (i, j))).map(|(i, j)| [a[(i, j)].re, a[(i, j)].im]).collect(),
                },
            })
            .collect();
        Ok(serde_json::to_string(&recs)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let recs: Vec<TermRecord> = serde_json::from_str(s)?;
        let mut terms = BTreeMap::new();
        for r in recs {
            let k = &r.coefficient;
            if k.data.len() != k.rows * k.cols {
                return Err(Error::InvalidSpec("coefficient data length".into()));
            }
            let m = CMat::from_fn(k.rows, k.cols, |i, j| {
                let [re, im] = k.data[i * k.cols + j];
                c(re, im)
            });
            terms.insert(GroupElement::new(r.group_element), m);
        }
        Ok(TwistedElement { terms })
    }
}
