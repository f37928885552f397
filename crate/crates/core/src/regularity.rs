//! Regularity diagnostics: δ = [|D|,·], Sobolev order probes, GDO words.

use crate::error::{Error, Result};
use crate::groups::{Ball, GroupElement};
use crate::length::LengthFunction;
use crate::linalg::{abs_h, c, eigh, op_norm, random_hermitian, CMat, Eigen, SpMat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

pub const KMAX_CAP: usize = 3;
pub const DEFAULT_SGRID: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];
pub const PLATEAU_RATIO: f64 = 1.05;

/// D in its eigenbasis; |D| and Δ = 1 + D² act diagonally there.
#[derive(Clone, Debug)]
pub struct DiracFactor {
    pub eig: Eigen,
}

impl DiracFactor {
    pub fn new(d: &CMat) -> Result<Self> {
        Ok(DiracFactor { eig: eigh(d)? })
    }

    pub fn to_eigenbasis(&self, t: &CMat) -> CMat {
        self.eig.vectors.adjoint() * t * &self.eig.vectors
    }

    pub fn from_eigenbasis(&self, t: &CMat) -> CMat {
        &self.eig.vectors * t * self.eig.vectors.adjoint()
    }

    fn weighted(&self, t: &CMat, w: impl Fn(f64, f64) -> f64) -> CMat {
        let mut m = self.to_eigenbasis(t);
        let v = &self.eig.values;
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                m[(i, j)] *= w(v[i], v[j]);
            }
        }
        self.from_eigenbasis(&m)
    }

    /// Entrywise weights applied to an operator already in the eigenbasis.
    fn scaled(&self, t: &CMat, w: impl Fn(f64, f64) -> f64) -> CMat {
        let v = &self.eig.values;
        CMat::from_fn(t.nrows(), t.ncols(), |i, j| t[(i, j)] * w(v[i], v[j]))
    }
}

/// δᵏ(T) with δ = [|D|, ·], computed entrywise in the eigenbasis of D.
pub fn delta_k(t: &CMat, d: &DiracFactor, k: usize) -> CMat {
    d.weighted(t, |a, b| (a.abs() - b.abs()).powi(k as i32))
}

/// δᵏ(T) for a sparse |D|, by iterated commutators.
pub fn delta_k_sparse(t: &SpMat, abs_d: &SpMat, k: usize) -> SpMat {
    let mut m = t.clone();
    for _ in 0..k {
        m = abs_d.matmul(&m).sub(&m.matmul(abs_d));
    }
    m
}

/// Block-diagonal |M_ℓ| on ℓ²(ball)⊗V.
pub fn abs_m_ell(l: &dyn LengthFunction, ball: &Ball) -> SpMat {
    let d = l.dim();
    let mut trip = Vec::new();
    for (i, g) in ball.elements.iter().enumerate() {
        let a = l.abs_value(g);
        for r in 0..d {
            for s in 0..d {
                if a[(r, s)] != c(0.0, 0.0) {
                    trip.push((i * d + r, i * d + s, a[(r, s)]));
                }
            }
        }
    }
    SpMat::from_triplets(ball.len() * d, ball.len() * d, trip)
}

/// λ_g and [M_ℓ, λ_g] compressed to a ball.
pub fn translation_and_commutator(l: &dyn LengthFunction, ball: &Ball, g: &GroupElement) -> Result<(SpMat, SpMat)> {
    let grp = l.group();
    let d = l.dim();
    let n = ball.len() * d;
    let (mut lam, mut com) = (Vec::new(), Vec::new());
    for (j, h) in ball.elements.iter().enumerate() {
        let gh = grp.compose(g, h)?;
        let Some(i) = ball.position(&gh) else { continue };
        let diff = l.eval(&gh) - l.eval(h);
        for r in 0..d {
            lam.push((i * d + r, j * d + r, c(1.0, 0.0)));
            for s in 0..d {
                com.push((i * d + r, j * d + s, diff[(r, s)]));
            }
        }
    }
    Ok((SpMat::from_triplets(n, n, lam), SpMat::from_triplets(n, n, com)))
}

/// Block (gh, h) = (|ℓ(gh)| − |ℓ(h)|)ᵏ(ℓ(gh) − ℓ(h)).
pub fn closed_form_delta_commutator(l: &dyn LengthFunction, ball: &Ball, g: &GroupElement, k: usize) -> Result<SpMat> {
    let grp = l.group();
    let d = l.dim();
    let n = ball.len() * d;
    let mut trip = Vec::new();
    for (j, h) in ball.elements.iter().enumerate() {
        let gh = grp.compose(g, h)?;
        let Some(i) = ball.position(&gh) else { continue };
        let w = l.abs_value(&gh) - l.abs_value(h);
        let mut b = l.eval(&gh) - l.eval(h);
        for _ in 0..k {
            b = &w * b;
        }
        for r in 0..d {
            for s in 0..d {
                trip.push((i * d + r, j * d + s, b[(r, s)]));
            }
        }
    }
    Ok(SpMat::from_triplets(n, n, trip))
}

#[derive(Clone, Debug, Serialize)]
pub struct TechReport {
    pub pairs: usize,
    pub max_commutator: f64,
    pub worst: Option<(GroupElement, GroupElement)>,
}

impl TechReport {
    pub fn holds(&self) -> bool {
        self.max_commutator <= 1e-12
    }
}

/// max ‖[ℓ(g), |ℓ(h)|]‖ over pairs from the ball.
pub fn tech_condition_check(l: &dyn LengthFunction, ball: &Ball) -> TechReport {
    let vals: Vec<CMat> = ball.elements.iter().map(|g| l.eval(g)).collect();
    let abss: Vec<CMat> = ball.elements.iter().map(|g| l.abs_value(g)).collect();
    let best = (0..vals.len())
        .into_par_iter()
        .map(|i| {
            let mut w = (0.0f64, 0usize);
            for (j, a) in abss.iter().enumerate() {
                let r = op_norm(&(&vals[i] * a - a * &vals[i]));
                if r > w.0 {
                    w = (r, j);
                }
            }
            (w.0, i, w.1)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0f64, 0, 0), |acc, x| if x.0 > acc.0 { x } else { acc });
    TechReport {
        pairs: vals.len() * vals.len(),
        max_commutator: best.0,
        worst: (best.0 > 0.0).then(|| (ball.elements[best.1].clone(), ball.elements[best.2].clone())),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub g: GroupElement,
    pub k: usize,
    pub radius: f64,
    pub delta_translation: f64,
    pub delta_commutator: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PlateauRow {
    pub g: GroupElement,
    pub k: usize,
    pub translation_ratio: f64,
    pub commutator_ratio: f64,
    pub plateau: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularitySweep {
    pub tech_holds: bool,
    pub note: Option<String>,
    pub rows: Vec<SweepRow>,
    pub plateaus: Vec<PlateauRow>,
}

impl RegularitySweep {
    pub fn all_plateau(&self) -> bool {
        self.plateaus.iter().all(|p| p.plateau)
    }

    pub fn max_commutator_ratio(&self) -> f64 {
        self.plateaus.iter().map(|p| p.commutator_ratio).fold(0.0, f64::max)
    }
}

fn ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        1.0
    } else if a == 0.0 {
        f64::INFINITY
    } else {
        b / a
    }
}

/// sup_h norms of the blocks of δᵏ(λ_g) and δᵏ([M_ℓ,λ_g]); both are weighted
/// shifts so the operator norm is the largest block norm.
fn block_sweep(l: &dyn LengthFunction, ball: &Ball, g: &GroupElement, k: usize) -> Result<(f64, f64)> {
    let grp = l.group();
    let d = l.dim();
    let mut out = (0.0f64, 0.0f64);
    for h in &ball.elements {
        let gh = grp.compose(g, h)?;
        if ball.position(&gh).is_none() {
            continue;
        }
        let a = l.abs_value(&gh);
        let b = l.abs_value(h);
        let mut t = CMat::identity(d, d);
        let mut s = l.eval(&gh) - l.eval(h);
        for _ in 0..k {
            t = &a * &t - &t * &b;
            s = &a * &s - &s * &b;
        }
        out.0 = out.0.max(op_norm(&t));
        out.1 = out.1.max(op_norm(&s));
    }
    Ok(out)
}

/// Ladder of δᵏ norms for translations by `gs`; plateau compares the last rung
/// against the first.
pub fn group_regularity_sweep(l: &dyn LengthFunction, gs: &[GroupElement], k_max: usize, radii: &[f64], tech_radius: f64) -> Result<RegularitySweep> {
    if k_max > KMAX_CAP {
        return Err(Error::KmaxTooLarge(k_max));
    }
    if radii.len() < 2 {
        return Err(Error::LadderTooShort(radii.len()));
    }
    let tech = tech_condition_check(l, &crate::length::ball(l, tech_radius)?);
    let balls = radii.iter().map(|&r| crate::length::ball(l, r)).collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize, usize)> = (0..gs.len())
        .flat_map(|gi| (1..=k_max).flat_map(move |k| (0..radii.len()).map(move |ri| (gi, k, ri))))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(gi, k, ri)| {
            let (a, b) = block_sweep(l, &balls[ri], &gs[gi], k)?;
            Ok(SweepRow { g: gs[gi].clone(), k, radius: radii[ri], delta_translation: a, delta_commutator: b })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut plateaus = Vec::new();
    let nr = radii.len();
    for (gi, g) in gs.iter().enumerate() {
        for k in 1..=k_max {
            let base = (gi * k_max + (k - 1)) * nr;
            let (first, last) = (&rows[base], &rows[base + nr - 1]);
            let tr = ratio(first.delta_translation, last.delta_translation);
            let cr = ratio(first.delta_commutator, last.delta_commutator);
            plateaus.push(PlateauRow { g: g.clone(), k, translation_ratio: tr, commutator_ratio: cr, plateau: tr < PLATEAU_RATIO && cr < PLATEAU_RATIO });
        }
    }
    Ok(RegularitySweep {
        tech_holds: tech.holds(),
        note: (!tech.holds()).then(|| "no boundedness guarantee".to_string()),
        rows,
        plateaus,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LipschitzReport {
    pub dim: usize,
    pub trials: usize,
    pub max_ratio: f64,
    pub exceeds_one: bool,
}

/// max ‖|S| − |T|‖ / ‖S − T‖ over seeded Gaussian Hermitian pairs.
pub fn lipschitz_abs_check(dim: usize, trials: usize, seed: u64) -> Result<LipschitzReport> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dim must be ≥ 1".into()));
    }
    let chunk = 256;
    let nchunks = trials.div_ceil(chunk);
    let best = (0..nchunks)
        .into_par_iter()
        .map(|ci| -> Result<f64> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(ci as u64);
            let mut best = 0.0f64;
            for _ in 0..chunk.min(trials - ci * chunk) {
                let s = random_hermitian(&mut rng, dim);
                let t = random_hermitian(&mut rng, dim);
                let den = op_norm(&(&s - &t));
                if den == 0.0 {
                    continue;
                }
                best = best.max(op_norm(&(abs_h(&s)? - abs_h(&t)?)) / den);
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(LipschitzReport { dim, trials, max_ratio: best, exceeds_one: best > 1.0 + 1e-12 })
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderProbe {
    pub order: f64,
    pub s_grid: Vec<f64>,
    pub norms: Vec<f64>,
}

impl OrderProbe {
    pub fn max_norm(&self) -> f64 {
        self.norms.iter().cloned().fold(0.0, f64::max)
    }
}

/// ‖Δ^{s/2} P Δ^{−(s+t)/2}‖ for each s, with Δ = 1 + D².
pub fn sobolev_order_probe(p: &CMat, d: &DiracFactor, t: f64, s_grid: &[f64]) -> OrderProbe {
    sobolev_probe_eigenbasis(&d.to_eigenbasis(p), d, t, s_grid)
}

/// As [`sobolev_order_probe`] for P given in the eigenbasis of D (norms are
/// unitarily invariant).
pub fn sobolev_probe_eigenbasis(p: &CMat, d: &DiracFactor, t: f64, s_grid: &[f64]) -> OrderProbe {
    let norms = s_grid
        .par_iter()
        .map(|&s| op_norm(&d.scaled(p, |a, b| (1.0 + a * a).powf(s / 2.0) * (1.0 + b * b).powf(-(s + t) / 2.0))))
        .collect();
    OrderProbe { order: t, s_grid: s_grid.to_vec(), norms }
}

/// A formal word in the generators of the GDO filtration.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GdoWord {
    /// π(aᵢ)
    Gen(usize),
    /// [D, π(aᵢ)]
    Comm(usize),
    Prod(Box<GdoWord>, Box<GdoWord>),
    /// [Δ, w]
    AdDelta(Box<GdoWord>),
}

impl GdoWord {
    pub fn degree(&self) -> usize {
        match self {
            GdoWord::Gen(_) | GdoWord::Comm(_) => 0,
            GdoWord::Prod(a, b) => a.degree() + b.degree(),
            GdoWord::AdDelta(a) => a.degree() + 1,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            GdoWord::Gen(_) | GdoWord::Comm(_) => 1,
            GdoWord::Prod(a, b) => 1 + a.size() + b.size(),
            GdoWord::AdDelta(a) => 1 + a.size(),
        }
    }

    fn prod(a: &GdoWord, b: &GdoWord) -> GdoWord {
        GdoWord::Prod(Box::new(a.clone()), Box::new(b.clone()))
    }
}

impl std::fmt::Display for GdoWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GdoWord::Gen(i) => write!(f, "π(a{i})"),
            GdoWord::Comm(i) => write!(f, "[D,π(a{i})]"),
            GdoWord::Prod(a, b) => write!(f, "{a}·{b}"),
            GdoWord::AdDelta(a) => write!(f, "[Δ,{a}]"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GdoWords {
    pub words: Vec<GdoWord>,
    /// Number of words of each exact degree.
    pub counts: Vec<usize>,
}

/// Words up to filtration degree k_max following
/// ℰᵏ = ℰᵏ⁻¹ + Σ ℰʲℰᵏ⁻ʲ + [Δ, ℰᵏ⁻¹] + ℰ⁰[Δ, ℰᵏ⁻¹],
/// keeping words of size ≤ max_size.
pub fn gdo_generate(generators: usize, k_max: usize, max_size: usize) -> Result<GdoWords> {
    if k_max > KMAX_CAP {
        return Err(Error::KmaxTooLarge(k_max));
    }
    let atoms: Vec<GdoWord> = (0..generators).flat_map(|i| [GdoWord::Gen(i), GdoWord::Comm(i)]).collect();
    let mut by_degree: Vec<Vec<GdoWord>> = Vec::new();
    let mut zero = atoms.clone();
    for a in &atoms {
        for b in &atoms {
            zero.push(GdoWord::prod(a, b));
        }
    }
    by_degree.push(zero);
    for k in 1..=k_max {
        let mut next = std::collections::BTreeSet::new();
        for w in &by_degree[k - 1] {
            let ad = GdoWord::AdDelta(Box::new(w.clone()));
            for a in &atoms {
                next.insert(GdoWord::prod(a, &ad));
            }
            next.insert(ad);
        }
        for j in 1..k {
            for a in &by_degree[j] {
                for b in &by_degree[k - j] {
                    next.insert(GdoWord::prod(a, b));
                }
            }
        }
        by_degree.push(next.into_iter().filter(|w| w.size() <= max_size).collect());
    }
    let counts = by_degree.iter().map(|v| v.len()).collect();
    let mut seen = std::collections::BTreeSet::new();
    let words = by_degree.into_iter().flatten().filter(|w| seen.insert(w.clone())).collect();
    Ok(GdoWords { words, counts })
}

/// Materializes words at a truncation, memoizing sub-words.
pub struct GdoEvaluator<'a> {
    pub dirac: &'a CMat,
    pub reps: &'a [CMat],
    delta: CMat,
    memo: HashMap<GdoWord, CMat>,
}

impl<'a> GdoEvaluator<'a> {
    pub fn new(dirac: &'a CMat, reps: &'a [CMat]) -> Self {
        let n = dirac.nrows();
        let delta = CMat::identity(n, n) + dirac * dirac;
        GdoEvaluator { dirac, reps, delta, memo: HashMap::new() }
    }

    pub fn eval(&mut self, w: &GdoWord) -> CMat {
        if let Some(m) = self.memo.get(w) {
            return m.clone();
        }
        let m = match w {
            GdoWord::Gen(i) => self.reps[*i].clone(),
            GdoWord::Comm(i) => self.dirac * &self.reps[*i] - &self.reps[*i] * self.dirac,
            GdoWord::Prod(a, b) => self.eval(a) * self.eval(b),
            GdoWord::AdDelta(a) => {
                let x = self.eval(a);
                &self.delta * &x - &x * &self.delta
            }
        };
        self.memo.insert(w.clone(), m.clone());
        m
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderProbe {
    pub label: String,
    pub order: f64,
    pub max_norms: Vec<f64>,
    pub ratio: f64,
    pub pass: bool,
}

fn ladder_probe(label: String, order: f64, norms: Vec<f64>) -> LadderProbe {
    let r = ratio(norms[0], *norms.last().unwrap());
    let pass = norms.iter().all(|x| x.is_finite()) && r < PLATEAU_RATIO;
    LadderProbe { label, order, max_norms: norms, ratio: r, pass }
}

/// One truncation rung for the group-action check.
pub struct ActionRung {
    pub dirac: CMat,
    pub unitaries: Vec<(String, CMat)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ActionOrderReport {
    pub k_max: usize,
    pub s_grid: Vec<f64>,
    pub probes: Vec<LadderProbe>,
}

impl ActionOrderReport {
    pub fn pass(&self) -> bool {
        self.probes.iter().all(|p| p.pass)
    }
}

/// Probes U_g ∈ Op⁰, [D,U_g] ∈ Op⁰ and ad_Δʲ(U_g) ∈ Opʲ (j ≤ k_max) across a ladder.
pub fn group_action_order_check(rungs: &[ActionRung], k_max: usize, s_grid: &[f64]) -> Result<ActionOrderReport> {
    if k_max > KMAX_CAP {
        return Err(Error::KmaxTooLarge(k_max));
    }
    if rungs.len() < 2 {
        return Err(Error::LadderTooShort(rungs.len()));
    }
    let nu = rungs[0].unitaries.len();
    if rungs.iter().any(|r| r.unitaries.len() != nu) {
        return Err(Error::InvalidArgument("every rung needs the same unitaries".into()));
    }
    // label → per-rung max norms
    let mut table: BTreeMap<(usize, usize), (String, f64, Vec<f64>)> = BTreeMap::new();
    for r in rungs {
        // Everything is diagonalised once: [D,U] and ad_Δʲ(U) are entrywise
        // weights on U in the eigenbasis of D.
        let f = DiracFactor::new(&r.dirac)?;
        for (ui, (name, u)) in r.unitaries.iter().enumerate() {
            let ue = f.to_eigenbasis(u);
            let mut ops = vec![(name.to_string(), 0.0, ue.clone()), (format!("[D,{name}]"), 0.0, f.scaled(&ue, |a, b| a - b))];
            for j in 1..=k_max {
                let w = f.scaled(&ue, |a, b| (a * a - b * b).powi(j as i32));
                ops.push((format!("ad_Δ^{j}({name})"), j as f64, w));
            }
            for (oi, (label, t, m)) in ops.into_iter().enumerate() {
                let p = sobolev_probe_eigenbasis(&m, &f, t, s_grid).max_norm();
                table.entry((ui, oi)).or_insert_with(|| (label, t, Vec::new())).2.push(p);
            }
        }
    }
    let probes = table.into_values().map(|(l, t, n)| ladder_probe(l, t, n)).collect();
    Ok(ActionOrderReport { k_max, s_grid: s_grid.to_vec(), probes })
}

/// Degree-k GDO words probed as order ≤ k across a ladder of (D, π(aᵢ)) rungs.
pub fn gdo_order_ladder(rungs: &[(CMat, Vec<CMat>)], words: &[GdoWord], s_grid: &[f64]) -> Result<Vec<LadderProbe>> {
    if rungs.len() < 2 {
        return Err(Error::LadderTooShort(rungs.len()));
    }
    let mut norms: Vec<Vec<f64>> = vec![Vec::new(); words.len()];
    for (d, reps) in rungs {
        let f = DiracFactor::new(d)?;
        let mut ev = GdoEvaluator::new(d, reps);
        for (wi, w) in words.iter().enumerate() {
            let m = ev.eval(w);
            norms[wi].push(sobolev_order_probe(&m, &f, w.degree() as f64, s_grid).max_norm());
        }
    }
    Ok(words.iter().zip(norms).map(|(w, n)| ladder_probe(w.to_string(), w.degree() as f64, n)).collect())
}
