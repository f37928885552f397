//! Matrix-valued length functions ℓ: G → B_h(V) and their diagnostics.

use crate::error::{Error, Result};
use crate::groups::{enumerate_ball, AbelianGroup, Ball, GroupElement};
use crate::linalg::{abs_h, c, eigvalsh, eye, kron, op_norm, pauli_x, pauli_y, pauli_z, CMat, SpMat};
use crate::registry::Registry;
use serde::Serialize;
use std::collections::HashMap;
use std::fmt::Debug;
use std::path::Path;
use std::sync::Arc;

pub trait LengthFunction: Send + Sync + Debug {
    fn name(&self) -> String;
    fn group(&self) -> &AbelianGroup;
    fn dim(&self) -> usize;
    fn eval(&self, g: &GroupElement) -> CMat;

    fn spectrum(&self, g: &GroupElement) -> Vec<f64> {
        eigvalsh(&self.eval(g)).expect("small matrix")
    }

    fn abs_value(&self, g: &GroupElement) -> CMat {
        abs_h(&self.eval(g)).expect("small matrix")
    }

    fn min_abs_spec(&self, g: &GroupElement) -> f64 {
        self.spectrum(g).iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min)
    }

    /// Coordinate box radius that contains B_radius (infinite groups).
    fn search_box(&self, radius: f64) -> i64;
}

pub fn ball(l: &dyn LengthFunction, radius: f64) -> Result<Ball> {
    enumerate_ball(l.group(), |g| l.min_abs_spec(g), radius, l.search_box(radius))
}

/// Hermitian anticommuting involutions f₁…fₙ on ℂ^{2^⌊n/2⌋} (Jordan–Wigner).
pub fn clifford_generators(n: usize) -> Vec<CMat> {
    let k = n / 2;
    let string = |pre: usize, mid: &CMat| -> CMat {
        let mut m = CMat::identity(1, 1);
        for _ in 0..pre {
            m = kron(&m, &pauli_z());
        }
        m = kron(&m, mid);
        for _ in pre + 1..k {
            m = kron(&m, &eye(2));
        }
        m
    };
    let mut out = Vec::with_capacity(n);
    for j in 0..k {
        out.push(string(j, &pauli_x()));
        out.push(string(j, &pauli_y()));
    }
    if n % 2 == 1 {
        let mut m = CMat::identity(1, 1);
        for _ in 0..k {
            m = kron(&m, &pauli_z());
        }
        out.push(m);
    }
    out
}

fn coords_norm(g: &GroupElement) -> f64 {
    (g.coords.iter().map(|&x| (x * x) as f64).sum::<f64>()).sqrt()
}

/// ℓ(z) = Σ zⱼfⱼ on ℤⁿ.
#[derive(Clone, Debug)]
pub struct CliffordLength {
    group: AbelianGroup,
    pub generators: Vec<CMat>,
}

impl CliffordLength {
    pub fn new(n: usize) -> Self {
        Self::with_generators(clifford_generators(n)).expect("standard generators satisfy the relations")
    }

    pub fn with_generators(generators: Vec<CMat>) -> Result<Self> {
        let d = generators.first().map_or(1, |f| f.nrows());
        for (i, f) in generators.iter().enumerate() {
            for (j, g) in generators.iter().enumerate() {
                let target = if i == j { eye(d) * c(2.0, 0.0) } else { CMat::zeros(d, d) };
                if crate::linalg::fro_norm(&(f * g + g * f - target)) > 1e-12
                    || crate::linalg::hermitian_residual(f) > 1e-12
                {
                    return Err(Error::InvalidArgument(format!("Clifford relations fail for generators {i},{j}")));
                }
            }
        }
        Ok(CliffordLength { group: AbelianGroup::free(generators.len()), generators })
    }
}

impl LengthFunction for CliffordLength {
    fn name(&self) -> String {
        format!("clifford n={}", self.generators.len())
    }
    fn group(&self) -> &AbelianGroup {
        &self.group
    }
    fn dim(&self) -> usize {
        self.generators.first().map_or(1, |f| f.nrows())
    }
    fn eval(&self, g: &GroupElement) -> CMat {
        let d = self.dim();
        let mut m = CMat::zeros(d, d);
        for (z, f) in g.coords.iter().zip(&self.generators) {
            m += f * c(*z as f64, 0.0);
        }
        m
    }
    fn spectrum(&self, g: &GroupElement) -> Vec<f64> {
        let r = coords_norm(g);
        let d = self.dim();
        if d == 1 {
            return vec![g.coords[0] as f64];
        }
        let mut v = vec![-r; d / 2];
        v.extend(vec![r; d / 2]);
        v
    }
    /// |ℓ(z)| = ‖z‖·Id since ℓ(z)² = ‖z‖²·Id.
    fn abs_value(&self, g: &GroupElement) -> CMat {
        eye(self.dim()) * c(coords_norm(g), 0.0)
    }
    fn min_abs_spec(&self, g: &GroupElement) -> f64 {
        coords_norm(g)
    }
    fn search_box(&self, radius: f64) -> i64 {
        radius.floor() as i64 + 1
    }
}

/// Word length for the standard generators: Σ|cᵢ| on ℤⁿ, Σ min(cᵢ, dᵢ−cᵢ) on
/// finite products.
#[derive(Clone, Debug)]
pub struct WordLength {
    group: AbelianGroup,
}

impl WordLength {
    pub fn new(group: AbelianGroup) -> Self {
        WordLength { group }
    }

    fn value(&self, g: &GroupElement) -> f64 {
        match &self.group {
            AbelianGroup::Free { .. } => g.coords.iter().map(|c| c.abs()).sum::<i64>() as f64,
            AbelianGroup::Finite { factors } => {
                g.coords.iter().zip(factors).map(|(&c, &d)| c.min(d - c)).sum::<i64>() as f64
            }
        }
    }
}

impl LengthFunction for WordLength {
    fn name(&self) -> String {
        "word".into()
    }
    fn group(&self) -> &AbelianGroup {
        &self.group
    }
    fn dim(&self) -> usize {
        1
    }
    fn eval(&self, g: &GroupElement) -> CMat {
        CMat::from_element(1, 1, c(self.value(g), 0.0))
    }
    fn spectrum(&self, g: &GroupElement) -> Vec<f64> {
        vec![self.value(g)]
    }
    fn abs_value(&self, g: &GroupElement) -> CMat {
        self.eval(g)
    }
    fn min_abs_spec(&self, g: &GroupElement) -> f64 {
        self.value(g)
    }
    fn search_box(&self, radius: f64) -> i64 {
        radius.floor() as i64 + 1
    }
}

pub type GroupMap = Arc<dyn Fn(&GroupElement) -> GroupElement + Send + Sync>;

/// ℓ∘s for a map s: G₁ → G₂.
#[derive(Clone)]
pub struct PullbackLength {
    pub label: String,
    group: AbelianGroup,
    inner: Arc<dyn LengthFunction>,
    map: GroupMap,
    box_of: Arc<dyn Fn(f64) -> i64 + Send + Sync>,
}

impl Debug for PullbackLength {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PullbackLength({}, {:?})", self.label, self.inner)
    }
}

impl PullbackLength {
    /// `sample_radius` bounds the coordinate box where s(g) = 0 ⇔ g = 0 is
    /// checked.
    pub fn new(
        label: &str,
        group: AbelianGroup,
        inner: Arc<dyn LengthFunction>,
        map: GroupMap,
        box_of: Arc<dyn Fn(f64) -> i64 + Send + Sync>,
        sample_radius: i64,
    ) -> Result<Self> {
        let samples: Vec<GroupElement> = if group.is_finite() {
            group.elements()?
        } else {
            box_elements(group.rank(), sample_radius)
        };
        for g in &samples {
            let s = map(g);
            if !inner.group().contains(&s) {
                return Err(Error::GroupMismatch);
            }
            if s.is_zero() != g.is_zero() {
                return Err(Error::InvalidArgument(format!("pullback map sends {g} to {s}: s(g)=0 must hold iff g=0")));
            }
        }
        Ok(PullbackLength { label: label.into(), group, inner, map, box_of })
    }

    pub fn identity(inner: Arc<dyn LengthFunction>) -> Result<Self> {
        let group = inner.group().clone();
        let b = inner.clone();
        Self::new("identity", group, inner, Arc::new(|g| g.clone()), Arc::new(move |r| b.search_box(r)), 20)
    }

    /// s(n) = (n, n²) into ℤ² with the Clifford length.
    pub fn parabola() -> Result<Self> {
        Self::new(
            "parabola",
            AbelianGroup::free(1),
            Arc::new(CliffordLength::new(2)),
            Arc::new(|g| GroupElement::new(vec![g.coords[0], g.coords[0] * g.coords[0]])),
            Arc::new(|r| r.floor() as i64 + 1),
            50,
        )
    }
}

fn box_elements(rank: usize, b: i64) -> Vec<GroupElement> {
    let mut out = vec![GroupElement::new(vec![])];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|g| {
                (-b..=b).map(move |c| {
                    let mut v = g.coords.clone();
                    v.push(c);
                    GroupElement::new(v)
                })
            })
            .collect();
    }
    out
}

impl LengthFunction for PullbackLength {
    fn name(&self) -> String {
        format!("pullback {}", self.label)
    }
    fn group(&self) -> &AbelianGroup {
        &self.group
    }
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval(&self, g: &GroupElement) -> CMat {
        self.inner.eval(&(self.map)(g))
    }
    fn spectrum(&self, g: &GroupElement) -> Vec<f64> {
        self.inner.spectrum(&(self.map)(g))
    }
    fn abs_value(&self, g: &GroupElement) -> CMat {
        self.inner.abs_value(&(self.map)(g))
    }
    fn min_abs_spec(&self, g: &GroupElement) -> f64 {
        self.inner.min_abs_spec(&(self.map)(g))
    }
    fn search_box(&self, radius: f64) -> i64 {
        (self.box_of)(radius)
    }
}

/// Explicit table of Hermitian matrices on a finite group.
#[derive(Clone, Debug)]
pub struct TableLength {
    group: AbelianGroup,
    dim: usize,
    values: HashMap<GroupElement, CMat>,
}

impl TableLength {
    pub fn new(group: AbelianGroup, dim: usize, values: HashMap<GroupElement, CMat>) -> Result<Self> {
        for g in group.elements()? {
            let m = values.get(&g).ok_or_else(|| Error::InvalidArgument(format!("table length missing {g}")))?;
            if m.nrows() != dim || m.ncols() != dim || crate::linalg::hermitian_residual(m) > 1e-12 {
                return Err(Error::InvalidArgument(format!("table entry at {g} is not a Hermitian {dim}×{dim} matrix")));
            }
        }
        Ok(TableLength { group, dim, values })
    }

    /// Lines `x;re,im re,im …` giving ℓ(x) row-major.
    pub fn parse(group: AbelianGroup, text: &str) -> Result<Self> {
        let mut values = HashMap::new();
        let mut dim = 0;
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::InvalidSpec(format!("length table line {}: {line:?}", ln + 1));
            let (x, rest) = line.split_once(';').ok_or_else(bad)?;
            let coords = x
                .split(',')
                .map(|t| t.trim().parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad())?;
            let entries = rest
                .split_whitespace()
                .map(|t| {
                    let (a, b) = t.split_once(',').ok_or_else(bad)?;
                    Ok(c(a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
                })
                .collect::<Result<Vec<_>>>()?;
            let d = (entries.len() as f64).sqrt().round() as usize;
            if d * d != entries.len() || (dim != 0 && d != dim) {
                return Err(bad());
            }
            dim = d;
            values.insert(group.element(coords)?, CMat::from_row_slice(d, d, &entries));
        }
        Self::new(group, dim, values)
    }

    pub fn load(group: AbelianGroup, path: &Path) -> Result<Self> {
        Self::parse(group, &std::fs::read_to_string(path)?)
    }
}

impl LengthFunction for TableLength {
    fn name(&self) -> String {
        "table".into()
    }
    fn group(&self) -> &AbelianGroup {
        &self.group
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, g: &GroupElement) -> CMat {
        self.values[g].clone()
    }
    fn search_box(&self, _: f64) -> i64 {
        0
    }
}

/// ℓ(z) = Σ zⱼAⱼ for arbitrary Hermitian Aⱼ on ℤⁿ.
#[derive(Clone, Debug)]
pub struct LinearLength {
    group: AbelianGroup,
    pub mats: Vec<CMat>,
    /// Lower bound of min Sp|ℓ(z)|/‖z‖ on the unit sphere (sampled, n = 1, 2).
    lower: f64,
}

impl LinearLength {
    pub fn new(mats: Vec<CMat>) -> Result<Self> {
        let n = mats.len();
        if n == 0 || n > 2 {
            return Err(Error::InvalidArgument("linear lengths are supported on ℤ and ℤ²".into()));
        }
        let eval = |x: &[f64]| -> f64 {
            let d = mats[0].nrows();
            let mut m = CMat::zeros(d, d);
            for (xi, a) in x.iter().zip(&mats) {
                m += a * c(*xi, 0.0);
            }
            eigvalsh(&m).expect("small").iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min)
        };
        let lower = if n == 1 {
            eval(&[1.0])
        } else {
            (0..3600)
                .map(|k| {
                    let t = k as f64 * std::f64::consts::PI / 1800.0;
                    eval(&[t.cos(), t.sin()])
                })
                .fold(f64::INFINITY, f64::min)
                * 0.99
        };
        if lower <= 1e-9 {
            return Err(Error::NotProper("linear length has a degenerate direction".into()));
        }
        Ok(LinearLength { group: AbelianGroup::free(n), mats, lower })
    }

    /// ℓ(z) = z₁σ_x + z₂(t·Id + σ_y): proper, translation bounded, and for
    /// t ≠ 0 its absolute values fail to commute with ℓ.
    pub fn tilted(t: f64) -> Result<Self> {
        Self::new(vec![pauli_x(), eye(2) * c(t, 0.0) + pauli_y()])
    }
}

impl LengthFunction for LinearLength {
    fn name(&self) -> String {
        "linear".into()
    }
    fn group(&self) -> &AbelianGroup {
        &self.group
    }
    fn dim(&self) -> usize {
        self.mats[0].nrows()
    }
    fn eval(&self, g: &GroupElement) -> CMat {
        let d = self.dim();
        let mut m = CMat::zeros(d, d);
        for (z, a) in g.coords.iter().zip(&self.mats) {
            m += a * c(*z as f64, 0.0);
        }
        m
    }
    fn search_box(&self, radius: f64) -> i64 {
        (radius / self.lower).floor() as i64 + 1
    }
}

pub fn length_registry() -> Registry<dyn LengthFunction, AbelianGroup> {
    let mut r: Registry<dyn LengthFunction, AbelianGroup> = Registry::default();
    r.register("word", |_, g| Ok(Arc::new(WordLength::new(g.clone()))));
    r.register("clifford", |a, _| Ok(Arc::new(CliffordLength::new(a.parsed(&["n"], 0)?))));
    r.register("pullback", |a, g| {
        let which = a.value(&["map"], 0).unwrap_or("identity");
        Ok(match which {
            "parabola" => Arc::new(PullbackLength::parabola()?),
            "identity" => {
                let inner: Arc<dyn LengthFunction> = match g {
                    AbelianGroup::Free { rank } => Arc::new(CliffordLength::new(*rank)),
                    _ => Arc::new(WordLength::new(g.clone())),
                };
                Arc::new(PullbackLength::identity(inner)?)
            }
            other => return Err(Error::InvalidSpec(format!("pullback map {other:?}"))),
        })
    });
    r.register("table", |a, g| {
        let path: String = a.parsed(&["path"], 0)?;
        Ok(Arc::new(TableLength::load(g.clone(), Path::new(&path))?))
    });
    r.register("linear", |a, _| {
        let t: f64 = a.parsed(&["tilt", "t"], 0).unwrap_or(0.5);
        Ok(Arc::new(LinearLength::tilted(t)?))
    });
    r
}

/// Block-diagonal M_ℓ on ℓ²(ball)⊗V.
pub fn m_ell_matrix(l: &dyn LengthFunction, ball: &Ball) -> SpMat {
    let d = l.dim();
    let n = ball.len() * d;
    let mut trip = Vec::new();
    for (gi, g) in ball.elements.iter().enumerate() {
        let m = l.eval(g);
        for i in 0..d {
            for j in 0..d {
                if m[(i, j)] != c(0.0, 0.0) {
                    trip.push((gi * d + i, gi * d + j, m[(i, j)]));
                }
            }
        }
    }
    SpMat::from_triplets(n, n, trip)
}

/// Eigenvalues of M_ℓ as the union of the per-element spectra.
pub fn m_ell_spectrum(l: &dyn LengthFunction, ball: &Ball) -> Vec<f64> {
    let mut v: Vec<f64> = ball.elements.iter().flat_map(|g| l.spectrum(g)).collect();
    v.sort_by(f64::total_cmp);
    v
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub radii: Vec<f64>,
    pub sups: Vec<f64>,
    pub plateau: bool,
}

/// sup over B_R of ‖ℓ(x) − ℓ(y⁻¹x)‖ for each radius.
pub fn translation_bounded_sweep(l: &dyn LengthFunction, y: &GroupElement, radii: &[f64]) -> Result<SweepReport> {
    let g = l.group();
    let yi = g.inverse(y)?;
    let mut sups = Vec::with_capacity(radii.len());
    let mut running = 0.0f64;
    for &r in radii {
        let b = ball(l, r)?;
        for x in &b.elements {
            let d = l.eval(x) - l.eval(&g.compose(&yi, x)?);
            running = running.max(op_norm(&d));
        }
        sups.push(running);
    }
    let plateau = sups.len() >= 2 && {
        let (a, b) = (sups[sups.len() - 2], sups[sups.len() - 1]);
        (b - a).abs() <= 0.01 * b.abs().max(1e-300)
    };
    Ok(SweepReport { radii: radii.to_vec(), sups, plateau })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProperReport {
    /// Elements g ≠ e with ℓ(g) = 0, or e when ℓ(e) ≠ 0.
    pub zero_violations: Vec<GroupElement>,
    pub clustering: bool,
    pub min_gap: f64,
    /// (spectral value, number of ball elements whose spectrum contains it)
    pub fibers: Vec<(f64, usize)>,
}

impl ProperReport {
    pub fn is_ok(&self) -> bool {
        self.zero_violations.is_empty() && !self.clustering
    }
}

pub fn properness_check(l: &dyn LengthFunction, ball: &Ball) -> ProperReport {
    let mut zero_violations = Vec::new();
    let mut values: Vec<(f64, usize)> = Vec::new();
    for (gi, g) in ball.elements.iter().enumerate() {
        let zero = crate::linalg::fro_norm(&l.eval(g)) <= 1e-12;
        if zero != g.is_zero() {
            zero_violations.push(g.clone());
        }
        let mut sp = l.spectrum(g);
        sp.sort_by(f64::total_cmp);
        sp.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
        values.extend(sp.into_iter().map(|v| (v, gi)));
    }
    values.sort_by(|a, b| a.0.total_cmp(&b.0));
    let scale = values.iter().map(|v| v.0.abs()).fold(1.0, f64::max);
    let mut fibers: Vec<(f64, usize)> = Vec::new();
    for (v, _) in &values {
        match fibers.last_mut() {
            Some((w, n)) if (*v - *w).abs() <= 1e-12 * scale => *n += 1,
            _ => fibers.push((*v, 1)),
        }
    }
    let min_gap = fibers.windows(2).map(|w| w[1].0 - w[0].0).fold(f64::INFINITY, f64::min);
    ProperReport { zero_violations, clustering: min_gap < 1e-6 * scale, min_gap, fibers }
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub radii: Vec<f64>,
    pub counts: Vec<usize>,
    pub slope: f64,
    pub window: (usize, usize),
    pub residual: f64,
    pub finite: bool,
}

/// Least-squares slope and RMS residual of y against x.
pub fn ls_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let icpt = my - slope * mx;
    let res = (x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum::<f64>() / n).sqrt();
    (slope, icpt, res)
}

pub fn growth_estimate(l: &dyn LengthFunction, radii: &[f64]) -> Result<GrowthReport> {
    if radii.len() < 4 {
        return Err(Error::InvalidArgument("growth estimate needs at least 4 radii".into()));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] <= 0.0 {
        return Err(Error::InvalidArgument("radii must be positive and increasing".into()));
    }
    let big = ball(l, *radii.last().unwrap())?;
    let sizes: Vec<f64> = big.elements.iter().map(|g| l.min_abs_spec(g)).collect();
    let counts: Vec<usize> = radii.iter().map(|&r| sizes.iter().filter(|&&s| s <= r).count()).collect();
    let lo = radii.len() / 2;
    let window = (lo, radii.len());
    let finite = l.group().is_finite() || counts[lo..].windows(2).all(|w| w[0] == w[1]);
    if finite {
        return Ok(GrowthReport { radii: radii.to_vec(), counts, slope: 0.0, window, residual: 0.0, finite: true });
    }
    let x: Vec<f64> = radii[lo..].iter().map(|r| r.ln()).collect();
    let y: Vec<f64> = counts[lo..].iter().map(|&n| (n as f64).ln()).collect();
    let (slope, _, residual) = ls_fit(&x, &y);
    Ok(GrowthReport { radii: radii.to_vec(), counts, slope, window, residual, finite: false })
}

#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    pub n: f64,
    pub sigma_n: usize,
    pub ball_n: usize,
    pub sigma_n_plus_1: usize,
    pub dim_v: usize,
    pub holds: bool,
}

/// #Σ_n ≤ #B_n·dim V and #B_n ≤ #Σ_{n+1}, Σ_n = {(g,k): s_k(g) < n}.
pub fn sigma_sandwich(l: &dyn LengthFunction, n: f64) -> Result<SandwichReport> {
    let b = ball(l, n + 1.0)?;
    let mut sigma_n = 0;
    let mut sigma_n1 = 0;
    let mut ball_n = 0;
    for g in &b.elements {
        let s: Vec<f64> = l.spectrum(g).iter().map(|x| x.abs()).collect();
        sigma_n += s.iter().filter(|&&x| x < n).count();
        sigma_n1 += s.iter().filter(|&&x| x < n + 1.0).count();
        if s.iter().cloned().fold(f64::INFINITY, f64::min) <= n {
            ball_n += 1;
        }
    }
    let dim_v = l.dim();
    Ok(SandwichReport {
        n,
        sigma_n,
        ball_n,
        sigma_n_plus_1: sigma_n1,
        dim_v,
        holds: sigma_n <= ball_n * dim_v && ball_n <= sigma_n1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_anticommute() {
        for n in 1..=5 {
            let gens = clifford_generators(n);
            assert_eq!(gens[0].nrows(), 1 << (n / 2));
            CliffordLength::with_generators(gens).unwrap();
        }
    }

    #[test]
    fn clifford_square_and_spectrum() {
        let l = CliffordLength::new(2);
        let z = GroupElement::new(vec![3, 4]);
        let m = l.eval(&z);
        assert!(crate::linalg::fro_norm(&(&m * &m - eye(2) * c(25.0, 0.0))) < 1e-13);
        let e = eigvalsh(&l.eval(&GroupElement::new(vec![1, 1]))).unwrap();
        assert!((e[0] + 2f64.sqrt()).abs() < 1e-14 && (e[1] - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn pullback_zero_condition() {
        assert!(PullbackLength::parabola().is_ok());
        let bad = PullbackLength::new(
            "collapse",
            AbelianGroup::free(1),
            Arc::new(CliffordLength::new(2)),
            Arc::new(|g| GroupElement::new(vec![g.coords[0] - g.coords[0].signum() * i64::from(g.coords[0] == 1), 0])),
            Arc::new(|r| r as i64 + 1),
            5,
        );
        assert!(bad.is_err());
    }

    #[test]
    fn growth_on_z() {
        let l = WordLength::new(AbelianGroup::free(1));
        let radii: Vec<f64> = (1..=20).map(|k| 10.0 * k as f64).collect();
        let r = growth_estimate(&l, &radii).unwrap();
        assert!((0.9..=1.1).contains(&r.slope), "{}", r.slope);
        let fin = WordLength::new(AbelianGroup::z2n(3));
        assert!(growth_estimate(&fin, &[1.0, 2.0, 3.0, 4.0]).unwrap().finite);
    }
}
