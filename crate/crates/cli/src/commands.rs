use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use twisted_core::algebra::TwistedElement;
use twisted_core::coeff::{CoeffAlgebra, DefiningRep, ExactScalars, GroupAlgElem, GroupAlgebra, MatrixAlgebra, ScalarRep};
use twisted_core::coverings::{
    crossed_iso_phi, elwood_freeness_check, frame_to_pair, rank1_regular_check, round_trip_dims, spectral_decompose,
    subspace_product_audit, CoveringAction,
};
use twisted_core::groups::{AbelianGroup, Ball, GroupElement};
use twisted_core::length::{ball, growth_estimate, length_registry, m_ell_spectrum, LengthFunction};
use twisted_core::linalg::{c, eigvalsh, CMat, SpMat};
use twisted_core::order::{estimate_all, estimator_registry, EigenvalueSequence};
use twisted_core::regularity::{
    abs_m_ell, closed_form_delta_commutator, delta_k_sparse, group_action_order_check, group_regularity_sweep,
    lipschitz_abs_check, tech_condition_check, translation_and_commutator,
};
use twisted_core::torus::{
    build_torus_coefficient_triple, build_torus_crossed_triple, crossed_monomials, crossed_oracle, equivariant_oracle,
    frame_pair, torus_action_rungs, torus_intertwining, torus_rungs, TorusConfig, TorusCovering, TorusLength,
    DEFAULT_THETA, ORACLE_XS,
};
use twisted_core::triple::{
    build_even_to_odd, build_group_triple, build_odd_to_even, counting_sandwich, kronecker_rung, summability_report,
    Parity, Rung, TripleCheck, TruncatedTriple,
};
use twisted_core::twist::{
    cocycle_registry, verify_twisting_pair, Elem, InnerTwist, ScalarTwist, TrivialPair, TwistingPair, VerifyMode,
};

use crate::scenario::{CoveringSpec, OrderSpec, Scenario, TripleSpec};

const CHECK_TOL: f64 = 1e-9;
const EXACT_TOL: f64 = 1e-11;
const SUMMABILITY_SLACK: f64 = 0.4;

pub struct Ctx {
    pub scenario: Scenario,
    pub seed: u64,
    pub kmax: Option<usize>,
    pub sgrid: Option<Vec<f64>>,
    pub torus: Option<TorusConfig>,
    pub emit: Vec<String>,
}

/// What a subcommand hands back: the JSON `result`, violated invariants and
/// named CSV tables.
#[derive(Default)]
pub struct Outcome {
    pub result: Value,
    pub violations: Vec<String>,
    pub tables: Vec<Table>,
}

pub struct Table {
    pub suffix: Option<String>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Table { suffix: None, header: header.to_vec(), rows: Vec::new() }
    }

    fn named(suffix: &str, header: &[&'static str]) -> Self {
        Table { suffix: Some(suffix.to_string()), ..Table::new(header) }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

fn f(x: f64) -> String {
    format!("{x:?}")
}

fn to_value<T: Serialize>(t: &T) -> Result<Value> {
    Ok(serde_json::to_value(t)?)
}

fn scenario_group(sc: &Scenario) -> Result<AbelianGroup> {
    Ok(AbelianGroup::from_spec(sc.require(&sc.group, "group")?)?)
}

fn scenario_length(sc: &Scenario, g: &AbelianGroup) -> Result<Arc<dyn LengthFunction>> {
    let spec = sc.require(&sc.length, "length")?;
    length_registry().build(spec, g).with_context(|| format!("length spec {spec:?}"))
}

fn standard_generators(g: &AbelianGroup) -> Vec<GroupElement> {
    let n = g.rank();
    (0..n)
        .map(|i| GroupElement::new((0..n).map(|j| i64::from(i == j)).collect()))
        .collect()
}

pub fn torus_config(ctx: &Ctx) -> Result<TorusConfig> {
    if let Some(cfg) = &ctx.torus {
        return Ok(cfg.clone());
    }
    let t = ctx.scenario.require(&ctx.scenario.torus, "torus")?;
    Ok(TorusConfig::new(t.theta.unwrap_or(DEFAULT_THETA), t.m, t.cutoff)?)
}

// ---------------------------------------------------------------- verify-cocycle

pub fn verify_cocycle(ctx: &Ctx) -> Result<Outcome> {
    let sc = &ctx.scenario;
    let g = scenario_group(sc)?;
    let spec = sc.require(&sc.cocycle, "cocycle")?;
    let cocycle = cocycle_registry().build(spec, &g).with_context(|| format!("cocycle spec {spec:?}"))?;
    let v = sc.verify.clone().unwrap_or_default();
    let mode = match g.order() {
        Some(n) if n <= 64 => VerifyMode::Exhaustive,
        _ => VerifyMode::Sampled { count: v.samples.unwrap_or(10_000), seed: ctx.seed, bound: v.bound.unwrap_or(50) },
    };
    let exact = cocycle.is_exact();
    let tol = if exact { 0.0 } else { 1e-12 };
    let report = if exact {
        verify_twisting_pair(&ScalarTwist::new(cocycle.clone())?, mode, tol)?
    } else {
        let pair = InnerTwist::from_scalar(1, cocycle.clone(), Arc::new(|_: &GroupElement| CMat::identity(1, 1)));
        verify_twisting_pair(&pair, mode, tol)?
    };
    let mut table = Table::new(&["axiom", "elements", "residual"]);
    for v in report.violations.iter().chain(&report.nonunitary) {
        let els: Vec<String> = v.elements.iter().map(|e| e.to_string()).collect();
        table.push(vec![v.axiom.clone(), els.join(" "), f(v.residual)]);
    }
    let mut violations = Vec::new();
    if !report.is_ok() {
        violations.push(format!("{} twisting-pair axiom violations", report.violation_count + report.nonunitary.len()));
    }
    let mode_name = match mode {
        VerifyMode::Exhaustive => json!("exhaustive"),
        VerifyMode::Sampled { count, bound, .. } => json!({"sampled": count, "bound": bound}),
    };
    Ok(Outcome {
        result: json!({
            "group": sc.group,
            "cocycle": cocycle.name(),
            "exact_arithmetic": exact,
            "mode": mode_name,
            "tolerance": tol,
            "report": to_value(&report)?,
        }),
        violations,
        tables: vec![table],
    })
}

// ---------------------------------------------------------------- build-triple / spectrum

#[derive(Serialize)]
struct PartSummary {
    role: &'static str,
    kind: String,
    parity: &'static str,
    dim: usize,
    nnz: usize,
    split: Option<usize>,
    radius: f64,
    check: TripleCheck,
}

struct Part {
    summary: PartSummary,
    dirac: SpMat,
    labels: Vec<String>,
}

impl Part {
    fn new<E>(role: &'static str, kind: String, t: &TruncatedTriple<E>, samples: &[E]) -> Self {
        Part {
            summary: PartSummary {
                role,
                kind,
                parity: match t.parity {
                    Parity::Odd => "odd",
                    Parity::Even => "even",
                },
                dim: t.dim(),
                nnz: t.dirac.nnz(),
                split: t.split,
                radius: t.trunc.radius,
                check: t.check(samples),
            },
            dirac: t.dirac.clone(),
            labels: t.labels.clone(),
        }
    }
}

struct Assembled {
    coefficient: Part,
    crossed: Option<Part>,
    /// Coefficient spectrum and M_ℓ spectrum whose Kronecker sum must
    /// reproduce D̃².
    kronecker: Option<(Vec<f64>, Vec<f64>)>,
}

fn crossing_radius(sc: &Scenario) -> f64 {
    sc.ladder.last().copied().unwrap_or(3.0)
}

fn cross<P: TwistingPair + 'static>(
    coeff: &TruncatedTriple<Elem<P>>,
    pair: Arc<P>,
    l: &dyn LengthFunction,
    b: &Ball,
) -> Result<Part>
where
    Elem<P>: Clone,
{
    let mut samples = Vec::new();
    for g in b.elements.iter().take(5) {
        for a in pair.test_elements() {
            samples.push(TwistedElement::monomial(g.clone(), a));
        }
    }
    let kind = format!("crossed by {} on B_{}", l.name(), b.radius);
    let t = match coeff.parity {
        Parity::Odd => build_odd_to_even(coeff, pair, l, b)?,
        Parity::Even => build_even_to_odd(coeff, pair, l, b)?,
    };
    Ok(Part::new("crossed", kind, &t, &samples))
}

fn matrix_model(dirac: &[Vec<[f64; 2]>], split: Option<usize>) -> Result<(TruncatedTriple<CMat>, Vec<CMat>)> {
    let n = dirac.len();
    if n == 0 || dirac.iter().any(|r| r.len() != n) {
        bail!("matrix-model dirac must be a non-empty square matrix");
    }
    if split.is_some_and(|p| p == 0 || p >= n) {
        bail!("matrix-model split must lie strictly between 0 and {n}");
    }
    let d = CMat::from_fn(n, n, |i, j| c(dirac[i][j][0], dirac[i][j][1]));
    // Block-diagonal matrix units E_ii and E_{i,i+1} inside each block.
    let p = split.unwrap_or(n);
    let same = |i: usize, j: usize| (i < p) == (j < p);
    let mut samples = Vec::new();
    for i in 0..n {
        for j in [i, i + 1] {
            if j < n && same(i, j) {
                let mut e = CMat::zeros(n, n);
                e[(i, j)] = c(1.0, 0.0);
                samples.push(e);
            }
        }
    }
    let t = TruncatedTriple {
        labels: (0..n).map(|i| format!("e{i}")).collect(),
        dirac: SpMat::from_dense(&d),
        rep: Arc::new(DefiningRep { dim: n }),
        parity: if split.is_some() { Parity::Even } else { Parity::Odd },
        split,
        trunc: twisted_core::triple::TruncationSpec { radius: 0.0, mode_cutoff: f64::INFINITY },
        interior: vec![true; n],
    };
    Ok((t, samples))
}

fn crossing_group(sc: &Scenario) -> Result<Option<(AbelianGroup, Arc<dyn LengthFunction>, Ball)>> {
    if sc.length.is_none() {
        return Ok(None);
    }
    let g = scenario_group(sc)?;
    let l = scenario_length(sc, &g)?;
    let b = ball(l.as_ref(), crossing_radius(sc))?;
    Ok(Some((g, l, b)))
}

fn refuse_cocycle(sc: &Scenario, kind: &str) -> Result<()> {
    if sc.cocycle.is_some() {
        bail!("a scalar cocycle twists only the scalar coefficient triple, not {kind}");
    }
    Ok(())
}

fn assemble(ctx: &Ctx) -> Result<Assembled> {
    let sc = &ctx.scenario;
    let spec = sc.require(&sc.triple, "triple")?;
    let cross_data = crossing_group(sc)?;
    match spec {
        TripleSpec::Scalar => {
            let (cocycle, theta) = match &sc.cocycle {
                Some(s) => {
                    let g = scenario_group(sc)?;
                    let cc = cocycle_registry().build(s, &g)?;
                    let th = cc.theta();
                    (Some(cc), th)
                }
                None => (None, 0.0),
            };
            let t = TruncatedTriple {
                labels: vec!["1".into()],
                dirac: SpMat::zeros(1, 1),
                rep: Arc::new(ScalarRep { dim: 1, theta }),
                parity: Parity::Odd,
                split: None,
                trunc: twisted_core::triple::TruncationSpec { radius: 0.0, mode_cutoff: f64::INFINITY },
                interior: vec![true],
            };
            let one = ExactScalars { theta }.one();
            let coefficient = Part::new("coefficient", "scalar".into(), &t, std::slice::from_ref(&one));
            let Some((g, l, b)) = cross_data else {
                return Ok(Assembled { coefficient, crossed: None, kronecker: None });
            };
            let crossed = match cocycle {
                Some(cc) => cross(&t, Arc::new(ScalarTwist::new(cc)?), l.as_ref(), &b)?,
                None => {
                    let pair = TrivialPair { alg: ExactScalars { theta }, group: g, samples: vec![one] };
                    cross(&t, Arc::new(pair), l.as_ref(), &b)?
                }
            };
            Ok(Assembled { coefficient, crossed: Some(crossed), kronecker: Some((vec![0.0], m_ell_spectrum(l.as_ref(), &b))) })
        }
        TripleSpec::GroupTriple { group, length, radius } => {
            refuse_cocycle(sc, "a group triple")?;
            let h = AbelianGroup::from_spec(group)?;
            let lh = length_registry().build(length, &h)?;
            let bh = ball(lh.as_ref(), *radius)?;
            let t = build_group_triple(lh.clone(), &bh)?;
            let samples: Vec<GroupAlgElem> =
                bh.elements.iter().take(5).map(|x| GroupAlgElem::from([(x.clone(), c(1.0, 0.0))])).collect();
            let coefficient = Part::new("coefficient", format!("group-triple {}", lh.name()), &t, &samples);
            let Some((g, l, b)) = cross_data else {
                return Ok(Assembled { coefficient, crossed: None, kronecker: None });
            };
            let pair = TrivialPair { alg: GroupAlgebra { group: h }, group: g, samples };
            let crossed = cross(&t, Arc::new(pair), l.as_ref(), &b)?;
            let coeff_spec = m_ell_spectrum(lh.as_ref(), &bh);
            Ok(Assembled { coefficient, crossed: Some(crossed), kronecker: Some((coeff_spec, m_ell_spectrum(l.as_ref(), &b))) })
        }
        TripleSpec::MatrixModel { dirac, split } => {
            refuse_cocycle(sc, "a matrix model")?;
            let (t, samples) = matrix_model(dirac, *split)?;
            let coefficient = Part::new("coefficient", "matrix-model".into(), &t, &samples);
            let Some((g, l, b)) = cross_data else {
                return Ok(Assembled { coefficient, crossed: None, kronecker: None });
            };
            let coeff_spec = eigvalsh(&t.dirac.to_dense())?;
            let pair = TrivialPair { alg: MatrixAlgebra { dim: t.dim() }, group: g, samples };
            let crossed = cross(&t, Arc::new(pair), l.as_ref(), &b)?;
            Ok(Assembled { coefficient, crossed: Some(crossed), kronecker: Some((coeff_spec, m_ell_spectrum(l.as_ref(), &b))) })
        }
        TripleSpec::Torus => {
            refuse_cocycle(sc, "the torus triple")?;
            let cfg = torus_config(ctx)?;
            let t = build_torus_coefficient_triple(&cfg);
            let coefficient = Part::new("coefficient", "torus".into(), &t, &cfg.a_generators());
            let x = build_torus_crossed_triple(&cfg)?;
            let crossed = Part::new("crossed", "torus ⋊ Ĝ".into(), &x, &crossed_monomials(&cfg, &ORACLE_XS)?);
            Ok(Assembled { coefficient, crossed: Some(crossed), kronecker: None })
        }
    }
}

fn part_violations(p: &Part, out: &mut Vec<String>) {
    if !p.summary.check.is_ok(CHECK_TOL) {
        out.push(format!("{} triple fails its structural check: {:?}", p.summary.role, p.summary.check));
    }
}

pub fn build_triple(ctx: &Ctx) -> Result<Outcome> {
    let a = assemble(ctx)?;
    let mut violations = Vec::new();
    let mut table = Table::new(&["role", "index", "label"]);
    let mut parts = vec![&a.coefficient];
    parts.extend(a.crossed.as_ref());
    for p in &parts {
        part_violations(p, &mut violations);
        for (i, l) in p.labels.iter().enumerate() {
            table.push(vec![p.summary.role.to_string(), i.to_string(), l.clone()]);
        }
    }
    let summaries: Vec<&PartSummary> = parts.iter().map(|p| &p.summary).collect();
    Ok(Outcome { result: json!({ "triples": to_value(&summaries)? }), violations, tables: vec![table] })
}

/// Sorted D̃² eigenvalues predicted by D̃² = D²⊗1 + 1⊗M_ℓ², each with the given multiplicity.
fn kronecker_squares(coeff: &[f64], length: &[f64], copies: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(coeff.len() * length.len() * copies);
    for a in coeff {
        for b in length {
            for _ in 0..copies {
                v.push(a * a + b * b);
            }
        }
    }
    v.sort_by(f64::total_cmp);
    v
}

pub fn spectrum(ctx: &Ctx) -> Result<Outcome> {
    let a = assemble(ctx)?;
    let part = a.crossed.as_ref().unwrap_or(&a.coefficient);
    let mut violations = Vec::new();
    part_violations(part, &mut violations);
    twisted_core::linalg::check_cap(part.summary.dim)?;
    let eigs = eigvalsh(&part.dirac.to_dense())?;
    let mut kron = Value::Null;
    if let (Some((cs, ls)), Some(_)) = (&a.kronecker, &a.crossed) {
        let base = cs.len() * ls.len();
        if base > 0 && eigs.len() % base == 0 {
            let predicted = kronecker_squares(cs, ls, eigs.len() / base);
            let mut got: Vec<f64> = eigs.iter().map(|x| x * x).collect();
            got.sort_by(f64::total_cmp);
            let scale = predicted.last().copied().unwrap_or(1.0).max(1.0);
            let diff = got.iter().zip(&predicted).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale;
            if diff > 1e-9 {
                violations.push(format!("D̃² differs from the Kronecker sum by {diff:e} (relative)"));
            }
            kron = json!({ "relative_max_diff": diff, "checked": true });
        } else {
            violations.push("crossed dimension is not a multiple of the Kronecker product".into());
        }
    }
    let mut table = Table::new(&["index", "eigenvalue"]);
    for (i, e) in eigs.iter().enumerate() {
        table.push(vec![i.to_string(), f(*e)]);
    }
    let abs_min = eigs.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
    let abs_max = eigs.iter().map(|x| x.abs()).fold(0.0, f64::max);
    Ok(Outcome {
        result: json!({
            "triple": to_value(&part.summary)?,
            "eigenvalue_count": eigs.len(),
            "abs_min": abs_min,
            "abs_max": abs_max,
            "kronecker_check": kron,
        }),
        violations,
        tables: vec![table],
    })
}

// ---------------------------------------------------------------- growth

/// Every registered estimator; one that cannot run on the sequence reports its error instead.
fn spectrum_abscissa(spec: &[f64]) -> Result<Value> {
    let seq = EigenvalueSequence::from_dirac_spectrum(spec);
    let reg = estimator_registry();
    let mut out = Vec::new();
    for name in reg.names() {
        out.push(match reg.build(&name, &())?.estimate(&seq) {
            Ok(e) => to_value(&e)?,
            Err(e) => json!({ "estimator": name, "error": e.to_string() }),
        });
    }
    Ok(Value::Array(out))
}

fn lambda_slope(spec: &[f64]) -> Result<f64> {
    let seq = EigenvalueSequence::from_dirac_spectrum(spec);
    Ok(estimator_registry().build("lambda-slope", &())?.estimate(&seq)?.value)
}

pub fn growth(ctx: &Ctx) -> Result<Outcome> {
    let sc = &ctx.scenario;
    let g = scenario_group(sc)?;
    let l = scenario_length(sc, &g)?;
    let radii = sc.ladder_or(&(1..=12).map(|k| 5.0 * k as f64).collect::<Vec<_>>());
    let rep = growth_estimate(l.as_ref(), &radii)?;
    let mut table = Table::new(&["radius", "count"]);
    for (r, n) in rep.radii.iter().zip(&rep.counts) {
        table.push(vec![f(*r), n.to_string()]);
    }
    let abscissa = if rep.finite {
        Value::Null
    } else {
        let top = ball(l.as_ref(), *radii.last().unwrap())?;
        spectrum_abscissa(&m_ell_spectrum(l.as_ref(), &top))?
    };
    Ok(Outcome {
        result: json!({ "length": l.name(), "growth": to_value(&rep)?, "m_ell_abscissa": abscissa }),
        violations: Vec::new(),
        tables: vec![table],
    })
}

// ---------------------------------------------------------------- summability

fn rung_rows(table: &mut Table, label: &str, rows: &[twisted_core::triple::SandwichRow]) {
    for r in rows {
        table.push(vec![label.to_string(), f(r.t), r.lower.to_string(), r.middle.to_string(), r.upper.to_string()]);
    }
}

pub fn summability(ctx: &Ctx) -> Result<Outcome> {
    let sc = &ctx.scenario;
    let spec = sc.require(&sc.triple, "triple")?;
    let mut sandwich = Table::named("sandwich", &["radius", "t", "lower", "middle", "upper"]);
    let mut violations = Vec::new();
    let mut sandwich_ok = true;

    if let TripleSpec::Torus = spec {
        let cfg = torus_config(ctx)?;
        let radii: Vec<i64> = sc.ladder_or(&[10.0, 20.0, 30.0]).iter().map(|r| r.round() as i64).collect();
        let (coeff, crossed) = torus_rungs(&cfg, &radii)?;
        let coeff_rep = summability_report(&coeff, 2.0, 0.0, SUMMABILITY_SLACK)?;
        let lspec = m_ell_spectrum(&TorusLength { lattice: cfg.lattice.clone() }, &Ball::whole(cfg.dual_group())?);
        for r in &coeff {
            let ts: Vec<f64> = (1..=(r.valid_below as i64)).map(|k| k as f64).collect();
            let (rows, ok) = counting_sandwich(&r.spectrum, &lspec, &ts);
            sandwich_ok &= ok;
            rung_rows(&mut sandwich, &f(r.radius), &rows);
        }
        let rep = summability_report(&crossed, coeff_rep.estimate, 0.0, SUMMABILITY_SLACK)?;
        if !sandwich_ok {
            violations.push("counting sandwich fails".into());
        }
        return Ok(Outcome {
            result: json!({ "coefficient": to_value(&coeff_rep)?, "crossed": to_value(&rep)?, "sandwich_holds": sandwich_ok }),
            violations,
            tables: vec![estimates_table(&rep), sandwich],
        });
    }

    let g = scenario_group(sc)?;
    let l = scenario_length(sc, &g)?;
    let radii = sc.ladder_or(&[20.0, 30.0, 40.0]);
    let top = *radii.last().unwrap();
    let growth = growth_estimate(l.as_ref(), &(1..=8).map(|k| top * k as f64 / 8.0).collect::<Vec<_>>())?.slope;

    // Coefficient spectrum truncated at each rung radius.
    let coeff_at = |r: f64| -> Result<Vec<f64>> {
        Ok(match spec {
            TripleSpec::GroupTriple { group, length, .. } => {
                let h = AbelianGroup::from_spec(group)?;
                let lh = length_registry().build(length, &h)?;
                m_ell_spectrum(lh.as_ref(), &ball(lh.as_ref(), r)?)
            }
            TripleSpec::MatrixModel { dirac, split } => eigvalsh(&matrix_model(dirac, *split)?.0.dirac.to_dense())?,
            TripleSpec::Scalar => vec![0.0],
            TripleSpec::Torus => unreachable!(),
        })
    };
    let finite_coeff = !matches!(spec, TripleSpec::GroupTriple { .. });
    let mut rungs: Vec<Rung> = Vec::new();
    let mut top_coeff = Vec::new();
    for &r in &radii {
        let cs = coeff_at(r)?;
        let b = ball(l.as_ref(), r)?;
        let cutoff = if finite_coeff { f64::INFINITY } else { r };
        let mut rung = kronecker_rung(&cs, l.as_ref(), &b, cutoff);
        if g.is_finite() {
            rung.valid_below = r;
        }
        let ts: Vec<f64> = (1..=(r as i64)).map(|k| k as f64).collect();
        let (rows, ok) = counting_sandwich(&cs, &m_ell_spectrum(l.as_ref(), &b), &ts);
        sandwich_ok &= ok;
        rung_rows(&mut sandwich, &f(r), &rows);
        rungs.push(rung);
        top_coeff = cs;
    }
    let coefficient_abscissa = if finite_coeff {
        0.0
    } else {
        lambda_slope(&top_coeff)?
    };
    let rep = summability_report(&rungs, coefficient_abscissa, growth, SUMMABILITY_SLACK)?;
    if !sandwich_ok {
        violations.push("counting sandwich fails".into());
    }
    Ok(Outcome {
        result: json!({ "length": l.name(), "report": to_value(&rep)?, "sandwich_holds": sandwich_ok }),
        violations,
        tables: vec![estimates_table(&rep), sandwich],
    })
}

fn estimates_table(rep: &twisted_core::triple::SummabilityReport) -> Table {
    let mut t = Table::new(&["radius", "modes_used", "estimator", "value", "residual", "flag"]);
    for r in &rep.rungs {
        for e in &r.estimates {
            t.push(vec![
                f(r.radius),
                r.modes_used.to_string(),
                e.estimator.clone(),
                f(e.value),
                f(e.residual),
                e.flag.clone().unwrap_or_default(),
            ]);
        }
    }
    t
}

// ---------------------------------------------------------------- regularity-sweep

pub fn regularity_sweep(ctx: &Ctx) -> Result<Outcome> {
    let sc = &ctx.scenario;
    let g = scenario_group(sc)?;
    let l = scenario_length(sc, &g)?;
    let reg = sc.regularity.clone().unwrap_or_default();
    let gens: Vec<GroupElement> = match &reg.generators {
        Some(v) => v.iter().map(|c| g.element(c.clone())).collect::<std::result::Result<_, _>>()?,
        None => standard_generators(&g),
    };
    let radii = sc.ladder_or(&[20.0, 40.0]);
    let kmax = ctx.kmax.unwrap_or(3);
    let tech_radius = reg.tech_radius.unwrap_or(radii[0] / 2.0);
    let tech = tech_condition_check(l.as_ref(), &ball(l.as_ref(), tech_radius)?);
    let sweep = group_regularity_sweep(l.as_ref(), &gens, kmax, &radii, tech_radius)?;

    let b0 = ball(l.as_ref(), radii[0])?;
    let abs_m = abs_m_ell(l.as_ref(), &b0);
    let mut closed = Vec::new();
    let mut violations = Vec::new();
    for x in &gens {
        let (_, com) = translation_and_commutator(l.as_ref(), &b0, x)?;
        for k in 1..=kmax {
            let lhs = delta_k_sparse(&com, &abs_m, k);
            let rhs = closed_form_delta_commutator(l.as_ref(), &b0, x, k)?;
            let diff = lhs.max_abs_diff(&rhs) / rhs.max_abs().max(1.0);
            if tech.holds() && diff > 1e-12 {
                violations.push(format!("δ^{k}([M_ℓ, λ_{x}]) differs from its closed form by {diff:e}"));
            }
            closed.push(json!({ "g": x, "k": k, "radius": radii[0], "relative_max_diff": diff }));
        }
    }

    let trials = reg.lipschitz_trials.unwrap_or(2000);
    let lip = [1usize, 2]
        .iter()
        .map(|&d| lipschitz_abs_check(d, trials, ctx.seed))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if lip[0].max_ratio > 1.0 + 1e-12 {
        violations.push(format!("scalar Lipschitz ratio {} exceeds 1", lip[0].max_ratio));
    }

    let mut table = Table::new(&["g", "k", "radius", "delta_translation", "delta_commutator"]);
    for r in &sweep.rows {
        table.push(vec![r.g.to_string(), r.k.to_string(), f(r.radius), f(r.delta_translation), f(r.delta_commutator)]);
    }
    Ok(Outcome {
        result: json!({
            "length": l.name(),
            "tech": to_value(&tech)?,
            "sweep": to_value(&sweep)?,
            "all_plateau": sweep.all_plateau(),
            "max_commutator_ratio": sweep.max_commutator_ratio(),
            "closed_form": closed,
            "lipschitz": to_value(&lip)?,
        }),
        violations,
        tables: vec![table],
    })
}

// ---------------------------------------------------------------- covering-analyze

fn covering_action(spec: &CoveringSpec) -> Result<CoveringAction> {
    Ok(match spec {
        CoveringSpec::Preset(name) => match name.as_str() {
            "m2-z2" => CoveringAction::m2_z2(),
            "c3-swap" => CoveringAction::c3_swap(),
            "c2-swap" => CoveringAction::c2_swap(),
            other => bail!("unknown covering preset {other:?} (m2-z2, c3-swap, c2-swap)"),
        },
        CoveringSpec::Action(a) => CoveringAction::from_spec(a)?,
    })
}

pub fn covering_analyze(ctx: &Ctx) -> Result<Outcome> {
    let sc = &ctx.scenario;
    let action = covering_action(sc.require(&sc.covering, "covering")?)?;
    let subs = spectral_decompose(&action)?;
    let audit = subspace_product_audit(&action, &subs)?;
    let elwood = elwood_freeness_check(&action);
    let rank1 = rank1_regular_check(&action, &subs, ctx.seed)?;
    let dims = round_trip_dims(&action, &subs)?;
    let mut violations = Vec::new();
    if !audit.is_ok(1e-10) {
        violations.push("spectral subspaces are not multiplicatively graded".into());
    }
    let mut phi = Value::Null;
    let mut pair_report = Value::Null;
    if let Some(frame) = &rank1.frame {
        let pair = frame_to_pair(&action, frame, 1e-10)?;
        let pr = verify_twisting_pair(&pair, VerifyMode::Exhaustive, 1e-10)?;
        if !pr.is_ok() {
            violations.push("frame-induced pair violates the twisting-pair axioms".into());
        }
        let rep = crossed_iso_phi(&pair, &action, 100_000, ctx.seed)?;
        if !rep.pass(EXACT_TOL) {
            violations.push("Φ is not a *-isomorphism".into());
        }
        pair_report = to_value(&pr)?;
        phi = to_value(&rep)?;
    }
    let verdict = if rank1.regular { "rank-1 regular" } else { "not rank-1 regular" };
    let mut table = Table::new(&["character", "dim_b_k", "dim_crossed", "invertible_found"]);
    for (row, v) in dims.iter().zip(&rank1.characters) {
        table.push(vec![row.character.to_string(), row.dim_b_k.to_string(), row.dim_crossed.to_string(), v.invertible_found.to_string()]);
    }
    Ok(Outcome {
        result: json!({
            "blocks": action.blocks,
            "dim_b": action.dim_b(),
            "verdict": verdict,
            "elwood_free": elwood.free,
            "elwood": to_value(&elwood)?,
            "product_audit": to_value(&audit)?,
            "rank1": to_value(&rank1)?,
            "round_trip": to_value(&dims)?,
            "pair": pair_report,
            "phi": phi,
        }),
        violations,
        tables: vec![table],
    })
}

// ---------------------------------------------------------------- torus-demo

pub fn torus_demo(ctx: &Ctx) -> Result<Outcome> {
    let cfg = torus_config(ctx)?;
    let emits = match (&ctx.emit, ctx.scenario.torus.as_ref().and_then(|t| t.emit.clone())) {
        (e, _) if !e.is_empty() => e.clone(),
        (_, Some(e)) => e,
        _ => vec!["spectrum".to_string()],
    };
    let mut out = Outcome::default();
    let mut result = serde_json::Map::new();
    result.insert("theta".into(), json!(cfg.theta));
    result.insert("m".into(), json!(cfg.m));
    result.insert("cutoff".into(), json!(cfg.cutoff));
    result.insert("covering_order".into(), json!(cfg.dual_group().order()));
    for e in &emits {
        let v = match e.as_str() {
            "spectrum" => {
                let coeff = build_torus_coefficient_triple(&cfg);
                let crossed = build_torus_crossed_triple(&cfg)?;
                let mut table = Table::named("spectrum", &["triple", "index", "eigenvalue"]);
                let mut summary = Vec::new();
                for (name, dirac) in [("coefficient", &coeff.dirac), ("crossed", &crossed.dirac)] {
                    twisted_core::linalg::check_cap(dirac.nrows)?;
                    let eigs = eigvalsh(&dirac.to_dense())?;
                    for (i, x) in eigs.iter().enumerate() {
                        table.push(vec![name.into(), i.to_string(), f(*x)]);
                    }
                    summary.push(json!({
                        "triple": name,
                        "dim": dirac.nrows,
                        "hermitian_residual": dirac.hermitian_residual(),
                        "abs_min": eigs.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min),
                    }));
                }
                out.tables.push(table);
                json!(summary)
            }
            "rep-check" => {
                let crossed = crossed_oracle(&cfg)?;
                let equiv = equivariant_oracle(&cfg)?;
                let inter = torus_intertwining(&cfg)?;
                let pair = frame_pair(&cfg)?;
                let axioms = verify_twisting_pair(&pair, VerifyMode::Exhaustive, 1e-12)?;
                let phi = crossed_iso_phi(&pair, &TorusCovering::new(&cfg)?, 200_000, ctx.seed)?;
                let checks = [
                    ("crossed oracle", crossed.pass(EXACT_TOL)),
                    ("equivariant oracle", equiv.pass(EXACT_TOL)),
                    ("W-intertwining", inter.is_ok(EXACT_TOL)),
                    ("frame pair axioms", axioms.is_ok()),
                    ("Φ isomorphism", phi.pass(EXACT_TOL)),
                ];
                let mut table = Table::named("rep-check", &["check", "pass"]);
                for (name, ok) in checks {
                    table.push(vec![name.into(), ok.to_string()]);
                    if !ok {
                        out.violations.push(format!("torus {name} fails"));
                    }
                }
                out.tables.push(table);
                json!({
                    "crossed_oracle": to_value(&crossed)?,
                    "equivariant_oracle": to_value(&equiv)?,
                    "intertwining": to_value(&inter)?,
                    "frame_pair": to_value(&axioms)?,
                    "phi": to_value(&phi)?,
                })
            }
            "regularity" => {
                let rungs = torus_action_rungs(&cfg, &[cfg.cutoff, 2 * cfg.cutoff])?;
                let sgrid = ctx.sgrid.clone().unwrap_or_else(|| vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
                let rep = group_action_order_check(&rungs, ctx.kmax.unwrap_or(2), &sgrid)?;
                let mut table = Table::named("regularity", &["operator", "order", "ratio", "pass"]);
                for p in &rep.probes {
                    table.push(vec![p.label.clone(), f(p.order), f(p.ratio), p.pass.to_string()]);
                }
                out.tables.push(table);
                json!({ "report": to_value(&rep)?, "pass": rep.pass() })
            }
            "summability" => {
                let radii: Vec<i64> = match ctx.scenario.ladder.as_slice() {
                    [] => vec![10, 20, 30],
                    l => l.iter().map(|r| r.round() as i64).collect(),
                };
                let (coeff, crossed) = torus_rungs(&cfg, &radii)?;
                let a = summability_report(&coeff, 2.0, 0.0, SUMMABILITY_SLACK)?;
                let b = summability_report(&crossed, a.estimate, 0.0, SUMMABILITY_SLACK)?;
                let mut table = estimates_table(&b);
                table.suffix = Some("summability".into());
                out.tables.push(table);
                json!({ "coefficient": to_value(&a)?, "crossed": to_value(&b)? })
            }
            other => bail!("unknown --emit {other:?} (spectrum, rep-check, regularity, summability)"),
        };
        result.insert(e.clone(), v);
    }
    out.result = Value::Object(result);
    Ok(out)
}

// ---------------------------------------------------------------- order-estimate

pub fn order_estimate(ctx: &Ctx) -> Result<Outcome> {
    let sc = &ctx.scenario;
    let (source, seq) = match sc.require(&sc.order, "order")? {
        OrderSpec::PowerLaw { d, n } => {
            (json!({"power_law": d, "n": n}), EigenvalueSequence::from_values((0..*n).map(|k| ((k + 1) as f64).powf(-1.0 / d))))
        }
        OrderSpec::Geometric { ratio, n } => {
            (json!({"geometric": ratio, "n": n}), EigenvalueSequence::from_values((0..*n).map(|k| ratio.powi(k as i32))))
        }
        OrderSpec::File { path } => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            (json!({"file": path}), EigenvalueSequence::parse(&text))
        }
    };
    let est = estimate_all(&seq)?;
    let mut table = Table::new(&["estimator", "value", "residual", "flag"]);
    for e in &est {
        table.push(vec![e.estimator.clone(), f(e.value), f(e.residual), e.flag.clone().unwrap_or_default()]);
    }
    let vals: Vec<f64> = est.iter().filter(|e| e.flag.is_none()).map(|e| e.value).collect();
    let spread = if vals.is_empty() {
        f64::NAN
    } else {
        vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - vals.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    Ok(Outcome {
        result: json!({ "source": source, "length": seq.len(), "estimates": to_value(&est)?, "spread": spread }),
        violations: Vec::new(),
        tables: vec![table],
    })
}
