use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use sha2::{Digest, Sha256};
use twisted_core::coverings::ActionSpec;

/// A scenario file: every section is optional and only the sections a
/// subcommand needs are consulted.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    /// `"free-abelian n"`, `"z2^n"`, `"cyclic d1,d2"` or `"quotient M=[[a,b],[c,d]]"`.
    pub group: Option<String>,
    /// `"clifford n=3"`, `"theta θ=0.41"`, `"bicharacter b=1:0:1"`, `"table <path>"`.
    pub cocycle: Option<String>,
    /// `"word"`, `"clifford n=2"`, `"pullback map=parabola"`, `"linear t=0.5"`, `"table <path>"`.
    pub length: Option<String>,
    pub triple: Option<TripleSpec>,
    #[serde(default)]
    pub ladder: Vec<f64>,
    #[serde(default)]
    pub analyses: Vec<String>,
    pub seed: Option<u64>,
    pub out: Option<String>,
    pub torus: Option<TorusSpec>,
    pub covering: Option<CoveringSpec>,
    pub order: Option<OrderSpec>,
    pub regularity: Option<RegularitySpec>,
    pub verify: Option<VerifySpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TripleSpec {
    /// (ℂH, ℓ²(H)⊗V, M_ℓ) for a coefficient group H, truncated to B_radius.
    GroupTriple { group: String, length: String, radius: f64 },
    /// ℂ on ℂ with D = 0; crossing gives the (twisted) group C*-algebra.
    Scalar,
    /// The torus coefficient triple from the `torus` section.
    Torus,
    /// A point triple on ℂⁿ: Hermitian D given row-major as [re, im] pairs.
    /// With `split = p` the triple is even and the algebra is M_p ⊕ M_{n−p}.
    MatrixModel { dirac: Vec<Vec<[f64; 2]>>, split: Option<usize> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusSpec {
    pub theta: Option<f64>,
    pub m: [[i64; 2]; 2],
    pub cutoff: i64,
    /// Sections written by torus-demo when `--emit` is absent.
    pub emit: Option<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum CoveringSpec {
    /// `"m2-z2"`, `"c3-swap"` or `"c2-swap"`.
    Preset(String),
    Action(ActionSpec),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OrderSpec {
    /// μ_n = (n+1)^{−1/d}.
    PowerLaw { d: f64, n: usize },
    /// μ_n = rⁿ.
    Geometric { ratio: f64, n: usize },
    /// One value per line, or CSV with the value in the last column.
    File { path: String },
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularitySpec {
    pub generators: Option<Vec<Vec<i64>>>,
    pub tech_radius: Option<f64>,
    pub lipschitz_trials: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    pub samples: Option<usize>,
    pub bound: Option<i64>,
}

pub struct Loaded {
    pub scenario: Scenario,
    pub sha256: String,
}

pub fn hash_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn load(path: Option<&Path>) -> Result<Loaded> {
    let Some(path) = path else {
        return Ok(Loaded { scenario: Scenario::default(), sha256: hash_bytes(b"") });
    };
    let bytes = std::fs::read(path).with_context(|| format!("reading scenario {}", path.display()))?;
    let scenario: Scenario =
        serde_json::from_slice(&bytes).with_context(|| format!("parsing scenario {}", path.display()))?;
    if scenario.ladder.windows(2).any(|w| w[1] <= w[0]) {
        bail!("ladder must be strictly increasing: {:?}", scenario.ladder);
    }
    Ok(Loaded { scenario, sha256: hash_bytes(&bytes) })
}

impl Scenario {
    pub fn require<'a, T>(&self, field: &'a Option<T>, name: &str) -> Result<&'a T> {
        field.as_ref().with_context(|| format!("scenario {:?} has no `{name}` field", self.name))
    }

    pub fn ladder_or(&self, default: &[f64]) -> Vec<f64> {
        if self.ladder.is_empty() {
            default.to_vec()
        } else {
            self.ladder.clone()
        }
    }
}
