use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::identities::{bochner_residual, graham_lee_residual, hamiltonian_check, torsion_rank_check};
use super::random::{jl_point, random_complex, random_conformal, random_field, random_jl_params, random_point};
use super::ResidualSet;
use crate::expr::{FieldExpr, ParseError};
use crate::geometry::calculus::{commutation_residuals, conformal_sublaplacian_residual};
use crate::geometry::curvature::{conformal_transform_residuals, Curvature};
use crate::geometry::frame::{Frame, DEFAULT_FRAME_ORDER};
use crate::geometry::model::{
    apply_conformal, levi_normalized, make_heisenberg, make_rigid, GeometryError, Model,
};
use crate::geometry::structure::structure_residuals;
use crate::jet::fd_crosscheck;
use crate::schwarzian::{additivity_residual, mobius_residual, schwarzian_at, torsion_link_residual};
use crate::solutions::{jl_field, witness_residual, JLParams, SolutionError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SuiteError {
    #[error("unknown suite or check `{0}`")]
    UnknownCheck(String),
    #[error("samples must be at least 1")]
    NoSamples,
    #[error("invalid model specification: {0}")]
    Model(String),
    #[error("cannot parse `{text}`: {source}")]
    Parse { text: String, source: ParseError },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Solution(#[from] SolutionError),
}

/// Model description as it appears in configuration files and reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    /// `heisenberg`, `rigid`, `rigid-normalized` or `conformal`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    #[serde(default, rename = "Phi", skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Box<ModelSpec>>,
    /// Conformal factor from the explicit solution family, in place of `phi`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jl: Option<JLParams>,
}

fn parse(text: &str) -> Result<FieldExpr, SuiteError> {
    text.parse().map_err(|source| SuiteError::Parse {
        text: text.to_string(),
        source,
    })
}

impl ModelSpec {
    pub fn heisenberg(n: usize) -> Self {
        ModelSpec {
            kind: "heisenberg".into(),
            n: Some(n),
            phi: None,
            potential: None,
            base: None,
            jl: None,
        }
    }

    pub fn build(&self) -> Result<Model, SuiteError> {
        let need_n = || self.n.ok_or_else(|| SuiteError::Model(format!("`{}` model needs `n`", self.kind)));
        let potential = || {
            self.potential
                .as_deref()
                .ok_or_else(|| SuiteError::Model("rigid model needs `Phi`".into()))
                .and_then(parse)
        };
        match self.kind.as_str() {
            "heisenberg" => Ok(make_heisenberg(need_n()?)?),
            "rigid" => Ok(make_rigid(need_n()?, potential()?)?),
            "rigid-normalized" => Ok(levi_normalized(&make_rigid(need_n()?, potential()?)?)?),
            "conformal" => {
                let base = self
                    .base
                    .as_ref()
                    .ok_or_else(|| SuiteError::Model("conformal model needs `base`".into()))?
                    .build()?;
                if let Some(n) = self.n {
                    if n != base.n() {
                        return Err(SuiteError::Model(format!("n = {n} but base has n = {}", base.n())));
                    }
                }
                let phi = match (&self.phi, &self.jl) {
                    (Some(text), None) => parse(text)?,
                    (None, Some(params)) => jl_field(params, base.n())?,
                    _ => {
                        return Err(SuiteError::Model(
                            "conformal model needs exactly one of `phi` and `jl`".into(),
                        ))
                    }
                };
                Ok(apply_conformal(&base, phi)?)
            }
            other => Err(SuiteError::Model(format!("unknown model kind `{other}`"))),
        }
    }
}

/// Check names accepted by [`SuiteConfig`].
pub const CHECKS: [&str; 18] = [
    "structure",
    "commutation",
    "conformal-sublaplacian",
    "schwarzian-invariants",
    "additivity",
    "torsion-link",
    "curvature-symmetries",
    "conformal-laws",
    "bochner",
    "graham-lee",
    "jets-fd",
    "mobius",
    "hamiltonian",
    "torsion-rank",
    "witness",
    "chern-moser",
    "jl-curvature",
    "curvature-commutation",
];

/// Named groups of checks.
pub const SUITES: [(&str, &[&str]); 8] = [
    ("all", &CHECKS),
    ("commutation", &["commutation", "curvature-commutation"]),
    (
        "jerison-lee",
        &["mobius", "hamiltonian", "torsion-rank", "witness", "jl-curvature"],
    ),
    (
        "curvature",
        &["curvature-symmetries", "conformal-laws", "chern-moser", "curvature-commutation"],
    ),
    (
        "schwarzian",
        &["schwarzian-invariants", "additivity", "torsion-link", "conformal-sublaplacian"],
    ),
    ("bochner", &["bochner", "graham-lee"]),
    ("structure", &["structure"]),
    ("jets", &["jets-fd"]),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SuiteSelection {
    Name(String),
    Checks(Vec<String>),
}

impl SuiteSelection {
    fn resolve(&self) -> Result<Vec<&'static str>, SuiteError> {
        let lookup = |name: &str| -> Result<Vec<&'static str>, SuiteError> {
            if let Some((_, checks)) = SUITES.iter().find(|(s, _)| *s == name) {
                return Ok(checks.to_vec());
            }
            CHECKS
                .iter()
                .find(|c| **c == name)
                .map(|c| vec![*c])
                .ok_or_else(|| SuiteError::UnknownCheck(name.to_string()))
        };
        let mut out: Vec<&'static str> = Vec::new();
        let names: Vec<&str> = match self {
            SuiteSelection::Name(s) => vec![s.as_str()],
            SuiteSelection::Checks(v) => v.iter().map(String::as_str).collect(),
        };
        for name in names {
            for c in lookup(name)? {
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
        Ok(out)
    }

    fn label(&self) -> String {
        match self {
            SuiteSelection::Name(s) => s.clone(),
            SuiteSelection::Checks(v) => v.join(","),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub model: ModelSpec,
    pub suite: SuiteSelection,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// Overrides keyed by check name or by reported residual name.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

fn default_samples() -> usize {
    20
}

impl SuiteConfig {
    pub fn new(model: ModelSpec, suite: &str, samples: usize, seed: u64) -> Self {
        SuiteConfig {
            model,
            suite: SuiteSelection::Name(suite.to_string()),
            samples,
            seed,
            tolerances: BTreeMap::new(),
            out: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub model: ModelSpec,
    pub suite: String,
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<super::CheckResult>,
    pub wall_ms: u64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass || !c.asserted)
    }

    /// The report with `wall_ms` zeroed, for comparisons.
    pub fn without_timing(&self) -> Report {
        Report {
            wall_ms: 0,
            ..self.clone()
        }
    }
}

/// Residual names each check reports under.
fn reported_names(check: &str) -> &'static [&'static str] {
    match check {
        "hamiltonian" => &[
            "hamiltonian-infinitesimal-cr",
            "hamiltonian-reeb",
            "hamiltonian-vector-field",
        ],
        "jets-fd" => &["jets-fd-first", "jets-fd-second"],
        "chern-moser" => &["chern-moser"],
        _ => &[],
    }
}

fn check_seed(seed: u64, check: &str) -> u64 {
    check
        .bytes()
        .fold(seed ^ 0x9e37_79b9_7f4a_7c15, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

struct Runner<'a> {
    model: &'a Model,
    samples: usize,
    set: ResidualSet,
}

const MAX_ATTEMPTS: usize = 50;

impl Runner<'_> {
    fn n(&self) -> usize {
        self.model.n()
    }

    /// Point at which the model's frame is defined.
    fn point(&self, rng: &mut ChaCha8Rng) -> Result<Vec<f64>, SuiteError> {
        for _ in 0..MAX_ATTEMPTS {
            let p = random_point(rng, self.n());
            if Frame::at(self.model, &p, DEFAULT_FRAME_ORDER).is_ok() {
                return Ok(p);
            }
        }
        Err(GeometryError::Degenerate {
            invariant: "no admissible sample point".into(),
            value: self.model.describe(),
        }
        .into())
    }

    fn on_heisenberg(&self) -> bool {
        self.model.is_heisenberg()
    }

    fn run(&mut self, check: &str, seed: u64) -> Result<(), SuiteError> {
        let mut rng = ChaCha8Rng::seed_from_u64(check_seed(seed, check));
        let rng = &mut rng;
        let n = self.n();
        let m = self.model;
        for _ in 0..self.samples {
            match check {
                "structure" => {
                    let p = self.point(rng)?;
                    let r = structure_residuals(&Frame::at(m, &p, DEFAULT_FRAME_ORDER)?);
                    self.set.record(check, r.max(), &p, 1e-9, true);
                }
                "commutation" => {
                    let p = self.point(rng)?;
                    let r = commutation_residuals(m, &random_field(rng, n), &p)?;
                    self.set.record(check, r.max(), &p, 1e-7, true);
                }
                "curvature-commutation" => {
                    let p = self.point(rng)?;
                    let r = commutation_residuals(m, &random_field(rng, n), &p)?;
                    let v = r.get("third-curvature").unwrap_or(f64::NAN);
                    self.set.record(check, v, &p, 1e-7, true);
                }
                "conformal-sublaplacian" => {
                    let p = self.point(rng)?;
                    let (phi, sigma) = (random_conformal(rng, n), random_field(rng, n));
                    let r = conformal_sublaplacian_residual(m, &phi, &sigma, &p)?;
                    self.set.record(check, r, &p, 1e-8, true);
                }
                "schwarzian-invariants" => {
                    let p = self.point(rng)?;
                    let s = schwarzian_at(m, &random_field(rng, n), &p)?;
                    self.set.record(check, s.symmetry_residual().max(s.trace.norm()), &p, 1e-10, true);
                }
                "additivity" => {
                    let p = self.point(rng)?;
                    let (phi, sigma) = (random_conformal(rng, n), random_field(rng, n));
                    self.set.record(check, additivity_residual(m, &phi, &sigma, &p)?, &p, 1e-8, true);
                }
                "torsion-link" => {
                    let p = self.point(rng)?;
                    let r = torsion_link_residual(m, &random_conformal(rng, n), &p)?;
                    self.set.record(check, r, &p, 1e-9, true);
                }
                "curvature-symmetries" => {
                    let p = self.point(rng)?;
                    let c = Curvature::of(&Frame::at(m, &p, DEFAULT_FRAME_ORDER)?);
                    let r = c
                        .symmetry_residual()
                        .max(c.closure)
                        .max(c.trace_chain_residual())
                        .max(c.chern_moser_trace());
                    self.set.record(check, r, &p, 1e-8, true);
                }
                "conformal-laws" => {
                    let p = self.point(rng)?;
                    let r = conformal_transform_residuals(m, &random_conformal(rng, n), &p)?;
                    self.set.record(check, r.max(), &p, 1e-7, true);
                }
                "bochner" => {
                    let p = self.point(rng)?;
                    self.set.record(check, bochner_residual(m, &random_field(rng, n), &p)?, &p, 1e-6, true);
                }
                "graham-lee" => {
                    let p = self.point(rng)?;
                    let r = graham_lee_residual(m, &random_field(rng, n), &p)?;
                    self.set.record(check, r, &p, 1e-6, n >= 2);
                }
                "jets-fd" => {
                    let p = random_point(rng, n);
                    let f = random_field(rng, n);
                    let coord = rng.gen_range(0..2 * n + 1);
                    self.set.record("jets-fd-first", fd_crosscheck(&f, &p, coord, 1).map_err(GeometryError::from)?, &p, 1e-5, true);
                    self.set.record("jets-fd-second", fd_crosscheck(&f, &p, coord, 2).map_err(GeometryError::from)?, &p, 1e-3, true);
                }
                "chern-moser" => {
                    if n < 2 {
                        return Ok(());
                    }
                    let p = self.point(rng)?;
                    let c = Curvature::of(&Frame::at(m, &p, DEFAULT_FRAME_ORDER)?);
                    let spherical = m.root().is_heisenberg();
                    self.set.record(check, c.chern_moser_norm(), &p, 1e-7, spherical);
                }
                "mobius" | "hamiltonian" | "torsion-rank" | "jl-curvature" => {
                    if !self.on_heisenberg() || (check == "torsion-rank" && n < 2) {
                        return Ok(());
                    }
                    let params = random_jl_params(rng, n);
                    let phi = jl_field(&params, n)?;
                    let p = jl_point(rng, &params, 0.1).ok_or_else(|| {
                        SuiteError::Model("no sample point with |G| > 0.1".into())
                    })?;
                    match check {
                        "mobius" => {
                            let r = mobius_residual(m, &phi, std::slice::from_ref(&p))?;
                            self.set.record(check, r.max_b.max(r.max_p), &p, 1e-9, true);
                        }
                        "hamiltonian" => {
                            for c in hamiltonian_check(m, &phi, &p)?.checks {
                                self.set.record(&c.name, c.max_residual, &p, c.tolerance, c.asserted);
                            }
                        }
                        "torsion-rank" => {
                            let r = torsion_rank_check(m, &phi, std::slice::from_ref(&p))?;
                            for c in r.checks {
                                self.set.record(check, c.max_residual, &p, c.tolerance, true);
                            }
                        }
                        _ => {
                            let c = Curvature::of(&Frame::at(
                                &apply_conformal(m, phi)?,
                                &p,
                                DEFAULT_FRAME_ORDER,
                            )?);
                            self.set.record(check, c.fit.residual, &p, 1e-6, true);
                        }
                    }
                }
                "witness" => {
                    if !self.on_heisenberg() {
                        return Ok(());
                    }
                    let p = random_point(rng, n);
                    let omega: Vec<Complex64> = (0..n).map(|_| random_complex(rng, 1.0)).collect();
                    self.set.record(check, witness_residual(n, &p, &omega)?, &p, 1e-12, true);
                }
                other => return Err(SuiteError::UnknownCheck(other.to_string())),
            }
        }
        Ok(())
    }
}

/// Runs the selected checks on seeded random samples.
pub fn run_suite(config: &SuiteConfig) -> Result<Report, SuiteError> {
    let start = Instant::now();
    if config.samples == 0 {
        return Err(SuiteError::NoSamples);
    }
    let checks = config.suite.resolve()?;
    for name in config.tolerances.keys() {
        let known = CHECKS.contains(&name.as_str()) || CHECKS.iter().any(|c| reported_names(c).contains(&name.as_str()));
        if !known {
            return Err(SuiteError::UnknownCheck(name.clone()));
        }
    }
    let model = config.model.build()?;
    let mut runner = Runner {
        model: &model,
        samples: config.samples,
        set: ResidualSet::default(),
    };
    for check in &checks {
        runner.run(check, config.seed)?;
    }
    let mut set = runner.set;
    for (name, tol) in &config.tolerances {
        set.set_tolerance(name, *tol);
        for sub in reported_names(name) {
            set.set_tolerance(sub, *tol);
        }
    }
    Ok(Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        model: config.model.clone(),
        suite: config.suite.label(),
        seed: config.seed,
        samples: config.samples,
        checks: set.checks,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}
