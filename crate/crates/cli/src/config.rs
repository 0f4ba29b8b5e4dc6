//! Scenario files: JSON with a `kind` discriminator and a `schema_version`.

use qrf_core::spacetime::GeometryDocument;
use qrf_core::{BranchGeometry, Complex64, GeometrySuperposition, TranslationScenario};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Amplitude as `[re, im]`.
pub type Amplitude = [f64; 2];

fn complex(a: Amplitude) -> Complex64 {
    Complex64::new(a[0], a[1])
}

fn default_lattice() -> usize {
    qrf_core::translation::DEFAULT_LATTICE
}

/// Which physical picture of the reference fields a spacetime scenario
/// assumes. Recorded in the report; it does not change any computation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceModel {
    #[default]
    Idealised,
    DynamicalNoBackreaction,
    DynamicalWithBackreaction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchSpec {
    pub amplitude: Amplitude,
    pub geometry: GeometryDocument,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Scenario {
    TranslationTwoBody {
        #[serde(default = "default_lattice")]
        lattice_size: usize,
        alpha: Amplitude,
        beta: Amplitude,
        separation: usize,
    },
    TranslationThreeBody {
        #[serde(default = "default_lattice")]
        lattice_size: usize,
        /// `(q₁, q₂, q₃)` per branch.
        positions: [[usize; 3]; 2],
        alpha: Amplitude,
        beta: Amplitude,
    },
    SpacetimeSuperposition {
        branches: Vec<BranchSpec>,
        /// Field set defining the comparison map.
        field: String,
        /// Second field set; enables the frame change and localisation scan.
        #[serde(default)]
        alt_field: Option<String>,
        #[serde(default)]
        observables: Vec<String>,
        /// Two worldline names whose crossings define events.
        #[serde(default)]
        worldlines: Option<[String; 2]>,
        #[serde(default)]
        reference_model: ReferenceModel,
    },
    PropertySuite {
        seed: u64,
        cases: usize,
    },
}

impl Scenario {
    pub fn kind(&self) -> &'static str {
        match self {
            Scenario::TranslationTwoBody { .. } => "translation_two_body",
            Scenario::TranslationThreeBody { .. } => "translation_three_body",
            Scenario::SpacetimeSuperposition { .. } => "spacetime_superposition",
            Scenario::PropertySuite { .. } => "property_suite",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    #[serde(flatten)]
    pub scenario: Scenario,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario) -> Self {
        ScenarioConfig { schema_version: SCHEMA_VERSION, scenario }
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| CliError::validation(format!("scenario file: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every kind-specific parameter before anything runs.
    pub fn validate(&self) -> CliResult<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::validation(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let invalid = |e: qrf_core::Error| CliError::validation(e.to_string());
        match &self.scenario {
            Scenario::TranslationTwoBody { .. } => {
                self.translation_two_body()?;
            }
            Scenario::TranslationThreeBody { lattice_size, positions, alpha, beta } => {
                if *lattice_size < 4 {
                    return Err(CliError::validation(format!("lattice size {lattice_size} < 4")));
                }
                if let Some(q) = positions.iter().flatten().find(|&&q| q >= *lattice_size) {
                    return Err(CliError::validation(format!("position {q} outside Z{lattice_size}")));
                }
                if positions[0][0] != positions[1][0] {
                    return Err(CliError::validation("particle 1 must sit at the same point in both branches"));
                }
                let norm = complex(*alpha).norm_sqr() + complex(*beta).norm_sqr();
                if (norm - 1.0).abs() > qrf_core::qstate::NORM_TOLERANCE {
                    return Err(CliError::validation(format!("|alpha|^2 + |beta|^2 = {norm}, expected 1")));
                }
            }
            Scenario::SpacetimeSuperposition { field, alt_field, observables, worldlines, .. } => {
                let s = self.superposition()?;
                for (i, (_, g)) in s.branches().iter().enumerate() {
                    let missing = |what: &str, name: &str| {
                        CliError::validation(format!("branch {i} has no {what} '{name}'"))
                    };
                    for f in std::iter::once(field).chain(alt_field) {
                        g.fields(f).map_err(|_| missing("field set", f))?;
                    }
                    for o in observables {
                        g.observable(o).map_err(|_| missing("observable", o))?;
                    }
                    for w in worldlines.iter().flatten() {
                        g.worldline(w).map_err(|_| missing("worldline", w))?;
                    }
                }
                if s.len() < 2 {
                    return Err(CliError::validation("a spacetime superposition needs at least two branches"));
                }
                s.branches().iter().try_for_each(|(_, g)| g.validate()).map_err(invalid)?;
            }
            Scenario::PropertySuite { cases, .. } => {
                if *cases == 0 {
                    return Err(CliError::validation("case count must be at least 1"));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn translation_two_body(&self) -> CliResult<TranslationScenario> {
        match &self.scenario {
            Scenario::TranslationTwoBody { lattice_size, alpha, beta, separation } => {
                TranslationScenario::new(*lattice_size, complex(*alpha), complex(*beta), *separation)
                    .map_err(|e| CliError::validation(e.to_string()))
            }
            _ => Err(CliError::Internal("not a two-body scenario".into())),
        }
    }

    pub(crate) fn superposition(&self) -> CliResult<GeometrySuperposition> {
        match &self.scenario {
            Scenario::SpacetimeSuperposition { branches, .. } => {
                let invalid = |e: qrf_core::Error| CliError::validation(e.to_string());
                let geoms = branches
                    .iter()
                    .map(|b| Ok((complex(b.amplitude), BranchGeometry::from_document(&b.geometry).map_err(invalid)?)))
                    .collect::<CliResult<Vec<_>>>()?;
                GeometrySuperposition::new(geoms).map_err(invalid)
            }
            _ => Err(CliError::Internal("not a spacetime scenario".into())),
        }
    }
}

pub(crate) fn amplitude(a: Amplitude) -> Complex64 {
    complex(a)
}
