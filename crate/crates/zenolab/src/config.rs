//! JSON scenario configurations for the command-line front end.
//!
//! Every command takes one JSON document. Unknown keys are rejected, every
//! physical parameter is validated against the module preconditions before
//! any computation starts, and the parsed configuration is echoed verbatim
//! into the output header, so no silent defaulting can occur.
//!
//! Complex numbers are written as `[re, im]` pairs; matrices as row-major
//! nested arrays of such pairs.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::continuum::FieldModel;
use crate::error::{Error, Result};
use crate::qdyn::{OperatorMatrix, StateVector};
use crate::resolvent::{FormFactor, Sheet};

/// Schema version stamped into configs and outputs.
pub const SCHEMA_VERSION: u32 = 1;

const MAX_MATRIX_DIM: usize = 512;
const MAX_TIME_POINTS: usize = 10_000_000;
const MAX_FIELD_MODES: usize = 4_194_304;
const MAX_LIST_LEN: usize = 1_000_000;
const MAX_SWEEP_POINTS: usize = 10_000;
const MAX_WORKERS: usize = 1024;

/// The CLI subcommands that take a scenario configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Survival,
    Pulsed,
    Continuous,
    Fieldsim,
    Selfenergy,
    Pole,
    Invert,
    Regimes,
    Sweep,
}

impl CommandKind {
    pub const ALL: [CommandKind; 9] = [
        CommandKind::Survival,
        CommandKind::Pulsed,
        CommandKind::Continuous,
        CommandKind::Fieldsim,
        CommandKind::Selfenergy,
        CommandKind::Pole,
        CommandKind::Invert,
        CommandKind::Regimes,
        CommandKind::Sweep,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CommandKind::Survival => "survival",
            CommandKind::Pulsed => "pulsed",
            CommandKind::Continuous => "continuous",
            CommandKind::Fieldsim => "fieldsim",
            CommandKind::Selfenergy => "selfenergy",
            CommandKind::Pole => "pole",
            CommandKind::Invert => "invert",
            CommandKind::Regimes => "regimes",
            CommandKind::Sweep => "sweep",
        }
    }
}

/// `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPair(pub f64, pub f64);

impl ComplexPair {
    pub fn to_c64(self) -> C64 {
        C64::new(self.0, self.1)
    }
}

/// Inline complex matrix with a declared Hermiticity flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub dim: usize,
    pub hermitian: bool,
    pub entries: Vec<Vec<ComplexPair>>,
}

impl MatrixSpec {
    pub fn build(&self) -> Result<OperatorMatrix> {
        if self.dim == 0 || self.dim > MAX_MATRIX_DIM {
            return Err(Error::Config(format!(
                "field 'dim': must be between 1 and {MAX_MATRIX_DIM}, got {}",
                self.dim
            )));
        }
        if self.entries.len() != self.dim
            || self.entries.iter().any(|row| row.len() != self.dim)
        {
            return Err(Error::Config(format!(
                "field 'entries': expected {dim} rows of {dim} [re, im] pairs",
                dim = self.dim
            )));
        }
        let flat: Vec<C64> =
            self.entries.iter().flatten().map(|pair| pair.to_c64()).collect();
        let result = if self.hermitian {
            OperatorMatrix::hermitian_from_rows(self.dim, &flat)
        } else {
            OperatorMatrix::general_from_rows(self.dim, &flat)
        };
        result.map_err(|e| Error::Config(format!("field 'entries': {e}")))
    }
}

/// Unit-norm initial state as a list of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpec(pub Vec<ComplexPair>);

impl StateSpec {
    pub fn build(&self) -> Result<StateVector> {
        if self.0.len() > MAX_MATRIX_DIM {
            return Err(Error::Config(format!(
                "field 'initial_state': dimension cap is {MAX_MATRIX_DIM}"
            )));
        }
        StateVector::initial(self.0.iter().map(|p| p.to_c64()).collect())
            .map_err(|e| Error::Config(format!("field 'initial_state': {e}")))
    }
}

/// Uniform time grid; `count = 1` yields the single point `start`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl TimeGridSpec {
    pub fn build(&self) -> Result<Vec<f64>> {
        if self.count == 0 || self.count > MAX_TIME_POINTS {
            return Err(Error::Config(format!(
                "field 'times.count': must be between 1 and {MAX_TIME_POINTS}"
            )));
        }
        if !self.start.is_finite() || !self.stop.is_finite() || self.stop < self.start {
            return Err(Error::Config(
                "field 'times': start and stop must be finite with stop >= start".into(),
            ));
        }
        if self.count == 1 {
            return Ok(vec![self.start]);
        }
        if self.stop == self.start {
            return Err(Error::Config(
                "field 'times': stop must exceed start when count > 1".into(),
            ));
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        Ok((0..self.count).map(|k| self.start + step * k as f64).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<String>,
    #[serde(default)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurvivalConfig {
    pub schema_version: u32,
    pub hamiltonian: MatrixSpec,
    pub initial_state: StateSpec,
    pub times: TimeGridSpec,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulsedConfig {
    pub schema_version: u32,
    /// Rabi coupling of the monitored two-level system.
    pub omega: f64,
    pub total_time: f64,
    #[serde(default)]
    pub pulses: Option<u32>,
    #[serde(default)]
    pub pulse_list: Option<Vec<u32>>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

impl PulsedConfig {
    pub fn pulse_counts(&self) -> Result<Vec<u32>> {
        match (&self.pulses, &self.pulse_list) {
            (Some(n), None) => Ok(vec![*n]),
            (None, Some(list)) => {
                if list.is_empty() || list.len() > MAX_LIST_LEN {
                    return Err(Error::Config(
                        "field 'pulse_list': must be non-empty (and bounded)".into(),
                    ));
                }
                Ok(list.clone())
            }
            _ => Err(Error::Config(
                "exactly one of 'pulses' and 'pulse_list' must be given".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuousConfig {
    pub schema_version: u32,
    pub omega: f64,
    /// Absorber strength; alternatively give the flat-coupling rate `gamma = 4 v`.
    #[serde(default)]
    pub v: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    pub times: TimeGridSpec,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

impl ContinuousConfig {
    pub fn absorber_strength(&self) -> Result<f64> {
        match (self.v, self.gamma) {
            (Some(v), None) => Ok(v),
            (None, Some(gamma)) => Ok(gamma / 4.0),
            _ => Err(Error::Config("exactly one of 'v' and 'gamma' must be given".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldsimConfig {
    pub schema_version: u32,
    pub omega: f64,
    pub gamma: f64,
    pub window: f64,
    pub modes: usize,
    pub dt: f64,
    pub total_time: f64,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

impl FieldsimConfig {
    pub fn build_model(&self) -> Result<FieldModel> {
        if self.modes > MAX_FIELD_MODES {
            return Err(Error::Config(format!(
                "field 'modes': cap is {MAX_FIELD_MODES}"
            )));
        }
        if !self.total_time.is_finite() || self.total_time <= 0.0 {
            return Err(Error::Config("field 'total_time': must be finite and > 0".into()));
        }
        FieldModel::new(self.omega, self.gamma, self.window, self.modes, self.dt)
            .map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelfEnergyPoint {
    pub e: ComplexPair,
    pub sheet: Sheet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelfenergyConfig {
    pub schema_version: u32,
    pub form_factor: FormFactor,
    pub evaluations: Vec<SelfEnergyPoint>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoleConfig {
    pub schema_version: u32,
    pub form_factor: FormFactor,
    pub omega0: f64,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvertConfig {
    pub schema_version: u32,
    pub form_factor: FormFactor,
    pub omega0: f64,
    pub times: TimeGridSpec,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimesConfig {
    pub schema_version: u32,
    pub form_factor: FormFactor,
    pub omega0: f64,
    pub times: TimeGridSpec,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepCommand {
    Pulsed,
    Continuous,
    Fieldsim,
}

impl SweepCommand {
    pub fn kind(&self) -> CommandKind {
        match self {
            SweepCommand::Pulsed => CommandKind::Pulsed,
            SweepCommand::Continuous => CommandKind::Continuous,
            SweepCommand::Fieldsim => CommandKind::Fieldsim,
        }
    }
}

/// Varies one top-level parameter of a base configuration over a list of
/// values; the per-point runs are independent and may execute in parallel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub schema_version: u32,
    pub command: SweepCommand,
    pub parameter: String,
    pub values: Vec<f64>,
    pub base: serde_json::Value,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

impl SweepConfig {
    /// Base config with the swept parameter replaced. Integral values are
    /// inserted as JSON integers so integer-typed fields (pulse counts,
    /// mode counts) accept them.
    pub fn point_config(&self, value: f64) -> Result<ScenarioConfig> {
        let mut object = match &self.base {
            serde_json::Value::Object(map) => map.clone(),
            _ => return Err(Error::Config("field 'base': must be a JSON object".into())),
        };
        let json_value = if value.fract() == 0.0 && value.abs() < 9e15 {
            serde_json::Value::from(value as i64)
        } else {
            serde_json::Value::from(value)
        };
        object.insert(self.parameter.clone(), json_value);
        let bytes = serde_json::to_vec(&serde_json::Value::Object(object))
            .map_err(|e| Error::Config(e.to_string()))?;
        ScenarioConfig::parse(self.command.kind(), &bytes)
    }
}

/// A parsed, validated scenario configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioConfig {
    Survival(SurvivalConfig),
    Pulsed(PulsedConfig),
    Continuous(ContinuousConfig),
    Fieldsim(FieldsimConfig),
    Selfenergy(SelfenergyConfig),
    Pole(PoleConfig),
    Invert(InvertConfig),
    Regimes(RegimesConfig),
    Sweep(SweepConfig),
}

fn from_slice<T: serde::de::DeserializeOwned>(data: &[u8]) -> Result<T> {
    serde_json::from_slice(data).map_err(|e| Error::Config(e.to_string()))
}

impl ScenarioConfig {
    /// Parses and validates the configuration for one command. This is the
    /// only entry point through which external bytes reach the library.
    pub fn parse(kind: CommandKind, data: &[u8]) -> Result<Self> {
        let config = match kind {
            CommandKind::Survival => Self::Survival(from_slice(data)?),
            CommandKind::Pulsed => Self::Pulsed(from_slice(data)?),
            CommandKind::Continuous => Self::Continuous(from_slice(data)?),
            CommandKind::Fieldsim => Self::Fieldsim(from_slice(data)?),
            CommandKind::Selfenergy => Self::Selfenergy(from_slice(data)?),
            CommandKind::Pole => Self::Pole(from_slice(data)?),
            CommandKind::Invert => Self::Invert(from_slice(data)?),
            CommandKind::Regimes => Self::Regimes(from_slice(data)?),
            CommandKind::Sweep => Self::Sweep(from_slice(data)?),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn kind(&self) -> CommandKind {
        match self {
            Self::Survival(_) => CommandKind::Survival,
            Self::Pulsed(_) => CommandKind::Pulsed,
            Self::Continuous(_) => CommandKind::Continuous,
            Self::Fieldsim(_) => CommandKind::Fieldsim,
            Self::Selfenergy(_) => CommandKind::Selfenergy,
            Self::Pole(_) => CommandKind::Pole,
            Self::Invert(_) => CommandKind::Invert,
            Self::Regimes(_) => CommandKind::Regimes,
            Self::Sweep(_) => CommandKind::Sweep,
        }
    }

    pub fn output(&self) -> Option<&OutputSpec> {
        match self {
            Self::Survival(c) => c.output.as_ref(),
            Self::Pulsed(c) => c.output.as_ref(),
            Self::Continuous(c) => c.output.as_ref(),
            Self::Fieldsim(c) => c.output.as_ref(),
            Self::Selfenergy(c) => c.output.as_ref(),
            Self::Pole(c) => c.output.as_ref(),
            Self::Invert(c) => c.output.as_ref(),
            Self::Regimes(c) => c.output.as_ref(),
            Self::Sweep(c) => c.output.as_ref(),
        }
    }

    /// The configuration as a JSON value, for echoing into output headers.
    pub fn echo_value(&self) -> serde_json::Value {
        let result = match self {
            Self::Survival(c) => serde_json::to_value(c),
            Self::Pulsed(c) => serde_json::to_value(c),
            Self::Continuous(c) => serde_json::to_value(c),
            Self::Fieldsim(c) => serde_json::to_value(c),
            Self::Selfenergy(c) => serde_json::to_value(c),
            Self::Pole(c) => serde_json::to_value(c),
            Self::Invert(c) => serde_json::to_value(c),
            Self::Regimes(c) => serde_json::to_value(c),
            Self::Sweep(c) => serde_json::to_value(c),
        };
        result.expect("configs serialize infallibly")
    }

    fn schema_version(&self) -> u32 {
        match self {
            Self::Survival(c) => c.schema_version,
            Self::Pulsed(c) => c.schema_version,
            Self::Continuous(c) => c.schema_version,
            Self::Fieldsim(c) => c.schema_version,
            Self::Selfenergy(c) => c.schema_version,
            Self::Pole(c) => c.schema_version,
            Self::Invert(c) => c.schema_version,
            Self::Regimes(c) => c.schema_version,
            Self::Sweep(c) => c.schema_version,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version() != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "field 'schema_version': expected {SCHEMA_VERSION}, got {}",
                self.schema_version()
            )));
        }
        match self {
            Self::Survival(c) => {
                let h = c.hamiltonian.build()?;
                let psi0 = c.initial_state.build()?;
                if h.dim() != psi0.dim() {
                    return Err(Error::Config(format!(
                        "field 'initial_state': dimension {} does not match the {}x{} \
                         Hamiltonian",
                        psi0.dim(),
                        h.dim(),
                        h.dim()
                    )));
                }
                c.times.build()?;
            }
            Self::Pulsed(c) => {
                check_positive(c.omega, "omega")?;
                check_positive(c.total_time, "total_time")?;
                for n in c.pulse_counts()? {
                    if n == 0 {
                        return Err(Error::Config(
                            "field 'pulse_list': pulse counts must be >= 1".into(),
                        ));
                    }
                }
            }
            Self::Continuous(c) => {
                check_positive(c.omega, "omega")?;
                let v = c.absorber_strength()?;
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Config(
                        "field 'v'/'gamma': absorber strength must be finite and >= 0".into(),
                    ));
                }
                c.times.build()?;
            }
            Self::Fieldsim(c) => {
                c.build_model()?;
            }
            Self::Selfenergy(c) => {
                c.form_factor.validate().map_err(|e| Error::Config(e.to_string()))?;
                if c.evaluations.is_empty() || c.evaluations.len() > MAX_LIST_LEN {
                    return Err(Error::Config(
                        "field 'evaluations': must be non-empty (and bounded)".into(),
                    ));
                }
                for point in &c.evaluations {
                    let e = point.e.to_c64();
                    if !e.re.is_finite() || !e.im.is_finite() {
                        return Err(Error::Config(
                            "field 'evaluations': points must be finite".into(),
                        ));
                    }
                }
            }
            Self::Pole(c) => {
                check_embedded(&c.form_factor, c.omega0)?;
            }
            Self::Invert(c) => {
                check_embedded(&c.form_factor, c.omega0)?;
                c.times.build()?;
            }
            Self::Regimes(c) => {
                check_embedded(&c.form_factor, c.omega0)?;
                c.times.build()?;
            }
            Self::Sweep(c) => {
                if c.values.is_empty() {
                    return Err(Error::Config("field 'values': sweep list is empty".into()));
                }
                if c.values.len() > MAX_SWEEP_POINTS {
                    return Err(Error::Config(format!(
                        "field 'values': cap is {MAX_SWEEP_POINTS} sweep points"
                    )));
                }
                if c.values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Config("field 'values': must be finite".into()));
                }
                if c.parameter.is_empty() || c.parameter.len() > 64 {
                    return Err(Error::Config("field 'parameter': invalid name".into()));
                }
                if let Some(w) = c.workers {
                    if w == 0 || w > MAX_WORKERS {
                        return Err(Error::Config(format!(
                            "field 'workers': must be between 1 and {MAX_WORKERS}"
                        )));
                    }
                }
                // every sweep point must itself validate
                for &value in &c.values {
                    c.point_config(value)?;
                }
            }
        }
        Ok(())
    }
}

fn check_positive(value: f64, field: &str) -> Result<()> {
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::Config(format!("field '{field}': must be finite and > 0")));
    }
    Ok(())
}

fn check_embedded(ff: &FormFactor, omega0: f64) -> Result<()> {
    ff.validate().map_err(|e| Error::Config(e.to_string()))?;
    if !omega0.is_finite() || !ff.strictly_inside_support(omega0) {
        return Err(Error::Config(
            "field 'omega0': must lie strictly inside the continuum support".into(),
        ));
    }
    Ok(())
}
