//! Run configuration: a flat JSON object, optionally overridden by flags,
//! validated into the typed inputs the commands need.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use weakcrit_core::criticality;
use weakcrit_core::{
    BlochVector, ComplexMatrix, CouplingSpec, DSign, Interaction, MeterObservable, MeterState,
    ProtocolConfig, SystemPreparation, Tolerances, C64,
};

use crate::error::CliError;
use crate::expr;

pub const CONFIG_VERSION: u32 = 1;

/// A real number given either as a JSON number or as an expression string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scalar(pub f64);

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(Scalar(v)),
            Raw::Text(s) => expr::eval(&s).map(Scalar).map_err(serde::de::Error::custom),
        }
    }
}

impl std::str::FromStr for Scalar {
    type Err = expr::ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        expr::eval(s).map(Scalar)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionKind {
    ExactQubit,
    FirstOrder,
    SyntheticQuadratic,
}

impl std::str::FromStr for InteractionKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact_qubit" | "exact-qubit" => Ok(Self::ExactQubit),
            "first_order" | "first-order" => Ok(Self::FirstOrder),
            "synthetic_quadratic" | "synthetic-quadratic" => Ok(Self::SyntheticQuadratic),
            other => Err(format!("unknown interaction '{other}'")),
        }
    }
}

/// `"sigma_x"` or a list of diagonal entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeterObsSpec {
    Named(String),
    Diagonal(Vec<Scalar>),
}

impl std::str::FromStr for MeterObsSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s.contains(',') || s.parse::<Scalar>().is_ok() {
            parse_list(s).map(MeterObsSpec::Diagonal)
        } else {
            Ok(MeterObsSpec::Named(s.to_string()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleSuite {
    ExactQubit,
    FirstOrder,
    All,
}

/// Range `start:stop:points`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl std::str::FromStr for GridSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts.as_slice() else {
            return Err(format!("grid '{s}' is not start:stop:points"));
        };
        Ok(Self {
            start: a.parse::<Scalar>().map_err(|e| e.to_string())?.0,
            stop: b.parse::<Scalar>().map_err(|e| e.to_string())?.0,
            points: c
                .trim()
                .parse()
                .map_err(|_| format!("grid point count '{c}' is not an integer"))?,
        })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.points)
    }
}

impl Serialize for GridSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GridSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Log-spaced fit window `lo:hi:per_decade`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    pub lo: f64,
    pub hi: f64,
    pub per_decade: usize,
}

impl std::str::FromStr for WindowSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let g: GridSpec = s.parse().map_err(|_| format!("window '{s}' is not lo:hi:per_decade"))?;
        Ok(Self {
            lo: g.start,
            hi: g.stop,
            per_decade: g.points,
        })
    }
}

impl fmt::Display for WindowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.per_decade)
    }
}

impl Serialize for WindowSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WindowSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

pub fn parse_list(s: &str) -> Result<Vec<Scalar>, String> {
    s.split(',')
        .map(|p| p.parse::<Scalar>().map_err(|e| e.to_string()))
        .collect()
}

/// Every knob of every subcommand. Angles are in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub theta_rad: Scalar,
    pub alpha_rad: Scalar,
    /// Single post-selection angle for `trajectory`.
    pub phi_rad: Option<Scalar>,
    pub gamma_inv_time: Scalar,
    pub time: Scalar,
    /// Dimensionless coupling; overrides `gamma_inv_time·time` when set.
    pub gt: Option<Scalar>,
    pub interaction: InteractionKind,
    /// Divergence location of the synthetic fixture.
    pub synthetic_phi_c_rad: Scalar,
    pub meter_dim: Option<usize>,
    pub meter_obs: MeterObsSpec,
    /// Bloch vector `[rx, ry, rz]` for a qubit meter, otherwise real
    /// amplitudes in the computational basis.
    pub initial: Option<Vec<Scalar>>,
    pub n: Vec<usize>,
    pub phi_grid: GridSpec,
    pub fit_window: WindowSpec,
    /// Grid used to locate critical angles.
    pub scan_points: usize,
    pub observables: Vec<String>,
    pub trials: usize,
    pub oracle_steps: usize,
    pub oracle_suite: OracleSuite,
    pub first_order_gt: Scalar,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub debug_flip_d: bool,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            theta_rad: Scalar(PI / 4.0),
            alpha_rad: Scalar(PI / 7.0),
            phi_rad: None,
            gamma_inv_time: Scalar(0.001),
            time: Scalar(1.0),
            gt: None,
            interaction: InteractionKind::ExactQubit,
            synthetic_phi_c_rad: Scalar(PI / 2.0),
            meter_dim: None,
            meter_obs: MeterObsSpec::Named("sigma_x".into()),
            initial: None,
            n: vec![1],
            phi_grid: GridSpec {
                start: 0.0,
                stop: PI,
                points: 2001,
            },
            fit_window: WindowSpec {
                lo: 1e-4,
                hi: 1e-2,
                per_decade: 20,
            },
            scan_points: 1025,
            observables: vec!["sigma_x".into()],
            trials: 200,
            oracle_steps: 100,
            oracle_suite: OracleSuite::All,
            first_order_gt: Scalar(1e-3),
            seed: 0,
            jobs: None,
            debug_flip_d: false,
            tolerances: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::usage(format!("config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn coupling_product(&self) -> f64 {
        match self.gt {
            Some(g) => g.0,
            None => self.gamma_inv_time.0 * self.time.0,
        }
    }

    fn coupling(&self) -> Result<CouplingSpec, CliError> {
        match self.gt {
            Some(g) => CouplingSpec::from_product(g.0),
            None => CouplingSpec::new(self.gamma_inv_time.0, self.time.0),
        }
        .map_err(CliError::usage_from)
    }

    pub fn meter_observable(&self) -> Result<MeterObservable, CliError> {
        let obs = match &self.meter_obs {
            MeterObsSpec::Named(name) if name == "sigma_x" => MeterObservable::sigma_x(),
            MeterObsSpec::Named(name) => {
                return Err(CliError::usage(format!(
                    "unknown meter observable '{name}' (use sigma_x or a diagonal list)"
                )))
            }
            MeterObsSpec::Diagonal(values) => {
                let v: Vec<f64> = values.iter().map(|s| s.0).collect();
                MeterObservable::diagonal(&v).map_err(CliError::usage_from)?
            }
        };
        if let Some(n) = self.meter_dim {
            if n != obs.dimension() {
                return Err(CliError::usage(format!(
                    "meter_dim {n} does not match the {}-level meter observable",
                    obs.dimension()
                )));
            }
        }
        Ok(obs)
    }

    pub fn protocol(&self) -> Result<ProtocolConfig, CliError> {
        let prep = SystemPreparation::new(self.theta_rad.0).map_err(CliError::usage_from)?;
        let coupling = self.coupling()?;
        let interaction = match self.interaction {
            InteractionKind::ExactQubit => {
                if let MeterObsSpec::Diagonal(_) = self.meter_obs {
                    return Err(CliError::usage(
                        "exact_qubit interaction couples through sigma_x only",
                    ));
                }
                if self.meter_dim.is_some_and(|n| n != 2) {
                    return Err(CliError::usage("exact_qubit interaction needs meter_dim 2"));
                }
                Interaction::ExactQubit
            }
            InteractionKind::FirstOrder => {
                let obs = self.meter_observable()?;
                if coupling.product() > self.tolerances.weakness_bound {
                    return Err(CliError::usage(format!(
                        "gt = {} exceeds the first-order weakness bound {}",
                        coupling.product(),
                        self.tolerances.weakness_bound
                    )));
                }
                Interaction::FirstOrder(obs)
            }
            InteractionKind::SyntheticQuadratic => Interaction::SyntheticQuadratic {
                phi_c: self.synthetic_phi_c_rad.0,
            },
        };
        if !self.alpha_rad.0.is_finite() {
            return Err(CliError::usage("alpha must be finite"));
        }
        Ok(ProtocolConfig {
            prep,
            alpha: self.alpha_rad.0,
            coupling,
            interaction,
            d_sign: if self.debug_flip_d {
                DSign::Flipped
            } else {
                DSign::Consistent
            },
        })
    }

    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        let g = self.phi_grid;
        let grid =
            criticality::uniform_grid(g.start, g.stop, g.points).map_err(CliError::usage_from)?;
        criticality::validate_phi_grid(&grid).map_err(CliError::usage_from)?;
        Ok(grid)
    }

    pub fn offsets(&self) -> Result<Vec<f64>, CliError> {
        let w = self.fit_window;
        criticality::log_spaced_offsets(w.lo, w.hi, w.per_decade).map_err(CliError::usage_from)
    }

    pub fn iteration_counts(&self) -> Result<Vec<usize>, CliError> {
        if self.n.is_empty() {
            return Err(CliError::usage("iteration count list is empty"));
        }
        Ok(self.n.clone())
    }

    pub fn initial_state(&self, dim: usize) -> Result<MeterState, CliError> {
        let Some(values) = &self.initial else {
            if dim == 2 {
                return Ok(MeterState::from_bloch(BlochVector::new(0.0, 0.0, 1.0))
                    .expect("unit z vector is a valid state"));
            }
            let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
            return MeterState::from_unnormalized(&vec![a; dim]).map_err(CliError::usage_from);
        };
        let v: Vec<f64> = values.iter().map(|s| s.0).collect();
        if dim == 2 && v.len() == 3 {
            return MeterState::from_bloch(BlochVector::new(v[0], v[1], v[2]))
                .map_err(CliError::usage_from);
        }
        if v.len() != dim {
            return Err(CliError::usage(format!(
                "initial state has {} entries; expected {dim} amplitudes{}",
                v.len(),
                if dim == 2 { " or a 3-component Bloch vector" } else { "" }
            )));
        }
        let amps: Vec<C64> = v.iter().map(|&x| C64::new(x, 0.0)).collect();
        MeterState::pure(&amps).map_err(CliError::usage_from)
    }

    /// Named observables for sweep columns.
    pub fn observable_matrices(&self, dim: usize) -> Result<Vec<(String, ComplexMatrix)>, CliError> {
        if self.observables.is_empty() {
            return Err(CliError::usage("observable list is empty"));
        }
        self.observables
            .iter()
            .map(|name| {
                let m = match name.as_str() {
                    "sigma_x" if dim == 2 => ComplexMatrix::pauli_x(),
                    "sigma_y" if dim == 2 => ComplexMatrix::pauli_y(),
                    "sigma_z" if dim == 2 => ComplexMatrix::pauli_z(),
                    "meter_obs" => self.meter_observable()?.matrix,
                    other => {
                        return Err(CliError::usage(format!(
                            "observable '{other}' is not available for a {dim}-level meter"
                        )))
                    }
                };
                Ok((name.clone(), m))
            })
            .collect()
    }

    pub fn phi(&self) -> Result<f64, CliError> {
        self.phi_rad
            .map(|s| s.0)
            .ok_or_else(|| CliError::usage("this command needs phi_rad (or --phi)"))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.version != CONFIG_VERSION {
            return Err(CliError::usage(format!(
                "config version {} is not supported (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        if self.jobs == Some(0) {
            return Err(CliError::usage("jobs must be at least 1"));
        }
        self.protocol()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_json() {
        let c = RunConfig::default();
        let text = serde_json::to_string(&c).unwrap();
        let back = RunConfig::from_json(&text).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn expressions_and_unknown_fields() {
        let c = RunConfig::from_json(r#"{"alpha_rad": "pi/7", "phi_rad": "pi/2+0.1"}"#).unwrap();
        assert_eq!(c.alpha_rad.0, PI / 7.0);
        assert_eq!(c.phi_rad.unwrap().0, PI / 2.0 + 0.1);
        assert!(RunConfig::from_json(r#"{"thta_rad": 1}"#).is_err());
        assert!(RunConfig::from_json(r#"{"alpha_rad": "pi/"}"#).is_err());
    }

    #[test]
    fn grid_and_window_strings() {
        let g: GridSpec = "0:pi:5".parse().unwrap();
        assert_eq!((g.start, g.stop, g.points), (0.0, PI, 5));
        assert!("0:pi".parse::<GridSpec>().is_err());
        let w: WindowSpec = "1e-4:1e-2:20".parse().unwrap();
        assert_eq!(w.per_decade, 20);
    }

    #[test]
    fn empty_grid_is_a_usage_error() {
        let c = RunConfig {
            phi_grid: "0:pi:0".parse().unwrap(),
            ..RunConfig::default()
        };
        assert_eq!(c.grid().unwrap_err().code, 2);
    }

    #[test]
    fn initial_state_forms() {
        let c = RunConfig {
            initial: Some(parse_list("sqrt(0.5),0,sqrt(0.5)").unwrap()),
            ..RunConfig::default()
        };
        let b = c.initial_state(2).unwrap().bloch().unwrap();
        assert!((b.rx - 0.5f64.sqrt()).abs() < 1e-15);
        let c = RunConfig {
            initial: Some(parse_list("1,0,0").unwrap()),
            ..RunConfig::default()
        };
        assert_eq!(c.initial_state(3).unwrap().dimension(), 3);
        assert!(c.initial_state(4).is_err());
    }

    #[test]
    fn first_order_weakness_bound_is_checked() {
        let c = RunConfig {
            interaction: InteractionKind::FirstOrder,
            gt: Some(Scalar(0.2)),
            ..RunConfig::default()
        };
        assert_eq!(c.validate().unwrap_err().code, 2);
    }
}
