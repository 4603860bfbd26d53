//! Temperature-dependent material data and isotropic elastic averaging.
//!
//! A [`MaterialTable`] is loaded from a TOML document with one section per
//! property (see `docs/material-format.md`). Each property is either a single
//! temperature-independent `value` or a list of `[temperature, value]`
//! samples interpolated with a tagged scheme.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

const CAF2_TOML: &str = include_str!("../data/caf2.toml");

#[derive(Debug, Error)]
pub enum MaterialError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing required property `{0}`")]
    MissingProperty(String),
    #[error("unknown property `{0}`")]
    UnknownProperty(String),
    #[error("property `{property}`: {count} temperature sample(s), at least two required")]
    InsufficientSamples { property: String, count: usize },
    #[error("property `{property}`: temperatures not strictly increasing at sample {index}")]
    NonMonotoneTemperature { property: String, index: usize },
    #[error("property `{property}`: {reason}")]
    InvalidValue { property: String, reason: String },
    #[error("elastic stability violated: {0}")]
    ElasticStability(String),
    #[error("temperature {temperature} K outside tabulated range [{min}, {max}] K")]
    OutOfRange { temperature: f64, min: f64, max: f64 },
    #[error("cannot read material file: {0}")]
    Io(#[from] std::io::Error),
}

/// Interpolation scheme between neighbouring temperature samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Linear in T.
    Linear,
    /// ln|v| linear in T.
    LogLinear,
    /// ln|v| linear in ln T.
    PowerLaw,
}

/// Behaviour for temperatures outside the tabulated span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extrapolation {
    /// Reject out-of-range temperatures.
    #[default]
    None,
    /// Hold the end-of-table values.
    Clamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Property {
    RefractiveIndex,
    C11,
    C12,
    C44,
    ThermalConductivity,
    ThermorefractiveIndex,
    LossAngle,
    P11,
    P12,
    P44,
    ThermalExpansion,
}

impl Property {
    pub const ALL: [Property; 11] = [
        Property::RefractiveIndex,
        Property::C11,
        Property::C12,
        Property::C44,
        Property::ThermalConductivity,
        Property::ThermorefractiveIndex,
        Property::LossAngle,
        Property::P11,
        Property::P12,
        Property::P44,
        Property::ThermalExpansion,
    ];

    /// Section key in the material file.
    pub fn key(self) -> &'static str {
        match self {
            Property::RefractiveIndex => "n",
            Property::C11 => "c11",
            Property::C12 => "c12",
            Property::C44 => "c44",
            Property::ThermalConductivity => "thermal_conductivity",
            Property::ThermorefractiveIndex => "dn_dt_over_n",
            Property::LossAngle => "loss_angle",
            Property::P11 => "p11",
            Property::P12 => "p12",
            Property::P44 => "p44",
            Property::ThermalExpansion => "thermal_expansion",
        }
    }

    fn from_key(key: &str) -> Option<Property> {
        Property::ALL.into_iter().find(|p| p.key() == key)
    }

    fn default_interpolation(self) -> Interpolation {
        match self {
            Property::ThermalConductivity
            | Property::ThermorefractiveIndex
            | Property::LossAngle
            | Property::ThermalExpansion => Interpolation::PowerLaw,
            _ => Interpolation::Linear,
        }
    }

    /// Only the thermorefractive index may be zero or negative.
    fn is_signed(self) -> bool {
        self == Property::ThermorefractiveIndex
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Physical constants of the resonator crystal at one temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialProperties {
    pub refractive_index: f64,
    /// Pa
    pub c11: f64,
    /// Pa
    pub c12: f64,
    /// Pa
    pub c44: f64,
    /// W m^-1 K^-1
    pub thermal_conductivity: f64,
    /// (1/n) dn/dT in K^-1, signed.
    pub dn_dt_over_n: f64,
    pub loss_angle: f64,
    pub p11: f64,
    pub p12: f64,
    pub p44: f64,
    /// K^-1. Carried for completeness; no noise term here uses it.
    pub thermal_expansion: f64,
}

impl MaterialProperties {
    /// Dilational elasto-optic coefficient (p11 + 2 p12) / 3.
    pub fn dilational_elasto_optic(&self) -> f64 {
        (self.p11 + 2.0 * self.p12) / 3.0
    }

    fn set(&mut self, property: Property, value: f64) {
        let slot = match property {
            Property::RefractiveIndex => &mut self.refractive_index,
            Property::C11 => &mut self.c11,
            Property::C12 => &mut self.c12,
            Property::C44 => &mut self.c44,
            Property::ThermalConductivity => &mut self.thermal_conductivity,
            Property::ThermorefractiveIndex => &mut self.dn_dt_over_n,
            Property::LossAngle => &mut self.loss_angle,
            Property::P11 => &mut self.p11,
            Property::P12 => &mut self.p12,
            Property::P44 => &mut self.p44,
            Property::ThermalExpansion => &mut self.thermal_expansion,
        };
        *slot = value;
    }
}

/// Isotropic elastic moduli.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropicModuli {
    /// Bulk modulus kappa, Pa.
    pub bulk: f64,
    /// Shear modulus G, Pa.
    pub shear: f64,
    /// Poisson ratio mu.
    pub poisson: f64,
}

impl IsotropicModuli {
    pub fn new(bulk: f64, shear: f64) -> Result<Self, MaterialError> {
        if !(bulk > 0.0 && shear > 0.0) {
            return Err(MaterialError::ElasticStability(format!(
                "bulk {bulk} Pa and shear {shear} Pa must both be positive"
            )));
        }
        let poisson = (3.0 * bulk - 2.0 * shear) / (2.0 * (3.0 * bulk + shear));
        Ok(IsotropicModuli { bulk, shear, poisson })
    }

    /// Same bulk modulus, replaced shear modulus.
    pub fn with_shear(self, shear: f64) -> Result<Self, MaterialError> {
        IsotropicModuli::new(self.bulk, shear)
    }

    /// First Lamé parameter.
    pub fn lame_lambda(&self) -> f64 {
        self.bulk - 2.0 * self.shear / 3.0
    }

    pub fn young(&self) -> f64 {
        9.0 * self.bulk * self.shear / (3.0 * self.bulk + self.shear)
    }
}

/// Voigt bound on the shear modulus of a cubic crystal.
pub fn voigt_shear(c11: f64, c12: f64, c44: f64) -> f64 {
    (c11 - c12 + 3.0 * c44) / 5.0
}

/// Reuss bound on the shear modulus of a cubic crystal.
pub fn reuss_shear(c11: f64, c12: f64, c44: f64) -> f64 {
    5.0 * (c11 - c12) * c44 / (4.0 * c44 + 3.0 * (c11 - c12))
}

fn check_cubic_stability(c11: f64, c12: f64, c44: f64) -> Result<(), MaterialError> {
    if !(c11 > 0.0) {
        return Err(MaterialError::ElasticStability(format!("C11 = {c11} Pa must be positive")));
    }
    if !(c11 > c12.abs()) {
        return Err(MaterialError::ElasticStability(format!(
            "C11 = {c11} Pa must exceed |C12| = {} Pa",
            c12.abs()
        )));
    }
    if !(c44 > 0.0) {
        return Err(MaterialError::ElasticStability(format!("C44 = {c44} Pa must be positive")));
    }
    if !(c11 + 2.0 * c12 > 0.0) {
        return Err(MaterialError::ElasticStability(format!(
            "C11 + 2 C12 = {} Pa must be positive",
            c11 + 2.0 * c12
        )));
    }
    Ok(())
}

/// Isotropic moduli of a cubic crystal: bulk modulus (C11 + 2 C12)/3 and
/// the Voigt-Reuss-Hill shear average.
pub fn isotropic_moduli(props: &MaterialProperties) -> Result<IsotropicModuli, MaterialError> {
    let (c11, c12, c44) = (props.c11, props.c12, props.c44);
    check_cubic_stability(c11, c12, c44)?;
    let bulk = (c11 + 2.0 * c12) / 3.0;
    let shear = 0.5 * (voigt_shear(c11, c12, c44) + reuss_shear(c11, c12, c44));
    IsotropicModuli::new(bulk, shear)
}

#[derive(Debug, Clone)]
struct PropertyCurve {
    /// (temperature K, value); a single entry means temperature-independent.
    samples: Vec<(f64, f64)>,
    scheme: Interpolation,
}

impl PropertyCurve {
    fn span(&self) -> Option<(f64, f64)> {
        match self.samples.as_slice() {
            [first, .., last] => Some((first.0, last.0)),
            _ => None,
        }
    }

    fn eval(&self, t: f64) -> f64 {
        let s = &self.samples;
        if s.len() == 1 {
            return s[0].1;
        }
        let (first, last) = (s[0], s[s.len() - 1]);
        if t <= first.0 {
            return first.1;
        }
        if t >= last.0 {
            return last.1;
        }
        // first index with sample temperature >= t
        let hi = s.partition_point(|&(ts, _)| ts < t);
        let (t1, v1) = s[hi];
        if t1 == t {
            return v1;
        }
        let (t0, v0) = s[hi - 1];
        let same_sign = v0 != 0.0 && v1 != 0.0 && v0.signum() == v1.signum();
        let frac = match self.scheme {
            Interpolation::PowerLaw if same_sign => (t / t0).ln() / (t1 / t0).ln(),
            _ => (t - t0) / (t1 - t0),
        };
        match self.scheme {
            Interpolation::LogLinear | Interpolation::PowerLaw if same_sign => {
                let (l0, l1) = (v0.abs().ln(), v1.abs().ln());
                v0.signum() * (l0 + (l1 - l0) * frac).exp()
            }
            _ => v0 + (v1 - v0) * frac,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialFile {
    material: MaterialHeader,
    properties: BTreeMap<String, PropertySection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialHeader {
    name: String,
    shear_modulus: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PropertySection {
    value: Option<f64>,
    samples: Option<Vec<[f64; 2]>>,
    interpolation: Option<Interpolation>,
}

/// Temperature-sampled material constants. Immutable after loading.
#[derive(Debug, Clone)]
pub struct MaterialTable {
    name: String,
    curves: BTreeMap<Property, PropertyCurve>,
    span: Option<(f64, f64)>,
    shear_modulus: Option<f64>,
}

/// Line number (1-based) of a byte offset.
pub(crate) fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

impl MaterialTable {
    /// Parses a material document.
    pub fn from_toml_str(text: &str) -> Result<Self, MaterialError> {
        let file: MaterialFile = toml::from_str(text).map_err(|e| MaterialError::Parse {
            line: e.span().map_or(0, |s| line_of(text, s.start)),
            message: e.message().to_string(),
        })?;

        for key in file.properties.keys() {
            if Property::from_key(key).is_none() {
                return Err(MaterialError::UnknownProperty(key.clone()));
            }
        }

        let mut curves = BTreeMap::new();
        for property in Property::ALL {
            let section = file
                .properties
                .get(property.key())
                .ok_or_else(|| MaterialError::MissingProperty(property.key().to_string()))?;
            curves.insert(property, build_curve(property, section)?);
        }

        let spans: Vec<(f64, f64)> = curves.values().filter_map(PropertyCurve::span).collect();
        let span = if spans.is_empty() {
            None
        } else {
            Some(spans.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, s| {
                (acc.0.min(s.0), acc.1.max(s.1))
            }))
        };

        if let Some(g) = file.material.shear_modulus {
            if !(g > 0.0) {
                return Err(MaterialError::InvalidValue {
                    property: "shear_modulus".into(),
                    reason: format!("must be positive, got {g}"),
                });
            }
        }

        let table = MaterialTable {
            name: file.material.name,
            curves,
            span,
            shear_modulus: file.material.shear_modulus,
        };
        let c = |p: Property| table.curves[&p].samples.iter().map(|s| s.1).collect::<Vec<_>>();
        for &c11 in &c(Property::C11) {
            for &c12 in &c(Property::C12) {
                for &c44 in &c(Property::C44) {
                    check_cubic_stability(c11, c12, c44)?;
                }
            }
        }
        Ok(table)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, MaterialError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Calcium fluoride data shipped with the crate.
    pub fn bundled_caf2() -> Self {
        Self::from_toml_str(CAF2_TOML).expect("bundled CaF2 table is valid")
    }

    /// Raw text of the bundled calcium fluoride file.
    pub fn bundled_caf2_source() -> &'static str {
        CAF2_TOML
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Tabulated temperature span, if any property is temperature-dependent.
    pub fn temperature_range(&self) -> Option<(f64, f64)> {
        self.span
    }

    /// Shear modulus fixed by the material file instead of the VRH average.
    pub fn shear_modulus_override(&self) -> Option<f64> {
        self.shear_modulus
    }

    /// Sample temperatures of one property.
    pub fn sample_temperatures(&self, property: Property) -> Vec<f64> {
        self.curves[&property].samples.iter().map(|s| s.0).collect()
    }

    /// Properties at `temperature` without extrapolation.
    pub fn properties_at(&self, temperature: f64) -> Result<MaterialProperties, MaterialError> {
        self.properties_at_with(temperature, Extrapolation::None)
    }

    /// Properties at `temperature`. Within the table span a property whose own
    /// samples do not reach `temperature` holds its nearest end value.
    pub fn properties_at_with(
        &self,
        temperature: f64,
        extrapolation: Extrapolation,
    ) -> Result<MaterialProperties, MaterialError> {
        let mut t = temperature;
        if let Some((min, max)) = self.span {
            if !(temperature >= min && temperature <= max) {
                match extrapolation {
                    Extrapolation::Clamp if temperature.is_finite() => t = temperature.clamp(min, max),
                    _ => return Err(MaterialError::OutOfRange { temperature, min, max }),
                }
            }
        }
        let mut props = MaterialProperties {
            refractive_index: 0.0,
            c11: 0.0,
            c12: 0.0,
            c44: 0.0,
            thermal_conductivity: 0.0,
            dn_dt_over_n: 0.0,
            loss_angle: 0.0,
            p11: 0.0,
            p12: 0.0,
            p44: 0.0,
            thermal_expansion: 0.0,
        };
        for (&property, curve) in &self.curves {
            props.set(property, curve.eval(t));
        }
        Ok(props)
    }

    /// Isotropic moduli for `props`, honouring a shear-modulus override.
    pub fn moduli(&self, props: &MaterialProperties) -> Result<IsotropicModuli, MaterialError> {
        let moduli = isotropic_moduli(props)?;
        match self.shear_modulus {
            Some(g) => moduli.with_shear(g),
            None => Ok(moduli),
        }
    }
}

fn build_curve(property: Property, section: &PropertySection) -> Result<PropertyCurve, MaterialError> {
    let name = property.key().to_string();
    let samples: Vec<(f64, f64)> = match (section.value, &section.samples) {
        (Some(v), None) => vec![(f64::NAN, v)],
        (None, Some(list)) => {
            if list.len() < 2 {
                return Err(MaterialError::InsufficientSamples { property: name, count: list.len() });
            }
            list.iter().map(|s| (s[0], s[1])).collect()
        }
        (Some(_), Some(_)) => {
            return Err(MaterialError::InvalidValue {
                property: name,
                reason: "give either `value` or `samples`, not both".into(),
            })
        }
        (None, None) => {
            return Err(MaterialError::InvalidValue {
                property: name,
                reason: "needs `value` or `samples`".into(),
            })
        }
    };

    if samples.len() > 1 {
        for (i, w) in samples.windows(2).enumerate() {
            if !(w[1].0 > w[0].0) {
                return Err(MaterialError::NonMonotoneTemperature { property: name, index: i + 1 });
            }
        }
        if let Some((i, _)) = samples.iter().enumerate().find(|(_, s)| !(s.0 > 0.0)) {
            return Err(MaterialError::InvalidValue {
                property: name,
                reason: format!("sample {i} has non-positive temperature"),
            });
        }
    }
    for &(_, v) in &samples {
        if !v.is_finite() {
            return Err(MaterialError::InvalidValue { property: name, reason: "non-finite value".into() });
        }
        let ok = match property {
            p if p.is_signed() => true,
            Property::C12 => true,
            _ => v > 0.0,
        };
        if !ok {
            return Err(MaterialError::InvalidValue {
                property: name,
                reason: format!("value {v} must be positive"),
            });
        }
    }
    Ok(PropertyCurve {
        samples,
        scheme: section.interpolation.unwrap_or(property.default_interpolation()),
    })
}
