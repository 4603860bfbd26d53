//! Power-law exponents from scan rows.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::scan::BudgetRow;

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least 3 points, got {0}")]
    InsufficientPoints(usize),
    #[error("variable is not strictly monotone over the rows")]
    NonMonotone,
    #[error("non-positive or missing value at row {0}")]
    NonPositive(usize),
    #[error("rows differ in {0} as well as the fitted variable")]
    MixedRows(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    SigmaTr,
    SigmaBb,
    SigmaDrOverR,
    SigmaEo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    Radius,
    Curvature,
    Temperature,
    Tau,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::SigmaTr => "sigma_TR",
            Quantity::SigmaBb => "sigma_BB",
            Quantity::SigmaDrOverR => "sigma_dr_r",
            Quantity::SigmaEo => "sigma_EO",
        }
    }

    fn of(self, row: &BudgetRow) -> Option<f64> {
        let b = row.budget.as_ref()?;
        Some(match self {
            Quantity::SigmaTr => b.sigma_tr,
            Quantity::SigmaBb => b.sigma_bb,
            Quantity::SigmaDrOverR => b.sigma_dr_over_r,
            Quantity::SigmaEo => b.sigma_eo,
        })
    }
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::Radius => "R",
            Variable::Curvature => "S",
            Variable::Temperature => "T",
            Variable::Tau => "tau",
        }
    }

    fn of(self, row: &BudgetRow) -> Option<f64> {
        match self {
            Variable::Radius => Some(row.geometry.radius),
            Variable::Curvature => row.geometry.curvature(),
            Variable::Temperature => Some(row.temperature),
            Variable::Tau => Some(row.tau),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        [Quantity::SigmaTr, Quantity::SigmaBb, Quantity::SigmaDrOverR, Quantity::SigmaEo]
            .into_iter()
            .find(|q| q.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown quantity {s:?}"))
    }
}

/// Least-squares line through (ln x, ln y).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub quantity: String,
    pub variable: String,
    pub exponent: f64,
    /// ln of the prefactor.
    pub intercept: f64,
    /// RMS residual in ln y.
    pub residual: f64,
    pub points: Vec<(f64, f64)>,
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Result<ScalingFit, FitError> {
    if points.len() < 3 {
        return Err(FitError::InsufficientPoints(points.len()));
    }
    if let Some(i) = points.iter().position(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(FitError::NonPositive(i));
    }
    let up = points.windows(2).all(|w| w[1].0 > w[0].0);
    let down = points.windows(2).all(|w| w[1].0 < w[0].0);
    if !(up || down) {
        return Err(FitError::NonMonotone);
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let ss: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - intercept - exponent * x).powi(2)).sum();
    Ok(ScalingFit {
        quantity: String::new(),
        variable: String::new(),
        exponent,
        intercept,
        residual: (ss / n).sqrt(),
        points: points.to_vec(),
    })
}

/// Fits `quantity` against `variable` over rows that differ only in it.
pub fn fit_scaling(rows: &[BudgetRow], quantity: Quantity, variable: Variable) -> Result<ScalingFit, FitError> {
    if rows.len() < 3 {
        return Err(FitError::InsufficientPoints(rows.len()));
    }
    let first = &rows[0];
    let checks: [(Variable, &'static str); 4] = [
        (Variable::Radius, "radius"),
        (Variable::Curvature, "curvature"),
        (Variable::Temperature, "temperature"),
        (Variable::Tau, "tau"),
    ];
    for (v, name) in checks {
        if v != variable && rows.iter().any(|r| v.of(r) != v.of(first)) {
            return Err(FitError::MixedRows(name));
        }
    }
    if rows.iter().any(|r| r.geometry.shape_name() != first.geometry.shape_name()) {
        return Err(FitError::MixedRows("shape"));
    }
    let mut points = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        match (variable.of(r), quantity.of(r)) {
            (Some(x), Some(y)) => points.push((x, y)),
            _ => return Err(FitError::NonPositive(i)),
        }
    }
    let mut fit = fit_power_law(&points)?;
    fit.quantity = quantity.name().into();
    fit.variable = variable.name().into();
    Ok(fit)
}
