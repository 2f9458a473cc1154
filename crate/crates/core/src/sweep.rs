//! Analytic parameter sweeps over the error rate and the critical-point
//! report, with CSV rendering.

use std::io::Write;
use std::str::FromStr;

use crate::bell::{chsh_s, critical_error_rate, optimal_s, ChshConfig};
use crate::entanglement::concurrence;
use crate::error::check_range;
use crate::exec::{map_indexed, Execution};
use crate::states::{key_statistics, NoiseFamily};
use crate::{Error, Result};

/// Header of the sweep CSV.
pub const SWEEP_COLUMNS: [&str; 7] = [
    "family",
    "p",
    "d",
    "concurrence",
    "s_plane",
    "s_optimal",
    "qber",
];

/// Header of the critical-point CSV.
pub const CRITICAL_COLUMNS: [&str; 4] = ["family", "p", "d_c", "concurrence_at_d_c"];

/// Significant digits of every number written to CSV.
pub const SIGNIFICANT_DIGITS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    Concurrence,
    /// `|S|` for the canonical planar directions.
    SPlane,
    /// `|S|` maximized over all directions.
    SOptimal,
    Qber,
}

impl Quantity {
    pub const ALL: [Quantity; 4] = [
        Quantity::Concurrence,
        Quantity::SPlane,
        Quantity::SOptimal,
        Quantity::Qber,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Concurrence => "concurrence",
            Quantity::SPlane => "s_plane",
            Quantity::SOptimal => "s_optimal",
            Quantity::Qber => "qber",
        }
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown quantity `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub family: NoiseFamily,
    pub d_min: f64,
    pub d_max: f64,
    pub d_step: f64,
    pub quantities: Vec<Quantity>,
}

impl SweepSpec {
    /// Full range of the family with all quantities.
    pub fn full(family: NoiseFamily, d_step: f64) -> Self {
        Self {
            family,
            d_min: 0.0,
            d_max: family.max_error_rate(),
            d_step,
            quantities: Quantity::ALL.to_vec(),
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(p) = self.family.p() {
            check_range("p", p, 0.0, 1.0)?;
        }
        let max = self.family.max_error_rate();
        check_range("d_min", self.d_min, 0.0, max)?;
        check_range("d_max", self.d_max, self.d_min, max)?;
        if !(self.d_step > 0.0 && self.d_step.is_finite()) {
            return Err(Error::Config(format!(
                "d_step must be positive, got {}",
                self.d_step
            )));
        }
        Ok(())
    }

    /// Grid `d_min, d_min + step, …` up to `d_max`, with `d_max` itself
    /// included when the span is a whole number of steps.
    pub fn grid(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let span = (self.d_max - self.d_min) / self.d_step;
        let n = (span + 1e-9).floor() as usize + 1;
        Ok((0..n)
            .map(|i| (self.d_min + i as f64 * self.d_step).min(self.d_max))
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub family: NoiseFamily,
    pub d: f64,
    pub concurrence: Option<f64>,
    pub s_plane: Option<f64>,
    pub s_optimal: Option<f64>,
    pub qber: Option<f64>,
}

/// Evaluates the requested quantities on every grid point from the exact
/// density matrices.
pub fn run_sweep(spec: &SweepSpec, exec: Execution) -> Result<Vec<SweepRow>> {
    let grid = spec.grid()?;
    let wants = |q| spec.quantities.contains(&q);
    let cfg = ChshConfig::canonical();
    map_indexed(exec, grid.len(), |i| {
        let d = grid[i];
        let rho = spec.family.state(d)?;
        Ok(SweepRow {
            family: spec.family,
            d,
            concurrence: match wants(Quantity::Concurrence) {
                true => Some(concurrence(&rho)?.concurrence),
                false => None,
            },
            s_plane: wants(Quantity::SPlane).then(|| chsh_s(&rho, &cfg).abs()),
            s_optimal: match wants(Quantity::SOptimal) {
                true => Some(optimal_s(&rho)?),
                false => None,
            },
            qber: wants(Quantity::Qber).then(|| key_statistics(&rho).error_rate),
        })
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalReport {
    pub family: NoiseFamily,
    /// Error rate where `|S|` for the canonical directions reaches 2.
    pub d_c: f64,
    pub concurrence_at_d_c: f64,
}

pub fn find_critical(family: NoiseFamily) -> Result<CriticalReport> {
    if let Some(p) = family.p() {
        check_range("p", p, 0.0, 1.0)?;
    }
    let d_c = critical_error_rate(family, &ChshConfig::canonical())?;
    let concurrence_at_d_c = concurrence(&family.state(d_c)?)?.concurrence;
    Ok(CriticalReport {
        family,
        d_c,
        concurrence_at_d_c,
    })
}

/// Formats `x` with [`SIGNIFICANT_DIGITS`] significant digits, in plain
/// decimal notation for magnitudes in `[1e-5, 1e9)` and scientific otherwise.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    // Exponent after rounding to the target precision.
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if !(-5..9).contains(&exp) {
        return sci;
    }
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::Csv(e.to_string())
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_COLUMNS).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.family.to_string(),
            opt(r.family.p()),
            format_number(r.d),
            opt(r.concurrence),
            opt(r.s_plane),
            opt(r.s_optimal),
            opt(r.qber),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)
}

pub fn write_critical_csv<W: Write>(reports: &[CriticalReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CRITICAL_COLUMNS).map_err(csv_err)?;
    for r in reports {
        w.write_record([
            r.family.to_string(),
            opt(r.family.p()),
            format_number(r.d_c),
            format_number(r.concurrence_at_d_c),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)
}
