//! Element synthesis for the periodic DSR bandpass filter.
//!
//! Flow: fractional bandwidth → resonator bandwidth Δ → equidistant band
//! edges → shunt branch (C, L_C, C_C) → gap capacitance → line inductance.
//!
//! The shunt branch is pinned by three conditions. Its impedance is a
//! reactance `±j·Z0` at ω0, `±j·Z0/2` at ω1, and it opens at ω2. The pole
//! condition fixes `L_C·C_C = 1/ω2²`. With that product known, the other
//! two conditions are linear in `x = L_C·(C + C_C)` and `C`:
//!
//! ```text
//! ω² x − s·X·ω·(1 − ω² L_C C_C)·C = 1      (X = Z0 at ω0, Z0/2 at ω1)
//! ```
//!
//! where `s = ±1` is the sign convention. The 2×2 system is solved exactly
//! and any non-positive element is reported rather than returned.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsrcell::DsrCellParams;
use crate::error::{Error, Result};

/// Sign of the reactance the shunt branch must present at ω0 and ω1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `+j·Z0` at ω0 and `+j·Z0/2` at ω1.
    #[default]
    PlusJ,
    /// `−j·Z0` at ω0 and `−j·Z0/2` at ω1.
    MinusJ,
}

impl Convention {
    pub fn sign(self) -> f64 {
        match self {
            Convention::PlusJ => 1.0,
            Convention::MinusJ => -1.0,
        }
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['_', '-'], "").as_str() {
            "plusj" => Ok(Convention::PlusJ),
            "minusj" => Ok(Convention::MinusJ),
            other => Err(Error::usage(format!(
                "unknown convention '{other}' (expected plusj or minusj)"
            ))),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::PlusJ => "plusj",
            Convention::MinusJ => "minusj",
        })
    }
}

/// Design inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub order_n: usize,
    pub f0: f64,
    pub fbw: f64,
    pub z0: f64,
    /// Lowpass prototype element value of the periodic filter.
    pub g_value: f64,
}

impl FilterSpec {
    pub fn validate(&self) -> Result<()> {
        if self.order_n == 0 {
            return Err(Error::domain("filter order must be >= 1"));
        }
        for (name, v) in [("f0", self.f0), ("z0", self.z0), ("g", self.g_value)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if !(self.fbw > 0.0 && self.fbw < 1.0) {
            return Err(Error::domain(format!(
                "fractional bandwidth must lie in (0, 1), got {}",
                self.fbw
            )));
        }
        Ok(())
    }
}

fn omega(f: f64) -> f64 {
    2.0 * PI * f
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{name} must be finite and > 0, got {v}"
        )))
    }
}

/// Resonator bandwidth needed for a given filter bandwidth: `Δ = 2·FBW/g`.
pub fn delta_from_fbw(fbw: f64, g: f64) -> Result<f64> {
    positive("fractional bandwidth", fbw)?;
    positive("g", g)?;
    Ok(2.0 * fbw / g)
}

/// Band edges placed arithmetically around `f0`: `f0·(1 ∓ Δ/2)`.
pub fn band_edges(f0: f64, delta: f64) -> Result<(f64, f64)> {
    positive("f0", f0)?;
    if !(0.0..2.0).contains(&delta) {
        return Err(Error::domain(format!(
            "delta must lie in [0, 2), got {delta}"
        )));
    }
    Ok((f0 * (1.0 - delta / 2.0), f0 * (1.0 + delta / 2.0)))
}

/// Gap capacitance `C_g = 1 / (2·Z0·ω0)`.
pub fn gap_capacitance(f0: f64, z0: f64) -> Result<f64> {
    positive("f0", f0)?;
    positive("z0", z0)?;
    Ok(1.0 / (2.0 * z0 * omega(f0)))
}

/// Line inductance giving a matched 90° cell at ω0:
/// `L = 2·(1 + ω0·C_g·Z0) / (ω0²·C_g)`.
pub fn line_inductance(f0: f64, c_gap: f64, z0: f64) -> Result<f64> {
    positive("f0", f0)?;
    positive("C_g", c_gap)?;
    positive("z0", z0)?;
    let w0 = omega(f0);
    Ok(2.0 * (1.0 + w0 * c_gap * z0) / (w0 * w0 * c_gap))
}

/// A physically realizable shunt branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShuntBranch {
    pub c_coup: f64,
    pub l_strip_half: f64,
    pub c_patch: f64,
}

/// Relative residuals of the three shunt conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShuntResiduals {
    /// `|Z(ω0) − s·j·Z0| / Z0`
    pub at_f0: f64,
    /// `|Z(ω1) − s·j·Z0/2| / (Z0/2)`
    pub at_f1: f64,
    /// `|1 − ω2²·L_C·C_C|`
    pub at_f2: f64,
}

impl ShuntResiduals {
    pub fn max(&self) -> f64 {
        self.at_f0.max(self.at_f1).max(self.at_f2)
    }
}

/// Why the shunt conditions have no physical solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShuntInfeasibility {
    /// Raw solution of the linear system (may be negative or NaN).
    pub c_coup: f64,
    pub l_strip_half: f64,
    pub c_patch: f64,
    /// Names of the elements that came out non-positive.
    pub non_positive: Vec<String>,
    /// Sign of each element, e.g. `C<0, L_C>0, C_C>0`.
    pub sign_pattern: String,
}

impl fmt::Display for ShuntInfeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "no positive shunt branch: non-positive {} (C = {:.6e} F, L_C = {:.6e} H, C_C = {:.6e} F; {})",
            self.non_positive.join(", "),
            self.c_coup,
            self.l_strip_half,
            self.c_patch,
            self.sign_pattern
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ShuntSolution {
    Feasible {
        branch: ShuntBranch,
        residuals: ShuntResiduals,
    },
    Infeasible(ShuntInfeasibility),
}

impl ShuntSolution {
    pub fn branch(&self) -> Option<&ShuntBranch> {
        match self {
            ShuntSolution::Feasible { branch, .. } => Some(branch),
            ShuntSolution::Infeasible(_) => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.branch().is_some()
    }
}

/// Shunt branch impedance exactly as written in the design conditions.
fn shunt_condition_impedance(c: f64, l_c: f64, c_c: f64, w: f64) -> Complex64 {
    let num = Complex64::new(1.0 - w * w * l_c * (c + c_c), 0.0);
    let den = Complex64::new(0.0, c * w * (1.0 - w * w * l_c * c_c));
    num / den
}

/// Residuals of the three conditions for a candidate branch.
pub fn shunt_residuals(
    branch: &ShuntBranch,
    f0: f64,
    f1: f64,
    f2: f64,
    z0: f64,
    convention: Convention,
) -> ShuntResiduals {
    let s = convention.sign();
    let ShuntBranch {
        c_coup,
        l_strip_half,
        c_patch,
    } = *branch;
    let z_at = |f: f64| shunt_condition_impedance(c_coup, l_strip_half, c_patch, omega(f));
    let w2 = omega(f2);
    ShuntResiduals {
        at_f0: (z_at(f0) - Complex64::new(0.0, s * z0)).norm() / z0,
        at_f1: (z_at(f1) - Complex64::new(0.0, s * z0 / 2.0)).norm() / (z0 / 2.0),
        at_f2: (1.0 - w2 * w2 * l_strip_half * c_patch).abs(),
    }
}

pub fn solve_shunt_branch(
    f0: f64,
    f1: f64,
    f2: f64,
    z0: f64,
    convention: Convention,
) -> Result<ShuntSolution> {
    for (name, v) in [("f0", f0), ("f1", f1), ("f2", f2), ("z0", z0)] {
        positive(name, v)?;
    }
    if !(f1 < f0 && f0 < f2) {
        return Err(Error::domain(format!(
            "band frequencies must satisfy f1 < f0 < f2, got f1 = {f1}, f0 = {f0}, f2 = {f2}"
        )));
    }
    let s = convention.sign();
    let (w0, w1, w2) = (omega(f0), omega(f1), omega(f2));
    let lc_cc = 1.0 / (w2 * w2);

    let a11 = w0 * w0;
    let a12 = -s * z0 * w0 * (1.0 - w0 * w0 * lc_cc);
    let a21 = w1 * w1;
    let a22 = -s * (z0 / 2.0) * w1 * (1.0 - w1 * w1 * lc_cc);
    let det = a11 * a22 - a12 * a21;
    let x = (a22 - a12) / det;
    let c_coup = (a11 - a21) / det;
    let l_strip_half = (x - lc_cc) / c_coup;
    let c_patch = lc_cc / l_strip_half;

    let named = [("C", c_coup), ("L_C", l_strip_half), ("C_C", c_patch)];
    let non_positive: Vec<String> = named
        .iter()
        .filter(|(_, v)| !(v.is_finite() && *v > 0.0))
        .map(|(n, _)| n.to_string())
        .collect();
    if !non_positive.is_empty() {
        let sign_pattern = named
            .iter()
            .map(|(n, v)| {
                let rel = if v.is_nan() {
                    "=NaN"
                } else if *v > 0.0 {
                    ">0"
                } else if *v < 0.0 {
                    "<0"
                } else {
                    "=0"
                };
                format!("{n}{rel}")
            })
            .collect::<Vec<_>>()
            .join(", ");
        return Ok(ShuntSolution::Infeasible(ShuntInfeasibility {
            c_coup,
            l_strip_half,
            c_patch,
            non_positive,
            sign_pattern,
        }));
    }

    let branch = ShuntBranch {
        c_coup,
        l_strip_half,
        c_patch,
    };
    let residuals = shunt_residuals(&branch, f0, f1, f2, z0, convention);
    Ok(ShuntSolution::Feasible { branch, residuals })
}

/// Everything the synthesis produces, feasible or not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthReport {
    pub spec: FilterSpec,
    pub convention: Convention,
    pub delta: f64,
    pub f1: f64,
    pub f2: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub shunt: ShuntSolution,
    pub c_gap: f64,
    pub l_line: f64,
}

impl SynthReport {
    pub fn is_feasible(&self) -> bool {
        self.shunt.is_feasible()
    }

    /// Unit-cell element values when the shunt branch is realizable.
    pub fn cell_params(&self) -> Option<DsrCellParams> {
        let b = self.shunt.branch()?;
        DsrCellParams::new(self.l_line, self.c_gap, b.c_coup, b.l_strip_half, b.c_patch).ok()
    }
}

/// Full design with equidistant band edges derived from the bandwidth.
pub fn synthesize(spec: &FilterSpec, convention: Convention) -> Result<SynthReport> {
    spec.validate()?;
    let delta = delta_from_fbw(spec.fbw, spec.g_value)?;
    let (f1, f2) = band_edges(spec.f0, delta)?;
    synthesize_with_edges(spec, f1, f2, convention)
}

/// Full design with caller-chosen shunt-branch frequencies. Equidistant
/// edges never yield a positive shunt branch, so asymmetric edges are the
/// only route to a realizable design from these conditions.
pub fn synthesize_with_edges(
    spec: &FilterSpec,
    f1: f64,
    f2: f64,
    convention: Convention,
) -> Result<SynthReport> {
    spec.validate()?;
    let delta = delta_from_fbw(spec.fbw, spec.g_value)?;
    let shunt = solve_shunt_branch(spec.f0, f1, f2, spec.z0, convention)?;
    let c_gap = gap_capacitance(spec.f0, spec.z0)?;
    let l_line = line_inductance(spec.f0, c_gap, spec.z0)?;
    Ok(SynthReport {
        spec: *spec,
        convention,
        delta,
        f1,
        f2,
        omega1: omega(f1),
        omega2: omega(f2),
        shunt,
        c_gap,
        l_line,
    })
}
