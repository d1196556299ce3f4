//! Differential- and common-mode half circuits of the DSR unit cells.
//!
//! A differential excitation puts a virtual ground on the symmetry plane:
//! the strip inductance 2·L_C is split at a grounded midpoint, leaving
//! `C` in series with `L_C || C_C` as the shunt branch of each line. A
//! common-mode excitation leaves the plane open, no strip current flows,
//! and each line only sees `C` in series with `C_C` (`C_1`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::elements::{
    dsr_shunt_impedance, element_impedance, shunt_two_port, shunt_two_port_floored, Element,
    Impedance,
};
use crate::error::{Error, Result};
use crate::netcore::{abcd_series, TwoPortAbcd};

/// Anything that yields a two-port at a frequency.
pub trait Cell {
    fn abcd(&self, f: f64) -> Result<TwoPortAbcd>;
}

impl<F> Cell for F
where
    F: Fn(f64) -> Result<TwoPortAbcd>,
{
    fn abcd(&self, f: f64) -> Result<TwoPortAbcd> {
        self(f)
    }
}

/// Placement of the gap capacitors and line inductance around the shunt
/// branch of a bandpass cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    /// Symmetric T: `C_g` and `L/2` on each side of the shunt branch.
    #[default]
    T,
    /// Symmetric T with the full `L` and a `C_g` on each side.
    TFull,
    /// `C_g` then `L` on the input side only.
    Gamma,
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "t" => Ok(Topology::T),
            "tfull" | "t-full" => Ok(Topology::TFull),
            "gamma" => Ok(Topology::Gamma),
            other => Err(Error::usage(format!(
                "unknown topology '{other}' (expected t, tfull or gamma)"
            ))),
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Topology::T => "t",
            Topology::TFull => "tfull",
            Topology::Gamma => "gamma",
        })
    }
}

fn check_positive(fields: &[(&str, f64)]) -> Result<()> {
    for (name, v) in fields {
        if !(v.is_finite() && *v > 0.0) {
            return Err(Error::domain(format!(
                "{name} must be finite and > 0, got {v}"
            )));
        }
    }
    Ok(())
}

/// Element values of the bandpass unit cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DsrCellParams {
    /// Microstrip line inductance `L` (H).
    pub l_line: f64,
    /// Series gap capacitance `C_g` (F).
    pub c_gap: f64,
    /// Line-to-resonator coupling capacitance `C` (F).
    pub c_coup: f64,
    /// Half of the strip inductance, `L_C` (H).
    pub l_strip_half: f64,
    /// Patch-to-ground capacitance `C_C` (F).
    pub c_patch: f64,
}

impl DsrCellParams {
    pub fn new(
        l_line: f64,
        c_gap: f64,
        c_coup: f64,
        l_strip_half: f64,
        c_patch: f64,
    ) -> Result<Self> {
        let p = Self {
            l_line,
            c_gap,
            c_coup,
            l_strip_half,
            c_patch,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive(&[
            ("L", self.l_line),
            ("C_g", self.c_gap),
            ("C", self.c_coup),
            ("L_C", self.l_strip_half),
            ("C_C", self.c_patch),
        ])
    }

    pub fn to_array(&self) -> [f64; 5] {
        [
            self.l_line,
            self.c_gap,
            self.c_coup,
            self.l_strip_half,
            self.c_patch,
        ]
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        match v {
            [l, cg, c, lc, cc] => Self::new(*l, *cg, *c, *lc, *cc),
            _ => Err(Error::usage(format!(
                "DM bandpass cell has 5 parameters, got {}",
                v.len()
            ))),
        }
    }

    pub const NAMES: [&'static str; 5] = ["L", "C_g", "C", "L_C", "C_C"];
}

/// Element values of the common-mode bandpass half circuit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CmCellParams {
    pub l_line: f64,
    pub c_gap: f64,
    /// Series combination of `C` and `C_C`.
    pub c1: f64,
}

impl CmCellParams {
    pub fn new(l_line: f64, c_gap: f64, c1: f64) -> Result<Self> {
        let p = Self { l_line, c_gap, c1 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive(&[("L", self.l_line), ("C_g", self.c_gap), ("C_1", self.c1)])
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.l_line, self.c_gap, self.c1]
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        match v {
            [l, cg, c1] => Self::new(*l, *cg, *c1),
            _ => Err(Error::usage(format!(
                "CM bandpass cell has 3 parameters, got {}",
                v.len()
            ))),
        }
    }

    pub const NAMES: [&'static str; 3] = ["L", "C_g", "C_1"];
}

/// Element values of the gapless (bandstop) DSR-loaded line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandstopCellParams {
    pub l_line: f64,
    pub c_coup: f64,
    pub l_strip_half: f64,
    pub c_patch: f64,
}

impl BandstopCellParams {
    pub fn new(l_line: f64, c_coup: f64, l_strip_half: f64, c_patch: f64) -> Result<Self> {
        let p = Self {
            l_line,
            c_coup,
            l_strip_half,
            c_patch,
        };
        check_positive(&[
            ("L", l_line),
            ("C", c_coup),
            ("L_C", l_strip_half),
            ("C_C", c_patch),
        ])?;
        Ok(p)
    }
}

fn series_arm(l: f64, c_gap: Option<f64>, f: f64) -> Result<TwoPortAbcd> {
    let mut z = element_impedance(&Element::inductor(l)?, f)?;
    if let Some(cg) = c_gap {
        z += element_impedance(&Element::capacitor(cg)?, f)?;
    }
    abcd_series(z)
}

fn gapped_cell(
    l_line: f64,
    c_gap: f64,
    shunt: TwoPortAbcd,
    topology: Topology,
    f: f64,
) -> Result<TwoPortAbcd> {
    match topology {
        Topology::T => {
            let arm = series_arm(l_line / 2.0, Some(c_gap), f)?;
            Ok(arm.then(&shunt).then(&arm))
        }
        Topology::TFull => {
            let arm = series_arm(l_line, Some(c_gap), f)?;
            Ok(arm.then(&shunt).then(&arm))
        }
        Topology::Gamma => Ok(series_arm(l_line, Some(c_gap), f)?.then(&shunt)),
    }
}

/// Series C_C of `c` and `c_c`: `C_1 = C C_C / (C + C_C)`.
fn series_capacitance(c: f64, c_c: f64) -> f64 {
    if c.is_infinite() {
        c_c
    } else {
        c * c_c / (c + c_c)
    }
}

/// Differential-mode half circuit of the bandpass cell.
pub fn dm_bandpass_cell(p: &DsrCellParams, topology: Topology, f: f64) -> Result<TwoPortAbcd> {
    p.validate()?;
    let zsh = dsr_shunt_impedance(p.c_coup, p.l_strip_half, p.c_patch, f)?;
    let shunt = shunt_two_port_floored(zsh)?;
    gapped_cell(p.l_line, p.c_gap, shunt, topology, f)
}

/// Common-mode half circuit of the bandpass cell.
pub fn cm_bandpass_cell(p: &CmCellParams, topology: Topology, f: f64) -> Result<TwoPortAbcd> {
    p.validate()?;
    let zsh = element_impedance(&Element::capacitor(p.c1)?, f)?;
    let shunt = shunt_two_port(Impedance::Finite(zsh))?;
    gapped_cell(p.l_line, p.c_gap, shunt, topology, f)
}

/// Common-mode parameters derived from the differential ones: the shunt
/// capacitor becomes `C` in series with `C_C`; line values are supplied
/// separately since they are normally refitted for the common mode.
pub fn cm_params_from_dm(p: &DsrCellParams, l_cm: f64, cg_cm: f64) -> Result<CmCellParams> {
    p.validate()?;
    CmCellParams::new(l_cm, cg_cm, series_capacitance(p.c_coup, p.c_patch))
}

/// Differential-mode half circuit of the gapless line: `L/2`, shunt DSR
/// branch, `L/2`.
pub fn dm_bandstop_cell(p: &BandstopCellParams, f: f64) -> Result<TwoPortAbcd> {
    let zsh = dsr_shunt_impedance(p.c_coup, p.l_strip_half, p.c_patch, f)?;
    let shunt = shunt_two_port_floored(zsh)?;
    let arm = series_arm(p.l_line / 2.0, None, f)?;
    Ok(arm.then(&shunt).then(&arm))
}

/// Common-mode half circuit of the gapless line; the resonator is not
/// excited so only the line inductance remains.
pub fn cm_bandstop_cell(l_line: f64, f: f64) -> Result<TwoPortAbcd> {
    check_positive(&[("L", l_line)])?;
    series_arm(l_line, None, f)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmBandpassCell {
    pub params: DsrCellParams,
    pub topology: Topology,
}

impl Cell for DmBandpassCell {
    fn abcd(&self, f: f64) -> Result<TwoPortAbcd> {
        dm_bandpass_cell(&self.params, self.topology, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmBandpassCell {
    pub params: CmCellParams,
    pub topology: Topology,
}

impl Cell for CmBandpassCell {
    fn abcd(&self, f: f64) -> Result<TwoPortAbcd> {
        cm_bandpass_cell(&self.params, self.topology, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmBandstopCell(pub BandstopCellParams);

impl Cell for DmBandstopCell {
    fn abcd(&self, f: f64) -> Result<TwoPortAbcd> {
        dm_bandstop_cell(&self.0, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmBandstopCell {
    pub l_line: f64,
}

impl Cell for CmBandstopCell {
    fn abcd(&self, f: f64) -> Result<TwoPortAbcd> {
        cm_bandstop_cell(self.l_line, f)
    }
}

/// Swapped-port view used by the symmetry checks.
pub fn port_swapped(net: &TwoPortAbcd) -> TwoPortAbcd {
    net.flipped()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::{dsr_pole_frequency, dsr_zero_frequency};
    use crate::netcore::{abcd_to_s, mag_db, FrequencyGrid};
    use approx::assert_relative_eq;

    pub(crate) fn ref_dm() -> DsrCellParams {
        DsrCellParams::new(7.4e-9, 0.9e-12, 217.5e-12, 0.8e-9, 13e-12).unwrap()
    }

    fn ref_cm() -> CmCellParams {
        CmCellParams::new(6e-9, 1e-12, 12e-12).unwrap()
    }

    fn s21(net: &TwoPortAbcd) -> f64 {
        abcd_to_s(net, 50.0).unwrap().s21.norm()
    }

    #[test]
    fn topology_parsing() {
        assert_eq!("t".parse::<Topology>().unwrap(), Topology::T);
        assert_eq!("GAMMA".parse::<Topology>().unwrap(), Topology::Gamma);
        assert_eq!("tfull".parse::<Topology>().unwrap(), Topology::TFull);
        assert!("pi".parse::<Topology>().is_err());
        assert_eq!(Topology::default().to_string(), "t");
    }

    #[test]
    fn params_reject_non_positive() {
        assert!(DsrCellParams::new(0.0, 1e-12, 1e-12, 1e-9, 1e-12).is_err());
        assert!(CmCellParams::new(1e-9, -1e-12, 1e-12).is_err());
        assert!(BandstopCellParams::new(1e-9, 1e-12, f64::NAN, 1e-12).is_err());
        assert!(DsrCellParams::from_slice(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn dm_transmission_zero() {
        let p = ref_dm();
        let fz = dsr_zero_frequency(p.c_coup, p.l_strip_half, p.c_patch);
        for topo in [Topology::T, Topology::TFull, Topology::Gamma] {
            let net = dm_bandpass_cell(&p, topo, fz).unwrap();
            assert!(s21(&net) < 1e-10, "{topo}: {}", s21(&net));
        }
    }

    #[test]
    fn dm_peak_near_1p5_ghz() {
        let p = ref_dm();
        let grid = FrequencyGrid::linear(0.5e9, 2.5e9, 1001).unwrap();
        let (f_peak, _) = grid
            .points()
            .iter()
            .map(|&f| (f, s21(&dm_bandpass_cell(&p, Topology::T, f).unwrap())))
            .fold((0.0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        assert!((f_peak - 1.5e9).abs() <= 0.1e9, "{f_peak}");
    }

    #[test]
    fn dm_decoupled_resonator_tends_to_gap_loaded_line() {
        let mut p = ref_dm();
        p.c_coup = 1e-18;
        for f in [0.6e9, 1.2e9, 2.0e9] {
            let cell = dm_bandpass_cell(&p, Topology::T, f).unwrap();
            let arm = series_arm(p.l_line / 2.0, Some(p.c_gap), f).unwrap();
            let line = arm.then(&arm);
            let a = abcd_to_s(&cell, 50.0).unwrap();
            let b = abcd_to_s(&line, 50.0).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-4);
        }
    }

    #[test]
    fn cm_cell_rejects_at_1p5_ghz() {
        let net = cm_bandpass_cell(&ref_cm(), Topology::T, 1.5e9).unwrap();
        assert!(mag_db(abcd_to_s(&net, 50.0).unwrap().s21) <= -20.0);
    }

    #[test]
    fn cm_cell_blocks_dc_and_has_no_zero() {
        let p = ref_cm();
        assert!(s21(&cm_bandpass_cell(&p, Topology::T, 1e3).unwrap()) < 1e-5);
        let grid = FrequencyGrid::linear(0.1e9, 5e9, 5001).unwrap();
        for &f in grid.points() {
            assert!(s21(&cm_bandpass_cell(&p, Topology::T, f).unwrap()) > 0.0);
        }
    }

    #[test]
    fn cm_small_c1_is_gap_loaded_line() {
        let p = CmCellParams::new(6e-9, 1e-12, 1e-20).unwrap();
        let f = 1.5e9;
        let arm = series_arm(3e-9, Some(1e-12), f).unwrap();
        let a = abcd_to_s(&cm_bandpass_cell(&p, Topology::T, f).unwrap(), 50.0).unwrap();
        let b = abcd_to_s(&arm.then(&arm), 50.0).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-6);
    }

    #[test]
    fn c1_from_dm() {
        let cm = cm_params_from_dm(&ref_dm(), 6e-9, 1e-12).unwrap();
        assert_relative_eq!(cm.c1, 217.5e-12 * 13e-12 / 230.5e-12, max_relative = 1e-15);
        assert!((cm.c1 / 12e-12 - 1.0).abs() < 0.03);
        let eq = DsrCellParams::new(1e-9, 1e-12, 2e-12, 1e-9, 2e-12).unwrap();
        assert_relative_eq!(
            cm_params_from_dm(&eq, 1e-9, 1e-12).unwrap().c1,
            1e-12,
            max_relative = 1e-15
        );
        assert_eq!(series_capacitance(f64::INFINITY, 5e-12), 5e-12);
        let big = DsrCellParams::new(1e-9, 1e-12, 1e-3, 1e-9, 2e-12).unwrap();
        assert_relative_eq!(
            cm_params_from_dm(&big, 1e-9, 1e-12).unwrap().c1,
            2e-12,
            max_relative = 1e-8
        );
    }

    #[test]
    fn bandstop_notch_and_dc() {
        let p = BandstopCellParams::new(5e-9, 20e-12, 1.2e-9, 8e-12).unwrap();
        let fz = dsr_zero_frequency(p.c_coup, p.l_strip_half, p.c_patch);
        assert!(s21(&dm_bandstop_cell(&p, fz).unwrap()) < 1e-10);
        assert!(s21(&dm_bandstop_cell(&p, 1e3).unwrap()) > 1.0 - 1e-9);

        // one local minimum of |s21| below the pole on a dense grid
        let fp = dsr_pole_frequency(p.l_strip_half, p.c_patch);
        let grid = FrequencyGrid::linear(fp * 1e-3, fp * 0.999, 20001).unwrap();
        let mags: Vec<f64> = grid
            .points()
            .iter()
            .map(|&f| s21(&dm_bandstop_cell(&p, f).unwrap()))
            .collect();
        let minima = mags
            .windows(3)
            .filter(|w| w[1] < w[0] && w[1] <= w[2])
            .count();
        assert_eq!(minima, 1);
    }

    #[test]
    fn cm_bandstop_is_series_inductor() {
        let l = 3e-9;
        assert!(s21(&cm_bandstop_cell(l, 1e6).unwrap()) > 0.999_999);
        let mut prev = 1.0;
        for i in 1..200 {
            let f = 1e8 * i as f64;
            let m = s21(&cm_bandstop_cell(l, f).unwrap());
            assert!(m < prev);
            // |s21| = 1/sqrt(1 + (wL/2Z0)^2)
            let x = 2.0 * std::f64::consts::PI * f * l / 100.0;
            assert_relative_eq!(m, 1.0 / (1.0 + x * x).sqrt(), max_relative = 1e-12);
            prev = m;
        }
        assert!(s21(&cm_bandstop_cell(1e-30, 5e9).unwrap()) > 1.0 - 1e-12);
    }

    #[test]
    fn symmetric_cells_are_port_swap_invariant() {
        let p = ref_dm();
        for f in [0.7e9, 1.45e9, 2.3e9] {
            for topo in [Topology::T, Topology::TFull] {
                let net = dm_bandpass_cell(&p, topo, f).unwrap();
                let a = abcd_to_s(&net, 50.0).unwrap();
                let b = abcd_to_s(&port_swapped(&net), 50.0).unwrap();
                assert!(a.max_abs_diff(&b) < 1e-12);
                assert!((a.s11 - a.s22).norm() < 1e-12);
            }
        }
    }
}
