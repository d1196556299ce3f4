//! Periodic filters built from unit cells, frequency sweeps, and the
//! scalar figures of merit used to compare differential bandpass filters.

use serde::{Deserialize, Serialize};

use crate::dsrcell::Cell;
use crate::error::{Error, Result};
use crate::netcore::{abcd_to_s, mag_db, FrequencyGrid, SParams2, TwoPortAbcd};

/// Floor applied to dB magnitudes so exact transmission zeros stay finite.
pub const DB_FLOOR: f64 = -400.0;

fn db(s: num_complex::Complex64) -> f64 {
    mag_db(s).max(DB_FLOOR)
}

/// `n` identical cells per mode.
#[derive(Debug, Clone)]
pub struct PeriodicFilter<D, C> {
    pub dm: D,
    pub cm: C,
    pub n: usize,
    pub z_ref: f64,
}

pub fn build_filter<D: Cell, C: Cell>(
    dm: D,
    cm: C,
    n: usize,
    z_ref: f64,
) -> Result<PeriodicFilter<D, C>> {
    if n == 0 {
        return Err(Error::usage("a filter needs at least one cell"));
    }
    if !(z_ref.is_finite() && z_ref > 0.0) {
        return Err(Error::domain(format!(
            "reference impedance must be > 0, got {z_ref}"
        )));
    }
    Ok(PeriodicFilter { dm, cm, n, z_ref })
}

impl<D: Cell, C: Cell> PeriodicFilter<D, C> {
    pub fn dm_abcd(&self, f: f64) -> Result<TwoPortAbcd> {
        Ok(self.dm.abcd(f)?.pow(self.n))
    }

    pub fn cm_abcd(&self, f: f64) -> Result<TwoPortAbcd> {
        Ok(self.cm.abcd(f)?.pow(self.n))
    }
}

/// Per-point DM and CM responses over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub grid: FrequencyGrid,
    pub dm: Vec<SParams2>,
    pub cm: Vec<SParams2>,
}

impl SweepResult {
    pub fn new(grid: FrequencyGrid, dm: Vec<SParams2>, cm: Vec<SParams2>) -> Result<Self> {
        if dm.len() != grid.len() || cm.len() != grid.len() {
            return Err(Error::usage(format!(
                "sweep length mismatch: grid {}, dm {}, cm {}",
                grid.len(),
                dm.len(),
                cm.len()
            )));
        }
        Ok(Self { grid, dm, cm })
    }

    pub fn freqs(&self) -> &[f64] {
        self.grid.points()
    }

    pub fn sdd21_db(&self) -> Vec<f64> {
        self.dm.iter().map(|s| db(s.s21)).collect()
    }

    pub fn scc21_db(&self) -> Vec<f64> {
        self.cm.iter().map(|s| db(s.s21)).collect()
    }
}

pub fn sweep<D: Cell, C: Cell>(
    filter: &PeriodicFilter<D, C>,
    grid: &FrequencyGrid,
) -> Result<SweepResult> {
    let mut dm = Vec::with_capacity(grid.len());
    let mut cm = Vec::with_capacity(grid.len());
    for &f in grid.points() {
        dm.push(abcd_to_s(&filter.dm_abcd(f)?, filter.z_ref)?);
        cm.push(abcd_to_s(&filter.cm_abcd(f)?, filter.z_ref)?);
    }
    SweepResult::new(grid.clone(), dm, cm)
}

/// 1001 linear points over `[0.25·f0, 2.5·f0]`.
pub fn default_grid(f0: f64) -> Result<FrequencyGrid> {
    FrequencyGrid::linear(0.25 * f0, 2.5 * f0, 1001)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterMetrics {
    /// Frequency of peak differential transmission.
    pub f0d: f64,
    /// Edges where |Sdd21| is 3 dB below its peak.
    pub band3db: (f64, f64),
    pub fbw: f64,
    pub il_db: f64,
    /// `−max |Scc21|` (dB) across the 3-dB band.
    pub cm_rejection_db: f64,
    /// `min(|Sdd21| − |Scc21|)` (dB) across the 3-dB band.
    pub cmrr_db: f64,
    /// `|Sdd21| − |Scc21|` (dB) at `f0d`.
    pub cmrr_at_f0d_db: f64,
    pub cm_threshold_db: f64,
    /// Contiguous band around `f0d` where `|Scc21| ≤ −threshold`.
    pub cm_supp_band: Option<(f64, f64)>,
}

impl FilterMetrics {
    /// Suppression band edges as multiples of `f0d`.
    pub fn cm_supp_band_rel(&self) -> Option<(f64, f64)> {
        self.cm_supp_band
            .map(|(lo, hi)| (lo / self.f0d, hi / self.f0d))
    }
}

/// In-band figures for an explicitly supplied band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandFigures {
    pub il_db: f64,
    pub cm_rejection_db: f64,
    pub cmrr_db: f64,
}

fn lerp_at(freqs: &[f64], vals: &[f64], f: f64) -> f64 {
    let i = match freqs.iter().position(|&x| x >= f) {
        Some(0) => return vals[0],
        Some(i) => i,
        None => return vals[vals.len() - 1],
    };
    let t = (f - freqs[i - 1]) / (freqs[i] - freqs[i - 1]);
    vals[i - 1] + t * (vals[i] - vals[i - 1])
}

/// Frequency where `vals` crosses `level` between samples `i` and `j`.
fn crossing(freqs: &[f64], vals: &[f64], i: usize, j: usize, level: f64) -> f64 {
    let t = (level - vals[i]) / (vals[j] - vals[i]);
    freqs[i] + t * (freqs[j] - freqs[i])
}

pub fn band_figures(sr: &SweepResult, f0d: f64, band: (f64, f64)) -> BandFigures {
    let freqs = sr.freqs();
    let dd = sr.sdd21_db();
    let cc = sr.scc21_db();
    let mut samples: Vec<(f64, f64)> = vec![
        (lerp_at(freqs, &dd, band.0), lerp_at(freqs, &cc, band.0)),
        (lerp_at(freqs, &dd, band.1), lerp_at(freqs, &cc, band.1)),
    ];
    samples.extend(
        freqs
            .iter()
            .zip(dd.iter().zip(&cc))
            .filter(|(f, _)| **f >= band.0 && **f <= band.1)
            .map(|(_, (d, c))| (*d, *c)),
    );
    let max_cc = samples
        .iter()
        .map(|s| s.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let cmrr = samples
        .iter()
        .map(|s| s.0 - s.1)
        .fold(f64::INFINITY, f64::min);
    BandFigures {
        il_db: -lerp_at(freqs, &dd, f0d),
        cm_rejection_db: -max_cc,
        cmrr_db: cmrr,
    }
}

pub fn metrics(sr: &SweepResult, cm_threshold_db: f64) -> Result<FilterMetrics> {
    let freqs = sr.freqs();
    let dd = sr.sdd21_db();
    let cc = sr.scc21_db();

    let (ipk, peak) =
        dd.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
        );
    let f0d = freqs[ipk];
    let level = peak - 3.0;

    let lo = (0..ipk).rev().find(|&i| dd[i] < level);
    let hi = (ipk + 1..freqs.len()).find(|&i| dd[i] < level);
    let (lo, hi) = match (lo, hi) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => return Err(Error::Metrics("passband not bracketed".into())),
    };
    let f_lo = crossing(freqs, &dd, lo, lo + 1, level);
    let f_hi = crossing(freqs, &dd, hi - 1, hi, level);

    let figs = band_figures(sr, f0d, (f_lo, f_hi));

    let limit = -cm_threshold_db;
    let cm_supp_band = if cc[ipk] <= limit {
        let lo_edge = match (0..ipk).rev().find(|&i| cc[i] > limit) {
            Some(i) => crossing(freqs, &cc, i, i + 1, limit),
            None => freqs[0],
        };
        let hi_edge = match (ipk + 1..freqs.len()).find(|&i| cc[i] > limit) {
            Some(i) => crossing(freqs, &cc, i - 1, i, limit),
            None => freqs[freqs.len() - 1],
        };
        Some((lo_edge, hi_edge))
    } else {
        None
    };

    Ok(FilterMetrics {
        f0d,
        band3db: (f_lo, f_hi),
        fbw: (f_hi - f_lo) / f0d,
        il_db: figs.il_db,
        cm_rejection_db: figs.cm_rejection_db,
        cmrr_db: figs.cmrr_db,
        cmrr_at_f0d_db: dd[ipk] - cc[ipk],
        cm_threshold_db,
        cm_supp_band,
    })
}

/// CM rejection (positive dB) at `probe_f` for each cascade length.
pub fn cm_rejection_scaling<C: Cell>(
    cm: &C,
    n_list: &[usize],
    probe_f: f64,
    z_ref: f64,
) -> Result<Vec<(usize, f64)>> {
    let cell = cm.abcd(probe_f)?;
    n_list
        .iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::usage("cascade length must be >= 1"));
            }
            let s = abcd_to_s(&cell.pow(n), z_ref)?;
            Ok((n, -db(s.s21)))
        })
        .collect()
}
