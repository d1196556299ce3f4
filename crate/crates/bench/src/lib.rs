//! Shared fixtures for the benchmarks.

use dsrfilter::dsrcell::{CmBandpassCell, CmCellParams, DmBandpassCell, DsrCellParams, Topology};
use dsrfilter::filterlab::{build_filter, PeriodicFilter};
use dsrfilter::fitting::{FitModel, FitProblem};

pub const DM_VALUES: [f64; 5] = [7.4e-9, 0.9e-12, 217.5e-12, 0.8e-9, 13e-12];
pub const CM_VALUES: [f64; 3] = [6e-9, 1e-12, 12e-12];

pub fn reference_filter(n: usize) -> PeriodicFilter<DmBandpassCell, CmBandpassCell> {
    let dm = DmBandpassCell {
        params: DsrCellParams::from_slice(&DM_VALUES).expect("valid values"),
        topology: Topology::T,
    };
    let cm = CmBandpassCell {
        params: CmCellParams::from_slice(&CM_VALUES).expect("valid values"),
        topology: Topology::T,
    };
    build_filter(dm, cm, n, 50.0).expect("n > 0")
}

/// Self-fit problem over `points` frequencies between 0.5 and 2.5 GHz.
pub fn reference_fit_problem(points: usize) -> FitProblem {
    let model = FitModel::DmBandpass(Topology::T);
    let step = 2e9 / (points - 1) as f64;
    let freqs: Vec<f64> = (0..points).map(|i| 0.5e9 + step * i as f64).collect();
    let target = freqs
        .iter()
        .map(|&f| {
            model
                .response(&DM_VALUES, f, 50.0)
                .expect("finite response")
        })
        .collect();
    FitProblem::new(
        model,
        DM_VALUES.iter().map(|v| v / 10.0).collect(),
        DM_VALUES.iter().map(|v| v * 10.0).collect(),
        freqs,
        target,
    )
    .expect("valid problem")
}
