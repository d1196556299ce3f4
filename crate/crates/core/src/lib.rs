//! Circuit models and design tools for balanced bandpass filters built from
//! dumbbell-shaped defected-ground resonators (DSRs) under coupled
//! microstrip lines.
//!
//! The crate is organised bottom-up:
//!
//! * [`netcore`]: ABCD / S-parameter algebra for two-ports.
//! * [`elements`]: lumped elements, composition trees, DSR shunt branch.
//! * [`dsrcell`]: differential- and common-mode half circuits of a cell.
//! * [`mixedmode`]: 4-port ↔ mixed-mode S-parameter transforms.
//! * [`synth`]: element synthesis from a filter specification.
//! * [`fitting`]: bounded simplex fitting of cell elements to S data.
//! * [`io`]: Touchstone v1.1 and CSV reading/writing.
//! * [`filterlab`]: periodic cascades, sweeps and filter metrics.

pub mod dsrcell;
pub mod elements;
pub mod error;
pub mod filterlab;
pub mod fitting;
pub mod io;
pub mod mixedmode;
pub mod netcore;
pub mod synth;

pub use dsrcell::{
    BandstopCellParams, Cell, CmBandpassCell, CmCellParams, DmBandpassCell, DsrCellParams, Topology,
};
pub use elements::{Branch, Element, ElementKind, Impedance};
pub use error::{Error, Result};
pub use filterlab::{FilterMetrics, PeriodicFilter, SweepResult};
pub use fitting::{FitModel, FitOptions, FitProblem, FitResult};
pub use mixedmode::{MixedModeS, SParams4};
pub use netcore::{ComplexScalar, FrequencyGrid, SParams2, TwoPortAbcd};
pub use synth::{Convention, FilterSpec, ShuntBranch, ShuntSolution, SynthReport};
