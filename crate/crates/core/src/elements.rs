//! Lumped elements, composition trees, and the closed-form DSR shunt branch.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netcore::{abcd_series, abcd_shunt, TwoPortAbcd};

/// Relative cancellation below which a resonant sum is treated as an exact
/// zero (series) or exact pole (parallel).
const RESONANCE_EPS: f64 = 8.0 * f64::EPSILON;

/// Complex impedance that can also be the open-circuit limit of an exact
/// parallel resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Impedance {
    Finite(Complex64),
    Infinite,
}

impl Impedance {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Impedance::Infinite)
    }

    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            Impedance::Finite(z) => Some(z),
            Impedance::Infinite => None,
        }
    }

    /// Admittance; an infinite impedance maps to zero and a zero impedance
    /// maps to `None` (a short).
    pub fn admittance(&self) -> Option<Complex64> {
        match *self {
            Impedance::Infinite => Some(Complex64::new(0.0, 0.0)),
            Impedance::Finite(z) if z.norm() == 0.0 => None,
            Impedance::Finite(z) => Some(z.inv()),
        }
    }

    /// Magnitude, `+inf` for the pole marker.
    pub fn norm(&self) -> f64 {
        match *self {
            Impedance::Finite(z) => z.norm(),
            Impedance::Infinite => f64::INFINITY,
        }
    }
}

/// Two-port of this impedance placed in series. A series open has no ABCD
/// representation and is rejected.
pub fn series_two_port(z: Impedance) -> Result<TwoPortAbcd> {
    match z {
        Impedance::Finite(z) => abcd_series(z),
        Impedance::Infinite => Err(Error::domain("series element is an open circuit")),
    }
}

/// Two-port of this impedance placed in shunt. A shunt short has no ABCD
/// representation and is rejected; a shunt pole is a no-op.
pub fn shunt_two_port(z: Impedance) -> Result<TwoPortAbcd> {
    match z.admittance() {
        Some(y) => abcd_shunt(y),
        None => Err(Error::domain("shunt element is a short circuit")),
    }
}

/// Smallest shunt impedance magnitude used when a shunt branch resonates to
/// an exact short, so the cell still has a finite ABCD matrix. The resulting
/// transmission is below 1e-12.
pub const SHUNT_SHORT_FLOOR_OHMS: f64 = 1e-12;

/// Like [`shunt_two_port`], but an exact short is replaced by a reactance of
/// [`SHUNT_SHORT_FLOOR_OHMS`].
pub fn shunt_two_port_floored(z: Impedance) -> Result<TwoPortAbcd> {
    match z {
        Impedance::Finite(v) if v.norm() < SHUNT_SHORT_FLOOR_OHMS => {
            abcd_shunt(Complex64::new(0.0, -1.0 / SHUNT_SHORT_FLOOR_OHMS))
        }
        other => shunt_two_port(other),
    }
}

fn omega(f: f64) -> Result<f64> {
    if f.is_finite() && f > 0.0 {
        Ok(2.0 * PI * f)
    } else {
        Err(Error::domain(format!("frequency must be > 0, got {f}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Inductor,
    Capacitor,
    Resistor,
}

/// Ideal lumped element; value in henries, farads, or ohms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Element {
    kind: ElementKind,
    value: f64,
}

impl Element {
    pub fn new(kind: ElementKind, value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::domain(format!(
                "{kind:?} value must be finite and > 0, got {value}"
            )));
        }
        Ok(Self { kind, value })
    }

    pub fn inductor(henries: f64) -> Result<Self> {
        Self::new(ElementKind::Inductor, henries)
    }

    pub fn capacitor(farads: f64) -> Result<Self> {
        Self::new(ElementKind::Capacitor, farads)
    }

    pub fn resistor(ohms: f64) -> Result<Self> {
        Self::new(ElementKind::Resistor, ohms)
    }

    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

pub fn element_impedance(e: &Element, f: f64) -> Result<Complex64> {
    let w = omega(f)?;
    Ok(match e.kind {
        ElementKind::Inductor => Complex64::new(0.0, w * e.value),
        ElementKind::Capacitor => Complex64::new(0.0, -1.0 / (w * e.value)),
        ElementKind::Resistor => Complex64::new(e.value, 0.0),
    })
}

/// Series/parallel composition tree over lumped elements.
#[derive(Debug, Clone, PartialEq)]
pub enum Branch {
    Leaf(Element),
    Series(Vec<Branch>),
    Parallel(Vec<Branch>),
}

impl Branch {
    pub fn series(children: Vec<Branch>) -> Result<Self> {
        if children.len() < 2 {
            return Err(Error::usage(
                "series combinator needs at least two children",
            ));
        }
        Ok(Branch::Series(children))
    }

    pub fn parallel(children: Vec<Branch>) -> Result<Self> {
        if children.len() < 2 {
            return Err(Error::usage(
                "parallel combinator needs at least two children",
            ));
        }
        Ok(Branch::Parallel(children))
    }
}

impl From<Element> for Branch {
    fn from(e: Element) -> Self {
        Branch::Leaf(e)
    }
}

/// Resonant sums that cancel to within rounding are snapped to zero.
fn snap_sum(terms: &[Complex64]) -> Complex64 {
    let sum: Complex64 = terms.iter().sum();
    let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
    if sum.norm() <= RESONANCE_EPS * scale {
        Complex64::new(0.0, 0.0)
    } else {
        sum
    }
}

pub fn branch_impedance(b: &Branch, f: f64) -> Result<Impedance> {
    match b {
        Branch::Leaf(e) => element_impedance(e, f).map(Impedance::Finite),
        Branch::Series(children) => {
            let mut terms = Vec::with_capacity(children.len());
            for child in children {
                match branch_impedance(child, f)? {
                    Impedance::Infinite => return Ok(Impedance::Infinite),
                    Impedance::Finite(z) => terms.push(z),
                }
            }
            Ok(Impedance::Finite(snap_sum(&terms)))
        }
        Branch::Parallel(children) => {
            let mut terms = Vec::with_capacity(children.len());
            for child in children {
                match branch_impedance(child, f)?.admittance() {
                    // a shorted child shorts the whole combination
                    None => return Ok(Impedance::Finite(Complex64::new(0.0, 0.0))),
                    Some(y) => terms.push(y),
                }
            }
            let y = snap_sum(&terms);
            if y.norm() == 0.0 {
                Ok(Impedance::Infinite)
            } else {
                Ok(Impedance::Finite(y.inv()))
            }
        }
    }
}

/// Closed-form impedance of the DSR shunt branch: coupling capacitor `c`
/// in series with the half strip inductance `l_c` shunted by the patch
/// capacitance `c_c`.
///
/// `Z = (1 - w^2 L_C (C + C_C)) / (j w C (1 - w^2 L_C C_C))`
pub fn dsr_shunt_impedance(c: f64, l_c: f64, c_c: f64, f: f64) -> Result<Impedance> {
    for (name, v) in [("C", c), ("L_C", l_c), ("C_C", c_c)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::domain(format!(
                "{name} must be finite and > 0, got {v}"
            )));
        }
    }
    let w = omega(f)?;
    let w2 = w * w;
    let den = 1.0 - w2 * l_c * c_c;
    if den.abs() <= RESONANCE_EPS {
        return Ok(Impedance::Infinite);
    }
    let num = 1.0 - w2 * l_c * (c + c_c);
    // num / (j w C den) = -j num / (w C den)
    Ok(Impedance::Finite(Complex64::new(0.0, -num / (w * c * den))))
}

/// The same branch assembled from generic elements.
pub fn dsr_shunt_branch(c: f64, l_c: f64, c_c: f64) -> Result<Branch> {
    Branch::series(vec![
        Element::capacitor(c)?.into(),
        Branch::parallel(vec![
            Element::inductor(l_c)?.into(),
            Element::capacitor(c_c)?.into(),
        ])?,
    ])
}

/// Frequency where the shunt branch series-resonates to a short.
pub fn dsr_zero_frequency(c: f64, l_c: f64, c_c: f64) -> f64 {
    1.0 / (2.0 * PI * (l_c * (c + c_c)).sqrt())
}

/// Frequency where the strip/patch tank resonates and the branch opens.
pub fn dsr_pole_frequency(l_c: f64, c_c: f64) -> f64 {
    1.0 / (2.0 * PI * (l_c * c_c).sqrt())
}
