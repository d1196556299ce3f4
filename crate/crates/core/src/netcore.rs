//! Two-port network algebra.
//!
//! Networks are held as ABCD (chain) matrices so that cascades reduce to
//! ordered matrix products. Conversion to and from scattering parameters
//! uses a single real reference impedance shared by both ports.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex scalar used for every impedance, admittance and S-parameter.
pub type ComplexScalar = Complex64;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn ensure_finite(z: Complex64, what: &str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} must be finite, got {z}")))
    }
}

/// ABCD matrix `[[a, b], [c, d]]` of a two-port.
///
/// `b` is in ohms, `c` in siemens, `a` and `d` are dimensionless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPortAbcd {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl TwoPortAbcd {
    pub const IDENTITY: TwoPortAbcd = TwoPortAbcd {
        a: ONE,
        b: ZERO,
        c: ZERO,
        d: ONE,
    };

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { a, b, c, d }
    }

    /// `AD - BC`; equals one for reciprocal networks.
    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// This network followed by `rhs` (self is on the input side).
    pub fn then(&self, rhs: &TwoPortAbcd) -> TwoPortAbcd {
        TwoPortAbcd {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    /// The same network seen from the other side (ports swapped).
    pub fn flipped(&self) -> TwoPortAbcd {
        let det = self.determinant();
        TwoPortAbcd {
            a: self.d / det,
            b: self.b / det,
            c: self.c / det,
            d: self.a / det,
        }
    }

    /// `n`-fold cascade of this network with itself, by repeated squaring.
    pub fn pow(&self, n: usize) -> TwoPortAbcd {
        let mut acc = TwoPortAbcd::IDENTITY;
        let mut base = *self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.then(&base);
            }
            base = base.then(&base);
            k >>= 1;
        }
        acc
    }

    /// Largest absolute entry difference against `other`.
    pub fn max_abs_diff(&self, other: &TwoPortAbcd) -> f64 {
        [
            (self.a - other.a).norm(),
            (self.b - other.b).norm(),
            (self.c - other.c).norm(),
            (self.d - other.d).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Two-port scattering parameters referenced to a real impedance `z_ref`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SParams2 {
    pub s11: Complex64,
    pub s12: Complex64,
    pub s21: Complex64,
    pub s22: Complex64,
    pub z_ref: f64,
}

impl SParams2 {
    /// Matched lossless thru.
    pub fn thru(z_ref: f64) -> Self {
        SParams2 {
            s11: ZERO,
            s12: ONE,
            s21: ONE,
            s22: ZERO,
            z_ref,
        }
    }

    pub fn from_matrix(m: [[Complex64; 2]; 2], z_ref: f64) -> Self {
        SParams2 {
            s11: m[0][0],
            s12: m[0][1],
            s21: m[1][0],
            s22: m[1][1],
            z_ref,
        }
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.s11, self.s12], [self.s21, self.s22]]
    }

    /// `|s11|^2 + |s21|^2`, one for a lossless network driven from port 1.
    pub fn power_sum_port1(&self) -> f64 {
        self.s11.norm_sqr() + self.s21.norm_sqr()
    }

    pub fn max_abs_diff(&self, other: &SParams2) -> f64 {
        [
            (self.s11 - other.s11).norm(),
            (self.s12 - other.s12).norm(),
            (self.s21 - other.s21).norm(),
            (self.s22 - other.s22).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Magnitude in dB, `20 log10 |s|`.
pub fn mag_db(s: Complex64) -> f64 {
    20.0 * s.norm().log10()
}

/// Phase in degrees, folded into `(-180, 180]`.
pub fn phase_deg(s: Complex64) -> f64 {
    let deg = s.im.atan2(s.re).to_degrees();
    if deg <= -180.0 {
        deg + 360.0
    } else {
        deg
    }
}

/// Strictly increasing, non-empty list of positive frequencies in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    points: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("frequency grid is empty"));
        }
        if let Some(bad) = points.iter().find(|f| !(f.is_finite() && **f > 0.0)) {
            return Err(Error::domain(format!(
                "grid frequencies must be finite and > 0, got {bad}"
            )));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain(
                "grid frequencies must be strictly increasing",
            ));
        }
        Ok(Self { points })
    }

    /// `n` evenly spaced points from `start` to `stop` inclusive.
    pub fn linear(start: f64, stop: f64, n: usize) -> Result<Self> {
        match n {
            0 => Err(Error::domain("frequency grid is empty")),
            1 => Self::new(vec![start]),
            _ => {
                if start.is_nan() || stop.is_nan() || stop <= start {
                    return Err(Error::domain(format!(
                        "sweep stop ({stop}) must exceed start ({start})"
                    )));
                }
                let step = (stop - start) / (n - 1) as f64;
                let mut pts: Vec<f64> = (0..n).map(|i| start + step * i as f64).collect();
                pts[n - 1] = stop;
                Self::new(pts)
            }
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Series impedance element: `[[1, z], [0, 1]]`.
pub fn abcd_series(z: Complex64) -> Result<TwoPortAbcd> {
    ensure_finite(z, "series impedance")?;
    Ok(TwoPortAbcd::new(ONE, z, ZERO, ONE))
}

/// Shunt admittance element: `[[1, 0], [y, 1]]`.
pub fn abcd_shunt(y: Complex64) -> Result<TwoPortAbcd> {
    ensure_finite(y, "shunt admittance")?;
    Ok(TwoPortAbcd::new(ONE, ZERO, y, ONE))
}

/// Ordered cascade; the first network sits at the input port.
pub fn cascade(nets: &[TwoPortAbcd]) -> Result<TwoPortAbcd> {
    let (first, rest) = nets
        .split_first()
        .ok_or_else(|| Error::usage("cannot cascade an empty list of networks"))?;
    Ok(rest.iter().fold(*first, |acc, n| acc.then(n)))
}

pub fn abcd_to_s(net: &TwoPortAbcd, z_ref: f64) -> Result<SParams2> {
    if !(z_ref.is_finite() && z_ref > 0.0) {
        return Err(Error::domain(format!(
            "reference impedance must be > 0, got {z_ref}"
        )));
    }
    let TwoPortAbcd { a, b, c, d } = *net;
    let bn = b / z_ref;
    let cn = c * z_ref;
    let den = a + bn + cn + d;
    if den.norm() == 0.0 || !den.re.is_finite() || !den.im.is_finite() {
        return Err(Error::SingularConversion);
    }
    Ok(SParams2 {
        s11: (a + bn - cn - d) / den,
        s12: 2.0 * (a * d - b * c) / den,
        s21: 2.0 / den,
        s22: (-a + bn - cn + d) / den,
        z_ref,
    })
}

pub fn s_to_abcd(s: &SParams2) -> Result<TwoPortAbcd> {
    if s.s21.norm() == 0.0 {
        return Err(Error::NonInvertible);
    }
    let SParams2 {
        s11,
        s12,
        s21,
        s22,
        z_ref,
    } = *s;
    let two_s21 = 2.0 * s21;
    let cross = s12 * s21;
    Ok(TwoPortAbcd {
        a: ((ONE + s11) * (ONE - s22) + cross) / two_s21,
        b: z_ref * ((ONE + s11) * (ONE + s22) - cross) / two_s21,
        c: ((ONE - s11) * (ONE - s22) - cross) / (two_s21 * z_ref),
        d: ((ONE - s11) * (ONE + s22) + cross) / two_s21,
    })
}
