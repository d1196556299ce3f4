//! Single-ended 4-port ↔ mixed-mode S-parameters.
//!
//! Port order is fixed: 1 = line a left, 2 = line b left, 3 = line a right,
//! 4 = line b right. Mixed port 1 is the left pair, mixed port 2 the right
//! pair. The transform `S_mm = M S Mᵀ` uses the orthogonal matrix
//!
//! ```text
//!        | 1 -1  0  0 |
//! 1/√2 · | 0  0  1 -1 |
//!        | 1  1  0  0 |
//!        | 0  0  1  1 |
//! ```
//!
//! which yields normalized-wave mixed-mode parameters (differential
//! reference 2·Z0, common reference Z0/2).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::netcore::SParams2;

pub type Matrix4 = [[Complex64; 4]; 4];
pub type Block2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ZERO_BLOCK: Block2 = [[ZERO; 2]; 2];

fn transform() -> [[f64; 4]; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [
        [h, -h, 0.0, 0.0],
        [0.0, 0.0, h, -h],
        [h, h, 0.0, 0.0],
        [0.0, 0.0, h, h],
    ]
}

/// Computes `L · S · Rᵀ` for real `L`, `R`.
fn sandwich(l: &[[f64; 4]; 4], s: &Matrix4, r: &[[f64; 4]; 4]) -> Matrix4 {
    let mut tmp = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            tmp[i][j] = (0..4).map(|k| s[i][k] * r[j][k]).sum();
        }
    }
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| tmp[k][j] * l[i][k]).sum();
        }
    }
    out
}

fn transpose(m: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut t = [[0.0; 4]; 4];
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            t[j][i] = *v;
        }
    }
    t
}

/// Single-ended 4-port S-matrix at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SParams4 {
    pub s: Matrix4,
    pub z_ref: f64,
}

impl SParams4 {
    pub fn new(s: Matrix4, z_ref: f64) -> Self {
        Self { s, z_ref }
    }

    pub fn identity(z_ref: f64) -> Self {
        let mut s = [[ZERO; 4]; 4];
        for (i, row) in s.iter_mut().enumerate() {
            row[i] = Complex64::new(1.0, 0.0);
        }
        Self { s, z_ref }
    }

    /// Re-indexes ports: logical port `i` takes file port `map[i]`
    /// (both zero-based).
    pub fn permuted(&self, map: [usize; 4]) -> Result<Self> {
        validate_port_map(&map)?;
        let mut s = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                s[i][j] = self.s[map[i]][map[j]];
            }
        }
        Ok(Self {
            s,
            z_ref: self.z_ref,
        })
    }

    /// Largest `|S_ij - S_ji|`.
    pub fn reciprocity_error(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.s[i][j] - self.s[j][i]).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &SParams4) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.s[i][j] - other.s[i][j]).norm());
            }
        }
        worst
    }
}

/// Checks that `map` is a permutation of `0..4`.
pub fn validate_port_map(map: &[usize; 4]) -> Result<()> {
    let mut seen = [false; 4];
    for &p in map {
        if p >= 4 {
            return Err(Error::usage(format!(
                "port index {} out of range 1..4",
                p + 1
            )));
        }
        if seen[p] {
            return Err(Error::usage(format!("port {} repeated in port map", p + 1)));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Parses a one-based port map such as `"1,3,2,4"`.
pub fn parse_port_map(text: &str) -> Result<[usize; 4]> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(Error::usage(format!(
            "port map needs 4 comma-separated entries, got '{text}'"
        )));
    }
    let mut map = [0usize; 4];
    for (slot, p) in map.iter_mut().zip(&parts) {
        let v: usize = p
            .parse()
            .map_err(|_| Error::usage(format!("invalid port number '{p}'")))?;
        if v == 0 {
            return Err(Error::usage("port numbers are one-based"));
        }
        *slot = v - 1;
    }
    validate_port_map(&map)?;
    Ok(map)
}

/// Mixed-mode blocks at one frequency. `sdd` and `scc` carry the
/// single-ended reference impedance of the originating 4-port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedModeS {
    pub sdd: SParams2,
    pub scc: SParams2,
    /// Differential response to common-mode stimulus.
    pub sdc: Block2,
    /// Common-mode response to differential stimulus.
    pub scd: Block2,
}

impl MixedModeS {
    /// Largest magnitude among the mode-conversion entries.
    pub fn max_cross_mode(&self) -> f64 {
        self.sdc
            .iter()
            .chain(self.scd.iter())
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &MixedModeS) -> f64 {
        let blocks =
            |m: &MixedModeS| -> [Block2; 4] { [m.sdd.matrix(), m.scc.matrix(), m.sdc, m.scd] };
        blocks(self)
            .iter()
            .zip(blocks(other).iter())
            .flat_map(|(a, b)| {
                a.iter()
                    .flatten()
                    .zip(b.iter().flatten())
                    .map(|(x, y)| (x - y).norm())
            })
            .fold(0.0, f64::max)
    }
}

fn block(m: &Matrix4, row: usize, col: usize) -> Block2 {
    [
        [m[row][col], m[row][col + 1]],
        [m[row + 1][col], m[row + 1][col + 1]],
    ]
}

pub fn std4_to_mixed(s4: &SParams4) -> MixedModeS {
    let m = transform();
    let mm = sandwich(&m, &s4.s, &m);
    MixedModeS {
        sdd: SParams2::from_matrix(block(&mm, 0, 0), s4.z_ref),
        scc: SParams2::from_matrix(block(&mm, 2, 2), s4.z_ref),
        sdc: block(&mm, 0, 2),
        scd: block(&mm, 2, 0),
    }
}

pub fn mixed_to_std4(mm: &MixedModeS) -> SParams4 {
    let mut full = [[ZERO; 4]; 4];
    let place = |full: &mut Matrix4, b: &Block2, row: usize, col: usize| {
        for i in 0..2 {
            for j in 0..2 {
                full[row + i][col + j] = b[i][j];
            }
        }
    };
    place(&mut full, &mm.sdd.matrix(), 0, 0);
    place(&mut full, &mm.sdc, 0, 2);
    place(&mut full, &mm.scd, 2, 0);
    place(&mut full, &mm.scc.matrix(), 2, 2);
    let mt = transpose(&transform());
    SParams4 {
        s: sandwich(&mt, &full, &mt),
        z_ref: mm.sdd.z_ref,
    }
}

/// Mixed-mode response of a symmetric structure from its two half
/// circuits; mode conversion is zero by construction.
pub fn from_half_circuits(dm: &SParams2, cm: &SParams2) -> Result<MixedModeS> {
    if dm.z_ref != cm.z_ref {
        return Err(Error::usage(format!(
            "half-circuit reference impedances differ ({} vs {})",
            dm.z_ref, cm.z_ref
        )));
    }
    Ok(MixedModeS {
        sdd: *dm,
        scc: *cm,
        sdc: ZERO_BLOCK,
        scd: ZERO_BLOCK,
    })
}
