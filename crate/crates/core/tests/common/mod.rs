#![allow(dead_code)]

use std::f64::consts::PI;

use dsrfilter::elements::{element_impedance, Element};
use dsrfilter::netcore::{abcd_series, abcd_shunt, TwoPortAbcd};
use num_complex::Complex64;
use rand::Rng;

/// Reference differential-mode cell values.
pub const REF_DM: [f64; 5] = [7.4e-9, 0.9e-12, 217.5e-12, 0.8e-9, 13e-12];
/// Reference common-mode cell values.
pub const REF_CM: [f64; 3] = [6e-9, 1e-12, 12e-12];

/// Shunt-branch reactance evaluated term by term (no shared code with the
/// library's closed form): `X = -(1 - w²L_C(C+C_C)) / (w C (1 - w²L_C C_C))`.
pub fn shunt_reactance_oracle(c: f64, lc: f64, cc: f64, f: f64) -> f64 {
    let w = 2.0 * PI * f;
    // series C plus (L_C || C_C), each as a reactance
    let x_c = -1.0 / (w * c);
    let b_l = -1.0 / (w * lc);
    let b_c = w * cc;
    x_c - 1.0 / (b_l + b_c)
}

/// Bisection for the frequency in `(lo, hi)` where the oracle reactance
/// equals `target`; the reactance must be increasing on the interval.
pub fn bisect_reactance(c: f64, lc: f64, cc: f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if shunt_reactance_oracle(c, lc, cc, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// (f0, f1, f2) at which the branch presents +jZ0, +jZ0/2 and an open.
pub fn forward_conditions(c: f64, lc: f64, cc: f64, z0: f64) -> (f64, f64, f64) {
    let f_zero = 1.0 / (2.0 * PI * (lc * (c + cc)).sqrt());
    let f_pole = 1.0 / (2.0 * PI * (lc * cc).sqrt());
    let f0 = bisect_reactance(c, lc, cc, z0, f_zero, f_pole);
    let f1 = bisect_reactance(c, lc, cc, z0 / 2.0, f_zero, f_pole);
    (f0, f1, f_pole)
}

pub fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Random lossless ladder of 1..=8 series/shunt L or C elements whose
/// reactances at `f` lie between 1 and 1000 ohms.
pub fn random_reactive_cascade<R: Rng>(rng: &mut R, f: f64) -> TwoPortAbcd {
    let w = 2.0 * PI * f;
    let n = rng.gen_range(1..=8);
    let mut net = TwoPortAbcd::IDENTITY;
    for _ in 0..n {
        let x = log_uniform(rng, 1.0, 1000.0);
        let elem = if rng.gen_bool(0.5) {
            Element::inductor(x / w).unwrap()
        } else {
            Element::capacitor(1.0 / (w * x)).unwrap()
        };
        let z = element_impedance(&elem, f).unwrap();
        let stage = if rng.gen_bool(0.5) {
            abcd_series(z).unwrap()
        } else {
            abcd_shunt(z.inv()).unwrap()
        };
        net = net.then(&stage);
    }
    net
}

pub fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_matrix4<R: Rng>(rng: &mut R) -> [[Complex64; 4]; 4] {
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    for row in m.iter_mut() {
        for v in row.iter_mut() {
            *v = random_complex(rng);
        }
    }
    m
}

/// Averages a matrix with its image under swapping line a and line b
/// (ports 1↔2 and 3↔4), making it mirror-symmetric.
pub fn mirror_symmetrize(m: &[[Complex64; 4]; 4]) -> [[Complex64; 4]; 4] {
    let p = [1, 0, 3, 2];
    let mut out = *m;
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = 0.5 * (m[i][j] + m[p[i]][p[j]]);
        }
    }
    out
}

/// Largest singular value by power iteration on SᴴS.
pub fn max_singular_value(m: &[[Complex64; 4]; 4]) -> f64 {
    let mut h = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            h[i][j] = (0..4).map(|k| m[k][i].conj() * m[k][j]).sum();
        }
    }
    let mut v = [Complex64::new(1.0, 0.3); 4];
    let mut lambda = 0.0;
    for _ in 0..2000 {
        let mut nv = [Complex64::new(0.0, 0.0); 4];
        for i in 0..4 {
            nv[i] = (0..4).map(|k| h[i][k] * v[k]).sum();
        }
        let norm = nv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in nv.iter_mut() {
            *z /= norm;
        }
        lambda = norm;
        v = nv;
    }
    lambda.sqrt()
}
