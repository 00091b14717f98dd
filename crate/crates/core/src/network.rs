//! Two-port networks: ABCD and S matrices, cascading, passivity and
//! reciprocity checks, and display rows.
//!
//! All conversions assume the same real reference impedance on both ports.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::{Error, Result};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Strictly ascending, positive frequencies in Hz.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct FrequencyGrid {
    points: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidGrid("grid is empty".into()));
        }
        for (i, &f) in points.iter().enumerate() {
            if !(f > 0.0 && f.is_finite()) {
                return Err(Error::InvalidGrid(format!("point {i} is not a positive frequency: {f}")));
            }
            if i > 0 && points[i - 1] >= f {
                return Err(Error::InvalidGrid(format!(
                    "point {i} ({f} Hz) does not ascend from {} Hz",
                    points[i - 1]
                )));
            }
        }
        Ok(Self { points })
    }

    /// `n` evenly spaced points from `start` to `stop` inclusive.
    pub fn linear(start: f64, stop: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGrid("grid needs at least one point".into()));
        }
        if n == 1 {
            return Self::new(alloc::vec![start]);
        }
        let step = (stop - start) / (n - 1) as f64;
        let mut v: Vec<f64> = (0..n).map(|i| start + step * i as f64).collect();
        v[n - 1] = stop;
        Self::new(v)
    }

    pub fn single(f: f64) -> Result<Self> {
        Self::new(alloc::vec![f])
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

    /// Index of `f`, matched to a relative tolerance of 1e-9.
    pub fn index_of(&self, f: f64) -> Result<usize> {
        self.points
            .iter()
            .position(|&p| (p - f).abs() <= 1e-9 * p.abs().max(f.abs()))
            .ok_or(Error::FrequencyNotOnGrid(f))
    }

    /// Same points to a relative tolerance of 1e-9.
    pub fn matches(&self, other: &FrequencyGrid) -> bool {
        self.len() == other.len()
            && self
                .points
                .iter()
                .zip(&other.points)
                .all(|(a, b)| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()))
    }
}

/// Scattering matrix at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SMatrix {
    pub s11: C64,
    pub s12: C64,
    pub s21: C64,
    pub s22: C64,
}

impl SMatrix {
    pub const THROUGH: SMatrix = SMatrix {
        s11: C64::new(0.0, 0.0),
        s12: C64::new(1.0, 0.0),
        s21: C64::new(1.0, 0.0),
        s22: C64::new(0.0, 0.0),
    };

    pub fn get(&self, p: SParam) -> C64 {
        match p {
            SParam::S11 => self.s11,
            SParam::S12 => self.s12,
            SParam::S21 => self.s21,
            SParam::S22 => self.s22,
        }
    }

    /// Swap port 1 and port 2.
    pub fn flipped(&self) -> SMatrix {
        SMatrix {
            s11: self.s22,
            s12: self.s21,
            s21: self.s12,
            s22: self.s11,
        }
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        // S^H S = [[p, q], [q*, r]]
        let p = self.s11.norm_sqr() + self.s21.norm_sqr();
        let r = self.s12.norm_sqr() + self.s22.norm_sqr();
        let q = self.s11.conj() * self.s12 + self.s21.conj() * self.s22;
        let half = 0.5 * (p - r);
        let lam = 0.5 * (p + r) + (half * half + q.norm_sqr()).sqrt();
        lam.max(0.0).sqrt()
    }

    /// Admittance parameters `[[y11, y12], [y21, y22]]` at reference `z0`.
    pub fn to_y(&self, z0: f64) -> Option<[[C64; 2]; 2]> {
        let one = C64::new(1.0, 0.0);
        // Y = (1/z0) (I - S)(I + S)^-1
        let (a, b, c, d) = (one + self.s11, self.s12, self.s21, one + self.s22);
        let det = a * d - b * c;
        if det.norm() == 0.0 {
            return None;
        }
        let inv = [[d / det, -b / det], [-c / det, a / det]];
        let m = [[one - self.s11, -self.s12], [-self.s21, one - self.s22]];
        let mut y = [[C64::new(0.0, 0.0); 2]; 2];
        for (i, row) in y.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (m[i][0] * inv[0][j] + m[i][1] * inv[1][j]) / z0;
            }
        }
        Some(y)
    }

    /// Inverse of [`SMatrix::to_y`].
    pub fn from_y(y: [[C64; 2]; 2], z0: f64) -> Option<SMatrix> {
        let one = C64::new(1.0, 0.0);
        // S = (I - z0 Y)(I + z0 Y)^-1
        let (a, b, c, d) = (one + y[0][0] * z0, y[0][1] * z0, y[1][0] * z0, one + y[1][1] * z0);
        let det = a * d - b * c;
        if det.norm() == 0.0 {
            return None;
        }
        let inv = [[d / det, -b / det], [-c / det, a / det]];
        let m = [[one - y[0][0] * z0, -y[0][1] * z0], [-y[1][0] * z0, one - y[1][1] * z0]];
        let e = |i: usize, j: usize| m[i][0] * inv[0][j] + m[i][1] * inv[1][j];
        Some(SMatrix {
            s11: e(0, 0),
            s12: e(0, 1),
            s21: e(1, 0),
            s22: e(1, 1),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum SParam {
    S11,
    S12,
    S21,
    S22,
}

impl SParam {
    pub fn name(self) -> &'static str {
        match self {
            SParam::S11 => "s11",
            SParam::S12 => "s12",
            SParam::S21 => "s21",
            SParam::S22 => "s22",
        }
    }
}

/// Chain matrix `[[A, B], [C, D]]` at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbcdMatrix {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl AbcdMatrix {
    pub const IDENTITY: AbcdMatrix = AbcdMatrix {
        a: C64::new(1.0, 0.0),
        b: C64::new(0.0, 0.0),
        c: C64::new(0.0, 0.0),
        d: C64::new(1.0, 0.0),
    };

    /// `self` followed by `next`.
    pub fn then(&self, next: &AbcdMatrix) -> AbcdMatrix {
        AbcdMatrix {
            a: self.a * next.a + self.b * next.c,
            b: self.a * next.b + self.b * next.d,
            c: self.c * next.a + self.d * next.c,
            d: self.c * next.b + self.d * next.d,
        }
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn to_s(&self, z0: f64) -> SMatrix {
        let (a, b, c, d) = (self.a, self.b / z0, self.c * z0, self.d);
        let den = a + b + c + d;
        SMatrix {
            s11: (a + b - c - d) / den,
            s12: 2.0 * (a * d - b * c) / den,
            s21: C64::new(2.0, 0.0) / den,
            s22: (-a + b - c + d) / den,
        }
    }

    /// `None` when S21 vanishes.
    pub fn from_s(s: &SMatrix, z0: f64) -> Option<AbcdMatrix> {
        if s.s21.norm() == 0.0 {
            return None;
        }
        let one = C64::new(1.0, 0.0);
        let k = 2.0 * s.s21;
        Some(AbcdMatrix {
            a: ((one + s.s11) * (one - s.s22) + s.s12 * s.s21) / k,
            b: z0 * ((one + s.s11) * (one + s.s22) - s.s12 * s.s21) / k,
            c: ((one - s.s11) * (one - s.s22) - s.s12 * s.s21) / (k * z0),
            d: ((one - s.s11) * (one + s.s22) + s.s12 * s.s21) / k,
        })
    }
}

/// Primitive elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Element {
    /// Impedance in the signal path.
    Series(C64),
    /// Admittance to ground.
    Shunt(C64),
    /// Uniform line with characteristic impedance `z0`, propagation
    /// constant `gamma` (1/m) and length in metres.
    Line { z0: C64, gamma: C64, length: f64 },
}

impl Element {
    pub fn abcd(&self) -> AbcdMatrix {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        match *self {
            Element::Series(z) => AbcdMatrix { a: one, b: z, c: zero, d: one },
            Element::Shunt(y) => AbcdMatrix { a: one, b: zero, c: y, d: one },
            Element::Line { z0, gamma, length } => {
                let gl = gamma * length;
                let (ch, sh) = (gl.cosh(), gl.sinh());
                AbcdMatrix { a: ch, b: z0 * sh, c: sh / z0, d: ch }
            }
        }
    }
}

/// Frequency-indexed S-parameters with a common real reference.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPortNetwork {
    grid: FrequencyGrid,
    s: Vec<SMatrix>,
    z_ref: f64,
}

pub const DEFAULT_Z_REF: f64 = 50.0;

impl TwoPortNetwork {
    pub fn new(grid: FrequencyGrid, s: Vec<SMatrix>, z_ref: f64) -> Result<Self> {
        if !(z_ref > 0.0 && z_ref.is_finite()) {
            return Err(Error::InvalidInput(format!("reference impedance must be positive, got {z_ref}")));
        }
        if s.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "{} S-matrices for {} frequencies",
                s.len(),
                grid.len()
            )));
        }
        let finite = |c: C64| c.re.is_finite() && c.im.is_finite();
        if let Some(i) = s
            .iter()
            .position(|m| !(finite(m.s11) && finite(m.s12) && finite(m.s21) && finite(m.s22)))
        {
            return Err(Error::Numerical(format!(
                "non-finite S entry at {} Hz",
                grid.points()[i]
            )));
        }
        Ok(Self { grid, s, z_ref })
    }

    /// Evaluate a chain matrix at every grid point.
    pub fn from_abcd<F>(grid: FrequencyGrid, z_ref: f64, mut f: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<AbcdMatrix>,
    {
        let s = grid
            .points()
            .iter()
            .map(|&fr| f(fr).map(|m| m.to_s(z_ref)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(grid, s, z_ref)
    }

    pub fn through(grid: FrequencyGrid, z_ref: f64) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, alloc::vec![SMatrix::THROUGH; n], z_ref)
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn s(&self) -> &[SMatrix] {
        &self.s
    }

    pub fn z_ref(&self) -> f64 {
        self.z_ref
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// S-matrix at an exact grid frequency.
    pub fn at(&self, f: f64) -> Result<SMatrix> {
        self.grid.index_of(f).map(|i| self.s[i])
    }

    pub fn to_abcd(&self) -> Result<Vec<AbcdMatrix>> {
        self.s
            .iter()
            .zip(self.grid.points())
            .map(|(s, &f)| AbcdMatrix::from_s(s, self.z_ref).ok_or(Error::SingularConversion(f)))
            .collect()
    }

    pub fn flipped(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            s: self.s.iter().map(SMatrix::flipped).collect(),
            z_ref: self.z_ref,
        }
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.z_ref != other.z_ref {
            return Err(Error::ReferenceMismatch(self.z_ref, other.z_ref));
        }
        if !self.grid.matches(&other.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

/// Chain two networks, `a` nearest port 1.
pub fn cascade(a: &TwoPortNetwork, b: &TwoPortNetwork) -> Result<TwoPortNetwork> {
    a.compatible(b)?;
    let (ma, mb) = (a.to_abcd()?, b.to_abcd()?);
    let s = ma.iter().zip(&mb).map(|(x, y)| x.then(y).to_s(a.z_ref)).collect();
    TwoPortNetwork::new(a.grid.clone(), s, a.z_ref)
}

/// Chain any number of networks left to right.
pub fn cascade_all(parts: &[&TwoPortNetwork]) -> Result<TwoPortNetwork> {
    let (first, rest) = parts
        .split_first()
        .ok_or_else(|| Error::InvalidInput("nothing to cascade".into()))?;
    let mut chain = first.to_abcd()?;
    for p in rest {
        first.compatible(p)?;
        for (m, n) in chain.iter_mut().zip(p.to_abcd()?) {
            *m = m.then(&n);
        }
    }
    let s = chain.iter().map(|m| m.to_s(first.z_ref)).collect();
    TwoPortNetwork::new(first.grid.clone(), s, first.z_ref)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditReport {
    pub passive: bool,
    pub reciprocal: bool,
    /// Largest squared singular value over the grid.
    pub max_power_gain: f64,
    pub max_reciprocity_error: f64,
}

pub const PASSIVITY_TOL: f64 = 1e-9;
pub const RECIPROCITY_TOL: f64 = 1e-9;

pub fn audit(n: &TwoPortNetwork) -> AuditReport {
    let sigma = n.s.iter().map(SMatrix::spectral_norm).fold(0.0, f64::max);
    let recip = n.s.iter().map(|m| (m.s12 - m.s21).norm()).fold(0.0, f64::max);
    AuditReport {
        passive: sigma <= 1.0 + PASSIVITY_TOL,
        reciprocal: recip <= RECIPROCITY_TOL,
        max_power_gain: sigma * sigma,
        max_reciprocity_error: recip,
    }
}

/// Magnitude in dB reported for an exact zero.
pub const DB_FLOOR: f64 = -300.0;

pub fn mag_db(z: C64) -> f64 {
    let m = z.norm();
    if m == 0.0 {
        DB_FLOOR
    } else {
        (20.0 * m.log10()).max(DB_FLOOR)
    }
}

pub fn phase_deg(z: C64) -> f64 {
    z.im.atan2(z.re) * 180.0 / PI
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplayRow {
    pub freq_hz: f64,
    pub mag_db: f64,
    pub phase_deg: f64,
    pub smith_re: f64,
    pub smith_im: f64,
}

pub fn to_display(n: &TwoPortNetwork, which: SParam) -> Vec<DisplayRow> {
    n.grid
        .points()
        .iter()
        .zip(&n.s)
        .map(|(&f, m)| {
            let z = m.get(which);
            DisplayRow {
                freq_hz: f,
                mag_db: mag_db(z),
                phase_deg: phase_deg(z),
                smith_re: z.re,
                smith_im: z.im,
            }
        })
        .collect()
}
