//! Package parasitics around an intrinsic device: embedding and
//! least-squares extraction from two-port data.
//!
//! Topology, port 1 to port 2: shunt pad `C_in`, series `R_in + jwL_in`,
//! the intrinsic device in parallel with `G_loss`, series `R_out + jwL_out`,
//! shunt pad `C_out`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::network::{cascade_all, AbcdMatrix, Element, SMatrix, TwoPortNetwork};
use crate::{Error, Result};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Lumped parasitics, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ParasiticNetwork {
    pub l_in: f64,
    pub r_in: f64,
    pub l_out: f64,
    pub r_out: f64,
    pub c_pad_in: f64,
    pub c_pad_out: f64,
    pub g_loss: f64,
}

impl ParasiticNetwork {
    pub fn check(&self) -> Result<()> {
        let all = [
            self.l_in,
            self.r_in,
            self.l_out,
            self.r_out,
            self.c_pad_in,
            self.c_pad_out,
            self.g_loss,
        ];
        if all.iter().all(|v| *v >= 0.0 && v.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("parasitics must be non-negative: {self:?}")))
        }
    }

    /// Only the series elements and `G_loss`.
    pub fn series_part(&self) -> Self {
        Self { c_pad_in: 0.0, c_pad_out: 0.0, ..*self }
    }

    /// Only the pad capacitances.
    pub fn pad_part(&self) -> Self {
        Self { c_pad_in: self.c_pad_in, c_pad_out: self.c_pad_out, ..Self::default() }
    }
}

/// Wrap `intrinsic` in the parasitic shell.
pub fn embed(intrinsic: &TwoPortNetwork, p: &ParasiticNetwork) -> Result<TwoPortNetwork> {
    p.check()?;
    let z0 = intrinsic.z_ref();
    let grid = intrinsic.grid().clone();
    let s = grid
        .points()
        .iter()
        .zip(intrinsic.s())
        .map(|(&f, s)| {
            let core = if p.g_loss > 0.0 {
                let mut y = s.to_y(z0).ok_or(Error::SingularConversion(f))?;
                y[0][0] += p.g_loss;
                y[0][1] -= p.g_loss;
                y[1][0] -= p.g_loss;
                y[1][1] += p.g_loss;
                SMatrix::from_y(y, z0).ok_or(Error::SingularConversion(f))?
            } else {
                *s
            };
            let core = AbcdMatrix::from_s(&core, z0).ok_or(Error::SingularConversion(f))?;
            let w = 2.0 * PI * f;
            let chain = Element::Shunt(C64::new(0.0, w * p.c_pad_in))
                .abcd()
                .then(&Element::Series(C64::new(p.r_in, w * p.l_in)).abcd())
                .then(&core)
                .then(&Element::Series(C64::new(p.r_out, w * p.l_out)).abcd())
                .then(&Element::Shunt(C64::new(0.0, w * p.c_pad_out)).abcd());
            Ok(chain.to_s(z0))
        })
        .collect::<Result<Vec<_>>>()?;
    TwoPortNetwork::new(grid, s, z0)
}

/// `via_in`, then the embedded device, then `via_out`.
pub fn embed_capped(
    intrinsic: &TwoPortNetwork,
    p: &ParasiticNetwork,
    via_in: &TwoPortNetwork,
    via_out: &TwoPortNetwork,
) -> Result<TwoPortNetwork> {
    cascade_all(&[via_in, &embed(intrinsic, p)?, via_out])
}

/// How the fitted series totals are divided between input and output.
///
/// Two-port data only determines `R_in + R_out` and `L_in + L_out`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum SeriesSplit {
    #[default]
    Symmetric,
    /// Everything on the input side.
    Input,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitBand {
    pub start: f64,
    pub stop: f64,
}

/// Admittance of the intrinsic series branch of a two-port, `-Y21`.
pub fn series_branch_admittance(s: &SMatrix, z0: f64) -> Option<C64> {
    s.to_y(z0).map(|y| -0.5 * (y[0][1] + y[1][0]))
}

struct Sample {
    w: f64,
    zs: C64,
    y_int: C64,
    weight: f64,
}

/// Recover the parasitic shell from `measured`, given the intrinsic branch
/// admittance as a function of frequency.
pub fn extract<F>(
    measured: &TwoPortNetwork,
    intrinsic_admittance: F,
    band: FitBand,
    split: SeriesSplit,
) -> Result<ParasiticNetwork>
where
    F: Fn(f64) -> C64,
{
    let z0 = measured.z_ref();
    let mut pads = ([0.0; 2], [0.0; 2]);
    let mut samples = Vec::new();
    for (&f, s) in measured.grid().points().iter().zip(measured.s()) {
        if f < band.start || f > band.stop {
            continue;
        }
        let y = s
            .to_y(z0)
            .ok_or_else(|| Error::IllConditionedFit(format!("no Y-parameters at {f} Hz")))?;
        let y21 = 0.5 * (y[0][1] + y[1][0]);
        if y21.norm() == 0.0 {
            return Err(Error::IllConditionedFit(format!("open series branch at {f} Hz")));
        }
        let w = 2.0 * PI * f;
        let (ya, yb) = (y[0][0] + y21, y[1][1] + y21);
        pads.0[0] += w * ya.im;
        pads.0[1] += w * w;
        pads.1[0] += w * yb.im;
        pads.1[1] += w * w;
        let zs = -y21.inv();
        samples.push(Sample { w, zs, y_int: intrinsic_admittance(f), weight: 1.0 / zs.norm_sqr() });
    }
    if samples.len() < 4 {
        return Err(Error::IllConditionedFit(format!(
            "{} points in band, need at least 4",
            samples.len()
        )));
    }
    let (r, l, g) = fit_series(&samples)?;
    let (c_in, c_out) = (pads.0[0] / pads.0[1], pads.1[0] / pads.1[1]);
    let (fr, fl) = match split {
        SeriesSplit::Symmetric => (0.5, 0.5),
        SeriesSplit::Input => (1.0, 1.0),
    };
    Ok(ParasiticNetwork {
        l_in: fl * l,
        r_in: fr * r,
        l_out: l - fl * l,
        r_out: r - fr * r,
        c_pad_in: c_in,
        c_pad_out: c_out,
        g_loss: g,
    })
}

/// Best `R, L` for a fixed `G` and the weighted squared residual.
fn project(samples: &[Sample], g: f64) -> (f64, f64, f64) {
    let (mut sr, mut sw, mut sl, mut sww) = (0.0, 0.0, 0.0, 0.0);
    for s in samples {
        let res = s.zs - (s.y_int + g).inv();
        let w2 = s.weight * s.weight;
        sr += w2 * res.re;
        sw += w2;
        sl += w2 * s.w * res.im;
        sww += w2 * s.w * s.w;
    }
    let (r, l) = (sr / sw, sl / sww);
    (r, l, cost(samples, r, l, g))
}

fn cost(samples: &[Sample], r: f64, l: f64, g: f64) -> f64 {
    samples
        .iter()
        .map(|s| (s.weight * (s.zs - (s.y_int + g).inv() - C64::new(r, s.w * l))).norm_sqr())
        .sum()
}

fn fit_series(samples: &[Sample]) -> Result<(f64, f64, f64)> {
    // coarse scan over G, then damped Gauss-Newton on (R, L, G)
    let mut best = (0.0, project(samples, 0.0));
    for i in 0..=140 {
        let g = 10f64.powf(-9.0 + 0.05 * i as f64);
        let p = project(samples, g);
        if p.2 < best.1 .2 {
            best = (g, p);
        }
    }
    let (mut g, (mut r, mut l, mut c)) = best;
    let mut lambda = 1e-3;
    for _ in 0..200 {
        let mut jtj = [[0.0; 3]; 3];
        let mut jte = [0.0; 3];
        for s in samples {
            let yc = s.y_int + g;
            let e = s.weight * (s.zs - yc.inv() - C64::new(r, s.w * l));
            // derivatives of the model, residual is data minus model
            let cols = [
                C64::new(s.weight, 0.0),
                C64::new(0.0, s.weight * s.w),
                -s.weight / (yc * yc),
            ];
            for i in 0..3 {
                for j in 0..3 {
                    jtj[i][j] += (cols[i].conj() * cols[j]).re;
                }
                jte[i] += (cols[i].conj() * e).re;
            }
        }
        let scale: [f64; 3] = core::array::from_fn(|i| jtj[i][i].sqrt());
        if scale.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::IllConditionedFit("a parameter has no effect on the data".into()));
        }
        let mut a = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] = jtj[i][j] / (scale[i] * scale[j]);
            }
        }
        if det3(&a) < 1e-14 {
            return Err(Error::IllConditionedFit("fit is rank deficient".into()));
        }
        let b: [f64; 3] = core::array::from_fn(|i| jte[i] / scale[i]);
        let mut improved = false;
        for _ in 0..30 {
            let mut m = a;
            for (i, row) in m.iter_mut().enumerate() {
                row[i] += lambda;
            }
            let step = solve3(&m, &b).ok_or_else(|| Error::IllConditionedFit("singular normal equations".into()))?;
            let (nr, nl, ng) = (
                r + step[0] / scale[0],
                l + step[1] / scale[1],
                (g + step[2] / scale[2]).max(0.0),
            );
            let nc = cost(samples, nr, nl, ng);
            if nc <= c {
                let done = (c - nc) <= 1e-15 * c || nc == 0.0;
                r = nr;
                l = nl;
                g = ng;
                c = nc;
                lambda = (lambda * 0.3).max(1e-12);
                improved = !done;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    if !(r.is_finite() && l.is_finite() && g.is_finite()) {
        return Err(Error::IllConditionedFit("fit diverged".into()));
    }
    Ok((r, l, g))
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn solve3(m: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let d = det3(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let col = |k: usize| {
        let mut t = *m;
        for i in 0..3 {
            t[i][k] = b[i];
        }
        det3(&t) / d
    };
    Some([col(0), col(1), col(2)])
}
