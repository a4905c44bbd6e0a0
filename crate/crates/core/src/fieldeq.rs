//! Euler–Lagrange structure of the quadratic torsion Lagrangian.
//!
//! The Lagrangian is treated as a pointwise function `ℒ(B, ∂B)` of the gauge
//! potential `B^a_μ = h^a_μ - δ^a_μ` and its first derivatives
//! `db[[a, μ, σ]] = ∂_σ B^a_μ`. From it:
//!
//! * momentum `π_a^{ρσ} = ∂ℒ/∂(∂_σ B^a_ρ)`,
//! * current `h j_a^ρ = -∂ℒ/∂B^a_ρ`,
//! * residual `E_a^ρ = ∂_σ π_a^{ρσ} - ∂ℒ/∂B^a_ρ`.
//!
//! Each is available through dual numbers ([`Mechanism::Jet`]) or through
//! Richardson-extrapolated five-point differences ([`Mechanism::FiniteDifference`]).

use ndarray::{Array2, Array3};
use num_dual::{Dual64, HyperDual64};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{inverse_and_det, max_abs, Scalar};
use crate::telegeom::{einstein_at, superpotential_frame, torsion_at};
use crate::tetrad::{FramePointData, TetradField, MIN_ABS_DET};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mechanism {
    Jet,
    FiniteDifference,
}

/// `ℒ(B, ∂B) = h/(4k²) S^{ρμν} T_{ρμν}` as a function of the potential.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangianPointFn {
    eta: Vec<f64>,
    k: f64,
}

impl LagrangianPointFn {
    pub fn new(eta: Vec<f64>, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidArgument(format!("coupling k must be positive, got {k}")));
        }
        Ok(LagrangianPointFn { eta, k })
    }

    pub fn dim(&self) -> usize {
        self.eta.len()
    }

    pub fn eval<S: Scalar>(&self, b: &Array2<S>, db: &Array3<S>) -> Result<S> {
        let n = self.dim();
        let eta = &self.eta;
        let zero = S::from(0.0);
        let h = Array2::from_shape_fn((n, n), |(a, m)| b[[a, m]] + S::from(if a == m { 1.0 } else { 0.0 }));
        let (inv, det) = inverse_and_det(&h).ok_or(Error::SingularTetrad { det: 0.0 })?;
        if !(det.re().abs() > MIN_ABS_DET) {
            return Err(Error::SingularTetrad { det: det.re() });
        }
        // inv[[μ, a]] = h_a^μ
        let mut g = Array2::from_elem((n, n), zero);
        let mut g_inv = Array2::from_elem((n, n), zero);
        for m in 0..n {
            for v in 0..n {
                for a in 0..n {
                    g[[m, v]] += h[[a, m]] * h[[a, v]] * eta[a];
                    g_inv[[m, v]] += inv[[m, a]] * inv[[v, a]] * eta[a];
                }
            }
        }
        let mut t_coord = Array3::from_elem((n, n, n), zero);
        for r in 0..n {
            for m in 0..n {
                for v in 0..n {
                    for a in 0..n {
                        t_coord[[r, m, v]] += inv[[r, a]] * (db[[a, v, m]] - db[[a, m, v]]);
                    }
                }
            }
        }
        let t_low = contract_first(&g, &t_coord);
        let mut k_low = Array3::from_elem((n, n, n), zero);
        for r in 0..n {
            for m in 0..n {
                for v in 0..n {
                    k_low[[r, m, v]] = (t_low[[m, r, v]] + t_low[[v, r, m]] - t_low[[r, m, v]]) * 0.5;
                }
            }
        }
        // all indices up: k_up[[α, β, γ]] = K^{αβγ}
        let k1 = contract_first(&g_inv, &k_low);
        let mut k2 = Array3::from_elem((n, n, n), zero);
        let mut k_up = Array3::from_elem((n, n, n), zero);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for l in 0..n {
                        k2[[x, y, z]] += g_inv[[y, l]] * k1[[x, l, z]];
                    }
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for l in 0..n {
                        k_up[[x, y, z]] += g_inv[[z, l]] * k2[[x, y, l]];
                    }
                }
            }
        }
        let mut trace = vec![zero; n];
        for m in 0..n {
            for bb in 0..n {
                let mut tr = zero;
                for s in 0..n {
                    tr += t_coord[[s, bb, s]];
                }
                trace[m] += g_inv[[m, bb]] * tr;
            }
        }
        let mut contraction = zero;
        for r in 0..n {
            for m in 0..n {
                for v in 0..n {
                    let s = k_up[[m, v, r]] - g_inv[[r, v]] * trace[m] + g_inv[[r, m]] * trace[v];
                    contraction += s * t_low[[r, m, v]];
                }
            }
        }
        Ok(det * contraction / (4.0 * self.k * self.k))
    }
}

fn contract_first<S: Scalar>(m: &Array2<S>, t: &Array3<S>) -> Array3<S> {
    let n = m.nrows();
    let mut out = Array3::from_elem((n, n, n), S::from(0.0));
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for l in 0..n {
                    out[[a, b, c]] += m[[a, l]] * t[[l, b, c]];
                }
            }
        }
    }
    out
}

fn lift<S: Scalar>(a2: &Array2<f64>, a3: &Array3<f64>) -> (Array2<S>, Array3<S>) {
    (a2.mapv(S::from), a3.mapv(S::from))
}

fn five_point(f: impl Fn(f64) -> Result<f64>, h: f64) -> Result<f64> {
    let d = |h: f64| -> Result<f64> { Ok((f(-2.0 * h)? - 8.0 * f(-h)? + 8.0 * f(h)? - f(2.0 * h)?) / (12.0 * h)) };
    let (coarse, fine) = (d(h)?, d(0.5 * h)?);
    Ok((16.0 * fine - coarse) / 15.0)
}

const SLOT_STEP: f64 = 1e-2;

fn momentum_from(lag: &LagrangianPointFn, b: &Array2<f64>, db: &Array3<f64>, mech: Mechanism) -> Result<Array3<f64>> {
    let n = lag.dim();
    let mut pi = Array3::zeros((n, n, n));
    match mech {
        Mechanism::Jet => {
            let (bd, mut dbd) = lift::<Dual64>(b, db);
            for a in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        dbd[[a, r, s]].eps = 1.0;
                        pi[[a, r, s]] = lag.eval(&bd, &dbd)?.eps;
                        dbd[[a, r, s]].eps = 0.0;
                    }
                }
            }
        }
        Mechanism::FiniteDifference => {
            for a in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let step = SLOT_STEP * (1.0 + db[[a, r, s]].abs());
                        pi[[a, r, s]] = five_point(
                            |e| {
                                let mut d = db.clone();
                                d[[a, r, s]] += e;
                                lag.eval(b, &d)
                            },
                            step,
                        )?;
                    }
                }
            }
        }
    }
    Ok(pi)
}

/// `∂ℒ/∂B^a_ρ` holding `∂B` fixed.
fn potential_gradient(
    lag: &LagrangianPointFn,
    b: &Array2<f64>,
    db: &Array3<f64>,
    mech: Mechanism,
) -> Result<Array2<f64>> {
    let n = lag.dim();
    let mut out = Array2::zeros((n, n));
    match mech {
        Mechanism::Jet => {
            let (mut bd, dbd) = lift::<Dual64>(b, db);
            for a in 0..n {
                for r in 0..n {
                    bd[[a, r]].eps = 1.0;
                    out[[a, r]] = lag.eval(&bd, &dbd)?.eps;
                    bd[[a, r]].eps = 0.0;
                }
            }
        }
        Mechanism::FiniteDifference => {
            for a in 0..n {
                for r in 0..n {
                    // stay well inside the invertible region of δ + B
                    let step = 1e-3 * (1.0 + b[[a, r]].abs());
                    out[[a, r]] = five_point(
                        |e| {
                            let mut bb = b.clone();
                            bb[[a, r]] += e;
                            lag.eval(&bb, db)
                        },
                        step,
                    )?;
                }
            }
        }
    }
    Ok(out)
}

/// `π_a^{ρσ} = ∂ℒ/∂(∂_σ B^a_ρ)`, indexed `[[a, ρ, σ]]`.
pub fn momentum_conjugate_at(t: &TetradField, point: &[f64], k: f64, mech: Mechanism) -> Result<Array3<f64>> {
    let fd = t.frame_data_at(point)?;
    let lag = LagrangianPointFn::new(fd.eta.clone(), k)?;
    momentum_from(&lag, &fd.gauge_potential().b, &fd.dh, mech)
}

/// `h j_a^ρ = -∂ℒ/∂B^a_ρ`.
pub fn em_current_at(t: &TetradField, point: &[f64], k: f64, mech: Mechanism) -> Result<Array2<f64>> {
    let fd = t.frame_data_at(point)?;
    let lag = LagrangianPointFn::new(fd.eta.clone(), k)?;
    Ok(-potential_gradient(&lag, &fd.gauge_potential().b, &fd.dh, mech)?)
}

/// `h S_a^{ρσ}` at a point, the tensor the momentum is compared against.
pub fn h_superpotential_at(fd: &FramePointData) -> Array3<f64> {
    superpotential_frame(fd, &torsion_at(fd)) * fd.det_h
}

/// Divergence terms smaller than this (relative to `1 + max|π|`) are pure
/// roundoff, e.g. for a locally rotated flat frame, and do not set the scale.
pub const TERM_FLOOR: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct FieldEqResidual {
    /// `E_a^ρ`
    pub euler_lagrange: Array2<f64>,
    pub momentum: Array3<f64>,
    /// `h j_a^ρ`
    pub current: Array2<f64>,
    /// `∂_σ π_a^{ρσ}` summed over σ.
    pub divergence: Array2<f64>,
    /// Largest single term `|∂_σ π_a^{ρσ}|` (no sum), floored at
    /// `TERM_FLOOR · (1 + max|π|)`.
    pub scale: f64,
}

impl FieldEqResidual {
    pub fn max_abs(&self) -> f64 {
        max_abs(self.euler_lagrange.iter())
    }

    /// `max|E| / scale`.
    pub fn relative(&self) -> f64 {
        self.max_abs() / self.scale
    }
}

/// Individual divergence terms `∂_σ π_a^{ρσ}`, indexed `[[a, ρ, σ]]`.
fn divergence_terms_jet(lag: &LagrangianPointFn, fd: &FramePointData) -> Result<Array3<f64>> {
    let n = fd.dim();
    let b = fd.gauge_potential().b;
    let mut out = Array3::zeros((n, n, n));
    for s in 0..n {
        // ε2 moves the point along x^σ
        let bd = Array2::from_shape_fn((n, n), |(a, m)| HyperDual64::new(b[[a, m]], 0.0, fd.dh[[a, m, s]], 0.0));
        let mut dbd = Array3::from_shape_fn((n, n, n), |(a, m, v)| {
            HyperDual64::new(fd.dh[[a, m, v]], 0.0, fd.ddh[[a, m, v, s]], 0.0)
        });
        for a in 0..n {
            for r in 0..n {
                dbd[[a, r, s]].eps1 = 1.0;
                out[[a, r, s]] = lag.eval(&bd, &dbd)?.eps1eps2;
                dbd[[a, r, s]].eps1 = 0.0;
            }
        }
    }
    Ok(out)
}

fn coordinate_step(x: f64) -> f64 {
    1e-3 * (1.0 + x.abs())
}

fn divergence_terms_fd(t: &TetradField, lag: &LagrangianPointFn, point: &[f64]) -> Result<Array3<f64>> {
    let n = point.len();
    let mut out = Array3::zeros((n, n, n));
    for s in 0..n {
        let pi_at = |e: f64| -> Result<Array3<f64>> {
            let mut x = point.to_vec();
            x[s] += e;
            let fd = t.frame_data_at(&x)?;
            momentum_from(lag, &fd.gauge_potential().b, &fd.dh, Mechanism::FiniteDifference)
        };
        let h = coordinate_step(point[s]);
        let stencil = |h: f64| -> Result<Array3<f64>> {
            Ok((pi_at(-2.0 * h)? - pi_at(-h)? * 8.0 + pi_at(h)? * 8.0 - pi_at(2.0 * h)?) / (12.0 * h))
        };
        let (coarse, fine) = (stencil(h)?, stencil(0.5 * h)?);
        let d = (fine * 16.0 - coarse) / 15.0;
        for a in 0..n {
            for r in 0..n {
                out[[a, r, s]] = d[[a, r, s]];
            }
        }
    }
    Ok(out)
}

pub fn field_eq_residual_at(t: &TetradField, point: &[f64], k: f64, mech: Mechanism) -> Result<FieldEqResidual> {
    let fd = t.frame_data_at(point)?;
    let lag = LagrangianPointFn::new(fd.eta.clone(), k)?;
    let (b, db) = (fd.gauge_potential().b, &fd.dh);
    let momentum = momentum_from(&lag, &b, db, mech)?;
    let grad_b = potential_gradient(&lag, &b, db, mech)?;
    let terms = match mech {
        Mechanism::Jet => divergence_terms_jet(&lag, &fd)?,
        Mechanism::FiniteDifference => divergence_terms_fd(t, &lag, point)?,
    };
    let n = fd.dim();
    let divergence = Array2::from_shape_fn((n, n), |(a, r)| (0..n).map(|s| terms[[a, r, s]]).sum::<f64>());
    let euler_lagrange = &divergence - &grad_b;
    let scale = max_abs(terms.iter()).max(TERM_FLOOR * (1.0 + max_abs(momentum.iter())));
    Ok(FieldEqResidual { euler_lagrange, momentum, current: -grad_b, divergence, scale })
}

/// Least-squares fit of `π = c₁ · h S_a^{ρσ}` over many samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProportionalityFit {
    /// `None` when every reference entry vanishes.
    pub c1: Option<f64>,
    /// `max|π - c₁ hS| / max|π|`.
    pub spread: f64,
    pub samples: usize,
}

pub fn fit_proportionality(pairs: &[(Array3<f64>, Array3<f64>)]) -> ProportionalityFit {
    let (mut num, mut den) = (0.0, 0.0);
    for (pi, hs) in pairs {
        num += pi.iter().zip(hs.iter()).map(|(p, x)| p * x).sum::<f64>();
        den += hs.iter().map(|x| x * x).sum::<f64>();
    }
    let pi_max = pairs.iter().map(|(pi, _)| max_abs(pi.iter())).fold(0.0, f64::max);
    if den == 0.0 {
        return ProportionalityFit { c1: None, spread: pi_max, samples: pairs.len() };
    }
    let c1 = num / den;
    let worst = pairs
        .iter()
        .flat_map(|(pi, hs)| pi.iter().zip(hs.iter()).map(move |(p, x)| (p - c1 * x).abs()))
        .fold(0.0, f64::max);
    let spread = if pi_max > 0.0 { worst / pi_max } else { worst };
    ProportionalityFit { c1: Some(c1), spread, samples: pairs.len() }
}

/// Momentum and `h S` at each point, ready for [`fit_proportionality`].
pub fn momentum_samples(t: &TetradField, points: &[Vec<f64>], k: f64) -> Result<Vec<(Array3<f64>, Array3<f64>)>> {
    points
        .iter()
        .map(|x| {
            let fd = t.frame_data_at(x)?;
            let lag = LagrangianPointFn::new(fd.eta.clone(), k)?;
            let pi = momentum_from(&lag, &fd.gauge_potential().b, &fd.dh, Mechanism::Jet)?;
            Ok((pi, h_superpotential_at(&fd)))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceRow {
    pub point: Vec<f64>,
    /// `max|G_μν|`
    pub einstein_max: f64,
    pub einstein_tt: f64,
    /// `max|E_a^ρ|`
    pub residual_max: f64,
    pub residual_scale: f64,
}

/// Einstein tensor against field-equation residual, point by point.
pub fn gr_equivalence_report(t: &TetradField, points: &[Vec<f64>], k: f64) -> Result<Vec<EquivalenceRow>> {
    points
        .iter()
        .map(|x| {
            let g = einstein_at(&t.frame_data_at(x)?)?;
            let res = field_eq_residual_at(t, x, k, Mechanism::Jet)?;
            Ok(EquivalenceRow {
                point: x.clone(),
                einstein_max: max_abs(g.iter()),
                einstein_tt: g[[0, 0]],
                residual_max: res.max_abs(),
                residual_scale: res.scale,
            })
        })
        .collect()
}
