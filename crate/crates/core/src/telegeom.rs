//! Connections, torsion and curvature of a tetrad at a point.
//!
//! Connection coefficients are stored with the derivative index last:
//! `gamma[[ρ, ν, μ]] = Γ^ρ_{νμ}` with `∇_μ V^ρ = ∂_μ V^ρ + Γ^ρ_{λμ} V^λ`. For
//! the Weitzenböck connection this reads `Γ^ρ_{νμ} = h_a^ρ ∂_μ h^a_ν`.
//!
//! With that storage the curvature is
//!
//! ```text
//! R^ρ_{σμν} = ∂_μ Γ^ρ_{σν} - ∂_ν Γ^ρ_{σμ} + Γ^ρ_{λμ} Γ^λ_{σν} - Γ^ρ_{λν} Γ^λ_{σμ}
//! ```
//!
//! which is the textbook `∂_μ Γ^ρ_{νσ} - ∂_ν Γ^ρ_{μσ} + Γ^ρ_{μλ} Γ^λ_{νσ} - Γ^ρ_{νλ} Γ^λ_{μσ}`
//! written for derivative-first coefficients. Ricci is `R_σν = R^ρ_{σρν}`.

use ndarray::{Array2, Array3, Array4};

use crate::error::{Error, Result};
use crate::linalg::max_abs;
use crate::tetrad::FramePointData;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConnectionKind {
    Weitzenbock,
    LeviCivita,
}

#[derive(Clone, Debug)]
pub struct ConnectionCoeffs {
    pub kind: ConnectionKind,
    /// `gamma[[ρ, ν, μ]] = Γ^ρ_{νμ}`, μ the derivative slot.
    pub gamma: Array3<f64>,
    /// `dgamma[[ρ, ν, μ, σ]] = ∂_σ Γ^ρ_{νμ}`.
    pub dgamma: Array4<f64>,
}

#[derive(Clone, Debug)]
pub struct TorsionData {
    /// `T^ρ_{μν} = Γ^ρ_{νμ} - Γ^ρ_{μν}`.
    pub t_coord: Array3<f64>,
    /// `T^a_{μν} = ∂_μ h^a_ν - ∂_ν h^a_μ`.
    pub t_frame: Array3<f64>,
    /// Contortion `K^ρ_{μν}`.
    pub contortion: Array3<f64>,
    /// Superpotential `S^{ρμν}`, all indices up.
    pub superpotential: Array3<f64>,
}

#[derive(Clone, Debug)]
pub struct CurvatureData {
    pub riemann: Array4<f64>,
    pub ricci: Array2<f64>,
    /// Only for the Levi-Civita connection.
    pub scalar: Option<f64>,
    pub einstein: Option<Array2<f64>>,
}

pub fn weitzenbock_at(fd: &FramePointData) -> ConnectionCoeffs {
    let n = fd.dim();
    let gamma = Array3::from_shape_fn((n, n, n), |(r, v, m)| (0..n).map(|a| fd.h_inv[[a, r]] * fd.dh[[a, v, m]]).sum());
    let dgamma = Array4::from_shape_fn((n, n, n, n), |(r, v, m, s)| {
        (0..n).map(|a| fd.dh_inv[[a, r, s]] * fd.dh[[a, v, m]] + fd.h_inv[[a, r]] * fd.ddh[[a, v, m, s]]).sum()
    });
    ConnectionCoeffs { kind: ConnectionKind::Weitzenbock, gamma, dgamma }
}

/// Christoffel symbols `{ρ, μν} = ½ g^{ρσ}(∂_μ g_σν + ∂_ν g_σμ - ∂_σ g_μν)`
/// and their first derivatives.
pub fn christoffel_at(fd: &FramePointData) -> Result<ConnectionCoeffs> {
    let n = fd.dim();
    let det_g = fd.det_h * fd.det_h;
    if !(det_g > 1e-24) {
        return Err(Error::SingularMetric { det: det_g });
    }
    let (g_inv, dg, ddg) = (&fd.g_inv, &fd.dg, &fd.ddg);
    // lowered[[σ, μ, ν]] = ½(∂_μ g_σν + ∂_ν g_σμ - ∂_σ g_μν)
    let lowered = Array3::from_shape_fn((n, n, n), |(s, m, v)| 0.5 * (dg[[s, v, m]] + dg[[s, m, v]] - dg[[m, v, s]]));
    let d_lowered = Array4::from_shape_fn((n, n, n, n), |(s, m, v, t)| {
        0.5 * (ddg[[s, v, m, t]] + ddg[[s, m, v, t]] - ddg[[m, v, s, t]])
    });
    // ∂_τ g^{ρσ} = -g^{ρα} ∂_τ g_αβ g^{βσ}
    let dg_inv = Array3::from_shape_fn((n, n, n), |(r, s, t)| {
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                acc -= g_inv[[r, a]] * dg[[a, b, t]] * g_inv[[b, s]];
            }
        }
        acc
    });

    let mut gamma = Array3::zeros((n, n, n));
    let mut dgamma = Array4::zeros((n, n, n, n));
    for r in 0..n {
        for m in 0..n {
            for v in m..n {
                let g: f64 = (0..n).map(|s| g_inv[[r, s]] * lowered[[s, m, v]]).sum();
                gamma[[r, m, v]] = g;
                gamma[[r, v, m]] = g;
                for t in 0..n {
                    let d: f64 = (0..n)
                        .map(|s| dg_inv[[r, s, t]] * lowered[[s, m, v]] + g_inv[[r, s]] * d_lowered[[s, m, v, t]])
                        .sum();
                    dgamma[[r, m, v, t]] = d;
                    dgamma[[r, v, m, t]] = d;
                }
            }
        }
    }
    Ok(ConnectionCoeffs { kind: ConnectionKind::LeviCivita, gamma, dgamma })
}

/// Torsion in both index forms, contortion and superpotential.
pub fn torsion_at(fd: &FramePointData) -> TorsionData {
    torsion_from(fd, &weitzenbock_at(fd))
}

/// As [`torsion_at`], reusing an already computed Weitzenböck connection.
pub fn torsion_from(fd: &FramePointData, weitzenbock: &ConnectionCoeffs) -> TorsionData {
    let n = fd.dim();
    let (g, g_inv, w) = (&fd.g, &fd.g_inv, &weitzenbock.gamma);
    let t_coord = Array3::from_shape_fn((n, n, n), |(r, m, v)| w[[r, v, m]] - w[[r, m, v]]);
    let t_frame = Array3::from_shape_fn((n, n, n), |(a, m, v)| fd.dh[[a, v, m]] - fd.dh[[a, m, v]]);

    let t_low = lower_first(g, &t_coord);
    let k_low =
        Array3::from_shape_fn((n, n, n), |(r, m, v)| 0.5 * (t_low[[m, r, v]] + t_low[[v, r, m]] - t_low[[r, m, v]]));
    let contortion = raise_first(g_inv, &k_low);

    // K^{μνρ}: raise the two lower slots of K^μ_{ab}.
    let k_up = Array3::from_shape_fn((n, n, n), |(m, v, r)| {
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                acc += contortion[[m, a, b]] * g_inv[[a, v]] * g_inv[[b, r]];
            }
        }
        acc
    });
    // v^μ = T^{σμ}_σ = g^{μβ} T^σ_{βσ}
    let trace: Vec<f64> =
        (0..n).map(|m| (0..n).map(|b| g_inv[[m, b]] * (0..n).map(|s| t_coord[[s, b, s]]).sum::<f64>()).sum()).collect();
    let superpotential = Array3::from_shape_fn((n, n, n), |(r, m, v)| {
        k_up[[m, v, r]] - g_inv[[r, v]] * trace[m] + g_inv[[r, m]] * trace[v]
    });
    TorsionData { t_coord, t_frame, contortion, superpotential }
}

/// `S_a^{ρσ} = h_a^μ g_μν S^{νρσ}`.
pub fn superpotential_frame(fd: &FramePointData, td: &TorsionData) -> Array3<f64> {
    let n = fd.dim();
    let s_low = lower_first(&fd.g, &td.superpotential);
    Array3::from_shape_fn((n, n, n), |(a, r, s)| (0..n).map(|m| fd.h_inv[[a, m]] * s_low[[m, r, s]]).sum())
}

fn lower_first(g: &Array2<f64>, t: &Array3<f64>) -> Array3<f64> {
    let n = g.nrows();
    Array3::from_shape_fn((n, n, n), |(a, b, c)| (0..n).map(|l| g[[a, l]] * t[[l, b, c]]).sum())
}

fn raise_first(g_inv: &Array2<f64>, t: &Array3<f64>) -> Array3<f64> {
    lower_first(g_inv, t)
}

/// `max |Γ̇^ρ_{μν} - {ρ, μν} - K^ρ_{μν}|`, reading the stored Weitzenböck
/// coefficient `gamma[[ρ, μ, ν]]` as `Γ̇^ρ_{μν}`.
pub fn decomposition_residual_at(fd: &FramePointData) -> Result<f64> {
    let w = weitzenbock_at(fd);
    let lc = christoffel_at(fd)?;
    let td = torsion_from(fd, &w);
    let n = fd.dim();
    let mut worst = 0.0_f64;
    for r in 0..n {
        for m in 0..n {
            for v in 0..n {
                let d = w.gamma[[r, m, v]] - lc.gamma[[r, m, v]] - td.contortion[[r, m, v]];
                worst = worst.max(d.abs());
            }
        }
    }
    Ok(worst)
}

pub fn riemann_at(conn: &ConnectionCoeffs, fd: &FramePointData) -> CurvatureData {
    let n = fd.dim();
    let (g, dg) = (&conn.gamma, &conn.dgamma);
    let mut riemann = Array4::zeros((n, n, n, n));
    for r in 0..n {
        for s in 0..n {
            for m in 0..n {
                for v in (m + 1)..n {
                    let mut val = dg[[r, s, v, m]] - dg[[r, s, m, v]];
                    for l in 0..n {
                        val += g[[r, l, m]] * g[[l, s, v]] - g[[r, l, v]] * g[[l, s, m]];
                    }
                    riemann[[r, s, m, v]] = val;
                    riemann[[r, s, v, m]] = -val;
                }
            }
        }
    }
    let ricci = Array2::from_shape_fn((n, n), |(s, v)| (0..n).map(|r| riemann[[r, s, r, v]]).sum());
    let (scalar, einstein) = match conn.kind {
        ConnectionKind::Weitzenbock => (None, None),
        ConnectionKind::LeviCivita => {
            let scalar: f64 =
                (0..n).flat_map(|s| (0..n).map(move |v| (s, v))).map(|(s, v)| fd.g_inv[[s, v]] * ricci[[s, v]]).sum();
            let einstein = Array2::from_shape_fn((n, n), |(s, v)| ricci[[s, v]] - 0.5 * fd.g[[s, v]] * scalar);
            (Some(scalar), Some(einstein))
        }
    };
    CurvatureData { riemann, ricci, scalar, einstein }
}

/// Einstein tensor `G_μν` of the metric induced by the tetrad.
pub fn einstein_at(fd: &FramePointData) -> Result<Array2<f64>> {
    let lc = christoffel_at(fd)?;
    Ok(riemann_at(&lc, fd).einstein.expect("Levi-Civita curvature carries the Einstein tensor"))
}

/// Curvature of the Weitzenböck connection relative to `1 + max|Γ̇|²`.
pub fn weitzenbock_flatness_at(fd: &FramePointData) -> f64 {
    let w = weitzenbock_at(fd);
    let curv = riemann_at(&w, fd);
    let gmax = max_abs(w.gamma.iter());
    max_abs(curv.riemann.iter()) / (1.0 + gmax * gmax)
}

/// Teleparallel Lagrangian density `h/(4k²) S^{ρμν} T_{ρμν}`.
pub fn lagrangian_at(fd: &FramePointData, k: f64) -> Result<f64> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidArgument(format!("coupling k must be positive, got {k}")));
    }
    let td = torsion_at(fd);
    let t_low = lower_first(&fd.g, &td.t_coord);
    let contraction: f64 = td.superpotential.iter().zip(t_low.iter()).map(|(s, t)| s * t).sum();
    Ok(fd.det_h / (4.0 * k * k) * contraction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{Param, Params};
    use crate::tetrad::catalog;
    use std::f64::consts::FRAC_PI_2;

    fn polar_at(r: f64, theta: f64) -> FramePointData {
        catalog("minkowski_polar", &Params::new()).unwrap().frame_data_at(&[0.0, r, theta, 0.3]).unwrap()
    }

    fn schwarzschild_at(x: &[f64]) -> FramePointData {
        let p: Params = [("M".to_string(), Param::Value(1.0))].into_iter().collect();
        catalog("schwarzschild", &p).unwrap().frame_data_at(x).unwrap()
    }

    fn frw_at(x: &[f64]) -> FramePointData {
        let p: Params = [("a".to_string(), Param::Expr("t^(2/3)".into()))].into_iter().collect();
        catalog("frw", &p).unwrap().frame_data_at(x).unwrap()
    }

    #[test]
    fn identity_tetrad_has_no_geometry() {
        let fd = catalog("minkowski", &Params::new()).unwrap().frame_data_at(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        let w = weitzenbock_at(&fd);
        assert!(w.gamma.iter().chain(w.dgamma.iter()).all(|v| *v == 0.0));
        let td = torsion_at(&fd);
        for t in [&td.t_coord, &td.t_frame, &td.contortion, &td.superpotential] {
            assert!(t.iter().all(|v| *v == 0.0));
        }
        let lc = christoffel_at(&fd).unwrap();
        assert!(lc.gamma.iter().all(|v| *v == 0.0));
        assert_eq!(decomposition_residual_at(&fd).unwrap(), 0.0);
        assert_eq!(lagrangian_at(&fd, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn weitzenbock_examples() {
        let w = weitzenbock_at(&polar_at(2.0, FRAC_PI_2));
        assert!((w.gamma[[2, 2, 1]] - 0.5).abs() < 1e-15);

        let w = weitzenbock_at(&schwarzschild_at(&[0.0, 4.0, FRAC_PI_2, 0.0]));
        // f'/(2f) with f = 1/2, f' = 1/8
        assert!((w.gamma[[0, 0, 1]] - 0.125).abs() < 1e-14);
    }

    #[test]
    fn torsion_examples() {
        let td = torsion_at(&polar_at(2.0, FRAC_PI_2));
        assert!((td.t_coord[[2, 1, 2]] - 0.5).abs() < 1e-15);
        assert_eq!(td.t_coord[[2, 2, 1]], -td.t_coord[[2, 1, 2]]);

        let td = torsion_at(&schwarzschild_at(&[0.0, 4.0, FRAC_PI_2, 0.0]));
        let want = 0.125 / (2.0 * 0.5f64.sqrt());
        assert!((td.t_frame[[0, 1, 0]] - want).abs() < 1e-15);
        assert!((td.t_frame[[0, 1, 0]] - 0.08838835).abs() < 1e-8);
    }

    #[test]
    fn christoffel_examples() {
        let lc = christoffel_at(&polar_at(2.0, FRAC_PI_2)).unwrap();
        assert!((lc.gamma[[2, 1, 2]] - 0.5).abs() < 1e-15);
        assert!((lc.gamma[[1, 2, 2]] + 2.0).abs() < 1e-14);

        let lc = christoffel_at(&frw_at(&[1.0, 0.2, -0.1, 0.4])).unwrap();
        assert!((lc.gamma[[0, 1, 1]] - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn decomposition_on_curved_tetrads() {
        for x in [[0.1, 4.0, 1.0, 0.2], [0.0, 7.5, 0.4, -0.7]] {
            assert!(decomposition_residual_at(&schwarzschild_at(&x)).unwrap() <= 1e-10);
        }
        assert!(decomposition_residual_at(&frw_at(&[1.3, 0.1, 0.2, 0.3])).unwrap() <= 1e-10);
    }

    #[test]
    fn curvature_examples() {
        let fd = polar_at(2.0, 1.1);
        assert!(max_abs(riemann_at(&christoffel_at(&fd).unwrap(), &fd).riemann.iter()) <= 1e-10);
        assert!(weitzenbock_flatness_at(&fd) <= 1e-9);

        let fd = schwarzschild_at(&[0.0, 4.0, FRAC_PI_2, 0.0]);
        let curv = riemann_at(&christoffel_at(&fd).unwrap(), &fd);
        assert!(curv.riemann[[0, 1, 0, 1]].abs() > 1e-3);
        assert!(max_abs(curv.ricci.iter()) <= 1e-8);
        assert!(weitzenbock_flatness_at(&fd) <= 1e-9);
        assert!(riemann_at(&weitzenbock_at(&fd), &fd).einstein.is_none());
    }

    #[test]
    fn curvature_sign_convention() {
        // R^t_{rtr} of Schwarzschild is -f''/2 ... with f = 1 - 2M/r:
        // Γ^t_{tr} = f'/(2f), Γ^r_{tt} = f f'/2, Γ^r_{rr} = -f'/(2f).
        // R^t_{rtr} = ∂_t Γ^t_{rr} - ∂_r Γ^t_{tr} + Γ^t_{tλ}Γ^λ_{rr} - Γ^t_{rλ}Γ^λ_{tr}
        //           = -(f'/(2f))' + (f'/(2f))(-f'/(2f)) - (f'/(2f))^2 = -f''/(2f) - ... simplifies to 2M/(r^3 f).
        let r: f64 = 5.0;
        let f = 1.0 - 2.0 / r;
        let fd = schwarzschild_at(&[0.0, r, 1.0, 0.0]);
        let curv = riemann_at(&christoffel_at(&fd).unwrap(), &fd);
        let want = 2.0 / (r.powi(3) * f);
        assert!((curv.riemann[[0, 1, 0, 1]] - want).abs() < 1e-12, "{} vs {want}", curv.riemann[[0, 1, 0, 1]]);
    }

    #[test]
    fn frw_einstein_tt() {
        let g = einstein_at(&frw_at(&[1.0, 0.0, 0.0, 0.0])).unwrap();
        assert!((g[[0, 0]] - 4.0 / 3.0).abs() < 1e-12);
        for i in 0..4 {
            for j in 0..4 {
                assert!((g[[i, j]] - g[[j, i]]).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn lagrangian_brute_force_contraction() {
        let fd = polar_at(1.7, 0.9);
        let td = torsion_at(&fd);
        let n = 4;
        let mut sum = 0.0;
        for r in 0..n {
            for m in 0..n {
                for v in 0..n {
                    for l in 0..n {
                        sum += td.superpotential[[r, m, v]] * fd.g[[r, l]] * td.t_coord[[l, m, v]];
                    }
                }
            }
        }
        let want = fd.det_h / 4.0 * sum;
        let got = lagrangian_at(&fd, 1.0).unwrap();
        assert!((got - want).abs() <= 1e-13 * (1.0 + want.abs()), "{got} vs {want}");
        assert!(lagrangian_at(&fd, 0.0).is_err());
    }
}
