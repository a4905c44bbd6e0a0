//! The gravity Lie algebroid on the tetrad frame.
//!
//! Sections are stored in the frame basis `u = u^a D_a` and the anchor is
//! `ρ(D_a) = h_a = h_a^μ ∂_μ`. The frame commutator is `[D_a, D_b] = -T^c_{ab} D_c`,
//! so the anholonomy `f^c_{ab}` of `[h_a, h_b] = f^c_{ab} h_c` equals `-T^c_{ab}`.

mod groupoid;

pub use groupoid::{GroupoidLawReport, PairGroupoid, PairGroupoidElement};

use ndarray::{Array2, Array3};
use num_dual::Dual64;

use crate::error::{Error, Result};
use crate::expr::{parse, Chart, Jet2, Params, ScalarField};
use crate::linalg::Scalar;
use crate::telegeom::TorsionData;
use crate::tetrad::{FramePointData, TetradField};

/// A section `u^a(x) D_a` of the algebroid.
#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    components: Vec<ScalarField>,
}

impl Section {
    pub fn new(components: Vec<ScalarField>) -> Result<Self> {
        let chart =
            components.first().map(|f| f.chart()).ok_or_else(|| Error::InvalidArgument("empty section".into()))?;
        if components.len() != chart.dim() || components.iter().any(|f| f.chart() != chart) {
            return Err(Error::InvalidArgument(format!("section needs {} components on one chart", chart.dim())));
        }
        Ok(Section { components })
    }

    pub fn parse(sources: &[&str], chart: &Chart, params: &Params) -> Result<Self> {
        let comps = sources.iter().map(|s| parse(s, chart, params)).collect::<Result<Vec<_>, _>>()?;
        Section::new(comps)
    }

    pub fn constant(values: &[f64], chart: &Chart) -> Result<Self> {
        Section::new(values.iter().map(|v| ScalarField::constant(*v, chart)).collect())
    }

    /// The generator `D_a`.
    pub fn unit(a: usize, chart: &Chart) -> Self {
        let comps = (0..chart.dim()).map(|b| ScalarField::constant(if a == b { 1.0 } else { 0.0 }, chart)).collect();
        Section { components: comps }
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// `f u` for a scalar field `f`.
    pub fn scaled(&self, f: &ScalarField) -> Section {
        Section { components: self.components.iter().map(|c| f.mul(c)).collect() }
    }

    fn jets(&self, point: &[f64]) -> Result<Vec<Jet2>> {
        Ok(self.components.iter().map(|c| c.eval_jet2(point)).collect::<Result<_, _>>()?)
    }

    pub fn eval(&self, point: &[f64]) -> Result<Vec<f64>> {
        Ok(self.components.iter().map(|c| c.eval(point)).collect::<Result<_, _>>()?)
    }
}

/// `T^c_{ab}` at a point, `tc[[c, a, b]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureFunctions {
    pub tc: Array3<f64>,
}

/// `T^c_{ab} = h_a^μ h_b^ν h^c_ρ T^ρ_{μν}`.
pub fn structure_functions_at(fd: &FramePointData, td: &TorsionData) -> StructureFunctions {
    let n = fd.dim();
    let t_mixed: Array3<f64> =
        Array3::from_shape_fn((n, n, n), |(c, m, v)| (0..n).map(|r| fd.h[[c, r]] * td.t_coord[[r, m, v]]).sum());
    let mut tc = Array3::zeros((n, n, n));
    for c in 0..n {
        for a in 0..n {
            for b in (a + 1)..n {
                let mut acc = 0.0;
                for m in 0..n {
                    for v in 0..n {
                        acc += fd.h_inv[[a, m]] * fd.h_inv[[b, v]] * t_mixed[[c, m, v]];
                    }
                }
                tc[[c, a, b]] = acc;
                tc[[c, b, a]] = -acc;
            }
        }
    }
    StructureFunctions { tc }
}

/// Coordinate components `X^μ = u^a h_a^μ` of the anchored section at `fd.point`.
pub fn anchor_apply(u: &Section, fd: &FramePointData) -> Result<Vec<f64>> {
    let vals = u.eval(&fd.point)?;
    Ok(anchor_values(&vals, &fd.h_inv))
}

fn anchor_values(u: &[f64], h_inv: &Array2<f64>) -> Vec<f64> {
    let n = u.len();
    (0..n).map(|m| (0..n).map(|a| u[a] * h_inv[[a, m]]).sum()).collect()
}

/// Frame components of the bracket, split into its pieces.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketTerms {
    /// `-u^a v^b T^c_{ab}`
    pub structure: Vec<f64>,
    /// `u^a h_a(v^c)`
    pub u_derivative: Vec<f64>,
    /// `-v^a h_a(u^c)`
    pub v_derivative: Vec<f64>,
    pub total: Vec<f64>,
}

/// `[u, v]^c = -u^a v^b T^c_{ab} + u^a h_a^μ ∂_μ v^c - v^a h_a^μ ∂_μ u^c`.
///
/// Generic so that the same kernel yields a bracket and its directional
/// derivative. `du[a][μ] = ∂_μ u^a`.
pub fn frame_bracket<S: Scalar>(
    u: &[S],
    du: &[Vec<S>],
    v: &[S],
    dv: &[Vec<S>],
    h_inv: &Array2<S>,
    tc: &Array3<S>,
) -> Vec<S> {
    let n = u.len();
    let zero = S::from(0.0);
    (0..n)
        .map(|c| {
            let mut acc = zero;
            for a in 0..n {
                for b in 0..n {
                    acc -= u[a] * v[b] * tc[[c, a, b]];
                }
                for m in 0..n {
                    acc += h_inv[[a, m]] * (u[a] * dv[c][m] - v[a] * du[c][m]);
                }
            }
            acc
        })
        .collect()
}

pub fn bracket_terms(u: &Section, v: &Section, fd: &FramePointData, sf: &StructureFunctions) -> Result<BracketTerms> {
    let n = fd.dim();
    let (ju, jv) = (u.jets(&fd.point)?, v.jets(&fd.point)?);
    let directional = |x: &[Jet2], y: &[Jet2], c: usize| -> f64 {
        (0..n).map(|a| (0..n).map(|m| x[a].value * fd.h_inv[[a, m]] * y[c].grad[m]).sum::<f64>()).sum()
    };
    let mut terms = BracketTerms {
        structure: vec![0.0; n],
        u_derivative: vec![0.0; n],
        v_derivative: vec![0.0; n],
        total: vec![0.0; n],
    };
    for c in 0..n {
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                s -= ju[a].value * jv[b].value * sf.tc[[c, a, b]];
            }
        }
        terms.structure[c] = s;
        terms.u_derivative[c] = directional(&ju, &jv, c);
        terms.v_derivative[c] = -directional(&jv, &ju, c);
        terms.total[c] = s + terms.u_derivative[c] + terms.v_derivative[c];
    }
    Ok(terms)
}

/// Frame components of `[u, v]_E` at `fd.point`.
pub fn bracket_sections(u: &Section, v: &Section, fd: &FramePointData, sf: &StructureFunctions) -> Result<Vec<f64>> {
    let (ju, jv) = (u.jets(&fd.point)?, v.jets(&fd.point)?);
    let (uv, du) = split_jets(&ju);
    let (vv, dv) = split_jets(&jv);
    Ok(frame_bracket(&uv, &du, &vv, &dv, &fd.h_inv, &sf.tc))
}

fn split_jets(j: &[Jet2]) -> (Vec<f64>, Vec<Vec<f64>>) {
    (j.iter().map(|x| x.value).collect(), j.iter().map(|x| x.grad.clone()).collect())
}

fn coordinate_bracket(x: &[f64], dx: &[Vec<f64>], y: &[f64], dy: &[Vec<f64>]) -> Vec<f64> {
    let n = x.len();
    (0..n).map(|m| (0..n).map(|v| x[v] * dy[m][v] - y[v] * dx[m][v]).sum()).collect()
}

/// Value and coordinate gradient of the anchored field `X^μ = u^a h_a^μ`.
fn anchored_jet(j: &[Jet2], fd: &FramePointData) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = fd.dim();
    let vals: Vec<f64> = j.iter().map(|x| x.value).collect();
    let x = anchor_values(&vals, &fd.h_inv);
    let dx = (0..n)
        .map(|m| {
            (0..n)
                .map(|s| (0..n).map(|a| j[a].grad[s] * fd.h_inv[[a, m]] + j[a].value * fd.dh_inv[[a, m, s]]).sum())
                .collect()
        })
        .collect();
    (x, dx)
}

/// `max |ρ([u, v]) - [ρ(u), ρ(v)]|`.
pub fn anchor_homomorphism_residual(
    u: &Section,
    v: &Section,
    fd: &FramePointData,
    sf: &StructureFunctions,
) -> Result<f64> {
    let b = bracket_sections(u, v, fd, sf)?;
    let lhs = anchor_values(&b, &fd.h_inv);
    let (x, dx) = anchored_jet(&u.jets(&fd.point)?, fd);
    let (y, dy) = anchored_jet(&v.jets(&fd.point)?, fd);
    let rhs = coordinate_bracket(&x, &dx, &y, &dy);
    Ok(max_diff(&lhs, &rhs))
}

/// Max-norm of `[u, f v] - f [u, v] - (ρ(u) f) v`.
pub fn leibniz_residual(
    u: &Section,
    v: &Section,
    f: &ScalarField,
    fd: &FramePointData,
    sf: &StructureFunctions,
) -> Result<f64> {
    let lhs = bracket_sections(u, &v.scaled(f), fd, sf)?;
    let plain = bracket_sections(u, v, fd, sf)?;
    let jf = f.eval_jet2(&fd.point)?;
    let x = anchor_apply(u, fd)?;
    let rho_f: f64 = x.iter().zip(&jf.grad).map(|(a, b)| a * b).sum();
    let vv = v.eval(&fd.point)?;
    let rhs: Vec<f64> = plain.iter().zip(&vv).map(|(b, v)| jf.value * b + rho_f * v).collect();
    Ok(max_diff(&lhs, &rhs))
}

/// `T^c_{ab}` built from the frame torsion `h_a^μ h_b^ν (∂_μ h^c_ν - ∂_ν h^c_μ)`.
fn structure_from_frame<S: Scalar>(h_inv: &Array2<S>, dh: &ndarray::Array3<S>) -> Array3<S> {
    let n = h_inv.nrows();
    let zero = S::from(0.0);
    let mut tc = Array3::from_elem((n, n, n), zero);
    for c in 0..n {
        for a in 0..n {
            for b in (a + 1)..n {
                let mut acc = zero;
                for m in 0..n {
                    for v in 0..n {
                        acc += h_inv[[a, m]] * h_inv[[b, v]] * (dh[[c, v, m]] - dh[[c, m, v]]);
                    }
                }
                tc[[c, a, b]] = acc;
                tc[[c, b, a]] = -acc;
            }
        }
    }
    tc
}

/// Value and gradient of `[u, v]^c` at `fd.point`, `(value[c], grad[c][σ])`.
fn bracket_jet(ju: &[Jet2], jv: &[Jet2], fd: &FramePointData) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = fd.dim();
    let mut value = vec![0.0; n];
    let mut grad = vec![vec![0.0; n]; n];
    for s in 0..n {
        let lift = |j: &[Jet2]| -> (Vec<Dual64>, Vec<Vec<Dual64>>) {
            (
                j.iter().map(|x| Dual64::new(x.value, x.grad[s])).collect(),
                j.iter().map(|x| (0..n).map(|m| Dual64::new(x.grad[m], x.hess(m, s))).collect()).collect(),
            )
        };
        let (u, du) = lift(ju);
        let (v, dv) = lift(jv);
        let h_inv = Array2::from_shape_fn((n, n), |(a, m)| Dual64::new(fd.h_inv[[a, m]], fd.dh_inv[[a, m, s]]));
        let dh = Array3::from_shape_fn((n, n, n), |(a, m, v)| Dual64::new(fd.dh[[a, m, v]], fd.ddh[[a, m, v, s]]));
        let tc = structure_from_frame(&h_inv, &dh);
        let b = frame_bracket(&u, &du, &v, &dv, &h_inv, &tc);
        for c in 0..n {
            value[c] = b[c].re;
            grad[c][s] = b[c].eps;
        }
    }
    (value, grad)
}

/// Max-norm of the cyclic sum `[[u,v],w] + [[v,w],u] + [[w,u],v]`.
pub fn jacobi_residual(
    u: &Section,
    v: &Section,
    w: &Section,
    fd: &FramePointData,
    sf: &StructureFunctions,
) -> Result<f64> {
    let (ju, jv, jw) = (u.jets(&fd.point)?, v.jets(&fd.point)?, w.jets(&fd.point)?);
    let outer = |x: &[Jet2], y: &[Jet2], z: &[Jet2]| -> Vec<f64> {
        let (b, db) = bracket_jet(x, y, fd);
        let (zv, dz) = split_jets(z);
        frame_bracket(&b, &db, &zv, &dz, &fd.h_inv, &sf.tc)
    };
    let (p, q, r) = (outer(&ju, &jv, &jw), outer(&jv, &jw, &ju), outer(&jw, &ju, &jv));
    Ok((0..fd.dim()).map(|c| (p[c] + q[c] + r[c]).abs()).fold(0.0, f64::max))
}

/// `f^c_{ab} = h^c_ν (h_a^μ ∂_μ h_b^ν - h_b^μ ∂_μ h_a^ν)`.
pub fn anholonomy_at(fd: &FramePointData) -> Array3<f64> {
    let n = fd.dim();
    // coordinate bracket [h_a, h_b]^ν
    let comm: Array3<f64> = Array3::from_shape_fn((n, n, n), |(a, b, v)| {
        (0..n).map(|m| fd.h_inv[[a, m]] * fd.dh_inv[[b, v, m]] - fd.h_inv[[b, m]] * fd.dh_inv[[a, v, m]]).sum()
    });
    Array3::from_shape_fn((n, n, n), |(c, a, b)| (0..n).map(|v| fd.h[[c, v]] * comm[[a, b, v]]).sum())
}

/// `|(D_a D_b - D_b D_a) φ + T^c_{ab} D_c φ|` with `D_a = h_a^μ ∂_μ`.
pub fn commutator_check(
    a: usize,
    b: usize,
    phi: &ScalarField,
    fd: &FramePointData,
    sf: &StructureFunctions,
) -> Result<f64> {
    let n = fd.dim();
    if a >= n || b >= n {
        return Err(Error::InvalidArgument(format!("frame index out of range for dimension {n}")));
    }
    let j = phi.eval_jet2(&fd.point)?;
    let d1 = |c: usize| -> f64 { (0..n).map(|m| fd.h_inv[[c, m]] * j.grad[m]).sum() };
    let d2 = |p: usize, q: usize| -> f64 {
        let mut acc = 0.0;
        for m in 0..n {
            for v in 0..n {
                acc += fd.h_inv[[p, m]] * (fd.dh_inv[[q, v, m]] * j.grad[v] + fd.h_inv[[q, v]] * j.hess(m, v));
            }
        }
        acc
    };
    let lhs = d2(a, b) - d2(b, a);
    let rhs: f64 = (0..n).map(|c| sf.tc[[c, a, b]] * d1(c)).sum();
    Ok((lhs + rhs).abs())
}

/// Local translation by `ε^a D_a`: `h'^a_μ = h^a_μ + ∂_μ ε^a`.
pub fn gauge_transform(tetrad: &TetradField, eps: &Section) -> Result<TetradField> {
    let n = tetrad.dim();
    if eps.dim() != n || eps.components()[0].chart() != tetrad.chart() {
        return Err(Error::InvalidArgument("translation parameter must live on the tetrad's chart".into()));
    }
    let comps =
        (0..n).map(|a| (0..n).map(|m| tetrad.component(a, m).add(&eps.components()[a].partial(m))).collect()).collect();
    TetradField::from_fields(
        format!("{}_translated", tetrad.name()),
        tetrad.params().clone(),
        comps,
        tetrad.domain().cloned(),
    )
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Param;
    use crate::linalg::max_abs;
    use crate::telegeom::torsion_at;
    use crate::tetrad::catalog;
    use std::f64::consts::FRAC_PI_2;

    fn setup(name: &str, params: &[(&str, Param)], x: &[f64]) -> (TetradField, FramePointData, StructureFunctions) {
        let p: Params = params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        let t = catalog(name, &p).unwrap();
        let fd = t.frame_data_at(x).unwrap();
        let sf = structure_functions_at(&fd, &torsion_at(&fd));
        (t, fd, sf)
    }

    fn polar(r: f64, th: f64) -> (TetradField, FramePointData, StructureFunctions) {
        setup("minkowski_polar", &[], &[0.1, r, th, 0.2])
    }

    fn schwarzschild(x: &[f64]) -> (TetradField, FramePointData, StructureFunctions) {
        setup("schwarzschild", &[("M", Param::Value(1.0))], x)
    }

    #[test]
    fn structure_function_examples() {
        let (_, _, sf) = setup("minkowski", &[], &[0.1, 0.2, 0.3, 0.4]);
        assert!(sf.tc.iter().all(|v| *v == 0.0));

        let (_, _, sf) = polar(2.0, FRAC_PI_2);
        assert!((sf.tc[[2, 1, 2]] - 0.5).abs() < 1e-15);
        assert_eq!(sf.tc[[2, 2, 1]], -sf.tc[[2, 1, 2]]);

        let (_, _, sf) = schwarzschild(&[0.0, 4.0, FRAC_PI_2, 0.0]);
        assert!((sf.tc[[0, 1, 0]] - 0.08838835).abs() < 1e-8);
    }

    #[test]
    fn frame_structure_agrees_with_coordinate_route() {
        let (_, fd, sf) = schwarzschild(&[0.3, 5.5, 1.2, -0.4]);
        let tc = structure_from_frame(&fd.h_inv, &fd.dh);
        for (x, y) in tc.iter().zip(sf.tc.iter()) {
            assert!((x - y).abs() <= 1e-13);
        }
    }

    #[test]
    fn anchor_examples() {
        let (t, fd, _) = setup("minkowski", &[], &[0.0; 4]);
        let u = Section::unit(0, t.chart());
        assert_eq!(anchor_apply(&u, &fd).unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        let z = Section::constant(&[0.0; 4], t.chart()).unwrap();
        assert_eq!(anchor_apply(&z, &fd).unwrap(), vec![0.0; 4]);

        let (t, fd, _) = polar(2.0, 1.0);
        let x = anchor_apply(&Section::unit(2, t.chart()), &fd).unwrap();
        assert!((x[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bracket_examples() {
        let (t, fd, sf) = setup("minkowski", &[], &[0.0; 4]);
        let u = Section::constant(&[1.0, 2.0, -1.0, 0.5], t.chart()).unwrap();
        let v = Section::constant(&[0.3, 0.0, 1.0, 4.0], t.chart()).unwrap();
        assert_eq!(bracket_sections(&u, &v, &fd, &sf).unwrap(), vec![0.0; 4]);

        let (t, fd, sf) = polar(2.0, FRAC_PI_2);
        let b = bracket_sections(&Section::unit(1, t.chart()), &Section::unit(2, t.chart()), &fd, &sf).unwrap();
        assert!((b[2] + 0.5).abs() < 1e-15);
        assert!(b.iter().enumerate().all(|(c, v)| c == 2 || *v == 0.0));
    }

    #[test]
    fn bracket_terms_sum_to_bracket() {
        let (t, fd, sf) = schwarzschild(&[0.1, 6.0, 1.1, 0.3]);
        let u = Section::parse(&["r", "t*theta", "1", "sin(phi)"], t.chart(), t.params()).unwrap();
        let v = Section::parse(&["cos(theta)", "r^2/10", "t", "0.5"], t.chart(), t.params()).unwrap();
        let terms = bracket_terms(&u, &v, &fd, &sf).unwrap();
        let b = bracket_sections(&u, &v, &fd, &sf).unwrap();
        assert!(max_diff(&terms.total, &b) <= 1e-12);
        let swapped = bracket_sections(&v, &u, &fd, &sf).unwrap();
        assert!(b.iter().zip(&swapped).all(|(x, y)| (x + y).abs() <= 1e-12));
    }

    #[test]
    fn axioms_on_curved_frames() {
        let (t, fd, sf) = schwarzschild(&[0.1, 6.0, 1.1, 0.3]);
        let c = t.chart();
        let u = Section::parse(&["r/6", "t*theta", "1", "sin(phi)"], c, t.params()).unwrap();
        let v = Section::parse(&["cos(theta)", "r^2/36", "t", "0.5"], c, t.params()).unwrap();
        let w = Section::parse(&["theta*phi", "1 - t", "r/4", "exp(t)"], c, t.params()).unwrap();
        let f = parse("r*cos(theta) + t^2", c, t.params()).unwrap();
        assert!(anchor_homomorphism_residual(&u, &v, &fd, &sf).unwrap() <= 1e-12);
        assert!(leibniz_residual(&u, &v, &f, &fd, &sf).unwrap() <= 1e-12);
        assert!(jacobi_residual(&u, &v, &w, &fd, &sf).unwrap() <= 1e-11);
    }

    #[test]
    fn leibniz_polar_example() {
        let (t, fd, sf) = polar(2.0, 1.0);
        let c = t.chart();
        let f = ScalarField::coordinate(1, c);
        assert!(leibniz_residual(&Section::unit(1, c), &Section::unit(2, c), &f, &fd, &sf).unwrap() <= 1e-10);
        let k = ScalarField::constant(3.0, c);
        assert!(leibniz_residual(&Section::unit(1, c), &Section::unit(2, c), &k, &fd, &sf).unwrap() <= 1e-15);
    }

    #[test]
    fn anholonomy_is_minus_torsion() {
        let (_, fd, _) = setup("minkowski", &[], &[0.0; 4]);
        assert!(anholonomy_at(&fd).iter().all(|v| *v == 0.0));

        let (_, fd, _) = polar(2.0, FRAC_PI_2);
        assert!((anholonomy_at(&fd)[[2, 1, 2]] + 0.5).abs() < 1e-15);

        for (_, fd, sf) in [schwarzschild(&[0.0, 7.0, 0.8, 0.1]), polar(3.0, 0.7)] {
            let f = anholonomy_at(&fd);
            assert!(f.iter().zip(sf.tc.iter()).all(|(x, y)| (x + y).abs() <= 1e-12));
        }
    }

    #[test]
    fn commutator_examples() {
        let (t, fd, sf) = polar(2.0, FRAC_PI_2);
        let theta = ScalarField::coordinate(2, t.chart());
        assert!(commutator_check(1, 2, &theta, &fd, &sf).unwrap() <= 1e-11);

        let (t, fd, sf) = schwarzschild(&[0.0, 4.5, 1.3, 0.2]);
        let phi = parse("sin(theta)*r^2 + t*phi", t.chart(), t.params()).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert!(commutator_check(a, b, &phi, &fd, &sf).unwrap() <= 1e-10);
            }
        }
        assert!(commutator_check(4, 0, &phi, &fd, &sf).is_err());
    }

    #[test]
    fn gauge_translation_keeps_torsion() {
        let (t, _, _) = setup("minkowski", &[], &[0.0; 4]);
        let eps = Section::parse(&["0.1*t*x", "0.2*y^2", "0.05*(x + z)^2", "0.1*t*z"], t.chart(), t.params()).unwrap();
        let t2 = gauge_transform(&t, &eps).unwrap();
        let td = torsion_at(&t2.frame_data_at(&[0.2, 0.1, -0.3, 0.4]).unwrap());
        assert!(max_abs(td.t_frame.iter()) <= 1e-12);

        let (t, fd, _) = schwarzschild(&[0.0, 5.0, 1.0, 0.0]);
        let c = Section::constant(&[1.0, 2.0, 3.0, 4.0], t.chart()).unwrap();
        let same = gauge_transform(&t, &c).unwrap().frame_data_at(&fd.point).unwrap();
        assert_eq!(same.h, fd.h);

        let eps =
            Section::parse(&["0.01*r*t", "0.02*theta^2", "0.01*t*phi", "0.03*r*theta"], t.chart(), t.params()).unwrap();
        let fd2 = gauge_transform(&t, &eps).unwrap().frame_data_at(&fd.point).unwrap();
        let (a, b) = (torsion_at(&fd).t_frame, torsion_at(&fd2).t_frame);
        assert!(a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() <= 1e-12));
    }
}
