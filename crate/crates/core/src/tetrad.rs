//! Tetrad fields `h^a_μ(x)`, their pointwise frame data, the translational
//! gauge potential `B = h - δ`, and the built-in catalog.
//!
//! Index conventions used throughout the crate:
//!
//! * `h[[a, μ]] = h^a_μ` and `h_inv[[a, μ]] = h_a^μ`, so that
//!   `Σ_a h_inv[[a, μ]] h[[a, ν]] = δ^μ_ν`.
//! * Derivative indices come last: `dh[[a, μ, ν]] = ∂_ν h^a_μ`,
//!   `ddh[[a, μ, ν, σ]] = ∂_σ ∂_ν h^a_μ`, `dg[[μ, ν, σ]] = ∂_σ g_μν`.
//! * Frame indices are moved with `η = diag(signature)`, coordinate indices
//!   with `g_μν = η_ab h^a_μ h^b_ν`.

use std::f64::consts::PI;

use ndarray::{Array2, Array3, Array4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{parse, Chart, Jet2, Param, Params, ScalarField};
use crate::harness::sampling::Domain;
use crate::linalg::inverse_and_det;

/// Smallest |det h| accepted as invertible.
pub const MIN_ABS_DET: f64 = 1e-12;

/// A tetrad field over a chart. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct TetradField {
    name: String,
    chart: Chart,
    params: Params,
    components: Vec<Vec<ScalarField>>,
    sources: Vec<Vec<String>>,
    domain: Option<Domain>,
}

impl TetradField {
    /// Builds a tetrad from expression strings, `sources[a][μ]` giving `h^a_μ`.
    pub fn new(
        name: impl Into<String>,
        chart: Chart,
        params: Params,
        sources: Vec<Vec<String>>,
        domain: Option<Domain>,
    ) -> Result<Self> {
        let dim = chart.dim();
        if sources.len() != dim || sources.iter().any(|row| row.len() != dim) {
            return Err(Error::InvalidSpec(format!("tetrad must be a {dim}x{dim} matrix of expressions")));
        }
        if let Some(d) = &domain {
            if d.dim() != dim {
                return Err(Error::InvalidSpec(format!("domain has {} coordinates, chart has {dim}", d.dim())));
            }
        }
        let components = sources
            .iter()
            .map(|row| row.iter().map(|s| parse(s, &chart, &params)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TetradField { name: name.into(), chart, params, components, sources, domain })
    }

    /// Builds a tetrad directly from fields; sources are their printed forms.
    pub fn from_fields(
        name: impl Into<String>,
        params: Params,
        components: Vec<Vec<ScalarField>>,
        domain: Option<Domain>,
    ) -> Result<Self> {
        let chart = components
            .first()
            .and_then(|row| row.first())
            .map(|f| f.chart().clone())
            .ok_or_else(|| Error::InvalidSpec("empty tetrad".into()))?;
        let dim = chart.dim();
        if components.len() != dim || components.iter().any(|row| row.len() != dim) {
            return Err(Error::InvalidSpec(format!("tetrad must be a {dim}x{dim} matrix")));
        }
        let sources = components.iter().map(|row| row.iter().map(ToString::to_string).collect()).collect();
        Ok(TetradField { name: name.into(), chart, params, components, sources, domain })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// `h^a_μ` as a field.
    pub fn component(&self, a: usize, mu: usize) -> &ScalarField {
        &self.components[a][mu]
    }

    pub fn components(&self) -> &[Vec<ScalarField>] {
        &self.components
    }

    pub fn sources(&self) -> &[Vec<String>] {
        &self.sources
    }

    pub fn domain(&self) -> Option<&Domain> {
        self.domain.as_ref()
    }

    /// Sampling domain, defaulting to `[-1, 1]` on every coordinate.
    pub fn domain_or_default(&self) -> Domain {
        self.domain.clone().unwrap_or_else(|| Domain::uniform(self.dim(), -1.0, 1.0).expect("valid box"))
    }

    pub fn frame_data_at(&self, point: &[f64]) -> Result<FramePointData> {
        FramePointData::compute(self, point)
    }

    pub fn gauge_potential_at(&self, point: &[f64]) -> Result<GaugePotential> {
        Ok(self.frame_data_at(point)?.gauge_potential())
    }

    pub fn to_spec(&self) -> TetradSpec {
        TetradSpec {
            name: self.name.clone(),
            dim: self.dim(),
            coords: self.chart.coord_names().to_vec(),
            signature: self.chart.signature().to_vec(),
            params: self.params.clone(),
            tetrad: self.sources.clone(),
            domain: self.domain.clone(),
        }
    }

    pub fn from_spec(spec: &TetradSpec) -> Result<Self> {
        if spec.dim != spec.coords.len() {
            return Err(Error::InvalidSpec(format!(
                "dim is {} but {} coordinates are listed",
                spec.dim,
                spec.coords.len()
            )));
        }
        let chart = Chart::new(spec.coords.clone(), spec.signature.clone())?;
        TetradField::new(spec.name.clone(), chart, spec.params.clone(), spec.tetrad.clone(), spec.domain.clone())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        TetradField::from_spec(&TetradSpec::from_json(text)?)
    }

    pub fn to_json(&self) -> String {
        self.to_spec().to_json()
    }
}

/// On-disk form of a tetrad (see `docs/tetrad-spec.schema.json`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TetradSpec {
    pub name: String,
    pub dim: usize,
    pub coords: Vec<String>,
    pub signature: Vec<i8>,
    #[serde(default)]
    pub params: Params,
    pub tetrad: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
}

impl TetradSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Canonical serialization: pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec serializes");
        s.push('\n');
        s
    }
}

/// Everything the geometry kernels need from a tetrad at one point, filled
/// from exact second-order jets.
#[derive(Clone, Debug)]
pub struct FramePointData {
    pub point: Vec<f64>,
    pub eta: Vec<f64>,
    pub h: Array2<f64>,
    pub h_inv: Array2<f64>,
    pub dh: Array3<f64>,
    pub ddh: Array4<f64>,
    /// `dh_inv[[a, μ, σ]] = ∂_σ h_a^μ`.
    pub dh_inv: Array3<f64>,
    pub g: Array2<f64>,
    pub g_inv: Array2<f64>,
    pub dg: Array3<f64>,
    /// `ddg[[μ, ν, σ, τ]] = ∂_τ ∂_σ g_μν`.
    pub ddg: Array4<f64>,
    pub det_h: f64,
}

impl FramePointData {
    fn compute(tetrad: &TetradField, point: &[f64]) -> Result<Self> {
        let n = tetrad.dim();
        if point.len() != n {
            return Err(Error::InvalidArgument(format!("point has {} coordinates, chart has {n}", point.len())));
        }
        let jets: Vec<Vec<Jet2>> = tetrad
            .components
            .iter()
            .map(|row| row.iter().map(|f| f.eval_jet2(point)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let h = Array2::from_shape_fn((n, n), |(a, m)| jets[a][m].value);
        let dh = Array3::from_shape_fn((n, n, n), |(a, m, s)| jets[a][m].grad[s]);
        let ddh = Array4::from_shape_fn((n, n, n, n), |(a, m, s, t)| jets[a][m].hess(s, t));
        Self::from_jets(tetrad.chart.eta(), point.to_vec(), h, dh, ddh)
    }

    /// Assembles frame data from the tetrad and its first two derivatives.
    pub fn from_jets(
        eta: Vec<f64>,
        point: Vec<f64>,
        h: Array2<f64>,
        dh: Array3<f64>,
        ddh: Array4<f64>,
    ) -> Result<Self> {
        let n = h.nrows();
        let (m_inv, det_h) = inverse_and_det(&h).ok_or(Error::SingularTetrad { det: 0.0 })?;
        if !(det_h.abs() > MIN_ABS_DET) {
            return Err(Error::SingularTetrad { det: det_h.abs() });
        }
        // m_inv[[μ, a]] = h_a^μ
        let h_inv = m_inv.t().to_owned();

        let mut dh_inv = Array3::zeros((n, n, n));
        for a in 0..n {
            for m in 0..n {
                for s in 0..n {
                    let mut acc = 0.0;
                    for b in 0..n {
                        for nu in 0..n {
                            acc -= h_inv[[a, nu]] * dh[[b, nu, s]] * h_inv[[b, m]];
                        }
                    }
                    dh_inv[[a, m, s]] = acc;
                }
            }
        }

        let g = Array2::from_shape_fn((n, n), |(m, v)| (0..n).map(|a| eta[a] * h[[a, m]] * h[[a, v]]).sum());
        let g_inv =
            Array2::from_shape_fn((n, n), |(m, v)| (0..n).map(|a| eta[a] * h_inv[[a, m]] * h_inv[[a, v]]).sum());
        let dg = Array3::from_shape_fn((n, n, n), |(m, v, s)| {
            (0..n).map(|a| eta[a] * (dh[[a, m, s]] * h[[a, v]] + h[[a, m]] * dh[[a, v, s]])).sum()
        });
        let ddg = Array4::from_shape_fn((n, n, n, n), |(m, v, s, t)| {
            (0..n)
                .map(|a| {
                    eta[a]
                        * (ddh[[a, m, s, t]] * h[[a, v]]
                            + dh[[a, m, s]] * dh[[a, v, t]]
                            + dh[[a, m, t]] * dh[[a, v, s]]
                            + h[[a, m]] * ddh[[a, v, s, t]])
                })
                .sum()
        });
        Ok(FramePointData { point, eta, h, h_inv, dh, ddh, dh_inv, g, g_inv, dg, ddg, det_h })
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    /// `B^a_μ = h^a_μ - δ^a_μ` and `∂_ν B^a_μ = ∂_ν h^a_μ`.
    pub fn gauge_potential(&self) -> GaugePotential {
        let n = self.dim();
        let b = Array2::from_shape_fn((n, n), |(a, m)| if a == m { self.h[[a, m]] - 1.0 } else { self.h[[a, m]] });
        GaugePotential { b, db: self.dh.clone() }
    }
}

/// Translational gauge potential at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugePotential {
    pub b: Array2<f64>,
    pub db: Array3<f64>,
}

impl GaugePotential {
    /// `T^a_μν = ∂_μ B^a_ν - ∂_ν B^a_μ`.
    pub fn field_strength(&self) -> Array3<f64> {
        let n = self.b.nrows();
        Array3::from_shape_fn((n, n, n), |(a, m, v)| self.db[[a, v, m]] - self.db[[a, m, v]])
    }
}

/// A built-in analytic tetrad.
#[derive(Clone, Copy, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub params: &'static [(&'static str, &'static str)],
    pub example: &'static [(&'static str, &'static str)],
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "minkowski",
        description: "identity tetrad in Cartesian coordinates (t,x,y,z); domain [-1,1]^4",
        params: &[],
        example: &[],
    },
    CatalogEntry {
        name: "minkowski_polar",
        description: "diag(1, 1, r, r sin(theta)) in (t,r,theta,phi); domain t,phi in [-1,1], r in [1,5], theta in [pi/6, 5pi/6]",
        params: &[],
        example: &[],
    },
    CatalogEntry {
        name: "schwarzschild",
        description: "diag(sqrt(f), 1/sqrt(f), r, r sin(theta)), f = 1 - 2M/r, in (t,r,theta,phi); domain t,phi in [-1,1], r in [3M,20M], theta in [0.2, pi-0.2]",
        params: &[("M", "mass, a positive number")],
        example: &[("M", "1")],
    },
    CatalogEntry {
        name: "frw",
        description: "diag(1, a(t), a(t), a(t)) in (t,x,y,z); domain t in [0.5,2], x,y,z in [-1,1]",
        params: &[("a", "scale factor, an expression in t")],
        example: &[("a", "t^(2/3)")],
    },
];

fn require(params: &Params, name: &str) -> Result<()> {
    if params.contains_key(name) {
        Ok(())
    } else {
        Err(Error::MissingParameter(name.to_string()))
    }
}

fn diagonal(entries: [&str; 4]) -> Vec<Vec<String>> {
    (0..4).map(|a| (0..4).map(|m| if a == m { entries[a].to_string() } else { "0".to_string() }).collect()).collect()
}

/// Looks up a built-in tetrad.
pub fn catalog(name: &str, params: &Params) -> Result<TetradField> {
    let entry = CATALOG.iter().find(|e| e.name == name).ok_or_else(|| Error::UnknownTetrad {
        name: name.to_string(),
        valid: CATALOG.iter().map(|e| e.name).collect::<Vec<_>>().join(", "),
    })?;
    for key in params.keys() {
        if !entry.params.iter().any(|(p, _)| p == key) {
            return Err(Error::InvalidArgument(format!("tetrad `{name}` takes no parameter `{key}`")));
        }
    }
    for (p, _) in entry.params {
        require(params, p)?;
    }
    let cartesian = || Chart::lorentzian(["t", "x", "y", "z"]);
    let spherical = || Chart::lorentzian(["t", "r", "theta", "phi"]);
    let (chart, sources, domain) = match name {
        "minkowski" => (cartesian()?, diagonal(["1", "1", "1", "1"]), Domain::uniform(4, -1.0, 1.0)?),
        "minkowski_polar" => (
            spherical()?,
            diagonal(["1", "1", "r", "r*sin(theta)"]),
            Domain::new(vec![[-1.0, 1.0], [1.0, 5.0], [PI / 6.0, 5.0 * PI / 6.0], [-1.0, 1.0]])?,
        ),
        "schwarzschild" => {
            let m = match params["M"] {
                Param::Value(m) if m > 0.0 && m.is_finite() => m,
                _ => return Err(Error::InvalidArgument("schwarzschild mass M must be a positive number".into())),
            };
            (
                spherical()?,
                diagonal(["sqrt(1 - 2*M/r)", "1/sqrt(1 - 2*M/r)", "r", "r*sin(theta)"]),
                Domain::new(vec![[-1.0, 1.0], [3.0 * m, 20.0 * m], [0.2, PI - 0.2], [-1.0, 1.0]])?,
            )
        }
        "frw" => (
            cartesian()?,
            diagonal(["1", "a", "a", "a"]),
            Domain::new(vec![[0.5, 2.0], [-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]])?,
        ),
        _ => unreachable!("catalog entry without a constructor"),
    };
    TetradField::new(name, chart, params.clone(), sources, Some(domain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn params(pairs: &[(&str, Param)]) -> Params {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    fn schwarzschild() -> TetradField {
        catalog("schwarzschild", &params(&[("M", Param::Value(1.0))])).unwrap()
    }

    #[test]
    fn minkowski_frame_is_flat() {
        let t = catalog("minkowski", &Params::new()).unwrap();
        let fd = t.frame_data_at(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        let eta = [1.0, -1.0, -1.0, -1.0];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(fd.g[[i, j]], if i == j { eta[i] } else { 0.0 });
                assert_eq!(fd.h[[i, j]], if i == j { 1.0 } else { 0.0 });
            }
        }
        assert_eq!(fd.det_h, 1.0);
        assert!(fd.dh.iter().all(|v| *v == 0.0));
        assert!(fd.ddh.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn schwarzschild_metric_at_r4() {
        let fd = schwarzschild().frame_data_at(&[0.0, 4.0, FRAC_PI_2, 0.0]).unwrap();
        assert!((fd.g[[0, 0]] - 0.5).abs() < 1e-15);
        assert!((fd.g[[1, 1]] + 2.0).abs() < 1e-14);
        // det = sqrt(f) / sqrt(f) * r * r sin(theta) = r^2
        assert!((fd.det_h - 16.0).abs() < 1e-13);
    }

    #[test]
    fn polar_inverse_is_diagonal() {
        let t = catalog("minkowski_polar", &Params::new()).unwrap();
        let fd = t.frame_data_at(&[0.0, 2.0, FRAC_PI_2, 0.0]).unwrap();
        let want = [1.0, 1.0, 0.5, 0.5];
        for a in 0..4 {
            for m in 0..4 {
                let w = if a == m { want[a] } else { 0.0 };
                assert!((fd.h_inv[[a, m]] - w).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn gauge_potential_examples() {
        let b = catalog("minkowski", &Params::new()).unwrap().gauge_potential_at(&[0.5, 0.1, -0.2, 0.3]).unwrap();
        assert!(b.b.iter().all(|v| *v == 0.0));

        let b = schwarzschild().gauge_potential_at(&[0.0, 4.0, FRAC_PI_2, 0.0]).unwrap();
        assert!((b.b[[0, 0]] - (0.5f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!((b.b[[0, 0]] + 0.29289322).abs() < 1e-8);

        let polar = catalog("minkowski_polar", &Params::new()).unwrap();
        let b = polar.gauge_potential_at(&[0.0, 2.0, FRAC_PI_2, 0.0]).unwrap();
        assert!((b.b[[2, 2]] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn catalog_examples() {
        let s = schwarzschild();
        let lapse = parse("sqrt(1-2/r)", s.chart(), &Params::new()).unwrap();
        for r in [3.5, 4.0, 9.0] {
            let x = [0.0, r, 1.0, 0.0];
            assert_eq!(s.component(0, 0).eval(&x).unwrap(), lapse.eval(&x).unwrap());
        }
        let frw = catalog("frw", &params(&[("a", Param::Expr("t^(2/3)".into()))])).unwrap();
        let direct = parse("t^(2/3)", frw.chart(), &Params::new()).unwrap();
        assert_eq!(*frw.component(1, 1), direct);
        assert_eq!(frw.component(1, 1).to_string(), "t^(2/3)");
    }

    #[test]
    fn catalog_errors() {
        let err = catalog("kerr", &Params::new()).unwrap_err();
        assert!(err.to_string().contains("minkowski_polar"), "{err}");
        assert!(matches!(catalog("schwarzschild", &Params::new()), Err(Error::MissingParameter(p)) if p == "M"));
        assert!(matches!(catalog("frw", &Params::new()), Err(Error::MissingParameter(p)) if p == "a"));
        assert!(catalog("minkowski", &params(&[("M", Param::Value(1.0))])).is_err());
        assert!(catalog("schwarzschild", &params(&[("M", Param::Value(-1.0))])).is_err());
    }

    #[test]
    fn singular_tetrad_reports_determinant() {
        let chart = Chart::new(vec!["t", "x"], vec![1, -1]).unwrap();
        let t = TetradField::new(
            "degenerate",
            chart,
            Params::new(),
            vec![vec!["1".into(), "x".into()], vec!["1".into(), "x".into()]],
            None,
        )
        .unwrap();
        assert!(matches!(t.frame_data_at(&[0.0, 0.5]), Err(Error::SingularTetrad { .. })));
    }

    #[test]
    fn spec_roundtrip_is_canonical() {
        let frw = catalog("frw", &params(&[("a", Param::Expr("t^(2/3)".into()))])).unwrap();
        let text = frw.to_json();
        let back = TetradField::from_json(&text).unwrap();
        assert_eq!(back, frw);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn malformed_specs_rejected() {
        assert!(TetradField::from_json("{").is_err());
        let bad_dim = r#"{"name":"x","dim":3,"coords":["t","x"],"signature":[1,-1],"tetrad":[["1","0"],["0","1"]]}"#;
        assert!(TetradField::from_json(bad_dim).is_err());
        let bad_shape = r#"{"name":"x","dim":2,"coords":["t","x"],"signature":[1,-1],"tetrad":[["1","0"]]}"#;
        assert!(TetradField::from_json(bad_shape).is_err());
        let bad_expr = r#"{"name":"x","dim":2,"coords":["t","x"],"signature":[1,-1],"tetrad":[["1","y"],["0","1"]]}"#;
        assert!(matches!(TetradField::from_json(bad_expr), Err(Error::Parse(_))));
        let extra =
            r#"{"name":"x","dim":2,"coords":["t","x"],"signature":[1,-1],"tetrad":[["1","0"],["0","1"]],"junk":1}"#;
        assert!(TetradField::from_json(extra).is_err());
    }
}
