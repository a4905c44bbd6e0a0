//! Registry of identity checks and their per-point residuals.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::algebroid::{
    anchor_homomorphism_residual, anholonomy_at, commutator_check, gauge_transform, jacobi_residual, leibniz_residual,
    structure_functions_at,
};
use crate::error::{Error, Result};
use crate::expr::fd_check;
use crate::fieldeq::{field_eq_residual_at, Mechanism};
use crate::harness::random::{derived_seed, RandomFields};
use crate::harness::sampling::Domain;
use crate::linalg::max_abs;
use crate::telegeom::{decomposition_residual_at, einstein_at, torsion_at, weitzenbock_flatness_at};
use crate::tetrad::TetradField;

/// Groups of checks sharing a default tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ToleranceClass {
    /// Identities met to rounding of a few products.
    Exact,
    /// Pointwise algebraic identities.
    Algebraic,
    /// Identities involving one jet derivative.
    Differential,
    /// Nested brackets, two jet derivatives.
    Nested,
    /// Curvature built from second derivatives of the metric.
    Curvature,
    /// Divergences and fitted constants.
    Divergence,
    /// Jets against finite differences (relative).
    Ad,
}

impl ToleranceClass {
    pub const ALL: [ToleranceClass; 7] = [
        ToleranceClass::Exact,
        ToleranceClass::Algebraic,
        ToleranceClass::Differential,
        ToleranceClass::Nested,
        ToleranceClass::Curvature,
        ToleranceClass::Divergence,
        ToleranceClass::Ad,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ToleranceClass::Exact => "exact",
            ToleranceClass::Algebraic => "algebraic",
            ToleranceClass::Differential => "differential",
            ToleranceClass::Nested => "nested",
            ToleranceClass::Curvature => "curvature",
            ToleranceClass::Divergence => "divergence",
            ToleranceClass::Ad => "ad",
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            ToleranceClass::Exact => 1e-12,
            ToleranceClass::Algebraic => 1e-10,
            ToleranceClass::Differential => 1e-9,
            ToleranceClass::Nested => 1e-8,
            ToleranceClass::Curvature => 1e-8,
            ToleranceClass::Divergence => 1e-6,
            ToleranceClass::Ad => 1e-6,
        }
    }
}

impl FromStr for ToleranceClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ToleranceClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown tolerance class `{s}`")))
    }
}

/// Minimum residual demanded of the vacuum checks on a non-vacuum tetrad.
pub const NON_VACUUM_FLOOR: f64 = 1e-2;

/// Check identifiers, in report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckId {
    AdIntegrity,
    AnchorHomomorphism,
    Anholonomy,
    Commutator,
    ContortionAntisymmetry,
    Decomposition,
    EinsteinVacuum,
    FieldEquation,
    GaugeInvariance,
    Jacobi,
    Leibniz,
    MomentumProportionality,
    SuperpotentialAntisymmetry,
    TorsionConsistency,
    WeitzenbockFlatness,
}

impl CheckId {
    pub const ALL: [CheckId; 15] = [
        CheckId::AdIntegrity,
        CheckId::AnchorHomomorphism,
        CheckId::Anholonomy,
        CheckId::Commutator,
        CheckId::ContortionAntisymmetry,
        CheckId::Decomposition,
        CheckId::EinsteinVacuum,
        CheckId::FieldEquation,
        CheckId::GaugeInvariance,
        CheckId::Jacobi,
        CheckId::Leibniz,
        CheckId::MomentumProportionality,
        CheckId::SuperpotentialAntisymmetry,
        CheckId::TorsionConsistency,
        CheckId::WeitzenbockFlatness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::AdIntegrity => "ad_integrity",
            CheckId::AnchorHomomorphism => "anchor_homomorphism",
            CheckId::Anholonomy => "anholonomy",
            CheckId::Commutator => "commutator",
            CheckId::ContortionAntisymmetry => "contortion_antisymmetry",
            CheckId::Decomposition => "decomposition",
            CheckId::EinsteinVacuum => "einstein_vacuum",
            CheckId::FieldEquation => "field_equation",
            CheckId::GaugeInvariance => "gauge_invariance",
            CheckId::Jacobi => "jacobi",
            CheckId::Leibniz => "leibniz",
            CheckId::MomentumProportionality => "momentum_proportionality",
            CheckId::SuperpotentialAntisymmetry => "superpotential_antisymmetry",
            CheckId::TorsionConsistency => "torsion_consistency",
            CheckId::WeitzenbockFlatness => "weitzenbock_flatness",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            CheckId::AdIntegrity => {
                "jet derivatives of tetrad components and random expressions vs central differences (relative)"
            }
            CheckId::AnchorHomomorphism => "anchor of the bracket equals the coordinate bracket of the anchors",
            CheckId::Anholonomy => "anholonomy coefficients plus structure functions vanish",
            CheckId::Commutator => "frame commutator on random test functions equals -T^c_ab D_c",
            CheckId::ContortionAntisymmetry => "lowered contortion is antisymmetric in its first two indices",
            CheckId::Decomposition => "Weitzenbock = Christoffel + contortion",
            CheckId::EinsteinVacuum => "Einstein tensor of the induced metric vanishes",
            CheckId::FieldEquation => "Euler-Lagrange residual of the torsion Lagrangian, relative to its largest term",
            CheckId::GaugeInvariance => "frame torsion unchanged by a random local translation",
            CheckId::Jacobi => "cyclic sum of nested brackets of random sections",
            CheckId::Leibniz => "bracket obeys the Leibniz rule with the anchor",
            CheckId::MomentumProportionality => "conjugate momentum is one constant times h S_a^rs (relative spread)",
            CheckId::SuperpotentialAntisymmetry => "superpotential is antisymmetric in its last two indices",
            CheckId::TorsionConsistency => "coordinate torsion matches the converted frame torsion and dB",
            CheckId::WeitzenbockFlatness => "Weitzenbock curvature relative to 1 + max|Gamma|^2",
        }
    }

    pub fn class(self) -> ToleranceClass {
        match self {
            CheckId::ContortionAntisymmetry | CheckId::SuperpotentialAntisymmetry | CheckId::TorsionConsistency => {
                ToleranceClass::Exact
            }
            CheckId::Anholonomy | CheckId::Decomposition | CheckId::GaugeInvariance => ToleranceClass::Algebraic,
            CheckId::AnchorHomomorphism | CheckId::Commutator | CheckId::Leibniz | CheckId::WeitzenbockFlatness => {
                ToleranceClass::Differential
            }
            CheckId::Jacobi => ToleranceClass::Nested,
            CheckId::EinsteinVacuum => ToleranceClass::Curvature,
            CheckId::FieldEquation | CheckId::MomentumProportionality => ToleranceClass::Divergence,
            CheckId::AdIntegrity => ToleranceClass::Ad,
        }
    }

    /// Whether the non-vacuum flag turns this check into a lower bound.
    pub fn is_vacuum_check(self) -> bool {
        matches!(self, CheckId::EinsteinVacuum | CheckId::FieldEquation)
    }

    pub fn valid_names() -> String {
        CheckId::ALL.iter().map(|c| c.name()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::UnknownCheck { name: s.to_string(), valid: CheckId::valid_names() })
    }
}

impl Serialize for CheckId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// What a per-point residual needs besides the point itself.
pub struct CheckContext<'a> {
    pub tetrad: &'a TetradField,
    pub domain: &'a Domain,
    pub seed: u64,
    pub k: f64,
}

impl CheckContext<'_> {
    fn random(&self, id: CheckId, index: usize) -> RandomFields<'_> {
        RandomFields::new(self.tetrad.chart(), self.domain, derived_seed(self.seed, id.name(), index))
    }
}

const AD_STEP: f64 = 1e-5;
const AD_ATTEMPTS: usize = 20;

/// Residual of one pointwise check at sample `index`.
///
/// Not applicable to [`CheckId::MomentumProportionality`], which is a fit
/// over all points.
pub fn pointwise_residual(id: CheckId, ctx: &CheckContext<'_>, index: usize, x: &[f64]) -> Result<f64> {
    let t = ctx.tetrad;
    let n = t.dim();
    let fd = t.frame_data_at(x)?;
    match id {
        CheckId::AdIntegrity => {
            let mut worst = 0.0_f64;
            for f in t.components().iter().flatten() {
                worst = worst.max(relative_fd(f, x)?);
            }
            let mut rf = ctx.random(id, index);
            let mut attempts = 0;
            loop {
                let f = rf.expression(4)?;
                match relative_fd(&f, x) {
                    Ok(r) => return Ok(worst.max(r)),
                    Err(Error::Domain(_)) if attempts < AD_ATTEMPTS => attempts += 1,
                    Err(e) => return Err(e),
                }
            }
        }
        CheckId::AnchorHomomorphism => {
            let sf = structure_functions_at(&fd, &torsion_at(&fd));
            let mut rf = ctx.random(id, index);
            let (u, v) = (rf.section(1.0)?, rf.section(1.0)?);
            anchor_homomorphism_residual(&u, &v, &fd, &sf)
        }
        CheckId::Anholonomy => {
            let sf = structure_functions_at(&fd, &torsion_at(&fd));
            let f = anholonomy_at(&fd);
            Ok(max_abs((&f + &sf.tc).iter()))
        }
        CheckId::Commutator => {
            let sf = structure_functions_at(&fd, &torsion_at(&fd));
            let phi = ctx.random(id, index).test_function()?;
            let mut worst = 0.0_f64;
            for a in 0..n {
                for b in 0..n {
                    worst = worst.max(commutator_check(a, b, &phi, &fd, &sf)?);
                }
            }
            Ok(worst)
        }
        CheckId::ContortionAntisymmetry => {
            let td = torsion_at(&fd);
            let mut worst = 0.0_f64;
            for r in 0..n {
                for m in 0..n {
                    for v in 0..n {
                        let low = |p: usize, q: usize| -> f64 {
                            (0..n).map(|l| fd.g[[p, l]] * td.contortion[[l, q, v]]).sum()
                        };
                        worst = worst.max((low(r, m) + low(m, r)).abs());
                    }
                }
            }
            Ok(worst)
        }
        CheckId::Decomposition => decomposition_residual_at(&fd),
        CheckId::EinsteinVacuum => Ok(max_abs(einstein_at(&fd)?.iter())),
        CheckId::FieldEquation => Ok(field_eq_residual_at(t, x, ctx.k, Mechanism::Jet)?.relative()),
        CheckId::GaugeInvariance => {
            let eps = ctx.random(id, index).section(0.05)?;
            let moved = gauge_transform(t, &eps)?.frame_data_at(x)?;
            Ok(max_abs((&torsion_at(&moved).t_frame - &torsion_at(&fd).t_frame).iter()))
        }
        CheckId::Jacobi => {
            let sf = structure_functions_at(&fd, &torsion_at(&fd));
            let mut rf = ctx.random(id, index);
            let (u, v, w) = (rf.section(1.0)?, rf.section(1.0)?, rf.section(1.0)?);
            jacobi_residual(&u, &v, &w, &fd, &sf)
        }
        CheckId::Leibniz => {
            let sf = structure_functions_at(&fd, &torsion_at(&fd));
            let mut rf = ctx.random(id, index);
            let (u, v, f) = (rf.section(1.0)?, rf.section(1.0)?, rf.polynomial(1.0, 3)?);
            leibniz_residual(&u, &v, &f, &fd, &sf)
        }
        CheckId::SuperpotentialAntisymmetry => {
            let s = torsion_at(&fd).superpotential;
            let mut worst = 0.0_f64;
            for r in 0..n {
                for m in 0..n {
                    for v in 0..n {
                        worst = worst.max((s[[r, m, v]] + s[[r, v, m]]).abs());
                    }
                }
            }
            Ok(worst)
        }
        CheckId::TorsionConsistency => {
            let td = torsion_at(&fd);
            let mut worst = 0.0_f64;
            for r in 0..n {
                for m in 0..n {
                    for v in 0..n {
                        let conv: f64 = (0..n).map(|a| fd.h_inv[[a, r]] * td.t_frame[[a, m, v]]).sum();
                        worst = worst.max((td.t_coord[[r, m, v]] - conv).abs());
                    }
                }
            }
            let from_b = fd.gauge_potential().field_strength();
            Ok(worst.max(max_abs((&from_b - &td.t_frame).iter())))
        }
        CheckId::WeitzenbockFlatness => Ok(weitzenbock_flatness_at(&fd)),
        CheckId::MomentumProportionality => {
            Err(Error::InvalidArgument("momentum_proportionality is a fit over all points".into()))
        }
    }
}

/// Jet-vs-difference discrepancy relative to `1 + max|∂f|, |∂²f|`.
fn relative_fd(f: &crate::expr::ScalarField, x: &[f64]) -> Result<f64> {
    let j = f.eval_jet2(x)?;
    let scale = j.hessian_rows().iter().flatten().chain(&j.grad).fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok(fd_check(f, x, AD_STEP)? / (1.0 + scale))
}
