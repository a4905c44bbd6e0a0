use super::jet::guard_values;
use super::{DomainError, ScalarField};
use crate::error::{Error, Result};

/// Largest discrepancy between the jet derivatives of `f` at `point` and
/// central finite differences with the given step.
///
/// Gradient differences use plain values; Hessian differences use the jet
/// gradients at the stencil points. Stencils that cross a zero of a divisor
/// (or a `log`/`sqrt` argument, etc.) are rejected as domain errors.
pub fn fd_check(f: &ScalarField, point: &[f64], step: f64) -> Result<f64> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {step}")));
    }
    let n = f.dim();
    let center = f.eval_jet2(point)?;
    let mut guards_center = Vec::new();
    guard_values(f.expr(), f.chart(), point, &mut guards_center);

    let mut worst = 0.0_f64;
    for mu in 0..n {
        let mut plus = point.to_vec();
        let mut minus = point.to_vec();
        plus[mu] += step;
        minus[mu] -= step;
        for x in [&plus, &minus] {
            check_stencil(f, x, &guards_center)?;
        }
        let fd_grad = (f.eval(&plus)? - f.eval(&minus)?) / (2.0 * step);
        worst = worst.max((center.grad[mu] - fd_grad).abs());

        let (jp, jm) = (f.eval_jet2(&plus)?, f.eval_jet2(&minus)?);
        for nu in 0..n {
            let fd_hess = (jp.grad[nu] - jm.grad[nu]) / (2.0 * step);
            worst = worst.max((center.hess(nu, mu) - fd_hess).abs());
        }
    }
    Ok(worst)
}

fn check_stencil(f: &ScalarField, x: &[f64], center: &[(f64, String)]) -> Result<(), DomainError> {
    let mut guards = Vec::new();
    guard_values(f.expr(), f.chart(), x, &mut guards);
    for ((c, label), (s, _)) in center.iter().zip(&guards) {
        if c.signum() != s.signum() || *s == 0.0 {
            return Err(DomainError {
                subexpr: label.clone(),
                reason: "finite-difference stencil crosses a singularity".into(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::{parse, Chart, Params};
    use super::*;

    fn chart() -> Chart {
        Chart::lorentzian(["t", "r", "theta", "phi"]).unwrap()
    }

    #[test]
    fn exponential_agrees() {
        let f = parse("exp(t)", &chart(), &Params::new()).unwrap();
        let res = fd_check(&f, &[0.0, 1.0, 1.0, 1.0], 1e-5).unwrap();
        assert!(res <= 1e-9, "{res}");
    }

    #[test]
    fn constant_is_exact() {
        let f = parse("7", &chart(), &Params::new()).unwrap();
        let res = fd_check(&f, &[0.1, 2.0, 0.3, 0.4], 1e-5).unwrap();
        assert!(res <= 1e-15, "{res}");
    }

    #[test]
    fn crossing_a_pole_is_a_domain_error() {
        let f = parse("1/r", &chart(), &Params::new()).unwrap();
        let err = fd_check(&f, &[0.0, 1e-6, 1.0, 1.0], 1e-5).unwrap_err();
        assert!(matches!(err, Error::Domain(_)), "{err:?}");
    }

    #[test]
    fn step_must_be_positive() {
        let f = parse("r", &chart(), &Params::new()).unwrap();
        assert!(fd_check(&f, &[0.0, 1.0, 1.0, 1.0], 0.0).is_err());
        assert!(fd_check(&f, &[0.0, 1.0, 1.0, 1.0], -1e-3).is_err());
    }
}
