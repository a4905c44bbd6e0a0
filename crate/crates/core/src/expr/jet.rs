use super::print::Printer;
use super::{BinOp, Chart, DomainError, Expr, Func};

/// Second-order jet of a scalar: value, gradient and Hessian at a point.
///
/// The Hessian is stored row-major and is symmetric by construction: every
/// operation computes the upper triangle and mirrors it.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: Vec<f64>,
    hess: Vec<f64>,
}

impl Jet2 {
    pub fn constant(dim: usize, value: f64) -> Self {
        Jet2 { value, grad: vec![0.0; dim], hess: vec![0.0; dim * dim] }
    }

    pub fn variable(dim: usize, index: usize, value: f64) -> Self {
        let mut j = Jet2::constant(dim, value);
        j.grad[index] = 1.0;
        j
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hess[i * self.dim() + j]
    }

    pub fn hessian_rows(&self) -> Vec<Vec<f64>> {
        self.hess.chunks(self.dim()).map(<[f64]>::to_vec).collect()
    }

    fn fill_sym(&mut self, mut f: impl FnMut(usize, usize) -> f64) {
        let n = self.dim();
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                self.hess[i * n + j] = v;
                self.hess[j * n + i] = v;
            }
        }
    }

    pub fn neg(&self) -> Jet2 {
        self.scale(-1.0)
    }

    pub fn scale(&self, s: f64) -> Jet2 {
        Jet2 {
            value: s * self.value,
            grad: self.grad.iter().map(|g| s * g).collect(),
            hess: self.hess.iter().map(|h| s * h).collect(),
        }
    }

    pub fn add(&self, other: &Jet2) -> Jet2 {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Jet2) -> Jet2 {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &Jet2, sign: f64) -> Jet2 {
        let zip = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + sign * y).collect();
        Jet2 {
            value: self.value + sign * other.value,
            grad: zip(&self.grad, &other.grad),
            hess: zip(&self.hess, &other.hess),
        }
    }

    pub fn mul(&self, other: &Jet2) -> Jet2 {
        let (a, b) = (self, other);
        let mut out = Jet2::constant(a.dim(), a.value * b.value);
        for i in 0..a.dim() {
            out.grad[i] = a.value * b.grad[i] + b.value * a.grad[i];
        }
        out.fill_sym(|i, j| {
            a.value * b.hess(i, j) + b.value * a.hess(i, j) + a.grad[i] * b.grad[j] + a.grad[j] * b.grad[i]
        });
        out
    }

    /// Composes with a scalar function given its value and first two
    /// derivatives at `self.value`.
    pub fn chain(&self, f0: f64, f1: f64, f2: f64) -> Jet2 {
        let mut out = Jet2::constant(self.dim(), f0);
        for (o, g) in out.grad.iter_mut().zip(&self.grad) {
            *o = f1 * g;
        }
        out.fill_sym(|i, j| f1 * self.hess(i, j) + f2 * self.grad[i] * self.grad[j]);
        out
    }
}

fn domain(e: &Expr, chart: &Chart, reason: impl Into<String>) -> DomainError {
    DomainError { subexpr: Printer { expr: e, chart }.to_string(), reason: reason.into() }
}

/// Scalar derivatives of a unary function: value and first two derivatives.
fn func_derivs(func: Func, u: f64) -> Result<(f64, f64, f64), &'static str> {
    Ok(match func {
        Func::Sin => (u.sin(), u.cos(), -u.sin()),
        Func::Cos => (u.cos(), -u.sin(), -u.cos()),
        Func::Tan => {
            let c = u.cos();
            if c == 0.0 {
                return Err("tan is singular where cos vanishes");
            }
            let t = u.tan();
            let sec2 = 1.0 / (c * c);
            (t, sec2, 2.0 * t * sec2)
        }
        Func::Exp => {
            let e = u.exp();
            (e, e, e)
        }
        Func::Log => {
            if u <= 0.0 {
                return Err("log of a non-positive argument");
            }
            (u.ln(), 1.0 / u, -1.0 / (u * u))
        }
        Func::Sqrt => {
            if u <= 0.0 {
                return Err("sqrt needs a positive argument to be differentiable");
            }
            let s = u.sqrt();
            (s, 0.5 / s, -0.25 / (s * s * s))
        }
        Func::Sinh => (u.sinh(), u.cosh(), u.sinh()),
        Func::Cosh => (u.cosh(), u.sinh(), u.cosh()),
    })
}

fn pow_derivs(u: f64, p: f64) -> Result<(f64, f64, f64), &'static str> {
    if p.fract() == 0.0 && p.abs() < f64::from(i32::MAX) {
        let n = p as i32;
        if n < 0 && u == 0.0 {
            return Err("negative power of zero");
        }
        let f1 = if n == 0 { 0.0 } else { p * u.powi(n - 1) };
        let f2 = if n == 0 || n == 1 { 0.0 } else { p * (p - 1.0) * u.powi(n - 2) };
        Ok((u.powi(n), f1, f2))
    } else {
        if u <= 0.0 {
            return Err("non-integer power of a non-positive base");
        }
        Ok((u.powf(p), p * u.powf(p - 1.0), p * (p - 1.0) * u.powf(p - 2.0)))
    }
}

fn check_finite(v: f64, e: &Expr, chart: &Chart) -> Result<f64, DomainError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain(e, chart, "non-finite result"))
    }
}

/// Value-only evaluation, independent of the jet path.
pub(super) fn eval_value(e: &Expr, chart: &Chart, x: &[f64]) -> Result<f64, DomainError> {
    assert_eq!(x.len(), chart.dim(), "point dimension does not match chart");
    let v = match e {
        Expr::Num(v) | Expr::Param(_, v) => *v,
        Expr::Coord(i) => x[*i],
        Expr::Neg(a) => -eval_value(a, chart, x)?,
        Expr::Binary(op, l, r) => {
            let (a, b) = (eval_value(l, chart, x)?, eval_value(r, chart, x)?);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return Err(domain(e, chart, "division by zero"));
                    }
                    a / b
                }
            }
        }
        Expr::Pow(base, exp) => {
            let p = eval_value(exp, chart, x)?;
            let u = eval_value(base, chart, x)?;
            pow_derivs(u, p).map_err(|r| domain(e, chart, r))?.0
        }
        Expr::Call(func, arg) => {
            let u = eval_value(arg, chart, x)?;
            func_derivs(*func, u).map_err(|r| domain(e, chart, r))?.0
        }
    };
    check_finite(v, e, chart)
}

pub(super) fn eval_jet(e: &Expr, chart: &Chart, x: &[f64]) -> Result<Jet2, DomainError> {
    assert_eq!(x.len(), chart.dim(), "point dimension does not match chart");
    let n = chart.dim();
    let j = match e {
        Expr::Num(v) | Expr::Param(_, v) => Jet2::constant(n, *v),
        Expr::Coord(i) => Jet2::variable(n, *i, x[*i]),
        Expr::Neg(a) => eval_jet(a, chart, x)?.neg(),
        Expr::Binary(op, l, r) => {
            let a = eval_jet(l, chart, x)?;
            let b = eval_jet(r, chart, x)?;
            match op {
                BinOp::Add => a.add(&b),
                BinOp::Sub => a.sub(&b),
                BinOp::Mul => a.mul(&b),
                BinOp::Div => {
                    let v = b.value;
                    if v == 0.0 {
                        return Err(domain(e, chart, "division by zero"));
                    }
                    a.mul(&b.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v)))
                }
            }
        }
        Expr::Pow(base, exp) => {
            let p = eval_value(exp, chart, x)?;
            let u = eval_jet(base, chart, x)?;
            let (f0, f1, f2) = pow_derivs(u.value, p).map_err(|r| domain(e, chart, r))?;
            u.chain(f0, f1, f2)
        }
        Expr::Call(func, arg) => {
            let u = eval_jet(arg, chart, x)?;
            let (f0, f1, f2) = func_derivs(*func, u.value).map_err(|r| domain(e, chart, r))?;
            u.chain(f0, f1, f2)
        }
    };
    if !(j.value.is_finite() && j.grad.iter().chain(&j.hess).all(|v| v.is_finite())) {
        return Err(domain(e, chart, "non-finite derivative"));
    }
    Ok(j)
}

/// Values whose sign must not change between evaluation points: divisors,
/// arguments of `log`/`sqrt`, bases of singular powers and `cos` under `tan`.
pub(super) fn guard_values(e: &Expr, chart: &Chart, x: &[f64], out: &mut Vec<(f64, String)>) {
    let label = |e: &Expr| Printer { expr: e, chart }.to_string();
    match e {
        Expr::Num(_) | Expr::Param(..) | Expr::Coord(_) => {}
        Expr::Neg(a) => guard_values(a, chart, x, out),
        Expr::Binary(op, l, r) => {
            guard_values(l, chart, x, out);
            guard_values(r, chart, x, out);
            if *op == BinOp::Div {
                if let Ok(v) = eval_value(r, chart, x) {
                    out.push((v, label(e)));
                }
            }
        }
        Expr::Pow(base, exp) => {
            guard_values(base, chart, x, out);
            let p = eval_value(exp, chart, x).unwrap_or(1.0);
            if p < 0.0 || p.fract() != 0.0 {
                if let Ok(v) = eval_value(base, chart, x) {
                    out.push((v, label(e)));
                }
            }
        }
        Expr::Call(func, arg) => {
            guard_values(arg, chart, x, out);
            let g = match func {
                Func::Log | Func::Sqrt => eval_value(arg, chart, x).ok(),
                Func::Tan => eval_value(arg, chart, x).ok().map(f64::cos),
                _ => None,
            };
            if let Some(v) = g {
                out.push((v, label(e)));
            }
        }
    }
}
