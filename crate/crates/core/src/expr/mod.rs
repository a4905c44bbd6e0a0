//! Analytic scalar expressions over chart coordinates.
//!
//! Expressions are parsed once into an immutable tree ([`ScalarField`]) and
//! then evaluated pointwise, either as a plain value or as a second-order
//! forward jet ([`Jet2`]) carrying the exact gradient and Hessian. The
//! grammar is documented in `docs/grammar.md`.

mod deriv;
mod fd;
mod jet;
mod parser;
mod print;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};

pub use fd::fd_check;
pub use jet::Jet2;
pub use parser::parse;

/// A coordinate chart: coordinate names and the flat-frame signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    coord_names: Vec<String>,
    signature: Vec<i8>,
}

impl Chart {
    pub fn new<S: Into<String>>(coord_names: Vec<S>, signature: Vec<i8>) -> Result<Self> {
        let coord_names: Vec<String> = coord_names.into_iter().map(Into::into).collect();
        if coord_names.len() < 2 {
            return Err(Error::InvalidChart(format!("dimension must be at least 2, got {}", coord_names.len())));
        }
        if signature.len() != coord_names.len() {
            return Err(Error::InvalidChart(format!(
                "signature has {} entries for {} coordinates",
                signature.len(),
                coord_names.len()
            )));
        }
        if let Some(s) = signature.iter().find(|s| **s != 1 && **s != -1) {
            return Err(Error::InvalidChart(format!("signature entry {s} is not +1 or -1")));
        }
        for (i, name) in coord_names.iter().enumerate() {
            if !is_identifier(name) {
                return Err(Error::InvalidChart(format!("`{name}` is not an identifier")));
            }
            if Func::from_name(name).is_some() {
                return Err(Error::InvalidChart(format!("coordinate `{name}` shadows a built-in function")));
            }
            if coord_names[..i].contains(name) {
                return Err(Error::InvalidChart(format!("duplicate coordinate `{name}`")));
            }
        }
        Ok(Chart { coord_names, signature })
    }

    /// Four-dimensional chart with signature (+,-,-,-).
    pub fn lorentzian(coord_names: [&str; 4]) -> Result<Self> {
        Chart::new(coord_names.to_vec(), vec![1, -1, -1, -1])
    }

    pub fn dim(&self) -> usize {
        self.coord_names.len()
    }

    pub fn coord_names(&self) -> &[String] {
        &self.coord_names
    }

    pub fn signature(&self) -> &[i8] {
        &self.signature
    }

    /// Diagonal of the flat frame metric.
    pub fn eta(&self) -> Vec<f64> {
        self.signature.iter().map(|&s| f64::from(s)).collect()
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.coord_names.iter().position(|c| c == name)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A named parameter: either a number or an expression that is inlined
/// wherever the name appears.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Value(f64),
    Expr(String),
}

impl From<f64> for Param {
    fn from(v: f64) -> Self {
        Param::Value(v)
    }
}

impl From<&str> for Param {
    fn from(s: &str) -> Self {
        Param::Expr(s.to_string())
    }
}

pub type Params = BTreeMap<String, Param>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
}

impl Func {
    pub const ALL: [Func; 8] =
        [Func::Sin, Func::Cos, Func::Tan, Func::Exp, Func::Log, Func::Sqrt, Func::Sinh, Func::Cosh];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Expression tree. Literals are always finite and non-negative; negation
/// is an explicit node.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Coord(usize),
    Param(String, f64),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// Base raised to a coordinate-free exponent.
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Param(..) => true,
            Expr::Coord(_) => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.is_constant(),
            Expr::Binary(_, l, r) | Expr::Pow(l, r) => l.is_constant() && r.is_constant(),
        }
    }

    /// Walks the tree in prefix order.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Num(_) | Expr::Coord(_) | Expr::Param(..) => {}
            Expr::Neg(e) | Expr::Call(_, e) => e.visit(f),
            Expr::Binary(_, l, r) | Expr::Pow(l, r) => {
                l.visit(f);
                r.visit(f);
            }
        }
    }
}

/// Failure to parse an expression.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("exponent at byte {offset} depends on coordinates; only numeric exponents are allowed")]
    NonConstantExponent { offset: usize },
    #[error("parameter `{name}` is defined in terms of itself")]
    RecursiveParameter { name: String },
    #[error("in parameter `{name}`: {source}")]
    InParameter {
        name: String,
        #[source]
        source: Box<ParseError>,
    },
}

/// Evaluation left the domain of some subexpression.
#[derive(Clone, Debug, Error, PartialEq)]
#[error("domain error in `{subexpr}`: {reason}")]
pub struct DomainError {
    pub subexpr: String,
    pub reason: String,
}

/// An analytic function of the chart coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    expr: Expr,
    chart: Chart,
}

impl ScalarField {
    pub fn from_expr(expr: Expr, chart: Chart) -> Self {
        ScalarField { expr, chart }
    }

    pub fn constant(value: f64, chart: &Chart) -> Self {
        let expr = if value < 0.0 { Expr::Neg(Box::new(Expr::Num(-value))) } else { Expr::Num(value) };
        ScalarField::from_expr(expr, chart.clone())
    }

    pub fn coordinate(index: usize, chart: &Chart) -> Self {
        assert!(index < chart.dim(), "coordinate index out of range");
        ScalarField::from_expr(Expr::Coord(index), chart.clone())
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// Numerically bound parameters referenced by the tree.
    pub fn params(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        self.expr.visit(&mut |e| {
            if let Expr::Param(name, v) = e {
                out.insert(name.clone(), *v);
            }
        });
        out
    }

    /// Plain value at a point.
    pub fn eval(&self, point: &[f64]) -> Result<f64, DomainError> {
        jet::eval_value(&self.expr, &self.chart, point)
    }

    /// Value, gradient and Hessian at a point.
    pub fn eval_jet2(&self, point: &[f64]) -> Result<Jet2, DomainError> {
        jet::eval_jet(&self.expr, &self.chart, point)
    }

    /// Exact partial derivative with respect to coordinate `index`, as a new tree.
    pub fn partial(&self, index: usize) -> ScalarField {
        ScalarField::from_expr(deriv::partial(&self.expr, index), self.chart.clone())
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        self.binary(BinOp::Add, other)
    }

    pub fn mul(&self, other: &ScalarField) -> ScalarField {
        self.binary(BinOp::Mul, other)
    }

    fn binary(&self, op: BinOp, other: &ScalarField) -> ScalarField {
        debug_assert_eq!(self.chart, other.chart);
        ScalarField::from_expr(
            Expr::Binary(op, Box::new(self.expr.clone()), Box::new(other.expr.clone())),
            self.chart.clone(),
        )
    }

    pub(crate) fn display_expr<'a>(&'a self, e: &'a Expr) -> impl fmt::Display + 'a {
        print::Printer { expr: e, chart: &self.chart }
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_expr(&self.expr).fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_validation() {
        assert!(Chart::new(vec!["t"], vec![1]).is_err());
        assert!(Chart::new(vec!["t", "t"], vec![1, -1]).is_err());
        assert!(Chart::new(vec!["t", "x"], vec![1, 2]).is_err());
        assert!(Chart::new(vec!["t", "sin"], vec![1, -1]).is_err());
        assert!(Chart::new(vec!["t", "x"], vec![1]).is_err());
        let c = Chart::new(vec!["t", "x"], vec![1, -1]).unwrap();
        assert_eq!(c.dim(), 2);
        assert_eq!(c.eta(), vec![1.0, -1.0]);
    }

    #[test]
    fn params_are_collected() {
        let chart = Chart::lorentzian(["t", "r", "theta", "phi"]).unwrap();
        let mut params = Params::new();
        params.insert("M".into(), Param::Value(1.0));
        let f = parse("1 - 2*M/r", &chart, &params).unwrap();
        assert_eq!(f.params().get("M"), Some(&1.0));
    }
}
