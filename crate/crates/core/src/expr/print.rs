use std::fmt;

use super::{BinOp, Chart, Expr};

/// Prints a tree with the minimal parentheses needed for the parser to
/// rebuild exactly the same tree.
pub(crate) struct Printer<'a> {
    pub expr: &'a Expr,
    pub chart: &'a Chart,
}

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Binary(BinOp::Add | BinOp::Sub, ..) => PREC_ADD,
        Expr::Binary(BinOp::Mul | BinOp::Div, ..) => PREC_MUL,
        Expr::Neg(_) => PREC_NEG,
        Expr::Pow(..) => PREC_POW,
        Expr::Num(_) | Expr::Coord(_) | Expr::Param(..) | Expr::Call(..) => PREC_ATOM,
    }
}

impl Printer<'_> {
    fn child(&self, f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
        let inner = Printer { expr: e, chart: self.chart };
        if precedence(e) < min_prec {
            write!(f, "({inner})")
        } else {
            write!(f, "{inner}")
        }
    }
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expr {
            // f64 Display is the shortest string that reads back to the same value.
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Coord(i) => f.write_str(&self.chart.coord_names()[*i]),
            Expr::Param(name, _) => f.write_str(name),
            Expr::Neg(e) => {
                f.write_str("-")?;
                self.child(f, e, PREC_NEG)
            }
            Expr::Binary(op, l, r) => {
                let (sym, prec) = match op {
                    BinOp::Add => (" + ", PREC_ADD),
                    BinOp::Sub => (" - ", PREC_ADD),
                    BinOp::Mul => ("*", PREC_MUL),
                    BinOp::Div => ("/", PREC_MUL),
                };
                self.child(f, l, prec)?;
                f.write_str(sym)?;
                // Left-associative: a right operand of equal precedence needs parens.
                self.child(f, r, prec + 1)
            }
            Expr::Pow(base, exp) => {
                self.child(f, base, PREC_ATOM)?;
                f.write_str("^")?;
                self.child(f, exp, PREC_NEG)
            }
            Expr::Call(func, arg) => {
                write!(f, "{}(", func.name())?;
                write!(f, "{}", Printer { expr: arg, chart: self.chart })?;
                f.write_str(")")
            }
        }
    }
}
