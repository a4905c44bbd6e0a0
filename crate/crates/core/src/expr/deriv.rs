use super::{BinOp, Expr, Func};

// Constructors that fold literal zeros and ones so derivative trees of
// polynomials stay small.

fn num(v: f64) -> Expr {
    if v < 0.0 {
        Expr::Neg(Box::new(Expr::Num(-v)))
    } else {
        Expr::Num(v)
    }
}

fn is_num(e: &Expr, v: f64) -> bool {
    matches!(e, Expr::Num(x) if *x == v)
}

fn add(a: Expr, b: Expr) -> Expr {
    if is_num(&a, 0.0) {
        b
    } else if is_num(&b, 0.0) {
        a
    } else {
        Expr::Binary(BinOp::Add, Box::new(a), Box::new(b))
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    if is_num(&b, 0.0) {
        a
    } else if is_num(&a, 0.0) {
        neg(b)
    } else {
        Expr::Binary(BinOp::Sub, Box::new(a), Box::new(b))
    }
}

fn neg(a: Expr) -> Expr {
    if is_num(&a, 0.0) {
        a
    } else {
        Expr::Neg(Box::new(a))
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    if is_num(&a, 0.0) || is_num(&b, 0.0) {
        Expr::Num(0.0)
    } else if is_num(&a, 1.0) {
        b
    } else if is_num(&b, 1.0) {
        a
    } else {
        Expr::Binary(BinOp::Mul, Box::new(a), Box::new(b))
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_num(&a, 0.0) {
        Expr::Num(0.0)
    } else {
        Expr::Binary(BinOp::Div, Box::new(a), Box::new(b))
    }
}

fn call(f: Func, a: &Expr) -> Expr {
    Expr::Call(f, Box::new(a.clone()))
}

/// Symbolic partial derivative with respect to coordinate `index`.
pub(super) fn partial(e: &Expr, index: usize) -> Expr {
    match e {
        Expr::Num(_) | Expr::Param(..) => Expr::Num(0.0),
        Expr::Coord(i) => num(if *i == index { 1.0 } else { 0.0 }),
        Expr::Neg(a) => neg(partial(a, index)),
        Expr::Binary(op, l, r) => {
            let (dl, dr) = (partial(l, index), partial(r, index));
            let (l, r) = (l.as_ref().clone(), r.as_ref().clone());
            match op {
                BinOp::Add => add(dl, dr),
                BinOp::Sub => sub(dl, dr),
                BinOp::Mul => add(mul(dl, r), mul(l, dr)),
                BinOp::Div => {
                    let first = div(dl, r.clone());
                    let second = div(mul(l, dr), Expr::Pow(Box::new(r), Box::new(Expr::Num(2.0))));
                    sub(first, second)
                }
            }
        }
        Expr::Pow(base, exp) => {
            let db = partial(base, index);
            if is_num(&db, 0.0) {
                return Expr::Num(0.0);
            }
            let lowered = match exp.as_ref() {
                Expr::Num(p) if *p >= 1.0 => Expr::Num(p - 1.0),
                other => Expr::Binary(BinOp::Sub, Box::new(other.clone()), Box::new(Expr::Num(1.0))),
            };
            let power = if is_num(&lowered, 0.0) {
                Expr::Num(1.0)
            } else if is_num(&lowered, 1.0) {
                base.as_ref().clone()
            } else {
                Expr::Pow(base.clone(), Box::new(lowered))
            };
            mul(mul(exp.as_ref().clone(), power), db)
        }
        Expr::Call(func, arg) => {
            let da = partial(arg, index);
            if is_num(&da, 0.0) {
                return Expr::Num(0.0);
            }
            let outer = match func {
                Func::Sin => call(Func::Cos, arg),
                Func::Cos => neg(call(Func::Sin, arg)),
                Func::Tan => {
                    return div(da, Expr::Pow(Box::new(call(Func::Cos, arg)), Box::new(Expr::Num(2.0))));
                }
                Func::Exp => call(Func::Exp, arg),
                Func::Log => return div(da, arg.as_ref().clone()),
                Func::Sqrt => return div(da, mul(Expr::Num(2.0), call(Func::Sqrt, arg))),
                Func::Sinh => call(Func::Cosh, arg),
                Func::Cosh => call(Func::Sinh, arg),
            };
            mul(outer, da)
        }
    }
}
