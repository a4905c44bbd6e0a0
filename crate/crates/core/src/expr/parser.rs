use super::{BinOp, Chart, Expr, Func, Param, Params, ParseError, ScalarField};

/// Parses `text` into a field over `chart`. Identifiers resolve to
/// coordinates first, then to entries of `params`.
pub fn parse(text: &str, chart: &Chart, params: &Params) -> Result<ScalarField, ParseError> {
    let mut stack = Vec::new();
    let expr = parse_expr_text(text, chart, params, &mut stack)?;
    Ok(ScalarField::from_expr(expr, chart.clone()))
}

fn parse_expr_text(text: &str, chart: &Chart, params: &Params, stack: &mut Vec<String>) -> Result<Expr, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, chart, params, stack };
    p.skip_ws();
    if p.at_end() {
        return Err(ParseError::Syntax { offset: 0, message: "empty expression".into() });
    }
    let e = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.syntax(format!("unexpected `{}`", p.peek_char())));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    chart: &'a Chart,
    params: &'a Params,
    stack: &'a mut Vec<String>,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek_char(&self) -> char {
        // Only ASCII is meaningful; report the raw byte otherwise.
        self.peek().map(char::from).unwrap_or('\0')
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn syntax(&self, message: String) -> ParseError {
        ParseError::Syntax { offset: self.pos, message }
    }

    fn eat(&mut self, byte: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    // expr = term { ("+" | "-") term }
    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat(b'+') {
                BinOp::Add
            } else if self.eat(b'-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    // term = unary { ("*" | "/") unary }
    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat(b'*') {
                BinOp::Mul
            } else if self.eat(b'/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    // unary = "-" unary | power
    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    // power = primary [ "^" unary ]
    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.eat(b'^') {
            self.skip_ws();
            let at = self.pos;
            let exponent = self.unary()?;
            if !exponent.is_constant() {
                return Err(ParseError::NonConstantExponent { offset: at });
            }
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    // primary = number | identifier | identifier "(" expr ")" | "(" expr ")"
    fn primary(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.syntax("expected expression, found end of input".into())),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax(self.expected_close()));
                }
                Ok(e)
            }
            Some(b) if b.is_ascii_digit() || b == b'.' => self.number(),
            Some(b) if b.is_ascii_alphabetic() || b == b'_' => self.identifier(),
            Some(_) => Err(self.syntax(format!("expected expression, found `{}`", self.peek_char()))),
        }
    }

    fn expected_close(&self) -> String {
        match self.peek() {
            None => "expected `)`, found end of input".into(),
            Some(_) => format!("expected `)`, found `{}`", self.peek_char()),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while matches!(p.peek(), Some(b) if b.is_ascii_digit()) {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.peek() == Some(b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            return Err(ParseError::Syntax { offset: start, message: "malformed number".into() });
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
                return Err(self.syntax("malformed exponent".into()));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let value: f64 = text
            .parse()
            .map_err(|_| ParseError::Syntax { offset: start, message: format!("malformed number `{text}`") })?;
        if !value.is_finite() {
            return Err(ParseError::Syntax { offset: start, message: format!("number `{text}` out of range") });
        }
        Ok(Expr::Num(value))
    }

    fn identifier(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_alphanumeric() || b == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");

        if let Some(func) = Func::from_name(name) {
            if !self.eat(b'(') {
                return Err(self.syntax(format!("expected `(` after function `{name}`")));
            }
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.syntax(self.expected_close()));
            }
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        if let Some(i) = self.chart.coord_index(name) {
            return Ok(Expr::Coord(i));
        }
        match self.params.get(name) {
            Some(Param::Value(v)) => Ok(Expr::Param(name.to_string(), *v)),
            Some(Param::Expr(text)) => {
                if self.stack.iter().any(|s| s == name) {
                    return Err(ParseError::RecursiveParameter { name: name.to_string() });
                }
                self.stack.push(name.to_string());
                let inner = parse_expr_text(text, self.chart, self.params, self.stack);
                self.stack.pop();
                inner.map_err(|e| match e {
                    e @ ParseError::RecursiveParameter { .. } => e,
                    e => ParseError::InParameter { name: name.to_string(), source: Box::new(e) },
                })
            }
            None => Err(ParseError::UnknownIdentifier { name: name.to_string(), offset: start }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> Chart {
        Chart::lorentzian(["t", "r", "theta", "phi"]).unwrap()
    }

    #[test]
    fn function_of_coordinate() {
        let f = parse("sin(theta)", &chart(), &Params::new()).unwrap();
        assert_eq!(*f.expr(), Expr::Call(Func::Sin, Box::new(Expr::Coord(2))));
    }

    #[test]
    fn bound_parameter() {
        let mut params = Params::new();
        params.insert("M".into(), Param::Value(1.0));
        let f = parse("1 - 2*M/r", &chart(), &params).unwrap();
        let expected = Expr::Binary(
            BinOp::Sub,
            Box::new(Expr::Num(1.0)),
            Box::new(Expr::Binary(
                BinOp::Div,
                Box::new(Expr::Binary(BinOp::Mul, Box::new(Expr::Num(2.0)), Box::new(Expr::Param("M".into(), 1.0)))),
                Box::new(Expr::Coord(1)),
            )),
        );
        assert_eq!(*f.expr(), expected);
    }

    #[test]
    fn unbalanced_paren_offset() {
        let err = parse("sin(", &chart(), &Params::new()).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { offset: 4, .. }), "{err:?}");
        let err = parse("(r + 1", &chart(), &Params::new()).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { offset: 6, .. }), "{err:?}");
    }

    #[test]
    fn unknown_identifier_is_named() {
        let err = parse("r + Q", &chart(), &Params::new()).unwrap_err();
        assert_eq!(err, ParseError::UnknownIdentifier { name: "Q".into(), offset: 4 });
        assert!(err.to_string().contains("`Q`"));
    }

    #[test]
    fn expression_parameters_inline() {
        let c = Chart::lorentzian(["t", "x", "y", "z"]).unwrap();
        let mut params = Params::new();
        params.insert("a".into(), Param::Expr("t^(2/3)".into()));
        let via_param = parse("a", &c, &params).unwrap();
        let direct = parse("t^(2/3)", &c, &Params::new()).unwrap();
        assert_eq!(via_param, direct);
    }

    #[test]
    fn recursive_parameter_rejected() {
        let c = chart();
        let mut params = Params::new();
        params.insert("a".into(), Param::Expr("1 + b".into()));
        params.insert("b".into(), Param::Expr("a * r".into()));
        let err = parse("a", &c, &params).unwrap_err();
        assert!(matches!(err, ParseError::RecursiveParameter { .. }), "{err:?}");
    }

    #[test]
    fn exponent_must_be_constant() {
        let err = parse("r^t", &chart(), &Params::new()).unwrap_err();
        assert!(matches!(err, ParseError::NonConstantExponent { offset: 2 }));
        assert!(parse("r^-2", &chart(), &Params::new()).is_ok());
    }

    #[test]
    fn malformed_inputs() {
        for bad in ["", "   ", "1 +", "r r", "2..3", "1e", "sin r", "*r", "1e400", "r)"] {
            assert!(parse(bad, &chart(), &Params::new()).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn precedence_and_associativity() {
        let c = chart();
        let p = Params::new();
        let pt = [0.3, 2.0, 0.7, 0.1];
        let cases = [
            ("r - 1 - 1", 0.0),
            ("8 / r / 2", 2.0),
            ("-r^2", -4.0),
            ("2^3^2", 512.0),
            ("2*-r", -4.0),
            ("r^-1", 0.5),
            ("1 + 2 * r ^ 2", 9.0),
            ("(1 + 2) * r", 6.0),
            ("--r", 2.0),
            ("1.5e1 + .5", 15.5),
        ];
        for (text, want) in cases {
            let got = parse(text, &c, &p).unwrap().eval(&pt).unwrap();
            assert_eq!(got, want, "{text}");
        }
    }
}
