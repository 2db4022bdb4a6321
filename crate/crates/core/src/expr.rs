//! Closed expression language for coefficients and parameters.
//!
//! Grammar (whitespace insignificant, no implicit multiplication):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | '+' unary | power
//! power   := primary ('^' unary)?          right associative
//! primary := number | 'x' | 'pi' | 'e' | 'i' | func '(' expr ')' | '(' expr ')'
//! func    := sin cos tan sinh cosh tanh exp log sqrt abs
//! ```

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::precision::{
    cabs, cadd, ccos, ccosh, cdiv, cexp, cis_finite, cis_zero, cln, cmul, cpow, csin, csinh, csqrt, csub, ctan, ctanh, Complex, Numeric,
    Real,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    const ALL: [(&'static str, Func); 10] = [
        ("sin", Func::Sin),
        ("cos", Func::Cos),
        ("tan", Func::Tan),
        ("sinh", Func::Sinh),
        ("cosh", Func::Cosh),
        ("tanh", Func::Tanh),
        ("exp", Func::Exp),
        ("log", Func::Log),
        ("sqrt", Func::Sqrt),
        ("abs", Func::Abs),
    ];

    fn name(self) -> &'static str {
        Self::ALL.iter().find(|(_, f)| *f == self).map(|(n, _)| *n).unwrap_or("?")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
    I,
}

/// Parsed expression. Numeric literals keep their decimal text so they can
/// be rounded once at whatever precision the evaluation uses.
#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Number(String),
    Const(Constant),
    X,
    Neg(Box<Expression>),
    Bin(Op, Box<Expression>, Box<Expression>),
    Call(Func, Box<Expression>),
}

pub fn parse_expression(text: &str) -> Result<Expression> {
    if text.trim().is_empty() {
        return Err(Error::Syntax { column: 0, message: "empty expression".into() });
    }
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax { column: self.pos, message: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expression> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == b'+' { Op::Add } else { Op::Sub };
            lhs = Expression::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expression> {
        let mut lhs = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == b'*' { Op::Mul } else { Op::Div };
            lhs = Expression::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expression> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Expression::Neg(Box::new(self.unary()?)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expression> {
        let base = self.primary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expression::Bin(Op::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expression> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                match name {
                    "x" => return Ok(Expression::X),
                    "pi" => return Ok(Expression::Const(Constant::Pi)),
                    "e" => return Ok(Expression::Const(Constant::E)),
                    "i" => return Ok(Expression::Const(Constant::I)),
                    _ => {}
                }
                let Some(&(_, f)) = Func::ALL.iter().find(|(n, _)| *n == name) else {
                    return Err(Error::UnknownIdentifier { name: name.to_string(), column: start });
                };
                if self.peek() != Some(b'(') {
                    return Err(self.err("expected '(' after function name"));
                }
                self.pos += 1;
                let arg = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(Expression::Call(f, Box::new(arg)))
            }
            Some(_) => Err(self.err("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Expression> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            return Err(Error::Syntax { column: start, message: "malformed number".into() });
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            // only an exponent if digits follow; otherwise 'e' is left for the caller
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
            }
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("0");
        Ok(Expression::Number(text.to_string()))
    }
}

impl Expression {
    fn precedence(&self) -> u8 {
        match self {
            Expression::Bin(Op::Add | Op::Sub, ..) => 1,
            Expression::Bin(Op::Mul | Op::Div, ..) => 2,
            Expression::Neg(_) => 3,
            Expression::Bin(Op::Pow, ..) => 4,
            _ => 5,
        }
    }

    /// True when the expression does not depend on x.
    pub fn is_constant(&self) -> bool {
        match self {
            Expression::X => false,
            Expression::Number(_) | Expression::Const(_) => true,
            Expression::Neg(e) | Expression::Call(_, e) => e.is_constant(),
            Expression::Bin(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    pub fn number(v: impl fmt::Display) -> Expression {
        let s = v.to_string();
        match s.strip_prefix('-') {
            Some(rest) => Expression::Neg(Box::new(Expression::Number(rest.to_string()))),
            None => Expression::Number(s),
        }
    }

    pub fn compile<R: Real>(&self, num: &mut Numeric<R>) -> Result<Compiled<R>> {
        let node = lower(self, num)?;
        Ok(Compiled { node })
    }

    /// Evaluate a constant expression.
    pub fn constant_value<R: Real>(&self, num: &mut Numeric<R>) -> Result<Complex<R>> {
        if !self.is_constant() {
            return Err(Error::Contract(alloc::format!("expression '{self}' must not depend on x")));
        }
        let x = num.zero();
        self.compile(num)?.eval(&x, num)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expression, paren: bool| {
            if paren {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expression::Number(s) => f.write_str(s),
            Expression::Const(Constant::Pi) => f.write_str("pi"),
            Expression::Const(Constant::E) => f.write_str("e"),
            Expression::Const(Constant::I) => f.write_str("i"),
            Expression::X => f.write_str("x"),
            Expression::Neg(e) => {
                f.write_str("-")?;
                wrap(f, e, e.precedence() < 3)
            }
            Expression::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expression::Bin(op, a, b) => {
                let (sym, p) = match op {
                    Op::Add => ("+", 1),
                    Op::Sub => ("-", 1),
                    Op::Mul => ("*", 2),
                    Op::Div => ("/", 2),
                    Op::Pow => ("^", 4),
                };
                if *op == Op::Pow {
                    wrap(f, a, a.precedence() < 5)?;
                    f.write_str(sym)?;
                    wrap(f, b, b.precedence() < 3)
                } else {
                    wrap(f, a, a.precedence() < p)?;
                    f.write_str(sym)?;
                    wrap(f, b, b.precedence() <= p)
                }
            }
        }
    }
}

/// Expression with literals rounded and constant subtrees folded at one
/// precision.
#[derive(Debug, Clone)]
pub struct Compiled<R: Real> {
    node: Node<R>,
}

#[derive(Debug, Clone)]
enum Node<R: Real> {
    Value(Complex<R>),
    X,
    Neg(Box<Node<R>>),
    Bin(Op, Box<Node<R>>, Box<Node<R>>),
    Call(Func, Box<Node<R>>),
}

fn lower<R: Real>(e: &Expression, num: &mut Numeric<R>) -> Result<Node<R>> {
    let node = match e {
        Expression::Number(s) => {
            let v = num.parse(s).ok_or_else(|| Error::Syntax { column: 0, message: alloc::format!("bad number '{s}'") })?;
            Node::Value(num.lift(v))
        }
        Expression::Const(Constant::Pi) => {
            let v = num.pi();
            Node::Value(num.lift(v))
        }
        Expression::Const(Constant::E) => {
            let v = num.one().exp(&mut num.cache);
            Node::Value(num.lift(v))
        }
        Expression::Const(Constant::I) => Node::Value(Complex::new(num.zero(), num.one())),
        Expression::X => Node::X,
        Expression::Neg(a) => Node::Neg(Box::new(lower(a, num)?)),
        Expression::Bin(op, a, b) => Node::Bin(*op, Box::new(lower(a, num)?), Box::new(lower(b, num)?)),
        Expression::Call(f, a) => Node::Call(*f, Box::new(lower(a, num)?)),
    };
    if e.is_constant() && !matches!(node, Node::Value(_)) {
        // fold; a singular constant subtree stays symbolic and fails on evaluation
        let zero = num.zero();
        if let Some(v) = eval_node(&node, &zero, num) {
            return Ok(Node::Value(v));
        }
    }
    Ok(node)
}

fn eval_node<R: Real>(n: &Node<R>, x: &R, num: &mut Numeric<R>) -> Option<Complex<R>> {
    let v = match n {
        Node::Value(v) => v.clone(),
        Node::X => num.lift(x.clone()),
        Node::Neg(a) => -eval_node(a, x, num)?,
        Node::Bin(op, a, b) => {
            let a = eval_node(a, x, num)?;
            let b = eval_node(b, x, num)?;
            match op {
                Op::Add => cadd(&a, &b),
                Op::Sub => csub(&a, &b),
                Op::Mul => cmul(&a, &b),
                Op::Div => {
                    if cis_zero(&b) {
                        return None;
                    }
                    cdiv(&a, &b)
                }
                Op::Pow => cpow(&a, &b, num)?,
            }
        }
        Node::Call(f, a) => {
            let a = eval_node(a, x, num)?;
            match f {
                Func::Sin => csin(&a, num),
                Func::Cos => ccos(&a, num),
                Func::Tan => ctan(&a, num)?,
                Func::Sinh => csinh(&a, num),
                Func::Cosh => ccosh(&a, num),
                Func::Tanh => ctanh(&a, num)?,
                Func::Exp => cexp(&a, num),
                Func::Log => cln(&a, num)?,
                Func::Sqrt => csqrt(&a, num),
                Func::Abs => num.lift(cabs(&a)),
            }
        }
    };
    if cis_finite(&v) {
        Some(v)
    } else {
        None
    }
}

impl<R: Real> Compiled<R> {
    pub fn eval(&self, x: &R, num: &mut Numeric<R>) -> Result<Complex<R>> {
        eval_node(&self.node, x, num).ok_or(Error::Singularity { x: x.to_f64() })
    }

    pub fn eval_many(&self, xs: &[R], num: &mut Numeric<R>) -> Result<Vec<Complex<R>>> {
        xs.iter().enumerate().map(|(j, x)| eval_node(&self.node, x, num).ok_or(Error::NodeSingularity { node: j, x: x.to_f64() })).collect()
    }

    /// The value when the expression is constant.
    pub fn as_constant(&self) -> Option<&Complex<R>> {
        match &self.node {
            Node::Value(v) => Some(v),
            _ => None,
        }
    }
}

/// One-shot evaluation at a point.
pub fn evaluate<R: Real>(e: &Expression, x: &R, num: &mut Numeric<R>) -> Result<Complex<R>> {
    e.compile(num)?.eval(x, num)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::{Mp, PrecisionContext};
    use alloc::format;

    fn num15() -> Numeric<f64> {
        Numeric::new(PrecisionContext::new(15).unwrap())
    }

    fn ev(s: &str, x: f64) -> Complex<f64> {
        evaluate(&parse_expression(s).unwrap(), &x, &mut num15()).unwrap()
    }

    #[test]
    fn precedence() {
        assert_eq!(ev("2+3*4^2", 0.0).re, 50.0);
        assert_eq!(ev("-x^2", 2.0).re, -4.0);
        assert_eq!(ev("2^3^2", 0.0).re, 512.0);
        assert_eq!(ev("2^-1", 0.0).re, 0.5);
        assert_eq!(ev("8/4/2", 0.0).re, 1.0);
        assert_eq!(ev("1-2-3", 0.0).re, -4.0);
    }

    #[test]
    fn paine_potential() {
        assert!((ev("1/(x+0.1)^2", 0.0).re - 100.0).abs() < 1e-12);
        let pi = core::f64::consts::PI;
        let want = 1.0 / ((pi + 0.1) * (pi + 0.1));
        assert!((ev("1/(x+0.1)^2", pi).re - want).abs() < 10.0 * 1e-14 * want);
    }

    #[test]
    fn imaginary_unit() {
        let v = ev("i*x", 2.0);
        assert_eq!((v.re, v.im), (0.0, 2.0));
    }

    #[test]
    fn sine_at_half_pi() {
        assert!((ev("sin(x)", core::f64::consts::FRAC_PI_2).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singularities() {
        let e = parse_expression("tan(x/2)").unwrap();
        let mut n: Numeric<Mp> = Numeric::new(PrecisionContext::new(30).unwrap());
        let pi = n.pi();
        assert!(matches!(evaluate(&e, &pi, &mut n), Err(Error::Singularity { .. })));
        let e = parse_expression("1/x").unwrap();
        assert!(matches!(evaluate(&e, &0.0, &mut num15()), Err(Error::Singularity { .. })));
        let e = parse_expression("log(x)").unwrap();
        assert!(evaluate(&e, &0.0, &mut num15()).is_err());
    }

    #[test]
    fn syntax_errors_report_columns() {
        assert_eq!(parse_expression("1 + * 2"), Err(Error::Syntax { column: 4, message: "unexpected character".into() }));
        assert!(matches!(parse_expression("2x"), Err(Error::Syntax { column: 1, .. })));
        assert!(matches!(parse_expression("foo(x)"), Err(Error::UnknownIdentifier { column: 0, .. })));
        assert!(matches!(parse_expression("(x"), Err(Error::Syntax { column: 2, .. })));
        assert!(parse_expression("   ").is_err());
    }

    #[test]
    fn exponent_literals() {
        assert_eq!(ev("1e-2", 0.0).re, 0.01);
        assert_eq!(ev("2.5E+1", 0.0).re, 25.0);
        assert!((ev("e", 0.0).re - core::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn printer_round_trip() {
        for s in [
            "-2*20*cos(2*x)+400*sin(2*x)^2",
            "1/(x+0.1)^2",
            "-(x-1)",
            "a",
            "(2^3)^2",
            "x-(x-1)",
            "x/(2*x)",
            "-x^2",
            "(-x)^2",
            "2^-x",
            "--x",
        ] {
            let Ok(e) = parse_expression(s) else { continue };
            let printed = format!("{e}");
            assert_eq!(parse_expression(&printed).unwrap(), e, "{s} -> {printed}");
        }
    }

    #[test]
    fn literals_round_at_working_precision() {
        let mut n: Numeric<Mp> = Numeric::new(PrecisionContext::new(50).unwrap());
        let v = evaluate(&parse_expression("0.1*10").unwrap(), &n.zero(), &mut n).unwrap();
        assert!((v.re - n.one()).abs().log2_abs() < -160.0);
    }
}
