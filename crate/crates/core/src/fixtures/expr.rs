//! Expression grammar for fixture files.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' '-'? integer | '^' '(' '-'? integer ')')?
//! atom  := number | 'z' | 'i' | name | name '(' expr ')' | '(' expr ')'
//! ```
//!
//! Functions: `wp`, `wpp` (`℘'`) and `d` (derivative in `z`). Names refer to
//! constants declared alongside the expression.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::cxpoly::{GaussRat, RationalFn};
use crate::elliptic::{self, MeroExpr};
use crate::{Error, Point, Result, C64};

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Z,
    I,
    Num(BigRational),
    Name(String),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Neg(Box<Ast>),
    Pow(Box<Ast>, i32),
    Call(String, Box<Ast>),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            out.push(Tok::Num(parse_decimal(&cs[start..i].iter().collect::<String>())?));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character '{c}' in \"{s}\"")));
        }
    }
    Ok(out)
}

fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad number \"{s}\""));
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.contains('.') || (int.is_empty() && frac.is_empty()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let d = BigInt::from(10u32).pow(frac.len() as u32);
    Ok(BigRational::new(n, d))
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    src: String,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at token {} in \"{}\"", self.pos, self.src))
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut a = self.term()?;
        loop {
            if self.eat('+') {
                a = Ast::Add(Box::new(a), Box::new(self.term()?));
            } else if self.eat('-') {
                a = Ast::Sub(Box::new(a), Box::new(self.term()?));
            } else {
                return Ok(a);
            }
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut a = self.unary()?;
        loop {
            if self.eat('*') {
                a = Ast::Mul(Box::new(a), Box::new(self.unary()?));
            } else if self.eat('/') {
                a = Ast::Div(Box::new(a), Box::new(self.unary()?));
            } else {
                return Ok(a);
            }
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        if self.eat('-') {
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast> {
        let a = self.atom()?;
        if !self.eat('^') {
            return Ok(a);
        }
        let paren = self.eat('(');
        let neg = self.eat('-');
        let n = match self.toks.get(self.pos) {
            Some(Tok::Num(r)) if r.is_integer() => {
                let v: i32 = r.numer().try_into().map_err(|_| self.err("exponent too large"))?;
                self.pos += 1;
                v
            }
            _ => return Err(self.err("expected an integer exponent")),
        };
        if paren && !self.eat(')') {
            return Err(self.err("expected ')'"));
        }
        Ok(Ast::Pow(Box::new(a), if neg { -n } else { n }))
    }

    fn atom(&mut self) -> Result<Ast> {
        let tok = self.peek().cloned().ok_or_else(|| self.err("unexpected end of input"))?;
        self.pos += 1;
        match tok {
            Tok::Num(r) => Ok(Ast::Num(r)),
            Tok::Op('(') => {
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Tok::Ident(name) => {
                if self.eat('(') {
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return Err(self.err("expected ')'"));
                    }
                    match name.as_str() {
                        "wp" | "wpp" | "d" => Ok(Ast::Call(name, Box::new(arg))),
                        _ => Err(self.err(&format!("unknown function '{name}'"))),
                    }
                } else {
                    Ok(match name.as_str() {
                        "z" => Ast::Z,
                        "i" => Ast::I,
                        _ => Ast::Name(name),
                    })
                }
            }
            Tok::Op(c) => Err(self.err(&format!("unexpected '{c}'"))),
        }
    }
}

pub fn parse(s: &str) -> Result<Ast> {
    let mut p = Parser { toks: lex(s)?, pos: 0, src: s.to_string() };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

/// A declared constant: exact when it is a Gaussian rational expression.
#[derive(Clone, Debug)]
pub enum ConstValue {
    Exact(GaussRat),
    Float(C64),
}

impl ConstValue {
    pub fn value(&self) -> C64 {
        match self {
            ConstValue::Exact(g) => g.to_c64(),
            ConstValue::Float(c) => *c,
        }
    }
}

pub type Constants = BTreeMap<String, ConstValue>;

/// Resolve constant declarations in order; later ones may use earlier ones.
pub fn resolve_constants<'a>(decls: impl IntoIterator<Item = (&'a String, &'a String)>) -> Result<Constants> {
    let mut out = Constants::new();
    for (name, src) in decls {
        let ast = parse(src)?;
        let v = match exact_const(&ast, &out) {
            Ok(g) => ConstValue::Exact(g),
            Err(_) => ConstValue::Float(float_const(&ast, &out)?),
        };
        out.insert(name.clone(), v);
    }
    Ok(out)
}

fn exact_const(ast: &Ast, consts: &Constants) -> Result<GaussRat> {
    let r = to_rational(ast, consts)?;
    if r.is_constant() {
        Ok(r.num().coeff(0))
    } else {
        Err(Error::Parse("expression depends on z".into()))
    }
}

fn float_const(ast: &Ast, consts: &Constants) -> Result<C64> {
    match to_mero(ast, consts)? {
        MeroExpr::Const(c) => Ok(c),
        _ => Err(Error::Parse("constant depends on z".into())),
    }
}

/// Build a rational function; the torus functions are rejected.
pub fn to_rational(ast: &Ast, consts: &Constants) -> Result<RationalFn> {
    Ok(match ast {
        Ast::Z => RationalFn::z(),
        Ast::I => RationalFn::constant(GaussRat::i()),
        Ast::Num(r) => RationalFn::constant(GaussRat::real(r.clone())),
        Ast::Name(n) => match consts.get(n) {
            Some(ConstValue::Exact(g)) => RationalFn::constant(g.clone()),
            Some(ConstValue::Float(_)) => {
                return Err(Error::Parse(format!("constant '{n}' is not a Gaussian rational")))
            }
            None => return Err(Error::Parse(format!("unknown name '{n}'"))),
        },
        Ast::Add(a, b) => to_rational(a, consts)?.add(&to_rational(b, consts)?),
        Ast::Sub(a, b) => to_rational(a, consts)?.sub(&to_rational(b, consts)?),
        Ast::Mul(a, b) => to_rational(a, consts)?.mul(&to_rational(b, consts)?),
        Ast::Div(a, b) => to_rational(a, consts)?
            .div(&to_rational(b, consts)?)
            .map_err(|_| Error::Parse("division by zero".into()))?,
        Ast::Neg(a) => to_rational(a, consts)?.neg(),
        Ast::Pow(a, n) => to_rational(a, consts)?
            .powi(*n)
            .map_err(|_| Error::Parse("zero to a negative power".into()))?,
        Ast::Call(f, a) if f == "d" => to_rational(a, consts)?.derivative(),
        Ast::Call(f, _) => return Err(Error::Parse(format!("'{f}' is only available on the torus"))),
    })
}

/// Build an expression over `z`, `℘`, `℘'`.
pub fn to_mero(ast: &Ast, consts: &Constants) -> Result<MeroExpr> {
    Ok(match ast {
        Ast::Z => MeroExpr::Z,
        Ast::I => MeroExpr::Const(C64::new(0.0, 1.0)),
        Ast::Num(r) => MeroExpr::Const(GaussRat::real(r.clone()).to_c64()),
        Ast::Name(n) => match consts.get(n) {
            Some(v) => MeroExpr::Const(v.value()),
            None => return Err(Error::Parse(format!("unknown name '{n}'"))),
        },
        Ast::Add(a, b) => MeroExpr::add(to_mero(a, consts)?, to_mero(b, consts)?),
        Ast::Sub(a, b) => MeroExpr::sub(to_mero(a, consts)?, to_mero(b, consts)?),
        Ast::Mul(a, b) => MeroExpr::mul(to_mero(a, consts)?, to_mero(b, consts)?),
        Ast::Div(a, b) => MeroExpr::div(to_mero(a, consts)?, to_mero(b, consts)?),
        Ast::Neg(a) => MeroExpr::neg(to_mero(a, consts)?),
        Ast::Pow(a, n) => MeroExpr::pow(to_mero(a, consts)?, *n),
        Ast::Call(f, a) => {
            let arg = to_mero(a, consts)?;
            match (f.as_str(), arg) {
                ("d", e) => e.derivative(),
                ("wp", MeroExpr::Z) => MeroExpr::Wp,
                ("wpp", MeroExpr::Z) => MeroExpr::WpPrime,
                ("wp", MeroExpr::Const(c)) => MeroExpr::Const(elliptic::wp(c)?),
                ("wpp", MeroExpr::Const(c)) => MeroExpr::Const(elliptic::wp_prime(c)?),
                (f, _) => return Err(Error::Parse(format!("{f}(...) takes z or a constant"))),
            }
        }
    })
}

/// A puncture: `inf` or an exact constant expression.
pub fn parse_point(s: &str, consts: &Constants) -> Result<Point> {
    let t = s.trim();
    if matches!(t, "inf" | "infinity" | "∞") {
        return Ok(Point::Infinity);
    }
    let ast = parse(t)?;
    match exact_const(&ast, consts) {
        Ok(g) => Ok(Point::Exact(g)),
        Err(_) => Ok(Point::Approx(float_const(&ast, consts)?)),
    }
}
