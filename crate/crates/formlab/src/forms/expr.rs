//! A small expression language for scalar functions `C^d -> C`.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom
//! atom   := number | 'i' | var | call | '(' expr ')'
//! call   := name '(' ... ')'    name in {conj, abs, re, im, phase, abspow, abspow0}
//! var    := 'x' digits          (1-based, bounded by the declared arity)
//! number := decimal literal, optional exponent, optional trailing 'i'
//! ```
//!
//! `abspow(e, s)` is `|e|^s`; at `e = 0` it is `0` for `s > 0` and an error
//! for `s <= 0`. The `abspow0` spelling is the vanishing-at-zero variant
//! used by catalog families whose continuous extension at the origin is `0`:
//! it evaluates to `0` at `e = 0` for every exponent.
//!
//! Literal spellings fold at the token level: `2+3i` and `-4` parse as
//! single complex literals, so the printed canonical form parses back to a
//! structurally identical tree.

use num_complex::Complex64;

use crate::error::{Error, EvalError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Lit(Complex64),
    /// 0-based variable index; `x1` in the source is `Var(0)`.
    Var(usize),
    /// `phase(theta)` is the unimodular constant `e^{i theta}`.
    Phase(f64),
    Conj(Box<Expr>),
    Abs(Box<Expr>),
    Re(Box<Expr>),
    Im(Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    AbsPow {
        base: Box<Expr>,
        exponent: f64,
        /// When set, the value at `base = 0` is `0` regardless of the
        /// exponent (continuous extension of catalog families).
        vanishing: bool,
    },
}

impl Expr {
    pub fn lit(re: f64, im: f64) -> Expr {
        Expr::Lit(Complex64::new(re, im))
    }

    /// Largest variable index used, plus one (zero for constant expressions).
    pub fn arity(&self) -> usize {
        match self {
            Expr::Lit(_) | Expr::Phase(_) => 0,
            Expr::Var(k) => k + 1,
            Expr::Conj(e) | Expr::Abs(e) | Expr::Re(e) | Expr::Im(e) | Expr::Neg(e) => e.arity(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.arity().max(b.arity())
            }
            Expr::AbsPow { base, .. } => base.arity(),
        }
    }

    /// Canonical source form. Parsing the output of `print` yields a tree
    /// that prints identically, and parser-produced trees round-trip to
    /// structural equality.
    pub fn print(&self) -> String {
        match self {
            Expr::Lit(c) => {
                if c.im == 0.0 {
                    format!("{}", c.re)
                } else if c.re == 0.0 {
                    format!("{}i", c.im)
                } else {
                    format!("({} + {}i)", c.re, c.im)
                }
            }
            Expr::Var(k) => format!("x{}", k + 1),
            Expr::Phase(theta) => format!("phase({theta})"),
            Expr::Conj(e) => format!("conj({})", e.print()),
            Expr::Abs(e) => format!("abs({})", e.print()),
            Expr::Re(e) => format!("re({})", e.print()),
            Expr::Im(e) => format!("im({})", e.print()),
            Expr::Neg(e) => format!("(-{})", e.print()),
            Expr::Add(a, b) => format!("({} + {})", a.print(), b.print()),
            Expr::Sub(a, b) => format!("({} - {})", a.print(), b.print()),
            Expr::Mul(a, b) => format!("({} * {})", a.print(), b.print()),
            Expr::Div(a, b) => format!("({} / {})", a.print(), b.print()),
            Expr::AbsPow {
                base,
                exponent,
                vanishing,
            } => {
                let name = if *vanishing { "abspow0" } else { "abspow" };
                format!("{name}({}, {exponent})", base.print())
            }
        }
    }

    /// Recursive evaluation at a point of `C^d`.
    pub fn eval(&self, x: &[Complex64]) -> Result<Complex64, EvalError> {
        let v = match self {
            Expr::Lit(c) => *c,
            Expr::Var(k) => {
                assert!(*k < x.len(), "variable index out of arity (checked at parse)");
                x[*k]
            }
            Expr::Phase(theta) => Complex64::from_polar(1.0, *theta),
            Expr::Conj(e) => e.eval(x)?.conj(),
            Expr::Abs(e) => Complex64::new(e.eval(x)?.norm(), 0.0),
            Expr::Re(e) => Complex64::new(e.eval(x)?.re, 0.0),
            Expr::Im(e) => Complex64::new(e.eval(x)?.im, 0.0),
            Expr::Neg(e) => -e.eval(x)?,
            Expr::Add(a, b) => a.eval(x)? + b.eval(x)?,
            Expr::Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Expr::Mul(a, b) => a.eval(x)? * b.eval(x)?,
            Expr::Div(a, b) => {
                let den = b.eval(x)?;
                if den == Complex64::ZERO {
                    return Err(EvalError::DivisionByZero);
                }
                a.eval(x)? / den
            }
            Expr::AbsPow {
                base,
                exponent,
                vanishing,
            } => {
                let r = base.eval(x)?.norm();
                if r == 0.0 {
                    if *vanishing || *exponent > 0.0 {
                        Complex64::ZERO
                    } else {
                        return Err(EvalError::SingularAbsPow {
                            exponent: *exponent,
                        });
                    }
                } else {
                    Complex64::new(r.powf(*exponent), 0.0)
                }
            }
        };
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(EvalError::NonFinite);
        }
        Ok(v)
    }
}

/// Parses an expression over `d` variables.
pub fn parse_expr(text: &str, d: usize) -> Result<Expr> {
    let mut parser = Parser {
        chars: text.char_indices().collect(),
        pos: 0,
        d,
    };
    let expr = parser.parse_expr()?.0;
    parser.skip_ws();
    if parser.pos < parser.chars.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(expr)
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    d: usize,
}

/// Expression plus a flag marking an immediate literal token (a bare number
/// or a number behind one unary minus). Only immediate tokens take part in
/// the `a + bi` literal folding, so parenthesized subexpressions never fold.
type Parsed = (Expr, bool);

impl Parser {
    fn error(&self, msg: &str) -> Error {
        let byte = self
            .chars
            .get(self.pos)
            .map(|(b, _)| *b)
            .unwrap_or_else(|| self.chars.last().map(|(b, c)| b + c.len_utf8()).unwrap_or(0));
        Error::invalid(format!("syntax error at byte {byte}: {msg}"))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, expected: char) -> Result<()> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == expected => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(self.error(&format!("expected '{expected}', found '{c}'"))),
            None => Err(self.error(&format!("expected '{expected}', found end of input"))),
        }
    }

    fn parse_expr(&mut self) -> Result<Parsed> {
        let (mut lhs, mut lhs_bare) = self.parse_term()?;
        loop {
            self.skip_ws();
            let subtract = match self.peek() {
                Some('+') => false,
                Some('-') => true,
                _ => return Ok((lhs, lhs_bare)),
            };
            self.bump();
            let (rhs, rhs_bare) = self.parse_term()?;
            if let Some(folded) = fold_literal_sum(&lhs, lhs_bare, &rhs, rhs_bare, subtract) {
                lhs = folded;
            } else if subtract {
                lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
            } else {
                lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
            }
            lhs_bare = false;
        }
    }

    fn parse_term(&mut self) -> Result<Parsed> {
        let (mut lhs, lhs_bare) = self.parse_factor()?;
        let mut bare = lhs_bare;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('*') => {
                    self.bump();
                    let (rhs, _) = self.parse_factor()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                    bare = false;
                }
                Some('/') => {
                    self.bump();
                    let (rhs, _) = self.parse_factor()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                    bare = false;
                }
                _ => return Ok((lhs, bare)),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<Parsed> {
        self.skip_ws();
        if self.peek() == Some('-') {
            self.bump();
            let (inner, bare) = self.parse_factor()?;
            // A minus directly on a literal token is a negative literal.
            if bare {
                if let Expr::Lit(c) = inner {
                    return Ok((Expr::Lit(-c), true));
                }
            }
            return Ok((Expr::Neg(Box::new(inner)), false));
        }
        self.parse_atom()
    }

    fn parse_atom(&mut self) -> Result<Parsed> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.bump();
                let (inner, _) = self.parse_expr()?;
                self.eat(')')?;
                Ok((inner, false))
            }
            Some(c) if c.is_ascii_digit() || c == '.' => Ok((self.parse_number()?, true)),
            Some(c) if c.is_ascii_alphabetic() => self.parse_name(),
            Some(c) => Err(self.error(&format!("unexpected character '{c}'"))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn parse_number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.') {
            self.bump();
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            // Exponent only when digits follow (optionally signed).
            let mark = self.pos;
            self.bump();
            if matches!(self.peek(), Some('+' | '-')) {
                self.bump();
            }
            if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.bump();
                }
            } else {
                self.pos = mark;
            }
        }
        let text: String = self.chars[start..self.pos].iter().map(|(_, c)| c).collect();
        let value: f64 = text
            .parse()
            .map_err(|_| self.error(&format!("invalid number literal '{text}'")))?;
        if self.peek() == Some('i') {
            self.bump();
            Ok(Expr::Lit(Complex64::new(0.0, value)))
        } else {
            Ok(Expr::Lit(Complex64::new(value, 0.0)))
        }
    }

    fn parse_name(&mut self) -> Result<Parsed> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric()) {
            self.bump();
        }
        let name: String = self.chars[start..self.pos].iter().map(|(_, c)| c).collect();
        let expr = match name.as_str() {
            "i" => return Ok((Expr::Lit(Complex64::I), true)),
            "conj" | "abs" | "re" | "im" => {
                self.eat('(')?;
                let (inner, _) = self.parse_expr()?;
                self.eat(')')?;
                match name.as_str() {
                    "conj" => Expr::Conj(Box::new(inner)),
                    "abs" => Expr::Abs(Box::new(inner)),
                    "re" => Expr::Re(Box::new(inner)),
                    _ => Expr::Im(Box::new(inner)),
                }
            }
            "phase" => {
                self.eat('(')?;
                let theta = self.parse_real_literal()?;
                self.eat(')')?;
                Expr::Phase(theta)
            }
            "abspow" | "abspow0" => {
                let vanishing = name == "abspow0";
                self.eat('(')?;
                let (base, _) = self.parse_expr()?;
                self.eat(',')?;
                let exponent = self.parse_real_literal()?;
                self.eat(')')?;
                Expr::AbsPow {
                    base: Box::new(base),
                    exponent,
                    vanishing,
                }
            }
            _ => {
                if let Some(rest) = name.strip_prefix('x') {
                    if let Ok(index) = rest.parse::<usize>() {
                        if index == 0 {
                            return Err(self.error("variable indices start at x1"));
                        }
                        if index > self.d {
                            return Err(self.error(&format!(
                                "variable x{index} exceeds the declared arity {}",
                                self.d
                            )));
                        }
                        return Ok((Expr::Var(index - 1), false));
                    }
                }
                return Err(self.error(&format!("unknown identifier '{name}'")));
            }
        };
        Ok((expr, false))
    }

    fn parse_real_literal(&mut self) -> Result<f64> {
        self.skip_ws();
        let negative = if self.peek() == Some('-') {
            self.bump();
            true
        } else {
            false
        };
        self.skip_ws();
        match self.parse_number()? {
            Expr::Lit(c) if c.im == 0.0 => Ok(if negative { -c.re } else { c.re }),
            _ => Err(self.error("expected a real literal")),
        }
    }
}

/// Folds the literal spelling `a + bi` (or `a - bi`) into one complex
/// literal. Applies only to immediate literal tokens.
fn fold_literal_sum(
    lhs: &Expr,
    lhs_bare: bool,
    rhs: &Expr,
    rhs_bare: bool,
    subtract: bool,
) -> Option<Expr> {
    if !(lhs_bare && rhs_bare) {
        return None;
    }
    if let (Expr::Lit(a), Expr::Lit(b)) = (lhs, rhs) {
        if a.im == 0.0 && b.re == 0.0 && b.im != 0.0 {
            let im = if subtract { -b.im } else { b.im };
            return Some(Expr::Lit(Complex64::new(a.re, im)));
        }
    }
    None
}
