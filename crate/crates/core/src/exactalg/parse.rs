//! Reader for the canonical text of rational functions (and ordinary infix
//! expressions in s1, s2, s3).

use num_bigint::BigInt;

use super::ratfunc::RationalFunction;
use super::scalar::Scalar;
use super::AlgebraError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Var(usize),
    Op(char),
}

#[derive(Debug)]
enum Ast {
    Num(BigInt),
    Var(usize),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, i64),
}

fn err(msg: impl Into<String>) -> AlgebraError {
    AlgebraError::Parse(msg.into())
}

fn lex(src: &str) -> Result<Vec<Tok>, AlgebraError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Tok::Num(s.parse().map_err(|_| err("bad integer"))?));
        } else if c == 's' {
            i += 1;
            match chars.get(i) {
                Some(&d @ '1'..='3') => {
                    out.push(Tok::Var(d as usize - '1' as usize));
                    i += 1;
                }
                _ => return Err(err(format!("unknown variable near position {i}"))),
            }
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(err(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Ast, AlgebraError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Ast, AlgebraError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Ast, AlgebraError> {
        if self.eat('-') {
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast, AlgebraError> {
        let base = self.atom()?;
        if self.eat('^') {
            let negative = self.eat('-');
            let paren = self.eat('(');
            let negative = if paren { negative ^ self.eat('-') } else { negative };
            let e = match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    i64::try_from(n).map_err(|_| err("exponent too large"))?
                }
                _ => return Err(err("expected integer exponent")),
            };
            if paren && !self.eat(')') {
                return Err(err("expected ')' after exponent"));
            }
            return Ok(Ast::Pow(Box::new(base), if negative { -e } else { e }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Ast, AlgebraError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Ast::Num(n))
            }
            Some(Tok::Var(v)) => {
                self.pos += 1;
                Ok(Ast::Var(v))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(err("unbalanced parentheses"));
                }
                Ok(e)
            }
            other => Err(err(format!("unexpected token {other:?}"))),
        }
    }
}

fn eval(ast: &Ast) -> Result<RationalFunction, AlgebraError> {
    Ok(match ast {
        Ast::Num(n) => RationalFunction::from_scalar(Scalar::from_integer(n.clone())),
        Ast::Var(v) => RationalFunction::var(*v),
        Ast::Neg(a) => -&eval(a)?,
        Ast::Add(a, b) => &eval(a)? + &eval(b)?,
        Ast::Sub(a, b) => &eval(a)? - &eval(b)?,
        Ast::Mul(a, b) => &eval(a)? * &eval(b)?,
        Ast::Div(a, b) => &eval(a)? * &recip(b)?,
        Ast::Pow(a, e) if *e < 0 => recip(a)?.pow(-e)?,
        Ast::Pow(a, e) => eval(a)?.pow(*e)?,
    })
}

/// Reciprocal that distributes over products so factored denominators invert.
fn recip(ast: &Ast) -> Result<RationalFunction, AlgebraError> {
    Ok(match ast {
        Ast::Mul(a, b) => &recip(a)? * &recip(b)?,
        Ast::Div(a, b) => &eval(b)? * &recip(a)?,
        Ast::Neg(a) => -&recip(a)?,
        Ast::Pow(a, e) if *e >= 0 => recip(a)?.pow(*e)?,
        Ast::Pow(a, e) => eval(a)?.pow(-e)?,
        other => eval(other)?.recip()?,
    })
}

pub fn parse_rational_function(src: &str) -> Result<RationalFunction, AlgebraError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let ast = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(err("trailing input"));
    }
    eval(&ast)
}

/// Reads the `{"num", "den"}` pair emitted by the canonical renderer.
pub fn parse_fraction(num: &str, den: &str) -> Result<RationalFunction, AlgebraError> {
    let n = parse_rational_function(num)?;
    let mut p = Parser { toks: lex(den)?, pos: 0 };
    let ast = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(err("trailing input"));
    }
    Ok(&n * &recip(&ast)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_text_round_trips() {
        let x = parse_rational_function("(s1 + s2)/(2*s1*s2) - 3/(s1 - s3)^2 + s3^2").unwrap();
        let back = parse_fraction(&x.render_num(), &x.render_den()).unwrap();
        assert_eq!(x, back);
        let y = parse_rational_function("s1^(-2)*s2").unwrap();
        assert_eq!(y.render_den(), "s1^2");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_rational_function("s4").is_err());
        assert!(parse_rational_function("(s1").is_err());
        assert!(parse_rational_function("1/(s1^2 + s2^2)").is_err());
    }
}
