//! Sub-function expressions in prefix notation.
//!
//! JSON form: a number is a constant, a string names a variable or a declared
//! constant, and an array `[op, args...]` applies an operator:
//! `"+"`, `"*"` (n-ary), `"-"` (unary negation or left-folded subtraction),
//! `"/"` (binary), `"pow"` (`["pow", base, integer]`) and `"neg"`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::intervals::Bounds;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Value", into = "Value")]
pub enum Expr {
    Const(f64),
    Var(String),
    Add(Vec<Expr>),
    Sub(Vec<Expr>),
    Mul(Vec<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Neg(Box<Expr>),
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Validation(format!("expression: {}", msg.into()))
}

impl TryFrom<Value> for Expr {
    type Error = Error;

    fn try_from(v: Value) -> Result<Self> {
        match v {
            Value::Number(n) => n
                .as_f64()
                .filter(|x| x.is_finite())
                .map(Expr::Const)
                .ok_or_else(|| bad(format!("non-finite constant {n}"))),
            Value::String(s) if !s.is_empty() => Ok(Expr::Var(s)),
            Value::Array(items) => {
                let mut it = items.into_iter();
                let op = match it.next() {
                    Some(Value::String(op)) => op,
                    other => return Err(bad(format!("operator expected, got {other:?}"))),
                };
                let rest: Vec<Value> = it.collect();
                if op == "pow" {
                    let [base, exp] = <[Value; 2]>::try_from(rest)
                        .map_err(|_| bad("pow takes a base and an integer exponent"))?;
                    let n = exp
                        .as_i64()
                        .and_then(|n| i32::try_from(n).ok())
                        .ok_or_else(|| bad("pow exponent must be an integer"))?;
                    return Ok(Expr::Pow(Box::new(Expr::try_from(base)?), n));
                }
                let args = rest
                    .into_iter()
                    .map(Expr::try_from)
                    .collect::<Result<Vec<_>>>()?;
                let arity = |min: usize, max: usize| {
                    if args.len() < min || args.len() > max {
                        Err(bad(format!("`{op}` takes {min}..={max} arguments")))
                    } else {
                        Ok(())
                    }
                };
                match op.as_str() {
                    "+" => {
                        arity(1, usize::MAX)?;
                        Ok(Expr::Add(args))
                    }
                    "*" => {
                        arity(1, usize::MAX)?;
                        Ok(Expr::Mul(args))
                    }
                    "-" => {
                        arity(1, usize::MAX)?;
                        if args.len() == 1 {
                            Ok(Expr::Neg(Box::new(args.into_iter().next().unwrap())))
                        } else {
                            Ok(Expr::Sub(args))
                        }
                    }
                    "neg" => {
                        arity(1, 1)?;
                        Ok(Expr::Neg(Box::new(args.into_iter().next().unwrap())))
                    }
                    "/" => {
                        arity(2, 2)?;
                        let mut it = args.into_iter();
                        Ok(Expr::Div(
                            Box::new(it.next().unwrap()),
                            Box::new(it.next().unwrap()),
                        ))
                    }
                    other => Err(bad(format!("unknown operator `{other}`"))),
                }
            }
            other => Err(bad(format!("unexpected {other}"))),
        }
    }
}

impl From<Expr> for Value {
    fn from(e: Expr) -> Value {
        fn list(op: &str, args: Vec<Expr>) -> Value {
            let mut v = vec![Value::from(op)];
            v.extend(args.into_iter().map(Value::from));
            Value::Array(v)
        }
        match e {
            Expr::Const(c) => Value::from(c),
            Expr::Var(s) => Value::from(s),
            Expr::Add(a) => list("+", a),
            Expr::Sub(a) => list("-", a),
            Expr::Mul(a) => list("*", a),
            Expr::Div(a, b) => list("/", vec![*a, *b]),
            Expr::Pow(a, n) => Value::Array(vec!["pow".into(), Value::from(*a), n.into()]),
            Expr::Neg(a) => list("neg", vec![*a]),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(f: &mut fmt::Formatter<'_>, args: &[Expr], sep: &str) -> fmt::Result {
            write!(f, "(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    write!(f, " {sep} ")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")
        }
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(s) => write!(f, "{s}"),
            Expr::Add(a) => join(f, a, "+"),
            Expr::Sub(a) => join(f, a, "-"),
            Expr::Mul(a) => join(f, a, "*"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, n) => write!(f, "{a}^{n}"),
            Expr::Neg(a) => write!(f, "-{a}"),
        }
    }
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Self {
        Expr::Var(name.into())
    }

    pub fn parse(json: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(json)?;
        Expr::try_from(v)
    }

    /// Every name referenced by the expression.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(s) => {
                out.insert(s.clone());
            }
            Expr::Add(a) | Expr::Sub(a) | Expr::Mul(a) => {
                a.iter().for_each(|e| e.collect_names(out))
            }
            Expr::Div(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
            Expr::Pow(a, _) | Expr::Neg(a) => a.collect_names(out),
        }
    }

    /// Point evaluation.
    pub fn eval(&self, env: &dyn Fn(&str) -> Option<f64>) -> Result<f64> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var(s) => env(s).ok_or_else(|| Error::NotFound(s.clone()))?,
            Expr::Add(a) => a.iter().map(|e| e.eval(env)).sum::<Result<f64>>()?,
            Expr::Sub(a) => {
                let mut it = a.iter();
                let first = it.next().map_or(Ok(0.0), |e| e.eval(env))?;
                it.try_fold(first, |acc, e| Ok::<_, Error>(acc - e.eval(env)?))?
            }
            Expr::Mul(a) => a.iter().map(|e| e.eval(env)).product::<Result<f64>>()?,
            Expr::Div(a, b) => {
                let d = b.eval(env)?;
                if d == 0.0 {
                    return Err(Error::DivisionByZero(self.to_string()));
                }
                a.eval(env)? / d
            }
            Expr::Pow(a, n) => a.eval(env)?.powi(*n),
            Expr::Neg(a) => -a.eval(env)?,
        })
    }

    /// Natural interval extension.
    pub fn eval_bounds(&self, env: &dyn Fn(&str) -> Option<Bounds>) -> Result<Bounds> {
        Ok(match self {
            Expr::Const(c) => Bounds::point(*c),
            Expr::Var(s) => env(s).ok_or_else(|| Error::NotFound(s.clone()))?,
            Expr::Add(a) => {
                let mut acc = Bounds::point(0.0);
                for e in a {
                    acc = acc.add(e.eval_bounds(env)?);
                }
                acc
            }
            Expr::Sub(a) => {
                let mut it = a.iter();
                let mut acc = match it.next() {
                    Some(e) => e.eval_bounds(env)?,
                    None => Bounds::point(0.0),
                };
                for e in it {
                    acc = acc.sub(e.eval_bounds(env)?);
                }
                acc
            }
            Expr::Mul(a) => {
                let mut acc = Bounds::point(1.0);
                for e in a {
                    acc = acc.mul(e.eval_bounds(env)?);
                }
                acc
            }
            Expr::Div(a, b) => a
                .eval_bounds(env)?
                .div(b.eval_bounds(env)?)
                .ok_or_else(|| Error::DivisionByZero(self.to_string()))?,
            Expr::Pow(a, n) => a.eval_bounds(env)?.powi(*n),
            Expr::Neg(a) => a.eval_bounds(env)?.neg(),
        })
    }

    /// Lowers names to slot indices (or folded constants) for fast repeated
    /// evaluation.
    pub fn compile(&self, resolve: &dyn Fn(&str) -> Option<Operand>) -> Result<Compiled> {
        Ok(match self {
            Expr::Const(c) => Compiled::Const(*c),
            Expr::Var(s) => match resolve(s) {
                Some(Operand::Const(c)) => Compiled::Const(c),
                Some(Operand::Slot(i)) => Compiled::Slot(i),
                None => return Err(Error::NotFound(s.clone())),
            },
            Expr::Add(a) => Compiled::Add(compile_all(a, resolve)?),
            Expr::Sub(a) => Compiled::Sub(compile_all(a, resolve)?),
            Expr::Mul(a) => Compiled::Mul(compile_all(a, resolve)?),
            Expr::Div(a, b) => {
                Compiled::Div(Box::new(a.compile(resolve)?), Box::new(b.compile(resolve)?))
            }
            Expr::Pow(a, n) => Compiled::Pow(Box::new(a.compile(resolve)?), *n),
            Expr::Neg(a) => Compiled::Neg(Box::new(a.compile(resolve)?)),
        })
    }
}

fn compile_all(a: &[Expr], resolve: &dyn Fn(&str) -> Option<Operand>) -> Result<Vec<Compiled>> {
    a.iter().map(|e| e.compile(resolve)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Operand {
    Const(f64),
    Slot(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Compiled {
    Const(f64),
    Slot(usize),
    Add(Vec<Compiled>),
    Sub(Vec<Compiled>),
    Mul(Vec<Compiled>),
    Div(Box<Compiled>, Box<Compiled>),
    Pow(Box<Compiled>, i32),
    Neg(Box<Compiled>),
}

impl Compiled {
    /// Unchecked evaluation; a zero divisor yields a non-finite value.
    pub fn eval(&self, slots: &[f64]) -> f64 {
        match self {
            Compiled::Const(c) => *c,
            Compiled::Slot(i) => slots[*i],
            Compiled::Add(a) => a.iter().map(|e| e.eval(slots)).sum(),
            Compiled::Sub(a) => {
                let mut it = a.iter();
                let first = it.next().map_or(0.0, |e| e.eval(slots));
                it.fold(first, |acc, e| acc - e.eval(slots))
            }
            Compiled::Mul(a) => a.iter().map(|e| e.eval(slots)).product(),
            Compiled::Div(a, b) => a.eval(slots) / b.eval(slots),
            Compiled::Pow(a, n) => a.eval(slots).powi(*n),
            Compiled::Neg(a) => -a.eval(slots),
        }
    }

    /// Like [`Compiled::eval`] but reports an exact zero divisor.
    pub fn eval_checked(&self, slots: &[f64]) -> std::result::Result<f64, ()> {
        Ok(match self {
            Compiled::Const(c) => *c,
            Compiled::Slot(i) => slots[*i],
            Compiled::Add(a) => {
                let mut s = 0.0;
                for e in a {
                    s += e.eval_checked(slots)?;
                }
                s
            }
            Compiled::Sub(a) => {
                let mut it = a.iter();
                let mut s = match it.next() {
                    Some(e) => e.eval_checked(slots)?,
                    None => 0.0,
                };
                for e in it {
                    s -= e.eval_checked(slots)?;
                }
                s
            }
            Compiled::Mul(a) => {
                let mut s = 1.0;
                for e in a {
                    s *= e.eval_checked(slots)?;
                }
                s
            }
            Compiled::Div(a, b) => {
                let d = b.eval_checked(slots)?;
                if d == 0.0 {
                    return Err(());
                }
                a.eval_checked(slots)? / d
            }
            Compiled::Pow(a, n) => a.eval_checked(slots)?.powi(*n),
            Compiled::Neg(a) => -a.eval_checked(slots)?,
        })
    }
}
