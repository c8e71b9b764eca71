//! Multiplicative quadratic maps `q: K → L` or `q: K → End_{F_p}(E)` given by
//! full value tables, and their axioms.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::matrix::FpMatrix;
use crate::algebra::{Field, Fq};

/// Values of a map: field elements or endomorphism matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Table {
    Field(Vec<Fq>),
    End(Vec<FpMatrix>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MQMap {
    pub domain: Field,
    /// The field `L`, or `E` for `End_{F_p}(E)`.
    pub target: Field,
    pub table: Table,
}

/// First witness against each axiom; all `None` means the map is valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub multiplicative: Option<String>,
    pub integers: Option<String>,
    pub biadditive: Option<String>,
}

impl Verdict {
    pub fn valid(&self) -> bool {
        self.multiplicative.is_none() && self.integers.is_none() && self.biadditive.is_none()
    }
}

/// Uniform ring operations on the two kinds of values.
#[derive(Clone, PartialEq, Eq, Debug)]
enum Value {
    F(Fq),
    M(FpMatrix),
}

impl Value {
    fn add(&self, o: &Value) -> Value {
        match (self, o) {
            (Value::F(a), Value::F(b)) => Value::F(*a + *b),
            (Value::M(a), Value::M(b)) => Value::M(a + b),
            _ => unreachable!("mixed value kinds"),
        }
    }
    fn sub(&self, o: &Value) -> Value {
        match (self, o) {
            (Value::F(a), Value::F(b)) => Value::F(*a - *b),
            (Value::M(a), Value::M(b)) => Value::M(a - b),
            _ => unreachable!("mixed value kinds"),
        }
    }
    fn mul(&self, o: &Value) -> Value {
        match (self, o) {
            (Value::F(a), Value::F(b)) => Value::F(*a * *b),
            (Value::M(a), Value::M(b)) => Value::M(a * b),
            _ => unreachable!("mixed value kinds"),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::F(x) => write!(f, "{}", x.index()),
            Value::M(m) => write!(f, "[{m}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("table has {got} entries, domain has {expected}")]
    TableSize { expected: usize, got: usize },
    #[error("domain and target have different characteristics")]
    Characteristic,
    #[error("malformed map text: {0}")]
    Parse(String),
}

impl MQMap {
    pub fn new(domain: Field, target: Field, table: Table) -> Result<Self, MapError> {
        if domain.characteristic() != target.characteristic() {
            return Err(MapError::Characteristic);
        }
        let got = match &table {
            Table::Field(t) => t.len(),
            Table::End(t) => t.len(),
        };
        if got != domain.order() as usize {
            return Err(MapError::TableSize { expected: domain.order() as usize, got });
        }
        Ok(MQMap { domain, target, table })
    }

    /// `a ↦ f(a)` into the field `target`.
    pub fn from_fn(domain: Field, target: Field, f: impl Fn(Fq) -> Fq) -> Result<Self, MapError> {
        Self::new(domain, target, Table::Field(domain.elements().map(f).collect()))
    }

    pub fn is_end_valued(&self) -> bool {
        matches!(self.table, Table::End(_))
    }

    pub fn field_value(&self, a: Fq) -> Option<Fq> {
        match &self.table {
            Table::Field(t) => Some(t[a.index() as usize]),
            Table::End(_) => None,
        }
    }

    fn value(&self, i: usize) -> Value {
        match &self.table {
            Table::Field(t) => Value::F(t[i]),
            Table::End(t) => Value::M(t[i].clone()),
        }
    }

    fn integer(&self, n: u32) -> Value {
        match &self.table {
            Table::Field(_) => Value::F(self.target.from_int(n as i64)),
            Table::End(_) => Value::M(FpMatrix::scalar(self.target.characteristic(), self.target.degree() as usize, n)),
        }
    }

    /// Exhaustive check of `q(ab) = q(a)q(b)`, `q(n) = n²` on the prime
    /// field and biadditivity of `f(a, b) = q(a+b) − q(a) − q(b)`.
    pub fn verify(&self) -> Verdict {
        let elems: Vec<Fq> = self.domain.elements().collect();
        let vals: Vec<Value> = (0..elems.len()).map(|i| self.value(i)).collect();
        let at = |x: Fq| &vals[x.index() as usize];
        let mut v = Verdict::default();
        'mul: for &a in &elems {
            for &b in &elems {
                if *at(a * b) != at(a).mul(at(b)) {
                    v.multiplicative = Some(format!("q({a}·{b}) = {} but q({a})q({b}) = {}", at(a * b), at(a).mul(at(b))));
                    break 'mul;
                }
            }
        }
        for n in 0..self.domain.characteristic() {
            let x = self.domain.from_int(n as i64);
            if *at(x) != self.integer(n * n) {
                v.integers = Some(format!("q({n}) = {} but {n}² = {}", at(x), self.integer(n * n)));
                break;
            }
        }
        let f = |a: Fq, b: Fq| at(a + b).sub(at(a)).sub(at(b));
        'bi: for &a in &elems {
            for &b in &elems {
                let fab = f(a, b);
                for &c in &elems {
                    let lhs = f(a + c, b);
                    let rhs = fab.add(&f(c, b));
                    if lhs != rhs {
                        v.biadditive = Some(format!("f({a}+{c}, {b}) = {lhs} but f({a},{b}) + f({c},{b}) = {rhs}"));
                        break 'bi;
                    }
                }
            }
        }
        v
    }

    /// Parses the header `K=p^r -> L=p^s` or `K=p^r -> End(p^s)` followed by
    /// lines `a_idx -> q_idx` or `a_idx -> m11 m12 ... (row-major)`.
    pub fn parse(text: &str) -> Result<Self, MapError> {
        let err = |m: &str| MapError::Parse(m.to_string());
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| err("empty input"))?;
        let (lhs, rhs) = header.split_once("->").ok_or_else(|| err("header needs '->'"))?;
        let field_of = |s: &str| -> Result<Field, MapError> {
            let (p, r) = s.trim().split_once('^').ok_or_else(|| err("field order must be p^r"))?;
            let p = p.trim().parse().map_err(|_| err("bad prime"))?;
            let r = r.trim().parse().map_err(|_| err("bad degree"))?;
            Field::new(p, r).map_err(|e| MapError::Parse(e.to_string()))
        };
        let domain = field_of(lhs.trim().strip_prefix("K=").ok_or_else(|| err("header must start with K="))?)?;
        let rhs = rhs.trim();
        let (target, end) = if let Some(inner) = rhs.strip_prefix("End(").and_then(|s| s.strip_suffix(')')) {
            (field_of(inner)?, true)
        } else {
            (field_of(rhs.strip_prefix("L=").ok_or_else(|| err("target must be L=p^s or End(p^s)"))?)?, false)
        };
        let q = domain.order() as usize;
        let mut fvals: Vec<Option<Fq>> = vec![None; q];
        let mut mvals: Vec<Option<FpMatrix>> = vec![None; q];
        for line in lines {
            let (a, v) = line.split_once("->").ok_or_else(|| err(&format!("line {line:?} needs '->'")))?;
            let a: usize = a.trim().parse().map_err(|_| err(&format!("bad index in {line:?}")))?;
            if a >= q {
                return Err(err(&format!("index {a} out of range")));
            }
            if end {
                let entries: Vec<u32> = v
                    .split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse().map_err(|_| err(&format!("bad entry in {line:?}"))))
                    .collect::<Result<_, _>>()?;
                let r = target.degree() as usize;
                mvals[a] = Some(FpMatrix::from_rows(target.characteristic(), r, entries).ok_or_else(|| err(&format!("need {} entries in {line:?}", r * r)))?);
            } else {
                let idx: u64 = v.trim().parse().map_err(|_| err(&format!("bad value in {line:?}")))?;
                fvals[a] = Some(target.element(idx).map_err(|e| MapError::Parse(e.to_string()))?);
            }
        }
        let table = if end {
            Table::End(mvals.into_iter().enumerate().map(|(i, m)| m.ok_or_else(|| err(&format!("missing value for {i}")))).collect::<Result<_, _>>()?)
        } else {
            Table::Field(fvals.into_iter().enumerate().map(|(i, m)| m.ok_or_else(|| err(&format!("missing value for {i}")))).collect::<Result<_, _>>()?)
        };
        Self::new(domain, target, table)
    }
}

impl fmt::Display for MQMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let order = |k: Field| format!("{}^{}", k.characteristic(), k.degree());
        match &self.table {
            Table::Field(t) => {
                writeln!(f, "K={} -> L={}", order(self.domain), order(self.target))?;
                for (i, v) in t.iter().enumerate() {
                    writeln!(f, "{i} -> {}", v.index())?;
                }
            }
            Table::End(t) => {
                writeln!(f, "K={} -> End({})", order(self.domain), order(self.target))?;
                for (i, m) in t.iter().enumerate() {
                    writeln!(f, "{i} -> {m}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squaring_is_valid() {
        let f5 = Field::of_order(5).unwrap();
        assert!(MQMap::from_fn(f5, f5, |x| x * x).unwrap().verify().valid());
    }

    #[test]
    fn norm_from_f9_is_valid() {
        let (f9, f3) = (Field::of_order(9).unwrap(), Field::of_order(3).unwrap());
        let emb = f3.embedding_into(f9).unwrap();
        let m = MQMap::from_fn(f9, f3, |x| emb.preimage(x.pow(4)).expect("x⁴ lies in F_3")).unwrap();
        assert!(m.verify().valid());
    }

    #[test]
    fn cubing_on_f5_is_not_biadditive() {
        let f5 = Field::of_order(5).unwrap();
        let v = MQMap::from_fn(f5, f5, |x| x.pow(3)).unwrap().verify();
        assert!(v.multiplicative.is_none());
        assert!(v.integers.is_some());
        assert!(v.biadditive.is_some());
    }

    #[test]
    fn text_roundtrip() {
        let f4 = Field::of_order(4).unwrap();
        let m = MQMap::from_fn(f4, f4, |x| x * x).unwrap();
        assert_eq!(MQMap::parse(&m.to_string()).unwrap(), m);
        let f9 = Field::of_order(9).unwrap();
        let e = MQMap::new(f9, f9, Table::End(f9.elements().map(|x| FpMatrix::right_mul(x * x)).collect())).unwrap();
        assert_eq!(MQMap::parse(&e.to_string()).unwrap(), e);
        assert!(e.verify().valid());
        assert!(MQMap::parse("K=3^1 -> L=3^1\n0 -> 0\n").is_err());
    }
}
