//! Compositional family descriptors such as
//! `free-product(free-abelian(1), free-abelian(1))`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Free(usize),
    FreeAbelian(usize),
    Cyclic(u64),
    FreeProduct(Vec<Family>),
    DirectProduct(Vec<Family>),
}

impl Family {
    /// Number of generators (not counting formal inverses).
    pub fn rank(&self) -> usize {
        match self {
            Family::Free(n) | Family::FreeAbelian(n) => *n,
            Family::Cyclic(_) => 1,
            Family::FreeProduct(fs) | Family::DirectProduct(fs) => fs.iter().map(Family::rank).sum(),
        }
    }

    pub fn factors(&self) -> &[Family] {
        match self {
            Family::FreeProduct(fs) | Family::DirectProduct(fs) => fs,
            _ => &[],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, name: &str, fs: &[Family]| {
            write!(f, "{name}(")?;
            for (i, x) in fs.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")
        };
        match self {
            Family::Free(n) => write!(f, "free({n})"),
            Family::FreeAbelian(n) => write!(f, "free-abelian({n})"),
            Family::Cyclic(n) => write!(f, "cyclic({n})"),
            Family::FreeProduct(fs) => list(f, "free-product", fs),
            Family::DirectProduct(fs) => list(f, "direct-product", fs),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
        };
        let fam = p.family()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(fam)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::usage(format!("cannot parse family descriptor at byte {}: {msg}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn ident(&mut self) -> Result<&str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'-') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a family name"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii")
            .parse()
            .map_err(|_| self.error("expected a natural number"))
    }

    fn family(&mut self) -> Result<Family> {
        let name = self.ident()?.to_ascii_lowercase();
        self.expect(b'(')?;
        let fam = match name.as_str() {
            "free" => Family::Free(self.number()? as usize),
            "free-abelian" => Family::FreeAbelian(self.number()? as usize),
            "cyclic" => {
                let n = self.number()?;
                if n == 0 {
                    return Err(self.error("cyclic order must be at least 1"));
                }
                Family::Cyclic(n)
            }
            "free-product" | "direct-product" => {
                let mut fs = vec![self.family()?];
                loop {
                    self.skip_ws();
                    if self.src.get(self.pos) == Some(&b',') {
                        self.pos += 1;
                        fs.push(self.family()?);
                    } else {
                        break;
                    }
                }
                if name == "free-product" {
                    Family::FreeProduct(fs)
                } else {
                    Family::DirectProduct(fs)
                }
            }
            other => return Err(self.error(&format!("unknown family `{other}`"))),
        };
        self.expect(b')')?;
        Ok(fam)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        let f: Family = "free-product( free-abelian(1) , free-abelian(1))".parse().unwrap();
        assert_eq!(f.to_string(), "free-product(free-abelian(1),free-abelian(1))");
        assert_eq!(f.rank(), 2);
        let g: Family = f.to_string().parse().unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn nested_products() {
        let f: Family = "direct-product(free(2),cyclic(3),free-product(cyclic(2),cyclic(3)))"
            .parse()
            .unwrap();
        assert_eq!(f.rank(), 5);
    }

    #[test]
    fn rejects_garbage() {
        assert!("free(2".parse::<Family>().is_err());
        assert!("cyclic(0)".parse::<Family>().is_err());
        assert!("torus(2)".parse::<Family>().is_err());
        assert!("free(2) x".parse::<Family>().is_err());
    }
}
