use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{NamedArc, NamedFamily, PolyDecl, Scenario};
use crate::arcs::{Arc, ArcFamily, FamilyImage, LinearExponent};
use crate::error::{Error, Result};
use crate::symcore::{FormalSeries, Polynomial, Rational};

/// Character cursor over one line; columns are 1-based.
struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    vars: &'a [String],
}

impl<'a> Cursor<'a> {
    fn new(text: &str, line: usize, vars: &'a [String]) -> Self {
        Cursor {
            chars: text.chars().collect(),
            pos: 0,
            line,
            vars,
        }
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: pos + 1,
            message: message.into(),
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        self.error_at(self.pos, message)
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        let end = self.pos + s.chars().count();
        if end <= self.chars.len() && self.chars[self.pos..end].iter().copied().eq(s.chars()) {
            self.pos = end;
            true
        } else {
            false
        }
    }

    fn expect_str(&mut self, s: &str) -> Result<()> {
        if self.eat_str(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{s}'")))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        match self.chars.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() || *c == '_' => {}
            _ => return Err(self.error("expected a name")),
        }
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
        {
            self.pos += 1;
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn keyword(&mut self, word: &str) -> Result<()> {
        let at = {
            self.skip_ws();
            self.pos
        };
        match self.ident() {
            Ok(w) if w == word => Ok(()),
            _ => Err(self.error_at(at, format!("expected '{word}'"))),
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(char::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        Ok(s.parse().expect("digits"))
    }

    fn small_integer<T: TryFrom<BigInt>>(&mut self, what: &str) -> Result<T> {
        self.skip_ws();
        let at = self.pos;
        let n = self.integer()?;
        T::try_from(n).map_err(|_| self.error_at(at, format!("{what} out of range")))
    }

    fn signed_integer(&mut self) -> Result<i64> {
        let negative = self.eat('-');
        let n: i64 = self.small_integer("integer")?;
        Ok(if negative { -n } else { n })
    }

    /// `p` or `p/q`; there is no division operator, so a slash directly
    /// after an integer always continues the literal.
    fn rational(&mut self) -> Result<Rational> {
        let p = self.integer()?;
        if self.chars.get(self.pos) == Some(&'/') {
            self.pos += 1;
            let at = self.pos;
            let q = self.integer()?;
            if q.is_zero() {
                return Err(self.error_at(at, "zero denominator"));
            }
            return Ok(Rational::new(p, q));
        }
        Ok(Rational::from_integer(p))
    }

    fn starts_number(&mut self) -> bool {
        self.peek().is_some_and(|c| c.is_ascii_digit())
    }

    // polynomial expressions

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        while self.eat('*') {
            acc = acc.mul(&self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat('+') {
            return self.unary();
        }
        let base = self.primary()?;
        if self.eat('^') {
            let k: u32 = self.small_integer("exponent")?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Polynomial> {
        let n = self.vars.len();
        if self.eat('(') {
            let e = self.expr()?;
            self.expect(')')?;
            return Ok(e);
        }
        if self.starts_number() {
            return Ok(Polynomial::constant(n, self.rational()?));
        }
        self.skip_ws();
        let at = self.pos;
        let name = self
            .ident()
            .map_err(|_| self.error_at(at, "expected a number, a variable or '('"))?;
        match self.vars.iter().position(|v| *v == name) {
            Some(i) => Ok(Polynomial::var(n, i)),
            None => Err(self.error_at(at, format!("undeclared variable '{name}'"))),
        }
    }

    // series in t

    fn series(&mut self) -> Result<FormalSeries> {
        let mut acc = self.series_term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.series_term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.series_term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn series_term(&mut self) -> Result<FormalSeries> {
        self.skip_ws();
        let at = self.pos;
        let negative = self.eat('-');
        let mut coeff = Rational::one();
        if self.starts_number() {
            coeff = self.rational()?;
            if !self.eat('*') {
                if coeff.is_zero() {
                    return Ok(FormalSeries::zero());
                }
                return Err(self.error_at(at, "arc images must vanish at t = 0"));
            }
        }
        self.t_symbol()?;
        let e: u32 = if self.eat('^') {
            self.small_integer("exponent")?
        } else {
            1
        };
        if e == 0 {
            return Err(self.error_at(at, "arc images must vanish at t = 0"));
        }
        if negative {
            coeff = -coeff;
        }
        Ok(FormalSeries::monomial(coeff, e))
    }

    fn t_symbol(&mut self) -> Result<()> {
        self.skip_ws();
        let at = self.pos;
        match self.ident() {
            Ok(w) if w == "t" => Ok(()),
            _ => Err(self.error_at(at, "expected 't'")),
        }
    }

    // family images

    fn family_image(&mut self) -> Result<FamilyImage> {
        let negative = self.eat('-');
        let mut coeff = Rational::one();
        if self.starts_number() {
            coeff = self.rational()?;
            self.expect('*')?;
        }
        if negative {
            coeff = -coeff;
        }
        self.t_symbol()?;
        let exponent = if self.eat('^') {
            if self.eat('(') {
                let lin = self.linear()?;
                self.expect(')')?;
                lin
            } else {
                LinearExponent::constant(self.small_integer("exponent")?)
            }
        } else {
            LinearExponent::constant(1)
        };
        Ok(FamilyImage::new(coeff, exponent))
    }

    /// Integer-linear form in `N`.
    fn linear(&mut self) -> Result<LinearExponent> {
        let mut acc = LinearExponent::new(0, 0);
        let mut sign = if self.eat('-') {
            -1
        } else {
            self.eat('+');
            1
        };
        loop {
            let (a, b) = self.linear_term()?;
            acc.slope += sign * a;
            acc.offset += sign * b;
            if self.eat('+') {
                sign = 1;
            } else if self.eat('-') {
                sign = -1;
            } else {
                return Ok(acc);
            }
        }
    }

    fn linear_term(&mut self) -> Result<(i64, i64)> {
        if self.starts_number() {
            let k: i64 = self.small_integer("coefficient")?;
            if self.eat('*') {
                self.keyword("N")?;
                return Ok((k, 0));
            }
            return Ok((0, k));
        }
        self.keyword("N")?;
        if self.eat('*') {
            let k: i64 = self.small_integer("coefficient")?;
            return Ok((k, 0));
        }
        Ok((1, 0))
    }
}

/// Parses one polynomial expression over the given variables.
pub fn parse_polynomial(text: &str, vars: &[String]) -> Result<Polynomial> {
    let mut c = Cursor::new(text, 1, vars);
    let p = c.expr()?;
    if !c.at_end() {
        return Err(c.error("unexpected input after expression"));
    }
    Ok(p)
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut sc = Scenario::default();
    let mut have_vars = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let vars = sc.variables.clone();
        let mut c = Cursor::new(body, line_no, &vars);
        c.skip_ws();
        let at = c.pos;
        let kw = c.ident().map_err(|_| c.error_at(at, "expected a declaration"))?;
        if kw != "vars" && !have_vars {
            return Err(c.error_at(at, "'vars' must come first"));
        }
        match kw.as_str() {
            "vars" => {
                if have_vars {
                    return Err(c.error_at(at, "variables already declared"));
                }
                let mut names = Vec::new();
                while !c.at_end() {
                    let p = c.pos;
                    let name = c.ident()?;
                    if names.contains(&name) {
                        return Err(c.error_at(p, format!("duplicate variable '{name}'")));
                    }
                    names.push(name);
                }
                if names.is_empty() {
                    return Err(c.error("expected at least one variable"));
                }
                sc.variables = names;
                have_vars = true;
            }
            "poly" => parse_poly_line(&mut c, &mut sc)?,
            "arc" => parse_arc_line(&mut c, &mut sc)?,
            "family" => parse_family_line(&mut c, &mut sc)?,
            "set" => parse_set_line(&mut c, &mut sc)?,
            _ => {
                return Err(c.error_at(at, "expected one of vars, poly, arc, family, set"));
            }
        }
        if !c.at_end() {
            return Err(c.error("unexpected input at end of line"));
        }
    }
    if !have_vars {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "missing 'vars' declaration".into(),
        });
    }
    Ok(sc)
}

fn parse_poly_line(c: &mut Cursor<'_>, sc: &mut Scenario) -> Result<()> {
    c.skip_ws();
    let at = c.pos;
    let name = c.ident()?;
    if c.eat(':') {
        c.keyword("weight")?;
        c.skip_ws();
        let wat = c.pos;
        let w: u32 = c.small_integer("weight")?;
        if w == 0 {
            return Err(c.error_at(wat, "weight must be positive"));
        }
        let decl = sc
            .polys
            .iter_mut()
            .find(|p| p.name == name)
            .ok_or_else(|| c.error_at(at, format!("unknown polynomial '{name}'")))?;
        decl.weight = Some(w);
        return Ok(());
    }
    c.expect('=')?;
    if sc.polys.iter().any(|p| p.name == name) {
        return Err(c.error_at(at, format!("duplicate polynomial '{name}'")));
    }
    c.skip_ws();
    let eat = c.pos;
    let poly = c.expr()?;
    if poly.is_zero() {
        return Err(c.error_at(eat, "polynomial is zero"));
    }
    if !poly.constant_term().is_zero() {
        return Err(c.error_at(eat, "polynomial must vanish at the origin"));
    }
    sc.polys.push(PolyDecl {
        name,
        poly,
        weight: None,
    });
    Ok(())
}

/// `var -> item, var -> item, …`, returning the variable index and the
/// column of each entry.
fn mapping<T>(
    c: &mut Cursor<'_>,
    mut item: impl FnMut(&mut Cursor<'_>) -> Result<T>,
) -> Result<Vec<(usize, usize, T)>> {
    let mut out: Vec<(usize, usize, T)> = Vec::new();
    loop {
        c.skip_ws();
        let at = c.pos;
        let name = c.ident()?;
        let v = c
            .vars
            .iter()
            .position(|x| *x == name)
            .ok_or_else(|| c.error_at(at, format!("undeclared variable '{name}'")))?;
        if out.iter().any(|(w, _, _)| *w == v) {
            return Err(c.error_at(at, format!("variable '{name}' mapped twice")));
        }
        c.expect_str("->")?;
        let value = item(c)?;
        out.push((v, at, value));
        if !c.eat(',') {
            return Ok(out);
        }
    }
}

fn parse_arc_line(c: &mut Cursor<'_>, sc: &mut Scenario) -> Result<()> {
    c.skip_ws();
    let at = c.pos;
    let name = c.ident()?;
    if sc.arcs.iter().any(|a| a.name == name) {
        return Err(c.error_at(at, format!("duplicate arc '{name}'")));
    }
    c.expect(':')?;
    let entries = mapping(c, |c| c.series())?;
    let mut images = vec![FormalSeries::zero(); sc.variables.len()];
    for (v, _, s) in entries {
        images[v] = s;
    }
    let arc = Arc::new(images).map_err(|e| c.error_at(at, e.to_string()))?;
    sc.arcs.push(NamedArc { name, arc });
    Ok(())
}

fn parse_family_line(c: &mut Cursor<'_>, sc: &mut Scenario) -> Result<()> {
    c.skip_ws();
    let at = c.pos;
    let name = c.ident()?;
    if sc.families.iter().any(|f| f.name == name) {
        return Err(c.error_at(at, format!("duplicate family '{name}'")));
    }
    c.keyword("over")?;
    c.keyword("N")?;
    c.keyword("in")?;
    let lo = c.signed_integer()?;
    c.expect_str("..")?;
    let hi = c.signed_integer()?;
    c.expect(':')?;
    let entries = mapping(c, |c| c.family_image())?;
    let mut images: Vec<Option<FamilyImage>> = vec![None; sc.variables.len()];
    for (v, col, img) in entries {
        if img.coeff.is_zero() {
            return Err(c.error_at(col, "coefficient must be nonzero"));
        }
        images[v] = Some(img);
    }
    let family = ArcFamily::new(images, (lo, hi)).map_err(|e| c.error_at(at, e.to_string()))?;
    sc.families.push(NamedFamily { name, family });
    Ok(())
}

fn parse_set_line(c: &mut Cursor<'_>, sc: &mut Scenario) -> Result<()> {
    c.skip_ws();
    let at = c.pos;
    let key = c.ident()?;
    c.skip_ws();
    let vat = c.pos;
    match key.as_str() {
        "prec" => sc.options.prec = Some(c.small_integer("precision")?),
        "cap" => sc.options.cap = Some(c.small_integer("cap")?),
        "max_steps" => sc.options.max_steps = Some(c.small_integer("step count")?),
        _ => return Err(c.error_at(at, "expected one of prec, cap, max_steps")),
    }
    let zero = match key.as_str() {
        "prec" => sc.options.prec == Some(0),
        "cap" => sc.options.cap == Some(0),
        _ => sc.options.max_steps == Some(0),
    };
    if zero {
        return Err(c.error_at(vat, "value must be positive"));
    }
    Ok(())
}

/// Parses an integer-linear form in `N` such as `2*N+3`.
pub fn parse_linear_exponent(text: &str) -> Result<LinearExponent> {
    let vars: [String; 0] = [];
    let mut c = Cursor::new(text, 1, &vars);
    let lin = c.linear()?;
    if !c.at_end() {
        return Err(c.error("unexpected input after linear form"));
    }
    Ok(lin)
}
