use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::monomial::Monomial;
use super::vars::{Parity, VarId, VarSpec, VarTable, HBAR};

/// Parity of a polynomial as a whole.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Grading {
    Even,
    Odd,
    Mixed,
}

impl Grading {
    pub fn parity(self) -> Option<Parity> {
        match self {
            Grading::Even => Some(Parity::Even),
            Grading::Odd => Some(Parity::Odd),
            Grading::Mixed => None,
        }
    }
}

/// Exact polynomial in even (possibly Laurent) and odd variables and `hbar`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GradedPoly {
    terms: BTreeMap<Monomial, Scalar>,
}

impl GradedPoly {
    pub fn zero() -> Self {
        GradedPoly::default()
    }

    pub fn one() -> Self {
        GradedPoly::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        GradedPoly::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> Self {
        GradedPoly::constant(Scalar::from_int(n))
    }

    pub fn hbar() -> Self {
        GradedPoly::term(Scalar::one(), Monomial::hbar_power(1))
    }

    pub fn term(c: Scalar, m: Monomial) -> Self {
        let mut p = GradedPoly::zero();
        p.add_term(m, c);
        p
    }

    pub fn var(spec: &VarSpec) -> Self {
        let m = match spec.parity {
            Parity::Even => Monomial::even_var(spec.id(), 1),
            Parity::Odd => Monomial::odd_var(spec.id()),
        };
        GradedPoly::term(Scalar::one(), m)
    }

    /// `x^exp`; negative exponents need an invertible even variable.
    pub fn var_pow(spec: &VarSpec, exp: i32) -> Result<Self> {
        match spec.parity {
            Parity::Odd => match exp {
                0 => Ok(GradedPoly::one()),
                1 => Ok(GradedPoly::var(spec)),
                e if e < 0 => Err(Error::IllegalDivision(spec.name.clone())),
                _ => Ok(GradedPoly::zero()),
            },
            Parity::Even => {
                if exp < 0 && !spec.invertible {
                    return Err(Error::IllegalDivision(spec.name.clone()));
                }
                Ok(GradedPoly::term(Scalar::one(), Monomial::even_var(spec.id(), exp)))
            }
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut p = GradedPoly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Scalar)> {
        self.terms.into_iter()
    }

    /// The constant (hbar-free, variable-free) coefficient.
    pub fn constant_term(&self) -> Scalar {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_default()
    }

    /// Returns the scalar if this polynomial is a constant.
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return GradedPoly::zero();
        }
        GradedPoly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, c: &Scalar, m: &Monomial) -> Self {
        let mut out = GradedPoly::zero();
        for (n, k) in &self.terms {
            if let Some((s, prod)) = n.mul(m) {
                let coeff = k * c;
                out.add_term(prod, if s < 0 { -coeff } else { coeff });
            }
        }
        out
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = GradedPoly::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `even` when every term has an even number of odd factors, etc.; zero counts as even.
    pub fn parity_of(&self) -> Grading {
        let mut seen_even = false;
        let mut seen_odd = false;
        for m in self.terms.keys() {
            match m.parity() {
                Parity::Even => seen_even = true,
                Parity::Odd => seen_odd = true,
            }
        }
        match (seen_even, seen_odd) {
            (_, false) => Grading::Even,
            (false, true) => Grading::Odd,
            (true, true) => Grading::Mixed,
        }
    }

    /// Splits into even and odd homogeneous parts.
    pub fn homogeneous_parts(&self) -> (GradedPoly, GradedPoly) {
        let mut even = GradedPoly::zero();
        let mut odd = GradedPoly::zero();
        for (m, c) in &self.terms {
            match m.parity() {
                Parity::Even => even.terms.insert(m.clone(), c.clone()),
                Parity::Odd => odd.terms.insert(m.clone(), c.clone()),
            };
        }
        (even, odd)
    }

    /// Coefficient of `hbar^k`, as an hbar-free polynomial.
    pub fn hbar_coefficient(&self, k: u32) -> GradedPoly {
        GradedPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.hbar() == k)
                .map(|(m, c)| (m.without_hbar(), c.clone()))
                .collect(),
        }
    }

    /// Multiplies by `hbar^k`.
    pub fn shift_hbar(&self, k: u32) -> GradedPoly {
        GradedPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.with_hbar(m.hbar() + k), c.clone()))
                .collect(),
        }
    }

    pub fn max_hbar(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.hbar()).max()
    }

    pub fn mentions(&self, id: VarId) -> bool {
        self.terms.keys().any(|m| m.mentions(id))
    }

    /// Variables occurring anywhere in the polynomial, ascending.
    pub fn variables(&self) -> Vec<VarId> {
        let mut out: Vec<VarId> = self
            .terms
            .keys()
            .flat_map(|m| m.factors().into_iter().map(|(v, _)| v))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Largest total degree among the terms (odd factors count 1).
    pub fn degree(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// Renders with the table's variable names.
    pub fn display<'a>(&'a self, table: &'a VarTable) -> PolyDisplay<'a> {
        PolyDisplay {
            poly: self,
            table,
            aliases: None,
        }
    }

    pub fn render(&self, table: &VarTable) -> String {
        self.display(table).to_string()
    }

    /// Terms in rendering order: ascending hbar power, then descending total
    /// degree, then descending lexicographic exponent vector.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &Scalar)> {
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| render_order(a, b));
        terms
    }
}

fn render_order(a: &Monomial, b: &Monomial) -> Ordering {
    a.hbar()
        .cmp(&b.hbar())
        .then_with(|| b.degree().cmp(&a.degree()))
        .then_with(|| {
            let fa = a.factors();
            let fb = b.factors();
            for (x, y) in fa.iter().zip(fb.iter()) {
                // an earlier variable with a larger exponent sorts first
                let c = x.0.cmp(&y.0).then_with(|| y.1.cmp(&x.1));
                if c != Ordering::Equal {
                    return c;
                }
            }
            fb.len().cmp(&fa.len())
        })
}

pub struct PolyDisplay<'a> {
    poly: &'a GradedPoly,
    table: &'a VarTable,
    aliases: Option<&'a BTreeMap<String, String>>,
}

impl<'a> PolyDisplay<'a> {
    pub fn with_aliases(mut self, aliases: &'a BTreeMap<String, String>) -> Self {
        self.aliases = Some(aliases);
        self
    }

    fn name(&self, id: VarId) -> &str {
        let name = self.table.get(id).name.as_str();
        self.aliases
            .and_then(|a| a.get(name))
            .map(|s| s.as_str())
            .unwrap_or(name)
    }
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.poly.sorted_terms().into_iter().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            let mut factors: Vec<String> = Vec::new();
            if m.hbar() > 0 {
                factors.push(if m.hbar() == 1 {
                    HBAR.to_string()
                } else {
                    format!("{HBAR}^{}", m.hbar())
                });
            }
            for (v, e) in m.factors() {
                let name = self.name(v);
                factors.push(if e == 1 { name.to_string() } else { format!("{name}^{e}") });
            }
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                f.write_str(&factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a GradedPoly> for &'a GradedPoly {
    type Output = GradedPoly;
    fn add(self, rhs: &'a GradedPoly) -> GradedPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a GradedPoly> for &'a GradedPoly {
    type Output = GradedPoly;
    fn sub(self, rhs: &'a GradedPoly) -> GradedPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a> Mul<&'a GradedPoly> for &'a GradedPoly {
    type Output = GradedPoly;
    fn mul(self, rhs: &'a GradedPoly) -> GradedPoly {
        mul(self, rhs)
    }
}

impl Add for GradedPoly {
    type Output = GradedPoly;
    fn add(mut self, rhs: GradedPoly) -> GradedPoly {
        self += &rhs;
        self
    }
}

impl Sub for GradedPoly {
    type Output = GradedPoly;
    fn sub(mut self, rhs: GradedPoly) -> GradedPoly {
        self -= &rhs;
        self
    }
}

impl Mul for GradedPoly {
    type Output = GradedPoly;
    fn mul(self, rhs: GradedPoly) -> GradedPoly {
        mul(&self, &rhs)
    }
}

impl AddAssign<&GradedPoly> for GradedPoly {
    fn add_assign(&mut self, rhs: &GradedPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&GradedPoly> for GradedPoly {
    fn sub_assign(&mut self, rhs: &GradedPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl Neg for GradedPoly {
    type Output = GradedPoly;
    fn neg(self) -> GradedPoly {
        GradedPoly {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl Neg for &GradedPoly {
    type Output = GradedPoly;
    fn neg(self) -> GradedPoly {
        -self.clone()
    }
}

/// Supercommutative product; odd factors are reordered canonically with Koszul signs.
pub fn mul(a: &GradedPoly, b: &GradedPoly) -> GradedPoly {
    let mut out = GradedPoly::zero();
    for (ma, ca) in &a.terms {
        for (mb, cb) in &b.terms {
            if let Some((sign, m)) = ma.mul(mb) {
                let c = ca * cb;
                out.add_term(m, if sign < 0 { -c } else { c });
            }
        }
    }
    out
}

pub fn parity_of(a: &GradedPoly) -> Grading {
    a.parity_of()
}
