use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::monomial::Monomial;
use super::poly::{GradedPoly, Grading};
use super::vars::{Parity, VarId, VarTable};

#[derive(Clone, Debug, PartialEq)]
struct Image {
    poly: GradedPoly,
    inverse: Option<GradedPoly>,
}

/// Simultaneous substitution from the variables of one table into polynomials
/// over another (possibly the same) table.
#[derive(Clone, Debug, PartialEq)]
pub struct Substitution {
    from: VarTable,
    to: VarTable,
    images: Vec<Option<Image>>,
}

impl Substitution {
    /// Every variable maps to itself.
    pub fn identity(table: &VarTable) -> Self {
        Substitution::by_name(table, table)
    }

    /// Variables present in both tables map to their namesakes; the rest are unset.
    pub fn by_name(from: &VarTable, to: &VarTable) -> Self {
        let images = from
            .iter()
            .map(|v| {
                to.lookup(&v.name).filter(|w| w.parity == v.parity).map(|w| {
                    let poly = GradedPoly::var(w);
                    let inverse = if w.invertible {
                        Some(GradedPoly::term(Scalar::one(), Monomial::even_var(w.id(), -1)))
                    } else {
                        None
                    };
                    Image { poly, inverse }
                })
            })
            .collect();
        Substitution {
            from: from.clone(),
            to: to.clone(),
            images,
        }
    }

    /// No variable has an image yet.
    pub fn empty(from: &VarTable, to: &VarTable) -> Self {
        Substitution {
            from: from.clone(),
            to: to.clone(),
            images: vec![None; from.len()],
        }
    }

    pub fn from_table(&self) -> &VarTable {
        &self.from
    }

    pub fn to_table(&self) -> &VarTable {
        &self.to
    }

    /// Sets the image of `name`, checking parity.
    pub fn set(&mut self, name: &str, image: GradedPoly) -> Result<()> {
        let spec = self.from.spec(name)?;
        let id = spec.id();
        match (image.parity_of(), spec.parity) {
            (Grading::Even, Parity::Even) | (Grading::Odd, Parity::Odd) => {}
            (g, p) if !(image.is_zero() && g == Grading::Even) => {
                return Err(Error::ParityMismatch(format!(
                    "`{name}` is {p} but its replacement is {}",
                    match g {
                        Grading::Even => "even",
                        Grading::Odd => "odd",
                        Grading::Mixed => "mixed",
                    }
                )))
            }
            _ => {}
        }
        let inverse = if spec.parity == Parity::Even {
            try_inverse(&image, &self.to)
        } else {
            None
        };
        self.images[id.index()] = Some(Image { poly: image, inverse });
        Ok(())
    }

    pub fn with(mut self, name: &str, image: GradedPoly) -> Result<Self> {
        self.set(name, image)?;
        Ok(self)
    }

    pub fn image(&self, id: VarId) -> Option<&GradedPoly> {
        self.images.get(id.index()).and_then(|i| i.as_ref()).map(|i| &i.poly)
    }

    pub fn image_of(&self, name: &str) -> Option<&GradedPoly> {
        self.from.id(name).ok().and_then(|id| self.image(id))
    }

    pub fn apply(&self, a: &GradedPoly) -> Result<GradedPoly> {
        let mut powers: HashMap<(VarId, i32), GradedPoly> = HashMap::new();
        let mut out = GradedPoly::zero();
        for (m, c) in a.terms() {
            let mut acc = GradedPoly::term(c.clone(), Monomial::hbar_power(m.hbar()));
            for &(v, e) in m.even() {
                let p = self.power(v, e, &mut powers)?;
                acc = &acc * &p;
                if acc.is_zero() {
                    break;
                }
            }
            for &v in m.odd() {
                if acc.is_zero() {
                    break;
                }
                acc = &acc * &self.require(v)?.poly;
            }
            out += &acc;
        }
        Ok(out)
    }

    /// `next` after `self`: variables of `self.from` to polynomials over `next.to`.
    pub fn then(&self, next: &Substitution) -> Result<Substitution> {
        if self.to != next.from {
            return Err(Error::VariableMismatch(
                "composition needs matching intermediate tables".into(),
            ));
        }
        let mut out = Substitution::empty(&self.from, &next.to);
        for spec in self.from.iter() {
            if let Some(img) = self.image(spec.id()) {
                out.set(&spec.name, next.apply(img)?)?;
            }
        }
        Ok(out)
    }

    /// True when every variable of `from` maps to its namesake in `to`.
    pub fn is_identity(&self) -> bool {
        self.from.iter().all(|v| match (self.image(v.id()), self.to.lookup(&v.name)) {
            (Some(img), Some(w)) => *img == GradedPoly::var(w),
            _ => false,
        })
    }

    fn require(&self, v: VarId) -> Result<&Image> {
        self.images[v.index()]
            .as_ref()
            .ok_or_else(|| Error::UnknownVariable(self.from.get(v).name.clone()))
    }

    fn power(&self, v: VarId, e: i32, cache: &mut HashMap<(VarId, i32), GradedPoly>) -> Result<GradedPoly> {
        if let Some(p) = cache.get(&(v, e)) {
            return Ok(p.clone());
        }
        let img = self.require(v)?;
        let p = if e >= 0 {
            img.poly.pow(e as u32)
        } else {
            let inv = img
                .inverse
                .as_ref()
                .ok_or_else(|| Error::NonInvertibleSubstitution(self.from.get(v).name.clone()))?;
            inv.pow((-e) as u32)
        };
        cache.insert((v, e), p.clone());
        Ok(p)
    }
}

/// Inverse of `c * m * (1 + n)` with `m` a Laurent monomial in invertible
/// variables and `n` nilpotent; `None` when `p` has no such form.
pub fn try_inverse(p: &GradedPoly, table: &VarTable) -> Option<GradedPoly> {
    let mut body = p.terms().filter(|(m, _)| m.odd().is_empty());
    let (m, c) = body.next()?;
    if body.next().is_some() || m.hbar() != 0 {
        return None;
    }
    if m.even().iter().any(|(v, _)| !table.get(*v).invertible) {
        return None;
    }
    let m_inv = m.inverse()?;
    let c_inv = c.recip()?;
    let lead_inv = GradedPoly::term(c_inv, m_inv);
    let lead = GradedPoly::term(c.clone(), m.clone());
    // n = lead^-1 * (p - lead); every term carries an odd factor
    let n = &lead_inv * &(p - &lead);
    let mut sum = GradedPoly::one();
    let mut power = GradedPoly::one();
    let minus_n = -&n;
    loop {
        power = &power * &minus_n;
        if power.is_zero() {
            break;
        }
        sum += &power;
    }
    Some(&lead_inv * &sum)
}

/// Same-table substitution given by variable names.
pub fn substitute(table: &VarTable, a: &GradedPoly, map: &[(&str, GradedPoly)]) -> Result<GradedPoly> {
    let mut s = Substitution::identity(table);
    for (name, img) in map {
        s.set(name, img.clone())?;
    }
    s.apply(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> VarTable {
        VarTable::builder()
            .even("x")
            .invertible("lp")
            .invertible("lm")
            .odd("t")
            .odd("e")
            .constant("a")
            .build()
            .unwrap()
    }

    fn v(t: &VarTable, n: &str) -> GradedPoly {
        GradedPoly::var(t.spec(n).unwrap())
    }

    #[test]
    fn laurent_image_inverts() {
        let t = table();
        let lm2 = GradedPoly::var_pow(t.spec("lm").unwrap(), 2).unwrap();
        let inv = GradedPoly::var_pow(t.spec("lp").unwrap(), -1).unwrap();
        let out = substitute(&t, &lm2, &[("lm", inv)]).unwrap();
        assert_eq!(out, GradedPoly::var_pow(t.spec("lp").unwrap(), -2).unwrap());
    }

    #[test]
    fn nilpotent_shift_squares() {
        let t = table();
        let te = &v(&t, "t") * &v(&t, "e");
        let img = &v(&t, "x") - &(&v(&t, "a") * &te);
        let out = substitute(&t, &v(&t, "x").pow(2), &[("x", img)]).unwrap();
        let expect = &v(&t, "x").pow(2) - &(&GradedPoly::int(2) * &(&(&v(&t, "a") * &v(&t, "x")) * &te));
        assert_eq!(out, expect);
    }

    #[test]
    fn unit_times_nilpotent_inverts() {
        let t = table();
        let te = &v(&t, "t") * &v(&t, "e");
        let p = &v(&t, "lp") * &(&GradedPoly::one() + &te);
        let inv = try_inverse(&p, &t).unwrap();
        assert_eq!(&p * &inv, GradedPoly::one());
        assert!(try_inverse(&v(&t, "x"), &t).is_none());
        assert!(try_inverse(&(&v(&t, "lp") + &v(&t, "lm")), &t).is_none());
    }

    #[test]
    fn parity_is_checked() {
        let t = table();
        let err = substitute(&t, &v(&t, "x"), &[("x", v(&t, "t"))]).unwrap_err();
        assert!(matches!(err, Error::ParityMismatch(_)));
        let lm_inv = GradedPoly::var_pow(t.spec("lm").unwrap(), -1).unwrap();
        let err = substitute(&t, &lm_inv, &[("lm", &v(&t, "x") + &v(&t, "lp"))]).unwrap_err();
        assert!(matches!(err, Error::NonInvertibleSubstitution(_)));
    }
}
