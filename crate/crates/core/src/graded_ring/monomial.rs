use smallvec::SmallVec;

use super::vars::{Parity, VarId};

/// `hbar^k * prod x_i^{e_i} * theta_{j1} ... theta_{jm}` with `j1 < ... < jm`.
///
/// Field order matters: the derived `Ord` is the storage order of polynomial terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    hbar: u32,
    even: SmallVec<[(VarId, i32); 4]>,
    odd: SmallVec<[VarId; 4]>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn hbar_power(k: u32) -> Self {
        Monomial {
            hbar: k,
            ..Monomial::default()
        }
    }

    pub fn even_var(id: VarId, exp: i32) -> Self {
        let mut m = Monomial::default();
        if exp != 0 {
            m.even.push((id, exp));
        }
        m
    }

    pub fn odd_var(id: VarId) -> Self {
        let mut m = Monomial::default();
        m.odd.push(id);
        m
    }

    /// Builds a canonical monomial; odd factors are given in written order.
    /// Returns the reordering sign, or `None` when an odd factor repeats.
    pub fn from_parts(
        hbar: u32,
        even: impl IntoIterator<Item = (VarId, i32)>,
        odd_in_written_order: &[VarId],
    ) -> Option<(i8, Monomial)> {
        let mut m = Monomial::hbar_power(hbar);
        for (id, e) in even {
            m = m.mul(&Monomial::even_var(id, e))?.1;
        }
        let mut sign = 1i8;
        for id in odd_in_written_order {
            let (s, next) = m.mul(&Monomial::odd_var(*id))?;
            sign *= s;
            m = next;
        }
        Some((sign, m))
    }

    pub fn hbar(&self) -> u32 {
        self.hbar
    }

    pub fn even(&self) -> &[(VarId, i32)] {
        &self.even
    }

    pub fn odd(&self) -> &[VarId] {
        &self.odd
    }

    pub fn is_one(&self) -> bool {
        self.hbar == 0 && self.even.is_empty() && self.odd.is_empty()
    }

    pub fn parity(&self) -> Parity {
        Parity::from_bit(self.odd.len() % 2 == 1)
    }

    pub fn exponent(&self, id: VarId) -> i32 {
        self.even
            .iter()
            .find(|(v, _)| *v == id)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn contains_odd(&self, id: VarId) -> bool {
        self.odd.binary_search(&id).is_ok()
    }

    /// Whether the variable occurs at all (any exponent, or as an odd factor).
    pub fn mentions(&self, id: VarId) -> bool {
        self.exponent(id) != 0 || self.contains_odd(id)
    }

    /// Total degree counting odd factors with weight 1 (hbar excluded).
    pub fn degree(&self) -> i64 {
        self.even.iter().map(|(_, e)| *e as i64).sum::<i64>() + self.odd.len() as i64
    }

    pub fn has_negative_exponent(&self) -> bool {
        self.even.iter().any(|(_, e)| *e < 0)
    }

    pub fn with_hbar(&self, hbar: u32) -> Monomial {
        Monomial {
            hbar,
            ..self.clone()
        }
    }

    pub fn without_hbar(&self) -> Monomial {
        self.with_hbar(0)
    }

    /// Supercommutative product: `(sign, self * other)`, `None` if an odd factor repeats.
    pub fn mul(&self, other: &Monomial) -> Option<(i8, Monomial)> {
        let odd = merge_odd(&self.odd, &other.odd)?;
        let even = merge_even(&self.even, &other.even);
        Some((
            odd.0,
            Monomial {
                hbar: self.hbar + other.hbar,
                even,
                odd: odd.1,
            },
        ))
    }

    /// Inverse of a monomial with no odd factors and no hbar.
    pub fn inverse(&self) -> Option<Monomial> {
        if !self.odd.is_empty() || self.hbar != 0 {
            return None;
        }
        Some(Monomial {
            hbar: 0,
            even: self.even.iter().map(|(v, e)| (*v, -e)).collect(),
            odd: SmallVec::new(),
        })
    }

    /// Ordinary derivative in an even variable: `(exponent, lowered monomial)`.
    pub fn d_even(&self, id: VarId) -> Option<(i32, Monomial)> {
        let pos = self.even.iter().position(|(v, _)| *v == id)?;
        let e = self.even[pos].1;
        let mut out = self.clone();
        if e == 1 {
            out.even.remove(pos);
        } else {
            out.even[pos].1 = e - 1;
        }
        Some((e, out))
    }

    /// Removes an odd factor; returns its 0-based position among the odd factors.
    pub fn remove_odd(&self, id: VarId) -> Option<(usize, Monomial)> {
        let pos = self.odd.binary_search(&id).ok()?;
        let mut out = self.clone();
        out.odd.remove(pos);
        Some((pos, out))
    }

    /// Every factor in declaration order, odd factors as exponent 1.
    pub fn factors(&self) -> Vec<(VarId, i32)> {
        let mut out: Vec<(VarId, i32)> = self.even.to_vec();
        out.extend(self.odd.iter().map(|v| (*v, 1)));
        out.sort_by_key(|(v, _)| *v);
        out
    }
}

fn merge_even(a: &[(VarId, i32)], b: &[(VarId, i32)]) -> SmallVec<[(VarId, i32); 4]> {
    let mut out = SmallVec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let e = a[i].1 + b[j].1;
                if e != 0 {
                    out.push((a[i].0, e));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Merges two canonical odd sequences; the sign counts transpositions needed
/// to move every factor of `b` past the larger factors of `a`.
fn merge_odd(a: &[VarId], b: &[VarId]) -> Option<(i8, SmallVec<[VarId; 4]>)> {
    let mut out = SmallVec::with_capacity(a.len() + b.len());
    let mut swaps = 0usize;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                swaps += a.len() - i;
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => return None,
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((if swaps.is_multiple_of(2) { 1 } else { -1 }, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(i: u32) -> Monomial {
        Monomial::odd_var(VarId(i))
    }

    #[test]
    fn grassmann_signs() {
        let (s, m) = t(1).mul(&t(2)).unwrap();
        assert_eq!((s, m.odd()), (1, &[VarId(1), VarId(2)][..]));
        let (s, _) = t(2).mul(&t(1)).unwrap();
        assert_eq!(s, -1);
        assert!(t(1).mul(&t(1)).is_none());
        // t3 * (t1 t2) = + t1 t2 t3 (two transpositions)
        let t12 = t(1).mul(&t(2)).unwrap().1;
        assert_eq!(t(3).mul(&t12).unwrap().0, 1);
        // t2 * (t1 t3) = - t1 t2 t3
        let t13 = t(1).mul(&t(3)).unwrap().1;
        assert_eq!(t(2).mul(&t13).unwrap().0, -1);
    }

    #[test]
    fn laurent_exponents_cancel() {
        let a = Monomial::even_var(VarId(0), 2);
        let b = Monomial::even_var(VarId(0), -2);
        assert!(a.mul(&b).unwrap().1.is_one());
        assert_eq!(a.inverse().unwrap(), b);
    }

    #[test]
    fn from_parts_sorts_with_sign() {
        let (s, m) = Monomial::from_parts(0, [], &[VarId(3), VarId(1), VarId(2)]).unwrap();
        // t3 t1 t2 -> t1 t2 t3 needs two swaps
        assert_eq!(s, 1);
        assert_eq!(m.odd(), &[VarId(1), VarId(2), VarId(3)]);
    }
}
