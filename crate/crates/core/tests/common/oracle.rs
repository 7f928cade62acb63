//! Reference star product computed the slow way: `f(x) g(y)` lives in one
//! supercommutative algebra over two copies of the variables, the operator
//! `P = sum (-1)^|A| pi^{AB} d/dx_A d/dy_B` is applied `n` times with left
//! derivatives, and `mu` sets `y = x`. Only bivectors pairing variables of
//! equal parity are supported, so `P` is even.
//!
//! Nothing here calls into the library's product, derivatives or engine;
//! `GradedPoly` values are only read term by term and converted.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use superstar::{GradedPoly, SuperBivector, VarTable};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Key {
    hbar: u32,
    even: Vec<i32>,
    /// Odd factors in ascending index order.
    odd: u128,
}

pub type Poly = BTreeMap<Key, BigRational>;

pub struct Oracle {
    n: usize,
    odd: Vec<bool>,
    /// `(A, B, (-1)^|A| pi^{AB})` with the coefficient in the first copy.
    steps: Vec<(usize, usize, Poly)>,
}

fn add(p: &mut Poly, k: Key, c: BigRational) {
    if c.is_zero() {
        return;
    }
    let slot = p.entry(k.clone()).or_insert_with(BigRational::zero);
    *slot += c;
    if slot.is_zero() {
        p.remove(&k);
    }
}

/// Product of two keys over `2n` slots; `None` when an odd factor repeats.
fn key_mul(a: &Key, b: &Key) -> Option<(bool, Key)> {
    if a.odd & b.odd != 0 {
        return None;
    }
    let mut flips = 0u32;
    let mut rest = b.odd;
    while rest != 0 {
        let t = rest.trailing_zeros();
        rest &= rest - 1;
        flips += (a.odd >> (t + 1)).count_ones();
    }
    let even = a.even.iter().zip(&b.even).map(|(x, y)| x + y).collect();
    Some((flips % 2 == 1, Key { hbar: a.hbar + b.hbar, even, odd: a.odd | b.odd }))
}

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ka, ca) in a {
        for (kb, cb) in b {
            if let Some((neg, k)) = key_mul(ka, kb) {
                let c = ca * cb;
                add(&mut out, k, if neg { -c } else { c });
            }
        }
    }
    out
}

impl Oracle {
    pub fn new(pi: &SuperBivector) -> Self {
        let table = pi.table();
        let n = table.len();
        assert!(2 * n <= 128, "too many variables for the reference product");
        let odd: Vec<bool> = table.iter().map(|v| v.is_odd()).collect();
        let mut o = Oracle { n, odd, steps: Vec::new() };
        for (a, b, entry) in pi.entries() {
            let (a, b) = (a.index(), b.index());
            assert_eq!(o.odd[a], o.odd[b], "reference product needs an even bivector");
            let mut c = o.import(table, entry, 0);
            if o.odd[a] {
                for v in c.values_mut() {
                    *v = -v.clone();
                }
            }
            o.steps.push((a, b, c));
        }
        o
    }

    fn width(&self) -> usize {
        2 * self.n
    }

    fn is_odd(&self, slot: usize) -> bool {
        self.odd[slot % self.n]
    }

    /// Copies `p` into the copy starting at slot `offset`.
    pub fn import(&self, table: &VarTable, p: &GradedPoly, offset: usize) -> Poly {
        let mut out = Poly::new();
        for (m, c) in p.terms() {
            let mut key = Key { hbar: m.hbar(), even: vec![0; self.width()], odd: 0 };
            for (v, e) in m.even() {
                key.even[v.index() + offset] += e;
            }
            let mut neg = false;
            for v in m.odd() {
                assert!(table.get(*v).is_odd());
                let single = Key { hbar: 0, even: vec![0; self.width()], odd: 1u128 << (v.index() + offset) };
                let (s, k) = key_mul(&key, &single).expect("canonical monomial");
                neg ^= s;
                key = k;
            }
            let c = c.to_big();
            add(&mut out, key, if neg { -c } else { c });
        }
        out
    }

    fn d_left(&self, p: &Poly, slot: usize) -> Poly {
        let mut out = Poly::new();
        for (k, c) in p {
            if self.is_odd(slot) {
                let bit = 1u128 << slot;
                if k.odd & bit == 0 {
                    continue;
                }
                let before = (k.odd & (bit - 1)).count_ones();
                let mut r = k.clone();
                r.odd &= !bit;
                add(&mut out, r, if before % 2 == 1 { -c.clone() } else { c.clone() });
            } else {
                let e = k.even[slot];
                if e == 0 {
                    continue;
                }
                let mut r = k.clone();
                r.even[slot] -= 1;
                add(&mut out, r, c * BigRational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    fn apply_p(&self, p: &Poly) -> Poly {
        let mut out = Poly::new();
        for (a, b, coeff) in &self.steps {
            let dy = self.d_left(p, b + self.n);
            if dy.is_empty() {
                continue;
            }
            let dxy = self.d_left(&dy, *a);
            for (k, c) in mul(coeff, &dxy) {
                add(&mut out, k, c);
            }
        }
        out
    }

    /// Sets the second copy equal to the first.
    fn collapse(&self, p: &Poly) -> Poly {
        let mut out = Poly::new();
        let low = (1u128 << self.n) - 1;
        for (k, c) in p {
            let x = Key {
                hbar: k.hbar,
                even: k.even[..self.n].to_vec(),
                odd: k.odd & low,
            };
            let y = Key {
                hbar: 0,
                even: k.even[self.n..].to_vec(),
                odd: k.odd >> self.n,
            };
            if let Some((neg, m)) = key_mul(&x, &y) {
                add(&mut out, m, if neg { -c.clone() } else { c.clone() });
            }
        }
        out
    }

    /// `f * g` as a polynomial over the original variables, and the highest
    /// power of hbar the expansion reached.
    pub fn star(&self, table: &VarTable, f: &GradedPoly, g: &GradedPoly) -> (Poly, u32) {
        let fx = self.import(table, f, 0);
        let gy = self.import(table, g, self.n);
        let mut term = mul(&fx, &gy);
        let mut total = self.collapse(&term);
        let mut n = 0u32;
        let mut weight = BigRational::one();
        loop {
            term = self.apply_p(&term);
            if term.is_empty() {
                break;
            }
            n += 1;
            assert!(n <= 32, "expansion did not terminate");
            weight /= BigRational::from_integer(BigInt::from(2 * n));
            for (mut k, c) in self.collapse(&term) {
                k.hbar += n;
                add(&mut total, k, c * &weight);
            }
        }
        (total, n)
    }

    /// A single-copy polynomial in the same representation, for comparison.
    pub fn single(&self, table: &VarTable, p: &GradedPoly) -> Poly {
        self.import(table, p, 0)
            .into_iter()
            .map(|(mut k, c)| {
                k.even.truncate(self.n);
                (k, c)
            })
            .collect()
    }
}
