//! Superbivectors, the brackets they induce and the super Schouten bracket.

use std::collections::BTreeMap;

use crate::calculus::{d_left, d_right, derivative_id, Side};
use crate::error::{Error, Result};
use crate::graded_ring::{GradedPoly, Grading, Parity, VarId, VarTable};
use crate::scalar::Scalar;

/// `pi^{AB}` with graded antisymmetry `pi^{BA} = -(-1)^{|A||B|} pi^{AB}`.
///
/// Both orientations are stored, so lookups never need the sign rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperBivector {
    table: VarTable,
    entries: BTreeMap<(VarId, VarId), GradedPoly>,
}

impl SuperBivector {
    pub fn new(table: &VarTable) -> Self {
        SuperBivector {
            table: table.clone(),
            entries: BTreeMap::new(),
        }
    }

    pub fn table(&self) -> &VarTable {
        &self.table
    }

    /// Sets `pi^{AB}` (and hence `pi^{BA}`); a diagonal even entry must vanish.
    pub fn set(&mut self, a: &str, b: &str, value: GradedPoly) -> Result<()> {
        let ia = self.table.id(a)?;
        let ib = self.table.id(b)?;
        self.set_id(ia, ib, value)
    }

    pub fn set_id(&mut self, a: VarId, b: VarId, value: GradedPoly) -> Result<()> {
        let pa = self.table.get(a).parity;
        let pb = self.table.get(b).parity;
        if a == b && pa == Parity::Even && !value.is_zero() {
            return Err(Error::InvalidBivector(format!(
                "diagonal entry of even `{}` must vanish",
                self.table.get(a).name
            )));
        }
        let mirrored = if pa.is_odd() && pb.is_odd() { value.clone() } else { -&value };
        for (key, v) in [((a, b), value), ((b, a), mirrored)] {
            if v.is_zero() {
                self.entries.remove(&key);
            } else {
                self.entries.insert(key, v);
            }
        }
        Ok(())
    }

    pub fn with(mut self, a: &str, b: &str, value: GradedPoly) -> Result<Self> {
        self.set(a, b, value)?;
        Ok(self)
    }

    pub fn get(&self, a: VarId, b: VarId) -> GradedPoly {
        self.entries.get(&(a, b)).cloned().unwrap_or_default()
    }

    pub fn entry(&self, a: &str, b: &str) -> Result<GradedPoly> {
        Ok(self.get(self.table.id(a)?, self.table.id(b)?))
    }

    /// Nonzero entries in both orientations.
    pub fn entries(&self) -> impl Iterator<Item = (VarId, VarId, &GradedPoly)> {
        self.entries.iter().map(|((a, b), v)| (*a, *b, v))
    }

    /// Nonzero entries with `A <= B`.
    pub fn upper_entries(&self) -> impl Iterator<Item = (VarId, VarId, &GradedPoly)> {
        self.entries().filter(|(a, b, _)| a <= b)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Variables with a nonzero row, i.e. the ones the bivector differentiates.
    pub fn row_vars(&self) -> Vec<VarId> {
        let mut out: Vec<VarId> = self.entries.keys().map(|(a, _)| *a).collect();
        out.dedup();
        out
    }

    /// Whether no coefficient depends on a differentiated variable.
    pub fn is_central(&self) -> bool {
        self.first_non_central().is_none()
    }

    pub(crate) fn first_non_central(&self) -> Option<VarId> {
        let rows = self.row_vars();
        rows.into_iter().find(|r| self.entries.values().any(|v| v.mentions(*r)))
    }

    /// Parity of the bivector: each term counts `|entry| + |A| + |B|`.
    pub fn parity(&self) -> Grading {
        let mut even = false;
        let mut odd = false;
        for ((a, b), v) in &self.entries {
            let shift = self.table.get(*a).is_odd() ^ self.table.get(*b).is_odd();
            for (m, _) in v.terms() {
                if m.parity().is_odd() ^ shift {
                    odd = true;
                } else {
                    even = true;
                }
            }
        }
        match (even, odd) {
            (_, false) => Grading::Even,
            (false, true) => Grading::Odd,
            _ => Grading::Mixed,
        }
    }
}

/// `{f,g} = sum (f <-d_A) pi^{AB} (d_B-> g)`.
pub fn poisson_bracket(pi: &SuperBivector, f: &GradedPoly, g: &GradedPoly) -> GradedPoly {
    let mut out = GradedPoly::zero();
    let table = pi.table();
    let mut right_cache: BTreeMap<VarId, GradedPoly> = BTreeMap::new();
    let mut left_cache: BTreeMap<VarId, GradedPoly> = BTreeMap::new();
    for (a, b, v) in pi.entries() {
        let fa = right_cache
            .entry(a)
            .or_insert_with(|| d_right(table.get(a), f))
            .clone();
        if fa.is_zero() {
            continue;
        }
        let gb = left_cache.entry(b).or_insert_with(|| d_left(table.get(b), g));
        if gb.is_zero() {
            continue;
        }
        out += &(&(&fa * v) * gb);
    }
    out
}

/// Graded Jacobi sum; zero for every triple iff the bracket is a Lie superbracket.
pub fn jacobi_sum(pi: &SuperBivector, f: &GradedPoly, g: &GradedPoly, h: &GradedPoly) -> GradedPoly {
    let bit = |p: &GradedPoly| p.parity_of() == Grading::Odd;
    let (pf, pg, ph) = (bit(f), bit(g), bit(h));
    let signed = |neg: bool, p: GradedPoly| if neg { -p } else { p };
    let t1 = signed(pf && ph, poisson_bracket(pi, f, &poisson_bracket(pi, g, h)));
    let t2 = signed(pg && pf, poisson_bracket(pi, g, &poisson_bracket(pi, h, f)));
    let t3 = signed(ph && pg, poisson_bracket(pi, h, &poisson_bracket(pi, f, g)));
    &(&t1 + &t2) + &t3
}

/// Trivector coefficients on the basis `d_i ^ d_j ^ d_k`, `i <= j <= k`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SuperTrivector {
    entries: BTreeMap<(VarId, VarId, VarId), GradedPoly>,
}

impl SuperTrivector {
    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: VarId, j: VarId, k: VarId) -> GradedPoly {
        self.entries.get(&(i, j, k)).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = ((VarId, VarId, VarId), &GradedPoly)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    /// Adds `c * d_i ^ d_j ^ d_k`, sorting the indices with graded signs.
    fn accumulate(&mut self, table: &VarTable, idx: [VarId; 3], c: &GradedPoly) {
        if c.is_zero() {
            return;
        }
        let mut idx = idx;
        let mut negate = false;
        for pass in 0..2 {
            for p in 0..2 - pass {
                if idx[p] > idx[p + 1] {
                    let both_odd = table.get(idx[p]).is_odd() && table.get(idx[p + 1]).is_odd();
                    if !both_odd {
                        negate = !negate;
                    }
                    idx.swap(p, p + 1);
                }
            }
        }
        for p in 0..2 {
            if idx[p] == idx[p + 1] && !table.get(idx[p]).is_odd() {
                return;
            }
        }
        let key = (idx[0], idx[1], idx[2]);
        let slot = self.entries.entry(key).or_default();
        if negate {
            *slot -= c;
        } else {
            *slot += c;
        }
        if slot.is_zero() {
            self.entries.remove(&key);
        }
    }
}

fn bivector_bit(pi: &SuperBivector) -> Result<bool> {
    match pi.parity() {
        Grading::Even => Ok(false),
        Grading::Odd => Ok(true),
        Grading::Mixed => Err(Error::InvalidBivector("bivector of mixed parity".into())),
    }
}

/// Super Schouten bracket of two bivectors over the same variables.
pub fn schouten_bracket(a: &SuperBivector, b: &SuperBivector) -> Result<SuperTrivector> {
    if a.table() != b.table() {
        return Err(Error::VariableMismatch("Schouten bracket of bivectors over different variables".into()));
    }
    let table = a.table();
    let pa = bivector_bit(a)?;
    let pb = bivector_bit(b)?;
    let half = Scalar::new(1, 2);
    let odd = |v: VarId| table.get(v).is_odd();
    let mut out = SuperTrivector::default();
    // 1/2 (-1)^{|i1|(|j1|+|j2|+|B|)} A^{mu i1} d_mu B^{j1 j2} d_i1 ^ d_j1 ^ d_j2
    for (mu, i1, a_entry) in a.entries() {
        for (j1, j2, b_entry) in b.entries() {
            let d = derivative_id(mu, table.get(mu).parity, Side::Left, b_entry);
            if d.is_zero() {
                continue;
            }
            let neg = odd(i1) && (odd(j1) ^ odd(j2) ^ pb);
            let c = (a_entry * &d).scale(&if neg { -half.clone() } else { half.clone() });
            out.accumulate(table, [i1, j1, j2], &c);
        }
    }
    // 1/2 (-1)^{|A|(|j1|+|B|)} B^{mu j1} d_mu A^{i1 i2} d_i1 ^ d_i2 ^ d_j1
    for (mu, j1, b_entry) in b.entries() {
        for (i1, i2, a_entry) in a.entries() {
            let d = derivative_id(mu, table.get(mu).parity, Side::Left, a_entry);
            if d.is_zero() {
                continue;
            }
            let neg = pa && (odd(j1) ^ pb);
            let c = (b_entry * &d).scale(&if neg { -half.clone() } else { half.clone() });
            out.accumulate(table, [i1, i2, j1], &c);
        }
    }
    Ok(out)
}

/// `[pi, pi] = 0`.
pub fn is_poisson(pi: &SuperBivector) -> bool {
    schouten_bracket(pi, pi).map(|t| t.is_zero()).unwrap_or(false)
}
