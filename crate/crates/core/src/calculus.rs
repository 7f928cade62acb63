//! Left and right graded partial derivatives.

use crate::graded_ring::{GradedPoly, Grading, Parity, VarId, VarSpec};
use crate::scalar::Scalar;

/// Which side a derivative acts from; only matters for odd variables.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivativeDirection<'a> {
    pub variable: &'a VarSpec,
    pub side: Side,
}

impl DerivativeDirection<'_> {
    pub fn apply(&self, a: &GradedPoly) -> GradedPoly {
        derivative(self.variable, self.side, a)
    }
}

pub fn derivative(v: &VarSpec, side: Side, a: &GradedPoly) -> GradedPoly {
    derivative_id(v.id(), v.parity, side, a)
}

/// Left derivative: an odd factor is moved to the front before deletion.
pub fn d_left(v: &VarSpec, a: &GradedPoly) -> GradedPoly {
    derivative(v, Side::Left, a)
}

/// Right derivative: an odd factor is moved to the back before deletion.
pub fn d_right(v: &VarSpec, a: &GradedPoly) -> GradedPoly {
    derivative(v, Side::Right, a)
}

pub(crate) fn derivative_id(id: VarId, parity: Parity, side: Side, a: &GradedPoly) -> GradedPoly {
    let mut out = GradedPoly::zero();
    for (m, c) in a.terms() {
        match parity {
            Parity::Even => {
                if let Some((e, rest)) = m.d_even(id) {
                    out.add_term(rest, c * &Scalar::from_int(e as i64));
                }
            }
            Parity::Odd => {
                if let Some((pos, rest)) = m.remove_odd(id) {
                    let k = m.odd().len();
                    let moves = match side {
                        Side::Left => pos,
                        Side::Right => k - 1 - pos,
                    };
                    out.add_term(rest, if moves % 2 == 0 { c.clone() } else { -c });
                }
            }
        }
    }
    out
}

/// Sign convention used when a bidifferential step is applied to a tensor pair.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Default)]
pub enum KernelSign {
    /// `(-1)^((|A|+|B|) * beta)`, where `beta` is the parity of odd right
    /// derivatives already taken from the left slot.
    #[default]
    InPlace,
    /// `(-1)^(|B| * |f <- d_A|)`: the slot-swap rule.
    SlotSwap,
    /// `InPlace` times `(-1)^(|A| |B|)`.
    Flipped,
    /// Left derivatives on both slots.
    LeftOnBoth,
}

impl KernelSign {
    pub const ALL: [KernelSign; 4] = [
        KernelSign::InPlace,
        KernelSign::SlotSwap,
        KernelSign::Flipped,
        KernelSign::LeftOnBoth,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelSign::InPlace => "in-place",
            KernelSign::SlotSwap => "slot-swap",
            KernelSign::Flipped => "flipped",
            KernelSign::LeftOnBoth => "left-on-both",
        }
    }

    pub(crate) fn left_side(self) -> Side {
        match self {
            KernelSign::LeftOnBoth => Side::Left,
            _ => Side::Right,
        }
    }

    /// Sign for one step; `left_after` is the parity of the left slot after
    /// differentiation, `beta` the accumulated odd-derivative parity before it.
    pub(crate) fn sign(self, a: Parity, b: Parity, left_after: Parity, beta: bool) -> bool {
        let ab_odd = a.is_odd() ^ b.is_odd();
        match self {
            KernelSign::InPlace | KernelSign::LeftOnBoth => ab_odd && beta,
            KernelSign::SlotSwap => b.is_odd() && left_after.is_odd(),
            KernelSign::Flipped => (ab_odd && beta) ^ (a.is_odd() && b.is_odd()),
        }
    }
}

/// The two derivative slots produced by one kernel step, with their sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotPair {
    pub left: GradedPoly,
    pub right: GradedPoly,
    pub sign: i8,
}

impl SlotPair {
    /// `sign * left * entry * right`.
    pub fn product(&self, entry: &GradedPoly) -> GradedPoly {
        let p = &(&self.left * entry) * &self.right;
        if self.sign < 0 {
            -p
        } else {
            p
        }
    }
}

/// One step of the bidifferential kernel on `f (x) g` for the pair `(A, B)`,
/// taken as the first step of an iteration.
pub fn bidiff_apply(entry: &GradedPoly, a: &VarSpec, b: &VarSpec, f: &GradedPoly, g: &GradedPoly) -> (SlotPair, GradedPoly) {
    let pair = bidiff_step(KernelSign::InPlace, a, b, f, g, false);
    let value = pair.product(entry);
    (pair, value)
}

/// One kernel step under a given sign convention and accumulated parity `beta`.
pub fn bidiff_step(conv: KernelSign, a: &VarSpec, b: &VarSpec, f: &GradedPoly, g: &GradedPoly, beta: bool) -> SlotPair {
    let left = derivative(a, conv.left_side(), f);
    let right = d_left(b, g);
    let left_parity = match left.parity_of() {
        Grading::Odd => Parity::Odd,
        _ => Parity::Even,
    };
    let neg = conv.sign(a.parity, b.parity, left_parity, beta);
    SlotPair {
        left,
        right,
        sign: if neg { -1 } else { 1 },
    }
}
