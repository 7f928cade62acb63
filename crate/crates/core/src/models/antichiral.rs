use crate::error::Result;
use crate::graded_ring::{GradedPoly, Substitution, VarTable};

const X: [&str; 4] = ["11", "12", "21", "22"];

/// The shift `x^mu = x_R^mu + a^mu_{AB'} Theta^A Theta^{B'}` between chiral
/// coordinates `(x | Theta, Theta')` and anti-chiral ones `(x_R | Theta, Theta')`,
/// with every `a^mu_{AB'}` a generic constant.
#[derive(Clone, Debug)]
pub struct AntiChiralShift {
    chiral: VarTable,
    antichiral: VarTable,
    forward: Substitution,
    inverse: Substitution,
}

impl AntiChiralShift {
    /// Twelve odd coordinates of each chirality.
    pub fn new() -> Result<Self> {
        Self::with_odd(12)
    }

    pub fn with_odd(n: usize) -> Result<Self> {
        let build = |prefix: &str| {
            let mut b = VarTable::builder();
            for x in X {
                b = b.even(format!("{prefix}{x}"));
            }
            for i in 1..=n {
                b = b.odd(format!("tha{i}"));
            }
            for i in 1..=n {
                b = b.odd(format!("thd{i}"));
            }
            for mu in 1..=4 {
                for a in 1..=n {
                    for bb in 1..=n {
                        b = b.constant(a_name(mu, a, bb));
                    }
                }
            }
            b.build()
        };
        let chiral = build("x")?;
        let antichiral = build("xr")?;
        let mut forward = Substitution::by_name(&chiral, &antichiral);
        let mut inverse = Substitution::by_name(&antichiral, &chiral);
        for (mu, x) in X.iter().enumerate() {
            let fx = &GradedPoly::var(antichiral.spec(&format!("xr{x}"))?) + &shift(&antichiral, mu + 1, n)?;
            forward.set(&format!("x{x}"), fx)?;
            let ix = &GradedPoly::var(chiral.spec(&format!("x{x}"))?) - &shift(&chiral, mu + 1, n)?;
            inverse.set(&format!("xr{x}"), ix)?;
        }
        Ok(AntiChiralShift {
            chiral,
            antichiral,
            forward,
            inverse,
        })
    }

    pub fn chiral_table(&self) -> &VarTable {
        &self.chiral
    }

    pub fn antichiral_table(&self) -> &VarTable {
        &self.antichiral
    }

    /// `f(x | Theta)` rewritten in anti-chiral coordinates.
    pub fn apply(&self, f: &GradedPoly) -> Result<GradedPoly> {
        self.forward.apply(f)
    }

    /// Back from anti-chiral coordinates.
    pub fn invert(&self, g: &GradedPoly) -> Result<GradedPoly> {
        self.inverse.apply(g)
    }

    pub fn forward(&self) -> &Substitution {
        &self.forward
    }

    pub fn inverse(&self) -> &Substitution {
        &self.inverse
    }
}

fn a_name(mu: usize, a: usize, b: usize) -> String {
    format!("a{mu}_{a}_{b}")
}

/// `a^mu_{AB'} Theta^A Theta^{B'}` summed.
fn shift(table: &VarTable, mu: usize, n: usize) -> Result<GradedPoly> {
    let mut acc = GradedPoly::zero();
    for a in 1..=n {
        let ta = GradedPoly::var(table.spec(&format!("tha{a}"))?);
        for b in 1..=n {
            let c = GradedPoly::var(table.spec(&a_name(mu, a, b))?);
            let tb = GradedPoly::var(table.spec(&format!("thd{b}"))?);
            acc += &(&(&c * &ta) * &tb);
        }
    }
    Ok(acc)
}
