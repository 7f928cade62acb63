//! Declared models: variables, bivector, expected brackets, fibration and
//! gluing data, and their verification.

mod antichiral;
mod builtin;
mod cy;
mod verify;

use std::collections::BTreeMap;
use std::fmt;

use crate::atlas::ProjectiveFactor;
use crate::error::{Error, Result};
use crate::graded_ring::{GradedPoly, Substitution, VarTable};
use crate::moyal::StarEngine;
use crate::poisson::SuperBivector;

pub use antichiral::AntiChiralShift;
pub use builtin::{builtin, builtin_names, model_file_stem, p3_n};
pub use cy::{calabi_yau_index, CyIndex, CyWeights};
pub use verify::{fibration_pullback, verify_model, Record, VerificationReport, VerifyOptions};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationKind {
    /// `[a, b]_*`
    Comm,
    /// `{a, b}_*`, both arguments odd.
    Anti,
}

impl RelationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RelationKind::Comm => "comm",
            RelationKind::Anti => "anti",
        }
    }

    pub fn for_pair(table: &VarTable, a: &str, b: &str) -> Result<Self> {
        let odd = table.spec(a)?.is_odd() && table.spec(b)?.is_odd();
        Ok(if odd { RelationKind::Anti } else { RelationKind::Comm })
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `kind a b = hbar * value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub kind: RelationKind,
    pub a: String,
    pub b: String,
    pub value: GradedPoly,
}

impl Relation {
    pub fn new(table: &VarTable, a: &str, b: &str, value: GradedPoly) -> Result<Self> {
        Ok(Relation {
            kind: RelationKind::for_pair(table, a, b)?,
            a: a.to_string(),
            b: b.to_string(),
            value,
        })
    }

    pub fn check_id(&self) -> String {
        format!("{} {} {}", self.kind, self.a, self.b)
    }
}

/// Pullback of homogeneous coordinates to a base with its own star product.
#[derive(Clone, Debug, PartialEq)]
pub struct Fibration {
    pub base: VarTable,
    /// Brackets of base coordinates; they define the base bivector.
    pub base_relations: Vec<Relation>,
    /// Model variable to base expression, in declaration order.
    pub map: Vec<(String, GradedPoly)>,
    /// Expected pulled-back brackets, in base variables. When nonempty every
    /// other mapped generator pair is expected to vanish.
    pub expectations: Vec<Relation>,
    /// Named model expressions that must pull back to zero.
    pub identities: Vec<(String, GradedPoly)>,
}

impl Fibration {
    pub fn substitution(&self, model: &VarTable) -> Result<Substitution> {
        let mut s = Substitution::by_name(model, &self.base);
        for (name, image) in &self.map {
            s.set(name, image.clone())?;
        }
        Ok(s)
    }

    pub fn base_bivector(&self) -> Result<SuperBivector> {
        bivector_from_relations(&self.base, &self.base_relations)
    }
}

/// Projective factors for the chart cover, and optionally a different
/// homogeneous bivector to glue (for example one with generic constants).
#[derive(Clone, Debug, PartialEq)]
pub struct AtlasSpec {
    pub factors: Vec<ProjectiveFactor>,
    pub bivector: Option<SuperBivector>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub name: String,
    pub table: VarTable,
    /// Degree of each weighted generator over each projective factor.
    pub weights: BTreeMap<String, Vec<i32>>,
    pub bivector: SuperBivector,
    /// Expected brackets; when nonempty, every unlisted generator pair must vanish.
    pub relations: Vec<Relation>,
    pub fibration: Option<Fibration>,
    pub atlas: Option<AtlasSpec>,
    pub cy: Option<CyWeights>,
    pub max_order: u32,
    /// Display names.
    pub aliases: BTreeMap<String, String>,
}

impl ModelSpec {
    pub fn engine(&self) -> Result<StarEngine> {
        StarEngine::new(self.bivector.clone(), self.max_order)
    }

    /// Expected hbar-coefficient of the supercommutator of two generators.
    pub fn expected_relation(&self, a: &str, b: &str) -> Option<GradedPoly> {
        expected_in(&self.table, &self.relations, a, b)
    }

    pub fn var(&self, name: &str) -> Result<GradedPoly> {
        Ok(GradedPoly::var(self.table.spec(name)?))
    }

    /// Structural checks the file parser and the builders both rely on.
    pub fn validate(&self) -> Result<()> {
        if self.bivector.table() != &self.table {
            return Err(Error::InvalidModel("bivector is over different variables".into()));
        }
        for r in &self.relations {
            validate_relation(&self.table, r)?;
        }
        for (name, w) in &self.weights {
            let spec = self.table.spec(name)?;
            if spec.constant {
                return Err(Error::InvalidModel(format!("constant `{name}` cannot carry a weight")));
            }
            if let Some(atlas) = &self.atlas {
                if w.len() != atlas.factors.len() {
                    return Err(Error::InvalidModel(format!("`{name}` needs one weight per factor")));
                }
            }
        }
        if let Some(f) = &self.fibration {
            for r in &f.base_relations {
                validate_relation(&f.base, r)?;
            }
            for r in &f.expectations {
                validate_relation(&self.table, &Relation { value: GradedPoly::zero(), ..r.clone() })?;
            }
            f.substitution(&self.table)?;
        }
        if let Some(a) = &self.atlas {
            if let Some(pi) = &a.bivector {
                if pi.table() != &self.table {
                    return Err(Error::InvalidModel("atlas bivector is over different variables".into()));
                }
            }
        }
        Ok(())
    }
}

fn validate_relation(table: &VarTable, r: &Relation) -> Result<()> {
    let kind = RelationKind::for_pair(table, &r.a, &r.b)?;
    if kind != r.kind {
        return Err(Error::InvalidModel(format!(
            "relation {} needs `{}`",
            r.check_id(),
            kind
        )));
    }
    Ok(())
}

pub(crate) fn expected_in(table: &VarTable, relations: &[Relation], a: &str, b: &str) -> Option<GradedPoly> {
    if relations.is_empty() {
        return None;
    }
    for r in relations {
        if r.a == a && r.b == b {
            return Some(r.value.clone());
        }
        if r.a == b && r.b == a {
            let both_odd = r.kind == RelationKind::Anti;
            return Some(if both_odd { r.value.clone() } else { -&r.value });
        }
    }
    let known = table.lookup(a).is_some() && table.lookup(b).is_some();
    known.then(GradedPoly::zero)
}

/// For central constant-like coefficients `[A, B]_* = hbar pi^{AB}`, so a
/// relation table is read directly as a bivector.
pub fn bivector_from_relations(table: &VarTable, relations: &[Relation]) -> Result<SuperBivector> {
    let mut pi = SuperBivector::new(table);
    for r in relations {
        pi.set(&r.a, &r.b, r.value.clone())?;
    }
    Ok(pi)
}
