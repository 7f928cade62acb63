use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Name reserved for the central deformation parameter.
pub const HBAR: &str = "hbar";

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(odd: bool) -> Self {
        if odd {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    /// 0 or 1.
    pub fn bit(self) -> u8 {
        self as u8
    }

    /// Parity of a product.
    pub fn times(self, other: Parity) -> Parity {
        Parity::from_bit(self.is_odd() ^ other.is_odd())
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Index of a variable in its [`VarTable`]; canonical odd order is index order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarSpec {
    pub name: String,
    pub parity: Parity,
    /// Only even variables may be invertible (Laurent exponents allowed).
    pub invertible: bool,
    /// Generic central constant rather than a coordinate.
    pub constant: bool,
    pub global_index: usize,
}

impl VarSpec {
    pub fn id(&self) -> VarId {
        VarId(self.global_index as u32)
    }

    pub fn is_odd(&self) -> bool {
        self.parity.is_odd()
    }
}

/// Ordered, name-unique set of variables one algebra is generated by.
#[derive(Clone, Debug, Default)]
pub struct VarTable {
    vars: Vec<VarSpec>,
    by_name: HashMap<String, VarId>,
}

impl PartialEq for VarTable {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars
    }
}

impl Eq for VarTable {}

impl VarTable {
    pub fn builder() -> VarTableBuilder {
        VarTableBuilder::default()
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn get(&self, id: VarId) -> &VarSpec {
        &self.vars[id.index()]
    }

    pub fn lookup(&self, name: &str) -> Option<&VarSpec> {
        self.by_name.get(name).map(|id| self.get(*id))
    }

    pub fn id(&self, name: &str) -> Result<VarId> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn spec(&self, name: &str) -> Result<&VarSpec> {
        self.id(name).map(|id| self.get(id))
    }

    pub fn iter(&self) -> impl Iterator<Item = &VarSpec> {
        self.vars.iter()
    }

    /// Coordinates, i.e. everything that is not a declared constant.
    pub fn generators(&self) -> impl Iterator<Item = &VarSpec> {
        self.vars.iter().filter(|v| !v.constant)
    }

    pub fn constants(&self) -> impl Iterator<Item = &VarSpec> {
        self.vars.iter().filter(|v| v.constant)
    }
}

#[derive(Clone, Debug, Default)]
pub struct VarTableBuilder {
    entries: Vec<(String, Parity, bool, bool)>,
}

impl VarTableBuilder {
    pub fn even(mut self, name: impl Into<String>) -> Self {
        self.entries.push((name.into(), Parity::Even, false, false));
        self
    }

    pub fn invertible(mut self, name: impl Into<String>) -> Self {
        self.entries.push((name.into(), Parity::Even, true, false));
        self
    }

    pub fn odd(mut self, name: impl Into<String>) -> Self {
        self.entries.push((name.into(), Parity::Odd, false, false));
        self
    }

    pub fn constant(mut self, name: impl Into<String>) -> Self {
        self.entries.push((name.into(), Parity::Even, false, true));
        self
    }

    pub fn var(mut self, name: impl Into<String>, parity: Parity, invertible: bool, constant: bool) -> Self {
        self.entries.push((name.into(), parity, invertible, constant));
        self
    }

    pub fn build(self) -> Result<VarTable> {
        let mut table = VarTable::default();
        for (i, (name, parity, invertible, constant)) in self.entries.into_iter().enumerate() {
            if name == HBAR {
                return Err(Error::ReservedName(name));
            }
            if !is_identifier(&name) {
                return Err(Error::InvalidVariable(format!("`{name}` is not an identifier")));
            }
            if invertible && parity == Parity::Odd {
                return Err(Error::InvalidVariable(format!("odd variable `{name}` cannot be invertible")));
            }
            if constant && parity == Parity::Odd {
                return Err(Error::InvalidVariable(format!("constant `{name}` must be even")));
            }
            if table.by_name.contains_key(&name) {
                return Err(Error::DuplicateVariable(name));
            }
            table.by_name.insert(name.clone(), VarId(i as u32));
            table.vars.push(VarSpec {
                name,
                parity,
                invertible,
                constant,
                global_index: i,
            });
        }
        Ok(table)
    }
}

pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
