use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::LogicError;
use crate::names::{Sort, Sym};

/// Argument and result sorts of a function symbol. Constants have no arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FunctionType {
    pub args: Vec<Sort>,
    pub result: Sort,
}

/// A finite many-sorted signature.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    sorts: BTreeSet<Sort>,
    relations: BTreeMap<Sym, Vec<Sort>>,
    functions: BTreeMap<Sym, FunctionType>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_sort(&mut self, sort: impl Into<Sort>) -> Result<(), LogicError> {
        let sort = sort.into();
        if !self.sorts.insert(sort.clone()) {
            return Err(LogicError::Declaration(format!("sort `{sort}` declared twice")));
        }
        Ok(())
    }

    pub fn add_relation(&mut self, name: impl Into<Sym>, arity: Vec<Sort>) -> Result<(), LogicError> {
        let name = name.into();
        self.check_fresh_symbol(&name)?;
        self.check_sorts(&arity, &name)?;
        self.relations.insert(name, arity);
        Ok(())
    }

    pub fn add_function(
        &mut self,
        name: impl Into<Sym>,
        args: Vec<Sort>,
        result: impl Into<Sort>,
    ) -> Result<(), LogicError> {
        let name = name.into();
        let result = result.into();
        self.check_fresh_symbol(&name)?;
        self.check_sorts(&args, &name)?;
        self.check_sorts(std::slice::from_ref(&result), &name)?;
        self.functions.insert(name, FunctionType { args, result });
        Ok(())
    }

    fn check_fresh_symbol(&self, name: &Sym) -> Result<(), LogicError> {
        if self.relations.contains_key(name) || self.functions.contains_key(name) {
            return Err(LogicError::Declaration(format!("symbol `{name}` declared twice")));
        }
        Ok(())
    }

    fn check_sorts(&self, sorts: &[Sort], owner: &Sym) -> Result<(), LogicError> {
        for s in sorts {
            if !self.sorts.contains(s) {
                return Err(LogicError::Sort(format!("undeclared sort `{s}` in declaration of `{owner}`")));
            }
        }
        Ok(())
    }

    pub fn sorts(&self) -> impl Iterator<Item = &Sort> + '_ {
        self.sorts.iter()
    }

    pub fn has_sort(&self, sort: &Sort) -> bool {
        self.sorts.contains(sort)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&Sym, &Vec<Sort>)> + '_ {
        self.relations.iter()
    }

    pub fn functions(&self) -> impl Iterator<Item = (&Sym, &FunctionType)> + '_ {
        self.functions.iter()
    }

    pub fn relation(&self, name: &Sym) -> Option<&[Sort]> {
        self.relations.get(name).map(Vec::as_slice)
    }

    pub fn function(&self, name: &Sym) -> Option<&FunctionType> {
        self.functions.get(name)
    }

    pub fn is_symbol(&self, name: &str) -> bool {
        self.relations.contains_key(name) || self.functions.contains_key(name)
    }

    pub fn is_relational(&self) -> bool {
        self.functions.is_empty()
    }
}
