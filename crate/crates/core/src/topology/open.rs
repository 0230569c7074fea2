use serde_json::json;

use super::{conj, fresh, taken_names, TopologyError};
use crate::logic::{
    is_reduced, reduce_presentation, rename_context, Context, Formula, FormulaInContext, Signature, Term,
};
use crate::model::{holds_at, Structure};
use crate::names::{Elem, Sort, Sym, Var};

/// The basic open `⟨⌜x.φ⌝, a⟩ = {M : a ∈ ⟦x.φ⟧^M}` of the model space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PresentedOpen {
    pub formula: FormulaInContext,
    pub tuple: Vec<Elem>,
}

impl PresentedOpen {
    pub fn new(formula: FormulaInContext, tuple: Vec<Elem>) -> Result<Self, TopologyError> {
        if formula.arity() != tuple.len() {
            return Err(TopologyError::Mismatch(format!(
                "tuple of length {} for a context of length {}",
                tuple.len(),
                formula.arity()
            )));
        }
        Ok(PresentedOpen { formula, tuple })
    }

    /// The whole space, `⟨⌜.⊤⌝, ()⟩`.
    pub fn everything() -> Self {
        PresentedOpen { formula: FormulaInContext::top(Context::default()), tuple: Vec::new() }
    }

    pub fn sorts(&self) -> Vec<Sort> {
        self.formula.context.sorts()
    }

    pub fn contains(&self, m: &Structure) -> Result<bool, TopologyError> {
        Ok(holds_at(&self.formula, m, &self.tuple)?)
    }

    pub fn is_reduced(&self) -> bool {
        is_reduced(&self.formula.context, &self.tuple)
    }

    /// The same open with no element repeated at one sort.
    pub fn reduced(&self) -> PresentedOpen {
        let (formula, tuple) = reduce_presentation(&self.formula, &self.tuple).expect("arity checked on construction");
        PresentedOpen { formula, tuple }
    }

    /// `⟨⌜x.φ⌝,a⟩ ∩ ⟨⌜y.ψ⌝,b⟩ = ⟨⌜x,y.φ∧ψ⌝, a*b⟩` after renaming the contexts
    /// apart, returned in reduced form.
    pub fn intersect(&self, other: &PresentedOpen, sig: &Signature) -> PresentedOpen {
        let taken = taken_names(sig, [&self.formula, &other.formula]);
        let mut names = fresh("x", &taken);
        let left: Vec<Var> = (0..self.formula.arity()).map(|_| Var::from(names.next_name())).collect();
        let right: Vec<Var> = (0..other.formula.arity()).map(|_| Var::from(names.next_name())).collect();
        let l = rename_context(&self.formula, &left);
        let r = rename_context(&other.formula, &right);
        let formula = FormulaInContext::new(l.context.concat(&r.context), conj([l.body, r.body]));
        let tuple = self.tuple.iter().chain(&other.tuple).cloned().collect();
        PresentedOpen { formula, tuple }.reduced()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "formula": self.formula.to_string(), "tuple": self.tuple })
    }
}

impl std::fmt::Display for PresentedOpen {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "⟨{}, (", self.formula)?;
        for (i, e) in self.tuple.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")⟩")
    }
}

/// `M ∈ ⟨⌜x.φ⌝, a⟩`.
pub fn model_in_open(m: &Structure, o: &PresentedOpen) -> Result<bool, TopologyError> {
    o.contains(m)
}

/// The subbasic opens generating the logical topology on models.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Subbasic {
    /// `⟨A, a⟩`: `a` is in the carrier of `A`.
    Sort(Sort, Elem),
    /// `⟨R, a⟩`: `R(a)` holds; the tuple is empty for nullary `R`.
    Relation(Sym, Vec<Elem>),
    /// `⟨f(a) = b⟩`; the argument list is empty for constants.
    Function(Sym, Vec<Elem>, Elem),
}

impl Subbasic {
    /// Membership read straight off the structure, without formulas.
    pub fn contains(&self, m: &Structure) -> bool {
        match self {
            Subbasic::Sort(s, a) => m.contains(s, a),
            Subbasic::Relation(r, t) => m.holds(r, t),
            Subbasic::Function(f, args, b) => m.apply(f, args) == Some(b),
        }
    }
}

/// The atomic presentation of a subbasic open with the same extension.
pub fn subbasic_to_formula(sig: &Signature, item: &Subbasic) -> Result<PresentedOpen, TopologyError> {
    let taken = taken_names(sig, []);
    let mut names = fresh("x", &taken);
    let mut vars = |sorts: &[Sort]| -> Vec<(Var, Sort)> {
        sorts.iter().map(|s| (Var::from(names.next_name()), s.clone())).collect()
    };
    let terms = |ctx: &[(Var, Sort)]| -> Vec<Term> { ctx.iter().map(|(v, _)| Term::Var(v.clone())).collect() };
    let (ctx, body, tuple) = match item {
        Subbasic::Sort(s, a) => {
            if !sig.has_sort(s) {
                return Err(TopologyError::Mismatch(format!("undeclared sort `{s}`")));
            }
            (vars(std::slice::from_ref(s)), Formula::Top, vec![a.clone()])
        }
        Subbasic::Relation(r, t) => {
            let arity = sig.relation(r).ok_or_else(|| TopologyError::Mismatch(format!("unknown relation `{r}`")))?;
            let ctx = vars(arity);
            let body = Formula::Rel(r.clone(), terms(&ctx));
            (ctx, body, t.clone())
        }
        Subbasic::Function(f, args, b) => {
            let ty = sig.function(f).ok_or_else(|| TopologyError::Mismatch(format!("unknown function `{f}`")))?;
            let mut ctx = vars(&ty.args);
            let app = Term::App(f.clone(), terms(&ctx));
            ctx.extend(vars(std::slice::from_ref(&ty.result)));
            let body = Formula::eq(app, Term::Var(ctx.last().unwrap().0.clone()));
            let tuple = args.iter().chain(std::iter::once(b)).cloned().collect();
            (ctx, body, tuple)
        }
    };
    PresentedOpen::new(FormulaInContext::checked(sig, Context(ctx), body)?, tuple)
}
