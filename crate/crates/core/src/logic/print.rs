//! Canonical pretty-printer for the `.rth` language. Output re-parses to an
//! identical value.

use std::fmt::{self, Display, Formatter, Write};

use super::{Context, Formula, FormulaInContext, Sequent, Signature, Term, Theory};

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(s, args) if args.is_empty() => write!(f, "{s}"),
            Term::App(s, args) => {
                write!(f, "{s}(")?;
                write_list(f, args)?;
                f.write_char(')')
            }
        }
    }
}

fn write_list<T: Display>(f: &mut Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, t) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{t}")?;
    }
    Ok(())
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Top => f.write_str("true"),
            Formula::Rel(r, args) if args.is_empty() => write!(f, "{r}"),
            Formula::Rel(r, args) => {
                write!(f, "{r}(")?;
                write_list(f, args)?;
                f.write_char(')')
            }
            Formula::Eq(l, r) => write!(f, "{l} = {r}"),
            Formula::And(l, r) => {
                if matches!(**l, Formula::Exists(..)) {
                    write!(f, "({l})")?;
                } else {
                    write!(f, "{l}")?;
                }
                f.write_str(" & ")?;
                if matches!(**r, Formula::And(..) | Formula::Exists(..)) {
                    write!(f, "({r})")
                } else {
                    write!(f, "{r}")
                }
            }
            Formula::Exists(v, s, body) => write!(f, "exists {v}:{s}. {body}"),
        }
    }
}

impl Display for Context {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_char('[')?;
        for (i, (v, s)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}:{s}")?;
        }
        f.write_char(']')
    }
}

impl Display for FormulaInContext {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.context, self.body)
    }
}

impl Display for Sequent {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} |- {}", self.context, self.lhs, self.rhs)
    }
}

impl Display for Signature {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for s in self.sorts() {
            writeln!(f, "sort {s};")?;
        }
        for (r, arity) in self.relations() {
            if arity.is_empty() {
                writeln!(f, "rel {r};")?;
            } else {
                write!(f, "rel {r}(")?;
                write_list(f, arity)?;
                writeln!(f, ");")?;
            }
        }
        for (name, ty) in self.functions() {
            if ty.args.is_empty() {
                writeln!(f, "const {name}: {};", ty.result)?;
            } else {
                write!(f, "fun {name}(")?;
                write_list(f, &ty.args)?;
                writeln!(f, "): {};", ty.result)?;
            }
        }
        Ok(())
    }
}

impl Display for Theory {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.signature)?;
        for a in &self.axioms {
            writeln!(f, "axiom {a};")?;
        }
        Ok(())
    }
}
