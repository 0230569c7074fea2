//! Parser for the `.rth` theory language.
//!
//! ```text
//! theory   := decl*
//! decl     := "sort" IDENT ";"
//!           | "rel" IDENT [ "(" [IDENT ("," IDENT)*] ")" ] ";"
//!           | "fun" IDENT "(" [IDENT ("," IDENT)*] ")" ":" IDENT ";"
//!           | "const" IDENT ":" IDENT ";"
//!           | "axiom" sequent ";"
//! sequent  := context formula "|-" formula
//! context  := "[" [IDENT ":" IDENT ("," IDENT ":" IDENT)*] "]"
//! formula  := primary ("&" primary)*
//! primary  := "true"
//!           | "exists" IDENT ":" IDENT ("," IDENT ":" IDENT)* "." formula
//!           | "(" formula ")"
//!           | REL [ "(" terms ")" ]
//!           | term "=" term
//! term     := IDENT | FUN "(" terms ")"
//! ```
//!
//! `exists` scopes as far right as possible. `#` starts a line comment.
//! Connectives outside the regular fragment (`forall`, `false`, `|`, `~`,
//! `->`, ...) are recognised and rejected with a regularity error.

use super::{Context, Formula, FormulaInContext, LogicError, Sequent, Signature, Term, Theory};
use crate::names::{Sort, Sym, Var};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Semi,
    Colon,
    Dot,
    Amp,
    Eq,
    Turnstile,
    /// A connective that regular logic excludes.
    Forbidden(String),
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

const FORBIDDEN_WORDS: &[&str] = &["forall", "false", "not", "or", "implies"];

fn lex(src: &str) -> Result<Vec<Spanned>, LogicError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let mut push = |tok: Tok, width: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned { tok, line: tl, col: tc });
            *i += width;
            *col += width;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '[' => push(Tok::LBrack, 1, &mut i, &mut col),
            ']' => push(Tok::RBrack, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            ';' => push(Tok::Semi, 1, &mut i, &mut col),
            ':' => push(Tok::Colon, 1, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            '&' => push(Tok::Amp, 1, &mut i, &mut col),
            '=' if chars.get(i + 1) == Some(&'>') => push(Tok::Forbidden("=>".into()), 2, &mut i, &mut col),
            '=' => push(Tok::Eq, 1, &mut i, &mut col),
            '|' if chars.get(i + 1) == Some(&'-') => push(Tok::Turnstile, 2, &mut i, &mut col),
            '|' => push(Tok::Forbidden("|".into()), 1, &mut i, &mut col),
            '~' | '!' => push(Tok::Forbidden(c.to_string()), 1, &mut i, &mut col),
            '-' if chars.get(i + 1) == Some(&'>') => push(Tok::Forbidden("->".into()), 2, &mut i, &mut col),
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                push(Tok::Forbidden("<->".into()), 3, &mut i, &mut col)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                col += i - start;
                let tok =
                    if FORBIDDEN_WORDS.contains(&word.as_str()) { Tok::Forbidden(word) } else { Tok::Ident(word) };
                out.push(Spanned { tok, line: tl, col: tc });
            }
            other => {
                return Err(LogicError::Syntax {
                    line,
                    column: col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser<'s> {
    toks: Vec<Spanned>,
    pos: usize,
    sig: &'s mut Signature,
    scope: Vec<(Var, Sort)>,
}

impl<'s> Parser<'s> {
    fn new(src: &str, sig: &'s mut Signature) -> Result<Self, LogicError> {
        Ok(Parser { toks: lex(src)?, pos: 0, sig, scope: Vec::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, LogicError> {
        let (line, column) = self.here();
        if let Tok::Forbidden(w) = self.peek() {
            return Err(LogicError::Regularity { line, column, construct: w.clone() });
        }
        Err(LogicError::Syntax { line, column, message: message.into() })
    }

    fn located(&self, at: (usize, usize), e: LogicError) -> LogicError {
        match e {
            LogicError::Sort(m) => LogicError::Sort(format!("{}:{}: {m}", at.0, at.1)),
            LogicError::Declaration(m) => LogicError::Declaration(format!("{}:{}: {m}", at.0, at.1)),
            other => other,
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), LogicError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.syntax(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, LogicError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => self.syntax(format!("expected {what}, found {}", describe(&other))),
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Tok::Ident(s) if s == kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn sort_list(&mut self) -> Result<Vec<Sort>, LogicError> {
        let mut sorts = Vec::new();
        if *self.peek() == Tok::RParen {
            return Ok(sorts);
        }
        loop {
            sorts.push(Sort::from(self.ident("sort name")?));
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                return Ok(sorts);
            }
        }
    }

    fn theory(&mut self) -> Result<Vec<Sequent>, LogicError> {
        let mut axioms = Vec::new();
        loop {
            let at = self.here();
            if *self.peek() == Tok::Eof {
                return Ok(axioms);
            }
            if self.keyword("sort") {
                let name = self.ident("sort name")?;
                self.expect(Tok::Semi, "`;`")?;
                self.sig.add_sort(name).map_err(|e| self.located(at, e))?;
            } else if self.keyword("rel") {
                let name = self.ident("relation name")?;
                let arity = if *self.peek() == Tok::LParen {
                    self.bump();
                    let s = self.sort_list()?;
                    self.expect(Tok::RParen, "`)`")?;
                    s
                } else {
                    Vec::new()
                };
                self.expect(Tok::Semi, "`;`")?;
                self.sig.add_relation(name, arity).map_err(|e| self.located(at, e))?;
            } else if self.keyword("fun") {
                let name = self.ident("function name")?;
                self.expect(Tok::LParen, "`(`")?;
                let args = self.sort_list()?;
                self.expect(Tok::RParen, "`)`")?;
                self.expect(Tok::Colon, "`:`")?;
                let result = self.ident("result sort")?;
                self.expect(Tok::Semi, "`;`")?;
                self.sig.add_function(name, args, result).map_err(|e| self.located(at, e))?;
            } else if self.keyword("const") {
                let name = self.ident("constant name")?;
                self.expect(Tok::Colon, "`:`")?;
                let result = self.ident("sort name")?;
                self.expect(Tok::Semi, "`;`")?;
                self.sig.add_function(name, Vec::new(), result).map_err(|e| self.located(at, e))?;
            } else if self.keyword("axiom") {
                let seq = self.sequent()?;
                self.expect(Tok::Semi, "`;`")?;
                seq.check(self.sig).map_err(|e| self.located(at, e))?;
                axioms.push(seq);
            } else {
                return self.syntax(format!(
                    "expected `sort`, `rel`, `fun`, `const` or `axiom`, found {}",
                    describe(self.peek())
                ));
            }
        }
    }

    fn context(&mut self) -> Result<Context, LogicError> {
        self.expect(Tok::LBrack, "`[` opening a context")?;
        let mut vars = Vec::new();
        if *self.peek() != Tok::RBrack {
            loop {
                let v = self.ident("variable")?;
                self.expect(Tok::Colon, "`:`")?;
                let s = self.ident("sort")?;
                vars.push((Var::from(v), Sort::from(s)));
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RBrack, "`]`")?;
        Ok(Context(vars))
    }

    fn sequent(&mut self) -> Result<Sequent, LogicError> {
        let context = self.context()?;
        self.scope = context.0.clone();
        let lhs = self.formula()?;
        self.expect(Tok::Turnstile, "`|-`")?;
        let rhs = self.formula()?;
        self.scope.clear();
        Ok(Sequent { context, lhs, rhs })
    }

    fn formula_in_context(&mut self) -> Result<FormulaInContext, LogicError> {
        let context = self.context()?;
        self.scope = context.0.clone();
        let body = self.formula()?;
        self.scope.clear();
        Ok(FormulaInContext { context, body })
    }

    fn formula(&mut self) -> Result<Formula, LogicError> {
        let mut acc = self.primary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.primary()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn primary(&mut self) -> Result<Formula, LogicError> {
        match self.peek().clone() {
            Tok::Ident(w) if w == "true" => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Ident(w) if w == "exists" => {
                self.bump();
                let mut binders = Vec::new();
                loop {
                    let v = Var::from(self.ident("bound variable")?);
                    self.expect(Tok::Colon, "`:`")?;
                    let s = Sort::from(self.ident("sort")?);
                    binders.push((v, s));
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect(Tok::Dot, "`.` after binder")?;
                let depth = self.scope.len();
                self.scope.extend(binders.iter().cloned());
                let body = self.formula()?;
                self.scope.truncate(depth);
                Ok(Formula::exists_all(&binders, body))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(name) if self.sig.relation(&Sym::new(&name)).is_some() && !self.in_scope(&name) => {
                self.bump();
                let args = if *self.peek() == Tok::LParen {
                    self.bump();
                    let a = self.terms()?;
                    self.expect(Tok::RParen, "`)`")?;
                    a
                } else {
                    Vec::new()
                };
                Ok(Formula::Rel(Sym::from(name), args))
            }
            Tok::Ident(_) => {
                let l = self.term()?;
                self.expect(Tok::Eq, "`=` or a relation atom")?;
                let r = self.term()?;
                Ok(Formula::Eq(l, r))
            }
            other => self.syntax(format!("expected a formula, found {}", describe(&other))),
        }
    }

    fn in_scope(&self, name: &str) -> bool {
        self.scope.iter().any(|(v, _)| v.as_str() == name)
    }

    fn terms(&mut self) -> Result<Vec<Term>, LogicError> {
        let mut ts = Vec::new();
        if *self.peek() == Tok::RParen {
            return Ok(ts);
        }
        loop {
            ts.push(self.term()?);
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                return Ok(ts);
            }
        }
    }

    fn term(&mut self) -> Result<Term, LogicError> {
        let name = self.ident("term")?;
        if *self.peek() == Tok::LParen && !self.in_scope(&name) {
            self.bump();
            let args = self.terms()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(Term::App(Sym::from(name), args));
        }
        if !self.in_scope(&name) && self.sig.function(&Sym::new(&name)).is_some() {
            return Ok(Term::App(Sym::from(name), Vec::new()));
        }
        Ok(Term::Var(Var::from(name)))
    }

    fn finish(&mut self) -> Result<(), LogicError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.syntax(format!("unexpected trailing {}", describe(self.peek())))
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBrack => "`[`".into(),
        Tok::RBrack => "`]`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Semi => "`;`".into(),
        Tok::Colon => "`:`".into(),
        Tok::Dot => "`.`".into(),
        Tok::Amp => "`&`".into(),
        Tok::Eq => "`=`".into(),
        Tok::Turnstile => "`|-`".into(),
        Tok::Forbidden(w) => format!("`{w}`"),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses a complete `.rth` theory.
pub fn parse_theory(text: &str) -> Result<Theory, LogicError> {
    let mut sig = Signature::new();
    let axioms = {
        let mut p = Parser::new(text, &mut sig)?;
        let ax = p.theory()?;
        p.finish()?;
        ax
    };
    Ok(Theory { signature: sig, axioms })
}

/// Parses a formula in context, e.g. `[x:A] exists y:A. R(x, y)`.
pub fn parse_formula(sig: &Signature, text: &str) -> Result<FormulaInContext, LogicError> {
    let mut sig = sig.clone();
    let mut p = Parser::new(text, &mut sig)?;
    let at = p.here();
    let f = p.formula_in_context()?;
    p.finish()?;
    f.check(p.sig).map_err(|e| p.located(at, e))?;
    Ok(f)
}

/// Parses a sequent, e.g. `[x:A, y:A] R(x, y) |- R(y, x)`.
pub fn parse_sequent(sig: &Signature, text: &str) -> Result<Sequent, LogicError> {
    let mut sig = sig.clone();
    let mut p = Parser::new(text, &mut sig)?;
    let at = p.here();
    let s = p.sequent()?;
    p.finish()?;
    s.check(p.sig).map_err(|e| p.located(at, e))?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRANS: &str = "sort A; rel R(A,A); axiom [x:A,y:A,z:A] R(x,y) & R(y,z) |- R(x,z);";

    #[test]
    fn parses_transitivity() {
        let t = parse_theory(TRANS).unwrap();
        assert_eq!(t.signature.sorts().count(), 1);
        assert_eq!(t.signature.relation(&Sym::new("R")).unwrap().len(), 2);
        assert_eq!(t.axioms.len(), 1);
        let ax = &t.axioms[0];
        assert_eq!(ax.context.len(), 3);
        assert_eq!(ax.lhs, Formula::and(Formula::rel_vars("R", &["x", "y"]), Formula::rel_vars("R", &["y", "z"])));
        assert_eq!(ax.rhs, Formula::rel_vars("R", &["x", "z"]));
    }

    #[test]
    fn parses_trivial_sequent() {
        let t = parse_theory("sort A; axiom [] true |- true;").unwrap();
        assert_eq!(t.axioms.len(), 1);
        assert_eq!(t.axioms[0].lhs, Formula::Top);
        assert_eq!(t.axioms[0].rhs, Formula::Top);
        assert!(t.axioms[0].context.is_empty());
    }

    #[test]
    fn forall_is_a_regularity_error() {
        let err = parse_theory("sort A; rel P(A); axiom [] true |- forall x:A. P(x);").unwrap_err();
        assert!(matches!(err, LogicError::Regularity { ref construct, .. } if construct == "forall"), "{err:?}");
    }

    #[test]
    fn disjunction_and_negation_are_regularity_errors() {
        for src in [
            "sort A; rel P(A); axiom [x:A] P(x) | P(x) |- true;",
            "sort A; rel P(A); axiom [x:A] ~P(x) |- true;",
            "sort A; rel P(A); axiom [x:A] P(x) -> P(x) |- true;",
            "sort A; axiom [] true |- false;",
        ] {
            assert!(matches!(parse_theory(src), Err(LogicError::Regularity { .. })), "{src}");
        }
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_theory("sort A;\nrel R(A A);").unwrap_err();
        match err {
            LogicError::Syntax { line, column, .. } => {
                assert_eq!(line, 2);
                assert_eq!(column, 9);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn undeclared_sort_is_a_sort_error() {
        assert!(matches!(parse_theory("rel R(A);"), Err(LogicError::Sort(_))));
        assert!(matches!(parse_theory("sort A; rel R(A); axiom [x:B] R(x) |- true;"), Err(LogicError::Sort(_))));
    }

    #[test]
    fn arity_mismatch_is_a_sort_error() {
        assert!(matches!(parse_theory("sort A; rel R(A,A); axiom [x:A] R(x) |- true;"), Err(LogicError::Sort(_))));
    }

    #[test]
    fn functions_constants_and_nullary_relations() {
        let t = parse_theory(
            "sort A; sort B; fun f(A): B; const c: A; rel Q; rel S(B);\n\
             axiom [x:A] Q |- S(f(x)) & f(c) = f(x);",
        )
        .unwrap();
        let ax = &t.axioms[0];
        assert_eq!(ax.lhs, Formula::Rel(Sym::new("Q"), vec![]));
        let fx = Term::app("f", vec![Term::var("x")]);
        let fc = Term::app("f", vec![Term::app("c", vec![])]);
        assert_eq!(ax.rhs, Formula::and(Formula::rel("S", vec![fx.clone()]), Formula::eq(fc, fx)));
    }

    #[test]
    fn exists_extends_right_and_accepts_binder_lists() {
        let t = parse_theory("sort A; rel R(A,A); rel P(A);").unwrap();
        let f = parse_formula(&t.signature, "[x:A] P(x) & exists y:A, z:A. R(x,y) & R(y,z)").unwrap();
        let expected = Formula::and(
            Formula::rel_vars("P", &["x"]),
            Formula::exists(
                "y",
                "A",
                Formula::exists(
                    "z",
                    "A",
                    Formula::and(Formula::rel_vars("R", &["x", "y"]), Formula::rel_vars("R", &["y", "z"])),
                ),
            ),
        );
        assert_eq!(f.body, expected);
    }

    #[test]
    fn comments_are_ignored() {
        let t = parse_theory("# header\nsort A; # trailing\nrel R(A,A);\n").unwrap();
        assert_eq!(t.signature.relations().count(), 1);
    }
}
