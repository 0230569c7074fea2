//! What each `rwb` subcommand does, separated from argument parsing so the
//! commands can be driven from tests and examples.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::corpus::{builtin, CorpusTheory};
use super::generate::random_formula;
use super::{HarnessError, VerifyConfig, VerifyReport, Workbench};
use crate::chase::{chase, entails, ChaseStatus, EntailmentVerdict};
use crate::logic::{parse_formula, parse_sequent, parse_theory, Context, Theory};
use crate::model::{enumerate_models, search_space};
use crate::names::Var;
use crate::stone::{all_semilattices, check_equivalence, MeetSemilattice};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILED: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const BUDGET: i32 = 3;
    pub const UNKNOWN: i32 = 4;
}

/// Text for the terminal, a JSON document, and the exit code.
#[derive(Clone, Debug, PartialEq)]
pub struct CommandOutput {
    pub text: String,
    pub json: Value,
    pub code: i32,
}

/// Exit code for an error raised while running a command.
pub fn error_code(e: &HarnessError) -> i32 {
    match e {
        HarnessError::Logic(_) | HarnessError::Input(_) | HarnessError::Stone(_) => exit::PARSE,
        _ => exit::FAILED,
    }
}

/// A theory from a file, or one of the built-in corpus theories by name.
pub fn load_theory_source(name_or_path: &str) -> Result<(String, String), HarnessError> {
    let path = Path::new(name_or_path);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Input(format!("{name_or_path}: {e}")))?;
        let name = path.file_stem().map_or_else(|| name_or_path.to_string(), |s| s.to_string_lossy().into_owned());
        return Ok((name, text));
    }
    match builtin(name_or_path) {
        Some(c) => Ok((c.name, c.source)),
        None => Err(HarnessError::Input(format!("no theory file or built-in theory named `{name_or_path}`"))),
    }
}

fn load_theory(name_or_path: &str) -> Result<Theory, HarnessError> {
    Ok(parse_theory(&load_theory_source(name_or_path)?.1)?)
}

/// `rwb chase`: the universal model of a formula.
pub fn cmd_chase(theory: &str, formula: &str, budget: usize) -> Result<CommandOutput, HarnessError> {
    let t = load_theory(theory)?;
    let f = parse_formula(&t.signature, formula)?;
    let r = chase(&f, &t, budget)?;
    let mut text = String::new();
    let (code, status) = match r.status {
        ChaseStatus::Terminated => (exit::OK, format!("terminated after {} steps", r.trace.len())),
        ChaseStatus::BudgetExhausted(n) => (exit::BUDGET, format!("budget exhausted after {n} steps (partial model)")),
    };
    writeln!(text, "formula: {f}").unwrap();
    writeln!(text, "status:  {status}").unwrap();
    writeln!(text, "generic: ({})", r.generic.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ")).unwrap();
    let model = if r.terminated() { r.original_model()? } else { r.model.clone() };
    write!(text, "{model}").unwrap();
    let mut json = r.to_json();
    json["model"] = model.to_json();
    Ok(CommandOutput { text, json, code })
}

/// `rwb entail`: decides a sequent.
pub fn cmd_entail(theory: &str, sequent: &str, budget: usize) -> Result<CommandOutput, HarnessError> {
    let t = load_theory(theory)?;
    let s = parse_sequent(&t.signature, sequent)?;
    let v = entails(&t, &s, budget)?;
    let mut text = format!("{s}\n{}\n", v.label());
    let code = match &v {
        EntailmentVerdict::Proved => exit::OK,
        EntailmentVerdict::Disproved { countermodel, witness } => {
            let w: Vec<String> = witness.iter().map(|e| e.to_string()).collect();
            write!(text, "witness: ({})\ncountermodel:\n{countermodel}", w.join(", ")).unwrap();
            exit::FAILED
        }
        EntailmentVerdict::Unknown { steps } => {
            writeln!(text, "chase stopped after {steps} steps").unwrap();
            exit::UNKNOWN
        }
    };
    let mut json = v.to_json();
    json["sequent"] = json!(s.to_string());
    Ok(CommandOutput { text, json, code })
}

/// `rwb models`: models up to isomorphism with at most `bound` elements
/// per sort.
pub fn cmd_models(theory: &str, bound: usize) -> Result<CommandOutput, HarnessError> {
    let t = load_theory(theory)?;
    let models: Vec<_> = enumerate_models(&t, bound).collect();
    let mut text = format!(
        "{} models with at most {bound} elements per sort ({} candidates searched)\n",
        models.len(),
        search_space(&t.signature, bound)
    );
    for (i, m) in models.iter().enumerate() {
        write!(text, "--- model {i}\n{m}").unwrap();
    }
    let json = json!({
        "bound": bound,
        "count": models.len(),
        "models": models.iter().map(|m| m.to_json()).collect::<Vec<_>>(),
    });
    Ok(CommandOutput { text, json, code: exit::OK })
}

/// `rwb stone`: compares directed-join preserving and continuous maps
/// `Filt(S) → 2`, for one semilattice given as JSON or for all of them up
/// to `max_size` elements.
pub fn cmd_stone(max_size: usize, input: Option<&str>) -> Result<CommandOutput, HarnessError> {
    let lattices = match input {
        Some(text) => {
            let v: Value =
                serde_json::from_str(text).map_err(|e| HarnessError::Input(format!("semilattice JSON: {e}")))?;
            vec![MeetSemilattice::from_json(&v)?]
        }
        None => all_semilattices(max_size),
    };
    let mut text = String::new();
    let mut reports = Vec::new();
    for s in &lattices {
        let r = check_equivalence(s)?;
        writeln!(
            text,
            "size {}: {} filters, {} opens, {} dj-preserving, {} continuous: {}",
            r.size,
            r.filters,
            r.opens,
            r.dj_preserving,
            r.continuous,
            if r.equal { "equal" } else { "DIFFERENT" }
        )
        .unwrap();
        reports.push(r);
    }
    let all_equal = reports.iter().all(|r| r.equal);
    writeln!(text, "{} semilattices, {}", reports.len(), if all_equal { "all equal" } else { "mismatch found" })
        .unwrap();
    let json = json!({"semilattices": lattices.iter().map(|s| s.to_json()).collect::<Vec<_>>(), "reports": reports});
    Ok(CommandOutput { text, json, code: if all_equal { exit::OK } else { exit::FAILED } })
}

/// A user theory for `verify`: its own axioms, with up to three formulas
/// drawn at random among those whose chase terminates.
pub fn corpus_from_source(name: &str, source: &str, seed: u64, budget: usize) -> Result<CorpusTheory, HarnessError> {
    let t = parse_theory(source)?;
    let sorts: Vec<_> = t.signature.sorts().cloned().collect();
    if sorts.is_empty() {
        return Err(HarnessError::Input(format!("theory `{name}` declares no sorts")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut formulas = Vec::new();
    for _ in 0..60 {
        if formulas.len() == 3 {
            break;
        }
        let n = rng.random_range(1..=2);
        let ctx = Context(
            (0..n).map(|i| (Var::from(format!("x{i}")), sorts[rng.random_range(0..sorts.len())].clone())).collect(),
        );
        let f = random_formula(&t.signature, &ctx, 2, &mut rng);
        if chase(&f, &t, budget)?.terminated() && !formulas.contains(&f) {
            formulas.push(f);
        }
    }
    if formulas.is_empty() {
        return Err(HarnessError::Input(format!("no formula of `{name}` has a terminating chase")));
    }
    let formulas: Vec<String> = formulas.iter().map(|f| f.to_string()).collect();
    let refs: Vec<&str> = formulas.iter().map(String::as_str).collect();
    Ok(CorpusTheory::new(name, source, &refs)?)
}

/// `rwb verify`: runs property suites over the built-in corpus, or over a
/// single theory when one is given.
pub fn cmd_verify(
    theory: Option<&str>,
    suite: &str,
    config: VerifyConfig,
) -> Result<(VerifyReport, CommandOutput), HarnessError> {
    let (theories, name) = match theory {
        Some(name_or_path) => {
            let (name, src) = load_theory_source(name_or_path)?;
            let c = match builtin(&name) {
                Some(c) if c.source == src => c,
                _ => corpus_from_source(&name, &src, config.seed, config.budget)?,
            };
            (vec![c], Some(name))
        }
        None => (super::corpus::corpus(), None),
    };
    let wb = Workbench::new(config.clone(), theories);
    let suites = wb.run(suite)?;
    let report = VerifyReport::new(config.seed, name, suites);
    let mut text = String::new();
    for s in &report.suites {
        writeln!(text, "{}", s.summary_line()).unwrap();
        for (inst, prop) in s.failures().into_iter().take(5) {
            writeln!(text, "    failed: {inst} {prop}").unwrap();
        }
    }
    writeln!(text, "{}", if report.passed { "PASS" } else { "FAIL" }).unwrap();
    let json = serde_json::to_value(&report).expect("reports serialise");
    let code = if report.passed { exit::OK } else { exit::FAILED };
    Ok((report, CommandOutput { text, json, code }))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRANS: &str = "transitivity";

    #[test]
    fn chase_command_prints_the_three_element_model() {
        let out = cmd_chase(TRANS, "[x:A, y:A, z:A] R(x, y) & R(y, z)", 100).unwrap();
        assert_eq!(out.code, exit::OK);
        assert_eq!(out.json["model"]["carriers"]["A"].as_array().unwrap().len(), 3, "{}", out.json);
        let out = cmd_chase("successor", "[x:A, y:A] R(x, y)", 20).unwrap();
        assert_eq!(out.code, exit::BUDGET);
        assert!(out.json["model"].is_object());
        let out = cmd_chase(TRANS, "[x:A] true", 0).unwrap();
        assert_eq!(out.code, exit::OK);
    }

    #[test]
    fn entail_command_codes() {
        assert_eq!(
            cmd_entail(TRANS, "[x:A,y:A,z:A,w:A] R(x,y) & R(y,z) & R(z,w) |- R(x,w)", 100).unwrap().code,
            exit::OK
        );
        let sym = cmd_entail("functional", "[x:A, y:A] R(x, y) |- R(y, x)", 100).unwrap();
        assert_eq!(sym.code, exit::FAILED);
        assert!(sym.text.contains("countermodel"));
        assert_eq!(cmd_entail("successor", "[x:A, y:A] R(x, y) |- R(y, x)", 30).unwrap().code, exit::UNKNOWN);
    }

    #[test]
    fn parse_errors_map_to_code_two() {
        let e = cmd_chase(TRANS, "[x:A] forall y:A. R(x, y)", 10).unwrap_err();
        assert_eq!(error_code(&e), exit::PARSE);
        let e = cmd_chase("/nonexistent/theory.rth", "[x:A] true", 10).unwrap_err();
        assert_eq!(error_code(&e), exit::PARSE);
    }

    #[test]
    fn models_and_stone_commands() {
        let out = cmd_models("preorder", 2).unwrap();
        assert_eq!(out.json["count"], 5);
        let out = cmd_stone(3, None).unwrap();
        assert_eq!(out.code, exit::OK);
        assert_eq!(out.json["reports"].as_array().unwrap().len(), 3);
        let out = cmd_stone(0, Some(r#"{"order": [[1,1],[0,1]]}"#)).unwrap();
        assert_eq!(out.json["reports"][0]["continuous"], 3);
        assert!(cmd_stone(0, Some("{")).is_err());
    }

    #[test]
    fn verify_on_a_user_theory() {
        let src = "sort A; rel P(A); rel R(A, A); axiom [x:A, y:A] R(x, y) & P(x) |- P(y);";
        let c = corpus_from_source("mine", src, 5, 1000).unwrap();
        assert!(!c.formulas.is_empty());
        let cfg = VerifyConfig { corpus_bound: 2, hom_bound: 2, diagrams: 4, samples: 6, ..VerifyConfig::default() };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mine.rth");
        std::fs::write(&path, src).unwrap();
        let (report, out) = cmd_verify(Some(path.to_str().unwrap()), "universal,genericity,colimit", cfg).unwrap();
        assert!(report.passed, "{}", out.text);
        assert_eq!(report.theory.as_deref(), Some("mine"));
    }
}
