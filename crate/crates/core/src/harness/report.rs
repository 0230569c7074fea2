use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

/// Version of the JSON layout produced by `rwb verify`.
pub const SCHEMA_VERSION: &str = "1";

/// How a single property fared on one instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    /// The question could not be settled (e.g. an entailment left open).
    Unknown,
    /// A chase ran out of steps before the check could be made.
    BudgetExhausted,
    /// The property makes no claim about this instance.
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyResult {
    pub property: String,
    pub outcome: Outcome,
    /// Number of elementary comparisons behind the outcome.
    pub checks: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl PropertyResult {
    pub fn new(property: &str, outcome: Outcome, checks: usize) -> Self {
        PropertyResult { property: property.to_string(), outcome, checks, witness: None }
    }

    /// `Pass` when `ok`, otherwise `Fail` carrying `witness`.
    pub fn check(property: &str, ok: bool, checks: usize, witness: impl FnOnce() -> Value) -> Self {
        let mut r = PropertyResult::new(property, if ok { Outcome::Pass } else { Outcome::Fail }, checks);
        if !ok {
            r.witness = Some(witness());
        }
        r
    }

    pub fn with_witness(mut self, witness: Value) -> Self {
        self.witness = Some(witness);
        self
    }
}

/// One generated or enumerated instance of a suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceReport {
    /// Stable identifier; reports are ordered by it.
    pub id: String,
    pub descriptor: Value,
    pub properties: Vec<PropertyResult>,
}

impl InstanceReport {
    pub fn new(id: impl Into<String>, descriptor: Value) -> Self {
        InstanceReport { id: id.into(), descriptor, properties: Vec::new() }
    }

    pub fn push(&mut self, p: PropertyResult) {
        self.properties.push(p);
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tallies {
    pub instances: usize,
    pub pass: usize,
    pub fail: usize,
    pub unknown: usize,
    pub budget_exhausted: usize,
    pub not_applicable: usize,
}

/// The outcome of one suite.
///
/// The suite passes when no property failed anywhere (suite-level
/// requirements included) and at least one property passed, so a run made
/// only of `Unknown` or `BudgetExhausted` outcomes does not count.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub tallies: Tallies,
    /// Checks over the suite as a whole, such as minimum instance counts.
    pub requirements: Vec<PropertyResult>,
    pub instances: Vec<InstanceReport>,
    /// Wall-clock time; left out of the JSON so reports are reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SuiteReport {
    /// Orders the instances by id and computes tallies and the verdict.
    pub fn new(suite: &str, mut instances: Vec<InstanceReport>, requirements: Vec<PropertyResult>) -> Self {
        instances.sort_by(|a, b| crate::names::natural_cmp(&a.id, &b.id));
        let mut tallies = Tallies { instances: instances.len(), ..Tallies::default() };
        for p in instances.iter().flat_map(|i| &i.properties).chain(&requirements) {
            match p.outcome {
                Outcome::Pass => tallies.pass += 1,
                Outcome::Fail => tallies.fail += 1,
                Outcome::Unknown => tallies.unknown += 1,
                Outcome::BudgetExhausted => tallies.budget_exhausted += 1,
                Outcome::NotApplicable => tallies.not_applicable += 1,
            }
        }
        let passed = tallies.fail == 0 && tallies.pass > 0;
        SuiteReport { suite: suite.to_string(), passed, tallies, requirements, instances, elapsed: Duration::ZERO }
    }

    /// Number of instances on which `property` ended with `outcome`.
    pub fn count(&self, property: &str, outcome: Outcome) -> usize {
        self.instances
            .iter()
            .flat_map(|i| &i.properties)
            .filter(|p| p.property == property && p.outcome == outcome)
            .count()
    }

    /// The failing properties, as `(instance id, property)`.
    pub fn failures(&self) -> Vec<(&str, &str)> {
        let inst = self.instances.iter().flat_map(|i| i.properties.iter().map(move |p| (i.id.as_str(), p)));
        let req = self.requirements.iter().map(|p| ("<suite>", p));
        inst.chain(req).filter(|(_, p)| p.outcome == Outcome::Fail).map(|(i, p)| (i, p.property.as_str())).collect()
    }

    /// One line for terminal output.
    pub fn summary_line(&self) -> String {
        let t = &self.tallies;
        format!(
            "{:<14} {}  instances={} pass={} fail={} unknown={} budget={} n/a={}  ({:.2?})",
            self.suite,
            if self.passed { "PASS" } else { "FAIL" },
            t.instances,
            t.pass,
            t.fail,
            t.unknown,
            t.budget_exhausted,
            t.not_applicable,
            self.elapsed
        )
    }
}

/// Everything `rwb verify` writes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub schema_version: &'static str,
    pub seed: u64,
    pub theory: Option<String>,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn new(seed: u64, theory: Option<String>, suites: Vec<SuiteReport>) -> Self {
        let passed = suites.iter().all(|s| s.passed);
        VerifyReport { schema_version: SCHEMA_VERSION, seed, theory, passed, suites }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_alone_does_not_pass() {
        let mut i = InstanceReport::new("a", Value::Null);
        i.push(PropertyResult::new("p", Outcome::Unknown, 1));
        assert!(!SuiteReport::new("s", vec![i.clone()], vec![]).passed);
        i.push(PropertyResult::new("q", Outcome::Pass, 1));
        let r = SuiteReport::new("s", vec![i.clone()], vec![]);
        assert!(r.passed);
        assert_eq!(r.tallies.unknown, 1);
        i.push(PropertyResult::check("r", false, 1, || Value::from("boom")));
        let r = SuiteReport::new("s", vec![i], vec![]);
        assert!(!r.passed);
        assert_eq!(r.failures(), vec![("a", "r")]);
    }

    #[test]
    fn instances_are_ordered_by_id_and_time_is_not_serialised() {
        let ids = ["t/10", "t/2", "t/1"];
        let inst = ids.iter().map(|id| {
            let mut i = InstanceReport::new(*id, Value::Null);
            i.push(PropertyResult::new("p", Outcome::Pass, 1));
            i
        });
        let mut r = SuiteReport::new("s", inst.collect(), vec![]);
        assert_eq!(r.instances.iter().map(|i| i.id.as_str()).collect::<Vec<_>>(), ["t/1", "t/2", "t/10"]);
        let before = serde_json::to_string(&r).unwrap();
        r.elapsed = Duration::from_secs(3);
        assert_eq!(serde_json::to_string(&r).unwrap(), before);
    }
}
