//! Pass/fail records shared by every verification routine.

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(rename = "status", serialize_with = "pass_fail")]
    pub passed: bool,
    /// Largest residual for floating-point checks; `None` for exact ones.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

fn pass_fail<S: serde::Serializer>(passed: &bool, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(if *passed { "pass" } else { "fail" })
}

impl Check {
    pub fn exact(name: impl Into<String>, passed: bool) -> Self {
        Check { name: name.into(), passed, residual: None, exact: true, detail: None }
    }

    /// Passes when `residual <= tol`; NaN never passes.
    pub fn within(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            passed: residual <= tol,
            residual: Some(residual),
            exact: false,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CheckList {
    pub checks: Vec<Check>,
}

impl CheckList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: CheckList) {
        self.checks.extend(other.checks);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_residual_fails() {
        assert!(!Check::within("x", f64::NAN, 1.0).passed);
        assert!(Check::within("x", 0.5, 1.0).passed);
    }

    #[test]
    fn aggregation() {
        let mut list = CheckList::new();
        list.push(Check::exact("a", true));
        assert!(list.all_passed());
        list.push(Check::exact("b", false));
        assert_eq!(list.first_failure().unwrap().name, "b");
    }
}
