//! Workflow validation and permission-only dry runs.
//!
//! A dry run walks every task in step order and checks, for the workflow's
//! role, that the task's business object is enabled and that the role may use
//! the BOL the object belongs to. Nothing is executed and `rule` expressions
//! are not evaluated.

use serde::Serialize;

use crate::model::{workflow_violations, ConfigCategory, SettingValue, Slot, ValidationReport, WorkflowDef};
use crate::resolver::{check_bo_enabled, check_bol_access, get_setting, BolDecision, DocSource, ResolveError};

/// Settings key prefix mapping a business object to its BOL: `bol.of.<bo>`.
pub const BOL_KEY_PREFIX: &str = "bol.of.";
/// BOL of a business object with no (scalar) `bol.of.<bo>` setting.
pub const UNASSIGNED_BOL: &str = "UNASSIGNED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Ok,
    BoDisabled,
    BolForbidden,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub step_no: u32,
    pub bo_name: String,
    pub method: String,
    pub bol: String,
    pub rule: Option<String>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DryRunTrace {
    pub workflow_id: String,
    pub role: String,
    pub steps: Vec<TraceStep>,
}

impl DryRunTrace {
    pub fn all_ok(&self) -> bool {
        self.steps.iter().all(|s| s.verdict == Verdict::Ok)
    }
}

/// Checks `wf` against the tenant's resolved business roles.
pub fn validate_workflow(src: &dyn DocSource, wf: &WorkflowDef) -> Result<ValidationReport, ResolveError> {
    let roles = src.document(&Slot::from(ConfigCategory::BusinessRoles))?;
    let names = roles.business_roles().expect("business roles document").iter().map(|r| r.name.clone()).collect();
    Ok(ValidationReport::from_unsorted(workflow_violations(wf, Some(&names))))
}

/// The BOL a business object belongs to.
pub fn bol_of(src: &dyn DocSource, bo_name: &str) -> Result<String, ResolveError> {
    Ok(match get_setting(src, &format!("{BOL_KEY_PREFIX}{bo_name}"))?.value {
        Some(SettingValue::Scalar(bol)) => bol,
        _ => UNASSIGNED_BOL.to_string(),
    })
}

/// Looks a workflow up by id in the tenant's resolved workflows.
pub fn find_workflow(src: &dyn DocSource, id: &str) -> Result<WorkflowDef, ResolveError> {
    let wfs = src.document(&Slot::from(ConfigCategory::Workflows))?;
    wfs.workflows()
        .expect("workflows document")
        .iter()
        .find(|w| w.id == id)
        .cloned()
        .ok_or_else(|| ResolveError::UnknownWorkflow(id.to_string()))
}

/// One verdict per task, in step order. A disabled business object wins
/// over a forbidden BOL. Invalid workflows are refused.
pub fn dry_run(src: &dyn DocSource, wf: &WorkflowDef) -> Result<DryRunTrace, ResolveError> {
    let report = validate_workflow(src, wf)?;
    if !report.is_empty() {
        return Err(ResolveError::InvalidWorkflow(report));
    }
    let mut steps = Vec::with_capacity(wf.tasks.len());
    for task in &wf.tasks {
        let bol = bol_of(src, &task.bo_name)?;
        let verdict = if !check_bo_enabled(src, &task.bo_name)?.is_enabled() {
            Verdict::BoDisabled
        } else if check_bol_access(src, &wf.role_binding, &bol)? == BolDecision::Forbidden {
            Verdict::BolForbidden
        } else {
            Verdict::Ok
        };
        steps.push(TraceStep {
            step_no: task.step_no,
            bo_name: task.bo_name.clone(),
            method: task.method.clone(),
            bol,
            rule: task.rule.clone(),
            verdict,
        });
    }
    Ok(DryRunTrace { workflow_id: wf.id.clone(), role: wf.role_binding.clone(), steps })
}
