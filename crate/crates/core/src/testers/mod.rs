//! Monotonicity testers, one per access model, plus the exponential-property
//! tester and the tolerant testers.
//!
//! Every tester borrows a session whose model matches its requirements,
//! returns a [`Verdict`], and never exceeds [`budget`] on any run.

mod bisection;
mod budget;
mod cumulative;
mod eval;
mod exp_property;
mod polyeps;
mod tolerant;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::Constants;
use crate::distcore::DistError;
use crate::oracles::{AccessModel, OracleError, OracleSession, QueryLog};
use crate::subroutines::LearnError;

pub use bisection::{bisection_schedule, test_monotone_cond_polylog, test_monotone_intcond, test_monotone_samp, BisectionSchedule};
pub use budget::budget;
pub use cumulative::{cumulative_schedule, test_monotone_cumulative, CumulativeSchedule};
pub use eval::{eval_schedule, test_monotone_eval, EvalSchedule};
pub use exp_property::{exp_property_schedule, test_exponential_property, test_growth_property, ExpSchedule};
pub use polyeps::{test_monotone_cond_polyeps, test_monotone_cond_polyeps_with, ReducedView};
pub use tolerant::{
    learn_flattening_cumulative, tolerant_schedule, tolerant_test_monotone_cumulative, tolerant_test_monotone_dual,
    ToleranceParams,
    TolerantSchedule,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Accept,
    Reject,
}

/// The step that caused a rejection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    /// Too many intervals were split.
    SplitLimit,
    /// The learned histogram is far from monotone.
    FlatDistance,
    /// A comparison exposed a violation of the exponential property.
    ExpProperty,
    /// The distribution is far from its flattening.
    FlatteningDistance,
    /// The distribution is far from the learned hypothesis.
    Identity,
    /// An exact block-weight witness was found.
    Witness,
    /// The oracle refused to condition on a zero-mass set.
    OracleFailure,
}

impl Step {
    pub fn name(self) -> &'static str {
        match self {
            Step::SplitLimit => "split_limit",
            Step::FlatDistance => "flat_distance",
            Step::ExpProperty => "exp_property",
            Step::FlatteningDistance => "flattening_distance",
            Step::Identity => "identity",
            Step::Witness => "witness",
            Step::OracleFailure => "oracle_failure",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Verdict {
    pub decision: Decision,
    pub log: QueryLog,
    pub rejected_at: Option<Step>,
}

impl Verdict {
    pub fn accepted(&self) -> bool {
        self.decision == Decision::Accept
    }

    pub(crate) fn accept(s: &OracleSession) -> Self {
        Verdict {
            decision: Decision::Accept,
            log: s.log(),
            rejected_at: None,
        }
    }

    pub(crate) fn reject(s: &OracleSession, step: Step) -> Self {
        Verdict {
            decision: Decision::Reject,
            log: s.log(),
            rejected_at: Some(step),
        }
    }
}

#[derive(Debug, Error)]
pub enum TesterError {
    #[error("{tester} needs the {required} model, session uses {found}")]
    WrongModel {
        tester: &'static str,
        required: AccessModel,
        found: AccessModel,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Oracle(OracleError),
    #[error(transparent)]
    Dist(#[from] DistError),
}

impl From<LearnError> for TesterError {
    fn from(e: LearnError) -> Self {
        match e {
            LearnError::Oracle(o) => TesterError::Oracle(o),
            LearnError::Dist(d) => TesterError::Dist(d),
        }
    }
}

/// Runs a tester body, turning zero-mass oracle failures into rejections.
pub(crate) fn guarded(
    s: &mut OracleSession,
    body: impl FnOnce(&mut OracleSession) -> Result<Verdict, TesterError>,
) -> Result<Verdict, TesterError> {
    match body(s) {
        Err(TesterError::Oracle(OracleError::ZeroMass)) => Ok(Verdict::reject(s, Step::OracleFailure)),
        r => r,
    }
}

impl From<OracleError> for TesterError {
    fn from(e: OracleError) -> Self {
        TesterError::Oracle(e)
    }
}

pub(crate) fn check_eps(eps: f64) -> Result<(), TesterError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(TesterError::InvalidParameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    Ok(())
}

pub(crate) fn require(s: &OracleSession, tester: TesterKind) -> Result<(), TesterError> {
    let required = tester.model();
    if s.model() != required {
        return Err(TesterError::WrongModel {
            tester: tester.name(),
            required,
            found: s.model(),
        });
    }
    Ok(())
}

/// The testers available to the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TesterKind {
    Samp,
    IntCond,
    CondPolylog,
    CondPolyeps,
    Eval,
    Cumulative,
    TolerantDual,
    TolerantCumulative,
    ExpProperty,
}

impl TesterKind {
    pub const ALL: [TesterKind; 9] = [
        TesterKind::Samp,
        TesterKind::IntCond,
        TesterKind::CondPolylog,
        TesterKind::CondPolyeps,
        TesterKind::Eval,
        TesterKind::Cumulative,
        TesterKind::TolerantDual,
        TesterKind::TolerantCumulative,
        TesterKind::ExpProperty,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TesterKind::Samp => "samp",
            TesterKind::IntCond => "intcond",
            TesterKind::CondPolylog => "cond_polylog",
            TesterKind::CondPolyeps => "cond_polyeps",
            TesterKind::Eval => "eval",
            TesterKind::Cumulative => "cumulative",
            TesterKind::TolerantDual => "tolerant_dual",
            TesterKind::TolerantCumulative => "tolerant_cumulative",
            TesterKind::ExpProperty => "exp_property",
        }
    }

    /// The access model the tester runs under.
    pub fn model(self) -> AccessModel {
        match self {
            TesterKind::Samp => AccessModel::Samp,
            TesterKind::IntCond => AccessModel::IntCond,
            TesterKind::CondPolylog | TesterKind::CondPolyeps => AccessModel::Cond,
            TesterKind::Eval => AccessModel::Eval,
            TesterKind::Cumulative | TesterKind::TolerantCumulative => AccessModel::CumulativeDual,
            TesterKind::TolerantDual => AccessModel::Dual,
            TesterKind::ExpProperty => AccessModel::PairCond,
        }
    }

    pub fn is_tolerant(self) -> bool {
        matches!(self, TesterKind::TolerantDual | TesterKind::TolerantCumulative)
    }
}

impl fmt::Display for TesterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TesterKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        TesterKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown tester `{s}`"))
    }
}

/// Accuracy parameters of one tester run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestParams {
    pub eps: f64,
    pub tolerance: Option<ToleranceParams>,
    /// Growth slack of the exponential-property tester.
    pub alpha: Option<f64>,
}

impl TestParams {
    pub fn eps(eps: f64) -> Self {
        TestParams {
            eps,
            tolerance: None,
            alpha: None,
        }
    }
}

/// Runs `kind` on `s`, using the exact uniformity-distance plugin where one
/// is needed.
pub fn run_tester(
    kind: TesterKind,
    s: &mut OracleSession,
    p: &TestParams,
    c: &Constants,
) -> Result<Verdict, TesterError> {
    let tol = || {
        p.tolerance
            .ok_or_else(|| TesterError::InvalidParameter("tolerant testers need eps1, eps2 and gamma".into()))
    };
    match kind {
        TesterKind::Samp => test_monotone_samp(s, p.eps, c),
        TesterKind::IntCond => test_monotone_intcond(s, p.eps, c),
        TesterKind::CondPolylog => test_monotone_cond_polylog(s, p.eps, c),
        TesterKind::CondPolyeps => test_monotone_cond_polyeps(s, p.eps, c),
        TesterKind::Eval => test_monotone_eval(s, p.eps, c),
        TesterKind::Cumulative => test_monotone_cumulative(s, p.eps, c),
        TesterKind::TolerantDual => tolerant_test_monotone_dual(s, &tol()?, c),
        TesterKind::TolerantCumulative => tolerant_test_monotone_cumulative(s, &tol()?, c),
        TesterKind::ExpProperty => {
            let alpha = p
                .alpha
                .ok_or_else(|| TesterError::InvalidParameter("exp_property needs alpha".into()))?;
            test_exponential_property(s, alpha, p.eps, c)
        }
    }
}
