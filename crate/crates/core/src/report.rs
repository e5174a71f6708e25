//! End-to-end runs over a scenario and their JSON and CSV renderings.

use serde::Serialize;

use crate::analysis::{power_report, rate_report, PowerReport, RateParams, RateReport};
use crate::error::Result;
use crate::grouping::{group_min_gains, GroupAssignment, GroupGains};
use crate::icp::{IndexCode, IndexCodingProblem};
use crate::pipeline::{design_codes, design_plain, design_two_group, Lengths, ThreeGroupCode};
use crate::scenario::Scenario;
use crate::scheduler::{build_plan, verify_delivery, CaseId, Counts, PowerProfile, TransmissionPlan};
use crate::solver::{SolverConfig, SolverKind};

/// Settings that override the scenario's own.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub profile: Option<PowerProfile<f64>>,
    pub solver: Option<SolverKind>,
}

impl RunOptions {
    pub fn resolve(&self, s: &Scenario) -> (PowerProfile<f64>, SolverConfig) {
        let profile = self.profile.unwrap_or_else(|| s.profile_or_default());
        let kind = self.solver.or(s.solver).unwrap_or_default();
        (profile, SolverConfig::of_kind(kind))
    }
}

/// Group members with 1-based user numbers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupingView {
    pub near: Vec<usize>,
    pub intermediate: Vec<usize>,
    pub far: Vec<usize>,
}

impl From<&GroupAssignment> for GroupingView {
    fn from(ga: &GroupAssignment) -> Self {
        let one = |v: &[usize]| v.iter().map(|u| u + 1).collect();
        Self {
            near: one(&ga.near),
            intermediate: one(&ga.intermediate),
            far: one(&ga.far),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodesView {
    pub far: Vec<String>,
    pub intermediate: Vec<String>,
    pub near: Vec<String>,
}

impl From<&ThreeGroupCode> for CodesView {
    fn from(c: &ThreeGroupCode) -> Self {
        Self {
            far: c.far.combinations(),
            intermediate: c.mid.combinations(),
            near: c.near.combinations(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub n: usize,
    pub users: usize,
    pub solver: SolverKind,
    pub profile: PowerProfile<f64>,
    pub grouping: GroupingView,
    pub group_gains: GroupGains<f64>,
    pub codes: CodesView,
    pub lengths: Lengths,
    pub l_ic: usize,
    pub l_icnoma: usize,
    pub plain_code: Vec<String>,
    pub case_id: CaseId,
    pub counts: Counts,
    pub plan: TransmissionPlan<f64>,
    pub delivery_verified: bool,
    /// Absent when the plan is empty.
    pub rates: Option<RateReport<f64>>,
    pub power: Option<PowerReport<f64>>,
}

/// Everything computed for one scenario, kept in typed form for callers
/// that need more than the report.
#[derive(Clone, Debug)]
pub struct RunArtifacts {
    pub problem: IndexCodingProblem,
    pub grouping: GroupAssignment,
    pub code: ThreeGroupCode,
    pub plain: IndexCode,
    pub report: RunReport,
}

/// Grouping, code design, scheduling, delivery check, rates and power.
pub fn run_detailed(s: &Scenario, opts: &RunOptions) -> Result<RunArtifacts> {
    s.validate()?;
    let (profile, solver) = opts.resolve(s);
    let problem = s.problem()?;
    let grouping = s.grouping()?;
    let channel = s.channel()?;
    let gains = group_min_gains(&channel, &grouping)?;
    let code = design_codes(&problem, &grouping, &solver)?;
    let plain = design_plain(&problem, &solver)?;
    let plan = build_plan(&code, &profile);
    let delivery_verified = verify_delivery(&problem, &grouping, &plan);
    let (rates, power) = if plan.is_empty() {
        (None, None)
    } else {
        let rp = RateParams::new(gains, &profile)?;
        (
            Some(rate_report(&plan, &rp)?),
            Some(power_report(&plan, &gains, profile.p, &profile, plain.len())?),
        )
    };
    let report = RunReport {
        n: s.n,
        users: s.users.len(),
        solver: solver.kind,
        profile,
        grouping: (&grouping).into(),
        group_gains: gains,
        codes: (&code).into(),
        lengths: code.lengths(),
        l_ic: plain.len(),
        l_icnoma: plan.len(),
        plain_code: plain.combinations(),
        case_id: plan.case_id,
        counts: plan.counts,
        plan,
        delivery_verified,
        rates,
        power,
    };
    Ok(RunArtifacts {
        problem,
        grouping,
        code,
        plain,
        report,
    })
}

pub fn run(s: &Scenario, opts: &RunOptions) -> Result<RunReport> {
    Ok(run_detailed(s, opts)?.report)
}

/// One CSV line of a run or sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    #[serde(rename = "P")]
    pub p: f64,
    pub case_id: CaseId,
    pub l_f: usize,
    pub l_m: usize,
    pub l_n: usize,
    pub l_ic: usize,
    pub l_icnoma: usize,
    #[serde(rename = "R_avg")]
    pub r_avg: f64,
    #[serde(rename = "R_IC")]
    pub r_ic: f64,
    #[serde(rename = "P_avg")]
    pub p_avg: f64,
    #[serde(rename = "P_saving")]
    pub p_saving: f64,
}

impl From<&RunReport> for SummaryRow {
    fn from(r: &RunReport) -> Self {
        let nan = f64::NAN;
        Self {
            p: r.profile.p,
            case_id: r.case_id,
            l_f: r.lengths.far,
            l_m: r.lengths.mid,
            l_n: r.lengths.near,
            l_ic: r.l_ic,
            l_icnoma: r.l_icnoma,
            r_avg: r.rates.as_ref().map_or(nan, |x| x.r_avg),
            r_ic: r.rates.as_ref().map_or(nan, |x| x.r_ic_baseline),
            p_avg: r.power.as_ref().map_or(nan, |x| x.p_avg),
            p_saving: r.power.as_ref().map_or(nan, |x| x.p_saving),
        }
    }
}

/// Runs the scenario once per power level. Codes do not depend on power, so
/// they are designed once.
pub fn sweep(s: &Scenario, opts: &RunOptions, powers: &[f64]) -> Result<Vec<SummaryRow>> {
    if powers.is_empty() {
        return Err(crate::error::Error::Invalid("power grid is empty".into()));
    }
    let base = run_detailed(s, opts)?;
    let gains = base.report.group_gains;
    let mut rows = Vec::with_capacity(powers.len());
    for &p in powers {
        let profile = base.report.profile.with_power(p)?;
        let plan = build_plan(&base.code, &profile);
        let mut report = base.report.clone();
        report.profile = profile;
        if !plan.is_empty() {
            let rp = RateParams::new(gains, &profile)?;
            report.rates = Some(rate_report(&plan, &rp)?);
            report.power = Some(power_report(&plan, &gains, p, &profile, base.plain.len())?);
        }
        report.plan = plan;
        rows.push(SummaryRow::from(&report));
    }
    Ok(rows)
}

pub fn write_csv<W: std::io::Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(rows: &[SummaryRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// Plain and two-group transmission counts next to the three-group one.
#[derive(Clone, Debug, Serialize)]
pub struct BaselineReport {
    pub l_ic: usize,
    pub plain_code: Vec<String>,
    pub two_group: TwoGroupView,
    pub l_icnoma: usize,
    pub lengths: Lengths,
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoGroupView {
    pub far: Vec<String>,
    pub near: Vec<String>,
    pub transmissions: usize,
}

pub fn baseline(s: &Scenario, opts: &RunOptions) -> Result<BaselineReport> {
    let (_, solver) = opts.resolve(s);
    let problem = s.problem()?;
    let grouping = s.grouping()?;
    let code = design_codes(&problem, &grouping, &solver)?;
    let plain = design_plain(&problem, &solver)?;
    let two = design_two_group(&problem, &grouping, &solver)?;
    Ok(BaselineReport {
        l_ic: plain.len(),
        plain_code: plain.combinations(),
        two_group: TwoGroupView {
            far: two.far.combinations(),
            near: two.near.combinations(),
            transmissions: two.transmissions(),
        },
        l_icnoma: code.transmissions(),
        lengths: code.lengths(),
    })
}
