//! Staged code design for the three groups.
//!
//! The far code is a plain index code for the far users alone. The
//! intermediate users then treat the far rows as extra coded side
//! information (they recover them through SIC), and the near users treat
//! both the far and the intermediate rows that way. Stages run once, far to
//! near.
//!
//! With the exact solver, several codes of the same minimum length usually
//! exist for a stage. The stage picks the one that keeps the later stages
//! shortest, and after that the one serving the most demands of the later
//! groups outright, since those groups recover it through SIC anyway.

use std::cmp::Reverse;

use serde::Serialize;

use crate::error::Result;
use crate::gf2::BitMatrix;
use crate::grouping::{assign_groups, ChannelState, Group, GroupAssignment};
use crate::icp::{reduce_by_coded_rows, IndexCode, IndexCodingProblem};
use crate::solver::{SolverConfig, SolverKind};

/// Encoding matrices of the three stages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreeGroupCode {
    pub far: IndexCode,
    pub mid: IndexCode,
    pub near: IndexCode,
}

/// `(l_f, l_m, l_n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Lengths {
    pub far: usize,
    pub mid: usize,
    pub near: usize,
}

impl Lengths {
    pub fn new(far: usize, mid: usize, near: usize) -> Self {
        Self { far, mid, near }
    }

    pub fn max(&self) -> usize {
        self.far.max(self.mid).max(self.near)
    }

    pub fn min(&self) -> usize {
        self.far.min(self.mid).min(self.near)
    }

    pub fn of(&self, g: Group) -> usize {
        match g {
            Group::Far => self.far,
            Group::Intermediate => self.mid,
            Group::Near => self.near,
        }
    }
}

impl From<(usize, usize, usize)> for Lengths {
    fn from((far, mid, near): (usize, usize, usize)) -> Self {
        Self { far, mid, near }
    }
}

impl ThreeGroupCode {
    pub fn lengths(&self) -> Lengths {
        Lengths::new(self.far.len(), self.mid.len(), self.near.len())
    }

    pub fn code(&self, g: Group) -> &IndexCode {
        match g {
            Group::Far => &self.far,
            Group::Intermediate => &self.mid,
            Group::Near => &self.near,
        }
    }

    /// Number of transmissions the layered schedule needs.
    pub fn transmissions(&self) -> usize {
        self.lengths().max()
    }
}

fn members_of(ga: &GroupAssignment, groups: &[Group]) -> Vec<usize> {
    let mut users: Vec<usize> = groups.iter().flat_map(|&g| ga.members(g).iter().copied()).collect();
    users.sort_unstable();
    users
}

/// Cap on equally short candidates compared at one stage.
const CANDIDATE_LIMIT: usize = 64;

/// Minimum-length codes for `sub`; a single code with the greedy solver.
fn candidates(sub: &IndexCodingProblem, solver: &SolverConfig) -> Result<Vec<IndexCode>> {
    if solver.kind == SolverKind::Greedy {
        return Ok(vec![solver.solve(sub, &[])?]);
    }
    let found = solver.exact.minimal_codes(sub, sub.n(), CANDIDATE_LIMIT)?;
    if found.is_empty() {
        return Ok(vec![solver.solve(sub, &[])?]);
    }
    Ok(found)
}

fn served(p: &IndexCodingProblem, c: &IndexCode) -> Reverse<usize> {
    Reverse(p.count_decodable(c.rows()))
}

/// The candidate with the smallest key; ties keep search order.
fn pick<K: Ord>(cands: Vec<IndexCode>, mut key: impl FnMut(&IndexCode) -> Result<K>) -> Result<IndexCode> {
    let mut best: Option<(K, IndexCode)> = None;
    for c in cands {
        let k = key(&c)?;
        if best.as_ref().is_none_or(|(b, _)| k < *b) {
            best = Some((k, c));
        }
    }
    Ok(best.expect("candidate lists are never empty").1)
}

/// Mid code for an already reduced mid problem, ranked by the near length it
/// leaves, then by near demands it serves.
fn best_mid(mid_sub: &IndexCodingProblem, near_sub: &IndexCodingProblem, solver: &SolverConfig) -> Result<(IndexCode, usize)> {
    let mid = pick(candidates(mid_sub, solver)?, |m| {
        let rest = reduce_by_coded_rows(near_sub, m.matrix())?;
        Ok((solver.solve(&rest, &[])?.len(), served(near_sub, m)))
    })?;
    let rest = reduce_by_coded_rows(near_sub, mid.matrix())?;
    let l_near = solver.solve(&rest, &[])?.len();
    Ok((mid, l_near))
}

/// Far code from the far users' own side information. Among equally short
/// codes it prefers the shortest intermediate code, then the shortest near
/// code reachable after it, then the most intermediate and near demands
/// served outright.
pub fn design_far_code(p: &IndexCodingProblem, ga: &GroupAssignment, solver: &SolverConfig) -> Result<IndexCode> {
    let sub = p.restrict(&ga.far);
    let (mid_p, near_p) = (p.restrict(&ga.intermediate), p.restrict(&ga.near));
    pick(candidates(&sub, solver)?, |f| {
        let mid_sub = reduce_by_coded_rows(&mid_p, f.matrix())?;
        let near_sub = reduce_by_coded_rows(&near_p, f.matrix())?;
        let (mid, l_near) = best_mid(&mid_sub, &near_sub, solver)?;
        Ok((mid.len(), l_near, served(&mid_p, f), served(&near_p, f)))
    })
}

/// Intermediate code, with the far rows as extra coded side information.
/// Ties go to the code leaving the shortest near code.
pub fn design_mid_code(
    p: &IndexCodingProblem,
    ga: &GroupAssignment,
    far: &IndexCode,
    solver: &SolverConfig,
) -> Result<IndexCode> {
    let sub = reduce_by_coded_rows(&p.restrict(&ga.intermediate), far.matrix())?;
    let near_sub = reduce_by_coded_rows(&p.restrict(&ga.near), far.matrix())?;
    Ok(best_mid(&sub, &near_sub, solver)?.0)
}

/// Near code, with the far and intermediate rows as extra coded side
/// information.
pub fn design_near_code(
    p: &IndexCodingProblem,
    ga: &GroupAssignment,
    far: &IndexCode,
    mid: &IndexCode,
    solver: &SolverConfig,
) -> Result<IndexCode> {
    let extra = far.matrix().stack(mid.matrix())?;
    let sub = reduce_by_coded_rows(&p.restrict(&ga.near), &extra)?;
    solver.solve(&sub, &[])
}

/// Runs the three stages for a given grouping.
pub fn design_codes(p: &IndexCodingProblem, ga: &GroupAssignment, solver: &SolverConfig) -> Result<ThreeGroupCode> {
    let far = design_far_code(p, ga, solver)?;
    let mid = design_mid_code(p, ga, &far, solver)?;
    let near = design_near_code(p, ga, &far, &mid, solver)?;
    Ok(ThreeGroupCode { far, mid, near })
}

/// Groups users by gain, then designs the three codes.
pub fn run_pipeline<T: num_traits::Float>(
    p: &IndexCodingProblem,
    ch: &ChannelState<T>,
    solver: &SolverConfig,
) -> Result<(GroupAssignment, ThreeGroupCode)> {
    if ch.len() != p.num_users() {
        return Err(crate::error::Error::Invalid(format!(
            "{} gains for {} users",
            ch.len(),
            p.num_users()
        )));
    }
    let ga = assign_groups(ch)?;
    let code = design_codes(p, &ga, solver)?;
    Ok((ga, code))
}

/// The two-group reference design: intermediate users are folded into the
/// far group, and the near code uses the far code as coded side information.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoGroupCode {
    pub far: IndexCode,
    pub near: IndexCode,
}

impl TwoGroupCode {
    /// `max(l_f*, l_n*)`.
    pub fn transmissions(&self) -> usize {
        self.far.len().max(self.near.len())
    }
}

pub fn design_two_group(p: &IndexCodingProblem, ga: &GroupAssignment, solver: &SolverConfig) -> Result<TwoGroupCode> {
    let far_users = members_of(ga, &[Group::Far, Group::Intermediate]);
    let near_p = p.restrict(&ga.near);
    let far = pick(candidates(&p.restrict(&far_users), solver)?, |f| {
        let rest = reduce_by_coded_rows(&near_p, f.matrix())?;
        Ok((solver.solve(&rest, &[])?.len(), served(&near_p, f)))
    })?;
    let near_sub = reduce_by_coded_rows(&p.restrict(&ga.near), far.matrix())?;
    let near = solver.solve(&near_sub, &[])?;
    Ok(TwoGroupCode { far, near })
}

/// A single code for every user, ignoring groups.
pub fn design_plain(p: &IndexCodingProblem, solver: &SolverConfig) -> Result<IndexCode> {
    solver.solve(p, &[])
}

/// Every row the near group can recover: far, intermediate and near rows.
pub fn all_rows(code: &ThreeGroupCode) -> BitMatrix {
    code.far
        .matrix()
        .stack(code.mid.matrix())
        .and_then(|m| m.stack(code.near.matrix()))
        .expect("stage codes share the message dimension")
}
