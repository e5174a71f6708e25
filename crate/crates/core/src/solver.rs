//! Code search for index coding problems.
//!
//! The exact solver works on the coset formulation of linear decodability:
//! user `u` decodes `x_j` from a code with row space `C` iff `C` meets the
//! coset `e_j + span(B_u)`, where `B_u` is the user's effective side
//! information generator. A minimum-length code is therefore the span of one
//! representative per demand, and the search picks representatives demand by
//! demand, skipping demands the partial span already serves. Lengths are
//! tried in increasing order, so the first complete span found is optimal.
//!
//! The greedy solver adds, one at a time, the row that newly serves the most
//! outstanding demands.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector, XorBasis};
use crate::icp::{IndexCode, IndexCodingProblem};

/// Which search produces the codes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    #[default]
    Exact,
    Greedy,
}

impl std::str::FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(SolverKind::Exact),
            "greedy" => Ok(SolverKind::Greedy),
            other => Err(Error::Parse(format!("unknown solver {other:?}, expected exact|greedy"))),
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverKind::Exact => "exact",
            SolverKind::Greedy => "greedy",
        })
    }
}

/// Default message-count bound for exact search.
pub const DEFAULT_EXACT_BOUND: usize = 10;

/// Exact minimum-length search with a configurable size bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactSolver {
    /// Largest message count accepted; at most 64.
    pub max_messages: usize,
    /// Cap on complete codes examined when ranking equally short codes.
    pub tie_break_budget: usize,
}

impl Default for ExactSolver {
    fn default() -> Self {
        Self {
            max_messages: DEFAULT_EXACT_BOUND,
            tie_break_budget: 200_000,
        }
    }
}

/// Exact search with default settings; see [`ExactSolver::solve`].
pub fn solve_exact(p: &IndexCodingProblem, l_max: usize) -> Result<Option<IndexCode>> {
    ExactSolver::default().solve(p, l_max)
}

impl ExactSolver {
    pub fn with_bound(max_messages: usize) -> Self {
        Self {
            max_messages,
            ..Self::default()
        }
    }

    /// Returns a valid code of minimum length, or `None` when every valid
    /// code is longer than `l_max`.
    pub fn solve(&self, p: &IndexCodingProblem, l_max: usize) -> Result<Option<IndexCode>> {
        self.search(p, l_max, &[])
    }

    /// Like [`solve`](Self::solve), but among minimum-length codes returns
    /// one that serves the most `(user, want)` pairs of `downstream[0]` when
    /// handed to those users as extra coded side information, then of
    /// `downstream[1]`, and so on. Ties keep the first code in search order.
    pub fn solve_preferring(
        &self,
        p: &IndexCodingProblem,
        l_max: usize,
        downstream: &[IndexCodingProblem],
    ) -> Result<Option<IndexCode>> {
        if let Some(d) = downstream.iter().find(|d| d.n() != p.n()) {
            return Err(Error::DimensionMismatch {
                expected: p.n(),
                found: d.n(),
            });
        }
        self.search(p, l_max, downstream)
    }

    /// Every minimum-length code up to `limit` of them, one per distinct row
    /// space, in search order. Empty when no code of length `l_max` or less
    /// exists.
    pub fn minimal_codes(&self, p: &IndexCodingProblem, l_max: usize, limit: usize) -> Result<Vec<IndexCode>> {
        let inst = self.instance(p)?;
        let Some(found) = self.deepen(&inst, l_max, &[], Some(limit.max(1))) else {
            return Ok(Vec::new());
        };
        found.collected.iter().map(|rows| to_code(p.n(), rows)).collect()
    }

    fn instance(&self, p: &IndexCodingProblem) -> Result<Instance> {
        let bound = self.max_messages.min(64);
        if p.n() > bound {
            return Err(Error::CapabilityExceeded { n: p.n(), bound });
        }
        Ok(Instance::new(p))
    }

    fn search(
        &self,
        p: &IndexCodingProblem,
        l_max: usize,
        downstream: &[IndexCodingProblem],
    ) -> Result<Option<IndexCode>> {
        let inst = self.instance(p)?;
        let scorers: Vec<Instance> = downstream.iter().map(Instance::new).collect();
        match self.deepen(&inst, l_max, &scorers, None) {
            Some(Found { best: Some((rows, _)), .. }) => Ok(Some(to_code(p.n(), &rows)?)),
            _ => Ok(None),
        }
    }

    /// Iterative deepening on the length; returns the state of the first
    /// length at which a complete code exists.
    fn deepen(&self, inst: &Instance, l_max: usize, scorers: &[Instance], collect: Option<usize>) -> Option<Found> {
        let trivial = inst.outstanding_messages().count_ones() as usize;
        let mut state = Span::default();
        let root_lb = inst.lower_bound(&state);
        for limit in root_lb..=l_max.min(trivial) {
            let mut dfs = Dfs {
                inst,
                scorers,
                budget: self.tie_break_budget,
                found: Found::default(),
                collect_limit: collect,
                seen: HashSet::new(),
            };
            dfs.run(&mut state, limit);
            if dfs.found.best.is_some() || !dfs.found.collected.is_empty() {
                return Some(dfs.found);
            }
        }
        None
    }
}

/// Echelon basis over `u64` words; pivots are lowest set bits.
#[derive(Clone, Debug, Default)]
struct Basis64 {
    rows: Vec<u64>,
}

impl Basis64 {
    fn reduce(&self, mut v: u64) -> u64 {
        for &r in &self.rows {
            let p = r.trailing_zeros();
            if (v >> p) & 1 == 1 {
                v ^= r;
            }
        }
        v
    }

    fn insert(&mut self, v: u64) -> bool {
        let red = self.reduce(v);
        if red == 0 {
            return false;
        }
        let p = red.trailing_zeros();
        for r in &mut self.rows {
            if (*r >> p) & 1 == 1 {
                *r ^= red;
            }
        }
        self.rows.push(red);
        true
    }

    fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Every vector of the span, zero included.
    fn elements(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(1 << self.rows.len());
        out.push(0u64);
        for &r in &self.rows {
            let k = out.len();
            for i in 0..k {
                out.push(out[i] ^ r);
            }
        }
        out
    }
}

struct UserData {
    side: Basis64,
    wants: Vec<u64>,
}

/// A problem converted to word-packed form, with demands already served by
/// side information dropped.
struct Instance {
    users: Vec<UserData>,
}

impl Instance {
    fn new(p: &IndexCodingProblem) -> Self {
        let users = p
            .users()
            .iter()
            .map(|u| {
                let mut side = Basis64::default();
                for r in u.side_info.effective_generator().rows() {
                    side.insert(r.to_u64());
                }
                let wants = u
                    .demand
                    .want
                    .iter()
                    .map(|&j| 1u64 << j)
                    .filter(|&e| !side.contains(e))
                    .collect();
                UserData { side, wants }
            })
            .collect();
        Self { users }
    }

    fn outstanding_messages(&self) -> u64 {
        self.users.iter().flat_map(|u| u.wants.iter()).fold(0, |acc, &e| acc | e)
    }

    fn user_span(&self, u: usize, span: &Span) -> Basis64 {
        let mut b = self.users[u].side.clone();
        for &r in &span.chosen {
            b.insert(r);
        }
        b
    }

    /// For each user, the wants outside `side ∪ span` must be added by at
    /// least as many further rows as they raise that user's rank.
    fn lower_bound(&self, span: &Span) -> usize {
        (0..self.users.len())
            .map(|u| {
                let mut b = self.user_span(u, span);
                let base = b.dim();
                for &e in &self.users[u].wants {
                    b.insert(e);
                }
                b.dim() - base
            })
            .max()
            .unwrap_or(0)
    }

    fn served(&self, span: &Span) -> usize {
        (0..self.users.len())
            .map(|u| {
                let b = self.user_span(u, span);
                self.users[u].wants.iter().filter(|&&e| b.contains(e)).count()
            })
            .sum()
    }

    fn total_wants(&self) -> usize {
        self.users.iter().map(|u| u.wants.len()).sum()
    }
}

#[derive(Clone, Debug, Default)]
struct Span {
    basis: Basis64,
    chosen: Vec<u64>,
}

fn to_code(n: usize, rows: &[u64]) -> Result<IndexCode> {
    let vectors = rows.iter().map(|&r| BitVector::from_u64(n, r)).collect();
    IndexCode::new(BitMatrix::from_rows(n, vectors)?)
}

#[derive(Default)]
struct Found {
    best: Option<(Vec<u64>, Vec<usize>)>,
    collected: Vec<Vec<u64>>,
}

struct Dfs<'a> {
    inst: &'a Instance,
    scorers: &'a [Instance],
    budget: usize,
    found: Found,
    /// Collect distinct spans instead of keeping one best code.
    collect_limit: Option<usize>,
    seen: HashSet<Vec<u64>>,
}

impl Dfs<'_> {
    /// Returns true when the search should stop.
    fn run(&mut self, span: &mut Span, remaining: usize) -> bool {
        // Collect the branch options of the most constrained uncovered demand.
        let mut pick: Option<Vec<u64>> = None;
        for (u, user) in self.inst.users.iter().enumerate() {
            let b = self.inst.user_span(u, span);
            for &e in &user.wants {
                if b.contains(e) {
                    continue;
                }
                if remaining == 0 {
                    return false;
                }
                let opts = self.options(u, e, span);
                if pick.as_ref().is_none_or(|p| opts.len() < p.len()) {
                    pick = Some(opts);
                }
            }
        }
        let Some(options) = pick else {
            return self.leaf(span);
        };
        if self.inst.lower_bound(span) > remaining {
            return false;
        }
        for v in options {
            let mut next = span.clone();
            next.basis.insert(v);
            next.chosen.push(v);
            if self.run(&mut next, remaining - 1) {
                return true;
            }
        }
        false
    }

    /// Distinct spans reachable by adding one representative of
    /// `e + span(side_u)`, as canonical residues modulo the current span,
    /// lightest first.
    fn options(&self, u: usize, e: u64, span: &Span) -> Vec<u64> {
        let mut opts: Vec<u64> = self.inst.users[u]
            .side
            .elements()
            .into_iter()
            .map(|s| span.basis.reduce(e ^ s))
            .collect();
        opts.sort_unstable_by_key(|&v| (v.count_ones(), lex_key(v)));
        opts.dedup();
        opts
    }

    fn leaf(&mut self, span: &Span) -> bool {
        if let Some(limit) = self.collect_limit {
            let mut key = span.basis.rows.clone();
            key.sort_unstable();
            if self.seen.insert(key) {
                self.found.collected.push(span.chosen.clone());
            }
            self.budget = self.budget.saturating_sub(1);
            return self.found.collected.len() >= limit || self.budget == 0;
        }
        if self.scorers.is_empty() {
            self.found.best = Some((span.chosen.clone(), Vec::new()));
            return true;
        }
        let score: Vec<usize> = self.scorers.iter().map(|s| s.served(span)).collect();
        let perfect = self.scorers.iter().zip(&score).all(|(s, &k)| k == s.total_wants());
        if self.found.best.as_ref().is_none_or(|(_, s)| score > *s) {
            self.found.best = Some((span.chosen.clone(), score));
        }
        self.budget = self.budget.saturating_sub(1);
        perfect || self.budget == 0
    }
}

/// Sort key matching `BitVector` order: lexicographic from index 0.
fn lex_key(v: u64) -> u64 {
    v.reverse_bits()
}

/// Greedy construction: repeatedly adds the row serving the most outstanding
/// `(user, want)` pairs, ties going to the lexicographically lowest row.
///
/// Candidate rows are the representatives `e_j + s`, `s ∈ span(B_u)`, of the
/// outstanding demands; when a user's side information has dimension above
/// [`GREEDY_SPAN_LIMIT`] only `e_j` and `e_j + b` for basis rows `b` are
/// tried. The result is always valid, and never longer than the number of
/// distinct outstanding messages.
pub fn solve_greedy(p: &IndexCodingProblem) -> IndexCode {
    let n = p.n();
    let side: Vec<XorBasis> = (0..p.num_users())
        .map(|u| XorBasis::from_rows(n, p.effective_generator(u).rows()))
        .collect();
    let mut bases = side.clone();
    let mut outstanding: Vec<(usize, BitVector)> = p
        .demands()
        .map(|(u, j)| (u, BitVector::unit(n, j)))
        .filter(|(u, e)| !bases[*u].contains(e))
        .collect();
    let mut chosen: Vec<BitVector> = Vec::new();

    while !outstanding.is_empty() {
        let mut candidates: BTreeSet<BitVector> = BTreeSet::new();
        for (u, e) in &outstanding {
            candidates.extend(coset_candidates(&side[*u], e));
        }
        // Residue of each outstanding unit vector in its user's current span.
        let targets: Vec<(usize, BitVector)> = outstanding
            .iter()
            .map(|(u, e)| (*u, bases[*u].reduce(e)))
            .collect();
        let mut best: Option<(usize, BitVector)> = None;
        for row in candidates {
            let mut residues: Vec<Option<BitVector>> = vec![None; bases.len()];
            let score = targets
                .iter()
                .filter(|(u, t)| {
                    let r = residues[*u].get_or_insert_with(|| bases[*u].reduce(&row));
                    r == t
                })
                .count();
            if best.as_ref().is_none_or(|(s, _)| score > *s) {
                best = Some((score, row));
            }
        }
        let (_, row) = best.expect("outstanding demands always yield candidates");
        for b in &mut bases {
            b.insert(&row);
        }
        chosen.push(row);
        outstanding.retain(|(u, e)| !bases[*u].contains(e));
    }
    IndexCode::new(BitMatrix::from_rows(n, chosen).expect("rows have length n"))
        .expect("each greedy row serves a demand the earlier rows did not, so rows are independent")
}

/// Side-information dimension up to which greedy enumerates whole cosets.
pub const GREEDY_SPAN_LIMIT: usize = 10;

fn coset_candidates(side: &XorBasis, e: &BitVector) -> Vec<BitVector> {
    if side.dim() <= GREEDY_SPAN_LIMIT {
        let mut out = vec![e.clone()];
        for r in side.rows() {
            let k = out.len();
            for i in 0..k {
                let next = out[i].xor(r);
                out.push(next);
            }
        }
        out
    } else {
        std::iter::once(e.clone())
            .chain(side.rows().iter().map(|r| e.xor(r)))
            .collect()
    }
}

/// Solver selection plus exact-search settings.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverConfig {
    pub kind: SolverKind,
    pub exact: ExactSolver,
}

impl SolverConfig {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn greedy() -> Self {
        Self {
            kind: SolverKind::Greedy,
            ..Self::default()
        }
    }

    pub fn of_kind(kind: SolverKind) -> Self {
        Self {
            kind,
            ..Self::default()
        }
    }

    /// Finds a valid code. With the exact solver the length is minimal, and
    /// ties among minimal codes favour the one serving more demands of
    /// `downstream`, compared problem by problem in the given order.
    pub fn solve(&self, p: &IndexCodingProblem, downstream: &[IndexCodingProblem]) -> Result<IndexCode> {
        match self.kind {
            SolverKind::Greedy => Ok(solve_greedy(p)),
            SolverKind::Exact => {
                // the unit rows of all outstanding messages always decode
                let l_max = p.n();
                let code = self.exact.solve_preferring(p, l_max, downstream)?;
                Ok(code.expect("sending every wanted message is always valid"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::icp::{is_valid_code, User};

    fn chain_problem() -> IndexCodingProblem {
        IndexCodingProblem::plain(4, &[&[0], &[1], &[2], &[3]], &[&[1], &[0, 2], &[1, 3], &[2]]).unwrap()
    }

    #[test]
    fn exact_chain_has_length_three() {
        let p = chain_problem();
        let c = solve_exact(&p, 4).unwrap().unwrap();
        assert_eq!(c.len(), 3);
        assert!(is_valid_code(&p, &c).unwrap());
        assert!(solve_exact(&p, 2).unwrap().is_none());
    }

    #[test]
    fn exact_far_user_of_five_user_example() {
        let p = IndexCodingProblem::plain(7, &[&[6]], &[&[3]]).unwrap();
        let c = solve_exact(&p, 3).unwrap().unwrap();
        assert_eq!(c.len(), 1);
        assert!(is_valid_code(&p, &c).unwrap());
    }

    #[test]
    fn exact_satisfied_problem_is_empty() {
        let p = IndexCodingProblem::plain(3, &[&[0, 1], &[2]], &[&[], &[]]).unwrap();
        assert_eq!(solve_exact(&p, 0).unwrap().unwrap().len(), 0);
    }

    #[test]
    fn exact_refuses_large_instances() {
        let p = IndexCodingProblem::plain(11, &[&[]], &[&[0]]).unwrap();
        let err = solve_exact(&p, 3).unwrap_err();
        assert!(matches!(err, Error::CapabilityExceeded { n: 11, bound: 10 }));
        assert!(ExactSolver::with_bound(12).solve(&p, 3).unwrap().is_some());
    }

    #[test]
    fn greedy_examples() {
        let p = chain_problem();
        let c = solve_greedy(&p);
        assert!(c.len() <= 4);
        assert!(is_valid_code(&p, &c).unwrap());

        let done = IndexCodingProblem::plain(3, &[&[0]], &[&[]]).unwrap();
        assert_eq!(solve_greedy(&done).len(), 0);

        let single = IndexCodingProblem::plain(3, &[&[]], &[&[0]]).unwrap();
        let c = solve_greedy(&single);
        assert_eq!(c.rows(), &[BitVector::unit(3, 0)]);
    }

    #[test]
    fn greedy_prefers_rows_serving_more_demands() {
        // two users, each knowing what the other wants: one XOR serves both
        let p = IndexCodingProblem::new(
            2,
            vec![User::plain(2, [0], [1]), User::plain(2, [1], [0])],
        )
        .unwrap();
        let c = solve_greedy(&p);
        assert_eq!(c.combinations(), vec!["x1+x2"]);
    }

    #[test]
    fn preferring_breaks_ties_toward_downstream() {
        // V4 of the five-user example after the far row x4+x7.
        let n = 7;
        let mid = IndexCodingProblem::plain(n, &[&[4, 5, 6]], &[&[0, 2, 3]]).unwrap();
        let far = BitMatrix::parse_rows(n, &["0001001"]).unwrap();
        let mid = crate::icp::reduce_by_coded_rows(&mid, &far).unwrap();
        let near = IndexCodingProblem::plain(n, &[&[0, 1, 2], &[1, 2, 3], &[2, 3, 4]], &[&[3, 4, 5], &[0, 4, 5], &[0, 1, 5]])
            .unwrap();
        let near = crate::icp::reduce_by_coded_rows(&near, &far).unwrap();
        let plain = ExactSolver::default().solve(&mid, 3).unwrap().unwrap();
        let preferred = ExactSolver::default().solve_preferring(&mid, 3, std::slice::from_ref(&near)).unwrap().unwrap();
        assert_eq!(plain.len(), 2);
        assert_eq!(preferred.len(), 2);
        assert!(near.count_decodable(preferred.rows()) >= near.count_decodable(plain.rows()));
    }

    #[test]
    fn solver_kind_parses() {
        assert_eq!("Exact".parse::<SolverKind>().unwrap(), SolverKind::Exact);
        assert_eq!("greedy".parse::<SolverKind>().unwrap(), SolverKind::Greedy);
        assert!("fast".parse::<SolverKind>().is_err());
    }
}
