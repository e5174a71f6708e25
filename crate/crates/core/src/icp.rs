//! Index coding problems with plain and coded side information.
//!
//! Messages are indexed from 0 (`x1` is index 0). A user's side information
//! is a set of plainly known messages plus a generator matrix of coded
//! combinations; the two together span what the user can compute before any
//! transmission. A linear code is decodable at a user when every wanted unit
//! vector lies in the span of the user's side information and the code rows.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector, XorBasis};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserSideInfo {
    pub plain_known: BTreeSet<usize>,
    pub coded_rows: BitMatrix,
}

impl UserSideInfo {
    pub fn plain<I: IntoIterator<Item = usize>>(n: usize, known: I) -> Self {
        Self {
            plain_known: known.into_iter().collect(),
            coded_rows: BitMatrix::empty(n),
        }
    }

    /// Unit rows for the plain messages stacked over the coded rows.
    pub fn effective_generator(&self) -> BitMatrix {
        let n = self.coded_rows.ncols();
        BitMatrix::unit_rows(n, self.plain_known.iter().copied())
            .stack(&self.coded_rows)
            .expect("coded rows share the message dimension")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserDemand {
    pub want: BTreeSet<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct User {
    pub side_info: UserSideInfo,
    pub demand: UserDemand,
}

impl User {
    pub fn plain<K, W>(n: usize, known: K, want: W) -> Self
    where
        K: IntoIterator<Item = usize>,
        W: IntoIterator<Item = usize>,
    {
        Self {
            side_info: UserSideInfo::plain(n, known),
            demand: UserDemand {
                want: want.into_iter().collect(),
            },
        }
    }
}

/// An index coding instance over `n` messages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexCodingProblem {
    n: usize,
    users: Vec<User>,
}

impl IndexCodingProblem {
    pub fn new(n: usize, users: Vec<User>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("an index coding problem needs at least one message".into()));
        }
        for (u, user) in users.iter().enumerate() {
            let side = &user.side_info;
            if side.coded_rows.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: side.coded_rows.ncols(),
                });
            }
            for &i in side.plain_known.iter().chain(&user.demand.want) {
                if i >= n {
                    return Err(Error::IndexOutOfRange { index: i, n });
                }
            }
            if let Some(j) = user.demand.want.intersection(&side.plain_known).next() {
                return Err(Error::Invalid(format!(
                    "user {u} both knows and wants message x{}",
                    j + 1
                )));
            }
        }
        Ok(Self { n, users })
    }

    /// Classic index coding: plain side information only.
    pub fn plain(n: usize, known: &[&[usize]], wants: &[&[usize]]) -> Result<Self> {
        if known.len() != wants.len() {
            return Err(Error::Invalid(format!(
                "{} known sets but {} want sets",
                known.len(),
                wants.len()
            )));
        }
        let users = known
            .iter()
            .zip(wants)
            .map(|(k, w)| User::plain(n, k.iter().copied(), w.iter().copied()))
            .collect();
        Self::new(n, users)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn users(&self) -> &[User] {
        &self.users
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn effective_generator(&self, user: usize) -> BitMatrix {
        self.users[user].side_info.effective_generator()
    }

    /// All `(user, wanted message)` pairs.
    pub fn demands(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.users
            .iter()
            .enumerate()
            .flat_map(|(u, user)| user.demand.want.iter().map(move |&j| (u, j)))
    }

    pub fn num_demands(&self) -> usize {
        self.users.iter().map(|u| u.demand.want.len()).sum()
    }

    /// The sub-instance consisting of the listed users, in the given order.
    pub fn restrict(&self, users: &[usize]) -> Self {
        Self {
            n: self.n,
            users: users.iter().map(|&u| self.users[u].clone()).collect(),
        }
    }

    /// One receiver per `(user, want)` pair, each with the original user's
    /// side information. Decodability is unchanged by the split.
    pub fn split_receivers(&self) -> Self {
        let users = self
            .demands()
            .map(|(u, j)| User {
                side_info: self.users[u].side_info.clone(),
                demand: UserDemand {
                    want: BTreeSet::from([j]),
                },
            })
            .collect();
        Self { n: self.n, users }
    }

    /// Wants of `user` decodable from side information stacked with `extra`.
    pub fn decodable_wants(&self, user: usize, extra: &BitMatrix) -> Result<BTreeSet<usize>> {
        if extra.ncols() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: extra.ncols(),
            });
        }
        let u = &self.users[user];
        let basis = user_basis(u, extra.rows());
        Ok(u.demand
            .want
            .iter()
            .copied()
            .filter(|&j| basis.contains(&BitVector::unit(self.n, j)))
            .collect())
    }

    /// Number of `(user, want)` pairs decodable with `extra` as additional
    /// coded side information.
    pub fn count_decodable(&self, extra: &[BitVector]) -> usize {
        self.users
            .iter()
            .map(|u| {
                let basis = user_basis(u, extra);
                u.demand
                    .want
                    .iter()
                    .filter(|&&j| basis.contains(&BitVector::unit(self.n, j)))
                    .count()
            })
            .sum()
    }
}

fn user_basis(user: &User, extra: &[BitVector]) -> XorBasis {
    let n = user.side_info.coded_rows.ncols();
    let mut basis = XorBasis::new(n);
    for &k in &user.side_info.plain_known {
        basis.insert(&BitVector::unit(n, k));
    }
    for r in user.side_info.coded_rows.rows().iter().chain(extra) {
        basis.insert(r);
    }
    basis
}

/// A linear index code: its encoding matrix has independent, nonzero rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexCode {
    matrix: BitMatrix,
}

impl IndexCode {
    pub fn new(matrix: BitMatrix) -> Result<Self> {
        if matrix.rank() != matrix.nrows() {
            return Err(Error::Invalid(format!(
                "encoding matrix rows must be nonzero and linearly independent: {matrix}"
            )));
        }
        Ok(Self { matrix })
    }

    /// The length-zero code.
    pub fn empty(n: usize) -> Self {
        Self {
            matrix: BitMatrix::empty(n),
        }
    }

    /// Keeps only rows that add to the span, so dependent or zero rows from
    /// a hand-written matrix become a proper code.
    pub fn pruned(matrix: &BitMatrix) -> Self {
        Self {
            matrix: matrix.independent_rows(),
        }
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.nrows() == 0
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    pub fn rows(&self) -> &[BitVector] {
        self.matrix.rows()
    }

    /// Rows rendered as message combinations, e.g. `["x4+x7"]`.
    pub fn combinations(&self) -> Vec<String> {
        self.rows().iter().map(BitVector::combination).collect()
    }
}

/// Checks that every user can linearly decode every wanted message from its
/// side information and the code rows.
pub fn is_valid_code(p: &IndexCodingProblem, c: &IndexCode) -> Result<bool> {
    is_decodable_with(p, c.matrix())
}

/// Like [`is_valid_code`] for an arbitrary matrix (rows need not be
/// independent).
pub fn is_decodable_with(p: &IndexCodingProblem, rows: &BitMatrix) -> Result<bool> {
    if rows.ncols() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            found: rows.ncols(),
        });
    }
    Ok(p.users.iter().all(|u| {
        let basis = user_basis(u, rows.rows());
        u.demand
            .want
            .iter()
            .all(|&j| basis.contains(&BitVector::unit(p.n, j)))
    }))
}

/// Adds `extra` to every user's coded side information and drops the wants it
/// already satisfies.
pub fn reduce_by_coded_rows(p: &IndexCodingProblem, extra: &BitMatrix) -> Result<IndexCodingProblem> {
    if extra.ncols() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            found: extra.ncols(),
        });
    }
    let users = p
        .users
        .iter()
        .enumerate()
        .map(|(u, user)| {
            let satisfied = p.decodable_wants(u, extra)?;
            let coded_rows = user.side_info.coded_rows.stack(extra)?;
            Ok(User {
                side_info: UserSideInfo {
                    plain_known: user.side_info.plain_known.clone(),
                    coded_rows,
                },
                demand: UserDemand {
                    want: user.demand.want.difference(&satisfied).copied().collect(),
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IndexCodingProblem { n: p.n, users })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Example with four users, each knowing its own message.
    fn chain_problem() -> IndexCodingProblem {
        IndexCodingProblem::plain(4, &[&[0], &[1], &[2], &[3]], &[&[1], &[0, 2], &[1, 3], &[2]]).unwrap()
    }

    fn code(n: usize, rows: &[&str]) -> IndexCode {
        IndexCode::new(BitMatrix::parse_rows(n, rows).unwrap()).unwrap()
    }

    #[test]
    fn chain_code_is_valid() {
        let p = chain_problem();
        assert!(is_valid_code(&p, &code(4, &["1100", "0110", "0011"])).unwrap());
        assert!(!is_valid_code(&p, &code(4, &["1100"])).unwrap());
    }

    #[test]
    fn empty_wants_accept_empty_code() {
        let p = IndexCodingProblem::plain(3, &[&[0], &[]], &[&[], &[]]).unwrap();
        assert!(is_valid_code(&p, &IndexCode::empty(3)).unwrap());
    }

    #[test]
    fn validity_dimension_mismatch() {
        let p = chain_problem();
        assert!(is_valid_code(&p, &IndexCode::empty(5)).is_err());
    }

    #[test]
    fn problem_validation() {
        assert!(IndexCodingProblem::plain(3, &[&[3]], &[&[0]]).is_err());
        assert!(IndexCodingProblem::plain(3, &[&[1]], &[&[1]]).is_err());
        assert!(IndexCodingProblem::plain(0, &[], &[]).is_err());
    }

    #[test]
    fn index_code_rejects_dependent_rows() {
        let m = BitMatrix::parse_rows(3, &["110", "011", "101"]).unwrap();
        assert!(IndexCode::new(m.clone()).is_err());
        assert_eq!(IndexCode::pruned(&m).len(), 2);
        assert!(IndexCode::new(BitMatrix::parse_rows(3, &["000"]).unwrap()).is_err());
    }

    #[test]
    fn reduce_moves_far_row_into_known_set() {
        // V4 of the 7-message example: knows x5,x6,x7 and wants x1,x3,x4.
        let p = IndexCodingProblem::plain(7, &[&[4, 5, 6]], &[&[0, 2, 3]]).unwrap();
        let extra = BitMatrix::parse_rows(7, &["0001001"]).unwrap();
        let reduced = reduce_by_coded_rows(&p, &extra).unwrap();
        let u = &reduced.users()[0];
        assert_eq!(u.demand.want, BTreeSet::from([0, 2]));
        assert_eq!(u.side_info.coded_rows, extra);
        assert_eq!(u.side_info.plain_known, BTreeSet::from([4, 5, 6]));
    }

    #[test]
    fn reduce_with_empty_extra_is_identity() {
        let p = chain_problem();
        assert_eq!(reduce_by_coded_rows(&p, &BitMatrix::empty(4)).unwrap(), p);
        assert!(reduce_by_coded_rows(&p, &BitMatrix::empty(3)).is_err());
    }

    #[test]
    fn reduce_clears_near_users_of_six_user_case() {
        // Near users V1, V2 of the six-user example with the far and
        // intermediate rows as coded side information.
        let p = IndexCodingProblem::plain(7, &[&[0, 1, 2], &[1, 2, 3]], &[&[3, 4, 5], &[0, 4, 5]]).unwrap();
        let extra = BitMatrix::parse_rows(7, &["1000001", "0001001", "0100100", "0010010"]).unwrap();
        let reduced = reduce_by_coded_rows(&p, &extra).unwrap();
        assert_eq!(reduced.num_demands(), 0);
    }

    #[test]
    fn split_receivers_preserves_validity() {
        let p = chain_problem();
        let split = p.split_receivers();
        assert_eq!(split.num_users(), p.num_demands());
        for rows in [&["1100", "0110", "0011"][..], &["1100"][..]] {
            let c = code(4, rows);
            assert_eq!(is_valid_code(&p, &c).unwrap(), is_valid_code(&split, &c).unwrap());
        }
    }
}
