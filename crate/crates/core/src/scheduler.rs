//! Transmission scheduling for three-group codes.
//!
//! The first `min(l_f, l_m, l_n)` transmissions superpose the k-th rows of
//! all three codes. The next block superposes the two longer codes while
//! both still have rows, and any rows left in the single longest code go out
//! alone at full power.

use std::fmt;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::grouping::{Group, GroupAssignment};
use crate::icp::{is_decodable_with, IndexCodingProblem};
use crate::pipeline::{Lengths, ThreeGroupCode};

/// Power budget and layer coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerProfile<T> {
    /// Power per transmission.
    pub p: T,
    /// Near layer of a three-layer transmission.
    pub alpha: T,
    /// Intermediate layer.
    pub beta: T,
    /// Far layer.
    pub gamma: T,
    /// Nearer layer of a two-layer transmission; the farther one gets `1 - alpha1`.
    pub alpha1: T,
}

impl<T: Float> PowerProfile<T> {
    pub fn new(p: T, alpha: T, beta: T, gamma: T, alpha1: T) -> Result<Self> {
        let pp = Self {
            p,
            alpha,
            beta,
            gamma,
            alpha1,
        };
        pp.validate()?;
        Ok(pp)
    }

    /// alpha = 0.1, beta = 0.3, gamma = 0.6, alpha1 = 0.2, P = 10.
    pub fn standard() -> Self {
        let c = |x: f64| T::from(x).expect("representable constant");
        Self {
            p: c(10.0),
            alpha: c(0.1),
            beta: c(0.3),
            gamma: c(0.6),
            alpha1: c(0.2),
        }
    }

    pub fn with_power(self, p: T) -> Result<Self> {
        Self::new(p, self.alpha, self.beta, self.gamma, self.alpha1)
    }

    pub fn validate(&self) -> Result<()> {
        let zero = T::zero();
        let half = T::from(0.5).expect("representable constant");
        let tol = T::from(1e-9).expect("representable constant").max(T::epsilon() * T::from(8.0).unwrap());
        let all_finite = [self.p, self.alpha, self.beta, self.gamma, self.alpha1]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::Profile("values must be finite".into()));
        }
        if self.p <= zero {
            return Err(Error::Profile("power must be positive".into()));
        }
        if !(zero < self.alpha && self.alpha < self.beta && self.beta < self.gamma) {
            return Err(Error::Profile("need 0 < alpha < beta < gamma".into()));
        }
        if (self.alpha + self.beta + self.gamma - T::one()).abs() > tol {
            return Err(Error::Profile("alpha + beta + gamma must equal 1".into()));
        }
        if !(zero < self.alpha1 && self.alpha1 < half) {
            return Err(Error::Profile("need 0 < alpha1 < 0.5".into()));
        }
        Ok(())
    }
}

/// The two groups sharing a two-layer transmission.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pair {
    #[serde(rename = "m,f")]
    MidFar,
    #[serde(rename = "n,f")]
    NearFar,
    #[serde(rename = "n,m")]
    NearMid,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::MidFar, Pair::NearFar, Pair::NearMid];

    /// Group on the low-power layer.
    pub fn nearer(self) -> Group {
        match self {
            Pair::MidFar => Group::Intermediate,
            Pair::NearFar | Pair::NearMid => Group::Near,
        }
    }

    /// Group on the high-power layer.
    pub fn farther(self) -> Group {
        match self {
            Pair::MidFar | Pair::NearFar => Group::Far,
            Pair::NearMid => Group::Intermediate,
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.nearer().short(), self.farther().short())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum TransmissionKind {
    Noma3,
    Noma2 { pair: Pair },
    Ic { group: Group },
}

impl fmt::Display for TransmissionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransmissionKind::Noma3 => f.write_str("NOMA3"),
            TransmissionKind::Noma2 { pair } => write!(f, "NOMA2{pair}"),
            TransmissionKind::Ic { group } => write!(f, "IC({})", group.short()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Layer<T> {
    #[serde(serialize_with = "ser_bits")]
    pub codeword: BitVector,
    /// Share of the transmission power.
    pub coefficient: T,
    pub target: Group,
}

fn ser_bits<S: serde::Serializer>(v: &BitVector, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.combination())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Transmission<T> {
    #[serde(flatten)]
    pub kind: TransmissionKind,
    /// Highest power last.
    pub layers: Vec<Layer<T>>,
}

/// Rows of Table-style case enumeration, plus a tag for triples with a zero
/// length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseId {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
    IX,
    X,
    XI,
    XII,
    XIII,
    #[serde(rename = "DEGENERATE")]
    Degenerate,
}

impl CaseId {
    pub const NUMBERED: [CaseId; 13] = [
        CaseId::I,
        CaseId::II,
        CaseId::III,
        CaseId::IV,
        CaseId::V,
        CaseId::VI,
        CaseId::VII,
        CaseId::VIII,
        CaseId::IX,
        CaseId::X,
        CaseId::XI,
        CaseId::XII,
        CaseId::XIII,
    ];
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseId::Degenerate => f.write_str("DEGENERATE"),
            other => write!(f, "{other:?}"),
        }
    }
}

/// Transmission counts by kind.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Counts {
    pub noma3: usize,
    pub noma2: usize,
    pub ic: usize,
}

impl Counts {
    pub fn total(&self) -> usize {
        self.noma3 + self.noma2 + self.ic
    }
}

/// Case of a length triple with the shape of its schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub case: CaseId,
    pub counts: Counts,
    /// Groups sharing the two-layer transmissions, if there are any.
    pub pair: Option<Pair>,
    /// Group whose rows go out alone, if any.
    pub ic_group: Option<Group>,
}

/// Case lookup by comparing the three lengths.
///
/// Positive triples map onto the thirteen numbered cases. A triple with a
/// zero entry is tagged [`CaseId::Degenerate`] (the scheme then reduces to
/// a two-group or single-code broadcast) and its counts follow the
/// scheduling rule in [`build_plan`].
pub fn classify_case(lengths: Lengths) -> Classification {
    let Lengths {
        far: f,
        mid: m,
        near: n,
    } = lengths;
    use CaseId::*;
    use Group::{Far, Intermediate as Mid, Near};
    let c = |case, noma3, noma2, ic, pair, ic_group| Classification {
        case,
        counts: Counts { noma3, noma2, ic },
        pair,
        ic_group,
    };
    if f == 0 || m == 0 || n == 0 {
        let (k, l, pair, mm, ic_group) = schedule_shape(lengths);
        return c(Degenerate, k, l, mm, pair, ic_group);
    }
    let (mf, nf, nm) = (Some(Pair::MidFar), Some(Pair::NearFar), Some(Pair::NearMid));
    if f == m && m == n {
        c(I, f, 0, 0, None, None)
    } else if f > m && m > n {
        c(II, n, m - n, f - m, mf, Some(Far))
    } else if n > f && f > m {
        c(III, m, f - m, n - f, nf, Some(Near))
    } else if m > n && n > f {
        c(IV, f, n - f, m - n, nm, Some(Mid))
    } else if f > m && m == n {
        c(V, n, 0, f - m, None, Some(Far))
    } else if f > n && n > m {
        c(VI, m, n - m, f - n, nf, Some(Far))
    } else if f == n && n > m {
        c(VII, m, n - m, 0, nf, None)
    } else if f == m && m > n {
        c(VIII, n, m - n, 0, mf, None)
    } else if n > f && f == m {
        c(IX, m, 0, n - f, None, Some(Near))
    } else if n == m && m > f {
        c(X, f, m - f, 0, nm, None)
    } else if m > f && f == n {
        c(XI, n, 0, m - f, None, Some(Mid))
    } else if n > m && m > f {
        c(XII, f, m - f, n - m, nm, Some(Near))
    } else {
        debug_assert!(m > f && f > n);
        c(XIII, n, f - n, m - f, mf, Some(Mid))
    }
}

/// `(K, L, pair, M, ic_group)` of the scheduling rule.
fn schedule_shape(lengths: Lengths) -> (usize, usize, Option<Pair>, usize, Option<Group>) {
    let Lengths {
        far: f,
        mid: m,
        near: n,
    } = lengths;
    let k = f.min(m).min(n);
    let (l, pair) = if f.min(n) > m {
        (f.min(n) - m, Some(Pair::NearFar))
    } else if m.min(n) > f {
        (m.min(n) - f, Some(Pair::NearMid))
    } else if f.min(m) > n {
        (f.min(m) - n, Some(Pair::MidFar))
    } else {
        (0, None)
    };
    let (mm, group) = if f > m.max(n) {
        (f - m.max(n), Some(Group::Far))
    } else if m > f.max(n) {
        (m - f.max(n), Some(Group::Intermediate))
    } else if n > f.max(m) {
        (n - f.max(m), Some(Group::Near))
    } else {
        (0, None)
    };
    (k, l, pair, mm, group)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransmissionPlan<T> {
    pub transmissions: Vec<Transmission<T>>,
    pub case_id: CaseId,
    pub counts: Counts,
    pub lengths: Lengths,
}

impl<T> TransmissionPlan<T> {
    pub fn len(&self) -> usize {
        self.transmissions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transmissions.is_empty()
    }
}

/// Lays the three codes out as superposed and single-layer transmissions.
pub fn build_plan<T: Float>(code: &ThreeGroupCode, pp: &PowerProfile<T>) -> TransmissionPlan<T> {
    let lengths = code.lengths();
    let (k, l, pair, m, ic_group) = schedule_shape(lengths);
    let row = |g: Group, i: usize| code.code(g).rows()[i].clone();
    let layer = |g: Group, i: usize, coefficient: T| Layer {
        codeword: row(g, i),
        coefficient,
        target: g,
    };

    let mut transmissions = Vec::with_capacity(k + l + m);
    for i in 0..k {
        transmissions.push(Transmission {
            kind: TransmissionKind::Noma3,
            layers: vec![
                layer(Group::Near, i, pp.alpha),
                layer(Group::Intermediate, i, pp.beta),
                layer(Group::Far, i, pp.gamma),
            ],
        });
    }
    if let Some(pair) = pair {
        for i in k..k + l {
            transmissions.push(Transmission {
                kind: TransmissionKind::Noma2 { pair },
                layers: vec![
                    layer(pair.nearer(), i, pp.alpha1),
                    layer(pair.farther(), i, T::one() - pp.alpha1),
                ],
            });
        }
    }
    if let Some(group) = ic_group {
        for i in k + l..k + l + m {
            transmissions.push(Transmission {
                kind: TransmissionKind::Ic { group },
                layers: vec![layer(group, i, T::one())],
            });
        }
    }
    let counts = Counts {
        noma3: k,
        noma2: l,
        ic: m,
    };
    TransmissionPlan {
        transmissions,
        case_id: classify_case(lengths).case,
        counts,
        lengths,
    }
}

/// Codewords a user of group `g` recovers from the plan.
pub fn accessible_rows<T>(plan: &TransmissionPlan<T>, g: Group, n: usize) -> BitMatrix {
    let rows = plan
        .transmissions
        .iter()
        .flat_map(|t| t.layers.iter())
        .filter(|layer| g.can_decode(layer.target))
        .map(|layer| layer.codeword.clone())
        .collect();
    BitMatrix::from_rows(n, rows).unwrap_or_else(|_| BitMatrix::empty(n))
}

/// Checks that every user decodes each of its wants from its own side
/// information and the layers its group can separate.
///
/// A layer aimed at group `G` is recovered by `G` and by every nearer group
/// (SIC strips higher-power layers first); farther groups treat it as noise.
pub fn verify_delivery<T>(p: &IndexCodingProblem, ga: &GroupAssignment, plan: &TransmissionPlan<T>) -> bool {
    let codeword_width_ok = plan
        .transmissions
        .iter()
        .flat_map(|t| t.layers.iter())
        .all(|layer| layer.codeword.len() == p.n());
    if !codeword_width_ok || ga.num_users() != p.num_users() {
        return false;
    }
    (0..p.num_users()).all(|u| {
        let Some(g) = ga.group_of(u) else {
            return false;
        };
        let rows = accessible_rows(plan, g, p.n());
        is_decodable_with(&p.restrict(&[u]), &rows).unwrap_or(false)
    })
}
