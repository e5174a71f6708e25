//! Splitting users into near, intermediate and far groups by channel gain.
//!
//! Each user is compared against three representative gains (maximum,
//! median and minimum over all users) and joins the group whose
//! representative is strictly nearest, with the comparisons evaluated in a
//! fixed order: nearest-to-maximum first, then nearest-to-median, and
//! everything else falls through to the far group. A user exactly halfway
//! between two representatives therefore lands in the far group.

use std::fmt;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// User group, ordered far < intermediate < near by SIC capability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Far,
    Intermediate,
    Near,
}

impl Group {
    pub const ALL: [Group; 3] = [Group::Near, Group::Intermediate, Group::Far];

    /// Whether users of this group can decode a layer aimed at `target`:
    /// the target group itself and every nearer group can.
    pub fn can_decode(self, target: Group) -> bool {
        self >= target
    }

    pub fn short(self) -> &'static str {
        match self {
            Group::Near => "n",
            Group::Intermediate => "m",
            Group::Far => "f",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::Near => "near",
            Group::Intermediate => "intermediate",
            Group::Far => "far",
        })
    }
}

/// Linear power gains, one per user.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelState<T> {
    gains: Vec<T>,
}

impl<T: Float> ChannelState<T> {
    pub fn new(gains: Vec<T>) -> Result<Self> {
        if let Some((i, _)) = gains
            .iter()
            .enumerate()
            .find(|(_, g)| !(g.is_finite() && **g > T::zero()))
        {
            return Err(Error::Invalid(format!("gain of user {} must be positive and finite", i + 1)));
        }
        Ok(Self { gains })
    }

    pub fn gains(&self) -> &[T] {
        &self.gains
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }
}

/// Index sets of the three groups (0-based user indices, ascending).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAssignment {
    pub far: Vec<usize>,
    pub intermediate: Vec<usize>,
    pub near: Vec<usize>,
}

impl GroupAssignment {
    pub fn members(&self, g: Group) -> &[usize] {
        match g {
            Group::Near => &self.near,
            Group::Intermediate => &self.intermediate,
            Group::Far => &self.far,
        }
    }

    pub fn group_of(&self, user: usize) -> Option<Group> {
        Group::ALL.into_iter().find(|&g| self.members(g).contains(&user))
    }

    pub fn num_users(&self) -> usize {
        self.far.len() + self.intermediate.len() + self.near.len()
    }
}

/// Median; for an even count, the mean of the two middle values.
pub fn median<T: Float>(values: &[T]) -> T {
    assert!(!values.is_empty(), "median of an empty slice");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("gains are finite"));
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / (T::one() + T::one())
    }
}

pub fn assign_groups<T: Float>(ch: &ChannelState<T>) -> Result<GroupAssignment> {
    let gains = ch.gains();
    if gains.len() < 3 {
        return Err(Error::Grouping(format!(
            "three groups need at least 3 users, got {}",
            gains.len()
        )));
    }
    let g_max = gains.iter().copied().fold(T::neg_infinity(), T::max);
    let g_min = gains.iter().copied().fold(T::infinity(), T::min);
    let g_med = median(gains);

    let mut ga = GroupAssignment::default();
    for (i, &g) in gains.iter().enumerate() {
        let to_max = (g_max - g).abs();
        let to_med = (g_med - g).abs();
        let to_min = (g_min - g).abs();
        if to_max < to_med.min(to_min) {
            ga.near.push(i);
        } else if to_med < to_max.min(to_min) {
            ga.intermediate.push(i);
        } else {
            ga.far.push(i);
        }
    }
    for g in Group::ALL {
        if ga.members(g).is_empty() {
            return Err(Error::Grouping(format!(
                "the {g} group is empty; use a two-group or plain index coding flow for these gains"
            )));
        }
    }
    Ok(ga)
}

/// Worst (minimum) gain of each group.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupGains<T> {
    pub near: T,
    pub intermediate: T,
    pub far: T,
}

impl<T: Float> GroupGains<T> {
    /// Checks `near > intermediate > far > 0`.
    pub fn new(near: T, intermediate: T, far: T) -> Result<Self> {
        let ok = near > intermediate && intermediate > far && far > T::zero() && near.is_finite();
        if !ok {
            return Err(Error::GainOrdering {
                near: near.to_f64().unwrap_or(f64::NAN),
                intermediate: intermediate.to_f64().unwrap_or(f64::NAN),
                far: far.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { near, intermediate, far })
    }

    pub fn of(&self, g: Group) -> T {
        match g {
            Group::Near => self.near,
            Group::Intermediate => self.intermediate,
            Group::Far => self.far,
        }
    }
}

pub fn group_min_gains<T: Float>(ch: &ChannelState<T>, ga: &GroupAssignment) -> Result<GroupGains<T>> {
    let min_of = |g: Group| -> Result<T> {
        let members = ga.members(g);
        if members.is_empty() {
            return Err(Error::Grouping(format!("the {g} group is empty")));
        }
        members
            .iter()
            .map(|&u| {
                ch.gains()
                    .get(u)
                    .copied()
                    .ok_or_else(|| Error::Grouping(format!("user {} has no gain", u + 1)))
            })
            .try_fold(T::infinity(), |acc, g| Ok(acc.min(g?)))
    };
    GroupGains::new(min_of(Group::Near)?, min_of(Group::Intermediate)?, min_of(Group::Far)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(g: &[f64]) -> ChannelState<f64> {
        ChannelState::new(g.to_vec()).unwrap()
    }

    const SEVEN: [f64; 7] = [10.0, 9.8, 9.9, 4.0, 4.1, 0.5, 0.4];

    #[test]
    fn seven_user_split() {
        let ga = assign_groups(&ch(&SEVEN)).unwrap();
        assert_eq!(ga.near, vec![0, 1, 2]);
        assert_eq!(ga.intermediate, vec![3, 4]);
        assert_eq!(ga.far, vec![5, 6]);
        assert_eq!(ga.group_of(4), Some(Group::Intermediate));
    }

    #[test]
    fn three_users_are_their_own_representatives() {
        let ga = assign_groups(&ch(&[3.0, 2.0, 1.0])).unwrap();
        assert_eq!((ga.near, ga.intermediate, ga.far), (vec![0], vec![1], vec![2]));
    }

    #[test]
    fn equal_gains_leave_groups_empty() {
        assert!(matches!(assign_groups(&ch(&[5.0, 5.0, 5.0])), Err(Error::Grouping(_))));
    }

    #[test]
    fn too_few_users() {
        assert!(assign_groups(&ch(&[2.0, 1.0])).is_err());
    }

    #[test]
    fn halfway_users_fall_through_to_far() {
        // median 2: the user at 3 is equidistant from max 4 and median 2
        let ga = assign_groups(&ch(&[4.0, 3.0, 2.0, 1.0, 0.5])).unwrap();
        assert_eq!(ga.near, vec![0]);
        assert_eq!(ga.intermediate, vec![2]);
        assert_eq!(ga.far, vec![1, 3, 4]);
    }

    #[test]
    fn even_count_median_is_midpoint() {
        assert_eq!(median(&[1.0, 4.0, 2.0, 3.0]), 2.5);
        assert_eq!(median(&[1.0f32, 2.0, 3.0]), 2.0);
    }

    #[test]
    fn rejects_nonpositive_gain() {
        assert!(ChannelState::new(vec![1.0, 0.0, 2.0]).is_err());
        assert!(ChannelState::new(vec![1.0, f64::NAN, 2.0]).is_err());
    }

    #[test]
    fn min_gains() {
        let c = ch(&SEVEN);
        let ga = assign_groups(&c).unwrap();
        let g = group_min_gains(&c, &ga).unwrap();
        assert_eq!((g.near, g.intermediate, g.far), (9.8, 4.0, 0.4));

        let c = ch(&[3.0, 2.0, 1.0]);
        let g = group_min_gains(&c, &assign_groups(&c).unwrap()).unwrap();
        assert_eq!((g.near, g.intermediate, g.far), (3.0, 2.0, 1.0));
    }

    #[test]
    fn min_gains_require_strict_order() {
        let c = ch(&[2.0, 2.0, 1.0]);
        let ga = GroupAssignment {
            near: vec![0],
            intermediate: vec![1],
            far: vec![2],
        };
        assert!(matches!(group_min_gains(&c, &ga), Err(Error::GainOrdering { .. })));
    }

    #[test]
    fn decode_capability_follows_sic_order() {
        assert!(Group::Near.can_decode(Group::Far));
        assert!(Group::Intermediate.can_decode(Group::Far));
        assert!(!Group::Far.can_decode(Group::Intermediate));
        assert!(!Group::Intermediate.can_decode(Group::Near));
    }
}
