//! Scenario files and random instance generation.
//!
//! A scenario is JSON with 1-based message indices:
//!
//! ```json
//! {
//!   "n": 4,
//!   "users": [
//!     {"demands": [1], "cache": [2], "gain": 10.0},
//!     {"demands": [2], "cache": [1], "gain": 9.8, "group": "near"}
//!   ],
//!   "profile": {"p": 10.0, "alpha": 0.1, "beta": 0.3, "gamma": 0.6, "alpha1": 0.2},
//!   "solver": "exact"
//! }
//! ```
//!
//! A user's want set is its demands minus its cache. `group` is optional;
//! when every user carries one, the stated grouping replaces the gain-based
//! split.

use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::grouping::{assign_groups, ChannelState, Group, GroupAssignment};
use crate::icp::{User, IndexCodingProblem};
use crate::scheduler::PowerProfile;
use crate::solver::SolverKind;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioUser {
    /// Requested messages, 1-based.
    pub demands: BTreeSet<usize>,
    /// Cached messages, 1-based.
    pub cache: BTreeSet<usize>,
    pub gain: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<Group>,
}

impl ScenarioUser {
    /// Demands not already cached, 1-based.
    pub fn wants(&self) -> BTreeSet<usize> {
        self.demands.difference(&self.cache).copied().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub n: usize,
    pub users: Vec<ScenarioUser>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<PowerProfile<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverKind>,
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::scenario(field, message)
}

fn index_set(v: &Value, field: &str, n: usize) -> Result<BTreeSet<usize>> {
    let items = v
        .as_array()
        .ok_or_else(|| field_err(field, "expected an array of message indices"))?;
    let mut out = BTreeSet::new();
    for (k, item) in items.iter().enumerate() {
        let idx = item
            .as_u64()
            .ok_or_else(|| field_err(format!("{field}[{k}]"), "expected a positive integer"))?
            as usize;
        if idx == 0 || idx > n {
            return Err(field_err(format!("{field}[{k}]"), format!("index {idx} outside 1..={n}")));
        }
        out.insert(idx);
    }
    Ok(out)
}

fn number(obj: &Map<String, Value>, key: &str, field: &str) -> Result<f64> {
    obj.get(key)
        .ok_or_else(|| field_err(field, "missing"))?
        .as_f64()
        .ok_or_else(|| field_err(field, "expected a number"))
}

fn reject_unknown(obj: &Map<String, Value>, allowed: &[&str], prefix: &str) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(field_err(format!("{prefix}{k}"), "unknown field")),
        None => Ok(()),
    }
}

impl Scenario {
    /// Parses and validates scenario JSON.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let root: Value = serde_json::from_str(text).map_err(|e| field_err("<document>", e.to_string()))?;
        let obj = root.as_object().ok_or_else(|| field_err("<document>", "expected an object"))?;
        reject_unknown(obj, &["n", "users", "profile", "solver"], "")?;

        let n = obj
            .get("n")
            .ok_or_else(|| field_err("n", "missing"))?
            .as_u64()
            .filter(|&n| n >= 1)
            .ok_or_else(|| field_err("n", "expected a positive integer"))? as usize;

        let users_v = obj
            .get("users")
            .ok_or_else(|| field_err("users", "missing"))?
            .as_array()
            .ok_or_else(|| field_err("users", "expected an array"))?;
        let mut users = Vec::with_capacity(users_v.len());
        for (i, u) in users_v.iter().enumerate() {
            let at = format!("users[{i}]");
            let uo = u.as_object().ok_or_else(|| field_err(&at, "expected an object"))?;
            reject_unknown(uo, &["demands", "cache", "gain", "group"], &format!("{at}."))?;
            let demands = index_set(
                uo.get("demands").ok_or_else(|| field_err(format!("{at}.demands"), "missing"))?,
                &format!("{at}.demands"),
                n,
            )?;
            let cache = match uo.get("cache") {
                Some(v) => index_set(v, &format!("{at}.cache"), n)?,
                None => BTreeSet::new(),
            };
            let gain = number(uo, "gain", &format!("{at}.gain"))?;
            if !(gain > 0.0 && gain.is_finite()) {
                return Err(field_err(format!("{at}.gain"), format!("must be positive, got {gain}")));
            }
            let group = match uo.get("group") {
                None | Some(Value::Null) => None,
                Some(v) => Some(
                    serde_json::from_value::<Group>(v.clone())
                        .map_err(|_| field_err(format!("{at}.group"), "expected near, intermediate or far"))?,
                ),
            };
            users.push(ScenarioUser {
                demands,
                cache,
                gain,
                group,
            });
        }

        let profile = match obj.get("profile") {
            None | Some(Value::Null) => None,
            Some(v) => {
                let po = v.as_object().ok_or_else(|| field_err("profile", "expected an object"))?;
                reject_unknown(po, &["p", "alpha", "beta", "gamma", "alpha1"], "profile.")?;
                let get = |k: &str| number(po, k, &format!("profile.{k}"));
                let pp = PowerProfile::new(get("p")?, get("alpha")?, get("beta")?, get("gamma")?, get("alpha1")?)
                    .map_err(|e| field_err("profile", e.to_string()))?;
                Some(pp)
            }
        };
        let solver = match obj.get("solver") {
            None | Some(Value::Null) => None,
            Some(v) => Some(
                v.as_str()
                    .ok_or_else(|| field_err("solver", "expected a string"))?
                    .parse::<SolverKind>()
                    .map_err(|e| field_err("solver", e.to_string()))?,
            ),
        };

        let s = Scenario {
            n,
            users,
            profile,
            solver,
        };
        s.validate()?;
        Ok(s)
    }

    /// Checks the invariants [`from_json_str`](Self::from_json_str) enforces,
    /// for scenarios built in code.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(field_err("n", "expected a positive integer"));
        }
        for (i, u) in self.users.iter().enumerate() {
            for (name, set) in [("demands", &u.demands), ("cache", &u.cache)] {
                if let Some(&bad) = set.iter().find(|&&j| j == 0 || j > self.n) {
                    return Err(field_err(
                        format!("users[{i}].{name}"),
                        format!("index {bad} outside 1..={}", self.n),
                    ));
                }
            }
            if !(u.gain > 0.0 && u.gain.is_finite()) {
                return Err(field_err(format!("users[{i}].gain"), format!("must be positive, got {}", u.gain)));
            }
        }
        let tagged = self.users.iter().filter(|u| u.group.is_some()).count();
        if tagged != 0 && tagged != self.users.len() {
            let i = self.users.iter().position(|u| u.group.is_none()).unwrap_or(0);
            return Err(field_err(
                format!("users[{i}].group"),
                "either every user or no user may carry a group",
            ));
        }
        if let Some(pp) = &self.profile {
            pp.validate().map_err(|e| field_err("profile", e.to_string()))?;
        }
        Ok(())
    }

    pub fn ingest(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn emit(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.emit() + "\n")?;
        Ok(())
    }

    /// The index coding problem with 0-based indices.
    pub fn problem(&self) -> Result<IndexCodingProblem> {
        let users = self
            .users
            .iter()
            .map(|u| {
                User::plain(
                    self.n,
                    u.cache.iter().map(|j| j - 1),
                    u.wants().into_iter().map(|j| j - 1),
                )
            })
            .collect();
        IndexCodingProblem::new(self.n, users)
    }

    pub fn channel(&self) -> Result<ChannelState<f64>> {
        ChannelState::new(self.users.iter().map(|u| u.gain).collect())
    }

    /// Stated groups when present, otherwise the gain-based split.
    pub fn grouping(&self) -> Result<GroupAssignment> {
        if self.users.iter().all(|u| u.group.is_some()) && !self.users.is_empty() {
            let mut ga = GroupAssignment::default();
            for (i, u) in self.users.iter().enumerate() {
                match u.group.expect("checked above") {
                    Group::Near => ga.near.push(i),
                    Group::Intermediate => ga.intermediate.push(i),
                    Group::Far => ga.far.push(i),
                }
            }
            if let Some(g) = Group::ALL.into_iter().find(|&g| ga.members(g).is_empty()) {
                return Err(Error::Grouping(format!("no user is tagged {g}")));
            }
            Ok(ga)
        } else {
            assign_groups(&self.channel()?)
        }
    }

    pub fn profile_or_default(&self) -> PowerProfile<f64> {
        self.profile.unwrap_or_else(PowerProfile::standard)
    }
}

/// Parameters of a random three-cluster instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomInstanceSpec {
    pub n: usize,
    /// Users per cluster: near, intermediate, far.
    pub sizes: [usize; 3],
    /// Probability that a user caches a given message.
    pub side_density: f64,
    /// Probability that a user requests a given uncached message.
    pub demand_density: f64,
    /// Cluster centre gains: near, intermediate, far.
    pub centers: [f64; 3],
    /// Half-width of the uniform gain draw around each centre.
    pub spreads: [f64; 3],
    /// Give every user at least one want.
    pub require_wants: bool,
    pub seed: u64,
}

impl Default for RandomInstanceSpec {
    fn default() -> Self {
        Self {
            n: 6,
            sizes: [2, 2, 2],
            side_density: 0.3,
            demand_density: 0.3,
            centers: [10.0, 4.0, 0.5],
            spreads: [0.5, 0.5, 0.1],
            require_wants: true,
            seed: 1,
        }
    }
}

impl RandomInstanceSpec {
    pub fn num_users(&self) -> usize {
        self.sizes.iter().sum()
    }

    fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: &str| Err(field_err(field, msg));
        if self.n == 0 {
            return bad("n", "must be positive");
        }
        for (name, d) in [("side_density", self.side_density), ("demand_density", self.demand_density)] {
            if !(0.0..=1.0).contains(&d) {
                return bad(name, "must lie in [0, 1]");
            }
        }
        if self.require_wants && self.demand_density == 0.0 {
            return bad("demand_density", "zero density cannot give every user a want");
        }
        for k in 0..3 {
            if !(self.spreads[k] >= 0.0 && self.centers[k] - self.spreads[k] > 0.0) {
                return bad("spreads", "every drawn gain must stay positive");
            }
        }
        Ok(())
    }

    /// Draws a scenario; the same spec always gives the same scenario.
    pub fn generate(&self) -> Result<Scenario> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let n = self.n;
        let mut users = Vec::with_capacity(self.num_users());
        for (cluster, &size) in self.sizes.iter().enumerate() {
            for _ in 0..size {
                let mut cache: BTreeSet<usize> = (1..=n).filter(|_| rng.gen_bool(self.side_density)).collect();
                let mut demands: BTreeSet<usize> = (1..=n)
                    .filter(|j| !cache.contains(j))
                    .filter(|_| rng.gen_bool(self.demand_density))
                    .collect();
                if self.require_wants && demands.is_empty() {
                    if cache.len() == n {
                        let drop = *cache.iter().nth(rng.gen_range(0..n)).expect("cache is full");
                        cache.remove(&drop);
                    }
                    let free: Vec<usize> = (1..=n).filter(|j| !cache.contains(j)).collect();
                    demands.insert(*free.choose(&mut rng).expect("some message is uncached"));
                }
                let spread = self.spreads[cluster];
                let gain = if spread > 0.0 {
                    self.centers[cluster] + rng.gen_range(-spread..=spread)
                } else {
                    self.centers[cluster]
                };
                users.push(ScenarioUser {
                    demands,
                    cache,
                    gain,
                    group: None,
                });
            }
        }
        let s = Scenario {
            n,
            users,
            profile: None,
            solver: None,
        };
        s.validate()?;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX2: &str = r#"{"n": 4, "users": [
        {"demands": [1], "cache": [2], "gain": 10.0},
        {"demands": [2], "cache": [1], "gain": 9.8},
        {"demands": [3], "cache": [], "gain": 5.0},
        {"demands": [4], "cache": [], "gain": 0.5}]}"#;

    #[test]
    fn parses_and_groups() {
        let s = Scenario::from_json_str(EX2).unwrap();
        assert_eq!(s.users.len(), 4);
        let ga = s.grouping().unwrap();
        assert_eq!((ga.near, ga.intermediate, ga.far), (vec![0, 1], vec![2], vec![3]));
        assert_eq!(s.problem().unwrap().num_demands(), 4);
    }

    #[test]
    fn wants_drop_cached_demands() {
        let u = ScenarioUser {
            demands: [1, 2].into(),
            cache: [1, 2, 3].into(),
            gain: 1.0,
            group: None,
        };
        assert!(u.wants().is_empty());
    }

    #[test]
    fn diagnostics_name_the_field() {
        let bad = EX2.replace("\"gain\": 5.0", "\"gain\": -1");
        let e = Scenario::from_json_str(&bad).unwrap_err();
        assert!(e.to_string().contains("users[2].gain"), "{e}");
        let bad = EX2.replace("\"demands\": [4]", "\"demands\": [5]");
        assert!(Scenario::from_json_str(&bad).unwrap_err().to_string().contains("users[3].demands[0]"));
        let bad = EX2.replace("\"n\": 4", "\"n\": 4, \"extra\": 1");
        assert!(Scenario::from_json_str(&bad).unwrap_err().to_string().contains("extra"));
    }

    #[test]
    fn round_trip() {
        let mut s = Scenario::from_json_str(EX2).unwrap();
        s.profile = Some(PowerProfile::standard());
        s.solver = Some(SolverKind::Greedy);
        assert_eq!(Scenario::from_json_str(&s.emit()).unwrap(), s);
    }

    #[test]
    fn generation_is_seeded() {
        let spec = RandomInstanceSpec::default();
        assert_eq!(spec.generate().unwrap(), spec.generate().unwrap());
        let other = RandomInstanceSpec { seed: 2, ..spec.clone() };
        assert_ne!(spec.generate().unwrap(), other.generate().unwrap());
    }

    #[test]
    fn zero_spread_gives_three_gains() {
        let spec = RandomInstanceSpec {
            spreads: [0.0; 3],
            ..Default::default()
        };
        let s = spec.generate().unwrap();
        let mut gains: Vec<f64> = s.users.iter().map(|u| u.gain).collect();
        gains.dedup();
        assert_eq!(gains, vec![10.0, 4.0, 0.5]);
    }

    #[test]
    fn full_demand_density() {
        let spec = RandomInstanceSpec {
            side_density: 0.0,
            demand_density: 1.0,
            ..Default::default()
        };
        for u in spec.generate().unwrap().users {
            assert_eq!(u.wants(), (1..=6).collect());
        }
    }

    #[test]
    fn infeasible_spec() {
        let spec = RandomInstanceSpec {
            demand_density: 0.0,
            ..Default::default()
        };
        assert!(spec.generate().is_err());
    }
}
