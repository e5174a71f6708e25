//! Randomised property checks over generated instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{
    all_equal_rate, noma2_gain_over_ic, noma3_gain_over_ic, power_savings, rate_ic_baseline, rates_noma2,
    rates_noma3, ic_gain_over_baseline, rate_ic_in_scheme, RateParams, Zetas,
};
use crate::error::Result;
use crate::grouping::{assign_groups, Group, GroupGains};
use crate::pipeline::{design_codes, design_plain, design_two_group, Lengths};
use crate::scenario::RandomInstanceSpec;
use crate::scheduler::{build_plan, classify_case, verify_delivery, CaseId, Pair, PowerProfile};
use crate::solver::SolverConfig;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub trials: usize,
    /// Trials the property applies to.
    pub applicable: usize,
    pub violations: usize,
    pub first_violation: Option<String>,
}

impl CheckOutcome {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            trials: 0,
            applicable: 0,
            violations: 0,
            first_violation: None,
        }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.applicable += 1;
        if !ok {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(detail());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Whether the median gain of clustered users lies in the intermediate cluster.
pub fn sizes_fit_median(sizes: [usize; 3]) -> bool {
    let [near, mid, far] = sizes;
    let total = near + mid + far;
    if near == 0 || mid == 0 || far == 0 {
        return false;
    }
    let (lo, hi) = if total % 2 == 1 {
        ((total - 1) / 2, (total - 1) / 2)
    } else {
        (total / 2 - 1, total / 2)
    };
    near <= lo && hi < near + mid
}

/// A random instance spec with `n` in `3..=max_n` and 3 to 7 users whose
/// gain clusters separate cleanly into the three groups.
pub fn random_spec(rng: &mut impl Rng, max_n: usize) -> RandomInstanceSpec {
    let n = rng.gen_range(3..=max_n.max(3));
    let sizes = loop {
        let s = [rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(1..=3)];
        if s.iter().sum::<usize>() <= 7 && sizes_fit_median(s) {
            break s;
        }
    };
    RandomInstanceSpec {
        n,
        sizes,
        side_density: rng.gen_range(0.0..0.6),
        demand_density: rng.gen_range(0.15..0.7),
        centers: [10.0, 4.0, 0.5],
        spreads: [0.5, 0.5, 0.1],
        require_wants: true,
        seed: rng.gen(),
    }
}

/// Random valid gains and power profile.
pub fn random_rate_params(rng: &mut impl Rng) -> RateParams<f64> {
    let g_f = rng.gen_range(0.05..2.0);
    let g_m = g_f * (1.0 + rng.gen_range(0.05..5.0));
    let g_n = g_m * (1.0 + rng.gen_range(0.05..5.0));
    let profile = random_profile(rng);
    RateParams::new(GroupGains::new(g_n, g_m, g_f).expect("ordered by construction"), &profile)
        .expect("valid by construction")
}

pub fn random_profile(rng: &mut impl Rng) -> PowerProfile<f64> {
    loop {
        let mut w = [rng.gen_range(0.02..1.0), rng.gen_range(0.02..1.0), rng.gen_range(0.02..1.0)];
        w.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let total: f64 = w.iter().sum();
        let (a, b) = (w[0] / total, w[1] / total);
        let c = 1.0 - a - b;
        let alpha1 = rng.gen_range(0.02..0.48);
        let p = rng.gen_range(0.1..100.0);
        if let Ok(pp) = PowerProfile::new(p, a, b, c, alpha1) {
            if b - a > 1e-3 && c - b > 1e-3 {
                return pp;
            }
        }
    }
}

/// Both length bounds and end-to-end delivery over `trials` random
/// instances, exact solver.
pub fn check_instances(trials: usize, seed: u64, max_n: usize) -> Result<[CheckOutcome; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let solver = SolverConfig::exact();
    let mut t1 = CheckOutcome::new("length-bound: max(l_f, l_m, l_n) <= l_ic");
    let mut t2 = CheckOutcome::new("two-group-bound: l_icnoma <= two-group length when l_m <= max(l_f, l_n)");
    let mut del = CheckOutcome::new("delivery: every user decodes its wants from the plan");
    let profile = PowerProfile::<f64>::standard();
    for _ in 0..trials {
        let spec = random_spec(&mut rng, max_n);
        let s = spec.generate()?;
        let p = s.problem()?;
        let ga = assign_groups(&s.channel()?)?;
        let code = design_codes(&p, &ga, &solver)?;
        let plain = design_plain(&p, &solver)?;
        let l = code.lengths();
        for o in [&mut t1, &mut t2, &mut del] {
            o.trials += 1;
        }
        t1.record(l.max() <= plain.len(), || {
            format!("seed {}: lengths {:?}, l_ic {}", spec.seed, l, plain.len())
        });
        if l.mid <= l.far.max(l.near) {
            let two = design_two_group(&p, &ga, &solver)?;
            t2.record(l.max() <= two.transmissions(), || {
                format!(
                    "lengths {:?}, two-group ({}, {}); scenario {}",
                    l,
                    two.far.len(),
                    two.near.len(),
                    serde_json::to_string(&s).expect("scenario serializes")
                )
            });
        }
        let plan = build_plan(&code, &profile);
        del.record(verify_delivery(&p, &ga, &plan), || format!("seed {}", spec.seed));
    }
    Ok([t1, t2, del])
}

/// The thirteen ordering patterns, written as predicates on `(f, m, n)`.
pub const CASE_PATTERNS: [(CaseId, fn(usize, usize, usize) -> bool); 13] = [
    (CaseId::I, |f, m, n| f == m && m == n),
    (CaseId::II, |f, m, n| f > m && m > n),
    (CaseId::III, |f, m, n| n > f && f > m),
    (CaseId::IV, |f, m, n| m > n && n > f),
    (CaseId::V, |f, m, n| f > m && m == n),
    (CaseId::VI, |f, m, n| f > n && n > m),
    (CaseId::VII, |f, m, n| f == n && n > m),
    (CaseId::VIII, |f, m, n| f == m && m > n),
    (CaseId::IX, |f, m, n| n > f && f == m),
    (CaseId::X, |f, m, n| n == m && m > f),
    (CaseId::XI, |f, m, n| m > f && f == n),
    (CaseId::XII, |f, m, n| n > m && m > f),
    (CaseId::XIII, |f, m, n| m > f && f > n),
];

/// Every positive triple up to `max_len` matches exactly one pattern, the
/// classifier agrees, and the counts add up to the longest code.
pub fn check_case_totality(max_len: usize) -> CheckOutcome {
    let mut o = CheckOutcome::new("classification: one case per positive triple, counts sum to max");
    for f in 1..=max_len {
        for m in 1..=max_len {
            for n in 1..=max_len {
                o.trials += 1;
                let matches: Vec<CaseId> = CASE_PATTERNS
                    .iter()
                    .filter(|(_, pred)| pred(f, m, n))
                    .map(|(c, _)| *c)
                    .collect();
                let c = classify_case(Lengths::new(f, m, n));
                let ok = matches.len() == 1 && matches[0] == c.case && c.counts.total() == f.max(m).max(n);
                o.record(ok, || format!("({f}, {m}, {n}): patterns {matches:?}, classified {:?}", c));
            }
        }
    }
    o
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

/// Closed-form rate gains are positive and equal the sum-rate differences.
pub fn check_rate_positivity(trials: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut o = CheckOutcome::new("rates: every superposed kind beats plain index coding");
    for _ in 0..trials {
        o.trials += 1;
        let rp = random_rate_params(&mut rng);
        let base = rate_ic_baseline(rp.g_f, rp.p).expect("valid params");
        let mut ok = true;
        let g3 = noma3_gain_over_ic(&rp);
        ok &= g3 > 0.0 && rel_close(g3, rates_noma3(&rp).sum - base, 1e-10);
        for pair in Pair::ALL {
            let g2 = noma2_gain_over_ic(pair, &rp);
            ok &= g2 > 0.0 && rel_close(g2, rates_noma2(pair, &rp).sum - base, 1e-10);
        }
        let gn = ic_gain_over_baseline(Group::Near, &rp);
        ok &= gn > 0.0 && rel_close(gn, rate_ic_in_scheme(Group::Near, &rp) - base, 1e-10);
        o.record(ok, || format!("{rp:?}"));
    }
    o
}

fn zetas_for(rp: &RateParams<f64>) -> Result<Zetas<f64>> {
    let (n3, [mf, nf, nm], [icn, icm]) = all_equal_rate(&rp.gains(), rp.p, &rp.profile())?;
    Ok(Zetas {
        noma3: n3.zeta,
        mid_far: mf.zeta,
        near_far: nf.zeta,
        near_mid: nm.zeta,
        near: icn.zeta,
        mid: icm.zeta,
    })
}

/// All equal-rate power reductions are positive.
pub fn check_zeta_positivity(trials: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut o = CheckOutcome::new("zeta: every equal-rate power is below the plain power");
    for _ in 0..trials {
        o.trials += 1;
        let rp = random_rate_params(&mut rng);
        match zetas_for(&rp) {
            Ok(z) => {
                let all = [z.noma3, z.mid_far, z.near_far, z.near_mid, z.near, z.mid];
                o.record(all.iter().all(|&v| v > 0.0), || format!("{rp:?}: {z:?}"));
            }
            Err(e) => o.record(false, || format!("{rp:?}: {e}")),
        }
    }
    o
}

/// Random lengths in every numbered case give a positive saving.
pub fn check_savings_positivity(trials: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut o = CheckOutcome::new("savings: positive for every case and admissible plain length");
    for t in 0..trials {
        o.trials += 1;
        let target = CaseId::NUMBERED[t % 13];
        let lengths = loop {
            let l = Lengths::new(rng.gen_range(1..=8), rng.gen_range(1..=8), rng.gen_range(1..=8));
            if classify_case(l).case == target {
                break l;
            }
        };
        let l_ic = lengths.max() + rng.gen_range(0..=3);
        let rp = random_rate_params(&mut rng);
        let result = zetas_for(&rp).and_then(|z| power_savings(target, lengths, l_ic, rp.p, &z));
        match result {
            Ok(s) => o.record(s > 0.0, || format!("{target} {lengths:?} l_ic {l_ic}: {s}")),
            Err(e) => o.record(false, || e.to_string()),
        }
    }
    o
}

/// Runs every check; `trials` applies to each randomised one.
pub fn run_all(trials: usize, seed: u64, max_n: usize) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    out.extend(check_instances(trials, seed, max_n)?);
    out.push(check_case_totality(6));
    out.push(check_rate_positivity(trials, seed ^ 0x51));
    out.push(check_zeta_positivity(trials, seed ^ 0x52));
    out.push(check_savings_positivity(trials, seed ^ 0x53));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_fit() {
        assert!(sizes_fit_median([2, 2, 2]));
        assert!(sizes_fit_median([1, 1, 1]));
        assert!(!sizes_fit_median([3, 1, 1]));
        assert!(sizes_fit_median([2, 3, 2]));
        assert!(!sizes_fit_median([1, 1, 3]));
    }

    #[test]
    fn random_specs_group_as_drawn() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let spec = random_spec(&mut rng, 8);
            let s = spec.generate().unwrap();
            let ga = assign_groups(&s.channel().unwrap()).unwrap();
            let [a, b, c] = spec.sizes;
            assert_eq!(ga.near, (0..a).collect::<Vec<_>>());
            assert_eq!(ga.intermediate, (a..a + b).collect::<Vec<_>>());
            assert_eq!(ga.far, (a + b..a + b + c).collect::<Vec<_>>());
        }
    }

    #[test]
    fn totality_passes() {
        assert!(check_case_totality(6).passed());
    }

    #[test]
    fn small_instance_run() {
        for o in check_instances(20, 3, 6).unwrap() {
            assert_eq!(o.trials, 20);
            assert!(o.name.contains("bound") || o.passed(), "{o:?}");
        }
    }
}
