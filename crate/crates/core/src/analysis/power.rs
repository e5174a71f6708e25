use num_traits::Float;
use serde::Serialize;

use super::rate::{log2_1p, rate_ic_baseline, rates_noma2, rates_noma3, RateParams};
use crate::error::{Error, Result};
use crate::grouping::{Group, GroupGains};
use crate::pipeline::Lengths;
use crate::scheduler::{classify_case, CaseId, Pair, PowerProfile, TransmissionKind, TransmissionPlan};

/// Power at which a transmission kind matches the plain index coding rate,
/// and the reduction `zeta` relative to the plain per-transmission power.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EqualRate<T> {
    pub power: T,
    pub zeta: T,
}

/// Smallest power in `(0, p_ic]` at which the increasing `rate` reaches
/// `target`, refined until the bracket cannot shrink further.
fn bisect<T: Float>(p_ic: T, target: T, rate: impl Fn(T) -> T) -> Result<T> {
    let not_bracketed = || Error::RootNotBracketed {
        p_ic: p_ic.to_f64().unwrap_or(f64::NAN),
    };
    let mut lo = p_ic * T::epsilon();
    let mut hi = p_ic;
    if !(rate(hi) > target) || !(rate(lo) < target) {
        return Err(not_bracketed());
    }
    let two = T::one() + T::one();
    loop {
        let mid = lo + (hi - lo) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if rate(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

fn params<T: Float>(g: &GroupGains<T>, p: T, alpha: T, beta: T, gamma: T, alpha1: T) -> RateParams<T> {
    RateParams {
        g_n: g.near,
        g_m: g.intermediate,
        g_f: g.far,
        p,
        alpha,
        beta,
        gamma,
        alpha1,
    }
}

fn check_gains<T: Float>(g: &GroupGains<T>, p_ic: T) -> Result<T> {
    GroupGains::new(g.near, g.intermediate, g.far)?;
    rate_ic_baseline(g.far, p_ic)
}

/// Power of a three-layer transmission whose sum rate equals the plain index
/// coding rate at `p_ic`.
pub fn equal_rate_power_noma3<T: Float>(
    p_ic: T,
    g: &GroupGains<T>,
    alpha: T,
    beta: T,
    gamma: T,
) -> Result<EqualRate<T>> {
    let target = check_gains(g, p_ic)?;
    let zero = T::zero();
    let power = bisect(p_ic, target, |p| rates_noma3(&params(g, p, alpha, beta, gamma, zero)).sum)?;
    Ok(EqualRate {
        power,
        zeta: p_ic - power,
    })
}

/// `zeta` of a three-layer transmission expressed through its own power `p`.
pub fn noma3_zeta_closed_form<T: Float>(p: T, g: &GroupGains<T>, alpha: T, beta: T) -> T {
    let one = T::one();
    let (gn, gm, gf) = (g.near, g.intermediate, g.far);
    let ab = alpha + beta;
    let num = (one + p * gf) * (alpha * p * (gn - gm) + ab * p * (gm - gf) + alpha * ab * p * p * gm * (gn - gf));
    let den = gf * (one + alpha * p * gm + ab * p * gf + alpha * ab * p * p * gm * gf);
    num / den
}

/// Power of a two-layer transmission whose sum rate equals the plain index
/// coding rate at `p_ic`.
pub fn equal_rate_power_noma2<T: Float>(pair: Pair, p_ic: T, g: &GroupGains<T>, alpha1: T) -> Result<EqualRate<T>> {
    let target = check_gains(g, p_ic)?;
    let zero = T::zero();
    let power = bisect(p_ic, target, |p| rates_noma2(pair, &params(g, p, zero, zero, zero, alpha1)).sum)?;
    Ok(EqualRate {
        power,
        zeta: p_ic - power,
    })
}

/// `zeta` of a two-layer transmission expressed through its own power `p`.
pub fn noma2_zeta_closed_form<T: Float>(pair: Pair, p: T, g: &GroupGains<T>, alpha1: T) -> T {
    let one = T::one();
    let (gn, gm, gf) = (g.near, g.intermediate, g.far);
    match pair {
        Pair::MidFar | Pair::NearFar => {
            let g_hi = g.of(pair.nearer());
            (one + p * gf) * (alpha1 * p * (g_hi - gf)) / (gf * (one + alpha1 * p * gf))
        }
        Pair::NearMid => {
            let num = alpha1 * p * (gn - gm) + p * (gm - gf) + alpha1 * p * p * gm * (gn - gf);
            num / (gf * (one + alpha1 * p * gm))
        }
    }
}

/// Full-power transmission aimed at `group`: `P_group = P_ic g_f / g_group`
/// gives the same rate at the group's gain as the plain code at `g_f`.
pub fn equal_rate_power_ic<T: Float>(group: Group, p_ic: T, g: &GroupGains<T>) -> EqualRate<T> {
    let power = p_ic * g.far / g.of(group);
    EqualRate {
        power,
        zeta: p_ic - power,
    }
}

/// `(g_group - g_f) P_group / g_f`.
pub fn ic_zeta_closed_form<T: Float>(group: Group, p_group: T, g: &GroupGains<T>) -> T {
    (g.of(group) - g.far) * p_group / g.far
}

/// Power reductions of every transmission kind.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Zetas<T> {
    pub noma3: T,
    pub mid_far: T,
    pub near_far: T,
    pub near_mid: T,
    pub near: T,
    pub mid: T,
}

impl<T: Float> Zetas<T> {
    pub fn pair(&self, pair: Pair) -> T {
        match pair {
            Pair::MidFar => self.mid_far,
            Pair::NearFar => self.near_far,
            Pair::NearMid => self.near_mid,
        }
    }

    /// Far-targeted rows need the full plain power, so their reduction is zero.
    pub fn ic(&self, group: Group) -> T {
        match group {
            Group::Near => self.near,
            Group::Intermediate => self.mid,
            Group::Far => T::zero(),
        }
    }

    pub fn of_kind(&self, kind: TransmissionKind) -> T {
        match kind {
            TransmissionKind::Noma3 => self.noma3,
            TransmissionKind::Noma2 { pair } => self.pair(pair),
            TransmissionKind::Ic { group } => self.ic(group),
        }
    }
}

/// Total power saved against plain index coding with `l_ic` transmissions
/// at `p_ic` each, for the schedule of `lengths`.
///
/// Rows of the thirteen numbered cases are listed explicitly; a degenerate
/// triple uses the count-weighted sum of the same terms.
pub fn power_savings<T: Float>(case: CaseId, lengths: Lengths, l_ic: usize, p_ic: T, z: &Zetas<T>) -> Result<T> {
    let c = classify_case(lengths);
    if c.case != case {
        return Err(Error::Invalid(format!(
            "lengths ({}, {}, {}) belong to case {}, not {}",
            lengths.far, lengths.mid, lengths.near, c.case, case
        )));
    }
    if l_ic < lengths.max() {
        return Err(Error::Invalid(format!(
            "plain code length {l_ic} is below the scheme length {}",
            lengths.max()
        )));
    }
    let t = |x: usize| T::from(x).expect("count fits the scalar type");
    let (f, m, n) = (lengths.far, lengths.mid, lengths.near);
    let lic = l_ic;
    use CaseId::*;
    let value = match case {
        I => t(lic - f) * p_ic + z.noma3 * t(f),
        II => t(lic - f) * p_ic + z.noma3 * t(n) + t(m - n) * z.mid_far,
        III => t(lic - n) * p_ic + z.noma3 * t(m) + t(f - m) * z.near_far + t(n - f) * z.near,
        IV => t(lic - m) * p_ic + z.noma3 * t(f) + t(n - f) * z.near_mid + t(m - n) * z.mid,
        V => t(lic - f) * p_ic + z.noma3 * t(n),
        VI => t(lic - f) * p_ic + z.noma3 * t(m) + t(n - m) * z.near_far,
        VII => t(lic - n) * p_ic + z.noma3 * t(m) + t(n - m) * z.near_far,
        VIII => t(lic - m) * p_ic + z.noma3 * t(n) + t(m - n) * z.mid_far,
        IX => t(lic - n) * p_ic + z.noma3 * t(m) + t(n - f) * z.near,
        X => t(lic - m) * p_ic + z.noma3 * t(f) + t(m - f) * z.near_mid,
        XI => t(lic - m) * p_ic + z.noma3 * t(n) + t(m - f) * z.mid,
        XII => t(lic - n) * p_ic + z.noma3 * t(f) + t(m - f) * z.near_mid + t(n - m) * z.near,
        XIII => t(lic - m) * p_ic + z.noma3 * t(n) + t(f - n) * z.mid_far + t(m - f) * z.mid,
        Degenerate => {
            let pair = c.pair.map_or(T::zero(), |p| z.pair(p));
            let ic = c.ic_group.map_or(T::zero(), |g| z.ic(g));
            t(lic - lengths.max()) * p_ic + t(c.counts.noma3) * z.noma3 + t(c.counts.noma2) * pair + t(c.counts.ic) * ic
        }
    };
    Ok(value)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerReport<T> {
    pub p_ic: T,
    pub l_ic: usize,
    pub noma3: EqualRate<T>,
    pub mid_far: EqualRate<T>,
    pub near_far: EqualRate<T>,
    pub near_mid: EqualRate<T>,
    pub ic_near: EqualRate<T>,
    pub ic_mid: EqualRate<T>,
    pub zetas: Zetas<T>,
    pub per_transmission: Vec<T>,
    pub p_total: T,
    pub p_avg: T,
    pub p_saving: T,
}

impl<T: Float> PowerReport<T> {
    /// Equal-rate power of one transmission kind.
    pub fn power_of(&self, kind: TransmissionKind) -> T {
        self.p_ic - self.zetas.of_kind(kind)
    }
}

/// All equal-rate powers for the given gains and profile.
pub fn all_equal_rate<T: Float>(
    g: &GroupGains<T>,
    p_ic: T,
    profile: &PowerProfile<T>,
) -> Result<(EqualRate<T>, [EqualRate<T>; 3], [EqualRate<T>; 2])> {
    let noma3 = equal_rate_power_noma3(p_ic, g, profile.alpha, profile.beta, profile.gamma)?;
    let pairs = [
        equal_rate_power_noma2(Pair::MidFar, p_ic, g, profile.alpha1)?,
        equal_rate_power_noma2(Pair::NearFar, p_ic, g, profile.alpha1)?,
        equal_rate_power_noma2(Pair::NearMid, p_ic, g, profile.alpha1)?,
    ];
    let ic = [
        equal_rate_power_ic(Group::Near, p_ic, g),
        equal_rate_power_ic(Group::Intermediate, p_ic, g),
    ];
    Ok((noma3, pairs, ic))
}

/// Per-transmission equal-rate powers of a plan, their mean, and the saving
/// against `l_ic` plain transmissions at `p_ic`.
pub fn power_report<T: Float>(
    plan: &TransmissionPlan<T>,
    gains: &GroupGains<T>,
    p_ic: T,
    profile: &PowerProfile<T>,
    l_ic: usize,
) -> Result<PowerReport<T>> {
    if plan.is_empty() {
        return Err(Error::EmptyPlan);
    }
    profile.validate()?;
    let (noma3, [mid_far, near_far, near_mid], [ic_near, ic_mid]) = all_equal_rate(gains, p_ic, profile)?;
    let zetas = Zetas {
        noma3: noma3.zeta,
        mid_far: mid_far.zeta,
        near_far: near_far.zeta,
        near_mid: near_mid.zeta,
        near: ic_near.zeta,
        mid: ic_mid.zeta,
    };
    let per_transmission: Vec<T> = plan.transmissions.iter().map(|t| p_ic - zetas.of_kind(t.kind)).collect();
    let p_total = per_transmission.iter().fold(T::zero(), |a, &b| a + b);
    let p_avg = p_total / T::from(per_transmission.len()).expect("count fits the scalar type");
    let p_saving = power_savings(plan.case_id, plan.lengths, l_ic, p_ic, &zetas)?;
    Ok(PowerReport {
        p_ic,
        l_ic,
        noma3,
        mid_far,
        near_far,
        near_mid,
        ic_near,
        ic_mid,
        zetas,
        per_transmission,
        p_total,
        p_avg,
        p_saving,
    })
}

/// Rate reached by a full-power transmission at gain `g`; used to check the
/// single-layer equal-rate powers.
pub fn single_layer_rate<T: Float>(g: T, p: T) -> T {
    log2_1p(g * p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g421() -> GroupGains<f64> {
        GroupGains::new(4.0, 2.0, 1.0).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn noma3_equal_rate_worked() {
        let er = equal_rate_power_noma3(10.0, &g421(), 0.1, 0.3, 0.6).unwrap();
        assert!(er.power < 10.0 && er.zeta > 0.0);
        let rp = params(&g421(), er.power, 0.1, 0.3, 0.6, 0.2);
        // target is log2(1 + g_f P_ic) = log2(11)
        assert!((rates_noma3(&rp).sum - 11f64.log2()).abs() < 1e-12);
        assert!(rel(er.zeta, noma3_zeta_closed_form(er.power, &g421(), 0.1, 0.3)) < 1e-8);
    }

    #[test]
    fn noma2_equal_rate_worked() {
        for pair in Pair::ALL {
            let er = equal_rate_power_noma2(pair, 10.0, &g421(), 0.2).unwrap();
            assert!(er.power < 10.0);
            assert!(rel(er.zeta, noma2_zeta_closed_form(pair, er.power, &g421(), 0.2)) < 1e-8, "{pair}");
        }
    }

    #[test]
    fn ic_equal_rate_worked() {
        let er = equal_rate_power_ic(Group::Near, 10.0, &g421());
        assert_eq!((er.power, er.zeta), (2.5, 7.5));
        assert!((single_layer_rate(4.0, 2.5) - 11f64.log2()).abs() < 1e-12);
        assert_eq!(ic_zeta_closed_form(Group::Near, 2.5, &g421()), 7.5);
        assert_eq!(equal_rate_power_ic(Group::Far, 10.0, &g421()).zeta, 0.0);
    }

    #[test]
    fn savings_named_rows() {
        let z = Zetas {
            noma3: 1.0,
            mid_far: 0.5,
            near_far: 0.7,
            near_mid: 0.9,
            near: 2.0,
            mid: 1.5,
        };
        let s = power_savings(CaseId::I, Lengths::new(2, 2, 2), 3, 10.0, &z).unwrap();
        assert_eq!(s, 10.0 + 2.0);
        let s = power_savings(CaseId::II, Lengths::new(3, 2, 1), 3, 10.0, &z).unwrap();
        assert_eq!(s, 0.0 * 10.0 + 1.0 + 0.5);
        assert!(power_savings(CaseId::I, Lengths::new(3, 2, 1), 3, 10.0, &z).is_err());
        assert!(power_savings(CaseId::II, Lengths::new(3, 2, 1), 2, 10.0, &z).is_err());
        let zero = Zetas {
            noma3: 0.0,
            mid_far: 0.0,
            near_far: 0.0,
            near_mid: 0.0,
            near: 0.0,
            mid: 0.0,
        };
        assert_eq!(power_savings(CaseId::XIII, Lengths::new(2, 3, 1), 3, 10.0, &zero).unwrap(), 0.0);
    }
}
