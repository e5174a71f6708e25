use num_traits::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grouping::{Group, GroupGains};
use crate::scheduler::{Pair, PowerProfile, TransmissionKind, TransmissionPlan};

/// Group minimum gains together with a power profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateParams<T> {
    pub g_n: T,
    pub g_m: T,
    pub g_f: T,
    pub p: T,
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub alpha1: T,
}

impl<T: Float> RateParams<T> {
    pub fn new(gains: GroupGains<T>, profile: &PowerProfile<T>) -> Result<Self> {
        let gains = GroupGains::new(gains.near, gains.intermediate, gains.far)?;
        profile.validate()?;
        Ok(Self {
            g_n: gains.near,
            g_m: gains.intermediate,
            g_f: gains.far,
            p: profile.p,
            alpha: profile.alpha,
            beta: profile.beta,
            gamma: profile.gamma,
            alpha1: profile.alpha1,
        })
    }

    pub fn gains(&self) -> GroupGains<T> {
        GroupGains {
            near: self.g_n,
            intermediate: self.g_m,
            far: self.g_f,
        }
    }

    pub fn profile(&self) -> PowerProfile<T> {
        PowerProfile {
            p: self.p,
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            alpha1: self.alpha1,
        }
    }

    pub fn gain(&self, g: Group) -> T {
        match g {
            Group::Near => self.g_n,
            Group::Intermediate => self.g_m,
            Group::Far => self.g_f,
        }
    }

    pub fn with_power(mut self, p: T) -> Self {
        self.p = p;
        self
    }
}

pub(crate) fn log2_1p<T: Float>(x: T) -> T {
    x.ln_1p() / T::from(std::f64::consts::LN_2).expect("representable constant")
}

/// `log2(1 + share * P * g / (1 + interference * P * g))`.
fn layer_rate<T: Float>(share: T, interference: T, p: T, g: T) -> T {
    log2_1p(share * p * g / (T::one() + interference * p * g))
}

/// Rate of plain index coding at the weakest user: `log2(1 + g_f P)`.
pub fn rate_ic_baseline<T: Float>(g_f: T, p: T) -> Result<T> {
    if !(g_f > T::zero() && p > T::zero() && g_f.is_finite() && p.is_finite()) {
        return Err(Error::Invalid("gain and power must be positive".into()));
    }
    Ok(log2_1p(g_f * p))
}

/// Per-group rates of a three-layer transmission.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Noma3Rates<T> {
    pub far: T,
    pub mid: T,
    pub near: T,
    pub sum: T,
}

/// Far decodes its layer treating both lower layers as noise, intermediate
/// strips the far layer first, near strips both.
pub fn rates_noma3<T: Float>(rp: &RateParams<T>) -> Noma3Rates<T> {
    let RateParams {
        g_n,
        g_m,
        g_f,
        p,
        alpha,
        beta,
        gamma,
        ..
    } = *rp;
    let far = layer_rate(gamma, alpha + beta, p, g_f);
    let mid = layer_rate(beta, alpha, p, g_m);
    let near = layer_rate(alpha, T::zero(), p, g_n);
    Noma3Rates {
        far,
        mid,
        near,
        sum: far + mid + near,
    }
}

/// Single-logarithm form of the three-layer sum rate.
pub fn noma3_sum_closed_form<T: Float>(rp: &RateParams<T>) -> T {
    let one = T::one();
    let ab = rp.alpha + rp.beta;
    let p = rp.p;
    let num = (one + p * rp.g_f) * (one + ab * p * rp.g_m) * (one + rp.alpha * p * rp.g_n);
    let den = (one + ab * p * rp.g_f) * (one + rp.alpha * p * rp.g_m);
    (num / den).log2()
}

/// Three-layer sum rate minus the plain index coding rate.
pub fn noma3_gain_over_ic<T: Float>(rp: &RateParams<T>) -> T {
    let one = T::one();
    let ab = rp.alpha + rp.beta;
    let p = rp.p;
    let num = (one + ab * p * rp.g_m) * (one + rp.alpha * p * rp.g_n);
    let den = (one + ab * p * rp.g_f) * (one + rp.alpha * p * rp.g_m);
    (num / den).log2()
}

/// Rates of a two-layer transmission.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Noma2Rates<T> {
    /// Low-power layer, decoded after SIC by the nearer group.
    pub nearer: T,
    /// High-power layer, decoded by the farther group with the other layer as noise.
    pub farther: T,
    pub sum: T,
}

pub fn rates_noma2<T: Float>(pair: Pair, rp: &RateParams<T>) -> Noma2Rates<T> {
    let g_hi = rp.gain(pair.nearer());
    let g_lo = rp.gain(pair.farther());
    let nearer = layer_rate(rp.alpha1, T::zero(), rp.p, g_hi);
    let farther = layer_rate(T::one() - rp.alpha1, rp.alpha1, rp.p, g_lo);
    Noma2Rates {
        nearer,
        farther,
        sum: nearer + farther,
    }
}

/// `log2((1 + P g_lo)(1 + alpha1 P g_hi) / (1 + alpha1 P g_lo))`.
pub fn noma2_sum_closed_form<T: Float>(pair: Pair, rp: &RateParams<T>) -> T {
    let one = T::one();
    let g_hi = rp.gain(pair.nearer());
    let g_lo = rp.gain(pair.farther());
    let (p, a1) = (rp.p, rp.alpha1);
    ((one + p * g_lo) * (one + a1 * p * g_hi) / (one + a1 * p * g_lo)).log2()
}

/// Two-layer sum rate minus the plain index coding rate, in closed form.
pub fn noma2_gain_over_ic<T: Float>(pair: Pair, rp: &RateParams<T>) -> T {
    let one = T::one();
    let (p, a1) = (rp.p, rp.alpha1);
    match pair {
        Pair::MidFar | Pair::NearFar => {
            let g_hi = rp.gain(pair.nearer());
            ((one + a1 * p * g_hi) / (one + a1 * p * rp.g_f)).log2()
        }
        Pair::NearMid => {
            let num = (one + p * rp.g_m) * (one + a1 * p * rp.g_n);
            let den = (one + p * rp.g_f) * (one + a1 * p * rp.g_m);
            (num / den).log2()
        }
    }
}

/// Full-power transmission aimed at `group`, rated at that group's minimum gain.
pub fn rate_ic_in_scheme<T: Float>(group: Group, rp: &RateParams<T>) -> T {
    log2_1p(rp.gain(group) * rp.p)
}

/// `log2((1 + P g_group) / (1 + P g_f))`.
pub fn ic_gain_over_baseline<T: Float>(group: Group, rp: &RateParams<T>) -> T {
    let one = T::one();
    ((one + rp.p * rp.gain(group)) / (one + rp.p * rp.g_f)).log2()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransmissionRate<T> {
    pub kind: TransmissionKind,
    /// Rate of each layer, by target group.
    pub layer_rates: Vec<(Group, T)>,
    pub sum: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateReport<T> {
    pub per_transmission: Vec<TransmissionRate<T>>,
    pub r_avg: T,
    pub r_ic_baseline: T,
}

pub fn transmission_rate<T: Float>(kind: TransmissionKind, rp: &RateParams<T>) -> TransmissionRate<T> {
    let layer_rates = match kind {
        TransmissionKind::Noma3 => {
            let r = rates_noma3(rp);
            vec![(Group::Near, r.near), (Group::Intermediate, r.mid), (Group::Far, r.far)]
        }
        TransmissionKind::Noma2 { pair } => {
            let r = rates_noma2(pair, rp);
            vec![(pair.nearer(), r.nearer), (pair.farther(), r.farther)]
        }
        TransmissionKind::Ic { group } => vec![(group, rate_ic_in_scheme(group, rp))],
    };
    let sum = layer_rates.iter().fold(T::zero(), |acc, (_, r)| acc + *r);
    TransmissionRate { kind, layer_rates, sum }
}

/// Per-transmission sum rates and their mean over the plan.
pub fn rate_report<T: Float>(plan: &TransmissionPlan<T>, rp: &RateParams<T>) -> Result<RateReport<T>> {
    if plan.is_empty() {
        return Err(Error::EmptyPlan);
    }
    let per_transmission: Vec<_> = plan.transmissions.iter().map(|t| transmission_rate(t.kind, rp)).collect();
    let total = per_transmission.iter().fold(T::zero(), |acc, t| acc + t.sum);
    Ok(RateReport {
        r_avg: total / T::from(per_transmission.len()).expect("count fits the scalar type"),
        r_ic_baseline: rate_ic_baseline(rp.g_f, rp.p)?,
        per_transmission,
    })
}
