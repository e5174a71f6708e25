//! Achievable rates and equal-rate transmit powers.
//!
//! Noise has unit variance and gains are linear power gains, so a layer with
//! power share `c` seen at gain `g` under interference share `i` supports
//! `log2(1 + c P g / (1 + i P g))` bits per channel use. Each group is
//! served at the rate of its weakest member (the group minimum gain).

mod power;
mod rate;

pub use power::*;
pub use rate::*;
