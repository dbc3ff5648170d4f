//! Complex-argument special functions.

mod bessel;
mod gamma;
mod hyp1f1;
mod whittaker;

pub use bessel::{bessel_j, bessel_j2_over_x2};
pub use gamma::{cgamma, digamma, ln_gamma, rgamma};
pub use hyp1f1::hyp1f1;
pub use whittaker::{
    whittaker_pair, whittaker_pair_checked, whittaker_scaled, Scaled, ScaledPair, WhittakerEval, WhittakerIndex,
    WronskianCheck, WronskianMode,
};
