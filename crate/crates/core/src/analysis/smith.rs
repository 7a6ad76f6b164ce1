use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Latitude-dependent θ bucket count for a target angular tolerance `tau`:
/// `1/n̂ = acos((cos τ − cos φ cos φ′) / (sin φ sin φ′))` with
/// `φ′ = φ + π / (2 n_φmax)`, returning `⌈π n̂⌉`.
///
/// Variable-rate; only used to compare against the fixed-rate layout.
pub fn smith_theta_bins(phi: f64, n_phi_max: u64, tau: f64) -> Result<u64> {
    if !(phi > 0.0 && phi < PI && tau > 0.0) || n_phi_max == 0 {
        return Err(Error::DomainError(f64::NAN));
    }
    let next = phi + PI / (2.0 * n_phi_max as f64);
    let arg = (tau.cos() - phi.cos() * next.cos()) / (phi.sin() * next.sin());
    if !(-1.0..=1.0).contains(&arg) {
        return Err(Error::DomainError(arg));
    }
    let width = arg.acos();
    let bins = (PI / width).ceil();
    if !bins.is_finite() || bins > u64::MAX as f64 {
        return Err(Error::DomainError(arg));
    }
    Ok(bins as u64)
}
