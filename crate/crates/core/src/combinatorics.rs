//! K-transform, its inverse and the Lebesgue-Poisson exponential on finite
//! two-component configurations.
//!
//! On a finite configuration every sum over sub-configurations is a finite
//! sum over subset masks, so these are exact up to float rounding. Sub-
//! configurations are enumerated by a combined inclusion mask whose low
//! `|η⁺|` bits select plus points and whose high bits select minus points.

use crate::error::{Error, Result};
use crate::geometry::{Point, TwoSpeciesConfiguration};

/// Largest `|η|` accepted by the exhaustive routines (about 10⁶ subsets).
pub const ENUMERATION_LIMIT: usize = 20;

fn guard(cfg: &TwoSpeciesConfiguration) -> Result<()> {
    if cfg.len() > ENUMERATION_LIMIT {
        return Err(Error::SizeGuard {
            size: cfg.len(),
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

fn subconfiguration(cfg: &TwoSpeciesConfiguration, mask: u32) -> TwoSpeciesConfiguration {
    let np = cfg.plus().len();
    let pick = |pts: &[Point], shift: usize| -> Vec<Point> {
        pts.iter()
            .enumerate()
            .filter(|(i, _)| mask >> (i + shift) & 1 == 1)
            .map(|(_, p)| *p)
            .collect()
    };
    TwoSpeciesConfiguration::from_parts_unchecked(pick(cfg.plus(), 0), pick(cfg.minus(), np))
}

/// All `2^{|η⁺|}·2^{|η⁻|}` sub-configurations `ξ ⊂ η`, ordered by inclusion mask.
pub fn enumerate_subconfigurations(
    eta: &TwoSpeciesConfiguration,
) -> Result<Vec<TwoSpeciesConfiguration>> {
    guard(eta)?;
    Ok((0..1u32 << eta.len()).map(|m| subconfiguration(eta, m)).collect())
}

/// Two-component Lebesgue-Poisson exponential `e_λ(f⁺;η⁺)·e_λ(f⁻;η⁻)`.
pub fn lp_exponential<P, M>(f_plus: P, f_minus: M, eta: &TwoSpeciesConfiguration) -> f64
where
    P: Fn(&Point) -> f64,
    M: Fn(&Point) -> f64,
{
    eta.plus().iter().map(f_plus).product::<f64>() * eta.minus().iter().map(f_minus).product::<f64>()
}

/// `(KG)(γ) = Σ_{ξ ⊂ γ} G(ξ)`.
pub fn k_transform<G>(g: G, gamma: &TwoSpeciesConfiguration) -> Result<f64>
where
    G: Fn(&TwoSpeciesConfiguration) -> f64,
{
    guard(gamma)?;
    Ok((0..1u32 << gamma.len())
        .map(|m| g(&subconfiguration(gamma, m)))
        .sum())
}

/// `(K⁻¹F)(η) = Σ_{ξ ⊂ η} (−1)^{|η∖ξ|} F(ξ)`.
pub fn k_inverse<F>(f: F, eta: &TwoSpeciesConfiguration) -> Result<f64>
where
    F: Fn(&TwoSpeciesConfiguration) -> f64,
{
    guard(eta)?;
    let n = eta.len() as u32;
    Ok((0..1u32 << n)
        .map(|m| {
            let v = f(&subconfiguration(eta, m));
            if (n - m.count_ones()).is_multiple_of(2) {
                v
            } else {
                -v
            }
        })
        .sum())
}
