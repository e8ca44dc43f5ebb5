//! Forward evaluation of the parameterized signature layer: each unit
//! sums, over the bars of a diagram, a Gaussian response in (birth,
//! death) whose death coordinate is log-warped below the threshold
//! `upsilon` and vanishes at death zero.

use crate::error::{Error, Result};
use crate::persistence::PersistenceDiagramSet;

use super::capped_pairs;

/// Parameters of one signature unit.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureUnit {
    /// Center; `mu.1 >= 0`.
    pub mu: (f64, f64),
    /// Sharpness along each axis; both positive.
    pub sigma: (f64, f64),
    /// Log-branch threshold; positive.
    pub upsilon: f64,
}

impl SignatureUnit {
    pub fn validate(&self) -> Result<()> {
        if self.mu.1 < 0.0 {
            return Err(Error::InvalidInput("unit mu.1 must be >= 0".into()));
        }
        if !(self.sigma.0 > 0.0 && self.sigma.1 > 0.0) {
            return Err(Error::InvalidInput("unit sigmas must be > 0".into()));
        }
        if !(self.upsilon > 0.0) {
            return Err(Error::InvalidInput("upsilon must be > 0".into()));
        }
        Ok(())
    }

    /// Response to a single (birth, death) pair. The death branch is the
    /// identity at or above `upsilon`, `ln(b/upsilon) + upsilon` below it
    /// (continuous at the seam), and the response is zero at death zero.
    pub fn response(&self, birth: f64, death: f64) -> f64 {
        if death == 0.0 {
            return 0.0;
        }
        let warped = if death >= self.upsilon {
            death
        } else {
            (death / self.upsilon).ln() + self.upsilon
        };
        let da = birth - self.mu.0;
        let db = warped - self.mu.1;
        (-self.sigma.0 * self.sigma.0 * da * da - self.sigma.1 * self.sigma.1 * db * db).exp()
    }
}

/// Evaluates the layer on the dimension-`dim` bars: one output per unit,
/// each the sum of that unit's responses. Infinite deaths are capped at
/// the diagram's maximum filtration value first.
pub fn signature_layer(
    d: &PersistenceDiagramSet,
    dim: usize,
    units: &[SignatureUnit],
) -> Result<Vec<f64>> {
    for u in units {
        u.validate()?;
    }
    let pairs = capped_pairs(d.bars(dim), d.max_value());
    Ok(units
        .iter()
        .map(|u| pairs.iter().map(|&(a, b)| u.response(a, b)).sum())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::Bar;

    fn unit(mu: (f64, f64), sigma: (f64, f64), upsilon: f64) -> SignatureUnit {
        SignatureUnit { mu, sigma, upsilon }
    }

    #[test]
    fn death_zero_contributes_nothing() {
        let u = unit((0.0, 0.0), (1.0, 1.0), 1.0);
        assert_eq!(u.response(0.5, 0.0), 0.0);
    }

    #[test]
    fn upper_branch_spot_value() {
        let u = unit((0.0, 0.0), (1.0, 1.0), 1.0);
        // Bar (0, 1): death at the threshold, response exp(-1).
        assert!((u.response(0.0, 1.0) - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn continuous_across_threshold() {
        let units = [
            unit((0.3, 0.7), (1.2, 0.8), 0.9),
            unit((0.0, 0.0), (2.0, 0.5), 0.4),
            unit((1.0, 2.0), (0.3, 1.5), 1.7),
        ];
        for u in &units {
            let below = u.response(0.2, u.upsilon - 1e-9);
            let above = u.response(0.2, u.upsilon + 1e-9);
            assert!(
                (below - above).abs() < 1e-6,
                "discontinuity at upsilon for {u:?}"
            );
        }
    }

    #[test]
    fn layer_sums_over_bars() {
        let bars = vec![
            Bar {
                birth: 0.0,
                death: 1.0,
                birth_index: 0,
                death_index: None,
            },
            Bar {
                birth: 0.0,
                death: 1.0,
                birth_index: 0,
                death_index: None,
            },
        ];
        let d = PersistenceDiagramSet::from_bars(vec![bars], 2.0);
        let u = unit((0.0, 0.0), (1.0, 1.0), 1.0);
        let out = signature_layer(&d, 0, &[u.clone()]).unwrap();
        assert!((out[0] - 2.0 * u.response(0.0, 1.0)).abs() < 1e-12);
        // Infinite deaths are capped at max_value before evaluation.
        let inf = PersistenceDiagramSet::from_bars(
            vec![vec![Bar {
                birth: 0.0,
                death: f64::INFINITY,
                birth_index: 0,
                death_index: None,
            }]],
            2.0,
        );
        let out = signature_layer(&inf, 0, &[u.clone()]).unwrap();
        assert!((out[0] - u.response(0.0, 2.0)).abs() < 1e-12);
    }

    #[test]
    fn invalid_units_rejected() {
        let d = PersistenceDiagramSet::from_bars(vec![vec![]], 1.0);
        assert!(signature_layer(&d, 0, &[unit((0.0, -0.1), (1.0, 1.0), 1.0)]).is_err());
        assert!(signature_layer(&d, 0, &[unit((0.0, 0.0), (0.0, 1.0), 1.0)]).is_err());
        assert!(signature_layer(&d, 0, &[unit((0.0, 0.0), (1.0, 1.0), 0.0)]).is_err());
    }
}
