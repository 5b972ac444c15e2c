//! Rank strata of positive semidefinite matrices: charts, tangency,
//! congruence orbits and faces of the density matrices.

mod chart;
mod face;
mod orbits;
mod tangency;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use chart::{
    chart_forward, chart_inverse, jacobian_spectrum, reconstruct_from_rows, retraction_jacobian,
    ChartCoordinates, ChartPhi, IndexSet, JacobianSpectrum, DEFAULT_CONDITION_BOUND,
};
pub use face::{check_density, face_at, DensityCheck, Face};
pub use orbits::{gl_action, gl_orbit_factor, signature_matrix, GlFactor, GL_CONDITION_BOUND};
pub use tangency::{curve_tangency_report, tangent_test, TangencyEntry, TangencyReport, TangentTest};

/// Rank-`k` PSD matrices (`Cone`) or rank-`k` density matrices (`Density`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stratum {
    Cone,
    Density,
}

impl std::str::FromStr for Stratum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cone" => Ok(Stratum::Cone),
            "density" => Ok(Stratum::Density),
            other => Err(Error::InvalidArgument(format!(
                "stratum must be 'cone' or 'density', got '{other}'"
            ))),
        }
    }
}

impl std::fmt::Display for Stratum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stratum::Cone => "cone",
            Stratum::Density => "density",
        })
    }
}

/// `2nk - k^2` for the cone stratum, one less for density matrices.
pub fn stratum_dim(n: usize, k: usize, stratum: Stratum) -> Result<usize> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    let cone = 2 * n * k - k * k;
    Ok(match stratum {
        Stratum::Cone => cone,
        Stratum::Density => cone - 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_examples() {
        assert_eq!(stratum_dim(2, 1, Stratum::Density).unwrap(), 2);
        assert_eq!(stratum_dim(3, 3, Stratum::Density).unwrap(), 8);
        assert_eq!(stratum_dim(4, 2, Stratum::Cone).unwrap(), 12);
        assert!(stratum_dim(3, 0, Stratum::Cone).is_err());
        assert!(stratum_dim(3, 4, Stratum::Cone).is_err());
    }

    #[test]
    fn full_rank_cone_is_open() {
        for n in 1..6 {
            assert_eq!(stratum_dim(n, n, Stratum::Cone).unwrap(), n * n);
        }
    }
}
