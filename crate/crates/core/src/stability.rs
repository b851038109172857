//! Spectral radius of the step operator and the stability threshold `z_max`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fit::{linear_fit, median};
use crate::numkernel::{eigenvalues_general, ComplexMatrix};
use crate::propagate::{build_step_operator, TermSet};
use crate::schemes::SplitScheme;

pub const DEFAULT_EPS_UNIT: f64 = 1e-9;
pub const DEFAULT_REL_TOL: f64 = 1e-3;
/// Largest dimension accepted for dense eigensolves.
pub const DEFAULT_DENSE_CAP: usize = 1 << 12;
/// `find_zmax` scans `[hint / 2^k, hint · 2^k]` with this `k`.
pub const SEARCH_OCTAVES: i32 = 20;
const BOOTSTRAP_SAMPLES: usize = 1000;
const BOOTSTRAP_SEED: u64 = 0x5EED;

/// Largest eigenvalue modulus.
pub fn spectral_radius(u: &ComplexMatrix) -> Result<f64> {
    Ok(eigenvalues_general(u)?.iter().map(|l| l.norm()).fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityCurve {
    pub z_values: Vec<f64>,
    pub radii: Vec<f64>,
}

impl StabilityCurve {
    /// First grid point whose radius exceeds `1 + eps_unit`.
    pub fn first_unstable(&self, eps_unit: f64) -> Option<f64> {
        self.z_values
            .iter()
            .zip(&self.radii)
            .find(|(_, &r)| r > 1.0 + eps_unit)
            .map(|(&z, _)| z)
    }
}

fn check_dense_dim(terms: &TermSet, cap: usize) -> Result<()> {
    if terms.dim() > cap {
        return Err(Error::DimensionTooLarge {
            requested: terms.dim() as u128,
            limit: cap as u128,
        });
    }
    Ok(())
}

pub fn radius_curve(terms: &TermSet, scheme: &SplitScheme, z_grid: &[f64]) -> Result<StabilityCurve> {
    radius_curve_with_cap(terms, scheme, z_grid, DEFAULT_DENSE_CAP)
}

/// Spectral radius of `U(z)` on each grid point. Rejects `dim > cap`; raise
/// the cap or use a smaller model for larger systems.
pub fn radius_curve_with_cap(
    terms: &TermSet,
    scheme: &SplitScheme,
    z_grid: &[f64],
    cap: usize,
) -> Result<StabilityCurve> {
    check_dense_dim(terms, cap)?;
    if z_grid.iter().any(|&z| !(z > 0.0 && z.is_finite())) {
        return Err(Error::InvalidArgument("grid values must be positive".into()));
    }
    if z_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("grid must be strictly increasing".into()));
    }
    let radii = z_grid
        .iter()
        .map(|&z| spectral_radius(&build_step_operator(terms, scheme, z)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(StabilityCurve {
        z_values: z_grid.to_vec(),
        radii,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdResult {
    pub z_max: f64,
    /// Last stable and first unstable step size found.
    pub bracket: (f64, f64),
    pub eps_unit: f64,
    pub converged: bool,
    /// Every `(z, radius)` evaluated, in order.
    pub scan: Vec<(f64, f64)>,
}

/// `1 / ‖H‖_F`, the natural starting scale for a threshold search.
pub fn default_z_hint(terms: &TermSet) -> f64 {
    1.0 / terms.sum_dense().as_matrix().frob_norm()
}

/// Locates the first `z` with `spectral_radius(U(z)) > 1 + eps_unit`.
///
/// Doubles from `z_hint` until the predicate holds (halving instead if it
/// already holds at the hint), then bisects the bracket to `rel_tol`.
pub fn find_zmax(
    terms: &TermSet,
    scheme: &SplitScheme,
    z_hint: f64,
    eps_unit: f64,
    rel_tol: f64,
) -> Result<ThresholdResult> {
    if !(z_hint > 0.0 && z_hint.is_finite()) {
        return Err(Error::InvalidArgument(format!("z_hint must be positive, got {z_hint}")));
    }
    if !(eps_unit > 0.0) {
        return Err(Error::InvalidArgument(format!("eps_unit must be positive, got {eps_unit}")));
    }
    if !(rel_tol > 0.0 && rel_tol <= 0.1) {
        return Err(Error::InvalidArgument(format!("rel_tol must lie in (0, 0.1], got {rel_tol}")));
    }
    check_dense_dim(terms, DEFAULT_DENSE_CAP)?;

    let mut scan = Vec::new();
    // `None` when U(z) overflows, which ends the search.
    let mut unstable = |z: f64| -> Result<Option<bool>> {
        match spectral_radius(&build_step_operator(terms, scheme, z)?) {
            Ok(r) => {
                scan.push((z, r));
                Ok(Some(r > 1.0 + eps_unit))
            }
            Err(Error::NonFinite(_)) => {
                scan.push((z, f64::NAN));
                Ok(None)
            }
            Err(e) => Err(e),
        }
    };

    let lo_limit = z_hint * 2f64.powi(-SEARCH_OCTAVES);
    let hi_limit = z_hint * 2f64.powi(SEARCH_OCTAVES);
    let not_converged = |z_max: f64, bracket: (f64, f64), scan: Vec<(f64, f64)>| ThresholdResult {
        z_max,
        bracket,
        eps_unit,
        converged: false,
        scan,
    };
    let (mut lo, mut hi);
    match unstable(z_hint)? {
        None => return Ok(not_converged(z_hint, (0.0, f64::INFINITY), scan)),
        Some(true) => {
            hi = z_hint;
            lo = z_hint / 2.0;
            loop {
                match unstable(lo)? {
                    Some(false) => break,
                    Some(true) => {
                        hi = lo;
                        lo /= 2.0;
                        if lo < lo_limit {
                            return Ok(not_converged(hi, (0.0, hi), scan));
                        }
                    }
                    None => return Ok(not_converged(hi, (0.0, hi), scan)),
                }
            }
        }
        Some(false) => {
            lo = z_hint;
            hi = z_hint * 2.0;
            loop {
                match unstable(hi)? {
                    Some(true) => break,
                    Some(false) if hi * 2.0 <= hi_limit => {
                        lo = hi;
                        hi *= 2.0;
                    }
                    _ => return Ok(not_converged(lo, (lo, f64::INFINITY), scan)),
                }
            }
        }
    }
    while hi - lo > rel_tol * lo {
        let mid = 0.5 * (lo + hi);
        match unstable(mid)? {
            Some(true) => hi = mid,
            Some(false) => lo = mid,
            None => return Ok(not_converged(0.5 * (lo + hi), (lo, hi), scan)),
        }
    }
    Ok(ThresholdResult {
        z_max: 0.5 * (lo + hi),
        bracket: (lo, hi),
        eps_unit,
        converged: true,
        scan,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingFit {
    /// Exponent in `z_max ∝ N^(-alpha)`.
    pub alpha: f64,
    /// Bootstrap standard error of `alpha`.
    pub std_error: f64,
    pub medians: Vec<f64>,
    /// Set when all medians coincide, so no trend can be resolved.
    pub degenerate: bool,
}

impl ScalingFit {
    pub fn relative_error(&self) -> f64 {
        if self.degenerate || self.alpha == 0.0 {
            f64::INFINITY
        } else {
            self.std_error / self.alpha.abs()
        }
    }
}

fn alpha_from_medians(log_sizes: &[f64], medians: &[f64]) -> Result<f64> {
    let ys: Vec<f64> = medians.iter().map(|m| m.ln()).collect();
    Ok(-linear_fit(log_sizes, &ys)?.slope)
}

/// Fits `log median(z_max)` against `log N`; the negated slope is `alpha`.
pub fn scaling_fit(sizes: &[usize], samples: &[Vec<f64>]) -> Result<ScalingFit> {
    if sizes.len() != samples.len() {
        return Err(Error::InvalidArgument("one sample list is needed per size".into()));
    }
    if sizes.len() < 3 {
        return Err(Error::TooFewPoints {
            usable: sizes.len(),
            required: 3,
        });
    }
    if let Some(s) = samples.iter().find(|s| s.len() < 5) {
        return Err(Error::TooFewPoints {
            usable: s.len(),
            required: 5,
        });
    }
    if samples.iter().flatten().any(|&z| !(z > 0.0 && z.is_finite())) {
        return Err(Error::InvalidArgument("z_max samples must be positive and finite".into()));
    }
    if sizes.contains(&0) {
        return Err(Error::InvalidArgument("sizes must be positive".into()));
    }
    let log_sizes: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let medians: Vec<f64> = samples.iter().map(|s| median(s).expect("non-empty")).collect();
    let alpha = alpha_from_medians(&log_sizes, &medians)?;
    let degenerate = medians.windows(2).all(|w| w[0] == w[1]);
    if degenerate {
        return Ok(ScalingFit {
            alpha: 0.0,
            std_error: f64::INFINITY,
            medians,
            degenerate,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(BOOTSTRAP_SEED);
    let mut resampled = Vec::new();
    let alphas = (0..BOOTSTRAP_SAMPLES)
        .map(|_| {
            let meds: Vec<f64> = samples
                .iter()
                .map(|s| {
                    resampled.clear();
                    resampled.extend((0..s.len()).map(|_| s[rng.random_range(0..s.len())]));
                    median(&resampled).expect("non-empty")
                })
                .collect();
            alpha_from_medians(&log_sizes, &meds)
        })
        .collect::<Result<Vec<_>>>()?;
    let mean = alphas.iter().sum::<f64>() / alphas.len() as f64;
    let var = alphas.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (alphas.len() - 1) as f64;
    Ok(ScalingFit {
        alpha,
        std_error: var.sqrt(),
        medians,
        degenerate,
    })
}
