//! Study systems: random GUE pairs, the tilted-field Ising chain and the
//! two-level Pauli model.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{ComplexMatrix, HermitianMatrix, C64};
use crate::propagate::{build_step_operator, Term, TermSet};
use crate::schemes::SplitScheme;

/// Added (wrapping) to the seed of `A` to obtain the seed of `B`.
pub const GUE_B_SEED_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;
pub const MIN_ISING_SITES: usize = 2;
/// Largest chain whose dense form stays within the dense eigensolver cap.
pub const MAX_ISING_SITES: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GueSpec {
    pub dim: usize,
    pub seed: u64,
}

/// One GUE sample: real N(0,1) diagonal, off-diagonal `(x + iy)/√2` with
/// `x, y ~ N(0,1)`, so `E|H_jk|² = 1`. No `1/√N` scaling.
pub fn gue_matrix(dim: usize, seed: u64) -> Result<HermitianMatrix> {
    if dim == 0 {
        return Err(Error::InvalidArgument("GUE dimension must be >= 1".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut g = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut m = ComplexMatrix::zeros(dim, dim).into_mat();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..dim {
        m[(i, i)] = C64::new(g(), 0.0);
        for j in i + 1..dim {
            let z = C64::new(g() * s, g() * s);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    HermitianMatrix::new(ComplexMatrix::from_mat(m))
}

/// Independent samples `(A, B)`; `B` uses seed `seed + GUE_B_SEED_OFFSET`.
pub fn gue_pair(spec: GueSpec) -> Result<(HermitianMatrix, HermitianMatrix)> {
    if spec.dim < 2 {
        return Err(Error::InvalidArgument(format!("GUE pair needs dim >= 2, got {}", spec.dim)));
    }
    Ok((
        gue_matrix(spec.dim, spec.seed)?,
        gue_matrix(spec.dim, spec.seed.wrapping_add(GUE_B_SEED_OFFSET))?,
    ))
}

pub fn gue_terms(spec: GueSpec) -> Result<TermSet> {
    let (a, b) = gue_pair(spec)?;
    TermSet::from_dense(vec![a, b])
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    #[default]
    Periodic,
    Open,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsingSpec {
    pub sites: usize,
    pub j: f64,
    pub gx: f64,
    pub gz: f64,
    pub boundary: Boundary,
}

impl IsingSpec {
    /// `J = 1, g_x = 0.4, g_z = 0.8`, periodic.
    pub fn chaotic(sites: usize) -> Self {
        Self {
            sites,
            j: 1.0,
            gx: 0.4,
            gz: 0.8,
            boundary: Boundary::Periodic,
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.sites
    }
}

/// Diagonal of `Σ(−J σᶻσᶻ + g_z σᶻ)`. Site 0 is the most significant bit and
/// `σᶻ|0⟩ = +|0⟩`.
pub fn ising_diagonal(spec: &IsingSpec) -> Vec<f64> {
    let n = spec.sites;
    let bonds = match spec.boundary {
        Boundary::Periodic => n,
        Boundary::Open => n - 1,
    };
    (0..1usize << n)
        .map(|state| {
            let spin = |k: usize| if (state >> (n - 1 - k)) & 1 == 0 { 1.0 } else { -1.0 };
            let coupling: f64 = (0..bonds).map(|k| spin(k) * spin((k + 1) % n)).sum();
            let field: f64 = (0..n).map(spin).sum();
            -spec.j * coupling + spec.gz * field
        })
        .collect()
}

/// `A` = all `σᶻ` pieces (diagonal strategy), `B = g_x Σσˣ` (tensor-local).
pub fn ising_terms(spec: &IsingSpec) -> Result<TermSet> {
    if !(MIN_ISING_SITES..=MAX_ISING_SITES).contains(&spec.sites) {
        return Err(Error::InvalidArgument(format!(
            "Ising chain needs {MIN_ISING_SITES}..={MAX_ISING_SITES} sites, got {}",
            spec.sites
        )));
    }
    if ![spec.j, spec.gx, spec.gz].iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite("Ising couplings".into()));
    }
    let sx = pauli_matrix([spec.gx, 0.0, 0.0]);
    TermSet::new(vec![
        Term::diagonal(ising_diagonal(spec))?,
        Term::tensor_local(&sx, spec.sites)?,
    ])
}

/// `v·σ = [[v₃, v₁ − i v₂], [v₁ + i v₂, −v₃]]`.
pub fn pauli_matrix(v: [f64; 3]) -> HermitianMatrix {
    let m = ComplexMatrix::from_row_major(
        2,
        2,
        &[
            C64::new(v[2], 0.0),
            C64::new(v[0], -v[1]),
            C64::new(v[0], v[1]),
            C64::new(-v[2], 0.0),
        ],
    )
    .expect("2x2 entries");
    HermitianMatrix::new(m).expect("Pauli combinations are Hermitian")
}

/// How the transverse parts of `a` and `b` are placed when only magnitudes
/// and z-projections are given.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Completion {
    /// Transverse parts along x̂ and ŷ.
    #[default]
    Orthogonal,
    /// Both along +x̂.
    Parallel,
    /// Along +x̂ and −x̂.
    Antiparallel,
}

/// Traceless 2×2 pair `A = a·σ`, `B = b·σ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliConfig {
    pub a: [f64; 3],
    pub b: [f64; 3],
}

fn norm3(v: [f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl PauliConfig {
    pub fn new(a: [f64; 3], b: [f64; 3]) -> Self {
        Self { a, b }
    }

    pub fn from_projections(alpha: f64, beta: f64, alpha3: f64, beta3: f64, completion: Completion) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0) {
            return Err(Error::InvalidArgument("magnitudes must be positive".into()));
        }
        if !(alpha3.abs() <= 1.0 && beta3.abs() <= 1.0) {
            return Err(Error::InvalidArgument("z-projections must lie in [-1, 1]".into()));
        }
        let ta = (1.0 - alpha3 * alpha3).sqrt();
        let tb = (1.0 - beta3 * beta3).sqrt();
        let a = [alpha * ta, 0.0, alpha * alpha3];
        let b = match completion {
            Completion::Orthogonal => [0.0, beta * tb, beta * beta3],
            Completion::Parallel => [beta * tb, 0.0, beta * beta3],
            Completion::Antiparallel => [-beta * tb, 0.0, beta * beta3],
        };
        Ok(Self { a, b })
    }

    pub fn alpha(&self) -> f64 {
        norm3(self.a)
    }

    pub fn beta(&self) -> f64 {
        norm3(self.b)
    }

    pub fn alpha3(&self) -> Result<f64> {
        match self.alpha() {
            n if n > 0.0 => Ok(self.a[2] / n),
            _ => Err(Error::InvalidArgument("a = 0 has no direction".into())),
        }
    }

    pub fn beta3(&self) -> Result<f64> {
        match self.beta() {
            n if n > 0.0 => Ok(self.b[2] / n),
            _ => Err(Error::InvalidArgument("b = 0 has no direction".into())),
        }
    }
}

pub fn pauli_terms(cfg: &PauliConfig) -> Result<TermSet> {
    TermSet::from_dense(vec![pauli_matrix(cfg.a), pauli_matrix(cfg.b)])
}

/// `½ Tr U(z)` of the actual product.
pub fn q_direct(cfg: &PauliConfig, scheme: &SplitScheme, z: f64) -> Result<C64> {
    Ok(build_step_operator(&pauli_terms(cfg)?, scheme, z)?.trace() * 0.5)
}

/// Closed-form `Q(z)` in terms of `α, β, α₃, β₃`, evaluated term by term.
pub fn q_closed_form(alpha: f64, beta: f64, alpha3: f64, beta3: f64, z: f64) -> Result<C64> {
    if !(alpha3.abs() <= 1.0 && beta3.abs() <= 1.0) {
        return Err(Error::InvalidArgument("z-projections must lie in [-1, 1]".into()));
    }
    let r3 = 3f64.sqrt();
    let (a3, b3) = (alpha3, beta3);
    let (az, bz) = (alpha * z, beta * z);
    let first = (1.0 - a3 * a3 + (1.0 + 3.0 * a3 * a3) * az.cos())
        * ((1.0 + b3 * b3) * bz.cos() + (1.0 - b3 * b3) * (bz / r3).cosh());
    let second = -2.0 * a3 * (3.0 + a3 * a3) * b3 * az.sin() * bz.sin();
    let third = 2.0
        * (1.0 - a3 * a3)
        * (az / (2.0 * r3)).cosh()
        * ((1.0 + b3 * b3) * (az / 2.0).cos() * bz.cos()
            + (1.0 - b3 * b3) * (az / 2.0).cos() * (bz / r3).cosh()
            - 2.0 * a3 * b3 * (az / 2.0).sin() * bz.sin());
    Ok(C64::new((first + second + third) / 8.0, 0.0))
}

/// `(α² + β² + 2a₃² + 2b₃² + 6a₃b₃)/6`, minus the `z²` coefficient of the
/// closed-form `Q`.
pub fn small_z_quadratic(cfg: &PauliConfig) -> f64 {
    let (a3, b3) = (cfg.a[2], cfg.b[2]);
    let (al, be) = (cfg.alpha(), cfg.beta());
    (al * al + be * be + 2.0 * a3 * a3 + 2.0 * b3 * b3 + 6.0 * a3 * b3) / 6.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QSource {
    Direct,
    ClosedForm,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaPoint {
    pub z: f64,
    pub q: C64,
    /// `arccos(Q)/z` on the branch continuing the previous point.
    pub gamma: C64,
    /// `arccos(Q)/z` on the principal branch.
    pub gamma_principal: C64,
    /// `|Q| ≤ 1` differs from the previous point.
    pub crossing: bool,
}

/// Solution of `cos w = cos w0` nearest to `target`.
fn match_branch(w0: C64, target: C64) -> C64 {
    let tau = std::f64::consts::TAU;
    [w0, -w0]
        .into_iter()
        .map(|w| w + tau * ((target - w).re / tau).round())
        .min_by(|x, y| (x - target).norm().total_cmp(&(y - target).norm()))
        .expect("two candidates")
}

pub fn gamma_curve(cfg: &PauliConfig, scheme: &SplitScheme, z_grid: &[f64], source: QSource) -> Result<Vec<GammaPoint>> {
    if z_grid.iter().any(|&z| !(z > 0.0 && z.is_finite())) {
        return Err(Error::InvalidArgument("grid values must be positive".into()));
    }
    let terms = pauli_terms(cfg)?;
    let projections = match source {
        QSource::ClosedForm => Some((cfg.alpha3()?, cfg.beta3()?)),
        QSource::Direct => None,
    };
    let mut out: Vec<GammaPoint> = Vec::with_capacity(z_grid.len());
    for &z in z_grid {
        let q = match projections {
            Some((a3, b3)) => q_closed_form(cfg.alpha(), cfg.beta(), a3, b3, z)?,
            None => build_step_operator(&terms, scheme, z)?.trace() * 0.5,
        };
        let w0 = q.acos();
        // Target the linear extrapolation of the last two points, so that a
        // fold of the principal value is followed through.
        let n = out.len();
        let (w, crossing) = match out.last() {
            Some(p) => {
                let w1 = p.gamma * p.z;
                let target = if n >= 2 {
                    let q0 = &out[n - 2];
                    let w2 = q0.gamma * q0.z;
                    w1 + (w1 - w2) * ((z - p.z) / (p.z - q0.z))
                } else {
                    w1
                };
                (match_branch(w0, target), (p.q.norm() <= 1.0) != (q.norm() <= 1.0))
            }
            None => (w0, false),
        };
        out.push(GammaPoint {
            z,
            q,
            gamma: w / z,
            gamma_principal: w0 / z,
            crossing,
        });
    }
    Ok(out)
}

/// First `z` in `(0, z_end]` where `|Im arccos Q_direct(z)| > ln(1 + eps_unit)`,
/// i.e. where an eigenvalue of the 2×2 step leaves the unit circle. Scans
/// `n_scan` uniform points, then bisects to `rel_tol`.
pub fn q_threshold(
    cfg: &PauliConfig,
    scheme: &SplitScheme,
    z_end: f64,
    n_scan: usize,
    eps_unit: f64,
    rel_tol: f64,
) -> Result<Option<f64>> {
    if !(z_end > 0.0) || n_scan == 0 || !(eps_unit > 0.0) || !(rel_tol > 0.0) {
        return Err(Error::InvalidArgument("invalid threshold scan parameters".into()));
    }
    let terms = pauli_terms(cfg)?;
    let limit = eps_unit.ln_1p();
    let unstable = |z: f64| -> Result<bool> {
        let q = build_step_operator(&terms, scheme, z)?.trace() * 0.5;
        Ok(q.acos().im.abs() > limit)
    };
    let h = z_end / n_scan as f64;
    let mut lo = 0.0;
    for k in 1..=n_scan {
        let hi = k as f64 * h;
        if unstable(hi)? {
            let mut hi = hi;
            while hi - lo > rel_tol * lo.max(f64::MIN_POSITIVE) {
                let mid = 0.5 * (lo + hi);
                if unstable(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
        lo = hi;
    }
    Ok(None)
}

fn default_j() -> f64 {
    1.0
}

fn default_gx() -> f64 {
    0.4
}

fn default_gz() -> f64 {
    0.8
}

/// Serializable model description, tagged by `kind`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    Gue {
        dim: usize,
        seed: u64,
    },
    Ising {
        sites: usize,
        #[serde(default = "default_j")]
        j: f64,
        #[serde(default = "default_gx")]
        gx: f64,
        #[serde(default = "default_gz")]
        gz: f64,
        #[serde(default)]
        boundary: Boundary,
    },
    Pauli {
        a: [f64; 3],
        b: [f64; 3],
    },
    PauliProjections {
        alpha: f64,
        beta: f64,
        alpha3: f64,
        beta3: f64,
        #[serde(default)]
        completion: Completion,
    },
}

impl ModelSpec {
    pub fn terms(&self) -> Result<TermSet> {
        match *self {
            ModelSpec::Gue { dim, seed } => gue_terms(GueSpec { dim, seed }),
            ModelSpec::Ising {
                sites,
                j,
                gx,
                gz,
                boundary,
            } => ising_terms(&IsingSpec {
                sites,
                j,
                gx,
                gz,
                boundary,
            }),
            ModelSpec::Pauli { a, b } => pauli_terms(&PauliConfig::new(a, b)),
            ModelSpec::PauliProjections {
                alpha,
                beta,
                alpha3,
                beta3,
                completion,
            } => pauli_terms(&PauliConfig::from_projections(alpha, beta, alpha3, beta3, completion)?),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{expm_i, frob_distance, kron, random_state, StateVector};
    use crate::propagate::apply_step;
    use crate::schemes::{baseline_scheme, c3_scheme, Baseline};
    use crate::stability::{find_zmax, spectral_radius};
    use proptest::prelude::*;
    use rand::Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn gue_construction() {
        let spec = GueSpec { dim: 16, seed: 3 };
        let (a, b) = gue_pair(spec).unwrap();
        assert_eq!(a.as_matrix().hermiticity_residual(), 0.0);
        assert_eq!(frob_distance(a.as_matrix(), &a.as_matrix().adjoint()).unwrap(), 0.0);
        let (a2, b2) = gue_pair(spec).unwrap();
        assert_eq!(a.as_matrix(), a2.as_matrix());
        assert_eq!(b.as_matrix(), b2.as_matrix());
        let (a3, _) = gue_pair(GueSpec { dim: 16, seed: 4 }).unwrap();
        assert_ne!(a.as_matrix(), a3.as_matrix());
        assert_ne!(a.as_matrix(), b.as_matrix());
        assert!(gue_pair(GueSpec { dim: 1, seed: 0 }).is_err());
    }

    #[test]
    fn gue_entry_variance() {
        let a = gue_matrix(96, 11).unwrap();
        let n = 96;
        let (mut off, mut diag) = (0.0, 0.0);
        for i in 0..n {
            diag += a.as_matrix().get(i, i).norm_sqr();
            for j in i + 1..n {
                off += a.as_matrix().get(i, j).norm_sqr();
            }
        }
        let off = off / (n * (n - 1) / 2) as f64;
        let diag = diag / n as f64;
        assert!((off - 1.0).abs() < 0.1, "off-diagonal {off}");
        assert!((diag - 1.0).abs() < 0.3, "diagonal {diag}");
    }

    #[test]
    fn gue_semicircle() {
        let n = 256;
        let a = gue_matrix(n, 5).unwrap();
        let vals = a.eigen().unwrap().values().to_vec();
        let radius = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let edge = 2.0 * (n as f64).sqrt();
        assert!((radius - edge).abs() <= 0.15 * edge, "radius {radius}");
        // Kolmogorov distance to the semicircle CDF on [-2, 2].
        let cdf = |x: f64| {
            let x = x.clamp(-2.0, 2.0);
            0.5 + (x * (4.0 - x * x).sqrt() / 4.0 + (x / 2.0).asin()) / std::f64::consts::PI
        };
        let scaled: Vec<f64> = vals.iter().map(|v| v / (n as f64).sqrt()).collect();
        let d = scaled
            .iter()
            .enumerate()
            .map(|(k, &x)| {
                let f = cdf(x);
                (f - k as f64 / n as f64).abs().max((f - (k + 1) as f64 / n as f64).abs())
            })
            .fold(0.0, f64::max);
        assert!(d < 0.1, "Kolmogorov distance {d}");
    }

    #[test]
    fn ising_two_sites() {
        let spec = IsingSpec {
            sites: 2,
            j: 1.3,
            gx: 0.0,
            gz: 0.7,
            boundary: Boundary::Periodic,
        };
        let (j, gz) = (spec.j, spec.gz);
        assert_eq!(
            ising_diagonal(&spec),
            vec![-2.0 * j + 2.0 * gz, 2.0 * j, 2.0 * j, -2.0 * j - 2.0 * gz]
        );
        // Kronecker oracle.
        let sz = ComplexMatrix::from_diagonal(&[c(1.0), c(-1.0)]);
        let id = ComplexMatrix::identity(2);
        let zz = kron(&sz, &sz).unwrap();
        let field = &kron(&sz, &id).unwrap() + &kron(&id, &sz).unwrap();
        let h = &zz.scale(c(-2.0 * j)) + &field.scale(c(gz));
        let terms = ising_terms(&spec).unwrap();
        assert!(frob_distance(terms.term(0).dense_matrix().as_matrix(), &h).unwrap() < 1e-14);
        let open = IsingSpec {
            boundary: Boundary::Open,
            ..spec
        };
        assert_eq!(ising_diagonal(&open), vec![-j + 2.0 * gz, j, j, -j - 2.0 * gz]);
    }

    #[test]
    fn ising_transverse_term() {
        let spec = IsingSpec::chaotic(3);
        let terms = ising_terms(&spec).unwrap();
        let sx = ComplexMatrix::from_row_major(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]).unwrap();
        let id = ComplexMatrix::identity(2);
        let x0 = kron(&kron(&sx, &id).unwrap(), &id).unwrap();
        let x1 = kron(&kron(&id, &sx).unwrap(), &id).unwrap();
        let x2 = kron(&kron(&id, &id).unwrap(), &sx).unwrap();
        let b = (&(&x0 + &x1) + &x2).scale(c(0.4));
        assert!(frob_distance(terms.term(1).dense_matrix().as_matrix(), &b).unwrap() < 1e-14);
        assert!(ising_terms(&IsingSpec::chaotic(1)).is_err());
        assert!(ising_terms(&IsingSpec::chaotic(13)).is_err());
    }

    #[test]
    fn ising_without_transverse_field_is_exact() {
        let spec = IsingSpec {
            gx: 0.0,
            ..IsingSpec::chaotic(4)
        };
        let terms = ising_terms(&spec).unwrap();
        let psi = random_state(16, 1).unwrap();
        let exact = expm_i(terms.term(0).dense_matrix(), c(0.6)).unwrap();
        let expected = StateVector::new(exact.mul_vec(psi.amplitudes())).unwrap();
        for s in [c3_scheme(2).unwrap(), baseline_scheme(Baseline::R3, 2).unwrap()] {
            let out = apply_step(&terms, &s, 0.6, &psi, false).unwrap();
            assert!(out.distance(&expected) < 1e-12);
        }
    }

    #[test]
    fn ising_structured_matches_dense() {
        for sites in [2, 5, 8] {
            let terms = ising_terms(&IsingSpec::chaotic(sites)).unwrap();
            let dense = TermSet::from_dense(terms.terms().iter().map(|t| t.dense_matrix().clone()).collect()).unwrap();
            let s = c3_scheme(2).unwrap();
            let psi = random_state(1 << sites, 3).unwrap();
            let a = apply_step(&terms, &s, 0.4, &psi, false).unwrap();
            let u = build_step_operator(&dense, &s, 0.4).unwrap();
            let b = StateVector::new(u.mul_vec(psi.amplitudes())).unwrap();
            assert!(a.distance(&b) < 1e-9, "sites {sites}");
        }
    }

    #[test]
    fn pauli_basics() {
        let t = pauli_terms(&PauliConfig::new([0.0, 0.0, 1.0], [0.0; 3])).unwrap();
        let a = t.term(0).dense_matrix().as_matrix();
        assert_eq!(a, &ComplexMatrix::from_diagonal(&[c(1.0), c(-1.0)]));
        assert_eq!(t.term(1).dense_matrix().as_matrix().max_abs(), 0.0);
        let cfg = PauliConfig::new([0.3, -1.1, 0.4], [0.5, 0.2, -0.9]);
        let t = pauli_terms(&cfg).unwrap();
        for (k, norm) in [(0, cfg.alpha()), (1, cfg.beta())] {
            let m = t.term(k).dense_matrix().as_matrix();
            assert_eq!(m.trace(), c(0.0));
            let sq = m * m;
            let expected = ComplexMatrix::identity(2).scale(c(norm * norm));
            assert!(frob_distance(&sq, &expected).unwrap() < 1e-14);
        }
    }

    #[test]
    fn projections_round_trip() {
        for completion in [Completion::Orthogonal, Completion::Parallel, Completion::Antiparallel] {
            let cfg = PauliConfig::from_projections(1.5, 0.7, 0.1, -0.3, completion).unwrap();
            assert!((cfg.alpha() - 1.5).abs() < 1e-15 && (cfg.beta() - 0.7).abs() < 1e-15);
            assert!((cfg.alpha3().unwrap() - 0.1).abs() < 1e-15);
            assert!((cfg.beta3().unwrap() + 0.3).abs() < 1e-15);
        }
        assert!(PauliConfig::from_projections(1.0, 1.0, 1.2, 0.0, Completion::Orthogonal).is_err());
        assert!(PauliConfig::from_projections(0.0, 1.0, 0.0, 0.0, Completion::Orthogonal).is_err());
        assert!(PauliConfig::new([0.0; 3], [1.0, 0.0, 0.0]).alpha3().is_err());
    }

    #[test]
    fn q_direct_examples() {
        let s = c3_scheme(2).unwrap();
        let cfg = PauliConfig::new([0.2, 0.5, -0.3], [1.0, 0.0, 0.4]);
        assert!((q_direct(&cfg, &s, 0.0).unwrap() - c(1.0)).norm() < 1e-15);
        let aligned = PauliConfig::new([0.0, 0.0, 1.3], [0.0, 0.0, 0.6]);
        for z in [0.3, 1.0, 4.0] {
            let q = q_direct(&aligned, &s, z).unwrap();
            assert!((q - c(((1.3 + 0.6) * z).cos())).norm() < 1e-12);
        }
    }

    #[test]
    fn q_direct_second_order() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let mut v = || [0, 1, 2].map(|_| rng.random_range(-1.0..1.0));
            let cfg = PauliConfig::new(v(), v());
            let sum: f64 = (0..3).map(|k| (cfg.a[k] + cfg.b[k]).powi(2)).sum();
            for s in [c3_scheme(2).unwrap(), baseline_scheme(Baseline::Lie1, 2).unwrap()] {
                let h = 3e-4;
                let q = |z| q_direct(&cfg, &s, z).unwrap();
                let d2 = (q(h) - q(0.0) * 2.0 + q(-h)) / (h * h);
                assert!((d2 + c(sum)).norm() <= 1e-6 * sum, "{d2} vs {}", -sum);
            }
        }
    }

    #[test]
    fn q_closed_form_examples() {
        assert!((q_closed_form(1.3, 0.4, 0.2, -0.7, 0.0).unwrap() - c(1.0)).norm() < 1e-15);
        let s = c3_scheme(2).unwrap();
        let aligned = PauliConfig::new([0.0, 0.0, 1.1], [0.0, 0.0, 0.8]);
        for z in [0.2, 1.0, 2.5] {
            let closed = q_closed_form(1.1, 0.8, 1.0, 1.0, z).unwrap();
            assert!((closed - c((1.9 * z).cos())).norm() < 1e-12);
            assert!((closed - q_direct(&aligned, &s, z).unwrap()).norm() < 1e-12);
        }
        assert!(q_closed_form(1.0, 1.0, 1.5, 0.0, 0.1).is_err());
    }

    #[test]
    fn closed_form_curvature_matches_series() {
        for (al, be, a3, b3) in [(1.0, 1.0, 0.1, 0.1), (0.7, 1.9, -0.4, 0.8), (2.0, 0.3, 1.0, -1.0)] {
            let h = 1e-3;
            let q = |z| q_closed_form(al, be, a3, b3, z).unwrap().re;
            let d2 = (q(h) - 2.0 * q(0.0) + q(-h)) / (h * h);
            let (pa3, pb3) = (al * a3, be * b3);
            let expected = -(al * al + be * be + 2.0 * pa3 * pa3 + 2.0 * pb3 * pb3 + 6.0 * pa3 * pb3) / 3.0;
            assert!((d2 - expected).abs() <= 1e-5 * expected.abs().max(1.0), "{d2} vs {expected}");
        }
    }

    #[test]
    fn quadratic_examples() {
        assert_eq!(small_z_quadratic(&PauliConfig::new([0.0; 3], [0.0; 3])), 0.0);
        let boundary = PauliConfig::new([0.0, 0.0, 1.0], [0.0, 0.0, -1.0]);
        assert!(small_z_quadratic(&boundary).abs() < 1e-15);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let mut v = || [0, 1, 2].map(|_| rng.random_range(-3.0..3.0));
            assert!(small_z_quadratic(&PauliConfig::new(v(), v())) >= -1e-12);
        }
    }

    #[test]
    fn q_magnitude_matches_radius() {
        let s = c3_scheme(2).unwrap();
        let cfg = PauliConfig::from_projections(1.0, 1.0, 0.1, 0.1, Completion::Orthogonal).unwrap();
        let terms = pauli_terms(&cfg).unwrap();
        for k in 1..=300 {
            let z = k as f64 * 0.0199;
            let q = q_direct(&cfg, &s, z).unwrap();
            let r = spectral_radius(&build_step_operator(&terms, &s, z).unwrap()).unwrap();
            assert_eq!(q.norm() <= 1.0 + 1e-12, r <= 1.0 + 1e-9, "z {z}: |Q| {} radius {r}", q.norm());
        }
    }

    #[test]
    fn gamma_curve_definition_and_branches() {
        let s = c3_scheme(2).unwrap();
        let cfg = PauliConfig::from_projections(1.0, 1.0, 0.1, 0.1, Completion::Orthogonal).unwrap();
        let grid: Vec<f64> = (1..=300).map(|k| k as f64 * 0.01).collect();
        let pts = gamma_curve(&cfg, &s, &grid, QSource::Direct).unwrap();
        for p in &pts {
            assert!(((p.gamma * p.z).cos() - p.q).norm() < 1e-10);
            assert!(((p.gamma_principal * p.z).cos() - p.q).norm() < 1e-10);
        }
        let onset = pts.iter().position(|p| p.gamma.im.abs() > 1e-6).unwrap();
        assert!(pts[..onset].iter().all(|p| p.gamma.im.abs() < 1e-6));
        assert!(pts[onset..].iter().any(|p| p.crossing) || pts[onset].crossing);
        let closed = gamma_curve(&cfg, &s, &grid, QSource::ClosedForm).unwrap();
        assert_eq!(closed.len(), grid.len());
    }

    #[test]
    fn gamma_aligned_is_unfolded() {
        let s = c3_scheme(2).unwrap();
        let cfg = PauliConfig::new([0.0, 0.0, 1.0], [0.0, 0.0, 1.0]);
        let grid: Vec<f64> = (1..=200).map(|k| k as f64 * 0.025).collect();
        for p in gamma_curve(&cfg, &s, &grid, QSource::Direct).unwrap() {
            assert!(p.gamma.im.abs() < 1e-6);
            assert!((p.gamma.re.abs() - 2.0).abs() < 1e-5, "z {}: {}", p.z, p.gamma);
        }
    }

    #[test]
    fn threshold_agrees_with_search() {
        let s = c3_scheme(2).unwrap();
        let cfg = PauliConfig::from_projections(1.0, 1.0, 0.1, 0.1, Completion::Orthogonal).unwrap();
        let from_q = q_threshold(&cfg, &s, 3.0, 300, 1e-9, 1e-10).unwrap().unwrap();
        let terms = pauli_terms(&cfg).unwrap();
        let hint = 1.0 / terms.sum_dense().as_matrix().frob_norm();
        let res = find_zmax(&terms, &s, hint, 1e-9, 1e-10).unwrap();
        assert!(res.converged);
        assert!((res.z_max - from_q).abs() <= 1e-6 * from_q, "{} vs {from_q}", res.z_max);
        // Parallel transverse parts make A and B equal: never unstable. At
        // larger z round-off in the non-unitary factors splits the degenerate
        // eigenvalues, so the check stops at z = 6.
        let par = PauliConfig::from_projections(1.0, 1.0, 0.1, 0.1, Completion::Parallel).unwrap();
        assert_eq!(q_threshold(&par, &s, 6.0, 200, 1e-9, 1e-10).unwrap(), None);
    }

    #[test]
    fn model_spec_json() {
        let specs = [
            ModelSpec::Gue { dim: 8, seed: 3 },
            ModelSpec::Ising {
                sites: 4,
                j: 1.0,
                gx: 0.4,
                gz: 0.8,
                boundary: Boundary::Open,
            },
            ModelSpec::Pauli {
                a: [0.1, 0.2, 0.3],
                b: [0.0, 1.0, 0.0],
            },
            ModelSpec::PauliProjections {
                alpha: 1.0,
                beta: 1.0,
                alpha3: 0.1,
                beta3: 0.1,
                completion: Completion::Orthogonal,
            },
        ];
        for spec in &specs {
            let back = ModelSpec::from_json(&spec.to_json().unwrap()).unwrap();
            assert_eq!(&back, spec);
            assert!(back.terms().is_ok());
        }
        let ising = ModelSpec::from_json(r#"{"kind":"ising","sites":6}"#).unwrap();
        assert_eq!(
            ising,
            ModelSpec::Ising {
                sites: 6,
                j: 1.0,
                gx: 0.4,
                gz: 0.8,
                boundary: Boundary::Periodic
            }
        );
        assert!(ModelSpec::from_json(r#"{"kind":"gue","dim":8,"seed":1,"extra":2}"#).is_err());
        assert!(ModelSpec::from_json(r#"{"kind":"goe","dim":8}"#).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn quadratic_nonnegative(a in prop::array::uniform3(-5.0f64..5.0), b in prop::array::uniform3(-5.0f64..5.0)) {
            prop_assert!(small_z_quadratic(&PauliConfig::new(a, b)) >= -1e-12);
        }

        #[test]
        fn stability_equivalence(a in prop::array::uniform3(-1.5f64..1.5), b in prop::array::uniform3(-1.5f64..1.5), z in 0.05f64..4.0) {
            let cfg = PauliConfig::new(a, b);
            let s = c3_scheme(2).unwrap();
            let q = q_direct(&cfg, &s, z).unwrap();
            let r = spectral_radius(&build_step_operator(&pauli_terms(&cfg).unwrap(), &s, z).unwrap()).unwrap();
            // Skip points within round-off of the unit circle.
            prop_assume!((q.norm() - 1.0).abs() > 1e-8);
            prop_assert_eq!(q.norm() <= 1.0, r <= 1.0 + 1e-9);
        }
    }
}
