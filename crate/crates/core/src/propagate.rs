//! Applying splitting schemes to states and building dense step operators.
//!
//! Stages are stored in written product order: the scheme `s_1 … s_k` is the
//! operator `F_1·F_2⋯F_k`, so on a state the last stage acts first.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{
    frob_distance, l2_norm, random_state, ComplexMatrix, HermitianEigen, HermitianMatrix, StateVector, C64,
};
use crate::schemes::{SplitScheme, StepPolicy};

/// Largest chain handled by the tensor-local strategy.
pub const MAX_TENSOR_SITES: usize = 24;

/// How a term's exponential is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Dense,
    Diagonal,
    TensorLocal,
}

#[derive(Clone, Debug)]
enum Kind {
    Dense(HermitianEigen),
    Diagonal(Vec<f64>),
    /// The same 2×2 operator on every site; site 0 is the most significant bit.
    TensorLocal {
        site: [[C64; 2]; 2],
        eigen: HermitianEigen,
        sites: usize,
    },
}

/// One Hermitian term `A_j` together with a cheap way to apply `exp(i·c·A_j)`.
#[derive(Clone, Debug)]
pub struct Term {
    kind: Kind,
    dim: usize,
    dense: OnceLock<HermitianMatrix>,
}

impl Term {
    pub fn dense(h: HermitianMatrix) -> Result<Self> {
        let eigen = h.eigen()?;
        let dim = h.dim();
        Ok(Self {
            kind: Kind::Dense(eigen),
            dim,
            dense: OnceLock::from(h),
        })
    }

    pub fn diagonal(diag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidArgument("diagonal term needs dimension >= 1".into()));
        }
        if diag.iter().any(|d| !d.is_finite()) {
            return Err(Error::NonFinite("diagonal term".into()));
        }
        Ok(Self {
            dim: diag.len(),
            kind: Kind::Diagonal(diag),
            dense: OnceLock::new(),
        })
    }

    /// `Σ_s h_s`, where `h_s` is `site` acting on site `s` of a chain.
    pub fn tensor_local(site: &HermitianMatrix, sites: usize) -> Result<Self> {
        if site.dim() != 2 {
            return Err(Error::InvalidArgument(format!(
                "tensor-local factor must be 2x2, got {0}x{0}",
                site.dim()
            )));
        }
        if sites == 0 || sites > MAX_TENSOR_SITES {
            return Err(Error::DimensionTooLarge {
                requested: 1u128 << sites.min(127),
                limit: 1u128 << MAX_TENSOR_SITES,
            });
        }
        let m = site.as_matrix();
        Ok(Self {
            kind: Kind::TensorLocal {
                site: [[m.get(0, 0), m.get(0, 1)], [m.get(1, 0), m.get(1, 1)]],
                eigen: site.eigen()?,
                sites,
            },
            dim: 1 << sites,
            dense: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn strategy(&self) -> Strategy {
        match self.kind {
            Kind::Dense(_) => Strategy::Dense,
            Kind::Diagonal(_) => Strategy::Diagonal,
            Kind::TensorLocal { .. } => Strategy::TensorLocal,
        }
    }

    /// Dense form of the term, built on first use for structured strategies.
    pub fn dense_matrix(&self) -> &HermitianMatrix {
        self.dense.get_or_init(|| match &self.kind {
            Kind::Dense(_) => unreachable!("dense terms are initialized on construction"),
            Kind::Diagonal(d) => HermitianMatrix::from_real_diagonal(d).expect("finite diagonal"),
            Kind::TensorLocal { site: local, sites, .. } => {
                let n = *sites;
                let m = ComplexMatrix::from_fn(1 << n, 1 << n, |i, j| {
                    let x = i ^ j;
                    if x == 0 {
                        (0..n).map(|s| {
                            let b = (i >> (n - 1 - s)) & 1;
                            local[b][b]
                        })
                        .sum()
                    } else if x.is_power_of_two() {
                        let shift = x.trailing_zeros() as usize;
                        local[(i >> shift) & 1][(j >> shift) & 1]
                    } else {
                        C64::new(0.0, 0.0)
                    }
                });
                HermitianMatrix::new(m).expect("sum of Hermitian site terms")
            }
        })
    }

    fn check_len(&self, len: usize) {
        assert_eq!(len, self.dim, "vector length does not match term dimension");
    }

    /// In-place `v ← exp(i·c·A)·v`.
    pub fn apply_exp_i(&self, c: C64, v: &mut [C64]) {
        self.check_len(v.len());
        match &self.kind {
            Kind::Dense(e) => e.apply_exp_i(c, v),
            Kind::Diagonal(d) => {
                let ic = C64::new(0.0, 1.0) * c;
                for (vi, &di) in v.iter_mut().zip(d) {
                    *vi *= (ic * di).exp();
                }
            }
            Kind::TensorLocal { eigen, sites, .. } => {
                let u = eigen.exp_i(c);
                let u = [[u.get(0, 0), u.get(0, 1)], [u.get(1, 0), u.get(1, 1)]];
                for s in 0..*sites {
                    let stride = 1usize << (sites - 1 - s);
                    for i in 0..v.len() {
                        if i & stride == 0 {
                            let (x0, x1) = (v[i], v[i | stride]);
                            v[i] = u[0][0] * x0 + u[0][1] * x1;
                            v[i | stride] = u[1][0] * x0 + u[1][1] * x1;
                        }
                    }
                }
            }
        }
    }

    /// In-place `m ← exp(i·c·A)·m`.
    pub fn apply_exp_i_to_matrix(&self, c: C64, m: &mut Mat<C64>) {
        self.check_len(m.nrows());
        match &self.kind {
            Kind::Dense(e) => e.apply_exp_i_to_matrix(c, m),
            _ => {
                let mut col = vec![C64::new(0.0, 0.0); m.nrows()];
                for j in 0..m.ncols() {
                    for (i, x) in col.iter_mut().enumerate() {
                        *x = m[(i, j)];
                    }
                    self.apply_exp_i(c, &mut col);
                    for (i, x) in col.iter().enumerate() {
                        m[(i, j)] = *x;
                    }
                }
            }
        }
    }
}

/// The terms `A_1 … A_n` of a splitting problem with a cached dense sum.
#[derive(Clone, Debug)]
pub struct TermSet {
    terms: Vec<Term>,
    dim: usize,
    sum: OnceLock<HermitianMatrix>,
    sum_eigen: OnceLock<HermitianEigen>,
}

impl TermSet {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        let Some(first) = terms.first() else {
            return Err(Error::InvalidArgument("term set needs at least one term".into()));
        };
        let dim = first.dim();
        if let Some(t) = terms.iter().find(|t| t.dim() != dim) {
            return Err(Error::ShapeMismatch {
                left: (dim, dim),
                right: (t.dim(), t.dim()),
            });
        }
        Ok(Self {
            terms,
            dim,
            sum: OnceLock::new(),
            sum_eigen: OnceLock::new(),
        })
    }

    pub fn from_dense(terms: Vec<HermitianMatrix>) -> Result<Self> {
        Self::new(terms.into_iter().map(Term::dense).collect::<Result<_>>()?)
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn term(&self, j: usize) -> &Term {
        &self.terms[j]
    }

    /// `H = Σ_j A_j`.
    pub fn sum_dense(&self) -> &HermitianMatrix {
        self.sum.get_or_init(|| {
            self.terms
                .iter()
                .skip(1)
                .fold(self.terms[0].dense_matrix().clone(), |acc, t| {
                    acc.try_add(t.dense_matrix()).expect("terms share a dimension")
                })
        })
    }

    pub fn sum_eigen(&self) -> Result<&HermitianEigen> {
        if let Some(e) = self.sum_eigen.get() {
            return Ok(e);
        }
        let e = self.sum_dense().eigen()?;
        Ok(self.sum_eigen.get_or_init(|| e))
    }

    /// Exact propagator `U₀(z) = exp(i·z·H)`.
    pub fn exact_propagator(&self, z: f64) -> Result<ComplexMatrix> {
        Ok(self.sum_eigen()?.exp_i(C64::new(z, 0.0)))
    }

    fn check_scheme(&self, scheme: &SplitScheme) -> Result<()> {
        if scheme.n_terms() != self.n_terms() {
            return Err(Error::InvalidArgument(format!(
                "scheme {} expects {} terms, term set has {}",
                scheme.label(),
                scheme.n_terms(),
                self.n_terms()
            )));
        }
        Ok(())
    }

    fn check_state(&self, state: &StateVector) -> Result<()> {
        if state.dim() != self.dim {
            return Err(Error::ShapeMismatch {
                left: (self.dim, 1),
                right: (state.dim(), 1),
            });
        }
        Ok(())
    }

    fn apply_stages(&self, scheme: &SplitScheme, z: f64, v: &mut [C64]) {
        for st in scheme.stages().iter().rev() {
            self.terms[st.term].apply_exp_i(st.coeff * z, v);
        }
    }
}

/// Dense `U(z) = F_1·F_2⋯F_k` with `F_j = exp(i·z·c_j·A_{t_j})`.
pub fn build_step_operator(terms: &TermSet, scheme: &SplitScheme, z: f64) -> Result<ComplexMatrix> {
    terms.check_scheme(scheme)?;
    if !z.is_finite() {
        return Err(Error::NonFinite("step size".into()));
    }
    let mut m = Mat::<C64>::identity(terms.dim, terms.dim);
    for st in scheme.stages().iter().rev() {
        terms.terms[st.term].apply_exp_i_to_matrix(st.coeff * z, &mut m);
    }
    Ok(ComplexMatrix::from_mat(m))
}

/// One step `ψ ← U(z)ψ` using each term's strategy, optionally renormalized.
pub fn apply_step(
    terms: &TermSet,
    scheme: &SplitScheme,
    z: f64,
    state: &StateVector,
    renorm: bool,
) -> Result<StateVector> {
    terms.check_scheme(scheme)?;
    terms.check_state(state)?;
    if state.norm() == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let mut v = state.amplitudes().to_vec();
    terms.apply_stages(scheme, z, &mut v);
    let out = StateVector::new(v)?;
    if renorm {
        out.normalized()
    } else {
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct PropagationReport {
    pub steps: usize,
    pub z: f64,
    pub final_state: StateVector,
    /// Norm after each step, taken before renormalization.
    pub norm_history: Vec<f64>,
    pub renormalized: bool,
}

/// `steps` applications following `policy`, recording the norm after each.
pub fn evolve(
    terms: &TermSet,
    policy: &StepPolicy,
    z: f64,
    steps: usize,
    state: &StateVector,
    renorm: bool,
) -> Result<PropagationReport> {
    if steps == 0 {
        return Err(Error::InvalidArgument("evolve needs steps >= 1".into()));
    }
    terms.check_scheme(policy.base())?;
    terms.check_state(state)?;
    if state.norm() == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let mut v = state.amplitudes().to_vec();
    let mut norm_history = Vec::with_capacity(steps);
    for k in 0..steps {
        terms.apply_stages(policy.scheme_for_step(k), z, &mut v);
        let norm = l2_norm(&v);
        if !norm.is_finite() {
            return Err(Error::Diverged { step: k });
        }
        norm_history.push(norm);
        if renorm {
            if norm == 0.0 {
                return Err(Error::ZeroNorm);
            }
            let inv = 1.0 / norm;
            v.iter_mut().for_each(|x| *x *= inv);
        }
    }
    Ok(PropagationReport {
        steps,
        z,
        final_state: StateVector::new(v)?,
        norm_history,
        renormalized: renorm,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorMetric {
    /// `‖W − U₀(2z)‖_F` for the dense two-step product `W`.
    Operator,
    /// `‖(W − U₀(2z))ψ‖` for a seeded random unit `ψ`.
    State,
    /// `|1 − ⟨U₀(2z)ψ, ψ̂⟩|` with `ψ̂` renormalized after each step.
    RenormFidelity,
}

impl ErrorMetric {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorMetric::Operator => "operator",
            ErrorMetric::State => "state",
            ErrorMetric::RenormFidelity => "renorm-fidelity",
        }
    }
}

impl fmt::Display for ErrorMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ErrorMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "operator" => Ok(ErrorMetric::Operator),
            "state" => Ok(ErrorMetric::State),
            "renorm-fidelity" => Ok(ErrorMetric::RenormFidelity),
            other => Err(Error::InvalidArgument(format!("unknown error metric {other:?}"))),
        }
    }
}

/// Error after exactly two steps of size `z` under `policy`.
pub fn step_error(terms: &TermSet, policy: &StepPolicy, z: f64, metric: ErrorMetric, seed: u64) -> Result<f64> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::InvalidArgument(format!("step size must be positive, got {z}")));
    }
    let (first, second) = (policy.scheme_for_step(0), policy.scheme_for_step(1));
    match metric {
        ErrorMetric::Operator => {
            let w = &build_step_operator(terms, second, z)? * &build_step_operator(terms, first, z)?;
            frob_distance(&w, &terms.exact_propagator(2.0 * z)?)
        }
        ErrorMetric::State | ErrorMetric::RenormFidelity => {
            let psi = random_state(terms.dim(), seed)?;
            let renorm = metric == ErrorMetric::RenormFidelity;
            let report = evolve(terms, policy, z, 2, &psi, renorm)?;
            let mut exact = psi.into_amplitudes();
            terms.sum_eigen()?.apply_exp_i(C64::new(2.0 * z, 0.0), &mut exact);
            let exact = StateVector::new(exact)?;
            Ok(if renorm {
                (C64::new(1.0, 0.0) - exact.inner(&report.final_state)).norm()
            } else {
                exact.distance(&report.final_state)
            })
        }
    }
}

/// `⟨U₀(z)†U(z)⟩ / √⟨U(z)†U(z)⟩` in a unit-norm state, from dense operators.
pub fn renormalized_fidelity(terms: &TermSet, scheme: &SplitScheme, z: f64, state: &StateVector) -> Result<C64> {
    terms.check_state(state)?;
    if (state.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "state must have unit norm, got {}",
            state.norm()
        )));
    }
    let u = build_step_operator(terms, scheme, z)?;
    let u0 = terms.exact_propagator(z)?;
    let upsi = StateVector::new(u.mul_vec(state.amplitudes()))?;
    let u0psi = StateVector::new(u0.mul_vec(state.amplitudes()))?;
    if upsi.norm() == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(u0psi.inner(&upsi) / upsi.norm())
}
