//! Splitting schemes: ordered lists of `(term, coefficient)` stages.
//!
//! A scheme with stages `s_1 … s_k` represents the operator product
//! `exp(i z c_1 A_{t_1}) · exp(i z c_2 A_{t_2}) ⋯ exp(i z c_k A_{t_k})`, written
//! left to right. Acting on a state, the rightmost factor (the last stage)
//! is applied first.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{log_log_fit, LineFit, ERROR_FLOOR};
use crate::numkernel::{ComplexMatrix, HermitianMatrix, C64};
use crate::propagate::{step_error, ErrorMetric, TermSet};

const SQRT_3: f64 = 1.732_050_807_568_877_2_f64;

/// Tolerance for first-order consistency of shipped schemes.
pub const CONSISTENCY_TOL: f64 = 1e-14;

/// The five coefficients `p₁ … p₅` of the complex third-order scheme.
pub fn c3_coefficients() -> [C64; 5] {
    let p1 = C64::new(0.25, SQRT_3 / 12.0);
    let p2 = C64::new(0.5, SQRT_3 / 6.0);
    let p3 = C64::new(0.5, 0.0);
    [p1, p2, p3, p2.conj(), p1.conj()]
}

/// Number of exponentials in the real third-order scheme for `n` terms. Only
/// the count is tracked for general `n`; coefficients exist for `n = 2`.
pub fn r3_stage_count(n: usize) -> usize {
    5 * n - 4
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stage {
    pub term: usize,
    pub coeff: C64,
}

impl Stage {
    fn new(term: usize, coeff: C64) -> Self {
        Self { term, coeff }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplitScheme {
    label: String,
    n_terms: usize,
    stages: Vec<Stage>,
}

impl SplitScheme {
    pub fn new(label: impl Into<String>, n_terms: usize, stages: Vec<Stage>) -> Result<Self> {
        if n_terms == 0 {
            return Err(Error::InvalidArgument("scheme needs at least one term".into()));
        }
        if stages.is_empty() {
            return Err(Error::InvalidArgument("scheme needs at least one stage".into()));
        }
        if let Some(s) = stages.iter().find(|s| s.term >= n_terms) {
            return Err(Error::InvalidArgument(format!(
                "stage term index {} out of range for {n_terms} terms",
                s.term
            )));
        }
        if stages.iter().any(|s| !s.coeff.is_finite()) {
            return Err(Error::NonFinite("scheme coefficients".into()));
        }
        Ok(Self {
            label: label.into(),
            n_terms,
            stages,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.stages.iter().all(|s| s.coeff.im == 0.0)
    }

    /// Sum of coefficients per term.
    pub fn coefficient_sums(&self) -> Vec<C64> {
        let mut sums = vec![C64::new(0.0, 0.0); self.n_terms];
        for s in &self.stages {
            sums[s.term] += s.coeff;
        }
        sums
    }

    /// Largest deviation of a per-term coefficient sum from 1.
    pub fn consistency_defect(&self) -> f64 {
        self.coefficient_sums()
            .iter()
            .map(|s| (s - C64::new(1.0, 0.0)).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_consistent(&self) -> bool {
        self.consistency_defect() <= CONSISTENCY_TOL
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&SchemeDocument::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<SchemeDocument>(s)?.try_into()
    }
}

/// JSON interchange form: `{label, n_terms, stages: [{term, re, im}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeDocument {
    pub label: String,
    pub n_terms: usize,
    pub stages: Vec<StageDocument>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageDocument {
    pub term: usize,
    pub re: f64,
    pub im: f64,
}

impl From<&SplitScheme> for SchemeDocument {
    fn from(s: &SplitScheme) -> Self {
        Self {
            label: s.label.clone(),
            n_terms: s.n_terms,
            stages: s
                .stages
                .iter()
                .map(|st| StageDocument {
                    term: st.term,
                    re: st.coeff.re,
                    im: st.coeff.im,
                })
                .collect(),
        }
    }
}

impl TryFrom<SchemeDocument> for SplitScheme {
    type Error = Error;

    fn try_from(doc: SchemeDocument) -> Result<Self> {
        let stages = doc
            .stages
            .into_iter()
            .map(|s| Stage::new(s.term, C64::new(s.re, s.im)))
            .collect();
        SplitScheme::new(doc.label, doc.n_terms, stages)
    }
}

/// The complex third-order scheme for `n` Hermitian terms (`4n − 3` stages for
/// `n ≥ 2`).
pub fn c3_scheme(n: usize) -> Result<SplitScheme> {
    if n == 0 {
        return Err(Error::InvalidArgument("c3_scheme needs n >= 1".into()));
    }
    if n == 1 {
        return SplitScheme::new("C3", 1, vec![Stage::new(0, C64::new(1.0, 0.0))]);
    }
    let [p1, p2, p3, p4, p5] = c3_coefficients();
    let last = n - 1;
    let mut stages = Vec::with_capacity(4 * n - 3);
    // A_1 … A_{n-1} at p1, A_n at p2, back down to A_2 at p1.
    stages.extend((0..last).map(|t| Stage::new(t, p1)));
    stages.push(Stage::new(last, p2));
    stages.extend((1..last).rev().map(|t| Stage::new(t, p1)));
    // A_1 at p3, A_2 … A_{n-1} at p5, A_n at p4, back down to A_1 at p5.
    stages.push(Stage::new(0, p3));
    stages.extend((1..last).map(|t| Stage::new(t, p5)));
    stages.push(Stage::new(last, p4));
    stages.extend((0..last).rev().map(|t| Stage::new(t, p5)));
    SplitScheme::new("C3", n, stages)
}

/// Same stage layout with every coefficient conjugated. Real schemes are
/// returned unchanged; otherwise a trailing `c` on the label is toggled.
pub fn conjugate_scheme(s: &SplitScheme) -> SplitScheme {
    if s.is_real() {
        return s.clone();
    }
    let label = match s.label.strip_suffix('c') {
        Some(base) => base.to_string(),
        None => format!("{}c", s.label),
    };
    SplitScheme {
        label,
        n_terms: s.n_terms,
        stages: s
            .stages
            .iter()
            .map(|st| Stage::new(st.term, st.coeff.conj()))
            .collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Baseline {
    /// First-order Lie–Trotter product.
    Lie1,
    /// Second-order symmetric (Strang) palindrome.
    Strang2,
    /// Six-exponential real third-order composition, two terms only.
    R3,
}

/// Real-coefficient comparison schemes.
pub fn baseline_scheme(kind: Baseline, n: usize) -> Result<SplitScheme> {
    if n == 0 {
        return Err(Error::InvalidArgument("baseline scheme needs n >= 1".into()));
    }
    let r = |x: f64| C64::new(x, 0.0);
    match kind {
        Baseline::Lie1 => SplitScheme::new("L1", n, (0..n).map(|t| Stage::new(t, r(1.0))).collect()),
        Baseline::Strang2 => {
            let last = n - 1;
            let mut stages: Vec<Stage> = (0..last).map(|t| Stage::new(t, r(0.5))).collect();
            stages.push(Stage::new(last, r(1.0)));
            stages.extend((0..last).rev().map(|t| Stage::new(t, r(0.5))));
            SplitScheme::new("S2", n, stages)
        }
        Baseline::R3 => {
            if n != 2 {
                return Err(Error::InvalidArgument(format!(
                    "R3 coefficients are only available for two terms, got {n}"
                )));
            }
            let a = [7.0 / 24.0, 3.0 / 4.0, -1.0 / 24.0];
            let b = [2.0 / 3.0, -2.0 / 3.0, 1.0];
            let stages = a
                .iter()
                .zip(&b)
                .flat_map(|(&ca, &cb)| [Stage::new(0, r(ca)), Stage::new(1, r(cb))])
                .collect();
            SplitScheme::new("R3", 2, stages)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolicyKind {
    Single,
    /// Base scheme on even steps, its conjugate on odd steps.
    AlternateConjugate,
}

/// Which scheme to use on each step of a trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct StepPolicy {
    kind: PolicyKind,
    base: SplitScheme,
    conjugate: SplitScheme,
}

impl StepPolicy {
    pub fn new(kind: PolicyKind, base: SplitScheme) -> Self {
        let conjugate = conjugate_scheme(&base);
        Self {
            kind,
            base,
            conjugate,
        }
    }

    pub fn single(base: SplitScheme) -> Self {
        Self::new(PolicyKind::Single, base)
    }

    pub fn alternate(base: SplitScheme) -> Self {
        Self::new(PolicyKind::AlternateConjugate, base)
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    pub fn base(&self) -> &SplitScheme {
        &self.base
    }

    pub fn n_terms(&self) -> usize {
        self.base.n_terms
    }

    pub fn scheme_for_step(&self, step: usize) -> &SplitScheme {
        match self.kind {
            PolicyKind::AlternateConjugate if step % 2 == 1 => &self.conjugate,
            _ => &self.base,
        }
    }
}

/// A catalog entry: a step policy plus whether states are renormalized after
/// each step. Labels: `L1`, `S2`, `R3`, `C3`, `C3c`, `C4`, each optionally
/// followed by `r` for the renormalized variant.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeVariant {
    pub label: String,
    pub policy: StepPolicy,
    pub renorm: bool,
}

impl SchemeVariant {
    pub fn parse(label: &str, n_terms: usize) -> Result<Self> {
        let (base, renorm) = match label.strip_suffix('r') {
            Some(b) => (b, true),
            None => (label, false),
        };
        let policy = match base {
            "L1" => StepPolicy::single(baseline_scheme(Baseline::Lie1, n_terms)?),
            "S2" => StepPolicy::single(baseline_scheme(Baseline::Strang2, n_terms)?),
            "R3" => StepPolicy::single(baseline_scheme(Baseline::R3, n_terms)?),
            "C3" => StepPolicy::single(c3_scheme(n_terms)?),
            "C3c" => StepPolicy::single(conjugate_scheme(&c3_scheme(n_terms)?)),
            "C4" => {
                let mut c3 = c3_scheme(n_terms)?;
                c3.label = "C4".into();
                StepPolicy::alternate(c3)
            }
            _ => return Err(Error::UnknownScheme(label.to_string())),
        };
        Ok(Self {
            label: label.to_string(),
            policy,
            renorm,
        })
    }

    /// Labels of every shipped variant.
    pub fn catalog() -> &'static [&'static str] {
        &[
            "L1", "S2", "R3", "C3", "C3c", "C4", "L1r", "S2r", "R3r", "C3r", "C3cr", "C4r",
        ]
    }
}

fn k4_combination(a: &HermitianMatrix, b: &HermitianMatrix, last_sign: f64) -> Result<ComplexMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::ShapeMismatch {
            left: a.as_matrix().shape(),
            right: b.as_matrix().shape(),
        });
    }
    let (a, b) = (a.as_matrix(), b.as_matrix());
    let a2 = a * a;
    let b2 = b * b;
    let a3 = &a2 * a;
    let b3 = &b2 * b;
    let ab = a * b;
    let ba = b * a;
    let word = |x: &ComplexMatrix, y: &ComplexMatrix| x * y;
    let diff = |x: ComplexMatrix, y: ComplexMatrix, w: f64| (&x - &y).scale(C64::new(w, 0.0));
    let terms = [
        diff(word(&a3, b), word(b, &a3), 1.0),
        diff(word(&a2, &ba), word(&ab, &a2), -3.0),
        diff(word(&a2, &b2), word(&b2, &a2), -3.0),
        diff(word(&ab, &ab), word(&ba, &ba), 6.0),
        diff(word(a, &b3), word(&b3, a), 2.0),
        diff(word(&ba, &b2), word(&b2, &ab), 6.0 * last_sign),
    ];
    let n = a.rows();
    let sum = terms.iter().fold(ComplexMatrix::zeros(n, n), |acc, t| &acc + t);
    Ok(sum.scale(C64::new(0.0, 1.0 / (144.0 * SQRT_3))))
}

/// Leading error operator of the complex third-order scheme:
/// `U(z) = U₀(z) + K₄ z⁴ + O(z⁵)`, and `−K₄` for the conjugate scheme.
///
/// `K₄ = i/(144√3)·[(A³B−BA³) − 3(A²BA−ABA²) − 3(A²B²−B²A²) + 6(ABAB−BABA)
/// + 2(AB³−B³A) − 6(BAB²−B²AB)]`.
pub fn k4_operator(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<ComplexMatrix> {
    k4_combination(a, b, -1.0)
}

/// The same combination with `+6(BAB²−B²AB)` as the last term. Hermitian, but
/// not the z⁴ coefficient of the scheme; kept for comparison output.
pub fn k4_operator_as_printed(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<ComplexMatrix> {
    k4_combination(a, b, 1.0)
}

#[derive(Clone, Debug)]
pub struct OrderFit {
    pub fit: LineFit,
    /// `(z, error)` pairs, including points dropped by the floor.
    pub samples: Vec<(f64, f64)>,
}

impl OrderFit {
    pub fn slope(&self) -> f64 {
        self.fit.slope
    }
}

/// Fits the slope of the two-step error against `z` on a log-log scale.
pub fn empirical_order(
    terms: &TermSet,
    policy: &StepPolicy,
    z_grid: &[f64],
    metric: ErrorMetric,
    seed: u64,
) -> Result<OrderFit> {
    if z_grid.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "order fit needs at least 4 step sizes, got {}",
            z_grid.len()
        )));
    }
    if z_grid.iter().any(|&z| !(z > 0.0 && z.is_finite())) {
        return Err(Error::InvalidArgument("step sizes must be positive".into()));
    }
    let samples = z_grid
        .iter()
        .map(|&z| Ok((z, step_error(terms, policy, z, metric, seed)?)))
        .collect::<Result<Vec<_>>>()?;
    let fit = log_log_fit(&samples, ERROR_FLOOR, 3)?;
    Ok(OrderFit { fit, samples })
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Baseline::Lie1 => "lie1",
            Baseline::Strang2 => "strang2",
            Baseline::R3 => "r3",
        })
    }
}

impl FromStr for Baseline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lie1" => Ok(Baseline::Lie1),
            "strang2" => Ok(Baseline::Strang2),
            "r3" => Ok(Baseline::R3),
            other => Err(Error::InvalidArgument(format!("unknown baseline {other:?}"))),
        }
    }
}
