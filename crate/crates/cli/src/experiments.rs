//! Experiment runners. Each returns a [`ResultTable`] whose numeric cells are
//! fully determined by the configuration and master seed.

use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};
use splitstep::models::{gamma_curve, gue_terms, ising_terms, pauli_terms, q_threshold, QSource};
use splitstep::schemes::{k4_operator, k4_operator_as_printed, PolicyKind};
use splitstep::stability::{default_z_hint, find_zmax, scaling_fit};
use splitstep::{
    c3_scheme, conjugate_scheme, frob_distance, log_log_fit, median, step_error, ErrorMetric, SchemeVariant,
    SplitScheme, Stage, StepPolicy, TermSet, C64, ERROR_FLOOR,
};

use crate::config::{Experiment, ExperimentConfig, ModelConfig};
use crate::table::{Cell, ResultTable};
use crate::AppError;

/// Environment variable consulted for the default worker count.
pub const THREADS_ENV: &str = "SPLITSTEP_THREADS";

/// Bisection tolerance for the refined thresholds of the gamma experiment.
const GAMMA_THRESHOLD_TOL: f64 = 1e-10;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Per-task seed: `splitmix64(splitmix64(splitmix64(master) ^ sweep) ^ realization)`.
pub fn derive_seed(master: u64, sweep: u64, realization: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ sweep) ^ realization)
}

/// Worker count from the config, else from `SPLITSTEP_THREADS`, else `None`
/// (all cores).
pub fn resolve_threads(cfg: &ExperimentConfig) -> Result<Option<usize>, AppError> {
    if let Some(t) = cfg.threads {
        return Ok(Some(t));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(AppError::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
        _ => Ok(None),
    }
}

/// Validates `cfg`, runs it on a dedicated thread pool and records wall time.
pub fn run(cfg: &ExperimentConfig) -> Result<ResultTable, AppError> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = resolve_threads(cfg)? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| AppError::Config(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let mut table = pool.install(|| match cfg.experiment {
        Experiment::Fig2 => run_fig2(cfg),
        Experiment::OrderScan => run_order_scan(cfg),
        Experiment::ZmaxGue | Experiment::ZmaxIsing => run_zmax(cfg),
        Experiment::Gamma => run_gamma(cfg),
        Experiment::K4Check => run_k4_check(cfg),
    })?;
    table.wall_time_s = start.elapsed().as_secs_f64();
    Ok(table)
}

fn config_echo(cfg: &ExperimentConfig) -> Value {
    serde_json::to_value(cfg).expect("config serializes")
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn metric_for(v: &SchemeVariant, base: ErrorMetric) -> ErrorMetric {
    if v.renorm {
        ErrorMetric::RenormFidelity
    } else {
        base
    }
}

fn gue_dim(cfg: &ExperimentConfig) -> usize {
    match cfg.model {
        ModelConfig::Gue { dim } => dim,
        _ => unreachable!("validated: GUE model"),
    }
}

/// Per-realization errors, indexed `[scheme][z]`: metric errors, then
/// operator-norm errors.
type RealizationErrors = (Vec<Vec<f64>>, Vec<Vec<f64>>);

struct Sweep {
    /// `errors[scheme][z][realization]`.
    errors: Vec<Vec<Vec<f64>>>,
    operator: Vec<Vec<Vec<f64>>>,
}

/// Two-step errors for every (realization, scheme, z). Realization `r` uses
/// GUE seed `derive_seed(master, 0, r)` and state seed
/// `derive_seed(master, 1, r)`.
fn error_sweep(cfg: &ExperimentConfig, with_operator: bool) -> Result<Sweep, AppError> {
    let variants = cfg.parsed_schemes()?;
    let zs = cfg.z_grid.values();
    let dim = gue_dim(cfg);
    let per_realization = (0..cfg.realizations as u64)
        .into_par_iter()
        .map(|r| -> Result<_, AppError> {
            let terms = gue_terms(cfg.model.gue(derive_seed(cfg.master_seed, 0, r)).expect("GUE"))?;
            debug_assert_eq!(terms.dim(), dim);
            let psi_seed = derive_seed(cfg.master_seed, 1, r);
            let mut errs = Vec::with_capacity(variants.len());
            let mut ops = Vec::with_capacity(variants.len());
            for v in &variants {
                let metric = metric_for(v, cfg.metric);
                let e = zs
                    .iter()
                    .map(|&z| step_error(&terms, &v.policy, z, metric, psi_seed))
                    .collect::<Result<Vec<_>, _>>()?;
                let o = if with_operator && !v.renorm {
                    zs.iter()
                        .map(|&z| step_error(&terms, &v.policy, z, ErrorMetric::Operator, psi_seed))
                        .collect::<Result<Vec<_>, _>>()?
                } else {
                    vec![f64::NAN; zs.len()]
                };
                errs.push(e);
                ops.push(o);
            }
            Ok((errs, ops))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let gather = |pick: &dyn Fn(&RealizationErrors) -> &Vec<Vec<f64>>| {
        (0..variants.len())
            .map(|s| {
                (0..zs.len())
                    .map(|k| per_realization.iter().map(|r| pick(r)[s][k]).collect())
                    .collect()
            })
            .collect()
    };
    Ok(Sweep {
        errors: gather(&|r| &r.0),
        operator: gather(&|r| &r.1),
    })
}

fn error_table(cfg: &ExperimentConfig, with_operator: bool) -> Result<ResultTable, AppError> {
    let variants = cfg.parsed_schemes()?;
    let zs = cfg.z_grid.values();
    let sweep = error_sweep(cfg, with_operator)?;
    let mut columns = vec!["z", "scheme", "renorm", "metric", "mean_error", "stderr_error"];
    if with_operator {
        columns.extend(["mean_operator_error", "stderr_operator_error"]);
    }
    columns.push("realizations");
    let mut table = ResultTable::new(cfg.experiment.as_str(), &columns, config_echo(cfg));
    for (k, &z) in zs.iter().enumerate() {
        for (s, v) in variants.iter().enumerate() {
            let (m, se) = mean_stderr(&sweep.errors[s][k]);
            let mut row: Vec<Cell> = vec![
                z.into(),
                v.label.as_str().into(),
                v.renorm.into(),
                metric_for(v, cfg.metric).as_str().into(),
                m.into(),
                se.into(),
            ];
            if with_operator {
                let (om, ose) = mean_stderr(&sweep.operator[s][k]);
                row.extend([om.into(), ose.into()]);
            }
            row.push(cfg.realizations.into());
            table.push(row);
        }
    }
    if zs.len() >= 4 {
        for (s, v) in variants.iter().enumerate() {
            let pts: Vec<(f64, f64)> = zs
                .iter()
                .enumerate()
                .map(|(k, &z)| (z, mean_stderr(&sweep.errors[s][k]).0))
                .collect();
            match log_log_fit(&pts, ERROR_FLOOR, 3) {
                Ok(fit) => {
                    table.add_summary(format!("slope.{}", v.label), fit.slope);
                    table.add_summary(format!("slope_stderr.{}", v.label), fit.slope_stderr);
                    table.add_summary(format!("slope_points.{}", v.label), fit.points);
                }
                Err(e) => table.add_summary(format!("slope.{}", v.label), format!("unavailable: {e}")),
            }
        }
    }
    Ok(table)
}

/// Mean two-step error per (z, scheme) over GUE realizations, with the
/// operator-norm error alongside for unrenormalized schemes.
pub fn run_fig2(cfg: &ExperimentConfig) -> Result<ResultTable, AppError> {
    error_table(cfg, cfg.metric != ErrorMetric::Operator)
}

/// Mean two-step error per (z, scheme) and the fitted log-log slope.
pub fn run_order_scan(cfg: &ExperimentConfig) -> Result<ResultTable, AppError> {
    error_table(cfg, false)
}

/// The operator whose spectrum governs stability over one period of the
/// policy: `U` for a single scheme, `Ū·U` for alternating conjugates.
pub fn period_scheme(policy: &StepPolicy) -> SplitScheme {
    let base = policy.base();
    match policy.kind() {
        PolicyKind::Single => base.clone(),
        PolicyKind::AlternateConjugate => {
            let stages: Vec<Stage> = policy
                .scheme_for_step(1)
                .stages()
                .iter()
                .chain(base.stages())
                .copied()
                .collect();
            SplitScheme::new(base.label(), base.n_terms(), stages).expect("stages of a valid scheme")
        }
    }
}

fn zmax_terms(cfg: &ExperimentConfig, size: usize, seed: u64) -> Result<TermSet, AppError> {
    Ok(match cfg.experiment {
        Experiment::ZmaxGue => gue_terms(splitstep::GueSpec { dim: size, seed })?,
        _ => ising_terms(&cfg.model.ising(size).expect("validated: Ising model"))?,
    })
}

/// Threshold search per (size, realization). GUE realization `r` at size
/// index `i` uses seed `derive_seed(master, i, r)`; the Ising chain is
/// deterministic and runs once per size.
pub fn run_zmax(cfg: &ExperimentConfig) -> Result<ResultTable, AppError> {
    let gue = cfg.experiment == Experiment::ZmaxGue;
    let realizations = if gue { cfg.realizations } else { 1 };
    let variants = cfg.parsed_schemes()?;
    let schemes: Vec<SplitScheme> = variants.iter().map(|v| period_scheme(&v.policy)).collect();
    let tasks: Vec<(usize, usize, u64)> = cfg
        .sizes
        .iter()
        .enumerate()
        .flat_map(|(i, &size)| {
            (0..realizations).map(move |r| (i, size, derive_seed(cfg.master_seed, i as u64, r as u64)))
        })
        .collect();
    let results = tasks
        .par_iter()
        .map(|&(_, size, seed)| -> Result<_, AppError> {
            let terms = zmax_terms(cfg, size, seed)?;
            let hint = default_z_hint(&terms);
            schemes
                .iter()
                .map(|s| Ok(find_zmax(&terms, s, hint, cfg.eps_unit, cfg.rel_tol)?))
                .collect::<Result<Vec<_>, AppError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;

    let size_col = if gue { "dim" } else { "sites" };
    let mut table = ResultTable::new(
        cfg.experiment.as_str(),
        &[
            "scheme",
            size_col,
            "realization",
            "seed",
            "z_max",
            "z_lo",
            "z_hi",
            "converged",
            "evaluations",
        ],
        config_echo(cfg),
    );
    if !gue {
        table.add_summary("realizations", "1 (deterministic model)");
    }
    for (s, v) in variants.iter().enumerate() {
        let mut per_size: Vec<Vec<f64>> = vec![Vec::new(); cfg.sizes.len()];
        for (t, &(i, size, seed)) in tasks.iter().enumerate() {
            let res = &results[t][s];
            let r = t - i * realizations;
            table.push(vec![
                v.label.as_str().into(),
                size.into(),
                r.into(),
                if gue { Cell::Uint(seed) } else { Cell::Text(String::new()) },
                res.z_max.into(),
                res.bracket.0.into(),
                res.bracket.1.into(),
                res.converged.into(),
                res.scan.len().into(),
            ]);
            if res.converged {
                per_size[i].push(res.z_max);
            }
        }
        let mut medians = Vec::new();
        for (i, &size) in cfg.sizes.iter().enumerate() {
            let key = format!("{}.{}", v.label, size);
            table.add_summary(format!("converged.{key}"), per_size[i].len());
            if let Some(m) = median(&per_size[i]) {
                table.add_summary(format!("median.{key}"), m);
                medians.push((size, m));
            }
        }
        if gue {
            let usable: Vec<usize> = (0..cfg.sizes.len()).filter(|&i| !per_size[i].is_empty()).collect();
            let sizes: Vec<usize> = usable.iter().map(|&i| cfg.sizes[i]).collect();
            let samples: Vec<Vec<f64>> = usable.iter().map(|&i| per_size[i].clone()).collect();
            match scaling_fit(&sizes, &samples) {
                Ok(fit) => {
                    table.add_summary(format!("alpha.{}", v.label), fit.alpha);
                    table.add_summary(format!("alpha_stderr.{}", v.label), fit.std_error);
                    table.add_summary(format!("alpha_degenerate.{}", v.label), fit.degenerate);
                }
                Err(e) => table.add_summary(format!("alpha.{}", v.label), format!("unavailable: {e}")),
            }
        } else {
            let flat: Vec<f64> = medians.iter().filter(|(n, _)| *n >= 6).map(|&(_, m)| m).collect();
            if flat.len() >= 2 {
                let max = flat.iter().cloned().fold(f64::MIN, f64::max);
                let min = flat.iter().cloned().fold(f64::MAX, f64::min);
                table.add_summary(format!("flatness_ratio.{}", v.label), max / min);
            }
        }
    }
    Ok(table)
}

/// `Q(z)` and `γ(z)` from the actual product and from the closed form.
pub fn run_gamma(cfg: &ExperimentConfig) -> Result<ResultTable, AppError> {
    let pauli = cfg.model.pauli()?.expect("validated: Pauli model");
    let variants = cfg.parsed_schemes()?;
    let zs = cfg.z_grid.values();
    let mut table = ResultTable::new(
        "gamma",
        &[
            "scheme",
            "z",
            "q_direct_re",
            "q_direct_im",
            "abs_q_direct",
            "gamma_direct_re",
            "gamma_direct_im",
            "gamma_direct_principal_re",
            "gamma_direct_principal_im",
            "crossing_direct",
            "q_closed_re",
            "abs_q_closed",
            "gamma_closed_re",
            "gamma_closed_im",
            "crossing_closed",
        ],
        config_echo(cfg),
    );
    let has_directions = pauli.alpha3().is_ok() && pauli.beta3().is_ok();
    let limit = cfg.eps_unit.ln_1p();
    let terms = pauli_terms(&pauli)?;
    for v in &variants {
        let scheme = period_scheme(&v.policy);
        let direct = gamma_curve(&pauli, &scheme, &zs, QSource::Direct)?;
        let closed = if has_directions {
            Some(gamma_curve(&pauli, &scheme, &zs, QSource::ClosedForm)?)
        } else {
            None
        };
        for (k, d) in direct.iter().enumerate() {
            let mut row: Vec<Cell> = vec![
                v.label.as_str().into(),
                d.z.into(),
                d.q.re.into(),
                d.q.im.into(),
                d.q.norm().into(),
                d.gamma.re.into(),
                d.gamma.im.into(),
                d.gamma_principal.re.into(),
                d.gamma_principal.im.into(),
                d.crossing.into(),
            ];
            match &closed {
                Some(c) => row.extend([
                    c[k].q.re.into(),
                    c[k].q.norm().into(),
                    c[k].gamma.re.into(),
                    c[k].gamma.im.into(),
                    c[k].crossing.into(),
                ]),
                None => row.extend([
                    f64::NAN.into(),
                    f64::NAN.into(),
                    f64::NAN.into(),
                    f64::NAN.into(),
                    false.into(),
                ]),
            }
            table.push(row);
        }

        let l = &v.label;
        let grid_onset = direct.iter().find(|p| p.gamma.im.abs() > limit).map(|p| p.z);
        table.add_summary(format!("grid_threshold_direct.{l}"), opt(grid_onset));
        if let Some(c) = &closed {
            let onset = c.iter().find(|p| p.q.norm() > 1.0).map(|p| p.z);
            table.add_summary(format!("grid_threshold_closed.{l}"), opt(onset));
            let diff = direct.iter().zip(c).map(|(a, b)| (a.q - b.q).norm()).fold(0.0, f64::max);
            table.add_summary(format!("max_abs_q_difference.{l}"), diff);
        }
        let max_im_q = direct.iter().map(|p| p.q.im.abs()).fold(0.0, f64::max);
        table.add_summary(format!("max_abs_im_q_direct.{l}"), max_im_q);
        let z_end = *zs.last().expect("non-empty grid");
        let refined = q_threshold(&pauli, &scheme, z_end, zs.len(), cfg.eps_unit, GAMMA_THRESHOLD_TOL)?;
        table.add_summary(format!("threshold_direct.{l}"), opt(refined));
        let search = find_zmax(&terms, &scheme, default_z_hint(&terms), cfg.eps_unit, GAMMA_THRESHOLD_TOL)?;
        table.add_summary(
            format!("zmax_search.{l}"),
            if search.converged { json!(search.z_max) } else { Value::Null },
        );
        if let (Some(a), true) = (refined, search.converged) {
            table.add_summary(format!("threshold_relative_difference.{l}"), (a - search.z_max).abs() / a);
        }
    }
    Ok(table)
}

fn opt(v: Option<f64>) -> Value {
    v.map_or(Value::Null, |x| json!(x))
}

/// Residuals of `(U(z) − U₀(z))/z⁴` against `K₄` for the complex third-order
/// scheme, and of the conjugate scheme against `−K₄`.
pub fn run_k4_check(cfg: &ExperimentConfig) -> Result<ResultTable, AppError> {
    let zs = cfg.z_grid.values();
    let pauli = cfg.model.pauli()?;
    let realizations = if pauli.is_some() { 1 } else { cfg.realizations };
    let base = c3_scheme(2)?;
    let conj = conjugate_scheme(&base);
    let per_realization = (0..realizations as u64)
        .into_par_iter()
        .map(|r| -> Result<_, AppError> {
            let seed = derive_seed(cfg.master_seed, 0, r);
            let terms = match &pauli {
                Some(p) => pauli_terms(p)?,
                None => gue_terms(cfg.model.gue(seed).expect("GUE"))?,
            };
            let (a, b) = (terms.term(0).dense_matrix(), terms.term(1).dense_matrix());
            let k4 = k4_operator(a, b)?;
            let k4p = k4_operator_as_printed(a, b)?;
            let herm = k4.hermiticity_residual() / k4.max_abs();
            let neg = k4.scale(C64::new(-1.0, 0.0));
            let rows = zs
                .iter()
                .map(|&z| -> Result<_, AppError> {
                    let u0 = terms.exact_propagator(z)?;
                    let inv = C64::new(z.powi(-4), 0.0);
                    let u = &splitstep::build_step_operator(&terms, &base, z)? - &u0;
                    let ub = &splitstep::build_step_operator(&terms, &conj, z)? - &u0;
                    let plus = frob_distance(&u.scale(inv), &k4)? / k4.frob_norm();
                    let minus = frob_distance(&ub.scale(inv), &neg)? / k4.frob_norm();
                    let printed = frob_distance(&u.scale(inv), &k4p)? / k4p.frob_norm();
                    Ok((z, plus, minus, printed))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok((seed, k4.frob_norm(), herm, rows))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut table = ResultTable::new(
        "k4-check",
        &[
            "z",
            "realization",
            "seed",
            "residual_plus",
            "residual_minus",
            "sign_gap",
            "residual_as_printed",
            "k4_norm",
            "k4_hermiticity_rel",
        ],
        config_echo(cfg),
    );
    for k in 0..zs.len() {
        for (r, (seed, norm, herm, rows)) in per_realization.iter().enumerate() {
            let (z, plus, minus, printed) = rows[k];
            table.push(vec![
                z.into(),
                r.into(),
                if pauli.is_some() { Cell::Text(String::new()) } else { Cell::Uint(*seed) },
                plus.into(),
                minus.into(),
                (plus - minus).abs().into(),
                printed.into(),
                (*norm).into(),
                (*herm).into(),
            ]);
        }
    }
    let max_herm = per_realization.iter().map(|r| r.2).fold(0.0, f64::max);
    table.add_summary("max_k4_hermiticity_rel", max_herm);
    // Report at the grid point nearest z = 1e-2 on a log scale.
    let k_ref = (0..zs.len())
        .min_by(|&i, &j| (zs[i].ln() - 0.01f64.ln()).abs().total_cmp(&(zs[j].ln() - 0.01f64.ln()).abs()))
        .expect("non-empty grid");
    let at = |f: fn(&(f64, f64, f64, f64)) -> f64| per_realization.iter().map(|r| f(&r.3[k_ref])).fold(0.0, f64::max);
    table.add_summary("z_ref", zs[k_ref]);
    table.add_summary("max_residual_plus_at_z_ref", at(|t| t.1));
    table.add_summary("max_residual_minus_at_z_ref", at(|t| t.2));
    table.add_summary("max_residual_as_printed_at_z_ref", at(|t| t.3));
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Spacing, ZGrid};

    #[test]
    fn seeds_are_distinct_and_stable() {
        let a = derive_seed(1, 0, 0);
        assert_eq!(a, derive_seed(1, 0, 0));
        let mut all: Vec<u64> = (0..4)
            .flat_map(|s| (0..50).map(move |r| derive_seed(7, s, r)))
            .collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 200);
        assert_ne!(derive_seed(1, 0, 1), derive_seed(1, 1, 0));
        assert_ne!(derive_seed(1, 0, 0), derive_seed(2, 0, 0));
    }

    #[test]
    fn period_of_alternating_policy() {
        let c4 = SchemeVariant::parse("C4", 2).unwrap();
        let p = period_scheme(&c4.policy);
        assert_eq!(p.len(), 10);
        assert_eq!(p.stages()[..5], conjugate_scheme(c4.policy.base()).stages()[..]);
        let c3 = SchemeVariant::parse("C3", 2).unwrap();
        assert_eq!(&period_scheme(&c3.policy), c3.policy.base());
    }

    #[test]
    fn single_z_point_has_no_fit() {
        let mut cfg = ExperimentConfig::defaults(Experiment::Fig2);
        cfg.model = ModelConfig::Gue { dim: 8 };
        cfg.realizations = 3;
        cfg.z_grid = ZGrid {
            min: 0.05,
            max: 0.05,
            points: 1,
            spacing: Spacing::Log,
        };
        let t = run(&cfg).unwrap();
        assert_eq!(t.rows.len(), cfg.schemes.len());
        assert!(t.floats("z").iter().all(|&z| z == 0.05));
        assert!(t.summary.is_empty());
    }

    #[test]
    fn zmax_single_task_matches_direct_call() {
        let mut cfg = ExperimentConfig::defaults(Experiment::ZmaxGue);
        cfg.sizes = vec![12];
        cfg.realizations = 1;
        let t = run(&cfg).unwrap();
        let terms = gue_terms(splitstep::GueSpec {
            dim: 12,
            seed: derive_seed(cfg.master_seed, 0, 0),
        })
        .unwrap();
        let direct = find_zmax(&terms, &c3_scheme(2).unwrap(), default_z_hint(&terms), cfg.eps_unit, cfg.rel_tol).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.floats("z_max")[0].to_bits(), direct.z_max.to_bits());
    }

    #[test]
    fn aligned_gamma_has_no_imaginary_part() {
        let mut cfg = ExperimentConfig::defaults(Experiment::Gamma);
        cfg.model = ModelConfig::Pauli {
            a: [0.0, 0.0, 1.0],
            b: [0.0, 0.0, 0.5],
        };
        let t = run(&cfg).unwrap();
        assert!(t.floats("gamma_direct_im").iter().all(|v| v.abs() < 1e-10));
        assert_eq!(t.summary_value("threshold_direct.C3"), Some(&Value::Null));
    }

    #[test]
    fn k4_check_on_pauli_model() {
        let mut cfg = ExperimentConfig::defaults(Experiment::K4Check);
        cfg.model = ModelConfig::Pauli {
            a: [0.3, 0.0, 0.8],
            b: [0.0, 0.6, -0.2],
        };
        let t = run(&cfg).unwrap();
        assert_eq!(t.rows.len(), cfg.z_grid.points);
        let r = t.summary_value("max_residual_plus_at_z_ref").unwrap().as_f64().unwrap();
        assert!(r < 0.05, "{r}");
    }

    #[test]
    fn thread_resolution() {
        let mut cfg = ExperimentConfig::defaults(Experiment::Gamma);
        cfg.threads = Some(3);
        assert_eq!(resolve_threads(&cfg).unwrap(), Some(3));
    }
}
