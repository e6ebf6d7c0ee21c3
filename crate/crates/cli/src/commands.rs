use std::io::{self, Write};

use carnot_core::group::validate_matrices;
use carnot_core::lab::{run_catalog, CatalogKind, CatalogOptions};
use carnot_core::measures::{check_theorem11_conditions, mcmc_sample_with, Chain, SamplerOptions};
use carnot_core::nogo::run_nogo;
use carnot_core::norm::estimate_lemma2_constants;
use carnot_core::{BoltzmannMeasure, CarnotGroup, Error, VERSION};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::ExperimentConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// A failure with its exit code and machine-readable reason.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub reason: String,
    pub message: String,
}

impl Failure {
    pub fn validation(e: Error) -> Self {
        Failure {
            code: EXIT_VALIDATION,
            reason: e.reason().into(),
            message: e.to_string(),
        }
    }

    pub fn runtime(e: Error) -> Self {
        Failure {
            code: EXIT_RUNTIME,
            reason: e.reason().into(),
            message: e.to_string(),
        }
    }

    pub fn io(e: io::Error) -> Self {
        Failure {
            code: EXIT_RUNTIME,
            reason: "Io".into(),
            message: e.to_string(),
        }
    }

    /// Bad input is a validation failure, anything else a runtime one.
    fn classify(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_)
            | Error::BadDimension(_)
            | Error::SkewViolation { .. }
            | Error::DependentMatrices { .. }
            | Error::DimensionMismatch { .. } => Failure::validation(e),
            _ => Failure::runtime(e),
        }
    }
}

/// CSV body written only with `--format csv`.
pub type TableWriter = Box<dyn FnOnce(&mut dyn Write) -> io::Result<()>>;

pub struct Outcome {
    pub exit_code: i32,
    pub report: Map<String, Value>,
    /// `(file suffix, writer)`
    pub tables: Vec<(String, TableWriter)>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn base_report(command: &str, config: &ExperimentConfig) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("version".into(), json!(VERSION));
    m.insert("config".into(), to_value(config));
    m
}

fn group(config: &ExperimentConfig) -> Result<CarnotGroup, Failure> {
    config.group.build().map_err(Failure::validation)
}

pub fn validate_group(config: &ExperimentConfig) -> Result<Outcome, Failure> {
    let mut report = base_report("validate-group", config);
    let def = config.group.definition().map_err(Failure::validation);
    let (valid, reason, message, validation) = match def {
        Err(f) => (false, Some(f.reason), Some(f.message), None),
        Ok(def) => {
            let result = CarnotGroup::from_def(&def);
            let shapes_ok = !matches!(
                result,
                Err(Error::BadDimension(_)) | Err(Error::DimensionMismatch { .. })
            );
            let validation = shapes_ok.then(|| {
                let flat: Vec<Vec<f64>> = def.lambdas.iter().map(|l| l.concat()).collect();
                validate_matrices(def.n, &flat)
            });
            match result {
                Ok(_) => (true, None, None, validation),
                Err(e) => (false, Some(e.reason().to_string()), Some(e.to_string()), validation),
            }
        }
    };
    report.insert("valid".into(), json!(valid));
    report.insert(
        "htype".into(),
        json!(validation.as_ref().is_some_and(|v| valid && v.htype.is_htype())),
    );
    report.insert("reason".into(), json!(reason));
    report.insert("message".into(), json!(message));
    report.insert("validation".into(), to_value(&validation));
    Ok(Outcome {
        exit_code: if valid { EXIT_OK } else { EXIT_VALIDATION },
        report,
        tables: Vec::new(),
    })
}

pub fn norm_constants(config: &ExperimentConfig) -> Result<Outcome, Failure> {
    let g = group(config)?;
    let nc = &config.norm_constants;
    let r = estimate_lemma2_constants(&g, nc.samples, config.seed, nc.radius_range)
        .map_err(Failure::classify)?;
    let mut report = base_report("norm-constants", config);
    report.insert("htype".into(), json!(g.htype().is_htype()));
    report.insert("a".into(), json!(g.a()));
    report.insert("homogeneous_dimension".into(), json!(g.q_hom()));
    report.insert("constants".into(), to_value(&r));
    Ok(Outcome {
        exit_code: EXIT_OK,
        report,
        tables: Vec::new(),
    })
}

#[derive(Serialize)]
struct Moment {
    name: &'static str,
    mcmc: f64,
    mcmc_se: f64,
    quadrature: f64,
}

fn moments(measure: &BoltzmannMeasure, chain: &Chain) -> Result<Vec<Moment>, Failure> {
    let a = measure.group.a();
    type Radial<'a> = &'a dyn Fn(f64, f64) -> f64;
    let defs: [(&str, Radial); 3] = [
        ("E[N]", &|r, s| (r.powi(4) + a * s * s).powf(0.25)),
        ("E[N^2]", &|r, s| (r.powi(4) + a * s * s).sqrt()),
        ("E[|x|^2]", &|r, _| r * r),
    ];
    defs.iter()
        .map(|(name, h)| {
            let quadrature = measure.radial_quadrature(h).map_err(Failure::runtime)?;
            let (mcmc, mcmc_se) = chain.mean_and_se(|x, z| {
                h(
                    x.iter().map(|v| v * v).sum::<f64>().sqrt(),
                    z.iter().map(|v| v * v).sum::<f64>().sqrt(),
                )
            });
            Ok(Moment {
                name,
                mcmc,
                mcmc_se,
                quadrature,
            })
        })
        .collect()
}

pub fn catalog(config: &ExperimentConfig, kind: CatalogKind) -> Result<Outcome, Failure> {
    let g = group(config)?;
    let profile = config.profile().map_err(Failure::validation)?;
    if !(config.q >= 1.0) {
        return Err(Failure::validation(Error::InvalidParameter(format!(
            "q = {} must be ≥ 1",
            config.q
        ))));
    }
    if kind == CatalogKind::Logsobolev && !(config.beta > 0.0 && config.beta <= 1.0) {
        return Err(Failure::validation(Error::InvalidParameter(format!(
            "beta = {} must be in (0, 1]",
            config.beta
        ))));
    }
    let measure = BoltzmannMeasure::new(g, profile)
        .map_err(Failure::validation)?
        .with_resolution(config.quad_resolution);
    let conditions = check_theorem11_conditions(&profile, config.beta);
    let mut warnings = conditions.warnings();
    if kind != CatalogKind::Logsobolev {
        warnings.retain(|w| !w.starts_with("growth conditions"));
    }

    let opts = SamplerOptions {
        count: config.sampler.count,
        seed: config.sampler_seed(),
        step0: config.sampler.step0,
        isotropic: config.sampler.isotropic,
    };
    let chain = mcmc_sample_with(&measure, &opts).map_err(Failure::classify)?;
    let moments = moments(&measure, &chain)?;
    let copts = CatalogOptions {
        q: config.q,
        beta: config.beta,
        seed: config.seed,
        resamples: config.catalog.resamples,
    };
    let inequality = run_catalog(&chain, &measure, kind, &copts).map_err(Failure::runtime)?;

    let mut report = base_report(kind.name(), config);
    report.insert("warnings".into(), json!(warnings));
    report.insert("conditions".into(), to_value(&conditions));
    report.insert("chain".into(), to_value(&chain.summary()));
    report.insert("moments".into(), to_value(&moments));
    report.insert("inequality".into(), to_value(&inequality));
    report.insert("feasible".into(), json!(inequality.feasible()));

    let tables: Vec<(String, TableWriter)> = vec![
        (String::new(), Box::new(move |w| inequality.write_csv(w))),
        ("-chain".into(), Box::new(move |w| chain.write_csv(w))),
    ];
    Ok(Outcome {
        exit_code: EXIT_OK,
        report,
        tables,
    })
}

pub fn nogo(config: &ExperimentConfig) -> Result<Outcome, Failure> {
    let g = group(config)?;
    let ng = config.nogo.as_ref().ok_or_else(|| {
        Failure::validation(Error::InvalidParameter("the nogo command needs a `nogo` block".into()))
    })?;
    let params = ng.params(&g, config.q, config.beta).map_err(Failure::validation)?;
    let measure = params
        .measure(&g)
        .map_err(Failure::validation)?
        .with_resolution(config.quad_resolution);
    let result = run_nogo(&g, &measure, &params, ng.samples, config.seed).map_err(Failure::classify)?;

    let mut report = base_report("nogo", config);
    report.insert("fitted_slope".into(), json!(result.fitted_slope));
    report.insert("fitted_slope_full".into(), json!(result.fitted_slope_full));
    report.insert("predicted_slope".into(), json!(result.predicted_slope));
    report.insert("in_failure_regime".into(), json!(result.in_failure_regime));
    report.insert("result".into(), to_value(&result));
    Ok(Outcome {
        exit_code: EXIT_OK,
        report,
        tables: vec![(String::new(), Box::new(move |w| result.write_csv(w)))],
    })
}
