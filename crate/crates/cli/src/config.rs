//! Run configuration shared by the subcommands.

use std::path::{Path, PathBuf};

use ambient_exact::{parse_rat, Rat, RatFn};
use ambient_gjms::ambient_geometry::NormalFormAmbient;
use ambient_gjms::chart_geometry::{einstein_certificate, space_form_metric, ChartMetric};
use ambient_gjms::{GeometryError, TensorField};
use num_traits::Zero;

use crate::CliError;

/// Background model for the base metric.
#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Flat,
    /// Constant curvature `c`, so `P = (c/2) g`.
    SpaceForm(Rat),
    /// A chart metric read from a tensor JSON file.
    Custom(PathBuf),
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub n: usize,
    pub k: usize,
    pub lambda: Option<Rat>,
    /// `--trunc N`: work modulo `rho^(N+1)`.
    pub trunc: Option<usize>,
    pub model: Model,
    pub seed: u64,
}

pub fn rational(flag: &str, text: &str) -> Result<Rat, CliError> {
    parse_rat(text).map_err(|e| CliError::Usage(format!("{flag} expects an exact rational such as 1/2: {e}")))
}

impl RunConfig {
    /// Resolves `--model`, `--c` and `--lambda` into a model. A bare
    /// `--lambda` selects the space form with `c = 2 lambda`.
    pub fn resolve_model(model: Option<&str>, c: Option<Rat>, lambda: Option<&Rat>, metric: Option<&Path>) -> Result<Model, CliError> {
        let from_lambda = lambda.map(|l| l * Rat::from_integer(2.into()));
        if let (Some(c), Some(l)) = (&c, &from_lambda) {
            if c != l {
                return Err(CliError::Usage(format!("--c {c} and --lambda {} disagree (c = 2 lambda)", l / Rat::from_integer(2.into()))));
            }
        }
        match model {
            None => Ok(match c.or(from_lambda) {
                Some(c) if !c.is_zero() => Model::SpaceForm(c),
                _ => Model::Flat,
            }),
            Some("flat") => match c.or(from_lambda) {
                Some(c) if !c.is_zero() => Err(CliError::Usage("the flat model has lambda = 0".into())),
                _ => Ok(Model::Flat),
            },
            Some("space-form") => Ok(Model::SpaceForm(c.or(from_lambda).unwrap_or_else(|| Rat::from_integer(1.into())))),
            Some("custom") => match metric {
                Some(p) => Ok(Model::Custom(p.to_path_buf())),
                None => Err(CliError::Usage("--model custom needs --metric FILE".into())),
            },
            Some(other) => Err(CliError::Usage(format!("unknown model `{other}` (flat, space-form, custom)"))),
        }
    }

    /// The base metric and, when certified, its Einstein constant.
    pub fn base(&self) -> Result<(ChartMetric, Option<RatFn>), CliError> {
        match &self.model {
            Model::Flat => Ok((ChartMetric::flat(self.n), Some(RatFn::zero()))),
            Model::SpaceForm(c) => {
                let s = space_form_metric(self.n, c)?;
                Ok((s.metric, Some(s.lambda)))
            }
            Model::Custom(path) => {
                let g = read_metric(path)?;
                if g.dim() != self.n {
                    return Err(CliError::Usage(format!("metric file has dimension {}, but --n is {}", g.dim(), self.n)));
                }
                let cert = einstein_certificate(&g)?;
                Ok((g, cert.is_valid().then_some(cert.lambda)))
            }
        }
    }

    /// Ambient metric with jets known modulo `rho^order`; `--trunc` wins over
    /// the suite's default.
    pub fn ambient(&self, default_order: usize) -> Result<Option<NormalFormAmbient>, CliError> {
        let order = self.order(default_order);
        let amb = match &self.model {
            Model::Flat => Some(NormalFormAmbient::flat(self.n, order)?),
            Model::SpaceForm(c) => Some(NormalFormAmbient::from_space_form(&space_form_metric(self.n, c)?, order)?),
            Model::Custom(_) => match self.base()? {
                (g, Some(lambda)) => Some(NormalFormAmbient::einstein(&g, &lambda, order)?),
                (_, None) => None,
            },
        };
        Ok(amb)
    }

    pub fn order(&self, default_order: usize) -> usize {
        self.trunc.map(|t| t + 1).unwrap_or(default_order)
    }

    pub fn model_label(&self) -> String {
        match &self.model {
            Model::Flat => "flat".into(),
            Model::SpaceForm(c) => format!("space-form c={c}"),
            Model::Custom(p) => format!("custom {}", p.display()),
        }
    }
}

pub fn read_tensor(path: &Path) -> Result<TensorField, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(TensorField::from_json(&text)?)
}

fn read_metric(path: &Path) -> Result<ChartMetric, CliError> {
    let t = read_tensor(path)?;
    if t.valence() != (0, 2) {
        return Err(GeometryError::Malformed("a metric file must hold a (0,2) tensor".into()).into());
    }
    let n = t.dim();
    let m = (0..n).map(|i| (0..n).map(|j| t.get(&[i, j]).clone()).collect()).collect();
    Ok(ChartMetric::new(m, vec![Rat::zero(); n])?)
}
