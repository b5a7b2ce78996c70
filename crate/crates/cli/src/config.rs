//! Experiment configuration: flat `key=value` files overlaid by flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use gapscope::asymptotics::{default_k_grid, geometric_k_grid, Quantity};
use gapscope::WeightProfile;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Spectrum,
    GapScaling,
    FitExponent,
    GroundState,
    Verify,
}

impl Experiment {
    fn parse(s: &str) -> Option<Self> {
        let key: String = s.chars().filter(|c| *c != '-' && *c != '_').collect::<String>().to_lowercase();
        Some(match key.as_str() {
            "spectrum" => Experiment::Spectrum,
            "gapscaling" => Experiment::GapScaling,
            "fitexponent" => Experiment::FitExponent,
            "groundstate" => Experiment::GroundState,
            "verify" => Experiment::Verify,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightsSpec {
    Unit,
    PowerLaw { c: f64, mu: f64 },
    Explicit { file: PathBuf, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub weights: WeightsSpec,
    pub u: f64,
    /// `None` when neither `k` nor `k_grid` was given.
    pub k_grid: Option<Vec<usize>>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub plot: Option<PathBuf>,
    pub quantity: Quantity,
    pub fit_window: Option<(usize, usize)>,
    pub seed: Option<u64>,
    pub oracle_instances: Option<usize>,
    pub structure_instances: Option<usize>,
}

pub const KEYS: &[&str] = &[
    "experiment",
    "k",
    "k_grid",
    "u",
    "weights",
    "C",
    "mu",
    "weights_file",
    "tol",
    "out",
    "format",
    "plot",
    "quantity",
    "fit_window",
    "seed",
    "oracle_instances",
    "structure_instances",
];

/// Raw settings in key order, before validation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!("config line {}: expected key=value, got `{line}`", lineno + 1)));
            };
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(CliError::Usage(format!("unknown config key `{key}` (line {})", lineno + 1)));
            }
            map.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Settings(map))
    }

    pub fn set(&mut self, key: &str, value: impl fmt::Display) {
        debug_assert!(KEYS.contains(&key));
        self.0.insert(key.to_string(), value.to_string());
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|_| bad(key, v, std::any::type_name::<T>())))
            .transpose()
    }

    pub fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let experiment = match self.get("experiment") {
            None => Experiment::GapScaling,
            Some(v) => Experiment::parse(v)
                .ok_or_else(|| bad("experiment", v, "Spectrum|GapScaling|FitExponent|GroundState|Verify"))?,
        };

        let u: f64 = self.parsed("u")?.unwrap_or(0.0);
        if !(u.is_finite() && u >= 0.0) {
            return Err(bad("u", &u.to_string(), "a non-negative real"));
        }

        let weights = match self.get("weights").unwrap_or("unit").to_lowercase().as_str() {
            "unit" => WeightsSpec::Unit,
            "powerlaw" | "power-law" | "power_law" => {
                let c = self.parsed("C")?.unwrap_or(1.0);
                let mu = self.parsed("mu")?.unwrap_or(2.0);
                WeightProfile::power_law(c, mu).map_err(|e| CliError::Usage(format!("key `C`/`mu`: {e}")))?;
                WeightsSpec::PowerLaw { c, mu }
            }
            "explicit" => {
                let file = self
                    .get("weights_file")
                    .ok_or_else(|| CliError::Usage("key `weights_file` is required for weights=explicit".into()))?;
                let file = PathBuf::from(file);
                let values = read_weights(&file)?;
                WeightsSpec::Explicit { file, values }
            }
            other => return Err(bad("weights", other, "unit|powerlaw|explicit")),
        };

        let k: Option<usize> = self.parsed("k")?;
        let grid = self.get("k_grid").map(parse_grid).transpose()?;
        let k_grid = match (k, grid) {
            (Some(_), Some(_)) => {
                return Err(CliError::Usage("keys `k` and `k_grid` are mutually exclusive".into()));
            }
            (Some(0), None) => return Err(bad("k", "0", "a positive integer")),
            (Some(k), None) => Some(vec![k]),
            (None, g) => g,
        };

        let tol: Option<f64> = self.parsed("tol")?;
        if let Some(t) = tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(bad("tol", &t.to_string(), "a positive real"));
            }
        }

        let format = match self.get("format") {
            None => Format::Csv,
            Some(v) => match v.to_lowercase().as_str() {
                "csv" => Format::Csv,
                "json" => Format::Json,
                _ => return Err(bad("format", v, "csv|json")),
            },
        };

        let quantity = match self.get("quantity") {
            None => Quantity::Gap,
            Some(v) => parse_quantity(v).ok_or_else(|| bad("quantity", v, "gap|n2gap|n2lambda0|n2lambda1|n_u0_center|n2mu0"))?,
        };

        let fit_window = self
            .get("fit_window")
            .map(|v| {
                v.split_once(':')
                    .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                    .filter(|(a, b): &(usize, usize)| a < b)
                    .ok_or_else(|| bad("fit_window", v, "Nmin:Nmax with Nmin < Nmax"))
            })
            .transpose()?;

        let plot = self.get("plot").map(PathBuf::from);
        if plot.is_some() && experiment != Experiment::GapScaling {
            return Err(CliError::Usage("key `plot` is only supported by the GapScaling experiment".into()));
        }

        Ok(ExperimentConfig {
            experiment,
            weights,
            u,
            k_grid,
            tol,
            out: self.get("out").map(PathBuf::from),
            format,
            plot,
            quantity,
            fit_window,
            seed: self.parsed("seed")?,
            oracle_instances: self.parsed("oracle_instances")?,
            structure_instances: self.parsed("structure_instances")?,
        })
    }
}

impl ExperimentConfig {
    /// The configured grid, or the default geometric grid.
    pub fn grid_or_default(&self) -> Vec<usize> {
        self.k_grid.clone().unwrap_or_else(default_k_grid)
    }

    /// The weight profile realized for size `k`.
    pub fn profile(&self, k: usize) -> Result<WeightProfile, CliError> {
        match &self.weights {
            WeightsSpec::Unit => Ok(WeightProfile::Unit),
            WeightsSpec::PowerLaw { c, mu } => Ok(WeightProfile::PowerLaw { c: *c, mu: *mu }),
            WeightsSpec::Explicit { file, values } => WeightProfile::explicit(values.clone(), k)
                .map_err(|e| CliError::Usage(format!("weights file {}: {e}", file.display()))),
        }
    }
}

fn bad(key: &str, value: &str, expected: &str) -> CliError {
    CliError::Usage(format!("invalid value `{value}` for key `{key}`: expected {expected}"))
}

/// `k0:ratio:count` (geometric) or a comma-separated list.
fn parse_grid(v: &str) -> Result<Vec<usize>, CliError> {
    let parts: Vec<&str> = v.split(':').map(str::trim).collect();
    let grid = if parts.len() == 3 {
        let k0 = parts[0].parse().map_err(|_| bad("k_grid", v, "k0:ratio:count or k1,k2,..."))?;
        let ratio = parts[1].parse().map_err(|_| bad("k_grid", v, "k0:ratio:count or k1,k2,..."))?;
        let count = parts[2].parse().map_err(|_| bad("k_grid", v, "k0:ratio:count or k1,k2,..."))?;
        geometric_k_grid(k0, ratio, count).map_err(|e| CliError::Usage(format!("key `k_grid`: {e}")))?
    } else {
        v.split(',')
            .map(|s| s.trim().parse::<usize>().ok().filter(|&k| k > 0))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| bad("k_grid", v, "k0:ratio:count or k1,k2,..."))?
    };
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad("k_grid", v, "a non-empty, strictly increasing grid"));
    }
    Ok(grid)
}

fn parse_quantity(v: &str) -> Option<Quantity> {
    Some(match v {
        "gap" => Quantity::Gap,
        "n2gap" => Quantity::GapTimesN2,
        "n2lambda0" => Quantity::Lambda0TimesN2,
        "n2lambda1" => Quantity::Lambda1TimesN2,
        "n_u0_center" => Quantity::CenterValueTimesN,
        "n2mu0" => Quantity::DirichletMu0TimesN2,
        _ => return None,
    })
}

pub fn quantity_name(q: Quantity) -> &'static str {
    match q {
        Quantity::Gap => "gap",
        Quantity::GapTimesN2 => "n2gap",
        Quantity::Lambda0TimesN2 => "n2lambda0",
        Quantity::Lambda1TimesN2 => "n2lambda1",
        Quantity::CenterValueTimesN => "n_u0_center",
        Quantity::DirichletMu0TimesN2 => "n2mu0",
    }
}

/// Whitespace- or comma-separated reals; `#` starts a comment.
fn read_weights(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read weights file {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let w = tok
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("weights file {}: `{tok}` is not a number", path.display())))?;
            out.push(w);
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage(format!("weights file {} is empty", path.display())));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blank_lines() {
        let s = Settings::parse("# header\n\nexperiment = Spectrum # trailing\nk=3\nu=1.5\n").unwrap();
        let cfg = s.resolve().unwrap();
        assert_eq!(cfg.experiment, Experiment::Spectrum);
        assert_eq!(cfg.k_grid, Some(vec![3]));
        assert_eq!(cfg.u, 1.5);
        assert_eq!(cfg.format, Format::Csv);
    }

    #[test]
    fn unknown_key_is_named() {
        match Settings::parse("k=3\nbogus_key=1\n") {
            Err(CliError::Usage(msg)) => assert!(msg.contains("bogus_key"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_value_is_named() {
        let s = Settings::parse("u=-1\n").unwrap();
        match s.resolve() {
            Err(CliError::Usage(msg)) => assert!(msg.contains("`u`"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("100:2:4").unwrap(), vec![100, 200, 400, 800]);
        assert_eq!(parse_grid("5, 10,20").unwrap(), vec![5, 10, 20]);
        assert!(parse_grid("10,5").is_err());
        assert!(parse_grid("1:0.5:3").is_err());
        assert!(parse_grid("a,b").is_err());
    }

    #[test]
    fn later_settings_win() {
        let mut s = Settings::parse("u=1\nweights=powerlaw\nC=2\n").unwrap();
        s.set("u", 3.0);
        let cfg = s.resolve().unwrap();
        assert_eq!(cfg.u, 3.0);
        assert_eq!(cfg.weights, WeightsSpec::PowerLaw { c: 2.0, mu: 2.0 });
    }

    #[test]
    fn plot_needs_gap_scaling() {
        let s = Settings::parse("experiment=Spectrum\nk=2\nplot=a.svg\n").unwrap();
        assert!(matches!(s.resolve(), Err(CliError::Usage(m)) if m.contains("plot")));
    }
}
