//! Flat `key = value` run configuration.
//!
//! ```text
//! # Brusselator limit cycle
//! problem = brusselator
//! A = 1
//! B = 3
//! ic = 1.5, 3.0
//! t_end = 20
//! n_global = 200
//! tol = 1e-4
//! ```

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;

use twostep::driver::{IntegrationConfig, SolverFamily};
use twostep::problems::vehicle::MPH_TO_FT_PER_S;
use twostep::problems::{AnalyticProblem, BrusselatorParams, Roadway, VehicleParams};
use twostep::{CorrectorVariant, Problem};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "line {n}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    Brusselator(BrusselatorParams),
    Vehicle(VehicleParams),
    Analytic {
        problem: AnalyticProblem,
        family: SolverFamily,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub t_end: f64,
    pub n_global: usize,
    pub integration: IntegrationConfig,
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn build_problem(&self) -> twostep::IntegrateResult<Problem> {
        Ok(match &self.problem {
            ProblemSpec::Brusselator(p) => p.problem(self.t_end, self.n_global).into(),
            ProblemSpec::Vehicle(p) => p.problem(self.t_end, self.n_global)?.into(),
            ProblemSpec::Analytic { problem, family } => {
                problem.problem(*family, self.t_end, self.n_global)
            }
        })
    }
}

const KEYS: &[&str] = &[
    "problem",
    "family",
    "A",
    "B",
    "ic",
    "t_end",
    "n_global",
    "tol",
    "ce_passes",
    "variant",
    "fixed_steps",
    "allow_any_tol",
    "output_dir",
    "road_amplitude_in",
    "road_waves",
    "road_side_lag",
    "road_lead_in_ft",
    "speed_mph",
];

struct Entry {
    line: usize,
    value: String,
}

struct Entries(HashMap<String, Entry>);

impl Entries {
    fn take<T>(
        &mut self,
        key: &str,
        parse: impl FnOnce(&str) -> Result<T, String>,
    ) -> Result<Option<T>, ConfigError> {
        match self.0.remove(key) {
            None => Ok(None),
            Some(e) => parse(&e.value).map(Some).map_err(|message| ConfigError {
                line: Some(e.line),
                message: format!("{key}: {message}"),
            }),
        }
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        self.0.get(key).map(|e| e.line)
    }
}

fn number(s: &str) -> Result<f64, String> {
    s.parse::<f64>()
        .map_err(|_| format!("expected a number, got '{s}'"))
        .and_then(|v| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("expected a finite number, got '{s}'"))
            }
        })
}

fn count(s: &str) -> Result<u64, String> {
    s.parse::<u64>()
        .map_err(|_| format!("expected a nonnegative integer, got '{s}'"))
}

fn boolean(s: &str) -> Result<bool, String> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got '{s}'")),
    }
}

pub fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => Ok([number(a)?, number(b)?]),
        _ => Err(format!("expected two comma-separated numbers, got '{s}'")),
    }
}

pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
    let mut map = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError {
            line: Some(line),
            message: format!("expected 'key = value', got '{content}'"),
        })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(ConfigError {
                line: Some(line),
                message: format!("unknown key '{key}'"),
            });
        }
        let value = value.trim().to_string();
        if value.is_empty() {
            return Err(ConfigError {
                line: Some(line),
                message: format!("{key}: missing value"),
            });
        }
        if let Some(prev) = map.insert(key.to_string(), Entry { line, value }) {
            return Err(ConfigError {
                line: Some(line),
                message: format!("duplicate key '{key}' (first set on line {})", prev.line),
            });
        }
    }
    let mut entries = Entries(map);

    let problem_line = entries.line_of("problem");
    let problem_name = entries
        .take("problem", |s| Ok(s.to_string()))?
        .ok_or_else(|| ConfigError {
            line: None,
            message: "missing required key 'problem'".into(),
        })?;

    let mut integration = IntegrationConfig::default();
    if let Some(tol) = entries.take("tol", number)? {
        integration.tol = tol;
    }
    if let Some(m) = entries.take("ce_passes", count)? {
        integration.ce_passes = u32::try_from(m).map_err(|_| ConfigError {
            line: None,
            message: "ce_passes too large".into(),
        })?;
    }
    if let Some(v) = entries.take("variant", |s| s.parse::<CorrectorVariant>().map_err(|e| e.to_string()))? {
        integration.variant = v;
    }
    integration.fixed_steps = entries.take("fixed_steps", count)?;
    if let Some(b) = entries.take("allow_any_tol", boolean)? {
        integration.allow_any_tol = b;
    }
    let output_dir = entries.take("output_dir", |s| Ok(PathBuf::from(s)))?;
    let t_end = entries.take("t_end", number)?;
    let n_global = entries.take("n_global", count)?;

    let (problem, default_t, default_n) = match problem_name.as_str() {
        "brusselator" => {
            let a = entries.take("A", number)?.unwrap_or(1.0);
            let b = entries.take("B", number)?.unwrap_or(3.0);
            let ic = entries.take("ic", parse_pair)?.unwrap_or([1.5, 3.0]);
            let p = BrusselatorParams::new(a, b, ic).map_err(|e| ConfigError {
                line: problem_line,
                message: e.to_string(),
            })?;
            (ProblemSpec::Brusselator(p), 20.0, 200)
        }
        "vehicle" => {
            let base = VehicleParams::fsae();
            let mut road: Roadway = base.roadway;
            if let Some(a) = entries.take("road_amplitude_in", number)? {
                road.amplitude = a / 12.0;
            }
            if let Some(w) = entries.take("road_waves", count)? {
                road.waves = u32::try_from(w).map_err(|_| ConfigError {
                    line: None,
                    message: "road_waves too large".into(),
                })?;
            }
            if let Some(lag) = entries.take("road_side_lag", number)? {
                road.side_lag = lag;
            }
            if let Some(d) = entries.take("road_lead_in_ft", number)? {
                road.lead_in = d;
            }
            if let Some(mph) = entries.take("speed_mph", number)? {
                road.speed = mph * MPH_TO_FT_PER_S;
            }
            let p = VehicleParams {
                roadway: road,
                ..base
            };
            p.validate().map_err(|e| ConfigError {
                line: problem_line,
                message: e.to_string(),
            })?;
            (ProblemSpec::Vehicle(p), 4.0, 500)
        }
        other => {
            let analytic = other.parse::<AnalyticProblem>().map_err(|_| ConfigError {
                line: problem_line,
                message: format!(
                    "unknown problem '{other}' (expected brusselator, vehicle, exp_decay, harmonic or forced_linear)"
                ),
            })?;
            let family = entries
                .take("family", |s| s.parse::<SolverFamily>().map_err(|e| e.to_string()))?
                .unwrap_or(SolverFamily::FirstOrder);
            (
                ProblemSpec::Analytic {
                    problem: analytic,
                    family,
                },
                1.0,
                10,
            )
        }
    };

    if let Some((key, e)) = entries.0.iter().min_by_key(|(_, e)| e.line) {
        return Err(ConfigError {
            line: Some(e.line),
            message: format!("key '{key}' does not apply to problem '{problem_name}'"),
        });
    }

    let t_end = t_end.unwrap_or(default_t);
    if t_end <= 0.0 {
        return Err(ConfigError {
            line: None,
            message: format!("t_end must be positive, got {t_end}"),
        });
    }
    let n_global = n_global.unwrap_or(default_n);
    if n_global == 0 {
        return Err(ConfigError {
            line: None,
            message: "n_global must be at least 1".into(),
        });
    }
    integration.validate().map_err(|e| ConfigError {
        line: None,
        message: e.to_string(),
    })?;

    Ok(RunConfig {
        problem,
        t_end,
        n_global: n_global as usize,
        integration,
        output_dir,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_brusselator() {
        let cfg = parse(
            "# limit cycle\nproblem = brusselator\nA = 1\nB = 3  # trailing\nic = 2.0, 0.5\n\nt_end = 20\nn_global = 200\ntol = 1e-4\n",
        )
        .unwrap();
        match cfg.problem {
            ProblemSpec::Brusselator(p) => {
                assert_eq!((p.a, p.b, p.y0), (1.0, 3.0, [2.0, 0.5]));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(cfg.n_global, 200);
        assert_eq!(cfg.integration.tol, 1e-4);
    }

    #[test]
    fn parses_vehicle_overrides() {
        let cfg = parse("problem = vehicle\nroad_amplitude_in = 2\nspeed_mph = 20\n").unwrap();
        match cfg.problem {
            ProblemSpec::Vehicle(p) => {
                assert!((p.roadway.amplitude - 2.0 / 12.0).abs() < 1e-15);
                assert!((p.roadway.speed - 2.0 * 14.666_666_666_666_666).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(cfg.n_global, 500);
    }

    #[test]
    fn parses_analytic_with_family() {
        let cfg = parse("problem = harmonic\nfamily = dynamic\nvariant = averaged\nfixed_steps = 8\n").unwrap();
        assert_eq!(
            cfg.problem,
            ProblemSpec::Analytic {
                problem: AnalyticProblem::Harmonic,
                family: SolverFamily::Dynamic
            }
        );
        assert_eq!(cfg.integration.variant, CorrectorVariant::Averaged);
        assert_eq!(cfg.integration.fixed_steps, Some(8));
    }

    fn line_of_error(text: &str) -> Option<usize> {
        parse(text).unwrap_err().line
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(line_of_error("problem = brusselator\nA = one\n"), Some(2));
        assert_eq!(line_of_error("problem = brusselator\n\nbogus = 1\n"), Some(3));
        assert_eq!(line_of_error("problem = brusselator\nA 1\n"), Some(2));
        assert_eq!(line_of_error("problem = brusselator\nA = 1\nA = 2\n"), Some(3));
        assert_eq!(line_of_error("problem = brusselator\nic = 1\n"), Some(2));
        assert_eq!(line_of_error("problem = brusselator\nroad_waves = 3\n"), Some(2));
        assert_eq!(line_of_error("# nothing\nproblem = pendulum\n"), Some(2));
        assert_eq!(line_of_error("problem = brusselator\nvariant = type3\n"), Some(2));
    }

    #[test]
    fn missing_problem_and_bad_ranges() {
        assert!(parse("tol = 1e-4\n").unwrap_err().message.contains("problem"));
        assert!(parse("problem = brusselator\ntol = 0.5\n").is_err());
        assert!(parse("problem = brusselator\nallow_any_tol = true\ntol = 0.5\n").is_ok());
        assert!(parse("problem = brusselator\nn_global = 0\n").is_err());
        assert!(parse("problem = brusselator\nt_end = -1\n").is_err());
        assert!(parse("problem = brusselator\nA = -1\n").is_err());
    }

    #[test]
    fn pair_parsing() {
        assert_eq!(parse_pair("0.1,0.2").unwrap(), [0.1, 0.2]);
        assert!(parse_pair("0.1").is_err());
        assert!(parse_pair("a,b").is_err());
    }
}
