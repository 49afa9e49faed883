//! Experiment configuration: a flat `key = value` format with `[section]`
//! headers, chosen for diff-friendliness in experiment folders. Parsing is
//! strict (unknown keys are errors) and `parse(serialize(c)) == c`.

use fpp_core::DistributionSpec;
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Xi,
    Chi,
    Shape,
    Curvature,
    Alpha,
    Breakpoints,
    Flatseg,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Xi => "xi",
            ExperimentKind::Chi => "chi",
            ExperimentKind::Shape => "shape",
            ExperimentKind::Curvature => "curvature",
            ExperimentKind::Alpha => "alpha",
            ExperimentKind::Breakpoints => "breakpoints",
            ExperimentKind::Flatseg => "flatseg",
        }
    }

    pub fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "xi" => ExperimentKind::Xi,
            "chi" => ExperimentKind::Chi,
            "shape" => ExperimentKind::Shape,
            "curvature" => ExperimentKind::Curvature,
            "alpha" => ExperimentKind::Alpha,
            "breakpoints" => ExperimentKind::Breakpoints,
            "flatseg" => ExperimentKind::Flatseg,
            other => return Err(format!("unknown experiment kind '{other}'")),
        })
    }
}

/// Planar passage-time scan parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FppParams {
    pub theta: f64,
    pub r: f64,
    pub n_list: Vec<u64>,
    pub replicates: u64,
}

/// Oriented right-edge parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientedParams {
    pub p: f64,
    pub levels: u64,
    pub replicates: u64,
    pub horizon: u64,
    pub traces: u64,
    pub p_list: Vec<f64>,
}

/// Boundary and curvature grids.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeParams {
    pub theta_count: usize,
    pub theta_min: f64,
    pub theta_max: f64,
    /// Angular window probed below the cone endpoint in curvature runs.
    pub below_window: f64,
    /// Total grid size of a curvature run.
    pub grid_points: usize,
    /// Margin kept away from the estimated cone endpoints in flat-segment runs.
    pub cone_margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    /// 0 means one worker per core.
    pub threads: usize,
    pub out_dir: PathBuf,
    pub spec: DistributionSpec,
    pub fpp: FppParams,
    pub oriented: OrientedParams,
    pub shape: ShapeParams,
}

impl ExperimentConfig {
    /// Defaults per experiment kind; the fluctuation grid is geometric from
    /// 32 to 2048, the others trade depth for turnaround.
    pub fn default_for(kind: ExperimentKind) -> ExperimentConfig {
        let n_list: Vec<u64> = match kind {
            ExperimentKind::Xi | ExperimentKind::Chi => {
                (5..=11).map(|k| 1u64 << k).collect()
            }
            _ => vec![128, 256, 512],
        };
        ExperimentConfig {
            kind,
            seed: 1,
            threads: 0,
            out_dir: PathBuf::from(format!("runs/{}", kind.as_str())),
            spec: DistributionSpec::DurrettLiggett { p: 0.8, high: 5.0 },
            fpp: FppParams {
                theta: core::f64::consts::FRAC_PI_4,
                r: 1.0,
                n_list,
                replicates: match kind {
                    ExperimentKind::Chi => 40,
                    _ => 20,
                },
            },
            oriented: OrientedParams {
                p: 0.8,
                levels: 2000,
                replicates: 50,
                horizon: 100,
                traces: 20,
                p_list: vec![0.7, 0.75, 0.8, 0.85, 0.9],
            },
            shape: ShapeParams {
                theta_count: match kind {
                    ExperimentKind::Flatseg => 5,
                    _ => 12,
                },
                theta_min: 0.0,
                theta_max: core::f64::consts::FRAC_PI_2,
                below_window: 0.2,
                grid_points: 12,
                cone_margin: 0.05,
            },
        }
    }

    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[experiment]");
        let _ = writeln!(s, "kind = {}", self.kind.as_str());
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "threads = {}", self.threads);
        let _ = writeln!(s, "out = {}", self.out_dir.display());
        let _ = writeln!(s);
        let _ = writeln!(s, "[distribution]");
        match self.spec {
            DistributionSpec::Constant { value } => {
                let _ = writeln!(s, "kind = constant");
                let _ = writeln!(s, "value = {value}");
            }
            DistributionSpec::DurrettLiggett { p, high } => {
                let _ = writeln!(s, "kind = durrett_liggett");
                let _ = writeln!(s, "p = {p}");
                let _ = writeln!(s, "high = {high}");
            }
            DistributionSpec::BernoulliZero { p0, high } => {
                let _ = writeln!(s, "kind = bernoulli_zero");
                let _ = writeln!(s, "p0 = {p0}");
                let _ = writeln!(s, "high = {high}");
            }
            DistributionSpec::Exponential { rate } => {
                let _ = writeln!(s, "kind = exponential");
                let _ = writeln!(s, "rate = {rate}");
            }
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "[fpp]");
        let _ = writeln!(s, "theta = {}", self.fpp.theta);
        let _ = writeln!(s, "r = {}", self.fpp.r);
        let _ = writeln!(s, "n_list = {}", join(&self.fpp.n_list));
        let _ = writeln!(s, "replicates = {}", self.fpp.replicates);
        let _ = writeln!(s);
        let _ = writeln!(s, "[oriented]");
        let _ = writeln!(s, "p = {}", self.oriented.p);
        let _ = writeln!(s, "levels = {}", self.oriented.levels);
        let _ = writeln!(s, "replicates = {}", self.oriented.replicates);
        let _ = writeln!(s, "horizon = {}", self.oriented.horizon);
        let _ = writeln!(s, "traces = {}", self.oriented.traces);
        let _ = writeln!(s, "p_list = {}", join(&self.oriented.p_list));
        let _ = writeln!(s);
        let _ = writeln!(s, "[shape]");
        let _ = writeln!(s, "theta_count = {}", self.shape.theta_count);
        let _ = writeln!(s, "theta_min = {}", self.shape.theta_min);
        let _ = writeln!(s, "theta_max = {}", self.shape.theta_max);
        let _ = writeln!(s, "below_window = {}", self.shape.below_window);
        let _ = writeln!(s, "grid_points = {}", self.shape.grid_points);
        let _ = writeln!(s, "cone_margin = {}", self.shape.cone_margin);
        s
    }

    /// Parse the flat format over the defaults for `kind`. A `kind` key in
    /// the file must agree with the requested kind.
    pub fn parse(kind: ExperimentKind, text: &str) -> Result<ExperimentConfig, String> {
        let mut cfg = ExperimentConfig::default_for(kind);
        let mut dist: Option<(String, Vec<(String, f64)>)> = None;
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                match section.as_str() {
                    "experiment" | "distribution" | "fpp" | "oriented" | "shape" => {}
                    other => return Err(format!("line {}: unknown section [{other}]", lineno + 1)),
                }
                if section == "distribution" {
                    dist = Some((String::new(), Vec::new()));
                }
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| format!("line {}: expected 'key = value'", lineno + 1))?;
            let err = |what: &str| format!("line {}: {what}", lineno + 1);
            match (section.as_str(), key) {
                ("experiment", "kind") => {
                    let file_kind = ExperimentKind::from_str(value).map_err(|e| err(&e))?;
                    if file_kind != kind {
                        return Err(format!(
                            "config is for '{}' but the '{}' experiment was requested",
                            file_kind.as_str(),
                            kind.as_str()
                        ));
                    }
                }
                ("experiment", "seed") => cfg.seed = parse_num(value).map_err(|e| err(&e))?,
                ("experiment", "threads") => cfg.threads = parse_num(value).map_err(|e| err(&e))?,
                ("experiment", "out") => cfg.out_dir = PathBuf::from(value),
                ("distribution", "kind") => {
                    dist.as_mut().unwrap().0 = value.to_string();
                }
                ("distribution", k) => {
                    let v: f64 = parse_num(value).map_err(|e| err(&e))?;
                    dist.as_mut().unwrap().1.push((k.to_string(), v));
                }
                ("fpp", "theta") => cfg.fpp.theta = parse_num(value).map_err(|e| err(&e))?,
                ("fpp", "r") => cfg.fpp.r = parse_num(value).map_err(|e| err(&e))?,
                ("fpp", "n_list") => cfg.fpp.n_list = parse_list(value).map_err(|e| err(&e))?,
                ("fpp", "replicates") => {
                    cfg.fpp.replicates = parse_num(value).map_err(|e| err(&e))?
                }
                ("oriented", "p") => cfg.oriented.p = parse_num(value).map_err(|e| err(&e))?,
                ("oriented", "levels") => {
                    cfg.oriented.levels = parse_num(value).map_err(|e| err(&e))?
                }
                ("oriented", "replicates") => {
                    cfg.oriented.replicates = parse_num(value).map_err(|e| err(&e))?
                }
                ("oriented", "horizon") => {
                    cfg.oriented.horizon = parse_num(value).map_err(|e| err(&e))?
                }
                ("oriented", "traces") => {
                    cfg.oriented.traces = parse_num(value).map_err(|e| err(&e))?
                }
                ("oriented", "p_list") => {
                    cfg.oriented.p_list = parse_list(value).map_err(|e| err(&e))?
                }
                ("shape", "theta_count") => {
                    cfg.shape.theta_count = parse_num(value).map_err(|e| err(&e))?
                }
                ("shape", "theta_min") => {
                    cfg.shape.theta_min = parse_num(value).map_err(|e| err(&e))?
                }
                ("shape", "theta_max") => {
                    cfg.shape.theta_max = parse_num(value).map_err(|e| err(&e))?
                }
                ("shape", "below_window") => {
                    cfg.shape.below_window = parse_num(value).map_err(|e| err(&e))?
                }
                ("shape", "grid_points") => {
                    cfg.shape.grid_points = parse_num(value).map_err(|e| err(&e))?
                }
                ("shape", "cone_margin") => {
                    cfg.shape.cone_margin = parse_num(value).map_err(|e| err(&e))?
                }
                ("", k) => return Err(err(&format!("key '{k}' before any [section]"))),
                (sec, k) => return Err(err(&format!("unknown key '{k}' in [{sec}]"))),
            }
        }
        if let Some((kind_name, params)) = dist {
            cfg.spec = build_spec(&kind_name, &params)?;
        }
        cfg.spec.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

fn build_spec(kind: &str, params: &[(String, f64)]) -> Result<DistributionSpec, String> {
    let get = |k: &str| -> Result<f64, String> {
        params
            .iter()
            .find(|(name, _)| name == k)
            .map(|(_, v)| *v)
            .ok_or_else(|| format!("distribution '{kind}' needs '{k}'"))
    };
    let allowed: &[&str] = match kind {
        "constant" => &["value"],
        "durrett_liggett" => &["p", "high"],
        "bernoulli_zero" => &["p0", "high"],
        "exponential" => &["rate"],
        other => return Err(format!("unknown distribution kind '{other}'")),
    };
    for (name, _) in params {
        if !allowed.contains(&name.as_str()) {
            return Err(format!("distribution '{kind}' does not take '{name}'"));
        }
    }
    Ok(match kind {
        "constant" => DistributionSpec::Constant { value: get("value")? },
        "durrett_liggett" => DistributionSpec::DurrettLiggett { p: get("p")?, high: get("high")? },
        "bernoulli_zero" => DistributionSpec::BernoulliZero { p0: get("p0")?, high: get("high")? },
        "exponential" => DistributionSpec::Exponential { rate: get("rate")? },
        _ => unreachable!(),
    })
}

fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("cannot parse '{s}'"))
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',').map(|v| parse_num(v.trim())).collect()
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_exactly() {
        for kind in [
            ExperimentKind::Xi,
            ExperimentKind::Chi,
            ExperimentKind::Shape,
            ExperimentKind::Curvature,
            ExperimentKind::Alpha,
            ExperimentKind::Breakpoints,
            ExperimentKind::Flatseg,
        ] {
            let mut cfg = ExperimentConfig::default_for(kind);
            cfg.seed = 987654321;
            cfg.fpp.theta = 0.123456789012345678;
            cfg.oriented.p_list = vec![0.65, 0.7071067811865476];
            let text = cfg.serialize();
            let back = ExperimentConfig::parse(kind, &text).unwrap();
            assert_eq!(cfg, back, "round trip for {kind:?}");
        }
    }

    #[test]
    fn rejects_unknown_keys_and_mismatched_kind() {
        assert!(ExperimentConfig::parse(ExperimentKind::Xi, "[experiment]\nbogus = 1").is_err());
        assert!(ExperimentConfig::parse(ExperimentKind::Xi, "[bogus]\n").is_err());
        assert!(
            ExperimentConfig::parse(ExperimentKind::Xi, "[experiment]\nkind = chi\n").is_err()
        );
        assert!(ExperimentConfig::parse(ExperimentKind::Xi, "seed = 1\n").is_err());
    }

    #[test]
    fn parses_distribution_and_validates() {
        let text = "[distribution]\nkind = exponential\nrate = 2.5\n";
        let cfg = ExperimentConfig::parse(ExperimentKind::Chi, text).unwrap();
        assert_eq!(cfg.spec, DistributionSpec::Exponential { rate: 2.5 });
        let bad = "[distribution]\nkind = durrett_liggett\np = 0.8\nhigh = 0.5\n";
        assert!(ExperimentConfig::parse(ExperimentKind::Xi, bad).is_err());
        let extra = "[distribution]\nkind = exponential\nrate = 1\np = 0.5\n";
        assert!(ExperimentConfig::parse(ExperimentKind::Xi, extra).is_err());
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# top\n[experiment]\nseed = 7 # trailing\n\n[fpp]\nn_list = 8, 16\n";
        let cfg = ExperimentConfig::parse(ExperimentKind::Xi, text).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.fpp.n_list, vec![8, 16]);
    }
}
