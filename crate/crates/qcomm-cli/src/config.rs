//! Run settings. Each value is taken from the command line if given, then
//! from the TOML config file, then from the defaults below. Config keys are
//! the flag names without the leading dashes.

use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Every knob as an optional value, so flag and file layers can be merged.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Overrides {
    /// Problem size: columns of A, set universe, or table length.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Rows of A for random regression instances (defaults to n).
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Number of players in coordinator instances.
    #[arg(long, global = true)]
    pub r: Option<usize>,
    #[arg(long, global = true)]
    pub kappa_target: Option<f64>,
    /// Target accuracy for the approximate protocols.
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Inversion threshold for coordinator protocols (defaults to the smallest singular value).
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub protocol: Option<String>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Evolution time for generated Hamiltonian instances.
    #[arg(long, global = true)]
    pub time: Option<f64>,
    /// Sum of the Hamiltonian parts' operator norms.
    #[arg(long, global = true)]
    pub norm_budget: Option<f64>,
    /// Size of the common part of generated set instances.
    #[arg(long, global = true)]
    pub overlap: Option<usize>,
    /// SQ counterexample variant, 1 or 2.
    #[arg(long, global = true)]
    pub variant: Option<u8>,
    /// postselect or repeat, for the one-way regression protocols.
    #[arg(long, global = true)]
    pub mode: Option<String>,
    /// bob-to-alice, alice-to-bob or two-way.
    #[arg(long, global = true)]
    pub direction: Option<String>,
    /// known or oblivious amplification schedule for case3.
    #[arg(long, global = true)]
    pub schedule: Option<String>,
    /// Draw budget for sq-demo (defaults to 10 n).
    #[arg(long, global = true)]
    pub draws: Option<usize>,
}

impl Overrides {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        Self::from_toml(&text)
    }

    /// Fills every unset field from `lower`.
    pub fn over(self, lower: Overrides) -> Overrides {
        Overrides {
            n: self.n.or(lower.n),
            m: self.m.or(lower.m),
            r: self.r.or(lower.r),
            kappa_target: self.kappa_target.or(lower.kappa_target),
            eps: self.eps.or(lower.eps),
            delta: self.delta.or(lower.delta),
            seed: self.seed.or(lower.seed),
            protocol: self.protocol.or(lower.protocol),
            out: self.out.or(lower.out),
            time: self.time.or(lower.time),
            norm_budget: self.norm_budget.or(lower.norm_budget),
            overlap: self.overlap.or(lower.overlap),
            variant: self.variant.or(lower.variant),
            mode: self.mode.or(lower.mode),
            direction: self.direction.or(lower.direction),
            schedule: self.schedule.or(lower.schedule),
            draws: self.draws.or(lower.draws),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionChoice {
    BobToAlice,
    AliceToBob,
    TwoWay,
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub n: usize,
    pub m: Option<usize>,
    pub r: usize,
    pub kappa_target: f64,
    pub eps: f64,
    pub delta: Option<f64>,
    pub seed: u64,
    pub protocol: Option<String>,
    pub out: Option<PathBuf>,
    pub time: f64,
    pub norm_budget: f64,
    pub overlap: usize,
    pub variant: u8,
    pub repeat: bool,
    pub direction: DirectionChoice,
    pub oblivious: bool,
    pub draws: Option<usize>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            n: 8,
            m: None,
            r: 2,
            kappa_target: 4.0,
            eps: 1e-3,
            delta: None,
            seed: 0,
            protocol: None,
            out: None,
            time: 1.0,
            norm_budget: 2.0,
            overlap: 1,
            variant: 2,
            repeat: false,
            direction: DirectionChoice::BobToAlice,
            oblivious: false,
            draws: None,
        }
    }
}

impl Settings {
    pub fn resolve(o: Overrides) -> Result<Self, CliError> {
        let d = Settings::default();
        let bad = |msg: String| Err(CliError::Config(msg));
        let s = Settings {
            n: o.n.unwrap_or(d.n),
            m: o.m,
            r: o.r.unwrap_or(d.r),
            kappa_target: o.kappa_target.unwrap_or(d.kappa_target),
            eps: o.eps.unwrap_or(d.eps),
            delta: o.delta,
            seed: o.seed.unwrap_or(d.seed),
            protocol: o.protocol,
            out: o.out,
            time: o.time.unwrap_or(d.time),
            norm_budget: o.norm_budget.unwrap_or(d.norm_budget),
            overlap: o.overlap.unwrap_or(d.overlap),
            variant: o.variant.unwrap_or(d.variant),
            repeat: match o.mode.as_deref() {
                None | Some("postselect") => false,
                Some("repeat") => true,
                Some(other) => return bad(format!("mode must be postselect or repeat, got {other:?}")),
            },
            direction: match o.direction.as_deref() {
                None | Some("bob-to-alice") => DirectionChoice::BobToAlice,
                Some("alice-to-bob") => DirectionChoice::AliceToBob,
                Some("two-way") => DirectionChoice::TwoWay,
                Some(other) => return bad(format!("unknown direction {other:?}")),
            },
            oblivious: match o.schedule.as_deref() {
                None | Some("known") => false,
                Some("oblivious") => true,
                Some(other) => return bad(format!("schedule must be known or oblivious, got {other:?}")),
            },
            draws: o.draws,
        };
        if s.n == 0 || s.r == 0 || s.m == Some(0) {
            return bad("n, m and r must be positive".into());
        }
        if !(s.kappa_target >= 1.0 && s.kappa_target.is_finite()) {
            return bad(format!("kappa-target = {} must be at least 1", s.kappa_target));
        }
        if !(s.eps > 0.0 && s.eps < 0.5) {
            return bad(format!("eps = {} not in (0, 1/2)", s.eps));
        }
        if let Some(delta) = s.delta {
            if !(delta > 0.0 && delta <= 1.0) {
                return bad(format!("delta = {delta} not in (0, 1]"));
            }
        }
        if !s.time.is_finite() || !(s.norm_budget >= 0.0 && s.norm_budget.is_finite()) {
            return bad("time and norm-budget must be finite, norm-budget nonnegative".into());
        }
        if s.variant != 1 && s.variant != 2 {
            return bad(format!("variant must be 1 or 2, got {}", s.variant));
        }
        Ok(s)
    }

    /// A copy with one grid parameter replaced; names match the flags.
    pub fn with_param(&self, name: &str, value: &str) -> Result<Settings, CliError> {
        let bad = || CliError::Config(format!("bad value {value:?} for {name}"));
        let mut s = self.clone();
        match name {
            "n" => s.n = value.parse().map_err(|_| bad())?,
            "m" => s.m = Some(value.parse().map_err(|_| bad())?),
            "r" => s.r = value.parse().map_err(|_| bad())?,
            "kappa-target" => s.kappa_target = value.parse().map_err(|_| bad())?,
            "eps" => s.eps = value.parse().map_err(|_| bad())?,
            "delta" => s.delta = Some(value.parse().map_err(|_| bad())?),
            "seed" => s.seed = value.parse().map_err(|_| bad())?,
            "time" => s.time = value.parse().map_err(|_| bad())?,
            "norm-budget" => s.norm_budget = value.parse().map_err(|_| bad())?,
            "overlap" => s.overlap = value.parse().map_err(|_| bad())?,
            _ => return Err(CliError::Config(format!("{name} cannot be swept"))),
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file = Overrides::from_toml("n = 16\neps = 0.01\nkappa-target = 8.0\n").unwrap();
        let flags = Overrides { n: Some(4), ..Overrides::default() };
        let s = Settings::resolve(flags.over(file)).unwrap();
        assert_eq!(s.n, 4);
        assert_eq!(s.eps, 0.01);
        assert_eq!(s.kappa_target, 8.0);
        assert_eq!(s.r, Settings::default().r);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(Overrides::from_toml("kappa = 3.0").is_err());
        assert!(Overrides::from_toml("n = -1").is_err());
        let o = Overrides { eps: Some(0.7), ..Overrides::default() };
        assert!(Settings::resolve(o).is_err());
        let o = Overrides { mode: Some("sometimes".into()), ..Overrides::default() };
        assert!(Settings::resolve(o).is_err());
    }

    #[test]
    fn grid_params_use_flag_names() {
        let s = Settings::default();
        assert_eq!(s.with_param("kappa-target", "8").unwrap().kappa_target, 8.0);
        assert!(s.with_param("protocol", "case1").is_err());
        assert!(s.with_param("n", "x").is_err());
    }
}
