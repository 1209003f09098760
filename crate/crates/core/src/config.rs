//! Run configuration: a flat `key = value` file, overridden by command-line flags.

use std::path::PathBuf;

use thiserror::Error;

use crate::local_arith::is_prime;
use crate::report::Format;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SuiteName {
    Symbolic,
    Census,
    Relations,
    Family,
    Distribution,
    NormFamily,
}

impl SuiteName {
    pub const ALL: [SuiteName; 6] = [
        SuiteName::Symbolic,
        SuiteName::Census,
        SuiteName::Relations,
        SuiteName::Family,
        SuiteName::Distribution,
        SuiteName::NormFamily,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteName::Symbolic => "symbolic",
            SuiteName::Census => "census",
            SuiteName::Relations => "relations",
            SuiteName::Family => "family",
            SuiteName::Distribution => "distribution",
            SuiteName::NormFamily => "norm-family",
        }
    }

    pub fn parse(s: &str) -> Option<SuiteName> {
        SuiteName::ALL.into_iter().find(|x| x.name() == s)
    }

    pub fn needs_lattices(self) -> bool {
        self != SuiteName::Symbolic
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VariantSel {
    Short,
    Full,
    Both,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub q: u64,
    /// None means 2 * radius + 6
    pub precision: Option<u32>,
    pub radius: u32,
    /// base level of the distribution relation
    pub n: u32,
    /// last index of the canonical family checked by the family suite
    pub n_max: u32,
    pub variant: VariantSel,
    pub seed: u64,
    /// interior sample vertices per factor for the relation suite; None picks 50, or 3 at q = 5
    pub samples: Option<usize>,
    pub norm_levels: Vec<u32>,
    /// integer roots for the norm family; None picks 1 and q^6
    pub betas: Option<Vec<i128>>,
    pub suites: Vec<SuiteName>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            q: 2,
            precision: None,
            radius: 13,
            n: 6,
            n_max: 4,
            variant: VariantSel::Both,
            seed: 1,
            samples: None,
            norm_levels: vec![7, 8],
            betas: None,
            suites: SuiteName::ALL.to_vec(),
            format: Format::Markdown,
            out: None,
        }
    }
}

pub const LATTICE_PRIMES: [u64; 3] = [2, 3, 5];

impl RunConfig {
    pub fn precision(&self) -> u32 {
        self.precision.unwrap_or(2 * self.radius + 6)
    }

    /// Each relation sample touches about q^8 vertices, so q = 5 gets few samples.
    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(if self.q >= 5 { 3 } else { 50 })
    }

    pub fn betas(&self) -> Vec<i128> {
        self.betas.clone().unwrap_or_else(|| vec![(self.q as i128).pow(6), 1])
    }

    /// Warnings that do not stop a run.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.precision() < 2 * self.radius + 6 {
            w.push(format!(
                "precision {} is below 2R+6 = {}; deep vertices may raise PrecisionExhausted",
                self.precision(),
                2 * self.radius + 6
            ));
        }
        w
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.suites.iter().any(|s| s.needs_lattices()) && !LATTICE_PRIMES.contains(&self.q) {
            return Err(ConfigError::Invalid(format!(
                "q = {} is not supported by the lattice suites; use one of {:?}",
                self.q, LATTICE_PRIMES
            )));
        }
        if !is_prime(self.q) {
            return Err(ConfigError::Invalid(format!("q = {} is not prime", self.q)));
        }
        if self.radius == 0 {
            return Err(ConfigError::Invalid("radius must be positive".into()));
        }
        if self.samples() == 0 {
            return Err(ConfigError::Invalid("samples must be positive".into()));
        }
        Ok(())
    }

    /// Apply `key = value` lines. Blank lines and lines starting with '#' are skipped.
    pub fn apply_file(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim_start();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let indent = raw.len() - trimmed.len();
            let Some(eq) = raw.find('=') else {
                return Err(ConfigError::Parse { line, column: indent + 1, message: "expected key = value".into() });
            };
            let key = raw[..eq].trim();
            let value_start = eq + 1 + (raw[eq + 1..].len() - raw[eq + 1..].trim_start().len());
            let value = raw[eq + 1..].trim();
            if key.is_empty() {
                return Err(ConfigError::Parse { line, column: indent + 1, message: "empty key".into() });
            }
            self.set(key, value).map_err(|message| {
                let column = if message.starts_with("unknown key") { indent + 1 } else { value_start + 1 };
                ConfigError::Parse { line, column, message }
            })?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
            v.parse().map_err(|_| format!("invalid value {v:?} for {key}"))
        }
        fn list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>, String> {
            v.split(',').map(|x| num(key, x.trim())).collect()
        }
        match key {
            "q" | "p" => self.q = num(key, value)?,
            "precision" => self.precision = Some(num(key, value)?),
            "radius" => self.radius = num(key, value)?,
            "n" => self.n = num(key, value)?,
            "n_max" => self.n_max = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "samples" => self.samples = Some(num(key, value)?),
            "norm_levels" => self.norm_levels = list(key, value)?,
            "betas" => self.betas = Some(list(key, value)?),
            "variant" => {
                self.variant = match value {
                    "short" => VariantSel::Short,
                    "full" => VariantSel::Full,
                    "both" => VariantSel::Both,
                    _ => return Err(format!("variant must be short, full or both, got {value:?}")),
                }
            }
            "format" => {
                self.format = match value {
                    "json" => Format::Json,
                    "markdown" | "md" => Format::Markdown,
                    _ => return Err(format!("format must be json or markdown, got {value:?}")),
                }
            }
            "out" => self.out = Some(PathBuf::from(value)),
            "suites" => {
                let mut v = Vec::new();
                for s in value.split(',') {
                    v.push(SuiteName::parse(s.trim()).ok_or_else(|| format!("unknown suite {:?}", s.trim()))?);
                }
                v.sort();
                v.dedup();
                self.suites = v;
            }
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }
}
