//! Job configuration documents.

use std::fmt;
use std::path::{Path, PathBuf};

use diwt::quad::{Precision, QuadSpec};
use diwt::specfun::ComplexIndex;
use diwt::transforms::PsiSpec;
use diwt::kernels::KernelKind;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::failure::Failure;

/// A real number given either as a JSON number or as a decimal string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct NumVisitor;

        impl Visitor<'_> for NumVisitor {
            type Value = Num;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a decimal string")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
                Ok(Num(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
                v.trim()
                    .parse::<f64>()
                    .map(Num)
                    .map_err(|_| E::custom(format!("not a decimal number: {v:?}")))
            }
        }

        deserializer.deserialize_any(NumVisitor)
    }
}

fn nums(values: &[Num]) -> Vec<f64> {
    values.iter().map(|v| v.0).collect()
}

/// A kernel index, either a real number or `{"re": .., "im": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IndexSpec {
    Real(Num),
    Complex { re: Num, im: Num },
}

impl IndexSpec {
    pub fn to_index(self) -> ComplexIndex {
        match self {
            IndexSpec::Real(re) => ComplexIndex::real(re.0),
            IndexSpec::Complex { re, im } => ComplexIndex::new(re.0, im.0),
        }
    }
}

/// Tabulated values of a function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Samples {
    pub x: Vec<Num>,
    pub f: Vec<Num>,
}

/// Kernel table request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub kind: KernelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Num>,
    pub indices: Vec<IndexSpec>,
    pub grid: Vec<Num>,
}

/// Every input a command can take. Commands read the fields they need
/// and reject documents missing them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<Precision>,
    /// Full quadrature settings; `precision` overrides its precision field.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad: Option<QuadSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// a_1, a_2, …
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<Vec<Num>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<PsiSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Samples>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_grid: Option<Vec<Num>>,
    /// Inclusive range [first, last] of indices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_range: Option<[u32; 2]>,
    /// Number of synthesis terms built from `psi`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        serde_json::from_str(text).map_err(|e| Failure::Usage(format!("invalid config: {e}")))
    }

    pub fn mu(&self) -> f64 {
        self.mu.map_or(0.0, |v| v.0)
    }

    pub fn delta(&self) -> f64 {
        self.delta.map_or(0.0, |v| v.0)
    }

    pub fn quad(&self) -> QuadSpec {
        match (self.quad, self.precision) {
            (Some(q), Some(p)) => QuadSpec { precision: p, ..q },
            (Some(q), None) => q,
            (None, p) => QuadSpec::for_precision(p.unwrap_or(Precision::Double)),
        }
    }

    pub fn sequence(&self) -> Option<Vec<f64>> {
        self.sequence.as_deref().map(nums)
    }

    pub fn x_grid(&self) -> Option<Vec<f64>> {
        self.x_grid.as_deref().map(nums)
    }

    pub fn samples(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        self.samples.as_ref().map(|s| (nums(&s.x), nums(&s.f)))
    }

    /// Indices of `n_range`, or 1..=`default_last` when absent.
    pub fn indices(&self, default_last: u32) -> Result<Vec<u32>, Failure> {
        match self.n_range {
            Some([a, b]) if a >= 1 && a <= b => Ok((a..=b).collect()),
            Some([a, b]) => Err(Failure::Usage(format!("invalid n_range [{a}, {b}]"))),
            None => Ok((1..=default_last).collect()),
        }
    }

    pub fn require_x_grid(&self) -> Result<Vec<f64>, Failure> {
        self.x_grid()
            .ok_or_else(|| Failure::Usage("config needs x_grid".into()))
    }
}

impl KernelConfig {
    pub fn mu(&self) -> f64 {
        self.mu.map_or(0.0, |v| v.0)
    }

    pub fn indices(&self) -> Vec<ComplexIndex> {
        self.indices.iter().map(|i| i.to_index()).collect()
    }

    pub fn grid(&self) -> Vec<f64> {
        nums(&self.grid)
    }
}
