//! Named counter configurations, their parameter checks, and the bounds
//! claimed for each.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::bounds::{k, log2, pow2, BoundKind, BoundSpec, Expr};
use crate::brgc::{Brgc, StandardBinary};
use crate::composite::{build_layered, Composite, LayerKind, PlanError};
use crate::counter::Counter;
use crate::lazy::{DoubleSpin, LayoutError, Lazy, Spin, Wine};
use crate::probe::ProbeError;
use crate::rpgc::Rpgc;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown counter {0:?}")]
    UnknownCounter(String),
    #[error("{counter} requires --{param}")]
    Missing { counter: &'static str, param: &'static str },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Probe(#[from] ProbeError),
}

/// Upper limit on the dimension of any catalog counter.
pub const MAX_DIM: usize = 4096;

/// Counter names with their parameter schemas, as shown by `list`.
pub const SCHEMAS: [(&str, &str); 8] = [
    ("binary", "--dim D (D >= 1)"),
    ("brgc", "--dim D (1 <= D <= 63)"),
    ("rpgc", "--dim D (D >= 1)"),
    ("composite", "--layers D1,D2,... (innermost first, each >= 1) [--inner rpgc|brgc]"),
    ("lazy", "--n N (power of two >= 2)"),
    ("spin", "--n N (power of two >= 2)"),
    ("doublespin", "--n N (power of two >= 2) --g G (G >= 1)"),
    ("wine", "--n N (power of two >= 2) --g G (G >= 1) [--sub brgc|rpgc]"),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "counter", rename_all = "lowercase")]
pub enum CounterConfig {
    Binary {
        dim: usize,
    },
    Brgc {
        dim: usize,
    },
    Rpgc {
        dim: usize,
    },
    Composite {
        layers: Vec<usize>,
        inner: LayerKind,
    },
    Lazy {
        n: usize,
    },
    Spin {
        n: usize,
    },
    #[serde(rename = "doublespin")]
    DoubleSpin {
        n: usize,
        g: usize,
    },
    Wine {
        n: usize,
        g: usize,
        sub: LayerKind,
    },
}

/// Raw, possibly missing, parameters as they arrive from a command line.
#[derive(Debug, Clone, Default)]
pub struct RawParams {
    pub dim: Option<usize>,
    pub n: Option<usize>,
    pub g: Option<usize>,
    pub layers: Option<Vec<usize>>,
    pub inner: Option<LayerKind>,
    pub sub: Option<LayerKind>,
}

fn need<T: Clone>(v: &Option<T>, counter: &'static str, param: &'static str) -> Result<T, ConfigError> {
    v.clone().ok_or(ConfigError::Missing { counter, param })
}

impl CounterConfig {
    pub fn from_raw(name: &str, raw: &RawParams) -> Result<Self, ConfigError> {
        let cfg = match name {
            "binary" => CounterConfig::Binary { dim: need(&raw.dim, "binary", "dim")? },
            "brgc" => CounterConfig::Brgc { dim: need(&raw.dim, "brgc", "dim")? },
            "rpgc" => CounterConfig::Rpgc { dim: need(&raw.dim, "rpgc", "dim")? },
            "composite" => CounterConfig::Composite {
                layers: need(&raw.layers, "composite", "layers")?,
                inner: raw.inner.unwrap_or(LayerKind::Rpgc),
            },
            "lazy" => CounterConfig::Lazy { n: need(&raw.n, "lazy", "n")? },
            "spin" => CounterConfig::Spin { n: need(&raw.n, "spin", "n")? },
            "doublespin" => {
                CounterConfig::DoubleSpin { n: need(&raw.n, "doublespin", "n")?, g: need(&raw.g, "doublespin", "g")? }
            }
            "wine" => CounterConfig::Wine {
                n: need(&raw.n, "wine", "n")?,
                g: need(&raw.g, "wine", "g")?,
                sub: raw.sub.unwrap_or(LayerKind::Brgc),
            },
            other => return Err(ConfigError::UnknownCounter(other.into())),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn name(&self) -> &'static str {
        match self {
            CounterConfig::Binary { .. } => "binary",
            CounterConfig::Brgc { .. } => "brgc",
            CounterConfig::Rpgc { .. } => "rpgc",
            CounterConfig::Composite { .. } => "composite",
            CounterConfig::Lazy { .. } => "lazy",
            CounterConfig::Spin { .. } => "spin",
            CounterConfig::DoubleSpin { .. } => "doublespin",
            CounterConfig::Wine { .. } => "wine",
        }
    }

    /// Checks parameters without building anything expensive.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let pow2_n = |n: usize| {
            if n >= 2 && n.is_power_of_two() && n <= MAX_DIM {
                Ok(())
            } else {
                Err(ConfigError::Layout(LayoutError::BadN(n)))
            }
        };
        let g_ok = |g: usize| {
            if (1..=32).contains(&g) {
                Ok(())
            } else {
                Err(ConfigError::Invalid(format!("g must be in 1..=32, got {g}")))
            }
        };
        match self {
            CounterConfig::Binary { dim } | CounterConfig::Rpgc { dim } => {
                if *dim == 0 || *dim > MAX_DIM {
                    return Err(ConfigError::Invalid(format!("dim must be in 1..={MAX_DIM}, got {dim}")));
                }
            }
            CounterConfig::Brgc { dim } => {
                if *dim == 0 || *dim > 63 {
                    return Err(ConfigError::Invalid(format!("brgc dim must be in 1..=63, got {dim}")));
                }
            }
            CounterConfig::Composite { layers, .. } => {
                if layers.is_empty() {
                    return Err(PlanError::Empty.into());
                }
                if layers.contains(&0) {
                    return Err(PlanError::ZeroDim.into());
                }
                if layers.iter().sum::<usize>() > MAX_DIM {
                    return Err(ConfigError::Invalid(format!("total dim exceeds {MAX_DIM}")));
                }
            }
            CounterConfig::Lazy { n } | CounterConfig::Spin { n } => pow2_n(*n)?,
            CounterConfig::DoubleSpin { n, g } => {
                pow2_n(*n)?;
                g_ok(*g)?;
            }
            CounterConfig::Wine { n, g, .. } => {
                pow2_n(*n)?;
                g_ok(*g)?;
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<Box<dyn Counter>, ConfigError> {
        self.validate()?;
        Ok(match self {
            CounterConfig::Binary { dim } => Box::new(StandardBinary::new(*dim)?),
            CounterConfig::Brgc { dim } => Box::new(Brgc::new(*dim)?),
            CounterConfig::Rpgc { dim } => Box::new(Rpgc::new(*dim)?),
            CounterConfig::Composite { layers, inner } => Box::new(Composite::new(build_layered(layers, *inner)?)),
            CounterConfig::Lazy { n } => Box::new(Lazy::new(*n)?),
            CounterConfig::Spin { n } => Box::new(Spin::new(*n)?),
            CounterConfig::DoubleSpin { n, g } => Box::new(DoubleSpin::new(*n, *g)?),
            CounterConfig::Wine { n, g, sub } => Box::new(Wine::with_codes(*n, *g, *sub, *sub)?),
        })
    }

    pub fn dim(&self) -> usize {
        let lazy = |n: usize, g: usize| n + n.trailing_zeros() as usize + g;
        match self {
            CounterConfig::Binary { dim } | CounterConfig::Brgc { dim } | CounterConfig::Rpgc { dim } => *dim,
            CounterConfig::Composite { layers, .. } => layers.iter().sum(),
            CounterConfig::Lazy { n } => lazy(*n, 0),
            CounterConfig::Spin { n } => lazy(*n, 1),
            CounterConfig::DoubleSpin { n, g } | CounterConfig::Wine { n, g, .. } => lazy(*n, *g),
        }
    }

    /// The claimed bound on bits changed per step.
    pub fn claimed_c(&self) -> usize {
        let log = |n: usize| n.trailing_zeros() as usize;
        match self {
            CounterConfig::Binary { dim } => *dim,
            CounterConfig::Brgc { .. } | CounterConfig::Rpgc { .. } => 1,
            CounterConfig::Composite { layers, .. } => layers.len(),
            CounterConfig::Lazy { n } => log(*n) + 1,
            CounterConfig::Spin { n } => log(*n) + 2,
            CounterConfig::DoubleSpin { n, g } => g + log(*n) + 1,
            CounterConfig::Wine { .. } => 3,
        }
    }

    /// Claimed bounds for this configuration. Length formulas that are
    /// known to disagree with enumeration are marked disputed.
    pub fn claimed_bounds(&self) -> Vec<BoundSpec> {
        use BoundKind::*;
        let b = BoundSpec::new;
        let kn = |v: usize| k(v as i64);
        match self {
            CounterConfig::Binary { dim } => {
                let avg = k(2) - pow2(k(1) - kn(*dim));
                vec![
                    b(LengthExact, pow2(kn(*dim)), "standard binary: all 2^d strings"),
                    b(AvgReadsExact, avg.clone(), "folklore: average 2 - 2^(1-d)"),
                    b(AvgWritesExact, avg, "folklore: average 2 - 2^(1-d)"),
                    b(WorstReadsLe, kn(*dim), "folklore: worst case d"),
                    b(WorstWritesLe, kn(*dim), "folklore: worst case d"),
                ]
            }
            CounterConfig::Brgc { dim } => vec![
                b(LengthExact, pow2(kn(*dim)), "reflected Gray code: all 2^d strings"),
                b(AvgReadsExact, kn(*dim), "reflected Gray code: reads d"),
                b(WorstReadsLe, kn(*dim), "reflected Gray code: reads d"),
                b(WorstWritesLe, k(1), "Gray code: writes 1"),
                b(HammingLe, k(1), "Gray code: consecutive strings differ in 1 bit"),
            ],
            CounterConfig::Rpgc { dim } => {
                let d = kn(*dim);
                let mut v = vec![
                    b(LengthExact, pow2(d.clone()), "recursive partition code: length 2^d"),
                    b(WorstReadsLe, d.clone(), "recursive partition code: worst reads d"),
                    b(WorstWritesLe, k(1), "recursive partition code: writes 1"),
                    b(HammingLe, k(1), "recursive partition code: Gray code"),
                ];
                if *dim >= 2 {
                    v.push(b(AvgReadsLe, k(6) * log2(d.clone()), "recursive partition code: average 6 log d"));
                }
                if *dim >= 2 && dim.is_power_of_two() {
                    v.push(b(AvgReadsLe, k(4) * log2(d), "power-of-two recursive partition code: average 4 log d"));
                }
                v
            }
            CounterConfig::Composite { layers, .. } => {
                let total: usize = layers.iter().sum();
                vec![
                    b(LengthExact, pow2(kn(total)), "layered composite: space-optimal"),
                    b(WorstReadsLe, kn(total), "layered composite: worst reads d"),
                    b(WorstWritesLe, kn(layers.len()), "layered composite: writes at most one bit per layer"),
                ]
            }
            CounterConfig::Lazy { n } => {
                let logn = log2(kn(*n));
                vec![
                    b(LengthExact, pow2(kn(*n + 1)) - k(2), "lazy increment: 2^(n+1) - 2"),
                    b(WorstReadsLe, logn.clone() + k(1), "lazy increment: worst reads log n + 1"),
                    b(WorstWritesLe, logn + k(1), "lazy increment: worst writes log n + 1"),
                    b(AvgReadsLe, k(3), "lazy increment: average reads 3"),
                    b(AvgWritesLe, k(3), "lazy increment: average writes 3"),
                ]
            }
            CounterConfig::Spin { n } => {
                let (nn, logn) = (kn(*n), log2(kn(*n)));
                vec![
                    b(
                        LengthExact,
                        (nn.clone() + k(1)) * (pow2(nn.clone()) - k(1)),
                        "spin increment statement: (n+1)(2^n - 1)",
                    )
                    .disputed(),
                    b(LengthExact, (nn.clone() + k(1)) * pow2(nn) - k(2), "spin increment proof: (n+1)2^n - 2")
                        .disputed(),
                    b(WorstReadsLe, logn.clone() + k(2), "spin increment: worst reads log n + 2"),
                    b(WorstWritesLe, logn + k(2), "spin increment: worst writes log n + 2"),
                    b(AvgReadsLe, k(4), "spin increment: average reads at most 4"),
                ]
            }
            CounterConfig::DoubleSpin { n, g } => {
                let (nn, gg, logn) = (kn(*n), kn(*g), log2(kn(*n)));
                let worst = gg.clone() + logn + k(1);
                vec![
                    b(
                        LengthExact,
                        nn.clone() * pow2(nn.clone()) * pow2(gg.clone()) - (nn.clone() - k(1)) * pow2(nn) - k(2),
                        "double spin proof: n 2^n 2^g - (n-1) 2^n - 2",
                    )
                    .disputed(),
                    b(WorstReadsLe, worst.clone(), "double spin: worst reads g + log n + 1"),
                    b(WorstWritesLe, worst, "double spin: worst writes g + log n + 1"),
                    b(EfficiencyGe, efficiency_floor(gg), "space efficiency 1 - O(2^-g), constant 4"),
                ]
            }
            CounterConfig::Wine { n, g, .. } => {
                let (nn, gg, logn) = (kn(*n), kn(*g), log2(kn(*n)));
                vec![
                    b(
                        LengthExact,
                        nn.clone() * pow2(nn.clone()) * pow2(gg.clone()) - (nn.clone() + k(1)) * pow2(nn.clone()) + nn,
                        "wine proof: n 2^n 2^g - (n+1) 2^n + n",
                    )
                    .disputed(),
                    b(WorstReadsLe, gg.clone() + logn + k(1), "wine: worst reads g + log n + 1"),
                    b(WorstWritesLe, k(3), "wine: worst writes 3"),
                    b(EfficiencyGe, efficiency_floor(gg), "space efficiency 1 - O(2^-g), constant 4"),
                ]
            }
        }
    }

    /// Sort key: counter name, then numeric parameters.
    pub fn key(&self) -> (&'static str, Vec<usize>) {
        let params = match self {
            CounterConfig::Binary { dim } | CounterConfig::Brgc { dim } | CounterConfig::Rpgc { dim } => vec![*dim],
            CounterConfig::Composite { layers, inner } => {
                let mut v = vec![*inner as usize];
                v.extend(layers);
                v
            }
            CounterConfig::Lazy { n } | CounterConfig::Spin { n } => vec![*n],
            CounterConfig::DoubleSpin { n, g } => vec![*n, *g],
            CounterConfig::Wine { n, g, sub } => vec![*n, *g, *sub as usize],
        };
        (self.name(), params)
    }
}

/// `1 - 2^(2-g)`.
fn efficiency_floor(g: Expr) -> Expr {
    k(1) - pow2(k(2) - g)
}

impl fmt::Display for CounterConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CounterConfig::Binary { dim } | CounterConfig::Brgc { dim } | CounterConfig::Rpgc { dim } => {
                write!(f, "{} dim={dim}", self.name())
            }
            CounterConfig::Composite { layers, inner } => {
                let l: Vec<String> = layers.iter().map(|d| d.to_string()).collect();
                write!(f, "composite layers={} inner={inner}", l.join(","))
            }
            CounterConfig::Lazy { n } | CounterConfig::Spin { n } => write!(f, "{} n={n}", self.name()),
            CounterConfig::DoubleSpin { n, g } => write!(f, "doublespin n={n} g={g}"),
            CounterConfig::Wine { n, g, sub } => write!(f, "wine n={n} g={g} sub={sub}"),
        }
    }
}

/// The reflected Gray code sequences of dimensions 1 to 3, most significant
/// bit first.
pub const BRGC_GOLDEN: [&[&str]; 3] =
    [&["0", "1"], &["00", "01", "11", "10"], &["000", "001", "011", "010", "110", "111", "101", "100"]];
