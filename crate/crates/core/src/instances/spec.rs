use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use super::InstanceError;

/// Textual instance description, e.g. `dag:n=100,p=0.2` or `file:road.gr`.
#[derive(Clone, Debug, PartialEq)]
pub enum InstanceSpec {
    /// The four-vertex weighted example graph (undirected).
    Example,
    /// Directed path `0 -> 1 -> ... -> n-1`, unit weights.
    Chain {
        n: usize,
    },
    /// `m` random undirected edges with weights in `[1, wmax]`.
    RandGraph {
        n: usize,
        m: usize,
        wmax: u64,
    },
    /// Job DAG: durations in `[1, 80]`, each pair `i < j` an edge with probability `p`.
    Dag {
        n: usize,
        p: f64,
    },
    /// Balanced stable-marriage instance with random total-order preferences.
    Sm {
        n: usize,
    },
    Knap {
        n: usize,
        cap: u64,
        wmax: u64,
        vmax: u64,
    },
    Reduce {
        n: usize,
    },
    /// Closure input: same edge rule as `dag`, without durations.
    ClosureDag {
        n: usize,
        p: f64,
    },
    File {
        path: PathBuf,
    },
}

pub(crate) const DEFAULT_WMAX: u64 = 100;
pub(crate) const DEFAULT_VMAX: u64 = 100;
pub(crate) const DEFAULT_EDGE_PROBABILITY: f64 = 0.2;

impl InstanceSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            InstanceSpec::Example => "example",
            InstanceSpec::Chain { .. } => "chain",
            InstanceSpec::RandGraph { .. } => "randgraph",
            InstanceSpec::Dag { .. } => "dag",
            InstanceSpec::Sm { .. } => "sm",
            InstanceSpec::Knap { .. } => "knap",
            InstanceSpec::Reduce { .. } => "reduce",
            InstanceSpec::ClosureDag { .. } => "closuredag",
            InstanceSpec::File { .. } => "file",
        }
    }
}

struct Params<'a> {
    spec: &'a str,
    values: HashMap<&'a str, &'a str>,
}

impl<'a> Params<'a> {
    fn parse(spec: &'a str, body: &'a str, allowed: &[&str]) -> Result<Self, InstanceError> {
        let mut values = HashMap::new();
        for pair in body.split(',').filter(|p| !p.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| parse_error(spec, format!("expected key=value, got '{pair}'")))?;
            let key = key.trim();
            if !allowed.contains(&key) {
                return Err(parse_error(spec, format!("unknown parameter '{key}'")));
            }
            if values.insert(key, value.trim()).is_some() {
                return Err(parse_error(spec, format!("duplicate parameter '{key}'")));
            }
        }
        Ok(Params { spec, values })
    }

    fn get<T: FromStr>(&self, key: &str, default: Option<T>) -> Result<T, InstanceError> {
        match self.values.get(key) {
            Some(raw) => raw
                .parse()
                .map_err(|_| parse_error(self.spec, format!("bad value for '{key}': '{raw}'"))),
            None => default.ok_or_else(|| parse_error(self.spec, format!("missing '{key}'"))),
        }
    }
}

fn parse_error(spec: &str, reason: impl Into<String>) -> InstanceError {
    InstanceError::Parse {
        spec: spec.to_string(),
        reason: reason.into(),
    }
}

impl FromStr for InstanceSpec {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (kind, body) = s.split_once(':').unwrap_or((s, ""));
        let spec = match kind {
            "example" => InstanceSpec::Example,
            "chain" => {
                let n = match body.strip_prefix("n=") {
                    Some(v) => v,
                    None => body,
                };
                InstanceSpec::Chain {
                    n: n.parse()
                        .map_err(|_| parse_error(s, "chain needs a vertex count"))?,
                }
            }
            "randgraph" => {
                let p = Params::parse(s, body, &["n", "m", "wmax"])?;
                InstanceSpec::RandGraph {
                    n: p.get("n", None)?,
                    m: p.get("m", None)?,
                    wmax: p.get("wmax", Some(DEFAULT_WMAX))?,
                }
            }
            "dag" | "closuredag" => {
                let p = Params::parse(s, body, &["n", "p"])?;
                let n = p.get("n", None)?;
                let prob = p.get("p", Some(DEFAULT_EDGE_PROBABILITY))?;
                if kind == "dag" {
                    InstanceSpec::Dag { n, p: prob }
                } else {
                    InstanceSpec::ClosureDag { n, p: prob }
                }
            }
            "sm" => {
                let p = Params::parse(s, body, &["n"])?;
                InstanceSpec::Sm {
                    n: p.get("n", None)?,
                }
            }
            "knap" => {
                let p = Params::parse(s, body, &["n", "cap", "wmax", "vmax"])?;
                InstanceSpec::Knap {
                    n: p.get("n", None)?,
                    cap: p.get("cap", None)?,
                    wmax: p.get("wmax", Some(DEFAULT_WMAX))?,
                    vmax: p.get("vmax", Some(DEFAULT_VMAX))?,
                }
            }
            "reduce" => {
                let p = Params::parse(s, body, &["n"])?;
                InstanceSpec::Reduce {
                    n: p.get("n", None)?,
                }
            }
            "file" if !body.is_empty() => InstanceSpec::File {
                path: PathBuf::from(body),
            },
            _ => return Err(parse_error(s, format!("unknown instance kind '{kind}'"))),
        };
        spec.validate().map_err(|reason| parse_error(s, reason))?;
        Ok(spec)
    }
}

impl InstanceSpec {
    fn validate(&self) -> Result<(), String> {
        let positive = |name: &str, v: u64| {
            if v == 0 {
                Err(format!("'{name}' must be positive"))
            } else {
                Ok(())
            }
        };
        let probability = |p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(format!("probability {p} outside [0, 1]"))
            }
        };
        match *self {
            InstanceSpec::Chain { n } | InstanceSpec::Sm { n } | InstanceSpec::Reduce { n } => {
                positive("n", n as u64)
            }
            InstanceSpec::RandGraph { n, wmax, .. } => {
                positive("n", n as u64)?;
                positive("wmax", wmax)
            }
            InstanceSpec::Dag { n, p } | InstanceSpec::ClosureDag { n, p } => {
                positive("n", n as u64)?;
                probability(p)
            }
            InstanceSpec::Knap { n, cap, wmax, vmax } => {
                positive("n", n as u64)?;
                positive("cap", cap)?;
                positive("wmax", wmax)?;
                positive("vmax", vmax)
            }
            InstanceSpec::Example | InstanceSpec::File { .. } => Ok(()),
        }
    }
}

impl fmt::Display for InstanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceSpec::Example => write!(f, "example"),
            InstanceSpec::Chain { n } => write!(f, "chain:{n}"),
            InstanceSpec::RandGraph { n, m, wmax } => {
                write!(f, "randgraph:n={n},m={m},wmax={wmax}")
            }
            InstanceSpec::Dag { n, p } => write!(f, "dag:n={n},p={p}"),
            InstanceSpec::Sm { n } => write!(f, "sm:n={n}"),
            InstanceSpec::Knap { n, cap, wmax, vmax } => {
                write!(f, "knap:n={n},cap={cap},wmax={wmax},vmax={vmax}")
            }
            InstanceSpec::Reduce { n } => write!(f, "reduce:n={n}"),
            InstanceSpec::ClosureDag { n, p } => write!(f, "closuredag:n={n},p={p}"),
            InstanceSpec::File { path } => write!(f, "file:{}", path.display()),
        }
    }
}
