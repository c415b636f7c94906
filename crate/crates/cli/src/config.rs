//! Flat `key = value` scenario files.
//!
//! ```text
//! # comments start with '#'
//! name = sphere
//! dim = 2
//! h11 = 1 + t^2
//! phi.2.2 = sin(x1)^2        # 1-based; lower triangle suffices, identity elsewhere
//! connection = berwald       # berwald | custom | random
//! seed = 7
//! points = 100
//! tol = 1e-9                 # or abs_tol / rel_tol separately
//! domain.x1 = 0.3, 2.8
//! tasks = expectations, ricci, bianchi, general
//! ```
//!
//! A `custom` connection reads `G.k.i`, `L.k.i.j`, `C.k.i.j` (missing
//! components are 0) and either `nlc = canonical` or explicit `M.j` / `N.j.i`.
//! A `random` connection reads `random.seed`.

use std::collections::BTreeMap;

use jetcartan::identities::{Domain, DEFAULT_TOL};
use serde::Serialize;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    HNormal,
    Oracle,
    Expectations,
    Ricci,
    Deflection,
    Bianchi,
    General,
}

impl Task {
    /// Dependency order.
    pub const ALL: [Task; 7] =
        [Task::HNormal, Task::Oracle, Task::Expectations, Task::Ricci, Task::Deflection, Task::Bianchi, Task::General];

    pub fn name(self) -> &'static str {
        match self {
            Task::HNormal => "h-normal",
            Task::Oracle => "oracle",
            Task::Expectations => "expectations",
            Task::Ricci => "ricci",
            Task::Deflection => "deflection",
            Task::Bianchi => "bianchi",
            Task::General => "general",
        }
    }

    pub fn from_name(s: &str) -> Option<Task> {
        Task::ALL.into_iter().find(|t| t.name() == s)
    }
}

/// An expression string with the config line it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Src {
    pub line: usize,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NlcSpec {
    Canonical,
    /// `m[j]`, `n[(j, i)]`, 0-based; missing entries are 0.
    Explicit {
        m: BTreeMap<usize, Src>,
        n: BTreeMap<(usize, usize), Src>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConnectionSpec {
    Berwald,
    /// Components keyed by 0-based index, `G` as `[k, i]`, `L` and `C` as `[k, i, j]`.
    Custom {
        g: BTreeMap<Vec<usize>, Src>,
        l: BTreeMap<Vec<usize>, Src>,
        c: BTreeMap<Vec<usize>, Src>,
        nlc: NlcSpec,
    },
    Random {
        seed: u64,
    },
}

impl ConnectionSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ConnectionSpec::Berwald => "berwald",
            ConnectionSpec::Custom { .. } => "custom",
            ConnectionSpec::Random { .. } => "random",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub dim: usize,
    pub h11: Src,
    /// 0-based `(i, j)` entries as written.
    pub phi: BTreeMap<(usize, usize), Src>,
    pub connection: ConnectionSpec,
    pub seed: u64,
    pub points: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub domain: Domain,
    /// Sorted into dependency order, no repeats.
    pub tasks: Vec<Task>,
    /// Random vector fields for the Ricci identities.
    pub fields: usize,
}

pub const DEFAULT_POINTS: usize = 50;
pub const DEFAULT_FIELDS: usize = 5;

impl ScenarioConfig {
    /// Every task that applies to the connection kind.
    pub fn default_tasks(connection: &ConnectionSpec) -> Vec<Task> {
        Task::ALL.into_iter().filter(|&t| t != Task::Expectations || *connection == ConnectionSpec::Berwald).collect()
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, CliError> {
    v.trim().parse().map_err(|_| CliError::config(line, format!("`{key}` has invalid value `{v}`")))
}

fn parse_range(line: usize, key: &str, v: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = v.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::config(line, format!("`{key}` needs `lo, hi`")));
    }
    let lo: f64 = parse_num(line, key, parts[0])?;
    let hi: f64 = parse_num(line, key, parts[1])?;
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(CliError::config(line, format!("`{key}` has lo > hi")));
    }
    Ok((lo, hi))
}

/// 1-based dotted indices after `prefix`, converted to 0-based.
fn indices(line: usize, key: &str, rest: &str, count: usize, n: usize) -> Result<Vec<usize>, CliError> {
    let parts: Vec<&str> = rest.split('.').collect();
    if parts.len() != count {
        return Err(CliError::config(line, format!("`{key}` needs {count} indices")));
    }
    parts
        .iter()
        .map(|p| match p.parse::<usize>() {
            Ok(k) if (1..=n).contains(&k) => Ok(k - 1),
            _ => Err(CliError::config(line, format!("`{key}`: index `{p}` not in 1..={n}"))),
        })
        .collect()
}

fn parse_tasks(line: usize, v: &str) -> Result<Option<Vec<Task>>, CliError> {
    if v.trim() == "all" {
        return Ok(None);
    }
    let mut tasks = Vec::new();
    for name in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let t = Task::from_name(name).ok_or_else(|| CliError::config(line, format!("unknown task `{name}`")))?;
        tasks.push(t);
    }
    if tasks.is_empty() {
        return Err(CliError::config(line, "empty task list"));
    }
    tasks.sort();
    tasks.dedup();
    Ok(Some(tasks))
}

/// Parses a scenario file.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, CliError> {
    let mut entries: Vec<(usize, String, String)> = Vec::new();
    let mut seen = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| CliError::config(line, "expected `key = value`"))?;
        let (key, value) = (key.trim().to_string(), value.trim().to_string());
        if key.is_empty() || value.is_empty() {
            return Err(CliError::config(line, "expected `key = value`"));
        }
        if let Some(prev) = seen.insert(key.clone(), line) {
            return Err(CliError::config(line, format!("`{key}` already set on line {prev}")));
        }
        entries.push((line, key, value));
    }
    let dim = match entries.iter().find(|e| e.1 == "dim") {
        Some((line, key, v)) => {
            let n: usize = parse_num(*line, key, v)?;
            if !(1..=4).contains(&n) {
                return Err(CliError::config(*line, "`dim` must be between 1 and 4"));
            }
            n
        }
        None => 2,
    };

    let mut name = "custom".to_string();
    let mut h11 = Src { line: 0, text: "1".into() };
    let mut phi = BTreeMap::new();
    let mut kind: Option<(usize, String)> = None;
    let (mut g, mut l, mut c) = (BTreeMap::new(), BTreeMap::new(), BTreeMap::new());
    let (mut m_nlc, mut n_nlc) = (BTreeMap::new(), BTreeMap::new());
    let mut nlc_mode: Option<(usize, String)> = None;
    let mut random_seed: Option<u64> = None;
    let mut seed = 0u64;
    let mut points = DEFAULT_POINTS;
    let (mut abs_tol, mut rel_tol) = (None, None);
    let mut tol = None;
    let mut domain = Domain::default();
    let mut x_all: Option<(f64, f64)> = None;
    let mut x_each: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
    let mut tasks: Option<(usize, Option<Vec<Task>>)> = None;
    let mut fields = DEFAULT_FIELDS;

    for (line, key, v) in &entries {
        let line = *line;
        let src = || Src { line, text: v.clone() };
        match key.as_str() {
            "dim" => {}
            "name" => name = v.clone(),
            "h11" => h11 = src(),
            "connection" => kind = Some((line, v.clone())),
            "nlc" => nlc_mode = Some((line, v.clone())),
            "seed" => seed = parse_num(line, key, v)?,
            "random.seed" => random_seed = Some(parse_num(line, key, v)?),
            "points" => points = parse_num(line, key, v)?,
            "fields" => fields = parse_num(line, key, v)?,
            "tol" => tol = Some(parse_num::<f64>(line, key, v)?),
            "abs_tol" => abs_tol = Some(parse_num::<f64>(line, key, v)?),
            "rel_tol" => rel_tol = Some(parse_num::<f64>(line, key, v)?),
            "domain.t" => domain.t = parse_range(line, key, v)?,
            "domain.y" => domain.y = parse_range(line, key, v)?,
            "domain.x" => x_all = Some(parse_range(line, key, v)?),
            "tasks" => tasks = Some((line, parse_tasks(line, v)?)),
            _ => {
                if let Some(rest) = key.strip_prefix("phi.") {
                    let ix = indices(line, key, rest, 2, dim)?;
                    phi.insert((ix[0], ix[1]), src());
                } else if let Some(rest) = key.strip_prefix("domain.x") {
                    let ix = indices(line, key, rest, 1, dim)?;
                    x_each.insert(ix[0], parse_range(line, key, v)?);
                } else if let Some(rest) = key.strip_prefix("G.") {
                    g.insert(indices(line, key, rest, 2, dim)?, src());
                } else if let Some(rest) = key.strip_prefix("L.") {
                    l.insert(indices(line, key, rest, 3, dim)?, src());
                } else if let Some(rest) = key.strip_prefix("C.") {
                    c.insert(indices(line, key, rest, 3, dim)?, src());
                } else if let Some(rest) = key.strip_prefix("M.") {
                    m_nlc.insert(indices(line, key, rest, 1, dim)?[0], src());
                } else if let Some(rest) = key.strip_prefix("N.") {
                    let ix = indices(line, key, rest, 2, dim)?;
                    n_nlc.insert((ix[0], ix[1]), src());
                } else {
                    return Err(CliError::config(line, format!("unknown key `{key}`")));
                }
            }
        }
    }

    let custom_keys = !(g.is_empty() && l.is_empty() && c.is_empty() && m_nlc.is_empty() && n_nlc.is_empty());
    let (kind_line, kind) = kind.unwrap_or((0, "berwald".to_string()));
    let connection = match kind.as_str() {
        "custom" => {
            let explicit = !(m_nlc.is_empty() && n_nlc.is_empty());
            let nlc = match nlc_mode {
                None if explicit => NlcSpec::Explicit { m: m_nlc, n: n_nlc },
                None => NlcSpec::Canonical,
                Some((line, mode)) => match mode.as_str() {
                    "canonical" if explicit => {
                        return Err(CliError::config(line, "`nlc = canonical` conflicts with M/N components"))
                    }
                    "canonical" => NlcSpec::Canonical,
                    "explicit" => NlcSpec::Explicit { m: m_nlc, n: n_nlc },
                    _ => return Err(CliError::config(line, format!("unknown nlc `{mode}`"))),
                },
            };
            ConnectionSpec::Custom { g, l, c, nlc }
        }
        "berwald" | "random" if custom_keys || nlc_mode.is_some() => {
            return Err(CliError::config(kind_line, "component keys need `connection = custom`"))
        }
        "berwald" => ConnectionSpec::Berwald,
        "random" => ConnectionSpec::Random { seed: random_seed.unwrap_or(seed) },
        _ => return Err(CliError::config(kind_line, format!("unknown connection `{kind}`"))),
    };
    if random_seed.is_some() && !matches!(connection, ConnectionSpec::Random { .. }) {
        let line = entries.iter().find(|e| e.1 == "random.seed").map_or(0, |e| e.0);
        return Err(CliError::config(line, "`random.seed` needs `connection = random`"));
    }

    if !x_each.is_empty() {
        let fallback = x_all.unwrap_or((-1.0, 1.0));
        domain.x = (0..dim).map(|i| x_each.get(&i).copied().unwrap_or(fallback)).collect();
    } else if let Some(r) = x_all {
        domain.x = vec![r];
    }
    let tasks = match tasks {
        Some((_, Some(t))) => {
            if t.contains(&Task::Expectations) && connection != ConnectionSpec::Berwald {
                let line = entries.iter().find(|e| e.1 == "tasks").map_or(0, |e| e.0);
                return Err(CliError::config(line, "task `expectations` needs `connection = berwald`"));
            }
            t
        }
        _ => ScenarioConfig::default_tasks(&connection),
    };
    Ok(ScenarioConfig {
        name,
        dim,
        h11,
        phi,
        connection,
        seed,
        points,
        abs_tol: abs_tol.or(tol).unwrap_or(DEFAULT_TOL),
        rel_tol: rel_tol.or(tol).unwrap_or(DEFAULT_TOL),
        domain,
        tasks,
        fields,
    })
}
