use std::collections::BTreeMap;
use std::fmt::{self, Write};

/// Initial variable overrides and external token arrivals for one run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Scenario {
    pub sets: Vec<(String, i64)>,
    pub injections: Vec<Injection>,
}

/// A token entering the model from outside at a given stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Injection {
    pub thing: String,
    pub at: String,
    pub tick: u64,
    pub payload: BTreeMap<String, i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ScenarioParseError {
    pub line: usize,
    pub message: String,
}

impl Scenario {
    pub fn set(mut self, var: &str, value: i64) -> Self {
        self.sets.push((var.to_owned(), value));
        self
    }

    pub fn inject(mut self, thing: &str, at: &str, tick: u64, payload: &[(&str, i64)]) -> Self {
        self.injections.push(Injection {
            thing: thing.to_owned(),
            at: at.to_owned(),
            tick,
            payload: payload.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        });
        self
    }

    /// Reads the `.tmrun` line format:
    ///
    /// ```text
    /// set current_stock = 100
    /// inject Request at RequestingDepartment.Requisition.create t=0 payload {qty:30}
    /// ```
    pub fn parse(text: &str) -> Result<Scenario, ScenarioParseError> {
        let mut sc = Scenario::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ScenarioParseError {
                line: i + 1,
                message,
            };
            if let Some(rest) = line.strip_prefix("set ") {
                let (name, value) = rest
                    .split_once('=')
                    .ok_or_else(|| err("expected `set <var> = <int>`".into()))?;
                let value = value
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("bad integer `{}`", value.trim())))?;
                sc.sets.push((name.trim().to_owned(), value));
            } else if let Some(rest) = line.strip_prefix("inject ") {
                let (head, payload) = match rest.split_once("payload") {
                    Some((h, p)) => (h, Some(p.trim())),
                    None => (rest, None),
                };
                let words: Vec<&str> = head.split_whitespace().collect();
                let [thing, "at", at, tick] = words[..] else {
                    return Err(err(
                        "expected `inject <thing> at <path> t=<tick> [payload {k:v,...}]`".into(),
                    ));
                };
                let tick = tick
                    .strip_prefix("t=")
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| err(format!("bad tick `{tick}`")))?;
                let payload = match payload {
                    Some(p) => parse_payload(p).map_err(err)?,
                    None => BTreeMap::new(),
                };
                sc.injections.push(Injection {
                    thing: thing.to_owned(),
                    at: at.to_owned(),
                    tick,
                    payload,
                });
            } else {
                return Err(err(format!("unknown directive `{line}`")));
            }
        }
        Ok(sc)
    }
}

fn parse_payload(p: &str) -> Result<BTreeMap<String, i64>, String> {
    let inner = p
        .strip_prefix('{')
        .and_then(|p| p.strip_suffix('}'))
        .ok_or_else(|| format!("payload must be `{{k:v,...}}`, got `{p}`"))?;
    let mut out = BTreeMap::new();
    for pair in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = pair
            .split_once(':')
            .ok_or_else(|| format!("bad payload entry `{pair}`"))?;
        let v = v
            .trim()
            .parse()
            .map_err(|_| format!("bad payload value `{}`", v.trim()))?;
        out.insert(k.trim().to_owned(), v);
    }
    Ok(out)
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.sets {
            writeln!(f, "set {k} = {v}")?;
        }
        for inj in &self.injections {
            let mut payload = String::new();
            for (i, (k, v)) in inj.payload.iter().enumerate() {
                if i > 0 {
                    payload.push(',');
                }
                let _ = write!(payload, "{k}:{v}");
            }
            writeln!(
                f,
                "inject {} at {} t={} payload {{{payload}}}",
                inj.thing, inj.at, inj.tick
            )?;
        }
        Ok(())
    }
}
