//! Key-value config files and the run record embedded in every artifact.
//!
//! A config file holds `key = value` lines (`#` starts a comment). Keys are
//! long flag names of the command being run or of the global options;
//! anything given on the command line wins.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::Path;

use clap::{ArgAction, ArgMatches, Command};
use serde_json::{json, Value};

pub fn parse_file(path: &Path) -> Result<Vec<(String, String)>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected key = value", path.display(), n + 1))?;
        out.push((k.trim().replace('_', "-"), v.trim().to_string()));
    }
    Ok(out)
}

fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

/// The subcommand chain named in `argv`.
fn leaf<'a>(root: &'a Command, argv: &[OsString]) -> Vec<&'a Command> {
    let mut chain = vec![root];
    for a in argv.iter().skip(1) {
        let s = a.to_string_lossy();
        if s.starts_with('-') {
            continue;
        }
        if let Some(sub) = chain.last().unwrap().find_subcommand(s.as_ref()) {
            chain.push(sub);
        }
    }
    chain
}

/// Appends flags from the `--config` file that `argv` does not set.
pub fn merge(root: &Command, argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(&argv) else { return Ok(argv) };
    let entries = parse_file(Path::new(&path))?;
    let chain = leaf(root, &argv);
    let given = |key: &str| {
        argv.iter().any(|a| {
            let s = a.to_string_lossy();
            s == format!("--{key}") || s.starts_with(&format!("--{key}="))
        })
    };
    let mut out = argv.clone();
    for (key, value) in entries {
        let arg = chain
            .iter()
            .rev()
            .flat_map(|c| c.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()) && key != "config")
            .ok_or_else(|| format!("config key {key:?} is not a flag of this command"))?;
        if given(&key) {
            continue;
        }
        match arg.get_action() {
            ArgAction::SetTrue => match value.as_str() {
                "true" | "yes" | "1" => out.push(format!("--{key}").into()),
                "false" | "no" | "0" => {}
                _ => return Err(format!("config key {key:?} expects true or false, got {value:?}")),
            },
            _ => {
                out.push(format!("--{key}").into());
                out.push(value.into());
            }
        }
    }
    Ok(out)
}

/// Global options resolved for this run.
pub struct RunConfig {
    pub command: String,
    pub args: BTreeMap<String, Value>,
    pub precision: u32,
    pub power_cap: u64,
    pub oracle_cap: usize,
    pub format: String,
    pub out: Option<String>,
}

impl RunConfig {
    /// Collects the leaf command's arguments, defaults included.
    pub fn from_matches(root: &Command, m: &ArgMatches, globals: &[&str], resolved: RunConfig) -> Self {
        let mut path = Vec::new();
        let mut cur = m;
        let mut cmd = root;
        while let Some((name, sub)) = cur.subcommand() {
            path.push(name.to_string());
            cur = sub;
            cmd = cmd.find_subcommand(name).expect("matched subcommand exists");
        }
        let own: Vec<&str> = cmd.get_arguments().map(|a| a.get_id().as_str()).collect();
        let mut args = BTreeMap::new();
        for id in cur.ids() {
            let id = id.as_str();
            if globals.contains(&id) || !own.contains(&id) {
                continue;
            }
            let Ok(Some(raw)) = cur.try_get_raw(id) else { continue };
            let vals: Vec<String> = raw.map(|v| v.to_string_lossy().into_owned()).collect();
            let v = match &vals[..] {
                [one] => json!(one),
                many => json!(many),
            };
            args.insert(id.to_string(), v);
        }
        RunConfig { command: path.join(" "), args, ..resolved }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "args": self.args,
            "precision": self.precision,
            "power_cap": self.power_cap,
            "oracle_cap": self.oracle_cap,
            "format": self.format,
            "out": self.out,
        })
    }
}
