//! Flat `key = value` config files.
//!
//! Keys are the long flag names of the chosen subcommand plus the global
//! flags, and `command` names the subcommand. Lists are comma separated and
//! switches take `true` or `false`. Blank lines and `#` comments are skipped.
//! Flags given on the command line override the file.

use std::collections::BTreeSet;
use std::path::Path;

use clap::CommandFactory;

use crate::cli::{Cli, SUBCOMMANDS};
use crate::error::{LabError, LabResult};

/// Global flags that take a value.
const VALUED_GLOBALS: [&str; 5] = ["config", "out", "jobs", "units", "seed"];

pub fn parse(text: &str) -> LabResult<Vec<(String, String)>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(LabError::Config(format!("line {}: expected `key = value`", n + 1)));
        };
        let (k, v) = (k.trim().replace('_', "-"), v.trim().to_string());
        if k.is_empty() || !seen.insert(k.clone()) {
            return Err(LabError::Config(format!("line {}: empty or repeated key `{k}`", n + 1)));
        }
        out.push((k, v));
    }
    Ok(out)
}

fn flag_name(token: &str) -> Option<&str> {
    let name = token.strip_prefix("--")?;
    Some(name.split_once('=').map_or(name, |(k, _)| k))
}

/// Position of the subcommand token in `argv`.
fn subcommand_at(argv: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < argv.len() {
        let tok = argv[i].as_str();
        if let Some(name) = flag_name(tok) {
            if VALUED_GLOBALS.contains(&name) && !tok.contains('=') {
                i += 1;
            }
        } else if SUBCOMMANDS.contains(&tok) {
            return Some(i);
        } else if !tok.starts_with('-') {
            return None;
        }
        i += 1;
    }
    None
}

fn config_path(argv: &[String]) -> Option<&str> {
    let mut it = argv.iter().skip(1);
    while let Some(tok) = it.next() {
        if tok == "--config" {
            return it.next().map(String::as_str);
        }
        if let Some(p) = tok.strip_prefix("--config=") {
            return Some(p);
        }
    }
    None
}

/// Merge the config file named by `--config` into `argv`.
pub fn expand(argv: Vec<String>) -> LabResult<Vec<String>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(path).map_err(|e| LabError::io(Path::new(path), e))?;
    let entries = parse(&text)?;
    let from_file = entries.iter().find(|(k, _)| k == "command").map(|(_, v)| v.clone());
    let mut out = vec![argv[0].clone()];
    let sub = match subcommand_at(&argv) {
        Some(i) => argv[i].clone(),
        None => {
            let Some(cmd) = from_file else {
                return Err(LabError::Config(format!("{path}: no subcommand on the command line or in the file")));
            };
            if !SUBCOMMANDS.contains(&cmd.as_str()) {
                return Err(LabError::Config(format!("{path}: unknown command `{cmd}`")));
            }
            out.push(cmd.clone());
            cmd
        }
    };
    let given: BTreeSet<&str> = argv.iter().skip(1).filter_map(|t| flag_name(t)).collect();
    out.extend(argv.iter().skip(1).cloned());

    let root = Cli::command();
    let cmd = root.find_subcommand(&sub).expect("known subcommand");
    for (key, value) in &entries {
        if key == "command" || given.contains(key.as_str()) {
            continue;
        }
        if key == "config" {
            return Err(LabError::Config(format!("{path}: nested `config` key")));
        }
        let arg = cmd
            .get_arguments()
            .chain(root.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| LabError::Config(format!("{path}: unknown key `{key}` for `{sub}`")))?;
        if arg.get_action().takes_values() {
            out.push(format!("--{key}={value}"));
        } else {
            match value.as_str() {
                "true" => out.push(format!("--{key}")),
                "false" => {}
                _ => return Err(LabError::Config(format!("{path}: `{key}` expects true or false"))),
            }
        }
    }
    Ok(out)
}
