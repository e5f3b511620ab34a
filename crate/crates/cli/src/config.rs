//! Flat `key=value` config files, merged under the command-line flags.
//!
//! Keys are long flag names without the dashes. A key only takes effect when
//! the flag is absent from the command line, so flags always win.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;

use clap::CommandFactory;

use crate::Cli;

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!("config line {}: expected key=value, got {raw:?}", i + 1));
        };
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(|v| v.to_string_lossy().into_owned());
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(v.to_string());
        }
    }
    None
}

fn has_flag(args: &[OsString], long: &str) -> bool {
    let bare = format!("--{long}");
    let eq = format!("--{long}=");
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == bare || s.starts_with(&eq)
    })
}

/// Append config-file settings to `args` for every flag not already given.
pub fn merge_config(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(&args) else { return Ok(args) };
    let text = fs::read_to_string(&path).map_err(|e| format!("--config {path}: {e}"))?;
    let entries = parse_config(&text)?;
    let root = Cli::command();
    // the subcommand is the first argument naming one
    let sub = args
        .iter()
        .skip(1)
        .find_map(|a| root.find_subcommand(a.to_string_lossy().as_ref()).cloned())
        .ok_or("a subcommand is required")?;
    let mut out = args.clone();
    for (key, value) in entries {
        if key == "config" || has_flag(&args, &key) {
            continue;
        }
        let arg = sub
            .get_arguments()
            .chain(root.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| format!("config key {key:?} is not a flag of `{}`", sub.get_name()))?;
        if arg.get_action().takes_values() {
            out.push(format!("--{key}").into());
            out.push(value.into());
        } else {
            match value.as_str() {
                "true" | "1" | "yes" => out.push(format!("--{key}").into()),
                "false" | "0" | "no" => {}
                _ => return Err(format!("config key {key:?} expects true or false, got {value:?}")),
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blanks() {
        let m = parse_config("# run\n\nc = 1.01\nfrom=100000\n").unwrap();
        assert_eq!(m["c"], "1.01");
        assert_eq!(m["from"], "100000");
        assert!(parse_config("oops").is_err());
    }

    #[test]
    fn flags_beat_config() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.cfg");
        fs::write(&p, "c=1.02\nto=100010\n").unwrap();
        let args: Vec<OsString> = ["piatetski", "scan", "--c", "1.01", "--from", "100000", "--config"]
            .iter()
            .map(OsString::from)
            .chain([p.into_os_string()])
            .collect();
        let merged = merge_config(args).unwrap();
        let s: Vec<String> = merged.iter().map(|a| a.to_string_lossy().into_owned()).collect();
        assert_eq!(s.iter().filter(|a| *a == "--c").count(), 1);
        assert!(s.windows(2).any(|w| w[0] == "--to" && w[1] == "100010"));
    }
}
