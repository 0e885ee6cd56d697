//! `--config PATH`: a `key = value` file whose keys are flag names.
//!
//! Values from the file are appended to the command line for every flag
//! not already given there, so explicit flags win. Boolean flags take
//! `true` or `false`. Lines starting with `#` are comments.

use std::fs;

use clap::{ArgAction, CommandFactory};

use crate::args::Cli;
use crate::CliError;

pub fn parse(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected `key = value`", i + 1))
        })?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(CliError::Usage(format!("config line {}: invalid key", i + 1)));
        }
        out.push((key, unquote(value.trim()).to_string()));
    }
    Ok(out)
}

fn unquote(v: &str) -> &str {
    v.strip_prefix('"')
        .and_then(|v| v.strip_suffix('"'))
        .unwrap_or(v)
}

fn config_path(argv: &[String]) -> Result<Option<String>, CliError> {
    for (i, a) in argv.iter().enumerate() {
        if let Some(p) = a.strip_prefix("--config=") {
            return Ok(Some(p.to_string()));
        }
        if a == "--config" {
            return argv
                .get(i + 1)
                .cloned()
                .map(Some)
                .ok_or_else(|| CliError::Usage("--config needs a path".into()));
        }
    }
    Ok(None)
}

fn is_flag_switch(subcommand: Option<&str>, key: &str) -> bool {
    let cmd = Cli::command();
    let global = cmd.get_arguments().find(|a| a.get_long() == Some(key));
    let sub = subcommand
        .and_then(|s| cmd.find_subcommand(s))
        .and_then(|s| s.get_arguments().find(|a| a.get_long() == Some(key)).cloned());
    sub.as_ref()
        .or(global)
        .is_some_and(|a| matches!(a.get_action(), ArgAction::SetTrue))
}

/// `argv` with the config file's values appended.
pub fn merge(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(path) = config_path(&argv)? else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::Usage(format!("cannot read config `{path}`: {e}")))?;
    let entries = parse(&text)?;

    let names: Vec<String> = Cli::command()
        .get_subcommands()
        .map(|s| s.get_name().to_string())
        .collect();
    let subcommand = argv.iter().skip(1).find(|a| names.contains(a)).cloned();

    let mut out = argv.clone();
    for (key, value) in entries {
        let given = |key: &str| {
            let flag = format!("--{key}");
            argv.iter()
                .any(|a| *a == flag || a.starts_with(&format!("{flag}=")))
        };
        let rival = match key.as_str() {
            "json" => Some("format"),
            "format" => Some("json"),
            _ => None,
        };
        if given(&key) || rival.is_some_and(given) {
            continue;
        }
        let flag = format!("--{key}");
        if is_flag_switch(subcommand.as_deref(), &key) {
            match value.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" => out.push(flag),
                "false" | "no" | "0" => {}
                _ => {
                    return Err(CliError::Usage(format!(
                        "config key `{key}` takes true or false, got `{value}`"
                    )))
                }
            }
        } else {
            out.push(format!("{flag}={value}"));
        }
    }
    Ok(out)
}
