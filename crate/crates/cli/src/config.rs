//! Flat `key = value` config files.
//!
//! Keys are long flag names (`table-limit` or `table_limit`). Lines starting
//! with `#` are comments. List values are comma separated; boolean flags take
//! `true` or `false`. Flags given on the command line win over the file.

use crate::args::Cli;
use crate::error::CliError;
use clap::{CommandFactory, FromArgMatches, Parser};
use serde_json::Value;
use std::ffi::OsString;

pub fn parse_entries(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("config line {}: expected `key = value`, got `{line}`", i + 1)))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(CliError::config(format!("config line {}: empty key", i + 1)));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

/// Command-line tokens equivalent to `entries` for subcommand `sub`,
/// split into those placed before and after the subcommand name.
fn entries_to_tokens(entries: &[(String, String)], sub: &str) -> Result<(Vec<String>, Vec<String>), CliError> {
    let mut root = Cli::command();
    root.build();
    let subcmd = root
        .find_subcommand(sub)
        .ok_or_else(|| CliError::config(format!("unknown command `{sub}`")))?
        .clone();
    let matches = |a: &clap::Arg, key: &str| {
        a.get_long() == Some(key) || a.get_id().as_str().replace('_', "-") == key
    };
    let (mut before, mut after) = (Vec::new(), Vec::new());
    for (key, value) in entries {
        let (arg, dest) = if let Some(a) = root.get_arguments().find(|a| matches(a, key)) {
            (a.clone(), &mut before)
        } else if let Some(a) = subcmd.get_arguments().find(|a| matches(a, key)) {
            (a.clone(), &mut after)
        } else {
            return Err(CliError::config(format!("config key `{key}` is not an option of `{sub}`")));
        };
        if arg.get_id() == "config" {
            return Err(CliError::config("config files cannot include other config files"));
        }
        if arg.is_positional() {
            dest.push(value.clone());
        } else if arg.get_action().takes_values() {
            dest.push(format!("--{}", arg.get_long().unwrap_or(key)));
            dest.push(value.clone());
        } else {
            match value.as_str() {
                "true" => dest.push(format!("--{}", arg.get_long().unwrap_or(key))),
                "false" => {}
                _ => return Err(CliError::config(format!("config key `{key}` expects true or false, got `{value}`"))),
            }
        }
    }
    Ok((before, after))
}

/// Leaves of `user` that are unset (null, false or empty) take the value
/// from `file`.
fn merge(user: &mut Value, file: Value) {
    match (user, file) {
        (Value::Object(u), Value::Object(f)) => {
            for (k, fv) in f {
                match u.get_mut(&k) {
                    Some(uv) => merge(uv, fv),
                    None => {
                        u.insert(k, fv);
                    }
                }
            }
        }
        (u, f) => {
            let unset = match u {
                Value::Null | Value::Bool(false) => true,
                Value::Array(a) => a.is_empty(),
                _ => false,
            };
            if unset {
                *u = f;
            }
        }
    }
}

/// Parses `argv` and folds in the config file it names, if any.
pub fn parse_with_config<I, T>(argv: I) -> Result<Cli, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let matches = Cli::command().try_get_matches_from(&argv)?;
    let cli = Cli::from_arg_matches(&matches)?;
    let Some(path) = cli.global.config.clone() else {
        return Ok(cli);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::config(format!("cannot read config file {}: {e}", path.display())))?;
    let entries = parse_entries(&text)?;
    let sub = cli.command.name();
    let (before, after) = entries_to_tokens(&entries, sub)?;
    let mut file_argv: Vec<String> = vec!["lowlying".into()];
    file_argv.extend(before);
    file_argv.push(sub.into());
    file_argv.extend(after);
    let from_file = Cli::try_parse_from(&file_argv)?;

    let mut merged = serde_json::to_value(&cli).expect("serializable");
    merge(&mut merged, serde_json::to_value(&from_file).expect("serializable"));
    let mut out: Cli = serde_json::from_value(merged).map_err(|e| CliError::config(e.to_string()))?;
    out.global.config = Some(path);
    Ok(out)
}
