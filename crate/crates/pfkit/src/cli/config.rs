//! Flat `key = value` configuration files.
//!
//! Each key names a command-line flag without its leading dashes
//! (underscores and dashes are interchangeable). `true`/`false` toggle
//! switches; blank lines and `#` comments are ignored. Values from a file
//! are placed before the command-line flags, so flags given on the command
//! line win.

use crate::error::{Error, Result};

/// Flags that take no value.
const SWITCHES: &[&str] = &["open-range", "no-header"];

pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Format(format!("config line {}: expected key=value, got '{line}'", n + 1))
        })?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(Error::Format(format!("config line {}: bad key '{key}'", n + 1)));
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

/// Turns parsed entries into command-line arguments.
pub fn to_args(entries: &[(String, String)]) -> Result<Vec<String>> {
    let mut args = Vec::new();
    for (key, value) in entries {
        if SWITCHES.contains(&key.as_str()) {
            match value.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" => args.push(format!("--{key}")),
                "false" | "no" | "0" => {}
                other => {
                    return Err(Error::Format(format!("switch '{key}' expects true/false, got '{other}'")))
                }
            }
        } else {
            args.push(format!("--{key}"));
            args.push(value.clone());
        }
    }
    Ok(args)
}

/// Expands `--config FILE` (or `--config=FILE`) found after the subcommand
/// into the file's flags.
pub fn expand(args: Vec<String>) -> Result<Vec<String>> {
    let pos = args.iter().position(|a| a == "--config" || a.starts_with("--config="));
    let Some(pos) = pos else {
        return Ok(args);
    };
    let (path, consumed) = match args[pos].strip_prefix("--config=") {
        Some(p) => (p.to_string(), 1),
        None => {
            let p = args.get(pos + 1).ok_or_else(|| Error::Format("--config needs a file path".into()))?;
            (p.clone(), 2)
        }
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::Format(format!("cannot read config '{path}': {e}")))?;
    let injected = to_args(&parse(&text)?)?;
    // Insert right after the subcommand so that explicit flags override.
    let sub = 2.min(args.len());
    let mut out: Vec<String> = args[..sub.min(pos)].to_vec();
    out.extend(injected);
    out.extend(args[sub.min(pos)..pos].iter().cloned());
    out.extend(args[pos + consumed..].iter().cloned());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let e = parse("# header\nvalue_col = grade\n\nnorm=l2  # trailing\nopen-range = true\n").unwrap();
        assert_eq!(
            e,
            vec![
                ("value-col".to_string(), "grade".to_string()),
                ("norm".to_string(), "l2".to_string()),
                ("open-range".to_string(), "true".to_string()),
            ]
        );
        let a = to_args(&e).unwrap();
        assert_eq!(a, vec!["--value-col", "grade", "--norm", "l2", "--open-range"]);
        assert!(parse("novalue\n").is_err());
    }

    #[test]
    fn expansion_places_file_flags_first() {
        let dir = std::env::temp_dir().join(format!("pfkit-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let f = dir.join("a.conf");
        std::fs::write(&f, "alpha=3\nepsilon=1\n").unwrap();
        let args: Vec<String> = ["pfkit", "calibrate", "--config", f.to_str().unwrap(), "--alpha", "2"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let out = expand(args).unwrap();
        assert_eq!(out, vec!["pfkit", "calibrate", "--alpha", "3", "--epsilon", "1", "--alpha", "2"]);
    }
}
