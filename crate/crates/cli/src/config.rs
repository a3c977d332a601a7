//! `key = value` config files, merged into the argument list before clap
//! sees it. Flags given on the command line win.

use std::ffi::OsString;
use std::fs;

use crate::CliError;

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-")
}

fn parse(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("config line {}: expected key = value", n + 1)));
        };
        let key = normalize(k);
        if key.is_empty() || key == "config" {
            return Err(CliError::Usage(format!("config line {}: invalid key {k:?}", n + 1)));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
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

fn given(args: &[OsString], key: &str) -> bool {
    let flag = format!("--{key}");
    let prefix = format!("--{key}=");
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag.as_str() || s.starts_with(&prefix)
    })
}

/// Appends config entries as flags. `true` turns into a bare switch and
/// `false` is dropped.
pub fn merge(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.to_string_lossy())))?;
    let mut merged = args.clone();
    for (key, value) in parse(&text)? {
        if given(&args, &key) {
            continue;
        }
        match value.as_str() {
            "true" => merged.push(format!("--{key}").into()),
            "false" => {}
            _ => merged.push(format!("--{key}={value}").into()),
        }
    }
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parses_and_skips_comments() {
        let kv = parse("# c\n\ntrials = 5\nmethod=nn\ntrain_fraction = 0.3\n").unwrap();
        assert_eq!(
            kv,
            vec![
                ("trials".into(), "5".into()),
                ("method".into(), "nn".into()),
                ("train-fraction".into(), "0.3".into())
            ]
        );
        assert!(parse("oops").is_err());
    }

    #[test]
    fn flags_win() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.conf");
        fs::write(&p, "trials = 5\nseed = 3\nsquared-noise = true\nexact = false\n").unwrap();
        let args = os(&["qnn", "sweep", "noise", "--config", p.to_str().unwrap(), "--seed=9"]);
        let merged = merge(args).unwrap();
        let tail: Vec<String> = merged[6..].iter().map(|s| s.to_string_lossy().into()).collect();
        assert_eq!(tail, vec!["--trials=5", "--squared-noise"]);
    }
}
