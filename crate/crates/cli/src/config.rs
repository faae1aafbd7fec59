//! `key=value` config files, spliced into argv ahead of the command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

/// Value of `--config` if present in `args`.
pub fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Converts file lines into `--key value` pairs. `#` starts a comment.
pub fn file_args(text: &str, path: &Path) -> Result<Vec<OsString>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected key=value", path.display(), i + 1))?;
        let k = k.trim().trim_start_matches("--");
        if k.is_empty() || k == "config" {
            return Err(format!("{}:{}: invalid key `{k}`", path.display(), i + 1));
        }
        out.push(OsString::from(format!("--{k}")));
        out.push(OsString::from(v.trim()));
    }
    Ok(out)
}

/// Inserts `extra` right after the subcommand token so later flags override it.
pub fn splice(args: Vec<OsString>, extra: Vec<OsString>) -> Vec<OsString> {
    let mut i = 1;
    while i < args.len() {
        let s = args[i].to_string_lossy();
        if s == "--config" {
            i += 2;
        } else if s.starts_with('-') {
            i += 1;
        } else {
            break;
        }
    }
    if i >= args.len() {
        return args;
    }
    let mut out = args[..=i].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[i + 1..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parses_and_splices() {
        let extra = file_args("# comment\nT = 300\n--a=1e-7  # trailing\n\n", Path::new("c")).unwrap();
        assert_eq!(extra, os(&["--T", "300", "--a", "1e-7"]));
        let args = os(&["casimir", "--config", "c", "curve", "--T", "4"]);
        assert_eq!(config_path(&args), Some(PathBuf::from("c")));
        assert_eq!(
            splice(args, extra),
            os(&["casimir", "--config", "c", "curve", "--T", "300", "--a", "1e-7", "--T", "4"])
        );
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(file_args("T 300", Path::new("c")).is_err());
        assert!(file_args("=3", Path::new("c")).is_err());
    }
}
