//! `key = value` config files. Each entry supplies `--key value` for the
//! chosen subcommand unless that flag already appears on the command line.

use anyhow::{bail, Context, Result};

pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected `key = value`", n + 1);
        };
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let value = value.trim().trim_matches('"').to_string();
        if key.is_empty() {
            bail!("config line {}: empty key", n + 1);
        }
        out.push((key, value));
    }
    Ok(out)
}

fn mentions(args: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    let prefix = format!("{flag}=");
    args.iter().any(|a| *a == flag || a.starts_with(&prefix))
}

/// Removes `--config <path>` from `args` and appends the file's defaults.
pub fn expand(mut args: Vec<String>) -> Result<Vec<String>> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let path = if let Some(p) = args[pos].strip_prefix("--config=") {
        let p = p.to_string();
        args.remove(pos);
        p
    } else {
        if pos + 1 >= args.len() {
            bail!("--config needs a path");
        }
        let p = args.remove(pos + 1);
        args.remove(pos);
        p
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {path}"))?;
    for (key, value) in parse(&text)? {
        if mentions(&args, &key) {
            continue;
        }
        match value.as_str() {
            "true" => args.push(format!("--{key}")),
            "false" => {}
            _ => {
                args.push(format!("--{key}"));
                args.push(value);
            }
        }
    }
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parse_lines() {
        let entries = parse("# c\nseed = 4\n\nwindow_inc=\"12\"\nno-mus = true\n").unwrap();
        assert_eq!(
            entries,
            vec![
                ("seed".into(), "4".into()),
                ("window-inc".into(), "12".into()),
                ("no-mus".into(), "true".into())
            ]
        );
        assert!(parse("seed 4\n").is_err());
    }

    #[test]
    fn explicit_flags_win() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "seed = 4\niters = 9\nverbose = true\nquiet = false\n").unwrap();
        let args = strings(&["cnp", "optimize", "--config", path.to_str().unwrap(), "--seed=1"]);
        let out = expand(args).unwrap();
        assert_eq!(out, strings(&["cnp", "optimize", "--seed=1", "--iters", "9", "--verbose"]));
    }
}
