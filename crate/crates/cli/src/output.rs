//! Artifact formatting and atomic file output.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// Environment variable naming the default artifact directory.
pub const OUTPUT_DIR_ENV: &str = "COULOMB2D_OUTPUT_DIR";

pub const FORMAT_VERSION: u32 = 1;

/// Energies carry 13 significant digits.
pub const DIGITS: usize = 13;

/// `x` rounded to [`DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", DIGITS - 1, x).parse().unwrap_or(x)
}

/// Plain decimal rendering with [`DIGITS`] significant digits.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return format!("{:.*}", DIGITS - 1, 0.0);
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-6..=15).contains(&exp) {
        return format!("{:.*e}", DIGITS - 1, x);
    }
    let decimals = (DIGITS as i32 - 1 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new leading digit
    let r: f64 = s.parse().unwrap_or(x);
    if r != 0.0 && r.abs().log10().floor() as i32 != exp {
        let decimals = (DIGITS as i32 - 2 - exp).max(0) as usize;
        return format!("{x:.decimals$}");
    }
    s
}

#[derive(Serialize)]
struct Artifact<'a, R: Serialize> {
    format_version: u32,
    command: &'a str,
    config: &'a BTreeMap<String, String>,
    result: &'a R,
}

/// Pretty JSON with the resolved configuration embedded.
pub fn json_artifact<R: Serialize>(command: &str, config: &BTreeMap<String, String>, result: &R) -> Result<String, CliError> {
    let doc = Artifact { format_version: FORMAT_VERSION, command, config, result };
    let mut s = serde_json::to_string_pretty(&doc).map_err(coulomb2d::Error::from)?;
    s.push('\n');
    Ok(s)
}

/// CSV with a versioned header and the resolved configuration as comments.
pub fn csv_artifact(command: &str, config: &BTreeMap<String, String>, columns: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = format!("# coulomb2d {command} csv v{FORMAT_VERSION}\n");
    for (k, v) in config {
        s.push_str(&format!("# {k} = {v}\n"));
    }
    s.push_str(&columns.join(","));
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(coulomb2d::Error::from)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(coulomb2d::Error::from)?;
    tmp.write_all(contents).map_err(coulomb2d::Error::from)?;
    tmp.as_file().sync_all().map_err(coulomb2d::Error::from)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        let mode = std::fs::metadata(path).map(|m| m.permissions().mode()).unwrap_or(0o644);
        tmp.as_file()
            .set_permissions(std::fs::Permissions::from_mode(mode))
            .map_err(coulomb2d::Error::from)?;
    }
    tmp.persist(path).map_err(|e| coulomb2d::Error::from(e.error))?;
    Ok(())
}

/// Explicit path, else `default_name` inside the environment directory.
pub fn destination(explicit: Option<&Path>, default_name: &str) -> Option<PathBuf> {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).filter(|d| !d.is_empty()).map(|d| PathBuf::from(d).join(default_name)))
}

/// Prints the artifact and stores it when a destination is known.
pub fn emit(contents: &str, dest: Option<PathBuf>) -> Result<(), CliError> {
    if let Some(path) = dest {
        write_atomic(&path, contents.as_bytes())?;
        eprintln!("wrote {}", path.display());
    }
    say(contents);
    Ok(())
}

/// Writes to standard output, ignoring a closed pipe.
pub fn say(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thirteen_digits() {
        assert_eq!(fmt_sig(-11.899822342953), "-11.89982234295");
        assert_eq!(fmt_sig(-2.240275363589421), "-2.240275363589");
        assert_eq!(fmt_sig(-0.0012417343), "-0.001241734300000");
        assert_eq!(fmt_sig(9.9999999999999), "10.00000000000");
        assert_eq!(round_sig(-8.2504638753791234), -8.250463875379);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("out.json");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
