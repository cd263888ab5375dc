use std::fs;
use std::path::Path;

use seqrep::params::{ConfigError, ExperimentParams, ValidationReport};

/// Why the effective parameter set could not be built.
#[derive(Debug)]
pub enum LoadError {
    Config(ConfigError),
    Invalid(ValidationReport),
}

/// Expected parameters, then the config file, then `--set` overrides.
///
/// When neither the file nor the overrides mention `L_A`, the repeater is
/// placed half-way across whatever `L_total` ended up being.
pub fn effective_params(path: Option<&Path>, overrides: &[String]) -> Result<ExperimentParams, LoadError> {
    let mut params = ExperimentParams::default();
    let mut explicit_l_a = false;
    if let Some(path) = path {
        let text = fs::read_to_string(path).map_err(|e| {
            LoadError::Config(ConfigError::Io {
                path: path.display().to_string(),
                reason: e.to_string(),
            })
        })?;
        explicit_l_a |= text.lines().any(|l| mentions_l_a(l.split('#').next().unwrap_or("")));
        params = params.merge_config_str(&text).map_err(LoadError::Config)?;
    }
    for assignment in overrides {
        explicit_l_a |= mentions_l_a(assignment);
        params.apply_assignment(assignment).map_err(LoadError::Config)?;
    }
    if !explicit_l_a {
        params.l_a = params.l_total / 2.0;
    }
    Ok(params)
}

fn mentions_l_a(assignment: &str) -> bool {
    assignment.split_once('=').is_some_and(|(k, _)| k.trim() == "L_A")
}

/// Hard errors abort; warnings go to stderr.
pub fn check(params: &ExperimentParams) -> Result<(), LoadError> {
    let report = params.validate();
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if report.is_ok() {
        Ok(())
    } else {
        Err(LoadError::Invalid(report))
    }
}

pub fn report(err: &LoadError) {
    match err {
        LoadError::Config(e) => eprintln!("error: {e}"),
        LoadError::Invalid(r) => {
            for v in &r.errors {
                eprintln!("error: invalid parameter {v}");
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_follows_total_unless_given() {
        let p = effective_params(None, &["L_total = 10".into()]).unwrap();
        assert_eq!(p.l_a, 5.0);
        let p = effective_params(None, &["L_total=10".into(), "L_A=7".into()]).unwrap();
        assert_eq!(p.l_a, 7.0);
    }

    #[test]
    fn overrides_beat_file() {
        let dir = std::env::temp_dir().join(format!("seqrep-config-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.conf");
        fs::write(&path, "p_em = 0.3 # comment\nL_A = 1\n").unwrap();
        let p = effective_params(Some(&path), &["p_em=0.4".into()]).unwrap();
        assert_eq!(p.p_em, 0.4);
        assert_eq!(p.l_a, 1.0);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn unknown_key_is_a_config_error() {
        assert!(matches!(
            effective_params(None, &["speed=3".into()]),
            Err(LoadError::Config(ConfigError::UnknownKey(_)))
        ));
    }
}
