//! The four run modes behind the CLI subcommands. Each takes a validated
//! configuration, writes its output files under `output_dir`, and returns the
//! paths written. All floating-point output uses 17 significant digits so
//! repeated runs are byte-identical and values round-trip exactly.

use crate::claims::{audit_claims, render_text, AuditConfig};
use crate::config::{ConfigError, RunConfig};
use crate::limits::{empirical_rescaled_moments, limit_moments_spectral};
use crate::spectral::{sample_grid, DEFAULT_DK};
use crate::walk::{origin_probability_sequence, WalkState};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Number of bins in the rescaled-position histogram over [−1, 1].
pub const HIST_BINS: usize = 64;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("failed to write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// 17 significant digits: enough for exact f64 round-trips.
fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<(), CommandError> {
    let mut file = fs::File::create(path).map_err(|source| CommandError::Write {
        path: path.to_path_buf(),
        source,
    })?;
    file.write_all(contents.as_bytes())
        .map_err(|source| CommandError::Write {
            path: path.to_path_buf(),
            source,
        })
}

fn ensure_output_dir(cfg: &RunConfig) -> Result<(), CommandError> {
    fs::create_dir_all(&cfg.output_dir).map_err(|source| CommandError::Write {
        path: cfg.output_dir.clone(),
        source,
    })
}

/// Position distributions over time plus the origin-probability sequence.
///
/// Writes `distribution.csv` (`t,x,probability`, one block per sampled time)
/// and `origin_sequence.csv` (`t,probability,detected_period`).
pub fn cmd_simulate(cfg: &RunConfig) -> Result<Vec<PathBuf>, CommandError> {
    let run = cfg.validate()?;
    ensure_output_dir(cfg)?;

    let mut dist_csv = String::from("t,x,probability\n");
    let mut state = WalkState::from_initial(&run.init);
    for t in 0..=cfg.horizon {
        if t > 0 {
            state = state.step(&run.coin);
        }
        if t % cfg.stride == 0 {
            for (x, p) in state.distribution().iter() {
                dist_csv.push_str(&format!("{t},{x},{}\n", fmt_f(p)));
            }
        }
    }

    let seq = origin_probability_sequence(&run.coin, &run.init, 0, cfg.horizon);
    let period = seq.period.map(|p| p.to_string()).unwrap_or_default();
    let mut origin_csv = String::from("t,probability,detected_period\n");
    for (t, v) in seq.values.iter().enumerate() {
        origin_csv.push_str(&format!("{t},{},{period}\n", fmt_f(*v)));
    }

    let dist_path = cfg.output_dir.join("distribution.csv");
    let origin_path = cfg.output_dir.join("origin_sequence.csv");
    write_file(&dist_path, &dist_csv)?;
    write_file(&origin_path, &origin_csv)?;
    Ok(vec![dist_path, origin_path])
}

/// Eigenvalues, group velocities, and overlaps over the k-grid.
///
/// Writes `spectrum.csv` (`k,branch,re_lambda,im_lambda,h,overlap,warnings`);
/// per-k branch-tracking failures land in the warnings column and the scan
/// completes.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Vec<PathBuf>, CommandError> {
    let run = cfg.validate()?;
    ensure_output_dir(cfg)?;

    let samples = sample_grid(&run.coin, &run.init, cfg.k_grid, DEFAULT_DK);
    let ks = crate::spectral::k_grid(cfg.k_grid);
    let mut csv = String::from("k,branch,re_lambda,im_lambda,h,overlap,warnings\n");
    for (k, sample) in ks.iter().zip(samples) {
        match sample {
            Ok(s) => {
                for j in 0..4 {
                    csv.push_str(&format!(
                        "{},{j},{},{},{},{},\n",
                        fmt_f(*k),
                        fmt_f(s.eigenvalues[j].re),
                        fmt_f(s.eigenvalues[j].im),
                        fmt_f(s.group_velocities[j]),
                        fmt_f(s.overlaps[j]),
                    ));
                }
            }
            Err(err) => {
                csv.push_str(&format!("{},,,,,,\"{err}\"\n", fmt_f(*k)));
            }
        }
    }

    let path = cfg.output_dir.join("spectrum.csv");
    write_file(&path, &csv)?;
    Ok(vec![path])
}

/// Limit moments (spectral vs empirical) and the rescaled-position histogram.
///
/// Writes `moments.csv` (`r,spectral_value,empirical_value_at_horizon,abs_diff`)
/// and `rescaled_hist.csv` (`bin_center,probability`).
pub fn cmd_limits(cfg: &RunConfig) -> Result<Vec<PathBuf>, CommandError> {
    let run = cfg.validate()?;
    ensure_output_dir(cfg)?;
    let r_max = 4u32;

    let spectral = limit_moments_spectral(&run.coin, &run.init, r_max, cfg.k_grid);
    let empirical = empirical_rescaled_moments(&run.coin, &run.init, cfg.horizon, r_max);
    let mut moments_csv = String::from("r,spectral_value,empirical_value_at_horizon,abs_diff\n");
    for r in 0..r_max as usize {
        match &spectral {
            Ok(sm) => moments_csv.push_str(&format!(
                "{},{},{},{}\n",
                r + 1,
                fmt_f(sm[r]),
                fmt_f(empirical[r]),
                fmt_f((sm[r] - empirical[r]).abs()),
            )),
            Err(err) => {
                moments_csv.push_str(&format!("{},\"{err}\",{},\n", r + 1, fmt_f(empirical[r]),))
            }
        }
    }

    let dist = WalkState::from_initial(&run.init)
        .evolve(&run.coin, cfg.horizon)
        .distribution();
    let width = 2.0 / HIST_BINS as f64;
    let mut bins = vec![0.0f64; HIST_BINS];
    for (x, p) in dist.iter() {
        let v = x as f64 / cfg.horizon as f64;
        let idx = (((v + 1.0) / width).floor() as isize).clamp(0, HIST_BINS as isize - 1) as usize;
        bins[idx] += p;
    }
    let mut hist_csv = String::from("bin_center,probability\n");
    for (i, p) in bins.iter().enumerate() {
        let center = -1.0 + (i as f64 + 0.5) * width;
        hist_csv.push_str(&format!("{},{}\n", fmt_f(center), fmt_f(*p)));
    }

    let moments_path = cfg.output_dir.join("moments.csv");
    let hist_path = cfg.output_dir.join("rescaled_hist.csv");
    write_file(&moments_path, &moments_csv)?;
    write_file(&hist_path, &hist_csv)?;
    Ok(vec![moments_path, hist_path])
}

/// Full claim audit; verdicts are data, not errors.
///
/// Writes `claims.json` and `claims.txt`.
pub fn cmd_claims(cfg: &RunConfig) -> Result<Vec<PathBuf>, CommandError> {
    let run = cfg.validate()?;
    ensure_output_dir(cfg)?;

    let audit_cfg = AuditConfig {
        max_t: cfg.horizon,
        k_grid: cfg.k_grid,
        moment_horizon: cfg.horizon,
        ..AuditConfig::default()
    };
    let reports = audit_claims(&run.coin, &run.init, &audit_cfg);

    let json = serde_json::to_string_pretty(&reports).expect("reports serialize");
    let text = render_text(&reports);

    let json_path = cfg.output_dir.join("claims.json");
    let text_path = cfg.output_dir.join("claims.txt");
    write_file(&json_path, &json)?;
    write_file(&text_path, &text)?;
    Ok(vec![json_path, text_path])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{CoinChoice, ComplexDef};

    fn temp_cfg(dir: &Path) -> RunConfig {
        RunConfig {
            output_dir: dir.to_path_buf(),
            horizon: 16,
            ..RunConfig::default()
        }
    }

    #[test]
    fn simulate_writes_expected_files() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = temp_cfg(dir.path());
        let files = cmd_simulate(&cfg).unwrap();
        assert_eq!(files.len(), 2);

        let origin = fs::read_to_string(dir.path().join("origin_sequence.csv")).unwrap();
        let mut lines = origin.lines();
        assert_eq!(lines.next(), Some("t,probability,detected_period"));
        // basis-0 Grover walk: alternating 1, 0 with period 2
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[0], "0");
        assert!(first[1].starts_with("1.0000000000000000"));
        assert_eq!(first[2], "2");

        let dist = fs::read_to_string(dir.path().join("distribution.csv")).unwrap();
        assert!(dist.starts_with("t,x,probability\n"));
        assert!(dist.lines().count() > 16);
    }

    #[test]
    fn spectrum_grover_rows_flat_and_zero_velocity() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig {
            k_grid: 64,
            ..temp_cfg(dir.path())
        };
        cmd_spectrum(&cfg).unwrap();
        let text = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
        let mut rows = 0;
        for line in text.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols.len(), 7, "row: {line}");
            let h: f64 = cols[4].parse().unwrap();
            assert!(h.abs() < 1e-8);
            let re: f64 = cols[2].parse().unwrap();
            let im: f64 = cols[3].parse().unwrap();
            let modulus = (re * re + im * im).sqrt();
            assert!((modulus - 1.0).abs() < 1e-10);
            assert!(
                re.abs() < 1e-10 || re.abs() > 1.0 - 1e-10,
                "eigenvalue not in {{±1, ±i}}"
            );
            assert!(cols[6].is_empty(), "unexpected warning: {}", cols[6]);
            rows += 1;
        }
        assert_eq!(rows, 64 * 4);
    }

    #[test]
    fn spectrum_hadamard_has_moving_branch() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig {
            coin: CoinChoice::Hadamard,
            k_grid: 64,
            ..temp_cfg(dir.path())
        };
        cmd_spectrum(&cfg).unwrap();
        let text = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
        let max_h = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(4).unwrap().parse::<f64>().unwrap().abs())
            .fold(0.0f64, f64::max);
        assert!(
            max_h > 0.1,
            "expected a spreading branch, max |h| = {max_h}"
        );
    }

    #[test]
    fn spectrum_grover_eigenvalues_grid_independent() {
        let collect_eigenvalues = |k_grid: usize| -> Vec<(f64, f64)> {
            let dir = tempfile::tempdir().unwrap();
            let cfg = RunConfig {
                k_grid,
                ..temp_cfg(dir.path())
            };
            cmd_spectrum(&cfg).unwrap();
            let text = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
            let mut vals: Vec<(f64, f64)> = text
                .lines()
                .skip(1)
                .map(|l| {
                    let cols: Vec<&str> = l.split(',').collect();
                    // snap to 6 decimals so the sets compare exactly
                    let re: f64 = cols[2].parse().unwrap();
                    let im: f64 = cols[3].parse().unwrap();
                    ((re * 1e6).round() / 1e6, (im * 1e6).round() / 1e6)
                })
                .collect();
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            vals.dedup();
            vals
        };
        assert_eq!(collect_eigenvalues(64), collect_eigenvalues(256));
    }

    #[test]
    fn limits_files_normalized_histogram() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig {
            horizon: 50,
            k_grid: 64,
            ..temp_cfg(dir.path())
        };
        cmd_limits(&cfg).unwrap();

        let hist = fs::read_to_string(dir.path().join("rescaled_hist.csv")).unwrap();
        let total: f64 = hist
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-9);

        let moments = fs::read_to_string(dir.path().join("moments.csv")).unwrap();
        assert!(moments.starts_with("r,spectral_value,empirical_value_at_horizon,abs_diff\n"));
        assert_eq!(moments.lines().count(), 5);
        for line in moments.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            let spectral: f64 = cols[1].parse().unwrap();
            let empirical: f64 = cols[2].parse().unwrap();
            assert!(spectral.abs() < 1e-3 && empirical.abs() < 1e-3);
        }
    }

    #[test]
    fn claims_json_schema_and_verdicts() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig {
            horizon: 60,
            k_grid: 64,
            ..temp_cfg(dir.path())
        };
        cmd_claims(&cfg).unwrap();
        let json = fs::read_to_string(dir.path().join("claims.json")).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        let arr = parsed.as_array().unwrap();
        assert!(!arr.is_empty());
        for entry in arr {
            let obj = entry.as_object().unwrap();
            for field in [
                "claim_id",
                "predicted",
                "observed",
                "tolerance",
                "verdict",
                "notes",
            ] {
                assert!(obj.contains_key(field), "missing {field}");
            }
            let verdict = obj["verdict"].as_str().unwrap();
            assert!(["CONFIRMED", "REFUTED", "INCONCLUSIVE"].contains(&verdict));
        }
        let text = fs::read_to_string(dir.path().join("claims.txt")).unwrap();
        assert!(text.contains("localization_origin"));
    }

    #[test]
    fn runs_are_bit_identical() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let mk = |dir: &Path| RunConfig {
            coin: CoinChoice::Hadamard,
            initial: [
                ComplexDef { re: 0.5, im: 0.0 },
                ComplexDef { re: 0.0, im: 0.5 },
                ComplexDef { re: 0.5, im: 0.0 },
                ComplexDef { re: 0.0, im: 0.5 },
            ],
            horizon: 24,
            k_grid: 64,
            output_dir: dir.to_path_buf(),
            seed: 0,
            stride: 2,
        };
        for cfg in [mk(dir_a.path()), mk(dir_b.path())] {
            cmd_simulate(&cfg).unwrap();
            cmd_spectrum(&cfg).unwrap();
            cmd_limits(&cfg).unwrap();
            cmd_claims(&cfg).unwrap();
        }
        for name in [
            "distribution.csv",
            "origin_sequence.csv",
            "spectrum.csv",
            "moments.csv",
            "rescaled_hist.csv",
            "claims.json",
            "claims.txt",
        ] {
            let a = fs::read(dir_a.path().join(name)).unwrap();
            let b = fs::read(dir_b.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} differs between identical runs");
        }
    }

    #[test]
    fn config_roundtrip_reproduces_outputs() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let cfg = RunConfig {
            horizon: 12,
            k_grid: 64,
            ..temp_cfg(dir_a.path())
        };
        let mut reread: RunConfig = serde_json::from_str(&cfg.to_json()).unwrap();
        reread.output_dir = dir_b.path().to_path_buf();
        cmd_simulate(&cfg).unwrap();
        cmd_simulate(&reread).unwrap();
        let a = fs::read(dir_a.path().join("distribution.csv")).unwrap();
        let b = fs::read(dir_b.path().join("distribution.csv")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let cfg = RunConfig {
            horizon: 0,
            ..RunConfig::default()
        };
        assert!(matches!(cmd_simulate(&cfg), Err(CommandError::Config(_))));
    }
}
