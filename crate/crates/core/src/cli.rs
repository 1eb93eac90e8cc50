//! Command implementations behind the `sta-dirac` binary: batch
//! verification, grid sampling, decomposition export, estimates and the
//! matrix/STA cross-checks. All outputs are deterministic for a fixed
//! (config, seed) pair, independent of evaluation concurrency.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{OutputFormat, RunConfig};
use crate::dirac::{
    apply_dirac_operator, evaluate_psi_matrix, family_fields, family_operators,
    hestenes_map_residual, PhaseConstants, SpinorField,
};
use crate::field::{decompose, evaluate_psi_sta, SpacetimePoint, UnitMode};
use crate::physics::estimate_report;
use crate::sta::BLADE_NAMES;
use crate::verify::{
    convergence_study, dirac_hestenes_residual, klein_gordon_residual, matrix_dirac_residual,
    ResidualFamily,
};
use crate::{DerivMode, Error, Result};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub seed: Option<u64>,
    pub kappa: Option<f64>,
    pub units: Option<String>,
}

/// Load the config file (or defaults) and apply overrides.
pub fn load_config(path: Option<&Path>, overrides: &Overrides) -> Result<RunConfig> {
    let mut cfg = match path {
        Some(p) => RunConfig::parse_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &overrides.out {
        cfg.output = Some(out.clone());
    }
    if let Some(format) = &overrides.format {
        cfg.format = format.parse()?;
    }
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }
    if let Some(kappa) = overrides.kappa {
        cfg.kappa = kappa;
    }
    if let Some(units) = &overrides.units {
        cfg.units = match units.as_str() {
            "natural" => UnitMode::Natural,
            "si" => UnitMode::Si,
            other => return Err(Error::Config(format!("unknown units '{other}' (natural|si)"))),
        };
    }
    Ok(cfg)
}

/// Outcome of one command: where the report went and whether every check
/// stayed within tolerance.
#[derive(Debug)]
pub struct CommandOutcome {
    pub path: PathBuf,
    pub pass: bool,
    pub summary: String,
}

impl CommandOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            EXIT_PASS
        } else {
            EXIT_TOLERANCE
        }
    }
}

fn fmt_float(v: f64) -> String {
    // 17 significant digits: lossless f64 round trip
    format!("{v:.16e}")
}

fn output_path(cfg: &RunConfig, stem: &str) -> PathBuf {
    cfg.output
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{stem}.{}", cfg.format.extension())))
}

// Write-then-rename so a failed run leaves no partial file behind.
fn write_atomic(path: &Path, bytes: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Seeded random events: log-uniform in r, isotropic direction, uniform t.
pub fn sample_points(cfg: &RunConfig) -> Vec<SpacetimePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (r_low, r_high) = cfg.r_range;
    let (t_low, t_high) = cfg.t_range;
    (0..cfg.samples)
        .map(|_| {
            let r = r_low * (r_high / r_low).powf(rng.gen::<f64>());
            let cos_th: f64 = rng.gen_range(-1.0..1.0);
            let sin_th = (1.0 - cos_th * cos_th).sqrt();
            let az = rng.gen_range(0.0..std::f64::consts::TAU);
            let t = rng.gen_range(t_low..t_high);
            SpacetimePoint::new(t, r * sin_th * az.cos(), r * sin_th * az.sin(), r * cos_th)
        })
        .collect()
}

fn json_record(pairs: &[(&str, String)]) -> String {
    let body: Vec<String> = pairs.iter().map(|(k, v)| format!("\"{k}\": {v}")).collect();
    format!("{{{}}}", body.join(", "))
}

fn json_array(records: &[String]) -> String {
    format!("[\n  {}\n]\n", records.join(",\n  "))
}

/// Run every residual suite and the convergence studies; pass iff every
/// analytic residual stays within tolerance and every FD family converges at
/// order 2 +/- 0.2.
pub fn cmd_verify(cfg: &RunConfig) -> Result<CommandOutcome> {
    let points = sample_points(cfg);
    let mut rows: Vec<(f64, &str, SpacetimePoint, f64, f64)> = Vec::new();
    let mut max_rel: f64 = 0.0;
    for &kappa in &cfg.kappas {
        let params = cfg.params_with_kappa(kappa)?;
        let evaluated: Vec<_> = points
            .par_iter()
            .map(|p| -> Result<[(f64, &str, SpacetimePoint, f64, f64); 3]> {
                let dh = dirac_hestenes_residual(&params, p, DerivMode::Analytic)?;
                let md = matrix_dirac_residual(&params, p, DerivMode::Analytic)?;
                let kg = klein_gordon_residual(&params, p, DerivMode::Analytic)?;
                Ok([
                    (kappa, "dirac_hestenes", *p, dh.residual_abs, dh.residual_rel),
                    (kappa, "matrix_dirac", *p, md.residual_abs, md.residual_rel),
                    (kappa, "klein_gordon", *p, kg.residual_abs, kg.residual_rel),
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        for triple in evaluated {
            for row in triple {
                max_rel = max_rel.max(row.4);
                rows.push(row);
            }
        }
    }

    // FD order studies on a small, fixed point subset
    let params = cfg.params()?;
    let study_points: Vec<SpacetimePoint> = points.iter().take(5).copied().collect();
    let mut studies = Vec::new();
    for family in [
        ResidualFamily::DiracHestenes,
        ResidualFamily::MatrixDirac,
        ResidualFamily::KleinGordon,
    ] {
        studies.push(convergence_study(&params, family, &study_points, &cfg.fd_steps)?);
    }

    let residuals_ok = max_rel <= cfg.tolerances.analytic;
    let orders_ok = studies
        .iter()
        .all(|s| !s.degenerate && (1.8..=2.2).contains(&s.fitted_order));
    let pass = residuals_ok && orders_ok;

    let path = output_path(cfg, "verify_report");
    let body = match cfg.format {
        OutputFormat::Csv => {
            let mut out = String::from("record,kappa,family,t,x,y,z,h,residual_abs,residual_rel\n");
            for (kappa, family, p, abs, rel) in &rows {
                let _ = writeln!(
                    out,
                    "residual,{},{family},{},{},{},{},,{},{}",
                    fmt_float(*kappa),
                    fmt_float(p.t),
                    fmt_float(p.x),
                    fmt_float(p.y),
                    fmt_float(p.z),
                    fmt_float(*abs),
                    fmt_float(*rel)
                );
            }
            for study in &studies {
                for (h, r) in study.steps.iter().zip(&study.residuals) {
                    let _ = writeln!(
                        out,
                        "fd_residual,{},{:?},,,,,{},,{}",
                        fmt_float(params.kappa()),
                        study.family,
                        fmt_float(*h),
                        fmt_float(*r)
                    );
                }
                let _ = writeln!(
                    out,
                    "fitted_order,{},{:?},,,,,,,{}",
                    fmt_float(params.kappa()),
                    study.family,
                    fmt_float(study.fitted_order)
                );
            }
            out
        }
        OutputFormat::Json => {
            let residuals: Vec<String> = rows
                .iter()
                .map(|(kappa, family, p, abs, rel)| {
                    json_record(&[
                        ("kappa", fmt_float(*kappa)),
                        ("family", format!("\"{family}\"")),
                        ("t", fmt_float(p.t)),
                        ("x", fmt_float(p.x)),
                        ("y", fmt_float(p.y)),
                        ("z", fmt_float(p.z)),
                        ("residual_abs", fmt_float(*abs)),
                        ("residual_rel", fmt_float(*rel)),
                    ])
                })
                .collect();
            let study_json: Vec<String> = studies
                .iter()
                .map(|s| serde_json::to_string(s).expect("report serialization"))
                .collect();
            format!(
                "{{\n\"pass\": {pass},\n\"max_residual_rel\": {},\n\"tolerance\": {},\n\"residuals\": {},\n\"convergence\": [{}]\n}}\n",
                fmt_float(max_rel),
                fmt_float(cfg.tolerances.analytic),
                json_array(&residuals),
                study_json.join(",\n")
            )
        }
    };
    write_atomic(&path, &body)?;

    let orders: Vec<String> = studies.iter().map(|s| format!("{:.3}", s.fitted_order)).collect();
    Ok(CommandOutcome {
        path,
        pass,
        summary: format!(
            "verify: {} points x {} kappas, max residual {max_rel:.3e} (tol {:.1e}), fd orders [{}] -> {}",
            points.len(),
            cfg.kappas.len(),
            cfg.tolerances.analytic,
            orders.join(", "),
            if pass { "PASS" } else { "FAIL" }
        ),
    })
}

/// Evaluate the field over the configured grid: 16 blade coefficients, the
/// 8 real components of the matrix spinor, and the field norm per record.
pub fn cmd_sample(cfg: &RunConfig) -> Result<CommandOutcome> {
    let params = cfg.params()?;
    let grid = cfg.validated_grid()?;
    let points = grid.points();
    let records: Vec<(SpacetimePoint, [f64; 16], [f64; 8], f64)> = points
        .par_iter()
        .map(|p| -> Result<_> {
            let psi = evaluate_psi_sta(&params, p)?;
            let spinor = evaluate_psi_matrix(&params, p, &PhaseConstants::u())?;
            let mut reals = [0.0; 8];
            for j in 0..4 {
                reals[2 * j] = spinor.0[j].re;
                reals[2 * j + 1] = spinor.0[j].im;
            }
            Ok((*p, psi.0, reals, psi.norm()))
        })
        .collect::<Result<Vec<_>>>()?;

    let spinor_names = ["re1", "im1", "re2", "im2", "re3", "im3", "re4", "im4"];
    let path = output_path(cfg, "sample");
    let body = match cfg.format {
        OutputFormat::Csv => {
            let mut out = String::from("t,x,y,z");
            for name in BLADE_NAMES {
                let _ = write!(out, ",{name}");
            }
            for name in spinor_names {
                let _ = write!(out, ",{name}");
            }
            out.push_str(",norm\n");
            for (p, coeffs, reals, norm) in &records {
                let mut row = format!(
                    "{},{},{},{}",
                    fmt_float(p.t),
                    fmt_float(p.x),
                    fmt_float(p.y),
                    fmt_float(p.z)
                );
                for c in coeffs {
                    let _ = write!(row, ",{}", fmt_float(*c));
                }
                for c in reals {
                    let _ = write!(row, ",{}", fmt_float(*c));
                }
                let _ = writeln!(out, "{row},{}", fmt_float(*norm));
            }
            out
        }
        OutputFormat::Json => {
            let objects: Vec<String> = records
                .iter()
                .map(|(p, coeffs, reals, norm)| {
                    let mut pairs: Vec<(&str, String)> = vec![
                        ("t", fmt_float(p.t)),
                        ("x", fmt_float(p.x)),
                        ("y", fmt_float(p.y)),
                        ("z", fmt_float(p.z)),
                    ];
                    for (name, c) in BLADE_NAMES.iter().zip(coeffs) {
                        pairs.push((name, fmt_float(*c)));
                    }
                    for (name, c) in spinor_names.iter().zip(reals) {
                        pairs.push((name, fmt_float(*c)));
                    }
                    pairs.push(("norm", fmt_float(*norm)));
                    json_record(&pairs)
                })
                .collect();
            json_array(&objects)
        }
    };
    write_atomic(&path, &body)?;
    Ok(CommandOutcome {
        path,
        pass: true,
        summary: format!("sample: {} records", records.len()),
    })
}

/// Export the three-term decomposition per grid point, with the relative
/// reconstruction error against the direct evaluation.
pub fn cmd_decompose(cfg: &RunConfig) -> Result<CommandOutcome> {
    let params = cfg.params()?;
    let grid = cfg.validated_grid()?;
    let points = grid.points();
    let records: Vec<(SpacetimePoint, [f64; 16], [f64; 16], [f64; 16], f64)> = points
        .par_iter()
        .map(|p| -> Result<_> {
            let psi = evaluate_psi_sta(&params, p)?;
            let d = decompose(&params, p)?;
            let recon = (d.total() - psi).norm() / psi.norm();
            Ok((*p, d.kg_term.0, d.spin_term.0, d.zitter_term.0, recon))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_recon = records.iter().map(|r| r.4).fold(0.0f64, f64::max);
    let pass = max_recon <= cfg.tolerances.decomposition;

    let path = output_path(cfg, "decompose");
    let body = match cfg.format {
        OutputFormat::Csv => {
            let mut out = String::from("t,x,y,z");
            for prefix in ["kg", "spin", "zit"] {
                for name in BLADE_NAMES {
                    let _ = write!(out, ",{prefix}_{name}");
                }
            }
            out.push_str(",recon_rel\n");
            for (p, kg, spin, zit, recon) in &records {
                let mut row = format!(
                    "{},{},{},{}",
                    fmt_float(p.t),
                    fmt_float(p.x),
                    fmt_float(p.y),
                    fmt_float(p.z)
                );
                for group in [kg, spin, zit] {
                    for c in group {
                        let _ = write!(row, ",{}", fmt_float(*c));
                    }
                }
                let _ = writeln!(out, "{row},{}", fmt_float(*recon));
            }
            out
        }
        OutputFormat::Json => {
            let objects: Vec<String> = records
                .iter()
                .map(|(p, kg, spin, zit, recon)| {
                    let mut pairs: Vec<(String, String)> = vec![
                        ("t".into(), fmt_float(p.t)),
                        ("x".into(), fmt_float(p.x)),
                        ("y".into(), fmt_float(p.y)),
                        ("z".into(), fmt_float(p.z)),
                    ];
                    for (prefix, group) in [("kg", kg), ("spin", spin), ("zit", zit)] {
                        for (name, c) in BLADE_NAMES.iter().zip(*group) {
                            pairs.push((format!("{prefix}_{name}"), fmt_float(c)));
                        }
                    }
                    pairs.push(("recon_rel".into(), fmt_float(*recon)));
                    let borrowed: Vec<(&str, String)> =
                        pairs.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
                    json_record(&borrowed)
                })
                .collect();
            json_array(&objects)
        }
    };
    write_atomic(&path, &body)?;
    Ok(CommandOutcome {
        path,
        pass,
        summary: format!(
            "decompose: {} records, max reconstruction error {max_recon:.3e} -> {}",
            records.len(),
            if pass { "PASS" } else { "FAIL" }
        ),
    })
}

/// Emit the desk-scale estimates in SI and natural units.
pub fn cmd_estimate(cfg: &RunConfig) -> Result<CommandOutcome> {
    let params = cfg.params()?;
    let report = estimate_report(&params).map_err(|e| Error::Config(e.to_string()))?;
    let path = output_path(cfg, "estimate");
    let body = match cfg.format {
        OutputFormat::Json => {
            format!("{}\n", serde_json::to_string_pretty(&report).expect("report serialization"))
        }
        OutputFormat::Csv => {
            let mut out = String::from("key,value\n");
            for (key, value) in [
                ("omega_rad_per_s", report.omega_rad_per_s),
                ("size_bound_m", report.size_bound_m),
                ("zitter_freq_hz", report.zitter_freq_hz),
                ("omega_natural", report.omega_natural),
                ("size_bound_natural", report.size_bound_natural),
                ("zitter_freq_natural", report.zitter_freq_natural),
                ("kappa_used_per_m", report.kappa_used_per_m),
            ] {
                let _ = writeln!(out, "{key},{}", fmt_float(value));
            }
            let _ = writeln!(out, "note,\"{}\"", report.note);
            out
        }
    };
    write_atomic(&path, &body)?;
    Ok(CommandOutcome {
        path,
        pass: true,
        summary: format!(
            "estimate: |omega| = {:.4e} rad/s, size bound = {:.4e} m, zitter = {:.4e} Hz (kappa = {:.3e} /m)",
            report.omega_rad_per_s, report.size_bound_m, report.zitter_freq_hz, report.kappa_used_per_m
        ),
    })
}

fn stats(values: &mut [f64]) -> (f64, f64, f64) {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite residuals"));
    let min = values[0];
    let max = values[values.len() - 1];
    let median = if values.len() % 2 == 1 {
        values[values.len() / 2]
    } else {
        0.5 * (values[values.len() / 2 - 1] + values[values.len() / 2])
    };
    (min, median, max)
}

/// Check the column map between the two formulations and the residuals of
/// all four closed-form family members over the seeded sample set.
pub fn cmd_crosscheck(cfg: &RunConfig) -> Result<CommandOutcome> {
    let params = cfg.params()?;
    let points = sample_points(cfg);
    let fields = family_fields(&params);
    let ops = family_operators();

    let per_point: Vec<(SpacetimePoint, f64, [f64; 4])> = points
        .par_iter()
        .map(|p| -> Result<_> {
            let hestenes = hestenes_map_residual(&params, p)?;
            let mut family = [0.0; 4];
            for (k, (field, op)) in fields.iter().zip(ops).enumerate() {
                let residual = apply_dirac_operator(op, field, p, DerivMode::Analytic)?;
                family[k] = residual.norm() / field.value(p)?.norm();
            }
            Ok((*p, hestenes, family))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut hestenes: Vec<f64> = per_point.iter().map(|r| r.1).collect();
    let hestenes_stats = stats(&mut hestenes);
    let mut family_stats = Vec::new();
    for k in 0..4 {
        let mut vals: Vec<f64> = per_point.iter().map(|r| r.2[k]).collect();
        family_stats.push(stats(&mut vals));
    }
    let max_rel = per_point
        .iter()
        .flat_map(|r| std::iter::once(r.1).chain(r.2))
        .fold(0.0f64, f64::max);
    let pass = max_rel <= cfg.tolerances.analytic;

    let member_names = ["d1_phi_e1", "d1_phi_e2", "d0_phi_e1", "d0_phi_e2"];
    let path = output_path(cfg, "crosscheck_report");
    let body = match cfg.format {
        OutputFormat::Csv => {
            let mut out = String::from("kind,member,t,x,y,z,residual_rel,min,median,max\n");
            for (p, hest, family) in &per_point {
                let coords = format!(
                    "{},{},{},{}",
                    fmt_float(p.t),
                    fmt_float(p.x),
                    fmt_float(p.y),
                    fmt_float(p.z)
                );
                let _ = writeln!(out, "point,hestenes,{coords},{},,,", fmt_float(*hest));
                for (name, value) in member_names.iter().zip(family) {
                    let _ = writeln!(out, "point,{name},{coords},{},,,", fmt_float(*value));
                }
            }
            let _ = writeln!(
                out,
                "stats,hestenes,,,,,,{},{},{}",
                fmt_float(hestenes_stats.0),
                fmt_float(hestenes_stats.1),
                fmt_float(hestenes_stats.2)
            );
            for (name, s) in member_names.iter().zip(&family_stats) {
                let _ = writeln!(
                    out,
                    "stats,{name},,,,,,{},{},{}",
                    fmt_float(s.0),
                    fmt_float(s.1),
                    fmt_float(s.2)
                );
            }
            out
        }
        OutputFormat::Json => {
            let stat_obj = |s: &(f64, f64, f64)| {
                json_record(&[
                    ("min", fmt_float(s.0)),
                    ("median", fmt_float(s.1)),
                    ("max", fmt_float(s.2)),
                ])
            };
            let members: Vec<String> = member_names
                .iter()
                .zip(&family_stats)
                .map(|(name, s)| format!("\"{name}\": {}", stat_obj(s)))
                .collect();
            format!(
                "{{\n\"pass\": {pass},\n\"max_residual_rel\": {},\n\"points\": {},\n\"hestenes\": {},\n{}\n}}\n",
                fmt_float(max_rel),
                per_point.len(),
                stat_obj(&hestenes_stats),
                members.join(",\n")
            )
        }
    };
    write_atomic(&path, &body)?;
    Ok(CommandOutcome {
        path,
        pass,
        summary: format!(
            "crosscheck: {} points, max residual {max_rel:.3e} -> {}",
            per_point.len(),
            if pass { "PASS" } else { "FAIL" }
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn temp_dir() -> PathBuf {
        let dir = std::env::temp_dir().join(format!("sta-dirac-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn sample_points_are_reproducible_and_in_range() {
        let cfg = RunConfig::default();
        let a = sample_points(&cfg);
        let b = sample_points(&cfg);
        assert_eq!(a, b);
        for p in &a {
            let r = p.r();
            assert!((0.1..=10.0).contains(&r));
            assert!((0.0..=10.0).contains(&p.t));
        }
        let mut other = RunConfig::default();
        other.seed = 43;
        assert_ne!(sample_points(&other), a);
    }

    #[test]
    fn sample_single_point_matches_hand_value() {
        let mut cfg = RunConfig::default();
        cfg.output = Some(temp_dir().join("single.csv"));
        let outcome = cmd_sample(&cfg).unwrap();
        let text = std::fs::read_to_string(&outcome.path).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("t,x,y,z,s,g0,"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        // psi(0, 1, 0, 0) = 2 + g2g0: scalar 2, g0g2 coefficient -1
        let scalar: f64 = row[4].parse().unwrap();
        let g0g2: f64 = row[9].parse().unwrap();
        assert_eq!(scalar, 2.0);
        assert_eq!(g0g2, -1.0);
    }

    #[test]
    fn sample_runs_are_byte_identical() {
        let dir = temp_dir();
        let mut cfg = RunConfig::parse_str(
            "grid_t = 0.0, 0.5\ngrid_x = 0.5, 1.0\ngrid_y = -0.5, 0.5\ngrid_z = 0.25\n",
        )
        .unwrap();
        cfg.output = Some(dir.join("a.csv"));
        cmd_sample(&cfg).unwrap();
        cfg.output = Some(dir.join("b.csv"));
        cmd_sample(&cfg).unwrap();
        let a = std::fs::read(dir.join("a.csv")).unwrap();
        let b = std::fs::read(dir.join("b.csv")).unwrap();
        assert_eq!(a, b);
        assert!(!a.is_empty());
    }

    #[test]
    fn empty_grid_gives_header_only() {
        let dir = temp_dir();
        let mut cfg = RunConfig::parse_str("grid_t = \n").unwrap();
        cfg.output = Some(dir.join("empty.csv"));
        let outcome = cmd_sample(&cfg).unwrap();
        let text = std::fs::read_to_string(&outcome.path).unwrap();
        assert_eq!(text.lines().count(), 1);
    }

    #[test]
    fn decompose_record_count_and_recon() {
        let dir = temp_dir();
        let mut cfg = RunConfig::parse_str(
            "grid_t = 0.0, 1.0\ngrid_x = 0.5, 1.5\ngrid_y = 0.0\ngrid_z = 0.0, 0.7\n",
        )
        .unwrap();
        cfg.output = Some(dir.join("dec.csv"));
        let outcome = cmd_decompose(&cfg).unwrap();
        assert!(outcome.pass);
        let text = std::fs::read_to_string(&outcome.path).unwrap();
        assert_eq!(text.lines().count(), 1 + 8);
        // z = 0 rows have all-zero zitter columns
        let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
        let zit_cols: Vec<usize> = header
            .iter()
            .enumerate()
            .filter(|(_, name)| name.starts_with("zit_"))
            .map(|(i, _)| i)
            .collect();
        for line in text.lines().skip(1) {
            let cells: Vec<&str> = line.split(',').collect();
            if cells[3].parse::<f64>().unwrap() == 0.0 {
                for &c in &zit_cols {
                    assert_eq!(cells[c].parse::<f64>().unwrap(), 0.0);
                }
            }
        }
    }

    #[test]
    fn verify_small_run_passes() {
        let dir = temp_dir();
        let mut cfg = RunConfig::default();
        cfg.samples = 25;
        cfg.format = OutputFormat::Json;
        cfg.output = Some(dir.join("verify.json"));
        let outcome = cmd_verify(&cfg).unwrap();
        assert!(outcome.pass, "{}", outcome.summary);
        let text = std::fs::read_to_string(&outcome.path).unwrap();
        assert!(text.contains("\"pass\": true"));
        serde_json::from_str::<serde_json::Value>(&text).unwrap();
    }

    #[test]
    fn verify_unachievable_tolerance_fails() {
        let dir = temp_dir();
        let mut cfg = RunConfig::default();
        cfg.samples = 10;
        cfg.tolerances.analytic = 1e-16;
        cfg.output = Some(dir.join("verify_fail.csv"));
        let outcome = cmd_verify(&cfg).unwrap();
        assert!(!outcome.pass);
        assert_eq!(outcome.exit_code(), EXIT_TOLERANCE);
    }

    #[test]
    fn crosscheck_small_run() {
        let dir = temp_dir();
        let mut cfg = RunConfig::default();
        cfg.samples = 20;
        cfg.kappa = 0.3;
        cfg.format = OutputFormat::Json;
        cfg.output = Some(dir.join("cross.json"));
        let outcome = cmd_crosscheck(&cfg).unwrap();
        assert!(outcome.pass, "{}", outcome.summary);
        let text = std::fs::read_to_string(&outcome.path).unwrap();
        assert!(text.contains("\"median\""));
        serde_json::from_str::<serde_json::Value>(&text).unwrap();
    }

    #[test]
    fn estimate_reports_si_values() {
        let dir = temp_dir();
        let mut cfg = RunConfig::default();
        cfg.format = OutputFormat::Json;
        cfg.output = Some(dir.join("estimate.json"));
        let outcome = cmd_estimate(&cfg).unwrap();
        let text = std::fs::read_to_string(&outcome.path).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        let omega = value["omega_rad_per_s"].as_f64().unwrap();
        assert!((omega / 7.763e20 - 1.0).abs() < 1e-3);
        assert!(value["note"].as_str().unwrap().contains("1e-14"));
    }

    #[test]
    fn overrides_apply() {
        let ov = Overrides {
            seed: Some(9),
            kappa: Some(0.2),
            format: Some("json".into()),
            ..Default::default()
        };
        let cfg = load_config(None, &ov).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.kappa, 0.2);
        assert_eq!(cfg.format, OutputFormat::Json);
        let bad = Overrides { units: Some("imperial".into()), ..Default::default() };
        assert!(matches!(load_config(None, &bad), Err(Error::Config(_))));
    }
}
