//! File writers. Column sets are part of the public contract and pinned by
//! golden tests.

use std::fs;
use std::path::{Path, PathBuf};

use qnoise::noise::NoisePath;
use qnoise::qubit::EnsembleMetrics;
use qnoise::sde::{EnsembleStats, SdeIntegrator};

use crate::config::{flatten, fmt_f64, LoadedConfig, Scenario};
use crate::error::CliError;
use crate::plot::{emit_plot, PlotKind, PlotSpec};
use crate::run::{NoiseSpectrum, Outcome, VariantOutcome};

pub const STATS_COLUMNS: [&str; 4] = ["t", "mean", "std", "n_traj"];
pub const METRICS_COLUMNS: [&str; 7] = [
    "t",
    "fidelity_mean",
    "fidelity_std",
    "coherence_mean",
    "coherence_std",
    "pe_mean",
    "pe_std",
];
pub const SPECTRUM_COLUMNS: [&str; 2] = ["f", "psd"];
pub const PATH_COLUMNS: [&str; 2] = ["t", "value"];

pub const RNG_DESCRIPTION: &str = "ChaCha8Rng (rand_chacha) via seed_from_u64, StandardNormal (rand_distr)";
pub const SEED_RULE: &str = "trajectory k uses base_seed + k (wrapping)";

pub fn version() -> String {
    format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
        self.files.push(path.clone());
        Ok(path)
    }

    fn text(&mut self, name: &str, body: &str) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        self.files.push(path.clone());
        Ok(path)
    }

    fn plot(&mut self, csv: &Path, name: &str, spec: PlotSpec) -> Result<(), CliError> {
        let path = self.path(name);
        emit_plot(csv, &spec, &path)?;
        self.files.push(path);
        Ok(())
    }

    fn stats(&mut self, name: &str, s: &EnsembleStats) -> Result<PathBuf, CliError> {
        let n = s.n_traj.to_string();
        self.csv(
            name,
            &STATS_COLUMNS,
            (0..s.grid.len()).map(|i| {
                vec![
                    fmt_f64(s.grid.time(i)),
                    fmt_f64(s.mean[i]),
                    fmt_f64(s.std[i]),
                    n.clone(),
                ]
            }),
        )
    }

    fn metrics(&mut self, name: &str, m: &EnsembleMetrics) -> Result<PathBuf, CliError> {
        self.csv(
            name,
            &METRICS_COLUMNS,
            (0..m.grid.len()).map(|i| {
                [
                    m.grid.time(i),
                    m.fidelity.mean[i],
                    m.fidelity.std[i],
                    m.coherence.mean[i],
                    m.coherence.std[i],
                    m.excited_population.mean[i],
                    m.excited_population.std[i],
                ]
                .map(fmt_f64)
                .to_vec()
            }),
        )
    }

    fn paths(&mut self, stem: &str, suffix: &str, paths: &[NoisePath]) -> Result<(), CliError> {
        for (k, p) in paths.iter().enumerate() {
            self.csv(
                &format!("{stem}_{k}{suffix}.csv"),
                &PATH_COLUMNS,
                (0..p.grid.len()).map(|i| vec![fmt_f64(p.grid.time(i)), fmt_f64(p.values[i])]),
            )?;
        }
        Ok(())
    }

    fn spectrum(&mut self, stem: &str, s: &NoiseSpectrum) -> Result<(), CliError> {
        let e = &s.estimate;
        self.csv(
            &format!("{stem}.csv"),
            &SPECTRUM_COLUMNS,
            e.frequencies
                .iter()
                .zip(&e.psd)
                .map(|(f, p)| vec![fmt_f64(*f), fmt_f64(*p)]),
        )?;
        let mut kv = Vec::new();
        match &s.fit {
            Ok(fit) => {
                kv.push(("beta_hat", fmt_f64(fit.beta_hat)));
                kv.push(("stderr", fmt_f64(fit.stderr)));
                kv.push(("f_lo", fmt_f64(fit.f_lo)));
                kv.push(("f_hi", fmt_f64(fit.f_hi)));
                kv.push(("bins", fit.bins.to_string()));
            }
            Err(msg) => {
                kv.push(("f_lo", fmt_f64(s.band.0)));
                kv.push(("f_hi", fmt_f64(s.band.1)));
                kv.push(("error", msg.clone()));
            }
        }
        kv.push(("target", s.target.name().to_string()));
        kv.push(("method", e.method.name().to_string()));
        kv.push(("segment_length", e.segment_length.to_string()));
        self.text(&format!("{stem}_fit.txt"), &render_kv(&kv))
            .map(|_| ())
    }
}

fn render_kv<K: AsRef<str>>(entries: &[(K, String)]) -> String {
    entries
        .iter()
        .map(|(k, v)| format!("{} = {}\n", k.as_ref(), v))
        .collect()
}

fn band_spec(title: &str) -> PlotSpec {
    PlotSpec {
        title: title.to_string(),
        x: "t".into(),
        kind: PlotKind::Band {
            mean: "mean".into(),
            std: "std".into(),
        },
        log_y: false,
    }
}

fn derived(prefix: &str, s: &Scenario, out: &mut Vec<(String, String)>) {
    out.push((format!("{prefix}grid.dt"), fmt_f64(s.spec.grid.dt())));
    out.push((format!("{prefix}sde.integrator"), s.integrator.name().to_string()));
    if let Ok(integ) = SdeIntegrator::new(&s.spec, s.integrator) {
        out.push((format!("{prefix}sde.noise_amplitude"), fmt_f64(integ.noise_amplitude())));
    }
    if let Some(q) = &s.qubit {
        out.push((format!("{prefix}qubit.frame"), q.params.frame.name().to_string()));
    }
    if let Some(lb) = &s.lindblad {
        out.push((format!("{prefix}lindblad.relaxation_rate"), fmt_f64(lb.relaxation_rate())));
        out.push((format!("{prefix}lindblad.dephasing_rate"), fmt_f64(lb.dephasing_rate())));
    }
}

/// Writes every artifact of a finished run into `dir` and returns the paths,
/// manifest last.
pub fn write_run(
    cfg: &LoadedConfig,
    outcomes: &[VariantOutcome],
    dir: &Path,
    plot: bool,
) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut w = Writer {
        dir,
        files: Vec::new(),
    };
    let mut manifest: Vec<(String, String)> = vec![
        ("software".into(), version()),
        ("source".into(), cfg.origin.clone()),
        ("rng".into(), RNG_DESCRIPTION.into()),
        ("seed_rule".into(), SEED_RULE.into()),
        ("overrides".into(), cfg.overrides.len().to_string()),
    ];
    for (i, o) in cfg.overrides.iter().enumerate() {
        manifest.push((format!("override.{i}"), o.raw.clone()));
    }
    for (k, v) in flatten(&cfg.resolved) {
        manifest.push((format!("config.{k}"), v));
    }
    let resolved = toml::to_string(&cfg.resolved).expect("config serializes");
    w.text("scenario.toml", &resolved)?;

    for (variant, vo) in cfg.variants.iter().zip(outcomes) {
        let suffix = vo.label.as_ref().map(|l| format!("_{l}")).unwrap_or_default();
        let dprefix = match &vo.label {
            Some(l) => format!("derived.{l}."),
            None => "derived.".into(),
        };
        let rprefix = match &vo.label {
            Some(l) => format!("result.{l}."),
            None => "result.".into(),
        };
        derived(&dprefix, &variant.scenario, &mut manifest);
        let mut result = |k: &str, v: String| manifest.push((format!("{rprefix}{k}"), v));
        match &vo.outcome {
            Outcome::Sde(o) => {
                let csv = w.stats(&format!("ensemble_stats{suffix}.csv"), &o.stats)?;
                w.paths("path", &suffix, &o.paths)?;
                let last = o.stats.grid.steps();
                result("chi_final_mean", fmt_f64(o.stats.mean[last]));
                result("chi_final_std", fmt_f64(o.stats.std[last]));
                if plot {
                    let title = format!("{} chi(t), mean ± 1 std{}", cfg.resolved.name, suffix.replace('_', " "));
                    w.plot(&csv, &format!("ensemble_stats{suffix}.svg"), band_spec(&title))?;
                }
            }
            Outcome::Qubit(o) => {
                let noise_csv = w.stats(&format!("noise_stats{suffix}.csv"), &o.noise)?;
                let metrics_csv = w.metrics(&format!("metrics{suffix}.csv"), &o.metrics)?;
                w.paths("noise_path", &suffix, &o.paths)?;
                w.spectrum(&format!("spectrum_path{suffix}"), &o.spectra.path)?;
                w.spectrum(&format!("spectrum_increments{suffix}"), &o.spectra.increments)?;

                match &o.decay {
                    Ok(fit) => {
                        result("t2_star", fmt_f64(fit.t2_star));
                        result("t2_star_stderr", fmt_f64(fit.stderr));
                        result("t2_star_residual_std", fmt_f64(fit.residual_std));
                    }
                    Err(msg) => result("t2_star", format!("rejected ({msg})")),
                }
                let win = variant.scenario.analysis.decay_window;
                result("decay_window", format!("[{}, {}]", fmt_f64(win.0), fmt_f64(win.1)));
                for s in [&o.spectra.path, &o.spectra.increments] {
                    let name = s.target.name();
                    match &s.fit {
                        Ok(f) => {
                            result(&format!("beta_hat_{name}"), fmt_f64(f.beta_hat));
                            result(&format!("beta_hat_{name}_stderr"), fmt_f64(f.stderr));
                        }
                        Err(msg) => result(&format!("beta_hat_{name}"), format!("rejected ({msg})")),
                    }
                    result(
                        &format!("spectral_band_{name}"),
                        format!("[{}, {}]", fmt_f64(s.band.0), fmt_f64(s.band.1)),
                    );
                }
                if let Some((beta, tol)) = variant.scenario.analysis.reference_beta {
                    let matched = o.spectra.matching(beta, tol);
                    let text = if matched.is_empty() {
                        "none".to_string()
                    } else {
                        matched.iter().map(|t| t.name()).collect::<Vec<_>>().join(",")
                    };
                    result("spectral_reference", format!("{} ± {}", fmt_f64(beta), fmt_f64(tol)));
                    result("spectral_match", text);
                }
                result("coherence_revivals", o.revivals.len().to_string());
                let pe_max = o.metrics.excited_population.mean.iter().copied().fold(0.0, f64::max);
                result("pe_mean_max", fmt_f64(pe_max));
                let last = o.metrics.grid.steps();
                result("fidelity_final_mean", fmt_f64(o.metrics.fidelity.mean[last]));
                result("coherence_final_mean", fmt_f64(o.metrics.coherence.mean[last]));
                if plot {
                    let name = &cfg.resolved.name;
                    w.plot(
                        &noise_csv,
                        &format!("noise_stats{suffix}.svg"),
                        band_spec(&format!("{name} noise field chi(t)")),
                    )?;
                    w.plot(
                        &metrics_csv,
                        &format!("metrics{suffix}.svg"),
                        PlotSpec {
                            title: format!("{name} ensemble-mean qubit metrics"),
                            x: "t".into(),
                            kind: PlotKind::Lines(vec![
                                "fidelity_mean".into(),
                                "coherence_mean".into(),
                                "pe_mean".into(),
                            ]),
                            log_y: true,
                        },
                    )?;
                }
            }
        }
    }

    let files: Vec<String> = w
        .files
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    manifest.push(("files".into(), files.join(", ")));
    w.text("manifest.txt", &render_kv(&manifest))?;
    Ok(w.files)
}

/// Parses a `key = value` manifest or fit file.
pub fn read_kv(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}
