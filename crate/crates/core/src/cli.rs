//! Command-line front end: configuration loading and the subcommands of the
//! `biphoton` binary.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::correlation::{delay_range, fwhm, fwhm_of, g1_envelope, g2};
use crate::crystal::{
    group_params, solve_collinear_pm_angle, CrystalConfig, GroupParams, PhaseMatchingType, Polarization, SellmeierSet,
};
use crate::export::{self, Artifact, Format, Table};
use crate::interferometry::{hom_closed, hom_general, michelson, visibility, InterferencePattern, Sign};
use crate::montecarlo::{extract_coincidences, simulate_mca, simulate_visibility_chain, CountingConfig};
use crate::spectral::{
    build_type1, build_type2, DetuningGrid, FilterSpec, SpectralAmplitude, DEFAULT_TYPE1_ZEROS,
    DEFAULT_TYPE2_ZEROS,
};
use crate::tuning::{default_pair_grid, pair_window, ApertureGeometry, Branch, NoncollinearSetup, PairWindow};
use crate::{reproduce, Error, Result};

/// The `paper` preset: 2 mm BBO pumped at 351.1 nm, ±3° type-I emission, 3 mm
/// apertures at 2.8 m, 3 ns coincidence window with the accidental window
/// 10 ns later.
pub const PAPER_PRESET: &str = r#"{
  "crystal": {
    "length_um": 2000.0,
    "cut_angle_deg": 0.0,
    "sellmeier_o": "bbo_kato1986_o.json",
    "sellmeier_e": "bbo_kato1986_e.json"
  },
  "pump_nm": 351.1,
  "pm_type": "II",
  "filters": { "signal": null, "idler": null },
  "apertures": {
    "signal": { "center_angle_deg": 3.0, "distance_mm": 2800.0, "diameter_mm": 3.0 },
    "idler": { "center_angle_deg": -3.0, "distance_mm": 2800.0, "diameter_mm": 3.0 }
  },
  "degenerate_ext_deg": 3.0,
  "grid": { "points": 16385, "zeros": null },
  "tau": { "start": -600.0, "stop": 600.0, "step": 0.2 },
  "dispersion_beta_fs2": 0.0,
  "analyzers_deg": null,
  "hom_sign": "minus",
  "wavelengths": { "start": 640.0, "stop": 780.0, "step": 1.0 },
  "counting": {
    "pair_rate": 100000.0,
    "singles_excess_rate": [0.0, 0.0],
    "window_width_ns": 3.0,
    "accidental_offset_ns": 10.0,
    "duration_s": 1.0,
    "jitter_sigma_ns": 0.3,
    "rng_seed": 7,
    "shards": 16,
    "stop_delay_ns": 20.0,
    "tac_range_ns": 50.0,
    "bin_width_ns": 0.1
  },
  "mca_rate": 0.5,
  "visibility": {
    "true_visibility": 0.86,
    "calibration_raw": 0.32,
    "calibration_filter_nm": 80.0,
    "filters_nm": [3.0, 20.0, 80.0],
    "true_coincidences": 200000.0
  }
}"#;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalSection {
    pub length_um: f64,
    pub cut_angle_deg: f64,
    /// File name inside the data directory, or a path.
    pub sellmeier_o: String,
    pub sellmeier_e: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterPair {
    pub signal: Option<FilterSpec>,
    pub idler: Option<FilterSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AperturePair {
    pub signal: ApertureGeometry,
    pub idler: ApertureGeometry,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub points: usize,
    /// Half-span in sinc zeros; `null` picks the per-type default.
    pub zeros: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSection {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl RangeSection {
    fn values(&self, field: &str) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !(self.stop >= self.start) || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::Config(format!(
                "{field}: need start ≤ stop and step > 0, got {} .. {} step {}",
                self.start, self.stop, self.step
            )));
        }
        Ok(delay_range(self.start, self.stop, self.step))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VisibilitySection {
    pub true_visibility: f64,
    /// Raw visibility the brightness is calibrated to.
    pub calibration_raw: f64,
    /// Filter FWHM of the calibration regime.
    pub calibration_filter_nm: f64,
    pub filters_nm: Vec<f64>,
    /// Target coincidences in the baseline run.
    pub true_coincidences: f64,
}

/// Complete run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub crystal: CrystalSection,
    pub pump_nm: f64,
    pub pm_type: PhaseMatchingType,
    pub filters: FilterPair,
    pub apertures: AperturePair,
    pub degenerate_ext_deg: f64,
    pub grid: GridSection,
    pub tau: RangeSection,
    pub dispersion_beta_fs2: f64,
    pub analyzers_deg: Option<[f64; 2]>,
    pub hom_sign: Sign,
    pub wavelengths: RangeSection,
    pub counting: CountingConfig,
    pub mca_rate: f64,
    pub visibility: VisibilitySection,
}

/// Deep merge of `over` into `base`; objects merge key by key.
fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Data directory for Sellmeier files: `SPDC_DATA_DIR` or the crate's `data/`.
pub fn data_dir() -> PathBuf {
    std::env::var_os("SPDC_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("data"))
}

fn resolve_data_file(name: &str) -> PathBuf {
    let p = Path::new(name);
    if p.is_absolute() || p.components().count() > 1 {
        p.to_path_buf()
    } else {
        data_dir().join(p)
    }
}

/// Amplitude plus the operating point it was built at.
#[derive(Debug, Clone)]
pub struct Built {
    pub amplitude: SpectralAmplitude,
    pub theta_pm_deg: f64,
    pub params: GroupParams,
    pub pm_type: PhaseMatchingType,
}

impl RunConfig {
    /// The `paper` preset.
    pub fn paper() -> Self {
        Self::from_value(serde_json::from_str(PAPER_PRESET).expect("preset is valid JSON"), Path::new("<preset>"))
            .expect("preset matches RunConfig")
    }

    fn from_value(v: Value, path: &Path) -> Result<Self> {
        serde_json::from_value(v).map_err(|e| Error::Parse { path: path.to_path_buf(), message: e.to_string() })
    }

    /// Loads a config file; `"defaults": "paper"` (or `force_preset`)
    /// layers it over the paper preset.
    pub fn load(path: Option<&Path>, force_preset: bool) -> Result<Self> {
        let preset: Value = serde_json::from_str(PAPER_PRESET).expect("preset is valid JSON");
        let Some(path) = path else {
            return Self::from_value(preset, Path::new("<preset>"));
        };
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        let mut user: Value =
            serde_json::from_str(&text).map_err(|e| Error::Parse { path: path.to_path_buf(), message: e.to_string() })?;
        let defaults = user.as_object_mut().and_then(|o| o.remove("defaults"));
        let use_preset = match defaults {
            None => force_preset,
            Some(Value::String(s)) if s == "paper" => true,
            Some(other) => {
                return Err(Error::Config(format!("defaults: only \"paper\" is supported, got {other}")));
            }
        };
        let merged = if use_preset {
            let mut base = preset;
            merge(&mut base, user);
            base
        } else {
            user
        };
        Self::from_value(merged, path)
    }

    pub fn crystal(&self) -> Result<CrystalConfig> {
        let o = SellmeierSet::from_file(resolve_data_file(&self.crystal.sellmeier_o))?;
        let e = SellmeierSet::from_file(resolve_data_file(&self.crystal.sellmeier_e))?;
        CrystalConfig::new(self.crystal.length_um, self.crystal.cut_angle_deg, o, e)
    }

    pub fn degenerate_nm(&self) -> f64 {
        2.0 * self.pump_nm
    }

    pub fn taus(&self) -> Result<Vec<f64>> {
        self.tau.values("tau")
    }

    /// Amplitude of the configured type, filtered and dispersed as configured.
    pub fn amplitude(&self, crystal: &CrystalConfig) -> Result<Built> {
        self.amplitude_of(crystal, self.pm_type)
    }

    pub fn amplitude_of(&self, crystal: &CrystalConfig, pm_type: PhaseMatchingType) -> Result<Built> {
        let raw = self.unfiltered(crystal, pm_type)?;
        let mut amp = raw.amplitude.clone();
        let deg = self.degenerate_nm();
        if self.filters.signal.is_some() || self.filters.idler.is_some() {
            let s = self.filters.signal.unwrap_or(FilterSpec::open(deg));
            let i = self.filters.idler.unwrap_or(FilterSpec::open(deg));
            amp = amp.apply_filters(&s, &i)?;
        }
        amp = amp.apply_quadratic_phase(self.dispersion_beta_fs2);
        Ok(Built { amplitude: amp, ..raw })
    }

    /// Bare phase-matching amplitude of `pm_type`.
    pub fn unfiltered(&self, crystal: &CrystalConfig, pm_type: PhaseMatchingType) -> Result<Built> {
        let deg = self.degenerate_nm();
        let theta = solve_collinear_pm_angle(self.pump_nm, deg, pm_type, crystal)?;
        let params = group_params(crystal, deg, theta)?;
        let l = crystal.length_um;
        let amplitude = match pm_type {
            PhaseMatchingType::TypeII => {
                let zeros = self.grid.zeros.unwrap_or(DEFAULT_TYPE2_ZEROS);
                let grid = DetuningGrid::for_type2(params.d_fs_per_um * l, zeros, self.grid.points)?;
                build_type2(params.d_fs_per_um, l, &grid, deg)?
            }
            PhaseMatchingType::TypeI => {
                let zeros = self.grid.zeros.unwrap_or(DEFAULT_TYPE1_ZEROS);
                let grid = DetuningGrid::for_type1(params.dpp_fs2_per_um * l, zeros, self.grid.points)?;
                build_type1(params.dpp_fs2_per_um, l, &grid, deg)?
            }
        };
        Ok(Built { amplitude, theta_pm_deg: theta, params, pm_type })
    }

    /// Non-collinear type-I source calibrated to `degenerate_ext_deg`.
    pub fn noncollinear(&self, crystal: &CrystalConfig) -> Result<NoncollinearSetup> {
        NoncollinearSetup::calibrate(crystal.clone(), self.pump_nm, self.degenerate_ext_deg)
    }

    pub fn pair_window_for(&self, setup: &NoncollinearSetup, filter_fwhm_nm: Option<f64>) -> Result<PairWindow> {
        let deg = self.degenerate_nm();
        let (s, i) = match filter_fwhm_nm {
            Some(w) => (FilterSpec::gaussian(deg, w), FilterSpec::gaussian(deg, w)),
            None => (
                self.filters.signal.unwrap_or(FilterSpec::open(deg)),
                self.filters.idler.unwrap_or(FilterSpec::open(deg)),
            ),
        };
        pair_window(setup, &self.apertures.signal, &self.apertures.idler, &s, &i, &default_pair_grid())
    }
}

#[derive(Debug, Parser)]
#[command(name = "biphoton", version, about = "SPDC one- and two-photon wavepacket calculations")]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Overrides counting.rng_seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Layer the configuration over a named preset.
    #[arg(long, global = true, value_parser = ["paper"])]
    pub preset: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Refractive and group indices over the wavelength range.
    Indices,
    /// Collinear phase-matching angle and group parameters.
    PmAngle,
    /// Spectral amplitude T(ν).
    Spectrum,
    /// First-order correlation envelope g¹(τ).
    G1,
    /// Second-order correlation G²(τ).
    G2,
    /// Michelson single-count fringes.
    Michelson,
    /// Coincidence dip or peak behind the beamsplitter.
    Hom,
    /// Non-collinear type-I tuning curve.
    Tuning,
    /// Pair-detectable spectral window for the apertures and filters.
    PairWindow,
    /// Monte-Carlo TAC/MCA histogram and visibility chain.
    McaSim,
    /// Runs every numerical check and prints a pass/fail table.
    ReproducePaper,
}

/// Parses `args` and executes the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let mut cfg = RunConfig::load(cli.config.as_deref(), cli.preset.is_some())?;
    if let Some(seed) = cli.seed {
        cfg.counting.rng_seed = seed;
    }
    let out = &cli.out;
    let written = execute(cli.command, &cfg, out, cli.format)?;
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn artifact<'a>(stem: &'a str, kind: &'a str, table: Table, meta: Value, plot: Option<(usize, usize)>) -> Artifact<'a> {
    Artifact { stem, kind, table, meta, plot }
}

fn pattern_meta(p: &InterferencePattern, extra: Value) -> Value {
    let mut m = json!({
        "mode": p.mode,
        "analyzer_deg": p.analyzer_deg,
        "sign": p.sign,
        "carrier_omega_rad_per_fs": p.carrier_omega,
        "delay_offset_fs": p.delay_offset_fs,
        "source": p.source,
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut m, extra) {
        m.extend(e);
    }
    m
}

/// Runs one command against a resolved configuration.
pub fn execute(command: Command, cfg: &RunConfig, out: &Path, format: Format) -> Result<Vec<PathBuf>> {
    let crystal = cfg.crystal()?;
    let write = |a: Artifact| export::write_artifact(out, format, &a);
    match command {
        Command::Indices => {
            let deg = cfg.degenerate_nm();
            let theta = solve_collinear_pm_angle(cfg.pump_nm, deg, cfg.pm_type, &crystal)?;
            let mut t = Table::new(&["lambda_nm", "n_o", "n_e", "n_e_theta", "group_index_o", "group_index_e_theta"]);
            for l in cfg.wavelengths.values("wavelengths")? {
                t.push([
                    l,
                    crystal.index(l, Polarization::Ordinary, 0.0)?,
                    crystal.index(l, Polarization::Extraordinary, 90.0)?,
                    crystal.index(l, Polarization::Extraordinary, theta)?,
                    crystal.group_index(l, Polarization::Ordinary, 0.0)?,
                    crystal.group_index(l, Polarization::Extraordinary, theta)?,
                ]);
            }
            write(artifact(
                "indices",
                "indices",
                t,
                json!({"theta_deg": theta, "sellmeier": [crystal.sellmeier_o.name, crystal.sellmeier_e.name]}),
                Some((0, 1)),
            ))
        }
        Command::PmAngle => {
            let mut t = Table::new(&["pm_type", "theta_pm_deg", "d_fs_per_um", "dpp_fs2_per_um", "half_dl_fs"]);
            let mut rows = Vec::new();
            for ty in [PhaseMatchingType::TypeI, PhaseMatchingType::TypeII] {
                let deg = cfg.degenerate_nm();
                let theta = solve_collinear_pm_angle(cfg.pump_nm, deg, ty, &crystal)?;
                let gp = group_params(&crystal, deg, theta)?;
                let name = match ty {
                    PhaseMatchingType::TypeI => "I",
                    PhaseMatchingType::TypeII => "II",
                };
                let half = gp.d_fs_per_um * crystal.length_um / 2.0;
                t.push([
                    name.to_string(),
                    theta.to_string(),
                    gp.d_fs_per_um.to_string(),
                    gp.dpp_fs2_per_um.to_string(),
                    half.to_string(),
                ]);
                rows.push(json!({"pm_type": name, "theta_pm_deg": theta, "group": gp, "half_dl_fs": half}));
            }
            write(artifact("pm_angle", "pm_angle", t, json!({"pump_nm": cfg.pump_nm, "results": rows}), None))
        }
        Command::Spectrum => {
            let b = cfg.amplitude(&crystal)?;
            let meta = json!({
                "source": b.amplitude.description,
                "kind_of_amplitude": b.amplitude.kind,
                "center_omega_rad_per_fs": b.amplitude.center_omega,
                "grid_spacing_rad_per_fs": b.amplitude.grid.spacing(),
                "theta_pm_deg": b.theta_pm_deg,
                "group": b.params,
            });
            write(artifact("spectrum", "spectrum", export::spectrum_table(&b.amplitude), meta, Some((0, 3))))
        }
        Command::G1 | Command::G2 => {
            let b = cfg.amplitude(&crystal)?;
            let taus = cfg.taus()?;
            let (trace, stem) = if command == Command::G1 {
                (g1_envelope(&b.amplitude, &taus)?, "g1")
            } else {
                (g2(&b.amplitude, &taus)?, "g2")
            };
            let width = fwhm(&trace).ok();
            let meta = json!({
                "source": trace.source,
                "normalization": trace.normalization,
                "fwhm_fs": width.map(|w| w.fwhm_fs),
                "multimodal": width.map(|w| w.multimodal),
            });
            write(artifact(stem, stem, export::trace_table(&trace), meta, Some((0, 1))))
        }
        Command::Michelson => {
            let b = cfg.amplitude(&crystal)?;
            let p = michelson(&b.amplitude, &cfg.taus()?)?;
            let env = p.envelope.clone().unwrap_or_default();
            let width = fwhm_of(&p.tau, &env).ok().map(|w| w.fwhm_fs);
            let mut paths = write(artifact(
                "michelson",
                "michelson",
                export::pattern_table(&p),
                pattern_meta(&p, json!({"envelope_fwhm_fs": width})),
                Some((0, 1)),
            ))?;
            let mut t = Table::new(&["tau_fs", "value"]);
            for (x, y) in p.tau.iter().zip(&env) {
                t.push([*x, *y]);
            }
            paths.extend(write(artifact(
                "michelson_envelope",
                "michelson_envelope",
                t,
                json!({"source": p.source, "fwhm_fs": width}),
                Some((0, 1)),
            ))?);
            Ok(paths)
        }
        Command::Hom => {
            let b = cfg.amplitude(&crystal)?;
            let taus = cfg.taus()?;
            let (p, paired) = match cfg.analyzers_deg {
                Some([t1, t2]) => (hom_general(&b.amplitude, &taus, t1, t2)?, None),
                None => {
                    let other = match cfg.hom_sign {
                        Sign::Minus => Sign::Plus,
                        Sign::Plus => Sign::Minus,
                    };
                    (hom_closed(&b.amplitude, &taus, cfg.hom_sign)?, Some(hom_closed(&b.amplitude, &taus, other)?))
                }
            };
            let envelope: Vec<f64> = p.rate.iter().map(|r| (2.0 * r - 1.0).abs()).collect();
            let width = fwhm_of(&p.tau, &envelope).ok().map(|w| w.fwhm_fs);
            let vis = match (&paired, cfg.hom_sign) {
                (Some(q), Sign::Minus) => visibility(&p, q).ok(),
                (Some(q), Sign::Plus) => visibility(q, &p).ok(),
                _ => None,
            };
            write(artifact(
                "hom",
                "hom",
                export::pattern_table(&p),
                pattern_meta(&p, json!({"fwhm_fs": width, "visibility": vis})),
                Some((0, 1)),
            ))
        }
        Command::Tuning => {
            let setup = cfg.noncollinear(&crystal)?;
            let lambdas = cfg.wavelengths.values("wavelengths")?;
            let curves = [setup.tuning_curve(&lambdas, Branch::Signal)?, setup.tuning_curve(&lambdas, Branch::Idler)?];
            let meta = json!({
                "pump_angle_to_axis_deg": setup.pump_angle_deg,
                "calibrated_for_degenerate_deg": setup.calibrated_for_deg,
                "calibration": "pump-to-axis angle solved so the degenerate pair exits at the configured angle",
                "apertures": cfg.apertures,
                "signal_half_acceptance_deg": cfg.apertures.signal.half_acceptance_deg(),
            });
            write(artifact("tuning", "tuning", export::tuning_table(&curves), meta, Some((0, 1))))
        }
        Command::PairWindow => {
            let setup = cfg.noncollinear(&crystal)?;
            let pw = cfg.pair_window_for(&setup, None)?;
            let meta = json!({
                "effective_pair_fwhm_nm": pw.effective_pair_fwhm_nm,
                "pair_fraction": pw.pair_fraction,
                "singles_fwhm_nm": pw.singles_fwhm_nm,
                "pump_angle_to_axis_deg": setup.pump_angle_deg,
                "filters": cfg.filters,
                "apertures": cfg.apertures,
            });
            write(artifact("pair_window", "pair_window", export::pair_window_table(&pw), meta, Some((0, 1))))
        }
        Command::McaSim => {
            let h = simulate_mca(&cfg.counting, cfg.mca_rate)?;
            let c = extract_coincidences(&h, cfg.counting.window_width_ns, cfg.counting.accidental_offset_ns)?;
            let chain = simulate_visibility_chain(&cfg.counting, cfg.visibility.true_visibility)?;
            let meta = json!({
                "true_counts": c.true_counts,
                "accidental_counts": c.accidental_counts,
                "raw_visibility": chain.raw_visibility,
                "corrected_visibility": chain.corrected_visibility,
                "interference_rate": cfg.mca_rate,
                "total_starts": h.total_starts,
                "total_stops": h.total_stops,
                "rng_algorithm": h.rng_algorithm,
                "rng_seed": h.rng_seed,
                "shards": h.shards,
                "counting": cfg.counting,
            });
            write(artifact("mca", "mca_histogram", export::histogram_table(&h), meta, Some((0, 2))))
        }
        Command::ReproducePaper => {
            let report = reproduce::run_all(cfg)?;
            print!("{}", report.render());
            let mut t = Table::new(&["id", "criterion", "name", "value", "target", "tolerance", "status"]);
            for c in &report.checks {
                t.push([
                    c.id.clone(),
                    c.criterion.to_string(),
                    c.name.clone(),
                    c.value.to_string(),
                    c.target.to_string(),
                    c.tolerance.clone(),
                    c.status().to_string(),
                ]);
            }
            let meta = json!({
                "checks": report.checks,
                "elapsed_s": report.elapsed_s,
                "all_pass": report.all_pass(),
            });
            write(artifact("reproduce", "reproduce", t, meta, None))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_parses() {
        let c = RunConfig::paper();
        assert_eq!(c.pump_nm, 351.1);
        assert_eq!(c.grid.points, crate::spectral::DEFAULT_GRID_POINTS);
    }

    #[test]
    fn merge_overrides_nested_fields() {
        let mut base = json!({"a": {"b": 1, "c": 2}, "d": 3});
        merge(&mut base, json!({"a": {"c": 5}}));
        assert_eq!(base, json!({"a": {"b": 1, "c": 5}, "d": 3}));
    }

    #[test]
    fn config_errors_name_the_field() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"defaults": "paper", "pump_nmm": 351.1}"#).unwrap();
        let err = RunConfig::load(Some(&p), false).unwrap_err();
        assert!(err.to_string().contains("pump_nmm"), "{err}");
        assert_eq!(err.exit_code(), 2);

        std::fs::write(&p, r#"{"pump_nm": 351.1}"#).unwrap();
        let err = RunConfig::load(Some(&p), false).unwrap_err();
        assert!(err.to_string().contains("missing field"), "{err}");
    }
}
