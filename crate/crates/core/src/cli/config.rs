//! TOML configuration files.
//!
//! Every key is optional; an empty file yields the K-band defaults (24 GHz,
//! 250 MHz, N = 256, M = 512, 1-bit, full dither, half-wavelength spacing).
//!
//! ```toml
//! [radar]
//! f0 = 24e9
//! bandwidth = 250e6
//! num_freqs = 512
//!
//! [quantizer]
//! bit_depth = 1
//! alpha = 1.0
//! dither_mode = "shared"
//!
//! [experiment]
//! sparsity = 2
//! profile = "desk"
//! seed = 7
//!
//! [[scene.targets]]
//! range_bin = 7
//! angle_deg = 20.0
//! amplitude = 0.4
//! phase_deg = 0.0
//! ```

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::montecarlo::{ExperimentSpec, Profile};
use crate::quantizer::{DitherMode, QuantizerConfig};
use crate::radar_model::{RadarConfig, Scene, Target, SPEED_OF_LIGHT};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RadarFile {
    f0: Option<f64>,
    bandwidth: Option<f64>,
    num_freqs: Option<usize>,
    num_ranges: Option<usize>,
    antenna_spacing: Option<f64>,
    speed_of_light: Option<f64>,
    sweep_samples: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuantizerFile {
    delta: Option<f64>,
    bit_depth: Option<u32>,
    alpha: Option<f64>,
    dither_mode: Option<DitherMode>,
    margin: Option<f64>,
    seed: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentFile {
    sparsity: Option<usize>,
    profile: Option<Profile>,
    runs: Option<usize>,
    range_cells: Option<usize>,
    angle_cells: Option<usize>,
    seed: Option<u64>,
    angle_limit_deg: Option<f64>,
    snr_db: Option<f64>,
    frames: Option<usize>,
    m_list: Option<Vec<usize>>,
    alphas: Option<Vec<f64>>,
    trials: Option<usize>,
}

/// One target record of a scene file, angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetRecord {
    pub range_bin: usize,
    pub angle_deg: f64,
    pub amplitude: f64,
    #[serde(default)]
    pub phase_deg: f64,
}

impl From<TargetRecord> for Target {
    fn from(r: TargetRecord) -> Self {
        Target {
            range_bin: r.range_bin,
            angle: r.angle_deg.to_radians(),
            amplitude: r.amplitude,
            phase: r.phase_deg.to_radians(),
        }
    }
}

impl From<&Target> for TargetRecord {
    fn from(t: &Target) -> Self {
        TargetRecord {
            range_bin: t.range_bin,
            angle_deg: t.angle.to_degrees(),
            amplitude: t.amplitude,
            phase_deg: t.phase.to_degrees(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    #[serde(default)]
    pub targets: Vec<TargetRecord>,
}

impl SceneFile {
    pub fn to_scene(&self) -> Scene {
        Scene::new(self.targets.iter().copied().map(Target::from).collect())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    radar: RadarFile,
    #[serde(default)]
    quantizer: QuantizerFile,
    #[serde(default)]
    experiment: ExperimentFile,
    scene: Option<SceneFile>,
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub radar: RadarConfig,
    pub quantizer: QuantizerConfig,
    pub experiment: ExperimentSpec,
    pub profile: Profile,
    /// Explicit quantization width; when absent δ follows each acquisition.
    pub fixed_delta: Option<f64>,
    pub frames: usize,
    pub m_list: Vec<usize>,
    pub alphas: Vec<f64>,
    /// Samples for the empirical theory checks.
    pub trials: usize,
    pub scene: Option<Scene>,
}

pub const DEFAULT_FRAMES: usize = 106;
pub const DEFAULT_M_LIST: [usize; 3] = [128, 512, 2048];
pub const DEFAULT_ALPHAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

impl Default for Config {
    fn default() -> Self {
        Config::from_file(ConfigFile::default())
    }
}

impl Config {
    fn from_file(f: ConfigFile) -> Config {
        let base = RadarConfig::default();
        let f0 = f.radar.f0.unwrap_or(base.f0);
        let c = f.radar.speed_of_light.unwrap_or(SPEED_OF_LIGHT);
        let radar = RadarConfig {
            f0,
            bandwidth: f.radar.bandwidth.unwrap_or(base.bandwidth),
            num_freqs: f.radar.num_freqs.unwrap_or(base.num_freqs),
            num_ranges: f.radar.num_ranges.unwrap_or(base.num_ranges),
            antenna_spacing: f.radar.antenna_spacing.unwrap_or(c / (2.0 * f0)),
            speed_of_light: c,
            sweep_samples: f.radar.sweep_samples.unwrap_or(base.sweep_samples),
        };
        let qbase = QuantizerConfig::default();
        let quantizer = QuantizerConfig {
            delta: f.quantizer.delta.unwrap_or(qbase.delta),
            bit_depth: f.quantizer.bit_depth.unwrap_or(qbase.bit_depth),
            alpha: f.quantizer.alpha.unwrap_or(qbase.alpha),
            dither_mode: f.quantizer.dither_mode.unwrap_or_default(),
            seed: f.quantizer.seed.unwrap_or(qbase.seed),
        };
        let e = &f.experiment;
        let sparsity = e.sparsity.unwrap_or(1);
        let profile = e.profile.unwrap_or_default();
        let mut experiment = ExperimentSpec::with_profile(radar, sparsity, profile);
        experiment.bit_depth = quantizer.bit_depth;
        experiment.alpha = quantizer.alpha;
        experiment.dither_mode = quantizer.dither_mode;
        experiment.delta_margin = f.quantizer.margin.unwrap_or(1.0);
        experiment.runs = e.runs.unwrap_or(experiment.runs);
        experiment.range_cells = e.range_cells.unwrap_or(experiment.range_cells);
        experiment.angle_cells = e.angle_cells.unwrap_or(experiment.angle_cells);
        experiment.seed = e.seed.unwrap_or(0);
        experiment.angle_limit = e.angle_limit_deg.map(f64::to_radians);
        experiment.snr_db = e.snr_db;
        Config {
            radar,
            quantizer,
            experiment,
            profile,
            fixed_delta: f.quantizer.delta,
            frames: e.frames.unwrap_or(DEFAULT_FRAMES),
            m_list: e.m_list.clone().unwrap_or_else(|| DEFAULT_M_LIST.to_vec()),
            alphas: e.alphas.clone().unwrap_or_else(|| DEFAULT_ALPHAS.to_vec()),
            trials: e.trials.unwrap_or(10_000),
            scene: f.scene.as_ref().map(SceneFile::to_scene),
        }
    }

    fn to_file(&self) -> ConfigFile {
        let r = &self.radar;
        let e = &self.experiment;
        ConfigFile {
            radar: RadarFile {
                f0: Some(r.f0),
                bandwidth: Some(r.bandwidth),
                num_freqs: Some(r.num_freqs),
                num_ranges: Some(r.num_ranges),
                antenna_spacing: Some(r.antenna_spacing),
                speed_of_light: Some(r.speed_of_light),
                sweep_samples: Some(r.sweep_samples),
            },
            quantizer: QuantizerFile {
                delta: self.fixed_delta,
                bit_depth: Some(self.quantizer.bit_depth),
                alpha: Some(self.quantizer.alpha),
                dither_mode: Some(self.quantizer.dither_mode),
                margin: Some(e.delta_margin),
                seed: Some(self.quantizer.seed),
            },
            experiment: ExperimentFile {
                sparsity: Some(e.sparsity),
                profile: Some(self.profile),
                runs: Some(e.runs),
                range_cells: Some(e.range_cells),
                angle_cells: Some(e.angle_cells),
                seed: Some(e.seed),
                angle_limit_deg: e.angle_limit.map(f64::to_degrees),
                snr_db: e.snr_db,
                frames: Some(self.frames),
                m_list: Some(self.m_list.clone()),
                alphas: Some(self.alphas.clone()),
                trials: Some(self.trials),
            },
            scene: self.scene.as_ref().map(|s| SceneFile {
                targets: s.targets.iter().map(TargetRecord::from).collect(),
            }),
        }
    }

    /// Serializes every resolved value, so re-parsing yields the same config.
    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_file()).expect("config is always representable")
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let mut collect = |r: Result<()>| match r {
            Err(Error::Validation(v)) => problems.extend(v),
            Err(e) => problems.push(e.to_string()),
            Ok(()) => {}
        };
        collect(self.radar.validate());
        collect(self.quantizer.validate());
        collect(self.experiment.validate().or_else(|e| match e {
            // Radar problems are already reported above.
            Error::Validation(_) if self.radar.validate().is_err() => Ok(()),
            other => Err(other),
        }));
        if self.frames == 0 {
            problems.push("frames must be positive".into());
        }
        if let Some(a) = self.alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            problems.push(format!("alpha {a} outside [0, 1]"));
        }
        if let Some(scene) = &self.scene {
            if let Err(e) = scene.validate(self.radar.num_ranges) {
                problems.push(e.to_string());
            }
        }
        problems.dedup();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }
}

fn parse_error(src: &str, err: toml::de::Error) -> Error {
    let line = err
        .span()
        .map(|s| src[..s.start.min(src.len())].matches('\n').count() + 1)
        .unwrap_or(0);
    Error::Parse {
        line,
        message: err.message().to_string(),
    }
}

/// Parses and validates configuration text.
pub fn parse_config_str(src: &str) -> Result<Config> {
    let file: ConfigFile = toml::from_str(src).map_err(|e| parse_error(src, e))?;
    let cfg = Config::from_file(file);
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<Config> {
    parse_config_str(&std::fs::read_to_string(path)?)
}

/// Reads a standalone scene file (`[[targets]]` records).
pub fn parse_scene_str(src: &str) -> Result<Scene> {
    let file: SceneFile = toml::from_str(src).map_err(|e| parse_error(src, e))?;
    Ok(file.to_scene())
}

pub fn parse_scene(path: &Path) -> Result<Scene> {
    parse_scene_str(&std::fs::read_to_string(path)?)
}

pub fn scene_to_toml(scene: &Scene) -> String {
    let file = SceneFile {
        targets: scene.targets.iter().map(TargetRecord::from).collect(),
    };
    toml::to_string(&file).expect("scene is always representable")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = parse_config_str("").unwrap();
        assert_eq!(cfg.radar.f0, 24e9);
        assert_eq!(cfg.radar.bandwidth, 250e6);
        assert_eq!(cfg.radar.num_ranges, 256);
        assert_eq!(cfg.radar.num_freqs, 512);
        assert_eq!(cfg.radar.antenna_spacing, SPEED_OF_LIGHT / 48e9);
        assert_eq!(cfg.quantizer.bit_depth, 1);
        assert_eq!(cfg.quantizer.alpha, 1.0);
        assert_eq!(cfg.experiment.runs, 16_000);
        assert_eq!((cfg.experiment.range_cells, cfg.experiment.angle_cells), (20, 20));
        assert_eq!(cfg, Config::default());
    }

    #[test]
    fn out_of_range_alpha_is_a_validation_error() {
        let err = parse_config_str("[quantizer]\nalpha = 1.5\n").unwrap_err();
        match err {
            Error::Validation(v) => assert!(v.iter().any(|m| m.contains("alpha")), "{v:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = parse_config_str("[radar]\nf0 = 24e9\nbandwidth = = 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        let err = parse_config_str("[radar]\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn defaults_round_trip() {
        let cfg = Config::default();
        assert_eq!(parse_config_str(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn custom_round_trip_with_scene() {
        let src = r#"
            [radar]
            num_freqs = 1024
            [quantizer]
            alpha = 0.55
            dither_mode = "independent"
            [experiment]
            sparsity = 2
            profile = "paper"
            angle_limit_deg = 60.0
            snr_db = 15.0
            [[scene.targets]]
            range_bin = 7
            angle_deg = 20.0
            amplitude = 0.5
            [[scene.targets]]
            range_bin = 30
            angle_deg = -10.0
            amplitude = 1.0
            phase_deg = 45.0
        "#;
        let cfg = parse_config_str(src).unwrap();
        assert_eq!(cfg.experiment.runs, 640_000);
        assert_eq!(cfg.experiment.dither_mode, DitherMode::Independent);
        assert_eq!(cfg.scene.as_ref().unwrap().targets.len(), 2);
        assert_eq!(parse_config_str(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn duplicate_scene_bins_rejected() {
        let src = "[[scene.targets]]\nrange_bin = 3\nangle_deg = 0.0\namplitude = 1.0\n\
                   [[scene.targets]]\nrange_bin = 3\nangle_deg = 5.0\namplitude = 1.0\n";
        assert!(matches!(parse_config_str(src), Err(Error::Validation(_))));
    }

    #[test]
    fn scene_file_round_trip() {
        let scene = Scene::new(vec![Target { range_bin: 4, angle: 0.25, amplitude: 0.5, phase: 1.0 }]);
        let back = parse_scene_str(&scene_to_toml(&scene)).unwrap();
        assert_eq!(back.targets[0].range_bin, 4);
        assert!((back.targets[0].angle - 0.25).abs() < 1e-15);
    }
}
