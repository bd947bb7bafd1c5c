//! Plain-text artefact writers.
//!
//! Everything the CLI persists goes through here: CSV traces in `{:e}`
//! float notation (lossless to reparse), the rendered energy table, PGM
//! weight maps, and the versioned TOML model file.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{ConfigError, RunConfig};
use crate::data::CLASSES;
use crate::energy::{EnergyRow, SweepAxis, SweepPoint};
use crate::error::ModelError;
use crate::experiments::{StdpPoint, TransientRow};
use crate::network::{Network, TrainHistory};

/// CSV with header `dt_s,delta_vg_V`.
pub fn stdp_points_csv(points: &[StdpPoint]) -> String {
    let mut out = String::from("dt_s,delta_vg_V\n");
    for pt in points {
        let _ = writeln!(out, "{:e},{:e}", pt.dt, pt.delta_v);
    }
    out
}

/// CSV with header `t_s,v_g_V,i_syn_A`.
pub fn transient_csv(rows: &[TransientRow]) -> String {
    let mut out = String::from("t_s,v_g_V,i_syn_A\n");
    for r in rows {
        let _ = writeln!(out, "{:e},{:e},{:e}", r.t, r.v_g, r.i_syn);
    }
    out
}

/// CSV with header `sample_idx,accuracy_running,mean_w`.
pub fn history_csv(history: &TrainHistory) -> String {
    let mut out = String::from("sample_idx,accuracy_running,mean_w\n");
    for r in &history.rows {
        let _ = writeln!(
            out,
            "{},{:e},{:e}",
            r.sample_idx, r.accuracy_running, r.mean_w
        );
    }
    out
}

/// CSV with header `label,R_lrs_ohm,E_spk_J,E_N_J,E_SNN_J,img_per_s_per_W,accel_over_gpu`.
pub fn energy_rows_csv(rows: &[EnergyRow]) -> String {
    let mut out =
        String::from("label,R_lrs_ohm,E_spk_J,E_N_J,E_SNN_J,img_per_s_per_W,accel_over_gpu\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:e},{:e},{:e},{:e},{:e},{:e}",
            r.label, r.r_lrs, r.e_spk, r.e_n, r.e_snn, r.images_per_s_per_w, r.acceleration
        );
    }
    out
}

/// Human-readable rendering of the energy table, tiers as columns.
pub fn energy_table_text(rows: &[EnergyRow]) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:<22}", "quantity");
    for r in rows {
        let _ = write!(out, "{:>14}", r.label);
    }
    out.push('\n');
    type Line = (&'static str, fn(&EnergyRow) -> String);
    let lines: [Line; 6] = [
        ("R_LRS (ohm)", |r| format!("{:.3e}", r.r_lrs)),
        ("E_spk (J)", |r| format!("{:.4e}", r.e_spk)),
        ("E_N (J)", |r| format!("{:.4e}", r.e_n)),
        ("E_SNN (J)", |r| format!("{:.4e}", r.e_snn)),
        ("images/s/W", |r| format!("{:.1}", r.images_per_s_per_w)),
        ("accel vs GPU", |r| format!("{:.2}", r.acceleration)),
    ];
    for (label, render) in lines {
        let _ = write!(out, "{label:<22}");
        for r in rows {
            let _ = write!(out, "{:>14}", render(r));
        }
        out.push('\n');
    }
    out
}

/// CSV for a parameter sweep; the first column is named after the axis.
pub fn sweep_csv(axis: SweepAxis, points: &[SweepPoint]) -> String {
    let mut out = format!("{},E_SNN_J,img_per_s_per_W,accel_over_gpu\n", axis.name());
    for pt in points {
        let _ = writeln!(
            out,
            "{:e},{:e},{:e},{:e}",
            pt.axis_value, pt.e_snn, pt.images_per_s_per_w, pt.acceleration
        );
    }
    out
}

/// Confusion-matrix CSV: one row per true label, predictions as columns.
pub fn confusion_csv(confusion: &[[u32; CLASSES]; CLASSES]) -> String {
    let mut out = String::from("label");
    for k in 0..CLASSES {
        let _ = write!(out, ",p{k}");
    }
    out.push('\n');
    for (label, row) in confusion.iter().enumerate() {
        let _ = write!(out, "{label}");
        for &n in row {
            let _ = write!(out, ",{n}");
        }
        out.push('\n');
    }
    out
}

/// CSV of per-neuron weight maps: one row per input, one column per neuron.
pub fn weight_maps_csv(maps: &[Vec<f64>]) -> String {
    let mut out = String::from("pixel");
    for k in 0..maps.len() {
        let _ = write!(out, ",w{k}");
    }
    out.push('\n');
    let n_in = maps.first().map_or(0, Vec::len);
    for i in 0..n_in {
        let _ = write!(out, "{i}");
        for map in maps {
            let _ = write!(out, ",{:e}", map[i]);
        }
        out.push('\n');
    }
    out
}

/// ASCII PGM (`P2`) of a row-major value grid, mapping `[lo, hi]` onto
/// 0–255 with saturation outside the range.
pub fn pgm(values: &[f64], width: usize, lo: f64, hi: f64) -> Result<String, ModelError> {
    if values.is_empty() {
        return Err(ModelError::Empty("pixel values"));
    }
    if width == 0 || !values.len().is_multiple_of(width) {
        return Err(ModelError::InvalidParam(format!(
            "width {width} does not tile {} values",
            values.len()
        )));
    }
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(ModelError::InvalidParam(format!(
            "bad grey-level range [{lo}, {hi}]"
        )));
    }
    let height = values.len() / width;
    let mut out = format!("P2\n{width} {height}\n255\n");
    for row in values.chunks(width) {
        let levels: Vec<String> = row
            .iter()
            .map(|&v| {
                let level = ((v - lo) / (hi - lo) * 255.0).round().clamp(0.0, 255.0);
                format!("{}", level as u8)
            })
            .collect();
        out.push_str(&levels.join(" "));
        out.push('\n');
    }
    Ok(out)
}

/// Format tag of the model file; bump on incompatible layout changes.
pub const MODEL_SCHEMA: &str = "memsnn-model/1";

/// On-disk model: schema tag, provenance counters, the fully resolved
/// configuration, and the stored gate voltages.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema: String,
    /// Training presentations baked into the weights.
    pub trained_presentations: u64,
    /// Simulation clock at save time (s).
    pub clock_s: f64,
    /// Configuration the model was trained with.
    pub config: RunConfig,
    pub weights: ModelWeights,
}

/// Weight payload of a model file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelWeights {
    /// Stored gate voltages, row-major `[input][output]` (V).
    pub v_g: Vec<f64>,
}

/// Persists a trained network as TOML. Floats are written in shortest
/// round-trip form, so reloading reproduces the state bit for bit.
pub fn save_model(path: &Path, net: &Network, config: &RunConfig) -> Result<(), ConfigError> {
    let display = path.display().to_string();
    let file = ModelFile {
        schema: MODEL_SCHEMA.to_string(),
        trained_presentations: net.presentations(),
        clock_s: net.clock(),
        config: config.clone(),
        weights: ModelWeights {
            v_g: net.v_g_snapshot(),
        },
    };
    let text = toml::to_string_pretty(&file).map_err(|e| ConfigError::Parse {
        path: display.clone(),
        message: e.to_string(),
    })?;
    fs::write(path, text).map_err(|source| ConfigError::Io {
        path: display,
        source,
    })
}

/// Loads a model file, refusing any schema other than [`MODEL_SCHEMA`].
pub fn load_model(path: &Path) -> Result<(Network, RunConfig), ConfigError> {
    let display = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: display.clone(),
        source,
    })?;
    let file: ModelFile = toml::from_str(&text).map_err(|e| ConfigError::Parse {
        path: display.clone(),
        message: e.to_string(),
    })?;
    if file.schema != MODEL_SCHEMA {
        return Err(ConfigError::ModelSchema {
            path: display,
            found: file.schema,
            expected: MODEL_SCHEMA.to_string(),
        });
    }
    let cfg = file.config.network_config()?;
    let net = Network::from_snapshot(
        cfg,
        &file.weights.v_g,
        file.clock_s,
        file.trained_presentations,
    )?;
    Ok((net, file.config))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NetworkConfig;

    #[test]
    fn csv_headers_match_the_interface() {
        assert!(transient_csv(&[]).starts_with("t_s,v_g_V,i_syn_A\n"));
        assert!(stdp_points_csv(&[]).starts_with("dt_s,delta_vg_V\n"));
        assert!(history_csv(&TrainHistory { rows: vec![] })
            .starts_with("sample_idx,accuracy_running,mean_w\n"));
        assert!(energy_rows_csv(&[])
            .starts_with("label,R_lrs_ohm,E_spk_J,E_N_J,E_SNN_J,img_per_s_per_W,accel_over_gpu\n"));
        assert!(sweep_csv(SweepAxis::RLrs, &[]).starts_with("r_lrs,"));
    }

    #[test]
    fn transient_floats_reparse_exactly() {
        let rows = vec![TransientRow {
            t: 1.5e-7,
            v_g: 0.123456789012345,
            i_syn: -3.2e-9,
        }];
        let csv = transient_csv(&rows);
        let line = csv.lines().nth(1).unwrap();
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields, vec![rows[0].t, rows[0].v_g, rows[0].i_syn]);
    }

    #[test]
    fn confusion_matrix_layout() {
        let mut confusion = [[0u32; CLASSES]; CLASSES];
        confusion[3][5] = 7;
        let csv = confusion_csv(&confusion);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "label,p0,p1,p2,p3,p4,p5,p6,p7,p8,p9");
        assert_eq!(csv.lines().count(), 11);
        assert_eq!(csv.lines().nth(4).unwrap(), "3,0,0,0,0,0,7,0,0,0,0");
    }

    #[test]
    fn pgm_scales_and_saturates() {
        let img = pgm(&[0.0, 0.5, 1.0, 2.0], 2, 0.0, 1.0).unwrap();
        assert_eq!(img, "P2\n2 2\n255\n0 128\n255 255\n");
    }

    #[test]
    fn pgm_rejects_bad_shapes() {
        assert!(pgm(&[], 2, 0.0, 1.0).is_err());
        assert!(pgm(&[1.0, 2.0, 3.0], 2, 0.0, 1.0).is_err());
        assert!(pgm(&[1.0, 2.0], 2, 1.0, 1.0).is_err());
    }

    #[test]
    fn weight_maps_csv_is_column_per_neuron() {
        let maps = vec![vec![0.1, 0.2], vec![0.3, 0.4]];
        let csv = weight_maps_csv(&maps);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "pixel,w0,w1");
        assert_eq!(lines.next().unwrap(), "0,1e-1,3e-1");
        assert_eq!(lines.next().unwrap(), "1,2e-1,4e-1");
    }

    #[test]
    fn model_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.toml");
        let config = RunConfig::default();
        let net = Network::new(config.network_config().unwrap()).unwrap();
        save_model(&path, &net, &config).unwrap();

        let (back, cfg_back) = load_model(&path).unwrap();
        assert_eq!(back.v_g_snapshot(), net.v_g_snapshot());
        assert_eq!(back.clock(), net.clock());
        assert_eq!(back.presentations(), net.presentations());
        assert_eq!(cfg_back, config);
    }

    #[test]
    fn model_schema_mismatch_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.toml");
        let config = RunConfig::default();
        let net = Network::new(config.network_config().unwrap()).unwrap();
        save_model(&path, &net, &config).unwrap();

        let tampered = fs::read_to_string(&path)
            .unwrap()
            .replace(MODEL_SCHEMA, "memsnn-model/9");
        fs::write(&path, tampered).unwrap();
        assert!(matches!(
            load_model(&path),
            Err(ConfigError::ModelSchema { .. })
        ));
    }

    #[test]
    fn model_with_unknown_keys_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.toml");
        let config = RunConfig::default();
        let net = Network::new(config.network_config().unwrap()).unwrap();
        save_model(&path, &net, &config).unwrap();

        let mut text = fs::read_to_string(&path).unwrap();
        text.push_str("\nmystery = 1\n");
        fs::write(&path, text).unwrap();
        assert!(matches!(load_model(&path), Err(ConfigError::Parse { .. })));
    }

    #[test]
    fn loaded_model_keeps_the_tuned_profile() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.toml");
        let config = RunConfig::default();
        let net = Network::new(config.network_config().unwrap()).unwrap();
        save_model(&path, &net, &config).unwrap();
        let (back, _) = load_model(&path).unwrap();
        assert_eq!(back.cfg(), &NetworkConfig::default());
    }
}
