//! Named experiment presets. A preset is a base TOML document; a user config
//! file is overlaid on it key by key.

use toml::{Table, Value};

use crate::config::RunConfig;
use crate::CliError;

const FIG2: &str = r#"
[protocol]
v_mod_snu = 9.0
security_model = "trusted"
[sweep]
axis = "distance"
start = 0.0
stop = 80.0
step = 0.5
"#;

const FIG3: &str = r#"
[protocol]
v_mod_snu = 9.0
security_model = "trusted"
[finite_size]
block_sizes = [1e10, 1e11]
[sweep]
axis = "distance"
start = 0.0
stop = 80.0
step = 0.5
"#;

const FIG4: &str = r#"
[protocol]
security_model = "trusted"
[channel]
kind = "satellite"
[finite_size]
block_sizes = [1e12, 1e11]
[sweep]
axis = "elevation"
start = 0.5
stop = 179.5
step = 1.0
"#;

fn fig5(eta: f64, v_el: f64) -> String {
    format!(
        r#"
[protocol]
v_mod_snu = 9.0
detector_efficiency = {eta:?}
v_el_snu = {v_el:?}
security_model = "untrusted"
[sweep]
axis = "distance"
start = 0.0
stop = 80.0
step = 0.5
"#
    )
}

pub const PRESETS: [&str; 8] = [
    "fig2", "fig3", "fig4-good", "fig4-bad", "fig5a", "fig5b", "fig5c", "fig5d",
];

/// Base document of a named preset.
pub fn preset_toml(name: &str) -> Option<String> {
    Some(match name {
        "fig2" => FIG2.to_owned(),
        "fig3" => FIG3.to_owned(),
        "fig4-good" => FIG4.replace("kind = \"satellite\"", "kind = \"satellite\"\nweather = \"good\""),
        "fig4-bad" => FIG4.replace("kind = \"satellite\"", "kind = \"satellite\"\nweather = \"bad\""),
        "fig5a" => fig5(0.95, 0.01),
        "fig5b" => fig5(0.99, 0.01),
        "fig5c" => fig5(0.95, 0.001),
        "fig5d" => fig5(0.99, 0.001),
        _ => return None,
    })
}

fn parse_table(text: &str) -> Result<Table, CliError> {
    text.parse::<Table>().map_err(|e| CliError::Config(e.to_string()))
}

/// Recursively overlays `top` onto `base`; scalars and arrays replace.
fn overlay(base: &mut Table, top: Table) {
    for (k, v) in top {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(t)) => overlay(b, t),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Builds and validates a configuration from an optional preset and an
/// optional config document, the latter taking precedence.
pub fn load_config(preset: Option<&str>, file: Option<&str>) -> Result<RunConfig, CliError> {
    let mut doc = match preset {
        Some(name) => {
            let base = preset_toml(name).ok_or_else(|| {
                CliError::Config(format!("unknown preset `{name}`; expected one of {}", PRESETS.join(", ")))
            })?;
            parse_table(&base)?
        }
        None => Table::new(),
    };
    if let Some(text) = file {
        overlay(&mut doc, parse_table(text)?);
    }
    let cfg: RunConfig = Value::Table(doc)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}
