//! Load a TOML run config with command-line style overrides and print the
//! derived quantities, as `hybridgate validate` does.

use hybridgate::cli::{load_config, validate_report};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("hybridgate_example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("run.toml");
    std::fs::write(
        &path,
        r#"
scenario = "bell"

[params]
g_over_2pi_hz = 3.0e6
q_factor = "inf"
temperature_k = 0.05
"#,
    )?;

    let overrides = vec!["params.rabi_over_2pi_hz=20e6".to_string()];
    let cfg = load_config(Some(&path), &overrides)?;
    print!("{}", validate_report(&cfg)?);

    let bad = load_config(Some(&path), &["params.g_over_2pi_hz=-1".to_string()]);
    if let Err(e) = bad {
        println!("\nrejected override: {e}");
    }
    Ok(())
}
