//! Drives the same sweep the CLI runs from a TOML string and writes the CSV
//! to stdout.

use crosslayer_ee::config::{ConfigFile, ExperimentConfig};
use crosslayer_ee::experiment::{optimize_rows, write_optimize_csv};

const CONFIG: &str = r#"
[system]
b_over_sigma2 = 100
epsilon = 0.01

[queue]
K = 10

[sweep]
axis = "q"
start = 0.1
stop = 1.0
num = 10
"#;

fn main() -> crosslayer_ee::Result<()> {
    let file = ConfigFile::from_toml(CONFIG)?;
    let cfg = ExperimentConfig::resolve(&file)?;
    write_optimize_csv(std::io::stdout().lock(), &optimize_rows(&cfg)?)
}
