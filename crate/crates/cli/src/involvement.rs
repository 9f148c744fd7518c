use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use rsgnn::graphdata::{involvement_sweep, load_dataset, SweepAxis, SweepConfig};

use crate::error::{write_file, Result};

#[derive(Debug, Args)]
pub struct InvolvementArgs {
    /// Prepared dataset directory.
    #[arg(long)]
    pub data: PathBuf,
    /// Output CSV file.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.02,0.05,0.1,0.15,0.2,0.25")]
    pub label_rates: Vec<f64>,
    /// Edge-count multipliers |E_A|/|E|.
    #[arg(long, value_delimiter = ',', default_value = "1,1.5,2,2.5,3")]
    pub densities: Vec<f64>,
    /// Label rate held fixed along the density axis.
    #[arg(long, default_value_t = 0.01)]
    pub density_label_rate: f64,
    #[arg(long, default_value_t = 2)]
    pub hops: usize,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn run(a: &InvolvementArgs) -> Result<()> {
    let (g, _) = load_dataset(&a.data)?;
    let cfg = SweepConfig {
        label_rates: a.label_rates.clone(),
        densities: a.densities.clone(),
        hops: a.hops,
        trials: a.trials,
        seed: a.seed,
        density_label_rate: a.density_label_rate,
    };
    let rows = involvement_sweep(&g, &cfg)?;
    let mut out = String::from("axis,setting,mean,std\n");
    for r in &rows {
        let axis = match r.axis {
            SweepAxis::LabelRate => "label_rate",
            SweepAxis::Density => "density",
        };
        let _ = writeln!(out, "{axis},{},{},{}", r.setting, r.mean, r.std);
    }
    write_file(&a.out, &out)?;
    print!("{out}");
    Ok(())
}
