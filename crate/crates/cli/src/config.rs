//! Run configuration: an optional TOML file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use wigner_kirkwood::potential::{self, PotentialSpec};
use wigner_kirkwood::psint::{SpatialDomain, TGrid};

use crate::error::CliError;

pub const MAX_ORDER: usize = 8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TScale {
    #[default]
    Linear,
    Log,
}

/// Every field optional; flags and file are merged field by field.
#[derive(Clone, Debug, Default, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct RunArgs {
    /// Potential file (JSON)
    #[arg(long)]
    pub potential: Option<PathBuf>,
    /// Highest order K of the hbar expansion (at most 8)
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub hbar: Option<f64>,
    #[arg(long)]
    pub tmin: Option<f64>,
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub tsteps: Option<usize>,
    #[arg(long, value_enum)]
    pub tscale: Option<TScale>,
    /// Box half-widths per axis, e.g. `2,2`; omit for full space
    #[arg(long = "box", value_delimiter = ',')]
    #[serde(rename = "box")]
    pub box_half_widths: Option<Vec<f64>>,
    /// Per-axis oracle basis size; enables the exact reference column
    #[arg(long)]
    pub basis_size: Option<usize>,
    /// Oracle basis frequency (default: minimal-trace scan)
    #[arg(long)]
    pub omega: Option<f64>,
    /// Output file or directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    /// `self` wins over `file`.
    fn overlay(self, file: RunArgs) -> RunArgs {
        RunArgs {
            potential: self.potential.or(file.potential),
            order: self.order.or(file.order),
            hbar: self.hbar.or(file.hbar),
            tmin: self.tmin.or(file.tmin),
            tmax: self.tmax.or(file.tmax),
            tsteps: self.tsteps.or(file.tsteps),
            tscale: self.tscale.or(file.tscale),
            box_half_widths: self.box_half_widths.or(file.box_half_widths),
            basis_size: self.basis_size.or(file.basis_size),
            omega: self.omega.or(file.omega),
            out: self.out.or(file.out),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    pub order: usize,
    pub hbar: f64,
    pub grid: TGrid,
    pub domain: SpatialDomain,
    pub basis_size: Option<usize>,
    pub omega: Option<f64>,
    pub out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

pub fn load_potential(path: &Path) -> Result<PotentialSpec, CliError> {
    potential::parse_json(&read(path)?)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn load_file(path: &Path) -> Result<RunArgs, CliError> {
    let text = read(path)?;
    toml::from_str(&text).map_err(|e| {
        let location = e
            .span()
            .map(|s| {
                let line = text[..s.start].matches('\n').count() + 1;
                format!(" (line {line})")
            })
            .unwrap_or_default();
        CliError::Config(format!("{}{location}: {}", path.display(), e.message()))
    })
}

impl RunConfig {
    pub fn resolve(args: RunArgs, config: Option<&Path>) -> Result<Self, CliError> {
        let args = match config {
            Some(path) => args.overlay(load_file(path)?),
            None => args,
        };
        let path = args
            .potential
            .ok_or_else(|| CliError::Config("--potential is required".into()))?;
        let potential = load_potential(&path)?;

        let order = args.order.unwrap_or(4);
        if order > MAX_ORDER {
            return Err(CliError::Config(format!("order {order} exceeds the limit {MAX_ORDER}")));
        }
        let hbar = args.hbar.unwrap_or(1.0);
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(CliError::Config(format!("hbar must be positive, got {hbar}")));
        }
        let (tmin, tmax) = (args.tmin.unwrap_or(0.1), args.tmax.unwrap_or(1.0));
        let steps = args.tsteps.unwrap_or(10);
        let grid = match args.tscale.unwrap_or_default() {
            TScale::Linear => TGrid::linear(tmin, tmax, steps),
            TScale::Log => TGrid::log(tmin, tmax, steps),
        }
        .map_err(|e| CliError::Config(e.to_string()))?;

        let domain = match args.box_half_widths {
            None => SpatialDomain::full_space(),
            Some(w) => {
                if w.len() != potential.dim() {
                    return Err(CliError::Config(format!(
                        "--box has {} half-widths for a {}-dimensional potential",
                        w.len(),
                        potential.dim()
                    )));
                }
                SpatialDomain::boxed(w).map_err(|e| CliError::Config(e.to_string()))?
            }
        };
        if let Some(m) = args.basis_size {
            if m < 2 {
                return Err(CliError::Config(format!("basis size must be at least 2, got {m}")));
            }
        }
        if let Some(w) = args.omega {
            if !(w > 0.0 && w.is_finite()) {
                return Err(CliError::Config(format!("omega must be positive, got {w}")));
            }
        }
        Ok(RunConfig {
            potential,
            order,
            hbar,
            grid,
            domain,
            basis_size: args.basis_size,
            omega: args.omega,
            out: args.out,
        })
    }
}
