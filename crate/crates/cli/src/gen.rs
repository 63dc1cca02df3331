use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Subcommand};
use tersoff_core::system::{gen_diamond, gen_nanotube, random_cluster, xyz, ClusterSpec, NANOTUBE_BOND};
use tersoff_core::SimulationState;

use crate::error::Result;
use crate::structure::DIAMOND_LATTICE;

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(subcommand)]
    pub kind: GenKind,

    /// Output XYZ file; stdout when absent.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum GenKind {
    /// Open armchair (n, n) tube along z with `cells` unit cells, 4 n atoms each.
    Nanotube {
        n: usize,
        cells: usize,
        /// C-C bond length (Å).
        #[arg(long, default_value_t = NANOTUBE_BOND)]
        bond: f64,
    },
    /// Periodic diamond lattice of cells^3 conventional cells.
    Diamond {
        cells: usize,
        /// Lattice constant (Å).
        #[arg(long, default_value_t = DIAMOND_LATTICE)]
        lattice: f64,
        #[arg(long, default_value = "C")]
        element: String,
    },
    /// Random connected cluster.
    Cluster {
        atoms: usize,
        #[arg(long, value_delimiter = ',', default_value = "C")]
        elements: Vec<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

impl GenKind {
    /// The equivalent `--structure` spec.
    pub fn spec(&self) -> String {
        match self {
            GenKind::Nanotube { n, cells, bond } => format!("nanotube:{n},{cells},{bond}"),
            GenKind::Diamond { cells, lattice, element } => format!("diamond:{cells},{lattice},{element}"),
            GenKind::Cluster { atoms, elements, .. } => format!("cluster:{atoms},{}", elements.join("+")),
        }
    }
}

pub fn build(kind: &GenKind) -> Result<SimulationState> {
    Ok(match kind {
        GenKind::Nanotube { n, cells, bond } => gen_nanotube(*n, *cells, *bond)?,
        GenKind::Diamond { cells, lattice, element } => gen_diamond(*cells, *lattice, element)?,
        GenKind::Cluster { atoms, elements, seed } => {
            let names: Vec<&str> = elements.iter().map(String::as_str).collect();
            random_cluster(&ClusterSpec::new(*atoms, &names, *seed))?
        }
    })
}

pub fn cmd_gen(args: &GenArgs, stdout: &mut dyn Write) -> Result<()> {
    let state = build(&args.kind)?;
    let comment = args.kind.spec();
    match &args.output {
        Some(path) => {
            let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
            xyz::write_frame(&mut f, &state, &comment)?;
            f.flush()?;
        }
        None => xyz::write_frame(stdout, &state, &comment)?,
    }
    Ok(())
}
