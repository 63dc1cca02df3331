//! Flags shared by `run`, `verify` and `bench`.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use tersoff_core::kernels::{native_width, BackendKind, BackendSpec, KernelVariant, VariantTag};
use tersoff_core::{paramfile, Evaluator, ParamTable, Precision, SimulationState};

use crate::error::{usage, Result};
use crate::structure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Reference,
    Scalar,
    VecJ,
    VecI,
}

impl From<VariantArg> for VariantTag {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Reference => VariantTag::Reference,
            VariantArg::Scalar => VariantTag::ScalarOpt,
            VariantArg::VecJ => VariantTag::VecJ,
            VariantArg::VecI => VariantTag::VecI,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Scalar,
    Emulated,
    Native,
}

impl From<BackendArg> for BackendKind {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Scalar => BackendKind::Scalar,
            BackendArg::Emulated => BackendKind::Emulated,
            BackendArg::Native => BackendKind::Native,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    Single,
    Double,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Single => Precision::Single,
            PrecisionArg::Double => Precision::Double,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// Structure and parameters.
#[derive(Args, Clone, Debug)]
pub struct InputArgs {
    /// Parameter file (17-token layout). Defaults to the built-in Tersoff 1989
    /// set matching the structure's elements (C, Si, or both).
    #[arg(long, value_name = "PATH")]
    pub params: Option<PathBuf>,

    /// XYZ file, or a generator spec: nanotube:N,CELLS[,BOND],
    /// diamond:CELLS[,LATTICE[,ELEMENT]], cluster:ATOMS[,EL+EL...].
    #[arg(long, value_name = "PATH|SPEC", default_value = "nanotube:5,10")]
    pub structure: String,

    /// Seed for generated clusters and initial velocities.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl InputArgs {
    pub fn load(&self) -> Result<(SimulationState, ParamTable)> {
        let state = structure::load(&self.structure, self.seed)?;
        let table = match &self.params {
            Some(path) => paramfile::load(path)?,
            None => structure::builtin_params(&state)?,
        };
        Ok((state, table))
    }
}

/// Backend, precision and driver settings.
#[derive(Args, Clone, Debug)]
pub struct KernelArgs {
    /// Lane backend for vec-j and vec-i; ignored by reference and scalar.
    #[arg(long, value_enum, default_value = "emulated")]
    pub backend: BackendArg,

    /// Lanes per vector; defaults to the native register width (4 double,
    /// 8 single). `bench` accepts a comma-separated list.
    #[arg(long, value_delimiter = ',')]
    pub width: Vec<usize>,

    #[arg(long, value_enum, default_value = "double")]
    pub precision: PrecisionArg,

    /// Emulated backend: standard library transcendentals per lane.
    #[arg(long)]
    pub strict: bool,

    /// Neighbor list skin (Å).
    #[arg(long, default_value_t = 0.3)]
    pub skin: f64,

    /// Worker threads for force evaluation.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

impl KernelArgs {
    pub fn precision(&self) -> Precision {
        self.precision.into()
    }

    /// The single `--width`, if given.
    pub fn single_width(&self) -> Result<Option<usize>> {
        match self.width[..] {
            [] => Ok(None),
            [w] => Ok(Some(w)),
            _ => Err(usage("this command takes one --width")),
        }
    }

    pub fn backend_spec(&self, width: Option<usize>) -> Result<BackendSpec> {
        let precision = self.precision();
        let kind: BackendKind = self.backend.into();
        let width = match (kind, width) {
            (BackendKind::Scalar, None) => 1,
            (_, Some(w)) => w,
            (_, None) => native_width(precision),
        };
        if self.strict && kind != BackendKind::Emulated {
            return Err(usage("--strict applies to the emulated backend only"));
        }
        let spec = BackendSpec { kind, width, precision, strict: self.strict };
        spec.validate()?;
        Ok(spec)
    }

    /// `tag` on the selected backend at the single `--width`.
    pub fn variant(&self, tag: VariantTag) -> Result<KernelVariant> {
        self.variant_of(tag, self.single_width()?)
    }

    /// `tag` on the selected backend at `width` (native width when `None`).
    pub fn variant_of(&self, tag: VariantTag, width: Option<usize>) -> Result<KernelVariant> {
        if !tag.is_vectorized() {
            return Ok(KernelVariant::new(tag, BackendSpec::scalar(self.precision()))?);
        }
        Ok(KernelVariant::new(tag, self.backend_spec(width)?)?)
    }
}

impl KernelArgs {
    pub fn evaluator(&self, table: ParamTable, variant: KernelVariant) -> Result<Evaluator> {
        Ok(Evaluator::new(table, variant)?.with_skin(self.skin)?.with_threads(self.threads)?)
    }
}
