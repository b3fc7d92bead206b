//! Run configuration: flags, an optional TOML file, and the resolved form.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::construct::CliqueTemplate;
use crate::error::{Cap, Error, Result};
use crate::functions::Family;
use crate::nof::{ProtocolKind, TranscriptChoice};
use crate::pipeline::PipelineConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Edgelist,
}

/// Flags shared by every subcommand. Anything left unset falls back to the
/// `--config` file, then to the built-in default.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML file with any of the keys below; flags win over it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long)]
    pub d: Option<u32>,
    /// Number of players (hyperedges have k-1 vertices).
    #[arg(long)]
    pub k: Option<usize>,
    /// cube, midpoint or k-midpoint.
    #[arg(long)]
    pub family: Option<String>,
    /// Interval length r as an integer (sets r2 = r·r).
    #[arg(long)]
    pub r: Option<u64>,
    /// Squared interval length; defaults to d.
    #[arg(long)]
    pub r2: Option<u64>,
    /// simple, interval or kplayer.
    #[arg(long)]
    pub protocol: Option<String>,
    /// auto, mu or explicit:<bits>.
    #[arg(long)]
    pub transcript: Option<String>,
    /// Blow-up exponent of the product construction.
    #[arg(long)]
    pub t: Option<u32>,
    /// Template file for the product (`k t n` header, `alpha:x` vertices).
    #[arg(long)]
    pub template: Option<PathBuf>,
    /// Enumeration cap.
    #[arg(long, env = "RSFORGE_CAP")]
    pub cap: Option<u64>,
    /// Keep the kplayer protocol's last message asymmetric.
    #[arg(long)]
    pub no_symmetrize: bool,
    /// Build the graph from the augmented set S'.
    #[arg(long)]
    pub augment: bool,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Artifact directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (output does not depend on it).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Run every sweep on the calling thread.
    #[arg(long)]
    pub sequential: bool,
}

impl RunArgs {
    /// Whether any flag that changes the constructed data was given.
    pub fn has_data_flags(&self) -> bool {
        self.config.is_some()
            || self.q.is_some()
            || self.d.is_some()
            || self.k.is_some()
            || self.family.is_some()
            || self.r.is_some()
            || self.r2.is_some()
            || self.protocol.is_some()
            || self.transcript.is_some()
            || self.t.is_some()
            || self.template.is_some()
            || self.no_symmetrize
            || self.augment
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    q: Option<u32>,
    d: Option<u32>,
    k: Option<usize>,
    family: Option<String>,
    r: Option<u64>,
    r2: Option<u64>,
    protocol: Option<String>,
    transcript: Option<String>,
    t: Option<u32>,
    template: Option<PathBuf>,
    cap: Option<u64>,
    symmetrize: Option<bool>,
    augment: Option<bool>,
    format: Option<Format>,
    out: Option<PathBuf>,
    threads: Option<usize>,
}

/// The part of a configuration that determines the artifacts. Its hash is
/// stored in the manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Identity {
    pub q: u32,
    pub d: u32,
    pub k: usize,
    pub family: String,
    pub r2: u64,
    pub protocol: String,
    pub transcript: String,
    pub symmetrize: bool,
    pub augment: bool,
    pub t: Option<u32>,
    /// Text of the template file, if one was given.
    pub template: Option<String>,
}

impl Identity {
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("identity serialises");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn pipeline(&self, cap: Cap) -> Result<PipelineConfig> {
        let family: Family = match self.family.as_str() {
            "cube" => Family::Cube,
            "midpoint" => Family::Midpoint,
            "k-midpoint" => Family::KMidpoint,
            other => return Err(Error::Parameter(format!("unknown family {other:?}"))),
        };
        let template = match &self.template {
            Some(text) => Some(CliqueTemplate::parse(text)?),
            None => None,
        };
        Ok(PipelineConfig {
            q: self.q,
            d: self.d,
            k: self.k,
            family: Some(family),
            r_sq: Some(self.r2),
            protocol: self.protocol.parse()?,
            transcript: self.transcript.parse()?,
            symmetrize: self.symmetrize,
            augment: self.augment,
            t: self.t,
            template,
            cap,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub identity: Identity,
    pub cap: Cap,
    pub out: PathBuf,
    pub format: Format,
    pub threads: Option<usize>,
    pub sequential: bool,
}

fn read_text(path: &Path, what: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parameter(format!("cannot read {what} {}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(args: &RunArgs) -> Result<Self> {
        let file: FileConfig = match &args.config {
            Some(path) => toml::from_str(&read_text(path, "config")?)
                .map_err(|e| Error::Parameter(format!("bad config file {}: {e}", path.display())))?,
            None => FileConfig::default(),
        };
        let q = args.q.or(file.q).unwrap_or(3);
        let d = args.d.or(file.d).unwrap_or(2);
        let k = args.k.or(file.k).unwrap_or(3);
        let protocol: ProtocolKind = match args.protocol.as_ref().or(file.protocol.as_ref()) {
            Some(p) => p.parse()?,
            None if k > 3 => ProtocolKind::KPlayer,
            None => ProtocolKind::Simple,
        };
        let family = match args.family.as_ref().or(file.family.as_ref()) {
            Some(f) => f.clone(),
            None if k == 3 => "midpoint".into(),
            None => "k-midpoint".into(),
        };
        // --r and --r2 on the command line replace both keys from the file.
        let (r, r2) = if args.r.is_some() || args.r2.is_some() {
            (args.r, args.r2)
        } else {
            (file.r, file.r2)
        };
        let r2 = match (r, r2) {
            (Some(_), Some(_)) => return Err(Error::Parameter("give either r or r2, not both".into())),
            (Some(r), None) => r
                .checked_mul(r)
                .ok_or_else(|| Error::Parameter(format!("r = {r} too large")))?,
            (None, Some(r2)) => r2,
            (None, None) => d as u64,
        };
        if r2 == 0 {
            return Err(Error::Parameter("interval length must be at least 1".into()));
        }
        let transcript: TranscriptChoice = args
            .transcript
            .as_ref()
            .or(file.transcript.as_ref())
            .map(|s| s.parse())
            .transpose()?
            .unwrap_or(TranscriptChoice::Auto);
        let template = match args.template.as_ref().or(file.template.as_ref()) {
            Some(path) => Some(read_text(path, "template")?),
            None => None,
        };
        let identity = Identity {
            q,
            d,
            k,
            family,
            r2,
            protocol: protocol.to_string(),
            transcript: transcript.to_string(),
            symmetrize: !args.no_symmetrize && file.symmetrize.unwrap_or(true),
            augment: args.augment || file.augment.unwrap_or(false),
            t: args.t.or(file.t),
            template,
        };
        // Validate the identity eagerly so parameter errors surface first.
        identity.pipeline(Cap::DEFAULT)?.validate()?;
        Ok(RunConfig {
            identity,
            cap: Cap(args.cap.or(file.cap).unwrap_or(Cap::DEFAULT.0)),
            out: args.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("rsforge-out")),
            format: args.format.or(file.format).unwrap_or_default(),
            threads: args.threads.or(file.threads),
            sequential: args.sequential,
        })
    }

    pub fn pipeline(&self) -> Result<PipelineConfig> {
        self.identity.pipeline(self.cap)
    }
}
