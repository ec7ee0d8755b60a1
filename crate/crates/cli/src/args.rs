use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "hlc", version, about = "Erasure codes with hierarchical locality")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pick a field, build the code and write its profile.
    Design(DesignArgs),
    /// Encode one message into a shard file.
    Encode(EncodeArgs),
    /// Restore erased shards (entries with "value": null).
    Repair(RepairArgs),
    /// Rebuild a profile and check its properties.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstructionArg {
    #[value(name = "all_symbol")]
    AllSymbol,
    #[value(name = "pyramid")]
    Pyramid,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[arg(long, value_enum)]
    pub construction: ConstructionArg,
    /// Code length (all_symbol; for pyramid it is derived and only checked).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: usize,
    /// all_symbol: "n1:r1,n2:r2,…", outermost first. pyramid: "r1=…,r2=…".
    #[arg(long)]
    pub levels: String,
    /// Pyramid minimum distance.
    #[arg(long)]
    pub d: Option<usize>,
    /// Pyramid middle-code distance.
    #[arg(long)]
    pub delta1: Option<usize>,
    /// Where to write the profile JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(after_help = "Message formats:
  A file holding a JSON array of exactly k integers is read as field elements.
  Any other content is read as raw bytes: the byte count as unsigned LEB128,
  then the bytes, is split MSB-first into floor(log2 q)-bit symbols; the last
  symbol is zero-padded and zero symbols fill the rest of the k slots.
  The payload must fit in one message of k symbols.")]
pub struct EncodeArgs {
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Shard file to write; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RepairArgs {
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long)]
    pub shards: PathBuf,
    /// Restored shard file; defaults to <shards>.restored.jsonl.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub profile: PathBuf,
    /// Compute the exact minimum distance by enumeration (q^k ≤ 2^24).
    #[arg(long)]
    pub oracle: bool,
    /// Run the support-accumulation audit.
    #[arg(long)]
    pub audit: bool,
}
