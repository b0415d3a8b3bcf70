use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::community::DEFAULT_SEED;
use crate::corpus::{MultiRankPolicy, DEFAULT_MONTH, DEFAULT_TIER_CUTOFF};
use crate::decompose::{DEFAULT_CORE_TARGET, DEFAULT_GRID_POINTS};
use crate::diff::DEFAULT_COLOCATION_BINS;
use crate::error::{Error, Result};
use crate::metrics::ComponentMode;
use crate::null_model::{EnsembleSpec, RewireMode, SwapCount, DEFAULT_REPLICATES};
use crate::stats::DEFAULT_HIST_BINS;

/// Whole-run configuration, read from TOML. Every key has a default; input
/// paths are resolved against the configuration file's directory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: InputConfig,
    pub study: StudyConfig,
    pub metrics: MetricsConfig,
    pub community: CommunityConfig,
    pub null: NullConfig,
    pub decompose: DecomposeConfig,
    pub diff: DiffConfig,
    pub dist: DistConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputConfig {
    pub corpus: PathBuf,
    pub ranking: PathBuf,
    /// `code <TAB> label` sidecar; without it the universe is every code seen
    /// in the corpus.
    pub concepts: Option<PathBuf>,
    pub multi_rank: MultiRankPolicy,
}

impl Default for InputConfig {
    fn default() -> Self {
        InputConfig {
            corpus: "corpus.tsv".into(),
            ranking: "ranking.tsv".into(),
            concepts: None,
            multi_rank: MultiRankPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    /// Years to analyse; empty means every year in the corpus.
    pub years: Vec<i32>,
    pub cutoff: f64,
    pub month: u8,
    pub rollup_level: Option<usize>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            years: Vec::new(),
            cutoff: DEFAULT_TIER_CUTOFF,
            month: DEFAULT_MONTH,
            rollup_level: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    pub aspl_component: ComponentMode,
    pub top_k: usize,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            aspl_component: ComponentMode::All,
            top_k: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommunityConfig {
    pub seed: u64,
    pub runs: usize,
    pub resolution: f64,
}

impl Default for CommunityConfig {
    fn default() -> Self {
        CommunityConfig {
            seed: DEFAULT_SEED,
            runs: 20,
            resolution: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NullConfig {
    pub replicates: usize,
    pub swaps: SwapCount,
    pub mode: RewireMode,
    pub seed: u64,
}

impl Default for NullConfig {
    fn default() -> Self {
        NullConfig {
            replicates: DEFAULT_REPLICATES,
            swaps: SwapCount::Auto,
            mode: RewireMode::AllPairs,
            seed: DEFAULT_SEED,
        }
    }
}

impl NullConfig {
    pub fn spec(&self) -> EnsembleSpec {
        EnsembleSpec {
            replicates: self.replicates,
            swaps: self.swaps,
            seed: self.seed,
            mode: self.mode,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecomposeConfig {
    pub grid_points: usize,
    pub target: usize,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig {
            grid_points: DEFAULT_GRID_POINTS,
            target: DEFAULT_CORE_TARGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiffConfig {
    pub normalize: bool,
    pub colocation_bins: usize,
}

impl Default for DiffConfig {
    fn default() -> Self {
        DiffConfig {
            normalize: true,
            colocation_bins: DEFAULT_COLOCATION_BINS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistConfig {
    pub bins: usize,
    /// Lower cut of the link-weight power-law tail.
    pub link_xmin: f64,
    /// Node-strength range of the exponential fit.
    pub strength_range: [f64; 2],
}

impl Default for DistConfig {
    fn default() -> Self {
        DistConfig {
            bins: DEFAULT_HIST_BINS,
            link_xmin: 10f64.powf(-1.5),
            strength_range: [1.0, 6.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: "out".into() }
    }
}

/// Parsed configuration together with the raw bytes it was read from.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: PipelineConfig,
    pub raw: Vec<u8>,
    pub base_dir: PathBuf,
}

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: PipelineConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<LoadedConfig> {
        let raw = fs::read(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::MissingInput(path.to_path_buf()),
            _ => Error::io(path, e),
        })?;
        let text = String::from_utf8(raw.clone())
            .map_err(|_| Error::Config(format!("{} is not UTF-8", path.display())))?;
        let config = PipelineConfig::parse(&text)?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(LoadedConfig {
            config,
            raw,
            base_dir,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.study.cutoff > 0.0 && self.study.cutoff < 1.0) {
            return bad(format!("study.cutoff {} outside (0,1)", self.study.cutoff));
        }
        if !(1..=12).contains(&self.study.month) {
            return bad(format!("study.month {} outside 1-12", self.study.month));
        }
        if self.metrics.top_k == 0 {
            return bad("metrics.top_k must be at least 1".into());
        }
        if self.community.runs == 0 || !(self.community.resolution > 0.0) {
            return bad("community.runs must be >= 1 and resolution > 0".into());
        }
        if self.null.replicates == 0 {
            return bad("null.replicates must be at least 1".into());
        }
        if self.decompose.grid_points < 2 || self.decompose.target < 2 {
            return bad("decompose.grid_points and decompose.target must be at least 2".into());
        }
        if self.dist.bins == 0 || !(self.dist.link_xmin > 0.0) {
            return bad("dist.bins must be >= 1 and dist.link_xmin > 0".into());
        }
        let [a, b] = self.dist.strength_range;
        if !(b > a) {
            return bad(format!("dist.strength_range [{a}, {b}] is empty"));
        }
        if self.diff.colocation_bins == 0 {
            return bad("diff.colocation_bins must be at least 1".into());
        }
        Ok(())
    }
}

impl LoadedConfig {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}
