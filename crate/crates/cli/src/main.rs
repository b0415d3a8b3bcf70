//! `idnet`: build and analyse concept co-occurrence networks by impact tier.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufReader, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use idnet_core::community::{eval_modularity, first_level_strengths, louvain_best, DEFAULT_SEED};
use idnet_core::corpus::{
    classify_tier, fetch_remote, Corpus, FetchConfig, JournalTierTable, MultiRankPolicy, QueryWindow, Tier,
    TierOutcome, ViewSelector, DEFAULT_TIER_CUTOFF,
};
use idnet_core::decompose::{compare_to_null, default_grid, inner_core, lcc_curve, DEFAULT_CORE_TARGET, DEFAULT_GRID_POINTS};
use idnet_core::diff::{colocation, diff_vs_reference_scaling, signed_difference, ColocationPair, DEFAULT_COLOCATION_BINS};
use idnet_core::fmt::num;
use idnet_core::graph::io::{export_graph, read_network_dir, write_network_dir, ExportFormat};
use idnet_core::graph::{
    cosine_normalize, count_cooccurrences_with, read_universe, universe_from_corpus, ConceptNetwork, CountOptions,
    NetworkMeta,
};
use idnet_core::metrics::{gcc, mean_strength, strength_assortativity, top_nodes, ComponentMode, GlobalMetricsReport, NodeMetrics, RankKey};
use idnet_core::null_model::{ensemble_band, EnsembleSpec, RewireMode, SwapCount, DEFAULT_REPLICATES};
use idnet_core::pipeline::run_pipeline;
use idnet_core::stats::{fit_exponential, fit_power_law_tail, log_binned_histogram, DEFAULT_HIST_BINS};
use idnet_core::synth::{SyntheticCorpus, FIXTURE_SEED};
use idnet_core::ErrorClass;

#[derive(Parser)]
#[command(name = "idnet", version, about = "Concept co-occurrence networks stratified by journal impact tier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a corpus file and report accepted, duplicate and rejected lines.
    Ingest {
        corpus: PathBuf,
        /// Write the accepted records back out in canonical form.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify every ranked journal of a year into tiers.
    Tiers {
        #[command(flatten)]
        ranking: RankingArgs,
        #[arg(long)]
        year: i32,
    },
    /// List the documents of one tier view.
    View {
        #[command(flatten)]
        view: ViewArgs,
        /// Print only the number of documents.
        #[arg(long)]
        count: bool,
    },
    /// Build the cosine-weighted network of one view.
    BuildNet {
        #[command(flatten)]
        view: ViewArgs,
        /// Concept universe (`code<TAB>label`); defaults to every code in the corpus.
        #[arg(long)]
        concepts: Option<PathBuf>,
        #[arg(long)]
        rollup_level: Option<usize>,
        /// Network directory to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Global metrics of a network directory, as JSON.
    Metrics {
        net: PathBuf,
        #[arg(long, default_value = "all")]
        component: ComponentMode,
        #[command(flatten)]
        community: CommunityArgs,
    },
    /// Top nodes by strength or betweenness.
    Rank {
        net: PathBuf,
        #[arg(long, default_value = "strength")]
        key: RankKey,
        #[arg(long, default_value_t = 3)]
        top: usize,
    },
    /// Best-of-N Louvain partition as `code<TAB>community`.
    Communities {
        net: PathBuf,
        #[command(flatten)]
        community: CommunityArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Total, intra and inter link weight per first-level category.
    Categories { net: PathBuf },
    /// Rewired-ensemble band of an observable.
    Nullband {
        net: PathBuf,
        /// lcc, mean-strength, gcc or assortativity.
        #[arg(long, default_value = "lcc")]
        observable: String,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        grid_points: usize,
        #[command(flatten)]
        null: NullArgs,
    },
    /// LCC profile against the null band, plus the inner core.
    Decompose {
        net: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        grid_points: usize,
        #[arg(long, default_value_t = DEFAULT_CORE_TARGET)]
        target: usize,
        #[command(flatten)]
        null: NullArgs,
        /// Directory for `profile.csv` and `core.json`; stdout otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Signed difference `A - B`, written as positive and negative networks.
    Diff {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Link co-location regression on the difference `A - B`.
    Colocate {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value = "pos-pos")]
        pairing: ColocationPair,
        #[arg(long, default_value_t = DEFAULT_COLOCATION_BINS)]
        bins: usize,
        #[arg(long)]
        normalize: bool,
    },
    /// Power-law fit of |A - B| against the weight in A.
    Scaling {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        normalize: bool,
    },
    /// Log-binned distribution of link weights or strengths, with a tail fit.
    Dist {
        net: PathBuf,
        /// links or strength.
        #[arg(long, default_value = "links")]
        what: String,
        #[arg(long, default_value_t = DEFAULT_HIST_BINS)]
        bins: usize,
        /// Lower cutoff of the link-weight power-law fit.
        #[arg(long, default_value_t = 10f64.powf(-1.5))]
        xmin: f64,
        /// Strength range of the exponential fit.
        #[arg(long, num_args = 2, default_values_t = [1.0, 6.0])]
        range: Vec<f64>,
    },
    /// Run the full study from a configuration file.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export a network directory as an edge list or GraphML.
    Export {
        net: PathBuf,
        #[arg(long, default_value = "graph-xml")]
        format: ExportFormat,
        /// `code<TAB>community` file to attach as a node attribute.
        #[arg(long)]
        communities: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the synthetic fixture corpus.
    Synth {
        #[arg(long, default_value_t = FIXTURE_SEED)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Download one publication window from the remote bibliographic service.
    Fetch {
        #[arg(long)]
        year: i32,
        #[arg(long)]
        month: Option<u8>,
        /// `descriptor<TAB>code,code` map from remote descriptors to concept codes.
        #[arg(long)]
        descriptor_map: PathBuf,
        #[arg(long)]
        base_url: Option<String>,
        #[arg(long, default_value_t = 200)]
        batch_size: usize,
        #[arg(long, default_value_t = 3.0)]
        rate: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RankingArgs {
    #[arg(long)]
    ranking: PathBuf,
    #[arg(long, default_value = "reject")]
    multi_rank: MultiRankPolicy,
    #[arg(long, default_value_t = DEFAULT_TIER_CUTOFF)]
    cutoff: f64,
}

#[derive(Args)]
struct ViewArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[command(flatten)]
    ranking: RankingArgs,
    #[arg(long)]
    tier: Tier,
    #[arg(long)]
    year: i32,
    /// Restrict to one month; `--month` alone means June.
    #[arg(long, num_args = 0..=1, default_missing_value = "6")]
    month: Option<u8>,
}

#[derive(Args)]
struct CommunityArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    runs: usize,
    #[arg(long, default_value_t = 1.0)]
    resolution: f64,
}

#[derive(Args)]
struct NullArgs {
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    replicates: usize,
    #[arg(long, default_value = "auto")]
    swaps: SwapCount,
    #[arg(long, default_value = "all-pairs")]
    mode: RewireMode,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    null_seed: u64,
}

impl NullArgs {
    fn spec(&self) -> EnsembleSpec {
        EnsembleSpec {
            replicates: self.replicates,
            swaps: self.swaps,
            seed: self.null_seed,
            mode: self.mode,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 for configuration problems, 3 for bad data, 4 for undefined numerics.
fn exit_code(e: &anyhow::Error) -> u8 {
    let class = e
        .chain()
        .find_map(|c| c.downcast_ref::<idnet_core::Error>())
        .map_or(ErrorClass::Data, |c| c.class());
    match class {
        ErrorClass::Config => 2,
        ErrorClass::Data => 3,
        ErrorClass::Numeric => 4,
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Ingest { corpus, out } => {
            let (store, report) = open_corpus(&corpus)?;
            if let Some(out) = out {
                let text: String = store.records().map(|r| r.to_line() + "\n").collect();
                write(&out, &text)?;
            }
            print_json(&report)
        }
        Command::Tiers { ranking, year } => {
            let table = open_ranking(&ranking)?;
            let mut out = String::from("journal_id\tpercentile\ttier\n");
            for (journal, p) in table.journals(year) {
                let tier = match classify_tier(&table, journal, year, ranking.cutoff)? {
                    TierOutcome::Ranked(t) => t.to_string(),
                    TierOutcome::Unranked => "unranked".into(),
                };
                let _ = writeln!(out, "{journal}\t{}\t{tier}", num(p));
            }
            emit(None, &out)
        }
        Command::View { view, count } => {
            let (corpus, _) = open_corpus(&view.corpus)?;
            let table = open_ranking(&view.ranking)?;
            let docs = corpus.view(&table, view.ranking.cutoff, view.selector())?;
            if count {
                return emit(None, &format!("{}\n", docs.count()));
            }
            let text: String = docs.iter().map(|r| r.to_line() + "\n").collect();
            emit(None, &text)
        }
        Command::BuildNet { view, concepts, rollup_level, out } => {
            let (corpus, _) = open_corpus(&view.corpus)?;
            let table = open_ranking(&view.ranking)?;
            let universe = match concepts {
                Some(p) => {
                    let f = File::open(&p).with_context(|| format!("opening {}", p.display()))?;
                    read_universe(BufReader::new(f), &p.display().to_string())?
                }
                None => universe_from_corpus(&corpus, rollup_level),
            };
            let sel = view.selector();
            let docs = corpus.view(&table, view.ranking.cutoff, sel)?;
            let counts = count_cooccurrences_with(&docs, &universe, CountOptions { rollup_level })?;
            let meta = NetworkMeta {
                tier: sel.tier_label(),
                year: Some(sel.year),
                ..NetworkMeta::default()
            };
            let net = cosine_normalize(&counts, meta);
            write_network_dir(&net, &out)?;
            eprintln!("{}: {} nodes, {} links, {} documents", net.meta.name(), net.node_count(), net.edge_count(), net.meta.documents);
            Ok(())
        }
        Command::Metrics { net, component, community } => {
            let net = open_net(&net)?;
            let mut report = GlobalMetricsReport::compute(&net, component)?;
            match louvain_best(&net, community.seed, community.runs, community.resolution) {
                Ok(p) => {
                    report.modularity = Some(p.modularity);
                    report.modularity_seed = Some(p.seed);
                }
                Err(e) => report.undefined.push(format!("modularity: {e}")),
            }
            print_json(&report)
        }
        Command::Rank { net, key, top } => {
            let net = open_net(&net)?;
            let mut out = String::from("rank\tcode\tvalue\n");
            for (r, item) in top_nodes(&NodeMetrics::compute(&net), key, top)?.iter().enumerate() {
                let _ = writeln!(out, "{}\t{}\t{}", r + 1, item.code, num(item.value));
            }
            emit(None, &out)
        }
        Command::Communities { net, community, out } => {
            let net = open_net(&net)?;
            let p = louvain_best(&net, community.seed, community.runs, community.resolution)?;
            let mut order: Vec<usize> = (0..net.node_count()).collect();
            order.sort_by(|&a, &b| net.code(a).cmp(net.code(b)));
            let mut text = String::from("code\tcommunity\n");
            for i in order {
                let _ = writeln!(text, "{}\t{}", net.code(i), p.membership[i]);
            }
            eprintln!("Q = {} over {} communities (seed {})", num(p.modularity), p.community_count, p.seed);
            emit(out.as_deref(), &text)
        }
        Command::Categories { net } => {
            let net = open_net(&net)?;
            let mut out = String::from("category\ttotal\tintra\tinter\n");
            for c in first_level_strengths(&net)? {
                let _ = writeln!(out, "{}\t{}\t{}\t{}", c.category, num(c.total), num(c.intra), num(c.inter));
            }
            emit(None, &out)
        }
        Command::Nullband { net, observable, grid_points, null } => {
            let net = open_net(&net)?;
            let spec = null.spec();
            let (index, ensemble) = match observable.as_str() {
                "lcc" => {
                    let grid = default_grid(&net, grid_points)?;
                    let e = ensemble_band(&net, &spec, |g| Ok(lcc_curve(g, &grid)?.into_iter().map(|s| s as f64).collect()))?;
                    (grid, e)
                }
                "mean-strength" => (vec![0.0], ensemble_band(&net, &spec, |g| Ok(vec![mean_strength(g)?]))?),
                "gcc" => (vec![0.0], ensemble_band(&net, &spec, |g| Ok(vec![gcc(g)?]))?),
                "assortativity" => (vec![0.0], ensemble_band(&net, &spec, |g| Ok(vec![strength_assortativity(g)?]))?),
                other => return Err(idnet_core::Error::InvalidArgument(format!("unknown observable {other:?}")).into()),
            };
            if !ensemble.failures.is_empty() {
                eprintln!("{} of {} replicates failed", ensemble.failures.len(), spec.replicates);
            }
            let b = &ensemble.band;
            let mut out = String::from("x,mean,lo,hi\n");
            for k in 0..index.len() {
                let _ = writeln!(out, "{},{},{},{}", num(index[k]), num(b.mean[k]), num(b.lower[k]), num(b.upper[k]));
            }
            emit(None, &out)
        }
        Command::Decompose { net, grid_points, target, null, out } => {
            let net = open_net(&net)?;
            let grid = default_grid(&net, grid_points)?;
            let profile = compare_to_null(&net, &null.spec(), &grid)?;
            let core = inner_core(&net, target, &grid);
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
                    write(&dir.join("profile.csv"), &profile.to_csv())?;
                    write(&dir.join("core.json"), &(serde_json::to_string_pretty(&core.as_ref().ok())? + "\n"))?;
                }
                None => emit(None, &profile.to_csv())?,
            }
            eprintln!("{} grid points below the null band", profile.below_band().len());
            let core = core?;
            eprintln!("inner core: {} nodes over [{}, {}]: {}", core.size, num(core.t_start), num(core.t_end), core.codes.join(" "));
            Ok(())
        }
        Command::Diff { a, b, normalize, out } => {
            let d = signed_difference(&open_net(&a)?, &open_net(&b)?, normalize)?;
            write_network_dir(&d.positive, &out.join("positive"))?;
            write_network_dir(&d.negative, &out.join("negative"))?;
            eprintln!("{} positive and {} negative links", d.positive.edge_count(), d.negative.edge_count());
            Ok(())
        }
        Command::Colocate { a, b, pairing, bins, normalize } => {
            let d = signed_difference(&open_net(&a)?, &open_net(&b)?, normalize)?;
            print_json(&colocation(&d, pairing, bins)?)
        }
        Command::Scaling { a, b, normalize } => {
            let (a, b) = (open_net(&a)?, open_net(&b)?);
            let d = signed_difference(&a, &b, normalize)?;
            let reference = match d.normalization {
                Some(m) => a.scaled(1.0 / m),
                None => a.clone(),
            };
            print_json(&diff_vs_reference_scaling(&a.meta.name(), &[(&d, &reference)])?)
        }
        Command::Dist { net, what, bins, xmin, range } => {
            let net = open_net(&net)?;
            let (samples, fit) = match what.as_str() {
                "links" => {
                    let s = net.pair_weights();
                    let fit = fit_power_law_tail(&s, xmin);
                    (s, fit)
                }
                "strength" => {
                    let s = net.strengths();
                    let fit = fit_exponential(&s, range[0], range[1]);
                    (s, fit)
                }
                other => bail!(idnet_core::Error::InvalidArgument(format!("unknown sample kind {other:?}"))),
            };
            let h = log_binned_histogram(&samples, bins, None)?;
            let mut out = String::from("bin_lo,bin_hi,center,count,density\n");
            for (k, e) in h.edges.windows(2).enumerate() {
                let _ = writeln!(out, "{},{},{},{},{}", num(e[0]), num(e[1]), num((e[0] * e[1]).sqrt()), h.counts[k], num(h.density[k]));
            }
            emit(None, &out)?;
            let fit = fit?;
            eprintln!("{:?} fit: parameter {} over {} samples (KS {})", fit.family, num(fit.parameter), fit.n_tail, num(fit.ks));
            Ok(())
        }
        Command::Run { config, out } => {
            let manifest = run_pipeline(&config, out.as_deref())?;
            eprintln!("{} outputs, stages: {}", manifest.outputs.len(), manifest.stages.join(", "));
            Ok(())
        }
        Command::Export { net, format, communities, out } => {
            let net = open_net(&net)?;
            let membership = communities.map(|p| read_membership(&net, &p)).transpose()?;
            if let Some(m) = &membership {
                eprintln!("Q = {}", num(eval_modularity(&net, m)?));
            }
            export_graph(&net, format, membership.as_deref(), &out)?;
            Ok(())
        }
        Command::Synth { seed, out } => {
            let s = SyntheticCorpus::generate(seed);
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            write(&out.join("corpus.tsv"), &s.corpus_tsv())?;
            write(&out.join("ranking.tsv"), &s.ranking_tsv())?;
            write(&out.join("concepts.tsv"), &s.concepts_tsv())?;
            write(&out.join("ledger.json"), &s.ledger_json())?;
            eprintln!("{} documents over {} concepts", s.records.len(), s.universe.len());
            Ok(())
        }
        Command::Fetch { year, month, descriptor_map, base_url, batch_size, rate, out } => {
            let map_text = fs::read_to_string(&descriptor_map)
                .map_err(|e| idnet_core::Error::io(&descriptor_map, e))?;
            let mut cfg = FetchConfig {
                descriptor_map: FetchConfig::parse_descriptor_map(&map_text)?,
                batch_size,
                requests_per_second: rate,
                timeout: Duration::from_secs(60),
                ..FetchConfig::default()
            };
            if let Some(url) = base_url {
                cfg.base_url = url;
            }
            let outcome = fetch_remote(&cfg, QueryWindow { year, month })?;
            write(&out, &outcome.to_tsv())?;
            for r in &outcome.rejections {
                eprintln!("rejected {}: {}", r.line, r.reason);
            }
            eprintln!("{} records, {} requests, {} retries", outcome.records.len(), outcome.requests, outcome.retries);
            Ok(())
        }
    }
}

impl ViewArgs {
    fn selector(&self) -> ViewSelector {
        ViewSelector::new(self.tier, self.year, self.month)
    }
}

fn open_corpus(path: &Path) -> Result<(Corpus, idnet_core::corpus::IngestReport)> {
    if !path.is_file() {
        return Err(idnet_core::Error::MissingInput(path.to_path_buf()).into());
    }
    Ok(Corpus::open(path)?)
}

fn open_ranking(args: &RankingArgs) -> Result<JournalTierTable> {
    let path = &args.ranking;
    if !path.is_file() {
        return Err(idnet_core::Error::MissingInput(path.clone()).into());
    }
    let f = File::open(path).map_err(|e| idnet_core::Error::io(path, e))?;
    Ok(JournalTierTable::read(BufReader::new(f), &path.display().to_string(), args.multi_rank)?)
}

fn open_net(dir: &Path) -> Result<ConceptNetwork> {
    if !dir.is_dir() {
        return Err(idnet_core::Error::MissingInput(dir.to_path_buf()).into());
    }
    Ok(read_network_dir(dir)?)
}

/// Community per node, in network order, from a `code<TAB>community` file.
fn read_membership(net: &ConceptNetwork, path: &Path) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path).map_err(|e| idnet_core::Error::io(path, e))?;
    let index = net.index_of();
    let mut membership = vec![None; net.node_count()];
    for (n, line) in text.lines().enumerate().skip(1) {
        let parse_err = |reason: String| idnet_core::Error::Parse {
            path: path.display().to_string(),
            line: n + 1,
            reason,
        };
        let (code, comm) = line.split_once('\t').ok_or_else(|| parse_err("expected code<TAB>community".into()))?;
        let code: idnet_core::ConceptCode = code.parse()?;
        let i = *index.get(&code).ok_or_else(|| parse_err(format!("{code} is not in the network")))?;
        membership[i] = Some(comm.trim().parse().map_err(|_| parse_err(format!("bad community {comm:?}")))?);
    }
    membership
        .into_iter()
        .enumerate()
        .map(|(i, m)| m.ok_or_else(|| idnet_core::Error::Parse {
            path: path.display().to_string(),
            line: 0,
            reason: format!("no community for {}", net.code(i)),
        }.into()))
        .collect()
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| idnet_core::Error::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| idnet_core::Error::io(path, e).into())
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write(p, text),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            // reader went away, e.g. piped into `head`
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            r => Ok(r?),
        },
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    emit(None, &(serde_json::to_string_pretty(value)? + "\n"))
}
