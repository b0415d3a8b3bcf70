//! Full study run: corpus and rankings in, every table and figure data file
//! out, plus a manifest of digests.

mod config;
mod manifest;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

pub use config::{
    CommunityConfig, DecomposeConfig, DiffConfig, DistConfig, InputConfig, LoadedConfig, MetricsConfig,
    NullConfig, OutputConfig, PipelineConfig, StudyConfig,
};
pub use manifest::{
    file_sha256, sha256_hex, ArtifactWriter, InputDigest, OutputEntry, RunManifest, Seeds, MANIFEST_FILE,
};

use crate::community::{first_level_strengths, louvain_best, CategoryStrength, Partition};
use crate::corpus::{Concept, Corpus, IngestReport, JournalTierTable, Tier, ViewSelector};
use crate::decompose::{compare_to_null, default_grid, inner_core, DecompositionProfile, InnerCore};
use crate::diff::{colocation, diff_vs_reference_scaling, signed_difference, ColocationPair, Scaling, SignedDifference};
use crate::error::{Error, Result};
use crate::fmt::num;
use crate::graph::{
    cosine_normalize, count_cooccurrences_with, io, prune_shared_isolates, read_universe, universe_from_corpus,
    ConceptNetwork, CountOptions, NetworkMeta,
};
use crate::metrics::{top_by, top_nodes, GlobalMetricsReport, NodeMetrics, RankKey};
use crate::stats::{fit_exponential, fit_power_law_tail, log_binned_histogram, BinnedHistogram, TailFit};

/// Load the configuration at `config_path` and run every stage. Output goes
/// to `out_override` when given, else to the configured directory.
pub fn run_pipeline(config_path: &Path, out_override: Option<&Path>) -> Result<RunManifest> {
    let loaded = PipelineConfig::load(config_path)?;
    let out = match out_override {
        Some(p) => p.to_path_buf(),
        None => loaded.resolve(&loaded.config.output.dir),
    };
    run_loaded(&loaded, &out)
}

/// Run with an already loaded configuration. On a stage failure the
/// manifest is still written, marked incomplete, and the error returned.
pub fn run_loaded(loaded: &LoadedConfig, out: &Path) -> Result<RunManifest> {
    let cfg = &loaded.config;
    let mut manifest = RunManifest::new(
        sha256_hex(&loaded.raw),
        Seeds {
            community: cfg.community.seed,
            null_model: cfg.null.seed,
        },
    );
    let mut inputs = vec![("corpus", loaded.resolve(&cfg.input.corpus)), ("ranking", loaded.resolve(&cfg.input.ranking))];
    if let Some(c) = &cfg.input.concepts {
        inputs.push(("concepts", loaded.resolve(c)));
    }
    for (role, path) in &inputs {
        if !path.is_file() {
            return Err(Error::MissingInput(path.clone()));
        }
        manifest.inputs.push(InputDigest {
            role: role.to_string(),
            file: path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
            sha256: file_sha256(path)?,
        });
    }
    let mut writer = ArtifactWriter::create(out)?;
    let result = Study::run(loaded, &mut writer, &mut manifest.stages);
    match &result {
        Ok(()) => manifest.complete = true,
        Err(e) => manifest.error = Some(e.to_string()),
    }
    manifest.outputs = writer.entries();
    writer.finish(&manifest)?;
    result.map(|()| manifest)
}

/// One built network and the view it came from.
struct Snapshot {
    selector: ViewSelector,
    net: ConceptNetwork,
}

impl Snapshot {
    fn name(&self) -> String {
        self.selector.to_string()
    }

    /// Networks entering pruning, metrics and the difference analysis.
    fn analysed(&self) -> bool {
        self.selector.tier == Tier::I || self.selector.month.is_some()
    }
}

struct Study<'a> {
    cfg: &'a PipelineConfig,
    snapshots: Vec<Snapshot>,
}

#[derive(Serialize)]
struct IngestSummary<'a> {
    accepted: usize,
    duplicates: usize,
    rejected: usize,
    rejections: &'a [crate::corpus::Rejection],
    universe: usize,
    years: Vec<i32>,
}

#[derive(Serialize)]
struct NetworkAnalysis {
    report: GlobalMetricsReport,
    #[serde(skip)]
    partition: Option<Partition>,
    #[serde(skip)]
    nodes: NodeMetrics,
    #[serde(skip)]
    categories: Vec<CategoryStrength>,
}

#[derive(Serialize)]
struct CoreRecord {
    network: String,
    core: Option<InnerCore>,
    error: Option<String>,
    null_failures: usize,
    below_band_points: usize,
}

#[derive(Serialize)]
struct FitRecord {
    network: String,
    what: &'static str,
    fit: Option<TailFit>,
    error: Option<String>,
    excluded_nonpositive: usize,
}

#[derive(Serialize)]
struct ScalingReport {
    reference: &'static str,
    normalized: bool,
    per_year: Vec<(i32, Scaling)>,
    pooled: Scaling,
}

impl<'a> Study<'a> {
    fn run(loaded: &'a LoadedConfig, w: &mut ArtifactWriter, stages: &mut Vec<String>) -> Result<()> {
        let cfg = &loaded.config;
        let (corpus, report) = Corpus::open(&loaded.resolve(&cfg.input.corpus))?;
        let ranking_path = loaded.resolve(&cfg.input.ranking);
        let file = File::open(&ranking_path).map_err(|e| Error::io(&ranking_path, e))?;
        let table = JournalTierTable::read(
            BufReader::new(file),
            &ranking_path.display().to_string(),
            cfg.input.multi_rank,
        )?;
        let universe = match &cfg.input.concepts {
            Some(p) => {
                let p = loaded.resolve(p);
                let f = File::open(&p).map_err(|e| Error::io(&p, e))?;
                read_universe(BufReader::new(f), &p.display().to_string())?
            }
            None => universe_from_corpus(&corpus, cfg.study.rollup_level),
        };
        if universe.is_empty() {
            return Err(Error::Config("concept universe is empty".into()));
        }
        let years: Vec<i32> = if cfg.study.years.is_empty() {
            corpus.count_by_year().into_keys().collect()
        } else {
            cfg.study.years.clone()
        };
        if years.is_empty() {
            return Err(Error::EmptyNetwork);
        }
        write_ingest(w, &report, universe.len(), &years)?;
        stages.push("ingest".into());

        let mut study = Study {
            cfg,
            snapshots: Vec::new(),
        };
        study.build(w, &corpus, &table, &universe, &years)?;
        stages.push("build".into());
        study.prune(w)?;
        stages.push("prune".into());
        study.metrics(w)?;
        stages.push("metrics".into());
        study.decompose(w)?;
        stages.push("decompose".into());
        let diffs = study.diff(w, &years)?;
        stages.push("diff".into());
        study.dist(w, &diffs)?;
        stages.push("dist".into());
        Ok(())
    }

    fn build(
        &mut self,
        w: &mut ArtifactWriter,
        corpus: &Corpus,
        table: &JournalTierTable,
        universe: &[Concept],
        years: &[i32],
    ) -> Result<()> {
        let month = self.cfg.study.month;
        let selectors: Vec<ViewSelector> = years
            .iter()
            .flat_map(|&y| {
                [
                    ViewSelector::new(Tier::I, y, None),
                    ViewSelector::new(Tier::NI, y, Some(month)),
                    ViewSelector::new(Tier::NI, y, None),
                ]
            })
            .collect();
        let opts = CountOptions {
            rollup_level: self.cfg.study.rollup_level,
        };
        let cutoff = self.cfg.study.cutoff;
        self.snapshots = selectors
            .par_iter()
            .map(|&sel| {
                let view = corpus.view(table, cutoff, sel)?;
                let counts = count_cooccurrences_with(&view, universe, opts)?;
                let meta = NetworkMeta {
                    tier: sel.tier_label(),
                    year: Some(sel.year),
                    ..NetworkMeta::default()
                };
                Ok(Snapshot {
                    selector: sel,
                    net: cosine_normalize(&counts, meta),
                })
            })
            .collect::<Result<_>>()?;

        let mut t1 = String::from("year\tI\tNI\tNI-month\tunranked\n");
        for &y in years {
            let docs = |tier: Tier, m: Option<u8>| {
                self.snapshots
                    .iter()
                    .find(|s| s.selector == ViewSelector::new(tier, y, m))
                    .map_or(0, |s| s.net.meta.documents)
            };
            let _ = writeln!(
                t1,
                "{y}\t{}\t{}\t{}\t{}",
                docs(Tier::I, None),
                docs(Tier::NI, None),
                docs(Tier::NI, Some(month)),
                corpus.unranked_count(table, y)
            );
        }
        w.write("documents.tsv", t1)
    }

    /// Remove nodes isolated in every analysed network, from all networks.
    fn prune(&mut self, w: &mut ArtifactWriter) -> Result<()> {
        let analysed: Vec<ConceptNetwork> = self
            .snapshots
            .iter()
            .filter(|s| s.analysed())
            .map(|s| s.net.clone())
            .collect();
        let (_, removed) = prune_shared_isolates(&analysed)?;
        let gone: BTreeSet<_> = removed.iter().map(|c| c.code.clone()).collect();
        let first = &self.snapshots[0].net;
        let keep: Vec<usize> = (0..first.node_count())
            .filter(|&i| !gone.contains(first.code(i)))
            .collect();
        for s in &mut self.snapshots {
            s.net = s.net.restrict(&keep);
        }
        let mut out = String::from("code\tlabel\n");
        for c in &removed {
            let _ = writeln!(out, "{}\t{}", c.code, c.label);
        }
        w.write("pruned.tsv", out)?;
        for s in &self.snapshots {
            write_net(w, &format!("nets/{}", s.name()), &s.net)?;
        }
        Ok(())
    }

    fn metrics(&self, w: &mut ArtifactWriter) -> Result<()> {
        let cfg = self.cfg;
        let analyses: Vec<NetworkAnalysis> = self
            .snapshots
            .par_iter()
            .map(|s| {
                let mut report = GlobalMetricsReport::compute(&s.net, cfg.metrics.aspl_component)?;
                let partition = match louvain_best(&s.net, cfg.community.seed, cfg.community.runs, cfg.community.resolution) {
                    Ok(p) => {
                        report.modularity = Some(p.modularity);
                        report.modularity_seed = Some(p.seed);
                        Some(p)
                    }
                    Err(e) => {
                        report.undefined.push(format!("modularity: {e}"));
                        None
                    }
                };
                Ok(NetworkAnalysis {
                    report,
                    partition,
                    nodes: NodeMetrics::compute(&s.net),
                    categories: first_level_strengths(&s.net)?,
                })
            })
            .collect::<Result<_>>()?;

        let reports: Vec<&GlobalMetricsReport> = analyses.iter().map(|a| &a.report).collect();
        w.write_json("metrics.json", &reports)?;
        w.write("summary.tsv", summary_table(&self.snapshots, &analyses))?;

        let k = cfg.metrics.top_k;
        let mut ranks = String::from("network\tkey\trank\tcode\tvalue\n");
        for (s, a) in self.snapshots.iter().zip(&analyses) {
            let name = s.name();
            for key in [RankKey::Strength, RankKey::Betweenness] {
                let label = match key {
                    RankKey::Strength => "strength",
                    RankKey::Betweenness => "betweenness",
                };
                for (r, item) in top_nodes(&a.nodes, key, k)?.iter().enumerate() {
                    let _ = writeln!(ranks, "{name}\t{label}\t{}\t{}\t{}", r + 1, item.code, num(item.value));
                }
            }
            type Pick = fn(&CategoryStrength) -> f64;
            let picks: [(&str, Pick); 3] = [
                ("category-total", |c| c.total),
                ("category-intra", |c| c.intra),
                ("category-inter", |c| c.inter),
            ];
            for (label, f) in picks {
                let items = a.categories.iter().map(|c| (c.category.as_str(), f(c)));
                for (r, item) in top_by(items, k)?.iter().enumerate() {
                    let _ = writeln!(ranks, "{name}\t{label}\t{}\t{}\t{}", r + 1, item.code, num(item.value));
                }
            }

            let mut cats = String::from("category\ttotal\tintra\tinter\n");
            for c in &a.categories {
                let _ = writeln!(cats, "{}\t{}\t{}\t{}", c.category, num(c.total), num(c.intra), num(c.inter));
            }
            w.write(&format!("categories/{name}.tsv"), cats)?;

            if let Some(p) = &a.partition {
                let mut order: Vec<usize> = (0..s.net.node_count()).collect();
                order.sort_by(|&x, &y| s.net.code(x).cmp(s.net.code(y)));
                let mut part = String::from("code\tcommunity\n");
                for i in order {
                    let _ = writeln!(part, "{}\t{}", s.net.code(i), p.membership[i]);
                }
                w.write(&format!("partitions/{name}.tsv"), part)?;
            }
            let communities = a.partition.as_ref().map(|p| p.membership.as_slice());
            w.write(&format!("graphs/{name}.graphml"), io::graph_xml(&s.net, communities))?;
        }
        w.write("rankings.tsv", ranks)
    }

    fn decompose(&self, w: &mut ArtifactWriter) -> Result<()> {
        let nets: Vec<(String, &ConceptNetwork)> = self
            .snapshots
            .iter()
            .filter(|s| s.analysed())
            .map(|s| (s.name(), &s.net))
            .collect();
        self.decompose_nets(w, &nets)
    }

    fn decompose_nets(&self, w: &mut ArtifactWriter, nets: &[(String, &ConceptNetwork)]) -> Result<()> {
        let cfg = self.cfg;
        let spec = cfg.null.spec();
        let results: Vec<(DecompositionProfile, CoreRecord)> = nets
            .par_iter()
            .map(|(name, net)| {
                let grid = default_grid(net, cfg.decompose.grid_points)?;
                let profile = compare_to_null(net, &spec, &grid)?;
                let (core, error) = match inner_core(net, cfg.decompose.target, &grid) {
                    Ok(c) => (Some(c), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                let record = CoreRecord {
                    network: name.clone(),
                    core,
                    error,
                    null_failures: profile.null.as_ref().map_or(0, |e| e.failures.len()),
                    below_band_points: profile.below_band().len(),
                };
                Ok((profile, record))
            })
            .collect::<Result<_>>()?;
        for ((name, _), (profile, record)) in nets.iter().zip(&results) {
            w.write(&format!("profiles/{name}.csv"), profile.to_csv())?;
            w.write_json(&format!("cores/{name}.json"), record)?;
        }
        Ok(())
    }

    fn diff(&self, w: &mut ArtifactWriter, years: &[i32]) -> Result<Vec<(i32, SignedDifference, ConceptNetwork)>> {
        let cfg = self.cfg;
        let month = cfg.study.month;
        let find = |tier, y, m| {
            self.snapshots
                .iter()
                .find(|s| s.selector == ViewSelector::new(tier, y, m))
                .map(|s| &s.net)
                .expect("snapshot built for every year")
        };
        let mut diffs = Vec::new();
        let mut coloc = String::from("year\tpairing\tsamples\tslope\tintercept\tr_squared\n");
        let mut bins = String::from("year\tpairing\tlo\thi\tcenter\tcount\tmean\tstderr\n");
        let mut undefined = Vec::new();
        for &y in years {
            let a = find(Tier::I, y, None);
            let b = find(Tier::NI, y, Some(month));
            let d = signed_difference(a, b, cfg.diff.normalize)?;
            write_net(w, &format!("diff/{y}/positive"), &d.positive)?;
            write_net(w, &format!("diff/{y}/negative"), &d.negative)?;
            for pairing in ColocationPair::ALL {
                match colocation(&d, pairing, cfg.diff.colocation_bins) {
                    Ok(c) => {
                        let r = c.regression;
                        let _ = writeln!(
                            coloc,
                            "{y}\t{}\t{}\t{}\t{}\t{}",
                            pairing.label(),
                            c.samples,
                            num(r.slope),
                            num(r.intercept),
                            num(r.r_squared)
                        );
                        for b in &c.bins {
                            let _ = writeln!(
                                bins,
                                "{y}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                                pairing.label(),
                                num(b.lo),
                                num(b.hi),
                                num(b.center),
                                b.count,
                                num(b.mean),
                                b.stderr.map(num).unwrap_or_default()
                            );
                        }
                    }
                    Err(e) => undefined.push(format!("{y} {}: {e}", pairing.label())),
                }
            }
            let reference = match d.normalization {
                Some(m) => a.scaled(1.0 / m),
                None => a.clone(),
            };
            diffs.push((y, d, reference));
        }
        w.write("diff/colocation.tsv", coloc)?;
        w.write("diff/colocation_bins.tsv", bins)?;
        w.write_json("diff/undefined.json", &undefined)?;

        let per_year = diffs
            .iter()
            .map(|(y, d, r)| Ok((*y, diff_vs_reference_scaling(&y.to_string(), &[(d, r)])?)))
            .collect::<Result<Vec<_>>>()?;
        let pooled_inputs: Vec<(&SignedDifference, &ConceptNetwork)> = diffs.iter().map(|(_, d, r)| (d, r)).collect();
        let pooled = diff_vs_reference_scaling("pooled", &pooled_inputs)?;
        w.write_json(
            "scaling.json",
            &ScalingReport {
                reference: "I",
                normalized: cfg.diff.normalize,
                per_year,
                pooled,
            },
        )?;

        let mut nets: Vec<(String, &ConceptNetwork)> = Vec::new();
        for (y, d, _) in &diffs {
            nets.push((format!("diff-pos_{y}"), &d.positive));
            nets.push((format!("diff-neg_{y}"), &d.negative));
        }
        // a difference network with no links has nothing to decompose
        let nets: Vec<_> = nets.into_iter().filter(|(_, n)| n.edge_count() > 0).collect();
        self.decompose_nets(w, &nets)?;
        Ok(diffs)
    }

    fn dist(&self, w: &mut ArtifactWriter, diffs: &[(i32, SignedDifference, ConceptNetwork)]) -> Result<()> {
        let cfg = &self.cfg.dist;
        let mut jobs: Vec<(String, &ConceptNetwork, &'static str)> = Vec::new();
        for s in &self.snapshots {
            jobs.push((s.name(), &s.net, "links"));
            if s.analysed() {
                jobs.push((s.name(), &s.net, "strength"));
            }
        }
        for (y, d, _) in diffs {
            jobs.push((format!("diff-pos_{y}"), &d.positive, "links"));
            jobs.push((format!("diff-neg_{y}"), &d.negative, "links"));
        }
        let mut csv = String::from("network,what,bin_lo,bin_hi,center,count,density\n");
        let mut fits = Vec::new();
        for (name, net, what) in jobs {
            let samples: Vec<f64> = match what {
                "links" => net.pair_weights(),
                _ => net.strengths(),
            };
            match log_binned_histogram(&samples, cfg.bins, None) {
                Ok(h) => push_hist(&mut csv, &name, what, &h),
                Err(e) => fits.push(FitRecord {
                    network: name.clone(),
                    what: "histogram",
                    fit: None,
                    error: Some(e.to_string()),
                    excluded_nonpositive: samples.len(),
                }),
            }
            let excluded = samples.iter().filter(|&&x| !(x > 0.0)).count();
            let fit = match what {
                "links" => fit_power_law_tail(&samples, cfg.link_xmin),
                _ => fit_exponential(&samples, cfg.strength_range[0], cfg.strength_range[1]),
            };
            let (fit, error) = match fit {
                Ok(f) => (Some(f), None),
                Err(e) => (None, Some(e.to_string())),
            };
            fits.push(FitRecord {
                network: name,
                what,
                fit,
                error,
                excluded_nonpositive: excluded,
            });
        }
        w.write("dist.csv", csv)?;
        w.write_json("fits.json", &fits)
    }
}

fn push_hist(out: &mut String, name: &str, what: &str, h: &BinnedHistogram) {
    for (k, e) in h.edges.windows(2).enumerate() {
        let _ = writeln!(
            out,
            "{name},{what},{},{},{},{},{}",
            num(e[0]),
            num(e[1]),
            num((e[0] * e[1]).sqrt()),
            h.counts[k],
            num(h.density[k])
        );
    }
}

fn write_ingest(w: &mut ArtifactWriter, report: &IngestReport, universe: usize, years: &[i32]) -> Result<()> {
    w.write_json(
        "ingest.json",
        &IngestSummary {
            accepted: report.accepted,
            duplicates: report.duplicates,
            rejected: report.rejections.len(),
            rejections: &report.rejections,
            universe,
            years: years.to_vec(),
        },
    )
}

fn write_net(w: &mut ArtifactWriter, dir: &str, net: &ConceptNetwork) -> Result<()> {
    w.write(&format!("{dir}/{}", io::NODES_FILE), io::nodes_tsv(net))?;
    w.write(&format!("{dir}/{}", io::EDGES_FILE), io::edges_tsv(net))?;
    w.write_json(&format!("{dir}/{}", io::META_FILE), &net.meta)
}

/// Metric rows by network columns, for the analysed networks.
fn summary_table(snapshots: &[Snapshot], analyses: &[NetworkAnalysis]) -> String {
    let cols: Vec<(String, &GlobalMetricsReport)> = snapshots
        .iter()
        .zip(analyses)
        .filter(|(s, _)| s.analysed())
        .map(|(s, a)| (s.name(), &a.report))
        .collect();
    let mut out = String::from("metric");
    for (name, _) in &cols {
        out.push('\t');
        out.push_str(name);
    }
    out.push('\n');
    type Get = fn(&GlobalMetricsReport) -> Option<f64>;
    let rows: [(&str, Get); 7] = [
        ("mean_strength", |r| Some(r.mean_strength)),
        ("edge_density", |r| Some(r.edge_density)),
        ("links", |r| Some(r.edge_count as f64)),
        ("modularity", |r| r.modularity),
        ("gcc", |r| r.gcc),
        ("aspl", |r| r.aspl),
        ("assortativity", |r| r.assortativity),
    ];
    for (label, get) in rows {
        out.push_str(label);
        for (_, r) in &cols {
            out.push('\t');
            out.push_str(&get(r).map(num).unwrap_or_else(|| "NA".into()));
        }
        out.push('\n');
    }
    out
}
